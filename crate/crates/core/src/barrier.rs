//! The log-det barrier `f(x) = -ln det Lambda(x)` on the interior of the
//! dual cone: exact gradient, Hessian and local norms.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactarith::{ldl_factor, BlockDiagMatrix, LdlFactorization, Rational, SymMatrix};
use crate::polybasis::{build_lambda, ConeSpec, LambdaOp};

#[derive(Clone, Debug)]
pub struct BarrierContext {
    op: LambdaOp,
    nu: usize,
}

impl BarrierContext {
    pub fn new(op: LambdaOp) -> Self {
        let nu = op.nu();
        Self { op, nu }
    }

    pub fn from_spec(spec: &ConeSpec) -> Result<Self> {
        Ok(Self::new(build_lambda(spec)?))
    }

    pub fn op(&self) -> &LambdaOp {
        &self.op
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn u(&self) -> usize {
        self.op.u()
    }

    /// Coefficients of the constant polynomial 1.
    pub fn one(&self) -> &[Rational] {
        self.op.one()
    }
}

pub fn in_dual_interior(ctx: &BarrierContext, x: &[Rational]) -> bool {
    match ctx.op.apply(x) {
        Ok(blocks) => blocks.is_pd(),
        Err(_) => false,
    }
}

/// Blockwise `Lambda(x)^-1`, or `NotInterior`.
pub fn lambda_inverse(ctx: &BarrierContext, x: &[Rational]) -> Result<BlockDiagMatrix> {
    let blocks = ctx.op.apply(x)?;
    let inv = blocks
        .blocks()
        .iter()
        .map(|b| b.inverse_spd().map_err(|_| Error::NotInterior))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockDiagMatrix::new(inv))
}

/// `-g(x) = Lambda^*(Lambda(x)^-1)`.
pub fn neg_gradient(ctx: &BarrierContext, x: &[Rational]) -> Result<Vec<Rational>> {
    ctx.op.adjoint(&lambda_inverse(ctx, x)?)
}

/// Hessian of the barrier at a point, with its factorization.
#[derive(Clone, Debug)]
pub struct HessianAt {
    x: Vec<Rational>,
    h: SymMatrix,
    factor: LdlFactorization,
    lambda_inv: BlockDiagMatrix,
}

/// `H(x)_{uv} = sum_i tr(Lambda_i(x)^-1 Lambda_i(e_u) Lambda_i(x)^-1 Lambda_i(e_v))`.
pub fn hessian(ctx: &BarrierContext, x: &[Rational]) -> Result<HessianAt> {
    let lambda_inv = lambda_inverse(ctx, x)?;
    let u = ctx.u();
    let inv_rows: Vec<Vec<Vec<Rational>>> = lambda_inv.blocks().iter().map(SymMatrix::to_rows).collect();

    // Y[u] = list of (block, Lambda_b(x)^-1 Lambda_b(e_u))
    let y: Vec<Vec<(usize, Vec<Vec<Rational>>)>> = (0..u)
        .map(|col| {
            let mut per_block: Vec<(usize, Vec<Vec<Rational>>)> = Vec::new();
            for (b, j, k, c) in ctx.op.column(col) {
                let l = ctx.op.orders()[*b];
                let pos = match per_block.iter().position(|(bb, _)| bb == b) {
                    Some(p) => p,
                    None => {
                        per_block.push((*b, vec![vec![Rational::zero(); l]; l]));
                        per_block.len() - 1
                    }
                };
                let m = &mut per_block[pos].1;
                let inv = &inv_rows[*b];
                for p in 0..l {
                    if !inv[p][*j].is_zero() {
                        m[p][*k] += &inv[p][*j] * c;
                    }
                    if j != k && !inv[p][*k].is_zero() {
                        m[p][*j] += &inv[p][*k] * c;
                    }
                }
            }
            per_block
        })
        .collect();

    let h = SymMatrix::from_fn(u, |a, b| {
        let mut acc = Rational::zero();
        for (ba, ya) in &y[a] {
            if let Some((_, yb)) = y[b].iter().find(|(bb, _)| bb == ba) {
                let l = ya.len();
                for p in 0..l {
                    for q in 0..l {
                        if !ya[p][q].is_zero() && !yb[q][p].is_zero() {
                            acc += &ya[p][q] * &yb[q][p];
                        }
                    }
                }
            }
        }
        acc
    });
    let factor = ldl_factor(&h).map_err(|_| Error::NotInterior)?;
    if !factor.pivots().iter().all(Signed::is_positive) {
        return Err(Error::Internal("barrier Hessian is not positive definite".into()));
    }
    Ok(HessianAt {
        x: x.to_vec(),
        h,
        factor,
        lambda_inv,
    })
}

impl HessianAt {
    pub fn x(&self) -> &[Rational] {
        &self.x
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.h
    }

    pub fn lambda_inv(&self) -> &BlockDiagMatrix {
        &self.lambda_inv
    }

    pub fn factorization(&self) -> &LdlFactorization {
        &self.factor
    }

    pub fn neg_gradient(&self, ctx: &BarrierContext) -> Vec<Rational> {
        ctx.op.adjoint(&self.lambda_inv).expect("orders match")
    }

    pub fn mul(&self, v: &[Rational]) -> Vec<Rational> {
        self.h.mul_vec(v)
    }

    /// `H(x)^-1 s`.
    pub fn solve(&self, s: &[Rational]) -> Vec<Rational> {
        self.factor.solve(s)
    }
}

/// `||v||_x^2 = v^T H(x) v`.
pub fn local_norm_sq(h: &HessianAt, v: &[Rational]) -> Result<Rational> {
    check_len(h, v)?;
    Ok(h.h.quad_form(v))
}

/// `(||s||_x^*)^2 = s^T H(x)^-1 s`.
pub fn dual_local_norm_sq(h: &HessianAt, s: &[Rational]) -> Result<Rational> {
    check_len(h, s)?;
    let w = h.solve(s);
    Ok(s.iter().zip(&w).map(|(a, b)| a * b).sum())
}

fn check_len(h: &HessianAt, v: &[Rational]) -> Result<()> {
    if v.len() != h.x.len() {
        return Err(Error::Dimension(format!(
            "vector of length {}, expected {}",
            v.len(),
            h.x.len()
        )));
    }
    Ok(())
}

/// `det Lambda(x)` as a product of LDL pivots; used for barrier values.
pub fn lambda_det(ctx: &BarrierContext, x: &[Rational]) -> Result<Rational> {
    let blocks = ctx.op.apply(x)?;
    let mut det = Rational::from_integer(1.into());
    for b in blocks.blocks() {
        det *= ldl_factor(b)?.determinant();
    }
    Ok(det)
}
