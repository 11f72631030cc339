//! Exact verification of dual certificates and recovery of explicit WSOS
//! decompositions from them.

use num_bigint::BigInt;

use crate::barrier::{hessian, lambda_inverse, BarrierContext};
use crate::error::{Error, Result};
use crate::exactarith::{BlockDiagMatrix, Rational, SymMatrix};

/// A dual certificate `x` for `t - c*1`, bound to a cone by its digest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub cone_digest: String,
    pub x: Vec<Rational>,
    pub c: Option<Rational>,
    pub n: Option<BigInt>,
    pub verified: bool,
}

/// Gram matrices `S_1, ..., S_m` with `s = sum_i Lambda_i^*(S_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WsosDecomposition {
    pub gram_blocks: Vec<SymMatrix>,
    pub psd: Vec<bool>,
}

impl WsosDecomposition {
    pub fn new(gram_blocks: Vec<SymMatrix>) -> Self {
        let psd = gram_blocks.iter().map(SymMatrix::is_psd).collect();
        Self { gram_blocks, psd }
    }

    pub fn all_psd(&self) -> bool {
        self.psd.iter().all(|&p| p)
    }

    pub fn as_block_diag(&self) -> BlockDiagMatrix {
        BlockDiagMatrix::new(self.gram_blocks.clone())
    }
}

/// `x` certifies `s` iff `Lambda(H(x)^-1 s)` is PSD.
pub fn is_dual_certificate(ctx: &BarrierContext, x: &[Rational], s: &[Rational]) -> Result<bool> {
    check_len(ctx, s)?;
    let h = hessian(ctx, x)?;
    let y = h.solve(s);
    Ok(ctx.op().apply(&y)?.is_psd())
}

/// `S(x, s) = Lambda(x)^-1 Lambda(H(x)^-1 s) Lambda(x)^-1`, blockwise, with
/// per-block PSD verdicts. `Lambda^*(S) = s` holds for every interior `x`.
pub fn gram_recover(ctx: &BarrierContext, x: &[Rational], s: &[Rational]) -> Result<WsosDecomposition> {
    check_len(ctx, s)?;
    let h = hessian(ctx, x)?;
    let y = h.solve(s);
    let ly = ctx.op().apply(&y)?;
    let blocks = h
        .lambda_inv()
        .blocks()
        .iter()
        .zip(ly.blocks())
        .map(|(inv, mid)| inv.sandwich(mid))
        .collect();
    Ok(WsosDecomposition::new(blocks))
}

/// True iff every block is PSD and `Lambda^*(S) = s` exactly.
pub fn verify_decomposition(ctx: &BarrierContext, dec: &WsosDecomposition, s: &[Rational]) -> bool {
    if s.len() != ctx.u() || !dec.gram_blocks.iter().all(SymMatrix::is_psd) {
        return false;
    }
    match ctx.op().adjoint(&dec.as_block_diag()) {
        Ok(v) => v == s,
        Err(_) => false,
    }
}

/// `Lambda^*(S) - s`, zero for an exact decomposition.
pub fn reconstruction_residual(
    ctx: &BarrierContext,
    dec: &WsosDecomposition,
    s: &[Rational],
) -> Result<Vec<Rational>> {
    check_len(ctx, s)?;
    let v = ctx.op().adjoint(&dec.as_block_diag())?;
    Ok(v.iter().zip(s).map(|(a, b)| a - b).collect())
}

/// `Lambda(x)^-1` as a decomposition, the Gram form of `-g(x)`.
pub fn gradient_gram(ctx: &BarrierContext, x: &[Rational]) -> Result<WsosDecomposition> {
    Ok(WsosDecomposition::new(lambda_inverse(ctx, x)?.into_blocks()))
}

/// `t - c*1`.
pub fn shifted(ctx: &BarrierContext, t: &[Rational], c: &Rational) -> Vec<Rational> {
    t.iter().zip(ctx.one()).map(|(a, b)| a - c * b).collect()
}

fn check_len(ctx: &BarrierContext, s: &[Rational]) -> Result<()> {
    if s.len() != ctx.u() {
        return Err(Error::Dimension(format!(
            "polynomial has {} coefficients, cone has dimension {}",
            s.len(),
            ctx.u()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::neg_gradient;
    use crate::exactarith::{int, rat};
    use crate::polybasis::ConeSpec;

    fn disk() -> BarrierContext {
        BarrierContext::from_spec(&ConeSpec::disk()).unwrap()
    }

    fn t() -> Vec<Rational> {
        [0, 2, 3, -1, -6, 1].map(int).to_vec()
    }

    fn x1() -> Vec<Rational> {
        vec![int(4), int(0), rat(4, 3), int(0), int(0), rat(4, 3)]
    }

    fn sym(rows: Vec<Vec<Rational>>) -> SymMatrix {
        SymMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn x1_certifies_t_plus_39() {
        let ctx = disk();
        let s = shifted(&ctx, &t(), &int(-39));
        assert!(is_dual_certificate(&ctx, &x1(), &s).unwrap());
        let y = hessian(&ctx, &x1()).unwrap().solve(&s);
        assert_eq!(
            y,
            vec![rat(484, 3), rat(16, 3), rat(1532, 27), rat(-8, 3), rat(-16, 3), rat(1436, 27)]
        );
    }

    #[test]
    fn gram_of_t_plus_39() {
        let ctx = disk();
        let s = shifted(&ctx, &t(), &int(-39));
        let dec = gram_recover(&ctx, &x1(), &s).unwrap();
        assert_eq!(
            dec.gram_blocks[0],
            sym(vec![
                vec![rat(121, 12), int(1), rat(-1, 2)],
                vec![int(1), rat(383, 12), int(-3)],
                vec![rat(-1, 2), int(-3), rat(359, 12)],
            ])
        );
        assert_eq!(*dec.gram_blocks[1].get(0, 0), rat(347, 12));
        assert!(dec.all_psd());
        assert!(verify_decomposition(&ctx, &dec, &s));

        let mut tampered = dec.clone();
        let v = tampered.gram_blocks[0].get(0, 1) + int(1);
        tampered.gram_blocks[0].set(0, 1, v);
        assert!(!verify_decomposition(&ctx, &tampered, &s));
    }

    #[test]
    fn gram_of_t_plus_36_at_the_newton_iterate() {
        let ctx = disk();
        let s = shifted(&ctx, &t(), &int(-36));
        let x_plus = vec![
            rat(452, 4563),
            rat(-16, 4563),
            rat(1276, 41067),
            rat(8, 4563),
            rat(16, 4563),
            rat(1372, 41067),
        ];
        let dec = gram_recover(&ctx, &x_plus, &s).unwrap();
        let d = 344769;
        assert_eq!(
            dec.gram_blocks[0],
            sym(vec![
                vec![rat(3203164, d), int(1), rat(-1, 2)],
                vec![int(1), rat(10242827, d), int(-3)],
                vec![rat(-1, 2), int(-3), rat(9553289, d)],
            ])
        );
        assert_eq!(*dec.gram_blocks[1].get(0, 0), rat(9208520, d));
        assert!(verify_decomposition(&ctx, &dec, &s));
    }

    #[test]
    fn gradient_certificate_and_negatives() {
        let ctx = disk();
        let x = vec![int(3), rat(1, 5), int(1), rat(-1, 7), rat(1, 9), int(1)];
        let s = neg_gradient(&ctx, &x).unwrap();
        assert!(is_dual_certificate(&ctx, &x, &s).unwrap());
        let dec = gram_recover(&ctx, &x, &s).unwrap();
        assert_eq!(dec, gradient_gram(&ctx, &x).unwrap());

        let minus_one: Vec<Rational> = ctx.one().iter().map(|v| -v).collect();
        assert!(!is_dual_certificate(&ctx, &x1(), &minus_one).unwrap());

        let zero = WsosDecomposition::new(vec![SymMatrix::zeros(3), SymMatrix::zeros(1)]);
        assert!(verify_decomposition(&ctx, &zero, &vec![int(0); 6]));
    }
}
