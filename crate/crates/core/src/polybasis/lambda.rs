use num_traits::Zero;

use super::basis::{chebyshev_mul, product_in, Basis, BasisId, BasisKind, Exponent, Poly};
use crate::error::{Error, Result};
use crate::exactarith::{int, BlockDiagMatrix, Rational, SymMatrix};

/// Coefficient vector of a polynomial in a named basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVec {
    pub basis: BasisId,
    pub coeffs: Vec<Rational>,
}

impl PolyVec {
    pub fn new(basis: BasisId, coeffs: Vec<Rational>) -> Self {
        Self { basis, coeffs }
    }
}

/// Product `p * q` expressed in the `target` basis.
pub fn basis_product_expand(p: &PolyVec, q: &PolyVec, target: &BasisId) -> Result<PolyVec> {
    let bp = Basis::new(&p.basis)?;
    let bq = Basis::new(&q.basis)?;
    let bt = Basis::new(target)?;
    for (v, b) in [(p, &bp), (q, &bq)] {
        if v.coeffs.len() != b.dim() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a basis of dimension {}",
                v.coeffs.len(),
                b.dim()
            )));
        }
    }
    let coeffs = product_in(&bp, &p.coeffs, &bq, &q.coeffs, &bt)?;
    Ok(PolyVec::new(target.clone(), coeffs))
}

/// A weighted-sum-of-squares cone `sum_i w_i * SOS(p_i)`, with every
/// weight given by its coefficients in the `q` basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSpec {
    pub n: usize,
    pub q_basis: BasisId,
    pub weights: Vec<Vec<Rational>>,
    pub degrees: Vec<u32>,
    pub p_bases: Vec<BasisId>,
}

impl ConeSpec {
    /// Validates shapes; missing `p_bases` default to graded-lex monomials
    /// of degree `degrees[i]`.
    pub fn new(
        n: usize,
        q_basis: BasisId,
        weights: Vec<Vec<Rational>>,
        degrees: Vec<u32>,
        p_bases: Option<Vec<BasisId>>,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Parse("a cone needs at least one weight".into()));
        }
        if weights.len() != degrees.len() {
            return Err(Error::Dimension(format!(
                "{} weights but {} degrees",
                weights.len(),
                degrees.len()
            )));
        }
        if q_basis.n != n {
            return Err(Error::Dimension("q basis variable count differs from n".into()));
        }
        let p_bases = match p_bases {
            Some(p) => p,
            None => degrees.iter().map(|&d| BasisId::monomial(n, d)).collect(),
        };
        if p_bases.len() != degrees.len() {
            return Err(Error::Dimension(format!(
                "{} p bases but {} degrees",
                p_bases.len(),
                degrees.len()
            )));
        }
        for (p, &d) in p_bases.iter().zip(&degrees) {
            if p.n != n || p.degree != d {
                return Err(Error::Dimension(format!(
                    "p basis ({}, n={}, degree {}) does not match degree {d}",
                    p.kind, p.n, p.degree
                )));
            }
        }
        let q = Basis::new(&q_basis)?;
        for w in &weights {
            if w.len() != q.dim() {
                return Err(Error::Dimension(format!(
                    "weight has {} coefficients, q basis has dimension {}",
                    w.len(),
                    q.dim()
                )));
            }
        }
        Ok(Self {
            n,
            q_basis,
            weights,
            degrees,
            p_bases,
        })
    }

    /// Nonnegativity on the real line: degree `2d`, single weight 1.
    pub fn line(d: u32) -> Self {
        let q = BasisId::monomial(1, 2 * d);
        let one = Basis::new(&q).expect("monomial basis").one();
        Self::new(1, q, vec![one], vec![d], None).expect("valid line cone")
    }

    /// Nonnegativity on `[-1, 1]` for polynomials of degree `degree` in the
    /// given univariate `q` basis: weights `1, 1 - z^2` for even degree and
    /// `1 + z, 1 - z` for odd degree. The `p` bases use the kind of `q`
    /// (monomial for a Lagrange `q`).
    pub fn interval(q_basis: BasisId) -> Result<Self> {
        if q_basis.n != 1 {
            return Err(Error::Dimension("interval cone is univariate".into()));
        }
        let deg = q_basis.degree;
        if deg == 0 {
            return Err(Error::DegreeOverflow("interval cone needs degree >= 1".into()));
        }
        let q = Basis::new(&q_basis)?;
        let poly = |c: &[i64]| {
            let mut p = Poly::zero();
            for (k, &v) in c.iter().enumerate() {
                p.add_term(vec![k as u32], int(v));
            }
            p
        };
        let (weights, degrees) = if deg % 2 == 0 {
            (vec![poly(&[1]), poly(&[1, 0, -1])], vec![deg / 2, deg / 2 - 1])
        } else {
            (vec![poly(&[1, 1]), poly(&[1, -1])], vec![deg / 2, deg / 2])
        };
        let weights = weights
            .iter()
            .map(|w| q.from_monomial(w))
            .collect::<Result<Vec<_>>>()?;
        let p_kind = match q_basis.kind {
            BasisKind::Chebyshev => BasisKind::Chebyshev,
            _ => BasisKind::Monomial,
        };
        let p_bases = degrees
            .iter()
            .map(|&d| BasisId {
                kind: p_kind,
                ..BasisId::monomial(1, d)
            })
            .collect();
        Self::new(1, q_basis, weights, degrees, Some(p_bases))
    }

    /// The unit disk in the plane, quadratics, with the ordering
    /// `1, z1, z1^2, z2, z1 z2, z2^2` and weights `1, 1 - z1^2 - z2^2`.
    pub fn disk() -> Self {
        let q = BasisId::monomial(2, 2).with_exponents(vec![
            vec![0, 0],
            vec![1, 0],
            vec![2, 0],
            vec![0, 1],
            vec![1, 1],
            vec![0, 2],
        ]);
        let w1 = [1, 0, 0, 0, 0, 0].map(int).to_vec();
        let w2 = [1, 0, -1, 0, 0, -1].map(int).to_vec();
        Self::new(2, q, vec![w1, w2], vec![1, 0], None).expect("valid disk cone")
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }
}

/// The linear maps `Lambda_i : R^U -> S^{L_i}` with `Lambda_i(q) = w_i p_i p_i^T`,
/// stored sparsely.
#[derive(Clone, Debug)]
pub struct LambdaOp {
    u: usize,
    orders: Vec<usize>,
    // per block, per packed upper-triangle entry: sparse functional on R^U
    entries: Vec<Vec<Vec<(usize, Rational)>>>,
    // per coordinate u: the nonzero entries (block, j, k, coeff) of Lambda(e_u), j <= k
    columns: Vec<Vec<(usize, usize, usize, Rational)>>,
    one: Vec<Rational>,
}

pub fn build_lambda(spec: &ConeSpec) -> Result<LambdaOp> {
    let q = Basis::new(&spec.q_basis)?;
    let u = q.dim();
    let mut orders = Vec::with_capacity(spec.m());
    let mut entries = Vec::with_capacity(spec.m());
    for (w, p_id) in spec.weights.iter().zip(&spec.p_bases) {
        let p = Basis::new(p_id)?;
        let l = p.dim();
        let mut block = Vec::with_capacity(l * (l + 1) / 2);
        match q.kind() {
            BasisKind::Lagrange => {
                let pv: Vec<Vec<Rational>> = q.nodes().iter().map(|z| p.eval_basis(z)).collect();
                check_lagrange_degree(&q, w, &p)?;
                for j in 0..l {
                    for k in j..l {
                        let f = (0..u)
                            .map(|node| (node, &w[node] * &pv[node][j] * &pv[node][k]))
                            .filter(|(_, c)| !c.is_zero())
                            .collect();
                        block.push(f);
                    }
                }
            }
            BasisKind::Chebyshev if p.kind() == BasisKind::Chebyshev => {
                let wt = q.chebyshev_terms(w);
                for j in 0..l {
                    for k in j..l {
                        let pj = unit_terms(p.exponents()[j].clone());
                        let pk = unit_terms(p.exponents()[k].clone());
                        let prod = chebyshev_mul(&wt, &chebyshev_mul(&pj, &pk));
                        block.push(sparse(q.place(&prod)?));
                    }
                }
            }
            _ => {
                let wm = q.to_monomial(w);
                let elems: Vec<Poly> = (0..l).map(|j| p.element(j)).collect();
                for j in 0..l {
                    let wj = wm.mul(&elems[j]);
                    for k in j..l {
                        block.push(sparse(q.from_monomial(&wj.mul(&elems[k]))?));
                    }
                }
            }
        }
        orders.push(l);
        entries.push(block);
    }
    let mut columns = vec![Vec::new(); u];
    for (b, block) in entries.iter().enumerate() {
        let l = orders[b];
        let mut idx = 0;
        for j in 0..l {
            for k in j..l {
                for (col, c) in &block[idx] {
                    columns[*col].push((b, j, k, c.clone()));
                }
                idx += 1;
            }
        }
    }
    Ok(LambdaOp {
        u,
        orders,
        entries,
        columns,
        one: q.one(),
    })
}

fn check_lagrange_degree(q: &Basis, w: &[Rational], p: &Basis) -> Result<()> {
    let wdeg = q.to_monomial(w).degree();
    let total = wdeg + 2 * p.id().degree;
    if total > q.id().degree {
        return Err(Error::DegreeOverflow(format!(
            "weight degree {wdeg} plus 2*{} exceeds {}",
            p.id().degree,
            q.id().degree
        )));
    }
    Ok(())
}

fn unit_terms(e: Exponent) -> std::collections::BTreeMap<Exponent, Rational> {
    std::iter::once((e, int(1))).collect()
}

fn sparse(v: Vec<Rational>) -> Vec<(usize, Rational)> {
    v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
}

impl LambdaOp {
    pub fn u(&self) -> usize {
        self.u
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn m(&self) -> usize {
        self.orders.len()
    }

    /// Barrier parameter `nu = sum L_i`.
    pub fn nu(&self) -> usize {
        self.orders.iter().sum()
    }

    /// Coefficients of the constant polynomial 1 in the `q` basis.
    pub fn one(&self) -> &[Rational] {
        &self.one
    }

    /// Nonzero entries `(block, j, k, coeff)`, `j <= k`, of `Lambda(e_u)`.
    pub fn column(&self, u: usize) -> &[(usize, usize, usize, Rational)] {
        &self.columns[u]
    }

    pub fn apply(&self, x: &[Rational]) -> Result<BlockDiagMatrix> {
        if x.len() != self.u {
            return Err(Error::Dimension(format!(
                "vector of length {}, expected {}",
                x.len(),
                self.u
            )));
        }
        let blocks = self
            .entries
            .iter()
            .zip(&self.orders)
            .map(|(block, &l)| {
                let mut it = block.iter();
                SymMatrix::from_fn(l, |_, _| {
                    it.next()
                        .expect("packed entry")
                        .iter()
                        .filter(|(col, _)| !x[*col].is_zero())
                        .map(|(col, c)| c * &x[*col])
                        .sum()
                })
            })
            .collect();
        Ok(BlockDiagMatrix::new(blocks))
    }

    /// The adjoint `Lambda^*(S) = sum_i Lambda_i^*(S_i)`.
    pub fn adjoint(&self, s: &BlockDiagMatrix) -> Result<Vec<Rational>> {
        if s.orders() != self.orders {
            return Err(Error::Dimension(format!(
                "block orders {:?}, expected {:?}",
                s.orders(),
                self.orders
            )));
        }
        let mut out = vec![Rational::zero(); self.u];
        for (u, col) in self.columns.iter().enumerate() {
            let mut acc = Rational::zero();
            for (b, j, k, c) in col {
                let v = s.blocks()[*b].get(*j, *k);
                if v.is_zero() {
                    continue;
                }
                let term = c * v;
                if j == k {
                    acc += term;
                } else {
                    acc += &term + &term;
                }
            }
            out[u] = acc;
        }
        Ok(out)
    }

    /// `Lambda(e_u)` as dense blocks.
    pub fn unit_image(&self, u: usize) -> BlockDiagMatrix {
        let mut blocks: Vec<SymMatrix> = self.orders.iter().map(|&l| SymMatrix::zeros(l)).collect();
        for (b, j, k, c) in &self.columns[u] {
            blocks[*b].set(*j, *k, c.clone());
        }
        BlockDiagMatrix::new(blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::rat;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&a| int(a)).collect()
    }

    fn sym(rows: &[&[Rational]]) -> SymMatrix {
        SymMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn product_examples() {
        let mono2 = BasisId::monomial(1, 2);
        let mono1 = BasisId::monomial(1, 1);
        let a = PolyVec::new(mono1.clone(), ints(&[1, 1]));
        let b = PolyVec::new(mono1.clone(), ints(&[1, -1]));
        assert_eq!(basis_product_expand(&a, &b, &mono2).unwrap().coeffs, ints(&[1, 0, -1]));

        let z = PolyVec::new(mono1, ints(&[0, 1]));
        let mono4 = BasisId::monomial(1, 4);
        assert_eq!(basis_product_expand(&z, &z, &mono4).unwrap().coeffs, ints(&[0, 0, 1, 0, 0]));

        let cheb1 = BasisId::chebyshev(1, 1);
        let t1 = PolyVec::new(cheb1, ints(&[0, 1]));
        let prod = basis_product_expand(&t1, &t1, &BasisId::chebyshev(1, 2)).unwrap();
        assert_eq!(prod.coeffs, vec![rat(1, 2), int(0), rat(1, 2)]);
        let cb = Basis::new(&prod.basis).unwrap();
        for k in -2..=2 {
            let z = vec![rat(k, 3)];
            assert_eq!(cb.eval(&prod.coeffs, &z), &z[0] * &z[0]);
        }

        assert!(matches!(
            basis_product_expand(&z, &z, &BasisId::monomial(1, 1)),
            Err(Error::DegreeOverflow(_))
        ));
    }

    #[test]
    fn interval_degree_four_matches_moment_matrices() {
        let spec = ConeSpec::interval(BasisId::monomial(1, 4)).unwrap();
        let op = build_lambda(&spec).unwrap();
        assert_eq!(op.orders(), &[3, 2]);
        let x: Vec<Rational> = (0..5).map(|k| int(10 + k * k)).collect();
        let blocks = op.apply(&x).unwrap();
        let hankel = SymMatrix::from_fn(3, |i, j| x[i + j].clone());
        assert_eq!(blocks.blocks()[0], hankel);
        let loc = sym(&[
            &[&x[0] - &x[2], &x[1] - &x[3]],
            &[&x[1] - &x[3], &x[2] - &x[4]],
        ]);
        assert_eq!(blocks.blocks()[1], loc);
    }

    #[test]
    fn disk_matches_example_blocks() {
        let op = build_lambda(&ConeSpec::disk()).unwrap();
        assert_eq!(op.orders(), &[3, 1]);
        assert_eq!(op.nu(), 4);
        let x: Vec<Rational> = (1..=6).map(|k| int(k * k)).collect();
        let blocks = op.apply(&x).unwrap();
        let expected = sym(&[
            &[x[0].clone(), x[1].clone(), x[3].clone()],
            &[x[1].clone(), x[2].clone(), x[4].clone()],
            &[x[3].clone(), x[4].clone(), x[5].clone()],
        ]);
        assert_eq!(blocks.blocks()[0], expected);
        assert_eq!(*blocks.blocks()[1].get(0, 0), &x[0] - &x[2] - &x[5]);

        let x1 = vec![int(4), int(0), rat(4, 3), int(0), int(0), rat(4, 3)];
        let b = op.apply(&x1).unwrap();
        assert_eq!(
            b.blocks()[0],
            sym(&[
                &[int(4), int(0), int(0)],
                &[int(0), rat(4, 3), int(0)],
                &[int(0), int(0), rat(4, 3)],
            ])
        );
        assert_eq!(*b.blocks()[1].get(0, 0), rat(4, 3));
        assert!(op.apply(&vec![int(0); 6]).unwrap().blocks().iter().all(SymMatrix::is_zero));
    }

    #[test]
    fn adjoint_of_identity_on_line_is_sum_of_squares() {
        let op = build_lambda(&ConeSpec::line(1)).unwrap();
        let s = BlockDiagMatrix::identity(op.orders());
        assert_eq!(op.adjoint(&s).unwrap(), ints(&[1, 0, 1]));
        let zero = BlockDiagMatrix::zeros(op.orders());
        assert_eq!(op.adjoint(&zero).unwrap(), ints(&[0, 0, 0]));
    }

    #[test]
    fn unit_vector_of_constant_term() {
        let op = build_lambda(&ConeSpec::line(2)).unwrap();
        let first = op.unit_image(0);
        // only p_0 * p_0 = 1 has a constant term
        let mut expected = SymMatrix::zeros(3);
        expected.set(0, 0, int(1));
        assert_eq!(first.blocks()[0], expected);
    }

    #[test]
    fn lambda_is_basis_independent_up_to_change_of_coordinates() {
        // the three univariate bases describe the same cone; evaluate the
        // Gram form s = Lambda^*(S) and compare polynomial values
        let nodes: Vec<Vec<Rational>> = [-4, -2, 0, 1, 3].iter().map(|&k| vec![rat(k, 4)]).collect();
        let ids = [
            BasisId::monomial(1, 4),
            BasisId::chebyshev(1, 4),
            BasisId::lagrange(1, 4, nodes),
        ];
        let s_blocks = BlockDiagMatrix::new(vec![
            sym(&[
                &[int(2), int(1), int(0)],
                &[int(1), int(3), int(-1)],
                &[int(0), int(-1), int(1)],
            ]),
            sym(&[&[int(1), int(0)], &[int(0), int(2)]]),
        ]);
        let mut values = Vec::new();
        for id in &ids {
            let spec = ConeSpec::interval(id.clone()).unwrap();
            let op = build_lambda(&spec).unwrap();
            let s = op.adjoint(&s_blocks).unwrap();
            let q = Basis::new(id).unwrap();
            let vals: Vec<Rational> = (-3..=3).map(|k| q.eval(&s, &[rat(k, 5)])).collect();
            values.push(vals);
        }
        // monomial and Lagrange share monomial p bases, so their s agree
        assert_eq!(values[0], values[2]);
    }
}
