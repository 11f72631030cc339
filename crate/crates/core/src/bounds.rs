//! A-priori bounds: the `M` matrices and their condition numbers, the
//! closed-form `k_1` constants, rounding denominators and the bit-size bound
//! for integer certificates.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactarith::{
    from_bigint, int, log2_interval, rat, sqrt_ceil, Rational, RationalInterval, SymMatrix,
};
use crate::polybasis::Basis;

/// Weighted point set defining `M = sum_i alpha_i q(z_i) q(z_i)^T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSpec {
    pub points: Vec<Vec<Rational>>,
    pub alphas: Vec<Rational>,
}

impl MSpec {
    pub fn uniform(points: Vec<Vec<Rational>>) -> Self {
        let alphas = vec![int(1); points.len()];
        Self { points, alphas }
    }
}

pub fn build_m(q: &Basis, spec: &MSpec) -> Result<SymMatrix> {
    if spec.points.len() != spec.alphas.len() {
        return Err(Error::Dimension(format!(
            "{} points but {} weights",
            spec.points.len(),
            spec.alphas.len()
        )));
    }
    if spec.alphas.iter().any(|a| !a.is_positive()) {
        return Err(Error::Domain("point weights must be positive".into()));
    }
    let u = q.dim();
    if spec.points.len() < u {
        return Err(Error::NotUnisolvent(format!(
            "{} points for a space of dimension {u}",
            spec.points.len()
        )));
    }
    let mut m = SymMatrix::zeros(u);
    for (z, alpha) in spec.points.iter().zip(&spec.alphas) {
        if z.len() != q.n() {
            return Err(Error::Dimension(format!("point {z:?} has wrong dimension")));
        }
        let v = q.eval_basis(z);
        m = m.add(&SymMatrix::from_fn(u, |i, j| alpha * &v[i] * &v[j]));
    }
    if !m.is_pd() {
        return Err(Error::NotUnisolvent("M is not positive definite".into()));
    }
    Ok(m)
}

/// `M` for the Chebyshev basis of degree `2d` at the `2d + 1` extrema of
/// `T_{2d}`, unit weights, in closed form.
pub fn chebyshev_extrema_m(d: u32) -> SymMatrix {
    let u = 2 * d as usize + 1;
    let last = u - 1;
    SymMatrix::from_fn(u, |i, j| {
        if i != j {
            if (i + j) % 2 == 0 {
                int(1)
            } else {
                int(0)
            }
        } else if i == 0 || i == last {
            int(2 * d as i64 + 1)
        } else {
            int(d as i64 + 1)
        }
    })
}

pub fn hilbert(n: usize) -> SymMatrix {
    SymMatrix::from_fn(n, |i, j| rat(1, (i + j + 1) as i64))
}

/// Rational upper bound on `cond(M)`: largest absolute row sum over a
/// bisected lower bound on `lambda_min` (relative width at most 1/16).
pub fn cond_upper(m: &SymMatrix) -> Result<Rational> {
    if !m.is_pd() {
        return Err(Error::NotPd);
    }
    Ok(m.max_abs_row_sum() / lambda_min_lower_relative(m, &rat(1, 16)))
}

/// Lower bound `lo` on `lambda_min` of a PD matrix with `hi - lo <= rel * lo`
/// for some `hi >= lambda_min`.
pub fn lambda_min_lower_relative(m: &SymMatrix, rel: &Rational) -> Rational {
    let n = m.order();
    let shifted_psd = |mu: &Rational| m.sub(&SymMatrix::scalar(n, mu.clone())).is_psd();
    let mut hi = (0..n).map(|i| m.get(i, i).clone()).min().expect("nonempty");
    if shifted_psd(&hi) {
        return hi;
    }
    let mut lo = Rational::zero();
    while !(lo.is_positive() && &hi - &lo <= rel * &lo) {
        let mid = (&lo + &hi) / int(2);
        if shifted_psd(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn norm2_sq(t: &[Rational]) -> Rational {
    t.iter().map(|v| v * v).sum()
}

/// `cond(M) * ||t||_2^2`, bounding `||H(y)||_2` at the gradient certificate.
pub fn hessian_norm_bound(cond_m: &Rational, t: &[Rational]) -> Rational {
    cond_m * norm2_sq(t)
}

/// `ceil((3/2) sqrt(U cond(M)) ||t||_2)`.
pub fn denominator_n(u: usize, cond_m: &Rational, t: &[Rational]) -> BigInt {
    denominator_n_from_norm(u, cond_m, &norm2_sq(t))
}

pub fn denominator_n_from_norm(u: usize, cond_m: &Rational, t_norm2_sq: &Rational) -> BigInt {
    let q = rat(9, 4) * int(u as i64) * cond_m * t_norm2_sq;
    sqrt_ceil(&q).expect("nonnegative")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K1Case {
    MonomialLine,
    ChebyshevInterval,
    MonomialInterval,
    Lagrange,
}

impl std::str::FromStr for K1Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monomial-line" => Ok(K1Case::MonomialLine),
            "chebyshev" => Ok(K1Case::ChebyshevInterval),
            "monomial-interval" => Ok(K1Case::MonomialInterval),
            "lagrange" => Ok(K1Case::Lagrange),
            other => Err(Error::Parse(format!("unknown case {other:?}"))),
        }
    }
}

pub fn k1_lower(case: K1Case, mu: Option<&Rational>) -> Result<Rational> {
    match case {
        K1Case::MonomialLine | K1Case::ChebyshevInterval | K1Case::MonomialInterval => Ok(int(1)),
        K1Case::Lagrange => match mu {
            Some(mu) if mu.is_positive() => Ok(mu.recip()),
            Some(mu) => Err(Error::Domain(format!("mu must be positive, got {mu}"))),
            None => Err(Error::MissingParameter("lagrange case needs mu".into())),
        },
    }
}

/// `nu / (k1 * eps)`, bounding `||y||_inf` for the gradient certificate.
pub fn gradient_norm_bound(nu: usize, k1: &Rational, eps: &Rational) -> Rational {
    int(nu as i64) / (k1 * eps)
}

/// `3^floor(d/2) / (2^((2d-1) tau) (d+1)^(2d))`, a lower bound on the
/// minimum over `[-1, 1]` of a positive degree-`d` polynomial with integer
/// coefficients of bit size at most `tau`.
pub fn eps_lower_interval(d: u32, tau: u32) -> Rational {
    let num = num_traits::pow(BigInt::from(3), (d / 2) as usize);
    let two = BigInt::one() << ((2 * d as usize - 1) * tau as usize);
    let den = two * num_traits::pow(BigInt::from(d + 1), 2 * d as usize);
    Rational::new(num, den)
}

/// `N * y_N`, which must be integral.
pub fn integer_certificate(y_n: &[Rational], n: &BigInt) -> Result<Vec<BigInt>> {
    let scale = from_bigint(n.clone());
    y_n.iter()
        .map(|v| {
            let w = v * &scale;
            if w.is_integer() {
                Ok(w.to_integer())
            } else {
                Err(Error::Domain(format!("{v} does not have denominator dividing {n}")))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub u: usize,
    pub nu: usize,
    pub cond_m_upper: Rational,
    pub k1_lower: Rational,
    pub t_norm2_sq: Rational,
    pub epsilon_lower: Option<Rational>,
    pub n: BigInt,
    pub inf_norm_bound: Rational,
    /// Enclosure of `log2(inf_norm_bound)`.
    pub bitsize: RationalInterval,
}

impl BoundReport {
    pub fn bitsize_bound(&self) -> &Rational {
        self.bitsize.hi()
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "U = {}", self.u)?;
        writeln!(f, "nu = {}", self.nu)?;
        writeln!(f, "cond_M_upper = {}", self.cond_m_upper)?;
        writeln!(f, "k1_lower = {}", self.k1_lower)?;
        writeln!(f, "t_norm2_sq = {}", self.t_norm2_sq)?;
        if let Some(eps) = &self.epsilon_lower {
            writeln!(f, "epsilon_lower = {eps}")?;
        }
        writeln!(f, "N = {}", self.n)?;
        writeln!(f, "inf_norm_bound = {}", self.inf_norm_bound)?;
        write!(f, "bitsize_bound = {}", self.bitsize)
    }
}

/// `1/2 + ceil((3/2) sqrt(U cond(M)) ||t||_2) * nu / (k1 eps)`.
pub fn bitsize_bound(
    u: usize,
    cond_m: &Rational,
    t_norm2_sq: &Rational,
    nu: usize,
    k1: &Rational,
    eps: &Rational,
) -> Result<BoundReport> {
    if u == 0 || nu == 0 || !cond_m.is_positive() || !k1.is_positive() || !eps.is_positive() {
        return Err(Error::Domain("bound parameters must be positive".into()));
    }
    if t_norm2_sq.is_negative() {
        return Err(Error::Domain("squared norm is negative".into()));
    }
    let n = denominator_n_from_norm(u, cond_m, t_norm2_sq);
    let inf_norm_bound = rat(1, 2) + from_bigint(n.clone()) * gradient_norm_bound(nu, k1, eps);
    let bitsize = log2_interval(&inf_norm_bound, 20)?;
    Ok(BoundReport {
        u,
        nu,
        cond_m_upper: cond_m.clone(),
        k1_lower: k1.clone(),
        t_norm2_sq: t_norm2_sq.clone(),
        epsilon_lower: Some(eps.clone()),
        n,
        inf_norm_bound,
        bitsize,
    })
}

/// Constants for the univariate cases, with `d` the half-degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseConstants {
    pub u: usize,
    pub nu: usize,
    pub cond_m: Rational,
    pub k1: Rational,
}

pub fn case_constants(case: K1Case, d: u32, mu: Option<&Rational>) -> Result<CaseConstants> {
    let k1 = k1_lower(case, mu)?;
    let (u, nu, cond_m) = match case {
        K1Case::MonomialLine => {
            let u = 2 * d as usize + 1;
            let c = num_traits::pow(rat(321, 100), u) / int(2);
            (u, d as usize + 1, c)
        }
        K1Case::ChebyshevInterval => (2 * d as usize + 2, 2 * d as usize + 2, int(4)),
        K1Case::MonomialInterval => {
            let u = 2 * d as usize + 2;
            (u, u, cond_upper(&hilbert(u))?)
        }
        K1Case::Lagrange => (2 * d as usize + 2, 2 * d as usize + 2, int(1)),
    };
    Ok(CaseConstants { u, nu, cond_m, k1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::to_f64;
    use crate::polybasis::BasisId;

    #[test]
    fn chebyshev_m_from_nodes_matches_closed_form() {
        let q = Basis::new(&BasisId::chebyshev(1, 2)).unwrap();
        let nodes = vec![vec![int(1)], vec![int(0)], vec![int(-1)]];
        let m = build_m(&q, &MSpec::uniform(nodes)).unwrap();
        let expected = SymMatrix::from_rows(vec![
            vec![int(3), int(0), int(1)],
            vec![int(0), int(2), int(0)],
            vec![int(1), int(0), int(3)],
        ])
        .unwrap();
        assert_eq!(m, expected);
        assert_eq!(chebyshev_extrema_m(1), expected);
        for d in 1..=6 {
            assert!(cond_upper(&chebyshev_extrema_m(d)).unwrap() <= int(4));
        }
    }

    #[test]
    fn lagrange_m_is_identity() {
        let nodes: Vec<Vec<Rational>> = [-3, -1, 1, 3].iter().map(|&k| vec![rat(k, 4)]).collect();
        let q = Basis::new(&BasisId::lagrange(1, 3, nodes.clone())).unwrap();
        let m = build_m(&q, &MSpec::uniform(nodes)).unwrap();
        assert_eq!(m, SymMatrix::identity(4));
        assert_eq!(cond_upper(&m).unwrap(), int(1));
    }

    #[test]
    fn duplicated_points_are_rejected() {
        let q = Basis::new(&BasisId::monomial(1, 2)).unwrap();
        let pts = vec![vec![int(0)], vec![int(0)], vec![int(1)]];
        assert!(matches!(build_m(&q, &MSpec::uniform(pts)), Err(Error::NotUnisolvent(_))));
    }

    #[test]
    fn condition_bounds() {
        assert_eq!(cond_upper(&SymMatrix::identity(3)).unwrap(), int(1));
        assert_eq!(cond_upper(&SymMatrix::scalar(4, rat(7, 3))).unwrap(), int(1));
        let c = cond_upper(&hilbert(3)).unwrap();
        assert!(c >= int(524));
        assert!(to_f64(&c) < 524.06 * 1.4);
        assert!(cond_upper(&SymMatrix::zeros(2)).is_err());
    }

    #[test]
    fn denominators() {
        assert_eq!(denominator_n(1, &int(1), &[int(1)]), BigInt::from(2));
        assert_eq!(denominator_n(4, &int(1), &[int(1), int(0), int(0), int(0)]), BigInt::from(3));
        assert_eq!(denominator_n_from_norm(6, &int(4), &int(51)), BigInt::from(53));
    }

    #[test]
    fn hessian_norm_examples() {
        assert_eq!(hessian_norm_bound(&int(1), &[int(0), int(0)]), int(0));
        assert_eq!(hessian_norm_bound(&int(1), &[int(3), int(4)]), int(25));
        let t = [0, 2, 3, -1, -6, 1].map(int);
        assert_eq!(hessian_norm_bound(&int(1), &t), int(51));
    }

    #[test]
    fn k1_and_gradient_bounds() {
        assert_eq!(k1_lower(K1Case::ChebyshevInterval, None).unwrap(), int(1));
        assert_eq!(k1_lower(K1Case::MonomialLine, None).unwrap(), int(1));
        assert_eq!(k1_lower(K1Case::Lagrange, Some(&int(5))).unwrap(), rat(1, 5));
        assert!(matches!(k1_lower(K1Case::Lagrange, None), Err(Error::MissingParameter(_))));
        assert_eq!(gradient_norm_bound(4, &int(1), &int(2)), int(2));
        assert_eq!(gradient_norm_bound(5, &rat(1, 2), &rat(1, 10)), int(100));
    }

    #[test]
    fn eps_lower_examples() {
        assert_eq!(eps_lower_interval(1, 1), rat(1, 8));
        // 1/8 <= 3^(1/2) / (2 * 2^(3/2)), compare squares: 1/64 <= 3/32
        assert!(rat(1, 64) <= rat(3, 32));
        assert_eq!(eps_lower_interval(2, 1), rat(1, 216));
        for d in 1..5 {
            for tau in 1..5 {
                assert!(eps_lower_interval(d, tau + 1) < eps_lower_interval(d, tau));
            }
        }
    }

    #[test]
    fn integer_certificates() {
        let y: Vec<Rational> = [498, 9, 168, -18, 18, 156].iter().map(|&k| rat(k, 5029)).collect();
        let ints = integer_certificate(&y, &BigInt::from(5029)).unwrap();
        let expected: Vec<BigInt> = [498, 9, 168, -18, 18, 156].iter().map(|&k| BigInt::from(k)).collect();
        assert_eq!(ints, expected);
        assert_eq!(
            integer_certificate(&[int(3)], &BigInt::from(1)).unwrap(),
            vec![BigInt::from(3)]
        );
        assert_eq!(
            integer_certificate(&[rat(1, 2), rat(1, 2)], &BigInt::from(2)).unwrap(),
            vec![BigInt::from(1), BigInt::from(1)]
        );
        assert!(integer_certificate(&[rat(1, 3)], &BigInt::from(2)).is_err());
    }

    #[test]
    fn bitsize_examples() {
        let one = int(1);
        let r = bitsize_bound(1, &one, &one, 1, &one, &one).unwrap();
        assert_eq!(r.inf_norm_bound, rat(5, 2));
        assert!(r.bitsize.contains(&r.bitsize.lo().clone()));
        assert!(to_f64(r.bitsize.lo()) <= 2.5f64.log2() && 2.5f64.log2() <= to_f64(r.bitsize.hi()));

        let c = case_constants(K1Case::ChebyshevInterval, 3, None).unwrap();
        let r = bitsize_bound(c.u, &c.cond_m, &int(51), c.nu, &c.k1, &rat(1, 8)).unwrap();
        // 1/2 + (2d+2)/eps * ceil(3 sqrt(2d+2) ||t||)
        let n = sqrt_ceil(&(int(9) * int(8) * int(51))).unwrap();
        assert_eq!(n, BigInt::from(61));
        assert_eq!(r.inf_norm_bound, rat(1, 2) + int(64) * int(61));

        let line = case_constants(K1Case::MonomialLine, 1, None).unwrap();
        assert_eq!(line.cond_m, rat(321 * 321 * 321, 2_000_000));
    }
}
