use std::fmt;

use num_traits::{Signed, Zero};

use super::{int, pow2, Rational};
use crate::error::{Error, Result};

/// Dense symmetric rational matrix; only the upper triangle is stored,
/// packed row by row.
#[derive(Clone, PartialEq, Eq)]
pub struct SymMatrix {
    order: usize,
    upper: Vec<Rational>,
}

#[inline]
fn packed_index(order: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * order - i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            upper: vec![Rational::zero(); order * (order + 1) / 2],
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::scalar(order, int(1))
    }

    pub fn scalar(order: usize, value: Rational) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, value.clone());
        }
        m
    }

    /// Builds from a full square array, rejecting asymmetric input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has length {} in a {n}x{n} matrix",
                    row.len()
                )));
            }
            for j in 0..n {
                if rows[j][i] != row[j] {
                    return Err(Error::Dimension(format!("entry ({i},{j}) is not symmetric")));
                }
                if i <= j {
                    m.set(i, j, row[j].clone());
                }
            }
        }
        Ok(m)
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut upper = Vec::with_capacity(order * (order + 1) / 2);
        for i in 0..order {
            for j in i..order {
                upper.push(f(i, j));
            }
        }
        Self { order, upper }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.upper[packed_index(self.order, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        let k = packed_index(self.order, i, j);
        self.upper[k] = value;
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        Self {
            order: self.order,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.order, other.order);
        Self {
            order: self.order,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, alpha: &Rational) -> Self {
        Self {
            order: self.order,
            upper: self.upper.iter().map(|a| a * alpha).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            order: self.order,
            upper: self.upper.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.order);
        (0..self.order)
            .map(|i| {
                (0..self.order)
                    .filter(|&j| !v[j].is_zero())
                    .map(|j| self.get(i, j) * &v[j])
                    .sum()
            })
            .collect()
    }

    /// `v^T A v`.
    pub fn quad_form(&self, v: &[Rational]) -> Rational {
        dot(v, &self.mul_vec(v))
    }

    /// Frobenius inner product `<A, B> = tr(A B)`.
    pub fn frobenius_dot(&self, other: &Self) -> Rational {
        assert_eq!(self.order, other.order);
        let mut acc = Rational::zero();
        for i in 0..self.order {
            for j in i..self.order {
                let p = self.get(i, j) * other.get(i, j);
                if i == j {
                    acc += p;
                } else {
                    acc += &p + &p;
                }
            }
        }
        acc
    }

    pub fn frobenius_norm_sq(&self) -> Rational {
        self.frobenius_dot(self)
    }

    pub fn trace(&self) -> Rational {
        (0..self.order).map(|i| self.get(i, i).clone()).sum()
    }

    /// `A * B * A` for symmetric `A` and `B`, itself symmetric.
    pub fn sandwich(&self, inner: &Self) -> Self {
        let n = self.order;
        assert_eq!(inner.order, n);
        let full_a = self.to_rows();
        let full_b = inner.to_rows();
        let ab: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &full_a[i][k] * &full_b[k][j]).sum())
                    .collect()
            })
            .collect();
        Self::from_fn(n, |i, j| (0..n).map(|k| &ab[i][k] * &full_a[k][j]).sum())
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn max_abs_row_sum(&self) -> Rational {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j).abs()).sum::<Rational>())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_pd(&self) -> bool {
        matches!(ldl_factor(self), Ok(f) if f.pivots().iter().all(Signed::is_positive))
    }

    /// Exact PSD test by symmetric elimination, pivoting on the largest
    /// remaining diagonal entry.
    pub fn is_psd(&self) -> bool {
        let n = self.order;
        let mut a = self.to_rows();
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            let (pos, &p) = active
                .iter()
                .enumerate()
                .max_by(|x, y| a[*x.1][*x.1].cmp(&a[*y.1][*y.1]))
                .expect("nonempty");
            let pivot = a[p][p].clone();
            if pivot.is_negative() {
                return false;
            }
            if pivot.is_zero() {
                // every remaining diagonal is <= 0, so PSD forces a zero block
                return active
                    .iter()
                    .all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
            }
            active.swap_remove(pos);
            for &i in &active {
                if a[i][p].is_zero() {
                    continue;
                }
                let factor = &a[i][p] / &pivot;
                for &j in &active {
                    if a[p][j].is_zero() {
                        continue;
                    }
                    let delta = &factor * &a[p][j];
                    a[i][j] -= delta;
                }
            }
        }
        true
    }

    /// Solves `A x = b` for positive definite `A`.
    pub fn solve_spd(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let f = ldl_factor(self).map_err(|_| Error::NotPd)?;
        if !f.pivots().iter().all(Signed::is_positive) {
            return Err(Error::NotPd);
        }
        Ok(f.solve(b))
    }

    pub fn inverse_spd(&self) -> Result<Self> {
        let f = ldl_factor(self).map_err(|_| Error::NotPd)?;
        if !f.pivots().iter().all(Signed::is_positive) {
            return Err(Error::NotPd);
        }
        Ok(f.inverse())
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.order {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.order {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// `A = L diag(D) L^T` with unit lower-triangular `L`.
#[derive(Clone, Debug)]
pub struct LdlFactorization {
    lower: Vec<Vec<Rational>>,
    pivots: Vec<Rational>,
}

impl LdlFactorization {
    /// Strictly lower part of `L`, row `i` holding columns `0..i`.
    pub fn lower(&self) -> &[Vec<Rational>] {
        &self.lower
    }

    pub fn pivots(&self) -> &[Rational] {
        &self.pivots
    }

    pub fn l_entry(&self, i: usize, j: usize) -> Rational {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => int(1),
            std::cmp::Ordering::Less => Rational::zero(),
            std::cmp::Ordering::Greater => self.lower[i][j].clone(),
        }
    }

    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.pivots.len();
        SymMatrix::from_fn(n, |i, j| {
            (0..=i.min(j))
                .map(|k| self.l_entry(i, k) * &self.pivots[k] * self.l_entry(j, k))
                .sum()
        })
    }

    /// Requires nonzero pivots.
    pub fn solve(&self, b: &[Rational]) -> Vec<Rational> {
        let n = self.pivots.len();
        assert_eq!(b.len(), n);
        let mut y: Vec<Rational> = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                if !self.lower[i][k].is_zero() && !y[k].is_zero() {
                    let d = &self.lower[i][k] * &y[k];
                    y[i] -= d;
                }
            }
        }
        for i in 0..n {
            y[i] /= &self.pivots[i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                if !self.lower[k][i].is_zero() && !y[k].is_zero() {
                    let d = &self.lower[k][i] * &y[k];
                    y[i] -= d;
                }
            }
        }
        y
    }

    pub fn inverse(&self) -> SymMatrix {
        let n = self.pivots.len();
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|j| {
                let mut e = vec![Rational::zero(); n];
                e[j] = int(1);
                self.solve(&e)
            })
            .collect();
        SymMatrix::from_fn(n, |i, j| cols[j][i].clone())
    }

    pub fn determinant(&self) -> Rational {
        self.pivots.iter().fold(int(1), |acc, p| acc * p)
    }
}

/// LDL^T without pivoting. A zero pivot is tolerated only when the rest of
/// its column in the Schur complement is zero too.
pub fn ldl_factor(a: &SymMatrix) -> Result<LdlFactorization> {
    let n = a.order();
    let mut work = a.to_rows();
    let mut lower: Vec<Vec<Rational>> = (0..n).map(|i| vec![Rational::zero(); i]).collect();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = work[k][k].clone();
        if pivot.is_zero() {
            if (k + 1..n).any(|i| !work[i][k].is_zero()) {
                return Err(Error::NotFactorable);
            }
            pivots.push(pivot);
            continue;
        }
        for i in k + 1..n {
            if work[i][k].is_zero() {
                continue;
            }
            let l = &work[i][k] / &pivot;
            for j in k + 1..=i {
                if work[k][j].is_zero() {
                    continue;
                }
                let delta = &l * &work[k][j];
                work[i][j] -= &delta;
                if i != j {
                    work[j][i] = work[i][j].clone();
                }
            }
            lower[i][k] = l;
        }
        pivots.push(pivot);
    }
    Ok(LdlFactorization { lower, pivots })
}

/// Block-diagonal aggregate of symmetric blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDiagMatrix {
    blocks: Vec<SymMatrix>,
}

impl BlockDiagMatrix {
    pub fn new(blocks: Vec<SymMatrix>) -> Self {
        Self { blocks }
    }

    pub fn zeros(orders: &[usize]) -> Self {
        Self::new(orders.iter().map(|&n| SymMatrix::zeros(n)).collect())
    }

    pub fn identity(orders: &[usize]) -> Self {
        Self::new(orders.iter().map(|&n| SymMatrix::identity(n)).collect())
    }

    pub fn blocks(&self) -> &[SymMatrix] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<SymMatrix> {
        self.blocks
    }

    pub fn orders(&self) -> Vec<usize> {
        self.blocks.iter().map(SymMatrix::order).collect()
    }

    pub fn total_order(&self) -> usize {
        self.blocks.iter().map(SymMatrix::order).sum()
    }

    pub fn frobenius_dot(&self, other: &Self) -> Rational {
        assert_eq!(self.blocks.len(), other.blocks.len());
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.frobenius_dot(b))
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn scale(&self, alpha: &Rational) -> Self {
        Self::new(self.blocks.iter().map(|b| b.scale(alpha)).collect())
    }

    pub fn is_pd(&self) -> bool {
        self.blocks.iter().all(SymMatrix::is_pd)
    }

    pub fn is_psd(&self) -> bool {
        self.blocks.iter().all(SymMatrix::is_psd)
    }
}

/// Rational upper bound on `lambda_max(A)` within `tol` of the true value,
/// by bisection on the PSD test of `mu I - A` (Sylvester inertia).
pub fn lambda_max_upper(a: &SymMatrix, tol: &Rational) -> Rational {
    let (_, hi) = bisect_eigen(a, tol, true);
    hi
}

/// Rational lower bound on `lambda_min(A)` within `tol` of the true value.
pub fn lambda_min_lower(a: &SymMatrix, tol: &Rational) -> Rational {
    let (lo, _) = bisect_eigen(a, tol, false);
    lo
}

// Returns [lo, hi] around the requested extreme eigenvalue. Midpoints are
// snapped to a dyadic grid so bisection keeps small denominators.
fn bisect_eigen(a: &SymMatrix, tol: &Rational, largest: bool) -> (Rational, Rational) {
    let n = a.order();
    let radius = a.max_abs_row_sum();
    let mut lo = -radius.clone();
    let mut hi = radius;
    let mut level: i64 = 0;
    while &(&hi - &lo) > tol {
        level += 1;
        let mid = snap_dyadic(&((&lo + &hi) / int(2)), level + 8);
        if mid <= lo || mid >= hi {
            continue;
        }
        let shifted = if largest {
            // lambda_max <= mid  <=>  mid I - A is PSD
            SymMatrix::scalar(n, mid.clone()).sub(a)
        } else {
            // lambda_min >= mid  <=>  A - mid I is PSD
            a.sub(&SymMatrix::scalar(n, mid.clone()))
        };
        let holds = shifted.is_psd();
        match (largest, holds) {
            (true, true) | (false, false) => hi = mid,
            (true, false) | (false, true) => lo = mid,
        }
    }
    (lo, hi)
}

fn snap_dyadic(q: &Rational, bits: i64) -> Rational {
    let s = q * pow2(bits);
    super::from_bigint(s.floor().to_integer()) * pow2(-bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::rat;

    fn m(rows: &[&[i64]]) -> SymMatrix {
        SymMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn ldl_examples() {
        let f = ldl_factor(&SymMatrix::identity(3)).unwrap();
        assert_eq!(f.pivots(), &[int(1), int(1), int(1)]);

        let a = m(&[&[4, 2], &[2, 2]]);
        let f = ldl_factor(&a).unwrap();
        assert_eq!(f.pivots(), &[int(4), int(1)]);
        assert_eq!(f.l_entry(1, 0), rat(1, 2));
        assert_eq!(f.reconstruct(), a);

        assert!(matches!(
            ldl_factor(&m(&[&[0, 1], &[1, 0]])),
            Err(Error::NotFactorable)
        ));
    }

    #[test]
    fn definiteness_examples() {
        assert!(SymMatrix::identity(2).is_pd());
        assert!(!m(&[&[1, 2], &[2, 1]]).is_pd());
        assert!(SymMatrix::zeros(3).is_psd());
        assert!(m(&[&[1, 1], &[1, 1]]).is_psd());
        assert!(!m(&[&[1, 1], &[1, 1]]).is_pd());
        assert!(!m(&[&[1, 2], &[2, 1]]).is_psd());
        // zero leading pivot with nonzero coupling: indefinite
        assert!(!m(&[&[0, 1], &[1, 5]]).is_psd());
        assert!(m(&[&[0, 0], &[0, 5]]).is_psd());
    }

    #[test]
    fn solve_identity_and_inverse() {
        let b = vec![rat(1, 2), int(-3), int(7)];
        assert_eq!(SymMatrix::identity(3).solve_spd(&b).unwrap(), b);
        let a = m(&[&[4, 2, 0], &[2, 5, 1], &[0, 1, 3]]);
        let inv = a.inverse_spd().unwrap();
        let x = vec![int(1), int(-2), int(3)];
        assert_eq!(inv.mul_vec(&a.mul_vec(&x)), x);
        assert!(matches!(
            m(&[&[1, 2], &[2, 1]]).solve_spd(&[int(1), int(1)]),
            Err(Error::NotPd)
        ));
    }

    #[test]
    fn eigen_bisection_brackets() {
        let a = m(&[&[3, 0, 1], &[0, 2, 0], &[1, 0, 3]]);
        let tol = rat(1, 1000);
        let hi = lambda_max_upper(&a, &tol);
        assert!(hi >= int(4) && hi - int(4) <= tol);
        let lo = lambda_min_lower(&a, &tol);
        assert!(lo <= int(2) && int(2) - lo <= tol);
    }

    #[test]
    fn sandwich_matches_dense_product() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let b = m(&[&[1, -1], &[-1, 4]]);
        let s = a.sandwich(&b);
        // A B A computed by hand
        assert_eq!(s, m(&[&[4, 7], &[7, 31]]));
    }
}
