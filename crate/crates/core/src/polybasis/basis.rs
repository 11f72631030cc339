use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactarith::{int, pow2, Rational};

pub type Exponent = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Monomial,
    Chebyshev,
    Lagrange,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Monomial => "monomial",
            BasisKind::Chebyshev => "chebyshev",
            BasisKind::Lagrange => "lagrange",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monomial" => Ok(BasisKind::Monomial),
            "chebyshev" => Ok(BasisKind::Chebyshev),
            "lagrange" => Ok(BasisKind::Lagrange),
            other => Err(Error::Parse(format!("unknown basis kind {other:?}"))),
        }
    }
}

/// Identifies an ordered polynomial basis.
///
/// Monomial and Chebyshev bases are indexed by exponent tuples, in
/// graded-lex order unless `exponents` lists them explicitly. A Lagrange
/// basis spans the same monomial space and is fixed by its `nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisId {
    pub kind: BasisKind,
    pub n: usize,
    pub degree: u32,
    pub nodes: Option<Vec<Vec<Rational>>>,
    pub exponents: Option<Vec<Exponent>>,
}

impl BasisId {
    pub fn monomial(n: usize, degree: u32) -> Self {
        Self {
            kind: BasisKind::Monomial,
            n,
            degree,
            nodes: None,
            exponents: None,
        }
    }

    pub fn chebyshev(n: usize, degree: u32) -> Self {
        Self {
            kind: BasisKind::Chebyshev,
            ..Self::monomial(n, degree)
        }
    }

    pub fn lagrange(n: usize, degree: u32, nodes: Vec<Vec<Rational>>) -> Self {
        Self {
            kind: BasisKind::Lagrange,
            nodes: Some(nodes),
            ..Self::monomial(n, degree)
        }
    }

    pub fn with_exponents(mut self, exponents: Vec<Exponent>) -> Self {
        self.exponents = Some(exponents);
        self
    }
}

/// All exponent tuples of total degree at most `degree` in `n` variables,
/// graded by degree and lexicographically descending within a degree
/// (`1, z1, z2, z1^2, z1 z2, z2^2, ...`).
pub fn graded_lex(n: usize, degree: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for total in 0..=degree {
        let mut current = vec![0u32; n];
        push_with_total(&mut out, &mut current, 0, total);
    }
    out
}

fn push_with_total(out: &mut Vec<Exponent>, current: &mut Exponent, pos: usize, left: u32) {
    let n = current.len();
    if n == 0 {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = left;
        out.push(current.clone());
        return;
    }
    for e in (0..=left).rev() {
        current[pos] = e;
        push_with_total(out, current, pos + 1, left - e);
    }
    current[pos] = 0;
}

/// Sparse polynomial in monomial form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Exponent, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![0; n], c);
        p
    }

    pub fn monomial(e: Exponent, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, alpha: &Rational) -> Self {
        if alpha.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * alpha)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| c * monomial_value(e, z))
            .sum()
    }
}

pub(crate) fn monomial_value(e: &[u32], z: &[Rational]) -> Rational {
    e.iter()
        .zip(z)
        .fold(Rational::one(), |acc, (&k, zi)| acc * num_traits::pow(zi.clone(), k as usize))
}

/// Coefficients of `T_0..=T_max` in the monomial basis; row `k` holds the
/// coefficient of `z^m` at index `m`.
pub fn chebyshev_table(max: u32) -> Vec<Vec<Rational>> {
    let max = max as usize;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(max + 1);
    t.push(vec![int(1)]);
    if max >= 1 {
        t.push(vec![int(0), int(1)]);
    }
    for k in 2..=max {
        let mut row = vec![Rational::zero(); k + 1];
        for (m, c) in t[k - 1].iter().enumerate() {
            row[m + 1] += c * int(2);
        }
        for (m, c) in t[k - 2].iter().enumerate() {
            row[m] -= c;
        }
        t.push(row);
    }
    t
}

fn binomial_row(k: u32) -> Vec<Rational> {
    let mut row = vec![int(1)];
    for j in 0..k as i64 {
        let next = row.last().unwrap() * Rational::new((k as i64 - j).into(), (j + 1).into());
        row.push(next);
    }
    row
}

/// `z^k = 2^-k sum_j C(k,j) T_|k-2j|`, as Chebyshev coefficients.
fn power_in_chebyshev(k: u32) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); k as usize + 1];
    let scale = pow2(-(k as i64));
    for (j, b) in binomial_row(k).into_iter().enumerate() {
        let idx = (k as i64 - 2 * j as i64).unsigned_abs() as usize;
        out[idx] += b * &scale;
    }
    out
}

/// Product of two Chebyshev expansions keyed by multi-index, using
/// `T_a T_b = (T_{a+b} + T_{|a-b|}) / 2` coordinatewise.
pub fn chebyshev_mul(
    a: &BTreeMap<Exponent, Rational>,
    b: &BTreeMap<Exponent, Rational>,
) -> BTreeMap<Exponent, Rational> {
    let mut out: BTreeMap<Exponent, Rational> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let mut partial: Vec<(Exponent, Rational)> = vec![(Vec::new(), ca * cb)];
            for (&x, &y) in ea.iter().zip(eb) {
                let mut next = Vec::with_capacity(partial.len() * 2);
                for (e, c) in partial {
                    let half = c / int(2);
                    let mut hi = e.clone();
                    hi.push(x + y);
                    next.push((hi, half.clone()));
                    let mut lo = e;
                    lo.push(x.abs_diff(y));
                    next.push((lo, half));
                }
                partial = next;
            }
            for (e, c) in partial {
                *out.entry(e).or_insert_with(Rational::zero) += c;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A validated, ready-to-use basis.
#[derive(Clone, Debug)]
pub struct Basis {
    id: BasisId,
    exps: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
    // Lagrange only: nodes and the basis elements in monomial form
    nodes: Vec<Vec<Rational>>,
    elements: Vec<Poly>,
}

impl Basis {
    pub fn new(id: &BasisId) -> Result<Self> {
        let exps = match &id.exponents {
            Some(list) => {
                for e in list {
                    if e.len() != id.n {
                        return Err(Error::Dimension(format!(
                            "exponent {e:?} has {} entries, expected {}",
                            e.len(),
                            id.n
                        )));
                    }
                    if e.iter().sum::<u32>() > id.degree {
                        return Err(Error::DegreeOverflow(format!(
                            "exponent {e:?} exceeds degree {}",
                            id.degree
                        )));
                    }
                }
                list.clone()
            }
            None => graded_lex(id.n, id.degree),
        };
        let mut index = HashMap::with_capacity(exps.len());
        for (i, e) in exps.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Parse(format!("repeated exponent {e:?}")));
            }
        }
        let mut basis = Self {
            id: id.clone(),
            exps,
            index,
            nodes: Vec::new(),
            elements: Vec::new(),
        };
        match id.kind {
            BasisKind::Lagrange => basis.init_lagrange()?,
            _ => {
                if id.nodes.is_some() {
                    return Err(Error::Parse(format!("{} basis takes no nodes", id.kind)));
                }
            }
        }
        Ok(basis)
    }

    fn init_lagrange(&mut self) -> Result<()> {
        let nodes = self
            .id
            .nodes
            .clone()
            .ok_or_else(|| Error::MissingParameter("lagrange basis needs nodes".into()))?;
        let u = self.exps.len();
        if nodes.len() != u {
            return Err(Error::NotUnisolvent(format!(
                "{} nodes for a space of dimension {u}",
                nodes.len()
            )));
        }
        for z in &nodes {
            if z.len() != self.id.n {
                return Err(Error::Dimension(format!(
                    "node with {} coordinates, expected {}",
                    z.len(),
                    self.id.n
                )));
            }
        }
        let vandermonde: Vec<Vec<Rational>> = nodes
            .iter()
            .map(|z| self.exps.iter().map(|e| monomial_value(e, z)).collect())
            .collect();
        let inv = invert_general(&vandermonde)
            .ok_or_else(|| Error::NotUnisolvent("singular interpolation system".into()))?;
        self.elements = (0..u)
            .map(|k| {
                let mut p = Poly::zero();
                for (b, e) in self.exps.iter().enumerate() {
                    p.add_term(e.clone(), inv[b][k].clone());
                }
                p
            })
            .collect();
        self.nodes = nodes;
        Ok(())
    }

    pub fn id(&self) -> &BasisId {
        &self.id
    }

    pub fn kind(&self) -> BasisKind {
        self.id.kind
    }

    pub fn n(&self) -> usize {
        self.id.n
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exps
    }

    pub fn nodes(&self) -> &[Vec<Rational>] {
        &self.nodes
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// The vector `q(z)` of all basis polynomials evaluated at `z`.
    pub fn eval_basis(&self, z: &[Rational]) -> Vec<Rational> {
        assert_eq!(z.len(), self.n());
        match self.kind() {
            BasisKind::Monomial => self.exps.iter().map(|e| monomial_value(e, z)).collect(),
            BasisKind::Chebyshev => {
                let values: Vec<Vec<Rational>> = z
                    .iter()
                    .map(|zi| chebyshev_values(zi, self.id.degree))
                    .collect();
                self.exps
                    .iter()
                    .map(|e| {
                        e.iter()
                            .enumerate()
                            .fold(Rational::one(), |acc, (i, &k)| acc * &values[i][k as usize])
                    })
                    .collect()
            }
            BasisKind::Lagrange => self.elements.iter().map(|p| p.eval(z)).collect(),
        }
    }

    pub fn eval(&self, coeffs: &[Rational], z: &[Rational]) -> Rational {
        self.eval_basis(z)
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| b * c)
            .sum()
    }

    /// Coefficients of the constant polynomial 1.
    pub fn one(&self) -> Vec<Rational> {
        match self.kind() {
            BasisKind::Lagrange => vec![int(1); self.dim()],
            _ => {
                let mut v = vec![Rational::zero(); self.dim()];
                if let Some(i) = self.index_of(&vec![0; self.n()]) {
                    v[i] = int(1);
                }
                v
            }
        }
    }

    /// Basis element `j` in monomial form.
    pub fn element(&self, j: usize) -> Poly {
        match self.kind() {
            BasisKind::Monomial => Poly::monomial(self.exps[j].clone(), int(1)),
            BasisKind::Chebyshev => {
                let table = chebyshev_table(self.id.degree);
                let mut p = Poly::constant(self.n(), int(1));
                for (i, &k) in self.exps[j].iter().enumerate() {
                    let mut factor = Poly::zero();
                    for (m, c) in table[k as usize].iter().enumerate() {
                        let mut e = vec![0; self.n()];
                        e[i] = m as u32;
                        factor.add_term(e, c.clone());
                    }
                    p = p.mul(&factor);
                }
                p
            }
            BasisKind::Lagrange => self.elements[j].clone(),
        }
    }

    pub fn to_monomial(&self, coeffs: &[Rational]) -> Poly {
        assert_eq!(coeffs.len(), self.dim());
        if self.kind() == BasisKind::Monomial {
            let mut p = Poly::zero();
            for (e, c) in self.exps.iter().zip(coeffs) {
                p.add_term(e.clone(), c.clone());
            }
            return p;
        }
        let mut p = Poly::zero();
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p = p.add(&self.element(j).scale(c));
            }
        }
        p
    }

    /// Coefficients of a monomial-form polynomial in this basis; fails when
    /// the polynomial lies outside the span.
    pub fn from_monomial(&self, p: &Poly) -> Result<Vec<Rational>> {
        match self.kind() {
            BasisKind::Monomial => {
                let mut v = vec![Rational::zero(); self.dim()];
                for (e, c) in p.terms() {
                    let i = self.require_index(e)?;
                    v[i] = c.clone();
                }
                Ok(v)
            }
            BasisKind::Chebyshev => {
                let mut cheb: BTreeMap<Exponent, Rational> = BTreeMap::new();
                for (e, c) in p.terms() {
                    let mut partial: Vec<(Exponent, Rational)> = vec![(Vec::new(), c.clone())];
                    for &k in e {
                        let row = power_in_chebyshev(k);
                        let mut next = Vec::new();
                        for (pe, pc) in &partial {
                            for (m, rc) in row.iter().enumerate() {
                                if rc.is_zero() {
                                    continue;
                                }
                                let mut ne = pe.clone();
                                ne.push(m as u32);
                                next.push((ne, pc * rc));
                            }
                        }
                        partial = next;
                    }
                    for (ce, cc) in partial {
                        *cheb.entry(ce).or_insert_with(Rational::zero) += cc;
                    }
                }
                self.place(&cheb)
            }
            BasisKind::Lagrange => {
                for (e, _) in p.terms() {
                    self.require_index(e)?;
                }
                Ok(self.nodes.iter().map(|z| p.eval(z)).collect())
            }
        }
    }

    fn require_index(&self, e: &[u32]) -> Result<usize> {
        self.index_of(e).ok_or_else(|| {
            Error::DegreeOverflow(format!("term with exponent {e:?} is outside the {} basis", self.kind()))
        })
    }

    pub(crate) fn place(&self, terms: &BTreeMap<Exponent, Rational>) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            v[self.require_index(e)?] = c.clone();
        }
        Ok(v)
    }

    pub(crate) fn chebyshev_terms(&self, coeffs: &[Rational]) -> BTreeMap<Exponent, Rational> {
        self.exps
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect()
    }
}

fn chebyshev_values(z: &Rational, max: u32) -> Vec<Rational> {
    let mut v = vec![int(1)];
    if max >= 1 {
        v.push(z.clone());
    }
    for k in 2..=max as usize {
        let next = int(2) * z * &v[k - 1] - &v[k - 2];
        v.push(next);
    }
    v
}

/// Expands the product of `a` (in basis `ba`) and `b` (in basis `bb`) in
/// the `target` basis.
pub fn product_in(
    ba: &Basis,
    a: &[Rational],
    bb: &Basis,
    b: &[Rational],
    target: &Basis,
) -> Result<Vec<Rational>> {
    if ba.n() != target.n() || bb.n() != target.n() {
        return Err(Error::Dimension("bases over different variable counts".into()));
    }
    let all_cheb = [ba.kind(), bb.kind(), target.kind()]
        .iter()
        .all(|k| *k == BasisKind::Chebyshev);
    if all_cheb {
        let prod = chebyshev_mul(&ba.chebyshev_terms(a), &bb.chebyshev_terms(b));
        return target.place(&prod);
    }
    if target.kind() == BasisKind::Lagrange {
        let pa = ba.to_monomial(a);
        let pb = bb.to_monomial(b);
        if pa.degree() + pb.degree() > target.id().degree {
            return Err(Error::DegreeOverflow(format!(
                "product degree {} exceeds target degree {}",
                pa.degree() + pb.degree(),
                target.id().degree
            )));
        }
        return Ok(target
            .nodes()
            .iter()
            .map(|z| ba.eval(a, z) * bb.eval(b, z))
            .collect());
    }
    target.from_monomial(&ba.to_monomial(a).mul(&bb.to_monomial(b)))
}

/// Inverse of a square matrix by Gauss-Jordan elimination; `None` if
/// singular.
pub(crate) fn invert_general(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { int(1) } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let pivot = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::rat;

    #[test]
    fn graded_lex_order() {
        assert_eq!(
            graded_lex(2, 2),
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(graded_lex(1, 3), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(graded_lex(3, 2).len(), 10);
    }

    #[test]
    fn chebyshev_table_low_degrees() {
        let t = chebyshev_table(4);
        assert_eq!(t[2], vec![int(-1), int(0), int(2)]);
        assert_eq!(t[3], vec![int(0), int(-3), int(0), int(4)]);
        assert_eq!(t[4], vec![int(1), int(0), int(-8), int(0), int(8)]);
    }

    #[test]
    fn lagrange_elements_are_cardinal() {
        let nodes = vec![vec![int(-1)], vec![int(0)], vec![rat(1, 2)]];
        let b = Basis::new(&BasisId::lagrange(1, 2, nodes.clone())).unwrap();
        for (i, z) in nodes.iter().enumerate() {
            let v = b.eval_basis(z);
            for (j, vj) in v.iter().enumerate() {
                assert_eq!(*vj, if i == j { int(1) } else { int(0) });
            }
        }
        let dup = vec![vec![int(0)], vec![int(0)], vec![int(1)]];
        assert!(matches!(
            Basis::new(&BasisId::lagrange(1, 2, dup)),
            Err(Error::NotUnisolvent(_))
        ));
    }

    #[test]
    fn from_monomial_rejects_out_of_span() {
        let b = Basis::new(&BasisId::monomial(1, 2)).unwrap();
        let p = Poly::monomial(vec![3], int(1));
        assert!(matches!(b.from_monomial(&p), Err(Error::DegreeOverflow(_))));
    }
}
