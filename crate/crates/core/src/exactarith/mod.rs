//! Exact rational scalars and the handful of irrational-value helpers the
//! certificate pipeline needs (square roots and logarithms), always as
//! rational enclosures.

mod matrix;

pub use matrix::{
    ldl_factor, lambda_max_upper, lambda_min_lower, BlockDiagMatrix, LdlFactorization,
    SymMatrix,
};

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator. Displays as `n` or `n/d`.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"n"`, `"-n"` or `"n/d"` into a canonical rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `2^k` as a rational, for any sign of `k`.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        from_bigint(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Number of bits needed for the larger of numerator and denominator.
pub fn bit_size(q: &Rational) -> u64 {
    q.numer().bits().max(q.denom().bits())
}

/// Closed rational interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    lo: Rational,
    hi: Rational,
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyInterval(format!("[{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(q: Rational) -> Self {
        Self {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    Integer::div_ceil(n, d)
}

/// Smallest integer `n` with `n >= sqrt(q)`.
pub fn sqrt_ceil(q: &Rational) -> Result<BigInt> {
    if q.is_negative() {
        return Err(Error::Domain(format!("sqrt of negative {q}")));
    }
    // n >= sqrt(q)  <=>  n^2 >= ceil(q)
    let m = ceil_div(q.numer(), q.denom());
    let s = m.sqrt();
    Ok(if &s * &s >= m { s } else { s + 1 })
}

/// Largest integer `n` with `n <= sqrt(q)`.
pub fn sqrt_floor(q: &Rational) -> Result<BigInt> {
    if q.is_negative() {
        return Err(Error::Domain(format!("sqrt of negative {q}")));
    }
    Ok(q.numer().div_floor(q.denom()).sqrt())
}

/// Dyadic enclosure of `sqrt(q)` of width at most `2^-bits`; exact when the
/// square root is itself a dyadic rational at that precision.
pub fn sqrt_interval(q: &Rational, bits: u32) -> Result<RationalInterval> {
    if q.is_negative() {
        return Err(Error::Domain(format!("sqrt of negative {q}")));
    }
    if bits == 0 {
        return Err(Error::Domain("sqrt_interval needs bits >= 1".into()));
    }
    let scaled = q * from_bigint(BigInt::one() << (2 * bits as usize));
    let floor = scaled.numer().div_floor(scaled.denom());
    let s = floor.sqrt();
    let scale = pow2(-(bits as i64));
    let lo = from_bigint(s.clone()) * &scale;
    let exact = scaled.is_integer() && &s * &s == floor;
    let hi = if exact {
        lo.clone()
    } else {
        from_bigint(s + 1) * &scale
    };
    RationalInterval::new(lo, hi)
}

/// Smallest `n` with `n^4 >= q`, i.e. `ceil(q^(1/4))`.
pub fn fourth_root_ceil(q: &Rational) -> Result<BigInt> {
    // n^4 >= q  <=>  n^2 >= ceil(sqrt(q))
    let s = sqrt_ceil(q)?;
    sqrt_ceil(&from_bigint(s))
}

/// The rational of smallest denominator in `[lo, hi]`. When several share
/// that denominator the largest one is returned.
pub fn min_denominator_rational(interval: &RationalInterval) -> Rational {
    let q = simplest_in(interval.lo(), interval.hi());
    let den = q.denom().clone();
    let top = (interval.hi() * from_bigint(den.clone())).floor();
    Rational::new(top.to_integer(), den)
}

// Continued-fraction descent; the simplest rational of a closed interval has
// the minimal denominator over that interval.
fn simplest_in(lo: &Rational, hi: &Rational) -> Rational {
    if hi.is_negative() {
        return -simplest_in(&-hi, &-lo);
    }
    if !lo.is_positive() {
        return Rational::zero();
    }
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    let n = lo.floor();
    let a = (hi - &n).recip();
    let b = (lo - &n).recip();
    n + simplest_in(&a, &b).recip()
}

/// Enclosure of `log2(q)` for `q > 0`, with width at most `2^-frac_bits`.
pub fn log2_interval(q: &Rational, frac_bits: u32) -> Result<RationalInterval> {
    if !q.is_positive() {
        return Err(Error::Domain(format!("log of nonpositive {q}")));
    }
    let mut e = q.numer().bits() as i64 - q.denom().bits() as i64;
    let mut y = q * pow2(-e);
    while y >= int(2) {
        y *= rat(1, 2);
        e += 1;
    }
    while y < int(1) {
        y *= int(2);
        e -= 1;
    }
    let mut prec = frac_bits as i64 + 32;
    loop {
        if let Some(frac) = log2_fraction_bits(&y, frac_bits, prec) {
            let base = from_bigint(BigInt::from(e)) + frac;
            return RationalInterval::new(base.clone(), base + pow2(-(frac_bits as i64)));
        }
        prec *= 2;
    }
}

// Bits of log2(y) for y in [1,2) by repeated squaring, with lo/hi dyadic
// bounds on the running square. None when a bit cannot be decided at `prec`.
fn log2_fraction_bits(y: &Rational, frac_bits: u32, prec: i64) -> Option<Rational> {
    let two = int(2);
    let mut lo = y.clone();
    let mut hi = y.clone();
    let mut acc = Rational::zero();
    let mut weight = rat(1, 2);
    for _ in 0..frac_bits {
        lo = round_dyadic_down(&(&lo * &lo), prec);
        hi = round_dyadic_up(&(&hi * &hi), prec);
        if lo >= two {
            acc += &weight;
            lo *= rat(1, 2);
            hi *= rat(1, 2);
        } else if hi >= two {
            return None;
        }
        weight *= rat(1, 2);
    }
    Some(acc)
}

fn round_dyadic_down(q: &Rational, prec: i64) -> Rational {
    let s = q * pow2(prec);
    from_bigint(s.floor().to_integer()) * pow2(-prec)
}

fn round_dyadic_up(q: &Rational, prec: i64) -> Rational {
    let s = q * pow2(prec);
    from_bigint(s.ceil().to_integer()) * pow2(-prec)
}

/// Nearest multiple of `1/n`, ties toward `+inf`.
pub fn round_to_denominator(q: &Rational, n: &BigInt) -> Rational {
    let scaled = q * from_bigint(n.clone()) + rat(1, 2);
    Rational::new(scaled.floor().to_integer(), n.clone())
}

pub fn sign(q: &Rational) -> Sign {
    q.numer().sign()
}
