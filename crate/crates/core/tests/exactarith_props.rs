mod common;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::Rng;
use wsos_core::exactarith::{
    from_bigint, ldl_factor, min_denominator_rational, parse_rational, rat, round_to_denominator, sqrt_ceil,
    sqrt_floor, sqrt_interval, Rational, RationalInterval, SymMatrix,
};

fn sym_from_seed(seed: u64, n: usize, rank: usize) -> SymMatrix {
    let mut rng = common::rng(seed);
    let b: Vec<Vec<Rational>> = (0..n).map(|_| common::rand_vec(&mut rng, rank, 4, 3)).collect();
    let signs: Vec<i64> = (0..rank).map(|_| if rng.gen_bool(0.7) { 1 } else { -1 }).collect();
    SymMatrix::from_fn(n, |i, j| {
        (0..rank).map(|k| &b[i][k] * &b[j][k] * Rational::from_integer(signs[k].into())).sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ldl_reconstructs(seed in any::<u64>(), n in 1usize..6, rank in 1usize..6) {
        let a = sym_from_seed(seed, n, rank);
        if let Ok(f) = ldl_factor(&a) {
            prop_assert_eq!(f.reconstruct(), a);
        }
    }

    #[test]
    fn pd_implies_psd(seed in any::<u64>(), n in 1usize..6, rank in 1usize..7) {
        let a = sym_from_seed(seed, n, rank);
        if a.is_pd() {
            prop_assert!(a.is_psd());
        }
        if a.is_psd() && a.neg().is_psd() {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn gram_matrices_are_psd(seed in any::<u64>(), n in 1usize..6, rank in 1usize..4) {
        let mut rng = common::rng(seed);
        let b: Vec<Vec<Rational>> = (0..n).map(|_| common::rand_vec(&mut rng, rank, 5, 4)).collect();
        let g = SymMatrix::from_fn(n, |i, j| (0..rank).map(|k| &b[i][k] * &b[j][k]).sum());
        prop_assert!(g.is_psd());
        prop_assert!(!g.is_pd() || rank >= n);
    }

    #[test]
    fn sqrt_ceil_is_tight(num in 1i64..1_000_000_000, den in 1i64..100_000) {
        let q = rat(num, den);
        let s = from_bigint(sqrt_ceil(&q).unwrap());
        prop_assert!(&s * &s >= q);
        let below = &s - Rational::one();
        prop_assert!(below.is_negative() || &below * &below < q);
        let f = from_bigint(sqrt_floor(&q).unwrap());
        prop_assert!(&f * &f <= q);
    }

    #[test]
    fn sqrt_interval_encloses(num in 0i64..1_000_000, den in 1i64..1000, bits in 1u32..80) {
        let q = rat(num, den);
        let iv = sqrt_interval(&q, bits).unwrap();
        prop_assert!(iv.lo() * iv.lo() <= q);
        prop_assert!(iv.hi() * iv.hi() >= q);
        prop_assert!(iv.width() <= Rational::new(BigInt::one(), BigInt::one() << bits as usize));
    }

    #[test]
    fn min_denominator_is_minimal(a in -300i64..300, b in 1i64..60, w in 1i64..40, wd in 1i64..400) {
        let lo = rat(a, b);
        let hi = &lo + rat(w, wd);
        let iv = RationalInterval::new(lo.clone(), hi.clone()).unwrap();
        let q = min_denominator_rational(&iv);
        prop_assert!(iv.contains(&q));
        let den = q.denom().clone();
        let limit = den.clone().min(BigInt::from(50));
        let mut d = BigInt::one();
        while d < limit {
            let dq = from_bigint(d.clone());
            let k = (&hi * &dq).floor();
            prop_assert!(k / &dq < lo, "denominator {} fits in [{}, {}]", d, lo, hi);
            d += 1;
        }
        // ties go to the largest candidate
        let next = &q + Rational::new(BigInt::one(), den);
        prop_assert!(next > hi);
    }

    #[test]
    fn rounding_is_nearest(num in -10_000i64..10_000, den in 1i64..500, n in 1i64..200) {
        let q = rat(num, den);
        let nn = BigInt::from(n);
        let r = round_to_denominator(&q, &nn);
        prop_assert!((&r * from_bigint(nn.clone())).is_integer());
        prop_assert!((&r - &q).abs() <= rat(1, 2 * n));
        if (&r - &q).abs() == rat(1, 2 * n) {
            prop_assert!(r > q);
        }
    }

    #[test]
    fn parse_format_round_trip(num in any::<i64>(), den in 1i64..i64::MAX) {
        let q = Rational::new(BigInt::from(num), BigInt::from(den));
        prop_assert_eq!(parse_rational(&q.to_string()).unwrap(), q);
    }
}

#[test]
fn singular_psd_and_indefinite() {
    let z = SymMatrix::zeros(3);
    assert!(z.is_psd() && !z.is_pd());
    let a = SymMatrix::from_rows(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]]).unwrap();
    assert!(!a.is_psd());
}
