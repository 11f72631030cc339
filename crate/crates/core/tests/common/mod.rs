#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use wsos_core::barrier::{in_dual_interior, BarrierContext};
use wsos_core::exactarith::{int, rat, BlockDiagMatrix, Rational, SymMatrix};
use wsos_core::polybasis::{Basis, BasisId, ConeSpec, Poly};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_rat(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

pub fn rand_vec(rng: &mut ChaCha8Rng, len: usize, num: i64, den: i64) -> Vec<Rational> {
    (0..len).map(|_| rand_rat(rng, num, den)).collect()
}

pub fn lagrange_interval(degree: u32) -> ConeSpec {
    let nodes = (0..=degree as i64)
        .map(|k| vec![rat(2 * k - degree as i64, degree as i64 + 1)])
        .collect();
    ConeSpec::interval(BasisId::lagrange(1, degree, nodes)).unwrap()
}

/// Small cones of every flavour: line, interval in all three bases and
/// both degree parities, and the disk.
pub fn small_cones() -> Vec<(String, ConeSpec)> {
    let mut v = Vec::new();
    for d in 1..=4 {
        v.push((format!("line-{}", 2 * d), ConeSpec::line(d)));
    }
    for deg in [2u32, 3, 4, 5, 6, 7] {
        v.push((
            format!("interval-monomial-{deg}"),
            ConeSpec::interval(BasisId::monomial(1, deg)).unwrap(),
        ));
    }
    for deg in [3u32, 4] {
        v.push((
            format!("interval-chebyshev-{deg}"),
            ConeSpec::interval(BasisId::chebyshev(1, deg)).unwrap(),
        ));
        v.push((format!("interval-lagrange-{deg}"), lagrange_interval(deg)));
    }
    v.push(("disk".into(), ConeSpec::disk()));
    v
}

/// Random points where every weight is positive.
pub fn random_domain_points(rng: &mut ChaCha8Rng, spec: &ConeSpec, count: usize) -> Vec<Vec<Rational>> {
    let q = Basis::new(&spec.q_basis).unwrap();
    let weights: Vec<Poly> = spec.weights.iter().map(|w| q.to_monomial(w)).collect();
    let mut pts = Vec::new();
    while pts.len() < count {
        let z: Vec<Rational> = (0..spec.n).map(|_| rat(rng.gen_range(-15..=15), 16)).collect();
        if weights.iter().all(|w| w.eval(&z).is_positive()) {
            pts.push(z);
        }
    }
    pts
}

/// `sum alpha_j q(z_j)` over random domain points; retried until interior.
pub fn random_interior(rng: &mut ChaCha8Rng, spec: &ConeSpec, ctx: &BarrierContext) -> Vec<Rational> {
    let q = Basis::new(&spec.q_basis).unwrap();
    loop {
        let pts = random_domain_points(rng, spec, q.dim() + 2);
        let mut x = vec![Rational::zero(); q.dim()];
        for z in &pts {
            let alpha = rat(rng.gen_range(1..=8), rng.gen_range(1..=4));
            for (xi, qi) in x.iter_mut().zip(q.eval_basis(z)) {
                *xi += &alpha * qi;
            }
        }
        if in_dual_interior(ctx, &x) {
            return x;
        }
    }
}

/// `B B^T` per block with small integer `B`, plus `I` when `pd`.
pub fn random_psd(rng: &mut ChaCha8Rng, orders: &[usize], pd: bool) -> BlockDiagMatrix {
    let blocks = orders
        .iter()
        .map(|&l| {
            let cols = rng.gen_range(1..=l);
            let b: Vec<Vec<i64>> = (0..l).map(|_| (0..cols).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            SymMatrix::from_fn(l, |i, j| {
                let mut acc: i64 = (0..cols).map(|k| b[i][k] * b[j][k]).sum();
                if pd && i == j {
                    acc += 1;
                }
                int(acc)
            })
        })
        .collect();
    BlockDiagMatrix::new(blocks)
}

/// Cone interior polynomial `Lambda^*(S)` for a random PD `S`.
pub fn random_interior_poly(rng: &mut ChaCha8Rng, ctx: &BarrierContext) -> Vec<Rational> {
    ctx.op().adjoint(&random_psd(rng, ctx.op().orders(), true)).unwrap()
}

pub fn scale(v: &[Rational], a: &Rational) -> Vec<Rational> {
    v.iter().map(|x| x * a).collect()
}

pub fn bigint(n: i64) -> BigInt {
    BigInt::from(n)
}
