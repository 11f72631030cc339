mod common;

use proptest::prelude::*;
use rand::Rng;
use wsos_core::barrier::{dual_local_norm_sq, hessian, neg_gradient, BarrierContext};
use wsos_core::certify::{gram_recover, is_dual_certificate, verify_decomposition};
use wsos_core::exactarith::{from_bigint, rat, sqrt_ceil};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn gram_recovery_is_universal(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cones = common::small_cones();
        let (name, spec) = &cones[rng.gen_range(0..cones.len())];
        let ctx = BarrierContext::from_spec(spec).unwrap();
        let x = common::random_interior(&mut rng, spec, &ctx);
        let s = ctx.op().adjoint(&common::random_psd(&mut rng, ctx.op().orders(), false)).unwrap();
        let dec = gram_recover(&ctx, &x, &s).unwrap();
        prop_assert_eq!(ctx.op().adjoint(&dec.as_block_diag()).unwrap(), s.clone(), "cone {}", name);
        prop_assert_eq!(verify_decomposition(&ctx, &dec, &s), dec.all_psd());
        prop_assert_eq!(is_dual_certificate(&ctx, &x, &s).unwrap(), dec.all_psd());
    }

    #[test]
    fn positive_scaling_closure(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cones = common::small_cones();
        let (_, spec) = &cones[rng.gen_range(0..cones.len())];
        let ctx = BarrierContext::from_spec(spec).unwrap();
        let x = common::random_interior(&mut rng, spec, &ctx);
        let s = neg_gradient(&ctx, &x).unwrap();
        prop_assert!(is_dual_certificate(&ctx, &x, &s).unwrap());
        let alpha = rat(rng.gen_range(1..=50), rng.gen_range(1..=50));
        let beta = rat(rng.gen_range(1..=50), rng.gen_range(1..=50));
        prop_assert!(is_dual_certificate(&ctx, &common::scale(&x, &alpha), &common::scale(&s, &beta)).unwrap());
    }

    #[test]
    fn dual_norm_ball_is_certified(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cones = common::small_cones();
        let (name, spec) = &cones[rng.gen_range(0..cones.len())];
        let ctx = BarrierContext::from_spec(spec).unwrap();
        let x = common::random_interior(&mut rng, spec, &ctx);
        let h = hessian(&ctx, &x).unwrap();
        let s = h.neg_gradient(&ctx);
        let u = common::rand_vec(&mut rng, ctx.u(), 20, 3);
        let n = dual_local_norm_sq(&h, &u).unwrap();
        let u = common::scale(&u, &from_bigint(sqrt_ceil(&n).unwrap().max(1.into())).recip());
        prop_assert!(dual_local_norm_sq(&h, &u).unwrap() <= rat(1, 1));
        let t: Vec<_> = s.iter().zip(&u).map(|(a, b)| a + b).collect();
        prop_assert!(is_dual_certificate(&ctx, &x, &t).unwrap(), "cone {}", name);
    }
}
