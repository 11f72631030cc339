mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;
use wsos_core::barrier::BarrierContext;
use wsos_core::certify::{Certificate, WsosDecomposition};
use wsos_core::io;
use wsos_core::solver::IterationRecord;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cones_round_trip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cones = common::small_cones();
        let (_, spec) = &cones[rng.gen_range(0..cones.len())];
        let back = io::parse_cone(&io::to_pretty(&io::cone_to_json(spec))).unwrap();
        prop_assert_eq!(&back, spec);
        prop_assert_eq!(io::cone_digest(&back), io::cone_digest(spec));
    }

    #[test]
    fn certificates_round_trip(seed in any::<u64>(), with_c in any::<bool>(), with_n in any::<bool>()) {
        let mut rng = common::rng(seed);
        let u = rng.gen_range(1..12);
        let cert = Certificate {
            cone_digest: format!("{:064x}", rng.gen::<u128>()),
            x: common::rand_vec(&mut rng, u, 1_000_000, 1_000_000),
            c: with_c.then(|| common::rand_rat(&mut rng, 1000, 999)),
            n: with_n.then(|| BigInt::from(rng.gen_range(1u64..u64::MAX))),
            verified: rng.gen(),
        };
        let text = io::to_pretty(&io::certificate_to_json(&cert));
        prop_assert!(!text.contains('.'));
        prop_assert_eq!(io::parse_certificate(&text).unwrap(), cert);
    }

    #[test]
    fn decompositions_and_polys_round_trip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let cones = common::small_cones();
        let (_, spec) = &cones[rng.gen_range(0..cones.len())];
        let ctx = BarrierContext::from_spec(spec).unwrap();
        let dec = WsosDecomposition::new(common::random_psd(&mut rng, ctx.op().orders(), false).into_blocks());
        prop_assert_eq!(io::parse_decomposition(&io::to_pretty(&io::decomposition_to_json(&dec))).unwrap(), dec);
        let t = common::rand_vec(&mut rng, ctx.u(), 99, 98);
        prop_assert_eq!(io::parse_poly(&io::to_pretty(&io::poly_to_json(&t))).unwrap(), t);
    }

    #[test]
    fn traces_round_trip(seed in any::<u64>(), len in 0usize..20) {
        let mut rng = common::rng(seed);
        let trace: Vec<IterationRecord> = (1..=len)
            .map(|iter| IterationRecord {
                iter,
                c: common::rand_rat(&mut rng, 100, 77),
                delta_c: common::rand_rat(&mut rng, 100, 77),
                n: BigInt::from(rng.gen_range(1..100_000)),
                max_bits_x: rng.gen_range(0..200),
                verified: rng.gen(),
            })
            .collect();
        let text = io::trace_to_jsonl(&trace);
        prop_assert_eq!(text.lines().count(), len);
        prop_assert_eq!(io::parse_trace(&text).unwrap(), trace);
    }
}
