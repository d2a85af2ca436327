use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rokhlin_core::system::BlockAlgebra;
use rokhlin_core::trace::{
    comparison_le, tensor_certificates, tensor_trace_bound, trace_of, ProjectionClass, RokhlinCertificate, TraceVector,
};

fn class() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<u64>)> {
    prop::collection::vec(1u64..6, 1..4).prop_flat_map(|sizes| {
        let ranks = sizes.iter().map(|&s| 0..=s).collect::<Vec<_>>();
        let other = sizes.iter().map(|&s| 0..=s).collect::<Vec<_>>();
        (Just(sizes), ranks, other)
    })
}

fn lambdas() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((0i64..=20, 1i64..=20), 0..8)
        .prop_map(|v| v.into_iter().map(|(n, d)| BigRational::new(n.min(d).into(), d.into())).collect())
}

proptest! {
    #[test]
    fn tensor_bound_holds(ls in lambdas()) {
        let b = tensor_trace_bound(&ls).unwrap();
        prop_assert!(b.holds);
        prop_assert!(b.lhs <= b.rhs);
    }

    #[test]
    fn comparison_both_ways_means_equal((sizes, a, b) in class()) {
        let alg = BlockAlgebra::matrices(&sizes).unwrap();
        let p = ProjectionClass::from_u64(alg.clone(), &a).unwrap();
        let q = ProjectionClass::from_u64(alg, &b).unwrap();
        let both = comparison_le(&p, &q).unwrap() && comparison_le(&q, &p).unwrap();
        prop_assert_eq!(both, p == q);
    }

    #[test]
    fn complement_trace_adds_to_one((sizes, a, _b) in class(), pick in 0usize..4) {
        let alg = BlockAlgebra::matrices(&sizes).unwrap();
        let p = ProjectionClass::from_u64(alg.clone(), &a).unwrap();
        let traces = TraceVector::extreme_traces(&alg);
        let t = &traces[pick % traces.len()];
        let total = trace_of(&p, t).unwrap() + trace_of(&p.complement(), t).unwrap();
        prop_assert_eq!(total, BigRational::one());
    }

    #[test]
    fn tensor_defect_is_bounded_by_the_sum(r1 in 1u64..5, r2 in 1u64..5, f1 in 0u64..3, f2 in 0u64..3) {
        let cert = |r: u64, f: u64| {
            let alg = BlockAlgebra::matrices(&[2 * r + f]).unwrap();
            let p = ProjectionClass::from_u64(alg.clone(), &[2 * r]).unwrap();
            let tower = vec![
                ProjectionClass::from_u64(alg.clone(), &[r]).unwrap(),
                ProjectionClass::from_u64(alg.clone(), &[r]).unwrap(),
            ];
            let half = BigRational::new(1.into(), 2.into());
            RokhlinCertificate::new(1, p, tower, TraceVector::proportional(&alg), half.clone(), half).unwrap()
        };
        let (c1, c2) = (cert(r1, f1), cert(r2, f2));
        let (c, check) = tensor_certificates(&c1, &c2).unwrap();
        prop_assert!(check.pass);
        prop_assert!(c.defect() <= c1.defect() + c2.defect());
        prop_assert_eq!(c.tower.len(), 4);
    }
}

#[test]
fn tower_must_sum_to_p() {
    let alg = BlockAlgebra::matrices(&[4u32]).unwrap();
    let p = ProjectionClass::from_u64(alg.clone(), &[3]).unwrap();
    let tower = vec![ProjectionClass::from_u64(alg.clone(), &[1]).unwrap(), ProjectionClass::from_u64(alg.clone(), &[1]).unwrap()];
    let half = BigRational::new(1.into(), 2.into());
    assert!(RokhlinCertificate::new(1, p, tower, TraceVector::proportional(&alg), half.clone(), half).is_err());
}

#[test]
fn uhf_meets_the_level_three_example() {
    let half = BigRational::new(1.into(), 2.into());
    let r = rokhlin_core::trace::certify_uhf_stage(2, 3, &half, &half).unwrap();
    assert!(r.pass, "{:?}", r.failed());
    let c = r.check("trace_defect_closed_form").unwrap();
    assert_eq!(c.rhs, BigRational::new(2.into(), 81.into()));
    let sizes = r.params["codomain_sizes"].as_array().unwrap();
    let r9 = (BigUint::from(3u32).pow(9) - 1u32) / 2u32;
    assert_eq!(sizes[0].as_str().unwrap(), (r9.clone() + 1u32).to_string());
    assert_eq!(sizes[1].as_str().unwrap(), r9.to_string());
}
