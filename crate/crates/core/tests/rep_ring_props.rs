use proptest::prelude::*;
use rokhlin_core::rep_ring::{
    ao, cyclotomic_divisibility, in_cyclic_ideal, stab_equiv_check, LaurentPoly, ModuleElement, Order, RModule, Summand,
};

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-4i64..=4, -3i64..=3), 1..6).prop_map(|terms| {
        terms.into_iter().map(|(e, c)| LaurentPoly::monomial(e, c)).fold(LaurentPoly::zero(), |a, b| a + b)
    })
}

fn finite_module() -> impl Strategy<Value = RModule> {
    prop::collection::vec(prop_oneof![(1u64..7).prop_map(Summand::Cyclic), Just(Summand::Free)], 1..4)
        .prop_map(|s| RModule::new(s).unwrap())
}

proptest! {
    #[test]
    fn element_order_divides_mao(m in finite_module(), parts in prop::collection::vec(laurent(), 3)) {
        let x = m.element(parts[..m.summands.len()].to_vec()).unwrap();
        prop_assume!(!x.is_zero());
        let (Order::Finite(a), Order::Finite(b)) = (ao(&m, &x).unwrap(), m.mao().unwrap()) else {
            panic!("finite module has infinite order");
        };
        prop_assert_eq!(b % a, 0);
    }

    #[test]
    fn cyclotomic_divisibility_matches_ideal(x in laurent(), n in 1u64..6) {
        let shifted = LaurentPoly::sigma_pow_minus_one(1) * x.clone();
        prop_assert_eq!(cyclotomic_divisibility(&x, n), in_cyclic_ideal(&shifted, n));
    }

    #[test]
    fn stabilization_holds(x in laurent(), n in 2u64..5, n_max in 1u32..6) {
        prop_assert!(stab_equiv_check(&x, n, n_max));
    }

    #[test]
    fn reduction_is_a_ring_map(x in laurent(), y in laurent(), n in 1u64..6) {
        prop_assert_eq!((x.clone() * y.clone()).reduce(n), (x.reduce(n) * y.reduce(n)).reduce(n));
        prop_assert_eq!((x.clone() + y.clone()).reduce(n), (x.reduce(n) + y.reduce(n)).reduce(n));
    }

    #[test]
    fn laurent_json_round_trip(x in laurent()) {
        let back: LaurentPoly = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn ring_elements_have_infinite_order() {
    let m = RModule::new(vec![Summand::Cyclic(2), Summand::Ring]).unwrap();
    let x = ModuleElement(vec![LaurentPoly::zero(), LaurentPoly::one()]);
    assert_eq!(ao(&m, &x).unwrap(), Order::Infinite);
    assert_eq!(m.mao().unwrap(), Order::Infinite);
}

#[test]
fn mao_of_mixed_periods_is_the_lcm() {
    let m = RModule::new(vec![Summand::Cyclic(2), Summand::Cyclic(3)]).unwrap();
    assert_eq!(m.mao().unwrap(), Order::Finite(6));
    assert!(RModule::default().mao().is_err());
}

#[test]
fn module_json_forms() {
    let m: RModule = serde_json::from_str(r#"{"summands":[{"cyclic":3},{"free":true},{"ring":true}]}"#).unwrap();
    assert_eq!(m.summands, vec![Summand::Cyclic(3), Summand::Free, Summand::Ring]);
    assert!(serde_json::from_str::<RModule>(r#"{"summands":[{"cyclic":0}]}"#).is_err());
    assert!(serde_json::from_str::<RModule>(r#"{"summands":[{"cyclic":2,"free":true}]}"#).is_err());
}
