use proptest::prelude::*;
use rokhlin_core::orbit::{default_theta, eps_dense, find_density_stage, lphi_compose, DensityConfig, OrbitPoint};

const BUDGET: usize = 100_000;

proptest! {
    #[test]
    fn compositions_are_reflexive_and_increasing(summand in 0u8..2, base in 0.0f64..1.0, steps in 0usize..8, n_cyc in 2u64..4) {
        let x = OrbitPoint::new(summand, base).unwrap();
        let mut prev = lphi_compose(x, 0, n_cyc, default_theta(), BUDGET).unwrap();
        for m in 1..=steps {
            let cur = lphi_compose(x, m, n_cyc, default_theta(), BUDGET).unwrap();
            prop_assert!(cur.contains(&x));
            prop_assert!(prev.is_subset_of(&cur));
            prev = cur;
        }
    }

    #[test]
    fn density_is_monotone_in_eps(base in 0.0f64..1.0, steps in 0usize..10, e1 in 0.01f64..0.5, e2 in 0.01f64..0.5) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let set = lphi_compose(OrbitPoint::new(0, base).unwrap(), steps, 2, default_theta(), BUDGET).unwrap();
        if eps_dense(&set, lo).unwrap() {
            prop_assert!(eps_dense(&set, hi).unwrap());
        }
    }

    #[test]
    fn density_is_monotone_in_inclusion(base in 0.0f64..1.0, steps in 0usize..9, eps in 0.02f64..0.5) {
        let x = OrbitPoint::new(1, base).unwrap();
        let small = lphi_compose(x, steps, 2, default_theta(), BUDGET).unwrap();
        let large = lphi_compose(x, steps + 1, 2, default_theta(), BUDGET).unwrap();
        if eps_dense(&small, eps).unwrap() {
            prop_assert!(eps_dense(&large, eps).unwrap());
        }
    }
}

#[test]
fn rational_rotation_can_stall() {
    let config = DensityConfig { samples: 4, ..DensityConfig::default() };
    assert!(find_density_stage(0, 0.2, 2, 0.0, 12, &config).is_err());
    assert!(find_density_stage(0, 0.5, 2, default_theta(), 5, &config).unwrap().n <= 5);
}

#[test]
fn reports_are_reproducible() {
    let config = DensityConfig::default();
    let a = find_density_stage(0, 0.1, 2, default_theta(), 40, &config).unwrap();
    let b = find_density_stage(0, 0.1, 2, default_theta(), 40, &config).unwrap();
    assert_eq!(a, b);
}

type R = num_rational::Ratio<i64>;

/// A point tracked as `(summand, a, c, t)` meaning angle `a·base + c - t·θ`.
fn symbolic_step(p: (u8, R, R, R), n: i64) -> Vec<(u8, R, R, R)> {
    let (s, a, c, t) = p;
    let nr = R::from_integer(n);
    if s == 0 {
        let mut out = vec![p];
        out.extend((0..n).map(|k| (1, a / nr, (c + R::from_integer(k)) / nr, t / nr)));
        out
    } else {
        let mut out = vec![(0, a * nr, c * nr, t * nr)];
        for k in 0..n {
            let rot = R::new(k, n);
            out.push((1, a, c + rot, t));
            out.push((1, a, c + rot, t + R::from_integer(1)));
        }
        out
    }
}

fn eval(p: &(u8, R, R, R), base: f64, theta: f64) -> (u8, f64) {
    let f = |r: &R| *r.numer() as f64 / *r.denom() as f64;
    (p.0, (f(&p.1) * base + f(&p.2) - f(&p.3) * theta).rem_euclid(1.0))
}

proptest! {
    #[test]
    fn angles_match_symbolic_tracking(summand in 0u8..2, base in 0.0f64..1.0, steps in 0usize..=3, n_cyc in 2i64..4) {
        let theta = default_theta();
        let mut sym = vec![(summand, R::from_integer(1), R::from_integer(0), R::from_integer(0))];
        for _ in 0..steps {
            let mut next: Vec<_> = sym.iter().flat_map(|&p| symbolic_step(p, n_cyc)).collect();
            next.sort();
            next.dedup();
            sym = next;
        }
        let set = lphi_compose(OrbitPoint::new(summand, base).unwrap(), steps, n_cyc as u64, theta, BUDGET).unwrap();
        let close = |x: f64, y: f64| { let d = (x - y).abs(); d.min(1.0 - d) < 1e-9 };
        for p in &sym {
            let (s, angle) = eval(p, base, theta);
            prop_assert!(set.angles(s).iter().any(|&a| close(a, angle)));
        }
        for s in 0..2u8 {
            for &a in &set.angles(s) {
                prop_assert!(sym.iter().map(|p| eval(p, base, theta)).any(|(t, b)| t == s && close(a, b)));
            }
        }
    }
}
