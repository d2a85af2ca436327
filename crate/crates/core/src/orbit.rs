//! Point sets on `S^1 × {0, 1}` propagated along the AT system, and
//! ε-density checks.
//!
//! Angles are in turns, reduced to `[0, 1)`. Two angles closer than
//! [`ANGLE_TOL`] (circularly) are the same point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

pub const ANGLE_TOL: f64 = 1e-9;
pub const DEFAULT_POINT_BUDGET: usize = 1_000_000;
pub const GRID: usize = 4096;
pub const DEFAULT_SAMPLES: usize = 64;

pub fn default_theta() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

fn reduce(angle: f64) -> f64 {
    let a = angle.rem_euclid(1.0);
    if a >= 1.0 { 0.0 } else { a }
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub summand: u8,
    pub angle: f64,
}

impl OrbitPoint {
    pub fn new(summand: u8, angle: f64) -> Result<Self> {
        if summand > 1 {
            return Err(param(format!("summand must be 0 or 1, got {summand}")));
        }
        if !angle.is_finite() {
            return Err(param("angle must be finite"));
        }
        Ok(OrbitPoint { summand, angle: reduce(angle) })
    }

    fn key(&self) -> (u8, f64) {
        (self.summand, self.angle)
    }
}

/// A finite point set, canonically ordered by summand then angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSet {
    base: OrbitPoint,
    points: Vec<OrbitPoint>,
}

impl OrbitSet {
    pub fn from_points(base: OrbitPoint, mut points: Vec<OrbitPoint>) -> Self {
        points.sort_by(|a, b| a.key().partial_cmp(&b.key()).expect("finite angles"));
        let mut out: Vec<OrbitPoint> = Vec::with_capacity(points.len());
        for p in points {
            match out.last() {
                Some(q) if q.summand == p.summand && p.angle - q.angle < ANGLE_TOL => {}
                _ => out.push(p),
            }
        }
        // Close the circle: drop a last point that coincides with the first one.
        for s in 0..2u8 {
            let first = out.iter().position(|p| p.summand == s);
            let last = out.iter().rposition(|p| p.summand == s);
            if let (Some(f), Some(l)) = (first, last) {
                if f != l && circ_dist(out[f].angle, out[l].angle) < ANGLE_TOL {
                    out.remove(l);
                }
            }
        }
        OrbitSet { base, points: out }
    }

    pub fn singleton(p: OrbitPoint) -> Self {
        OrbitSet { base: p, points: vec![p] }
    }

    pub fn base(&self) -> OrbitPoint {
        self.base
    }

    pub fn points(&self) -> &[OrbitPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sorted angles on one summand.
    pub fn angles(&self, summand: u8) -> Vec<f64> {
        self.points.iter().filter(|p| p.summand == summand).map(|p| p.angle).collect()
    }

    pub fn contains(&self, p: &OrbitPoint) -> bool {
        let angles = self.angles(p.summand);
        nearest_distance(&angles, p.angle).is_some_and(|d| d < ANGLE_TOL * 10.0)
    }

    pub fn is_subset_of(&self, other: &OrbitSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }
}

/// Circular distance from `x` to the nearest of the sorted `angles`.
fn nearest_distance(angles: &[f64], x: f64) -> Option<f64> {
    if angles.is_empty() {
        return None;
    }
    let i = angles.partition_point(|&a| a < x);
    let after = angles[i % angles.len()];
    let before = angles[(i + angles.len() - 1) % angles.len()];
    Some(circ_dist(after, x).min(circ_dist(before, x)))
}

/// One step of the point map. From summand 0 the point stays and spreads to
/// all `N`-th roots on summand 1; from summand 1 it goes to its `N`-th power
/// on summand 0 and to its rotations by `ω^k` and `e^{-2πiθ} ω^k` on summand 1.
pub fn lphi_step(p: OrbitPoint, n_cyc: u64, theta: f64) -> Result<OrbitSet> {
    if n_cyc < 2 {
        return Err(param("N must be >= 2"));
    }
    Ok(OrbitSet::from_points(p, step_points(p, n_cyc, theta)))
}

fn step_points(p: OrbitPoint, n_cyc: u64, theta: f64) -> Vec<OrbitPoint> {
    let nf = n_cyc as f64;
    let pt = |summand, angle| OrbitPoint { summand, angle: reduce(angle) };
    let mut out = Vec::with_capacity(2 * n_cyc as usize + 1);
    if p.summand == 0 {
        out.push(p);
        out.extend((0..n_cyc).map(|k| pt(1, (p.angle + k as f64) / nf)));
    } else {
        out.push(pt(0, nf * p.angle));
        for k in 0..n_cyc {
            let rot = k as f64 / nf;
            out.push(pt(1, p.angle + rot));
            out.push(pt(1, p.angle - theta + rot));
        }
    }
    out
}

fn advance(set: &OrbitSet, n_cyc: u64, theta: f64, budget: usize) -> Result<OrbitSet> {
    let next: Vec<OrbitPoint> = set.points.iter().flat_map(|&p| step_points(p, n_cyc, theta)).collect();
    if next.len() > budget.saturating_mul(2 * n_cyc as usize + 1) {
        return Err(Error::PointBudgetExceeded { budget, reached: next.len() });
    }
    let out = OrbitSet::from_points(set.base, next);
    if out.len() > budget {
        return Err(Error::PointBudgetExceeded { budget, reached: out.len() });
    }
    Ok(out)
}

/// `steps`-fold composition: the union of one-step images of every point of
/// the previous stage.
pub fn lphi_compose(start: OrbitPoint, steps: usize, n_cyc: u64, theta: f64, budget: usize) -> Result<OrbitSet> {
    if n_cyc < 2 {
        return Err(param("N must be >= 2"));
    }
    let mut set = OrbitSet::singleton(start);
    for _ in 0..steps {
        set = advance(&set, n_cyc, theta, budget)?;
    }
    Ok(set)
}

/// Every point of a uniform grid on each summand circle lies within `eps`
/// turns of a set point on the same summand.
pub fn eps_dense(s: &OrbitSet, eps: f64) -> Result<bool> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(param("eps must be positive"));
    }
    Ok((0..2u8).all(|summand| summand_dense(&s.angles(summand), eps)))
}

/// Density on one summand only.
pub fn summand_dense(angles: &[f64], eps: f64) -> bool {
    !angles.is_empty()
        && (0..GRID).all(|i| nearest_distance(angles, i as f64 / GRID as f64).is_some_and(|d| d <= eps))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityResult {
    pub eps: f64,
    pub n: usize,
    pub samples: usize,
    pub dense: bool,
    pub seed: u64,
    pub start_summand: u8,
    pub per_base: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityConfig {
    pub samples: usize,
    pub seed: u64,
    pub budget: usize,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { samples: DEFAULT_SAMPLES, seed: 0x5eed, budget: DEFAULT_POINT_BUDGET }
    }
}

pub fn sample_bases(samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| rng.gen_range(0.0..1.0)).collect()
}

/// First stage at which the composed set from `(base, start_summand)` is
/// `eps`-dense, or `None` within `max_steps`.
pub fn first_dense_stage(
    start: OrbitPoint,
    eps: f64,
    n_cyc: u64,
    theta: f64,
    max_steps: usize,
    budget: usize,
) -> Result<Option<usize>> {
    let mut set = OrbitSet::singleton(start);
    for n in 0..=max_steps {
        if eps_dense(&set, eps)? {
            return Ok(Some(n));
        }
        if n < max_steps {
            set = advance(&set, n_cyc, theta, budget)?;
        }
    }
    Ok(None)
}

/// Least `n <= max_steps` such that the composed set is `eps`-dense for every
/// sampled base angle. Sets grow with `n`, so this is the largest of the
/// per-base first dense stages.
pub fn find_density_stage(
    start_summand: u8,
    eps: f64,
    n_cyc: u64,
    theta: f64,
    max_steps: usize,
    config: &DensityConfig,
) -> Result<DensityResult> {
    if n_cyc < 2 {
        return Err(param("N must be >= 2"));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(param("eps must be positive"));
    }
    if config.samples == 0 {
        return Err(param("at least one base angle is needed"));
    }
    let bases = sample_bases(config.samples, config.seed);
    let per_base = bases
        .par_iter()
        .map(|&a| {
            let start = OrbitPoint::new(start_summand, a)?;
            first_dense_stage(start, eps, n_cyc, theta, max_steps, config.budget)
        })
        .collect::<Result<Vec<_>>>()?;
    let per_base: Vec<usize> = per_base
        .into_iter()
        .map(|n| n.ok_or(Error::DensityNotReached { max_steps }))
        .collect::<Result<_>>()?;
    let n = per_base.iter().copied().max().unwrap_or(0);
    Ok(DensityResult { eps, n, samples: config.samples, dense: true, seed: config.seed, start_summand, per_base })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn step_from_summand_zero() {
        let s = lphi_step(OrbitPoint::new(0, 0.2).unwrap(), 2, default_theta()).unwrap();
        assert!(close(&s.angles(0), &[0.2]));
        assert!(close(&s.angles(1), &[0.1, 0.6]));
    }

    #[test]
    fn step_from_summand_one_degenerate_theta() {
        let s = lphi_step(OrbitPoint::new(1, 0.0).unwrap(), 2, 0.0).unwrap();
        assert!(close(&s.angles(0), &[0.0]));
        assert!(close(&s.angles(1), &[0.0, 0.5]));
    }

    #[test]
    fn step_cardinality_irrational() {
        for n in 2..6 {
            let s = lphi_step(OrbitPoint::new(1, 0.3).unwrap(), n, default_theta()).unwrap();
            assert_eq!(s.len() as u64, 2 * n + 1);
        }
    }

    #[test]
    fn wraparound_dedup() {
        let b = OrbitPoint::new(0, 0.0).unwrap();
        let s = OrbitSet::from_points(b, vec![b, OrbitPoint { summand: 0, angle: 1.0 - 1e-12 }]);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn density_geometry() {
        let b = OrbitPoint::new(0, 0.0).unwrap();
        let s = OrbitSet::from_points(b, vec![b, OrbitPoint::new(0, 0.5).unwrap()]);
        assert!(summand_dense(&s.angles(0), 0.3));
        assert!(!eps_dense(&s, 0.3).unwrap());
        assert!(!summand_dense(&s.angles(0), 0.2));
        assert!(eps_dense(&s, 0.0).is_err());
    }

    #[test]
    fn compose_base_cases() {
        let x = OrbitPoint::new(1, 0.37).unwrap();
        assert_eq!(lphi_compose(x, 0, 2, 0.1, 100).unwrap().points(), &[x]);
        assert_eq!(lphi_compose(x, 1, 2, 0.1, 100).unwrap(), lphi_step(x, 2, 0.1).unwrap());
    }

    #[test]
    fn budget_overflow() {
        let x = OrbitPoint::new(1, 0.37).unwrap();
        let err = lphi_compose(x, 20, 2, default_theta(), 50).unwrap_err();
        assert!(matches!(err, Error::PointBudgetExceeded { budget: 50, .. }));
    }

    #[test]
    fn zero_theta_never_dense_from_summand_zero() {
        let cfg = DensityConfig { samples: 4, ..Default::default() };
        let err = find_density_stage(0, 0.2, 2, 0.0, 8, &cfg).unwrap_err();
        assert_eq!(err, Error::DensityNotReached { max_steps: 8 });
    }
}
