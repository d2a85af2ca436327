//! Scenario files, presets and report documents.
//!
//! A scenario names a kind and a parameter object. Parameters are validated
//! per kind before anything is computed. Reports are deterministic: maps are
//! ordered, sampling uses fixed seeds, and sweep rows keep grid order.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{param, Error, Result};
use crate::fixed_point::{fixed_algebra, fixed_embedding_multiplicities, r_of, tensor_actions, w_unitary_spec};
use crate::orbit::{self, DensityConfig, OrbitPoint};
use crate::rep_ring::{self, LaurentPoly, Order, RModule, Summand};
use crate::serde_num::{self, rational_to_string};
use crate::system::{compose_maps, relative_commutant, AtSystem, CommutantFamily, LParams};
use crate::trace::{self, Check};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    UhfZ2,
    AtCircle,
    RepRingSweep,
    Density,
    Commutant,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::UhfZ2 => "uhf_z2",
            ScenarioKind::AtCircle => "at_circle",
            ScenarioKind::RepRingSweep => "rep_ring_sweep",
            ScenarioKind::Density => "density",
            ScenarioKind::Commutant => "commutant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: ScenarioKind,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, params: BTreeMap<String, Value>) -> Self {
        Scenario { kind, params, out: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    /// Built-in scenarios: `e5328` (the odd-growth AT system through stage 6)
    /// and `uhf` (two tensor factors at level 4).
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "e5328" => Ok(Scenario::new(ScenarioKind::AtCircle, obj(json!({"preset": "e5328"})))),
            "uhf" => Ok(Scenario::new(
                ScenarioKind::UhfZ2,
                obj(json!({"n_factors": 2, "L": 4, "delta1": "1/2", "delta2": "1/2"})),
            )),
            other => Err(Error::Schema(format!("unknown preset {other:?}; expected e5328 or uhf"))),
        }
    }
}

fn obj(v: Value) -> BTreeMap<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

fn typed<T: for<'de> Deserialize<'de>>(kind: ScenarioKind, params: &BTreeMap<String, Value>) -> Result<T> {
    let value = Value::Object(params.clone().into_iter().collect());
    serde_json::from_value(value).map_err(|e| Error::Schema(format!("{} parameters: {e}", kind.name())))
}

/// The document produced by [`run`]. `pass` is the conjunction of `checks`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    fn new(kind: ScenarioKind, params: BTreeMap<String, Value>) -> Self {
        Report { scenario: kind.name().into(), params, checks: Vec::new(), data: BTreeMap::new(), notes: Vec::new(), pass: true }
    }

    fn finish(mut self) -> Self {
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push(Check::flag(name, ok));
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }
}

fn default_n() -> u64 {
    2
}
fn default_r0() -> [u64; 2] {
    [1, 1]
}
fn default_stages() -> usize {
    6
}
fn default_eps0() -> BigRational {
    BigRational::new(1.into(), 4.into())
}
fn default_theta() -> f64 {
    orbit::default_theta()
}
fn default_density_eps() -> Vec<f64> {
    vec![0.5, 0.2, 0.1]
}
fn default_samples() -> usize {
    orbit::DEFAULT_SAMPLES
}
fn default_max_steps() -> usize {
    40
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_budget() -> usize {
    orbit::DEFAULT_POINT_BUDGET
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UhfParams {
    n_factors: usize,
    #[serde(rename = "L")]
    level: u32,
    #[serde(with = "serde_num::rational")]
    delta1: BigRational,
    #[serde(with = "serde_num::rational")]
    delta2: BigRational,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtParams {
    #[serde(default)]
    preset: Option<String>,
    #[serde(rename = "N", default = "default_n")]
    n_cyc: u64,
    #[serde(default = "default_r0")]
    r0: [u64; 2],
    #[serde(default)]
    schedule: Option<Vec<LParams>>,
    #[serde(default = "default_stages")]
    stages: usize,
    #[serde(default = "default_eps0", with = "serde_num::rational")]
    eps0: BigRational,
    #[serde(default = "default_theta")]
    theta: f64,
    #[serde(default = "default_density_eps")]
    density_eps: Vec<f64>,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_max_steps")]
    max_steps: usize,
    #[serde(default = "default_seed")]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityParams {
    #[serde(rename = "N", default = "default_n")]
    n_cyc: u64,
    #[serde(default = "default_theta")]
    theta: f64,
    eps: f64,
    #[serde(default)]
    start_summand: u8,
    #[serde(default = "default_max_steps")]
    max_steps: usize,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_budget")]
    budget: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommutantParams {
    #[serde(rename = "N", default = "default_n")]
    n_cyc: u64,
    #[serde(default = "default_r0")]
    r0: [u64; 2],
    schedule: Vec<LParams>,
    #[serde(default)]
    n: usize,
}

#[derive(Deserialize, Default, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum SweepMode {
    #[default]
    Full,
    Injectivity,
    Mao,
}

fn default_l_max() -> u64 {
    5
}
fn default_n_values() -> Vec<u64> {
    vec![2, 3, 4]
}
fn default_mao_max() -> u64 {
    6
}
fn default_random_samples() -> usize {
    300
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RepRingParams {
    #[serde(default)]
    mode: SweepMode,
    #[serde(default = "default_l_max")]
    l_max: u64,
    #[serde(default = "default_n_values")]
    n_values: Vec<u64>,
    #[serde(default = "default_mao_max")]
    mao_max: u64,
    #[serde(default = "default_random_samples")]
    random_samples: usize,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(rename = "N", default)]
    n_cyc: Option<u64>,
    #[serde(default)]
    l: Option<LParams>,
}

pub fn run(scenario: &Scenario) -> Result<Report> {
    match scenario.kind {
        ScenarioKind::UhfZ2 => run_uhf(scenario),
        ScenarioKind::AtCircle => run_at(scenario),
        ScenarioKind::RepRingSweep => run_rep_ring(scenario),
        ScenarioKind::Density => run_density(scenario),
        ScenarioKind::Commutant => run_commutant(scenario),
    }
}

fn run_uhf(s: &Scenario) -> Result<Report> {
    let p: UhfParams = typed(s.kind, &s.params)?;
    let cert = trace::certify_uhf_stage(p.n_factors, p.level, &p.delta1, &p.delta2)?;
    let mut report = Report::new(s.kind, cert.params.clone());
    report.checks = cert.checks.clone();
    report.notes = cert.notes.clone();
    if let Some(c) = &cert.certificate {
        report.data.insert("defect".into(), Value::from(rational_to_string(&c.defect())));
        report.data.insert("tower_size".into(), Value::from(c.tower.len()));
    }
    Ok(report.finish())
}

/// The odd-growth multiplicities `l00 = l10 = 1`, `l01 = l11 = 2n + 1`.
pub fn e5328_system(n_cyc: u64, stages: usize) -> AtSystem {
    AtSystem::example_odd_growth(n_cyc, stages)
}

/// The four hypotheses on a finite schedule. Unboundedness of the ratios is
/// checked as strict growth along the schedule.
pub fn hypothesis_checks(sys: &AtSystem) -> Vec<Check> {
    let mut checks = Vec::new();
    let q = |a: u64| BigRational::from_integer(a.into());
    checks.push(Check::le("hypothesis_1_r0_le_r1", q(sys.r0[0]), q(sys.r1_0())));
    checks.push(Check::flag(
        "hypothesis_2_l_ordering",
        sys.schedule.iter().all(|l| l.l10 >= l.l00 && l.l11 >= l.l01),
    ));
    let ratios: Vec<(BigRational, BigRational)> = sys
        .schedule
        .iter()
        .map(|l| (BigRational::new(l.l01.into(), l.l00.into()), BigRational::new(l.l11.into(), l.l10.into())))
        .collect();
    checks.push(Check::flag(
        "hypothesis_3_ratios_increase",
        ratios.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1),
    ));
    checks.push(Check::flag("hypothesis_4_nondegenerate", sys.schedule.iter().all(|l| !l.is_degenerate())));
    checks
}

impl AtSystem {
    fn r1_0(&self) -> u64 {
        self.r0[1]
    }
}

/// Sizes and `q`-ranks of the five commutant families in closed form.
pub fn commutant_closed_forms(l: &LParams, next: &LParams, n_cyc: u64) -> BTreeMap<CommutantFamily, (u64, u64)> {
    let n = n_cyc;
    BTreeMap::from([
        (CommutantFamily::D1, (next.l00 * l.l00 + next.l01 * l.l10, next.l01 * l.l10)),
        (CommutantFamily::D2, (next.l01 * l.l10, next.l01 * l.l10)),
        (CommutantFamily::D3, (next.l00 * l.l01 + 2 * n * next.l01 * l.l11, 2 * n * next.l01 * l.l11)),
        (CommutantFamily::D4, (next.l10 * l.l00 + 2 * n * next.l11 * l.l10, 2 * n * next.l11 * l.l10)),
        (CommutantFamily::D5, (n * next.l10 * l.l01 + 4 * n * n * next.l11 * l.l11, 4 * n * n * next.l11 * l.l11)),
    ])
}

pub fn family_multiplicity(f: CommutantFamily, n_cyc: u64) -> usize {
    let n = n_cyc as usize;
    match f {
        CommutantFamily::D1 | CommutantFamily::D3 | CommutantFamily::D4 => n,
        CommutantFamily::D2 => n * n - n,
        CommutantFamily::D5 => 1,
    }
}

fn commutant_checks(sys: &AtSystem, n: usize, report: &mut Report) -> Result<()> {
    let (commutant, ranks, families) = sys.two_step_commutant(n)?;
    let composite = compose_maps(&sys.fixed_point_map(n + 1)?, &sys.fixed_point_map(n)?)?;
    let sizes_match = commutant.groups.iter().all(|g| composite.entry(g.dst, g.src) == &g.size)
        && relative_commutant(&composite)?.algebra == commutant.algebra;
    report.flag(format!("commutant_sizes[n={n}]"), sizes_match);
    let closed = commutant_closed_forms(&sys.l(n)?, &sys.l(n + 1)?, sys.n_cyc);
    for f in &families {
        let (size, rank) = closed[&f.family];
        report.flag(
            format!("commutant_family[n={n},{:?}]", f.family),
            f.multiplicity == family_multiplicity(f.family, sys.n_cyc)
                && f.size == BigUint::from(size)
                && f.rank_of_q == BigUint::from(rank),
        );
    }
    report.flag(format!("commutant_family_count[n={n}]"), families.len() == 5);
    report.data.insert(
        format!("commutant[n={n}]"),
        json!({
            "families": families,
            "blocks": commutant.groups.len(),
            "q_ranks_total": ranks.iter().sum::<BigUint>().to_string(),
        }),
    );
    Ok(())
}

fn density_rows(
    n_cyc: u64,
    theta: f64,
    eps_list: &[f64],
    max_steps: usize,
    config: &DensityConfig,
    report: &mut Report,
) -> Result<()> {
    let mut found = Vec::new();
    let mut table = Vec::new();
    for &eps in eps_list {
        match orbit::find_density_stage(0, eps, n_cyc, theta, max_steps, config) {
            Ok(r) => {
                report.flag(format!("density[eps={eps}]"), true);
                table.push(json!({"eps": eps, "n": r.n, "samples": r.samples, "dense": true}));
                found.push((eps, r.n));
            }
            Err(Error::DensityNotReached { .. }) => {
                report.flag(format!("density[eps={eps}]"), false);
                table.push(json!({"eps": eps, "n": null, "samples": config.samples, "dense": false}));
            }
            Err(e) => return Err(e),
        }
    }
    found.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite eps"));
    report.flag("density_monotone_in_eps", found.windows(2).all(|w| w[0].1 <= w[1].1));

    // Containment and reflexivity along the way, from the first sampled base.
    let base = orbit::sample_bases(1, config.seed)[0];
    let deepest = found.iter().map(|f| f.1).max().unwrap_or(0);
    let mut invariants = true;
    for summand in 0..2u8 {
        let x = OrbitPoint::new(summand, base)?;
        let mut prev = orbit::OrbitSet::singleton(x);
        for n in 0..=deepest {
            let cur = orbit::lphi_compose(x, n, n_cyc, theta, config.budget)?;
            invariants &= cur.contains(&x) && prev.is_subset_of(&cur);
            prev = cur;
        }
    }
    report.flag("density_containment_reflexivity", invariants);
    report.data.insert("density".into(), Value::from(table));
    Ok(())
}

fn injectivity_row(l: &LParams, n_cyc: u64) -> Result<(bool, bool, bool)> {
    let phi = rep_ring::phi_connecting_map(l, n_cyc)?;
    let inj = rep_ring::is_injective(&phi);
    let aug = rep_ring::mod_augmentation_map(l, n_cyc)?;
    let aug_inj = rep_ring::is_injective(&aug).injective;
    Ok((inj.injective, aug_inj, !l.is_degenerate()))
}

fn run_at(s: &Scenario) -> Result<Report> {
    let p: AtParams = typed(s.kind, &s.params)?;
    let sys = match (p.preset.as_deref(), p.schedule) {
        (Some("e5328"), None) => e5328_system(p.n_cyc, p.stages),
        (Some(other), None) => return Err(Error::Schema(format!("unknown at_circle preset {other:?}"))),
        (None, Some(schedule)) => AtSystem::new(p.n_cyc, p.r0, schedule)?,
        (Some(_), Some(_)) => return Err(Error::Schema("give either a preset or a schedule, not both".into())),
        (None, None) => return Err(Error::Schema("at_circle needs a preset or a schedule".into())),
    };
    if sys.schedule.len() < 2 {
        return Err(param("at_circle needs at least two stages of parameters"));
    }
    let mut params = s.params.clone();
    params.insert("N".into(), Value::from(sys.n_cyc));
    params.insert("stages".into(), Value::from(sys.stage_count() - 1));
    params.insert("eps0".into(), Value::from(rational_to_string(&p.eps0)));
    params.insert("theta".into(), Value::from(p.theta));
    params.insert("seed".into(), Value::from(p.seed));
    let mut report = Report::new(s.kind, params);
    report.checks.extend(hypothesis_checks(&sys));
    if report.checks.iter().any(|c| !c.pass) {
        report.notes.push("hypotheses failed; certification skipped".into());
        return Ok(report.finish());
    }

    let dims: Vec<Value> = (0..sys.stage_count())
        .map(|n| sys.dims(n).map(|[a, b]| json!([a.to_string(), b.to_string()])))
        .collect::<Result<_>>()?;
    report.data.insert("dims".into(), Value::from(dims));

    // Injectivity on equivariant K_0 and modulo the augmentation ideal.
    for (n, l) in sys.schedule.iter().enumerate() {
        let (inj, aug_inj, expected) = injectivity_row(l, sys.n_cyc)?;
        report.flag(format!("injective[n={n}]"), inj == expected && inj);
        report.flag(format!("injective_mod_augmentation[n={n}]"), aug_inj == expected && aug_inj);
    }

    // mao separates the stage modules for different N.
    let own = RModule::at_stage(sys.n_cyc).mao()?;
    report.flag("mao_equals_N", own == Order::Finite(sys.n_cyc));
    let others: Vec<u64> = (2..=6).filter(|&m| m != sys.n_cyc).collect();
    let separated = others.iter().map(|&m| rep_ring::compare_actions_by_mao(sys.n_cyc, m)).collect::<Result<Vec<_>>>()?;
    report.flag("mao_distinguishes", separated.iter().all(|&b| b));
    report.data.insert("mao".into(), Value::from(own.to_string()));
    report.data.insert("k1".into(), Value::from(0));

    // Trace bound at every stage, then the full certificate at the first
    // stage where the selection inequality holds.
    for n in 0..sys.schedule.len() {
        report.checks.extend(trace::at_trace_bound_checks(&sys, n)?);
    }
    let selectable = (0..sys.schedule.len().saturating_sub(1)).find(|&n| {
        let l = sys.schedule[n];
        let min_ratio = BigRational::new(l.l01.into(), l.l00.into()).min(BigRational::new(l.l11.into(), l.l10.into()));
        min_ratio > p.eps0.recip()
    });
    match selectable {
        Some(n) => {
            let cert = trace::certify_at_stage(&sys, n, &p.eps0)?;
            report.data.insert("certified_stage".into(), Value::from(n));
            report.checks.extend(cert.checks.into_iter().map(|mut c| {
                c.name = format!("certificate.{}", c.name);
                c
            }));
        }
        None => report.flag("stage_selection_possible", false),
    }

    for n in 0..sys.schedule.len() - 1 {
        commutant_checks(&sys, n, &mut report)?;
    }

    let config = DensityConfig { samples: p.samples, seed: p.seed, budget: orbit::DEFAULT_POINT_BUDGET };
    density_rows(sys.n_cyc, p.theta, &p.density_eps, p.max_steps, &config, &mut report)?;
    report.notes.push(format!("density is checked on {} sampled base angles", p.samples));
    report.notes.push("K_1 of every stage is recorded as 0".into());
    Ok(report.finish())
}

fn run_density(s: &Scenario) -> Result<Report> {
    let p: DensityParams = typed(s.kind, &s.params)?;
    let config = DensityConfig { samples: p.samples, seed: p.seed, budget: p.budget };
    let mut report = Report::new(s.kind, s.params.clone());
    match orbit::find_density_stage(p.start_summand, p.eps, p.n_cyc, p.theta, p.max_steps, &config) {
        Ok(r) => {
            report.flag("dense", true);
            report.data.insert("eps".into(), Value::from(p.eps));
            report.data.insert("n".into(), Value::from(r.n));
            report.data.insert("samples".into(), Value::from(r.samples));
            report.data.insert("dense".into(), Value::from(true));
        }
        Err(Error::DensityNotReached { max_steps }) => {
            report.flag("dense", false);
            report.data.insert("eps".into(), Value::from(p.eps));
            report.data.insert("n".into(), Value::Null);
            report.data.insert("samples".into(), Value::from(p.samples));
            report.data.insert("dense".into(), Value::from(false));
            report.notes.push(format!("no density stage within {max_steps} steps"));
        }
        Err(e) => return Err(e),
    }
    report.notes.push(format!("density is checked on {} sampled base angles", p.samples));
    Ok(report.finish())
}

fn run_commutant(s: &Scenario) -> Result<Report> {
    let p: CommutantParams = typed(s.kind, &s.params)?;
    let sys = AtSystem::new(p.n_cyc, p.r0, p.schedule)?;
    if p.n + 2 > sys.schedule.len() {
        return Err(param("the schedule must cover stages n and n+1"));
    }
    let mut report = Report::new(s.kind, s.params.clone());
    commutant_checks(&sys, p.n, &mut report)?;
    let (commutant, ranks, _) = sys.two_step_commutant(p.n)?;
    let c = trace::ProjectionClass::new(commutant.algebra.clone(), ranks)?;
    report.flag("majorization", trace::comparison_le(&c.complement(), &c)?);
    Ok(report.finish())
}

fn random_laurent(rng: &mut ChaCha8Rng) -> LaurentPoly {
    let terms = rng.gen_range(1..=5);
    (0..terms)
        .map(|_| LaurentPoly::monomial(rng.gen_range(-4..=4), rng.gen_range(-3i64..=3)))
        .fold(LaurentPoly::zero(), |a, b| a + b)
}

fn run_rep_ring(s: &Scenario) -> Result<Report> {
    let p: RepRingParams = typed(s.kind, &s.params)?;
    let mut report = Report::new(s.kind, s.params.clone());
    match p.mode {
        SweepMode::Injectivity => {
            let (Some(n), Some(l)) = (p.n_cyc, p.l) else {
                return Err(Error::Schema("injectivity mode needs N and l".into()));
            };
            let (inj, aug_inj, expected) = injectivity_row(&l, n)?;
            report.flag("criterion_matches", inj == expected && aug_inj == expected);
            report.data.insert("injective".into(), Value::from(inj));
            report.data.insert("criterion".into(), Value::from(expected));
            return Ok(report.finish());
        }
        SweepMode::Mao => {
            let Some(n) = p.n_cyc else { return Err(Error::Schema("mao mode needs N".into())) };
            let m = RModule::at_stage(n).mao()?;
            report.flag("mao_equals_N", m == Order::Finite(n));
            report.data.insert("mao".into(), Value::from(m.to_string()));
            return Ok(report.finish());
        }
        SweepMode::Full => {}
    }

    let mut grid = Vec::new();
    for &n in &p.n_values {
        for a in 1..=p.l_max {
            for b in 1..=p.l_max {
                for c in 1..=p.l_max {
                    for d in 1..=p.l_max {
                        grid.push((n, LParams::new(a, b, c, d)));
                    }
                }
            }
        }
    }
    let rows = grid.par_iter().map(|(n, l)| injectivity_row(l, *n)).collect::<Result<Vec<_>>>()?;
    let agree = rows.iter().filter(|(i, a, e)| i == e && a == e).count();
    report.flag("injectivity_criterion", agree == rows.len());
    report.data.insert("injectivity_cases".into(), Value::from(rows.len()));
    report.data.insert("injectivity_noninjective".into(), Value::from(rows.iter().filter(|r| !r.0).count()));

    let mao_col: Vec<String> = (2..=p.mao_max).map(|n| RModule::at_stage(n).mao().map(|m| m.to_string())).collect::<Result<_>>()?;
    report.flag("mao_column_equals_N", mao_col.iter().zip(2..).all(|(m, n)| *m == n.to_string()));
    let mut distinct = true;
    for a in 2..=p.mao_max {
        for b in 2..=p.mao_max {
            distinct &= rep_ring::compare_actions_by_mao(a, b)? == (a != b);
        }
    }
    report.flag("mao_distinguishes_pairs", distinct);
    report.data.insert("mao".into(), Value::from(mao_col));

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut stab = true;
    let mut divis = true;
    for _ in 0..p.random_samples {
        let x = random_laurent(&mut rng);
        let n = rng.gen_range(2..=4u64);
        stab &= rep_ring::stab_equiv_check(&x, n, 5);
        let lhs = rep_ring::cyclotomic_divisibility(&x, n);
        divis &= lhs == rep_ring::in_cyclic_ideal(&(LaurentPoly::augmentation_power(1) * x), n);
    }
    report.flag("stabilization_equivalence", stab);
    report.flag("cyclotomic_divisibility_matches_ideal", divis);

    let torsion = (2..=6).all(|n| rep_ring::torsion_kernel_stabilization(&RModule::at_stage(n), 5));
    report.flag("torsion_kernel_stabilization", torsion);

    let mut quotients = Vec::new();
    let mut quotient_ok = true;
    for n in 1..=6 {
        let g = rep_ring::quotient_mod_in(&RModule::ring_power(1), n)?;
        quotient_ok &= g.free_rank == n as usize && g.torsion.is_empty();
        quotients.push(g.to_string());
    }
    report.flag("ring_quotient_free", quotient_ok);
    report.data.insert("ring_quotients".into(), Value::from(quotients));

    let mut ring_zero = true;
    for k in 1..=3 {
        for n in 2..=4 {
            ring_zero &= rep_ring::stable_sigma_fixed(&RModule::ring_power(k), n)?.is_zero();
        }
    }
    report.flag("stable_fixed_zero_on_ring_powers", ring_zero);
    let mut cyclic_nonzero = true;
    for nc in 2..=6 {
        let m = RModule::new(vec![Summand::Cyclic(nc), Summand::Ring])?;
        for n in 2..=4 {
            cyclic_nonzero &= !rep_ring::stable_sigma_fixed(&m, n)?.is_zero();
        }
    }
    report.flag("stable_fixed_nonzero_with_cyclic", cyclic_nonzero);
    report.data.insert("k1".into(), Value::from(0));
    report.notes.push("completions are represented by the truncations M/I^n M for n <= 6".into());
    Ok(report.finish())
}

/// One sweep row: the grid point and the row's result or error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub data: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: String,
    pub grid: BTreeMap<String, Vec<Value>>,
    pub rows: Vec<SweepRow>,
    pub pass: bool,
}

/// Runs the template once per point of the cartesian product of `grid`,
/// keys in sorted order. A grid with no keys, or with an empty value list,
/// has no points.
pub fn sweep(template: &Scenario, grid: &BTreeMap<String, Vec<Value>>) -> SweepReport {
    let keys: Vec<&String> = grid.keys().collect();
    let mut points: Vec<BTreeMap<String, Value>> = Vec::new();
    if !keys.is_empty() && grid.values().all(|v| !v.is_empty()) {
        points.push(BTreeMap::new());
        for k in &keys {
            points = points
                .into_iter()
                .flat_map(|p| {
                    grid[*k].iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert((*k).clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
    }
    let rows: Vec<SweepRow> = points
        .into_par_iter()
        .map(|point| {
            let mut s = template.clone();
            for (k, v) in &point {
                s.params.insert(k.clone(), v.clone());
            }
            match run(&s) {
                Ok(r) => SweepRow {
                    point,
                    pass: Some(r.pass),
                    failed: r.failed().into_iter().map(String::from).collect(),
                    data: r.data,
                    error: None,
                },
                Err(e) => SweepRow { point, pass: None, failed: Vec::new(), data: BTreeMap::new(), error: Some(e.to_string()) },
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass == Some(true));
    SweepReport { scenario: template.kind.name().into(), grid: grid.clone(), rows, pass }
}

/// Built-in grids: `injectivity` (l in [1,5]^4, N in {2,3,4}) and `mao`
/// (N in 2..=6), both over `rep_ring_sweep` rows.
pub fn builtin_grid(name: &str) -> Result<(Scenario, BTreeMap<String, Vec<Value>>)> {
    match name {
        "injectivity" => {
            let mut ls = Vec::new();
            for a in 1..=5u64 {
                for b in 1..=5u64 {
                    for c in 1..=5u64 {
                        for d in 1..=5u64 {
                            ls.push(json!({"l00": a, "l01": b, "l10": c, "l11": d}));
                        }
                    }
                }
            }
            let template = Scenario::new(ScenarioKind::RepRingSweep, obj(json!({"mode": "injectivity"})));
            Ok((template, BTreeMap::from([("N".into(), vec![json!(2), json!(3), json!(4)]), ("l".into(), ls)])))
        }
        "mao" => {
            let template = Scenario::new(ScenarioKind::RepRingSweep, obj(json!({"mode": "mao"})));
            Ok((template, BTreeMap::from([("N".into(), (2..=6).map(Value::from).collect())])))
        }
        other => Err(Error::Schema(format!("unknown grid {other:?}; expected injectivity or mao"))),
    }
}

/// Fixed-point data for `w_k` and its embedding into `w_k ⊗ w_{k+1}`, with
/// the closed-form multiplicities.
pub fn fixed_point_report(k: u32) -> Result<Report> {
    let a = w_unitary_spec(k)?;
    let b = w_unitary_spec(k + 1)?;
    let m = fixed_embedding_multiplicities(&a, &b)?;
    let ab = tensor_actions(&a, &b)?;
    let mut params = BTreeMap::new();
    params.insert("k".into(), Value::from(k));
    let mut report = Report::new(ScenarioKind::UhfZ2, params);
    report.scenario = "fixed_point".into();
    let r1 = r_of(k + 1);
    let expected = [[&r1 + 1u32, r1.clone()], [r1.clone(), &r1 + 1u32]];
    let closed = (0..2).all(|i| (0..2).all(|j| m.entry(i, j) == &expected[i][j]));
    report.flag("closed_form_multiplicities", closed);
    report.flag("codomain_from_eigenvalues", m.dst() == &fixed_algebra(&ab));
    let to_strings = |v: Vec<BigUint>| Value::from(v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
    report.data.insert("spec".into(), serde_json::to_value(&a).expect("plain data"));
    report.data.insert("fixed_algebra".into(), to_strings(fixed_algebra(&a).sizes()));
    report.data.insert("codomain".into(), to_strings(m.dst().sizes()));
    report.data.insert(
        "multiplicities".into(),
        Value::from(m.entries().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
    );
    Ok(report.finish())
}

/// Invariants of a module at truncation level `n`.
pub fn kmodule_report(module: &RModule, n: u32) -> Result<Report> {
    let mut params = BTreeMap::new();
    params.insert("module".into(), serde_json::to_value(module).expect("plain data"));
    params.insert("n".into(), Value::from(n));
    let mut report = Report::new(ScenarioKind::RepRingSweep, params);
    report.scenario = "kmodule".into();
    let q = rep_ring::quotient_mod_in(module, n)?;
    report.data.insert("quotient".into(), Value::from(q.to_string()));
    report.data.insert(
        "quotient_invariant_factors".into(),
        Value::from(q.invariant_factors().iter().map(|v| v.to_string()).collect::<Vec<_>>()),
    );
    if n >= 2 {
        let s = rep_ring::stable_sigma_fixed(module, n)?;
        report.data.insert("stable_sigma_fixed".into(), Value::from(s.group.to_string()));
    }
    report.flag("torsion_kernel_stabilization", rep_ring::torsion_kernel_stabilization(module, n.max(2)));
    if !module.is_zero() {
        report.data.insert("mao".into(), Value::from(module.mao()?.to_string()));
    }
    report.data.insert("k1".into(), Value::from(0));
    report.notes.push(format!("truncation level {n}"));
    Ok(report.finish())
}
