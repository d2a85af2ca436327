//! Tracial states on multimatrix algebras and finite-stage Rokhlin
//! certificates.
//!
//! A tracial state is a weight vector on the blocks; a projection is known
//! up to unitary equivalence by its blockwise ranks. Certificates only pass
//! on exact rational inequalities.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fixed_point::{fixed_algebra, fixed_embedding_multiplicities, r_of, w_unitary_spec};
use crate::serde_num::{self, rational_to_string};
use crate::system::{AtSystem, BlockAlgebra, MultiplicityMap};

fn ratio(a: &BigUint, b: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(a.clone()), BigInt::from(b.clone()))
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTrace")]
pub struct TraceVector {
    #[serde(with = "serde_num::rational_vec")]
    weights: Vec<BigRational>,
}

#[derive(Deserialize)]
struct RawTrace {
    #[serde(with = "serde_num::rational_vec")]
    weights: Vec<BigRational>,
}

impl TryFrom<RawTrace> for TraceVector {
    type Error = Error;
    fn try_from(raw: RawTrace) -> Result<Self> {
        TraceVector::new(raw.weights)
    }
}

impl TraceVector {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidTrace("negative weight".into()));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidTrace(format!("weights sum to {}", rational_to_string(&total))));
        }
        Ok(TraceVector { weights })
    }

    /// The normalized trace of block `j`.
    pub fn vertex(blocks: usize, j: usize) -> Self {
        let weights = (0..blocks).map(|i| if i == j { BigRational::one() } else { BigRational::zero() }).collect();
        TraceVector { weights }
    }

    /// The extreme points of the trace simplex.
    pub fn extreme_traces(algebra: &BlockAlgebra) -> Vec<Self> {
        (0..algebra.len()).map(|j| Self::vertex(algebra.len(), j)).collect()
    }

    /// The trace pulled back along a unital map into a full matrix algebra:
    /// block `k` gets weight `m_k size_k / n`.
    pub fn from_embedding(map: &MultiplicityMap) -> Result<Self> {
        if map.dst().len() != 1 {
            return Err(Error::InvalidTrace("pull-back needs a single destination block".into()));
        }
        let n = map.dst().size(0);
        let weights = map.src().sizes().iter().zip(&map.entries()[0]).map(|(s, m)| ratio(&(s * m), n)).collect();
        Self::new(weights)
    }

    /// The unique trace of the ambient full matrix algebra restricted to a
    /// subalgebra embedded with multiplicity one: weights `size_k / Σ size`.
    pub fn proportional(algebra: &BlockAlgebra) -> Self {
        let total: BigUint = algebra.sizes().iter().sum();
        TraceVector { weights: algebra.sizes().iter().map(|s| ratio(s, &total)).collect() }
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Product trace on the tensor product, lexicographic block order.
    pub fn tensor(&self, other: &TraceVector) -> TraceVector {
        let weights = self.weights.iter().flat_map(|a| other.weights.iter().map(move |b| a * b)).collect();
        TraceVector { weights }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProjection")]
pub struct ProjectionClass {
    algebra: BlockAlgebra,
    #[serde(with = "serde_num::biguint_vec")]
    ranks: Vec<BigUint>,
}

#[derive(Deserialize)]
struct RawProjection {
    algebra: BlockAlgebra,
    #[serde(with = "serde_num::biguint_vec")]
    ranks: Vec<BigUint>,
}

impl TryFrom<RawProjection> for ProjectionClass {
    type Error = Error;
    fn try_from(raw: RawProjection) -> Result<Self> {
        ProjectionClass::new(raw.algebra, raw.ranks)
    }
}

impl ProjectionClass {
    pub fn new(algebra: BlockAlgebra, ranks: Vec<BigUint>) -> Result<Self> {
        if ranks.len() != algebra.len() {
            return Err(Error::ShapeMismatch(format!("{} ranks for {} blocks", ranks.len(), algebra.len())));
        }
        if let Some(j) = ranks.iter().zip(algebra.blocks()).position(|(r, b)| r > &b.size) {
            return Err(Error::InvalidProjection(format!("rank exceeds size in block {j}")));
        }
        Ok(ProjectionClass { algebra, ranks })
    }

    pub fn from_u64(algebra: BlockAlgebra, ranks: &[u64]) -> Result<Self> {
        Self::new(algebra, ranks.iter().map(|&r| BigUint::from(r)).collect())
    }

    pub fn zero(algebra: &BlockAlgebra) -> Self {
        ProjectionClass { algebra: algebra.clone(), ranks: vec![BigUint::zero(); algebra.len()] }
    }

    pub fn one(algebra: &BlockAlgebra) -> Self {
        ProjectionClass { algebra: algebra.clone(), ranks: algebra.sizes() }
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn ranks(&self) -> &[BigUint] {
        &self.ranks
    }

    pub fn complement(&self) -> Self {
        let ranks = self.algebra.sizes().into_iter().zip(&self.ranks).map(|(s, r)| s - r).collect();
        ProjectionClass { algebra: self.algebra.clone(), ranks }
    }

    /// Image under a unital map.
    pub fn push(&self, map: &MultiplicityMap) -> Result<Self> {
        if map.src() != &self.algebra {
            return Err(Error::ShapeMismatch("projection does not live in the map's source".into()));
        }
        Self::new(map.dst().clone(), map.push_ranks(&self.ranks)?)
    }

    /// `p ⊗ q`, lexicographic block order.
    pub fn tensor(&self, other: &ProjectionClass) -> Result<Self> {
        let algebra = self.algebra.tensor(&other.algebra)?;
        let ranks = self.ranks.iter().flat_map(|a| other.ranks.iter().map(move |b| a * b)).collect();
        Self::new(algebra, ranks)
    }

    /// Sum of orthogonal projections, at the level of ranks.
    pub fn sum(&self, other: &ProjectionClass) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::ShapeMismatch("projections live in different algebras".into()));
        }
        Self::new(self.algebra.clone(), self.ranks.iter().zip(&other.ranks).map(|(a, b)| a + b).collect())
    }
}

pub fn trace_of(p: &ProjectionClass, t: &TraceVector) -> Result<BigRational> {
    if t.weights.len() != p.ranks.len() {
        return Err(Error::ShapeMismatch(format!("trace on {} blocks, projection on {}", t.weights.len(), p.ranks.len())));
    }
    Ok(t.weights
        .iter()
        .zip(&p.ranks)
        .zip(p.algebra.blocks())
        .map(|((w, k), b)| w * ratio(k, &b.size))
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceBound {
    #[serde(with = "serde_num::rational")]
    pub lhs: BigRational,
    #[serde(with = "serde_num::rational")]
    pub rhs: BigRational,
    pub holds: bool,
}

/// `1 - ∏ λ_m` against `Σ (1 - λ_m)` for `λ_m = τ_m(e_m)`.
pub fn tensor_trace_bound(lambdas: &[BigRational]) -> Result<TraceBound> {
    let one = BigRational::one();
    if let Some(bad) = lambdas.iter().find(|l| l.is_negative() || *l > &one) {
        return Err(Error::InvalidParameter(format!("λ = {} is outside [0, 1]", rational_to_string(bad))));
    }
    let product: BigRational = lambdas.iter().fold(one.clone(), |acc, l| acc * l);
    let lhs = &one - product;
    let rhs: BigRational = lambdas.iter().map(|l| &one - l).sum();
    let holds = lhs <= rhs;
    Ok(TraceBound { lhs, rhs, holds })
}

/// Blockwise rank comparison; Murray-von Neumann subequivalence in a
/// multimatrix algebra.
pub fn comparison_le(p: &ProjectionClass, q: &ProjectionClass) -> Result<bool> {
    if p.algebra != q.algebra {
        return Err(Error::ShapeMismatch("projections live in different algebras".into()));
    }
    Ok(p.ranks.iter().zip(&q.ranks).all(|(a, b)| a <= b))
}

pub fn strict_comparison_gap(p: &ProjectionClass, bound: &BigRational, traces: &[TraceVector]) -> Result<bool> {
    if traces.is_empty() {
        return Err(Error::InvalidTrace("no traces given".into()));
    }
    for t in traces {
        if &trace_of(p, t)? >= bound {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

/// One named exact inequality `lhs rel rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "serde_num::rational")]
    pub lhs: BigRational,
    pub relation: Relation,
    #[serde(with = "serde_num::rational")]
    pub rhs: BigRational,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: BigRational, relation: Relation, rhs: BigRational) -> Self {
        let pass = match relation {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
        };
        Check { name: name.into(), lhs, relation, rhs, pass }
    }

    pub fn lt(name: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        Self::new(name, lhs, Relation::Lt, rhs)
    }

    pub fn le(name: impl Into<String>, lhs: BigRational, rhs: BigRational) -> Self {
        Self::new(name, lhs, Relation::Le, rhs)
    }

    /// A boolean fact recorded as `0 <= 0` or `1 <= 0`.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::le(name, if ok { BigRational::zero() } else { BigRational::one() }, BigRational::zero())
    }
}

/// A finite-stage tower: mutually orthogonal projections summing to `p`,
/// with the trace used to measure the defect `τ(1 - p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RokhlinCertificate {
    pub stage: usize,
    pub p: ProjectionClass,
    pub tower: Vec<ProjectionClass>,
    pub trace: TraceVector,
    #[serde(with = "serde_num::rational")]
    pub delta1: BigRational,
    #[serde(with = "serde_num::rational")]
    pub delta2: BigRational,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub eps0: Option<BigRational>,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&rational_to_string(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigRational>, D::Error> {
        use serde::de::Error as _;
        match Option::<Value>::deserialize(d)? {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_num::rational_from_json(&v).map(Some).map_err(D::Error::custom),
        }
    }
}

impl RokhlinCertificate {
    pub fn new(
        stage: usize,
        p: ProjectionClass,
        tower: Vec<ProjectionClass>,
        trace: TraceVector,
        delta1: BigRational,
        delta2: BigRational,
    ) -> Result<Self> {
        if tower.is_empty() {
            return Err(Error::InvalidCertificate("empty tower".into()));
        }
        let mut total = ProjectionClass::zero(p.algebra());
        for e in &tower {
            total = total.sum(e).map_err(|e| Error::InvalidCertificate(e.to_string()))?;
        }
        if total != p {
            return Err(Error::InvalidCertificate("tower does not sum to p".into()));
        }
        if trace.weights().len() != p.algebra().len() {
            return Err(Error::InvalidCertificate("trace does not match the algebra".into()));
        }
        if !delta1.is_positive() || !delta2.is_positive() {
            return Err(Error::InvalidCertificate("δ1 and δ2 must be positive".into()));
        }
        Ok(RokhlinCertificate { stage, p, tower, trace, delta1, delta2, eps0: None })
    }

    /// `τ(1 - p)`.
    pub fn defect(&self) -> BigRational {
        trace_of(&self.p.complement(), &self.trace).expect("validated shapes")
    }
}

/// Combine two towers by `t_{g,h} = p_g ⊗ q_h`. The second element of the
/// result checks `τ(1 - p ⊗ q) <= τ(1 - p) + τ(1 - q)`.
pub fn tensor_certificates(c1: &RokhlinCertificate, c2: &RokhlinCertificate) -> Result<(RokhlinCertificate, Check)> {
    let p = c1.p.tensor(&c2.p)?;
    let tower = c1
        .tower
        .iter()
        .flat_map(|a| c2.tower.iter().map(move |b| a.tensor(b)))
        .collect::<Result<Vec<_>>>()?;
    let trace = c1.trace.tensor(&c2.trace);
    let mut cert = RokhlinCertificate::new(
        c1.stage.max(c2.stage),
        p,
        tower,
        trace,
        c1.delta1.clone().min(c2.delta1.clone()),
        c1.delta2.clone().min(c2.delta2.clone()),
    )?;
    cert.eps0 = match (&c1.eps0, &c2.eps0) {
        (Some(a), Some(b)) => Some(a.clone().min(b.clone())),
        (a, b) => a.clone().or_else(|| b.clone()),
    };
    let check = Check::le("tensor_defect", cert.defect(), c1.defect() + c2.defect());
    Ok((cert, check))
}

/// Outcome of a certification run. `pass` is the conjunction of all checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub scenario: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<RokhlinCertificate>,
    pub pass: bool,
}

impl CertificateReport {
    pub fn new(scenario: &str, params: BTreeMap<String, Value>, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        CertificateReport { scenario: scenario.into(), params, checks, notes: Vec::new(), certificate: None, pass }
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn three_pow(k: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(3u32).pow(k))
}

fn digits(j: usize, n: usize) -> String {
    (0..n).map(|m| if (j >> (n - 1 - m)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Tower for `N` tensor factors of the product-type `Z_2` action at level
/// `L`, with all checks of the finite-stage argument.
///
/// At `k = L + 1` the fixed-point algebra of `Ad(w_k)` is
/// `M_{r+1} ⊕ M_r` (exponent 0 first). The two tower projections sit in
/// the swapped coordinate blocks; their sum `p_0` has ranks `(r, r)` and
/// `1 - p_0` is the fixed coordinate, rank `(1, 0)`.
pub fn certify_uhf_stage(n_factors: usize, level: u32, delta1: &BigRational, delta2: &BigRational) -> Result<CertificateReport> {
    if n_factors == 0 || n_factors > 12 {
        return Err(Error::InvalidParameter("the number of tensor factors must be in 1..=12".into()));
    }
    if !delta1.is_positive() || !delta2.is_positive() {
        return Err(Error::InvalidParameter("δ1 and δ2 must be positive".into()));
    }
    let k = level + 1;
    let nf = n_factors as u64;
    let r = r_of(k);
    let wk = w_unitary_spec(k)?;
    let f = fixed_algebra(&wk);
    let e0 = ProjectionClass::new(f.clone(), vec![r.clone(), BigUint::zero()])?;
    let e1 = ProjectionClass::new(f.clone(), vec![BigUint::zero(), r.clone()])?;
    let p0 = e0.sum(&e1)?;
    let tau_f = TraceVector::proportional(&f);

    let mut p = p0.clone();
    let mut tower = vec![e0.clone(), e1.clone()];
    let mut tau = tau_f.clone();
    for _ in 1..n_factors {
        p = p.tensor(&p0)?;
        tower = tower
            .iter()
            .flat_map(|t| [t.tensor(&e0), t.tensor(&e1)])
            .collect::<Result<Vec<_>>>()?;
        tau = tau.tensor(&tau_f);
    }
    let cert = RokhlinCertificate::new(k as usize, p.clone(), tower, tau, delta1.clone(), delta2.clone())?;

    let inv3k = three_pow(k).recip();
    let n_bound = int(nf) * &inv3k;
    let two_n_bound = int(2 * nf) * &inv3k;
    let half = BigRational::new(1.into(), 2.into());
    let mut checks = Vec::new();

    let min_delta = delta1.clone().min(delta2.clone()).min(half.clone());
    checks.push(Check::lt("precondition", int(2 * nf) / three_pow(level), min_delta));

    let lam = trace_of(&p0, &tau_f)?;
    let bound = tensor_trace_bound(&vec![lam; n_factors])?;
    checks.push(Check::le("trace_defect_direct_vs_bound", cert.defect(), bound.lhs.clone()));
    checks.push(Check::le("trace_defect", bound.lhs.clone(), bound.rhs.clone()));
    checks.push(Check::le("trace_defect_closed_form", bound.rhs.clone(), n_bound.clone()));
    checks.push(Check::lt("trace_defect_delta1", n_bound, delta1.clone()));

    // One step up: x ↦ x ⊗ 1 into the fixed-point algebra of w_k ⊗ w_{k+1}.
    let wk1 = w_unitary_spec(k + 1)?;
    let rho = fixed_embedding_multiplicities(&wk, &wk1)?;
    let d_single = p0.push(&rho)?;
    let defect_single = d_single.complement();
    let two_inv = int(2) * &inv3k;
    let codomain = rho.dst().clone();
    for (j, (rank, size)) in defect_single.ranks().iter().zip(codomain.sizes()).enumerate() {
        checks.push(Check::lt(format!("normalized_defect[{j}]"), ratio(rank, &size), two_inv.clone()));
    }

    let mut d = d_single.clone();
    for _ in 1..n_factors {
        d = d.tensor(&d_single)?;
    }
    let e_traces = TraceVector::extreme_traces(d.algebra());
    let one_minus_d = d.complement();
    for (j, t) in e_traces.iter().enumerate() {
        let label = digits(j, n_factors);
        let ntr = trace_of(&one_minus_d, t)?;
        let single: Vec<BigRational> = label
            .chars()
            .map(|c| {
                let b = if c == '1' { 1 } else { 0 };
                BigRational::one() - ratio(&defect_single.ranks()[b], codomain.size(b))
            })
            .collect();
        let tb = tensor_trace_bound(&single)?;
        checks.push(Check::le(format!("commutant_defect_bound[{label}]"), ntr.clone(), tb.rhs));
        checks.push(Check::lt(format!("commutant_defect[{label}]"), ntr, two_n_bound.clone()));
    }
    checks.push(Check::flag("majorization", comparison_le(&one_minus_d, &d)?));
    for (j, (a, b)) in one_minus_d.ranks().iter().zip(d.ranks()).enumerate() {
        let label = digits(j, n_factors);
        checks.push(Check::le(format!("majorization[{label}]"), ratio(a, &BigUint::one()), ratio(b, &BigUint::one())));
    }
    checks.push(Check::lt("half_bound", two_n_bound.clone(), half));
    checks.push(Check::lt("strict_comparison_bound", two_n_bound.clone(), delta2.clone()));
    checks.push(Check::flag("strict_comparison_delta2", strict_comparison_gap(&one_minus_d, delta2, &e_traces)?));

    let mut params = BTreeMap::new();
    params.insert("n_factors".into(), Value::from(nf));
    params.insert("L".into(), Value::from(level));
    params.insert("delta1".into(), Value::from(rational_to_string(delta1)));
    params.insert("delta2".into(), Value::from(rational_to_string(delta2)));
    params.insert("codomain_exponent".into(), Value::from(2 * k + 1));
    params.insert("closed_form_index".into(), Value::from(u64::from(k) * u64::from(k + 1)));
    params.insert(
        "codomain_sizes".into(),
        Value::from(codomain.sizes().iter().map(|s| s.to_string()).collect::<Vec<_>>()),
    );
    let mut report = CertificateReport::new("uhf", params, checks);
    report.notes.push(format!(
        "codomain blocks come from the eigenvalue data of w_{k} ⊗ w_{k1}: sizes r({e})+1 and r({e}); the closed-form index {c} is not used",
        k1 = k + 1,
        e = 2 * k + 1,
        c = u64::from(k) * u64::from(k + 1),
    ));
    report.notes.push("the norm condition ||pxp|| > 1 - ε is operator-theoretic and not part of this certificate".into());
    report.notes.push("δ1 and δ2 are supplied by the caller".into());
    report.certificate = Some(cert);
    Ok(report)
}

fn l_ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Trace of `1 - χ_n(q_n)` at each vertex of the trace simplex of
/// `B_{n+1}`, against `max(l00/l01, l10/l11)`.
pub fn at_trace_bound_checks(sys: &AtSystem, n: usize) -> Result<Vec<Check>> {
    let l = sys.l(n)?;
    let chi = sys.fixed_point_map(n)?;
    let bn = chi.src().clone();
    let q = {
        let mut ranks = vec![BigUint::zero(); bn.len()];
        ranks[sys.q_block()] = bn.size(sys.q_block()).clone();
        ProjectionClass::new(bn.clone(), ranks)?
    };
    let image = q.complement().push(&chi)?;
    let bound = l_ratio(l.l00, l.l01).max(l_ratio(l.l10, l.l11));
    TraceVector::extreme_traces(chi.dst())
        .iter()
        .enumerate()
        .map(|(v, t)| Ok(Check::le(format!("trace_bound[n={n},vertex={v}]"), trace_of(&image, t)?, bound.clone())))
        .collect()
}

/// Finite-stage checks for the circle action on the AT system at stage `n`.
pub fn certify_at_stage(sys: &AtSystem, n: usize, eps0: &BigRational) -> Result<CertificateReport> {
    if !eps0.is_positive() {
        return Err(Error::InvalidParameter("ε0 must be positive".into()));
    }
    if n + 2 > sys.schedule.len() {
        return Err(Error::InvalidParameter(format!(
            "stage {n} needs parameters through stage {}, have {}",
            n + 1,
            sys.schedule.len()
        )));
    }
    let l = sys.l(n)?;
    let mut checks = Vec::new();
    for m in [n, n + 1] {
        let [r0, r1] = sys.dims(m)?;
        checks.push(Check::le(format!("dims_ordered[n={m}]"), ratio(&r0, &BigUint::one()), ratio(&r1, &BigUint::one())));
    }
    checks.extend(at_trace_bound_checks(sys, n)?);

    let min_ratio = l_ratio(l.l01, l.l00).min(l_ratio(l.l11, l.l10));
    checks.push(Check::lt("stage_selection", eps0.recip(), min_ratio));
    let bound = l_ratio(l.l00, l.l01).max(l_ratio(l.l10, l.l11));
    checks.push(Check::lt("trace_bound_eps0", bound, eps0.clone()));

    let (commutant, q_ranks, families) = sys.two_step_commutant(n)?;
    let c_alg = commutant.algebra.clone();
    let q = ProjectionClass::new(c_alg.clone(), q_ranks)?;
    let complement = q.complement();
    checks.push(Check::flag("commutant_majorization", comparison_le(&complement, &q)?));
    for f in &families {
        let member = commutant.groups.iter().position(|g| sys.family_of(g) == f.family).expect("family is present");
        checks.push(Check::le(
            format!("commutant_majorization[{:?}]", f.family),
            ratio(&complement.ranks()[member], &BigUint::one()),
            ratio(&q.ranks()[member], &BigUint::one()),
        ));
    }

    let mut params = BTreeMap::new();
    params.insert("N".into(), Value::from(sys.n_cyc));
    params.insert("n".into(), Value::from(n));
    params.insert("eps0".into(), Value::from(rational_to_string(eps0)));
    params.insert("l".into(), serde_json::to_value(l).expect("plain struct"));
    params.insert("families".into(), serde_json::to_value(&families).expect("plain struct"));
    let mut report = CertificateReport::new("at_circle", params, checks);
    report.notes.push("traces are checked at the vertices of the trace simplex; the bounds are linear in the trace".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::serde_num::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn trace_of_examples() {
        let b = BlockAlgebra::matrices(&[4u32, 5]).unwrap();
        let t = TraceVector::new(vec![q("1/2"), q("1/2")]).unwrap();
        let p = ProjectionClass::from_u64(b.clone(), &[1, 2]).unwrap();
        assert_eq!(trace_of(&p, &t).unwrap(), q("13/40"));
        assert_eq!(trace_of(&ProjectionClass::one(&b), &t).unwrap(), q("1"));
        assert_eq!(trace_of(&ProjectionClass::zero(&b), &t).unwrap(), q("0"));
        assert!(TraceVector::new(vec![q("1/2")]).is_err());
        assert!(TraceVector::new(vec![q("3/2"), q("-1/2")]).is_err());
    }

    #[test]
    fn tensor_bound_examples() {
        let b = tensor_trace_bound(&[q("9/10"), q("4/5")]).unwrap();
        assert_eq!((b.lhs, b.rhs, b.holds), (q("7/25"), q("3/10"), true));
        let b = tensor_trace_bound(&[q("1"), q("1"), q("1")]).unwrap();
        assert_eq!((b.lhs, b.rhs), (q("0"), q("0")));
        assert!(tensor_trace_bound(&[q("11/10")]).is_err());
    }

    #[test]
    fn comparison_examples() {
        let b = BlockAlgebra::matrices(&[2u32, 2]).unwrap();
        let p = ProjectionClass::from_u64(b.clone(), &[1, 0]).unwrap();
        let r = ProjectionClass::from_u64(b.clone(), &[0, 1]).unwrap();
        assert!(comparison_le(&p, &p).unwrap());
        assert!(!comparison_le(&p, &r).unwrap());
        assert!(ProjectionClass::from_u64(b, &[3, 0]).is_err());
    }

    #[test]
    fn strict_gap_examples() {
        let b = BlockAlgebra::matrices(&[3u32]).unwrap();
        let p = ProjectionClass::from_u64(b.clone(), &[2]).unwrap();
        let t = TraceVector::extreme_traces(&b);
        assert!(strict_comparison_gap(&p, &q("1"), &t).unwrap());
        assert!(!strict_comparison_gap(&p, &q("0"), &t).unwrap());
        assert!(!strict_comparison_gap(&ProjectionClass::zero(&b), &q("0"), &t).unwrap());
        assert!(strict_comparison_gap(&p, &q("1"), &[]).is_err());
    }

    #[test]
    fn uhf_single_factor() {
        let rep = certify_uhf_stage(1, 3, &q("1/2"), &q("1/2")).unwrap();
        assert!(rep.pass, "{:?}", rep.failed());
        assert_eq!(rep.certificate.unwrap().defect(), q("1/81"));
    }

    #[test]
    fn uhf_precondition_failure() {
        let rep = certify_uhf_stage(2, 1, &q("1/10"), &q("1/10")).unwrap();
        assert!(!rep.pass);
        assert!(rep.failed().contains(&"precondition"));
    }

    #[test]
    fn tensor_of_trivial_tower_keeps_defect() {
        let c1 = certify_uhf_stage(1, 3, &q("1/2"), &q("1/2")).unwrap().certificate.unwrap();
        let b = BlockAlgebra::matrices(&[1u32]).unwrap();
        let one = ProjectionClass::one(&b);
        let c2 = RokhlinCertificate::new(0, one.clone(), vec![one], TraceVector::vertex(1, 0), q("1"), q("1")).unwrap();
        let (c, check) = tensor_certificates(&c1, &c2).unwrap();
        assert_eq!(c.defect(), c1.defect());
        assert_eq!(c.tower.len(), 2);
        assert!(check.pass);
    }

    #[test]
    fn at_stage_odd_growth() {
        let sys = AtSystem::example_odd_growth(2, 7);
        let rep = certify_at_stage(&sys, 3, &q("1/4")).unwrap();
        assert!(rep.pass, "{:?}", rep.failed());
        let c = rep.checks.iter().find(|c| c.name.starts_with("trace_bound[")).unwrap();
        assert_eq!(c.rhs, q("1/7"));
    }

    #[test]
    fn at_stage_all_ones() {
        let sys = crate::system::AtSystem::new(2, [1, 1], vec![crate::system::LParams::uniform(1); 3]).unwrap();
        let checks = at_trace_bound_checks(&sys, 0).unwrap();
        assert!(checks.iter().all(|c| c.pass && c.rhs == q("1")));
    }
}
