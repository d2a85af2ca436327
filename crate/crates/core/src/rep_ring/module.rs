use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::laurent::LaurentPoly;
use crate::error::{param, Error, Result};
use crate::linalg::{kernel_basis, AbelianGroup, IntMatrix, Lattice};
use crate::system::LParams;

/// A cyclic piece of a standard-form module over `Z[σ, σ^{-1}]`.
///
/// `Cyclic(n)` is `Z[σ]/⟨σ^n - 1⟩`, `Free` is `Z` with `σ = 1`, and `Ring`
/// is the regular module `Z[σ, σ^{-1}]` itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Summand {
    Cyclic(u64),
    Free,
    Ring,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSummand {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cyclic: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    free: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ring: Option<bool>,
}

impl Serialize for Summand {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = match self {
            Summand::Cyclic(n) => RawSummand { cyclic: Some(*n), free: None, ring: None },
            Summand::Free => RawSummand { cyclic: None, free: Some(true), ring: None },
            Summand::Ring => RawSummand { cyclic: None, free: None, ring: Some(true) },
        };
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Summand {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawSummand::deserialize(d)?;
        match (raw.cyclic, raw.free, raw.ring) {
            (Some(0), None, None) => Err(D::Error::custom("cyclic order must be >= 1")),
            (Some(n), None, None) => Ok(Summand::Cyclic(n)),
            (None, Some(true), None) => Ok(Summand::Free),
            (None, None, Some(true)) => Ok(Summand::Ring),
            _ => Err(D::Error::custom(
                "a summand is exactly one of {\"cyclic\":n}, {\"free\":true}, {\"ring\":true}",
            )),
        }
    }
}

impl Summand {
    /// Period of `σ`, if finite.
    pub fn period(&self) -> Option<u64> {
        match self {
            Summand::Cyclic(n) => Some(*n),
            Summand::Free => Some(1),
            Summand::Ring => None,
        }
    }

    fn normalize(&self, x: &LaurentPoly) -> LaurentPoly {
        match self.period() {
            Some(n) => x.reduce(n),
            None => x.clone(),
        }
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summand::Cyclic(n) => write!(f, "Z[σ]/(σ^{n}-1)"),
            Summand::Free => write!(f, "Z"),
            Summand::Ring => write!(f, "Z[σ,σ^-1]"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RModule {
    pub summands: Vec<Summand>,
}

/// An element of an [`RModule`]: one normalized Laurent polynomial per
/// summand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleElement(pub Vec<LaurentPoly>);

/// Additive order of `σ` on an element or module: a positive integer or
/// infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

impl RModule {
    pub fn new(summands: Vec<Summand>) -> Result<Self> {
        if summands.contains(&Summand::Cyclic(0)) {
            return Err(Error::InvalidModule("cyclic order must be >= 1".into()));
        }
        Ok(RModule { summands })
    }

    /// `Z[σ]/⟨σ^n - 1⟩ ⊕ Z`, the equivariant K_0 of one stage of the AT
    /// system.
    pub fn at_stage(n_cyc: u64) -> Self {
        RModule { summands: vec![Summand::Cyclic(n_cyc), Summand::Free] }
    }

    pub fn ring_power(k: usize) -> Self {
        RModule { summands: vec![Summand::Ring; k] }
    }

    pub fn free_power(k: usize) -> Self {
        RModule { summands: vec![Summand::Free; k] }
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn element(&self, parts: Vec<LaurentPoly>) -> Result<ModuleElement> {
        if parts.len() != self.summands.len() {
            return Err(Error::ShapeMismatch(format!("{} components for {} summands", parts.len(), self.summands.len())));
        }
        Ok(ModuleElement(self.summands.iter().zip(&parts).map(|(s, x)| s.normalize(x)).collect()))
    }

    /// An element from coefficient vectors: `c[0] + c[1] σ + ...` per summand.
    pub fn element_from_coeffs(&self, parts: &[Vec<i64>]) -> Result<ModuleElement> {
        for (s, c) in self.summands.iter().zip(parts) {
            if let Some(n) = s.period() {
                if c.len() as u64 > n {
                    return Err(Error::ShapeMismatch(format!("{} coefficients for a summand of period {n}", c.len())));
                }
            }
        }
        self.element(parts.iter().map(|c| LaurentPoly::from_coeffs(0, c)).collect())
    }

    pub fn act(&self, p: &LaurentPoly, x: &ModuleElement) -> ModuleElement {
        ModuleElement(self.summands.iter().zip(&x.0).map(|(s, c)| s.normalize(&(p * c))).collect())
    }

    /// Largest order of `σ` on any element: the lcm of the periods.
    pub fn mao(&self) -> Result<Order> {
        if self.is_zero() {
            return Err(Error::InvalidModule("the zero module has no nonzero elements".into()));
        }
        let mut acc = 1u64;
        for s in &self.summands {
            match s.period() {
                Some(n) => acc = acc.lcm(&n),
                None => return Ok(Order::Infinite),
            }
        }
        Ok(Order::Finite(acc))
    }
}

impl ModuleElement {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(LaurentPoly::is_zero)
    }
}

/// Least `m >= 1` with `(σ^m - 1) x = 0`.
pub fn ao(module: &RModule, x: &ModuleElement) -> Result<Order> {
    if x.0.len() != module.summands.len() {
        return Err(Error::ShapeMismatch("element does not match module".into()));
    }
    let x = module.element(x.0.clone())?;
    if x.is_zero() {
        return Err(param("ao is undefined on 0"));
    }
    let mut acc = 1u64;
    for (s, c) in module.summands.iter().zip(&x.0) {
        if c.is_zero() {
            continue;
        }
        let Some(n) = s.period() else { return Ok(Order::Infinite) };
        // The m with σ^m c = c form a subgroup containing n; search its divisors.
        let m = (1..=n)
            .filter(|d| n % d == 0)
            .find(|&d| s.normalize(&(&LaurentPoly::sigma_pow_minus_one(d as i64) * c)).is_zero())
            .expect("σ^n acts trivially");
        acc = acc.lcm(&m);
    }
    Ok(Order::Finite(acc))
}

pub fn mao(module: &RModule) -> Result<Order> {
    module.mao()
}

/// `(m_0, ..., m_{N-1}, m) ↦ ((l00 m_k + l01 m)_k, l10 Σ m_k + 2N l11 m)`
/// on `Z^{N+1}`; row `i` is output coordinate `i`.
pub fn phi_connecting_map(l: &LParams, n_cyc: u64) -> Result<IntMatrix> {
    l.validate()?;
    if n_cyc < 2 {
        return Err(param("N must be >= 2"));
    }
    let n = n_cyc as usize;
    let mut m = IntMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        m[(k, k)] = l.l00.into();
        m[(k, n)] = l.l01.into();
        m[(n, k)] = l.l10.into();
    }
    m[(n, n)] = BigInt::from(2 * n_cyc) * l.l11;
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Injectivity {
    pub injective: bool,
    pub kernel: Vec<Vec<BigInt>>,
}

pub fn is_injective(m: &IntMatrix) -> Injectivity {
    let kernel = kernel_basis(m);
    Injectivity { injective: kernel.is_empty(), kernel }
}

/// The induced map on `K_0 / I K_0 ≅ Z ⊕ Z`, coordinates `(Σ m_k, m)`.
pub fn mod_augmentation_map(l: &LParams, n_cyc: u64) -> Result<IntMatrix> {
    l.validate()?;
    if n_cyc < 2 {
        return Err(param("N must be >= 2"));
    }
    Ok(IntMatrix::from_rows(&[
        vec![BigInt::from(l.l00), BigInt::from(n_cyc * l.l01)],
        vec![BigInt::from(l.l10), BigInt::from(2 * n_cyc * l.l11)],
    ]))
}

/// `ι_*: Z[σ]/⟨σ^N - 1⟩ → Z` sends every `σ^k` to 1; `ξ_*: Z → Z[σ]/⟨σ^N - 1⟩`
/// sends 1 to `1 + σ + ... + σ^{N-1}`. Matrices act on coefficient vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiIota {
    pub iota: IntMatrix,
    pub xi: IntMatrix,
}

pub fn xi_iota_maps(n_cyc: u64) -> Result<XiIota> {
    if n_cyc < 2 {
        return Err(param("N must be >= 2"));
    }
    let n = n_cyc as usize;
    Ok(XiIota {
        iota: IntMatrix::from_rows(&[vec![1i64; n]]),
        xi: IntMatrix::from_rows(&vec![vec![1i64]; n]),
    })
}

/// A finite-rank model `(L, T)` of a module truncated at level `k`, with
/// `T` the action of `σ - 1`. Cyclic summands are modelled exactly, `Free`
/// by `T = 0`, and `Ring` by `Z[σ]/⟨(σ - 1)^k⟩` in the basis `(σ - 1)^j`,
/// which agrees with the module modulo `I^k`.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub t: IntMatrix,
    pub offsets: Vec<usize>,
    pub level: usize,
}

impl Truncation {
    pub fn new(module: &RModule, level: usize) -> Self {
        let mut blocks = Vec::new();
        let mut offsets = Vec::new();
        let mut at = 0;
        for s in &module.summands {
            offsets.push(at);
            let block = match s {
                Summand::Cyclic(n) => {
                    let n = *n as usize;
                    let mut t = IntMatrix::zeros(n, n);
                    for j in 0..n {
                        t[((j + 1) % n, j)] += BigInt::one();
                        t[(j, j)] -= BigInt::one();
                    }
                    t
                }
                Summand::Free => IntMatrix::zeros(1, 1),
                Summand::Ring => {
                    let mut t = IntMatrix::zeros(level, level);
                    for j in 0..level.saturating_sub(1) {
                        t[(j + 1, j)] = BigInt::one();
                    }
                    t
                }
            };
            at += block.rows();
            blocks.push(block);
        }
        let t = if blocks.is_empty() { IntMatrix::zeros(0, 0) } else { IntMatrix::block_diag(&blocks) };
        Truncation { t, offsets, level }
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    /// Coordinates of an element in the model.
    pub fn coords(&self, module: &RModule, x: &ModuleElement) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.dim()];
        for ((s, c), &off) in module.summands.iter().zip(&x.0).zip(&self.offsets) {
            match s {
                Summand::Cyclic(n) => {
                    for (j, a) in c.residue_vector(*n).into_iter().enumerate() {
                        v[off + j] = a;
                    }
                }
                Summand::Free => v[off] = c.augmentation(),
                Summand::Ring => {
                    for (j, a) in ring_coords(c, self.level).into_iter().enumerate() {
                        v[off + j] = a;
                    }
                }
            }
        }
        v
    }
}

/// Coordinates of `x` in `Z[σ]/⟨u^k⟩`, `u = σ - 1`, basis `1, u, ..., u^{k-1}`.
fn ring_coords(x: &LaurentPoly, k: usize) -> Vec<BigInt> {
    // σ = 1 + u and σ^{-1} = Σ (-u)^j modulo u^k.
    let mul_trunc = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); k];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                if i + j < k {
                    out[i + j] += ai * bj;
                }
            }
        }
        out
    };
    let mut sigma = vec![BigInt::zero(); k];
    let mut sigma_inv = vec![BigInt::zero(); k];
    if k > 0 {
        sigma[0] = BigInt::one();
        if k > 1 {
            sigma[1] = BigInt::one();
        }
        for (j, s) in sigma_inv.iter_mut().enumerate() {
            *s = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        }
    }
    let mut out = vec![BigInt::zero(); k];
    for (e, c) in x.terms() {
        let mut p = vec![BigInt::zero(); k];
        if k > 0 {
            p[0] = BigInt::one();
        }
        let base = if e >= 0 { &sigma } else { &sigma_inv };
        for _ in 0..e.unsigned_abs() {
            p = mul_trunc(&p, base);
        }
        for (o, v) in out.iter_mut().zip(p) {
            *o += c * v;
        }
    }
    out
}

/// `M / I^n M` as an abelian group.
pub fn quotient_mod_in(module: &RModule, n: u32) -> Result<AbelianGroup> {
    if n < 1 {
        return Err(param("n must be >= 1"));
    }
    let tr = Truncation::new(module, n as usize);
    if tr.dim() == 0 {
        return Ok(AbelianGroup::trivial());
    }
    Ok(AbelianGroup::cokernel(&tr.t.pow(n)))
}

#[derive(Clone, Debug)]
pub struct StableFixed {
    pub group: AbelianGroup,
    pub level: u32,
    /// Kernel of `σ - 1` on `M / I^n M`, lifted to the model.
    pub kernel: Lattice,
    /// `I^{n-1} M` in the model.
    pub image: Lattice,
    pub truncation: Truncation,
}

impl StableFixed {
    pub fn is_zero(&self) -> bool {
        self.group.is_trivial()
    }

    /// Whether `x` is killed by `σ - 1` modulo `I^n` and survives in
    /// `M / I^{n-1} M`.
    pub fn contains_nonzero_class(&self, module: &RModule, x: &ModuleElement) -> bool {
        let v = self.truncation.coords(module, x);
        self.kernel.contains(&v) && !self.image.contains(&v)
    }
}

/// Image in `M / I^{n-1} M` of `{x ∈ M / I^n M : (σ - 1) x = 0}`.
pub fn stable_sigma_fixed(module: &RModule, n: u32) -> Result<StableFixed> {
    if n < 2 {
        return Err(param("n must be >= 2"));
    }
    let tr = Truncation::new(module, n as usize);
    let d = tr.dim();
    if d == 0 {
        return Ok(StableFixed {
            group: AbelianGroup::trivial(),
            level: n,
            kernel: Lattice::zero(0),
            image: Lattice::zero(0),
            truncation: tr,
        });
    }
    let tn = tr.t.pow(n);
    // (x, y) with T x = T^n y.
    let stacked = tr.t.hcat(&tn.neg());
    let xs: Vec<Vec<BigInt>> = kernel_basis(&stacked).into_iter().map(|v| v[..d].to_vec()).collect();
    let kernel = Lattice::span_of(d, &xs);
    let image = Lattice::span(&tr.t.pow(n - 1));
    let total = kernel.sum(&image);
    let group = total.quotient(&image);
    Ok(StableFixed { group, level: n, kernel: total, image, truncation: tr })
}

/// `ker (σ - 1)^n = ker (σ - 1)` for every `2 <= n <= n_max`. `Ring`
/// summands are torsion free and contribute zero kernels.
pub fn torsion_kernel_stabilization(module: &RModule, n_max: u32) -> bool {
    let finite = RModule { summands: module.summands.iter().copied().filter(|s| *s != Summand::Ring).collect() };
    let tr = Truncation::new(&finite, 1);
    let d = tr.dim();
    if d == 0 {
        return true;
    }
    let k1 = Lattice::span_of(d, &kernel_basis(&tr.t));
    (2..=n_max).all(|n| Lattice::span_of(d, &kernel_basis(&tr.t.pow(n))).same_as(&k1))
}

/// Whether the stage modules for cyclic orders `n1` and `n2` have different
/// mao.
pub fn compare_actions_by_mao(n1: u64, n2: u64) -> Result<bool> {
    if n1 < 2 || n2 < 2 {
        return Err(param("N must be >= 2"));
    }
    Ok(RModule::at_stage(n1).mao()? != RModule::at_stage(n2).mao()?)
}
