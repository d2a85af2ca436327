use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::serde_num::{bigint_from_json, bigint_to_json};

/// An integer Laurent polynomial in `σ`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<i64, Value>", into = "BTreeMap<i64, Value>")]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl From<BTreeMap<i64, BigInt>> for LaurentPoly {
    fn from(map: BTreeMap<i64, BigInt>) -> Self {
        LaurentPoly { coeffs: map.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
}

impl TryFrom<BTreeMap<i64, Value>> for LaurentPoly {
    type Error = String;
    fn try_from(map: BTreeMap<i64, Value>) -> Result<Self, String> {
        let coeffs = map
            .into_iter()
            .map(|(e, v)| Ok((e, bigint_from_json(&v)?)))
            .collect::<Result<BTreeMap<_, _>, String>>()?;
        Ok(LaurentPoly::from(coeffs))
    }
}

impl From<LaurentPoly> for BTreeMap<i64, Value> {
    fn from(p: LaurentPoly) -> Self {
        p.coeffs.iter().map(|(e, c)| (*e, bigint_to_json(c))).collect()
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn sigma() -> Self {
        Self::monomial(1, 1)
    }

    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let mut coeffs = BTreeMap::new();
        let c = coeff.into();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentPoly { coeffs }
    }

    /// `Σ coeffs[i] σ^{low + i}`.
    pub fn from_coeffs(low: i64, coeffs: &[i64]) -> Self {
        coeffs.iter().enumerate().map(|(i, &c)| Self::monomial(low + i as i64, c)).fold(Self::zero(), |a, b| a + b)
    }

    /// `σ^n - 1`.
    pub fn sigma_pow_minus_one(n: i64) -> Self {
        Self::monomial(n, 1) - Self::one()
    }

    /// `(σ - 1)^n`.
    pub fn augmentation_power(n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc * Self::sigma_pow_minus_one(1))
    }

    /// `1 + σ + ... + σ^{n-1}`.
    pub fn geometric_sum(n: u64) -> Self {
        (0..n as i64).map(|e| Self::monomial(e, 1)).fold(Self::zero(), |a, b| a + b)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn shift(&self, by: i64) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (e + by, c.clone())).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LaurentPoly::from(self.coeffs.iter().map(|(e, c)| (*e, c * k)).collect::<BTreeMap<_, _>>())
    }

    /// Value at `σ = 1`.
    pub fn augmentation(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// Canonical representative modulo `σ^n - 1`, exponents in `[0, n)`.
    pub fn reduce(&self, n: u64) -> Self {
        assert!(n >= 1, "reduction modulus must be >= 1");
        let mut out: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in &self.coeffs {
            *out.entry(e.rem_euclid(n as i64)).or_default() += c;
        }
        LaurentPoly::from(out)
    }

    /// Coefficient vector of `reduce(n)`, length `n`.
    pub fn residue_vector(&self, n: u64) -> Vec<BigInt> {
        let r = self.reduce(n);
        (0..n as i64).map(|e| r.coeff(e)).collect()
    }

    /// Division with remainder by a polynomial in `Z[σ]` whose leading
    /// coefficient is `±1`, after shifting `self` into `Z[σ]`. Returns the
    /// quotient and remainder as elements of `Z[σ]` together with the shift.
    pub fn div_rem_monic(&self, divisor: &LaurentPoly) -> (LaurentPoly, LaurentPoly, i64) {
        let d_low = divisor.min_exp().expect("division by zero");
        let divisor = divisor.shift(-d_low);
        let d_deg = divisor.max_exp().expect("nonzero");
        let lead = divisor.coeff(d_deg);
        assert!(lead.abs().is_one(), "divisor must have unit leading coefficient");
        let shift = -self.min_exp().unwrap_or(0).min(0);
        let mut rem = self.shift(shift);
        let mut quot = LaurentPoly::zero();
        while let Some(top) = rem.max_exp() {
            if top < d_deg {
                break;
            }
            let c = rem.coeff(top) * &lead;
            let term = LaurentPoly::monomial(top - d_deg, c);
            rem = rem - &term * &divisor;
            quot = quot + term;
        }
        (quot.shift(-d_low), rem, shift)
    }

    /// Divisibility by `divisor` in `Z[σ, σ^{-1}]`. Valid because `σ` is a
    /// unit, so shifting never changes the answer.
    pub fn divisible_by_monic(&self, divisor: &LaurentPoly) -> bool {
        self.div_rem_monic(divisor).1.is_zero()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(e, c)| match e {
                0 => c.to_string(),
                1 => format!("{c}σ"),
                _ => format!("{c}σ^{e}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        for (e, c) in rhs.coeffs {
            let slot = self.coeffs.entry(e).or_default();
            *slot += c;
            if slot.is_zero() {
                self.coeffs.remove(&e);
            }
        }
        self
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { coeffs: self.coeffs.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        self + (-rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                *out.entry(e1 + e2).or_default() += c1 * c2;
            }
        }
        LaurentPoly::from(out)
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

pub fn poly_mul(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    a * b
}

pub fn poly_reduce(p: &LaurentPoly, n: u64) -> LaurentPoly {
    p.reduce(n)
}

/// Membership in the ideal `⟨σ^n - 1⟩`.
pub fn in_cyclic_ideal(x: &LaurentPoly, n: u64) -> bool {
    x.reduce(n).is_zero()
}

/// Whether `x = (1 + σ + ... + σ^{n-1}) z` for a Laurent polynomial `z`.
pub fn cyclotomic_divisibility(x: &LaurentPoly, n: u64) -> bool {
    x.divisible_by_monic(&LaurentPoly::geometric_sum(n))
}

/// For `1 <= m <= n_max`, `(σ - 1)^m x ∈ ⟨σ^n - 1⟩` exactly when
/// `(σ - 1) x ∈ ⟨σ^n - 1⟩`.
pub fn stab_equiv_check(x: &LaurentPoly, n: u64, n_max: u32) -> bool {
    let base = in_cyclic_ideal(&(LaurentPoly::augmentation_power(1) * x.clone()), n);
    (1..=n_max).all(|m| in_cyclic_ideal(&(LaurentPoly::augmentation_power(m) * x.clone()), n) == base)
}
