//! Fixed-point algebras of inner actions of finite cyclic groups on
//! multimatrix algebras.
//!
//! An inner action of `Z_d` on `M_n` is `Ad(u)` with `u^d = 1`; it is
//! determined up to conjugacy by the eigenvalue multiplicities of `u`, and
//! its fixed-point algebra is the commutant of `u`: one matrix block per
//! eigenspace. Eigenvalue `exp(2πi e/d)` is recorded by its exponent `e`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_num;
use crate::system::{Block, BlockAlgebra, MultiplicityMap};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Eigenspace {
    pub exponent: u64,
    #[serde(with = "serde_num::biguint")]
    pub multiplicity: BigUint,
}

/// Eigenvalue data of an inner `Z_d` action: for every source block, its
/// eigenspaces sorted by exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct InnerActionSpec {
    group_order: u64,
    blocks: Vec<Vec<Eigenspace>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    group_order: u64,
    blocks: Vec<Vec<Eigenspace>>,
}

impl TryFrom<RawSpec> for InnerActionSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        InnerActionSpec::new(raw.group_order, raw.blocks)
    }
}

impl InnerActionSpec {
    pub fn new(group_order: u64, blocks: Vec<Vec<Eigenspace>>) -> Result<Self> {
        if group_order == 0 {
            return Err(Error::InvalidAction("group order must be positive".into()));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidAction("no blocks".into()));
        }
        let mut sorted = Vec::with_capacity(blocks.len());
        for (i, mut block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidAction(format!("block {i} has no eigenspaces")));
            }
            block.sort_by_key(|e| e.exponent);
            for e in &block {
                if e.exponent >= group_order {
                    return Err(Error::InvalidAction(format!("exponent {} not reduced mod {group_order}", e.exponent)));
                }
                if e.multiplicity.is_zero() {
                    return Err(Error::InvalidAction(format!("block {i} has an empty eigenspace")));
                }
            }
            if block.windows(2).any(|w| w[0].exponent == w[1].exponent) {
                return Err(Error::InvalidAction(format!("block {i} repeats an exponent")));
            }
            sorted.push(block);
        }
        Ok(InnerActionSpec { group_order, blocks: sorted })
    }

    /// The trivial action on `M_n`.
    pub fn trivial(group_order: u64, size: impl Into<BigUint>) -> Result<Self> {
        Self::new(group_order, vec![vec![Eigenspace { exponent: 0, multiplicity: size.into() }]])
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn blocks(&self) -> &[Vec<Eigenspace>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<BigUint> {
        self.blocks.iter().map(|b| b.iter().map(|e| &e.multiplicity).sum()).collect()
    }

    /// The algebra acted on.
    pub fn algebra(&self) -> BlockAlgebra {
        BlockAlgebra::new(self.block_sizes().into_iter().map(Block::matrix).collect())
            .expect("validated spec has positive block sizes")
    }

    pub fn multiplicity(&self, block: usize, exponent: u64) -> BigUint {
        self.blocks[block]
            .iter()
            .find(|e| e.exponent == exponent)
            .map(|e| e.multiplicity.clone())
            .unwrap_or_default()
    }
}

/// Cycle type of a permutation: cycle length to number of cycles.
pub type CycleType = BTreeMap<u64, BigUint>;

pub fn cycle_type(perm: &[usize]) -> Result<CycleType> {
    let n = perm.len();
    let mut seen = vec![false; n];
    if perm.iter().any(|&p| p >= n) || {
        let mut hit = vec![false; n];
        perm.iter().any(|&p| std::mem::replace(&mut hit[p], true))
    } {
        return Err(Error::InvalidAction("not a permutation".into()));
    }
    let mut ty = CycleType::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        *ty.entry(len).or_default() += 1u32;
    }
    Ok(ty)
}

/// Eigenvalue data of a permutation unitary with the given cycle type: a
/// cycle of length `c` contributes every `c`-th root of unity once.
pub fn permutation_spec(group_order: u64, cycles: &CycleType) -> Result<InnerActionSpec> {
    let mut mult: BTreeMap<u64, BigUint> = BTreeMap::new();
    for (&len, count) in cycles {
        if len == 0 || !group_order.is_multiple_of(len) {
            return Err(Error::InvalidAction(format!("cycle length {len} does not divide {group_order}")));
        }
        let step = group_order / len;
        for j in 0..len {
            *mult.entry(j * step).or_default() += count;
        }
    }
    let block = mult
        .into_iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(exponent, multiplicity)| Eigenspace { exponent, multiplicity })
        .collect();
    InnerActionSpec::new(group_order, vec![block])
}

/// `r(k) = (3^k - 1) / 2`.
pub fn r_of(k: u32) -> BigUint {
    (BigUint::from(3u32).pow(k) - 1u32) / 2u32
}

/// `w_k ∈ M_{3^k}`: swaps the first two `M_{r(k)}` coordinate blocks and
/// fixes the last coordinate, so it has `r(k)` two-cycles and one fixed point.
pub fn w_unitary_spec(k: u32) -> Result<InnerActionSpec> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let cycles = CycleType::from([(1, BigUint::one()), (2, r_of(k))]);
    permutation_spec(2, &cycles)
}

/// The explicit permutation underlying `w_k`, for small `k`.
pub fn w_permutation(k: u32) -> Vec<usize> {
    let n = 3usize.pow(k);
    let r = (n - 1) / 2;
    (0..n).map(|i| if i < r { i + r } else if i < 2 * r { i - r } else { i }).collect()
}

/// One fixed block per eigenspace, in block order then exponent order.
pub fn fixed_algebra(a: &InnerActionSpec) -> BlockAlgebra {
    BlockAlgebra::new(a.blocks.iter().flatten().map(|e| Block::matrix(e.multiplicity.clone())).collect())
        .expect("validated spec has positive multiplicities")
}

fn common_order(a: u64, b: u64) -> Result<u64> {
    if a == b {
        Ok(a)
    } else if a.gcd(&b) == 1 {
        Ok(a * b)
    } else {
        Err(Error::InvalidAction(format!("group orders {a} and {b} are neither equal nor coprime")))
    }
}

/// Tensor product of inner actions; blocks are indexed lexicographically.
/// Unequal coprime orders are combined through `Z_a × Z_b ≅ Z_{ab}`.
pub fn tensor_actions(a: &InnerActionSpec, b: &InnerActionSpec) -> Result<InnerActionSpec> {
    let d = common_order(a.group_order, b.group_order)?;
    let (sa, sb) = (d / a.group_order, d / b.group_order);
    let mut blocks = Vec::with_capacity(a.blocks.len() * b.blocks.len());
    for ba in &a.blocks {
        for bb in &b.blocks {
            let mut mult: BTreeMap<u64, BigUint> = BTreeMap::new();
            for ea in ba {
                for eb in bb {
                    let e = (ea.exponent * sa + eb.exponent * sb) % d;
                    *mult.entry(e).or_default() += &ea.multiplicity * &eb.multiplicity;
                }
            }
            blocks.push(mult.into_iter().map(|(exponent, multiplicity)| Eigenspace { exponent, multiplicity }).collect());
        }
    }
    InnerActionSpec::new(d, blocks)
}

/// Partial embedding multiplicities of `x ↦ x ⊗ 1` between the fixed-point
/// algebras of `a` and `a ⊗ b`. The codomain comes from the eigenvalue
/// data of `a ⊗ b`.
pub fn fixed_embedding_multiplicities(a: &InnerActionSpec, b: &InnerActionSpec) -> Result<MultiplicityMap> {
    let ab = tensor_actions(a, b)?;
    let d = ab.group_order;
    let (sa, sb) = (d / a.group_order, d / b.group_order);
    let nb = b.blocks.len();
    let mut rows = Vec::new();
    for (ij, dst_block) in ab.blocks.iter().enumerate() {
        let (i, j) = (ij / nb, ij % nb);
        for e in dst_block {
            let mut row = Vec::new();
            for (src_i, src_block) in a.blocks.iter().enumerate() {
                for e1 in src_block {
                    let m = if src_i != i {
                        BigUint::zero()
                    } else {
                        let diff = (e.exponent + d - (e1.exponent * sa) % d) % d;
                        if diff % sb == 0 { b.multiplicity(j, diff / sb) } else { BigUint::zero() }
                    };
                    row.push(m);
                }
            }
            rows.push(row);
        }
    }
    MultiplicityMap::new(fixed_algebra(a), fixed_algebra(&ab), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eig(spec: &InnerActionSpec) -> Vec<(u64, u64)> {
        spec.blocks()[0].iter().map(|e| (e.exponent, e.multiplicity.to_u64_digits().first().copied().unwrap_or(0))).collect()
    }

    #[test]
    fn w_spec_small() {
        assert_eq!(eig(&w_unitary_spec(1).unwrap()), vec![(0, 2), (1, 1)]);
        assert_eq!(eig(&w_unitary_spec(2).unwrap()), vec![(0, 5), (1, 4)]);
        assert!(w_unitary_spec(0).is_err());
        for k in 1..=5 {
            assert_eq!(w_unitary_spec(k).unwrap().block_sizes(), vec![BigUint::from(3u32).pow(k)]);
        }
    }

    #[test]
    fn symbolic_cycle_type_matches_explicit_permutation() {
        for k in 1..=5 {
            let explicit = permutation_spec(2, &cycle_type(&w_permutation(k)).unwrap()).unwrap();
            assert_eq!(explicit, w_unitary_spec(k).unwrap());
        }
    }

    #[test]
    fn fixed_algebra_of_w() {
        let f = fixed_algebra(&w_unitary_spec(1).unwrap());
        assert_eq!(f.sizes(), vec![BigUint::from(2u32), BigUint::from(1u32)]);
        let t = InnerActionSpec::trivial(2, 7u32).unwrap();
        assert_eq!(fixed_algebra(&t), t.algebra());
    }

    #[test]
    fn tensor_w1_w2() {
        let t = tensor_actions(&w_unitary_spec(1).unwrap(), &w_unitary_spec(2).unwrap()).unwrap();
        assert_eq!(eig(&t), vec![(0, 14), (1, 13)]);
    }

    #[test]
    fn coprime_orders_combine() {
        let a = permutation_spec(2, &CycleType::from([(2, BigUint::one())])).unwrap();
        let b = permutation_spec(3, &CycleType::from([(3, BigUint::one())])).unwrap();
        let t = tensor_actions(&a, &b).unwrap();
        assert_eq!(t.group_order(), 6);
        assert_eq!(eig(&t), (0..6).map(|e| (e, 1)).collect::<Vec<_>>());
        let c = permutation_spec(4, &CycleType::from([(4, BigUint::one())])).unwrap();
        assert!(tensor_actions(&a, &c).is_err());
    }

    #[test]
    fn trivial_second_factor_gives_identity() {
        let a = w_unitary_spec(2).unwrap();
        let m = fixed_embedding_multiplicities(&a, &InnerActionSpec::trivial(2, 1u32).unwrap()).unwrap();
        assert_eq!(m, MultiplicityMap::identity(&fixed_algebra(&a)));
    }

    #[test]
    fn invalid_specs_rejected() {
        let e = |exponent, m: u32| Eigenspace { exponent, multiplicity: m.into() };
        assert!(InnerActionSpec::new(2, vec![vec![e(0, 1), e(0, 2)]]).is_err());
        assert!(InnerActionSpec::new(2, vec![vec![e(2, 1)]]).is_err());
        assert!(InnerActionSpec::new(2, vec![vec![e(0, 0)]]).is_err());
        assert!(serde_json::from_str::<InnerActionSpec>(r#"{"group_order":2,"blocks":[[]]}"#).is_err());
    }
}
