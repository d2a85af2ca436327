//! Block algebras, multiplicity maps and direct systems.
//!
//! A stage algebra is recorded only through its block structure: a list of
//! `M_n` or `C(S^1, M_n)` summands. A unital connecting homomorphism is
//! recorded through its partial embedding multiplicities (its K_0 shadow).
//! All arithmetic is on arbitrary-precision integers.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{param, Error, Result};
use crate::serde_num;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Matrix,
    CircleMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    #[serde(with = "serde_num::biguint")]
    pub size: BigUint,
}

impl Block {
    pub fn matrix(size: impl Into<BigUint>) -> Self {
        Block { kind: BlockKind::Matrix, size: size.into() }
    }

    pub fn circle(size: impl Into<BigUint>) -> Self {
        Block { kind: BlockKind::CircleMatrix, size: size.into() }
    }
}

/// A finite direct sum of matrix blocks. Matrix blocks come first, in
/// declaration order; circle-matrix blocks come last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAlgebra")]
pub struct BlockAlgebra {
    blocks: Vec<Block>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    blocks: Vec<Block>,
}

impl TryFrom<RawAlgebra> for BlockAlgebra {
    type Error = Error;
    fn try_from(raw: RawAlgebra) -> Result<Self> {
        BlockAlgebra::new(raw.blocks)
    }
}

impl BlockAlgebra {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        if let Some(i) = blocks.iter().position(|b| b.size.is_zero()) {
            return Err(Error::InvalidAlgebra(format!("block {i} has size 0")));
        }
        if blocks.windows(2).any(|w| w[0].kind == BlockKind::CircleMatrix && w[1].kind == BlockKind::Matrix) {
            return Err(Error::InvalidAlgebra("circle-matrix blocks must come after matrix blocks".into()));
        }
        Ok(BlockAlgebra { blocks })
    }

    /// `M_{s_1} ⊕ ... ⊕ M_{s_k}`.
    pub fn matrices<T: Into<BigUint> + Clone>(sizes: &[T]) -> Result<Self> {
        Self::new(sizes.iter().cloned().map(Block::matrix).collect())
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sizes(&self) -> Vec<BigUint> {
        self.blocks.iter().map(|b| b.size.clone()).collect()
    }

    pub fn size(&self, i: usize) -> &BigUint {
        &self.blocks[i].size
    }

    pub fn is_finite_dimensional(&self) -> bool {
        self.blocks.iter().all(|b| b.kind == BlockKind::Matrix)
    }

    /// Vector-space dimension of the matrix blocks, `Σ size²`.
    pub fn matrix_dimension(&self) -> BigUint {
        self.blocks
            .iter()
            .filter(|b| b.kind == BlockKind::Matrix)
            .map(|b| &b.size * &b.size)
            .sum()
    }

    /// Tensor product of two multimatrix algebras. Blocks are indexed
    /// lexicographically: block `(i, j)` sits at position `i * other.len() + j`.
    pub fn tensor(&self, other: &BlockAlgebra) -> Result<BlockAlgebra> {
        if !self.is_finite_dimensional() || !other.is_finite_dimensional() {
            return Err(Error::InvalidAlgebra("tensor products are only formed for matrix blocks".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .flat_map(|a| other.blocks.iter().map(move |b| Block::matrix(&a.size * &b.size)))
            .collect();
        BlockAlgebra::new(blocks)
    }
}

/// Partial embedding multiplicities of a unital map `src -> dst`.
/// `entries[j][k]` is the multiplicity of source block `k` in destination
/// block `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct MultiplicityMap {
    src: BlockAlgebra,
    dst: BlockAlgebra,
    #[serde(with = "serde_num::biguint_matrix")]
    entries: Vec<Vec<BigUint>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    src: BlockAlgebra,
    dst: BlockAlgebra,
    #[serde(with = "serde_num::biguint_matrix")]
    entries: Vec<Vec<BigUint>>,
}

impl TryFrom<RawMap> for MultiplicityMap {
    type Error = Error;
    fn try_from(raw: RawMap) -> Result<Self> {
        MultiplicityMap::new(raw.src, raw.dst, raw.entries)
    }
}

impl MultiplicityMap {
    pub fn new(src: BlockAlgebra, dst: BlockAlgebra, entries: Vec<Vec<BigUint>>) -> Result<Self> {
        if entries.len() != dst.len() || entries.iter().any(|row| row.len() != src.len()) {
            return Err(Error::ShapeMismatch(format!(
                "multiplicity matrix must be {}x{} (dst x src)",
                dst.len(),
                src.len()
            )));
        }
        for (j, row) in entries.iter().enumerate() {
            let image: BigUint = row.iter().zip(src.blocks()).map(|(m, b)| m * &b.size).sum();
            if &image != dst.size(j) {
                return Err(Error::NonUnital(format!(
                    "destination block {j} has size {} but receives {image}",
                    dst.size(j)
                )));
            }
        }
        Ok(MultiplicityMap { src, dst, entries })
    }

    pub fn from_u64(src: BlockAlgebra, dst: BlockAlgebra, entries: &[Vec<u64>]) -> Result<Self> {
        let entries = entries.iter().map(|r| r.iter().map(|&v| BigUint::from(v)).collect()).collect();
        Self::new(src, dst, entries)
    }

    pub fn identity(algebra: &BlockAlgebra) -> Self {
        let n = algebra.len();
        let entries = (0..n)
            .map(|j| (0..n).map(|k| if j == k { BigUint::one() } else { BigUint::zero() }).collect())
            .collect();
        MultiplicityMap { src: algebra.clone(), dst: algebra.clone(), entries }
    }

    pub fn src(&self) -> &BlockAlgebra {
        &self.src
    }

    pub fn dst(&self) -> &BlockAlgebra {
        &self.dst
    }

    pub fn entries(&self) -> &[Vec<BigUint>] {
        &self.entries
    }

    pub fn entry(&self, dst: usize, src: usize) -> &BigUint {
        &self.entries[dst][src]
    }

    /// Every source block lands somewhere.
    pub fn is_injective(&self) -> bool {
        (0..self.src.len()).all(|k| self.entries.iter().any(|row| !row[k].is_zero()))
    }

    /// Image ranks of a projection with the given blockwise ranks in `src`.
    pub fn push_ranks(&self, ranks: &[BigUint]) -> Result<Vec<BigUint>> {
        if ranks.len() != self.src.len() {
            return Err(Error::ShapeMismatch(format!("{} ranks for {} source blocks", ranks.len(), self.src.len())));
        }
        Ok(self.entries.iter().map(|row| row.iter().zip(ranks).map(|(m, r)| m * r).sum()).collect())
    }
}

/// `outer ∘ inner`; the entries are the matrix product.
pub fn compose_maps(outer: &MultiplicityMap, inner: &MultiplicityMap) -> Result<MultiplicityMap> {
    if inner.dst != outer.src {
        return Err(Error::ShapeMismatch("inner destination differs from outer source".into()));
    }
    let (rows, mid, cols) = (outer.dst.len(), outer.src.len(), inner.src.len());
    let entries = (0..rows)
        .map(|j| (0..cols).map(|k| (0..mid).map(|i| &outer.entries[j][i] * &inner.entries[i][k]).sum()).collect())
        .collect();
    MultiplicityMap::new(inner.src.clone(), outer.dst.clone(), entries)
}

/// One summand of a relative commutant, `M_size`, sitting in destination
/// block `dst` and paired with source block `src`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutantBlock {
    pub dst: usize,
    pub src: usize,
    #[serde(with = "serde_num::biguint")]
    pub size: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commutant {
    pub algebra: BlockAlgebra,
    pub groups: Vec<CommutantBlock>,
}

/// Relative commutant of the range of a unital map between multimatrix
/// algebras: one block `M_m` for each positive multiplicity `m`, ordered by
/// destination block and then source block.
pub fn relative_commutant(map: &MultiplicityMap) -> Result<Commutant> {
    if !map.src.is_finite_dimensional() {
        return Err(Error::InvalidAlgebra("relative commutants need finite-dimensional source blocks".into()));
    }
    // Re-validate: maps built from raw parts elsewhere in the crate go through
    // `new`, but a caller may have hand-edited a deserialised value.
    let map = MultiplicityMap::new(map.src.clone(), map.dst.clone(), map.entries.clone())?;
    let mut groups = Vec::new();
    let mut blocks = Vec::new();
    for (j, row) in map.entries.iter().enumerate() {
        for (k, m) in row.iter().enumerate() {
            if !m.is_zero() {
                groups.push(CommutantBlock { dst: j, src: k, size: m.clone() });
                blocks.push(Block { kind: map.dst.blocks[j].kind, size: m.clone() });
            }
        }
    }
    // Sort circle blocks last to keep the canonical order.
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&i| blocks[i].kind);
    let groups = order.iter().map(|&i| groups[i].clone()).collect();
    let blocks = order.iter().map(|&i| blocks[i].clone()).collect();
    Ok(Commutant { algebra: BlockAlgebra::new(blocks)?, groups })
}

/// Ranks of the image of the central projection supported on the middle
/// blocks `proj`, in each block of the relative commutant of
/// `second ∘ first`. Only paths through `proj` contribute.
pub fn image_ranks_of_central_projection(
    first: &MultiplicityMap,
    second: &MultiplicityMap,
    proj: &[usize],
) -> Result<Vec<BigUint>> {
    if first.dst != second.src {
        return Err(Error::ShapeMismatch("two-step maps do not compose".into()));
    }
    if let Some(&bad) = proj.iter().find(|&&i| i >= first.dst.len()) {
        return Err(param(format!("middle block {bad} out of range")));
    }
    let commutant = relative_commutant(&compose_maps(second, first)?)?;
    let mut support: Vec<usize> = proj.to_vec();
    support.sort_unstable();
    support.dedup();
    Ok(commutant
        .groups
        .iter()
        .map(|g| support.iter().map(|&i| &second.entries[g.dst][i] * &first.entries[i][g.src]).sum())
        .collect())
}

/// One stage of multiplicity parameters `l_{j,k}(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LParams {
    pub l00: u64,
    pub l01: u64,
    pub l10: u64,
    pub l11: u64,
}

impl LParams {
    pub fn new(l00: u64, l01: u64, l10: u64, l11: u64) -> Self {
        LParams { l00, l01, l10, l11 }
    }

    pub fn uniform(l: u64) -> Self {
        Self::new(l, l, l, l)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.l00, self.l01, self.l10, self.l11].contains(&0) {
            return Err(param(format!("multiplicity parameters must be >= 1, got {self:?}")));
        }
        Ok(())
    }

    /// The dimension matrix `[[l00, l01], [N l10, 2N l11]]`.
    pub fn dimension_matrix(&self, n_cyc: u64) -> [[BigUint; 2]; 2] {
        [
            [BigUint::from(self.l00), BigUint::from(self.l01)],
            [BigUint::from(n_cyc) * self.l10, BigUint::from(2 * n_cyc) * self.l11],
        ]
    }

    /// The degeneracy that breaks injectivity on equivariant K_0:
    /// `2 l11 l00 == l10 l01`.
    pub fn is_degenerate(&self) -> bool {
        2 * u128::from(self.l11) * u128::from(self.l00) == u128::from(self.l10) * u128::from(self.l01)
    }
}

/// `r(n)` from `r(m+1) = l(m) r(m)`, applied `n` times starting at `r0`.
pub fn dims_recursion(l_seq: &[LParams], n_cyc: u64, r0: [BigUint; 2], n: usize) -> Result<[BigUint; 2]> {
    if n_cyc == 0 {
        return Err(param("N must be >= 1"));
    }
    if r0.iter().any(Zero::is_zero) {
        return Err(param("initial dimensions must be >= 1"));
    }
    if l_seq.len() < n {
        return Err(param(format!("{n} steps requested but only {} parameter stages given", l_seq.len())));
    }
    let mut r = r0;
    for l in &l_seq[..n] {
        l.validate()?;
        let m = l.dimension_matrix(n_cyc);
        r = [&m[0][0] * &r[0] + &m[0][1] * &r[1], &m[1][0] * &r[0] + &m[1][1] * &r[1]];
    }
    Ok(r)
}

/// A sequence of stage algebras with connecting multiplicity maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct DirectSystem {
    stages: Vec<BlockAlgebra>,
    maps: Vec<MultiplicityMap>,
    params: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    stages: Vec<BlockAlgebra>,
    maps: Vec<RawEntries>,
    #[serde(default)]
    params: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntries {
    #[serde(with = "serde_num::biguint_matrix")]
    entries: Vec<Vec<BigUint>>,
}

impl TryFrom<RawSystem> for DirectSystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        if raw.maps.len() + 1 != raw.stages.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} stages need {} maps, got {}",
                raw.stages.len(),
                raw.stages.len().saturating_sub(1),
                raw.maps.len()
            )));
        }
        let maps = raw
            .maps
            .into_iter()
            .enumerate()
            .map(|(n, m)| MultiplicityMap::new(raw.stages[n].clone(), raw.stages[n + 1].clone(), m.entries))
            .collect::<Result<Vec<_>>>()?;
        DirectSystem::new(raw.stages, maps, raw.params)
    }
}

impl From<DirectSystem> for RawSystem {
    fn from(sys: DirectSystem) -> Self {
        RawSystem {
            stages: sys.stages,
            maps: sys.maps.into_iter().map(|m| RawEntries { entries: m.entries }).collect(),
            params: sys.params,
        }
    }
}

impl DirectSystem {
    pub fn new(stages: Vec<BlockAlgebra>, maps: Vec<MultiplicityMap>, params: BTreeMap<String, Value>) -> Result<Self> {
        if stages.is_empty() || maps.len() + 1 != stages.len() {
            return Err(Error::ShapeMismatch("a direct system needs k stages and k-1 maps".into()));
        }
        for (n, m) in maps.iter().enumerate() {
            if m.src != stages[n] || m.dst != stages[n + 1] {
                return Err(Error::ShapeMismatch(format!("map {n} does not connect stage {n} to stage {}", n + 1)));
            }
        }
        Ok(DirectSystem { stages, maps, params })
    }

    pub fn stages(&self) -> &[BlockAlgebra] {
        &self.stages
    }

    pub fn maps(&self) -> &[MultiplicityMap] {
        &self.maps
    }

    pub fn params(&self) -> &BTreeMap<String, Value> {
        &self.params
    }

    /// The composite map from stage `from` to stage `to`.
    pub fn connecting(&self, from: usize, to: usize) -> Result<MultiplicityMap> {
        if from > to || to >= self.stages.len() {
            return Err(param(format!("no connecting map {from} -> {to}")));
        }
        let mut acc = MultiplicityMap::identity(&self.stages[from]);
        for m in &self.maps[from..to] {
            acc = compose_maps(m, &acc)?;
        }
        Ok(acc)
    }
}

/// Parameters of the circle-action AT construction: the cyclic order `N`,
/// initial dimensions `r(0)`, and one `LParams` per stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtSystem {
    pub n_cyc: u64,
    pub r0: [u64; 2],
    pub schedule: Vec<LParams>,
}

/// Which of the five summand families of the two-step relative commutant a
/// commutant block belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CommutantFamily {
    D1,
    D2,
    D3,
    D4,
    D5,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub family: CommutantFamily,
    pub multiplicity: usize,
    #[serde(with = "serde_num::biguint")]
    pub size: BigUint,
    #[serde(with = "serde_num::biguint")]
    pub rank_of_q: BigUint,
}

impl AtSystem {
    pub fn new(n_cyc: u64, r0: [u64; 2], schedule: Vec<LParams>) -> Result<Self> {
        if n_cyc < 2 {
            return Err(param("the cyclic order N must be >= 2"));
        }
        if r0.contains(&0) {
            return Err(param("initial dimensions must be >= 1"));
        }
        for l in &schedule {
            l.validate()?;
        }
        Ok(AtSystem { n_cyc, r0, schedule })
    }

    /// `l00 = l10 = 1`, `l01 = l11 = 2n + 1`, `r(0) = (1, 1)`.
    pub fn example_odd_growth(n_cyc: u64, stages: usize) -> Self {
        let schedule = (0..stages as u64).map(|n| LParams::new(1, 2 * n + 1, 1, 2 * n + 1)).collect();
        AtSystem { n_cyc, r0: [1, 1], schedule }
    }

    /// Number of stage algebras determined by the schedule.
    pub fn stage_count(&self) -> usize {
        self.schedule.len() + 1
    }

    pub fn l(&self, n: usize) -> Result<LParams> {
        self.schedule.get(n).copied().ok_or_else(|| param(format!("no parameters for stage {n}")))
    }

    pub fn dims(&self, n: usize) -> Result<[BigUint; 2]> {
        dims_recursion(&self.schedule, self.n_cyc, [self.r0[0].into(), self.r0[1].into()], n)
    }

    fn cyc(&self) -> usize {
        self.n_cyc as usize
    }

    /// `B_n = (M_{r0(n)})^N ⊕ M_{r1(n)}`, the fixed-point stage algebra.
    pub fn fixed_point_stage(&self, n: usize) -> Result<BlockAlgebra> {
        let [r0, r1] = self.dims(n)?;
        let mut blocks = vec![Block::matrix(r0); self.cyc()];
        blocks.push(Block::matrix(r1));
        BlockAlgebra::new(blocks)
    }

    /// `χ_n : B_n -> B_{n+1}`.
    pub fn fixed_point_map(&self, n: usize) -> Result<MultiplicityMap> {
        let l = self.l(n)?;
        let big_n = self.cyc();
        let entries: Vec<Vec<u64>> = (0..=big_n)
            .map(|k| {
                (0..=big_n)
                    .map(|j| match (k < big_n, j < big_n) {
                        (true, true) if j == k => l.l00,
                        (true, true) => 0,
                        (true, false) => l.l01,
                        (false, true) => l.l10,
                        (false, false) => 2 * self.n_cyc * l.l11,
                    })
                    .collect()
            })
            .collect();
        MultiplicityMap::from_u64(self.fixed_point_stage(n)?, self.fixed_point_stage(n + 1)?, &entries)
    }

    /// `A_n ≅ C(S^1, M_{N r0(n)}) ⊕ C(S^1, M_{r1(n)})` at the K_0 level.
    pub fn algebra_stage(&self, n: usize) -> Result<BlockAlgebra> {
        let [r0, r1] = self.dims(n)?;
        BlockAlgebra::new(vec![Block::circle(r0 * self.n_cyc), Block::circle(r1)])
    }

    /// `ν_n : A_n -> A_{n+1}` at the K_0 level.
    pub fn algebra_map(&self, n: usize) -> Result<MultiplicityMap> {
        let l = self.l(n)?;
        let entries = [vec![l.l00, self.n_cyc * l.l01], vec![l.l10, 2 * self.n_cyc * l.l11]];
        MultiplicityMap::from_u64(self.algebra_stage(n)?, self.algebra_stage(n + 1)?, &entries)
    }

    pub fn fixed_point_system(&self) -> Result<DirectSystem> {
        let stages = (0..self.stage_count()).map(|n| self.fixed_point_stage(n)).collect::<Result<Vec<_>>>()?;
        let maps = (0..self.schedule.len()).map(|n| self.fixed_point_map(n)).collect::<Result<Vec<_>>>()?;
        DirectSystem::new(stages, maps, self.param_map())
    }

    pub fn algebra_system(&self) -> Result<DirectSystem> {
        let stages = (0..self.stage_count()).map(|n| self.algebra_stage(n)).collect::<Result<Vec<_>>>()?;
        let maps = (0..self.schedule.len()).map(|n| self.algebra_map(n)).collect::<Result<Vec<_>>>()?;
        DirectSystem::new(stages, maps, self.param_map())
    }

    fn param_map(&self) -> BTreeMap<String, Value> {
        let mut p = BTreeMap::new();
        p.insert("N".to_string(), Value::from(self.n_cyc));
        p.insert("r0".to_string(), Value::from(self.r0.to_vec()));
        p
    }

    /// Index of the block `B_{n,1}` supporting `q_n` inside `B_n`.
    pub fn q_block(&self) -> usize {
        self.cyc()
    }

    pub fn family_of(&self, group: &CommutantBlock) -> CommutantFamily {
        let big_n = self.cyc();
        match (group.src < big_n, group.dst < big_n) {
            (true, true) if group.src == group.dst => CommutantFamily::D1,
            (true, true) => CommutantFamily::D2,
            (false, true) => CommutantFamily::D3,
            (true, false) => CommutantFamily::D4,
            (false, false) => CommutantFamily::D5,
        }
    }

    /// Relative commutant of `χ_{n+2,n}(B_n)` in `B_{n+2}` with the ranks of
    /// the image of `q_{n+1}` in each block, summarised by family.
    pub fn two_step_commutant(&self, n: usize) -> Result<(Commutant, Vec<BigUint>, Vec<FamilySummary>)> {
        let first = self.fixed_point_map(n)?;
        let second = self.fixed_point_map(n + 1)?;
        let commutant = relative_commutant(&compose_maps(&second, &first)?)?;
        let ranks = image_ranks_of_central_projection(&first, &second, &[self.q_block()])?;
        let mut summary: BTreeMap<CommutantFamily, FamilySummary> = BTreeMap::new();
        for (g, rank) in commutant.groups.iter().zip(&ranks) {
            let family = self.family_of(g);
            let entry = summary.entry(family).or_insert_with(|| FamilySummary {
                family,
                multiplicity: 0,
                size: g.size.clone(),
                rank_of_q: rank.clone(),
            });
            if entry.size != g.size || &entry.rank_of_q != rank {
                return Err(Error::InvalidAlgebra(format!("family {family:?} is not homogeneous")));
            }
            entry.multiplicity += 1;
        }
        Ok((commutant, ranks, summary.into_values().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn algebra_validation() {
        assert!(BlockAlgebra::new(vec![]).is_err());
        assert!(BlockAlgebra::matrices(&[2u32, 0]).is_err());
        assert!(BlockAlgebra::new(vec![Block::circle(2u32), Block::matrix(1u32)]).is_err());
        let a = BlockAlgebra::matrices(&[2u32, 3]).unwrap();
        assert_eq!(a.matrix_dimension(), big(13));
    }

    #[test]
    fn non_unital_map_rejected() {
        let src = BlockAlgebra::matrices(&[2u32]).unwrap();
        let dst = BlockAlgebra::matrices(&[5u32]).unwrap();
        let err = MultiplicityMap::from_u64(src, dst, &[vec![2]]).unwrap_err();
        assert!(matches!(err, Error::NonUnital(_)));
    }

    #[test]
    fn dims_recursion_examples() {
        let ones = vec![LParams::uniform(1); 3];
        assert_eq!(dims_recursion(&ones, 2, [big(1), big(1)], 1).unwrap(), [big(2), big(6)]);
        assert_eq!(dims_recursion(&[], 2, [big(3), big(4)], 0).unwrap(), [big(3), big(4)]);
        assert!(dims_recursion(&ones, 2, [big(1), big(1)], 4).is_err());
    }

    #[test]
    fn dims_recursion_odd_growth_two_steps() {
        // [[1,3],[2,12]] * [[1,1],[2,4]] * (1,1) = [[1,3],[2,12]] * (2,6)
        let sys = AtSystem::example_odd_growth(2, 2);
        assert_eq!(sys.dims(2).unwrap(), [big(20), big(76)]);
    }

    #[test]
    fn identity_composition() {
        let sys = AtSystem::example_odd_growth(3, 2);
        let m = sys.fixed_point_map(0).unwrap();
        let id = MultiplicityMap::identity(m.src());
        assert_eq!(compose_maps(&m, &id).unwrap(), m);
        assert_eq!(compose_maps(&MultiplicityMap::identity(m.dst()), &m).unwrap(), m);
        assert!(compose_maps(&m, &m).is_err());
    }

    #[test]
    fn two_step_all_ones_entries() {
        let sys = AtSystem::new(2, [1, 1], vec![LParams::uniform(1); 2]).unwrap();
        let m = compose_maps(&sys.fixed_point_map(1).unwrap(), &sys.fixed_point_map(0).unwrap()).unwrap();
        let e = |d: usize, s: usize| m.entry(d, s).clone();
        assert_eq!(e(0, 0), big(2));
        assert_eq!(e(1, 1), big(2));
        assert_eq!(e(0, 1), big(1));
        assert_eq!(e(2, 0), big(5));
        assert_eq!(e(0, 2), big(5));
        assert_eq!(e(2, 2), big(18));
    }

    #[test]
    fn classical_commutant_of_amplification() {
        let src = BlockAlgebra::matrices(&[3u32]).unwrap();
        let dst = BlockAlgebra::matrices(&[12u32]).unwrap();
        let m = MultiplicityMap::from_u64(src, dst, &[vec![4]]).unwrap();
        let c = relative_commutant(&m).unwrap();
        assert_eq!(c.algebra.sizes(), vec![big(4)]);
    }

    #[test]
    fn commutant_needs_finite_source() {
        let sys = AtSystem::example_odd_growth(2, 1);
        assert!(relative_commutant(&sys.algebra_map(0).unwrap()).is_err());
    }

    #[test]
    fn commutant_families_all_ones() {
        let sys = AtSystem::new(2, [1, 1], vec![LParams::uniform(1); 2]).unwrap();
        let (_, _, fam) = sys.two_step_commutant(0).unwrap();
        let mult: Vec<usize> = fam.iter().map(|f| f.multiplicity).collect();
        assert_eq!(mult, vec![2, 2, 2, 2, 1]);
        assert_eq!(fam[0].size, big(2));
    }

    #[test]
    fn central_projection_edge_cases() {
        let sys = AtSystem::example_odd_growth(3, 3);
        let (first, second) = (sys.fixed_point_map(1).unwrap(), sys.fixed_point_map(2).unwrap());
        let all: Vec<usize> = (0..=3).collect();
        let c = relative_commutant(&compose_maps(&second, &first).unwrap()).unwrap();
        let full = image_ranks_of_central_projection(&first, &second, &all).unwrap();
        assert_eq!(full, c.algebra.sizes());
        let none = image_ranks_of_central_projection(&first, &second, &[]).unwrap();
        assert!(none.iter().all(Zero::is_zero));
        assert!(image_ranks_of_central_projection(&first, &second, &[9]).is_err());
    }

    #[test]
    fn direct_system_json_round_trip() {
        let sys = AtSystem::example_odd_growth(2, 3).fixed_point_system().unwrap();
        let text = serde_json::to_string(&sys).unwrap();
        assert!(text.contains("\"kind\":\"matrix\""));
        let back: DirectSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn direct_system_json_rejects_non_unital_maps() {
        let text = r#"{"stages":[{"blocks":[{"kind":"matrix","size":2}]},{"blocks":[{"kind":"matrix","size":3}]}],
                       "maps":[{"entries":[[1]]}],"params":{"N":2}}"#;
        assert!(serde_json::from_str::<DirectSystem>(text).is_err());
    }

    #[test]
    fn connecting_map_is_composite() {
        let sys = AtSystem::example_odd_growth(2, 3);
        let ds = sys.fixed_point_system().unwrap();
        let direct = compose_maps(&sys.fixed_point_map(1).unwrap(), &sys.fixed_point_map(0).unwrap()).unwrap();
        assert_eq!(ds.connecting(0, 2).unwrap(), direct);
        assert_eq!(ds.connecting(1, 1).unwrap(), MultiplicityMap::identity(&ds.stages()[1]));
    }
}
