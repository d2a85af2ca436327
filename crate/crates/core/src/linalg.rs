//! Dense integer matrices, Smith normal form with unimodular transforms,
//! and the handful of lattice operations the module calculus needs
//! (kernels, spans, membership, cokernel invariants).
//!
//! Everything is exact over `BigInt`. The matrices this crate produces are
//! tiny (at most a few dozen rows), so elimination uses the classical
//! smallest-absolute-value pivot without any modular tricks.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone().into();
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn pow(&self, exp: u32) -> Self {
        assert_eq!(self.rows, self.cols, "pow of a non-square matrix");
        let mut acc = Self::identity(self.rows);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Block-diagonal sum of square or rectangular blocks.
    pub fn block_diag(blocks: &[IntMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn neg(&self) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| -v).collect() }
    }

    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        bareiss_determinant(self)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * q;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * q;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>())).finish()
    }
}

fn bareiss_determinant(m: &IntMatrix) -> BigInt {
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    sign * a[(n - 1, n - 1)].clone()
}

/// `left * a * right = diag(diagonal)`, with `left`, `right` unimodular and
/// `left_inv` the inverse of `left`. Nonzero diagonal entries are positive
/// and each divides the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub left: IntMatrix,
    pub left_inv: IntMatrix,
    pub right: IntMatrix,
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut left = IntMatrix::identity(m);
    let mut left_inv = IntMatrix::identity(m);
    let mut right = IntMatrix::identity(n);

    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero |entry| in the trailing submatrix.
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !d[(i, j)].is_zero())
            .min_by(|&p, &q| d[p].abs().cmp(&d[q].abs()));
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        left.swap_rows(t, pi);
        left_inv.swap_cols(t, pi);
        d.swap_cols(t, pj);
        right.swap_cols(t, pj);

        let mut dirty = false;
        for i in t + 1..m {
            if d[(i, t)].is_zero() {
                continue;
            }
            let q = d[(i, t)].div_floor(&d[(t, t)]);
            let neg_q = -&q;
            d.add_row_multiple(i, t, &neg_q);
            left.add_row_multiple(i, t, &neg_q);
            left_inv.add_col_multiple(t, i, &q);
            dirty |= !d[(i, t)].is_zero();
        }
        for j in t + 1..n {
            if d[(t, j)].is_zero() {
                continue;
            }
            let q = d[(t, j)].div_floor(&d[(t, t)]);
            let neg_q = -&q;
            d.add_col_multiple(j, t, &neg_q);
            right.add_col_multiple(j, t, &neg_q);
            dirty |= !d[(t, j)].is_zero();
        }
        if dirty {
            // A smaller remainder appeared; pick a new pivot at this index.
            continue;
        }
        // Row and column t are clear; enforce divisibility.
        let offender = (t + 1..m)
            .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
        if let Some((i, _)) = offender {
            let one = BigInt::one();
            d.add_row_multiple(t, i, &one);
            left.add_row_multiple(t, i, &one);
            left_inv.add_col_multiple(i, t, &-one);
            continue;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            left.negate_row(t);
            left_inv.negate_col(t);
        }
        t += 1;
    }

    let diagonal: Vec<BigInt> = (0..m.min(n)).map(|i| d[(i, i)].clone()).collect();
    let rank = diagonal.iter().take_while(|v| !v.is_zero()).count();
    Smith { diagonal, rank, left, left_inv, right }
}

/// A basis of the integer kernel `{x : a x = 0}`, as column vectors.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = smith_normal_form(a);
    (s.rank..a.cols).map(|j| s.right.column(j)).collect()
}

/// A finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/t_i`, with the
/// torsion coefficients listed in divisibility order (all > 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// The cokernel `Z^rows / im(relations)`.
    pub fn cokernel(relations: &IntMatrix) -> Self {
        let s = smith_normal_form(relations);
        let torsion = s.diagonal[..s.rank].iter().filter(|d| !d.is_one()).cloned().collect();
        AbelianGroup { free_rank: relations.rows - s.rank, torsion }
    }

    /// Invariant factors listed as integers: one `0` per free summand after
    /// the torsion coefficients.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut out = self.torsion.clone();
        out.extend(std::iter::repeat_n(BigInt::zero(), self.free_rank));
        out
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// A sublattice of `Z^ambient`, stored as a full-column-rank basis.
#[derive(Clone, Debug)]
pub struct Lattice {
    ambient: usize,
    basis: IntMatrix,
}

impl Lattice {
    pub fn zero(ambient: usize) -> Self {
        Lattice { ambient, basis: IntMatrix::zeros(ambient, 0) }
    }

    /// The lattice spanned by the columns of `generators`.
    pub fn span(generators: &IntMatrix) -> Self {
        let ambient = generators.rows;
        let s = smith_normal_form(generators);
        // generators = left_inv * D * right_inv, so the span is spanned by
        // d_i * (column i of left_inv) for the nonzero d_i.
        let cols: Vec<Vec<BigInt>> = (0..s.rank)
            .map(|i| s.left_inv.column(i).into_iter().map(|v| v * &s.diagonal[i]).collect())
            .collect();
        Lattice { ambient, basis: IntMatrix::from_columns(ambient, &cols) }
    }

    pub fn span_of(ambient: usize, vectors: &[Vec<BigInt>]) -> Self {
        Self::span(&IntMatrix::from_columns(ambient, vectors))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.cols
    }

    pub fn basis(&self) -> Vec<Vec<BigInt>> {
        self.basis.columns()
    }

    pub fn basis_matrix(&self) -> &IntMatrix {
        &self.basis
    }

    /// Integer coordinates of `v` in this basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let s = smith_normal_form(&self.basis);
        // left * B * right = D, so B c = v  <=>  D (right^-1 c) = left v.
        let w = s.left.mul_vec(v);
        let mut y = Vec::with_capacity(self.basis.cols);
        for (i, wi) in w.iter().enumerate() {
            if i < s.rank {
                let (q, r) = wi.div_rem(&s.diagonal[i]);
                if !r.is_zero() {
                    return None;
                }
                y.push(q);
            } else if !wi.is_zero() {
                return None;
            }
        }
        y.truncate(self.basis.cols);
        Some(s.right.mul_vec(&y))
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    pub fn same_as(&self, other: &Lattice) -> bool {
        self.ambient == other.ambient && self.contains_lattice(other) && other.contains_lattice(self)
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        Lattice::span(&self.basis.hcat(&other.basis))
    }

    /// The quotient `self / sub`; `sub` must be contained in `self`.
    pub fn quotient(&self, sub: &Lattice) -> AbelianGroup {
        let coords: Vec<Vec<BigInt>> = sub
            .basis()
            .iter()
            .map(|v| self.coordinates(v).expect("quotient by a non-sublattice"))
            .collect();
        AbelianGroup::cokernel(&IntMatrix::from_columns(self.rank(), &coords))
    }
}
