//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors pack 64 bits per word; matrices store one [`BitVec`] per row so
//! row operations are word-parallel XORs. Elimination always pivots on the
//! lowest free column, which keeps every derived basis reproducible across
//! runs and platforms.

use crate::error::{Error, Result};
use std::fmt;

/// A dense vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let (w, b) = (i / 64, i % 64);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// XORs `other` into `self` (vector addition over GF(2)).
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// `|self AND other|`, the overlap size of the two supports.
    pub fn and_popcount(&self, other: &BitVec) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `|self AND b AND c|`, the triple overlap size.
    pub fn and3_popcount(&self, b: &BitVec, c: &BitVec) -> usize {
        self.words
            .iter()
            .zip(&b.words)
            .zip(&c.words)
            .map(|((x, y), z)| (x & y & z).count_ones() as usize)
            .sum()
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        self.and_popcount(other) % 2 == 1
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn last_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Applies a permutation of coordinates: `out[perm[i]] = self[i]`.
    pub fn permute(&self, perm: &[usize]) -> BitVec {
        debug_assert_eq!(perm.len(), self.len);
        let mut out = BitVec::zeros(self.len);
        for i in self.iter_ones() {
            out.set(perm[i], true);
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>) -> Self {
        let cols = rows.first().map_or(0, BitVec::len);
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Self { rows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v);
    }

    pub fn push_row(&mut self, row: BitVec) {
        if self.rows.is_empty() {
            self.cols = row.len();
        }
        debug_assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let (a, b) = if src < dst {
            let (lo, hi) = self.rows.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.rows.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        b.xor_assign(a);
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Standard GF(2) matrix product.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.nrows(),
                self.cols,
                other.nrows(),
                other.ncols()
            )));
        }
        let mut out = BitMatrix::zeros(self.nrows(), other.ncols());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                out.rows[r].xor_assign(&other.rows[c]);
            }
        }
        Ok(out)
    }

    /// Matrix-vector product over GF(2).
    pub fn matvec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec: matrix has {} cols, vector has {} bits",
                self.cols,
                v.len()
            )));
        }
        let mut out = BitVec::zeros(self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            out.set(r, row.dot(v));
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self).rank
    }

    /// A basis of the kernel `{v : M v = 0}`.
    ///
    /// Returns `cols - rank` vectors. Free columns are enumerated in
    /// ascending order so the basis is canonical.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let ech = Echelon::new(self);
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in ech.pivot_cols.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            // Back-substitute: pivot variable r takes the value of the free
            // column's entry in the reduced row.
            for (r, &pc) in ech.pivot_cols.iter().enumerate() {
                if ech.rows[r].get(free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Row space membership test and witness: returns the coefficients
    /// expressing `v` as a combination of `self`'s rows, if possible.
    pub fn solve_row_combination(&self, v: &BitVec) -> Option<BitVec> {
        Echelon::new(self).express(v)
    }

    /// True iff `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVec) -> bool {
        self.solve_row_combination(v).is_some()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form with provenance tracking.
///
/// `combos[r]` records which original rows were XORed to produce reduced row
/// `r`, which is what lets `express` return an exact witness.
pub struct Echelon {
    pub rows: Vec<BitVec>,
    pub combos: Vec<BitVec>,
    pub pivot_cols: Vec<usize>,
    pub rank: usize,
    ncols: usize,
    nrows_orig: usize,
}

impl Echelon {
    pub fn new(m: &BitMatrix) -> Self {
        let nrows = m.nrows();
        let ncols = m.ncols();
        let mut rows = m.rows.to_vec();
        let mut combos: Vec<BitVec> = (0..nrows)
            .map(|i| BitVec::from_indices(nrows, &[i]))
            .collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            // Lowest column first, first available row as pivot.
            let Some(p) = (r..nrows).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            combos.swap(r, p);
            for i in 0..nrows {
                if i != r && rows[i].get(c) {
                    let (src, dst) = split_two(&mut rows, r, i);
                    dst.xor_assign(src);
                    let (src, dst) = split_two(&mut combos, r, i);
                    dst.xor_assign(src);
                }
            }
            pivot_cols.push(c);
            r += 1;
            if r == nrows {
                break;
            }
        }
        rows.truncate(r);
        combos.truncate(r);
        Self {
            rows,
            combos,
            pivot_cols,
            rank: r,
            ncols,
            nrows_orig: nrows,
        }
    }

    /// Expresses `v` in the row space; returns original-row coefficients.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        debug_assert_eq!(v.len(), self.ncols);
        let mut residue = v.clone();
        let mut combo = BitVec::zeros(self.nrows_orig);
        for (r, &c) in self.pivot_cols.iter().enumerate() {
            if residue.get(c) {
                residue.xor_assign(&self.rows[r]);
                combo.xor_assign(&self.combos[r]);
            }
        }
        residue.is_zero().then_some(combo)
    }

    /// Reduces `v` against the echelon rows, returning the canonical coset
    /// representative of `v` modulo the row space.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut residue = v.clone();
        for (r, &c) in self.pivot_cols.iter().enumerate() {
            if residue.get(c) {
                residue.xor_assign(&self.rows[r]);
            }
        }
        residue
    }
}

fn split_two<T>(v: &mut [T], a: usize, b: usize) -> (&T, &mut T) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Naive unpacked Gaussian elimination, kept independent of the packed
    /// implementation as the rank oracle.
    fn rank_oracle(m: &BitMatrix) -> usize {
        let mut a: Vec<Vec<bool>> = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m.get(r, c)).collect())
            .collect();
        let (nr, nc) = (m.nrows(), m.ncols());
        let mut rank = 0;
        for c in 0..nc {
            if let Some(p) = (rank..nr).find(|&r| a[r][c]) {
                a.swap(rank, p);
                for r in 0..nr {
                    if r != rank && a[r][c] {
                        for j in 0..nc {
                            a[r][j] ^= a[rank][j];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(0.5) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    #[test]
    fn rank_identity() {
        assert_eq!(BitMatrix::identity(4).rank(), 4);
    }

    #[test]
    fn rank_zero_matrix() {
        assert_eq!(BitMatrix::zeros(3, 5).rank(), 0);
    }

    #[test]
    fn rank_matches_oracle_and_transpose() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, rng.gen_range(1..12), rng.gen_range(1..20));
            assert_eq!(m.rank(), rank_oracle(&m));
            assert_eq!(m.rank(), m.transpose().rank());
        }
    }

    #[test]
    fn kernel_identity_is_empty() {
        assert!(BitMatrix::identity(3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_zero_matrix_is_full() {
        assert_eq!(BitMatrix::zeros(2, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn kernel_vectors_multiply_to_zero() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 10, 20);
            let basis = m.kernel_basis();
            assert_eq!(basis.len(), 20 - m.rank());
            for v in &basis {
                assert!(m.matvec(v).unwrap().is_zero());
            }
            // Basis vectors are linearly independent.
            let km = BitMatrix::from_rows(basis);
            assert_eq!(km.rank(), km.nrows());
        }
    }

    #[test]
    fn matvec_identity_and_zero() {
        let v = BitVec::from_indices(4, &[0, 2]);
        assert_eq!(BitMatrix::identity(4).matvec(&v).unwrap(), v);
        assert!(BitMatrix::zeros(4, 4).matvec(&v).unwrap().is_zero());
    }

    #[test]
    fn matvec_matches_popcount_parity_oracle() {
        let mut rng = StdRng::seed_from_u64(23);
        let m = random_matrix(&mut rng, 8, 15);
        for _ in 0..20 {
            let v = {
                let mut v = BitVec::zeros(15);
                for i in 0..15 {
                    if rng.gen_bool(0.3) {
                        v.set(i, true);
                    }
                }
                v
            };
            let prod = m.matvec(&v).unwrap();
            for r in 0..8 {
                assert_eq!(prod.get(r), m.row(r).and_popcount(&v) % 2 == 1);
            }
        }
    }

    #[test]
    fn matvec_dimension_mismatch_is_error() {
        let m = BitMatrix::zeros(2, 3);
        assert!(m.matvec(&BitVec::zeros(4)).is_err());
    }

    #[test]
    fn express_returns_exact_combination() {
        let mut rng = StdRng::seed_from_u64(37);
        let m = random_matrix(&mut rng, 6, 10);
        // Random combination of rows must be recoverable.
        for _ in 0..20 {
            let mut v = BitVec::zeros(10);
            let mut picked = BitVec::zeros(6);
            for r in 0..6 {
                if rng.gen_bool(0.5) {
                    v.xor_assign(m.row(r));
                    picked.set(r, true);
                }
            }
            let combo = m.solve_row_combination(&v).expect("in row space");
            let mut rebuilt = BitVec::zeros(10);
            for r in combo.iter_ones() {
                rebuilt.xor_assign(m.row(r));
            }
            assert_eq!(rebuilt, v);
        }
    }

    #[test]
    fn row_reduction_preserves_row_space() {
        let mut rng = StdRng::seed_from_u64(41);
        let m = random_matrix(&mut rng, 8, 12);
        let ech = Echelon::new(&m);
        let reduced = BitMatrix::from_rows(ech.rows.clone());
        // Mutual solvability: every original row in reduced space and back.
        for r in 0..m.nrows() {
            assert!(reduced.row_space_contains(m.row(r)));
        }
        for r in 0..reduced.nrows() {
            assert!(m.row_space_contains(reduced.row(r)));
        }
    }

    #[test]
    fn rank_plus_kernel_dim_is_cols() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..30 {
            let m = random_matrix(&mut rng, rng.gen_range(1..10), rng.gen_range(1..16));
            assert_eq!(m.rank() + m.kernel_basis().len(), m.ncols());
        }
    }
}
