//! Bit-packed matrices over GF(2) for ambient dimensions up to 64.
//!
//! Each row is one `u64` with bit `c` (little-endian) holding column `c`.
//! Row addition is a single XOR, so reduction and span arithmetic on the
//! 32-dimensional block space stay cheap even inside search loops.

use std::fmt;

use crate::mat::Mat;
use crate::ring::F2;

/// Row-major bit matrix; every row is one machine word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        assert!(ncols <= 64, "bit-packed rows hold at most 64 columns");
        BitMatrix {
            ncols,
            rows: vec![0; nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n <= 64);
        BitMatrix {
            ncols: n,
            rows: (0..n).map(|i| 1u64 << i).collect(),
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<u64>) -> Self {
        assert!(ncols <= 64);
        let mask = mask(ncols);
        assert!(
            rows.iter().all(|&r| r & !mask == 0),
            "row has bits outside the declared width"
        );
        BitMatrix { ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> u64 {
        self.rows[r]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(c < self.ncols);
        (self.rows[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(c < self.ncols);
        if v {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    pub fn push_row(&mut self, row: u64) {
        assert!(row & !mask(self.ncols) == 0);
        self.rows.push(row);
    }

    pub fn transpose(&self) -> Self {
        let mut out = BitMatrix::zeros(self.ncols, self.nrows());
        for (r, &row) in self.rows.iter().enumerate() {
            let mut bits = row;
            while bits != 0 {
                let c = bits.trailing_zeros() as usize;
                out.rows[c] |= 1 << r;
                bits &= bits - 1;
            }
        }
        out
    }

    /// `v · self` for a row vector given as a bitmask over `self`'s rows.
    pub fn row_mul(&self, v: u64) -> u64 {
        let mut acc = 0u64;
        let mut bits = v;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= self.rows[i];
            bits &= bits - 1;
        }
        acc
    }

    /// Matrix product; `self.ncols` must equal `other.nrows()`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows(), "dimension mismatch in bit matrix product");
        BitMatrix {
            ncols: other.ncols,
            rows: self.rows.iter().map(|&r| other.row_mul(r)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.ncols);
        assert_eq!(self.nrows(), other.nrows());
        BitMatrix {
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(&a, &b)| a ^ b)
                .collect(),
        }
    }

    /// Reduced row-echelon form in place; returns the 0-based pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pr = 0usize;
        for c in 0..self.ncols {
            let bit = 1u64 << c;
            let Some(sel) = (pr..self.rows.len()).find(|&r| self.rows[r] & bit != 0) else {
                continue;
            };
            self.rows.swap(pr, sel);
            let pivot_row = self.rows[pr];
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != pr && *row & bit != 0 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(c);
            pr += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the row space: reduced echelon rows, no zero rows.
    /// Equal row spaces produce equal results.
    pub fn canonical_basis(&self) -> Self {
        let (m, pivots) = self.rref();
        BitMatrix {
            ncols: self.ncols,
            rows: m.rows[..pivots.len()].to_vec(),
        }
    }

    /// Basis of `{v : v · self = 0}`, as masks over `self`'s rows.
    pub fn left_kernel(&self) -> Self {
        let n = self.rows.len();
        assert!(n <= 64, "left kernel tracker needs one bit per row");
        // Augment each row with a tracker word and eliminate on the value part.
        let mut value: Vec<u64> = self.rows.clone();
        let mut track: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        let mut pr = 0usize;
        for c in 0..self.ncols {
            let bit = 1u64 << c;
            let Some(sel) = (pr..n).find(|&r| value[r] & bit != 0) else {
                continue;
            };
            value.swap(pr, sel);
            track.swap(pr, sel);
            for r in 0..n {
                if r != pr && value[r] & bit != 0 {
                    value[r] ^= value[pr];
                    track[r] ^= track[pr];
                }
            }
            pr += 1;
        }
        BitMatrix {
            ncols: n,
            rows: track[pr..].to_vec(),
        }
        .canonical_basis()
    }

    /// Basis of the vectors orthogonal to every row (standard bit-dot pairing).
    pub fn orth_complement(&self) -> Self {
        self.transpose().left_kernel()
    }

    pub fn row_space_intersect(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.ncols, "ambient space mismatch");
        let mut stacked = self.clone();
        stacked.rows.extend_from_slice(&other.rows);
        let kernel = stacked.left_kernel();
        let rows: Vec<u64> = (0..kernel.nrows())
            .map(|r| self.row_mul(kernel.row(r) & mask(self.nrows())))
            .collect();
        BitMatrix {
            ncols: self.ncols,
            rows,
        }
        .canonical_basis()
    }

    pub fn row_space_sum(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.ncols, "ambient space mismatch");
        let mut stacked = self.clone();
        stacked.rows.extend_from_slice(&other.rows);
        stacked.canonical_basis()
    }

    pub fn row_space_contains(&self, v: u64) -> bool {
        let mut m = self.clone();
        m.push_row(v & mask(self.ncols));
        m.rank() == self.rank()
    }

    /// Reduce `v` against the rows, which must already be in reduced echelon
    /// form; returns the residue (zero iff `v` is in the span).
    pub fn reduce_vector(&self, mut v: u64) -> u64 {
        for &row in &self.rows {
            let pivot = 1u64 << row.trailing_zeros();
            if v & pivot != 0 {
                v ^= row;
            }
        }
        v
    }

    pub fn to_mat(&self) -> Mat<F2> {
        Mat::from_fn(F2, self.nrows(), self.ncols, |r, c| self.get(r, c))
    }

    pub fn from_mat(m: &Mat<F2>) -> Self {
        let mut out = BitMatrix::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if *m.get(r, c) {
                    out.rows[r] |= 1 << c;
                }
            }
        }
        out
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for c in 0..self.ncols {
                write!(f, "{}", (row >> c) & 1)?;
            }
        }
        Ok(())
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_dense() {
        let m = BitMatrix::from_rows(4, vec![0b1010, 0b0110, 0b1010]);
        assert_eq!(BitMatrix::from_mat(&m.to_mat()), m);
    }

    #[test]
    fn rref_matches_dense() {
        let m = BitMatrix::from_rows(5, vec![0b10110, 0b01101, 0b11011, 0b10110]);
        let dense = m.to_mat().rref();
        let (packed, pivots) = m.rref();
        assert_eq!(pivots, dense.pivots);
        assert_eq!(packed.to_mat(), dense.mat);
    }

    #[test]
    fn left_kernel_annihilates() {
        let m = BitMatrix::from_rows(6, vec![0b101001, 0b011010, 0b110011, 0b000111]);
        let k = m.left_kernel();
        assert_eq!(k.nrows() + m.rank(), m.nrows());
        for r in 0..k.nrows() {
            assert_eq!(m.row_mul(k.row(r)), 0);
        }
    }

    #[test]
    fn complement_dimension_and_orthogonality() {
        let m = BitMatrix::from_rows(8, vec![0b10010110, 0b01010101]);
        let c = m.orth_complement();
        assert_eq!(c.nrows(), 8 - m.rank());
        for i in 0..m.nrows() {
            for j in 0..c.nrows() {
                assert_eq!((m.row(i) & c.row(j)).count_ones() % 2, 0);
            }
        }
    }

    #[test]
    fn intersect_sum_dimension_formula() {
        let a = BitMatrix::from_rows(6, vec![0b000111, 0b011100]);
        let b = BitMatrix::from_rows(6, vec![0b000111, 0b110001]);
        let i = a.row_space_intersect(&b);
        let s = a.row_space_sum(&b);
        assert_eq!(i.nrows() + s.nrows(), a.rank() + b.rank());
        for r in 0..i.nrows() {
            assert!(a.row_space_contains(i.row(r)));
            assert!(b.row_space_contains(i.row(r)));
        }
    }

    #[test]
    fn canonical_basis_is_span_invariant() {
        let a = BitMatrix::from_rows(4, vec![0b1100, 0b0110]);
        let b = BitMatrix::from_rows(4, vec![0b1010, 0b0110, 0b1100]);
        assert_eq!(a.canonical_basis(), b.canonical_basis());
    }

    #[test]
    fn reduce_vector_detects_membership() {
        let basis = BitMatrix::from_rows(5, vec![0b10011, 0b01010]).canonical_basis();
        assert_eq!(basis.reduce_vector(0b10011 ^ 0b01010), 0);
        assert_ne!(basis.reduce_vector(0b00100), 0);
    }
}
