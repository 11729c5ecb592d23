//! Dense matrices over an arbitrary ring descriptor, with row-reduction and
//! subspace machinery when the entries form a field.
//!
//! Row-vector convention throughout: vectors are rows and act on matrices
//! from the right, so `v · M` is the matrix product of a 1×n row with M.

use crate::ring::{Field, Ring};

/// Dense row-major matrix over the ring described by `R`.
#[derive(Debug, Clone)]
pub struct Mat<R: Ring> {
    ring: R,
    nrows: usize,
    ncols: usize,
    data: Vec<R::Elem>,
}

impl<R: Ring> PartialEq for Mat<R> {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.data == other.data
    }
}

impl<R: Ring> Mat<R> {
    pub fn zeros(ring: R, nrows: usize, ncols: usize) -> Self {
        let data = vec![ring.zero(); nrows * ncols];
        Mat {
            ring,
            nrows,
            ncols,
            data,
        }
    }

    pub fn identity(ring: R, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            let one = m.ring.one();
            m.set(i, i, one);
        }
        m
    }

    pub fn from_fn(ring: R, nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> R::Elem) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in 0..nrows {
            for c in 0..ncols {
                data.push(f(r, c));
            }
        }
        Mat {
            ring,
            nrows,
            ncols,
            data,
        }
    }

    pub fn from_rows(ring: R, ncols: usize, rows: Vec<Vec<R::Elem>>) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged row in matrix construction");
            data.extend(row);
        }
        Mat {
            ring,
            nrows,
            ncols,
            data,
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &R::Elem {
        &self.data[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: R::Elem) {
        self.data[r * self.ncols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[R::Elem] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[R::Elem]> {
        (0..self.nrows).map(move |r| self.row(r))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring.clone(), self.ncols, self.nrows, |r, c| {
            self.get(c, r).clone()
        })
    }

    pub fn map(&self, mut f: impl FnMut(&R::Elem) -> R::Elem) -> Self {
        Self::from_fn(self.ring.clone(), self.nrows, self.ncols, |r, c| f(self.get(r, c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_fn(self.ring.clone(), self.nrows, self.ncols, |r, c| {
            self.ring.add(self.get(r, c), other.get(r, c))
        })
    }

    /// Matrix product. Zero and unit entries short-circuit, which matters for
    /// the sparse embedding factors of the block construction.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in matrix product");
        let ring = self.ring.clone();
        let mut out = Self::zeros(ring.clone(), self.nrows, other.ncols);
        for r in 0..self.nrows {
            for i in 0..self.ncols {
                let a = self.get(r, i);
                if ring.is_zero(a) {
                    continue;
                }
                let a_is_one = ring.is_one(a);
                for c in 0..other.ncols {
                    let b = other.get(i, c);
                    if ring.is_zero(b) {
                        continue;
                    }
                    let term = if a_is_one { b.clone() } else { ring.mul(a, b) };
                    let acc = ring.add(out.get(r, c), &term);
                    out.set(r, c, acc);
                }
            }
        }
        out
    }

    pub fn scalar_mul(&self, s: &R::Elem) -> Self {
        self.map(|x| self.ring.mul(s, x))
    }

    /// `v · self` for a row vector `v` of length `nrows`.
    pub fn row_mul(&self, v: &[R::Elem]) -> Vec<R::Elem> {
        assert_eq!(v.len(), self.nrows);
        let ring = &self.ring;
        let mut out = vec![ring.zero(); self.ncols];
        for (i, vi) in v.iter().enumerate() {
            if ring.is_zero(vi) {
                continue;
            }
            let vi_is_one = ring.is_one(vi);
            for c in 0..self.ncols {
                let b = self.get(i, c);
                if ring.is_zero(b) {
                    continue;
                }
                let term = if vi_is_one { b.clone() } else { ring.mul(vi, b) };
                out[c] = ring.add(&out[c], &term);
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                let e = self.get(r, c);
                let ok = if r == c { self.ring.is_one(e) } else { self.ring.is_zero(e) };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Submatrix with the given (0-based) row deleted and column deleted.
    pub fn delete_row_col(&self, row: usize, col: usize) -> Self {
        assert!(row < self.nrows && col < self.ncols);
        Self::from_fn(self.ring.clone(), self.nrows - 1, self.ncols - 1, |r, c| {
            let rr = if r < row { r } else { r + 1 };
            let cc = if c < col { c } else { c + 1 };
            self.get(rr, cc).clone()
        })
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(
            self.ring.clone(),
            rows.end - rows.start,
            cols.end - cols.start,
            |r, c| self.get(rows.start + r, cols.start + c).clone(),
        )
    }
}

/// Reduced row-echelon form together with rank and 0-based pivot columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Echelon<R: Ring> {
    pub mat: Mat<R>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl<F: Field> Mat<F> {
    /// Reduced row-echelon form. Row space is preserved; zero rows are kept
    /// at the bottom of the returned matrix.
    pub fn rref(&self) -> Echelon<F> {
        let ring = self.ring.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0usize;
        for c in 0..m.ncols {
            if pr == m.nrows {
                break;
            }
            let Some(sel) = (pr..m.nrows).find(|&r| !ring.is_zero(m.get(r, c))) else {
                continue;
            };
            m.swap_rows(pr, sel);
            let inv = ring.inv(m.get(pr, c));
            if !ring.is_one(&inv) {
                for cc in 0..m.ncols {
                    let v = ring.mul(&inv, m.get(pr, cc));
                    m.set(pr, cc, v);
                }
            }
            for r in 0..m.nrows {
                if r != pr && !ring.is_zero(m.get(r, c)) {
                    let factor = m.get(r, c).clone();
                    for cc in 0..m.ncols {
                        let v = ring.add(m.get(r, cc), &ring.mul(&factor, m.get(pr, cc)));
                        m.set(r, cc, v);
                    }
                }
            }
            pivots.push(c);
            pr += 1;
        }
        Echelon {
            mat: m,
            rank: pr,
            pivots,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.ncols {
            self.data.swap(a * self.ncols + c, b * self.ncols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis (as matrix rows) of `{v : v · self = 0}`.
    pub fn left_kernel(&self) -> Mat<F> {
        let ring = self.ring.clone();
        // Row-reduce [self | I]; rows whose left part vanished record kernel combinations.
        let n = self.nrows;
        let aug = Mat::from_fn(ring.clone(), n, self.ncols + n, |r, c| {
            if c < self.ncols {
                self.get(r, c).clone()
            } else if c - self.ncols == r {
                ring.one()
            } else {
                ring.zero()
            }
        });
        // Eliminate only on the first self.ncols columns.
        let mut m = aug;
        let mut pr = 0usize;
        for c in 0..self.ncols {
            if pr == n {
                break;
            }
            let Some(sel) = (pr..n).find(|&r| !ring.is_zero(m.get(r, c))) else {
                continue;
            };
            m.swap_rows(pr, sel);
            let inv = ring.inv(m.get(pr, c));
            if !ring.is_one(&inv) {
                for cc in 0..m.ncols {
                    let v = ring.mul(&inv, m.get(pr, cc));
                    m.set(pr, cc, v);
                }
            }
            for r in 0..n {
                if r != pr && !ring.is_zero(m.get(r, c)) {
                    let factor = m.get(r, c).clone();
                    for cc in 0..m.ncols {
                        let v = ring.add(m.get(r, cc), &ring.mul(&factor, m.get(pr, cc)));
                        m.set(r, cc, v);
                    }
                }
            }
            pr += 1;
        }
        let rows: Vec<Vec<F::Elem>> = (pr..n)
            .map(|r| (0..n).map(|c| m.get(r, self.ncols + c).clone()).collect())
            .collect();
        Mat::from_rows(ring, n, rows).rref().mat_trimmed()
    }

    /// Basis of `{v : v ⟂ every row of self}` where the pairing is the sum of
    /// component-wise products. Dimension is `ncols − rank`.
    pub fn orth_complement(&self) -> Mat<F> {
        self.transpose().left_kernel()
    }

    /// Rows of `self` and `other` must have equal length; returns a basis of
    /// the intersection of the two row spaces.
    pub fn row_space_intersect(&self, other: &Self) -> Mat<F> {
        assert_eq!(
            self.ncols, other.ncols,
            "ambient space mismatch in subspace intersection"
        );
        let ring = self.ring.clone();
        // Kernel combos (x | y) of the stacked matrix satisfy x·self = y·other.
        let stacked = Mat::from_fn(ring.clone(), self.nrows + other.nrows, self.ncols, |r, c| {
            if r < self.nrows {
                self.get(r, c).clone()
            } else {
                other.get(r - self.nrows, c).clone()
            }
        });
        let kernel = stacked.left_kernel();
        let rows: Vec<Vec<F::Elem>> = (0..kernel.nrows())
            .map(|r| {
                let x = &kernel.row(r)[..self.nrows];
                self.row_mul(x)
            })
            .collect();
        Mat::from_rows(ring, self.ncols, rows).rref().mat_trimmed()
    }

    /// Basis of the sum of the two row spaces.
    pub fn row_space_sum(&self, other: &Self) -> Mat<F> {
        assert_eq!(self.ncols, other.ncols, "ambient space mismatch in subspace sum");
        let ring = self.ring.clone();
        let rows: Vec<Vec<F::Elem>> = self
            .rows()
            .chain(other.rows())
            .map(|r| r.to_vec())
            .collect();
        Mat::from_rows(ring, self.ncols, rows).rref().mat_trimmed()
    }

    /// True if `v` lies in the row space.
    pub fn row_space_contains(&self, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let ring = self.ring.clone();
        let rows: Vec<Vec<F::Elem>> = self.rows().map(|r| r.to_vec()).collect();
        let rank0 = Mat::from_rows(ring.clone(), self.ncols, rows.clone()).rank();
        let mut rows1 = rows;
        rows1.push(v.to_vec());
        let rank1 = Mat::from_rows(ring, self.ncols, rows1).rank();
        rank0 == rank1
    }

    /// Same row space, with zero rows removed and rows in canonical
    /// reduced-echelon order.
    pub fn canonical_basis(&self) -> Mat<F> {
        self.rref().mat_trimmed()
    }
}

impl<F: Field> Echelon<F> {
    fn mat_trimmed(self) -> Mat<F> {
        let ring = self.mat.ring().clone();
        let ncols = self.mat.ncols();
        let rows: Vec<Vec<F::Elem>> = (0..self.rank).map(|r| self.mat.row(r).to_vec()).collect();
        Mat::from_rows(ring, ncols, rows)
    }
}
