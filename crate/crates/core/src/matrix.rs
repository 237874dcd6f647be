//! Dense matrices over GF(p): row echelon form, rank, stacking and determinants.
//!
//! Elimination always pivots on the first nonzero entry found scanning
//! down the current column, so echelon forms are reproducible run to run.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeModulus};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, entries: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(n: usize, p: PrimeModulus) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, p.one());
        }
        m
    }

    /// Builds a matrix from rows of equal length. An empty row list gives a `0 x cols` matrix.
    pub fn from_rows(rows: Vec<Vec<FieldElement>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            entries.extend(r);
        }
        Ok(DenseMatrix { rows: n, cols, entries })
    }

    /// Convenience constructor reducing signed integer entries mod `p`.
    pub fn from_i64(p: PrimeModulus, rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&v| p.elem_i64(v)).collect()).collect();
        Self::from_rows(rows, cols)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[FieldElement]> {
        // chunks_exact panics on a zero chunk size
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn push_row(&mut self, row: &[FieldElement]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!("pushed row has {} entries, expected {}", row.len(), self.cols)));
        }
        self.entries.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// Vertical concatenation `[self; other]`.
    pub fn stack(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot stack {}x{} over {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        entries.extend_from_slice(&self.entries);
        entries.extend_from_slice(&other.entries);
        Ok(DenseMatrix { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn take_first_columns(&self, k: usize) -> Result<DenseMatrix> {
        if k > self.cols {
            return Err(Error::Dimension(format!("cannot keep {k} columns of a matrix with {}", self.cols)));
        }
        let mut entries = Vec::with_capacity(self.rows * k);
        for r in self.row_iter() {
            entries.extend_from_slice(&r[..k]);
        }
        Ok(DenseMatrix { rows: self.rows, cols: k, entries })
    }

    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut entries = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            entries.extend_from_slice(self.row(r));
        }
        DenseMatrix { rows: idx.len(), cols: self.cols, entries }
    }

    /// Matrix-vector product `self * v`.
    pub fn apply(&self, v: &[FieldElement], p: PrimeModulus) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        Ok(self.row_iter().map(|r| dot(r, v, p)).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.entries.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }

    /// `row[target] -= factor * row[source]`, touching columns `from..` only.
    fn eliminate(&mut self, target: usize, source: usize, factor: FieldElement, from: usize, p: PrimeModulus) {
        let cols = self.cols;
        let (src, dst) = if source < target {
            let (head, tail) = self.entries.split_at_mut(target * cols);
            (&head[source * cols..(source + 1) * cols], &mut tail[..cols])
        } else {
            let (head, tail) = self.entries.split_at_mut(source * cols);
            (&tail[..cols], &mut head[target * cols..(target + 1) * cols])
        };
        for c in from..cols {
            if !src[c].is_zero() {
                dst[c] = p.sub(dst[c], p.mul(factor, src[c]));
            }
        }
    }

    /// Forward elimination in place. Returns pivot columns and the parity of row swaps.
    fn forward_eliminate(&mut self, p: PrimeModulus) -> (Vec<usize>, bool) {
        let mut pivots = Vec::new();
        let mut odd_swaps = false;
        let mut lead = 0;
        for col in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(pr) = (lead..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if pr != lead {
                self.swap_rows(pr, lead);
                odd_swaps = !odd_swaps;
            }
            let inv = p.inv(self.get(lead, col)).expect("pivot is nonzero");
            for r in lead + 1..self.rows {
                let v = self.get(r, col);
                if !v.is_zero() {
                    self.eliminate(r, lead, p.mul(v, inv), col, p);
                }
            }
            pivots.push(col);
            lead += 1;
        }
        (pivots, odd_swaps)
    }

    pub fn echelonize(&self, p: PrimeModulus) -> EchelonForm {
        let mut m = self.clone();
        let (pivot_cols, _) = m.forward_eliminate(p);
        EchelonForm { rank: pivot_cols.len(), matrix: m, pivot_cols }
    }

    pub fn rank(&self, p: PrimeModulus) -> usize {
        self.echelonize(p).rank
    }

    pub fn determinant(&self, p: PrimeModulus) -> Result<FieldElement> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!("determinant of non-square {}x{} matrix", self.rows, self.cols)));
        }
        let mut m = self.clone();
        let (pivots, odd_swaps) = m.forward_eliminate(p);
        if pivots.len() < self.rows {
            return Ok(p.zero());
        }
        let diag = p.product((0..self.rows).map(|i| m.get(i, i)));
        Ok(if odd_swaps { p.neg(diag) } else { diag })
    }
}

pub fn dot(a: &[FieldElement], b: &[FieldElement], p: PrimeModulus) -> FieldElement {
    p.sum(a.iter().zip(b).map(|(&x, &y)| p.mul(x, y)))
}

/// Row echelon form of a matrix together with its rank and pivot columns.
///
/// The first `rank` rows of `matrix` are nonzero and carry strictly
/// increasing pivot columns; any remaining rows are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonForm {
    pub matrix: DenseMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl EchelonForm {
    pub fn cols(&self) -> usize {
        self.matrix.cols
    }

    /// The nonzero rows only.
    pub fn basis(&self) -> DenseMatrix {
        let idx: Vec<usize> = (0..self.rank).collect();
        self.matrix.select_rows(&idx)
    }

    pub fn nullity(&self) -> usize {
        self.cols() - self.rank
    }

    pub fn free_cols(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols()];
        for &c in &self.pivot_cols {
            is_pivot[c] = true;
        }
        (0..self.cols()).filter(|&c| !is_pivot[c]).collect()
    }

    /// Solves for the kernel vector whose free coordinates are `free_values`
    /// (in the order of [`free_cols`](Self::free_cols)) by back-substitution.
    pub fn kernel_vector(&self, free_values: &[FieldElement], p: PrimeModulus) -> Result<Vec<FieldElement>> {
        let free = self.free_cols();
        if free.len() != free_values.len() {
            return Err(Error::Dimension(format!(
                "{} free values given for a kernel of dimension {}",
                free_values.len(),
                free.len()
            )));
        }
        let mut x = vec![p.zero(); self.cols()];
        for (&c, &v) in free.iter().zip(free_values) {
            x[c] = v;
        }
        for r in (0..self.rank).rev() {
            let pc = self.pivot_cols[r];
            let row = self.matrix.row(r);
            let rest = dot(&row[pc + 1..], &x[pc + 1..], p);
            let inv = p.inv(row[pc]).expect("pivot is nonzero");
            x[pc] = p.neg(p.mul(rest, inv));
        }
        Ok(x)
    }

    /// A uniformly random element of the kernel.
    pub fn random_kernel_vector<R: Rng + ?Sized>(&self, p: PrimeModulus, rng: &mut R) -> Vec<FieldElement> {
        let free: Vec<FieldElement> = (0..self.nullity()).map(|_| p.elem(rng.random_range(0..p.value()))).collect();
        self.kernel_vector(&free, p).expect("free value count matches nullity")
    }

    /// Echelon form of `[self; extra]`, reusing the already reduced rows.
    pub fn stack(&self, extra: &DenseMatrix, p: PrimeModulus) -> Result<EchelonForm> {
        if self.cols() != extra.cols {
            return Err(Error::Dimension(format!(
                "cannot stack {} columns over an echelon form with {}",
                extra.cols,
                self.cols()
            )));
        }
        Ok(self.basis().stack(extra)?.echelonize(p))
    }
}

pub fn rank_of_stack(base: &EchelonForm, extra: &DenseMatrix, p: PrimeModulus) -> Result<EchelonForm> {
    base.stack(extra, p)
}
