//! Dense row-major matrices over `F_q` and exact Gauss-Jordan elimination.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldOrder};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major data, reducing every entry mod q.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<u64>, q: FieldOrder) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            data: data.into_iter().map(|v| q.elem(v)).collect(),
        })
    }

    pub fn from_rows(rows: &[Vec<u64>], q: FieldOrder) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat(), q)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, q: FieldOrder, rng: &mut R) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| rng.gen_range(0..q.q())).collect(),
        }
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &Self, q: FieldOrder) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "adding {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| q.add(a, b))
                .collect(),
        })
    }

    /// `self += factor * other`, entrywise.
    pub fn add_scaled(&mut self, other: &Self, factor: FieldElement, q: FieldOrder) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "accumulating {:?} into {:?}",
                other.shape(),
                self.shape()
            )));
        }
        if factor == 0 {
            return Ok(());
        }
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = q.mul_add(b, factor, *a);
        }
        Ok(())
    }

    pub fn scale(&self, factor: FieldElement, q: FieldOrder) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| q.mul(v, factor)).collect(),
        }
    }

    /// Rows `start..start + count`.
    pub fn row_block(&self, start: usize, count: usize) -> Self {
        Self {
            rows: count,
            cols: self.cols,
            data: self.data[start * self.cols..(start + count) * self.cols].to_vec(),
        }
    }

    /// Columns `start..start + count`.
    pub fn col_block(&self, start: usize, count: usize) -> Self {
        let data = (0..self.rows)
            .flat_map(|r| self.row(r)[start..start + count].iter().copied())
            .collect();
        Self {
            rows: self.rows,
            cols: count,
            data,
        }
    }

    /// Assembles a block matrix from a grid of equally shaped blocks.
    pub fn from_blocks(grid: &[Vec<FieldMatrix>]) -> Result<Self> {
        let Some(first) = grid.first().and_then(|row| row.first()) else {
            return Ok(Self::zeros(0, 0));
        };
        let (br, bc) = first.shape();
        let width = grid[0].len();
        if grid
            .iter()
            .any(|row| row.len() != width || row.iter().any(|b| b.shape() != (br, bc)))
        {
            return Err(Error::DimensionMismatch("irregular block grid".into()));
        }
        let mut out = Self::zeros(grid.len() * br, width * bc);
        for (gi, row) in grid.iter().enumerate() {
            for (gj, block) in row.iter().enumerate() {
                for r in 0..br {
                    let dst = (gi * br + r) * out.cols + gj * bc;
                    out.data[dst..dst + bc].copy_from_slice(block.row(r));
                }
            }
        }
        Ok(out)
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(parts: &[FieldMatrix]) -> Result<Self> {
        let cols = parts.first().map_or(0, |p| p.cols);
        if parts.iter().any(|p| p.cols != cols) {
            return Err(Error::DimensionMismatch(
                "vstack needs equal column counts".into(),
            ));
        }
        let data = parts.iter().flat_map(|p| p.data.iter().copied()).collect();
        Ok(Self {
            rows: parts.iter().map(|p| p.rows).sum(),
            cols,
            data,
        })
    }

    /// Places matrices with equal row counts side by side.
    pub fn hstack(parts: &[FieldMatrix]) -> Result<Self> {
        let rows = parts.first().map_or(0, |p| p.rows);
        if parts.iter().any(|p| p.rows != rows) {
            return Err(Error::DimensionMismatch(
                "hstack needs equal row counts".into(),
            ));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for p in parts {
                data.extend_from_slice(p.row(r));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rank(&self, q: FieldOrder) -> usize {
        let mut work = self.clone();
        work.eliminate(q, self.cols)
    }

    /// Reduced row echelon form on the first `pivot_cols` columns, in place.
    /// Returns the number of pivots found. The pivot in each column is the
    /// first nonzero entry at or below the current row.
    fn eliminate(&mut self, q: FieldOrder, pivot_cols: usize) -> usize {
        let cols = self.cols;
        let mut rank = 0;
        for col in 0..pivot_cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * cols + col] != 0) else {
                continue;
            };
            if p != rank {
                for c in 0..cols {
                    self.data.swap(p * cols + c, rank * cols + c);
                }
            }
            let inv = q
                .inv(self.data[rank * cols + col])
                .expect("pivot is nonzero");
            for c in col..cols {
                let v = &mut self.data[rank * cols + c];
                *v = q.mul(*v, inv);
            }
            let pivot_row: Vec<FieldElement> = self.data[rank * cols..(rank + 1) * cols].to_vec();
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let factor = self.data[r * cols + col];
                if factor == 0 {
                    continue;
                }
                let neg = q.neg(factor);
                let row = &mut self.data[r * cols..(r + 1) * cols];
                for c in col..cols {
                    row[c] = q.mul_add(pivot_row[c], neg, row[c]);
                }
            }
            rank += 1;
        }
        rank
    }
}

pub fn mat_mul(a: &FieldMatrix, b: &FieldMatrix, q: FieldOrder) -> Result<FieldMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "multiplying {:?} by {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (n, k, p) = (a.rows, a.cols, b.cols);
    let modulus = q.q() as u128;
    let mut out = FieldMatrix::zeros(n, p);
    // products are below 2^(2*bits); this many of them fit in a u128 on top
    // of one reduced residue
    let headroom = 127u64.saturating_sub(2 * q.bits()).min(40);
    let batch = (1u64 << headroom).saturating_sub(1).max(1);
    let mut acc = vec![0u128; p];
    for i in 0..n {
        acc.iter_mut().for_each(|v| *v = 0);
        let mut pending = 0u64;
        for t in 0..k {
            let av = a.data[i * k + t];
            if av == 0 {
                continue;
            }
            let brow = &b.data[t * p..(t + 1) * p];
            for (slot, &bv) in acc.iter_mut().zip(brow) {
                *slot += av as u128 * bv as u128;
            }
            pending += 1;
            if pending == batch {
                acc.iter_mut().for_each(|v| *v %= modulus);
                pending = 0;
            }
        }
        for (j, v) in acc.iter().enumerate() {
            out.data[i * p + j] = (*v % modulus) as u64;
        }
    }
    Ok(out)
}

/// Solves `m * x = rhs` for square `m`. `Ok(None)` means `m` is singular.
pub fn solve_linear(
    m: &FieldMatrix,
    rhs: &FieldMatrix,
    q: FieldOrder,
) -> Result<Option<FieldMatrix>> {
    let n = m.rows;
    if m.cols != n {
        return Err(Error::DimensionMismatch(format!(
            "coefficient matrix {:?} is not square",
            m.shape()
        )));
    }
    if rhs.rows != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, expected {n}",
            rhs.rows
        )));
    }
    let k = rhs.cols;
    let aug_cols = n + k;
    let mut aug = FieldMatrix::zeros(n, aug_cols);
    for r in 0..n {
        aug.data[r * aug_cols..r * aug_cols + n].copy_from_slice(m.row(r));
        aug.data[r * aug_cols + n..(r + 1) * aug_cols].copy_from_slice(rhs.row(r));
    }
    if aug.eliminate(q, n) < n {
        return Ok(None);
    }
    Ok(Some(aug.col_block(n, k)))
}
