//! Exact dense linear algebra over a field, plus a division-free determinant
//! over the commutative ring of Hurwitz series.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurwitz::HurwitzSeries;
use crate::ring::{FieldElem, FieldSpec};

/// Dense row-major matrix of exact field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    spec: FieldSpec,
    entries: Vec<FieldElem>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, spec: FieldSpec, entries: Vec<FieldElem>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.spec() != spec) {
            return Err(Error::MixedFields);
        }
        Ok(Matrix { rows, cols, spec, entries })
    }

    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Matrix::new(r, c, spec, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(spec: FieldSpec, rows: &[&[i64]]) -> Result<Self> {
        Matrix::from_rows(
            spec,
            rows.iter()
                .map(|row| row.iter().map(|&n| FieldElem::from_i64(n, spec)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize, spec: FieldSpec) -> Self {
        let mut entries = vec![FieldElem::zero(spec); n * n];
        for i in 0..n {
            entries[i * n + i] = FieldElem::one(spec);
        }
        Matrix { rows: n, cols: n, spec, entries }
    }

    pub fn zeros(rows: usize, cols: usize, spec: FieldSpec) -> Self {
        Matrix {
            rows,
            cols,
            spec,
            entries: vec![FieldElem::zero(spec); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: FieldElem) {
        assert_eq!(value.spec(), self.spec);
        self.entries[i * self.cols + j] = value;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_spec(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("add: shapes differ".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b).expect("same spec"))
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, spec: self.spec, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scalar_mul(&FieldElem::one(other.spec).neg())?)
    }

    pub fn scalar_mul(&self, c: &FieldElem) -> Result<Self> {
        if c.spec() != self.spec {
            return Err(Error::MixedFields);
        }
        let entries = self
            .entries
            .iter()
            .map(|a| a.mul(c).expect("same spec"))
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, spec: self.spec, entries })
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.at(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, spec: self.spec, entries }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = FieldElem::zero(self.spec);
                for t in 0..self.cols {
                    acc = acc
                        .add(&self.at(i, t).mul(other.at(t, j)).expect("same spec"))
                        .expect("same spec");
                }
                entries.push(acc);
            }
        }
        Ok(Matrix { rows: self.rows, cols: other.cols, spec: self.spec, entries })
    }

    /// Matrix-vector product A*v with v as a column.
    pub fn mul_vec(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch("mul_vec: length mismatch".into()));
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = FieldElem::zero(self.spec);
            for j in 0..self.cols {
                acc = acc.add(&self.at(i, j).mul(&v[j])?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("pow: non-square".into()));
        }
        let mut acc = Matrix::identity(self.rows, self.spec);
        for _ in 0..k {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// Determinant by Gaussian elimination with first-nonzero pivoting.
    pub fn det(&self) -> Result<FieldElem> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("det: non-square".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = FieldElem::one(self.spec);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.at(r, col).is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => return Ok(FieldElem::zero(self.spec)),
            };
            if pivot != col {
                m.swap_rows(pivot, col);
                det = det.neg();
            }
            let p = m.at(col, col).clone();
            det = det.mul(&p)?;
            let p_inv = p.inv()?;
            for r in col + 1..n {
                let factor = m.at(r, col).mul(&p_inv)?;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m.at(r, c).sub(&factor.mul(m.at(col, c))?)?;
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let cols = self.cols;
            self.entries.swap(a * cols + j, b * cols + j);
        }
    }

    /// Reduced row echelon form; returns the reduced matrix and the pivot
    /// columns in ascending order.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let pivot = (row..m.rows).find(|&r| !m.at(r, col).is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => continue,
            };
            m.swap_rows(pivot, row);
            let inv = m.at(row, col).inv().expect("nonzero pivot");
            for c in col..m.cols {
                let v = m.at(row, c).mul(&inv).expect("same spec");
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for c in col..m.cols {
                    let v = m
                        .at(r, c)
                        .sub(&factor.mul(m.at(row, c)).expect("same spec"))
                        .expect("same spec");
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inv: non-square".into()));
        }
        let n = self.rows;
        // [A | I] -> RREF -> [I | A^{-1}].
        let mut aug = Matrix::zeros(n, 2 * n, self.spec);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, FieldElem::one(self.spec));
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        let mut out = Matrix::zeros(n, n, self.spec);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.at(i, n + j).clone());
            }
        }
        Ok(out)
    }

    /// Solves A x = b for square invertible A.
    pub fn solve(&self, b: &[FieldElem]) -> Result<Vec<FieldElem>> {
        self.inv()?.mul_vec(b)
    }

    /// Solves A x = b for any A (least structural assumptions): returns None
    /// when the system is inconsistent, otherwise the solution with all free
    /// variables set to zero.
    pub fn solve_any(&self, b: &[FieldElem]) -> Result<Option<Vec<FieldElem>>> {
        if b.len() != self.rows {
            return Err(Error::ShapeMismatch("solve_any: length mismatch".into()));
        }
        if b.iter().any(|e| e.spec() != self.spec) {
            return Err(Error::MixedFields);
        }
        let mut aug = Matrix::zeros(self.rows, self.cols + 1, self.spec);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![FieldElem::zero(self.spec); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = r.at(row, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// Echelon-form basis of the nullspace, ordered by ascending free column.
    pub fn kernel(&self) -> Vec<Vec<FieldElem>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = vec![FieldElem::zero(self.spec); self.cols];
            v[free] = FieldElem::one(self.spec);
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = r.at(row, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Column-major vectorization, M(n,k) -> k^(n*n).
    pub fn vectorize(&self) -> Vec<FieldElem> {
        let mut v = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self.at(i, j).clone());
            }
        }
        v
    }

    pub fn from_vectorized(n: usize, spec: FieldSpec, v: &[FieldElem]) -> Result<Self> {
        if v.len() != n * n {
            return Err(Error::ShapeMismatch("from_vectorized: wrong length".into()));
        }
        let mut m = Matrix::zeros(n, n, spec);
        for j in 0..n {
            for i in 0..n {
                m.set(i, j, v[j * n + i].clone());
            }
        }
        Ok(m)
    }

    pub fn to_repr(&self) -> MatrixRepr {
        MatrixRepr {
            field: self.spec.to_string(),
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.at(i, j).to_string()).collect())
                .collect(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Evaluates sum c_i B^i by Horner's rule, with B^0 = I.
pub fn matrix_poly_eval(coeffs: &[FieldElem], b: &Matrix) -> Result<Matrix> {
    if !b.is_square() {
        return Err(Error::ShapeMismatch("matrix_poly_eval: non-square".into()));
    }
    let n = b.rows();
    let mut acc = Matrix::zeros(n, n, b.spec());
    for c in coeffs.iter().rev() {
        acc = acc.matmul(b)?;
        let diag = Matrix::identity(n, b.spec()).scalar_mul(c)?;
        acc = acc.add(&diag)?;
    }
    Ok(acc)
}

/// JSON matrix form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixRepr {
    pub field: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixRepr {
    pub fn to_matrix(&self) -> Result<Matrix> {
        let spec: FieldSpec = self.field.parse()?;
        let rows = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| FieldElem::parse(s, spec))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Matrix::from_rows(spec, rows)?;
        if (m.rows(), m.cols()) != (self.rows, self.cols) {
            return Err(Error::ShapeMismatch("declared shape disagrees with entries".into()));
        }
        Ok(m)
    }
}

/// Maximum size for the division-free determinant; minor expansion is
/// O(n 2^n) and Wronskians in scope never exceed this.
pub const SERIES_DET_MAX: usize = 12;

/// Square matrix of Hurwitz series, e.g. a Wronskian matrix.
#[derive(Clone)]
pub struct SeriesMatrix {
    n: usize,
    spec: FieldSpec,
    entries: Vec<HurwitzSeries>,
}

impl SeriesMatrix {
    pub fn new(n: usize, spec: FieldSpec, entries: Vec<HurwitzSeries>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "series matrix {}x{} needs {} entries, got {}",
                n,
                n,
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.spec() != spec) {
            return Err(Error::MixedFields);
        }
        Ok(SeriesMatrix { n, spec, entries })
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch("from_matrix: non-square".into()));
        }
        let n = m.rows();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| HurwitzSeries::constant(m.at(i, j).clone()))
            .collect();
        SeriesMatrix::new(n, m.spec(), entries)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &HurwitzSeries {
        &self.entries[i * self.n + j]
    }

    /// Division-free determinant by minor expansion over column subsets.
    /// Lazy: the result is exact at every coefficient a caller later probes.
    pub fn det_division_free(&self) -> Result<HurwitzSeries> {
        let n = self.n;
        if n > SERIES_DET_MAX {
            return Err(Error::SizeLimit(format!(
                "series determinant limited to {SERIES_DET_MAX}x{SERIES_DET_MAX}, got {n}x{n}"
            )));
        }
        if n == 0 {
            return Ok(HurwitzSeries::one(self.spec));
        }
        // dets[mask] = det of the submatrix on rows 0..popcount(mask) and the
        // columns in mask; expand along the last of those rows.
        let mut dets: HashMap<u32, HurwitzSeries> = HashMap::new();
        dets.insert(0, HurwitzSeries::one(self.spec));
        for r in 1..=n {
            let mut next: HashMap<u32, HurwitzSeries> = HashMap::new();
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != r {
                    continue;
                }
                let mut acc = HurwitzSeries::zero(self.spec);
                let mut t = 0usize; // position of j within the sorted mask
                for j in 0..n {
                    if mask & (1 << j) == 0 {
                        continue;
                    }
                    let minor = &dets[&(mask & !(1 << j))];
                    let term = self.at(r - 1, j).mul(minor)?;
                    // sign (-1)^{(r-1)+t}
                    acc = if (r - 1 + t) % 2 == 0 {
                        acc.add(&term)?
                    } else {
                        acc.sub(&term)?
                    };
                    t += 1;
                }
                next.insert(mask, acc);
            }
            dets = next;
        }
        Ok(dets.remove(&((1u32 << n) - 1)).expect("full mask present"))
    }
}
