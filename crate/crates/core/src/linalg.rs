//! Vectors, matrices, and subspaces over F_q: exact elimination for rank and
//! determinant, span/annihilator with both bases stored, subspace membership
//! probabilities computed two independent ways, and seeded sampling.
//!
//! Matrices over F_2 take a bit-packed path with word-level XOR elimination;
//! every other field goes through generic table-driven elimination.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fq::{FieldElement, FieldSpec};
use crate::measure::Measure;
use crate::rng::Stream;
use crate::scalar::{Cyclo, Scalar};
use crate::tol;

/// Enumeration budget for direct membership (elements of V) and for
/// annihilator scans (elements of V-perp).
pub const ENUM_BUDGET: u128 = 10_000_000;

#[derive(Clone)]
pub struct VectorFq {
    spec: Arc<FieldSpec>,
    entries: Vec<u32>,
}

impl PartialEq for VectorFq {
    fn eq(&self, other: &Self) -> bool {
        self.spec.tag() == other.spec.tag() && self.entries == other.entries
    }
}

impl Eq for VectorFq {}

impl fmt::Debug for VectorFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorFq{:?}", self.entries)
    }
}

impl VectorFq {
    pub fn new(spec: Arc<FieldSpec>, entries: Vec<FieldElement>) -> VectorFq {
        assert!(!entries.is_empty(), "vectors have positive length");
        let idx = entries.iter().map(|&e| spec.check(e)).collect();
        VectorFq { spec, entries: idx }
    }

    pub fn from_indices(spec: Arc<FieldSpec>, entries: Vec<u32>) -> VectorFq {
        assert!(!entries.is_empty(), "vectors have positive length");
        for &e in &entries {
            assert!(e < spec.q(), "entry index out of range");
        }
        VectorFq { spec, entries }
    }

    pub fn zero(spec: Arc<FieldSpec>, n: usize) -> VectorFq {
        VectorFq::from_indices(spec, vec![0; n])
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entry(&self, i: usize) -> FieldElement {
        self.spec.el(self.entries[i])
    }

    pub fn indices(&self) -> &[u32] {
        &self.entries
    }

    /// Zero-based positions of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }

    pub fn is_zero_vector(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn dot(&self, other: &VectorFq) -> FieldElement {
        assert_eq!(self.spec.tag(), other.spec.tag(), "mixed fields");
        assert_eq!(self.len(), other.len(), "length mismatch");
        let mut acc = 0u32;
        for (&a, &b) in self.entries.iter().zip(&other.entries) {
            acc = self.spec.add_idx(acc, self.spec.mul_idx(a, b));
        }
        self.spec.el(acc)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.entries)
    }
}

#[derive(Clone)]
pub struct MatrixFq {
    spec: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    data: Vec<u32>, // row-major element indices
}

impl PartialEq for MatrixFq {
    fn eq(&self, other: &Self) -> bool {
        self.spec.tag() == other.spec.tag()
            && self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
    }
}

impl Eq for MatrixFq {}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixFq {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl MatrixFq {
    pub fn zero(spec: Arc<FieldSpec>, rows: usize, cols: usize) -> MatrixFq {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        MatrixFq {
            spec,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(spec: Arc<FieldSpec>, n: usize) -> MatrixFq {
        let mut m = MatrixFq::zero(spec, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[VectorFq]) -> MatrixFq {
        assert!(!rows.is_empty());
        let spec = Arc::clone(rows[0].spec());
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.spec().tag(), spec.tag(), "mixed fields");
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r.indices());
        }
        MatrixFq {
            spec,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(
        spec: Arc<FieldSpec>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> MatrixFq {
        let mut m = MatrixFq::zero(Arc::clone(&spec), rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = spec.check(f(i, j));
            }
        }
        m
    }

    pub(crate) fn from_index_data(
        spec: Arc<FieldSpec>,
        rows: usize,
        cols: usize,
        data: Vec<u32>,
    ) -> MatrixFq {
        assert_eq!(data.len(), rows * cols);
        MatrixFq {
            spec,
            rows,
            cols,
            data,
        }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> FieldElement {
        self.spec.el(self.data[i * self.cols + j])
    }

    pub(crate) fn entry_idx(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> VectorFq {
        VectorFq::from_indices(
            Arc::clone(&self.spec),
            self.data[i * self.cols..(i + 1) * self.cols].to_vec(),
        )
    }

    pub fn matmul(&self, other: &MatrixFq) -> MatrixFq {
        assert_eq!(self.spec.tag(), other.spec.tag(), "mixed fields");
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = MatrixFq::zero(Arc::clone(&self.spec), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.data[k * other.cols + j];
                    let prod = self.spec.mul_idx(a, b);
                    let cell = &mut out.data[i * other.cols + j];
                    *cell = self.spec.add_idx(*cell, prod);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        if self.spec.q() == 2 {
            return BitMatrix::from_matrix(self).rank();
        }
        let mut work = self.data.clone();
        eliminate(&self.spec, &mut work, self.rows, self.cols).0
    }

    /// Product of pivots times the parity sign of the row swaps; zero when
    /// rank falls short.
    pub fn determinant(&self) -> Result<FieldElement> {
        if self.rows != self.cols {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.spec.q() == 2 {
            let full = BitMatrix::from_matrix(self).rank() == self.rows;
            return Ok(if full { self.spec.one() } else { self.spec.zero() });
        }
        let mut work = self.data.clone();
        let (rank, det) = eliminate(&self.spec, &mut work, self.rows, self.cols);
        Ok(if rank == self.rows {
            self.spec.el(det)
        } else {
            self.spec.zero()
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<u32>> = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect();
        serde_json::json!(rows)
    }
}

/// Forward elimination; returns (rank, determinant index for square
/// full-rank input). The sign of row swaps is folded in as the field image
/// of -1.
fn eliminate(spec: &FieldSpec, data: &mut [u32], rows: usize, cols: usize) -> (usize, u32) {
    let mut pivot_row = 0usize;
    let mut det: u32 = 1;
    for col in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| data[r * cols + col] != 0) else {
            continue;
        };
        if r != pivot_row {
            for c in 0..cols {
                data.swap(r * cols + c, pivot_row * cols + c);
            }
            det = spec.neg_idx(det);
        }
        let pivot = data[pivot_row * cols + col];
        det = spec.mul_idx(det, pivot);
        let pivot_inv = spec.inv_idx(pivot).expect("pivot is nonzero");
        for r2 in (pivot_row + 1)..rows {
            let lead = data[r2 * cols + col];
            if lead == 0 {
                continue;
            }
            let factor = spec.mul_idx(lead, pivot_inv);
            for c in col..cols {
                let sub = spec.mul_idx(factor, data[pivot_row * cols + c]);
                data[r2 * cols + c] = spec.sub_idx(data[r2 * cols + c], sub);
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    (pivot_row, det)
}

/// Reduced row echelon form in place; returns rank. Zero rows are moved to
/// the bottom.
fn rref(spec: &FieldSpec, data: &mut Vec<u32>, rows: usize, cols: usize) -> usize {
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| data[r * cols + col] != 0) else {
            continue;
        };
        for c in 0..cols {
            data.swap(r * cols + c, pivot_row * cols + c);
        }
        let inv = spec.inv_idx(data[pivot_row * cols + col]).unwrap();
        for c in col..cols {
            data[pivot_row * cols + c] = spec.mul_idx(data[pivot_row * cols + c], inv);
        }
        for r2 in 0..rows {
            if r2 == pivot_row {
                continue;
            }
            let factor = data[r2 * cols + col];
            if factor == 0 {
                continue;
            }
            for c in col..cols {
                let sub = spec.mul_idx(factor, data[pivot_row * cols + c]);
                data[r2 * cols + c] = spec.sub_idx(data[r2 * cols + c], sub);
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    data.truncate(pivot_row * cols);
    pivot_row
}

// ---- bit-packed F_2 matrices ----

/// Rows of an F_2 matrix packed into 64-bit words.
pub(crate) struct BitMatrix {
    pub cols: usize,
    words: usize,
    rows: Vec<u64>, // flat, stride = words
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> BitMatrix {
        let words = cols.div_ceil(64);
        BitMatrix {
            cols,
            words,
            rows: vec![0; rows * words],
        }
    }

    pub fn from_matrix(m: &MatrixFq) -> BitMatrix {
        debug_assert_eq!(m.spec.q(), 2);
        let mut b = BitMatrix::new(m.rows, m.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                if m.data[i * m.cols + j] != 0 {
                    b.set(i, j);
                }
            }
        }
        b
    }

    pub fn n_rows(&self) -> usize {
        if self.words == 0 {
            0
        } else {
            self.rows.len() / self.words
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize) {
        self.rows[r * self.words + c / 64] |= 1u64 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.rows[r * self.words..(r + 1) * self.words]
    }

    pub fn set_row(&mut self, r: usize, words: &[u64]) {
        self.rows[r * self.words..(r + 1) * self.words].copy_from_slice(words);
    }

    pub fn rank(&self) -> usize {
        let mut work = self.rows.clone();
        let n = self.n_rows();
        bit_rank(&mut work, n, self.cols, self.words)
    }

    /// Rank after appending one extra row; used for membership tests
    /// without rebuilding.
    pub fn rank_with_extra(&self, extra: &[u64]) -> usize {
        let mut work = self.rows.clone();
        work.extend_from_slice(extra);
        bit_rank(&mut work, self.n_rows() + 1, self.cols, self.words)
    }
}

fn bit_rank(work: &mut [u64], rows: usize, cols: usize, words: usize) -> usize {
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(r) = (pivot_row..rows).find(|&r| work[r * words + w] & b != 0) else {
            continue;
        };
        if r != pivot_row {
            for k in 0..words {
                work.swap(r * words + k, pivot_row * words + k);
            }
        }
        for r2 in (pivot_row + 1)..rows {
            if work[r2 * words + w] & b != 0 {
                for k in 0..words {
                    work[r2 * words + k] ^= work[pivot_row * words + k];
                }
            }
        }
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    pivot_row
}

// ---- subspaces ----

/// Subspace of F_q^n, stored with a row-reduced basis and a row-reduced
/// basis of its annihilator, kept consistent at construction.
#[derive(Clone)]
pub struct Subspace {
    spec: Arc<FieldSpec>,
    ambient: usize,
    basis: Vec<u32>,       // dim x ambient, RREF
    annihilator: Vec<u32>, // codim x ambient, RREF
    dim: usize,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} of F_{}^{})",
            self.dim,
            self.spec.q(),
            self.ambient
        )
    }
}

impl Subspace {
    /// Span of the given vectors.
    pub fn span(spec: &Arc<FieldSpec>, vectors: &[VectorFq]) -> Subspace {
        assert!(!vectors.is_empty(), "span needs the ambient dimension");
        let ambient = vectors[0].len();
        let mut data: Vec<u32> = Vec::with_capacity(vectors.len() * ambient);
        for v in vectors {
            assert_eq!(v.spec().tag(), spec.tag(), "mixed fields");
            assert_eq!(v.len(), ambient, "ragged vectors");
            data.extend_from_slice(v.indices());
        }
        Subspace::from_basis_data(spec, ambient, data, vectors.len())
    }

    pub fn full(spec: &Arc<FieldSpec>, ambient: usize) -> Subspace {
        let id: Vec<u32> = (0..ambient * ambient)
            .map(|k| u32::from(k % (ambient + 1) == 0))
            .collect();
        Subspace::from_basis_data(spec, ambient, id, ambient)
    }

    pub fn zero_space(spec: &Arc<FieldSpec>, ambient: usize) -> Subspace {
        Subspace::from_basis_data(spec, ambient, vec![], 0)
    }

    /// The hyperplane orthogonal to a nonzero vector.
    pub fn hyperplane(w: &VectorFq) -> Subspace {
        assert!(!w.is_zero_vector(), "hyperplane needs a nonzero normal");
        let spec = Arc::clone(w.spec());
        let ann = Subspace::from_basis_data(&spec, w.len(), w.indices().to_vec(), 1);
        // the annihilator of <w> is the hyperplane
        ann.annihilator()
    }

    pub fn from_annihilator_rows(spec: &Arc<FieldSpec>, ambient: usize, rows: &[VectorFq]) -> Subspace {
        if rows.is_empty() {
            return Subspace::full(spec, ambient);
        }
        Subspace::span(spec, rows).annihilator()
    }

    fn from_basis_data(
        spec: &Arc<FieldSpec>,
        ambient: usize,
        mut data: Vec<u32>,
        nrows: usize,
    ) -> Subspace {
        let dim = rref(spec, &mut data, nrows, ambient);
        let annihilator = null_space(spec, &data, dim, ambient);
        debug_assert_eq!(annihilator.len() / ambient.max(1) + dim, ambient);
        Subspace {
            spec: Arc::clone(spec),
            ambient,
            basis: data,
            annihilator,
            dim,
        }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim
    }

    pub fn basis_rows(&self) -> Vec<VectorFq> {
        (0..self.dim)
            .map(|i| {
                VectorFq::from_indices(
                    Arc::clone(&self.spec),
                    self.basis[i * self.ambient..(i + 1) * self.ambient].to_vec(),
                )
            })
            .collect()
    }

    pub fn annihilator_rows(&self) -> Vec<VectorFq> {
        (0..self.codim())
            .map(|i| {
                VectorFq::from_indices(
                    Arc::clone(&self.spec),
                    self.annihilator[i * self.ambient..(i + 1) * self.ambient].to_vec(),
                )
            })
            .collect()
    }

    /// The annihilator as a subspace, recomputed from scratch (so the
    /// double-annihilator identity is a real check, not a tautology).
    pub fn annihilator(&self) -> Subspace {
        Subspace::from_basis_data(
            &self.spec,
            self.ambient,
            self.annihilator.clone(),
            self.codim(),
        )
    }

    pub fn contains(&self, v: &VectorFq) -> bool {
        assert_eq!(v.spec().tag(), self.spec.tag(), "mixed fields");
        assert_eq!(v.len(), self.ambient, "dimension mismatch");
        // reduce v by the RREF basis
        let mut x = v.indices().to_vec();
        for i in 0..self.dim {
            let row = &self.basis[i * self.ambient..(i + 1) * self.ambient];
            let pivot_col = row.iter().position(|&e| e != 0).unwrap();
            let factor = x[pivot_col];
            if factor != 0 {
                for c in pivot_col..self.ambient {
                    let sub = self.spec.mul_idx(factor, row[c]);
                    x[c] = self.spec.sub_idx(x[c], sub);
                }
            }
        }
        x.iter().all(|&e| e == 0)
    }

    pub fn eq_subspace(&self, other: &Subspace) -> bool {
        self.spec.tag() == other.spec.tag()
            && self.ambient == other.ambient
            && self.basis == other.basis
    }

    /// Streams every element of the subspace spanned by `rows` (the basis or
    /// the annihilator) as index vectors.
    fn stream_combinations(
        spec: &FieldSpec,
        rows: &[u32],
        nrows: usize,
        ambient: usize,
        emit: &mut dyn FnMut(&[u32]),
    ) {
        let q = spec.q();
        let mut partial: Vec<Vec<u32>> = vec![vec![0; ambient]; nrows + 1];
        let mut coeff = vec![0u32; nrows];
        if nrows == 0 {
            emit(&partial[0]);
            return;
        }
        let mut depth = 0usize;
        loop {
            if depth == nrows {
                emit(&partial[nrows]);
                // backtrack to the deepest level with an unfinished loop
                depth -= 1;
                loop {
                    coeff[depth] += 1;
                    if coeff[depth] < q {
                        break;
                    }
                    coeff[depth] = 0;
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
            }
            // fill partial[depth + 1] = partial[depth] + coeff * row[depth]
            let c = coeff[depth];
            let row = &rows[depth * ambient..(depth + 1) * ambient];
            let (lo, hi) = partial.split_at_mut(depth + 1);
            let src = &lo[depth];
            let dst = &mut hi[0];
            if c == 0 {
                dst.copy_from_slice(src);
            } else {
                for j in 0..ambient {
                    dst[j] = spec.add_idx(src[j], spec.mul_idx(c, row[j]));
                }
            }
            depth += 1;
        }
    }

    /// Visits every element of V.
    pub fn for_each_element(&self, mut emit: impl FnMut(&[u32])) {
        Subspace::stream_combinations(&self.spec, &self.basis, self.dim, self.ambient, &mut emit);
    }

    /// Visits every element of the annihilator.
    pub fn for_each_annihilator_element(&self, mut emit: impl FnMut(&[u32])) {
        Subspace::stream_combinations(
            &self.spec,
            &self.annihilator,
            self.codim(),
            self.ambient,
            &mut emit,
        );
    }

    pub fn size(&self) -> u128 {
        (self.spec.q() as u128).pow(self.dim as u32)
    }

    pub fn annihilator_size(&self) -> u128 {
        (self.spec.q() as u128).pow(self.codim() as u32)
    }

    /// Minimum support weight over the nonzero annihilator vectors, with a
    /// witness. Exhaustive scan of V-perp, budget-guarded.
    pub fn min_annihilator_support(&self) -> Result<Option<(usize, VectorFq)>> {
        if self.annihilator_size() > ENUM_BUDGET {
            return Err(Error::Budget {
                what: "annihilator enumeration",
                needs: self.annihilator_size(),
                budget: ENUM_BUDGET,
            });
        }
        let mut best: Option<(usize, Vec<u32>)> = None;
        self.for_each_annihilator_element(|x| {
            let supp = x.iter().filter(|&&e| e != 0).count();
            if supp == 0 {
                return;
            }
            if best.as_ref().is_none_or(|(b, _)| supp < *b) {
                best = Some((supp, x.to_vec()));
            }
        });
        Ok(best.map(|(s, v)| (s, VectorFq::from_indices(Arc::clone(&self.spec), v))))
    }

    /// Serialized as the annihilator basis (row index vectors).
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<u32>> = (0..self.codim())
            .map(|i| self.annihilator[i * self.ambient..(i + 1) * self.ambient].to_vec())
            .collect();
        serde_json::json!({ "ambient": self.ambient, "annihilator": rows })
    }
}

/// Null space of the RREF rows, itself in RREF.
fn null_space(spec: &FieldSpec, rows: &[u32], nrows: usize, ambient: usize) -> Vec<u32> {
    let mut pivot_cols = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let row = &rows[i * ambient..(i + 1) * ambient];
        pivot_cols.push(row.iter().position(|&e| e != 0).unwrap());
    }
    let free_cols: Vec<usize> = (0..ambient).filter(|c| !pivot_cols.contains(c)).collect();
    let mut out = Vec::with_capacity(free_cols.len() * ambient);
    for &fc in &free_cols {
        let mut v = vec![0u32; ambient];
        v[fc] = 1;
        for (i, &pc) in pivot_cols.iter().enumerate() {
            // x_{pc} = -R[i][fc]
            v[pc] = spec.neg_idx(rows[i * ambient + fc]);
        }
        out.extend_from_slice(&v);
    }
    let mut data = out;
    let rank = rref(spec, &mut data, free_cols.len(), ambient);
    debug_assert_eq!(rank, free_cols.len());
    data
}

// ---- membership probabilities ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MembershipMethod {
    /// Sum the weight products over the elements of V.
    Direct,
    /// q^{-k} sum over the annihilator of the Fourier coefficient products.
    Fourier,
}

/// P(X in V) for X with iid entries from `mu`, by either method. The two
/// agree exactly in rational mode and to `tol::MEMBERSHIP_AGREE` in f64.
pub fn membership_probability<S: Scalar>(
    v: &Subspace,
    mu: &Measure<S>,
    method: MembershipMethod,
) -> Result<S> {
    assert_eq!(v.spec().tag(), mu.spec().tag(), "measure field mismatch");
    match method {
        MembershipMethod::Direct => {
            if v.size() > ENUM_BUDGET {
                return Err(Error::Budget {
                    what: "subspace enumeration",
                    needs: v.size(),
                    budget: ENUM_BUDGET,
                });
            }
            let mut total = S::zero();
            v.for_each_element(|x| {
                let mut w = S::one();
                for &e in x {
                    w = w * mu.weight_idx(e).clone();
                }
                total = total.clone() + w;
            });
            Ok(total)
        }
        MembershipMethod::Fourier => {
            if v.annihilator_size() > ENUM_BUDGET {
                return Err(Error::Budget {
                    what: "annihilator enumeration",
                    needs: v.annihilator_size(),
                    budget: ENUM_BUDGET,
                });
            }
            let p = v.spec().p() as u32;
            let mut acc = Cyclo::<S>::zero(p);
            v.for_each_annihilator_element(|zeta| {
                let mut prod = Cyclo::<S>::one(p);
                for &e in zeta {
                    prod = prod * mu.fourier_idx(e).clone();
                }
                acc = acc.clone() + prod;
            });
            let k = v.codim() as u32;
            let scale = S::from_ratio(1, (v.spec().q() as u64).pow(k));
            let acc = acc.scale(&scale);
            Ok(cyclo_real_part(&acc))
        }
    }
}

/// Real scalar value of a (mathematically real) cyclotomic number: exact
/// when the canonical form is rational, f64 real part otherwise.
pub(crate) fn cyclo_real_part<S: Scalar>(z: &Cyclo<S>) -> S {
    match z.as_scalar() {
        Some(s) => s,
        None => S::from_f64_approx(z.re_approx()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OdlyzkoReport {
    pub probability: f64,
    pub bound: f64,
    pub codim: usize,
    pub alpha: f64,
    pub pass: bool,
}

/// Checks P(X in V) <= (1 - alpha)^codim(V).
pub fn odlyzko_check<S: Scalar>(v: &Subspace, mu: &Measure<S>) -> Result<OdlyzkoReport> {
    let method = if v.size() <= v.annihilator_size() {
        MembershipMethod::Direct
    } else {
        MembershipMethod::Fourier
    };
    let prob = membership_probability(v, mu, method)?;
    let alpha = mu.alpha().clone();
    let k = v.codim();
    let pass = if S::EXACT {
        let mut bound = S::one();
        let one_minus = S::one() - alpha.clone();
        for _ in 0..k {
            bound = bound * one_minus.clone();
        }
        prob <= bound
    } else {
        prob.approx() <= (1.0 - alpha.approx()).powi(k as i32) + tol::EXACT_EQ
    };
    Ok(OdlyzkoReport {
        probability: prob.approx(),
        bound: (1.0 - alpha.approx()).powi(k as i32),
        codim: k,
        alpha: alpha.approx(),
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceBoundReport {
    pub r: usize,
    pub conditional: f64,
    pub bound: f64,
    pub pass: bool,
    pub mode: &'static str,
    pub trials: Option<u64>,
}

/// Exact check of P(Z_1..Z_r in V | linearly independent) <= P(Z in V)^r by
/// weighted enumeration of all r-tuples.
pub fn independence_bound_exact<S: Scalar>(
    mu: &Measure<S>,
    v: &Subspace,
    r: usize,
) -> Result<IndependenceBoundReport> {
    let n = v.ambient_dim();
    let q = mu.spec().q() as u128;
    let tuples = q.checked_pow((n * r) as u32).unwrap_or(u128::MAX);
    const EXACT_BUDGET: u128 = 2_000_000;
    if tuples > EXACT_BUDGET {
        return Err(Error::Budget {
            what: "independence-bound tuple enumeration",
            needs: tuples,
            budget: EXACT_BUDGET,
        });
    }
    let spec = mu.spec();
    let qn = (q as u64).pow(n as u32);
    // weight of a vector by its entries
    let vec_weight = |code: u64| -> (S, Vec<u32>) {
        let mut w = S::one();
        let mut entries = Vec::with_capacity(n);
        let mut rest = code;
        for _ in 0..n {
            let e = (rest % q as u64) as u32;
            rest /= q as u64;
            w = w * mu.weight_idx(e).clone();
            entries.push(e);
        }
        (w, entries)
    };
    let mut p_joint = S::zero();
    let mut p_indep = S::zero();
    let mut codes = vec![0u64; r];
    loop {
        let mut w = S::one();
        let mut rows: Vec<u32> = Vec::with_capacity(r * n);
        let mut all_in_v = true;
        for &c in &codes {
            let (wc, entries) = vec_weight(c);
            w = w * wc;
            if all_in_v {
                let vv = VectorFq::from_indices(Arc::clone(spec), entries.clone());
                all_in_v = v.contains(&vv);
            }
            rows.extend_from_slice(&entries);
        }
        if !w.is_zero() {
            let mut work = rows.clone();
            let indep = eliminate(spec, &mut work, r, n).0 == r;
            if indep {
                p_indep = p_indep + w.clone();
                if all_in_v {
                    p_joint = p_joint + w;
                }
            }
        }
        // odometer over the r vector codes
        let mut pos = 0;
        loop {
            if pos == r {
                break;
            }
            codes[pos] += 1;
            if codes[pos] < qn {
                break;
            }
            codes[pos] = 0;
            pos += 1;
        }
        if pos == r {
            break;
        }
    }
    if p_indep.is_zero() {
        return Err(Error::ZeroConditioning);
    }
    let single = membership_probability(v, mu, MembershipMethod::Direct)?;
    let mut bound = S::one();
    for _ in 0..r {
        bound = bound * single.clone();
    }
    let conditional = p_joint.clone() / p_indep.clone();
    let pass = if S::EXACT {
        conditional <= bound
    } else {
        conditional.approx() <= bound.approx() + tol::EXACT_EQ
    };
    Ok(IndependenceBoundReport {
        r,
        conditional: conditional.approx(),
        bound: bound.approx(),
        pass,
        mode: "exact",
        trials: None,
    })
}

/// Monte Carlo version of the independence bound check; asserts up to
/// `tol::MC_SIGMAS` binomial standard errors.
pub fn independence_bound_mc<S: Scalar>(
    mu: &Measure<S>,
    v: &Subspace,
    r: usize,
    trials: u64,
    seed: u64,
) -> Result<IndependenceBoundReport> {
    let n = v.ambient_dim();
    let sampler = MeasureSampler::new(mu);
    let spec = mu.spec();
    let mut indep_count = 0u64;
    let mut joint_count = 0u64;
    for t in 0..trials {
        let mut stream = Stream::new(seed, t);
        let mut rows: Vec<u32> = Vec::with_capacity(r * n);
        let mut vectors = Vec::with_capacity(r);
        for _ in 0..r {
            let entries: Vec<u32> = (0..n).map(|_| sampler.draw(&mut stream)).collect();
            rows.extend_from_slice(&entries);
            vectors.push(entries);
        }
        let mut work = rows.clone();
        if eliminate(spec, &mut work, r, n).0 != r {
            continue;
        }
        indep_count += 1;
        let all_in = vectors.iter().all(|entries| {
            v.contains(&VectorFq::from_indices(Arc::clone(spec), entries.clone()))
        });
        if all_in {
            joint_count += 1;
        }
    }
    if indep_count == 0 {
        return Err(Error::ZeroConditioning);
    }
    let single = membership_probability(v, mu, MembershipMethod::Direct)?;
    let bound = single.approx().powi(r as i32);
    let estimate = joint_count as f64 / indep_count as f64;
    let se = (estimate * (1.0 - estimate) / indep_count as f64).sqrt();
    let pass = estimate <= bound + tol::MC_SIGMAS * se + tol::EXACT_EQ;
    Ok(IndependenceBoundReport {
        r,
        conditional: estimate,
        bound,
        pass,
        mode: "mc",
        trials: Some(trials),
    })
}

// ---- sampling ----

/// Inverse-CDF sampler over the element ordering of a measure.
pub struct MeasureSampler {
    cdf: Vec<f64>,
}

impl MeasureSampler {
    pub fn new<S: Scalar>(mu: &Measure<S>) -> MeasureSampler {
        let mut cdf = Vec::with_capacity(mu.weights().len());
        let mut acc = 0.0;
        for w in mu.weights() {
            acc += w.approx();
            cdf.push(acc);
        }
        MeasureSampler { cdf }
    }

    /// Element index sampled by inverse CDF.
    #[inline]
    pub fn draw(&self, stream: &mut Stream) -> u32 {
        let u = stream.next_f64();
        // first index with u < cdf[i]
        match self
            .cdf
            .binary_search_by(|c| c.partial_cmp(&u).unwrap())
        {
            Ok(i) => (i + 1).min(self.cdf.len() - 1) as u32,
            Err(i) => i.min(self.cdf.len() - 1) as u32,
        }
    }
}

pub fn sample_vector<S: Scalar>(mu: &Measure<S>, n: usize, stream: &mut Stream) -> VectorFq {
    let sampler = MeasureSampler::new(mu);
    let entries: Vec<u32> = (0..n).map(|_| sampler.draw(stream)).collect();
    VectorFq::from_indices(Arc::clone(mu.spec()), entries)
}

/// n x n matrix with iid entries from `mu`, sampled in row-major order.
pub fn sample_matrix<S: Scalar>(mu: &Measure<S>, n: usize, stream: &mut Stream) -> MatrixFq {
    let sampler = MeasureSampler::new(mu);
    let data: Vec<u32> = (0..n * n).map(|_| sampler.draw(stream)).collect();
    MatrixFq::from_index_data(Arc::clone(mu.spec()), n, n, data)
}

// ---- subspace enumeration ----

fn gaussian_total_count(q: u128, n: u32) -> u128 {
    let mut total: u128 = 0;
    for k in 0..=n {
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..k {
            num = num.saturating_mul(q.saturating_pow(n - i).saturating_sub(1));
            den = den.saturating_mul(q.saturating_pow(i + 1).saturating_sub(1));
        }
        total = total.saturating_add(num / den.max(1));
    }
    total
}

/// All subspaces of F_q^n (every dimension), via RREF-basis enumeration.
/// Budget-guarded: the count is the sum of Gaussian binomials.
pub fn enumerate_subspaces(spec: &Arc<FieldSpec>, n: usize) -> Result<Vec<Subspace>> {
    const BUDGET: u128 = 500_000;
    let count = gaussian_total_count(spec.q() as u128, n as u32);
    if count > BUDGET {
        return Err(Error::Budget {
            what: "subspace enumeration",
            needs: count,
            budget: BUDGET,
        });
    }
    let q = spec.q();
    let mut out = Vec::new();
    out.push(Subspace::zero_space(spec, n));
    for k in 1..=n {
        // pivot columns
        let mut pivots: Vec<usize> = (0..k).collect();
        loop {
            let mut free: Vec<(usize, usize)> = Vec::new();
            for (i, &pc) in pivots.iter().enumerate() {
                for j in (pc + 1)..n {
                    if !pivots.contains(&j) {
                        free.push((i, j));
                    }
                }
            }
            let mut rows = vec![0u32; k * n];
            for (i, &pc) in pivots.iter().enumerate() {
                rows[i * n + pc] = 1;
            }
            let mut odo = vec![0u32; free.len()];
            loop {
                out.push(Subspace::from_basis_data(spec, n, rows.clone(), k));
                let mut pos = 0;
                loop {
                    if pos == odo.len() {
                        break;
                    }
                    odo[pos] += 1;
                    if odo[pos] < q {
                        let (i, j) = free[pos];
                        rows[i * n + j] = odo[pos];
                        break;
                    }
                    odo[pos] = 0;
                    let (i, j) = free[pos];
                    rows[i * n + j] = 0;
                    pos += 1;
                }
                if pos == odo.len() {
                    break;
                }
            }
            let mut i = k;
            let mut advanced = false;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if pivots[i] < n - (k - i) {
                    pivots[i] += 1;
                    for j in (i + 1)..k {
                        pivots[j] = pivots[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    Ok(out)
}

/// Random subspace as the span of `dim_hint` random vectors (the resulting
/// dimension may be smaller).
pub fn random_subspace(
    spec: &Arc<FieldSpec>,
    n: usize,
    dim_hint: usize,
    stream: &mut Stream,
) -> Subspace {
    let vectors: Vec<VectorFq> = (0..dim_hint.max(1))
        .map(|_| {
            let entries: Vec<u32> = (0..n).map(|_| stream.below(spec.q() as u64) as u32).collect();
            VectorFq::from_indices(Arc::clone(spec), entries)
        })
        .collect();
    Subspace::span(spec, &vectors)
}
