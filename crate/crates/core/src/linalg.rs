//! Dense complex linear algebra used throughout the crate.
//!
//! Rank decisions for matrices go through [`RowEchelon`]: Gauss-Jordan
//! elimination with partial pivoting, where a pivot is accepted only if it
//! exceeds `max(tol.rank * scale, tol.zero)` and `scale` is the largest entry
//! of the input. Subspaces decide rank by Gram-Schmidt and then keep the
//! reduced row-echelon form of the orthonormal basis, which makes the basis
//! canonical and lets coordinates be read off at the pivot columns.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;
pub type Vector = DVector<C64>;
pub type Matrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical thresholds shared by all rank and vanishing decisions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute zero test.
    pub zero: f64,
    /// Relative pivot threshold for row reduction and relative vanishing tests.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: 1e-9,
            rank: 1e-8,
        }
    }
}

impl Tolerances {
    /// `residual` counts as zero next to quantities of size `scale`.
    pub fn negligible(&self, residual: f64, scale: f64) -> bool {
        residual <= self.rank * (1.0 + scale)
    }

    fn pivot_threshold(&self, scale: f64) -> f64 {
        (self.rank * scale).max(self.zero)
    }
}

/// Reduced row-echelon form of a set of row vectors.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    ncols: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    /// Reduce the given rows (all of length `ncols`).
    pub fn new(ncols: usize, input: &[Vector], tol: &Tolerances) -> Self {
        let scale = input.iter().map(max_abs).fold(0.0, f64::max);
        let thresh = tol.pivot_threshold(scale);
        let mut work: Vec<Vector> = input.to_vec();
        let mut rows: Vec<Vector> = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..ncols {
            let best = work
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r[col].norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            let Some((bi, bv)) = best else { break };
            if bv <= thresh {
                continue;
            }
            let mut pivot_row = work.swap_remove(bi);
            let inv = ONE / pivot_row[col];
            pivot_row *= inv;
            pivot_row[col] = ONE;
            for r in work.iter_mut() {
                let f = r[col];
                if f != ZERO {
                    r.axpy(-f, &pivot_row, ONE);
                    r[col] = ZERO;
                }
            }
            for r in rows.iter_mut() {
                let f = r[col];
                if f != ZERO {
                    r.axpy(-f, &pivot_row, ONE);
                    r[col] = ZERO;
                }
            }
            rows.push(pivot_row);
            pivots.push(col);
        }
        RowEchelon {
            ncols,
            rows,
            pivots,
        }
    }

    /// Reduce the rows of a matrix.
    pub fn of_matrix_rows(m: &Matrix, tol: &Tolerances) -> Self {
        let rows: Vec<Vector> = (0..m.nrows()).map(|i| m.row(i).transpose()).collect();
        RowEchelon::new(m.ncols(), &rows, tol)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Columns without a pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Subtract the row-space component read off at the pivot columns.
    pub fn reduce(&self, v: &Vector) -> Vector {
        let mut out = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = out[p];
            if f != ZERO {
                out.axpy(-f, row, ONE);
                out[p] = ZERO;
            }
        }
        out
    }

    /// Basis of `{x : row · x = 0 for every row}` (bilinear, no conjugation).
    pub fn kernel(&self) -> Vec<Vector> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = Vector::zeros(self.ncols);
                v[f] = ONE;
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[f];
                }
                v
            })
            .collect()
    }
}

/// Null space `{x : m x = 0}` as column vectors.
pub fn null_space(m: &Matrix, tol: &Tolerances) -> Vec<Vector> {
    RowEchelon::of_matrix_rows(m, tol).kernel()
}

pub fn rank(m: &Matrix, tol: &Tolerances) -> usize {
    RowEchelon::of_matrix_rows(m, tol).rank()
}

/// Stack row blocks vertically; all blocks share the column count.
pub fn vstack(blocks: &[Matrix], ncols: usize) -> Matrix {
    let nrows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = Matrix::zeros(nrows, ncols);
    let mut r = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), ncols);
        out.view_mut((r, 0), (b.nrows(), ncols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Matrix whose columns are the given vectors.
pub fn columns(ambient: usize, vs: &[Vector]) -> Matrix {
    let mut m = Matrix::zeros(ambient, vs.len());
    for (j, v) in vs.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

pub fn max_abs(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_matrix(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Vectors whose remainder falls below `max(tol.rank * norm, tol.zero)` are
/// dropped.
pub fn orthonormalize(vs: &[Vector], tol: &Tolerances) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vs {
        let n0 = v.norm();
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dotc(&w);
                w.axpy(-c, q, ONE);
            }
        }
        let n = w.norm();
        if n > (tol.rank * n0).max(tol.zero) {
            out.push(w / C64::new(n, 0.0));
        }
    }
    out
}

/// Linear subspace of `C^ambient` with a canonical (row-echelon) basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    echelon: RowEchelon,
    orth: Vec<Vector>,
}

impl Subspace {
    pub fn span(ambient: usize, vs: &[Vector], tol: &Tolerances) -> Self {
        // Orthonormalize first: elimination on ill-conditioned input loses
        // far more accuracy than Gram-Schmidt with re-orthogonalization.
        let orth = orthonormalize(vs, tol);
        let echelon = RowEchelon::new(ambient, &orth, tol);
        debug_assert_eq!(echelon.rank(), orth.len());
        Subspace { echelon, orth }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace::span(ambient, &[], &Tolerances::default())
    }

    pub fn full(ambient: usize) -> Self {
        let basis: Vec<Vector> = (0..ambient).map(|i| unit_vector(ambient, i)).collect();
        Subspace::span(ambient, &basis, &Tolerances::default())
    }

    /// Kernel of a linear functional given as a row vector.
    pub fn kernel_of_functional(f: &Vector, tol: &Tolerances) -> Self {
        let ambient = f.len();
        let m = Matrix::from_row_slice(1, ambient, f.as_slice());
        Subspace::span(ambient, &null_space(&m, tol), tol)
    }

    pub fn ambient(&self) -> usize {
        self.echelon.ncols()
    }

    pub fn dim(&self) -> usize {
        self.echelon.rank()
    }

    pub fn basis(&self) -> &[Vector] {
        self.echelon.rows()
    }

    pub fn orthonormal_basis(&self) -> &[Vector] {
        &self.orth
    }

    pub fn echelon(&self) -> &RowEchelon {
        &self.echelon
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &Vector) -> f64 {
        let mut w = v.clone();
        for q in &self.orth {
            let c = q.dotc(&w);
            w.axpy(-c, q, ONE);
        }
        w.norm()
    }

    pub fn contains(&self, v: &Vector, tol: &Tolerances) -> bool {
        self.residual(v) <= (tol.rank * v.norm()).max(tol.zero)
    }

    pub fn contains_subspace(&self, other: &Subspace, tol: &Tolerances) -> bool {
        other.basis().iter().all(|v| self.contains(v, tol))
    }

    pub fn same_as(&self, other: &Subspace, tol: &Tolerances) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other, tol)
    }

    /// Coordinates of `v` in the echelon basis, read at the pivot columns.
    /// Only meaningful when `v` lies in the subspace.
    pub fn coordinates(&self, v: &Vector) -> Vector {
        Vector::from_iterator(self.dim(), self.echelon.pivots().iter().map(|&p| v[p]))
    }

    pub fn sum(&self, other: &Subspace, tol: &Tolerances) -> Subspace {
        let mut vs = self.basis().to_vec();
        vs.extend_from_slice(other.basis());
        Subspace::span(self.ambient(), &vs, tol)
    }

    pub fn intersection(&self, other: &Subspace, tol: &Tolerances) -> Subspace {
        let n = self.ambient();
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Subspace::zero(n);
        }
        let mut m = Matrix::zeros(n, a + b);
        for (j, v) in self.orth.iter().enumerate() {
            m.set_column(j, v);
        }
        for (j, v) in other.orth.iter().enumerate() {
            m.set_column(a + j, &(-v));
        }
        let vs: Vec<Vector> = null_space(&m, tol)
            .into_iter()
            .map(|c| {
                let mut v = Vector::zeros(n);
                for (j, q) in self.orth.iter().enumerate() {
                    v.axpy(c[j], q, ONE);
                }
                v
            })
            .collect();
        Subspace::span(n, &vs, tol)
    }

    /// Rows spanning the annihilator `{q : q · v = 0 for v in self}`; a vector
    /// `w` lies in the subspace iff `annihilator * w = 0`.
    pub fn annihilator(&self) -> Matrix {
        let ker = self.echelon.kernel();
        let n = self.ambient();
        let mut m = Matrix::zeros(ker.len(), n);
        for (i, k) in ker.iter().enumerate() {
            m.set_row(i, &k.transpose());
        }
        m
    }
}

/// Linear quotient `C^n / sub` on the complement spanned by the unit vectors
/// at the non-pivot columns: returns `(projection, lift)` with
/// `projection * lift = 1`.
pub fn linear_quotient(sub: &Subspace) -> (Matrix, Matrix) {
    let n = sub.ambient();
    let free = sub.echelon().free_columns();
    let mut proj = Matrix::zeros(free.len(), n);
    for c in 0..n {
        let r = sub.echelon().reduce(&unit_vector(n, c));
        for (qi, &f) in free.iter().enumerate() {
            proj[(qi, c)] = r[f];
        }
    }
    let mut lift = Matrix::zeros(n, free.len());
    for (qi, &f) in free.iter().enumerate() {
        lift[(f, qi)] = ONE;
    }
    (proj, lift)
}

/// Left inverse `(M^* M)^{-1} M^*` of a matrix with independent columns,
/// computed through a Householder QR factorization.
pub fn left_inverse(m: &Matrix) -> Option<Matrix> {
    let k = m.ncols();
    if k == 0 {
        return Some(Matrix::zeros(0, m.nrows()));
    }
    if m.nrows() < k {
        return None;
    }
    let qr = m.clone().qr();
    let r = qr.r();
    let top = (0..k).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    if (0..k).any(|i| r[(i, i)].norm() <= 1e-13 * top) {
        return None;
    }
    r.solve_upper_triangular(&qr.q().adjoint())
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = ONE;
    v
}

pub fn real_vector(xs: &[f64]) -> Vector {
    Vector::from_iterator(xs.len(), xs.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn conj(v: &Vector) -> Vector {
    v.map(|z| z.conj())
}

/// Entries uniform in the unit square of the complex plane, centered at 0.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| random_complex(rng))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| random_complex(rng))
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Unitary factor of the QR decomposition of a random matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    random_matrix(rng, n, n).qr().q()
}

/// Random Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let m = random_matrix(rng, n, n);
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn to_pairs(v: &Vector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_pairs(ps: &[[f64; 2]]) -> Vector {
    Vector::from_iterator(ps.len(), ps.iter().map(|p| C64::new(p[0], p[1])))
}

pub fn matrix_to_pairs(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Option<Matrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if rows.iter().any(|row| row.len() != c) {
        return None;
    }
    Some(Matrix::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}
