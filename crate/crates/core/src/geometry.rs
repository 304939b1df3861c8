//! Tangent and cotangent spaces of a commutative algebra at a character.

use serde::Serialize;

use crate::algebra::{subalgebra, subspace_product, Algebra, Character, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{columns, left_inverse, null_space, rank, vstack, Matrix, Subspace, Tolerances, Vector, C64};
use crate::multiindex::IndexTable;
use crate::poly::Poly;

/// A functional `τ` with `τ(ab) = s(a) τ(b) + τ(a) s(b)`.
#[derive(Clone, Debug)]
pub struct TangentVector {
    pub functional: Vector,
    pub base: Character,
    pub real: bool,
}

impl TangentVector {
    /// Checks the Leibniz rule at `base` and records whether `τ(a*) = conj τ(a)`.
    pub fn new(a: &StructureAlgebra, functional: Vector, base: Character, tol: &Tolerances) -> Result<Self> {
        let scale = 1.0 + functional.norm();
        let r = leibniz_residual(a, &functional, &base);
        if !tol.negligible(r, scale * (1.0 + base.functional.norm())) {
            return Err(Error::domain(format!("functional violates the Leibniz rule (residual {r:.3e})")));
        }
        let real = real_residual(a, &functional).is_some_and(|x| tol.negligible(x, scale));
        Ok(TangentVector { functional, base, real })
    }

    pub fn eval(&self, x: &Vector) -> C64 {
        self.functional.dot(x)
    }
}

fn leibniz_residual(a: &StructureAlgebra, f: &Vector, s: &Character) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let v = f.dot(&a.basis_product(i, j)) - s.functional[i] * f[j] - f[i] * s.functional[j];
            r = r.max(v.norm());
        }
    }
    r
}

fn real_residual(a: &StructureAlgebra, f: &Vector) -> Option<f64> {
    a.involution()
        .map(|s| (s.transpose() * f - f.map(|z| z.conj())).norm())
}

fn check_character(a: &StructureAlgebra, s: &Character, tol: &Tolerances) -> Result<()> {
    if s.functional.len() != a.dim() {
        return Err(Error::usage(format!(
            "character has {} entries, algebra dimension is {}",
            s.functional.len(),
            a.dim()
        )));
    }
    let r = s.multiplicative_residual(a);
    if !tol.negligible(r, s.functional.norm()) {
        return Err(Error::domain(format!("functional is not multiplicative (residual {r:.3e})")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct TangentSpace {
    pub base: Character,
    /// Basis of the complex tangent space.
    pub complex: Vec<TangentVector>,
    /// Basis over the reals of the real tangent vectors, when `A` has an
    /// involution.
    pub real: Option<Vec<TangentVector>>,
}

impl TangentSpace {
    pub fn dim(&self) -> usize {
        self.complex.len()
    }

    pub fn subspace(&self, tol: &Tolerances) -> Subspace {
        let n = self.base.functional.len();
        let vs: Vec<Vector> = self.complex.iter().map(|t| t.functional.clone()).collect();
        Subspace::span(n, &vs, tol)
    }

    /// Distance of a functional from the tangent space.
    pub fn membership_residual(&self, f: &Vector, tol: &Tolerances) -> f64 {
        self.subspace(tol).residual(f)
    }
}

/// Null space of the stacked Leibniz constraints; the real part is solved over
/// the reals with the reality constraint `Sᵀ τ = conj τ` split into real and
/// imaginary coordinates.
pub fn tangent_space(a: &Algebra, s: &Character, tol: &Tolerances) -> Result<TangentSpace> {
    check_character(a, s, tol)?;
    let d = a.dim();
    let sf = &s.functional;
    let mut rows = Matrix::zeros(d * d, d);
    for i in 0..d {
        for j in 0..d {
            let mut r = a.basis_product(i, j);
            r[j] -= sf[i];
            r[i] -= sf[j];
            rows.set_row(i * d + j, &r.transpose());
        }
    }
    let complex = null_space(&rows, tol)
        .into_iter()
        .map(|f| TangentVector::new(a, f, s.clone(), tol))
        .collect::<Result<Vec<_>>>()?;
    let real = match a.involution() {
        None => None,
        Some(inv) => {
            // unknowns (u, v) with τ = u + i v
            let (re, im) = (rows.map(|z| z.re), rows.map(|z| z.im));
            let st = inv.transpose();
            let (sr, si) = (st.map(|z| z.re), st.map(|z| z.im));
            let id = nalgebra::DMatrix::<f64>::identity(d, d);
            let block = |a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>| {
                let mut m = nalgebra::DMatrix::<f64>::zeros(a.nrows(), 2 * d);
                m.view_mut((0, 0), (a.nrows(), d)).copy_from(a);
                m.view_mut((0, d), (a.nrows(), d)).copy_from(b);
                m
            };
            let parts = [
                block(&re, &(-&im)),
                block(&im, &re),
                // Re(Sᵀτ − conj τ) and Im(Sᵀτ − conj τ)
                block(&(&sr - &id), &(-&si)),
                block(&si, &(&sr + &id)),
            ];
            let blocks: Vec<Matrix> = parts.iter().map(|p| p.map(|x| C64::new(x, 0.0))).collect();
            let sol = null_space(&vstack(&blocks, 2 * d), tol);
            let vs = sol
                .into_iter()
                .map(|w| {
                    let f = Vector::from_fn(d, |k, _| C64::new(w[k].re, w[d + k].re));
                    TangentVector::new(a, f, s.clone(), tol)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(vs)
        }
    };
    Ok(TangentSpace {
        base: s.clone(),
        complex,
        real,
    })
}

/// An element of `I_s / I_s²` with a representative in `I_s`.
#[derive(Clone, Debug)]
pub struct CotangentClass {
    pub coords: Vector,
    pub representative: Vector,
}

#[derive(Clone, Debug)]
pub struct CotangentSpace {
    pub base: Character,
    pub ideal: Subspace,
    pub square: Subspace,
    /// Representatives in `I_s` whose classes form a basis of the quotient.
    pub basis: Vec<Vector>,
    /// `d × (q + dim I_s²)` matrix pseudo-inverse used for class coordinates.
    solve: Matrix,
}

impl CotangentSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Class of an element of `I_s`.
    pub fn class_of(&self, x: &Vector, tol: &Tolerances) -> Result<CotangentClass> {
        if !self.ideal.contains(x, tol) {
            return Err(Error::domain("element does not vanish at the base point"));
        }
        let c = &self.solve * x;
        Ok(CotangentClass {
            coords: c.rows(0, self.dim()).into_owned(),
            representative: x.clone(),
        })
    }

    /// Class of `x − s(x)·1`, the projection used in the duality formula.
    pub fn class_of_centered(&self, a: &StructureAlgebra, x: &Vector, tol: &Tolerances) -> Result<CotangentClass> {
        let centered = x - a.unit() * self.base.eval(x);
        self.class_of(&centered, tol)
    }

    pub fn basis_class(&self, i: usize) -> CotangentClass {
        let mut coords = Vector::zeros(self.dim());
        coords[i] = C64::new(1.0, 0.0);
        CotangentClass {
            coords,
            representative: self.basis[i].clone(),
        }
    }
}

pub fn cotangent_space(a: &Algebra, s: &Character, tol: &Tolerances) -> Result<CotangentSpace> {
    check_character(a, s, tol)?;
    let d = a.dim();
    let ideal = s.kernel(tol);
    let square = subspace_product(a, &ideal, &ideal, tol);
    let mut basis = Vec::new();
    let mut acc = square.clone();
    for v in ideal.basis() {
        if !acc.contains(v, tol) {
            basis.push(v.clone());
            acc = Subspace::span(d, &[acc.basis(), std::slice::from_ref(v)].concat(), tol);
        }
    }
    let mut all = basis.clone();
    all.extend_from_slice(square.basis());
    let solve = if all.is_empty() {
        Matrix::zeros(0, d)
    } else {
        left_inverse(&columns(d, &all))
            .ok_or_else(|| Error::numeric("cotangent coordinates: basis is numerically dependent"))?
    };
    Ok(CotangentSpace {
        base: s.clone(),
        ideal,
        square,
        basis,
        solve,
    })
}

/// `τ` applied to a representative of `ξ`.
pub fn pairing(tau: &TangentVector, xi: &CotangentClass) -> C64 {
    tau.eval(&xi.representative)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub tangent_dim: usize,
    pub cotangent_dim: usize,
    pub real_dim: Option<usize>,
    pub gram_rank: usize,
    /// Largest `|τ(x)|` over tangent basis vectors and `x ∈ {1} ∪ I_s²` basis.
    pub annihilation_residual: f64,
    pub holds: bool,
}

/// Dimensions, Gram matrix rank and annihilation of `1` and `I_s²`.
pub fn check_duality(a: &Algebra, s: &Character, tol: &Tolerances) -> Result<DualityReport> {
    let t = tangent_space(a, s, tol)?;
    let c = cotangent_space(a, s, tol)?;
    let mut gram = Matrix::zeros(t.dim(), c.dim());
    for (i, tau) in t.complex.iter().enumerate() {
        for j in 0..c.dim() {
            gram[(i, j)] = pairing(tau, &c.basis_class(j));
        }
    }
    let gram_rank = rank(&gram, tol);
    let mut annihilation: f64 = 0.0;
    for tau in &t.complex {
        annihilation = annihilation.max(tau.eval(a.unit()).norm());
        for v in c.square.basis() {
            annihilation = annihilation.max(tau.eval(v).norm() / (1.0 + v.norm()));
        }
    }
    let real_dim = t.real.as_ref().map(Vec::len);
    let holds = t.dim() == c.dim()
        && gram_rank == t.dim()
        && real_dim.is_none_or(|r| r == t.dim())
        && tol.negligible(annihilation, 1.0);
    Ok(DualityReport {
        tangent_dim: t.dim(),
        cotangent_dim: c.dim(),
        real_dim,
        gram_rank,
        annihilation_residual: annihilation,
        holds,
    })
}

/// Evaluation at `s` on `jet_algebra(m, order, s)` (or `truncated_poly` at 0).
pub fn evaluation_character(m: usize, order: u32, s: &[f64]) -> Character {
    let table = IndexTable::new(m, order);
    Character::new(Vector::from_iterator(
        table.len(),
        table.iter().map(|k| C64::new(Poly::monomial(k.clone(), 1.0).eval(s), 0.0)),
    ))
}

/// `span{1, (x−s)², ..., (x−s)^order}` inside `jet_algebra(1, order, s)`, with
/// its evaluation character at `s`. At `s = 0` this is the cusp algebra.
pub fn cusp_at(order: u32, s: f64, tol: &Tolerances) -> Result<(Algebra, Character)> {
    if order < 2 {
        return Err(Error::usage("cusp algebra needs order >= 2"));
    }
    let jet = crate::algebra::jet_algebra(1, order, &[s])?;
    let table = IndexTable::new(1, order);
    let gens: Vec<Vector> = std::iter::once(0)
        .chain(2..=order)
        .map(|k| Poly::chart_monomial(&[s], &crate::multiindex::MultiIndex::from([k])).to_coords(&table))
        .collect::<Result<_>>()?;
    let (sub, inc) = subalgebra(&jet, &gens, tol)?;
    let ev = evaluation_character(1, order, &[s]).pull_back(&inc);
    Ok((sub, ev))
}
