//! Jets of polynomials: quotients by powers of the vanishing ideal at a point.
//!
//! Polynomials of degree at most `D` are identified with
//! `jet_algebra(m, D, s)`, i.e. with `ℂ[x] / I_s^{D+1}`; under this
//! identification `I_s^k / I_s^{D+1}` is exactly `I_s^k ∩ P_{≤D}`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::algebra::{jet_algebra, quotient, subspace_product, Algebra, Character, LinearOp};
use crate::diffcalc::{diff_order, RelativeOp};
use crate::error::{Error, Result};
use crate::linalg::{columns, left_inverse, linear_quotient, null_space, Matrix, Subspace, Tolerances, Vector, C64};
use crate::multiindex::{binomial, IndexTable};
use crate::poly::Poly;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct JetClass {
    pub point: Vec<f64>,
    pub order: u32,
    /// Coefficients of `(x − s)^k`, `|k| <= order`, in graded-lex order.
    pub coords: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct JetSpace {
    m: usize,
    point: Vec<f64>,
    order: u32,
    degree: u32,
    table: IndexTable,
    tol: Tolerances,
    powers: Vec<Subspace>,
    chart_solve: Matrix,
    centered_power: Subspace,
    /// `(P_{≤D}, J_s^n, P_{≤D} -> J_s^n)`, built on first use.
    algebras: OnceLock<(Algebra, Algebra, LinearOp)>,
}

impl JetSpace {
    /// Jets of order `n` at `s`, computed inside polynomials of degree at
    /// most `degree` (default `n + 2`).
    pub fn new(s: &[f64], n: u32, degree: Option<u32>, tol: &Tolerances) -> Result<JetSpace> {
        let m = s.len();
        if m == 0 {
            return Err(Error::usage("point must have at least one coordinate"));
        }
        let degree = degree.unwrap_or(n + 2);
        if degree < n {
            return Err(Error::usage(format!("ambient degree {degree} is below the jet order {n}")));
        }
        let table = IndexTable::new(m, degree);
        let d = table.len();
        let powers = chart_powers(s, &table, n as usize + 1, tol)?;
        let vanishing = &powers[n as usize + 1];

        // Split along I^{n+1} by projecting onto its orthogonal complement
        // and solving for the chart coefficients there by QR.
        let low = IndexTable::new(m, n);
        if vanishing.dim() + low.len() != d {
            return Err(Error::numeric(format!(
                "ideal power has dimension {}, expected {}",
                vanishing.dim(),
                d - low.len()
            )));
        }
        let mut perp = Matrix::identity(d, d);
        for u in vanishing.orthonormal_basis() {
            perp -= u * u.adjoint();
        }
        let charts: Vec<Vector> = low
            .iter()
            .map(|k| Poly::chart_monomial(s, k).to_coords(&table))
            .collect::<Result<_>>()?;
        let chart_solve = left_inverse(&(&perp * columns(d, &charts)))
            .ok_or_else(|| Error::numeric("chart monomials and ideal power are not complementary"))?
            * perp;

        let centered_power = chart_powers(&vec![0.0; m], &table, n as usize + 1, tol)?
            .pop()
            .expect("nonempty");
        Ok(JetSpace {
            m,
            point: s.to_vec(),
            order: n,
            degree,
            table,
            tol: *tol,
            powers,
            chart_solve,
            centered_power,
            algebras: OnceLock::new(),
        })
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    fn algebras(&self) -> Result<&(Algebra, Algebra, LinearOp)> {
        if let Some(a) = self.algebras.get() {
            return Ok(a);
        }
        let base = jet_algebra(self.m, self.degree, &self.point)?;
        let (q, proj) = quotient(&base, &self.powers[self.order as usize + 1], &self.tol)?;
        Ok(self.algebras.get_or_init(|| (base, q, proj)))
    }

    /// Polynomials of degree at most `D` as `ℂ[x] / I_s^{D+1}`.
    pub fn base(&self) -> Result<&Algebra> {
        Ok(&self.algebras()?.0)
    }

    /// `J_s^n` as an algebra.
    pub fn quotient(&self) -> Result<&Algebra> {
        Ok(&self.algebras()?.1)
    }

    pub fn projection(&self) -> Result<&LinearOp> {
        Ok(&self.algebras()?.2)
    }

    /// `dim J_s^n`
    pub fn dim(&self) -> usize {
        self.table.len() - self.powers[self.order as usize + 1].dim()
    }

    pub fn maximal_ideal(&self) -> &Subspace {
        &self.powers[1]
    }

    /// `I_s^k ∩ P_{≤D}` for `k <= n + 1`.
    pub fn ideal_power(&self, k: usize) -> Option<&Subspace> {
        self.powers.get(k)
    }

    /// `{p : (∂^j p)(s) = 0 for |j| < k}`, computed from derivatives.
    pub fn vanishing_to_order(&self, k: u32, tol: &Tolerances) -> Subspace {
        let d = self.table.len();
        if k == 0 {
            return Subspace::full(d);
        }
        let rows = IndexTable::new(self.m, k - 1);
        let mut a = Matrix::zeros(rows.len(), d);
        for (r, j) in rows.iter().enumerate() {
            for (c, mono) in self.table.iter().enumerate() {
                a[(r, c)] = C64::new(Poly::monomial(mono.clone(), 1.0).partial(j).eval(&self.point), 0.0);
            }
        }
        Subspace::span(d, &null_space(&a, tol), tol)
    }

    pub fn coords(&self, f: &Poly) -> Result<Vector> {
        if f.vars() != self.m {
            return Err(Error::usage(format!("polynomial has {} variables, expected {}", f.vars(), self.m)));
        }
        f.to_coords(&self.table)
    }

    /// Jet from Taylor coefficients `(∂^k f)(s) / k!`.
    pub fn jet_taylor(&self, f: &Poly) -> JetClass {
        JetClass {
            point: self.point.clone(),
            order: self.order,
            coords: f.taylor_coeffs(&self.point, self.order),
        }
    }

    /// Jet from splitting `f` along the ideal power against the span of the
    /// chart monomials `(x − s)^k`, `|k| <= n`.
    pub fn jet_linear(&self, f: &Poly) -> Result<JetClass> {
        let c = &self.chart_solve * self.coords(f)?;
        Ok(JetClass {
            point: self.point.clone(),
            order: self.order,
            coords: c.iter().map(|z| z.re).collect(),
        })
    }

    /// Coordinates of the class of `f` in the quotient algebra.
    pub fn project(&self, f: &Poly) -> Result<Vector> {
        Ok(self.projection()?.apply(&self.coords(f)?))
    }

    /// Distance of `f − g` from the ideal power, in monomial coordinates.
    pub fn congruence_residual(&self, f: &Poly, g: &Poly) -> Result<f64> {
        let v = self.coords(&(f - g))?;
        Ok(self.powers[self.order as usize + 1].residual(&v))
    }

    /// `E_s^n[f]`
    pub fn taylor_truncate(&self, f: &Poly) -> Poly {
        f.taylor(&self.point, self.order)
    }

    /// `inf {‖f + v‖ : v ∈ I_s^{n+1}}` with the Euclidean norm on the
    /// coefficients of `f(· + s)`.
    pub fn seminorm(&self, f: &Poly) -> Result<f64> {
        let g = f.translate(&self.point);
        Ok(self.centered_power.residual(&g.to_coords(&self.table)?))
    }
}

/// `I_s^k ∩ P_{≤D}` for `k = 0..=top`, spanned by the `(x − s)^j` with
/// `|j| >= k`. Exact up to the rounding in expanding the chart monomials,
/// unlike repeated products which lose accuracy at high degree.
fn chart_powers(s: &[f64], table: &IndexTable, top: usize, tol: &Tolerances) -> Result<Vec<Subspace>> {
    let d = table.len();
    (0..=top)
        .map(|k| {
            let vs = table
                .iter()
                .filter(|j| j.degree() as usize >= k)
                .map(|j| Poly::chart_monomial(s, j).to_coords(table))
                .collect::<Result<Vec<_>>>()?;
            Ok(Subspace::span(d, &vs, tol))
        })
        .collect()
}

/// `I^0 = A`, `I^1 = Ker s`, `I^{k+1} = I^k · I` up to `top`.
fn ideal_powers(a: &Algebra, s: &Character, top: usize, tol: &Tolerances) -> Vec<Subspace> {
    let d = a.dim();
    let ideal = s.kernel(tol);
    let mut out = vec![Subspace::full(d), ideal.clone()];
    while out.len() <= top {
        let next = subspace_product(a, out.last().expect("nonempty"), &ideal, tol);
        out.push(next);
    }
    out.truncate(top + 1);
    out
}

pub fn maximal_ideal(s: &[f64], degree: u32, tol: &Tolerances) -> Result<Subspace> {
    Ok(JetSpace::new(s, 0, Some(degree), tol)?.maximal_ideal().clone())
}

/// `I_s^n ∩ P_{≤D}` for `n >= 1`.
pub fn ideal_power(s: &[f64], degree: u32, n: u32, tol: &Tolerances) -> Result<Subspace> {
    if n == 0 {
        return Ok(Subspace::full(IndexTable::new(s.len(), degree).len()));
    }
    if n - 1 > degree {
        return Ok(Subspace::zero(IndexTable::new(s.len(), degree).len()));
    }
    let js = JetSpace::new(s, n - 1, Some(degree), tol)?;
    Ok(js.ideal_power(n as usize).expect("computed").clone())
}

/// Jet space large enough to hold `f`, with two spare degrees above `n`.
pub fn space_for(f: &Poly, s: &[f64], n: u32, tol: &Tolerances) -> Result<JetSpace> {
    let deg = f.degree().unwrap_or(0).max(n + 2);
    JetSpace::new(s, n, Some(deg), tol)
}

/// Jet of `f` at `s` of order `n`; both computations must agree.
pub fn jet_project(f: &Poly, s: &[f64], n: u32, tol: &Tolerances) -> Result<JetClass> {
    let js = space_for(f, s, n, tol)?;
    let a = js.jet_taylor(f);
    let b = js.jet_linear(f)?;
    let scale = 1.0 + f.norm();
    let r = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if !tol.negligible(r, scale) {
        return Err(Error::numeric(format!("jet computations disagree by {r:.3e}")));
    }
    Ok(a)
}

pub fn taylor_truncate(f: &Poly, s: &[f64], n: u32) -> Poly {
    f.taylor(s, n)
}

pub fn quotient_seminorm(f: &Poly, s: &[f64], n: u32, tol: &Tolerances) -> Result<f64> {
    space_for(f, s, n, tol)?.seminorm(f)
}

/// `C(m + n, m)`
pub fn jet_dim(m: usize, n: u32) -> u128 {
    binomial(m as u32 + n, m as u32)
}

#[derive(Clone, Debug)]
pub struct InducedJetMap {
    /// Matrix of `j_n[P]: J_s^n(A) -> Y / φ(I_s)·Y`.
    pub matrix: Matrix,
    /// `A -> J_s^n(A)`
    pub source_projection: Matrix,
    /// `Y -> Y / φ(I_s)·Y`
    pub target_projection: Matrix,
    pub diff_order: usize,
    /// `‖j^0 ∘ P − j_n[P] ∘ j^n‖` in Frobenius norm.
    pub factorization_residual: f64,
}

/// The map on jets induced by an operator of order at most `n`, at the
/// character `s` of its source.
pub fn induced_jet_map(p: &RelativeOp, s: &Character, n: u32, tol: &Tolerances) -> Result<InducedJetMap> {
    let a = p.source();
    let y = p.target();
    let gens: Vec<Vector> = (0..a.dim()).map(|i| a.basis_vector(i)).collect();
    let order = diff_order(p, &gens, n as usize, tol)
        .order
        .ok_or_else(|| Error::domain(format!("operator has order above {n}")))?;
    let powers = ideal_powers(a, s, n as usize + 1, tol);
    let high = &powers[n as usize + 1];
    let ideal = &powers[1];
    let mut prods = Vec::new();
    for v in ideal.basis() {
        let lv = y.left_mul(&p.action.apply(v));
        for j in 0..y.dim() {
            prods.push(lv.column(j).into_owned());
        }
    }
    let iy = Subspace::span(y.dim(), &prods, tol);
    for v in high.basis() {
        let w = p.apply(v);
        if !iy.contains(&w, tol) {
            return Err(Error::domain(format!(
                "operator does not map I^{} into I·Y (residual {:.3e})",
                n + 1,
                iy.residual(&w)
            )));
        }
    }
    let (pa, la) = linear_quotient(high);
    let (py, _) = linear_quotient(&iy);
    let matrix = &py * &p.matrix * &la;
    let factorization_residual = (&py * &p.matrix - &matrix * &pa).norm();
    Ok(InducedJetMap {
        matrix,
        source_projection: pa,
        target_projection: py,
        diff_order: order,
        factorization_residual,
    })
}
