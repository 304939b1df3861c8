//! Commutator calculus relative to a homomorphism `φ: A -> B`.
//!
//! `B` is an `A`-module through `a · y = φ(a) y`, and for a linear map
//! `P: A -> B` the commutator is `[P, a](x) = P(a x) − φ(a) P(x)`. Operators
//! of order `n` are those all of whose `(n+1)`-fold iterated commutators
//! vanish; `Z^n(φ)` is the matching tower of iterated relative centralizers.
//! Quantifying over the basis of `A` is exact by linearity; smaller
//! generating sets may be passed where the caller knows they suffice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{generating_set, truncation_map, Algebra, Character, LinearOp};
use crate::dersys::DerivativeSystem;
use crate::error::{Error, Result};
use crate::geometry::TangentVector;
use crate::linalg::{
    max_abs_matrix, null_space, orthonormalize, random_vector, vstack, Matrix, Subspace, Tolerances,
    Vector, C64,
};
use crate::multiindex::{IndexTable, MultiIndex};
use crate::poly::Poly;

/// A linear map `A -> B` together with the homomorphism it is relative to.
#[derive(Clone, Debug)]
pub struct RelativeOp {
    pub matrix: Matrix,
    pub action: LinearOp,
}

impl RelativeOp {
    pub fn new(matrix: Matrix, action: LinearOp) -> Result<Self> {
        if matrix.shape() != action.matrix.shape() {
            return Err(Error::usage(format!(
                "operator is {:?}, action is {:?}",
                matrix.shape(),
                action.matrix.shape()
            )));
        }
        Ok(RelativeOp { matrix, action })
    }

    /// `φ` viewed as an operator relative to itself.
    pub fn of_action(action: &LinearOp) -> Self {
        RelativeOp {
            matrix: action.matrix.clone(),
            action: action.clone(),
        }
    }

    pub fn source(&self) -> &Algebra {
        &self.action.source
    }

    pub fn target(&self) -> &Algebra {
        &self.action.target
    }

    fn with(&self, matrix: Matrix) -> RelativeOp {
        RelativeOp {
            matrix,
            action: self.action.clone(),
        }
    }

    /// `[P, a] = P ∘ L_a − L_{φ(a)} ∘ P`.
    pub fn commutator(&self, a: &Vector) -> RelativeOp {
        self.with(commutator_matrix(&self.matrix, &self.action, a))
    }

    /// `b · P`
    pub fn left_scale(&self, b: &Vector) -> RelativeOp {
        self.with(self.target().left_mul(b) * &self.matrix)
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }
}

fn commutator_matrix(p: &Matrix, phi: &LinearOp, a: &Vector) -> Matrix {
    p * phi.source.left_mul(a) - phi.target.left_mul(&phi.apply(a)) * p
}

fn vectorize(m: &Matrix) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

fn unvectorize(v: &Vector, rows: usize, cols: usize) -> Matrix {
    Matrix::from_column_slice(rows, cols, v.as_slice())
}

fn basis_of(a: &Algebra) -> Vec<Vector> {
    (0..a.dim()).map(|i| a.basis_vector(i)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffOrder {
    /// Smallest `n <= max_n` with vanishing `(n+1)`-fold commutators.
    pub order: Option<usize>,
    /// Largest commutator norm found at each depth `1, 2, ...`.
    pub depth_residuals: Vec<f64>,
    /// Largest `(order+1)`-fold commutator norm along random element chains.
    pub cross_check: Option<f64>,
}

/// Order of `P` as a differential operator, quantified over `gens`.
///
/// Depth by depth, the span of all iterated commutators is kept as an
/// orthonormal family; the order is found when the next span is zero. A
/// commutator counts as zero when its Frobenius norm is below
/// `tol.rank · (1 + ‖L_g‖ + ‖L_{φ(g)}‖)` relative to a unit-norm operator.
pub fn diff_order(p: &RelativeOp, gens: &[Vector], max_n: usize, tol: &Tolerances) -> DiffOrder {
    let phi = &p.action;
    let (rows, cols) = p.matrix.shape();
    let gen_scale: Vec<f64> = gens
        .iter()
        .map(|g| 1.0 + phi.source.left_mul(g).norm() + phi.target.left_mul(&phi.apply(g)).norm())
        .collect();
    let mut residuals = Vec::new();
    let p_norm = p.matrix.norm();
    if p_norm <= tol.zero {
        return DiffOrder {
            order: Some(0),
            depth_residuals: residuals,
            cross_check: None,
        };
    }
    let mut level: Vec<Vector> = vec![vectorize(&p.matrix) / C64::new(p_norm, 0.0)];
    for depth in 1..=max_n + 1 {
        let mut next = Vec::new();
        let mut worst: f64 = 0.0;
        for q in &level {
            let qm = unvectorize(q, rows, cols);
            for (g, s) in gens.iter().zip(&gen_scale) {
                let c = commutator_matrix(&qm, phi, g);
                let n = c.norm();
                worst = worst.max(n / s);
                if n > tol.rank * s {
                    next.push(vectorize(&c));
                }
            }
        }
        residuals.push(worst * p_norm);
        if next.is_empty() {
            return DiffOrder {
                order: Some(depth - 1),
                depth_residuals: residuals,
                cross_check: None,
            };
        }
        level = orthonormalize(&next, tol);
    }
    DiffOrder {
        order: None,
        depth_residuals: residuals,
        cross_check: None,
    }
}

/// [`diff_order`] over the basis of the source, followed by a check of the
/// `(order+1)`-fold commutators along `samples` chains of random elements.
pub fn diff_order_checked<R: Rng + ?Sized>(
    p: &RelativeOp,
    max_n: usize,
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> DiffOrder {
    let mut r = diff_order(p, &basis_of(p.source()), max_n, tol);
    if let Some(n) = r.order {
        r.cross_check = Some(random_commutator_residual(p, n, samples, rng));
    }
    r
}

/// Largest `‖[...[P, a_0], ..., a_n]‖ / (Π(1 + ‖a_i‖) (1 + ‖P‖))` over random
/// chains of elements.
fn random_commutator_residual<R: Rng + ?Sized>(p: &RelativeOp, n: usize, samples: usize, rng: &mut R) -> f64 {
    let d = p.source().dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let mut q = p.clone();
        let mut scale = 1.0;
        for _ in 0..=n {
            let a = random_vector(rng, d);
            scale *= 1.0 + a.norm();
            q = q.commutator(&a);
        }
        worst = worst.max(q.norm() / (scale * (1.0 + p.norm())));
    }
    worst
}

/// Ascending subspaces `Z^0 = 0 ⊆ Z^1 ⊆ ...` of the target algebra.
#[derive(Clone, Debug)]
pub struct Tower {
    pub levels: Vec<Subspace>,
}

impl Tower {
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(Subspace::dim).collect()
    }

    /// `Z^n ⊆ Z^{n+1}` for every computed level.
    pub fn is_monotone(&self, tol: &Tolerances) -> bool {
        self.levels
            .windows(2)
            .all(|w| w[1].contains_subspace(&w[0], tol))
    }
}

/// `Z^0 = 0`, `Z^{n+1} = {b : [b, φ(a)] ∈ Z^n for every a}`, levels
/// `0..=depth`, quantified over the basis of the source.
pub fn z_tower(phi: &LinearOp, depth: usize, tol: &Tolerances) -> Tower {
    z_tower_with(phi, &basis_of(&phi.source), depth, tol)
}

/// [`z_tower`] quantified over the given elements of the source.
pub fn z_tower_with(phi: &LinearOp, gens: &[Vector], depth: usize, tol: &Tolerances) -> Tower {
    let b = &phi.target;
    let d = b.dim();
    let comms: Vec<Matrix> = gens
        .iter()
        .map(|g| {
            let c = phi.apply(g);
            b.right_mul(&c) - b.left_mul(&c)
        })
        .collect();
    let mut levels = vec![Subspace::zero(d)];
    for _ in 0..depth {
        let q = levels.last().expect("nonempty").annihilator();
        let blocks: Vec<Matrix> = comms.iter().map(|c| &q * c).collect();
        let next = if blocks.is_empty() || q.nrows() == 0 {
            Subspace::full(d)
        } else {
            Subspace::span(d, &null_space(&vstack(&blocks, d), tol), tol)
        };
        levels.push(next);
    }
    Tower { levels }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    /// Dimensions of `Z^0, Z^1, Z^2, Z^3`.
    pub dims: Vec<usize>,
    pub stabilized: bool,
    /// `‖φ(a*) − φ(a)*‖` in matrix form, when both sides carry involutions.
    pub involutive_residual: Option<f64>,
    pub precondition_checked: bool,
}

/// Check `Z^1(φ) = Z^2(φ)`. With `require_involutive` the map must be a
/// `*`-homomorphism into an algebra with involution.
pub fn check_stabilization(
    phi: &LinearOp,
    require_involutive: bool,
    tol: &Tolerances,
) -> Result<StabilizationReport> {
    let inv = phi.involutive_residual().ok();
    if require_involutive {
        let scale = max_abs_matrix(&phi.matrix);
        match inv {
            Some(r) if tol.negligible(r, scale) => {}
            Some(r) => {
                return Err(Error::domain(format!(
                    "the map is not involutive (residual {r:.3e}); stabilization at Z^1 is only guaranteed for *-homomorphisms into *-closed matrix algebras"
                )))
            }
            None => {
                return Err(Error::domain(
                    "source or target has no involution; stabilization at Z^1 is only guaranteed for *-homomorphisms into *-closed matrix algebras",
                ))
            }
        }
    }
    let tower = z_tower(phi, 3, tol);
    let stabilized = tower.levels[1].same_as(&tower.levels[2], tol);
    Ok(StabilizationReport {
        dims: tower.dims(),
        stabilized,
        involutive_residual: inv,
        precondition_checked: require_involutive,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivationResidual {
    /// `max ‖D(e_i e_j) − D(e_i) φ(e_j) − φ(e_i) D(e_j)‖`
    pub leibniz: f64,
    /// `‖D(x*) − D(x)*‖` in matrix form, when both sides carry involutions.
    pub star: Option<f64>,
}

pub fn derivation_residual(d: &RelativeOp) -> DerivationResidual {
    let a = d.source();
    let b = d.target();
    let phi = &d.action;
    let n = a.dim();
    let dcols: Vec<Vector> = (0..n).map(|i| d.matrix.column(i).into_owned()).collect();
    let pcols: Vec<Vector> = (0..n).map(|i| phi.matrix.column(i).into_owned()).collect();
    let mut leibniz: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let lhs = d.apply(&a.basis_product(i, j));
            let rhs = b.mul(&dcols[i], &pcols[j]) + b.mul(&pcols[i], &dcols[j]);
            leibniz = leibniz.max((lhs - rhs).norm());
        }
    }
    let star = match (a.involution(), b.involution()) {
        (Some(sa), Some(sb)) => {
            Some((&d.matrix * sa - sb * d.matrix.map(|z| z.conj())).norm())
        }
        _ => None,
    };
    DerivationResidual { leibniz, star }
}

/// `D(x*) = D(x)*` (when involutions exist) and
/// `D(xy) = D(x) φ(y) + φ(x) D(y)` on basis pairs.
pub fn is_derivation(d: &RelativeOp, tol: &Tolerances) -> bool {
    let r = derivation_residual(d);
    let s = max_abs_matrix(&d.matrix).max(max_abs_matrix(&d.action.matrix));
    tol.negligible(r.leibniz, s * s) && r.star.is_none_or(|x| tol.negligible(x, s))
}

/// The tangent vector `x -> t(D(x))` at `s = t ∘ φ`.
pub fn tangent_of_derivation(d: &RelativeOp, t: &Character, tol: &Tolerances) -> Result<TangentVector> {
    if !is_derivation(d, tol) {
        return Err(Error::domain("operator is not a derivation relative to its action"));
    }
    let base = t.pull_back(&d.action);
    let functional = d.matrix.transpose() * &t.functional;
    TangentVector::new(d.source(), functional, base, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexPredicates {
    pub index: MultiIndex,
    pub diff_order: Option<usize>,
    /// `D_k ∈ Diff^{|k|}(D_0)`
    pub in_diff: bool,
    /// `D_k(A) ⊆ Z^{|k|}(D_0)`; `None` at `k = 0`.
    pub in_z_k: Option<bool>,
    /// `D_k(A) ⊆ Z^1(D_0)`; `None` at `k = 0`.
    pub in_z_1: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterizationReport {
    pub predicate_i: bool,
    pub predicate_ii: bool,
    pub predicate_iii: bool,
    pub agree: bool,
    pub per_index: Vec<IndexPredicates>,
    pub tower_dims: Vec<usize>,
    /// Largest residual of `[D_k, a] = Σ_{l<k} C(k,l) D_{k−l}(a) · D_l`
    /// over basis elements `a` and `|k| <= N`.
    pub commutator_residual: f64,
    /// Largest relative `(order+1)`-fold commutator norm along random
    /// element chains, for the indices found to have finite order.
    pub cross_check: f64,
    /// First index at which the per-index predicates disagree.
    pub witness: Option<MultiIndex>,
}

const CROSS_CHECK_SEED: u64 = 0xc0ffee;
const CROSS_CHECK_SAMPLES: usize = 3;

/// Evaluate the three equivalent conditions for a derivative system and the
/// commutator formula for `[D_k, a]`.
pub fn check_diffsys_characterization(
    sys: &DerivativeSystem,
    tol: &Tolerances,
) -> Result<CharacterizationReport> {
    let report = sys.verify(tol);
    if !report.is_valid() {
        return Err(Error::InvalidSystem(Box::new(report)));
    }
    let phi = sys.d0();
    let n = sys.order() as usize;
    let tower = z_tower(&phi, n.max(1), tol);
    // for commutative sources [P, ab] = [P, a] L_b + L_{φ(a)} [P, b] lets a
    // generating set stand in for the basis
    let gens = if sys.source().is_commutative(tol) {
        generating_set(sys.source(), tol)
    } else {
        basis_of(sys.source())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(CROSS_CHECK_SEED);
    let mut cross_check: f64 = 0.0;
    let table = sys.table();
    let mut per_index = Vec::new();
    for (p, k) in table.iter().enumerate() {
        let op = RelativeOp::new(sys.ops()[p].clone(), phi.clone())?;
        let deg = k.degree() as usize;
        let order = diff_order(&op, &gens, deg, tol).order;
        if let Some(n) = order {
            cross_check = cross_check.max(random_commutator_residual(&op, n, CROSS_CHECK_SAMPLES, &mut rng));
        }
        let image: Vec<Vector> = (0..op.matrix.ncols())
            .map(|j| op.matrix.column(j).into_owned())
            .collect();
        let inside = |z: &Subspace| image.iter().all(|v| z.contains(v, tol));
        let (in_z_k, in_z_1) = if k.is_zero() {
            (None, None)
        } else {
            (Some(inside(&tower.levels[deg])), Some(inside(&tower.levels[1])))
        };
        per_index.push(IndexPredicates {
            index: k.clone(),
            diff_order: order,
            in_diff: order.is_some(),
            in_z_k,
            in_z_1,
        });
    }
    let predicate_i = per_index.iter().all(|e| e.in_diff);
    let predicate_ii = per_index.iter().all(|e| e.in_z_k.unwrap_or(true));
    let predicate_iii = per_index.iter().all(|e| e.in_z_1.unwrap_or(true));
    let witness = per_index
        .iter()
        .find(|e| {
            e.in_z_k
                .is_some_and(|z| z != e.in_diff || Some(z) != e.in_z_1)
        })
        .map(|e| e.index.clone());
    Ok(CharacterizationReport {
        predicate_i,
        predicate_ii,
        predicate_iii,
        agree: predicate_i == predicate_ii && predicate_ii == predicate_iii,
        per_index,
        tower_dims: tower.dims(),
        commutator_residual: commutator_formula_residual(sys),
        cross_check,
        witness,
    })
}

/// Largest Frobenius residual of `[D_k, e_a] − Σ_{l<k} C(k,l) L_{D_{k−l}(e_a)} D_l`.
pub fn commutator_formula_residual(sys: &DerivativeSystem) -> f64 {
    let phi = sys.d0();
    let b = sys.target();
    let table = sys.table();
    let mut worst: f64 = 0.0;
    for (p, k) in table.iter().enumerate() {
        let lower: Vec<(usize, usize, f64)> = k
            .lower_set()
            .into_iter()
            .filter(|l| l != k)
            .map(|l| {
                let kl = k.sub(&l).expect("l <= k");
                (
                    table.position(&kl).expect("in table"),
                    table.position(&l).expect("in table"),
                    k.binomial(&l).expect("l <= k") as f64,
                )
            })
            .collect();
        for a in 0..sys.source().dim() {
            let e = sys.source().basis_vector(a);
            let lhs = commutator_matrix(&sys.ops()[p], &phi, &e);
            let mut rhs = Matrix::zeros(lhs.nrows(), lhs.ncols());
            for &(pkl, pl, c) in &lower {
                let v = &sys.ops()[pkl] * &e;
                rhs += b.left_mul(&v) * &sys.ops()[pl] * C64::new(c, 0.0);
            }
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// The operator `f -> Σ c_j(x) ∂^{k_j} f` from `jet_algebra(m, n, s)` to
/// `jet_algebra(m, n − drop, s)`, relative to Taylor truncation at `s`.
///
/// Differentiation does not preserve the ideal cut off by the truncation,
/// so the target is lowered by `drop` (at least the largest `|k_j|`) for the
/// operator to be well defined.
pub fn poly_operator(
    m: usize,
    n: u32,
    terms: &[(Poly, MultiIndex)],
    drop: u32,
    s: &[f64],
) -> Result<RelativeOp> {
    let top = terms.iter().map(|(_, k)| k.degree()).max().unwrap_or(0);
    if drop < top || drop > n {
        return Err(Error::usage(format!(
            "drop must lie between the operator order {top} and the degree {n}"
        )));
    }
    let src = IndexTable::new(m, n);
    let tgt = IndexTable::new(m, n - drop);
    let phi = truncation_map(m, n, n - drop, s)?;
    let mut matrix = Matrix::zeros(tgt.len(), src.len());
    for j in 0..src.len() {
        let f = Poly::monomial(src.get(j).clone(), 1.0);
        let mut g = Poly::zero(m);
        for (c, k) in terms {
            g = &g + &(c * &f.partial(k));
        }
        matrix.set_column(j, &g.taylor(s, n - drop).to_coords(&tgt)?);
    }
    RelativeOp::new(matrix, phi)
}

/// A random unital `*`-subalgebra of `M_d`: a unitary conjugate of
/// `⊕_i M_{n_i} ⊗ 1_{k_i}` with `Σ n_i k_i = d`, and its inclusion.
pub fn random_star_subalgebra<R: Rng + ?Sized>(rng: &mut R, d: usize, tol: &Tolerances) -> Result<(Algebra, LinearOp)> {
    if d == 0 {
        return Err(Error::usage("matrix size must be positive"));
    }
    // random composition of d into blocks n_i * k_i
    let mut blocks = Vec::new();
    let mut left = d;
    while left > 0 {
        let size = rng.random_range(1..=left);
        let divisors: Vec<usize> = (1..=size).filter(|n| size % n == 0).collect();
        let n = divisors[rng.random_range(0..divisors.len())];
        blocks.push((n, size / n));
        left -= size;
    }
    let u = crate::linalg::random_unitary(rng, d);
    let md = crate::algebra::matrix_algebra(d);
    let mut basis = Vec::new();
    let mut off = 0;
    for &(n, k) in &blocks {
        for i in 0..n {
            for j in 0..n {
                let mut e = Matrix::zeros(d, d);
                for r in 0..k {
                    e[(off + r * n + i, off + r * n + j)] = C64::new(1.0, 0.0);
                }
                let c = &u * e * u.adjoint();
                basis.push(Vector::from_fn(d * d, |idx, _| c[(idx / d, idx % d)]));
            }
        }
        off += n * k;
    }
    crate::algebra::subalgebra(&md, &basis, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{matrix_algebra, subalgebra, truncated_poly};
    use crate::linalg::{random_vector, unit_vector, I};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn d_dx(n: u32) -> RelativeOp {
        poly_operator(1, n, &[(Poly::constant(1, 1.0), MultiIndex::from([1]))], 1, &[0.0]).unwrap()
    }

    #[test]
    fn commutator_with_the_action_vanishes() {
        let m2 = matrix_algebra(2);
        let (_, inc) = subalgebra(&m2, &[unit_vector(4, 0), unit_vector(4, 3)], &tol()).unwrap();
        let p = RelativeOp::of_action(&inc);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let a = random_vector(&mut rng, 2);
            assert!(p.commutator(&a).norm() < 1e-13);
        }
    }

    #[test]
    fn weyl_relation() {
        let p = d_dx(3);
        let x = unit_vector(4, 1);
        let c = p.commutator(&x);
        assert!((c.matrix - &p.action.matrix).norm() < 1e-13);
    }

    #[test]
    fn scaled_action_commutator_identity() {
        let m2 = matrix_algebra(2);
        let (_, inc) = subalgebra(&m2, &[unit_vector(4, 0), unit_vector(4, 3)], &tol()).unwrap();
        let phi = RelativeOp::of_action(&inc);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let b = random_vector(&mut rng, 4);
            let a = random_vector(&mut rng, 2);
            let lhs = phi.left_scale(&b).commutator(&a);
            let rhs = phi.left_scale(&m2.commutator(&b, &inc.apply(&a)));
            assert!((lhs.matrix - rhs.matrix).norm() < 1e-12);
        }
    }

    #[test]
    fn orders_of_polynomial_operators() {
        let gens = vec![unit_vector(5, 1)];
        assert_eq!(diff_order(&d_dx(4), &gens, 4, &tol()).order, Some(1));
        let x_d2 = poly_operator(1, 4, &[(Poly::var(1, 0), MultiIndex::from([2]))], 2, &[0.0]).unwrap();
        assert_eq!(diff_order(&x_d2, &gens, 4, &tol()).order, Some(2));
        let all = basis_of(&x_d2.action.source);
        assert_eq!(diff_order(&x_d2, &all, 4, &tol()).order, Some(2));
        let d3 = poly_operator(1, 5, &[(Poly::constant(1, 1.0), MultiIndex::from([3]))], 3, &[0.0]).unwrap();
        assert_eq!(diff_order(&d3, &[unit_vector(6, 1)], 1, &tol()).order, None);
    }

    #[test]
    fn scaled_action_order_matches_tower() {
        let m2 = matrix_algebra(2);
        let (_, inc) = subalgebra(&m2, &[m2.unit().clone(), unit_vector(4, 1)], &tol()).unwrap();
        let tower = z_tower(&inc, 3, &tol());
        let gens = basis_of(&inc.source);
        let phi = RelativeOp::of_action(&inc);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..=2usize {
            let zb = &tower.levels[n + 1];
            let b = zb
                .basis()
                .iter()
                .fold(Vector::zeros(4), |acc, v| acc + v * crate::linalg::random_complex(&mut rng));
            let ord = diff_order(&phi.left_scale(&b), &gens, 3, &tol()).order.unwrap();
            assert!(ord <= n);
        }
        // E_21 lies outside Z^2, so E_21 · φ has order exactly 2
        let ord = diff_order(&phi.left_scale(&unit_vector(4, 2)), &gens, 3, &tol()).order;
        assert_eq!(ord, Some(2));
    }

    #[test]
    fn tower_examples() {
        let t = tol();
        let m2 = matrix_algebra(2);
        let (_, diag) = subalgebra(&m2, &[unit_vector(4, 0), unit_vector(4, 3)], &t).unwrap();
        assert_eq!(z_tower(&diag, 3, &t).dims(), vec![0, 2, 2, 2]);
        let (_, nonstar) = subalgebra(&m2, &[m2.unit().clone(), unit_vector(4, 1)], &t).unwrap();
        let tw = z_tower(&nonstar, 3, &t);
        assert_eq!(tw.dims(), vec![0, 2, 3, 4]);
        assert!(tw.is_monotone(&t));
        let p = truncated_poly(1, 3);
        assert_eq!(z_tower(&LinearOp::identity(&p), 1, &t).dims(), vec![0, 4]);
    }

    #[test]
    fn stabilization_precondition() {
        let t = tol();
        let m2 = matrix_algebra(2);
        let (_, nonstar) = subalgebra(&m2, &[m2.unit().clone(), unit_vector(4, 1)], &t).unwrap();
        assert!(matches!(check_stabilization(&nonstar, true, &t), Err(Error::Domain(_))));
        let r = check_stabilization(&nonstar, false, &t).unwrap();
        assert!(!r.stabilized);
        assert_eq!(&r.dims[1..3], &[2, 3]);
        let (_, scalars) = subalgebra(&m2, &[m2.unit().clone()], &t).unwrap();
        let r = check_stabilization(&scalars, true, &t).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.dims[1], 4);
    }

    #[test]
    fn derivation_examples() {
        let t = tol();
        assert!(is_derivation(&d_dx(3), &t));
        let p = truncated_poly(1, 3);
        assert!(!is_derivation(&RelativeOp::of_action(&LinearOp::identity(&p)), &t));
    }

    #[test]
    fn tangent_of_d_dx() {
        let t = tol();
        let d = d_dx(3);
        let ev0 = Character::new(unit_vector(3, 0));
        let tau = tangent_of_derivation(&d, &ev0, &t).unwrap();
        assert!((tau.functional[1] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(tau.functional[2].norm() < 1e-14);
        assert!(tau.functional[0].norm() < 1e-14);
        let zero = RelativeOp::new(Matrix::zeros(3, 4), d.action.clone()).unwrap();
        let tau0 = tangent_of_derivation(&zero, &ev0, &t).unwrap();
        assert!(tau0.functional.norm() == 0.0);
        // complex multiples stay derivations
        let di = RelativeOp::new(&d.matrix * I, d.action.clone()).unwrap();
        assert!(derivation_residual(&di).leibniz < 1e-14);
    }

    #[test]
    fn random_star_subalgebras_stabilize() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 1..=4 {
            let (_, inc) = random_star_subalgebra(&mut rng, d, &t).unwrap();
            assert!(inc.is_star_homomorphism(&t));
            let r = check_stabilization(&inc, true, &t).unwrap();
            assert!(r.stabilized, "{r:?}");
        }
    }
}
