//! Systems of partial derivatives `{D_k : A -> B}` and their correspondence
//! with homomorphisms `A -> B[[m]]`.
//!
//! A system satisfies `D_k(a*) = D_k(a)*`, `D_k(1) = δ_{k,0}` and the
//! binomial Leibniz rule `D_k(ab) = Σ_{l<=k} C(k,l) D_{k-l}(a) D_l(b)`.
//! With the Cauchy product on `B[[m]]` the matching homomorphism has
//! coefficients `D(a)_k = D_k(a) / k!`; the inverse reads `D_k = k! · D(·)_k`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    direct_sum, function_algebra, jet_algebra, matrix_algebra, Algebra, AlgebraInput, LinearOp,
};
use crate::error::{Error, Result};
use crate::linalg::{
    matrix_from_pairs, matrix_to_pairs, max_abs_matrix, random_matrix, random_unitary, Matrix,
    Tolerances, Vector, C64, ONE,
};
use crate::multiindex::{IndexTable, MultiIndex};
use crate::poly::Poly;
use crate::series::{Mode, SeriesElement, SeriesSpace};

#[derive(Clone)]
pub struct DerivativeSystem {
    source: Algebra,
    target: Algebra,
    table: IndexTable,
    ops: Vec<Matrix>,
}

impl fmt::Debug for DerivativeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DerivativeSystem({} -> {}, m={}, N={})",
            self.source.name(),
            self.target.name(),
            self.table.vars(),
            self.table.order()
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    /// `D_k(a*) = D_k(a)*`
    Star,
    /// `D_k(1) = δ_{k,0}`
    Unit,
    /// binomial Leibniz rule
    Leibniz,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Star => "star",
            Axiom::Unit => "unit",
            Axiom::Leibniz => "leibniz",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub index: MultiIndex,
    /// Basis elements involved: one for the star axiom, two for Leibniz,
    /// none for the unit axiom.
    pub basis: Vec<usize>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
    /// False when source or target has no involution.
    pub star_checked: bool,
    pub max_residual: f64,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl DerivativeSystem {
    /// `ops[p]` is the matrix of `D_k` for `k` at position `p` of the
    /// graded-lex table of `(m, order)`.
    pub fn new(source: Algebra, target: Algebra, m: usize, order: u32, ops: Vec<Matrix>) -> Result<Self> {
        let table = IndexTable::new(m, order);
        if ops.len() != table.len() {
            return Err(Error::usage(format!(
                "{} operators given, {} multi-indices with |k| <= {order}",
                ops.len(),
                table.len()
            )));
        }
        for (p, op) in ops.iter().enumerate() {
            if op.nrows() != target.dim() || op.ncols() != source.dim() {
                return Err(Error::usage(format!(
                    "operator {:?} is {}x{}, expected {}x{}",
                    table.get(p),
                    op.nrows(),
                    op.ncols(),
                    target.dim(),
                    source.dim()
                )));
            }
        }
        Ok(DerivativeSystem {
            source,
            target,
            table,
            ops,
        })
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn table(&self) -> &IndexTable {
        &self.table
    }

    pub fn vars(&self) -> usize {
        self.table.vars()
    }

    pub fn order(&self) -> u32 {
        self.table.order()
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.ops
    }

    pub fn op(&self, k: &MultiIndex) -> Option<&Matrix> {
        self.table.position(k).map(|p| &self.ops[p])
    }

    /// `D_k` as a linear map between the two algebras.
    pub fn op_map(&self, k: &MultiIndex) -> Result<LinearOp> {
        let m = self
            .op(k)
            .ok_or_else(|| Error::usage(format!("no operator at {k:?}")))?;
        LinearOp::new(self.source.clone(), self.target.clone(), m.clone())
    }

    /// `D_0`, the homomorphism defining the module structure.
    pub fn d0(&self) -> LinearOp {
        LinearOp::new(self.source.clone(), self.target.clone(), self.ops[0].clone())
            .expect("shape checked at construction")
    }

    fn scale(&self) -> f64 {
        self.ops.iter().map(max_abs_matrix).fold(0.0, f64::max)
    }

    /// Check the three axioms on all basis elements and pairs.
    pub fn verify(&self, tol: &Tolerances) -> VerifyReport {
        let a = &self.source;
        let b = &self.target;
        let da = a.dim();
        let s = self.scale();
        let mut violations = Vec::new();
        let mut max_residual: f64 = 0.0;
        let mut record = |axiom, index: &MultiIndex, basis: Vec<usize>, r: f64, scale: f64| {
            max_residual = max_residual.max(r);
            if !tol.negligible(r, scale) {
                violations.push(Violation {
                    axiom,
                    index: index.clone(),
                    basis,
                    residual: r,
                });
            }
        };

        for (p, k) in self.table.iter().enumerate() {
            let want = if p == 0 { b.unit().clone() } else { Vector::zeros(b.dim()) };
            let r = (&self.ops[p] * a.unit() - want).norm();
            record(Axiom::Unit, k, vec![], r, s);
        }

        let star_checked = a.has_involution() && b.has_involution();
        if star_checked {
            for (p, k) in self.table.iter().enumerate() {
                for i in 0..da {
                    let e = a.basis_vector(i);
                    let lhs = &self.ops[p] * a.involve(&e).expect("checked");
                    let rhs = b.involve(&(&self.ops[p] * &e)).expect("checked");
                    record(Axiom::Star, k, vec![i], (lhs - rhs).norm(), s);
                }
            }
        }

        let cols: Vec<Vec<Vector>> = self
            .ops
            .iter()
            .map(|op| (0..da).map(|i| op.column(i).into_owned()).collect())
            .collect();
        for (p, k) in self.table.iter().enumerate() {
            let terms: Vec<(usize, usize, f64)> = k
                .lower_set()
                .iter()
                .map(|l| {
                    let kl = k.sub(l).expect("l <= k");
                    (
                        self.table.position(&kl).expect("in table"),
                        self.table.position(l).expect("in table"),
                        k.binomial(l).expect("l <= k") as f64,
                    )
                })
                .collect();
            let weight: f64 = terms.iter().map(|t| t.2).sum();
            for i in 0..da {
                for j in 0..da {
                    let lhs = &self.ops[p] * a.basis_product(i, j);
                    let mut rhs = Vector::zeros(b.dim());
                    for &(pk, pl, c) in &terms {
                        rhs += b.mul(&cols[pk][i], &cols[pl][j]) * C64::new(c, 0.0);
                    }
                    record(Axiom::Leibniz, k, vec![i, j], (lhs - rhs).norm(), weight * (1.0 + s) * (1.0 + s));
                }
            }
        }
        VerifyReport {
            violations,
            star_checked,
            max_residual,
        }
    }

    /// The homomorphism `a -> Σ_k (D_k(a)/k!) τ^k` into the truncation of
    /// `B[[m]]` at order `N`.
    pub fn to_homomorphism(&self, tol: &Tolerances) -> Result<SeriesMap> {
        let report = self.verify(tol);
        if !report.is_valid() {
            return Err(Error::InvalidSystem(Box::new(report)));
        }
        let space = SeriesSpace::new(self.target.clone(), self.vars(), self.order(), Mode::Series)?;
        let db = self.target.dim();
        let mut m = Matrix::zeros(space.flat_dim(), self.source.dim());
        for (p, k) in self.table.iter().enumerate() {
            let f = C64::new(1.0 / k.factorial() as f64, 0.0);
            m.view_mut((p * db, 0), (db, self.source.dim()))
                .copy_from(&(&self.ops[p] * f));
        }
        SeriesMap::new(self.source.clone(), space, m)
    }

    /// Inverse of [`DerivativeSystem::to_homomorphism`]: `D_k = k! · D(·)_k`.
    pub fn from_homomorphism(h: &SeriesMap, tol: &Tolerances) -> Result<DerivativeSystem> {
        h.check_homomorphism(tol)?;
        let space = &h.space;
        let db = space.coeff_algebra().dim();
        let ops = space
            .table()
            .iter()
            .enumerate()
            .map(|(p, k)| {
                h.op.matrix.rows(p * db, db).into_owned() * C64::new(k.factorial() as f64, 0.0)
            })
            .collect();
        DerivativeSystem::new(
            h.op.source.clone(),
            space.coeff_algebra().clone(),
            space.vars(),
            space.order(),
            ops,
        )
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            m: self.vars(),
            order: self.order(),
            source: AlgebraInput::Spec(self.source.to_spec()),
            target: AlgebraInput::Spec(self.target.to_spec()),
            ops: self
                .table
                .iter()
                .zip(&self.ops)
                .map(|(k, op)| OpEntry {
                    index: k.clone(),
                    matrix: matrix_to_pairs(op),
                })
                .collect(),
        }
    }

    /// Operators missing from the file are zero.
    pub fn from_file(f: &SystemFile) -> Result<DerivativeSystem> {
        let source = f.source.build()?;
        let target = f.target.build()?;
        let table = IndexTable::new(f.m, f.order);
        let mut ops = vec![Matrix::zeros(target.dim(), source.dim()); table.len()];
        for e in &f.ops {
            let p = table
                .position(&e.index)
                .ok_or_else(|| Error::parse(format!("index {:?} outside |k| <= {}", e.index, f.order)))?;
            ops[p] = matrix_from_pairs(&e.matrix)
                .ok_or_else(|| Error::parse("ragged operator matrix"))?;
        }
        DerivativeSystem::new(source, target, f.m, f.order, ops)
    }
}

/// JSON form of a derivative system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemFile {
    pub m: usize,
    #[serde(rename = "N")]
    pub order: u32,
    pub source: AlgebraInput,
    pub target: AlgebraInput,
    pub ops: Vec<OpEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OpEntry {
    pub index: MultiIndex,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// A linear map `A -> B[[m]]` (truncated), stored on flattened coordinates.
#[derive(Clone, Debug)]
pub struct SeriesMap {
    pub op: LinearOp,
    pub space: Arc<SeriesSpace>,
}

impl SeriesMap {
    pub fn new(source: Algebra, space: Arc<SeriesSpace>, matrix: Matrix) -> Result<Self> {
        let op = LinearOp::new(source, space.flat_algebra(), matrix)?;
        Ok(SeriesMap { op, space })
    }

    pub fn apply(&self, a: &Vector) -> SeriesElement {
        self.space
            .from_flat(&self.op.apply(a))
            .expect("flat dimension matches")
    }

    /// Largest `‖h(e_i e_j) − h(e_i) h(e_j)‖` over basis pairs.
    pub fn multiplicative_residual(&self) -> f64 {
        let a = &self.op.source;
        let imgs: Vec<SeriesElement> = (0..a.dim()).map(|i| self.apply(&a.basis_vector(i))).collect();
        let mut r: f64 = 0.0;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let lhs = self.apply(&a.basis_product(i, j));
                let rhs = imgs[i].mul(&imgs[j]).expect("same space");
                r = r.max((lhs.flatten() - rhs.flatten()).norm());
            }
        }
        r
    }

    pub fn unital_residual(&self) -> f64 {
        self.op.unital_residual()
    }

    /// `None` when source or coefficient algebra has no involution.
    pub fn involutive_residual(&self) -> Option<f64> {
        if !self.op.source.has_involution() || !self.space.coeff_algebra().has_involution() {
            return None;
        }
        self.op.involutive_residual().ok()
    }

    fn check_homomorphism(&self, tol: &Tolerances) -> Result<()> {
        let s = max_abs_matrix(&self.op.matrix);
        let u = self.unital_residual();
        if !tol.negligible(u, s) {
            return Err(Error::domain(format!("map is not unital (residual {u:.3e})")));
        }
        let m = self.multiplicative_residual();
        if !tol.negligible(m, (1.0 + s) * (1.0 + s)) {
            return Err(Error::domain(format!(
                "map is not multiplicative (residual {m:.3e})"
            )));
        }
        if let Some(r) = self.involutive_residual() {
            if !tol.negligible(r, s) {
                return Err(Error::domain(format!("map is not involutive (residual {r:.3e})")));
            }
        }
        Ok(())
    }
}

/// `D_k(a) = (∂^k a)(s)` on polynomials of degree at most `degree` (the jet
/// algebra at `s`), with values in `ℂ`.
pub fn taylor_system(m: usize, order: u32, degree: u32, s: &[f64]) -> Result<DerivativeSystem> {
    if degree < order {
        return Err(Error::usage(format!(
            "source degree {degree} must be at least the system order {order}"
        )));
    }
    let source = jet_algebra(m, degree, s)?;
    let target = function_algebra(1);
    let basis = IndexTable::new(m, degree);
    let table = IndexTable::new(m, order);
    let ops = table
        .iter()
        .map(|k| {
            Matrix::from_fn(1, basis.len(), |_, j| {
                C64::new(Poly::monomial(basis.get(j).clone(), 1.0).partial(k).eval(s), 0.0)
            })
        })
        .collect();
    DerivativeSystem::new(source, target, m, order, ops)
}

/// How the random construction of [`random_system`] twists the base
/// homomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    /// No conjugation.
    None,
    /// Conjugation by a unitary series commuting with the block projections.
    Central,
    /// Conjugation by a generic unitary series.
    General,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomSystemSpec {
    pub m: usize,
    pub order: u32,
    /// Block sizes; the target is `M_b` with `b` their sum.
    pub blocks: Vec<usize>,
    pub twist: Twist,
}

/// A random valid system `A -> M_b`.
///
/// The source is a direct sum of jet algebras at random points `s_i`, one
/// per block. The base homomorphism sends the `i`-th summand to its Taylor
/// series at `s_i` times the `i`-th block projection (after a random unitary
/// change of basis). The result is conjugated by `U = exp(K)` with `K` an
/// anti-Hermitian series without constant term, which keeps it a unital
/// `*`-homomorphism. A `General` twist with two or more blocks gives values
/// of `D_1` outside the commutant of `D_0(A)`.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSystemSpec) -> Result<DerivativeSystem> {
    let m = spec.m;
    let n = spec.order;
    if spec.blocks.is_empty() || spec.blocks.contains(&0) {
        return Err(Error::usage("blocks must be nonempty and positive"));
    }
    let b: usize = spec.blocks.iter().sum();
    let target = matrix_algebra(b);
    let points: Vec<Vec<f64>> = spec
        .blocks
        .iter()
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let summands = points
        .iter()
        .map(|s| jet_algebra(m, n, s))
        .collect::<Result<Vec<_>>>()?;
    let source = direct_sum(&summands)?;
    let space = SeriesSpace::new(target.clone(), m, n, Mode::Series)?;
    let table = IndexTable::new(m, n);

    let v = random_unitary(rng, b);
    let embed = |block: &Matrix| -> Vector { flat_matrix(&(&v * block * v.adjoint())) };
    let mut projections = Vec::new();
    let mut offset = 0;
    for &size in &spec.blocks {
        let mut p = Matrix::zeros(b, b);
        for i in offset..offset + size {
            p[(i, i)] = ONE;
        }
        projections.push(embed(&p));
        offset += size;
    }

    let mut k_terms = Vec::new();
    if spec.twist != Twist::None {
        for k in table.iter().skip(1) {
            let raw = random_matrix(rng, b, b);
            let mut anti = (&raw - raw.adjoint()) * C64::new(0.5, 0.0);
            if spec.twist == Twist::Central {
                let mut off = 0;
                let mut masked = Matrix::zeros(b, b);
                for &size in &spec.blocks {
                    masked
                        .view_mut((off, off), (size, size))
                        .copy_from(&anti.view((off, off), (size, size)));
                    off += size;
                }
                anti = masked;
            }
            k_terms.push((k.clone(), embed(&anti)));
        }
    }
    let kser = space.from_coeffs(k_terms)?;
    let u = kser.exp_nilpotent()?;
    let u_inv = kser.scale(C64::new(-1.0, 0.0)).exp_nilpotent()?;

    let da = source.dim();
    let local = table.len();
    let mut ops = vec![Matrix::zeros(b * b, da); table.len()];
    for col in 0..da {
        let (block, j) = (col / local, col % local);
        let mono = Poly::monomial(table.get(j).clone(), 1.0);
        let coeffs: Vec<(MultiIndex, Vector)> = table
            .iter()
            .map(|k| {
                let c = mono.partial(k).eval(&points[block]) / k.factorial() as f64;
                (k.clone(), &projections[block] * C64::new(c, 0.0))
            })
            .collect();
        let phi = space.from_coeffs(coeffs)?;
        let h = u.mul(&phi)?.mul(&u_inv)?;
        for (p, k) in table.iter().enumerate() {
            let f = C64::new(k.factorial() as f64, 0.0);
            ops[p].set_column(col, &(h.coeff_at(p) * f));
        }
    }
    DerivativeSystem::new(source, target, m, n, ops)
}

fn flat_matrix(x: &Matrix) -> Vector {
    let n = x.nrows();
    Vector::from_fn(n * n, |idx, _| x[(idx / n, idx % n)])
}
