//! Finite-dimensional involutive algebras given by structure constants.
//!
//! An algebra of dimension `d` stores, for every basis pair `(i, j)`, the
//! coordinates of `e_i · e_j` as a sparse list. The involution is antilinear:
//! the coordinates of `x*` are `S · conj(x)` for a fixed matrix `S`.
//! Algebras are shared through [`Algebra`] (an `Arc`) so that elements and
//! linear maps can refer to their parents cheaply.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    conj, from_pairs, matrix_from_pairs, matrix_to_pairs, max_abs, max_abs_matrix, null_space,
    random_vector, to_pairs, unit_vector, vstack, Matrix, Subspace, Tolerances,
    Vector, C64, ONE, ZERO,
};
use crate::multiindex::{IndexTable, MultiIndex};
use crate::poly::Poly;

pub type Algebra = Arc<StructureAlgebra>;

type Sparse = Vec<(usize, C64)>;

#[derive(Clone, PartialEq)]
pub struct StructureAlgebra {
    name: String,
    dim: usize,
    table: Vec<Sparse>,
    involution: Option<Matrix>,
    unit: Vector,
    labels: Vec<String>,
}

impl fmt::Debug for StructureAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StructureAlgebra({}, dim {})", self.name, self.dim)
    }
}

fn sparse(v: &Vector) -> Sparse {
    v.iter()
        .enumerate()
        .filter(|(_, z)| **z != ZERO)
        .map(|(k, z)| (k, *z))
        .collect()
}

impl StructureAlgebra {
    /// Build from a product rule on basis vectors. No axioms are checked here;
    /// see [`StructureAlgebra::check_axioms`].
    pub fn from_products(
        name: impl Into<String>,
        dim: usize,
        product: impl Fn(usize, usize) -> Vector,
        involution: Option<Matrix>,
        unit: Vector,
        labels: Vec<String>,
    ) -> Result<Algebra> {
        if dim == 0 {
            return Err(Error::usage("algebra dimension must be positive"));
        }
        if unit.len() != dim {
            return Err(Error::usage("unit vector length differs from dimension"));
        }
        if let Some(s) = &involution {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(Error::usage("involution matrix has the wrong shape"));
            }
        }
        let labels = if labels.len() == dim {
            labels
        } else {
            (0..dim).map(|i| format!("e{i}")).collect()
        };
        let mut table = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let p = product(i, j);
                if p.len() != dim {
                    return Err(Error::usage("product vector length differs from dimension"));
                }
                table.push(sparse(&p));
            }
        }
        Ok(Arc::new(StructureAlgebra {
            name: name.into(),
            dim,
            table,
            involution,
            unit,
            labels,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn involution(&self) -> Option<&Matrix> {
        self.involution.as_ref()
    }

    pub fn has_involution(&self) -> bool {
        self.involution.is_some()
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        unit_vector(self.dim, i)
    }

    /// Coordinates of `e_i · e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> Vector {
        let mut v = Vector::zeros(self.dim);
        for &(k, c) in &self.table[i * self.dim + j] {
            v[k] += c;
        }
        v
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let d = self.dim;
        let mut out = Vector::zeros(d);
        for i in 0..d {
            let xi = x[i];
            if xi == ZERO {
                continue;
            }
            for j in 0..d {
                let yj = y[j];
                if yj == ZERO {
                    continue;
                }
                let f = xi * yj;
                for &(k, c) in &self.table[i * d + j] {
                    out[k] += f * c;
                }
            }
        }
        out
    }

    /// Matrix of `y -> x · y`.
    pub fn left_mul(&self, x: &Vector) -> Matrix {
        let d = self.dim;
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            let xi = x[i];
            if xi == ZERO {
                continue;
            }
            for j in 0..d {
                for &(k, c) in &self.table[i * d + j] {
                    m[(k, j)] += xi * c;
                }
            }
        }
        m
    }

    /// Matrix of `y -> y · x`.
    pub fn right_mul(&self, x: &Vector) -> Matrix {
        let d = self.dim;
        let mut m = Matrix::zeros(d, d);
        for j in 0..d {
            let xj = x[j];
            if xj == ZERO {
                continue;
            }
            for i in 0..d {
                for &(k, c) in &self.table[i * d + j] {
                    m[(k, i)] += xj * c;
                }
            }
        }
        m
    }

    pub fn involve(&self, x: &Vector) -> Result<Vector> {
        match &self.involution {
            Some(s) => Ok(s * conj(x)),
            None => Err(Error::domain(format!("{} has no involution", self.name))),
        }
    }

    /// `x* = x` up to tolerance.
    pub fn is_real(&self, x: &Vector, tol: &Tolerances) -> Result<bool> {
        let r = (self.involve(x)? - x).norm();
        Ok(tol.negligible(r, x.norm()))
    }

    pub fn commutator(&self, x: &Vector, y: &Vector) -> Vector {
        self.mul(x, y) - self.mul(y, x)
    }

    pub fn is_commutative(&self, tol: &Tolerances) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (i + 1..d).all(|j| {
                let c = self.commutator(&self.basis_vector(i), &self.basis_vector(j));
                tol.negligible(c.norm(), 1.0)
            })
        })
    }

    /// Residuals of the associativity, unit and involution laws on basis
    /// triples and pairs.
    pub fn check_axioms(&self) -> AxiomReport {
        let d = self.dim;
        let e: Vec<Vector> = (0..d).map(|i| self.basis_vector(i)).collect();
        let prods: Vec<Vec<Vector>> = (0..d)
            .map(|i| (0..d).map(|j| self.basis_product(i, j)).collect())
            .collect();
        let mut assoc: f64 = 0.0;
        for (i, ei) in e.iter().enumerate() {
            for (j, row) in prods.iter().enumerate() {
                for (k, ek) in e.iter().enumerate() {
                    let l = self.mul(&prods[i][j], ek);
                    let r = self.mul(ei, &row[k]);
                    assoc = assoc.max((l - r).norm());
                }
            }
        }
        let mut unit: f64 = 0.0;
        for x in &e {
            unit = unit.max((self.mul(&self.unit, x) - x).norm());
            unit = unit.max((self.mul(x, &self.unit) - x).norm());
        }
        let involution = self.involution.as_ref().map(|s| {
            let mut r: f64 = (s * conj(&self.unit) - &self.unit).norm();
            for (i, x) in e.iter().enumerate() {
                let xs = s * conj(x);
                r = r.max((s * conj(&xs) - x).norm());
                for (j, y) in e.iter().enumerate() {
                    let lhs = s * conj(&prods[i][j]);
                    let rhs = self.mul(&(s * conj(y)), &xs);
                    r = r.max((lhs - rhs).norm());
                }
            }
            r
        });
        AxiomReport {
            associativity: assoc,
            unit,
            involution,
        }
    }

    /// Trace of the left regular representation of `x`.
    pub fn trace(&self, x: &Vector) -> C64 {
        self.left_mul(x).trace()
    }

    pub fn element(self: &Arc<Self>, coords: Vector) -> Result<Element> {
        Element::new(self.clone(), coords)
    }

    pub fn to_spec(&self) -> AlgebraSpec {
        let d = self.dim;
        let structure = (0..d)
            .map(|i| (0..d).map(|j| to_pairs(&self.basis_product(i, j))).collect())
            .collect();
        AlgebraSpec {
            dim: d,
            structure,
            involution: self.involution.as_ref().map(matrix_to_pairs),
            unit: to_pairs(&self.unit),
            labels: Some(self.labels.clone()),
        }
    }

    pub fn from_spec(spec: &AlgebraSpec) -> Result<Algebra> {
        let d = spec.dim;
        if spec.structure.len() != d
            || spec
                .structure
                .iter()
                .any(|row| row.len() != d || row.iter().any(|v| v.len() != d))
        {
            return Err(Error::parse(format!("structure tensor must be {d}x{d}x{d}")));
        }
        if spec.unit.len() != d {
            return Err(Error::parse(format!("unit must have length {d}")));
        }
        let involution = match &spec.involution {
            Some(rows) => {
                let m = matrix_from_pairs(rows)
                    .filter(|m| m.nrows() == d && m.ncols() == d)
                    .ok_or_else(|| Error::parse(format!("involution must be {d}x{d}")))?;
                Some(m)
            }
            None => None,
        };
        StructureAlgebra::from_products(
            "spec",
            d,
            |i, j| from_pairs(&spec.structure[i][j]),
            involution,
            from_pairs(&spec.unit),
            spec.labels.clone().unwrap_or_default(),
        )
    }
}

/// JSON form of an algebra: `structure[i][j]` holds the coordinates of
/// `e_i · e_j` as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub structure: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub involution: Option<Vec<Vec<[f64; 2]>>>,
    pub unit: Vec<[f64; 2]>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

/// An algebra in an input file: either a constructor name or a full spec.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraInput {
    Name(String),
    Spec(AlgebraSpec),
}

impl AlgebraInput {
    pub fn build(&self) -> Result<Algebra> {
        match self {
            AlgebraInput::Name(n) => from_name(n),
            AlgebraInput::Spec(s) => StructureAlgebra::from_spec(s),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub associativity: f64,
    pub unit: f64,
    /// `None` when the algebra carries no involution.
    pub involution: Option<f64>,
}

impl AxiomReport {
    pub fn max_residual(&self) -> f64 {
        self.associativity
            .max(self.unit)
            .max(self.involution.unwrap_or(0.0))
    }

    pub fn holds(&self, bound: f64) -> bool {
        self.max_residual() <= bound
    }
}

/// An element of a specific algebra.
#[derive(Clone)]
pub struct Element {
    parent: Algebra,
    coords: Vector,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({}, {:?})", self.parent.name, self.coords.as_slice())
    }
}

impl Element {
    pub fn new(parent: Algebra, coords: Vector) -> Result<Self> {
        if coords.len() != parent.dim {
            return Err(Error::usage(format!(
                "element has {} coordinates, algebra {} has dimension {}",
                coords.len(),
                parent.name,
                parent.dim
            )));
        }
        Ok(Element { parent, coords })
    }

    pub fn unit(parent: &Algebra) -> Self {
        Element {
            parent: parent.clone(),
            coords: parent.unit.clone(),
        }
    }

    pub fn basis(parent: &Algebra, i: usize) -> Self {
        Element {
            parent: parent.clone(),
            coords: parent.basis_vector(i),
        }
    }

    pub fn parent(&self) -> &Algebra {
        &self.parent
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    fn same_parent(&self, other: &Element) -> Result<()> {
        if Arc::ptr_eq(&self.parent, &other.parent) || *self.parent == *other.parent {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "elements belong to different algebras ({} and {})",
                self.parent.name, other.parent.name
            )))
        }
    }

    fn with(&self, coords: Vector) -> Element {
        Element {
            parent: self.parent.clone(),
            coords,
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.same_parent(other)?;
        Ok(self.with(self.parent.mul(&self.coords, &other.coords)))
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.same_parent(other)?;
        Ok(self.with(&self.coords + &other.coords))
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.same_parent(other)?;
        Ok(self.with(&self.coords - &other.coords))
    }

    pub fn scale(&self, c: C64) -> Element {
        self.with(&self.coords * c)
    }

    pub fn involve(&self) -> Result<Element> {
        Ok(self.with(self.parent.involve(&self.coords)?))
    }

    /// `(Re x, Im x) = ((x + x*)/2, (x - x*)/(2i))`.
    pub fn re_im(&self) -> Result<(Element, Element)> {
        let xs = self.parent.involve(&self.coords)?;
        let re = (&self.coords + &xs) * C64::new(0.5, 0.0);
        let im = (&self.coords - &xs) / C64::new(0.0, 2.0);
        Ok((self.with(re), self.with(im)))
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }
}

/// Linear map between two algebras, as a matrix in their bases.
#[derive(Clone)]
pub struct LinearOp {
    pub source: Algebra,
    pub target: Algebra,
    pub matrix: Matrix,
}

impl fmt::Debug for LinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LinearOp({} -> {}, {}x{})",
            self.source.name,
            self.target.name,
            self.matrix.nrows(),
            self.matrix.ncols()
        )
    }
}

impl LinearOp {
    pub fn new(source: Algebra, target: Algebra, matrix: Matrix) -> Result<Self> {
        if matrix.nrows() != target.dim || matrix.ncols() != source.dim {
            return Err(Error::usage(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                target.dim,
                source.dim
            )));
        }
        Ok(LinearOp {
            source,
            target,
            matrix,
        })
    }

    pub fn identity(a: &Algebra) -> Self {
        LinearOp {
            source: a.clone(),
            target: a.clone(),
            matrix: Matrix::identity(a.dim, a.dim),
        }
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x
    }

    /// `self ∘ first`
    pub fn after(&self, first: &LinearOp) -> Result<LinearOp> {
        if first.target.dim != self.source.dim {
            return Err(Error::usage("composition of maps with mismatched algebras"));
        }
        LinearOp::new(
            first.source.clone(),
            self.target.clone(),
            &self.matrix * &first.matrix,
        )
    }

    /// `‖φ(1) − 1‖`
    pub fn unital_residual(&self) -> f64 {
        (self.apply(&self.source.unit) - &self.target.unit).norm()
    }

    /// `max ‖φ(e_i e_j) − φ(e_i) φ(e_j)‖` over basis pairs.
    pub fn multiplicative_residual(&self) -> f64 {
        let d = self.source.dim;
        let cols: Vec<Vector> = (0..d).map(|i| self.matrix.column(i).into_owned()).collect();
        let mut r: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let lhs = self.apply(&self.source.basis_product(i, j));
                let rhs = self.target.mul(&cols[i], &cols[j]);
                r = r.max((lhs - rhs).norm());
            }
        }
        r
    }

    /// `‖Φ S_A − S_B conj(Φ)‖`, the matrix form of `φ(x*) = φ(x)*`.
    pub fn involutive_residual(&self) -> Result<f64> {
        let sa = self
            .source
            .involution
            .as_ref()
            .ok_or_else(|| Error::domain(format!("{} has no involution", self.source.name)))?;
        let sb = self
            .target
            .involution
            .as_ref()
            .ok_or_else(|| Error::domain(format!("{} has no involution", self.target.name)))?;
        Ok((&self.matrix * sa - sb * self.matrix.map(|z| z.conj())).norm())
    }

    pub fn is_homomorphism(&self, tol: &Tolerances) -> bool {
        let scale = max_abs_matrix(&self.matrix);
        tol.negligible(self.unital_residual(), scale)
            && tol.negligible(self.multiplicative_residual(), scale * scale)
    }

    pub fn is_star_homomorphism(&self, tol: &Tolerances) -> bool {
        let scale = max_abs_matrix(&self.matrix);
        self.is_homomorphism(tol)
            && self
                .involutive_residual()
                .map(|r| tol.negligible(r, scale))
                .unwrap_or(false)
    }

    /// `span φ(A)`.
    pub fn image(&self, tol: &Tolerances) -> Subspace {
        let cols: Vec<Vector> = (0..self.matrix.ncols())
            .map(|j| self.matrix.column(j).into_owned())
            .collect();
        Subspace::span(self.target.dim, &cols, tol)
    }

    pub fn kernel(&self, tol: &Tolerances) -> Subspace {
        Subspace::span(self.source.dim, &null_space(&self.matrix, tol), tol)
    }
}

/// A multiplicative unital functional `s(x) = functional · x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    pub functional: Vector,
}

impl Character {
    pub fn new(functional: Vector) -> Self {
        Character { functional }
    }

    pub fn eval(&self, x: &Vector) -> C64 {
        self.functional.dot(x)
    }

    /// Largest violation of `s(1) = 1` and `s(e_i e_j) = s(e_i) s(e_j)`.
    pub fn multiplicative_residual(&self, a: &StructureAlgebra) -> f64 {
        let f = &self.functional;
        let d = a.dim;
        let mut r = (self.eval(&a.unit) - ONE).norm();
        for i in 0..d {
            for j in 0..d {
                let v = self.eval(&a.basis_product(i, j)) - f[i] * f[j];
                r = r.max(v.norm());
            }
        }
        r
    }

    /// `‖f S − conj(f)‖`, the matrix form of `s(x*) = conj(s(x))`.
    pub fn involutive_residual(&self, a: &StructureAlgebra) -> Result<f64> {
        let s = a
            .involution
            .as_ref()
            .ok_or_else(|| Error::domain(format!("{} has no involution", a.name)))?;
        Ok((s.transpose() * &self.functional - conj(&self.functional)).norm())
    }

    /// The maximal ideal `Ker s`.
    pub fn kernel(&self, tol: &Tolerances) -> Subspace {
        Subspace::kernel_of_functional(&self.functional, tol)
    }

    /// The character `s ∘ φ` of the source of `phi`.
    pub fn pull_back(&self, phi: &LinearOp) -> Character {
        Character::new(phi.matrix.transpose() * &self.functional)
    }
}

// ---------------------------------------------------------------------------
// Constructors

/// Full matrix algebra `M_n` with basis `E_ij` at index `i*n + j` and the
/// conjugate-transpose involution.
pub fn matrix_algebra(n: usize) -> Algebra {
    let d = n * n;
    let mut s = Matrix::zeros(d, d);
    let mut unit = Vector::zeros(d);
    for i in 0..n {
        unit[i * n + i] = ONE;
        for j in 0..n {
            s[(j * n + i, i * n + j)] = ONE;
        }
    }
    let labels = (0..d)
        .map(|k| format!("E{}{}", k / n + 1, k % n + 1))
        .collect();
    StructureAlgebra::from_products(
        format!("matrix:{n}"),
        d,
        |a, b| {
            let (i, j) = (a / n, a % n);
            let (k, l) = (b / n, b % n);
            let mut v = Vector::zeros(d);
            if j == k {
                v[i * n + l] = ONE;
            }
            v
        },
        Some(s),
        unit,
        labels,
    )
    .expect("valid matrix algebra")
}

/// `ℂ^n` with pointwise operations.
pub fn function_algebra(n: usize) -> Algebra {
    StructureAlgebra::from_products(
        format!("func:{n}"),
        n,
        |i, j| {
            let mut v = Vector::zeros(n);
            if i == j {
                v[i] = ONE;
            }
            v
        },
        Some(Matrix::identity(n, n)),
        Vector::from_element(n, ONE),
        (0..n).map(|i| format!("p{}", i + 1)).collect(),
    )
    .expect("valid function algebra")
}

fn monomial_label(k: &MultiIndex) -> String {
    if k.is_zero() {
        return "1".into();
    }
    let m = k.len();
    let mut parts = Vec::new();
    for (i, &e) in k.entries().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let var = if m == 1 {
            "x".to_string()
        } else {
            format!("x{}", i + 1)
        };
        parts.push(if e == 1 { var } else { format!("{var}^{e}") });
    }
    parts.join("*")
}

/// Polynomials in `m` variables of degree at most `order`; products of
/// higher degree are dropped. Basis: monomials in graded-lex order.
pub fn truncated_poly(m: usize, order: u32) -> Algebra {
    let table = IndexTable::new(m, order);
    let d = table.len();
    let mut unit = Vector::zeros(d);
    unit[0] = ONE;
    StructureAlgebra::from_products(
        format!("poly:{m}:{order}"),
        d,
        |i, j| {
            let mut v = Vector::zeros(d);
            let k = table.get(i).add(table.get(j)).expect("same length");
            if let Some(p) = table.position(&k) {
                v[p] = ONE;
            }
            v
        },
        Some(Matrix::identity(d, d)),
        unit,
        table.iter().map(monomial_label).collect(),
    )
    .expect("valid truncated polynomial algebra")
}

/// The canonical projection `jet_algebra(m, from, s) -> jet_algebra(m, to, s)`
/// given by Taylor truncation at `s`.
pub fn truncation_map(m: usize, from: u32, to: u32, s: &[f64]) -> Result<LinearOp> {
    if to > from {
        return Err(Error::usage(format!("cannot truncate degree {from} to {to}")));
    }
    let src = IndexTable::new(m, from);
    let tgt = IndexTable::new(m, to);
    let mut matrix = Matrix::zeros(tgt.len(), src.len());
    for (j, k) in src.iter().enumerate() {
        let t = Poly::monomial(k.clone(), 1.0).taylor(s, to);
        matrix.set_column(j, &t.to_coords(&tgt)?);
    }
    LinearOp::new(jet_algebra(m, from, s)?, jet_algebra(m, to, s)?, matrix)
}

/// Polynomials of degree at most `order` in the monomial basis `x^k`, with
/// the product reduced modulo the `(order+1)`-st power of the maximal ideal
/// at `s`. At `s = 0` this is [`truncated_poly`].
pub fn jet_algebra(m: usize, order: u32, s: &[f64]) -> Result<Algebra> {
    if s.len() != m {
        return Err(Error::usage(format!("point has {} coordinates, expected {m}", s.len())));
    }
    let table = IndexTable::new(m, order);
    let d = table.len();
    let mut unit = Vector::zeros(d);
    unit[0] = ONE;
    let chart: Vec<Poly> = table.iter().map(|k| Poly::chart_monomial(s, k)).collect();
    let reduce = |p: &Poly| -> Vector {
        // Taylor truncation at s of order `order`, re-expanded in x-monomials.
        let mut acc = Poly::zero(m);
        for (idx, k) in table.iter().enumerate() {
            let c = p.partial(k).eval(s) / k.factorial() as f64;
            if c != 0.0 {
                acc = &acc + &chart[idx].scale(c);
            }
        }
        acc.to_coords(&table).expect("degree within order")
    };
    StructureAlgebra::from_products(
        format!("jet:{m}:{order}:{s:?}"),
        d,
        |i, j| {
            let k = table.get(i).add(table.get(j)).expect("same length");
            match table.position(&k) {
                Some(p) => unit_vector(d, p),
                None => reduce(&Poly::monomial(k, 1.0)),
            }
        },
        Some(Matrix::identity(d, d)),
        unit,
        table.iter().map(monomial_label).collect(),
    )
}

/// The cusp algebra `span{1, x², x³, ..., x^order}` inside `ℂ[x]/x^{order+1}`.
pub fn cusp(order: u32) -> Result<Algebra> {
    if order < 2 {
        return Err(Error::usage("cusp algebra needs order >= 2"));
    }
    let exps: Vec<u32> = std::iter::once(0).chain(2..=order).collect();
    let d = exps.len();
    let mut unit = Vector::zeros(d);
    unit[0] = ONE;
    StructureAlgebra::from_products(
        format!("cusp:{order}"),
        d,
        |i, j| {
            let mut v = Vector::zeros(d);
            let e = exps[i] + exps[j];
            if let Some(p) = exps.iter().position(|&x| x == e) {
                v[p] = ONE;
            }
            v
        },
        Some(Matrix::identity(d, d)),
        unit,
        exps.iter()
            .map(|&e| match e {
                0 => "1".to_string(),
                e => format!("x^{e}"),
            })
            .collect(),
    )
}

pub fn direct_sum(parts: &[Algebra]) -> Result<Algebra> {
    if parts.is_empty() {
        return Err(Error::usage("direct sum of no algebras"));
    }
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0, |acc, a| {
            let o = *acc;
            *acc += a.dim;
            Some(o)
        })
        .collect();
    let d: usize = parts.iter().map(|a| a.dim).sum();
    let locate = |i: usize| -> (usize, usize) {
        let p = offsets.iter().rposition(|&o| o <= i).expect("offset");
        (p, i - offsets[p])
    };
    let involution = if parts.iter().all(|a| a.involution.is_some()) {
        let mut s = Matrix::zeros(d, d);
        for (a, &o) in parts.iter().zip(&offsets) {
            s.view_mut((o, o), (a.dim, a.dim))
                .copy_from(a.involution.as_ref().expect("checked"));
        }
        Some(s)
    } else {
        None
    };
    let mut unit = Vector::zeros(d);
    let mut labels = Vec::with_capacity(d);
    for (n, (a, &o)) in parts.iter().zip(&offsets).enumerate() {
        unit.rows_mut(o, a.dim).copy_from(&a.unit);
        labels.extend(a.labels.iter().map(|l| format!("{l}[{n}]")));
    }
    let name = parts
        .iter()
        .map(|a| a.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    StructureAlgebra::from_products(
        name,
        d,
        |i, j| {
            let (pi, li) = locate(i);
            let (pj, lj) = locate(j);
            let mut v = Vector::zeros(d);
            if pi == pj {
                let a = &parts[pi];
                for &(k, c) in &a.table[li * a.dim + lj] {
                    v[offsets[pi] + k] = c;
                }
            }
            v
        },
        involution,
        unit,
        labels,
    )
}

/// `A ⊗ B` with basis `a_i ⊗ b_j` at index `i * dim(B) + j`.
pub fn tensor_product(a: &Algebra, b: &Algebra) -> Result<Algebra> {
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    let involution = match (&a.involution, &b.involution) {
        (Some(sa), Some(sb)) => Some(sa.kronecker(sb)),
        _ => None,
    };
    let labels = (0..d)
        .map(|k| format!("{}⊗{}", a.labels[k / db], b.labels[k % db]))
        .collect();
    StructureAlgebra::from_products(
        format!("{}⊗{}", a.name, b.name),
        d,
        |x, y| {
            let (i, j) = (x / db, x % db);
            let (k, l) = (y / db, y % db);
            let mut v = Vector::zeros(d);
            for &(p, c) in &a.table[i * da + k] {
                for &(q, e) in &b.table[j * db + l] {
                    v[p * db + q] += c * e;
                }
            }
            v
        },
        involution,
        a.unit.kronecker(&b.unit),
        labels,
    )
}

/// Group algebra of `ℤ_{n_1} × ... × ℤ_{n_r}` with basis `δ_g` (mixed radix,
/// first factor most significant), convolution product and `δ_g* = δ_{-g}`.
pub fn group_algebra(factors: &[usize]) -> Result<Algebra> {
    if factors.is_empty() || factors.contains(&0) {
        return Err(Error::usage("group needs at least one factor, each positive"));
    }
    let g = crate::spectra::FiniteAbelianGroup::new(factors.to_vec())?;
    let d = g.order();
    let mut s = Matrix::zeros(d, d);
    for x in 0..d {
        s[(g.neg(x), x)] = ONE;
    }
    let labels = (0..d).map(|x| format!("δ{:?}", g.element(x))).collect();
    StructureAlgebra::from_products(
        format!("group:{}", g.label()),
        d,
        |x, y| unit_vector(d, g.add(x, y)),
        Some(s),
        unit_vector(d, 0),
        labels,
    )
}

/// Algebra spanned by independent vectors `basis` of `b` (which must contain
/// the unit and be closed under multiplication), with its inclusion map. The
/// involution is inherited when the span is `*`-closed.
pub fn subalgebra(b: &Algebra, basis: &[Vector], tol: &Tolerances) -> Result<(Algebra, LinearOp)> {
    let k = basis.len();
    let span = Subspace::span(b.dim, basis, tol);
    if span.dim() != k {
        return Err(Error::usage("subalgebra basis is linearly dependent"));
    }
    let emb = crate::linalg::columns(b.dim, basis);
    let pinv = crate::linalg::left_inverse(&emb)
        .ok_or_else(|| Error::numeric("subalgebra basis is numerically dependent"))?;
    let coords = |v: &Vector| -> Result<Vector> {
        if !span.contains(v, tol) {
            return Err(Error::domain("span is not closed under the algebra operations"));
        }
        Ok(&pinv * v)
    };
    let unit = coords(&b.unit)
        .map_err(|_| Error::domain("subalgebra basis does not span the unit"))?;
    let mut prods = vec![Vector::zeros(k); k * k];
    for i in 0..k {
        for j in 0..k {
            let p = b.mul(&basis[i], &basis[j]);
            prods[i * k + j] = coords(&p).map_err(|_| {
                Error::domain(format!("product of basis vectors {i} and {j} leaves the span"))
            })?;
        }
    }
    let involution = b.involution.as_ref().and_then(|s| {
        let star_closed = basis.iter().all(|v| span.contains(&(s * conj(v)), tol));
        star_closed.then(|| &pinv * s * emb.map(|z| z.conj()))
    });
    let a = StructureAlgebra::from_products(
        format!("sub({})", b.name),
        k,
        |i, j| prods[i * k + j].clone(),
        involution,
        unit,
        Vec::new(),
    )?;
    let inc = LinearOp::new(a.clone(), b.clone(), emb)?;
    Ok((a, inc))
}

/// Look up a constructor by name: `matrix:n`, `func:n`, `poly:m:N`,
/// `cusp:N`, `group:4x2`, `jet:m:N:s1,s2,...`, or a `+`-separated direct sum.
pub fn from_name(name: &str) -> Result<Algebra> {
    if name.contains('+') {
        let parts = name
            .split('+')
            .map(|p| from_name(p.trim()))
            .collect::<Result<Vec<_>>>()?;
        return direct_sum(&parts);
    }
    let bad = || Error::parse(format!("unknown algebra name {name:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["matrix", n] => {
            let n = num(n)?;
            if n == 0 {
                return Err(bad());
            }
            Ok(matrix_algebra(n))
        }
        ["func", n] => {
            let n = num(n)?;
            if n == 0 {
                return Err(bad());
            }
            Ok(function_algebra(n))
        }
        ["poly", m, n] => {
            let m = num(m)?;
            if m == 0 {
                return Err(bad());
            }
            Ok(truncated_poly(m, num(n)? as u32))
        }
        ["cusp", n] => cusp(num(n)? as u32),
        ["group", g] => {
            let factors = crate::spectra::FiniteAbelianGroup::parse(g)?;
            group_algebra(factors.factors())
        }
        ["jet", m, n, s] => {
            let m = num(m)?;
            let s = s
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            jet_algebra(m, num(n)? as u32, &s)
        }
        _ => Err(bad()),
    }
}

// ---------------------------------------------------------------------------
// Subspace operations

/// `span{m · n : m ∈ M, n ∈ N}`.
pub fn subspace_product(a: &StructureAlgebra, m: &Subspace, n: &Subspace, tol: &Tolerances) -> Subspace {
    let mut prods = Vec::with_capacity(m.dim() * n.dim());
    for x in m.basis() {
        let l = a.left_mul(x);
        let ln = l.norm();
        for y in n.basis() {
            // a product that cancels to rounding level is zero, not a direction
            let p = &l * y;
            if p.norm() > (tol.rank * ln * y.norm()).max(tol.zero) {
                prods.push(p);
            }
        }
    }
    Subspace::span(a.dim, &prods, tol)
}

/// Smallest unital subalgebra containing the given elements.
pub fn generated_subalgebra(a: &StructureAlgebra, gens: &[Vector], tol: &Tolerances) -> Subspace {
    let mut vs = vec![a.unit.clone()];
    vs.extend_from_slice(gens);
    let mut span = Subspace::span(a.dim, &vs, tol);
    loop {
        let next = subspace_product(a, &span, &span, tol).sum(&span, tol);
        if next.dim() == span.dim() {
            return span;
        }
        span = next;
    }
}

/// Basis vectors chosen greedily until they generate the whole algebra.
pub fn generating_set(a: &StructureAlgebra, tol: &Tolerances) -> Vec<Vector> {
    let mut gens = Vec::new();
    let mut span = generated_subalgebra(a, &gens, tol);
    for i in 0..a.dim {
        if span.dim() == a.dim {
            break;
        }
        let e = a.basis_vector(i);
        if !span.contains(&e, tol) {
            gens.push(e);
            span = generated_subalgebra(a, &gens, tol);
        }
    }
    gens
}

/// `{b : b s = s b for every s in S}`.
pub fn centralizer(a: &StructureAlgebra, s: &Subspace, tol: &Tolerances) -> Subspace {
    if s.dim() == 0 {
        return Subspace::full(a.dim);
    }
    let blocks: Vec<Matrix> = s
        .basis()
        .iter()
        .map(|x| a.right_mul(x) - a.left_mul(x))
        .collect();
    let stacked = vstack(&blocks, a.dim);
    Subspace::span(a.dim, &null_space(&stacked, tol), tol)
}

pub fn center(a: &StructureAlgebra, tol: &Tolerances) -> Subspace {
    centralizer(a, &Subspace::full(a.dim), tol)
}

/// First basis pair `(i, v)` with `e_i · v ∉ I` (left) or `v · e_i ∉ I`
/// (right), where `v` runs over the basis of `I`.
pub fn ideal_violation(
    a: &StructureAlgebra,
    ideal: &Subspace,
    two_sided: bool,
    tol: &Tolerances,
) -> Option<(usize, usize, &'static str)> {
    // Rounding in a product is bounded by the size of the multiplication
    // operator, not by the (possibly heavily cancelled) result.
    let inside = |w: &Vector, bound: f64| ideal.residual(w) <= (tol.rank * w.norm().max(bound)).max(tol.zero);
    for i in 0..a.dim {
        let e = a.basis_vector(i);
        let (l, r) = (a.left_mul(&e), a.right_mul(&e));
        let (ln, rn) = (l.norm(), r.norm());
        for (vi, v) in ideal.basis().iter().enumerate() {
            if !inside(&(&l * v), ln * v.norm()) {
                return Some((i, vi, "left"));
            }
            if two_sided && !inside(&(&r * v), rn * v.norm()) {
                return Some((i, vi, "right"));
            }
        }
    }
    None
}

pub fn is_star_closed(a: &StructureAlgebra, s: &Subspace, tol: &Tolerances) -> Result<bool> {
    for v in s.basis() {
        if !s.contains(&a.involve(v)?, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Quotient `A / I` on the complement spanned by the basis vectors at the
/// non-pivot columns of `I`, together with the projection.
pub fn quotient(a: &Algebra, ideal: &Subspace, tol: &Tolerances) -> Result<(Algebra, LinearOp)> {
    if ideal.ambient() != a.dim {
        return Err(Error::usage("ideal lives in a different ambient space"));
    }
    if let Some((i, v, side)) = ideal_violation(a, ideal, true, tol) {
        return Err(Error::domain(format!(
            "subspace is not a two-sided ideal: {side} product of basis element {} ({}) with ideal basis vector {v} leaves it",
            i, a.labels[i]
        )));
    }
    let free = ideal.echelon().free_columns();
    let q = free.len();
    if q == 0 {
        return Err(Error::domain("quotient by the whole algebra is the zero space"));
    }
    let ech = ideal.echelon();
    let mut proj = Matrix::zeros(q, a.dim);
    for c in 0..a.dim {
        let r = ech.reduce(&a.basis_vector(c));
        for (qi, &f) in free.iter().enumerate() {
            proj[(qi, c)] = r[f];
        }
    }
    let mut lift = Matrix::zeros(a.dim, q);
    for (qi, &f) in free.iter().enumerate() {
        lift[(f, qi)] = ONE;
    }
    let involution = match &a.involution {
        Some(s) if is_star_closed(a, ideal, tol)? => Some(&proj * s * &lift),
        _ => None,
    };
    let labels = free.iter().map(|&f| a.labels[f].clone()).collect();
    let qa = StructureAlgebra::from_products(
        format!("{}/I", a.name),
        q,
        |i, j| &proj * a.basis_product(free[i], free[j]),
        involution,
        &proj * &a.unit,
        labels,
    )?;
    let p = LinearOp::new(a.clone(), qa.clone(), proj)?;
    Ok((qa, p))
}

/// Radical of a commutative algebra: the null space of the trace form
/// `(x, y) -> tr L_{xy}`.
pub fn radical(a: &StructureAlgebra, tol: &Tolerances) -> Subspace {
    let d = a.dim;
    let mut t = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            t[(i, j)] = a.trace(&a.basis_product(i, j));
        }
    }
    Subspace::span(d, &null_space(&t, tol), tol)
}

const CHARACTER_SEED: u64 = 0x5eed_c4a2;
const CHARACTER_ATTEMPTS: usize = 6;

/// All characters of a commutative algebra; involutive ones only when the
/// algebra carries an involution.
///
/// Characters factor through the semisimple quotient `A / rad A`, where the
/// transposed multiplication operator of a generic element has simple
/// eigenvalues whose eigenvectors are exactly the characters.
pub fn characters(a: &Algebra, tol: &Tolerances) -> Result<Vec<Character>> {
    if !a.is_commutative(tol) {
        return Err(Error::domain(format!(
            "characters requested for the non-commutative algebra {}",
            a.name
        )));
    }
    let rad = radical(a, tol);
    let (semi, proj) = if rad.dim() == 0 {
        (a.clone(), LinearOp::identity(a))
    } else {
        quotient(a, &rad, tol)?
    };
    let r = semi.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(CHARACTER_SEED);
    let mut last_err = String::new();
    for _ in 0..CHARACTER_ATTEMPTS {
        let g = random_vector(&mut rng, r);
        let lt = semi.left_mul(&g).transpose();
        let scale = max_abs_matrix(&lt).max(1.0);
        let eig: Vec<C64> = match lt.clone().schur().eigenvalues() {
            Some(e) => e.iter().copied().collect(),
            None => {
                last_err = "Schur decomposition did not converge".into();
                continue;
            }
        };
        let min_gap = eig
            .iter()
            .enumerate()
            .flat_map(|(i, x)| eig[i + 1..].iter().map(move |y| (x - y).norm()))
            .fold(f64::INFINITY, f64::min);
        if min_gap < 1e-6 * scale {
            last_err = format!("eigenvalue cluster (gap {min_gap:.2e})");
            continue;
        }
        let mut found = Vec::with_capacity(r);
        let mut ok = true;
        for lambda in &eig {
            let shifted = &lt - Matrix::identity(r, r) * *lambda;
            let ns = null_space(&shifted, &Tolerances { zero: tol.zero, rank: 1e-7 });
            if ns.len() != 1 {
                ok = false;
                last_err = format!("eigenspace of dimension {}", ns.len());
                break;
            }
            let v = &ns[0];
            let norm1 = v.dot(&semi.unit);
            if norm1.norm() < tol.zero {
                ok = false;
                last_err = "eigenvector vanishes on the unit".into();
                break;
            }
            found.push(v / norm1);
        }
        if !ok {
            continue;
        }
        let mut out = Vec::new();
        for f in found {
            let ch = Character::new(proj.matrix.transpose() * f);
            let scale = max_abs(&ch.functional).max(1.0);
            let res = ch.multiplicative_residual(a);
            if res > 1e-7 * scale * scale {
                return Err(Error::numeric(format!(
                    "extracted functional is not multiplicative (residual {res:.2e})"
                )));
            }
            if a.involution.is_some() && ch.involutive_residual(a)? > 1e-7 * scale {
                continue;
            }
            out.push(ch);
        }
        sort_characters(&mut out);
        return Ok(out);
    }
    Err(Error::numeric(format!(
        "character extraction for {} failed: {last_err}",
        a.name
    )))
}

fn sort_characters(cs: &mut [Character]) {
    let key = |c: &Character| -> Vec<(i64, i64)> {
        c.functional
            .iter()
            .map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64))
            .collect()
    };
    cs.sort_by_key(key);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_vector, real_vector, I};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn matrix_units_multiply() {
        let m2 = matrix_algebra(2);
        let e12 = Element::basis(&m2, 1);
        let e21 = Element::basis(&m2, 2);
        let p = e12.mul(&e21).unwrap();
        assert_eq!(p.coords(), &unit_vector(4, 0));
        let q = e21.mul(&e12).unwrap();
        assert_eq!(q.coords(), &unit_vector(4, 3));
    }

    #[test]
    fn pointwise_product_and_unit() {
        let c3 = function_algebra(3);
        let x = c3.element(real_vector(&[1.0, 2.0, 3.0])).unwrap();
        let y = c3.element(real_vector(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(x.mul(&y).unwrap().coords(), &real_vector(&[1.0, 0.0, 3.0]));
        assert_eq!(Element::unit(&c3).mul(&x).unwrap().coords(), x.coords());
    }

    #[test]
    fn parent_mismatch_is_reported() {
        let a = Element::unit(&function_algebra(2));
        let b = Element::unit(&matrix_algebra(2));
        assert!(matches!(a.mul(&b), Err(Error::Usage(_))));
    }

    #[test]
    fn constructors_satisfy_axioms() {
        let algs = vec![
            matrix_algebra(3),
            function_algebra(4),
            truncated_poly(2, 3),
            jet_algebra(2, 2, &[0.5, -1.0]).unwrap(),
            cusp(6).unwrap(),
            group_algebra(&[4, 2]).unwrap(),
            direct_sum(&[matrix_algebra(2), function_algebra(2)]).unwrap(),
            tensor_product(&matrix_algebra(2), &truncated_poly(1, 2)).unwrap(),
        ];
        for a in algs {
            let r = a.check_axioms();
            assert!(r.holds(1e-9), "{}: {:?}", a.name(), r);
        }
    }

    #[test]
    fn re_im_examples() {
        let m2 = matrix_algebra(2);
        let e12 = Element::basis(&m2, 1);
        let (re, im) = e12.re_im().unwrap();
        assert!((re.coords() - real_vector(&[0.0, 0.5, 0.5, 0.0])).norm() < 1e-15);
        let back = re.add(&im.scale(I)).unwrap();
        assert!((back.coords() - e12.coords()).norm() < 1e-15);

        let y = m2.element(real_vector(&[1.0, 2.0, 2.0, -1.0])).unwrap();
        let (re, im) = y.re_im().unwrap();
        assert!((re.coords() - y.coords()).norm() < 1e-15 && im.norm() < 1e-15);
        let (re, im) = y.scale(I).re_im().unwrap();
        assert!(re.norm() < 1e-15 && (im.coords() - y.coords()).norm() < 1e-15);
    }

    #[test]
    fn subspace_product_examples() {
        let t = tol();
        let p = truncated_poly(1, 3);
        let x = Subspace::span(4, &[unit_vector(4, 1)], &t);
        let x2 = subspace_product(&p, &x, &x, &t);
        assert!(x2.same_as(&Subspace::span(4, &[unit_vector(4, 2)], &t), &t));
        let z = subspace_product(&p, &Subspace::full(4), &Subspace::zero(4), &t);
        assert_eq!(z.dim(), 0);
        let m2 = matrix_algebra(2);
        let e12 = Subspace::span(4, &[unit_vector(4, 1)], &t);
        assert_eq!(subspace_product(&m2, &e12, &e12, &t).dim(), 0);
    }

    #[test]
    fn centralizer_examples() {
        let t = tol();
        let m2 = matrix_algebra(2);
        let diag = Subspace::span(4, &[unit_vector(4, 0), unit_vector(4, 3)], &t);
        assert_eq!(centralizer(&m2, &diag, &t).dim(), 2);
        assert_eq!(centralizer(&m2, &Subspace::zero(4), &t).dim(), 4);
        let c = center(&m2, &t);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(m2.unit(), &t));
    }

    #[test]
    fn quotient_examples() {
        let t = tol();
        let p = truncated_poly(1, 2);
        let (q, proj) = quotient(&p, &Subspace::span(3, &[unit_vector(3, 2)], &t), &t).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(proj.is_homomorphism(&t));
        let (q, proj) = quotient(&p, &Subspace::zero(3), &t).unwrap();
        assert_eq!(q.dim(), 3);
        assert!((proj.matrix - Matrix::identity(3, 3)).norm() < 1e-15);
        let c2 = function_algebra(2);
        let (q, _) = quotient(&c2, &Subspace::span(2, &[unit_vector(2, 0)], &t), &t).unwrap();
        assert_eq!(q.dim(), 1);
        let bad = quotient(&p, &Subspace::span(3, &[unit_vector(3, 1)], &t), &t);
        assert!(matches!(bad, Err(Error::Domain(_))));
    }

    #[test]
    fn quotient_projection_is_multiplicative_on_random_pairs() {
        let t = tol();
        let p = truncated_poly(2, 3);
        let ideal = Subspace::span(
            p.dim(),
            &(4..p.dim()).map(|i| unit_vector(p.dim(), i)).collect::<Vec<_>>(),
            &t,
        );
        let (q, proj) = quotient(&p, &ideal, &t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = random_vector(&mut rng, p.dim());
            let y = random_vector(&mut rng, p.dim());
            let lhs = q.mul(&proj.apply(&x), &proj.apply(&y));
            let rhs = proj.apply(&p.mul(&x, &y));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn character_examples() {
        let t = tol();
        let c3 = function_algebra(3);
        let cs = characters(&c3, &t).unwrap();
        assert_eq!(cs.len(), 3);
        let z2 = group_algebra(&[2]).unwrap();
        let cs = characters(&z2, &t).unwrap();
        assert_eq!(cs.len(), 2);
        let mut gen_values: Vec<f64> = cs.iter().map(|c| c.functional[1].re).collect();
        gen_values.sort_by(f64::total_cmp);
        assert!((gen_values[0] + 1.0).abs() < 1e-10 && (gen_values[1] - 1.0).abs() < 1e-10);
        let p = truncated_poly(1, 2);
        let cs = characters(&p, &t).unwrap();
        assert_eq!(cs.len(), 1);
        assert!((cs[0].functional.clone() - unit_vector(3, 0)).norm() < 1e-10);
        assert!(matches!(characters(&matrix_algebra(2), &t), Err(Error::Domain(_))));
    }

    #[test]
    fn jet_algebra_characters_sit_at_the_point() {
        let t = tol();
        let a = jet_algebra(1, 3, &[0.5]).unwrap();
        let cs = characters(&a, &t).unwrap();
        assert_eq!(cs.len(), 1);
        // s(x^k) = 0.5^k
        for k in 0..4 {
            assert!((cs[0].functional[k].re - 0.5f64.powi(k as i32)).abs() < 1e-10);
        }
    }

    #[test]
    fn subalgebra_inherits_structure() {
        let t = tol();
        let m2 = matrix_algebra(2);
        let (d, inc) = subalgebra(&m2, &[unit_vector(4, 0), unit_vector(4, 3)], &t).unwrap();
        assert_eq!(d.dim(), 2);
        assert!(d.has_involution());
        assert!(inc.is_star_homomorphism(&t));
        let (n, _) = subalgebra(&m2, &[m2.unit().clone(), unit_vector(4, 1)], &t).unwrap();
        assert!(!n.has_involution());
        assert!(subalgebra(&m2, &[m2.unit().clone(), unit_vector(4, 0) * C64::new(2.0, 0.0) + unit_vector(4, 1)], &t).is_ok());
        assert!(subalgebra(&m2, &[unit_vector(4, 1)], &t).is_err());
    }

    #[test]
    fn spec_round_trip_and_names() {
        let a = group_algebra(&[3]).unwrap();
        let json = serde_json::to_string(&a.to_spec()).unwrap();
        let spec: AlgebraSpec = serde_json::from_str(&json).unwrap();
        let b = StructureAlgebra::from_spec(&spec).unwrap();
        assert_eq!(b.dim(), 3);
        assert_eq!(b.basis_product(1, 2), a.basis_product(1, 2));
        assert_eq!(from_name("matrix:2").unwrap().dim(), 4);
        assert_eq!(from_name("poly:2:3").unwrap().dim(), 10);
        assert_eq!(from_name("group:4x2").unwrap().dim(), 8);
        assert_eq!(from_name("matrix:2+func:2").unwrap().dim(), 6);
        assert!(matches!(from_name("nope:1"), Err(Error::Parse(_))));
    }
}
