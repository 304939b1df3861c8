//! Finite-scale spectral statements: value bundles and the Dauns-Hofmann
//! decomposition, the kernel-ideal lemmas, and Fourier analysis on finite
//! abelian groups.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    center, characters, quotient, subalgebra, Algebra, Character, LinearOp, StructureAlgebra,
};
use crate::error::{Error, Result};
use crate::linalg::{
    columns, conj, left_inverse, max_abs, random_vector, rank, Matrix, Subspace, Tolerances, Vector, C64,
};

/// `ℤ_{n_1} × ... × ℤ_{n_r}`; elements are indexed in mixed radix with the
/// first factor most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    factors: Vec<usize>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::usage("group factors must be positive and nonempty"));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    /// Parse `"Z4xZ2"` (or `"4x2"`).
    pub fn parse(s: &str) -> Result<Self> {
        let factors = s
            .split(['x', '×'])
            .map(|p| {
                let p = p.trim();
                let p = p.strip_prefix('Z').or_else(|| p.strip_prefix('ℤ')).unwrap_or(p);
                p.parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| Error::parse(format!("bad group spec {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteAbelianGroup::new(factors)
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn label(&self) -> String {
        self.factors
            .iter()
            .map(|n| format!("Z{n}"))
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Residue tuple of the element with index `x`.
    pub fn element(&self, mut x: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &n) in out.iter_mut().zip(&self.factors).rev() {
            *slot = x % n;
            x /= n;
        }
        out
    }

    pub fn index(&self, g: &[usize]) -> usize {
        g.iter()
            .zip(&self.factors)
            .fold(0, |acc, (&gi, &n)| acc * n + gi % n)
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let (a, b) = (self.element(x), self.element(y));
        let s: Vec<usize> = a
            .iter()
            .zip(&b)
            .zip(&self.factors)
            .map(|((p, q), n)| (p + q) % n)
            .collect();
        self.index(&s)
    }

    pub fn neg(&self, x: usize) -> usize {
        let a = self.element(x);
        let s: Vec<usize> = a
            .iter()
            .zip(&self.factors)
            .map(|(p, n)| (n - p) % n)
            .collect();
        self.index(&s)
    }
}

/// Quotient of `B` at one character `t` of the commutative algebra `A`.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub character: Character,
    /// `span(φ(Ker t) · B)`
    pub ideal: Subspace,
    /// `None` when the ideal is all of `B`.
    pub algebra: Option<Algebra>,
    pub projection: Option<LinearOp>,
}

impl Fiber {
    pub fn dim(&self) -> usize {
        self.algebra.as_ref().map_or(0, |a| a.dim())
    }
}

#[derive(Clone, Debug)]
pub struct ValueBundle {
    pub total: Algebra,
    pub fibers: Vec<Fiber>,
}

impl ValueBundle {
    pub fn fiber_dims(&self) -> Vec<usize> {
        self.fibers.iter().map(Fiber::dim).collect()
    }

    /// Matrix of `b -> (class of b in each fiber)`.
    pub fn section_matrix(&self) -> Matrix {
        let rows: usize = self.fiber_dims().iter().sum();
        let mut v = Matrix::zeros(rows, self.total.dim());
        let mut o = 0;
        for f in &self.fibers {
            if let Some(p) = &f.projection {
                v.view_mut((o, 0), (f.dim(), self.total.dim())).copy_from(&p.matrix);
                o += f.dim();
            }
        }
        v
    }

    /// Split a section vector into fiber components.
    fn split<'a>(&self, v: &'a Vector) -> Vec<(&Algebra, nalgebra::DVectorView<'a, C64>)> {
        let mut out = Vec::new();
        let mut o = 0;
        for f in &self.fibers {
            if let Some(a) = &f.algebra {
                out.push((a, v.rows(o, a.dim())));
                o += a.dim();
            }
        }
        out
    }
}

/// The bundle of fibers `B / span(φ(Ker t) · B)` over the characters `t` of
/// the commutative source of `φ`.
pub fn value_bundle(phi: &LinearOp, tol: &Tolerances) -> Result<ValueBundle> {
    let b = &phi.target;
    let mut fibers = Vec::new();
    for t in characters(&phi.source, tol)? {
        let mut prods = Vec::new();
        for k in t.kernel(tol).basis() {
            let lk = b.left_mul(&phi.apply(k));
            prods.extend((0..b.dim()).map(|j| lk.column(j).into_owned()));
        }
        let ideal = Subspace::span(b.dim(), &prods, tol);
        let (algebra, projection) = if ideal.dim() == b.dim() {
            (None, None)
        } else {
            let (q, p) = quotient(b, &ideal, tol)?;
            (Some(q), Some(p))
        };
        fibers.push(Fiber {
            character: t,
            ideal,
            algebra,
            projection,
        });
    }
    Ok(ValueBundle {
        total: b.clone(),
        fibers,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DaunsHofmannReport {
    pub dim: usize,
    pub fiber_dims: Vec<usize>,
    pub section_rank: usize,
    pub unital_residual: f64,
    /// Over all basis pairs and the random pairs.
    pub multiplicative_residual: f64,
    pub involutive_residual: Option<f64>,
    pub isomorphism: bool,
}

/// The section map `v: F -> ⊕ fibers` over the characters of a central
/// subalgebra `C ⊆ Z(F)` (given by a basis) is a unital `*`-isomorphism.
pub fn dauns_hofmann_check(
    f: &Algebra,
    c_basis: &[Vector],
    pairs: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<DaunsHofmannReport> {
    let z = center(f, tol);
    if let Some((i, v)) = c_basis.iter().enumerate().find(|(_, v)| !z.contains(v, tol)) {
        return Err(Error::domain(format!(
            "subalgebra is not central: basis vector {i} lies {:.3e} away from the center",
            z.residual(v)
        )));
    }
    let (c, inc) = subalgebra(f, c_basis, tol)?;
    if !c.is_commutative(tol) {
        return Err(Error::domain("central subalgebra is not commutative"));
    }
    let bundle = value_bundle(&inc, tol)?;
    let v = bundle.section_matrix();
    let d = f.dim();
    let fiber_dims = bundle.fiber_dims();
    let section_rank = rank(&v, tol);

    let unit = &v * f.unit();
    let unital_residual = bundle
        .split(&unit)
        .iter()
        .map(|(a, u)| (u - a.unit()).norm())
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<(Vector, Vector)> = Vec::new();
    for i in 0..d {
        for j in 0..d {
            samples.push((f.basis_vector(i), f.basis_vector(j)));
        }
    }
    for _ in 0..pairs {
        samples.push((random_vector(&mut rng, d), random_vector(&mut rng, d)));
    }
    let mut mult: f64 = 0.0;
    for (x, y) in &samples {
        let lhs = &v * f.mul(x, y);
        let (vx, vy) = (&v * x, &v * y);
        let mut o = 0;
        for ((a, px), (_, py)) in bundle.split(&vx).into_iter().zip(bundle.split(&vy)) {
            let prod = a.mul(&px.into_owned(), &py.into_owned());
            mult = mult.max((lhs.rows(o, a.dim()) - prod).norm() / (1.0 + x.norm() * y.norm()));
            o += a.dim();
        }
    }

    let star_fibers = bundle
        .fibers
        .iter()
        .all(|fb| fb.algebra.as_ref().is_none_or(|a| a.has_involution()));
    let involutive_residual = if f.has_involution() && star_fibers {
        let mut worst: f64 = 0.0;
        for (x, _) in samples.iter().skip(d * d).chain(samples.iter().take(d)) {
            let lhs = &v * f.involve(x)?;
            let vx = &v * x;
            let mut o = 0;
            for (a, px) in bundle.split(&vx) {
                let rhs = a.involve(&px.into_owned())?;
                worst = worst.max((lhs.rows(o, a.dim()) - rhs).norm() / (1.0 + x.norm()));
                o += a.dim();
            }
        }
        Some(worst)
    } else {
        None
    };
    let total: usize = fiber_dims.iter().sum();
    let isomorphism = total == d
        && section_rank == d
        && unital_residual <= tol.rank
        && mult <= tol.rank
        && involutive_residual.is_some_and(|r| r <= tol.rank);
    Ok(DaunsHofmannReport {
        dim: d,
        fiber_dims,
        section_rank,
        unital_residual,
        multiplicative_residual: mult,
        involutive_residual,
        isomorphism,
    })
}

/// Minimal projections of the center of a semisimple algebra: the dual basis
/// to the characters of `Z(F)`, expressed in `F`.
pub fn central_projections(f: &Algebra, tol: &Tolerances) -> Result<Vec<Vector>> {
    let z = center(f, tol);
    let (za, inc) = subalgebra(f, z.basis(), tol)?;
    let chars = characters(&za, tol)?;
    if chars.len() != za.dim() {
        return Err(Error::domain("center is not semisimple"));
    }
    let rows: Vec<Vector> = chars.iter().map(|c| c.functional.clone()).collect();
    let m = columns(za.dim(), &rows).transpose();
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::numeric("character matrix of the center is singular"))?;
    Ok((0..za.dim()).map(|i| inc.apply(&inv.column(i).into_owned())).collect())
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in set_partitions(n - 1) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(n - 1);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![n - 1]);
        out.push(q);
    }
    out
}

/// Bases of the unital `*`-subalgebras of `Z(F)`, one per partition of the
/// minimal central projections, coarsest (`ℂ·1`) first and `Z(F)` last.
pub fn central_subalgebras(f: &Algebra, tol: &Tolerances) -> Result<Vec<Vec<Vector>>> {
    let ps = central_projections(f, tol)?;
    let mut parts = set_partitions(ps.len());
    parts.sort_by_key(|p| (p.len(), p.clone()));
    Ok(parts
        .into_iter()
        .map(|blocks| {
            blocks
                .iter()
                .map(|b| b.iter().fold(Vector::zeros(f.dim()), |acc, &i| acc + &ps[i]))
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageKernelEntry {
    pub character: Vec<[f64; 2]>,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutsideEntry {
    pub character: Vec<[f64; 2]>,
    /// `span(φ(Ker s) · B) = B`
    pub full: bool,
    /// An element of `span(φ(Ker s) · B)` invertible in `B`.
    pub invertible_witness: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelIdealReport {
    pub part_i: Vec<ImageKernelEntry>,
    pub part_ii: Vec<OutsideEntry>,
    pub holds: bool,
}

fn is_invertible(b: &StructureAlgebra, x: &Vector, tol: &Tolerances) -> bool {
    rank(&b.left_mul(x), tol) == b.dim() && rank(&b.right_mul(x), tol) == b.dim()
}

/// For `φ: A -> B` with `A` commutative:
/// (i) `φ(Ker(t ∘ φ)) = Ker t` inside `φ(A)` for each character `t` of `φ(A)`;
/// (ii) `span(φ(Ker s) · B) = B` for each character `s` of `A` not of the
/// form `t ∘ φ`, with an invertible element of that span as witness.
pub fn kernel_ideal_check(phi: &LinearOp, seed: u64, tol: &Tolerances) -> Result<KernelIdealReport> {
    let a = &phi.source;
    let b = &phi.target;
    let image = phi.image(tol);
    let (im, inc) = subalgebra(b, image.basis(), tol)?;
    // coordinates of φ(e_j) in the image basis
    let to_im = left_inverse(&columns(b.dim(), image.basis()))
        .ok_or_else(|| Error::numeric("image basis is numerically dependent"))?
        * &phi.matrix;
    let im_chars = characters(&im, tol)?;
    let mut pulled = Vec::new();
    let mut part_i = Vec::new();
    for t in &im_chars {
        let s = Character::new(to_im.transpose() * &t.functional);
        let lhs: Vec<Vector> = s.kernel(tol).basis().iter().map(|k| phi.apply(k)).collect();
        let lhs = Subspace::span(b.dim(), &lhs, tol);
        let rhs: Vec<Vector> = t.kernel(tol).basis().iter().map(|k| inc.apply(k)).collect();
        let rhs = Subspace::span(b.dim(), &rhs, tol);
        part_i.push(ImageKernelEntry {
            character: crate::linalg::to_pairs(&s.functional),
            holds: lhs.same_as(&rhs, tol),
        });
        pulled.push(s);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut part_ii = Vec::new();
    for s in characters(a, tol)? {
        let scale = 1.0 + max_abs(&s.functional);
        let in_image = pulled
            .iter()
            .any(|p| max_abs(&(&p.functional - &s.functional)) <= 1e-8 * scale);
        if in_image {
            continue;
        }
        let mut prods = Vec::new();
        for k in s.kernel(tol).basis() {
            let lk = b.left_mul(&phi.apply(k));
            prods.extend((0..b.dim()).map(|j| lk.column(j).into_owned()));
        }
        let span = Subspace::span(b.dim(), &prods, tol);
        let full = span.dim() == b.dim();
        let mut witness = None;
        for _ in 0..8 {
            let w = span
                .basis()
                .iter()
                .fold(Vector::zeros(b.dim()), |acc, v| acc + v * crate::linalg::random_complex(&mut rng));
            if span.dim() > 0 && is_invertible(b, &w, tol) {
                witness = Some(crate::linalg::to_pairs(&w));
                break;
            }
        }
        part_ii.push(OutsideEntry {
            character: crate::linalg::to_pairs(&s.functional),
            full,
            invertible_witness: witness,
        });
    }
    let holds = part_i.iter().all(|e| e.holds)
        && part_ii.iter().all(|e| e.full && e.invertible_witness.is_some());
    Ok(KernelIdealReport { part_i, part_ii, holds })
}

/// `χ_ξ(g) = exp(2πi Σ_j ξ_j g_j / n_j)`, rows indexed by `ξ`, columns by `g`.
pub fn fourier_matrix(g: &FiniteAbelianGroup) -> Matrix {
    let n = g.order();
    Matrix::from_fn(n, n, |xi, x| {
        let (a, b) = (g.element(xi), g.element(x));
        let phase: f64 = a
            .iter()
            .zip(&b)
            .zip(g.factors())
            .map(|((p, q), m)| (p * q % m) as f64 / *m as f64)
            .sum();
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierReport {
    pub group: String,
    pub order: usize,
    /// `max |F(α ⋆ β) − F(α) F(β)|` over the sampled pairs.
    pub convolution_residual: f64,
    /// `max |F(α*) − conj F(α)|`
    pub involution_residual: f64,
    /// `‖F⁻¹ F − 1‖` with `F⁻¹ = F^H / |G|`.
    pub roundtrip_residual: f64,
    /// Characters extracted from the group algebra, when `|G| <= 256`.
    pub characters_found: Option<usize>,
    /// Each extracted character equals a dual-group evaluation.
    pub characters_matched: Option<bool>,
    pub character_residual: Option<f64>,
    pub holds: bool,
}

pub const FOURIER_MAX_ORDER: usize = 4096;
const FOURIER_CHARACTER_LIMIT: usize = 256;

/// Convolution theorem, involution compatibility and the character count for
/// the group algebra of `g`.
pub fn fourier_check(g: &FiniteAbelianGroup, pairs: usize, seed: u64, tol: &Tolerances) -> Result<FourierReport> {
    let n = g.order();
    if n > FOURIER_MAX_ORDER {
        return Err(Error::domain(format!("group order {n} exceeds {FOURIER_MAX_ORDER}")));
    }
    let a = crate::algebra::group_algebra(g.factors())?;
    let f = fourier_matrix(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conv: f64 = 0.0;
    let mut inv: f64 = 0.0;
    for _ in 0..pairs.max(1) {
        let x = random_vector(&mut rng, n);
        let y = random_vector(&mut rng, n);
        let lhs = &f * a.mul(&x, &y);
        let rhs = (&f * &x).component_mul(&(&f * &y));
        conv = conv.max(max_abs(&(lhs - rhs)) / (1.0 + x.norm() * y.norm()));
        let star = &f * a.involve(&x)?;
        inv = inv.max(max_abs(&(star - conj(&(&f * &x)))) / (1.0 + x.norm()));
    }
    let finv = f.adjoint() / C64::new(n as f64, 0.0);
    let roundtrip = (&finv * &f - Matrix::identity(n, n)).norm();

    let (found, matched, char_res) = if n <= FOURIER_CHARACTER_LIMIT {
        let chars = characters(&a, tol)?;
        let mut used = vec![false; n];
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for c in &chars {
            worst = worst.max(c.multiplicative_residual(&a));
            let hit = (0..n)
                .filter(|&xi| !used[xi])
                .find(|&xi| max_abs(&(f.row(xi).transpose() - &c.functional)) <= 1e-8);
            match hit {
                Some(xi) => used[xi] = true,
                None => ok = false,
            }
        }
        (Some(chars.len()), Some(ok), Some(worst))
    } else {
        (None, None, None)
    };
    let bound = 1e-10;
    let holds = conv < bound
        && inv < bound
        && roundtrip < bound * n as f64
        && found.is_none_or(|c| c == n)
        && matched.is_none_or(|m| m)
        && char_res.is_none_or(|r| r < bound.max(tol.rank));
    Ok(FourierReport {
        group: g.label(),
        order: n,
        convolution_residual: conv,
        involution_residual: inv,
        roundtrip_residual: roundtrip,
        characters_found: found,
        characters_matched: matched,
        character_residual: char_res,
        holds,
    })
}
