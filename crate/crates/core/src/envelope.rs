//! Sampled checks of sufficient conditions for a finitely generated algebra
//! of smooth functions on a box to have the full smooth algebra as envelope:
//! point separation, non-degeneracy on tangent vectors and, for polynomial
//! generators, surjectivity onto jets.
//!
//! Conditions are checked on a grid, so `Pass` means "verified on the
//! sample", never a global proof.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{rank, Matrix, Tolerances, C64};
use crate::multiindex::IndexTable;
use crate::poly::Poly;

/// Rounding step of the separation hash.
const HASH_STEP: f64 = 1e-7;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Separation,
    Tangent,
    Jet,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Witness {
    Point(Vec<f64>),
    Pair(Vec<f64>, Vec<f64>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Reason {
    pub condition: Condition,
    pub witness: Witness,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub label: String,
    pub reasons: Vec<Reason>,
    pub notes: Vec<String>,
}

/// Axis-aligned box with `grid` points per axis, endpoints included.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Sample {
    pub bounds: Vec<[f64; 2]>,
    pub grid: usize,
}

impl Sample {
    pub fn new(bounds: Vec<[f64; 2]>, grid: usize) -> Result<Self> {
        if grid < 2 {
            return Err(Error::usage("grid needs at least 2 points per axis"));
        }
        if bounds.is_empty() || bounds.iter().any(|[lo, hi]| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::usage("box needs at least one axis, each with lo < hi"));
        }
        Ok(Sample { bounds, grid })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn len(&self) -> usize {
        self.grid.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Point `idx` in row-major order (first axis slowest).
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        for a in (0..self.dim()).rev() {
            let i = idx % self.grid;
            idx /= self.grid;
            let [lo, hi] = self.bounds[a];
            p[a] = lo + (hi - lo) * i as f64 / (self.grid - 1) as f64;
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn close(a: &[f64], b: &[f64], tol: &Tolerances) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= tol.zero * (1.0 + x.abs().max(y.abs())))
}

/// Canonical order: pairs nearest the origin first, ties toward the
/// positive orthant.
fn pair_key(p: &[f64], q: &[f64]) -> (f64, f64, f64) {
    let (a, b) = (norm(p), norm(q));
    (a.min(b), a.max(b), -(p.iter().sum::<f64>() + q.iter().sum::<f64>()))
}

fn order_pair(p: Vec<f64>, q: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    if (norm(p.as_slice()), p.as_slice()) <= (norm(q.as_slice()), q.as_slice()) {
        (p, q)
    } else {
        (q, p)
    }
}

/// All grid pairs whose generator values coincide, in canonical order.
///
/// Value tuples are hashed after rounding; neighbouring cells are probed so
/// that nearby values straddling a rounding boundary are still compared.
pub fn separation_check(gens: &[Expr], sample: &Sample, tol: &Tolerances) -> Vec<(Vec<f64>, Vec<f64>)> {
    let values: Vec<Vec<f64>> = sample
        .points()
        .map(|p| gens.iter().map(|g| g.eval(&p)).collect())
        .collect();
    let key = |v: &[f64]| -> Vec<i64> { v.iter().map(|x| (x / HASH_STEP).round() as i64).collect() };
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, v) in values.iter().enumerate() {
        buckets.entry(key(v)).or_default().push(i);
    }
    let g = gens.len();
    let probe_all = g <= 6;
    let offsets: Vec<Vec<i64>> = if probe_all {
        (0..3usize.pow(g as u32))
            .map(|mut c| {
                (0..g)
                    .map(|_| {
                        let o = (c % 3) as i64 - 1;
                        c /= 3;
                        o
                    })
                    .collect()
            })
            .collect()
    } else {
        vec![vec![0; g]]
    };
    let mut pairs = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let k = key(v);
        for off in &offsets {
            let probe: Vec<i64> = k.iter().zip(off).map(|(a, b)| a.saturating_add(*b)).collect();
            if let Some(js) = buckets.get(&probe) {
                for &j in js {
                    if j > i && close(v, &values[j], tol) {
                        pairs.push(order_pair(sample.point(i), sample.point(j)));
                    }
                }
            }
        }
    }
    pairs.sort_by(|a, b| {
        pair_key(&a.0, &a.1)
            .partial_cmp(&pair_key(&b.0, &b.1))
            .expect("finite coordinates")
            .then_with(|| a.partial_cmp(b).expect("finite coordinates"))
    });
    pairs.dedup();
    pairs
}

fn jacobian(grads: &[Vec<Expr>], p: &[f64]) -> DMatrix<f64> {
    let m = p.len();
    DMatrix::from_fn(m, grads.len(), |i, j| grads[j][i].eval(p))
}

fn smallest_singular(j: &DMatrix<f64>, tol: &Tolerances) -> (usize, f64) {
    let m = j.nrows();
    if j.ncols() == 0 {
        return (0, 0.0);
    }
    let sv = j.clone().svd(false, false).singular_values;
    let top = sv.max();
    let thresh = tol.rank * (1.0 + top);
    let r = sv.iter().filter(|&&s| s > thresh).count();
    let smallest = if sv.len() < m { 0.0 } else { sv.min() };
    (r, smallest)
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentCheck {
    /// Points where the Jacobian of the generators has rank below `m`.
    pub degenerate: Vec<Vec<f64>>,
    /// The degenerate point with the smallest singular value, ties broken
    /// toward the centroid of the tied points.
    pub witness: Option<Vec<f64>>,
}

/// Points where some nonzero tangent vector kills every generator, i.e. where
/// the `m × g` Jacobian `[∂g_j/∂x_i]` has rank below `m`.
pub fn tangent_rank_check(gens: &[Expr], sample: &Sample, tol: &Tolerances) -> TangentCheck {
    let m = sample.dim();
    let grads: Vec<Vec<Expr>> = gens.iter().map(|g| g.gradient(m)).collect();
    let mut degenerate = Vec::new();
    let mut sigmas = Vec::new();
    for p in sample.points() {
        let j = jacobian(&grads, &p);
        let (r, smallest) = smallest_singular(&j, tol);
        if r < m {
            degenerate.push(p);
            sigmas.push(smallest);
        }
    }
    let witness = sigmas.iter().cloned().reduce(f64::min).map(|best| {
        let tied: Vec<&Vec<f64>> = degenerate
            .iter()
            .zip(&sigmas)
            .filter(|(_, &s)| s == best)
            .map(|(p, _)| p)
            .collect();
        let centroid: Vec<f64> = (0..m)
            .map(|a| tied.iter().map(|p| p[a]).sum::<f64>() / tied.len() as f64)
            .collect();
        let dist = |p: &Vec<f64>| p.iter().zip(&centroid).map(|(x, c)| (x - c).powi(2)).sum::<f64>();
        (*tied
            .iter()
            .min_by(|a, b| dist(a).total_cmp(&dist(b)))
            .expect("nonempty"))
        .clone()
    });
    TangentCheck { degenerate, witness }
}

/// Independent confirmation of a degenerate point via a central-difference
/// Jacobian.
pub fn confirm_degenerate(gens: &[Expr], p: &[f64], tol: &Tolerances) -> bool {
    let m = p.len();
    let h = 1e-5;
    let j = DMatrix::from_fn(m, gens.len(), |i, k| {
        let mut a = p.to_vec();
        let mut b = p.to_vec();
        a[i] += h;
        b[i] -= h;
        (gens[k].eval(&a) - gens[k].eval(&b)) / (2.0 * h)
    });
    smallest_singular(&j, tol).0 < m
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct JetSurjectivity {
    pub surjective: bool,
    pub dim: usize,
    pub target_dim: usize,
    /// Span dimension using words of length `0..=L`.
    pub dims_by_length: Vec<usize>,
    /// Dimension was still growing at the last word length.
    pub growing: bool,
}

/// Whether jets at `s` of order `n` of products of at most `word_len`
/// generators span all jets.
pub fn jet_surjectivity_check(
    gens: &[Expr],
    s: &[f64],
    n: u32,
    word_len: u32,
    tol: &Tolerances,
) -> Result<JetSurjectivity> {
    if word_len < 1 {
        return Err(Error::usage("word length must be at least 1"));
    }
    let m = s.len();
    let polys: Vec<Poly> = gens
        .iter()
        .map(|g| {
            g.to_poly(m).ok_or_else(|| {
                Error::domain(format!("jet check needs polynomial generators in {m} variables, got {g}"))
            })
        })
        .collect::<Result<_>>()?;
    let target_dim = IndexTable::new(m, n).len();
    let jet = |p: &Poly| -> Vec<C64> {
        p.taylor_coeffs(s, n).into_iter().map(|c| C64::new(c, 0.0)).collect()
    };
    let span_dim = |rows: &[Vec<C64>]| -> usize {
        let flat: Vec<C64> = rows.iter().flatten().copied().collect();
        rank(&Matrix::from_row_slice(rows.len(), target_dim, &flat), tol)
    };
    // words as nondecreasing generator sequences, grown one letter at a time
    let one = Poly::constant(m, 1.0);
    let mut frontier: Vec<(usize, Poly)> = vec![(0, one.clone())];
    let mut rows = vec![jet(&one)];
    let mut dims = vec![span_dim(&rows)];
    for _ in 0..word_len {
        let mut next = Vec::new();
        for (start, w) in &frontier {
            for (i, g) in polys.iter().enumerate().skip(*start) {
                let p = w * g;
                rows.push(jet(&p));
                next.push((i, p));
            }
        }
        frontier = next;
        dims.push(span_dim(&rows));
    }
    let dim = *dims.last().expect("nonempty");
    let growing = dims.len() >= 2 && dims[dims.len() - 1] > dims[dims.len() - 2];
    Ok(JetSurjectivity {
        surjective: dim == target_dim,
        dim,
        target_dim,
        dims_by_length: dims,
        growing,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EnvelopeOptions {
    /// Jet order for the polynomial jet check; `None` skips it.
    pub jet_order: Option<u32>,
    /// Word length for the jet check; defaults to the jet order.
    pub word_len: Option<u32>,
    /// Number of evenly spaced sample points at which jets are checked.
    pub jet_points: usize,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        EnvelopeOptions {
            jet_order: None,
            word_len: None,
            jet_points: 5,
        }
    }
}

const PASS_LABEL: &str = "conditions verified on sample";

/// Combine the separation, tangent and (optionally) jet checks.
pub fn envelope_verdict(gens: &[Expr], sample: &Sample, opts: &EnvelopeOptions, tol: &Tolerances) -> Result<Verdict> {
    let m = sample.dim();
    if let Some(g) = gens.iter().find(|g| g.vars() > m) {
        return Err(Error::usage(format!("generator {g} uses more than {m} variables")));
    }
    let mut reasons = Vec::new();
    let mut notes = Vec::new();
    let mut inconclusive = false;

    let pairs = separation_check(gens, sample, tol);
    if let Some((p, q)) = pairs.first() {
        reasons.push(Reason {
            condition: Condition::Separation,
            witness: Witness::Pair(p.clone(), q.clone()),
            detail: format!("{} sampled pairs share all generator values", pairs.len()),
        });
    }
    let tangent = tangent_rank_check(gens, sample, tol);
    if let Some(w) = &tangent.witness {
        reasons.push(Reason {
            condition: Condition::Tangent,
            witness: Witness::Point(w.clone()),
            detail: format!(
                "generator Jacobian has rank below {m} at {} sampled points",
                tangent.degenerate.len()
            ),
        });
    }
    if let Some(n) = opts.jet_order {
        if gens.iter().all(Expr::is_polynomial) {
            let len = opts.word_len.unwrap_or(n.max(1));
            let total = sample.len();
            let k = opts.jet_points.clamp(1, total);
            for t in 0..k {
                let idx = if k == 1 { total / 2 } else { t * (total - 1) / (k - 1) };
                let p = sample.point(idx);
                let r = jet_surjectivity_check(gens, &p, n, len, tol)?;
                if !r.surjective {
                    if r.growing {
                        inconclusive = true;
                        notes.push(format!(
                            "jets at {p:?}: dimension {} of {} at word length {len} and still growing",
                            r.dim, r.target_dim
                        ));
                    } else {
                        reasons.push(Reason {
                            condition: Condition::Jet,
                            witness: Witness::Point(p),
                            detail: format!("jets of order {n} span {} of {} dimensions", r.dim, r.target_dim),
                        });
                        break;
                    }
                }
            }
        } else {
            notes.push("jet check skipped: generators are not all polynomial".into());
        }
    }
    let status = if !reasons.is_empty() {
        Status::Fail
    } else if inconclusive {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let label = match status {
        Status::Pass => PASS_LABEL.to_string(),
        Status::Fail => "a sufficient condition is violated at a witness".to_string(),
        Status::Inconclusive => "jet span not exhausted at the requested word length".to_string(),
    };
    Ok(Verdict {
        status,
        label,
        reasons,
        notes,
    })
}

/// Generator file: `{m, generators, box, grid}` plus optional jet settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub m: usize,
    pub generators: Vec<String>,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub grid: usize,
    #[serde(default)]
    pub jet_order: Option<u32>,
    #[serde(default)]
    pub word_len: Option<u32>,
}

impl GeneratorFile {
    pub fn parse(&self) -> Result<(Vec<Expr>, Sample, EnvelopeOptions)> {
        if self.bounds.len() != self.m {
            return Err(Error::parse(format!("box has {} axes, m is {}", self.bounds.len(), self.m)));
        }
        let gens = self.generators.iter().map(|s| Expr::parse(s)).collect::<Result<Vec<_>>>()?;
        let sample = Sample::new(self.bounds.clone(), self.grid)?;
        let opts = EnvelopeOptions {
            jet_order: self.jet_order,
            word_len: self.word_len,
            ..EnvelopeOptions::default()
        };
        Ok((gens, sample, opts))
    }
}
