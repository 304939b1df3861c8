//! Truncated power series `B[[m]]` (and polynomials `B[m,n]`) over a
//! coefficient algebra `B`.
//!
//! Only the coefficients with `|k| <= N` are stored. The Cauchy product
//! coefficient at `k` depends only on coefficients at `l <= k`, so the
//! truncation at order `N` is an algebra in its own right and nothing below
//! order `N` is lost. `B[m,n]` uses the same data and product; the mode is a
//! label only.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{tensor_product, truncated_poly, Algebra};
use crate::error::{Error, Result};
use crate::linalg::{from_pairs, max_abs, random_vector, to_pairs, Vector, C64};
use crate::multiindex::{IndexTable, MultiIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Series,
    Polynomial,
}

/// The algebra `B[[m]]` truncated at total degree `order`.
pub struct SeriesSpace {
    coeff: Algebra,
    m: usize,
    order: u32,
    mode: Mode,
    table: IndexTable,
    // position of k + l for positions of k and l, if still within order
    sums: Vec<Option<usize>>,
    flat: OnceLock<Algebra>,
}

impl fmt::Debug for SeriesSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SeriesSpace({}[[{}]]<={}, {:?})",
            self.coeff.name(),
            self.m,
            self.order,
            self.mode
        )
    }
}

impl SeriesSpace {
    pub fn new(coeff: Algebra, m: usize, order: u32, mode: Mode) -> Result<Arc<Self>> {
        if m == 0 {
            return Err(Error::usage("series need at least one variable"));
        }
        let table = IndexTable::new(m, order);
        let n = table.len();
        let mut sums = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = table.get(i).add(table.get(j)).expect("same length");
                sums[i * n + j] = table.position(&k);
            }
        }
        Ok(Arc::new(SeriesSpace {
            coeff,
            m,
            order,
            mode,
            table,
            sums,
            flat: OnceLock::new(),
        }))
    }

    pub fn coeff_algebra(&self) -> &Algebra {
        &self.coeff
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn table(&self) -> &IndexTable {
        &self.table
    }

    /// Number of stored coefficients, `C(m+N, m)`.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Dimension of the truncation as a vector space.
    pub fn flat_dim(&self) -> usize {
        self.len() * self.coeff.dim()
    }

    /// The truncation as a structure algebra on flattened coordinates
    /// (`position * dim B + b`). It is `truncated_poly(m, N) ⊗ B`.
    pub fn flat_algebra(&self) -> Algebra {
        self.flat
            .get_or_init(|| {
                tensor_product(&truncated_poly(self.m, self.order), &self.coeff)
                    .expect("tensor product of valid algebras")
            })
            .clone()
    }

    fn compatible(&self, other: &SeriesSpace) -> bool {
        self.m == other.m
            && self.order == other.order
            && (Arc::ptr_eq(&self.coeff, &other.coeff) || *self.coeff == *other.coeff)
    }

    pub fn zero(self: &Arc<Self>) -> SeriesElement {
        SeriesElement::from_entries(self, std::iter::empty())
    }

    /// `1_{B[[m]]}`: the unit of `B` at `k = 0`.
    pub fn unit(self: &Arc<Self>) -> SeriesElement {
        SeriesElement::from_entries(self, [(0, self.coeff.unit().clone())])
    }

    /// `b · τ^k`
    pub fn monomial(self: &Arc<Self>, k: &MultiIndex, b: Vector) -> Result<SeriesElement> {
        let p = self.position(k)?;
        self.check_coeff(&b)?;
        Ok(SeriesElement::from_entries(self, [(p, b)]))
    }

    pub fn from_coeffs(
        self: &Arc<Self>,
        coeffs: impl IntoIterator<Item = (MultiIndex, Vector)>,
    ) -> Result<SeriesElement> {
        let mut acc: BTreeMap<usize, Vector> = BTreeMap::new();
        for (k, b) in coeffs {
            let p = self.position(&k)?;
            self.check_coeff(&b)?;
            match acc.get_mut(&p) {
                Some(v) => *v += b,
                None => {
                    acc.insert(p, b);
                }
            }
        }
        Ok(SeriesElement::from_entries(self, acc))
    }

    pub fn from_flat(self: &Arc<Self>, v: &Vector) -> Result<SeriesElement> {
        let d = self.coeff.dim();
        if v.len() != self.flat_dim() {
            return Err(Error::usage(format!(
                "flat vector has length {}, expected {}",
                v.len(),
                self.flat_dim()
            )));
        }
        Ok(SeriesElement::from_entries(
            self,
            (0..self.len()).map(|p| (p, v.rows(p * d, d).into_owned())),
        ))
    }

    /// Random element; each coefficient is nonzero with probability `fill`.
    pub fn random<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R, fill: f64) -> SeriesElement {
        let d = self.coeff.dim();
        let mut entries = Vec::new();
        for p in 0..self.len() {
            if rng.random::<f64>() < fill {
                entries.push((p, random_vector(rng, d)));
            }
        }
        SeriesElement::from_entries(self, entries)
    }

    fn position(&self, k: &MultiIndex) -> Result<usize> {
        if k.len() != self.m {
            return Err(Error::usage(format!(
                "multi-index {k:?} has length {}, series have {} variables",
                k.len(),
                self.m
            )));
        }
        self.table.position(k).ok_or_else(|| {
            Error::usage(format!("multi-index {k:?} exceeds truncation order {}", self.order))
        })
    }

    fn check_coeff(&self, b: &Vector) -> Result<()> {
        if b.len() != self.coeff.dim() {
            return Err(Error::usage(format!(
                "coefficient has length {}, coefficient algebra has dimension {}",
                b.len(),
                self.coeff.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Clone)]
enum Store {
    Sparse(BTreeMap<usize, Vector>),
    Dense(Vec<Vector>),
}

/// An element of a [`SeriesSpace`]. Storage is sparse and switches to a
/// dense table once more than half of the coefficients are nonzero.
#[derive(Clone)]
pub struct SeriesElement {
    space: Arc<SeriesSpace>,
    store: Store,
}

impl fmt::Debug for SeriesElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (p, v) in self.entries() {
            m.entry(self.space.table.get(p), &v.as_slice());
        }
        m.finish()
    }
}

impl SeriesElement {
    fn from_entries(
        space: &Arc<SeriesSpace>,
        entries: impl IntoIterator<Item = (usize, Vector)>,
    ) -> Self {
        let nonzero: BTreeMap<usize, Vector> = entries
            .into_iter()
            .filter(|(_, v)| v.iter().any(|z| *z != C64::new(0.0, 0.0)))
            .collect();
        let n = space.len();
        let store = if 2 * nonzero.len() > n {
            let d = space.coeff.dim();
            let mut dense = vec![Vector::zeros(d); n];
            for (p, v) in nonzero {
                dense[p] = v;
            }
            Store::Dense(dense)
        } else {
            Store::Sparse(nonzero)
        };
        SeriesElement {
            space: space.clone(),
            store,
        }
    }

    pub fn space(&self) -> &Arc<SeriesSpace> {
        &self.space
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.store, Store::Dense(_))
    }

    /// Nonzero coefficients as `(position, coefficient)`, ascending.
    fn entries(&self) -> Box<dyn Iterator<Item = (usize, &Vector)> + '_> {
        match &self.store {
            Store::Sparse(m) => Box::new(m.iter().map(|(p, v)| (*p, v))),
            Store::Dense(v) => Box::new(
                v.iter()
                    .enumerate()
                    .filter(|(_, b)| b.iter().any(|z| *z != C64::new(0.0, 0.0))),
            ),
        }
    }

    /// Number of nonzero coefficients.
    pub fn nnz(&self) -> usize {
        self.entries().count()
    }

    /// Coefficient at `k` (zero when absent).
    pub fn coeff(&self, k: &MultiIndex) -> Result<Vector> {
        let p = self.space.position(k)?;
        Ok(self.coeff_at(p))
    }

    pub fn coeff_at(&self, p: usize) -> Vector {
        match &self.store {
            Store::Sparse(m) => m
                .get(&p)
                .cloned()
                .unwrap_or_else(|| Vector::zeros(self.space.coeff.dim())),
            Store::Dense(v) => v[p].clone(),
        }
    }

    pub fn coeffs(&self) -> Vec<(MultiIndex, Vector)> {
        self.entries()
            .map(|(p, v)| (self.space.table.get(p).clone(), v.clone()))
            .collect()
    }

    fn check(&self, other: &SeriesElement) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space.compatible(&other.space) {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "series shapes differ: {:?} vs {:?}",
                self.space, other.space
            )))
        }
    }

    /// Cauchy product `(x·y)_k = Σ_{l<=k} x_{k-l} · y_l`.
    pub fn mul(&self, other: &SeriesElement) -> Result<SeriesElement> {
        self.check(other)?;
        let sp = &self.space;
        let n = sp.len();
        let b = &sp.coeff;
        let mut acc: BTreeMap<usize, Vector> = BTreeMap::new();
        let right: Vec<(usize, &Vector)> = other.entries().collect();
        for (i, x) in self.entries() {
            for &(j, y) in &right {
                if let Some(k) = sp.sums[i * n + j] {
                    let p = b.mul(x, y);
                    match acc.get_mut(&k) {
                        Some(v) => *v += p,
                        None => {
                            acc.insert(k, p);
                        }
                    }
                }
            }
        }
        Ok(SeriesElement::from_entries(sp, acc))
    }

    pub fn add(&self, other: &SeriesElement) -> Result<SeriesElement> {
        self.check(other)?;
        let mut acc: BTreeMap<usize, Vector> =
            self.entries().map(|(p, v)| (p, v.clone())).collect();
        for (p, v) in other.entries() {
            match acc.get_mut(&p) {
                Some(a) => *a += v,
                None => {
                    acc.insert(p, v.clone());
                }
            }
        }
        Ok(SeriesElement::from_entries(&self.space, acc))
    }

    pub fn sub(&self, other: &SeriesElement) -> Result<SeriesElement> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> SeriesElement {
        SeriesElement::from_entries(&self.space, self.entries().map(|(p, v)| (p, v * c)))
    }

    /// Coefficientwise involution `(x*)_k = (x_k)*`.
    pub fn involve(&self) -> Result<SeriesElement> {
        let b = &self.space.coeff;
        let entries = self
            .entries()
            .map(|(p, v)| b.involve(v).map(|w| (p, w)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeriesElement::from_entries(&self.space, entries))
    }

    /// Drop all coefficients above `order` and move to the smaller space.
    pub fn restrict(&self, space: &Arc<SeriesSpace>) -> Result<SeriesElement> {
        if space.m != self.space.m
            || space.order > self.space.order
            || *space.coeff != *self.space.coeff
        {
            return Err(Error::usage("restriction target is not a lower truncation"));
        }
        let entries: Vec<(usize, Vector)> = self
            .entries()
            .filter_map(|(p, v)| {
                space
                    .table
                    .position(self.space.table.get(p))
                    .map(|q| (q, v.clone()))
            })
            .collect();
        Ok(SeriesElement::from_entries(space, entries))
    }

    /// `exp(x)` for `x` with zero constant term; the sum is finite because
    /// `x^{N+1}` vanishes in the truncation.
    pub fn exp_nilpotent(&self) -> Result<SeriesElement> {
        if self.entries().any(|(p, _)| p == 0) {
            return Err(Error::domain("exponential needs a zero constant term"));
        }
        let mut term = self.space.unit();
        let mut sum = term.clone();
        for j in 1..=self.space.order {
            term = term.mul(self)?.scale(C64::new(1.0 / j as f64, 0.0));
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    /// Coordinates in the flattened basis `position * dim B + b`.
    pub fn flatten(&self) -> Vector {
        let d = self.space.coeff.dim();
        let mut out = Vector::zeros(self.space.flat_dim());
        for (p, v) in self.entries() {
            out.rows_mut(p * d, d).copy_from(v);
        }
        out
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &SeriesElement) -> Result<f64> {
        self.check(other)?;
        Ok(max_abs(&(self.flatten() - other.flatten())))
    }

    pub fn to_json(&self) -> Vec<SeriesTerm> {
        self.coeffs()
            .into_iter()
            .map(|(index, c)| SeriesTerm {
                index,
                coeff: to_pairs(&c),
            })
            .collect()
    }

    pub fn from_json(space: &Arc<SeriesSpace>, terms: &[SeriesTerm]) -> Result<SeriesElement> {
        space.from_coeffs(terms.iter().map(|t| (t.index.clone(), from_pairs(&t.coeff))))
    }
}

/// One stored coefficient in the JSON form of a series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub index: MultiIndex,
    pub coeff: Vec<[f64; 2]>,
}

pub fn ser_mul(x: &SeriesElement, y: &SeriesElement) -> Result<SeriesElement> {
    x.mul(y)
}

pub fn ser_involve(x: &SeriesElement) -> Result<SeriesElement> {
    x.involve()
}

pub fn ser_unit(space: &Arc<SeriesSpace>) -> SeriesElement {
    space.unit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{function_algebra, matrix_algebra};
    use crate::linalg::{unit_vector, I, ONE};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(c: f64) -> Vector {
        Vector::from_element(1, C64::new(c, 0.0))
    }

    #[test]
    fn binomial_square() {
        let sp = SeriesSpace::new(function_algebra(1), 1, 3, Mode::Series).unwrap();
        let one_plus_t = sp
            .from_coeffs([(MultiIndex::from([0]), scalar(1.0)), (MultiIndex::from([1]), scalar(1.0))])
            .unwrap();
        let sq = one_plus_t.mul(&one_plus_t).unwrap();
        let want = [1.0, 2.0, 1.0, 0.0];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(sq.coeff(&MultiIndex::from([k as u32])).unwrap()[0].re, *w);
        }
    }

    #[test]
    fn matrix_coefficients_do_not_commute() {
        let m2 = matrix_algebra(2);
        let sp = SeriesSpace::new(m2, 1, 2, Mode::Series).unwrap();
        let t = MultiIndex::from([1]);
        let a = sp.monomial(&t, unit_vector(4, 1)).unwrap();
        let b = sp.monomial(&t, unit_vector(4, 2)).unwrap();
        let t2 = MultiIndex::from([2]);
        assert_eq!(a.mul(&b).unwrap().coeff(&t2).unwrap(), unit_vector(4, 0));
        assert_eq!(b.mul(&a).unwrap().coeff(&t2).unwrap(), unit_vector(4, 3));
    }

    #[test]
    fn unit_and_involution() {
        let m2 = matrix_algebra(2);
        let sp = SeriesSpace::new(m2.clone(), 2, 3, Mode::Series).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = sp.unit();
        assert_eq!(u.coeff(&MultiIndex::from([0, 0])).unwrap(), *m2.unit());
        assert!(u.coeff(&MultiIndex::from([1, 0])).unwrap().iter().all(|z| z.norm() == 0.0));
        for _ in 0..10 {
            let x = sp.random(&mut rng, 0.6);
            assert!(u.mul(&x).unwrap().distance(&x).unwrap() < 1e-15);
            assert!(x.mul(&u).unwrap().distance(&x).unwrap() < 1e-15);
            assert!(x.involve().unwrap().involve().unwrap().distance(&x).unwrap() < 1e-15);
        }
        let t = MultiIndex::from([1, 0]);
        let e12 = sp.monomial(&t, unit_vector(4, 1)).unwrap();
        assert_eq!(e12.involve().unwrap().coeff(&t).unwrap(), unit_vector(4, 2));
        let c1 = SeriesSpace::new(function_algebra(1), 1, 2, Mode::Series).unwrap();
        let it = c1.monomial(&MultiIndex::from([1]), Vector::from_element(1, I)).unwrap();
        assert_eq!(
            it.involve().unwrap().coeff(&MultiIndex::from([1])).unwrap()[0],
            -I
        );
    }

    #[test]
    fn storage_switches_with_fill() {
        let sp = SeriesSpace::new(function_algebra(2), 2, 2, Mode::Polynomial).unwrap();
        let x = sp.monomial(&MultiIndex::from([1, 0]), Vector::from_element(2, ONE)).unwrap();
        assert!(!x.is_dense());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = sp.random(&mut rng, 1.0);
        assert!(y.is_dense());
        assert_eq!(y.nnz(), sp.len());
    }

    #[test]
    fn flat_algebra_agrees_with_cauchy_product() {
        let sp = SeriesSpace::new(matrix_algebra(2), 2, 2, Mode::Series).unwrap();
        let flat = sp.flat_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let x = sp.random(&mut rng, 0.7);
            let y = sp.random(&mut rng, 0.7);
            let direct = x.mul(&y).unwrap().flatten();
            let via = flat.mul(&x.flatten(), &y.flatten());
            assert!((direct - via).norm() < 1e-12);
        }
    }

    #[test]
    fn shape_mismatch_is_usage_error() {
        let a = SeriesSpace::new(function_algebra(1), 1, 2, Mode::Series).unwrap();
        let b = SeriesSpace::new(function_algebra(1), 1, 3, Mode::Series).unwrap();
        assert!(matches!(a.unit().mul(&b.unit()), Err(Error::Usage(_))));
    }

    #[test]
    fn json_round_trip() {
        let sp = SeriesSpace::new(matrix_algebra(2), 1, 3, Mode::Series).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = sp.random(&mut rng, 0.5);
        let s = serde_json::to_string(&x.to_json()).unwrap();
        let terms: Vec<SeriesTerm> = serde_json::from_str(&s).unwrap();
        let y = SeriesElement::from_json(&sp, &terms).unwrap();
        assert_eq!(y.distance(&x).unwrap(), 0.0);
    }
}
