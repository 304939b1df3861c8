//! Real polynomials in `m` variables with sparse coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Vector, C64};
use crate::multiindex::{IndexTable, MultiIndex};

#[derive(Clone, PartialEq)]
pub struct Poly {
    m: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Poly {
    pub fn zero(m: usize) -> Self {
        Poly {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        Poly::monomial(MultiIndex::zero(m), c)
    }

    /// The coordinate function `x_i`.
    pub fn var(m: usize, i: usize) -> Self {
        Poly::monomial(MultiIndex::unit(m, i), 1.0)
    }

    pub fn monomial(k: MultiIndex, c: f64) -> Self {
        let mut p = Poly::zero(k.len());
        p.add_term(k, c);
        p
    }

    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let mut p = Poly::zero(m);
        for (k, c) in terms {
            if k.len() != m {
                return Err(Error::usage(format!(
                    "monomial {k:?} has {} variables, expected {m}",
                    k.len()
                )));
            }
            p.add_term(k, c);
        }
        Ok(p)
    }

    /// Chart monomial `e^k = prod_i (x_i - s_i)^{k_i}`.
    pub fn chart_monomial(s: &[f64], k: &MultiIndex) -> Self {
        let m = s.len();
        let mut p = Poly::constant(m, 1.0);
        for (i, &ki) in k.entries().iter().enumerate() {
            let e = &Poly::var(m, i) - &Poly::constant(m, s[i]);
            p = &p * &e.pow(ki);
        }
        p
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn coeff(&self, k: &MultiIndex) -> f64 {
        self.terms.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.degree()).max()
    }

    fn add_term(&mut self, k: MultiIndex, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(k).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            let zeros: Vec<MultiIndex> = self
                .terms
                .iter()
                .filter(|(_, &v)| v == 0.0)
                .map(|(k, _)| k.clone())
                .collect();
            for z in zeros {
                self.terms.remove(&z);
            }
        }
    }

    pub fn scale(&self, c: f64) -> Poly {
        let mut p = Poly::zero(self.m);
        for (k, v) in self.terms() {
            p.add_term(k.clone(), c * v);
        }
        p
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(self.m, 1.0);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms()
            .map(|(k, c)| {
                c * k
                    .entries()
                    .iter()
                    .zip(x)
                    .map(|(&e, &xi)| xi.powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// `d/dx_i`
    pub fn derivative(&self, i: usize) -> Poly {
        let mut p = Poly::zero(self.m);
        for (k, c) in self.terms() {
            let e = k.entries()[i];
            if e > 0 {
                let mut kk = k.entries().to_vec();
                kk[i] -= 1;
                p.add_term(MultiIndex::new(kk), c * e as f64);
            }
        }
        p
    }

    /// `d^k = d_1^{k_1} ... d_m^{k_m}`
    pub fn partial(&self, k: &MultiIndex) -> Poly {
        let mut p = self.clone();
        for (i, &ki) in k.entries().iter().enumerate() {
            for _ in 0..ki {
                p = p.derivative(i);
            }
        }
        p
    }

    /// `x -> f(x + s)`
    pub fn translate(&self, s: &[f64]) -> Poly {
        let m = self.m;
        let shifted: Vec<Poly> = (0..m)
            .map(|i| &Poly::var(m, i) + &Poly::constant(m, s[i]))
            .collect();
        let mut out = Poly::zero(m);
        for (k, c) in self.terms() {
            let mut t = Poly::constant(m, c);
            for (i, &e) in k.entries().iter().enumerate() {
                t = &t * &shifted[i].pow(e);
            }
            out = &out + &t;
        }
        out
    }

    /// Taylor coefficients `(∂^k f)(s) / k!` for `|k| <= n`, in table order.
    pub fn taylor_coeffs(&self, s: &[f64], n: u32) -> Vec<f64> {
        IndexTable::new(self.m, n)
            .iter()
            .map(|k| self.partial(k).eval(s) / k.factorial() as f64)
            .collect()
    }

    /// `Σ_{|k|<=n} (∂^k f)(s)/k! · (x − s)^k`, re-expanded in monomials.
    pub fn taylor(&self, s: &[f64], n: u32) -> Poly {
        let table = IndexTable::new(self.m, n);
        let mut out = Poly::zero(self.m);
        for (k, c) in table.iter().zip(self.taylor_coeffs(s, n)) {
            if c != 0.0 {
                out = &out + &Poly::chart_monomial(s, k).scale(c);
            }
        }
        out
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Coefficients in the monomial basis of `table`.
    pub fn to_coords(&self, table: &IndexTable) -> Result<Vector> {
        let mut v = Vector::zeros(table.len());
        for (k, c) in self.terms() {
            let i = table.position(k).ok_or_else(|| {
                Error::usage(format!(
                    "monomial {k:?} outside degree {} in {} variables",
                    table.order(),
                    table.vars()
                ))
            })?;
            v[i] = C64::new(c, 0.0);
        }
        Ok(v)
    }

    /// Inverse of [`Poly::to_coords`]; imaginary parts are dropped.
    pub fn from_coords(table: &IndexTable, v: &Vector) -> Poly {
        let mut p = Poly::zero(table.vars());
        for (i, z) in v.iter().enumerate() {
            p.add_term(table.get(i).clone(), z.re);
        }
        p
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut p = self.clone();
        for (k, c) in rhs.terms() {
            p.add_term(k.clone(), c);
        }
        p
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut p = Poly::zero(self.m);
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                p.add_term(a.add(b).expect("same variable count"), ca * cb);
            }
        }
        p
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(k, c)| format!("{c}*x^{k:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
