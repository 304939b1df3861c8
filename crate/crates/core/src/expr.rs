//! Expression trees for smooth functions on `ℝ^m`, with symbolic derivatives.
//!
//! Text form is a small prefix grammar: `(+ e e)`, `(* e e)`, `(pow e k)`,
//! `(sin e)`, `(cos e)`, `(exp e)`, `(flatbump e)`, `(var i)`, `(const c)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    /// `t^{-k} exp(−1/t²)`, extended by `0` at `t = 0`. `k = 0` is the flat
    /// bump; higher `k` only arise from differentiation.
    Flat(u32, Box<Expr>),
}

use Expr::*;

fn flat(k: u32, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let e = (-1.0 / (t * t)).exp();
    if e == 0.0 {
        0.0
    } else {
        e / t.powi(k as i32)
    }
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Var(i)
    }

    pub fn constant(c: f64) -> Expr {
        Const(c)
    }

    pub fn flat_bump(e: Expr) -> Expr {
        Flat(0, Box::new(e))
    }

    pub fn sin(e: Expr) -> Expr {
        Sin(Box::new(e))
    }

    pub fn cos(e: Expr) -> Expr {
        Cos(Box::new(e))
    }

    pub fn exp(e: Expr) -> Expr {
        Exp(Box::new(e))
    }

    pub fn pow(e: Expr, k: u32) -> Expr {
        Pow(Box::new(e), k)
    }

    pub fn scale(self, c: f64) -> Expr {
        Const(c) * self
    }

    pub fn parse(s: &str) -> Result<Expr> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let e = parse_expr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::parse(format!("trailing input after expression in {s:?}")));
        }
        Ok(e)
    }

    /// Largest variable index plus one.
    pub fn vars(&self) -> usize {
        match self {
            Const(_) => 0,
            Var(i) => i + 1,
            Add(a, b) | Mul(a, b) => a.vars().max(b.vars()),
            Pow(a, _) | Sin(a) | Cos(a) | Exp(a) | Flat(_, a) => a.vars(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Const(c) => *c,
            Var(i) => x[*i],
            Add(a, b) => a.eval(x) + b.eval(x),
            Mul(a, b) => a.eval(x) * b.eval(x),
            Pow(a, k) => a.eval(x).powi(*k as i32),
            Sin(a) => a.eval(x).sin(),
            Cos(a) => a.eval(x).cos(),
            Exp(a) => a.eval(x).exp(),
            Flat(k, a) => flat(*k, a.eval(x)),
        }
    }

    /// `∂/∂x_i`
    pub fn derivative(&self, i: usize) -> Expr {
        match self {
            Const(_) => Const(0.0),
            Var(j) => Const(if *j == i { 1.0 } else { 0.0 }),
            Add(a, b) => a.derivative(i) + b.derivative(i),
            Mul(a, b) => a.derivative(i) * (**b).clone() + (**a).clone() * b.derivative(i),
            Pow(a, k) => match k {
                0 => Const(0.0),
                1 => a.derivative(i),
                _ => Const(*k as f64) * Expr::pow((**a).clone(), k - 1) * a.derivative(i),
            },
            Sin(a) => Expr::cos((**a).clone()) * a.derivative(i),
            Cos(a) => Expr::sin((**a).clone()).scale(-1.0) * a.derivative(i),
            Exp(a) => Expr::exp((**a).clone()) * a.derivative(i),
            // d/dt t^{-k} e^{-1/t²} = −k t^{-k-1} e^{-1/t²} + 2 t^{-k-3} e^{-1/t²}
            Flat(k, a) => {
                let outer = Flat(k + 1, a.clone()).scale(-(*k as f64)) + Flat(k + 3, a.clone()).scale(2.0);
                outer * a.derivative(i)
            }
        }
    }

    pub fn gradient(&self, m: usize) -> Vec<Expr> {
        (0..m).map(|i| self.derivative(i)).collect()
    }

    pub fn is_polynomial(&self) -> bool {
        match self {
            Const(_) | Var(_) => true,
            Add(a, b) | Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            Pow(a, _) => a.is_polynomial(),
            _ => false,
        }
    }

    /// The polynomial in `m` variables this expression denotes, if any.
    pub fn to_poly(&self, m: usize) -> Option<Poly> {
        if self.vars() > m {
            return None;
        }
        Some(match self {
            Const(c) => Poly::constant(m, *c),
            Var(i) => Poly::monomial(MultiIndex::unit(m, *i), 1.0),
            Add(a, b) => &a.to_poly(m)? + &b.to_poly(m)?,
            Mul(a, b) => &a.to_poly(m)? * &b.to_poly(m)?,
            Pow(a, k) => a.to_poly(m)?.pow(*k),
            _ => return None,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(c) => write!(f, "(const {c})"),
            Var(i) => write!(f, "(var {i})"),
            Add(a, b) => write!(f, "(+ {a} {b})"),
            Mul(a, b) => write!(f, "(* {a} {b})"),
            Pow(a, k) => write!(f, "(pow {a} {k})"),
            Sin(a) => write!(f, "(sin {a})"),
            Cos(a) => write!(f, "(cos {a})"),
            Exp(a) => write!(f, "(exp {a})"),
            Flat(0, a) => write!(f, "(flatbump {a})"),
            Flat(k, a) => write!(f, "(* (pow {a} -{k}) (flatbump {a}))"),
        }
    }
}

fn tokenize(s: &str) -> Vec<String> {
    s.replace('(', " ( ")
        .replace(')', " ) ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn parse_expr(t: &[String], pos: &mut usize) -> Result<Expr> {
    let tok = |p: usize| -> Result<&str> {
        t.get(p)
            .map(String::as_str)
            .ok_or_else(|| Error::parse("unexpected end of expression"))
    };
    if tok(*pos)? != "(" {
        return Err(Error::parse(format!("expected '(' but found {:?}", tok(*pos)?)));
    }
    let head = tok(*pos + 1)?.to_string();
    *pos += 2;
    let number = |pos: &mut usize| -> Result<String> {
        let s = tok(*pos)?.to_string();
        *pos += 1;
        Ok(s)
    };
    let e = match head.as_str() {
        "const" => {
            let s = number(pos)?;
            Const(s.parse().map_err(|_| Error::parse(format!("bad constant {s:?}")))?)
        }
        "var" => {
            let s = number(pos)?;
            Var(s.parse().map_err(|_| Error::parse(format!("bad variable index {s:?}")))?)
        }
        "pow" => {
            let base = parse_expr(t, pos)?;
            let s = number(pos)?;
            let k: u32 = s
                .parse()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::parse(format!("power must be an integer >= 1, got {s:?}")))?;
            Pow(Box::new(base), k)
        }
        "+" | "*" => {
            let mut args = Vec::new();
            while tok(*pos)? != ")" {
                args.push(parse_expr(t, pos)?);
            }
            if args.len() < 2 {
                return Err(Error::parse(format!("'{head}' needs at least two arguments")));
            }
            let mut it = args.into_iter();
            let first = it.next().expect("nonempty");
            it.fold(first, |acc, e| {
                if head == "+" {
                    Add(Box::new(acc), Box::new(e))
                } else {
                    Mul(Box::new(acc), Box::new(e))
                }
            })
        }
        "sin" | "cos" | "exp" | "flatbump" => {
            let a = Box::new(parse_expr(t, pos)?);
            match head.as_str() {
                "sin" => Sin(a),
                "cos" => Cos(a),
                "exp" => Exp(a),
                _ => Flat(0, a),
            }
        }
        other => return Err(Error::parse(format!("unknown operator {other:?}"))),
    };
    if tok(*pos)? != ")" {
        return Err(Error::parse(format!("expected ')' after {head}")));
    }
    *pos += 1;
    Ok(e)
}

impl std::ops::Add for Expr {
    type Output = Expr;

    fn add(self, b: Expr) -> Expr {
        match (self, b) {
            (Const(x), Const(y)) => Const(x + y),
            (Const(z), e) | (e, Const(z)) if z == 0.0 => e,
            (a, b) => Add(Box::new(a), Box::new(b)),
        }
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;

    fn mul(self, b: Expr) -> Expr {
        match (self, b) {
            (Const(x), Const(y)) => Const(x * y),
            (Const(z), _) | (_, Const(z)) if z == 0.0 => Const(0.0),
            (Const(o), e) | (e, Const(o)) if o == 1.0 => e,
            (a, b) => Mul(Box::new(a), Box::new(b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let e = Expr::parse("(+ (* (const 2) (var 0)) (pow (var 1) 3))").unwrap();
        assert_eq!(e.eval(&[1.5, 2.0]), 11.0);
        assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
        assert!(Expr::parse("(pow (var 0) 0)").is_err());
        assert!(Expr::parse("(sin (var 0)").is_err());
        assert!(Expr::parse("(tan (var 0))").is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            "(sin (* (const 6.283185307179586) (var 0)))",
            "(exp (pow (var 0) 2))",
            "(flatbump (var 0))",
            "(* (var 0) (cos (var 0)))",
        ];
        for c in cases {
            let e = Expr::parse(c).unwrap();
            let d = e.derivative(0);
            for x in [-0.7, 0.3, 0.9] {
                let h = 1e-6;
                let fd = (e.eval(&[x + h]) - e.eval(&[x - h])) / (2.0 * h);
                assert!((fd - d.eval(&[x])).abs() < 1e-6 * (1.0 + fd.abs()), "{c} at {x}");
            }
        }
    }

    #[test]
    fn flat_bump_is_flat_at_zero() {
        let mut e = Expr::flat_bump(Expr::var(0));
        for _ in 0..4 {
            assert_eq!(e.eval(&[0.0]), 0.0);
            e = e.derivative(0);
        }
        assert!(e.eval(&[0.5]).is_finite());
    }

    #[test]
    fn polynomial_conversion() {
        let e = Expr::parse("(+ (var 0) (pow (var 0) 2))").unwrap();
        let p = e.to_poly(1).unwrap();
        assert_eq!(p.eval(&[2.0]), 6.0);
        assert!(Expr::parse("(sin (var 0))").unwrap().to_poly(1).is_none());
    }
}
