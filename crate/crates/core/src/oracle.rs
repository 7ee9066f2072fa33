//! Ground truth that shares no code path with the jet engine.
//!
//! * A sparse polynomial normal form with termwise symbolic
//!   differentiation, for division-free expressions.
//! * Central finite differences in binary64, for anything the float
//!   evaluator can handle.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg};

use num_traits::{One, Zero};

use crate::error::OracleError;
use crate::expr::{evaluate, Expr, Float};
use crate::multiindex::MultiIndex;
use crate::rational::{self, Rational};

/// Step size for [`finite_difference`] unless overridden.
pub const DEFAULT_STEP: f64 = 1e-4;
/// Relative tolerance for comparing a finite difference with an exact value.
pub const DEFAULT_RTOL: f64 = 1e-6;

/// `Σ c_α x^α` with no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    arity: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl SparsePoly {
    pub fn zero(arity: usize) -> Self {
        SparsePoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.insert(MultiIndex::zeros(arity), c);
        p
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut p = Self::zero(arity);
        p.insert(MultiIndex::unit(arity, i), Rational::one());
        p
    }

    pub fn from_terms(
        arity: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Self {
        let mut p = Self::zero(arity);
        for (alpha, c) in terms {
            assert_eq!(alpha.arity(), arity, "exponent arity");
            p.insert(alpha, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pow(&self, m: u32) -> Self {
        (0..m).fold(Self::constant(self.arity, Rational::one()), |acc, _| {
            &acc * self
        })
    }

    fn insert(&mut self, alpha: MultiIndex, c: Rational) {
        let slot = self
            .terms
            .entry(alpha.clone())
            .or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&alpha);
        }
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.arity, rhs.arity);
        let mut out = self.clone();
        for (alpha, c) in &rhs.terms {
            out.insert(alpha.clone(), c.clone());
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.arity, rhs.arity);
        let mut out = SparsePoly::zero(self.arity);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.insert(a.add(b).expect("same arity"), x * y);
            }
        }
        out
    }
}

/// Expands a division-free expression. The polynomial's arity is the
/// expression's arity.
pub fn to_poly(e: &Expr) -> Result<SparsePoly, OracleError> {
    let flat = e.flatten();
    expand(&flat, flat.arity())
}

fn expand(e: &Expr, n: usize) -> Result<SparsePoly, OracleError> {
    Ok(match e {
        Expr::Const(c) => SparsePoly::constant(n, c.clone()),
        Expr::Var(i) => SparsePoly::var(n, *i),
        Expr::Add(a, b) => &expand(a, n)? + &expand(b, n)?,
        Expr::Sub(a, b) => &expand(a, n)? + &-&expand(b, n)?,
        Expr::Mul(a, b) => &expand(a, n)? * &expand(b, n)?,
        Expr::Neg(a) => -&expand(a, n)?,
        Expr::Pow(a, m) => expand(a, n)?.pow(*m),
        Expr::Div(..) => return Err(OracleError::NotPolynomial),
        Expr::Compose(..) => expand(&e.flatten(), n)?,
    })
}

/// Termwise power rule in variable `i`. Differentiating in a variable the
/// polynomial does not have gives zero.
pub fn poly_partial(p: &SparsePoly, i: usize) -> SparsePoly {
    let mut out = SparsePoly::zero(p.arity);
    if i >= p.arity {
        return out;
    }
    for (alpha, c) in &p.terms {
        let e = alpha.parts()[i];
        if e == 0 {
            continue;
        }
        let mut parts = alpha.parts().to_vec();
        parts[i] -= 1;
        out.insert(MultiIndex::new(parts), c * rational::int(i64::from(e)));
    }
    out
}

pub fn poly_eval(p: &SparsePoly, x: &[Rational]) -> Result<Rational, OracleError> {
    if x.len() < p.arity {
        return Err(OracleError::IndexOutOfRange {
            index: p.arity - 1,
            arity: x.len(),
        });
    }
    let mut sum = Rational::zero();
    for (alpha, c) in &p.terms {
        let mut term = c.clone();
        for (xi, &e) in x.iter().zip(alpha.parts()) {
            term *= num_traits::pow(xi.clone(), e as usize);
        }
        sum += term;
    }
    Ok(sum)
}

/// `∂[α]e(x)` by repeated [`poly_partial`].
pub fn oracle_mixed(e: &Expr, alpha: &MultiIndex, x: &[Rational]) -> Result<Rational, OracleError> {
    let mut p = to_poly(e)?;
    for (i, &a) in alpha.parts().iter().enumerate() {
        for _ in 0..a {
            p = poly_partial(&p, i);
        }
    }
    poly_eval(&p, x)
}

/// `(f(x + h·e_i) − f(x − h·e_i)) / 2h` in binary64.
pub fn finite_difference(e: &Expr, i: usize, x: &[f64], h: f64) -> Result<f64, OracleError> {
    if i >= x.len() {
        return Err(OracleError::IndexOutOfRange {
            index: i,
            arity: x.len(),
        });
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(OracleError::Numeric(format!(
            "step must be positive, got {h}"
        )));
    }
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[i] += h;
    minus[i] -= h;
    let fp = evaluate(e, &Float, &plus)?;
    let fm = evaluate(e, &Float, &minus)?;
    let d = (fp - fm) / (2.0 * h);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(OracleError::Numeric(format!(
            "non-finite difference quotient at x{i} = {}",
            x[i]
        )))
    }
}

/// `|approx − exact| ≤ rtol · max(1, |exact|)`.
pub fn within_tolerance(approx: f64, exact: f64, rtol: f64) -> bool {
    (approx - exact).abs() <= rtol * exact.abs().max(1.0)
}
