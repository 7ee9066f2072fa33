use num_traits::Zero;

use super::Expr;
use crate::error::{EvalError, WeilError};
use crate::rational::{self, Rational};
use crate::weil::{Shape, WeilElement};

/// A commutative ℚ-algebra that expressions can be evaluated in.
///
/// Ring operations may fail only when operands are incompatible (for
/// instance Weil elements of different shapes). `invert` returns `None` for
/// non-units.
pub trait Carrier {
    type Value: Clone;

    fn constant(&self, c: &Rational) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, EvalError>;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, EvalError>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, EvalError>;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn invert(&self, a: &Self::Value) -> Option<Self::Value>;

    fn pow(&self, a: &Self::Value, m: u32) -> Result<Self::Value, EvalError> {
        let mut acc = self.constant(&rational::int(1));
        for _ in 0..m {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }
}

/// Exact rational arithmetic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Exact;

impl Carrier for Exact {
    type Value = Rational;

    fn constant(&self, c: &Rational) -> Rational {
        c.clone()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Result<Rational, EvalError> {
        Ok(a + b)
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Result<Rational, EvalError> {
        Ok(a - b)
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Result<Rational, EvalError> {
        Ok(a * b)
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn invert(&self, a: &Rational) -> Option<Rational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn pow(&self, a: &Rational, m: u32) -> Result<Rational, EvalError> {
        Ok(num_traits::pow(a.clone(), m as usize))
    }
}

/// binary64 arithmetic, used only by the finite-difference oracle.
///
/// Division fails when the denominator is zero or the quotient is not
/// finite.
#[derive(Debug, Clone, Copy, Default)]
pub struct Float;

impl Carrier for Float {
    type Value = f64;

    fn constant(&self, c: &Rational) -> f64 {
        rational::to_f64(c)
    }
    fn add(&self, a: &f64, b: &f64) -> Result<f64, EvalError> {
        Ok(a + b)
    }
    fn sub(&self, a: &f64, b: &f64) -> Result<f64, EvalError> {
        Ok(a - b)
    }
    fn mul(&self, a: &f64, b: &f64) -> Result<f64, EvalError> {
        Ok(a * b)
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn invert(&self, a: &f64) -> Option<f64> {
        let r = 1.0 / a;
        (*a != 0.0 && r.is_finite()).then_some(r)
    }
    fn pow(&self, a: &f64, m: u32) -> Result<f64, EvalError> {
        Ok(a.powi(m as i32))
    }
}

/// The Weil algebra of the given shape.
impl Carrier for Shape {
    type Value = WeilElement;

    fn constant(&self, c: &Rational) -> WeilElement {
        WeilElement::constant(self, c.clone())
    }
    fn add(&self, a: &WeilElement, b: &WeilElement) -> Result<WeilElement, EvalError> {
        Ok(a.try_add(b)?)
    }
    fn sub(&self, a: &WeilElement, b: &WeilElement) -> Result<WeilElement, EvalError> {
        Ok(a.try_sub(b)?)
    }
    fn mul(&self, a: &WeilElement, b: &WeilElement) -> Result<WeilElement, EvalError> {
        Ok(a.try_mul(b)?)
    }
    fn neg(&self, a: &WeilElement) -> WeilElement {
        -a
    }
    fn invert(&self, a: &WeilElement) -> Option<WeilElement> {
        a.invert().ok()
    }
    fn pow(&self, a: &WeilElement, m: u32) -> Result<WeilElement, EvalError> {
        if a.shape() != self {
            return Err(WeilError::ShapeMismatch {
                left: self.orders().parts().to_vec(),
                right: a.shape().orders().parts().to_vec(),
            }
            .into());
        }
        Ok(a.pow(m))
    }
}

/// Evaluates `e` at `args` in the carrier `c`.
///
/// `args` must cover every variable that occurs in `e`; extra arguments are
/// ignored. Division multiplies by the carrier inverse of the denominator.
pub fn evaluate<C: Carrier>(e: &Expr, c: &C, args: &[C::Value]) -> Result<C::Value, EvalError> {
    match e {
        Expr::Const(v) => Ok(c.constant(v)),
        Expr::Var(i) => args.get(*i).cloned().ok_or(EvalError::MissingArgument {
            index: *i,
            provided: args.len(),
        }),
        Expr::Add(a, b) => c.add(&evaluate(a, c, args)?, &evaluate(b, c, args)?),
        Expr::Sub(a, b) => c.sub(&evaluate(a, c, args)?, &evaluate(b, c, args)?),
        Expr::Mul(a, b) => c.mul(&evaluate(a, c, args)?, &evaluate(b, c, args)?),
        Expr::Div(a, b) => {
            let num = evaluate(a, c, args)?;
            let den = evaluate(b, c, args)?;
            let inv = c.invert(&den).ok_or_else(|| EvalError::NotInvertible {
                denominator: b.pretty_print(),
            })?;
            c.mul(&num, &inv)
        }
        Expr::Neg(a) => Ok(c.neg(&evaluate(a, c, args)?)),
        Expr::Pow(a, m) => c.pow(&evaluate(a, c, args)?, *m),
        Expr::Compose(outer, subs) => {
            let inner = subs
                .iter()
                .map(|s| evaluate(s, c, args))
                .collect::<Result<Vec<_>, _>>()?;
            evaluate(outer, c, &inner)
        }
    }
}
