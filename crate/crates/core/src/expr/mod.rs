//! Expressions for functions `Rⁿ → R` over positional variables `x0, x1, …`.
//!
//! The same tree evaluates over any [`Carrier`]: exact rationals, binary64
//! floats, or a Weil algebra. Evaluating over a Weil algebra at
//! `x + d` is how every derivative in this crate is computed.

mod eval;
mod parser;

use std::fmt;

use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::rational::{self, Rational};

pub use eval::{evaluate, Carrier, Exact, Float};
pub use parser::parse;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `outer` with `Var(j)` replaced by `substitutions[j]`.
    Compose(Box<Expr>, Vec<Expr>),
}

impl Expr {
    pub fn constant(c: Rational) -> Expr {
        Expr::Const(c)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(rational::int(n))
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, m: u32) -> Expr {
        Expr::Pow(Box::new(a), m)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn compose(outer: Expr, substitutions: Vec<Expr>) -> Expr {
        Expr::Compose(Box::new(outer), substitutions)
    }

    /// One more than the largest variable index that occurs, or 0.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.arity(),
            Expr::Compose(_, subs) => subs.iter().map(Expr::arity).max().unwrap_or(0),
        }
    }

    pub fn has_division(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Div(..) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.has_division() || b.has_division()
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.has_division(),
            Expr::Compose(outer, subs) => {
                outer.has_division() || subs.iter().any(Expr::has_division)
            }
        }
    }

    /// Replaces `Var(j)` by `substitutions[j]`, flattening nested `Compose`
    /// nodes. Variables without a substitution are left in place.
    pub fn substitute(&self, substitutions: &[Expr]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Var(i) => substitutions.get(*i).cloned().unwrap_or(Expr::Var(*i)),
            Expr::Add(a, b) => Expr::add(a.substitute(substitutions), b.substitute(substitutions)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(substitutions), b.substitute(substitutions)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(substitutions), b.substitute(substitutions)),
            Expr::Div(a, b) => Expr::div(a.substitute(substitutions), b.substitute(substitutions)),
            Expr::Neg(a) => Expr::neg(a.substitute(substitutions)),
            Expr::Pow(a, m) => Expr::pow(a.substitute(substitutions), *m),
            Expr::Compose(outer, inner) => {
                let inner: Vec<Expr> = inner.iter().map(|e| e.substitute(substitutions)).collect();
                outer.flatten().substitute(&inner)
            }
        }
    }

    /// Removes every `Compose` node.
    pub fn flatten(&self) -> Expr {
        self.substitute(&[])
    }

    /// Canonical fully parenthesized text; `parse` reads it back to the same
    /// tree. `Compose` nodes have no surface syntax and print as their
    /// flattened substitution.
    pub fn pretty_print(&self) -> String {
        self.to_string()
    }

    /// `{"op": "...", "args": [...]}` with extra `value`/`index`/`exp` fields
    /// on the leaf and power nodes.
    pub fn to_json(&self) -> Value {
        let bin =
            |op: &str, a: &Expr, b: &Expr| json!({"op": op, "args": [a.to_json(), b.to_json()]});
        match self {
            Expr::Const(c) => json!({"op": "const", "value": rational::to_json(c)}),
            Expr::Var(i) => json!({"op": "var", "index": i}),
            Expr::Add(a, b) => bin("add", a, b),
            Expr::Sub(a, b) => bin("sub", a, b),
            Expr::Mul(a, b) => bin("mul", a, b),
            Expr::Div(a, b) => bin("div", a, b),
            Expr::Neg(a) => json!({"op": "neg", "args": [a.to_json()]}),
            Expr::Pow(a, m) => json!({"op": "pow", "args": [a.to_json()], "exp": m}),
            Expr::Compose(outer, subs) => {
                let mut args = vec![outer.to_json()];
                args.extend(subs.iter().map(Expr::to_json));
                json!({"op": "compose", "args": args})
            }
        }
    }

    pub fn from_json(v: &Value) -> Option<Expr> {
        let op = v.get("op")?.as_str()?;
        let args = || -> Option<Vec<Expr>> {
            v.get("args")?
                .as_array()?
                .iter()
                .map(Expr::from_json)
                .collect()
        };
        let two = |make: fn(Expr, Expr) -> Expr| -> Option<Expr> {
            let mut a = args()?;
            if a.len() != 2 {
                return None;
            }
            let b = a.pop()?;
            Some(make(a.pop()?, b))
        };
        match op {
            "const" => Some(Expr::Const(rational::from_json(v.get("value")?)?)),
            "var" => Some(Expr::Var(usize::try_from(v.get("index")?.as_u64()?).ok()?)),
            "add" => two(Expr::add),
            "sub" => two(Expr::sub),
            "mul" => two(Expr::mul),
            "div" => two(Expr::div),
            "neg" => {
                let [a]: [Expr; 1] = args()?.try_into().ok()?;
                Some(Expr::neg(a))
            }
            "pow" => {
                let [a]: [Expr; 1] = args()?.try_into().ok()?;
                let m = u32::try_from(v.get("exp")?.as_u64()?).ok()?;
                Some(Expr::pow(a, m))
            }
            "compose" => {
                let mut a = args()?;
                if a.is_empty() {
                    return None;
                }
                let outer = a.remove(0);
                Some(Expr::compose(outer, a))
            }
            _ => None,
        }
    }

    fn is_nonneg_integer_const(&self) -> bool {
        matches!(self, Expr::Const(c) if c.denom().is_one() && !c.is_negative())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                // Negative and fractional literals are parenthesized so they
                // stay atoms when read back.
                if c.is_negative() || !c.denom().is_one() {
                    write!(f, "({})", rational::format(c))
                } else {
                    write!(f, "{}", c.numer())
                }
            }
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => {
                // `1 / 2` would read back as the literal 1/2
                if a.is_nonneg_integer_const() && b.is_nonneg_integer_const() {
                    write!(f, "({a} / ({b}))")
                } else {
                    write!(f, "({a} / {b})")
                }
            }
            Expr::Neg(a) => match a.as_ref() {
                // `-3` would read back as the literal -3
                Expr::Const(_) if a.is_nonneg_integer_const() => write!(f, "(-({a}))"),
                _ => write!(f, "(-{a})"),
            },
            Expr::Pow(a, m) => write!(f, "({a} ^ {m})"),
            Expr::Compose(..) => write!(f, "{}", self.flatten()),
        }
    }
}
