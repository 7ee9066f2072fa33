//! Derivatives and Taylor expansions by jet evaluation.
//!
//! Every operator here evaluates an expression at `x + d` over a Weil
//! algebra and reads off coefficients. No expression is ever differentiated
//! symbolically. The correspondence between the two is
//!
//! ```text
//! f(x + d) = Σ_{α ≤ k} ∂[α]f(x) · d^α / α!        over W(k)
//! ```
//!
//! so `∂[α]f(x) = α! · coeff_α f(x + d)`.
//!
//! ```
//! use weiljet::calculus::taylor_box;
//! use weiljet::expr::parse;
//! use weiljet::rational::int;
//!
//! let f = parse("x0^2*x1").unwrap();
//! let table = taylor_box(&f, &[int(1), int(2)], &[2, 1].into()).unwrap();
//! assert_eq!(table.get(&[1, 1].into()), Some(&int(2)));
//! ```

use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{ArityError, CalculusError, WeilError};
use crate::expr::{evaluate, Exact, Expr};
use crate::multiindex::MultiIndex;
use crate::rational::{self, Rational};
use crate::weil::{factorial_rational, Shape, WeilElement};

/// The point `x + (d₀, …, d_{n−1})` in `W(k)`. Variables with `k_i = 0`
/// receive no infinitesimal.
pub fn jet_point(shape: &Shape, x: &[Rational]) -> Result<Vec<WeilElement>, CalculusError> {
    if x.len() != shape.arity() {
        return Err(ArityError {
            expected: shape.arity(),
            found: x.len(),
        }
        .into());
    }
    x.iter()
        .enumerate()
        .map(|(i, xi)| {
            let base = WeilElement::constant(shape, xi.clone());
            if shape.orders().parts()[i] == 0 {
                Ok(base)
            } else {
                Ok(&base + &WeilElement::generator(shape, i)?)
            }
        })
        .collect()
}

/// `f(x + d)` over `W(k)`.
pub fn expand(f: &Expr, x: &[Rational], k: &MultiIndex) -> Result<WeilElement, CalculusError> {
    check_arity(f, x.len())?;
    let shape = Shape::new(k.clone());
    let point = jet_point(&shape, x)?;
    Ok(evaluate(f, &shape, &point)?)
}

/// Kock–Lawvere witnesses of `g` on `D_order`: the constant term and the
/// coefficients `b₀, …, b_{order−1}` of `d¹, …, d^order` in `g(d)`.
pub fn kl_decompose(g: &Expr, order: u32) -> Result<(Rational, Vec<Rational>), CalculusError> {
    let jet = expand(g, &[Rational::zero()], &[order].into())?;
    let coeffs = jet.coeffs();
    Ok((coeffs[0].clone(), coeffs[1..].to_vec()))
}

/// `g0 + Σ_i b_i d^{i+1}` in `W((b.len()))`.
pub fn kl_reconstruct(g0: &Rational, b: &[Rational]) -> WeilElement {
    let shape = Shape::new([b.len() as u32]);
    let mut coeffs = Vec::with_capacity(b.len() + 1);
    coeffs.push(g0.clone());
    coeffs.extend(b.iter().cloned());
    WeilElement::from_coeffs(&shape, coeffs).expect("length matches shape")
}

/// `∂f(x)`: the `d`-coefficient of `f(x + d)` with `d² = 0`.
pub fn derivative(f: &Expr, x: &Rational) -> Result<Rational, CalculusError> {
    nth_derivative(f, 1, x)
}

/// `∂ⁿf(x) = n! · coeff_n f(x + δ)` with `δ^{n+1} = 0`.
pub fn nth_derivative(f: &Expr, n: u32, x: &Rational) -> Result<Rational, CalculusError> {
    let jet = expand(f, std::slice::from_ref(x), &[n].into())?;
    Ok(jet.coeffs()[n as usize].clone() * factorial_rational(n))
}

/// `∂_i f(x)`: perturb only `x_i` by a first-order infinitesimal.
pub fn partial_derivative(f: &Expr, i: usize, x: &[Rational]) -> Result<Rational, CalculusError> {
    if i >= x.len() {
        return Err(CalculusError::IndexOutOfRange {
            index: i,
            arity: x.len(),
        });
    }
    let jet = expand(f, x, &MultiIndex::unit(x.len(), i))?;
    Ok(jet.coeffs()[1].clone())
}

/// Applies `∂_{steps[0]}`, then `∂_{steps[1]}`, and so on.
///
/// Each step gets its own first-order infinitesimal `ε_s`; the variable `v`
/// is evaluated at `x_v + Σ_{steps[s] = v} ε_s`. The derivatives are then
/// peeled off one at a time in application order, each by cancelling its
/// `ε_s` from the previous result.
pub fn iterated_partial(
    f: &Expr,
    steps: &[usize],
    x: &[Rational],
) -> Result<Rational, CalculusError> {
    check_arity(f, x.len())?;
    if let Some(&bad) = steps.iter().find(|&&v| v >= x.len()) {
        return Err(CalculusError::IndexOutOfRange {
            index: bad,
            arity: x.len(),
        });
    }
    let shape = Shape::square_free(steps.len());
    let mut point: Vec<WeilElement> = x
        .iter()
        .map(|xi| WeilElement::constant(&shape, xi.clone()))
        .collect();
    for (s, &v) in steps.iter().enumerate() {
        point[v] = &point[v] + &WeilElement::generator(&shape, s)?;
    }
    let mut value = evaluate(f, &shape, &point)?;
    for s in 0..steps.len() {
        value = value.coefficient_along(s, 1)?;
    }
    Ok(value.constant_term().clone())
}

/// `∂[α]f(x) = α! · coeff_α f(x + d)` over `W(α)`. Short `α` are padded with
/// trailing zeros to the length of `x`.
pub fn mixed_derivative(
    f: &Expr,
    alpha: &MultiIndex,
    x: &[Rational],
) -> Result<Rational, CalculusError> {
    if alpha.arity() > x.len() {
        return Err(ArityError {
            expected: x.len(),
            found: alpha.arity(),
        }
        .into());
    }
    let alpha = alpha.padded(x.len());
    let jet = expand(f, x, &alpha)?;
    let coeff = jet.coefficient(&alpha)?;
    Ok(coeff * Rational::from_integer(alpha.factorial().into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMode {
    /// `α ≤ k`
    Box,
    /// `|α| ≤ |k|`
    Simplex,
}

impl TableMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TableMode::Box => "box",
            TableMode::Simplex => "simplex",
        }
    }
}

impl fmt::Display for TableMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Derivative values `∂[α]f(x)` (not raw Taylor coefficients), in
/// enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivTable {
    pub mode: TableMode,
    pub orders: MultiIndex,
    pub entries: Vec<(MultiIndex, Rational)>,
}

impl DerivTable {
    pub fn arity(&self) -> usize {
        self.orders.arity()
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<&Rational> {
        self.entries
            .iter()
            .find(|(a, _)| a == alpha)
            .map(|(_, v)| v)
    }

    /// `Σ ∂[α]f(x) · d^α / α!` evaluated in `W(k)` by ring operations.
    /// Terms whose `d^α` vanishes in `W(k)` drop out on their own.
    pub fn reconstruct(&self, k: &MultiIndex) -> Result<WeilElement, CalculusError> {
        let shape = Shape::new(k.clone());
        if shape.arity() != self.arity() {
            return Err(ArityError {
                expected: self.arity(),
                found: shape.arity(),
            }
            .into());
        }
        let gens: Vec<WeilElement> = (0..shape.arity())
            .map(|i| match WeilElement::generator(&shape, i) {
                Ok(d) => Ok(d),
                // D_0 = {0}
                Err(WeilError::DegenerateGenerator { .. }) => Ok(WeilElement::zero(&shape)),
                Err(e) => Err(e),
            })
            .collect::<Result<_, _>>()?;
        let mut sum = WeilElement::zero(&shape);
        for (alpha, value) in &self.entries {
            let mut monomial = WeilElement::one(&shape);
            for (d, &a) in gens.iter().zip(alpha.parts()) {
                monomial = &monomial * &d.pow(a);
            }
            let scale = value / Rational::from_integer(alpha.factorial().into());
            sum = &sum + &monomial.scale(&scale);
        }
        Ok(sum)
    }

    /// `{"mode", "arity", "orders", "entries": [{"alpha", "value": {"num", "den"}}]}`
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(a, v)| json!({"alpha": a.to_json(), "value": rational::to_json(v)}))
            .collect();
        json!({
            "mode": self.mode.as_str(),
            "arity": self.arity(),
            "orders": self.orders.to_json(),
            "entries": entries,
        })
    }

    pub fn from_json(v: &Value) -> Option<DerivTable> {
        let mode = match v.get("mode")?.as_str()? {
            "box" => TableMode::Box,
            "simplex" => TableMode::Simplex,
            _ => return None,
        };
        let orders = MultiIndex::from_json(v.get("orders")?)?;
        if v.get("arity")?.as_u64()? != orders.arity() as u64 {
            return None;
        }
        let entries = v
            .get("entries")?
            .as_array()?
            .iter()
            .map(|e| {
                Some((
                    MultiIndex::from_json(e.get("alpha")?)?,
                    rational::from_json(e.get("value")?)?,
                ))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(DerivTable {
            mode,
            orders,
            entries,
        })
    }
}

/// All `∂[α]f(x)` for `α ≤ k`, from a single evaluation over `W(k)`.
pub fn taylor_box(f: &Expr, x: &[Rational], k: &MultiIndex) -> Result<DerivTable, CalculusError> {
    check_orders(x, k)?;
    let jet = expand(f, x, k)?;
    let entries = jet
        .shape()
        .indices()
        .iter()
        .zip(jet.coeffs())
        .map(|(alpha, c)| {
            let value = c * Rational::from_integer(alpha.factorial().into());
            (alpha.clone(), value)
        })
        .collect();
    Ok(DerivTable {
        mode: TableMode::Box,
        orders: k.clone(),
        entries,
    })
}

/// All `∂[α]f(x)` for `|α| ≤ |k|`.
///
/// Entries with `α ≤ k` come from [`taylor_box`]. The rest multiply a
/// vanishing monomial on the neighborhood but are still reported; they are
/// computed by evaluating over `W(β)` for the maximal indices `|β| = |k|`.
pub fn taylor_simplex(
    f: &Expr,
    x: &[Rational],
    k: &MultiIndex,
) -> Result<DerivTable, CalculusError> {
    check_orders(x, k)?;
    let total = u32::try_from(k.norm()).expect("total order fits in u32");
    let boxed = taylor_box(f, x, k)?;
    let indices = MultiIndex::enumerate_simplex(x.len(), total);
    let mut values: Vec<Option<Rational>> = indices
        .iter()
        .map(|alpha| boxed.get(alpha).cloned())
        .collect();
    for top in indices.iter().filter(|a| a.norm() == u64::from(total)) {
        let missing = indices
            .iter()
            .zip(&values)
            .any(|(a, v)| v.is_none() && a.leq(top).unwrap_or(false));
        if !missing {
            continue;
        }
        let jet = expand(f, x, top)?;
        for (alpha, slot) in indices.iter().zip(values.iter_mut()) {
            if slot.is_none() && alpha.leq(top).unwrap_or(false) {
                let c = jet.coefficient(alpha)?;
                *slot = Some(c * Rational::from_integer(alpha.factorial().into()));
            }
        }
    }
    let entries = indices
        .into_iter()
        .zip(values)
        .map(|(a, v)| (a, v.expect("every simplex index lies below a maximal one")))
        .collect();
    Ok(DerivTable {
        mode: TableMode::Simplex,
        orders: k.clone(),
        entries,
    })
}

/// Expansion on `x + δ` with `δ = d₀ + … + d_{m−1}`, each `d_i² = 0`.
///
/// Returns `(∂⁰f(x), …, ∂^m f(x))`, taken from `W((m))`, after checking
/// that `f(x + δ) = Σ_{n ≤ m} ∂ⁿf(x) δⁿ / n!` holds exactly in the
/// `m`-generator square-free algebra.
pub fn expand_sum_of_d(f: &Expr, x: &Rational, m: u32) -> Result<Vec<Rational>, CalculusError> {
    let one_var = expand(f, std::slice::from_ref(x), &[m].into())?;
    let derivs: Vec<Rational> = one_var
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c * factorial_rational(n as u32))
        .collect();

    let shape = Shape::square_free(m as usize);
    let mut delta = WeilElement::zero(&shape);
    for i in 0..m as usize {
        delta = &delta + &WeilElement::generator(&shape, i)?;
    }
    let point = &WeilElement::constant(&shape, x.clone()) + &delta;
    let lhs = evaluate(f, &shape, &[point])?;
    let mut rhs = WeilElement::zero(&shape);
    for (n, dn) in derivs.iter().enumerate() {
        let scale = dn / factorial_rational(n as u32);
        rhs = &rhs + &delta.pow(n as u32).scale(&scale);
    }
    if lhs != rhs {
        return Err(CalculusError::IdentityViolation(format!(
            "f(x + δ) = {lhs} but the Taylor sum is {rhs}"
        )));
    }
    Ok(derivs)
}

/// `(H, ∂_H f(x))` for every subset `H ⊆ {0, …, n−1}`, in the storage order
/// of the square-free algebra; `H` is listed in increasing order.
pub type SquareFreeExpansion = Vec<(Vec<usize>, Rational)>;

/// `f(x + d) = Σ_H ∂_H f(x) d^H` with all `d_i² = 0`.
pub fn taylor_squarefree(f: &Expr, x: &[Rational]) -> Result<SquareFreeExpansion, CalculusError> {
    let shape_orders = MultiIndex::new(vec![1; x.len()]);
    let jet = expand(f, x, &shape_orders)?;
    Ok(jet
        .shape()
        .indices()
        .iter()
        .zip(jet.coeffs())
        .map(|(alpha, c)| {
            let subset = alpha
                .parts()
                .iter()
                .enumerate()
                .filter(|(_, &a)| a == 1)
                .map(|(i, _)| i)
                .collect();
            (subset, c.clone())
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Constant,
    Identity,
    Linearity,
    Leibniz,
    Chain,
    Power,
    Reciprocal,
    InverseAffine,
    MixedSymmetry,
    Cancellation,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::Constant,
        Rule::Identity,
        Rule::Linearity,
        Rule::Leibniz,
        Rule::Chain,
        Rule::Power,
        Rule::Reciprocal,
        Rule::InverseAffine,
        Rule::MixedSymmetry,
        Rule::Cancellation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Constant => "constant",
            Rule::Identity => "identity",
            Rule::Linearity => "linearity",
            Rule::Leibniz => "leibniz",
            Rule::Chain => "chain",
            Rule::Power => "power",
            Rule::Reciprocal => "reciprocal",
            Rule::InverseAffine => "inverse_affine",
            Rule::MixedSymmetry => "mixed_symmetry",
            Rule::Cancellation => "cancellation",
        }
    }
}

/// A concrete instance of a differentiation rule.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleInstance {
    /// `∂c = 0`
    Constant { c: Rational, x: Rational },
    /// `∂id = 1`
    Identity { x: Rational },
    /// `∂(a·f + b·g) = a·∂f + b·∂g`
    Linearity {
        f: Expr,
        g: Expr,
        a: Rational,
        b: Rational,
        x: Rational,
    },
    /// `∂(f·g) = ∂f·g + f·∂g`
    Leibniz { f: Expr, g: Expr, x: Rational },
    /// `∂(f∘g)(x) = ∂f(g(x))·∂g(x)`
    Chain { f: Expr, g: Expr, x: Rational },
    /// `∂(xⁿ) = n·x^{n−1}`
    Power { n: u32, x: Rational },
    /// `∂(1/f) = −∂f/f²`, requires `f(x) ≠ 0`
    Reciprocal { f: Expr, x: Rational },
    /// `∂f⁻¹ = 1/((∂f)∘f⁻¹)` for `f = a·x0 + b`, `a ≠ 0`
    InverseAffine {
        a: Rational,
        b: Rational,
        x: Rational,
    },
    /// `∂_i∂_j f = ∂_j∂_i f`
    MixedSymmetry {
        f: Expr,
        i: usize,
        j: usize,
        x: Vec<Rational>,
    },
    /// `b₁·d = b₂·d` for `d ∈ D` forces `b₁ = b₂`
    Cancellation { b1: Rational, b2: Rational },
}

impl RuleInstance {
    pub fn rule(&self) -> Rule {
        match self {
            RuleInstance::Constant { .. } => Rule::Constant,
            RuleInstance::Identity { .. } => Rule::Identity,
            RuleInstance::Linearity { .. } => Rule::Linearity,
            RuleInstance::Leibniz { .. } => Rule::Leibniz,
            RuleInstance::Chain { .. } => Rule::Chain,
            RuleInstance::Power { .. } => Rule::Power,
            RuleInstance::Reciprocal { .. } => Rule::Reciprocal,
            RuleInstance::InverseAffine { .. } => Rule::InverseAffine,
            RuleInstance::MixedSymmetry { .. } => Rule::MixedSymmetry,
            RuleInstance::Cancellation { .. } => Rule::Cancellation,
        }
    }
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = rational::format;
        match self {
            RuleInstance::Constant { c, x } => write!(fm, "constant c={} x={}", r(c), r(x)),
            RuleInstance::Identity { x } => write!(fm, "identity x={}", r(x)),
            RuleInstance::Linearity { f, g, a, b, x } => {
                write!(fm, "linearity f={f} g={g} a={} b={} x={}", r(a), r(b), r(x))
            }
            RuleInstance::Leibniz { f, g, x } => write!(fm, "leibniz f={f} g={g} x={}", r(x)),
            RuleInstance::Chain { f, g, x } => write!(fm, "chain f={f} g={g} x={}", r(x)),
            RuleInstance::Power { n, x } => write!(fm, "power n={n} x={}", r(x)),
            RuleInstance::Reciprocal { f, x } => write!(fm, "reciprocal f={f} x={}", r(x)),
            RuleInstance::InverseAffine { a, b, x } => {
                write!(fm, "inverse_affine a={} b={} x={}", r(a), r(b), r(x))
            }
            RuleInstance::MixedSymmetry { f, i, j, x } => {
                let x: Vec<String> = x.iter().map(r).collect();
                write!(fm, "mixed_symmetry f={f} i={i} j={j} x=({})", x.join(","))
            }
            RuleInstance::Cancellation { b1, b2 } => {
                write!(fm, "cancellation b1={} b2={}", r(b1), r(b2))
            }
        }
    }
}

/// Both sides of a rule, evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluates both sides of the rule at the instance. A failed precondition
/// is an [`CalculusError::InstanceRejected`], not a failing verdict.
pub fn check_rule(instance: &RuleInstance) -> Result<Verdict, CalculusError> {
    let x0 = Expr::var(0);
    let at = |f: &Expr, x: &Rational| -> Result<Rational, CalculusError> {
        Ok(evaluate(f, &Exact, std::slice::from_ref(x))?)
    };
    let verdict = |lhs, rhs| Ok(Verdict { lhs, rhs });
    match instance {
        RuleInstance::Constant { c, x } => {
            verdict(derivative(&Expr::Const(c.clone()), x)?, Rational::zero())
        }
        RuleInstance::Identity { x } => verdict(derivative(&x0, x)?, Rational::one()),
        RuleInstance::Linearity { f, g, a, b, x } => {
            let combo = Expr::add(
                Expr::mul(Expr::Const(a.clone()), f.clone()),
                Expr::mul(Expr::Const(b.clone()), g.clone()),
            );
            let rhs = a * derivative(f, x)? + b * derivative(g, x)?;
            verdict(derivative(&combo, x)?, rhs)
        }
        RuleInstance::Leibniz { f, g, x } => {
            let product = Expr::mul(f.clone(), g.clone());
            let rhs = derivative(f, x)? * at(g, x)? + at(f, x)? * derivative(g, x)?;
            verdict(derivative(&product, x)?, rhs)
        }
        RuleInstance::Chain { f, g, x } => {
            let composed = Expr::compose(f.clone(), vec![g.clone()]);
            let rhs = derivative(f, &at(g, x)?)? * derivative(g, x)?;
            verdict(derivative(&composed, x)?, rhs)
        }
        RuleInstance::Power { n, x } => {
            let rhs = if *n == 0 {
                Rational::zero()
            } else {
                rational::int(i64::from(*n)) * num_traits::pow(x.clone(), (*n - 1) as usize)
            };
            verdict(derivative(&Expr::pow(x0, *n), x)?, rhs)
        }
        RuleInstance::Reciprocal { f, x } => {
            let fx = at(f, x)?;
            if fx.is_zero() {
                return Err(CalculusError::InstanceRejected(format!(
                    "f vanishes at x = {}",
                    rational::format(x)
                )));
            }
            let reciprocal = Expr::div(Expr::int(1), f.clone());
            let rhs = -derivative(f, x)? / (&fx * &fx);
            verdict(derivative(&reciprocal, x)?, rhs)
        }
        RuleInstance::InverseAffine { a, b, x } => {
            if a.is_zero() {
                return Err(CalculusError::InstanceRejected(
                    "affine map with zero slope is not invertible".into(),
                ));
            }
            let f = Expr::add(
                Expr::mul(Expr::Const(a.clone()), x0.clone()),
                Expr::Const(b.clone()),
            );
            let f_inv = Expr::mul(
                Expr::Const(a.recip()),
                Expr::sub(x0.clone(), Expr::Const(b.clone())),
            );
            let y = at(&f_inv, x)?;
            if at(&f, &y)? != *x {
                return Err(CalculusError::IdentityViolation(
                    "constructed inverse does not invert f".into(),
                ));
            }
            let slope = derivative(&f, &y)?;
            if slope.is_zero() {
                return Err(CalculusError::InstanceRejected(
                    "(∂f)∘f⁻¹ is not a unit".into(),
                ));
            }
            verdict(derivative(&f_inv, x)?, slope.recip())
        }
        RuleInstance::MixedSymmetry { f, i, j, x } => {
            // ∂_i∂_j applies ∂_j first
            let lhs = iterated_partial(f, &[*j, *i], x)?;
            let rhs = iterated_partial(f, &[*i, *j], x)?;
            verdict(lhs, rhs)
        }
        RuleInstance::Cancellation { b1, b2 } => {
            let shape = Shape::new([1]);
            let d = WeilElement::generator(&shape, 0)?;
            let p = d.scale(b1);
            let q = d.scale(b2);
            if (p == q) != (b1 == b2) {
                return verdict(Rational::zero(), Rational::one());
            }
            let recovered = p.coefficient_along(0, 1)?.constant_term().clone();
            verdict(recovered, b1.clone())
        }
    }
}

fn check_arity(f: &Expr, provided: usize) -> Result<(), CalculusError> {
    let needed = f.arity();
    if needed > provided {
        return Err(ArityError {
            expected: needed,
            found: provided,
        }
        .into());
    }
    Ok(())
}

fn check_orders(x: &[Rational], k: &MultiIndex) -> Result<(), CalculusError> {
    if k.arity() != x.len() {
        return Err(ArityError {
            expected: x.len(),
            found: k.arity(),
        }
        .into());
    }
    Ok(())
}
