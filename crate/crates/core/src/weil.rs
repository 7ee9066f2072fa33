//! Truncated multivariate polynomial algebras
//! `W(k) = ℚ[d₀,…,d_{n−1}] / ⟨d_i^{k_i+1}⟩`.
//!
//! An element of `W(k)` is a value together with its infinitesimal
//! corrections along the neighborhood `D_{k₀} × … × D_{k_{n−1}}`, where
//! `D_m = {r : r^{m+1} = 0}`. Coefficients are stored densely, one per
//! multi-index `α ≤ k`, in the colexicographic order of
//! [`MultiIndex::enumerate_box`]. The linear position of `α` is the
//! mixed-radix number `Σ_i α_i · Π_{j<i} (k_j + 1)`.
//!
//! ```
//! use weiljet::rational::int;
//! use weiljet::weil::{Shape, WeilElement};
//!
//! let shape = Shape::new([1, 1]);
//! let d0 = WeilElement::generator(&shape, 0).unwrap();
//! let d1 = WeilElement::generator(&shape, 1).unwrap();
//! // (d0 + d1)^2 = 2 d0 d1 when d0^2 = d1^2 = 0
//! let sq = (&d0 + &d1).pow(2);
//! assert_eq!(sq, &(&d0 * &d1) * &int(2));
//! ```

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::WeilError;
use crate::multiindex::MultiIndex;
use crate::rational::{self, Rational};

/// Truncation orders `k`, with the precomputed dense layout.
#[derive(Clone)]
pub struct Shape {
    orders: MultiIndex,
    layout: Arc<Layout>,
}

struct Layout {
    strides: Vec<usize>,
    indices: Vec<MultiIndex>,
}

impl Shape {
    pub fn new(orders: impl Into<MultiIndex>) -> Self {
        let orders = orders.into();
        let mut strides = Vec::with_capacity(orders.arity());
        let mut stride = 1;
        for &k in orders.parts() {
            strides.push(stride);
            stride *= k as usize + 1;
        }
        let indices = MultiIndex::enumerate_box(&orders);
        Shape {
            orders,
            layout: Arc::new(Layout { strides, indices }),
        }
    }

    /// `(1, …, 1)`: every generator squares to zero.
    pub fn square_free(arity: usize) -> Self {
        Shape::new(vec![1; arity])
    }

    pub fn orders(&self) -> &MultiIndex {
        &self.orders
    }

    pub fn arity(&self) -> usize {
        self.orders.arity()
    }

    /// Number of coefficients, `Π (k_i + 1)`.
    pub fn len(&self) -> usize {
        self.layout.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-indices in storage order.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.layout.indices
    }

    /// Storage position of `α`, or `None` when `α ≰ k`.
    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        if alpha.arity() != self.arity() {
            return None;
        }
        let mut pos = 0;
        for ((&a, &k), &s) in alpha
            .parts()
            .iter()
            .zip(self.orders.parts())
            .zip(&self.layout.strides)
        {
            if a > k {
                return None;
            }
            pos += a as usize * s;
        }
        Some(pos)
    }

    /// Same shape with `k_var` replaced by `order`.
    pub fn with_order(&self, var: usize, order: u32) -> Shape {
        let mut parts = self.orders.parts().to_vec();
        parts[var] = order;
        Shape::new(parts)
    }

    fn check_same(&self, other: &Shape) -> Result<(), WeilError> {
        if self == other {
            Ok(())
        } else {
            Err(WeilError::ShapeMismatch {
                left: self.orders.parts().to_vec(),
                right: other.orders.parts().to_vec(),
            })
        }
    }
}

impl PartialEq for Shape {
    fn eq(&self, other: &Self) -> bool {
        self.orders == other.orders
    }
}

impl Eq for Shape {}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Shape{}", self.orders)
    }
}

/// An element of `W(k)`.
#[derive(Clone, PartialEq, Eq)]
pub struct WeilElement {
    shape: Shape,
    coeffs: Vec<Rational>,
}

impl WeilElement {
    pub fn constant(shape: &Shape, c: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); shape.len()];
        coeffs[0] = c;
        WeilElement {
            shape: shape.clone(),
            coeffs,
        }
    }

    pub fn zero(shape: &Shape) -> Self {
        Self::constant(shape, Rational::zero())
    }

    pub fn one(shape: &Shape) -> Self {
        Self::constant(shape, Rational::one())
    }

    /// The generator `d_i`, an element of `D_{k_i}`.
    pub fn generator(shape: &Shape, i: usize) -> Result<Self, WeilError> {
        if i >= shape.arity() {
            return Err(WeilError::IndexOutOfRange {
                index: i,
                arity: shape.arity(),
            });
        }
        if shape.orders().parts()[i] == 0 {
            return Err(WeilError::DegenerateGenerator { index: i });
        }
        Self::monomial(shape, &MultiIndex::unit(shape.arity(), i), Rational::one())
    }

    /// `c · d^α`.
    pub fn monomial(shape: &Shape, alpha: &MultiIndex, c: Rational) -> Result<Self, WeilError> {
        let pos = shape.position(alpha).ok_or_else(|| outside(shape, alpha))?;
        let mut out = Self::zero(shape);
        out.coeffs[pos] = c;
        Ok(out)
    }

    /// Builds an element from coefficients in storage order.
    pub fn from_coeffs(shape: &Shape, coeffs: Vec<Rational>) -> Result<Self, WeilError> {
        if coeffs.len() != shape.len() {
            return Err(WeilError::Arity(crate::error::ArityError {
                expected: shape.len(),
                found: coeffs.len(),
            }));
        }
        Ok(WeilElement {
            shape: shape.clone(),
            coeffs,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Coefficients in storage order.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Result<&Rational, WeilError> {
        self.shape
            .position(alpha)
            .map(|p| &self.coeffs[p])
            .ok_or_else(|| outside(&self.shape, alpha))
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero terms `(α, c_α)` in storage order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.shape
            .indices()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, WeilError> {
        self.shape.check_same(&other.shape)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, WeilError> {
        self.shape.check_same(&other.shape)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// Truncated product: `c_γ(ab) = Σ_{α+β=γ} c_α(a) c_β(b)` for `γ ≤ k`.
    pub fn try_mul(&self, other: &Self) -> Result<Self, WeilError> {
        self.shape.check_same(&other.shape)?;
        let indices = self.shape.indices();
        let orders = self.shape.orders().parts();
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        let rhs: Vec<(usize, &Rational)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let alpha = indices[i].parts();
            for &(j, b) in &rhs {
                let beta = indices[j].parts();
                let fits = alpha
                    .iter()
                    .zip(beta)
                    .zip(orders)
                    .all(|((x, y), k)| x + y <= *k);
                if fits {
                    // mixed-radix positions add when no digit overflows
                    out[i + j] += a * b;
                }
            }
        }
        Ok(WeilElement {
            shape: self.shape.clone(),
            coeffs: out,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        WeilElement {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// `a^m` by repeated squaring, with `a^0 = 1` (including `0^0 = 1`).
    pub fn pow(&self, m: u32) -> Self {
        let mut result = Self::one(&self.shape);
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiplicative inverse via the finite geometric series.
    ///
    /// Writing `a = c(1 + ε)` with `ε` nilpotent of order at most `|k|`,
    /// `a⁻¹ = c⁻¹ Σ_{j ≤ |k|} (−ε)^j`.
    pub fn invert(&self) -> Result<Self, WeilError> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(WeilError::NotInvertible);
        }
        let c_inv = c.recip();
        let mut neg_eps = self.scale(&-&c_inv);
        neg_eps.coeffs[0] = Rational::zero();
        let mut sum = Self::one(&self.shape);
        let mut term = Self::one(&self.shape);
        for _ in 0..self.shape.orders().norm() {
            term = &term * &neg_eps;
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        Ok(sum.scale(&c_inv))
    }

    /// Membership in `D_m`: `a^{m+1} = 0`.
    pub fn is_in_dm(&self, m: u32) -> bool {
        self.pow(m + 1).is_zero()
    }

    /// Least `m` with `a ∈ D_m`, or `None` when `a` is not nilpotent.
    pub fn nilpotency_order(&self) -> Option<u32> {
        if !self.constant_term().is_zero() {
            return None;
        }
        let mut power = self.clone();
        let mut m = 0;
        while !power.is_zero() {
            power = &power * self;
            m += 1;
        }
        Some(m)
    }

    /// The coefficient of `d_var^power`, as an element of the algebra in
    /// which `d_var` has been removed (its order set to 0).
    ///
    /// For `power = 1` this is the cancellation of one first-order
    /// infinitesimal: if `a = b + c·d_var + …`, the result is `c`.
    pub fn coefficient_along(&self, var: usize, power: u32) -> Result<Self, WeilError> {
        if var >= self.shape.arity() {
            return Err(WeilError::IndexOutOfRange {
                index: var,
                arity: self.shape.arity(),
            });
        }
        let reduced = self.shape.with_order(var, 0);
        let mut coeffs = Vec::with_capacity(reduced.len());
        for alpha in reduced.indices() {
            let mut parts = alpha.parts().to_vec();
            parts[var] = power;
            let c = self
                .coefficient(&MultiIndex::new(parts))
                .cloned()
                .unwrap_or_else(|_| Rational::zero());
            coeffs.push(c);
        }
        Ok(WeilElement {
            shape: reduced,
            coeffs,
        })
    }

    /// Image under the quotient map `W(K) → W(k)` for `k ≤ K`.
    pub fn truncate(&self, target: &Shape) -> Result<Self, WeilError> {
        let fits = target.arity() == self.shape.arity()
            && target.orders().leq(self.shape.orders()).unwrap_or(false);
        if !fits {
            return Err(WeilError::ShapeMismatch {
                left: self.shape.orders().parts().to_vec(),
                right: target.orders().parts().to_vec(),
            });
        }
        let coeffs = target
            .indices()
            .iter()
            .map(|alpha| self.coefficient(alpha).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WeilElement {
            shape: target.clone(),
            coeffs,
        })
    }

    /// `{"orders": [...], "coeffs": [{"alpha": [...], "num": "...", "den": "..."}]}`,
    /// nonzero coefficients only, in storage order.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .terms()
            .map(|(alpha, c)| {
                json!({
                    "alpha": alpha.to_json(),
                    "num": c.numer().to_string(),
                    "den": c.denom().to_string(),
                })
            })
            .collect();
        json!({ "orders": self.shape.orders().to_json(), "coeffs": coeffs })
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let shape = Shape::new(MultiIndex::from_json(v.get("orders")?)?);
        let mut out = Self::zero(&shape);
        for term in v.get("coeffs")?.as_array()? {
            let alpha = MultiIndex::from_json(term.get("alpha")?)?;
            let c = rational::from_json(term)?;
            let pos = shape.position(&alpha)?;
            out.coeffs[pos] = c;
        }
        Some(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        WeilElement {
            shape: self.shape.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

fn outside(shape: &Shape, alpha: &MultiIndex) -> WeilError {
    WeilError::OutsideBox {
        alpha: alpha.parts().to_vec(),
        orders: shape.orders().parts().to_vec(),
    }
}

// Operator forms panic on shape mismatch; use the `try_*` methods when the
// shapes are not known to agree.

impl Add for &WeilElement {
    type Output = WeilElement;
    fn add(self, rhs: &WeilElement) -> WeilElement {
        self.try_add(rhs)
            .expect("shape mismatch in WeilElement addition")
    }
}

impl Sub for &WeilElement {
    type Output = WeilElement;
    fn sub(self, rhs: &WeilElement) -> WeilElement {
        self.try_sub(rhs)
            .expect("shape mismatch in WeilElement subtraction")
    }
}

impl Mul for &WeilElement {
    type Output = WeilElement;
    fn mul(self, rhs: &WeilElement) -> WeilElement {
        self.try_mul(rhs)
            .expect("shape mismatch in WeilElement product")
    }
}

impl Mul<&Rational> for &WeilElement {
    type Output = WeilElement;
    fn mul(self, rhs: &Rational) -> WeilElement {
        self.scale(rhs)
    }
}

impl Neg for &WeilElement {
    type Output = WeilElement;
    fn neg(self) -> WeilElement {
        WeilElement {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Terms in storage order, e.g. `1 - d0 + 3/2*d0^2*d1`; unit coefficients
/// are left out except on the constant term.
impl fmt::Display for WeilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (alpha, c) in self.terms() {
            let magnitude = c.abs();
            match (first, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let mut monomial = Vec::new();
            for (i, &a) in alpha.parts().iter().enumerate() {
                match a {
                    0 => {}
                    1 => monomial.push(format!("d{i}")),
                    _ => monomial.push(format!("d{i}^{a}")),
                }
            }
            if monomial.is_empty() {
                write!(f, "{}", rational::format(&magnitude))?;
            } else if magnitude.is_one() {
                write!(f, "{}", monomial.join("*"))?;
            } else {
                write!(f, "{}*{}", rational::format(&magnitude), monomial.join("*"))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for WeilElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in W{}", self, self.shape.orders())
    }
}

/// `n!` as a rational.
pub fn factorial_rational(n: u32) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |acc, j| acc * j))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;

    use super::*;
    use crate::rational::{int, ratio};

    fn gen(shape: &Shape, i: usize) -> WeilElement {
        WeilElement::generator(shape, i).unwrap()
    }

    fn c(shape: &Shape, v: i64) -> WeilElement {
        WeilElement::constant(shape, int(v))
    }

    #[test]
    fn constants() {
        let s = Shape::new([1]);
        let seven = c(&s, 7);
        assert_eq!(seven.coeffs(), &[int(7), int(0)]);
        let scalar = WeilElement::constant(&Shape::new([]), int(3));
        assert_eq!(scalar.coeffs(), &[int(3)]);
        assert!(c(&Shape::new([2, 1]), 0).is_zero());
    }

    #[test]
    fn generators() {
        let s = Shape::new([1, 1]);
        let d0 = gen(&s, 0);
        assert_eq!(d0.coefficient(&[1, 0].into()).unwrap(), &int(1));
        assert_eq!(d0.terms().count(), 1);

        let s3 = Shape::new([3]);
        let d = gen(&s3, 0);
        assert!(!d.pow(3).is_zero());
        assert!(d.pow(4).is_zero());

        assert_eq!(
            WeilElement::generator(&Shape::new([1, 0]), 1),
            Err(WeilError::DegenerateGenerator { index: 1 })
        );
        assert!(matches!(
            WeilElement::generator(&s, 2),
            Err(WeilError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn ring_operation_examples() {
        let s = Shape::new([1]);
        let d = gen(&s, 0);
        let a = &c(&s, 1) + &(&d * &int(2));
        let b = &c(&s, 3) + &(&d * &int(4));
        assert_eq!(&a * &b, &c(&s, 3) + &(&d * &int(10)));

        let s11 = Shape::new([1, 1]);
        let sum = &gen(&s11, 0) + &gen(&s11, 1);
        let expected = &(&gen(&s11, 0) * &gen(&s11, 1)) * &int(2);
        assert_eq!(&sum * &sum, expected);

        let s2 = Shape::new([2]);
        let d = gen(&s2, 0);
        let lhs = &(&c(&s2, 1) + &d) * &(&c(&s2, 1) - &d);
        assert_eq!(lhs, &c(&s2, 1) - &d.pow(2));
    }

    #[test]
    fn mixed_shapes_are_rejected() {
        let a = c(&Shape::new([1]), 1);
        let b = c(&Shape::new([2]), 1);
        assert!(matches!(
            a.try_add(&b),
            Err(WeilError::ShapeMismatch { .. })
        ));
        assert!(a.try_mul(&b).is_err());
        assert!(a.try_sub(&b).is_err());
    }

    #[test]
    fn pow_examples() {
        let s = Shape::new([1]);
        assert!(gen(&s, 0).pow(2).is_zero());
        assert_eq!(c(&s, 0).pow(0), c(&s, 1));

        let s11 = Shape::new([1, 1]);
        assert!((&gen(&s11, 0) + &gen(&s11, 1)).pow(3).is_zero());

        let s111 = Shape::square_free(3);
        let sum = &(&gen(&s111, 0) + &gen(&s111, 1)) + &gen(&s111, 2);
        let prod = &(&gen(&s111, 0) * &gen(&s111, 1)) * &gen(&s111, 2);
        assert_eq!(sum.pow(3), &prod * &int(6));
    }

    #[test]
    fn invert_examples() {
        let s3 = Shape::new([3]);
        let d = gen(&s3, 0);
        let a = &c(&s3, 1) + &d;
        // geometric series 1 - d + d^2 - d^3, checked by multiplying back
        let geometric = &(&(&c(&s3, 1) - &d) + &d.pow(2)) - &d.pow(3);
        assert_eq!(&a * &geometric, c(&s3, 1));
        assert_eq!(a.invert().unwrap(), geometric);

        let two = c(&Shape::new([1]), 2);
        assert_eq!(
            two.invert().unwrap(),
            WeilElement::constant(&Shape::new([1]), ratio(1, 2))
        );
        assert_eq!(
            gen(&Shape::new([1]), 0).invert(),
            Err(WeilError::NotInvertible)
        );
    }

    #[test]
    fn dm_membership() {
        let s = Shape::new([1]);
        assert!(gen(&s, 0).is_in_dm(1));
        let s11 = Shape::new([1, 1]);
        let sum = &gen(&s11, 0) + &gen(&s11, 1);
        assert!(!sum.is_in_dm(1));
        assert!(sum.is_in_dm(2));
        assert_eq!(sum.nilpotency_order(), Some(2));
        for m in 0..=5 {
            assert!(c(&Shape::new([2, 1]), 0).is_in_dm(m));
        }
    }

    #[test]
    fn coefficient_examples() {
        let s = Shape::new([1]);
        let d = gen(&s, 0);
        let x = &c(&s, 3) + &(&d * &int(10));
        assert_eq!(x.coefficient(&[1].into()).unwrap(), &int(10));
        let s11 = Shape::new([1, 1]);
        let sq = (&gen(&s11, 0) + &gen(&s11, 1)).pow(2);
        assert_eq!(sq.coefficient(&[1, 1].into()).unwrap(), &int(2));
        let s2 = Shape::new([2]);
        let p = (&c(&s2, 1) + &gen(&s2, 0)).pow(2);
        assert_eq!(p.coefficient(&[2].into()).unwrap(), &int(1));
        assert!(matches!(
            p.coefficient(&[3].into()),
            Err(WeilError::OutsideBox { .. })
        ));
    }

    #[test]
    fn coefficient_along_cancels_one_generator() {
        let s = Shape::new([1, 2]);
        let d0 = gen(&s, 0);
        let d1 = gen(&s, 1);
        // 5 + 3 d0 + 7 d0 d1^2
        let a = &(&c(&s, 5) + &(&d0 * &int(3))) + &(&(&d0 * &d1.pow(2)) * &int(7));
        let along = a.coefficient_along(0, 1).unwrap();
        assert_eq!(along.shape(), &Shape::new([0, 2]));
        assert_eq!(along.coefficient(&[0, 0].into()).unwrap(), &int(3));
        assert_eq!(along.coefficient(&[0, 2].into()).unwrap(), &int(7));
    }

    #[test]
    fn json_shape() {
        let s = Shape::new([1]);
        let x = &c(&s, 3) + &(&gen(&s, 0) * &ratio(-1, 2));
        let v = x.to_json();
        assert_eq!(
            v,
            json!({"orders": [1], "coeffs": [
                {"alpha": [0], "num": "3", "den": "1"},
                {"alpha": [1], "num": "-1", "den": "2"},
            ]})
        );
        assert_eq!(WeilElement::from_json(&v), Some(x));
    }

    // -- property tests -------------------------------------------------

    fn shape_strategy() -> impl Strategy<Value = Shape> {
        prop::collection::vec(0u32..=3, 0..=3).prop_map(Shape::new)
    }

    fn element(shape: Shape) -> impl Strategy<Value = WeilElement> {
        let len = shape.len();
        prop::collection::vec((-6i64..=6, 1i64..=3), len).prop_map(move |raw| {
            let coeffs = raw.into_iter().map(|(n, d)| ratio(n, d)).collect();
            WeilElement::from_coeffs(&shape, coeffs).unwrap()
        })
    }

    fn triple() -> impl Strategy<Value = (WeilElement, WeilElement, WeilElement)> {
        shape_strategy().prop_flat_map(|s| (element(s.clone()), element(s.clone()), element(s)))
    }

    /// Untruncated product of two dense coefficient tables, as a sparse map.
    fn naive_full_product(a: &WeilElement, b: &WeilElement) -> BTreeMap<Vec<u32>, Rational> {
        let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (alpha, x) in a.terms() {
            for (beta, y) in b.terms() {
                let gamma: Vec<u32> = alpha
                    .parts()
                    .iter()
                    .zip(beta.parts())
                    .map(|(p, q)| p + q)
                    .collect();
                *out.entry(gamma).or_insert_with(Rational::zero) += x * y;
            }
        }
        out
    }

    fn nilpotent(a: &WeilElement) -> WeilElement {
        let mut n = a.clone();
        n.coeffs[0] = Rational::zero();
        n
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws((a, b, c) in triple()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            let one = WeilElement::one(a.shape());
            let zero = WeilElement::zero(a.shape());
            prop_assert_eq!(&a * &one, a.clone());
            prop_assert_eq!(&a + &zero, a.clone());
            prop_assert!((&a + &(-&a)).is_zero());
        }

        #[test]
        fn truncated_product_matches_full_product((a, b, _c) in triple()) {
            let full = naive_full_product(&a, &b);
            let prod = &a * &b;
            for alpha in a.shape().indices() {
                let expected = full.get(alpha.parts()).cloned().unwrap_or_else(Rational::zero);
                prop_assert_eq!(prod.coefficient(alpha).unwrap(), &expected);
            }
        }

        #[test]
        fn inverse_is_exact((a, _b, _c) in triple()) {
            prop_assume!(!a.constant_term().is_zero());
            let inv = a.invert().unwrap();
            prop_assert_eq!(&a * &inv, WeilElement::one(a.shape()));
        }

        #[test]
        fn dm_absorbs_products((a, b, _c) in triple()) {
            let x = nilpotent(&a);
            let m = x.nilpotency_order().unwrap();
            prop_assert!(x.is_in_dm(m));
            prop_assert!((&x * &b).is_in_dm(m));
            for l in m..=m.max(5) {
                prop_assert!(x.is_in_dm(l));
            }
        }

        #[test]
        fn json_round_trip((a, _b, _c) in triple()) {
            prop_assert_eq!(WeilElement::from_json(&a.to_json()), Some(a));
        }
    }
}
