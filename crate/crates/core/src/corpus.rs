//! Seeded random instances: expressions, points, shapes and Weil elements.
//!
//! Everything is driven by a caller-supplied RNG so that a suite run is
//! reproducible from its seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::multiindex::MultiIndex;
use crate::rational::{ratio, Rational};
use crate::weil::{Shape, WeilElement};

/// Upper bound on the total degree of generated polynomials.
pub const MAX_DEGREE: u32 = 8;
/// Maximum tree depth of generated expressions.
pub const MAX_DEPTH: u32 = 5;

/// RNG for instance `index` of the stream named `stream` under `seed`.
///
/// Instances are seeded independently so that they can be evaluated in any
/// order, or in parallel, with identical results.
pub fn instance_rng(seed: u64, stream: &str, index: usize) -> ChaCha8Rng {
    // FNV-1a over the stream name, then splitmix64 to spread the bits
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stream.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let r = rational(rng);
        if r != Rational::from_integer(0.into()) {
            return r;
        }
    }
}

pub fn point<R: Rng>(rng: &mut R, arity: usize) -> Vec<Rational> {
    (0..arity).map(|_| rational(rng)).collect()
}

/// Random orders with each `k_i ≤ max_order`.
pub fn orders<R: Rng>(rng: &mut R, arity: usize, max_order: u32) -> MultiIndex {
    MultiIndex::new(
        (0..arity)
            .map(|_| rng.gen_range(0..=max_order))
            .collect::<Vec<_>>(),
    )
}

/// Degree bound used to reject oversized expressions.
fn degree(e: &Expr) -> u32 {
    match e {
        Expr::Const(_) => 0,
        Expr::Var(_) => 1,
        Expr::Add(a, b) | Expr::Sub(a, b) => degree(a).max(degree(b)),
        Expr::Mul(a, b) | Expr::Div(a, b) => degree(a) + degree(b),
        Expr::Neg(a) => degree(a),
        Expr::Pow(a, m) => degree(a).saturating_mul(*m),
        Expr::Compose(outer, subs) => {
            degree(outer) * subs.iter().map(degree).max().unwrap_or(0).max(1)
        }
    }
}

fn tree<R: Rng>(rng: &mut R, arity: usize, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if arity > 0 && rng.gen_bool(0.65) {
            Expr::var(rng.gen_range(0..arity))
        } else {
            Expr::Const(rational(rng))
        };
    }
    match rng.gen_range(0..9) {
        0 | 1 => Expr::add(tree(rng, arity, depth - 1), tree(rng, arity, depth - 1)),
        2 => Expr::sub(tree(rng, arity, depth - 1), tree(rng, arity, depth - 1)),
        3..=5 => Expr::mul(tree(rng, arity, depth - 1), tree(rng, arity, depth - 1)),
        6 => Expr::neg(tree(rng, arity, depth - 1)),
        _ => Expr::pow(tree(rng, arity, depth - 1), rng.gen_range(0..=3)),
    }
}

/// A division-free expression in `x0..x{arity-1}` of depth at most
/// [`MAX_DEPTH`] and degree at most [`MAX_DEGREE`].
pub fn polynomial<R: Rng>(rng: &mut R, arity: usize) -> Expr {
    loop {
        let e = tree(rng, arity, MAX_DEPTH);
        if degree(&e) <= MAX_DEGREE {
            return e;
        }
    }
}

/// `p / (c + q²)` with `c > 0`, so the denominator has an invertible value
/// at every rational point.
pub fn rational_function<R: Rng>(rng: &mut R, arity: usize) -> Expr {
    loop {
        let p = tree(rng, arity, 3);
        let q = tree(rng, arity, 2);
        let c = Expr::Const(ratio(rng.gen_range(1..=4), rng.gen_range(1..=3)));
        let e = Expr::div(p, Expr::add(c, Expr::pow(q, 2)));
        if degree(&e) <= MAX_DEGREE {
            return e;
        }
    }
}

/// A polynomial three times out of four, otherwise a rational function.
pub fn function<R: Rng>(rng: &mut R, arity: usize) -> Expr {
    if rng.gen_bool(0.75) {
        polynomial(rng, arity)
    } else {
        rational_function(rng, arity)
    }
}

pub fn element<R: Rng>(rng: &mut R, shape: &Shape) -> WeilElement {
    let coeffs = (0..shape.len()).map(|_| rational(rng)).collect();
    WeilElement::from_coeffs(shape, coeffs).expect("length matches shape")
}

/// An element with a nonzero constant term and each other coefficient
/// nonzero with probability `density`.
pub fn sparse_unit<R: Rng>(rng: &mut R, shape: &Shape, density: f64) -> WeilElement {
    let mut coeffs: Vec<Rational> = (0..shape.len())
        .map(|_| {
            if rng.gen_bool(density) {
                rational(rng)
            } else {
                Rational::from_integer(0.into())
            }
        })
        .collect();
    coeffs[0] = nonzero_rational(rng);
    WeilElement::from_coeffs(shape, coeffs).expect("length matches shape")
}

/// An element with zero constant term.
pub fn nilpotent<R: Rng>(rng: &mut R, shape: &Shape) -> WeilElement {
    let mut coeffs: Vec<Rational> = (0..shape.len()).map(|_| rational(rng)).collect();
    coeffs[0] = Rational::from_integer(0.into());
    WeilElement::from_coeffs(shape, coeffs).expect("length matches shape")
}
