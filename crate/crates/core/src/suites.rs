//! Named identity suites.
//!
//! Each suite draws seeded random instances and checks one identity
//! exactly. Suite ids are stable and are the names accepted by the `check`
//! command.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::calculus::{
    check_rule, derivative, expand, expand_sum_of_d, iterated_partial, kl_decompose,
    kl_reconstruct, mixed_derivative, nth_derivative, taylor_box, taylor_simplex,
    taylor_squarefree, RuleInstance,
};
use crate::corpus;
use crate::expr::{evaluate, Exact, Expr};
use crate::multiindex::MultiIndex;
use crate::oracle::{oracle_mixed, poly_partial, to_poly};
use crate::rational::{self, int, Rational};
use crate::weil::{factorial_rational, Shape, WeilElement};

type Outcome = Result<(), String>;

/// Largest order `m` exercised by the one-variable expansion suites.
pub const MAX_ONE_VARIABLE_ORDER: u32 = 4;

pub struct Suite {
    pub id: &'static str,
    pub summary: &'static str,
    run: fn(&mut ChaCha8Rng, usize) -> Outcome,
}

/// Result of running one suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: String,
    pub instances: usize,
    pub passed: usize,
    /// Description of the lowest-numbered failing instance.
    pub first_failure: Option<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.passed == self.instances
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "instances": self.instances,
            "passed": self.passed,
            "first_failure": self.first_failure,
        })
    }
}

pub const SUITES: &[Suite] = &[
    Suite {
        id: "lemma-3.1.2",
        summary: "0 lies in every D_m",
        run: zero_in_dm,
    },
    Suite {
        id: "lemma-3.1.3",
        summary: "D_m absorbs products with arbitrary elements",
        run: dm_absorbs,
    },
    Suite {
        id: "lemma-3.1.4",
        summary: "D_m is contained in D_l for m <= l",
        run: dm_nested,
    },
    Suite {
        id: "lemma-3.1.5",
        summary: "(x + y)^2 = 2xy for x, y in D",
        run: square_of_sum,
    },
    Suite {
        id: "lemma-3.1.6",
        summary: "(x + y)^(m+1) = (m+1) x y^m + y^(m+1) for x in D",
        run: binomial_with_nilsquare,
    },
    Suite {
        id: "lemma-3.1.7",
        summary: "a sum of k elements of D has vanishing (k+1)-th power",
        run: sum_power_vanishes,
    },
    Suite {
        id: "lemma-3.1.8",
        summary: "the k-th power of a sum of k elements of D is k! times their product",
        run: sum_power_product,
    },
    Suite {
        id: "thm-4.1.4",
        summary: "f(x + d) = f(x) + f'(x) d on D, with unique slope",
        run: first_order,
    },
    Suite {
        id: "prop-4.1.3",
        summary: "cancellation of a universally quantified d in D",
        run: cancellation,
    },
    Suite {
        id: "lemma-4.1.5",
        summary:
            "constant, identity, linearity, Leibniz, chain, power, reciprocal and inverse rules",
        run: rules,
    },
    Suite {
        id: "lemma-4.1.6",
        summary: "second-order expansion on D + D",
        run: d_plus_d,
    },
    Suite {
        id: "prop-4.2.1",
        summary: "second-order expansion on D_2",
        run: second_order_d2,
    },
    Suite {
        id: "prop-4.2.2",
        summary: "order-m expansion on a sum of m copies of D",
        run: sum_of_m_copies,
    },
    Suite {
        id: "thm-4.2.3",
        summary: "order-m expansion on D_m",
        run: one_variable_taylor,
    },
    Suite {
        id: "thm-5.1.3",
        summary: "first-order expansion in one coordinate",
        run: partial_first_order,
    },
    Suite {
        id: "prop-5.1.4",
        summary: "symmetry of mixed partial derivatives",
        run: mixed_symmetry,
    },
    Suite {
        id: "thm-5.2.1",
        summary: "square-free multivariate expansion",
        run: squarefree,
    },
    Suite {
        id: "prop-5.2.3",
        summary: "Taylor expansion over the box alpha <= k",
        run: box_taylor,
    },
    Suite {
        id: "thm-5.2.4",
        summary: "Taylor expansion over the simplex |alpha| <= |k|",
        run: simplex_taylor,
    },
];

pub fn find(id: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.id == id)
}

impl Suite {
    /// Runs `instances` independent instances. Results do not depend on
    /// thread scheduling.
    pub fn run(&self, instances: usize, seed: u64) -> SuiteReport {
        let outcomes: Vec<Outcome> = (0..instances)
            .into_par_iter()
            .map(|i| {
                let mut rng = corpus::instance_rng(seed, self.id, i);
                (self.run)(&mut rng, i)
            })
            .collect();
        let passed = outcomes.iter().filter(|o| o.is_ok()).count();
        let first_failure = outcomes
            .iter()
            .enumerate()
            .find_map(|(i, o)| o.as_ref().err().map(|msg| format!("instance {i}: {msg}")));
        SuiteReport {
            name: self.id.to_string(),
            instances,
            passed,
            first_failure,
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn fmt_point(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(rational::format).collect();
    format!("({})", parts.join(","))
}

fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    let n = rng.gen_range(0..=3);
    Shape::new(corpus::orders(rng, n, 3))
}

fn random_nonflat_shape(rng: &mut ChaCha8Rng) -> Shape {
    loop {
        let s = random_shape(rng);
        if s.orders().norm() > 0 {
            return s;
        }
    }
}

/// `Σ_i b_i` with `b_i = d_i · r_i` for random units `r_i`, each in D, in the square-free algebra
/// with `generators` generators; returns the sum and the product `Π b_i`
/// over the first `k`.
fn sum_and_product(
    rng: &mut ChaCha8Rng,
    k: usize,
    generators: usize,
) -> (WeilElement, WeilElement) {
    let shape = Shape::square_free(generators);
    let mut sum = WeilElement::zero(&shape);
    let mut product = WeilElement::one(&shape);
    for i in 0..k {
        let d = WeilElement::generator(&shape, i).expect("square-free generator");
        let r = corpus::sparse_unit(rng, &shape, 0.1);
        let b = &d * &r;
        sum = &sum + &b;
        product = &product * &b;
    }
    (sum, product)
}

// -- nilpotent identities ---------------------------------------------------

fn zero_in_dm(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let shape = random_shape(rng);
    let m = rng.gen_range(0..=5);
    ensure(WeilElement::zero(&shape).is_in_dm(m), || {
        format!("0 not in D_{m} over {shape:?}")
    })
}

fn dm_absorbs(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let shape = random_nonflat_shape(rng);
    let a = corpus::nilpotent(rng, &shape);
    let b = corpus::element(rng, &shape);
    let m = a
        .nilpotency_order()
        .ok_or("nilpotent element has no order")?;
    ensure((&a * &b).is_in_dm(m) && (&b * &a).is_in_dm(m), || {
        format!("a = {a} in D_{m} but a*b not, b = {b}")
    })
}

fn dm_nested(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let shape = random_nonflat_shape(rng);
    let a = corpus::nilpotent(rng, &shape);
    let m = a
        .nilpotency_order()
        .ok_or("nilpotent element has no order")?;
    for l in m..=m + 5 {
        ensure(a.is_in_dm(l), || {
            format!("a = {a} in D_{m} but not in D_{l}")
        })?;
    }
    if m > 0 {
        ensure(!a.is_in_dm(m - 1), || {
            format!("order of {a} is not minimal")
        })?;
    }
    Ok(())
}

fn square_of_sum(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let n = rng.gen_range(2..=4);
    let shape = Shape::square_free(n);
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    let x = &WeilElement::generator(&shape, i).map_err(err)? * &corpus::element(rng, &shape);
    let y = &WeilElement::generator(&shape, j).map_err(err)? * &corpus::element(rng, &shape);
    ensure(x.is_in_dm(1) && y.is_in_dm(1), || {
        "test elements not in D".into()
    })?;
    let lhs = (&x + &y).pow(2);
    let rhs = (&x * &y).scale(&int(2));
    ensure(lhs == rhs, || format!("x = {x}, y = {y}: {lhs} != {rhs}"))
}

fn binomial_with_nilsquare(rng: &mut ChaCha8Rng, index: usize) -> Outcome {
    let mut orders = vec![1];
    orders.extend((0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..=3)));
    let shape = Shape::new(orders);
    let x = &WeilElement::generator(&shape, 0).map_err(err)? * &corpus::element(rng, &shape);
    let y = corpus::element(rng, &shape);
    let m = (index % 6) as u32;
    let lhs = (&x + &y).pow(m + 1);
    let rhs = &(&x * &y.pow(m)).scale(&int(i64::from(m) + 1)) + &y.pow(m + 1);
    ensure(lhs == rhs, || format!("m = {m}, x = {x}, y = {y}"))
}

fn sum_power_vanishes(rng: &mut ChaCha8Rng, index: usize) -> Outcome {
    let k = index % 7;
    let extra = rng.gen_range(0..=2);
    let (sum, _) = sum_and_product(rng, k, k + extra);
    ensure(sum.pow(k as u32 + 1).is_zero(), || {
        format!("k = {k}, sum = {sum}")
    })
}

fn sum_power_product(rng: &mut ChaCha8Rng, index: usize) -> Outcome {
    let k = index % 7;
    let extra = rng.gen_range(0..=2);
    let (sum, product) = sum_and_product(rng, k, k + extra);
    let lhs = sum.pow(k as u32);
    let rhs = product.scale(&factorial_rational(k as u32));
    ensure(lhs == rhs, || {
        format!("k = {k}, sum = {sum}: {lhs} != {rhs}")
    })
}

// -- one variable ------------------------------------------------------------

/// `∂ⁿf(x)` for `n ≤ m` from the symbolic oracle.
fn oracle_derivs(f: &Expr, x: &Rational, m: u32) -> Result<Vec<Rational>, String> {
    (0..=m)
        .map(|n| oracle_mixed(f, &MultiIndex::new(vec![n]), std::slice::from_ref(x)).map_err(err))
        .collect()
}

/// `Σ_n derivs[n] δⁿ / n!`.
fn taylor_sum(delta: &WeilElement, derivs: &[Rational]) -> WeilElement {
    let mut sum = WeilElement::zero(delta.shape());
    for (n, dn) in derivs.iter().enumerate() {
        let scale = dn / factorial_rational(n as u32);
        sum = &sum + &delta.pow(n as u32).scale(&scale);
    }
    sum
}

/// `Σ d_i`; a generator of order 0 is the zero element (`D_0 = {0}`).
fn sum_of_generators(shape: &Shape) -> WeilElement {
    let mut delta = WeilElement::zero(shape);
    for i in 0..shape.arity() {
        if let Ok(d) = WeilElement::generator(shape, i) {
            delta = &delta + &d;
        }
    }
    delta
}

/// Checks `f(x + δ) = Σ_{n≤m} ∂ⁿf(x) δⁿ/n!` where `δ` is the sum of the
/// generators of `shape`.
fn expansion_on(shape: &Shape, f: &Expr, x: &Rational, m: u32) -> Outcome {
    let derivs = oracle_derivs(f, x, m)?;
    let delta = sum_of_generators(shape);
    let point = &WeilElement::constant(shape, x.clone()) + &delta;
    let lhs = evaluate(f, shape, &[point]).map_err(err)?;
    let rhs = taylor_sum(&delta, &derivs);
    ensure(lhs == rhs, || {
        format!(
            "f = {f}, x = {}, over {shape:?}: {lhs} != {rhs}",
            rational::format(x)
        )
    })
}

fn first_order(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let f = corpus::polynomial(rng, 1);
    let x = corpus::rational(rng);
    expansion_on(&Shape::new([1]), &f, &x, 1)?;
    let slope = derivative(&f, &x).map_err(err)?;
    let (g0, b) = kl_decompose(
        &Expr::compose(
            f.clone(),
            vec![Expr::add(Expr::Const(x.clone()), Expr::var(0))],
        ),
        1,
    )
    .map_err(err)?;
    ensure(b == [slope.clone()], || {
        format!("f = {f}: slope witness {b:?} vs {slope}")
    })?;
    let perturbed = kl_reconstruct(&g0, &[&slope + int(1)]);
    ensure(perturbed != kl_reconstruct(&g0, &b), || {
        "slope witness is not unique".into()
    })
}

fn cancellation(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let b1 = corpus::rational(rng);
    let b2 = if rng.gen_bool(0.5) {
        b1.clone()
    } else {
        corpus::rational(rng)
    };
    let inst = RuleInstance::Cancellation { b1, b2 };
    let v = check_rule(&inst).map_err(err)?;
    ensure(v.passed(), || format!("{inst}"))
}

fn rules(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let x = corpus::rational(rng);
    let f = corpus::polynomial(rng, 1);
    let g = corpus::function(rng, 1);
    let mut reciprocal_base = corpus::function(rng, 1);
    while evaluate(&reciprocal_base, &Exact, std::slice::from_ref(&x))
        .map_err(err)?
        .is_zero()
    {
        reciprocal_base = corpus::function(rng, 1);
    }
    let instances = [
        RuleInstance::Constant {
            c: corpus::rational(rng),
            x: x.clone(),
        },
        RuleInstance::Identity { x: x.clone() },
        RuleInstance::Linearity {
            f: f.clone(),
            g: g.clone(),
            a: corpus::rational(rng),
            b: corpus::rational(rng),
            x: x.clone(),
        },
        RuleInstance::Leibniz {
            f: f.clone(),
            g: g.clone(),
            x: x.clone(),
        },
        RuleInstance::Chain {
            f: g.clone(),
            g: f.clone(),
            x: x.clone(),
        },
        RuleInstance::Power {
            n: rng.gen_range(0..=8),
            x: x.clone(),
        },
        RuleInstance::Reciprocal {
            f: reciprocal_base,
            x: x.clone(),
        },
        RuleInstance::InverseAffine {
            a: corpus::nonzero_rational(rng),
            b: corpus::rational(rng),
            x,
        },
    ];
    for inst in &instances {
        let v = check_rule(inst).map_err(|e| format!("{inst}: {e}"))?;
        ensure(v.passed(), || {
            format!(
                "{inst}: {} != {}",
                rational::format(&v.lhs),
                rational::format(&v.rhs)
            )
        })?;
    }
    Ok(())
}

fn d_plus_d(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let f = corpus::polynomial(rng, 1);
    let x = corpus::rational(rng);
    expansion_on(&Shape::square_free(2), &f, &x, 2)
}

fn second_order_d2(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let f = corpus::polynomial(rng, 1);
    let x = corpus::rational(rng);
    expansion_on(&Shape::new([2]), &f, &x, 2)
}

fn sum_of_m_copies(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let f = corpus::polynomial(rng, 1);
    let x = corpus::rational(rng);
    for m in 0..=MAX_ONE_VARIABLE_ORDER {
        expansion_on(&Shape::square_free(m as usize), &f, &x, m)?;
        let derivs = expand_sum_of_d(&f, &x, m).map_err(err)?;
        let expected = oracle_derivs(&f, &x, m)?;
        ensure(derivs == expected, || {
            format!("f = {f}, m = {m}: {derivs:?} vs oracle {expected:?}")
        })?;
    }
    Ok(())
}

fn one_variable_taylor(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let f = corpus::polynomial(rng, 1);
    let x = corpus::rational(rng);
    for m in 0..=MAX_ONE_VARIABLE_ORDER {
        expansion_on(&Shape::new([m]), &f, &x, m)?;
    }
    // coefficient extraction on D_n against n applications of ∂
    for n in 0..=MAX_ONE_VARIABLE_ORDER {
        let direct = nth_derivative(&f, n, &x).map_err(err)?;
        let repeated =
            iterated_partial(&f, &vec![0; n as usize], std::slice::from_ref(&x)).map_err(err)?;
        ensure(direct == repeated, || {
            format!("f = {f}, n = {n}: {direct} vs {repeated}")
        })?;
    }
    Ok(())
}

// -- several variables ---------------------------------------------------------

fn partial_first_order(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let n = rng.gen_range(1..=3);
    let f = corpus::polynomial(rng, n);
    let x = corpus::point(rng, n);
    let i = rng.gen_range(0..n);
    let k = MultiIndex::unit(n, i);
    let shape = Shape::new(k.clone());
    let lhs = expand(&f, &x, &k).map_err(err)?;
    let slope = oracle_mixed(&f, &k, &x).map_err(err)?;
    let fx = evaluate(&f, &Exact, &x).map_err(err)?;
    let d = WeilElement::generator(&shape, i).map_err(err)?;
    let rhs = &WeilElement::constant(&shape, fx) + &d.scale(&slope);
    ensure(lhs == rhs, || {
        format!("f = {f}, i = {i}, x = {}", fmt_point(&x))
    })
}

fn mixed_symmetry(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let n = rng.gen_range(1..=3);
    let f = corpus::polynomial(rng, n);
    let x = corpus::point(rng, n);
    let i = rng.gen_range(0..n);
    let j = rng.gen_range(0..n);
    let inst = RuleInstance::MixedSymmetry {
        f: f.clone(),
        i,
        j,
        x: x.clone(),
    };
    let v = check_rule(&inst).map_err(err)?;
    ensure(v.passed(), || format!("{inst}: jet side disagrees"))?;
    let p = to_poly(&f).map_err(err)?;
    let ij = poly_partial(&poly_partial(&p, j), i);
    let ji = poly_partial(&poly_partial(&p, i), j);
    ensure(ij == ji, || format!("{inst}: oracle side disagrees"))?;
    let mut alpha = vec![0u32; n];
    alpha[i] += 1;
    alpha[j] += 1;
    let expected = oracle_mixed(&f, &alpha.into(), &x).map_err(err)?;
    ensure(v.lhs == expected, || {
        format!("{inst}: jet {} vs oracle {}", v.lhs, expected)
    })
}

fn squarefree(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let n = rng.gen_range(0..=4);
    let f = corpus::polynomial(rng, n);
    let x = corpus::point(rng, n);
    for (subset, value) in taylor_squarefree(&f, &x).map_err(err)? {
        let mut alpha = vec![0u32; n];
        for &h in &subset {
            alpha[h] = 1;
        }
        let expected = oracle_mixed(&f, &alpha.into(), &x).map_err(err)?;
        ensure(value == expected, || {
            format!(
                "f = {f}, x = {}, H = {subset:?}: {value} vs {expected}",
                fmt_point(&x)
            )
        })?;
    }
    Ok(())
}

fn taylor_instance(rng: &mut ChaCha8Rng) -> (Expr, Vec<Rational>, MultiIndex) {
    let n = rng.gen_range(0..=3);
    let f = corpus::function(rng, n);
    let x = corpus::point(rng, n);
    let k = corpus::orders(rng, n, 3);
    (f, x, k)
}

/// Entries agree with the oracle where it applies.
fn entries_match_oracle(f: &Expr, x: &[Rational], entries: &[(MultiIndex, Rational)]) -> Outcome {
    if f.has_division() {
        return Ok(());
    }
    for (alpha, value) in entries {
        let expected = oracle_mixed(f, alpha, x).map_err(err)?;
        ensure(*value == expected, || {
            format!(
                "f = {f}, x = {}, alpha = {alpha}: {value} vs {expected}",
                fmt_point(x)
            )
        })?;
    }
    Ok(())
}

fn box_taylor(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let (f, x, k) = taylor_instance(rng);
    let direct = expand(&f, &x, &k).map_err(err)?;
    let table = taylor_box(&f, &x, &k).map_err(err)?;
    // each ∂[α] recomputed on its own, smaller algebra
    let separate = crate::calculus::DerivTable {
        entries: MultiIndex::enumerate_box(&k)
            .into_iter()
            .map(|a| mixed_derivative(&f, &a, &x).map(|v| (a, v)))
            .collect::<Result<_, _>>()
            .map_err(err)?,
        ..table.clone()
    };
    ensure(table == separate, || {
        format!("f = {f}: single-pass and per-index tables differ")
    })?;
    let rebuilt = separate.reconstruct(&k).map_err(err)?;
    ensure(rebuilt == direct, || {
        format!(
            "f = {f}, x = {}, k = {k}: {direct} != {rebuilt}",
            fmt_point(&x)
        )
    })?;
    entries_match_oracle(&f, &x, &table.entries)
}

fn simplex_taylor(rng: &mut ChaCha8Rng, _: usize) -> Outcome {
    let (f, x, k) = taylor_instance(rng);
    let direct = expand(&f, &x, &k).map_err(err)?;
    let table = taylor_simplex(&f, &x, &k).map_err(err)?;
    let rebuilt = table.reconstruct(&k).map_err(err)?;
    ensure(rebuilt == direct, || {
        format!(
            "f = {f}, x = {}, k = {k}: {direct} != {rebuilt}",
            fmt_point(&x)
        )
    })?;
    entries_match_oracle(&f, &x, &table.entries)
}
