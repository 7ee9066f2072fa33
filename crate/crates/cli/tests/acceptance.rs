//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness; the process exits nonzero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::Rng;

use weiljet::calculus::mixed_derivative;
use weiljet::corpus;
use weiljet::expr::{evaluate, parse, Exact, Expr};
use weiljet::multiindex::MultiIndex;
use weiljet::oracle::{
    finite_difference, oracle_mixed, within_tolerance, DEFAULT_RTOL, DEFAULT_STEP,
};
use weiljet::rational::{self, int, Rational};
use weiljet::suites::{self, SuiteReport};
use weiljet::weil::{factorial_rational, Shape, WeilElement};

const INSTANCES: usize = 200;
const SEED: u64 = 0;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("nilpotent identities", criterion_1),
        ("one-variable Taylor on D_m", criterion_2),
        ("sum-of-D neighborhoods", criterion_3),
        ("multivariate Taylor, box and simplex", criterion_4),
        ("square-free multivariate form", criterion_5),
        ("mixed-partial symmetry", criterion_6),
        ("differentiation rules", criterion_7),
        ("oracle agreement", criterion_8),
        ("worked example reproduction", criterion_9),
        ("deterministic check output", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS  criterion {:>2}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {:>2}: {name} ({detail})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs the named suites and fails on the first report with a failure.
fn run_suites(ids: &[&str], instances: usize) -> Result<Vec<SuiteReport>, String> {
    let mut reports = Vec::new();
    for id in ids {
        let suite = suites::find(id).ok_or_else(|| format!("no suite {id}"))?;
        let report = suite.run(instances, SEED);
        ensure(report.ok(), || {
            format!(
                "{id}: {}/{} passed, {}",
                report.passed,
                report.instances,
                report.first_failure.clone().unwrap_or_default()
            )
        })?;
        reports.push(report);
    }
    Ok(reports)
}

fn within(limit: Duration, start: Instant) -> Result<String, String> {
    let elapsed = start.elapsed();
    if elapsed < limit {
        Ok(format!(
            "{:.2}s < {}s",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ))
    } else {
        Err(format!(
            "took {:.2}s, limit {}s",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn generators(shape: &Shape) -> Vec<WeilElement> {
    (0..shape.arity())
        .map(|i| WeilElement::generator(shape, i).expect("order 1"))
        .collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut configurations = 0;

    // (x + y)^2 = 2xy for every pair of generators
    for n in 1..=4 {
        let shape = Shape::square_free(n);
        let d = generators(&shape);
        for i in 0..n {
            for j in 0..n {
                let lhs = (&d[i] + &d[j]).pow(2);
                let rhs = (&d[i] * &d[j]).scale(&int(2));
                ensure(lhs == rhs, || format!("(d{i} + d{j})^2 in {n} generators"))?;
                configurations += 1;
            }
        }
    }

    // (x + y)^(m+1) = (m+1) x y^m + y^(m+1) for x = d0 and y every basis
    // monomial of W((1, l)), plus their sum
    for l in 0..=5 {
        let shape = Shape::new([1, l]);
        let x = WeilElement::generator(&shape, 0).map_err(|e| e.to_string())?;
        let mut ys: Vec<WeilElement> = shape
            .indices()
            .iter()
            .map(|a| WeilElement::monomial(&shape, a, int(1)).expect("inside the box"))
            .collect();
        ys.push(ys.iter().fold(WeilElement::zero(&shape), |acc, y| &acc + y));
        for y in &ys {
            for m in 0..=5u32 {
                let lhs = (&x + y).pow(m + 1);
                let rhs = &(&x * &y.pow(m)).scale(&int(i64::from(m) + 1)) + &y.pow(m + 1);
                ensure(lhs == rhs, || format!("x = d0, y = {y}, m = {m}"))?;
                configurations += 1;
            }
        }
    }

    // sums of k first-order generators, with and without a spare generator
    for k in 0..=6usize {
        for spare in 0..=1 {
            let shape = Shape::square_free(k + spare);
            let eps = generators(&shape);
            let sum = eps[..k]
                .iter()
                .fold(WeilElement::zero(&shape), |acc, e| &acc + e);
            let product = eps[..k]
                .iter()
                .fold(WeilElement::one(&shape), |acc, e| &acc * e);
            ensure(sum.pow(k as u32 + 1).is_zero(), || {
                format!("sum of {k} generators, power k+1")
            })?;
            ensure(
                sum.pow(k as u32) == product.scale(&factorial_rational(k as u32)),
                || format!("sum of {k} generators, power k"),
            )?;
            configurations += 2;
        }
    }

    run_suites(
        &["lemma-3.1.5", "lemma-3.1.6", "lemma-3.1.7", "lemma-3.1.8"],
        INSTANCES,
    )?;
    let time = within(Duration::from_secs(5), start)?;
    Ok(format!(
        "{configurations} exhaustive configurations and 4 x {INSTANCES} random instances, 0 failures, {time}"
    ))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    run_suites(&["thm-4.2.3"], INSTANCES)?;
    let time = within(Duration::from_secs(30), start)?;
    Ok(format!(
        "{INSTANCES} functions x m = 0..={} against the symbolic oracle, 0 failures, {time}",
        suites::MAX_ONE_VARIABLE_ORDER
    ))
}

fn criterion_3() -> Verdict {
    run_suites(&["lemma-4.1.6", "prop-4.2.1", "prop-4.2.2"], INSTANCES)?;
    Ok(format!(
        "D+D, D_2 and m-fold sums (m <= 4) on {INSTANCES} instances each, 0 failures"
    ))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    run_suites(&["prop-5.2.3", "thm-5.2.4"], INSTANCES)?;
    let time = within(Duration::from_secs(60), start)?;
    Ok(format!(
        "box and simplex on {INSTANCES} instances each, 0 failures, {time}"
    ))
}

fn criterion_5() -> Verdict {
    run_suites(&["thm-5.2.1"], INSTANCES)?;
    Ok(format!("{INSTANCES} instances with n <= 4, 0 failures"))
}

fn criterion_6() -> Verdict {
    run_suites(&["prop-5.1.4"], INSTANCES)?;
    Ok(format!(
        "jet and oracle sides on {INSTANCES} instances, 0 failures"
    ))
}

fn criterion_7() -> Verdict {
    run_suites(&["lemma-4.1.5", "prop-4.1.3", "thm-4.1.4"], INSTANCES)?;
    Ok(format!("8 rule variants x {INSTANCES} instances, plus cancellation and first-order uniqueness, 0 failures"))
}

// -- oracle agreement ----------------------------------------------------------

/// Sum of absolute values of every intermediate, as if all terms had the
/// same sign; scales the rounding error of a binary64 evaluation.
fn magnitude(e: &Expr, x: &[f64]) -> f64 {
    let value = |e: &Expr| {
        let args: Vec<Rational> = x
            .iter()
            .map(|v| Rational::from_float(*v).expect("finite"))
            .collect();
        rational::to_f64(&evaluate(e, &Exact, &args).expect("evaluable")).abs()
    };
    match e {
        Expr::Const(c) => rational::to_f64(c).abs(),
        Expr::Var(i) => x[*i].abs(),
        Expr::Add(a, b) | Expr::Sub(a, b) => magnitude(a, x) + magnitude(b, x),
        Expr::Mul(a, b) => magnitude(a, x) * magnitude(b, x),
        Expr::Neg(a) => magnitude(a, x),
        Expr::Pow(a, m) => magnitude(a, x).powi(*m as i32),
        Expr::Div(a, b) => {
            let den = value(b);
            magnitude(a, x) / den * (1.0 + magnitude(b, x) / den)
        }
        Expr::Compose(..) => magnitude(&e.flatten(), x),
    }
}

fn node_count(e: &Expr) -> usize {
    match e {
        Expr::Const(_) | Expr::Var(_) => 1,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            1 + node_count(a) + node_count(b)
        }
        Expr::Neg(a) => 1 + node_count(a),
        Expr::Pow(a, m) => 1 + *m as usize + node_count(a),
        Expr::Compose(..) => node_count(&e.flatten()),
    }
}

/// `|∂ᵢʲ f(x)|` for `j = 0..=9`, exactly, then converted.
fn partial_magnitudes(f: &Expr, i: usize, x: &[Rational]) -> Vec<f64> {
    (0..=9)
        .map(|j| {
            let mut alpha = vec![0u32; x.len()];
            alpha[i] = j;
            rational::to_f64(&mixed_derivative(f, &alpha.into(), x).expect("evaluable")).abs()
        })
        .collect()
}

/// Central-difference error estimate at step `h`: the truncation series
/// `Σ_{odd j ≥ 3} h^{j−1} |f^{(j)}| / j!` and the rounding term.
fn fd_error_terms(f: &Expr, x: &[f64], i: usize, h: f64, derivs: &[f64]) -> (f64, f64, f64) {
    let leading = h * h * derivs[3] / 6.0;
    let tail: f64 = [5, 7, 9]
        .iter()
        .map(|&j| {
            h.powi(j - 1) * derivs[j as usize] / rational::to_f64(&factorial_rational(j as u32))
        })
        .sum();
    let mut hi = x.to_vec();
    let mut lo = x.to_vec();
    hi[i] += h;
    lo[i] -= h;
    let mag = magnitude(f, &hi).max(magnitude(f, &lo));
    let rounding = f64::EPSILON * mag * node_count(f) as f64 / h;
    (leading, tail, rounding)
}

fn criterion_8() -> Verdict {
    // exact agreement on polynomial items, every α in a box
    let mut polynomial_checks = 0;
    for index in 0..INSTANCES {
        let mut rng = corpus::instance_rng(SEED, "acceptance-oracle", index);
        let n = rng.gen_range(0..=3);
        let f = corpus::polynomial(&mut rng, n);
        let x = corpus::point(&mut rng, n);
        let k = corpus::orders(&mut rng, n, 3);
        for alpha in MultiIndex::enumerate_box(&k) {
            let jet = mixed_derivative(&f, &alpha, &x).map_err(|e| e.to_string())?;
            let oracle = oracle_mixed(&f, &alpha, &x).map_err(|e| e.to_string())?;
            ensure(jet == oracle, || {
                format!("f = {f}, alpha = {alpha}: {jet} vs {oracle}")
            })?;
            polynomial_checks += 1;
        }
    }

    // finite differences on the float-safe part of the corpus
    let mut safe = 0;
    let mut sampled = 0;
    let mut convergence_items = 0;
    let mut worst_ratio = (4.0f64, 4.0f64);
    for index in 0..2 * INSTANCES {
        let mut rng = corpus::instance_rng(SEED, "acceptance-fd", index);
        let n = rng.gen_range(1..=3);
        let f = corpus::function(&mut rng, n);
        let x = corpus::point(&mut rng, n);
        let i = rng.gen_range(0..n);
        sampled += 1;
        let xf: Vec<f64> = x.iter().map(rational::to_f64).collect();
        let derivs = partial_magnitudes(&f, i, &x);
        let exact = rational::to_f64(
            &mixed_derivative(&f, &MultiIndex::unit(n, i), &x).map_err(|e| e.to_string())?,
        );

        let (leading, tail, rounding) = fd_error_terms(&f, &xf, i, DEFAULT_STEP, &derivs);
        if leading + tail + rounding <= 0.5 * DEFAULT_RTOL * exact.abs().max(1.0) {
            safe += 1;
            let fd = finite_difference(&f, i, &xf, DEFAULT_STEP).map_err(|e| e.to_string())?;
            ensure(within_tolerance(fd, exact, DEFAULT_RTOL), || {
                format!("f = {f}, i = {i}: fd {fd} vs exact {exact}")
            })?;
        }

        // order-2 convergence where the h² term dominates at both steps
        for h in [1e-1, 1e-2, 1e-3] {
            let (leading, tail, rounding) = fd_error_terms(&f, &xf, i, h / 2.0, &derivs);
            if leading > 0.0 && tail <= 0.01 * leading && rounding <= 1e-3 * leading {
                let err = |h: f64| -> Result<f64, String> {
                    Ok(
                        (finite_difference(&f, i, &xf, h).map_err(|e| e.to_string())? - exact)
                            .abs(),
                    )
                };
                let ratio = err(h)? / err(h / 2.0)?;
                ensure((3.0..=5.0).contains(&ratio), || {
                    format!("f = {f}, i = {i}, h = {h}: error ratio {ratio}")
                })?;
                worst_ratio = (worst_ratio.0.min(ratio), worst_ratio.1.max(ratio));
                convergence_items += 1;
                break;
            }
        }
    }
    ensure(safe >= INSTANCES / 2, || {
        format!("only {safe} of {sampled} items are float-safe")
    })?;
    ensure(convergence_items >= INSTANCES / 2, || {
        format!("only {convergence_items} items qualify for the convergence check")
    })?;
    Ok(format!(
        "{polynomial_checks} exact jet/oracle comparisons; {safe}/{sampled} float-safe items within rtol {DEFAULT_RTOL:e} at h = {DEFAULT_STEP:e}; \
         halving h on {convergence_items} items gives ratios in [{:.3}, {:.3}]",
        worst_ratio.0, worst_ratio.1
    ))
}

// -- CLI -------------------------------------------------------------------------

fn weiljet(args: &[&str]) -> Result<Output, String> {
    Command::new(env!("CARGO_BIN_EXE_weiljet"))
        .args(args)
        .env_remove("WEILJET_SEED")
        .output()
        .map_err(|e| format!("cannot run weiljet: {e}"))
}

fn criterion_9() -> Verdict {
    let golden: BTreeMap<&str, i64> = [
        ("(0,0)", 2),
        ("(1,0)", 4),
        ("(2,0)", 4),
        ("(0,1)", 1),
        ("(1,1)", 2),
        ("(2,1)", 2),
    ]
    .into();
    // the golden values themselves come from the symbolic oracle
    let f = parse("x0^2*x1").map_err(|e| e.to_string())?;
    for (alpha, &value) in &golden {
        let parts: Vec<u32> = alpha
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|p| p.parse().expect("golden index"))
            .collect();
        let oracle =
            oracle_mixed(&f, &parts.into(), &[int(1), int(2)]).map_err(|e| e.to_string())?;
        ensure(oracle == int(value), || {
            format!("golden {alpha} = {value} but oracle says {oracle}")
        })?;
    }

    let out = weiljet(&[
        "taylor", "--expr", "x0^2*x1", "--at", "1,2", "--orders", "2,1",
    ])?;
    ensure(out.status.success(), || {
        format!("exit status {}", out.status)
    })?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rows: BTreeMap<String, String> = stdout
        .lines()
        .skip(1)
        .filter_map(|line| {
            let mut cols = line.split_whitespace();
            Some((cols.next()?.to_string(), cols.next()?.to_string()))
        })
        .collect();
    let expected: BTreeMap<String, String> = golden
        .iter()
        .map(|(a, v)| (a.to_string(), v.to_string()))
        .collect();
    ensure(rows == expected, || format!("table rows {rows:?}"))?;
    Ok("six rows match the oracle-verified golden values".into())
}

fn criterion_10() -> Verdict {
    let args = ["check", "--suite", "all", "--seed", "7", "--format", "json"];
    let first = weiljet(&args)?;
    let second = weiljet(&args)?;
    ensure(first.status.success(), || {
        format!("first run exit status {}", first.status)
    })?;
    ensure(second.status.success(), || {
        format!("second run exit status {}", second.status)
    })?;
    ensure(first.stdout == second.stdout, || "outputs differ".into())?;
    let report: serde_json::Value =
        serde_json::from_slice(&first.stdout).map_err(|e| format!("invalid JSON: {e}"))?;
    let count = report["result"]["suites"].as_array().map_or(0, Vec::len);
    Ok(format!(
        "two runs, {} identical bytes, {count} suites",
        first.stdout.len()
    ))
}
