use std::fmt;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use weiljet::calculus::{self, DerivTable};
use weiljet::expr::{self, Expr};
use weiljet::multiindex::MultiIndex;
use weiljet::oracle::{self, DEFAULT_RTOL, DEFAULT_STEP};
use weiljet::rational::{self, Rational};
use weiljet::suites::{self, SuiteReport};

/// Exact derivatives and Taylor tables over truncated polynomial algebras.
#[derive(Parser)]
#[command(name = "weiljet", version)]
struct Cli {
    /// Add wall-clock time to JSON reports (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of ∂[α]f(x) over α ≤ k (box) or |α| ≤ |k| (simplex).
    Taylor(TaylorArgs),
    /// A single mixed derivative ∂[α]f(x).
    Derive(DeriveArgs),
    /// Run identity suites on seeded random instances.
    Check(CheckArgs),
    /// Compare a first partial derivative with a central finite difference.
    FdCheck(FdCheckArgs),
}

#[derive(Args)]
struct Common {
    /// Expression in x0, x1, ...
    #[arg(long)]
    expr: String,
    /// Comma-separated point; empty for arity 0.
    #[arg(long, allow_hyphen_values = true)]
    at: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct TaylorArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated truncation orders, one per coordinate of --at.
    #[arg(long)]
    orders: String,
    #[arg(long, value_enum, default_value_t = Mode::Box)]
    mode: Mode,
    #[arg(long, env = "WEILJET_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DeriveArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated multi-index, at most as long as --at.
    #[arg(long)]
    alpha: String,
    #[arg(long, env = "WEILJET_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CheckArgs {
    /// Suite id, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, env = "WEILJET_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args)]
struct FdCheckArgs {
    #[command(flatten)]
    common: Common,
    /// Coordinate to differentiate along.
    #[arg(long)]
    wrt: usize,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    h: f64,
    #[arg(long, default_value_t = DEFAULT_RTOL)]
    rtol: f64,
    #[arg(long, env = "WEILJET_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Box,
    Simplex,
}

/// Why a command did not succeed; each maps to one exit code.
enum Failure {
    /// Bad flags or inconsistent inputs (64).
    Usage(String),
    /// Parse, evaluation or numeric error (2).
    Eval(String),
}

impl Failure {
    fn usage(msg: impl fmt::Display) -> Self {
        Failure::Usage(msg.to_string())
    }
    fn eval(msg: impl fmt::Display) -> Self {
        Failure::Eval(msg.to_string())
    }
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_EVAL: u8 = 2;
const EXIT_USAGE: u8 = 64;

struct Report {
    command: &'static str,
    inputs: Value,
    result: Value,
    seed: u64,
    table: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let start = Instant::now();
    let (outcome, format) = match &cli.command {
        Command::Taylor(a) => (taylor(a), a.common.format),
        Command::Derive(a) => (derive(a), a.common.format),
        Command::Check(a) => (check(a), a.format),
        Command::FdCheck(a) => (fd_check(a), a.common.format),
    };
    match outcome {
        Ok(report) => {
            match format {
                Format::Table => print!("{}", report.table),
                Format::Json => {
                    let mut v = json!({
                        "command": report.command,
                        "inputs": report.inputs,
                        "result": report.result,
                        "seed": report.seed,
                    });
                    if cli.timing {
                        v["wall_time_ms"] = json!(start.elapsed().as_millis() as u64);
                    }
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&v).expect("serializable")
                    );
                }
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Eval(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_EVAL)
        }
    }
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    let text = text.trim();
    let parts = if text.is_empty() {
        None
    } else {
        Some(text.split(',').map(str::trim))
    };
    parts.into_iter().flatten()
}

fn parse_point(text: &str) -> Result<Vec<Rational>, Failure> {
    split_list(text)
        .map(|p| rational::parse(p).map_err(|e| Failure::usage(format!("--at: {e}"))))
        .collect()
}

fn parse_index(flag: &str, text: &str) -> Result<MultiIndex, Failure> {
    let parts = split_list(text)
        .map(|p| {
            p.parse::<u32>()
                .map_err(|_| Failure::usage(format!("{flag}: `{p}` is not a natural number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MultiIndex::new(parts))
}

/// Parses the expression and checks that the point covers its variables.
fn parse_function(common: &Common, point_len: usize) -> Result<Expr, Failure> {
    let e = expr::parse(&common.expr).map_err(|err| {
        let line = common
            .expr
            .lines()
            .nth(err.line.saturating_sub(1))
            .unwrap_or("");
        let caret = " ".repeat(err.column.saturating_sub(1));
        Failure::eval(format!("{err}\n  {line}\n  {caret}^"))
    })?;
    if e.arity() > point_len {
        return Err(Failure::usage(format!(
            "expression uses x{} but --at has {point_len} coordinate(s)",
            e.arity() - 1
        )));
    }
    Ok(e)
}

fn point_json(x: &[Rational]) -> Value {
    Value::Array(x.iter().map(|v| json!(rational::format(v))).collect())
}

fn taylor(args: &TaylorArgs) -> Result<Report, Failure> {
    let x = parse_point(&args.common.at)?;
    let k = parse_index("--orders", &args.orders)?;
    if k.arity() != x.len() {
        return Err(Failure::usage(format!(
            "--orders has {} entries but --at has {}",
            k.arity(),
            x.len()
        )));
    }
    let f = parse_function(&args.common, x.len())?;
    let table = match args.mode {
        Mode::Box => calculus::taylor_box(&f, &x, &k),
        Mode::Simplex => calculus::taylor_simplex(&f, &x, &k),
    }
    .map_err(Failure::eval)?;
    Ok(Report {
        command: "taylor",
        inputs: json!({
            "expr": args.common.expr,
            "at": point_json(&x),
            "orders": k.to_json(),
            "mode": table.mode.as_str(),
        }),
        result: table.to_json(),
        seed: args.seed,
        table: render_table(&table),
        ok: true,
    })
}

fn render_table(table: &DerivTable) -> String {
    let rows: Vec<(String, String)> = table
        .entries
        .iter()
        .map(|(a, v)| (a.to_string(), rational::format(v)))
        .collect();
    let width = rows
        .iter()
        .map(|(a, _)| a.len())
        .chain([5])
        .max()
        .unwrap_or(5);
    let mut out = format!("{:<width$}  value\n", "alpha");
    for (a, v) in rows {
        out.push_str(&format!("{a:<width$}  {v}\n"));
    }
    out
}

fn derive(args: &DeriveArgs) -> Result<Report, Failure> {
    let x = parse_point(&args.common.at)?;
    let alpha = parse_index("--alpha", &args.alpha)?;
    if alpha.arity() > x.len() {
        return Err(Failure::usage(format!(
            "--alpha has {} entries but --at has only {}",
            alpha.arity(),
            x.len()
        )));
    }
    let f = parse_function(&args.common, x.len())?;
    let value = calculus::mixed_derivative(&f, &alpha, &x).map_err(Failure::eval)?;
    Ok(Report {
        command: "derive",
        inputs: json!({
            "expr": args.common.expr,
            "at": point_json(&x),
            "alpha": alpha.to_json(),
        }),
        result: json!({ "value": rational::to_json(&value) }),
        seed: args.seed,
        table: format!("{}\n", rational::format(&value)),
        ok: true,
    })
}

fn check(args: &CheckArgs) -> Result<Report, Failure> {
    let selected: Vec<_> = if args.suite == "all" {
        suites::SUITES.iter().collect()
    } else {
        let suite = suites::find(&args.suite).ok_or_else(|| {
            let known: Vec<_> = suites::SUITES.iter().map(|s| s.id).collect();
            Failure::usage(format!(
                "unknown suite `{}`; expected `all` or one of: {}",
                args.suite,
                known.join(", ")
            ))
        })?;
        vec![suite]
    };
    let reports: Vec<SuiteReport> = selected
        .iter()
        .map(|s| s.run(args.instances, args.seed))
        .collect();
    let ok = reports.iter().all(SuiteReport::ok);

    let width = reports
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut table = format!("{:<width$}  passed/instances  status\n", "suite");
    for r in &reports {
        let counts = format!("{}/{}", r.passed, r.instances);
        let status = if r.ok() { "pass" } else { "FAIL" };
        table.push_str(&format!("{:<width$}  {counts:<16}  {status}\n", r.name));
        if let Some(failure) = &r.first_failure {
            table.push_str(&format!("{:<width$}  first failure: {failure}\n", ""));
        }
    }
    table.push_str(if ok {
        "all selected suites passed\n"
    } else {
        "some suites FAILED\n"
    });

    Ok(Report {
        command: "check",
        inputs: json!({ "suite": args.suite, "instances": args.instances }),
        result: json!({
            "passed": ok,
            "suites": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
        }),
        seed: args.seed,
        table,
        ok,
    })
}

fn fd_check(args: &FdCheckArgs) -> Result<Report, Failure> {
    if !(args.h.is_finite() && args.h > 0.0) {
        return Err(Failure::usage("--h must be a positive finite number"));
    }
    if !(args.rtol.is_finite() && args.rtol >= 0.0) {
        return Err(Failure::usage("--rtol must be a nonnegative finite number"));
    }
    let x = parse_point(&args.common.at)?;
    if args.wrt >= x.len() {
        return Err(Failure::usage(format!(
            "--wrt {} is out of range for a point with {} coordinate(s)",
            args.wrt,
            x.len()
        )));
    }
    let f = parse_function(&args.common, x.len())?;
    let exact = calculus::partial_derivative(&f, args.wrt, &x).map_err(Failure::eval)?;
    let exact_f = rational::to_f64(&exact);
    let xf: Vec<f64> = x.iter().map(rational::to_f64).collect();
    let fd = oracle::finite_difference(&f, args.wrt, &xf, args.h).map_err(Failure::eval)?;
    if !exact_f.is_finite() {
        return Err(Failure::eval(
            "exact derivative is outside the binary64 range",
        ));
    }
    let abs_gap = (fd - exact_f).abs();
    let rel_gap = abs_gap / exact_f.abs().max(1.0);
    let ok = oracle::within_tolerance(fd, exact_f, args.rtol);

    let table = format!(
        "exact     {} ({exact_f:e})\nfd        {fd:e}\nabs gap   {abs_gap:e}\nrel gap   {rel_gap:e}\nrtol      {:e}\nstatus    {}\n",
        rational::format(&exact),
        args.rtol,
        if ok { "pass" } else { "FAIL" },
    );
    Ok(Report {
        command: "fd-check",
        inputs: json!({
            "expr": args.common.expr,
            "at": point_json(&x),
            "wrt": args.wrt,
            "h": args.h,
            "rtol": args.rtol,
        }),
        result: json!({
            "exact": rational::to_json(&exact),
            "exact_f64": exact_f,
            "fd": fd,
            "abs_gap": abs_gap,
            "rel_gap": rel_gap,
            "passed": ok,
        }),
        seed: args.seed,
        table,
        ok,
    })
}
