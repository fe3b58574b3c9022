//! Validation and execution of each verb.
//!
//! [`prepare`] parses and checks every field, then returns a [`Plan`] whose
//! job does the computing. `--dry-run` stops after `prepare`.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use besum_core::construction::{
    af_elements, af_sum_factoradic_observed, af_sum_rational, af_sum_rational_observed, bound_theoretical,
    check_bit_budget, digit_tail_bound, DigitConstraintSet, GrowthFunction, Membership, WeightSequence,
    DEFAULT_BIT_BUDGET,
};
use besum_core::dimension::{condition_ii_check, dimension_lower_estimate, mass_check_with, MassCheckOptions};
use besum_core::expsum::{dirichlet_bound, dirichlet_bound_f64, Angle, SumTrace, CSV_HEADER_DIGITS, CSV_HEADER_RATIONAL};
use besum_core::factoradic::{frac, parse_fraction, FactoradicReal, Rationality, TailPolicy};
use besum_core::periodicity::{
    detect_ultimate_period, period_collapse_test, sector_eval, CoefficientSequence, SectorSpec,
};
use besum_core::Error;

use crate::cli::{AlphaArgs, Command, Common, FactoradicCommand};
use crate::output::Artifact;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_DEPTH: u8 = 4;
pub const EXIT_IO: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(field: &str, message: impl std::fmt::Display) -> Self {
        Self { code: EXIT_CONFIG, message: format!("{field}: {message}") }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {err}", path.display()) }
    }
}

/// Wraps a library error, choosing the exit code from its kind.
fn lib(field: &'static str) -> impl Fn(Error) -> CliError {
    move |err| {
        let code = match err {
            Error::BitBudget { .. } => EXIT_BUDGET,
            Error::InsufficientDepth { .. } => EXIT_DEPTH,
            _ => EXIT_CONFIG,
        };
        CliError { code, message: format!("{field}: {err}") }
    }
}

type Job = Box<dyn FnOnce() -> Result<Artifact, CliError> + Send>;

pub struct Plan {
    pub description: Value,
    job: Job,
}

impl Plan {
    fn new(description: Value, job: impl FnOnce() -> Result<Artifact, CliError> + Send + 'static) -> Self {
        Self { description, job: Box::new(job) }
    }

    pub fn run(self) -> Result<Artifact, CliError> {
        (self.job)()
    }
}

fn growth(name: &str) -> Result<GrowthFunction, CliError> {
    GrowthFunction::by_name(name).map_err(lib("--f"))
}

fn weights(name: &str) -> Result<WeightSequence, CliError> {
    WeightSequence::by_name(name).map_err(lib("--a"))
}

fn constraint_set(f: &str, a: &str) -> Result<DigitConstraintSet, CliError> {
    Ok(DigitConstraintSet::new(growth(f)?, weights(a)?))
}

/// `BESUM_BIT_BUDGET`, or the library default.
pub fn bit_budget() -> Result<u64, CliError> {
    match std::env::var("BESUM_BIT_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|e| CliError::config("BESUM_BIT_BUDGET", format!("`{v}`: {e}"))),
        Err(_) => Ok(DEFAULT_BIT_BUDGET),
    }
}

fn read(path: &Path, field: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(field, format!("{}: {e}", path.display())))
}

/// `log` (1, 2, 5 per decade), `all`, `every:K`, or an increasing comma list;
/// `n_max` always closes the schedule.
pub fn schedule(spec: &str, n_max: u64) -> Result<Vec<u64>, CliError> {
    let err = |m: String| CliError::config("--schedule", m);
    if n_max < 1 {
        return Err(CliError::config("--N", "must be >= 1"));
    }
    let mut points: Vec<u64> = match spec {
        "log" => {
            let mut v = Vec::new();
            let mut decade = 1u64;
            'outer: loop {
                for m in [1, 2, 5] {
                    match decade.checked_mul(m) {
                        Some(p) if p <= n_max => v.push(p),
                        _ => break 'outer,
                    }
                }
                match decade.checked_mul(10) {
                    Some(d) => decade = d,
                    None => break,
                }
            }
            v
        }
        "all" => (1..=n_max).collect(),
        s if s.starts_with("every:") => {
            let k: u64 = s["every:".len()..].parse().map_err(|e| err(format!("`{s}`: {e}")))?;
            if k == 0 {
                return Err(err("every:K needs K >= 1".into()));
            }
            (1..=n_max / k).map(|i| i * k).collect()
        }
        s => {
            let v = s
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|e| err(format!("`{t}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if v.windows(2).any(|w| w[0] >= w[1]) || v.first() == Some(&0) || v.last().is_some_and(|&l| l > n_max) {
                return Err(err(format!("`{s}` must increase strictly within 1..={n_max}")));
            }
            v
        }
    };
    if points.last() != Some(&n_max) {
        points.push(n_max);
    }
    Ok(points)
}

enum AlphaValue {
    Rational(BigRational),
    Digits { label: String, value: FactoradicReal },
}

impl AlphaValue {
    fn angle(&self) -> Result<Angle, CliError> {
        match self {
            AlphaValue::Rational(x) => Angle::rational(x.clone()),
            AlphaValue::Digits { value, .. } => Angle::factoradic(value.clone()),
        }
        .map_err(lib("--alpha"))
    }

    fn describe(&self) -> Value {
        match self {
            AlphaValue::Rational(x) => json!({ "rational": x.to_string() }),
            AlphaValue::Digits { label, value } => {
                json!({ "digits": label, "depth": value.depth(), "tail": value.tail().to_string() })
            }
        }
    }
}

fn parse_alpha(args: &AlphaArgs, set: Option<&DigitConstraintSet>, seed: u64) -> Result<AlphaValue, CliError> {
    let spec = args.alpha.trim();
    if let Some(path) = spec.strip_prefix("file:") {
        let text = read(Path::new(path), "--alpha")?;
        let value = FactoradicReal::parse_digit_file(&text).map_err(lib("--alpha"))?;
        return Ok(AlphaValue::Digits { label: path.to_string(), value });
    }
    if spec == "sample" || spec.starts_with("sample:") {
        let seed = match spec.strip_prefix("sample:") {
            Some(s) => s.parse().map_err(|e| CliError::config("--alpha", format!("sampler seed `{s}`: {e}")))?,
            None => seed,
        };
        let set = set.ok_or_else(|| CliError::config("--alpha", "this verb has no set to sample from"))?;
        let value = set.sample_stream(args.depth, seed, args.stream).map_err(lib("--depth"))?;
        return Ok(AlphaValue::Digits { label: format!("sample:{seed}:{}", args.stream), value });
    }
    let x = parse_fraction(spec).map_err(lib("--alpha"))?;
    if x <= BigRational::zero() || x >= BigRational::from_integer(1.into()) {
        return Err(CliError::config("--alpha", format!("{x} is not in (0, 1)")));
    }
    Ok(AlphaValue::Rational(x))
}

fn small_fraction(x: &BigRational) -> Result<(u64, u64), CliError> {
    match (x.numer().to_u64(), x.denom().to_u64()) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(CliError::config("--alpha", format!("{x} needs a numerator and denominator below 2^64"))),
    }
}

/// With an unknown tail, `{f(N)! α}` needs digits up to position `f(N)`.
fn check_depth(f: &GrowthFunction, alpha: &AlphaValue, n: u64) -> Result<(), CliError> {
    if let AlphaValue::Digits { value, .. } = alpha {
        let top = f.eval(n).ok_or_else(|| CliError::config("--N", format!("{}({n}) overflows", f.name())))?;
        if value.tail() == TailPolicy::Unknown && top >= value.depth() as u64 {
            return Err(lib("--depth")(Error::InsufficientDepth {
                required: top as usize + 1,
                available: value.depth(),
            }));
        }
    }
    Ok(())
}

fn snapshot(t: &SumTrace) -> Vec<Value> {
    let z = t.partial_sum();
    vec![json!(t.count()), json!(z.re), json!(z.im), json!(z.norm()), json!(t.sup_modulus()), json!(t.sup_at())]
}

/// Records a snapshot each time the trace reaches the next schedule point.
fn recorder<'a>(points: &'a [u64], rows: &'a mut Vec<Vec<Value>>, prefix: Vec<Value>) -> impl FnMut(&SumTrace) + 'a {
    let mut next = 0;
    move |t| {
        if points.get(next) == Some(&t.count()) {
            let mut row = prefix.clone();
            row.extend(snapshot(t));
            rows.push(row);
            next += 1;
        }
    }
}

fn columns(header: &str) -> Vec<&str> {
    header.split(',').collect()
}

pub fn prepare(command: &Command, common: &Common) -> Result<Plan, CliError> {
    if common.jobs == 0 {
        return Err(CliError::config("--jobs", "must be >= 1"));
    }
    let seed = common.seed;
    match command.clone() {
        Command::Sum(args) => {
            let set = constraint_set(&args.growth.f, &args.weights.a)?;
            let f = set.growth().clone();
            let alpha = parse_alpha(&args.alpha, Some(&set), seed)?;
            let points = schedule(&args.schedule, args.n)?;
            check_depth(&f, &alpha, args.n)?;
            if let AlphaValue::Rational(x) = &alpha {
                small_fraction(x)?;
            }
            let n = args.n;
            let description = json!({ "alpha": alpha.describe(), "N": n, "rows": points.len() });
            Ok(Plan::new(description, move || match alpha {
                AlphaValue::Rational(x) => {
                    let (p, q) = small_fraction(&x)?;
                    let mut rows = Vec::new();
                    af_sum_rational_observed(&f, p, q, n, recorder(&points, &mut rows, vec![json!(p), json!(q)]))
                        .map_err(lib("--alpha"))?;
                    Ok(Artifact::table(&columns(CSV_HEADER_RATIONAL), rows))
                }
                AlphaValue::Digits { label, value } => {
                    let mut rows = Vec::new();
                    let sum = af_sum_factoradic_observed(&f, &value, n, recorder(&points, &mut rows, vec![json!(label)]))
                        .map_err(lib("--alpha"))?;
                    Ok(Artifact::table(&columns(CSV_HEADER_DIGITS), rows).with_summary("phase_error", sum.phase_error))
                }
            }))
        }

        Command::SupSweep(args) => {
            let f = growth(&args.growth.f)?;
            if args.q_max < 2 {
                return Err(CliError::config("--q-max", "must be >= 2"));
            }
            if args.n < 1 {
                return Err(CliError::config("--N", "must be >= 1"));
            }
            let cells: Vec<(u64, u64)> =
                (2..=args.q_max).flat_map(|q| (1..q).filter(move |p| p.gcd(&q) == 1).map(move |p| (p, q))).collect();
            let (n, jobs) = (args.n, common.jobs);
            let description = json!({ "cells": cells.len(), "N": n, "jobs": jobs });
            Ok(Plan::new(description, move || {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build()
                    .map_err(|e| CliError::config("--jobs", e))?;
                let rows = pool.install(|| {
                    cells
                        .par_iter()
                        .map(|&(p, q)| {
                            let alpha = Angle::from_ratio(p as i64, q as i64).map_err(lib("--q-max"))?;
                            let (head, _) = af_sum_rational(&f, p, q, q - 1).map_err(lib("--q-max"))?;
                            let bound = head.norm() + 2.0 * dirichlet_bound(&alpha) + 1.0;
                            let (_, t) = af_sum_rational(&f, p, q, n).map_err(lib("--N"))?;
                            Ok(vec![
                                json!(p),
                                json!(q),
                                json!(n),
                                json!(t.sup_modulus()),
                                json!(t.sup_at()),
                                json!(bound),
                                json!(t.sup_modulus() <= bound),
                            ])
                        })
                        .collect::<Result<Vec<_>, CliError>>()
                })?;
                let within = rows.iter().all(|r| r[6] == json!(true));
                Ok(Artifact::table(&["alpha_num", "alpha_den", "N", "sup_modulus", "sup_at", "bound", "within"], rows)
                    .with_summary("all_within", within))
            }))
        }

        Command::Factoradic(FactoradicCommand::Encode { x, depth }) => {
            let value = parse_fraction(&x).map_err(lib("--x"))?;
            let digits = FactoradicReal::encode(&value, depth).map_err(lib("--x"))?;
            let description = json!({ "x": value.to_string(), "depth": depth });
            Ok(Plan::new(description, move || Ok(digit_artifact(&[(None, digits)]))))
        }

        Command::Factoradic(FactoradicCommand::Decode { file }) => {
            let value = FactoradicReal::parse_digit_file(&read(&file, "--file")?).map_err(lib("--file"))?;
            let description = json!({ "file": file, "depth": value.depth() });
            Ok(Plan::new(description, move || {
                let (lo, hi) = value.decode();
                let rational = match value.is_rational_by_digits() {
                    Rationality::Rational => "rational".to_string(),
                    Rationality::UnknownAtDepth(d) => format!("unknown_at_depth_{d}"),
                };
                let approx = lo.to_f64();
                let row = vec![
                    json!(value.depth()),
                    json!(value.tail().to_string()),
                    json!(lo.to_string()),
                    json!(hi.to_string()),
                    json!(approx),
                    json!(rational),
                ];
                Ok(Artifact::table(&["depth", "tail", "lower", "upper", "value", "rationality"], vec![row]))
            }))
        }

        Command::Construct(args) => {
            let f = growth(&args.growth.f)?;
            let budget = bit_budget()?;
            if args.n < 1 {
                return Err(CliError::config("--N", "must be >= 1"));
            }
            let bits = check_bit_budget(&f, args.n, budget).map_err(lib("--N"))?;
            let n = args.n;
            let description = json!({ "N": n, "largest_factorial_bits": bits, "bit_budget": budget });
            Ok(Plan::new(description, move || {
                let elements = af_elements(&f, n, budget).map_err(lib("--N"))?;
                let rows = elements
                    .iter()
                    .zip(1u64..)
                    .map(|(el, k)| vec![json!(k), json!(f.eval(k)), json!(el.to_string())])
                    .collect();
                Ok(Artifact::table(&["n", "f_n", "element"], rows))
            }))
        }

        Command::Membership(args) => {
            let set = constraint_set(&args.growth.f, &args.weights.a)?;
            let alpha = parse_alpha(&args.alpha, Some(&set), seed)?;
            let value = match &alpha {
                AlphaValue::Rational(x) => FactoradicReal::encode(x, args.alpha.depth).map_err(lib("--depth"))?,
                AlphaValue::Digits { value, .. } => value.clone(),
            };
            let description = json!({ "alpha": alpha.describe(), "depth": value.depth() });
            Ok(Plan::new(description, move || {
                let (verdict, position) = match set.membership(&value) {
                    Membership::In => ("in", Value::Null),
                    Membership::Out { position } => ("out", json!(position)),
                    Membership::UnknownAtDepth(d) => ("unknown_at_depth", json!(d)),
                };
                let row = vec![json!(verdict), position, json!(value.depth())];
                Ok(Artifact::table(&["verdict", "position", "depth"], vec![row]))
            }))
        }

        Command::SampleE(args) => {
            let set = constraint_set(&args.growth.f, &args.weights.a)?;
            if args.count < 1 {
                return Err(CliError::config("--count", "must be >= 1"));
            }
            // one draw up front surfaces empty sets and bad depths before the plan
            set.sample_stream(args.depth, seed, 0).map_err(lib("--depth"))?;
            let (depth, count) = (args.depth, args.count);
            let description = json!({ "depth": depth, "count": count, "seed": seed });
            Ok(Plan::new(description, move || {
                let samples = (0..count)
                    .map(|k| Ok((Some(k), set.sample_stream(depth, seed, k).map_err(lib("--depth"))?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(digit_artifact(&samples))
            }))
        }

        Command::Bound(args) => {
            let set = constraint_set(&args.growth.f, &args.weights.a)?;
            let alpha = parse_alpha(&args.alpha, Some(&set), seed)?;
            let angle = alpha.angle()?;
            let points = schedule(&args.schedule, args.n)?;
            check_depth(set.growth(), &alpha, args.n)?;
            if let AlphaValue::Rational(x) = &alpha {
                small_fraction(x)?;
            }
            let description = json!({ "alpha": alpha.describe(), "N": args.n, "rows": points.len() });
            Ok(Plan::new(description, move || {
                let f = set.growth();
                let frac_parts = frac_parts(f, &alpha, &points)?;
                let mut rows = Vec::new();
                for (&n, part) in points.iter().zip(frac_parts) {
                    let theory = bound_theoretical(f, set.weights(), &angle, n).map_err(lib("--N"))?;
                    let tail = digit_tail_bound(f, set.weights(), n).map_err(lib("--N"))?;
                    rows.push(vec![
                        json!(n),
                        json!(theory),
                        json!(tail.to_f64()),
                        json!(tail.to_string()),
                        json!(part.to_f64()),
                        json!(part <= tail),
                    ]);
                }
                Ok(Artifact::table(
                    &["N", "bound_theoretical", "digit_tail_bound", "digit_tail_bound_exact", "frac_part_upper", "tail_holds"],
                    rows,
                ))
            }))
        }

        Command::Dimension(args) => {
            let set = constraint_set(&args.growth.f, &args.weights.a)?;
            if args.jmax < 4 {
                return Err(CliError::config("--jmax", "must be >= 4"));
            }
            let jmax = args.jmax;
            Ok(Plan::new(json!({ "jmax": jmax }), move || {
                let series = dimension_lower_estimate(&set, jmax).map_err(lib("--jmax"))?;
                let rows = series.iter().map(|&(j, r)| vec![json!(j), json!(r)]).collect();
                Ok(Artifact::table(&["j", "ratio"], rows))
            }))
        }

        Command::MassCheck(args) => {
            let set = constraint_set(&args.growth.f, &args.weights.a)?;
            if !(args.s > 0.0 && args.s < 1.0) {
                return Err(CliError::config("--s", format!("{} is not in (0, 1)", args.s)));
            }
            if args.i0 < 1 || args.i0 >= args.imax {
                return Err(CliError::config("--i0", format!("need 1 <= i0 < imax, got {} and {}", args.i0, args.imax)));
            }
            let opts = MassCheckOptions { samples_per_depth: args.samples_per_depth, seed, extra_depth: args.extra_depth };
            let description = json!({ "s": args.s, "i0": args.i0, "imax": args.imax, "samples_per_depth": opts.samples_per_depth });
            Ok(Plan::new(description, move || {
                let report = mass_check_with(&set, args.s, args.i0, args.imax, opts).map_err(lib("--imax"))?;
                let rows = (report.i0..report.i_max)
                    .zip(&report.a_by_depth)
                    .map(|(i, a)| {
                        let v = report.violations.iter().filter(|v| v.depth == i).count();
                        vec![json!(i), json!(a), json!(v)]
                    })
                    .collect();
                Ok(Artifact::table(&["depth", "a_depth", "violations"], rows)
                    .with_summary("s", report.s)
                    .with_summary("a_constant", report.a_constant)
                    .with_summary("intervals_tested", report.intervals_tested)
                    .with_summary("violations", &report.violations))
            }))
        }

        Command::CondIi(args) => {
            let f = growth(&args.growth.f)?;
            if !(args.eps > 0.0 && args.eps < 1.0) {
                return Err(CliError::config("--eps", format!("{} is not in (0, 1)", args.eps)));
            }
            if args.imax < 1 {
                return Err(CliError::config("--imax", "must be >= 1"));
            }
            let (eps, imax) = (args.eps, args.imax);
            Ok(Plan::new(json!({ "eps": eps, "imax": imax }), move || {
                let report = condition_ii_check(&f, eps, imax).map_err(lib("--imax"))?;
                let rows = report
                    .values
                    .iter()
                    .zip(1usize..)
                    .map(|(g, i)| vec![json!(i), json!(g), json!(report.jump_points.binary_search(&i).is_ok())])
                    .collect();
                Ok(Artifact::table(&["i", "g", "jump"], rows)
                    .with_summary("sup_log", report.sup_log)
                    .with_summary("attained_at", report.attained_at)
                    .with_summary("decreasing_after_sup", report.decreasing_after_sup()))
            }))
        }

        Command::Periodicity(args) => {
            let c = CoefficientSequence::parse_text(&read(&args.coeffs, "--coeffs")?).map_err(lib("--coeffs"))?;
            let max_period = args.max_period.unwrap_or((c.len() / 3).min(100));
            if max_period < 1 {
                return Err(CliError::config("--max-period", "must be >= 1"));
            }
            let room = c.len().checked_sub(2 * max_period).ok_or_else(|| {
                CliError::config("--max-period", format!("{max_period} needs at least {} coefficients, file has {}", 2 * max_period, c.len()))
            })?;
            let max_pre = args.max_pre.unwrap_or(room);
            if max_pre > room {
                return Err(CliError::config("--max-pre", format!("{max_pre} with period {max_period} needs {} coefficients, file has {}", max_pre + 2 * max_period, c.len())));
            }
            let description = json!({ "coeffs": args.coeffs, "len": c.len(), "max_pre": max_pre, "max_period": max_period });
            Ok(Plan::new(description, move || {
                let found = detect_ultimate_period(&c, max_pre, max_period).map_err(lib("--coeffs"))?;
                let row = match found {
                    Some((k, q)) => {
                        let collapse = period_collapse_test(&c, k, q).map_err(lib("--coeffs"))?;
                        vec![json!(c.len()), json!(k), json!(q), json!(collapse)]
                    }
                    None => vec![json!(c.len()), Value::Null, Value::Null, Value::Null],
                };
                Ok(Artifact::table(&["len", "preperiod", "period", "collapse"], vec![row]))
            }))
        }

        Command::SectorEval(args) => {
            let c = CoefficientSequence::parse_text(&read(&args.coeffs, "--coeffs")?).map_err(lib("--coeffs"))?;
            let spec = SectorSpec::new(args.theta1, args.theta2, args.radii.clone(), args.theta_samples)
                .map_err(lib("--radii"))?;
            let terms = args.terms.unwrap_or(c.len().saturating_sub(1));
            if terms >= c.len() {
                return Err(CliError::config("--terms", format!("{terms} needs {} coefficients, file has {}", terms + 1, c.len())));
            }
            let description = json!({ "coeffs": args.coeffs, "terms": terms, "points": args.radii.len() * spec.thetas().len() });
            Ok(Plan::new(description, move || {
                let grid = sector_eval(&c, &spec, terms).map_err(lib("--coeffs"))?;
                let mut rows = Vec::new();
                for (r, row) in grid.radii.iter().zip(&grid.values) {
                    for (t, z) in grid.thetas.iter().zip(row) {
                        rows.push(vec![json!(r), json!(t), json!(z.re), json!(z.im), json!(z.norm())]);
                    }
                }
                Ok(Artifact::table(&["r", "theta", "re", "im", "modulus"], rows)
                    .with_summary("max_modulus_by_radius", grid.max_modulus_by_radius()))
            }))
        }

        Command::QnDemo(args) => {
            if args.q < 1 {
                return Err(CliError::config("--q", "must be >= 1"));
            }
            let alpha = parse_alpha(&args.alpha, None, seed)?;
            let angle = alpha.angle()?;
            let points = schedule(&args.schedule, args.n)?;
            let (q, n) = (args.q, args.n);
            let description = json!({ "q": q, "alpha": alpha.describe(), "N": n, "rows": points.len() });
            Ok(Plan::new(description, move || {
                let mut rows = Vec::new();
                let mut max_err = 0.0f64;
                let mut record = recorder(&points, &mut rows, Vec::new());
                let mut trace = SumTrace::new();
                for k in 1..=n {
                    // zero terms off qℕ keep the trace indexed by N
                    if k % q == 0 {
                        let (phase, err) = angle.multiple_phase(&BigInt::from(k));
                        max_err = max_err.max(err);
                        trace.push_turns(phase);
                    } else {
                        trace.push(Complex64::new(0.0, 0.0));
                    }
                    record(&trace);
                }
                drop(record);
                let dirichlet = dirichlet_bound_f64(angle.to_f64() * q as f64).ok();
                Ok(Artifact::table(&["N", "re", "im", "modulus", "sup_modulus", "sup_at"], rows)
                    .with_summary("dirichlet_bound", dirichlet)
                    .with_summary("phase_error", 2.0 * std::f64::consts::PI * max_err * (n / q) as f64))
            }))
        }

        Command::Run(_) => Err(CliError::config("run", "nested run configs are not supported")),
    }
}

fn digit_artifact(values: &[(Option<u64>, FactoradicReal)]) -> Artifact {
    let json_items: Vec<Value> = values
        .iter()
        .map(|(stream, v)| {
            json!({ "stream": stream, "depth": v.depth(), "tail": v.tail().to_string(), "digits": v.dense_digits() })
        })
        .collect();
    match values {
        [(_, single)] => Artifact::DigitFile { text: single.to_digit_file(), json: json_items[0].clone() },
        many => {
            let rows = many
                .iter()
                .map(|(stream, v)| {
                    let digits: Vec<String> = v.dense_digits().iter().map(u32::to_string).collect();
                    vec![json!(stream), json!(v.depth()), json!(v.tail().to_string()), json!(digits.join(" "))]
                })
                .collect();
            Artifact::table(&["stream", "depth", "tail", "digits"], rows)
        }
    }
}

/// Upper ends of `{f(N)! α}` at each schedule point.
fn frac_parts(f: &GrowthFunction, alpha: &AlphaValue, points: &[u64]) -> Result<Vec<BigRational>, CliError> {
    let ms = points
        .iter()
        .map(|&n| f.eval(n).ok_or_else(|| CliError::config("--N", format!("{}({n}) overflows", f.name()))))
        .collect::<Result<Vec<u64>, _>>()?;
    match alpha {
        AlphaValue::Rational(x) => {
            // m! p mod q, grown incrementally
            let (p, q) = small_fraction(x)?;
            let mut residue = 1u128 % q as u128;
            let mut done = 1u64;
            let mut out = Vec::new();
            for &m in &ms {
                while done < m && residue != 0 {
                    done += 1;
                    residue = residue * (done % q) as u128 % q as u128;
                }
                let r = residue * p as u128 % q as u128;
                out.push(frac(&BigRational::new(BigInt::from(r), BigInt::from(q))));
            }
            Ok(out)
        }
        AlphaValue::Digits { value, .. } => {
            let ms: Vec<usize> = ms.iter().map(|&m| m as usize).collect();
            let parts = value.frac_factorials(&ms).map_err(lib("--depth"))?;
            Ok(parts.into_iter().map(|(v, e)| v + e).collect())
        }
    }
}
