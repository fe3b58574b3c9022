//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p besum-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use besum_core::construction::{
    af_sum_factoradic, af_sum_rational, bound_theoretical, digit_tail_bound, DigitConstraintSet,
    GrowthFunction, WeightSequence,
};
use besum_core::dimension::{
    condition_ii_check, count_cylinders, count_lower_bound, cylinders, dimension_lower_estimate,
    measure_of_cylinder,
};
use besum_core::expsum::{dirichlet_bound, e, qn_counterexample_sup, symmetry_check, Angle};
use besum_core::factoradic::{factorial, FactoradicReal, TailPolicy};
use besum_core::periodicity::{
    detect_ultimate_period, period_collapse_test, sector_eval, CoefficientSequence, SectorSpec,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn n2() -> GrowthFunction {
    GrowthFunction::by_name("n2").unwrap()
}

fn weights(name: &str) -> WeightSequence {
    WeightSequence::by_name(name).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 1. Rational boundedness of A(n²) for all reduced p/q, q ≤ 20, N ≤ 10⁵.
fn rational_boundedness() -> Outcome {
    let f = n2();
    let mut checked = 0;
    let mut worst = 0.0f64;
    for q in 2u64..=20 {
        for p in (1..q).filter(|&p| p.gcd(&q) == 1) {
            let alpha = Angle::from_ratio(p as i64, q as i64).unwrap();
            let (head, _) = af_sum_rational(&f, p, q, q - 1).map_err(|e| e.to_string())?;
            let rhs = head.norm() + 2.0 * dirichlet_bound(&alpha) + 1.0;
            let (_, trace) = af_sum_rational(&f, p, q, 100_000).map_err(|e| e.to_string())?;
            ensure(trace.sup_modulus() <= rhs, || {
                format!("{p}/{q}: sup {} at N={} exceeds {rhs}", trace.sup_modulus(), trace.sup_at())
            })?;
            worst = worst.max(trace.sup_modulus() / rhs);
            checked += 1;
        }
    }
    Ok(format!("{checked} fractions, max sup/rhs = {worst:.4}"))
}

fn e_samples() -> (DigitConstraintSet, Vec<FactoradicReal>) {
    let set = DigitConstraintSet::new(n2(), weights("n2"));
    let samples = (0..100).map(|k| set.sample_stream(950, 2024, k).unwrap()).collect();
    (set, samples)
}

/// 2. The bound on E(n², n²) for 100 samples at depth 950, N ≤ 30.
fn bound_on_e(set: &DigitConstraintSet, samples: &[FactoradicReal]) -> Outcome {
    let mut min_slack = f64::INFINITY;
    for (k, alpha) in samples.iter().enumerate() {
        let sum = af_sum_factoradic(set.growth(), alpha, 30).map_err(|e| e.to_string())?;
        ensure(sum.phase_error < 1e-9, || format!("sample {k}: phase error {}", sum.phase_error))?;
        let angle = Angle::factoradic(alpha.clone()).map_err(|e| e.to_string())?;
        for (n, s) in (1..=30u64).zip(&sum.prefixes) {
            let bound = bound_theoretical(set.growth(), set.weights(), &angle, n).map_err(|e| e.to_string())?;
            let lhs = s.norm() + sum.phase_error;
            ensure(lhs <= bound, || format!("sample {k}, N={n}: {lhs} > {bound}"))?;
            min_slack = min_slack.min(bound - lhs);
        }
    }
    Ok(format!("{} samples x 30 N, min slack {min_slack:.3}", samples.len()))
}

/// 3. `{f(n)! α} ≤ 1/a_n + e/(f(n)+1)`, exactly, for the same samples.
fn digit_tail_estimate(set: &DigitConstraintSet, samples: &[FactoradicReal]) -> Outcome {
    let mut checks = 0;
    for (k, alpha) in samples.iter().enumerate() {
        for n in 1..=30u64 {
            let m = set.growth().eval(n).unwrap() as usize;
            let (value, err) = alpha.frac_factorial(m).map_err(|e| e.to_string())?;
            let rhs = digit_tail_bound(set.growth(), set.weights(), n).map_err(|e| e.to_string())?;
            ensure(&value + &err <= rhs, || format!("sample {k}, n={n}: {} > {}", value + &err, rhs))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} exact comparisons, 0 violations"))
}

/// 4. `Σ_{n=N+1}^{M} (n−1)/n! = 1/N! − 1/M!` for 2 ≤ N < M ≤ 20.
fn tail_equality() -> Outcome {
    let inv_fact = |n: usize| BigRational::new(BigInt::one(), BigInt::from(factorial(n)));
    let mut pairs = 0;
    for big_n in 2..20 {
        for m in big_n + 1..=20 {
            let lhs = (big_n + 1..=m)
                .map(|n| inv_fact(n) * BigInt::from(n - 1))
                .fold(BigRational::zero(), |a, b| a + b);
            ensure(lhs == inv_fact(big_n) - inv_fact(m), || format!("N={big_n}, M={m}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} (N, M) pairs exact"))
}

/// 5. Round trips on denominators dividing 12!; `{m! p/q}` by residues for q ≤ 100, m ≤ 12.
fn factoradic_round_trip_and_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // 12! = 2^10 3^5 5^2 7 11
    let primes = [(2u64, 10u32), (3, 5), (5, 2), (7, 1), (11, 1)];
    for t in 0..1000 {
        let q: u64 = primes.iter().map(|&(p, k)| p.pow(rng.gen_range(0..=k))).product();
        let p = rng.gen_range(0..q);
        let x = BigRational::new(BigInt::from(p), BigInt::from(q));
        let f = FactoradicReal::encode(&x, 12).map_err(|e| e.to_string())?;
        ensure(f.tail() == TailPolicy::Zero, || format!("trial {t}: {x} did not terminate by depth 12"))?;
        let (lo, hi) = f.decode();
        ensure(lo == x && hi == x, || format!("trial {t}: {x} decoded to [{lo}, {hi}]"))?;
    }
    let mut pairs = 0;
    for q in 1u64..=100 {
        for p in 0..q {
            let x = BigRational::new(BigInt::from(p), BigInt::from(q));
            let f = FactoradicReal::encode(&x, 100).map_err(|e| e.to_string())?;
            for m in 1..=12usize {
                let (value, err) = f.frac_factorial(m).map_err(|e| e.to_string())?;
                let oracle = BigRational::new(BigInt::from((factorial(m) * BigUint::from(p)) % BigUint::from(q)), BigInt::from(q));
                ensure(value == oracle && err.is_zero(), || format!("{p}/{q}, m={m}: {value} vs {oracle}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("1000 round trips, {pairs} oracle pairs exact"))
}

/// 6. `conj S_A(α, N) = S_A(1 − α, N)` for 10³ random cases.
fn symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for t in 0..1000 {
        let n = rng.gen_range(1..=10_000u64);
        let density = rng.gen_range(0.01..0.9);
        let set: Vec<u64> = (1..=10_000).filter(|_| rng.gen_bool(density)).collect();
        let alpha = if t % 4 == 3 {
            let digits: Vec<u32> = (2..=30u32).map(|m| rng.gen_range(0..m)).collect();
            Angle::factoradic(FactoradicReal::from_digits(&digits, TailPolicy::Unknown).unwrap()).unwrap()
        } else {
            let q = rng.gen_range(2..=1_000_000i64);
            Angle::from_ratio(rng.gen_range(1..q), q).unwrap()
        };
        let (lhs, rhs) = symmetry_check(set, &alpha, n).map_err(|e| e.to_string())?;
        let diff = (lhs - rhs).norm();
        ensure(diff <= 1e-9, || format!("trial {t}: |diff| = {diff}"))?;
        worst = worst.max(diff);
    }
    Ok(format!("1000 trials, max |diff| = {worst:.2e}"))
}

/// 7. A = {3n}: linear growth at 1/3, bounded at 1/4.
fn counterexample() -> Outcome {
    let third = Angle::from_ratio(1, 3).unwrap();
    let quarter = Angle::from_ratio(1, 4).unwrap();
    let at_third = qn_counterexample_sup(3, &third, 30_000).map_err(|e| e.to_string())?;
    ensure(at_third == 10_000.0, || format!("sup at 1/3 = {at_third}, expected 10000"))?;
    let at_quarter = qn_counterexample_sup(3, &quarter, 30_000).map_err(|e| e.to_string())?;
    let bound = 2.0 / (e(0.75) - Complex64::new(1.0, 0.0)).norm() + 1.0;
    ensure(at_quarter <= bound, || format!("sup at 1/4 = {at_quarter} > {bound}"))?;
    Ok(format!("sup(1/3) = {at_third}, sup(1/4) = {at_quarter:.4} <= {bound:.4}"))
}

/// Number of depth-`j` tuples within the caps of `E(n², a)`, by scanning
/// every one of the `j!` tuples with caps recomputed from the definition.
fn brute_force_count(a: &WeightSequence, j: usize) -> u64 {
    let mut caps = vec![u64::MAX; j + 1];
    let mut i = 1u64;
    while (i * i + 1) as usize <= j {
        caps[(i * i + 1) as usize] = (i * i + 1) / a.eval(i).unwrap();
        i += 1;
    }
    let mut digits = vec![0u64; j + 1];
    let mut count = 0;
    loop {
        if (2..=j).all(|m| digits[m] <= caps[m]) {
            count += 1;
        }
        let mut m = j;
        loop {
            if m < 2 {
                return count;
            }
            digits[m] += 1;
            if digits[m] < m as u64 {
                break;
            }
            digits[m] = 0;
            m -= 1;
        }
    }
}

/// 8. Counts against enumeration for j ≤ 9; total mass and subdivision for i ≤ 8.
fn cylinder_counting() -> Outcome {
    for name in ["n2", "n3", "pow2"] {
        let set = DigitConstraintSet::new(n2(), weights(name));
        for j in 2..=9 {
            let exact = count_cylinders(&set, j).map_err(|e| e.to_string())?;
            let brute = brute_force_count(set.weights(), j);
            ensure(exact == BigUint::from(brute), || format!("a={name}, j={j}: {exact} vs {brute}"))?;
        }
        for i in 2..=8 {
            let mut total = BigRational::zero();
            for digits in cylinders(&set, i) {
                let alpha = FactoradicReal::from_digits(&digits, TailPolicy::Zero).unwrap();
                let mu = measure_of_cylinder(&set, &alpha, i).map_err(|e| e.to_string())?;
                // children at depth i+1 that stay inside the set
                let mut children = BigRational::zero();
                for s in 0..=(i as u32) {
                    let mut child = digits.clone();
                    child.push(s);
                    let beta = FactoradicReal::from_digits(&child, TailPolicy::Zero).unwrap();
                    if let Ok(m) = measure_of_cylinder(&set, &beta, i + 1) {
                        children += m;
                    }
                }
                ensure(children == mu, || format!("a={name}, i={i}, {digits:?}: {children} != {mu}"))?;
                total += mu;
            }
            ensure(total.is_one(), || format!("a={name}, i={i}: total mass {total}"))?;
        }
    }
    Ok("3 weight choices: counts j<=9, mass and subdivision i<=8 exact".into())
}

/// 9. Exact count ≥ j!/∏(f(k)+1) for j ≤ 14.
fn count_lower_bound_holds() -> Outcome {
    for name in ["n2", "n3", "pow2"] {
        let set = DigitConstraintSet::new(n2(), weights(name));
        for j in 2..=14 {
            let exact = count_cylinders(&set, j).map_err(|e| e.to_string())?;
            let lower = count_lower_bound(set.growth(), j);
            ensure(exact >= lower, || format!("a={name}, j={j}: {exact} < {lower}"))?;
        }
    }
    let set = DigitConstraintSet::new(n2(), weights("n2"));
    let (c5, b5) = (count_cylinders(&set, 5).unwrap(), count_lower_bound(set.growth(), 5));
    ensure(c5 == BigUint::from(48u32) && b5 == BigUint::from(12u32), || format!("j=5: {c5} >= {b5}"))?;
    Ok(format!("j<=14 for 3 weights; j=5 instance {c5} >= {b5}"))
}

/// 10. Condition ii: bounded for n², unbounded for the identity.
fn condition_ii() -> Outcome {
    let mut notes = Vec::new();
    for eps in [0.1, 0.5, 0.9] {
        let report = condition_ii_check(&n2(), eps, 10_000).map_err(|e| e.to_string())?;
        ensure(report.attained_at <= 10_000 && report.decreasing_after_sup(), || {
            format!("eps={eps}: max at {} not followed by a decrease", report.attained_at)
        })?;
        notes.push(format!("eps={eps}: i*={}", report.attained_at));
    }
    let id = GrowthFunction::by_name("id").unwrap();
    let report = condition_ii_check(&id, 0.5, 100).map_err(|e| e.to_string())?;
    ensure(report.g(100) > report.g(10) + 50.0, || format!("identity: g(100)={} g(10)={}", report.g(100), report.g(10)))?;
    notes.push(format!("identity g(100)-g(10)={:.1}", report.g(100) - report.g(10)));
    Ok(notes.join(", "))
}

/// 11. The full-dimension proxy for E(n², n²).
fn dimension_trend() -> Outcome {
    let start = Instant::now();
    let set = DigitConstraintSet::new(n2(), weights("n2"));
    let series = dimension_lower_estimate(&set, 200).map_err(|e| e.to_string())?;
    let r = |j: usize| series[j - 2].1;
    ensure(r(5) >= 0.80, || format!("r(5) = {}", r(5)))?;
    ensure(r(200) >= 0.95, || format!("r(200) = {}", r(200)))?;
    ensure(r(200) > r(50), || format!("r(200) = {} <= r(50) = {}", r(200), r(50)))?;
    // lower envelope: the values at constrained positions i² + 1 ≥ 5
    let envelope: Vec<f64> = set.constraints(200).iter().filter(|&&(m, _)| m >= 5).map(|&(m, _)| r(m)).collect();
    ensure(envelope.windows(2).all(|w| w[1] > w[0]), || format!("envelope not increasing: {envelope:?}"))?;
    ensure(series.iter().all(|&(_, v)| v <= 1.0), || "ratio above 1".into())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed <= 10.0, || format!("took {elapsed:.1}s"))?;
    Ok(format!("r(5)={:.4}, r(50)={:.4}, r(200)={:.4}", r(5), r(50), r(200)))
}

/// 12. Collapse iff the block is constant; pole growth at e(1/3).
fn period_collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut collapsed, mut kept) = (0, 0);
    for t in 0..1000 {
        let pre_len = rng.gen_range(0..20usize);
        let block_len = rng.gen_range(1..=10usize);
        let pre: Vec<u8> = (0..pre_len).map(|_| rng.gen_range(0..2)).collect();
        let block: Vec<u8> = (0..block_len).map(|_| rng.gen_range(0..2)).collect();
        let values: Vec<u8> = (0..200)
            .map(|n| if n == 0 { 0 } else if n < pre_len { pre[n] } else { block[(n - pre_len) % block_len] })
            .collect();
        let c = CoefficientSequence::binary(&values).unwrap();
        let (k, q) = detect_ultimate_period(&c, 40, 20)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("trial {t}: no period found"))?;
        let collapse = period_collapse_test(&c, k, q).map_err(|e| e.to_string())?;
        let block_constant = values[k..k + q].iter().all(|&v| v == values[k]);
        let scan_constant = values[k..].iter().all(|&v| v == values[k]);
        ensure(collapse == block_constant && collapse == scan_constant, || {
            format!("trial {t}: (K,q)=({k},{q}) collapse={collapse} scan={scan_constant}")
        })?;
        if collapse {
            collapsed += 1;
        } else {
            kept += 1;
        }
    }

    let block = [1u8, 0, 0];
    let values: Vec<u8> = (0..60_001).map(|n| if n == 0 { 0 } else { block[(n - 1) % 3] }).collect();
    let c = CoefficientSequence::binary(&values).unwrap();
    let third = 1.0 / 3.0;
    let spec = SectorSpec::new(third - 1e-4, third + 1e-4, vec![0.9, 0.99, 0.999], 3).map_err(|e| e.to_string())?;
    let grid = sector_eval(&c, &spec, 60_000).map_err(|e| e.to_string())?;
    let m = grid.max_modulus_by_radius();
    ensure(m[1] >= 5.0 * m[0] && m[2] >= 5.0 * m[1], || format!("pole growth {m:?}"))?;
    Ok(format!(
        "1000 sequences ({collapsed} collapse, {kept} not); pole moduli {:.2} -> {:.2} -> {:.2}",
        m[0], m[1], m[2]
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (set, samples) = e_samples();
    let criteria: Vec<Criterion> = vec![
        ("1 rational boundedness of A(n^2), q<=20, N<=1e5", Box::new(rational_boundedness)),
        ("2 bound on E(n^2,n^2), 100 samples, N<=30", Box::new(|| bound_on_e(&set, &samples))),
        ("3 digit-tail estimate, exact", Box::new(|| digit_tail_estimate(&set, &samples))),
        ("4 factorial tail equality", Box::new(tail_equality)),
        ("5 factoradic round trip and oracle", Box::new(factoradic_round_trip_and_oracle)),
        ("6 conjugate symmetry", Box::new(symmetry)),
        ("7 {3n} counterexample", Box::new(counterexample)),
        ("8 cylinder counts, mass, subdivision", Box::new(cylinder_counting)),
        ("9 count lower bound", Box::new(count_lower_bound_holds)),
        ("10 condition ii", Box::new(condition_ii)),
        ("11 dimension trend", Box::new(dimension_trend)),
        ("12 period collapse and pole growth", Box::new(period_collapse)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.2}s): {detail}");
            }
        }
    }
    println!(
        "{} passed, {failed} failed, total {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
