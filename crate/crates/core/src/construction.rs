//! The sets `A(f) = {n + f(n)! : n ∈ ℕ}` and `E(f, a)`, and sums over `A(f)`.
//!
//! `ℕ` starts at 1 throughout. The `af_sum_*` functions are indexed by `n`
//! (`Σ_{n≤N} e((n + f(n)!)α)`); [`af_elements_up_to`] gives the element
//! threshold view used by `S_A(α, N)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expsum::{dirichlet_bound, e, Angle, SumTrace};
use crate::factoradic::{frac, ExactFraction, FactoradicReal, TailPolicy};

/// Default budget for materialized big integers, in bits.
pub const DEFAULT_BIT_BUDGET: u64 = 10_000_000;

/// Rational upper bound for Euler's number, used where the comparison must be exact.
pub fn e_upper() -> ExactFraction {
    BigRational::new(BigInt::from(271_828_182_846u64), BigInt::from(100_000_000_000u64))
}

pub const GROWTH_NAMES: &[&str] = &["id", "n2", "n3", "pow2"];
pub const WEIGHT_NAMES: &[&str] = &["n2", "n3", "pow2"];

type IntFn = Arc<dyn Fn(u64) -> Option<u64> + Send + Sync>;

/// A strictly increasing `f: ℕ → ℕ` with `f(1) ≥ 1`. Values that overflow
/// `u64` evaluate to `None`.
#[derive(Clone)]
pub struct GrowthFunction {
    name: String,
    f: IntFn,
}

impl fmt::Debug for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("GrowthFunction").field(&self.name).finish()
    }
}

impl GrowthFunction {
    /// Looks up a registry entry: `id`, `n2`, `n3` or `pow2`.
    pub fn by_name(name: &str) -> Result<Self> {
        let f: IntFn = match name {
            "id" | "identity" => Arc::new(Some),
            "n2" => Arc::new(|n: u64| n.checked_mul(n)),
            "n3" => Arc::new(|n: u64| n.checked_mul(n)?.checked_mul(n)),
            "pow2" => Arc::new(|n: u64| if n < 64 { Some(1u64 << n) } else { None }),
            _ => {
                return Err(Error::UnknownName {
                    kind: "growth function",
                    name: name.to_string(),
                    known: GROWTH_NAMES.join(", "),
                })
            }
        };
        Ok(Self { name: name.to_string(), f })
    }

    /// A user-supplied growth function.
    pub fn custom(name: impl Into<String>, f: impl Fn(u64) -> Option<u64> + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, n: u64) -> Option<u64> {
        (self.f)(n)
    }

    /// Checks `f(1) ≥ 1`, strict increase, and `f(n) ≥ n` for `n ≤ limit`.
    pub fn check_strictly_increasing(&self, limit: u64) -> Result<()> {
        let mut prev = 0u64;
        for n in 1..=limit {
            let v = self
                .eval(n)
                .ok_or_else(|| Error::Domain(format!("{}({n}) overflows u64", self.name)))?;
            if v <= prev && n > 1 {
                return Err(Error::Domain(format!("{} is not strictly increasing at n = {n}", self.name)));
            }
            if v < n {
                return Err(Error::Domain(format!("{}({n}) = {v} < {n}", self.name)));
            }
            prev = v;
        }
        Ok(())
    }
}

/// A positive integer sequence `a` with `Σ 1/a_n` below a declared limit.
#[derive(Clone)]
pub struct WeightSequence {
    name: String,
    a: IntFn,
    limit: ExactFraction,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence").field("name", &self.name).field("limit", &self.limit).finish()
    }
}

impl WeightSequence {
    /// Registry entries: `n2` (limit 2), `n3` (limit 5/4), `pow2` (limit 1).
    pub fn by_name(name: &str) -> Result<Self> {
        let (a, limit): (IntFn, (i64, i64)) = match name {
            "n2" => (Arc::new(|n: u64| n.checked_mul(n)), (2, 1)),
            "n3" => (Arc::new(|n: u64| n.checked_mul(n)?.checked_mul(n)), (5, 4)),
            "pow2" => (Arc::new(|n: u64| if n < 64 { Some(1u64 << n) } else { None }), (1, 1)),
            _ => {
                return Err(Error::UnknownName {
                    kind: "weight sequence",
                    name: name.to_string(),
                    known: WEIGHT_NAMES.join(", "),
                })
            }
        };
        Ok(Self {
            name: name.to_string(),
            a,
            limit: BigRational::new(limit.0.into(), limit.1.into()),
        })
    }

    pub fn custom(
        name: impl Into<String>,
        a: impl Fn(u64) -> Option<u64> + Send + Sync + 'static,
        limit: ExactFraction,
    ) -> Self {
        Self { name: name.into(), a: Arc::new(a), limit }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `a_n`; `None` past `u64`.
    pub fn eval(&self, n: u64) -> Option<u64> {
        (self.a)(n)
    }

    pub fn declared_limit(&self) -> &ExactFraction {
        &self.limit
    }

    /// `Σ_{n≤N} 1/a_n`, exact. Terms past `u64` are below `2^-64` and are dropped.
    pub fn partial_sum_reciprocals(&self, n_max: u64) -> ExactFraction {
        (1..=n_max)
            .filter_map(|n| self.eval(n))
            .map(|a| BigRational::new(BigInt::one(), BigInt::from(a)))
            .fold(BigRational::zero(), |acc, t| acc + t)
    }

    /// Checks positivity and that the partial sums stay below the declared limit.
    pub fn check_declared_limit(&self, n_max: u64) -> Result<()> {
        let mut sum = BigRational::zero();
        for n in 1..=n_max {
            match self.eval(n) {
                Some(0) => return Err(Error::Domain(format!("{}({n}) = 0", self.name))),
                Some(a) => sum += BigRational::new(BigInt::one(), BigInt::from(a)),
                None => break,
            }
            if sum >= self.limit {
                return Err(Error::Domain(format!(
                    "partial sum of 1/{} reaches the declared limit {} at n = {n}",
                    self.name, self.limit
                )));
            }
        }
        Ok(())
    }
}

/// `E(f, a)`: reals whose digit at each position `f(i) + 1` is at most
/// `⌊(f(i) + 1)/a_i⌋`.
#[derive(Debug, Clone)]
pub struct DigitConstraintSet {
    f: GrowthFunction,
    a: WeightSequence,
}

/// Three-valued answer for membership in `E(f, a) ∪ {0}` from a digit prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out { position: usize },
    UnknownAtDepth(usize),
}

impl DigitConstraintSet {
    pub fn new(f: GrowthFunction, a: WeightSequence) -> Self {
        Self { f, a }
    }

    pub fn growth(&self) -> &GrowthFunction {
        &self.f
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.a
    }

    /// `⌊(f(i) + 1)/a_i⌋`.
    pub fn cap(&self, i: u64) -> Option<u64> {
        let m = self.f.eval(i)?.checked_add(1)?;
        Some(match self.a.eval(i) {
            Some(a) if a > 0 => m / a,
            _ => 0,
        })
    }

    /// `(position, cap)` for every constrained position `f(i) + 1 ≤ depth`,
    /// in increasing order.
    pub fn constraints(&self, depth: usize) -> Vec<(usize, u64)> {
        let mut out = Vec::new();
        for i in 1.. {
            let Some(m) = self.f.eval(i).and_then(|v| v.checked_add(1)) else { break };
            if m > depth as u64 {
                break;
            }
            out.push((m as usize, self.cap(i).unwrap_or(0)));
        }
        out
    }

    /// Largest allowed digit at each position `2..=depth` (index 0 is position 2).
    pub fn max_digits(&self, depth: usize) -> Vec<u64> {
        let mut max: Vec<u64> = (2..=depth as u64).map(|m| m - 1).collect();
        for (m, cap) in self.constraints(depth) {
            let slot = &mut max[m - 2];
            *slot = (*slot).min(cap);
        }
        max
    }

    /// Number of allowed digits at each position `2..=depth`.
    pub fn allowed_counts(&self, depth: usize) -> Vec<u64> {
        self.max_digits(depth).into_iter().map(|d| d + 1).collect()
    }

    /// Membership of a factoradic value in `E(f, a) ∪ {0}`.
    pub fn membership(&self, alpha: &FactoradicReal) -> Membership {
        for (m, cap) in self.constraints(alpha.depth()) {
            if u64::from(alpha.digit(m).unwrap_or(0)) > cap {
                return Membership::Out { position: m };
            }
        }
        match alpha.tail() {
            TailPolicy::Zero => Membership::In,
            TailPolicy::Unknown => Membership::UnknownAtDepth(alpha.depth()),
        }
    }

    /// A uniformly random depth-`depth` cylinder representative of `E(f, a)`,
    /// deterministic in `seed`. Zero is rejected and redrawn.
    pub fn sample(&self, depth: usize, seed: u64) -> Result<FactoradicReal> {
        self.sample_stream(depth, seed, 0)
    }

    /// Like [`sample`](Self::sample) but on an independent ChaCha stream, so
    /// batches can be drawn in any order.
    pub fn sample_stream(&self, depth: usize, seed: u64, stream: u64) -> Result<FactoradicReal> {
        if depth < 2 {
            return Err(Error::Domain(format!("depth must be >= 2, got {depth}")));
        }
        let max = self.max_digits(depth);
        if max.iter().all(|&d| d == 0) {
            return Err(Error::EmptySample(format!(
                "every position up to depth {depth} only allows the digit 0"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        loop {
            let digits: Vec<u32> = max.iter().map(|&d| rng.gen_range(0..=d) as u32).collect();
            if digits.iter().any(|&d| d != 0) {
                return FactoradicReal::from_digits(&digits, TailPolicy::Zero);
            }
        }
    }
}

/// `f(n)` as a digit position, or the depth error the factoradic path needs.
fn position_of(f: &GrowthFunction, n: u64) -> Result<usize> {
    f.eval(n)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::Domain(format!("{}({n}) does not fit a digit position", f.name())))
}

/// Estimated bit length of `m!`, rounded up.
fn factorial_bits(m: u64) -> u64 {
    if m < 2 {
        return 1;
    }
    if m <= 1_000_000 {
        let bits: f64 = (2..=m).map(|k| (k as f64).log2()).sum();
        return bits.ceil() as u64 + 1;
    }
    let m = m as f64;
    let ln = m * m.ln() - m + 0.5 * (2.0 * PI * m).ln() + 1.0 / (12.0 * m);
    (ln / std::f64::consts::LN_2).ceil() as u64 + 1
}

/// Fails with [`Error::BitBudget`] when `f(n_max)!` would exceed `bit_budget`
/// bits; returns the estimate otherwise.
pub fn check_bit_budget(f: &GrowthFunction, n_max: u64, bit_budget: u64) -> Result<u64> {
    let top = f.eval(n_max).ok_or(Error::BitBudget { needed: u64::MAX, budget: bit_budget })?;
    let needed = factorial_bits(top);
    if needed > bit_budget {
        return Err(Error::BitBudget { needed, budget: bit_budget });
    }
    Ok(needed)
}

/// `n + f(n)!` for `n = 1..=n_max`, as exact big integers.
pub fn af_elements(f: &GrowthFunction, n_max: u64, bit_budget: u64) -> Result<Vec<BigUint>> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be >= 1".into()));
    }
    check_bit_budget(f, n_max, bit_budget)?;
    let mut out = Vec::with_capacity(n_max as usize);
    let mut fact = BigUint::one();
    let mut done = 1u64;
    for n in 1..=n_max {
        let m = f.eval(n).expect("below f(n_max)");
        while done < m {
            done += 1;
            fact *= BigUint::from(done);
        }
        out.push(&fact + BigUint::from(n));
    }
    Ok(out)
}

/// Elements of `A(f)` that are `≤ bound`, in increasing order.
pub fn af_elements_up_to(f: &GrowthFunction, bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut fact = 1u64;
    let mut done = 1u64;
    for n in 1.. {
        let Some(m) = f.eval(n) else { break };
        let mut overflow = false;
        while done < m {
            done += 1;
            match fact.checked_mul(done) {
                Some(v) => fact = v,
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        match fact.checked_add(n) {
            Some(v) if !overflow && v <= bound => out.push(v),
            _ => break,
        }
    }
    out
}

/// Incremental `f(n)! mod q` along increasing `n`. Once the residue hits 0 it
/// stays 0, so at most `q` multiplications are ever done.
struct FactorialResidues<'a> {
    f: &'a GrowthFunction,
    q: u64,
    done: u64,
    residue: u64,
}

impl<'a> FactorialResidues<'a> {
    fn new(f: &'a GrowthFunction, q: u64) -> Self {
        Self { f, q, done: 1, residue: 1 % q }
    }

    fn at(&mut self, n: u64) -> u64 {
        // overflowing f(n) is certainly >= q
        let target = self.f.eval(n).unwrap_or(u64::MAX);
        while self.residue != 0 && self.done < target {
            self.done += 1;
            self.residue = ((u128::from(self.residue) * u128::from(self.done % self.q)) % u128::from(self.q)) as u64;
        }
        self.residue
    }
}

/// `e(k/q)` for `k < q`, tabulated when `q` is small.
struct RootTable {
    q: u64,
    table: Vec<Complex64>,
}

impl RootTable {
    const MAX_TABLE: u64 = 1 << 16;

    fn new(q: u64) -> Self {
        let table = if q <= Self::MAX_TABLE {
            (0..q).map(|k| e(k as f64 / q as f64)).collect()
        } else {
            Vec::new()
        };
        Self { q, table }
    }

    #[inline]
    fn get(&self, k: u64) -> Complex64 {
        match self.table.get(k as usize) {
            Some(&z) => z,
            None => e(k as f64 / self.q as f64),
        }
    }
}

/// `Σ_{n≤N} e((n + f(n)!) p/q)` with each phase reduced exactly mod `q`.
pub fn af_sum_rational(f: &GrowthFunction, p: u64, q: u64, n_max: u64) -> Result<(Complex64, SumTrace)> {
    let trace = af_sum_rational_observed(f, p, q, n_max, |_| {})?;
    Ok((trace.partial_sum(), trace))
}

/// [`af_sum_rational`], calling `observe` after every term.
pub fn af_sum_rational_observed(
    f: &GrowthFunction,
    p: u64,
    q: u64,
    n_max: u64,
    mut observe: impl FnMut(&SumTrace),
) -> Result<SumTrace> {
    if q < 2 {
        return Err(Error::Domain(format!("q must be >= 2, got {q}")));
    }
    if p == 0 || p >= q {
        return Err(Error::Domain(format!("need 0 < p < q, got {p}/{q}")));
    }
    if n_max < 1 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let roots = RootTable::new(q);
    let mut residues = FactorialResidues::new(f, q);
    let mut trace = SumTrace::new();
    for n in 1..=n_max {
        let shift = (n % q + residues.at(n)) % q;
        let k = ((u128::from(shift) * u128::from(p)) % u128::from(q)) as u64;
        trace.push(roots.get(k));
        observe(&trace);
    }
    Ok(trace)
}

/// Result of summing over `A(f)` at a factoradic angle.
#[derive(Debug, Clone)]
pub struct FactoradicSum {
    pub sum: Complex64,
    /// Bound on `|computed − true|` accumulated from unknown digit tails.
    pub phase_error: f64,
    pub trace: SumTrace,
    /// Partial sums for `N' = 1..=N`.
    pub prefixes: Vec<Complex64>,
    /// `{f(n)! α}` lower ends and their error bounds, for `n = 1..=N`.
    pub frac_parts: Vec<(ExactFraction, ExactFraction)>,
}

/// `Σ_{n≤N} e((n + f(n)!)α)` where `{f(n)! α}` comes from the digits and
/// `{nα}` from the exact lower end of `α`.
pub fn af_sum_factoradic(f: &GrowthFunction, alpha: &FactoradicReal, n_max: u64) -> Result<FactoradicSum> {
    af_sum_factoradic_observed(f, alpha, n_max, |_| {})
}

/// [`af_sum_factoradic`], calling `observe` after every term.
pub fn af_sum_factoradic_observed(
    f: &GrowthFunction,
    alpha: &FactoradicReal,
    n_max: u64,
    mut observe: impl FnMut(&SumTrace),
) -> Result<FactoradicSum> {
    if n_max < 1 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let ms: Vec<usize> = (1..=n_max).map(|n| position_of(f, n)).collect::<Result<_>>()?;
    let top = *ms.last().expect("n_max >= 1");
    if alpha.tail() == TailPolicy::Unknown && top >= alpha.depth() {
        return Err(Error::InsufficientDepth { required: top + 1, available: alpha.depth() });
    }
    let frac_parts = alpha.frac_factorials(&ms)?;
    let (lower, upper) = alpha.decode();
    let width = upper - &lower;

    let mut trace = SumTrace::new();
    let mut prefixes = Vec::with_capacity(ms.len());
    let mut phase_error = 0.0;
    for (n, (value, err)) in (1..=n_max).zip(&frac_parts) {
        let phase = frac(&(&lower * BigInt::from(n) + value));
        trace.push_turns(phase.to_f64().unwrap_or(f64::NAN));
        prefixes.push(trace.partial_sum());
        observe(&trace);
        if !(width.is_zero() && err.is_zero()) {
            let turns = &width * BigInt::from(n) + err;
            phase_error += 2.0 * PI * turns.to_f64().unwrap_or(f64::INFINITY);
        }
    }
    Ok(FactoradicSum { sum: trace.partial_sum(), phase_error, trace, prefixes, frac_parts })
}

/// `(2/|e(α)−1|)(1 + 4π Σ_{n≤N}(1/a_n + e/(f(n)+1)))`, with both partial sums
/// formed exactly before conversion.
pub fn bound_theoretical(f: &GrowthFunction, a: &WeightSequence, alpha: &Angle, n_max: u64) -> Result<f64> {
    if n_max < 1 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let reciprocal_a = a.partial_sum_reciprocals(n_max);
    let reciprocal_f = (1..=n_max)
        .map(|n| {
            f.eval(n)
                .map(|v| BigRational::new(BigInt::one(), BigInt::from(v) + 1))
                .ok_or_else(|| Error::Domain(format!("{}({n}) overflows u64", f.name())))
        })
        .try_fold(BigRational::zero(), |acc, t| t.map(|t| acc + t))?;
    let inner = reciprocal_a.to_f64().unwrap_or(f64::NAN) + std::f64::consts::E * reciprocal_f.to_f64().unwrap_or(f64::NAN);
    Ok(dirichlet_bound(alpha) * (1.0 + 4.0 * PI * inner))
}

/// Right side of the digit-tail estimate `{f(n)! α} ≤ 1/a_n + e/(f(n)+1)`,
/// with `e` replaced by [`e_upper`].
pub fn digit_tail_bound(f: &GrowthFunction, a: &WeightSequence, n: u64) -> Result<ExactFraction> {
    let fv = f.eval(n).ok_or_else(|| Error::Domain(format!("{}({n}) overflows u64", f.name())))?;
    let av = a.eval(n).ok_or_else(|| Error::Domain(format!("{}({n}) overflows u64", a.name())))?;
    if av == 0 {
        return Err(Error::Domain(format!("{}({n}) = 0", a.name())));
    }
    Ok(BigRational::new(BigInt::one(), BigInt::from(av)) + e_upper() / BigInt::from(u128::from(fv) + 1))
}
