//! Cylinder counts and the cylinder measure on `E(f, a) ∪ {0}`.
//!
//! `Z_i` is the set of depth-`i` rationals (digits vanish past position `i`).
//! Each `α ∈ (E ∪ {0}) ∩ Z_i` owns the open cylinder `(α, α + 1/i!)`, and the
//! measure `μ` gives every one of them the same mass `1/#((E ∪ {0}) ∩ Z_i)`.
//! Since the allowed digits at each position do not depend on earlier digits,
//! the count is an exact product and every `μ` value below is an exact
//! rational.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::construction::{DigitConstraintSet, GrowthFunction, Membership};
use crate::error::{Error, Result};
use crate::factoradic::{factorial, ExactFraction, FactoradicReal, TailPolicy};

/// `#((E ∪ {0}) ∩ Z_j)`: the product over positions `2..=j` of the number of
/// allowed digits.
pub fn count_cylinders(set: &DigitConstraintSet, j: usize) -> Result<BigUint> {
    if j < 2 {
        return Err(Error::Domain(format!("depth must be >= 2, got {j}")));
    }
    Ok(set.allowed_counts(j).into_iter().map(BigUint::from).product())
}

/// `j! / ∏_{f(k)+1≤j} (f(k)+1)` rounded up, the lower bound every exact count
/// must meet.
pub fn count_lower_bound(f: &GrowthFunction, j: usize) -> BigUint {
    let denom: BigUint = (1..)
        .map_while(|k| f.eval(k).and_then(|v| v.checked_add(1)).filter(|&m| m <= j as u64))
        .map(BigUint::from)
        .product();
    let num = factorial(j);
    (&num + &denom - 1u32) / denom
}

/// `μ((α, α + 1/i!)) = 1 / #((E ∪ {0}) ∩ Z_i)`.
pub fn measure_of_cylinder(set: &DigitConstraintSet, alpha: &FactoradicReal, i: usize) -> Result<ExactFraction> {
    if alpha.tail() != TailPolicy::Zero || alpha.nonzero_digits().any(|(p, _)| p > i) {
        return Err(Error::Membership(format!("alpha is not in Z_{i}")));
    }
    let at_depth = alpha.with_depth(i.max(2))?;
    if let Membership::Out { position } = set.membership(&at_depth) {
        return Err(Error::Membership(format!("digit at position {position} exceeds its cap")));
    }
    let count = count_cylinders(set, i)?;
    Ok(BigRational::new(BigInt::one(), BigInt::from(count)))
}

/// Every digit tuple `(s_2, …, s_i)` of `(E ∪ {0}) ∩ Z_i`, in increasing order
/// of value.
pub fn cylinders(set: &DigitConstraintSet, i: usize) -> impl Iterator<Item = Vec<u32>> {
    let max: Vec<u32> = set.max_digits(i).into_iter().map(|d| d as u32).collect();
    let mut next = Some(vec![0u32; max.len()]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut digits = current.clone();
        for k in (0..digits.len()).rev() {
            if digits[k] < max[k] {
                digits[k] += 1;
                next = Some(digits);
                break;
            }
            digits[k] = 0;
        }
        Some(current)
    })
}

/// Counts allowed depth-`k` tuples whose value is `< x`, for `x ∈ Z_k ∪ {1}`.
fn count_below(set: &DigitConstraintSet, x: &ExactFraction, k: usize) -> Result<BigUint> {
    if x >= &BigRational::one() {
        return count_cylinders(set, k);
    }
    let digits = FactoradicReal::encode(x, k)?;
    if digits.tail() != TailPolicy::Zero {
        return Err(Error::Domain(format!("{x} is not in Z_{k}")));
    }
    let max = set.max_digits(k);
    // suffix[t] = number of allowed tuples for positions t+2..=k
    let mut suffix = vec![BigUint::one(); max.len() + 1];
    for t in (0..max.len()).rev() {
        suffix[t] = &suffix[t + 1] * BigUint::from(max[t] + 1);
    }
    let mut below = BigUint::zero();
    for (t, &cap) in max.iter().enumerate() {
        let d = u64::from(digits.digit(t + 2).unwrap_or(0));
        below += &suffix[t + 1] * BigUint::from(d.min(cap + 1));
        if d > cap {
            break;
        }
    }
    Ok(below)
}

/// `μ([lo, hi])` for `0 ≤ lo ≤ hi ≤ 1` with both ends in `Z_k`.
///
/// `μ` has no atoms, so this is the mass of the depth-`k` cylinders starting
/// in `[lo, hi)`.
pub fn measure_of_interval(set: &DigitConstraintSet, lo: &ExactFraction, hi: &ExactFraction, k: usize) -> Result<ExactFraction> {
    if lo > hi || lo < &BigRational::zero() || hi > &BigRational::one() {
        return Err(Error::Domain(format!("[{lo}, {hi}] is not a sub-interval of [0, 1]")));
    }
    let inside = count_below(set, hi, k)? - count_below(set, lo, k)?;
    Ok(BigRational::new(BigInt::from(inside), BigInt::from(count_cylinders(set, k)?)))
}

/// Natural log of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::NAN, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn ln_ratio(x: &ExactFraction) -> f64 {
    ln_big(x.numer().magnitude()) - ln_big(x.denom().magnitude())
}

/// `ln j!` as a sum of per-factor logs.
fn ln_factorial(j: usize) -> f64 {
    (2..=j).map(|k| (k as f64).ln()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `μ(B) ≤ (|B|(i+1)! + 2) / #((E ∪ {0}) ∩ Z_{i+1})`.
    Covering,
    /// `μ(B) ≤ 3 (1/i!)^{1−s} ∏_{f(j)≤i} (f(j)+1) |B|^s`.
    Chain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub depth: usize,
    #[serde(rename = "B_lo")]
    pub b_lo: String,
    #[serde(rename = "B_hi")]
    pub b_hi: String,
    pub mu: String,
    pub bound: f64,
    pub kind: BoundKind,
}

/// Outcome of testing `μ(B) ≤ a |B|^s` on a family of intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassCheckReport {
    pub s: f64,
    pub i0: usize,
    pub i_max: usize,
    /// `max μ(B) / |B|^s` over all tested intervals.
    pub a_constant: f64,
    /// Largest `μ(B)/|B|^s` per depth `i0..i_max`.
    pub a_by_depth: Vec<f64>,
    pub intervals_tested: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MassCheckOptions {
    /// Random intervals per depth, on top of the aligned edge cases.
    pub samples_per_depth: usize,
    pub seed: u64,
    /// Endpoints are drawn from `Z_{i+1+extra_depth}`.
    pub extra_depth: usize,
}

impl Default for MassCheckOptions {
    fn default() -> Self {
        Self { samples_per_depth: 200, seed: 0, extra_depth: 2 }
    }
}

/// [`mass_check_with`] using [`MassCheckOptions::default`].
pub fn mass_check(set: &DigitConstraintSet, s: f64, i0: usize, i_max: usize) -> Result<MassCheckReport> {
    mass_check_with(set, s, i0, i_max, MassCheckOptions::default())
}

/// Tests the mass-distribution inequality at depths `i0..i_max`.
///
/// For each depth `i`, intervals with `1/(i+1)! < |B| ≤ 1/i!` are drawn with
/// endpoints on a finer grid, plus cylinder-aligned cases that straddle
/// boundaries. `μ(B)` is computed exactly and compared against the covering
/// bound and the final chain coefficient.
pub fn mass_check_with(
    set: &DigitConstraintSet,
    s: f64,
    i0: usize,
    i_max: usize,
    opts: MassCheckOptions,
) -> Result<MassCheckReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s must be in (0, 1), got {s}")));
    }
    if i0 < 1 || i0 >= i_max {
        return Err(Error::Domain(format!("need 1 <= i0 < i_max, got {i0}, {i_max}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = MassCheckReport {
        s,
        i0,
        i_max,
        a_constant: 0.0,
        a_by_depth: Vec::new(),
        intervals_tested: 0,
        violations: Vec::new(),
    };
    for i in i0..i_max {
        let k = i + 1 + opts.extra_depth;
        let fine = BigInt::from(factorial(k));
        let unit = |t: &BigInt| BigRational::new(t.clone(), fine.clone());
        // lengths in units of 1/k!: (k!/(i+1)!, k!/i!]
        let short = BigInt::from(factorial(k) / factorial(i + 1));
        let long = BigInt::from(factorial(k) / factorial(i));

        let mut family: Vec<(BigInt, BigInt)> = vec![
            (BigInt::zero(), long.clone()),
            (&fine / 2 - 1, &fine / 2 + &short),
            (&fine - &long, fine.clone()),
            (&fine / 3 - 1, &fine / 3 + &short),
        ];
        for _ in 0..opts.samples_per_depth {
            let len = random_below(&mut rng, &(&long - &short)) + &short + 1;
            let start = random_below(&mut rng, &(&fine - &len + 1));
            family.push((start.clone(), start + len));
        }

        let count_next = count_cylinders(set, i + 1)?;
        let scale_next = BigInt::from(factorial(i + 1));
        let chain_ln = 3f64.ln() - (1.0 - s) * ln_factorial(i) + product_ln(set.growth(), i);
        let mut a_depth = 0.0f64;
        for (lo, hi) in family {
            let (lo, hi) = (unit(&lo), unit(&hi));
            let width = &hi - &lo;
            let mu = measure_of_interval(set, &lo, &hi, k)?;
            report.intervals_tested += 1;

            let covering = (&width * &scale_next + BigInt::from(2)) / BigInt::from(count_next.clone());
            if mu > covering {
                report.violations.push(violation(i, &lo, &hi, &mu, covering.to_f64().unwrap_or(f64::NAN), BoundKind::Covering));
            }
            if mu.is_zero() {
                continue;
            }
            let ln_width = ln_ratio(&width);
            let ln_mu = ln_ratio(&mu);
            let ln_bound = chain_ln + s * ln_width;
            if ln_mu > ln_bound + 1e-12 * ln_bound.abs().max(1.0) {
                report.violations.push(violation(i, &lo, &hi, &mu, ln_bound.exp(), BoundKind::Chain));
            }
            a_depth = a_depth.max((ln_mu - s * ln_width).exp());
        }
        report.a_by_depth.push(a_depth);
        report.a_constant = report.a_constant.max(a_depth);
    }
    Ok(report)
}

fn violation(depth: usize, lo: &ExactFraction, hi: &ExactFraction, mu: &ExactFraction, bound: f64, kind: BoundKind) -> Violation {
    Violation { depth, b_lo: lo.to_string(), b_hi: hi.to_string(), mu: mu.to_string(), bound, kind }
}

/// `Σ_{f(j)≤i} ln(f(j)+1)`.
fn product_ln(f: &GrowthFunction, i: usize) -> f64 {
    (1..)
        .map_while(|j| f.eval(j).filter(|&v| v <= i as u64))
        .map(|v| ((v + 1) as f64).ln())
        .sum()
}

/// Uniform integer in `[0, bound)` (`bound > 0`).
fn random_below(rng: &mut ChaCha8Rng, bound: &BigInt) -> BigInt {
    let bound = bound.magnitude();
    let bits = bound.bits();
    loop {
        let words = bits.div_ceil(32) as usize;
        let mut limbs: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
        let excess = words as u64 * 32 - bits;
        if let Some(top) = limbs.last_mut() {
            *top >>= excess;
        }
        let candidate = BigUint::new(limbs);
        if &candidate < bound {
            return BigInt::from(candidate);
        }
    }
}

/// `(j, ln #((E ∪ {0}) ∩ Z_j) / ln j!)` for `j = 2..=j_max`, a full-dimension
/// proxy. Both logs are sums of per-position logs.
pub fn dimension_lower_estimate(set: &DigitConstraintSet, j_max: usize) -> Result<Vec<(usize, f64)>> {
    if j_max < 4 {
        return Err(Error::Domain(format!("j_max must be >= 4, got {j_max}")));
    }
    let counts = set.allowed_counts(j_max);
    let mut ln_count = 0.0;
    let mut ln_fact = 0.0;
    let mut out = Vec::with_capacity(j_max - 1);
    for (j, c) in (2..=j_max).zip(counts) {
        ln_count += (c as f64).ln();
        ln_fact += (j as f64).ln();
        out.push((j, ln_count / ln_fact));
    }
    Ok(out)
}

/// `g(i) = Σ_{f(j)≤i} ln(f(j)+1) − ε ln i!` for `i = 1..=i_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionIiReport {
    pub eps: f64,
    pub sup_log: f64,
    pub attained_at: usize,
    /// `values[i - 1] = g(i)`.
    pub values: Vec<f64>,
    /// The `i = f(j) ≤ i_max` where `g` jumps up.
    pub jump_points: Vec<usize>,
}

impl ConditionIiReport {
    pub fn g(&self, i: usize) -> f64 {
        self.values[i - 1]
    }

    /// Whether `g(i) < g(i*)` for every `i > i*` and the values at the jump
    /// points past `i*` strictly decrease.
    pub fn decreasing_after_sup(&self) -> bool {
        let after = &self.values[self.attained_at..];
        let below = after.iter().all(|&v| v < self.sup_log);
        let peaks: Vec<f64> = self.jump_points.iter().filter(|&&i| i > self.attained_at).map(|&i| self.g(i)).collect();
        below && peaks.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn condition_ii_check(f: &GrowthFunction, eps: f64, i_max: usize) -> Result<ConditionIiReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must be in (0, 1), got {eps}")));
    }
    if i_max < 1 {
        return Err(Error::Domain("i_max must be >= 1".into()));
    }
    let jumps: Vec<u64> = (1..).map_while(|j| f.eval(j).filter(|&v| v <= i_max as u64)).collect();
    let mut next = jumps.iter().peekable();
    let mut g = 0.0;
    let mut values = Vec::with_capacity(i_max);
    let (mut sup_log, mut attained_at) = (f64::NEG_INFINITY, 0);
    for i in 1..=i_max {
        g -= eps * (i as f64).ln();
        while let Some(&&v) = next.peek() {
            if v > i as u64 {
                break;
            }
            g += ((v + 1) as f64).ln();
            next.next();
        }
        values.push(g);
        if g > sup_log {
            sup_log = g;
            attained_at = i;
        }
    }
    Ok(ConditionIiReport {
        eps,
        sup_log,
        attained_at,
        values,
        jump_points: jumps.into_iter().map(|v| v as usize).collect(),
    })
}
