//! Partial exponential sums `S_A(α, N) = Σ_{n ∈ A, n ≤ N} e(nα)`.
//!
//! Callers hand the evaluator phases already reduced mod 1; the reduction is
//! done exactly (see [`Angle::multiple_phase`]) because `nα` for huge `n` has
//! no meaningful float representation.

use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_integer::Integer;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::factoradic::{ExactFraction, FactoradicReal};

pub const CSV_HEADER_RATIONAL: &str = "alpha_num,alpha_den,N,re,im,modulus,sup_modulus,sup_at";
pub const CSV_HEADER_DIGITS: &str = "alpha_digits_file,N,re,im,modulus,sup_modulus,sup_at";

/// `e(t) = exp(2πit)`.
#[inline]
pub fn e(turns: f64) -> Complex64 {
    let (s, c) = (TAU * turns).sin_cos();
    Complex64::new(c, s)
}

/// Neumaier-compensated accumulator for one `f64` component.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Running state of a streamed exponential sum.
///
/// `sup_modulus` is the largest `|partial sum|` seen over all prefixes so far
/// (an empirical sup, not the true `C_{A,α}`); `sup_at` is the first prefix
/// length attaining it.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SumTrace {
    re: CompensatedSum,
    im: CompensatedSum,
    count: u64,
    sup_modulus: f64,
    sup_at: u64,
}

impl SumTrace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the unit-modulus term `e(turns)`.
    #[inline]
    pub fn push_turns(&mut self, turns: f64) {
        self.push(e(turns));
    }

    #[inline]
    pub fn push(&mut self, term: Complex64) {
        self.re.add(term.re);
        self.im.add(term.im);
        self.count += 1;
        let modulus = self.partial_sum().norm();
        if modulus > self.sup_modulus {
            self.sup_modulus = modulus;
            self.sup_at = self.count;
        }
    }

    pub fn partial_sum(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn modulus(&self) -> f64 {
        self.partial_sum().norm()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn sup_modulus(&self) -> f64 {
        self.sup_modulus
    }

    pub fn sup_at(&self) -> u64 {
        self.sup_at
    }
}

/// Advances `trace` by one term per phase (in turns).
pub fn stream_sum<I>(terms: I, mut trace: SumTrace) -> SumTrace
where
    I: IntoIterator<Item = f64>,
{
    for t in terms {
        trace.push_turns(t);
    }
    trace
}

/// A frequency `α ∈ (0, 1)`, either an exact rational or a factoradic prefix.
#[derive(Debug, Clone, PartialEq)]
pub enum Angle {
    Rational(ExactFraction),
    Factoradic(FactoradicReal),
}

impl Angle {
    pub fn rational(x: ExactFraction) -> Result<Self> {
        if !x.is_positive() || x >= BigRational::one() {
            return Err(Error::Domain(format!("alpha = {x} is outside (0, 1)")));
        }
        Ok(Angle::Rational(x))
    }

    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::rational(BigRational::new(p.into(), q.into()))
    }

    pub fn factoradic(x: FactoradicReal) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::Domain("alpha = 0 is outside (0, 1)".into()));
        }
        Ok(Angle::Factoradic(x))
    }

    /// Exact lower end of the angle (the angle itself when rational).
    pub fn lower(&self) -> ExactFraction {
        match self {
            Angle::Rational(x) => x.clone(),
            Angle::Factoradic(f) => f.lower(),
        }
    }

    /// Width of the enclosure: zero unless a factoradic tail is unknown.
    pub fn width(&self) -> ExactFraction {
        match self {
            Angle::Rational(_) => BigRational::zero(),
            Angle::Factoradic(f) => {
                let (lo, hi) = f.decode();
                hi - lo
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.lower().to_f64().unwrap_or(f64::NAN)
    }

    /// `{kα}` in turns, reduced exactly before conversion, with the error
    /// `k · width` inherited from an unknown tail (in turns).
    pub fn multiple_phase(&self, k: &BigInt) -> (f64, f64) {
        if let Angle::Rational(x) = self {
            if let (Some(p), Some(q), Some(k)) = (x.numer().to_u64(), x.denom().to_u64(), k.to_u64()) {
                return (small_rational_phase(k, p, q), 0.0);
            }
        }
        let lower = self.lower();
        let residue = (lower.numer() * k).mod_floor(lower.denom());
        let phase = BigRational::new_raw(residue, lower.denom().clone());
        let width = self.width();
        let err = if width.is_zero() { 0.0 } else { (width * k.abs()).to_f64().unwrap_or(f64::INFINITY) };
        (phase.to_f64().unwrap_or(f64::NAN), err)
    }

    /// `1 − α`.
    pub fn complement(&self) -> Result<Angle> {
        match self {
            Angle::Rational(x) => Angle::rational(BigRational::one() - x),
            Angle::Factoradic(f) => Angle::factoradic(f.complement()?),
        }
    }
}

/// `{k p / q}` for machine-sized inputs.
#[inline]
fn small_rational_phase(k: u64, p: u64, q: u64) -> f64 {
    let r = (u128::from(k % q) * u128::from(p % q)) % u128::from(q);
    r as f64 / q as f64
}

/// `2/|e(α) − 1| = 1/sin(πα)`, the Dirichlet-kernel bound on
/// `|Σ_{n≤N} e(nα)|`.
pub fn dirichlet_bound(alpha: &Angle) -> f64 {
    dirichlet_bound_f64(alpha.to_f64()).expect("Angle is constructed inside (0, 1)")
}

/// [`dirichlet_bound`] for a raw float frequency; integers are rejected.
pub fn dirichlet_bound_f64(alpha: f64) -> Result<f64> {
    let t = alpha.rem_euclid(1.0);
    if !t.is_finite() || t == 0.0 {
        return Err(Error::Domain(format!("alpha = {alpha} is an integer")));
    }
    Ok(1.0 / (PI * t).sin())
}

/// `Σ_{n≤N} e(nα) = (e((N+1)α) − e(α)) / (e(α) − 1)`.
pub fn full_interval_sum(alpha: &Angle, n: u64) -> Result<Complex64> {
    if n < 1 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let (last, _) = alpha.multiple_phase(&BigInt::from(n + 1));
    let (first, _) = alpha.multiple_phase(&BigInt::one());
    let ea = e(first);
    Ok((e(last) - ea) / (ea - Complex64::new(1.0, 0.0)))
}

/// Streams `S_A(α, N)` over the elements of `A` that are `≤ N`, in the order given.
pub fn set_sum<I>(elements: I, alpha: &Angle, n: u64) -> SumTrace
where
    I: IntoIterator<Item = u64>,
{
    let lower = Angle::Rational(alpha.lower());
    let phases = elements
        .into_iter()
        .filter(|&m| m <= n)
        .map(|m| lower.multiple_phase(&BigInt::from(m)).0);
    stream_sum(phases, SumTrace::new())
}

/// `(conj S_A(α, N), S_A(1 − α, N))`; the two agree for every `A`.
pub fn symmetry_check<I>(elements: I, alpha: &Angle, n: u64) -> Result<(Complex64, Complex64)>
where
    I: IntoIterator<Item = u64>,
{
    let elements: Vec<u64> = elements.into_iter().collect();
    let complement = alpha.complement()?;
    let lhs = set_sum(elements.iter().copied(), alpha, n).partial_sum().conj();
    let rhs = set_sum(elements, &complement, n).partial_sum();
    Ok((lhs, rhs))
}

/// Trace of `S_{qℕ}(α, N)` over `N ≤ n_max`.
pub fn qn_counterexample_trace(q: u64, alpha: &Angle, n_max: u64) -> Result<SumTrace> {
    if q < 2 {
        return Err(Error::Domain(format!("q must be >= 2, got {q}")));
    }
    Ok(set_sum((1..=n_max / q).map(|k| k * q), alpha, n_max))
}

/// `sup_{N ≤ n_max} |S_{qℕ}(α, N)|`: bounded by `2/|e(qα) − 1| + 1` when
/// `qα ∉ ℤ`, linear in `n_max` when it is.
pub fn qn_counterexample_sup(q: u64, alpha: &Angle, n_max: u64) -> Result<f64> {
    Ok(qn_counterexample_trace(q, alpha, n_max)?.sup_modulus())
}

/// One CSV row for a trace at a rational angle, matching [`CSV_HEADER_RATIONAL`].
pub fn csv_row_rational(alpha: &ExactFraction, trace: &SumTrace) -> String {
    let s = trace.partial_sum();
    format!(
        "{},{},{},{},{},{},{},{}",
        alpha.numer(),
        alpha.denom(),
        trace.count(),
        s.re,
        s.im,
        s.norm(),
        trace.sup_modulus(),
        trace.sup_at()
    )
}

/// One CSV row for a trace at a factoradic angle, matching [`CSV_HEADER_DIGITS`].
pub fn csv_row_digits(digits_file: &str, trace: &SumTrace) -> String {
    let s = trace.partial_sum();
    format!(
        "{},{},{},{},{},{},{}",
        digits_file,
        trace.count(),
        s.re,
        s.im,
        s.norm(),
        trace.sup_modulus(),
        trace.sup_at()
    )
}
