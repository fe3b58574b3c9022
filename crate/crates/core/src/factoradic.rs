//! Factorial-base ("factoradic") digits of reals in `[0, 1)`.
//!
//! A real `α ∈ [0, 1)` is written `α = Σ_{n≥2} s_n / n!` with `0 ≤ s_n ≤ n − 1`
//! (the first digit is always zero and is not stored). A [`FactoradicReal`]
//! holds the digits up to a depth `D` together with a tail policy: either the
//! remaining digits are all zero, or nothing is known about them. In the
//! second case every value derived from the digits comes with an exact error
//! bound, since the unknown tail contributes at most `1/D!`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational carrier. `BigRational` keeps itself reduced with a positive
/// denominator.
pub type ExactFraction = BigRational;

pub const DEFAULT_DEPTH: usize = 32;

const FILE_MAGIC: &str = "factoradic v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TailPolicy {
    /// Every digit past the depth is zero.
    Zero,
    /// Digits past the depth are unspecified.
    Unknown,
}

impl fmt::Display for TailPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailPolicy::Zero => f.write_str("ZERO"),
            TailPolicy::Unknown => f.write_str("UNKNOWN"),
        }
    }
}

/// Answer to "is this number rational?" given only a finite digit prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rationality {
    /// The expansion terminates, so the value is rational.
    Rational,
    /// The prefix carries no information about termination.
    UnknownAtDepth(usize),
}

/// A real in `[0, 1)` given by its factoradic digits `s_2..=s_D`.
///
/// Only non-zero digits are stored, so deep mostly-zero expansions stay cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoradicReal {
    depth: usize,
    digits: BTreeMap<usize, u32>,
    tail: TailPolicy,
}

impl FactoradicReal {
    /// Builds a value from the dense digit list for positions `2..=digits.len() + 1`.
    pub fn from_digits(digits: &[u32], tail: TailPolicy) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::Domain("at least one digit (position 2) is required".into()));
        }
        let depth = digits.len() + 1;
        let map = digits
            .iter()
            .enumerate()
            .map(|(k, &d)| (k + 2, d))
            .filter(|&(_, d)| d != 0)
            .collect();
        Self::from_sparse(depth, map, tail)
    }

    /// Builds a value from its non-zero digits keyed by position.
    pub fn from_sparse(depth: usize, digits: BTreeMap<usize, u32>, tail: TailPolicy) -> Result<Self> {
        if depth < 2 {
            return Err(Error::Domain(format!("depth must be >= 2, got {depth}")));
        }
        for (&position, &digit) in &digits {
            if position < 2 || position > depth {
                return Err(Error::Domain(format!(
                    "digit position {position} outside 2..={depth}"
                )));
            }
            check_digit(position, u64::from(digit))?;
        }
        let digits = digits.into_iter().filter(|&(_, d)| d != 0).collect();
        Ok(Self { depth, digits, tail })
    }

    pub fn zero(depth: usize) -> Result<Self> {
        Self::from_sparse(depth, BTreeMap::new(), TailPolicy::Zero)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tail(&self) -> TailPolicy {
        self.tail
    }

    /// Digit at `position`; zero past the depth when the tail is zero.
    ///
    /// Returns `None` for positions past the depth of an unknown tail.
    pub fn digit(&self, position: usize) -> Option<u32> {
        if position > self.depth && self.tail == TailPolicy::Unknown {
            return None;
        }
        Some(self.digits.get(&position).copied().unwrap_or(0))
    }

    /// Dense digit list for positions `2..=depth`.
    pub fn dense_digits(&self) -> Vec<u32> {
        (2..=self.depth).map(|n| self.digits.get(&n).copied().unwrap_or(0)).collect()
    }

    /// Non-zero digits by position.
    pub fn nonzero_digits(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.digits.iter().map(|(&p, &d)| (p, d))
    }

    pub fn is_zero(&self) -> bool {
        self.tail == TailPolicy::Zero && self.digits.is_empty()
    }

    /// Same digits, read at a larger depth. Only meaningful for a zero tail,
    /// where the new positions are known to be zero.
    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        if depth < self.depth && self.digits.range(depth + 1..).next().is_some() {
            return Err(Error::Domain(format!(
                "cannot truncate to depth {depth}: non-zero digits beyond it"
            )));
        }
        if depth > self.depth && self.tail == TailPolicy::Unknown {
            return Err(Error::InsufficientDepth { required: depth, available: self.depth });
        }
        Self::from_sparse(depth, self.digits.clone(), self.tail)
    }

    /// Greedy digit extraction from an exact rational.
    ///
    /// `r ← x; for n in 2..=D { s_n ← ⌊n r⌋; r ← n r − s_n }`. The tail is zero
    /// exactly when the remainder vanishes. On a rational input the loop
    /// terminates with a zero remainder, so the all-`(n−1)` tail is never
    /// produced.
    pub fn encode(x: &ExactFraction, depth: usize) -> Result<Self> {
        if depth < 2 {
            return Err(Error::Domain(format!("depth must be >= 2, got {depth}")));
        }
        if x.is_negative() || *x >= BigRational::one() {
            return Err(Error::Domain(format!("{x} is outside [0, 1)")));
        }
        let den = x.denom().magnitude().clone();
        let mut rem = x.numer().magnitude().clone();
        let mut digits = BTreeMap::new();
        for n in 2..=depth {
            if rem.is_zero() {
                break;
            }
            let (digit, next) = (rem * BigUint::from(n)).div_rem(&den);
            let digit = digit.to_u32().expect("digit below n fits in u32");
            if digit != 0 {
                digits.insert(n, digit);
            }
            rem = next;
        }
        let tail = if rem.is_zero() { TailPolicy::Zero } else { TailPolicy::Unknown };
        Ok(Self { depth, digits, tail })
    }

    /// Exact enclosure `[lower, upper]` of the represented value.
    pub fn decode(&self) -> (ExactFraction, ExactFraction) {
        let top = match self.tail {
            TailPolicy::Zero => self.last_nonzero().unwrap_or(1),
            TailPolicy::Unknown => self.depth,
        };
        let (num, den) = self.horner(top, 1);
        let lower = BigRational::new(BigInt::from(num), BigInt::from(den));
        let upper = match self.tail {
            TailPolicy::Zero => lower.clone(),
            TailPolicy::Unknown => &lower + BigRational::new(BigInt::one(), BigInt::from(factorial(self.depth))),
        };
        (lower, upper)
    }

    /// Lower end of [`decode`](Self::decode).
    pub fn lower(&self) -> ExactFraction {
        self.decode().0
    }

    /// `{m! α}` from the digits, as `(value, error_bound)`.
    ///
    /// The head `Σ_{i≤m} s_i m!/i!` is an integer and drops out, leaving
    /// `value = Σ_{m<i≤D} s_i m!/i!`. With an unknown tail the true fractional
    /// part lies in `[value, value + m!/D!]`.
    pub fn frac_factorial(&self, m: usize) -> Result<(ExactFraction, ExactFraction)> {
        let mut out = self.frac_factorials(&[m])?;
        Ok(out.pop().expect("one request, one answer"))
    }

    /// [`frac_factorial`](Self::frac_factorial) for several `m` in a single
    /// descending pass over the digits. Results follow the input order.
    pub fn frac_factorials(&self, ms: &[usize]) -> Result<Vec<(ExactFraction, ExactFraction)>> {
        if let Some(&m) = ms.iter().find(|&&m| m < 1) {
            return Err(Error::Domain(format!("m must be >= 1, got {m}")));
        }
        if self.tail == TailPolicy::Unknown {
            if let Some(&m) = ms.iter().filter(|&&m| m >= self.depth).max() {
                return Err(Error::InsufficientDepth { required: m + 1, available: self.depth });
            }
        }
        let top = match self.tail {
            TailPolicy::Zero => self.last_nonzero().unwrap_or(1),
            TailPolicy::Unknown => self.depth,
        };

        let mut order: Vec<usize> = (0..ms.len()).collect();
        order.sort_by(|&a, &b| ms[b].cmp(&ms[a]));

        let mut out = vec![None; ms.len()];
        // Horner state after folding positions top..=i is r_{i-1} = num/den with
        // den = i (i+1) ... top.
        let mut num = BigUint::zero();
        let mut den = BigUint::one();
        let mut position = top;
        for idx in order {
            let m = ms[idx];
            while position > m {
                let digit = self.digits.get(&position).copied().unwrap_or(0);
                num += &den * BigUint::from(digit);
                den *= BigUint::from(position);
                position -= 1;
            }
            let value = if m >= top {
                BigRational::zero()
            } else {
                BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
            };
            let error = match self.tail {
                TailPolicy::Zero => BigRational::zero(),
                // here top = depth, so den = (m+1)...D = D!/m!
                TailPolicy::Unknown => BigRational::new(BigInt::one(), BigInt::from(den.clone())),
            };
            out[idx] = Some((value, error));
        }
        Ok(out.into_iter().map(|v| v.expect("filled")).collect())
    }

    pub fn is_rational_by_digits(&self) -> Rationality {
        match self.tail {
            TailPolicy::Zero => Rationality::Rational,
            TailPolicy::Unknown => Rationality::UnknownAtDepth(self.depth),
        }
    }

    /// Digits of `1 − α`.
    ///
    /// With an unknown tail the digits `(n − 1) − s_n` sum to `1 − 1/D! − lower`,
    /// and the missing `1/D! − tail` lies in `[0, 1/D!]`, so the result is again
    /// an unknown-tail expansion at the same depth. Zero is rejected since
    /// `1 − 0` is not in `[0, 1)`.
    pub fn complement(&self) -> Result<Self> {
        match self.tail {
            TailPolicy::Zero => {
                if self.is_zero() {
                    return Err(Error::Domain("complement of 0 is 1, outside [0, 1)".into()));
                }
                Self::encode(&(BigRational::one() - self.lower()), self.depth)
            }
            TailPolicy::Unknown => {
                let digits = (2..=self.depth)
                    .map(|n| (n, (n as u32 - 1) - self.digits.get(&n).copied().unwrap_or(0)))
                    .filter(|&(_, d)| d != 0)
                    .collect();
                Self::from_sparse(self.depth, digits, TailPolicy::Unknown)
            }
        }
    }

    /// Serializes to the `factoradic v1` digit-file format.
    pub fn to_digit_file(&self) -> String {
        let digits: Vec<String> = self.dense_digits().iter().map(u32::to_string).collect();
        format!(
            "{FILE_MAGIC}\ndepth={}\ntail={}\n{}\n",
            self.depth,
            self.tail,
            digits.join(" ")
        )
    }

    /// Parses the `factoradic v1` digit-file format. Digits may wrap across
    /// lines; out-of-range digits are rejected.
    pub fn parse_digit_file(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let magic = lines.next().ok_or_else(|| Error::Parse("empty digit file".into()))?;
        if magic != FILE_MAGIC {
            return Err(Error::Parse(format!("expected `{FILE_MAGIC}`, found `{magic}`")));
        }
        let depth: usize = header_value(lines.next(), "depth")?
            .parse()
            .map_err(|e| Error::Parse(format!("depth: {e}")))?;
        let tail = match header_value(lines.next(), "tail")? {
            "ZERO" => TailPolicy::Zero,
            "UNKNOWN" => TailPolicy::Unknown,
            other => return Err(Error::Parse(format!("tail must be ZERO or UNKNOWN, got `{other}`"))),
        };
        if depth < 2 {
            return Err(Error::Parse(format!("depth must be >= 2, got {depth}")));
        }
        let mut digits = BTreeMap::new();
        let mut position = 2usize;
        for token in lines.flat_map(str::split_whitespace) {
            if position > depth {
                return Err(Error::Parse(format!("more than {} digits for depth {depth}", depth - 1)));
            }
            let digit: u64 = token
                .parse()
                .map_err(|e| Error::Parse(format!("digit at position {position}: {e}")))?;
            check_digit(position, digit)?;
            if digit != 0 {
                digits.insert(position, digit as u32);
            }
            position += 1;
        }
        if position != depth + 1 {
            return Err(Error::Parse(format!(
                "expected {} digits for depth {depth}, found {}",
                depth - 1,
                position - 2
            )));
        }
        Ok(Self { depth, digits, tail })
    }

    fn last_nonzero(&self) -> Option<usize> {
        self.digits.keys().next_back().copied()
    }

    /// Folds positions `top` down to `stop + 1`, returning `(num, den)` of
    /// `Σ_{stop<i≤top} s_i stop!/i!`.
    fn horner(&self, top: usize, stop: usize) -> (BigUint, BigUint) {
        let mut num = BigUint::zero();
        let mut den = BigUint::one();
        for position in (stop + 1..=top).rev() {
            let digit = self.digits.get(&position).copied().unwrap_or(0);
            num += &den * BigUint::from(digit);
            den *= BigUint::from(position);
        }
        (num, den)
    }
}

fn header_value<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Parse(format!("missing `{key}=` line")))?;
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .map(str::trim)
        .ok_or_else(|| Error::Parse(format!("expected `{key}=...`, found `{line}`")))
}

fn check_digit(position: usize, digit: u64) -> Result<()> {
    let max = position as u64 - 1;
    if digit > max {
        return Err(Error::DigitOutOfRange { position, digit, max });
    }
    Ok(())
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Fractional part of an exact rational, in `[0, 1)`.
pub fn frac(x: &ExactFraction) -> ExactFraction {
    x - x.floor()
}

/// Parses `p/q` (or an integer) into an exact fraction.
pub fn parse_fraction(text: &str) -> Result<ExactFraction> {
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p.parse().map_err(|e| Error::Parse(format!("numerator `{p}`: {e}")))?;
    let q: BigInt = q.parse().map_err(|e| Error::Parse(format!("denominator `{q}`: {e}")))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{text}`")));
    }
    Ok(BigRational::new(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> ExactFraction {
        BigRational::new(p.into(), d.into())
    }

    /// Value of every digit tuple at depth `d`, by direct summation.
    fn enumerate_depth(d: usize) -> Vec<(Vec<u32>, ExactFraction)> {
        let mut out = vec![(Vec::new(), BigRational::zero())];
        for n in 2..=d {
            let unit = BigRational::new(BigInt::one(), BigInt::from(factorial(n)));
            out = out
                .into_iter()
                .flat_map(|(digits, v)| {
                    let unit = unit.clone();
                    (0..n as u32).map(move |s| {
                        let mut digits = digits.clone();
                        digits.push(s);
                        (digits, &v + &unit * BigInt::from(s))
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn encode_examples() {
        let cases = [((1, 2), vec![1, 0, 0]), ((1, 3), vec![0, 2, 0]), ((1, 4), vec![0, 1, 2])];
        for ((p, d), expected) in cases {
            let f = FactoradicReal::encode(&q(p, d), 4).unwrap();
            assert_eq!(f.dense_digits(), expected, "{p}/{d}");
            assert_eq!(f.tail(), TailPolicy::Zero);
        }
        let zero = FactoradicReal::encode(&q(0, 1), 5).unwrap();
        assert_eq!(zero.dense_digits(), vec![0, 0, 0, 0]);
        assert_eq!(zero.tail(), TailPolicy::Zero);
    }

    #[test]
    fn encode_agrees_with_enumeration() {
        // every depth-5 tuple is the unique expansion of its own value
        for (digits, value) in enumerate_depth(5) {
            let f = FactoradicReal::encode(&value, 5).unwrap();
            assert_eq!(f.dense_digits(), digits);
            assert_eq!(f.tail(), TailPolicy::Zero);
        }
    }

    #[test]
    fn encode_rejects_out_of_domain() {
        assert!(matches!(FactoradicReal::encode(&q(1, 1), 4), Err(Error::Domain(_))));
        assert!(matches!(FactoradicReal::encode(&q(-1, 3), 4), Err(Error::Domain(_))));
        assert!(matches!(FactoradicReal::encode(&q(1, 3), 1), Err(Error::Domain(_))));
    }

    #[test]
    fn encode_marks_unfinished_expansion() {
        // 1/7 needs depth 7
        let f = FactoradicReal::encode(&q(1, 7), 6).unwrap();
        assert_eq!(f.tail(), TailPolicy::Unknown);
        let (lo, hi) = f.decode();
        assert!(lo <= q(1, 7) && q(1, 7) <= hi);
        assert_eq!(FactoradicReal::encode(&q(1, 7), 7).unwrap().tail(), TailPolicy::Zero);
    }

    #[test]
    fn decode_examples() {
        let f = FactoradicReal::from_digits(&[1, 0, 0], TailPolicy::Zero).unwrap();
        assert_eq!(f.decode(), (q(1, 2), q(1, 2)));
        let f = FactoradicReal::from_digits(&[0, 2], TailPolicy::Zero).unwrap();
        assert_eq!(f.decode(), (q(1, 3), q(1, 3)));
        let f = FactoradicReal::from_digits(&[1], TailPolicy::Unknown).unwrap();
        assert_eq!(f.decode(), (q(1, 2), q(1, 1)));
    }

    #[test]
    fn frac_factorial_examples() {
        let quarter = FactoradicReal::from_digits(&[0, 1, 2], TailPolicy::Zero).unwrap();
        assert_eq!(quarter.frac_factorial(3).unwrap(), (q(1, 2), q(0, 1)));
        let half = FactoradicReal::from_digits(&[1, 0, 0], TailPolicy::Zero).unwrap();
        assert_eq!(half.frac_factorial(2).unwrap(), (q(0, 1), q(0, 1)));
        let open = FactoradicReal::from_digits(&[1, 2], TailPolicy::Unknown).unwrap();
        assert_eq!(open.frac_factorial(2).unwrap(), (q(2, 3), q(1, 3)));
    }

    #[test]
    fn frac_factorial_unknown_tail_encloses_every_extension() {
        // digits (1, 2) at depth 3, extended by every (s_4, s_5)
        let open = FactoradicReal::from_digits(&[1, 2], TailPolicy::Unknown).unwrap();
        let (value, err) = open.frac_factorial(2).unwrap();
        for s4 in 0..4 {
            for s5 in 0..5 {
                let alpha = q(1, 2) + q(2, 6) + q(s4, 24) + q(s5, 120);
                let truth = frac(&(alpha * BigInt::from(2)));
                assert!(value <= truth && truth <= &value + &err, "s4={s4} s5={s5}");
            }
        }
    }

    #[test]
    fn frac_factorial_insufficient_depth() {
        let open = FactoradicReal::from_digits(&[1, 2], TailPolicy::Unknown).unwrap();
        assert_eq!(
            open.frac_factorial(3),
            Err(Error::InsufficientDepth { required: 4, available: 3 })
        );
        assert!(matches!(open.frac_factorial(0), Err(Error::Domain(_))));
        // a zero tail is known everywhere
        let half = FactoradicReal::from_digits(&[1], TailPolicy::Zero).unwrap();
        assert_eq!(half.frac_factorial(10).unwrap().0, q(0, 1));
    }

    #[test]
    fn batched_frac_factorials_keep_input_order() {
        let alpha = FactoradicReal::encode(&q(5, 77), 20).unwrap();
        let ms = [3, 11, 1, 7, 19, 11];
        let batched = alpha.frac_factorials(&ms).unwrap();
        for (&m, got) in ms.iter().zip(&batched) {
            assert_eq!(got, &alpha.frac_factorial(m).unwrap());
        }
    }

    #[test]
    fn rationality_verdicts() {
        assert_eq!(FactoradicReal::encode(&q(1, 2), 4).unwrap().is_rational_by_digits(), Rationality::Rational);
        assert_eq!(FactoradicReal::encode(&q(1, 3), 4).unwrap().is_rational_by_digits(), Rationality::Rational);
        let open = FactoradicReal::from_digits(&[0, 1], TailPolicy::Unknown).unwrap();
        assert_eq!(open.is_rational_by_digits(), Rationality::UnknownAtDepth(3));
    }

    #[test]
    fn digit_range_is_enforced() {
        assert_eq!(
            FactoradicReal::from_digits(&[2], TailPolicy::Zero),
            Err(Error::DigitOutOfRange { position: 2, digit: 2, max: 1 })
        );
        assert!(FactoradicReal::from_digits(&[1, 2, 3, 4], TailPolicy::Zero).is_ok());
    }

    #[test]
    fn complement_zero_tail() {
        let third = FactoradicReal::encode(&q(1, 3), 6).unwrap();
        assert_eq!(third.complement().unwrap().lower(), q(2, 3));
        assert!(FactoradicReal::zero(4).unwrap().complement().is_err());
    }

    #[test]
    fn complement_unknown_tail_encloses() {
        let alpha = FactoradicReal::from_digits(&[1, 2, 0, 4], TailPolicy::Unknown).unwrap();
        let (lo, hi) = alpha.decode();
        let (clo, chi) = alpha.complement().unwrap().decode();
        let one = BigRational::one();
        assert_eq!(clo, &one - &hi);
        assert_eq!(chi, &one - &lo);
    }

    #[test]
    fn digit_file_round_trip() {
        let f = FactoradicReal::from_digits(&[1, 0, 3, 4, 0], TailPolicy::Unknown).unwrap();
        let text = f.to_digit_file();
        assert_eq!(text, "factoradic v1\ndepth=6\ntail=UNKNOWN\n1 0 3 4 0\n");
        assert_eq!(FactoradicReal::parse_digit_file(&text).unwrap(), f);
    }

    #[test]
    fn digit_file_rejects_bad_input() {
        let bad_digit = "factoradic v1\ndepth=3\ntail=ZERO\n1 3\n";
        assert!(matches!(
            FactoradicReal::parse_digit_file(bad_digit),
            Err(Error::DigitOutOfRange { position: 3, digit: 3, max: 2 })
        ));
        let short = "factoradic v1\ndepth=4\ntail=ZERO\n1 0\n";
        assert!(matches!(FactoradicReal::parse_digit_file(short), Err(Error::Parse(_))));
        let magic = "factoradic v2\ndepth=2\ntail=ZERO\n1\n";
        assert!(matches!(FactoradicReal::parse_digit_file(magic), Err(Error::Parse(_))));
        let tail = "factoradic v1\ndepth=2\ntail=MAYBE\n1\n";
        assert!(matches!(FactoradicReal::parse_digit_file(tail), Err(Error::Parse(_))));
    }

    #[test]
    fn parse_fraction_forms() {
        assert_eq!(parse_fraction("3/9").unwrap(), q(1, 3));
        assert_eq!(parse_fraction(" 0 ").unwrap(), q(0, 1));
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("x/2").is_err());
    }
}
