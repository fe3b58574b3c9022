//! Coefficient sequences with finitely many values: power series on disk
//! sectors, ultimate-period detection, and the root-of-unity collapse test.
//!
//! A bounded `u(z) = Σ a_n z^n` on a sector forces `(a_n)` to be ultimately
//! periodic, and boundedness at the non-trivial `q`-th roots of unity then
//! forces the periodic block to be constant. Only finite prefixes exist here,
//! so every check is the computable contrapositive on a prefix, and "sup over
//! `N`" always means the prefix sup.

use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expsum::e;

const FILE_MAGIC: &str = "coeffs v1";

/// Tolerance for root-of-unity evaluation with a float alphabet.
pub const ROOT_TOLERANCE: f64 = 1e-9;

pub type GaussianRational = Complex<BigRational>;

/// The finite set of values a sequence draws from.
#[derive(Debug, Clone, PartialEq)]
pub enum Alphabet {
    /// Gaussian rationals; collapse is decided by exact polynomial division.
    Exact(Vec<GaussianRational>),
    /// Arbitrary complex floats; collapse is decided numerically.
    Float(Vec<Complex64>),
}

impl Alphabet {
    /// `{0, 1}`.
    pub fn binary() -> Self {
        let zero = BigRational::zero();
        let one = BigRational::from_integer(1.into());
        Alphabet::Exact(vec![Complex::new(zero.clone(), zero.clone()), Complex::new(one, zero)])
    }

    pub fn len(&self) -> usize {
        match self {
            Alphabet::Exact(v) => v.len(),
            Alphabet::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn to_floats(&self) -> Vec<Complex64> {
        match self {
            Alphabet::Exact(v) => v
                .iter()
                .map(|z| Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN)))
                .collect(),
            Alphabet::Float(v) => v.clone(),
        }
    }

    fn is_zero_at(&self, symbol: usize) -> bool {
        match self {
            Alphabet::Exact(v) => v[symbol].is_zero(),
            Alphabet::Float(v) => v[symbol] == Complex64::new(0.0, 0.0),
        }
    }

    fn has_duplicates(&self) -> bool {
        fn dup<T: PartialEq>(v: &[T]) -> bool {
            v.iter().enumerate().any(|(i, x)| v[..i].contains(x))
        }
        match self {
            Alphabet::Exact(v) => dup(v),
            Alphabet::Float(v) => dup(v),
        }
    }
}

/// A finite prefix `a_0, a_1, …, a_L` over a declared alphabet, with `a_0 = 0`.
///
/// Values are stored as alphabet indices, so equal symbols mean equal values.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    alphabet: Alphabet,
    floats: Vec<Complex64>,
    symbols: Vec<u32>,
}

impl CoefficientSequence {
    pub fn new(alphabet: Alphabet, symbols: Vec<u32>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::Domain("alphabet is empty".into()));
        }
        if alphabet.has_duplicates() {
            return Err(Error::Domain("alphabet has repeated values".into()));
        }
        if let Some((n, &s)) = symbols.iter().enumerate().find(|&(_, &s)| s as usize >= alphabet.len()) {
            return Err(Error::Domain(format!("symbol {s} at index {n} is not in the alphabet")));
        }
        match symbols.first() {
            None => return Err(Error::Domain("sequence is empty".into())),
            Some(&s) if !alphabet.is_zero_at(s as usize) => {
                return Err(Error::Domain("a_0 must be 0".into()));
            }
            _ => {}
        }
        let floats = alphabet.to_floats();
        Ok(Self { alphabet, floats, symbols })
    }

    /// A `{0, 1}` sequence from its values, `a_0` included.
    pub fn binary(values: &[u8]) -> Result<Self> {
        Self::new(Alphabet::binary(), values.iter().map(|&v| u32::from(v)).collect())
    }

    /// `χ_A(n)` for `n = 0..len`.
    pub fn indicator(elements: impl IntoIterator<Item = u64>, len: usize) -> Result<Self> {
        let mut values = vec![0u8; len];
        for el in elements {
            if let Some(slot) = usize::try_from(el).ok().and_then(|i| values.get_mut(i)) {
                *slot = 1;
            }
        }
        values[0] = 0;
        Self::binary(&values)
    }

    /// `len` terms generated by `rule(n)` (alphabet indices), with `a_0` forced from the rule.
    pub fn from_rule(alphabet: Alphabet, len: usize, rule: impl Fn(usize) -> u32) -> Result<Self> {
        Self::new(alphabet, (0..len).map(rule).collect())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Number of stored terms, `a_0` included.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn value(&self, n: usize) -> Complex64 {
        self.floats[self.symbols[n] as usize]
    }

    /// Checks `a_n = a_{n+q}` for `K ≤ n ≤ L − q`, and that at least one full
    /// block fits in the prefix.
    pub fn has_period(&self, preperiod: usize, period: usize) -> bool {
        period >= 1
            && preperiod + period <= self.len()
            && (preperiod..self.len() - period).all(|n| self.symbols[n] == self.symbols[n + period])
    }

    /// Serializes to the `coeffs v1` text format.
    pub fn to_text(&self) -> String {
        let alphabet: Vec<String> = match &self.alphabet {
            Alphabet::Exact(v) => v.iter().map(|z| format!("{}:{}", z.re, z.im)).collect(),
            Alphabet::Float(v) => v.iter().map(|z| format!("{:?}:{:?}", z.re, z.im)).collect(),
        };
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.symbols.len() {
            let s = self.symbols[i];
            let run = self.symbols[i..].iter().take_while(|&&t| t == s).count();
            runs.push(format!("{s}*{run}"));
            i += run;
        }
        format!("{FILE_MAGIC}\nalphabet {}\n{}\n", alphabet.join(" "), runs.join(" "))
    }

    /// Parses the `coeffs v1` text format:
    ///
    /// ```text
    /// coeffs v1
    /// alphabet 0 1 1/2:-3/4
    /// 0*1 1*1 0*3 1*2
    /// ```
    ///
    /// Alphabet entries are `re` or `re:im`; if every component is an integer
    /// or `p/q` the alphabet is exact, otherwise it is read as floats. Run
    /// tokens are `index*count` (or a bare `index`), in sequence order.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let magic = lines.next().ok_or_else(|| Error::Parse("empty coefficient file".into()))?;
        if magic != FILE_MAGIC {
            return Err(Error::Parse(format!("expected `{FILE_MAGIC}`, found `{magic}`")));
        }
        let decl = lines.next().ok_or_else(|| Error::Parse("missing alphabet line".into()))?;
        let entries: Vec<&str> = decl
            .strip_prefix("alphabet")
            .ok_or_else(|| Error::Parse(format!("expected `alphabet ...`, found `{decl}`")))?
            .split_whitespace()
            .collect();
        let alphabet = parse_alphabet(&entries)?;
        let mut symbols = Vec::new();
        for token in lines.flat_map(str::split_whitespace) {
            let (sym, run) = token.split_once('*').unwrap_or((token, "1"));
            let sym: u32 = sym.parse().map_err(|e| Error::Parse(format!("symbol `{sym}`: {e}")))?;
            let run: usize = run.parse().map_err(|e| Error::Parse(format!("run `{run}`: {e}")))?;
            symbols.extend(std::iter::repeat_n(sym, run));
        }
        Self::new(alphabet, symbols)
    }
}

fn parse_alphabet(entries: &[&str]) -> Result<Alphabet> {
    let split = |t: &str| -> (String, String) {
        match t.split_once(':') {
            Some((re, im)) => (re.to_string(), im.to_string()),
            None => (t.to_string(), "0".to_string()),
        }
    };
    let parts: Vec<(String, String)> = entries.iter().map(|t| split(t)).collect();
    let exact: Option<Vec<GaussianRational>> = parts
        .iter()
        .map(|(re, im)| Some(Complex::new(parse_rational(re)?, parse_rational(im)?)))
        .collect();
    if let Some(v) = exact {
        return Ok(Alphabet::Exact(v));
    }
    let floats = parts
        .iter()
        .map(|(re, im)| {
            let p = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("alphabet value `{s}`: {e}")));
            Ok(Complex64::new(p(re)?, p(im)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Alphabet::Float(floats))
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: BigInt = p.parse().ok()?;
    let q: BigInt = q.parse().ok()?;
    (!q.is_zero()).then(|| BigRational::new(p, q))
}

/// A sector `θ₁ ≤ arg z ≤ θ₂` (angles in turns) sampled at radii below 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpec {
    theta1: f64,
    theta2: f64,
    radii: Vec<f64>,
    theta_samples: usize,
}

impl SectorSpec {
    pub fn new(theta1: f64, theta2: f64, radii: Vec<f64>, theta_samples: usize) -> Result<Self> {
        if !(0.0 <= theta1 && theta1 < theta2 && theta2 <= 1.0) {
            return Err(Error::Domain(format!("need 0 <= theta1 < theta2 <= 1, got {theta1}, {theta2}")));
        }
        if let Some(r) = radii.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return Err(Error::Domain(format!("radius {r} is not in [0, 1)")));
        }
        if radii.is_empty() || theta_samples == 0 {
            return Err(Error::Domain("empty sector grid".into()));
        }
        Ok(Self { theta1, theta2, radii, theta_samples })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Evenly spaced angles from `θ₁` to `θ₂`, both ends included.
    pub fn thetas(&self) -> Vec<f64> {
        if self.theta_samples == 1 {
            return vec![self.theta1];
        }
        let step = (self.theta2 - self.theta1) / (self.theta_samples - 1) as f64;
        (0..self.theta_samples).map(|k| self.theta1 + step * k as f64).collect()
    }
}

/// Values of `Σ_{n≤A} a_n r^n e(nθ)` on a sector grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorGrid {
    pub radii: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `values[i][j]` is at `radii[i]`, `thetas[j]`.
    pub values: Vec<Vec<Complex64>>,
}

impl SectorGrid {
    pub fn max_modulus(&self) -> f64 {
        self.values.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus at each radius.
    pub fn max_modulus_by_radius(&self) -> Vec<f64> {
        self.values.iter().map(|row| row.iter().map(|z| z.norm()).fold(0.0, f64::max)).collect()
    }
}

fn check_terms(c: &CoefficientSequence, terms: usize) -> Result<()> {
    if terms >= c.len() {
        return Err(Error::InsufficientPrefix { needed: terms + 1, available: c.len() });
    }
    Ok(())
}

/// Truncated power series `Σ_{n≤A} a_n z^n` on the grid of `sector`.
pub fn sector_eval(c: &CoefficientSequence, sector: &SectorSpec, terms: usize) -> Result<SectorGrid> {
    check_terms(c, terms)?;
    let thetas = sector.thetas();
    let values = sector
        .radii()
        .iter()
        .map(|&r| {
            thetas
                .iter()
                .map(|&t| {
                    let z = e(t) * r;
                    (0..=terms).rev().fold(Complex64::new(0.0, 0.0), |acc, n| acc * z + c.value(n))
                })
                .collect()
        })
        .collect();
    Ok(SectorGrid { radii: sector.radii().to_vec(), thetas, values })
}

/// Both sides of the Abel-summation bound at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelCheck {
    /// `|Σ_{n≤A} a_n r^n e(nα)|`.
    pub lhs: f64,
    /// `prefix_sup = max_{M≤A} |Σ_{n≤M} a_n e(nα)|`.
    pub prefix_sup: f64,
    pub holds: bool,
}

/// Checks `|Σ_{n≤A} a_n r^n e(nα)| ≤ max_{M≤A} |Σ_{n≤M} a_n e(nα)|` (up to 1e-9).
pub fn abel_bound_check(c: &CoefficientSequence, alpha: f64, r: f64, terms: usize) -> Result<AbelCheck> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("r = {r} is not in [0, 1)")));
    }
    check_terms(c, terms)?;
    let mut damped = Complex64::new(0.0, 0.0);
    let mut plain = Complex64::new(0.0, 0.0);
    let mut prefix_sup = 0.0f64;
    let mut rn = 1.0;
    for n in 0..=terms {
        let term = c.value(n) * e((n as f64 * alpha).rem_euclid(1.0));
        damped += term * rn;
        plain += term;
        prefix_sup = prefix_sup.max(plain.norm());
        rn *= r;
    }
    let lhs = damped.norm();
    Ok(AbelCheck { lhs, prefix_sup, holds: lhs <= prefix_sup + 1e-9 })
}

/// Smallest `(K, q)` with `a_n = a_{n+q}` for `K ≤ n ≤ L − q`, searching
/// `K ≤ max_preperiod` first and `q ≤ max_period` second.
///
/// `None` means no such pair exists inside the window; it says nothing about
/// the infinite sequence.
pub fn detect_ultimate_period(
    c: &CoefficientSequence,
    max_preperiod: usize,
    max_period: usize,
) -> Result<Option<(usize, usize)>> {
    if max_period == 0 {
        return Err(Error::Domain("max_period must be >= 1".into()));
    }
    let needed = max_preperiod + 2 * max_period;
    if c.len() < needed {
        return Err(Error::InsufficientPrefix { needed, available: c.len() });
    }
    let s = c.symbols();
    let mut best: Option<(usize, usize)> = None;
    for q in 1..=max_period {
        // the least K for period q sits just past the last mismatch
        let k = (0..s.len() - q).rev().find(|&n| s[n] != s[n + q]).map_or(0, |n| n + 1);
        if k <= max_preperiod && best.is_none_or(|(bk, _)| k < bk) {
            best = Some((k, q));
        }
    }
    Ok(best)
}

/// Whether `1 + z + … + z^{q−1}` divides `Σ_{j<q} a_{K+j} z^j`, i.e. whether
/// the periodic block is constant.
pub fn period_collapse_test(c: &CoefficientSequence, preperiod: usize, period: usize) -> Result<bool> {
    if !c.has_period(preperiod, period) {
        return Err(Error::InvalidPeriod { preperiod, period });
    }
    let block = &c.symbols()[preperiod..preperiod + period];
    match c.alphabet() {
        Alphabet::Exact(values) => {
            let poly: Vec<GaussianRational> = block.iter().map(|&s| values[s as usize].clone()).collect();
            let divisor = vec![Complex::new(BigRational::from_integer(1.into()), BigRational::zero()); period];
            Ok(poly_rem(&poly, &divisor).iter().all(Zero::is_zero))
        }
        Alphabet::Float(_) => Ok((1..period).all(|k| {
            let w = e(k as f64 / period as f64);
            let v = block.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &s| acc * w + c.floats[s as usize]);
            v.norm() <= ROOT_TOLERANCE
        })),
    }
}

/// Remainder of `num / den` (coefficients low degree first); `den` must have
/// a non-zero leading coefficient.
fn poly_rem(num: &[GaussianRational], den: &[GaussianRational]) -> Vec<GaussianRational> {
    let mut rem = num.to_vec();
    let lead = den.last().expect("non-empty divisor").clone();
    let dd = den.len() - 1;
    while rem.len() > dd && !rem.is_empty() {
        let top = rem.len() - 1;
        let coef = rem[top].clone() / lead.clone();
        if !coef.is_zero() {
            for (j, d) in den.iter().enumerate() {
                let idx = top - dd + j;
                rem[idx] = rem[idx].clone() - coef.clone() * d.clone();
            }
        }
        rem.pop();
    }
    rem
}

impl fmt::Display for CoefficientSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
