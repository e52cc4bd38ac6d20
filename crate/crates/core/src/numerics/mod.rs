//! Exact rational arithmetic and a directed-rounding enclosure engine.
//!
//! Everything that ends up in a verdict is either an exact [`Rational`] or an
//! [`Enclosure`] whose endpoints are rationals rounded outward. Machine floats
//! never appear on a verdict path.

mod enclosure;
mod kernels;

pub use enclosure::{separate, Enclosure, Separation, Verdict};
pub use kernels::{enclose, exp, pi, sinh, sqrt, Function};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept reduced with a positive denominator.
pub type Rational = BigRational;

/// Environment variable holding the precision cap (significant decimal digits).
pub const PRECISION_CAP_ENV: &str = "CLUSTER_BOUNDS_PRECISION_CAP";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("square root of a negative value")]
    NegativeSqrt,
    #[error("enclosure lower bound exceeds upper bound")]
    InvertedBounds,
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),
}

/// `n / d` as a reduced rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `base^exp` for a non-negative exponent.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// Order of two rationals by cross-multiplication.
///
/// `Ratio::cmp` walks the continued fraction expansion recursively, which is
/// slow and can exhaust the stack for nearly equal values with long
/// numerators and denominators.
pub fn cmp_exact(a: &Rational, b: &Rational) -> std::cmp::Ordering {
    if a.denom() == b.denom() {
        return a.numer().cmp(b.numer());
    }
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

/// Equality of reduced rationals, without going through `Ratio::cmp`.
pub fn eq_exact(a: &Rational, b: &Rational) -> bool {
    a.numer() == b.numer() && a.denom() == b.denom()
}

/// `a <= b` via [`cmp_exact`].
pub fn le_exact(a: &Rational, b: &Rational) -> bool {
    cmp_exact(a, b) != std::cmp::Ordering::Greater
}

/// `a < b` via [`cmp_exact`].
pub fn lt_exact(a: &Rational, b: &Rational) -> bool {
    cmp_exact(a, b) == std::cmp::Ordering::Less
}

/// "numerator/denominator" in lowest terms; integers keep the `/1`.
pub fn exact_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses the `exact_string` form (a bare integer is accepted as well).
pub fn parse_exact(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.trim().parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Working precision in significant decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(64);

    pub fn digits(digits: u32) -> Result<Self, NumericsError> {
        if digits == 0 {
            return Err(NumericsError::InvalidPrecision(
                "precision must be at least one digit".into(),
            ));
        }
        Ok(Precision(digits))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Binary digits needed to carry this many decimal digits, plus guard bits.
    pub fn bits(self) -> u64 {
        // log2(10) < 3.3220
        u64::from(self.0) * 33220 / 10000 + 8
    }

    pub fn doubled(self) -> Self {
        Precision(self.0.saturating_mul(2))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.0)
    }
}

/// Starting precision and cap for verdicts that escalate until enclosures separate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionBudget {
    pub start: Precision,
    pub cap: Precision,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget {
            start: Precision(64),
            cap: Precision(4096),
        }
    }
}

impl PrecisionBudget {
    pub fn new(start: Precision, cap: Precision) -> Result<Self, NumericsError> {
        if start > cap {
            return Err(NumericsError::InvalidPrecision(format!(
                "start precision {} exceeds cap {}",
                start.0, cap.0
            )));
        }
        Ok(PrecisionBudget { start, cap })
    }

    /// Default budget with the cap taken from [`PRECISION_CAP_ENV`] when set.
    pub fn from_env() -> Result<Self, NumericsError> {
        let mut budget = PrecisionBudget::default();
        if let Ok(raw) = std::env::var(PRECISION_CAP_ENV) {
            let digits: u32 = raw.trim().parse().map_err(|_| {
                NumericsError::InvalidPrecision(format!("{PRECISION_CAP_ENV}={raw:?}"))
            })?;
            budget.cap = Precision::digits(digits)?;
            if budget.start > budget.cap {
                budget.start = budget.cap;
            }
        }
        Ok(budget)
    }

    /// start, 2·start, 4·start, ... while not above the cap (the cap itself is always last).
    pub fn levels(&self) -> Vec<Precision> {
        let mut out = Vec::new();
        let mut p = self.start;
        while p < self.cap {
            out.push(p);
            p = p.doubled();
        }
        out.push(self.cap);
        out
    }

    /// Evaluates `f` at increasing precision until `settled` accepts the
    /// result or the cap is reached. Returns the last result and its precision.
    pub fn escalate<T>(
        &self,
        mut f: impl FnMut(Precision) -> T,
        settled: impl Fn(&T) -> bool,
    ) -> (T, Precision) {
        let levels = self.levels();
        let last = levels.len() - 1;
        for (k, p) in levels.into_iter().enumerate() {
            let value = f(p);
            if settled(&value) || k == last {
                return (value, p);
            }
        }
        unreachable!("levels() is never empty")
    }
}

/// `floor(q · 2^shift)`.
pub(crate) fn floor_scaled(q: &Rational, shift: i64) -> BigInt {
    if shift >= 0 {
        (q.numer() << shift as usize).div_floor(q.denom())
    } else {
        q.numer().div_floor(&(q.denom() << (-shift) as usize))
    }
}

pub(crate) fn ceil_scaled(q: &Rational, shift: i64) -> BigInt {
    -floor_scaled(&-q, shift)
}

/// `k / 2^shift` as a rational.
pub(crate) fn from_scaled(k: BigInt, shift: i64) -> Rational {
    if shift >= 0 {
        Rational::new(k, BigInt::one() << shift as usize)
    } else {
        Rational::from_integer(k << (-shift) as usize)
    }
}

/// Integer `e` with `2^(e-1) <= |q| < 2^(e+1)` (approximately `log2 |q|`).
pub(crate) fn magnitude(q: &Rational) -> i64 {
    q.numer().bits() as i64 - q.denom().bits() as i64
}

/// Largest dyadic with `bits` significant bits that is `<= q`.
pub(crate) fn round_down(q: &Rational, bits: u64) -> Rational {
    // Values that are already short stay exact.
    if q.numer().bits() + q.denom().bits() <= bits + 64 {
        return q.clone();
    }
    let shift = bits as i64 - magnitude(q);
    from_scaled(floor_scaled(q, shift), shift)
}

pub(crate) fn round_up(q: &Rational, bits: u64) -> Rational {
    -round_down(&-q, bits)
}

/// Direction used when printing a rational in decimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Nearest,
    Down,
    Up,
}

fn ten_pow(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

fn scale_by_ten(q: &Rational, e: i64) -> Rational {
    if e >= 0 {
        q * Rational::from_integer(ten_pow(e as u32))
    } else {
        q / Rational::from_integer(ten_pow((-e) as u32))
    }
}

fn round_integer(q: &Rational, rounding: Rounding) -> BigInt {
    match rounding {
        Rounding::Down => q.floor().to_integer(),
        Rounding::Up => q.ceil().to_integer(),
        Rounding::Nearest => q.round().to_integer(),
    }
}

/// Decimal rendering with `sig` significant digits, rounded as requested.
///
/// `Down`/`Up` round toward negative/positive infinity, so the printed value
/// is a valid lower/upper bound.
pub fn format_decimal(q: &Rational, sig: u32, rounding: Rounding) -> String {
    let sig = sig.max(1);
    if q.is_zero() {
        return "0".to_string();
    }
    let abs = q.abs();
    // Smallest E with |q| < 10^E.
    let mut e = (magnitude(&abs) * 30103 / 100000) - 1;
    while scale_by_ten(&abs, -e) >= Rational::one() {
        e += 1;
    }
    while e > -10_000 && scale_by_ten(&abs, -(e - 1)) < Rational::one() {
        e -= 1;
    }
    let mut scale = i64::from(sig) - e;
    let mut n = round_integer(&scale_by_ten(q, scale), rounding);
    if n.abs() >= ten_pow(sig) {
        // Rounding carried into a new leading digit.
        scale -= 1;
        n = round_integer(&scale_by_ten(q, scale), rounding);
    }
    let negative = n.is_negative();
    let digits = n.abs().to_string();
    let body = if scale <= 0 {
        format!("{}{}", digits, "0".repeat((-scale) as usize))
    } else {
        let scale = scale as usize;
        if digits.len() > scale {
            let (int_part, frac) = digits.split_at(digits.len() - scale);
            format!("{int_part}.{frac}")
        } else {
            format!("0.{}{}", "0".repeat(scale - digits.len()), digits)
        }
    };
    if negative && n != BigInt::zero() {
        format!("-{body}")
    } else {
        body
    }
}

/// Parses a plain decimal literal ("-3.25", "7") exactly.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac}").parse().ok()?;
    let value = Rational::new(digits, ten_pow(frac.len() as u32));
    Some(if negative { -value } else { value })
}
