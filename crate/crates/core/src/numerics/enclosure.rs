use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::{
    cmp_exact, eq_exact, format_decimal, le_exact, lt_exact, round_down, round_up, NumericsError, Precision,
    Rational, Rounding,
};

/// Closed interval `[lower, upper]` known to contain some real value.
///
/// Arithmetic is exact on the rational endpoints; only [`Enclosure::round_outward`]
/// (called by the transcendental kernels) loses information, and it always
/// widens.
#[derive(Clone, Debug)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

/// Outcome of comparing two enclosures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Separation {
    Less,
    Greater,
    Inconclusive,
}

impl Separation {
    pub fn reversed(self) -> Self {
        match self {
            Separation::Less => Separation::Greater,
            Separation::Greater => Separation::Less,
            Separation::Inconclusive => Separation::Inconclusive,
        }
    }
}

/// Order relation between two quantities as far as it has been proven.
///
/// `Equal` only arises from exact comparisons; enclosures can never prove it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    ProvenLess,
    ProvenGreater,
    Equal,
    Inconclusive,
}

impl Verdict {
    pub fn is_settled(self) -> bool {
        self != Verdict::Inconclusive
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::ProvenLess => "Proven-Less",
            Verdict::ProvenGreater => "Proven-Greater",
            Verdict::Equal => "Equal",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [
            Verdict::ProvenLess,
            Verdict::ProvenGreater,
            Verdict::Equal,
            Verdict::Inconclusive,
        ]
        .into_iter()
        .find(|v| v.label() == s)
    }

    /// Exact comparison of two rationals.
    pub fn exact(a: &Rational, b: &Rational) -> Self {
        match cmp_exact(a, b) {
            std::cmp::Ordering::Less => Verdict::ProvenLess,
            std::cmp::Ordering::Greater => Verdict::ProvenGreater,
            std::cmp::Ordering::Equal => Verdict::Equal,
        }
    }

    /// Compares enclosures, falling back to exact comparison when both are points.
    pub fn compare(a: &Enclosure, b: &Enclosure) -> Self {
        if a.is_point() && b.is_point() {
            return Verdict::exact(a.lower(), b.lower());
        }
        separate(a, b).into()
    }
}

impl From<Separation> for Verdict {
    fn from(s: Separation) -> Self {
        match s {
            Separation::Less => Verdict::ProvenLess,
            Separation::Greater => Verdict::ProvenGreater,
            Separation::Inconclusive => Verdict::Inconclusive,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn max_exact(a: Rational, b: Rational) -> Rational {
    if lt_exact(&a, &b) {
        b
    } else {
        a
    }
}

/// Proven order between `a` and `b`, or `Inconclusive` when the intervals touch.
pub fn separate(a: &Enclosure, b: &Enclosure) -> Separation {
    if lt_exact(&a.hi, &b.lo) {
        Separation::Less
    } else if lt_exact(&b.hi, &a.lo) {
        Separation::Greater
    } else {
        Separation::Inconclusive
    }
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, NumericsError> {
        if lt_exact(&hi, &lo) {
            return Err(NumericsError::InvertedBounds);
        }
        Ok(Enclosure { lo, hi })
    }

    pub(crate) fn new_unchecked(lo: Rational, hi: Rational) -> Self {
        debug_assert!(le_exact(&lo, &hi));
        Enclosure { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        Enclosure {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lower(&self) -> &Rational {
        &self.lo
    }

    pub fn upper(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        eq_exact(&self.lo, &self.hi)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        le_exact(&self.lo, q) && le_exact(q, &self.hi)
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        le_exact(&self.lo, &other.lo) && le_exact(&other.hi, &self.hi)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Widens the endpoints to dyadics carrying the given precision.
    pub fn round_outward(&self, precision: Precision) -> Self {
        let bits = precision.bits();
        Enclosure {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    pub fn recip(&self) -> Result<Self, NumericsError> {
        if self.contains_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        Ok(Enclosure {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn checked_div(&self, divisor: &Enclosure) -> Result<Self, NumericsError> {
        Ok(self * &divisor.recip()?)
    }

    pub fn square(&self) -> Self {
        if self.contains_zero() {
            let m = max_exact(self.lo.abs(), self.hi.abs());
            Enclosure {
                lo: Rational::zero(),
                hi: &m * &m,
            }
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            if le_exact(&a, &b) {
                Enclosure { lo: a, hi: b }
            } else {
                Enclosure { lo: b, hi: a }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.contains_zero() {
            Enclosure {
                lo: Rational::zero(),
                hi: max_exact(self.lo.abs(), self.hi.abs()),
            }
        } else if self.lo.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self * &Enclosure::point(q.clone())
    }

    /// Decimal rendering `[lo, hi]` rounded outward to `sig` significant digits.
    pub fn to_decimal_string(&self, sig: u32) -> String {
        format!(
            "[{}, {}]",
            format_decimal(&self.lo, sig, Rounding::Down),
            format_decimal(&self.hi, sig, Rounding::Up)
        )
    }
}

impl PartialEq for Enclosure {
    fn eq(&self, other: &Self) -> bool {
        eq_exact(&self.lo, &other.lo) && eq_exact(&self.hi, &other.hi)
    }
}

impl Eq for Enclosure {}

impl From<Rational> for Enclosure {
    fn from(q: Rational) -> Self {
        Enclosure::point(q)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(12))
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        -&self
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products
            .iter()
            .min_by(|a, b| cmp_exact(a, b))
            .cloned()
            .expect("four products");
        let hi = products
            .iter()
            .max_by(|a, b| cmp_exact(a, b))
            .cloned()
            .expect("four products");
        Enclosure { lo, hi }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $method:ident),*) => {$(
        impl $tr for Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: Enclosure) -> Enclosure {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: &Enclosure) -> Enclosure {
                (&self).$method(rhs)
            }
        }
        impl $tr<Enclosure> for &Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: Enclosure) -> Enclosure {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);
