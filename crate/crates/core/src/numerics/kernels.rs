//! Transcendental kernels: π, √, exp, sinh.
//!
//! Each kernel works in binary fixed point with separate floor/ceil tracks
//! and an explicit truncation remainder, then rounds the result outward.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{
    ceil_scaled, floor_scaled, from_scaled, magnitude, Enclosure, NumericsError, Precision,
    Rational,
};

/// The four functions the engine can enclose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Pi,
    Sqrt,
    Exp,
    Sinh,
}

/// Encloses `f(x)` (`x` is ignored for [`Function::Pi`]).
pub fn enclose(
    f: Function,
    x: &Enclosure,
    precision: Precision,
) -> Result<Enclosure, NumericsError> {
    match f {
        Function::Pi => Ok(pi(precision)),
        Function::Sqrt => sqrt(x, precision),
        Function::Exp => Ok(exp(x, precision)),
        Function::Sinh => Ok(sinh(x, precision)),
    }
}

/// Bounds on `atan(1/k) · 2^w`, from the alternating Gregory series.
fn atan_inv_fixed(k: u64, w: u64) -> (BigInt, BigInt) {
    let k2 = BigInt::from(k) * BigInt::from(k);
    let one = BigInt::one() << w as usize;
    // floor/ceil of 2^w / k^(2j+1)
    let mut pf = one.div_floor(&BigInt::from(k));
    let mut pc = one.div_ceil(&BigInt::from(k));
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    let mut j: u64 = 0;
    loop {
        let d = BigInt::from(2 * j + 1);
        let tf = pf.div_floor(&d);
        let tc = pc.div_ceil(&d);
        if tf.is_zero() {
            // Alternating, decreasing: the omitted tail is at most this term.
            lo -= &tc;
            hi += &tc;
            return (lo, hi);
        }
        if j % 2 == 0 {
            lo += &tf;
            hi += &tc;
        } else {
            lo -= &tc;
            hi -= &tf;
        }
        pf = pf.div_floor(&k2);
        pc = pc.div_ceil(&k2);
        j += 1;
    }
}

/// π from a Machin-type formula `π = Σ c · atan(1/k)`.
fn pi_from_formula(formula: &[(i64, u64)], precision: Precision) -> Enclosure {
    let w = precision.bits() + 16;
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for &(coef, k) in formula {
        let (a_lo, a_hi) = atan_inv_fixed(k, w);
        let c = BigInt::from(coef);
        if coef >= 0 {
            lo += &c * a_lo;
            hi += &c * a_hi;
        } else {
            lo += &c * a_hi;
            hi += &c * a_lo;
        }
    }
    let w = w as i64;
    Enclosure::new_unchecked(from_scaled(lo, w), from_scaled(hi, w)).round_outward(precision)
}

const MACHIN: [(i64, u64); 2] = [(16, 5), (-4, 239)];

/// Enclosure of π (Machin: `π/4 = 4 atan(1/5) − atan(1/239)`).
pub fn pi(precision: Precision) -> Enclosure {
    pi_from_formula(&MACHIN, precision)
}

fn sqrt_lower(q: &Rational, bits: u64) -> Rational {
    if q.is_zero() {
        return q.clone();
    }
    // q · 4^k carries about 2·bits bits in its integer part.
    let k = bits as i64 - magnitude(q) / 2;
    from_scaled(floor_scaled(q, 2 * k).sqrt(), k)
}

fn sqrt_upper(q: &Rational, bits: u64) -> Rational {
    if q.is_zero() {
        return q.clone();
    }
    let k = bits as i64 - magnitude(q) / 2;
    let c = ceil_scaled(q, 2 * k);
    let s = c.sqrt();
    let s = if &s * &s == c { s } else { s + 1 };
    from_scaled(s, k)
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Enclosure of `√x`; exact when both endpoints are squares of rationals.
pub fn sqrt(x: &Enclosure, precision: Precision) -> Result<Enclosure, NumericsError> {
    if x.lower().is_negative() {
        return Err(NumericsError::NegativeSqrt);
    }
    let bits = precision.bits() + 8;
    let lo = exact_sqrt(x.lower()).unwrap_or_else(|| sqrt_lower(x.lower(), bits));
    let hi = exact_sqrt(x.upper()).unwrap_or_else(|| sqrt_upper(x.upper(), bits));
    Ok(Enclosure::new_unchecked(lo, hi).round_outward(precision))
}

/// Taylor sum of `exp(y)` for `0 <= y = Y / 2^w < 2^-8`, in fixed point.
/// Lower track rounds every term down; upper track rounds up and adds the tail.
fn exp_taylor_fixed(y: &BigInt, w: u64, upper: bool) -> BigInt {
    let one = BigInt::one() << w as usize;
    let mut sum = one.clone();
    let mut term = one.clone();
    let mut k: u64 = 1;
    loop {
        let num = &term * y;
        let den = &one * BigInt::from(k);
        term = if upper {
            num.div_ceil(&den)
        } else {
            num.div_floor(&den)
        };
        if upper {
            sum += &term;
            if term <= BigInt::one() {
                // Remaining terms shrink by a factor < 2^-8 each: tail < 1 ulp.
                return sum + 1;
            }
        } else {
            if term.is_zero() {
                return sum;
            }
            sum += &term;
        }
        k += 1;
    }
}

/// Bounds on `exp(x)` for a rational `x >= 0`.
fn exp_nonneg(x: &Rational, precision: Precision) -> (Rational, Rational) {
    if x.is_zero() {
        return (Rational::one(), Rational::one());
    }
    let reduce = (magnitude(x) + 9).max(0) as u64;
    let w = precision.bits() + reduce + 24;
    // y = x / 2^reduce, bracketed in fixed point.
    let y_lo = floor_scaled(x, w as i64 - reduce as i64);
    let y_hi = ceil_scaled(x, w as i64 - reduce as i64);
    let mut lo = exp_taylor_fixed(&y_lo, w, false);
    let mut hi = exp_taylor_fixed(&y_hi, w, true);
    for _ in 0..reduce {
        lo = (&lo * &lo) >> w as usize;
        hi = (&hi * &hi).div_ceil(&(BigInt::one() << w as usize));
    }
    (from_scaled(lo, w as i64), from_scaled(hi, w as i64))
}

/// Bounds on `exp(x)` for any rational `x`.
fn exp_point(x: &Rational, precision: Precision) -> (Rational, Rational) {
    if x.is_negative() {
        let (lo, hi) = exp_nonneg(&-x, precision);
        (hi.recip(), lo.recip())
    } else {
        exp_nonneg(x, precision)
    }
}

/// Enclosure of `exp(x)`, using monotonicity on the endpoints of `x`.
pub fn exp(x: &Enclosure, precision: Precision) -> Enclosure {
    let (lo, _) = exp_point(x.lower(), precision);
    let (_, hi) = exp_point(x.upper(), precision);
    Enclosure::new_unchecked(lo, hi).round_outward(precision)
}

fn sinh_point(x: &Rational, precision: Precision) -> Enclosure {
    if x.is_zero() {
        return Enclosure::point(Rational::zero());
    }
    let (lo, hi) = exp_point(x, precision);
    let e = Enclosure::new_unchecked(lo, hi);
    let e_inv = e.recip().expect("exp is positive");
    (&e - &e_inv).scale(&Rational::new(1.into(), 2.into()))
}

/// Enclosure of `sinh(x) = (e^x − e^−x) / 2`, monotone in `x`.
pub fn sinh(x: &Enclosure, precision: Precision) -> Enclosure {
    let lo = sinh_point(x.lower(), precision);
    let hi = sinh_point(x.upper(), precision);
    Enclosure::new_unchecked(lo.lower().clone(), hi.upper().clone()).round_outward(precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, parse_decimal, rat, separate, Separation};

    // First 100 decimals of π, used as an independent reference.
    const PI_DIGITS: &str = "3.1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

    fn p(d: u32) -> Precision {
        Precision::digits(d).unwrap()
    }

    fn pt(q: Rational) -> Enclosure {
        Enclosure::point(q)
    }

    #[test]
    fn pi_contains_reference_digits() {
        let reference = parse_decimal(PI_DIGITS).unwrap();
        let ulp = Rational::new(1.into(), num_traits::pow(BigInt::from(10), 100));
        let reference = Enclosure::new(reference.clone(), reference + ulp).unwrap();
        for d in [10, 30, 64, 90] {
            let e = pi(p(d));
            assert!(
                separate(&e, &reference) == Separation::Inconclusive,
                "π enclosure at {d} digits misses the reference"
            );
            assert!(
                e.width()
                    < Rational::new(1.into(), num_traits::pow(BigInt::from(10), d as usize - 1))
            );
        }
        let ten = pi(p(10));
        assert!(ten.lower() > &parse_decimal("3.141592653").unwrap());
        assert!(ten.upper() < &parse_decimal("3.141592654").unwrap());
    }

    #[test]
    fn pi_matches_second_formula() {
        // Størmer: π/4 = 44 atan(1/57) + 7 atan(1/239) − 12 atan(1/682) + 24 atan(1/12943)
        let stormer = [(176, 57), (28, 239), (-48, 682), (96, 12943)];
        for d in [20, 64, 300] {
            let a = pi(p(d));
            let b = pi_from_formula(&stormer, p(d));
            assert_eq!(separate(&a, &b), Separation::Inconclusive);
            assert_eq!(separate(&b, &a), Separation::Inconclusive);
        }
    }

    #[test]
    fn sqrt_examples() {
        for d in [1, 5, 64, 500] {
            assert_eq!(sqrt(&pt(int(4)), p(d)).unwrap(), pt(int(2)));
        }
        assert_eq!(sqrt(&pt(rat(9, 16)), p(10)).unwrap(), pt(rat(3, 4)));
        let s2 = sqrt(&pt(int(2)), p(40)).unwrap();
        assert!(s2.lower() * s2.lower() <= int(2));
        assert!(s2.upper() * s2.upper() >= int(2));
        assert!(s2.width() < rat(1, 1_000_000_000_000_000));
        assert_eq!(sqrt(&pt(int(-1)), p(10)), Err(NumericsError::NegativeSqrt));
        assert_eq!(sqrt(&pt(int(0)), p(10)).unwrap(), pt(int(0)));
    }

    #[test]
    fn exp_and_sinh_examples() {
        assert_eq!(sinh(&pt(int(0)), p(20)), pt(int(0)));
        assert_eq!(exp(&pt(int(0)), p(20)), pt(int(1)));
        // e = 2.718281828459045235360287471352662497757...
        let e = exp(&pt(int(1)), p(30));
        let e_lo = parse_decimal("2.71828182845904523536028747135").unwrap();
        let e_hi = parse_decimal("2.71828182845904523536028747136").unwrap();
        assert!(e.lower() >= &e_lo && e.upper() <= &e_hi, "{e}");
        // exp(-1) · exp(1) encloses 1
        let prod = &exp(&pt(int(-1)), p(30)) * &e;
        assert!(prod.contains(&int(1)));
        // sinh(1) = 1.1752011936438014568823818505956...
        let s = sinh(&pt(int(1)), p(25));
        assert!(s.lower() > &parse_decimal("1.175201193643801456882").unwrap());
        assert!(s.upper() < &parse_decimal("1.175201193643801456883").unwrap());
    }

    #[test]
    fn exp_large_argument_is_tight() {
        // exp(89) ~ 4.49e38; relative width must honour the requested digits.
        let x = pt(int(89));
        let e = exp(&x, p(64));
        let rel = e.width() / e.lower();
        assert!(rel < Rational::new(1.into(), num_traits::pow(BigInt::from(10), 60)));
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let x = pt(rat(3, 2));
        assert_eq!(enclose(Function::Exp, &x, p(20)).unwrap(), exp(&x, p(20)));
        assert_eq!(enclose(Function::Sinh, &x, p(20)).unwrap(), sinh(&x, p(20)));
        assert_eq!(
            enclose(Function::Sqrt, &x, p(20)).unwrap(),
            sqrt(&x, p(20)).unwrap()
        );
        assert_eq!(enclose(Function::Pi, &x, p(20)).unwrap(), pi(p(20)));
    }
}
