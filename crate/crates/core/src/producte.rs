//! Rigorous verification that `b(n) = n ∏_{i=2}^{n} (1 − i/(i²+n))` exceeds
//! `√n − π/8` for `n >= 9`, together with every intermediate estimate used to
//! get there.
//!
//! Throughout, `x_i = i/(i²+n)` and `S = Σ_{i=1}^{n−1} x_i²`. Exact identities
//! are checked in rational arithmetic; anything involving π, square roots,
//! `exp` or `sinh` goes through [`Enclosure`]s and yields a three-valued
//! [`CheckOutcome`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::numerics::{
    exp, int, le_exact, lt_exact, pi, rat, sinh, sqrt, Enclosure, Precision, PrecisionBudget,
    Rational, Verdict,
};

/// Number of series terms used by the Parseval step inside [`verify_proposition`].
pub const DEFAULT_CHAIN_TERMS: u64 = 2_000;

/// Smallest `n` covered by the claim; below it results are exploratory.
pub const PROPOSITION_MIN_N: u64 = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProducteError {
    #[error("n must be at least {min} (got {n})")]
    NTooSmall { n: u64, min: u64 },
    #[error("the series needs at least n = {n} terms (got {terms})")]
    TooFewTerms { n: u64, terms: u64 },
    #[error("tolerance must be non-negative")]
    NegativeTolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckOutcome {
    Pass,
    Fail,
    Inconclusive,
}

impl CheckOutcome {
    pub fn exact(holds: bool) -> Self {
        if holds {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        }
    }

    pub fn is_settled(self) -> bool {
        self != CheckOutcome::Inconclusive
    }

    /// Conjunction: any failure fails, otherwise any doubt is inconclusive.
    pub fn and(self, other: CheckOutcome) -> CheckOutcome {
        use CheckOutcome::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CheckOutcome::Pass => "pass",
            CheckOutcome::Fail => "fail",
            CheckOutcome::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `a <= b` as far as the enclosures allow.
fn le(a: &Enclosure, b: &Enclosure) -> CheckOutcome {
    if le_exact(a.upper(), b.lower()) {
        CheckOutcome::Pass
    } else if lt_exact(b.upper(), a.lower()) {
        CheckOutcome::Fail
    } else {
        CheckOutcome::Inconclusive
    }
}

/// `a < b` as far as the enclosures allow.
fn lt(a: &Enclosure, b: &Enclosure) -> CheckOutcome {
    if lt_exact(a.upper(), b.lower()) {
        CheckOutcome::Pass
    } else if le_exact(b.upper(), a.lower()) {
        CheckOutcome::Fail
    } else {
        CheckOutcome::Inconclusive
    }
}

fn pt(q: Rational) -> Enclosure {
    Enclosure::point(q)
}

/// `x_i = i/(i²+n)`.
fn x(i: u64, n: u64) -> Rational {
    rat(i as i64, (i * i + n) as i64)
}

/// Multiplies numerators and denominators separately and reduces once;
/// reducing after every factor costs a gcd of ever longer integers.
fn product(range: impl Iterator<Item = u64>, f: impl Fn(u64) -> Rational) -> Rational {
    let (num, den) = range.fold((BigInt::one(), BigInt::one()), |(num, den), i| {
        let q = f(i);
        (num * q.numer(), den * q.denom())
    });
    Rational::new(num, den)
}

/// `n ∏_{i=2}^{n} (1 − i/(i²+n))`, reduced; equals 1 for `n = 1`.
pub fn product_b(n: u64) -> Rational {
    assert!(n >= 1, "product_b needs n >= 1");
    int(n) * product(2..=n, |i| Rational::one() - x(i, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityCheck {
    /// `∏_{i=2}^{n}` and `∏_{i=1}^{n−1}` forms of `b` agree.
    pub shifted_range: bool,
    /// `n ∏ (n+i²−i)/(i²+n) = ∏ (1 + x_i)` over `i = 1..n−1`.
    pub reindex: bool,
    /// `b² = n ∏ (1 − x_i²)`.
    pub squared: bool,
}

impl IdentityCheck {
    pub fn all_hold(&self) -> bool {
        self.shifted_range && self.reindex && self.squared
    }
}

pub fn check_identities(n: u64) -> IdentityCheck {
    assert!(n >= 1, "check_identities needs n >= 1");
    let b = product_b(n);
    let lower_range = int(n) * product(1..n, |i| Rational::one() - x(i, n));
    let factored = int(n) * product(1..n, |i| rat((n + i * i - i) as i64, (i * i + n) as i64));
    let plus = product(1..n, |i| Rational::one() + x(i, n));
    let squared = int(n) * product(1..n, |i| Rational::one() - x(i, n) * x(i, n));
    IdentityCheck {
        shifted_range: b == lower_range,
        reindex: factored == plus && b == plus,
        squared: &b * &b == squared,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsDelta {
    /// `1 − ∏ (1 − x_i²)`
    pub eps: Rational,
    /// `∏ (1 + x_i²) − 1`
    pub delta: Rational,
    /// `0 < ε < δ`
    pub ordered: bool,
    /// `b² > n (1 − δ)`
    pub b_squared_exceeds: bool,
}

pub fn eps_delta(n: u64) -> EpsDelta {
    assert!(n >= 1, "eps_delta needs n >= 1");
    let minus = product(1..n, |i| Rational::one() - x(i, n) * x(i, n));
    let plus = product(1..n, |i| Rational::one() + x(i, n) * x(i, n));
    let eps = Rational::one() - &minus;
    let delta = &plus - Rational::one();
    let b = product_b(n);
    let b_squared_exceeds = &b * &b > int(n) * (Rational::one() - &delta);
    EpsDelta {
        ordered: eps > Rational::zero() && eps < delta,
        eps,
        delta,
        b_squared_exceeds,
    }
}

/// `S = Σ_{i=1}^{n−1} x_i²`, exactly.
pub fn head_sum(n: u64) -> Rational {
    // Common denominator ∏ (i²+n)², then one reduction.
    let dens: Vec<BigInt> = (1..n).map(|i| BigInt::from(i * i + n).pow(2)).collect();
    let total: BigInt = dens.iter().product();
    let num: BigInt = (1..n)
        .zip(&dens)
        .map(|(i, d)| BigInt::from(i * i) * (&total / d))
        .sum();
    Rational::new(num, total)
}

/// Enclosure of `Σ_{i=from}^{to} x_i²` from fixed-point floor/ceil accumulation.
fn series_enclosure(n: u64, from: u64, to: u64, precision: Precision) -> Enclosure {
    // Guard bits absorb one unit of rounding per term.
    let shift = precision.bits() + 2 * u64::from(64 - to.leading_zeros()) + 8;
    let scale = BigInt::one() << shift as usize;
    let mut lo = BigInt::zero();
    let mut carries = 0u64;
    for i in from..=to {
        let i2 = BigInt::from(i) * i;
        let den = (&i2 + n) * (&i2 + n);
        let (q, r) = (i2 * &scale).div_rem(&den);
        lo += q;
        if !r.is_zero() {
            carries += 1;
        }
    }
    let hi = &lo + carries;
    Enclosure::new(Rational::new(lo, scale.clone()), Rational::new(hi, scale))
        .expect("floor <= ceil")
}

/// Closed form of `Σ_{i>=1} x_i²`:
/// `(π/(2 sinh √n π))² · (1/π) · (−π + sinh(2√n π)/(2√n))`.
pub fn closed_form(n: u64, precision: Precision) -> Enclosure {
    assert!(n >= 1, "closed_form needs n >= 1");
    let p = pi(precision);
    let root = sqrt(&pt(int(n)), precision).expect("n >= 1");
    let arg = &root * &p;
    let sh = sinh(&arg, precision);
    let sh2 = sinh(&arg.scale(&int(2)), precision);
    let integral = &sh2.checked_div(&root.scale(&int(2))).expect("√n > 0") - &p;
    let front = p
        .checked_div(&sh.square().scale(&int(4)))
        .expect("sinh > 0");
    (&front * &integral).round_outward(precision)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsevalReport {
    pub n: u64,
    pub terms: u64,
    pub tolerance: Rational,
    /// `Σ_{i=1}^{terms} x_i²`
    pub partial_sum: Enclosure,
    pub closed_form: Enclosure,
    /// `closed_form − partial_sum`
    pub residual: Enclosure,
    /// Bound on the omitted terms, `1/terms`.
    pub tail_bound: Rational,
    pub outcome: CheckOutcome,
    /// `Σ_{i>=n} x_i² >= 1/(n+1)`, on the truncation and through the closed form.
    pub tail_estimate: CheckOutcome,
    pub precision: Precision,
}

fn parseval_at(n: u64, terms: u64, tolerance: &Rational, precision: Precision) -> ParsevalReport {
    let partial = series_enclosure(n, 1, terms, precision);
    let closed = closed_form(n, precision);
    let residual = &closed - &partial;
    let tail_bound = rat(1, terms as i64);
    let allowed = pt(tolerance + &tail_bound);
    let outcome = le(&residual.abs(), &allowed);

    // Σ_{i=n}^{T} x_i² >= ∫_n^{T+1} dx/(x+1)² = 1/(n+1) − 1/(T+2).
    let truncated = series_enclosure(n, n, terms, precision);
    let integral = pt(rat(1, n as i64 + 1) - rat(1, terms as i64 + 2));
    let full_tail = &closed - &pt(head_sum(n));
    let tail_estimate = le(&integral, &truncated).and(le(&pt(rat(1, n as i64 + 1)), &full_tail));

    ParsevalReport {
        n,
        terms,
        tolerance: tolerance.clone(),
        partial_sum: partial,
        closed_form: closed,
        residual,
        tail_bound,
        outcome,
        tail_estimate,
        precision,
    }
}

/// Compares the truncated series with its closed form; passes when
/// `|difference| <= tolerance + 1/terms`.
pub fn parseval_check(
    n: u64,
    terms: u64,
    tolerance: &Rational,
    budget: &PrecisionBudget,
) -> Result<ParsevalReport, ProducteError> {
    if n < 1 {
        return Err(ProducteError::NTooSmall { n, min: 1 });
    }
    if terms < n {
        return Err(ProducteError::TooFewTerms { n, terms });
    }
    if *tolerance < Rational::zero() {
        return Err(ProducteError::NegativeTolerance);
    }
    Ok(budget
        .escalate(
            |p| parseval_at(n, terms, tolerance, p),
            |r| r.outcome.is_settled() && r.tail_estimate.is_settled(),
        )
        .0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub name: &'static str,
    pub outcome: CheckOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropositionCertificate {
    pub n: u64,
    pub b: Rational,
    /// `√n − π/8`
    pub rhs: Enclosure,
    pub verdict: Verdict,
    /// `n < 9`: outside the claim, reported for curiosity only.
    pub exploratory: bool,
    pub proof_chain: Vec<ProofStep>,
    pub precision: Precision,
}

impl PropositionCertificate {
    pub fn chain_passes(&self) -> bool {
        self.proof_chain
            .iter()
            .all(|s| s.outcome == CheckOutcome::Pass)
    }

    fn settled(&self) -> bool {
        self.verdict.is_settled() && self.proof_chain.iter().all(|s| s.outcome.is_settled())
    }
}

/// Exact parts of the chain, independent of precision.
struct ExactParts {
    b: Rational,
    b_squared: Rational,
    identities: IdentityCheck,
    eps_delta: EpsDelta,
    head: Rational,
}

impl ExactParts {
    fn new(n: u64) -> Self {
        let b = product_b(n);
        ExactParts {
            b_squared: &b * &b,
            b,
            identities: check_identities(n),
            eps_delta: eps_delta(n),
            head: head_sum(n),
        }
    }
}

fn chain_at(
    n: u64,
    terms: u64,
    exact: &ExactParts,
    precision: Precision,
) -> PropositionCertificate {
    use CheckOutcome::Pass;
    let mut chain = Vec::new();
    let mut push =
        |name: &'static str, outcome: CheckOutcome| chain.push(ProofStep { name, outcome });

    let one = || pt(int(1));
    let q = |v: Rational| pt(v);
    let nn = int(n);
    let s = q(exact.head.clone());
    let p = pi(precision);
    let root = sqrt(&q(nn.clone()), precision).expect("n >= 1");
    let arg = &root * &p;
    let sh = sinh(&arg, precision);
    let sh2 = sinh(&arg.scale(&int(2)), precision);
    let t = exp(&arg, precision);
    let inv_t2 = t.square().recip().expect("t > 0").round_outward(precision);
    let closed = closed_form(n, precision);
    let pi_over_4root = p.checked_div(&root.scale(&int(4))).expect("√n > 0");

    push(
        "reindex identity",
        CheckOutcome::exact(exact.identities.reindex),
    );
    push(
        "shifted product range",
        CheckOutcome::exact(exact.identities.shifted_range),
    );
    push("b² identity", CheckOutcome::exact(exact.identities.squared));
    push("0 < ε < δ", CheckOutcome::exact(exact.eps_delta.ordered));
    push(
        "b² > n(1 − δ)",
        CheckOutcome::exact(exact.eps_delta.b_squared_exceeds),
    );

    let one_plus_delta = q(Rational::one() + &exact.eps_delta.delta);
    push("log(1 + δ) <= S", le(&one_plus_delta, &exp(&s, precision)));

    let tol = rat(1, 1_000_000);
    let parseval = parseval_at(n, terms.max(n), &tol, precision);
    push("Parseval closed form", parseval.outcome);
    push("tail bound", parseval.tail_estimate);

    let after_tail = &closed - &q(rat(1, n as i64 + 1));
    push("S <= C − 1/(n+1)", le(&s, &after_tail));

    // C <= π/(8√n) · sinh 2x / sinh² x
    let ratio = sh2.checked_div(&sh.square()).expect("sinh > 0");
    let c_bound = &p.checked_div(&root.scale(&int(8))).expect("√n > 0") * &ratio;
    push(
        "closed form <= π sinh(2x) / (8√n sinh² x)",
        le(&closed, &c_bound),
    );

    // sinh 2x / (2 sinh² x) <= (1 + 1/t²)(1 + 1.5/t²) <= 1 + 3/t²
    let half_ratio = ratio.scale(&rat(1, 2));
    let middle = &(&one() + &inv_t2) * &(&one() + &inv_t2.scale(&rat(3, 2)));
    let three = &one() + &inv_t2.scale(&int(3));
    push(
        "sinh-ratio bound",
        le(&half_ratio, &middle).and(le(&middle, &three)),
    );

    // 3π/(4√n) <= 1 turns π/(4√n)·(1 + 3/t²) into π/(4√n) + 1/t².
    let loose = &(&pi_over_4root + &inv_t2) - &q(rat(1, n as i64 + 1));
    push(
        "S <= π/(4√n) + 1/t² − 1/(n+1)",
        le(&pi_over_4root.scale(&int(3)), &one()).and(le(&s, &loose)),
    );

    let grows = le(&q(int(3 * n)), &t);
    let quadratic = CheckOutcome::exact(3 * n * n >= (n + 1) * (n + 2));
    push("t-bound", grows.and(quadratic));

    let y = &pi_over_4root - &q(rat(1, n as i64 + 2));
    push("S <= π/(4√n) − 1/(n+2)", le(&s, &y));

    let e_y = exp(&y, precision);
    push(
        "δ <= e^y − 1",
        le(&q(exact.eps_delta.delta.clone()), &(&e_y - &one())),
    );

    let two_minus = &q(int(2)) - &e_y;
    let b2 = q(exact.b_squared.clone());
    push("b² >= n(2 − e^y)", le(&two_minus.scale(&nn), &b2));

    let u = pi_over_4root.scale(&rat(1, 2));
    // π/(8√n) <= π/24 is √n >= 3; at n = 9 it is a tie no enclosure can settle.
    let u_small = CheckOutcome::exact(n >= 9);
    let inv_one_minus_u = (&one() - &u).recip().expect("u < 1 for n >= 1");
    let factor = le(&inv_one_minus_u, &q(rat(6, 5)));
    let quad = le(&u.square().scale(&(rat(12, 5) * &nn)), &q(rat(2, 5)));
    push(
        "u <= π/24, 1/(1 − u) <= 1.2, 2.4nu² <= 0.4",
        u_small.and(factor).and(quad),
    );

    // n(2 − e^y) >= n − π√n/4 + n/(n+2) − 0.4 >= n − π√n/4 + 9/11 − 0.4
    let pi_root_4 = (&p * &root).scale(&rat(1, 4));
    let series =
        &(&(&q(nn.clone()) - &pi_root_4) + &q(rat(n as i64, n as i64 + 2))) - &q(rat(2, 5));
    let series_step = le(&series, &two_minus.scale(&nn));
    let floor_step = CheckOutcome::exact(rat(n as i64, n as i64 + 2) >= rat(9, 11));
    push(
        "final geometric-series bound",
        series_step.and(floor_step).and(le(&series, &b2)),
    );

    let slack = q(rat(9, 11) - rat(2, 5));
    push(
        "9/11 − 0.4 > π²/64",
        lt(&p.square().scale(&rat(1, 64)), &slack),
    );

    let rhs = (&root - &p.scale(&rat(1, 8))).round_outward(precision);
    let verdict = Verdict::compare(&q(exact.b.clone()), &rhs);
    push(
        "b > √n − π/8",
        match verdict {
            Verdict::ProvenGreater => Pass,
            Verdict::Inconclusive => CheckOutcome::Inconclusive,
            _ => CheckOutcome::Fail,
        },
    );

    PropositionCertificate {
        n,
        b: exact.b.clone(),
        rhs,
        verdict,
        exploratory: n < PROPOSITION_MIN_N,
        proof_chain: chain,
        precision,
    }
}

/// Certificate for one `n`, escalating precision until the verdict and every
/// step of the chain are settled or the budget is spent.
pub fn verify_proposition(n: u64, budget: &PrecisionBudget) -> PropositionCertificate {
    verify_proposition_with(n, DEFAULT_CHAIN_TERMS, budget)
}

/// As [`verify_proposition`], with `terms` series terms in the Parseval step.
pub fn verify_proposition_with(
    n: u64,
    terms: u64,
    budget: &PrecisionBudget,
) -> PropositionCertificate {
    assert!(n >= 1, "verify_proposition needs n >= 1");
    let exact = ExactParts::new(n);
    budget
        .escalate(
            |p| chain_at(n, terms, &exact, p),
            PropositionCertificate::settled,
        )
        .0
}
