//! The degree bound `m (r−1) ∏_{i=2}^{r−1} (1 − i/(i² + r − 1))` and its
//! rigorous comparison with the other known lower bounds.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::One;

use crate::numerics::{
    int, pi, rat, sqrt, Enclosure, NumericsError, Precision, PrecisionBudget, Rational, Verdict,
};

/// Exact lower bound on the degree of a curve through `r` general points of multiplicity `m`.
///
/// The product is empty for `r <= 2`; the bound is `0` for `r <= 1`.
pub fn theorem_bound(r: u64, m: u64) -> Rational {
    if r <= 1 {
        return int(0);
    }
    let s = BigInt::from(r - 1);
    let mut num = BigInt::from(m) * &s;
    let mut den = BigInt::one();
    for i in 2..r {
        let i = BigInt::from(i);
        let d = &i * &i + &s;
        num *= &d - &i;
        den *= d;
    }
    Rational::new(num, den)
}

/// `⌊√r⌋ · m`, the bound that follows from Nagata's result.
pub fn nagata_floor(r: u64, m: u64) -> BigInt {
    BigInt::from(r.sqrt()) * BigInt::from(m)
}

/// Evain's range of validity `r > (8m/(4m−1) · (m+1))²`, compared exactly.
pub fn evain_applies(r: u64, m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let m = m as i64;
    let t = rat(8 * m, 4 * m - 1) * int(m + 1);
    int(r) > &t * &t
}

/// `(√(r−1) − π/8) · m`, for `r >= 1`.
pub fn sqrt_bound(r: u64, m: u64, precision: Precision) -> Enclosure {
    let root = sqrt(&int(r - 1).into(), precision).expect("non-negative");
    (&root - &pi(precision).scale(&rat(1, 8))).scale(&int(m))
}

/// Xu's bounds for irreducible reduced curves: `√(r−1)·m` and `√r·m − 1/(2√(r−1))`.
pub fn xu_bounds(
    r: u64,
    m: u64,
    precision: Precision,
) -> Result<(Enclosure, Enclosure), NumericsError> {
    let root_prev = sqrt(&int(r - 1).into(), precision)?;
    let root = sqrt(&int(r).into(), precision)?;
    let first = root_prev.scale(&int(m));
    let second = &root.scale(&int(m)) - &root_prev.scale(&int(2)).recip()?;
    Ok((first, second))
}

/// The closed-form bound compared against each competing bound (bound relative to other).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundVerdicts {
    pub vs_nagata: Verdict,
    pub vs_sqrt_bound: Verdict,
    /// Informational: Xu's bounds only cover irreducible reduced curves.
    pub vs_xu_sqrt_r_minus_1: Verdict,
    pub vs_xu_shifted: Verdict,
}

impl BoundVerdicts {
    pub fn all_settled(&self) -> bool {
        [
            self.vs_nagata,
            self.vs_sqrt_bound,
            self.vs_xu_sqrt_r_minus_1,
            self.vs_xu_shifted,
        ]
        .iter()
        .all(|v| v.is_settled())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub r: u64,
    pub m: u64,
    pub paper_bound: Rational,
    pub nagata_floor: BigInt,
    pub sqrt_bound: Enclosure,
    pub xu_sqrt_r_minus_1: Enclosure,
    pub xu_shifted: Enclosure,
    pub evain_applies: bool,
    pub verdicts: BoundVerdicts,
    pub precision: Precision,
}

impl BoundReport {
    /// Strict improvement over `⌊√r⌋ m`; ties do not count.
    pub fn improves_on_nagata(&self) -> bool {
        self.verdicts.vs_nagata == Verdict::ProvenGreater
    }
}

fn report_at(r: u64, m: u64, paper_bound: &Rational, precision: Precision) -> BoundReport {
    let ours = Enclosure::point(paper_bound.clone());
    let nagata = nagata_floor(r, m);
    let sqrt_b = sqrt_bound(r, m, precision);
    let (xu1, xu2) = xu_bounds(r, m, precision).expect("r >= 2");
    BoundReport {
        r,
        m,
        paper_bound: paper_bound.clone(),
        verdicts: BoundVerdicts {
            vs_nagata: Verdict::exact(paper_bound, &Rational::from_integer(nagata.clone())),
            vs_sqrt_bound: Verdict::compare(&ours, &sqrt_b),
            vs_xu_sqrt_r_minus_1: Verdict::compare(&ours, &xu1),
            vs_xu_shifted: Verdict::compare(&ours, &xu2),
        },
        nagata_floor: nagata,
        sqrt_bound: sqrt_b,
        xu_sqrt_r_minus_1: xu1,
        xu_shifted: xu2,
        evain_applies: evain_applies(r, m),
        precision,
    }
}

/// Full comparison for `r >= 2`, escalating precision until every verdict
/// settles or the budget runs out (leaving `Inconclusive`).
pub fn compare_bounds(r: u64, m: u64, budget: &PrecisionBudget) -> BoundReport {
    assert!(r >= 2, "compare_bounds needs r >= 2");
    let paper_bound = theorem_bound(r, m);
    budget
        .escalate(
            |p| report_at(r, m, &paper_bound, p),
            |rep| rep.verdicts.all_settled(),
        )
        .0
}

/// Interval `((n + π/8)² + 1, (n + 1)²)` where the corollary's bound beats `⌊√r⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementWindow {
    pub n: u64,
    pub lower: Enclosure,
    pub upper: u64,
}

impl ImprovementWindow {
    pub fn new(n: u64, precision: Precision) -> Self {
        let shifted = &Enclosure::point(int(n)) + &pi(precision).scale(&rat(1, 8));
        ImprovementWindow {
            n,
            lower: &shifted.square() + &Enclosure::point(int(1)),
            upper: (n + 1) * (n + 1),
        }
    }

    /// Whether `r` lies strictly inside; `None` if the lower endpoint is not resolved.
    pub fn contains(&self, r: u64) -> Option<bool> {
        if r >= self.upper {
            return Some(false);
        }
        match Verdict::compare(&Enclosure::point(int(r)), &self.lower) {
            Verdict::ProvenGreater => Some(true),
            Verdict::ProvenLess | Verdict::Equal => Some(false),
            Verdict::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementScan {
    pub r_min: u64,
    pub r_max: u64,
    /// Every `r` in range with `theorem_bound(r, 1) > ⌊√r⌋`, ascending.
    pub improving: Vec<u64>,
    /// Predicted windows that meet `[r_min, r_max]`.
    pub windows: Vec<ImprovementWindow>,
}

impl ImprovementScan {
    /// Predicted windows (if any) containing `r`.
    pub fn window_of(&self, r: u64) -> Option<&ImprovementWindow> {
        self.windows.iter().find(|w| w.contains(r) == Some(true))
    }
}

/// Exact scan of `r_min..=r_max` for strict improvement over `⌊√r⌋ m`.
///
/// Improvement is independent of `m`, so `m = 1` is used.
pub fn improvement_scan(r_min: u64, r_max: u64, precision: Precision) -> ImprovementScan {
    assert!(2 <= r_min && r_min <= r_max, "need 2 <= r_min <= r_max");
    let improving = (r_min..=r_max)
        .filter(|&r| theorem_bound(r, 1) > int(nagata_floor(r, 1)))
        .collect();
    let first = r_min.sqrt().saturating_sub(1).max(1);
    let windows = (first..=r_max.sqrt())
        .map(|n| ImprovementWindow::new(n, precision))
        .filter(|w| w.upper > r_min && w.lower.lower() < &int(r_max))
        .collect();
    ImprovementScan {
        r_min,
        r_max,
        improving,
        windows,
    }
}
