//! Stage-by-stage specialization of `r` general points onto a single
//! infinitely near chain, with every inequality of the unloading lemma
//! checked in exact arithmetic.
//!
//! Stage `i` works on the chain where each point is proximate to its
//! predecessor and `p_3, ..., p_i` are additionally proximate to `p_1`.
//! With `α_i = (i−1)/(r−1)` and `β_i = 1 − (i−1)/((i−1)² + r − 1)`, a stage
//! that receives target `A` must hand on `β_i A` to the next one.

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::bounds::theorem_bound;
use crate::cluster::{ClusterError, ProximityStructure, WeightedCluster};
use crate::numerics::{int, rat, Rational};
use crate::unloading::{unload, PivotPolicy, UnloadError, UnloadingTrace};

/// Default caps on `r` and `m`; the CLI asks for an override beyond them.
pub const MAX_POINTS: u64 = 500;
pub const MAX_MULTIPLICITY: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecializationError {
    #[error("satellite depth {depth} is outside 2..={points}")]
    DepthOutOfRange { points: usize, depth: usize },
    #[error("simulation needs r >= 2 and m >= 1 (got r = {r}, m = {m})")]
    BadParameters { r: u64, m: u64 },
    #[error("stage {stage}: hypothesis `{hypothesis}` fails ({lhs} < {rhs})")]
    Hypothesis {
        stage: usize,
        hypothesis: &'static str,
        lhs: Rational,
        rhs: Rational,
    },
    #[error("stage {stage} failed its checks")]
    StageFailed {
        stage: usize,
        records: Vec<StageRecord>,
    },
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Unload(#[from] UnloadError),
}

/// Parameters of the chain underlying stage `depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainClusterSpec {
    pub points: usize,
    pub depth: usize,
}

/// Proximities `(j, j−1)` for `j = 2..=r` and `(j, 1)` for `j = 3..=depth`.
pub fn build_chain(spec: ChainClusterSpec) -> Result<ProximityStructure, SpecializationError> {
    let ChainClusterSpec { points, depth } = spec;
    if depth < 2 || depth > points {
        return Err(SpecializationError::DepthOutOfRange { points, depth });
    }
    let pairs = (2..=points)
        .map(|j| (j, j - 1))
        .chain((3..=depth).map(|j| (j, 1)));
    Ok(ProximityStructure::new(points, pairs).expect("chain clusters are realizable"))
}

pub fn alpha(r: u64, i: u64) -> Rational {
    rat(i as i64 - 1, r as i64 - 1)
}

pub fn beta(r: u64, i: u64) -> Rational {
    let k = i as i64 - 1;
    int(1) - rat(k, k * k + r as i64 - 1)
}

/// An inequality `lhs >= rhs` evaluated exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Inequality {
    fn new(lhs: Rational, rhs: Rational) -> Self {
        Inequality { lhs, rhs }
    }

    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageChecks {
    /// `((i−1) m′₁ + M′) / ((i−1) α_i + 1) >= β_i A`
    pub first: Inequality,
    /// `m′₁ >= α_i β_i A`
    pub second: Inequality,
    /// `m′₁ − α_i M′ >= 0`, implied by consistency.
    pub proximity_audit: Inequality,
    /// `(i−1) m₁ + M` never drops along the trace, and only moves on steps at `p_r`.
    pub conserved_quantity: bool,
    /// `((i−2) α_{i−1} + 1) + α_{i−1} = ((i−1) α_i + 1) β_i`
    pub coefficient_identity: bool,
    /// Output consistent with non-negative multiplicities.
    pub consistent_output: bool,
}

impl StageChecks {
    pub fn all_pass(&self) -> bool {
        self.first.holds()
            && self.second.holds()
            && self.proximity_audit.holds()
            && self.conserved_quantity
            && self.coefficient_identity
            && self.consistent_output
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: usize,
    pub input: Vec<BigInt>,
    pub output: Vec<BigInt>,
    /// `m′₁`
    pub first: BigInt,
    /// `M′ = Σ_{j>=2} m′_j`
    pub tail_sum: BigInt,
    /// Target `A` handed to this stage.
    pub target: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    pub trace: UnloadingTrace,
    pub checks: StageChecks,
}

impl StageRecord {
    /// Target for the next stage, `β_i A`.
    pub fn next_target(&self) -> Rational {
        &self.beta * &self.target
    }
}

fn tail_sum(m: &[BigInt]) -> BigInt {
    m[1..].iter().sum()
}

fn weighted(depth: usize, m: &[BigInt]) -> BigInt {
    BigInt::from(depth - 1) * &m[0] + tail_sum(m)
}

/// Audits `(depth−1) m₁ + M` along a trace.
fn conserved_along(structure: &ProximityStructure, depth: usize, trace: &UnloadingTrace) -> bool {
    let r = structure.points();
    let mut m = trace.initial.clone();
    let mut q = weighted(depth, &m);
    for step in &trace.steps {
        m[step.pivot - 1] += &step.amount;
        for &j in structure.proximate_to(step.pivot) {
            m[j - 1] -= &step.amount;
        }
        let next = weighted(depth, &m);
        let ok = if step.pivot == r {
            next >= q
        } else {
            next == q
        };
        if !ok {
            return false;
        }
        q = next;
    }
    true
}

/// Unloads `m` on the stage-`depth` chain and records every inequality the stage relies on.
///
/// The hypotheses are verified first; a failure is reported as an error.
pub fn check_descarrega(
    points: usize,
    depth: usize,
    m: &[BigInt],
    target: &Rational,
) -> Result<StageRecord, SpecializationError> {
    let structure = build_chain(ChainClusterSpec { points, depth })?;
    let r = points as u64;
    let i = depth as u64;
    let cluster = WeightedCluster::new(structure, m.to_vec())?;

    let m1 = int(m[0].clone());
    let big_m = int(tail_sum(m));
    let a_prev = alpha(r, i - 1);
    let k = int(i as i64 - 2);
    let lhs = (&k * &m1 + &big_m) / (&k * &a_prev + int(1));
    if lhs < *target {
        return Err(SpecializationError::Hypothesis {
            stage: depth,
            hypothesis: "((i−2) m₁ + M) / ((i−2) α_{i−1} + 1) >= A",
            lhs,
            rhs: target.clone(),
        });
    }
    let rhs = &a_prev * target;
    if m1 < rhs {
        return Err(SpecializationError::Hypothesis {
            stage: depth,
            hypothesis: "m₁ >= α_{i−1} A",
            lhs: m1,
            rhs,
        });
    }

    let (unloaded, trace) = unload(&cluster, PivotPolicy::default())?;
    let out = unloaded.multiplicities().to_vec();
    let a = alpha(r, i);
    let b = beta(r, i);
    let m1_out = int(out[0].clone());
    let big_m_out = int(tail_sum(&out));
    let k1 = int(i as i64 - 1);
    let checks = StageChecks {
        first: Inequality::new(
            (&k1 * &m1_out + &big_m_out) / (&k1 * &a + int(1)),
            &b * target,
        ),
        second: Inequality::new(m1_out.clone(), &a * &b * target),
        proximity_audit: Inequality::new(&m1_out - &a * &big_m_out, int(0)),
        conserved_quantity: conserved_along(cluster.structure(), depth, &trace),
        coefficient_identity: (&k * &a_prev + int(1)) + &a_prev == (&k1 * &a + int(1)) * &b,
        consistent_output: unloaded.is_consistent() && out.iter().all(|v| !v.is_negative()),
    };
    Ok(StageRecord {
        stage: depth,
        input: m.to_vec(),
        first: out[0].clone(),
        tail_sum: tail_sum(&out),
        output: out,
        target: target.clone(),
        alpha: a,
        beta: b,
        trace,
        checks,
    })
}

/// Outcome of the whole iteration for `r` points of multiplicity `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremSimulation {
    pub r: u64,
    pub m: u64,
    pub stages: Vec<StageRecord>,
    /// `m₁^{(r)}` after the last stage.
    pub final_first: BigInt,
    /// `m (r−1) α_r ∏_{i=3}^{r} β_i`
    pub certified_bound: Rational,
    /// Closed-form product, for comparison.
    pub theorem_bound: Rational,
}

impl TheoremSimulation {
    /// `m₁^{(r)} >= certified bound` and the certified bound equals the closed form.
    pub fn certified(&self) -> bool {
        int(self.final_first.clone()) >= self.certified_bound
            && self.certified_bound == self.theorem_bound
            && self.stages.iter().all(|s| s.checks.all_pass())
    }
}

/// `(r−1) α_r ∏_{i=3}^{r} β_i · m`, the value the iteration certifies.
pub fn certified_bound(r: u64, m: u64) -> Rational {
    if r <= 1 {
        return int(0);
    }
    let mut acc = int(m) * int(r as i64 - 1) * alpha(r, r);
    for i in 3..=r {
        acc *= beta(r, i);
    }
    acc
}

/// Runs stages `3..=r` from the uniform system `(m, ..., m)`, feeding each
/// consistent output into the next stage with target `A_{i} = β_i A_{i−1}`,
/// starting from `A_2 = m (r−1)`.
pub fn simulate_theorem(r: u64, m: u64) -> Result<TheoremSimulation, SpecializationError> {
    if r < 2 || m < 1 {
        return Err(SpecializationError::BadParameters { r, m });
    }
    let points = r as usize;
    let mut current = vec![BigInt::from(m); points];
    let mut target = int(m) * int(r as i64 - 1);
    let mut stages: Vec<StageRecord> = Vec::with_capacity(points.saturating_sub(2));
    for depth in 3..=points {
        let record = match check_descarrega(points, depth, &current, &target) {
            Ok(record) => record,
            Err(SpecializationError::Hypothesis { .. }) => {
                return Err(SpecializationError::StageFailed {
                    stage: depth,
                    records: stages,
                })
            }
            Err(e) => return Err(e),
        };
        let passed = record.checks.all_pass();
        target = record.next_target();
        current = record.output.clone();
        stages.push(record);
        if !passed {
            return Err(SpecializationError::StageFailed {
                stage: depth,
                records: stages,
            });
        }
    }
    Ok(TheoremSimulation {
        r,
        m,
        stages,
        final_first: current[0].clone(),
        certified_bound: certified_bound(r, m),
        theorem_bound: theorem_bound(r, m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pairs(s: &ProximityStructure) -> Vec<(usize, usize)> {
        s.pairs().collect()
    }

    #[test]
    fn chain_examples() {
        let s = build_chain(ChainClusterSpec {
            points: 4,
            depth: 3,
        })
        .unwrap();
        assert_eq!(pairs(&s), vec![(2, 1), (3, 1), (3, 2), (4, 3)]);
        let s = build_chain(ChainClusterSpec {
            points: 2,
            depth: 2,
        })
        .unwrap();
        assert_eq!(pairs(&s), vec![(2, 1)]);
        let s = build_chain(ChainClusterSpec {
            points: 4,
            depth: 4,
        })
        .unwrap();
        assert_eq!(pairs(&s), vec![(2, 1), (3, 1), (3, 2), (4, 1), (4, 3)]);
    }

    #[test]
    fn chain_rejects_bad_depth() {
        for (points, depth) in [(4, 1), (4, 5), (1, 2)] {
            assert_eq!(
                build_chain(ChainClusterSpec { points, depth }),
                Err(SpecializationError::DepthOutOfRange { points, depth })
            );
        }
    }

    #[test]
    fn chains_validate_up_to_fifty() {
        for r in 2..=50 {
            for i in 2..=r {
                let s = build_chain(ChainClusterSpec {
                    points: r,
                    depth: i,
                })
                .unwrap();
                assert!(s.validate().is_ok());
                for j in 2..=r {
                    let expected: Vec<usize> = if j >= 3 && j <= i {
                        vec![1, j - 1]
                    } else {
                        vec![j - 1]
                    };
                    assert_eq!(s.parents_of(j), expected.as_slice());
                }
            }
        }
    }

    #[test]
    fn alpha_beta_values() {
        assert_eq!(alpha(4, 3), rat(2, 3));
        assert_eq!(beta(4, 3), rat(5, 7));
        assert_eq!(beta(4, 4), rat(3, 4));
        assert_eq!(alpha(4, 4), int(1));
    }

    #[test]
    fn descarrega_stage_three() {
        let rec = check_descarrega(4, 3, &ints(&[2, 2, 2, 2]), &int(6)).unwrap();
        assert_eq!(rec.output, ints(&[3, 2, 1, 1]));
        assert_eq!(rec.checks.first.lhs, rat(30, 7));
        assert_eq!(rec.checks.first.rhs, rat(30, 7));
        assert_eq!(rec.checks.second.rhs, rat(20, 7));
        assert!(rec.checks.all_pass());
    }

    #[test]
    fn descarrega_stage_four() {
        let a = int(6) * rat(5, 7);
        let rec = check_descarrega(4, 4, &ints(&[3, 2, 1, 1]), &a).unwrap();
        assert_eq!(rec.output, ints(&[4, 1, 0, 0]));
        assert_eq!(rec.checks.second.rhs, rat(45, 14));
        assert!(rec.checks.all_pass());
    }

    #[test]
    fn descarrega_degenerate_chain() {
        for m in [1, 3, 10] {
            let rec = check_descarrega(2, 2, &ints(&[m, m]), &int(m)).unwrap();
            assert_eq!(rec.output, ints(&[m, m]));
            assert!(rec.checks.all_pass());
        }
    }

    #[test]
    fn descarrega_reports_failed_hypothesis() {
        let err = check_descarrega(4, 3, &ints(&[2, 2, 2, 2]), &int(7)).unwrap_err();
        assert!(matches!(
            err,
            SpecializationError::Hypothesis { stage: 3, .. }
        ));
        let err = check_descarrega(4, 3, &ints(&[0, 4, 4, 4]), &int(6)).unwrap_err();
        match err {
            SpecializationError::Hypothesis { hypothesis, .. } => {
                assert!(hypothesis.starts_with("m₁"))
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn simulate_examples() {
        let sim = simulate_theorem(4, 2).unwrap();
        let outs: Vec<_> = sim.stages.iter().map(|s| s.output.clone()).collect();
        assert_eq!(outs, vec![ints(&[3, 2, 1, 1]), ints(&[4, 1, 0, 0])]);
        assert_eq!(sim.final_first, 4.into());
        assert_eq!(sim.certified_bound, rat(45, 14));
        assert!(sim.certified());

        let sim = simulate_theorem(3, 1).unwrap();
        assert_eq!(sim.stages[0].output, ints(&[2, 0, 0]));
        assert_eq!(sim.certified_bound, rat(4, 3));
        assert!(sim.certified());

        let sim = simulate_theorem(2, 9).unwrap();
        assert!(sim.stages.is_empty());
        assert_eq!(sim.certified_bound, int(9));
        assert!(sim.certified());
    }

    #[test]
    fn simulate_rejects_bad_parameters() {
        assert_eq!(
            simulate_theorem(1, 1).unwrap_err(),
            SpecializationError::BadParameters { r: 1, m: 1 }
        );
        assert!(simulate_theorem(5, 0).is_err());
    }
}
