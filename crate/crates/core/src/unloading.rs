//! Unloading: turns any weighted cluster into the equivalent consistent one.
//!
//! A step on a point `p_i` with negative excess `rho_i` adds `n` to `m_i` and
//! subtracts `n` from every point proximate to `p_i`, where `n` is the least
//! integer with `rho_i + n (1 + t_i) >= 0` and `t_i` counts the points
//! proximate to `p_i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::cluster::{excesses_of, max_abs, ProximityStructure, WeightedCluster};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnloadError {
    #[error("point {pivot} does not violate its proximity inequality (excess {excess})")]
    NotViolated { pivot: usize, excess: BigInt },
    #[error("point {pivot} is out of range for a cluster of {points} points")]
    PivotOutOfRange { pivot: usize, points: usize },
    #[error("unloading exceeded its safety cap of {cap} steps")]
    StepCapExceeded { cap: BigInt },
    #[error("clusters have different proximity structures")]
    StructureMismatch,
}

/// Which violated point to unload on next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PivotPolicy {
    #[default]
    LowestIndex,
    HighestIndex,
    /// Most negative excess, lowest index on ties.
    MostNegative,
}

impl PivotPolicy {
    pub const ALL: [PivotPolicy; 3] = [
        PivotPolicy::LowestIndex,
        PivotPolicy::HighestIndex,
        PivotPolicy::MostNegative,
    ];

    fn choose(self, rho: &[BigInt]) -> Option<usize> {
        let mut violated = rho
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_negative())
            .map(|(k, v)| (k + 1, v));
        match self {
            PivotPolicy::LowestIndex => violated.next().map(|(i, _)| i),
            PivotPolicy::HighestIndex => violated.last().map(|(i, _)| i),
            PivotPolicy::MostNegative => violated
                .fold(None::<(usize, &BigInt)>, |best, (i, v)| match best {
                    Some((_, b)) if b <= v => best,
                    _ => Some((i, v)),
                })
                .map(|(i, _)| i),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnloadingStep {
    pub pivot: usize,
    pub amount: BigInt,
    pub excess_before: BigInt,
    pub excess_after: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnloadingTrace {
    pub initial: Vec<BigInt>,
    pub steps: Vec<UnloadingStep>,
    pub unloaded: Vec<BigInt>,
}

impl UnloadingTrace {
    /// Re-applies the recorded steps to `initial` on the given structure.
    pub fn replay(&self, structure: &ProximityStructure) -> Vec<BigInt> {
        let mut m = self.initial.clone();
        for step in &self.steps {
            apply(structure, &mut m, step.pivot, &step.amount);
        }
        m
    }
}

/// Step size `⌈−rho / (1 + t)⌉` for a negative excess `rho`.
pub fn step_amount(excess: &BigInt, proximate_count: usize) -> BigInt {
    (-excess).div_ceil(&BigInt::from(proximate_count + 1))
}

fn apply(structure: &ProximityStructure, m: &mut [BigInt], pivot: usize, amount: &BigInt) {
    m[pivot - 1] += amount;
    for &j in structure.proximate_to(pivot) {
        m[j - 1] -= amount;
    }
}

/// Shifts multiplicity `delta` onto point `x` and updates the excesses in place.
fn shift(
    structure: &ProximityStructure,
    m: &mut [BigInt],
    rho: &mut [BigInt],
    x: usize,
    delta: &BigInt,
) {
    m[x - 1] += delta;
    rho[x - 1] += delta;
    for &k in structure.parents_of(x) {
        rho[k - 1] -= delta;
    }
}

fn step_in_place(
    structure: &ProximityStructure,
    m: &mut [BigInt],
    rho: &mut [BigInt],
    pivot: usize,
) -> UnloadingStep {
    let excess_before = rho[pivot - 1].clone();
    let amount = step_amount(&excess_before, structure.proximate_count(pivot));
    shift(structure, m, rho, pivot, &amount);
    let minus = -&amount;
    for &j in structure.proximate_to(pivot) {
        shift(structure, m, rho, j, &minus);
    }
    UnloadingStep {
        pivot,
        amount,
        excess_after: rho[pivot - 1].clone(),
        excess_before,
    }
}

/// One unloading step on `pivot`, which must have negative excess.
pub fn unload_step(
    cluster: &WeightedCluster,
    pivot: usize,
) -> Result<(WeightedCluster, UnloadingStep), UnloadError> {
    let structure = cluster.structure();
    if pivot == 0 || pivot > structure.points() {
        return Err(UnloadError::PivotOutOfRange {
            pivot,
            points: structure.points(),
        });
    }
    let mut m = cluster.multiplicities().to_vec();
    let mut rho = cluster.excesses().into_vec();
    if !rho[pivot - 1].is_negative() {
        return Err(UnloadError::NotViolated {
            pivot,
            excess: rho[pivot - 1].clone(),
        });
    }
    let step = step_in_place(structure, &mut m, &mut rho, pivot);
    Ok((cluster.with_multiplicities(m), step))
}

/// Safety cap `10 · r · (1 + max |m_i|)` on the number of steps.
pub fn step_cap(cluster: &WeightedCluster) -> BigInt {
    let r = cluster.structure().points();
    BigInt::from(10 * r) * (max_abs(cluster.multiplicities()) + 1u32)
}

/// Unloads until every proximity inequality holds.
pub fn unload(
    cluster: &WeightedCluster,
    policy: PivotPolicy,
) -> Result<(WeightedCluster, UnloadingTrace), UnloadError> {
    let structure = cluster.structure();
    let cap = step_cap(cluster);
    let mut m = cluster.multiplicities().to_vec();
    let mut rho = excesses_of(structure, &m).into_vec();
    let mut steps = Vec::new();
    let mut count = BigInt::zero();
    while let Some(pivot) = policy.choose(&rho) {
        if count >= cap {
            return Err(UnloadError::StepCapExceeded { cap });
        }
        steps.push(step_in_place(structure, &mut m, &mut rho, pivot));
        count += 1u32;
    }
    let trace = UnloadingTrace {
        initial: cluster.multiplicities().to_vec(),
        steps,
        unloaded: m.clone(),
    };
    Ok((cluster.with_multiplicities(m), trace))
}

/// Two systems on the same structure are equivalent iff they unload to the same vector.
pub fn equivalent(a: &WeightedCluster, b: &WeightedCluster) -> Result<bool, UnloadError> {
    if a.structure() != b.structure() {
        return Err(UnloadError::StructureMismatch);
    }
    let (ua, _) = unload(a, PivotPolicy::default())?;
    let (ub, _) = unload(b, PivotPolicy::default())?;
    Ok(ua.multiplicities() == ub.multiplicities())
}
