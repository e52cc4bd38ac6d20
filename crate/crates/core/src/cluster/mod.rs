//! Ordered clusters, proximity structures, multiplicities and excesses.
//!
//! Points are numbered `1..=r` everywhere in the public API. A pair `(j, i)`
//! means "p_j is proximate to p_i" and always has `j > i`.

mod format;

pub use format::{parse_cluster, print_cluster};

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// One broken realizability rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    /// A cluster needs at least one point.
    NoPoints,
    /// `(j, i)` with `j <= i`.
    NotLater { j: usize, i: usize },
    /// `(j, i)` naming a point outside `1..=r`.
    OutOfRange { j: usize, i: usize },
    /// `point` is proximate to `count >= 3` earlier points.
    TooManyProximities { point: usize, count: usize },
    /// `point` is proximate to `first < second` but `second` is not proximate to `first`.
    SatelliteClosure {
        point: usize,
        first: usize,
        second: usize,
    },
    /// Two points lie on both strict transforms of `first` and `second`.
    SharedSatellite {
        first: usize,
        second: usize,
        points: (usize, usize),
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPoints => write!(f, "a cluster needs at least one point"),
            Violation::NotLater { j, i } => {
                write!(
                    f,
                    "pair ({j}, {i}): a point can only be proximate to an earlier point"
                )
            }
            Violation::OutOfRange { j, i } => {
                write!(f, "pair ({j}, {i}) names a point out of range")
            }
            Violation::TooManyProximities { point, count } => write!(
                f,
                "point {point} is proximate to {count} points (at most 2 allowed)"
            ),
            Violation::SatelliteClosure {
                point,
                first,
                second,
            } => write!(
                f,
                "satellite rule: point {point} is proximate to {first} and {second}, \
                 so ({second}, {first}) must be present"
            ),
            Violation::SharedSatellite {
                first,
                second,
                points: (a, b),
            } => write!(
                f,
                "points {a} and {b} are both proximate to {first} and {second} \
                 (at most one point can be)"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid proximity structure: {}", .violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("expected {expected} multiplicities, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cluster is not consistent: excess at point {point} is {excess}")]
    Inconsistent { point: usize, excess: BigInt },
    #[error("point {point} has negative multiplicity {value}")]
    NegativeMultiplicity { point: usize, value: BigInt },
    #[error("{}", format_parse_error(*.line, .field.as_deref(), .message))]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
}

fn format_parse_error(line: Option<usize>, field: Option<&str>, message: &str) -> String {
    match (line, field) {
        (Some(l), Some(fld)) => format!("line {l}, field `{fld}`: {message}"),
        (Some(l), None) => format!("line {l}: {message}"),
        (None, Some(fld)) => format!("field `{fld}`: {message}"),
        (None, None) => message.to_string(),
    }
}

/// Ordered cluster of `r` points, described by its proximity pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProximityStructure {
    points: usize,
    pairs: BTreeSet<(usize, usize)>,
    // proximate[i - 1]: the points proximate to p_i, ascending
    proximate: Vec<Vec<usize>>,
    // parents[j - 1]: the points p_j is proximate to, ascending
    parents: Vec<Vec<usize>>,
}

impl ProximityStructure {
    /// Stores the pairs as given, without checking them. See [`Self::validate`].
    pub fn from_pairs(points: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let pairs: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        let mut proximate = vec![Vec::new(); points];
        let mut parents = vec![Vec::new(); points];
        for &(j, i) in &pairs {
            if 1 <= i && i < j && j <= points {
                proximate[i - 1].push(j);
                parents[j - 1].push(i);
            }
        }
        ProximityStructure {
            points,
            pairs,
            proximate,
            parents,
        }
    }

    /// Builds and validates in one go.
    pub fn new(
        points: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ValidationError> {
        let s = Self::from_pairs(points, pairs);
        s.validate()?;
        Ok(s)
    }

    /// Cluster with no proximities: `points` unrelated points.
    pub fn free(points: usize) -> Self {
        Self::from_pairs(points, [])
    }

    /// Checks every realizability rule, reporting all violations found.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut violations = Vec::new();
        if self.points == 0 {
            violations.push(Violation::NoPoints);
        }
        for &(j, i) in &self.pairs {
            if j <= i {
                violations.push(Violation::NotLater { j, i });
            } else if i == 0 || j > self.points {
                violations.push(Violation::OutOfRange { j, i });
            }
        }
        for (idx, parents) in self.parents.iter().enumerate() {
            let point = idx + 1;
            if parents.len() > 2 {
                violations.push(Violation::TooManyProximities {
                    point,
                    count: parents.len(),
                });
            }
            for (a, &first) in parents.iter().enumerate() {
                for &second in &parents[a + 1..] {
                    if !self.pairs.contains(&(second, first)) {
                        violations.push(Violation::SatelliteClosure {
                            point,
                            first,
                            second,
                        });
                    }
                }
            }
        }
        // A satellite point separates the two strict transforms it lies on.
        let mut seen = std::collections::BTreeMap::new();
        for (idx, parents) in self.parents.iter().enumerate() {
            if let [first, second] = parents[..] {
                if let Some(&earlier) = seen.get(&(first, second)) {
                    violations.push(Violation::SharedSatellite {
                        first,
                        second,
                        points: (earlier, idx + 1),
                    });
                } else {
                    seen.insert((first, second), idx + 1);
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationError { violations })
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, j: usize, i: usize) -> bool {
        self.pairs.contains(&(j, i))
    }

    /// Points proximate to `p_i`.
    pub fn proximate_to(&self, i: usize) -> &[usize] {
        &self.proximate[i - 1]
    }

    /// Points that `p_j` is proximate to.
    pub fn parents_of(&self, j: usize) -> &[usize] {
        &self.parents[j - 1]
    }

    /// `#{j : p_j proximate to p_i}`; the self-intersection of the strict
    /// transform of the i-th exceptional divisor is `-1 - t_i`.
    pub fn proximate_count(&self, i: usize) -> usize {
        self.proximate[i - 1].len()
    }

    /// Dense proximity matrix: `m[j-1][i-1] == 1` iff p_j is proximate to p_i.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.points]; self.points];
        for (j, i) in self.pairs() {
            if 1 <= i && i < j && j <= self.points {
                m[j - 1][i - 1] = 1;
            }
        }
        m
    }
}

/// Cluster plus a (virtual) multiplicity at every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCluster {
    structure: ProximityStructure,
    multiplicities: Vec<BigInt>,
}

impl WeightedCluster {
    pub fn new(
        structure: ProximityStructure,
        multiplicities: Vec<BigInt>,
    ) -> Result<Self, ClusterError> {
        structure.validate()?;
        if multiplicities.len() != structure.points() {
            return Err(ClusterError::LengthMismatch {
                expected: structure.points(),
                found: multiplicities.len(),
            });
        }
        Ok(WeightedCluster {
            structure,
            multiplicities,
        })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(structure: ProximityStructure, m: &[i64]) -> Result<Self, ClusterError> {
        Self::new(structure, m.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub(crate) fn with_multiplicities(&self, multiplicities: Vec<BigInt>) -> Self {
        debug_assert_eq!(multiplicities.len(), self.structure.points());
        WeightedCluster {
            structure: self.structure.clone(),
            multiplicities,
        }
    }

    pub fn structure(&self) -> &ProximityStructure {
        &self.structure
    }

    pub fn multiplicities(&self) -> &[BigInt] {
        &self.multiplicities
    }

    pub fn into_multiplicities(self) -> Vec<BigInt> {
        self.multiplicities
    }

    /// Multiplicity of `p_i`.
    pub fn multiplicity(&self, i: usize) -> &BigInt {
        &self.multiplicities[i - 1]
    }

    pub fn excesses(&self) -> ExcessVector {
        excesses_of(&self.structure, &self.multiplicities)
    }

    pub fn is_consistent(&self) -> bool {
        self.excesses().is_nonnegative()
    }

    /// Length `Σ m_i (m_i + 1) / 2` of the cluster scheme of a consistent
    /// cluster with non-negative multiplicities.
    pub fn scheme_degree(&self) -> Result<BigInt, ClusterError> {
        for (idx, m) in self.multiplicities.iter().enumerate() {
            if m.is_negative() {
                return Err(ClusterError::NegativeMultiplicity {
                    point: idx + 1,
                    value: m.clone(),
                });
            }
        }
        let rho = self.excesses();
        if let Some(point) = rho.first_negative() {
            return Err(ClusterError::Inconsistent {
                point,
                excess: rho[point].clone(),
            });
        }
        Ok(self
            .multiplicities
            .iter()
            .map(|m| m * (m + 1u32) / 2u32)
            .sum())
    }
}

/// `rho_i = m_i − Σ_{p_j proximate to p_i} m_j`, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcessVector(Vec<BigInt>);

impl ExcessVector {
    pub fn as_slice(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|v| !v.is_negative())
    }

    /// Lowest point index with a negative excess.
    pub fn first_negative(&self) -> Option<usize> {
        self.0.iter().position(|v| v.is_negative()).map(|k| k + 1)
    }
}

impl Index<usize> for ExcessVector {
    type Output = BigInt;

    fn index(&self, i: usize) -> &BigInt {
        &self.0[i - 1]
    }
}

/// Excesses of an arbitrary multiplicity vector on a structure.
pub fn excesses_of(structure: &ProximityStructure, m: &[BigInt]) -> ExcessVector {
    let rho = (1..=structure.points())
        .map(|i| {
            structure
                .proximate_to(i)
                .iter()
                .fold(m[i - 1].clone(), |acc, &j| acc - &m[j - 1])
        })
        .collect();
    ExcessVector(rho)
}

pub(crate) fn max_abs(m: &[BigInt]) -> BigInt {
    m.iter().map(|v| v.abs()).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn cluster(r: usize, pairs: &[(usize, usize)], m: &[i64]) -> WeightedCluster {
        WeightedCluster::from_i64(
            ProximityStructure::new(r, pairs.iter().copied()).unwrap(),
            m,
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(ProximityStructure::from_pairs(3, [(2, 1), (3, 2), (3, 1)])
            .validate()
            .is_ok());

        let err = ProximityStructure::from_pairs(3, [(3, 1), (3, 2)])
            .validate()
            .unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::SatelliteClosure {
                point: 3,
                first: 1,
                second: 2
            }]
        );

        let err = ProximityStructure::from_pairs(2, [(1, 2)])
            .validate()
            .unwrap_err();
        assert_eq!(err.violations, vec![Violation::NotLater { j: 1, i: 2 }]);
        assert!(err.to_string().contains("(1, 2)"));
    }

    #[test]
    fn validate_rejects_three_parents_and_ranges() {
        let err =
            ProximityStructure::from_pairs(4, [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)])
                .validate()
                .unwrap_err();
        assert!(err
            .violations
            .contains(&Violation::TooManyProximities { point: 4, count: 3 }));

        let err = ProximityStructure::from_pairs(2, [(3, 1)])
            .validate()
            .unwrap_err();
        assert_eq!(err.violations, vec![Violation::OutOfRange { j: 3, i: 1 }]);
        let err = ProximityStructure::from_pairs(2, [(2, 0)])
            .validate()
            .unwrap_err();
        assert_eq!(err.violations, vec![Violation::OutOfRange { j: 2, i: 0 }]);
        let err = ProximityStructure::free(0).validate().unwrap_err();
        assert_eq!(err.violations, vec![Violation::NoPoints]);
    }

    #[test]
    fn validate_rejects_shared_satellites() {
        let err = ProximityStructure::from_pairs(4, [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2)])
            .validate()
            .unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::SharedSatellite {
                first: 1,
                second: 2,
                points: (3, 4)
            }]
        );
    }

    #[test]
    fn several_proper_points_are_allowed() {
        let s = ProximityStructure::new(4, [(2, 1), (4, 3)]).unwrap();
        assert_eq!(s.proximate_to(1), &[2]);
        assert_eq!(s.proximate_to(3), &[4]);
        assert!(s.parents_of(3).is_empty());
    }

    #[test]
    fn excess_examples() {
        assert_eq!(
            cluster(2, &[(2, 1)], &[0, 1]).excesses().into_vec(),
            ints(&[-1, 1])
        );
        assert_eq!(
            cluster(2, &[], &[5, 7]).excesses().into_vec(),
            ints(&[5, 7])
        );
        assert_eq!(
            cluster(4, &[(2, 1), (3, 2), (3, 1), (4, 3)], &[2, 2, 2, 2])
                .excesses()
                .into_vec(),
            ints(&[-2, 0, 0, 2])
        );
    }

    #[test]
    fn consistency_examples() {
        assert!(cluster(2, &[(2, 1)], &[1, 0]).is_consistent());
        assert!(!cluster(2, &[(2, 1)], &[0, 1]).is_consistent());
        assert!(cluster(3, &[], &[0, 0, 0]).is_consistent());
    }

    #[test]
    fn scheme_degree_examples() {
        assert_eq!(
            cluster(2, &[(2, 1)], &[1, 0]).scheme_degree().unwrap(),
            1.into()
        );
        assert_eq!(
            cluster(3, &[(2, 1), (3, 2)], &[2, 0, 0])
                .scheme_degree()
                .unwrap(),
            3.into()
        );
        assert_eq!(
            cluster(4, &[(2, 1), (3, 2), (3, 1), (4, 3)], &[3, 2, 1, 1])
                .scheme_degree()
                .unwrap(),
            11.into()
        );
        assert!(matches!(
            cluster(2, &[(2, 1)], &[0, 1]).scheme_degree(),
            Err(ClusterError::Inconsistent { point: 1, .. })
        ));
        assert!(matches!(
            cluster(2, &[], &[1, -1]).scheme_degree(),
            Err(ClusterError::NegativeMultiplicity { point: 2, .. })
        ));
    }

    #[test]
    fn length_mismatch_rejected() {
        let s = ProximityStructure::new(2, [(2, 1)]).unwrap();
        assert_eq!(
            WeightedCluster::from_i64(s, &[1]),
            Err(ClusterError::LengthMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn matrix_matches_pairs() {
        let s = ProximityStructure::new(3, [(2, 1), (3, 2), (3, 1)]).unwrap();
        assert_eq!(
            s.matrix(),
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![1, 1, 0]]
        );
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn chain(r: usize) -> ProximityStructure {
            ProximityStructure::new(r, (2..=r).map(|j| (j, j - 1))).unwrap()
        }

        proptest! {
            #[test]
            fn excesses_are_linear(
                a in prop::collection::vec(-50i64..50, 6),
                b in prop::collection::vec(-50i64..50, 6),
            ) {
                let s = ProximityStructure::new(6, [(2, 1), (3, 2), (3, 1), (4, 3), (5, 4), (6, 1)]).unwrap();
                let sum: Vec<BigInt> = a.iter().zip(&b).map(|(x, y)| BigInt::from(x + y)).collect();
                let lhs = excesses_of(&s, &sum).into_vec();
                let ea = excesses_of(&s, &ints(&a)).into_vec();
                let eb = excesses_of(&s, &ints(&b)).into_vec();
                let rhs: Vec<BigInt> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn chain_excesses_are_differences(m in prop::collection::vec(-30i64..30, 1..12)) {
                let r = m.len();
                let rho = excesses_of(&chain(r), &ints(&m));
                for i in 1..r {
                    prop_assert_eq!(&rho[i], &BigInt::from(m[i - 1] - m[i]));
                }
                prop_assert_eq!(&rho[r], &BigInt::from(m[r - 1]));
            }

            #[test]
            fn no_proximities_means_excess_equals_multiplicity(m in prop::collection::vec(-30i64..30, 1..10)) {
                let rho = excesses_of(&ProximityStructure::free(m.len()), &ints(&m));
                prop_assert_eq!(rho.into_vec(), ints(&m));
            }
        }
    }
}
