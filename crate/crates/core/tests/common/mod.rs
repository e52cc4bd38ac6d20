//! Random clusters that are realizable by construction.
//!
//! Each new point either starts a fresh root or is placed on a chosen earlier
//! point `p`. In the latter case it may also lie on the strict transform of
//! an exceptional divisor that passes through `p`, which makes it a satellite
//! proximate to one of `p`'s own parents, provided no earlier point already
//! sits at that intersection.

#![allow(dead_code)]

use std::collections::BTreeSet;

use cluster_bounds::cluster::{ProximityStructure, WeightedCluster};
use rand::Rng;

pub fn random_structure<R: Rng>(rng: &mut R, points: usize) -> ProximityStructure {
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); points + 1];
    for j in 2..=points {
        if rng.gen_bool(0.15) {
            continue;
        }
        let p = rng.gen_range(1..j);
        pairs.insert((j, p));
        parents[j].push(p);
        let free: Vec<usize> = parents[p]
            .iter()
            .copied()
            .filter(|&k| !(p + 1..j).any(|q| pairs.contains(&(q, p)) && pairs.contains(&(q, k))))
            .collect();
        if !free.is_empty() && rng.gen_bool(0.5) {
            let k = free[rng.gen_range(0..free.len())];
            pairs.insert((j, k));
            parents[j].push(k);
        }
    }
    ProximityStructure::new(points, pairs).expect("generator only builds realizable clusters")
}

pub fn random_cluster<R: Rng>(rng: &mut R, max_points: usize, bound: i64) -> WeightedCluster {
    let points = rng.gen_range(1..=max_points);
    let structure = random_structure(rng, points);
    let m: Vec<i64> = (0..points).map(|_| rng.gen_range(-bound..=bound)).collect();
    WeightedCluster::from_i64(structure, &m).expect("lengths agree")
}
