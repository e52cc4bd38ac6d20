//! Weighted clusters of infinitely near points, the unloading procedure, the
//! stage-by-stage specialization behind the degree bound for plane curves
//! with `r` points of multiplicity `m`, and rigorous checks of that bound.

pub mod bounds;
pub mod cluster;
pub mod numerics;
pub mod producte;
pub mod specialization;
pub mod unloading;
