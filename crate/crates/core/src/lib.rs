//! Exact verification toolkit for singular cubic threefolds in P^4.
//!
//! Covers number-field arithmetic, ADE classification of isolated
//! singularities, projective automorphism groups, group cohomology of class
//! group lattices, Dynkin-diagram degenerations, and the defect computed by
//! projecting from a singular point.

pub mod autgroups;
pub mod degeneration;
pub mod glattice;
pub mod linalg;
pub mod multipoly;
pub mod numfield;
pub mod projection;
pub mod scenarios;
pub mod singularities;
