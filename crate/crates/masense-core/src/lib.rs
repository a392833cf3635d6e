//! Movable-antenna (MA) sensing: trajectory design and AoA estimation.
//!
//! A single receive antenna is mechanically swept through a bounded region
//! while taking N snapshots; the positions visited act as a virtual array
//! whose aperture grows with sensing time. This crate provides the pieces of
//! that pipeline as pure, deterministic functions:
//!
//! * [`model`] — sensing configuration, trajectory types with kinematic
//!   validation, steering vectors and received-signal synthesis;
//! * [`stats`] — position variance/covariance and the centering quadratic
//!   form they equal;
//! * [`crb`] — closed-form Cramér-Rao bounds for MA trajectories and for
//!   fixed ULA/UPA baselines, plus regime classification;
//! * [`traj1d`] — globally optimal 1D trajectories (max-speed ramp when time
//!   is the binding constraint, dwell-ramp-dwell when the segment is), mirror
//!   solutions, benchmark trajectories and an exact DP search oracle;
//! * [`socp`] — an embedded primal-dual interior-point solver for
//!   second-order cone programs, used by the 2D designer;
//! * [`traj2d`] — min-max CRB 2D trajectory design by alternating successive
//!   convex approximation over the x- and y-coordinates, plus circle/UPA
//!   benchmarks;
//! * [`estimator`] — grid-refined maximum-likelihood AoA estimation and a
//!   reproducible Monte-Carlo MSE harness;
//! * [`analysis`] — steering-correlation patterns, scaling-law slope fits and
//!   MA-vs-fixed-array crossover times.
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature (on by
//! default) only toggles dependency features.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod crb;
pub mod estimator;
pub mod model;
pub mod socp;
pub mod stats;
pub mod traj1d;
pub mod traj2d;

use core::fmt;

/// Errors shared by every module. Degenerate but well-defined situations
/// (zero variance, flat objectives) are encoded in results instead.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration value violates its documented range.
    InvalidParameter(&'static str),
    /// Sequence lengths disagree with each other or with the configuration.
    DimensionMismatch(&'static str),
    /// An operation for one kinematic regime was called in the other.
    RegimeMismatch(&'static str),
    /// The region cannot contain the requested trajectory.
    RegionTooSmall(&'static str),
    /// A prescribed motion would exceed the speed bound.
    SpeedInfeasible(&'static str),
    /// An exhaustive search would exceed its configured state budget.
    SearchBudgetExceeded { states: usize, budget: usize },
    /// The embedded conic solver failed to reach the requested accuracy.
    SolverFailure(&'static str),
    /// The input is degenerate for the requested operation.
    Degenerate(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Error::RegimeMismatch(what) => write!(f, "regime mismatch: {what}"),
            Error::RegionTooSmall(what) => write!(f, "region too small: {what}"),
            Error::SpeedInfeasible(what) => write!(f, "speed infeasible: {what}"),
            Error::SearchBudgetExceeded { states, budget } => {
                write!(f, "search budget exceeded: {states} states > budget {budget}")
            }
            Error::SolverFailure(what) => write!(f, "solver failure: {what}"),
            Error::Degenerate(what) => write!(f, "degenerate input: {what}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
