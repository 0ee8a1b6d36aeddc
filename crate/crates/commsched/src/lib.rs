//! Scheduling precedence-constrained jobs on identical machines under
//! communication delays.
//!
//! The library is organized around one pipeline: build a linear relaxation of
//! the interval-scheduling problem ([`relax`]), extract a semimetric from its
//! pairwise variables, cluster that semimetric with a random low-diameter
//! decomposition ([`ckr`]), and round batches of jobs with close fractional
//! completion times into feasible schedules ([`rounding`], [`reduce`],
//! [`wct`]). Everything is backed by a self-contained simplex solver
//! ([`lpsolve`]) and brute-force ground-truth solvers ([`oracle`]) sized for
//! desk-scale verification.
//!
//! All public types are immutable values after construction and safe to share
//! across threads. Randomized procedures take explicit `u64` seeds and are
//! deterministic per seed.

pub mod ckr;
pub mod graham;
pub mod instance;
pub mod lpsolve;
pub mod oracle;
pub mod reduce;
pub mod relax;
pub mod rng;
pub mod rounding;
pub mod sa_lift;
pub mod wct;
