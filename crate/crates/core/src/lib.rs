//! Exact and stochastic solvers for the one-dimensional particle-annihilation model.
//!
//! Two groups of unit-mass particles approach each other on a line: group A
//! moves right with speeds `a_1..a_m`, group B moves left with speeds
//! `b_1..b_n`. When an A particle of speed `a` meets a B particle of speed
//! `b`, exactly one is annihilated and A survives with probability
//! `a / (a + b)`. The process runs until one side is empty.
//!
//! The crate computes `P(A wins)` several independent ways:
//!
//! - [`recursive`]: exact memoized recurrence, the reference oracle.
//! - [`residue`]: residue sums of the rational function
//!   `Φ(w) = 1/w · ∏(1 − a_i w)^-1 · ∏(1 + b_j w)^-1` over its a-poles, with
//!   higher-order poles handled by [`series`] arithmetic, closed forms for
//!   uniform speeds, and an ε-perturbation approximation.
//! - [`montecarlo`]: seeded simulation of the collision process.
//! - [`hypervolume`]: Monte Carlo volume of the unit-hypercube region
//!   `∏ x_i^{a_i} < ∏ y_j^{b_j}`.
//!
//! [`relations`] builds matching/beating analysis on top of the exact solver,
//! and [`crosscheck`] runs all methods against each other.

pub mod crosscheck;
pub mod error;
pub mod hypervolume;
pub mod instance;
pub mod montecarlo;
pub mod rational;
pub mod recursive;
pub mod relations;
pub mod residue;
pub mod series;

pub use error::{Error, Result};
pub use instance::{group, parse_instance, CanonicalKey, GroupedInstance, Instance, SpeedGroup};
pub use rational::{format_decimal, parse_rational, Probability, Rational};
