//! Polynomial reconstruction of bivariate functions from triangle averages.
//!
//! Given the means `μ_i(f) = |t_i|⁻¹ ∫_{t_i} f` of a function over the triangles
//! of a mesh of `[-1,1]²`, this crate selects `M = dim P_m` triangles (Padua,
//! approximate Fekete or discrete Leja), solves the square histopolation
//! problem on them, and optionally adds a least-squares fit of the remaining
//! averages in a larger space `P_d` (histopolation-regression).
//!
//! The modules build on each other roughly in this order:
//!
//! - [`geometry`]: points, triangles, barycentric coordinates, point location.
//! - [`mesh`]: Friedrichs–Keller and randomized-axis triangulations, JSON I/O.
//! - [`basis`]: graded total-degree Chebyshev-product and monomial bases.
//! - [`quadrature`]: collapsed Gauss–Legendre triangle rules and moment matrices.
//! - [`linalg`]: dense matrices, pivoted LU and QR, linear solves.
//! - [`selection`]: the three triangle extraction procedures.
//! - [`solver`]: histopolation, the constrained least-squares solve, the pipeline.
//! - [`analysis`]: Lebesgue constants and the operator-norm bound `ζ_d + η_d`.
//! - [`bench`]: test functions, error measurement and convergence sweeps.

pub mod analysis;
pub mod basis;
pub mod bench;
mod error;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod selection;
pub mod solver;

pub use error::{Error, Result};
