//! Monge-Ampère measures of convex functions with polytope asymptotics.
//!
//! A function here is convex on ℝⁿ (n ≤ 3) and grows like the support function
//! `h_P` of a convex polytope `P`. Its real Monge-Ampère measure in the sense of
//! Alexandrov puts mass `(n!/2ⁿ)·Vol(∂h(x))` at each kink `x`. The crate computes
//! these measures, solves `MA(h) = μ` and `MA(h) = e^{λh}μ` for discrete `μ`,
//! builds rooftop and singularity envelopes, relative extremal functions and
//! capacities, and verifies mixed-volume inequalities.

pub mod capacity;
pub mod cli;
pub mod convexfun;
pub mod error;
pub mod geometry;
pub mod ma_measure;
pub mod mixedvol;
pub mod solver;

pub use capacity::{capacity, extremal_function, CapacityReport, CompactRegion};
pub use convexfun::{Obstacle, PLConvexFunction};
pub use error::{Error, Result};
pub use geometry::ConvexBody;
pub use ma_measure::{ma, MAResult};
pub use mixedvol::{mixed_volume, VolumePolynomial};
pub use solver::{solve_aubin_yau, solve_ma, DiscreteMeasure, SolveOptions, SolveReport};

/// `n!/2ⁿ`, the mass normalization of the real Monge-Ampère operator.
pub fn mass_factor(dim: usize) -> f64 {
    let fact: f64 = (1..=dim).map(|k| k as f64).product();
    fact / 2f64.powi(dim as i32)
}
