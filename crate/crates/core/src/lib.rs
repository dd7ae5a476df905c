//! Constructive preference maximization over compact convex bodies.
//!
//! The crate computes the unique maximal bundle of a strictly convex
//! preference relation on a compact convex subset of R^n by interval
//! shrinking (1-D) and dimension induction (n-D), derives demand
//! functions and quantitative continuity moduli from rotundity data,
//! checks approximate competitive equilibria, and carries the
//! finite-depth bar/predicate machinery used to probe where uniformity
//! claims stop being effective.
//!
//! Modules map one-to-one onto the subsystems:
//! - [`geometry`]: points, intervals, convex bodies (box/ball cut by a
//!   half-space), eps-nets, Hausdorff distance.
//! - [`preference`]: strict-comparison oracles, rotundity moduli.
//! - [`maximizer`]: quarter-point bracketing and the induced-preference
//!   recursion.
//! - [`demand`]: budget sets, the demand map, Gamma-continuity harnesses.
//! - [`equilibrium`]: approximate-equilibrium checker and price-grid search.
//! - [`foundations`]: the parametric instability family, Cantor encoding,
//!   bar search, continuous predicates.
//! - [`registry`]: named utility constructors for CLI and file formats.

pub mod demand;
pub mod equilibrium;
pub mod foundations;
pub mod geometry;
pub mod maximizer;
pub mod preference;
pub mod registry;
pub mod rng;

pub use geometry::{ConvexBody, EpsNet, GeometryError, Interval, Point};
pub use maximizer::{MaximizeError, MaximizeResult};
pub use preference::Preference;

/// Geometric tolerance for membership and slice-boundary tests.
///
/// Double precision leaves ample headroom over the arithmetic error
/// accumulated by projections and slicing at desk scale.
pub const GEOM_TOL: f64 = 1e-9;
