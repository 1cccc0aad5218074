//! Numerical laboratory for the hot-spots property of mixed
//! Dirichlet–Neumann problems on planar convex domains.
//!
//! * [`geometry`]: mixed domains whose boundary splits into a reflecting
//!   curve γ₁ and a killing curve γ₂, circle inversion, symmetrization and
//!   sampled predicates.
//! * [`conformal`]: power-series maps of the unit disk built by Theodorsen
//!   iteration, Schwarz reflection and the potential `V = |f'|²`.
//! * [`stochastic`]: reflected Brownian motion in the unit ball with
//!   killing, the scaling coupling and Monte Carlo estimators.
//! * [`spectral`]: P1 finite elements for the mixed ground state and
//!   hot-spot checks, with closed-form Bessel references from [`special`].
//! * [`experiments`]: JSON-configured scenarios producing CSV/JSON records.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod conformal;
pub mod experiments;
pub mod geometry;
pub mod special;
pub mod spectral;
pub mod stochastic;

mod error;

pub use error::Error;
pub use geometry::Point;
