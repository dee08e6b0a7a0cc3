//! Numerics for critical continuous-state branching (CB) processes.
//!
//! The crate evaluates, for a branching mechanism ψ in the family
//! ψ(λ) = λ^{1+α} L(1/λ) (α ∈ [0,1], L slowly varying at ∞):
//!
//! * the cumulant flow u_t(λ) = φ(t + ϕ(λ)) together with the integral
//!   ϕ(z) = ∫_z^∞ dξ/ψ(ξ) and its inverse φ ([`flow`]);
//! * survival probabilities P_x(τ > t) = 1 − e^{−x φ(t)} and their
//!   log-space counterparts for extreme horizons;
//! * finite-t conditional laws given survival, their Yaglom-type limit
//!   laws of generalized positive Linnik type, and the slowly-varying
//!   (α = 0) normalization scheme ([`limits`]);
//! * numerical Laplace-transform inversion for CDF recovery ([`invert`]);
//! * regular-variation index diagnostics ([`regvar`]);
//! * Monte Carlo cross-checks: exact Feller sampling and an Euler scheme
//!   for stable mechanisms driven by spectrally positive stable
//!   increments ([`montecarlo`]).
//!
//! Closed-form mechanisms (stable, quadratic, and the example families)
//! are evaluated exactly; everything else runs through double-exponential
//! quadrature and safeguarded Newton inversion with explicit tolerances.

pub mod error;
pub mod flow;
pub mod invert;
pub mod limits;
pub mod mechanism;
pub mod montecarlo;
pub mod numeric;
pub(crate) mod quad;
pub mod regvar;

pub use error::{Error, Result};
pub use flow::CumulantFlow;
pub use mechanism::{BranchingMechanism, Criticality, LevyMeasure, LevyTriplet};
