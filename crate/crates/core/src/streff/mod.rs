//! Beta functions, their reformulation through the dilaton connection, and
//! the equivalent symplectic gravity equations in the background-independent
//! gauge.

mod algebroid;
mod background;
mod beta;
mod central;
mod equivalence;
mod symplectic;

#[cfg(test)]
mod tests;

pub use algebroid::{lie_algebroid_lc, AlgebroidConnection, AlgebroidCurvature, LieAlgebroid, POISSON_TOL};
pub use background::Background;
pub use beta::{beta_all, beta_b_conformal, beta_index, BetaResiduals};
pub use central::{central_residuals, dilaton_connection, CentralResiduals};
pub use equivalence::{equivalence_report, transport_identity, EquivalenceReport, Verdict, VANISHING_TOL};
pub use symplectic::{
    symplectic_residuals, symplectic_residuals_with, theta_connection, theta_metric_inverse, SymplecticPackage,
    SymplecticResiduals,
};
