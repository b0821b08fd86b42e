//! Connections on a Courant algebroid written in a local frame.
//!
//! A [`CourantFrame`] carries the anchor and structure functions of a frame
//! `e_A` of `E`, normalized so that `⟨e_A, e_B⟩ = η_{AB}` pairs `A` with
//! `dual(A)`. A [`GenConnection`] stores `Γ^C_{AB}` with
//! `∇_{e_A} e_B = Γ^C_{AB} e_C`; torsion, the Riemann tensor `R`, the Ricci
//! tensor and both scalars are computed from it exactly. [`TwistedPicture`]
//! builds the minimal and parametrized Levi-Civita connections of a
//! generalized metric `(g, B)` in the untwisted frame of `(TM ⊕ T*M, H + dB)`
//! and [`ClosedForms`] gives classical expressions for their curvature.

mod closed;
mod connection;
mod curvature;
mod dimension;
mod frame;
mod qla;
mod twisted;


pub use closed::ClosedForms;
pub use connection::{GenConnection, Provenance};
pub use curvature::{restrict2, scalar_e, scalar_g, GenCurvature};
pub use dimension::{expected_dimension, lc_parameter_dimension, lc_parameter_dimension_at, lc_parameter_dimension_with, rank};
pub use frame::{dual, CourantFrame, FrameTensor};
pub use qla::{invert, QlaConnection, QuadraticLieAlgebra, Rational};
pub use twisted::{
    minimal_connection, twist, untwist, validate_params, ConnParams, Policy, TwistedPicture, CYCLIC_TOL,
};
