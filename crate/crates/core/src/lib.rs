//! Symbolic generalized geometry on a single coordinate chart.
//!
//! Scalars are [`expr::Expr`] graphs in the chart coordinates and are
//! differentiated exactly. Numerical work happens only when an expression is
//! evaluated at a sample point. The crate is `no_std` with `alloc`; enable the
//! `std` feature for `std::error::Error` integration of dependencies.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chart;
pub mod check;
pub mod error;
pub mod expr;
pub mod gconn;
pub mod gtb;
pub mod linalg;
pub mod random;
pub mod riemann;
pub mod sample;
pub mod streff;
pub mod tensor;

pub use chart::Chart;
pub use error::{Error, Result};
pub use expr::Expr;
pub use tensor::{TensorField, Variance};
