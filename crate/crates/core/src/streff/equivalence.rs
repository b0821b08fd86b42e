//! Simultaneous vanishing of the beta functions and of the symplectic
//! gravity equations, and the transport identity relating the two Ricci
//! tensors.

use super::background::Background;
use super::beta::beta_all;
use super::central::dilaton_connection;
use super::symplectic::{symplectic_residuals_with, SymplecticPackage};
use crate::check::{max_abs, Residual};
use crate::error::Result;
use crate::expr::Expr;
use crate::linalg;
use core::fmt;
use alloc::vec::Vec;

/// A family of residuals counts as vanishing below this value.
pub const VANISHING_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    BothOnShell,
    BothOffShell,
    Inconsistent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::BothOnShell => "equivalent: both on-shell",
            Verdict::BothOffShell => "equivalent: both off-shell",
            Verdict::Inconsistent => "inconsistent",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub beta: Residual,
    pub symplectic: Residual,
    /// `Ric_θ - 𝓕_θᵀ Ric 𝓕_θ` on the frame.
    pub transport: Residual,
    pub verdict: Verdict,
}

/// `Ric_θ(ψ, ψ') - Ric(𝓕_θψ, 𝓕_θψ')` over all frame pairs, where `Ric_θ` is
/// computed from the transported connection on the transported frame.
pub fn transport_identity(bg: &Background, pkg: &SymplecticPackage) -> Result<Residual> {
    let conn = dilaton_connection(bg)?;
    let f = pkg.twist().matrix();
    let moved = conn.transport(&f, &pkg.twist().inverse_matrix());
    let ric = conn.curvature().ricci;
    let ric_t = moved.curvature().ricci;
    let r = conn.rank();
    let ft = linalg::transpose(&f, r, r);
    let pulled = linalg::matmul(&linalg::matmul(&ft, ric.components(), r, r, r), &f, r, r, r);
    let diff: Vec<Expr> = ric_t.components().iter().zip(&pulled).map(|(a, b)| a - b).collect();
    max_abs(&diff, &bg.chart().sample_points())
}

pub fn equivalence_report(bg: &Background) -> Result<EquivalenceReport> {
    let pkg = SymplecticPackage::new(bg)?;
    let beta = beta_all(bg)?.max_abs()?;
    let symplectic = symplectic_residuals_with(bg, &pkg).max_abs()?;
    let transport = transport_identity(bg, &pkg)?;
    let verdict = match (beta.value < VANISHING_TOL, symplectic.value < VANISHING_TOL) {
        (true, true) => Verdict::BothOnShell,
        (false, false) => Verdict::BothOffShell,
        _ => Verdict::Inconsistent,
    };
    Ok(EquivalenceReport {
        beta,
        symplectic,
        transport,
        verdict,
    })
}
