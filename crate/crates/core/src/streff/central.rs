//! The scalar curvature and Ricci compatibility of the dilaton connection
//! against the beta functions.

use super::background::Background;
use super::beta::{beta_all, BetaResiduals};
use crate::check::{max_abs, Residual};
use crate::error::Result;
use crate::expr::Expr;
use crate::gconn::{restrict2, scalar_g, untwist, GenConnection};
use crate::tensor::TensorField;
use alloc::vec::Vec;

/// The Levi-Civita connection on the `H`-twisted algebroid with `J' = 0` and
/// `W' = dφ`, obtained from the `H'`-twisted picture by [`untwist`].
pub fn dilaton_connection(bg: &Background) -> Result<GenConnection> {
    let tp = bg.twisted_picture()?;
    Ok(untwist(&tp.dilaton(bg.phi())?, bg.b()))
}

#[derive(Debug, Clone)]
pub struct CentralResiduals {
    /// `𝓡_𝐆 - β(φ)`.
    pub scalar: Expr,
    /// `Ric(Ψ₊X, Ψ₋Y) - β(g)(X,Y) + β(B)(X,Y)`.
    pub ricci: TensorField,
    pub scalar_g: Expr,
    pub ricci_mixed: TensorField,
    pub beta: BetaResiduals,
}

impl CentralResiduals {
    pub fn max_abs(&self) -> Result<Residual> {
        let pts = self.ricci.chart().sample_points();
        let mut all: Vec<Expr> = self.ricci.components().to_vec();
        all.push(self.scalar.clone());
        max_abs(&all, &pts)
    }
}

pub fn central_residuals(bg: &Background) -> Result<CentralResiduals> {
    let conn = dilaton_connection(bg)?;
    let gm = bg.generalized_metric()?;
    let ric = conn.curvature().ricci;
    let sg = scalar_g(&ric, &gm.inverse_block());
    let mixed = restrict2(&ric, &gm.psi_matrix(1.0), &gm.psi_matrix(-1.0));
    let beta = beta_all(bg)?;
    Ok(CentralResiduals {
        scalar: &sg - &beta.beta_phi,
        ricci: mixed.sub(&beta.beta_g)?.add(&beta.beta_b)?,
        scalar_g: sg,
        ricci_mixed: mixed,
        beta,
    })
}
