use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::gconn::TwistedPicture;
use crate::gtb::{check_positive_definite, Dorfman, GeneralizedMetric};
use crate::riemann::Riemannian;
use crate::tensor::{exterior_derivative, TensorField, Variance};
use alloc::sync::Arc;
use alloc::vec;

/// Background fields `(g, B, φ)` together with a closed twist `H`.
#[derive(Clone)]
pub struct Background {
    g: TensorField,
    b: TensorField,
    phi: Expr,
    h: TensorField,
    h_prime: TensorField,
    metric: Arc<Riemannian>,
}

impl Background {
    pub fn new(g: &TensorField, b: &TensorField, phi: Expr, h: &TensorField) -> Result<Self> {
        if g.slots() != [Variance::Down; 2] || b.slots() != [Variance::Down; 2] {
            return Err(Error::VarianceMismatch("g and B must be (0,2) fields".into()));
        }
        g.check_symmetric(0, 1, 1e-12)?;
        b.check_antisymmetric(&[0, 1], 1e-12)?;
        check_positive_definite(g)?;
        let h = Dorfman::new(h.clone())?.h().clone();
        let h_prime = h.add(&exterior_derivative(b)?)?;
        Ok(Background {
            g: g.clone(),
            b: b.clone(),
            phi,
            h,
            h_prime,
            metric: Arc::new(Riemannian::new(g)?),
        })
    }

    /// `H = dB₀`.
    pub fn from_potential(g: &TensorField, b: &TensorField, phi: Expr, b0: &TensorField) -> Result<Self> {
        let h = Dorfman::from_potential(b0)?.h().clone();
        Background::new(g, b, phi, &h)
    }

    /// `H = 0`.
    pub fn untwisted(g: &TensorField, b: &TensorField, phi: Expr) -> Result<Self> {
        let h = TensorField::zeros(g.chart().clone(), vec![Variance::Down; 3]);
        Background::new(g, b, phi, &h)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.g.chart()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn g(&self) -> &TensorField {
        &self.g
    }

    pub fn b(&self) -> &TensorField {
        &self.b
    }

    pub fn phi(&self) -> &Expr {
        &self.phi
    }

    pub fn h(&self) -> &TensorField {
        &self.h
    }

    /// `H' = H + dB`.
    pub fn h_prime(&self) -> &TensorField {
        &self.h_prime
    }

    pub fn metric(&self) -> &Riemannian {
        &self.metric
    }

    pub fn generalized_metric(&self) -> Result<GeneralizedMetric> {
        GeneralizedMetric::new(&self.g, &self.b)
    }

    pub fn twisted_picture(&self) -> Result<TwistedPicture> {
        TwistedPicture::new(&self.g, &self.h_prime)
    }

    /// The same background with `g` replaced by `s·g`.
    pub fn with_scaled_metric(&self, s: f64) -> Result<Self> {
        Background::new(&self.g.scale(&Expr::constant(s)), &self.b, self.phi.clone(), &self.h)
    }
}
