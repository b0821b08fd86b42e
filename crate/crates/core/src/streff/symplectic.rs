//! The background-independent gauge: `θ = B⁻¹`, `G = -B g⁻¹ B` and the
//! Lie algebroid `(T*M, θ, [·,·]_θ^{dB})`.

use super::algebroid::{lie_algebroid_lc, AlgebroidConnection, AlgebroidCurvature};
use super::background::Background;
use super::central::dilaton_connection;
use crate::check::{max_abs, Residual};
use crate::error::Result;
use crate::expr::{Differentiator, Expr};
use crate::gconn::GenConnection;
use crate::gtb::{d_theta, theta_pullback, ThetaTwist};
use crate::linalg;
use crate::tensor::{exterior_derivative, TensorField, Variance};
use alloc::vec;
use alloc::vec::Vec;

pub struct SymplecticPackage {
    twist: ThetaTwist,
    big_g: TensorField,
    h_theta: TensorField,
    lc: AlgebroidConnection,
    curvature: AlgebroidCurvature,
}

impl SymplecticPackage {
    /// Fails with `OddDimension` or `SingularB` unless `B` is invertible.
    pub fn new(bg: &Background) -> Result<Self> {
        let twist = ThetaTwist::from_b(bg.b())?;
        let n = bg.dim();
        let gi = bg.metric().inverse().components();
        let b = bg.b().components();
        let bgb = linalg::matmul(&linalg::matmul(b, gi, n, n, n), b, n, n, n);
        let big_g = TensorField::new(bg.chart().clone(), vec![Variance::Down; 2], bgb.iter().map(|e| -e).collect())?;
        let db = exterior_derivative(bg.b())?;
        let lc = lie_algebroid_lc(twist.theta(), Some(&db), &big_g)?;
        let curvature = lc.curvature();
        Ok(SymplecticPackage {
            h_theta: theta_pullback(bg.h_prime(), twist.theta()),
            twist,
            big_g,
            lc,
            curvature,
        })
    }

    pub fn twist(&self) -> &ThetaTwist {
        &self.twist
    }

    pub fn theta(&self) -> &TensorField {
        self.twist.theta()
    }

    /// `G = -B g⁻¹ B`.
    pub fn big_g(&self) -> &TensorField {
        &self.big_g
    }

    /// `H'_θ = H'(θ·, θ·, θ·)`.
    pub fn h_theta(&self) -> &TensorField {
        &self.h_theta
    }

    pub fn connection(&self) -> &AlgebroidConnection {
        &self.lc
    }

    pub fn curvature(&self) -> &AlgebroidCurvature {
        &self.curvature
    }

    fn g(&self, i: usize, j: usize) -> &Expr {
        self.big_g.get(&[i, j])
    }

    /// `⟨T, T'⟩_G = (1/6) T^{abc} T'^{a'b'c'} G_{aa'} G_{bb'} G_{cc'}`.
    pub fn h_norm(&self) -> Expr {
        let h = &self.h_theta;
        let lowered = self.lower_all(h);
        let t: Vec<Expr> = h.components().iter().zip(&lowered).map(|(a, b)| a * b).collect();
        Expr::sum(t) * (1.0 / 6.0)
    }

    fn lower_all(&self, h: &TensorField) -> Vec<Expr> {
        let n = h.dim();
        let mut cur = h.components().to_vec();
        for s in 0..3 {
            let prev = cur.clone();
            cur = (0..n * n * n)
                .map(|idx| {
                    let mut ix = [idx / (n * n), (idx / n) % n, idx % n];
                    let keep = ix[s];
                    Expr::sum(
                        (0..n)
                            .map(|a| {
                                ix[s] = a;
                                let src = (ix[0] * n + ix[1]) * n + ix[2];
                                self.g(keep, a) * &prev[src]
                            })
                            .collect(),
                    )
                })
                .collect();
        }
        cur
    }

    /// `‖α‖²_G = G_{kl} α_k α_l` for a section of `A* = TM`.
    pub fn norm_sq(&self, alpha: &[Expr]) -> Expr {
        let n = alpha.len();
        Expr::sum((0..n * n).map(|k| self.g(k / n, k % n) * &alpha[k / n] * &alpha[k % n]).collect())
    }
}

#[derive(Debug, Clone)]
pub struct SymplecticResiduals {
    /// `𝓡^θ(G⁻¹) - ½⟨H'_θ,H'_θ⟩_G + 4Δ_θφ - 4‖d_θφ‖²_G`.
    pub scalar: Expr,
    /// `Ric^θ(ξ,η) - ½⟨i_ξ H'_θ, i_η H'_θ⟩_G + (∇_ξ d_θφ)(η) + (∇_η d_θφ)(ξ)`.
    pub sym: TensorField,
    /// `H'_θ(ξ, η, G d_θφ) - ½ (∇_{ψ^k} H'_θ)(Gψ_k, ξ, η)`.
    pub skew: TensorField,
}

impl SymplecticResiduals {
    pub fn max_abs(&self) -> Result<Residual> {
        let pts = self.sym.chart().sample_points();
        let mut all: Vec<Expr> = self.sym.components().to_vec();
        all.extend_from_slice(self.skew.components());
        all.push(self.scalar.clone());
        max_abs(&all, &pts)
    }
}

pub fn symplectic_residuals(bg: &Background) -> Result<SymplecticResiduals> {
    let pkg = SymplecticPackage::new(bg)?;
    Ok(symplectic_residuals_with(bg, &pkg))
}

pub fn symplectic_residuals_with(bg: &Background, pkg: &SymplecticPackage) -> SymplecticResiduals {
    let n = bg.dim();
    let chart = bg.chart().clone();
    let lc = pkg.connection();
    let mut d = Differentiator::new();
    let alpha = d_theta(bg.phi(), pkg.theta());
    let nabla_alpha = lc.covariant_form(&alpha, &mut d);
    let h = pkg.h_theta();
    let hc = |i: usize, j: usize, k: usize| h.get(&[i, j, k]);
    let lap = lc.laplacian(bg.phi());
    let scalar = pkg.curvature().scalar.clone() - 0.5 * pkg.h_norm() + 4.0 * lap - 4.0 * pkg.norm_sq(&alpha);
    let ric = &pkg.curvature().ricci;
    let sym = TensorField::from_fn(chart.clone(), vec![Variance::Up; 2], |i| {
        let (k, l) = (i[0], i[1]);
        // ½⟨i_ξ H, i_η H⟩_G = ¼ H^{kab} H^{lcd} G_{ac} G_{bd}
        Expr::sum(vec![
            ric[k * n + l].clone(),
            -0.25 * partial_lowered(pkg, h, k, l),
            nabla_alpha[k * n + l].clone(),
            nabla_alpha[l * n + k].clone(),
        ])
    });
    let nh = lc.covariant_3form(h.components(), &mut d);
    let g_alpha: Vec<Expr> = (0..n)
        .map(|m| Expr::sum((0..n).map(|p| pkg.g(m, p) * &alpha[p]).collect()))
        .collect();
    let skew = TensorField::from_fn(chart, vec![Variance::Up; 2], |i| {
        let (k, l) = (i[0], i[1]);
        let mut t: Vec<Expr> = (0..n).map(|m| hc(k, l, m) * &g_alpha[m]).collect();
        for a in 0..n {
            for b in 0..n {
                t.push(-0.5 * pkg.g(a, b) * &nh[((a * n + b) * n + k) * n + l]);
            }
        }
        Expr::sum(t)
    });
    SymplecticResiduals { scalar, sym, skew }
}

/// `H^{kab} H^{lcd} G_{ac} G_{bd}`.
fn partial_lowered(pkg: &SymplecticPackage, h: &TensorField, k: usize, l: usize) -> Expr {
    let n = h.dim();
    let mut t = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let x = h.get(&[k, a, b]);
            if x.is_zero() {
                continue;
            }
            for c in 0..n {
                for dd in 0..n {
                    let y = h.get(&[l, c, dd]);
                    if !y.is_zero() {
                        t.push(x * y * pkg.g(a, c) * pkg.g(b, dd));
                    }
                }
            }
        }
    }
    Expr::sum(t)
}

/// `∇^θ = 𝓕_θ⁻¹ ∇_{𝓕_θ ·} 𝓕_θ ·` for the dilaton connection `∇`.
pub fn theta_connection(bg: &Background, twist: &ThetaTwist) -> Result<GenConnection> {
    Ok(dilaton_connection(bg)?.transport(&twist.matrix(), &twist.inverse_matrix()))
}

/// `𝐆_θ⁻¹ = 𝓕_θ⁻¹ 𝐆⁻¹ 𝓕_θ⁻ᵀ`.
pub fn theta_metric_inverse(bg: &Background, twist: &ThetaTwist) -> Result<Vec<Expr>> {
    let r = 2 * bg.dim();
    let gm = bg.generalized_metric()?;
    let fi = twist.inverse_matrix();
    let fit = linalg::transpose(&fi, r, r);
    Ok(linalg::matmul(&linalg::matmul(&fi, &gm.inverse_block(), r, r, r), &fit, r, r, r))
}
