//! Beta functions of the bosonic string sigma model.

use super::background::Background;
use crate::check::{max_abs, Residual};
use crate::error::Result;
use crate::expr::{Differentiator, Expr};
use crate::tensor::{interior, multi_indices, TensorField, Variance};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct BetaResiduals {
    pub beta_g: TensorField,
    pub beta_b: TensorField,
    pub beta_phi: Expr,
    pub beta_phi_prime: Expr,
}

impl BetaResiduals {
    /// Largest component of `β(g)`, `β(B)` and `β(φ)` over the sample points.
    pub fn max_abs(&self) -> Result<Residual> {
        let pts = self.beta_g.chart().sample_points();
        let mut all: Vec<Expr> = self.beta_g.components().to_vec();
        all.extend_from_slice(self.beta_b.components());
        all.push(self.beta_phi.clone());
        max_abs(&all, &pts)
    }

    /// `β'(φ) + ¼(β(φ) - g^{μν} β(g)_{μν})`, zero for every background.
    pub fn prime_relation(&self, g_inv: &TensorField) -> Expr {
        let n = g_inv.dim();
        let tr = Expr::sum(multi_indices(n, 2).map(|i| g_inv.get(&i) * self.beta_g.get(&i)).collect());
        &self.beta_phi_prime + 0.25 * (&self.beta_phi - tr)
    }
}

fn unit(n: usize, i: usize) -> Vec<Expr> {
    (0..n).map(|k| if k == i { Expr::one() } else { Expr::zero() }).collect()
}

/// Index-free form:
/// `β(g)(X,Y) = Ric(X,Y) - ½⟨i_X H', i_Y H'⟩ + (∇_X dφ)(Y) + (∇_Y dφ)(X)`,
/// `β(B) = ½ δH' + H'(·, ·, ∇φ)`,
/// `β(φ) = 𝓡 - ½⟨H',H'⟩ + 4Δφ - 4‖∇φ‖²`.
pub fn beta_all(bg: &Background) -> Result<BetaResiduals> {
    let m = bg.metric();
    let n = bg.dim();
    let h = bg.h_prime();
    let curv = m.curvature();
    let slices: Vec<TensorField> = (0..n).map(|i| interior(&unit(n, i), h)).collect::<Result<_>>()?;
    let mut hh = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            hh.push(m.form_inner(&slices[i], &slices[j])?);
        }
    }
    let ndphi = m.hessian(bg.phi())?;
    let beta_g = TensorField::from_fn(bg.chart().clone(), vec![Variance::Down; 2], |i| {
        curv.ricci.get(i) - 0.5 * &hh[i[0] * n + i[1]] + ndphi.get(i) + ndphi.get(&[i[1], i[0]])
    });
    let grad = m.gradient(bg.phi())?;
    let gv: Vec<Expr> = (0..n).map(|i| grad.get(&[i]).clone()).collect();
    // H'(X, Y, ∇φ) = (i_{∇φ} H')(X, Y) up to the cyclic shift of slots.
    let h_grad = interior(&gv, &h.permute(&[2, 0, 1])?)?;
    let beta_b = m.codifferential(h)?.scale(&Expr::constant(0.5)).add(&h_grad)?;
    let hn = m.form_inner(h, h)?;
    let lap = m.laplacian(bg.phi())?;
    let dphi2 = m.norm_sq(&m.differential(bg.phi()))?;
    let beta_phi = curv.scalar - 0.5 * &hn + 4.0 * &lap - 4.0 * &dphi2;
    let beta_phi_prime = -0.5 * lap + dphi2 - 0.25 * hn;
    Ok(BetaResiduals {
        beta_g,
        beta_b,
        beta_phi,
        beta_phi_prime,
    })
}

/// Index notation:
/// `β(g)_{μν} = R_{μν} - ¼ H'_{μλκ} H'_ν{}^{λκ} + 2 ∇_ν ∂_μ φ`,
/// `β(B)_{μν} = -½ ∇_λ H'^λ{}_{μν} + H'_{μν}{}^λ ∂_λ φ`,
/// `β(φ) = R - (1/12) H'² + 4 ∇^μ∂_μ φ - 4 ∂_μφ ∂^μφ`,
/// `β'(φ) = -½ ∇^μ∂_μ φ + ∂_μφ ∂^μφ - (1/24) H'²`.
pub fn beta_index(bg: &Background) -> Result<BetaResiduals> {
    let m = bg.metric();
    let n = bg.dim();
    let h = bg.h_prime();
    let gi = m.inverse();
    let curv = m.curvature();
    let mut d = Differentiator::new();
    let dphi: Vec<Expr> = (0..n).map(|i| d.diff(bg.phi(), i)).collect();
    let up = |i: usize| Expr::sum((0..n).map(|k| gi.get(&[i, k]) * &dphi[k]).collect());
    let dphi_up: Vec<Expr> = (0..n).map(up).collect();
    let mut hess_at = |mu: usize, nu: usize| {
        let mut t = vec![d.diff(&dphi[mu], nu)];
        for k in 0..n {
            t.push(-(m.gamma(k, nu, mu) * &dphi[k]));
        }
        Expr::sum(t)
    };
    let hess: Vec<Expr> = multi_indices(n, 2).map(|i| hess_at(i[0], i[1])).collect();
    let hcontr = |mu: usize, nu: usize| {
        let mut t = Vec::new();
        for idx in multi_indices(n, 4) {
            let (l, k, a, b) = (idx[0], idx[1], idx[2], idx[3]);
            t.push(h.get(&[mu, l, k]) * h.get(&[nu, a, b]) * gi.get(&[l, a]) * gi.get(&[k, b]));
        }
        Expr::sum(t)
    };
    let beta_g = TensorField::from_fn(bg.chart().clone(), vec![Variance::Down; 2], |i| {
        let (mu, nu) = (i[0], i[1]);
        curv.ricci.get(i) - 0.25 * hcontr(mu, nu) + 2.0 * &hess[nu * n + mu]
    });
    let nh = m.covariant_derivative(h)?;
    let beta_b = TensorField::from_fn(bg.chart().clone(), vec![Variance::Down; 2], |i| {
        let (mu, nu) = (i[0], i[1]);
        let mut t = Vec::new();
        for l in 0..n {
            for a in 0..n {
                t.push(-0.5 * gi.get(&[l, a]) * nh.get(&[l, a, mu, nu]));
            }
            t.push(h.get(&[mu, nu, l]) * &dphi_up[l]);
        }
        Expr::sum(t)
    });
    let mut hsq = Vec::new();
    for idx in multi_indices(n, 6) {
        let (a, b, c, x, y, z) = (idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]);
        if h.get(&[a, b, c]).is_zero() || h.get(&[x, y, z]).is_zero() {
            continue;
        }
        hsq.push(h.get(&[a, b, c]) * h.get(&[x, y, z]) * gi.get(&[a, x]) * gi.get(&[b, y]) * gi.get(&[c, z]));
    }
    let hsq = Expr::sum(hsq);
    let box_phi = Expr::sum(multi_indices(n, 2).map(|i| gi.get(&i) * &hess[i[0] * n + i[1]]).collect());
    let grad2 = Expr::sum((0..n).map(|k| &dphi[k] * &dphi_up[k]).collect());
    let beta_phi = curv.scalar - (1.0 / 12.0) * &hsq + 4.0 * &box_phi - 4.0 * &grad2;
    let beta_phi_prime = -0.5 * box_phi + grad2 - (1.0 / 24.0) * hsq;
    Ok(BetaResiduals {
        beta_g,
        beta_b,
        beta_phi,
        beta_phi_prime,
    })
}

/// `β(B) = ½ e^{2φ} δ(e^{-2φ} H')`.
pub fn beta_b_conformal(bg: &Background) -> Result<TensorField> {
    let m = bg.metric();
    let damp = (-2.0 * bg.phi()).exp();
    let inner = m.codifferential(&bg.h_prime().scale(&damp))?;
    Ok(inner.scale(&(0.5 * (2.0 * bg.phi()).exp())))
}
