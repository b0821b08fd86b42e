//! Closed forms for the curvature of `∇̂⁰ + η⁻¹𝒦(J, W)` in terms of
//! classical quantities of `g`, `H'`, `J' ` and `W'`. They share no code with
//! the frame computation and serve as its oracle.

use super::twisted::{ConnParams, TwistedPicture};
use crate::error::Result;
use crate::expr::Expr;
use crate::riemann::Curvature;
use crate::tensor::{interior, multi_indices, TensorField, Variance};
use alloc::vec;
use alloc::vec::Vec;

/// Classical pieces shared by the closed forms.
pub struct ClosedForms<'a> {
    tp: &'a TwistedPicture,
    curv: Curvature,
    j1: TensorField,
    w1: TensorField,
}

impl<'a> ClosedForms<'a> {
    pub fn new(tp: &'a TwistedPicture, params: &ConnParams) -> Self {
        let m = tp.metric();
        ClosedForms {
            tp,
            curv: m.curvature(),
            j1: params.j_trace(m.metric()),
            w1: params.w_trace(m.inverse()),
        }
    }

    /// `J'`.
    pub fn j_trace(&self) -> &TensorField {
        &self.j1
    }

    /// `W'`.
    pub fn w_trace(&self) -> &TensorField {
        &self.w1
    }

    /// `⟨H', H'⟩_g = (1/6) H'_{ijk} H'^{ijk}`.
    pub fn h_norm(&self) -> Result<Expr> {
        self.tp.metric().form_inner(self.tp.h_prime(), self.tp.h_prime())
    }

    /// `𝓡_E = -4 Div_g(J') + 8 ⟨J', W'⟩`.
    pub fn scalar_e(&self) -> Result<Expr> {
        let m = self.tp.metric();
        let n = m.dim();
        let pair = Expr::sum((0..n).map(|i| self.j1.get(&[i]) * self.w1.get(&[i])).collect());
        Ok(-4.0 * m.divergence(&self.j1)? + 8.0 * pair)
    }

    /// `𝓡_𝓖 = 𝓡(g) - ½⟨H',H'⟩_g + 4 Div_g(W') - 4‖W'‖² - 4‖J'‖²`.
    pub fn scalar_g(&self) -> Result<Expr> {
        let m = self.tp.metric();
        let div_w = m.divergence(&self.w1.raise_index(m.inverse(), 0)?)?;
        Ok(self.curv.scalar.clone() - 0.5 * self.h_norm()? + 4.0 * div_w
            - 4.0 * m.norm_sq(&self.w1)?
            - 4.0 * m.norm_sq(&self.j1)?)
    }

    /// `⟨i_X H', i_Y H'⟩_g = ½ H'_{Xab} H'_Y{}^{ab}` as a (0,2) field.
    pub fn h_square(&self) -> TensorField {
        let m = self.tp.metric();
        let n = m.dim();
        let h = self.tp.h_prime();
        let gi = m.inverse();
        TensorField::from_fn(h.chart().clone(), vec![Variance::Down; 2], |i| {
            let mut t = Vec::new();
            for idx in multi_indices(n, 4) {
                let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
                t.push(h.get(&[i[0], a, b]) * h.get(&[i[1], c, d]) * gi.get(&[a, c]) * gi.get(&[b, d]));
            }
            0.5 * Expr::sum(t)
        })
    }

    /// `Ric(Ψ⁰₊X, Ψ⁰₋Y)` predicted from
    /// `Ric^{LC} - ½δ_g H' - ½⟨i_X H', i_Y H'⟩ + (∇_X W')(Y) + (∇_Y W')(X)
    ///  + ⟨i_X i_Y H', W'⟩ + (∇_X J')(gY) - (∇_Y J')(gX)`.
    pub fn ricci_compat(&self) -> Result<TensorField> {
        let m = self.tp.metric();
        let n = m.dim();
        let g = m.metric();
        let h = self.tp.h_prime();
        let delta_h = m.codifferential(h)?;
        let hsq = self.h_square();
        let nw = m.covariant_derivative(&self.w1)?;
        let nj = m.covariant_derivative(&self.j1)?;
        let w_sharp = self.w1.raise_index(m.inverse(), 0)?;
        let ws: Vec<Expr> = (0..n).map(|i| w_sharp.get(&[i]).clone()).collect();
        // i_X i_Y H' = H'(Y, X, ·)
        let ixy = interior(&ws, &h.permute(&[2, 0, 1])?)?;
        Ok(TensorField::from_fn(h.chart().clone(), vec![Variance::Down; 2], |i| {
            let (x, y) = (i[0], i[1]);
            let nj_xy = Expr::sum((0..n).map(|k| nj.get(&[x, k]) * g.get(&[k, y])).collect());
            let nj_yx = Expr::sum((0..n).map(|k| nj.get(&[y, k]) * g.get(&[k, x])).collect());
            Expr::sum(vec![
                self.curv.ricci.get(&[x, y]).clone(),
                -0.5 * delta_h.get(&[x, y]),
                -0.5 * hsq.get(&[x, y]),
                nw.get(&[x, y]).clone(),
                nw.get(&[y, x]).clone(),
                ixy.get(&[y, x]).clone(),
                nj_xy,
                -nj_yx,
            ])
        }))
    }
}
