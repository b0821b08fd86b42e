//! Classical Riemannian geometry of a coordinate metric.
//!
//! Conventions: `Γ^k_{ij} = ½ g^{kl}(∂_i g_{lj} + ∂_j g_{il} - ∂_l g_{ij})`,
//! `R(∂_i, ∂_j)∂_l = R^k_{lij} ∂_k`, `Ric_{lj} = R^k_{lkj}` (the unit sphere has
//! scalar curvature +2) and the inner product of p-forms carries `1/p!`.

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{Differentiator, Expr};
use crate::tensor::{metric_inverse, multi_indices, TensorField, Variance};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

pub struct Riemannian {
    chart: Arc<Chart>,
    g: TensorField,
    g_inv: TensorField,
    gamma: Vec<Expr>,
}

pub struct Curvature {
    /// `R^k_{lij}` with slots (Up, Down, Down, Down).
    pub riemann: TensorField,
    pub ricci: TensorField,
    pub scalar: Expr,
}

fn factorial(p: usize) -> f64 {
    (1..=p).map(|k| k as f64).product()
}

impl Riemannian {
    pub fn new(g: &TensorField) -> Result<Self> {
        if g.slots() != [Variance::Down, Variance::Down] {
            return Err(Error::VarianceMismatch("metric must be a (0,2) field".into()));
        }
        g.check_symmetric(0, 1, 1e-12)?;
        let g_inv = metric_inverse(g)?;
        let chart = g.chart().clone();
        let n = chart.dim();
        let dg = g.coordinate_gradient();
        let mut gamma = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let terms = (0..n)
                        .map(|l| {
                            let s = dg.get(&[i, l, j]) + dg.get(&[j, i, l]) - dg.get(&[l, i, j]);
                            0.5 * g_inv.get(&[k, l]) * s
                        })
                        .collect();
                    gamma.push(Expr::sum(terms));
                }
            }
        }
        Ok(Riemannian {
            chart,
            g: g.clone(),
            g_inv,
            gamma,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn metric(&self) -> &TensorField {
        &self.g
    }

    pub fn inverse(&self) -> &TensorField {
        &self.g_inv
    }

    /// `Γ^k_{ij}`.
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Expr {
        let n = self.dim();
        &self.gamma[(k * n + i) * n + j]
    }

    /// Christoffel symbols as a flat array indexed `[k][i][j]`.
    pub fn christoffel(&self) -> &[Expr] {
        &self.gamma
    }

    /// `∇T` with the derivative index as a new first slot.
    pub fn covariant_derivative(&self, t: &TensorField) -> Result<TensorField> {
        if !t.is_tensorial() {
            return Err(Error::NonTensorial);
        }
        if !Arc::ptr_eq(t.chart(), &self.chart) && **t.chart() != *self.chart {
            return Err(Error::ChartMismatch);
        }
        let n = self.dim();
        let grad = t.coordinate_gradient();
        let mut slots = vec![Variance::Down];
        slots.extend_from_slice(t.slots());
        Ok(TensorField::from_fn(self.chart.clone(), slots, |idx| {
            let m = idx[0];
            let rest = &idx[1..];
            let mut terms = vec![grad.get(idx).clone()];
            for (s, v) in t.slots().iter().enumerate() {
                for c in 0..n {
                    let mut src = rest.to_vec();
                    src[s] = c;
                    let tc = t.get(&src);
                    if tc.is_zero() {
                        continue;
                    }
                    match v {
                        Variance::Up => terms.push(self.gamma(rest[s], m, c) * tc),
                        Variance::Down => terms.push(-(self.gamma(c, m, rest[s]) * tc)),
                    }
                }
            }
            Expr::sum(terms)
        }))
    }

    pub fn curvature(&self) -> Curvature {
        let n = self.dim();
        let mut d = Differentiator::new();
        let chart = self.chart.clone();
        let riemann = TensorField::from_fn(chart.clone(), vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down], |idx| {
            let (k, l, i, j) = (idx[0], idx[1], idx[2], idx[3]);
            let mut terms = vec![
                d.diff(self.gamma(k, j, l), i),
                -d.diff(self.gamma(k, i, l), j),
            ];
            for m in 0..n {
                terms.push(self.gamma(k, i, m) * self.gamma(m, j, l));
                terms.push(-(self.gamma(k, j, m) * self.gamma(m, i, l)));
            }
            Expr::sum(terms)
        });
        let ricci = TensorField::from_fn(chart, vec![Variance::Down, Variance::Down], |idx| {
            Expr::sum((0..n).map(|k| riemann.get(&[k, idx[0], k, idx[1]]).clone()).collect())
        });
        let scalar = Expr::sum(
            multi_indices(n, 2)
                .map(|i| self.g_inv.get(&i) * ricci.get(&i))
                .collect(),
        );
        Curvature {
            riemann,
            ricci,
            scalar,
        }
    }

    fn raise_all(&self, t: &TensorField) -> Result<TensorField> {
        let mut out = t.clone();
        for s in 0..t.rank() {
            if out.slots()[s] == Variance::Down {
                out = out.raise_index(&self.g_inv, s)?;
            }
        }
        Ok(out)
    }

    /// `⟨α, β⟩ = (1/p!) α_{I} β^{I}` for p-forms.
    pub fn form_inner(&self, a: &TensorField, b: &TensorField) -> Result<Expr> {
        if a.rank() != b.rank() || a.slots().iter().chain(b.slots()).any(|v| *v != Variance::Down) {
            return Err(Error::VarianceMismatch("form_inner needs two forms of equal degree".into()));
        }
        let bu = self.raise_all(b)?;
        let p = a.rank();
        let terms = a
            .components()
            .iter()
            .zip(bu.components())
            .map(|(x, y)| x * y)
            .collect();
        Ok(Expr::sum(terms) * (1.0 / factorial(p)))
    }

    /// `(δα)_{I} = -g^{jk} (∇_j α)_{k I}`.
    pub fn codifferential(&self, a: &TensorField) -> Result<TensorField> {
        if a.rank() == 0 || a.slots().iter().any(|v| *v != Variance::Down) {
            return Err(Error::VarianceMismatch("codifferential needs a form of degree >= 1".into()));
        }
        let na = self.covariant_derivative(a)?;
        let tr = na.raise_index(&self.g_inv, 0)?.contract(0, 1)?;
        Ok(tr.scale(&Expr::constant(-1.0)))
    }

    pub fn differential(&self, f: &Expr) -> TensorField {
        let mut d = Differentiator::new();
        TensorField::from_fn(self.chart.clone(), vec![Variance::Down], |i| d.diff(f, i[0]))
    }

    pub fn gradient(&self, f: &Expr) -> Result<TensorField> {
        self.differential(f).raise_index(&self.g_inv, 0)
    }

    /// `∇_i ∂_j f`.
    pub fn hessian(&self, f: &Expr) -> Result<TensorField> {
        self.covariant_derivative(&self.differential(f))
    }

    /// `Δf = g^{ij} ∇_i ∂_j f`.
    pub fn laplacian(&self, f: &Expr) -> Result<Expr> {
        let h = self.hessian(f)?;
        Ok(self.trace(&h))
    }

    /// `g^{ij} T_{ij}` for a (0,2) field.
    pub fn trace(&self, t: &TensorField) -> Expr {
        let n = self.dim();
        Expr::sum(multi_indices(n, 2).map(|i| self.g_inv.get(&i) * t.get(&i)).collect())
    }

    /// `∇_i X^i`.
    pub fn divergence(&self, x: &TensorField) -> Result<Expr> {
        if x.slots() != [Variance::Up] {
            return Err(Error::VarianceMismatch("divergence needs a vector field".into()));
        }
        self.covariant_derivative(x)?.contract(0, 1).map(|t| t.components()[0].clone())
    }

    /// Squared norm of a vector or 1-form.
    pub fn norm_sq(&self, v: &TensorField) -> Result<Expr> {
        let m = match v.slots() {
            [Variance::Up] => &self.g,
            [Variance::Down] => &self.g_inv,
            _ => return Err(Error::VarianceMismatch("norm_sq needs a vector or a 1-form".into())),
        };
        let n = self.dim();
        Ok(Expr::sum(
            multi_indices(n, 2)
                .map(|i| m.get(&i) * v.get(&[i[0]]) * v.get(&[i[1]]))
                .collect(),
        ))
    }
}
