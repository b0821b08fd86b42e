//! Lie algebroids in a local frame and their Levi-Civita connections.

use crate::chart::Chart;
use crate::check::{max_abs, Residual};
use crate::error::{Error, Result};
use crate::expr::{Differentiator, Expr};
use crate::gtb::koszul_with;
use crate::linalg;
use crate::tensor::{check_nondegenerate, TensorField};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// A Lie algebroid of rank `m` with frame `e_i`:
/// `a(e_i) = a^μ_i ∂_μ`, `[e_i, e_j] = C^k_{ij} e_k`.
#[derive(Debug, Clone)]
pub struct LieAlgebroid {
    chart: Arc<Chart>,
    rank: usize,
    /// `a^μ_i` at `i * n + μ`.
    anchor: Vec<Expr>,
    /// `C^k_{ij}` at `(k * m + i) * m + j`.
    structure: Vec<Expr>,
}

impl LieAlgebroid {
    pub fn new(chart: Arc<Chart>, rank: usize, anchor: Vec<Expr>, structure: Vec<Expr>) -> Result<Self> {
        let n = chart.dim();
        if anchor.len() != rank * n || structure.len() != rank * rank * rank {
            return Err(Error::DimensionMismatch(format!("Lie algebroid data for rank {rank}")));
        }
        Ok(LieAlgebroid {
            chart,
            rank,
            anchor,
            structure,
        })
    }

    /// `TM` with the coordinate frame.
    pub fn tangent(chart: Arc<Chart>) -> Self {
        let n = chart.dim();
        LieAlgebroid {
            anchor: linalg::identity(n),
            structure: vec![Expr::zero(); n * n * n],
            rank: n,
            chart,
        }
    }

    /// `(T*M, θ, [·,·]_θ)` in the frame `dx^i`, where the Koszul bracket is
    /// twisted by `twist`. Only a Lie algebroid when `θ` is twisted Poisson
    /// for the same 3-form; see [`LieAlgebroid::jacobi_residual`].
    pub fn cotangent(theta: &TensorField, twist: Option<&TensorField>) -> Self {
        let n = theta.dim();
        let chart = theta.chart().clone();
        let unit = |i: usize| -> Vec<Expr> { (0..n).map(|k| if k == i { Expr::one() } else { Expr::zero() }).collect() };
        let anchor = (0..n * n).map(|k| theta.get(&[k % n, k / n]).clone()).collect();
        let mut structure = vec![Expr::zero(); n * n * n];
        let mut d = Differentiator::new();
        for i in 0..n {
            for j in 0..n {
                let br = koszul_with(&unit(i), &unit(j), theta, twist, &mut d);
                for (k, c) in br.into_iter().enumerate() {
                    structure[(k * n + i) * n + j] = c;
                }
            }
        }
        LieAlgebroid {
            chart,
            rank: n,
            anchor,
            structure,
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn anchor(&self, i: usize, mu: usize) -> &Expr {
        &self.anchor[i * self.chart.dim() + mu]
    }

    pub fn c(&self, k: usize, i: usize, j: usize) -> &Expr {
        let m = self.rank;
        &self.structure[(k * m + i) * m + j]
    }

    /// `a(e_i) f`.
    pub fn rho(&self, i: usize, f: &Expr, d: &mut Differentiator) -> Expr {
        let n = self.chart.dim();
        Expr::sum(
            (0..n)
                .filter(|&mu| !self.anchor(i, mu).is_zero())
                .map(|mu| self.anchor(i, mu) * d.diff(f, mu))
                .collect(),
        )
    }

    /// `a(φ) f` for a section with frame components `p`.
    pub fn rho_section(&self, p: &[Expr], f: &Expr, d: &mut Differentiator) -> Expr {
        Expr::sum(
            (0..self.rank)
                .filter(|&i| !p[i].is_zero())
                .map(|i| &p[i] * self.rho(i, f, d))
                .collect(),
        )
    }

    pub fn bracket(&self, p: &[Expr], q: &[Expr], d: &mut Differentiator) -> Vec<Expr> {
        let m = self.rank;
        (0..m)
            .map(|k| {
                let mut t = vec![self.rho_section(p, &q[k], d), -self.rho_section(q, &p[k], d)];
                for i in 0..m {
                    for j in 0..m {
                        let c = self.c(k, i, j);
                        if !c.is_zero() && !p[i].is_zero() && !q[j].is_zero() {
                            t.push(&p[i] * &q[j] * c);
                        }
                    }
                }
                Expr::sum(t)
            })
            .collect()
    }

    /// Jacobiator `Σ_cyc [[e_i,e_j],e_k]` and the anchor defect
    /// `a([e_i,e_j]) - [a(e_i), a(e_j)]`, combined.
    pub fn jacobi_residual(&self) -> Result<Residual> {
        let m = self.rank;
        let n = self.chart.dim();
        let mut d = Differentiator::new();
        let mut res = Vec::new();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for p in 0..m {
                        let mut t = Vec::new();
                        for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
                            for l in 0..m {
                                t.push(self.c(l, x, y) * self.c(p, l, z));
                            }
                            t.push(-self.rho(z, self.c(p, x, y), &mut d));
                        }
                        res.push(Expr::sum(t));
                    }
                }
                for mu in 0..n {
                    let mut t: Vec<Expr> = (0..m).map(|l| self.c(l, i, j) * self.anchor(l, mu)).collect();
                    t.push(-self.rho(i, self.anchor(j, mu), &mut d));
                    t.push(self.rho(j, self.anchor(i, mu), &mut d));
                    res.push(Expr::sum(t));
                }
            }
        }
        max_abs(&res, &self.chart.sample_points())
    }
}

/// `∇_{e_i} e_j = Γ^k_{ij} e_k` on a Lie algebroid with fiber metric `h`.
#[derive(Debug, Clone)]
pub struct AlgebroidConnection {
    algebroid: Arc<LieAlgebroid>,
    h: Vec<Expr>,
    h_inv: Vec<Expr>,
    /// `Γ^k_{ij}` at `(k * m + i) * m + j`.
    gamma: Vec<Expr>,
}

#[derive(Debug, Clone)]
pub struct AlgebroidCurvature {
    /// `R^l_{kij} = ⟨e^l, R(e_i, e_j) e_k⟩` at `((l * m + k) * m + i) * m + j`.
    pub riemann: Vec<Expr>,
    /// `Ric_{kj} = R^i_{kij}`, row-major.
    pub ricci: Vec<Expr>,
    pub scalar: Expr,
}

impl AlgebroidConnection {
    /// `∇_φ φ' = ½{[φ,φ']_A + h⁻¹(L^A_φ(hφ') + i_{φ'} d^A(hφ))}` for a fiber
    /// metric `h_{ij} = h(e_i, e_j)` given row-major.
    pub fn levi_civita(algebroid: Arc<LieAlgebroid>, h: Vec<Expr>) -> Result<Self> {
        let m = algebroid.rank();
        if h.len() != m * m {
            return Err(Error::DimensionMismatch("fiber metric size".into()));
        }
        check_nondegenerate(&h, m, &algebroid.chart().sample_points())?;
        let (h_inv, _) = linalg::inverse(&h, m);
        let mut d = Differentiator::new();
        let a = &algebroid;
        let hh = |i: usize, j: usize| &h[i * m + j];
        // L_{ijl} = (L^A_{e_i}(h e_j) + i_{e_j} d^A(h e_i))(e_l)
        let mut low = vec![Expr::zero(); m * m * m];
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    let mut t = vec![
                        a.rho(i, hh(j, l), &mut d),
                        a.rho(j, hh(i, l), &mut d),
                        -a.rho(l, hh(i, j), &mut d),
                    ];
                    for p in 0..m {
                        t.push(-(hh(j, p) * a.c(p, i, l)));
                        t.push(-(hh(i, p) * a.c(p, j, l)));
                    }
                    low[(i * m + j) * m + l] = Expr::sum(t);
                }
            }
        }
        let gamma = (0..m * m * m)
            .map(|idx| {
                let (k, i, j) = (idx / (m * m), (idx / m) % m, idx % m);
                let mut t = vec![a.c(k, i, j).clone()];
                for l in 0..m {
                    t.push(&h_inv[k * m + l] * &low[(i * m + j) * m + l]);
                }
                0.5 * Expr::sum(t)
            })
            .collect();
        Ok(AlgebroidConnection {
            algebroid,
            h,
            h_inv,
            gamma,
        })
    }

    pub fn algebroid(&self) -> &Arc<LieAlgebroid> {
        &self.algebroid
    }

    pub fn rank(&self) -> usize {
        self.algebroid.rank()
    }

    pub fn metric(&self) -> &[Expr] {
        &self.h
    }

    pub fn metric_inverse(&self) -> &[Expr] {
        &self.h_inv
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Expr {
        let m = self.rank();
        &self.gamma[(k * m + i) * m + j]
    }

    /// `Γ^k_{ij} - Γ^k_{ji} - C^k_{ij}`.
    pub fn torsion_residual(&self) -> Result<Residual> {
        let m = self.rank();
        let a = &self.algebroid;
        let res: Vec<Expr> = (0..m * m * m)
            .map(|idx| {
                let (k, i, j) = (idx / (m * m), (idx / m) % m, idx % m);
                self.gamma(k, i, j) - self.gamma(k, j, i) - a.c(k, i, j)
            })
            .collect();
        max_abs(&res, &a.chart().sample_points())
    }

    /// `a_i h_{jk} - Γ^l_{ij} h_{lk} - Γ^l_{ik} h_{jl}`.
    pub fn metric_residual(&self) -> Result<Residual> {
        let m = self.rank();
        let a = &self.algebroid;
        let mut d = Differentiator::new();
        let mut res = Vec::new();
        for i in 0..m {
            for j in 0..m {
                for k in j..m {
                    let mut t = vec![a.rho(i, &self.h[j * m + k], &mut d)];
                    for l in 0..m {
                        t.push(-(self.gamma(l, i, j) * &self.h[l * m + k]));
                        t.push(-(self.gamma(l, i, k) * &self.h[j * m + l]));
                    }
                    res.push(Expr::sum(t));
                }
            }
        }
        max_abs(&res, &a.chart().sample_points())
    }

    /// `∇_{e_i} α` for a section `α` of `A*` with components `α_j = α(e_j)`:
    /// `(∇_i α)_j = a_i α_j - Γ^l_{ij} α_l`, row-major in `(i, j)`.
    pub fn covariant_form(&self, alpha: &[Expr], d: &mut Differentiator) -> Vec<Expr> {
        let m = self.rank();
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut t = vec![self.algebroid.rho(i, &alpha[j], d)];
                for l in 0..m {
                    t.push(-(self.gamma(l, i, j) * &alpha[l]));
                }
                out.push(Expr::sum(t));
            }
        }
        out
    }

    /// `(∇_i T)_{jkl}` for a covariant 3-tensor on `A`, at `((i*m+j)*m+k)*m+l`.
    pub fn covariant_3form(&self, t: &[Expr], d: &mut Differentiator) -> Vec<Expr> {
        let m = self.rank();
        let at = |j: usize, k: usize, l: usize| &t[(j * m + k) * m + l];
        let mut out = Vec::with_capacity(m * m * m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let mut s = vec![self.algebroid.rho(i, at(j, k, l), d)];
                        for p in 0..m {
                            s.push(-(self.gamma(p, i, j) * at(p, k, l)));
                            s.push(-(self.gamma(p, i, k) * at(j, p, l)));
                            s.push(-(self.gamma(p, i, l) * at(j, k, p)));
                        }
                        out.push(Expr::sum(s));
                    }
                }
            }
        }
        out
    }

    /// `Δf = (h⁻¹)^{ij} (∇_i d^A f)_j`.
    pub fn laplacian(&self, f: &Expr) -> Expr {
        let m = self.rank();
        let mut d = Differentiator::new();
        let df: Vec<Expr> = (0..m).map(|j| self.algebroid.rho(j, f, &mut d)).collect();
        let h = self.covariant_form(&df, &mut d);
        Expr::sum((0..m * m).map(|k| &self.h_inv[k] * &h[k]).collect())
    }

    pub fn curvature(&self) -> AlgebroidCurvature {
        let m = self.rank();
        let a = &self.algebroid;
        let mut d = Differentiator::new();
        let mut riemann = vec![Expr::zero(); m * m * m * m];
        for l in 0..m {
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        let mut t = vec![
                            a.rho(i, self.gamma(l, j, k), &mut d),
                            -a.rho(j, self.gamma(l, i, k), &mut d),
                        ];
                        for p in 0..m {
                            t.push(self.gamma(p, j, k) * self.gamma(l, i, p));
                            t.push(-(self.gamma(p, i, k) * self.gamma(l, j, p)));
                            let c = a.c(p, i, j);
                            if !c.is_zero() {
                                t.push(-(c * self.gamma(l, p, k)));
                            }
                        }
                        riemann[((l * m + k) * m + i) * m + j] = Expr::sum(t);
                    }
                }
            }
        }
        let ricci: Vec<Expr> = (0..m * m)
            .map(|kj| {
                let (k, j) = (kj / m, kj % m);
                Expr::sum((0..m).map(|i| riemann[((i * m + k) * m + i) * m + j].clone()).collect())
            })
            .collect();
        let scalar = Expr::sum((0..m * m).map(|k| &self.h_inv[k] * &ricci[k]).collect());
        AlgebroidCurvature {
            riemann,
            ricci,
            scalar,
        }
    }
}

/// Tolerance for the twisted Poisson check in [`lie_algebroid_lc`].
pub const POISSON_TOL: f64 = 1e-9;

/// Levi-Civita connection of `(T*M, θ, [·,·]_θ)` for the fiber metric
/// `g_A = G⁻¹`, where `G` is a Riemannian metric.
pub fn lie_algebroid_lc(theta: &TensorField, twist: Option<&TensorField>, big_g: &TensorField) -> Result<AlgebroidConnection> {
    crate::gtb::check_twisted_poisson(theta, twist, POISSON_TOL)?;
    crate::gtb::check_positive_definite(big_g)?;
    let n = big_g.dim();
    let (h, _) = linalg::inverse(big_g.components(), n);
    let alg = Arc::new(LieAlgebroid::cotangent(theta, twist));
    AlgebroidConnection::levi_civita(alg, h)
}
