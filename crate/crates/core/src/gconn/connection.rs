use super::frame::{dual, CourantFrame, FrameTensor};
use crate::check::{max_abs, Residual};
use crate::error::{Error, Result};
use crate::expr::{Differentiator, Expr};
use crate::tensor::{TensorField, Variance};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// How a connection was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Minimal,
    Params,
    Custom,
}

/// A connection `∇_{e_A} e_B = Γ^C_{AB} e_C` on a framed Courant algebroid.
#[derive(Debug, Clone)]
pub struct GenConnection {
    frame: Arc<CourantFrame>,
    /// `Γ^C_{AB}` at `(C * r + A) * r + B`.
    gamma: Vec<Expr>,
    provenance: Provenance,
}

impl GenConnection {
    pub fn new(frame: Arc<CourantFrame>, gamma: Vec<Expr>, provenance: Provenance) -> Result<Self> {
        let r = frame.rank();
        if gamma.len() != r * r * r {
            return Err(Error::DimensionMismatch(format!(
                "{} connection coefficients for rank {r}",
                gamma.len()
            )));
        }
        Ok(GenConnection {
            frame,
            gamma,
            provenance,
        })
    }

    pub fn zero(frame: Arc<CourantFrame>) -> Self {
        let r = frame.rank();
        GenConnection {
            frame,
            gamma: vec![Expr::zero(); r * r * r],
            provenance: Provenance::Custom,
        }
    }

    pub fn frame(&self) -> &Arc<CourantFrame> {
        &self.frame
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn coefficients(&self) -> &[Expr] {
        &self.gamma
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// `Γ^C_{AB}`.
    pub fn gamma(&self, c: usize, a: usize, b: usize) -> &Expr {
        let r = self.rank();
        &self.gamma[(c * r + a) * r + b]
    }

    /// `Γ_{ABC} = ⟨∇_{e_A} e_B, e_C⟩`.
    pub fn lowered(&self, a: usize, b: usize, c: usize) -> &Expr {
        self.gamma(dual(c, self.dim()), a, b)
    }

    /// `∇ + η⁻¹K`, i.e. `⟨∇'_ψ ψ', ψ''⟩ = ⟨∇_ψ ψ', ψ''⟩ + K(ψ, ψ', ψ'')`.
    pub fn add_tensor(&self, k: &FrameTensor, provenance: Provenance) -> GenConnection {
        let r = self.rank();
        let n = self.dim();
        let gamma = (0..r * r * r)
            .map(|i| {
                let (c, a, b) = (i / (r * r), (i / r) % r, i % r);
                &self.gamma[i] + k.get(&[a, b, dual(c, n)])
            })
            .collect();
        GenConnection {
            frame: self.frame.clone(),
            gamma,
            provenance,
        }
    }

    /// `∇_ψ ψ'` by Leibniz expansion.
    pub fn nabla(&self, p: &[Expr], q: &[Expr], d: &mut Differentiator) -> Vec<Expr> {
        let r = self.rank();
        (0..r)
            .map(|c| {
                let mut t = vec![self.frame.rho_section(p, &q[c], d)];
                for a in 0..r {
                    if p[a].is_zero() {
                        continue;
                    }
                    for b in 0..r {
                        let g = self.gamma(c, a, b);
                        if !q[b].is_zero() && !g.is_zero() {
                            t.push(&p[a] * &q[b] * g);
                        }
                    }
                }
                Expr::sum(t)
            })
            .collect()
    }

    /// Residual of pairing compatibility, `Γ_{ABC} + Γ_{ACB}`.
    pub fn pairing_residual(&self) -> Result<Residual> {
        let r = self.rank();
        let mut res = Vec::new();
        for a in 0..r {
            for b in 0..r {
                for c in b..r {
                    res.push(self.lowered(a, b, c) + self.lowered(a, c, b));
                }
            }
        }
        max_abs(&res, &self.frame.chart().sample_points())
    }

    /// Residual of `∇𝐆 = 0` for a fiber metric given as a row-major matrix:
    /// `ρ_A 𝐆_{BC} - Γ^D_{AB} 𝐆_{DC} - Γ^D_{AC} 𝐆_{BD}`.
    pub fn metric_residual(&self, gm: &[Expr]) -> Result<Residual> {
        let r = self.rank();
        let mut d = Differentiator::new();
        let mut res = Vec::new();
        for a in 0..r {
            for b in 0..r {
                for c in b..r {
                    let mut t = vec![self.frame.rho(a, &gm[b * r + c], &mut d)];
                    for e in 0..r {
                        t.push(-(self.gamma(e, a, b) * &gm[e * r + c]));
                        t.push(-(self.gamma(e, a, c) * &gm[b * r + e]));
                    }
                    res.push(Expr::sum(t));
                }
            }
        }
        max_abs(&res, &self.frame.chart().sample_points())
    }

    /// Gualtieri torsion 3-form
    /// `T_{ABC} = Γ_{ABC} - Γ_{BAC} - c_{ABC} + Γ_{CAB}`.
    pub fn torsion(&self) -> FrameTensor {
        FrameTensor::from_fn(self.frame.chart().clone(), 3, |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            self.lowered(a, b, c) - self.lowered(b, a, c) - self.frame.c_lower(a, b, c) + self.lowered(c, a, b)
        })
    }

    /// `Div(ψ) = ⟨ψ^λ, ∇_{e_λ} ψ⟩ = Σ_λ [ρ_λ ψ^λ + ψ^B Γ^λ_{λB}]`.
    pub fn divergence(&self, psi: &[Expr], d: &mut Differentiator) -> Expr {
        let r = self.rank();
        let mut t = Vec::new();
        for l in 0..r {
            t.push(self.frame.rho(l, &psi[l], d));
            for (b, p) in psi.iter().enumerate() {
                if !p.is_zero() {
                    t.push(p * self.gamma(l, l, b));
                }
            }
        }
        Expr::sum(t)
    }

    /// Characteristic vector field `X^μ = Div(𝒟x^μ)`.
    pub fn characteristic_vector_field(&self) -> TensorField {
        let chart = self.frame.chart().clone();
        let mut d = Differentiator::new();
        TensorField::from_fn(chart.clone(), vec![Variance::Up], |i| {
            let psi = self.frame.d_op(&chart.coord(i[0]), &mut d);
            self.divergence(&psi, &mut d)
        })
    }

    /// `V^{μνσ} = ⟨∇_{ρ*dx^μ} ρ*dx^ν, ρ*dx^σ⟩`.
    pub fn v_tensor(&self) -> TensorField {
        let chart = self.frame.chart().clone();
        let n = chart.dim();
        let basis: Vec<Vec<Expr>> = (0..n)
            .map(|mu| {
                let e: Vec<Expr> = (0..n).map(|k| if k == mu { Expr::one() } else { Expr::zero() }).collect();
                self.frame.rho_star(&e)
            })
            .collect();
        let mut d = Differentiator::new();
        let nab: Vec<Vec<Vec<Expr>>> = (0..n)
            .map(|mu| (0..n).map(|nu| self.nabla(&basis[mu], &basis[nu], &mut d)).collect())
            .collect();
        TensorField::from_fn(chart, vec![Variance::Up; 3], |i| {
            self.frame.pairing(&nab[i[0]][i[1]], &basis[i[2]])
        })
    }

    /// `w_m = V^{klj} (h⁻¹)_{kl} (h⁻¹)_{mj}` for a fiber metric `h` on `T*M`,
    /// passed as its inverse `h⁻¹` (a (0,2) field).
    pub fn v_trace(&self, h_inv: &TensorField) -> TensorField {
        let v = self.v_tensor();
        let n = self.dim();
        TensorField::from_fn(v.chart().clone(), vec![Variance::Down], |i| {
            let m = i[0];
            let mut t = Vec::new();
            for k in 0..n {
                for l in 0..n {
                    for j in 0..n {
                        t.push(v.get(&[k, l, j]) * h_inv.get(&[k, l]) * h_inv.get(&[m, j]));
                    }
                }
            }
            Expr::sum(t)
        })
    }

    /// The connection `∇'_{ψ} ψ' = F⁻¹ ∇_{Fψ} Fψ'` on the algebroid pulled
    /// back along `F: E' → E` (see [`CourantFrame::transport`]):
    /// `Γ'^C_{AB} = (F⁻¹)^C_E [F^D_A ρ_D(F^E_B) + F^D_A F^G_B Γ^E_{DG}]`.
    pub fn transport(&self, f: &[Expr], f_inv: &[Expr]) -> GenConnection {
        let r = self.rank();
        let mut d = Differentiator::new();
        let frame = Arc::new(self.frame.transport(f, f_inv));
        let mut inner = vec![Expr::zero(); r * r * r];
        for a in 0..r {
            let col_a: Vec<Expr> = (0..r).map(|e| f[e * r + a].clone()).collect();
            for b in 0..r {
                let col_b: Vec<Expr> = (0..r).map(|e| f[e * r + b].clone()).collect();
                let v = self.nabla(&col_a, &col_b, &mut d);
                for (e, ve) in v.into_iter().enumerate() {
                    inner[(e * r + a) * r + b] = ve;
                }
            }
        }
        let gamma = (0..r * r * r)
            .map(|i| {
                let (c, ab) = (i / (r * r), i % (r * r));
                Expr::sum(
                    (0..r)
                        .filter(|&e| !f_inv[c * r + e].is_zero())
                        .map(|e| &f_inv[c * r + e] * &inner[e * r * r + ab])
                        .collect(),
                )
            })
            .collect();
        GenConnection {
            frame,
            gamma,
            provenance: self.provenance,
        }
    }

    /// Largest coefficient difference to another connection on the same frame.
    pub fn difference(&self, o: &GenConnection) -> Result<Residual> {
        let diff: Vec<Expr> = self.gamma.iter().zip(&o.gamma).map(|(a, b)| a - b).collect();
        max_abs(&diff, &self.frame.chart().sample_points())
    }
}
