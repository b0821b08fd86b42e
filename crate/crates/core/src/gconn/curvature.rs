//! Riemann tensor, Ricci tensor and scalars of a Courant algebroid
//! connection, with `R_{DCAB} = ⟨e_D, R(e_A, e_B) e_C⟩`.

use super::connection::GenConnection;
use super::frame::{dual, FrameTensor};
use crate::expr::{Differentiator, Expr};
use crate::tensor::{TensorField, Variance};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct GenCurvature {
    pub riemann: FrameTensor,
    pub ricci: FrameTensor,
}

impl GenConnection {
    /// The tensor `R`, the average
    /// `½(R⁰_{DCAB} + R⁰_{BACD} + η^{λκ} Γ_{λAB} Γ_{κCD})` of the naive curvature
    /// `R⁰(ψ,ψ')φ = ∇_ψ∇_{ψ'}φ - ∇_{ψ'}∇_ψφ - ∇_{[ψ,ψ']}φ`.
    pub fn riemann(&self) -> FrameTensor {
        let r = self.rank();
        let n = self.dim();
        let frame = self.frame();
        let mut d = Differentiator::new();
        // R0^E_{CAB}
        let mut r0 = vec![Expr::zero(); r * r * r * r];
        for e in 0..r {
            for c in 0..r {
                for a in 0..r {
                    for b in 0..r {
                        let mut t = vec![
                            frame.rho(a, self.gamma(e, b, c), &mut d),
                            -frame.rho(b, self.gamma(e, a, c), &mut d),
                        ];
                        for f in 0..r {
                            t.push(self.gamma(f, b, c) * self.gamma(e, a, f));
                            t.push(-(self.gamma(f, a, c) * self.gamma(e, b, f)));
                            let cf = frame.c(f, a, b);
                            if !cf.is_zero() {
                                t.push(-(cf * self.gamma(e, f, c)));
                            }
                        }
                        r0[((e * r + c) * r + a) * r + b] = Expr::sum(t);
                    }
                }
            }
        }
        let r0_low = |dd: usize, c: usize, a: usize, b: usize| &r0[((dual(dd, n) * r + c) * r + a) * r + b];
        FrameTensor::from_fn(frame.chart().clone(), 4, |i| {
            let (dd, c, a, b) = (i[0], i[1], i[2], i[3]);
            let mut t = vec![r0_low(dd, c, a, b).clone(), r0_low(b, a, c, dd).clone()];
            for l in 0..r {
                t.push(self.lowered(l, a, b) * self.lowered(dual(l, n), c, dd));
            }
            0.5 * Expr::sum(t)
        })
    }

    /// `Ric_{AB} = η^{λκ} R_{κAλB}`.
    pub fn ricci_from(&self, riemann: &FrameTensor) -> FrameTensor {
        let r = self.rank();
        let n = self.dim();
        FrameTensor::from_fn(riemann.chart().clone(), 2, |i| {
            Expr::sum((0..r).map(|l| riemann.get(&[dual(l, n), i[0], l, i[1]]).clone()).collect())
        })
    }

    pub fn curvature(&self) -> GenCurvature {
        let riemann = self.riemann();
        let ricci = self.ricci_from(&riemann);
        GenCurvature { riemann, ricci }
    }

    /// `∇T` for a covariant frame tensor, derivative slot first:
    /// `(∇_A T)_{B..} = ρ_A T_{B..} - Σ_i Γ^E_{A B_i} T_{..E..}`.
    pub fn covariant_derivative(&self, t: &FrameTensor) -> FrameTensor {
        let r = self.rank();
        let frame = self.frame();
        let mut d = Differentiator::new();
        FrameTensor::from_fn(t.chart().clone(), t.rank() + 1, |idx| {
            let a = idx[0];
            let rest = &idx[1..];
            let mut terms = vec![frame.rho(a, t.get(rest), &mut d)];
            let mut src = rest.to_vec();
            for s in 0..rest.len() {
                for e in 0..r {
                    let g = self.gamma(e, a, rest[s]);
                    if g.is_zero() {
                        continue;
                    }
                    src[s] = e;
                    terms.push(-(g * t.get(&src)));
                }
                src[s] = rest[s];
            }
            Expr::sum(terms)
        })
    }

    /// Left side minus right side of the algebraic Bianchi identity paired
    /// with `e_D`, at index `[D, A, B, C]`:
    /// `R_{DCAB} + R_{DABC} + R_{DBCA}
    ///  - ½{Σ_cyc[(∇_A T)_{BCD} - η^{EF} T_{BCF} T_{AED}] - (∇_D T)_{ABC}}`.
    pub fn bianchi_residual(&self, riemann: &FrameTensor) -> FrameTensor {
        let r = self.rank();
        let n = self.dim();
        let t = self.torsion();
        let nt = self.covariant_derivative(&t);
        FrameTensor::from_fn(riemann.chart().clone(), 4, |i| {
            let (dd, a, b, c) = (i[0], i[1], i[2], i[3]);
            let lhs = riemann.get(&[dd, c, a, b]) + riemann.get(&[dd, a, b, c]) + riemann.get(&[dd, b, c, a]);
            let mut rhs = Vec::new();
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                rhs.push(nt.get(&[x, y, z, dd]).clone());
                for e in 0..r {
                    rhs.push(-(t.get(&[y, z, dual(e, n)]) * t.get(&[x, e, dd])));
                }
            }
            rhs.push(-nt.get(&[dd, a, b, c]));
            lhs - 0.5 * Expr::sum(rhs)
        })
    }
}

/// `𝓡_E = η^{λκ} Ric_{κλ}`.
pub fn scalar_e(ricci: &FrameTensor) -> Expr {
    let r = ricci.fiber_dim();
    let n = r / 2;
    Expr::sum((0..r).map(|l| ricci.get(&[dual(l, n), l]).clone()).collect())
}

/// `𝓡_𝐆 = (𝐆⁻¹)^{λκ} Ric_{κλ}` for the inverse fiber metric, row-major.
pub fn scalar_g(ricci: &FrameTensor, g_inv: &[Expr]) -> Expr {
    let r = ricci.fiber_dim();
    let mut t = Vec::new();
    for l in 0..r {
        for k in 0..r {
            let gi = &g_inv[l * r + k];
            if !gi.is_zero() {
                t.push(gi * ricci.get(&[k, l]));
            }
        }
    }
    Expr::sum(t)
}

/// `(X, Y) ↦ T(P X, Q Y)` for frame maps `P, Q: TM → E` given as row-major
/// `2n×n` matrices.
pub fn restrict2(t: &FrameTensor, p: &[Expr], q: &[Expr]) -> TensorField {
    let r = t.fiber_dim();
    let n = r / 2;
    TensorField::from_fn(t.chart().clone(), vec![Variance::Down; 2], |i| {
        let mut terms = Vec::new();
        for a in 0..r {
            let pa = &p[a * n + i[0]];
            if pa.is_zero() {
                continue;
            }
            for b in 0..r {
                let qb = &q[b * n + i[1]];
                if !qb.is_zero() {
                    terms.push(pa * qb * t.get(&[a, b]));
                }
            }
        }
        Expr::sum(terms)
    })
}
