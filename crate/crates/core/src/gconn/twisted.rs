//! Levi-Civita connections on `TM ⊕ T*M` with the `H'`-twisted Dorfman
//! bracket and the block-diagonal generalized metric `𝓖 = diag(g, g⁻¹)`.
//!
//! A pair `(g, B)` with twist `H` is brought to this picture by `e^B`, which
//! maps the `(H + dB)`-twisted algebroid onto the `H`-twisted one; see
//! [`twist`] and [`untwist`].

use super::connection::{GenConnection, Provenance};
use super::frame::{dual, CourantFrame, FrameTensor};
use crate::check::max_abs;
use crate::error::{Error, Result};
use crate::expr::{Differentiator, Expr};
use crate::gtb::{b_twist_matrix, check_positive_definite, Dorfman};
use crate::riemann::Riemannian;
use crate::tensor::{exterior_derivative, multi_indices, TensorField, Variance};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// Tolerance of the `reject` policy for the cyclic constraint.
pub const CYCLIC_TOL: f64 = 1e-10;

/// What [`validate_params`] does with a tensor whose cyclic sum is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    #[default]
    Reject,
    /// Replace `T` by `T - Alt(T)`.
    Project,
}

/// The tensors `J ∈ 𝔛 ⊗ 𝔛²` and `W ∈ Ω¹ ⊗ Ω²` labelling the Levi-Civita
/// connections, both skew in their last two slots with vanishing cyclic sum.
#[derive(Debug, Clone)]
pub struct ConnParams {
    j: TensorField,
    w: TensorField,
}

fn cyclic_checked(t: &TensorField, policy: Policy) -> Result<TensorField> {
    t.check_antisymmetric(&[1, 2], 1e-12)?;
    // For a tensor skew in its last two slots the cyclic sum is 3·Alt.
    let alt = t.antisymmetrize(&[0, 1, 2])?;
    let cyc = 3.0 * alt.max_abs()?;
    if cyc <= CYCLIC_TOL {
        return Ok(t.clone());
    }
    match policy {
        Policy::Reject => Err(Error::CyclicViolation(cyc)),
        Policy::Project => t.sub(&alt),
    }
}

pub fn validate_params(j: &TensorField, w: &TensorField, policy: Policy) -> Result<ConnParams> {
    if j.slots() != [Variance::Up; 3] || w.slots() != [Variance::Down; 3] {
        return Err(Error::VarianceMismatch("J must be (3,0) and W must be (0,3)".into()));
    }
    Ok(ConnParams {
        j: cyclic_checked(j, policy)?,
        w: cyclic_checked(w, policy)?,
    })
}

impl ConnParams {
    pub fn zero(chart: Arc<crate::Chart>) -> Self {
        ConnParams {
            j: TensorField::zeros(chart.clone(), vec![Variance::Up; 3]),
            w: TensorField::zeros(chart, vec![Variance::Down; 3]),
        }
    }

    pub fn j(&self) -> &TensorField {
        &self.j
    }

    pub fn w(&self) -> &TensorField {
        &self.w
    }

    /// `J'^m = J^{klm} g_{lk}`.
    pub fn j_trace(&self, g: &TensorField) -> TensorField {
        let n = g.dim();
        TensorField::from_fn(g.chart().clone(), vec![Variance::Up], |i| {
            Expr::sum(multi_indices(n, 2).map(|kl| self.j.get(&[kl[0], kl[1], i[0]]) * g.get(&kl)).collect())
        })
    }

    /// `W'_m = W_{klm} g^{lk}`.
    pub fn w_trace(&self, g_inv: &TensorField) -> TensorField {
        let n = g_inv.dim();
        TensorField::from_fn(g_inv.chart().clone(), vec![Variance::Down], |i| {
            Expr::sum(
                multi_indices(n, 2)
                    .map(|kl| self.w.get(&[kl[0], kl[1], i[0]]) * g_inv.get(&kl))
                    .collect(),
            )
        })
    }
}

/// `t(u, v, w)` for a rank-3 field and three component vectors.
fn fill3(t: &TensorField, u: &[Expr], v: &[Expr], w: &[Expr]) -> Expr {
    let n = t.dim();
    let mut terms = Vec::new();
    for i in (0..n).filter(|&i| !u[i].is_zero()) {
        for j in (0..n).filter(|&j| !v[j].is_zero()) {
            for k in (0..n).filter(|&k| !w[k].is_zero()) {
                let c = t.get(&[i, j, k]);
                if !c.is_zero() {
                    terms.push(c * &u[i] * &v[j] * &w[k]);
                }
            }
        }
    }
    Expr::sum(terms)
}

/// Per frame vector `e_A = (X, ξ)`: `X`, `g⁻¹ξ`, `ξ` and `gX`.
struct Parts {
    p: Vec<Vec<Expr>>,
    q: Vec<Vec<Expr>>,
    f: Vec<Vec<Expr>>,
    gp: Vec<Vec<Expr>>,
}

/// The twisted picture `(g, H')`.
#[derive(Clone)]
pub struct TwistedPicture {
    metric: Arc<Riemannian>,
    h_prime: TensorField,
    frame: Arc<CourantFrame>,
}

impl TwistedPicture {
    /// Checks that `g` is positive definite and `H'` closed.
    pub fn new(g: &TensorField, h_prime: &TensorField) -> Result<Self> {
        check_positive_definite(g)?;
        let metric = Riemannian::new(g)?;
        let dorfman = Dorfman::new(h_prime.clone())?;
        Ok(TwistedPicture {
            metric: Arc::new(metric),
            h_prime: h_prime.clone(),
            frame: Arc::new(CourantFrame::dorfman(&dorfman)),
        })
    }

    /// `H' = H + dB`.
    pub fn from_background(g: &TensorField, b: &TensorField, h: &TensorField) -> Result<Self> {
        let hp = h.add(&exterior_derivative(b)?)?;
        TwistedPicture::new(g, &hp)
    }

    pub fn metric(&self) -> &Riemannian {
        &self.metric
    }

    pub fn h_prime(&self) -> &TensorField {
        &self.h_prime
    }

    pub fn frame(&self) -> &Arc<CourantFrame> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn block(&self, upper: &TensorField, lower: &TensorField) -> Vec<Expr> {
        let n = self.dim();
        let r = 2 * n;
        let mut m = vec![Expr::zero(); r * r];
        for i in 0..n {
            for j in 0..n {
                m[i * r + j] = upper.get(&[i, j]).clone();
                m[(n + i) * r + n + j] = lower.get(&[i, j]).clone();
            }
        }
        m
    }

    /// `𝓖 = diag(g, g⁻¹)`, row-major `2n×2n`.
    pub fn generalized_metric(&self) -> Vec<Expr> {
        self.block(self.metric.metric(), self.metric.inverse())
    }

    pub fn generalized_metric_inverse(&self) -> Vec<Expr> {
        self.block(self.metric.inverse(), self.metric.metric())
    }

    /// Columns `Ψ⁰±(∂_μ) = (∂_μ, ±g(∂_μ))`, row-major `2n×n`.
    pub fn psi_matrix(&self, sign: f64) -> Vec<Expr> {
        let n = self.dim();
        let g = self.metric.metric();
        let mut m = vec![Expr::zero(); 2 * n * n];
        for mu in 0..n {
            m[mu * n + mu] = Expr::one();
            for k in 0..n {
                m[(n + k) * n + mu] = sign * g.get(&[k, mu]);
            }
        }
        m
    }

    fn parts(&self) -> Parts {
        let n = self.dim();
        let g = self.metric.metric();
        let gi = self.metric.inverse();
        let unit = |i: usize| -> Vec<Expr> { (0..n).map(|k| if k == i { Expr::one() } else { Expr::zero() }).collect() };
        let zero = || vec![Expr::zero(); n];
        let mut parts = Parts {
            p: Vec::new(),
            q: Vec::new(),
            f: Vec::new(),
            gp: Vec::new(),
        };
        for a in 0..2 * n {
            if a < n {
                parts.p.push(unit(a));
                parts.q.push(zero());
                parts.f.push(zero());
                parts.gp.push((0..n).map(|k| g.get(&[a, k]).clone()).collect());
            } else {
                let m = a - n;
                parts.p.push(zero());
                parts.q.push((0..n).map(|k| gi.get(&[m, k]).clone()).collect());
                parts.f.push(unit(m));
                parts.gp.push(zero());
            }
        }
        parts
    }

    /// `∇̂^{LC}_{(X,ξ)} = diag(∇^{LC}_X, ∇^{LC}_X)`.
    pub fn lc_block(&self) -> GenConnection {
        let n = self.dim();
        let r = 2 * n;
        let mut gamma = vec![Expr::zero(); r * r * r];
        for idx in multi_indices(n, 3) {
            let (rho, mu, nu) = (idx[0], idx[1], idx[2]);
            let ch = self.metric.gamma(rho, mu, nu);
            gamma[(rho * r + mu) * r + nu] = ch.clone();
            // ∇_μ dx^ν = -Γ^ν_{μρ} dx^ρ
            gamma[((n + rho) * r + mu) * r + n + nu] = -self.metric.gamma(nu, mu, rho);
        }
        GenConnection::new(self.frame.clone(), gamma, Provenance::Custom).expect("coefficient count")
    }

    /// The correction `𝓗` that turns `∇̂^{LC}` into the minimal connection,
    /// `𝓗 = ⅙H'(g⁻¹ξ, Y, g⁻¹ζ) + ⅙H'(g⁻¹ξ, g⁻¹η, Z) - ⅓H'(X, Y, Z)
    ///  - ⅓H'(X, g⁻¹η, g⁻¹ζ)`.
    pub fn h_tensor(&self) -> FrameTensor {
        let s = self.parts();
        let h = &self.h_prime;
        FrameTensor::from_fn(self.frame.chart().clone(), 3, |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            Expr::sum(vec![
                fill3(h, &s.q[a], &s.p[b], &s.q[c]) * (1.0 / 6.0),
                fill3(h, &s.q[a], &s.q[b], &s.p[c]) * (1.0 / 6.0),
                fill3(h, &s.p[a], &s.p[b], &s.p[c]) * (-1.0 / 3.0),
                fill3(h, &s.p[a], &s.q[b], &s.q[c]) * (-1.0 / 3.0),
            ])
        })
    }

    /// The minimal Levi-Civita connection `∇̂⁰ = ∇̂^{LC} + η⁻¹𝓗`.
    pub fn minimal(&self) -> GenConnection {
        self.lc_block().add_tensor(&self.h_tensor(), Provenance::Minimal)
    }

    /// The eight-term tensor `𝒦` built from `(J, W)`.
    pub fn k_tensor(&self, params: &ConnParams) -> FrameTensor {
        let s = self.parts();
        let (j, w) = (&params.j, &params.w);
        FrameTensor::from_fn(self.frame.chart().clone(), 3, |i| {
            let (a, b, c) = (i[0], i[1], i[2]);
            Expr::sum(vec![
                fill3(w, &s.q[a], &s.p[b], &s.p[c]),
                fill3(w, &s.p[a], &s.q[b], &s.p[c]),
                fill3(w, &s.p[a], &s.p[b], &s.q[c]),
                fill3(w, &s.q[a], &s.q[b], &s.q[c]),
                -fill3(j, &s.gp[a], &s.f[b], &s.f[c]),
                -fill3(j, &s.f[a], &s.gp[b], &s.f[c]),
                -fill3(j, &s.f[a], &s.f[b], &s.gp[c]),
                -fill3(j, &s.gp[a], &s.gp[b], &s.gp[c]),
            ])
        })
    }

    /// `∇̂ = ∇̂⁰ + η⁻¹𝒦(J, W)`.
    pub fn with_params(&self, params: &ConnParams) -> GenConnection {
        let k = self.k_tensor(params);
        self.minimal().add_tensor(&k, Provenance::Params)
    }

    /// `J = 0` and `W(X,Y,Z) = (g(X,Y) dφ(Z) - g(X,Z) dφ(Y)) / (n - 1)`,
    /// normalized so that `W' = dφ`.
    pub fn dilaton_params(&self, phi: &Expr) -> Result<ConnParams> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::Invalid("the dilaton connection needs n >= 2".into()));
        }
        let g = self.metric.metric();
        let mut d = Differentiator::new();
        let dphi: Vec<Expr> = (0..n).map(|m| d.diff(phi, m)).collect();
        let c = 1.0 / (n as f64 - 1.0);
        let w = TensorField::from_fn(g.chart().clone(), vec![Variance::Down; 3], |i| {
            let (k, l, m) = (i[0], i[1], i[2]);
            c * (g.get(&[k, l]) * &dphi[m] - g.get(&[k, m]) * &dphi[l])
        });
        Ok(ConnParams {
            j: TensorField::zeros(g.chart().clone(), vec![Variance::Up; 3]),
            w,
        })
    }

    pub fn dilaton(&self, phi: &Expr) -> Result<GenConnection> {
        Ok(self.with_params(&self.dilaton_params(phi)?))
    }

    /// Residual of the three conditions on `𝓗` (or any tensor `K`):
    /// skew in the last pair, `τ`-compatibility, and
    /// `K + cyclic + H'(ρ·, ρ·, ρ·) = 0` when `with_h` is set.
    pub fn tensor_conditions(&self, k: &FrameTensor, with_h: bool) -> Result<[f64; 3]> {
        let n = self.dim();
        let r = 2 * n;
        let gm = self.generalized_metric();
        // τ(e_C) = η⁻¹𝓖 e_C has components 𝓖_{dual(D), C}.
        let tau = |c: usize| -> Vec<Expr> { (0..r).map(|dd| gm[dual(dd, n) * r + c].clone()).collect() };
        let unit = |c: usize| -> Vec<Expr> { (0..r).map(|k| if k == c { Expr::one() } else { Expr::zero() }).collect() };
        let (mut c1, mut c2, mut c3) = (Vec::new(), Vec::new(), Vec::new());
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    c1.push(k.get(&[a, b, c]) + k.get(&[a, c, b]));
                    let (ea, eb, ec) = (unit(a), unit(b), unit(c));
                    c2.push(k.apply(&[&ea, &eb, &tau(c)]) + k.apply(&[&ea, &ec, &tau(b)]));
                    let mut s = k.get(&[a, b, c]) + k.get(&[b, c, a]) + k.get(&[c, a, b]);
                    if with_h && a < n && b < n && c < n {
                        s = s + self.h_prime.get(&[a, b, c]);
                    }
                    c3.push(s);
                }
            }
        }
        let pts = self.frame.chart().sample_points();
        Ok([
            max_abs(&c1, &pts)?.value,
            max_abs(&c2, &pts)?.value,
            max_abs(&c3, &pts)?.value,
        ])
    }
}

/// The minimal connection for `(g, H')`.
pub fn minimal_connection(g: &TensorField, h_prime: &TensorField) -> Result<GenConnection> {
    Ok(TwistedPicture::new(g, h_prime)?.minimal())
}

/// Carries a connection on the `(H + dB)`-twisted algebroid to the
/// `H`-twisted one: `∇_ψ ψ' = e^B ∇̂_{e^{-B}ψ} e^{-B}ψ'`.
pub fn untwist(conn: &GenConnection, b: &TensorField) -> GenConnection {
    conn.transport(&b_twist_matrix(b, -1.0), &b_twist_matrix(b, 1.0))
}

/// Inverse of [`untwist`].
pub fn twist(conn: &GenConnection, b: &TensorField) -> GenConnection {
    conn.transport(&b_twist_matrix(b, 1.0), &b_twist_matrix(b, -1.0))
}
