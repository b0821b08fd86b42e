//! The generalized tangent bundle `TM ⊕ T*M`.
//!
//! A section is a pair `(X, ξ)`. A 2-form `B` acts as a map by filling its
//! second slot, `B(X) = B(·, X)`, so in components `B(X)_μ = B_{μν} X^ν`;
//! bivectors act the same way, `θ(ξ)^μ = θ^{μν} ξ_ν`. The pairing is
//! `⟨(X,ξ),(Y,η)⟩ = η(X) + ξ(Y)` and the `H`-twisted Dorfman bracket is
//! `[(X,ξ),(Y,η)] = ([X,Y], L_X η - i_Y dξ - H(X,Y,·))`.
//!
//! Components of sections in the frame `{(∂_μ,0)} ∪ {(0,dx^μ)}` are laid out
//! as `[X^0..X^{n-1}, ξ_0..ξ_{n-1}]`.

use crate::chart::Chart;
use crate::check::{max_abs, Residual};
use crate::error::{Error, Result};
use crate::expr::{Differentiator, Expr, Tape};
use crate::linalg;
use crate::tensor::{exterior_derivative, metric_inverse, multi_indices, TensorField, Variance};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// Tolerance for the closedness check on the twisting 3-form.
pub const CLOSED_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GenSection {
    chart: Arc<Chart>,
    x: Vec<Expr>,
    xi: Vec<Expr>,
}

impl GenSection {
    pub fn new(chart: Arc<Chart>, x: Vec<Expr>, xi: Vec<Expr>) -> Result<Self> {
        let n = chart.dim();
        if x.len() != n || xi.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "section parts have lengths {} and {}, chart dimension is {n}",
                x.len(),
                xi.len()
            )));
        }
        Ok(GenSection { chart, x, xi })
    }

    pub fn zero(chart: Arc<Chart>) -> Self {
        let n = chart.dim();
        GenSection {
            chart,
            x: vec![Expr::zero(); n],
            xi: vec![Expr::zero(); n],
        }
    }

    pub fn from_components(chart: Arc<Chart>, c: &[Expr]) -> Result<Self> {
        let n = chart.dim();
        if c.len() != 2 * n {
            return Err(Error::DimensionMismatch(format!("{} components for rank {}", c.len(), 2 * n)));
        }
        Ok(GenSection {
            chart,
            x: c[..n].to_vec(),
            xi: c[n..].to_vec(),
        })
    }

    /// Frame vector `e_a`.
    pub fn frame(chart: Arc<Chart>, a: usize) -> Self {
        let n = chart.dim();
        let c: Vec<Expr> = (0..2 * n).map(|k| if k == a { Expr::one() } else { Expr::zero() }).collect();
        GenSection::from_components(chart, &c).expect("frame index in range")
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn vector(&self) -> &[Expr] {
        &self.x
    }

    pub fn form(&self) -> &[Expr] {
        &self.xi
    }

    pub fn components(&self) -> Vec<Expr> {
        let mut c = self.x.clone();
        c.extend_from_slice(&self.xi);
        c
    }

    fn zip(&self, o: &GenSection, f: impl Fn(&Expr, &Expr) -> Expr) -> GenSection {
        GenSection {
            chart: self.chart.clone(),
            x: self.x.iter().zip(&o.x).map(|(a, b)| f(a, b)).collect(),
            xi: self.xi.iter().zip(&o.xi).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, o: &GenSection) -> GenSection {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &GenSection) -> GenSection {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, f: &Expr) -> GenSection {
        GenSection {
            chart: self.chart.clone(),
            x: self.x.iter().map(|a| a * f).collect(),
            xi: self.xi.iter().map(|a| a * f).collect(),
        }
    }

    /// Largest component magnitude over the chart's sample points.
    pub fn max_abs(&self) -> Result<Residual> {
        max_abs(&self.components(), &self.chart.sample_points())
    }
}

pub fn pairing(a: &GenSection, b: &GenSection) -> Expr {
    Expr::sum(
        a.x.iter()
            .zip(&b.xi)
            .chain(a.xi.iter().zip(&b.x))
            .map(|(u, v)| u * v)
            .collect(),
    )
}

/// `ρ(X, ξ) = X`.
pub fn anchor(a: &GenSection) -> Vec<Expr> {
    a.x.clone()
}

/// `ρ*(ξ) = (0, ξ)`.
pub fn rho_star(chart: Arc<Chart>, xi: &[Expr]) -> GenSection {
    let n = chart.dim();
    GenSection {
        chart,
        x: vec![Expr::zero(); n],
        xi: xi.to_vec(),
    }
}

/// `𝒟f = (0, df)`.
pub fn d_map(chart: Arc<Chart>, f: &Expr) -> GenSection {
    let xi = (0..chart.dim()).map(|i| f.diff(i)).collect::<Vec<_>>();
    rho_star(chart, &xi)
}

/// `X(f)`.
pub fn vector_apply(x: &[Expr], f: &Expr, d: &mut Differentiator) -> Expr {
    Expr::sum(
        x.iter()
            .enumerate()
            .filter(|(_, xi)| !xi.is_zero())
            .map(|(i, xi)| xi * d.diff(f, i))
            .collect(),
    )
}

/// Lie bracket of vector fields.
pub fn lie_bracket(x: &[Expr], y: &[Expr], d: &mut Differentiator) -> Vec<Expr> {
    (0..x.len())
        .map(|m| vector_apply(x, &y[m], d) - vector_apply(y, &x[m], d))
        .collect()
}

/// `(L_X η)_μ = X^ν ∂_ν η_μ + η_ν ∂_μ X^ν`.
pub fn lie_derivative_form(x: &[Expr], eta: &[Expr], d: &mut Differentiator) -> Vec<Expr> {
    (0..x.len())
        .map(|m| {
            let mut t = vec![vector_apply(x, &eta[m], d)];
            t.extend(eta.iter().enumerate().map(|(nu, e)| e * d.diff(&x[nu], m)));
            Expr::sum(t)
        })
        .collect()
}

/// `(i_Y dξ)_μ = Y^ν (∂_ν ξ_μ - ∂_μ ξ_ν)`.
pub fn interior_d_form(y: &[Expr], xi: &[Expr], d: &mut Differentiator) -> Vec<Expr> {
    (0..y.len())
        .map(|m| {
            Expr::sum(
                y.iter()
                    .enumerate()
                    .filter(|(_, yn)| !yn.is_zero())
                    .map(|(nu, yn)| yn * (d.diff(&xi[m], nu) - d.diff(&xi[nu], m)))
                    .collect(),
            )
        })
        .collect()
}

/// `T(X, Y, ·)` for a covariant 3-tensor.
pub fn fill_two(t: &TensorField, x: &[Expr], y: &[Expr]) -> Vec<Expr> {
    let n = t.dim();
    (0..n)
        .map(|k| {
            Expr::sum(
                multi_indices(n, 2)
                    .filter(|i| !x[i[0]].is_zero() && !y[i[1]].is_zero())
                    .map(|i| t.get(&[i[0], i[1], k]) * &x[i[0]] * &y[i[1]])
                    .collect(),
            )
        })
        .collect()
}

/// Contraction `M v` of a row-major `n×n` matrix of expressions.
pub fn mat_vec(m: &[Expr], v: &[Expr]) -> Vec<Expr> {
    let n = v.len();
    (0..n)
        .map(|i| Expr::sum((0..n).map(|j| &m[i * n + j] * &v[j]).collect()))
        .collect()
}

/// The `H`-twisted Dorfman bracket for a closed 3-form `H`.
#[derive(Debug, Clone)]
pub struct Dorfman {
    h: TensorField,
}

impl Dorfman {
    /// Checks that `H` is a 3-form and that `dH` vanishes at the sample
    /// points to within [`CLOSED_TOL`].
    pub fn new(h: TensorField) -> Result<Self> {
        if h.slots() != [Variance::Down; 3] {
            return Err(Error::VarianceMismatch("H must be a (0,3) field".into()));
        }
        h.check_antisymmetric(&[0, 1, 2], 1e-12)?;
        let dh = exterior_derivative(&h)?;
        let r = max_abs(dh.components(), &h.chart().sample_points())?;
        if r.value > CLOSED_TOL {
            return Err(Error::NotClosed(r.value));
        }
        Ok(Dorfman { h })
    }

    /// Twist `H = dB₀`, closed by construction.
    pub fn from_potential(b0: &TensorField) -> Result<Self> {
        b0.check_antisymmetric(&[0, 1], 1e-12)?;
        Ok(Dorfman {
            h: exterior_derivative(b0)?,
        })
    }

    pub fn untwisted(chart: Arc<Chart>) -> Self {
        Dorfman {
            h: TensorField::zeros(chart, vec![Variance::Down; 3]),
        }
    }

    pub fn h(&self) -> &TensorField {
        &self.h
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.h.chart()
    }

    pub fn bracket(&self, a: &GenSection, b: &GenSection) -> GenSection {
        let mut d = Differentiator::new();
        self.bracket_with(a, b, &mut d)
    }

    pub fn bracket_with(&self, a: &GenSection, b: &GenSection, d: &mut Differentiator) -> GenSection {
        let x = lie_bracket(&a.x, &b.x, d);
        let l = lie_derivative_form(&a.x, &b.xi, d);
        let i = interior_d_form(&b.x, &a.xi, d);
        let h = fill_two(&self.h, &a.x, &b.x);
        let xi = (0..a.dim()).map(|m| &l[m] - &i[m] - &h[m]).collect();
        GenSection {
            chart: a.chart.clone(),
            x,
            xi,
        }
    }
}

/// `e^B(X, ξ) = (X, ξ + B(X))`.
pub fn b_twist(a: &GenSection, b: &TensorField) -> GenSection {
    let bx = mat_vec(b.components(), &a.x);
    GenSection {
        chart: a.chart.clone(),
        x: a.x.clone(),
        xi: a.xi.iter().zip(&bx).map(|(u, v)| u + v).collect(),
    }
}

/// Matrix of `e^{sB}` acting on frame components, row-major `2n×2n`.
pub fn b_twist_matrix(b: &TensorField, s: f64) -> Vec<Expr> {
    let n = b.dim();
    let mut m = linalg::identity(2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(n + i) * 2 * n + j] = s * b.get(&[i, j]);
        }
    }
    m
}

/// Canonical pairing in the coordinate frame, `[[0, I], [I, 0]]`.
pub fn eta(n: usize) -> Vec<Expr> {
    let r = 2 * n;
    (0..r * r)
        .map(|k| {
            let (a, b) = (k / r, k % r);
            if a + n == b || b + n == a {
                Expr::one()
            } else {
                Expr::zero()
            }
        })
        .collect()
}

/// Generalized metric `𝐆(g, B)`.
#[derive(Debug, Clone)]
pub struct GeneralizedMetric {
    g: TensorField,
    b: TensorField,
    g_inv: TensorField,
}

impl GeneralizedMetric {
    pub fn new(g: &TensorField, b: &TensorField) -> Result<Self> {
        if g.slots() != [Variance::Down; 2] || b.slots() != [Variance::Down; 2] {
            return Err(Error::VarianceMismatch("g and B must be (0,2) fields".into()));
        }
        g.check_symmetric(0, 1, 1e-12)?;
        b.check_antisymmetric(&[0, 1], 1e-12)?;
        check_positive_definite(g)?;
        Ok(GeneralizedMetric {
            g: g.clone(),
            b: b.clone(),
            g_inv: metric_inverse(g)?,
        })
    }

    pub fn g(&self) -> &TensorField {
        &self.g
    }

    pub fn b(&self) -> &TensorField {
        &self.b
    }

    pub fn g_inv(&self) -> &TensorField {
        &self.g_inv
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `[[g - B g⁻¹ B, B g⁻¹], [-g⁻¹ B, g⁻¹]]`, row-major `2n×2n`.
    pub fn block(&self) -> Vec<Expr> {
        let n = self.dim();
        let g = self.g.components();
        let b = self.b.components();
        let gi = self.g_inv.components();
        let bgi = linalg::matmul(b, gi, n, n, n);
        let gib = linalg::matmul(gi, b, n, n, n);
        let bgib = linalg::matmul(&bgi, b, n, n, n);
        let r = 2 * n;
        let mut m = vec![Expr::zero(); r * r];
        for i in 0..n {
            for j in 0..n {
                m[i * r + j] = &g[i * n + j] - &bgib[i * n + j];
                m[i * r + n + j] = bgi[i * n + j].clone();
                m[(n + i) * r + j] = -&gib[i * n + j];
                m[(n + i) * r + n + j] = gi[i * n + j].clone();
            }
        }
        m
    }

    /// `𝐆⁻¹ = η 𝐆 η`, using `𝐆 η 𝐆 = η`.
    pub fn inverse_block(&self) -> Vec<Expr> {
        let n = self.dim();
        let e = eta(n);
        let r = 2 * n;
        linalg::matmul(&linalg::matmul(&e, &self.block(), r, r, r), &e, r, r, r)
    }

    /// `τ = η⁻¹ 𝐆`, the involution with `±1` eigenbundles `V±`.
    pub fn tau(&self) -> Vec<Expr> {
        let r = 2 * self.dim();
        linalg::matmul(&eta(self.dim()), &self.block(), r, r, r)
    }

    pub fn eval(&self, a: &GenSection, b: &GenSection) -> Expr {
        let m = self.block();
        let (ca, cb) = (a.components(), b.components());
        let r = ca.len();
        Expr::sum(
            multi_indices(r, 2)
                .map(|i| &m[i[0] * r + i[1]] * &ca[i[0]] * &cb[i[1]])
                .collect(),
        )
    }

    /// `Ψ±(X) = (X, (±g + B)X)`.
    pub fn psi(&self, sign: f64, x: &[Expr]) -> GenSection {
        let gx = mat_vec(self.g.components(), x);
        let bx = mat_vec(self.b.components(), x);
        GenSection {
            chart: self.g.chart().clone(),
            x: x.to_vec(),
            xi: gx.iter().zip(&bx).map(|(u, v)| sign * u + v).collect(),
        }
    }

    /// Columns `Ψ±(∂_μ)` as a row-major `2n×n` matrix.
    pub fn psi_matrix(&self, sign: f64) -> Vec<Expr> {
        let n = self.dim();
        let mut m = vec![Expr::zero(); 2 * n * n];
        for mu in 0..n {
            let e: Vec<Expr> = (0..n).map(|k| if k == mu { Expr::one() } else { Expr::zero() }).collect();
            for (a, c) in self.psi(sign, &e).components().into_iter().enumerate() {
                m[a * n + mu] = c;
            }
        }
        m
    }

    /// `P± = ½(1 ± τ)`.
    pub fn projector(&self, sign: f64) -> Vec<Expr> {
        let r = 2 * self.dim();
        let t = self.tau();
        (0..r * r)
            .map(|k| {
                let id = if k / r == k % r { 0.5 } else { 0.0 };
                id + sign * 0.5 * &t[k]
            })
            .collect()
    }

    /// `h(ξ, η) = 𝐆(ρ*ξ, ρ*η)`, which is `g⁻¹`.
    pub fn h_form(&self) -> &TensorField {
        &self.g_inv
    }
}

pub(crate) fn check_positive_definite(g: &TensorField) -> Result<()> {
    let n = g.dim();
    let tape = Tape::compile(g.components());
    for p in g.chart().sample_points() {
        let v = tape.eval(&p)?;
        if !linalg::is_positive_definite(&v, n) {
            return Err(Error::NotPositiveDefinite { point: p });
        }
    }
    Ok(())
}

/// `𝓕_θ(X, ξ) = (θξ, ξ - BX)` for `θ = B⁻¹`.
#[derive(Debug, Clone)]
pub struct ThetaTwist {
    theta: TensorField,
    b: TensorField,
}

impl ThetaTwist {
    /// Builds `θ = B⁻¹` after checking that `n` is even and `B` is invertible
    /// at every sample point.
    pub fn from_b(b: &TensorField) -> Result<Self> {
        let n = b.dim();
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        b.check_antisymmetric(&[0, 1], 1e-12)?;
        let tape = Tape::compile(b.components());
        for p in b.chart().sample_points() {
            let d = linalg::num_det(&tape.eval(&p)?, n);
            if !(d.abs() >= 1e-10) {
                return Err(Error::SingularB { det: d, point: p });
            }
        }
        let (inv, _) = linalg::inverse(b.components(), n);
        Ok(ThetaTwist {
            theta: TensorField::new(b.chart().clone(), vec![Variance::Up; 2], inv)?,
            b: b.clone(),
        })
    }

    /// Uses a given `θ` after checking `θ ∘ B = id` at the sample points.
    pub fn new(theta: &TensorField, b: &TensorField) -> Result<Self> {
        let n = b.dim();
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        let prod = linalg::matmul(theta.components(), b.components(), n, n, n);
        let id = linalg::identity(n);
        let r = crate::check::max_abs_diff(&prod, &id, &b.chart().sample_points())?;
        if r.value > 1e-9 {
            return Err(Error::Invalid(format!("θ∘B differs from the identity by {:e}", r.value)));
        }
        Ok(ThetaTwist {
            theta: theta.clone(),
            b: b.clone(),
        })
    }

    pub fn theta(&self) -> &TensorField {
        &self.theta
    }

    pub fn b(&self) -> &TensorField {
        &self.b
    }

    pub fn apply(&self, a: &GenSection) -> GenSection {
        let tx = mat_vec(self.theta.components(), &a.xi);
        let bx = mat_vec(self.b.components(), &a.x);
        GenSection {
            chart: a.chart.clone(),
            x: tx,
            xi: a.xi.iter().zip(&bx).map(|(u, v)| u - v).collect(),
        }
    }

    /// `𝓕_θ⁻¹(X, ξ) = (X - θξ, BX)`.
    pub fn inverse(&self, a: &GenSection) -> GenSection {
        let tx = mat_vec(self.theta.components(), &a.xi);
        GenSection {
            chart: a.chart.clone(),
            x: a.x.iter().zip(&tx).map(|(u, v)| u - v).collect(),
            xi: mat_vec(self.b.components(), &a.x),
        }
    }

    /// Row-major `2n×2n` matrix of `𝓕_θ` on frame components.
    pub fn matrix(&self) -> Vec<Expr> {
        let n = self.b.dim();
        let r = 2 * n;
        let mut m = vec![Expr::zero(); r * r];
        for i in 0..n {
            for j in 0..n {
                m[i * r + n + j] = self.theta.get(&[i, j]).clone();
                m[(n + i) * r + j] = -self.b.get(&[i, j]);
            }
            m[(n + i) * r + n + i] = Expr::one();
        }
        m
    }

    pub fn inverse_matrix(&self) -> Vec<Expr> {
        let n = self.b.dim();
        let r = 2 * n;
        let mut m = vec![Expr::zero(); r * r];
        for i in 0..n {
            m[i * r + i] = Expr::one();
            for j in 0..n {
                m[i * r + n + j] = -self.theta.get(&[i, j]);
                m[(n + i) * r + j] = self.b.get(&[i, j]).clone();
            }
        }
        m
    }
}

/// `(d_θ f)_i = ⟨df, θ(dx^i)⟩ = θ^{μi} ∂_μ f`.
pub fn d_theta(f: &Expr, theta: &TensorField) -> Vec<Expr> {
    let n = theta.dim();
    let mut d = Differentiator::new();
    let df: Vec<Expr> = (0..n).map(|m| d.diff(f, m)).collect();
    (0..n)
        .map(|i| Expr::sum((0..n).map(|m| theta.get(&[m, i]) * &df[m]).collect()))
        .collect()
}

/// `{f, g}_θ = θ(df)(g) = θ^{μν} ∂_ν f ∂_μ g`, so that `[df, dg]_θ = d{f, g}_θ`.
pub fn poisson_bracket(f: &Expr, g: &Expr, theta: &TensorField) -> Expr {
    let n = theta.dim();
    let mut d = Differentiator::new();
    let df: Vec<Expr> = (0..n).map(|m| d.diff(f, m)).collect();
    let tdf = mat_vec(theta.components(), &df);
    vector_apply(&tdf, g, &mut d)
}

/// Twisted Koszul bracket of 1-forms,
/// `[ξ, η]_θ = L_{θξ} η - i_{θη} dξ + H(θξ, θη, ·)`.
pub fn koszul(xi: &[Expr], eta: &[Expr], theta: &TensorField, twist: Option<&TensorField>) -> Vec<Expr> {
    let mut d = Differentiator::new();
    koszul_with(xi, eta, theta, twist, &mut d)
}

pub(crate) fn koszul_with(
    xi: &[Expr],
    eta: &[Expr],
    theta: &TensorField,
    twist: Option<&TensorField>,
    d: &mut Differentiator,
) -> Vec<Expr> {
    let txi = mat_vec(theta.components(), xi);
    let teta = mat_vec(theta.components(), eta);
    let l = lie_derivative_form(&txi, eta, d);
    let i = interior_d_form(&teta, xi, d);
    let mut out: Vec<Expr> = l.iter().zip(&i).map(|(a, b)| a - b).collect();
    if let Some(h) = twist {
        let hv = fill_two(h, &txi, &teta);
        out = out.iter().zip(&hv).map(|(a, b)| a + b).collect();
    }
    out
}

/// Fully contravariant `T(θ·, ..., θ·)` of a covariant tensor.
pub fn theta_pullback(t: &TensorField, theta: &TensorField) -> TensorField {
    let n = t.dim();
    let mut out = t.clone();
    for s in 0..t.rank() {
        // Raising with θ^T: (θ dx^i)^a = θ^{ai}.
        out = TensorField::from_fn(t.chart().clone(), out.slots().to_vec(), |idx| {
            Expr::sum(
                (0..n)
                    .map(|a| {
                        let mut src = idx.to_vec();
                        src[s] = a;
                        theta.get(&[a, idx[s]]) * out.get(&src)
                    })
                    .collect(),
            )
        });
    }
    TensorField::new(t.chart().clone(), vec![Variance::Up; t.rank()], out.into_components())
        .expect("same component count")
}

/// `½[θ, θ]_S(dx^i, dx^j, dx^k)`, from
/// `½[θ,θ]_S(ξ, η, ·) = [θξ, θη] - θ(L_{θξ} η - i_{θη} dξ)`.
pub fn schouten_half(theta: &TensorField) -> TensorField {
    let n = theta.dim();
    let chart = theta.chart().clone();
    let mut d = Differentiator::new();
    let basis = |i: usize| -> Vec<Expr> {
        (0..n).map(|k| if k == i { Expr::one() } else { Expr::zero() }).collect()
    };
    let mut comps = vec![Expr::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (basis(i), basis(j));
            let ti = mat_vec(theta.components(), &ei);
            let tj = mat_vec(theta.components(), &ej);
            let br = lie_bracket(&ti, &tj, &mut d);
            let k0 = koszul_with(&ei, &ej, theta, None, &mut d);
            let tk = mat_vec(theta.components(), &k0);
            for k in 0..n {
                comps[(i * n + j) * n + k] = &br[k] - &tk[k];
            }
        }
    }
    TensorField::new(chart, vec![Variance::Up; 3], comps).expect("n^3 components")
}

/// `½[θ,θ]_S + twist(θ·, θ·, θ·)`; vanishes exactly for a twisted Poisson pair.
pub fn twisted_poisson_residual(theta: &TensorField, twist: Option<&TensorField>) -> TensorField {
    let s = schouten_half(theta);
    match twist {
        Some(h) => s.add(&theta_pullback(h, theta)).expect("matching layouts"),
        None => s,
    }
}

pub fn check_twisted_poisson(theta: &TensorField, twist: Option<&TensorField>, tol: f64) -> Result<()> {
    let r = twisted_poisson_residual(theta, twist);
    let m = r.max_abs()?;
    if m > tol {
        return Err(Error::NotTwistedPoisson(m));
    }
    Ok(())
}

/// `H_A`-twisted Dorfman bracket on `A ⊕ A*` for the Lie algebroid
/// `A = (T*M, θ, [·,·]_θ)`. Sections are passed as `GenSection`s whose form
/// part is the `A` component and whose vector part is the `A*` component:
/// `[(φ,ϑ),(φ',ϑ')] = ([φ,φ']_A, L^A_φ ϑ' - i_{φ'} d^A ϑ - H_A(φ, φ', ·))`.
pub fn a_dorfman(
    a: &GenSection,
    b: &GenSection,
    theta: &TensorField,
    koszul_twist: Option<&TensorField>,
    h_a: &TensorField,
) -> GenSection {
    let n = a.dim();
    let mut d = Differentiator::new();
    let (phi, vt) = (&a.xi, &a.x);
    let (phi2, vt2) = (&b.xi, &b.x);
    let form = koszul_with(phi, phi2, theta, koszul_twist, &mut d);
    let tphi = mat_vec(theta.components(), phi);
    let tphi2 = mat_vec(theta.components(), phi2);
    let pair = |v: &[Expr], f: &[Expr]| Expr::sum(v.iter().zip(f).map(|(x, y)| x * y).collect());
    let vt_phi2 = pair(vt, phi2);
    let mut x = Vec::with_capacity(n);
    for k in 0..n {
        let ek: Vec<Expr> = (0..n).map(|i| if i == k { Expr::one() } else { Expr::zero() }).collect();
        let tek = mat_vec(theta.components(), &ek);
        let lie = vector_apply(&tphi, &vt2[k], &mut d)
            - pair(vt2, &koszul_with(phi, &ek, theta, koszul_twist, &mut d));
        let dv = vector_apply(&tphi2, &vt[k], &mut d)
            - vector_apply(&tek, &vt_phi2, &mut d)
            - pair(vt, &koszul_with(phi2, &ek, theta, koszul_twist, &mut d));
        let h = Expr::sum(
            multi_indices(n, 2)
                .map(|ij| h_a.get(&[ij[0], ij[1], k]) * &phi[ij[0]] * &phi2[ij[1]])
                .collect(),
        );
        x.push(lie - dv - h);
    }
    GenSection {
        chart: a.chart.clone(),
        x,
        xi: form,
    }
}
