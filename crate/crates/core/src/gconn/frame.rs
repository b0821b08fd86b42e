//! Courant algebroids trivialized by a frame with constant pairing.
//!
//! Every algebroid here has rank `2n` over an `n`-dimensional chart and the
//! split pairing `η = [[0, I], [I, 0]]` in its frame, so raising an index is
//! the half-swap `A ↦ A ± n`. The data are the anchor `ρ(e_A) = a^μ_A ∂_μ`
//! and the structure functions `[e_A, e_B] = c^C_{AB} e_C`.

use crate::chart::Chart;
use crate::check::{max_abs, Residual};
use crate::error::{Error, Result};
use crate::expr::{Differentiator, Expr, Tape};
use crate::gtb::Dorfman;
use crate::tensor::multi_indices;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

/// Index paired with `a` by `η`.
#[inline]
pub fn dual(a: usize, n: usize) -> usize {
    if a < n {
        a + n
    } else {
        a - n
    }
}

/// A covariant tensor on the algebroid, components in the frame.
#[derive(Debug, Clone)]
pub struct FrameTensor {
    chart: Arc<Chart>,
    rank: usize,
    comps: Vec<Expr>,
}

impl FrameTensor {
    pub fn from_fn(chart: Arc<Chart>, rank: usize, mut f: impl FnMut(&[usize]) -> Expr) -> Self {
        let r = 2 * chart.dim();
        let comps = multi_indices(r, rank).map(|i| f(&i)).collect();
        FrameTensor { chart, rank, comps }
    }

    pub fn new(chart: Arc<Chart>, rank: usize, comps: Vec<Expr>) -> Result<Self> {
        let want = (2 * chart.dim()).pow(rank as u32);
        if comps.len() != want {
            return Err(Error::DimensionMismatch(format!("{} components, expected {want}", comps.len())));
        }
        Ok(FrameTensor { chart, rank, comps })
    }

    pub fn zeros(chart: Arc<Chart>, rank: usize) -> Self {
        FrameTensor::from_fn(chart, rank, |_| Expr::zero())
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank of the bundle, `2n`.
    pub fn fiber_dim(&self) -> usize {
        2 * self.chart.dim()
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        let r = self.fiber_dim();
        &self.comps[idx.iter().fold(0, |acc, &i| acc * r + i)]
    }

    pub fn sub(&self, o: &FrameTensor) -> FrameTensor {
        FrameTensor {
            chart: self.chart.clone(),
            rank: self.rank,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, o: &FrameTensor) -> FrameTensor {
        FrameTensor {
            chart: self.chart.clone(),
            rank: self.rank,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> FrameTensor {
        FrameTensor {
            chart: self.chart.clone(),
            rank: self.rank,
            comps: self.comps.iter().map(|a| s * a).collect(),
        }
    }

    /// Reorders slots: the result at `idx` is `self` at `idx` permuted by
    /// `perm`, i.e. `out[i_0..] = self[i_{perm[0]}..]`.
    pub fn permute(&self, perm: &[usize]) -> FrameTensor {
        FrameTensor::from_fn(self.chart.clone(), self.rank, |idx| {
            let src: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            self.get(&src).clone()
        })
    }

    /// `T'(e_{A1}, ..) = T(F e_{A1}, ..)` for a frame map `F` given row-major.
    pub fn pull_back(&self, f: &[Expr]) -> FrameTensor {
        let r = self.fiber_dim();
        let mut out = self.clone();
        for s in 0..self.rank {
            let cur = out;
            out = FrameTensor::from_fn(self.chart.clone(), self.rank, |idx| {
                let mut src = idx.to_vec();
                Expr::sum(
                    (0..r)
                        .filter_map(|d| {
                            let fd = &f[d * r + idx[s]];
                            if fd.is_zero() {
                                return None;
                            }
                            src[s] = d;
                            Some(fd * cur.get(&src))
                        })
                        .collect(),
                )
            });
        }
        out
    }

    /// Contraction `T(u_1, .., u_k)` with one component vector per slot.
    pub fn apply(&self, args: &[&[Expr]]) -> Expr {
        let r = self.fiber_dim();
        Expr::sum(
            multi_indices(r, self.rank)
                .filter(|idx| idx.iter().zip(args).all(|(&i, a)| !a[i].is_zero()))
                .map(|idx| {
                    let mut f = vec![self.get(&idx).clone()];
                    f.extend(idx.iter().zip(args).map(|(&i, a)| a[i].clone()));
                    Expr::product(f)
                })
                .collect(),
        )
    }

    pub fn max_abs(&self) -> Result<Residual> {
        max_abs(&self.comps, &self.chart.sample_points())
    }

    pub fn eval_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        Tape::compile(&self.comps).eval(p)
    }
}

/// Anchor and structure functions of a frame.
#[derive(Debug, Clone)]
pub struct CourantFrame {
    chart: Arc<Chart>,
    /// `a^μ_A` at `A * n + μ`.
    anchor: Vec<Expr>,
    /// `c^C_{AB}` at `(C * r + A) * r + B`.
    structure: Vec<Expr>,
}

impl CourantFrame {
    pub fn new(chart: Arc<Chart>, anchor: Vec<Expr>, structure: Vec<Expr>) -> Result<Self> {
        let n = chart.dim();
        let r = 2 * n;
        if anchor.len() != r * n || structure.len() != r * r * r {
            return Err(Error::DimensionMismatch(format!(
                "frame data of sizes {} and {} on a rank {r} bundle",
                anchor.len(),
                structure.len()
            )));
        }
        Ok(CourantFrame { chart, anchor, structure })
    }

    /// The coordinate frame `{(∂_μ, 0)} ∪ {(0, dx^μ)}` of the `H`-twisted
    /// Dorfman bracket: `[(∂_μ,0), (∂_ν,0)] = (0, -H_{μν·})`, all other
    /// brackets of frame vectors vanish.
    pub fn dorfman(d: &Dorfman) -> Self {
        let chart = d.chart().clone();
        let n = chart.dim();
        let r = 2 * n;
        let anchor = (0..r * n)
            .map(|k| if k / n == k % n { Expr::one() } else { Expr::zero() })
            .collect();
        let mut structure = vec![Expr::zero(); r * r * r];
        for idx in multi_indices(n, 3) {
            let (mu, nu, rho) = (idx[0], idx[1], idx[2]);
            structure[((n + rho) * r + mu) * r + nu] = -d.h().get(&[mu, nu, rho]);
        }
        CourantFrame { chart, anchor, structure }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        2 * self.chart.dim()
    }

    pub fn anchor(&self, a: usize, mu: usize) -> &Expr {
        &self.anchor[a * self.dim() + mu]
    }

    pub fn anchor_components(&self) -> &[Expr] {
        &self.anchor
    }

    pub fn c(&self, c: usize, a: usize, b: usize) -> &Expr {
        let r = self.rank();
        &self.structure[(c * r + a) * r + b]
    }

    pub fn structure(&self) -> &[Expr] {
        &self.structure
    }

    /// `c_{ABC} = ⟨[e_A, e_B], e_C⟩`.
    pub fn c_lower(&self, a: usize, b: usize, c: usize) -> &Expr {
        self.c(dual(c, self.dim()), a, b)
    }

    /// `ρ(e_A) f`.
    pub fn rho(&self, a: usize, f: &Expr, d: &mut Differentiator) -> Expr {
        let n = self.dim();
        Expr::sum(
            (0..n)
                .filter(|&mu| !self.anchor(a, mu).is_zero())
                .map(|mu| self.anchor(a, mu) * d.diff(f, mu))
                .collect(),
        )
    }

    /// `ρ(ψ) f` for a section given by frame components.
    pub fn rho_section(&self, psi: &[Expr], f: &Expr, d: &mut Differentiator) -> Expr {
        Expr::sum(
            psi.iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(a, p)| p * self.rho(a, f, d))
                .collect(),
        )
    }

    /// `ρ*(ξ)`, defined by `⟨ρ*ξ, ψ⟩ = ξ(ρψ)`.
    pub fn rho_star(&self, xi: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        (0..self.rank())
            .map(|c| {
                let a = dual(c, n);
                Expr::sum((0..n).map(|mu| self.anchor(a, mu) * &xi[mu]).collect())
            })
            .collect()
    }

    /// `𝒟f = ρ*(df)`.
    pub fn d_op(&self, f: &Expr, d: &mut Differentiator) -> Vec<Expr> {
        let df: Vec<Expr> = (0..self.dim()).map(|mu| d.diff(f, mu)).collect();
        self.rho_star(&df)
    }

    /// `⟨ψ, ψ'⟩ = η_{AB} ψ^A ψ'^B`.
    pub fn pairing(&self, p: &[Expr], q: &[Expr]) -> Expr {
        let n = self.dim();
        Expr::sum((0..self.rank()).map(|a| &p[a] * &q[dual(a, n)]).collect())
    }

    /// Bracket of sections from the frame data and the Leibniz rules,
    /// `[ψ, ψ'] = ψ^A ψ'^B c^C_{AB} e_C + ψ^A ρ_A(ψ'^C) e_C - ψ'^B ρ_B(ψ^C) e_C
    ///  + ψ'^B η_{AB} 𝒟ψ^A`.
    pub fn bracket(&self, p: &[Expr], q: &[Expr], d: &mut Differentiator) -> Vec<Expr> {
        let r = self.rank();
        let n = self.dim();
        let mut out: Vec<Vec<Expr>> = vec![Vec::new(); r];
        for a in 0..r {
            if p[a].is_zero() {
                continue;
            }
            for b in 0..r {
                if q[b].is_zero() {
                    continue;
                }
                for (c, o) in out.iter_mut().enumerate() {
                    let s = self.c(c, a, b);
                    if !s.is_zero() {
                        o.push(&p[a] * &q[b] * s);
                    }
                }
            }
        }
        for c in 0..r {
            out[c].push(self.rho_section(p, &q[c], d));
            out[c].push(-self.rho_section(q, &p[c], d));
        }
        for a in 0..r {
            let qa = &q[dual(a, n)];
            if qa.is_zero() || p[a].as_const().is_some() {
                continue;
            }
            for (c, dc) in self.d_op(&p[a], d).into_iter().enumerate() {
                out[c].push(qa * dc);
            }
        }
        out.into_iter().map(Expr::sum).collect()
    }

    /// The frame on `E'` obtained by pulling back along a bundle map
    /// `F: E' → E` preserving `η`: `ρ'_A = ρ(F e_A)` and
    /// `[e_A, e_B]' = F⁻¹[F e_A, F e_B]`.
    pub fn transport(&self, f: &[Expr], f_inv: &[Expr]) -> CourantFrame {
        let r = self.rank();
        let n = self.dim();
        let mut d = Differentiator::new();
        let col = |b: usize| -> Vec<Expr> { (0..r).map(|e| f[e * r + b].clone()).collect() };
        let cols: Vec<Vec<Expr>> = (0..r).map(col).collect();
        let anchor = (0..r * n)
            .map(|k| {
                let (a, mu) = (k / n, k % n);
                Expr::sum((0..r).map(|dd| &cols[a][dd] * self.anchor(dd, mu)).collect())
            })
            .collect();
        let mut structure = vec![Expr::zero(); r * r * r];
        for a in 0..r {
            for b in 0..r {
                let br = self.bracket(&cols[a], &cols[b], &mut d);
                for c in 0..r {
                    structure[(c * r + a) * r + b] =
                        Expr::sum((0..r).map(|e| &f_inv[c * r + e] * &br[e]).collect());
                }
            }
        }
        CourantFrame {
            chart: self.chart.clone(),
            anchor,
            structure,
        }
    }

    /// Largest difference of anchors and structure functions.
    pub fn difference(&self, o: &CourantFrame) -> Result<Residual> {
        let pts = self.chart.sample_points();
        let mut a: Vec<Expr> = self.anchor.iter().zip(&o.anchor).map(|(x, y)| x - y).collect();
        a.extend(self.structure.iter().zip(&o.structure).map(|(x, y)| x - y));
        max_abs(&a, &pts)
    }

    /// Residual of `ρ[e_A, e_B] = [ρe_A, ρe_B]` over all frame pairs.
    pub fn anchor_residual(&self) -> Result<Residual> {
        let r = self.rank();
        let n = self.dim();
        let mut d = Differentiator::new();
        let mut res = Vec::new();
        for a in 0..r {
            for b in 0..r {
                for mu in 0..n {
                    let lhs = Expr::sum((0..r).map(|c| self.c(c, a, b) * self.anchor(c, mu)).collect());
                    let rhs = self.rho(a, self.anchor(b, mu), &mut d) - self.rho(b, self.anchor(a, mu), &mut d);
                    res.push(lhs - rhs);
                }
            }
        }
        max_abs(&res, &self.chart.sample_points())
    }
}
