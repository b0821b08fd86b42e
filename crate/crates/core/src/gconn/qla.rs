//! The Courant algebroid over a point given by a quadratic Lie algebra, in
//! exact rational arithmetic.

use super::dimension::rank;
use crate::error::{Error, Result};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

fn int(k: i64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

/// Inverse of a square matrix by Gauss-Jordan elimination, `None` if singular.
pub fn invert(m: &[Rational], d: usize) -> Option<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = (0..d)
        .map(|i| {
            let mut row = m[i * d..(i + 1) * d].to_vec();
            row.extend((0..d).map(|j| if i == j { int(1) } else { int(0) }));
            row
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = Rational::one() / a[c][c].clone();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        let pivot = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
    }
    Some(a.into_iter().flat_map(|row| row.into_iter().skip(d)).collect())
}

/// Sylvester's criterion on a symmetric matrix.
fn positive_definite(m: &[Rational], d: usize) -> bool {
    (1..=d).all(|k| {
        let sub: Vec<Rational> = (0..k * k).map(|i| m[(i / k) * d + i % k].clone()).collect();
        det(&sub, k).is_positive()
    })
}

fn det(m: &[Rational], d: usize) -> Rational {
    let mut a: Vec<Vec<Rational>> = (0..d).map(|i| m[i * d..(i + 1) * d].to_vec()).collect();
    let mut out = int(1);
    for c in 0..d {
        let Some(p) = (c..d).find(|&i| !a[i][c].is_zero()) else {
            return int(0);
        };
        if p != c {
            a.swap(c, p);
            out = -out;
        }
        out *= a[c][c].clone();
        let pivot = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            if !row[c].is_zero() {
                let f = row[c].clone() / pivot[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
    }
    out
}

/// Basis of the null space of a `rows×cols` matrix.
fn null_space(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = Rational::one() / a[r][c].clone();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![int(0); cols];
            v[free] = int(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][free].clone();
            }
            v
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct QuadraticLieAlgebra {
    dim: usize,
    /// `c^k_{ij}` at `(k * d + i) * d + j`.
    c: Vec<Rational>,
    /// Pairing matrix, row-major.
    pairing: Vec<Rational>,
    v_plus: Vec<Vec<Rational>>,
    v_minus: Vec<Vec<Rational>>,
    /// `P₊`, row-major.
    proj_plus: Vec<Rational>,
}

/// Exact connection data: `⟨∇_{e_i} e_j, e_k⟩` at `(i * d + j) * d + k`.
#[derive(Debug, Clone)]
pub struct QlaConnection {
    pub lowered: Vec<Rational>,
}

impl QuadraticLieAlgebra {
    /// Validates the Lie algebra axioms, ad-invariance of the pairing and
    /// the signature of `V₊` and its orthogonal complement, exactly.
    pub fn new(dim: usize, c: Vec<Rational>, pairing: Vec<Rational>, v_plus: Vec<Vec<Rational>>) -> Result<Self> {
        let d = dim;
        if c.len() != d * d * d || pairing.len() != d * d || v_plus.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch("quadratic Lie algebra data".into()));
        }
        let cc = |k: usize, i: usize, j: usize| &c[(k * d + i) * d + j];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    if cc(k, i, j) + cc(k, j, i) != int(0) {
                        return Err(Error::NotQuadraticLie(format!("bracket not antisymmetric at c^{k}_{{{i}{j}}}")));
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for m in 0..d {
                        // [[e_i,e_j],e_k] + cyclic, component m
                        let mut s = int(0);
                        for l in 0..d {
                            s += cc(l, i, j) * cc(m, l, k);
                            s += cc(l, j, k) * cc(m, l, i);
                            s += cc(l, k, i) * cc(m, l, j);
                        }
                        if !s.is_zero() {
                            return Err(Error::NotQuadraticLie(format!("Jacobi identity fails on ({i},{j},{k})")));
                        }
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                if pairing[i * d + j] != pairing[j * d + i] {
                    return Err(Error::NotQuadraticLie("pairing not symmetric".into()));
                }
            }
        }
        let mut rows: Vec<Vec<Rational>> = (0..d).map(|i| pairing[i * d..(i + 1) * d].to_vec()).collect();
        if rank(&mut rows) != d {
            return Err(Error::NotQuadraticLie("pairing is degenerate".into()));
        }
        let pr = |a: usize, b: usize| &pairing[a * d + b];
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    let mut s = int(0);
                    for l in 0..d {
                        s += cc(l, x, y) * pr(l, z) + cc(l, x, z) * pr(y, l);
                    }
                    if !s.is_zero() {
                        return Err(Error::NotQuadraticLie(format!("pairing not ad-invariant on ({x},{y},{z})")));
                    }
                }
            }
        }
        let bil = |u: &[Rational], v: &[Rational]| -> Rational {
            let mut s = int(0);
            for a in 0..d {
                for b in 0..d {
                    s += &u[a] * pr(a, b) * &v[b];
                }
            }
            s
        };
        let gram = |basis: &[Vec<Rational>]| -> Vec<Rational> {
            let k = basis.len();
            (0..k * k).map(|i| bil(&basis[i / k], &basis[i % k])).collect()
        };
        let p = v_plus.len();
        if !positive_definite(&gram(&v_plus), p) {
            return Err(Error::NotMaximalPositive("pairing is not positive definite on V+".into()));
        }
        // V₋ = V₊^⊥
        let constraints: Vec<Vec<Rational>> = v_plus
            .iter()
            .map(|v| (0..d).map(|b| (0..d).map(|a| &v[a] * pr(a, b)).sum()).collect())
            .collect();
        let v_minus = null_space(&constraints, d);
        let q = v_minus.len();
        let neg: Vec<Rational> = gram(&v_minus).into_iter().map(|x| -x).collect();
        if p + q != d || !positive_definite(&neg, q) {
            return Err(Error::NotMaximalPositive("orthogonal complement of V+ is not negative definite".into()));
        }
        // P₊ = M diag(1,..,1,0,..,0) M⁻¹ with M = [V₊ | V₋] by columns.
        let mut m = vec![int(0); d * d];
        for (col, v) in v_plus.iter().chain(&v_minus).enumerate() {
            for row in 0..d {
                m[row * d + col] = v[row].clone();
            }
        }
        let mi = invert(&m, d).ok_or_else(|| Error::NotMaximalPositive("V+ and V- do not span".into()))?;
        let proj_plus = (0..d * d)
            .map(|k| {
                let (i, j) = (k / d, k % d);
                (0..p).map(|l| &m[i * d + l] * &mi[l * d + j]).sum()
            })
            .collect();
        Ok(QuadraticLieAlgebra {
            dim,
            c,
            pairing,
            v_plus,
            v_minus,
            proj_plus,
        })
    }

    /// `so(3) ⊕ so(3)` with `[e_i, e_j] = ε_{ijk} e_k` in each factor, pairing
    /// `+δ` on the first factor and `-δ` on the second, `V₊` the first factor.
    pub fn so3_pair() -> Self {
        let d = 6;
        let mut c = vec![int(0); d * d * d];
        for off in [0, 3] {
            for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                c[((off + k) * d + off + i) * d + off + j] = int(1);
                c[((off + k) * d + off + j) * d + off + i] = int(-1);
            }
        }
        let pairing = (0..d * d)
            .map(|k| match (k / d, k % d) {
                (i, j) if i == j && i < 3 => int(1),
                (i, j) if i == j => int(-1),
                _ => int(0),
            })
            .collect();
        let v_plus = (0..3)
            .map(|i| (0..d).map(|k| if k == i { int(1) } else { int(0) }).collect())
            .collect();
        QuadraticLieAlgebra::new(d, c, pairing, v_plus).expect("so(3) + so(3) is a valid quadratic Lie algebra")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn v_plus(&self) -> &[Vec<Rational>] {
        &self.v_plus
    }

    pub fn v_minus(&self) -> &[Vec<Rational>] {
        &self.v_minus
    }

    pub fn pair(&self, u: &[Rational], v: &[Rational]) -> Rational {
        let d = self.dim;
        let mut s = int(0);
        for a in 0..d {
            for b in 0..d {
                s += &u[a] * &self.pairing[a * d + b] * &v[b];
            }
        }
        s
    }

    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let d = self.dim;
        (0..d)
            .map(|k| {
                let mut s = int(0);
                for i in 0..d {
                    for j in 0..d {
                        let cc = &self.c[(k * d + i) * d + j];
                        if !cc.is_zero() {
                            s += cc * &u[i] * &v[j];
                        }
                    }
                }
                s
            })
            .collect()
    }

    /// `(P₊x, P₋x)`.
    pub fn split(&self, x: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let d = self.dim;
        let plus: Vec<Rational> = (0..d)
            .map(|i| (0..d).map(|j| &self.proj_plus[i * d + j] * &x[j]).sum())
            .collect();
        let minus = x.iter().zip(&plus).map(|(a, b)| a - b).collect();
        (plus, minus)
    }

    fn unit(&self, i: usize) -> Vec<Rational> {
        (0..self.dim).map(|k| if k == i { int(1) } else { int(0) }).collect()
    }

    /// The Levi-Civita connection
    /// `⟨∇_x y, z⟩ = ⅓⟨[x₊,y₊],z₊⟩ + ⅓⟨[x₋,y₋],z₋⟩ + ⟨[x₋,y₊],z₊⟩ + ⟨[x₊,y₋],z₋⟩`.
    pub fn lc(&self) -> QlaConnection {
        let d = self.dim;
        let third = Rational::new(BigInt::from(1), BigInt::from(3));
        let parts: Vec<_> = (0..d).map(|i| self.split(&self.unit(i))).collect();
        let mut lowered = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let (xp, xm) = &parts[i];
                    let (yp, ym) = &parts[j];
                    let (zp, zm) = &parts[k];
                    let v = &third * self.pair(&self.bracket(xp, yp), zp)
                        + &third * self.pair(&self.bracket(xm, ym), zm)
                        + self.pair(&self.bracket(xm, yp), zp)
                        + self.pair(&self.bracket(xp, ym), zm);
                    lowered.push(v);
                }
            }
        }
        QlaConnection { lowered }
    }

    /// Torsion 3-form `T_{ijk} = L_{ijk} - L_{jik} - ⟨[e_i,e_j],e_k⟩ + L_{kij}`
    /// of a connection with `L_{ijk} = ⟨∇_{e_i} e_j, e_k⟩` (the anchor is zero).
    pub fn torsion(&self, conn: &QlaConnection) -> Vec<Rational> {
        let d = self.dim;
        let l = |i: usize, j: usize, k: usize| &conn.lowered[(i * d + j) * d + k];
        let mut out = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for j in 0..d {
                let br = self.bracket(&self.unit(i), &self.unit(j));
                for k in 0..d {
                    out.push(l(i, j, k) - l(j, i, k) - self.pair(&br, &self.unit(k)) + l(k, i, j));
                }
            }
        }
        out
    }

    /// `⟨∇_x y, z⟩ + ⟨y, ∇_x z⟩` over the basis.
    pub fn pairing_residual(&self, conn: &QlaConnection) -> Vec<Rational> {
        let d = self.dim;
        let l = |i: usize, j: usize, k: usize| &conn.lowered[(i * d + j) * d + k];
        (0..d * d * d)
            .map(|n| {
                let (i, j, k) = (n / (d * d), (n / d) % d, n % d);
                l(i, j, k) + l(i, k, j)
            })
            .collect()
    }

    /// `⟨∇_x y₊, z₋⟩` for basis `x` and basis vectors of `V₊`, `V₋`;
    /// vanishes exactly when `∇` preserves `V₊` (and hence `V₋`).
    pub fn metric_residual(&self, conn: &QlaConnection) -> Vec<Rational> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for yp in &self.v_plus {
                for zm in &self.v_minus {
                    let mut s = int(0);
                    for j in 0..d {
                        for k in 0..d {
                            s += &yp[j] * &zm[k] * &conn.lowered[(i * d + j) * d + k];
                        }
                    }
                    out.push(s);
                }
            }
        }
        out
    }
}
