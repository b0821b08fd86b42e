//! Exact dimension of the space of differences of Levi-Civita connections
//! at a point, by rational Gaussian elimination.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank of a matrix of rationals, row-reduced in place.
pub fn rank(rows: &mut [Vec<BigRational>]) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Dimension of the space of tensors `K_{ABC}` on `TM ⊕ T*M` at a point
/// that are skew in `(B, C)`, have zero cyclic sum and satisfy
/// `K(e_A, Ψ₊∂_i, Ψ₋∂_j) = 0` with `Ψ±(X) = (X, ±gX)`. The metric is given
/// as a symmetric `n×n` matrix of rationals.
pub fn lc_parameter_dimension_with(g: &[BigRational], n: usize) -> usize {
    let r = 2 * n;
    let unknowns = r * r * r;
    let at = |a: usize, b: usize, c: usize| (a * r + b) * r + c;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let zero_row = || vec![BigRational::zero(); unknowns];
    for a in 0..r {
        for b in 0..r {
            for c in b..r {
                let mut row = zero_row();
                row[at(a, b, c)] += int(1);
                row[at(a, c, b)] += int(1);
                rows.push(row);
            }
        }
    }
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                let mut row = zero_row();
                row[at(a, b, c)] += int(1);
                row[at(b, c, a)] += int(1);
                row[at(c, a, b)] += int(1);
                rows.push(row);
            }
        }
    }
    // Ψ±∂_i = e_i ± g_{ki} e_{n+k}
    let psi = |sign: i64, i: usize| -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); r];
        v[i] = int(1);
        for k in 0..n {
            v[n + k] = int(sign) * g[k * n + i].clone();
        }
        v
    };
    for a in 0..r {
        for i in 0..n {
            for j in 0..n {
                let (p, m) = (psi(1, i), psi(-1, j));
                let mut row = zero_row();
                for b in 0..r {
                    for c in 0..r {
                        if !p[b].is_zero() && !m[c].is_zero() {
                            row[at(a, b, c)] += &p[b] * &m[c];
                        }
                    }
                }
                rows.push(row);
            }
        }
    }
    unknowns - rank(&mut rows)
}

/// [`lc_parameter_dimension_with`] for a metric given in floating point,
/// converted exactly to rationals. `None` if an entry is not finite.
pub fn lc_parameter_dimension_at(g: &[f64], n: usize) -> Option<usize> {
    let q: Option<Vec<BigRational>> = g.iter().map(|&v| BigRational::from_float(v)).collect();
    Some(lc_parameter_dimension_with(&q?, n))
}

/// [`lc_parameter_dimension_with`] for the flat metric.
pub fn lc_parameter_dimension(n: usize) -> usize {
    let g: Vec<BigRational> = (0..n * n).map(|k| if k / n == k % n { int(1) } else { int(0) }).collect();
    lc_parameter_dimension_with(&g, n)
}

/// `(2/3) n (n² - 1)`.
pub fn expected_dimension(n: usize) -> usize {
    2 * n * (n * n - 1) / 3
}

