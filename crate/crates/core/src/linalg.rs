//! Small dense matrices of expressions, stored row-major.

use crate::expr::Expr;
use alloc::vec::Vec;
use hashbrown::HashMap;
use nalgebra::DMatrix;

/// Determinant by cofactor expansion with shared minors.
pub fn det(m: &[Expr], n: usize) -> Expr {
    let mut memo = HashMap::new();
    let full = (1u32 << n) - 1;
    minor(m, n, full, full, &mut memo)
}

fn minor(m: &[Expr], n: usize, rows: u32, cols: u32, memo: &mut HashMap<(u32, u32), Expr>) -> Expr {
    if rows == 0 {
        return Expr::one();
    }
    if let Some(e) = memo.get(&(rows, cols)) {
        return e.clone();
    }
    let r = rows.trailing_zeros() as usize;
    let mut terms = Vec::new();
    let mut sign = 1.0;
    for c in 0..n {
        if cols & (1 << c) == 0 {
            continue;
        }
        let a = &m[r * n + c];
        if !a.is_zero() {
            let sub = minor(m, n, rows & !(1 << r), cols & !(1 << c), memo);
            terms.push(Expr::product(alloc::vec![Expr::constant(sign), a.clone(), sub]));
        }
        sign = -sign;
    }
    let e = Expr::sum(terms);
    memo.insert((rows, cols), e.clone());
    e
}

/// Inverse as adjugate over determinant; also returns the determinant.
pub fn inverse(m: &[Expr], n: usize) -> (Vec<Expr>, Expr) {
    let mut memo = HashMap::new();
    let full = (1u32 << n) - 1;
    let d = minor(m, n, full, full, &mut memo);
    let mut inv = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let cof = minor(m, n, full & !(1 << j), full & !(1 << i), &mut memo);
            let cof = if (i + j) % 2 == 1 { -cof } else { cof };
            inv.push(Expr::quotient(cof, d.clone()));
        }
    }
    (inv, d)
}

pub fn matmul(a: &[Expr], b: &[Expr], n: usize, k: usize, m: usize) -> Vec<Expr> {
    let mut out = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            out.push(Expr::sum((0..k).map(|l| &a[i * k + l] * &b[l * m + j]).collect()));
        }
    }
    out
}

pub fn transpose(a: &[Expr], n: usize, m: usize) -> Vec<Expr> {
    let mut out = Vec::with_capacity(n * m);
    for j in 0..m {
        for i in 0..n {
            out.push(a[i * m + j].clone());
        }
    }
    out
}

pub fn identity(n: usize) -> Vec<Expr> {
    (0..n * n)
        .map(|k| if k / n == k % n { Expr::one() } else { Expr::zero() })
        .collect()
}

/// Row-major `n×n` values as a dense matrix.
pub fn to_dmatrix(vals: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, vals)
}

pub(crate) fn num_det(vals: &[f64], n: usize) -> f64 {
    to_dmatrix(vals, n).determinant()
}

pub(crate) fn is_positive_definite(vals: &[f64], n: usize) -> bool {
    let m = to_dmatrix(vals, n);
    let sym = (&m + m.transpose()) * 0.5;
    nalgebra::Cholesky::new(sym).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;

    #[test]
    fn symbolic_inverse_matches_numeric() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let src = ["2 + x^2", "x*y", "sin(y)", "x*y", "3 + y", "1", "sin(y)", "1", "4 + x"];
        let m: Vec<Expr> = src.iter().map(|s| c.parse(s).unwrap()).collect();
        let (inv, d) = inverse(&m, 3);
        let p = [0.3, -0.6];
        let mv: Vec<f64> = m.iter().map(|e| e.eval(&p).unwrap()).collect();
        let iv: Vec<f64> = inv.iter().map(|e| e.eval(&p).unwrap()).collect();
        assert!((d.eval(&p).unwrap() - num_det(&mv, 3)).abs() < 1e-12);
        let prod = to_dmatrix(&mv, 3) * to_dmatrix(&iv, 3);
        assert!((prod - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn determinant_of_permutation() {
        let p: Vec<Expr> = [0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]
            .iter()
            .map(|&v| Expr::constant(v))
            .collect();
        assert_eq!(det(&p, 3).as_const(), Some(1.0));
    }
}
