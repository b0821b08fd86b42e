//! Seeded random test data: polynomials, sections, tensors and safe
//! expressions for finite-difference checks.

use crate::chart::Chart;
use crate::expr::{Expr, Func};
use crate::sample::Sampler;
use crate::tensor::{multi_indices, TensorField, Variance};
use alloc::sync::Arc;
use alloc::vec::Vec;

/// Polynomial of total degree at most `degree` with coefficients uniform in
/// `[-scale, scale]`.
pub fn poly(chart: &Chart, s: &mut Sampler, degree: usize, scale: f64) -> Expr {
    let n = chart.dim();
    let mut terms = Vec::new();
    for d in 0..=degree {
        for idx in multi_indices(n, d) {
            if idx.windows(2).any(|w| w[0] > w[1]) {
                continue;
            }
            let mut f: Vec<Expr> = idx.iter().map(|&i| chart.coord(i)).collect();
            f.insert(0, Expr::constant(s.uniform(-scale, scale)));
            terms.push(Expr::product(f));
        }
    }
    Expr::sum(terms)
}

pub fn poly_tensor(chart: &Arc<Chart>, slots: Vec<Variance>, s: &mut Sampler, scale: f64) -> TensorField {
    TensorField::from_fn(chart.clone(), slots, |_| poly(chart, s, 2, scale))
}

/// Random p-form with quadratic polynomial components.
pub fn poly_form(chart: &Arc<Chart>, p: usize, s: &mut Sampler, scale: f64) -> TensorField {
    TensorField::form_from_increasing(chart.clone(), p, |_| poly(chart, s, 2, scale))
}

/// Metric `c·δ + small quadratic perturbation`, positive definite on the
/// unit box whenever `scale` is small compared to `c`.
pub fn near_identity_metric(chart: &Arc<Chart>, s: &mut Sampler, c: f64, scale: f64) -> TensorField {
    let n = chart.dim();
    let rows: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (i..n)
                .map(|j| {
                    let p = poly(chart, s, 2, scale);
                    if i == j {
                        p + c
                    } else {
                        p
                    }
                })
                .collect()
        })
        .collect();
    TensorField::symmetric_from_upper(chart.clone(), &rows).expect("triangle shape is correct")
}

/// Random expression built from `sin`, `cos`, `exp`, bounded polynomials and
/// arithmetic, defined and smooth everywhere.
pub fn safe_expr(chart: &Chart, s: &mut Sampler, depth: usize) -> Expr {
    if depth == 0 {
        return poly(chart, s, 2, 1.0);
    }
    let a = safe_expr(chart, s, depth - 1);
    match s.below(6) {
        0 => a + safe_expr(chart, s, depth - 1),
        1 => a * safe_expr(chart, s, depth - 1),
        2 => Expr::apply(Func::Sin, a),
        3 => Expr::apply(Func::Cos, a),
        4 => Expr::apply(Func::Exp, 0.5 * Expr::apply(Func::Sin, a)),
        _ => a / (2.0 + Expr::apply(Func::Cos, safe_expr(chart, s, depth - 1))),
    }
}
