//! Pointwise residual measurement over sample points.

use crate::error::Result;
use crate::expr::{Expr, Tape};
use alloc::vec::Vec;

/// Largest absolute value of a set of expressions over a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// Sample point where the maximum occurs; empty when there are no points.
    pub point: Vec<f64>,
}

impl Residual {
    pub fn zero() -> Residual {
        Residual {
            value: 0.0,
            point: Vec::new(),
        }
    }

    /// The larger of two residuals.
    pub fn max(self, other: Residual) -> Residual {
        if other.value > self.value {
            other
        } else {
            self
        }
    }
}

pub fn max_abs(exprs: &[Expr], points: &[Vec<f64>]) -> Result<Residual> {
    let tape = Tape::compile(exprs);
    let mut best = Residual::zero();
    if let Some(p) = points.first() {
        best.point = p.clone();
    }
    for p in points {
        for v in tape.eval(p)? {
            if v.abs() > best.value {
                best.value = v.abs();
                best.point = p.clone();
            }
        }
    }
    Ok(best)
}

/// Largest `|a_i - b_i|` over a point set.
pub fn max_abs_diff(a: &[Expr], b: &[Expr], points: &[Vec<f64>]) -> Result<Residual> {
    let d: Vec<Expr> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    max_abs(&d, points)
}
