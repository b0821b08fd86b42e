#![allow(dead_code)]

use gencourant_core::gtb::GenSection;
use gencourant_core::random::{poly, poly_form};
use gencourant_core::sample::Sampler;
use gencourant_core::tensor::TensorField;
use gencourant_core::{Chart, Expr};
use std::sync::Arc;

pub fn chart(n: usize, seed: u64) -> Arc<Chart> {
    let names = ["x", "y", "z", "w"];
    Arc::new(Chart::new(&names[..n]).unwrap().with_sampling(seed, 8))
}

pub fn section(c: &Arc<Chart>, s: &mut Sampler) -> GenSection {
    let n = c.dim();
    let x = (0..n).map(|_| poly(c, s, 2, 0.8)).collect();
    let xi = (0..n).map(|_| poly(c, s, 2, 0.8)).collect();
    GenSection::new(c.clone(), x, xi).unwrap()
}

/// A 2-form whose `(0,1)` and `(2,3)` entries are shifted by `shift`,
/// invertible on the unit box for `shift` large against `scale`.
pub fn near_symplectic(c: &Arc<Chart>, s: &mut Sampler, shift: f64, scale: f64) -> TensorField {
    let mut b = poly_form(c, 2, s, scale);
    for (i, j) in [(0, 1), (2, 3)] {
        if j < c.dim() {
            let v = b.get(&[i, j]) + shift;
            b.set(&[j, i], -&v);
            b.set(&[i, j], v);
        }
    }
    b
}

pub fn residual(a: &GenSection, b: &GenSection) -> f64 {
    a.sub(b).max_abs().unwrap().value
}

pub fn scalar_residual(e: &Expr, c: &Chart) -> f64 {
    gencourant_core::check::max_abs(&[e.clone()], &c.sample_points()).unwrap().value
}
