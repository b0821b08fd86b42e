//! A single coordinate chart: coordinate names, a sampling box and a seed.

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, Func};
use crate::sample::Sampler;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

pub const DEFAULT_POINTS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    names: Vec<Arc<str>>,
    domain: Vec<(f64, f64)>,
    seed: u64,
    points: usize,
}

impl Chart {
    /// Chart with domain `[-1, 1]^n`, seed 0 and 16 sample points.
    pub fn new(names: &[&str]) -> Result<Chart> {
        if names.is_empty() {
            return Err(Error::Invalid("a chart needs at least one coordinate".into()));
        }
        let mut out: Vec<Arc<str>> = Vec::with_capacity(names.len());
        for &n in names {
            let ok = n
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || Func::from_name(n).is_some() {
                return Err(Error::Invalid(format!("`{n}` is not a usable coordinate name")));
            }
            if out.iter().any(|m| &**m == n) {
                return Err(Error::Invalid(format!("coordinate `{n}` appears twice")));
            }
            out.push(Arc::from(n));
        }
        let dim = out.len();
        Ok(Chart {
            names: out,
            domain: alloc::vec![(-1.0, 1.0); dim],
            seed: 0,
            points: DEFAULT_POINTS,
        })
    }

    /// Chart with coordinates `x1, ..., xn`.
    pub fn numbered(n: usize) -> Result<Chart> {
        let names: Vec<_> = (1..=n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        Chart::new(&refs)
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Result<Chart> {
        if domain.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "domain has {} intervals for {} coordinates",
                domain.len(),
                self.dim()
            )));
        }
        if domain.iter().any(|&(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::Invalid("domain intervals must be finite with lo < hi".into()));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn with_sampling(mut self, seed: u64, points: usize) -> Chart {
        self.seed = seed;
        self.points = points.max(1);
        self
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.names.iter().map(|n| &**n).collect()
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| &**n == name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn coord(&self, i: usize) -> Expr {
        Expr::var(i, &self.names[i])
    }

    pub fn parse(&self, text: &str) -> Result<Expr> {
        parse(text, &self.names)
    }

    /// The chart's sample points, drawn uniformly from the domain box.
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        let mut s = Sampler::new(self.seed);
        (0..self.points)
            .map(|_| self.domain.iter().map(|&(a, b)| s.uniform(a, b)).collect())
            .collect()
    }
}

/// Derivative of `e` with respect to the coordinate called `coord`.
pub fn differentiate(e: &Expr, chart: &Chart, coord: &str) -> Result<Expr> {
    Ok(e.diff(chart.index_of(coord)?))
}
