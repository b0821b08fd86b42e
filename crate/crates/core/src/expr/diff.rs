use super::{Expr, Func, Node};
use alloc::vec::Vec;
use hashbrown::HashMap;

/// Exact partial derivatives with a memo table.
///
/// Reusing one differentiator across many expressions that share nodes keeps
/// the derivative graph shared as well.
#[derive(Default)]
pub struct Differentiator {
    memo: HashMap<(usize, usize), (Expr, Expr)>,
}

impl Differentiator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn diff(&mut self, e: &Expr, var: usize) -> Expr {
        let key = (e.key(), var);
        if let Some((_, d)) = self.memo.get(&key) {
            return d.clone();
        }
        let d = self.rule(e, var);
        self.memo.insert(key, (e.clone(), d.clone()));
        d
    }

    fn rule(&mut self, e: &Expr, var: usize) -> Expr {
        match e.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(i, _) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Neg(a) => -self.diff(a, var),
            Node::Sum(terms) => Expr::sum(terms.iter().map(|t| self.diff(t, var)).collect()),
            Node::Product(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for i in 0..fs.len() {
                    let di = self.diff(&fs[i], var);
                    if di.is_zero() {
                        continue;
                    }
                    let mut factors = Vec::with_capacity(fs.len());
                    for (j, f) in fs.iter().enumerate() {
                        factors.push(if i == j { di.clone() } else { f.clone() });
                    }
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Node::Quotient(a, b) => {
                let da = self.diff(a, var);
                let db = self.diff(b, var);
                if db.is_zero() {
                    return Expr::quotient(da, b.clone());
                }
                Expr::quotient(&da * b - a * &db, b.clone().powi(2))
            }
            Node::Pow(a, k) => {
                let da = self.diff(a, var);
                Expr::product(alloc::vec![Expr::constant(*k as f64), a.clone().powi(k - 1), da])
            }
            Node::Apply(f, a) => {
                let da = self.diff(a, var);
                if da.is_zero() {
                    return Expr::zero();
                }
                let outer = match f {
                    Func::Sin => a.clone().cos(),
                    Func::Cos => -a.clone().sin(),
                    Func::Exp => e.clone(),
                    Func::Ln => return Expr::quotient(da, a.clone()),
                    Func::Sqrt => return Expr::quotient(da, 2.0 * e),
                };
                outer * da
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;

    fn fd(e: &Expr, p: &[f64], var: usize, h: f64) -> f64 {
        let mut a = p.to_vec();
        let mut b = p.to_vec();
        a[var] += h;
        b[var] -= h;
        (e.eval(&a).unwrap() - e.eval(&b).unwrap()) / (2.0 * h)
    }

    #[test]
    fn matches_central_differences() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let cases = [
            "x^3*y - 2*x/y",
            "sin(x*y) + cos(x)^2",
            "exp(x - y)*ln(2 + x)",
            "sqrt(3 + x*x + y)",
            "(x + 1)^-2",
            "-x/(1 + y^2)",
        ];
        let p = [0.3, 0.7];
        for text in cases {
            let e = chart.parse(text).unwrap();
            for var in 0..2 {
                let exact = e.diff(var).eval(&p).unwrap();
                let approx = fd(&e, &p, var, 1e-5);
                assert!((exact - approx).abs() < 1e-7, "{text} d{var}: {exact} vs {approx}");
            }
        }
    }

    #[test]
    fn derivative_of_sum_product_and_sin() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let e = chart.parse("x^2*y + sin(y)").unwrap();
        let dx = e.diff(0);
        let dy = e.diff(1);
        for p in [[0.5, -1.0], [2.0, 0.25]] {
            assert!((dx.eval(&p).unwrap() - 2.0 * p[0] * p[1]).abs() < 1e-14);
            assert!((dy.eval(&p).unwrap() - (p[0] * p[0] + p[1].cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn independent_coordinate_gives_literal_zero() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let e = chart.parse("sin(x)*exp(x)").unwrap();
        assert!(e.diff(1).is_zero());
    }
}
