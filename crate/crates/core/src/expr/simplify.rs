use super::{Expr, Node};
use alloc::vec::Vec;
use hashbrown::HashMap;

/// Bottom-up cleanup: flattens nested sums and products, folds constants
/// and drops neutral elements. It never changes the value of an expression
/// and it does not try to reach a canonical form.
#[derive(Default)]
pub struct Simplifier {
    memo: HashMap<usize, (Expr, Expr)>,
}

impl Simplifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn simplify(&mut self, e: &Expr) -> Expr {
        if let Some((_, s)) = self.memo.get(&e.key()) {
            return s.clone();
        }
        let s = self.step(e);
        self.memo.insert(e.key(), (e.clone(), s.clone()));
        s
    }

    fn step(&mut self, e: &Expr) -> Expr {
        match e.node() {
            Node::Const(_) | Node::Var(..) => e.clone(),
            Node::Neg(a) => -self.simplify(a),
            Node::Sum(terms) => {
                let mut flat = Vec::with_capacity(terms.len());
                for t in terms {
                    let t = self.simplify(t);
                    match t.node() {
                        Node::Sum(inner) => flat.extend(inner.iter().cloned()),
                        _ => flat.push(t),
                    }
                }
                Expr::sum(flat)
            }
            Node::Product(fs) => {
                let mut flat = Vec::with_capacity(fs.len());
                let mut sign = 1.0;
                for f in fs {
                    let mut f = self.simplify(f);
                    if let Node::Neg(inner) = f.node() {
                        sign = -sign;
                        f = inner.clone();
                    }
                    match f.node() {
                        Node::Product(inner) => flat.extend(inner.iter().cloned()),
                        _ => flat.push(f),
                    }
                }
                flat.push(Expr::constant(sign));
                Expr::product(flat)
            }
            Node::Quotient(a, b) => {
                let a = self.simplify(a);
                let b = self.simplify(b);
                match b.as_const() {
                    Some(c) if c != 0.0 => a * (1.0 / c),
                    _ => Expr::quotient(a, b),
                }
            }
            Node::Pow(a, k) => {
                let a = self.simplify(a);
                match a.node() {
                    Node::Pow(base, j) => match j.checked_mul(*k) {
                        Some(m) => base.clone().powi(m),
                        None => a.powi(*k),
                    },
                    _ => a.powi(*k),
                }
            }
            Node::Apply(f, a) => Expr::apply(*f, self.simplify(a)),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::chart::Chart;
    use alloc::string::ToString;

    #[test]
    fn drops_zero_terms_and_unit_factors() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let e = chart.parse("0*sin(x) + y").unwrap().simplify();
        assert_eq!(e.to_string(), "y");
    }

    #[test]
    fn flattens_and_folds() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let e = chart.parse("2*(3*(x*y)) + (1 + (x + 2))").unwrap();
        let s = e.simplify();
        assert_eq!(s.to_string(), "3.0 + 6.0*x*y + x");
        let p = [0.4, -1.3];
        assert!((e.eval(&p).unwrap() - s.eval(&p).unwrap()).abs() < 1e-14);
    }
}
