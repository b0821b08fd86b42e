//! Scalar expressions in the chart coordinates.
//!
//! An [`Expr`] is an immutable, reference-counted node graph. Subexpressions
//! are shared rather than copied, so geometric constructions that reuse the
//! same metric inverse or Christoffel symbol many times stay small. The
//! builders fold constants and the trivial identities `0 + x`, `1 * x`,
//! `0 * x`, `x^1` and `--x` on the spot; everything else is left alone.
//!
//! Grammar accepted by [`parse`](crate::chart::Chart::parse):
//!
//! ```text
//! expr    = term { ("+" | "-") term }
//! term    = unary { ("*" | "/") unary }
//! unary   = "-" unary | power
//! power   = primary [ "^" [ "-" ] integer ]
//! primary = number | coord | func "(" expr ")" | "(" expr ")"
//! func    = "sin" | "cos" | "exp" | "ln" | "sqrt"
//! ```

mod diff;
mod eval;
mod parse;
mod print;
mod simplify;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

pub use diff::Differentiator;
pub use eval::{Evaluator, Tape};
pub(crate) use parse::parse;
pub use simplify::Simplifier;

/// Elementary functions of one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Ln, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug)]
pub enum Node {
    Const(f64),
    /// Coordinate with its chart index and display name.
    Var(usize, Arc<str>),
    Neg(Expr),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    Pow(Expr, i32),
    Apply(Func, Expr),
}

#[derive(Debug, Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Address of the shared node; stable while any clone is alive.
    pub(crate) fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::wrap(Node::Const(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(index: usize, name: &str) -> Expr {
        Expr::wrap(Node::Var(index, Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True only for a literal zero, not for expressions that happen to vanish.
    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut acc = 0.0;
        let mut rest = Vec::with_capacity(terms.len());
        for t in terms {
            match t.as_const() {
                Some(c) => acc += c,
                None => rest.push(t),
            }
        }
        if acc != 0.0 {
            rest.insert(0, Expr::constant(acc));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr::wrap(Node::Sum(rest)),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut acc = 1.0;
        let mut rest = Vec::with_capacity(factors.len());
        for f in factors {
            match f.as_const() {
                Some(c) => {
                    if c == 0.0 {
                        return Expr::zero();
                    }
                    acc *= c;
                }
                None => rest.push(f),
            }
        }
        if rest.is_empty() {
            return Expr::constant(acc);
        }
        if acc == -1.0 {
            return Expr::product(rest).neg_node();
        }
        if acc != 1.0 {
            rest.insert(0, Expr::constant(acc));
        }
        match rest.len() {
            1 => rest.pop().unwrap(),
            _ => Expr::wrap(Node::Product(rest)),
        }
    }

    fn neg_node(self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-*c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::wrap(Node::Neg(self)),
        }
    }

    pub fn quotient(num: Expr, den: Expr) -> Expr {
        if num.is_zero() {
            return Expr::zero();
        }
        if den.is_one() {
            return num;
        }
        match (num.as_const(), den.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::constant(a / b),
            _ => Expr::wrap(Node::Quotient(num, den)),
        }
    }

    pub fn powi(self, k: i32) -> Expr {
        match k {
            0 => Expr::one(),
            1 => self,
            _ => match self.as_const() {
                Some(c) if c != 0.0 || k > 0 => Expr::constant(libm::pow(c, k as f64)),
                _ => Expr::wrap(Node::Pow(self, k)),
            },
        }
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            let v = match f {
                Func::Sin => Some(libm::sin(c)),
                Func::Cos => Some(libm::cos(c)),
                Func::Exp => Some(libm::exp(c)),
                Func::Ln if c > 0.0 => Some(libm::log(c)),
                Func::Sqrt if c >= 0.0 => Some(libm::sqrt(c)),
                _ => None,
            };
            if let Some(v) = v.filter(|v| v.is_finite()) {
                return Expr::constant(v);
            }
        }
        Expr::wrap(Node::Apply(f, arg))
    }

    pub fn sin(self) -> Expr {
        Expr::apply(Func::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::apply(Func::Cos, self)
    }

    pub fn exp(self) -> Expr {
        Expr::apply(Func::Exp, self)
    }

    pub fn ln(self) -> Expr {
        Expr::apply(Func::Ln, self)
    }

    pub fn sqrt(self) -> Expr {
        Expr::apply(Func::Sqrt, self)
    }

    /// Number of distinct nodes reachable from this one.
    pub fn dag_size(&self) -> usize {
        let mut seen = hashbrown::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.key()) {
                continue;
            }
            for c in e.children() {
                stack.push(c.clone());
            }
        }
        seen.len()
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Var(..) => Vec::new(),
            Node::Neg(a) | Node::Pow(a, _) | Node::Apply(_, a) => vec![a],
            Node::Sum(v) | Node::Product(v) => v.iter().collect(),
            Node::Quotient(a, b) => vec![a, b],
        }
    }

    /// Derivative with respect to coordinate `var`.
    pub fn diff(&self, var: usize) -> Expr {
        Differentiator::new().diff(self, var)
    }

    pub fn eval(&self, point: &[f64]) -> crate::Result<f64> {
        Evaluator::new(point).eval(self)
    }

    pub fn simplify(&self) -> Expr {
        Simplifier::new().simplify(self)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $tr::$m(self, rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $tr::$m(self.clone(), rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $tr::$m(self.clone(), rhs.clone())
            }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: f64) -> Expr {
                $tr::$m(self, Expr::constant(rhs))
            }
        }
        impl $tr<f64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: f64) -> Expr {
                $tr::$m(self.clone(), Expr::constant(rhs))
            }
        }
        impl $tr<Expr> for f64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $tr::$m(Expr::constant(self), rhs)
            }
        }
        impl $tr<&Expr> for f64 {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $tr::$m(Expr::constant(self), rhs.clone())
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum(vec![a, b]));
binop!(Sub, sub, |a, b| Expr::sum(vec![a, -b]));
binop!(Mul, mul, |a, b| Expr::product(vec![a, b]));
binop!(Div, div, Expr::quotient);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.neg_node()
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.clone().neg_node()
    }
}

impl core::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::sum(iter.collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var(0, "x")
    }

    #[test]
    fn builders_fold_identities() {
        assert!((Expr::zero() * x()).is_zero());
        assert!((x() * 1.0).ptr_eq(&x()) || matches!((x() * 1.0).node(), Node::Var(0, _)));
        assert!(matches!((x() + 0.0).node(), Node::Var(..)));
        assert!(matches!((-(-x())).node(), Node::Var(..)));
        assert_eq!((Expr::constant(2.0) * 3.0).as_const(), Some(6.0));
        assert_eq!(Expr::constant(4.0).sqrt().as_const(), Some(2.0));
        assert!(matches!(Expr::constant(-1.0).ln().node(), Node::Apply(Func::Ln, _)));
        assert!(x().powi(0).is_one());
    }

    #[test]
    fn sharing_keeps_dag_small() {
        let mut e = x();
        for _ in 0..40 {
            e = &e * &e + &e;
        }
        assert!(e.dag_size() < 200);
        let d = e.diff(0);
        assert!(d.dag_size() < 2000);
    }
}
