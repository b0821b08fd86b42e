use super::{Expr, Func, Node};
use crate::error::{DomainKind, Error, Result};
use alloc::vec::Vec;
use hashbrown::HashMap;

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Var(usize),
    Neg(u32),
    Sum(u32, u32),
    Product(u32, u32),
    Quotient(u32, u32),
    Pow(u32, i32),
    Apply(Func, u32),
}

/// A set of expressions flattened into one instruction list.
///
/// Shared nodes are evaluated once per point, which is what makes evaluating
/// whole tensors of related expressions cheap.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    args: Vec<u32>,
    nodes: Vec<Expr>,
    roots: Vec<u32>,
    max_var: Option<usize>,
}

impl Tape {
    pub fn compile(roots: &[Expr]) -> Tape {
        let mut tape = Tape {
            ops: Vec::new(),
            args: Vec::new(),
            nodes: Vec::new(),
            roots: Vec::with_capacity(roots.len()),
            max_var: None,
        };
        let mut slot: HashMap<usize, u32> = HashMap::new();
        for root in roots {
            let r = tape.push_tree(root, &mut slot);
            tape.roots.push(r);
        }
        tape
    }

    fn push_tree(&mut self, root: &Expr, slot: &mut HashMap<usize, u32>) -> u32 {
        if let Some(&s) = slot.get(&root.key()) {
            return s;
        }
        // Iterative post-order walk; graphs from curvature code get deep.
        let mut stack: Vec<(Expr, bool)> = alloc::vec![(root.clone(), false)];
        while let Some((e, expanded)) = stack.pop() {
            if slot.contains_key(&e.key()) {
                continue;
            }
            if !expanded {
                stack.push((e.clone(), true));
                for c in e.children() {
                    if !slot.contains_key(&c.key()) {
                        stack.push((c.clone(), false));
                    }
                }
                continue;
            }
            let id = |c: &Expr| slot[&c.key()];
            let op = match e.node() {
                Node::Const(c) => Op::Const(*c),
                Node::Var(i, _) => {
                    self.max_var = Some(self.max_var.map_or(*i, |m| m.max(*i)));
                    Op::Var(*i)
                }
                Node::Neg(a) => Op::Neg(id(a)),
                Node::Sum(v) | Node::Product(v) => {
                    let start = self.args.len() as u32;
                    for c in v {
                        self.args.push(id(c));
                    }
                    let end = self.args.len() as u32;
                    if matches!(e.node(), Node::Sum(_)) {
                        Op::Sum(start, end)
                    } else {
                        Op::Product(start, end)
                    }
                }
                Node::Quotient(a, b) => Op::Quotient(id(a), id(b)),
                Node::Pow(a, k) => Op::Pow(id(a), *k),
                Node::Apply(f, a) => Op::Apply(*f, id(a)),
            };
            slot.insert(e.key(), self.ops.len() as u32);
            self.ops.push(op);
            self.nodes.push(e);
        }
        slot[&root.key()]
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Evaluates every root at `point`.
    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>> {
        if let Some(m) = self.max_var {
            if m >= point.len() {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "expression uses coordinate {m} but the point has {} entries",
                    point.len()
                )));
            }
        }
        let mut val: Vec<f64> = Vec::with_capacity(self.ops.len());
        for (i, op) in self.ops.iter().enumerate() {
            let v = match op {
                Op::Const(c) => *c,
                Op::Var(k) => point[*k],
                Op::Neg(a) => -val[*a as usize],
                Op::Sum(s, e) => self.args[*s as usize..*e as usize]
                    .iter()
                    .map(|&a| val[a as usize])
                    .sum(),
                Op::Product(s, e) => self.args[*s as usize..*e as usize]
                    .iter()
                    .map(|&a| val[a as usize])
                    .product(),
                Op::Quotient(a, b) => {
                    let d: f64 = val[*b as usize];
                    if d == 0.0 {
                        return Err(self.domain(i, DomainKind::DivisionByZero));
                    }
                    val[*a as usize] / d
                }
                Op::Pow(a, k) => {
                    let b: f64 = val[*a as usize];
                    if b == 0.0 && *k < 0 {
                        return Err(self.domain(i, DomainKind::DivisionByZero));
                    }
                    libm::pow(b, *k as f64)
                }
                Op::Apply(f, a) => {
                    let x: f64 = val[*a as usize];
                    let y = match f {
                        Func::Sin => libm::sin(x),
                        Func::Cos => libm::cos(x),
                        Func::Exp => libm::exp(x),
                        Func::Ln => {
                            if x <= 0.0 {
                                return Err(self.domain(i, DomainKind::LogOfNonPositive));
                            }
                            libm::log(x)
                        }
                        Func::Sqrt => {
                            if x < 0.0 {
                                return Err(self.domain(i, DomainKind::SqrtOfNegative));
                            }
                            libm::sqrt(x)
                        }
                    };
                    if !y.is_finite() {
                        return Err(self.domain(i, DomainKind::NonFinite));
                    }
                    y
                }
            };
            val.push(v);
        }
        let mut out = Vec::with_capacity(self.roots.len());
        for &r in &self.roots {
            let v = val[r as usize];
            if !v.is_finite() {
                return Err(self.domain(r as usize, DomainKind::NonFinite));
            }
            out.push(v);
        }
        Ok(out)
    }

    fn domain(&self, i: usize, kind: DomainKind) -> Error {
        Error::Domain {
            kind,
            subexpr: self.nodes[i].render(120),
        }
    }
}

/// Convenience wrapper evaluating single expressions at a fixed point.
pub struct Evaluator<'p> {
    point: &'p [f64],
}

impl<'p> Evaluator<'p> {
    pub fn new(point: &'p [f64]) -> Self {
        Evaluator { point }
    }

    pub fn eval(&self, e: &Expr) -> Result<f64> {
        Ok(Tape::compile(core::slice::from_ref(e)).eval(self.point)?[0])
    }

    pub fn eval_all(&self, es: &[Expr]) -> Result<Vec<f64>> {
        Tape::compile(es).eval(self.point)
    }
}
