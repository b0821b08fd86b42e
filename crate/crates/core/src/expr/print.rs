use super::{Expr, Node};
use alloc::string::String;
use core::fmt::{self, Write};

const SUM: u8 = 1;
const NEG: u8 = 2;
const PRODUCT: u8 = 3;
const DIVISOR: u8 = 4;
const ATOM: u8 = 6;

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Sum(_) => SUM,
        Node::Neg(_) => NEG,
        Node::Const(c) if *c < 0.0 => NEG,
        Node::Product(_) | Node::Quotient(..) => PRODUCT,
        Node::Pow(..) => 5,
        _ => ATOM,
    }
}

fn write_at<W: Write>(w: &mut W, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        w.write_char('(')?;
        write_expr(w, e)?;
        w.write_char(')')
    } else {
        write_expr(w, e)
    }
}

fn write_expr<W: Write>(w: &mut W, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Const(c) => write!(w, "{c:?}"),
        Node::Var(_, name) => w.write_str(name),
        Node::Neg(a) => {
            w.write_char('-')?;
            write_at(w, a, PRODUCT)
        }
        Node::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                match (i, t.node()) {
                    (0, _) => write_at(w, t, SUM)?,
                    (_, Node::Neg(a)) => {
                        w.write_str(" - ")?;
                        write_at(w, a, PRODUCT)?;
                    }
                    (_, Node::Const(c)) if *c < 0.0 => write!(w, " - {:?}", -c)?,
                    _ => {
                        w.write_str(" + ")?;
                        write_at(w, t, NEG)?;
                    }
                }
            }
            Ok(())
        }
        Node::Product(fs) => {
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    w.write_char('*')?;
                }
                write_at(w, f, PRODUCT)?;
            }
            Ok(())
        }
        Node::Quotient(a, b) => {
            write_at(w, a, PRODUCT)?;
            w.write_char('/')?;
            write_at(w, b, DIVISOR)
        }
        Node::Pow(a, k) => {
            write_at(w, a, ATOM)?;
            write!(w, "^{k}")
        }
        Node::Apply(f, a) => {
            w.write_str(f.name())?;
            w.write_char('(')?;
            write_expr(w, a)?;
            w.write_char(')')
        }
    }
}

/// Printing follows the grammar in the module docs, so the output parses back.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

struct Bounded {
    out: String,
    limit: usize,
}

impl Write for Bounded {
    fn write_str(&mut self, s: &str) -> fmt::Result {
        if self.out.len() + s.len() > self.limit {
            return Err(fmt::Error);
        }
        self.out.push_str(s);
        Ok(())
    }
}

impl Expr {
    /// Text form cut off after roughly `limit` bytes.
    ///
    /// Shared subgraphs print once per use, so the full text of a large
    /// graph can be exponentially long; use this for messages.
    pub fn render(&self, limit: usize) -> String {
        let mut b = Bounded {
            out: String::new(),
            limit,
        };
        match write_expr(&mut b, self) {
            Ok(()) => b.out,
            Err(_) => {
                b.out.push_str(" ...");
                b.out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::chart::Chart;
    use alloc::string::ToString;

    #[test]
    fn prints_in_grammar() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let cases = [
            ("x + y", "x + y"),
            ("x - y", "x - y"),
            ("x*(y + 1)", "x*(1.0 + y)"),
            ("x/(y*x)", "x/(y*x)"),
            ("-(x + y)", "-(x + y)"),
            ("x^-2", "x^-2"),
            ("sin(x)^2", "sin(x)^2"),
        ];
        for (src, want) in cases {
            assert_eq!(chart.parse(src).unwrap().to_string(), want, "{src}");
        }
    }

    #[test]
    fn render_truncates() {
        let chart = Chart::new(&["x"]).unwrap();
        let mut e = chart.parse("x").unwrap();
        for _ in 0..30 {
            e = &e * &e + &e;
        }
        let s = e.render(50);
        assert!(s.len() < 60 && s.ends_with("..."));
    }
}
