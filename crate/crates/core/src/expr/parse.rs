use super::{Expr, Func};
use crate::error::{Error, Result};
use alloc::string::{String, ToString};
use alloc::sync::Arc;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: &'a [Arc<str>],
}

fn syntax(offset: usize, message: &str) -> Error {
    Error::Syntax {
        offset,
        message: message.to_string(),
    }
}

/// Parses `text` with `coords` as the only free symbols.
pub(crate) fn parse(text: &str, coords: &[Arc<str>]) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        coords,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(syntax(p.pos, "unexpected trailing input"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = alloc::vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(self.pos, "expected an integer exponent"));
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let k: i32 = digits
            .parse()
            .map_err(|_| syntax(start, "exponent out of range"))?;
        Ok(base.powi(if negative { -k } else { k }))
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(syntax(self.pos, "unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(syntax(self.pos, "expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(_) => Err(syntax(self.pos, "unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(syntax(start, "malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| syntax(start, "malformed number"))?;
        Ok(Expr::constant(v))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(f) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(syntax(self.pos, "expected `(` after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(syntax(self.pos, "expected `)`"));
            }
            return Ok(Expr::apply(f, arg));
        }
        match self.coords.iter().position(|c| &**c == name) {
            Some(i) => Ok(Expr::var(i, name)),
            None => Err(Error::UnknownSymbol(String::from(name))),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::chart::Chart;
    use crate::error::Error;

    #[test]
    fn precedence_and_associativity() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        let v = |s: &str| chart.parse(s).unwrap().eval(&[2.0, 3.0]).unwrap();
        assert_eq!(v("x + y*x"), 8.0);
        assert_eq!(v("x - y - x"), -3.0);
        assert_eq!(v("x/y/x"), 1.0 / 3.0);
        assert_eq!(v("-x^2"), -4.0);
        assert_eq!(v("x^-1"), 0.5);
        assert_eq!(v("2.5e1 + 1e-1"), 25.1);
        assert_eq!(v("x*-y"), -6.0);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        assert_eq!(
            chart.parse("x*").unwrap_err(),
            Error::Syntax {
                offset: 2,
                message: "unexpected end of input".into()
            }
        );
        assert!(matches!(chart.parse("x^"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(chart.parse("(x"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(chart.parse("sin x"), Err(Error::Syntax { .. })));
        assert!(matches!(chart.parse("x y"), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn unknown_symbol() {
        let chart = Chart::new(&["x", "y"]).unwrap();
        assert_eq!(chart.parse("x + z").unwrap_err(), Error::UnknownSymbol("z".into()));
    }
}
