//! A small expression language over `x` and `y`.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, numbers, the constants
//! `pi` and `e`, and the functions `sin cos tan exp log sqrt abs atan`,
//! `atan2(a, b)`, `min(a, b)`, `max(a, b)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Y,
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Atan,
    Atan2,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "tan" => (Func::Tan, 1),
            "exp" => (Func::Exp, 1),
            "log" | "ln" => (Func::Log, 1),
            "sqrt" => (Func::Sqrt, 1),
            "abs" => (Func::Abs, 1),
            "atan" => (Func::Atan, 1),
            "atan2" => (Func::Atan2, 2),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            _ => return None,
        })
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            s: src.as_bytes(),
            i: 0,
        };
        let e = p.sum()?;
        p.ws();
        if p.i != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Y => y,
            Expr::Neg(a) => -a.eval(x, y),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, y), b.eval(x, y));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => a.powf(b),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(x, y);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                    Func::Sqrt => a.sqrt(),
                    Func::Abs => a.abs(),
                    Func::Atan => a.atan(),
                    Func::Atan2 => a.atan2(args[1].eval(x, y)),
                    Func::Min => a.min(args[1].eval(x, y)),
                    Func::Max => a.max(args[1].eval(x, y)),
                }
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::parse(1, format!("{msg} at column {}", self.i + 1))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat(b'+') {
                Op::Add
            } else if self.eat(b'-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                Op::Mul
            } else if self.eat(b'/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    // Right-associative; binds tighter than unary minus on its left.
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.ws();
        let start = self.i;
        let Some(&c) = self.s.get(self.i) else {
            return Err(self.err("unexpected end of expression"));
        };
        if c == b'(' {
            self.i += 1;
            let e = self.sum()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                self.i += 1;
            }
            if self.i < self.s.len() && (self.s[self.i] == b'e' || self.s[self.i] == b'E') {
                let save = self.i;
                self.i += 1;
                if self.i < self.s.len() && (self.s[self.i] == b'+' || self.s[self.i] == b'-') {
                    self.i += 1;
                }
                if self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                        self.i += 1;
                    }
                } else {
                    self.i = save;
                }
            }
            let text = std::str::from_utf8(&self.s[start..self.i]).unwrap();
            return text
                .parse()
                .map(Expr::Num)
                .map_err(|_| self.err(&format!("bad number '{text}'")));
        }
        if c.is_ascii_alphabetic() {
            while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                self.i += 1;
            }
            let name = std::str::from_utf8(&self.s[start..self.i]).unwrap();
            match name {
                "x" => return Ok(Expr::X),
                "y" => return Ok(Expr::Y),
                "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                "e" => return Ok(Expr::Num(std::f64::consts::E)),
                _ => {}
            }
            let Some((f, arity)) = Func::lookup(name) else {
                self.i = start;
                return Err(self.err(&format!("unknown identifier '{name}'")));
            };
            if !self.eat(b'(') {
                return Err(self.err(&format!("expected '(' after {name}")));
            }
            let mut args = vec![self.sum()?];
            while self.eat(b',') {
                args.push(self.sum()?);
            }
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            if args.len() != arity {
                return Err(self.err(&format!("{name} takes {arity} argument(s), got {}", args.len())));
            }
            return Ok(Expr::Call(f, args));
        }
        Err(self.err(&format!("unexpected '{}'", c as char)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64, y: f64) -> f64 {
        Expr::parse(s).unwrap().eval(x, y)
    }

    #[test]
    fn arithmetic() {
        assert_eq!(ev("1 + 2 * 3", 0., 0.), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0., 0.), 9.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0., 0.), 512.0);
        assert_eq!(ev("-2 ^ 2", 0., 0.), -4.0);
        assert_eq!(ev("x - y - 1", 5., 2.), 2.0);
        assert_eq!(ev("8 / 4 / 2", 0., 0.), 1.0);
        assert_eq!(ev("1.5e2 + .5", 0., 0.), 150.5);
    }

    #[test]
    fn functions_and_constants() {
        assert!((ev("sin(pi/2) + cos(0) + exp(0)", 0., 0.) - 3.0).abs() < 1e-15);
        assert_eq!(ev("sqrt(abs(-16))", 0., 0.), 4.0);
        assert!((ev("atan2(y, x)", -1., 0.) - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(ev("max(x, y) + min(x, y)", 3., 4.), 7.0);
        assert!((ev("e", 0., 0.) - std::f64::consts::E).abs() < 1e-15);
        assert!((ev("exp(-5*((x-0.5)^2+(y-0.5)^2))", 0.5, 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        for bad in ["", "1 +", "foo(1)", "sin 1", "(1", "1 2", "atan2(1)", "x $ y"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }
}
