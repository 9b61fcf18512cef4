//! Tiny arithmetic grammar for analytic field generators.
//!
//! Supported: `+ - * / ^`, `sin cos exp`, the constant `pi`, decimal
//! numbers, and the variables `x y z` (sphere embedding) and `u v`
//! (torus chart). `^` is right-associative and binds tighter than unary
//! minus.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    Z,
    U,
    V,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::U => "u",
            Var::V => "v",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Func {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed analytic expression.
#[derive(Debug, Clone)]
pub struct Expr {
    root: Node,
    text: String,
}

/// Values bound to the five grammar variables at one evaluation point.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub u: f64,
    pub v: f64,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        p.skip_ws();
        let root = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(Expr { root, text: text.to_string() })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Variables referenced anywhere in the expression.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        collect_vars(&self.root, &mut out);
        out
    }

    pub fn eval(&self, b: &Bindings) -> f64 {
        eval(&self.root, b)
    }
}

fn collect_vars(n: &Node, out: &mut Vec<Var>) {
    match n {
        Node::Var(v) => {
            if !out.contains(v) {
                out.push(*v);
            }
        }
        Node::Num(_) => {}
        Node::Neg(a) | Node::Call(_, a) => collect_vars(a, out),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
    }
}

fn eval(n: &Node, b: &Bindings) -> f64 {
    match n {
        Node::Num(c) => *c,
        Node::Var(Var::X) => b.x,
        Node::Var(Var::Y) => b.y,
        Node::Var(Var::Z) => b.z,
        Node::Var(Var::U) => b.u,
        Node::Var(Var::V) => b.v,
        Node::Neg(a) => -eval(a, b),
        Node::Add(l, r) => eval(l, b) + eval(r, b),
        Node::Sub(l, r) => eval(l, b) - eval(r, b),
        Node::Mul(l, r) => eval(l, b) * eval(r, b),
        Node::Div(l, r) => eval(l, b) / eval(r, b),
        Node::Pow(l, r) => eval(l, b).powf(eval(r, b)),
        Node::Call(Func::Sin, a) => eval(a, b).sin(),
        Node::Call(Func::Cos, a) => eval(a, b).cos(),
        Node::Call(Func::Exp, a) => eval(a, b).exp(),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::ExprParse { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            // right-associative; exponent may carry a unary minus
            let exp = self.unary()?;
            Ok(Node::Pow(Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(self.err("expected number, variable, function, or `(`")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else {
                break;
            }
        }
        // optional exponent part, e.g. 1.5e-3
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| self.err("malformed number"))?;
        self.skip_ws();
        Ok(Node::Num(value))
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        self.skip_ws();
        let node = match name.as_str() {
            "pi" => Node::Num(std::f64::consts::PI),
            "x" => Node::Var(Var::X),
            "y" => Node::Var(Var::Y),
            "z" => Node::Var(Var::Z),
            "u" => Node::Var(Var::U),
            "v" => Node::Var(Var::V),
            "sin" | "cos" | "exp" => {
                let func = match name.as_str() {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    _ => Func::Exp,
                };
                if !self.eat(b'(') {
                    return Err(self.err("expected `(` after function name"));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Node::Call(func, Box::new(arg))
            }
            _ => {
                self.pos = start;
                return Err(self.err("unknown identifier"));
            }
        };
        Ok(node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(text: &str, b: Bindings) -> f64 {
        Expr::parse(text).unwrap().eval(&b)
    }

    #[test]
    fn arithmetic_and_precedence() {
        let b = Bindings::default();
        assert_eq!(ev("1 + 2 * 3", b), 7.0);
        assert_eq!(ev("(1 + 2) * 3", b), 9.0);
        assert_eq!(ev("2 ^ 3 ^ 2", b), 512.0);
        assert_eq!(ev("-2 ^ 2", b), -4.0);
        assert_eq!(ev("2 ^ -1", b), 0.5);
        assert_eq!(ev("1 - 2 - 3", b), -4.0);
        assert_eq!(ev("8 / 4 / 2", b), 1.0);
    }

    #[test]
    fn functions_and_constants() {
        let b = Bindings { u: 0.25, ..Default::default() };
        assert!((ev("sin(2*pi*u)", b) - 1.0).abs() < 1e-15);
        assert!((ev("cos(pi)", b) + 1.0).abs() < 1e-15);
        assert!((ev("exp(0)", b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn variables_are_tracked() {
        let e = Expr::parse("x^2 + sin(y*z)").unwrap();
        let vars = e.variables();
        assert!(vars.contains(&Var::X) && vars.contains(&Var::Y) && vars.contains(&Var::Z));
        assert!(!vars.contains(&Var::U));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("2 +").is_err());
        assert!(Expr::parse("foo(1)").is_err());
        assert!(Expr::parse("sin 1").is_err());
        assert!(Expr::parse("1..2").is_err());
        assert!(Expr::parse("(1").is_err());
    }

    #[test]
    fn scientific_notation() {
        let b = Bindings::default();
        assert_eq!(ev("1.5e2", b), 150.0);
        assert_eq!(ev("2e-1", b), 0.2);
    }
}
