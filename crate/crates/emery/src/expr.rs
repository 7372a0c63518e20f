//! Closed-form scalar expressions over chart coordinates.
//!
//! The grammar (standard precedence, pow > unary-neg > mul/div > add/sub,
//! left-associative):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' exponent)?
//! base   := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Power exponents must fold to a constant at parse time, so every tree
//! stays closed-form under repeated differentiation without branch analysis.
//! `pi` is a built-in constant; the known functions are sin, cos, exp, ln,
//! sqrt, sinh, cosh and tanh.

use crate::error::{DomainErrorKind, EvalError, ParseError};
use crate::jet::Jet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
        }
    }

    fn from_name(s: &str) -> Option<UnaryOp> {
        Some(match s {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            "sinh" => UnaryOp::Sinh,
            "cosh" => UnaryOp::Cosh,
            "tanh" => UnaryOp::Tanh,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parsed expression tree. Variables are resolved to coordinate indices of
/// the owning chart at parse time.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var { index: usize, name: String },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Base raised to a constant exponent.
    Pow(Box<Expr>, f64),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(index: usize, name: impl Into<String>) -> Expr {
        Expr::Var {
            index,
            name: name.into(),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Add, Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Binary(BinOp::Div, Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Unary(UnaryOp::Neg, Box::new(a))
    }

    pub fn pow(a: Expr, e: f64) -> Expr {
        Expr::Pow(Box::new(a), e)
    }

    pub fn apply(op: UnaryOp, a: Expr) -> Expr {
        Expr::Unary(op, Box::new(a))
    }

    /// Indices of the coordinates this expression actually reads.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var { index, .. } => out.push(*index),
            Expr::Unary(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Pow(a, _) => a.collect_vars(out),
        }
    }

    /// Rebuild the tree with every variable index (and name) replaced
    /// according to `map`, e.g. when lifting a fiber expression into a
    /// product chart.
    pub fn remap_vars(&self, map: &[(usize, usize)], names: &[String]) -> Expr {
        match self {
            Expr::Const(v) => Expr::Const(*v),
            Expr::Var { index, name } => {
                let new = map
                    .iter()
                    .find(|(from, _)| from == index)
                    .map(|(_, to)| *to)
                    .unwrap_or(*index);
                Expr::Var {
                    index: new,
                    name: names.get(new).cloned().unwrap_or_else(|| name.clone()),
                }
            }
            Expr::Unary(op, a) => Expr::Unary(*op, Box::new(a.remap_vars(map, names))),
            Expr::Binary(op, a, b) => Expr::Binary(
                *op,
                Box::new(a.remap_vars(map, names)),
                Box::new(b.remap_vars(map, names)),
            ),
            Expr::Pow(a, e) => Expr::Pow(Box::new(a.remap_vars(map, names)), *e),
        }
    }

    fn err(&self, kind: DomainErrorKind, p: &[f64]) -> EvalError {
        EvalError {
            kind,
            point: p.to_vec(),
        }
    }

    /// Plain value evaluation at a point.
    pub fn eval(&self, p: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(v) => *v,
            Expr::Var { index, .. } => p[*index],
            Expr::Unary(op, a) => {
                let x = a.eval(p)?;
                match op {
                    UnaryOp::Neg => -x,
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Ln => {
                        if x <= 0.0 {
                            return Err(self.err(DomainErrorKind::LogNonPositive, p));
                        }
                        x.ln()
                    }
                    UnaryOp::Sqrt => {
                        if x < 0.0 {
                            return Err(self.err(DomainErrorKind::SqrtNegative, p));
                        }
                        x.sqrt()
                    }
                    UnaryOp::Sinh => x.sinh(),
                    UnaryOp::Cosh => x.cosh(),
                    UnaryOp::Tanh => x.tanh(),
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval(p)?;
                let y = b.eval(p)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(self.err(DomainErrorKind::DivisionByZero, p));
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, e) => {
                let x = a.eval(p)?;
                pow_checked(x, *e).map_err(|k| self.err(k, p))?
            }
        })
    }

    /// Value and exact partial derivatives to order 3 at a point.
    pub fn eval_jet(&self, p: &[f64]) -> Result<Jet, EvalError> {
        let n = p.len();
        Ok(match self {
            Expr::Const(v) => Jet::constant(n, *v),
            Expr::Var { index, .. } => Jet::coordinate(n, *index, p[*index]),
            Expr::Unary(op, a) => {
                let x = a.eval_jet(p)?;
                match op {
                    UnaryOp::Neg => x.neg(),
                    UnaryOp::Sin => x.sin(),
                    UnaryOp::Cos => x.cos(),
                    UnaryOp::Exp => x.exp(),
                    UnaryOp::Ln => {
                        if x.value <= 0.0 {
                            return Err(self.err(DomainErrorKind::LogNonPositive, p));
                        }
                        x.ln()
                    }
                    UnaryOp::Sqrt => {
                        if x.value < 0.0 {
                            return Err(self.err(DomainErrorKind::SqrtNegative, p));
                        }
                        if x.value == 0.0 {
                            return Err(self.err(DomainErrorKind::SqrtDerivativeAtZero, p));
                        }
                        x.sqrt()
                    }
                    UnaryOp::Sinh => x.sinh(),
                    UnaryOp::Cosh => x.cosh(),
                    UnaryOp::Tanh => x.tanh(),
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval_jet(p)?;
                let y = b.eval_jet(p)?;
                match op {
                    BinOp::Add => x.add(&y),
                    BinOp::Sub => x.sub(&y),
                    BinOp::Mul => x.mul(&y),
                    BinOp::Div => {
                        if y.value == 0.0 {
                            return Err(self.err(DomainErrorKind::DivisionByZero, p));
                        }
                        x.div(&y)
                    }
                }
            }
            Expr::Pow(a, e) => {
                let x = a.eval_jet(p)?;
                // domain checks mirror the value path, tightened where the
                // derivative itself is singular
                let is_int = e.fract() == 0.0 && e.abs() < 1e15;
                if !is_int && x.value <= 0.0 {
                    return Err(self.err(DomainErrorKind::FractionalPowNonPositive, p));
                }
                if is_int && *e < 0.0 && x.value == 0.0 {
                    return Err(self.err(DomainErrorKind::ZeroToNegativePow, p));
                }
                x.powc(*e)
            }
        })
    }
}

fn pow_checked(x: f64, e: f64) -> Result<f64, DomainErrorKind> {
    let is_int = e.fract() == 0.0 && e.abs() < 1e15;
    if is_int {
        if x == 0.0 && e < 0.0 {
            return Err(DomainErrorKind::ZeroToNegativePow);
        }
        if e.abs() <= i32::MAX as f64 {
            return Ok(x.powi(e as i32));
        }
        return Ok(x.powf(e));
    }
    if x < 0.0 || (x == 0.0 && e < 0.0) {
        return Err(DomainErrorKind::FractionalPowNonPositive);
    }
    Ok(x.powf(e))
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

// precedence levels used for minimal parenthesization
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Unary(UnaryOp::Neg, _) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, need: bool) -> fmt::Result {
            if need {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(v) => {
                if *v < 0.0 {
                    // prints as unary minus so the output reparses
                    write!(f, "-{}", -v)
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Var { name, .. } => write!(f, "{name}"),
            Expr::Unary(UnaryOp::Neg, a) => {
                write!(f, "-")?;
                paren(f, a, level(a) < 3)
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => {
                let (sym, lv) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                paren(f, a, level(a) < lv)?;
                write!(f, " {sym} ")?;
                // right operand of - and / needs strict parens at equal level
                let strict = matches!(op, BinOp::Sub | BinOp::Div);
                paren(f, b, level(b) < lv + u8::from(strict))
            }
            Expr::Pow(a, e) => {
                paren(f, a, level(a) < 5)?;
                if *e < 0.0 {
                    write!(f, "^-{}", -e)
                } else {
                    write!(f, "^{e}")
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next_tok(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let c = self.src[self.pos];
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = self.pos;
            while end < self.src.len() && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
            {
                end += 1;
            }
            if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                let mut e = end + 1;
                if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                    e += 1;
                }
                let digits = e;
                while e < self.src.len() && self.src[e].is_ascii_digit() {
                    e += 1;
                }
                if e > digits {
                    end = e;
                }
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
            let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            self.pos = end;
            return Ok((Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
            self.pos = end;
            return Ok((Tok::Ident(text), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{}`", c as char),
        })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    coords: &'a [&'a str],
}

/// Parse `text` against the coordinate names of a chart.
pub fn parse(text: &str, coords: &[&str]) -> Result<Expr, ParseError> {
    let mut lx = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let (t, off) = lx.next_tok()?;
        let end = t == Tok::End;
        toks.push((t, off));
        if end {
            break;
        }
    }
    let mut p = Parser {
        toks,
        pos: 0,
        coords,
    };
    let e = p.expr()?;
    let (t, off) = p.peek();
    if *t != Tok::End {
        return Err(ParseError::Syntax {
            offset: off,
            message: format!("unexpected token `{}`", tok_name(t)),
        });
    }
    Ok(e)
}

fn tok_name(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("{v}"),
        Tok::Ident(s) => s.clone(),
        Tok::Plus => "+".into(),
        Tok::Minus => "-".into(),
        Tok::Star => "*".into(),
        Tok::Slash => "/".into(),
        Tok::Caret => "^".into(),
        Tok::LParen => "(".into(),
        Tok::RParen => ")".into(),
        Tok::End => "end of input".into(),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> (&Tok, usize) {
        let (t, off) = &self.toks[self.pos];
        (t, *off)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<usize, ParseError> {
        let (t, off) = self.bump();
        if t == want {
            Ok(off)
        } else {
            Err(ParseError::Syntax {
                offset: off,
                message: format!("expected `{}`, found `{}`", tok_name(&want), tok_name(&t)),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::add(acc, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    acc = Expr::mul(acc, self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    acc = Expr::div(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek().0 == Tok::Minus {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek().0 == Tok::Caret {
            self.bump();
            let (_, off) = self.peek();
            let e = self.exponent()?;
            let v = fold_const(&e).ok_or(ParseError::NonConstantExponent { offset: off })?;
            return Ok(Expr::pow(base, v));
        }
        Ok(base)
    }

    /// Exponents allow a number, a negated exponent, or a parenthesized
    /// expression, which must fold to a constant.
    fn exponent(&mut self) -> Result<Expr, ParseError> {
        match self.peek().0.clone() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::neg(self.exponent()?))
            }
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            t => {
                let (_, off) = self.peek();
                Err(ParseError::Syntax {
                    offset: off,
                    message: format!("expected exponent, found `{}`", tok_name(&t)),
                })
            }
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (t, off) = self.bump();
        match t {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Ident(name) => {
                if *self.peek().0 == Tok::LParen {
                    let op = UnaryOp::from_name(&name)
                        .ok_or(ParseError::UnknownIdentifier {
                            name: name.clone(),
                            offset: off,
                        })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::apply(op, arg));
                }
                if let Some(index) = self.coords.iter().position(|c| *c == name) {
                    return Ok(Expr::var(index, name));
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                Err(ParseError::UnknownIdentifier { name, offset: off })
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(ParseError::Syntax {
                offset: off,
                message: format!("expected expression, found `{}`", tok_name(&other)),
            }),
        }
    }
}

/// Evaluate a variable-free subtree to a constant, if possible.
fn fold_const(e: &Expr) -> Option<f64> {
    if !e.vars().is_empty() {
        return None;
    }
    e.eval(&[]).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p4(s: &str) -> Result<Expr, ParseError> {
        parse(s, &["x", "y", "z", "t"])
    }

    #[test]
    fn power_with_parenthesized_constant_exponent() {
        let e = p4("t^(2/3)").unwrap();
        match e {
            Expr::Pow(base, ex) => {
                assert_eq!(*base, Expr::var(3, "t"));
                assert_abs_diff_eq!(ex, 2.0 / 3.0, epsilon = 0.0);
            }
            other => panic!("expected pow, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_is_rejected() {
        let err = p4("sin(x)*exp(2*a)").unwrap_err();
        match err {
            ParseError::UnknownIdentifier { name, offset } => {
                assert_eq!(name, "a");
                assert_eq!(offset, 13);
            }
            other => panic!("expected unknown identifier, got {other:?}"),
        }
    }

    #[test]
    fn non_constant_exponent_is_rejected() {
        let err = p4("x^(y+1)").unwrap_err();
        assert!(matches!(err, ParseError::NonConstantExponent { .. }));
    }

    #[test]
    fn print_reparses_to_identical_tree() {
        for s in [
            "(1+0.1*sin(x))",
            "x - y - z",
            "x - (y - z)",
            "x / y / z",
            "-x^2",
            "(-x)^2",
            "2*x^-1 + sqrt(y+2) - sinh(z)/cosh(z)",
            "t^(2/3) * exp(-t) + tanh(x*y)",
            "1e-3 + 2.5E2*x",
        ] {
            let e1 = p4(s).unwrap();
            let e2 = p4(&e1.to_string()).unwrap();
            assert_eq!(e1, e2, "round-trip failed for `{s}` -> `{e1}`");
        }
    }

    #[test]
    fn precedence_pow_over_neg_over_mul() {
        // -x^2 at x=3 must be -9, not 9
        let e = p4("-x^2").unwrap();
        assert_eq!(e.eval(&[3.0, 0.0, 0.0, 0.0]).unwrap(), -9.0);
        // 2*x^2 = 2*(x^2)
        let e = p4("2*x^2").unwrap();
        assert_eq!(e.eval(&[3.0, 0.0, 0.0, 0.0]).unwrap(), 18.0);
        // left association: 8/4/2 = 1
        let e = p4("8/4/2").unwrap();
        assert_eq!(e.eval(&[0.0; 4]).unwrap(), 1.0);
        // x^-2
        let e = p4("x^-2").unwrap();
        assert_eq!(e.eval(&[2.0, 0.0, 0.0, 0.0]).unwrap(), 0.25);
    }

    #[test]
    fn eval_jet_product_example() {
        let e = parse("x*y", &["x", "y"]).unwrap();
        let j = e.eval_jet(&[2.0, 3.0]).unwrap();
        assert_eq!(j.value, 6.0);
        assert_eq!(j.d1(0), 3.0);
        assert_eq!(j.d1(1), 2.0);
        assert_eq!(j.d2(0, 1), 1.0);
        assert_eq!(j.d3(0, 0, 1), 0.0);
    }

    #[test]
    fn eval_jet_ln_example() {
        let e = parse("ln(t)", &["t"]).unwrap();
        let j = e.eval_jet(&[2.0]).unwrap();
        assert_abs_diff_eq!(j.value, std::f64::consts::LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(j.d1(0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(j.d2(0, 0), -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(j.d3(0, 0, 0), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn domain_errors_carry_the_point() {
        let e = parse("ln(x)", &["x"]).unwrap();
        let err = e.eval(&[-1.0]).unwrap_err();
        assert_eq!(err.kind, DomainErrorKind::LogNonPositive);
        assert_eq!(err.point, vec![-1.0]);

        let e = parse("1/x", &["x"]).unwrap();
        assert_eq!(
            e.eval(&[0.0]).unwrap_err().kind,
            DomainErrorKind::DivisionByZero
        );

        let e = parse("x^(1/2)", &["x"]).unwrap();
        assert_eq!(
            e.eval(&[-1.0]).unwrap_err().kind,
            DomainErrorKind::FractionalPowNonPositive
        );
    }

    #[test]
    fn pi_is_a_builtin_constant() {
        let e = parse("sin(pi/2)", &["x"]).unwrap();
        assert_abs_diff_eq!(e.eval(&[0.0]).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn vars_reports_used_coordinates() {
        let e = p4("sin(x)*z + 2").unwrap();
        assert_eq!(e.vars(), vec![0, 2]);
    }

    #[test]
    fn syntax_error_offsets() {
        let err = p4("x + * y").unwrap_err();
        match err {
            ParseError::Syntax { offset, .. } => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        let err = p4("x + (y").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }
}
