//! Expression trees for coefficient input.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'x' | 'pi' | param | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sqrt | abs | step
//! ```
//!
//! `step(e)` is right-continuous: 0 for `e < 0`, 1 for `e >= 0`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops;

use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn apply(self, l: f64, r: f64) -> f64 {
        match self {
            BinOp::Add => l + r,
            BinOp::Sub => l - r,
            BinOp::Mul => l * r,
            BinOp::Div => l / r,
            BinOp::Pow => l.powf(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Step,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Step,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Step => "step",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
            Func::Step => {
                if v >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Parse tree of a real expression in the single variable `x`.
///
/// Named parameters keep their name (for printing) and the value they were
/// bound to at parse time.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Param(String, f64),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn x() -> Expr {
        Expr::X
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn powi(self, n: i32) -> Expr {
        Expr::bin(BinOp::Pow, self, Expr::Num(n as f64))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Param(_, v) => *v,
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, l, r) => {
                // integer powers are common (V^2, x^3) and powf is slow and
                // inexact for negative bases.
                if let (BinOp::Pow, Expr::Num(n)) = (op, r.as_ref()) {
                    if n.fract() == 0.0 && n.abs() <= 64.0 {
                        return l.eval(x).powi(*n as i32);
                    }
                }
                op.apply(l.eval(x), r.eval(x))
            }
            Expr::Call(f, e) => f.apply(e.eval(x)),
        }
    }

    pub fn contains_x(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Num(_) | Expr::Param(..) => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.contains_x(),
            Expr::Bin(_, l, r) => l.contains_x() || r.contains_x(),
        }
    }

    /// Value of the expression if it does not depend on `x`.
    pub fn constant_value(&self) -> Option<f64> {
        (!self.contains_x()).then(|| self.eval(0.0))
    }

    /// `(slope, intercept)` if the expression is affine in `x`.
    pub fn affine(&self) -> Option<(f64, f64)> {
        match self {
            Expr::X => Some((1.0, 0.0)),
            e if !e.contains_x() => Some((0.0, e.eval(0.0))),
            Expr::Neg(e) => e.affine().map(|(m, c)| (-m, -c)),
            Expr::Bin(op, l, r) => {
                let (lm, lc) = l.affine()?;
                let (rm, rc) = r.affine()?;
                match op {
                    BinOp::Add => Some((lm + rm, lc + rc)),
                    BinOp::Sub => Some((lm - rm, lc - rc)),
                    BinOp::Mul if lm == 0.0 => Some((lc * rm, lc * rc)),
                    BinOp::Mul if rm == 0.0 => Some((lm * rc, lc * rc)),
                    BinOp::Div if rm == 0.0 => Some((lm / rc, lc / rc)),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Locations where a `step` with an affine argument switches.
    ///
    /// These are the discontinuities the expression introduces on its own;
    /// steps of non-affine arguments need explicit breakpoints.
    pub fn step_roots(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_step_roots(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_step_roots(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Num(_) | Expr::X | Expr::Param(..) => {}
            Expr::Neg(e) => e.collect_step_roots(out),
            Expr::Bin(_, l, r) => {
                l.collect_step_roots(out);
                r.collect_step_roots(out);
            }
            Expr::Call(f, e) => {
                e.collect_step_roots(out);
                if *f == Func::Step {
                    if let Some((m, c)) = e.affine() {
                        if m != 0.0 {
                            out.push(-c / m);
                        }
                    }
                }
            }
        }
    }

    /// Specialize the expression to the closed interval `[lo, hi]`.
    ///
    /// Steps whose affine argument keeps one sign on the open interval are
    /// replaced by their value there (so evaluating at `hi` uses the same
    /// branch as the interior), and `x`-free subtrees are folded.
    pub fn restrict(&self, lo: f64, hi: f64) -> Expr {
        let mid = 0.5 * (lo + hi);
        match self {
            Expr::Num(_) | Expr::X | Expr::Param(..) => self.clone(),
            Expr::Neg(e) => match e.restrict(lo, hi) {
                Expr::Num(v) => Expr::Num(-v),
                inner => Expr::Neg(Box::new(inner)),
            },
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.restrict(lo, hi), r.restrict(lo, hi));
                let folded = Expr::Bin(*op, Box::new(l), Box::new(r));
                match folded.constant_value() {
                    Some(v) if v.is_finite() => Expr::Num(v),
                    _ => folded,
                }
            }
            Expr::Call(f, e) => {
                let inner = e.restrict(lo, hi);
                if *f == Func::Step {
                    if let Some((m, c)) = inner.affine() {
                        let root = if m != 0.0 { -c / m } else { f64::NAN };
                        if m == 0.0 || root <= lo || root >= hi {
                            return Expr::Num(f.apply(m * mid + c));
                        }
                    }
                }
                match inner {
                    Expr::Num(v) => Expr::Num(f.apply(v)),
                    inner => Expr::Call(*f, Box::new(inner)),
                }
            }
        }
    }

    /// Parse `text`, binding every free name other than `x` and `pi` from
    /// `params`.
    pub fn parse(text: &str, params: &BTreeMap<String, f64>) -> Result<Expr, ParseError> {
        let tokens = lex(text)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            params,
            end: text.len(),
        };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some(t) => Err(ParseError::Syntax {
                offset: t.offset,
                message: format!("unexpected {}", t.kind.describe()),
            }),
        }
    }
}

/// Free-function form of [`Expr::parse`].
pub fn parse_expr(text: &str, params: &BTreeMap<String, f64>) -> Result<Expr, ParseError> {
    Expr::parse(text, params)
}

impl fmt::Display for Expr {
    /// Fully parenthesized, so that re-parsing yields the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => f.write_str("x"),
            Expr::Param(name, _) => f.write_str(name),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Add, self, rhs)
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Sub, self, rhs)
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Mul, self, rhs)
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Div, self, rhs)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Expr {
        Expr::Num(v)
    }
}

// ---------------------------------------------------------------------------
// lexer

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Num(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("name `{s}`"),
            TokenKind::Op(c) => format!("operator `{c}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{lit}`"),
                })?;
                out.push(Token {
                    kind: TokenKind::Num(v),
                    offset: start,
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    kind: TokenKind::Op(c as char),
                    offset: start,
                });
                i += 1;
            }
            b'(' => {
                out.push(Token {
                    kind: TokenKind::LParen,
                    offset: start,
                });
                i += 1;
            }
            b')' => {
                out.push(Token {
                    kind: TokenKind::RParen,
                    offset: start,
                });
                i += 1;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// parser

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    params: &'a BTreeMap<String, f64>,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c), ..
            }) => Some(*c),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::bin(if op == '+' { BinOp::Add } else { BinOp::Sub }, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::bin(if op == '*' { BinOp::Mul } else { BinOp::Div }, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        let Some(tok) = self.next() else {
            return Err(ParseError::Syntax {
                offset,
                message: "unexpected end of expression".into(),
            });
        };
        match tok.kind {
            TokenKind::Num(v) => Ok(Expr::Num(v)),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    match self.next() {
                        Some(Token {
                            kind: TokenKind::LParen,
                            ..
                        }) => {}
                        _ => {
                            return Err(ParseError::Syntax {
                                offset: tok.offset,
                                message: format!("function `{name}` needs a parenthesized argument"),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::call(func, arg));
                }
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "pi" => Ok(Expr::Num(PI)),
                    _ => match self.params.get(&name) {
                        Some(v) => Ok(Expr::Param(name, *v)),
                        None => Err(ParseError::UnboundName {
                            offset: tok.offset,
                            name,
                        }),
                    },
                }
            }
            other => Err(ParseError::Syntax {
                offset: tok.offset,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let offset = self.offset();
        match self.next() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => Ok(()),
            _ => Err(ParseError::Syntax {
                offset,
                message: "expected `)`".into(),
            }),
        }
    }
}
