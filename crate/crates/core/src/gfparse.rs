//! A small language for writing generating functions in `t` (and the formal
//! parameter `x`) and expanding them as truncated series over `Q[x]`.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = atom [ "^" exponent ] ;
//! atom     = integer | "t" | "x" | "exp" "(" expr ")" | "(" expr ")" ;
//! exponent = [ "-" ] integer | "x" | "(" inner ")" ;
//! inner    = [ "-" ] integer | "x" [ ("+" | "-") integer ] ;
//! ```
//!
//! Whitespace is ignored between tokens. Source spans are byte offsets.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::powerseries::{binomial_series, exp_series, SeriesError, TruncatedSeries};
use crate::ring::{int, Polynomial, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// Exponents allowed after `^`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Int(i64),
    /// `x + c`; `c = 0` is plain `x`.
    XPlus(i64),
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    /// Nonnegative integer literal.
    Num(BigInt),
    T,
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Exp(Box<Expr>),
}

/// Expression node with its source span. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Num(a), Num(b)) => a == b,
            (T, T) | (X, X) => true,
            (Neg(a), Neg(b)) | (Exp(a), Exp(b)) => a == b,
            (Add(a, b), Add(c, d))
            | (Sub(a, b), Sub(c, d))
            | (Mul(a, b), Mul(c, d))
            | (Div(a, b), Div(c, d)) => a == c && b == d,
            (Pow(a, e), Pow(b, f)) => a == b && e == f,
            _ => false,
        }
    }
}

impl Eq for Expr {}

impl Expr {
    fn new(kind: ExprKind, start: usize, end: usize) -> Self {
        Expr {
            kind,
            span: Span { start, end },
        }
    }

    /// Builds a node with an empty span, for constructing trees in code.
    pub fn synthetic(kind: ExprKind) -> Self {
        Expr::new(kind, 0, 0)
    }

    fn precedence(&self) -> u8 {
        match self.kind {
            ExprKind::Add(..) | ExprKind::Sub(..) => 1,
            ExprKind::Mul(..) | ExprKind::Div(..) => 2,
            ExprKind::Neg(_) => 3,
            ExprKind::Pow(..) => 4,
            _ => 5,
        }
    }
}

/// Prints with the minimum parentheses needed to re-parse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match &self.kind {
            ExprKind::Num(n) => write!(f, "{n}"),
            ExprKind::T => f.write_str("t"),
            ExprKind::X => f.write_str("x"),
            ExprKind::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, 3)
            }
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                let op = if matches!(self.kind, ExprKind::Add(..)) { "+" } else { "-" };
                wrap(f, a, 1)?;
                write!(f, " {op} ")?;
                wrap(f, b, 2)
            }
            ExprKind::Mul(a, b) | ExprKind::Div(a, b) => {
                let op = if matches!(self.kind, ExprKind::Mul(..)) { "*" } else { "/" };
                wrap(f, a, 2)?;
                write!(f, " {op} ")?;
                wrap(f, b, 3)
            }
            ExprKind::Pow(a, e) => {
                wrap(f, a, 5)?;
                match e {
                    Exponent::Int(n) if *n < 0 => write!(f, "^({n})"),
                    Exponent::Int(n) => write!(f, "^{n}"),
                    Exponent::XPlus(0) => f.write_str("^x"),
                    Exponent::XPlus(c) if *c < 0 => write!(f, "^(x - {})", c.unsigned_abs()),
                    Exponent::XPlus(c) => write!(f, "^(x + {c})"),
                }
            }
            ExprKind::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

const ATOM_START: [&str; 6] = ["integer", "`t`", "`x`", "`exp`", "`(`", "`-`"];

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Next token and its byte range, without consuming it.
    fn peek(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start, start));
        };
        if c.is_ascii_digit() {
            let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let n = rest[..len].parse().expect("ascii digits");
            return Ok((Tok::Int(n), start, start + len));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            let name = &rest[..len];
            if !matches!(name, "t" | "x" | "exp") {
                return Err(ParseError::UnknownIdentifier {
                    offset: start,
                    name: name.to_string(),
                });
            }
            return Ok((Tok::Ident(name.to_string()), start, start + len));
        }
        Ok((Tok::Sym(c), start, start + c.len_utf8()))
    }

    fn bump(&mut self, end: usize) {
        self.pos = end;
    }

    fn unexpected(&mut self, expected: &[&'static str]) -> ParseError {
        match self.peek() {
            Ok((tok, offset, _)) => ParseError::Syntax {
                offset,
                expected: expected.to_vec(),
                found: tok.describe(),
            },
            Err(e) => e,
        }
    }

    fn expect_sym(&mut self, sym: char, label: &'static str) -> Result<usize, ParseError> {
        match self.peek()? {
            (Tok::Sym(c), _, end) if c == sym => {
                self.bump(end);
                Ok(end)
            }
            _ => Err(self.unexpected(&[label])),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek()? {
                (Tok::Sym(op @ ('+' | '-')), _, end) => {
                    self.bump(end);
                    let rhs = self.term()?;
                    let (s, e) = (lhs.span.start, rhs.span.end);
                    let kind = if op == '+' {
                        ExprKind::Add(Box::new(lhs), Box::new(rhs))
                    } else {
                        ExprKind::Sub(Box::new(lhs), Box::new(rhs))
                    };
                    lhs = Expr::new(kind, s, e);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek()? {
                (Tok::Sym(op @ ('*' | '/')), _, end) => {
                    self.bump(end);
                    let rhs = self.unary()?;
                    let (s, e) = (lhs.span.start, rhs.span.end);
                    let kind = if op == '*' {
                        ExprKind::Mul(Box::new(lhs), Box::new(rhs))
                    } else {
                        ExprKind::Div(Box::new(lhs), Box::new(rhs))
                    };
                    lhs = Expr::new(kind, s, e);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let (Tok::Sym('-'), start, end) = self.peek()? {
            self.bump(end);
            let inner = self.unary()?;
            let e = inner.span.end;
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), start, e));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let (Tok::Sym('^'), _, end) = self.peek()? {
            self.bump(end);
            let exponent = self.exponent()?;
            let s = base.span.start;
            return Ok(Expr::new(ExprKind::Pow(Box::new(base), exponent), s, self.pos));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, start, end) = self.peek()?;
        match tok {
            Tok::Int(n) => {
                self.bump(end);
                Ok(Expr::new(ExprKind::Num(n), start, end))
            }
            Tok::Ident(name) => {
                self.bump(end);
                match name.as_str() {
                    "t" => Ok(Expr::new(ExprKind::T, start, end)),
                    "x" => Ok(Expr::new(ExprKind::X, start, end)),
                    _ => {
                        self.expect_sym('(', "`(`")?;
                        let arg = self.expr()?;
                        let close = self.expect_sym(')', "`)`")?;
                        Ok(Expr::new(ExprKind::Exp(Box::new(arg)), start, close))
                    }
                }
            }
            Tok::Sym('(') => {
                self.bump(end);
                let inner = self.expr()?;
                let close = self.expect_sym(')', "`)`")?;
                // parentheses widen the span so errors point at the whole group
                Ok(Expr::new(inner.kind, start, close))
            }
            _ => Err(self.unexpected(&ATOM_START)),
        }
    }

    fn integer(&mut self, negative: bool) -> Result<i64, ParseError> {
        match self.peek()? {
            (Tok::Int(n), offset, end) => {
                self.bump(end);
                let v = i64::try_from(n).map_err(|_| ParseError::Syntax {
                    offset,
                    expected: vec!["exponent that fits in 64 bits"],
                    found: "oversized integer".into(),
                })?;
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        match self.peek()? {
            (Tok::Int(_), _, _) => Ok(Exponent::Int(self.integer(false)?)),
            (Tok::Sym('-'), _, end) => {
                self.bump(end);
                Ok(Exponent::Int(self.integer(true)?))
            }
            (Tok::Ident(name), _, end) if name == "x" => {
                self.bump(end);
                Ok(Exponent::XPlus(0))
            }
            (Tok::Sym('('), _, end) => {
                self.bump(end);
                let e = self.inner_exponent()?;
                self.expect_sym(')', "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected(&["integer", "`-`", "`x`", "`(`"])),
        }
    }

    fn inner_exponent(&mut self) -> Result<Exponent, ParseError> {
        match self.peek()? {
            (Tok::Int(_), _, _) => Ok(Exponent::Int(self.integer(false)?)),
            (Tok::Sym('-'), _, end) => {
                self.bump(end);
                Ok(Exponent::Int(self.integer(true)?))
            }
            (Tok::Ident(name), _, end) if name == "x" => {
                self.bump(end);
                match self.peek()? {
                    (Tok::Sym(op @ ('+' | '-')), _, end) => {
                        self.bump(end);
                        Ok(Exponent::XPlus(self.integer(op == '-')?))
                    }
                    _ => Ok(Exponent::XPlus(0)),
                }
            }
            _ => Err(self.unexpected(&["integer", "`-`", "`x`"])),
        }
    }
}

pub fn parse(input: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: input, pos: 0 };
    let e = p.expr()?;
    match p.peek()? {
        (Tok::End, _, _) => Ok(e),
        _ => Err(p.unexpected(&["operator", "end of input"])),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by a series whose constant term is not a nonzero constant (offset {}..{})", span.start, span.end)]
    NonInvertibleDivisor { span: Span },
    #[error("exp of a series with nonzero constant term (offset {}..{})", span.start, span.end)]
    ExpNonZeroConstant { span: Span },
    #[error("symbolic power of a series whose constant term is not 1 (offset {}..{})", span.start, span.end)]
    SymbolicPowerBase { span: Span },
    #[error("negative power of a non-invertible series (offset {}..{})", span.start, span.end)]
    NonInvertiblePower { span: Span },
    #[error("exponent {exponent} too large (offset {}..{})", span.start, span.end)]
    ExponentTooLarge { exponent: i64, span: Span },
}

impl EvalError {
    pub fn span(&self) -> Span {
        match self {
            EvalError::NonInvertibleDivisor { span }
            | EvalError::ExpNonZeroConstant { span }
            | EvalError::SymbolicPowerBase { span }
            | EvalError::NonInvertiblePower { span }
            | EvalError::ExponentTooLarge { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GfError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

type Series = TruncatedSeries<Polynomial>;

/// Expands `e` modulo `t^(order+1)` with coefficients in `Q[x]`.
pub fn eval_series(e: &Expr, order: usize) -> Result<Series, EvalError> {
    let span = e.span;
    let same = "operands share the truncation order";
    Ok(match &e.kind {
        ExprKind::Num(n) => Series::constant(Polynomial::constant(Rational::from_integer(n.clone())), order),
        ExprKind::T => Series::variable(order),
        ExprKind::X => Series::constant(Polynomial::x(), order),
        ExprKind::Neg(a) => eval_series(a, order)?.negate(),
        ExprKind::Add(a, b) => eval_series(a, order)?.add(&eval_series(b, order)?).expect(same),
        ExprKind::Sub(a, b) => eval_series(a, order)?.sub(&eval_series(b, order)?).expect(same),
        ExprKind::Mul(a, b) => eval_series(a, order)?.mul(&eval_series(b, order)?).expect(same),
        ExprKind::Div(a, b) => {
            let divisor = eval_series(b, order)?
                .invert()
                .map_err(|_| EvalError::NonInvertibleDivisor { span: b.span })?;
            eval_series(a, order)?.mul(&divisor).expect(same)
        }
        ExprKind::Pow(a, Exponent::Int(k)) => {
            let base = eval_series(a, order)?;
            if k.unsigned_abs() > u64::from(u32::MAX) {
                return Err(EvalError::ExponentTooLarge { exponent: *k, span });
            }
            base.pow_signed(*k).map_err(|err| match err {
                SeriesError::NotInvertible => EvalError::NonInvertiblePower { span: a.span },
                other => unreachable!("pow only fails on inversion: {other}"),
            })?
        }
        ExprKind::Pow(a, Exponent::XPlus(c)) => {
            let base = eval_series(a, order)?;
            if *base.constant_term() != Polynomial::one() {
                return Err(EvalError::SymbolicPowerBase { span: a.span });
            }
            let mut u = base;
            let mut coeffs = u.coeffs().to_vec();
            coeffs[0] = Polynomial::zero();
            u = Series::new(coeffs, order);
            let exponent = Polynomial::new(vec![int(*c), Rational::one()]);
            binomial_series(&exponent, order).compose(&u).expect(same)
        }
        ExprKind::Exp(a) => {
            let arg = eval_series(a, order)?;
            if !arg.constant_term().is_zero() {
                return Err(EvalError::ExpNonZeroConstant { span: a.span });
            }
            exp_series(order).lift().compose(&arg).expect(same)
        }
    })
}

/// Parses and expands in one step.
pub fn expand(input: &str, order: usize) -> Result<Series, GfError> {
    Ok(eval_series(&parse(input)?, order)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub equal: bool,
    /// Index of the first coefficient where the sides differ.
    pub first_difference: Option<usize>,
}

pub fn compare(lhs: &Expr, rhs: &Expr, order: usize) -> Result<Comparison, EvalError> {
    let a = eval_series(lhs, order)?;
    let b = eval_series(rhs, order)?;
    let first_difference = a.coeffs().iter().zip(b.coeffs()).position(|(p, q)| p != q);
    Ok(Comparison {
        equal: first_difference.is_none(),
        first_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerseries::exp_minus_one;
    use crate::ring::rat;
    use proptest::prelude::*;

    fn n(v: i64) -> Expr {
        Expr::synthetic(ExprKind::Num(v.into()))
    }

    fn bx(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    fn t() -> Expr {
        Expr::synthetic(ExprKind::T)
    }

    fn egf_constants(s: &Series) -> Vec<Rational> {
        s.egf_coefficients()
            .into_iter()
            .map(|p| p.as_constant().expect("constant coefficient"))
            .collect()
    }

    #[test]
    fn parses_with_precedence() {
        let kernel = Expr::synthetic(ExprKind::Div(
            bx(n(2)),
            bx(Expr::synthetic(ExprKind::Add(bx(n(2)), bx(t())))),
        ));
        assert_eq!(
            parse("(2/(2+t))^2").unwrap(),
            Expr::synthetic(ExprKind::Pow(bx(kernel.clone()), Exponent::Int(2)))
        );
        let got = parse("2/(2+t) * (1+t)^x").unwrap();
        let one_plus_t = Expr::synthetic(ExprKind::Add(bx(n(1)), bx(t())));
        assert_eq!(
            got,
            Expr::synthetic(ExprKind::Mul(
                bx(kernel),
                bx(Expr::synthetic(ExprKind::Pow(bx(one_plus_t), Exponent::XPlus(0))))
            ))
        );
        // unary minus binds looser than ^
        assert_eq!(
            parse("-t^2").unwrap(),
            Expr::synthetic(ExprKind::Neg(bx(Expr::synthetic(ExprKind::Pow(bx(t()), Exponent::Int(2))))))
        );
        // left associativity
        assert_eq!(
            parse("1 - t - t").unwrap(),
            Expr::synthetic(ExprKind::Sub(
                bx(Expr::synthetic(ExprKind::Sub(bx(n(1)), bx(t())))),
                bx(t())
            ))
        );
    }

    #[test]
    fn exponent_forms() {
        let base = Expr::synthetic(ExprKind::Add(bx(n(1)), bx(t())));
        for (src, e) in [
            ("(1+t)^(x+3)", Exponent::XPlus(3)),
            ("(1+t)^(x - 2)", Exponent::XPlus(-2)),
            ("(1+t)^-1", Exponent::Int(-1)),
            ("(1+t)^(-4)", Exponent::Int(-4)),
            ("(1+t)^(x)", Exponent::XPlus(0)),
        ] {
            assert_eq!(parse(src).unwrap(), Expr::synthetic(ExprKind::Pow(bx(base.clone()), e)), "{src}");
        }
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let err = parse("2/^t").unwrap_err();
        assert_eq!(err.offset(), 2);
        match err {
            ParseError::Syntax { expected, found, .. } => {
                assert!(expected.contains(&"`(`"));
                assert_eq!(found, "`^`");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(parse("(1+t").unwrap_err().offset(), 4);
        assert_eq!(parse("t t").unwrap_err().offset(), 2);
        assert_eq!(parse("").unwrap_err().offset(), 0);
        assert_eq!(parse("t^(x*2)").unwrap_err().offset(), 4);
        assert_eq!(
            parse("1 + k").unwrap_err(),
            ParseError::UnknownIdentifier { offset: 4, name: "k".into() }
        );
        assert!(parse("sin(t)").is_err());
    }

    #[test]
    fn spans_cover_groups() {
        let e = parse("1 + (2 + t)").unwrap();
        let ExprKind::Add(_, rhs) = &e.kind else { panic!() };
        assert_eq!(rhs.span, Span { start: 4, end: 11 });
        assert_eq!(e.span, Span { start: 0, end: 11 });
    }

    #[test]
    fn eval_examples() {
        let s = expand("(2/(2+t))^1", 3).unwrap();
        assert_eq!(egf_constants(&s), vec![int(1), rat(-1, 2), rat(1, 2), rat(-3, 4)]);
        assert_eq!(expand("t", 5).unwrap(), Series::variable(5));
        let s = expand("exp(t) - 1", 4).unwrap();
        let coeffs: Vec<_> = s.coeffs().iter().map(|p| p.as_constant().unwrap()).collect();
        assert_eq!(coeffs, vec![int(0), int(1), rat(1, 2), rat(1, 6), rat(1, 24)]);
    }

    #[test]
    fn exp_minus_one_matches_engine() {
        for order in 0..=16 {
            assert_eq!(expand("exp(t)-1", order).unwrap(), exp_minus_one(order).lift());
        }
    }

    #[test]
    fn negative_powers_invert() {
        assert_eq!(expand("(2+t)^-1", 6).unwrap(), expand("1/(2+t)", 6).unwrap());
        assert_eq!(expand("(1+t)^(x-1)", 6).unwrap(), expand("(1+t)^x/(1+t)", 6).unwrap());
    }

    #[test]
    fn eval_errors_point_at_subexpression() {
        let err = expand("1/(t + x)", 4).unwrap_err();
        assert_eq!(err, GfError::Eval(EvalError::NonInvertibleDivisor { span: Span { start: 2, end: 9 } }));
        let err = expand("exp(1 + t)", 4).unwrap_err();
        assert_eq!(err, GfError::Eval(EvalError::ExpNonZeroConstant { span: Span { start: 4, end: 9 } }));
        let err = expand("(2+t)^x", 4).unwrap_err();
        assert_eq!(err, GfError::Eval(EvalError::SymbolicPowerBase { span: Span { start: 0, end: 5 } }));
        let err = expand("t^-1", 4).unwrap_err();
        assert!(matches!(err, GfError::Eval(EvalError::NonInvertiblePower { .. })));
        // 1/(exp(t)+1) is fine: constant term 2
        assert!(expand("2/(exp(t)+1)", 4).is_ok());
    }

    #[test]
    fn compare_examples() {
        let same = parse("(2/(2+t))^2 * (1+t)^2").unwrap();
        assert!(compare(&same, &same, 8).unwrap().equal);
        let a = parse("2/(2+t) * 2/(2+t)").unwrap();
        let b = parse("(2/(2+t))^2").unwrap();
        assert_eq!(compare(&a, &b, 8).unwrap(), Comparison { equal: true, first_difference: None });
        let a = parse("(1+t)^x * (1+t)^1").unwrap();
        let b = parse("(1+t)^x").unwrap();
        assert_eq!(compare(&a, &b, 8).unwrap().first_difference, Some(1));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0i64..20).prop_map(n),
            Just(t()),
            Just(Expr::synthetic(ExprKind::X)),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            let exponent = prop_oneof![
                (-3i64..5).prop_map(Exponent::Int),
                (-3i64..4).prop_map(Exponent::XPlus),
            ];
            prop_oneof![
                inner.clone().prop_map(|a| Expr::synthetic(ExprKind::Neg(bx(a)))),
                inner.clone().prop_map(|a| Expr::synthetic(ExprKind::Exp(bx(a)))),
                (inner.clone(), exponent).prop_map(|(a, e)| Expr::synthetic(ExprKind::Pow(bx(a), e))),
                (inner.clone(), inner.clone(), 0..4u8).prop_map(|(a, b, op)| {
                    let (a, b) = (bx(a), bx(b));
                    Expr::synthetic(match op {
                        0 => ExprKind::Add(a, b),
                        1 => ExprKind::Sub(a, b),
                        2 => ExprKind::Mul(a, b),
                        _ => ExprKind::Div(a, b),
                    })
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_round_trips(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
            prop_assert_eq!(reparsed, e, "{}", printed);
        }

        #[test]
        fn evaluation_is_deterministic(e in arb_expr()) {
            prop_assert_eq!(eval_series(&e, 5), eval_series(&e, 5));
        }
    }
}
