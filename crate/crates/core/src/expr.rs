//! Real-valued expressions in one variable `x`.
//!
//! Grammar (`^` is right-associative, unary minus binds tighter than `^`):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-'? atom
//! atom   := number | 'pi' | 'x' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Positions in syntax errors are 1-based character columns.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Gamma,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "gamma" => Func::Gamma,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Gamma => "gamma",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
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
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Decimal literal; `text` is kept so printing reproduces the input.
    Num {
        value: Rational,
        text: String,
    },
    Pi,
    X,
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
    },
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        Parser::new(text)?.parse_all()
    }

    pub fn num(text: &str) -> Expr {
        Expr::Num {
            value: decimal_to_rational(text).expect("valid decimal literal"),
            text: text.to_string(),
        }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn contains_x(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Num { .. } | Expr::Pi => false,
            Expr::Neg(e) => e.contains_x(),
            Expr::Binary { lhs, rhs, .. } => lhs.contains_x() || rhs.contains_x(),
            Expr::Call { arg, .. } => arg.contains_x(),
        }
    }

    /// Evaluates at `x`, working at the precision of `x`.
    pub fn eval(&self, x: &Float) -> Result<Float> {
        let v = self.eval_inner(x)?;
        if v.is_nan() {
            return Err(Error::Evaluation(format!(
                "`{self}` is undefined at x = {}",
                x.to_f64()
            )));
        }
        Ok(v)
    }

    fn eval_inner(&self, x: &Float) -> Result<Float> {
        let p = x.prec();
        Ok(match self {
            Expr::Num { value, .. } => Float::with_val(p, value),
            Expr::Pi => Float::with_val(p, Constant::Pi),
            Expr::X => x.clone(),
            Expr::Neg(e) => -e.eval_inner(x)?,
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.eval_inner(x)?;
                match op {
                    BinOp::Pow => match rhs.const_rational().filter(|r| *r.denom() == 1) {
                        Some(r) => match r.numer().to_i32() {
                            Some(k) => a.pow(k),
                            None => a.pow(rhs.eval_inner(x)?),
                        },
                        None => {
                            let b = rhs.eval_inner(x)?;
                            if a.is_sign_negative() && !a.is_zero() {
                                return Err(Error::Evaluation(format!(
                                    "negative base {} raised to non-integer power in `{self}`",
                                    a.to_f64()
                                )));
                            }
                            a.pow(b)
                        }
                    },
                    _ => {
                        let b = rhs.eval_inner(x)?;
                        match op {
                            BinOp::Add => a + b,
                            BinOp::Sub => a - b,
                            BinOp::Mul => a * b,
                            BinOp::Div => a / b,
                            BinOp::Pow => unreachable!(),
                        }
                    }
                }
            }
            Expr::Call { func, arg } => {
                let a = arg.eval_inner(x)?;
                match func {
                    Func::Exp => a.exp(),
                    Func::Log => a.ln(),
                    Func::Sqrt => a.sqrt(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Gamma => a.gamma(),
                }
            }
        })
    }

    /// Exact value of an `x`-free subtree built from literals and
    /// rational operations (integer powers only).
    pub fn const_rational(&self) -> Option<Rational> {
        match self {
            Expr::Num { value, .. } => Some(value.clone()),
            Expr::Pi | Expr::X | Expr::Call { .. } => None,
            Expr::Neg(e) => e.const_rational().map(|v| -v),
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.const_rational()?;
                let b = rhs.const_rational()?;
                match op {
                    BinOp::Add => Some(a + b),
                    BinOp::Sub => Some(a - b),
                    BinOp::Mul => Some(a * b),
                    BinOp::Div => (b != 0).then(|| a / b),
                    BinOp::Pow => {
                        if *b.denom() != 1 {
                            return None;
                        }
                        let k = b.numer().to_i32().filter(|k| k.abs() <= 4096)?;
                        if k < 0 && a == 0 {
                            return None;
                        }
                        Some(a.pow(k))
                    }
                }
            }
        }
    }

    /// Value of an `x`-free subtree as a float at `bits`.
    pub fn const_float(&self, bits: u32) -> Option<Float> {
        if self.contains_x() {
            return None;
        }
        self.eval(&Float::new(bits)).ok()
    }

    /// Coefficients (ascending powers) when the expression is a polynomial
    /// in `x` with rational coefficients.
    pub fn as_polynomial(&self) -> Option<Vec<Rational>> {
        let mut c = self.poly_inner()?;
        while c.len() > 1 && c.last().is_some_and(|v| *v == 0) {
            c.pop();
        }
        Some(c)
    }

    fn poly_inner(&self) -> Option<Vec<Rational>> {
        match self {
            Expr::Num { value, .. } => Some(vec![value.clone()]),
            Expr::X => Some(vec![Rational::new(), Rational::from(1)]),
            Expr::Pi | Expr::Call { .. } => None,
            Expr::Neg(e) => Some(e.poly_inner()?.into_iter().map(|v| -v).collect()),
            Expr::Binary { op, lhs, rhs } => match op {
                BinOp::Add | BinOp::Sub => {
                    let a = lhs.poly_inner()?;
                    let b = rhs.poly_inner()?;
                    let n = a.len().max(b.len());
                    Some(
                        (0..n)
                            .map(|i| {
                                let x = a.get(i).cloned().unwrap_or_default();
                                let y = b.get(i).cloned().unwrap_or_default();
                                if *op == BinOp::Add {
                                    x + y
                                } else {
                                    x - y
                                }
                            })
                            .collect(),
                    )
                }
                BinOp::Mul => Some(rational_convolve(&lhs.poly_inner()?, &rhs.poly_inner()?)),
                BinOp::Div => {
                    let d = rhs.const_rational()?;
                    if d == 0 {
                        return None;
                    }
                    Some(lhs.poly_inner()?.into_iter().map(|v| v / &d).collect())
                }
                BinOp::Pow => {
                    let k = rhs.const_rational()?;
                    if *k.denom() != 1 || !(0..=256).contains(&k) {
                        return None;
                    }
                    let k = k.numer().to_u32()?;
                    let base = lhs.poly_inner()?;
                    let mut acc = vec![Rational::from(1)];
                    for _ in 0..k {
                        acc = rational_convolve(&acc, &base);
                    }
                    Some(acc)
                }
            },
        }
    }

    /// Splits a top-level product into `(factor, +1 | -1)` where `-1`
    /// marks a divisor.
    pub(crate) fn product_factors(&self) -> Vec<(&Expr, i32)> {
        let mut out = Vec::new();
        self.collect_factors(1, &mut out);
        out
    }

    fn collect_factors<'a>(&'a self, sign: i32, out: &mut Vec<(&'a Expr, i32)>) {
        match self {
            Expr::Binary {
                op: BinOp::Mul,
                lhs,
                rhs,
            } => {
                lhs.collect_factors(sign, out);
                rhs.collect_factors(sign, out);
            }
            Expr::Binary {
                op: BinOp::Div,
                lhs,
                rhs,
            } => {
                lhs.collect_factors(sign, out);
                rhs.collect_factors(-sign, out);
            }
            _ => out.push((self, sign)),
        }
    }
}

pub(crate) fn rational_convolve(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    out
}

/// Binding strength used by the printer; atoms are 4.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op, .. } => match op {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 3,
        },
        Expr::Neg(_) => 0,
        _ => 4,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num { text, .. } => write!(f, "{text}"),
            Expr::Pi => write!(f, "pi"),
            Expr::X => write!(f, "x"),
            Expr::Neg(e) => {
                if precedence(e) == 4 {
                    write!(f, "-{e}")
                } else {
                    write!(f, "-({e})")
                }
            }
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
            Expr::Binary { op, lhs, rhs } => {
                let own = precedence(self);
                // Left operand: same level is fine for left-associative ops;
                // `^` is right-associative so its left side always needs
                // grouping unless atomic.
                let lhs_paren = match op {
                    BinOp::Pow => precedence(lhs) < 4,
                    _ => precedence(lhs) < own,
                };
                let rhs_paren = match op {
                    BinOp::Pow => precedence(rhs) < 3,
                    _ => precedence(rhs) <= own,
                };
                if lhs_paren {
                    write!(f, "({lhs})")?;
                } else {
                    write!(f, "{lhs}")?;
                }
                write!(f, "{}", op.symbol())?;
                if rhs_paren {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
        }
    }
}

/// Parses a decimal literal such as `2`, `0.25` or `1.5e-3` exactly.
pub fn decimal_to_rational(text: &str) -> Option<Rational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    let (neg, int_part) = match int_part.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits: String = [int_part, frac_part].concat();
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n = Integer::from_str_radix(&digits, 10).ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from(10);
    let mut r = Rational::from(n);
    if scale >= 0 {
        r *= ten.pow(scale);
    } else {
        r /= ten.pow(-scale);
    }
    Some(if neg { -r } else { r })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
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

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part only when followed by a digit (optionally signed)
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            if decimal_to_rational(&s).is_none() {
                return Err(Error::Syntax {
                    position: pos,
                    message: format!("malformed number `{s}`"),
                });
            }
            out.push((Tok::Num(s), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else {
            return Err(Error::Syntax {
                position: pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Syntax {
                position: 1,
                message: "empty expression".into(),
            });
        }
        Ok(Self {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        Err(Error::Syntax {
            position: self.pos(),
            message: format!("expected {wanted}, found {}", self.peek().describe()),
        })
    }

    fn parse_all(mut self) -> Result<Expr> {
        let e = self.expr()?;
        if *self.peek() != Tok::End {
            return self.unexpected("operator or end of input");
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.factor()?;
            return Ok(Expr::binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(text) => {
                self.bump();
                Ok(Expr::Num {
                    value: decimal_to_rational(&text).expect("checked by tokenizer"),
                    text,
                })
            }
            Tok::Ident(name) => {
                let (_, position) = self.bump();
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "pi" => Ok(Expr::Pi),
                    _ => {
                        let func = Func::from_name(&name).ok_or(Error::UnknownIdentifier { name, position })?;
                        if *self.peek() != Tok::LParen {
                            return self.unexpected("`(` after function name");
                        }
                        self.bump();
                        let arg = self.expr()?;
                        if *self.peek() != Tok::RParen {
                            return self.unexpected("`)`");
                        }
                        self.bump();
                        Ok(Expr::Call {
                            func,
                            arg: Box::new(arg),
                        })
                    }
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.unexpected("`)`");
                }
                self.bump();
                Ok(e)
            }
            _ => self.unexpected("a number, `x`, `pi`, a function call or `(`"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at(e: &str, x: f64) -> f64 {
        Expr::parse(e).unwrap().eval(&Float::with_val(200, x)).unwrap().to_f64()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(at("1+2*3", 0.0), 7.0);
        assert_eq!(at("2^3^2", 0.0), 512.0);
        assert_eq!(at("-2^2", 0.0), 4.0);
        assert_eq!(at("8/2/2", 0.0), 2.0);
        assert_eq!(at("10-3-2", 0.0), 5.0);
        assert!((at("exp(-x)", 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((at("gamma(x)", 5.0) - 24.0).abs() < 1e-12);
        assert!((at("sqrt(pi)*cos(0)+sin(0)+log(1)", 0.0) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert_eq!(at("1.5e1", 0.0), 15.0);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            Expr::parse("x^^2"),
            Err(Error::Syntax {
                position: 3,
                message: "expected a number, `x`, `pi`, a function call or `(`, found `^`".into()
            })
        );
        assert!(matches!(Expr::parse("(x+1"), Err(Error::Syntax { position: 5, .. })));
        assert!(matches!(Expr::parse(""), Err(Error::Syntax { .. })));
        assert!(matches!(Expr::parse("x $ 2"), Err(Error::Syntax { position: 3, .. })));
        assert_eq!(
            Expr::parse("2*foo(x)"),
            Err(Error::UnknownIdentifier {
                name: "foo".into(),
                position: 3
            })
        );
    }

    #[test]
    fn polynomial_detection() {
        let p = Expr::parse("(x-1)^2/2 + 3").unwrap().as_polynomial().unwrap();
        assert_eq!(
            p,
            vec![Rational::from((7, 2)), Rational::from(-1), Rational::from((1, 2))]
        );
        assert!(Expr::parse("exp(x)").unwrap().as_polynomial().is_none());
        assert!(Expr::parse("x^(1/2)").unwrap().as_polynomial().is_none());
        assert_eq!(Expr::parse("x").unwrap().as_polynomial().unwrap().len(), 2);
    }

    #[test]
    fn non_integer_power_of_negative_base_fails() {
        let e = Expr::parse("x^(1/2)").unwrap();
        assert!(e.eval(&Float::with_val(64, -1)).is_err());
        assert_eq!(e.eval(&Float::with_val(64, 4)).unwrap(), 2);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            Just(Expr::X),
            Just(Expr::Pi),
            prop_oneof![Just("2"), Just("0.5"), Just("13"), Just("1e-3"), Just("3.25")].prop_map(Expr::num),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    prop_oneof![
                        Just(BinOp::Add),
                        Just(BinOp::Sub),
                        Just(BinOp::Mul),
                        Just(BinOp::Div),
                        Just(BinOp::Pow)
                    ],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
                (prop_oneof![Just(Func::Exp), Just(Func::Log), Just(Func::Gamma)], inner)
                    .prop_map(|(func, a)| Expr::Call { func, arg: Box::new(a) }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = Expr::parse(&printed).unwrap();
            prop_assert_eq!(reparsed, e, "printed as {}", printed);
        }
    }
}
