//! Class expressions: parsing, canonical rendering and evaluation.

use std::fmt;

use c2bordism_core::context::C2Context;
use c2bordism_core::equivariant::{twisted_projective, EqClass};
use c2bordism_core::extended::{ext_add, ext_mul, gamma, ExtClass};
use c2bordism_core::kernel::F2Poly;
use c2bordism_core::omega::is_excluded_degree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Zero,
    One,
    /// `[Gamma^j RP^m_sigma]`
    RPs(u32, u32),
    D(u32, u32),
    X(u32),
    A,
    U,
    Gamma(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at column {}: {}",
            self.pos + 1,
            self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value = text[start..i].parse::<u64>().map_err(|_| ParseError {
                pos: start,
                message: "integer too large".into(),
            })?;
            out.push((start, Tok::Int(value)));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+*^(),".contains(ch) {
            out.push((i, Tok::Sym(ch)));
            i += 1;
        } else {
            return Err(ParseError {
                pos: i,
                message: format!(
                    "unexpected character `{}`",
                    text[i..].chars().next().unwrap()
                ),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        while self.eat('+') {
            lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.power()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.eat('^') {
            match self.peek() {
                Some(&Tok::Int(k)) => {
                    let k = u32::try_from(k).or_else(|_| self.err("exponent too large"))?;
                    self.at += 1;
                    base = Expr::Pow(Box::new(base), k);
                }
                _ => return self.err("expected a nonnegative integer exponent"),
            }
        }
        Ok(base)
    }

    fn int_args(&mut self, name: &str, arity: usize) -> Result<Vec<u32>, ParseError> {
        let open = self.pos();
        self.expect('(')?;
        let mut args = Vec::new();
        loop {
            match self.peek() {
                Some(&Tok::Int(k)) => {
                    args.push(u32::try_from(k).or_else(|_| self.err("argument too large"))?);
                    self.at += 1;
                }
                _ => return self.err("expected an integer argument"),
            }
            if !self.eat(',') {
                break;
            }
        }
        self.expect(')')?;
        if args.len() != arity {
            return Err(ParseError {
                pos: open,
                message: format!("{name} expects {arity} argument(s), found {}", args.len()),
            });
        }
        Ok(args)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(0)) => {
                self.at += 1;
                Ok(Expr::Zero)
            }
            Some(Tok::Int(1)) => {
                self.at += 1;
                Ok(Expr::One)
            }
            Some(Tok::Int(k)) => {
                self.err(format!("only the literals 0 and 1 are allowed, found {k}"))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match name.as_str() {
                    "a" => Ok(Expr::A),
                    "u" => Ok(Expr::U),
                    "RPs" => {
                        let v = self.int_args("RPs", 2)?;
                        if v[0] == 0 {
                            return Err(ParseError {
                                pos: start,
                                message: "RPs(m, j) needs m >= 1".into(),
                            });
                        }
                        Ok(Expr::RPs(v[0], v[1]))
                    }
                    "d" => {
                        let v = self.int_args("d", 2)?;
                        if v[0] == 0 {
                            return Err(ParseError {
                                pos: start,
                                message: "d(i, j) needs i >= 1".into(),
                            });
                        }
                        Ok(Expr::D(v[0], v[1]))
                    }
                    "x" => Ok(Expr::X(self.int_args("x", 1)?[0])),
                    "Gamma" => {
                        self.expect('(')?;
                        let inner = self.sum()?;
                        self.expect(')')?;
                        Ok(Expr::Gamma(Box::new(inner)))
                    }
                    _ => Err(ParseError {
                        pos: start,
                        message: format!("unknown name `{name}`"),
                    }),
                }
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
    };
    let e = p.sum()?;
    if p.at != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Zero => f.write_str("0"),
            Expr::One => f.write_str("1"),
            Expr::RPs(m, j) => write!(f, "RPs({m},{j})"),
            Expr::D(i, j) => write!(f, "d({i},{j})"),
            Expr::X(g) => write!(f, "x({g})"),
            Expr::A => f.write_str("a"),
            Expr::U => f.write_str("u"),
            Expr::Gamma(e) => write!(f, "Gamma({e})"),
            Expr::Add(l, r) => match **r {
                Expr::Add(..) => write!(f, "{l} + ({r})"),
                _ => write!(f, "{l} + {r}"),
            },
            Expr::Mul(l, r) => {
                match **l {
                    Expr::Add(..) => write!(f, "({l})")?,
                    _ => write!(f, "{l}")?,
                }
                f.write_str("*")?;
                match **r {
                    Expr::Add(..) | Expr::Mul(..) => write!(f, "({r})"),
                    _ => write!(f, "{r}"),
                }
            }
            Expr::Pow(b, k) => match **b {
                Expr::Add(..) | Expr::Mul(..) => write!(f, "({b})^{k}"),
                _ => write!(f, "{b}^{k}"),
            },
        }
    }
}

/// The value of an expression: a class in the extended ring, or the literal zero,
/// which has every bidegree.
#[derive(Clone, Debug)]
pub enum Value {
    Zero,
    Class(ExtClass),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Zero => "0".into(),
            Value::Class(c) => c.render(),
        }
    }
}

#[derive(Debug)]
pub enum EvalError {
    Core(c2bordism_core::Error),
    Type(String),
}

impl From<c2bordism_core::Error> for EvalError {
    fn from(e: c2bordism_core::Error) -> Self {
        EvalError::Core(e)
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Core(e) => write!(f, "{e}"),
            EvalError::Type(m) => f.write_str(m),
        }
    }
}

fn class(m: EqClass) -> Value {
    Value::Class(ExtClass::from_eq(m))
}

pub fn evaluate(ctx: &C2Context, e: &Expr) -> Result<Value, EvalError> {
    Ok(match e {
        Expr::Zero => Value::Zero,
        Expr::One => class(EqClass::one(ctx)),
        Expr::RPs(m, j) => class(twisted_projective(ctx, *m, *j)?),
        Expr::D(i, j) => class(EqClass::d(ctx, *i, *j)?),
        Expr::X(g) => {
            if *g == 0 || is_excluded_degree(*g) {
                return Err(EvalError::Type(format!("there is no generator x({g})")));
            }
            let v = ctx.omega().x_index(*g).ok_or_else(|| {
                c2bordism_core::Error::TruncationExceeded(format!(
                    "x({g}) has degree {g} > {}",
                    ctx.n()
                ))
            })?;
            class(EqClass::new(ctx, F2Poly::var(ctx.eq_vars(), v), *g as i64)?)
        }
        Expr::A => Value::Class(ExtClass::a(ctx)),
        Expr::U => Value::Class(ExtClass::u(ctx)),
        Expr::Gamma(inner) => match evaluate(ctx, inner)? {
            Value::Zero => Value::Zero,
            Value::Class(c) if c.sigma_weight() == 0 => class(gamma(ctx, c.m())?),
            Value::Class(_) => {
                return Err(EvalError::Type(
                    "Gamma applies only to classes without a or u".into(),
                ))
            }
        },
        Expr::Add(l, r) => match (evaluate(ctx, l)?, evaluate(ctx, r)?) {
            (Value::Zero, v) | (v, Value::Zero) => v,
            (Value::Class(x), Value::Class(y)) => Value::Class(ext_add(ctx, &x, &y)?),
        },
        Expr::Mul(l, r) => match (evaluate(ctx, l)?, evaluate(ctx, r)?) {
            (Value::Zero, _) | (_, Value::Zero) => Value::Zero,
            (Value::Class(x), Value::Class(y)) => Value::Class(ext_mul(ctx, &x, &y)?),
        },
        Expr::Pow(b, k) => {
            let base = evaluate(ctx, b)?;
            let mut acc = class(EqClass::one(ctx));
            for _ in 0..*k {
                acc = match (&acc, &base) {
                    (_, Value::Zero) | (Value::Zero, _) => Value::Zero,
                    (Value::Class(x), Value::Class(y)) => Value::Class(ext_mul(ctx, x, y)?),
                };
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse("a + u*d(1,0)^2").unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::A),
                Box::new(Expr::Mul(
                    Box::new(Expr::U),
                    Box::new(Expr::Pow(Box::new(Expr::D(1, 0)), 2))
                ))
            )
        );
        assert_eq!(e.to_string(), "a + u*d(1,0)^2");
    }

    #[test]
    fn examples_parse() {
        let e = parse("RPs(3,0) * RPs(2,1)").unwrap();
        assert!(matches!(e, Expr::Mul(..)));
        let e = parse("u*(d(1,0) + x(2))").unwrap();
        assert_eq!(e.to_string(), "u*(d(1,0) + x(2))");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("d(1)").unwrap_err();
        assert_eq!(err.pos, 1);
        assert!(err.message.contains("expects 2"));
        let err = parse("a + ").unwrap_err();
        assert_eq!(err.pos, 4);
        let err = parse("a $ u").unwrap_err();
        assert_eq!(err.pos, 2);
        assert!(parse("2").is_err());
        assert!(parse("a^").is_err());
        assert!(parse("(a").is_err());
    }
}
