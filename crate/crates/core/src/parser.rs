//! Text formats: the expression grammar, `.sys` system files and `.vf`
//! vector-field files.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' unary) | ('/' INTEGER))*
//! unary   := '-' unary | power
//! power   := primary ('^' INTEGER)?
//! primary := INTEGER | IDENT | '(' expr ')'
//! ```
//!
//! Identifiers are `x y u`, jet variables `u1 u2 u11 u12 ...`, and the
//! symbols `xi tau phi F1 F2 F3 G` with derivative suffixes such as `xi_xu`,
//! `xi_x_u` or `F3_u1`. A file is a sequence of `NAME = expr` statements;
//! `#` starts a comment that runs to the end of the line.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::detgen::{PdeSystem, SystemError};
use crate::expr::{
    normalize, Atom, BaseVar, Expr, ExprError, Func, Jet, Partials, RawExpr, RhsFn, RhsPartials,
};
use crate::prolong::VectorField;

/// Position of a token in the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub offset: usize,
    pub len: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    UnexpectedToken { expected: String, found: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("division is only allowed by a literal integer")]
    DivisionByNonLiteral,
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent must be a positive integer")]
    BadExponent,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("missing assignment for {0}")]
    MissingAssignment(String),
    #[error("duplicate assignment for {0}")]
    DuplicateAssignment(String),
    #[error("unknown assignment target `{0}`")]
    UnknownTarget(String),
    #[error("`{atom}` is not allowed in {target}")]
    ForbiddenAtom { target: String, atom: String },
    #[error("degenerate system: F2 is identically zero (the u1^2 coefficient must be nonzero)")]
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Assign,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Assign => f.write_str("`=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut line_start = 0;
    let mut chars = src.char_indices().peekable();
    let span_at = |offset: usize, len: usize, line: usize, line_start: usize| SourceSpan {
        line,
        column: src[line_start..offset].chars().count() + 1,
        offset,
        len,
    };
    while let Some(&(i, c)) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            line_start = i + 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            let n: BigInt = src[i..end].parse().expect("digits");
            out.push((Tok::Int(n), span_at(i, end - i, line, line_start)));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            out.push((
                Tok::Ident(src[i..end].to_string()),
                span_at(i, end - i, line, line_start),
            ));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => Tok::Assign,
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(other),
                    span: span_at(i, other.len_utf8(), line, line_start),
                })
            }
        };
        out.push((tok, span_at(i, 1, line, line_start)));
        chars.next();
    }
    out.push((Tok::Eof, span_at(src.len(), 0, line, line_start)));
    Ok(out)
}

/// Resolves an identifier to an atom.
pub fn parse_atom(name: &str) -> Option<Atom> {
    match name {
        "x" => return Some(Atom::Base(BaseVar::X)),
        "y" => return Some(Atom::Base(BaseVar::Y)),
        "u" => return Some(Atom::Base(BaseVar::U)),
        _ => {}
    }
    if let Some(digits) = name.strip_prefix('u') {
        if !digits.is_empty() && digits.chars().all(|c| c == '1' || c == '2') {
            let nx = digits.chars().filter(|&c| c == '1').count();
            let ny = digits.len() - nx;
            return Jet::new(nx as u8, ny as u8).map(Atom::Jet);
        }
    }
    let mut parts = name.split('_');
    let head = parts.next()?;
    let mut partials = Partials::NONE;
    let mut u1 = 0u8;
    for part in parts {
        if part.is_empty() {
            return None;
        }
        let bytes = part.as_bytes();
        let mut k = 0;
        while k < bytes.len() {
            match bytes[k] {
                b'x' => partials.x += 1,
                b'y' => partials.y += 1,
                b'u' if bytes.get(k + 1) == Some(&b'1') => {
                    u1 += 1;
                    k += 1;
                }
                b'u' => partials.u += 1,
                _ => return None,
            }
            k += 1;
        }
    }
    let func = match head {
        "xi" => Some(Func::Xi),
        "tau" => Some(Func::Tau),
        "phi" => Some(Func::Phi),
        _ => None,
    };
    if let Some(f) = func {
        return (u1 == 0).then_some(Atom::Fn(f, partials));
    }
    let rhs = match head {
        "F1" => RhsFn::F1,
        "F2" => RhsFn::F2,
        "F3" => RhsFn::F3,
        "G" => RhsFn::G,
        _ => return None,
    };
    if u1 > 0 && !rhs.depends_on_u1() {
        return None;
    }
    Some(Atom::Rhs(rhs, RhsPartials { base: partials, u1 }))
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::UnexpectedToken {
                expected: expected.to_string(),
                found: self.peek().to_string(),
            },
            span: self.span(),
        }
    }

    fn expr(&mut self) -> Result<RawExpr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(RawExpr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            RawExpr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<RawExpr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    let (tok, span) = self.bump();
                    match tok {
                        Tok::Int(n) if n.is_zero() => {
                            return Err(ParseError {
                                kind: ParseErrorKind::DivisionByZero,
                                span,
                            })
                        }
                        Tok::Int(n) => {
                            factors.push(RawExpr::Num(BigRational::new(1.into(), n)));
                        }
                        _ => {
                            return Err(ParseError {
                                kind: ParseErrorKind::DivisionByNonLiteral,
                                span,
                            })
                        }
                    }
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            RawExpr::Mul(factors)
        })
    }

    fn unary(&mut self) -> Result<RawExpr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(RawExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RawExpr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (tok, span) = self.bump();
        let k = match tok {
            Tok::Int(n) => n.to_u32().filter(|k| *k > 0),
            _ => None,
        };
        match k {
            Some(k) => Ok(RawExpr::Pow(Box::new(base), k)),
            None => Err(ParseError {
                kind: ParseErrorKind::BadExponent,
                span,
            }),
        }
    }

    fn primary(&mut self) -> Result<RawExpr, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(RawExpr::Num(BigRational::from_integer(n)))
            }
            Tok::Ident(name) => {
                self.bump();
                parse_atom(&name).map(RawExpr::Atom).ok_or(ParseError {
                    kind: ParseErrorKind::UnknownSymbol(name),
                    span,
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("a number, symbol or `(`")),
        }
    }

    fn finish_expr(&mut self) -> Result<(Expr, SourceSpan), ParseError> {
        let span = self.span();
        let raw = self.expr()?;
        let e = normalize(&raw).map_err(|e| ParseError {
            kind: e.into(),
            span,
        })?;
        Ok((e, span))
    }

    /// `NAME = expr` statements until end of input.
    fn statements(&mut self) -> Result<Vec<Statement>, ParseError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            let span = self.span();
            let name = match self.peek().clone() {
                Tok::Ident(n) if *self.peek2() == Tok::Assign => n,
                _ => return Err(self.unexpected("an assignment `NAME = ...`")),
            };
            self.bump();
            self.bump();
            let (value, value_span) = self.finish_expr()?;
            match self.peek() {
                Tok::Eof | Tok::Ident(_) => {}
                _ => return Err(self.unexpected("an operator or a new assignment")),
            }
            out.push(Statement {
                name,
                span,
                value,
                value_span,
            });
        }
        Ok(out)
    }
}

struct Statement {
    name: String,
    span: SourceSpan,
    value: Expr,
    value_span: SourceSpan,
}

/// Parses a single expression into canonical form.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let (e, _) = p.finish_expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

fn assign<'a>(
    stmts: &'a [Statement],
    names: &[&str],
    eof: SourceSpan,
) -> Result<Vec<&'a Statement>, ParseError> {
    let mut slots: Vec<Option<&Statement>> = vec![None; names.len()];
    for s in stmts {
        let Some(k) = names.iter().position(|n| *n == s.name) else {
            return Err(ParseError {
                kind: ParseErrorKind::UnknownTarget(s.name.clone()),
                span: s.span,
            });
        };
        if slots[k].is_some() {
            return Err(ParseError {
                kind: ParseErrorKind::DuplicateAssignment(s.name.clone()),
                span: s.span,
            });
        }
        slots[k] = Some(s);
    }
    slots
        .into_iter()
        .zip(names)
        .map(|(s, n)| {
            s.ok_or_else(|| ParseError {
                kind: ParseErrorKind::MissingAssignment(n.to_string()),
                span: eof,
            })
        })
        .collect()
}

fn check_atoms(
    s: &Statement,
    allowed: impl Fn(&Atom) -> bool,
) -> Result<(), ParseError> {
    match s.value.atoms().into_iter().find(|a| !allowed(a)) {
        Some(a) => Err(ParseError {
            kind: ParseErrorKind::ForbiddenAtom {
                target: s.name.clone(),
                atom: a.to_string(),
            },
            span: s.value_span,
        }),
        None => Ok(()),
    }
}

/// Parses a `.sys` file assigning `F1`, `F2`, `F3` and `G`.
pub fn parse_system(text: &str) -> Result<PdeSystem, ParseError> {
    let mut p = Parser::new(text)?;
    let stmts = p.statements()?;
    let eof = p.span();
    let slots = assign(&stmts, &["F1", "F2", "F3", "G"], eof)?;
    for (k, s) in slots.iter().enumerate() {
        // `F3 = F3` keeps that right-hand side symbolic.
        if s.value == Expr::atom(Atom::rhs(RhsFn::ALL[k])) {
            continue;
        }
        if k < 2 {
            check_atoms(s, |a| a.is_base())?;
        } else {
            check_atoms(s, |a| a.is_base() || *a == Atom::U1)?;
        }
    }
    PdeSystem::new(
        slots[0].value.clone(),
        slots[1].value.clone(),
        slots[2].value.clone(),
        slots[3].value.clone(),
    )
    .map_err(|e| match e {
        SystemError::Degenerate => ParseError {
            kind: ParseErrorKind::Degenerate,
            span: slots[1].value_span,
        },
        SystemError::ForbiddenAtom { field, atom } => ParseError {
            kind: ParseErrorKind::ForbiddenAtom {
                target: field.to_string(),
                atom,
            },
            span: eof,
        },
    })
}

/// Parses a `.vf` file assigning `xi`, `tau` and `phi` over `x, y, u`.
pub fn parse_vector_field(text: &str) -> Result<VectorField, ParseError> {
    let mut p = Parser::new(text)?;
    let stmts = p.statements()?;
    for s in &stmts {
        check_atoms(s, |a| a.is_base())?;
    }
    let eof = p.span();
    let slots = assign(&stmts, &["xi", "tau", "phi"], eof)?;
    Ok(VectorField::concrete(
        slots[0].value.clone(),
        slots[1].value.clone(),
        slots[2].value.clone(),
    )
    .expect("components checked to be point-type"))
}

/// Serializes a system in `.sys` form.
pub fn format_system(sys: &PdeSystem) -> String {
    format!(
        "F1 = {}\nF2 = {}\nF3 = {}\nG = {}\n",
        sys.f1(),
        sys.f2(),
        sys.f3(),
        sys.g()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let e = parse_expr("u1^2").unwrap();
        assert_eq!(e, Expr::atom(Atom::U1).pow(2));
        let e = parse_expr("2*xi_x - tau_y - phi_u").unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.to_string(), "2*xi_x - tau_y - phi_u");
        let e = parse_expr("x^2/2 - 2*y*u").unwrap();
        assert_eq!(e.to_string(), "1/2*x^2 - 2*y*u");
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(parse_expr("-x^2").unwrap().to_string(), "-x^2");
        assert_eq!(parse_expr("2*(x+1)^2").unwrap().to_string(), "2 + 4*x + 2*x^2");
        assert_eq!(parse_expr("1 - -1").unwrap(), Expr::int(2));
        assert_eq!(parse_expr("-3/4*x").unwrap().to_string(), "-3/4*x");
    }

    #[test]
    fn derivative_suffix_spellings() {
        assert_eq!(parse_expr("xi_xu").unwrap(), parse_expr("xi_u_x").unwrap());
        assert_eq!(parse_expr("F3_u1u1").unwrap().to_string(), "F3_u1u1");
        assert_eq!(parse_expr("F3_u1_x").unwrap().to_string(), "F3_xu1");
        assert!(parse_expr("F1_u1").is_err());
        assert!(parse_expr("xi_u1").is_err());
        assert!(parse_expr("u3").is_err());
    }

    #[test]
    fn division_rules() {
        let err = parse_expr("x/y").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DivisionByNonLiteral);
        assert_eq!(err.span.column, 3);
        assert_eq!(parse_expr("x/0").unwrap_err().kind, ParseErrorKind::DivisionByZero);
        assert_eq!(parse_expr("x^0").unwrap_err().kind, ParseErrorKind::BadExponent);
    }

    #[test]
    fn error_spans_point_at_the_token() {
        let err = parse_expr("x + * y").unwrap_err();
        assert_eq!((err.span.line, err.span.column), (1, 5));
        let err = parse_expr("x +\n  @").unwrap_err();
        assert_eq!((err.span.line, err.span.column), (2, 3));
        let err = parse_expr("x + foo").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownSymbol("foo".into()));
        assert_eq!(err.span.offset, 4);
    }

    #[test]
    fn system_files() {
        let sys = parse_system("F1=0 F2=1 F3=0 G=0").unwrap();
        assert_eq!(sys.f2(), &Expr::one());
        let sys = parse_system("# model\nF1 = 0\nF2 = 1\nF3 = 0\nG = u1^2 + x\n").unwrap();
        assert_eq!(sys.g().to_string(), "x + u1^2");
        let err = parse_system("F1=0 F2=0 F3=0 G=0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Degenerate);
        let err = parse_system("F1=0 F2=1 F3=0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingAssignment("G".into()));
        let err = parse_system("F1=u1 F2=1 F3=0 G=0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ForbiddenAtom { .. }));
    }

    #[test]
    fn vector_field_files() {
        let v = parse_vector_field("xi=1 tau=0 phi=0").unwrap();
        assert_eq!(v.xi(), &Expr::one());
        let v = parse_vector_field("xi=-2*u tau=x phi=0").unwrap();
        assert_eq!(v.xi().to_string(), "-2*u");
        assert_eq!(v.tau().to_string(), "x");
        let err = parse_vector_field("xi=u1").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ForbiddenAtom { .. }));
    }
}
