//! Concrete syntax.
//!
//! ```text
//! formula := quant* bexpr
//! quant   := ("exists" | "forall") ident "."
//! bexpr   := with precedence  !  >  &&  >  ||  >  ->
//! atom    := term rel term | int "|" term | "P(" term ")" | "true" | "false"
//! term    := signed sum of: int, ident, int "*" ident,
//!            "pow(" ident ")", "abs(" ident ")", with optional int "*" prefix
//! rel     := "<" | "<=" | ">" | ">=" | "="
//! ```
//!
//! `#` starts a line comment. Quantifiers are also accepted in operand
//! position (`a && exists x. b`). The `presexp` dialect admits `pow` and
//! rejects `P`; the `prespower` dialect admits `P` and rejects `pow`.
//!
//! Non-strict comparisons and equalities are desugared using only `<`, `!`
//! and `&&`: `t1 <= t2` becomes `!(t2 < t1)` and `t1 = t2` becomes
//! `!(t1 < t2) && !(t2 < t1)`, which keeps comparisons between power terms
//! inside the power-comparison fragment.

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::formula::{Atom, Formula};
use crate::term::{Term, Var};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dialect {
    PresExp,
    PresPower,
}

#[derive(Clone, Debug)]
pub struct SourceFormula {
    pub text: String,
    pub dialect: Dialect,
}

#[derive(Clone, Debug, Error)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    Dot,
    Plus,
    Minus,
    Star,
    Pipe,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    macro_rules! push {
        ($tok:expr, $l:expr, $c:expr) => {
            out.push(Spanned {
                tok: $tok,
                line: $l,
                col: $c,
            })
        };
    }
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, l0, c0);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, l0, c0);
            }
            '.' => {
                chars.next();
                col += 1;
                push!(Tok::Dot, l0, c0);
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, l0, c0);
            }
            '*' => {
                chars.next();
                col += 1;
                push!(Tok::Star, l0, c0);
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    push!(Tok::Arrow, l0, c0);
                } else {
                    push!(Tok::Minus, l0, c0);
                }
            }
            '|' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'|') {
                    chars.next();
                    col += 1;
                    push!(Tok::OrOr, l0, c0);
                } else {
                    push!(Tok::Pipe, l0, c0);
                }
            }
            '&' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'&') {
                    chars.next();
                    col += 1;
                    push!(Tok::AndAnd, l0, c0);
                } else {
                    return Err(ParseError {
                        line: l0,
                        col: c0,
                        msg: "expected '&&'".into(),
                    });
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Le, l0, c0);
                } else {
                    push!(Tok::Lt, l0, c0);
                }
            }
            '>' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Ge, l0, c0);
                } else {
                    push!(Tok::Gt, l0, c0);
                }
            }
            '=' => {
                chars.next();
                col += 1;
                push!(Tok::Eq, l0, c0);
            }
            '!' => {
                chars.next();
                col += 1;
                push!(Tok::Bang, l0, c0);
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Int(s.parse().unwrap()), l0, c0);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(s), l0, c0);
            }
            other => {
                return Err(ParseError {
                    line: l0,
                    col: c0,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    push!(Tok::Eof, line, col);
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    dialect: Dialect,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let s = &self.toks[self.pos];
        Err(ParseError {
            line: s.line,
            col: s.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.next();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek() == &Tok::Arrow {
            self.next();
            let rhs = self.implication()?;
            Ok(Formula::or(Formula::not(lhs), rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.peek() == &Tok::OrOr {
            self.next();
            let rhs = self.conjunction()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek() == &Tok::AndAnd {
            self.next();
            let rhs = self.unary()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(name) if name == "exists" || name == "forall" => {
                self.next();
                let v = match self.next() {
                    Tok::Ident(n) if !is_keyword(&n) => Var::new(n),
                    _ => return self.err("expected a variable name after quantifier"),
                };
                self.expect(Tok::Dot, "'.' after quantified variable")?;
                let body = self.implication()?;
                Ok(if name == "exists" {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                })
            }
            Tok::Ident(name) if name == "true" => {
                self.next();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.next();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.next();
                let f = self.implication()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(name) if name == "P" && self.peek2() == &Tok::LParen => {
                if self.dialect != Dialect::PresPower {
                    return self.err("the predicate P is only available in the prespower dialect");
                }
                self.next();
                self.next();
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Formula::Atom(Atom::Pow2(t)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        // int "|" term is a divisibility constraint; everything else is a
        // comparison between two terms.
        if let Tok::Int(q) = self.peek().clone() {
            if self.peek2() == &Tok::Pipe {
                if q < BigInt::one() {
                    return self.err("divisibility modulus must be at least 1");
                }
                self.next();
                self.next();
                let t = self.term()?;
                return Ok(Formula::Atom(Atom::Div(q, t)));
            }
        }
        let t1 = self.term()?;
        let rel = self.next();
        let t2 = self.term()?;
        Ok(match rel {
            Tok::Lt => Formula::lt(&t1, &t2),
            Tok::Gt => Formula::lt(&t2, &t1),
            Tok::Le => Formula::le(&t1, &t2),
            Tok::Ge => Formula::le(&t2, &t1),
            Tok::Eq => Formula::eq(&t1, &t2),
            _ => {
                self.pos -= 1;
                return self.err("expected a relation symbol");
            }
        })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = Term::zero();
        let mut sign = BigInt::one();
        if self.peek() == &Tok::Minus {
            self.next();
            sign = -sign;
        }
        loop {
            let piece = self.summand()?;
            acc = acc.add(&piece.scale(&sign));
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    sign = BigInt::one();
                }
                Tok::Minus => {
                    self.next();
                    sign = BigInt::from(-1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn summand(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                if self.peek() == &Tok::Star {
                    self.next();
                    let body = self.term_symbol()?;
                    Ok(body.scale(&n))
                } else {
                    Ok(Term::int(n))
                }
            }
            Tok::Ident(_) => self.term_symbol(),
            _ => self.err("expected a term"),
        }
    }

    fn term_symbol(&mut self) -> Result<Term, ParseError> {
        let name = match self.next() {
            Tok::Ident(n) => n,
            _ => return self.err("expected an identifier"),
        };
        match name.as_str() {
            "pow" | "abs" => {
                if name == "pow" && self.dialect != Dialect::PresExp {
                    self.pos -= 1;
                    return self.err("pow(..) is only available in the presexp dialect");
                }
                self.expect(Tok::LParen, "'('")?;
                let v = match self.next() {
                    Tok::Ident(n) if !is_keyword(&n) => Var::new(n),
                    _ => return self.err("expected a variable name"),
                };
                self.expect(Tok::RParen, "')'")?;
                Ok(if name == "pow" {
                    Term::pow(v)
                } else {
                    Term::abs(v)
                })
            }
            _ if is_keyword(&name) => {
                self.pos -= 1;
                self.err(format!("'{name}' cannot be used as a variable"))
            }
            _ => Ok(Term::var(Var::new(name))),
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "exists" | "forall" | "true" | "false" | "pow" | "abs" | "P"
    )
}

pub fn parse(src: &SourceFormula) -> Result<Formula, ParseError> {
    parse_str(&src.text, src.dialect)
}

pub fn parse_str(text: &str, dialect: Dialect) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        dialect,
    };
    let f = p.formula()?;
    if p.peek() != &Tok::Eof {
        return p.err("trailing input after formula");
    }
    Ok(f.rename_apart())
}
