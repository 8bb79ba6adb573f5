//! Plain-text grammar for terms.
//!
//! ```text
//! term    := summand ('+' summand)*
//! summand := '0'
//!          | 'D1' '[' var ']' summand
//!          | 'crN' funcref '(' term (',' term)* ')'
//!          | funcref '(' term (',' term)* ')'
//!          | 'nabla' funcref '(' obj ';' obj ')'
//!          | 'deltaN' funcref '(' obj (',' obj)* ';' obj ')'
//!          | NAME0                      -- constant at zero, e.g. G0
//!          | NAME '(' '0' ')'           -- same thing, e.g. G(0)
//!          | var
//!          | '(' term ')'
//! funcref := NAME | '(' NAME ('o' NAME)+ ')'
//! ```
//!
//! Names `F`, `G`, `H`, `K` are abstract unary functors, `Id` is the identity
//! functor, anything else is an object variable. Whitespace is insignificant.

use crate::term::{canonicalize, Func, FunctorAtom, ObjectExpr, Term};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character `{0}` at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {expected}, found `{found}`")]
    Expected { expected: String, found: String },
    #[error("cross effect arity must be positive")]
    ZeroArity,
    #[error("cross effect cr{n} applied to {got} arguments")]
    CrossArity { n: usize, got: usize },
    #[error("trailing input starting at `{0}`")]
    Trailing(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Cross(usize),
    Lin,
    Zero,
    Plus,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Cross(n) => write!(f, "cr{n}"),
            Tok::Lin => write!(f, "D1"),
            Tok::Zero => write!(f, "0"),
            Tok::Plus => write!(f, "+"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Comma => write!(f, ","),
            Tok::Semi => write!(f, ";"),
        }
    }
}

fn lex(input: &str) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '(' => {
                toks.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(Tok::RParen);
                i += 1;
            }
            '[' => {
                toks.push(Tok::LBracket);
                i += 1;
            }
            ']' => {
                toks.push(Tok::RBracket);
                i += 1;
            }
            ',' => {
                toks.push(Tok::Comma);
                i += 1;
            }
            ';' => {
                toks.push(Tok::Semi);
                i += 1;
            }
            '0' => {
                toks.push(Tok::Zero);
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if let Some(digits) = word.strip_prefix("cr") {
                    if !digits.is_empty() && digits.chars().all(|d| d.is_ascii_digit()) {
                        let n: usize = digits.parse().unwrap();
                        if n == 0 {
                            return Err(ParseError::ZeroArity);
                        }
                        toks.push(Tok::Cross(n));
                        continue;
                    }
                }
                if word == "D1" {
                    toks.push(Tok::Lin);
                } else {
                    toks.push(Tok::Ident(word));
                }
            }
            other => return Err(ParseError::UnexpectedChar(other, i)),
        }
    }
    Ok(toks)
}

/// Default functor table for the text grammar.
fn functor_atom(name: &str) -> Option<FunctorAtom> {
    match name {
        "F" | "G" | "H" | "K" => Some(FunctorAtom::abstract_unary(name)),
        "Id" => Some(FunctorAtom::identity()),
        _ => None,
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or(ParseError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        let t = self.next()?;
        if &t == tok {
            Ok(())
        } else {
            Err(ParseError::Expected {
                expected: tok.to_string(),
                found: t.to_string(),
            })
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut parts = vec![self.summand()?];
        while matches!(self.peek(), Some(Tok::Plus)) {
            self.next()?;
            parts.push(self.summand()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Term::Sum(parts)
        })
    }

    /// Tries to read a functor reference; rewinds and returns `None` when the
    /// tokens don't form one (so `(` may still open a parenthesized term).
    fn try_funcref(&mut self) -> Result<Option<Func>, ParseError> {
        let start = self.pos;
        match self.peek() {
            Some(Tok::Ident(name)) => {
                if let Some(atom) = functor_atom(name) {
                    self.next()?;
                    Ok(Some(Func::Atom(atom)))
                } else {
                    Ok(None)
                }
            }
            Some(Tok::LParen) => {
                self.next()?;
                let mut names = Vec::new();
                loop {
                    match self.peek().cloned() {
                        Some(Tok::Ident(name)) => {
                            self.next()?;
                            names.push(name);
                            match self.peek().cloned() {
                                Some(Tok::Ident(o)) if o == "o" => {
                                    self.next()?;
                                }
                                Some(Tok::RParen) => {
                                    self.next()?;
                                    break;
                                }
                                _ => {
                                    self.pos = start;
                                    return Ok(None);
                                }
                            }
                        }
                        _ => {
                            self.pos = start;
                            return Ok(None);
                        }
                    }
                }
                // `o` is also an identifier, so a lone name in parens is
                // a parenthesized term, not a composite.
                if names.len() < 2 {
                    self.pos = start;
                    return Ok(None);
                }
                let mut atoms = Vec::new();
                for name in &names {
                    match functor_atom(name) {
                        Some(a) => atoms.push(Func::Atom(a)),
                        None => {
                            self.pos = start;
                            return Ok(None);
                        }
                    }
                }
                let mut func = atoms.pop().unwrap();
                while let Some(outer) = atoms.pop() {
                    func = Func::compose(outer, func);
                }
                Ok(Some(func))
            }
            _ => Ok(None),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(&Tok::LParen)?;
        let mut args = vec![self.term()?];
        while matches!(self.peek(), Some(Tok::Comma)) {
            self.next()?;
            args.push(self.term()?);
        }
        self.expect(&Tok::RParen)?;
        Ok(args)
    }

    fn object(&mut self) -> Result<ObjectExpr, ParseError> {
        let mut parts = vec![self.object_atom()?];
        while matches!(self.peek(), Some(Tok::Plus)) {
            self.next()?;
            parts.push(self.object_atom()?);
        }
        let mut iter = parts.into_iter().rev();
        let last = iter.next().unwrap();
        Ok(iter.fold(last, |acc, x| ObjectExpr::sum(x, acc)))
    }

    fn object_atom(&mut self) -> Result<ObjectExpr, ParseError> {
        match self.next()? {
            Tok::Zero => Ok(ObjectExpr::Zero),
            Tok::Ident(v) => Ok(ObjectExpr::Var(v)),
            other => Err(ParseError::Expected {
                expected: "object variable or 0".to_string(),
                found: other.to_string(),
            }),
        }
    }

    fn derivative(&mut self, order: u8) -> Result<Term, ParseError> {
        let func = self.try_funcref()?.ok_or_else(|| ParseError::Expected {
            expected: "functor".to_string(),
            found: self.peek().map(|t| t.to_string()).unwrap_or_default(),
        })?;
        self.expect(&Tok::LParen)?;
        let mut directions = Vec::new();
        if order > 0 {
            directions.push(self.object()?);
            while matches!(self.peek(), Some(Tok::Comma)) {
                self.next()?;
                directions.push(self.object()?);
            }
            self.expect(&Tok::Semi)?;
        }
        let basepoint = self.object()?;
        self.expect(&Tok::RParen)?;
        Ok(Term::Delta {
            order,
            func,
            directions,
            basepoint,
        })
    }

    fn summand(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned().ok_or(ParseError::UnexpectedEnd)? {
            Tok::Zero => {
                self.next()?;
                Ok(Term::Zero)
            }
            Tok::Lin => {
                self.next()?;
                self.expect(&Tok::LBracket)?;
                let var = match self.next()? {
                    Tok::Ident(v) => v,
                    other => {
                        return Err(ParseError::Expected {
                            expected: "variable".to_string(),
                            found: other.to_string(),
                        })
                    }
                };
                self.expect(&Tok::RBracket)?;
                let body = self.summand()?;
                Ok(Term::Lin {
                    var,
                    body: Box::new(body),
                })
            }
            Tok::Cross(n) => {
                self.next()?;
                let func = self.try_funcref()?.ok_or_else(|| ParseError::Expected {
                    expected: "functor".to_string(),
                    found: self.peek().map(|t| t.to_string()).unwrap_or_default(),
                })?;
                let args = self.args()?;
                if args.len() != n {
                    return Err(ParseError::CrossArity { n, got: args.len() });
                }
                Ok(Term::Cross { n, func, args })
            }
            Tok::Ident(name) => {
                match name.as_str() {
                    "nabla" => {
                        self.next()?;
                        return self.derivative(1).map(|t| match t {
                            Term::Delta {
                                func,
                                mut directions,
                                basepoint,
                                ..
                            } => Term::Nabla {
                                func,
                                direction: directions.pop().unwrap(),
                                basepoint,
                            },
                            other => other,
                        });
                    }
                    "delta0" | "delta1" | "delta2" => {
                        self.next()?;
                        let order: u8 = name[5..].parse().unwrap();
                        return self.derivative(order);
                    }
                    _ => {}
                }
                // Constant-at-zero spelled as a single token, e.g. `G0`.
                if let Some(prefix) = name.strip_suffix('0') {
                    if let Some(atom) = functor_atom(prefix) {
                        self.next()?;
                        return Ok(Term::ConstZero(Func::Atom(atom)));
                    }
                }
                if let Some(func) = self.try_funcref()? {
                    let args = self.args()?;
                    return Ok(Term::Apply { func, args });
                }
                self.next()?;
                Ok(Term::var(&name))
            }
            Tok::LParen => {
                if let Some(func) = self.try_funcref()? {
                    let args = self.args()?;
                    return Ok(Term::Apply { func, args });
                }
                self.next()?;
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            other => Err(ParseError::Expected {
                expected: "term".to_string(),
                found: other.to_string(),
            }),
        }
    }
}

/// Parses a term from the plain-text grammar. The result is not
/// canonicalized; pass it through [`canonicalize`] when order matters.
pub fn parse_term(input: &str) -> Result<Term, ParseError> {
    let toks = lex(input)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        let rest: Vec<String> = p.toks[p.pos..].iter().map(|t| t.to_string()).collect();
        return Err(ParseError::Trailing(rest.join(" ")));
    }
    Ok(t)
}

/// Parses and canonicalizes.
pub fn parse_canonical(input: &str) -> Result<Term, ParseError> {
    parse_term(input).map(|t| canonicalize(&t))
}

fn func_text(f: &Func) -> String {
    match f {
        Func::Atom(a) => a.name.clone(),
        Func::Compose(o, i) => format!("({} o {})", func_text_bare(o), func_text_bare(i)),
    }
}

fn func_text_bare(f: &Func) -> String {
    match f {
        Func::Atom(a) => a.name.clone(),
        Func::Compose(o, i) => format!("{} o {}", func_text_bare(o), func_text_bare(i)),
    }
}

fn obj_text(o: &ObjectExpr) -> String {
    match o {
        ObjectExpr::Zero => "0".to_string(),
        ObjectExpr::Var(v) => v.clone(),
        ObjectExpr::Sum(l, r) => format!("{} + {}", obj_text(l), obj_text(r)),
    }
}

/// Renders a term in the text grammar; `parse_term` inverts this.
pub fn print_term(t: &Term) -> String {
    match t {
        Term::Zero => "0".to_string(),
        Term::Obj(o) => obj_text(o),
        Term::ConstZero(f) => format!("{}(0)", func_text(f)),
        Term::Apply { func, args } => {
            let args: Vec<String> = args.iter().map(print_term).collect();
            format!("{}({})", func_text(func), args.join(", "))
        }
        Term::Cross { n, func, args } => {
            let args: Vec<String> = args.iter().map(print_term).collect();
            format!("cr{} {}({})", n, func_text(func), args.join(", "))
        }
        Term::Lin { var, body } => {
            let inner = print_term(body);
            if matches!(**body, Term::Sum(_)) {
                format!("D1[{var}] ({inner})")
            } else {
                format!("D1[{var}] {inner}")
            }
        }
        Term::Sum(ts) => {
            let parts: Vec<String> = ts.iter().map(print_term).collect();
            parts.join(" + ")
        }
        Term::Nabla {
            func,
            direction,
            basepoint,
        } => format!(
            "nabla {}({}; {})",
            func_text(func),
            obj_text(direction),
            obj_text(basepoint)
        ),
        Term::Delta {
            order,
            func,
            directions,
            basepoint,
        } => {
            let dirs: Vec<String> = directions.iter().map(obj_text).collect();
            if directions.is_empty() {
                format!(
                    "delta{} {}({})",
                    order,
                    func_text(func),
                    obj_text(basepoint)
                )
            } else {
                format!(
                    "delta{} {}({}; {})",
                    order,
                    func_text(func),
                    dirs.join(", "),
                    obj_text(basepoint)
                )
            }
        }
    }
}
