//! Terms over the signature `δ, ⊕, ¬, 0` plus constants and sugar.
//!
//! The `δ` node takes an eventually-constant argument sequence written
//! `delta(p1, …, pk; c)`, which denotes `(p1, …, pk, c, c, …)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::algebra::{CarrierError, MvAlgebra};
use crate::arith::{Q01, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(Q01),
    Neg(Box<Term>),
    Oplus(Box<Term>, Box<Term>),
    Delta(EvSeq),
    Odot(Box<Term>, Box<Term>),
    Ominus(Box<Term>, Box<Term>),
    Dist(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Half(Box<Term>),
    HalfN(u32, Box<Term>),
    NFold(u32, Box<Term>),
}

/// The sequence `(prefix…, tail, tail, …)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EvSeq {
    pub prefix: Vec<Term>,
    pub tail: Box<Term>,
}

impl EvSeq {
    pub fn new(prefix: Vec<Term>, tail: Term) -> Self {
        EvSeq { prefix, tail: Box::new(tail) }
    }

    /// A finitely supported sequence: tail is `0`.
    pub fn finite(prefix: Vec<Term>) -> Self {
        EvSeq::new(prefix, Term::zero())
    }
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn zero() -> Term {
        Term::Const(Q01::zero())
    }

    pub fn one() -> Term {
        Term::Const(Q01::one())
    }

    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    pub fn oplus(l: Term, r: Term) -> Term {
        Term::Oplus(Box::new(l), Box::new(r))
    }

    pub fn odot(l: Term, r: Term) -> Term {
        Term::Odot(Box::new(l), Box::new(r))
    }

    pub fn ominus(l: Term, r: Term) -> Term {
        Term::Ominus(Box::new(l), Box::new(r))
    }

    pub fn dist(l: Term, r: Term) -> Term {
        Term::Dist(Box::new(l), Box::new(r))
    }

    pub fn join(l: Term, r: Term) -> Term {
        Term::Join(Box::new(l), Box::new(r))
    }

    pub fn meet(l: Term, r: Term) -> Term {
        Term::Meet(Box::new(l), Box::new(r))
    }

    pub fn delta(prefix: Vec<Term>, tail: Term) -> Term {
        Term::Delta(EvSeq::new(prefix, tail))
    }

    pub fn half(t: Term) -> Term {
        Term::Half(Box::new(t))
    }

    pub fn halfn(n: u32, t: Term) -> Term {
        assert!(n >= 1, "halfn needs n >= 1");
        Term::HalfN(n, Box::new(t))
    }

    pub fn nfold(n: u32, t: Term) -> Term {
        assert!(n >= 1, "nfold needs n >= 1");
        Term::NFold(n, Box::new(t))
    }

    /// Left-associated `t₁ ⊕ ⋯ ⊕ t_n`; `0` for an empty list.
    pub fn oplus_all(terms: impl IntoIterator<Item = Term>) -> Term {
        terms.into_iter().reduce(Term::oplus).unwrap_or_else(Term::zero)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Neg(t) | Term::Half(t) | Term::HalfN(_, t) | Term::NFold(_, t) => t.collect_vars(out),
            Term::Oplus(l, r)
            | Term::Odot(l, r)
            | Term::Ominus(l, r)
            | Term::Dist(l, r)
            | Term::Join(l, r)
            | Term::Meet(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Term::Delta(s) => {
                for p in &s.prefix {
                    p.collect_vars(out);
                }
                s.tail.collect_vars(out);
            }
        }
    }

    /// True if only `Var`, `Const`, `Neg`, `Oplus` and `Delta` occur.
    pub fn is_core(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::Neg(t) => t.is_core(),
            Term::Oplus(l, r) => l.is_core() && r.is_core(),
            Term::Delta(s) => s.prefix.iter().all(Term::is_core) && s.tail.is_core(),
            _ => false,
        }
    }

    pub fn contains_delta(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::Delta(_) | Term::Half(_) | Term::HalfN(..) => true,
            Term::Neg(t) | Term::NFold(_, t) => t.contains_delta(),
            Term::Oplus(l, r)
            | Term::Odot(l, r)
            | Term::Ominus(l, r)
            | Term::Dist(l, r)
            | Term::Join(l, r)
            | Term::Meet(l, r) => l.contains_delta() || r.contains_delta(),
        }
    }

    /// Rewrite every sugar node into `{Var, Const, Neg, Oplus, Delta}`.
    pub fn expand(&self) -> Term {
        match self {
            Term::Var(_) | Term::Const(_) => self.clone(),
            Term::Neg(t) => Term::neg(t.expand()),
            Term::Oplus(l, r) => Term::oplus(l.expand(), r.expand()),
            Term::Delta(s) => Term::Delta(EvSeq::new(
                s.prefix.iter().map(Term::expand).collect(),
                s.tail.expand(),
            )),
            Term::Odot(l, r) => odot_core(l.expand(), r.expand()),
            Term::Ominus(l, r) => odot_core(l.expand(), Term::neg(r.expand())),
            Term::Dist(l, r) => {
                let (l, r) = (l.expand(), r.expand());
                Term::oplus(
                    odot_core(l.clone(), Term::neg(r.clone())),
                    odot_core(r, Term::neg(l)),
                )
            }
            Term::Join(l, r) => join_core(l.expand(), r.expand()),
            Term::Meet(l, r) => Term::neg(join_core(Term::neg(l.expand()), Term::neg(r.expand()))),
            Term::Half(t) => Term::Delta(EvSeq::finite(vec![t.expand()])),
            Term::HalfN(n, t) => {
                let mut acc = t.expand();
                for _ in 0..*n {
                    acc = Term::Delta(EvSeq::finite(vec![acc]));
                }
                acc
            }
            Term::NFold(n, t) => {
                let t = t.expand();
                (1..*n).fold(t.clone(), |acc, _| Term::oplus(acc, t.clone()))
            }
        }
    }

    /// Number of nodes, counting sugar nodes once.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Neg(t) | Term::Half(t) | Term::HalfN(_, t) | Term::NFold(_, t) => 1 + t.size(),
            Term::Oplus(l, r)
            | Term::Odot(l, r)
            | Term::Ominus(l, r)
            | Term::Dist(l, r)
            | Term::Join(l, r)
            | Term::Meet(l, r) => 1 + l.size() + r.size(),
            Term::Delta(s) => 1 + s.prefix.iter().map(Term::size).sum::<usize>() + s.tail.size(),
        }
    }
}

fn odot_core(l: Term, r: Term) -> Term {
    Term::neg(Term::oplus(Term::neg(l), Term::neg(r)))
}

fn join_core(l: Term, r: Term) -> Term {
    Term::oplus(Term::neg(Term::oplus(Term::neg(l), r.clone())), r)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut fmt::Formatter<'_>, name: &str, l: &Term, r: &Term| write!(f, "{name}({l}, {r})");
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(q) => write!(f, "{q}"),
            Term::Neg(t) => write!(f, "neg({t})"),
            Term::Oplus(l, r) => bin(f, "oplus", l, r),
            Term::Odot(l, r) => bin(f, "odot", l, r),
            Term::Ominus(l, r) => bin(f, "ominus", l, r),
            Term::Dist(l, r) => bin(f, "dist", l, r),
            Term::Join(l, r) => bin(f, "join", l, r),
            Term::Meet(l, r) => bin(f, "meet", l, r),
            Term::Half(t) => write!(f, "half({t})"),
            Term::HalfN(n, t) => write!(f, "halfn({n}, {t})"),
            Term::NFold(n, t) => write!(f, "nfold({n}, {t})"),
            Term::Delta(s) => {
                f.write_str("delta(")?;
                for (i, p) in s.prefix.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "; {})", s.tail)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error(transparent)]
    Carrier(#[from] CarrierError),
}

/// Evaluate `t` in `carrier` under `assign`.
pub fn evaluate<A: MvAlgebra>(
    t: &Term,
    assign: &BTreeMap<String, A::Elem>,
    carrier: &A,
) -> Result<A::Elem, EvalError> {
    let ev = |t: &Term| evaluate(t, assign, carrier);
    Ok(match t {
        Term::Var(v) => assign.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.clone()))?,
        Term::Const(q) => carrier.constant(q)?,
        Term::Neg(t) => carrier.neg(&ev(t)?),
        Term::Oplus(l, r) => carrier.oplus(&ev(l)?, &ev(r)?),
        Term::Odot(l, r) => carrier.odot(&ev(l)?, &ev(r)?),
        Term::Ominus(l, r) => carrier.ominus(&ev(l)?, &ev(r)?),
        Term::Dist(l, r) => carrier.dist(&ev(l)?, &ev(r)?),
        Term::Join(l, r) => carrier.join(&ev(l)?, &ev(r)?),
        Term::Meet(l, r) => carrier.meet(&ev(l)?, &ev(r)?),
        Term::NFold(n, t) => carrier.nfold(u64::from(*n), &ev(t)?),
        Term::Half(t) => carrier.half(&ev(t)?)?,
        Term::HalfN(n, t) => {
            let mut acc = ev(t)?;
            for _ in 0..*n {
                acc = carrier.half(&acc)?;
            }
            acc
        }
        Term::Delta(s) => {
            let prefix = s.prefix.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
            carrier.delta(&prefix, &ev(&s.tail)?)?
        }
    })
}

// ---------------------------------------------------------------------------
// Equations

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Leq,
}

/// `lhs = rhs` or `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rel: Relation,
    pub rhs: Term,
}

impl Equation {
    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rel: Relation::Eq, rhs }
    }

    pub fn leq(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rel: Relation::Leq, rhs }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.free_vars();
        v.extend(self.rhs.free_vars());
        v
    }

    /// Whether the relation holds between two evaluated sides.
    pub fn holds_for<A: MvAlgebra>(&self, carrier: &A, lhs: &A::Elem, rhs: &A::Elem) -> bool {
        match self.rel {
            Relation::Eq => lhs == rhs,
            Relation::Leq => carrier.leq(lhs, rhs),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.rel {
            Relation::Eq => "=",
            Relation::Leq => "<=",
        };
        write!(f, "{} {} {}", self.lhs, op, self.rhs)
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("delta needs a `;` and a tail argument")]
    DeltaArity,
    #[error("constant {0} lies outside [0,1]")]
    ConstantRange(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Slash,
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Leq,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Leq => f.write_str("`<=`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Lexed {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(text: &str) -> Result<Lexed, ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i),
            '(' => {
                toks.push((Tok::LParen, l0, c0));
                advance(1, &mut i)
            }
            ')' => {
                toks.push((Tok::RParen, l0, c0));
                advance(1, &mut i)
            }
            ',' => {
                toks.push((Tok::Comma, l0, c0));
                advance(1, &mut i)
            }
            ';' => {
                toks.push((Tok::Semi, l0, c0));
                advance(1, &mut i)
            }
            '/' => {
                toks.push((Tok::Slash, l0, c0));
                advance(1, &mut i)
            }
            '=' => {
                toks.push((Tok::Eq, l0, c0));
                advance(1, &mut i)
            }
            '<' if chars.get(i + 1) == Some(&'=') => {
                toks.push((Tok::Leq, l0, c0));
                advance(2, &mut i)
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                col += i - start;
                toks.push((Tok::Int(chars[start..i].iter().collect()), l0, c0));
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_lowercase() || chars[i].is_ascii_digit() || chars[i] == '_')
                {
                    i += 1;
                }
                col += i - start;
                toks.push((Tok::Ident(chars[start..i].iter().collect()), l0, c0));
            }
            other => {
                return Err(ParseError {
                    line: l0,
                    column: c0,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                })
            }
        }
    }
    toks.push((Tok::End, line, col));
    Ok(Lexed { toks })
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err_here(&self, kind: ParseErrorKind) -> ParseError {
        let (_, line, column) = self.toks[self.pos];
        ParseError { line, column, kind }
    }

    fn syntax(&self, msg: String) -> ParseError {
        self.err_here(ParseErrorKind::Syntax(msg))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected {want}, found {}", self.peek())))
        }
    }

    fn positive_int(&mut self) -> Result<u32, ParseError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let n: u32 = s.parse().map_err(|_| self.syntax(format!("integer `{s}` too large")))?;
                if n == 0 {
                    return Err(self.syntax("repetition count must be at least 1".into()));
                }
                self.bump();
                Ok(n)
            }
            other => Err(self.syntax(format!("expected a positive integer, found {other}"))),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Int(num) => {
                let start = self.pos;
                self.bump();
                let text = if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.bump() {
                        Tok::Int(den) => format!("{num}/{den}"),
                        other => {
                            self.pos -= 1;
                            return Err(self.syntax(format!("expected a denominator, found {other}")));
                        }
                    }
                } else {
                    num
                };
                let r: Rat = crate::arith::parse_rat(&text).map_err(|e| {
                    let (_, line, column) = self.toks[start];
                    ParseError { line, column, kind: ParseErrorKind::Syntax(e.to_string()) }
                })?;
                Q01::try_from_rat(r).map(Term::Const).map_err(|_| {
                    let (_, line, column) = self.toks[start];
                    ParseError { line, column, kind: ParseErrorKind::ConstantRange(text) }
                })
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Term::Var(name));
                }
                let call_pos = self.pos - 1;
                self.bump();
                let t = self.call(&name, call_pos)?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(self.syntax(format!("expected a term, found {other}"))),
        }
    }

    fn binary(&mut self) -> Result<(Term, Term), ParseError> {
        let l = self.term()?;
        self.expect(Tok::Comma)?;
        let r = self.term()?;
        Ok((l, r))
    }

    fn call(&mut self, name: &str, call_pos: usize) -> Result<Term, ParseError> {
        Ok(match name {
            "neg" => Term::neg(self.term()?),
            "half" => Term::half(self.term()?),
            "oplus" | "odot" | "ominus" | "dist" | "join" | "meet" => {
                let (l, r) = self.binary()?;
                match name {
                    "oplus" => Term::oplus(l, r),
                    "odot" => Term::odot(l, r),
                    "ominus" => Term::ominus(l, r),
                    "dist" => Term::dist(l, r),
                    "join" => Term::join(l, r),
                    _ => Term::meet(l, r),
                }
            }
            "halfn" | "nfold" => {
                let n = self.positive_int()?;
                self.expect(Tok::Comma)?;
                let t = self.term()?;
                if name == "halfn" {
                    Term::halfn(n, t)
                } else {
                    Term::nfold(n, t)
                }
            }
            "delta" => {
                let mut prefix = Vec::new();
                if *self.peek() == Tok::RParen {
                    let (_, line, column) = self.toks[call_pos];
                    return Err(ParseError { line, column, kind: ParseErrorKind::DeltaArity });
                }
                if *self.peek() != Tok::Semi {
                    prefix.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        prefix.push(self.term()?);
                    }
                }
                if *self.peek() != Tok::Semi {
                    if *self.peek() == Tok::RParen {
                        let (_, line, column) = self.toks[call_pos];
                        return Err(ParseError { line, column, kind: ParseErrorKind::DeltaArity });
                    }
                    return Err(self.syntax(format!("expected `,` or `;`, found {}", self.peek())));
                }
                self.bump();
                if *self.peek() == Tok::RParen {
                    let (_, line, column) = self.toks[call_pos];
                    return Err(ParseError { line, column, kind: ParseErrorKind::DeltaArity });
                }
                Term::delta(prefix, self.term()?)
            }
            other => {
                let (_, line, column) = self.toks[call_pos];
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::Syntax(format!("unknown operation `{other}`")),
                });
            }
        })
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            other => Err(self.syntax(format!("unexpected {other} after term"))),
        }
    }
}

pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?.toks, pos: 0 };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parse `<term> = <term>` or `<term> <= <term>`.
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    let mut p = Parser { toks: lex(text)?.toks, pos: 0 };
    let lhs = p.term()?;
    let rel = match p.peek() {
        Tok::Eq => Relation::Eq,
        Tok::Leq => Relation::Leq,
        other => return Err(p.syntax(format!("expected `=` or `<=`, found {other}"))),
    };
    p.bump();
    let rhs = p.term()?;
    p.finish()?;
    Ok(Equation { lhs, rel, rhs })
}

impl std::str::FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::UnitInterval;

    fn q(s: &str) -> Q01 {
        s.parse().unwrap()
    }

    fn x() -> Term {
        Term::var("x")
    }

    fn eval_q(t: &str, assign: &[(&str, &str)]) -> Result<Q01, EvalError> {
        let a = assign.iter().map(|(k, v)| (k.to_string(), q(v))).collect();
        evaluate(&parse(t).unwrap(), &a, &UnitInterval)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse("oplus(x, neg(x))").unwrap(), Term::oplus(x(), Term::neg(x())));
        assert_eq!(
            parse("delta(x1, x2; 0)").unwrap(),
            Term::delta(vec![Term::var("x1"), Term::var("x2")], Term::zero())
        );
        assert_eq!(
            parse("half(1)").unwrap().expand(),
            Term::delta(vec![Term::one()], Term::zero())
        );
        assert_eq!(parse("delta(;x)").unwrap(), Term::delta(vec![], x()));
        assert_eq!(parse(" 2 / 4 ").unwrap(), Term::Const(q("1/2")));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse("delta()").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DeltaArity);
        assert_eq!((e.line, e.column), (1, 1));
        assert_eq!(parse("delta(x)").unwrap_err().kind, ParseErrorKind::DeltaArity);
        assert_eq!(parse("delta(x;)").unwrap_err().kind, ParseErrorKind::DeltaArity);
        let e = parse("oplus(x,\n  y").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        let e = parse("oplus(x, 3/2)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ConstantRange("3/2".into()));
        assert_eq!(e.column, 10);
        assert!(parse("frob(x)").is_err());
        assert!(parse("X").is_err());
        assert!(parse("halfn(0, x)").is_err());
        assert!(parse("x y").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(eval_q("delta(x; x)", &[("x", "2/3")]).unwrap(), q("2/3"));
        assert_eq!(eval_q("half(1)", &[]).unwrap(), q("1/2"));
        assert_eq!(eval_q("oplus(x,x)", &[("x", "1/2")]).unwrap(), Q01::one());
        assert_eq!(eval_q("oplus(x,y)", &[("x", "1/2")]), Err(EvalError::Unbound("y".into())));
        assert_eq!(eval_q("halfn(3, 1)", &[]).unwrap(), q("1/8"));
        assert_eq!(eval_q("nfold(3, 1/4)", &[]).unwrap(), q("3/4"));
    }

    #[test]
    fn free_vars_examples() {
        let fv = |s: &str| parse(s).unwrap().free_vars().into_iter().collect::<Vec<_>>();
        assert_eq!(fv("oplus(x,y)"), vec!["x", "y"]);
        assert!(fv("0").is_empty());
        assert_eq!(fv("delta(x; y)"), vec!["x", "y"]);
    }

    #[test]
    fn expand_examples() {
        let y = Term::var("y");
        assert_eq!(
            Term::odot(x(), y.clone()).expand(),
            Term::neg(Term::oplus(Term::neg(x()), Term::neg(y.clone())))
        );
        assert_eq!(
            Term::halfn(2, x()).expand(),
            Term::delta(vec![Term::delta(vec![x()], Term::zero())], Term::zero())
        );
        assert_eq!(
            Term::join(x(), y.clone()).expand(),
            Term::oplus(Term::neg(Term::oplus(Term::neg(x()), y.clone())), y)
        );
        assert!(parse("dist(meet(x, y), nfold(3, halfn(2, z)))").unwrap().expand().is_core());
    }

    #[test]
    fn expand_preserves_evaluation() {
        let terms = [
            "odot(x, y)",
            "ominus(x, y)",
            "dist(x, y)",
            "join(x, y)",
            "meet(x, y)",
            "nfold(3, x)",
            "halfn(3, oplus(x, y))",
            "delta(x, meet(x, y); half(y))",
        ];
        for src in terms {
            let t = parse(src).unwrap();
            let e = t.expand();
            for i in 0..=8u64 {
                for j in 0..=8u64 {
                    let a = [("x".to_string(), Q01::dyadic(i, 3)), ("y".to_string(), Q01::dyadic(j, 3))]
                        .into_iter()
                        .collect();
                    assert_eq!(
                        evaluate(&t, &a, &UnitInterval).unwrap(),
                        evaluate(&e, &a, &UnitInterval).unwrap(),
                        "{src}"
                    );
                }
            }
        }
    }

    #[test]
    fn eventually_constant_delta_never_truncates() {
        // ⊕-fold of the series agrees with the plain sum on a dyadic grid
        let g: Vec<Q01> = (0..=4u64).map(|k| Q01::dyadic(k, 2)).collect();
        for a in &g {
            for b in &g {
                for c in &g {
                    let w1 = a.scale(&q("1/2"));
                    let w2 = b.scale(&q("1/4"));
                    let wt = c.scale(&q("1/4"));
                    let folded = w1.oplus(&w2).oplus(&wt);
                    let plain = w1.as_rat() + w2.as_rat() + wt.as_rat();
                    assert_eq!(folded.as_rat(), &plain);
                    assert_eq!(Q01::delta(&[a.clone(), b.clone()], c), folded);
                }
            }
        }
    }

    #[test]
    fn equation_parsing() {
        let e = parse_equation("oplus(x,x) = x").unwrap();
        assert_eq!(e.rel, Relation::Eq);
        let e = parse_equation("x <= half(x)").unwrap();
        assert_eq!(e.rel, Relation::Leq);
        assert_eq!(e.to_string(), "x <= half(x)");
        assert!(parse_equation("x").is_err());
        assert!(parse_equation("x = y = z").is_err());
    }
}
