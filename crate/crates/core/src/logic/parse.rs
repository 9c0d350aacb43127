//! Concrete syntax for terms.
//!
//! ```text
//! expr    := prefix (INFIX expr | POSTFIX)*          precedence climbing
//! prefix  := ?name[.gen][::arity] args*
//!          | KEY x y. expr                           declared binder
//!          | %x[::arity] y. expr                     abstraction
//!          | base[expr, ...]                         Skolem parameter
//!          | name args* | (expr) args*
//!          | INFIX expr                              when the infix has a default left operand
//! args    := (expr, ...)
//! ```
//!
//! Scheme-variable and binder arities are inferred by first-order
//! unification on arities. Each occurrence of a variable is typed from its
//! own context first, then all occurrences of one variable are merged.

use std::collections::HashMap;

use indexmap::IndexMap;
use thiserror::Error;

use super::signature::{is_ident_char, is_ident_start, parse_arity_tokens, Assoc, Signature, SignatureError};
use crate::term::{Arity, Name, Term, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown constant `{name}` at column {pos}")]
    UnknownConstant { name: String, pos: usize },
    #[error("arity error at column {pos}: {msg}")]
    ArityError { pos: usize, msg: String },
    #[error("scheme variable {name} used at two arities ({first} and {second})")]
    InconsistentVar { name: String, first: String, second: String },
    #[error("cannot infer the arity of {what}; add an annotation such as `?A::form`")]
    Ambiguous { what: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String, u32),
    Sym(String),
    End,
}

const FIXED: &[&str] = &["::", "->", "(", ")", "[", "]", ",", ".", "%"];

fn lex(sig: &Signature, src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let cs: Vec<char> = src.chars().collect();
    let mut symbols: Vec<Vec<char>> = FIXED.iter().map(|s| s.chars().collect()).collect();
    for s in sig.infixes.keys().chain(sig.postfixes.keys()) {
        if !s.chars().next().is_some_and(is_ident_start) {
            symbols.push(s.chars().collect());
        }
    }
    symbols.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == '?' {
            i += 1;
            let start = i;
            while i < cs.len() && is_ident_char(cs[i]) {
                i += 1;
            }
            if start == i || !is_ident_start(cs[start]) {
                return Err(ParseError::Syntax {
                    pos,
                    msg: "expected a variable name after `?`".into(),
                });
            }
            let name: String = cs[start..i].iter().collect();
            let mut gen = 0;
            if i + 1 < cs.len() && cs[i] == '.' && cs[i + 1].is_ascii_digit() {
                i += 1;
                let gs = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = cs[gs..i].iter().collect();
                gen = digits.parse().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: "generation out of range".into(),
                })?;
            }
            out.push((Tok::Var(name, gen), pos));
        } else if is_ident_start(c) {
            let start = i;
            while i < cs.len() && is_ident_char(cs[i]) {
                i += 1;
            }
            out.push((Tok::Ident(cs[start..i].iter().collect()), pos));
        } else {
            let found = symbols.iter().find(|s| cs[i..].starts_with(s));
            match found {
                Some(s) => {
                    out.push((Tok::Sym(s.iter().collect()), pos));
                    i += s.len();
                }
                None => {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
    }
    out.push((Tok::End, cs.len() + 1));
    Ok(out)
}

/// Parsed term before arity inference.
#[derive(Clone, Debug)]
enum Pre {
    Var { id: VarId, ann: Option<Arity>, pos: usize },
    Const { name: String, pos: usize },
    Bound(u32),
    Abs { hint: String, ann: Option<Arity>, body: Box<Pre> },
    App { fun: Box<Pre>, args: Vec<Pre>, pos: usize },
    Param { base: String, subs: Vec<Pre>, pos: usize },
}

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<(Tok, usize)>,
    i: usize,
    scope: Vec<String>,
    floor: u32,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if x == s)
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected `{s}`")))
        }
    }

    fn unexpected(&self, msg: &str) -> ParseError {
        let found = match self.peek() {
            Tok::Ident(s) | Tok::Sym(s) => format!("`{s}`"),
            Tok::Var(n, _) => format!("`?{n}`"),
            Tok::End => "end of input".to_string(),
        };
        ParseError::Syntax {
            pos: self.pos(),
            msg: format!("{msg}, found {found}"),
        }
    }

    fn word(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) | Tok::Sym(s) => Some(s.as_str()),
            _ => None,
        }
    }

    /// Minimum precedence inside argument lists: above a declared `,` infix.
    fn arg_floor(&self) -> u32 {
        self.sig.infixes.get(",").map(|i| i.prec + 1).unwrap_or(0)
    }

    fn expr(&mut self, min: u32) -> Result<Pre, ParseError> {
        let min = min.max(self.floor);
        let mut left = self.prefix()?;
        loop {
            let Some(w) = self.word() else { break };
            if let Some(inf) = self.sig.infixes.get(w) {
                if inf.prec < min {
                    break;
                }
                let inf = inf.clone();
                let pos = self.pos();
                self.bump();
                let rmin = match inf.assoc {
                    Assoc::Right => inf.prec,
                    Assoc::Left | Assoc::None => inf.prec + 1,
                };
                let right = self.expr(rmin)?;
                left = Pre::App {
                    fun: Box::new(Pre::Const {
                        name: inf.constant.to_string(),
                        pos,
                    }),
                    args: vec![left, right],
                    pos,
                };
                if inf.assoc == Assoc::None {
                    if let Some(next) = self.word().and_then(|w| self.sig.infixes.get(w)) {
                        if next.prec == inf.prec {
                            return Err(self.unexpected("non-associative operator"));
                        }
                    }
                }
                continue;
            }
            if let Some(pf) = self.sig.postfixes.get(w) {
                if pf.prec < min {
                    break;
                }
                let name = pf.constant.to_string();
                let pos = self.pos();
                self.bump();
                left = Pre::App {
                    fun: Box::new(Pre::Const { name, pos }),
                    args: vec![left],
                    pos,
                };
                continue;
            }
            break;
        }
        Ok(left)
    }

    fn annotation(&mut self) -> Result<Option<Arity>, ParseError> {
        if !self.is_sym("::") {
            return Ok(None);
        }
        self.bump();
        let start = self.i;
        let mut words = Vec::new();
        let mut j = start;
        while let (Tok::Ident(s) | Tok::Sym(s), _) = &self.toks[j] {
            words.push(s.clone());
            j += 1;
        }
        let mut k = 0;
        let arity = parse_arity_tokens(&words, &mut k).ok_or_else(|| ParseError::Syntax {
            pos: self.pos(),
            msg: "malformed arity annotation".into(),
        })?;
        // parse_arity_tokens is greedy over `->`, and stops before anything
        // that is not part of the arity
        self.i = start + k;
        self.sig.check_arity(&arity)?;
        Ok(Some(arity))
    }

    fn args(&mut self, mut head: Pre) -> Result<Pre, ParseError> {
        while self.is_sym("(") {
            let pos = self.pos();
            self.bump();
            let saved = self.floor;
            self.floor = self.arg_floor();
            let mut args = vec![self.expr(0)?];
            while self.is_sym(",") {
                self.bump();
                args.push(self.expr(0)?);
            }
            self.floor = saved;
            self.expect(")")?;
            head = Pre::App {
                fun: Box::new(head),
                args,
                pos,
            };
        }
        Ok(head)
    }

    fn bound_names(&mut self) -> Result<Vec<(String, Option<Arity>)>, ParseError> {
        let mut names = Vec::new();
        while let Tok::Ident(n) = self.peek() {
            let n = n.clone();
            if self.sig.is_keyword(&n) {
                return Err(self.unexpected("expected a bound variable name"));
            }
            self.bump();
            let ann = self.annotation()?;
            names.push((n, ann));
        }
        if names.is_empty() {
            return Err(self.unexpected("expected a bound variable name"));
        }
        self.expect(".")?;
        Ok(names)
    }

    fn prefix(&mut self) -> Result<Pre, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Var(name, gen) => {
                self.bump();
                let ann = self.annotation()?;
                let v = Pre::Var {
                    id: VarId::new(&name, gen),
                    ann,
                    pos,
                };
                self.args(v)
            }
            Tok::Sym(s) if s == "%" => {
                self.bump();
                let names = self.bound_names()?;
                self.abstraction(names, None)
            }
            Tok::Sym(s) if s == "(" => {
                self.bump();
                let saved = self.floor;
                self.floor = 0;
                let e = self.expr(0)?;
                self.floor = saved;
                self.expect(")")?;
                self.args(e)
            }
            Tok::Ident(w) | Tok::Sym(w) if self.default_left(&w).is_some() => {
                let name = self.default_left(&w).unwrap();
                Ok(Pre::Const { name, pos })
            }
            Tok::Ident(w) if self.sig.binders.contains_key(&w) => {
                let constant = self.sig.binders[&w].to_string();
                self.bump();
                let names = self.bound_names()?;
                if let Some((n, Some(_))) = names.iter().find(|(_, a)| a.is_some()) {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: format!("binder variable `{n}` takes its arity from `{w}`"),
                    });
                }
                self.abstraction(names, Some((constant, pos)))
            }
            Tok::Ident(w) => {
                self.bump();
                if self.is_sym("[") && !self.scope.contains(&w) {
                    self.bump();
                    let saved = self.floor;
                    self.floor = self.arg_floor();
                    let mut subs = Vec::new();
                    if !self.is_sym("]") {
                        subs.push(self.expr(0)?);
                        while self.is_sym(",") {
                            self.bump();
                            subs.push(self.expr(0)?);
                        }
                    }
                    self.floor = saved;
                    self.expect("]")?;
                    let p = Pre::Param { base: w, subs, pos };
                    return self.args(p);
                }
                let t = match self.scope.iter().rposition(|n| *n == w) {
                    Some(k) => Pre::Bound((self.scope.len() - 1 - k) as u32),
                    None => Pre::Const { name: w, pos },
                };
                self.args(t)
            }
            _ => Err(self.unexpected("expected a term")),
        }
    }

    fn default_left(&self, w: &str) -> Option<String> {
        self.sig
            .infixes
            .get(w)
            .and_then(|i| i.default_left.as_ref().map(|d| d.to_string()))
    }

    fn abstraction(
        &mut self,
        names: Vec<(String, Option<Arity>)>,
        binder: Option<(String, usize)>,
    ) -> Result<Pre, ParseError> {
        for (n, _) in &names {
            self.scope.push(n.clone());
        }
        let body = self.expr(0);
        for _ in &names {
            self.scope.pop();
        }
        let mut body = body?;
        for (n, ann) in names.into_iter().rev() {
            let abs = Pre::Abs {
                hint: n,
                ann,
                body: Box::new(body),
            };
            body = match &binder {
                Some((c, pos)) => Pre::App {
                    fun: Box::new(Pre::Const {
                        name: c.clone(),
                        pos: *pos,
                    }),
                    args: vec![abs],
                    pos: *pos,
                },
                None => abs,
            };
        }
        Ok(body)
    }
}

/// Arity with metavariables.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Ma {
    Meta(usize),
    Atom(Name),
    Fun(Box<Ma>, Box<Ma>),
}

impl Ma {
    fn of(a: &Arity) -> Ma {
        match a {
            Arity::Atomic(n) => Ma::Atom(n.clone()),
            Arity::Fun(x, y) => Ma::Fun(Box::new(Ma::of(x)), Box::new(Ma::of(y))),
        }
    }
}

/// Term with metavariable arities.
#[derive(Clone, Debug)]
enum Et {
    Const(Name, Ma),
    Var(VarId, Ma),
    Bound(u32),
    Abs(Name, Ma, Box<Et>),
    App(Box<Et>, Box<Et>),
    Param(Name, Vec<Et>, Ma),
}

/// What an unresolved metavariable belongs to, for error messages.
#[derive(Clone, Debug)]
enum Owner {
    Var(VarId),
    Bound(String),
    Const(String),
    Other,
}

/// Elaborates one or more source texts that share scheme variables.
pub struct Elaborator<'a> {
    sig: &'a Signature,
    lenient: bool,
    metas: Vec<Option<Ma>>,
    owners: Vec<Owner>,
    occurrences: IndexMap<VarId, Vec<usize>>,
    unknown: HashMap<String, usize>,
    terms: Vec<(Et, Ma)>,
}

impl<'a> Elaborator<'a> {
    /// Strict elaboration: unknown constants and unresolved arities are errors.
    pub fn new(sig: &'a Signature) -> Elaborator<'a> {
        Elaborator {
            sig,
            lenient: false,
            metas: Vec::new(),
            owners: Vec::new(),
            occurrences: IndexMap::new(),
            unknown: HashMap::new(),
            terms: Vec::new(),
        }
    }

    /// Lenient elaboration: unknown names become constants and unresolved
    /// arities default to the signature's default atomic arity.
    pub fn lenient(sig: &'a Signature) -> Elaborator<'a> {
        let mut e = Elaborator::new(sig);
        e.lenient = true;
        e
    }

    fn fresh(&mut self, owner: Owner) -> Ma {
        self.metas.push(None);
        self.owners.push(owner);
        Ma::Meta(self.metas.len() - 1)
    }

    fn resolve(&self, m: &Ma) -> Ma {
        match m {
            Ma::Meta(k) => match &self.metas[*k] {
                Some(t) => self.resolve(t),
                None => m.clone(),
            },
            Ma::Fun(a, b) => Ma::Fun(Box::new(self.resolve(a)), Box::new(self.resolve(b))),
            Ma::Atom(_) => m.clone(),
        }
    }

    fn occurs(&self, k: usize, m: &Ma) -> bool {
        match self.resolve(m) {
            Ma::Meta(j) => j == k,
            Ma::Fun(a, b) => self.occurs(k, &a) || self.occurs(k, &b),
            Ma::Atom(_) => false,
        }
    }

    fn unify(&mut self, a: &Ma, b: &Ma) -> bool {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (&a, &b) {
            (Ma::Meta(i), Ma::Meta(j)) if i == j => true,
            (Ma::Meta(k), other) | (other, Ma::Meta(k)) => {
                if self.occurs(*k, other) {
                    return false;
                }
                self.metas[*k] = Some(other.clone());
                true
            }
            (Ma::Atom(x), Ma::Atom(y)) => x == y,
            (Ma::Fun(a1, b1), Ma::Fun(a2, b2)) => self.unify(a1, a2) && self.unify(b1, b2),
            _ => false,
        }
    }

    fn show(&self, m: &Ma) -> String {
        fn go(m: &Ma, out: &mut String) {
            match m {
                Ma::Atom(n) => out.push_str(n),
                Ma::Meta(k) => out.push_str(&format!("'a{k}")),
                Ma::Fun(a, b) => {
                    if matches!(a.as_ref(), Ma::Fun(..)) {
                        out.push('(');
                        go(a, out);
                        out.push(')');
                    } else {
                        go(a, out);
                    }
                    out.push_str(" -> ");
                    go(b, out);
                }
            }
        }
        let mut s = String::new();
        go(&self.resolve(m), &mut s);
        s
    }

    fn infer(&mut self, p: &Pre, binders: &mut Vec<Ma>) -> Result<(Et, Ma), ParseError> {
        match p {
            Pre::Var { id, ann, pos } => {
                let m = self.fresh(Owner::Var(id.clone()));
                if let Some(a) = ann {
                    if !self.unify(&m, &Ma::of(a)) {
                        return Err(ParseError::ArityError {
                            pos: *pos,
                            msg: format!("annotation of {id} does not fit"),
                        });
                    }
                }
                let Ma::Meta(k) = m else { unreachable!() };
                self.occurrences.entry(id.clone()).or_default().push(k);
                Ok((Et::Var(id.clone(), m.clone()), m))
            }
            Pre::Const { name, pos } => {
                let m = self.const_arity(name, *pos)?;
                Ok((Et::Const(name.as_str().into(), m.clone()), m))
            }
            Pre::Bound(i) => {
                let m = binders[binders.len() - 1 - *i as usize].clone();
                Ok((Et::Bound(*i), m))
            }
            Pre::Abs { hint, ann, body } => {
                let m = match ann {
                    Some(a) => Ma::of(a),
                    None => self.fresh(Owner::Bound(hint.clone())),
                };
                binders.push(m.clone());
                let r = self.infer(body, binders);
                binders.pop();
                let (b, bm) = r?;
                Ok((
                    Et::Abs(hint.as_str().into(), m.clone(), Box::new(b)),
                    Ma::Fun(Box::new(m), Box::new(bm)),
                ))
            }
            Pre::App { fun, args, pos } => {
                let (mut f, mut fm) = self.infer(fun, binders)?;
                for a in args {
                    let (x, xm) = self.infer(a, binders)?;
                    let r = self.fresh(Owner::Other);
                    let want = Ma::Fun(Box::new(xm.clone()), Box::new(r.clone()));
                    if !self.unify(&fm, &want) {
                        return Err(ParseError::ArityError {
                            pos: *pos,
                            msg: format!(
                                "a term of arity {} cannot be applied to an argument of arity {}",
                                self.show(&fm),
                                self.show(&xm)
                            ),
                        });
                    }
                    f = Et::App(Box::new(f), Box::new(x));
                    fm = r;
                }
                Ok((f, fm))
            }
            Pre::Param { base, subs, pos } => {
                let m = match self.sig.skolems.get(base.as_str()) {
                    Some(a) => Ma::of(a),
                    None if self.lenient => self.unknown_name(base),
                    None => {
                        return Err(ParseError::UnknownConstant {
                            name: base.clone(),
                            pos: *pos,
                        })
                    }
                };
                let mut es = Vec::new();
                for s in subs {
                    es.push(self.infer(s, binders)?.0);
                }
                Ok((Et::Param(base.as_str().into(), es, m.clone()), m))
            }
        }
    }

    fn unknown_name(&mut self, name: &str) -> Ma {
        if let Some(k) = self.unknown.get(name) {
            return Ma::Meta(*k);
        }
        let m = self.fresh(Owner::Const(name.to_string()));
        let Ma::Meta(k) = m else { unreachable!() };
        self.unknown.insert(name.to_string(), k);
        m
    }

    fn const_arity(&mut self, name: &str, pos: usize) -> Result<Ma, ParseError> {
        match self.sig.constant(name) {
            Some(a) => Ok(Ma::of(a)),
            None if self.lenient => Ok(self.unknown_name(name)),
            None => Err(ParseError::UnknownConstant {
                name: name.to_string(),
                pos,
            }),
        }
    }

    /// Parse `src` and record its arity constraints. Returns the index of
    /// the new term.
    pub fn add(&mut self, src: &str, expected: Option<&Arity>) -> Result<usize, ParseError> {
        let toks = lex(self.sig, src)?;
        let mut p = Parser {
            sig: self.sig,
            toks,
            i: 0,
            scope: Vec::new(),
            floor: 0,
        };
        let pre = p.expr(0)?;
        if p.peek() != &Tok::End {
            return Err(p.unexpected("unexpected input"));
        }
        let (et, m) = self.infer(&pre, &mut Vec::new())?;
        if let Some(a) = expected {
            if !self.unify(&m, &Ma::of(a)) {
                return Err(ParseError::ArityError {
                    pos: 1,
                    msg: format!("expected arity {a}, found {}", self.show(&m)),
                });
            }
        }
        self.terms.push((et, m));
        Ok(self.terms.len() - 1)
    }

    /// Require two added terms to have the same arity.
    pub fn same_arity(&mut self, i: usize, j: usize) -> Result<(), ParseError> {
        let (a, b) = (self.terms[i].1.clone(), self.terms[j].1.clone());
        if self.unify(&a, &b) {
            Ok(())
        } else {
            Err(ParseError::ArityError {
                pos: 1,
                msg: format!("sides have arities {} and {}", self.show(&a), self.show(&b)),
            })
        }
    }

    /// Merge variable occurrences and build the terms.
    pub fn finish(mut self) -> Result<Vec<Term>, ParseError> {
        let occurrences = std::mem::take(&mut self.occurrences);
        for (id, occs) in &occurrences {
            let first = Ma::Meta(occs[0]);
            for k in &occs[1..] {
                let other = Ma::Meta(*k);
                if !self.unify(&first, &other) {
                    return Err(ParseError::InconsistentVar {
                        name: id.to_string(),
                        first: self.show(&first),
                        second: self.show(&other),
                    });
                }
            }
        }
        // strict mode: every metavariable owned by a variable, binder or
        // constant must be determined
        if !self.lenient {
            for k in 0..self.metas.len() {
                let unresolved = matches!(self.resolve(&Ma::Meta(k)), Ma::Meta(_))
                    || contains_meta(&self.resolve(&Ma::Meta(k)));
                if !unresolved {
                    continue;
                }
                let what = match &self.owners[k] {
                    Owner::Var(v) => v.to_string(),
                    Owner::Bound(n) => format!("bound variable `{n}`"),
                    Owner::Const(n) => format!("`{n}`"),
                    Owner::Other => continue,
                };
                return Err(ParseError::Ambiguous { what });
            }
        }
        let default = self.sig.default_atomic();
        let terms = std::mem::take(&mut self.terms);
        let mut out = Vec::new();
        for (et, m) in &terms {
            let t = self.build(et, &default);
            // the top arity is also defaulted
            let _ = self.ground(m, &default);
            out.push(t);
        }
        Ok(out)
    }

    fn ground(&self, m: &Ma, default: &Arity) -> Arity {
        match self.resolve(m) {
            Ma::Atom(n) => Arity::Atomic(n),
            Ma::Meta(_) => default.clone(),
            Ma::Fun(a, b) => Arity::fun(self.ground(&a, default), self.ground(&b, default)),
        }
    }

    fn build(&self, e: &Et, default: &Arity) -> Term {
        match e {
            Et::Const(n, m) => Term::Const(n.clone(), self.ground(m, default)),
            Et::Var(v, m) => Term::Var(v.clone(), self.ground(m, default)),
            Et::Bound(i) => Term::Bound(*i),
            Et::Abs(h, m, b) => Term::abs(h, self.ground(m, default), self.build(b, default)),
            Et::App(f, a) => Term::app(self.build(f, default), self.build(a, default)),
            Et::Param(base, subs, m) => Term::param(
                base,
                subs.iter().map(|s| self.build(s, default)).collect(),
                self.ground(m, default),
            ),
        }
    }

    /// Constants that were not declared, with the arities they were given.
    pub fn unknown_constants(&self) -> Vec<(String, Arity)> {
        let default = self.sig.default_atomic();
        let mut v: Vec<(String, Arity)> = self
            .unknown
            .iter()
            .map(|(n, k)| (n.clone(), self.ground(&Ma::Meta(*k), &default)))
            .collect();
        v.sort();
        v
    }
}

fn contains_meta(m: &Ma) -> bool {
    match m {
        Ma::Meta(_) => true,
        Ma::Atom(_) => false,
        Ma::Fun(a, b) => contains_meta(a) || contains_meta(b),
    }
}

/// Parse a closed term whose arities are all determined.
pub fn parse_term(sig: &Signature, src: &str) -> Result<Term, ParseError> {
    let mut e = Elaborator::new(sig);
    e.add(src, None)?;
    Ok(e.finish()?.remove(0))
}

/// Parse a judgement, a term of arity `prop`.
pub fn parse_prop(sig: &Signature, src: &str) -> Result<Term, ParseError> {
    let mut e = Elaborator::new(sig);
    e.add(src, Some(&crate::rule::prop()))?;
    Ok(e.finish()?.remove(0))
}

/// Parse the parts of one rule; variables are shared between the parts.
pub fn parse_rule_parts(
    sig: &Signature,
    premises: &[&str],
    conclusion: &str,
) -> Result<(Vec<Term>, Term), (usize, ParseError)> {
    let mut e = Elaborator::new(sig);
    let prop = crate::rule::prop();
    for (k, p) in premises.iter().enumerate() {
        e.add(p, Some(&prop)).map_err(|err| (k, err))?;
    }
    let n = premises.len();
    e.add(conclusion, Some(&prop)).map_err(|err| (n, err))?;
    let mut terms = e.finish().map_err(|err| (n, err))?;
    let conclusion = terms.pop().unwrap();
    Ok((terms, conclusion))
}

/// Parse both sides of an equation leniently: undeclared names become
/// constants and unconstrained arities take the default atomic arity.
pub fn parse_equation(sig: &Signature, lhs: &str, rhs: &str) -> Result<(Term, Term), ParseError> {
    let mut e = Elaborator::lenient(sig);
    let i = e.add(lhs, None)?;
    let j = e.add(rhs, None)?;
    e.same_arity(i, j)?;
    let mut ts = e.finish()?;
    let r = ts.pop().unwrap();
    let l = ts.pop().unwrap();
    Ok((l, r))
}

/// Parse a judgement leniently (unknown constants are declared on the fly).
pub fn parse_prop_lenient(sig: &Signature, src: &str) -> Result<(Term, Vec<(String, Arity)>), ParseError> {
    let mut e = Elaborator::lenient(sig);
    e.add(src, Some(&crate::rule::prop()))?;
    let unknown = e.unknown_constants();
    Ok((e.finish()?.remove(0), unknown))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::arity_of;

    fn sig() -> Signature {
        let mut s = Signature::new();
        for a in ["term", "form", "hyps"] {
            s.declare_atomic(a).unwrap();
        }
        let ar = |t: &str| super::super::signature::parse_arity_text(t).unwrap();
        let decls = [
            ("nil", ar("hyps")),
            ("cons", ar("form -> hyps -> hyps")),
            ("turnstile", ar("hyps -> form -> prop")),
            ("conj", ar("form -> form -> form")),
            ("imp", ar("form -> form -> form")),
            ("eq", ar("term -> term -> form")),
            ("Pi", ar("(term -> form) -> form")),
            ("P", ar("term -> form")),
            ("A", ar("form")),
            ("B", ar("form")),
            ("0", ar("term")),
        ];
        for (n, a) in decls {
            s.declare_const(n, a).unwrap();
        }
        s.declare_infix("|-", "turnstile", 1, Assoc::None, Some("nil")).unwrap();
        s.declare_infix("-->", "imp", 3, Assoc::Right, None).unwrap();
        s.declare_infix("&", "conj", 5, Assoc::Right, None).unwrap();
        s.declare_infix("=", "eq", 6, Assoc::None, None).unwrap();
        s.declare_binder("ALL", "Pi").unwrap();
        s.declare_skolem("all", ar("term")).unwrap();
        s
    }

    #[test]
    fn parses_sequent() {
        let s = sig();
        let t = parse_prop(&s, "?H |- ?A & ?B").unwrap();
        assert_eq!(arity_of(&t, &[]).unwrap(), crate::rule::prop());
        let (head, args) = t.strip_app();
        assert!(matches!(head, Term::Const(n, _) if n.as_ref() == "turnstile"));
        assert_eq!(args[0], &Term::var("H", 0, Arity::atomic("hyps")));
    }

    #[test]
    fn default_left_operand() {
        let s = sig();
        let t = parse_prop(&s, "|- A --> A & B").unwrap();
        let (_, args) = t.strip_app();
        assert!(matches!(args[0], Term::Const(n, _) if n.as_ref() == "nil"));
        // --> binds weaker than &
        let (h, _) = args[1].strip_app();
        assert!(matches!(h, Term::Const(n, _) if n.as_ref() == "imp"));
    }

    #[test]
    fn binders_and_params() {
        let s = sig();
        let t = parse_prop(&s, "?H |- ?B(all[?H, ?B]) --> ALL x. P(x)").unwrap();
        let vars = crate::term::vars_of(&t);
        assert_eq!(vars[&VarId::new("B", 0)], s.parse_arity("term -> form").unwrap());
        let u = parse_term(&s, "%x y. x = y").unwrap();
        assert_eq!(arity_of(&u, &[]).unwrap(), s.parse_arity("term -> term -> form").unwrap());
    }

    #[test]
    fn errors() {
        let s = sig();
        assert!(matches!(parse_term(&s, "A(B)"), Err(ParseError::ArityError { .. })));
        assert!(matches!(parse_term(&s, "Foo"), Err(ParseError::UnknownConstant { .. })));
        assert!(matches!(parse_term(&s, "A &"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_term(&s, "?X"), Err(ParseError::Ambiguous { .. })));
        assert!(matches!(
            parse_prop(&s, "?A |- ?A"),
            Err(ParseError::InconsistentVar { .. })
        ));
        assert!(matches!(parse_term(&s, "0 = 0 = 0"), Err(ParseError::Syntax { .. })));
        let ok = parse_term(&s, "?X::form").unwrap();
        assert_eq!(ok, Term::var("X", 0, Arity::atomic("form")));
        let f = parse_term(&s, "%x::term. A").unwrap();
        assert_eq!(arity_of(&f, &[]).unwrap(), s.parse_arity("term -> form").unwrap());
        let g = parse_term(&s, "?P::(term -> form)(0)").unwrap();
        assert_eq!(arity_of(&g, &[]).unwrap(), Arity::atomic("form"));
    }

    #[test]
    fn generations_and_lenient() {
        let s = sig();
        let t = parse_prop(&s, "?H.3 |- A").unwrap();
        assert!(crate::term::vars_of(&t).contains_key(&VarId::new("H", 3)));
        let (l, r) = parse_equation(&Signature::new(), "?f(C, ?x)", "A(B)").unwrap();
        assert_eq!(arity_of(&l, &[]).unwrap(), arity_of(&r, &[]).unwrap());
    }
}
