//! Typed lambda terms with de Bruijn indices.
//!
//! Object-logic syntax is represented in the simply typed lambda calculus.
//! Types of this framework are called *arities* to keep them apart from the
//! types of an object logic. Bound variables are de Bruijn indices, so alpha
//! equivalence is structural equality that ignores the printing hints kept on
//! abstractions.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

pub type Name = Arc<str>;

/// Simple type of the syntactic framework.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arity {
    Atomic(Name),
    Fun(Arc<Arity>, Arc<Arity>),
}

impl Arity {
    pub fn atomic(name: &str) -> Arity {
        Arity::Atomic(name.into())
    }

    pub fn fun(arg: Arity, result: Arity) -> Arity {
        Arity::Fun(Arc::new(arg), Arc::new(result))
    }

    /// `a1 -> a2 -> ... -> result`
    pub fn curried(args: impl IntoIterator<Item = Arity>, result: Arity) -> Arity {
        let args: Vec<Arity> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| Arity::fun(a, acc))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Arity::Atomic(_))
    }

    /// Argument arities and the atomic result of the spine.
    pub fn spine(&self) -> (Vec<&Arity>, &Arity) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Arity::Fun(a, r) = cur {
            args.push(a.as_ref());
            cur = r.as_ref();
        }
        (args, cur)
    }

    pub fn result(&self) -> &Arity {
        self.spine().1
    }

    pub fn arg_count(&self) -> usize {
        self.spine().0.len()
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Atomic(n) => write!(f, "{n}"),
            Arity::Fun(a, r) => {
                if a.is_atomic() {
                    write!(f, "{a} -> {r}")
                } else {
                    write!(f, "({a}) -> {r}")
                }
            }
        }
    }
}

impl fmt::Debug for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Identity of a scheme variable: a name plus the generation it was
/// standardized to.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    pub name: Name,
    pub gen: u32,
}

impl VarId {
    pub fn new(name: &str, gen: u32) -> VarId {
        VarId { name: name.into(), gen }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gen == 0 {
            write!(f, "?{}", self.name)
        } else {
            write!(f, "?{}.{}", self.name, self.gen)
        }
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A Skolem parameter. Its identity includes the subscript expressions, so a
/// parameter can never occur inside its own subscripts.
#[derive(Clone)]
pub struct Param {
    pub base: Name,
    pub subs: Vec<Term>,
    pub arity: Arity,
}

#[derive(Clone)]
pub enum Term {
    Const(Name, Arity),
    Var(VarId, Arity),
    Bound(u32),
    /// Abstraction: printing hint, arity of the bound variable, body.
    Abs(Name, Arity, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Param(Arc<Param>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("ill-aritied term: {0}")]
    IllAritied(String),
    #[error("bound variable index {0} out of range")]
    BoundOutOfRange(u32),
}

impl Term {
    pub fn constant(name: &str, arity: Arity) -> Term {
        Term::Const(name.into(), arity)
    }

    pub fn var(name: &str, gen: u32, arity: Arity) -> Term {
        Term::Var(VarId::new(name, gen), arity)
    }

    pub fn bound(index: u32) -> Term {
        Term::Bound(index)
    }

    pub fn abs(hint: &str, arity: Arity, body: Term) -> Term {
        Term::Abs(hint.into(), arity, Arc::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Arc::new(fun), Arc::new(arg))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn param(base: &str, subs: Vec<Term>, arity: Arity) -> Term {
        Term::Param(Arc::new(Param {
            base: base.into(),
            subs,
            arity,
        }))
    }

    /// Head and argument list of an application spine (no reduction).
    pub fn strip_app(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f.as_ref();
        }
        args.reverse();
        (cur, args)
    }

    pub fn head(&self) -> &Term {
        self.strip_app().0
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(..))
    }

    /// Flexible terms have a scheme variable at the head (after binders).
    pub fn is_flexible(&self) -> bool {
        let mut cur = self;
        while let Term::Abs(_, _, b) = cur {
            cur = b;
        }
        cur.head().is_var()
    }

    pub fn as_var(&self) -> Option<&VarId> {
        match self {
            Term::Var(v, _) => Some(v),
            _ => None,
        }
    }
}

// Equality is alpha-convertibility: hints are ignored.
impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        aconv(self, other)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Term::Const(n, a) => {
                n.hash(state);
                a.hash(state);
            }
            Term::Var(v, a) => {
                v.hash(state);
                a.hash(state);
            }
            Term::Bound(i) => i.hash(state),
            Term::Abs(_, a, b) => {
                a.hash(state);
                b.hash(state);
            }
            Term::App(f, a) => {
                f.hash(state);
                a.hash(state);
            }
            Term::Param(p) => {
                p.base.hash(state);
                p.arity.hash(state);
                p.subs.hash(state);
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(n, _) => write!(f, "{n}"),
            Term::Var(v, _) => write!(f, "{v}"),
            Term::Bound(i) => write!(f, "#{i}"),
            Term::Abs(h, _, b) => write!(f, "(%{h}. {b:?})"),
            Term::App(..) => {
                let (h, args) = self.strip_app();
                write!(f, "{h:?}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a:?}")?;
                }
                write!(f, ")")
            }
            Term::Param(p) => {
                write!(f, "{}[", p.base)?;
                for (k, s) in p.subs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{s:?}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Alpha-convertibility. With de Bruijn indices this is structural equality
/// ignoring abstraction hints; parameter subscripts are compared recursively.
pub fn aconv(t: &Term, u: &Term) -> bool {
    match (t, u) {
        (Term::Const(a, x), Term::Const(b, y)) => a == b && x == y,
        (Term::Var(a, x), Term::Var(b, y)) => a == b && x == y,
        (Term::Bound(i), Term::Bound(j)) => i == j,
        (Term::Abs(_, a, b), Term::Abs(_, c, d)) => a == c && aconv(b, d),
        (Term::App(f, a), Term::App(g, b)) => aconv(f, g) && aconv(a, b),
        (Term::Param(p), Term::Param(q)) => {
            Arc::ptr_eq(p, q)
                || (p.base == q.base
                    && p.arity == q.arity
                    && p.subs.len() == q.subs.len()
                    && p.subs.iter().zip(&q.subs).all(|(s, r)| aconv(s, r)))
        }
        _ => false,
    }
}

/// Arity of `t`. `binders` lists the arities of enclosing bound variables,
/// innermost first.
pub fn arity_of(t: &Term, binders: &[Arity]) -> Result<Arity, TermError> {
    let mut stack: Vec<Arity> = binders.iter().rev().cloned().collect();
    arity_in(t, &mut stack)
}

/// Arity with a binder stack (outermost first, `Bound(0)` is the last entry).
pub(crate) fn arity_in(t: &Term, stack: &mut Vec<Arity>) -> Result<Arity, TermError> {
    match t {
        Term::Const(_, a) | Term::Var(_, a) => Ok(a.clone()),
        Term::Param(p) => {
            for s in &p.subs {
                arity_in(s, stack)?;
            }
            Ok(p.arity.clone())
        }
        Term::Bound(i) => {
            let i = *i as usize;
            if i < stack.len() {
                Ok(stack[stack.len() - 1 - i].clone())
            } else {
                Err(TermError::BoundOutOfRange(i as u32))
            }
        }
        Term::Abs(_, a, b) => {
            stack.push(a.clone());
            let r = arity_in(b, stack);
            stack.pop();
            Ok(Arity::fun(a.clone(), r?))
        }
        Term::App(f, x) => {
            let fa = arity_in(f, stack)?;
            let xa = arity_in(x, stack)?;
            match fa {
                Arity::Fun(dom, cod) if *dom == xa => Ok((*cod).clone()),
                Arity::Fun(dom, _) => Err(TermError::IllAritied(format!(
                    "argument {x:?} has arity {xa}, expected {dom}"
                ))),
                Arity::Atomic(_) => Err(TermError::IllAritied(format!(
                    "{f:?} of atomic arity {fa} applied to {x:?}"
                ))),
            }
        }
    }
}

/// Add `d` to every bound index `>= cutoff`.
pub fn lift(t: &Term, d: u32, cutoff: u32) -> Term {
    if d == 0 || !has_loose_from(t, cutoff) {
        return t.clone();
    }
    match t {
        Term::Bound(i) if *i >= cutoff => Term::Bound(i + d),
        Term::Abs(h, a, b) => Term::Abs(h.clone(), a.clone(), Arc::new(lift(b, d, cutoff + 1))),
        Term::App(f, a) => Term::app(lift(f, d, cutoff), lift(a, d, cutoff)),
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(|s| lift(s, d, cutoff)).collect(),
            arity: p.arity.clone(),
        })),
        _ => t.clone(),
    }
}

/// Remove `d` binders; the caller guarantees indices in `cutoff..cutoff+d`
/// do not occur.
fn lower(t: &Term, d: u32, cutoff: u32) -> Term {
    if !has_loose_from(t, cutoff) {
        return t.clone();
    }
    match t {
        Term::Bound(i) if *i >= cutoff => Term::Bound(i - d),
        Term::Abs(h, a, b) => Term::Abs(h.clone(), a.clone(), Arc::new(lower(b, d, cutoff + 1))),
        Term::App(f, a) => Term::app(lower(f, d, cutoff), lower(a, d, cutoff)),
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(|s| lower(s, d, cutoff)).collect(),
            arity: p.arity.clone(),
        })),
        _ => t.clone(),
    }
}

/// Does `t` contain a bound index referring outside `depth` enclosing binders?
pub fn has_loose_from(t: &Term, depth: u32) -> bool {
    match t {
        Term::Bound(i) => *i >= depth,
        Term::Abs(_, _, b) => has_loose_from(b, depth + 1),
        Term::App(f, a) => has_loose_from(f, depth) || has_loose_from(a, depth),
        Term::Param(p) => p.subs.iter().any(|s| has_loose_from(s, depth)),
        _ => false,
    }
}

pub fn has_loose_bounds(t: &Term) -> bool {
    has_loose_from(t, 0)
}

/// Does bound index `index` (relative to the top of `t`) occur in `t`?
pub fn mentions_bound(t: &Term, index: u32) -> bool {
    match t {
        Term::Bound(i) => *i == index,
        Term::Abs(_, _, b) => mentions_bound(b, index + 1),
        Term::App(f, a) => mentions_bound(f, index) || mentions_bound(a, index),
        Term::Param(p) => p.subs.iter().any(|s| mentions_bound(s, index)),
        _ => false,
    }
}

/// Replace `Bound(depth)` in `body` by `arg`, lowering the indices above it.
fn subst_bound(body: &Term, arg: &Term, depth: u32) -> Term {
    if !has_loose_from(body, depth) {
        return body.clone();
    }
    match body {
        Term::Bound(i) if *i == depth => lift(arg, depth, 0),
        Term::Bound(i) if *i > depth => Term::Bound(i - 1),
        Term::Abs(h, a, b) => Term::Abs(h.clone(), a.clone(), Arc::new(subst_bound(b, arg, depth + 1))),
        Term::App(f, a) => Term::app(subst_bound(f, arg, depth), subst_bound(a, arg, depth)),
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(|s| subst_bound(s, arg, depth)).collect(),
            arity: p.arity.clone(),
        })),
        _ => body.clone(),
    }
}

/// One beta step: `(%x. body) arg`. Returns `App(f, a)` unchanged if `f` is
/// not an abstraction.
pub fn beta_contract(f: &Term, a: &Term) -> Term {
    match f {
        Term::Abs(_, _, body) => subst_bound(body, a, 0),
        _ => Term::app(f.clone(), a.clone()),
    }
}

/// Beta normal form.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::App(f, a) => {
            let f = normalize(f);
            let a = normalize(a);
            match &f {
                Term::Abs(_, _, body) => normalize(&subst_bound(body, &a, 0)),
                _ => Term::app(f, a),
            }
        }
        Term::Abs(h, ar, b) => Term::Abs(h.clone(), ar.clone(), Arc::new(normalize(b))),
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(normalize).collect(),
            arity: p.arity.clone(),
        })),
        _ => t.clone(),
    }
}

/// Head normal form: `%x1..xn. head(args)`, using only head-position
/// contractions. The head is never an abstraction.
#[derive(Clone, Debug)]
pub struct HeadNormal {
    pub binders: Vec<(Name, Arity)>,
    pub head: Term,
    pub args: Vec<Term>,
}

impl HeadNormal {
    pub fn rebuild(&self) -> Term {
        let body = Term::apps(self.head.clone(), self.args.iter().cloned());
        self.binders
            .iter()
            .rev()
            .fold(body, |acc, (h, a)| Term::Abs(h.clone(), a.clone(), Arc::new(acc)))
    }
}

pub fn head_normal(t: &Term) -> HeadNormal {
    let mut binders = Vec::new();
    let mut cur = t.clone();
    loop {
        while let Term::Abs(h, a, b) = &cur {
            binders.push((h.clone(), a.clone()));
            let next = (**b).clone();
            cur = next;
        }
        let (head, args) = cur.strip_app();
        match head {
            Term::Abs(..) if !args.is_empty() => {
                let mut reduced = beta_contract(head, args[0]);
                for a in &args[1..] {
                    reduced = Term::app(reduced, (*a).clone());
                }
                cur = reduced;
            }
            _ => {
                let head = head.clone();
                let args = args.into_iter().cloned().collect();
                return HeadNormal { binders, head, args };
            }
        }
    }
}

/// Eta-long beta-normal form of a closed, beta-normal term.
pub fn eta_expand(t: &Term) -> Term {
    let mut stack = Vec::new();
    eta_expand_in(t, &mut stack)
}

/// Eta-long form with a binder stack (outermost first).
pub(crate) fn eta_expand_in(t: &Term, stack: &mut Vec<Arity>) -> Term {
    let hn = head_normal(t);
    let depth = hn.binders.len();
    for (_, a) in &hn.binders {
        stack.push(a.clone());
    }
    let head_arity = match &hn.head {
        Term::Bound(i) => stack[stack.len() - 1 - *i as usize].clone(),
        Term::Const(_, a) | Term::Var(_, a) => a.clone(),
        Term::Param(p) => p.arity.clone(),
        _ => unreachable!("head normal form has no abstraction or application head"),
    };
    let head = match &hn.head {
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(|s| eta_expand_in(s, stack)).collect(),
            arity: p.arity.clone(),
        })),
        h => h.clone(),
    };
    let args: Vec<Term> = hn.args.iter().map(|a| eta_expand_in(a, stack)).collect();
    let (arg_arities, _) = head_arity.spine();
    let missing: Vec<Arity> = arg_arities[args.len()..].iter().map(|a| (*a).clone()).collect();
    let k = missing.len() as u32;
    let mut body = Term::apps(lift(&head, k, 0), args.iter().map(|a| lift(a, k, 0)));
    stack.extend(missing.iter().cloned());
    for j in 0..k {
        // the j-th new binder is Bound(k - 1 - j) under the new prefix
        body = Term::app(body, eta_expand_in(&Term::Bound(k - 1 - j), stack));
    }
    stack.truncate(stack.len() - missing.len());
    let mut out = body;
    for a in missing.iter().rev() {
        out = Term::Abs("x".into(), a.clone(), Arc::new(out));
    }
    for _ in 0..depth {
        stack.pop();
    }
    hn.binders
        .iter()
        .rev()
        .fold(out, |acc, (h, a)| Term::Abs(h.clone(), a.clone(), Arc::new(acc)))
}

/// Eta-contract every `%x. f(x)` with `x` not free in `f`, bottom up.
pub fn eta_contract(t: &Term) -> Term {
    match t {
        Term::Abs(h, a, b) => {
            let b = eta_contract(b);
            if let Term::App(f, x) = &b {
                if matches!(x.as_ref(), Term::Bound(0)) && !mentions_bound(f, 0) {
                    return lower(f, 1, 0);
                }
            }
            Term::Abs(h.clone(), a.clone(), Arc::new(b))
        }
        Term::App(f, a) => Term::app(eta_contract(f), eta_contract(a)),
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(eta_contract).collect(),
            arity: p.arity.clone(),
        })),
        _ => t.clone(),
    }
}

/// Beta-normal, eta-short canonical form used for stored rules.
pub fn canonical(t: &Term) -> Term {
    eta_contract(&normalize(t))
}

/// Equality modulo alpha, beta and eta.
pub fn conv_eq(t: &Term, u: &Term) -> bool {
    aconv(&canonical(t), &canonical(u))
}

/// Finite mapping from scheme variables to terms, plus the counter used to
/// create fresh variables and standardize rules apart.
#[derive(Clone, Debug, Default)]
pub struct Environment {
    bindings: BTreeMap<VarId, Term>,
    next_gen: u32,
}

impl Environment {
    pub fn new(next_gen: u32) -> Environment {
        Environment {
            bindings: BTreeMap::new(),
            next_gen,
        }
    }

    pub fn next_gen(&self) -> u32 {
        self.next_gen
    }

    pub fn bump_gen_past(&mut self, gen: u32) {
        self.next_gen = self.next_gen.max(gen + 1);
    }

    pub fn lookup(&self, v: &VarId) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn bind(&mut self, v: VarId, t: Term) {
        self.bindings.insert(v, t);
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &Term)> {
        self.bindings.iter()
    }

    /// A variable no term seen so far can contain.
    pub fn fresh_var(&mut self, name: &str, arity: Arity) -> Term {
        let gen = self.next_gen;
        self.next_gen += 1;
        Term::var(name, gen, arity)
    }
}

/// Replace every bound scheme variable, recursively, without normalizing.
pub fn apply_env(env: &Environment, t: &Term) -> Term {
    if env.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(v, _) => match env.lookup(v) {
            Some(b) => apply_env(env, b),
            None => t.clone(),
        },
        Term::Abs(h, a, b) => Term::Abs(h.clone(), a.clone(), Arc::new(apply_env(env, b))),
        Term::App(f, a) => Term::app(apply_env(env, f), apply_env(env, a)),
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(|s| apply_env(env, s)).collect(),
            arity: p.arity.clone(),
        })),
        _ => t.clone(),
    }
}

/// `apply_env` followed by beta normalization.
pub fn instantiate(env: &Environment, t: &Term) -> Term {
    normalize(&apply_env(env, t))
}

/// Replace one variable (no normalization).
pub fn subst_var(t: &Term, v: &VarId, by: &Term) -> Term {
    match t {
        Term::Var(w, _) if w == v => by.clone(),
        Term::Abs(h, a, b) => Term::Abs(h.clone(), a.clone(), Arc::new(subst_var(b, v, by))),
        Term::App(f, a) => Term::app(subst_var(f, v, by), subst_var(a, v, by)),
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(|s| subst_var(s, v, by)).collect(),
            arity: p.arity.clone(),
        })),
        _ => t.clone(),
    }
}

/// Rename every variable `(n, g)` to `(n, generation + g)`. Distinct variables
/// stay distinct, and every result generation is at least `generation`.
pub fn standardize(t: &Term, generation: u32) -> Term {
    match t {
        Term::Var(v, a) => Term::Var(
            VarId {
                name: v.name.clone(),
                gen: generation + v.gen,
            },
            a.clone(),
        ),
        Term::Abs(h, a, b) => Term::Abs(h.clone(), a.clone(), Arc::new(standardize(b, generation))),
        Term::App(f, a) => Term::app(standardize(f, generation), standardize(a, generation)),
        Term::Param(p) => Term::Param(Arc::new(Param {
            base: p.base.clone(),
            subs: p.subs.iter().map(|s| standardize(s, generation)).collect(),
            arity: p.arity.clone(),
        })),
        _ => t.clone(),
    }
}

pub fn contains_var(t: &Term, v: &VarId) -> bool {
    match t {
        Term::Var(w, _) => w == v,
        Term::Abs(_, _, b) => contains_var(b, v),
        Term::App(f, a) => contains_var(f, v) || contains_var(a, v),
        Term::Param(p) => p.subs.iter().any(|s| contains_var(s, v)),
        _ => false,
    }
}

/// All scheme variables with their arities.
pub fn vars_of(t: &Term) -> BTreeMap<VarId, Arity> {
    let mut out = BTreeMap::new();
    collect_vars(t, &mut out);
    out
}

pub fn collect_vars(t: &Term, out: &mut BTreeMap<VarId, Arity>) {
    match t {
        Term::Var(v, a) => {
            out.entry(v.clone()).or_insert_with(|| a.clone());
        }
        Term::Abs(_, _, b) => collect_vars(b, out),
        Term::App(f, a) => {
            collect_vars(f, out);
            collect_vars(a, out);
        }
        Term::Param(p) => p.subs.iter().for_each(|s| collect_vars(s, out)),
        _ => {}
    }
}

/// Every (name, arity) use of a variable, including conflicting ones.
pub fn var_uses(t: &Term, out: &mut Vec<(VarId, Arity)>) {
    match t {
        Term::Var(v, a) => out.push((v.clone(), a.clone())),
        Term::Abs(_, _, b) => var_uses(b, out),
        Term::App(f, a) => {
            var_uses(f, out);
            var_uses(a, out);
        }
        Term::Param(p) => p.subs.iter().for_each(|s| var_uses(s, out)),
        _ => {}
    }
}

pub fn max_gen(t: &Term) -> u32 {
    match t {
        Term::Var(v, _) => v.gen,
        Term::Abs(_, _, b) => max_gen(b),
        Term::App(f, a) => max_gen(f).max(max_gen(a)),
        Term::Param(p) => p.subs.iter().map(max_gen).max().unwrap_or(0),
        _ => 0,
    }
}

/// Distinct parameters in order of first appearance (outer before inner).
pub fn params_of(t: &Term, out: &mut Vec<Arc<Param>>) {
    match t {
        Term::Param(p) => {
            if !out.iter().any(|q| aconv(&Term::Param(q.clone()), t)) {
                out.push(p.clone());
            }
            p.subs.iter().for_each(|s| params_of(s, out));
        }
        Term::Abs(_, _, b) => params_of(b, out),
        Term::App(f, a) => {
            params_of(f, out);
            params_of(a, out);
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn o() -> Arity {
        Arity::atomic("o")
    }
    fn term() -> Arity {
        Arity::atomic("term")
    }
    fn form() -> Arity {
        Arity::atomic("form")
    }
    fn c(n: &str, a: Arity) -> Term {
        Term::constant(n, a)
    }

    #[test]
    fn arity_of_quantifier_application() {
        let pi = c("Pi", Arity::fun(Arity::fun(term(), form()), form()));
        let r = c("R", Arity::curried([term(), term()], form()));
        let body = Term::apps(r, [Term::bound(0), Term::bound(0)]);
        let t = Term::app(pi, Term::abs("x", term(), body));
        assert_eq!(arity_of(&t, &[]).unwrap(), form());
    }

    #[test]
    fn arity_of_leaf_and_errors() {
        assert_eq!(arity_of(&c("A", form()), &[]).unwrap(), form());
        let bad = Term::app(c("A", form()), c("B", form()));
        assert!(matches!(arity_of(&bad, &[]), Err(TermError::IllAritied(_))));
        assert_eq!(arity_of(&Term::bound(0), &[]), Err(TermError::BoundOutOfRange(0)));
        assert_eq!(arity_of(&Term::bound(1), &[o(), term()]).unwrap(), term());
    }

    #[test]
    fn beta_contract_substitutes_argument() {
        // (%x. R(x + 0, x)) (t - 3)  ~>  R((t - 3) + 0, t - 3)
        let plus = c("plus", Arity::curried([term(), term()], term()));
        let minus = c("minus", Arity::curried([term(), term()], term()));
        let zero = c("0", term());
        let r = c("R", Arity::curried([term(), term()], form()));
        let f = Term::abs(
            "x",
            term(),
            Term::apps(r.clone(), [Term::apps(plus.clone(), [Term::bound(0), zero.clone()]), Term::bound(0)]),
        );
        let arg = Term::apps(minus, [c("t", term()), c("3", term())]);
        let expected = Term::apps(r, [Term::apps(plus, [arg.clone(), zero]), arg.clone()]);
        assert_eq!(beta_contract(&f, &arg), expected);

        let id = Term::abs("x", o(), Term::bound(0));
        assert_eq!(beta_contract(&id, &c("c", o())), c("c", o()));
        let k = Term::abs("x", o(), c("c", o()));
        assert_eq!(beta_contract(&k, &c("d", o())), c("c", o()));
    }

    #[test]
    fn beta_contract_adjusts_outer_indices() {
        // under one binder: (%y. #1 y) applied to #0 ~> #0 #0 ... indices shift correctly
        let f = Term::abs("y", o(), Term::app(Term::bound(1), Term::bound(0)));
        let r = beta_contract(&f, &c("a", o()));
        assert!(aconv(&r, &Term::app(Term::bound(0), c("a", o()))));
        // argument with a loose index is lifted under inner binders
        let g = Term::abs("y", o(), Term::abs("z", o(), Term::bound(1)));
        let r = beta_contract(&g, &Term::bound(3));
        assert!(aconv(&r, &Term::abs("z", o(), Term::bound(4))));
    }

    #[test]
    fn normalize_examples() {
        let id_app = Term::app(Term::abs("x", o(), Term::bound(0)), c("c", o()));
        assert_eq!(normalize(&id_app), c("c", o()));
        let a = c("A", Arity::fun(o(), o()));
        let redex = Term::app(Term::abs("y", o(), Term::app(a.clone(), Term::bound(0))), c("B", o()));
        assert_eq!(normalize(&redex), Term::app(a.clone(), c("B", o())));
        let nf = Term::app(a, c("B", o()));
        assert_eq!(normalize(&nf), nf);
    }

    #[test]
    fn eta_expand_examples() {
        let f = c("c", Arity::fun(o(), o()));
        let e = eta_expand(&f);
        assert_eq!(e, Term::abs("x", o(), Term::app(f.clone(), Term::bound(0))));
        assert_eq!(eta_expand(&c("a", o())), c("a", o()));
        // contract then expand round trip
        let abs = Term::abs("x", o(), Term::app(f.clone(), Term::bound(0)));
        assert_eq!(eta_contract(&abs), f);
        assert_eq!(eta_expand(&eta_contract(&abs)), abs);
    }

    #[test]
    fn eta_expand_higher_order_arguments() {
        // F : (o -> o) -> o applied to g : o -> o becomes F(%x. g(x))
        let g = c("g", Arity::fun(o(), o()));
        let big_f = c("F", Arity::fun(Arity::fun(o(), o()), o()));
        let t = Term::app(big_f.clone(), g.clone());
        let expected = Term::app(big_f, Term::abs("x", o(), Term::app(g, Term::bound(0))));
        assert_eq!(eta_expand(&t), expected);
        // a variable of arity (o -> o) -> o expands with a nested expansion of its argument
        let v = Term::var("f", 0, Arity::fun(Arity::fun(o(), o()), o()));
        let e = eta_expand(&v);
        let expected = Term::abs(
            "x",
            Arity::fun(o(), o()),
            Term::app(v.clone(), Term::abs("y", o(), Term::app(Term::bound(1), Term::bound(0)))),
        );
        assert_eq!(e, expected);
        assert_eq!(arity_of(&e, &[]).unwrap(), arity_of(&v, &[]).unwrap());
    }

    #[test]
    fn eta_expand_two_missing_arguments() {
        let h = c("h", Arity::curried([o(), Arity::fun(o(), o())], o()));
        let e = eta_expand(&h);
        // %x y. h(x, %z. y(z))
        let expected = Term::abs(
            "x",
            o(),
            Term::abs(
                "y",
                Arity::fun(o(), o()),
                Term::apps(
                    h.clone(),
                    [Term::bound(1), Term::abs("z", o(), Term::app(Term::bound(1), Term::bound(0)))],
                ),
            ),
        );
        assert_eq!(e, expected);
        assert_eq!(eta_contract(&e), h);
    }

    #[test]
    fn aconv_examples() {
        let p = c("P", Arity::fun(o(), o()));
        let l1 = Term::abs("x", o(), Term::app(p.clone(), Term::bound(0)));
        let l2 = Term::abs("y", o(), Term::app(p, Term::bound(0)));
        assert!(aconv(&l1, &l2));
        assert!(!aconv(&c("A", o()), &c("B", o())));
        let g = c("G", o());
        let b1 = c("B", o());
        let b2 = c("B2", o());
        let p1 = Term::param("all", vec![g.clone(), b1], o());
        let p2 = Term::param("all", vec![g, b2], o());
        assert!(!aconv(&p1, &p2));
        assert!(aconv(&p1, &p1.clone()));
    }

    #[test]
    fn head_normal_examples() {
        let f = Term::var("f", 0, Arity::curried([o(), o()], o()));
        let big_c = c("C", o());
        let t = Term::abs("x", o(), Term::apps(f.clone(), [Term::bound(0), big_c.clone()]));
        let hn = head_normal(&t);
        assert_eq!(hn.binders.len(), 1);
        assert_eq!(hn.head, f);
        assert_eq!(hn.args, vec![Term::bound(0), big_c]);

        let redex = Term::app(Term::abs("x", o(), Term::bound(0)), c("A", o()));
        let hn = head_normal(&redex);
        assert!(hn.binders.is_empty());
        assert_eq!(hn.head, c("A", o()));
        assert!(hn.args.is_empty());

        let a = c("A", Arity::curried([o(), o()], o()));
        let t = Term::apps(a.clone(), [c("B1", o()), c("B2", o())]);
        let hn = head_normal(&t);
        assert_eq!(hn.head, a);
        assert_eq!(hn.args.len(), 2);
        assert_eq!(hn.rebuild(), t);
    }

    #[test]
    fn apply_env_examples() {
        // env {f = %y. A}, t = f(x) ~> A
        let f = VarId::new("f", 0);
        let mut env = Environment::new(1);
        env.bind(f.clone(), Term::abs("y", o(), c("A", o())));
        let t = Term::app(Term::Var(f, Arity::fun(o(), o())), Term::var("x", 0, o()));
        assert_eq!(instantiate(&env, &t), c("A", o()));
        assert_eq!(apply_env(&Environment::default(), &t), t);

        // replacement descends into parameter subscripts
        let x = VarId::new("x", 0);
        let mut env = Environment::new(1);
        env.bind(x.clone(), c("c", o()));
        let p = Term::param("all", vec![Term::Var(x, o())], term());
        assert_eq!(apply_env(&env, &p), Term::param("all", vec![c("c", o())], term()));
    }

    #[test]
    fn standardize_examples() {
        let a = Term::var("A", 0, o());
        assert_eq!(standardize(&a, 3), Term::var("A", 3, o()));
        let closed = c("k", o());
        assert_eq!(standardize(&closed, 7), closed);
        let f = c("F", Arity::curried([o(), o()], o()));
        let rule_part = Term::apps(f, [Term::var("A", 0, o()), Term::var("B", 0, o())]);
        let one: BTreeSet<VarId> = vars_of(&standardize(&rule_part, 1)).into_keys().collect();
        let two: BTreeSet<VarId> = vars_of(&standardize(&rule_part, 2)).into_keys().collect();
        assert!(one.is_disjoint(&two));
        // parameter subscripts follow the renaming
        let p = Term::param("all", vec![Term::var("H", 0, o())], term());
        assert_eq!(standardize(&p, 4), Term::param("all", vec![Term::var("H", 4, o())], term()));
    }

    #[test]
    fn standardize_keeps_same_name_variables_distinct() {
        let f = c("F", Arity::curried([o(), o()], o()));
        let t = Term::apps(f, [Term::var("h", 5, o()), Term::var("h", 7, o())]);
        assert_eq!(vars_of(&standardize(&t, 10)).len(), 2);
    }
}
