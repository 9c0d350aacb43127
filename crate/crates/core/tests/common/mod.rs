//! Helpers shared by the integration tests: an independent normalizer used
//! as an oracle, unifier bookkeeping and a random term generator.

#![allow(dead_code)]

use std::collections::BTreeMap;

use hornkit::logic::signature::Signature;
use hornkit::term::{Arity, Environment, Term, VarId};
use hornkit::unify::Unifier;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Oracle: substitution, beta normalization and eta contraction written from
// scratch over de Bruijn terms, sharing nothing with the kernel.

fn shift(t: &Term, d: i64, cutoff: u32) -> Term {
    match t {
        Term::Bound(i) if *i >= cutoff => Term::Bound((*i as i64 + d) as u32),
        Term::Bound(_) | Term::Const(..) | Term::Var(..) => t.clone(),
        Term::Abs(h, a, b) => Term::abs(h, a.clone(), shift(b, d, cutoff + 1)),
        Term::App(f, x) => Term::app(shift(f, d, cutoff), shift(x, d, cutoff)),
        Term::Param(p) => Term::param(&p.base, p.subs.iter().map(|s| shift(s, d, cutoff)).collect(), p.arity.clone()),
    }
}

/// `body` with index `k` replaced by `arg` (closed over the same context).
fn subst(body: &Term, k: u32, arg: &Term) -> Term {
    match body {
        Term::Bound(i) if *i == k => shift(arg, k as i64, 0),
        Term::Bound(i) if *i > k => Term::Bound(i - 1),
        Term::Bound(_) | Term::Const(..) | Term::Var(..) => body.clone(),
        Term::Abs(h, a, b) => Term::abs(h, a.clone(), subst(b, k + 1, arg)),
        Term::App(f, x) => Term::app(subst(f, k, arg), subst(x, k, arg)),
        Term::Param(p) => Term::param(&p.base, p.subs.iter().map(|s| subst(s, k, arg)).collect(), p.arity.clone()),
    }
}

/// Full beta normal form.
pub fn oracle_beta(t: &Term) -> Term {
    match t {
        Term::Abs(h, a, b) => Term::abs(h, a.clone(), oracle_beta(b)),
        Term::App(f, x) => {
            let f = oracle_beta(f);
            let x = oracle_beta(x);
            match f {
                Term::Abs(_, _, body) => oracle_beta(&subst(&body, 0, &x)),
                f => Term::app(f, x),
            }
        }
        Term::Param(p) => Term::param(&p.base, p.subs.iter().map(oracle_beta).collect(), p.arity.clone()),
        _ => t.clone(),
    }
}

fn free_in(t: &Term, k: u32) -> bool {
    match t {
        Term::Bound(i) => *i == k,
        Term::Const(..) | Term::Var(..) => false,
        Term::Abs(_, _, b) => free_in(b, k + 1),
        Term::App(f, x) => free_in(f, k) || free_in(x, k),
        Term::Param(p) => p.subs.iter().any(|s| free_in(s, k)),
    }
}

/// Eta contraction, bottom up.
pub fn oracle_eta(t: &Term) -> Term {
    match t {
        Term::Abs(h, a, b) => {
            let b = oracle_eta(b);
            if let Term::App(f, x) = &b {
                if matches!(**x, Term::Bound(0)) && !free_in(f, 0) {
                    return shift(f, -1, 0);
                }
            }
            Term::abs(h, a.clone(), b)
        }
        Term::App(f, x) => Term::app(oracle_eta(f), oracle_eta(x)),
        Term::Param(p) => Term::param(&p.base, p.subs.iter().map(oracle_eta).collect(), p.arity.clone()),
        _ => t.clone(),
    }
}

/// Replace bound scheme variables by their values until none remain.
pub fn oracle_subst_env(env: &Environment, t: &Term) -> Term {
    match t {
        Term::Var(v, _) => match env.lookup(v) {
            Some(value) => oracle_subst_env(env, value),
            None => t.clone(),
        },
        Term::Abs(h, a, b) => Term::abs(h, a.clone(), oracle_subst_env(env, b)),
        Term::App(f, x) => Term::app(oracle_subst_env(env, f), oracle_subst_env(env, x)),
        Term::Param(p) => Term::param(&p.base, p.subs.iter().map(|s| oracle_subst_env(env, s)).collect(), p.arity.clone()),
        _ => t.clone(),
    }
}

/// Structural equality ignoring abstraction hints.
pub fn oracle_alpha(t: &Term, u: &Term) -> bool {
    match (t, u) {
        (Term::Const(a, x), Term::Const(b, y)) => a == b && x == y,
        (Term::Var(a, x), Term::Var(b, y)) => a == b && x == y,
        (Term::Bound(i), Term::Bound(j)) => i == j,
        (Term::Abs(_, a, b), Term::Abs(_, c, d)) => a == c && oracle_alpha(b, d),
        (Term::App(f, x), Term::App(g, y)) => oracle_alpha(f, g) && oracle_alpha(x, y),
        (Term::Param(p), Term::Param(q)) => {
            p.base == q.base
                && p.arity == q.arity
                && p.subs.len() == q.subs.len()
                && p.subs.iter().zip(&q.subs).all(|(a, b)| oracle_alpha(a, b))
        }
        _ => false,
    }
}

/// Beta-eta normal form.
pub fn oracle_nf(t: &Term) -> Term {
    oracle_eta(&oracle_beta(t))
}

pub fn oracle_equal(t: &Term, u: &Term) -> bool {
    oracle_alpha(&oracle_nf(t), &oracle_nf(u))
}

/// Does the closed environment of `u` make `lhs` and `rhs` equal?
pub fn sound(u: &Unifier, lhs: &Term, rhs: &Term) -> bool {
    let env = u.closed_env();
    oracle_equal(&oracle_subst_env(&env, lhs), &oracle_subst_env(&env, rhs))
}

// ---------------------------------------------------------------------------
// Unifier bookkeeping.

/// The values a unifier gives to `vars`, in normal form. Variables left
/// alone or renamed to another variable are omitted.
pub fn solution(u: &Unifier, vars: &[(VarId, Arity)]) -> BTreeMap<VarId, Term> {
    let env = u.closed_env();
    let mut out = BTreeMap::new();
    for (v, a) in vars {
        let value = oracle_nf(&oracle_subst_env(&env, &Term::Var(v.clone(), a.clone())));
        if !matches!(value, Term::Var(..)) {
            out.insert(v.clone(), value);
        }
    }
    out
}

pub fn same_solution(a: &BTreeMap<VarId, Term>, b: &BTreeMap<VarId, Term>) -> bool {
    a.len() == b.len() && a.iter().all(|(v, t)| b.get(v).is_some_and(|u| oracle_alpha(t, u)))
}

/// Remove repeated solutions, keeping the first occurrence.
pub fn dedup(sols: Vec<BTreeMap<VarId, Term>>) -> Vec<BTreeMap<VarId, Term>> {
    let mut out: Vec<BTreeMap<VarId, Term>> = Vec::new();
    for s in sols {
        if !out.iter().any(|o| same_solution(o, &s)) {
            out.push(s);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Random well-aritied terms over a signature.

pub struct TermGen<'a> {
    pub sig: &'a Signature,
    pub rng: ChaCha8Rng,
    vars: Vec<(String, Arity)>,
}

const HINTS: [&str; 3] = ["x", "y", "z"];

impl<'a> TermGen<'a> {
    pub fn new(sig: &'a Signature, rng: ChaCha8Rng) -> TermGen<'a> {
        TermGen { sig, rng, vars: Vec::new() }
    }

    /// Forget the variable pool, so a new term may reuse names at other
    /// arities.
    pub fn reset(&mut self) {
        self.vars.clear();
    }

    pub fn atomics(&self) -> Vec<Arity> {
        self.sig.atomics.iter().map(|a| Arity::Atomic(a.clone())).collect()
    }

    fn random_arity(&mut self, depth: u32) -> Arity {
        let atoms: Vec<Arity> = self.atomics().into_iter().filter(|a| a.to_string() != "prop").collect();
        let a = atoms.choose(&mut self.rng).cloned().unwrap_or_else(|| Arity::atomic("prop"));
        if depth > 0 && self.rng.gen_bool(0.25) {
            let r = self.random_arity(depth - 1);
            Arity::fun(a, r)
        } else {
            a
        }
    }

    fn var_of(&mut self, a: &Arity) -> VarId {
        let same: Vec<String> = self.vars.iter().filter(|(_, b)| b == a).map(|(n, _)| n.clone()).collect();
        if !same.is_empty() && self.rng.gen_bool(0.6) {
            return VarId::new(same.choose(&mut self.rng).unwrap(), 0);
        }
        let name = format!("v{}", self.vars.len());
        self.vars.push((name.clone(), a.clone()));
        VarId::new(&name, 0)
    }

    pub fn term(&mut self, a: &Arity, depth: u32) -> Term {
        self.term_in(a, depth, &mut Vec::new())
    }

    fn term_in(&mut self, a: &Arity, depth: u32, scope: &mut Vec<Arity>) -> Term {
        if let Arity::Fun(x, y) = a {
            let hint = *HINTS.choose(&mut self.rng).unwrap();
            scope.push((**x).clone());
            let body = self.term_in(y, depth.saturating_sub(1), scope);
            scope.pop();
            return Term::abs(hint, (**x).clone(), body);
        }
        // candidate heads of result arity `a`: (head, argument arities)
        let mut heads: Vec<(Term, Vec<Arity>)> = Vec::new();
        for (name, ar) in &self.sig.constants {
            let (args, res) = ar.spine();
            if res == a && (depth > 0 || args.is_empty()) {
                heads.push((Term::Const(name.clone(), ar.clone()), args.into_iter().cloned().collect()));
            }
        }
        for (k, ar) in scope.iter().enumerate() {
            let (args, res) = ar.spine();
            if res == a && (depth > 0 || args.is_empty()) {
                let index = (scope.len() - 1 - k) as u32;
                heads.push((Term::Bound(index), args.into_iter().cloned().collect()));
            }
        }
        if depth > 0 {
            for (base, ar) in &self.sig.skolems {
                if ar == a {
                    heads.push((Term::param(base, Vec::new(), ar.clone()), Vec::new()));
                }
            }
        }
        let use_var = heads.is_empty() || self.rng.gen_bool(0.2);
        if use_var {
            let mut args = Vec::new();
            if depth > 0 && self.rng.gen_bool(0.4) {
                for _ in 0..self.rng.gen_range(1..=2) {
                    args.push(self.random_arity(0));
                }
            }
            let ar = Arity::curried(args.clone(), a.clone());
            let v = self.var_of(&ar);
            let args: Vec<Term> = args.iter().map(|x| self.term_in(x, depth.saturating_sub(1), scope)).collect();
            return Term::apps(Term::Var(v, ar), args);
        }
        let (head, args) = heads.choose(&mut self.rng).cloned().unwrap();
        if let Term::Param(p) = &head {
            let n = self.rng.gen_range(1..=2);
            let subs = (0..n)
                .map(|_| {
                    let sa = self.random_arity(1);
                    self.term_in(&sa, depth - 1, scope)
                })
                .collect();
            return Term::param(&p.base, subs, p.arity.clone());
        }
        let args: Vec<Term> = args.iter().map(|x| self.term_in(x, depth - 1, scope)).collect();
        Term::apps(head, args)
    }
}
