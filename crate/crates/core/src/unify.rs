//! Higher-order unification in the style of Huet.
//!
//! SIMPL decomposes rigid-rigid pairs and assigns bare variables; MATCH
//! guesses a binding for the head of one flex-rigid pair by projection or
//! imitation. Flex-flex pairs are kept as constraints. The search tree is
//! enumerated by iterative deepening on the number of MATCH steps, so every
//! unifier at a finite depth is eventually emitted even when some branch of
//! the tree is infinite. Within one depth, projections are tried before
//! imitation.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{
    apply_env, eta_expand, eta_expand_in, has_loose_bounds, has_loose_from, head_normal, max_gen, normalize,
    Arity, Environment, Name, Term, VarId,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnifyError {
    #[error("unification depth bound {0} exceeded")]
    DepthExceeded(u32),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UnifyOptions {
    /// Maximum number of MATCH steps on one branch; `None` is unlimited.
    pub max_depth: Option<u32>,
}

impl UnifyOptions {
    pub fn bounded(depth: u32) -> UnifyOptions {
        UnifyOptions {
            max_depth: Some(depth),
        }
    }
}

/// Two terms to be made equal under a shared list of binders (outermost
/// first). Both sides are eta-long and beta-normal.
#[derive(Clone, Debug)]
pub struct DisagreementPair {
    pub binders: Vec<(Name, Arity)>,
    pub lhs: Term,
    pub rhs: Term,
}

impl DisagreementPair {
    /// Pair of two closed terms of equal arity; outer abstractions are
    /// moved into the binder list.
    pub fn new(lhs: Term, rhs: Term) -> DisagreementPair {
        let lhs = eta_expand(&normalize(&lhs));
        let rhs = eta_expand(&normalize(&rhs));
        strip_pair(Vec::new(), lhs, rhs)
    }

    /// The pair as a closed equation `%binders. lhs` = `%binders. rhs`.
    pub fn closed_sides(&self) -> (Term, Term) {
        (close(&self.binders, &self.lhs), close(&self.binders, &self.rhs))
    }
}

fn close(binders: &[(Name, Arity)], body: &Term) -> Term {
    binders
        .iter()
        .rev()
        .fold(body.clone(), |acc, (h, a)| Term::Abs(h.clone(), a.clone(), Arc::new(acc)))
}

fn strip_pair(mut binders: Vec<(Name, Arity)>, mut lhs: Term, mut rhs: Term) -> DisagreementPair {
    loop {
        match (&lhs, &rhs) {
            (Term::Abs(h, a, l), Term::Abs(_, _, r)) => {
                binders.push((h.clone(), a.clone()));
                let (l, r) = ((**l).clone(), (**r).clone());
                lhs = l;
                rhs = r;
            }
            _ => return DisagreementPair { binders, lhs, rhs },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    RigidRigid,
    FlexRigid,
    FlexFlex,
    Assign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occurs {
    OccursRigid,
    NoOccurrence,
    Unclassified,
}

#[derive(Clone, Debug)]
pub struct UnifyProblem {
    pub env: Environment,
    pub pairs: VecDeque<DisagreementPair>,
    pub flexflex: Vec<DisagreementPair>,
}

#[derive(Clone, Debug)]
pub struct Unifier {
    pub env: Environment,
    pub flexflex: Vec<DisagreementPair>,
}

impl Unifier {
    /// The environment extended with the trivial unifier of the remaining
    /// flex-flex pairs.
    pub fn closed_env(&self) -> Environment {
        let mut env = self.env.clone();
        flexflex_close(&mut env, &self.flexflex);
        env
    }
}

#[derive(Clone, Debug)]
pub enum Simpl {
    Solved(Unifier),
    Failed,
    Branch(UnifyProblem, DisagreementPair),
}

fn is_rigid(head: &Term) -> bool {
    matches!(head, Term::Const(..) | Term::Bound(_) | Term::Param(_))
}

/// A variable applied to the innermost bound variables in order, such as
/// `?F(x, y)` under binders `x y`. Returns the variable, its arity and the
/// number of arguments. A bare variable is the case of zero arguments.
fn pattern_var(t: &Term) -> Option<(&VarId, &Arity, u32)> {
    let (head, args) = t.strip_app();
    let Term::Var(v, a) = head else { return None };
    let k = args.len() as u32;
    for (i, arg) in args.iter().enumerate() {
        if !matches!(arg, Term::Bound(j) if *j == k - 1 - i as u32) {
            return None;
        }
    }
    Some((v, a, k))
}

/// The binding `%x1..xk. other` solving `?F(x1..xk) = other`, when `other`
/// mentions no outer binder and no `?F`.
fn pattern_binding(side: &Term, other: &Term, binders: &[(Name, Arity)]) -> Option<Result<(VarId, Term), ()>> {
    let (v, arity, k) = pattern_var(side)?;
    if k as usize > binders.len() {
        return None;
    }
    match occurs_rigid(v, other) {
        Occurs::OccursRigid => Some(Err(())),
        Occurs::NoOccurrence if !has_loose_from(other, k) => {
            let (args, _) = arity.spine();
            let hints = &binders[binders.len() - k as usize..];
            let body = args
                .iter()
                .zip(hints)
                .rev()
                .fold(other.clone(), |acc, (a, (h, _))| Term::Abs(h.clone(), (*a).clone(), Arc::new(acc)));
            Some(Ok((v.clone(), body)))
        }
        _ => None,
    }
}

/// Classify a normalized pair by its heads.
pub fn classify(p: &DisagreementPair) -> PairClass {
    for (side, other) in [(&p.lhs, &p.rhs), (&p.rhs, &p.lhs)] {
        if let Some(Ok(_)) = pattern_binding(side, other, &p.binders) {
            return PairClass::Assign;
        }
    }
    let l = is_rigid(head_normal(&p.lhs).head.head());
    let r = is_rigid(head_normal(&p.rhs).head.head());
    match (l, r) {
        (true, true) => PairClass::RigidRigid,
        (false, false) => PairClass::FlexFlex,
        _ => PairClass::FlexRigid,
    }
}

/// Where does `v` occur in `t`? Paths through constant, bound and parameter
/// heads (including parameter subscripts) are rigid.
pub fn occurs_rigid(v: &VarId, t: &Term) -> Occurs {
    let hn = head_normal(t);
    match &hn.head {
        Term::Var(w, _) => {
            if w == v {
                Occurs::OccursRigid
            } else if hn.args.iter().any(|a| crate::term::contains_var(a, v)) {
                Occurs::Unclassified
            } else {
                Occurs::NoOccurrence
            }
        }
        head => {
            let subs: &[Term] = match head {
                Term::Param(p) => &p.subs,
                _ => &[],
            };
            let mut result = Occurs::NoOccurrence;
            for a in subs.iter().chain(hn.args.iter()) {
                match occurs_rigid(v, a) {
                    Occurs::OccursRigid => return Occurs::OccursRigid,
                    Occurs::Unclassified => result = Occurs::Unclassified,
                    Occurs::NoOccurrence => {}
                }
            }
            result
        }
    }
}

fn instantiate_pair(env: &Environment, p: &DisagreementPair) -> DisagreementPair {
    if env.is_empty() {
        return p.clone();
    }
    let lhs = normalize(&apply_env(env, &p.lhs));
    let rhs = normalize(&apply_env(env, &p.rhs));
    strip_pair(p.binders.clone(), lhs, rhs)
}

fn rigid_heads_agree(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Const(x, s), Term::Const(y, t)) => x == y && s == t,
        (Term::Bound(i), Term::Bound(j)) => i == j,
        (Term::Param(p), Term::Param(q)) => {
            p.base == q.base && p.arity == q.arity && p.subs.len() == q.subs.len()
        }
        _ => false,
    }
}

/// Run SIMPL to a fixed point.
pub fn simpl(mut prob: UnifyProblem) -> Simpl {
    let mut flex_rigid: Vec<DisagreementPair> = Vec::new();
    loop {
        let Some(pair) = prob.pairs.pop_front() else {
            break;
        };
        let pair = instantiate_pair(&prob.env, &pair);
        let DisagreementPair { binders, lhs, rhs } = &pair;
        if crate::term::aconv(lhs, rhs) {
            continue;
        }
        // assignment of a variable, possibly applied to bound variables
        let mut assigned = false;
        for (side, other) in [(lhs, rhs), (rhs, lhs)] {
            match pattern_binding(side, other, binders) {
                Some(Err(())) => return Simpl::Failed,
                Some(Ok((v, t))) => {
                    prob.env.bind(v, t);
                    // the environment changed: postponed pairs must be revisited
                    prob.pairs.extend(flex_rigid.drain(..));
                    prob.pairs.extend(prob.flexflex.drain(..));
                    assigned = true;
                    break;
                }
                None => {}
            }
        }
        if assigned {
            continue;
        }
        let lh = head_normal(lhs);
        let rh = head_normal(rhs);
        match (is_rigid(&lh.head), is_rigid(&rh.head)) {
            (true, true) => {
                if !rigid_heads_agree(&lh.head, &rh.head) || lh.args.len() != rh.args.len() {
                    return Simpl::Failed;
                }
                let mut new_pairs = Vec::new();
                if let (Term::Param(p), Term::Param(q)) = (&lh.head, &rh.head) {
                    for (s, t) in p.subs.iter().zip(&q.subs) {
                        new_pairs.push(strip_pair(binders.clone(), s.clone(), t.clone()));
                    }
                }
                for (s, t) in lh.args.iter().zip(&rh.args) {
                    new_pairs.push(strip_pair(binders.clone(), s.clone(), t.clone()));
                }
                for p in new_pairs.into_iter().rev() {
                    prob.pairs.push_front(p);
                }
            }
            (false, false) => prob.flexflex.push(pair),
            (false, true) => flex_rigid.push(pair),
            (true, false) => flex_rigid.push(DisagreementPair {
                binders: pair.binders,
                lhs: pair.rhs,
                rhs: pair.lhs,
            }),
        }
    }
    if flex_rigid.is_empty() {
        return Simpl::Solved(Unifier {
            env: prob.env,
            flexflex: prob.flexflex,
        });
    }
    let chosen = flex_rigid.remove(0);
    prob.pairs.extend(flex_rigid);
    Simpl::Branch(prob, chosen)
}

/// Candidate bindings for the flexible head of a flex-rigid pair:
/// projections first, then imitation. Each candidate is `env` extended by
/// one binding.
pub fn match_candidates(p: &DisagreementPair, env: &Environment) -> Vec<Environment> {
    let lh = head_normal(&p.lhs);
    let rh = head_normal(&p.rhs);
    let (f, f_arity) = match &lh.head {
        Term::Var(v, a) => (v.clone(), a.clone()),
        _ => return Vec::new(),
    };
    let (alphas, beta) = f_arity.spine();
    let alphas: Vec<Arity> = alphas.into_iter().cloned().collect();
    let beta = beta.clone();
    let n = alphas.len() as u32;
    let mut out = Vec::new();

    // f = %x1..xn. xi(h1(x), .., hm(x))
    for (i, alpha) in alphas.iter().enumerate() {
        let (gammas, res) = alpha.spine();
        if *res != beta {
            continue;
        }
        let gammas: Vec<Arity> = gammas.into_iter().cloned().collect();
        let mut child = env.clone();
        let head = Term::Bound(n - 1 - i as u32);
        let body = apply_fresh(&mut child, head, &gammas, &alphas);
        child.bind(f.clone(), eta_expand(&abstract_over(&alphas, body)));
        out.push(child);
    }

    // f = %x1..xn. F(h1(x), .., hq(x))
    let imitable = match &rh.head {
        Term::Const(..) => true,
        Term::Param(q) => !q.subs.iter().any(has_loose_bounds),
        _ => false,
    };
    if imitable {
        let head_arity = match &rh.head {
            Term::Const(_, a) => a.clone(),
            Term::Param(q) => q.arity.clone(),
            _ => unreachable!(),
        };
        let deltas: Vec<Arity> = head_arity.spine().0.into_iter().cloned().collect();
        let mut child = env.clone();
        let head = crate::term::lift(&rh.head, n, 0);
        let body = apply_fresh(&mut child, head, &deltas, &alphas);
        child.bind(f, eta_expand(&abstract_over(&alphas, body)));
        out.push(child);
    }
    out
}

/// `head(h1(x1..xn), .., hm(x1..xn))` with fresh `hj : alphas -> arg_arities[j]`,
/// inside `n = alphas.len()` binders.
fn apply_fresh(env: &mut Environment, head: Term, arg_arities: &[Arity], alphas: &[Arity]) -> Term {
    let n = alphas.len() as u32;
    let bound_args: Vec<Term> = (0..n).map(|k| Term::Bound(n - 1 - k)).collect();
    let args = arg_arities.iter().map(|gamma| {
        let h = env.fresh_var("h", Arity::curried(alphas.iter().cloned(), gamma.clone()));
        Term::apps(h, bound_args.iter().cloned())
    });
    let args: Vec<Term> = args.collect();
    Term::apps(head, args)
}

fn abstract_over(alphas: &[Arity], body: Term) -> Term {
    alphas.iter().enumerate().rev().fold(body, |acc, (k, a)| {
        Term::Abs(format!("x{}", k + 1).into(), a.clone(), Arc::new(acc))
    })
}

/// The trivial unifier of a list of flex-flex pairs, as an environment of
/// its own. `env` supplies fresh generations and the bindings the pairs are
/// read under.
pub fn flexflex_trivial(pairs: &[DisagreementPair], env: &mut Environment) -> Environment {
    let mut combined = env.clone();
    let added = flexflex_close(&mut combined, pairs);
    let mut out = Environment::new(combined.next_gen());
    for (v, t) in added {
        out.bind(v, t);
    }
    env.bump_gen_past(combined.next_gen().saturating_sub(1));
    out
}

/// Extend `env` so every pair in `pairs` becomes alpha-equal; returns the
/// new bindings.
fn flexflex_close(env: &mut Environment, pairs: &[DisagreementPair]) -> Vec<(VarId, Term)> {
    let mut added = Vec::new();
    for p in pairs {
        let p = instantiate_pair(env, p);
        if crate::term::aconv(&p.lhs, &p.rhs) {
            continue;
        }
        let target = if p.lhs.is_var() {
            p.lhs.clone()
        } else if p.rhs.is_var() {
            p.rhs.clone()
        } else {
            let arity = head_arity(&p.lhs).result().clone();
            env.fresh_var("h", arity)
        };
        for side in [&p.lhs, &p.rhs] {
            let side = normalize(&apply_env(env, side));
            if crate::term::aconv(&side, &target) {
                continue;
            }
            let (head, _) = side.strip_app();
            if let Term::Var(v, a) = head {
                let alphas: Vec<Arity> = a.spine().0.into_iter().cloned().collect();
                let k = alphas.len() as u32;
                let binding = abstract_over(&alphas, crate::term::lift(&target, k, 0));
                env.bind(v.clone(), binding.clone());
                added.push((v.clone(), binding));
            }
        }
    }
    added
}

fn head_arity(t: &Term) -> Arity {
    match t.head() {
        Term::Var(_, a) | Term::Const(_, a) => a.clone(),
        Term::Param(p) => p.arity.clone(),
        _ => Arity::atomic("?"),
    }
}

/// Lazy enumeration of the unifiers of a problem.
pub struct Unifiers {
    root: UnifyProblem,
    opts: UnifyOptions,
    /// depth of the current iteration
    limit: u32,
    stack: Vec<(UnifyProblem, u32)>,
    truncated: bool,
    done: bool,
}

impl Unifiers {
    pub fn new(root: UnifyProblem, opts: UnifyOptions) -> Unifiers {
        Unifiers {
            stack: vec![(root.clone(), 0)],
            root,
            opts,
            limit: 0,
            truncated: false,
            done: false,
        }
    }
}

impl Iterator for Unifiers {
    type Item = Result<Unifier, UnifyError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            let Some((prob, depth)) = self.stack.pop() else {
                // iteration finished
                if !self.truncated {
                    self.done = true;
                    return None;
                }
                if self.opts.max_depth == Some(self.limit) {
                    self.done = true;
                    return Some(Err(UnifyError::DepthExceeded(self.limit)));
                }
                self.limit += 1;
                self.truncated = false;
                self.stack.push((self.root.clone(), 0));
                continue;
            };
            match simpl(prob) {
                Simpl::Failed => {}
                Simpl::Solved(u) => {
                    // shallower solutions were emitted by an earlier iteration
                    if depth == self.limit {
                        return Some(Ok(u));
                    }
                }
                Simpl::Branch(rest, chosen) => {
                    if depth == self.limit {
                        self.truncated = true;
                        continue;
                    }
                    let children = match_candidates(&chosen, &rest.env);
                    for env in children.into_iter().rev() {
                        let mut pairs = VecDeque::with_capacity(rest.pairs.len() + rest.flexflex.len() + 1);
                        pairs.push_back(chosen.clone());
                        pairs.extend(rest.pairs.iter().cloned());
                        pairs.extend(rest.flexflex.iter().cloned());
                        self.stack.push((
                            UnifyProblem {
                                env,
                                pairs,
                                flexflex: Vec::new(),
                            },
                            depth + 1,
                        ));
                    }
                }
            }
        }
    }
}

/// Unify a list of pairs under `env`.
pub fn unify_pairs(pairs: Vec<DisagreementPair>, mut env: Environment, opts: UnifyOptions) -> Unifiers {
    for p in &pairs {
        let (l, r) = p.closed_sides();
        env.bump_gen_past(max_gen(&l).max(max_gen(&r)));
    }
    Unifiers::new(
        UnifyProblem {
            env,
            pairs: pairs.into(),
            flexflex: Vec::new(),
        },
        opts,
    )
}

/// Unify two terms of equal arity.
pub fn unify(t: &Term, u: &Term, env: Environment, opts: UnifyOptions) -> Unifiers {
    unify_pairs(vec![DisagreementPair::new(t.clone(), u.clone())], env, opts)
}

/// Eta-long form of a term under binders (outermost first).
pub fn eta_long_under(t: &Term, binders: &[Arity]) -> Term {
    let mut stack = binders.to_vec();
    eta_expand_in(&normalize(t), &mut stack)
}
