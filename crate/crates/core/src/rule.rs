//! Inference rules as Horn clauses, and resolution.
//!
//! A rule has ordered premises and a conclusion, all of the judgement arity
//! `prop`. The same type is used for goal trees in backwards proof: the
//! conclusion is the original goal and the premises are the open subgoals.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::term::{
    arity_of, canonical, instantiate, max_gen, standardize, var_uses, Arity, Environment, Term,
    VarId,
};
use crate::unify::{unify_pairs, DisagreementPair, UnifyError, UnifyOptions, Unifiers};

pub const PROP: &str = "prop";

pub fn prop() -> Arity {
    Arity::atomic(PROP)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("bad arity: {0}")]
    BadArity(String),
    #[error("scheme variable {0} used at two arities ({1} and {2})")]
    InconsistentVar(String, Arity, Arity),
    #[error("premise index {index} out of range (rule has {len} premises)")]
    IndexOutOfRange { index: usize, len: usize },
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub premises: Vec<Term>,
    pub conclusion: Term,
    /// Flex-flex constraints carried from earlier unifications.
    pub flexflex: Vec<DisagreementPair>,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Rule) -> bool {
        self.premises == other.premises
            && self.conclusion == other.conclusion
            && self.flexflex.len() == other.flexflex.len()
            && self.flexflex.iter().zip(&other.flexflex).all(|(a, b)| {
                let (x, y) = a.closed_sides();
                let (u, v) = b.closed_sides();
                x == u && y == v
            })
    }
}

impl Rule {
    /// The initial goal tree for proving `prop`: one premise, itself.
    pub fn goal(prop: Term) -> Result<Rule, RuleError> {
        mk_rule(vec![prop.clone()], prop)
    }

    pub fn is_theorem(&self) -> bool {
        self.premises.is_empty()
    }

    pub fn max_gen(&self) -> u32 {
        let mut g = max_gen(&self.conclusion);
        for p in &self.premises {
            g = g.max(max_gen(p));
        }
        for ff in &self.flexflex {
            let (l, r) = ff.closed_sides();
            g = g.max(max_gen(&l)).max(max_gen(&r));
        }
        g
    }

    /// All parts of the rule, premises first.
    pub fn parts(&self) -> impl Iterator<Item = &Term> {
        self.premises.iter().chain(std::iter::once(&self.conclusion))
    }

    pub fn standardize(&self, generation: u32) -> Rule {
        Rule {
            premises: self.premises.iter().map(|p| standardize(p, generation)).collect(),
            conclusion: standardize(&self.conclusion, generation),
            flexflex: self
                .flexflex
                .iter()
                .map(|ff| {
                    let (l, r) = ff.closed_sides();
                    DisagreementPair::new(standardize(&l, generation), standardize(&r, generation))
                })
                .collect(),
        }
    }

    /// Instantiate every part under `env` and return canonical forms.
    pub fn instantiate(&self, env: &Environment) -> Rule {
        Rule {
            premises: self.premises.iter().map(|p| canonical(&instantiate(env, p))).collect(),
            conclusion: canonical(&instantiate(env, &self.conclusion)),
            flexflex: instantiate_flexflex(env, &self.flexflex),
        }
    }

    /// Variables of the rule with their arities.
    pub fn vars(&self) -> BTreeMap<VarId, Arity> {
        let mut out = BTreeMap::new();
        for t in self.parts() {
            crate::term::collect_vars(t, &mut out);
        }
        out
    }
}

fn instantiate_flexflex(env: &Environment, pairs: &[DisagreementPair]) -> Vec<DisagreementPair> {
    pairs
        .iter()
        .map(|ff| {
            let (l, r) = ff.closed_sides();
            DisagreementPair::new(instantiate(env, &l), instantiate(env, &r))
        })
        .filter(|p| !crate::term::aconv(&p.lhs, &p.rhs))
        .collect()
}

/// Validate and normalize a rule.
pub fn mk_rule(premises: Vec<Term>, conclusion: Term) -> Result<Rule, RuleError> {
    let mut uses = Vec::new();
    for (k, t) in premises.iter().chain(std::iter::once(&conclusion)).enumerate() {
        let a = arity_of(t, &[]).map_err(|e| RuleError::BadArity(e.to_string()))?;
        if a != prop() {
            let what = if k < premises.len() {
                format!("premise {}", k + 1)
            } else {
                "conclusion".to_string()
            };
            return Err(RuleError::BadArity(format!("{what} has arity {a}, expected {PROP}")));
        }
        var_uses(t, &mut uses);
    }
    check_var_arities(&uses)?;
    Ok(Rule {
        premises: premises.iter().map(canonical).collect(),
        conclusion: canonical(&conclusion),
        flexflex: Vec::new(),
    })
}

pub(crate) fn check_var_arities(uses: &[(VarId, Arity)]) -> Result<(), RuleError> {
    let mut seen: BTreeMap<&str, &Arity> = BTreeMap::new();
    for (v, a) in uses {
        match seen.get(v.name.as_ref()) {
            Some(b) if *b != a => {
                return Err(RuleError::InconsistentVar(v.to_string(), (*b).clone(), a.clone()))
            }
            _ => {
                seen.insert(v.name.as_ref(), a);
            }
        }
    }
    Ok(())
}

/// Lazy sequence of resolvents.
pub struct Resolvents {
    unifiers: Unifiers,
    goal: Rule,
    index: usize,
    rule: Rule,
}

impl Iterator for Resolvents {
    type Item = Result<Rule, UnifyError>;

    fn next(&mut self) -> Option<Self::Item> {
        let u = match self.unifiers.next()? {
            Ok(u) => u,
            Err(e) => return Some(Err(e)),
        };
        let env = &u.env;
        let mut premises = Vec::with_capacity(self.goal.premises.len() + self.rule.premises.len());
        let inst = |t: &Term| canonical(&instantiate(env, t));
        premises.extend(self.goal.premises[..self.index].iter().map(inst));
        premises.extend(self.rule.premises.iter().map(inst));
        premises.extend(self.goal.premises[self.index + 1..].iter().map(inst));
        Some(Ok(Rule {
            premises,
            conclusion: inst(&self.goal.conclusion),
            flexflex: instantiate_flexflex(env, &u.flexflex),
        }))
    }
}

/// Resolve premise `i` of `goal` with the conclusion of `r`, replacing that
/// premise by the premises of `r`. One resolvent per unifier.
pub fn resolve(goal: &Rule, i: usize, r: &Rule, opts: UnifyOptions) -> Result<Resolvents, RuleError> {
    if i >= goal.premises.len() {
        return Err(RuleError::IndexOutOfRange {
            index: i,
            len: goal.premises.len(),
        });
    }
    let generation = goal.max_gen() + 1;
    let rule = r.standardize(generation);
    let env = Environment::new(generation + r.max_gen() + 1);
    let mut pairs = vec![DisagreementPair::new(rule.conclusion.clone(), goal.premises[i].clone())];
    pairs.extend(goal.flexflex.iter().cloned());
    pairs.extend(rule.flexflex.iter().cloned());
    Ok(Resolvents {
        unifiers: unify_pairs(pairs, env, opts),
        goal: goal.clone(),
        index: i,
        rule,
    })
}

/// Discharge the leading premises of `r` with theorem schemes, in order.
pub fn forward_resolve(
    r: &Rule,
    facts: &[Rule],
    opts: UnifyOptions,
) -> Box<dyn Iterator<Item = Result<Rule, UnifyError>> + Send> {
    let mut seq: Box<dyn Iterator<Item = Result<Rule, UnifyError>> + Send> =
        Box::new(std::iter::once(Ok(r.clone())));
    if facts.len() > r.premises.len() || facts.iter().any(|f| !f.is_theorem()) {
        return Box::new(std::iter::empty());
    }
    for fact in facts {
        let fact = fact.clone();
        seq = Box::new(seq.flat_map(move |state| -> Box<dyn Iterator<Item = _> + Send> {
            match state {
                Ok(state) => match resolve(&state, 0, &fact, opts) {
                    Ok(rs) => Box::new(rs),
                    Err(_) => Box::new(std::iter::empty()),
                },
                Err(e) => Box::new(std::iter::once(Err(e))),
            }
        }));
    }
    seq
}

/// Search bound for the unifications inside `derived_rule_check`.
const CHECK_DEPTH: u32 = 24;

/// Is `r` an instance of `instance_of`? The variables of `r` are held fixed
/// while those of `instance_of` may be instantiated.
pub fn derived_rule_check(r: &Rule, instance_of: &Rule) -> bool {
    if r.premises.len() != instance_of.premises.len() {
        return false;
    }
    let frozen = freeze(r);
    let generation = r.max_gen() + 1;
    let general = instance_of.standardize(generation);
    let mut pairs = vec![DisagreementPair::new(general.conclusion.clone(), frozen.conclusion.clone())];
    for (p, q) in general.premises.iter().zip(&frozen.premises) {
        pairs.push(DisagreementPair::new(p.clone(), q.clone()));
    }
    let env = Environment::new(generation + instance_of.max_gen() + 1);
    let first = unify_pairs(pairs, env, UnifyOptions::bounded(CHECK_DEPTH)).next();
    matches!(first, Some(Ok(_)))
}

/// Replace every variable by a constant of the same arity whose name cannot
/// clash with a declared constant.
fn freeze(r: &Rule) -> Rule {
    fn go(t: &Term) -> Term {
        match t {
            Term::Var(v, a) => Term::Const(format!("\u{0}{v}").into(), a.clone()),
            Term::Abs(h, a, b) => Term::abs(h, a.clone(), go(b)),
            Term::App(f, x) => Term::app(go(f), go(x)),
            Term::Param(p) => Term::param(&p.base, p.subs.iter().map(go).collect(), p.arity.clone()),
            _ => t.clone(),
        }
    }
    Rule {
        premises: r.premises.iter().map(go).collect(),
        conclusion: go(&r.conclusion),
        flexflex: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form() -> Arity {
        Arity::atomic("form")
    }
    fn hyps() -> Arity {
        Arity::atomic("hyps")
    }
    fn turnstile(h: Term, a: Term) -> Term {
        let ts = Term::constant("turnstile", Arity::curried([hyps(), form()], prop()));
        Term::apps(ts, [h, a])
    }
    fn bin(name: &str, a: Term, b: Term) -> Term {
        Term::apps(Term::constant(name, Arity::curried([form(), form()], form())), [a, b])
    }
    fn v(n: &str) -> Term {
        Term::var(n, 0, form())
    }
    fn gamma() -> Term {
        Term::var("H", 0, hyps())
    }
    fn k(n: &str) -> Term {
        Term::constant(n, form())
    }

    fn conj_i() -> Rule {
        mk_rule(
            vec![turnstile(gamma(), v("A")), turnstile(gamma(), v("B"))],
            turnstile(gamma(), bin("conj", v("A"), v("B"))),
        )
        .unwrap()
    }
    fn disj_i1() -> Rule {
        mk_rule(
            vec![turnstile(gamma(), v("A"))],
            turnstile(gamma(), bin("disj", v("A"), v("B"))),
        )
        .unwrap()
    }

    #[test]
    fn mk_rule_checks_arities() {
        assert_eq!(conj_i().premises.len(), 2);
        assert!(matches!(mk_rule(vec![], k("A")), Err(RuleError::BadArity(_))));
        let clash = mk_rule(vec![turnstile(gamma(), v("A"))], turnstile(Term::var("A", 0, hyps()), k("B")));
        assert!(matches!(clash, Err(RuleError::InconsistentVar(..))));
    }

    #[test]
    fn resolve_splices_premises() {
        let nil = Term::constant("nil", hyps());
        let goal = Rule::goal(turnstile(nil.clone(), bin("conj", k("B"), k("A")))).unwrap();
        let out: Vec<Rule> = resolve(&goal, 0, &conj_i(), UnifyOptions::default())
            .unwrap()
            .map(Result::unwrap)
            .collect();
        assert_eq!(out.len(), 1);
        assert_eq!(
            out[0].premises,
            vec![turnstile(nil.clone(), k("B")), turnstile(nil.clone(), k("A"))]
        );
        assert_eq!(out[0].conclusion, goal.conclusion);
        let none: Vec<_> = resolve(&goal, 0, &disj_i1(), UnifyOptions::default()).unwrap().collect();
        assert!(none.is_empty());
        assert!(matches!(
            resolve(&goal, 1, &conj_i(), UnifyOptions::default()),
            Err(RuleError::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn forward_resolution_builds_theorem() {
        let nil = Term::constant("nil", hyps());
        let p = mk_rule(vec![], turnstile(nil.clone(), k("P"))).unwrap();
        let q = mk_rule(vec![], turnstile(nil.clone(), k("Q"))).unwrap();
        let out: Vec<Rule> = forward_resolve(&conj_i(), &[p.clone(), q], UnifyOptions::default())
            .map(Result::unwrap)
            .collect();
        assert_eq!(out.len(), 1);
        assert!(out[0].is_theorem());
        assert_eq!(out[0].conclusion, turnstile(nil.clone(), bin("conj", k("P"), k("Q"))));

        let zero: Vec<Rule> = forward_resolve(&conj_i(), &[], UnifyOptions::default())
            .map(Result::unwrap)
            .collect();
        assert_eq!(zero, vec![conj_i()]);

        let unrelated = mk_rule(vec![turnstile(nil.clone(), k("R"))], turnstile(nil, k("S"))).unwrap();
        assert_eq!(forward_resolve(&unrelated, &[p], UnifyOptions::default()).count(), 0);
    }

    #[test]
    fn derived_rule_check_examples() {
        assert!(derived_rule_check(&conj_i(), &conj_i()));
        assert!(!derived_rule_check(&conj_i(), &disj_i1()));
        // an instance of a scheme passes, the converse does not
        let nil = Term::constant("nil", hyps());
        let inst = mk_rule(
            vec![turnstile(nil.clone(), k("P")), turnstile(nil.clone(), k("Q"))],
            turnstile(nil, bin("conj", k("P"), k("Q"))),
        )
        .unwrap();
        assert!(derived_rule_check(&inst, &conj_i()));
        assert!(!derived_rule_check(&conj_i(), &inst));
    }

    #[test]
    fn resolvents_standardized_apart() {
        let goal = Rule::goal(turnstile(gamma(), bin("conj", v("A"), v("B")))).unwrap();
        let out: Vec<Rule> = resolve(&goal, 0, &conj_i(), UnifyOptions::default())
            .unwrap()
            .map(Result::unwrap)
            .collect();
        assert_eq!(out.len(), 1);
        // the goal's own variables remain and are not confused with the rule's
        let vars = out[0].vars();
        assert!(vars.keys().all(|v| v.gen == 0));
        assert_eq!(vars.len(), 3);
    }
}
