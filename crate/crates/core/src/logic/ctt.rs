//! A fragment of constructive type theory with type-checking tactics.
//!
//! Both tactics search depth-first, choosing rules by the shape of each
//! subgoal and deferring subgoals that are too flexible to guide the search:
//! - `typecheck`: `a : A` is deferred while `a` is flexible, otherwise
//!   assumption, introduction and elimination rules apply; `A type` is
//!   deferred while `A` is flexible, otherwise formation rules apply.
//! - `intr`: `a : A` is deferred only when both `a` and `A` are flexible,
//!   and only assumption and introduction rules apply; `A type` as above.

use std::sync::Arc;

use indexmap::IndexMap;

use super::{load_fixture, Logic};
use crate::rule::Rule;
use crate::tactic::{depth_rules_fun_tac, GoalAnalyzer, Limits};
use crate::term::Term;

pub const SOURCE: &str = include_str!("../../fixtures/ctt.rules");

const ASSUMPTION: [&str; 2] = ["hyp", "thin"];
const FORMATION: [&str; 5] = ["NatF", "ProdF", "SumF", "TimesF", "PlusF"];
const INTRO: [&str; 7] = ["NatI0", "NatIs", "ProdIntr", "SumI", "TimesI", "PlusIl", "PlusIr"];
const ELIM: [&str; 5] = ["NatE", "ProdE", "SumE", "TimesE", "PlusE"];

/// The judgement of a sequent `H |- J`.
pub enum Judgement<'a> {
    Elem(&'a Term, &'a Term),
    Type(&'a Term),
}

pub fn judgement(p: &Term) -> Option<Judgement<'_>> {
    let (head, args) = p.strip_app();
    if !matches!(head, Term::Const(n, _) if n.as_ref() == "turnstile") || args.len() != 2 {
        return None;
    }
    let (j, jargs) = args[1].strip_app();
    match (j, jargs.as_slice()) {
        (Term::Const(n, _), [a, t]) if n.as_ref() == "elem" => Some(Judgement::Elem(a, t)),
        (Term::Const(n, _), [t]) if n.as_ref() == "istype" => Some(Judgement::Type(t)),
        _ => None,
    }
}

fn group(rules: &IndexMap<String, Rule>, names: &[&[&str]]) -> Vec<Rule> {
    names.iter().flat_map(|ns| ns.iter()).map(|n| rules[*n].clone()).collect()
}

/// Analyzer of the `typecheck` tactic over the fixture's rules.
pub fn type_check_analyzer(rules: &IndexMap<String, Rule>) -> GoalAnalyzer {
    let formation = group(rules, &[&FORMATION]);
    let check = group(rules, &[&ASSUMPTION, &INTRO, &ELIM]);
    Arc::new(move |p: &Term| match judgement(p) {
        Some(Judgement::Elem(a, _)) if !a.is_flexible() => check.clone(),
        Some(Judgement::Type(t)) if !t.is_flexible() => formation.clone(),
        _ => Vec::new(),
    })
}

/// Analyzer of the `intr` tactic over the fixture's rules.
pub fn depth_intr_analyzer(rules: &IndexMap<String, Rule>) -> GoalAnalyzer {
    let formation = group(rules, &[&FORMATION]);
    let intr = group(rules, &[&ASSUMPTION, &INTRO]);
    Arc::new(move |p: &Term| match judgement(p) {
        Some(Judgement::Elem(a, t)) if !(a.is_flexible() && t.is_flexible()) => intr.clone(),
        Some(Judgement::Type(t)) if !t.is_flexible() => formation.clone(),
        _ => Vec::new(),
    })
}

pub fn ctt() -> Logic {
    let mut l = load_fixture("ctt", SOURCE);
    let type_check = type_check_analyzer(&l.rules);
    let depth_intr = depth_intr_analyzer(&l.rules);
    l.tactics.insert(
        "typecheck".into(),
        Arc::new(move |_, lim: Limits| depth_rules_fun_tac(type_check.clone(), lim)),
    );
    l.tactics.insert(
        "intr".into(),
        Arc::new(move |_, lim: Limits| depth_rules_fun_tac(depth_intr.clone(), lim)),
    );
    l
}
