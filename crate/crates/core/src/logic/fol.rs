//! First-order logic with a fixed hypothesis list.
//!
//! Tactics, each aimed at one premise:
//! - `assumption`: close the premise with a hypothesis, searching the list
//!   with `assume` and `weaken`;
//! - `intro`: any introduction rule;
//! - `elim`: an elimination rule whose major premise is a hypothesis;
//! - `step`: `assumption`, then `intro`, then `elim`;
//! - `fast`: depth-first search with `step` on the first premise.

use std::sync::Arc;

use super::{load_fixture, Logic};
use crate::rule::Rule;
use crate::tactic::{append, depth_first, rules_tac, then, Limits, Satisfied, Tactic};
use crate::unify::UnifyOptions;

pub const SOURCE: &str = include_str!("../../fixtures/fol.rules");

const INTRO: [&str; 5] = ["conjI", "disjI1", "impI", "allI", "exI"];
const ELIM: [&str; 5] = ["conjE1", "conjE2", "impE", "allE", "exE"];

pub fn fol() -> Logic {
    let mut l = load_fixture("fol", SOURCE);
    let get = |n: &str| l.rules[n].clone();
    let assume = get("assume");
    let weaken = get("weaken");
    let intro: Vec<Rule> = INTRO.iter().map(|n| get(n)).collect();
    let elim: Vec<Rule> = ELIM.iter().map(|n| get(n)).collect();

    let assumption = {
        let (a, w) = (assume.clone(), weaken.clone());
        move |i: usize, opts: UnifyOptions| assumption_tac(a.clone(), w.clone(), i, opts)
    };
    let intro_tac = {
        let intro = intro.clone();
        move |i: usize, opts: UnifyOptions| rules_tac(intro.clone(), i, opts)
    };
    let elim_tac = {
        let assumption = assumption.clone();
        move |i: usize, opts: UnifyOptions| {
            elim.iter()
                .map(|e| then(rules_tac(vec![e.clone()], i, opts), assumption(i, opts)))
                .reduce(append)
                .unwrap()
        }
    };
    let step = {
        let (a, b, c) = (assumption.clone(), intro_tac.clone(), elim_tac.clone());
        move |i: usize, opts: UnifyOptions| append(a(i, opts), append(b(i, opts), c(i, opts)))
    };

    {
        let f = assumption.clone();
        l.tactics.insert("assumption".into(), Arc::new(move |i, lim: Limits| f(i, lim.unify)));
    }
    l.tactics.insert("intro".into(), Arc::new(move |i, lim: Limits| intro_tac(i, lim.unify)));
    {
        let f = elim_tac.clone();
        l.tactics.insert("elim".into(), Arc::new(move |i, lim: Limits| f(i, lim.unify)));
    }
    {
        let f = step.clone();
        l.tactics.insert("step".into(), Arc::new(move |i, lim: Limits| f(i, lim.unify)));
    }
    let never: Satisfied = Arc::new(|_| false);
    l.tactics.insert(
        "fast".into(),
        Arc::new(move |_, lim: Limits| depth_first(never.clone(), step(0, lim.unify), lim.max_nodes)),
    );
    l
}

/// `assume`, or `weaken` followed by a further assumption search.
fn assumption_tac(assume: Rule, weaken: Rule, i: usize, opts: UnifyOptions) -> Tactic {
    Tactic::new(move |goal| {
        let deeper = assumption_tac(assume.clone(), weaken.clone(), i, opts);
        append(
            rules_tac(vec![assume.clone()], i, opts),
            then(rules_tac(vec![weaken.clone()], i, opts), deeper),
        )
        .apply(goal)
    })
}
