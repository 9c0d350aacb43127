//! Tactics and tacticals.
//!
//! A tactic maps a goal tree to a lazy sequence of refined goal trees.
//! Sequences are consumed on demand, so alternatives that are never asked
//! for are never computed.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::rule::{resolve, Rule};
use crate::term::Term;
use crate::unify::{UnifyError, UnifyOptions};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Unify(#[from] UnifyError),
    #[error("search node limit {0} exceeded")]
    NodeLimitExceeded(usize),
}

pub type Outcome = Result<Rule, SearchError>;
pub type Seq = Box<dyn Iterator<Item = Outcome> + Send>;

#[derive(Clone)]
pub struct Tactic(Arc<dyn Fn(&Rule) -> Seq + Send + Sync>);

impl Tactic {
    pub fn new(f: impl Fn(&Rule) -> Seq + Send + Sync + 'static) -> Tactic {
        Tactic(Arc::new(f))
    }

    pub fn apply(&self, goal: &Rule) -> Seq {
        (self.0)(goal)
    }
}

/// Bounds used by the search tacticals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub unify: UnifyOptions,
    /// Maximum number of states visited by one depth-first search.
    pub max_nodes: Option<usize>,
}

/// Which premises of a goal tree need no further work.
pub type Satisfied = Arc<dyn Fn(&Term) -> bool + Send + Sync>;

/// Computes the rules appropriate for a subgoal; an empty list defers it.
pub type GoalAnalyzer = Arc<dyn Fn(&Term) -> Vec<Rule> + Send + Sync>;

fn empty() -> Seq {
    Box::new(std::iter::empty())
}

/// Resolve premise `i` with each rule in turn, concatenating the results.
pub fn rules_tac(rules: Vec<Rule>, i: usize, opts: UnifyOptions) -> Tactic {
    let rules: Arc<[Rule]> = rules.into();
    Tactic::new(move |goal| {
        if i >= goal.premises.len() {
            return empty();
        }
        let goal = goal.clone();
        let rules = rules.clone();
        Box::new((0..rules.len()).flat_map(move |k| -> Seq {
            match resolve(&goal, i, &rules[k], opts) {
                Ok(rs) => Box::new(rs.map(|r| r.map_err(SearchError::from))),
                Err(_) => empty(),
            }
        }))
    })
}

pub fn id_tac() -> Tactic {
    Tactic::new(|goal| Box::new(std::iter::once(Ok(goal.clone()))))
}

pub fn fail_tac() -> Tactic {
    Tactic::new(|_| empty())
}

/// Every result of `t1` is refined by `t2`.
pub fn then(t1: Tactic, t2: Tactic) -> Tactic {
    Tactic::new(move |goal| {
        let t2 = t2.clone();
        Box::new(t1.apply(goal).flat_map(move |r| -> Seq {
            match r {
                Ok(state) => t2.apply(&state),
                Err(e) => Box::new(std::iter::once(Err(e))),
            }
        }))
    })
}

/// The results of `t1` if it has any, otherwise those of `t2`.
pub fn orelse(t1: Tactic, t2: Tactic) -> Tactic {
    Tactic::new(move |goal| {
        let mut first = t1.apply(goal).peekable();
        if first.peek().is_some() {
            Box::new(first)
        } else {
            t2.apply(goal)
        }
    })
}

/// The results of `t1` followed by those of `t2`.
pub fn append(t1: Tactic, t2: Tactic) -> Tactic {
    Tactic::new(move |goal| {
        let t2 = t2.clone();
        let g = goal.clone();
        Box::new(t1.apply(goal).chain(std::iter::once(()).flat_map(move |_| t2.apply(&g))))
    })
}

pub fn try_(t: Tactic) -> Tactic {
    orelse(t, id_tac())
}

/// Apply `t` as long as it succeeds.
pub fn repeat(t: Tactic) -> Tactic {
    Tactic::new(move |goal| orelse(then(t.clone(), repeat(t.clone())), id_tac()).apply(goal))
}

/// Apply `t` as long as it succeeds, at most `n` times.
pub fn repeat_at_most(t: Tactic, n: usize) -> Tactic {
    if n == 0 {
        return id_tac();
    }
    Tactic::new(move |goal| orelse(then(t.clone(), repeat_at_most(t.clone(), n - 1)), id_tac()).apply(goal))
}

/// Depth-first search driven by `expand`: `None` means the state is a
/// solution, `Some(seq)` gives its successors.
struct Search<F> {
    expand: F,
    stack: Vec<Seq>,
    nodes: usize,
    max_nodes: Option<usize>,
    done: bool,
}

impl<F: Fn(&Rule) -> Option<Seq>> Iterator for Search<F> {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        while !self.done {
            let Some(top) = self.stack.last_mut() else {
                self.done = true;
                break;
            };
            match top.next() {
                None => {
                    self.stack.pop();
                }
                Some(Err(e)) => return Some(Err(e)),
                Some(Ok(state)) => {
                    self.nodes += 1;
                    if let Some(max) = self.max_nodes {
                        if self.nodes > max {
                            self.done = true;
                            return Some(Err(SearchError::NodeLimitExceeded(max)));
                        }
                    }
                    match (self.expand)(&state) {
                        None => return Some(Ok(state)),
                        Some(children) => self.stack.push(children),
                    }
                }
            }
        }
        None
    }
}

fn search<F>(goal: &Rule, expand: F, max_nodes: Option<usize>) -> Seq
where
    F: Fn(&Rule) -> Option<Seq> + Send + 'static,
{
    Box::new(Search {
        expand,
        stack: vec![Box::new(std::iter::once(Ok(goal.clone())))],
        nodes: 0,
        max_nodes,
        done: false,
    })
}

/// Search the tree of applications of `t` for states whose premises are all
/// satisfied. A state on which `t` yields nothing is abandoned.
pub fn depth_first(satisfied: Satisfied, t: Tactic, max_nodes: Option<usize>) -> Tactic {
    Tactic::new(move |goal| {
        let satisfied = satisfied.clone();
        let t = t.clone();
        search(
            goal,
            move |state| {
                if state.premises.iter().all(|p| satisfied(p)) {
                    None
                } else {
                    Some(t.apply(state))
                }
            },
            max_nodes,
        )
    })
}

/// Indices of the premises the analyzer defers.
pub fn deferred_premises(analyzer: &GoalAnalyzer, goal: &Rule) -> Vec<usize> {
    (0..goal.premises.len())
        .filter(|&i| analyzer(&goal.premises[i]).is_empty())
        .collect()
}

/// Depth-first search that expands the first premise the analyzer does not
/// defer, using the rules it proposes. A state whose premises are all
/// deferred is a result; deferred premises are analyzed again in every state.
pub fn depth_rules_fun_tac(analyzer: GoalAnalyzer, limits: Limits) -> Tactic {
    Tactic::new(move |goal| {
        let analyzer = analyzer.clone();
        search(
            goal,
            move |state| {
                state.premises.iter().enumerate().find_map(|(i, p)| {
                    let rules = analyzer(p);
                    if rules.is_empty() {
                        None
                    } else {
                        Some(rules_tac(rules, i, limits.unify).apply(state))
                    }
                })
            },
            limits.max_nodes,
        )
    })
}

/// Wraps a tactic and counts how often it is applied.
pub fn counting(t: Tactic, counter: Arc<AtomicUsize>) -> Tactic {
    Tactic::new(move |goal| {
        counter.fetch_add(1, Ordering::SeqCst);
        t.apply(goal)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{mk_rule, prop};
    use crate::term::Arity;

    fn atom(n: &str) -> Term {
        Term::constant(n, prop())
    }
    fn form() -> Arity {
        Arity::atomic("form")
    }
    fn holds(t: Term) -> Term {
        Term::app(Term::constant("holds", Arity::fun(form(), prop())), t)
    }
    fn conj(a: Term, b: Term) -> Term {
        Term::apps(Term::constant("conj", Arity::curried([form(), form()], form())), [a, b])
    }
    fn fv(n: &str) -> Term {
        Term::var(n, 0, form())
    }
    fn fk(n: &str) -> Term {
        Term::constant(n, form())
    }
    fn conj_i() -> Rule {
        mk_rule(vec![holds(fv("A")), holds(fv("B"))], holds(conj(fv("A"), fv("B")))).unwrap()
    }
    fn axiom(n: &str) -> Rule {
        mk_rule(vec![], holds(fk(n))).unwrap()
    }
    fn opts() -> UnifyOptions {
        UnifyOptions::default()
    }
    fn run(t: &Tactic, g: &Rule) -> Vec<Rule> {
        t.apply(g).map(Result::unwrap).collect()
    }

    #[test]
    fn rules_tac_concatenates_in_order() {
        let g = Rule::goal(atom("P")).unwrap();
        let r1 = mk_rule(vec![atom("Q")], atom("P")).unwrap();
        let r2 = mk_rule(vec![atom("R")], atom("P")).unwrap();
        let out = run(&rules_tac(vec![r1, r2], 0, opts()), &g);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].premises, vec![atom("Q")]);
        assert_eq!(out[1].premises, vec![atom("R")]);
        assert!(run(&rules_tac(vec![], 0, opts()), &g).is_empty());
        assert!(run(&rules_tac(vec![conj_i()], 3, opts()), &g).is_empty());
    }

    #[test]
    fn combinator_laws() {
        let g = Rule::goal(holds(conj(fk("A"), fk("B")))).unwrap();
        let t = rules_tac(vec![conj_i()], 0, opts());
        assert_eq!(run(&then(id_tac(), t.clone()), &g), run(&t, &g));
        assert_eq!(run(&then(t.clone(), id_tac()), &g), run(&t, &g));
        assert!(run(&then(fail_tac(), t.clone()), &g).is_empty());
        assert_eq!(run(&orelse(fail_tac(), t.clone()), &g), run(&t, &g));
        assert_eq!(run(&try_(fail_tac()), &g), vec![g.clone()]);
        assert_eq!(run(&repeat(fail_tac()), &g), vec![g.clone()]);
        let both = run(&append(t.clone(), id_tac()), &g);
        assert_eq!(both.len(), 2);
        assert_eq!(both[1], g);
    }

    #[test]
    fn orelse_does_not_consult_second_when_first_succeeds() {
        let g = Rule::goal(atom("P")).unwrap();
        let counter = Arc::new(AtomicUsize::new(0));
        let probe = counting(fail_tac(), counter.clone());
        let out = run(&orelse(id_tac(), probe), &g);
        assert_eq!(out.len(), 1);
        assert_eq!(counter.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn then_is_lazy() {
        let g = Rule::goal(atom("P")).unwrap();
        let r1 = mk_rule(vec![], atom("P")).unwrap();
        let counter = Arc::new(AtomicUsize::new(0));
        let t1 = rules_tac(vec![r1.clone(), r1.clone(), r1], 0, opts());
        let t = then(t1, counting(id_tac(), counter.clone()));
        let first = t.apply(&g).next();
        assert!(first.is_some());
        assert_eq!(counter.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn repeat_splits_nested_conjunction() {
        let g = Rule::goal(holds(conj(fk("A"), conj(fk("B"), fk("C"))))).unwrap();
        let t = repeat(rules_tac(vec![conj_i()], 0, opts()));
        let first = t.apply(&g).next().unwrap().unwrap();
        // the first premise is atomic after one split, so repetition stops there
        assert_eq!(first.premises[0], holds(fk("A")));
        let all = then(
            rules_tac(vec![conj_i()], 0, opts()),
            repeat(rules_tac(vec![conj_i()], 1, opts())),
        );
        let split = all.apply(&g).next().unwrap().unwrap();
        assert_eq!(split.premises, vec![holds(fk("A")), holds(fk("B")), holds(fk("C"))]);
    }

    #[test]
    fn repeat_sees_earlier_instantiation() {
        // goal holds(?X & ?Y): splitting leaves holds(?X), holds(?Y); closing
        // holds(?X) with axiom A instantiates ?X in the conclusion for later steps
        let g = Rule::goal(holds(conj(fv("X"), fv("Y")))).unwrap();
        let t = then(
            rules_tac(vec![conj_i()], 0, opts()),
            repeat(rules_tac(vec![axiom("A")], 0, opts())),
        );
        let out = t.apply(&g).next().unwrap().unwrap();
        assert!(out.is_theorem());
        assert_eq!(out.conclusion, holds(conj(fk("A"), fk("A"))));
    }

    #[test]
    fn depth_first_basics() {
        let never: Satisfied = Arc::new(|_| false);
        let g = Rule::goal(holds(conj(fk("A"), fk("B")))).unwrap();
        let t = rules_tac(vec![conj_i(), axiom("A"), axiom("B")], 0, opts());
        let out = run(&depth_first(never.clone(), t.clone(), None), &g);
        assert_eq!(out.len(), 1);
        assert!(out[0].is_theorem());

        let always: Satisfied = Arc::new(|_| true);
        assert_eq!(run(&depth_first(always, t.clone(), None), &g), vec![g.clone()]);

        let stuck = Rule::goal(holds(fk("C"))).unwrap();
        assert!(run(&depth_first(never.clone(), t.clone(), None), &stuck).is_empty());

        let looping = mk_rule(vec![holds(fv("A"))], holds(fv("A"))).unwrap();
        let bounded = depth_first(never, rules_tac(vec![looping], 0, opts()), Some(50));
        let errs: Vec<Outcome> = bounded.apply(&stuck).collect();
        assert_eq!(errs, vec![Err(SearchError::NodeLimitExceeded(50))]);
    }

    #[test]
    fn deferral() {
        let g = Rule::goal(holds(conj(fk("A"), fk("B")))).unwrap();
        let defer_all: GoalAnalyzer = Arc::new(|_| vec![]);
        let out = run(&depth_rules_fun_tac(defer_all.clone(), Limits::default()), &g);
        assert_eq!(out, vec![g.clone()]);
        assert_eq!(deferred_premises(&defer_all, &g), vec![0]);

        // a single always-applicable rule list behaves like depth_first over it
        let rules = vec![conj_i(), axiom("A"), axiom("B")];
        let r2 = rules.clone();
        let analyzer: GoalAnalyzer = Arc::new(move |_| r2.clone());
        let a = run(&depth_rules_fun_tac(analyzer, Limits::default()), &g);
        let never: Satisfied = Arc::new(|_| false);
        let b = run(&depth_first(never, rules_tac(rules, 0, opts()), None), &g);
        assert_eq!(a, b);
    }
}
