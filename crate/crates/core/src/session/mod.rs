//! The interactive goal package.
//!
//! A session holds the current goal tree and a history of steps. Each step
//! keeps the goal before it, the command text and the unconsumed rest of the
//! tactic's output, so any step can later be backtracked to its next
//! alternative.

pub mod protocol;
pub mod script;
pub mod solve;
pub mod tactic_expr;

use thiserror::Error;

use crate::logic::parse::ParseError;
use crate::logic::print::{legend, print_compressed, SkolemTable};
use crate::logic::rulefile::RuleFileError;
use crate::logic::{print::print, Logic};
use crate::rule::{Rule, RuleError};
use crate::tactic::{Limits, Outcome, SearchError, Seq};
use crate::term::{Environment, Term};
use crate::unify::{flexflex_trivial, UnifyOptions};
use tactic_expr::{parse_tactic_expr, TacticExprError};

/// Unification depth used by sessions.
pub const DEFAULT_DEPTH: u32 = 64;
/// Search node bound used by sessions.
pub const DEFAULT_NODES: usize = 10_000;

pub fn default_limits() -> Limits {
    Limits {
        unify: UnifyOptions::bounded(DEFAULT_DEPTH),
        max_nodes: Some(DEFAULT_NODES),
    }
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("no goal; start one first")]
    NoGoal,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    TacticExpr(#[from] TacticExprError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    RuleFile(#[from] RuleFileError),
    #[error("tactic failed")]
    TacticFailed,
    #[error("step {0} has no further alternatives")]
    BacktrackExhausted(usize),
    #[error("no step {step}; the history has {len} step(s)")]
    NoSuchStep { step: usize, len: usize },
    #[error("nothing to undo")]
    EmptyHistory,
    #[error("{0} subgoal(s) remain")]
    GoalsRemain(usize),
    #[error("no subgoal {index}; there are {len}")]
    NoSuchGoal { index: usize, len: usize },
    #[error("unknown logic `{0}`")]
    UnknownLogic(String),
    #[error("script line {line}: {msg}")]
    ScriptSyntax { line: usize, msg: String },
    #[error("script line {line} (`{command}`) failed: {source}")]
    ReplayMismatch {
        line: usize,
        command: String,
        source: Box<SessionError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SessionError {
    /// Stable name of the error variant, used by the protocol.
    pub fn kind(&self) -> &'static str {
        match self {
            SessionError::NoGoal => "NoGoal",
            SessionError::Parse(_) => "ParseError",
            SessionError::Rule(_) => "BadArity",
            SessionError::TacticExpr(_) => "TacticSyntax",
            SessionError::Search(SearchError::NodeLimitExceeded(_)) => "NodeLimitExceeded",
            SessionError::Search(_) => "DepthExceeded",
            SessionError::RuleFile(_) => "RuleFileError",
            SessionError::TacticFailed => "TacticFailed",
            SessionError::BacktrackExhausted(_) => "BacktrackExhausted",
            SessionError::NoSuchStep { .. } => "NoSuchStep",
            SessionError::EmptyHistory => "EmptyHistory",
            SessionError::GoalsRemain(_) => "GoalsRemain",
            SessionError::NoSuchGoal { .. } => "NoSuchGoal",
            SessionError::UnknownLogic(_) => "UnknownLogic",
            SessionError::ScriptSyntax { .. } => "ScriptSyntax",
            SessionError::ReplayMismatch { .. } => "ReplayMismatch",
            SessionError::Io(_) => "IoError",
        }
    }
}

/// One applied command.
pub struct Step {
    pub before: Rule,
    pub command: String,
    remainder: Seq,
    peeked: Option<Option<Outcome>>,
}

impl Step {
    fn next(&mut self) -> Option<Outcome> {
        match self.peeked.take() {
            Some(p) => p,
            None => self.remainder.next(),
        }
    }

    /// Whether backtracking this step would yield a new state. Forces at
    /// most one further element of the remainder.
    pub fn has_more(&mut self) -> bool {
        if self.peeked.is_none() {
            self.peeked = Some(self.remainder.next());
        }
        matches!(self.peeked, Some(Some(Ok(_))))
    }
}

/// A goal being proved in one logic.
pub struct Session {
    pub logic: Logic,
    pub limits: Limits,
    pub compress: bool,
    goal_text: Option<String>,
    current: Option<Rule>,
    history: Vec<Step>,
    log: Vec<String>,
}

/// A displayable view of the state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct View {
    pub conclusion: String,
    pub subgoals: Vec<String>,
    pub constraints: Vec<String>,
    pub legend: Vec<String>,
}

impl Session {
    pub fn new(logic: Logic, limits: Limits) -> Session {
        Session {
            logic,
            limits,
            compress: true,
            goal_text: None,
            current: None,
            history: Vec::new(),
            log: Vec::new(),
        }
    }

    /// Switch logic; any goal in progress is dropped.
    pub fn set_logic(&mut self, logic: Logic) {
        self.logic = logic;
        self.goal_text = None;
        self.current = None;
        self.history.clear();
        self.log.clear();
    }

    pub fn new_goal(&mut self, text: &str) -> Result<(), SessionError> {
        let prop = self.logic.parse_goal(text)?;
        let goal = Rule::goal(prop)?;
        self.goal_text = Some(text.to_string());
        self.current = Some(goal);
        self.history.clear();
        self.log.clear();
        Ok(())
    }

    pub fn goal(&self) -> Option<&Rule> {
        self.current.as_ref()
    }

    pub fn goal_text(&self) -> Option<&str> {
        self.goal_text.as_deref()
    }

    fn current(&self) -> Result<&Rule, SessionError> {
        self.current.as_ref().ok_or(SessionError::NoGoal)
    }

    pub fn history(&self) -> &[Step] {
        &self.history
    }

    /// `(command, has_more)` for every step, oldest first.
    pub fn history_flags(&mut self) -> Vec<(String, bool)> {
        self.history
            .iter_mut()
            .map(|s| {
                let more = s.has_more();
                (s.command.clone(), more)
            })
            .collect()
    }

    /// Commands that led to the current state, for saving as a script.
    pub fn log(&self) -> &[String] {
        &self.log
    }

    /// Run a tactic expression and keep its first result.
    pub fn apply(&mut self, expr: &str) -> Result<(), SessionError> {
        let goal = self.current()?.clone();
        let tactic = parse_tactic_expr(expr)?.build(&self.logic, self.limits)?;
        let mut out = tactic.apply(&goal);
        match out.next() {
            None => Err(SessionError::TacticFailed),
            Some(Err(e)) => Err(e.into()),
            Some(Ok(next)) => {
                let command = expr.trim().to_string();
                self.history.push(Step {
                    before: goal,
                    command: command.clone(),
                    remainder: out,
                    peeked: None,
                });
                self.current = Some(next);
                self.log.push(format!("apply {command}"));
                Ok(())
            }
        }
    }

    /// Replace the state by the next alternative of step `k` (from 1),
    /// discarding every later step.
    pub fn backtrack(&mut self, k: usize) -> Result<(), SessionError> {
        let len = self.history.len();
        if k == 0 || k > len {
            return Err(SessionError::NoSuchStep { step: k, len });
        }
        match self.history[k - 1].next() {
            None => Err(SessionError::BacktrackExhausted(k)),
            Some(Err(e)) => Err(e.into()),
            Some(Ok(next)) => {
                self.history.truncate(k);
                self.current = Some(next);
                self.log.push(format!("backtrack {k}"));
                Ok(())
            }
        }
    }

    /// Drop the last step, restoring the goal before it.
    pub fn undo(&mut self) -> Result<(), SessionError> {
        let step = self.history.pop().ok_or(SessionError::EmptyHistory)?;
        self.current = Some(step.before);
        self.log.push("undo".to_string());
        Ok(())
    }

    /// The finished theorem. Remaining flex-flex constraints are solved by
    /// their trivial unifier.
    pub fn qed(&mut self) -> Result<Rule, SessionError> {
        let r = self.current()?;
        if !r.is_theorem() {
            return Err(SessionError::GoalsRemain(r.premises.len()));
        }
        let mut env = Environment::new(r.max_gen() + 1);
        let closing = flexflex_trivial(&r.flexflex, &mut env);
        let mut done = r.instantiate(&closing);
        done.flexflex.clear();
        if self.log.last().map(String::as_str) != Some("qed") {
            self.log.push("qed".to_string());
        }
        Ok(done)
    }

    fn show_term(&self, t: &Term, table: &mut SkolemTable) -> String {
        if self.compress {
            print_compressed(&self.logic.sig, t, table)
        } else {
            print(&self.logic.sig, t)
        }
    }

    /// Subgoals, constraints and the Skolem legend of the current state.
    pub fn view(&self) -> Result<View, SessionError> {
        let r = self.current()?;
        let mut table = SkolemTable::new();
        let subgoals = r.premises.iter().map(|p| self.show_term(p, &mut table)).collect();
        let conclusion = self.show_term(&r.conclusion, &mut table);
        let constraints = r
            .flexflex
            .iter()
            .map(|p| {
                let (l, rr) = p.closed_sides();
                format!("{} =?= {}", self.show_term(&l, &mut table), self.show_term(&rr, &mut table))
            })
            .collect();
        let legend = legend(&self.logic.sig, &mut table);
        Ok(View {
            conclusion,
            subgoals,
            constraints,
            legend,
        })
    }

    /// The numbered subgoals as text.
    pub fn show(&self) -> Result<String, SessionError> {
        let v = self.view()?;
        let mut out = format!("Goal: {}\n", v.conclusion);
        if v.subgoals.is_empty() {
            out.push_str("No subgoals.\n");
        }
        for (k, s) in v.subgoals.iter().enumerate() {
            out.push_str(&format!("{}. {s}\n", k + 1));
        }
        for c in &v.constraints {
            out.push_str(&format!("flex-flex: {c}\n"));
        }
        for l in &v.legend {
            out.push_str(&format!("where {l}\n"));
        }
        Ok(out)
    }

    /// For each rule of the logic, how many resolvents it has with subgoal
    /// `index` (from 1), counting at most `cap`.
    pub fn applicable_rules(&self, index: usize, cap: usize) -> Result<Vec<(String, usize)>, SessionError> {
        let r = self.current()?;
        if index == 0 || index > r.premises.len() {
            return Err(SessionError::NoSuchGoal {
                index,
                len: r.premises.len(),
            });
        }
        let mut out = Vec::new();
        for (name, rule) in &self.logic.rules {
            let n = crate::rule::resolve(r, index - 1, rule, self.limits.unify)?
                .take(cap)
                .take_while(Result::is_ok)
                .count();
            out.push((name.clone(), n));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::fol::fol;

    fn session() -> Session {
        Session::new(fol(), default_limits())
    }

    #[test]
    fn propositional_proof() {
        let mut s = session();
        s.new_goal("|- A & B --> B & A").unwrap();
        for cmd in ["impI", "conjI", "conjE2", "assume", "conjE1", "assume"] {
            s.apply(cmd).unwrap_or_else(|e| panic!("{cmd}: {e}\n{}", s.show().unwrap()));
        }
        let thm = s.qed().unwrap();
        assert!(thm.premises.is_empty());
        assert_eq!(s.logic.print(&thm.conclusion), "|- A & B --> B & A");
    }

    #[test]
    fn errors_leave_state_unchanged() {
        let mut s = session();
        assert!(matches!(s.apply("impI"), Err(SessionError::NoGoal)));
        s.new_goal("|- A & B").unwrap();
        let before = s.goal().cloned();
        assert!(matches!(s.apply("impI"), Err(SessionError::TacticFailed)));
        assert!(matches!(s.undo(), Err(SessionError::EmptyHistory)));
        assert!(matches!(s.qed(), Err(SessionError::GoalsRemain(1))));
        assert!(matches!(s.backtrack(1), Err(SessionError::NoSuchStep { .. })));
        assert_eq!(s.goal().cloned(), before);
        s.apply("conjI").unwrap();
        assert!(matches!(s.backtrack(1), Err(SessionError::BacktrackExhausted(1))));
        s.undo().unwrap();
        assert_eq!(s.goal().cloned(), before);
        assert_eq!(s.log(), ["apply conjI", "undo"]);
    }

    #[test]
    fn new_goal_checks_arity() {
        let mut s = session();
        assert!(s.new_goal("A & B").is_err());
        s.new_goal("?H |- ?A").unwrap();
    }

    #[test]
    fn applicable_rules_counts() {
        let mut s = session();
        s.new_goal("|- A & B --> B & A").unwrap();
        let counts = s.applicable_rules(1, 5).unwrap();
        let imp = counts.iter().find(|(n, _)| n == "impI").unwrap();
        assert!(imp.1 >= 1);
        let conj = counts.iter().find(|(n, _)| n == "conjI").unwrap();
        assert_eq!(conj.1, 0);
        assert!(matches!(s.applicable_rules(2, 5), Err(SessionError::NoSuchGoal { .. })));
    }
}
