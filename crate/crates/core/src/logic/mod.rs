//! Object logics: signatures, concrete syntax, rule files and tactics.

pub mod ctt;
pub mod fol;
pub mod parse;
pub mod print;
pub mod rulefile;
pub mod signature;

use std::sync::Arc;

use indexmap::IndexMap;

use crate::rule::Rule;
use crate::tactic::{depth_first, rules_tac, Limits, Tactic};
use crate::term::Term;
use parse::ParseError;
use rulefile::{parse_rule_file, RuleFileError, RuleFileErrorKind};
use signature::Signature;

/// Builds a tactic aimed at one premise (0-based) under the given bounds.
pub type TacticBuilder = Arc<dyn Fn(usize, Limits) -> Tactic + Send + Sync>;

/// A signature with its named rules and tactics.
#[derive(Clone)]
pub struct Logic {
    pub name: String,
    pub sig: Signature,
    pub rules: IndexMap<String, Rule>,
    pub tactics: IndexMap<String, TacticBuilder>,
}

impl std::fmt::Debug for Logic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Logic")
            .field("name", &self.name)
            .field("rules", &self.rules.keys().collect::<Vec<_>>())
            .field("tactics", &self.tactics.keys().collect::<Vec<_>>())
            .finish()
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN: [&str; 3] = ["bare", "fol", "ctt"];

pub fn builtin(name: &str) -> Option<Logic> {
    match name {
        "bare" => Some(Logic::new("bare", Signature::new(), IndexMap::new())),
        "fol" => Some(fol::fol()),
        "ctt" => Some(ctt::ctt()),
        _ => None,
    }
}

/// Load a rule file. A `logic NAME` header extends that built-in logic;
/// otherwise the file starts from the bare signature.
pub fn load_rules(name: &str, src: &str) -> Result<Logic, RuleFileError> {
    let base_name = rulefile::header(src).unwrap_or_else(|| "bare".to_string());
    let base = builtin(&base_name).ok_or_else(|| RuleFileError {
        line: 1,
        rule: None,
        kind: RuleFileErrorKind::UnknownLogic(base_name.clone()),
    })?;
    let mut logic = base.extended(src)?;
    logic.name = name.to_string();
    Ok(logic)
}

impl Logic {
    /// A logic whose only tactic is `prolog`, depth-first search over all
    /// of its rules.
    pub fn new(name: &str, sig: Signature, rules: IndexMap<String, Rule>) -> Logic {
        let mut l = Logic {
            name: name.to_string(),
            sig,
            rules,
            tactics: IndexMap::new(),
        };
        l.install_prolog();
        l
    }

    fn install_prolog(&mut self) {
        let all: Vec<Rule> = self.rules.values().cloned().collect();
        let never: crate::tactic::Satisfied = Arc::new(|_| false);
        self.tactics.insert(
            "prolog".to_string(),
            Arc::new(move |_, limits: Limits| {
                depth_first(never.clone(), rules_tac(all.clone(), 0, limits.unify), limits.max_nodes)
            }),
        );
    }

    /// Add the declarations and rules of a rule file. Its `logic` header,
    /// if any, is ignored.
    pub fn extended(&self, src: &str) -> Result<Logic, RuleFileError> {
        let file = parse_rule_file(src, &self.sig, &self.rules)?;
        let mut l = self.clone();
        l.sig = file.sig;
        l.rules.extend(file.rules);
        l.install_prolog();
        Ok(l)
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.get(name)
    }

    pub fn tactic(&self, name: &str, i: usize, limits: Limits) -> Option<Tactic> {
        self.tactics.get(name).map(|b| b(i, limits))
    }

    /// Parse a judgement in this logic's syntax.
    pub fn parse_goal(&self, text: &str) -> Result<Term, ParseError> {
        parse::parse_prop(&self.sig, text)
    }

    pub fn print(&self, t: &Term) -> String {
        print::print(&self.sig, t)
    }
}

pub(crate) fn load_fixture(name: &str, src: &str) -> Logic {
    match load_rules(name, src) {
        Ok(l) => l,
        Err(e) => panic!("fixture {name} does not load: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_load() {
        for name in BUILTIN {
            let l = builtin(name).unwrap();
            assert_eq!(l.name, name);
            assert!(l.tactics.contains_key("prolog"));
        }
        assert!(builtin("hol").is_none());
    }

    #[test]
    fn header_extends_builtin() {
        let src = "logic fol\nconst F : form\nrule axF\n  conclusion \"?H |- F\"\n";
        let l = load_rules("mine", src).unwrap();
        assert_eq!(l.name, "mine");
        assert_eq!(l.rules.len(), fol::fol().rules.len() + 1);
        assert!(l.tactics.contains_key("fast"));
        let e = load_rules("x", "logic nope\n").unwrap_err();
        assert!(matches!(e.kind, RuleFileErrorKind::UnknownLogic(_)));
        let dup = load_rules("x", "logic fol\nrule conjI\n  conclusion \"?H |- A\"\n").unwrap_err();
        assert!(matches!(dup.kind, RuleFileErrorKind::DuplicateRuleName(_)));
    }
}
