//! Proof scripts.
//!
//! ```text
//! # comment
//! goal "|- A & B --> B & A"
//! apply impI
//! backtrack 1
//! undo
//! qed
//! ```

use std::path::Path;

use super::{Session, SessionError};
use crate::logic::Logic;
use crate::tactic::Limits;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Apply(String),
    Backtrack(usize),
    Undo,
    Qed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub goal: String,
    /// Commands with their line numbers.
    pub commands: Vec<(usize, Command)>,
}

pub fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// The contents of a quoted string that makes up all of `s`.
pub fn unquote(s: &str) -> Option<String> {
    let inner = s.trim().strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::new();
    let mut cs = inner.chars();
    while let Some(c) = cs.next() {
        match c {
            '\\' => match cs.next() {
                Some(e @ ('"' | '\\')) => out.push(e),
                _ => return None,
            },
            '"' => return None,
            c => out.push(c),
        }
    }
    Some(out)
}

/// Parse one command line (no goal lines).
pub fn parse_command(line: &str) -> Result<Command, String> {
    let line = line.trim();
    let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let rest = rest.trim();
    match (word, rest.is_empty()) {
        ("apply", false) => Ok(Command::Apply(rest.to_string())),
        ("backtrack", false) => rest
            .parse()
            .map(Command::Backtrack)
            .map_err(|_| format!("bad step number `{rest}`")),
        ("undo", true) => Ok(Command::Undo),
        ("qed", true) => Ok(Command::Qed),
        _ => Err(format!("unknown command `{line}`")),
    }
}

impl Script {
    pub fn parse(src: &str) -> Result<Script, SessionError> {
        let mut goal = None;
        let mut commands = Vec::new();
        for (k, raw) in src.lines().enumerate() {
            let line = k + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let syntax = |msg: String| SessionError::ScriptSyntax { line, msg };
            if goal.is_none() {
                let arg = text
                    .strip_prefix("goal")
                    .filter(|r| r.starts_with(char::is_whitespace))
                    .ok_or_else(|| syntax("a script starts with `goal \"...\"`".into()))?;
                goal = Some(unquote(arg).ok_or_else(|| syntax("expected a quoted goal".into()))?);
                continue;
            }
            commands.push((line, parse_command(text).map_err(syntax)?));
        }
        let goal = goal.ok_or(SessionError::ScriptSyntax {
            line: 1,
            msg: "empty script".into(),
        })?;
        Ok(Script { goal, commands })
    }

    pub fn render(&self) -> String {
        let mut out = format!("goal {}\n", quote(&self.goal));
        for (_, c) in &self.commands {
            out.push_str(&match c {
                Command::Apply(e) => format!("apply {e}"),
                Command::Backtrack(k) => format!("backtrack {k}"),
                Command::Undo => "undo".to_string(),
                Command::Qed => "qed".to_string(),
            });
            out.push('\n');
        }
        out
    }

    /// Run the script in a fresh session.
    pub fn replay(&self, logic: Logic, limits: Limits) -> Result<Session, SessionError> {
        let mut s = Session::new(logic, limits);
        s.new_goal(&self.goal).map_err(|e| SessionError::ReplayMismatch {
            line: 1,
            command: format!("goal {}", quote(&self.goal)),
            source: Box::new(e),
        })?;
        for (line, c) in &self.commands {
            let (text, result) = match c {
                Command::Apply(e) => (format!("apply {e}"), s.apply(e)),
                Command::Backtrack(k) => (format!("backtrack {k}"), s.backtrack(*k)),
                Command::Undo => ("undo".to_string(), s.undo()),
                Command::Qed => ("qed".to_string(), s.qed().map(|_| ())),
            };
            result.map_err(|e| SessionError::ReplayMismatch {
                line: *line,
                command: text,
                source: Box::new(e),
            })?;
        }
        Ok(s)
    }
}

impl Session {
    /// The goal and every successful command so far.
    pub fn script(&self) -> Result<Script, SessionError> {
        let goal = self.goal_text().ok_or(SessionError::NoGoal)?.to_string();
        let commands = self
            .log()
            .iter()
            .enumerate()
            .map(|(k, l)| parse_command(l).map(|c| (k + 2, c)))
            .collect::<Result<_, _>>()
            .map_err(|msg| SessionError::ScriptSyntax { line: 0, msg })?;
        Ok(Script { goal, commands })
    }

    pub fn save_script(&self, path: &Path) -> Result<(), SessionError> {
        std::fs::write(path, self.script()?.render())?;
        Ok(())
    }

    pub fn replay_file(logic: Logic, limits: Limits, path: &Path) -> Result<Session, SessionError> {
        let src = std::fs::read_to_string(path)?;
        Script::parse(&src)?.replay(logic, limits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::fol::fol;
    use crate::session::default_limits;

    #[test]
    fn parse_and_render() {
        let src = "# proof\ngoal \"|- A --> A\"\n\napply impI\nbacktrack 1\nundo\nqed\n";
        let s = Script::parse(src).unwrap();
        assert_eq!(s.goal, "|- A --> A");
        assert_eq!(s.commands.len(), 4);
        assert_eq!(s.commands[0], (4, Command::Apply("impI".into())));
        let again = Script::parse(&s.render()).unwrap();
        assert_eq!(again.goal, s.goal);
        assert_eq!(
            again.commands.iter().map(|c| &c.1).collect::<Vec<_>>(),
            s.commands.iter().map(|c| &c.1).collect::<Vec<_>>()
        );
        assert!(matches!(Script::parse("apply impI"), Err(SessionError::ScriptSyntax { line: 1, .. })));
        assert!(matches!(
            Script::parse("goal \"x\"\nfrobnicate"),
            Err(SessionError::ScriptSyntax { line: 2, .. })
        ));
        assert_eq!(unquote(r#""a \"b\" \\""#).as_deref(), Some(r#"a "b" \"#));
    }

    #[test]
    fn replay_reports_failing_line() {
        let src = "goal \"|- A --> A\"\napply conjI\n";
        let Err(e) = Script::parse(src).unwrap().replay(fol(), default_limits()) else { panic!() };
        match e {
            SessionError::ReplayMismatch { line, source, .. } => {
                assert_eq!(line, 2);
                assert!(matches!(*source, SessionError::TacticFailed));
            }
            other => panic!("{other}"),
        }
    }
}
