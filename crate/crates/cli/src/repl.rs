use std::io::{self, BufRead, IsTerminal, Write};
use std::path::Path;

use hornkit::logic::print::print_rule;
use hornkit::logic::Logic;
use hornkit::session::script::{parse_command, unquote, Command, Script};
use hornkit::session::solve::Equation;
use hornkit::session::{Session, SessionError};
use hornkit::tactic::Limits;

const HELP: &str = "\
commands:
  goal <judgement>          start a proof (the judgement may be quoted)
  apply <tactic>            run a tactic expression, keep its first result
  backtrack <k>             next alternative of step k
  undo                      drop the last step
  qed                       finish the proof
  show                      print the subgoals
  history                   list the steps and whether they can be backtracked
  rules | tactics           list the logic's rules or tactics
  rule <name>               print one rule
  applicable <k>            rules that resolve with subgoal k
  solve <lhs> =?= <rhs>     list unifiers; `more` prints the next page
  save <file> | load <file> write or replay a proof script
  logic <name|file>         switch logic
  help | quit";

const PAGE: usize = 5;

struct Repl {
    session: Session,
    solving: Option<(Equation, usize)>,
}

impl Repl {
    fn show(&self) -> Result<String, String> {
        self.session.show().map_err(|e| e.to_string())
    }

    fn page(&mut self) -> Result<String, String> {
        let Some((eq, page)) = self.solving.as_mut() else {
            return Err("no equation; use `solve` first".into());
        };
        let (sols, more) = eq.page(self.session.limits.unify, *page, PAGE).map_err(|e| e.to_string())?;
        let mut out = String::new();
        for (k, s) in sols.iter().enumerate() {
            out.push_str(&format!("unifier {}:\n{s}\n", *page * PAGE + k + 1));
        }
        *page += 1;
        if more {
            out.push_str("(`more` for the next page)\n");
        } else {
            out.push_str("(no more unifiers)\n");
            self.solving = None;
        }
        Ok(out)
    }

    fn step(&mut self, line: &str) -> Result<String, String> {
        let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let err = |e: SessionError| e.to_string();
        match word {
            "help" => Ok(format!("{HELP}\n")),
            "goal" => {
                let text = unquote(rest).unwrap_or_else(|| rest.to_string());
                self.session.new_goal(&text).map_err(err)?;
                self.show()
            }
            "apply" | "backtrack" | "undo" | "qed" => match parse_command(line).map_err(|e| e.to_string())? {
                Command::Apply(e) => {
                    self.session.apply(&e).map_err(err)?;
                    self.show()
                }
                Command::Backtrack(k) => {
                    self.session.backtrack(k).map_err(err)?;
                    self.show()
                }
                Command::Undo => {
                    self.session.undo().map_err(err)?;
                    self.show()
                }
                Command::Qed => {
                    let thm = self.session.qed().map_err(err)?;
                    Ok(format!("proved: {}\n", self.session.logic.print(&thm.conclusion)))
                }
            },
            "show" => self.show(),
            "history" => {
                let mut out = String::new();
                for (k, (cmd, more)) in self.session.history_flags().into_iter().enumerate() {
                    let mark = if more { "  (alternatives remain)" } else { "" };
                    out.push_str(&format!("{}. {cmd}{mark}\n", k + 1));
                }
                Ok(out)
            }
            "rules" => Ok(self.session.logic.rules.keys().map(|k| format!("{k}\n")).collect()),
            "tactics" => Ok(self.session.logic.tactics.keys().map(|k| format!("{k}\n")).collect()),
            "rule" => {
                let l = &self.session.logic;
                let r = l.rule(rest).ok_or_else(|| format!("no rule `{rest}`"))?;
                Ok(format!("{}\n", print_rule(&l.sig, r, self.session.compress)))
            }
            "applicable" => {
                let k = rest.parse().map_err(|_| format!("bad subgoal number `{rest}`"))?;
                let counts = self.session.applicable_rules(k, PAGE).map_err(err)?;
                Ok(counts
                    .into_iter()
                    .filter(|(_, n)| *n > 0)
                    .map(|(name, n)| format!("{name}: {n}{}\n", if n >= PAGE { "+" } else { "" }))
                    .collect())
            }
            "solve" => {
                let (lhs, rhs) = rest.split_once("=?=").ok_or("expected `solve <lhs> =?= <rhs>`")?;
                let eq = Equation::parse(&self.session.logic.sig, lhs.trim(), rhs.trim()).map_err(|e| e.to_string())?;
                self.solving = Some((eq, 0));
                self.page()
            }
            "more" => self.page(),
            "save" => {
                self.session.save_script(Path::new(rest)).map_err(err)?;
                Ok(format!("saved {rest}\n"))
            }
            "load" => {
                let src = std::fs::read_to_string(rest).map_err(|e| format!("{rest}: {e}"))?;
                let script = Script::parse(&src).map_err(err)?;
                let mut s = script.replay(self.session.logic.clone(), self.session.limits).map_err(err)?;
                s.compress = self.session.compress;
                self.session = s;
                self.show()
            }
            "logic" => {
                let l = crate::resolve_logic(rest)?;
                self.session.set_logic(l);
                Ok(format!("logic {}\n", self.session.logic.name))
            }
            _ => Err(format!("unknown command `{word}`; try `help`")),
        }
    }
}

pub fn run(logic: Logic, limits: Limits, compress: bool) -> io::Result<()> {
    let mut session = Session::new(logic, limits);
    session.compress = compress;
    let mut repl = Repl { session, solving: None };
    let interactive = io::stdin().is_terminal();
    let mut out = io::stdout();
    let prompt = |out: &mut io::Stdout| -> io::Result<()> {
        if interactive {
            write!(out, "> ")?;
            out.flush()?;
        }
        Ok(())
    };
    prompt(&mut out)?;
    for line in io::stdin().lock().lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            prompt(&mut out)?;
            continue;
        }
        if line == "quit" || line == "exit" {
            break;
        }
        match repl.step(line) {
            Ok(text) => write!(out, "{text}")?,
            Err(e) => writeln!(out, "error: {e}")?,
        }
        prompt(&mut out)?;
    }
    Ok(())
}
