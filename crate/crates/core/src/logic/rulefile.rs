//! Line-oriented rule files.
//!
//! ```text
//! # comment
//! logic fol                                   extend a built-in logic (first line only)
//! atomic term form
//! const conj disj : form -> form -> form
//! infix & conj 5 right                        left | right | none, optional `default CONST`
//! postfix type istype 3
//! binder ALL Pi
//! skolem all : term
//! rule conjI
//!   premise "?H |- ?A"
//!   premise "?H |- ?B"
//!   conclusion "?H |- ?A & ?B"
//! ```

use indexmap::IndexMap;
use thiserror::Error;

use super::parse::{parse_rule_parts, ParseError};
use super::print::print;
use super::signature::{Assoc, Signature, SignatureError};
use crate::rule::{mk_rule, Rule, RuleError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleFileErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown logic `{0}`")]
    UnknownLogic(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateRuleName(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}{}: {kind}", rule.as_ref().map(|r| format!(" (rule {r})")).unwrap_or_default())]
pub struct RuleFileError {
    pub line: usize,
    pub rule: Option<String>,
    pub kind: RuleFileErrorKind,
}

/// The declarations of one file, applied on top of a base signature.
#[derive(Clone, Debug)]
pub struct RuleFile {
    /// Built-in logic named by a `logic` header.
    pub base: Option<String>,
    pub sig: Signature,
    pub rules: IndexMap<String, Rule>,
}

fn words(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut cs = line.chars().peekable();
    while let Some(&c) = cs.peek() {
        if c.is_whitespace() {
            cs.next();
        } else if c == '"' {
            cs.next();
            let mut s = String::new();
            loop {
                match cs.next() {
                    Some('"') => break,
                    Some('\\') => match cs.next() {
                        Some(e @ ('"' | '\\')) => s.push(e),
                        _ => return Err("bad escape in string".into()),
                    },
                    Some(ch) => s.push(ch),
                    None => return Err("unterminated string".into()),
                }
            }
            out.push(s);
        } else if c == '#' && out.is_empty() {
            break;
        } else {
            let mut s = String::new();
            while let Some(&ch) = cs.peek() {
                if ch.is_whitespace() {
                    break;
                }
                s.push(ch);
                cs.next();
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// Read the `logic NAME` header, if any.
pub fn header(src: &str) -> Option<String> {
    for line in src.lines() {
        let Ok(w) = words(line) else { return None };
        if w.is_empty() {
            continue;
        }
        return (w[0] == "logic" && w.len() == 2).then(|| w[1].clone());
    }
    None
}

struct PendingRule {
    name: String,
    line: usize,
    premises: Vec<(usize, String)>,
    conclusion: Option<(usize, String)>,
}

/// Parse `src` on top of `base`. Rules already in `existing` may not be
/// redeclared.
pub fn parse_rule_file(
    src: &str,
    base: &Signature,
    existing: &IndexMap<String, Rule>,
) -> Result<RuleFile, RuleFileError> {
    let mut sig = base.clone();
    let mut rules = IndexMap::new();
    let mut pending: Option<PendingRule> = None;
    let mut logic = None;
    let mut seen_content = false;

    let err = |line: usize, rule: Option<&str>, kind: RuleFileErrorKind| RuleFileError {
        line,
        rule: rule.map(str::to_string),
        kind,
    };
    let syntax = |line: usize, rule: Option<&str>, msg: &str| err(line, rule, RuleFileErrorKind::Syntax(msg.to_string()));

    let finish = |p: PendingRule, sig: &Signature, rules: &mut IndexMap<String, Rule>| -> Result<(), RuleFileError> {
        let Some((cline, conclusion)) = p.conclusion else {
            return Err(syntax(p.line, Some(&p.name), "rule has no conclusion"));
        };
        let texts: Vec<&str> = p.premises.iter().map(|(_, t)| t.as_str()).collect();
        let (premises, conclusion) = parse_rule_parts(sig, &texts, &conclusion).map_err(|(k, e)| {
            let line = p.premises.get(k).map(|(l, _)| *l).unwrap_or(cline);
            err(line, Some(&p.name), e.into())
        })?;
        let rule = mk_rule(premises, conclusion).map_err(|e| err(p.line, Some(&p.name), e.into()))?;
        rules.insert(p.name, rule);
        Ok(())
    };

    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let w = words(raw).map_err(|m| syntax(line, pending.as_ref().map(|p| p.name.as_str()), &m))?;
        if w.is_empty() {
            continue;
        }
        let first = !seen_content;
        seen_content = true;
        let current = pending.as_ref().map(|p| p.name.clone());
        let current = current.as_deref();
        match w[0].as_str() {
            "logic" => {
                if !first || w.len() != 2 {
                    return Err(syntax(line, None, "`logic NAME` must be the first declaration"));
                }
                logic = Some(w[1].clone());
            }
            "premise" | "conclusion" => {
                let Some(p) = pending.as_mut() else {
                    return Err(syntax(line, None, "premise or conclusion outside a rule"));
                };
                if w.len() != 2 {
                    return Err(syntax(line, current, "expected one quoted term"));
                }
                if p.conclusion.is_some() {
                    return Err(syntax(line, current, "the conclusion must come last"));
                }
                if w[0] == "premise" {
                    p.premises.push((line, w[1].clone()));
                } else {
                    p.conclusion = Some((line, w[1].clone()));
                }
            }
            keyword => {
                if let Some(p) = pending.take() {
                    finish(p, &sig, &mut rules)?;
                }
                let sig_err = |e: SignatureError| err(line, None, e.into());
                match keyword {
                    "rule" => {
                        if w.len() != 2 {
                            return Err(syntax(line, None, "expected `rule NAME`"));
                        }
                        let name = w[1].clone();
                        if rules.contains_key(&name) || existing.contains_key(&name) {
                            return Err(err(line, Some(&name), RuleFileErrorKind::DuplicateRuleName(name.clone())));
                        }
                        pending = Some(PendingRule {
                            name,
                            line,
                            premises: Vec::new(),
                            conclusion: None,
                        });
                    }
                    "atomic" => {
                        for a in &w[1..] {
                            sig.declare_atomic(a).map_err(sig_err)?;
                        }
                    }
                    "const" | "skolem" => {
                        let colon = w.iter().position(|x| x == ":");
                        let Some(colon) = colon.filter(|&c| c > 1 && c + 1 < w.len()) else {
                            return Err(syntax(line, None, "expected `NAME ... : ARITY`"));
                        };
                        let arity = sig.parse_arity(&w[colon + 1..].join(" ")).map_err(sig_err)?;
                        for n in &w[1..colon] {
                            if keyword == "const" {
                                sig.declare_const(n, arity.clone()).map_err(sig_err)?;
                            } else {
                                sig.declare_skolem(n, arity.clone()).map_err(sig_err)?;
                            }
                        }
                    }
                    "infix" => {
                        let ok = w.len() == 5 || (w.len() == 7 && w[5] == "default");
                        let prec = w.get(3).and_then(|p| p.parse::<u32>().ok());
                        let assoc = match w.get(4).map(String::as_str) {
                            Some("left") => Some(Assoc::Left),
                            Some("right") => Some(Assoc::Right),
                            Some("none") => Some(Assoc::None),
                            _ => None,
                        };
                        let (Some(prec), Some(assoc), true) = (prec, assoc, ok) else {
                            return Err(syntax(
                                line,
                                None,
                                "expected `infix SYMBOL CONST PREC left|right|none [default CONST]`",
                            ));
                        };
                        let default = w.get(6).map(String::as_str);
                        sig.declare_infix(&w[1], &w[2], prec, assoc, default).map_err(sig_err)?;
                    }
                    "postfix" => {
                        let prec = w.get(3).and_then(|p| p.parse::<u32>().ok());
                        let (Some(prec), 4) = (prec, w.len()) else {
                            return Err(syntax(line, None, "expected `postfix SYMBOL CONST PREC`"));
                        };
                        sig.declare_postfix(&w[1], &w[2], prec).map_err(sig_err)?;
                    }
                    "binder" => {
                        if w.len() != 3 {
                            return Err(syntax(line, None, "expected `binder KEYWORD CONST`"));
                        }
                        sig.declare_binder(&w[1], &w[2]).map_err(sig_err)?;
                    }
                    other => {
                        return Err(syntax(line, None, &format!("unknown declaration `{other}`")));
                    }
                }
            }
        }
    }
    if let Some(p) = pending.take() {
        finish(p, &sig, &mut rules)?;
    }
    Ok(RuleFile {
        base: logic,
        sig,
        rules,
    })
}

/// Print rules in the rule-file format. Output parses back to equal rules.
pub fn render_rules<'a>(sig: &Signature, rules: impl IntoIterator<Item = (&'a String, &'a Rule)>) -> String {
    let quote = |s: String| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
    let mut out = String::new();
    for (name, r) in rules {
        out.push_str(&format!("rule {name}\n"));
        for p in &r.premises {
            out.push_str(&format!("  premise {}\n", quote(print(sig, p))));
        }
        out.push_str(&format!("  conclusion {}\n", quote(print(sig, &r.conclusion))));
    }
    out
}
