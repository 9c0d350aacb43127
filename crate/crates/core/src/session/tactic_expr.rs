//! Tactic expressions typed at the session prompt.
//!
//! ```text
//! expr   := seq ("ORELSE" seq)*
//! seq    := unary ("THEN" unary)*
//! unary  := ("REPEAT" | "TRY" | "DEPTH_FIRST") unary | atom
//! atom   := "(" expr ")" | "id" | "fail"
//!         | "rules" "[" NAME ("," NAME)* "]" [k]
//!         | NAME [k]                        a rule or a named tactic
//! ```
//!
//! Premise indices `k` count from 1 and default to 1.

use std::sync::Arc;

use thiserror::Error;

use crate::logic::Logic;
use crate::tactic::{depth_first, fail_tac, id_tac, orelse, repeat, rules_tac, then, try_, Limits, Satisfied, Tactic};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TacticExprError {
    #[error("tactic syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("no rule or tactic named `{0}`")]
    UnknownName(String),
    #[error("premise indices count from 1")]
    ZeroIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TacticExpr {
    Id,
    Fail,
    Rules(Vec<String>, usize),
    Named(String, usize),
    Then(Box<TacticExpr>, Box<TacticExpr>),
    OrElse(Box<TacticExpr>, Box<TacticExpr>),
    Repeat(Box<TacticExpr>),
    Try(Box<TacticExpr>),
    DepthFirst(Box<TacticExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Num(usize),
    Punct(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, TacticExprError> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if "()[],".contains(c) {
            out.push((Tok::Punct(c), pos));
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let n: String = cs[start..i].iter().collect();
            let n = n.parse().map_err(|_| TacticExprError::Syntax {
                pos,
                msg: "index too large".into(),
            })?;
            out.push((Tok::Num(n), pos));
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Word(cs[start..i].iter().collect()), pos));
        } else {
            return Err(TacticExprError::Syntax {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::End, cs.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

const KEYWORDS: [&str; 5] = ["ORELSE", "THEN", "REPEAT", "TRY", "DEPTH_FIRST"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> TacticExprError {
        TacticExprError::Syntax {
            pos: self.toks[self.i].1,
            msg: msg.to_string(),
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn expect(&mut self, c: char) -> Result<(), TacticExprError> {
        if self.peek() == &Tok::Punct(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<TacticExpr, TacticExprError> {
        let mut left = self.seq()?;
        while self.is_word("ORELSE") {
            self.bump();
            let right = self.seq()?;
            left = TacticExpr::OrElse(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn seq(&mut self) -> Result<TacticExpr, TacticExprError> {
        let mut left = self.unary()?;
        while self.is_word("THEN") {
            self.bump();
            let right = self.unary()?;
            left = TacticExpr::Then(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<TacticExpr, TacticExprError> {
        for (kw, mk) in [
            ("REPEAT", TacticExpr::Repeat as fn(Box<TacticExpr>) -> TacticExpr),
            ("TRY", TacticExpr::Try),
            ("DEPTH_FIRST", TacticExpr::DepthFirst),
        ] {
            if self.is_word(kw) {
                self.bump();
                return Ok(mk(Box::new(self.unary()?)));
            }
        }
        self.atom()
    }

    fn index(&mut self) -> Result<usize, TacticExprError> {
        match self.peek() {
            Tok::Num(0) => Err(TacticExprError::ZeroIndex),
            Tok::Num(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => Ok(1),
        }
    }

    fn atom(&mut self) -> Result<TacticExpr, TacticExprError> {
        match self.peek().clone() {
            Tok::Punct('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Word(w) if w == "id" => {
                self.bump();
                Ok(TacticExpr::Id)
            }
            Tok::Word(w) if w == "fail" => {
                self.bump();
                Ok(TacticExpr::Fail)
            }
            Tok::Word(w) if w == "rules" => {
                self.bump();
                self.expect('[')?;
                let mut names = Vec::new();
                loop {
                    match self.bump() {
                        Tok::Word(n) => names.push(n),
                        _ => return Err(self.error("expected a rule name")),
                    }
                    if self.peek() == &Tok::Punct(',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(']')?;
                let k = self.index()?;
                Ok(TacticExpr::Rules(names, k))
            }
            Tok::Word(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                let k = self.index()?;
                Ok(TacticExpr::Named(w, k))
            }
            _ => Err(self.error("expected a tactic")),
        }
    }
}

pub fn parse_tactic_expr(src: &str) -> Result<TacticExpr, TacticExprError> {
    let mut p = Parser { toks: lex(src)?, i: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.error("unexpected input after tactic"));
    }
    Ok(e)
}

impl TacticExpr {
    /// Build the tactic. Names are rules first, then named tactics.
    pub fn build(&self, logic: &Logic, limits: Limits) -> Result<Tactic, TacticExprError> {
        Ok(match self {
            TacticExpr::Id => id_tac(),
            TacticExpr::Fail => fail_tac(),
            TacticExpr::Rules(names, k) => {
                let rules = names
                    .iter()
                    .map(|n| logic.rule(n).cloned().ok_or_else(|| TacticExprError::UnknownName(n.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                rules_tac(rules, k - 1, limits.unify)
            }
            TacticExpr::Named(n, k) => match logic.rule(n) {
                Some(r) => rules_tac(vec![r.clone()], k - 1, limits.unify),
                None => logic
                    .tactic(n, k - 1, limits)
                    .ok_or_else(|| TacticExprError::UnknownName(n.clone()))?,
            },
            TacticExpr::Then(a, b) => then(a.build(logic, limits)?, b.build(logic, limits)?),
            TacticExpr::OrElse(a, b) => orelse(a.build(logic, limits)?, b.build(logic, limits)?),
            TacticExpr::Repeat(a) => repeat(a.build(logic, limits)?),
            TacticExpr::Try(a) => try_(a.build(logic, limits)?),
            TacticExpr::DepthFirst(a) => {
                let never: Satisfied = Arc::new(|_| false);
                depth_first(never, a.build(logic, limits)?, limits.max_nodes)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use TacticExpr::*;

    fn named(n: &str, k: usize) -> Box<TacticExpr> {
        Box::new(Named(n.into(), k))
    }

    #[test]
    fn precedence() {
        let e = parse_tactic_expr("impI THEN conjI ORELSE REPEAT assume 2").unwrap();
        assert_eq!(
            e,
            OrElse(
                Box::new(Then(named("impI", 1), named("conjI", 1))),
                Box::new(Repeat(named("assume", 2)))
            )
        );
        let e = parse_tactic_expr("DEPTH_FIRST (rules [conjI, assume] 3)").unwrap();
        assert_eq!(e, DepthFirst(Box::new(Rules(vec!["conjI".into(), "assume".into()], 3))));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_tactic_expr("conjI 0"), Err(TacticExprError::ZeroIndex));
        assert!(matches!(parse_tactic_expr("THEN"), Err(TacticExprError::Syntax { .. })));
        assert!(matches!(parse_tactic_expr("(conjI"), Err(TacticExprError::Syntax { .. })));
        assert!(matches!(parse_tactic_expr("a b"), Err(TacticExprError::Syntax { .. })));
        let l = crate::logic::fol::fol();
        let e = parse_tactic_expr("nosuch").unwrap();
        assert!(matches!(e.build(&l, Limits::default()), Err(TacticExprError::UnknownName(_))));
    }
}
