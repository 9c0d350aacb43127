//! Object-logic signatures: atomic arities, constants and concrete syntax.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use thiserror::Error;

use crate::term::{Arity, Name};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("unknown atomic arity `{0}`")]
    UnknownArity(String),
    #[error("malformed arity `{0}`")]
    MalformedArity(String),
    #[error("`{0}` is not a declared constant")]
    UndeclaredConstant(String),
    #[error("`{0}` is already declared")]
    Duplicate(String),
    #[error("constant `{name}` of arity {arity} cannot be used as {what}")]
    Incompatible {
        name: String,
        arity: Arity,
        what: &'static str,
    },
    #[error("`{0}` is not a valid symbol")]
    BadSymbol(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infix {
    pub constant: Name,
    pub prec: u32,
    pub assoc: Assoc,
    /// Constant supplied when the left operand is omitted, as in `|- A`.
    pub default_left: Option<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Postfix {
    pub constant: Name,
    pub prec: u32,
}

#[derive(Clone, Debug, Default)]
pub struct Signature {
    pub atomics: BTreeSet<Name>,
    pub constants: IndexMap<Name, Arity>,
    pub infixes: IndexMap<String, Infix>,
    pub postfixes: IndexMap<String, Postfix>,
    /// keyword -> constant
    pub binders: IndexMap<String, Name>,
    /// Skolem parameter bases and the arity of their parameters.
    pub skolems: IndexMap<Name, Arity>,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if is_ident_start(c)) && cs.all(is_ident_char)
}

/// Characters reserved by the term grammar itself.
const RESERVED: &[char] = &['(', ')', '[', ']', '?', '%', '.', '#', '"'];

fn is_symbol(s: &str) -> bool {
    if s.is_empty() || s == "::" || s == "->" {
        return false;
    }
    is_identifier(s)
        || s.chars()
            .all(|c| !c.is_whitespace() && !is_ident_char(c) && !RESERVED.contains(&c))
}

impl Signature {
    pub fn new() -> Signature {
        let mut sig = Signature::default();
        sig.atomics.insert(crate::rule::PROP.into());
        sig
    }

    pub fn declare_atomic(&mut self, name: &str) -> Result<(), SignatureError> {
        if !is_identifier(name) {
            return Err(SignatureError::BadSymbol(name.to_string()));
        }
        self.atomics.insert(name.into());
        Ok(())
    }

    pub fn declare_const(&mut self, name: &str, arity: Arity) -> Result<(), SignatureError> {
        if !is_identifier(name) {
            return Err(SignatureError::BadSymbol(name.to_string()));
        }
        self.check_arity(&arity)?;
        if self.constants.contains_key(name) || self.skolems.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        self.constants.insert(name.into(), arity);
        Ok(())
    }

    pub fn declare_skolem(&mut self, base: &str, arity: Arity) -> Result<(), SignatureError> {
        if !is_identifier(base) {
            return Err(SignatureError::BadSymbol(base.to_string()));
        }
        self.check_arity(&arity)?;
        if self.constants.contains_key(base) || self.skolems.contains_key(base) {
            return Err(SignatureError::Duplicate(base.to_string()));
        }
        self.skolems.insert(base.into(), arity);
        Ok(())
    }

    pub fn declare_infix(
        &mut self,
        symbol: &str,
        constant: &str,
        prec: u32,
        assoc: Assoc,
        default_left: Option<&str>,
    ) -> Result<(), SignatureError> {
        self.check_symbol(symbol)?;
        let arity = self.const_arity(constant)?;
        let (args, _) = arity.spine();
        if args.len() != 2 {
            return Err(SignatureError::Incompatible {
                name: constant.to_string(),
                arity: arity.clone(),
                what: "an infix",
            });
        }
        if let Some(d) = default_left {
            let da = self.const_arity(d)?;
            if da != args[0] {
                return Err(SignatureError::Incompatible {
                    name: d.to_string(),
                    arity: da.clone(),
                    what: "a default left operand",
                });
            }
        }
        self.infixes.insert(
            symbol.to_string(),
            Infix {
                constant: constant.into(),
                prec,
                assoc,
                default_left: default_left.map(Into::into),
            },
        );
        Ok(())
    }

    pub fn declare_postfix(&mut self, symbol: &str, constant: &str, prec: u32) -> Result<(), SignatureError> {
        self.check_symbol(symbol)?;
        let arity = self.const_arity(constant)?;
        if arity.arg_count() != 1 {
            return Err(SignatureError::Incompatible {
                name: constant.to_string(),
                arity: arity.clone(),
                what: "a postfix operator",
            });
        }
        self.postfixes.insert(
            symbol.to_string(),
            Postfix {
                constant: constant.into(),
                prec,
            },
        );
        Ok(())
    }

    pub fn declare_binder(&mut self, keyword: &str, constant: &str) -> Result<(), SignatureError> {
        if !is_identifier(keyword) {
            return Err(SignatureError::BadSymbol(keyword.to_string()));
        }
        self.check_fresh_symbol(keyword)?;
        let arity = self.const_arity(constant)?;
        let ok = match arity {
            Arity::Fun(a, _) => matches!(a.as_ref(), Arity::Fun(..)),
            _ => false,
        };
        if !ok {
            return Err(SignatureError::Incompatible {
                name: constant.to_string(),
                arity: arity.clone(),
                what: "a binder",
            });
        }
        self.binders.insert(keyword.to_string(), constant.into());
        Ok(())
    }

    fn check_symbol(&self, symbol: &str) -> Result<(), SignatureError> {
        if !is_symbol(symbol) {
            return Err(SignatureError::BadSymbol(symbol.to_string()));
        }
        self.check_fresh_symbol(symbol)
    }

    fn check_fresh_symbol(&self, symbol: &str) -> Result<(), SignatureError> {
        if self.infixes.contains_key(symbol)
            || self.postfixes.contains_key(symbol)
            || self.binders.contains_key(symbol)
        {
            return Err(SignatureError::Duplicate(symbol.to_string()));
        }
        Ok(())
    }

    fn const_arity(&self, name: &str) -> Result<&Arity, SignatureError> {
        self.constants
            .get(name)
            .ok_or_else(|| SignatureError::UndeclaredConstant(name.to_string()))
    }

    pub fn check_arity(&self, a: &Arity) -> Result<(), SignatureError> {
        match a {
            Arity::Atomic(n) if self.atomics.contains(n) => Ok(()),
            Arity::Atomic(n) => Err(SignatureError::UnknownArity(n.to_string())),
            Arity::Fun(x, y) => {
                self.check_arity(x)?;
                self.check_arity(y)
            }
        }
    }

    /// Parse `atom`, `a -> b`, `(a -> b) -> c`.
    pub fn parse_arity(&self, text: &str) -> Result<Arity, SignatureError> {
        let a = parse_arity_text(text)?;
        self.check_arity(&a)?;
        Ok(a)
    }

    pub fn constant(&self, name: &str) -> Option<&Arity> {
        self.constants.get(name)
    }

    /// Is `word` a keyword of the concrete syntax?
    pub fn is_keyword(&self, word: &str) -> bool {
        self.infixes.contains_key(word) || self.postfixes.contains_key(word) || self.binders.contains_key(word)
    }

    pub fn infix_for_const(&self, constant: &str) -> Option<(&str, &Infix)> {
        self.infixes
            .iter()
            .find(|(_, i)| i.constant.as_ref() == constant)
            .map(|(s, i)| (s.as_str(), i))
    }

    pub fn postfix_for_const(&self, constant: &str) -> Option<(&str, &Postfix)> {
        self.postfixes
            .iter()
            .find(|(_, p)| p.constant.as_ref() == constant)
            .map(|(s, p)| (s.as_str(), p))
    }

    pub fn binder_for_const(&self, constant: &str) -> Option<&str> {
        self.binders
            .iter()
            .find(|(_, c)| c.as_ref() == constant)
            .map(|(k, _)| k.as_str())
    }

    /// Include every declaration of `other`; later declarations win.
    pub fn extend(&mut self, other: &Signature) {
        self.atomics.extend(other.atomics.iter().cloned());
        for (k, v) in &other.constants {
            self.constants.insert(k.clone(), v.clone());
        }
        for (k, v) in &other.infixes {
            self.infixes.insert(k.clone(), v.clone());
        }
        for (k, v) in &other.postfixes {
            self.postfixes.insert(k.clone(), v.clone());
        }
        for (k, v) in &other.binders {
            self.binders.insert(k.clone(), v.clone());
        }
        for (k, v) in &other.skolems {
            self.skolems.insert(k.clone(), v.clone());
        }
    }

    /// The arity used for otherwise unconstrained names when parsing
    /// leniently: the first declared atomic arity other than `prop`.
    pub fn default_atomic(&self) -> Arity {
        let first = self
            .atomics
            .iter()
            .find(|a| a.as_ref() != crate::rule::PROP);
        match first {
            Some(a) => Arity::Atomic(a.clone()),
            None => Arity::atomic("o"),
        }
    }
}

/// Parse an arity without checking its atoms against a signature.
pub fn parse_arity_text(text: &str) -> Result<Arity, SignatureError> {
    let tokens = arity_tokens(text).ok_or_else(|| SignatureError::MalformedArity(text.to_string()))?;
    let mut pos = 0;
    let a = parse_arity_tokens(&tokens, &mut pos).ok_or_else(|| SignatureError::MalformedArity(text.to_string()))?;
    if pos != tokens.len() {
        return Err(SignatureError::MalformedArity(text.to_string()));
    }
    Ok(a)
}

fn arity_tokens(text: &str) -> Option<Vec<String>> {
    let mut out = Vec::new();
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' || c == ')' {
            out.push(c.to_string());
            i += 1;
        } else if c == '-' && cs.get(i + 1) == Some(&'>') {
            out.push("->".into());
            i += 2;
        } else if is_ident_start(c) {
            let start = i;
            while i < cs.len() && is_ident_char(cs[i]) {
                i += 1;
            }
            out.push(cs[start..i].iter().collect());
        } else {
            return None;
        }
    }
    Some(out)
}

/// arity := simple ("->" arity)? ; simple := ident | "(" arity ")"
pub(crate) fn parse_arity_tokens(tokens: &[String], pos: &mut usize) -> Option<Arity> {
    let first = match tokens.get(*pos)?.as_str() {
        "(" => {
            *pos += 1;
            let a = parse_arity_tokens(tokens, pos)?;
            if tokens.get(*pos)? != ")" {
                return None;
            }
            *pos += 1;
            a
        }
        t if is_identifier(t) => {
            *pos += 1;
            Arity::atomic(t)
        }
        _ => return None,
    };
    if tokens.get(*pos).map(String::as_str) == Some("->") {
        *pos += 1;
        let rest = parse_arity_tokens(tokens, pos)?;
        Some(Arity::fun(first, rest))
    } else {
        Some(first)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_text() {
        let a = parse_arity_text("(term -> form) -> form").unwrap();
        assert_eq!(a.to_string(), "(term -> form) -> form");
        let b = parse_arity_text("term -> term -> form").unwrap();
        assert_eq!(b.arg_count(), 2);
        assert!(parse_arity_text("term ->").is_err());
        assert!(parse_arity_text("(term").is_err());
    }

    #[test]
    fn declarations_are_checked() {
        let mut sig = Signature::new();
        sig.declare_atomic("form").unwrap();
        sig.declare_const("conj", parse_arity_text("form -> form -> form").unwrap()).unwrap();
        sig.declare_infix("&", "conj", 5, Assoc::Right, None).unwrap();
        assert!(sig.declare_infix("|", "disj", 4, Assoc::Right, None).is_err());
        assert!(sig.declare_binder("ALL", "conj").is_err());
        assert!(sig.declare_const("x", Arity::atomic("term")).is_err());
        assert!(sig.declare_infix("(", "conj", 1, Assoc::Left, None).is_err());
        assert!(sig.declare_const("conj", Arity::atomic("form")).is_err());
        assert_eq!(sig.default_atomic(), Arity::atomic("form"));
    }
}
