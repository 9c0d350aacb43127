//! Equation mode: unify two terms and page through the unifiers.

use crate::logic::parse::{Elaborator, ParseError};
use crate::logic::print::print_plain;
use crate::logic::signature::Signature;
use crate::term::{aconv, canonical, instantiate, vars_of, Arity, Environment, Term};
use crate::unify::{unify, UnifyError, UnifyOptions, Unifier};

/// Two parsed sides with the signature they print in. Undeclared names
/// are declared as constants in `sig`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub sig: Signature,
    pub lhs: Term,
    pub rhs: Term,
}

/// One unifier restricted to the variables of the equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// `(variable, value)` in display form.
    pub bindings: Vec<(String, String)>,
    /// Remaining flex-flex pairs, `lhs =?= rhs`.
    pub constraints: Vec<String>,
}

fn declare_atoms(sig: &mut Signature, a: &Arity) {
    match a {
        Arity::Atomic(n) => {
            let _ = sig.declare_atomic(n);
        }
        Arity::Fun(x, y) => {
            declare_atoms(sig, x);
            declare_atoms(sig, y);
        }
    }
}

impl Equation {
    pub fn parse(sig: &Signature, lhs: &str, rhs: &str) -> Result<Equation, ParseError> {
        let mut e = Elaborator::lenient(sig);
        let i = e.add(lhs, None)?;
        let j = e.add(rhs, None)?;
        e.same_arity(i, j)?;
        let unknown = e.unknown_constants();
        let mut ts = e.finish()?;
        let rhs = ts.pop().unwrap();
        let lhs = ts.pop().unwrap();
        let mut sig = sig.clone();
        let default = sig.default_atomic();
        declare_atoms(&mut sig, &default);
        for (n, a) in unknown {
            declare_atoms(&mut sig, &a);
            sig.declare_const(&n, a)?;
        }
        for a in vars_of(&lhs).values().chain(vars_of(&rhs).values()) {
            declare_atoms(&mut sig, a);
        }
        Ok(Equation { sig, lhs, rhs })
    }

    pub fn unifiers(&self, opts: UnifyOptions) -> impl Iterator<Item = Result<Unifier, UnifyError>> {
        unify(&self.lhs, &self.rhs, Environment::new(1), opts)
    }

    pub fn describe(&self, u: &Unifier) -> Solution {
        let mut vars = vars_of(&self.lhs);
        vars.extend(vars_of(&self.rhs));
        let mut bindings = Vec::new();
        for (v, a) in vars {
            let var = Term::Var(v, a);
            let value = canonical(&instantiate(&u.env, &var));
            if !aconv(&value, &var) {
                bindings.push((print_plain(&self.sig, &var), print_plain(&self.sig, &value)));
            }
        }
        let constraints = u
            .flexflex
            .iter()
            .map(|p| {
                let (l, r) = p.closed_sides();
                let inst = |t: &Term| print_plain(&self.sig, &canonical(&instantiate(&u.env, t)));
                format!("{} =?= {}", inst(&l), inst(&r))
            })
            .collect();
        Solution { bindings, constraints }
    }

    /// Unifiers `page * size .. (page + 1) * size` and whether more follow.
    pub fn page(&self, opts: UnifyOptions, page: usize, size: usize) -> Result<(Vec<Solution>, bool), UnifyError> {
        let mut it = self.unifiers(opts).skip(page * size);
        let mut out = Vec::new();
        for _ in 0..size {
            match it.next() {
                Some(u) => out.push(self.describe(&u?)),
                None => return Ok((out, false)),
            }
        }
        Ok((out, matches!(it.next(), Some(Ok(_)))))
    }
}

impl std::fmt::Display for Solution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.bindings.is_empty() {
            write!(f, "  (no bindings)")?;
        }
        for (k, (v, t)) in self.bindings.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "  {v} = {t}")?;
        }
        for c in &self.constraints {
            write!(f, "\n  flex-flex: {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_unifiers_in_pages() {
        let eq = Equation::parse(&Signature::new(), "?f(C, ?x)", "A(B)").unwrap();
        let opts = UnifyOptions::bounded(64);
        let (first, more) = eq.page(opts, 0, 2).unwrap();
        assert_eq!(first.len(), 2);
        assert!(more);
        let (rest, more) = eq.page(opts, 1, 2).unwrap();
        assert_eq!(rest.len(), 1);
        assert!(!more);
        let all: Vec<String> = first.iter().chain(&rest).map(|s| s.to_string()).collect();
        assert!(all.iter().any(|s| s.contains("?x = B")), "{all:?}");
    }
}
