//! Printing terms in the concrete syntax of a signature.
//!
//! Output is re-parsed and compared with the original; if the text does not
//! read back as the same term, it is printed again with arity annotations on
//! the first occurrence of every scheme variable and on every abstraction.

use std::collections::{HashMap, HashSet};

use super::parse::parse_term;
use super::signature::{is_identifier, Assoc, Signature};
use crate::rule::Rule;
use crate::term::{Arity, Name, Term, VarId};

/// Short names for Skolem parameters, `base#k`, numbered per base in order
/// of first appearance.
#[derive(Clone, Debug, Default)]
pub struct SkolemTable {
    entries: Vec<(Term, String)>,
    counts: HashMap<Name, usize>,
}

impl SkolemTable {
    pub fn new() -> SkolemTable {
        SkolemTable::default()
    }

    fn label(&mut self, param: &Term, base: &Name) -> String {
        if let Some((_, l)) = self.entries.iter().find(|(t, _)| t == param) {
            return l.clone();
        }
        let n = self.counts.entry(base.clone()).or_insert(0);
        *n += 1;
        let label = format!("{base}#{n}");
        self.entries.push((param.clone(), label.clone()));
        label
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// `(label, parameter)` pairs in numbering order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.entries.iter().map(|(t, l)| (l.as_str(), t))
    }
}

struct Printer<'a, 'b> {
    sig: &'a Signature,
    annotate: bool,
    table: Option<&'b mut SkolemTable>,
    seen: HashSet<VarId>,
    floor: u32,
    arg_floor: u32,
}

fn annotation(a: &Arity) -> String {
    if a.is_atomic() {
        a.to_string()
    } else {
        format!("({a})")
    }
}

impl<'a, 'b> Printer<'a, 'b> {
    fn new(sig: &'a Signature, annotate: bool, table: Option<&'b mut SkolemTable>) -> Self {
        Printer {
            sig,
            annotate,
            table,
            seen: HashSet::new(),
            floor: 0,
            arg_floor: sig.infixes.get(",").map(|i| i.prec + 1).unwrap_or(0),
        }
    }

    fn fresh(&self, hint: &str, scope: &[String]) -> String {
        let base = if is_identifier(hint) && !hint.starts_with(|c: char| c.is_ascii_digit()) {
            hint.to_string()
        } else {
            "x".to_string()
        };
        let taken = |n: &str| {
            self.sig.constants.contains_key(n)
                || self.sig.is_keyword(n)
                || self.sig.skolems.contains_key(n)
                || scope.iter().any(|s| s == n)
        };
        if !taken(&base) {
            return base;
        }
        (1..).map(|k| format!("{base}{k}")).find(|n| !taken(n)).unwrap()
    }

    fn wrap(&mut self, paren: bool, f: impl FnOnce(&mut Self) -> String) -> String {
        if !paren {
            return f(self);
        }
        let saved = self.floor;
        self.floor = 0;
        let s = f(self);
        self.floor = saved;
        format!("({s})")
    }

    fn args(&mut self, args: &[&Term], scope: &mut Vec<String>) -> Vec<String> {
        let saved = self.floor;
        self.floor = self.arg_floor;
        let out = args.iter().map(|a| self.go(a, 0, true, scope)).collect();
        self.floor = saved;
        out
    }

    fn atom(&mut self, t: &Term, scope: &mut Vec<String>) -> String {
        match t {
            Term::Const(n, _) => n.to_string(),
            Term::Var(v, a) => {
                if self.annotate && self.seen.insert(v.clone()) {
                    format!("{v}::{}", annotation(a))
                } else {
                    v.to_string()
                }
            }
            Term::Bound(i) => match scope.len().checked_sub(*i as usize + 1) {
                Some(k) => scope[k].clone(),
                None => format!("<loose {i}>"),
            },
            Term::Param(p) => {
                if self.table.is_some() {
                    self.table.as_mut().unwrap().label(t, &p.base)
                } else {
                    let subs: Vec<&Term> = p.subs.iter().collect();
                    format!("{}[{}]", p.base, self.args(&subs, scope).join(", "))
                }
            }
            _ => self.wrap(true, |me| me.go(t, 0, true, scope)),
        }
    }

    /// `prec` is the least operator precedence that may appear unbracketed;
    /// `rightmost` says nothing follows the term in its context.
    fn go(&mut self, t: &Term, prec: u32, rightmost: bool, scope: &mut Vec<String>) -> String {
        let prec = prec.max(self.floor);
        match t {
            Term::Abs(..) => self.wrap(!rightmost, |me| {
                let mut names = Vec::new();
                let mut body = t;
                while let Term::Abs(h, a, b) = body {
                    let n = me.fresh(h, scope);
                    scope.push(n.clone());
                    names.push(if me.annotate {
                        format!("{n}::{}", annotation(a))
                    } else {
                        n
                    });
                    body = b;
                }
                let b = me.go(body, 0, true, scope);
                scope.truncate(scope.len() - names.len());
                format!("%{}. {b}", names.join(" "))
            }),
            Term::App(..) => self.app(t, prec, rightmost, scope),
            _ => self.atom(t, scope),
        }
    }

    fn app(&mut self, t: &Term, prec: u32, rightmost: bool, scope: &mut Vec<String>) -> String {
        let (head, args) = t.strip_app();
        if let Term::Const(c, _) = head {
            if args.len() == 2 {
                if let Some((sym, inf)) = self.sig.infix_for_const(c) {
                    let (sym, inf) = (sym.to_string(), inf.clone());
                    let p = inf.prec;
                    return self.wrap(p < prec, |me| {
                        let rm = p < prec || rightmost;
                        let (lp, rp) = match inf.assoc {
                            Assoc::Left => (p, p + 1),
                            Assoc::Right => (p + 1, p),
                            Assoc::None => (p + 1, p + 1),
                        };
                        let omit_left = matches!(
                            (args[0], &inf.default_left),
                            (Term::Const(n, _), Some(d)) if n == d
                        );
                        if omit_left {
                            let r = me.go(args[1], rp, rm, scope);
                            return format!("{sym} {r}");
                        }
                        let l = me.go(args[0], lp, false, scope);
                        let r = me.go(args[1], rp, rm, scope);
                        if sym == "," {
                            format!("{l}, {r}")
                        } else {
                            format!("{l} {sym} {r}")
                        }
                    });
                }
            }
            if args.len() == 1 {
                if let Some((sym, pf)) = self.sig.postfix_for_const(c) {
                    let (sym, p) = (sym.to_string(), pf.prec);
                    return self.wrap(p < prec, |me| {
                        let a = me.go(args[0], p + 1, false, scope);
                        format!("{a} {sym}")
                    });
                }
                if let (Some(key), Term::Abs(h, _, body)) = (self.sig.binder_for_const(c), args[0]) {
                    let key = key.to_string();
                    return self.wrap(!rightmost, |me| {
                        let n = me.fresh(h, scope);
                        scope.push(n.clone());
                        let b = me.go(body, 0, true, scope);
                        scope.pop();
                        format!("{key} {n}. {b}")
                    });
                }
            }
        }
        let h = self.atom(head, scope);
        let a = self.args(&args, scope);
        format!("{h}({})", a.join(", "))
    }
}

fn render(sig: &Signature, t: &Term, annotate: bool, table: Option<&mut SkolemTable>) -> String {
    Printer::new(sig, annotate, table).go(t, 0, true, &mut Vec::new())
}

fn needs_annotation(sig: &Signature, t: &Term) -> bool {
    let plain = render(sig, t, false, None);
    !matches!(parse_term(sig, &plain), Ok(u) if u == *t)
}

/// Print a closed term so that it parses back to itself.
pub fn print(sig: &Signature, t: &Term) -> String {
    render(sig, t, needs_annotation(sig, t), None)
}

/// Print without arity annotations, for display only: the text may not
/// determine the arities of its variables.
pub fn print_plain(sig: &Signature, t: &Term) -> String {
    render(sig, t, false, None)
}

/// Print with Skolem parameters abbreviated through `table`.
pub fn print_compressed(sig: &Signature, t: &Term, table: &mut SkolemTable) -> String {
    render(sig, t, needs_annotation(sig, t), Some(table))
}

/// Definitions of every abbreviation in `table`, such as `all#1 = all[?H]`.
/// Abbreviations used inside definitions are added as they are met.
pub fn legend(sig: &Signature, table: &mut SkolemTable) -> Vec<String> {
    let mut out = Vec::new();
    let mut k = 0;
    while k < table.entries.len() {
        let (t, label) = table.entries[k].clone();
        if let Term::Param(p) = &t {
            let mut pr = Printer::new(sig, false, Some(&mut *table));
            let subs: Vec<&Term> = p.subs.iter().collect();
            let subs = pr.args(&subs, &mut Vec::new());
            out.push(format!("{label} = {}[{}]", p.base, subs.join(", ")));
        }
        k += 1;
    }
    out
}

/// Print a term; with `compress`, Skolem parameters are abbreviated and
/// their definitions follow on `where` lines.
pub fn print_term(sig: &Signature, t: &Term, compress: bool) -> String {
    if !compress {
        return print(sig, t);
    }
    let mut table = SkolemTable::new();
    let s = print_compressed(sig, t, &mut table);
    let defs = legend(sig, &mut table);
    let mut out = s;
    for d in defs {
        out.push_str("\n  where ");
        out.push_str(&d);
    }
    out
}

/// Premises one per line, a rule line, then the conclusion.
pub fn print_rule(sig: &Signature, r: &Rule, compress: bool) -> String {
    let mut table = SkolemTable::new();
    let mut lines = Vec::new();
    let mut show = |t: &Term| {
        if compress {
            print_compressed(sig, t, &mut table)
        } else {
            print(sig, t)
        }
    };
    for p in &r.premises {
        lines.push(show(p));
    }
    let c = show(&r.conclusion);
    let width = lines.iter().chain(std::iter::once(&c)).map(|l| l.chars().count()).max().unwrap_or(0);
    lines.push("-".repeat(width.max(4)));
    lines.push(c);
    for ff in &r.flexflex {
        let (l, rr) = ff.closed_sides();
        let (l, rr) = (show(&l), show(&rr));
        lines.push(format!("flex-flex: {l} =?= {rr}"));
    }
    if compress {
        for d in legend(sig, &mut table) {
            lines.push(format!("where {d}"));
        }
    }
    lines.join("\n")
}
