//! First-order terms and formulas, extended with metavariables and
//! Hilbert ε-terms.

use std::collections::BTreeSet;
use std::fmt;

/// Identifier of a metavariable. Unique within one proof search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetaId(pub u32);

impl fmt::Display for MetaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Meta(MetaId),
    App(String, Vec<Term>),
    /// `ε(x).body`: some `x` satisfying `body`.
    Eps(String, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

/// Free occurrences in a term or formula, with named variables and
/// metavariables kept apart.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub vars: BTreeSet<String>,
    pub metas: BTreeSet<MetaId>,
}

impl FreeVars {
    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.metas.is_empty()
    }
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn eps(bound: impl Into<String>, body: Formula) -> Term {
        Term::Eps(bound.into(), Box::new(body))
    }

    pub fn free_vars(&self) -> FreeVars {
        let mut acc = FreeVars::default();
        self.collect_free(&mut Vec::new(), &mut acc);
        acc
    }

    pub(crate) fn collect_free(&self, bound: &mut Vec<String>, acc: &mut FreeVars) {
        match self {
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    acc.vars.insert(x.clone());
                }
            }
            Term::Meta(m) => {
                acc.metas.insert(*m);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(bound, acc)),
            Term::Eps(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, acc);
                bound.pop();
            }
        }
    }

    pub fn has_metas(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Meta(_) => true,
            Term::App(_, args) => args.iter().any(Term::has_metas),
            Term::Eps(_, body) => body.has_metas(),
        }
    }

    /// True when the metavariable occurs anywhere inside the term.
    pub fn contains_meta(&self, m: MetaId) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Meta(n) => *n == m,
            Term::App(_, args) => args.iter().any(|a| a.contains_meta(m)),
            Term::Eps(_, body) => body.free_vars().metas.contains(&m),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Meta(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Eps(_, body) => 1 + body.size(),
        }
    }

    /// Visits every subterm (including `self`), outermost first. Does not
    /// descend into ε bodies.
    pub fn for_each_subterm<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        if let Term::App(_, args) = self {
            for a in args {
                a.for_each_subterm(f);
            }
        }
    }
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.into(), args)
    }

    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn forall(x: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn exists(x: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    /// Negation that strips a double negation instead of stacking one.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::Eq(..))
    }

    /// Splits a literal into polarity and atom.
    pub fn as_literal(&self) -> Option<(bool, &Formula)> {
        match self {
            Formula::Atom(..) | Formula::Eq(..) => Some((true, self)),
            Formula::Not(inner) if inner.is_atomic() => Some((false, inner)),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        self.as_literal().is_some()
    }

    pub fn free_vars(&self) -> FreeVars {
        let mut acc = FreeVars::default();
        self.collect_free(&mut Vec::new(), &mut acc);
        acc
    }

    pub(crate) fn collect_free(&self, bound: &mut Vec<String>, acc: &mut FreeVars) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| a.collect_free(bound, acc)),
            Formula::Eq(l, r) => {
                l.collect_free(bound, acc);
                r.collect_free(bound, acc);
            }
            Formula::Not(a) => a.collect_free(bound, acc),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Equiv(a, b) => {
                a.collect_free(bound, acc);
                b.collect_free(bound, acc);
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, acc);
                bound.pop();
            }
        }
    }

    pub fn has_metas(&self) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(_, args) => args.iter().any(Term::has_metas),
            Formula::Eq(l, r) => l.has_metas() || r.has_metas(),
            Formula::Not(a) => a.has_metas(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Equiv(a, b) => a.has_metas() || b.has_metas(),
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.has_metas(),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().vars.is_empty()
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Eq(l, r) => 1 + l.size() + r.size(),
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Equiv(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + body.size(),
        }
    }

    /// Strips the outermost run of universal quantifiers.
    pub fn strip_forall(&self) -> (Vec<&str>, &Formula) {
        let mut vars = Vec::new();
        let mut cur = self;
        while let Formula::Forall(x, body) = cur {
            vars.push(x.as_str());
            cur = body;
        }
        (vars, cur)
    }

    /// Predicate key `(name, arity)` of an atom; equality is `("=", 2)`.
    pub fn predicate(&self) -> Option<(&str, usize)> {
        match self {
            Formula::Atom(p, args) => Some((p.as_str(), args.len())),
            Formula::Eq(..) => Some(("=", 2)),
            _ => None,
        }
    }

    /// Arguments of an atom, with equality seen as a binary predicate.
    pub fn atom_args(&self) -> Option<Vec<&Term>> {
        match self {
            Formula::Atom(_, args) => Some(args.iter().collect()),
            Formula::Eq(l, r) => Some(vec![l, r]),
            _ => None,
        }
    }

    /// Atomic subformulas, outermost first, without duplicates. Does not look
    /// inside ε-terms.
    pub fn atoms(&self) -> Vec<&Formula> {
        let mut out: Vec<&Formula> = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(..) | Formula::Eq(..) => {
                if !out.contains(&self) {
                    out.push(self);
                }
            }
            Formula::Not(a) => a.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Equiv(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.collect_atoms(out),
        }
    }
}
