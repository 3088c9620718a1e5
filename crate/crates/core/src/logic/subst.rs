//! Capture-avoiding substitution and alpha-equivalence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::term::{Formula, MetaId, Term};

/// A substitutable position: a named variable or a metavariable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKey {
    Var(String),
    Meta(MetaId),
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKey::Var(x) => write!(f, "{x}"),
            VarKey::Meta(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<VarKey, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: VarKey, term: Term) -> Self {
        let mut s = Self::new();
        s.map.insert(key, term);
        s
    }

    pub fn var(name: impl Into<String>, term: Term) -> Self {
        Self::single(VarKey::Var(name.into()), term)
    }

    pub fn meta(m: MetaId, term: Term) -> Self {
        Self::single(VarKey::Meta(m), term)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, key: &VarKey) -> Option<&Term> {
        self.map.get(key)
    }

    /// Raw insertion; callers keep the occurs check.
    pub fn insert(&mut self, key: VarKey, term: Term) {
        self.map.insert(key, term);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarKey, &Term)> {
        self.map.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &VarKey> {
        self.map.keys()
    }

    fn without_var(&self, x: &str) -> Substitution {
        let mut out = self.clone();
        out.map.remove(&VarKey::Var(x.to_owned()));
        out
    }

    fn range_vars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        for t in self.map.values() {
            acc.extend(t.free_vars().vars);
        }
        acc
    }

    /// `other ∘ self`: applying the result equals applying `self` then `other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<VarKey, Term> = self
            .map
            .iter()
            .map(|(k, t)| (k.clone(), t.apply(other)))
            .collect();
        for (k, t) in &other.map {
            map.entry(k.clone()).or_insert_with(|| t.clone());
        }
        map.retain(|k, t| !matches!((k, &*t), (VarKey::Var(x), Term::Var(y)) if x == y)
            && !matches!((k, &*t), (VarKey::Meta(m), Term::Meta(n)) if m == n));
        Substitution { map }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k} ↦ {t:?}")?;
        }
        write!(f, "}}")
    }
}

/// Anything a substitution can be applied to.
pub trait Subst: Sized {
    fn apply(&self, s: &Substitution) -> Self;
}

impl Subst for Term {
    fn apply(&self, s: &Substitution) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(x) => s
                .map
                .get(&VarKey::Var(x.clone()))
                .cloned()
                .unwrap_or_else(|| self.clone()),
            Term::Meta(m) => s
                .map
                .get(&VarKey::Meta(*m))
                .cloned()
                .unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(s)).collect()),
            Term::Eps(x, body) => {
                let (x, body) = under_binder(x, body, s);
                Term::Eps(x, Box::new(body))
            }
        }
    }
}

impl Subst for Formula {
    fn apply(&self, s: &Substitution) -> Formula {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|a| a.apply(s)).collect())
            }
            Formula::Eq(l, r) => Formula::Eq(l.apply(s), r.apply(s)),
            Formula::Not(a) => Formula::not(a.apply(s)),
            Formula::And(a, b) => Formula::and(a.apply(s), b.apply(s)),
            Formula::Or(a, b) => Formula::or(a.apply(s), b.apply(s)),
            Formula::Implies(a, b) => Formula::implies(a.apply(s), b.apply(s)),
            Formula::Equiv(a, b) => Formula::equiv(a.apply(s), b.apply(s)),
            Formula::Forall(x, body) => {
                let (x, body) = under_binder(x, body, s);
                Formula::forall(x, body)
            }
            Formula::Exists(x, body) => {
                let (x, body) = under_binder(x, body, s);
                Formula::exists(x, body)
            }
        }
    }
}

/// Pushes a substitution under a binder, renaming the binder when a
/// substituted term would be captured.
fn under_binder(x: &str, body: &Formula, s: &Substitution) -> (String, Formula) {
    let inner = s.without_var(x);
    if inner.is_empty() {
        return (x.to_owned(), body.clone());
    }
    let range = inner.range_vars();
    if !range.contains(x) {
        return (x.to_owned(), body.apply(&inner));
    }
    let mut avoid = range;
    avoid.extend(body.free_vars().vars);
    avoid.extend(inner.keys().filter_map(|k| match k {
        VarKey::Var(v) => Some(v.clone()),
        VarKey::Meta(_) => None,
    }));
    let fresh = fresh_name(x, &avoid);
    let renamed = body.apply(&Substitution::var(x, Term::Var(fresh.clone())));
    (fresh.clone(), renamed.apply(&inner))
}

/// `base` followed by the smallest numeric suffix not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { base } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|cand| !avoid.contains(cand))
        .expect("unbounded supply of names")
}

/// Capture-avoiding substitution on formulas.
pub fn substitute(f: &Formula, s: &Substitution) -> Formula {
    f.apply(s)
}

/// Canonical representative of an alpha-equivalence class: every bound
/// identifier is replaced by `#k`, `k` being its binder depth.
pub trait Canonical: Sized {
    fn canonical(&self) -> Self;
}

impl Canonical for Term {
    fn canonical(&self) -> Term {
        canon_term(self, &mut Vec::new())
    }
}

impl Canonical for Formula {
    fn canonical(&self) -> Formula {
        canon_formula(self, &mut Vec::new())
    }
}

fn bound_name(x: &str, env: &[(String, String)]) -> Option<String> {
    env.iter().rev().find(|(n, _)| n == x).map(|(_, c)| c.clone())
}

fn canon_term(t: &Term, env: &mut Vec<(String, String)>) -> Term {
    match t {
        Term::Var(x) => Term::Var(bound_name(x, env).unwrap_or_else(|| x.clone())),
        Term::Meta(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| canon_term(a, env)).collect()),
        Term::Eps(x, body) => {
            let c = format!("#{}", env.len());
            env.push((x.clone(), c.clone()));
            let body = canon_formula(body, env);
            env.pop();
            Term::Eps(c, Box::new(body))
        }
    }
}

fn canon_formula(f: &Formula, env: &mut Vec<(String, String)>) -> Formula {
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom(p, args) => {
            Formula::Atom(p.clone(), args.iter().map(|a| canon_term(a, env)).collect())
        }
        Formula::Eq(l, r) => Formula::Eq(canon_term(l, env), canon_term(r, env)),
        Formula::Not(a) => Formula::not(canon_formula(a, env)),
        Formula::And(a, b) => Formula::and(canon_formula(a, env), canon_formula(b, env)),
        Formula::Or(a, b) => Formula::or(canon_formula(a, env), canon_formula(b, env)),
        Formula::Implies(a, b) => Formula::implies(canon_formula(a, env), canon_formula(b, env)),
        Formula::Equiv(a, b) => Formula::equiv(canon_formula(a, env), canon_formula(b, env)),
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            let c = format!("#{}", env.len());
            env.push((x.clone(), c.clone()));
            let body = canon_formula(body, env);
            env.pop();
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(c, body)
            } else {
                Formula::exists(c, body)
            }
        }
    }
}

/// Equality up to the names of bound identifiers.
pub fn alpha_equal<T: Canonical + PartialEq>(a: &T, b: &T) -> bool {
    a.canonical() == b.canonical()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: Vec<Term>) -> Formula {
        Formula::atom("p", args)
    }

    #[test]
    fn gamma_instance() {
        let body = p(vec![Term::var("x")]);
        let got = substitute(&body, &Substitution::var("x", Term::constant("t")));
        assert_eq!(got, p(vec![Term::constant("t")]));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let f = Formula::forall("x", Formula::and(p(vec![Term::var("x")]), p(vec![Term::var("y")])));
        assert_eq!(substitute(&f, &Substitution::new()), f);
    }

    #[test]
    fn capture_renames_binder() {
        // ∀y p(x,y) with x ↦ g(y)
        let f = Formula::forall("y", p(vec![Term::var("x"), Term::var("y")]));
        let s = Substitution::var("x", Term::app("g", vec![Term::var("y")]));
        let got = substitute(&f, &s);
        match &got {
            Formula::Forall(b, body) => {
                assert_ne!(b, "y");
                assert_eq!(
                    **body,
                    p(vec![Term::app("g", vec![Term::var("y")]), Term::var(b.clone())])
                );
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(got.free_vars().vars.contains("y"));
    }

    #[test]
    fn shadowed_variable_not_substituted() {
        let f = Formula::forall("x", p(vec![Term::var("x")]));
        assert_eq!(substitute(&f, &Substitution::var("x", Term::constant("c"))), f);
    }

    #[test]
    fn epsilon_bodies_are_substituted() {
        let t = Term::eps("x", p(vec![Term::var("x"), Term::var("a")]));
        let got = t.apply(&Substitution::var("a", Term::constant("c")));
        assert_eq!(got, Term::eps("x", p(vec![Term::var("x"), Term::constant("c")])));
    }

    #[test]
    fn alpha_equal_examples() {
        let mk = |x: &str| {
            let mem = |s: &str| Formula::atom("in", vec![Term::var(x), Term::var(s)]);
            Term::eps(x, Formula::not(Formula::implies(mem("a"), mem("b"))))
        };
        assert!(alpha_equal(&mk("x"), &mk("y")));
        let c = p(vec![Term::constant("c")]);
        assert!(alpha_equal(&c, &c));
        let pc = Formula::forall("x", p(vec![Term::var("x"), Term::constant("c")]));
        let pd = Formula::forall("x", p(vec![Term::var("x"), Term::constant("d")]));
        assert!(!alpha_equal(&pc, &pd));
    }

    #[test]
    fn free_var_is_not_alpha_equal_to_bound() {
        let a = Formula::forall("x", p(vec![Term::var("x"), Term::var("y")]));
        let b = Formula::forall("y", p(vec![Term::var("y"), Term::var("y")]));
        assert!(!alpha_equal(&a, &b));
    }

    #[test]
    fn composition_applies_in_order() {
        let s1 = Substitution::var("x", Term::app("f", vec![Term::var("y")]));
        let s2 = Substitution::var("y", Term::constant("c"));
        let t = Term::app("g", vec![Term::var("x"), Term::var("y")]);
        assert_eq!(t.apply(&s1).apply(&s2), t.apply(&s1.then(&s2)));
    }
}
