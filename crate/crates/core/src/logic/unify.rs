//! Syntactic first-order unification and one-way matching.

use super::subst::{alpha_equal, Subst, Substitution, VarKey};
use super::term::{Formula, Term};

/// Why two expressions do not unify. Not a fault: callers use it as a
/// plain "no".
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UnifyFailure {
    #[error("symbol clash: {0} vs {1}")]
    Clash(String, String),
    #[error("arity clash on {0}")]
    Arity(String),
    #[error("occurs check failed for {0}")]
    Occurs(VarKey),
    #[error("ε-terms are not alpha-equivalent")]
    Epsilon,
}

/// Which named variables behave as unification variables. Metavariables
/// always do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarMode {
    /// Named variables are rigid.
    Rigid,
    /// Named variables are schema variables and may be bound.
    Schema,
}

struct Unifier {
    mode: VarMode,
    subst: Substitution,
}

impl Unifier {
    fn flex_key(&self, t: &Term) -> Option<VarKey> {
        match t {
            Term::Meta(m) => Some(VarKey::Meta(*m)),
            Term::Var(x) if self.mode == VarMode::Schema => Some(VarKey::Var(x.clone())),
            _ => None,
        }
    }

    fn walk(&self, t: &Term) -> Term {
        let mut cur = t.clone();
        while let Some(k) = self.flex_key(&cur) {
            match self.subst.get(&k) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(&self, k: &VarKey, t: &Term) -> bool {
        let t = self.walk(t);
        if self.flex_key(&t).as_ref() == Some(k) {
            return true;
        }
        match &t {
            Term::App(_, args) => args.iter().any(|a| self.occurs(k, a)),
            Term::Eps(..) => {
                let fv = t.apply(&self.subst).free_vars();
                match k {
                    VarKey::Meta(m) => fv.metas.contains(m),
                    VarKey::Var(x) => fv.vars.contains(x),
                }
            }
            _ => false,
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> Result<(), UnifyFailure> {
        let a = self.walk(a);
        let b = self.walk(b);
        if a == b {
            return Ok(());
        }
        match (self.flex_key(&a), self.flex_key(&b)) {
            (Some(k), _) => return self.bind(k, b),
            (None, Some(k)) => return self.bind(k, a),
            _ => {}
        }
        match (&a, &b) {
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g {
                    return Err(UnifyFailure::Clash(f.clone(), g.clone()));
                }
                if xs.len() != ys.len() {
                    return Err(UnifyFailure::Arity(f.clone()));
                }
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            (Term::Eps(..), Term::Eps(..)) => {
                if alpha_equal(&a.apply(&self.subst), &b.apply(&self.subst)) {
                    Ok(())
                } else {
                    Err(UnifyFailure::Epsilon)
                }
            }
            _ => Err(UnifyFailure::Clash(describe(&a), describe(&b))),
        }
    }

    fn bind(&mut self, k: VarKey, t: Term) -> Result<(), UnifyFailure> {
        if self.occurs(&k, &t) {
            return Err(UnifyFailure::Occurs(k));
        }
        self.subst.insert(k, t);
        Ok(())
    }

    /// Fully resolved, idempotent form of the triangular substitution.
    fn finish(self) -> Substitution {
        let mut out = Substitution::new();
        let keys: Vec<VarKey> = self.subst.keys().cloned().collect();
        for k in keys {
            let mut t = self.subst.get(&k).cloned().expect("key present");
            loop {
                let next = t.apply(&self.subst);
                if next == t {
                    break;
                }
                t = next;
            }
            out.insert(k, t);
        }
        out
    }
}

fn describe(t: &Term) -> String {
    match t {
        Term::Var(x) => x.clone(),
        Term::Meta(m) => m.to_string(),
        Term::App(f, _) => f.clone(),
        Term::Eps(..) => "ε".to_owned(),
    }
}

pub fn unify_terms(a: &Term, b: &Term, mode: VarMode) -> Result<Substitution, UnifyFailure> {
    let mut u = Unifier { mode, subst: Substitution::new() };
    u.unify(a, b)?;
    Ok(u.finish())
}

/// Unifies two atoms (equality counts as a binary predicate).
pub fn unify_atoms(a: &Formula, b: &Formula, mode: VarMode) -> Result<Substitution, UnifyFailure> {
    let mut u = Unifier { mode, subst: Substitution::new() };
    unify_atoms_with(&mut u, a, b)?;
    Ok(u.finish())
}

fn unify_atoms_with(u: &mut Unifier, a: &Formula, b: &Formula) -> Result<(), UnifyFailure> {
    let (pa, pb) = match (a.predicate(), b.predicate()) {
        (Some(pa), Some(pb)) => (pa, pb),
        _ => return Err(UnifyFailure::Clash("non-atom".into(), "non-atom".into())),
    };
    if pa.0 != pb.0 {
        return Err(UnifyFailure::Clash(pa.0.to_owned(), pb.0.to_owned()));
    }
    if pa.1 != pb.1 {
        return Err(UnifyFailure::Arity(pa.0.to_owned()));
    }
    let xs = a.atom_args().expect("atom");
    let ys = b.atom_args().expect("atom");
    for (x, y) in xs.into_iter().zip(ys) {
        u.unify(x, y)?;
    }
    Ok(())
}

/// Unifies two literals: same polarity and unifiable atoms.
pub fn unify_literals(a: &Formula, b: &Formula, mode: VarMode) -> Option<Substitution> {
    let (sa, aa) = a.as_literal()?;
    let (sb, ab) = b.as_literal()?;
    if sa != sb {
        return None;
    }
    unify_atoms(aa, ab, mode).ok()
}

/// One-way matching: named variables of `pattern` bind, `target` is taken
/// as is (its variables and metavariables are rigid).
pub fn match_term(pattern: &Term, target: &Term, s: &mut Substitution) -> bool {
    match pattern {
        Term::Var(x) => {
            let k = VarKey::Var(x.clone());
            match s.get(&k) {
                Some(bound) => alpha_equal(bound, target),
                None => {
                    s.insert(k, target.clone());
                    true
                }
            }
        }
        Term::Meta(_) => pattern == target,
        Term::App(f, xs) => match target {
            Term::App(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| match_term(x, y, s))
            }
            _ => false,
        },
        Term::Eps(..) => alpha_equal(&pattern.apply(s), target),
    }
}

/// One-way matching of literal patterns.
pub fn match_literal(pattern: &Formula, target: &Formula) -> Option<Substitution> {
    let (sp, ap) = pattern.as_literal()?;
    let (st, at) = target.as_literal()?;
    if sp != st || ap.predicate() != at.predicate() {
        return None;
    }
    let mut s = Substitution::new();
    let xs = ap.atom_args()?;
    let ys = at.atom_args()?;
    xs.into_iter().zip(ys).all(|(x, y)| match_term(x, y, &mut s)).then_some(s)
}
