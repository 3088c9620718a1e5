use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::classify::{classify_axiom, derive_prrs, AxiomClassification, RegularReason};
use super::saturate::{compile_superrule, SuperRule};
use crate::logic::{alpha_equal, unify_atoms, Formula, Subst, Substitution, Term, VarMode};
use crate::tptp::{AnnotatedFormula, Problem};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RelationFlags {
    pub reflexive: bool,
    pub symmetric: bool,
    pub transitive: bool,
}

/// Registered properties of binary predicates. Equality is always
/// reflexive, symmetric and transitive.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationProperties {
    flags: BTreeMap<String, RelationFlags>,
}

pub const EQUALITY: &str = "=";

impl RelationProperties {
    pub fn get(&self, pred: &str) -> RelationFlags {
        if pred == EQUALITY {
            return RelationFlags { reflexive: true, symmetric: true, transitive: true };
        }
        self.flags.get(pred).copied().unwrap_or_default()
    }

    pub fn set(&mut self, pred: &str, update: impl FnOnce(&mut RelationFlags)) {
        update(self.flags.entry(pred.to_owned()).or_default());
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, RelationFlags)> {
        self.flags.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AxiomOutcome {
    /// Indices into [`Theory::rules`].
    Compiled { classification: AxiomClassification, rules: Vec<usize> },
    Residual { reason: RegularReason },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theory {
    pub tag: String,
    pub rules: Vec<SuperRule>,
    pub residual_axioms: Vec<AnnotatedFormula>,
    pub relations: RelationProperties,
    /// Per analyzed axiom, in declaration order.
    pub outcomes: Vec<(String, AxiomOutcome)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub detect_relations: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { detect_relations: true }
    }
}

impl Theory {
    pub fn empty(tag: impl Into<String>) -> Theory {
        Theory {
            tag: tag.into(),
            rules: Vec::new(),
            residual_axioms: Vec::new(),
            relations: RelationProperties::default(),
            outcomes: Vec::new(),
        }
    }

    pub fn outcome(&self, axiom: &str) -> Option<&AxiomOutcome> {
        self.outcomes.iter().find(|(n, _)| n == axiom).map(|(_, o)| o)
    }

    /// Text listing of the compiled rules and the residual axioms.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "% theory {}: {} rules, {} residual axioms", self.tag, self.rules.len(), self.residual_axioms.len());
        let _ = writeln!(out, "% overlap check: rule triggers of equal polarity, earlier rules win");
        let _ = writeln!(out, "% derived negated relation atoms are not reused by trans rules, except equalities");
        for r in &self.rules {
            let _ = writeln!(out, "Extension/{}/{}", self.tag, r);
        }
        for (name, o) in &self.outcomes {
            if let AxiomOutcome::Residual { reason } = o {
                let _ = writeln!(out, "residual {name} ({reason})");
            }
        }
        for (p, f) in self.relations.iter() {
            let _ = writeln!(
                out,
                "relation {p}:{}{}{}",
                if f.reflexive { " reflexive" } else { "" },
                if f.symmetric { " symmetric" } else { "" },
                if f.transitive { " transitive" } else { "" }
            );
        }
        out
    }
}

/// Renames every named variable of a trigger apart from another trigger's.
fn rename_apart(f: &Formula, suffix: &str) -> Formula {
    let mut s = Substitution::new();
    for v in f.free_vars().vars {
        s = s.then(&Substitution::var(v.clone(), Term::var(format!("{v}{suffix}"))));
    }
    f.apply(&s)
}

/// Whether two rule triggers can fire on a common literal.
pub fn triggers_overlap(a: &Formula, b: &Formula) -> bool {
    let (Some((pa, aa)), Some((pb, ab))) = (a.as_literal(), b.as_literal()) else {
        return false;
    };
    if pa != pb {
        return false;
    }
    let ab = rename_apart(ab, "'");
    unify_atoms(aa, &ab, VarMode::Schema).is_ok()
}

/// Recognizes `∀x R(x,x)`, `∀x,y (R(x,y) ⇒ R(y,x))` and
/// `∀x,y,z (R(x,y) ∧ R(y,z) ⇒ R(x,z))`.
fn relation_property(f: &Formula) -> Option<(String, fn(&mut RelationFlags))> {
    let (_, matrix) = f.strip_forall();
    let pred = match matrix {
        Formula::Atom(p, args) if args.len() == 2 => p.clone(),
        Formula::Implies(a, _) => match &**a {
            Formula::Atom(p, args) if args.len() == 2 => p.clone(),
            Formula::And(b, _) => match &**b {
                Formula::Atom(p, args) if args.len() == 2 => p.clone(),
                _ => return None,
            },
            _ => return None,
        },
        _ => return None,
    };
    let r = |x: &str, y: &str| Formula::atom(pred.clone(), vec![Term::var(x), Term::var(y)]);
    let refl = Formula::forall("X", r("X", "X"));
    let sym = Formula::forall("X", Formula::forall("Y", Formula::implies(r("X", "Y"), r("Y", "X"))));
    let trans = Formula::forall(
        "X",
        Formula::forall(
            "Y",
            Formula::forall("Z", Formula::implies(Formula::and(r("X", "Y"), r("Y", "Z")), r("X", "Z"))),
        ),
    );
    if alpha_equal(f, &refl) {
        Some((pred, |fl| fl.reflexive = true))
    } else if alpha_equal(f, &sym) {
        Some((pred, |fl| fl.symmetric = true))
    } else if alpha_equal(f, &trans) {
        Some((pred, |fl| fl.transitive = true))
    } else {
        None
    }
}

/// Analyzes the axioms and hypotheses of `p` in declaration order.
pub fn build_theory(p: &Problem, tag: &str, opts: BuildOptions) -> Theory {
    let mut theory = Theory::empty(tag);
    for af in p.axioms() {
        if opts.detect_relations {
            if let Some((pred, update)) = relation_property(&af.formula) {
                theory.relations.set(&pred, update);
                theory.residual_axioms.push(af.clone());
                theory
                    .outcomes
                    .push((af.name.clone(), AxiomOutcome::Residual { reason: RegularReason::RelationProperty }));
                continue;
            }
        }
        let classification = classify_axiom(&af.formula);
        let outcome = match derive_prrs(&classification, &af.name) {
            Err(_) => {
                let AxiomClassification::Regular(reason) = classification else { unreachable!() };
                AxiomOutcome::Residual { reason }
            }
            Ok(prrs) => {
                let compiled: Vec<SuperRule> = prrs.iter().map(compile_superrule).collect();
                let clash = compiled.iter().enumerate().find_map(|(i, r)| {
                    theory
                        .rules
                        .iter()
                        .chain(&compiled[..i])
                        .find(|earlier| triggers_overlap(&earlier.trigger, &r.trigger))
                        .map(|earlier| format!("{} of {}", earlier.name, earlier.axiom))
                });
                match clash {
                    Some(with) => AxiomOutcome::Residual { reason: RegularReason::Overlap { with } },
                    None => {
                        let start = theory.rules.len();
                        theory.rules.extend(compiled);
                        AxiomOutcome::Compiled { classification, rules: (start..theory.rules.len()).collect() }
                    }
                }
            }
        };
        if matches!(outcome, AxiomOutcome::Residual { .. }) {
            theory.residual_axioms.push(af.clone());
        }
        theory.outcomes.push((af.name.clone(), outcome));
    }
    theory
}
