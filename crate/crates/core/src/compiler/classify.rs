//! Shape analysis of theory axioms and their proposition rewrite rules.

use std::fmt;

use crate::logic::Formula;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularReason {
    /// The matrix matches none of the eligible forms.
    Shape,
    /// The designated atomic side is an equality.
    EqualityLhs,
    /// A generated rule's trigger unifies with an earlier rule's trigger.
    Overlap { with: String },
    /// Declares reflexivity, symmetry or transitivity of a relation.
    RelationProperty,
}

impl fmt::Display for RegularReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularReason::Shape => write!(f, "shape"),
            RegularReason::EqualityLhs => write!(f, "equality-lhs"),
            RegularReason::Overlap { with } => write!(f, "overlap with {with}"),
            RegularReason::RelationProperty => write!(f, "relation property"),
        }
    }
}

/// Eligible axiom forms, on the matrix left after stripping `∀x̄`.
#[derive(Clone, Debug, PartialEq)]
pub enum AxiomClassification {
    /// `P ⇔ φ`
    EquivForm { atom: Formula, body: Formula },
    /// `P ⇒ P′`
    AtomicImplForm { premise: Formula, conclusion: Formula },
    /// `P ⇒ φ`. With `contrapositive` set, the axiom was written
    /// `φ′ ⇒ ¬P` and is read as `P ⇒ ¬φ′`.
    ImplFormLeftAtomic { atom: Formula, body: Formula, contrapositive: bool },
    /// `φ ⇒ P`
    ImplFormRightAtomic { body: Formula, atom: Formula },
    /// `P`
    UniversalAtomForm { atom: Formula },
    Regular(RegularReason),
}

impl AxiomClassification {
    pub fn is_regular(&self) -> bool {
        matches!(self, AxiomClassification::Regular(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AxiomClassification::EquivForm { .. } => "EquivForm",
            AxiomClassification::AtomicImplForm { .. } => "AtomicImplForm",
            AxiomClassification::ImplFormLeftAtomic { .. } => "ImplFormLeftAtomic",
            AxiomClassification::ImplFormRightAtomic { .. } => "ImplFormRightAtomic",
            AxiomClassification::UniversalAtomForm { .. } => "UniversalAtomForm",
            AxiomClassification::Regular(_) => "Regular",
        }
    }
}

fn plain_atom(f: &Formula) -> bool {
    matches!(f, Formula::Atom(..))
}

fn is_eq(f: &Formula) -> bool {
    matches!(f, Formula::Eq(..))
}

pub fn classify_axiom(f: &Formula) -> AxiomClassification {
    use AxiomClassification::*;
    let (_, matrix) = f.strip_forall();
    match matrix {
        Formula::Equiv(l, r) => {
            if plain_atom(l) {
                EquivForm { atom: (**l).clone(), body: (**r).clone() }
            } else if plain_atom(r) {
                EquivForm { atom: (**r).clone(), body: (**l).clone() }
            } else if is_eq(l) || is_eq(r) {
                Regular(RegularReason::EqualityLhs)
            } else {
                Regular(RegularReason::Shape)
            }
        }
        Formula::Implies(a, b) => {
            if a.is_atomic() && b.is_atomic() {
                if is_eq(a) || is_eq(b) {
                    return Regular(RegularReason::EqualityLhs);
                }
                return AtomicImplForm { premise: (**a).clone(), conclusion: (**b).clone() };
            }
            if let Formula::Not(q) = &**b {
                if plain_atom(q) {
                    return ImplFormLeftAtomic {
                        atom: (**q).clone(),
                        body: a.negate(),
                        contrapositive: true,
                    };
                }
            }
            if a.is_atomic() {
                if is_eq(a) {
                    return Regular(RegularReason::EqualityLhs);
                }
                return ImplFormLeftAtomic { atom: (**a).clone(), body: (**b).clone(), contrapositive: false };
            }
            if b.is_atomic() {
                if is_eq(b) {
                    return Regular(RegularReason::EqualityLhs);
                }
                return ImplFormRightAtomic { body: (**a).clone(), atom: (**b).clone() };
            }
            Regular(RegularReason::Shape)
        }
        Formula::Atom(..) => UniversalAtomForm { atom: matrix.clone() },
        Formula::Eq(..) => Regular(RegularReason::EqualityLhs),
        _ => Regular(RegularReason::Shape),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

/// `name : lhs → rhs`, standing for `∀x̄ (lhs ⇒ rhs)` oriented as a rule.
#[derive(Clone, Debug, PartialEq)]
pub struct PropositionRewriteRule {
    pub name: String,
    pub axiom: String,
    pub polarity: Polarity,
    /// An atom or a negated atom.
    pub lhs: Formula,
    pub rhs: Formula,
    pub params: Vec<String>,
}

impl PropositionRewriteRule {
    fn new(name: String, axiom: &str, polarity: Polarity, lhs: Formula, rhs: Formula) -> Self {
        let mut params: Vec<String> = lhs.free_vars().vars.into_iter().collect();
        for v in rhs.free_vars().vars {
            if !params.contains(&v) {
                params.push(v);
            }
        }
        PropositionRewriteRule { name, axiom: axiom.to_owned(), polarity, lhs, rhs, params }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("axiom `{0}` is regular and has no rewrite rules")]
pub struct RegularAxiom(pub String);

pub fn derive_prrs(
    c: &AxiomClassification,
    name: &str,
) -> Result<Vec<PropositionRewriteRule>, RegularAxiom> {
    use AxiomClassification::*;
    use Polarity::*;
    let prr = PropositionRewriteRule::new;
    Ok(match c {
        EquivForm { atom, body } => vec![
            prr(name.to_owned(), name, Positive, atom.clone(), body.clone()),
            prr(format!("not_{name}"), name, Negative, atom.negate(), body.negate()),
        ],
        AtomicImplForm { premise, conclusion } => vec![
            prr(name.to_owned(), name, Positive, premise.clone(), conclusion.clone()),
            prr(name.to_owned(), name, Positive, conclusion.negate(), premise.negate()),
        ],
        ImplFormLeftAtomic { atom, body, contrapositive } => {
            let rule_name = if *contrapositive { format!("{name}ctrp") } else { name.to_owned() };
            vec![prr(rule_name, name, Positive, atom.clone(), body.clone())]
        }
        ImplFormRightAtomic { body, atom } => {
            vec![prr(name.to_owned(), name, Positive, atom.negate(), body.negate())]
        }
        UniversalAtomForm { atom } => {
            vec![prr(name.to_owned(), name, Positive, atom.negate(), Formula::False)]
        }
        Regular(_) => return Err(RegularAxiom(name.to_owned())),
    })
}
