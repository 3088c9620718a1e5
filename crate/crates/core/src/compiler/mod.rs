//! Turns eligible theory axioms into superdeduction rules.

mod classify;
mod saturate;
mod theory;

pub use classify::{
    classify_axiom, derive_prrs, AxiomClassification, Polarity, PropositionRewriteRule,
    RegularAxiom, RegularReason,
};
pub use saturate::{compile_superrule, SuperRule};
pub use theory::{
    build_theory, triggers_overlap, AxiomOutcome, BuildOptions, RelationFlags,
    RelationProperties, Theory, EQUALITY,
};
