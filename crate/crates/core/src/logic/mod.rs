//! Terms, formulas, substitution, alpha-equivalence and unification.

mod display;
pub mod subst;
pub mod term;
pub mod unify;

pub use subst::{alpha_equal, fresh_name, substitute, Canonical, Subst, Substitution, VarKey};
pub use term::{FreeVars, Formula, MetaId, Term};
pub use unify::{
    match_literal, match_term, unify_atoms, unify_literals, unify_terms, UnifyFailure, VarMode,
};

/// Free variables of a formula, metavariables reported separately.
pub fn free_variables(f: &Formula) -> FreeVars {
    f.free_vars()
}
