//! Tableau proof search for first-order logic with equality, extended with
//! superdeduction rules compiled from the axioms of a theory.
//!
//! The pipeline is: [`tptp`] parses a problem, [`compiler`] turns eligible
//! axioms into [`compiler::SuperRule`]s, [`engine`] searches for a closed
//! tableau and [`render`] prints the proof as a numbered trace.

pub mod compiler;
pub mod engine;
pub mod logic;
pub mod render;
pub mod tptp;

pub use logic::{Formula, MetaId, Substitution, Term};
