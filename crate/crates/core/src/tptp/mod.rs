//! Reader for TPTP first-order (`fof`) problem files.

mod includes;
mod lexer;
mod parser;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use crate::logic::Formula;

pub use includes::{resolve_includes, IncludeResolver};
pub use parser::parse_problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Axiom,
    Hypothesis,
    Conjecture,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Axiom => "axiom",
            Role::Hypothesis => "hypothesis",
            Role::Conjecture => "conjecture",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub file: String,
    pub line: usize,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedFormula {
    pub name: String,
    pub role: Role,
    pub formula: Formula,
    pub source: Source,
}

impl fmt::Display for AnnotatedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fof({}, {}, {}).", self.name, self.role, self.formula)
    }
}

/// A statement of a problem file, in declaration order.
#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Formula(AnnotatedFormula),
    Include { path: String, source: Source },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Problem {
    pub origin: PathBuf,
    pub statements: Vec<Statement>,
    pub include_paths: Vec<PathBuf>,
}

impl Problem {
    pub fn formulas(&self) -> impl Iterator<Item = &AnnotatedFormula> {
        self.statements.iter().filter_map(|s| match s {
            Statement::Formula(af) => Some(af),
            Statement::Include { .. } => None,
        })
    }

    pub fn axioms(&self) -> impl Iterator<Item = &AnnotatedFormula> {
        self.formulas().filter(|af| af.role != Role::Conjecture)
    }

    pub fn conjecture(&self) -> Option<&AnnotatedFormula> {
        self.formulas().find(|af| af.role == Role::Conjecture)
    }

    pub fn has_includes(&self) -> bool {
        self.statements.iter().any(|s| matches!(s, Statement::Include { .. }))
    }

    /// Renders the problem back as fof text.
    pub fn to_tptp(&self) -> String {
        let mut out = String::new();
        for s in &self.statements {
            match s {
                Statement::Formula(af) => out.push_str(&af.to_string()),
                Statement::Include { path, .. } => out.push_str(&format!("include('{path}').")),
            }
            out.push('\n');
        }
        out
    }

    /// Checks the problem-level invariants: unique names, at most one
    /// conjecture, one arity per symbol.
    pub fn validate(&self) -> Result<(), ParseError> {
        let mut names: HashMap<&str, &Source> = HashMap::new();
        let mut conjecture: Option<&AnnotatedFormula> = None;
        let mut arities = ArityTable::default();
        for af in self.formulas() {
            if let Some(prev) = names.insert(&af.name, &af.source) {
                return Err(ParseError::DuplicateName {
                    name: af.name.clone(),
                    first: prev.to_string(),
                    second: af.source.to_string(),
                });
            }
            if af.role == Role::Conjecture {
                if let Some(prev) = conjecture {
                    return Err(ParseError::MultipleConjectures {
                        first: prev.name.clone(),
                        second: af.name.clone(),
                    });
                }
                conjecture = Some(af);
            }
            arities.check_formula(&af.formula, &af.source)?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{file}:{line}:{col}: syntax error: {message}{}", fmt_expected(.expected))]
    Syntax {
        file: String,
        line: usize,
        col: usize,
        message: String,
        expected: Vec<String>,
    },
    #[error("{source_pos}: symbol `{symbol}` used with arity {second} but earlier with arity {first}")]
    Arity {
        symbol: String,
        first: usize,
        second: usize,
        source_pos: String,
    },
    #[error("duplicate formula name `{name}` ({first} and {second})")]
    DuplicateName { name: String, first: String, second: String },
    #[error("more than one conjecture: `{first}` and `{second}`")]
    MultipleConjectures { first: String, second: String },
    #[error("{source_pos}: included file `{file}` not found (searched: {})", .searched.join(", "))]
    IncludeNotFound {
        file: String,
        searched: Vec<String>,
        source_pos: String,
    },
    #[error("include cycle: {}", .cycle.join(" -> "))]
    IncludeCycle { cycle: Vec<String> },
    #[error("cannot read {path}: {err}")]
    Io { path: String, err: std::io::Error },
}

fn fmt_expected(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", expected.join(" "))
    }
}

#[derive(Default)]
struct ArityTable {
    functions: HashMap<String, usize>,
    predicates: HashMap<String, usize>,
}

impl ArityTable {
    fn check_formula(&mut self, f: &Formula, src: &Source) -> Result<(), ParseError> {
        use crate::logic::Term;
        fn term(tab: &mut ArityTable, t: &Term, src: &Source) -> Result<(), ParseError> {
            match t {
                Term::App(g, args) => {
                    record(&mut tab.functions, g, args.len(), src)?;
                    args.iter().try_for_each(|a| term(tab, a, src))
                }
                Term::Eps(_, body) => tab.check_formula(body, src),
                _ => Ok(()),
            }
        }
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom(p, args) => {
                record(&mut self.predicates, p, args.len(), src)?;
                args.iter().try_for_each(|a| term(self, a, src))
            }
            Formula::Eq(l, r) => {
                term(self, l, src)?;
                term(self, r, src)
            }
            Formula::Not(a) => self.check_formula(a, src),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Equiv(a, b) => {
                self.check_formula(a, src)?;
                self.check_formula(b, src)
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => self.check_formula(b, src),
        }
    }
}

fn record(
    table: &mut HashMap<String, usize>,
    sym: &str,
    arity: usize,
    src: &Source,
) -> Result<(), ParseError> {
    match table.get(sym) {
        Some(&first) if first != arity => Err(ParseError::Arity {
            symbol: sym.to_owned(),
            first,
            second: arity,
            source_pos: src.to_string(),
        }),
        Some(_) => Ok(()),
        None => {
            table.insert(sym.to_owned(), arity);
            Ok(())
        }
    }
}
