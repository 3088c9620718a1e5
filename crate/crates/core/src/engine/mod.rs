//! Depth-first, non-destructive tableau proof search.

mod branch;
mod check;
mod instantiate;
mod rules;
mod search;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::time::Duration;

use crate::logic::{Canonical, Formula, Substitution};

pub use branch::{Branch, InstOrigin, RuleKey};
pub use check::{validate, ValidationError};
pub use instantiate::{propose_instantiations, Proposal};
pub use rules::{applicable_rules, detect_closure};
pub use search::prove;

/// Index of an interned formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HypId(pub u32);

impl fmt::Display for HypId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{}", self.0)
    }
}

/// Append-only table of formulas, identified up to alpha-equivalence.
#[derive(Clone, Debug, Default)]
pub struct HypTable {
    formulas: Vec<Formula>,
    index: HashMap<Formula, HypId>,
}

impl HypTable {
    pub fn intern(&mut self, f: Formula) -> HypId {
        let key = f.canonical();
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = HypId(self.formulas.len() as u32);
        self.formulas.push(f);
        self.index.insert(key, id);
        id
    }

    pub fn lookup(&self, f: &Formula) -> Option<HypId> {
        self.index.get(&f.canonical()).copied()
    }

    pub fn get(&self, id: HypId) -> &Formula {
        &self.formulas[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    CloseFalse,
    CloseNotTrue,
    Close,
    CloseRefl,
    CloseSym,
    NotNot,
    And,
    NotOr,
    NotImply,
    Or,
    NotAnd,
    Imply,
    Equiv,
    NotEquiv,
    Ex,
    NotAll,
    AllMeta,
    NotExMeta,
    AllInst,
    NotExInst,
    Pred,
    Fun,
    Sym,
    NotRefl,
    Trans,
    TransSym,
    TransEq,
    TransEqSym,
    Cut,
    /// A compiled rule, by index into the theory's rule list.
    Super { rule: usize, name: String, inst: bool },
}

impl RuleKind {
    pub fn is_closure(&self) -> bool {
        matches!(
            self,
            RuleKind::CloseFalse | RuleKind::CloseNotTrue | RuleKind::Close | RuleKind::CloseRefl | RuleKind::CloseSym
        )
    }

    pub fn is_beta(&self) -> bool {
        matches!(self, RuleKind::Or | RuleKind::NotAnd | RuleKind::Imply)
    }

    pub fn is_gamma(&self) -> bool {
        matches!(self, RuleKind::AllMeta | RuleKind::NotExMeta | RuleKind::AllInst | RuleKind::NotExInst)
    }

    pub fn is_relational(&self) -> bool {
        matches!(
            self,
            RuleKind::Pred
                | RuleKind::Fun
                | RuleKind::Sym
                | RuleKind::NotRefl
                | RuleKind::Trans
                | RuleKind::TransSym
                | RuleKind::TransEq
                | RuleKind::TransEqSym
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleInstance {
    pub rule: RuleKind,
    pub principal: Vec<HypId>,
    /// One list of formulas per child branch; empty for closures.
    pub children: Vec<Vec<HypId>>,
    pub instantiation: Option<Substitution>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofNode {
    /// Branch formulas at this node, in insertion order.
    pub hyps: Vec<HypId>,
    pub applied: RuleInstance,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Hypotheses referenced as principals anywhere in the subtree.
    pub fn used(&self) -> BTreeSet<HypId> {
        let mut out = BTreeSet::new();
        self.collect_used(&mut out);
        out
    }

    fn collect_used(&self, out: &mut BTreeSet<HypId>) {
        out.extend(self.applied.principal.iter().copied());
        for c in &self.children {
            c.collect_used(out);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }

    pub fn leaves(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(ProofNode::leaves).sum()
        }
    }

    pub fn for_each(&self, f: &mut impl FnMut(&ProofNode)) {
        f(self);
        for c in &self.children {
            c.for_each(f);
        }
    }
}

/// A closed tableau together with the formulas its ids refer to.
#[derive(Clone, Debug)]
pub struct ProofTree {
    pub root: ProofNode,
    pub hyps: HypTable,
    /// Id of the negated conjecture.
    pub goal: HypId,
    pub initial: Vec<HypId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_rule_applications: usize,
    pub timeout: Duration,
    pub cut_enabled: bool,
    /// γ-inst applications per quantified formula and branch, in the
    /// first deepening round.
    pub instantiation_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_rule_applications: 10_000,
            timeout: Duration::from_secs(30),
            cut_enabled: false,
            instantiation_limit: 2,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub rule_applications: usize,
    pub branches_explored: usize,
    pub rounds: usize,
    pub wall_time: Duration,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule applications: {}, branches: {}, rounds: {}, time: {:.3}s",
            self.rule_applications,
            self.branches_explored,
            self.rounds,
            self.wall_time.as_secs_f64()
        )
    }
}

#[derive(Clone, Debug)]
pub enum ProofResult {
    Proof(ProofTree, Stats),
    Exhausted(Stats),
    Timeout(Stats),
}

impl ProofResult {
    pub fn is_proof(&self) -> bool {
        matches!(self, ProofResult::Proof(..))
    }

    pub fn stats(&self) -> &Stats {
        match self {
            ProofResult::Proof(_, s) | ProofResult::Exhausted(s) | ProofResult::Timeout(s) => s,
        }
    }

    pub fn proof(&self) -> Option<&ProofTree> {
        match self {
            ProofResult::Proof(t, _) => Some(t),
            _ => None,
        }
    }
}
