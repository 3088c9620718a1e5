use std::collections::{BTreeMap, HashMap, HashSet};

use super::HypId;
use crate::logic::MetaId;

/// Rule families tracked in a branch's consumed set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKey {
    Analytic,
    GammaMeta,
    /// Compiled rule, by index.
    Super(usize),
    /// Negative principal of trans, transsym, transeq and transeqsym.
    TransFamily,
}

/// Where a γ-inst or R_inst instance comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstOrigin {
    Gamma(HypId),
    Rule(usize, HypId),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Branch {
    formulas: Vec<HypId>,
    present: HashSet<HypId>,
    consumed: HashSet<(HypId, RuleKey)>,
    metavar_origins: BTreeMap<MetaId, HypId>,
    instances: HashMap<InstOrigin, usize>,
}

impl Branch {
    pub fn new(initial: impl IntoIterator<Item = HypId>) -> Branch {
        let mut b = Branch::default();
        for h in initial {
            b.push(h);
        }
        b
    }

    fn push(&mut self, h: HypId) -> bool {
        if self.present.insert(h) {
            self.formulas.push(h);
            true
        } else {
            false
        }
    }

    pub fn formulas(&self) -> &[HypId] {
        &self.formulas
    }

    pub fn contains(&self, h: HypId) -> bool {
        self.present.contains(&h)
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn is_consumed(&self, h: HypId, key: RuleKey) -> bool {
        self.consumed.contains(&(h, key))
    }

    pub fn origin_of(&self, m: MetaId) -> Option<HypId> {
        self.metavar_origins.get(&m).copied()
    }

    pub fn metavar_origins(&self) -> impl Iterator<Item = (MetaId, HypId)> + '_ {
        self.metavar_origins.iter().map(|(m, h)| (*m, *h))
    }

    pub fn instance_count(&self, o: InstOrigin) -> usize {
        self.instances.get(&o).copied().unwrap_or(0)
    }

    /// Formulas of `add` not yet on the branch.
    pub fn new_formulas(&self, add: &[HypId]) -> Vec<HypId> {
        let mut out: Vec<HypId> = Vec::new();
        for h in add {
            if !self.contains(*h) && !out.contains(h) {
                out.push(*h);
            }
        }
        out
    }

    /// A copy of the branch extended with `add`; `self` is left untouched.
    pub fn extend(&self, add: &[HypId]) -> Branch {
        let mut b = self.clone();
        for h in add {
            b.push(*h);
        }
        b
    }

    pub fn consume(&mut self, h: HypId, key: RuleKey) {
        self.consumed.insert((h, key));
    }

    pub fn record_meta(&mut self, m: MetaId, origin: HypId) {
        self.metavar_origins.insert(m, origin);
    }

    pub fn record_instance(&mut self, o: InstOrigin) {
        *self.instances.entry(o).or_default() += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extend_leaves_parent_intact() {
        let b = Branch::new([HypId(0), HypId(1)]);
        let snapshot = b.clone();
        let c = b.extend(&[HypId(2), HypId(0)]);
        assert_eq!(b, snapshot);
        assert_eq!(c.formulas(), &[HypId(0), HypId(1), HypId(2)]);
        assert_eq!(b.new_formulas(&[HypId(1), HypId(3), HypId(3)]), vec![HypId(3)]);
    }
}
