use std::collections::BTreeSet;
use std::time::Instant;

use super::branch::Branch;
use super::instantiate::instantiation_candidates;
use super::rules::{class_candidates, useful, Candidate, Class, Workspace, CLASSES};
use super::{HypId, ProofNode, ProofResult, ProofTree, SearchConfig, Stats};
use crate::compiler::Theory;
use crate::logic::Formula;

const FIRST_ROUND_BUDGET: usize = 256;
const STACK_SIZE: usize = 512 * 1024 * 1024;

enum Failure {
    /// A branch saturated without closing.
    Open,
    Budget,
    Timeout,
}

/// A proved subtree and the hypotheses its rules reference.
struct Proved {
    node: ProofNode,
    used: BTreeSet<HypId>,
}

struct Round<'a, 't> {
    ws: Workspace<'t>,
    cfg: &'a SearchConfig,
    budget: usize,
    inst_limit: usize,
    deadline: Instant,
    stats: Stats,
    limited: bool,
}

impl Round<'_, '_> {
    fn next(&mut self, b: &Branch) -> Option<Candidate> {
        for class in CLASSES {
            let cands = if class == Class::Instantiation {
                let cs = instantiation_candidates(&mut self.ws, b, self.inst_limit);
                if cs.is_empty() && has_instantiation_sources_at_limit(b, self.inst_limit) {
                    self.limited = true;
                }
                cs
            } else {
                class_candidates(&mut self.ws, b, class, self.cfg.cut_enabled)
            };
            if let Some(c) = cands.into_iter().find(|c| useful(b, &c.inst)) {
                return Some(c);
            }
        }
        None
    }

    fn prove(&mut self, b: &Branch) -> Result<Proved, Failure> {
        if Instant::now() >= self.deadline {
            return Err(Failure::Timeout);
        }
        if self.stats.rule_applications >= self.budget {
            self.limited = true;
            return Err(Failure::Budget);
        }
        self.stats.branches_explored += 1;
        let Some(c) = self.next(b) else { return Err(Failure::Open) };
        self.stats.rule_applications += 1;
        let mut used: BTreeSet<HypId> = c.inst.principal.iter().copied().collect();
        let mut children = Vec::with_capacity(c.inst.children.len());
        for (i, add) in c.inst.children.iter().enumerate() {
            let fresh = b.new_formulas(add);
            let mut child = b.extend(add);
            for &(h, k) in c.consume.iter().chain(&c.child_consume[i]) {
                child.consume(h, k);
            }
            if let Some((m, origin)) = c.meta {
                child.record_meta(m, origin);
            }
            if let Some(o) = c.origin {
                child.record_instance(o);
            }
            let proved = self.prove(&child)?;
            if fresh.iter().all(|h| !proved.used.contains(h)) {
                return Ok(proved);
            }
            used.extend(proved.used.iter().copied());
            children.push(proved.node);
        }
        Ok(Proved {
            node: ProofNode { hyps: Vec::new(), applied: c.inst, children },
            used,
        })
    }
}

fn has_instantiation_sources_at_limit(b: &Branch, limit: usize) -> bool {
    b.metavar_origins().any(|(_, o)| b.instance_count(super::InstOrigin::Gamma(o)) >= limit)
}

/// Fills in each node's branch formulas, starting from `initial`.
fn annotate(node: &mut ProofNode, branch: &[HypId]) {
    node.hyps = branch.to_vec();
    let additions = node.applied.children.clone();
    for (child, add) in node.children.iter_mut().zip(additions) {
        let mut b = branch.to_vec();
        for h in add {
            if !b.contains(&h) {
                b.push(h);
            }
        }
        annotate(child, &b);
    }
}

/// Searches for a closed tableau for `¬conjecture` together with the
/// theory's residual axioms. The budget on rule applications doubles from
/// round to round up to the configured maximum.
pub fn prove(theory: &Theory, conjecture: &Formula, cfg: &SearchConfig) -> ProofResult {
    let theory = theory.clone();
    let conjecture = conjecture.clone();
    let cfg = cfg.clone();
    std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || prove_inline(&theory, &conjecture, &cfg))
        .expect("spawn search thread")
        .join()
        .expect("search thread panicked")
}

fn prove_inline(theory: &Theory, conjecture: &Formula, cfg: &SearchConfig) -> ProofResult {
    let start = Instant::now();
    let deadline = start + cfg.timeout;
    let mut total = Stats::default();
    let mut budget = FIRST_ROUND_BUDGET.min(cfg.max_rule_applications.max(1));
    let mut round_no = 1;
    loop {
        let mut ws = Workspace::new(theory);
        let goal = ws.hyps.intern(Formula::not(conjecture.clone()));
        let mut initial = vec![goal];
        for af in &theory.residual_axioms {
            let h = ws.hyps.intern(af.formula.clone());
            if !initial.contains(&h) {
                initial.push(h);
            }
        }
        let branch = Branch::new(initial.iter().copied());
        let remaining = cfg.max_rule_applications.saturating_sub(total.rule_applications);
        if remaining == 0 {
            return ProofResult::Exhausted(total);
        }
        let mut round = Round {
            ws,
            cfg,
            budget: budget.min(remaining),
            inst_limit: cfg.instantiation_limit.max(1) * round_no,
            deadline,
            stats: Stats::default(),
            limited: false,
        };
        let outcome = round.prove(&branch);
        total.rule_applications += round.stats.rule_applications;
        total.branches_explored += round.stats.branches_explored;
        total.rounds = round_no;
        total.wall_time = start.elapsed();
        match outcome {
            Ok(proved) => {
                let mut root = proved.node;
                annotate(&mut root, &initial);
                let tree = ProofTree { root, hyps: round.ws.hyps, goal, initial };
                return ProofResult::Proof(tree, total);
            }
            Err(Failure::Timeout) => return ProofResult::Timeout(total),
            Err(Failure::Open) if !round.limited => return ProofResult::Exhausted(total),
            Err(_) => {
                if budget >= cfg.max_rule_applications {
                    return ProofResult::Exhausted(total);
                }
                budget = (budget * 2).min(cfg.max_rule_applications);
                round_no += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::compiler::{build_theory, BuildOptions};
    use crate::engine::{validate, RuleKind};
    use crate::tptp::parse_problem;

    fn run(text: &str) -> (ProofResult, Theory) {
        let p = parse_problem(text, Path::new("t.p")).unwrap();
        let t = build_theory(&p, "t", BuildOptions::default());
        let goal = p.conjecture().unwrap().formula.clone();
        let r = prove(&t, &goal, &SearchConfig::default());
        if let ProofResult::Proof(tree, _) = &r {
            validate(tree, &t).unwrap();
        }
        (r, t)
    }

    fn first_rule(r: &ProofResult) -> RuleKind {
        r.proof().unwrap().root.applied.rule.clone()
    }

    #[test]
    fn unprovable_atom_is_exhausted() {
        let (r, _) = run("fof(g, conjecture, p).");
        assert!(matches!(r, ProofResult::Exhausted(_)));
    }

    #[test]
    fn excluded_middle() {
        let (r, _) = run("fof(g, conjecture, p | ~p).");
        assert!(r.is_proof());
    }

    #[test]
    fn reflexivity_closes_immediately() {
        let (r, _) = run("fof(g, conjecture, a = a).");
        assert_eq!(first_rule(&r), RuleKind::CloseRefl);
        assert_eq!(r.stats().rule_applications, 1);
    }

    #[test]
    fn symmetry_of_equality() {
        let (r, _) = run("fof(h, axiom, a = b). fof(g, conjecture, b = a).");
        assert!(r.is_proof());
    }

    #[test]
    fn transitivity_of_equality() {
        let (r, _) = run("fof(h1, axiom, a = b). fof(h2, axiom, b = c). fof(g, conjecture, a = c).");
        assert!(r.is_proof());
    }

    #[test]
    fn congruence_through_predicate() {
        let (r, _) = run("fof(h1, axiom, a = b). fof(g, conjecture, q(a) => q(b)).");
        assert!(r.is_proof());
    }

    #[test]
    fn congruence_through_function() {
        let (r, _) = run("fof(h1, axiom, a = b). fof(g, conjecture, f(a) = f(b)).");
        assert!(r.is_proof());
    }

    #[test]
    fn universal_instantiation() {
        let (r, _) = run("fof(h1, axiom, ![X]: (p(X) => q(X))). fof(h2, axiom, p(c)). fof(g, conjecture, q(c)).");
        assert!(r.is_proof());
    }

    #[test]
    fn existential_witness() {
        let (r, _) = run("fof(h, axiom, ![X]: p(X)). fof(g, conjecture, ?[Y]: p(Y)).");
        assert!(r.is_proof());
    }

    #[test]
    fn invalid_first_order_is_not_proved() {
        let (r, _) = run("fof(h, axiom, ?[X]: p(X)). fof(g, conjecture, ![Y]: p(Y)).");
        assert!(!r.is_proof());
    }

    #[test]
    fn search_is_deterministic() {
        let text = "fof(h1, axiom, ![X]: (p(X) => q(X))). fof(h2, axiom, p(c) | p(d)). fof(g, conjecture, q(c) | q(d)).";
        let (a, _) = run(text);
        let (b, _) = run(text);
        assert_eq!(a.proof().unwrap().root, b.proof().unwrap().root);
    }

    #[test]
    fn budget_limits_applications() {
        let p = parse_problem("fof(h, axiom, ![X]: (p(X) => p(f(X)))). fof(g, conjecture, p(a)).", Path::new("t.p")).unwrap();
        let t = build_theory(&p, "t", BuildOptions::default());
        let cfg = SearchConfig { max_rule_applications: 50, ..SearchConfig::default() };
        let r = prove(&t, &p.conjecture().unwrap().formula, &cfg);
        assert!(!r.is_proof());
        assert!(r.stats().rule_applications <= 50);
    }
}
