//! Structural soundness check of proof trees, independent of the search.

use std::collections::HashSet;

use super::rules::{binary, rel};
use super::{HypId, ProofNode, ProofTree, RuleKind};
use crate::compiler::Theory;
use crate::logic::{alpha_equal, match_literal, Canonical, Formula, Subst, Substitution, Term, VarKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("principal {0} is not on the branch")]
    MissingPrincipal(HypId),
    #[error("leaf does not satisfy its closure condition: {0:?}")]
    BadClosure(RuleKind),
    #[error("leaf closed by non-closing rule {0:?}")]
    OpenLeaf(RuleKind),
    #[error("children of {rule:?} do not follow from its principal")]
    BadChildren { rule: RuleKind },
    #[error("node records {found} children, rule has {expected}")]
    ChildCount { expected: usize, found: usize },
    #[error("recorded branch formulas differ from the reconstructed branch")]
    BranchMismatch,
}

type Children = Vec<Vec<Formula>>;

fn not(f: &Formula) -> Formula {
    Formula::not(f.clone())
}

fn neq(a: &Term, b: &Term) -> Formula {
    Formula::not(Formula::eq(a.clone(), b.clone()))
}

/// Children a built-in rule must produce from its principals, or `None`
/// when the principals do not have the rule's shape. Instantiation rules
/// return `None` and are checked separately.
fn expected(rule: &RuleKind, ps: &[&Formula], theory: &Theory) -> Option<Children> {
    use Formula::*;
    let one = |f: Formula| Some(vec![vec![f]]);
    match (rule, ps) {
        (RuleKind::NotNot, [Not(g)]) => match &**g {
            Not(p) => one((**p).clone()),
            _ => None,
        },
        (RuleKind::And, [And(p, q)]) => Some(vec![vec![(**p).clone(), (**q).clone()]]),
        (RuleKind::NotOr, [Not(g)]) => match &**g {
            Or(p, q) => Some(vec![vec![not(p), not(q)]]),
            _ => None,
        },
        (RuleKind::NotImply, [Not(g)]) => match &**g {
            Implies(p, q) => Some(vec![vec![(**p).clone(), not(q)]]),
            _ => None,
        },
        (RuleKind::Or, [Or(p, q)]) => Some(vec![vec![(**p).clone()], vec![(**q).clone()]]),
        (RuleKind::NotAnd, [Not(g)]) => match &**g {
            And(p, q) => Some(vec![vec![not(p)], vec![not(q)]]),
            _ => None,
        },
        (RuleKind::Imply, [Implies(p, q)]) => Some(vec![vec![not(p)], vec![(**q).clone()]]),
        (RuleKind::Equiv, [Equiv(p, q)]) => {
            Some(vec![vec![not(p), not(q)], vec![(**p).clone(), (**q).clone()]])
        }
        (RuleKind::NotEquiv, [Not(g)]) => match &**g {
            Equiv(p, q) => Some(vec![vec![not(p), (**q).clone()], vec![(**p).clone(), not(q)]]),
            _ => None,
        },
        (RuleKind::Ex, [Exists(x, p)]) => {
            one(p.apply(&Substitution::var(x.clone(), Term::eps(x.clone(), (**p).clone()))))
        }
        (RuleKind::NotAll, [Not(g)]) => match &**g {
            Forall(x, p) => {
                let body = not(p);
                one(body.apply(&Substitution::var(x.clone(), Term::eps(x.clone(), body.clone()))))
            }
            _ => None,
        },
        (RuleKind::Pred, [Atom(p, xs), Not(g)]) => match &**g {
            Atom(q, ys) if p == q && xs.len() == ys.len() => Some(
                xs.iter().zip(ys).filter(|(s, t)| !alpha_equal(*s, *t)).map(|(s, t)| vec![neq(s, t)]).collect(),
            ),
            _ => None,
        },
        (RuleKind::Fun, [Not(g)]) => match &**g {
            Eq(Term::App(f, xs), Term::App(h, ys)) if f == h && xs.len() == ys.len() => Some(
                xs.iter().zip(ys).filter(|(s, t)| !alpha_equal(*s, *t)).map(|(s, t)| vec![neq(s, t)]).collect(),
            ),
            _ => None,
        },
        (RuleKind::NotRefl, [n]) => {
            let (false, r, s, t) = binary(n)? else { return None };
            theory.relations.get(r).reflexive.then(|| vec![vec![neq(s, t)]])
        }
        (RuleKind::Sym | RuleKind::Trans | RuleKind::TransSym | RuleKind::TransEq | RuleKind::TransEqSym, [p, n]) => {
            let (true, r1, s, t) = binary(p)? else { return None };
            let (false, r, u, v) = binary(n)? else { return None };
            let flags = theory.relations.get(r);
            let nr = |a: &Term, b: &Term| Formula::not(rel(r, a, b));
            match rule {
                RuleKind::Sym if r1 == r && flags.symmetric => Some(vec![vec![neq(t, u)], vec![neq(s, v)]]),
                RuleKind::Trans if r1 == r && flags.transitive => {
                    Some(vec![vec![neq(u, s), nr(u, s)], vec![neq(t, v), nr(t, v)]])
                }
                RuleKind::TransSym if r1 == r && flags.transitive && flags.symmetric => {
                    Some(vec![vec![neq(v, s), nr(v, s)], vec![neq(t, u), nr(t, u)]])
                }
                RuleKind::TransEq if r1 == "=" && flags.transitive => Some(vec![
                    vec![neq(u, s), nr(u, s)],
                    vec![nr(u, s), nr(t, v)],
                    vec![neq(t, v), nr(t, v)],
                ]),
                RuleKind::TransEqSym if r1 == "=" && flags.transitive && flags.symmetric => Some(vec![
                    vec![neq(v, s), nr(v, s)],
                    vec![nr(v, s), nr(t, u)],
                    vec![neq(t, u), nr(t, u)],
                ]),
                _ => None,
            }
        }
        (RuleKind::AllMeta, [Forall(..)]) | (RuleKind::NotExMeta, [Not(_)]) => None,
        _ => None,
    }
}

fn same_children(got: &[Vec<&Formula>], want: &Children) -> bool {
    let canon = |fs: &[&Formula]| -> HashSet<Formula> { fs.iter().map(|f| f.canonical()).collect() };
    got.len() == want.len()
        && got.iter().zip(want).all(|(g, w)| canon(g) == canon(&w.iter().collect::<Vec<_>>()))
}

/// `inst` must be an instance of the γ formula `origin`.
fn gamma_instance(origin: &Formula, child: &Formula, inst: Option<&Substitution>) -> bool {
    let (x, body, negated) = match origin {
        Formula::Forall(x, p) => (x, p, false),
        Formula::Not(g) => match &**g {
            Formula::Exists(x, p) => (x, p, true),
            _ => return false,
        },
        _ => return false,
    };
    let Some(t) = inst.and_then(|s| s.get(&VarKey::Var(x.clone()))) else { return false };
    let expect = body.apply(&Substitution::var(x.clone(), t.clone()));
    let expect = if negated { Formula::not(expect) } else { expect };
    alpha_equal(&expect, child)
}

fn closure_holds(rule: &RuleKind, ps: &[&Formula], theory: &Theory) -> bool {
    match (rule, ps) {
        (RuleKind::CloseFalse, [f]) => **f == Formula::False,
        (RuleKind::CloseNotTrue, [f]) => matches!(f, Formula::Not(g) if **g == Formula::True),
        (RuleKind::Close, [p, n]) => matches!(n, Formula::Not(a) if a.is_atomic() && alpha_equal(&**a, *p)),
        (RuleKind::CloseRefl, [n]) => {
            matches!(binary(n), Some((false, r, s, t)) if theory.relations.get(r).reflexive && alpha_equal(s, t))
        }
        (RuleKind::CloseSym, [p, n]) => match (binary(p), binary(n)) {
            (Some((true, r1, a, b)), Some((false, r2, c, d))) => {
                r1 == r2 && theory.relations.get(r1).symmetric && alpha_equal(a, d) && alpha_equal(b, c)
            }
            _ => false,
        },
        _ => false,
    }
}

fn check_node(
    node: &ProofNode,
    branch: &[HypId],
    tree: &ProofTree,
    theory: &Theory,
) -> Result<(), ValidationError> {
    if !node.hyps.is_empty() && node.hyps != branch {
        return Err(ValidationError::BranchMismatch);
    }
    let inst = &node.applied;
    for p in &inst.principal {
        if !branch.contains(p) {
            return Err(ValidationError::MissingPrincipal(*p));
        }
    }
    let ps: Vec<&Formula> = inst.principal.iter().map(|h| tree.hyps.get(*h)).collect();
    let kids: Vec<Vec<&Formula>> =
        inst.children.iter().map(|c| c.iter().map(|h| tree.hyps.get(*h)).collect()).collect();
    if node.children.len() != inst.children.len() {
        return Err(ValidationError::ChildCount { expected: inst.children.len(), found: node.children.len() });
    }
    let bad = || ValidationError::BadChildren { rule: inst.rule.clone() };
    match &inst.rule {
        r if r.is_closure() => {
            if !closure_holds(r, &ps, theory) {
                return Err(ValidationError::BadClosure(r.clone()));
            }
            if !inst.children.is_empty() {
                return Err(bad());
            }
        }
        RuleKind::Super { rule, inst: is_inst, .. } => {
            let r = theory.rules.get(*rule).ok_or_else(bad)?;
            let [p] = ps.as_slice() else { return Err(bad()) };
            let params = match_literal(&r.trigger, p).ok_or_else(bad)?;
            let sigma = if *is_inst {
                let given = inst.instantiation.as_ref().ok_or_else(bad)?;
                let agrees = params.iter().all(|(k, t)| given.get(k).is_some_and(|g| alpha_equal(g, t)));
                if !agrees {
                    return Err(bad());
                }
                given.clone()
            } else {
                if r.fresh_metavars > 0 {
                    return Err(bad());
                }
                params
            };
            if r.is_closing() {
                if !inst.children.is_empty() {
                    return Err(bad());
                }
            } else {
                let want: Children =
                    r.branches.iter().map(|b| b.iter().map(|f| f.apply(&sigma)).collect()).collect();
                if want.iter().any(|b| b.iter().any(Formula::has_metas)) || !same_children(&kids, &want) {
                    return Err(bad());
                }
            }
        }
        RuleKind::AllMeta | RuleKind::NotExMeta => {
            let ok = ps.len() == 1 && kids.len() == 1 && kids[0].len() == 1 && meta_instance(ps[0], kids[0][0]);
            if !ok {
                return Err(bad());
            }
        }
        RuleKind::AllInst | RuleKind::NotExInst => {
            let ok = ps.len() == 1
                && kids.len() == 1
                && kids[0].len() == 1
                && gamma_instance(ps[0], kids[0][0], inst.instantiation.as_ref());
            if !ok {
                return Err(bad());
            }
        }
        RuleKind::Cut => {
            let ok = kids.len() == 2
                && kids[0].len() == 1
                && kids[1].len() == 1
                && alpha_equal(&Formula::not(kids[0][0].clone()), kids[1][0]);
            if !ok {
                return Err(bad());
            }
        }
        rule => {
            let want = expected(rule, &ps, theory).ok_or_else(bad)?;
            if !same_children(&kids, &want) {
                return Err(bad());
            }
        }
    }
    if node.children.is_empty() && !inst.rule.is_closure() && !matches!(inst.rule, RuleKind::Super { .. }) {
        return Err(ValidationError::OpenLeaf(inst.rule.clone()));
    }
    for (child, add) in node.children.iter().zip(&inst.children) {
        let mut b = branch.to_vec();
        for h in add {
            if !b.contains(h) {
                b.push(*h);
            }
        }
        check_node(child, &b, tree, theory)?;
    }
    Ok(())
}

/// `child` is the body of `origin` with its variable replaced by a
/// metavariable.
fn meta_instance(origin: &Formula, child: &Formula) -> bool {
    let (x, body, negated) = match origin {
        Formula::Forall(x, p) => (x, p, false),
        Formula::Not(g) => match &**g {
            Formula::Exists(x, p) => (x, p, true),
            _ => return false,
        },
        _ => return false,
    };
    let metas: Vec<Term> = {
        let mut v = Vec::new();
        let fv = child.free_vars();
        for m in fv.metas {
            v.push(Term::Meta(m));
        }
        v
    };
    metas.into_iter().any(|m| {
        let e = body.apply(&Substitution::var(x.clone(), m));
        alpha_equal(&(if negated { Formula::not(e) } else { e }), child)
    })
}

/// Checks every node of `tree` against the rule it records: principals on
/// the branch, children as the rule prescribes, leaves closed.
pub fn validate(tree: &ProofTree, theory: &Theory) -> Result<(), ValidationError> {
    check_node(&tree.root, &tree.initial, tree, theory)
}
