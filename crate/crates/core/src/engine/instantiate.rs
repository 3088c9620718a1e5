use super::branch::{Branch, InstOrigin};
use super::rules::{rule_branches, Candidate, Workspace};
use super::{HypId, HypTable, RuleInstance, RuleKind};
use crate::compiler::Theory;
use crate::logic::{
    match_literal, unify_atoms, unify_terms, Formula, MetaId, Subst, Substitution, Term, VarKey, VarMode,
};

/// An instantiation found by scanning metavariable-bearing formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    pub origin: InstOrigin,
    pub instance: RuleInstance,
}

/// Metavariables private to one proposal computation; they never reach a
/// branch.
const SCRATCH_BASE: u32 = 1 << 30;

struct Scratch(u32);

impl Scratch {
    fn fresh(&mut self) -> Term {
        self.0 += 1;
        Term::Meta(MetaId(SCRATCH_BASE + self.0))
    }
}

/// Literal leaves of `f` under polarity `pos`, with universally behaving
/// quantifiers opened on scratch metavariables.
fn leaves(f: &Formula, pos: bool, sc: &mut Scratch, out: &mut Vec<(bool, Formula)>) {
    use Formula::*;
    match f {
        Atom(..) | Eq(..) => out.push((pos, f.clone())),
        Not(g) => leaves(g, !pos, sc, out),
        And(a, b) | Or(a, b) => {
            leaves(a, pos, sc, out);
            leaves(b, pos, sc, out);
        }
        Implies(a, b) => {
            leaves(a, !pos, sc, out);
            leaves(b, pos, sc, out);
        }
        Equiv(a, b) => {
            for p in [pos, !pos] {
                leaves(a, p, sc, out);
                leaves(b, p, sc, out);
            }
        }
        Forall(x, b) if pos => leaves(&b.apply(&Substitution::var(x.clone(), sc.fresh())), pos, sc, out),
        Exists(x, b) if !pos => leaves(&b.apply(&Substitution::var(x.clone(), sc.fresh())), pos, sc, out),
        _ => {}
    }
}

struct Source {
    origin: InstOrigin,
    principal: HypId,
    /// Metavariables whose values define the instance.
    targets: Vec<MetaId>,
    leaves: Vec<(bool, Formula)>,
}

struct Closers<'a> {
    /// Ground branch literals as `(polarity, atom)`.
    literals: Vec<(bool, Formula)>,
    /// Triggers of closing compiled rules.
    triggers: Vec<&'a Formula>,
    theory: &'a Theory,
}

fn metas_only(s: Substitution) -> Substitution {
    let mut out = Substitution::new();
    for (k, t) in s.iter() {
        if matches!(k, VarKey::Meta(_)) {
            out.insert(k.clone(), t.clone());
        }
    }
    out
}

fn rename_trigger(t: &Formula) -> Formula {
    let mut s = Substitution::new();
    for v in t.free_vars().vars {
        s.insert(VarKey::Var(v.clone()), Term::var(format!("{v}'")));
    }
    t.apply(&s)
}

impl Closers<'_> {
    /// Extensions of `sigma` under which the leaf closes the branch.
    fn close(&self, leaf: &(bool, Formula), sigma: &Substitution) -> Vec<Substitution> {
        let (pos, atom) = leaf;
        let atom = atom.apply(sigma);
        let mut out = Vec::new();
        for (kpos, k) in &self.literals {
            if kpos != pos && k.predicate() == atom.predicate() {
                if let Ok(t) = unify_atoms(&atom, k, VarMode::Rigid) {
                    out.push(sigma.then(&t));
                }
            }
        }
        if !pos {
            let args = atom.atom_args().unwrap_or_default();
            let reflexive = atom.predicate().is_some_and(|(p, n)| n == 2 && self.theory.relations.get(p).reflexive);
            if reflexive {
                if let Ok(t) = unify_terms(args[0], args[1], VarMode::Rigid) {
                    out.push(sigma.then(&t));
                }
            }
        }
        for trig in &self.triggers {
            if let Some((tpos, tatom)) = trig.as_literal() {
                if tpos == *pos && tatom.predicate() == atom.predicate() {
                    if let Ok(t) = unify_atoms(&atom, &rename_trigger(tatom), VarMode::Schema) {
                        out.push(sigma.then(&metas_only(t)));
                    }
                }
            }
        }
        out
    }
}

fn default_term(ws: &Workspace, b: &Branch) -> Term {
    for &h in b.formulas() {
        let f = ws.hyps.get(h);
        if f.has_metas() {
            continue;
        }
        if let Some(args) = f.as_literal().and_then(|(_, a)| a.atom_args()) {
            if let Some(t) = args.into_iter().find(|t| t.free_vars().is_empty()) {
                return t.clone();
            }
        }
    }
    Term::eps("X", Formula::True)
}

fn ground(t: Term, dflt: &Term) -> Term {
    if !t.has_metas() {
        return t;
    }
    let mut s = Substitution::new();
    let mut metas = Vec::new();
    t.for_each_subterm(&mut |u| {
        if let Term::Meta(m) = u {
            metas.push(*m);
        }
    });
    for m in metas {
        s.insert(VarKey::Meta(m), dflt.clone());
    }
    t.apply(&s)
}

/// The γ-M formula recorded for metavariable `m`.
fn gamma_formula(ws: &mut Workspace, origin: HypId, m: MetaId) -> Option<(String, Formula, bool)> {
    let (x, body, negated) = match ws.hyps.get(origin) {
        Formula::Forall(x, p) => (x.clone(), (**p).clone(), false),
        Formula::Not(g) => match &**g {
            Formula::Exists(x, p) => (x.clone(), (**p).clone(), true),
            _ => return None,
        },
        _ => return None,
    };
    let inst = body.apply(&Substitution::var(x.clone(), Term::Meta(m)));
    Some((x, if negated { Formula::not(inst) } else { inst }, negated))
}

fn sources(ws: &mut Workspace, b: &Branch, sc: &mut Scratch, limit: usize) -> Vec<(Source, Option<Substitution>)> {
    let mut out = Vec::new();
    let origins: Vec<(MetaId, HypId)> = b.metavar_origins().collect();
    for (m, origin) in origins {
        if b.instance_count(InstOrigin::Gamma(origin)) >= limit {
            continue;
        }
        let Some((_, f, _)) = gamma_formula(ws, origin, m) else { continue };
        let mut ls = Vec::new();
        leaves(&f, true, sc, &mut ls);
        out.push((Source { origin: InstOrigin::Gamma(origin), principal: origin, targets: vec![m], leaves: ls }, None));
    }
    let theory = ws.theory;
    for &h in b.formulas() {
        let f = ws.hyps.get(h).clone();
        if f.has_metas() || !f.is_literal() {
            continue;
        }
        for (i, r) in theory.rules.iter().enumerate() {
            if r.fresh_metavars == 0 || b.instance_count(InstOrigin::Rule(i, h)) >= limit {
                continue;
            }
            let Some(params) = match_literal(&r.trigger, &f) else { continue };
            let mut rename = Substitution::new();
            let mut targets = Vec::new();
            for k in 0..r.fresh_metavars {
                let t = sc.fresh();
                if let Term::Meta(id) = t {
                    targets.push(id);
                }
                rename.insert(VarKey::Meta(MetaId(k as u32)), t);
            }
            let mut ls = Vec::new();
            for br in rule_branches(r, &params, &rename) {
                for g in br {
                    leaves(&g, true, sc, &mut ls);
                }
            }
            let params = params.then(&rename);
            out.push((Source { origin: InstOrigin::Rule(i, h), principal: h, targets, leaves: ls }, Some(params)));
        }
    }
    out
}

struct Scored {
    closed: usize,
    unclosed: usize,
    order: usize,
    terms: Vec<Term>,
}

fn scored_instances(src: &Source, closers: &Closers, dflt: &Term, order: usize) -> Vec<Scored> {
    let mut out: Vec<Scored> = Vec::new();
    for (i, leaf) in src.leaves.iter().enumerate() {
        for seed in closers.close(leaf, &Substitution::new()) {
            let mut sigma = seed;
            let mut closed = 1;
            for (j, other) in src.leaves.iter().enumerate() {
                if j == i {
                    continue;
                }
                if let Some(next) = closers.close(other, &sigma).into_iter().next() {
                    sigma = next;
                    closed += 1;
                }
            }
            let terms: Vec<Term> = src
                .targets
                .iter()
                .map(|m| ground(Term::Meta(*m).apply(&sigma), dflt))
                .collect();
            if out.iter().any(|s| s.terms == terms) {
                continue;
            }
            out.push(Scored { closed, unclosed: src.leaves.len() - closed, order, terms });
        }
    }
    out
}

/// Instantiation candidates, most promising first: instances that close
/// every leaf, then by number of closed leaves, then oldest source.
pub(crate) fn instantiation_candidates(ws: &mut Workspace, b: &Branch, limit: usize) -> Vec<Candidate> {
    let mut sc = Scratch(0);
    let srcs = sources(ws, b, &mut sc, limit);
    if srcs.is_empty() {
        return Vec::new();
    }
    let mut lits = Vec::new();
    for &h in b.formulas() {
        let f = ws.hyps.get(h);
        if !f.has_metas() {
            if let Some((p, a)) = f.as_literal() {
                lits.push((p, a.clone()));
            }
        }
    }
    let theory = ws.theory;
    let closers = Closers {
        literals: lits,
        triggers: theory.rules.iter().filter(|r| r.is_closing()).map(|r| &r.trigger).collect(),
        theory,
    };
    let dflt = default_term(ws, b);
    let mut ranked: Vec<(Scored, usize)> = Vec::new();
    for (k, (src, _)) in srcs.iter().enumerate() {
        for s in scored_instances(src, &closers, &dflt, k) {
            ranked.push((s, k));
        }
    }
    ranked.sort_by_key(|(s, _)| (s.unclosed > 0, std::cmp::Reverse(s.closed), s.unclosed, s.order));
    let mut out = Vec::new();
    for (s, k) in ranked {
        let (src, params) = &srcs[k];
        if let Some(c) = build(ws, b, src, params.as_ref(), &s.terms) {
            out.push(c);
        }
    }
    out
}

fn build(ws: &mut Workspace, b: &Branch, src: &Source, params: Option<&Substitution>, terms: &[Term]) -> Option<Candidate> {
    let mut metas = Substitution::new();
    for (m, t) in src.targets.iter().zip(terms) {
        metas.insert(VarKey::Meta(*m), t.clone());
    }
    let (rule, children, instantiation) = match src.origin {
        InstOrigin::Gamma(origin) => {
            let (x, _, negated) = gamma_formula(ws, origin, src.targets[0])?;
            let body = match ws.hyps.get(origin) {
                Formula::Forall(_, p) => (**p).clone(),
                Formula::Not(g) => match &**g {
                    Formula::Exists(_, p) => (**p).clone(),
                    _ => return None,
                },
                _ => return None,
            };
            let s = Substitution::var(x, terms[0].clone());
            let inst = body.apply(&s);
            let (rule, inst) =
                if negated { (RuleKind::NotExInst, Formula::not(inst)) } else { (RuleKind::AllInst, inst) };
            (rule, vec![vec![ws.hyps.intern(inst)]], s)
        }
        InstOrigin::Rule(i, _) => {
            let r = &ws.theory.rules[i];
            let params = params?.then(&metas);
            let branches = r.branches.iter().map(|br| br.iter().map(|f| f.apply(&params)).collect::<Vec<_>>());
            let branches: Vec<Vec<Formula>> = branches.collect();
            let kind = RuleKind::Super { rule: i, name: r.name.clone(), inst: true };
            let children = branches
                .into_iter()
                .map(|fs| {
                    let mut ids = Vec::new();
                    for f in fs {
                        let h = ws.hyps.intern(f);
                        if !ids.contains(&h) {
                            ids.push(h);
                        }
                    }
                    ids
                })
                .collect();
            (kind, children, params)
        }
    };
    let inst = RuleInstance { rule, principal: vec![src.principal], children, instantiation: Some(instantiation) };
    if !super::rules::useful(b, &inst) {
        return None;
    }
    Some(Candidate {
        child_consume: vec![Vec::new(); inst.children.len()],
        inst,
        consume: Vec::new(),
        meta: None,
        origin: Some(src.origin),
    })
}

/// Instantiations suggested by the branch's metavariables and by compiled
/// rules that introduce metavariables. The branch is not modified.
pub fn propose_instantiations(b: &Branch, hyps: &mut HypTable, theory: &Theory, limit: usize) -> Vec<Proposal> {
    let mut ws = Workspace::new(theory);
    ws.hyps = std::mem::take(hyps);
    let out = instantiation_candidates(&mut ws, b, limit)
        .into_iter()
        .map(|c| Proposal { origin: c.origin.expect("instantiation candidates carry an origin"), instance: c.inst })
        .collect();
    *hyps = ws.hyps;
    out
}
