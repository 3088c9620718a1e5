use std::collections::HashMap;

use super::branch::{Branch, InstOrigin, RuleKey};
use super::{HypId, HypTable, RuleInstance, RuleKind};
use crate::compiler::{RelationFlags, SuperRule, Theory, EQUALITY};
use crate::logic::{alpha_equal, match_literal, Formula, MetaId, Subst, Substitution, Term};

/// Rule priority classes, highest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Class {
    Closure,
    Linear,
    Delta,
    Branching,
    Relational,
    GammaMeta,
    Instantiation,
    Cut,
}

pub(crate) const CLASSES: [Class; 8] = [
    Class::Closure,
    Class::Linear,
    Class::Delta,
    Class::Branching,
    Class::Relational,
    Class::GammaMeta,
    Class::Instantiation,
    Class::Cut,
];

/// A rule instance plus the bookkeeping its children inherit.
#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub inst: RuleInstance,
    pub consume: Vec<(HypId, RuleKey)>,
    pub child_consume: Vec<Vec<(HypId, RuleKey)>>,
    pub meta: Option<(MetaId, HypId)>,
    pub origin: Option<InstOrigin>,
}

impl Candidate {
    fn new(rule: RuleKind, principal: Vec<HypId>, children: Vec<Vec<HypId>>) -> Candidate {
        let n = children.len();
        Candidate {
            inst: RuleInstance { rule, principal, children, instantiation: None },
            consume: Vec::new(),
            child_consume: vec![Vec::new(); n],
            meta: None,
            origin: None,
        }
    }

    fn consuming(mut self, h: HypId, key: RuleKey) -> Candidate {
        self.consume.push((h, key));
        self
    }
}

/// Mutable state shared by every branch of one search.
pub(crate) struct Workspace<'t> {
    pub theory: &'t Theory,
    pub hyps: HypTable,
    next_meta: u32,
    gamma_memo: HashMap<HypId, (MetaId, HypId)>,
}

impl<'t> Workspace<'t> {
    pub fn new(theory: &'t Theory) -> Workspace<'t> {
        Workspace { theory, hyps: HypTable::default(), next_meta: 0, gamma_memo: HashMap::new() }
    }

    pub fn fresh_meta(&mut self) -> MetaId {
        let m = MetaId(self.next_meta);
        self.next_meta += 1;
        m
    }

    fn intern_all(&mut self, fs: Vec<Formula>) -> Vec<HypId> {
        let mut out = Vec::with_capacity(fs.len());
        for f in fs {
            let h = self.hyps.intern(f);
            if !out.contains(&h) {
                out.push(h);
            }
        }
        out
    }

    pub fn relation(&self, pred: &str) -> RelationFlags {
        self.theory.relations.get(pred)
    }
}

fn neq(a: &Term, b: &Term) -> Formula {
    Formula::not(Formula::eq(a.clone(), b.clone()))
}

/// `R(a, b)` for a binary relation, equality included.
pub(crate) fn rel(pred: &str, a: &Term, b: &Term) -> Formula {
    if pred == EQUALITY {
        Formula::eq(a.clone(), b.clone())
    } else {
        Formula::atom(pred, vec![a.clone(), b.clone()])
    }
}

/// Splits a binary literal into `(positive, relation, left, right)`.
pub(crate) fn binary(f: &Formula) -> Option<(bool, &str, &Term, &Term)> {
    let (pos, atom) = f.as_literal()?;
    match atom {
        Formula::Eq(a, b) => Some((pos, EQUALITY, a, b)),
        Formula::Atom(p, args) if args.len() == 2 => Some((pos, p.as_str(), &args[0], &args[1])),
        _ => None,
    }
}

/// First applicable closure rule, checked in the order ⊙⊥, ⊙¬⊤, ⊙, ⊙r,
/// ⊙s, oldest formulas first. Closing compiled rules are not included.
pub fn detect_closure(b: &Branch, hyps: &HypTable, theory: &Theory) -> Option<RuleInstance> {
    let fs = b.formulas();
    let close = |rule, principal| Some(RuleInstance { rule, principal, children: vec![], instantiation: None });
    if let Some(&h) = fs.iter().find(|h| *hyps.get(**h) == Formula::False) {
        return close(RuleKind::CloseFalse, vec![h]);
    }
    if let Some(&h) = fs.iter().find(|h| matches!(hyps.get(**h), Formula::Not(g) if **g == Formula::True)) {
        return close(RuleKind::CloseNotTrue, vec![h]);
    }
    for &n in fs {
        if let Formula::Not(atom) = hyps.get(n) {
            if atom.is_atomic() {
                if let Some(p) = hyps.lookup(atom) {
                    if b.contains(p) {
                        return close(RuleKind::Close, vec![p, n]);
                    }
                }
            }
        }
    }
    for &n in fs {
        if let Some((false, r, s, t)) = binary(hyps.get(n)) {
            if theory.relations.get(r).reflexive && alpha_equal(s, t) {
                return close(RuleKind::CloseRefl, vec![n]);
            }
        }
    }
    for &n in fs {
        if let Some((false, r, s, t)) = binary(hyps.get(n)) {
            if theory.relations.get(r).symmetric {
                if let Some(p) = hyps.lookup(&rel(r, t, s)) {
                    if b.contains(p) {
                        return close(RuleKind::CloseSym, vec![p, n]);
                    }
                }
            }
        }
    }
    None
}

/// Instantiates a compiled rule's branches; schema metavariables must be
/// covered by `metas` when the rule has any.
pub(crate) fn rule_branches(r: &SuperRule, params: &Substitution, metas: &Substitution) -> Vec<Vec<Formula>> {
    r.branches
        .iter()
        .map(|br| br.iter().map(|f| f.apply(params).apply(metas)).collect())
        .collect()
}

fn superrule_candidates(ws: &mut Workspace, b: &Branch, h: HypId, want: Class, out: &mut Vec<Candidate>) {
    let f = ws.hyps.get(h).clone();
    if f.has_metas() || !f.is_literal() {
        return;
    }
    let theory = ws.theory;
    for (i, r) in theory.rules.iter().enumerate() {
        if r.fresh_metavars > 0 || b.is_consumed(h, RuleKey::Super(i)) {
            continue;
        }
        let class = if r.is_closing() {
            Class::Closure
        } else if r.is_branching() {
            Class::Branching
        } else {
            Class::Linear
        };
        if class != want {
            continue;
        }
        let Some(sigma) = match_literal(&r.trigger, &f) else { continue };
        let kind = RuleKind::Super { rule: i, name: r.name.clone(), inst: false };
        let children = if r.is_closing() {
            Vec::new()
        } else {
            rule_branches(r, &sigma, &Substitution::new()).into_iter().map(|fs| ws.intern_all(fs)).collect()
        };
        let mut c = Candidate::new(kind, vec![h], children).consuming(h, RuleKey::Super(i));
        c.inst.instantiation = Some(sigma);
        out.push(c);
    }
}

fn analytic(ws: &mut Workspace, b: &Branch, h: HypId, want: Class) -> Option<Candidate> {
    use Formula::*;
    if b.is_consumed(h, RuleKey::Analytic) {
        return None;
    }
    let f = ws.hyps.get(h).clone();
    if f.has_metas() {
        return None;
    }
    let not = |f: &Formula| Formula::not(f.clone());
    let (class, rule, children): (Class, RuleKind, Vec<Vec<Formula>>) = match &f {
        Not(g) => match &**g {
            Not(p) => (Class::Linear, RuleKind::NotNot, vec![vec![(**p).clone()]]),
            Or(p, q) => (Class::Linear, RuleKind::NotOr, vec![vec![not(p), not(q)]]),
            Implies(p, q) => (Class::Linear, RuleKind::NotImply, vec![vec![(**p).clone(), not(q)]]),
            And(p, q) => (Class::Branching, RuleKind::NotAnd, vec![vec![not(p)], vec![not(q)]]),
            Equiv(p, q) => (
                Class::Branching,
                RuleKind::NotEquiv,
                vec![vec![not(p), (**q).clone()], vec![(**p).clone(), not(q)]],
            ),
            Forall(x, p) => {
                let body = not(p);
                let eps = Term::eps(x.clone(), body.clone());
                (Class::Delta, RuleKind::NotAll, vec![vec![body.apply(&Substitution::var(x.clone(), eps))]])
            }
            _ => return None,
        },
        And(p, q) => (Class::Linear, RuleKind::And, vec![vec![(**p).clone(), (**q).clone()]]),
        Or(p, q) => (Class::Branching, RuleKind::Or, vec![vec![(**p).clone()], vec![(**q).clone()]]),
        Implies(p, q) => (Class::Branching, RuleKind::Imply, vec![vec![not(p)], vec![(**q).clone()]]),
        Equiv(p, q) => (
            Class::Branching,
            RuleKind::Equiv,
            vec![vec![not(p), not(q)], vec![(**p).clone(), (**q).clone()]],
        ),
        Exists(x, p) => {
            let eps = Term::eps(x.clone(), (**p).clone());
            (Class::Delta, RuleKind::Ex, vec![vec![p.apply(&Substitution::var(x.clone(), eps))]])
        }
        _ => return None,
    };
    if class != want {
        return None;
    }
    let children = children.into_iter().map(|fs| ws.intern_all(fs)).collect();
    Some(Candidate::new(rule, vec![h], children).consuming(h, RuleKey::Analytic))
}

fn gamma_meta(ws: &mut Workspace, b: &Branch, h: HypId) -> Option<Candidate> {
    if b.is_consumed(h, RuleKey::GammaMeta) {
        return None;
    }
    let f = ws.hyps.get(h).clone();
    if f.has_metas() {
        return None;
    }
    let (rule, x, body, negated) = match &f {
        Formula::Forall(x, p) => (RuleKind::AllMeta, x, p, false),
        Formula::Not(g) => match &**g {
            Formula::Exists(x, p) => (RuleKind::NotExMeta, x, p, true),
            _ => return None,
        },
        _ => return None,
    };
    let (m, child) = match ws.gamma_memo.get(&h) {
        Some(&v) => v,
        None => {
            let m = ws.fresh_meta();
            let inst = body.apply(&Substitution::var(x.clone(), Term::Meta(m)));
            let inst = if negated { Formula::not(inst) } else { inst };
            let id = ws.hyps.intern(inst);
            ws.gamma_memo.insert(h, (m, id));
            (m, id)
        }
    };
    let mut c = Candidate::new(rule, vec![h], vec![vec![child]]).consuming(h, RuleKey::GammaMeta);
    c.meta = Some((m, h));
    Some(c)
}

/// Ground binary literals and literal atoms of the branch, with positions.
struct Literals {
    pos: Vec<(usize, HypId)>,
    neg: Vec<(usize, HypId)>,
    has_equation: bool,
}

fn literals(ws: &Workspace, b: &Branch) -> Literals {
    let mut l = Literals { pos: Vec::new(), neg: Vec::new(), has_equation: false };
    for (i, &h) in b.formulas().iter().enumerate() {
        let f = ws.hyps.get(h);
        if f.has_metas() {
            continue;
        }
        match f.as_literal() {
            Some((true, a)) => {
                if matches!(a, Formula::Eq(..)) {
                    l.has_equation = true;
                }
                l.pos.push((i, h));
            }
            Some((false, _)) => l.neg.push((i, h)),
            None => {}
        }
    }
    l
}

fn differing_args(a: &[Term], b: &[Term]) -> Vec<Formula> {
    a.iter()
        .zip(b)
        .filter(|(s, t)| !alpha_equal(*s, *t))
        .map(|(s, t)| neq(s, t))
        .collect()
}

fn relational(ws: &mut Workspace, b: &Branch) -> Vec<Candidate> {
    let lits = literals(ws, b);
    let mut found: Vec<(usize, RuleKind, Vec<HypId>, Vec<Vec<Formula>>, Vec<bool>)> = Vec::new();
    for &(ni, n) in &lits.neg {
        let Some((_, natom)) = ws.hyps.get(n).as_literal() else { continue };
        let natom = natom.clone();
        if lits.has_equation {
            if let Formula::Eq(Term::App(f, xs), Term::App(g, ys)) = &natom {
                if f == g && xs.len() == ys.len() && !xs.is_empty() {
                    let kids = differing_args(xs, ys);
                    if !kids.is_empty() {
                        found.push((ni, RuleKind::Fun, vec![n], kids.into_iter().map(|k| vec![k]).collect(), vec![]));
                    }
                }
            }
            if let Formula::Atom(p, ys) = &natom {
                for &(pi, ph) in &lits.pos {
                    if let Formula::Atom(q, xs) = ws.hyps.get(ph) {
                        if p == q && xs.len() == ys.len() && !xs.is_empty() {
                            let kids = differing_args(xs, ys);
                            if !kids.is_empty() {
                                let kids = kids.into_iter().map(|k| vec![k]).collect();
                                found.push((ni.max(pi), RuleKind::Pred, vec![ph, n], kids, vec![]));
                            }
                        }
                    }
                }
            }
        }
        let Some((_, r, u, v)) = binary(ws.hyps.get(n)) else { continue };
        let (r, u, v) = (r.to_owned(), u.clone(), v.clone());
        let flags = ws.relation(&r);
        let is_eq = r == EQUALITY;
        if flags.reflexive && !is_eq && !alpha_equal(&u, &v) {
            found.push((ni, RuleKind::NotRefl, vec![n], vec![vec![neq(&u, &v)]], vec![]));
        }
        let nrel = |a: &Term, c: &Term| Formula::not(rel(&r, a, c));
        let trans_ok = !b.is_consumed(n, RuleKey::TransFamily);
        for &(pi, ph) in &lits.pos {
            let Some((true, r2, s, t)) = binary(ws.hyps.get(ph)) else { continue };
            let (s, t) = (s.clone(), t.clone());
            let at = ni.max(pi);
            if r2 == r {
                if flags.symmetric {
                    found.push((at, RuleKind::Sym, vec![ph, n], vec![vec![neq(&t, &u)], vec![neq(&s, &v)]], vec![]));
                }
                if flags.transitive && trans_ok {
                    let kids = vec![vec![neq(&u, &s), nrel(&u, &s)], vec![neq(&t, &v), nrel(&t, &v)]];
                    found.push((at, RuleKind::Trans, vec![ph, n], kids, vec![!is_eq]));
                    if flags.symmetric {
                        let kids = vec![vec![neq(&v, &s), nrel(&v, &s)], vec![neq(&t, &u), nrel(&t, &u)]];
                        found.push((at, RuleKind::TransSym, vec![ph, n], kids, vec![!is_eq]));
                    }
                }
            } else if r2 == EQUALITY && !is_eq && flags.transitive && trans_ok {
                if flags.symmetric {
                    let kids = vec![
                        vec![neq(&v, &s), nrel(&v, &s)],
                        vec![nrel(&v, &s), nrel(&t, &u)],
                        vec![neq(&t, &u), nrel(&t, &u)],
                    ];
                    found.push((at, RuleKind::TransEqSym, vec![ph, n], kids, vec![true]));
                } else {
                    let kids = vec![
                        vec![neq(&u, &s), nrel(&u, &s)],
                        vec![nrel(&u, &s), nrel(&t, &v)],
                        vec![neq(&t, &v), nrel(&t, &v)],
                    ];
                    found.push((at, RuleKind::TransEq, vec![ph, n], kids, vec![true]));
                }
            }
        }
    }
    found.sort_by_key(|c| c.0);
    found
        .into_iter()
        .map(|(_, rule, principal, kids, mark)| {
            let mark_derived = mark.first().copied().unwrap_or(false);
            let children: Vec<Vec<HypId>> = kids.into_iter().map(|fs| ws.intern_all(fs)).collect();
            let mut c = Candidate::new(rule, principal, children.clone());
            if mark_derived {
                c.child_consume = children
                    .iter()
                    .map(|hs| {
                        hs.iter()
                            .filter(|h| !matches!(ws.hyps.get(**h).as_literal(), Some((_, Formula::Eq(..)))))
                            .map(|h| (*h, RuleKey::TransFamily))
                            .collect()
                    })
                    .collect();
            }
            c
        })
        .collect()
}

fn cut(ws: &mut Workspace, b: &Branch) -> Vec<Candidate> {
    let mut atoms: Vec<Formula> = Vec::new();
    for &h in b.formulas() {
        let f = ws.hyps.get(h);
        if f.has_metas() || !f.is_closed() {
            continue;
        }
        for a in f.atoms() {
            if a.is_closed() && !atoms.contains(a) {
                atoms.push(a.clone());
            }
        }
    }
    let mut out = Vec::new();
    for a in atoms {
        let on = |f: &Formula| ws.hyps.lookup(f).is_some_and(|h| b.contains(h));
        if on(&a) || on(&Formula::not(a.clone())) {
            continue;
        }
        let children = vec![vec![ws.hyps.intern(a.clone())], vec![ws.hyps.intern(Formula::not(a))]];
        out.push(Candidate::new(RuleKind::Cut, vec![], children));
    }
    out
}

/// Candidates of one priority class, oldest principal first. The
/// instantiation class is produced by the instantiation proposer.
pub(crate) fn class_candidates(ws: &mut Workspace, b: &Branch, class: Class, cut_enabled: bool) -> Vec<Candidate> {
    let mut out = Vec::new();
    match class {
        Class::Closure => {
            if let Some(inst) = detect_closure(b, &ws.hyps, ws.theory) {
                out.push(Candidate::new(inst.rule, inst.principal, vec![]));
            }
            for &h in b.formulas() {
                superrule_candidates(ws, b, h, Class::Closure, &mut out);
            }
        }
        Class::Linear | Class::Delta | Class::Branching => {
            for &h in b.formulas() {
                if let Some(c) = analytic(ws, b, h, class) {
                    out.push(c);
                }
                if class != Class::Delta {
                    superrule_candidates(ws, b, h, class, &mut out);
                }
            }
        }
        Class::Relational => out = relational(ws, b),
        Class::GammaMeta => {
            for &h in b.formulas() {
                if let Some(c) = gamma_meta(ws, b, h) {
                    out.push(c);
                }
            }
        }
        Class::Instantiation => {}
        Class::Cut => {
            if cut_enabled {
                out = cut(ws, b);
            }
        }
    }
    out
}

/// All rule instances applicable to `b` except instantiation proposals,
/// in priority order. Instances whose children would add nothing new are
/// omitted.
pub fn applicable_rules(b: &Branch, theory: &Theory, hyps: &mut HypTable, cut_enabled: bool) -> Vec<RuleInstance> {
    let mut ws = Workspace::new(theory);
    ws.hyps = std::mem::take(hyps);
    let mut out = Vec::new();
    for class in CLASSES {
        for c in class_candidates(&mut ws, b, class, cut_enabled) {
            if useful(b, &c.inst) {
                out.push(c.inst);
            }
        }
    }
    *hyps = ws.hyps;
    out
}

/// Every child adds at least one formula.
pub(crate) fn useful(b: &Branch, inst: &RuleInstance) -> bool {
    inst.children.iter().all(|c| c.iter().any(|h| !b.contains(*h)))
}
