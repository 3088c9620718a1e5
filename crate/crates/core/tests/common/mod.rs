#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sdtab_core::compiler::{build_theory, BuildOptions, Theory};
use sdtab_core::engine::{prove, validate, Branch, HypId, ProofResult, SearchConfig};
use sdtab_core::logic::{alpha_equal, unify_terms, Subst, VarMode};
use sdtab_core::render::prune;
use sdtab_core::tptp::{parse_problem, Problem};
use sdtab_core::{Formula, MetaId, Substitution, Term};

// Propositional formulas, independent of the library's representation.

#[derive(Clone, Debug)]
pub enum Prop {
    Atom(usize),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Imp(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn eval(&self, v: u32) -> bool {
        match self {
            Prop::Atom(i) => v >> i & 1 == 1,
            Prop::Not(a) => !a.eval(v),
            Prop::And(a, b) => a.eval(v) && b.eval(v),
            Prop::Or(a, b) => a.eval(v) || b.eval(v),
            Prop::Imp(a, b) => !a.eval(v) || b.eval(v),
            Prop::Iff(a, b) => a.eval(v) == b.eval(v),
        }
    }

    /// TPTP text with atoms named by `names`.
    pub fn tptp(&self, names: &dyn Fn(usize) -> String) -> String {
        match self {
            Prop::Atom(i) => names(*i),
            Prop::Not(a) => format!("~ ({})", a.tptp(names)),
            Prop::And(a, b) => format!("({} & {})", a.tptp(names), b.tptp(names)),
            Prop::Or(a, b) => format!("({} | {})", a.tptp(names), b.tptp(names)),
            Prop::Imp(a, b) => format!("({} => {})", a.tptp(names), b.tptp(names)),
            Prop::Iff(a, b) => format!("({} <=> {})", a.tptp(names), b.tptp(names)),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Prop::Atom(_))
    }
}

pub fn random_prop(rng: &mut ChaCha8Rng, atoms: usize, depth: u32) -> Prop {
    if depth == 0 || rng.gen_bool(0.25) {
        return Prop::Atom(rng.gen_range(0..atoms));
    }
    let a = Box::new(random_prop(rng, atoms, depth - 1));
    match rng.gen_range(0..6) {
        0 => Prop::Not(a),
        1 => Prop::And(a, Box::new(random_prop(rng, atoms, depth - 1))),
        2 | 3 => Prop::Or(a, Box::new(random_prop(rng, atoms, depth - 1))),
        4 => Prop::Imp(a, Box::new(random_prop(rng, atoms, depth - 1))),
        _ => Prop::Iff(a, Box::new(random_prop(rng, atoms, depth - 1))),
    }
}

/// Whether `axioms` entail `goal`, by truth table.
pub fn entails(axioms: &[Prop], goal: &Prop, atoms: usize) -> bool {
    (0..1u32 << atoms).all(|v| !axioms.iter().all(|a| a.eval(v)) || goal.eval(v))
}

pub fn parse(text: &str) -> Problem {
    parse_problem(text, Path::new("generated.p")).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

pub fn prop_problem(axioms: &[Prop], goal: &Prop) -> String {
    let names = |i: usize| format!("a{i}");
    let mut s = String::new();
    for (i, a) in axioms.iter().enumerate() {
        s.push_str(&format!("fof(ax{i}, axiom, {}).\n", a.tptp(&names)));
    }
    s.push_str(&format!("fof(goal, conjecture, {}).\n", goal.tptp(&names)));
    s
}

/// A random propositional problem over at most six atoms. The goal is
/// resampled to balance valid and invalid cases.
pub fn random_prop_problem(rng: &mut ChaCha8Rng) -> (Vec<Prop>, Prop, bool) {
    const ATOMS: usize = 6;
    let n = rng.gen_range(0..=2);
    let axioms: Vec<Prop> = (0..n).map(|_| random_prop(rng, ATOMS, 2)).collect();
    let want_valid = rng.gen_bool(0.5);
    let mut goal = random_prop(rng, ATOMS, 3);
    for _ in 0..40 {
        if entails(&axioms, &goal, ATOMS) == want_valid {
            break;
        }
        goal = random_prop(rng, ATOMS, 3);
    }
    let valid = entails(&axioms, &goal, ATOMS);
    (axioms, goal, valid)
}

// Ground equality over constants and one unary function.

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GTerm {
    C(usize),
    F(Box<GTerm>),
}

impl GTerm {
    pub fn tptp(&self) -> String {
        match self {
            GTerm::C(i) => format!("c{i}"),
            GTerm::F(t) => format!("f({})", t.tptp()),
        }
    }

    fn subterms(&self, out: &mut Vec<GTerm>) {
        if !out.contains(self) {
            out.push(self.clone());
        }
        if let GTerm::F(t) = self {
            t.subterms(out);
        }
    }
}

#[derive(Clone, Debug)]
pub struct GLit {
    pub positive: bool,
    pub l: GTerm,
    pub r: GTerm,
}

impl GLit {
    pub fn tptp(&self) -> String {
        format!("{} {} {}", self.l.tptp(), if self.positive { "=" } else { "!=" }, self.r.tptp())
    }
}

fn random_gterm(rng: &mut ChaCha8Rng) -> GTerm {
    let mut t = GTerm::C(rng.gen_range(0..4));
    for _ in 0..rng.gen_range(0..=2) {
        if rng.gen_bool(0.4) {
            t = GTerm::F(Box::new(t));
        }
    }
    t
}

/// Congruence closure over the subterm-closed universe of `lits`.
struct Closure {
    universe: Vec<GTerm>,
    parent: Vec<usize>,
}

impl Closure {
    fn new(lits: &[GLit]) -> Closure {
        let mut universe = Vec::new();
        for l in lits {
            l.l.subterms(&mut universe);
            l.r.subterms(&mut universe);
        }
        let parent = (0..universe.len()).collect();
        let mut c = Closure { universe, parent };
        for l in lits.iter().filter(|l| l.positive) {
            let (a, b) = (c.index(&l.l), c.index(&l.r));
            c.union(a, b);
        }
        c.saturate();
        c
    }

    fn index(&self, t: &GTerm) -> usize {
        self.universe.iter().position(|u| u == t).expect("term in universe")
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.parent[a] = b;
    }

    fn saturate(&mut self) {
        loop {
            let mut changed = false;
            for i in 0..self.universe.len() {
                for j in 0..self.universe.len() {
                    if let (GTerm::F(x), GTerm::F(y)) = (&self.universe[i], &self.universe[j]) {
                        let (x, y) = (self.index(x), self.index(y));
                        if self.find(x) == self.find(y) && self.find(i) != self.find(j) {
                            self.union(i, j);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn equal(&mut self, a: &GTerm, b: &GTerm) -> bool {
        let (a, b) = (self.index(a), self.index(b));
        self.find(a) == self.find(b)
    }
}

fn satisfiable(lits: &[GLit]) -> bool {
    let mut c = Closure::new(lits);
    lits.iter().filter(|l| !l.positive).all(|l| !c.equal(&l.l, &l.r))
}

/// Whether the literals `axioms` entail `goal` in the theory of equality.
pub fn eq_entails(axioms: &[GLit], goal: &GLit) -> bool {
    let mut neg = goal.clone();
    neg.positive = !goal.positive;
    let mut all = axioms.to_vec();
    all.push(neg);
    !satisfiable(&all)
}

pub fn random_eq_problem(rng: &mut ChaCha8Rng) -> (Vec<GLit>, GLit, bool) {
    let n = rng.gen_range(1..=5);
    let axioms: Vec<GLit> = (0..n)
        .map(|_| GLit { positive: rng.gen_bool(0.75), l: random_gterm(rng), r: random_gterm(rng) })
        .collect();
    let want_valid = rng.gen_bool(0.5);
    let mut goal = GLit { positive: rng.gen_bool(0.8), l: random_gterm(rng), r: random_gterm(rng) };
    for _ in 0..60 {
        if eq_entails(&axioms, &goal) == want_valid {
            break;
        }
        goal = GLit { positive: rng.gen_bool(0.8), l: random_gterm(rng), r: random_gterm(rng) };
    }
    let valid = eq_entails(&axioms, &goal);
    (axioms, goal, valid)
}

pub fn eq_problem(axioms: &[GLit], goal: &GLit) -> String {
    let mut s = String::new();
    for (i, a) in axioms.iter().enumerate() {
        s.push_str(&format!("fof(e{i}, axiom, {}).\n", a.tptp()));
    }
    s.push_str(&format!("fof(goal, conjecture, {}).\n", goal.tptp()));
    s
}

// Running the prover on generated text.

pub struct Outcome {
    pub result: ProofResult,
    pub theory: Theory,
}

pub fn run_text(text: &str, cfg: &SearchConfig) -> Outcome {
    let p = parse(text);
    let theory = build_theory(&p, "t", BuildOptions::default());
    let goal = p.conjecture().expect("conjecture").formula.clone();
    let result = prove(&theory, &goal, cfg);
    Outcome { result, theory }
}

pub fn quick_config() -> SearchConfig {
    SearchConfig { timeout: Duration::from_secs(10), ..SearchConfig::default() }
}

// Property generators and checks.

pub fn term_strategy() -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::constant),
        (0u32..4).prop_map(|m| Term::Meta(MetaId(m))),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("g", vec![s, t])),
        ]
    })
    .boxed()
}

pub fn ground_term_strategy() -> BoxedStrategy<Term> {
    let leaf = prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::constant);
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(s, t)| Term::app("g", vec![s, t])),
        ]
    })
    .boxed()
}

pub fn meta_subst_strategy() -> BoxedStrategy<Substitution> {
    prop::collection::vec(prop::option::of(term_strategy()), 4)
        .prop_map(|ts| {
            let mut s = Substitution::new();
            for (i, t) in ts.into_iter().enumerate() {
                if let Some(t) = t {
                    if !t.contains_meta(MetaId(i as u32)) {
                        s.insert(sdtab_core::logic::VarKey::Meta(MetaId(i as u32)), t);
                    }
                }
            }
            s
        })
        .boxed()
}

pub fn ground_subst_strategy() -> BoxedStrategy<Substitution> {
    prop::collection::vec(ground_term_strategy(), 4)
        .prop_map(|ts| {
            let mut s = Substitution::new();
            for (i, t) in ts.into_iter().enumerate() {
                s.insert(sdtab_core::logic::VarKey::Meta(MetaId(i as u32)), t);
            }
            s
        })
        .boxed()
}

/// A unifier makes both sides equal and is idempotent; unification is
/// symmetric in success.
pub fn check_unifier(s: &Term, t: &Term) -> Result<(), TestCaseError> {
    let st = unify_terms(s, t, VarMode::Rigid);
    let ts = unify_terms(t, s, VarMode::Rigid);
    prop_assert_eq!(st.is_ok(), ts.is_ok());
    if let Ok(theta) = st {
        prop_assert_eq!(s.apply(&theta), t.apply(&theta));
        prop_assert_eq!(s.apply(&theta).apply(&theta), s.apply(&theta));
    }
    Ok(())
}

/// When a ground instance of `s` is given, unification succeeds with a
/// unifier at least as general as the instantiating substitution.
pub fn check_most_general(s: &Term, sigma: &Substitution) -> Result<(), TestCaseError> {
    let t = s.apply(sigma);
    let theta = unify_terms(s, &t, VarMode::Rigid);
    prop_assert!(theta.is_ok(), "{s:?} vs {t:?}");
    let theta = theta.unwrap();
    prop_assert_eq!(s.apply(&theta).apply(sigma), t);
    Ok(())
}

pub fn check_composition(t: &Term, s1: &Substitution, s2: &Substitution) -> Result<(), TestCaseError> {
    prop_assert_eq!(t.apply(&s1.then(s2)), t.apply(s1).apply(s2));
    let empty = Substitution::new();
    prop_assert_eq!(t.apply(&s1.then(&empty)), t.apply(s1));
    prop_assert_eq!(t.apply(&empty.then(s1)), t.apply(s1));
    Ok(())
}

pub fn formula_strategy() -> BoxedStrategy<Formula> {
    let var = prop::sample::select(vec!["X", "Y", "Z"]);
    let atom = (prop::sample::select(vec!["p", "q"]), var.clone(), prop::bool::ANY).prop_map(|(p, x, c)| {
        let arg = if c { Term::constant("k") } else { Term::var(x) };
        Formula::atom(p, vec![arg])
    });
    atom.prop_recursive(4, 16, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (var.clone(), inner.clone()).prop_map(|(x, b)| Formula::forall(x, b)),
            (var.clone(), inner).prop_map(|(x, b)| Formula::exists(x, b)),
        ]
    })
    .boxed()
}

/// Renames every binder to a fresh name, keeping free occurrences.
pub fn rename_bound(f: &Formula, tag: &str) -> Formula {
    fn go(f: &Formula, env: &mut Vec<(String, String)>, next: &mut usize, tag: &str) -> Formula {
        let term = |t: &Term, env: &Vec<(String, String)>| match t {
            Term::Var(x) => env
                .iter()
                .rev()
                .find(|(old, _)| old == x)
                .map_or_else(|| t.clone(), |(_, new)| Term::var(new.clone())),
            other => other.clone(),
        };
        match f {
            Formula::Atom(p, args) => Formula::atom(p.clone(), args.iter().map(|a| term(a, env)).collect()),
            Formula::Not(a) => Formula::not(go(a, env, next, tag)),
            Formula::And(a, b) => Formula::and(go(a, env, next, tag), go(b, env, next, tag)),
            Formula::Or(a, b) => Formula::or(go(a, env, next, tag), go(b, env, next, tag)),
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                *next += 1;
                let fresh = format!("{tag}{next}");
                env.push((x.clone(), fresh.clone()));
                let body = go(b, env, next, tag);
                env.pop();
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(fresh, body)
                } else {
                    Formula::exists(fresh, body)
                }
            }
            other => other.clone(),
        }
    }
    go(f, &mut Vec::new(), &mut 0, tag)
}

/// Alpha-equivalence behaves as an equivalence relation that ignores
/// bound names and respects free ones.
pub fn check_alpha(f: &Formula, g: &Formula) -> Result<(), TestCaseError> {
    let f1 = rename_bound(f, "U");
    let f2 = rename_bound(&f1, "W");
    prop_assert!(alpha_equal(f, f));
    prop_assert!(alpha_equal(f, &f1));
    prop_assert!(alpha_equal(&f1, f));
    prop_assert!(alpha_equal(&f1, &f2) && alpha_equal(f, &f2));
    prop_assert_eq!(alpha_equal(f, g), alpha_equal(g, f));
    if alpha_equal(f, g) {
        prop_assert_eq!(f.free_vars(), g.free_vars());
        prop_assert!(alpha_equal(&f1, &rename_bound(g, "V")));
    }
    Ok(())
}

/// Extending a branch never changes the branch it came from.
pub fn check_branch_extend(base: &[u32], add: &[u32]) -> Result<(), TestCaseError> {
    let b = Branch::new(base.iter().map(|h| HypId(*h)));
    let snapshot = b.clone();
    let ids: Vec<HypId> = add.iter().map(|h| HypId(*h)).collect();
    let c = b.extend(&ids);
    prop_assert_eq!(&b, &snapshot);
    for h in base.iter().chain(add) {
        prop_assert!(c.contains(HypId(*h)));
    }
    prop_assert_eq!(c.len(), b.len() + b.new_formulas(&ids).len());
    Ok(())
}

/// Search leaves its inputs untouched and repeats itself exactly.
pub fn check_search_inputs_untouched(seed: u64) -> Result<(), TestCaseError> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (axioms, goal, _) = random_prop_problem(&mut rng);
    let p = parse(&prop_problem(&axioms, &goal));
    let theory = build_theory(&p, "t", BuildOptions::default());
    let conj = p.conjecture().unwrap().formula.clone();
    let (t0, c0) = (theory.clone(), conj.clone());
    let cfg = SearchConfig { max_rule_applications: 400, ..quick_config() };
    let r1 = prove(&theory, &conj, &cfg);
    prop_assert_eq!(&theory, &t0);
    prop_assert_eq!(&conj, &c0);
    let r2 = prove(&theory, &conj, &cfg);
    prop_assert_eq!(r1.is_proof(), r2.is_proof());
    if let (Some(a), Some(b)) = (r1.proof(), r2.proof()) {
        prop_assert_eq!(&a.root, &b.root);
    }
    Ok(())
}

/// Pruned proofs still close every branch.
pub fn check_pruning(seed: u64) -> Result<(), TestCaseError> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (axioms, goal, _) = random_prop_problem(&mut rng);
    let out = run_text(&prop_problem(&axioms, &goal), &SearchConfig { max_rule_applications: 400, ..quick_config() });
    if let Some(tree) = out.result.proof() {
        let pruned = prune(tree);
        prop_assert!(validate(&pruned, &out.theory).is_ok());
        prop_assert!(pruned.root.size() <= tree.root.size());
        prop_assert_eq!(pruned.root.leaves(), tree.root.leaves());
    }
    Ok(())
}

/// Evaluates a quantifier-free formula whose atoms are looked up by
/// predicate name.
pub fn eval_formula(f: &Formula, v: &BTreeMap<String, bool>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p, _) => v[p],
        Formula::Not(a) => !eval_formula(a, v),
        Formula::And(a, b) => eval_formula(a, v) && eval_formula(b, v),
        Formula::Or(a, b) => eval_formula(a, v) || eval_formula(b, v),
        Formula::Implies(a, b) => !eval_formula(a, v) || eval_formula(b, v),
        Formula::Equiv(a, b) => eval_formula(a, v) == eval_formula(b, v),
        other => panic!("unexpected formula in branch: {other:?}"),
    }
}
