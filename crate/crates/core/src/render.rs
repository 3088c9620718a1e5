//! Numbered textual proof traces.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::engine::{HypId, ProofNode, ProofTree, RuleKind};
use crate::logic::{Canonical, Formula, Term};
use crate::tptp::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    /// Collapse the initial run of δ and α steps on the negated goal.
    pub compress_preamble: bool,
    /// Merge chains of β steps from one formula into a single n-ary step.
    pub flatten_disjunctions: bool,
    /// Append the ε-terms behind the `T_n` names.
    pub legend: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { compress_preamble: true, flatten_disjunctions: true, legend: false }
    }
}

/// Surface name of a rule in traces.
pub fn rule_label(kind: &RuleKind, tag: &str) -> String {
    let s = match kind {
        RuleKind::Close => "Axiom",
        RuleKind::CloseFalse => "False",
        RuleKind::CloseNotTrue => "NotTrue",
        RuleKind::CloseRefl => "Refl",
        RuleKind::CloseSym | RuleKind::Sym => "Sym",
        RuleKind::NotNot => "NotNot",
        RuleKind::And => "And",
        RuleKind::NotOr => "NotOr",
        RuleKind::NotImply => "NotImply",
        RuleKind::Or => "Or",
        RuleKind::NotAnd => "NotAnd",
        RuleKind::Imply => "Imply",
        RuleKind::Equiv => "Equiv",
        RuleKind::NotEquiv => "NotEquiv",
        RuleKind::Ex => "Ex",
        RuleKind::NotAll => "NotAll",
        RuleKind::AllMeta | RuleKind::AllInst => "All",
        RuleKind::NotExMeta | RuleKind::NotExInst => "NotEx",
        RuleKind::Pred => "P-NotP",
        RuleKind::Fun => "Fun",
        RuleKind::NotRefl => "NotRefl",
        RuleKind::Trans => "Trans",
        RuleKind::TransSym => "TransSym",
        RuleKind::TransEq => "TransEq",
        RuleKind::TransEqSym => "TransEqSym",
        RuleKind::Cut => "Cut",
        RuleKind::Super { name, inst, .. } => {
            return format!("Extension/{tag}/{name}{}", if *inst { "_inst" } else { "" });
        }
    };
    s.to_owned()
}

fn fresh(add: &[HypId], branch: &[HypId]) -> Vec<HypId> {
    let mut out = Vec::new();
    for h in add {
        if !branch.contains(h) && !out.contains(h) {
            out.push(*h);
        }
    }
    out
}

fn prune_node(node: &ProofNode, branch: &[HypId]) -> ProofNode {
    if node.children.len() == 1 {
        let add = fresh(&node.applied.children[0], branch);
        let below = node.children[0].used();
        if add.iter().all(|h| !below.contains(h)) {
            return prune_node(&node.children[0], branch);
        }
    }
    let children = node
        .children
        .iter()
        .zip(&node.applied.children)
        .map(|(c, add)| {
            let mut b = branch.to_vec();
            b.extend(fresh(add, branch));
            prune_node(c, &b)
        })
        .collect();
    ProofNode { hyps: branch.to_vec(), applied: node.applied.clone(), children }
}

/// Removes single-child steps whose additions no later step uses. The
/// result is still a closed tableau for the same initial branch.
pub fn prune(tree: &ProofTree) -> ProofTree {
    ProofTree { root: prune_node(&tree.root, &tree.initial), ..tree.clone() }
}

/// A step as displayed.
struct View {
    kind: RuleKind,
    label: String,
    principal: Vec<HypId>,
    /// Ids mentioned on the rule line.
    listed: Vec<HypId>,
    /// Formulas that became available at this step.
    new: Vec<HypId>,
    hidden: usize,
    children: Vec<View>,
}

impl View {
    fn used(&self, out: &mut BTreeSet<HypId>) {
        out.extend(self.principal.iter().copied());
        for c in &self.children {
            c.used(out);
        }
    }
}

fn build(node: &ProofNode, new: Vec<HypId>, tag: &str) -> View {
    let branch = &node.hyps;
    let mut listed = node.applied.principal.clone();
    let adds: Vec<Vec<HypId>> = node.applied.children.iter().map(|a| fresh(a, branch)).collect();
    if matches!(node.applied.rule, RuleKind::Super { .. }) {
        for a in &adds {
            for h in a {
                if !listed.contains(h) {
                    listed.push(*h);
                }
            }
        }
    }
    View {
        kind: node.applied.rule.clone(),
        label: rule_label(&node.applied.rule, tag),
        principal: node.applied.principal.clone(),
        listed,
        new,
        hidden: 0,
        children: node.children.iter().zip(adds).map(|(c, a)| build(c, a, tag)).collect(),
    }
}

fn flatten(v: &mut View) {
    for c in &mut v.children {
        flatten(c);
    }
    if !v.kind.is_beta() {
        return;
    }
    let mut out = Vec::new();
    let mut merged = false;
    let mut queue: Vec<View> = std::mem::take(&mut v.children);
    queue.reverse();
    while let Some(mut c) = queue.pop() {
        let p = c.principal.first().copied();
        let mergeable = (c.kind.is_beta() || c.label == "DisjTree") && p.is_some_and(|p| c.new.contains(&p));
        if mergeable {
            merged = true;
            let inherited: Vec<HypId> = c.new.iter().copied().filter(|h| Some(*h) != p).collect();
            let mut grand = std::mem::take(&mut c.children);
            for g in &mut grand {
                let mut n = inherited.clone();
                n.extend(g.new.iter().copied());
                g.new = n;
            }
            for g in grand.into_iter().rev() {
                queue.push(g);
            }
        } else {
            out.push(c);
        }
    }
    if merged && out.len() >= 3 {
        v.label = "DisjTree".to_owned();
    }
    v.children = out;
}

fn compress(root: &mut View) {
    const PREAMBLE: [&str; 6] = ["NotAll", "Ex", "And", "NotImply", "NotOr", "NotNot"];
    let Some(&goal) = root.principal.first() else { return };
    let mut known: BTreeSet<HypId> = [goal].into();
    let mut chain = 0;
    let mut carried: Vec<HypId> = Vec::new();
    {
        let mut cur: &View = root;
        while cur.children.len() == 1
            && PREAMBLE.contains(&cur.label.as_str())
            && cur.principal.len() == 1
            && known.contains(&cur.principal[0])
        {
            let next = &cur.children[0];
            known.extend(next.new.iter().copied());
            carried.extend(next.new.iter().copied());
            chain += 1;
            cur = next;
        }
    }
    if chain < 2 {
        return;
    }
    let mut cur = std::mem::take(&mut root.children[0]);
    for _ in 1..chain {
        cur = cur.children.pop().expect("chain node has one child");
    }
    let mut new = carried;
    new.retain(|h| !cur.new.contains(h));
    new.extend(cur.new.iter().copied());
    cur.new = new;
    root.label = "NotAllEx".to_owned();
    root.listed = vec![goal];
    root.hidden = chain - 1;
    root.children = vec![cur];
}

impl Default for View {
    fn default() -> Self {
        View {
            kind: RuleKind::Close,
            label: String::new(),
            principal: Vec::new(),
            listed: Vec::new(),
            new: Vec::new(),
            hidden: 0,
            children: Vec::new(),
        }
    }
}

struct Printer<'a> {
    tree: &'a ProofTree,
    hyp_names: HashMap<HypId, usize>,
    term_names: HashMap<Term, usize>,
    terms: Vec<Term>,
    next_step: usize,
    out: String,
}

impl Printer<'_> {
    fn hyp(&mut self, h: HypId) -> String {
        let n = self.hyp_names.len();
        format!("H{}", *self.hyp_names.entry(h).or_insert(n))
    }

    fn term(&mut self, t: &Term) -> String {
        match t {
            Term::Var(x) => x.clone(),
            Term::Meta(_) | Term::Eps(..) => {
                let key = t.canonical();
                let n = match self.term_names.get(&key) {
                    Some(n) => *n,
                    None => {
                        let n = self.terms.len() + 1;
                        self.term_names.insert(key, n);
                        self.terms.push(t.clone());
                        n
                    }
                };
                format!("T_{n}")
            }
            Term::App(f, args) if args.is_empty() => format!("({f})"),
            Term::App(f, args) => {
                let mut s = format!("({f}");
                for a in args {
                    s.push(' ');
                    s.push_str(&self.term(a));
                }
                s.push(')');
                s
            }
        }
    }

    fn formula(&mut self, f: &Formula) -> String {
        use Formula::*;
        match f {
            True => "True".to_owned(),
            False => "False".to_owned(),
            Atom(p, args) if args.is_empty() => p.clone(),
            Atom(p, args) => {
                let mut s = format!("({p}");
                for a in args {
                    s.push(' ');
                    s.push_str(&self.term(a));
                }
                s.push(')');
                s
            }
            Eq(a, b) => format!("({} = {})", self.term(a), self.term(b)),
            Not(g) => match &**g {
                Eq(a, b) => format!("({} != {})", self.term(a), self.term(b)),
                _ => format!("(-. {})", self.formula(g)),
            },
            And(a, b) => format!("({} /\\ {})", self.formula(a), self.formula(b)),
            Or(a, b) => format!("({} \\/ {})", self.formula(a), self.formula(b)),
            Implies(a, b) => format!("({} => {})", self.formula(a), self.formula(b)),
            Equiv(a, b) => format!("({} <=> {})", self.formula(a), self.formula(b)),
            Forall(x, b) => format!("(All {x}, {})", self.formula(b)),
            Exists(x, b) => format!("(Ex {x}, {})", self.formula(b)),
        }
    }

    fn step(&mut self, v: &View, number: usize, used_below: &dyn Fn(&View) -> BTreeSet<HypId>) {
        let used = used_below(v);
        let mut shown: Vec<HypId> = v.new.iter().copied().filter(|h| used.contains(h)).collect();
        shown.sort();
        shown.dedup();
        let mut lines = Vec::new();
        for h in shown {
            let name = self.hyp(h);
            let f = self.formula(self.tree.hyps.get(h));
            lines.push(format!("{name}: {f}"));
        }
        let mut rule = format!("### [{}", v.label);
        for h in &v.listed {
            rule.push(' ');
            rule.push_str(&self.hyp(*h));
        }
        rule.push(']');
        let first_child = self.next_step + v.hidden;
        let numbers: Vec<usize> = (0..v.children.len()).map(|i| first_child + i).collect();
        self.next_step = first_child + v.children.len();
        if !numbers.is_empty() {
            rule.push_str(" -->");
            if v.hidden > 0 {
                rule.push_str(" [...]");
            }
            for n in &numbers {
                let _ = write!(rule, " {n}");
            }
        }
        lines.push(rule);
        let _ = writeln!(self.out, "{number:>4}. {}", lines[0]);
        for l in &lines[1..] {
            let _ = writeln!(self.out, "      {l}");
        }
        for (c, n) in v.children.iter().zip(numbers) {
            self.step(c, n, used_below);
        }
    }
}

/// Renders a closed tableau as a numbered trace. Only hypotheses used at
/// or below a step are displayed there.
pub fn render(tree: &ProofTree, problem: &Problem, tag: &str, opts: RenderOptions) -> String {
    let tree = prune(tree);
    let mut root = build(&tree.root, tree.initial.clone(), tag);
    if opts.flatten_disjunctions {
        flatten(&mut root);
    }
    if opts.compress_preamble {
        compress(&mut root);
    }
    let mut p = Printer {
        tree: &tree,
        hyp_names: HashMap::new(),
        term_names: HashMap::new(),
        terms: Vec::new(),
        next_step: 2,
        out: String::new(),
    };
    match problem.conjecture() {
        Some(c) => {
            let _ = writeln!(p.out, "{c}");
        }
        None => {
            let _ = writeln!(p.out, "% no conjecture: refuting the axioms");
        }
    }
    let _ = writeln!(p.out, "(* PROOF-FOUND *)");
    let used_below = |v: &View| {
        let mut s = BTreeSet::new();
        v.used(&mut s);
        s
    };
    p.step(&root, 1, &used_below);
    if opts.legend && !p.terms.is_empty() {
        let terms = p.terms.clone();
        for (i, t) in terms.iter().enumerate() {
            let text = match t {
                Term::Eps(x, body) => format!("(Eps {x}, {})", p.formula(body)),
                other => format!("metavariable {other}"),
            };
            let _ = writeln!(p.out, "(* T_{} := {text} *)", i + 1);
        }
    }
    p.out
}

/// Rule-name multiset and closure count of a rendered trace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Skeleton {
    pub rules: BTreeMap<String, usize>,
    pub leaves: usize,
}

impl Skeleton {
    pub fn count(&self, rule: &str) -> usize {
        self.rules.get(rule).copied().unwrap_or(0)
    }

    /// Children of the first step using `rule`.
    pub fn arity_of(trace: &str, rule: &str) -> Option<usize> {
        trace.lines().find_map(|l| {
            let l = l.trim();
            let at = l.find("### [")?;
            let body = &l[at + 5..];
            let name = body.split([' ', ']']).next()?;
            if name != rule {
                return None;
            }
            Some(l.split("-->").nth(1).map_or(0, |s| s.split_whitespace().filter(|w| *w != "[...]").count()))
        })
    }
}

impl std::fmt::Display for Skeleton {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (r, n) in &self.rules {
            writeln!(f, "{r} x{n}")?;
        }
        write!(f, "closed leaves: {}", self.leaves)
    }
}

/// Normalizes a trace to its skeleton: which rules fire how often, and
/// how many branches close.
pub fn skeleton(trace: &str) -> Skeleton {
    let mut s = Skeleton::default();
    for l in trace.lines() {
        let Some(at) = l.find("### [") else { continue };
        let body = &l[at + 5..];
        let Some(name) = body.split([' ', ']']).next() else { continue };
        *s.rules.entry(name.to_owned()).or_default() += 1;
        if !l.contains("-->") {
            s.leaves += 1;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::compiler::{build_theory, BuildOptions};
    use crate::engine::{prove, SearchConfig};
    use crate::tptp::parse_problem;

    fn trace(text: &str) -> String {
        let p = parse_problem(text, Path::new("t.p")).unwrap();
        let t = build_theory(&p, "t", BuildOptions::default());
        let r = prove(&t, &p.conjecture().unwrap().formula, &SearchConfig::default());
        render(r.proof().expect("proof"), &p, "t", RenderOptions::default())
    }

    #[test]
    fn reflexivity_trace() {
        let s = trace("fof(g, conjecture, a = a).");
        assert!(s.contains("(* PROOF-FOUND *)"));
        assert!(s.contains("   1. H0: ((a) != (a))\n      ### [Refl H0]\n"), "{s}");
    }

    #[test]
    fn unused_hypotheses_are_hidden() {
        let s = trace("fof(h, axiom, q). fof(g, conjecture, p => p).");
        assert!(!s.contains(" q"), "{s}");
        assert_eq!(skeleton(&s).leaves, 1);
    }

    #[test]
    fn disjunction_chain_is_flattened() {
        let s = trace("fof(h, axiom, a | (b | (c | d))). fof(g, conjecture, a | b | c | d).");
        assert_eq!(Skeleton::arity_of(&s, "DisjTree"), Some(4), "{s}");
    }

    #[test]
    fn preamble_is_compressed() {
        let s = trace("fof(h, axiom, ![X]: p(X)). fof(g, conjecture, ![X]: ![Y]: (p(X) & p(Y))).");
        assert!(s.contains("### [NotAllEx H0] --> [...]"), "{s}");
    }

    #[test]
    fn rendering_is_deterministic() {
        let text = "fof(h, axiom, ![X]: (p(X) => q(X))). fof(g, conjecture, p(a) => q(a)).";
        assert_eq!(trace(text), trace(text));
    }

    #[test]
    fn skeleton_counts_rules_and_leaves() {
        let s = "   1. H0: x\n      ### [NotAnd H0] --> 2 3\n   2. H1: y\n      ### [Axiom H1 H2]\n   3. ### [Axiom H3 H4]\n";
        let sk = skeleton(s);
        assert_eq!(sk.count("Axiom"), 2);
        assert_eq!(sk.count("NotAnd"), 1);
        assert_eq!(sk.leaves, 2);
        assert_eq!(Skeleton::arity_of(s, "NotAnd"), Some(2));
    }
}
