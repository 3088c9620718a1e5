//! Compilation of a proposition rewrite rule into a superdeduction rule, by
//! saturating a one-formula tableau with the closure, analytic and γ-M
//! rules.

use std::fmt;

use super::classify::{Polarity, PropositionRewriteRule};
use crate::logic::{Canonical, Formula, MetaId, Subst, Substitution, Term};

/// A compiled deduction rule: when a branch holds an instance of
/// `trigger`, the branch may be split into `branches`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperRule {
    pub name: String,
    /// Name of the axiom the rule comes from.
    pub axiom: String,
    pub polarity: Polarity,
    pub trigger: Formula,
    pub params: Vec<String>,
    /// Schema metavariables are `MetaId(0..fresh_metavars)`.
    pub branches: Vec<Vec<Formula>>,
    pub fresh_metavars: usize,
    pub fresh_epsilons: Vec<Term>,
    pub has_inst_variant: bool,
}

impl SuperRule {
    /// The rule's only effect is to close the branch.
    pub fn is_closing(&self) -> bool {
        self.branches.len() == 1 && self.branches[0] == [Formula::False]
    }

    pub fn is_branching(&self) -> bool {
        self.branches.len() > 1
    }
}

impl fmt::Display for SuperRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rule {} (axiom {})", self.name, self.axiom)?;
        writeln!(f, "  trigger: {}", self.trigger)?;
        let branches: Vec<String> = self
            .branches
            .iter()
            .map(|b| b.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "  branches: {}", branches.join(" | "))?;
        if self.has_inst_variant {
            write!(f, "\n  metavariables: {} (instantiation variant {}_inst)", self.fresh_metavars, self.name)?;
        }
        Ok(())
    }
}

struct Saturation {
    next_meta: u32,
    epsilons: Vec<Term>,
}

#[derive(Clone)]
struct Leaf {
    /// `(formula, canonical form, consumed)`
    formulas: Vec<(Formula, Formula, bool)>,
}

impl Leaf {
    fn push(&mut self, f: Formula) {
        if matches!(f, Formula::True) || matches!(&f, Formula::Not(g) if **g == Formula::False) {
            return;
        }
        let c = f.canonical();
        if !self.formulas.iter().any(|(_, d, _)| *d == c) {
            self.formulas.push((f, c, false));
        }
    }

    fn open_formulas(&self) -> Vec<Formula> {
        self.formulas.iter().filter(|(_, _, used)| !used).map(|(f, _, _)| f.clone()).collect()
    }
}

enum Step {
    Close,
    Extend(Vec<Formula>),
    Split(Vec<Vec<Formula>>),
}

impl Saturation {
    fn step(&mut self, f: &Formula) -> Option<Step> {
        use Formula::*;
        Some(match f {
            False => Step::Close,
            Not(g) if **g == True => Step::Close,
            Not(g) => match &**g {
                Not(h) => Step::Extend(vec![(**h).clone()]),
                Or(a, b) => Step::Extend(vec![a.negate(), b.negate()]),
                Implies(a, b) => Step::Extend(vec![(**a).clone(), b.negate()]),
                And(a, b) => Step::Split(vec![vec![a.negate()], vec![b.negate()]]),
                Equiv(a, b) => Step::Split(vec![
                    vec![a.negate(), (**b).clone()],
                    vec![(**a).clone(), b.negate()],
                ]),
                Forall(x, body) => {
                    let neg = body.negate();
                    let eps = Term::eps(x.clone(), neg.clone());
                    self.epsilons.push(eps.clone());
                    Step::Extend(vec![neg.apply(&Substitution::var(x.clone(), eps))])
                }
                Exists(x, body) => {
                    let m = self.fresh();
                    Step::Extend(vec![body.apply(&Substitution::var(x.clone(), m)).negate()])
                }
                _ => return None,
            },
            And(a, b) => Step::Extend(vec![(**a).clone(), (**b).clone()]),
            Or(a, b) => Step::Split(vec![vec![(**a).clone()], vec![(**b).clone()]]),
            Implies(a, b) => Step::Split(vec![vec![a.negate()], vec![(**b).clone()]]),
            Equiv(a, b) => Step::Split(vec![
                vec![a.negate(), b.negate()],
                vec![(**a).clone(), (**b).clone()],
            ]),
            Exists(x, body) => {
                let eps = Term::eps(x.clone(), (**body).clone());
                self.epsilons.push(eps.clone());
                Step::Extend(vec![body.apply(&Substitution::var(x.clone(), eps))])
            }
            Forall(x, body) => {
                let m = self.fresh();
                Step::Extend(vec![body.apply(&Substitution::var(x.clone(), m))])
            }
            _ => return None,
        })
    }

    fn fresh(&mut self) -> Term {
        let m = Term::Meta(MetaId(self.next_meta));
        self.next_meta += 1;
        m
    }

    /// Saturates one leaf; returns its open branches (`None` when closed).
    fn run(&mut self, mut leaf: Leaf, out: &mut Vec<Option<Vec<Formula>>>) {
        loop {
            let next = leaf
                .formulas
                .iter()
                .position(|(_, _, used)| !used)
                .and_then(|_| {
                    leaf.formulas
                        .iter()
                        .enumerate()
                        .filter(|(_, (_, _, used))| !used)
                        .find_map(|(i, (f, _, _))| self.step(f).map(|s| (i, s)))
                });
            let Some((i, step)) = next else {
                out.push(Some(leaf.open_formulas()));
                return;
            };
            leaf.formulas[i].2 = true;
            match step {
                Step::Close => {
                    out.push(None);
                    return;
                }
                Step::Extend(fs) => fs.into_iter().for_each(|f| leaf.push(f)),
                Step::Split(children) => {
                    for child in children {
                        let mut l = leaf.clone();
                        child.into_iter().for_each(|f| l.push(f));
                        self.run(l, out);
                    }
                    return;
                }
            }
        }
    }
}

/// Compiles `r` into a superdeduction rule. Variables of the right-hand
/// side that do not occur in the trigger are universally quantified first.
pub fn compile_superrule(r: &PropositionRewriteRule) -> SuperRule {
    let trigger_vars = r.lhs.free_vars().vars;
    let mut start = r.rhs.clone();
    let extra: Vec<&String> = r.params.iter().filter(|p| !trigger_vars.contains(*p)).collect();
    for v in extra.into_iter().rev() {
        start = Formula::forall(v.clone(), start);
    }
    let mut sat = Saturation { next_meta: 0, epsilons: Vec::new() };
    let mut leaf = Leaf { formulas: Vec::new() };
    if start == Formula::False {
        leaf.formulas.push((Formula::False, Formula::False, false));
    } else {
        leaf.push(start);
    }
    let mut results = Vec::new();
    sat.run(leaf, &mut results);
    let mut branches: Vec<Vec<Formula>> = results.into_iter().flatten().collect();
    if branches.is_empty() {
        branches.push(vec![Formula::False]);
    }
    let fresh_metavars = sat.next_meta as usize;
    SuperRule {
        name: r.name.clone(),
        axiom: r.axiom.clone(),
        polarity: r.polarity,
        trigger: r.lhs.clone(),
        params: r.params.clone(),
        branches,
        fresh_metavars,
        fresh_epsilons: sat.epsilons,
        has_inst_variant: fresh_metavars > 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::classify::{classify_axiom, derive_prrs};
    use crate::logic::alpha_equal;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    fn mem(x: Term, s: &str) -> Formula {
        Formula::atom("in", vec![x, v(s)])
    }

    fn inc_axiom() -> Formula {
        Formula::equiv(
            Formula::atom("subset", vec![v("A"), v("B")]),
            Formula::forall("X", Formula::implies(mem(v("X"), "A"), mem(v("X"), "B"))),
        )
    }

    #[test]
    fn inclusion_positive() {
        let prrs = derive_prrs(&classify_axiom(&inc_axiom()), "inc").unwrap();
        let r = compile_superrule(&prrs[0]);
        let x = Term::Meta(MetaId(0));
        assert_eq!(r.trigger, Formula::atom("subset", vec![v("A"), v("B")]));
        assert_eq!(r.branches, vec![vec![Formula::not(mem(x.clone(), "A"))], vec![mem(x, "B")]]);
        assert_eq!(r.fresh_metavars, 1);
        assert!(r.has_inst_variant);
    }

    #[test]
    fn inclusion_negative() {
        let prrs = derive_prrs(&classify_axiom(&inc_axiom()), "inc").unwrap();
        let r = compile_superrule(&prrs[1]);
        let eps = Term::eps("Y", Formula::not(Formula::implies(mem(v("Y"), "A"), mem(v("Y"), "B"))));
        assert_eq!(r.branches.len(), 1);
        let b = &r.branches[0];
        assert_eq!(b.len(), 2);
        assert!(alpha_equal(&b[0], &mem(eps.clone(), "A")));
        assert!(alpha_equal(&b[1], &Formula::not(mem(eps, "B"))));
        assert!(!r.has_inst_variant);
        assert_eq!(r.fresh_epsilons.len(), 1);
    }

    #[test]
    fn set_equality_negative_branches() {
        let ax = Formula::equiv(
            Formula::atom("b_eq", vec![v("A"), v("B")]),
            Formula::forall("X", Formula::equiv(mem(v("X"), "A"), mem(v("X"), "B"))),
        );
        let prrs = derive_prrs(&classify_axiom(&ax), "b_eq").unwrap();
        let r = compile_superrule(&prrs[1]);
        let eps = Term::eps("X", Formula::not(Formula::equiv(mem(v("X"), "A"), mem(v("X"), "B"))));
        let expect = vec![
            vec![Formula::not(mem(eps.clone(), "A")), mem(eps.clone(), "B")],
            vec![mem(eps.clone(), "A"), Formula::not(mem(eps, "B"))],
        ];
        assert_eq!(r.branches.len(), 2);
        for (got, want) in r.branches.iter().zip(&expect) {
            assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(want) {
                assert!(alpha_equal(g, w), "{g} vs {w}");
            }
        }
    }

    #[test]
    fn universal_atom_gives_closing_rule() {
        let prrs = derive_prrs(&classify_axiom(&Formula::atom("country", vec![Term::constant("usa")])), "usa_type").unwrap();
        assert!(compile_superrule(&prrs[0]).is_closing());
    }

    #[test]
    fn contradictory_literals_are_kept() {
        // b_in(X, b_empty) <=> (b_in(X, b_BIG) & ~b_in(X, b_BIG))
        let big = |x: Term| Formula::atom("b_in", vec![x, Term::constant("b_BIG")]);
        let ax = Formula::equiv(
            Formula::atom("b_in", vec![v("X"), Term::constant("b_empty")]),
            Formula::and(big(v("X")), Formula::not(big(v("X")))),
        );
        let prrs = derive_prrs(&classify_axiom(&ax), "b_in_empty").unwrap();
        let r = compile_superrule(&prrs[0]);
        assert_eq!(r.branches, vec![vec![big(v("X")), Formula::not(big(v("X")))]]);
    }

    #[test]
    fn falsum_branches_are_dropped_beside_open_ones() {
        let ax = Formula::implies(Formula::atom("p", vec![]), Formula::or(Formula::atom("q", vec![]), Formula::False));
        let prrs = derive_prrs(&classify_axiom(&ax), "r").unwrap();
        let r = compile_superrule(&prrs[0]);
        assert_eq!(r.branches, vec![vec![Formula::atom("q", vec![])]]);
    }

    #[test]
    fn variables_outside_trigger_become_metavariables() {
        // p(X) => q(X, Y)
        let ax = Formula::implies(
            Formula::atom("p", vec![v("X")]),
            Formula::and(Formula::atom("q", vec![v("X"), v("Y")]), Formula::atom("r", vec![])),
        );
        let prrs = derive_prrs(&classify_axiom(&ax), "r").unwrap();
        let r = compile_superrule(&prrs[0]);
        assert_eq!(r.fresh_metavars, 1);
        assert_eq!(r.branches[0][0], Formula::atom("q", vec![v("X"), Term::Meta(MetaId(0))]));
    }
}
