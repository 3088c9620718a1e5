//! TPTP fof surface syntax for terms and formulas.

use std::fmt;

use super::term::{Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Meta(m) => write!(f, "{m}"),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::Eps(x, body) => write!(f, "@eps[{x}]:({body})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "$true"),
            Formula::False => write!(f, "$false"),
            Formula::Atom(p, args) => write!(f, "{}", Term::App(p.clone(), args.clone())),
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::Not(a) => match &**a {
                Formula::Eq(l, r) => write!(f, "{l} != {r}"),
                a => write!(f, "~ ({a})"),
            },
            Formula::And(a, b) => write!(f, "({a}) & ({b})"),
            Formula::Or(a, b) => write!(f, "({a}) | ({b})"),
            Formula::Implies(a, b) => write!(f, "({a}) => ({b})"),
            Formula::Equiv(a, b) => write!(f, "({a}) <=> ({b})"),
            Formula::Forall(x, body) => write!(f, "! [{x}] : ({body})"),
            Formula::Exists(x, body) => write!(f, "? [{x}] : ({body})"),
        }
    }
}
