use std::path::Path;

use super::lexer::{tokenize, Spanned, Tok};
use super::{AnnotatedFormula, ParseError, Problem, Role, Source, Statement};
use crate::logic::{Formula, Term};

/// Parses fof text. Include directives are recorded, not followed.
pub fn parse_problem(text: &str, origin: &Path) -> Result<Problem, ParseError> {
    let name = origin.display().to_string();
    let toks = tokenize(text, &name)?;
    let mut p = Parser { toks, pos: 0, file: name, bound: Vec::new() };
    let mut statements = Vec::new();
    while p.peek() != &Tok::Eof {
        statements.push(p.statement()?);
    }
    let problem = Problem { origin: origin.to_path_buf(), statements, include_paths: Vec::new() };
    problem.validate()?;
    Ok(problem)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    file: String,
    bound: Vec<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let at = &self.toks[self.pos];
        ParseError::Syntax {
            file: self.file.clone(),
            line: at.line,
            col: at.col,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.peek().describe()), &[t.symbol()]))
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.bump() {
            Tok::Lower(s) | Tok::Quoted(s) | Tok::Number(s) => Ok(s),
            _ => {
                self.pos -= 1;
                Err(self.error(format!("unexpected {}", self.peek().describe()), &["name"]))
            }
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        let line = self.toks[self.pos].line;
        let source = Source { file: self.file.clone(), line };
        let kw = match self.peek() {
            Tok::Lower(w) => w.clone(),
            _ => return Err(self.error(format!("unexpected {}", self.peek().describe()), &["fof", "include"])),
        };
        match kw.as_str() {
            "include" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let path = match self.bump() {
                    Tok::Quoted(p) => p,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("include needs a quoted file name", &["quoted atom"]));
                    }
                };
                if *self.peek() == Tok::Comma {
                    self.bump();
                    self.skip_general_term()?;
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                Ok(Statement::Include { path, source })
            }
            "fof" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let name = self.name()?;
                self.expect(Tok::Comma)?;
                let role_pos = self.pos;
                let role = match self.name()?.as_str() {
                    "axiom" | "definition" | "lemma" | "theorem" | "assumption" => Role::Axiom,
                    "hypothesis" => Role::Hypothesis,
                    "conjecture" => Role::Conjecture,
                    other => {
                        self.pos = role_pos;
                        return Err(self.error(
                            format!("unsupported role {other}"),
                            &["axiom", "hypothesis", "conjecture"],
                        ));
                    }
                };
                self.expect(Tok::Comma)?;
                let formula = self.formula()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    self.skip_general_term()?;
                    if *self.peek() == Tok::Comma {
                        self.bump();
                        self.skip_general_term()?;
                    }
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                Ok(Statement::Formula(AnnotatedFormula { name, role, formula, source }))
            }
            "cnf" | "tff" | "thf" => Err(self.error(format!("{kw} is not supported, only fof"), &["fof", "include"])),
            _ => Err(self.error(format!("unexpected {kw}"), &["fof", "include"])),
        }
    }

    /// Annotations are parsed for balance and thrown away.
    fn skip_general_term(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::LParen | Tok::LBrack => depth += 1,
                Tok::RParen | Tok::RBrack if depth == 0 => return Ok(()),
                Tok::RParen | Tok::RBrack => depth -= 1,
                Tok::Comma if depth == 0 => return Ok(()),
                Tok::Eof => return Err(self.error("unterminated annotation", &[")"])),
                _ => {}
            }
            self.bump();
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.unitary()?;
        match self.peek().clone() {
            Tok::Amp | Tok::Pipe => {
                let op = self.bump();
                let rhs = self.assoc_chain(&op)?;
                Ok(if op == Tok::Amp { Formula::and(lhs, rhs) } else { Formula::or(lhs, rhs) })
            }
            Tok::Implies => {
                self.bump();
                Ok(Formula::implies(lhs, self.unitary()?))
            }
            Tok::RevImplies => {
                self.bump();
                Ok(Formula::implies(self.unitary()?, lhs))
            }
            Tok::Equiv => {
                self.bump();
                Ok(Formula::equiv(lhs, self.unitary()?))
            }
            Tok::Xor => {
                self.bump();
                Ok(Formula::not(Formula::equiv(lhs, self.unitary()?)))
            }
            Tok::Nor => {
                self.bump();
                Ok(Formula::not(Formula::or(lhs, self.unitary()?)))
            }
            Tok::Nand => {
                self.bump();
                Ok(Formula::not(Formula::and(lhs, self.unitary()?)))
            }
            _ => Ok(lhs),
        }
    }

    /// `a & b & c` nests to the right: `a & (b & c)`.
    fn assoc_chain(&mut self, op: &Tok) -> PResult<Formula> {
        let first = self.unitary()?;
        if self.peek() == op {
            self.bump();
            let rest = self.assoc_chain(op)?;
            return Ok(if *op == Tok::Amp { Formula::and(first, rest) } else { Formula::or(first, rest) });
        }
        if matches!(self.peek(), Tok::Amp | Tok::Pipe | Tok::Implies | Tok::RevImplies | Tok::Equiv | Tok::Xor | Tok::Nor | Tok::Nand) {
            return Err(self.error("mixed binary connectives need parentheses", &[op.symbol(), ")"]));
        }
        Ok(first)
    }

    fn unitary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Bang | Tok::Question => {
                let universal = self.bump() == Tok::Bang;
                self.expect(Tok::LBrack)?;
                let mut vars = Vec::new();
                loop {
                    match self.bump() {
                        Tok::Upper(v) => vars.push(v),
                        _ => {
                            self.pos -= 1;
                            return Err(self.error("expected a variable", &["variable"]));
                        }
                    }
                    match self.bump() {
                        Tok::Comma => continue,
                        Tok::RBrack => break,
                        _ => {
                            self.pos -= 1;
                            return Err(self.error(format!("unexpected {}", self.peek().describe()), &[",", "]"]));
                        }
                    }
                }
                self.expect(Tok::Colon)?;
                let n = vars.len();
                self.bound.extend(vars.iter().cloned());
                let body = self.unitary();
                self.bound.truncate(self.bound.len() - n);
                let mut body = body?;
                for v in vars.into_iter().rev() {
                    body = if universal { Formula::forall(v, body) } else { Formula::exists(v, body) };
                }
                Ok(body)
            }
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unitary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.atomic(),
        }
    }

    fn atomic(&mut self) -> PResult<Formula> {
        if let Tok::Dollar(w) = self.peek().clone() {
            match w.as_str() {
                "$true" => {
                    self.bump();
                    return Ok(Formula::True);
                }
                "$false" => {
                    self.bump();
                    return Ok(Formula::False);
                }
                _ => {}
            }
        }
        let start = self.pos;
        let lhs = self.term()?;
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(Formula::eq(lhs, self.term()?))
            }
            Tok::Neq => {
                self.bump();
                Ok(Formula::not(Formula::eq(lhs, self.term()?)))
            }
            _ => match lhs {
                Term::App(p, args) => Ok(Formula::Atom(p, args)),
                _ => {
                    self.pos = start;
                    Err(self.error("a variable is not a formula", &["=", "!="]))
                }
            },
        }
    }

    fn term(&mut self) -> PResult<Term> {
        match self.bump() {
            Tok::Upper(v) => Ok(Term::Var(v)),
            Tok::Lower(f) | Tok::Quoted(f) | Tok::Number(f) | Tok::Dollar(f) => {
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    loop {
                        args.push(self.term()?);
                        match self.bump() {
                            Tok::Comma => continue,
                            Tok::RParen => break,
                            _ => {
                                self.pos -= 1;
                                return Err(self.error(format!("unexpected {}", self.peek().describe()), &[",", ")"]));
                            }
                        }
                    }
                }
                Ok(Term::App(f, args))
            }
            _ => {
                self.pos -= 1;
                Err(self.error(format!("unexpected {}", self.peek().describe()), &["term"]))
            }
        }
    }
}
