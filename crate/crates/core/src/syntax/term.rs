use std::fmt;

use crate::rational::Q;

/// A term. Infix operators are kept as dedicated nodes; each one resolves
/// to a function symbol of [`super::signature::ops`] when interpreted in a
/// finite structure, and to the built-in operation in the virtual models
/// (prime-field vector spaces, the rational ordered group).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// A rational literal used as a parameter (never names a declared constant).
    Num(Q),
    /// Application of a declared function symbol; constants have no arguments.
    App(String, Vec<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Scale(Q, Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), vec![])
    }

    pub fn num(q: Q) -> Term {
        Term::Num(q)
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Term) -> Term {
        Term::Neg(Box::new(a))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn scale(c: Q, a: Term) -> Term {
        Term::Scale(c, Box::new(a))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    /// Appends variables in first-occurrence order, skipping ones already present.
    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Num(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Neg(a) | Term::Scale(_, a) => a.collect_vars(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Meet(a, b) | Term::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn mentions(&self, v: &str) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Num(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.mentions(v)),
            Term::Neg(a) | Term::Scale(_, a) => a.mentions(v),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Meet(a, b) | Term::Join(a, b) => {
                a.mentions(v) || b.mentions(v)
            }
        }
    }

    pub fn substitute(&self, v: &str, t: &Term) -> Term {
        self.map_vars(&|w| if w == v { Some(t.clone()) } else { None })
    }

    /// Replaces every variable for which `f` returns a term.
    pub fn map_vars(&self, f: &dyn Fn(&str) -> Option<Term>) -> Term {
        let bx = |a: &Term| Box::new(a.map_vars(f));
        match self {
            Term::Var(w) => f(w).unwrap_or_else(|| self.clone()),
            Term::Num(_) => self.clone(),
            Term::App(s, args) => Term::App(s.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
            Term::Add(a, b) => Term::Add(bx(a), bx(b)),
            Term::Sub(a, b) => Term::Sub(bx(a), bx(b)),
            Term::Neg(a) => Term::Neg(bx(a)),
            Term::Mul(a, b) => Term::Mul(bx(a), bx(b)),
            Term::Scale(c, a) => Term::Scale(c.clone(), bx(a)),
            Term::Meet(a, b) => Term::Meet(bx(a), bx(b)),
            Term::Join(a, b) => Term::Join(bx(a), bx(b)),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Term::Meet(..) | Term::Join(..) => 1,
            Term::Add(..) | Term::Sub(..) => 2,
            Term::Mul(..) | Term::Scale(..) => 3,
            Term::Neg(..) => 4,
            Term::Num(q) if q < &crate::rational::zero() => 4,
            _ => 5,
        }
    }

    /// Prints as a numeric token that the parser would read as a literal.
    fn looks_numeric(&self) -> bool {
        match self {
            Term::Num(_) => true,
            Term::App(name, args) => args.is_empty() && name.starts_with(|c: char| c.is_ascii_digit()),
            _ => false,
        }
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, t: &Term, min_prec: u8) -> fmt::Result {
    if t.prec() < min_prec {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Num(q) => write!(f, "{q}"),
            Term::App(s, args) if args.is_empty() => write!(f, "{s}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::Add(a, b) | Term::Sub(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "{}", if matches!(self, Term::Add(..)) { " + " } else { " - " })?;
                wrap(f, b, 3)
            }
            Term::Meet(a, b) | Term::Join(a, b) => {
                let meet = matches!(self, Term::Meet(..));
                // Parenthesize sums and mixed lattice operands even where
                // precedence makes it unnecessary.
                let bare = |t: &Term, left: bool| match t {
                    Term::Add(..) | Term::Sub(..) => false,
                    Term::Meet(..) => left && meet,
                    Term::Join(..) => left && !meet,
                    _ => true,
                };
                for (i, t) in [a, b].into_iter().enumerate() {
                    if i == 1 {
                        write!(f, "{}", if meet { " /\\ " } else { " \\/ " })?;
                    }
                    if bare(t, i == 0) {
                        wrap(f, t, if i == 0 { 1 } else { 2 })?;
                    } else {
                        write!(f, "({t})")?;
                    }
                }
                Ok(())
            }
            Term::Mul(a, b) => {
                if a.looks_numeric() {
                    write!(f, "({a})")?;
                } else {
                    wrap(f, a, 3)?;
                }
                write!(f, "*")?;
                wrap(f, b, 4)
            }
            Term::Scale(c, a) => {
                write!(f, "{c}*")?;
                wrap(f, a, 4)
            }
            Term::Neg(a) => match a.as_ref() {
                Term::Var(_) => write!(f, "-{a}"),
                Term::App(name, _) if !a.looks_numeric() && !name.is_empty() => write!(f, "-{a}"),
                _ => write!(f, "-({a})"),
            },
        }
    }
}
