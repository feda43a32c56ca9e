use std::fmt;

use super::term::Term;
use crate::rational::{self, Q};

/// A formula of continuous logic. The affine fragment excludes `Meet`,
/// `Join` and `Neg`; `Neg(f)` abbreviates `1 - f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const(Q),
    Atom(String, Vec<Term>),
    Dist(Term, Term),
    Sum(Box<Formula>, Box<Formula>),
    Scale(Q, Box<Formula>),
    Sup(String, Box<Formula>),
    Inf(String, Box<Formula>),
    Meet(Box<Formula>, Box<Formula>),
    Join(Box<Formula>, Box<Formula>),
    Neg(Box<Formula>),
}

impl Formula {
    pub fn constant(q: Q) -> Formula {
        Formula::Const(q)
    }

    pub fn one() -> Formula {
        Formula::Const(rational::one())
    }

    pub fn atom(rel: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(rel.to_string(), args)
    }

    pub fn dist(a: Term, b: Term) -> Formula {
        Formula::Dist(a, b)
    }

    /// `|t|`, i.e. `d(t, 0)` for the constant symbol `0`.
    pub fn norm(t: Term) -> Formula {
        Formula::Dist(t, Term::constant(super::signature::ops::ZERO))
    }

    pub fn sum(a: Formula, b: Formula) -> Formula {
        Formula::Sum(Box::new(a), Box::new(b))
    }

    /// Left-nested sum of the given formulas; `0` when empty.
    pub fn sum_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::sum)
            .unwrap_or_else(|| Formula::Const(rational::zero()))
    }

    pub fn scale(r: Q, f: Formula) -> Formula {
        Formula::Scale(r, Box::new(f))
    }

    pub fn sub(a: Formula, b: Formula) -> Formula {
        Formula::sum(a, Formula::scale(rational::int(-1), b))
    }

    pub fn sup(v: &str, f: Formula) -> Formula {
        Formula::Sup(v.to_string(), Box::new(f))
    }

    pub fn inf(v: &str, f: Formula) -> Formula {
        Formula::Inf(v.to_string(), Box::new(f))
    }

    pub fn meet(a: Formula, b: Formula) -> Formula {
        Formula::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Formula, b: Formula) -> Formula {
        Formula::Join(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::Neg(Box::new(a))
    }

    /// No `Meet`, `Join` or `Neg` anywhere.
    pub fn is_affine(&self) -> bool {
        match self {
            Formula::Const(_) | Formula::Atom(..) | Formula::Dist(..) => true,
            Formula::Sum(a, b) => a.is_affine() && b.is_affine(),
            Formula::Scale(_, a) | Formula::Sup(_, a) | Formula::Inf(_, a) => a.is_affine(),
            Formula::Meet(..) | Formula::Join(..) | Formula::Neg(..) => false,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Const(_) | Formula::Atom(..) | Formula::Dist(..) => true,
            Formula::Sup(..) | Formula::Inf(..) => false,
            Formula::Scale(_, a) | Formula::Neg(a) => a.is_quantifier_free(),
            Formula::Sum(a, b) | Formula::Meet(a, b) | Formula::Join(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::Dist(..))
    }

    /// `inf ȳ. θ` with `θ` quantifier-free (an empty prefix counts).
    pub fn is_infimal(&self) -> bool {
        match self {
            Formula::Inf(_, body) => body.is_infimal(),
            other => other.is_quantifier_free(),
        }
    }

    /// Maximal nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Atom(..) | Formula::Dist(..) => 0,
            Formula::Sup(_, a) | Formula::Inf(_, a) => 1 + a.quantifier_depth(),
            Formula::Scale(_, a) | Formula::Neg(a) => a.quantifier_depth(),
            Formula::Sum(a, b) | Formula::Meet(a, b) | Formula::Join(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
        }
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let add_term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
            for v in t.vars() {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::Const(_) => {}
            Formula::Atom(_, args) => args.iter().for_each(|t| add_term(t, bound, out)),
            Formula::Dist(a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::Scale(_, a) | Formula::Neg(a) => a.collect_free(bound, out),
            Formula::Sum(a, b) | Formula::Meet(a, b) | Formula::Join(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Sup(v, a) | Formula::Inf(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_all_vars(&mut out);
        out
    }

    fn visit_all_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Dist(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Scale(_, a) | Formula::Neg(a) => a.visit_all_vars(out),
            Formula::Sum(a, b) | Formula::Meet(a, b) | Formula::Join(a, b) => {
                a.visit_all_vars(out);
                b.visit_all_vars(out);
            }
            Formula::Sup(v, a) | Formula::Inf(v, a) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
                a.visit_all_vars(out);
            }
        }
    }

    /// Capture-avoiding substitution of `t` for the free occurrences of `v`.
    pub fn substitute(&self, v: &str, t: &Term) -> Formula {
        let bx = |a: &Formula| Box::new(a.substitute(v, t));
        match self {
            Formula::Const(_) => self.clone(),
            Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(|a| a.substitute(v, t)).collect()),
            Formula::Dist(a, b) => Formula::Dist(a.substitute(v, t), b.substitute(v, t)),
            Formula::Sum(a, b) => Formula::Sum(bx(a), bx(b)),
            Formula::Scale(r, a) => Formula::Scale(r.clone(), bx(a)),
            Formula::Meet(a, b) => Formula::Meet(bx(a), bx(b)),
            Formula::Join(a, b) => Formula::Join(bx(a), bx(b)),
            Formula::Neg(a) => Formula::Neg(bx(a)),
            Formula::Sup(y, body) | Formula::Inf(y, body) => {
                let is_sup = matches!(self, Formula::Sup(..));
                let rebuild = |y: String, body: Formula| {
                    if is_sup {
                        Formula::Sup(y, Box::new(body))
                    } else {
                        Formula::Inf(y, Box::new(body))
                    }
                };
                if y == v || !body.free_vars().iter().any(|w| w == v) {
                    return self.clone();
                }
                if t.mentions(y) {
                    let mut avoid = t.vars();
                    avoid.extend(body.all_vars());
                    avoid.push(v.to_string());
                    let fresh = fresh_name(y, &avoid);
                    let renamed = body.substitute(y, &Term::Var(fresh.clone()));
                    rebuild(fresh, renamed.substitute(v, t))
                } else {
                    rebuild(y.clone(), body.substitute(v, t))
                }
            }
        }
    }

    /// Renames bound variables by binding depth so that alpha-equivalent
    /// formulas become structurally equal.
    pub fn canonical(&self) -> Formula {
        self.canon(0)
    }

    fn canon(&self, depth: usize) -> Formula {
        let bx = |a: &Formula| Box::new(a.canon(depth));
        match self {
            Formula::Const(_) | Formula::Atom(..) | Formula::Dist(..) => self.clone(),
            Formula::Sum(a, b) => Formula::Sum(bx(a), bx(b)),
            Formula::Scale(r, a) => Formula::Scale(r.clone(), bx(a)),
            Formula::Meet(a, b) => Formula::Meet(bx(a), bx(b)),
            Formula::Join(a, b) => Formula::Join(bx(a), bx(b)),
            Formula::Neg(a) => Formula::Neg(bx(a)),
            Formula::Sup(y, body) | Formula::Inf(y, body) => {
                let name = format!("#{depth}");
                let body = body.substitute(y, &Term::Var(name.clone())).canon(depth + 1);
                if matches!(self, Formula::Sup(..)) {
                    Formula::Sup(name, Box::new(body))
                } else {
                    Formula::Inf(name, Box::new(body))
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    /// Rewrites `Neg(f)` into `1 + -1*f` everywhere.
    pub fn eliminate_neg(&self) -> Formula {
        let bx = |a: &Formula| Box::new(a.eliminate_neg());
        match self {
            Formula::Const(_) | Formula::Atom(..) | Formula::Dist(..) => self.clone(),
            Formula::Sum(a, b) => Formula::Sum(bx(a), bx(b)),
            Formula::Scale(r, a) => Formula::Scale(r.clone(), bx(a)),
            Formula::Meet(a, b) => Formula::Meet(bx(a), bx(b)),
            Formula::Join(a, b) => Formula::Join(bx(a), bx(b)),
            Formula::Sup(y, a) => Formula::Sup(y.clone(), bx(a)),
            Formula::Inf(y, a) => Formula::Inf(y.clone(), bx(a)),
            Formula::Neg(a) => Formula::sub(Formula::one(), a.eliminate_neg()),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Sup(..) | Formula::Inf(..) => 0,
            Formula::Sum(..) => 1,
            Formula::Scale(..) => 2,
            Formula::Meet(..) | Formula::Join(..) => 3,
            Formula::Neg(..) => 4,
            _ => 5,
        }
    }
}

/// `base'`, `base''`, ... until the name avoids `taken`.
pub fn fresh_name(base: &str, taken: &[String]) -> String {
    let mut name = format!("{base}'");
    while taken.iter().any(|t| t == &name) {
        name.push('\'');
    }
    name
}

fn operand(f: &mut fmt::Formatter<'_>, g: &Formula, min_prec: u8) -> fmt::Result {
    if g.prec() < min_prec {
        write!(f, "({g})")
    } else {
        write!(f, "{g}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(q) => write!(f, "{q}"),
            Formula::Atom(r, args) => {
                write!(f, "{r}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Formula::Dist(a, b) => write!(f, "d({a},{b})"),
            Formula::Sum(a, b) => {
                operand(f, a, 1)?;
                write!(f, " + ")?;
                operand(f, b, 2)
            }
            Formula::Scale(r, a) => {
                write!(f, "{r}*")?;
                operand(f, a, 3)
            }
            Formula::Meet(a, b) | Formula::Join(a, b) => {
                operand(f, a, 3)?;
                write!(f, "{}", if matches!(self, Formula::Meet(..)) { " /\\ " } else { " \\/ " })?;
                operand(f, b, 4)
            }
            Formula::Neg(a) => {
                write!(f, "~")?;
                operand(f, a, 4)
            }
            Formula::Sup(y, body) | Formula::Inf(y, body) => {
                let q = if matches!(self, Formula::Sup(..)) { "sup" } else { "inf" };
                write!(f, "{q} {y}. {body}")
            }
        }
    }
}
