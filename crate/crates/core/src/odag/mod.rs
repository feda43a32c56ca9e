//! Affine ordered divisible abelian groups over the language `{+, −, ∧, ∨, 0}`.
//!
//! The model is `ℚ` with the discrete metric, `|t| = [t ≠ 0]`. A quantifier
//! whose body is quantifier-free is evaluated exactly on a finite grid: every
//! atom is piecewise constant in the bound variable, with breaks only at the
//! zeros and pairwise crossings of the linear pieces of its normal form.

mod axioms;
mod interval;
mod lemma;
mod normal_form;

use std::collections::BTreeMap;

use crate::rational::{self, Q};
use crate::syntax::{Formula, Term};

pub use axioms::{check_axiom, instances, Axiom, AxiomInstance, AxiomReport, CheckConfig, Counterexample};
pub use interval::{interval_distance, interval_indicator, interval_inf_form, Interval};
pub use lemma::{qf_lemma_rewrite, LemmaOutcome};
pub use normal_form::{eval_term, term_normal_form, LinExpr, MeetJoinNormalForm};

/// Values of the free variables.
pub type QAssignment = BTreeMap<String, Q>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OdagError {
    #[error("quantifier depth {0} exceeds 1")]
    QuantifierDepth(usize),
    #[error("variable `{0}` is not assigned")]
    UnboundVariable(String),
    #[error("symbol `{0}` is not in the ordered-group language")]
    ForeignSymbol(String),
    #[error("interval endpoints out of order: {a} > {b}")]
    IntervalOrder { a: String, b: String },
    #[error("expected at most one free variable, found {0:?}")]
    TooManyVariables(Vec<String>),
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
}

/// Exact value in the discrete rational model, quantifiers of depth at most 1.
pub fn eval_discrete_q(f: &Formula, asg: &QAssignment) -> Result<Q, OdagError> {
    eval_refined(f, asg, 1)
}

/// As [`eval_discrete_q`] with `density` interior points per grid cell.
pub fn eval_refined(f: &Formula, asg: &QAssignment, density: usize) -> Result<Q, OdagError> {
    let depth = f.quantifier_depth();
    if depth > 1 {
        return Err(OdagError::QuantifierDepth(depth));
    }
    eval(f, asg, density.max(1))
}

fn eval(f: &Formula, asg: &QAssignment, density: usize) -> Result<Q, OdagError> {
    Ok(match f {
        Formula::Const(c) => c.clone(),
        Formula::Dist(a, b) => indicator(eval_term(a, asg)? != eval_term(b, asg)?),
        Formula::Sum(a, b) => eval(a, asg, density)? + eval(b, asg, density)?,
        Formula::Scale(r, a) => r * eval(a, asg, density)?,
        Formula::Meet(a, b) => rational::min(&eval(a, asg, density)?, &eval(b, asg, density)?),
        Formula::Join(a, b) => rational::max(&eval(a, asg, density)?, &eval(b, asg, density)?),
        Formula::Neg(a) => rational::one() - eval(a, asg, density)?,
        Formula::Sup(v, body) | Formula::Inf(v, body) => {
            let mut inner = asg.clone();
            let mut best: Option<Q> = None;
            for c in grid(body, v, asg, density)? {
                inner.insert(v.clone(), c);
                let value = eval(body, &inner, density)?;
                let better = match &best {
                    None => true,
                    Some(b) if matches!(f, Formula::Sup(..)) => value > *b,
                    Some(b) => value < *b,
                };
                if better {
                    best = Some(value);
                }
            }
            best.expect("grids are nonempty")
        }
        Formula::Atom(r, _) => return Err(OdagError::ForeignSymbol(r.clone())),
    })
}

fn indicator(b: bool) -> Q {
    if b {
        rational::one()
    } else {
        rational::zero()
    }
}

pub(crate) fn collect_atoms<'a>(f: &'a Formula, out: &mut Vec<(&'a Term, &'a Term)>) {
    match f {
        Formula::Dist(a, b) => out.push((a, b)),
        Formula::Const(_) | Formula::Atom(..) => {}
        Formula::Scale(_, a) | Formula::Neg(a) | Formula::Sup(_, a) | Formula::Inf(_, a) => collect_atoms(a, out),
        Formula::Sum(a, b) | Formula::Meet(a, b) | Formula::Join(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
    }
}

/// Zeros and pairwise crossings, per atom, of the pieces `a·v + c`.
pub fn breakpoints(f: &Formula, v: &str, asg: &QAssignment) -> Result<Vec<Q>, OdagError> {
    let mut atoms = Vec::new();
    collect_atoms(f, &mut atoms);
    let mut points = Vec::new();
    for (a, b) in atoms {
        let nf = term_normal_form(&Term::sub(a.clone(), b.clone()))?;
        let pieces: Vec<(Q, Q)> = nf.pieces().map(|l| l.restrict(v, asg)).collect::<Result<_, _>>()?;
        for (i, (a1, c1)) in pieces.iter().enumerate() {
            if !num::Zero::is_zero(a1) {
                points.push(-c1 / a1);
            }
            for (a2, c2) in &pieces[i + 1..] {
                if a1 != a2 {
                    points.push((c2 - c1) / (a1 - a2));
                }
            }
        }
    }
    points.sort();
    points.dedup();
    Ok(points)
}

/// Breakpoints, `density` evenly spaced points inside each cell, and one
/// point beyond each end.
pub fn grid(f: &Formula, v: &str, asg: &QAssignment, density: usize) -> Result<Vec<Q>, OdagError> {
    Ok(spread(breakpoints(f, v, asg)?, density))
}

pub(crate) fn grid_from(points: Vec<Q>) -> Vec<Q> {
    spread(points, 1)
}

fn spread(mut points: Vec<Q>, density: usize) -> Vec<Q> {
    points.sort();
    points.dedup();
    let (Some(lo), Some(hi)) = (points.first(), points.last()) else {
        return vec![rational::zero()];
    };
    let mut out = vec![lo - rational::one()];
    for w in points.windows(2) {
        out.push(w[0].clone());
        let step = (&w[1] - &w[0]) / rational::int(density as i64 + 1);
        for k in 1..=density {
            out.push(&w[0] + &step * rational::int(k as i64));
        }
    }
    out.push(hi.clone());
    out.push(hi + rational::one());
    out
}

/// Uniform rational in `[−bound, bound]` with denominator at most 10.
pub fn sample_rational(rng: &mut impl rand::Rng, bound: i64) -> Q {
    let den = rng.random_range(1..=10i64);
    let num = rng.random_range(-bound * den..=bound * den);
    rational::frac(num, den)
}
