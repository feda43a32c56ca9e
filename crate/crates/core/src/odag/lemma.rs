//! Rewriting quantifier-free formulas in one variable `x` into combinations
//! of `|x+a|`, `|(x+a)∧b|`, `|(x+a)∧(−x+b)|` and `|(x+a)∧(−x+b)∧c|`.
//!
//! Atoms are put in join-of-meets form, joins are removed with
//! inclusion–exclusion (A8), and each conjunct `nx+a` is divided by `|n|`
//! (A11, A9). Every result is checked against the input on a breakpoint grid
//! covering both; anything not handled is reported as unreduced.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{Signed, Zero};

use super::normal_form::LinExpr;
use super::{breakpoints, eval_discrete_q, term_normal_form, OdagError, QAssignment};
use crate::rational::{self, Q};
use crate::riesz::{SignedCombination, DEFAULT_EXPANSION_CAP};
use crate::syntax::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaOutcome {
    Reduced { var: String, combination: SignedCombination },
    Unreduced { reason: String },
}

fn unreduced<T>(reason: impl Into<String>) -> Result<Result<T, String>, OdagError> {
    Ok(Err(reason.into()))
}

/// Flattens sums, scalars and `¬` into `constant + Σ r·d(t₁,t₂)`.
fn linearize(f: &Formula, r: &Q, constant: &mut Q, atoms: &mut Vec<(Q, Term)>) -> Result<Result<(), String>, OdagError> {
    match f {
        Formula::Const(c) => *constant += r * c,
        Formula::Dist(a, b) => atoms.push((r.clone(), Term::sub(a.clone(), b.clone()))),
        Formula::Sum(a, b) => {
            if let Err(e) = linearize(a, r, constant, atoms)? {
                return unreduced(e);
            }
            return linearize(b, r, constant, atoms);
        }
        Formula::Scale(s, a) => return linearize(a, &(r * s), constant, atoms),
        Formula::Neg(a) => {
            *constant += r;
            return linearize(a, &-r, constant, atoms);
        }
        Formula::Meet(..) | Formula::Join(..) => return unreduced("lattice connective between formulas"),
        Formula::Atom(name, _) => return Err(OdagError::ForeignSymbol(name.clone())),
        Formula::Sup(..) | Formula::Inf(..) => return Err(OdagError::NotQuantifierFree),
    }
    Ok(Ok(()))
}

fn shifted(x: &str, sign: i64, a: &Q) -> Term {
    let base = if sign > 0 { Term::var(x) } else { Term::neg(Term::var(x)) };
    if a.is_negative() {
        Term::sub(base, Term::num(-a))
    } else {
        Term::add(base, Term::num(a.clone()))
    }
}

/// Shape of one meet `⋀ⱼ(nⱼx + aⱼ)`, added to `out` with weight `r`.
fn reduce_meet(x: &str, meet: &[LinExpr], r: &Q, out: &mut BTreeMap<Formula, Q>, constant: &mut Q) {
    let mut plus: Option<Q> = None;
    let mut minus: Option<Q> = None;
    let mut flat: Option<Q> = None;
    let keep_min = |slot: &mut Option<Q>, v: Q| {
        if slot.as_ref().is_none_or(|cur| v < *cur) {
            *slot = Some(v);
        }
    };
    for l in meet {
        let n = l.coeff(x);
        if n.is_zero() {
            keep_min(&mut flat, l.constant.clone());
        } else if n.is_positive() {
            keep_min(&mut plus, &l.constant / &n);
        } else {
            keep_min(&mut minus, &l.constant / -&n);
        }
    }
    let mut add = |f: Formula, w: Q| {
        let entry = out.entry(f.clone()).or_insert_with(rational::zero);
        *entry += w;
        if entry.is_zero() {
            out.remove(&f);
        }
    };
    let norm = Formula::norm;
    match (plus, minus, flat) {
        (Some(a), None, None) => add(norm(shifted(x, 1, &a)), r.clone()),
        (Some(a), None, Some(c)) => add(norm(Term::meet(shifted(x, 1, &a), Term::num(c))), r.clone()),
        (Some(a), Some(b), None) => add(norm(Term::meet(shifted(x, 1, &a), shifted(x, -1, &b))), r.clone()),
        (Some(a), Some(b), Some(c)) => add(
            norm(Term::meet(Term::meet(shifted(x, 1, &a), shifted(x, -1, &b)), Term::num(c))),
            r.clone(),
        ),
        // |−x+b| = |x−b|
        (None, Some(b), None) => add(norm(shifted(x, 1, &-b)), r.clone()),
        (None, Some(b), Some(c)) => {
            if c.is_negative() {
                *constant += r;
            } else if c.is_positive() {
                add(norm(shifted(x, 1, &-&b)), r.clone());
            } else {
                // [x > b] = |x−b| − |(x−b)∧0|
                add(norm(shifted(x, 1, &-&b)), r.clone());
                add(norm(Term::meet(shifted(x, 1, &-b), Term::num(rational::zero()))), -r);
            }
        }
        (None, None, Some(c)) => {
            if !c.is_zero() {
                *constant += r;
            }
        }
        (None, None, None) => unreachable!("meets are nonempty"),
    }
}

/// Rewrites `f` or explains why it was left alone.
pub fn qf_lemma_rewrite(f: &Formula) -> Result<LemmaOutcome, OdagError> {
    if !f.is_quantifier_free() {
        return Err(OdagError::NotQuantifierFree);
    }
    let free = f.free_vars();
    if free.len() > 1 {
        return Err(OdagError::TooManyVariables(free));
    }
    let x = free.into_iter().next().unwrap_or_else(|| "x".to_string());

    let mut constant = rational::zero();
    let mut atoms = Vec::new();
    if let Err(reason) = linearize(f, &rational::one(), &mut constant, &mut atoms)? {
        return Ok(LemmaOutcome::Unreduced { reason });
    }
    let mut shapes: BTreeMap<Formula, Q> = BTreeMap::new();
    for (r, t) in &atoms {
        let nf = term_normal_form(t)?;
        let k = nf.joins.len();
        if k > DEFAULT_EXPANSION_CAP {
            return Ok(LemmaOutcome::Unreduced { reason: format!("{k} joinands exceed the expansion cap") });
        }
        for size in 1..=k {
            let sign = if size % 2 == 1 { r.clone() } else { -r };
            for subset in (0..k).combinations(size) {
                let meet: Vec<LinExpr> = subset.iter().flat_map(|&i| nf.joins[i].iter().cloned()).collect();
                reduce_meet(&x, &meet, &sign, &mut shapes, &mut constant);
            }
        }
    }

    let mut terms = Vec::new();
    if !constant.is_zero() {
        terms.push((rational::one(), Formula::Const(constant)));
    }
    terms.extend(shapes.into_iter().map(|(f, r)| (r, f)));
    if terms.is_empty() {
        terms.push((rational::one(), Formula::Const(rational::zero())));
    }
    let combination = SignedCombination { terms };

    let output = combination.to_formula();
    let empty = QAssignment::new();
    let mut points = breakpoints(f, &x, &empty)?;
    points.extend(breakpoints(&output, &x, &empty)?);
    let probe = Formula::sum(f.clone(), Formula::scale(rational::int(-1), output));
    for p in super::grid_from(points) {
        let asg: QAssignment = [(x.clone(), p.clone())].into();
        if !eval_discrete_q(&probe, &asg)?.is_zero() {
            return Ok(LemmaOutcome::Unreduced { reason: format!("rewrite disagrees at {x} = {}", rational::show(&p)) });
        }
    }
    Ok(LemmaOutcome::Reduced { var: x, combination })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Signature};

    fn rewrite(text: &str) -> String {
        match qf_lemma_rewrite(&parse(text, &Signature::odag()).unwrap()).unwrap() {
            LemmaOutcome::Reduced { combination, .. } => combination.to_string(),
            LemmaOutcome::Unreduced { reason } => panic!("{text}: {reason}"),
        }
    }

    #[test]
    fn examples() {
        assert_eq!(rewrite("|2*x + 4|"), "d(x + 2,0)");
        assert_eq!(rewrite("|(x + 1) /\\ 3|"), "d((x + 1) /\\ 3,0)");
        assert_eq!(rewrite("|x /\\ x|"), "d(x + 0,0)");
    }

    #[test]
    fn joins_and_negative_slopes() {
        rewrite("|(x - 1) \\/ (2 - x)|");
        rewrite("|(-3*x + 1) /\\ 0| + 2*|x \\/ 1/2|");
        rewrite("|(-x + 1) /\\ -2|");
        rewrite("~|(x /\\ 1) \\/ (-x /\\ 5)|");
        rewrite("|(-x) /\\ 0|");
    }

    #[test]
    fn limits() {
        let sig = Signature::odag();
        let two = parse("|x - y|", &sig).unwrap();
        assert!(matches!(qf_lemma_rewrite(&two), Err(OdagError::TooManyVariables(_))));
        let lattice = parse("|x| \\/ |x - 1|", &sig).unwrap();
        assert!(matches!(qf_lemma_rewrite(&lattice).unwrap(), LemmaOutcome::Unreduced { .. }));
    }
}
