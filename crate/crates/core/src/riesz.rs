//! Rewrites in the Riesz space of formulas: inclusion–exclusion for finite
//! joins and meets, `η ∧ ¬θ` without negation, and single-atom encodings
//! of disjunctions (rings) and conjunctions/equalities (Boolean algebras).

use itertools::Itertools;

use crate::rational::{self, Q};
use crate::semantics::{evaluate, validate, Assignment, EvalError, FiniteStructure};
use crate::syntax::{ops, Formula, Term};

pub const DEFAULT_EXPANSION_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RieszError {
    #[error("nothing to expand")]
    Empty,
    #[error("{n} formulas exceed the expansion cap of {cap}")]
    OverCap { n: usize, cap: usize },
    #[error("structure is invalid: {0}")]
    InvalidStructure(String),
    #[error("structure lacks `{0}`")]
    MissingSymbol(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// `Σ rᵢ·fᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedCombination {
    pub terms: Vec<(Q, Formula)>,
}

impl SignedCombination {
    pub fn to_formula(&self) -> Formula {
        Formula::sum_all(self.terms.iter().map(|(r, f)| {
            if *r == rational::one() {
                f.clone()
            } else {
                Formula::scale(r.clone(), f.clone())
            }
        }))
    }

    /// Value given a valuation of the summands.
    pub fn evaluate_with<E>(&self, mut value: impl FnMut(&Formula) -> Result<Q, E>) -> Result<Q, E> {
        self.terms.iter().try_fold(rational::zero(), |acc, (r, f)| Ok(acc + r * value(f)?))
    }

    pub fn evaluate(&self, m: &FiniteStructure, a: &Assignment) -> Result<Q, EvalError> {
        self.evaluate_with(|f| evaluate(m, f, a))
    }
}

impl std::fmt::Display for SignedCombination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

fn expand(
    fs: &[Formula],
    cap: usize,
    combine: fn(Formula, Formula) -> Formula,
) -> Result<SignedCombination, RieszError> {
    if fs.is_empty() {
        return Err(RieszError::Empty);
    }
    if fs.len() > cap {
        return Err(RieszError::OverCap { n: fs.len(), cap });
    }
    let mut terms = Vec::new();
    for k in 1..=fs.len() {
        let sign = if k % 2 == 1 { rational::one() } else { rational::int(-1) };
        for subset in (0..fs.len()).combinations(k) {
            let f = subset.iter().map(|&j| fs[j].clone()).reduce(combine).expect("nonempty subset");
            terms.push((sign.clone(), f));
        }
    }
    Ok(SignedCombination { terms })
}

/// `⋁ fᵢ = Σ_{∅≠J} (−1)^{|J|+1} ⋀_{j∈J} f_j`.
pub fn inclusion_exclusion_join(fs: &[Formula], cap: usize) -> Result<SignedCombination, RieszError> {
    expand(fs, cap, Formula::meet)
}

/// `⋀ fᵢ = Σ_{∅≠J} (−1)^{|J|+1} ⋁_{j∈J} f_j`.
pub fn inclusion_exclusion_meet(fs: &[Formula], cap: usize) -> Result<SignedCombination, RieszError> {
    expand(fs, cap, Formula::join)
}

/// `(η ∨ θ) − θ`, which agrees with `η ∧ ¬θ` on {0,1} values.
pub fn neg_meet_rewrite(eta: &Formula, theta: &Formula) -> Formula {
    Formula::sub(Formula::join(eta.clone(), theta.clone()), theta.clone())
}

/// `p·q`: in a field, `p·q = 0` iff `p = 0` or `q = 0`.
pub fn ring_or_atoms(p: &Term, q: &Term) -> Term {
    Term::mul(p.clone(), q.clone())
}

/// Boolean-algebra statements that collapse to a single equation `t = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BooleanAtom {
    /// `x = y`
    Eq(Term, Term),
    /// `x = 0 ∧ y = 0`
    Conj(Term, Term),
}

fn compl(t: &Term) -> Term {
    Term::App(ops::COMPL.into(), vec![t.clone()])
}

/// The term `t` with the statement equivalent to `t = 0`.
pub fn boolean_atoms(atom: &BooleanAtom) -> Term {
    match atom {
        BooleanAtom::Eq(x, y) => Term::meet(Term::join(x.clone(), y.clone()), Term::join(compl(x), compl(y))),
        BooleanAtom::Conj(x, y) => Term::join(x.clone(), y.clone()),
    }
}

/// As a formula: `|t|`, which vanishes exactly where the statement holds.
pub fn equation_formula(t: &Term) -> Formula {
    Formula::norm(t.clone())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityFailure {
    pub x: String,
    pub y: String,
    pub lhs: Q,
    pub rhs: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub pairs: usize,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `μ(x∧y) + μ(x∨y) = μ(x) + μ(y)` with `μ(x) = d(x,0)` at every pair.
/// With `literal`, the right side is `μ(x) + μ(x)` instead.
pub fn probability_identity_check(b: &FiniteStructure, literal: bool) -> Result<IdentityReport, RieszError> {
    let violations = validate(b);
    if let Some(v) = violations.first() {
        return Err(RieszError::InvalidStructure(v.to_string()));
    }
    for sym in [ops::MEET, ops::JOIN, ops::ZERO] {
        if b.function_table(sym).is_none() {
            return Err(RieszError::MissingSymbol(sym.into()));
        }
    }
    let zero = b.apply(ops::ZERO, &[]).expect("checked above");
    let mu = |e| b.dist(e, zero).clone();
    let mut failures = Vec::new();
    for x in b.elements() {
        for y in b.elements() {
            let meet = b.apply(ops::MEET, &[x, y]).expect("checked above");
            let join = b.apply(ops::JOIN, &[x, y]).expect("checked above");
            let lhs = mu(meet) + mu(join);
            let rhs = mu(x) + if literal { mu(x) } else { mu(y) };
            if lhs != rhs {
                failures.push(IdentityFailure { x: b.name(x).into(), y: b.name(y).into(), lhs, rhs });
            }
        }
    }
    Ok(IdentityReport { pairs: b.size() * b.size(), failures })
}
