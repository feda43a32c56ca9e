//! Seeded generators shared by the acceptance suite and the property tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use alqe::rational::{frac, int, Q};
use alqe::semantics::{Elem, FiniteStructure};
use alqe::syntax::{ops, Formula, Signature, Symbol, Term};
use rand::seq::IndexedRandom;
use rand::Rng;

/// `{−2..2} ∪ {±1/2, ±1/3}`.
pub fn coefficient(rng: &mut impl Rng) -> Q {
    let pool = [int(-2), int(-1), int(0), int(1), int(2), frac(1, 2), frac(-1, 2), frac(1, 3), frac(-1, 3)];
    pool.choose(rng).unwrap().clone()
}

/// Rational in `[−bound, bound]` with denominator at most 10.
pub fn rational(rng: &mut impl Rng, bound: i64) -> Q {
    let den = rng.random_range(1..=10i64);
    frac(rng.random_range(-bound * den..=bound * den), den)
}

// ---- formulas over F_q with a direct evaluator ----

/// Mirror of a generated vector-space formula. Atoms are `d(a·v̄, b·v̄)` with
/// coefficient vectors indexed by the variables in scope.
#[derive(Debug, Clone)]
pub enum Gen {
    Atom(Vec<String>, Vec<u64>, Vec<u64>),
    Scaled(Q, Box<Gen>),
    Sum(Vec<Gen>),
    Sup(String, Box<Gen>),
    Inf(String, Box<Gen>),
}

fn linear(vars: &[String], coeffs: &[u64]) -> Term {
    let parts: Vec<Term> = vars
        .iter()
        .zip(coeffs)
        .filter(|(_, &c)| c != 0)
        .map(|(v, &c)| if c == 1 { Term::var(v) } else { Term::scale(int(c as i64), Term::var(v)) })
        .collect();
    parts.into_iter().reduce(Term::add).unwrap_or_else(|| Term::constant(ops::ZERO))
}

impl Gen {
    pub fn to_formula(&self) -> Formula {
        match self {
            Gen::Atom(vars, a, b) => Formula::dist(linear(vars, a), linear(vars, b)),
            Gen::Scaled(c, g) => Formula::scale(c.clone(), g.to_formula()),
            Gen::Sum(parts) => parts.iter().map(Gen::to_formula).reduce(Formula::sum).unwrap_or(Formula::Const(int(0))),
            Gen::Sup(v, g) => Formula::sup(v, g.to_formula()),
            Gen::Inf(v, g) => Formula::inf(v, g.to_formula()),
        }
    }

    /// Exact value over `F_q` with the discrete metric.
    pub fn eval(&self, q: u64, asg: &BTreeMap<String, u64>) -> Q {
        match self {
            Gen::Atom(vars, a, b) => {
                let diff = vars.iter().zip(a.iter().zip(b)).fold(0u64, |acc, (v, (x, y))| {
                    (acc + (x + q - y) % q * asg[v]) % q
                });
                int((diff != 0) as i64)
            }
            Gen::Scaled(c, g) => c * g.eval(q, asg),
            Gen::Sum(parts) => parts.iter().map(|g| g.eval(q, asg)).sum(),
            Gen::Sup(v, g) | Gen::Inf(v, g) => {
                let values = (0..q).map(|y| {
                    let mut inner = asg.clone();
                    inner.insert(v.clone(), y);
                    g.eval(q, &inner)
                });
                if matches!(self, Gen::Sup(..)) { values.max() } else { values.min() }.unwrap()
            }
        }
    }
}

fn gen_atom(rng: &mut impl Rng, q: u64, scope: &[String]) -> Gen {
    let mut vec = || scope.iter().map(|_| rng.random_range(0..q)).collect::<Vec<_>>();
    let a = vec();
    let b = vec();
    Gen::Atom(scope.to_vec(), a, b)
}

fn gen_part(rng: &mut impl Rng, q: u64, scope: &[String], atoms: usize, quants: usize) -> Gen {
    let mut parts = Vec::new();
    let mut outside = atoms;
    if quants > 0 {
        let inner = rng.random_range(1..=atoms);
        outside -= inner;
        let v = format!("y{}", quants);
        let mut inner_scope = scope.to_vec();
        inner_scope.push(v.clone());
        let body = Box::new(gen_part(rng, q, &inner_scope, inner, quants - 1));
        let g = if rng.random_bool(0.5) { Gen::Sup(v, body) } else { Gen::Inf(v, body) };
        parts.push(if rng.random_bool(0.3) { Gen::Scaled(coefficient(rng), Box::new(g)) } else { g });
    }
    for _ in 0..outside {
        let atom = gen_atom(rng, q, scope);
        parts.push(Gen::Scaled(coefficient(rng), Box::new(atom)));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Gen::Sum(parts)
    }
}

/// Affine formula with at most three atoms and one or two nested quantifiers.
pub fn qe_formula(rng: &mut impl Rng, q: u64, vars: &[String]) -> Gen {
    let atoms = rng.random_range(1..=3);
    let quants = rng.random_range(1..=2).min(atoms);
    gen_part(rng, q, vars, atoms, quants)
}

// ---- small Lipschitz structures ----

/// `f` unary function; `R` unary and `S` binary relations, all 1-Lipschitz.
pub fn small_signature() -> Signature {
    Signature::new(
        vec![Symbol::new("f", 1, int(1))],
        vec![Symbol::new("R", 1, int(1)), Symbol::new("S", 2, int(1))],
    )
    .unwrap()
}

/// Discrete metric scaled by `c ≥ 1/2` and relation values in `[0, 1/2]`,
/// so every table is 1-Lipschitz.
pub fn small_structure(rng: &mut impl Rng, max_size: usize) -> FiniteStructure {
    let n = rng.random_range(1..=max_size);
    let c = [frac(1, 2), frac(2, 3), frac(3, 4), int(1)].choose(rng).unwrap().clone();
    let metric = (0..n * n).map(|i| if i / n == i % n { int(0) } else { c.clone() }).collect();
    let value = |rng: &mut dyn rand::RngCore| [int(0), frac(1, 4), frac(1, 3), frac(1, 2)].choose(rng).unwrap().clone();
    let mut functions = BTreeMap::new();
    functions.insert("f".to_string(), (0..n).map(|_| rng.random_range(0..n)).collect::<Vec<Elem>>());
    let mut relations = BTreeMap::new();
    relations.insert("R".to_string(), (0..n).map(|_| value(rng)).collect());
    relations.insert("S".to_string(), (0..n * n).map(|_| value(rng)).collect());
    let universe = (0..n).map(|i| format!("e{i}")).collect();
    FiniteStructure::new(small_signature(), universe, metric, functions, relations).unwrap()
}

/// Positive integers scaled to sum to 1; with several members the first
/// weight may be 0.
pub fn weights(rng: &mut impl Rng, k: usize) -> Vec<Q> {
    let raw: Vec<i64> = (0..k).map(|i| rng.random_range(if i == 0 && k > 1 { 0 } else { 1 }..=6)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| frac(w, total)).collect()
}

fn small_term(rng: &mut impl Rng, scope: &[String]) -> Term {
    let v = Term::var(scope.choose(rng).unwrap());
    match rng.random_range(0..4) {
        0 => Term::App("f".into(), vec![v]),
        1 => Term::App("f".into(), vec![Term::App("f".into(), vec![v])]),
        _ => v,
    }
}

fn small_atom(rng: &mut impl Rng, scope: &[String]) -> Formula {
    if scope.is_empty() {
        return Formula::Const(coefficient(rng));
    }
    match rng.random_range(0..4) {
        0 => Formula::atom("R", vec![small_term(rng, scope)]),
        1 => Formula::atom("S", vec![small_term(rng, scope), small_term(rng, scope)]),
        2 => Formula::dist(small_term(rng, scope), small_term(rng, scope)),
        _ => Formula::Const(coefficient(rng)),
    }
}

/// Affine formula in the small signature with free variables among `scope`
/// and at most `depth` nested quantifiers.
pub fn affine_formula(rng: &mut impl Rng, scope: &[String], depth: usize) -> Formula {
    if depth > 0 && rng.random_bool(0.7) {
        let v = format!("u{depth}");
        let mut inner = scope.to_vec();
        inner.push(v.clone());
        let body = affine_formula(rng, &inner, depth - 1);
        let body = Formula::sum(body, Formula::scale(coefficient(rng), small_atom(rng, scope)));
        return if rng.random_bool(0.5) { Formula::sup(&v, body) } else { Formula::inf(&v, body) };
    }
    let parts = rng.random_range(1..=3);
    (0..parts)
        .map(|_| Formula::scale(coefficient(rng), small_atom(rng, scope)))
        .reduce(Formula::sum)
        .unwrap()
}

// ---- unrestricted formulas for printing ----

/// Every connective and term former: `+ - neg * /\ \/ 0 1 f g`, relations `R`, `S`.
pub fn rich_signature() -> Signature {
    let one = int(1);
    Signature::new(
        vec![
            Symbol::new(ops::ADD, 2, one.clone()),
            Symbol::new(ops::NEG, 1, one.clone()),
            Symbol::new(ops::MUL, 2, one.clone()),
            Symbol::new(ops::MEET, 2, one.clone()),
            Symbol::new(ops::JOIN, 2, one.clone()),
            Symbol::new(ops::ZERO, 0, one.clone()),
            Symbol::new(ops::ONE, 0, one.clone()),
            Symbol::new("f", 1, one.clone()),
            Symbol::new("g", 2, one.clone()),
        ],
        vec![Symbol::new("R", 1, one.clone()), Symbol::new("S", 2, one)],
    )
    .unwrap()
}

fn literal(rng: &mut impl Rng) -> Q {
    loop {
        let q = rational(rng, 3);
        // 0 and 1 name constants of the signature
        if q != int(0) && q != int(1) {
            return q;
        }
    }
}

pub fn any_term(rng: &mut impl Rng, depth: usize) -> Term {
    let vars = ["x", "y", "z"];
    if depth == 0 {
        return match rng.random_range(0..5) {
            0 => Term::constant(ops::ZERO),
            1 => Term::constant(ops::ONE),
            2 => Term::Num(literal(rng)),
            _ => Term::var(vars.choose(rng).unwrap()),
        };
    }
    let mut sub = || any_term(rng, depth - 1);
    let (a, b) = (sub(), sub());
    match rng.random_range(0..10) {
        0 => Term::add(a, b),
        1 => Term::sub(a, b),
        2 => Term::neg(a),
        3 => Term::mul(a, b),
        4 => Term::scale(literal(rng), a),
        5 => Term::meet(a, b),
        6 => Term::join(a, b),
        7 => Term::App("f".into(), vec![a]),
        8 => Term::App("g".into(), vec![a, b]),
        _ => a,
    }
}

pub fn any_formula(rng: &mut impl Rng, depth: usize) -> Formula {
    if depth == 0 {
        let t = |rng: &mut _| any_term(rng, 2);
        return match rng.random_range(0..4) {
            0 => Formula::Const(rational(rng, 3)),
            1 => Formula::atom("R", vec![t(rng)]),
            2 => Formula::atom("S", vec![t(rng), t(rng)]),
            _ => Formula::dist(t(rng), t(rng)),
        };
    }
    let mut sub = || any_formula(rng, depth - 1);
    let (a, b) = (sub(), sub());
    let v = ["x", "y", "w"].choose(rng).unwrap();
    match rng.random_range(0..9) {
        0 => Formula::sum(a, b),
        1 => Formula::scale(rational(rng, 3), a),
        2 => Formula::meet(a, b),
        3 => Formula::join(a, b),
        4 => Formula::neg(a),
        5 => Formula::sup(v, a),
        6 => Formula::inf(v, a),
        7 => Formula::sub(a, b),
        _ => a,
    }
}
