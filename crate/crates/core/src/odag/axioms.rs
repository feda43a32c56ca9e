//! Instances of A1–A13 checked in the discrete rational model.
//!
//! Each trial probes sign patterns of the free variables first (`±1`, then
//! patterns with zeros) and then random rationals, so boundary cases are
//! always covered.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{eval_discrete_q, sample_rational, OdagError, QAssignment};
use crate::rational::{self, Q};
use crate::syntax::{parse, Formula, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
    A12,
    A13,
}

impl Axiom {
    pub const ALL: [Axiom; 13] = [
        Axiom::A1,
        Axiom::A2,
        Axiom::A3,
        Axiom::A4,
        Axiom::A5,
        Axiom::A6,
        Axiom::A7,
        Axiom::A8,
        Axiom::A9,
        Axiom::A10,
        Axiom::A11,
        Axiom::A12,
        Axiom::A13,
    ];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Axiom {
    type Err = OdagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| OdagError::UnknownAxiom(s.to_string()))
    }
}

/// One equation `lhs = rhs` of an axiom (schema instance).
#[derive(Debug, Clone)]
pub struct AxiomInstance {
    pub label: String,
    pub lhs: Formula,
    pub rhs: Formula,
    pub vars: Vec<String>,
}

fn instance(label: &str, lhs: &str, rhs: &str) -> AxiomInstance {
    let sig = Signature::odag();
    let lhs = parse(lhs, &sig).expect("axiom text parses");
    let rhs = parse(rhs, &sig).expect("axiom text parses");
    let mut vars = lhs.free_vars();
    for v in rhs.free_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    AxiomInstance { label: label.to_string(), lhs, rhs, vars }
}

/// Equations making up an axiom. Identities between terms are stated as
/// `d(t₁,t₂) = 0`; schemas are instantiated for `n ∈ {1,2,3}`.
pub fn instances(ax: Axiom) -> Vec<AxiomInstance> {
    let mut out = Vec::new();
    let mut eq = |label: &str, lhs: &str, rhs: &str| out.push(instance(label, lhs, rhs));
    match ax {
        Axiom::A1 => {
            eq("associativity", "d(x + (y + z), (x + y) + z)", "0");
            eq("commutativity", "d(x + y, y + x)", "0");
            eq("identity", "d(x + 0, x)", "0");
            eq("inverse", "d(x + -x, 0)", "0");
            for n in 1..=3 {
                eq(&format!("torsion-free n={n}"), &format!("|{n}*x|"), "|x|");
            }
            eq("nontrivial", "sup x. |x|", "1");
        }
        Axiom::A2 => {
            eq("meet idempotent", "d(x /\\ x, x)", "0");
            eq("join idempotent", "d(x \\/ x, x)", "0");
            eq("meet commutative", "d(x /\\ y, y /\\ x)", "0");
            eq("join commutative", "d(x \\/ y, y \\/ x)", "0");
            eq("meet associative", "d(x /\\ (y /\\ z), (x /\\ y) /\\ z)", "0");
            eq("join associative", "d(x \\/ (y \\/ z), (x \\/ y) \\/ z)", "0");
            eq("absorption", "d(x /\\ (x \\/ y), x)", "0");
            eq("dual absorption", "d(x \\/ (x /\\ y), x)", "0");
            eq("distributive", "d(x /\\ (y \\/ z), (x /\\ y) \\/ (x /\\ z))", "0");
            eq("dual distributive", "d(x \\/ (y /\\ z), (x \\/ y) /\\ (x \\/ z))", "0");
        }
        Axiom::A3 => eq("A3", "d(-(x /\\ y), -x \\/ -y)", "0"),
        Axiom::A4 => eq("A4", "d(z + (x /\\ y), (z + x) /\\ (z + y))", "0"),
        Axiom::A5 => eq("A5", "d(x /\\ y, x) /\\ d(x /\\ y, y)", "0"),
        Axiom::A6 => eq("A6", "|x - y|", "d(x,y)"),
        Axiom::A7 => eq("A7", "sup x. |x \\/ 0|", "1"),
        Axiom::A8 => eq("A8", "|x /\\ y| + |x \\/ y|", "|x| + |y|"),
        Axiom::A9 => {
            for n in 1..=3 {
                eq(&format!("A9 n={n}"), &format!("|{n}*x /\\ y|"), "|x /\\ y|");
            }
        }
        Axiom::A10 => {
            eq("A10 first", "|(x \\/ y) \\/ 0|", "|(x \\/ 0) \\/ (y \\/ 0)|");
            eq("A10 second", "|(x \\/ y) \\/ 0|", "|(x \\/ 0) + (y \\/ 0)|");
        }
        Axiom::A11 => {
            for n in 1..=3 {
                eq(&format!("A11 n={n}"), &format!("inf x. |{n}*x - y|"), "0");
            }
        }
        Axiom::A12 => {
            for n in 1..=3 {
                let lhs = (1..=n).map(|i| format!("|x /\\ y{i}|")).join(" + ");
                let rhs = (1..=n).map(|i| format!("|0 /\\ y{i}|")).join(" + ");
                eq(&format!("A12 n={n}"), &format!("inf x. ({lhs})"), &rhs);
            }
        }
        Axiom::A13 => eq(
            "A13",
            "inf t. (|t /\\ x| - |t /\\ y|)",
            "|0 /\\ x| - |0 /\\ y| + |y \\/ 0| - |(y \\/ 0) /\\ ((x \\/ 0) + (-x \\/ 0))|",
        ),
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckConfig {
    pub trials: usize,
    pub seed: u64,
    /// Random components lie in `[−bound, bound]`.
    pub bound: i64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { trials: 1000, seed: 0, bound: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: String,
    pub assignment: Vec<(String, Q)>,
    pub lhs: Q,
    pub rhs: Q,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.assignment.iter().map(|(v, _)| v.as_str()).join(",");
        let values = self.assignment.iter().map(|(_, q)| rational::show(q)).join(",");
        write!(
            f,
            "{}: ({names}) = ({values}), lhs = {}, rhs = {}",
            self.instance,
            rational::show(&self.lhs),
            rational::show(&self.rhs)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    /// Assignments evaluated, across all instances.
    pub evaluations: usize,
    pub counterexample: Option<Counterexample>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Sign patterns over `k` variables: `{+1,−1}^k` in binary order with `+1`
/// first, then the remaining patterns of `{0,+1,−1}^k`.
fn probes(k: usize) -> Vec<Vec<Q>> {
    let one = rational::one;
    let signs: Vec<Vec<Q>> = (0..k)
        .map(|_| vec![one(), -one()])
        .multi_cartesian_product()
        .collect();
    let with_zero = (0..k)
        .map(|_| vec![rational::zero(), one(), -one()])
        .multi_cartesian_product()
        .filter(|p| p.iter().any(num::Zero::is_zero));
    if k == 0 {
        return vec![vec![]];
    }
    signs.into_iter().chain(with_zero).collect()
}

/// Evaluates every instance on the probes and then on `trials` random
/// assignments; stops at the first violation.
pub fn check_axiom(ax: Axiom, cfg: &CheckConfig) -> Result<AxiomReport, OdagError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evaluations = 0;
    for inst in instances(ax) {
        let k = inst.vars.len();
        let random = (0..cfg.trials).map(|_| (0..k).map(|_| sample_rational(&mut rng, cfg.bound)).collect::<Vec<_>>());
        let random: Vec<Vec<Q>> = random.collect();
        for values in probes(k).into_iter().chain(random) {
            let asg: QAssignment = inst.vars.iter().cloned().zip(values.iter().cloned()).collect();
            let lhs = eval_discrete_q(&inst.lhs, &asg)?;
            let rhs = eval_discrete_q(&inst.rhs, &asg)?;
            evaluations += 1;
            if lhs != rhs {
                let assignment = inst.vars.iter().cloned().zip(values).collect();
                let cx = Counterexample { instance: inst.label.clone(), assignment, lhs, rhs };
                return Ok(AxiomReport { axiom: ax, evaluations, counterexample: Some(cx) });
            }
        }
    }
    Ok(AxiomReport { axiom: ax, evaluations, counterexample: None })
}
