//! Builders for classical ({0,1}-valued, discrete) structures and a few
//! standard models used throughout the crate.

use std::collections::BTreeMap;

use super::structure::{Elem, FiniteStructure, StructureError};
use crate::field::is_prime;
use crate::rational::{self, Q};
use crate::syntax::{ops, Signature};

/// Relation and function tables of a classical first-order structure.
#[derive(Debug, Clone, Default)]
pub struct ClassicalTables {
    pub relations: BTreeMap<String, Vec<bool>>,
    pub functions: BTreeMap<String, Vec<Elem>>,
}

/// The classical structure as a continuous one: discrete metric and
/// {0,1}-valued relations.
pub fn classical_to_structure(
    sig: Signature,
    universe: Vec<String>,
    tables: ClassicalTables,
) -> Result<FiniteStructure, StructureError> {
    let n = universe.len();
    let metric = (0..n * n)
        .map(|i| if i / n == i % n { rational::zero() } else { rational::one() })
        .collect();
    let relations = tables
        .relations
        .into_iter()
        .map(|(k, v)| (k, v.into_iter().map(|b| if b { rational::one() } else { rational::zero() }).collect()))
        .collect();
    FiniteStructure::new(sig, universe, metric, tables.functions, relations)
}

fn table1(n: usize, f: impl Fn(usize) -> usize) -> Vec<Elem> {
    (0..n).map(f).collect()
}

fn table2(n: usize, f: impl Fn(usize, usize) -> usize) -> Vec<Elem> {
    (0..n * n).map(|i| f(i / n, i % n)).collect()
}

fn check_prime(q: u64) -> Result<usize, StructureError> {
    if is_prime(q) {
        Ok(q as usize)
    } else {
        Err(StructureError::NotPrime(q))
    }
}

/// `F_q` as a one-dimensional vector space over itself, elements `"0".."q-1"`.
pub fn prime_field_vector_space(q: u64) -> Result<FiniteStructure, StructureError> {
    let n = check_prime(q)?;
    let mut t = ClassicalTables::default();
    t.functions.insert(ops::ADD.into(), table2(n, |a, b| (a + b) % n));
    t.functions.insert(ops::NEG.into(), table1(n, |a| (n - a) % n));
    t.functions.insert(ops::ZERO.into(), vec![0]);
    classical_to_structure(Signature::vector_space(), (0..n).map(|i| i.to_string()).collect(), t)
}

/// `F_p` in the ring language.
pub fn prime_field_ring(p: u64) -> Result<FiniteStructure, StructureError> {
    let n = check_prime(p)?;
    let mut t = ClassicalTables::default();
    t.functions.insert(ops::ADD.into(), table2(n, |a, b| (a + b) % n));
    t.functions.insert(ops::NEG.into(), table1(n, |a| (n - a) % n));
    t.functions.insert(ops::MUL.into(), table2(n, |a, b| (a * b) % n));
    t.functions.insert(ops::ZERO.into(), vec![0]);
    t.functions.insert(ops::ONE.into(), vec![1 % n]);
    classical_to_structure(Signature::ring(), (0..n).map(|i| i.to_string()).collect(), t)
}

/// The Boolean algebra `2^k` of subsets of `k` atoms with
/// `d(x,y) = μ(x Δ y)`, where `μ` gives atom `i` the weight `weights[i]`.
/// Elements are bitmasks named by their decimal value.
pub fn boolean_algebra(weights: &[Q]) -> Result<FiniteStructure, StructureError> {
    let k = weights.len();
    let n = 1usize << k;
    let measure = |mask: usize| -> Q {
        (0..k).filter(|i| mask >> i & 1 == 1).fold(rational::zero(), |acc, i| acc + &weights[i])
    };
    let metric = (0..n * n).map(|i| measure((i / n) ^ (i % n))).collect();
    let full = n - 1;
    let mut functions = BTreeMap::new();
    functions.insert(ops::MEET.to_string(), table2(n, |a, b| a & b));
    functions.insert(ops::JOIN.to_string(), table2(n, |a, b| a | b));
    functions.insert(ops::COMPL.to_string(), table1(n, |a| full & !a));
    functions.insert(ops::ZERO.to_string(), vec![0]);
    functions.insert(ops::ONE.to_string(), vec![full]);
    FiniteStructure::new(
        Signature::boolean_algebra(),
        (0..n).map(|i| i.to_string()).collect(),
        metric,
        functions,
        BTreeMap::new(),
    )
}

/// `2^k` with the uniform measure.
pub fn uniform_boolean_algebra(k: usize) -> Result<FiniteStructure, StructureError> {
    boolean_algebra(&vec![rational::frac(1, k.max(1) as i64); k])
}
