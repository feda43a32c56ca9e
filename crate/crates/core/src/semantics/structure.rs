use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;

use crate::rational::{self, Q};
use crate::syntax::Signature;

/// Index of an element in a structure's universe.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("universe must be nonempty")]
    EmptyUniverse,
    #[error("duplicate element id `{0}`")]
    DuplicateElement(String),
    #[error("metric table has {found} entries, expected {expected}")]
    MetricShape { expected: usize, found: usize },
    #[error("no table for symbol `{0}`")]
    MissingTable(String),
    #[error("table for `{name}` has {found} entries, expected {expected}")]
    TableShape { name: String, expected: usize, found: usize },
    #[error("table given for undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("function `{name}` maps into element {value}, outside the universe")]
    NotClosed { name: String, value: usize },
}

/// A finite metric structure with exact rational tables.
///
/// Tables are flat, indexed by tuples in mixed radix with the first
/// argument most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    sig: Signature,
    universe: Vec<String>,
    metric: Vec<Q>,
    functions: BTreeMap<String, Vec<Elem>>,
    relations: BTreeMap<String, Vec<Q>>,
}

impl FiniteStructure {
    /// Checks table shapes only; use [`super::validate`] for the metric and
    /// Lipschitz invariants.
    pub fn new(
        sig: Signature,
        universe: Vec<String>,
        metric: Vec<Q>,
        functions: BTreeMap<String, Vec<Elem>>,
        relations: BTreeMap<String, Vec<Q>>,
    ) -> Result<Self, StructureError> {
        let n = universe.len();
        if n == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        if let Some(dup) = universe.iter().duplicates().next() {
            return Err(StructureError::DuplicateElement(dup.clone()));
        }
        if metric.len() != n * n {
            return Err(StructureError::MetricShape { expected: n * n, found: metric.len() });
        }
        for name in functions.keys() {
            if sig.function(name).is_none() {
                return Err(StructureError::UndeclaredSymbol(name.clone()));
            }
        }
        for name in relations.keys() {
            if sig.relation(name).is_none() {
                return Err(StructureError::UndeclaredSymbol(name.clone()));
            }
        }
        for f in sig.functions() {
            let table = functions.get(&f.name).ok_or_else(|| StructureError::MissingTable(f.name.clone()))?;
            let expected = n.pow(f.arity as u32);
            if table.len() != expected {
                return Err(StructureError::TableShape { name: f.name.clone(), expected, found: table.len() });
            }
            if let Some(&bad) = table.iter().find(|&&v| v >= n) {
                return Err(StructureError::NotClosed { name: f.name.clone(), value: bad });
            }
        }
        for r in sig.relations() {
            let table = relations.get(&r.name).ok_or_else(|| StructureError::MissingTable(r.name.clone()))?;
            let expected = n.pow(r.arity as u32);
            if table.len() != expected {
                return Err(StructureError::TableShape { name: r.name.clone(), expected, found: table.len() });
            }
        }
        Ok(FiniteStructure { sig, universe, metric, functions, relations })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.universe.len()
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.universe[e]
    }

    pub fn element(&self, id: &str) -> Option<Elem> {
        self.universe.iter().position(|u| u == id)
    }

    pub fn dist(&self, a: Elem, b: Elem) -> &Q {
        &self.metric[a * self.size() + b]
    }

    pub fn metric_table(&self) -> &[Q] {
        &self.metric
    }

    pub fn function_table(&self, name: &str) -> Option<&[Elem]> {
        self.functions.get(name).map(Vec::as_slice)
    }

    pub fn relation_table(&self, name: &str) -> Option<&[Q]> {
        self.relations.get(name).map(Vec::as_slice)
    }

    pub fn tuple_index(&self, args: &[Elem]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size() + a)
    }

    pub fn tuple_of(&self, mut index: usize, arity: usize) -> Vec<Elem> {
        let n = self.size();
        let mut out = vec![0; arity];
        for slot in out.iter_mut().rev() {
            *slot = index % n;
            index /= n;
        }
        out
    }

    /// All `arity`-tuples in lexicographic order.
    pub fn tuples(&self, arity: usize) -> impl Iterator<Item = Vec<Elem>> + '_ {
        (0..self.size().pow(arity as u32)).map(move |i| self.tuple_of(i, arity))
    }

    pub fn apply(&self, name: &str, args: &[Elem]) -> Option<Elem> {
        self.functions.get(name).map(|t| t[self.tuple_index(args)])
    }

    pub fn relation_value(&self, name: &str, args: &[Elem]) -> Option<&Q> {
        self.relations.get(name).map(|t| &t[self.tuple_index(args)])
    }

    /// Same structure with every distance multiplied by `factor`.
    pub fn with_scaled_metric(&self, factor: &Q) -> FiniteStructure {
        let mut out = self.clone();
        out.metric.iter_mut().for_each(|d| *d = &*d * factor);
        out
    }

    /// Tuple written with element ids, e.g. `(a,b)`.
    pub fn show_tuple(&self, t: &[Elem]) -> String {
        format!("({})", t.iter().map(|&e| self.name(e)).join(","))
    }
}

/// One failed invariant, with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MetricRange { a: String, b: String, value: Q },
    MetricDiagonal { a: String, value: Q },
    MetricAsymmetric { a: String, b: String },
    MetricNotSeparating { a: String, b: String },
    Triangle { a: String, b: String, c: String },
    RelationRange { relation: String, tuple: String, value: Q },
    RelationLipschitz { relation: String, left: String, right: String },
    FunctionLipschitz { function: String, left: String, right: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MetricRange { a, b, value } => write!(f, "metric: d({a},{b}) = {value} outside [0,1]"),
            Violation::MetricDiagonal { a, value } => write!(f, "metric: d({a},{a}) = {value} is not 0"),
            Violation::MetricAsymmetric { a, b } => write!(f, "metric: d({a},{b}) != d({b},{a})"),
            Violation::MetricNotSeparating { a, b } => write!(f, "metric: d({a},{b}) = 0 for distinct elements"),
            Violation::Triangle { a, b, c } => write!(f, "metric: d({a},{c}) > d({a},{b}) + d({b},{c})"),
            Violation::RelationRange { relation, tuple, value } => {
                write!(f, "relation {relation}{tuple} = {value} outside [0,1]")
            }
            Violation::RelationLipschitz { relation, left, right } => {
                write!(f, "relation {relation} not Lipschitz between {left} and {right}")
            }
            Violation::FunctionLipschitz { function, left, right } => {
                write!(f, "function {function} not Lipschitz between {left} and {right}")
            }
        }
    }
}

/// Checks the metric axioms, relation ranges and every Lipschitz bound.
///
/// With the sum metric on tuples, a map is `λ`-Lipschitz iff it is
/// `λ`-Lipschitz in each argument separately, so only tuple pairs that
/// differ in one coordinate are compared. Metric range errors short-circuit
/// the checks that depend on the metric.
pub fn validate(m: &FiniteStructure) -> Vec<Violation> {
    let mut out = Vec::new();
    let zero = rational::zero();
    let one = rational::one();
    let n = m.size();
    for a in 0..n {
        for b in 0..n {
            let d = m.dist(a, b);
            if d < &zero || d > &one {
                out.push(Violation::MetricRange { a: m.name(a).into(), b: m.name(b).into(), value: d.clone() });
            }
        }
    }
    let metric_usable = out.is_empty();
    if metric_usable {
        for a in 0..n {
            if !num::Zero::is_zero(m.dist(a, a)) {
                out.push(Violation::MetricDiagonal { a: m.name(a).into(), value: m.dist(a, a).clone() });
            }
            for b in 0..n {
                if a < b && m.dist(a, b) != m.dist(b, a) {
                    out.push(Violation::MetricAsymmetric { a: m.name(a).into(), b: m.name(b).into() });
                }
                if a != b && num::Zero::is_zero(m.dist(a, b)) {
                    out.push(Violation::MetricNotSeparating { a: m.name(a).into(), b: m.name(b).into() });
                }
            }
        }
        let scaled = integer_metric(m);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let broken = match &scaled {
                        Some(d) => d[a * n + c] > d[a * n + b] + d[b * n + c],
                        None => m.dist(a, c) > &(m.dist(a, b) + m.dist(b, c)),
                    };
                    if broken {
                        out.push(Violation::Triangle {
                            a: m.name(a).into(),
                            b: m.name(b).into(),
                            c: m.name(c).into(),
                        });
                    }
                }
            }
        }
    }
    for r in m.signature().relations() {
        let table = m.relation_table(&r.name).expect("checked at construction");
        for (i, v) in table.iter().enumerate() {
            if v < &zero || v > &one {
                out.push(Violation::RelationRange {
                    relation: r.name.clone(),
                    tuple: m.show_tuple(&m.tuple_of(i, r.arity)),
                    value: v.clone(),
                });
            }
        }
        if metric_usable {
            let bound = scaled_metric(m, &r.lipschitz);
            for_each_neighbour_pair(m, r.arity, |li, ri, ab| {
                if rational::abs(&(&table[li] - &table[ri])) > bound[ab] {
                    out.push(Violation::RelationLipschitz {
                        relation: r.name.clone(),
                        left: m.show_tuple(&m.tuple_of(li, r.arity)),
                        right: m.show_tuple(&m.tuple_of(ri, r.arity)),
                    });
                }
            });
        }
    }
    if metric_usable {
        for f in m.signature().functions() {
            if f.arity == 0 {
                continue;
            }
            let table = m.function_table(&f.name).expect("checked at construction");
            let bound = scaled_metric(m, &f.lipschitz);
            for_each_neighbour_pair(m, f.arity, |li, ri, ab| {
                if m.dist(table[li], table[ri]) > &bound[ab] {
                    out.push(Violation::FunctionLipschitz {
                        function: f.name.clone(),
                        left: m.show_tuple(&m.tuple_of(li, f.arity)),
                        right: m.show_tuple(&m.tuple_of(ri, f.arity)),
                    });
                }
            });
        }
    }
    out
}

/// The metric times the lcm of its denominators, if that fits in `i64`.
fn integer_metric(m: &FiniteStructure) -> Option<Vec<i64>> {
    let lcm = m.metric_table().iter().fold(num::BigInt::from(1), |acc, q| num::Integer::lcm(&acc, q.denom()));
    m.metric_table()
        .iter()
        .map(|q| num::ToPrimitive::to_i64(&(q.numer() * (&lcm / q.denom()))).filter(|v| v.abs() < i64::MAX / 4))
        .collect()
}

fn scaled_metric(m: &FiniteStructure, factor: &Q) -> Vec<Q> {
    m.metric_table().iter().map(|d| factor * d).collect()
}

/// Calls `visit(left, right, a·n + b)` with tuple indices for every pair of
/// tuples that differ in exactly one coordinate, holding `a < b` there.
fn for_each_neighbour_pair(m: &FiniteStructure, arity: usize, mut visit: impl FnMut(usize, usize, usize)) {
    let n = m.size();
    let total = n.pow(arity as u32);
    for index in 0..total {
        let mut stride = 1;
        for _ in 0..arity {
            let a = index / stride % n;
            for b in (a + 1)..n {
                visit(index, index + (b - a) * stride, a * n + b);
            }
            stride *= n;
        }
    }
}
