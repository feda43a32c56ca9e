//! Realized type vectors over a finite fragment of formulas.
//!
//! A cloud is the finite set of value vectors `(φ₁(ā), …, φ_k(ā))` realized
//! in some finite structures. Its extreme points are the vertices of its
//! convex hull, found with the exact LP in [`crate::lp`]. Everything here is
//! relative to the given cloud, not to the full type space.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::lp;
use crate::rational::{self, Q};
use crate::semantics::{evaluate_at, Elem, EvalError, FiniteStructure};
use crate::syntax::{parse, Formula, ParseError, Signature};
use crate::ultramean::{self, max_universe, UltrameanError, WeightedFamily};

#[derive(Debug, thiserror::Error)]
pub enum TypespaceError {
    #[error("fragment has no formulas")]
    EmptyFragment,
    #[error("unknown tag `{0}` (expected atomic, qf, infimal or general)")]
    UnknownTag(String),
    #[error("formula `{formula}` is not {tag}")]
    TagMismatch { formula: String, tag: Tag },
    #[error("formula `{formula}` has free variable `{var}` outside {vars:?}")]
    FreeVariable { formula: String, var: String, vars: Vec<String> },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("{count} tuples exceed the cap of {cap}")]
    TooLarge { count: String, cap: usize },
    #[error("no fragment formula is tagged {0} or finer")]
    NoTaggedCoordinates(Tag),
    #[error("formula `{0}` is not affine")]
    NotAffine(String),
    #[error("tuple has {got} entries, expected {expected}")]
    TupleArity { got: usize, expected: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Ultramean(#[from] UltrameanError),
}

/// Syntactic class of a fragment formula. Each class contains the previous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Atomic,
    Qf,
    Infimal,
    General,
}

impl Tag {
    /// Finest class containing `f`.
    pub fn of(f: &Formula) -> Tag {
        if f.is_atomic() {
            Tag::Atomic
        } else if f.is_quantifier_free() {
            Tag::Qf
        } else if f.is_infimal() {
            Tag::Infimal
        } else {
            Tag::General
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Atomic => "atomic",
            Tag::Qf => "qf",
            Tag::Infimal => "infimal",
            Tag::General => "general",
        })
    }
}

impl FromStr for Tag {
    type Err = TypespaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "atomic" => Ok(Tag::Atomic),
            "qf" | "quantifier-free" => Ok(Tag::Qf),
            "infimal" => Ok(Tag::Infimal),
            "general" => Ok(Tag::General),
            other => Err(TypespaceError::UnknownTag(other.to_string())),
        }
    }
}

/// Formulas `φ₁..φ_k` in the variables `vars`, each with a tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    vars: Vec<String>,
    formulas: Vec<(Formula, Tag)>,
}

/// `x` for a single variable, `x1..xn` otherwise.
pub fn standard_vars(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["x".to_string()]
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

impl Fragment {
    /// `None` tags are inferred from the formula's shape.
    pub fn new(vars: Vec<String>, formulas: Vec<(Formula, Option<Tag>)>) -> Result<Self, TypespaceError> {
        if formulas.is_empty() {
            return Err(TypespaceError::EmptyFragment);
        }
        let mut out = Vec::with_capacity(formulas.len());
        for (f, tag) in formulas {
            if let Some(var) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
                return Err(TypespaceError::FreeVariable { formula: f.to_string(), var, vars });
            }
            let shape = Tag::of(&f);
            let tag = tag.unwrap_or(shape);
            if tag < shape {
                return Err(TypespaceError::TagMismatch { formula: f.to_string(), tag });
            }
            out.push((f, tag));
        }
        Ok(Fragment { vars, formulas: out })
    }

    /// One formula per line, optionally followed by ` @tag`. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str, sig: &Signature, vars: Vec<String>) -> Result<Self, TypespaceError> {
        let mut formulas = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (body, tag) = match line.rsplit_once('@') {
                Some((body, tag)) => (body, Some(tag.parse::<Tag>()?)),
                None => (line, None),
            };
            let f = parse(body, sig).map_err(|source| TypespaceError::Parse { line: i + 1, source })?;
            formulas.push((f, tag));
        }
        Fragment::new(vars, formulas)
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.iter().map(|(f, _)| f)
    }

    pub fn tags(&self) -> impl Iterator<Item = Tag> + '_ {
        self.formulas.iter().map(|(_, t)| *t)
    }

    /// Values of every formula at `tuple`.
    pub fn vector(&self, m: &FiniteStructure, tuple: &[Elem]) -> Result<Vec<Q>, TypespaceError> {
        if tuple.len() != self.arity() {
            return Err(TypespaceError::TupleArity { got: tuple.len(), expected: self.arity() });
        }
        Ok(self.formulas().map(|f| evaluate_at(m, f, &self.vars, tuple)).collect::<Result<_, _>>()?)
    }
}

/// Where a vector was realized: structure label and tuple of element names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub structure: String,
    pub tuple: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeVector {
    pub values: Vec<Q>,
    pub provenance: Vec<Provenance>,
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.values.iter().map(rational::show).join(", "))
    }
}

/// Distinct vectors over one fragment, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCloud {
    vectors: Vec<TypeVector>,
}

impl TypeCloud {
    /// Deduplicates by value, merging provenances.
    pub fn new(vectors: impl IntoIterator<Item = TypeVector>) -> Self {
        let mut merged: BTreeMap<Vec<Q>, Vec<Provenance>> = BTreeMap::new();
        for v in vectors {
            merged.entry(v.values).or_default().extend(v.provenance);
        }
        let vectors = merged
            .into_iter()
            .map(|(values, mut provenance)| {
                provenance.sort();
                provenance.dedup();
                TypeVector { values, provenance }
            })
            .collect();
        TypeCloud { vectors }
    }

    pub fn from_values(values: impl IntoIterator<Item = Vec<Q>>) -> Self {
        TypeCloud::new(values.into_iter().map(|values| TypeVector { values, provenance: Vec::new() }))
    }

    pub fn vectors(&self) -> &[TypeVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn merge(&self, other: &TypeCloud) -> TypeCloud {
        TypeCloud::new(self.vectors.iter().chain(&other.vectors).cloned())
    }
}

/// The cloud of all `n`-tuples of `m`, labelled `label`.
pub fn realized_types(m: &FiniteStructure, frag: &Fragment, label: &str) -> Result<TypeCloud, TypespaceError> {
    let cap = max_universe();
    let count = (m.size() as u128).checked_pow(frag.arity() as u32);
    if count.is_none_or(|c| c > cap as u128) {
        let exact = num::BigUint::from(m.size()).pow(frag.arity() as u32);
        return Err(TypespaceError::TooLarge { count: exact.to_string(), cap });
    }
    let mut out = Vec::new();
    for tuple in m.tuples(frag.arity()) {
        let values = frag.vector(m, &tuple)?;
        let tuple = tuple.iter().map(|&e| m.name(e).to_string()).collect();
        out.push(TypeVector { values, provenance: vec![Provenance { structure: label.to_string(), tuple }] });
    }
    Ok(TypeCloud::new(out))
}

/// Convex weights aligned with the vectors of a cloud.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub weights: Vec<Q>,
}

impl Certificate {
    /// Re-checks `λ >= 0`, `Σλ = 1` and `Σλᵢwᵢ = v` by substitution.
    pub fn verify(&self, cloud: &TypeCloud, v: &[Q]) -> bool {
        if self.weights.len() != cloud.len() || self.weights.iter().any(num::Signed::is_negative) {
            return false;
        }
        if self.weights.iter().sum::<Q>() != rational::one() {
            return false;
        }
        (0..v.len()).all(|c| {
            let combined: Q = self.weights.iter().zip(&cloud.vectors).map(|(w, p)| w * &p.values[c]).sum();
            combined == v[c]
        })
    }
}

fn certificate(v: &[Q], cloud: &TypeCloud, skip_equal: bool) -> Option<Certificate> {
    let used: Vec<usize> = (0..cloud.len()).filter(|&i| !(skip_equal && cloud.vectors[i].values == v)).collect();
    let points: Vec<Vec<Q>> = used.iter().map(|&i| cloud.vectors[i].values.clone()).collect();
    let w = lp::convex_weights(&points, v)?;
    let mut weights = vec![rational::zero(); cloud.len()];
    for (i, x) in used.into_iter().zip(w) {
        weights[i] = x;
    }
    Some(Certificate { weights })
}

/// Weights expressing `v` from the cloud vectors other than `v` itself.
pub fn is_convex_combination(v: &[Q], cloud: &TypeCloud) -> Option<Certificate> {
    certificate(v, cloud, true)
}

/// Weights expressing `v` from all cloud vectors, `v` included.
pub fn hull_certificate(v: &[Q], cloud: &TypeCloud) -> Option<Certificate> {
    certificate(v, cloud, false)
}

/// Vertices of the convex hull.
pub fn extreme_points(cloud: &TypeCloud) -> TypeCloud {
    let vectors = cloud.vectors.iter().filter(|v| is_convex_combination(&v.values, cloud).is_none()).cloned();
    TypeCloud { vectors: vectors.collect() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub tag: Tag,
    /// Indices of the tagged coordinates.
    pub coordinates: Vec<usize>,
    /// Two distinct cloud vectors that agree on every tagged coordinate.
    pub offending: Option<(TypeVector, TypeVector)>,
}

impl Separation {
    pub fn separated(&self) -> bool {
        self.offending.is_none()
    }
}

/// Whether the coordinates tagged `tag` or finer tell all cloud vectors
/// apart. This certifies separation on the cloud only.
pub fn separation_check(cloud: &TypeCloud, frag: &Fragment, tag: Tag) -> Result<Separation, TypespaceError> {
    let coordinates: Vec<usize> = frag.tags().positions(|t| t <= tag).collect();
    if coordinates.is_empty() {
        return Err(TypespaceError::NoTaggedCoordinates(tag));
    }
    let mut seen: HashMap<Vec<&Q>, usize> = HashMap::new();
    for (i, v) in cloud.vectors.iter().enumerate() {
        let key: Vec<&Q> = coordinates.iter().map(|&c| &v.values[c]).collect();
        if let Some(&j) = seen.get(&key) {
            let offending = Some((cloud.vectors[j].clone(), v.clone()));
            return Ok(Separation { tag, coordinates, offending });
        }
        seen.insert(key, i);
    }
    Ok(Separation { tag, coordinates, offending: None })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureReport {
    /// Type vector of the product tuple in the mixture.
    pub mixed: Vec<Q>,
    /// `λ·v₁ + (1−λ)·v₂`.
    pub combined: Vec<Q>,
}

impl MixtureReport {
    pub fn holds(&self) -> bool {
        self.mixed == self.combined
    }
}

/// Compares the type of `(t₁, t₂)` in `λ·M₁ + (1−λ)·M₂` with the mixture of
/// the two type vectors.
pub fn mixture_check(
    m1: &FiniteStructure,
    m2: &FiniteStructure,
    lambda: &Q,
    frag: &Fragment,
    t1: &[Elem],
    t2: &[Elem],
) -> Result<MixtureReport, TypespaceError> {
    if let Some(f) = frag.formulas().find(|f| !f.is_affine()) {
        return Err(TypespaceError::NotAffine(f.to_string()));
    }
    for t in [t1, t2] {
        if t.len() != frag.arity() {
            return Err(TypespaceError::TupleArity { got: t.len(), expected: frag.arity() });
        }
    }
    if num::Signed::is_negative(lambda) || lambda > &rational::one() {
        return Err(UltrameanError::LambdaRange(rational::show(lambda)).into());
    }
    let fam = WeightedFamily::new(vec![(lambda.clone(), m1.clone()), (rational::one() - lambda, m2.clone())])?;
    let mean = ultramean::build(&fam, max_universe())?;
    let tuple: Vec<Elem> = t1.iter().zip(t2).map(|(&a, &b)| mean.element_of(&[a, b])).collect();
    let mixed = frag.vector(mean.structure(), &tuple)?;
    let v1 = frag.vector(m1, t1)?;
    let v2 = frag.vector(m2, t2)?;
    let mu = rational::one() - lambda;
    let combined = v1.iter().zip(&v2).map(|(a, b)| lambda * a + &mu * b).collect();
    Ok(MixtureReport { mixed, combined })
}
