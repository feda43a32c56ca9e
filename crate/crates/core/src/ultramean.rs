//! Finite-support ultrameans: weighted means of structures over one signature.
//!
//! The product universe carries the pseudometric `Σ wᵢ·dᵢ`; its kernel is
//! computed by union-find over pairs of tuples differing in one slot, using
//! exact zero tests. Classes are represented by their lexicographically
//! least tuple.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::rational::{self, Q};
use crate::semantics::{evaluate_closed, Elem, EvalError, FiniteStructure, StructureError};
use crate::syntax::Formula;

pub const DEFAULT_MAX_UNIVERSE: usize = 4096;

/// Product-universe cap, overridable through `ALQE_MAX_UNIVERSE`.
pub fn max_universe() -> usize {
    std::env::var("ALQE_MAX_UNIVERSE")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_UNIVERSE)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UltrameanError {
    #[error("family is empty")]
    Empty,
    #[error("weight {0} is negative")]
    NegativeWeight(String),
    #[error("weights sum to {0}, not 1")]
    WeightSum(String),
    #[error("member {0} has a different signature")]
    SignatureMismatch(usize),
    #[error("mixture parameter {0} is outside [0,1]")]
    LambdaRange(String),
    #[error("product universe has {size} elements, above the cap of {cap}")]
    TooLarge { size: String, cap: usize },
    #[error("function `{0}` is not well defined on kernel classes")]
    IllDefined(String),
    #[error("formula is not affine")]
    NotAffine,
    #[error("formula is not closed")]
    NotClosed,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone)]
pub struct WeightedFamily {
    members: Vec<(Q, FiniteStructure)>,
}

impl WeightedFamily {
    pub fn new(members: Vec<(Q, FiniteStructure)>) -> Result<Self, UltrameanError> {
        let first = members.first().ok_or(UltrameanError::Empty)?;
        let sig = first.1.signature().clone();
        let mut total = rational::zero();
        for (i, (w, m)) in members.iter().enumerate() {
            if w.is_negative() {
                return Err(UltrameanError::NegativeWeight(rational::show(w)));
            }
            if m.signature() != &sig {
                return Err(UltrameanError::SignatureMismatch(i));
            }
            total += w;
        }
        if total != rational::one() {
            return Err(UltrameanError::WeightSum(rational::show(&total)));
        }
        Ok(WeightedFamily { members })
    }

    pub fn members(&self) -> &[(Q, FiniteStructure)] {
        &self.members
    }

    pub fn weights(&self) -> impl Iterator<Item = &Q> {
        self.members.iter().map(|(w, _)| w)
    }

    /// `Σ wᵢ·φ^{Mᵢ}` for a closed formula.
    pub fn weighted_value(&self, f: &Formula) -> Result<Q, EvalError> {
        self.members
            .iter()
            .try_fold(rational::zero(), |acc, (w, m)| Ok(acc + w * evaluate_closed(m, f)?))
    }
}

/// The quotient structure together with the map from product tuples to
/// its elements.
#[derive(Debug, Clone)]
pub struct Ultramean {
    structure: FiniteStructure,
    sizes: Vec<usize>,
    class_of: Vec<Elem>,
    representatives: Vec<Vec<Elem>>,
}

impl Ultramean {
    pub fn structure(&self) -> &FiniteStructure {
        &self.structure
    }

    pub fn into_structure(self) -> FiniteStructure {
        self.structure
    }

    /// Class of a product tuple (one element per member).
    pub fn element_of(&self, tuple: &[Elem]) -> Elem {
        self.class_of[encode(&self.sizes, tuple)]
    }

    /// Lexicographically least tuple of a class.
    pub fn representative(&self, e: Elem) -> &[Elem] {
        &self.representatives[e]
    }
}

fn encode(sizes: &[usize], tuple: &[Elem]) -> usize {
    sizes.iter().zip(tuple).fold(0, |acc, (s, t)| acc * s + t)
}

fn decode(sizes: &[usize], mut index: usize) -> Vec<Elem> {
    let mut out = vec![0; sizes.len()];
    for (slot, s) in out.iter_mut().zip(sizes).rev() {
        *slot = index % s;
        index /= s;
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn ultramean(fam: &WeightedFamily) -> Result<FiniteStructure, UltrameanError> {
    Ok(build(fam, max_universe())?.structure)
}

/// Ultramean with an explicit product-size cap.
pub fn build(fam: &WeightedFamily, cap: usize) -> Result<Ultramean, UltrameanError> {
    let members = &fam.members;
    let sizes: Vec<usize> = members.iter().map(|(_, m)| m.size()).collect();
    let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s));
    let total = match total {
        Some(t) if t <= cap => t,
        _ => {
            let exact = sizes.iter().fold(num::BigUint::from(1u32), |acc, &s| acc * s);
            return Err(UltrameanError::TooLarge { size: exact.to_string(), cap });
        }
    };
    let dist = |a: &[Elem], b: &[Elem]| -> Q {
        members
            .iter()
            .zip(a.iter().zip(b))
            .filter(|(_, (x, y))| x != y)
            .fold(rational::zero(), |acc, ((w, m), (x, y))| acc + w * m.dist(*x, *y))
    };

    let mut parent: Vec<usize> = (0..total).collect();
    for idx in 0..total {
        let t = decode(&sizes, idx);
        for slot in 0..sizes.len() {
            for other in t[slot] + 1..sizes[slot] {
                let mut u = t.clone();
                u[slot] = other;
                if dist(&t, &u).is_zero() {
                    let (a, b) = (find(&mut parent, idx), find(&mut parent, encode(&sizes, &u)));
                    // Keep the smaller index as root so roots are least members.
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    let mut class_of = vec![0; total];
    let mut root_class: BTreeMap<usize, Elem> = BTreeMap::new();
    let mut representatives = Vec::new();
    for idx in 0..total {
        let root = find(&mut parent, idx);
        let next = root_class.len();
        let c = *root_class.entry(root).or_insert_with(|| {
            representatives.push(decode(&sizes, idx));
            next
        });
        class_of[idx] = c;
    }
    let n = representatives.len();
    let mut class_members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, &c) in class_of.iter().enumerate() {
        class_members[c].push(idx);
    }

    let names: Vec<String> = representatives
        .iter()
        .map(|r| {
            let parts: Vec<&str> = members.iter().zip(r).map(|((_, m), &e)| m.name(e)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let mut metric = Vec::with_capacity(n * n);
    for a in &representatives {
        for b in &representatives {
            metric.push(dist(a, b));
        }
    }

    let sig = members[0].1.signature().clone();
    let project = |args: &[Elem], i: usize, reps: &[Vec<Elem>]| -> Vec<Elem> {
        args.iter().map(|&c| reps[c][i]).collect()
    };
    let mut functions = BTreeMap::new();
    for sym in sig.functions() {
        let arity = sym.arity;
        let count = n.pow(arity as u32);
        let mut table = Vec::with_capacity(count);
        for idx in 0..count {
            let args = tuple_of(n, idx, arity);
            let image = apply_pointwise(fam, &sym.name, &args, &representatives, &project);
            let c = class_of[encode(&sizes, &image)];
            // Changing one argument to another member of its class must
            // land in the same class.
            for (pos, &arg) in args.iter().enumerate() {
                for &member in &class_members[arg][1..] {
                    let tuple = decode(&sizes, member);
                    let mut value = image.clone();
                    for (i, (_, m)) in members.iter().enumerate() {
                        let mut comp = project(&args, i, &representatives);
                        comp[pos] = tuple[i];
                        value[i] = m.apply(&sym.name, &comp).expect("shared signature");
                    }
                    if class_of[encode(&sizes, &value)] != c {
                        return Err(UltrameanError::IllDefined(sym.name.clone()));
                    }
                }
            }
            table.push(c);
        }
        functions.insert(sym.name.clone(), table);
    }

    let mut relations = BTreeMap::new();
    for sym in sig.relations() {
        let arity = sym.arity;
        let count = n.pow(arity as u32);
        let table = (0..count)
            .map(|idx| {
                let args = tuple_of(n, idx, arity);
                members.iter().enumerate().fold(rational::zero(), |acc, (i, (w, m))| {
                    let comp = project(&args, i, &representatives);
                    acc + w * m.relation_value(&sym.name, &comp).expect("shared signature")
                })
            })
            .collect();
        relations.insert(sym.name.clone(), table);
    }

    let structure = FiniteStructure::new(sig, names, metric, functions, relations)?;
    Ok(Ultramean { structure, sizes, class_of, representatives })
}

fn tuple_of(n: usize, mut index: usize, arity: usize) -> Vec<Elem> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

fn apply_pointwise(
    fam: &WeightedFamily,
    name: &str,
    args: &[Elem],
    reps: &[Vec<Elem>],
    project: &dyn Fn(&[Elem], usize, &[Vec<Elem>]) -> Vec<Elem>,
) -> Vec<Elem> {
    fam.members
        .iter()
        .enumerate()
        .map(|(i, (_, m))| m.apply(name, &project(args, i, reps)).expect("shared signature"))
        .collect()
}

/// Both sides of the evaluation law for one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LosReport {
    pub mean_value: Q,
    pub weighted_value: Q,
}

impl LosReport {
    pub fn holds(&self) -> bool {
        self.mean_value == self.weighted_value
    }
}

/// Compare `φ` in the ultramean with the weighted average of its values in
/// the members. Lattice connectives are rejected.
pub fn verify_los(fam: &WeightedFamily, f: &Formula) -> Result<LosReport, UltrameanError> {
    if !f.is_affine() {
        return Err(UltrameanError::NotAffine);
    }
    if !f.is_closed() {
        return Err(UltrameanError::NotClosed);
    }
    let mean = ultramean(fam)?;
    verify_los_in(fam, &mean, f)
}

/// As [`verify_los`], reusing an already built mean.
pub fn verify_los_in(fam: &WeightedFamily, mean: &FiniteStructure, f: &Formula) -> Result<LosReport, UltrameanError> {
    if !f.is_affine() {
        return Err(UltrameanError::NotAffine);
    }
    if !f.is_closed() {
        return Err(UltrameanError::NotClosed);
    }
    Ok(LosReport { mean_value: evaluate_closed(mean, f)?, weighted_value: fam.weighted_value(f)? })
}

/// `λ·M₁ + (1−λ)·M₂`.
pub fn mixture(m1: &FiniteStructure, m2: &FiniteStructure, lambda: &Q) -> Result<FiniteStructure, UltrameanError> {
    if lambda.is_negative() || lambda > &rational::one() {
        return Err(UltrameanError::LambdaRange(rational::show(lambda)));
    }
    let fam = WeightedFamily::new(vec![(lambda.clone(), m1.clone()), (rational::one() - lambda, m2.clone())])?;
    ultramean(&fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::semantics::{prime_field_vector_space, validate};
    use crate::syntax::{parse, Signature};

    fn f2_half() -> FiniteStructure {
        prime_field_vector_space(2).unwrap().with_scaled_metric(&frac(1, 2))
    }

    #[test]
    fn mean_of_two_f2_metrics() {
        let m1 = prime_field_vector_space(2).unwrap();
        let mean = mixture(&m1, &f2_half(), &frac(1, 2)).unwrap();
        assert_eq!(mean.size(), 4);
        assert!(validate(&mean).is_empty());
        let mut norms: Vec<Q> = mean.elements().map(|e| mean.dist(e, 0).clone()).collect();
        norms.sort();
        assert_eq!(norms, vec![int(0), frac(1, 4), frac(1, 2), frac(3, 4)]);
        let f = parse("sup x. |x|", &Signature::vector_space()).unwrap();
        assert_eq!(evaluate_closed(&mean, &f).unwrap(), frac(3, 4));
    }

    #[test]
    fn zero_weight_slot_collapses() {
        let m1 = prime_field_vector_space(3).unwrap();
        let fam = WeightedFamily::new(vec![(int(1), m1.clone()), (int(0), f2_half())]).unwrap();
        let um = build(&fam, 100).unwrap();
        assert_eq!(um.structure().size(), 3);
        assert_eq!(um.element_of(&[2, 1]), um.element_of(&[2, 0]));
        assert_eq!(um.representative(um.element_of(&[2, 1])), &[2, 0]);
        let f = parse("sup x. sup y. d(x + y, 0)", &Signature::vector_space()).unwrap();
        assert_eq!(evaluate_closed(um.structure(), &f).unwrap(), evaluate_closed(&m1, &f).unwrap());
    }

    #[test]
    fn family_errors() {
        let m = prime_field_vector_space(2).unwrap();
        assert!(matches!(
            WeightedFamily::new(vec![(frac(1, 2), m.clone())]),
            Err(UltrameanError::WeightSum(_))
        ));
        let ring = crate::semantics::prime_field_ring(2).unwrap();
        assert!(matches!(
            WeightedFamily::new(vec![(frac(1, 2), m.clone()), (frac(1, 2), ring)]),
            Err(UltrameanError::SignatureMismatch(1))
        ));
        assert!(matches!(mixture(&m, &m, &int(2)), Err(UltrameanError::LambdaRange(_))));
        let fam = WeightedFamily::new(vec![(frac(1, 2), m.clone()), (frac(1, 2), m)]).unwrap();
        assert!(matches!(build(&fam, 3), Err(UltrameanError::TooLarge { .. })));
    }

    #[test]
    fn los_rejects_lattice_formulas() {
        let m = prime_field_vector_space(2).unwrap();
        let fam = WeightedFamily::new(vec![(frac(1, 2), m.clone()), (frac(1, 2), f2_half())]).unwrap();
        let sig = Signature::vector_space();
        let report = verify_los(&fam, &parse("sup x. |x|", &sig).unwrap()).unwrap();
        assert!(report.holds());
        assert_eq!(report.mean_value, frac(3, 4));
        assert_eq!(verify_los(&fam, &parse("1", &sig).unwrap()).unwrap().mean_value, int(1));
        let join = parse("sup x. (|x| \\/ d(x,0))", &sig).unwrap();
        assert_eq!(verify_los(&fam, &join), Err(UltrameanError::NotAffine));
    }
}
