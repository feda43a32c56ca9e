//! Quantifier elimination for the affine theory of `F_q`-vector spaces, `q` prime.
//!
//! Every quantifier-free formula in `x̄` is a combination `r + Σ r_ℓ·|a_ℓ·x̄|`
//! ([`QFNormalForm`]). The supremum over `y` of such a combination is again one:
//! its value only depends on the line through `x̄`, so it is recovered by
//! interpolation at `x̄ = 0, b₁, …, b_m` against the basis
//! `1, 1−|b₁·x̄|, …, 1−|b_m·x̄|`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num::{Signed, Zero};

use crate::field::{NotPrime, PrimeField};
use crate::linalg::{self, Matrix};
use crate::rational::{self, Q};
use crate::syntax::{fresh_name, ops, Formula, Term};

/// Largest number of lines accepted for an interpolation system.
pub const MAX_LINES: u64 = 5000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QeError {
    #[error(transparent)]
    NotPrime(#[from] NotPrime),
    #[error("formula is not affine")]
    NotAffine,
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("symbol `{0}` is not in the vector-space language")]
    ForeignSymbol(String),
    #[error("scalar {0} is not an element of the field")]
    ScalarNotInField(String),
    #[error("variable `{0}` is not in the context")]
    UnknownVariable(String),
    #[error("F_{q}^{n} has {lines} lines, above the limit of {MAX_LINES}")]
    TooLarge { q: u64, n: usize, lines: String },
    #[error("interpolation matrix for F_{q}^{n} is singular")]
    Singular { q: u64, n: usize },
    #[error("point has {found} coordinates, expected {expected}")]
    PointShape { expected: usize, found: usize },
}

/// `|a·x̄|`, stored with its first nonzero coordinate equal to 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearAtom(Vec<u64>);

impl LinearAtom {
    /// Canonical atom for `a`, or `None` for the zero vector.
    pub fn new(field: PrimeField, a: &[u64]) -> Option<LinearAtom> {
        let lead = *a.iter().find(|&&c| c % field.order() != 0)?;
        let inv = field.inv(lead).expect("nonzero");
        Some(LinearAtom(a.iter().map(|&c| field.mul(c, inv)).collect()))
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.0
    }

    /// `|a·x̄|` in the discrete metric: 0 or 1.
    pub fn value(&self, field: PrimeField, point: &[u64]) -> bool {
        dot(field, &self.0, point) != 0
    }
}

fn dot(field: PrimeField, a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
}

/// `constant + Σ coeff·|atom·x̄|` over named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QFNormalForm {
    field: PrimeField,
    vars: Vec<String>,
    constant: Q,
    terms: BTreeMap<LinearAtom, Q>,
}

impl QFNormalForm {
    pub fn constant_form(field: PrimeField, vars: Vec<String>, c: Q) -> Self {
        QFNormalForm { field, vars, constant: c, terms: BTreeMap::new() }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn constant(&self) -> &Q {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<LinearAtom, Q> {
        &self.terms
    }

    /// Adds `c·|a·x̄|`; zero vectors and zero coefficients vanish.
    pub fn add_atom(&mut self, a: &[u64], c: Q) {
        let Some(atom) = LinearAtom::new(self.field, a) else { return };
        let entry = self.terms.entry(atom.clone()).or_insert_with(rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&atom);
        }
    }

    fn add_form(&mut self, other: &QFNormalForm) {
        self.constant += &other.constant;
        for (atom, c) in &other.terms {
            self.add_atom(&atom.0, c.clone());
        }
    }

    fn scaled(&self, r: &Q) -> QFNormalForm {
        let mut out = QFNormalForm::constant_form(self.field, self.vars.clone(), &self.constant * r);
        if !r.is_zero() {
            out.terms = self.terms.iter().map(|(a, c)| (a.clone(), c * r)).collect();
        }
        out
    }

    pub fn evaluate(&self, point: &[u64]) -> Q {
        self.terms
            .iter()
            .filter(|(a, _)| a.value(self.field, point))
            .fold(self.constant.clone(), |acc, (_, c)| acc + c)
    }

    /// The linear form `a·x̄` as a term.
    fn atom_term(&self, atom: &LinearAtom) -> Term {
        atom.0
            .iter()
            .zip(&self.vars)
            .filter(|(&c, _)| c != 0)
            .map(|(&c, v)| if c == 1 { Term::var(v) } else { Term::scale(rational::int(c as i64), Term::var(v)) })
            .reduce(Term::add)
            .expect("atoms are nonzero")
    }

    pub fn to_formula(&self) -> Formula {
        let mut parts = Vec::new();
        if !self.constant.is_zero() || self.terms.is_empty() {
            parts.push(Formula::Const(self.constant.clone()));
        }
        for (atom, c) in &self.terms {
            let norm = Formula::norm(self.atom_term(atom));
            parts.push(if *c == rational::one() { norm } else { Formula::scale(c.clone(), norm) });
        }
        Formula::sum_all(parts)
    }
}

impl fmt::Display for QFNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() || self.terms.is_empty() {
            write!(f, "{}", rational::show(&self.constant))?;
            first = false;
        }
        for (atom, c) in &self.terms {
            let magnitude = rational::abs(c);
            let sign = match (first, c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let scalar = if magnitude == rational::one() { String::new() } else { format!("{}*", rational::show(&magnitude)) };
            write!(f, "{sign}{scalar}|{}|", self.atom_term(atom))?;
            first = false;
        }
        Ok(())
    }
}

/// One vector per line of `F_q^n`, first nonzero coordinate 1, in
/// lexicographic order.
pub fn line_representatives(q: u64, n: usize) -> Result<Vec<Vec<u64>>, QeError> {
    let field = PrimeField::new(q)?;
    let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let lines = (total - 1) / (q as u128 - 1);
    if lines > MAX_LINES as u128 {
        return Err(QeError::TooLarge { q, n, lines: lines.to_string() });
    }
    Ok(points(field, n).filter(|p| p.iter().find(|&&c| c != 0) == Some(&1)).collect())
}

/// All of `F_q^n` in lexicographic order.
pub fn points(field: PrimeField, n: usize) -> impl Iterator<Item = Vec<u64>> {
    let q = field.order();
    let total = q.pow(n as u32);
    (0..total).map(move |mut i| {
        let mut p = vec![0; n];
        for slot in p.iter_mut().rev() {
            *slot = i % q;
            i /= q;
        }
        p
    })
}

/// The linear system behind one elimination step in dimension `n`.
#[derive(Debug, Clone)]
pub struct InterpolationSystem {
    pub q: u64,
    pub n: usize,
    pub representatives: Vec<Vec<u64>>,
    /// Row 0 is the point 0, row ℓ the point b_ℓ; column 0 is the constant
    /// function, column k the function `1 − |b_k·x̄|`.
    pub matrix: Matrix,
    inverse: Matrix,
}

impl InterpolationSystem {
    pub fn build(q: u64, n: usize) -> Result<Self, QeError> {
        let field = PrimeField::new(q)?;
        let reps = line_representatives(q, n)?;
        let m = reps.len();
        let mut matrix = vec![vec![rational::one(); m + 1]];
        for b in &reps {
            let mut row = vec![rational::one()];
            row.extend(reps.iter().map(|c| if dot(field, b, c) == 0 { rational::one() } else { rational::zero() }));
            matrix.push(row);
        }
        let inverse = linalg::inverse(&matrix).ok_or(QeError::Singular { q, n })?;
        Ok(InterpolationSystem { q, n, representatives: reps, matrix, inverse })
    }

    /// Shared, memoized system for `(q, n)`.
    pub fn cached(q: u64, n: usize) -> Result<Arc<Self>, QeError> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<InterpolationSystem>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(sys) = cache.lock().expect("cache poisoned").get(&(q, n)) {
            return Ok(sys.clone());
        }
        let sys = Arc::new(Self::build(q, n)?);
        cache.lock().expect("cache poisoned").insert((q, n), sys.clone());
        Ok(sys)
    }

    pub fn lines(&self) -> usize {
        self.representatives.len()
    }

    /// The `m×m` block `1 − |b_ℓ·b_k|`.
    pub fn u_matrix(&self) -> Matrix {
        self.matrix[1..].iter().map(|row| row[1..].to_vec()).collect()
    }

    pub fn solve(&self, values: &[Q]) -> Vec<Q> {
        linalg::mat_vec(&self.inverse, values)
    }
}

struct Linear<'a> {
    field: PrimeField,
    vars: &'a [String],
}

impl Linear<'_> {
    fn scalar(&self, c: &Q) -> Result<u64, QeError> {
        self.field.from_rational(c).ok_or_else(|| QeError::ScalarNotInField(rational::show(c)))
    }

    fn combine(&self, a: Vec<u64>, b: Vec<u64>, sign: u64) -> Vec<u64> {
        a.into_iter().zip(b).map(|(x, y)| self.field.add(x, self.field.mul(sign, y))).collect()
    }

    /// Coefficient vector of a term in the vector-space language.
    fn form(&self, t: &Term) -> Result<Vec<u64>, QeError> {
        let n = self.vars.len();
        let minus_one = self.field.neg(1);
        Ok(match t {
            Term::Var(v) => {
                let i = self.vars.iter().position(|w| w == v).ok_or_else(|| QeError::UnknownVariable(v.clone()))?;
                let mut out = vec![0; n];
                out[i] = 1;
                out
            }
            Term::App(name, args) if name == ops::ZERO && args.is_empty() => vec![0; n],
            Term::App(name, args) if name == ops::ADD && args.len() == 2 => {
                self.combine(self.form(&args[0])?, self.form(&args[1])?, 1)
            }
            Term::App(name, args) if name == ops::NEG && args.len() == 1 => {
                self.form(&args[0])?.into_iter().map(|c| self.field.neg(c)).collect()
            }
            Term::Add(a, b) => self.combine(self.form(a)?, self.form(b)?, 1),
            Term::Sub(a, b) => self.combine(self.form(a)?, self.form(b)?, minus_one),
            Term::Neg(a) => self.form(a)?.into_iter().map(|c| self.field.neg(c)).collect(),
            Term::Scale(c, a) => {
                let c = self.scalar(c)?;
                self.form(a)?.into_iter().map(|x| self.field.mul(c, x)).collect()
            }
            Term::App(name, _) => return Err(QeError::ForeignSymbol(name.clone())),
            Term::Num(r) => return Err(QeError::ForeignSymbol(rational::show(r))),
            Term::Mul(..) => return Err(QeError::ForeignSymbol(ops::MUL.into())),
            Term::Meet(..) => return Err(QeError::ForeignSymbol(ops::MEET.into())),
            Term::Join(..) => return Err(QeError::ForeignSymbol(ops::JOIN.into())),
        })
    }
}

/// Normal form of a quantifier-free affine formula over `vars`.
pub fn qf_normalize(f: &Formula, q: u64, vars: &[String]) -> Result<QFNormalForm, QeError> {
    let field = PrimeField::new(q)?;
    normalize_in(f, field, vars, false)
}

fn normalize_in(f: &Formula, field: PrimeField, vars: &[String], quantifiers: bool) -> Result<QFNormalForm, QeError> {
    let lin = Linear { field, vars };
    let empty = || QFNormalForm::constant_form(field, vars.to_vec(), rational::zero());
    Ok(match f {
        Formula::Const(c) => QFNormalForm::constant_form(field, vars.to_vec(), c.clone()),
        Formula::Dist(a, b) => {
            let mut out = empty();
            out.add_atom(&lin.combine(lin.form(a)?, lin.form(b)?, field.neg(1)), rational::one());
            out
        }
        Formula::Sum(a, b) => {
            let mut out = normalize_in(a, field, vars, quantifiers)?;
            out.add_form(&normalize_in(b, field, vars, quantifiers)?);
            out
        }
        Formula::Scale(r, a) => normalize_in(a, field, vars, quantifiers)?.scaled(r),
        Formula::Sup(y, body) | Formula::Inf(y, body) if quantifiers => {
            let is_sup = matches!(f, Formula::Sup(..));
            // The bound variable goes last; rename it if it clashes.
            let (y, body) = if vars.contains(y) {
                let mut taken = vars.to_vec();
                taken.extend(body.all_vars());
                let fresh = fresh_name(y, &taken);
                let renamed = body.substitute(y, &Term::var(&fresh));
                (fresh, renamed)
            } else {
                (y.clone(), (**body).clone())
            };
            let mut inner_vars = vars.to_vec();
            inner_vars.push(y);
            let inner = normalize_in(&body, field, &inner_vars, true)?;
            if is_sup {
                eliminate_one(&inner)?
            } else {
                eliminate_one(&inner.scaled(&rational::int(-1)))?.scaled(&rational::int(-1))
            }
        }
        Formula::Sup(..) | Formula::Inf(..) => return Err(QeError::NotQuantifierFree),
        Formula::Atom(r, _) => return Err(QeError::ForeignSymbol(r.clone())),
        Formula::Meet(..) | Formula::Join(..) | Formula::Neg(..) => return Err(QeError::NotAffine),
    })
}

/// `sup_y ψ` where `y` is the last variable of `psi`; the result lives on
/// the remaining variables.
pub fn eliminate_one(psi: &QFNormalForm) -> Result<QFNormalForm, QeError> {
    let field = psi.field;
    let n = psi.vars.len().checked_sub(1).expect("a variable to eliminate");
    let outer_vars = psi.vars[..n].to_vec();
    let mut out = QFNormalForm::constant_form(field, outer_vars, psi.constant.clone());
    // Active atoms as (a', r) standing for r·|a'·x̄ − y|.
    let mut active: Vec<(Vec<u64>, Q)> = Vec::new();
    for (atom, r) in &psi.terms {
        let a = &atom.0;
        let cy = a[n];
        if cy == 0 {
            out.add_atom(&a[..n], r.clone());
        } else {
            let inv = field.inv(cy).expect("nonzero");
            active.push((a[..n].iter().map(|&c| field.mul(c, inv)).collect(), r.clone()));
        }
    }
    if active.is_empty() {
        return Ok(out);
    }
    let sup_at = |x: &[u64]| -> Q {
        field
            .elements()
            .map(|y| {
                active
                    .iter()
                    .filter(|(a, _)| field.sub(dot(field, a, x), y) != 0)
                    .fold(rational::zero(), |acc, (_, r)| acc + r)
            })
            .max()
            .expect("fields are nonempty")
    };
    if n == 0 {
        out.constant += sup_at(&[]);
        return Ok(out);
    }
    let sys = InterpolationSystem::cached(field.order(), n)?;
    let mut values = vec![sup_at(&vec![0; n])];
    values.extend(sys.representatives.iter().map(|b| sup_at(b)));
    let s = sys.solve(&values);
    out.constant += &s[0];
    for (b, sk) in sys.representatives.iter().zip(&s[1..]) {
        out.constant += sk;
        out.add_atom(b, -sk);
    }
    Ok(out)
}

/// Quantifier-free equivalent of an affine formula over `F_q^{|vars|}`.
/// Infima are handled as `−sup(−·)`.
pub fn eliminate_all(f: &Formula, q: u64, vars: &[String]) -> Result<QFNormalForm, QeError> {
    let field = PrimeField::new(q)?;
    if !f.is_affine() {
        return Err(QeError::NotAffine);
    }
    normalize_in(f, field, vars, true)
}

/// Direct evaluation in `F_q` with the discrete metric, quantifiers by
/// enumeration. Independent of the normal-form machinery.
pub fn brute_force(f: &Formula, q: u64, vars: &[String], point: &[u64]) -> Result<Q, QeError> {
    let field = PrimeField::new(q)?;
    if point.len() != vars.len() {
        return Err(QeError::PointShape { expected: vars.len(), found: point.len() });
    }
    let mut env: Vec<(String, u64)> = vars.iter().cloned().zip(point.iter().map(|&c| c % q)).collect();
    brute(f, field, &mut env)
}

fn brute(f: &Formula, field: PrimeField, env: &mut Vec<(String, u64)>) -> Result<Q, QeError> {
    Ok(match f {
        Formula::Const(c) => c.clone(),
        Formula::Dist(a, b) => {
            if brute_term(a, field, env)? == brute_term(b, field, env)? {
                rational::zero()
            } else {
                rational::one()
            }
        }
        Formula::Sum(a, b) => brute(a, field, env)? + brute(b, field, env)?,
        Formula::Scale(r, a) => r * brute(a, field, env)?,
        Formula::Sup(y, body) | Formula::Inf(y, body) => {
            let mut values = Vec::new();
            for v in field.elements() {
                env.push((y.clone(), v));
                let value = brute(body, field, env);
                env.pop();
                values.push(value?);
            }
            let it = values.into_iter();
            if matches!(f, Formula::Sup(..)) { it.max() } else { it.min() }.expect("fields are nonempty")
        }
        Formula::Meet(a, b) => rational::min(&brute(a, field, env)?, &brute(b, field, env)?),
        Formula::Join(a, b) => rational::max(&brute(a, field, env)?, &brute(b, field, env)?),
        Formula::Neg(a) => rational::one() - brute(a, field, env)?,
        Formula::Atom(r, _) => return Err(QeError::ForeignSymbol(r.clone())),
    })
}

fn brute_term(t: &Term, field: PrimeField, env: &[(String, u64)]) -> Result<u64, QeError> {
    Ok(match t {
        Term::Var(v) => {
            env.iter().rev().find(|(w, _)| w == v).map(|(_, x)| *x).ok_or_else(|| QeError::UnknownVariable(v.clone()))?
        }
        Term::App(name, args) if name == ops::ZERO && args.is_empty() => 0,
        Term::App(name, args) if name == ops::ADD && args.len() == 2 => {
            field.add(brute_term(&args[0], field, env)?, brute_term(&args[1], field, env)?)
        }
        Term::App(name, args) if name == ops::NEG && args.len() == 1 => field.neg(brute_term(&args[0], field, env)?),
        Term::Add(a, b) => field.add(brute_term(a, field, env)?, brute_term(b, field, env)?),
        Term::Sub(a, b) => field.sub(brute_term(a, field, env)?, brute_term(b, field, env)?),
        Term::Neg(a) => field.neg(brute_term(a, field, env)?),
        Term::Scale(c, a) => {
            let c = field.from_rational(c).ok_or_else(|| QeError::ScalarNotInField(rational::show(c)))?;
            field.mul(c, brute_term(a, field, env)?)
        }
        Term::App(name, _) => return Err(QeError::ForeignSymbol(name.clone())),
        Term::Num(r) => return Err(QeError::ForeignSymbol(rational::show(r))),
        Term::Mul(..) => return Err(QeError::ForeignSymbol(ops::MUL.into())),
        Term::Meet(..) => return Err(QeError::ForeignSymbol(ops::MEET.into())),
        Term::Join(..) => return Err(QeError::ForeignSymbol(ops::JOIN.into())),
    })
}

/// A point where the eliminated form and direct evaluation disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub point: Vec<u64>,
    pub eliminated: Q,
    pub direct: Q,
}

/// Full truth table of `nf` against `f`, as `(point, eliminated, direct)`.
pub fn truth_table(f: &Formula, nf: &QFNormalForm) -> Result<Vec<Mismatch>, QeError> {
    let field = nf.field;
    points(field, nf.vars.len())
        .map(|p| {
            let direct = brute_force(f, field.order(), &nf.vars, &p)?;
            Ok(Mismatch { eliminated: nf.evaluate(&p), direct, point: p })
        })
        .collect()
}

/// Rows of [`truth_table`] that disagree.
pub fn verify(f: &Formula, nf: &QFNormalForm) -> Result<Vec<Mismatch>, QeError> {
    Ok(truth_table(f, nf)?.into_iter().filter(|m| m.eliminated != m.direct).collect())
}
