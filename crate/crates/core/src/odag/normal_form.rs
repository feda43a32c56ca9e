//! Terms of the ordered-group language as finite joins of meets of linear
//! expressions.

use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};

use super::OdagError;
use crate::rational::{self, Q};
use crate::syntax::{ops, Term};

/// `Σ cᵥ·v + constant`, with no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinExpr {
    pub coeffs: BTreeMap<String, Q>,
    pub constant: Q,
}

impl LinExpr {
    pub fn constant(c: Q) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(v: &str) -> Self {
        LinExpr { coeffs: [(v.to_string(), rational::one())].into(), constant: rational::zero() }
    }

    pub fn coeff(&self, v: &str) -> Q {
        self.coeffs.get(v).cloned().unwrap_or_else(rational::zero)
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (v, c) in &other.coeffs {
            let entry = out.coeffs.entry(v.clone()).or_insert_with(rational::zero);
            *entry += c;
            if entry.is_zero() {
                out.coeffs.remove(v);
            }
        }
        out
    }

    pub fn scale(&self, r: &Q) -> LinExpr {
        if r.is_zero() {
            return LinExpr::constant(rational::zero());
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * r)).collect(),
            constant: &self.constant * r,
        }
    }

    pub fn neg(&self) -> LinExpr {
        self.scale(&rational::int(-1))
    }

    pub fn evaluate(&self, asg: &BTreeMap<String, Q>) -> Result<Q, OdagError> {
        self.coeffs.iter().try_fold(self.constant.clone(), |acc, (v, c)| {
            let x = asg.get(v).ok_or_else(|| OdagError::UnboundVariable(v.clone()))?;
            Ok(acc + c * x)
        })
    }

    /// `a·v + c` after substituting every other variable from `asg`.
    pub fn restrict(&self, v: &str, asg: &BTreeMap<String, Q>) -> Result<(Q, Q), OdagError> {
        let mut rest = self.clone();
        let a = rest.coeffs.remove(v).unwrap_or_else(rational::zero);
        Ok((a, rest.evaluate(asg)?))
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut piece = |f: &mut fmt::Formatter<'_>, c: &Q, body: &str| -> fmt::Result {
            let magnitude = rational::abs(c);
            let sign = match (first, c.is_negative()) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            first = false;
            if body.is_empty() {
                write!(f, "{sign}{}", rational::show(&magnitude))
            } else if magnitude == rational::one() {
                write!(f, "{sign}{body}")
            } else {
                write!(f, "{sign}{}*{body}", rational::show(&magnitude))
            }
        };
        for (v, c) in &self.coeffs {
            piece(f, c, v)?;
        }
        if !self.constant.is_zero() || self.coeffs.is_empty() {
            piece(f, &self.constant, "")?;
        }
        Ok(())
    }
}

/// `⋁ᵢ ⋀ⱼ Lᵢⱼ`, each meet sorted and deduplicated, meets sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeetJoinNormalForm {
    pub joins: Vec<Vec<LinExpr>>,
}

impl MeetJoinNormalForm {
    pub fn linear(l: LinExpr) -> Self {
        MeetJoinNormalForm { joins: vec![vec![l]] }
    }

    fn canonical(mut joins: Vec<Vec<LinExpr>>) -> Self {
        for m in joins.iter_mut() {
            m.sort();
            m.dedup();
        }
        joins.sort();
        joins.dedup();
        MeetJoinNormalForm { joins }
    }

    pub fn join(&self, other: &Self) -> Self {
        Self::canonical(self.joins.iter().chain(&other.joins).cloned().collect())
    }

    /// Distributes the meet over both joins.
    pub fn meet(&self, other: &Self) -> Self {
        let mut joins = Vec::new();
        for a in &self.joins {
            for b in &other.joins {
                joins.push(a.iter().chain(b).cloned().collect());
            }
        }
        Self::canonical(joins)
    }

    /// `(⋁ᵢ⋀ⱼ aᵢⱼ) + (⋁ₖ⋀ₗ bₖₗ) = ⋁ᵢₖ ⋀ⱼₗ (aᵢⱼ + bₖₗ)`.
    pub fn add(&self, other: &Self) -> Self {
        let mut joins = Vec::new();
        for a in &self.joins {
            for b in &other.joins {
                joins.push(a.iter().flat_map(|x| b.iter().map(move |y| x.add(y))).collect());
            }
        }
        Self::canonical(joins)
    }

    /// `−⋁ᵢ⋀ⱼ Lᵢⱼ = ⋀ᵢ⋁ⱼ −Lᵢⱼ`, redistributed into join-of-meets form.
    pub fn neg(&self) -> Self {
        self.joins
            .iter()
            .map(|m| Self::canonical(m.iter().map(|l| vec![l.neg()]).collect()))
            .reduce(|a, b| a.meet(&b))
            .expect("normal forms are nonempty")
    }

    pub fn scale(&self, r: &Q) -> Self {
        if r.is_negative() {
            return self.scale(&-r).neg();
        }
        if r.is_zero() {
            return Self::linear(LinExpr::constant(rational::zero()));
        }
        Self::canonical(self.joins.iter().map(|m| m.iter().map(|l| l.scale(r)).collect()).collect())
    }

    pub fn evaluate(&self, asg: &BTreeMap<String, Q>) -> Result<Q, OdagError> {
        let mut best: Option<Q> = None;
        for m in &self.joins {
            let mut low: Option<Q> = None;
            for l in m {
                let v = l.evaluate(asg)?;
                low = Some(match low {
                    Some(cur) if cur <= v => cur,
                    _ => v,
                });
            }
            let low = low.expect("meets are nonempty");
            best = Some(match best {
                Some(cur) if cur >= low => cur,
                _ => low,
            });
        }
        Ok(best.expect("normal forms are nonempty"))
    }

    pub fn pieces(&self) -> impl Iterator<Item = &LinExpr> {
        self.joins.iter().flatten()
    }
}

impl fmt::Display for MeetJoinNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let several = self.joins.len() > 1;
        for (i, m) in self.joins.iter().enumerate() {
            if i > 0 {
                write!(f, " \\/ ")?;
            }
            let wrap = several && m.len() > 1;
            if wrap {
                write!(f, "(")?;
            }
            for (j, l) in m.iter().enumerate() {
                if j > 0 {
                    write!(f, " /\\ ")?;
                }
                let text = l.to_string();
                if (m.len() > 1 || several) && text.contains(' ') {
                    write!(f, "({text})")?;
                } else {
                    write!(f, "{text}")?;
                }
            }
            if wrap {
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

/// Normal form of a term over `{+, −, ∧, ∨, 0}` with rational parameters.
pub fn term_normal_form(t: &Term) -> Result<MeetJoinNormalForm, OdagError> {
    use MeetJoinNormalForm as N;
    Ok(match t {
        Term::Var(v) => N::linear(LinExpr::var(v)),
        Term::Num(q) => N::linear(LinExpr::constant(q.clone())),
        Term::App(name, args) => match (name.as_str(), args.as_slice()) {
            (ops::ZERO, []) => N::linear(LinExpr::constant(rational::zero())),
            (ops::ADD, [a, b]) => term_normal_form(a)?.add(&term_normal_form(b)?),
            (ops::NEG, [a]) => term_normal_form(a)?.neg(),
            (ops::MEET, [a, b]) => term_normal_form(a)?.meet(&term_normal_form(b)?),
            (ops::JOIN, [a, b]) => term_normal_form(a)?.join(&term_normal_form(b)?),
            _ => return Err(OdagError::ForeignSymbol(name.clone())),
        },
        Term::Add(a, b) => term_normal_form(a)?.add(&term_normal_form(b)?),
        Term::Sub(a, b) => term_normal_form(a)?.add(&term_normal_form(b)?.neg()),
        Term::Neg(a) => term_normal_form(a)?.neg(),
        Term::Scale(r, a) => term_normal_form(a)?.scale(r),
        Term::Meet(a, b) => term_normal_form(a)?.meet(&term_normal_form(b)?),
        Term::Join(a, b) => term_normal_form(a)?.join(&term_normal_form(b)?),
        Term::Mul(..) => return Err(OdagError::ForeignSymbol(ops::MUL.into())),
    })
}

/// Direct evaluation of a term in `ℚ`.
pub fn eval_term(t: &Term, asg: &BTreeMap<String, Q>) -> Result<Q, OdagError> {
    Ok(match t {
        Term::Var(v) => asg.get(v).cloned().ok_or_else(|| OdagError::UnboundVariable(v.clone()))?,
        Term::Num(q) => q.clone(),
        Term::App(name, args) => match (name.as_str(), args.as_slice()) {
            (ops::ZERO, []) => rational::zero(),
            (ops::ADD, [a, b]) => eval_term(a, asg)? + eval_term(b, asg)?,
            (ops::NEG, [a]) => -eval_term(a, asg)?,
            (ops::MEET, [a, b]) => rational::min(&eval_term(a, asg)?, &eval_term(b, asg)?),
            (ops::JOIN, [a, b]) => rational::max(&eval_term(a, asg)?, &eval_term(b, asg)?),
            _ => return Err(OdagError::ForeignSymbol(name.clone())),
        },
        Term::Add(a, b) => eval_term(a, asg)? + eval_term(b, asg)?,
        Term::Sub(a, b) => eval_term(a, asg)? - eval_term(b, asg)?,
        Term::Neg(a) => -eval_term(a, asg)?,
        Term::Scale(r, a) => r * eval_term(a, asg)?,
        Term::Meet(a, b) => rational::min(&eval_term(a, asg)?, &eval_term(b, asg)?),
        Term::Join(a, b) => rational::max(&eval_term(a, asg)?, &eval_term(b, asg)?),
        Term::Mul(..) => return Err(OdagError::ForeignSymbol(ops::MUL.into())),
    })
}
