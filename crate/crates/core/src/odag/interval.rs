//! Distance to intervals, in closed form and as an infimum over a parameter.

use super::OdagError;
use crate::rational::{self, Q};
use crate::syntax::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interval {
    /// `[a, b]`
    Closed(Q, Q),
    /// `[a, ∞)`
    From(Q),
    /// `(−∞, b]`
    UpTo(Q),
}

impl Interval {
    fn check(&self) -> Result<(), OdagError> {
        match self {
            Interval::Closed(a, b) if a > b => {
                Err(OdagError::IntervalOrder { a: rational::show(a), b: rational::show(b) })
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, x: &Q) -> bool {
        match self {
            Interval::Closed(a, b) => a <= x && x <= b,
            Interval::From(a) => a <= x,
            Interval::UpTo(b) => x <= b,
        }
    }
}

fn zero() -> Term {
    Term::constant(crate::syntax::ops::ZERO)
}

/// `|(a−x)∨(x−b)∨0|`, `|(a−x)∨0|` or `|(x−b)∨0|`, in the variable `x`.
pub fn interval_distance(i: &Interval, x: &str) -> Result<Formula, OdagError> {
    i.check()?;
    let x = Term::var(x);
    let below = |a: &Q| Term::sub(Term::num(a.clone()), x.clone());
    let above = |b: &Q| Term::sub(x.clone(), Term::num(b.clone()));
    let body = match i {
        Interval::Closed(a, b) => Term::join(Term::join(below(a), above(b)), zero()),
        Interval::From(a) => Term::join(below(a), zero()),
        Interval::UpTo(b) => Term::join(above(b), zero()),
    };
    Ok(Formula::norm(body))
}

/// `inf_t d(x,(t∨a)∧b)`, `inf_t d(x,t∨a)` or `inf_t d(x,t∧b)`.
pub fn interval_inf_form(i: &Interval, x: &str) -> Result<Formula, OdagError> {
    i.check()?;
    let bound = if x == "t" { "s" } else { "t" };
    let t = Term::var(bound);
    let point = match i {
        Interval::Closed(a, b) => Term::meet(Term::join(t, Term::num(a.clone())), Term::num(b.clone())),
        Interval::From(a) => Term::join(t, Term::num(a.clone())),
        Interval::UpTo(b) => Term::meet(t, Term::num(b.clone())),
    };
    Ok(Formula::inf(bound, Formula::dist(Term::var(x), point)))
}

/// `0` inside the interval, `1` outside: the distance in the discrete model.
pub fn interval_indicator(i: &Interval, x: &Q) -> Q {
    if i.contains(x) {
        rational::zero()
    } else {
        rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odag::{eval_discrete_q, QAssignment};
    use crate::rational::int;

    fn value(f: &Formula, x: i64) -> Q {
        let asg: QAssignment = [("x".to_string(), int(x))].into();
        eval_discrete_q(f, &asg).unwrap()
    }

    #[test]
    fn examples() {
        let i = Interval::Closed(int(0), int(3));
        assert_eq!(value(&interval_distance(&i, "x").unwrap(), 5), int(1));
        assert_eq!(value(&interval_inf_form(&i, "x").unwrap(), 5), int(1));
        assert_eq!(value(&interval_distance(&i, "x").unwrap(), 2), int(0));
        assert_eq!(value(&interval_inf_form(&i, "x").unwrap(), 2), int(0));
        let from = Interval::From(int(0));
        assert_eq!(value(&interval_distance(&from, "x").unwrap(), -1), int(1));
        assert_eq!(value(&interval_inf_form(&Interval::UpTo(int(0)), "x").unwrap(), -1), int(0));
    }

    #[test]
    fn printed_forms() {
        let i = Interval::Closed(int(0), int(3));
        assert_eq!(interval_distance(&i, "x").unwrap().to_string(), "d((0 - x) \\/ (x - 3) \\/ 0,0)");
        assert_eq!(interval_inf_form(&i, "x").unwrap().to_string(), "inf t. d(x,(t \\/ 0) /\\ 3)");
    }

    #[test]
    fn reversed_endpoints_rejected() {
        let i = Interval::Closed(int(2), int(1));
        assert!(matches!(interval_distance(&i, "x"), Err(OdagError::IntervalOrder { .. })));
    }
}
