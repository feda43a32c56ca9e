use std::collections::BTreeMap;

use num::{One, Signed, ToPrimitive, Zero};

use super::structure::{Elem, FiniteStructure};
use crate::rational::{self, Q};
use crate::syntax::{ops, Formula, Term};

/// Variable name to element index.
pub type Assignment = BTreeMap<String, Elem>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    UnboundVariable(String),
    #[error("symbol `{0}` is not interpreted in this structure")]
    UnknownSymbol(String),
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("cannot interpret {0} in a finite structure")]
    Uninterpretable(String),
    #[error("condition sides must be closed; free variables: {0:?}")]
    NotClosed(Vec<String>),
}

struct Env<'a> {
    base: &'a Assignment,
    stack: Vec<(String, Elem)>,
}

impl Env<'_> {
    fn lookup(&self, v: &str) -> Result<Elem, EvalError> {
        if let Some((_, e)) = self.stack.iter().rev().find(|(w, _)| w == v) {
            return Ok(*e);
        }
        self.base.get(v).copied().ok_or_else(|| EvalError::UnboundVariable(v.to_string()))
    }
}

/// Exact value of `f` under `a`. Quantifiers range over the whole universe.
pub fn evaluate(m: &FiniteStructure, f: &Formula, a: &Assignment) -> Result<Q, EvalError> {
    let mut env = Env { base: a, stack: Vec::new() };
    eval_formula(m, f, &mut env)
}

/// Value of a closed formula.
pub fn evaluate_closed(m: &FiniteStructure, f: &Formula) -> Result<Q, EvalError> {
    evaluate(m, f, &Assignment::new())
}

/// Value of `f` at a tuple assigned to `vars` positionally.
pub fn evaluate_at(m: &FiniteStructure, f: &Formula, vars: &[String], tuple: &[Elem]) -> Result<Q, EvalError> {
    let asg: Assignment = vars.iter().cloned().zip(tuple.iter().copied()).collect();
    evaluate(m, f, &asg)
}

fn eval_formula(m: &FiniteStructure, f: &Formula, env: &mut Env<'_>) -> Result<Q, EvalError> {
    Ok(match f {
        Formula::Const(q) => q.clone(),
        Formula::Atom(r, args) => {
            let sym = m.signature().relation(r).ok_or_else(|| EvalError::UnknownSymbol(r.clone()))?;
            if sym.arity != args.len() {
                return Err(EvalError::Arity { name: r.clone(), expected: sym.arity, found: args.len() });
            }
            let elems = args.iter().map(|t| eval_term(m, t, env)).collect::<Result<Vec<_>, _>>()?;
            m.relation_value(r, &elems).expect("declared relation has a table").clone()
        }
        Formula::Dist(s, t) => {
            let a = eval_term(m, s, env)?;
            let b = eval_term(m, t, env)?;
            m.dist(a, b).clone()
        }
        Formula::Sum(a, b) => eval_formula(m, a, env)? + eval_formula(m, b, env)?,
        Formula::Scale(r, a) => r * eval_formula(m, a, env)?,
        Formula::Meet(a, b) => {
            let x = eval_formula(m, a, env)?;
            let y = eval_formula(m, b, env)?;
            rational::min(&x, &y)
        }
        Formula::Join(a, b) => {
            let x = eval_formula(m, a, env)?;
            let y = eval_formula(m, b, env)?;
            rational::max(&x, &y)
        }
        Formula::Neg(a) => Q::one() - eval_formula(m, a, env)?,
        Formula::Sup(v, body) | Formula::Inf(v, body) => {
            let want_max = matches!(f, Formula::Sup(..));
            let mut best: Option<Q> = None;
            for e in m.elements() {
                env.stack.push((v.clone(), e));
                let val = eval_formula(m, body, env);
                env.stack.pop();
                let val = val?;
                best = Some(match best {
                    None => val,
                    Some(b) if want_max => rational::max(&b, &val),
                    Some(b) => rational::min(&b, &val),
                });
            }
            best.expect("universe is nonempty")
        }
    })
}

fn apply(m: &FiniteStructure, name: &str, args: &[Elem]) -> Result<Elem, EvalError> {
    let sym = m.signature().function(name).ok_or_else(|| EvalError::UnknownSymbol(name.to_string()))?;
    if sym.arity != args.len() {
        return Err(EvalError::Arity { name: name.to_string(), expected: sym.arity, found: args.len() });
    }
    Ok(m.apply(name, args).expect("declared function has a table"))
}

/// Integer multiple via repeated `+`, with `neg` for negative factors.
fn integer_multiple(m: &FiniteStructure, k: &Q, x: Elem) -> Result<Elem, EvalError> {
    if !k.is_integer() {
        return Err(EvalError::Uninterpretable(format!("non-integer scalar {k}")));
    }
    let count = k
        .abs()
        .to_integer()
        .to_usize()
        .ok_or_else(|| EvalError::Uninterpretable(format!("scalar {k} too large")))?;
    let mut acc = apply(m, ops::ZERO, &[])?;
    for _ in 0..count {
        acc = apply(m, ops::ADD, &[acc, x])?;
    }
    if k.is_negative() {
        acc = apply(m, ops::NEG, &[acc])?;
    }
    Ok(acc)
}

fn eval_term(m: &FiniteStructure, t: &Term, env: &Env<'_>) -> Result<Elem, EvalError> {
    match t {
        Term::Var(v) => env.lookup(v),
        Term::App(s, args) => {
            let elems = args.iter().map(|a| eval_term(m, a, env)).collect::<Result<Vec<_>, _>>()?;
            apply(m, s, &elems)
        }
        Term::Num(q) => {
            if q.is_zero() {
                return apply(m, ops::ZERO, &[]);
            }
            let one = apply(m, ops::ONE, &[])?;
            integer_multiple(m, q, one)
        }
        Term::Add(a, b) => {
            let (x, y) = (eval_term(m, a, env)?, eval_term(m, b, env)?);
            apply(m, ops::ADD, &[x, y])
        }
        Term::Sub(a, b) => {
            let (x, y) = (eval_term(m, a, env)?, eval_term(m, b, env)?);
            if m.signature().has_function(ops::SUB, 2) {
                apply(m, ops::SUB, &[x, y])
            } else {
                let ny = apply(m, ops::NEG, &[y])?;
                apply(m, ops::ADD, &[x, ny])
            }
        }
        Term::Neg(a) => {
            let x = eval_term(m, a, env)?;
            apply(m, ops::NEG, &[x])
        }
        Term::Mul(a, b) => {
            let (x, y) = (eval_term(m, a, env)?, eval_term(m, b, env)?);
            apply(m, ops::MUL, &[x, y])
        }
        Term::Scale(c, a) => {
            let x = eval_term(m, a, env)?;
            integer_multiple(m, c, x)
        }
        Term::Meet(a, b) => {
            let (x, y) = (eval_term(m, a, env)?, eval_term(m, b, env)?);
            apply(m, ops::MEET, &[x, y])
        }
        Term::Join(a, b) => {
            let (x, y) = (eval_term(m, a, env)?, eval_term(m, b, env)?);
            apply(m, ops::JOIN, &[x, y])
        }
    }
}

/// Evaluates a term to an element under an assignment.
pub fn evaluate_term(m: &FiniteStructure, t: &Term, a: &Assignment) -> Result<Elem, EvalError> {
    let env = Env { base: a, stack: Vec::new() };
    eval_term(m, t, &env)
}

/// A condition `lhs <= rhs` between closed formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Condition {
    pub fn new(lhs: Formula, rhs: Formula) -> Self {
        Condition { lhs, rhs }
    }

    /// Parses `phi <= psi`.
    pub fn parse(text: &str, sig: &crate::syntax::Signature) -> Result<Self, crate::syntax::ParseError> {
        let (l, r) = text.split_once("<=").ok_or(crate::syntax::ParseError::Syntax {
            offset: text.len(),
            message: "expected `<=` in condition".into(),
        })?;
        let lhs = crate::syntax::parse(l, sig)?;
        let rhs = crate::syntax::parse(r, sig).map_err(|e| shift(e, l.len() + 2))?;
        Ok(Condition { lhs, rhs })
    }
}

fn shift(e: crate::syntax::ParseError, by: usize) -> crate::syntax::ParseError {
    use crate::syntax::ParseError::*;
    match e {
        Syntax { offset, message } => Syntax { offset: offset + by, message },
        UnknownSymbol { offset, name } => UnknownSymbol { offset: offset + by, name },
        Arity { offset, name, expected, found } => Arity { offset: offset + by, name, expected, found },
    }
}

/// Whether `M ⊨ lhs <= rhs`, compared exactly.
pub fn check_condition(m: &FiniteStructure, c: &Condition) -> Result<bool, EvalError> {
    let mut free = c.lhs.free_vars();
    free.extend(c.rhs.free_vars());
    if !free.is_empty() {
        return Err(EvalError::NotClosed(free));
    }
    Ok(evaluate_closed(m, &c.lhs)? <= evaluate_closed(m, &c.rhs)?)
}
