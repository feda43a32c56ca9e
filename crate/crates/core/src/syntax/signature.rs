use serde::{Deserialize, Serialize};

use crate::rational::{self, Q};

/// Symbol name that every signature implicitly carries for the metric.
pub const METRIC: &str = "d";

/// Function-symbol names that the infix term operators resolve to.
pub mod ops {
    pub const ADD: &str = "+";
    pub const SUB: &str = "-";
    pub const NEG: &str = "neg";
    pub const MUL: &str = "*";
    pub const MEET: &str = "/\\";
    pub const JOIN: &str = "\\/";
    pub const ZERO: &str = "0";
    pub const ONE: &str = "1";
    pub const COMPL: &str = "compl";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    #[serde(with = "rational::as_string")]
    pub lipschitz: Q,
}

impl Symbol {
    pub fn new(name: &str, arity: usize, lipschitz: Q) -> Self {
        Symbol { name: name.to_string(), arity, lipschitz }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("`d` is reserved for the metric")]
    ReservedMetric,
    #[error("relation `{0}` must have arity at least 1")]
    NullaryRelation(String),
    #[error("symbol `{0}` has a negative Lipschitz constant")]
    NegativeLipschitz(String),
}

/// A Lipschitz signature. The metric `d` is implicit (binary, constant 1).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Signature {
    functions: Vec<Symbol>,
    relations: Vec<Symbol>,
}

impl Signature {
    pub fn new(functions: Vec<Symbol>, relations: Vec<Symbol>) -> Result<Self, SignatureError> {
        let mut seen = std::collections::HashSet::new();
        for s in functions.iter().chain(&relations) {
            if s.name == METRIC {
                return Err(SignatureError::ReservedMetric);
            }
            if !seen.insert(s.name.as_str()) {
                return Err(SignatureError::Duplicate(s.name.clone()));
            }
            if s.lipschitz < rational::zero() {
                return Err(SignatureError::NegativeLipschitz(s.name.clone()));
            }
        }
        if let Some(r) = relations.iter().find(|r| r.arity == 0) {
            return Err(SignatureError::NullaryRelation(r.name.clone()));
        }
        Ok(Signature { functions, relations })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn functions(&self) -> &[Symbol] {
        &self.functions
    }

    pub fn relations(&self) -> &[Symbol] {
        &self.relations
    }

    pub fn function(&self, name: &str) -> Option<&Symbol> {
        self.functions.iter().find(|s| s.name == name)
    }

    pub fn relation(&self, name: &str) -> Option<&Symbol> {
        self.relations.iter().find(|s| s.name == name)
    }

    pub fn has_function(&self, name: &str, arity: usize) -> bool {
        self.function(name).is_some_and(|s| s.arity == arity)
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.has_function(name, 0)
    }

    /// `{+, neg, 0}`: vector spaces over a prime field. Scalars `α·` are
    /// iterated additions, and `neg` is the scalar `q-1`.
    pub fn vector_space() -> Self {
        use ops::*;
        Self::new(
            vec![
                Symbol::new(ADD, 2, rational::one()),
                Symbol::new(NEG, 1, rational::one()),
                Symbol::new(ZERO, 0, rational::one()),
            ],
            vec![],
        )
        .expect("static signature")
    }

    /// `{+, neg, *, 0, 1}`: the language of rings.
    pub fn ring() -> Self {
        use ops::*;
        Self::new(
            vec![
                Symbol::new(ADD, 2, rational::one()),
                Symbol::new(NEG, 1, rational::one()),
                Symbol::new(MUL, 2, rational::one()),
                Symbol::new(ZERO, 0, rational::one()),
                Symbol::new(ONE, 0, rational::one()),
            ],
            vec![],
        )
        .expect("static signature")
    }

    /// `{/\, \/, compl, 0, 1}`: Boolean algebras.
    pub fn boolean_algebra() -> Self {
        use ops::*;
        Self::new(
            vec![
                Symbol::new(MEET, 2, rational::one()),
                Symbol::new(JOIN, 2, rational::one()),
                Symbol::new(COMPL, 1, rational::one()),
                Symbol::new(ZERO, 0, rational::one()),
                Symbol::new(ONE, 0, rational::one()),
            ],
            vec![],
        )
        .expect("static signature")
    }

    /// `{+, neg, /\, \/, 0}`: lattice-ordered divisible groups.
    pub fn odag() -> Self {
        use ops::*;
        Self::new(
            vec![
                Symbol::new(ADD, 2, rational::one()),
                Symbol::new(NEG, 1, rational::one()),
                Symbol::new(MEET, 2, rational::one()),
                Symbol::new(JOIN, 2, rational::one()),
                Symbol::new(ZERO, 0, rational::one()),
            ],
            vec![],
        )
        .expect("static signature")
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            functions: Vec<Symbol>,
            #[serde(default)]
            relations: Vec<Symbol>,
        }
        let raw = Raw::deserialize(d)?;
        Signature::new(raw.functions, raw.relations).map_err(serde::de::Error::custom)
    }
}
