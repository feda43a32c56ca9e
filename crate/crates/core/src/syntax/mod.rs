//! Signatures, terms and formulas: the shared language of every other module.

mod formula;
mod parser;
mod signature;
mod term;

pub use formula::{fresh_name, Formula};
pub use parser::{parse_formula, parse_term, ParseError};
pub use signature::{ops, Signature, SignatureError, Symbol, METRIC};
pub use term::Term;

/// Parses `text` against `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula(text, sig)
}

/// Canonical text; `parse(print(f))` reproduces `f`.
pub fn print(f: &Formula) -> String {
    f.to_string()
}
