//! The `alqe` command line.
//!
//! Exit codes: 0 when everything checked holds, 1 when a property fails
//! (the witness is printed), 2 on usage, parse or file errors. Every number
//! is printed as an exact rational, in `--json` mode as a string.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use serde_json::{json, Value};

use crate::field::is_prime;
use crate::odag::{self, Axiom, CheckConfig, LemmaOutcome, OdagError};
use crate::qe::{self, QeError};
use crate::rational::{self, Q};
use crate::riesz::{self, RieszError, DEFAULT_EXPANSION_CAP};
use crate::semantics::{self, io, Assignment, Condition, EvalError, FiniteStructure};
use crate::syntax::{fresh_name, parse, parse_term, ParseError, Signature};
use crate::typespace::{self, Fragment, Tag, TypeCloud, TypespaceError};
use crate::ultramean::{self, UltrameanError, WeightedFamily};

#[derive(Debug, Parser)]
#[command(name = "alqe", version, about = "Exact computations in affine continuous logic")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula in a structure file.
    Eval(EvalArgs),
    /// Check metric, range and Lipschitz conditions, and optional conditions.
    Validate(ValidateArgs),
    /// Build the weighted ultramean of structure files.
    Ultramean(UltrameanArgs),
    /// Quantifier elimination over a prime field with the discrete metric.
    Qe(QeArgs),
    /// Ordered divisible abelian groups.
    #[command(subcommand)]
    Odag(OdagCommand),
    /// Realized type vectors of a fragment.
    Typespace(TypespaceArgs),
    /// Riesz-space rewrites.
    #[command(subcommand)]
    Riesz(RieszCommand),
    /// Evaluate a ring sentence in small prime fields.
    ScanPrimes(ScanArgs),
    /// Print a built-in structure as a structure file.
    Model(ModelArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelKind {
    /// `F_q` as a vector space over itself.
    VectorSpace,
    /// `F_p` as a ring.
    Ring,
    /// Measure algebra on atoms with `--weights`.
    Boolean,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(value_enum)]
    pub kind: ModelKind,
    /// Field order for `vector-space` and `ring`.
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    /// Atom weights for `boolean`, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
    pub weights: Vec<Q>,
    /// Multiply the metric by this factor.
    #[arg(long, value_parser = parse_rational)]
    pub scale: Option<Q>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub structure: PathBuf,
    #[arg(long)]
    pub formula: String,
    /// `var=element`, repeatable.
    #[arg(long = "assign", value_parser = parse_binding)]
    pub assign: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub structure: PathBuf,
    /// Closed condition `φ <= ψ`, repeatable.
    #[arg(long = "condition")]
    pub conditions: Vec<String>,
}

#[derive(Debug, Args)]
pub struct UltrameanArgs {
    /// Member structure, repeatable; paired with `--weight` in order.
    #[arg(long = "structure", required = true)]
    pub structures: Vec<PathBuf>,
    #[arg(long = "weight", value_parser = parse_rational, required = true)]
    pub weights: Vec<Q>,
    /// Write the mean here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Affine sentence whose value is compared with the weighted sum, repeatable.
    #[arg(long = "los")]
    pub los: Vec<String>,
}

#[derive(Debug, Args)]
pub struct QeArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub formula: String,
    /// Variable order, comma separated; defaults to the sorted free variables.
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    /// Compare with direct evaluation at every point.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Subcommand)]
pub enum OdagCommand {
    /// Check axiom instances in the discrete rational model.
    Check(OdagCheckArgs),
    /// Join-of-meets normal form of a term.
    NormalForm {
        #[arg(long)]
        term: String,
    },
    /// Rewrite a one-variable quantifier-free formula into basic shapes.
    Lemma {
        #[arg(long)]
        formula: String,
    },
}

#[derive(Debug, Args)]
pub struct OdagCheckArgs {
    /// `A1`..`A13` or `all`.
    #[arg(long, default_value = "all")]
    pub axiom: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random components lie in `[-box, box]`.
    #[arg(long = "box", default_value_t = 10)]
    pub bound: i64,
}

#[derive(Debug, Args)]
pub struct TypespaceArgs {
    #[arg(long)]
    pub structure: PathBuf,
    /// One formula per line, optionally ending in `@atomic`, `@qf`, `@infimal` or `@general`.
    #[arg(long)]
    pub fragment: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Variable names, comma separated; defaults to `x` or `x1..xn`.
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    /// List the vertices and a certificate for every other vector.
    #[arg(long)]
    pub extremes: bool,
    /// Check whether coordinates of this class tell all vectors apart.
    #[arg(long, value_parser = parse_tag)]
    pub separate: Option<Tag>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Op {
    Join,
    Meet,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SignatureName {
    Empty,
    VectorSpace,
    Ring,
    Boolean,
    Odag,
}

impl SignatureName {
    fn build(self) -> Signature {
        match self {
            SignatureName::Empty => Signature::empty(),
            SignatureName::VectorSpace => Signature::vector_space(),
            SignatureName::Ring => Signature::ring(),
            SignatureName::Boolean => Signature::boolean_algebra(),
            SignatureName::Odag => Signature::odag(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum RieszCommand {
    /// Inclusion–exclusion form of the join or meet of the formulas in a file.
    Expand {
        #[arg(long, value_enum)]
        op: Op,
        /// One formula per line.
        #[arg(long)]
        formulas: PathBuf,
        #[arg(long, value_enum, default_value = "vector-space")]
        signature: SignatureName,
        #[arg(long, default_value_t = DEFAULT_EXPANSION_CAP)]
        cap: usize,
    },
    /// Check `μ(x∧y) + μ(x∨y) = μ(x) + μ(y)` in the measure algebra on atoms
    /// with the given weights.
    Identity {
        #[arg(long, value_delimiter = ',', value_parser = parse_rational, required = true)]
        weights: Vec<Q>,
        /// Use `μ(x) + μ(x)` on the right.
        #[arg(long)]
        literal: bool,
    },
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Closed formula in the ring language.
    #[arg(long)]
    pub formula: String,
    /// Comma-separated primes or inclusive ranges `a..b` (primes in range).
    #[arg(long, default_value = "2..31")]
    pub primes: String,
    /// Largest prime allowed.
    #[arg(long, default_value_t = 211)]
    pub bound: u64,
}

fn parse_binding(s: &str) -> Result<(String, String), String> {
    let (v, e) = s.split_once('=').ok_or_else(|| format!("expected var=element, got `{s}`"))?;
    Ok((v.trim().to_string(), e.trim().to_string()))
}

fn parse_rational(s: &str) -> Result<Q, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

fn parse_tag(s: &str) -> Result<Tag, String> {
    s.parse::<Tag>().map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    File { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Ultramean(#[from] UltrameanError),
    #[error(transparent)]
    Qe(#[from] QeError),
    #[error(transparent)]
    Odag(#[from] OdagError),
    #[error(transparent)]
    Typespace(#[from] TypespaceError),
    #[error(transparent)]
    Riesz(#[from] RieszError),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Text and JSON renderings of a finished command, with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

impl Report {
    fn new(ok: bool, text: String, json: Value) -> Self {
        Report { code: if ok { 0 } else { 1 }, text, json }
    }
}

fn q(x: &Q) -> Value {
    Value::String(rational::show(x))
}

fn qs(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(q).collect())
}

fn load_structure(path: &Path) -> Result<FiniteStructure, CliError> {
    io::load(path).map_err(|e| CliError::File { path: path.display().to_string(), message: e.to_string() })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::File { path: path.display().to_string(), message: e.to_string() })
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Report, CliError> {
    let m = load_structure(&a.structure)?;
    let f = parse(&a.formula, m.signature())?;
    let mut asg = Assignment::new();
    for (v, e) in &a.assign {
        let elem = m.element(e).ok_or_else(|| usage(format!("no element `{e}` in the structure")))?;
        asg.insert(v.clone(), elem);
    }
    let value = semantics::evaluate(&m, &f, &asg)?;
    Ok(Report::new(true, rational::show(&value), json!({ "formula": f.to_string(), "value": q(&value) })))
}

pub fn cmd_validate(a: &ValidateArgs) -> Result<Report, CliError> {
    let m = load_structure(&a.structure)?;
    let violations = semantics::validate(&m);
    let mut lines: Vec<String> = violations.iter().map(|v| format!("violation: {v}")).collect();
    let mut conditions = Vec::new();
    let mut all_hold = true;
    for text in &a.conditions {
        let c = Condition::parse(text, m.signature())?;
        let holds = semantics::check_condition(&m, &c)?;
        all_hold &= holds;
        lines.push(format!("condition {text}: {}", if holds { "holds" } else { "fails" }));
        conditions.push(json!({ "condition": text, "holds": holds }));
    }
    let ok = violations.is_empty() && all_hold;
    if violations.is_empty() {
        lines.insert(0, format!("valid structure with {} elements", m.size()));
    } else {
        lines.push(format!("invalid: {} violation(s)", violations.len()));
    }
    let json = json!({
        "valid": violations.is_empty(),
        "violations": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "conditions": conditions,
    });
    Ok(Report::new(ok, lines.join("\n"), json))
}

pub fn cmd_ultramean(a: &UltrameanArgs) -> Result<Report, CliError> {
    if a.structures.len() != a.weights.len() {
        return Err(usage(format!("{} structures but {} weights", a.structures.len(), a.weights.len())));
    }
    let members = a
        .weights
        .iter()
        .zip(&a.structures)
        .map(|(w, p)| Ok((w.clone(), load_structure(p)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let fam = WeightedFamily::new(members)?;
    let mean = ultramean::ultramean(&fam)?;
    let mut lines = Vec::new();
    let mut checks = Vec::new();
    let mut ok = true;
    for text in &a.los {
        let f = parse(text, mean.signature())?;
        let r = ultramean::verify_los_in(&fam, &mean, &f)?;
        ok &= r.holds();
        lines.push(format!(
            "los {}: mean {} vs weighted {} {}",
            f,
            rational::show(&r.mean_value),
            rational::show(&r.weighted_value),
            if r.holds() { "PASS" } else { "FAIL" }
        ));
        checks.push(json!({
            "sentence": f.to_string(),
            "mean": q(&r.mean_value),
            "weighted": q(&r.weighted_value),
            "holds": r.holds(),
        }));
    }
    let structure = match &a.out {
        Some(path) => {
            io::save(&mean, path).map_err(|e| CliError::File { path: path.display().to_string(), message: e.to_string() })?;
            lines.insert(0, format!("wrote {} elements to {}", mean.size(), path.display()));
            Value::Null
        }
        None => {
            lines.insert(0, io::to_json(&mean));
            io::to_value(&mean)
        }
    };
    Ok(Report::new(ok, lines.join("\n"), json!({ "size": mean.size(), "structure": structure, "los": checks })))
}

pub fn cmd_qe(a: &QeArgs) -> Result<Report, CliError> {
    let f = parse(&a.formula, &Signature::vector_space())?;
    let vars = if a.vars.is_empty() {
        let mut vars = f.free_vars();
        vars.sort();
        if vars.len() > a.n {
            return Err(usage(format!("formula has free variables {vars:?}, more than n = {}", a.n)));
        }
        while vars.len() < a.n {
            let name = fresh_name("x", &[vars.clone(), f.all_vars()].concat());
            vars.push(name);
        }
        vars
    } else {
        a.vars.clone()
    };
    if vars.len() != a.n {
        return Err(usage(format!("{} variables given for n = {}", vars.len(), a.n)));
    }
    let nf = qe::eliminate_all(&f, a.q, &vars)?;
    let mut lines = vec![nf.to_string()];
    let mut json = json!({ "q": a.q, "vars": vars, "normal_form": nf.to_string() });
    let mut ok = true;
    if a.verify {
        let table = qe::truth_table(&f, &nf)?;
        let bad: Vec<_> = table.iter().filter(|m| m.eliminated != m.direct).collect();
        ok = bad.is_empty();
        if ok {
            lines.push(format!("verify PASS ({} points)", table.len()));
        } else {
            lines.push(format!("verify FAIL ({} of {} points differ)", bad.len(), table.len()));
            for m in &table {
                let mark = if m.eliminated == m.direct { " " } else { "!" };
                lines.push(format!(
                    "{mark} ({}): eliminated {}, direct {}",
                    m.point.iter().join(","),
                    rational::show(&m.eliminated),
                    rational::show(&m.direct)
                ));
            }
        }
        json["verify"] = json!({
            "points": table.len(),
            "pass": ok,
            "mismatches": bad
                .iter()
                .map(|m| json!({ "point": m.point, "eliminated": q(&m.eliminated), "direct": q(&m.direct) }))
                .collect::<Vec<_>>(),
        });
    }
    Ok(Report::new(ok, lines.join("\n"), json))
}

pub fn cmd_odag(c: &OdagCommand) -> Result<Report, CliError> {
    match c {
        OdagCommand::Check(a) => {
            let axioms: Vec<Axiom> =
                if a.axiom.eq_ignore_ascii_case("all") { Axiom::ALL.to_vec() } else { vec![a.axiom.parse()?] };
            let cfg = CheckConfig { trials: a.trials, seed: a.seed, bound: a.bound };
            let mut lines = Vec::new();
            let mut reports = Vec::new();
            let mut ok = true;
            for ax in axioms {
                let r = odag::check_axiom(ax, &cfg)?;
                ok &= r.passed();
                match &r.counterexample {
                    None => lines.push(format!("{ax} PASS ({} evaluations)", r.evaluations)),
                    Some(cx) => lines.push(format!("{ax} FAIL {cx}")),
                }
                let cx = r.counterexample.as_ref().map(|cx| {
                    let assignment: BTreeMap<&str, Value> = cx.assignment.iter().map(|(v, x)| (v.as_str(), q(x))).collect();
                    json!({ "instance": cx.instance, "assignment": assignment, "lhs": q(&cx.lhs), "rhs": q(&cx.rhs) })
                });
                reports.push(json!({
                    "axiom": ax.to_string(),
                    "passed": r.passed(),
                    "evaluations": r.evaluations,
                    "counterexample": cx,
                }));
            }
            Ok(Report::new(ok, lines.join("\n"), json!({ "seed": a.seed, "trials": a.trials, "axioms": reports })))
        }
        OdagCommand::NormalForm { term } => {
            let nf = odag::term_normal_form(&parse_term(term, &Signature::odag())?)?;
            Ok(Report::new(true, nf.to_string(), json!({ "normal_form": nf.to_string() })))
        }
        OdagCommand::Lemma { formula } => {
            let f = parse(formula, &Signature::odag())?;
            match odag::qf_lemma_rewrite(&f)? {
                LemmaOutcome::Reduced { var, combination } => Ok(Report::new(
                    true,
                    combination.to_string(),
                    json!({ "reduced": true, "var": var, "combination": combination.to_string() }),
                )),
                LemmaOutcome::Unreduced { reason } => Ok(Report::new(
                    false,
                    format!("unreduced: {reason}"),
                    json!({ "reduced": false, "reason": reason }),
                )),
            }
        }
    }
}

fn cloud_json(cloud: &TypeCloud) -> Value {
    Value::Array(
        cloud
            .vectors()
            .iter()
            .map(|v| {
                let realized: Vec<Value> =
                    v.provenance.iter().map(|p| json!({ "structure": p.structure, "tuple": p.tuple })).collect();
                json!({ "values": qs(&v.values), "realized_by": realized })
            })
            .collect(),
    )
}

pub fn cmd_typespace(a: &TypespaceArgs) -> Result<Report, CliError> {
    let m = load_structure(&a.structure)?;
    let vars = if a.vars.is_empty() { typespace::standard_vars(a.n) } else { a.vars.clone() };
    if vars.len() != a.n {
        return Err(usage(format!("{} variables given for n = {}", vars.len(), a.n)));
    }
    let frag = Fragment::parse(&read_text(&a.fragment)?, m.signature(), vars)?;
    let label = a.structure.display().to_string();
    let cloud = typespace::realized_types(&m, &frag, &label)?;

    let mut lines = vec![format!(
        "{} distinct type vectors of {}-tuples over {} formulas (realized cloud only)",
        cloud.len(),
        a.n,
        frag.len()
    )];
    for v in cloud.vectors() {
        let first = v.provenance.first().map(|p| format!("({})", p.tuple.join(","))).unwrap_or_default();
        let more = if v.provenance.len() > 1 { format!(" and {} more", v.provenance.len() - 1) } else { String::new() };
        lines.push(format!("  {v} realized by {first}{more}"));
    }
    let mut json = json!({ "vars": frag.vars(), "cloud": cloud_json(&cloud) });
    let mut ok = true;

    if a.extremes {
        let extremes = typespace::extreme_points(&cloud);
        lines.push(format!("{} extreme points (vertices of the realized cloud's hull):", extremes.len()));
        lines.extend(extremes.vectors().iter().map(|v| format!("  {v}")));
        let mut certificates = Vec::new();
        for v in cloud.vectors() {
            if extremes.vectors().contains(v) {
                continue;
            }
            let cert = typespace::hull_certificate(&v.values, &extremes)
                .filter(|c| c.verify(&extremes, &v.values))
                .ok_or_else(|| usage(format!("no verified certificate for {v}")))?;
            let parts = cert
                .weights
                .iter()
                .zip(extremes.vectors())
                .filter(|(w, _)| !num::Zero::is_zero(*w))
                .map(|(w, p)| format!("{}*{p}", rational::show(w)))
                .join(" + ");
            lines.push(format!("  {v} = {parts}"));
            certificates.push(json!({ "vector": qs(&v.values), "weights": qs(&cert.weights) }));
        }
        json["extremes"] = cloud_json(&extremes);
        json["certificates"] = Value::Array(certificates);
    }

    if let Some(tag) = a.separate {
        let s = typespace::separation_check(&cloud, &frag, tag)?;
        ok = s.separated();
        let coords = s.coordinates.iter().map(|c| c + 1).join(",");
        match &s.offending {
            None => lines.push(format!("separated on this cloud by {tag} coordinates [{coords}]")),
            Some((u, v)) => lines.push(format!("not separated by {tag} coordinates [{coords}]: {u} and {v} agree there")),
        }
        json["separation"] = json!({
            "tag": tag.to_string(),
            "coordinates": s.coordinates,
            "separated": ok,
            "offending": s.offending.as_ref().map(|(u, v)| json!([qs(&u.values), qs(&v.values)])),
        });
    }
    Ok(Report::new(ok, lines.join("\n"), json))
}

pub fn cmd_riesz(c: &RieszCommand) -> Result<Report, CliError> {
    match c {
        RieszCommand::Expand { op, formulas, signature, cap } => {
            let sig = signature.build();
            let fs = read_text(formulas)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| parse(l, &sig))
                .collect::<Result<Vec<_>, _>>()?;
            let comb = match op {
                Op::Join => riesz::inclusion_exclusion_join(&fs, *cap)?,
                Op::Meet => riesz::inclusion_exclusion_meet(&fs, *cap)?,
            };
            let terms: Vec<Value> = comb.terms.iter().map(|(r, f)| json!({ "coefficient": q(r), "formula": f.to_string() })).collect();
            Ok(Report::new(true, comb.to_string(), json!({ "combination": comb.to_string(), "terms": terms })))
        }
        RieszCommand::Identity { weights, literal } => {
            let b = semantics::boolean_algebra(weights).map_err(|e| usage(e.to_string()))?;
            let r = riesz::probability_identity_check(&b, *literal)?;
            let mut lines = vec![format!(
                "{} pairs, {} failures: {}",
                r.pairs,
                r.failures.len(),
                if r.holds() { "PASS" } else { "FAIL" }
            )];
            lines.extend(r.failures.iter().map(|f| {
                format!("  x = {}, y = {}: lhs {}, rhs {}", f.x, f.y, rational::show(&f.lhs), rational::show(&f.rhs))
            }));
            let failures: Vec<Value> = r
                .failures
                .iter()
                .map(|f| json!({ "x": f.x, "y": f.y, "lhs": q(&f.lhs), "rhs": q(&f.rhs) }))
                .collect();
            Ok(Report::new(r.holds(), lines.join("\n"), json!({ "pairs": r.pairs, "failures": failures })))
        }
    }
}

/// Primes named by `list`; explicit composites are errors.
pub fn prime_list(list: &str, bound: u64) -> Result<Vec<u64>, CliError> {
    let number = |s: &str| s.trim().parse::<u64>().map_err(|_| usage(format!("not a number: `{s}`")));
    let mut out = Vec::new();
    for item in list.split(',').filter(|s| !s.trim().is_empty()) {
        match item.split_once("..") {
            Some((lo, hi)) => out.extend((number(lo)?..=number(hi)?).filter(|&p| is_prime(p))),
            None => {
                let p = number(item)?;
                if !is_prime(p) {
                    return Err(usage(format!("{p} is not prime")));
                }
                out.push(p);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    if let Some(p) = out.iter().find(|&&p| p > bound) {
        return Err(usage(format!("prime {p} exceeds the bound {bound}")));
    }
    if out.is_empty() {
        return Err(usage("no primes selected"));
    }
    Ok(out)
}

pub fn cmd_scan_primes(a: &ScanArgs) -> Result<Report, CliError> {
    let f = parse(&a.formula, &Signature::ring())?;
    if !f.is_closed() {
        return Err(usage(format!("`{f}` has free variables {:?}", f.free_vars())));
    }
    let primes = prime_list(&a.primes, a.bound)?;
    let mut rows = Vec::new();
    for &p in &primes {
        let m = semantics::prime_field_ring(p).map_err(|e| usage(e.to_string()))?;
        rows.push((p, semantics::evaluate_closed(&m, &f)?));
    }
    let mut lines = vec![
        format!("values of {f} in F_p with the discrete metric"),
        "finite prime fields are not models of ACF_p; this is a heuristic scan".to_string(),
    ];
    lines.extend(rows.iter().map(|(p, v)| format!("p = {p}: {}", rational::show(v))));
    let last = &rows.last().expect("nonempty").1;
    let from = rows.iter().rposition(|(_, v)| v != last).map_or(0, |i| i + 1);
    let from_p = rows[from].0;
    if rows.len() > 1 {
        lines.push(format!("constant {} from p = {from_p} onward within the scanned range", rational::show(last)));
    }
    let json = json!({
        "formula": f.to_string(),
        "values": rows.iter().map(|(p, v)| json!({ "p": p, "value": q(v) })).collect::<Vec<_>>(),
        "stable_from": from_p,
        "stable_value": q(last),
    });
    Ok(Report::new(true, lines.join("\n"), json))
}

pub fn cmd_model(a: &ModelArgs) -> Result<Report, CliError> {
    let m = match a.kind {
        ModelKind::VectorSpace => semantics::prime_field_vector_space(a.q),
        ModelKind::Ring => semantics::prime_field_ring(a.q),
        ModelKind::Boolean => semantics::boolean_algebra(&a.weights),
    }
    .map_err(|e| usage(e.to_string()))?;
    let m = match &a.scale {
        Some(c) if num::Signed::is_negative(c) || c > &rational::one() => {
            return Err(usage(format!("scale {} outside [0,1]", rational::show(c))));
        }
        Some(c) => m.with_scaled_metric(c),
        None => m,
    };
    Ok(Report::new(true, io::to_json(&m), io::to_value(&m)))
}

pub fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Ultramean(a) => cmd_ultramean(a),
        Command::Qe(a) => cmd_qe(a),
        Command::Odag(c) => cmd_odag(c),
        Command::Typespace(a) => cmd_typespace(a),
        Command::Riesz(c) => cmd_riesz(c),
        Command::ScanPrimes(a) => cmd_scan_primes(a),
        Command::Model(a) => cmd_model(a),
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&report.json).expect("reports serialize")
            } else {
                report.text
            };
            let _ = writeln!(out, "{body}");
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
