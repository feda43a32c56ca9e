//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic throughout.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use alqe::odag::{self, check_axiom, eval_discrete_q, Axiom, CheckConfig, Interval, QAssignment};
use alqe::qe::{self, InterpolationSystem};
use alqe::rational::{self, frac, int, Q};
use alqe::riesz::{inclusion_exclusion_join, inclusion_exclusion_meet, probability_identity_check};
use alqe::semantics::{
    boolean_algebra, evaluate_at, evaluate_closed, io, prime_field_ring, prime_field_vector_space,
    uniform_boolean_algebra, validate,
};
use alqe::syntax::{parse, Formula, Signature};
use alqe::typespace::{
    extreme_points, hull_certificate, is_convex_combination, mixture_check, realized_types, separation_check,
    standard_vars, Fragment, Tag, TypeCloud,
};
use alqe::ultramean::{self, verify_los, WeightedFamily};
use itertools::Itertools;
use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---- 1 ----

fn qe_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cases = [(2u64, 1usize), (2, 2), (2, 3), (3, 1), (3, 2)];
    let mut rng = rng(1);
    let mut points = 0;
    for i in 0..200 {
        let (q, n) = cases[i % cases.len()];
        let vars: Vec<String> = ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect();
        let g = common::qe_formula(&mut rng, q, &vars);
        let f = g.to_formula();
        let nf = qe::eliminate_all(&f, q, &vars).map_err(|e| format!("{f}: {e}"))?;
        let out = nf.to_formula();
        ensure!(out.is_quantifier_free(), "{f}: output {out} has a quantifier");
        for p in (0..n).map(|_| 0..q).multi_cartesian_product() {
            let asg: BTreeMap<String, u64> = vars.iter().cloned().zip(p.iter().copied()).collect();
            let expected = g.eval(q, &asg);
            let direct = qe::brute_force(&f, q, &vars, &p).map_err(|e| e.to_string())?;
            let via_formula = qe::brute_force(&out, q, &vars, &p).map_err(|e| e.to_string())?;
            ensure!(
                nf.evaluate(&p) == expected && direct == expected && via_formula == expected,
                "q={q}, {f} at {p:?}: eliminated {}, oracle {}",
                nf.evaluate(&p),
                expected
            );
            points += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s");
    Ok(format!("200 formulas, {points} points agree ({secs:.2}s)"))
}

// ---- 2 ----

fn oracle_lines(q: u64, n: usize) -> Vec<Vec<u64>> {
    let mut lines = BTreeSet::new();
    for v in (0..n).map(|_| 0..q).multi_cartesian_product() {
        if let Some(&lead) = v.iter().find(|&&c| c != 0) {
            let inv = (1..q).find(|i| i * lead % q == 1).unwrap();
            lines.insert(v.iter().map(|c| c * inv % q).collect::<Vec<_>>());
        }
    }
    lines.into_iter().collect()
}

/// Fraction-free (Bareiss) determinant.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| m[r][k] != 0) else { return 0 };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn kantor_invariant() -> Outcome {
    let mut sizes = Vec::new();
    for (q, n) in [2u64, 3, 5].into_iter().cartesian_product([2usize, 3]) {
        let lines = oracle_lines(q, n);
        let m = lines.len();
        ensure!(m as u64 == (q.pow(n as u32) - 1) / (q - 1), "({q},{n}): {m} lines");
        ensure!(qe::line_representatives(q, n).unwrap() == lines, "({q},{n}): representatives differ");
        let u = InterpolationSystem::build(q, n).map_err(|e| e.to_string())?.u_matrix();
        let dot = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<u64>() % q;
        let expected: Vec<Vec<i128>> =
            lines.iter().map(|a| lines.iter().map(|b| (dot(a, b) == 0) as i128).collect()).collect();
        let as_q: Vec<Vec<Q>> = expected.iter().map(|r| r.iter().map(|&x| Q::from_integer((x as i64).into())).collect()).collect();
        ensure!(u == as_q, "({q},{n}): U differs from the incidence oracle");
        ensure!(alqe::linalg::rank(&u) == m, "({q},{n}): rank below {m}");
        ensure!(bareiss_det(expected) != 0, "({q},{n}): oracle determinant is 0");
        sizes.push(m);
    }
    let u22 = InterpolationSystem::build(2, 2).unwrap().u_matrix();
    let expected: Vec<Vec<Q>> = [[0, 1, 0], [1, 0, 0], [0, 0, 1]].iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    ensure!(u22 == expected, "(2,2) U = {u22:?}");
    Ok(format!("full rank for m in {sizes:?}; (2,2) instance matches"))
}

// ---- 3 ----

fn los_law() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(3);
    let mut sentences = 0;
    for _ in 0..100 {
        let k = rng.random_range(1..=3);
        let ws = common::weights(&mut rng, k);
        let members = ws.into_iter().map(|w| (w, common::small_structure(&mut rng, 4))).collect();
        let fam = WeightedFamily::new(members).map_err(|e| e.to_string())?;
        let mean = ultramean::ultramean(&fam).map_err(|e| e.to_string())?;
        ensure!(validate(&mean).is_empty(), "mean fails validation: {:?}", validate(&mean));
        for _ in 0..3 {
            let f = common::affine_formula(&mut rng, &[], 2);
            let oracle: Q = fam
                .members()
                .iter()
                .map(|(w, m)| w * evaluate_closed(m, &f).unwrap())
                .sum();
            let report = verify_los(&fam, &f).map_err(|e| e.to_string())?;
            ensure!(report.holds() && report.weighted_value == oracle, "{f}: {report:?}");
            sentences += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 30.0, "took {secs:.1}s");
    Ok(format!("100 families, {sentences} sentences exact ({secs:.2}s)"))
}

// ---- 4 ----

fn inclusion_exclusion() -> Outcome {
    let mut rng = rng(4);
    let m = uniform_boolean_algebra(1).unwrap();
    for _ in 0..500 {
        let n = rng.random_range(1..=5);
        let values: Vec<Q> = (0..n).map(|_| common::rational(&mut rng, 5)).collect();
        let fs: Vec<Formula> = values.iter().cloned().map(Formula::Const).collect();
        let join = inclusion_exclusion_join(&fs, 6).map_err(|e| e.to_string())?;
        let meet = inclusion_exclusion_meet(&fs, 6).map_err(|e| e.to_string())?;
        let max = values.iter().max().unwrap().clone();
        let min = values.iter().min().unwrap().clone();
        let jv = join.evaluate_with(|f| evaluate_closed(&m, f)).unwrap();
        let mv = meet.evaluate_with(|f| evaluate_closed(&m, f)).unwrap();
        ensure!(jv == max && mv == min, "{values:?}: join {jv}, meet {mv}");
    }
    Ok("500 tuples: join = max, meet = min".into())
}

// ---- 5 ----

fn odag_axioms() -> Outcome {
    let cfg = CheckConfig { trials: 1000, seed: 5, bound: 10 };
    let mut evaluations = 0;
    for ax in &Axiom::ALL[..12] {
        let r = check_axiom(*ax, &cfg).map_err(|e| e.to_string())?;
        ensure!(r.passed(), "{ax}: {}", r.counterexample.unwrap());
        evaluations += r.evaluations;
    }
    let r = check_axiom(Axiom::A13, &cfg).map_err(|e| e.to_string())?;
    let cx = r.counterexample.ok_or("A13 passed")?;
    ensure!(cx.assignment == vec![("x".to_string(), int(-1)), ("y".to_string(), int(1))], "A13 witness {cx}");
    // direct case analysis at (−1,1): t = 1 gives |1∧−1| − |1∧1| = 0
    ensure!((cx.lhs.clone(), cx.rhs.clone()) == (int(0), int(1)), "A13 values {cx}");
    let mut out = Vec::new();
    let code = alqe::cli::run(["alqe", "odag", "check", "--axiom", "A13", "--trials", "1000", "--seed", "1"], &mut out, &mut Vec::new());
    let text = String::from_utf8(out).unwrap();
    ensure!(code == 1 && text.contains("(x,y) = (-1,1)"), "cli exit {code}: {text}");
    Ok(format!("A1-A12 hold on {evaluations} evaluations; A13 fails at (x,y) = (-1,1) with lhs 0, rhs 1"))
}

// ---- 6 ----

fn interval_definability() -> Outcome {
    let mut rng = rng(6);
    for _ in 0..500 {
        let a = common::rational(&mut rng, 10);
        let b = &a + rational::abs(&common::rational(&mut rng, 5));
        let x = match rng.random_range(0..4) {
            0 => a.clone(),
            1 => b.clone(),
            _ => common::rational(&mut rng, 12),
        };
        let asg: QAssignment = [("x".to_string(), x.clone())].into();
        let cases = [
            (Interval::Closed(a.clone(), b.clone()), a <= x && x <= b),
            (Interval::From(a.clone()), a <= x),
            (Interval::UpTo(b.clone()), x <= b),
        ];
        for (i, member) in cases {
            let closed = eval_discrete_q(&odag::interval_distance(&i, "x").unwrap(), &asg).unwrap();
            let inf = eval_discrete_q(&odag::interval_inf_form(&i, "x").unwrap(), &asg).unwrap();
            let expected = if member { int(0) } else { int(1) };
            ensure!(closed == expected && inf == expected, "{i:?} at {x}: closed {closed}, inf {inf}");
        }
    }
    Ok("500 triples, three interval kinds each".into())
}

// ---- 7 ----

/// Unique solution of `[A | b]` by Gauss–Jordan, `None` if inconsistent or
/// not unique.
fn unique_solution(mut aug: Vec<Vec<Q>>, cols: usize) -> Option<Vec<Q>> {
    let mut row = 0;
    for c in 0..cols {
        let p = (row..aug.len()).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(row, p);
        let pivot = aug[row][c].clone();
        for v in aug[row].iter_mut() {
            *v /= &pivot;
        }
        for r in 0..aug.len() {
            if r != row && !aug[r][c].is_zero() {
                let factor = aug[r][c].clone();
                for j in 0..=cols {
                    let delta = &factor * &aug[row][j];
                    aug[r][j] -= delta;
                }
            }
        }
        row += 1;
    }
    if aug[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|r| aug[r][cols].clone()).collect())
}

/// Carathéodory: membership in the hull via affinely independent subsets.
fn in_hull(points: &[Vec<Q>], v: &[Q]) -> bool {
    let k = v.len();
    (1..=(k + 1).min(points.len())).any(|size| {
        (0..points.len()).combinations(size).any(|subset| {
            let mut aug: Vec<Vec<Q>> = (0..k)
                .map(|c| subset.iter().map(|&i| points[i][c].clone()).chain([v[c].clone()]).collect())
                .collect();
            aug.push(vec![int(1); size + 1]);
            unique_solution(aug, size).is_some_and(|l| l.iter().all(|x| !x.is_negative()))
        })
    })
}

fn type_space_geometry() -> Outcome {
    let f2 = prime_field_vector_space(2).unwrap();
    let frag = Fragment::parse("|x1|\n|x2|\n|x1 + x2|\nsup y. |x1 - y|", &Signature::vector_space(), standard_vars(2))
        .map_err(|e| e.to_string())?;
    let cloud = realized_types(&f2, &frag, "F2").map_err(|e| e.to_string())?;
    let qf: Vec<Vec<Q>> = cloud.vectors().iter().map(|v| v.values[..3].to_vec()).collect();
    let expected: Vec<Vec<Q>> =
        [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]].iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    ensure!(qf == expected, "cloud {qf:?}");
    let qf_cloud = TypeCloud::from_values(qf.clone());
    let extremes = extreme_points(&qf_cloud);
    ensure!(extremes.len() == 4, "{} extreme points", extremes.len());
    for v in &qf {
        let others: Vec<Vec<Q>> = qf.iter().filter(|w| *w != v).cloned().collect();
        ensure!(!in_hull(&others, v), "oracle finds {v:?} inside the hull");
        ensure!(is_convex_combination(v, &qf_cloud).is_none(), "{v:?} reported interior");
        let cert = hull_certificate(v, &extremes).ok_or(format!("no certificate for {v:?}"))?;
        let sum: Q = cert.weights.iter().sum();
        let combined: Vec<Q> = (0..3)
            .map(|c| cert.weights.iter().zip(extremes.vectors()).map(|(w, p)| w * &p.values[c]).sum())
            .collect();
        ensure!(
            sum == int(1) && cert.weights.iter().all(|w| !w.is_negative()) && combined == *v,
            "certificate for {v:?} fails substitution"
        );
    }
    let sep = separation_check(&cloud, &frag, Tag::Qf).map_err(|e| e.to_string())?;
    ensure!(sep.separated(), "QF coordinates do not separate: {:?}", sep.offending);
    Ok("4 extreme points, 4 verified certificates, separated by QF coordinates".into())
}

// ---- 8 ----

fn mixture_linearity() -> Outcome {
    let mut rng = rng(8);
    for _ in 0..100 {
        let m1 = common::small_structure(&mut rng, 4);
        let m2 = common::small_structure(&mut rng, 4);
        let d = rng.random_range(1..=6);
        let lambda = frac(rng.random_range(0..=d), d);
        let n = rng.random_range(1..=2);
        let vars = standard_vars(n);
        let formulas = (0..rng.random_range(1..=3)).map(|_| (common::affine_formula(&mut rng, &vars, 1), None)).collect();
        let frag = Fragment::new(vars.clone(), formulas).map_err(|e| e.to_string())?;
        let t1: Vec<usize> = (0..n).map(|_| rng.random_range(0..m1.size())).collect();
        let t2: Vec<usize> = (0..n).map(|_| rng.random_range(0..m2.size())).collect();
        let report = mixture_check(&m1, &m2, &lambda, &frag, &t1, &t2).map_err(|e| e.to_string())?;
        let expected: Vec<Q> = frag
            .formulas()
            .map(|f| {
                let v1 = evaluate_at(&m1, f, &vars, &t1).unwrap();
                let v2 = evaluate_at(&m2, f, &vars, &t2).unwrap();
                &lambda * v1 + (int(1) - &lambda) * v2
            })
            .collect();
        ensure!(report.mixed == expected, "lambda {lambda}: mixed {:?}, expected {expected:?}", report.mixed);
    }
    Ok("100 cases exact".into())
}

// ---- 9 ----

fn probability_identity() -> Outcome {
    let mut pairs = 0;
    let mut literal_failures = 0;
    for k in 1..=3usize {
        let non_uniform: Vec<Q> = match k {
            1 => vec![int(1)],
            2 => vec![frac(1, 3), frac(2, 3)],
            _ => vec![frac(1, 2), frac(1, 3), frac(1, 6)],
        };
        let uniform = vec![frac(1, k as i64); k];
        for w in [uniform, non_uniform] {
            let b = boolean_algebra(&w).unwrap();
            let mu = |mask: usize| -> Q { (0..k).filter(|i| mask >> i & 1 == 1).map(|i| w[i].clone()).sum() };
            for x in 0..1usize << k {
                ensure!(b.dist(x, 0) == &mu(x), "2^{k}: d({x},0) is not the measure");
                for y in 0..1usize << k {
                    ensure!(mu(x & y) + mu(x | y) == mu(x) + mu(y), "oracle identity fails at {x},{y}");
                }
            }
            let r = probability_identity_check(&b, false).map_err(|e| e.to_string())?;
            ensure!(r.holds() && r.pairs == 1 << (2 * k), "2^{k} weights {w:?}: {:?}", r.failures.first());
            pairs += r.pairs;
            literal_failures += probability_identity_check(&b, true).unwrap().failures.len();
        }
    }
    Ok(format!("{pairs} pairs exact; the doubled-x reading fails at {literal_failures} pairs"))
}

// ---- 10 ----

fn round_trip() -> Outcome {
    let mut rng = rng(10);
    let sig = common::rich_signature();
    for _ in 0..500 {
        let depth = rng.random_range(0..=3);
        let f = common::any_formula(&mut rng, depth);
        let text = f.to_string();
        let back = parse(&text, &sig).map_err(|e| format!("`{text}`: {e}"))?;
        ensure!(back == f, "`{text}` reparses as `{back}`");
    }
    let mut structures = vec![
        prime_field_vector_space(3).unwrap(),
        prime_field_ring(5).unwrap(),
        boolean_algebra(&[frac(1, 2), frac(1, 3), frac(1, 6)]).unwrap(),
        prime_field_vector_space(2).unwrap().with_scaled_metric(&frac(2, 7)),
    ];
    structures.extend((0..20).map(|_| common::small_structure(&mut rng, 4)));
    for m in &structures {
        let text = io::to_json(m);
        let back = io::from_json(&text).map_err(|e| e.to_string())?;
        ensure!(back == *m && io::to_json(&back) == text, "structure changed on reload");
        ensure!(validate(&back).is_empty(), "reloaded structure fails validation");
    }
    Ok(format!("500 formulas and {} structures reproduced", structures.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("QE oracle equivalence", qe_oracle_equivalence),
        ("Kantor invariant", kantor_invariant),
        ("Los law", los_law),
        ("Inclusion-exclusion", inclusion_exclusion),
        ("ODAG axioms", odag_axioms),
        ("Interval definability", interval_definability),
        ("Type-space geometry", type_space_geometry),
        ("Mixture linearity", mixture_linearity),
        ("Probability-algebra identity", probability_identity),
        ("Round-trip", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
