mod common;

use std::collections::BTreeMap;

use alqe::odag::{eval_discrete_q, eval_term, qf_lemma_rewrite, term_normal_form, LemmaOutcome, QAssignment};
use alqe::rational::{frac, int, Q};
use alqe::riesz::{
    boolean_atoms, equation_formula, inclusion_exclusion_join, ring_or_atoms, BooleanAtom, DEFAULT_EXPANSION_CAP,
};
use alqe::semantics::{
    boolean_algebra, evaluate, evaluate_closed, prime_field_ring, prime_field_vector_space, validate, Assignment,
};
use alqe::syntax::{parse, Formula, Signature, Term};
use alqe::typespace::{
    extreme_points, hull_certificate, is_convex_combination, realized_types, standard_vars, Fragment, TypeCloud,
};
use alqe::ultramean::{self, WeightedFamily};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn odag_term(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    if depth == 0 {
        return match rng.random_range(0..4) {
            0 => Term::Num(common::rational(rng, 3)),
            _ => Term::var(["x", "y", "z"].choose(rng).unwrap()),
        };
    }
    let a = odag_term(rng, depth - 1);
    let b = odag_term(rng, depth - 1);
    match rng.random_range(0..6) {
        0 => Term::add(a, b),
        1 => Term::sub(a, b),
        2 => Term::neg(a),
        3 => Term::scale(common::coefficient(rng), a),
        4 => Term::meet(a, b),
        _ => Term::join(a, b),
    }
}

fn assignment(rng: &mut ChaCha8Rng) -> QAssignment {
    ["x", "y", "z"].iter().map(|v| (v.to_string(), common::rational(rng, 5))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_pointwise_equal(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let t = odag_term(&mut rng, 3);
        let nf = term_normal_form(&t).unwrap();
        for _ in 0..20 {
            let asg = assignment(&mut rng);
            prop_assert_eq!(nf.evaluate(&asg).unwrap(), eval_term(&t, &asg).unwrap());
        }
    }

    #[test]
    fn lemma_rewrite_agrees_off_grid(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let sig = Signature::odag();
        let mut one_var = || {
            let t = odag_term(&mut rng, 2);
            t.vars().iter().fold(t.clone(), |t, v| t.substitute(v, &Term::var("x")))
        };
        let f = Formula::sum(
            Formula::norm(one_var()),
            Formula::scale(frac(1, 2), Formula::neg(Formula::norm(one_var()))),
        );
        let f = parse(&f.to_string(), &sig).unwrap();
        if let LemmaOutcome::Reduced { combination, .. } = qf_lemma_rewrite(&f).unwrap() {
            let g = combination.to_formula();
            for _ in 0..30 {
                let asg: QAssignment = [("x".to_string(), common::rational(&mut rng, 6))].into();
                prop_assert_eq!(eval_discrete_q(&f, &asg).unwrap(), eval_discrete_q(&g, &asg).unwrap());
            }
        }
    }

    #[test]
    fn krein_milman_on_random_clouds(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let dim = rng.random_range(1..=3);
        let count = rng.random_range(1..=8);
        let points: Vec<Vec<Q>> =
            (0..count).map(|_| (0..dim).map(|_| int(rng.random_range(-2..=2))).collect()).collect();
        let cloud = TypeCloud::from_values(points);
        let extremes = extreme_points(&cloud);
        prop_assert!(!extremes.is_empty());
        for v in cloud.vectors() {
            let cert = hull_certificate(&v.values, &extremes);
            prop_assert!(cert.as_ref().is_some_and(|c| c.verify(&extremes, &v.values)));
            let interior = is_convex_combination(&v.values, &cloud);
            prop_assert_eq!(interior.is_none(), extremes.vectors().contains(v));
            if let Some(c) = interior {
                prop_assert!(c.verify(&cloud, &v.values));
            }
        }
    }

    #[test]
    fn mixture_associativity(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let ms: Vec<_> = (0..3).map(|_| common::small_structure(&mut rng, 3)).collect();
        let inner = ultramean::mixture(&ms[0], &ms[1], &frac(1, 2)).unwrap();
        let nested = ultramean::mixture(&inner, &ms[2], &frac(2, 3)).unwrap();
        let fam = WeightedFamily::new(ms.iter().map(|m| (frac(1, 3), m.clone())).collect()).unwrap();
        let flat = ultramean::ultramean(&fam).unwrap();
        prop_assert!(validate(&nested).is_empty());
        prop_assert!(validate(&flat).is_empty());
        for _ in 0..4 {
            let f = common::affine_formula(&mut rng, &[], 2);
            prop_assert_eq!(evaluate_closed(&nested, &f).unwrap(), evaluate_closed(&flat, &f).unwrap());
        }
    }

    #[test]
    fn measure_form_of_inclusion_exclusion(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = prime_field_vector_space(3).unwrap();
        let sig = Signature::vector_space();
        let pool = ["|x|", "|y|", "|x + y|", "|x + 2*y|", "d(x,y)"];
        let n = rng.random_range(1..=4);
        let fs: Vec<Formula> = (0..n).map(|_| parse(pool.choose(&mut rng).unwrap(), &sig).unwrap()).collect();
        let comb = inclusion_exclusion_join(&fs, DEFAULT_EXPANSION_CAP).unwrap();
        let points: Vec<Assignment> = m
            .tuples(2)
            .map(|t| [("x".to_string(), t[0]), ("y".to_string(), t[1])].into())
            .collect();
        let weights = common::weights(&mut rng, points.len());
        let integrate = |value: &dyn Fn(&Assignment) -> Q| -> Q {
            weights.iter().zip(&points).map(|(w, a)| w * value(a)).sum()
        };
        let direct = integrate(&|a| fs.iter().map(|f| evaluate(&m, f, a).unwrap()).max().unwrap());
        let expanded = integrate(&|a| comb.evaluate(&m, a).unwrap());
        prop_assert_eq!(direct, expanded);
    }

    #[test]
    fn discrete_clouds_are_vertices_of_a_cube(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let q = *[2u64, 3].choose(&mut rng).unwrap();
        let m = prime_field_vector_space(q).unwrap();
        let pool = ["|x1|", "|x2|", "|x1 + x2|", "d(x1,x2)", "|x1 + 2*x2|"];
        let lines = (0..rng.random_range(1..=4)).map(|_| *pool.choose(&mut rng).unwrap()).collect::<Vec<_>>().join("\n");
        let frag = Fragment::parse(&lines, &Signature::vector_space(), standard_vars(2)).unwrap();
        let cloud = realized_types(&m, &frag, "F").unwrap();
        for v in cloud.vectors() {
            prop_assert!(v.values.iter().all(|x| *x == int(0) || *x == int(1)));
        }
        prop_assert_eq!(extreme_points(&cloud), cloud);
    }
}

#[test]
fn ring_encoder_on_prime_fields() {
    let sig = Signature::ring();
    let terms = ["x", "x + neg(1)", "x*x + 1", "0", "x*x*x + x", "1 + 1"];
    for p in [2u64, 3, 5, 7] {
        let m = prime_field_ring(p).unwrap();
        for (a, b) in terms.iter().flat_map(|a| terms.iter().map(move |b| (a, b))) {
            let ta = alqe::syntax::parse_term(a, &sig).unwrap();
            let tb = alqe::syntax::parse_term(b, &sig).unwrap();
            let product = equation_formula(&ring_or_atoms(&ta, &tb));
            for x in m.elements() {
                let asg: Assignment = [("x".to_string(), x)].into();
                let zero = |f: &Formula| evaluate(&m, f, &asg).unwrap() == int(0);
                let either = zero(&equation_formula(&ta)) || zero(&equation_formula(&tb));
                assert_eq!(zero(&product), either, "p={p}, ({a})({b}) at {x}");
            }
        }
    }
}

#[test]
fn boolean_encoders_on_small_algebras() {
    for k in 1..=3usize {
        let weights: Vec<Q> = (1..=k as i64).map(|i| frac(i, (k * (k + 1) / 2) as i64)).collect();
        let b = boolean_algebra(&weights).unwrap();
        let (x, y) = (Term::var("x"), Term::var("y"));
        let eq = equation_formula(&boolean_atoms(&BooleanAtom::Eq(x.clone(), y.clone())));
        let conj = equation_formula(&boolean_atoms(&BooleanAtom::Conj(x, y)));
        for (a, c) in b.elements().flat_map(|a| b.elements().map(move |c| (a, c))) {
            let asg: Assignment = [("x".to_string(), a), ("y".to_string(), c)].into();
            let holds = |f: &Formula| evaluate(&b, f, &asg).unwrap() == int(0);
            assert_eq!(holds(&eq), a == c);
            assert_eq!(holds(&conj), a == 0 && c == 0);
        }
    }
}

#[test]
fn weighted_family_rejects_bad_weights() {
    let m = prime_field_vector_space(2).unwrap();
    let bad: BTreeMap<&str, Vec<Q>> =
        [("sum", vec![frac(1, 2), frac(1, 3)]), ("negative", vec![frac(3, 2), frac(-1, 2)])].into();
    for weights in bad.values() {
        let members = weights.iter().map(|w| (w.clone(), m.clone())).collect();
        assert!(WeightedFamily::new(members).is_err());
    }
}
