use std::collections::BTreeMap;

use ainf_core::category::{
    check_ainfty, check_functor, compose_functors, envelope_su, functors_agree, invert_functor, solve_unit_homotopies, su_projection, transport_structure, verify_unit_data,
    AInfCategory, AInfFunctor,
};
use ainf_core::dg::dg_import;
use ainf_core::fixtures::{dg_random, twist};
use ainf_core::lin::Lin;
use ainf_core::quiver::{discrete_quiver, suspend, tensor_quivers, Quiver};
use ainf_core::scalar::{Field, Scalar};
use ainf_core::tensor::{cut, delta, odd, words_of_len, Chain, Family, Word};
use proptest::prelude::*;

const Q: Field = Field::Rational;

fn import(seed: u64, n: usize) -> (AInfCategory, Vec<ainf_core::tensor::Elem>) {
    dg_import(&dg_random(seed, Q), n).expect("generated DG categories are valid")
}

fn pick_word(q: &Quiver, len: usize, index: usize) -> Option<Word> {
    let ws = words_of_len(q, len);
    (!ws.is_empty()).then(|| ws[index % ws.len()].clone())
}

type Pairs = Lin<(Word, Word)>;

fn delta_chain(q: &Quiver, c: &Chain) -> Pairs {
    let mut out = Pairs::new();
    for (w, k) in c.iter() {
        for pair in delta(q, w) {
            out.add_term(pair, k.clone());
        }
    }
    out
}

fn tensor_chains(a: &Chain, b: &Chain, sign_odd: impl Fn(&Word) -> bool) -> Pairs {
    let mut out = Pairs::new();
    for (x, c) in a.iter() {
        for (y, d) in b.iter() {
            if x.gens.is_empty() && y.gens.is_empty() && x.start != y.start {
                continue;
            }
            out.add_term((x.clone(), y.clone()), &(c * d) * &Scalar::sign(sign_odd(x)));
        }
    }
    out
}

fn dims_by_hom(q: &Quiver) -> BTreeMap<(u32, u32), BTreeMap<i32, usize>> {
    let n = q.num_objects() as u32;
    (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| ((x, y), q.dims(x, y))).collect()
}

/// Identity plus upper triangular arity-1 terms within each graded hom,
/// plus arbitrary arity-2 terms of the right degree.
fn random_automorphism(q: &Quiver, coeffs: &[i64]) -> Family {
    let mut f = Family::new(0);
    let mut next = coeffs.iter().cycle();
    for g in 0..q.num_gens() as u32 {
        f.add_term(&[g], g, Scalar::one());
        for &h in q.hom(q.src(g), q.tgt(g)) {
            if h > g && q.degree(h) == q.degree(g) {
                f.add_term(&[g], h, Scalar::int(*next.next().expect("cycle")));
            }
        }
    }
    for w in words_of_len(q, 2) {
        let (x, y) = (w.start, w.end(q));
        for &h in q.hom(x, y) {
            if q.degree(h) == w.degree(q) {
                f.add_term(&w.gens, h, Scalar::int(*next.next().expect("cycle")));
            }
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cut_is_coassociative_and_counital(seed in 0u64..40, len in 0usize..5, index in 0usize..1000) {
        let (a, _) = import(seed, 4);
        let q = &a.quiver;
        let w = if len == 0 { Some(Word::empty(0)) } else { pick_word(q, len, index) };
        let Some(w) = w else { return Ok(()) };
        prop_assert_eq!(cut(q, &w, 1), vec![vec![w.clone()]]);
        let two: Vec<(Word, Word)> = cut(q, &w, 2).into_iter().map(|m| (m[0].clone(), m[1].clone())).collect();
        prop_assert_eq!(&two, &delta(q, &w));
        prop_assert!(two.contains(&(Word::empty(w.start), w.clone())));
        prop_assert!(two.contains(&(w.clone(), Word::empty(w.end(q)))));
        let mut left: Vec<Vec<Word>> = Vec::new();
        let mut right: Vec<Vec<Word>> = Vec::new();
        for (u, v) in &two {
            for (u1, u2) in delta(q, u) {
                left.push(vec![u1, u2, v.clone()]);
            }
            for (v1, v2) in delta(q, v) {
                right.push(vec![u.clone(), v1, v2]);
            }
        }
        let mut three = cut(q, &w, 3);
        left.sort();
        right.sort();
        three.sort();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(&left, &three);
    }

    #[test]
    fn b_is_a_coderivation_squaring_to_zero(seed in 0u64..40, len in 1usize..5, index in 0usize..1000) {
        let (a, _) = import(seed, 4);
        let q = &a.quiver;
        let Some(w) = pick_word(q, len, index) else { return Ok(()) };
        let lhs = delta_chain(q, &a.b_full(&w));
        let mut rhs = Pairs::new();
        for (u, v) in delta(q, &w) {
            let single = |x: &Word| Chain::term(x.clone(), Scalar::one());
            rhs.add_lin(&tensor_chains(&a.b_full(&u), &single(&v), |_| false), &Scalar::one());
            rhs.add_lin(&tensor_chains(&single(&u), &a.b_full(&v), |x| odd(x.degree(q))), &Scalar::one());
        }
        prop_assert_eq!(lhs, rhs);
        let mut twice = Chain::new();
        for (v, c) in a.b_full(&w).iter() {
            twice.add_lin(&a.b_full(v), c);
        }
        prop_assert!(twice.is_zero());
    }

    #[test]
    fn functors_are_comultiplicative(seed in 0u64..6, len in 1usize..4, index in 0usize..1000) {
        let t = twist(seed, 3, Q);
        let (q, f) = (&t.cat.quiver, &t.functor);
        let Some(w) = pick_word(q, len, index) else { return Ok(()) };
        let lhs = delta_chain(&t.base.quiver, &f.full(q, &w));
        let mut rhs = Pairs::new();
        for (u, v) in delta(q, &w) {
            rhs.add_lin(&tensor_chains(&f.full(q, &u), &f.full(q, &v), |_| false), &Scalar::one());
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tensor_of_quivers_is_associative_and_unital(s1 in 0u64..30, s2 in 0u64..30, s3 in 0u64..30, k in -2i32..=2, l in -2i32..=2) {
        let qs: Vec<Quiver> = [s1, s2, s3].iter().map(|&s| import(s, 2).0.quiver).collect();
        prop_assume!(qs.iter().all(|q| q.objects() == qs[0].objects()));
        let ab_c = tensor_quivers(&tensor_quivers(&qs[0], &qs[1]).expect("same objects"), &qs[2]).expect("same objects");
        let a_bc = tensor_quivers(&qs[0], &tensor_quivers(&qs[1], &qs[2]).expect("same objects")).expect("same objects");
        prop_assert_eq!(dims_by_hom(&ab_c), dims_by_hom(&a_bc));
        let unit = discrete_quiver(qs[0].objects()).expect("fresh");
        prop_assert_eq!(dims_by_hom(&tensor_quivers(&qs[0], &unit).expect("same objects")), dims_by_hom(&qs[0]));
        prop_assert_eq!(dims_by_hom(&tensor_quivers(&unit, &qs[0]).expect("same objects")), dims_by_hom(&qs[0]));
        let twice = suspend(&suspend(&qs[0], k), l);
        prop_assert_eq!(dims_by_hom(&twice), dims_by_hom(&suspend(&qs[0], k + l)));
        for (g, h) in qs[0].gens().iter().zip(twice.gens()) {
            prop_assert_eq!(h.degree, g.degree - k - l);
        }
    }

    #[test]
    fn transport_and_inversion(seed in 0u64..30, coeffs in prop::collection::vec(-2i64..=2, 1..16)) {
        let (a, _) = import(seed, 3);
        let g = random_automorphism(&a.quiver, &coeffs);
        let (a2, gf) = transport_structure(&a, &g).expect("invertible arity-1 part");
        prop_assert!(check_ainfty(&a2).passed);
        prop_assert!(check_functor(&gf, &a2, &a).passed);
        let inv = invert_functor(&gf, &a2).expect("invertible");
        prop_assert!(check_functor(&inv, &a, &a2).passed);
        let round = compose_functors(&gf, &inv, &a2);
        prop_assert!(functors_agree(&round, &AInfFunctor::identity(&a2), &a2, &a2.quiver).passed);
        let round = compose_functors(&inv, &gf, &a);
        prop_assert!(functors_agree(&round, &AInfFunctor::identity(&a), &a, &a.quiver).passed);
    }

    #[test]
    fn projection_splits_the_envelope(seed in 0u64..40) {
        let (a, u) = import(seed, 3);
        let (env, pi) = su_projection(&a, &u).expect("strictly unital");
        prop_assert!(env.embedding.is_strict());
        prop_assert!(check_functor(&pi, &env.cat, &a).passed);
        let e_pi = compose_functors(&env.embedding, &pi, &a);
        prop_assert!(functors_agree(&e_pi, &AInfFunctor::identity(&a), &a, &a.quiver).passed);
        let again = envelope_su(&a);
        prop_assert_eq!(again.unit_gens, env.unit_gens);
    }

    #[test]
    fn twists_have_unit_homotopies(seed in 0u64..12) {
        let t = twist(seed, 3, Q);
        let ud = solve_unit_homotopies(&t.cat, &t.units).expect("valid input").expect("units are homotopy units");
        prop_assert!(verify_unit_data(&t.cat, &ud).passed);
        prop_assert_eq!(&ud.units, &t.units);
    }
}
