use ainf_core::category::{check_functor, envelope_su, solve_unit_homotopies, su_projection, verify_unit_data, AInfCategory};
use ainf_core::constructions::{
    canonical_hu, check_fukaya, check_unit_homotopies, check_unital_extension, h_from_weak_unit, homotopy_unital_from_unital, solve_h, units_from_homotopy_unital,
    units_from_weak_unit, verify_iota_equivalence, weak_unit_from_h, weak_unit_from_unital, DgModel,
};
use ainf_core::correspondence::{check_family, family_to_functor, functor_to_family};
use ainf_core::dcoder::{b1, check_double_coderivation, double_agree, is_zero_double, post_compose};
use ainf_core::dg::dg_import;
use ainf_core::fixtures::{dg_random, random_double, twist};
use ainf_core::scalar::Field;
use ainf_core::tensor::Elem;
use proptest::prelude::*;

const Q: Field = Field::Rational;

fn import(seed: u64, n: usize) -> (AInfCategory, Vec<Elem>) {
    dg_import(&dg_random(seed, Q), n).expect("generated DG categories are valid")
}

/// Fixtures small enough for many proptest cases.
fn small(seed: u64, n: usize) -> Option<(AInfCategory, Vec<Elem>)> {
    let (a, u) = import(seed, n);
    (a.quiver.num_gens() <= 12).then_some((a, u))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn b1_squares_to_zero(seed in 0u64..60, r_seed in 0u64..1000, degree in -2i32..=0) {
        let Some((a, _)) = small(seed, 4) else { return Ok(()) };
        let q = &a.quiver;
        let r = random_double(&a, degree, 3, r_seed);
        prop_assert!(check_double_coderivation(&r, q, q).passed);
        let once = b1(&r, &a, &a);
        prop_assert_eq!(once.degree, degree + 1);
        prop_assert!(check_double_coderivation(&once, q, q).passed);
        prop_assert!(is_zero_double(&b1(&once, &a, &a), q, q).passed);
    }

    #[test]
    fn b1_commutes_with_post_composition(seed in 0u64..8, r_seed in 0u64..1000, degree in -2i32..=0) {
        let t = twist(seed, 4, Q);
        let (a, d, f) = (&t.cat, &t.base, &t.functor);
        let r = random_double(a, degree, 3, r_seed);
        let lhs = b1(&post_compose(&r, f, a), a, d);
        let rhs = post_compose(&b1(&r, a, a), f, a);
        prop_assert!(double_agree(&lhs, &rhs, &a.quiver, &d.quiver).passed);
    }

    #[test]
    fn projection_families_round_trip(seed in 0u64..60) {
        let Some((a, u)) = small(seed, 3) else { return Ok(()) };
        let (_, pi) = su_projection(&a, &u).expect("strictly unital");
        let fam = functor_to_family(&pi, &a);
        prop_assert!(check_family(&fam, &a, &a).passed);
        let back = family_to_functor(&fam, &a, &a).expect("valid family");
        prop_assert_eq!(&back.f, &pi.f);
        let env = envelope_su(&a);
        prop_assert!(check_functor(&back, &env.cat, &a).passed);
    }

    #[test]
    fn units_survive_every_route(seed in 0u64..60) {
        let Some((a, u)) = small(seed, 3) else { return Ok(()) };
        let (_, pi) = su_projection(&a, &u).expect("strictly unital");
        prop_assert_eq!(units_from_weak_unit(&a, &pi).expect("weak unit").units, u.clone());
        let hu = canonical_hu(&a, &u).expect("strictly unital");
        prop_assert!(check_fukaya(&hu).passed);
        prop_assert!(verify_iota_equivalence(&hu, &u).passed);
        let ud = units_from_homotopy_unital(&hu).expect("homotopy unital");
        prop_assert!(verify_unit_data(&a, &ud).passed);
        prop_assert_eq!(&ud.units, &u);
    }

    #[test]
    fn twisted_weak_units(seed in 0u64..16) {
        let t = twist(seed, 3, Q);
        let model = DgModel::from_twist(&t).expect("valid model");
        let uh = solve_h(&t.cat, &t.units, &model).expect("solvable");
        prop_assert!(check_unit_homotopies(&uh, &t.cat, &t.units, &model).passed);
        let (u, _) = weak_unit_from_unital(&t.cat, &t.units, &model).expect("solvable");
        prop_assert_eq!(&u.f, &weak_unit_from_h(&t.cat, &uh.h).expect("hB₁ = ν").f);
        let h = h_from_weak_unit(&t.cat, &u).expect("weak unit");
        prop_assert!(double_agree(&h, &uh.h, &t.cat.quiver, &t.cat.quiver).passed);
        let ud = units_from_weak_unit(&t.cat, &u).expect("weak unit");
        prop_assert!(verify_unit_data(&t.cat, &ud).passed);
        prop_assert_eq!(&ud.units, &t.units);
    }

    #[test]
    fn twisted_homotopy_unital_extensions(seed in 0u64..16) {
        let t = twist(seed, 3, Q);
        let model = DgModel::from_twist(&t).expect("valid model");
        let ud = solve_unit_homotopies(&t.cat, &t.units).expect("valid").expect("homotopy units");
        let ext = homotopy_unital_from_unital(&t.cat, &ud, &model).expect("solvable");
        prop_assert!(check_unital_extension(&ext, &model).passed);
        prop_assert!(verify_iota_equivalence(&ext.source, &t.units).passed);
        prop_assert_eq!(units_from_homotopy_unital(&ext.source).expect("homotopy unital").units, t.units.clone());
    }
}
