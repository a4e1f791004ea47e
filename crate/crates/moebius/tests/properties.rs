use moebius::classify::{
    continuity_product, dual_triple, random_automorphism, random_commuting_automorphisms,
    sample_pairs, strongly_isomorphic, triples_isomorphic, TriangulationTriple,
};
use moebius::cn::{
    apply_functor, compose_basic, conjugate_pair, continuity_factor, is_anti_compatible,
    natural_iso, BasicMorphismCn, MonomialLift,
};
use moebius::frobenius::{
    coord, random_object, stable_identity, stable_reduce, universal_sequence, Cover, CoverMorphism,
    MFMorphism, MFObject, Model, Series,
};
use moebius::normal_forms::{good_basis, is_good, sigma_orbits};
use moebius::scalars::{geometric_mean, principal_root, q, Cyclotomic, RootOfUnity};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn root() -> impl Strategy<Value = RootOfUnity> {
    (
        0i64..60,
        prop::sample::select(vec![1u64, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 24, 30]),
    )
        .prop_map(|(p, q)| RootOfUnity::new(p, q))
}

fn cyclo() -> impl Strategy<Value = Cyclotomic> {
    prop::collection::vec((root(), -4i64..5, 1i64..4), 0..4)
        .prop_map(|ts| Cyclotomic::reduce(ts.into_iter().map(|(z, a, b)| (z, q(a, b)))))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lift(r: &mut ChaCha8Rng, n: usize) -> MonomialLift {
    let s = random_automorphism(r, n, 12);
    MonomialLift {
        perm: s.object_map().to_vec(),
        diag: s.coeff().to_vec(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_ring_laws(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn galois_conjugation_is_multiplicative(a in cyclo(), b in cyclo(), k in prop::sample::select(vec![1i64, 7, 11, 13])) {
        // k is a unit modulo every conductor that `root()` produces
        prop_assert_eq!((&a * &b).conj(k), &a.conj(k) * &b.conj(k));
    }

    #[test]
    fn roots_of_unity(z in root(), n in 1u64..7) {
        prop_assert!(z.pow(z.order() as i64).is_one());
        prop_assert_eq!(principal_root(z, n).pow(n as i64), z);
        prop_assert!(z.mul(z.inv()).is_one());
    }

    #[test]
    fn geometric_mean_power(cs in prop::collection::vec(root(), 1..6)) {
        let g = geometric_mean(&cs);
        let prod = cs.iter().fold(RootOfUnity::ONE, |a, c| a.mul(*c));
        prop_assert_eq!(g.pow(cs.len() as i64), prod);
    }

    #[test]
    fn functors_preserve_composition(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let f = random_automorphism(&mut r, n, 12);
        let (i, j, k) = (r.gen_range(0..n), r.gen_range(0..n), r.gen_range(0..n));
        let a = BasicMorphismCn::basic(j, i);
        let b = BasicMorphismCn::basic(k, j);
        let ba = compose_basic(&b, &a).unwrap();
        let lhs = apply_functor(&f, &ba);
        let rhs = compose_basic(&apply_functor(&f, &b), &apply_functor(&f, &a)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn continuity_factors_are_reciprocal(seed in any::<u64>(), n in 1usize..5) {
        let (s, t) = random_commuting_automorphisms(&mut rng(seed), n, 24);
        prop_assert!(continuity_product(&s, &t).unwrap().is_one());
        let phi = natural_iso(&s, &t).unwrap();
        prop_assert!(phi.is_natural());
    }

    #[test]
    fn conjugation_preserves_the_pair_class(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let (s, t) = random_commuting_automorphisms(&mut r, n, 12);
        let rho = random_automorphism(&mut r, n, 12);
        let (s2, t2) = conjugate_pair(&rho, &s, &t).unwrap();
        prop_assert_eq!(continuity_factor(&s, &t).unwrap(), continuity_factor(&s2, &t2).unwrap());
        prop_assert!(strongly_isomorphic((&s, &t), (&s2, &t2)).is_some());
    }

    #[test]
    fn good_basis_is_good(seed in any::<u64>(), n in 1usize..7) {
        let s = random_automorphism(&mut rng(seed), n, 12);
        let g = good_basis(&s).unwrap();
        let s1 = g.apply(&s);
        prop_assert!(is_good(&s1));
        prop_assert_eq!(sigma_orbits(&s1).unwrap(), sigma_orbits(&s).unwrap());
    }

    #[test]
    fn duality_is_an_involution(seed in any::<u64>()) {
        let mut r = rng(seed);
        for (s, t) in sample_pairs(&mut r, 4, 24, 2, true) {
            prop_assert!(is_anti_compatible(&s, &t).unwrap());
            let x = TriangulationTriple::new(s, t).unwrap();
            let dd = dual_triple(&dual_triple(&x).unwrap()).unwrap();
            prop_assert!(triples_isomorphic(&dd, &x));
        }
    }

    #[test]
    fn cover_composition_is_associative(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let cv = Cover::new(lift(&mut r, n));
        let mut p = coord(r.gen_range(0..24), 12);
        let mut sheet = r.gen_range(0..n);
        let mut maps = Vec::new();
        for _ in 0..3 {
            let q = p + coord(r.gen_range(0..18), 12);
            let next = r.gen_range(0..n);
            maps.push(cv.raw_scalar(p, sheet, q, next, RootOfUnity::new(r.gen_range(0..6), 6)));
            p = q;
            sheet = next;
        }
        let l = cv.compose(&maps[2], &cv.compose(&maps[1], &maps[0]).unwrap()).unwrap();
        let rr = cv.compose(&cv.compose(&maps[2], &maps[1]).unwrap(), &maps[0]).unwrap();
        prop_assert_eq!(l, rr);
    }

    #[test]
    fn matrix_factorization_law(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let cv = Cover::new(lift(&mut r, n));
        let m = random_object(&mut r, n);
        let t = |p| CoverMorphism { source: p, target: p, coeff: Series::monomial(Cyclotomic::one(), 1) };
        let (dm, dp) = (m.d_minus(&cv), m.d_plus(&cv));
        prop_assert_eq!(cv.compose(&dp, &dm).unwrap(), t(dm.source));
        prop_assert_eq!(cv.compose(&dm, &dp).unwrap(), t(dp.source));
    }

    #[test]
    fn canonical_form_is_a_class_invariant(seed in any::<u64>(), n in 1usize..4, k in -2i64..3) {
        let mut r = rng(seed);
        let cv = Cover::new(lift(&mut r, n));
        let m = random_object(&mut r, n);
        let (c, _) = m.canonical(&cv);
        prop_assert!(m.relation(&cv, &c).is_some());
        prop_assert_eq!(m.swap(&cv).canonical(&cv).0, c);
        prop_assert_eq!(m.shift(&cv, k).canonical(&cv).0, c);
        prop_assert_eq!(c.canonical(&cv).0, c);
    }

    #[test]
    fn identities_survive_stably(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let cv = Cover::new(lift(&mut r, n));
        let m = random_object(&mut r, n);
        prop_assume!(!m.is_proj_inj());
        let id = MFMorphism::identity(&cv, vec![m]);
        prop_assert_eq!(stable_reduce(&cv, &id).unwrap(), stable_identity(&[m]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn universal_sequences_split(seed in any::<u64>(), class in 0usize..3) {
        let classes = moebius::cli::suites::two_fold_classes(moebius::par::Exec::Sequential);
        let md = Model::new(&classes[class].representative).unwrap();
        let m: MFObject = random_object(&mut rng(seed), 2);
        let s = universal_sequence(&md, &m).unwrap();
        prop_assert!(s.check(&md.cv).is_ok());
    }
}
