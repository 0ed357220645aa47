use cascade::builder::*;
use cascade::resonance::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn lp(x: i64, y: i64) -> LatticePoint {
    LatticePoint::of(x, y)
}

#[test]
fn prototype_is_degenerate() {
    // Collapsed children put several points at the origin, so the set is not
    // even structurally distinct.
    let model = build_combinatorial_model(3).unwrap();
    let proto = prototype_embedding(&model).unwrap();
    let table = model.table(proto.points.clone()).unwrap();
    let (ints, _) = table.dilate_to_integers(&BigInt::one());
    let cert = certify(&ints);
    assert!(!cert.passed());
    assert!(cert.to_text().contains("certified = false"));
}

#[test]
fn n3_build_is_certified_and_round_trips() {
    let model = build_combinatorial_model(3).unwrap();
    let out = perturb_to_nondegenerate(&model, &PerturbConfig::default()).unwrap();
    assert!(out.certificate.as_ref().is_some_and(|c| c.passed()));
    let (set, _) = out.set.dilate_to_integers(&BigInt::one());
    assert_eq!((set.n_generations(), set.per_generation(), set.len()), (3, 4, 12));
    assert!(set.structural_check().is_ok());
    for f in set.families() {
        assert!(f.identities_hold(set.points()) && f.is_nondegenerate(set.points()));
    }
    let text = lattice_set_to_text(&set);
    let back = parse_generation_set(&text).unwrap();
    assert!(rational_is_integral(&back));
    assert_eq!(rational_set_to_text(&back), text);
    // Certificates are invariant under dilation.
    let cert = certify(&set.dilate(&BigInt::from(7)));
    assert!(cert.passed());
    assert_eq!(cert.to_text().lines().filter(|l| l.starts_with("resonant =")).count(), certify(&set).to_text().lines().filter(|l| l.starts_with("resonant =")).count());
}

#[test]
fn perturbation_is_reproducible() {
    let model = build_combinatorial_model(3).unwrap();
    let a = perturb_to_nondegenerate(&model, &PerturbConfig { seed: 5, ..PerturbConfig::default() }).unwrap();
    let b = perturb_to_nondegenerate(&model, &PerturbConfig { seed: 5, ..PerturbConfig::default() }).unwrap();
    assert_eq!(rational_set_to_text(&a.set), rational_set_to_text(&b.set));
}

#[test]
fn missing_completion_is_reported() {
    // A rectangle without one corner.
    let rep = is_complete(&[lp(0, 0), lp(2, 0), lp(0, 1)]);
    assert!(!rep.complete);
    assert!(rep.missing.contains(&lp(2, 1)));
    assert!(is_complete(&[lp(0, 0), lp(2, 0), lp(0, 1), lp(2, 1)]).complete);
}

#[test]
fn targets_choose_enough_generations() {
    assert_eq!(generations_for_target(4.0, 2.0), 10);
    for (k, s) in [(2.0, 2.0), (10.0, 1.5), (4.0, 3.0)] {
        let n = generations_for_target(k, s);
        assert!(2f64.powf((s - 1.0) * (n as f64 - 5.0)) >= 2.0 * k * k);
        assert!(n == 6 || 2f64.powf((s - 1.0) * (n as f64 - 6.0)) < 2.0 * k * k);
    }
    assert!(matches!(build_for_target(4.0, 1.0, 10.0, 1.0, &PerturbConfig::default()), Err(TargetError::Invalid(_))));
}

#[test]
fn dilation_reaches_the_requested_norm() {
    let m = dilation_for_size(&BigInt::from(3), &BigRational::new(2.into(), 9.into()), 500.0);
    assert!(m.to_f64().unwrap() * (2.0f64 / 9.0).sqrt() >= 500.0);
    assert_eq!(&m % BigInt::from(3), BigInt::from(0));
}

fn arb_point() -> impl proptest::strategy::Strategy<Value = LatticePoint> {
    (-30i64..30, -30i64..30).prop_map(|(x, y)| lp(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rectangles_resonate(a in arb_point(), d in arb_point(), t in -5i64..5) {
        // Parents a, a + d + t d⊥ and children a + t d⊥, a + d.
        let perp = lp(-d.y, d.x);
        let p2 = a.add(&d).add(&perp.scale(&t));
        let c1 = a.add(&perp.scale(&t));
        let c2 = a.add(&d);
        let k = [a.clone(), p2.clone(), lp(0, 0), c1.clone(), c2.clone(), lp(0, 0)];
        prop_assert_ne!(is_resonance(&k), ResonanceKind::None);
        prop_assert_eq!(complete_quintuple(&[a, p2, lp(0, 0), c1, lp(0, 0)]), Some(c2));
    }

    #[test]
    fn resonance_is_galilean_invariant(k in prop::array::uniform6(arb_point()), v in arb_point(), rot in 0usize..4) {
        let turn = |p: &LatticePoint| (0..rot).fold(p.clone(), |q, _| lp(-q.y, q.x));
        let base = is_resonance(&k);
        let moved: [LatticePoint; 6] = std::array::from_fn(|i| turn(&k[i]).add(&v));
        let mv = is_resonance(&moved);
        prop_assert_eq!(base == ResonanceKind::None, mv == ResonanceKind::None);
    }

    #[test]
    fn completion_is_a_resonance(q in prop::array::uniform5(arb_point())) {
        if let Some(k6) = complete_quintuple(&q) {
            let k = [q[0].clone(), q[1].clone(), q[2].clone(), q[3].clone(), q[4].clone(), k6];
            prop_assert_ne!(is_resonance(&k), ResonanceKind::None);
        }
    }

    #[test]
    fn canonical_vectors(pairs in prop::collection::vec((0usize..12, -3i64..4), 1..6), k in 1i64..4) {
        let v = CoefficientVector::from_pairs(pairs);
        prop_assume!(!v.is_zero());
        let c = v.canonical();
        prop_assert_eq!(v.scale(k).canonical(), c.scale(k));
        prop_assert_eq!(v.neg().canonical(), c.clone());
        prop_assert_eq!(c.content().abs(), v.content().abs());
        prop_assert!(c.iter().next().unwrap().1 > 0);
        prop_assert_eq!(v.add(&v.neg()).is_zero(), true);
    }
}
