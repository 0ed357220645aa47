use cascade::builder::{build_combinatorial_model, perturb_to_nondegenerate, PerturbConfig};
use cascade::hamiltonian::*;
use cascade::resonance::{GenerationTable, LatticePoint};
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

fn builder_set(n_gen: usize) -> Vec<LatticePoint> {
    let model = build_combinatorial_model(n_gen).unwrap();
    let out = perturb_to_nondegenerate(&model, &PerturbConfig::default()).unwrap();
    let (set, _) = out.set.dilate_to_integers(&BigInt::one());
    set.convert::<i64>().expect("fits in i64").points().to_vec()
}

fn structural_table(n_gen: usize) -> GenerationTable<LatticePoint> {
    let m = build_combinatorial_model(n_gen).unwrap();
    m.table(vec![LatticePoint::of(0, 0); m.len()]).unwrap()
}

#[test]
fn enumerated_equals_structural_formula() {
    for n_gen in [3, 4] {
        let pts = builder_set(n_gen);
        let model = build_combinatorial_model(n_gen).unwrap();
        let table = model.table(pts.clone()).unwrap();
        let enumerated = restricted_hamiltonian(&pts).unwrap();
        let formula = generation_set_hamiltonian(&table);
        assert!((enumerated.clone() - formula).is_zero(), "N = {n_gen}");
        assert!(enumerated.is_real() && enumerated.is_gauge_invariant());
        assert_eq!(enumerated.homogeneous_degree(), Some(6));
    }
}

#[test]
fn diagonal_restriction_is_the_toy_model() {
    for n_gen in [2, 3, 4, 5] {
        let t = structural_table(n_gen);
        let h = generation_set_hamiltonian(&t);
        let n = t.per_generation();
        let d = diagonal_restriction(&h, t.generation_map(), n);
        assert_eq!(d.reduced, toy_hamiltonian_3h(n_gen, n), "N = {n_gen}");
    }
}

#[test]
fn single_mode_and_two_mode_restrictions() {
    let n = 16;
    let h = toy_hamiltonian_3h(5, n);
    let one = h.substitute(|v| v).terms().filter(|(m, _)| m.variables().all(|v| v == 0)).map(|(m, c)| (m.clone(), c.clone())).collect::<Vec<_>>();
    assert_eq!(one, vec![(Monomial::action(0, 3), rat(4 - 9 * n as i64))]);
    let mut two = PolynomialHamiltonian::zero();
    for (m, c) in h.terms().filter(|(m, _)| m.variables().all(|v| v <= 1)) {
        two.add_term(m.clone(), c.clone());
    }
    assert_eq!(two, two_generation_3h(n));
}

#[test]
fn mass_and_momentum_commute() {
    let pts = builder_set(3);
    let h = restricted_hamiltonian(&pts).unwrap();
    assert!(mass(0..pts.len()).bracket(&h).is_zero());
    let (px, py) = momentum(&pts);
    assert!(px.bracket(&h).is_zero());
    assert!(py.bracket(&h).is_zero());
    // A generic quadratic does not.
    let x = PolynomialHamiltonian::monomial(Monomial::action(0, 1), rat(1));
    assert!(!x.bracket(&h).is_zero());
}

#[test]
fn text_export_round_shape() {
    let h = two_generation_3h(2);
    let text = h.to_text();
    assert_eq!(text.lines().count(), h.len());
    assert!(text.lines().all(|l| l.contains(" : ")));
}

fn s2() -> [LatticePoint; 6] {
    find_frak_s2(3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relabeling_invariance(perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle()) {
        let k = s2();
        let h = restricted_hamiltonian(&k).unwrap();
        let permuted: Vec<LatticePoint> = perm.iter().map(|&i| k[i].clone()).collect();
        let hp = restricted_hamiltonian(&permuted).unwrap();
        // variable v of the permuted set is k[perm[v]]
        prop_assert_eq!(hp.substitute(|v| perm[v]), h);
    }

    #[test]
    fn polar_form_agrees_numerically(i1 in 0.0f64..1.0, i2 in 0.0f64..1.0, t1 in -3.2f64..3.2, t2 in -3.2f64..3.2) {
        use num_complex::Complex64;
        let h = toy_hamiltonian_3h(2, 4);
        let p = polar_form(&h, &[0, 1]).unwrap();
        let z = [Complex64::from_polar(i1.sqrt(), t1), Complex64::from_polar(i2.sqrt(), t2)];
        prop_assert!((h.eval(&z).re - p.eval(&[i1, i2], &[t1, t2])).abs() < 1e-10);
    }
}
