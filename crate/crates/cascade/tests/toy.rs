use cascade::hamiltonian::toy_hamiltonian_3h;
use cascade::numeric::Precision;
use cascade::toy::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng, n_gen: usize) -> Vec<Complex64> {
    (0..n_gen).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

#[test]
fn symbolic_and_numeric_hamiltonians_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for &(n_gen, n) in &[(2usize, 2usize), (4, 4), (6, 16)] {
        let poly = toy_hamiltonian_3h(n_gen, n);
        let model = ToyModel::new(n_gen, n as f64);
        for _ in 0..200 {
            let b = random_state(&mut rng, n_gen);
            let sym = poly.eval(&b);
            let num = model.hamiltonian(&b);
            assert!(sym.im.abs() < 1e-10);
            assert!((sym.re / 3.0 - num).abs() <= 1e-12 * num.abs().max(1.0), "{} vs {num}", sym.re / 3.0);
        }
    }
}

#[test]
fn periodic_orbit_matches_its_rate() {
    let model = ToyModel::new(4, 2.0);
    let b0 = periodic_orbit_field(&model, 2, 1.0, 0.0);
    let opts = IntegrateOptions { tol: 1e-15, ..IntegrateOptions::default() };
    let tr = integrate(&model, &b0, 10.0, &opts).unwrap();
    assert!(tr.mass_drift() <= 1e-12, "J drift {}", tr.mass_drift());
    let exact = periodic_orbit_field(&model, 2, 1.0, 10.0);
    assert!((tr.last()[1] - exact[1]).norm() < 1e-9);
    assert!((measured_phase_rate(&tr, 1) - periodic_rate(&model, 1.0)).abs() < 1e-9);
}

#[test]
fn heteroclinic_closed_form() {
    for n in [2.0, 16.0] {
        let model = ToyModel::new(2, n);
        let lam = lyapunov_rate(n);
        let phi0 = heteroclinic_angle(n);
        let i0: f64 = 1e-6;
        // I1 = e^{2λ(t+t0)}/(1+e^{2λ(t+t0)}) with I1(0) = i0.
        let t0 = (i0 / (1.0 - i0)).ln() / (2.0 * lam);
        let t_end = -2.0 * t0;
        let b0 = two_generation_state(i0, 1.0, phi0);
        let opts = IntegrateOptions { tol: 1e-14, sample_dt: Some(t_end / 200.0), ..IntegrateOptions::default() };
        let tr = integrate(&model, &b0, t_end, &opts).unwrap();
        let mut err: f64 = 0.0;
        let mut drift: f64 = 0.0;
        for (t, b) in tr.times.iter().zip(&tr.states) {
            let (i1, _) = heteroclinic_2g(n, t + t0);
            err = err.max((b[0].norm_sqr() - i1).abs());
            if b[0].norm_sqr() > 1e-8 && b[1].norm_sqr() > 1e-8 {
                drift = drift.max(((b[0] * b[1].conj()).arg() - phi0).abs());
            }
        }
        assert!(err <= 1e-6, "n = {n}: sup error {err}");
        assert!(drift <= 1e-6, "n = {n}: angle drift {drift}");
    }
}

#[test]
fn scaling_symmetry() {
    let model = ToyModel::new(3, 4.0);
    let b0 = vec![Complex64::new(0.4, 0.1), Complex64::new(-0.3, 0.5), Complex64::new(0.2, -0.2)];
    let mu: f64 = 1.3;
    let opts = IntegrateOptions::default();
    let tr = integrate(&model, &b0, 0.4, &opts).unwrap();
    let mapped = scaling_map(&tr, mu);
    let b0s: Vec<Complex64> = b0.iter().map(|z| z / mu).collect();
    let direct = integrate(&model, &b0s, 0.4 * mu.powi(4), &opts).unwrap();
    for (a, b) in mapped.last().iter().zip(direct.last()) {
        assert!((a - b).norm() < 1e-9, "{a} vs {b}");
    }
    assert!((mapped.energy[0] - direct.energy[0]).abs() < 1e-12);
}

#[test]
fn double_double_tracks_invariants_better() {
    let model = ToyModel::new(3, 16.0);
    let b0 = periodic_orbit_field(&model, 1, 1.0, 0.0);
    let tr = integrate(&model, &b0, 1.0, &IntegrateOptions { tol: 1e-20, precision: Precision::DoubleDouble, ..IntegrateOptions::default() }).unwrap();
    assert!(tr.mass_drift() <= 1e-14);
    assert_eq!(tr.precision, Precision::DoubleDouble);
}

#[test]
fn rejects_bad_options() {
    let model = ToyModel::new(3, 4.0);
    let b0 = vec![Complex64::new(1.0, 0.0); 2];
    assert!(matches!(integrate(&model, &b0, 1.0, &IntegrateOptions::default()), Err(ToyError::Invalid(_))));
    let b0 = vec![Complex64::new(1.0, 0.0); 3];
    assert!(matches!(integrate(&model, &b0, 1.0, &IntegrateOptions { tol: 0.0, ..IntegrateOptions::default() }), Err(ToyError::Invalid(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>(), n_gen in 2usize..7, n in 2u32..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = ToyModel::new(n_gen, n as f64);
        let b = random_state(&mut rng, n_gen);
        let mut g = vec![Complex64::new(0.0, 0.0); n_gen];
        model.gradient_conj(&b, &mut g);
        let fd = gradient_fd(&model, &b, 1e-5);
        let scale = g.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for k in 0..n_gen {
            prop_assert!((g[k] - fd[k]).norm() <= 1e-7 * scale);
        }
    }

    #[test]
    fn support_stays_invariant(first in 0usize..5, len in 1usize..3, seed in any::<u64>()) {
        let n_gen = 6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = ToyModel::new(n_gen, 4.0);
        let mut b = vec![Complex64::new(0.0, 0.0); n_gen];
        let last = (first + len).min(n_gen);
        for z in &mut b[first..last] {
            *z = Complex64::from_polar(rng.gen_range(0.2..0.6), rng.gen_range(-3.0..3.0));
        }
        let tr = integrate(&model, &b, 0.05, &IntegrateOptions::default()).unwrap();
        for s in &tr.states {
            for (k, z) in s.iter().enumerate() {
                if k < first || k >= last {
                    prop_assert_eq!(*z, Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn mass_and_energy_are_conserved(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = ToyModel::new(4, 3.0);
        let b: Vec<Complex64> = (0..4).map(|_| Complex64::from_polar(rng.gen_range(0.1..0.5), rng.gen_range(-3.0..3.0))).collect();
        let tr = integrate(&model, &b, 0.2, &IntegrateOptions::default()).unwrap();
        prop_assert!(tr.mass_drift() <= 1e-10 * tr.mass[0]);
        prop_assert!(tr.energy_drift() <= 1e-9 * tr.energy[0].abs().max(1e-3));
    }
}
