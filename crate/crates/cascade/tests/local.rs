use cascade::local::*;
use cascade::numeric::{ExtrapolationConfig, Extrapolator, Flow};
use cascade::toy::*;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn spectrum_at_periodic_orbits() {
    for n in [2.0, 4.0, 16.0] {
        let model = ToyModel::new(6, n);
        let s = linearization_spectrum(&model, 3, 1.0);
        let lam = lyapunov_rate(n);
        // Modes 2 and 4 are hyperbolic, modes 1, 5, 6 elliptic.
        assert_eq!(s.hyperbolic.len(), 2);
        assert_eq!(s.elliptic.len(), 3);
        for h in &s.hyperbolic {
            assert!((h - lam).abs() <= 1e-6 * lam, "n = {n}: {h} vs {lam}");
        }
        for w in &s.elliptic {
            assert!((w - 2.0 * (3.0 * n - 2.0)).abs() <= 1e-6 * w, "n = {n}: {w}");
        }
        let r = linearization_spectrum(&model.rescaled(), 3, 1.0);
        for h in &r.hyperbolic {
            assert!((h - 3f64.sqrt()).abs() <= 1e-8);
        }
        for w in &r.elliptic {
            assert!((w - kappa(n)).abs() <= 1e-8);
        }
    }
}

#[test]
fn spectrum_scales_with_mass() {
    let model = ToyModel::new(4, 4.0);
    let s = linearization_spectrum(&model, 2, 2.0);
    for h in &s.hyperbolic {
        assert!((h - 4.0 * lyapunov_rate(4.0)).abs() <= 1e-6 * h);
    }
}

#[test]
fn end_orbits_have_one_hyperbolic_pair() {
    let s = linearization_spectrum(&ToyModel::new(5, 4.0), 1, 1.0);
    assert_eq!(s.hyperbolic.len(), 1);
    assert_eq!(s.elliptic.len(), 3);
}

#[test]
fn reduced_flow_is_conjugate_to_the_full_flow() {
    let model = ToyModel::new(5, 3.0);
    let j = 3;
    let c0: Vec<Complex64> = vec![
        Complex64::new(0.02, 0.01),
        undiagonalize(Hyperbolic { plus: 0.05, minus: 0.03 }, 3.0),
        Complex64::new(0.0, 0.04),
        Complex64::new(-0.01, 0.0),
    ];
    let local = LocalState { j, mass: 1.0, theta: 0.0, c: c0.clone() };
    let b0 = from_local(&local).unwrap();
    let t_end = 0.05;
    let tr = integrate(&model, &b0, t_end, &IntegrateOptions::default()).unwrap();
    let via_full = to_local(tr.last(), j).unwrap();

    let sys = ReducedSystem { model, j, mass: 1.0 };
    let mut y: Vec<f64> = c0.iter().flat_map(|z| [z.re, z.im]).collect();
    let mut ex = Extrapolator::new(ExtrapolationConfig::new(1e-13, 1e-16), y.len());
    ex.integrate(&sys, 0.0, &mut y, t_end, |_, _| Flow::Continue).unwrap();
    for (k, z) in via_full.c.iter().enumerate() {
        let w = Complex64::new(y[2 * k], y[2 * k + 1]);
        assert!((z - w).norm() < 1e-10, "mode {k}: {z} vs {w}");
    }
}

#[test]
fn unstable_coordinate_grows() {
    let n = 4.0;
    let sys = ReducedSystem { model: ToyModel::new(5, n).rescaled(), j: 3, mass: 1.0 };
    let mut c = vec![Complex64::new(0.0, 0.0); 4];
    let mut out = c.clone();
    c[2] = undiagonalize(Hyperbolic { plus: 1e-7, minus: 0.0 }, n);
    sys.field(&c, &mut out);
    let d = diagonalize_hyperbolic(out[2], n);
    assert!((d.plus / 1e-7 - 3f64.sqrt()).abs() < 1e-6);
    c[2] = undiagonalize(Hyperbolic { plus: 0.0, minus: 1e-7 }, n);
    sys.field(&c, &mut out);
    let d = diagonalize_hyperbolic(out[2], n);
    assert!((d.minus / 1e-7 + 3f64.sqrt()).abs() < 1e-6);
}

#[test]
fn slider_six_modes() {
    let res = slider_shoot(&SliderConfig::new(6, 4.0, 0.1)).unwrap();
    let rep = verify_slider(&res, 0.1);
    assert!(rep.ok, "{rep:?}");
    assert_eq!(rep.peaks.iter().map(|p| p.0).collect::<Vec<_>>(), vec![3, 4]);
    assert!(rep.mass_drift <= 1e-8);
}

#[test]
fn slider_eight_modes() {
    let res = slider_shoot(&SliderConfig::new(8, 4.0, 0.1)).unwrap();
    let rep = verify_slider(&res, 0.1);
    assert!(rep.ok, "{rep:?}");
    assert!(rep.peaks.windows(2).all(|w| w[0].1 < w[1].1));
}

#[test]
fn slider_hop_times_are_ordered() {
    let mut cfg = SliderConfig::new(8, 4.0, 0.1);
    cfg.initial_phases = vec![0.1, 1.0];
    let res = slider_shoot(&cfg).unwrap();
    assert_eq!(res.hops.iter().map(|h| (h.from, h.to)).collect::<Vec<_>>(), vec![(3, 4), (4, 5), (5, 6)]);
    assert!(res.hops.windows(2).all(|w| w[0].time < w[1].time));
    assert!((res.final_time - res.hops.last().unwrap().time).abs() < 1e-12);
}

#[test]
fn targets_accept_the_slider_arrival() {
    // On arrival at T_4 the trailing mode sits near the stable ray and the leading modes are tiny.
    let res = slider_shoot(&SliderConfig::new(6, 4.0, 0.1)).unwrap();
    let spec = TargetSpec { kind: TargetKind::Incoming, j: 4, n: 4.0, sigma: 1e-2, big_t: 0.5, radius: 1.0, exponent: 1.0 };
    let b = res.trajectory.last();
    let rep = target_membership(&spec, b).unwrap();
    let s = to_local(b, 4).unwrap();
    let h = diagonalize_hyperbolic(s.mode(3), 4.0);
    assert!(h.plus.abs() < 1e-6 * h.minus.abs(), "{h:?}");
    assert!(rep.components.iter().all(|c| c.residual.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chart_round_trip(amps in prop::collection::vec(0.05f64..0.6, 5), phases in prop::collection::vec(-3.1f64..3.1, 5), j in 1usize..=5) {
        let b: Vec<Complex64> = amps.iter().zip(&phases).map(|(a, p)| Complex64::from_polar(*a, *p)).collect();
        let s = to_local(&b, j).unwrap();
        let back = from_local(&s).unwrap();
        for k in 0..5 {
            prop_assert!((back[k] - b[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn hyperbolic_round_trip(re in -1.0f64..1.0, im in -1.0f64..1.0, n in 2.0f64..50.0) {
        let z = Complex64::new(re, im);
        let h = diagonalize_hyperbolic(z, n);
        prop_assert!((undiagonalize(h, n) - z).norm() < 1e-14);
        // The transformation is symplectic: |c|² in terms of c± uses cos 2φ0.
        let phi = heteroclinic_angle(n);
        let expect = (h.plus * h.plus + h.minus * h.minus + 2.0 * (2.0 * phi).cos() * h.plus * h.minus) / (2.0 * (2.0 * phi).sin());
        prop_assert!((z.norm_sqr() - expect).abs() < 1e-13);
    }

    #[test]
    fn local_coordinates_are_gauge_invariant(rot in -3.1f64..3.1, amps in prop::collection::vec(0.05f64..0.6, 4)) {
        let b: Vec<Complex64> = amps.iter().enumerate().map(|(k, a)| Complex64::from_polar(*a, 0.7 * k as f64)).collect();
        let r: Vec<Complex64> = b.iter().map(|z| z * Complex64::from_polar(1.0, rot)).collect();
        let (s, t) = (to_local(&b, 2).unwrap(), to_local(&r, 2).unwrap());
        for k in 0..3 {
            prop_assert!((s.c[k] - t.c[k]).norm() < 1e-14);
        }
    }
}
