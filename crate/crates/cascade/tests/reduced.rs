use std::f64::consts::PI;

use cascade::hamiltonian::{find_frak_s2, find_frak_s3, rat};
use cascade::reduced::*;
use proptest::prelude::*;

#[test]
fn displayed_s2_keeps_energy_near_the_pole() {
    let s = frak_s2_system();
    let r = no_full_transfer_scan(&s, 1e-3, 24, 30.0, 0.5).unwrap();
    assert!(r.passes, "sup I1 = {}", r.sup_i1);
    // −66P + 24P^{3/2}cos(3Δθ) is monotone in P = I1 I2 on [0, 1/4], so the orbit
    // is trapped by its energy level: P stays within a few percent of P(0).
    assert!(r.sup_i1 < 1.1e-3, "sup I1 = {}", r.sup_i1);
    for o in &r.orbits {
        assert!(o.mass_drift < 1e-7 && o.energy_drift < 1e-7 * 31.0, "{o:?}");
    }
}

#[test]
fn derived_s2_has_the_same_shape() {
    let k = find_frak_s2(3).unwrap();
    let (sys, [a, b, c]) = frak_s2_from_configuration(&k).unwrap();
    assert_eq!((a, c), (rat(31), rat(24)));
    assert_eq!(b, rat(42));
    let r = no_full_transfer_scan(&sys, 1e-3, 12, 20.0, 0.5).unwrap();
    assert!(r.passes && r.sup_i1 < 1.1e-3, "sup I1 = {}", r.sup_i1);
}

#[test]
fn s3_from_a_quadruple() {
    let q = find_frak_s3(10).unwrap();
    let sys = frak_s3_system(&q).unwrap();
    for &(i1, d) in &[(0.2, 0.1), (0.7, -1.3)] {
        let h = sys.energy_polar(i1, d);
        assert!((h - sys.energy_polar(i1, d + sys.period)).abs() < 1e-9 * h.abs().max(1.0));
        assert!((h - sys.energy_polar(i1, -d)).abs() < 1e-9 * h.abs().max(1.0));
    }
    let r = no_full_transfer_scan(&sys, 1e-3, 12, 20.0, 0.5).unwrap();
    assert!(r.passes, "sup I1 = {}", r.sup_i1);
}

#[test]
fn rectangle_transfers_everything() {
    for n in [2usize, 4] {
        let o = positive_control(n, 1e-3, 3.0).unwrap();
        assert!(o.sup_i1 >= 1.0 - 1e-4, "n = {n}: sup I1 = {}", o.sup_i1);
    }
}

#[test]
fn pole_is_an_invariant_circle() {
    for s in [frak_s2_system(), rectangle_system(2)] {
        let r = no_full_transfer_scan(&s, 0.0, 4, 10.0, 0.5).unwrap();
        assert_eq!(r.sup_i1, 0.0);
    }
}

#[test]
fn invalid_scans_are_rejected() {
    let s = frak_s2_system();
    assert!(no_full_transfer_scan(&s, 0.7, 4, 1.0, 0.1).is_err());
    assert!(no_full_transfer_scan(&s, 0.1, 0, 1.0, 0.1).is_err());
}

#[test]
fn portrait_period_symmetry_and_critical_points() {
    let s = frak_s2_system();
    assert!((s.period - 2.0 * PI / 3.0).abs() < 1e-15);
    let p = phase_portrait(&s, 31);
    assert_eq!(p.len(), 31 * 31);
    assert!((p.first().unwrap().dtheta + 2.0 * PI / 3.0).abs() < 1e-15);
    for q in &p {
        assert!((q.h - s.energy_polar(q.i1, -q.dtheta)).abs() < 1e-10);
        assert!((q.h - s.energy_polar(q.i1, q.dtheta + s.period)).abs() < 1e-10);
    }
    let crit = critical_points(&s, 64);
    assert_eq!(crit.len(), 2);
    for c in &crit {
        assert!((c.i1 - 0.5).abs() < 1e-12, "{c:?}");
        let (a, b) = s.polar_field(c.i1, c.dtheta);
        assert!(a.abs() < 1e-9 && b.abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_and_mass_are_conserved(i1 in 0.01f64..0.49, phase in -3.2f64..3.2, which in 0usize..3) {
        let s = match which {
            0 => frak_s2_system(),
            1 => rectangle_system(4),
            _ => frak_s3_system(&find_frak_s3(10).unwrap()).unwrap(),
        };
        let o = transfer_orbit(&s, i1, phase, 2.0, 1e-12).unwrap();
        let h = s.energy_polar(i1, phase).abs().max(1.0);
        prop_assert!(o.mass_drift < 1e-8, "J drift {}", o.mass_drift);
        prop_assert!(o.energy_drift < 1e-8 * h, "H drift {}", o.energy_drift);
    }
}
