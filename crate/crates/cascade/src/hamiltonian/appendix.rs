//! Small complete sets with a single coupling resonance: the six-point set 𝔖⁽²⁾ and
//! the four-point set 𝔖⁽³⁾, together with their reduced Hamiltonians.

use num_rational::BigRational;
use num_traits::One;

use super::polar::{polar_form, PolarHamiltonian};
use super::poly::{rat, Monomial, PolynomialHamiltonian};
use super::restricted::{restricted_hamiltonian, resonant_sum, HamiltonianError};
use crate::resonance::{is_complete, LatticePoint};

/// Distinct k1..k6 with k1+k2+k3 = k4+k5+k6 and equal sums of squares.
pub fn is_frak_s2(k: &[LatticePoint; 6]) -> bool {
    let mut d = k.to_vec();
    d.sort();
    d.dedup();
    d.len() == 6 && {
        let l = k[0].add(&k[1]).add(&k[2]);
        let r = k[3].add(&k[4]).add(&k[5]);
        l == r && k[0].norm2 + k[1].norm2 + k[2].norm2 == k[3].norm2 + k[4].norm2 + k[5].norm2
    }
}

/// Number of non-action monomials in the restricted Hamiltonian: 2 when the only
/// nontrivial resonance is the defining one (and its conjugate).
fn coupling_terms(points: &[LatticePoint]) -> usize {
    resonant_sum(points).terms().filter(|(m, _)| !m.is_action_only()).count()
}

/// First complete six-point set in a deterministic scan of |coordinates| ≤ `bound`
/// whose only nontrivial resonance is (k1 k2 k3; k4 k5 k6).
///
/// Candidates are triangles with centroid at the origin, k_{3+i} = −k_i, so that both
/// resonance identities hold automatically.
pub fn find_frak_s2(bound: i64) -> Option<[LatticePoint; 6]> {
    let range = || (-bound..=bound).flat_map(move |x| (-bound..=bound).map(move |y| (x, y)));
    for (ax, ay) in range() {
        for (bx, by) in range() {
            let a = LatticePoint::of(ax, ay);
            let b = LatticePoint::of(bx, by);
            let c = LatticePoint::of(-ax - bx, -ay - by);
            let k = [a.clone(), b.clone(), c.clone(), LatticePoint::of(-ax, -ay), LatticePoint::of(-bx, -by), LatticePoint::of(ax + bx, ay + by)];
            if !is_frak_s2(&k) {
                continue;
            }
            if is_complete(&k).complete && coupling_terms(&k) == 2 {
                return Some(k);
            }
        }
    }
    None
}

/// Restricted Hamiltonian of an 𝔖⁽²⁾ set on the invariant subspace
/// β1 = β2 = β3 = z1, β4 = β5 = β6 = z2, in action–angle form on (z1, z2).
pub fn frak_s2_reduced(k: &[LatticePoint; 6]) -> Result<PolarHamiltonian, HamiltonianError> {
    let h = restricted_hamiltonian(k)?;
    let sym = h.substitute(|v| if v < 3 { 0 } else { 1 });
    polar_form(&sym, &[0, 1])
}

/// (31, b, 24) with H = 31 J³ + b I1 I2 J + 24 (I1 I2)^{3/2} cos(3(θ1 − θ2)), if the
/// reduced Hamiltonian has exactly this shape.
pub fn frak_s2_coefficients(p: &PolarHamiltonian) -> Option<(BigRational, BigRational, BigRational)> {
    let a = p.coefficient(&[(0, 6)], &[]);
    let b = p.coefficient(&[(0, 4), (1, 2)], &[]) - rat(3) * &a;
    let c = p.coefficient(&[(0, 3), (1, 3)], &[(0, 3), (1, -3)]);
    (reduced_display(&a, &b, &c) == *p).then_some((a, b, c))
}

/// a J³ + b I1 I2 J + c (I1 I2)^{3/2} cos(3(θ1 − θ2)).
pub fn reduced_display(a: &BigRational, b: &BigRational, c: &BigRational) -> PolarHamiltonian {
    let i = |v: usize| PolarHamiltonian::action(&[(v, 1)], rat(1));
    let j = i(0) + i(1);
    (j.clone() * j.clone() * j.clone()) * PolarHamiltonian::action(&[], a.clone())
        + j * i(0) * i(1) * PolarHamiltonian::action(&[], b.clone())
        + PolarHamiltonian::cos_term(&[(0, 3), (1, 3)], &[(0, 3), (1, -3)], c.clone())
}

/// k1 + 2k2 − 2k3 − k4 = 0 and |k1|² + 2|k2|² − 2|k3|² − |k4|² = 0.
pub fn frak_s3_constraint(k: &[LatticePoint; 4]) -> bool {
    let lin = |f: fn(&LatticePoint) -> i64| f(&k[0]) + 2 * f(&k[1]) - 2 * f(&k[2]) - f(&k[3]);
    lin(|p| p.x) == 0 && lin(|p| p.y) == 0 && lin(|p| p.norm2) == 0
}

/// First quadruple of distinct points with |k| ≤ `radius` satisfying the 𝔖⁽³⁾
/// constraint whose set is complete and carries exactly one coupling resonance.
pub fn find_frak_s3(radius: i64) -> Option<[LatticePoint; 4]> {
    let pts: Vec<LatticePoint> = (-radius..=radius).flat_map(|x| (-radius..=radius).map(move |y| LatticePoint::of(x, y))).filter(|p| p.norm2 <= radius * radius).collect();
    for k2 in &pts {
        for k3 in &pts {
            if k2 == k3 {
                continue;
            }
            for k1 in &pts {
                // k4 is forced by the linear condition.
                let k4 = LatticePoint::of(k1.x + 2 * (k2.x - k3.x), k1.y + 2 * (k2.y - k3.y));
                if k4.norm2 > radius * radius {
                    continue;
                }
                let q = [k1.clone(), k2.clone(), k3.clone(), k4];
                let mut d = q.to_vec();
                d.sort();
                d.dedup();
                if d.len() < 4 || !frak_s3_constraint(&q) {
                    continue;
                }
                if is_complete(&q).complete && coupling_terms(&q) == 2 {
                    return Some(q);
                }
            }
        }
    }
    None
}

fn exact_sqrt(q: &BigRational) -> Option<BigRational> {
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// The 𝔖⁽³⁾ Hamiltonian on the invariant subspace J2 = 2J1, J3 = 2J4, written on two
/// effective modes z1, z2 with I1 = J1 + J2, I2 = J3 + J4.
///
/// The conjugate angles are Θ1 = (θ1 + 2θ2)/3, Θ2 = (2θ3 + θ4)/3, so the coupling
/// cos(θ1 + 2θ2 − 2θ3 − θ4) becomes cos(3(Θ1 − Θ2)) = Re(z1³ z̄2³)/(I1 I2)^{3/2}.
/// `None` if the set carries any other coupling.
pub fn frak_s3_reduced(k: &[LatticePoint; 4]) -> Result<Option<PolynomialHamiltonian>, HamiltonianError> {
    let h = restricted_hamiltonian(k)?;
    let p = polar_form(&h, &[0, 1, 2, 3])?;
    // J_v = w_v I_{g_v}
    let group = [0usize, 0, 1, 1];
    let w = [BigRational::new(1.into(), 3.into()), BigRational::new(2.into(), 3.into()), BigRational::new(2.into(), 3.into()), BigRational::new(1.into(), 3.into())];
    let coupling = vec![(0usize, 1i64), (1, 2), (2, -2), (3, -1)];
    let mut out = PolynomialHamiltonian::zero();
    for (key, c) in p.terms() {
        let mut doubled = [0u32; 2];
        let mut w2 = BigRational::one();
        for &(v, hp) in &key.half_powers {
            doubled[group[v]] += hp;
            for _ in 0..hp {
                w2 *= &w[v];
            }
        }
        let Some(factor) = exact_sqrt(&w2) else { return Ok(None) };
        let c = c * factor;
        if key.angle.is_empty() {
            if doubled.iter().any(|d| d % 2 == 1) {
                return Ok(None);
            }
            out.add_term(Monomial::from_factors([(0, doubled[0] / 2, doubled[0] / 2), (1, doubled[1] / 2, doubled[1] / 2)]), c);
        } else if key.angle == coupling && doubled == [3, 3] {
            let half = &c * BigRational::new(1.into(), 2.into());
            out.add_term(Monomial::from_factors([(0, 3, 0), (1, 0, 3)]), half.clone());
            out.add_term(Monomial::from_factors([(0, 0, 3), (1, 3, 0)]), half);
        } else {
            return Ok(None);
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_examples() {
        let k = LatticePoint::of(3, -1);
        assert!(frak_s3_constraint(&[k.clone(), k.clone(), k.clone(), k]));
        assert!(!frak_s3_constraint(&[LatticePoint::of(0, 0), LatticePoint::of(1, 0), LatticePoint::of(0, 1), LatticePoint::of(2, -2)]));
        let q = find_frak_s3(10).expect("an 𝔖⁽³⁾ quadruple with |k| ≤ 10");
        assert!(frak_s3_constraint(&q));
        let r = frak_s3_reduced(&q).unwrap().expect("single coupling");
        assert!(r.is_real() && r.is_gauge_invariant());
    }

    #[test]
    fn s2_configuration_and_reduction() {
        let k = find_frak_s2(3).expect("𝔖⁽²⁾ configuration");
        assert!(is_frak_s2(&k));
        let p = frak_s2_reduced(&k).unwrap();
        let (a, b, c) = frak_s2_coefficients(&p).expect("reduced shape");
        assert_eq!((a, b, c), (rat(31), rat(42), rat(24)));
        assert_eq!(p.angles(), vec![vec![(0, 3), (1, -3)]]);
    }
}
