//! Action–angle form of gauge-invariant polynomial Hamiltonians.
//!
//! With β_v = √I_v e^{iθ_v}, a monomial Π β^p β̄^q becomes Π I^{(p+q)/2} e^{i(p−q)·θ};
//! pairing it with its conjugate gives a cosine.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::poly::{fmt_q, ratio, PolynomialHamiltonian};
use super::restricted::HamiltonianError;

/// Key of a polar term: doubled exponents of the actions and the angle vector m.
/// The angle vector is canonical: empty, or with its first entry positive.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PolarKey {
    pub half_powers: Vec<(usize, u32)>,
    pub angle: Vec<(usize, i64)>,
}

/// Σ c · Π I_v^{h_v/2} · cos(m·θ).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PolarHamiltonian {
    terms: BTreeMap<PolarKey, BigRational>,
}

fn merge_powers(a: &[(usize, u32)], b: &[(usize, u32)]) -> Vec<(usize, u32)> {
    let mut m: BTreeMap<usize, u32> = BTreeMap::new();
    for &(v, e) in a.iter().chain(b) {
        *m.entry(v).or_insert(0) += e;
    }
    m.into_iter().collect()
}

fn merge_angles(a: &[(usize, i64)], b: &[(usize, i64)], sign: i64) -> Vec<(usize, i64)> {
    let mut m: BTreeMap<usize, i64> = a.iter().copied().collect();
    for &(v, e) in b {
        *m.entry(v).or_insert(0) += sign * e;
    }
    m.into_iter().filter(|e| e.1 != 0).collect()
}

fn canonical_angle(mut a: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    if a.first().is_some_and(|f| f.1 < 0) {
        for e in &mut a {
            e.1 = -e.1;
        }
    }
    a
}

impl PolarHamiltonian {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, half_powers: Vec<(usize, u32)>, angle: Vec<(usize, i64)>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let mut half_powers: Vec<_> = half_powers.into_iter().filter(|e| e.1 > 0).collect();
        half_powers.sort_unstable();
        let mut angle: Vec<_> = angle.into_iter().filter(|e| e.1 != 0).collect();
        angle.sort_unstable();
        let angle = canonical_angle(angle);
        let key = PolarKey { half_powers, angle };
        let e = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// c · Π I_v^{e_v} (integer exponents).
    pub fn action(powers: &[(usize, u32)], c: BigRational) -> Self {
        let mut h = Self::zero();
        h.add_term(powers.iter().map(|&(v, e)| (v, 2 * e)).collect(), Vec::new(), c);
        h
    }

    /// c · Π I_v^{h_v/2} cos(m·θ).
    pub fn cos_term(half_powers: &[(usize, u32)], angle: &[(usize, i64)], c: BigRational) -> Self {
        let mut h = Self::zero();
        h.add_term(half_powers.to_vec(), angle.to_vec(), c);
        h
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolarKey, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_angle_free(&self) -> bool {
        self.terms.keys().all(|k| k.angle.is_empty())
    }

    /// Distinct angle vectors occurring with nonzero coefficient.
    pub fn angles(&self) -> Vec<Vec<(usize, i64)>> {
        let mut a: Vec<_> = self.terms.keys().map(|k| k.angle.clone()).filter(|a| !a.is_empty()).collect();
        a.sort();
        a.dedup();
        a
    }

    pub fn coefficient(&self, half_powers: &[(usize, u32)], angle: &[(usize, i64)]) -> BigRational {
        let key = PolarKey { half_powers: half_powers.to_vec(), angle: canonical_angle(angle.to_vec()) };
        self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, actions: &[f64], angles: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let mag: f64 = k.half_powers.iter().map(|&(v, h)| actions[v].powf(h as f64 / 2.0)).product();
                let arg: f64 = k.angle.iter().map(|&(v, m)| m as f64 * angles[v]).sum();
                c.to_f64().unwrap_or(f64::NAN) * mag * arg.cos()
            })
            .sum()
    }

    fn scale(&self, c: &BigRational) -> Self {
        let mut h = Self::zero();
        for (k, v) in &self.terms {
            h.add_term(k.half_powers.clone(), k.angle.clone(), v * c);
        }
        h
    }
}

impl Add for PolarHamiltonian {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (k, c) in o.terms {
            self.add_term(k.half_powers, k.angle, c);
        }
        self
    }
}

impl Sub for PolarHamiltonian {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(&ratio(-1, 1))
    }
}

/// Products via cos a · cos b = (cos(a+b) + cos(a−b))/2.
impl Mul for PolarHamiltonian {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut h = Self::zero();
        let half = ratio(1, 2);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let hp = merge_powers(&a.half_powers, &b.half_powers);
                let c = ca * cb;
                if a.angle.is_empty() || b.angle.is_empty() {
                    let ang = if a.angle.is_empty() { b.angle.clone() } else { a.angle.clone() };
                    h.add_term(hp, ang, c);
                } else {
                    let plus = merge_angles(&a.angle, &b.angle, 1);
                    let minus = merge_angles(&a.angle, &b.angle, -1);
                    h.add_term(hp.clone(), plus, &c * &half);
                    h.add_term(hp, minus, c * &half);
                }
            }
        }
        h
    }
}

impl fmt::Display for PolarHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            write!(f, "{}{}{}", if i > 0 { " " } else { "" }, sign, fmt_q(&c.abs()))?;
            for &(v, h) in &k.half_powers {
                if h % 2 == 0 {
                    write!(f, " I{v}^{}", h / 2)?;
                } else {
                    write!(f, " I{v}^{h}/2")?;
                }
            }
            if !k.angle.is_empty() {
                let parts: Vec<String> = k.angle.iter().map(|(v, m)| format!("{m}θ{v}")).collect();
                write!(f, " cos({})", parts.join("+"))?;
            }
        }
        Ok(())
    }
}

/// Rewrites `h` in action–angle variables on the modes listed in `modes`; every other
/// variable is set to zero. Variable `modes[i]` becomes (I_i, θ_i).
pub fn polar_form(h: &PolynomialHamiltonian, modes: &[usize]) -> Result<PolarHamiltonian, HamiltonianError> {
    if let Some((m, _)) = h.terms().find(|(m, _)| !m.is_gauge_invariant()) {
        return Err(HamiltonianError::NotGaugeInvariant(m.to_string()));
    }
    if !h.is_real() {
        return Err(HamiltonianError::NotReal);
    }
    let pos: BTreeMap<usize, usize> = modes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = PolarHamiltonian::zero();
    for (m, c) in h.terms() {
        if !m.variables().all(|v| pos.contains_key(&v)) {
            continue;
        }
        let hp: Vec<(usize, u32)> = m.factors().iter().map(|&(v, p, q)| (pos[&v], p + q)).collect();
        let mut angle: Vec<(usize, i64)> = m.factors().iter().map(|&(v, p, q)| (pos[&v], p as i64 - q as i64)).filter(|e| e.1 != 0).collect();
        angle.sort();
        match angle.first() {
            None => out.add_term(hp, angle, c.clone()),
            // The conjugate monomial carries the same coefficient; fold both into 2c·cos.
            Some(&(_, s)) if s > 0 => out.add_term(hp, angle, c * ratio(2, 1)),
            Some(_) => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::poly::{rat, Monomial};
    use crate::hamiltonian::restricted::{action_hamiltonian, two_generation_3h};

    fn j() -> PolarHamiltonian {
        PolarHamiltonian::action(&[(0, 1)], rat(1)) + PolarHamiltonian::action(&[(1, 1)], rat(1))
    }

    #[test]
    fn two_generation_display() {
        for n in [2i64, 3, 8, 16] {
            let got = polar_form(&two_generation_3h(n as usize), &[0, 1]).unwrap();
            let i1i2 = PolarHamiltonian::action(&[(0, 1), (1, 1)], rat(1));
            let bracket = PolarHamiltonian::action(&[], rat(3 * n - 2)) + PolarHamiltonian::cos_term(&[], &[(0, 2), (1, -2)], rat(6 * (n - 1)));
            let want = (j() * j() * j()) * PolarHamiltonian::action(&[], rat(4 - 9 * n)) + j() * i1i2 * bracket * PolarHamiltonian::action(&[], rat(6));
            assert_eq!(got, want, "n = {n}");
        }
    }

    #[test]
    fn action_only_is_angle_free() {
        let p = polar_form(&action_hamiltonian(4), &[0, 1, 2, 3]).unwrap();
        assert!(p.is_angle_free());
        assert_eq!(p.coefficient(&[(0, 6)], &[]), ratio(1, 3));
    }

    #[test]
    fn rejects_unbalanced() {
        let h = PolynomialHamiltonian::monomial(Monomial::from_indices(&[0, 0], &[1]), rat(1));
        assert!(matches!(polar_form(&h, &[0, 1]), Err(HamiltonianError::NotGaugeInvariant(_))));
        let h = PolynomialHamiltonian::monomial(Monomial::from_indices(&[0], &[1]), rat(1));
        assert_eq!(polar_form(&h, &[0, 1]), Err(HamiltonianError::NotReal));
    }

    #[test]
    fn numerical_agreement() {
        use num_complex::Complex64;
        let h = two_generation_3h(5);
        let p = polar_form(&h, &[0, 1]).unwrap();
        let (i, th): ([f64; 2], [f64; 2]) = ([0.3, 0.55], [0.4, -1.1]);
        let z: Vec<Complex64> = (0..2).map(|k| Complex64::from_polar(i[k].sqrt(), th[k])).collect();
        assert!((h.eval(&z).re - p.eval(&i, &th)).abs() < 1e-12);
    }
}
