//! Exact polynomials in complex variables and their conjugates.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Π β_v^{p_v} β̄_v^{q_v}, stored as (v, p_v, q_v) sorted by v with (p, q) ≠ (0, 0).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(usize, u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_factors<I: IntoIterator<Item = (usize, u32, u32)>>(factors: I) -> Self {
        let mut m: BTreeMap<usize, (u32, u32)> = BTreeMap::new();
        for (v, p, q) in factors {
            let e = m.entry(v).or_insert((0, 0));
            e.0 += p;
            e.1 += q;
        }
        Monomial(m.into_iter().filter(|(_, (p, q))| p + q > 0).map(|(v, (p, q))| (v, p, q)).collect())
    }

    /// β_{i1} β_{i2} β_{i3} β̄_{j1} β̄_{j2} β̄_{j3} style products.
    pub fn from_indices(plain: &[usize], conj: &[usize]) -> Self {
        Self::from_factors(plain.iter().map(|&v| (v, 1, 0)).chain(conj.iter().map(|&v| (v, 0, 1))))
    }

    /// |β_v|^{2e}.
    pub fn action(v: usize, e: u32) -> Self {
        Self::from_factors([(v, e, e)])
    }

    pub fn factors(&self) -> &[(usize, u32, u32)] {
        &self.0
    }

    pub fn degrees(&self) -> (u32, u32) {
        self.0.iter().fold((0, 0), |(a, b), &(_, p, q)| (a + p, b + q))
    }

    pub fn is_gauge_invariant(&self) -> bool {
        let (a, b) = self.degrees();
        a == b
    }

    pub fn conj(&self) -> Self {
        Monomial(self.0.iter().map(|&(v, p, q)| (v, q, p)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_factors(self.0.iter().chain(o.0.iter()).copied())
    }

    /// Depends only on the actions |β_v|².
    pub fn is_action_only(&self) -> bool {
        self.0.iter().all(|&(_, p, q)| p == q)
    }

    fn power(&self, v: usize) -> (u32, u32) {
        self.0.iter().find(|f| f.0 == v).map_or((0, 0), |&(_, p, q)| (p, q))
    }

    /// (∂/∂β_v, ∂/∂β̄_v) as (multiplier, monomial).
    fn derivative(&self, v: usize, conj: bool) -> Option<(u32, Monomial)> {
        let (p, q) = self.power(v);
        let k = if conj { q } else { p };
        if k == 0 {
            return None;
        }
        let f = self.0.iter().map(|&(w, a, b)| {
            if w != v {
                (w, a, b)
            } else if conj {
                (w, a, b - 1)
            } else {
                (w, a - 1, b)
            }
        });
        Some((k, Self::from_factors(f)))
    }

    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|f| f.0)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.0.iter().fold(Complex64::one(), |acc, &(v, p, q)| acc * z[v].powu(p) * z[v].conj().powu(q))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|&(v, p, q)| format!("{v}^{p},{q}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Σ c_α m_α with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PolynomialHamiltonian {
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl PolynomialHamiltonian {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut h = Self::zero();
        h.add_term(Monomial::one(), c);
        h
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut h = Self::zero();
        h.add_term(m, c);
        h
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut h = Self::zero();
        for (m, v) in &self.terms {
            h.add_term(m.clone(), v * c);
        }
        h
    }

    pub fn conj(&self) -> Self {
        let mut h = Self::zero();
        for (m, v) in &self.terms {
            h.add_term(m.conj(), v.clone());
        }
        h
    }

    /// Real-valued: invariant under conjugation of every monomial.
    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn is_gauge_invariant(&self) -> bool {
        self.terms.keys().all(Monomial::is_gauge_invariant)
    }

    /// Common total degree (plain + conjugate) of all monomials, if uniform.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| {
            let (a, b) = m.degrees();
            a + b
        });
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().flat_map(|m| m.variables().collect::<Vec<_>>()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Replaces each variable v by `map(v)` (several variables may merge).
    pub fn substitute(&self, map: impl Fn(usize) -> usize) -> Self {
        let mut h = Self::zero();
        for (m, c) in &self.terms {
            h.add_term(Monomial::from_factors(m.factors().iter().map(|&(v, p, q)| (map(v), p, q))), c.clone());
        }
        h
    }

    pub fn derivative(&self, v: usize, conj: bool) -> Self {
        let mut h = Self::zero();
        for (m, c) in &self.terms {
            if let Some((k, d)) = m.derivative(v, conj) {
                h.add_term(d, c * rat(k as i64));
            }
        }
        h
    }

    /// Σ_v (∂F/∂β_v ∂G/∂β̄_v − ∂F/∂β̄_v ∂G/∂β_v); the Poisson bracket up to the factor ±i.
    pub fn bracket(&self, g: &Self) -> Self {
        let mut vars = self.variables();
        vars.extend(g.variables());
        vars.sort_unstable();
        vars.dedup();
        let mut out = Self::zero();
        for v in vars {
            out = out + self.derivative(v, false) * g.derivative(v, true) - self.derivative(v, true) * g.derivative(v, false);
        }
        out
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| m.eval(z) * c.to_f64().unwrap_or(f64::NAN)).sum()
    }

    /// Plain-text export, one `coeff : v^p,q ...` line per monomial.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            let _ = writeln!(out, "{} : {}", fmt_q(c), m);
        }
        out
    }
}

pub fn fmt_q(c: &BigRational) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for PolynomialHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            write!(f, "{}{}{}[{}]", if i > 0 { " " } else { "" }, sign, fmt_q(&c.abs()), m)?;
        }
        Ok(())
    }
}

impl Add for PolynomialHamiltonian {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (m, c) in o.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Neg for PolynomialHamiltonian {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&rat(-1))
    }
}

impl Sub for PolynomialHamiltonian {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for PolynomialHamiltonian {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut h = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                h.add_term(a.mul(b), ca * cb);
            }
        }
        h
    }
}

/// Σ_v |β_v|² over the given variables.
pub fn mass(vars: impl IntoIterator<Item = usize>) -> PolynomialHamiltonian {
    let mut h = PolynomialHamiltonian::zero();
    for v in vars {
        h.add_term(Monomial::action(v, 1), rat(1));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_canonical_form() {
        let a = Monomial::from_indices(&[2, 0, 0], &[1, 1, 2]);
        assert_eq!(a.factors(), &[(0, 2, 0), (1, 0, 2), (2, 1, 1)]);
        assert!(a.is_gauge_invariant());
        assert_eq!(a.conj().conj(), a);
        assert_eq!(a.to_string(), "0^2,0 1^0,2 2^1,1");
    }

    #[test]
    fn cancellation_and_bracket() {
        let j = mass([0, 1]);
        let h = PolynomialHamiltonian::monomial(Monomial::from_indices(&[0, 0], &[1, 1]), rat(3)) + PolynomialHamiltonian::monomial(Monomial::from_indices(&[1, 1], &[0, 0]), rat(3));
        assert!(h.is_real());
        assert!(j.bracket(&h).is_zero());
        let x = PolynomialHamiltonian::monomial(Monomial::action(0, 1), rat(1));
        assert!(!x.bracket(&h).is_zero());
        assert!((h.clone() - h).is_zero());
    }
}
