//! Sobolev weights per generation, the norm-explosion test and the target-driven build.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::model::build_combinatorial_model;
use super::placement::{dilation_for_size, perturb_to_nondegenerate, PerturbConfig, PlacementError, Strategy};
use crate::numeric::DoubleDouble;
use crate::resonance::{Certificate, ExactInt, GenerationSet};

/// Natural log of a positive integer in double-double precision.
pub fn ln_bigint(x: &BigInt) -> DoubleDouble {
    assert!(x.sign() == Sign::Plus, "logarithm of a non-positive integer");
    let bits = x.bits();
    let shift = bits.saturating_sub(100);
    let m = x >> shift;
    let m = m.to_u128().expect("100-bit mantissa");
    let hi = m as f64;
    let lo = (m as i128 - hi as i128) as f64;
    let mant = DoubleDouble::from_sum(hi, lo);
    mant.ln() + DoubleDouble::from_f64(shift as f64) * crate::numeric::dd::DD_LN2
}

/// log 𝔍_g = log Σ_{k ∈ S_g} |k|^{2s}, or `None` if the generation sits at the origin.
pub fn log_weight<Z: ExactInt>(set: &GenerationSet<Z>, g: usize, s: f64) -> Option<DoubleDouble> {
    let sd = DoubleDouble::from_f64(s);
    let logs: Vec<DoubleDouble> = set
        .generation(g)
        .iter()
        .map(|&v| set.points()[v].norm2.to_bigint())
        .filter(|n| !n.is_zero())
        .map(|n| sd * ln_bigint(&n))
        .collect();
    let max = logs.iter().copied().fold(None, |m: Option<DoubleDouble>, x| Some(m.map_or(x, |m| if x > m { x } else { m })))?;
    let sum = logs.iter().fold(DoubleDouble::from_f64(0.0), |acc, &l| acc + (l - max).exp());
    Some(max + sum.ln())
}

/// Per-generation weights 𝔍_i, stored as logarithms.
#[derive(Clone, Debug)]
pub struct SobolevWeights {
    pub s: f64,
    pub log_weights: Vec<Option<DoubleDouble>>,
}

impl SobolevWeights {
    pub fn of<Z: ExactInt>(set: &GenerationSet<Z>, s: f64) -> Self {
        SobolevWeights { s, log_weights: (1..=set.n_generations()).map(|g| log_weight(set, g, s)).collect() }
    }

    /// 𝔍_a / 𝔍_b (1-based generations).
    pub fn ratio(&self, a: usize, b: usize) -> Option<DoubleDouble> {
        Some((self.log_weights[a - 1]? - self.log_weights[b - 1]?).exp())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormExplosionError {
    #[error("norm explosion needs N ≥ 6 (found {0})")]
    TooFewGenerations(usize),
    #[error("Sobolev exponent must exceed 1 (found {0})")]
    Exponent(String),
    #[error("generation {0} has zero weight")]
    ZeroWeight(usize),
}

#[derive(Clone, Debug)]
pub struct NormExplosion {
    pub holds: bool,
    /// 𝔍_{N−2} / 𝔍_3.
    pub ratio: DoubleDouble,
    /// ½·2^{(s−1)(N−5)}.
    pub threshold: DoubleDouble,
    /// Whether `holds` was decided in exact integer arithmetic.
    pub exact: bool,
}

/// 𝔍_{N−2} > ½·2^{(s−1)(N−5)}·𝔍_3, exactly when s is an integer, otherwise in double-double.
pub fn check_norm_explosion<Z: ExactInt>(set: &GenerationSet<Z>, s: f64) -> Result<NormExplosion, NormExplosionError> {
    let n = set.n_generations();
    if n < 6 {
        return Err(NormExplosionError::TooFewGenerations(n));
    }
    if !(s > 1.0) || !s.is_finite() {
        return Err(NormExplosionError::Exponent(s.to_string()));
    }
    let w = SobolevWeights::of(set, s);
    let hi = w.log_weights[n - 3].ok_or(NormExplosionError::ZeroWeight(n - 2))?;
    let lo = w.log_weights[2].ok_or(NormExplosionError::ZeroWeight(3))?;
    let ratio = (hi - lo).exp();
    let threshold = (DoubleDouble::from_f64((s - 1.0) * (n as f64 - 5.0)) * crate::numeric::dd::DD_LN2).exp() * DoubleDouble::from_f64(0.5);
    if s.fract() == 0.0 && s < 64.0 {
        let si = s as u32;
        let a = set.weight_exact(n - 2, si);
        let b = set.weight_exact(3, si);
        let lhs = a * BigInt::from(2);
        let rhs = b * (BigInt::one() << ((si - 1) as usize * (n - 5)));
        return Ok(NormExplosion { holds: lhs > rhs, ratio, threshold, exact: true });
    }
    Ok(NormExplosion { holds: ratio > threshold, ratio, threshold, exact: false })
}

/// Σ x_i^{2s} on the sphere Σ x_i² = 1: 1 at a vertex, n^{1−s} at the barycenter.
pub fn power_sum(x: &[f64], s: f64) -> f64 {
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    x.iter().map(|v| (v * v / norm2).powf(s)).sum()
}

/// Smallest N ≥ 6 with 2^{(s−1)(N−5)} ≥ 2K²/δ².
pub fn generations_for_target(k_over_delta: f64, s: f64) -> usize {
    let need = (2.0 * k_over_delta * k_over_delta).log2() / (s - 1.0);
    (5 + need.ceil().max(1.0) as usize).max(6)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificationLevel {
    /// Exhaustive completeness, non-degeneracy and resonant-vector classification.
    Full,
    /// Structural conditions and family identities only (set too large to enumerate).
    Structural,
}

#[derive(Clone, Debug)]
pub struct TargetOutcome {
    pub set: GenerationSet<BigInt>,
    pub n_gen: usize,
    pub ratio: DoubleDouble,
    pub target: f64,
    pub norm_explosion: bool,
    pub dilation: BigInt,
    pub attempts: usize,
    pub level: CertificationLevel,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Error)]
pub enum TargetError {
    #[error("invalid target: {0}")]
    Invalid(String),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    NormExplosion(#[from] NormExplosionError),
    #[error("ratio {ratio:.6e} below target {target:.6e} with N = {n_gen}")]
    Ratio { ratio: f64, target: f64, n_gen: usize },
}

/// Builds an integer generation set with 𝔍_{N−2}/𝔍_3 ≥ K²/δ² and min |k| ≥ R.
pub fn build_for_target(k: f64, delta: f64, min_norm: f64, s: f64, cfg: &PerturbConfig) -> Result<TargetOutcome, TargetError> {
    if !(k > 0.0 && delta > 0.0 && min_norm > 0.0 && s > 1.0) {
        return Err(TargetError::Invalid(format!("need K, δ, R > 0 and s > 1 (K={k}, δ={delta}, R={min_norm}, s={s})")));
    }
    let n_gen = generations_for_target(k / delta, s);
    let model = build_combinatorial_model(n_gen).map_err(PlacementError::from)?;
    let outcome = perturb_to_nondegenerate(&model, cfg)?;
    let (int_set, lcm) = outcome.set.dilate_to_integers(&BigInt::one());
    let min2 = int_set.points().iter().map(|p| p.norm2.clone()).min().unwrap_or_default();
    let base_min = BigRational::new(min2, BigInt::one());
    let m = dilation_for_size(&BigInt::one(), &base_min, min_norm);
    let set = int_set.dilate(&m);
    let ne = check_norm_explosion(&set, s)?;
    let target = (k / delta).powi(2);
    if ne.ratio.to_f64() < target {
        return Err(TargetError::Ratio { ratio: ne.ratio.to_f64(), target, n_gen });
    }
    let level = if outcome.certificate.is_some() { CertificationLevel::Full } else { CertificationLevel::Structural };
    Ok(TargetOutcome {
        set,
        n_gen,
        ratio: ne.ratio,
        target,
        norm_explosion: ne.holds,
        dilation: lcm * m,
        attempts: outcome.attempts,
        level,
        certificate: outcome.certificate,
    })
}

/// Placement configuration that suits the size of the requested model.
pub fn default_config_for(n_gen: usize, seed: u64) -> PerturbConfig {
    let mut cfg = PerturbConfig { seed, ..PerturbConfig::default() };
    if n_gen > 5 {
        cfg.strategy = Strategy::Lattice;
    }
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::model::build_combinatorial_model;
    use crate::builder::placement::prototype_embedding;

    #[test]
    fn ln_of_large_integers() {
        let x = BigInt::from(10).pow(40);
        let l = ln_bigint(&x);
        // 40 ln 10 = 92.10340371976182736...
        assert!((l - DoubleDouble::new(92.10340371976183, -1.577597535927996e-15)).abs().to_f64() < 1e-28);
        assert!((ln_bigint(&BigInt::from(3)) - DoubleDouble::from_f64(3.0).ln()).abs().to_f64() < 1e-31);
    }

    #[test]
    fn generation_count_examples() {
        assert_eq!(generations_for_target(2.0, 2.0), 8);
        assert_eq!(generations_for_target(4.0, 2.0), 10);
    }

    #[test]
    fn prototype_ratio_doubles() {
        let m = build_combinatorial_model(7).unwrap();
        let p = prototype_embedding(&m).unwrap();
        let set = m.table(p.points).unwrap().dilate_to_integers(&BigInt::one()).0;
        let ne = check_norm_explosion(&set, 2.0).unwrap();
        assert!(ne.exact && ne.holds);
        assert!((ne.ratio.to_f64() - 4.0).abs() < 1e-25);
        assert_eq!(ne.threshold.to_f64(), 2.0);
        let w = SobolevWeights::of(&set, 2.5);
        for g in 1..6 {
            let r = w.ratio(g + 1, g).unwrap().to_f64();
            assert!((r - 2f64.powf(1.5)).abs() < 1e-12, "{g}: {r}");
        }
    }
}
