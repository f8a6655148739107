use rand::Rng;

use super::distribution::TestDistribution;
use crate::error::{ensure_open_unit, Error, Result};

/// Two laws that are hard to tell apart: the point mass at 0 and
/// `τ w.p. p` (else 0) with `p = α^{k/(k−1)}`, `τ = α/p`. Their means differ
/// by exactly α and both have k-th central moment at most 1.
pub fn two_point_hard_instance(alpha: f64, k: f64) -> Result<(TestDistribution, TestDistribution)> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::param(format!("alpha must lie in (0, 1/2), got {alpha}")));
    }
    if !(k >= 2.0) || !k.is_finite() {
        return Err(Error::param(format!("k must be >= 2, got {k}")));
    }
    let p = alpha.powf(k / (k - 1.0));
    let tau = alpha / p;
    Ok((TestDistribution::PointMass { at: 0.0 }, TestDistribution::TwoPoint { low: 0.0, high: tau, p_high: p }))
}

/// Product law whose coordinate `j` is `√d/α w.p. α²/d` (else 0) when
/// `bits[j]` is set and the point mass at 0 otherwise.
pub fn packing_product_instance(bits: &[bool], alpha: f64) -> Result<TestDistribution> {
    ensure_open_unit("alpha", alpha)?;
    if bits.is_empty() {
        return Err(Error::param("packing instance needs d >= 1"));
    }
    Ok(TestDistribution::PackingProduct { bits: bits.to_vec(), alpha })
}

/// A random finite-discrete law with exactly unit k-th central moment:
/// a few bulk atoms plus rare far atoms, rescaled about the mean.
pub fn random_unit_moment_discrete<R: Rng + ?Sized>(k: f64, rng: &mut R) -> Result<TestDistribution> {
    let atoms = rng.random_range(2..=8usize);
    let heavy = rng.random_range(0..=atoms.min(3) - 1);
    let mut support = Vec::with_capacity(atoms);
    let mut weights = Vec::with_capacity(atoms);
    for i in 0..atoms {
        if i < heavy {
            let p = 10f64.powf(rng.random_range(-4.0..-1.0));
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            support.push(sign * p.powf(-1.0 / k) * rng.random_range(0.5..1.5));
            weights.push(p);
        } else {
            support.push(rng.random_range(-2.0..2.0));
            weights.push(rng.random_range(0.1..1.0));
        }
    }
    let heavy_mass: f64 = weights[..heavy].iter().sum();
    let bulk_mass: f64 = weights[heavy..].iter().sum();
    let scale = (1.0 - heavy_mass) / bulk_mass;
    for w in &mut weights[heavy..] {
        *w *= scale;
    }
    let raw = TestDistribution::FiniteDiscrete { support: support.clone(), probs: weights.clone() };
    let mu = raw.mean()?;
    let moment = raw.kth_central_moment(k)?;
    if !(moment > 0.0) {
        return Err(Error::param("degenerate random law"));
    }
    let shrink = moment.powf(-1.0 / k);
    let shift = rng.random_range(-3.0..3.0);
    let support = support.iter().map(|x| shift + mu + (x - mu) * shrink).collect();
    Ok(TestDistribution::FiniteDiscrete { support, probs: weights })
}
