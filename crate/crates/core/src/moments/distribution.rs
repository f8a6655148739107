use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use super::quadrature::integrate;
use crate::data::PointSet;
use crate::error::{ensure_open_unit, ensure_positive, Error, Result};

/// Absolute tolerance of every quadrature oracle.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Fixture distributions with known means and moments.
///
/// Serialized as a JSON object tagged by `kind`, for example
/// `{"kind": "two-point", "low": 0.0, "high": 10.0, "p_high": 0.01}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestDistribution {
    PointMass {
        at: f64,
    },
    /// `high` with probability `p_high`, otherwise `low`.
    TwoPoint {
        low: f64,
        high: f64,
        p_high: f64,
    },
    FiniteDiscrete {
        support: Vec<f64>,
        probs: Vec<f64>,
    },
    /// `center ± L` where `L` is Lomax (Pareto shifted to start at zero)
    /// with tail exponent `shape` and scale `scale`, sign uniform.
    CenteredPareto {
        shape: f64,
        scale: f64,
        center: f64,
    },
    GaussianControl {
        mean: f64,
        sd: f64,
    },
    /// Independent coordinates, each a univariate kind.
    Product {
        coords: Vec<TestDistribution>,
    },
    /// Coordinate `j` is the point mass at 0 when `bits[j]` is false and
    /// `√d/α` with probability `α²/d` (else 0) when true.
    PackingProduct {
        bits: Vec<bool>,
        alpha: f64,
    },
}

impl TestDistribution {
    /// Symmetric heavy-tailed law with tail exponent `k + 1` and
    /// `E|X − center|^k = moment_bound`.
    pub fn centered_pareto(k: f64, moment_bound: f64, center: f64) -> Result<Self> {
        ensure_positive("k", k)?;
        ensure_positive("moment bound", moment_bound)?;
        // E|L|^k = scale^k Γ(k+1)Γ(a−k)/Γ(a), which is scale^k at a = k + 1.
        Ok(TestDistribution::CenteredPareto { shape: k + 1.0, scale: moment_bound.powf(1.0 / k), center })
    }

    pub fn validate(&self) -> Result<()> {
        use TestDistribution::*;
        match self {
            PointMass { at } => finite("point mass location", *at),
            TwoPoint { low, high, p_high } => {
                finite("low", *low)?;
                finite("high", *high)?;
                if !(0.0..=1.0).contains(p_high) {
                    return Err(Error::param(format!("p_high must lie in [0, 1], got {p_high}")));
                }
                Ok(())
            }
            FiniteDiscrete { support, probs } => {
                if support.is_empty() || support.len() != probs.len() {
                    return Err(Error::param("support and probabilities must be nonempty and of equal length"));
                }
                if support.iter().any(|x| !x.is_finite()) || probs.iter().any(|p| !(*p >= 0.0)) {
                    return Err(Error::param("support must be finite and probabilities non-negative"));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::param(format!("probabilities sum to {total}, not 1")));
                }
                Ok(())
            }
            CenteredPareto { shape, scale, center } => {
                ensure_positive("shape", *shape)?;
                ensure_positive("scale", *scale)?;
                finite("center", *center)
            }
            GaussianControl { mean, sd } => {
                finite("mean", *mean)?;
                ensure_positive("sd", *sd)
            }
            Product { coords } => {
                if coords.is_empty() {
                    return Err(Error::param("a product needs at least one coordinate"));
                }
                for c in coords {
                    if !c.is_univariate() {
                        return Err(Error::param("product coordinates must be univariate"));
                    }
                    c.validate()?;
                }
                Ok(())
            }
            PackingProduct { bits, alpha } => {
                if bits.is_empty() {
                    return Err(Error::param("packing instance needs d >= 1"));
                }
                ensure_open_unit("alpha", *alpha)
            }
        }
    }

    pub fn is_univariate(&self) -> bool {
        !matches!(self, TestDistribution::Product { .. } | TestDistribution::PackingProduct { .. })
    }

    pub fn dim(&self) -> usize {
        match self {
            TestDistribution::Product { coords } => coords.len(),
            TestDistribution::PackingProduct { bits, .. } => bits.len(),
            _ => 1,
        }
    }

    pub fn is_discrete(&self) -> bool {
        use TestDistribution::*;
        match self {
            PointMass { .. } | TwoPoint { .. } | FiniteDiscrete { .. } | PackingProduct { .. } => true,
            CenteredPareto { .. } | GaussianControl { .. } => false,
            Product { coords } => coords.iter().all(TestDistribution::is_discrete),
        }
    }

    /// Per-coordinate laws of a product (a univariate law is its own single
    /// coordinate).
    pub fn coordinates(&self) -> Vec<TestDistribution> {
        match self {
            TestDistribution::Product { coords } => coords.clone(),
            TestDistribution::PackingProduct { bits, alpha } => {
                let d = bits.len() as f64;
                bits.iter()
                    .map(|&b| {
                        if b {
                            TestDistribution::TwoPoint { low: 0.0, high: d.sqrt() / alpha, p_high: alpha * alpha / d }
                        } else {
                            TestDistribution::PointMass { at: 0.0 }
                        }
                    })
                    .collect()
            }
            other => vec![other.clone()],
        }
    }

    /// Atoms `(value, probability)` of a discrete univariate law.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        use TestDistribution::*;
        match self {
            PointMass { at } => Some(vec![(*at, 1.0)]),
            TwoPoint { low, high, p_high } => Some(vec![(*low, 1.0 - p_high), (*high, *p_high)]),
            FiniteDiscrete { support, probs } => Some(support.iter().copied().zip(probs.iter().copied()).collect()),
            _ => None,
        }
    }

    /// Mean of a univariate law.
    pub fn mean(&self) -> Result<f64> {
        use TestDistribution::*;
        match self {
            PointMass { at } => Ok(*at),
            TwoPoint { low, high, p_high } => Ok(low + p_high * (high - low)),
            FiniteDiscrete { support, probs } => Ok(support.iter().zip(probs).map(|(x, p)| x * p).sum()),
            CenteredPareto { center, .. } => Ok(*center),
            GaussianControl { mean, .. } => Ok(*mean),
            _ => Err(Error::param("mean() needs a univariate distribution; use mean_vector()")),
        }
    }

    pub fn mean_vector(&self) -> Result<Vec<f64>> {
        self.coordinates().iter().map(TestDistribution::mean).collect()
    }

    /// Closed-form k-th central moment (for products, the supremum over unit
    /// directions, available for k = 2).
    pub fn certified_moment(&self, k: f64) -> Result<f64> {
        ensure_positive("k", k)?;
        use TestDistribution::*;
        match self {
            PointMass { .. } => Ok(0.0),
            TwoPoint { low, high, p_high } => {
                // p(1−p)|h−l|^k ((1−p)^{k−1} + p^{k−1})
                let p = *p_high;
                if p == 0.0 || p == 1.0 {
                    return Ok(0.0);
                }
                let gap = (high - low).abs();
                Ok(p * (1.0 - p) * gap.powf(k) * ((1.0 - p).powf(k - 1.0) + p.powf(k - 1.0)))
            }
            FiniteDiscrete { .. } => self.kth_central_moment(k),
            CenteredPareto { shape, scale, .. } => {
                if *shape <= k {
                    return Err(Error::DivergentMoment { k, shape: *shape });
                }
                Ok((k * scale.ln() + ln_gamma(k + 1.0) + ln_gamma(shape - k) - ln_gamma(*shape)).exp())
            }
            GaussianControl { sd, .. } => {
                Ok((k * sd.ln() + 0.5 * k * 2f64.ln() + ln_gamma(0.5 * (k + 1.0))).exp() / std::f64::consts::PI.sqrt())
            }
            Product { .. } | PackingProduct { .. } => self.directional_moment(k, TestDistribution::certified_moment),
        }
    }

    /// k-th central moment computed directly: exact sums over atoms for
    /// discrete kinds and adaptive quadrature for continuous ones.
    pub fn kth_central_moment(&self, k: f64) -> Result<f64> {
        ensure_positive("k", k)?;
        use TestDistribution::*;
        match self {
            CenteredPareto { shape, scale, .. } => {
                if *shape <= k {
                    return Err(Error::DivergentMoment { k, shape: *shape });
                }
                let (a, lam) = (*shape, *scale);
                // y = λ t/(1−t) maps [0, 1) onto the half line.
                let integrand = |t: f64| {
                    let y = lam * t / (1.0 - t);
                    let density = a * lam.powf(a) / (lam + y).powf(a + 1.0);
                    y.powf(k) * density * lam / ((1.0 - t) * (1.0 - t))
                };
                integrate(integrand, 0.0, 1.0, QUADRATURE_TOL)
            }
            GaussianControl { sd, .. } => {
                let s = *sd;
                let integrand = |t: f64| {
                    let y = s * t / (1.0 - t);
                    let density = (-0.5 * (y / s).powi(2)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
                    2.0 * y.powf(k) * density * s / ((1.0 - t) * (1.0 - t))
                };
                integrate(integrand, 0.0, 1.0, QUADRATURE_TOL)
            }
            Product { .. } | PackingProduct { .. } => self.directional_moment(k, TestDistribution::kth_central_moment),
            _ => {
                let atoms = self.atoms().expect("discrete kinds have atoms");
                let mu = self.mean()?;
                Ok(atoms.iter().map(|(x, p)| p * (x - mu).abs().powf(k)).sum())
            }
        }
    }

    fn directional_moment(&self, k: f64, per_coord: fn(&TestDistribution, f64) -> Result<f64>) -> Result<f64> {
        if k != 2.0 {
            return Err(Error::Unsupported(format!(
                "directional moments of product laws are only certified for k = 2, not k = {k}"
            )));
        }
        // Independent coordinates: sup_v E⟨X−μ, v⟩² is the largest variance.
        self.coordinates().iter().try_fold(0.0f64, |acc, c| Ok(acc.max(per_coord(c, 2.0)?)))
    }

    /// P(X > x) of a univariate law.
    pub fn survival(&self, x: f64) -> Result<f64> {
        use TestDistribution::*;
        match self {
            CenteredPareto { shape, scale, center } => {
                let tail = |y: f64| 0.5 * (scale / (scale + y)).powf(*shape);
                Ok(if x >= *center { tail(x - center) } else { 1.0 - tail(center - x) })
            }
            GaussianControl { mean, sd } => Ok(0.5 * erfc((x - mean) / (sd * std::f64::consts::SQRT_2))),
            _ => match self.atoms() {
                Some(atoms) => Ok(atoms.iter().filter(|(v, _)| *v > x).map(|(_, p)| p).sum()),
                None => Err(Error::param("survival() needs a univariate distribution")),
            },
        }
    }

    /// `n` draws from a univariate law.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        use TestDistribution::*;
        let mut out = Vec::with_capacity(n);
        match self {
            PointMass { at } => out.resize(n, *at),
            TwoPoint { low, high, p_high } => {
                out.extend((0..n).map(|_| if rng.random::<f64>() < *p_high { *high } else { *low }))
            }
            FiniteDiscrete { support, probs } => {
                let mut cumulative: Vec<f64> = probs
                    .iter()
                    .scan(0.0, |acc, p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect();
                *cumulative.last_mut().expect("nonempty support") = f64::INFINITY;
                out.extend((0..n).map(|_| {
                    let u: f64 = rng.random();
                    support[cumulative.partition_point(|&c| c <= u)]
                }))
            }
            CenteredPareto { shape, scale, center } => out.extend((0..n).map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                let magnitude = scale * (u.powf(-1.0 / shape) - 1.0);
                if rng.random::<bool>() {
                    center + magnitude
                } else {
                    center - magnitude
                }
            })),
            GaussianControl { mean, sd } => out.extend((0..n).map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            })),
            Product { .. } | PackingProduct { .. } => {
                return Err(Error::param("sample() needs a univariate distribution; use sample_points()"))
            }
        }
        Ok(out)
    }

    /// `n` draws as a point set of dimension [`dim`](Self::dim).
    pub fn sample_points<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<PointSet> {
        if self.is_univariate() {
            return PointSet::new(1, self.sample(n, rng)?);
        }
        let coords = self.coordinates();
        let d = coords.len();
        let mut values = vec![0.0; n * d];
        for (axis, c) in coords.iter().enumerate() {
            let column = c.sample(n, rng)?;
            for (i, v) in column.into_iter().enumerate() {
                values[i * d + axis] = v;
            }
        }
        PointSet::new(d, values)
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be finite, got {v}")))
    }
}

/// `E[clamp(X, center − radius, center + radius)]` for a univariate law:
/// exact over atoms, otherwise `lo + ∫_lo^hi P(X > x) dx` by quadrature.
pub fn truncated_mean_oracle(dist: &TestDistribution, center: f64, radius: f64) -> Result<f64> {
    ensure_positive("radius", radius)?;
    if !dist.is_univariate() {
        return Err(Error::param("truncated_mean_oracle needs a univariate distribution"));
    }
    let (lo, hi) = (center - radius, center + radius);
    if let Some(atoms) = dist.atoms() {
        return Ok(atoms.iter().map(|(x, p)| p * x.clamp(lo, hi)).sum());
    }
    // Split at the law's center, where a Lomax-type density has a cusp.
    let mid = dist.mean()?.clamp(lo, hi);
    let s = |x: f64| dist.survival(x).expect("univariate survival");
    Ok(lo + integrate(s, lo, mid, QUADRATURE_TOL)? + integrate(s, mid, hi, QUADRATURE_TOL)?)
}

/// `E[trunc(X)]` where points outside the closed ball `B(center, radius)`
/// are replaced by the true mean. Exact enumeration over the support of a
/// discrete product law.
pub fn trunc_replace_mean_oracle(dist: &TestDistribution, center: &[f64], radius: f64) -> Result<Vec<f64>> {
    ensure_positive("radius", radius)?;
    let coords = dist.coordinates();
    if center.len() != coords.len() {
        return Err(Error::param("center dimension does not match the distribution"));
    }
    let atoms: Vec<Vec<(f64, f64)>> = coords
        .iter()
        .map(|c| c.atoms().ok_or_else(|| Error::Unsupported("enumeration needs discrete coordinates".into())))
        .collect::<Result<_>>()?;
    let support: f64 = atoms.iter().map(|a| a.len() as f64).product();
    if support > (1u64 << 20) as f64 {
        return Err(Error::Unsupported(format!("product support of {support} atoms is too large to enumerate")));
    }
    let mu = dist.mean_vector()?;
    let d = coords.len();
    let mut out = vec![0.0; d];
    let mut index = vec![0usize; d];
    let mut point = vec![0.0; d];
    loop {
        let mut prob = 1.0;
        for j in 0..d {
            let (v, p) = atoms[j][index[j]];
            point[j] = v;
            prob *= p;
        }
        let dist2: f64 = point.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
        let kept = if dist2.sqrt() <= radius { &point } else { &mu };
        for j in 0..d {
            out[j] += prob * kept[j];
        }
        // odometer increment
        let mut j = 0;
        loop {
            if j == d {
                return Ok(out);
            }
            index[j] += 1;
            if index[j] < atoms[j].len() {
                break;
            }
            index[j] = 0;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn point_mass_has_zero_moments() {
        let d = TestDistribution::PointMass { at: 3.0 };
        for k in [2.0, 3.0, 4.5] {
            assert_eq!(d.kth_central_moment(k).unwrap(), 0.0);
            assert_eq!(d.certified_moment(k).unwrap(), 0.0);
        }
    }

    #[test]
    fn pareto_calibration_by_quadrature() {
        for k in [2.0, 3.0, 4.0, 2.5] {
            let d = TestDistribution::centered_pareto(k, 1.0, 0.0).unwrap();
            let q = d.kth_central_moment(k).unwrap();
            assert!((q - 1.0).abs() < 1e-4, "k={k}: {q}");
            assert!((d.certified_moment(k).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pareto_lower_orders_agree_across_routes() {
        let d = TestDistribution::CenteredPareto { shape: 5.0, scale: 2.0, center: 1.0 };
        for k in [1.0, 2.0, 3.5] {
            let (a, b) = (d.certified_moment(k).unwrap(), d.kth_central_moment(k).unwrap());
            assert!((a - b).abs() <= 1e-4 * a, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn divergent_pareto_moment_is_an_error() {
        let d = TestDistribution::CenteredPareto { shape: 2.0, scale: 1.0, center: 0.0 };
        assert!(matches!(d.kth_central_moment(2.0), Err(Error::DivergentMoment { .. })));
        assert!(matches!(d.certified_moment(3.0), Err(Error::DivergentMoment { .. })));
    }

    #[test]
    fn gaussian_moments_agree_across_routes() {
        let d = TestDistribution::GaussianControl { mean: -2.0, sd: 1.5 };
        assert!((d.certified_moment(2.0).unwrap() - 2.25).abs() < 1e-12);
        for k in [2.0, 3.0, 4.0] {
            let (a, b) = (d.certified_moment(k).unwrap(), d.kth_central_moment(k).unwrap());
            assert!((a - b).abs() <= 1e-4 * a, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn two_point_closed_form_matches_atom_sum() {
        let d = TestDistribution::TwoPoint { low: 0.0, high: 10.0, p_high: 0.01 };
        assert!((d.kth_central_moment(2.0).unwrap() - 0.99).abs() < 1e-12);
        for k in [2.0, 3.0, 4.0] {
            let (a, b) = (d.certified_moment(k).unwrap(), d.kth_central_moment(k).unwrap());
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn truncated_mean_of_discrete_law() {
        let d = TestDistribution::TwoPoint { low: 0.0, high: 10.0, p_high: 0.01 };
        assert!((truncated_mean_oracle(&d, 0.0, 5.0).unwrap() - 0.05).abs() < 1e-15);
        // fully inside: identity
        assert!((truncated_mean_oracle(&d, 5.0, 6.0).unwrap() - d.mean().unwrap()).abs() < 1e-15);
    }

    #[test]
    fn truncated_mean_of_continuous_law() {
        let g = TestDistribution::GaussianControl { mean: 0.0, sd: 1.0 };
        // symmetric clamp of a symmetric law
        assert!(truncated_mean_oracle(&g, 0.0, 1.0).unwrap().abs() < 1e-9);
        // one-sided: E[max(X, 0)] for X ~ N(0,1) with a far upper clamp = 1/√(2π)
        let v = truncated_mean_oracle(&g, 20.0, 20.0).unwrap();
        assert!((v - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9, "{v}");
        let p = TestDistribution::centered_pareto(2.0, 1.0, 0.0).unwrap();
        let wide = truncated_mean_oracle(&p, 1.0, 1e6).unwrap();
        assert!(wide.abs() < 1e-5, "{wide}");
    }

    #[test]
    fn truncation_converges_monotonically_on_discrete_laws() {
        let d =
            TestDistribution::FiniteDiscrete { support: vec![-3.0, 0.0, 1.0, 40.0], probs: vec![0.2, 0.5, 0.29, 0.01] };
        let mu = d.mean().unwrap();
        // Once the lower clamp is inactive only the upper tail is cut, so the
        // bias shrinks monotonically.
        let mut last = f64::INFINITY;
        for radius in [3.2, 5.0, 10.0, 20.0, 39.0, 50.0, 100.0] {
            let gap = (truncated_mean_oracle(&d, mu, radius).unwrap() - mu).abs();
            assert!(gap <= last + 1e-15);
            last = gap;
        }
        assert!(last < 1e-14);
    }

    #[test]
    fn sampling_matches_means() {
        let mut rng = seeded(5);
        let n = 1_000_000;
        for d in [
            TestDistribution::PointMass { at: 2.0 },
            TestDistribution::TwoPoint { low: 0.0, high: 10.0, p_high: 0.01 },
            TestDistribution::FiniteDiscrete { support: vec![-1.0, 0.5, 3.0], probs: vec![0.3, 0.5, 0.2] },
            TestDistribution::centered_pareto(3.0, 1.0, 1.5).unwrap(),
            TestDistribution::GaussianControl { mean: -1.0, sd: 2.0 },
        ] {
            let xs = d.sample(n, &mut rng).unwrap();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let sd = d.certified_moment(2.0).unwrap().sqrt();
            let tol = (4.0 * sd / (n as f64).sqrt()).max(1e-12);
            assert!((mean - d.mean().unwrap()).abs() <= tol, "{d:?}: {mean}");
        }
    }

    #[test]
    fn product_sampling_and_moments() {
        let d = TestDistribution::Product {
            coords: vec![
                TestDistribution::TwoPoint { low: 0.0, high: 10.0, p_high: 0.01 },
                TestDistribution::GaussianControl { mean: 1.0, sd: 0.5 },
            ],
        };
        assert_eq!(d.dim(), 2);
        assert_eq!(d.mean_vector().unwrap(), vec![0.1, 1.0]);
        assert!((d.certified_moment(2.0).unwrap() - 0.99).abs() < 1e-12);
        assert!(matches!(d.certified_moment(3.0), Err(Error::Unsupported(_))));
        let pts = d.sample_points(10, &mut seeded(1)).unwrap();
        assert_eq!((pts.len(), pts.dim()), (10, 2));
    }

    #[test]
    fn json_round_trip() {
        let d = TestDistribution::TwoPoint { low: 0.0, high: 10.0, p_high: 0.01 };
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"kind":"two-point","low":0.0,"high":10.0,"p_high":0.01}"#);
        let p: TestDistribution =
            serde_json::from_str(r#"{"kind":"packing-product","bits":[true,false],"alpha":0.5}"#).unwrap();
        assert_eq!(p.dim(), 2);
    }

    #[test]
    fn replace_truncation_oracle() {
        let d = TestDistribution::Product {
            coords: vec![TestDistribution::TwoPoint { low: 0.0, high: 10.0, p_high: 0.1 }; 2],
        };
        // ball of radius 5 at the origin keeps only (0, 0); everything else maps to μ = (1, 1)
        let m = trunc_replace_mean_oracle(&d, &[0.0, 0.0], 5.0).unwrap();
        let expected = 1.0 - 0.81;
        assert!((m[0] - expected).abs() < 1e-12 && (m[1] - expected).abs() < 1e-12);
        let full = trunc_replace_mean_oracle(&d, &[0.0, 0.0], 100.0).unwrap();
        assert!((full[0] - 1.0).abs() < 1e-12);
    }
}
