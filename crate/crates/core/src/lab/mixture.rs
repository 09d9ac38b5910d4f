//! Gaussian-mixture data distribution with a closed-form score.
//!
//! Under the variance-preserving forward process the noisy marginal of a
//! mixture is itself a mixture: component k becomes
//! `N(alpha_t mu_k, (alpha_t^2 s_k^2 + sigma_t^2) I)`, so both the
//! log-density and its gradient are available in closed form.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::space::NoiseSchedule;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Isotropic variance (s^2, not s).
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaussianMixture {
    dim: usize,
    components: Vec<MixtureComponent>,
}

impl GaussianMixture {
    pub fn new(dim: usize, components: Vec<MixtureComponent>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("mixture dimension must be >= 1".into()));
        }
        if components.is_empty() {
            return Err(Error::Config("mixture needs at least one component".into()));
        }
        let mut total = 0.0;
        for (i, c) in components.iter().enumerate() {
            if c.mean.len() != dim {
                return Err(Error::Shape(format!(
                    "component {i} mean has dim {}, mixture dim is {dim}",
                    c.mean.len()
                )));
            }
            if !(c.weight > 0.0) {
                return Err(Error::Config(format!(
                    "component {i} weight must be positive, got {}",
                    c.weight
                )));
            }
            if !(c.variance > 0.0) {
                return Err(Error::Config(format!(
                    "component {i} variance must be positive, got {}",
                    c.variance
                )));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "component weights must sum to 1 (got {total})"
            )));
        }
        Ok(Self { dim, components })
    }

    /// Equal-weight components on a circle of the given radius; the
    /// standard desk-scale multimodal target.
    pub fn ring(n_components: usize, radius: f64, s: f64) -> Result<Self> {
        let w = 1.0 / n_components as f64;
        let components = (0..n_components)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / n_components as f64;
                MixtureComponent {
                    weight: w,
                    mean: vec![radius * angle.cos(), radius * angle.sin()],
                    variance: s * s,
                }
            })
            .collect();
        Self::new(2, components)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    /// Draws one sample from the clean data distribution.
    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        let u: f64 = rng.gen_range(0.0..1.0);
        let mut acc = 0.0;
        let mut chosen = &self.components[self.components.len() - 1];
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                chosen = c;
                break;
            }
        }
        let s = chosen.variance.sqrt();
        chosen
            .mean
            .iter()
            .map(|&m| m + s * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    fn check_xt(&self, x: &[f64], t: f64, ns: &NoiseSchedule) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Shape(format!(
                "point has dim {}, mixture dim is {}",
                x.len(),
                self.dim
            )));
        }
        if !(t > 0.0 && t <= ns.t_max()) {
            return Err(Error::Domain(format!(
                "t = {t} outside (0, {}]",
                ns.t_max()
            )));
        }
        Ok(())
    }

    /// Per-component log weights `log w_k + log N(x; alpha mu_k, v_k I)`.
    fn component_logs(&self, ns: &NoiseSchedule, x: &[f64], t: f64) -> Result<Vec<(f64, f64)>> {
        let (alpha, sigma) = ns.alpha_sigma(t)?;
        self.components
            .iter()
            .map(|c| {
                let v = alpha * alpha * c.variance + sigma * sigma;
                let sq: f64 = x
                    .iter()
                    .zip(&c.mean)
                    .map(|(&xi, &mi)| {
                        let d = xi - alpha * mi;
                        d * d
                    })
                    .sum();
                let log_norm = -0.5 * self.dim as f64 * (2.0 * std::f64::consts::PI * v).ln();
                Ok((c.weight.ln() + log_norm - 0.5 * sq / v, v))
            })
            .collect()
    }

    /// `log q(x_t)` of the noisy marginal at time `t`.
    pub fn log_marginal_density(&self, ns: &NoiseSchedule, x: &[f64], t: f64) -> Result<f64> {
        self.check_xt(x, t, ns)?;
        let logs = self.component_logs(ns, x, t)?;
        let max = logs
            .iter()
            .map(|&(l, _)| l)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|&(l, _)| (l - max).exp()).sum();
        Ok(max + sum.ln())
    }

    /// Closed-form score `grad_x log q(x_t)`, stabilized with log-sum-exp
    /// responsibilities.
    pub fn score(&self, ns: &NoiseSchedule, x: &[f64], t: f64) -> Result<Vec<f64>> {
        self.check_xt(x, t, ns)?;
        let (alpha, _) = ns.alpha_sigma(t)?;
        let logs = self.component_logs(ns, x, t)?;
        let max = logs
            .iter()
            .map(|&(l, _)| l)
            .fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = logs.iter().map(|&(l, _)| (l - max).exp()).sum();
        let mut out = vec![0.0; self.dim];
        for (c, &(l, v)) in self.components.iter().zip(&logs) {
            let resp = (l - max).exp() / total;
            for (o, (&xi, &mi)) in out.iter_mut().zip(x.iter().zip(&c.mean)) {
                *o += resp * (alpha * mi - xi) / v;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_standard() -> GaussianMixture {
        GaussianMixture::new(
            1,
            vec![MixtureComponent {
                weight: 1.0,
                mean: vec![0.0],
                variance: 1.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn standard_gaussian_score_is_negative_x() {
        // mu = 0, s = 1: v = alpha^2 + sigma^2 = 1, score = -x
        let gm = single_standard();
        let ns = NoiseSchedule::default_linear();
        for &t in &[0.05, 0.3, 0.8, 1.0] {
            for &x in &[-2.0, -0.5, 0.0, 1.7] {
                let s = gm.score(&ns, &[x], t).unwrap();
                assert!((s[0] + x).abs() < 1e-12, "t={t} x={x}: {}", s[0]);
            }
        }
    }

    #[test]
    fn symmetric_bimodal_score_vanishes_at_origin() {
        let gm = GaussianMixture::new(
            1,
            vec![
                MixtureComponent {
                    weight: 0.5,
                    mean: vec![-2.0],
                    variance: 0.25,
                },
                MixtureComponent {
                    weight: 0.5,
                    mean: vec![2.0],
                    variance: 0.25,
                },
            ],
        )
        .unwrap();
        let ns = NoiseSchedule::default_linear();
        let s = gm.score(&ns, &[0.0], 0.4).unwrap();
        assert!(s[0].abs() < 1e-12);
    }

    #[test]
    fn score_matches_finite_differences_of_log_density() {
        let gm = GaussianMixture::ring(8, 4.0, 0.3).unwrap();
        let ns = NoiseSchedule::default_linear();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = 1e-5;
        for _ in 0..100 {
            let t = rng.gen_range(0.01..1.0);
            let x = vec![rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)];
            let analytic = gm.score(&ns, &x, t).unwrap();
            for d in 0..2 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[d] += h;
                xm[d] -= h;
                let fd = (gm.log_marginal_density(&ns, &xp, t).unwrap()
                    - gm.log_marginal_density(&ns, &xm, t).unwrap())
                    / (2.0 * h);
                let denom = analytic[d].abs().max(fd.abs()).max(1e-3);
                assert!(
                    ((analytic[d] - fd) / denom).abs() < 1e-6,
                    "t={t} d={d}: analytic {} vs fd {}",
                    analytic[d],
                    fd
                );
            }
        }
    }

    #[test]
    fn t_zero_is_out_of_domain() {
        let gm = single_standard();
        let ns = NoiseSchedule::default_linear();
        assert!(matches!(
            gm.score(&ns, &[0.1], 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ring_mixture_is_normalized() {
        let gm = GaussianMixture::ring(8, 4.0, 0.3).unwrap();
        let total: f64 = gm.components().iter().map(|c| c.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(gm.dim(), 2);
    }

    #[test]
    fn sampling_is_seeded_and_lands_near_modes() {
        let gm = GaussianMixture::ring(8, 4.0, 0.3).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = gm.sample(&mut r1);
            let b = gm.sample(&mut r2);
            assert_eq!(a, b);
            let radius = (a[0] * a[0] + a[1] * a[1]).sqrt();
            assert!((radius - 4.0).abs() < 2.0, "sample far from the ring");
        }
    }
}
