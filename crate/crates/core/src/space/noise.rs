//! Variance-preserving noise schedule and timestep discretization.
//!
//! For the linear-beta schedule, `beta(t) = beta_min + t (beta_max -
//! beta_min)` over `t in [0, 1]`, the signal amplitude is
//!
//!   alpha_t = exp(-t^2 (beta_max - beta_min) / 4 - t beta_min / 2)
//!
//! with `sigma_t = sqrt(1 - alpha_t^2)` (variance preserving) and
//! log-SNR `lambda_t = log(alpha_t / sigma_t)`, strictly decreasing in t.

use crate::{Error, Result};

/// Smallest time at which the log-SNR is evaluated; `lambda` blows up at
/// t = 0, so evaluation clamps to this value.
pub const LAMBDA_T_EPS: f64 = 1e-12;

/// Bisection tolerance (on t) for inverting lambda.
const INVERT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseSchedule {
    beta_min: f64,
    beta_max: f64,
    /// Horizon, normalized to 1.
    t_max: f64,
}

impl NoiseSchedule {
    pub fn linear(beta_min: f64, beta_max: f64) -> Result<Self> {
        if !(beta_min > 0.0 && beta_max > beta_min && beta_max.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < beta_min < beta_max, got ({beta_min}, {beta_max})"
            )));
        }
        Ok(Self {
            beta_min,
            beta_max,
            t_max: 1.0,
        })
    }

    /// The field-standard linear-beta constants.
    pub fn default_linear() -> Self {
        Self::linear(0.1, 20.0).expect("valid constants")
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn beta_min(&self) -> f64 {
        self.beta_min
    }

    pub fn beta_max(&self) -> f64 {
        self.beta_max
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_max).contains(&t) {
            return Err(Error::Domain(format!(
                "t = {t} outside [0, {}]",
                self.t_max
            )));
        }
        Ok(())
    }

    /// Signal and noise magnitudes `(alpha_t, sigma_t)`. Exact at the
    /// endpoints: `(1, 0)` at t = 0.
    pub fn alpha_sigma(&self, t: f64) -> Result<(f64, f64)> {
        self.check_domain(t)?;
        let log_alpha = -0.25 * t * t * (self.beta_max - self.beta_min) - 0.5 * t * self.beta_min;
        let alpha = log_alpha.exp();
        let sigma = (1.0 - alpha * alpha).max(0.0).sqrt();
        Ok((alpha, sigma))
    }

    /// Log signal-to-noise ratio `lambda_t = log(alpha_t / sigma_t)`,
    /// evaluated at `max(t, LAMBDA_T_EPS)` to keep it finite at t = 0.
    pub fn lambda(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let (alpha, sigma) = self.alpha_sigma(t.max(LAMBDA_T_EPS))?;
        Ok((alpha / sigma).ln())
    }

    /// `(alpha, sigma, lambda)` at `t`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        let (alpha, sigma) = self.alpha_sigma(t)?;
        Ok((alpha, sigma, self.lambda(t)?))
    }

    /// Inverts `lambda` by bisection on `[LAMBDA_T_EPS, t_max]`. Targets
    /// outside the attainable range clamp to the nearest endpoint.
    pub fn invert_lambda(&self, target: f64) -> Result<f64> {
        let mut lo = LAMBDA_T_EPS;
        let mut hi = self.t_max;
        let lam_lo = self.lambda(lo)?; // largest lambda (data side)
        let lam_hi = self.lambda(hi)?; // smallest lambda (noise side)
        if target >= lam_lo {
            return Ok(lo);
        }
        if target <= lam_hi {
            return Ok(hi);
        }
        // lambda is strictly decreasing in t
        while hi - lo > INVERT_TOL {
            let mid = 0.5 * (lo + hi);
            if self.lambda(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `n_steps + 1` timesteps whose lambda values are equally spaced
    /// between `lambda(t_start)` and `lambda(t_end)`; endpoints exact.
    /// `t_start` is the noise-side endpoint (`t_start > t_end`).
    pub fn discretize_uniform_logsnr(
        &self,
        n_steps: usize,
        t_start: f64,
        t_end: f64,
    ) -> Result<Vec<f64>> {
        if n_steps == 0 {
            return Err(Error::Config("n_steps must be >= 1".into()));
        }
        if !(t_start > t_end && t_end >= LAMBDA_T_EPS) {
            return Err(Error::Domain(format!(
                "need t_start > t_end >= eps, got ({t_start}, {t_end})"
            )));
        }
        let lam_start = self.lambda(t_start)?;
        let lam_end = self.lambda(t_end)?;
        let mut out = Vec::with_capacity(n_steps + 1);
        out.push(t_start);
        for i in 1..n_steps {
            let lam = lam_start + (lam_end - lam_start) * (i as f64 / n_steps as f64);
            out.push(self.invert_lambda(lam)?);
        }
        out.push(t_end);
        Ok(out)
    }
}

/// `count` equally spaced timesteps over `[t_lo, t_hi]`, both endpoints
/// included, ascending. A single step degenerates to the noise-side
/// endpoint `t_hi`.
pub fn discretize_linear(count: usize, t_lo: f64, t_hi: f64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Config("count must be >= 1".into()));
    }
    if !(t_hi > t_lo) {
        return Err(Error::Domain(format!(
            "need t_hi > t_lo, got ({t_lo}, {t_hi})"
        )));
    }
    if count == 1 {
        return Ok(vec![t_hi]);
    }
    let step = (t_hi - t_lo) / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| t_lo + step * i as f64).collect();
    out[0] = t_lo;
    out[count - 1] = t_hi;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_preserving_identity() {
        let ns = NoiseSchedule::default_linear();
        for i in 0..1000 {
            let t = (i as f64 + 0.5) / 1000.0;
            let (a, s) = ns.alpha_sigma(t).unwrap();
            assert!((a * a + s * s - 1.0).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn endpoint_behavior() {
        let ns = NoiseSchedule::default_linear();
        let (a, s, lam) = ns.eval(0.0).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        assert!(s < 1e-5);
        assert!(lam > 10.0, "clamped lambda stays large and finite: {lam}");
        assert!(ns.eval(-0.1).is_err());
        assert!(ns.eval(1.1).is_err());
    }

    #[test]
    fn lambda_strictly_decreasing_on_grid() {
        let ns = NoiseSchedule::default_linear();
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let t = 1e-3 + (1.0 - 1e-3) * i as f64 / 1000.0;
            let lam = ns.lambda(t).unwrap();
            assert!(lam < prev, "lambda not decreasing at t={t}");
            prev = lam;
        }
    }

    #[test]
    fn lambda_monotone_for_other_beta_ranges() {
        for (bmin, bmax) in [(0.01, 5.0), (0.5, 8.0), (0.1, 40.0)] {
            let ns = NoiseSchedule::linear(bmin, bmax).unwrap();
            let mut prev = f64::INFINITY;
            for i in 0..=200 {
                let t = 1e-3 + (1.0 - 1e-3) * i as f64 / 200.0;
                let lam = ns.lambda(t).unwrap();
                assert!(lam < prev);
                prev = lam;
            }
        }
    }

    #[test]
    fn uniform_logsnr_single_step_is_endpoints() {
        let ns = NoiseSchedule::default_linear();
        let ts = ns.discretize_uniform_logsnr(1, 1.0, 1e-3).unwrap();
        assert_eq!(ts, vec![1.0, 1e-3]);
    }

    #[test]
    fn uniform_logsnr_gaps_are_equal() {
        let ns = NoiseSchedule::default_linear();
        for n in [2usize, 5, 20, 90] {
            let ts = ns.discretize_uniform_logsnr(n, 1.0, 1e-3).unwrap();
            assert_eq!(ts.len(), n + 1);
            assert_eq!(ts[0], 1.0);
            assert_eq!(ts[n], 1e-3);
            let lams: Vec<f64> = ts.iter().map(|&t| ns.lambda(t).unwrap()).collect();
            let gap = (lams[n] - lams[0]) / n as f64;
            for i in 0..n {
                assert!(
                    (lams[i + 1] - lams[i] - gap).abs() < 1e-9,
                    "n={n} i={i} gap {} vs {}",
                    lams[i + 1] - lams[i],
                    gap
                );
            }
        }
    }

    #[test]
    fn uniform_logsnr_round_trips_targets() {
        let ns = NoiseSchedule::default_linear();
        let n = 17;
        let ts = ns.discretize_uniform_logsnr(n, 0.9, 2e-3).unwrap();
        let lam0 = ns.lambda(0.9).unwrap();
        let lam1 = ns.lambda(2e-3).unwrap();
        for (i, &t) in ts.iter().enumerate() {
            let target = lam0 + (lam1 - lam0) * i as f64 / n as f64;
            assert!(
                (ns.lambda(t).unwrap() - target).abs() < 1e-9,
                "i={i}: {} vs {}",
                ns.lambda(t).unwrap(),
                target
            );
        }
    }

    #[test]
    fn linear_lattice_conventions() {
        assert_eq!(discretize_linear(2, 0.0, 1.0).unwrap(), vec![0.0, 1.0]);
        let ts = discretize_linear(100, 1e-3, 1.0).unwrap();
        assert_eq!(ts.len(), 100);
        assert_eq!(ts[0], 1e-3);
        assert_eq!(ts[99], 1.0);
        let gap = ts[1] - ts[0];
        for w in ts.windows(2) {
            assert!((w[1] - w[0] - gap).abs() < 1e-12);
        }
        // single point degenerates to the noise-side endpoint
        assert_eq!(discretize_linear(1, 0.2, 0.8).unwrap(), vec![0.8]);
    }
}
