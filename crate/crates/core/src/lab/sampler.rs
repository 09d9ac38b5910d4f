//! Deterministic DDIM sampling of a decoded step plan.
//!
//! In variance-preserving form the noiseless DDIM update from time `s`
//! to `t < s` with noise estimate `eps` is
//!
//!   x_t = (alpha_t / alpha_s) * (x_s - sigma_s * eps) + sigma_t * eps
//!
//! linear in both `x_s` and `eps`. Each trajectory starts at standard
//! normal noise attached to the largest active timestep and finishes with
//! a step to t = 0 (where alpha = 1, sigma = 0 exactly), so every active
//! model is called exactly once.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::denoiser::Denoiser;
use super::mixture::GaussianMixture;
use crate::space::{NoiseSchedule, StepPlan};
use crate::{derive_seed, Error, Result};

/// One DDIM update. Requires `t <= s`; `t == s` is the identity step.
pub fn ddim_step(
    eps_hat: &[f64],
    x_s: &[f64],
    s: f64,
    t: f64,
    ns: &NoiseSchedule,
) -> Result<Vec<f64>> {
    if eps_hat.len() != x_s.len() {
        return Err(Error::Shape(format!(
            "eps has dim {}, state has dim {}",
            eps_hat.len(),
            x_s.len()
        )));
    }
    if t > s {
        return Err(Error::Domain(format!(
            "ddim step must move toward data: t = {t} > s = {s}"
        )));
    }
    let (alpha_s, sigma_s) = ns.alpha_sigma(s)?;
    let (alpha_t, sigma_t) = ns.alpha_sigma(t)?;
    let ratio = alpha_t / alpha_s;
    Ok(x_s
        .iter()
        .zip(eps_hat)
        .map(|(&x, &e)| ratio * (x - sigma_s * e) + sigma_t * e)
        .collect())
}

/// Runs a decoded DDIM plan and returns `n_samples` terminal points.
/// Trajectories are independent given per-trajectory seeds derived from
/// `seed`, so repeated runs are bitwise identical.
pub fn run_schedule(
    plan: &StepPlan,
    denoisers: &[Denoiser],
    gm: &GaussianMixture,
    ns: &NoiseSchedule,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let steps = match plan {
        StepPlan::Ddim { steps } => steps,
        StepPlan::DpmSolver { .. } => {
            return Err(Error::Config(
                "only DDIM plans can be executed by the laboratory sampler".into(),
            ))
        }
    };
    if steps.is_empty() {
        return Err(Error::InvalidSchedule(
            "degenerate schedule: the plan has no active steps".into(),
        ));
    }
    for step in steps {
        if step.model == 0 || step.model > denoisers.len() {
            return Err(Error::InvalidSchedule(format!(
                "plan references model {} but the zoo has {} denoisers",
                step.model,
                denoisers.len()
            )));
        }
    }
    let mut samples = Vec::with_capacity(n_samples);
    for traj in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, traj as u64));
        let mut x: Vec<f64> = (0..gm.dim())
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        // walk from the noise side (largest t) down to the data side
        for (idx, step) in steps.iter().enumerate().rev() {
            let denoiser = &denoisers[step.model - 1];
            let eps = denoiser.predict_noise(gm, ns, &x, step.t, &mut rng)?;
            let target = if idx == 0 { 0.0 } else { steps[idx - 1].t };
            x = ddim_step(&eps, &x, step.t, target, ns)?;
        }
        samples.push(x);
    }
    Ok(samples)
}

/// `n` standard-normal points, the output of "doing nothing".
pub fn noise_samples(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        })
        .collect()
}
