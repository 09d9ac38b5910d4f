//! The laboratory's denoiser zoo: exact, perturbed and neural
//! noise-predictors.
//!
//! Every denoiser predicts the noise `eps(x_t, t)` that was mixed into
//! `x_t = alpha_t x_0 + sigma_t eps`. The exact denoiser is derived from
//! the closed-form score (`eps = -sigma_t * score`). Perturbed denoisers
//! add a time-profiled bias along a fixed direction plus optional fresh
//! noise, which makes per-step loss curves cross by construction.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::mixture::GaussianMixture;
use crate::autodiff::{Activation, AdamConfig, AdamState, Mlp, ParamSet, Tape};
use crate::predictor::sinusoidal_embedding;
use crate::space::NoiseSchedule;
use crate::{Error, Result};

/// A scalar profile over normalized time `t / t_max`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Profile {
    /// Constant value.
    Flat { scale: f64 },
    /// `scale * t / t_max`: grows toward the noise end.
    Rise { scale: f64 },
    /// `scale * (1 - t / t_max)`: grows toward the data end.
    Fall { scale: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64, t_max: f64) -> f64 {
        let u = (t / t_max).clamp(0.0, 1.0);
        match *self {
            Profile::Flat { scale } => scale,
            Profile::Rise { scale } => scale * u,
            Profile::Fall { scale } => scale * (1.0 - u),
        }
    }

    pub fn zero() -> Self {
        Profile::Flat { scale: 0.0 }
    }
}

/// Timestep embedding width used by neural denoisers.
const NEURAL_T_DIM: usize = 16;

/// A small MLP noise-predictor on `(x, sinusoidal t)` input.
#[derive(Debug, Clone)]
pub struct NeuralDenoiser {
    params: ParamSet,
    net: Mlp,
    dim: usize,
}

impl NeuralDenoiser {
    pub fn predict(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        let mut tape = Tape::new();
        let input = Self::encode_input(&mut tape, x, t)?;
        let out = self.net.forward(&mut tape, &self.params, input)?;
        Ok(tape.value(out).to_vec())
    }

    fn encode_input(tape: &mut Tape, x: &[f64], t: f64) -> Result<crate::autodiff::NodeId> {
        let emb = sinusoidal_embedding(t * crate::predictor::TIMESTEP_SCALE, NEURAL_T_DIM)?;
        let xn = tape.leaf(x);
        let tn = tape.leaf(&emb);
        tape.concat(&[xn, tn])
    }
}

/// How a denoiser produces its noise estimate.
#[derive(Debug, Clone)]
pub enum DenoiserKind {
    /// The analytically exact noise predictor for the mixture.
    Exact,
    /// Exact plus `bias(t) * direction + noise_gain(t) * eta` with fresh
    /// standard-normal `eta`.
    Perturbed {
        bias: Profile,
        noise_gain: Profile,
        direction: Vec<f64>,
    },
    /// A trained MLP.
    Neural(NeuralDenoiser),
}

/// One zoo member: a noise predictor with an assigned latency.
#[derive(Debug, Clone)]
pub struct Denoiser {
    pub name: String,
    pub kind: DenoiserKind,
    pub latency_ms: f64,
}

impl Denoiser {
    pub fn exact(name: impl Into<String>, latency_ms: f64) -> Self {
        Self {
            name: name.into(),
            kind: DenoiserKind::Exact,
            latency_ms,
        }
    }

    pub fn perturbed(
        name: impl Into<String>,
        latency_ms: f64,
        bias: Profile,
        noise_gain: Profile,
        direction: Vec<f64>,
    ) -> Result<Self> {
        let norm: f64 = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Config("perturbation direction must be nonzero".into()));
        }
        let direction = direction.iter().map(|d| d / norm).collect();
        Ok(Self {
            name: name.into(),
            kind: DenoiserKind::Perturbed {
                bias,
                noise_gain,
                direction,
            },
            latency_ms,
        })
    }

    /// Exact noise prediction `-sigma_t * score(x, t)`.
    pub fn exact_eps(
        gm: &GaussianMixture,
        ns: &NoiseSchedule,
        x: &[f64],
        t: f64,
    ) -> Result<Vec<f64>> {
        let (_, sigma) = ns.alpha_sigma(t)?;
        let score = gm.score(ns, x, t)?;
        Ok(score.iter().map(|&s| -sigma * s).collect())
    }

    /// Predicts the noise in `x_t`. Perturbed denoisers draw their fresh
    /// noise from `rng`; the other kinds leave it untouched.
    pub fn predict_noise(
        &self,
        gm: &GaussianMixture,
        ns: &NoiseSchedule,
        x: &[f64],
        t: f64,
        rng: &mut impl Rng,
    ) -> Result<Vec<f64>> {
        match &self.kind {
            DenoiserKind::Exact => Self::exact_eps(gm, ns, x, t),
            DenoiserKind::Perturbed {
                bias,
                noise_gain,
                direction,
            } => {
                let mut eps = Self::exact_eps(gm, ns, x, t)?;
                let b = bias.eval(t, ns.t_max());
                let g = noise_gain.eval(t, ns.t_max());
                for (e, d) in eps.iter_mut().zip(direction) {
                    *e += b * d;
                    if g != 0.0 {
                        *e += g * rng.sample::<f64, _>(StandardNormal);
                    }
                }
                Ok(eps)
            }
            DenoiserKind::Neural(net) => {
                if x.len() != net.dim {
                    return Err(Error::Shape(format!(
                        "neural denoiser expects dim {}, got {}",
                        net.dim,
                        x.len()
                    )));
                }
                net.predict(x, t)
            }
        }
    }
}

/// Hyperparameters for [`train_neural_denoiser`].
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralTrainConfig {
    pub hidden_widths: Vec<usize>,
    pub steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Training times are drawn uniformly from `[t_end, t_max]`.
    pub t_end: f64,
    pub seed: u64,
}

impl Default for NeuralTrainConfig {
    fn default() -> Self {
        Self {
            hidden_widths: vec![64, 64],
            steps: 2000,
            batch_size: 32,
            learning_rate: 3e-3,
            t_end: 1e-3,
            seed: 0,
        }
    }
}

/// Trains an MLP on the standard noise-prediction objective
/// `E || net(x_t, t) - eps ||^2` with `x_t = alpha x_0 + sigma eps`.
pub fn train_neural_denoiser(
    gm: &GaussianMixture,
    ns: &NoiseSchedule,
    cfg: &NeuralTrainConfig,
) -> Result<NeuralDenoiser> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = ParamSet::new();
    let mut dims = vec![gm.dim() + NEURAL_T_DIM];
    dims.extend_from_slice(&cfg.hidden_widths);
    dims.push(gm.dim());
    let net = Mlp::new(
        &mut params,
        "denoiser",
        &dims,
        Activation::Relu,
        Activation::Identity,
        &mut rng,
    )?;
    let mut adam = AdamState::new(&params, AdamConfig::with_learning_rate(cfg.learning_rate));
    for _ in 0..cfg.steps {
        let mut tape = Tape::new();
        let mut terms = Vec::with_capacity(cfg.batch_size);
        for _ in 0..cfg.batch_size {
            let x0 = gm.sample(&mut rng);
            let t = rng.gen_range(cfg.t_end..=ns.t_max());
            let (alpha, sigma) = ns.alpha_sigma(t)?;
            let eps: Vec<f64> = (0..gm.dim())
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let xt: Vec<f64> = x0
                .iter()
                .zip(&eps)
                .map(|(&x, &e)| alpha * x + sigma * e)
                .collect();
            let input = NeuralDenoiser::encode_input(&mut tape, &xt, t)?;
            let pred = net.forward(&mut tape, &params, input)?;
            let target = tape.leaf(&eps);
            let diff = tape.sub(pred, target)?;
            let sq = tape.mul(diff, diff)?;
            terms.push(tape.sum_elems(sq));
        }
        let total = tape.sum_scalars(&terms)?;
        let loss = tape.affine(total, 1.0 / cfg.batch_size as f64, 0.0);
        params.zero_grads();
        tape.backward(loss, &mut params)?;
        adam.step(&mut params);
    }
    Ok(NeuralDenoiser {
        params,
        net,
        dim: gm.dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (GaussianMixture, NoiseSchedule) {
        (
            GaussianMixture::ring(8, 4.0, 0.3).unwrap(),
            NoiseSchedule::default_linear(),
        )
    }

    #[test]
    fn zero_perturbation_equals_exact() {
        let (gm, ns) = setup();
        let exact = Denoiser::exact("exact", 1.0);
        let perturbed = Denoiser::perturbed(
            "zeroed",
            1.0,
            Profile::zero(),
            Profile::zero(),
            vec![1.0, 0.0],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = vec![1.2, -0.7];
        let a = exact.predict_noise(&gm, &ns, &x, 0.5, &mut rng).unwrap();
        let b = perturbed.predict_noise(&gm, &ns, &x, 0.5, &mut rng).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bias_shifts_prediction_along_direction() {
        let (gm, ns) = setup();
        let exact = Denoiser::exact("exact", 1.0);
        let biased = Denoiser::perturbed(
            "biased",
            1.0,
            Profile::Flat { scale: 0.6 },
            Profile::zero(),
            vec![2.0, 0.0], // normalized internally
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = vec![0.3, 0.4];
        let a = exact.predict_noise(&gm, &ns, &x, 0.7, &mut rng).unwrap();
        let b = biased.predict_noise(&gm, &ns, &x, 0.7, &mut rng).unwrap();
        assert!((b[0] - a[0] - 0.6).abs() < 1e-12);
        assert!((b[1] - a[1]).abs() < 1e-12);
    }

    #[test]
    fn profiles_evaluate_as_documented() {
        let rise = Profile::Rise { scale: 2.0 };
        assert_eq!(rise.eval(0.0, 1.0), 0.0);
        assert_eq!(rise.eval(1.0, 1.0), 2.0);
        let fall = Profile::Fall { scale: 2.0 };
        assert_eq!(fall.eval(0.0, 1.0), 2.0);
        assert_eq!(fall.eval(1.0, 1.0), 0.0);
    }

    #[test]
    fn neural_denoiser_trains_toward_exact() {
        // A tiny net on a tiny budget: the trained loss must be clearly
        // below the untrained one.
        let (gm, ns) = setup();
        let cfg = NeuralTrainConfig {
            hidden_widths: vec![16],
            steps: 150,
            batch_size: 16,
            learning_rate: 5e-3,
            ..NeuralTrainConfig::default()
        };
        let trained = train_neural_denoiser(&gm, &ns, &cfg).unwrap();
        let untrained = train_neural_denoiser(
            &gm,
            &ns,
            &NeuralTrainConfig {
                steps: 0,
                ..cfg.clone()
            },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut mse = |net: &NeuralDenoiser| -> f64 {
            let mut total = 0.0;
            let n = 200;
            for _ in 0..n {
                let x0 = gm.sample(&mut rng);
                let t = rng.gen_range(0.05..1.0);
                let (alpha, sigma) = ns.alpha_sigma(t).unwrap();
                let eps: Vec<f64> = (0..2).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let xt: Vec<f64> = x0
                    .iter()
                    .zip(&eps)
                    .map(|(&x, &e)| alpha * x + sigma * e)
                    .collect();
                let pred = net.predict(&xt, t).unwrap();
                total += pred
                    .iter()
                    .zip(&eps)
                    .map(|(&p, &e)| (p - e) * (p - e))
                    .sum::<f64>();
            }
            total / n as f64
        };
        let trained_mse = mse(&trained);
        let untrained_mse = mse(&untrained);
        assert!(
            trained_mse < 0.8 * untrained_mse,
            "training did not help: {trained_mse} vs {untrained_mse}"
        );
    }
}
