//! The schedule-quality predictor: model embedder, timestep embedder,
//! optional solver-group embedder, LSTM sequence core and MLP head.
//!
//! The sequence runs from noise to data (descending timestep), matching
//! the order in which models are applied during sampling. Inactive steps
//! and groups still occupy sequence positions through the null embedding
//! (row 0), so the input length is fixed by the space. Lower output score
//! means predicted-better schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::PredictorConfig;
use super::embed::sinusoidal_embedding;
use crate::autodiff::{Activation, Embedding, LstmCell, Mlp, NodeId, ParamSet, Tape};
use crate::space::{ModelSchedule, SamplerKind, ScheduleSpace};
use crate::{Error, Result};

/// The timestep scalar (in [0, 1]) is stretched by this factor before the
/// sinusoidal encoding so the geometric frequency ladder is exercised the
/// same way as with discrete 0..1000 step indices.
pub const TIMESTEP_SCALE: f64 = 1000.0;

/// Timestep fed for inactive DPM-Solver groups, which have no lambda
/// interval of their own.
const INACTIVE_GROUP_T: f64 = 0.0;

/// Per-position predictor input, in noise-to-data order.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionInput {
    /// One model id for DDIM, the full triple for DPM-Solver.
    pub models: Vec<usize>,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct SchedulePredictor {
    config: PredictorConfig,
    params: ParamSet,
    embedding: Embedding,
    timestep_mlp: Mlp,
    solver_mlp: Option<Mlp>,
    lstm: Vec<LstmCell>,
    head: Mlp,
}

impl SchedulePredictor {
    pub fn new(config: PredictorConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamSet::new();
        let embedding = Embedding::new(
            &mut params,
            "model_embed",
            config.n_models + 1,
            config.model_embed_dim,
            &mut rng,
        )?;
        let d_t = config.timestep_embed_dim;
        let timestep_mlp = Mlp::new(
            &mut params,
            "timestep_mlp",
            &[d_t, d_t, d_t],
            Activation::Relu,
            Activation::Identity,
            &mut rng,
        )?;
        let solver_mlp = match config.sampler {
            SamplerKind::DpmSolver => Some(Mlp::new(
                &mut params,
                "solver_mlp",
                &[
                    3 * config.model_embed_dim,
                    config.solver_embed_dim,
                    config.solver_embed_dim,
                ],
                Activation::Relu,
                Activation::Identity,
                &mut rng,
            )?),
            SamplerKind::Ddim => None,
        };
        let mut lstm = Vec::with_capacity(config.recurrent_layers);
        for layer in 0..config.recurrent_layers {
            let input_size = if layer == 0 {
                config.feature_dim()
            } else {
                config.hidden_size
            };
            lstm.push(LstmCell::new(
                &mut params,
                &format!("lstm{layer}"),
                input_size,
                config.hidden_size,
                &mut rng,
            )?);
        }
        let mut head_dims = vec![config.hidden_size];
        head_dims.extend(std::iter::repeat(config.head_width).take(config.head_layers - 1));
        head_dims.push(1);
        let head = Mlp::new(
            &mut params,
            "head",
            &head_dims,
            Activation::Relu,
            Activation::Identity,
            &mut rng,
        )?;
        Ok(Self {
            config,
            params,
            embedding,
            timestep_mlp,
            solver_mlp,
            lstm,
            head,
        })
    }

    pub fn config(&self) -> &PredictorConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    /// The trainable embedding table (row 0 = null model).
    pub fn embedding_table(&self) -> &Embedding {
        &self.embedding
    }

    fn check_space(&self, space: &ScheduleSpace) -> Result<()> {
        if space.sampler() != self.config.sampler {
            return Err(Error::Shape(format!(
                "predictor is for {:?}, space is {:?}",
                self.config.sampler,
                space.sampler()
            )));
        }
        if space.n_models() != self.config.n_models {
            return Err(Error::Shape(format!(
                "predictor expects {} models, space has {}",
                self.config.n_models,
                space.n_models()
            )));
        }
        Ok(())
    }

    /// Turns a schedule into the per-position inputs the network consumes,
    /// in noise-to-data order.
    ///
    /// DDIM: position l carries entry s'_l and lattice timestep t_l.
    /// DPM-Solver: each entry triple carries its three ids (in schedule
    /// order, for the solver embedder) and the noise-side endpoint of the
    /// group's lambda interval; inactive groups carry a zero timestep.
    pub fn encode(space: &ScheduleSpace, schedule: &ModelSchedule) -> Result<Vec<PositionInput>> {
        space.validate(schedule)?;
        match space.sampler() {
            SamplerKind::Ddim => {
                let lattice = space.ddim_lattice();
                Ok((0..space.length())
                    .rev()
                    .map(|l| PositionInput {
                        models: vec![schedule.entries()[l]],
                        t: lattice[l],
                    })
                    .collect())
            }
            SamplerKind::DpmSolver => {
                let groups: Vec<&[usize]> = schedule.entries().chunks(3).collect();
                let n_active = groups
                    .iter()
                    .filter(|g| g.iter().any(|&e| e != 0))
                    .count();
                let boundaries = if n_active > 0 {
                    space.noise().discretize_uniform_logsnr(
                        n_active,
                        space.noise().t_max(),
                        space.t_end(),
                    )?
                } else {
                    Vec::new()
                };
                let mut active_seen = 0;
                let mut out = Vec::with_capacity(groups.len());
                for group in groups.iter().rev() {
                    let active = group.iter().any(|&e| e != 0);
                    let t = if active {
                        let t = boundaries[active_seen];
                        active_seen += 1;
                        t
                    } else {
                        INACTIVE_GROUP_T
                    };
                    out.push(PositionInput {
                        models: group.to_vec(),
                        t,
                    });
                }
                Ok(out)
            }
        }
    }

    /// Records the predictor forward pass for the given positions and
    /// returns the scalar score node.
    pub fn forward_on_tape(&self, tape: &mut Tape, positions: &[PositionInput]) -> Result<NodeId> {
        if positions.is_empty() {
            return Err(Error::Shape("predictor input has no positions".into()));
        }
        let mut states: Vec<(NodeId, NodeId)> = self
            .lstm
            .iter()
            .map(|cell| cell.zero_state(tape))
            .collect();
        let mut outputs = Vec::with_capacity(positions.len());
        for pos in positions {
            let model_feat = match (&self.solver_mlp, self.config.sampler) {
                (None, SamplerKind::Ddim) => {
                    if pos.models.len() != 1 {
                        return Err(Error::Shape(format!(
                            "ddim position wants 1 model id, got {}",
                            pos.models.len()
                        )));
                    }
                    self.lookup_model(tape, pos.models[0])?
                }
                (Some(solver_mlp), SamplerKind::DpmSolver) => {
                    if pos.models.len() != 3 {
                        return Err(Error::Shape(format!(
                            "dpm-solver position wants a model triple, got {}",
                            pos.models.len()
                        )));
                    }
                    let embs = pos
                        .models
                        .iter()
                        .map(|&m| self.lookup_model(tape, m))
                        .collect::<Result<Vec<_>>>()?;
                    let cat = tape.concat(&embs)?;
                    solver_mlp.forward(tape, &self.params, cat)?
                }
                _ => unreachable!("solver mlp presence is tied to sampler kind"),
            };
            let sin = sinusoidal_embedding(pos.t * TIMESTEP_SCALE, self.config.timestep_embed_dim)?;
            let sin_node = tape.leaf(&sin);
            let t_feat = self.timestep_mlp.forward(tape, &self.params, sin_node)?;
            let mut feat = tape.concat(&[model_feat, t_feat])?;
            for (layer, cell) in self.lstm.iter().enumerate() {
                let (h, c) = states[layer];
                let (h2, c2) = cell.step(tape, &self.params, feat, h, c)?;
                states[layer] = (h2, c2);
                feat = h2;
            }
            outputs.push(feat);
        }
        let pooled = tape.mean(&outputs)?;
        self.head.forward(tape, &self.params, pooled)
    }

    fn lookup_model(&self, tape: &mut Tape, id: usize) -> Result<NodeId> {
        if id > self.config.n_models {
            return Err(Error::InvalidSchedule(format!(
                "model id {id} exceeds zoo size {}",
                self.config.n_models
            )));
        }
        self.embedding.lookup(tape, &self.params, id)
    }

    /// Scores a schedule (lower = predicted better). Pure and
    /// deterministic; inference never consumes randomness.
    pub fn score(&self, space: &ScheduleSpace, schedule: &ModelSchedule) -> Result<f64> {
        self.check_space(space)?;
        let positions = Self::encode(space, schedule)?;
        let mut tape = Tape::new();
        let out = self.forward_on_tape(&mut tape, &positions)?;
        tape.scalar(out)
    }
}
