//! Model zoo, schedule representation, latency cost model, noise-schedule
//! math and sampler-specific schedule decoding.
//!
//! All types are immutable after construction and every operation is pure,
//! so the module is safe for unrestricted concurrent use.

mod noise;
mod plan;
mod schedule;
mod zoo;

pub use noise::{discretize_linear, NoiseSchedule, LAMBDA_T_EPS};
pub use plan::{DdimStep, ScheduleSpace, SolverStep, StepPlan};
pub use schedule::{feasible, get_cost, search_space_size, ModelSchedule, SamplerKind};
pub use zoo::{Budget, ModelInfo, ModelZoo};
