//! Distribution evaluation, inversion and sampling.

mod hlm;
mod mlm;
mod models;

pub use hlm::{hlm_conditions_check, Approach, HlmConditionsReport, HlmShapeFn, LIMIT_TOLERANCE};
pub use mlm::{open_unit, MlmParams};
pub use models::{CutoffSampler, DistributionModel, Envelope, Family};
