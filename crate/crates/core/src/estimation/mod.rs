//! Maximum-likelihood estimation, observed information and confidence
//! intervals, plus the Lomax profile likelihood and the coefficient of
//! variation diagnostic for existence of a finite maximum.

mod competitors;
mod fit;
mod intervals;
mod likelihood;
mod lomax;
mod sample;

pub use competitors::{fit_model, model_loglik};
pub use fit::{fit_mlm, mle_existence_check, ExistenceCheck, ExistenceVerdict, FitOptions, FitResult};
pub use intervals::{
    confidence_intervals, invert_information, numeric_gradient, numeric_hessian, Inversion, ParamInterval,
    SINGULAR_CONDITION,
};
pub use likelihood::{mlm_hessian, mlm_loglik, mlm_score, observed_information};
pub use lomax::{lomax_alpha_of_sigma, lomax_profile_loglik, lomax_profile_slope, lomax_slope_limit};
pub use sample::{cv, Sample};
