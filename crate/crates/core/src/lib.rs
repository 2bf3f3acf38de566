//! Fitting the Modified Lomax (MLM) distribution, and seven competing
//! heavy-tailed families, to network degree distributions.
//!
//! The crate covers the whole pipeline: reading edge lists into degree
//! histograms ([`graph_io`]), evaluating and sampling the distributions
//! ([`distributions`]), maximum-likelihood estimation with observed
//! information and confidence intervals ([`estimation`]), bootstrap
//! goodness-of-fit and model comparison ([`gof`]), and numerical checks of
//! the distribution's extreme-value behavior ([`tailprops`]). The `mlm`
//! binary is a thin wrapper over [`cli`].

// `!(x > 0.0)` style tests are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference values in the unit tests keep every digit they were computed with.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod gof;
pub mod graph_io;
pub mod optim;
pub mod special;
pub mod tailprops;

pub use error::{Error, Result};
