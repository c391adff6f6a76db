//! Generalized information criterion (GIC) for model order selection, with
//! penalty design that caps the probability of overestimating the order.
//!
//! Two problems are covered: counting signals from sample-covariance
//! eigenvalues ([`source_enum`]) and selecting the order of a general linear
//! model from projection residuals ([`glm`]). The analytic parts are generic
//! over a [`Real`] scalar; Monte Carlo samplers and the sweep harness
//! ([`sim`]) work in `f64`.

// NaN-rejecting guards are written as negated comparisons; series
// coefficients keep their full digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod glm;
pub mod itc;
pub mod linalg;
pub mod rng;
pub mod roots;
pub mod scalar;
pub mod sim;
pub mod source_enum;
pub mod specfun;
pub mod stats;
pub mod wishart;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Probability = specfun::Probability<f64>;
pub type PenaltyRule = itc::PenaltyRule<f64>;
pub type LikelihoodProfile = itc::LikelihoodProfile<f64>;
pub type SelectionResult = itc::SelectionResult<f64>;
pub type MomentTriple = wishart::MomentTriple<f64>;
pub type ShiftedGamma = wishart::ShiftedGamma<f64>;
pub type SensorBatch = source_enum::SensorBatch<f64>;
pub type EigSpectrum = source_enum::EigSpectrum<f64>;
pub type EnumDesignResult = source_enum::EnumDesignResult<f64>;
pub type GlmScenario = glm::GlmScenario<f64>;
pub type GlmDesignResult = glm::GlmDesignResult<f64>;
