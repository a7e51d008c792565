//! Instrumental value propagation over causal world models.
//!
//! The crate has three layers:
//!
//! * [`model`] — causal networks of binary variables with exact
//!   interventional queries (do-surgery plus enumeration).
//! * [`value`] — the forward direction: propagate intrinsic rewards into
//!   total subjective values V(o) = r(o) + Σ Impact(o, x) over direct
//!   children x.
//! * [`infer`] and [`baseline`] — the inverse direction: posteriors over
//!   unknown rewards given stated values and observed choices, with
//!   predictive value distributions for unseen outcomes, and a flat-utility
//!   baseline that skips the causal propagation for comparison.
//!
//! [`scenario`] provides the JSON interchange format and a few built-in
//! worked scenarios; the `valgraph` binary wraps everything in a CLI.

pub mod baseline;
pub mod infer;
pub mod model;
pub mod sampler;
pub mod scenario;
pub mod value;

#[cfg(test)]
pub(crate) mod fixtures;

pub use baseline::{
    baseline_grid_posterior, baseline_log_likelihood, baseline_log_posterior, baseline_posterior,
    baseline_predict, generalization_gap, FlatProblem, GapConfig, GapReport,
};
pub use infer::{
    grid_posterior, log_likelihood, log_posterior, mh_sample, predict_value, GaussianPrior,
    InferError, InferenceProblem, Observation, Posterior,
};
pub use model::{
    Assignment, CptRow, Literal, ModelError, ModelSpec, ParseLiteralError, VariableSpec,
    WorldModel, DEFAULT_ENUMERATION_CAP,
};
pub use sampler::{
    gaussian_summary, summarize_weighted, GridPosterior, GridSpec, MhConfig, PosteriorSamples,
    PredictiveSummary, SamplerError, GRID_COORD_CAP, GRID_POINT_CAP,
};
pub use scenario::{
    builtin_scenario, emit_model, emit_observations, parse_model, parse_observations,
    random_scenario, ObservationSet, Scenario, ScenarioError, FORMAT_VERSION,
};
pub use value::{
    evaluate_values, expected_value, explain_value, impact, RewardTable, ValueError,
    ValueExplanation, ValueTable,
};
