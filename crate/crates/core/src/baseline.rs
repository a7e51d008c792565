//! Flat-utility baseline: the same observations, no world model.
//!
//! The baseline fits one independent utility per literal — reward and value
//! conflated into a single number — using exactly the likelihood forms and
//! samplers of [`crate::infer`]. With no causal structure, evidence about
//! one literal cannot move the utility of another: the posterior over any
//! literal absent from every observation is its prior, unchanged. The
//! generative learner and this baseline therefore differ in exactly one
//! factor, the presence of the instrumental model, which is what
//! [`generalization_gap`] measures.

use std::collections::{BTreeMap, BTreeSet};

use crate::infer::{
    log_sum_exp, value_decomposition, GaussianPrior, InferError, InferenceProblem, Observation,
    Posterior,
};
use crate::model::Literal;
use crate::sampler::{
    gaussian_log_pdf, gaussian_summary, run_chain, summarize_weighted, GridPosterior, GridSpec,
    MhConfig, PosteriorSamples, PredictiveSummary, SamplerError, GRID_COORD_CAP,
};

/// A utility-fitting task: free and fixed utilities plus observations,
/// with no model anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatProblem {
    free: Vec<Literal>,
    priors: Vec<GaussianPrior>,
    fixed: BTreeMap<Literal, f64>,
    observations: Vec<Observation>,
    /// Literals appearing in at least one observation.
    mentioned: BTreeSet<Literal>,
}

impl FlatProblem {
    pub fn new(
        free: Vec<(Literal, GaussianPrior)>,
        fixed: BTreeMap<Literal, f64>,
        observations: Vec<Observation>,
    ) -> Result<Self, InferError> {
        for (literal, utility) in &fixed {
            if !utility.is_finite() {
                return Err(InferError::Config(format!(
                    "fixed utility for {literal} is not finite"
                )));
            }
        }
        let mut free_literals = Vec::with_capacity(free.len());
        let mut priors = Vec::with_capacity(free.len());
        for (literal, prior) in free {
            if free_literals.contains(&literal) {
                return Err(InferError::Config(format!(
                    "free literal {literal} listed twice"
                )));
            }
            if fixed.contains_key(&literal) {
                return Err(InferError::Config(format!(
                    "literal {literal} is both free and fixed"
                )));
            }
            validate_prior(&prior)?;
            free_literals.push(literal);
            priors.push(prior);
        }
        let mut mentioned = BTreeSet::new();
        for observation in &observations {
            validate_flat_observation(observation)?;
            for literal in observation.literals() {
                mentioned.insert(literal.clone());
            }
        }
        Ok(FlatProblem {
            free: free_literals,
            priors,
            fixed,
            observations,
            mentioned,
        })
    }

    /// Builds the flat counterpart of a generative problem: one free utility
    /// per literal mentioned in the observations (in first-mention order),
    /// plus one per extra target literal, all under `prior`. The generative
    /// side's fixed rewards do not carry over — they parameterize r, not u.
    pub fn mirroring(
        problem: &InferenceProblem,
        prior: GaussianPrior,
        extra_targets: &[Literal],
    ) -> Result<Self, InferError> {
        let mut free = Vec::new();
        let mut seen = BTreeSet::new();
        for observation in problem.observations() {
            for literal in observation.literals() {
                if seen.insert(literal.clone()) {
                    free.push((literal.clone(), prior));
                }
            }
        }
        for target in extra_targets {
            if seen.insert(target.clone()) {
                free.push((target.clone(), prior));
            }
        }
        FlatProblem::new(free, BTreeMap::new(), problem.observations().to_vec())
    }

    pub fn free(&self) -> &[Literal] {
        &self.free
    }

    pub fn priors(&self) -> &[GaussianPrior] {
        &self.priors
    }

    pub fn fixed(&self) -> &BTreeMap<Literal, f64> {
        &self.fixed
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// Whether any observation mentions the literal.
    pub fn is_mentioned(&self, literal: &Literal) -> bool {
        self.mentioned.contains(literal)
    }

    /// Every literal in play: free, fixed, or mentioned.
    pub fn literals(&self) -> BTreeSet<Literal> {
        self.free
            .iter()
            .cloned()
            .chain(self.fixed.keys().cloned())
            .chain(self.mentioned.iter().cloned())
            .collect()
    }

    /// u(literal) at one setting of the free utilities. Literals that are
    /// neither free nor fixed sit at 0.
    pub fn utility(&self, u_free: &[f64], literal: &Literal) -> f64 {
        if let Some(index) = self.free.iter().position(|l| l == literal) {
            u_free[index]
        } else {
            self.fixed.get(literal).copied().unwrap_or(0.0)
        }
    }

    fn check_parameters(&self, u_free: &[f64]) -> Result<(), InferError> {
        if u_free.len() != self.free.len() {
            return Err(InferError::Config(format!(
                "expected {} free parameter(s), got {}",
                self.free.len(),
                u_free.len()
            )));
        }
        if let Some(bad) = u_free.iter().find(|x| !x.is_finite()) {
            return Err(InferError::Config(format!(
                "free parameter value {bad} is not finite"
            )));
        }
        Ok(())
    }

    /// Free literals that some observation mentions, with their coordinate
    /// indices. Only these coordinates feel the likelihood.
    fn mentioned_free(&self) -> Vec<(usize, Literal)> {
        self.free
            .iter()
            .enumerate()
            .filter(|(_, literal)| self.mentioned.contains(literal))
            .map(|(i, literal)| (i, literal.clone()))
            .collect()
    }
}

fn validate_prior(prior: &GaussianPrior) -> Result<(), InferError> {
    if !prior.mean.is_finite() || !(prior.sd > 0.0 && prior.sd.is_finite()) {
        return Err(InferError::Config(format!(
            "prior must have finite mean and positive finite sd, got N({}, {})",
            prior.mean, prior.sd
        )));
    }
    Ok(())
}

/// Observation validity without a model: shape and scale checks only.
fn validate_flat_observation(observation: &Observation) -> Result<(), InferError> {
    match observation {
        Observation::ValueReport {
            literal,
            reported,
            sigma,
        } => {
            if !reported.is_finite() {
                return Err(InferError::Config(format!(
                    "reported value for {literal} is not finite"
                )));
            }
            if !(*sigma > 0.0 && sigma.is_finite()) {
                return Err(InferError::Config(format!(
                    "sigma must be positive and finite, got {sigma}"
                )));
            }
        }
        Observation::Choice {
            options,
            chosen,
            beta,
        } => {
            if options.len() < 2 {
                return Err(InferError::Config(
                    "a choice needs at least two options".into(),
                ));
            }
            for (i, option) in options.iter().enumerate() {
                if options[..i].contains(option) {
                    return Err(InferError::Config(format!(
                        "choice option {option} listed twice"
                    )));
                }
            }
            if !options.contains(chosen) {
                return Err(InferError::Config(format!(
                    "chosen literal {chosen} is not among the options"
                )));
            }
            if !(*beta > 0.0 && beta.is_finite()) {
                return Err(InferError::Config(format!(
                    "beta must be positive and finite, got {beta}"
                )));
            }
        }
    }
    Ok(())
}

/// Log-likelihood of the observations under flat utilities: the same forms
/// as the generative learner with u in place of V.
pub fn baseline_log_likelihood(problem: &FlatProblem, u_free: &[f64]) -> Result<f64, InferError> {
    problem.check_parameters(u_free)?;
    let mut total = 0.0;
    for observation in problem.observations() {
        total += match observation {
            Observation::ValueReport {
                literal,
                reported,
                sigma,
            } => gaussian_log_pdf(*reported, problem.utility(u_free, literal), *sigma),
            Observation::Choice {
                options,
                chosen,
                beta,
            } => {
                let scores: Vec<f64> = options
                    .iter()
                    .map(|option| beta * problem.utility(u_free, option))
                    .collect();
                beta * problem.utility(u_free, chosen) - log_sum_exp(&scores)
            }
        };
    }
    Ok(total)
}

/// Unnormalized log posterior over the free utilities.
pub fn baseline_log_posterior(problem: &FlatProblem, u_free: &[f64]) -> Result<f64, InferError> {
    let mut total = baseline_log_likelihood(problem, u_free)?;
    for (prior, x) in problem.priors().iter().zip(u_free) {
        total += prior.log_density(*x);
    }
    Ok(total)
}

/// Random-walk Metropolis–Hastings over all free utilities; same chain as
/// the generative learner.
pub fn baseline_posterior(
    problem: &FlatProblem,
    config: &MhConfig,
    seed: u64,
) -> Result<PosteriorSamples, InferError> {
    config.validate()?;
    let init: Vec<f64> = problem.priors().iter().map(|p| p.mean).collect();
    let (draws, acceptance_rate) =
        run_chain(|x| baseline_log_posterior(problem, x), &init, config, seed)?;
    Ok(PosteriorSamples {
        free: problem.free().to_vec(),
        draws,
        seed,
        config: *config,
        acceptance_rate,
    })
}

/// Grid quadrature over the free utilities the observations actually
/// mention, one shared grid spec per coordinate.
///
/// Unmentioned coordinates never enter the likelihood, so their posterior
/// marginals are exactly their priors and need no grid; this keeps the
/// lattice small enough for targets to ride along as free coordinates.
/// [`baseline_predict`] handles those coordinates analytically.
pub fn baseline_grid_posterior(
    problem: &FlatProblem,
    grid: &GridSpec,
) -> Result<GridPosterior, InferError> {
    let mentioned = problem.mentioned_free();
    if mentioned.len() > GRID_COORD_CAP {
        return Err(SamplerError::GridTooLarge(format!(
            "{} observation-mentioned free literals exceed the {GRID_COORD_CAP}-coordinate \
             quadrature cap",
            mentioned.len()
        ))
        .into());
    }
    let axis = grid.points()?;
    let axes = vec![axis; mentioned.len()];
    let free: Vec<Literal> = mentioned.iter().map(|(_, l)| l.clone()).collect();
    let prior_means: Vec<f64> = problem.priors().iter().map(|p| p.mean).collect();
    GridPosterior::build(free, axes, |grid_point| {
        // unmentioned coordinates pinned at their prior means; the posterior
        // is constant along them, so this loses nothing
        let mut u_free = prior_means.clone();
        for ((index, _), x) in mentioned.iter().zip(grid_point) {
            u_free[*index] = *x;
        }
        let mut lp = baseline_log_likelihood(problem, &u_free)?;
        for ((index, _), x) in mentioned.iter().zip(grid_point) {
            lp += problem.priors()[*index].log_density(*x);
        }
        Ok::<f64, InferError>(lp)
    })
}

/// Predictive distribution of u(target) under a baseline posterior.
///
/// A free target no observation mentions is returned as its exact prior —
/// the likelihood is constant in that coordinate, so no sampled or gridded
/// approximation can improve on the closed form. Fixed and unknown targets
/// are point masses.
pub fn baseline_predict(
    problem: &FlatProblem,
    posterior: Posterior<'_>,
    target: &Literal,
) -> Result<PredictiveSummary, InferError> {
    let free_index = problem.free().iter().position(|l| l == target);
    match free_index {
        None => {
            let value = problem.fixed().get(target).copied().unwrap_or(0.0);
            Ok(gaussian_summary(target.clone(), value, 0.0))
        }
        Some(index) => {
            if !problem.is_mentioned(target) {
                let prior = problem.priors()[index];
                return Ok(gaussian_summary(target.clone(), prior.mean, prior.sd));
            }
            match posterior {
                Posterior::Samples(samples) => {
                    // the chain may cover all free literals or only the
                    // mentioned ones; either way the target must be in it
                    let coord = samples
                        .free
                        .iter()
                        .position(|l| l == target)
                        .ok_or_else(|| {
                            InferError::Config(format!("posterior does not cover {target}"))
                        })?;
                    if samples.draws.is_empty() {
                        return Err(InferError::Config("posterior holds no draws".into()));
                    }
                    let values = samples.coordinate(coord);
                    let weights = vec![1.0 / values.len() as f64; values.len()];
                    Ok(summarize_weighted(target.clone(), &values, &weights))
                }
                Posterior::Grid(grid) => {
                    let coord = grid
                        .free
                        .iter()
                        .position(|l| l == target)
                        .ok_or_else(|| {
                            InferError::Config(format!(
                                "grid posterior does not cover {target}"
                            ))
                        })?;
                    Ok(summarize_weighted(
                        target.clone(),
                        &grid.axes[coord],
                        &grid.marginal(coord),
                    ))
                }
            }
        }
    }
}

/// How the two posteriors are computed inside [`generalization_gap`]: grid
/// quadrature when the coordinate counts allow it, otherwise the seeded
/// sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapConfig {
    pub grid: GridSpec,
    pub mh: MhConfig,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig {
            grid: GridSpec::new(-20.0, 20.0, 0.05),
            mh: MhConfig::default(),
        }
    }
}

/// Side-by-side predictive summaries for one target, with each side's
/// divergence from its own prior predictive.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub target: Literal,
    pub generative: PredictiveSummary,
    pub baseline: PredictiveSummary,
    pub baseline_prior_divergence: f64,
    pub generative_prior_divergence: f64,
}

/// Squared mean shift plus squared sd shift, scaled by the prior variance.
/// Zero numerator short-circuits so exactly-unmoved posteriors report 0
/// even when the prior is degenerate.
fn prior_divergence(prior_mean: f64, prior_sd: f64, post_mean: f64, post_sd: f64) -> f64 {
    let numerator = (post_mean - prior_mean).powi(2) + (post_sd - prior_sd).powi(2);
    if numerator == 0.0 {
        0.0
    } else {
        numerator / prior_sd.powi(2)
    }
}

/// Runs the generative learner and the flat baseline on the same
/// observations and compares what each predicts about the target.
///
/// Both sides prefer the deterministic grid oracle and fall back to the
/// seeded sampler only when they have too many coordinates to grid. With no
/// observations at all, both posteriors equal their priors by definition
/// and both divergences are exactly zero.
pub fn generalization_gap(
    generative: &InferenceProblem,
    flat: &FlatProblem,
    target: &Literal,
    config: &GapConfig,
    seed: u64,
) -> Result<GapReport, InferError> {
    // generative prior predictive, exact via linearity of V in the rewards
    let (base, slopes) = value_decomposition(generative, target)?;
    let generative_prior_mean = base
        + slopes
            .iter()
            .zip(generative.priors())
            .map(|(s, p)| s * p.mean)
            .sum::<f64>();
    let generative_prior_var: f64 = slopes
        .iter()
        .zip(generative.priors())
        .map(|(s, p)| (s * p.sd).powi(2))
        .sum();
    let generative_prior_sd = generative_prior_var.sqrt();

    let baseline_prior = match flat.free().iter().position(|l| l == target) {
        Some(index) => {
            let p = flat.priors()[index];
            (p.mean, p.sd)
        }
        None => (flat.fixed().get(target).copied().unwrap_or(0.0), 0.0),
    };

    if generative.observations().is_empty() && flat.observations().is_empty() {
        let generative_summary =
            gaussian_summary(target.clone(), generative_prior_mean, generative_prior_sd);
        let baseline_summary =
            gaussian_summary(target.clone(), baseline_prior.0, baseline_prior.1);
        return Ok(GapReport {
            target: target.clone(),
            generative: generative_summary,
            baseline: baseline_summary,
            baseline_prior_divergence: 0.0,
            generative_prior_divergence: 0.0,
        });
    }

    let generative_summary = if generative.free().len() <= GRID_COORD_CAP {
        let grids = vec![config.grid; generative.free().len()];
        let grid = crate::infer::grid_posterior(generative, &grids)?;
        crate::infer::predict_value(generative, Posterior::Grid(&grid), target)?
    } else {
        let samples = crate::infer::mh_sample(generative, &config.mh, seed)?;
        crate::infer::predict_value(generative, Posterior::Samples(&samples), target)?
    };

    let baseline_summary = match baseline_grid_posterior(flat, &config.grid) {
        Ok(grid) => baseline_predict(flat, Posterior::Grid(&grid), target)?,
        Err(InferError::Sampler(SamplerError::GridTooLarge(_))) => {
            let samples = baseline_posterior(flat, &config.mh, seed)?;
            baseline_predict(flat, Posterior::Samples(&samples), target)?
        }
        Err(other) => return Err(other),
    };

    Ok(GapReport {
        target: target.clone(),
        baseline_prior_divergence: prior_divergence(
            baseline_prior.0,
            baseline_prior.1,
            baseline_summary.mean,
            baseline_summary.sd,
        ),
        generative_prior_divergence: prior_divergence(
            generative_prior_mean,
            generative_prior_sd,
            generative_summary.mean,
            generative_summary.sd,
        ),
        generative: generative_summary,
        baseline: baseline_summary,
    })
}
