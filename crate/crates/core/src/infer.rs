//! Bayesian inversion of the value engine.
//!
//! Given a model with some intrinsic rewards unknown, observations of the
//! agent — stated valuations and choices between controllable outcomes —
//! induce a posterior over the unknown rewards. Pushing that posterior back
//! through the value engine yields predictive value distributions for
//! outcomes the agent was never observed to say or do anything about: the
//! instrumental links in the model carry evidence about one outcome over to
//! the values of others.

use thiserror::Error;

use crate::model::{Literal, ModelError, WorldModel};
use crate::sampler::{
    run_chain, summarize_weighted, GridPosterior, GridSpec, MhConfig, PosteriorSamples,
    PredictiveSummary, SamplerError, GRID_COORD_CAP,
};
use crate::value::{evaluate_values, RewardTable, ValueError, ValueTable};

/// Errors from problem construction, likelihood evaluation, and posterior
/// computation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum InferError {
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("ConfigError: {0}")]
    Config(String),
}

/// One piece of evidence about the agent's values.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    /// The agent said the outcome is worth `reported`, heard through
    /// Gaussian noise of scale `sigma` around the true V(literal).
    ValueReport {
        literal: Literal,
        reported: f64,
        sigma: f64,
    },
    /// The agent picked `chosen` from `options`, softmax-rationally in V
    /// with inverse temperature `beta`.
    Choice {
        options: Vec<Literal>,
        chosen: Literal,
        beta: f64,
    },
}

impl Observation {
    /// Every literal the observation mentions.
    pub fn literals(&self) -> Vec<&Literal> {
        match self {
            Observation::ValueReport { literal, .. } => vec![literal],
            Observation::Choice { options, .. } => options.iter().collect(),
        }
    }
}

/// Independent Gaussian prior over one free reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPrior {
    pub mean: f64,
    pub sd: f64,
}

impl Default for GaussianPrior {
    /// Weakly informative and symmetric around indifference.
    fn default() -> Self {
        GaussianPrior { mean: 0.0, sd: 5.0 }
    }
}

impl GaussianPrior {
    pub fn new(mean: f64, sd: f64) -> Self {
        GaussianPrior { mean, sd }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        crate::sampler::gaussian_log_pdf(x, self.mean, self.sd)
    }

    fn validate(&self) -> Result<(), InferError> {
        if !self.mean.is_finite() || !(self.sd > 0.0 && self.sd.is_finite()) {
            return Err(InferError::Config(format!(
                "prior must have finite mean and positive finite sd, got N({}, {})",
                self.mean, self.sd
            )));
        }
        Ok(())
    }
}

/// A reward-inference task: which rewards are unknown, what was observed.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceProblem {
    model: WorldModel,
    fixed_rewards: RewardTable,
    free: Vec<Literal>,
    priors: Vec<GaussianPrior>,
    observations: Vec<Observation>,
}

impl InferenceProblem {
    pub fn new(
        model: WorldModel,
        fixed_rewards: RewardTable,
        free: Vec<(Literal, GaussianPrior)>,
        observations: Vec<Observation>,
    ) -> Result<Self, InferError> {
        for (literal, reward) in fixed_rewards.iter() {
            model.parents_of(&literal.variable)?;
            if !reward.is_finite() {
                return Err(ValueError::NonFiniteReward(literal.clone()).into());
            }
        }
        let mut free_literals = Vec::with_capacity(free.len());
        let mut priors = Vec::with_capacity(free.len());
        for (literal, prior) in free {
            model.parents_of(&literal.variable)?;
            if free_literals.contains(&literal) {
                return Err(InferError::Config(format!(
                    "free literal {literal} listed twice"
                )));
            }
            if fixed_rewards.iter().any(|(fixed, _)| *fixed == literal) {
                return Err(InferError::Config(format!(
                    "literal {literal} is both free and fixed"
                )));
            }
            prior.validate()?;
            free_literals.push(literal);
            priors.push(prior);
        }
        for observation in &observations {
            validate_observation(&model, observation)?;
        }
        Ok(InferenceProblem {
            model,
            fixed_rewards,
            free: free_literals,
            priors,
            observations,
        })
    }

    pub fn model(&self) -> &WorldModel {
        &self.model
    }

    pub fn fixed_rewards(&self) -> &RewardTable {
        &self.fixed_rewards
    }

    pub fn free(&self) -> &[Literal] {
        &self.free
    }

    pub fn priors(&self) -> &[GaussianPrior] {
        &self.priors
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// The full reward table at one setting of the free parameters.
    pub fn reward_table(&self, r_free: &[f64]) -> RewardTable {
        let mut table = self.fixed_rewards.clone();
        for (literal, value) in self.free.iter().zip(r_free) {
            table.set(literal.clone(), *value);
        }
        table
    }

    fn check_parameters(&self, r_free: &[f64]) -> Result<(), InferError> {
        if r_free.len() != self.free.len() {
            return Err(InferError::Config(format!(
                "expected {} free parameter(s), got {}",
                self.free.len(),
                r_free.len()
            )));
        }
        if let Some(bad) = r_free.iter().find(|x| !x.is_finite()) {
            return Err(InferError::Config(format!(
                "free parameter value {bad} is not finite"
            )));
        }
        Ok(())
    }
}

fn validate_observation(model: &WorldModel, observation: &Observation) -> Result<(), InferError> {
    match observation {
        Observation::ValueReport {
            literal,
            reported,
            sigma,
        } => {
            model.parents_of(&literal.variable)?;
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
                model.parents_of(&option.variable)?;
                if !model.is_controllable(&option.variable) {
                    return Err(InferError::Config(format!(
                        "choice option {option} is not a controllable variable"
                    )));
                }
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

/// Log-probability of the observations given one setting of the free
/// rewards: Gaussian densities for value reports, softmax choice
/// probabilities for choices (log-sum-exp stabilized).
pub fn log_likelihood(problem: &InferenceProblem, r_free: &[f64]) -> Result<f64, InferError> {
    problem.check_parameters(r_free)?;
    let values = evaluate_values(problem.model(), &problem.reward_table(r_free))?;
    let mut total = 0.0;
    for observation in problem.observations() {
        total += observation_log_likelihood(&values, observation)?;
    }
    Ok(total)
}

pub(crate) fn observation_log_likelihood(
    values: &ValueTable,
    observation: &Observation,
) -> Result<f64, InferError> {
    match observation {
        Observation::ValueReport {
            literal,
            reported,
            sigma,
        } => Ok(crate::sampler::gaussian_log_pdf(
            *reported,
            values.require(literal)?,
            *sigma,
        )),
        Observation::Choice {
            options,
            chosen,
            beta,
        } => {
            let scores: Vec<f64> = options
                .iter()
                .map(|option| values.require(option).map(|v| beta * v))
                .collect::<Result<_, _>>()?;
            let chosen_score = beta * values.require(chosen)?;
            Ok(chosen_score - log_sum_exp(&scores))
        }
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Unnormalized log posterior: log-likelihood plus the Gaussian log priors.
pub fn log_posterior(problem: &InferenceProblem, r_free: &[f64]) -> Result<f64, InferError> {
    let mut total = log_likelihood(problem, r_free)?;
    for (prior, x) in problem.priors().iter().zip(r_free) {
        total += prior.log_density(*x);
    }
    Ok(total)
}

/// Random-walk Metropolis–Hastings over the free rewards, starting at the
/// prior means. Deterministic given (problem, config, seed).
pub fn mh_sample(
    problem: &InferenceProblem,
    config: &MhConfig,
    seed: u64,
) -> Result<PosteriorSamples, InferError> {
    config.validate()?;
    let init: Vec<f64> = problem.priors().iter().map(|p| p.mean).collect();
    let (draws, acceptance_rate) =
        run_chain(|x| log_posterior(problem, x), &init, config, seed)?;
    Ok(PosteriorSamples {
        free: problem.free().to_vec(),
        draws,
        seed,
        config: *config,
        acceptance_rate,
    })
}

/// Exact (up to discretization) posterior by dense-grid quadrature, the
/// oracle the sampler is checked against. One grid spec per free literal.
pub fn grid_posterior(
    problem: &InferenceProblem,
    grids: &[GridSpec],
) -> Result<GridPosterior, InferError> {
    if grids.len() != problem.free().len() {
        return Err(InferError::Config(format!(
            "expected {} grid spec(s), got {}",
            problem.free().len(),
            grids.len()
        )));
    }
    if problem.free().len() > GRID_COORD_CAP {
        return Err(SamplerError::GridTooLarge(format!(
            "{} free literals exceed the {GRID_COORD_CAP}-coordinate quadrature cap",
            problem.free().len()
        ))
        .into());
    }
    let axes = grids
        .iter()
        .map(|g| g.points())
        .collect::<Result<Vec<_>, _>>()?;
    GridPosterior::build(problem.free().to_vec(), axes, |x| log_posterior(problem, x))
}

/// A posterior in either representation.
#[derive(Debug, Clone, Copy)]
pub enum Posterior<'a> {
    Samples(&'a PosteriorSamples),
    Grid(&'a GridPosterior),
}

/// Pushes a posterior over rewards through the value engine and summarizes
/// the resulting distribution of V(target).
pub fn predict_value(
    problem: &InferenceProblem,
    posterior: Posterior<'_>,
    target: &Literal,
) -> Result<PredictiveSummary, InferError> {
    problem.model().parents_of(&target.variable)?;
    let (points, weights): (Vec<Vec<f64>>, Vec<f64>) = match posterior {
        Posterior::Samples(samples) => {
            if samples.free != problem.free() {
                return Err(InferError::Config(
                    "posterior free literals do not match the problem".into(),
                ));
            }
            if samples.draws.is_empty() {
                return Err(InferError::Config("posterior holds no draws".into()));
            }
            let n = samples.draws.len();
            (samples.draws.clone(), vec![1.0 / n as f64; n])
        }
        Posterior::Grid(grid) => {
            if grid.free != problem.free() {
                return Err(InferError::Config(
                    "posterior free literals do not match the problem".into(),
                ));
            }
            ((0..grid.len()).map(|i| grid.point(i)).collect(), grid.mass.clone())
        }
    };
    let mut target_values = Vec::with_capacity(points.len());
    for point in &points {
        let values = evaluate_values(problem.model(), &problem.reward_table(point))?;
        target_values.push(values.require(target)?);
    }
    Ok(summarize_weighted(target.clone(), &target_values, &weights))
}

/// V(target) as an affine function of the free rewards: the value at all
/// free rewards zero, plus one slope per free literal. Exact because the
/// whole propagation is linear in the reward table.
pub(crate) fn value_decomposition(
    problem: &InferenceProblem,
    target: &Literal,
) -> Result<(f64, Vec<f64>), InferError> {
    let zeros = vec![0.0; problem.free().len()];
    let value_at = |point: &[f64]| -> Result<f64, InferError> {
        let values = evaluate_values(problem.model(), &problem.reward_table(point))?;
        Ok(values.require(target)?)
    };
    let base = value_at(&zeros)?;
    let mut slopes = Vec::with_capacity(problem.free().len());
    for j in 0..problem.free().len() {
        let mut unit = zeros.clone();
        unit[j] = 1.0;
        slopes.push(value_at(&unit)? - base);
    }
    Ok((base, slopes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        generalize_model, generalize_problem, miriam_model, vaccination_choice,
    };
    use approx::assert_abs_diff_eq;

    fn lit(name: &str, polarity: bool) -> Literal {
        Literal::new(name, polarity)
    }

    fn free_flu() -> Vec<(Literal, GaussianPrior)> {
        vec![(lit("Flu", true), GaussianPrior::default())]
    }

    fn report(literal: Literal, reported: f64, sigma: f64) -> Observation {
        Observation::ValueReport {
            literal,
            reported,
            sigma,
        }
    }

    #[test]
    fn empty_observations_have_zero_log_likelihood() {
        let problem =
            InferenceProblem::new(generalize_model(), RewardTable::new(), free_flu(), vec![])
                .unwrap();
        assert_eq!(log_likelihood(&problem, &[-3.0]).unwrap(), 0.0);
    }

    #[test]
    fn choice_log_likelihood_frozen_value() {
        // V gap between vaccinating and not is 7.5 at r = −10, so the choice
        // carries log σ(7.5).
        let problem = generalize_problem(1);
        assert_abs_diff_eq!(
            log_likelihood(&problem, &[-10.0]).unwrap(),
            -5.529314753607964e-4,
            epsilon = 1e-12
        );
    }

    #[test]
    fn report_log_likelihood_frozen_value() {
        let mut fixed = RewardTable::new();
        fixed.set(lit("Flu", true), -10.0);
        let problem = InferenceProblem::new(
            miriam_model(),
            fixed,
            vec![],
            vec![report(lit("Flu", true), -9.0, 1.0)],
        )
        .unwrap();
        // one sd off the true value, unit noise
        assert_abs_diff_eq!(
            log_likelihood(&problem, &[]).unwrap(),
            -1.4189385332046727,
            epsilon = 1e-12
        );
    }

    #[test]
    fn log_posterior_without_observations_is_the_prior() {
        let problem =
            InferenceProblem::new(generalize_model(), RewardTable::new(), free_flu(), vec![])
                .unwrap();
        let prior = GaussianPrior::default();
        for x in [-7.0, 0.0, 2.5] {
            assert_abs_diff_eq!(
                log_posterior(&problem, &[x]).unwrap(),
                prior.log_density(x),
                epsilon = 1e-12
            );
        }
        // the prior mean is the mode
        let at_mean = log_posterior(&problem, &[0.0]).unwrap();
        assert!(at_mean > log_posterior(&problem, &[2.0]).unwrap());
        assert!(at_mean > log_posterior(&problem, &[-2.0]).unwrap());
    }

    #[test]
    fn posterior_prefers_fearing_the_flu_after_a_vaccination_choice() {
        let problem = generalize_problem(1);
        assert!(
            log_posterior(&problem, &[-10.0]).unwrap()
                > log_posterior(&problem, &[10.0]).unwrap()
        );
    }

    #[test]
    fn choice_likelihood_increases_with_the_value_gap() {
        let problem = generalize_problem(1);
        // V(chosen) − V(other) = −0.75r grows as r falls
        let ll_strong = log_likelihood(&problem, &[-10.0]).unwrap();
        let ll_mild = log_likelihood(&problem, &[-5.0]).unwrap();
        let ll_flat = log_likelihood(&problem, &[0.0]).unwrap();
        assert!(ll_strong > ll_mild);
        assert!(ll_mild > ll_flat);
    }

    #[test]
    fn choice_probabilities_normalize() {
        let model = generalize_model();
        let values = evaluate_values(&model, &RewardTable::from_pairs([(lit("Flu", true), -10.0)]))
            .unwrap();
        let options = vec![lit("Vaccinated", true), lit("Vaccinated", false)];
        let total: f64 = options
            .iter()
            .map(|chosen| {
                let obs = Observation::Choice {
                    options: options.clone(),
                    chosen: chosen.clone(),
                    beta: 1.0,
                };
                observation_log_likelihood(&values, &obs).unwrap().exp()
            })
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rationality_scale_never_flips_the_argmax() {
        let model = generalize_model();
        let values = evaluate_values(&model, &RewardTable::from_pairs([(lit("Flu", true), -10.0)]))
            .unwrap();
        let options = vec![lit("Vaccinated", true), lit("Vaccinated", false)];
        for beta in [0.1, 1.0, 10.0] {
            let ll = |chosen: &Literal| {
                observation_log_likelihood(
                    &values,
                    &Observation::Choice {
                        options: options.clone(),
                        chosen: chosen.clone(),
                        beta,
                    },
                )
                .unwrap()
            };
            assert!(ll(&options[0]) > ll(&options[1]), "beta {beta}");
        }
    }

    #[test]
    fn mh_is_deterministic_per_seed() {
        let problem = generalize_problem(1);
        let config = MhConfig {
            samples: 1_500,
            burn_in: 500,
            step_size: 0.5,
        };
        let a = mh_sample(&problem, &config, 11).unwrap();
        let b = mh_sample(&problem, &config, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.draws.len(), 1_000);
        let c = mh_sample(&problem, &config, 12).unwrap();
        assert_ne!(a.draws, c.draws);
    }

    #[test]
    fn mh_recovers_the_prior_without_observations() {
        let problem =
            InferenceProblem::new(generalize_model(), RewardTable::new(), free_flu(), vec![])
                .unwrap();
        let samples = mh_sample(&problem, &MhConfig::default(), 7).unwrap();
        let xs = samples.coordinate(0);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
        assert!(mean.abs() < 0.3, "prior mean drifted to {mean}");
        assert!((sd - 5.0).abs() < 0.5, "prior sd came out as {sd}");
    }

    #[test]
    fn mh_rejects_bad_config() {
        let problem = generalize_problem(1);
        let bad = MhConfig {
            samples: 10,
            ..MhConfig::default()
        };
        assert!(matches!(
            mh_sample(&problem, &bad, 0),
            Err(InferError::Sampler(SamplerError::Config(_)))
        ));
    }

    fn default_grid() -> GridSpec {
        GridSpec::new(-20.0, 20.0, 0.05)
    }

    #[test]
    fn symmetric_prior_grid_splits_evenly() {
        let problem =
            InferenceProblem::new(generalize_model(), RewardTable::new(), free_flu(), vec![])
                .unwrap();
        let grid = grid_posterior(&problem, &[default_grid()]).unwrap();
        let below = grid.prob_below(0, 0.0);
        // exactly half the off-zero mass; the cell at zero carries the rest
        assert!((below - 0.5).abs() < 5e-3, "P(r<0) = {below}");
        assert_abs_diff_eq!(grid.mean(0), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn one_choice_shifts_the_posterior_negative() {
        let problem = generalize_problem(1);
        let grid = grid_posterior(&problem, &[default_grid()]).unwrap();
        let below = grid.prob_below(0, 0.0);
        assert!(below > 0.5);
        assert_abs_diff_eq!(below, 0.861794, epsilon = 1e-5);
    }

    #[test]
    fn five_choices_concentrate_the_posterior() {
        let problem = generalize_problem(5);
        let grid = grid_posterior(&problem, &[default_grid()]).unwrap();
        assert_abs_diff_eq!(grid.mean(0), -5.466088, epsilon = 1e-5);
        assert_abs_diff_eq!(grid.sd(0), 2.878977, epsilon = 1e-5);
        assert_abs_diff_eq!(grid.prob_below(0, 0.0), 0.995989, epsilon = 1e-5);
    }

    #[test]
    fn stated_vaccination_value_pins_the_flu_reward() {
        // V(Vaccinated=true) = −0.375r, so a reported 3.75 at low noise puts
        // the mode on r = −10.
        let problem = InferenceProblem::new(
            generalize_model(),
            RewardTable::new(),
            free_flu(),
            vec![report(lit("Vaccinated", true), 3.75, 0.1)],
        )
        .unwrap();
        let grid = grid_posterior(&problem, &[default_grid()]).unwrap();
        assert!((grid.mode(0) - -10.0).abs() <= 0.05 + 1e-9);
        assert_abs_diff_eq!(grid.mean(0), -9.971636, epsilon = 1e-4);
    }

    #[test]
    fn grid_rejects_mismatched_or_oversized_requests() {
        let problem = generalize_problem(1);
        assert!(matches!(
            grid_posterior(&problem, &[]),
            Err(InferError::Config(_))
        ));
        let wide = InferenceProblem::new(
            generalize_model(),
            RewardTable::new(),
            vec![
                (lit("Flu", true), GaussianPrior::default()),
                (lit("Flu", false), GaussianPrior::default()),
                (lit("HandWash", true), GaussianPrior::default()),
                (lit("HandWash", false), GaussianPrior::default()),
            ],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            grid_posterior(&wide, &[default_grid(); 4]),
            Err(InferError::Sampler(SamplerError::GridTooLarge(_)))
        ));
    }

    #[test]
    fn predict_with_fixed_rewards_is_degenerate() {
        let mut fixed = RewardTable::new();
        fixed.set(lit("Flu", true), -10.0);
        let problem =
            InferenceProblem::new(generalize_model(), fixed, vec![], vec![]).unwrap();
        let grid = grid_posterior(&problem, &[]).unwrap();
        let summary =
            predict_value(&problem, Posterior::Grid(&grid), &lit("HandWash", true)).unwrap();
        assert_abs_diff_eq!(summary.mean, 1.75, epsilon = 1e-12);
        assert_eq!(summary.sd, 0.0);
        assert_eq!(summary.prob_positive, 1.0);
    }

    #[test]
    fn predict_constant_target_is_zero() {
        let problem =
            InferenceProblem::new(generalize_model(), RewardTable::new(), vec![], vec![])
                .unwrap();
        let grid = grid_posterior(&problem, &[]).unwrap();
        let summary =
            predict_value(&problem, Posterior::Grid(&grid), &lit("Vaccinated", true)).unwrap();
        assert_eq!((summary.mean, summary.sd), (0.0, 0.0));
    }

    #[test]
    fn handwash_predictive_sign_tracks_the_reward_sign() {
        // V(HandWash=true) = −0.175r is positive exactly when r < 0, and the
        // grid pushforward preserves point masses, so the probabilities agree
        // exactly.
        let problem = generalize_problem(1);
        let grid = grid_posterior(&problem, &[default_grid()]).unwrap();
        let summary =
            predict_value(&problem, Posterior::Grid(&grid), &lit("HandWash", true)).unwrap();
        assert_abs_diff_eq!(
            summary.prob_positive,
            grid.prob_below(0, 0.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn predict_validates_inputs() {
        let problem = generalize_problem(1);
        let grid = grid_posterior(&problem, &[default_grid()]).unwrap();
        assert!(matches!(
            predict_value(&problem, Posterior::Grid(&grid), &lit("Ghost", true)),
            Err(InferError::Model(ModelError::UnknownVariable(_)))
        ));
        let other = InferenceProblem::new(
            generalize_model(),
            RewardTable::new(),
            vec![(lit("Flu", false), GaussianPrior::default())],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            predict_value(&other, Posterior::Grid(&grid), &lit("HandWash", true)),
            Err(InferError::Config(_))
        ));
    }

    #[test]
    fn decomposition_matches_direct_evaluation() {
        let problem = generalize_problem(0);
        let (base, slopes) = value_decomposition(&problem, &lit("HandWash", true)).unwrap();
        assert_abs_diff_eq!(base, 0.0, epsilon = 1e-12);
        assert_eq!(slopes.len(), 1);
        assert_abs_diff_eq!(slopes[0], -0.175, epsilon = 1e-12);
        for r in [-10.0, 0.0, 4.0] {
            let values =
                evaluate_values(problem.model(), &problem.reward_table(&[r])).unwrap();
            assert_abs_diff_eq!(
                values.get(&lit("HandWash", true)).unwrap(),
                base + slopes[0] * r,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn problem_construction_rejects_bad_inputs() {
        let model = generalize_model;
        // free and fixed overlap
        let mut fixed = RewardTable::new();
        fixed.set(lit("Flu", true), -10.0);
        assert!(matches!(
            InferenceProblem::new(model(), fixed, free_flu(), vec![]),
            Err(InferError::Config(_))
        ));
        // duplicate free literal
        let doubled = vec![
            (lit("Flu", true), GaussianPrior::default()),
            (lit("Flu", true), GaussianPrior::default()),
        ];
        assert!(matches!(
            InferenceProblem::new(model(), RewardTable::new(), doubled, vec![]),
            Err(InferError::Config(_))
        ));
        // bad prior
        let bad_prior = vec![(lit("Flu", true), GaussianPrior::new(0.0, 0.0))];
        assert!(matches!(
            InferenceProblem::new(model(), RewardTable::new(), bad_prior, vec![]),
            Err(InferError::Config(_))
        ));
        // non-controllable choice option
        let obs = Observation::Choice {
            options: vec![lit("Flu", true), lit("Flu", false)],
            chosen: lit("Flu", true),
            beta: 1.0,
        };
        assert!(matches!(
            InferenceProblem::new(model(), RewardTable::new(), free_flu(), vec![obs]),
            Err(InferError::Config(_))
        ));
        // chosen not among options
        let obs = Observation::Choice {
            options: vec![lit("Vaccinated", true), lit("Vaccinated", false)],
            chosen: lit("HandWash", true),
            beta: 1.0,
        };
        assert!(matches!(
            InferenceProblem::new(model(), RewardTable::new(), free_flu(), vec![obs]),
            Err(InferError::Config(_))
        ));
        // sigma must be positive
        let obs = report(lit("Flu", true), 1.0, 0.0);
        assert!(matches!(
            InferenceProblem::new(model(), RewardTable::new(), free_flu(), vec![obs]),
            Err(InferError::Config(_))
        ));
        // one vaccination choice is fine
        assert!(InferenceProblem::new(
            model(),
            RewardTable::new(),
            free_flu(),
            vec![vaccination_choice()]
        )
        .is_ok());
    }
}
