//! Shared posterior machinery: a seeded random-walk Metropolis–Hastings
//! chain, dense-grid quadrature, and weighted summary statistics.
//!
//! Both the generative learner ([`crate::infer`]) and the flat-utility
//! baseline ([`crate::baseline`]) run on exactly this machinery, so any
//! difference between their conclusions comes from what they compute a
//! posterior *over*, not from how they compute it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal as ProposalNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal as Gaussian};
use thiserror::Error;

use crate::model::Literal;

/// Most grid points a quadrature call will evaluate.
pub const GRID_POINT_CAP: usize = 1_000_000;
/// Most coordinates (free literals) a quadrature call will take on jointly.
pub const GRID_COORD_CAP: usize = 3;

/// Errors from sampler and grid configuration.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SamplerError {
    #[error("ConfigError: {0}")]
    Config(String),
    #[error("GridTooLargeError: {0}")]
    GridTooLarge(String),
}

/// Metropolis–Hastings chain settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhConfig {
    /// Total chain length, including burn-in.
    pub samples: usize,
    /// Leading steps to discard.
    pub burn_in: usize,
    /// Scale of the per-coordinate Gaussian random-walk proposal.
    pub step_size: f64,
}

impl Default for MhConfig {
    fn default() -> Self {
        MhConfig {
            samples: 10_000,
            burn_in: 2_000,
            step_size: 0.5,
        }
    }
}

impl MhConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.samples < 1_000 {
            return Err(SamplerError::Config(format!(
                "samples must be at least 1000, got {}",
                self.samples
            )));
        }
        if self.burn_in >= self.samples {
            return Err(SamplerError::Config(format!(
                "burn_in {} must be smaller than samples {}",
                self.burn_in, self.samples
            )));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(SamplerError::Config(format!(
                "step_size must be positive and finite, got {}",
                self.step_size
            )));
        }
        Ok(())
    }
}

/// Retained draws of a Metropolis–Hastings run, one scalar per free literal
/// per draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    /// The free literals, in coordinate order.
    pub free: Vec<Literal>,
    /// `samples − burn_in` retained parameter vectors.
    pub draws: Vec<Vec<f64>>,
    pub seed: u64,
    pub config: MhConfig,
    /// Accepted proposals over total proposals.
    pub acceptance_rate: f64,
}

impl PosteriorSamples {
    /// The retained draws of one coordinate.
    pub fn coordinate(&self, index: usize) -> Vec<f64> {
        self.draws.iter().map(|draw| draw[index]).collect()
    }
}

/// Runs a random-walk Metropolis–Hastings chain over `log_density`,
/// starting at `init`. Deterministic given (density, init, config, seed).
///
/// The config must already be validated; the density's own errors abort the
/// run. Returns the retained draws and the acceptance rate.
pub fn run_chain<E>(
    mut log_density: impl FnMut(&[f64]) -> Result<f64, E>,
    init: &[f64],
    config: &MhConfig,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, f64), E> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let proposal = ProposalNormal::new(0.0, config.step_size).expect("validated step size");
    let mut current = init.to_vec();
    let mut current_lp = log_density(&current)?;
    let mut draws = Vec::with_capacity(config.samples - config.burn_in);
    let mut accepted = 0usize;
    for step in 0..config.samples {
        let candidate: Vec<f64> = current.iter().map(|x| x + proposal.sample(&mut rng)).collect();
        let candidate_lp = log_density(&candidate)?;
        let log_ratio = candidate_lp - current_lp;
        if log_ratio >= 0.0 || rng.gen::<f64>() < log_ratio.exp() {
            current = candidate;
            current_lp = candidate_lp;
            accepted += 1;
        }
        if step >= config.burn_in {
            draws.push(current.clone());
        }
    }
    Ok((draws, accepted as f64 / config.samples as f64))
}

/// One coordinate's evaluation lattice: lo, lo+step, …, up to hi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        GridSpec { lo, hi, step }
    }

    /// The lattice points. Counts a final point that lands within 1e-6 steps
    /// of `hi` as on the grid, so decimal bounds like −20..20 @ 0.05 come
    /// out with the expected endpoint.
    pub fn points(&self) -> Result<Vec<f64>, SamplerError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.step.is_finite()) {
            return Err(SamplerError::Config(format!(
                "grid bounds must be finite, got {}:{}:{}",
                self.lo, self.hi, self.step
            )));
        }
        if self.step <= 0.0 || self.hi < self.lo {
            return Err(SamplerError::Config(format!(
                "grid needs step > 0 and hi >= lo, got {}:{}:{}",
                self.lo, self.hi, self.step
            )));
        }
        let span = (self.hi - self.lo) / self.step;
        let rounded = span.round();
        let intervals = if (span - rounded).abs() < 1e-6 {
            rounded as usize
        } else {
            span.floor() as usize
        };
        if intervals >= GRID_POINT_CAP {
            return Err(SamplerError::GridTooLarge(format!(
                "one axis alone would have {} points; the cap is {GRID_POINT_CAP}",
                intervals + 1
            )));
        }
        Ok((0..=intervals).map(|i| self.lo + i as f64 * self.step).collect())
    }
}

/// A normalized probability mass over the cartesian product of per-coordinate
/// lattices. Coordinate 0 varies fastest in the flat index.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    /// The free literals, in coordinate order.
    pub free: Vec<Literal>,
    /// One lattice per coordinate.
    pub axes: Vec<Vec<f64>>,
    /// Mass per flat index; sums to 1.
    pub mass: Vec<f64>,
}

impl GridPosterior {
    /// Evaluates `log_density` over the whole lattice product and normalizes.
    pub fn build<E: From<SamplerError>>(
        free: Vec<Literal>,
        axes: Vec<Vec<f64>>,
        mut log_density: impl FnMut(&[f64]) -> Result<f64, E>,
    ) -> Result<GridPosterior, E> {
        let mut total_points = 1usize;
        for axis in &axes {
            match total_points.checked_mul(axis.len()) {
                Some(n) if n <= GRID_POINT_CAP => total_points = n,
                _ => {
                    return Err(SamplerError::GridTooLarge(format!(
                        "grid over {} coordinates exceeds the {GRID_POINT_CAP}-point cap",
                        axes.len()
                    ))
                    .into())
                }
            }
        }
        let mut log_mass = Vec::with_capacity(total_points);
        let mut point = vec![0.0; axes.len()];
        for flat in 0..total_points {
            let mut rest = flat;
            for (k, axis) in axes.iter().enumerate() {
                point[k] = axis[rest % axis.len()];
                rest /= axis.len();
            }
            log_mass.push(log_density(&point)?);
        }
        let max = log_mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(SamplerError::Config(
                "posterior density is zero or undefined everywhere on the grid".into(),
            )
            .into());
        }
        let mut mass: Vec<f64> = log_mass.iter().map(|lp| (lp - max).exp()).collect();
        let total: f64 = mass.iter().sum();
        for m in &mut mass {
            *m /= total;
        }
        Ok(GridPosterior { free, axes, mass })
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// The coordinates of a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut rest = flat;
        self.axes
            .iter()
            .map(|axis| {
                let x = axis[rest % axis.len()];
                rest /= axis.len();
                x
            })
            .collect()
    }

    /// Mass marginalized onto one coordinate's lattice.
    pub fn marginal(&self, coord: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes[coord].len()];
        let mut stride = 1usize;
        for axis in &self.axes[..coord] {
            stride *= axis.len();
        }
        let n = self.axes[coord].len();
        for (flat, m) in self.mass.iter().enumerate() {
            out[flat / stride % n] += m;
        }
        out
    }

    pub fn mean(&self, coord: usize) -> f64 {
        self.axes[coord]
            .iter()
            .zip(self.marginal(coord))
            .map(|(x, m)| x * m)
            .sum()
    }

    pub fn sd(&self, coord: usize) -> f64 {
        let mean = self.mean(coord);
        let var: f64 = self.axes[coord]
            .iter()
            .zip(self.marginal(coord))
            .map(|(x, m)| (x - mean).powi(2) * m)
            .sum();
        var.max(0.0).sqrt()
    }

    /// P(coordinate < threshold), strict.
    pub fn prob_below(&self, coord: usize, threshold: f64) -> f64 {
        self.axes[coord]
            .iter()
            .zip(self.marginal(coord))
            .filter(|(x, _)| **x < threshold)
            .map(|(_, m)| m)
            .sum()
    }

    /// Flat index of the maximum-mass point; the lowest index wins ties.
    pub fn map_index(&self) -> usize {
        let mut best = 0usize;
        for (flat, m) in self.mass.iter().enumerate() {
            if *m > self.mass[best] {
                best = flat;
            }
        }
        best
    }

    /// One coordinate of the maximum-mass point.
    pub fn mode(&self, coord: usize) -> f64 {
        self.point(self.map_index())[coord]
    }
}

/// A predictive distribution over one target literal's value, summarized.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveSummary {
    pub target: Literal,
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    /// P(value > 0), strict.
    pub prob_positive: f64,
}

/// Summarizes weighted scalar outcomes: moments, inverse-CDF quantiles
/// (smallest value whose cumulative weight reaches the level), and the
/// fraction of weight strictly above zero.
pub fn summarize_weighted(target: Literal, values: &[f64], weights: &[f64]) -> PredictiveSummary {
    assert_eq!(values.len(), weights.len());
    assert!(!values.is_empty(), "cannot summarize an empty distribution");
    let total: f64 = weights.iter().sum();
    let mean: f64 = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
    let var: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| (v - mean).powi(2) * w)
        .sum::<f64>()
        / total;
    let prob_positive: f64 = values
        .iter()
        .zip(weights)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, w)| w)
        .sum::<f64>()
        / total;

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let quantile = |level: f64| -> f64 {
        let goal = level * total;
        let mut cumulative = 0.0;
        for &i in &order {
            cumulative += weights[i];
            if cumulative >= goal {
                return values[i];
            }
        }
        values[*order.last().unwrap()]
    };

    PredictiveSummary {
        target,
        mean,
        sd: var.max(0.0).sqrt(),
        q05: quantile(0.05),
        q50: quantile(0.50),
        q95: quantile(0.95),
        prob_positive,
    }
}

/// The summary of an exactly known Gaussian (sd 0 degenerates to a point
/// mass). Used where a posterior coordinate provably equals its prior.
pub fn gaussian_summary(target: Literal, mean: f64, sd: f64) -> PredictiveSummary {
    if sd == 0.0 {
        return PredictiveSummary {
            target,
            mean,
            sd: 0.0,
            q05: mean,
            q50: mean,
            q95: mean,
            prob_positive: if mean > 0.0 { 1.0 } else { 0.0 },
        };
    }
    let dist = Gaussian::new(mean, sd).expect("positive sd");
    PredictiveSummary {
        target,
        mean,
        sd,
        q05: dist.inverse_cdf(0.05),
        q50: mean,
        q95: dist.inverse_cdf(0.95),
        prob_positive: 1.0 - dist.cdf(0.0),
    }
}

/// Gaussian log-density, used by report likelihoods and priors.
pub(crate) fn gaussian_log_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    Gaussian::new(mean, sd).expect("positive sd").ln_pdf(x)
}
