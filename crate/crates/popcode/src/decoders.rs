//! Decoder functions mapping a noisy population response to a point
//! estimate on the estimation scale.
//!
//! Four decoders are provided: the mode-value decoder (MVD) picks the
//! preferred value of a maximally firing neuron, the weighted-average
//! decoder (WAD) takes the response-weighted mean of preferred values, the
//! maximum-likelihood decoder (MLD) maximizes the Poisson likelihood of the
//! observed counts over a stimulus grid, and the maximum-a-posteriori
//! decoder (MAD) maximizes the likelihood weighted by a prior.
//!
//! Likelihood work happens in the log domain: the product of per-neuron
//! Poisson terms underflows already for modest populations, while its log
//! `sum_j [ r_j ln f_{p_j}(s) - f_{p_j}(s) ]` (the count-factorial term is
//! independent of `s` and dropped) is well conditioned. Per-population
//! tables of `ln f_{p_j}(s_k)` and `sum_j f_{p_j}(s_k)` are computed once
//! and shared across trials.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EstimationScale, Population};
use crate::noise::PopulationResponse;

/// Default stimulus grid step in stars: 401 points on the 5-star scale.
pub const DEFAULT_GRID_STEP: f64 = 0.01;

/// Equidistant discretization of the estimation scale used for likelihood
/// and posterior maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct SGrid {
    scale: EstimationScale,
    step: f64,
    points: Vec<f64>,
}

impl SGrid {
    pub fn new(scale: EstimationScale, step: f64) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive and finite, got {step}"
            )));
        }
        let intervals = (scale.width() / step).round();
        if intervals < 1.0 || (intervals * step - scale.width()).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "scale width {} is not an integer multiple of step {step}",
                scale.width()
            )));
        }
        let intervals = intervals as usize;
        let mut points: Vec<f64> = (0..=intervals).map(|k| scale.lo() + k as f64 * step).collect();
        points[intervals] = scale.hi();
        Ok(Self { scale, step, points })
    }

    /// Grid with the default 0.01-star step.
    pub fn with_default_step(scale: EstimationScale) -> Result<Self> {
        Self::new(scale, DEFAULT_GRID_STEP)
    }

    pub fn scale(&self) -> &EstimationScale {
        &self.scale
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Prior belief about the stimulus, defined over an [`SGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prior {
    /// Uninformative prior; the MAD reduces to the MLD.
    Flat,
    Gaussian { mean: f64, variance: f64 },
    /// Probabilities per grid point; nonnegative, summing to 1.
    Histogram(Vec<f64>),
}

/// Log-prior evaluated on a grid, ready to add to log-likelihoods.
/// Zero-probability histogram points carry `-inf` and so can never win the
/// posterior argmax. A flat prior stores no terms at all, which keeps MAD
/// decodes bitwise identical to MLD decodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPriorTable {
    terms: Option<Vec<f64>>,
}

impl LogPriorTable {
    pub fn flat() -> Self {
        Self { terms: None }
    }

    pub fn new(prior: &Prior, grid: &SGrid) -> Result<Self> {
        match prior {
            Prior::Flat => Ok(Self::flat()),
            Prior::Gaussian { mean, variance } => {
                if !variance.is_finite() || *variance <= 0.0 {
                    return Err(Error::InvalidPrior(format!(
                        "Gaussian prior variance must be positive, got {variance}"
                    )));
                }
                if !mean.is_finite() {
                    return Err(Error::InvalidPrior(format!(
                        "Gaussian prior mean must be finite, got {mean}"
                    )));
                }
                let inv = 1.0 / (2.0 * variance);
                let terms = grid
                    .points()
                    .iter()
                    .map(|&s| {
                        let d = s - mean;
                        -d * d * inv
                    })
                    .collect();
                Ok(Self { terms: Some(terms) })
            }
            Prior::Histogram(probs) => {
                if probs.len() != grid.len() {
                    return Err(Error::InvalidPrior(format!(
                        "histogram prior has {} entries for a {}-point grid",
                        probs.len(),
                        grid.len()
                    )));
                }
                if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
                    return Err(Error::InvalidPrior(
                        "histogram prior entries must be finite and nonnegative".into(),
                    ));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidPrior(format!(
                        "histogram prior sums to {total}, expected 1"
                    )));
                }
                if !probs.iter().any(|&p| p > 0.0) {
                    return Err(Error::InvalidPrior(
                        "prior is identically zero on the grid".into(),
                    ));
                }
                let terms = probs
                    .iter()
                    .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
                    .collect();
                Ok(Self { terms: Some(terms) })
            }
        }
    }

    pub fn is_flat(&self) -> bool {
        self.terms.is_none()
    }
}

/// Which decoder function to apply; the MAD carries its prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Mvd,
    Wad,
    Mld,
    Mad(Prior),
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Mvd => "mvd",
            DecoderKind::Wad => "wad",
            DecoderKind::Mld => "mld",
            DecoderKind::Mad(_) => "mad",
        }
    }

    /// The paper's default MAD prior: Gaussian with mean 3 and variance 0.75.
    pub fn mad_default() -> Self {
        DecoderKind::Mad(Prior::Gaussian { mean: 3.0, variance: 0.75 })
    }
}

/// Per-population tables for likelihood decoding: `ln f_{p_j}(s_k)` per
/// neuron and grid point, and `sum_j f_{p_j}(s_k)` per grid point.
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct LikelihoodTables {
    grid: SGrid,
    neurons: usize,
    log_rates: Vec<f64>, // row-major: neuron j occupies [j * grid.len() ..]
    rate_sums: Vec<f64>,
}

impl LikelihoodTables {
    pub fn new(pop: &Population, grid: &SGrid) -> Self {
        let k = grid.len();
        let mut log_rates = vec![0.0f64; pop.len() * k];
        let mut rate_sums = vec![0.0f64; k];
        for j in 0..pop.len() {
            let row = &mut log_rates[j * k..(j + 1) * k];
            for (slot, (&s, sum)) in row.iter_mut().zip(grid.points().iter().zip(&mut rate_sums)) {
                let f = pop.rate(j, s);
                *slot = f.ln();
                *sum += f;
            }
        }
        Self { grid: grid.clone(), neurons: pop.len(), log_rates, rate_sums }
    }

    pub fn grid(&self) -> &SGrid {
        &self.grid
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    /// Log-likelihood at every grid point, written into `scores`.
    pub fn fill_log_likelihood(&self, response: &PopulationResponse, scores: &mut Vec<f64>) {
        assert_eq!(response.len(), self.neurons, "response length must match population");
        let k = self.grid.len();
        scores.clear();
        scores.extend(self.rate_sums.iter().map(|&sum| -sum));
        for (j, &count) in response.counts().iter().enumerate() {
            if count == 0 {
                continue; // adding 0 * ln f changes nothing
            }
            let r = count as f64;
            let row = &self.log_rates[j * k..(j + 1) * k];
            for (score, &log_f) in scores.iter_mut().zip(row) {
                *score += r * log_f;
            }
        }
    }

    /// Grid argmax of log-likelihood plus log-prior; ties resolve toward
    /// the lowest grid point.
    pub fn decode_with_scratch(
        &self,
        response: &PopulationResponse,
        prior: &LogPriorTable,
        scratch: &mut Vec<f64>,
    ) -> f64 {
        self.fill_log_likelihood(response, scratch);
        if let Some(terms) = &prior.terms {
            for (score, &t) in scratch.iter_mut().zip(terms) {
                *score += t;
            }
        }
        let mut best = f64::NEG_INFINITY;
        let mut best_k = 0usize;
        for (k, &score) in scratch.iter().enumerate() {
            if score > best {
                best = score;
                best_k = k;
            }
        }
        self.grid.points()[best_k]
    }
}

/// Mode-value decoder: the preferred value of a maximally firing neuron.
/// Ties (including an all-zero response) are broken uniformly at random
/// from the caller's stream.
pub fn decode_mvd<R: Rng + ?Sized>(
    response: &PopulationResponse,
    pop: &Population,
    rng: &mut R,
) -> f64 {
    assert_eq!(response.len(), pop.len(), "response length must match population");
    let max = *response.counts().iter().max().expect("population is nonempty");
    let tied = response.counts().iter().filter(|&&c| c == max).count();
    let pick = if tied == 1 { 0 } else { rng.random_range(0..tied) };
    let mut seen = 0usize;
    for (j, &c) in response.counts().iter().enumerate() {
        if c == max {
            if seen == pick {
                return pop.preferred()[j];
            }
            seen += 1;
        }
    }
    unreachable!("at least one neuron attains the maximum")
}

/// Weighted-average decoder: `sum_j r_j p_j / sum_j r_j`. Undefined for an
/// all-zero response.
pub fn decode_wad(response: &PopulationResponse, pop: &Population) -> Result<f64> {
    assert_eq!(response.len(), pop.len(), "response length must match population");
    let mut weighted = 0.0f64;
    let mut total = 0.0f64;
    for (&c, &p) in response.counts().iter().zip(pop.preferred()) {
        let r = c as f64;
        weighted += r * p;
        total += r;
    }
    if total == 0.0 {
        return Err(Error::UndefinedEstimate);
    }
    Ok((weighted / total).clamp(pop.scale().lo(), pop.scale().hi()))
}

/// Log of the Poisson likelihood of a response at stimulus `s`, dropping
/// the `s`-independent `ln(r_j!)` terms:
/// `sum_j r_j ln f_{p_j}(s) - sum_j f_{p_j}(s)`.
pub fn log_likelihood(response: &PopulationResponse, pop: &Population, s: f64) -> f64 {
    assert_eq!(response.len(), pop.len(), "response length must match population");
    let mut counts_term = 0.0f64;
    let mut rate_sum = 0.0f64;
    for (j, &c) in response.counts().iter().enumerate() {
        let f = pop.rate(j, s);
        rate_sum += f;
        if c > 0 {
            counts_term += c as f64 * f.ln();
        }
    }
    counts_term - rate_sum
}

/// Maximum-likelihood decoder on a grid; ties toward the lowest grid point.
pub fn decode_mld(response: &PopulationResponse, tables: &LikelihoodTables) -> f64 {
    let mut scratch = Vec::with_capacity(tables.grid.len());
    tables.decode_with_scratch(response, &LogPriorTable::flat(), &mut scratch)
}

/// Maximum-a-posteriori decoder: grid argmax of log-likelihood plus
/// log-prior. With a flat prior this is bitwise identical to the MLD.
pub fn decode_mad(
    response: &PopulationResponse,
    tables: &LikelihoodTables,
    prior: &LogPriorTable,
) -> f64 {
    let mut scratch = Vec::with_capacity(tables.grid.len());
    tables.decode_with_scratch(response, prior, &mut scratch)
}
