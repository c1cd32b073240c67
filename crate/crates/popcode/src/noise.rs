//! Poisson corruption of static responses and reproducible RNG streams.
//!
//! Each neuron's response to a fixed stimulus is a Poisson draw around its
//! tuning-curve rate, independent across neurons and trials. All randomness
//! flows through [`RngStream`]: a (seed, stream) pair that reproduces the
//! same sequence on every run and platform, so parallel sweeps can hand each
//! grid cell and trial its own stream without coordinating.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CognitionVector, EstimationScale, Population};

/// Top-level substream indices, one per pipeline stage, so stages never
/// share random draws even under one master seed.
pub mod context {
    pub const GENDATA: u64 = 1;
    pub const SIMULATE: u64 = 2;
    pub const DECODE: u64 = 3;
    pub const LIBRARY: u64 = 4;
    pub const TARGET: u64 = 5;
    pub const EEG: u64 = 6;
}

/// A named position in the global random sequence. Identical `(seed, stream)`
/// pairs yield identical draws; substreams derived with the same child index
/// are identical irrespective of scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn root(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// Child stream for a work item (grid cell, trial, neuron, ...).
    /// Mixing instead of arithmetic keeps sibling hierarchies from aliasing.
    pub fn substream(&self, child: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(child.wrapping_add(0x9E37_79B9_7F4A_7C15))),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One realization of a population's noisy activity: spike counts per neuron
/// in a 1-second window, so counts read directly as Hz.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationResponse {
    counts: Vec<u64>,
}

impl PopulationResponse {
    pub fn new(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// One draw from `Poisson(lambda)`. `lambda = 0` yields 0; negative or
/// non-finite rates are rejected.
pub fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Poisson rate must be finite and nonnegative, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(lambda)
        .map_err(|e| Error::InvalidParameter(format!("Poisson rate {lambda}: {e}")))?;
    let draw: f64 = dist.sample(rng);
    Ok(draw as u64)
}

/// Noisy population response: `counts[j] ~ Poisson(f_{p_j}(s))`,
/// independently per neuron.
pub fn sample_population_response<R: Rng + ?Sized>(
    xi: &CognitionVector,
    scale: &EstimationScale,
    rng: &mut R,
) -> Result<PopulationResponse> {
    let pop = Population::for_cognition(xi, *scale)?;
    sample_response_for(&pop, xi.stimulus, rng)
}

/// Same as [`sample_population_response`] for an already-built population.
pub fn sample_response_for<R: Rng + ?Sized>(
    pop: &Population,
    stimulus: f64,
    rng: &mut R,
) -> Result<PopulationResponse> {
    let mut counts = Vec::with_capacity(pop.len());
    for j in 0..pop.len() {
        counts.push(sample_poisson(pop.rate(j, stimulus), rng)?);
    }
    Ok(PopulationResponse { counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::static_population_response;

    #[test]
    fn zero_rate_always_yields_zero() {
        let mut rng = RngStream::root(7).rng();
        for _ in 0..100 {
            assert_eq!(sample_poisson(0.0, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn rejects_invalid_rates() {
        let mut rng = RngStream::root(7).rng();
        assert!(sample_poisson(-1.0, &mut rng).is_err());
        assert!(sample_poisson(f64::NAN, &mut rng).is_err());
        assert!(sample_poisson(f64::INFINITY, &mut rng).is_err());
    }

    #[test]
    fn poisson_mean_and_variance_at_peak_rate() {
        let lambda = 7.7926;
        let mut rng = RngStream::root(20240301).substream(1).rng();
        let n = 1_000_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let x = sample_poisson(lambda, &mut rng).unwrap() as f64;
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!((mean - lambda).abs() < 0.01, "mean {mean}");
        assert!((var - 7.79).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn poisson_mean_equals_variance_across_rates() {
        // Monte-Carlo check at 3-standard-error bands, 10^6 draws each.
        let n = 1_000_000usize;
        for (i, &lambda) in [0.5, 5.0, 50.0, 400.0].iter().enumerate() {
            let mut rng = RngStream::root(99).substream(i as u64).rng();
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..n {
                let x = sample_poisson(lambda, &mut rng).unwrap() as f64;
                sum += x;
                sumsq += x * x;
            }
            let mean = sum / n as f64;
            let var = sumsq / n as f64 - mean * mean;
            let se_mean = (lambda / n as f64).sqrt();
            // Var(S^2) ~ (mu4 - sigma^4)/n with mu4 = lambda(1 + 3 lambda).
            let se_var = ((lambda + 2.0 * lambda * lambda) / n as f64).sqrt();
            assert!((mean - lambda).abs() < 3.0 * se_mean, "λ={lambda} mean={mean}");
            assert!((var - lambda).abs() < 3.0 * se_var, "λ={lambda} var={var}");
        }
    }

    #[test]
    fn identical_streams_reproduce_sequences() {
        let stream = RngStream::root(42).substream(5);
        let a: Vec<u64> = {
            let mut rng = stream.rng();
            (0..64).map(|_| sample_poisson(7.5, &mut rng).unwrap()).collect()
        };
        let b: Vec<u64> = {
            let mut rng = stream.rng();
            (0..64).map(|_| sample_poisson(7.5, &mut rng).unwrap()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn sibling_substreams_differ() {
        let root = RngStream::root(42);
        let a: u64 = root.substream(0).rng().random();
        let b: u64 = root.substream(1).rng().random();
        let c: u64 = root.substream(0).substream(1).rng().random();
        assert_ne!(a, b);
        assert_ne!(b, c);
    }

    #[test]
    fn successive_population_draws_differ() {
        let scale = EstimationScale::default();
        let xi = CognitionVector::new(11, 7.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let mut rng = RngStream::root(3).rng();
        let first = sample_population_response(&xi, &scale, &mut rng).unwrap();
        let second = sample_population_response(&xi, &scale, &mut rng).unwrap();
        assert_ne!(first, second);
    }

    #[test]
    fn per_neuron_means_match_static_response() {
        let scale = EstimationScale::default();
        let xi = CognitionVector::new(11, 7.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let statics = static_population_response(&xi, &scale).unwrap();
        let trials = 100_000usize;
        let mut rng = RngStream::root(2718).rng();
        let mut sums = vec![0.0f64; xi.n];
        for _ in 0..trials {
            let resp = sample_population_response(&xi, &scale, &mut rng).unwrap();
            for (acc, &c) in sums.iter_mut().zip(resp.counts()) {
                *acc += c as f64;
            }
        }
        for (j, &rate) in statics.rates().iter().enumerate() {
            let mean = sums[j] / trials as f64;
            let se = (rate / trials as f64).sqrt();
            assert!(
                (mean - rate).abs() < 3.0 * se,
                "neuron {j}: empirical {mean} vs static {rate}"
            );
        }
    }

    #[test]
    fn offset_only_limit_is_poisson_at_offset() {
        let scale = EstimationScale::default();
        let xi = CognitionVector::new(5, 1e-12, 1.0, 5.0, 3.0, &scale).unwrap();
        let trials = 200_000usize;
        let mut rng = RngStream::root(31).rng();
        let mut sum = 0.0;
        for _ in 0..trials {
            let resp = sample_population_response(&xi, &scale, &mut rng).unwrap();
            sum += resp.total() as f64;
        }
        let mean = sum / (trials * 5) as f64;
        let se = (5.0 / (trials * 5) as f64).sqrt();
        assert!((mean - 5.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn neuron_counts_are_uncorrelated() {
        let scale = EstimationScale::default();
        let xi = CognitionVector::new(11, 7.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let trials = 100_000usize;
        let mut rng = RngStream::root(1113).rng();
        // Track two neuron pairs: adjacent at the bump, and far apart.
        let pairs = [(5usize, 6usize), (0usize, 10usize)];
        let mut stats = [[0.0f64; 5]; 2]; // sum_x, sum_y, sum_xx, sum_yy, sum_xy
        for _ in 0..trials {
            let resp = sample_population_response(&xi, &scale, &mut rng).unwrap();
            let c = resp.counts();
            for (k, &(a, b)) in pairs.iter().enumerate() {
                let (x, y) = (c[a] as f64, c[b] as f64);
                stats[k][0] += x;
                stats[k][1] += y;
                stats[k][2] += x * x;
                stats[k][3] += y * y;
                stats[k][4] += x * y;
            }
        }
        let n = trials as f64;
        for (k, s) in stats.iter().enumerate() {
            let cov = s[4] / n - (s[0] / n) * (s[1] / n);
            let vx = s[2] / n - (s[0] / n) * (s[0] / n);
            let vy = s[3] / n - (s[1] / n) * (s[1] / n);
            let corr = cov / (vx * vy).sqrt();
            assert!(corr.abs() < 0.01, "pair {k}: correlation {corr}");
        }
    }
}
