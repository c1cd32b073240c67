//! Feedback distributions: Monte-Carlo decoding of noisy population
//! activity into binned rating distributions, and the Jensen-Shannon
//! divergence used to compare them.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoders::{
    decode_mvd, decode_wad, DecoderKind, LikelihoodTables, LogPriorTable, Prior, SGrid,
};
use crate::error::{Error, Result};
use crate::model::{CognitionVector, EstimationScale, Population};
use crate::noise::{sample_response_for, RngStream};

/// Trials per parallel work item. Any fixed value yields identical results;
/// this one amortizes stream setup without starving the scheduler.
const TRIAL_CHUNK: usize = 256;

/// How decoded estimates map onto discrete rating bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// Round half-up to the nearest integer star, clipped to the scale.
    /// The default: empirical ratings live on integer stars.
    IntegerStars,
    /// K equal-width intervals over the scale, right-closed at the top.
    Uniform(usize),
}

impl Binning {
    pub fn bin_count(&self, scale: &EstimationScale) -> Result<usize> {
        match *self {
            Binning::IntegerStars => {
                if scale.lo().fract() != 0.0 || scale.hi().fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "integer-star binning needs integer scale endpoints, got [{}, {}]",
                        scale.lo(),
                        scale.hi()
                    )));
                }
                Ok((scale.hi() - scale.lo()) as usize + 1)
            }
            Binning::Uniform(k) => {
                if k == 0 {
                    return Err(Error::InvalidParameter("uniform binning needs K >= 1".into()));
                }
                Ok(k)
            }
        }
    }

    /// Representative value of each bin: the star value, or the interval
    /// midpoint for uniform bins.
    pub fn centers(&self, scale: &EstimationScale) -> Result<Vec<f64>> {
        let k = self.bin_count(scale)?;
        Ok(match *self {
            Binning::IntegerStars => (0..k).map(|i| scale.lo() + i as f64).collect(),
            Binning::Uniform(_) => {
                let width = scale.width() / k as f64;
                (0..k).map(|i| scale.lo() + (i as f64 + 0.5) * width).collect()
            }
        })
    }
}

impl Default for Binning {
    fn default() -> Self {
        Binning::IntegerStars
    }
}

/// Bin index of an estimate on the scale.
pub fn bin_estimate(x: f64, scale: &EstimationScale, binning: Binning) -> Result<usize> {
    if !x.is_finite() || !scale.contains(x) {
        return Err(Error::InvalidParameter(format!(
            "estimate {x} lies outside the scale [{}, {}]",
            scale.lo(),
            scale.hi()
        )));
    }
    let k = binning.bin_count(scale)?;
    Ok(match binning {
        Binning::IntegerStars => {
            let star = (x + 0.5).floor().clamp(scale.lo(), scale.hi());
            (star - scale.lo()) as usize
        }
        Binning::Uniform(_) => {
            let width = scale.width() / k as f64;
            (((x - scale.lo()) / width).floor() as usize).min(k - 1)
        }
    })
}

/// A normalized probability vector over rating bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackDistribution {
    binning: Binning,
    probs: Vec<f64>,
}

impl FeedbackDistribution {
    pub fn new(binning: Binning, probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidParameter(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { binning, probs })
    }

    pub fn from_counts(binning: Binning, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidParameter("empty count vector".into()));
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(Self { binning, probs })
    }

    pub fn binning(&self) -> Binning {
        self.binning
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Mean over bin centers.
    pub fn mean(&self, scale: &EstimationScale) -> Result<f64> {
        let centers = self.binning.centers(scale)?;
        Ok(centers.iter().zip(&self.probs).map(|(&c, &p)| c * p).sum())
    }

    /// Standard deviation over bin centers (population formula).
    pub fn std(&self, scale: &EstimationScale) -> Result<f64> {
        let centers = self.binning.centers(scale)?;
        let mean = self.mean(scale)?;
        let var: f64 =
            centers.iter().zip(&self.probs).map(|(&c, &p)| p * (c - mean) * (c - mean)).sum();
        Ok(var.max(0.0).sqrt())
    }
}

/// Jensen-Shannon divergence with base-2 logarithms, bounded in [0, 1];
/// 0 means perfect agreement. `0 * log 0` is taken as 0.
pub fn jsd(p: &FeedbackDistribution, q: &FeedbackDistribution) -> Result<f64> {
    if p.binning != q.binning || p.probs.len() != q.probs.len() {
        return Err(Error::MismatchedBinning);
    }
    Ok(jsd_probs(&p.probs, &q.probs))
}

pub(crate) fn jsd_probs(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0f64;
    for (&a, &b) in p.iter().zip(q) {
        let mid = 0.5 * (a + b);
        if a > 0.0 {
            acc += 0.5 * a * (a / mid).log2();
        }
        if b > 0.0 {
            acc += 0.5 * b * (b / mid).log2();
        }
    }
    acc.clamp(0.0, 1.0)
}

/// A feedback simulation together with the raw (pre-binning) estimate
/// statistics of its trials.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackRun {
    pub distribution: FeedbackDistribution,
    pub estimate_mean: f64,
    /// Standard deviation of the decoded estimates (population formula).
    /// Unlike the binned distribution's std this does not saturate to zero
    /// once every estimate falls into one star bin.
    pub estimate_std: f64,
}

enum PreparedDecoder {
    Mvd,
    Wad,
    Grid { tables: LikelihoodTables, prior: LogPriorTable },
}

/// Reusable per-cognition-vector simulation state: population, likelihood
/// tables and prior are built once and shared by all trials.
pub struct FeedbackSimulator {
    pop: Population,
    stimulus: f64,
    binning: Binning,
    bins: usize,
    decoder: PreparedDecoder,
}

impl FeedbackSimulator {
    pub fn new(
        xi: &CognitionVector,
        scale: &EstimationScale,
        decoder: &DecoderKind,
        grid: &SGrid,
        binning: Binning,
    ) -> Result<Self> {
        let pop = Population::for_cognition(xi, *scale)?;
        let bins = binning.bin_count(scale)?;
        let decoder = match decoder {
            DecoderKind::Mvd => PreparedDecoder::Mvd,
            DecoderKind::Wad => PreparedDecoder::Wad,
            DecoderKind::Mld => PreparedDecoder::Grid {
                tables: LikelihoodTables::new(&pop, grid),
                prior: LogPriorTable::flat(),
            },
            DecoderKind::Mad(prior) => PreparedDecoder::Grid {
                tables: LikelihoodTables::new(&pop, grid),
                prior: LogPriorTable::new(prior, grid)?,
            },
        };
        Ok(Self { pop, stimulus: xi.stimulus, binning, bins, decoder })
    }

    /// One decoded estimate: sample a noisy response and decode it.
    /// Undefined WAD estimates surface as errors for the caller to retry.
    fn decode_once(&self, rng: &mut ChaCha8Rng, scratch: &mut Vec<f64>) -> Result<f64> {
        let response = sample_response_for(&self.pop, self.stimulus, rng)?;
        match &self.decoder {
            PreparedDecoder::Mvd => Ok(decode_mvd(&response, &self.pop, rng)),
            PreparedDecoder::Wad => decode_wad(&response, &self.pop),
            PreparedDecoder::Grid { tables, prior } => {
                Ok(tables.decode_with_scratch(&response, prior, scratch))
            }
        }
    }

    /// One accepted estimate, resampling undefined-estimate trials up to
    /// `retry_limit` consecutive times.
    fn accepted_estimate(
        &self,
        rng: &mut ChaCha8Rng,
        scratch: &mut Vec<f64>,
        retry_limit: usize,
    ) -> Result<f64> {
        for _ in 0..=retry_limit {
            match self.decode_once(rng, scratch) {
                Ok(est) => return Ok(est),
                Err(Error::UndefinedEstimate) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::DegenerateConfiguration(format!(
            "exceeded {retry_limit} consecutive undefined-estimate retries; \
             the configuration almost surely produces all-zero responses"
        )))
    }

    /// Empirical feedback distribution over `trials` independent decodes,
    /// with raw estimate statistics. Per-trial streams derive from the
    /// trial index, so results are identical under any parallel schedule.
    pub fn run(&self, trials: usize, stream: &RngStream) -> Result<FeedbackRun> {
        if trials == 0 {
            return Err(Error::InvalidParameter("trial count must be at least 1".into()));
        }
        let retry_limit = trials.saturating_mul(100);
        let scale = *self.pop.scale();
        let ranges: Vec<(usize, usize)> = (0..trials)
            .step_by(TRIAL_CHUNK)
            .map(|start| (start, (start + TRIAL_CHUNK).min(trials)))
            .collect();

        struct Partial {
            counts: Vec<u64>,
            sum: f64,
            sum_sq: f64,
        }

        let partials: Result<Vec<Partial>> = ranges
            .into_par_iter()
            .map(|(start, end)| {
                let mut counts = vec![0u64; self.bins];
                let mut sum = 0.0f64;
                let mut sum_sq = 0.0f64;
                let mut scratch = Vec::new();
                for trial in start..end {
                    let mut rng = stream.substream(trial as u64).rng();
                    let est = self.accepted_estimate(&mut rng, &mut scratch, retry_limit)?;
                    counts[bin_estimate(est, &scale, self.binning)?] += 1;
                    sum += est;
                    sum_sq += est * est;
                }
                Ok(Partial { counts, sum, sum_sq })
            })
            .collect();

        // Sequential fold in chunk order keeps the float sums deterministic.
        let mut counts = vec![0u64; self.bins];
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for partial in partials? {
            for (acc, c) in counts.iter_mut().zip(partial.counts) {
                *acc += c;
            }
            sum += partial.sum;
            sum_sq += partial.sum_sq;
        }

        let m = trials as f64;
        let mean = sum / m;
        let var = (sum_sq / m - mean * mean).max(0.0);
        Ok(FeedbackRun {
            distribution: FeedbackDistribution::from_counts(self.binning, &counts)?,
            estimate_mean: mean,
            estimate_std: var.sqrt(),
        })
    }

    pub fn simulate(&self, trials: usize, stream: &RngStream) -> Result<FeedbackDistribution> {
        Ok(self.run(trials, stream)?.distribution)
    }
}

/// Empirical distribution of binned decoded estimates over `trials`
/// independent noisy population responses of `xi`.
pub fn simulate_feedback(
    xi: &CognitionVector,
    scale: &EstimationScale,
    decoder: &DecoderKind,
    grid: &SGrid,
    trials: usize,
    stream: &RngStream,
    binning: Binning,
) -> Result<FeedbackDistribution> {
    FeedbackSimulator::new(xi, scale, decoder, grid, binning)?.simulate(trials, stream)
}

/// Histogram prior over grid points built from per-star weights, e.g. real
/// user feedback used as prior knowledge. Each grid point receives its
/// star bin's weight; the result is normalized over the grid.
pub fn star_weights_prior(
    weights: &[f64],
    grid: &SGrid,
    scale: &EstimationScale,
) -> Result<Prior> {
    let bins = Binning::IntegerStars.bin_count(scale)?;
    if weights.len() != bins {
        return Err(Error::InvalidPrior(format!(
            "expected {bins} star weights, got {}",
            weights.len()
        )));
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::InvalidPrior("star weights must be finite and nonnegative".into()));
    }
    let mut probs = Vec::with_capacity(grid.len());
    for &s in grid.points() {
        probs.push(weights[bin_estimate(s, scale, Binning::IntegerStars)?]);
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidPrior("star weights are identically zero".into()));
    }
    for p in &mut probs {
        *p /= total;
    }
    Ok(Prior::Histogram(probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::context;
    use rand::Rng;

    fn five_star() -> EstimationScale {
        EstimationScale::default()
    }

    fn grid() -> SGrid {
        SGrid::with_default_step(five_star()).unwrap()
    }

    #[test]
    fn integer_star_binning_rounds_half_up() {
        let scale = five_star();
        let b = Binning::IntegerStars;
        assert_eq!(bin_estimate(2.49, &scale, b).unwrap(), 1); // star 2
        assert_eq!(bin_estimate(2.5, &scale, b).unwrap(), 2); // star 3
        assert_eq!(bin_estimate(5.0, &scale, b).unwrap(), 4); // star 5
        assert_eq!(bin_estimate(1.0, &scale, b).unwrap(), 0); // star 1
        assert!(bin_estimate(5.01, &scale, b).is_err());
        assert!(bin_estimate(0.99, &scale, b).is_err());
    }

    #[test]
    fn uniform_binning_is_right_closed_at_the_top() {
        let scale = five_star();
        let b = Binning::Uniform(8);
        assert_eq!(bin_estimate(1.0, &scale, b).unwrap(), 0);
        assert_eq!(bin_estimate(1.5, &scale, b).unwrap(), 1); // left-closed interval
        assert_eq!(bin_estimate(5.0, &scale, b).unwrap(), 7);
    }

    #[test]
    fn jsd_identity_is_exactly_zero() {
        let p = FeedbackDistribution::new(Binning::IntegerStars, vec![0.1, 0.2, 0.4, 0.2, 0.1])
            .unwrap();
        assert_eq!(jsd(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn jsd_disjoint_point_masses_saturate_at_one() {
        let p = FeedbackDistribution::new(Binning::IntegerStars, vec![1.0, 0.0, 0.0, 0.0, 0.0])
            .unwrap();
        let q = FeedbackDistribution::new(Binning::IntegerStars, vec![0.0, 0.0, 0.0, 0.0, 1.0])
            .unwrap();
        assert_eq!(jsd(&p, &q).unwrap(), 1.0);
    }

    #[test]
    fn jsd_rejects_mismatched_binning() {
        let p = FeedbackDistribution::new(Binning::IntegerStars, vec![0.5, 0.5, 0.0, 0.0, 0.0])
            .unwrap();
        let q = FeedbackDistribution::new(Binning::Uniform(5), vec![0.5, 0.5, 0.0, 0.0, 0.0])
            .unwrap();
        assert!(matches!(jsd(&p, &q), Err(Error::MismatchedBinning)));
    }

    #[test]
    fn single_trial_is_a_point_mass() {
        let scale = five_star();
        let xi = CognitionVector::new(25, 7.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let dist = simulate_feedback(
            &xi,
            &scale,
            &DecoderKind::Wad,
            &grid(),
            1,
            &RngStream::root(8),
            Binning::IntegerStars,
        )
        .unwrap();
        assert_eq!(dist.probs().iter().filter(|&&p| p == 1.0).count(), 1);
    }

    #[test]
    fn wad_feedback_concentrates_on_true_star() {
        let scale = five_star();
        let xi = CognitionVector::new(100, 1.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let dist = simulate_feedback(
            &xi,
            &scale,
            &DecoderKind::Wad,
            &grid(),
            10_000,
            &RngStream::root(17),
            Binning::IntegerStars,
        )
        .unwrap();
        assert!(dist.probs()[2] > 0.999, "WAD mass on star 3: {}", dist.probs()[2]);
    }

    #[test]
    fn mvd_feedback_spans_the_scale_at_low_gain() {
        let scale = five_star();
        let xi = CognitionVector::new(100, 1.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let dist = simulate_feedback(
            &xi,
            &scale,
            &DecoderKind::Mvd,
            &grid(),
            10_000,
            &RngStream::root(17),
            Binning::IntegerStars,
        )
        .unwrap();
        assert!(dist.probs().iter().all(|&p| p > 0.0), "probs {:?}", dist.probs());
        assert!(dist.std(&scale).unwrap() > 0.5);
    }

    #[test]
    fn mad_with_central_prior_restricts_support() {
        let scale = five_star();
        let xi = CognitionVector::new(100, 1.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let mad = simulate_feedback(
            &xi,
            &scale,
            &DecoderKind::mad_default(),
            &grid(),
            4000,
            &RngStream::root(23),
            Binning::IntegerStars,
        )
        .unwrap();
        let mld = simulate_feedback(
            &xi,
            &scale,
            &DecoderKind::Mld,
            &grid(),
            4000,
            &RngStream::root(23),
            Binning::IntegerStars,
        )
        .unwrap();
        let mad_extremes = mad.probs()[0] + mad.probs()[4];
        let mld_extremes = mld.probs()[0] + mld.probs()[4];
        assert!(mad_extremes < 0.005, "MAD extreme mass {mad_extremes}");
        assert!(mad_extremes < mld_extremes);
    }

    #[test]
    fn feedback_is_reproducible_and_normalized() {
        let scale = five_star();
        let xi = CognitionVector::new(50, 10.0, 0.5, 2.0, 4.2, &scale).unwrap();
        let stream = RngStream::root(99).substream(context::SIMULATE);
        let a = simulate_feedback(
            &xi,
            &scale,
            &DecoderKind::Mld,
            &grid(),
            3000,
            &stream,
            Binning::IntegerStars,
        )
        .unwrap();
        let b = simulate_feedback(
            &xi,
            &scale,
            &DecoderKind::Mld,
            &grid(),
            3000,
            &stream,
            Binning::IntegerStars,
        )
        .unwrap();
        assert_eq!(a, b);
        assert!((a.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hopeless_wad_configuration_is_reported_as_degenerate() {
        let scale = five_star();
        // Rates ~1e-9 Hz: responses are all-zero with overwhelming
        // probability, so WAD retries exhaust.
        let xi = CognitionVector::new(2, 1e-9, 1.0, 1e-9, 3.0, &scale).unwrap();
        let err = simulate_feedback(
            &xi,
            &scale,
            &DecoderKind::Wad,
            &grid(),
            1,
            &RngStream::root(1),
            Binning::IntegerStars,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateConfiguration(_)), "got {err:?}");
    }

    #[test]
    fn star_weights_prior_covers_star_bins() {
        let scale = five_star();
        let g = grid();
        let prior = star_weights_prior(&[0.0, 0.0, 1.0, 1.0, 0.0], &g, &scale).unwrap();
        let Prior::Histogram(probs) = &prior else { panic!("expected histogram") };
        assert_eq!(probs.len(), g.len());
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // Mass only where grid points round to stars 3 or 4.
        for (&s, &p) in g.points().iter().zip(probs) {
            let star = (s + 0.5).floor();
            assert_eq!(p > 0.0, star == 3.0 || star == 4.0, "s={s}");
        }
    }

    #[test]
    fn jsd_axioms_on_random_pairs() {
        let mut rng = RngStream::root(606).rng();
        for _ in 0..1000 {
            let mut p: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..1.0)).collect();
            let mut q: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..1.0)).collect();
            let ps: f64 = p.iter().sum();
            let qs: f64 = q.iter().sum();
            p.iter_mut().for_each(|x| *x /= ps);
            q.iter_mut().for_each(|x| *x /= qs);
            let p = FeedbackDistribution::new(Binning::IntegerStars, p).unwrap();
            let q = FeedbackDistribution::new(Binning::IntegerStars, q).unwrap();
            let pq = jsd(&p, &q).unwrap();
            let qp = jsd(&q, &p).unwrap();
            assert!((0.0..=1.0).contains(&pq));
            assert!((pq - qp).abs() < 1e-12);
            assert!(jsd(&p, &p).unwrap() < 1e-12);
        }
    }
}
