//! Neurodynamic correlates of fitted cognition vectors: pooled spiking-rate
//! statistics with a log-normal fit, spike-train superposition ("events
//! over time"), sine fitting of binned totals, and the resulting
//! EEG-frequency estimate.
//!
//! Spike trains are periodic at each neuron's static rate with a random
//! phase: constructive interference of regular trains is what produces a
//! clean oscillation in the binned totals. Poisson trains (flat spectrum)
//! are available as a sensitivity-analysis mode.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{static_population_response, CognitionVector, EstimationScale};
use crate::noise::RngStream;

/// Strictly increasing spike times in seconds within `[0, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    times: Vec<f64>,
}

impl SpikeTrain {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "spike times must be strictly increasing".into(),
            ));
        }
        if times.iter().any(|&t| !t.is_finite() || t < 0.0) {
            return Err(Error::InvalidParameter(
                "spike times must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Regular spike train: spikes at `phase + k / rate` for all `k` with time
/// below `t_end`.
pub fn periodic_spike_train(rate: f64, phase: f64, t_end: f64) -> Result<SpikeTrain> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::InvalidParameter(format!("spike rate must be positive, got {rate}")));
    }
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::InvalidParameter(format!("duration must be positive, got {t_end}")));
    }
    let period = 1.0 / rate;
    if !(0.0..period).contains(&phase) {
        return Err(Error::InvalidParameter(format!(
            "phase {phase} must lie in [0, {period})"
        )));
    }
    let mut times = Vec::with_capacity(((t_end - phase) * rate).ceil() as usize);
    let mut k = 0u64;
    loop {
        let t = phase + k as f64 / rate;
        if t >= t_end {
            break;
        }
        times.push(t);
        k += 1;
    }
    Ok(SpikeTrain { times })
}

/// Homogeneous Poisson spike train at the given rate (exponential gaps).
pub fn poisson_spike_train<R: Rng + ?Sized>(
    rate: f64,
    t_end: f64,
    rng: &mut R,
) -> Result<SpikeTrain> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::InvalidParameter(format!("spike rate must be positive, got {rate}")));
    }
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::InvalidParameter(format!("duration must be positive, got {t_end}")));
    }
    let gaps = Exp::new(rate)
        .map_err(|e| Error::InvalidParameter(format!("Poisson train rate {rate}: {e}")))?;
    let mut times = Vec::new();
    let mut t: f64 = gaps.sample(rng);
    while t < t_end {
        times.push(t);
        t += gaps.sample(rng);
    }
    Ok(SpikeTrain { times })
}

/// Spike counts per time bin of width `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedCounts {
    pub delta: f64,
    pub counts: Vec<u64>,
}

impl BinnedCounts {
    /// Bin midpoints in seconds.
    pub fn centers(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|i| (i as f64 + 0.5) * self.delta).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Observation span covered by the bins.
    pub fn span(&self) -> f64 {
        self.counts.len() as f64 * self.delta
    }
}

/// Superpose spike trains and count spikes per bin `[i*delta, (i+1)*delta)`
/// over `[0, t_end)`. Total counts equal total spikes exactly.
pub fn superpose_and_bin(trains: &[SpikeTrain], delta: f64, t_end: f64) -> Result<BinnedCounts> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!("bin width must be positive, got {delta}")));
    }
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::InvalidParameter(format!("duration must be positive, got {t_end}")));
    }
    let bins = (t_end / delta).ceil() as usize;
    let mut counts = vec![0u64; bins];
    for train in trains {
        for &t in train.times() {
            if t >= t_end {
                continue;
            }
            // t < t_end <= bins * delta, so the index can only reach `bins`
            // through rounding in the division; clamp it back.
            let index = ((t / delta).floor() as usize).min(bins - 1);
            counts[index] += 1;
        }
    }
    Ok(BinnedCounts { delta, counts })
}

/// Least-squares sine fit `A sin(2 pi f t + phi) + C` to binned counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineFit {
    pub amplitude: f64,
    /// `None` when the counts carry no oscillation (zero variance).
    pub frequency: Option<f64>,
    pub phase: f64,
    pub offset: f64,
    pub residual_rms: f64,
}

/// Fit a sine to bin counts against bin centers. The frequency search is
/// seeded at the dominant discrete-Fourier frequency of the mean-removed
/// counts and refined by dense least-squares scanning over ±1 Fourier bin.
pub fn fit_sine(binned: &BinnedCounts) -> Result<SineFit> {
    let n = binned.counts.len();
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "sine fitting needs at least 8 bins, got {n}"
        )));
    }
    let y: Vec<f64> = binned.counts.iter().map(|&c| c as f64).collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    if y.iter().all(|&v| v == y[0]) {
        return Ok(SineFit {
            amplitude: 0.0,
            frequency: None,
            phase: 0.0,
            offset: mean,
            residual_rms: 0.0,
        });
    }

    // Dominant nonzero Fourier bin of the mean-removed counts. A strict
    // spike comb has equal-magnitude harmonics up to rounding; preferring
    // the lowest bin among near-ties keeps the fundamental.
    let span = binned.span();
    let magnitudes: Vec<f64> = (1..=n / 2)
        .map(|k| {
            let omega = std::f64::consts::TAU * k as f64 / n as f64;
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (i, &v) in y.iter().enumerate() {
                let arg = omega * i as f64;
                re += (v - mean) * arg.cos();
                im += (v - mean) * arg.sin();
            }
            re * re + im * im
        })
        .collect();
    let max_mag = magnitudes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best_k = 1 + magnitudes
        .iter()
        .position(|&m| m >= max_mag * (1.0 - 1e-9))
        .expect("nonempty magnitude list");

    // Dense least-squares refinement over ±1 Fourier bin around the seed.
    let centers = binned.centers();
    let f_lo = (best_k as f64 - 1.0).max(0.25) / span;
    let f_hi = ((best_k as f64 + 1.0) / span).min(0.5 * n as f64 / span);
    let steps = 160usize;
    let mut best: Option<(f64, [f64; 3], f64)> = None; // (freq, coeffs, rss)
    for i in 0..=steps {
        let f = f_lo + (f_hi - f_lo) * i as f64 / steps as f64;
        if let Some((coeffs, rss)) = sine_least_squares(&centers, &y, f) {
            if best.as_ref().is_none_or(|&(_, _, b)| rss < b) {
                best = Some((f, coeffs, rss));
            }
        }
    }
    let (freq, [a, b, c], rss) =
        best.ok_or_else(|| Error::DegenerateConfiguration("sine fit did not converge".into()))?;
    Ok(SineFit {
        amplitude: a.hypot(b),
        frequency: Some(freq),
        phase: b.atan2(a),
        offset: c,
        residual_rms: (rss / n as f64).sqrt(),
    })
}

/// Linear least squares for `a sin(2 pi f t) + b cos(2 pi f t) + c` at a
/// fixed frequency; returns the coefficients and the residual sum of
/// squares, or `None` if the normal equations are singular.
fn sine_least_squares(t: &[f64], y: &[f64], freq: f64) -> Option<([f64; 3], f64)> {
    let omega = std::f64::consts::TAU * freq;
    let n = t.len() as f64;
    let (mut ss, mut sc, mut cc, mut s1, mut c1) = (0.0f64, 0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut cy, mut y1) = (0.0f64, 0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(y) {
        let (sin, cos) = (omega * ti).sin_cos();
        ss += sin * sin;
        sc += sin * cos;
        cc += cos * cos;
        s1 += sin;
        c1 += cos;
        sy += sin * yi;
        cy += cos * yi;
        y1 += yi;
    }
    let matrix = [[ss, sc, s1], [sc, cc, c1], [s1, c1, n]];
    let rhs = [sy, cy, y1];
    let coeffs = solve3(matrix, rhs)?;
    let mut rss = 0.0f64;
    for (&ti, &yi) in t.iter().zip(y) {
        let (sin, cos) = (omega * ti).sin_cos();
        let r = yi - (coeffs[0] * sin + coeffs[1] * cos + coeffs[2]);
        rss += r * r;
    }
    Some((coeffs, rss))
}

/// Gaussian elimination with partial pivoting for a 3x3 system.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= factor * m[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut acc = b[col];
        for k in (col + 1)..3 {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}

/// Which spike-train model drives the events-over-time simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrainKind {
    Periodic,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EegOptions {
    /// Simulation duration in seconds.
    pub t_end: f64,
    /// Bin width in seconds.
    pub delta: f64,
    pub train: TrainKind,
}

/// 1 s at 5 ms bins: 200 points, Nyquist 100 Hz, enough to resolve the
/// 30-100 Hz band.
impl Default for EegOptions {
    fn default() -> Self {
        Self { t_end: 1.0, delta: 0.005, train: TrainKind::Periodic }
    }
}

/// Superposed spike trains of a rate ensemble, binned. Each train gets a
/// uniformly random phase from its own substream.
pub fn events_over_time(
    rates: &[f64],
    options: &EegOptions,
    stream: &RngStream,
) -> Result<BinnedCounts> {
    if rates.is_empty() {
        return Err(Error::InvalidParameter("rate ensemble is empty".into()));
    }
    let mut trains = Vec::with_capacity(rates.len());
    for (j, &rate) in rates.iter().enumerate() {
        let mut rng = stream.substream(j as u64).rng();
        let train = match options.train {
            TrainKind::Periodic => {
                let phase = rng.random_range(0.0..1.0 / rate);
                periodic_spike_train(rate, phase, options.t_end)?
            }
            TrainKind::Poisson => poisson_spike_train(rate, options.t_end, &mut rng)?,
        };
        trains.push(train);
    }
    superpose_and_bin(&trains, options.delta, options.t_end)
}

/// Dominant oscillation frequency of a rate ensemble's superposed spike
/// trains: bin the events over time and fit a sine.
pub fn eeg_frequency_of_rates(
    rates: &[f64],
    options: &EegOptions,
    stream: &RngStream,
) -> Result<f64> {
    let binned = events_over_time(rates, options, stream)?;
    fit_sine(&binned)?.frequency.ok_or_else(|| {
        Error::DegenerateConfiguration("superposed spike trains carry no oscillation".into())
    })
}

/// EEG-frequency estimate for a cognition vector: one spike train per
/// neuron at its static rate.
pub fn eeg_frequency(
    xi: &CognitionVector,
    scale: &EstimationScale,
    options: &EegOptions,
    stream: &RngStream,
) -> Result<f64> {
    let statics = static_population_response(xi, scale)?;
    eeg_frequency_of_rates(statics.rates(), options, stream)
}

/// Pooled static spiking rates of an ensemble of cognition vectors with a
/// moment-matched log-normal fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RateStats {
    rates: Vec<f64>,
    mu_log: f64,
    sigma_log: f64,
    mean_rate: f64,
}

impl RateStats {
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Mean of log-rates.
    pub fn mu_log(&self) -> f64 {
        self.mu_log
    }

    /// Standard deviation of log-rates (population formula).
    pub fn sigma_log(&self) -> f64 {
        self.sigma_log
    }

    pub fn mean_rate(&self) -> f64 {
        self.mean_rate
    }

    /// Mean of the fitted log-normal, `exp(mu + sigma^2 / 2)`.
    pub fn lognormal_mean(&self) -> f64 {
        (self.mu_log + 0.5 * self.sigma_log * self.sigma_log).exp()
    }

    /// Density of the fitted log-normal at rate `r`.
    pub fn lognormal_density(&self, r: f64) -> f64 {
        if r <= 0.0 || self.sigma_log == 0.0 {
            return 0.0;
        }
        let z = (r.ln() - self.mu_log) / self.sigma_log;
        (-0.5 * z * z).exp() / (r * self.sigma_log * (std::f64::consts::TAU).sqrt())
    }

    pub fn summary(&self) -> RateStatsSummary {
        RateStatsSummary {
            count: self.rates.len(),
            mean_rate: self.mean_rate,
            min_rate: self.rates.iter().copied().fold(f64::INFINITY, f64::min),
            max_rate: self.rates.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mu_log: self.mu_log,
            sigma_log: self.sigma_log,
            lognormal_mean: self.lognormal_mean(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateStatsSummary {
    pub count: usize,
    pub mean_rate: f64,
    pub min_rate: f64,
    pub max_rate: f64,
    pub mu_log: f64,
    pub sigma_log: f64,
    pub lognormal_mean: f64,
}

/// Pool all static per-neuron rates across the ensemble and fit a
/// log-normal by matching the moments of the log-rates.
pub fn rate_statistics(
    ensemble: &[CognitionVector],
    scale: &EstimationScale,
) -> Result<RateStats> {
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("cognition-vector ensemble is empty".into()));
    }
    let mut rates = Vec::new();
    for xi in ensemble {
        rates.extend_from_slice(static_population_response(xi, scale)?.rates());
    }
    let count = rates.len() as f64;
    let mean_rate = rates.iter().sum::<f64>() / count;
    let mu_log = rates.iter().map(|&r| r.ln()).sum::<f64>() / count;
    let var_log =
        rates.iter().map(|&r| (r.ln() - mu_log) * (r.ln() - mu_log)).sum::<f64>() / count;
    Ok(RateStats { rates, mu_log, sigma_log: var_log.sqrt(), mean_rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn periodic_train_forty_hz_over_one_second() {
        let train = periodic_spike_train(40.0, 0.0, 1.0).unwrap();
        assert_eq!(train.len(), 40);
        for (k, &t) in train.times().iter().enumerate() {
            assert!((t - k as f64 * 0.025).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_train_single_spike() {
        let train = periodic_spike_train(1.0, 0.5, 1.0).unwrap();
        assert_eq!(train.times(), &[0.5]);
    }

    #[test]
    fn periodic_train_rejects_bad_phase() {
        assert!(periodic_spike_train(40.0, 0.025, 1.0).is_err());
        assert!(periodic_spike_train(40.0, -0.001, 1.0).is_err());
        assert!(periodic_spike_train(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn single_train_fills_every_25ms_bin_once() {
        // Half-period phase keeps spikes at bin centers, away from the
        // float-sensitive bin edges.
        let train = periodic_spike_train(40.0, 0.0125, 1.0).unwrap();
        let binned = superpose_and_bin(&[train], 0.025, 1.0).unwrap();
        assert_eq!(binned.counts.len(), 40);
        assert!(binned.counts.iter().all(|&c| c == 1));
    }

    #[test]
    fn identical_trains_double_every_bin() {
        let a = periodic_spike_train(40.0, 0.0, 1.0).unwrap();
        let b = a.clone();
        let one = superpose_and_bin(&[a.clone()], 0.005, 1.0).unwrap();
        let two = superpose_and_bin(&[a, b], 0.005, 1.0).unwrap();
        for (x, y) in one.counts.iter().zip(&two.counts) {
            assert_eq!(2 * x, *y);
        }
    }

    #[test]
    fn sine_fit_recovers_thirty_five_hz() {
        let delta = 0.005;
        let counts: Vec<u64> = (0..200)
            .map(|i| {
                let t = (i as f64 + 0.5) * delta;
                (10.0 * (std::f64::consts::TAU * 35.0 * t).sin() + 20.0).round() as u64
            })
            .collect();
        let fit = fit_sine(&BinnedCounts { delta, counts }).unwrap();
        let freq = fit.frequency.unwrap();
        assert!((freq - 35.0).abs() < 0.5, "frequency {freq}");
        assert!((fit.amplitude - 10.0).abs() < 1.0, "amplitude {}", fit.amplitude);
        assert!((fit.offset - 20.0).abs() < 1.0, "offset {}", fit.offset);
    }

    #[test]
    fn constant_counts_report_no_oscillation() {
        let fit = fit_sine(&BinnedCounts { delta: 0.005, counts: vec![7; 64] }).unwrap();
        assert_eq!(fit.amplitude, 0.0);
        assert!(fit.frequency.is_none());
        assert_eq!(fit.offset, 7.0);
    }

    #[test]
    fn sine_fit_frequency_ignores_constant_shift() {
        let delta = 0.005;
        let base: Vec<u64> = (0..200)
            .map(|i| {
                let t = (i as f64 + 0.5) * delta;
                (8.0 * (std::f64::consts::TAU * 22.0 * t).sin() + 15.0).round() as u64
            })
            .collect();
        let shifted: Vec<u64> = base.iter().map(|&c| c + 9).collect();
        let f0 = fit_sine(&BinnedCounts { delta, counts: base }).unwrap().frequency.unwrap();
        let f1 = fit_sine(&BinnedCounts { delta, counts: shifted }).unwrap().frequency.unwrap();
        assert!((f0 - f1).abs() < 1e-6);
    }

    #[test]
    fn sine_fit_requires_eight_bins() {
        assert!(fit_sine(&BinnedCounts { delta: 0.005, counts: vec![1; 7] }).is_err());
    }

    #[test]
    fn single_neuron_eeg_frequency_is_its_rate() {
        let freq =
            eeg_frequency_of_rates(&[40.0], &EegOptions::default(), &RngStream::root(12))
                .unwrap();
        assert!((freq - 40.0).abs() < 1.0, "frequency {freq}");
    }

    #[test]
    fn eeg_frequency_is_deterministic_under_fixed_stream() {
        let scale = EstimationScale::default();
        let xi = CognitionVector::new(25, 30.0, 0.7, 5.0, 3.0, &scale).unwrap();
        let stream = RngStream::root(7);
        let opts = EegOptions::default();
        let a = eeg_frequency(&xi, &scale, &opts, &stream).unwrap();
        let b = eeg_frequency(&xi, &scale, &opts, &stream).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn doubling_rates_does_not_lower_the_dominant_frequency() {
        // Pure periodic two-neuron ensembles, zero phase, checked against a
        // brute-force Fourier magnitude scan.
        let opts = EegOptions::default();
        for &(r1, r2) in &[(12.0, 20.0), (9.0, 31.0), (17.0, 44.0)] {
            let fitted: Vec<f64> = [1.0, 2.0]
                .iter()
                .map(|&mult| {
                    let trains = vec![
                        periodic_spike_train(r1 * mult, 0.0, opts.t_end).unwrap(),
                        periodic_spike_train(r2 * mult, 0.0, opts.t_end).unwrap(),
                    ];
                    let binned = superpose_and_bin(&trains, opts.delta, opts.t_end).unwrap();

                    // brute-force Fourier argmax as the independent oracle
                    let y: Vec<f64> = binned.counts.iter().map(|&c| c as f64).collect();
                    let n = y.len();
                    let mean = y.iter().sum::<f64>() / n as f64;
                    let mut best = (0usize, f64::NEG_INFINITY);
                    for k in 1..=n / 2 {
                        let omega = std::f64::consts::TAU * k as f64 / n as f64;
                        let (mut re, mut im) = (0.0, 0.0);
                        for (i, &v) in y.iter().enumerate() {
                            re += (v - mean) * (omega * i as f64).cos();
                            im += (v - mean) * (omega * i as f64).sin();
                        }
                        if re * re + im * im > best.1 {
                            best = (k, re * re + im * im);
                        }
                    }
                    let oracle = best.0 as f64 / binned.span();

                    let fit = fit_sine(&binned).unwrap().frequency.unwrap();
                    assert!(
                        (fit - oracle).abs() <= 1.0 / binned.span() + 1e-9,
                        "sine fit {fit} vs Fourier oracle {oracle}"
                    );
                    fit
                })
                .collect();
            assert!(
                fitted[1] >= fitted[0] - 1e-9,
                "doubling rates ({r1}, {r2}) lowered frequency: {fitted:?}"
            );
        }
    }

    #[test]
    fn rate_statistics_for_single_cognition_vector() {
        let scale = EstimationScale::default();
        let xi = CognitionVector::new(11, 7.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let stats = rate_statistics(&[xi], &scale).unwrap();
        assert_eq!(stats.rates().len(), 11);
        let summary = stats.summary();
        assert!(summary.min_rate >= 5.0 && summary.min_rate < 5.5, "min {}", summary.min_rate);
        assert!((summary.max_rate - 7.7926).abs() < 1e-4);
        assert!(summary.lognormal_mean >= summary.min_rate);
    }

    #[test]
    fn rate_statistics_pooling_is_idempotent() {
        let scale = EstimationScale::default();
        let xi = CognitionVector::new(11, 7.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let one = rate_statistics(&[xi], &scale).unwrap();
        let three = rate_statistics(&[xi, xi, xi], &scale).unwrap();
        assert!((one.mu_log() - three.mu_log()).abs() < 1e-12);
        assert!((one.sigma_log() - three.sigma_log()).abs() < 1e-12);
        assert!((one.mean_rate() - three.mean_rate()).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(64))]

        #[test]
        fn spike_count_matches_closed_form(
            rate in 0.5f64..200.0,
            phase_frac in 0.0f64..0.999,
            t_end in 0.1f64..3.0,
        ) {
            let phase = phase_frac / rate;
            let train = periodic_spike_train(rate, phase, t_end).unwrap();
            let expected = ((t_end - phase) * rate).ceil() as usize;
            // Closed form and enumeration may disagree by one spike when
            // t_end - phase is within float error of a multiple of the period.
            prop_assert!(
                (train.len() as i64 - expected as i64).abs() <= 1,
                "{} spikes vs ceil {}", train.len(), expected
            );
        }

        #[test]
        fn binning_conserves_total_spike_count(
            rates in proptest::collection::vec(1.0f64..120.0, 1..8),
            delta in 0.001f64..0.05,
        ) {
            let trains: Vec<SpikeTrain> = rates
                .iter()
                .map(|&r| periodic_spike_train(r, 0.0, 1.0).unwrap())
                .collect();
            let total: usize = trains.iter().map(SpikeTrain::len).sum();
            let binned = superpose_and_bin(&trains, delta, 1.0).unwrap();
            prop_assert_eq!(binned.total(), total as u64);
        }
    }
}
