//! Tuning curves, neuron populations and their noise-free responses.
//!
//! A neuron's mean firing rate for a stimulus `s` is the bell-shaped tuning
//! curve `f_p(s) = g * h(p, w)(s) + o`, where `h` is the Gaussian density
//! with mean `p` (the neuron's preferred value) and standard deviation `w`,
//! `g` is a dimensionless gain and `o` a spiking offset in Hz. A population
//! spreads its preferred values equidistantly over the estimation scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `1 / sqrt(2 * pi)`, the peak of the unit-width Gaussian density.
pub const INV_SQRT_TAU: f64 = 0.3989422804014327;

/// The closed real interval of stimulus values (star ratings).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationScale {
    lo: f64,
    hi: f64,
}

impl EstimationScale {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidParameter(format!(
                "estimation scale requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.lo && s <= self.hi
    }
}

/// The 5-star rating scale.
impl Default for EstimationScale {
    fn default() -> Self {
        Self { lo: 1.0, hi: 5.0 }
    }
}

/// Shape parameters shared by all tuning curves of a population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningParams {
    gain: f64,
    width: f64,
    offset: f64,
}

impl TuningParams {
    pub fn new(gain: f64, width: f64, offset: f64) -> Result<Self> {
        for (name, v) in [("gain", gain), ("width", width), ("offset", offset)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "tuning {name} must be a positive finite number, got {v}"
                )));
            }
        }
        Ok(Self { gain, width, offset })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

/// The 5-tuple `(n, g, w, o, s)` parameterizing one simulated cognition
/// episode: population size, tuning-curve shape and the presented stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CognitionVector {
    pub n: usize,
    pub gain: f64,
    pub width: f64,
    pub offset: f64,
    pub stimulus: f64,
}

impl CognitionVector {
    pub fn new(
        n: usize,
        gain: f64,
        width: f64,
        offset: f64,
        stimulus: f64,
        scale: &EstimationScale,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "population size must be at least 2, got {n}"
            )));
        }
        TuningParams::new(gain, width, offset)?;
        if !stimulus.is_finite() || !scale.contains(stimulus) {
            return Err(Error::InvalidParameter(format!(
                "stimulus {stimulus} lies outside the scale [{}, {}]",
                scale.lo(),
                scale.hi()
            )));
        }
        Ok(Self { n, gain, width, offset, stimulus })
    }

    pub fn params(&self) -> TuningParams {
        TuningParams {
            gain: self.gain,
            width: self.width,
            offset: self.offset,
        }
    }
}

/// A population of `n` neurons with identical tuning-curve shape and
/// equidistant preferred values covering the estimation scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    n: usize,
    scale: EstimationScale,
    params: TuningParams,
    preferred: Vec<f64>,
}

impl Population {
    pub fn new(n: usize, scale: EstimationScale, params: TuningParams) -> Result<Self> {
        let preferred = preferred_values(n, &scale)?;
        Ok(Self { n, scale, params, preferred })
    }

    /// Population addressed by a cognition vector (its stimulus is not part
    /// of the population itself).
    pub fn for_cognition(xi: &CognitionVector, scale: EstimationScale) -> Result<Self> {
        if !scale.contains(xi.stimulus) {
            return Err(Error::InvalidParameter(format!(
                "stimulus {} lies outside the scale [{}, {}]",
                xi.stimulus,
                scale.lo(),
                scale.hi()
            )));
        }
        Self::new(xi.n, scale, TuningParams::new(xi.gain, xi.width, xi.offset)?)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 2 by construction
    }

    pub fn scale(&self) -> &EstimationScale {
        &self.scale
    }

    pub fn params(&self) -> &TuningParams {
        &self.params
    }

    pub fn preferred(&self) -> &[f64] {
        &self.preferred
    }

    /// Mean firing rate of neuron `j` for stimulus `s`.
    pub fn rate(&self, j: usize, s: f64) -> f64 {
        tuning_value(&self.params, self.preferred[j], s)
    }

    /// Noise-free rates of all neurons for stimulus `s`.
    pub fn static_response(&self, s: f64) -> StaticResponse {
        let rates = self.preferred.iter().map(|&p| tuning_value(&self.params, p, s)).collect();
        StaticResponse { rates }
    }
}

/// Noise-free per-neuron firing rates in Hz. Every entry is at least the
/// spiking offset, since the Gaussian term is nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticResponse {
    rates: Vec<f64>,
}

impl StaticResponse {
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }
}

/// Gaussian density with mean `p` and standard deviation `w`, evaluated at
/// `s`: `exp(-(s - p)^2 / (2 w^2)) / (w * sqrt(2 pi))`.
pub fn gaussian_bump(p: f64, w: f64, s: f64) -> Result<f64> {
    if !w.is_finite() || w <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tuning width must be a positive finite number, got {w}"
        )));
    }
    Ok(bump_unchecked(p, w, s))
}

#[inline]
fn bump_unchecked(p: f64, w: f64, s: f64) -> f64 {
    let z = (s - p) / w;
    (-0.5 * z * z).exp() * INV_SQRT_TAU / w
}

/// Tuning curve `f_p(s) = g * h(p, w)(s) + o` for a neuron preferring `p`.
/// Strictly greater than the offset for finite `s`, maximal at `s = p`.
#[inline]
pub fn tuning_value(params: &TuningParams, p: f64, s: f64) -> f64 {
    params.gain * bump_unchecked(p, params.width, s) + params.offset
}

/// Equidistant preferred values `p_j = lo + (j - 1) * (hi - lo) / (n - 1)`
/// for `j = 1..n`, covering the scale endpoints exactly.
pub fn preferred_values(n: usize, scale: &EstimationScale) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "population size must be at least 2, got {n}"
        )));
    }
    let step = scale.width() / (n - 1) as f64;
    let mut values: Vec<f64> = (0..n).map(|j| scale.lo() + j as f64 * step).collect();
    values[n - 1] = scale.hi();
    Ok(values)
}

/// Noise-free population response for a cognition vector: neuron `j` fires
/// at `f_{p_j}(s)`.
pub fn static_population_response(
    xi: &CognitionVector,
    scale: &EstimationScale,
) -> Result<StaticResponse> {
    let pop = Population::for_cognition(xi, *scale)?;
    Ok(pop.static_response(xi.stimulus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn five_star() -> EstimationScale {
        EstimationScale::default()
    }

    #[test]
    fn bump_peak_is_inverse_sqrt_tau() {
        // 1/sqrt(2 pi) evaluated independently to 16 digits.
        let peak = gaussian_bump(3.0, 1.0, 3.0).unwrap();
        assert!((peak - 0.3989422804014327).abs() < 1e-15);
        assert!((peak - 0.398942).abs() < 1e-6);
    }

    #[test]
    fn bump_is_symmetric_about_preferred_value() {
        for d in [0.1, 0.5, 1.0, 2.3, 10.0] {
            let left = gaussian_bump(3.0, 1.0, 3.0 - d).unwrap();
            let right = gaussian_bump(3.0, 1.0, 3.0 + d).unwrap();
            assert_eq!(left.to_bits(), right.to_bits());
        }
    }

    #[test]
    fn bump_tails_vanish() {
        assert!(gaussian_bump(3.0, 1.0, 60.0).unwrap() < 1e-300);
        assert!(gaussian_bump(3.0, 1.0, -60.0).unwrap() < 1e-300);
    }

    #[test]
    fn bump_rejects_nonpositive_width() {
        assert!(gaussian_bump(3.0, 0.0, 3.0).is_err());
        assert!(gaussian_bump(3.0, -1.0, 3.0).is_err());
        assert!(gaussian_bump(3.0, f64::NAN, 3.0).is_err());
    }

    #[test]
    fn tuning_value_at_peak() {
        // g=7, w=1, o=5 at s=p: 7/sqrt(2 pi) + 5.
        let params = TuningParams::new(7.0, 1.0, 5.0).unwrap();
        let v = tuning_value(&params, 3.0, 3.0);
        assert!((v - 7.7926).abs() < 1e-4);
        assert!((v - (7.0 * INV_SQRT_TAU + 5.0)).abs() < 1e-12);
    }

    #[test]
    fn tuning_value_far_from_peak_approaches_offset() {
        let params = TuningParams::new(7.0, 1.0, 5.0).unwrap();
        let near = tuning_value(&params, 3.0, 9.0);
        assert!(near > 5.0);
        assert!(near - 5.0 < 1e-7);
        // Deep in the tail the Gaussian term is absorbed entirely.
        let far = tuning_value(&params, 3.0, 40.0);
        assert!(far >= 5.0);
        assert!(far - 5.0 < 1e-12);
    }

    #[test]
    fn tuning_value_is_linear_in_gain() {
        let lo = TuningParams::new(1.0, 1.0, 5.0).unwrap();
        let hi = TuningParams::new(7.0, 1.0, 5.0).unwrap();
        let diff = tuning_value(&hi, 3.0, 3.0) - tuning_value(&lo, 3.0, 3.0);
        assert!((diff - 6.0 * INV_SQRT_TAU).abs() < 1e-12);
    }

    #[test]
    fn preferred_values_eleven_neurons() {
        let p = preferred_values(11, &five_star()).unwrap();
        for (j, &v) in p.iter().enumerate() {
            assert!((v - (1.0 + 0.4 * j as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn preferred_values_endpoints_only() {
        assert_eq!(preferred_values(2, &five_star()).unwrap(), vec![1.0, 5.0]);
    }

    #[test]
    fn preferred_values_integer_stars() {
        let p = preferred_values(5, &five_star()).unwrap();
        for (j, &v) in p.iter().enumerate() {
            assert!((v - (j + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn preferred_values_rejects_tiny_population() {
        assert!(preferred_values(1, &five_star()).is_err());
        assert!(preferred_values(0, &five_star()).is_err());
    }

    #[test]
    fn static_response_peaks_at_stimulus_neuron() {
        let scale = five_star();
        let xi = CognitionVector::new(11, 7.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let resp = static_population_response(&xi, &scale).unwrap();
        let rates = resp.rates();
        let (argmax, &max) = rates
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        // Neuron 6 (index 5) prefers exactly 3 stars.
        assert_eq!(argmax, 5);
        assert!((max - 7.7926).abs() < 1e-4);
    }

    #[test]
    fn static_response_symmetric_about_central_stimulus() {
        let scale = five_star();
        let xi = CognitionVector::new(11, 7.0, 1.0, 5.0, 3.0, &scale).unwrap();
        let rates = static_population_response(&xi, &scale).unwrap().rates().to_vec();
        for j in 0..rates.len() {
            assert!((rates[j] - rates[rates.len() - 1 - j]).abs() < 1e-9);
        }
    }

    #[test]
    fn static_response_approaches_offset_for_vanishing_gain() {
        let scale = five_star();
        let xi = CognitionVector::new(11, 1e-12, 1.0, 5.0, 3.0, &scale).unwrap();
        for &r in static_population_response(&xi, &scale).unwrap().rates() {
            assert!(r > 5.0 && r - 5.0 < 1e-9);
        }
    }

    #[test]
    fn cognition_vector_rejects_out_of_scale_stimulus() {
        let scale = five_star();
        assert!(CognitionVector::new(11, 7.0, 1.0, 5.0, 5.5, &scale).is_err());
        assert!(CognitionVector::new(11, 7.0, 0.0, 5.0, 3.0, &scale).is_err());
        assert!(CognitionVector::new(1, 7.0, 1.0, 5.0, 3.0, &scale).is_err());
    }

    proptest! {
        #[test]
        fn preferred_values_are_equidistant_and_cover_scale(
            n in 2usize..400,
            lo in -10.0f64..10.0,
            span in 0.5f64..20.0,
        ) {
            let scale = EstimationScale::new(lo, lo + span).unwrap();
            let p = preferred_values(n, &scale).unwrap();
            prop_assert_eq!(p.len(), n);
            prop_assert_eq!(p[0], scale.lo());
            prop_assert_eq!(p[n - 1], scale.hi());
            let step = scale.width() / (n - 1) as f64;
            for pair in p.windows(2) {
                prop_assert!(pair[1] > pair[0]);
                prop_assert!((pair[1] - pair[0] - step).abs() < 1e-12);
            }
        }

        #[test]
        fn tuning_value_exceeds_offset_and_peaks_at_preferred(
            g in 0.1f64..100.0,
            w in 0.05f64..3.0,
            o in 0.1f64..20.0,
            p in 1.0f64..5.0,
        ) {
            let params = TuningParams::new(g, w, o).unwrap();
            let mut best_s = f64::NAN;
            let mut best = f64::NEG_INFINITY;
            for k in 0..=400 {
                let s = 1.0 + k as f64 * 0.01;
                let v = tuning_value(&params, p, s);
                // strictly above offset until the Gaussian term underflows
                prop_assert!(v >= o);
                if (s - p).abs() <= 3.0 * w {
                    prop_assert!(v > o);
                }
                if v > best {
                    best = v;
                    best_s = s;
                }
            }
            // Dense-grid argmax lies within one grid step of p.
            prop_assert!((best_s - p).abs() <= 0.01 + 1e-12);
        }
    }
}
