//! Brute-force cognition-vector fitting: precompute a library of feedback
//! distributions over a parameter grid, then match empirical distributions
//! against it by minimal Jensen-Shannon divergence.
//!
//! The library is the central performance decision: it is computed once per
//! decoder (cost `O(cells * trials)`) and reused for every target (cost
//! `O(cells)` per target). Cells are data-parallel with per-cell RNG
//! streams, so any schedule produces the identical library.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::EmpiricalDistribution;
use crate::decoders::{DecoderKind, SGrid};
use crate::error::{Error, Result};
use crate::feedback::{jsd, Binning, FeedbackDistribution, FeedbackSimulator};
use crate::model::{CognitionVector, EstimationScale};
use crate::noise::{context, RngStream};

/// Equidistant subdivision of one parameter range, inclusive of both
/// endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl ParamRange {
    pub fn new(lo: f64, hi: f64, count: usize) -> Self {
        Self { lo, hi, count }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("parameter range needs count >= 1".into()));
        }
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidParameter("parameter bounds must be finite".into()));
        }
        if self.count == 1 {
            return Ok(vec![self.lo]);
        }
        if self.lo >= self.hi {
            return Err(Error::InvalidParameter(format!(
                "parameter range requires lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.lo + i as f64 * step).collect())
    }
}

/// Ranges and subdivision counts for all five cognition-vector parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: ParamRange,
    pub gain: ParamRange,
    pub width: ParamRange,
    pub offset: ParamRange,
    pub stimulus: ParamRange,
}

impl GridSpec {
    /// Ten equidistant values per parameter: 10^5 combinations.
    pub fn paper_default() -> Self {
        Self::with_count(10)
    }

    /// Four values per parameter (1024 cells): the default for tests and
    /// quick studies.
    pub fn desk_scale() -> Self {
        Self::with_count(4)
    }

    pub fn with_count(count: usize) -> Self {
        Self {
            n: ParamRange::new(25.0, 250.0, count),
            gain: ParamRange::new(1.0, 100.0, count),
            width: ParamRange::new(0.1, 2.0, count),
            offset: ParamRange::new(1.0, 15.0, count),
            stimulus: ParamRange::new(1.0, 5.0, count),
        }
    }
}

/// Realized parameter grid: the concrete value lists whose cross product
/// enumerates all cells. Cell index order is n-major, stimulus-minor.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterGrid {
    pub n: Vec<usize>,
    pub gain: Vec<f64>,
    pub width: Vec<f64>,
    pub offset: Vec<f64>,
    pub stimulus: Vec<f64>,
}

/// Equidistant subdivision of every parameter range; population sizes are
/// rounded to the nearest integer.
pub fn build_grid(spec: &GridSpec) -> Result<ParameterGrid> {
    let n = spec
        .n
        .values()?
        .into_iter()
        .map(|v| {
            let rounded = v.round();
            if rounded < 2.0 {
                return Err(Error::InvalidParameter(format!(
                    "population size {rounded} below the minimum of 2"
                )));
            }
            Ok(rounded as usize)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParameterGrid {
        n,
        gain: spec.gain.values()?,
        width: spec.width.values()?,
        offset: spec.offset.values()?,
        stimulus: spec.stimulus.values()?,
    })
}

impl ParameterGrid {
    pub fn cell_count(&self) -> usize {
        self.n.len() * self.gain.len() * self.width.len() * self.offset.len() * self.stimulus.len()
    }

    /// The cognition vector of a cell index.
    pub fn cognition_vector(&self, index: usize, scale: &EstimationScale) -> Result<CognitionVector> {
        if index >= self.cell_count() {
            return Err(Error::InvalidParameter(format!(
                "cell index {index} out of range (grid has {} cells)",
                self.cell_count()
            )));
        }
        let mut rest = index;
        let i_s = rest % self.stimulus.len();
        rest /= self.stimulus.len();
        let i_o = rest % self.offset.len();
        rest /= self.offset.len();
        let i_w = rest % self.width.len();
        rest /= self.width.len();
        let i_g = rest % self.gain.len();
        rest /= self.gain.len();
        let i_n = rest;
        CognitionVector::new(
            self.n[i_n],
            self.gain[i_g],
            self.width[i_w],
            self.offset[i_o],
            self.stimulus[i_s],
            scale,
        )
    }
}

const LIBRARY_FORMAT_VERSION: u32 = 1;

/// Everything needed to regenerate a library bit-for-bit; two libraries
/// with equal headers are interchangeable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibraryHeader {
    pub format_version: u32,
    pub grid: GridSpec,
    pub decoder: DecoderKind,
    pub trials: usize,
    pub seed: u64,
    pub scale_lo: f64,
    pub scale_hi: f64,
    pub grid_step: f64,
    pub binning: Binning,
}

/// One grid cell's outcome: its feedback distribution, or a marker for a
/// configuration that could not produce one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LibraryCell {
    Distribution(FeedbackDistribution),
    Degenerate { reason: String },
}

/// Precomputed feedback distributions for every grid cell under one
/// decoder. Immutable after construction; concurrent queries need no
/// locking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelLibrary {
    pub header: LibraryHeader,
    pub cells: Vec<LibraryCell>,
}

impl ModelLibrary {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(fs::File::create(path)?);
        serde_json::to_writer(&mut file, self)?;
        file.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(fs::File::open(path)?);
        let lib: ModelLibrary = serde_json::from_reader(file)?;
        if lib.header.format_version != LIBRARY_FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "library format version {} is not supported (expected {})",
                lib.header.format_version, LIBRARY_FORMAT_VERSION
            )));
        }
        if lib.cells.len() != build_grid(&lib.header.grid)?.cell_count() {
            return Err(Error::Validation(format!(
                "library holds {} cells but its grid spec declares {}",
                lib.cells.len(),
                build_grid(&lib.header.grid)?.cell_count()
            )));
        }
        Ok(lib)
    }

    pub fn scale(&self) -> Result<EstimationScale> {
        EstimationScale::new(self.header.scale_lo, self.header.scale_hi)
    }

    pub fn grid(&self) -> Result<ParameterGrid> {
        build_grid(&self.header.grid)
    }
}

/// One [`FeedbackSimulator::simulate`] per grid cell under stream
/// `(seed, LIBRARY, cell index)`. Cells are independent; any evaluation
/// order yields the identical library. Degenerate cells are recorded, not
/// dropped.
pub fn precompute_library(
    spec: &GridSpec,
    decoder: &DecoderKind,
    trials: usize,
    seed: u64,
    scale: &EstimationScale,
    grid_step: f64,
    binning: Binning,
) -> Result<ModelLibrary> {
    let grid = build_grid(spec)?;
    let sgrid = SGrid::new(*scale, grid_step)?;
    let stream = RngStream::root(seed).substream(context::LIBRARY);
    let cells: Result<Vec<LibraryCell>> = (0..grid.cell_count())
        .into_par_iter()
        .map(|index| {
            let xi = grid.cognition_vector(index, scale)?;
            let sim = FeedbackSimulator::new(&xi, scale, decoder, &sgrid, binning)?;
            match sim.simulate(trials, &stream.substream(index as u64)) {
                Ok(dist) => Ok(LibraryCell::Distribution(dist)),
                Err(Error::DegenerateConfiguration(reason)) => {
                    Ok(LibraryCell::Degenerate { reason })
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    Ok(ModelLibrary {
        header: LibraryHeader {
            format_version: LIBRARY_FORMAT_VERSION,
            grid: spec.clone(),
            decoder: decoder.clone(),
            trials,
            seed,
            scale_lo: scale.lo(),
            scale_hi: scale.hi(),
            grid_step,
            binning,
        },
        cells: cells?,
    })
}

/// The library cell closest to a target distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct FitCandidate {
    pub cell_index: usize,
    pub xi: CognitionVector,
    pub score: f64,
}

/// Exhaustive scan for the cell minimizing `jsd(model, target)`; ties break
/// toward the lowest cell index.
pub fn best_fit(target: &FeedbackDistribution, library: &ModelLibrary) -> Result<FitCandidate> {
    let mut best: Option<(usize, f64)> = None;
    for (index, cell) in library.cells.iter().enumerate() {
        let LibraryCell::Distribution(dist) = cell else { continue };
        let score = jsd(dist, target)?;
        if best.is_none_or(|(_, s)| score < s) {
            best = Some((index, score));
        }
    }
    let (cell_index, score) = best.ok_or_else(|| {
        Error::DegenerateConfiguration("library contains no usable cells".into())
    })?;
    let scale = library.scale()?;
    let xi = library.grid()?.cognition_vector(cell_index, &scale)?;
    Ok(FitCandidate { cell_index, xi, score })
}

/// A best-fit cognition vector for one empirical target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub user: u32,
    pub item: u32,
    pub decoder: String,
    pub xi: CognitionVector,
    pub jsd: f64,
    /// Standard deviation of the target's raw ratings, in stars.
    pub std: f64,
}

/// Best fit per empirical target, parallel over targets.
pub fn fit_dataset(
    targets: &[EmpiricalDistribution],
    library: &ModelLibrary,
) -> Result<Vec<FitResult>> {
    let decoder = library.header.decoder.name().to_string();
    targets
        .par_iter()
        .map(|target| {
            let candidate = best_fit(&target.to_feedback()?, library)?;
            Ok(FitResult {
                user: target.user,
                item: target.item,
                decoder: decoder.clone(),
                xi: candidate.xi,
                jsd: candidate.score,
                std: target.std,
            })
        })
        .collect()
}

pub const CORRELATION_VARIABLES: [&str; 6] = ["n", "g", "w", "o", "s", "std"];

/// Pearson correlations between best-fit parameters and target feedback
/// STD. Entries involving a zero-variance variable are NaN (flagged, not
/// silently zeroed); the diagonal is exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.values[i][j])
    }

    pub fn has_undefined(&self) -> bool {
        self.values.iter().flatten().any(|v| v.is_nan())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str("variable");
        for label in &self.labels {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for (i, label) in self.labels.iter().enumerate() {
            out.push_str(label);
            for v in &self.values[i] {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// 6x6 Pearson correlation matrix over (n, g, w, o, s, STD) across fits.
pub fn correlation_matrix(results: &[FitResult]) -> Result<CorrelationMatrix> {
    if results.len() < 3 {
        return Err(Error::Validation(format!(
            "correlation needs at least 3 fit results, got {}",
            results.len()
        )));
    }
    let columns: Vec<Vec<f64>> = vec![
        results.iter().map(|r| r.xi.n as f64).collect(),
        results.iter().map(|r| r.xi.gain).collect(),
        results.iter().map(|r| r.xi.width).collect(),
        results.iter().map(|r| r.xi.offset).collect(),
        results.iter().map(|r| r.xi.stimulus).collect(),
        results.iter().map(|r| r.std).collect(),
    ];
    let m = results.len() as f64;
    let means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / m).collect();
    let mut values = vec![vec![0.0f64; 6]; 6];
    for i in 0..6 {
        values[i][i] = 1.0;
        for j in (i + 1)..6 {
            let mut cov = 0.0;
            let mut var_i = 0.0;
            let mut var_j = 0.0;
            for (&x, &y) in columns[i].iter().zip(&columns[j]) {
                let dx = x - means[i];
                let dy = y - means[j];
                cov += dx * dy;
                var_i += dx * dx;
                var_j += dy * dy;
            }
            let r = if var_i == 0.0 || var_j == 0.0 {
                f64::NAN
            } else {
                (cov / (var_i * var_j).sqrt()).clamp(-1.0, 1.0)
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        labels: CORRELATION_VARIABLES.iter().map(|s| s.to_string()).collect(),
        values,
    })
}

/// Fit results as CSV with one row per (target, decoder).
pub fn fit_results_to_csv(results: &[FitResult]) -> String {
    let mut out = String::from("target_user,target_item,decoder,n,g,w,o,s,jsd,std\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.user, r.item, r.decoder, r.xi.n, r.xi.gain, r.xi.width, r.xi.offset, r.xi.stimulus,
            r.jsd, r.std
        ));
    }
    out
}

pub fn write_fit_results_csv(results: &[FitResult], path: &Path) -> Result<()> {
    fs::write(path, fit_results_to_csv(results))?;
    Ok(())
}

/// Parse a fit-results CSV written by [`write_fit_results_csv`].
pub fn read_fit_results_csv(path: &Path, scale: &EstimationScale) -> Result<Vec<FitResult>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(Error::Validation("empty fit-results file".into()));
    };
    if header.trim_end() != "target_user,target_item,decoder,n,g,w,o,s,jsd,std" {
        return Err(Error::Parse { line: 1, msg: format!("unexpected header: {header}") });
    }
    let mut results = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 10 fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid {what}: {s}"),
            })
        };
        let parse_u = |s: &str, what: &str| -> Result<u32> {
            s.parse::<u32>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid {what}: {s}"),
            })
        };
        let n = fields[3].parse::<usize>().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("invalid n: {}", fields[3]),
        })?;
        let xi = CognitionVector::new(
            n,
            parse_f(fields[4], "g")?,
            parse_f(fields[5], "w")?,
            parse_f(fields[6], "o")?,
            parse_f(fields[7], "s")?,
            scale,
        )?;
        results.push(FitResult {
            user: parse_u(fields[0], "target_user")?,
            item: parse_u(fields[1], "target_item")?,
            decoder: fields[2].to_string(),
            xi,
            jsd: parse_f(fields[8], "jsd")?,
            std: parse_f(fields[9], "std")?,
        });
    }
    if results.is_empty() {
        return Err(Error::Validation("fit-results file holds no rows".into()));
    }
    Ok(results)
}
