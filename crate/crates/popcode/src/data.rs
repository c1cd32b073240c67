//! Rating datasets: CSV ingestion, per-(user, item) empirical feedback
//! distributions, and a synthetic generator calibrated to published study
//! statistics (67 participants, 5 items, 5 repetition trials; roughly
//! 35% of user-item pairs fully consistent, 50% with two distinct ratings,
//! 15% with three or more; rating STDs exponentially distributed).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feedback::{Binning, FeedbackDistribution};
use crate::noise::{context, RngStream};

pub const MIN_STAR: u8 = 1;
pub const MAX_STAR: u8 = 5;
pub const STAR_COUNT: usize = 5;

/// Mean of the exponential distribution the generator draws per-pair target
/// rating STDs from. Calibrated by one-dimensional search so the generated
/// distinct-rating split lands on 35/50/15 (see `calibration` test).
pub const DEFAULT_STD_SCALE: f64 = 0.337;

pub const DEFAULT_USERS: usize = 67;
pub const DEFAULT_ITEMS: usize = 5;
pub const DEFAULT_TRIALS: usize = 5;

const CSV_HEADER: &str = "user,item,trial,rating";

/// One observed rating: user, item, repetition trial and the star value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub user: u32,
    pub item: u32,
    pub trial: u32,
    pub rating: u8,
}

/// A validated collection of rating records with unique
/// (user, item, trial) keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    records: Vec<RatingRecord>,
}

impl Dataset {
    pub fn new(records: Vec<RatingRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Validation("empty dataset".into()));
        }
        let mut seen = std::collections::HashSet::with_capacity(records.len());
        for r in &records {
            if !(MIN_STAR..=MAX_STAR).contains(&r.rating) {
                return Err(Error::Validation(format!(
                    "rating {} outside {MIN_STAR}..{MAX_STAR} for (user {}, item {}, trial {})",
                    r.rating, r.user, r.item, r.trial
                )));
            }
            if !seen.insert((r.user, r.item, r.trial)) {
                return Err(Error::Validation(format!(
                    "duplicate key (user {}, item {}, trial {})",
                    r.user, r.item, r.trial
                )));
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[RatingRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn user_count(&self) -> usize {
        self.records.iter().map(|r| r.user).collect::<std::collections::HashSet<_>>().len()
    }

    pub fn item_count(&self) -> usize {
        self.records.iter().map(|r| r.item).collect::<std::collections::HashSet<_>>().len()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(16 * self.records.len() + 24);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!("{},{},{},{}\n", r.user, r.item, r.trial, r.rating));
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let Some((_, header)) = lines.next() else {
            return Err(Error::Validation("empty dataset".into()));
        };
        if header.trim_end() != CSV_HEADER {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header '{CSV_HEADER}', got '{header}'"),
            });
        }
        let mut records = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let parse = |s: &str, what: &str| -> Result<u32> {
                s.trim().parse::<u32>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid {what}: '{s}'"),
                })
            };
            let rating = parse(fields[3], "rating")?;
            if !(MIN_STAR as u32..=MAX_STAR as u32).contains(&rating) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("rating {rating} outside {MIN_STAR}..{MAX_STAR}"),
                });
            }
            records.push(RatingRecord {
                user: parse(fields[0], "user")?,
                item: parse(fields[1], "item")?,
                trial: parse(fields[2], "trial")?,
                rating: rating as u8,
            });
        }
        Self::new(records)
    }
}

/// Read a rating dataset from a `user,item,trial,rating` CSV file.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    Dataset::from_csv_str(&fs::read_to_string(path)?)
}

/// Write a dataset as CSV (UTF-8, LF line endings).
pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    fs::write(path, dataset.to_csv_string())?;
    Ok(())
}

/// Per-(user, item) rating histogram and the raw-rating standard deviation
/// (population formula: the trials are the whole feedback distribution).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    pub user: u32,
    pub item: u32,
    pub probs: Vec<f64>,
    pub std: f64,
}

impl EmpiricalDistribution {
    pub fn to_feedback(&self) -> Result<FeedbackDistribution> {
        FeedbackDistribution::new(Binning::IntegerStars, self.probs.clone())
    }
}

/// Normalized per-(user, item) star histograms, ordered by (user, item).
pub fn empirical_distributions(dataset: &Dataset) -> Result<Vec<EmpiricalDistribution>> {
    let mut groups: BTreeMap<(u32, u32), Vec<u8>> = BTreeMap::new();
    for r in dataset.records() {
        groups.entry((r.user, r.item)).or_default().push(r.rating);
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((user, item), ratings) in groups {
        let count = ratings.len() as f64;
        let mut probs = vec![0.0f64; STAR_COUNT];
        let mut sum = 0.0f64;
        for &r in &ratings {
            probs[(r - MIN_STAR) as usize] += 1.0 / count;
            sum += r as f64;
        }
        let mean = sum / count;
        let var =
            ratings.iter().map(|&r| (r as f64 - mean) * (r as f64 - mean)).sum::<f64>() / count;
        out.push(EmpiricalDistribution { user, item, probs, std: var.sqrt() });
    }
    Ok(out)
}

/// Pool all records into a single empirical distribution (the alternative
/// to per-(user, item) fitting).
pub fn pooled_distribution(dataset: &Dataset) -> Result<EmpiricalDistribution> {
    let count = dataset.len() as f64;
    let mut probs = vec![0.0f64; STAR_COUNT];
    let mut sum = 0.0f64;
    for r in dataset.records() {
        probs[(r.rating - MIN_STAR) as usize] += 1.0 / count;
        sum += r.rating as f64;
    }
    let mean = sum / count;
    let var = dataset
        .records()
        .iter()
        .map(|r| (r.rating as f64 - mean) * (r.rating as f64 - mean))
        .sum::<f64>()
        / count;
    Ok(EmpiricalDistribution { user: 0, item: 0, probs, std: var.sqrt() })
}

/// Synthetic rating study: each (user, item) pair gets a central tendency
/// drawn uniformly from [1, 5] and a target STD drawn from an exponential
/// distribution with mean `std_scale`; each trial is a Gaussian draw around
/// that center, rounded half-up and clipped to the star range.
pub fn synthesize_dataset(
    users: usize,
    items: usize,
    trials: usize,
    seed: u64,
    std_scale: f64,
) -> Result<Dataset> {
    if users == 0 || items == 0 || trials == 0 {
        return Err(Error::InvalidParameter(
            "users, items and trials must all be positive".into(),
        ));
    }
    if !std_scale.is_finite() || std_scale < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "std_scale must be finite and nonnegative, got {std_scale}"
        )));
    }
    let stream = RngStream::root(seed).substream(context::GENDATA);
    let mut records = Vec::with_capacity(users * items * trials);
    for user in 0..users {
        for item in 0..items {
            let pair_index = (user * items + item) as u64;
            let mut rng = stream.substream(pair_index).rng();
            let center: f64 = rng.random_range(1.0..=5.0);
            let sigma: f64 = {
                let e: f64 = Exp1.sample(&mut rng);
                std_scale * e
            };
            for trial in 0..trials {
                let z: f64 = StandardNormal.sample(&mut rng);
                let value = center + sigma * z;
                let star = (value + 0.5).floor().clamp(MIN_STAR as f64, MAX_STAR as f64);
                records.push(RatingRecord {
                    user: user as u32 + 1,
                    item: item as u32 + 1,
                    trial: trial as u32 + 1,
                    rating: star as u8,
                });
            }
        }
    }
    Dataset::new(records)
}

/// Fractions of (user, item) pairs whose trials used exactly one, exactly
/// two, and three or more distinct ratings.
pub fn distinct_rating_split(dataset: &Dataset) -> (f64, f64, f64) {
    let mut groups: BTreeMap<(u32, u32), std::collections::HashSet<u8>> = BTreeMap::new();
    for r in dataset.records() {
        groups.entry((r.user, r.item)).or_default().insert(r.rating);
    }
    let total = groups.len() as f64;
    let mut counts = [0usize; 3];
    for distinct in groups.values() {
        counts[(distinct.len() - 1).min(2)] += 1;
    }
    (counts[0] as f64 / total, counts[1] as f64 / total, counts[2] as f64 / total)
}
