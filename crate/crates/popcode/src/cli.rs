//! Command-line surface: `gendata`, `simulate`, `decode`, `fit`, `eeg` and
//! `analyze` subcommands gluing the pipeline together.
//!
//! Every flag has a config-file equivalent (JSON, `--config`); flags win on
//! conflict. Runs are reproducible from (config, seed) alone and outputs
//! are byte-identical under any `--workers` setting.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime or
//! degenerate-configuration error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data::{
    self, distinct_rating_split, empirical_distributions, load_dataset, pooled_distribution,
    save_dataset, synthesize_dataset,
};
use crate::decoders::{DecoderKind, LikelihoodTables, LogPriorTable, Prior, SGrid};
use crate::decoders::{decode_mld, decode_mvd, decode_wad, DEFAULT_GRID_STEP};
use crate::error::{Error, Result};
use crate::feedback::{star_weights_prior, Binning, FeedbackSimulator};
use crate::fitting::{
    correlation_matrix, fit_results_to_csv, precompute_library, read_fit_results_csv, FitResult,
    GridSpec, ModelLibrary,
};
use crate::model::{CognitionVector, EstimationScale, Population};
use crate::neurodynamics::{
    eeg_frequency, events_over_time, fit_sine, rate_statistics, EegOptions, TrainKind,
};
use crate::noise::{context, sample_population_response, RngStream};
use crate::svg;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SIMULATE_TRIALS: usize = 10_000;
pub const DEFAULT_LIBRARY_TRIALS: usize = 500;

/// JSON config mirroring every CLI flag; any field may be omitted.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub scale: Option<[f64; 2]>,
    pub grid: Option<GridSpec>,
    pub grid_preset: Option<String>,
    pub grid_step: Option<f64>,
    pub binning: Option<String>,
    pub decoder: Option<String>,
    pub decoders: Option<Vec<String>>,
    pub prior: Option<String>,
    pub xi: Option<String>,
    pub m: Option<usize>,
    pub library_m: Option<usize>,
    pub dataset: Option<PathBuf>,
    pub fits: Option<PathBuf>,
    pub users: Option<usize>,
    pub items: Option<usize>,
    pub trials: Option<usize>,
    pub std_scale: Option<f64>,
    pub t_end: Option<f64>,
    pub delta: Option<f64>,
    pub train: Option<String>,
    pub pooled: Option<bool>,
    pub resume: Option<bool>,
    pub svg: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "popcode",
    version,
    about = "Probabilistic population codes for variable decision-making: \
             simulate feedback, fit cognition vectors, derive neurodynamics"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Master seed; every run is reproducible from (config, seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config file; flags win on conflict
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores); never changes results
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (gendata, simulate, decode) or directory (fit, eeg, analyze)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic rating study as CSV
    Gendata {
        #[arg(long)]
        users: Option<usize>,
        #[arg(long)]
        items: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Mean of the exponential distribution of per-pair rating STDs
        #[arg(long)]
        std_scale: Option<f64>,
    },
    /// Monte-Carlo feedback distribution for one cognition vector
    Simulate {
        /// Cognition vector as n,g,w,o,s
        #[arg(long)]
        xi: Option<String>,
        /// mvd | wad | mld | mad
        #[arg(long)]
        decoder: Option<String>,
        /// Trials
        #[arg(long)]
        m: Option<usize>,
        /// flat | gaussian:MU:VAR | stars:W1,W2,W3,W4,W5 (mad only)
        #[arg(long)]
        prior: Option<String>,
        /// integer-stars | uniform:K
        #[arg(long)]
        binning: Option<String>,
        /// Also write an SVG histogram next to the JSON output
        #[arg(long)]
        svg: bool,
    },
    /// Sample one noisy response (or take --response) and decode it
    Decode {
        /// Cognition vector as n,g,w,o,s
        #[arg(long)]
        xi: Option<String>,
        /// mvd | wad | mld | mad
        #[arg(long)]
        decoder: Option<String>,
        /// Prior for mad (see simulate)
        #[arg(long)]
        prior: Option<String>,
        /// Comma-separated spike counts; sampled from xi when omitted
        #[arg(long)]
        response: Option<String>,
    },
    /// Fit cognition vectors to a rating dataset by brute-force JSD search
    Fit {
        /// Rating CSV (user,item,trial,rating)
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// desk | paper | an integer K for K values per parameter
        #[arg(long)]
        grid: Option<String>,
        /// Comma-separated decoder list, e.g. mld,wad
        #[arg(long)]
        decoders: Option<String>,
        /// Prior for mad (see simulate)
        #[arg(long)]
        prior: Option<String>,
        /// Trials per library cell
        #[arg(long)]
        m: Option<usize>,
        /// Reuse an existing library file when its header matches
        #[arg(long)]
        resume: bool,
        /// Fit the pooled distribution of all records instead of
        /// per-(user,item) targets
        #[arg(long)]
        pooled: bool,
    },
    /// Events-over-time sine fits and EEG-frequency estimates
    Eeg {
        /// Single cognition vector as n,g,w,o,s
        #[arg(long)]
        xi: Option<String>,
        /// Fit-results CSV: one frequency estimate per row
        #[arg(long)]
        fits: Option<PathBuf>,
        /// Simulation duration in seconds
        #[arg(long)]
        t_end: Option<f64>,
        /// Bin width in seconds
        #[arg(long)]
        delta: Option<f64>,
        /// periodic | poisson
        #[arg(long)]
        train: Option<String>,
    },
    /// Rate statistics and parameter correlations from fit results
    Analyze {
        /// Fit-results CSV
        #[arg(long)]
        fits: Option<PathBuf>,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let config = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let workers = cli.common.workers.or(config.workers);
    if let Some(workers) = workers {
        if workers == 0 {
            return Err(Error::Validation("--workers must be at least 1".into()));
        }
        // Already-initialized pools (e.g. in tests) keep their size; results
        // do not depend on it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let seed = cli.common.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let out = cli.common.out.clone().or_else(|| config.out.clone());
    let scale = match config.scale {
        Some([lo, hi]) => EstimationScale::new(lo, hi)?,
        None => EstimationScale::default(),
    };

    match cli.command {
        Command::Gendata { users, items, trials, std_scale } => cmd_gendata(
            users.or(config.users).unwrap_or(data::DEFAULT_USERS),
            items.or(config.items).unwrap_or(data::DEFAULT_ITEMS),
            trials.or(config.trials).unwrap_or(data::DEFAULT_TRIALS),
            std_scale.or(config.std_scale).unwrap_or(data::DEFAULT_STD_SCALE),
            seed,
            out.unwrap_or_else(|| PathBuf::from("ratings.csv")),
        ),
        Command::Simulate { xi, decoder, m, prior, binning, svg } => {
            let grid = SGrid::new(scale, config.grid_step.unwrap_or(DEFAULT_GRID_STEP))?;
            cmd_simulate(
                parse_xi(&require(xi.or(config.xi.clone()), "--xi")?, &scale)?,
                parse_decoder(
                    decoder.or(config.decoder.clone()).as_deref().unwrap_or("mld"),
                    prior.or(config.prior.clone()).as_deref(),
                    &grid,
                    &scale,
                )?,
                m.or(config.m).unwrap_or(DEFAULT_SIMULATE_TRIALS),
                parse_binning(binning.or(config.binning.clone()).as_deref())?,
                &grid,
                &scale,
                seed,
                out.unwrap_or_else(|| PathBuf::from("feedback.json")),
                svg || config.svg.unwrap_or(false),
            )
        }
        Command::Decode { xi, decoder, prior, response } => {
            let grid = SGrid::new(scale, config.grid_step.unwrap_or(DEFAULT_GRID_STEP))?;
            cmd_decode(
                parse_xi(&require(xi.or(config.xi.clone()), "--xi")?, &scale)?,
                parse_decoder(
                    decoder.or(config.decoder.clone()).as_deref().unwrap_or("mld"),
                    prior.or(config.prior.clone()).as_deref(),
                    &grid,
                    &scale,
                )?,
                response,
                &grid,
                &scale,
                seed,
                out,
            )
        }
        Command::Fit { dataset, grid, decoders, prior, m, resume, pooled } => {
            let sgrid = SGrid::new(scale, config.grid_step.unwrap_or(DEFAULT_GRID_STEP))?;
            let spec = match grid.as_deref().or(config.grid_preset.as_deref()) {
                Some(name) => parse_grid_preset(name)?,
                None => config.grid.clone().unwrap_or_else(GridSpec::desk_scale),
            };
            let names = decoders
                .or_else(|| config.decoders.clone().map(|v| v.join(",")))
                .unwrap_or_else(|| "mvd,wad,mld,mad".to_string());
            let kinds = names
                .split(',')
                .map(|name| {
                    parse_decoder(
                        name.trim(),
                        prior.as_deref().or(config.prior.as_deref()),
                        &sgrid,
                        &scale,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            cmd_fit(
                require(dataset.or(config.dataset.clone()), "--dataset")?,
                spec,
                kinds,
                m.or(config.library_m).or(config.m).unwrap_or(DEFAULT_LIBRARY_TRIALS),
                seed,
                &scale,
                config.grid_step.unwrap_or(DEFAULT_GRID_STEP),
                resume || config.resume.unwrap_or(false),
                pooled || config.pooled.unwrap_or(false),
                out.unwrap_or_else(|| PathBuf::from("fit_out")),
            )
        }
        Command::Eeg { xi, fits, t_end, delta, train } => {
            let options = EegOptions {
                t_end: t_end.or(config.t_end).unwrap_or(1.0),
                delta: delta.or(config.delta).unwrap_or(0.005),
                train: parse_train(train.or(config.train.clone()).as_deref())?,
            };
            cmd_eeg(
                xi.or(config.xi.clone()).map(|s| parse_xi(&s, &scale)).transpose()?,
                fits.or(config.fits.clone()),
                options,
                &scale,
                seed,
                out.unwrap_or_else(|| PathBuf::from("eeg_out")),
            )
        }
        Command::Analyze { fits } => cmd_analyze(
            require(fits.or(config.fits.clone()), "--fits")?,
            &scale,
            seed,
            out.unwrap_or_else(|| PathBuf::from("analysis_out")),
        ),
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Validation(format!("{flag} is required (flag or config)")))
}

fn parse_xi(text: &str, scale: &EstimationScale) -> Result<CognitionVector> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(Error::Validation(format!(
            "cognition vector must be n,g,w,o,s — got '{text}'"
        )));
    }
    let n = parts[0]
        .parse::<usize>()
        .map_err(|_| Error::Validation(format!("invalid population size '{}'", parts[0])))?;
    let mut values = [0.0f64; 4];
    for (slot, part) in values.iter_mut().zip(&parts[1..]) {
        *slot = part
            .parse::<f64>()
            .map_err(|_| Error::Validation(format!("invalid number '{part}'")))?;
    }
    CognitionVector::new(n, values[0], values[1], values[2], values[3], scale)
}

fn parse_prior(text: &str, grid: &SGrid, scale: &EstimationScale) -> Result<Prior> {
    if text == "flat" {
        return Ok(Prior::Flat);
    }
    if let Some(rest) = text.strip_prefix("gaussian:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 2 {
            return Err(Error::Validation(format!(
                "gaussian prior must be gaussian:MU:VAR — got '{text}'"
            )));
        }
        let mean = parts[0]
            .parse::<f64>()
            .map_err(|_| Error::Validation(format!("invalid prior mean '{}'", parts[0])))?;
        let variance = parts[1]
            .parse::<f64>()
            .map_err(|_| Error::Validation(format!("invalid prior variance '{}'", parts[1])))?;
        return Ok(Prior::Gaussian { mean, variance });
    }
    if let Some(rest) = text.strip_prefix("stars:") {
        let weights = rest
            .split(',')
            .map(|w| {
                w.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Validation(format!("invalid star weight '{w}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        return star_weights_prior(&weights, grid, scale);
    }
    Err(Error::Validation(format!(
        "unknown prior '{text}' (expected flat, gaussian:MU:VAR or stars:...)"
    )))
}

fn parse_decoder(
    name: &str,
    prior: Option<&str>,
    grid: &SGrid,
    scale: &EstimationScale,
) -> Result<DecoderKind> {
    match name {
        "mvd" => Ok(DecoderKind::Mvd),
        "wad" => Ok(DecoderKind::Wad),
        "mld" => Ok(DecoderKind::Mld),
        "mad" => match prior {
            Some(text) => Ok(DecoderKind::Mad(parse_prior(text, grid, scale)?)),
            None => Ok(DecoderKind::mad_default()),
        },
        other => Err(Error::Validation(format!(
            "unknown decoder '{other}' (expected mvd, wad, mld or mad)"
        ))),
    }
}

fn parse_binning(text: Option<&str>) -> Result<Binning> {
    match text {
        None | Some("integer-stars") => Ok(Binning::IntegerStars),
        Some(other) => match other.strip_prefix("uniform:") {
            Some(k) => Ok(Binning::Uniform(k.parse::<usize>().map_err(|_| {
                Error::Validation(format!("invalid uniform bin count '{k}'"))
            })?)),
            None => Err(Error::Validation(format!(
                "unknown binning '{other}' (expected integer-stars or uniform:K)"
            ))),
        },
    }
}

fn parse_train(text: Option<&str>) -> Result<TrainKind> {
    match text {
        None | Some("periodic") => Ok(TrainKind::Periodic),
        Some("poisson") => Ok(TrainKind::Poisson),
        Some(other) => {
            Err(Error::Validation(format!("unknown train kind '{other}'")))
        }
    }
}

fn parse_grid_preset(name: &str) -> Result<GridSpec> {
    match name {
        "desk" => Ok(GridSpec::desk_scale()),
        "paper" => Ok(GridSpec::paper_default()),
        other => match other.parse::<usize>() {
            Ok(count) if count >= 1 => Ok(GridSpec::with_count(count)),
            _ => Err(Error::Validation(format!(
                "unknown grid preset '{other}' (expected desk, paper or a count)"
            ))),
        },
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn cmd_gendata(
    users: usize,
    items: usize,
    trials: usize,
    std_scale: f64,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    let dataset = synthesize_dataset(users, items, trials, seed, std_scale)?;
    save_dataset(&dataset, &out)?;
    let (one, two, three) = distinct_rating_split(&dataset);
    println!("wrote {} ratings to {}", dataset.len(), out.display());
    println!(
        "distinct ratings per (user,item): one {:.1}%, two {:.1}%, three-plus {:.1}%",
        100.0 * one,
        100.0 * two,
        100.0 * three
    );
    Ok(())
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    xi: &'a CognitionVector,
    decoder: &'a str,
    trials: usize,
    seed: u64,
    distribution: &'a crate::feedback::FeedbackDistribution,
    estimate_mean: f64,
    estimate_std: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    xi: CognitionVector,
    decoder: DecoderKind,
    trials: usize,
    binning: Binning,
    grid: &SGrid,
    scale: &EstimationScale,
    seed: u64,
    out: PathBuf,
    emit_svg: bool,
) -> Result<()> {
    let sim = FeedbackSimulator::new(&xi, scale, &decoder, grid, binning)?;
    let run = sim.run(trials, &RngStream::root(seed).substream(context::SIMULATE))?;
    write_json(
        &SimulateOutput {
            xi: &xi,
            decoder: decoder.name(),
            trials,
            seed,
            distribution: &run.distribution,
            estimate_mean: run.estimate_mean,
            estimate_std: run.estimate_std,
        },
        &out,
    )?;
    println!(
        "{} feedback over {} trials: probs {:?}, estimate mean {:.4}, estimate std {:.4}",
        decoder.name(),
        trials,
        run.distribution.probs(),
        run.estimate_mean,
        run.estimate_std
    );
    if emit_svg {
        let labels: Vec<String> =
            binning.centers(scale)?.iter().map(|c| format!("{c:.2}")).collect();
        let chart = svg::bar_chart(
            &format!("{} feedback distribution", decoder.name()),
            &labels,
            run.distribution.probs(),
            "probability",
        );
        fs::write(out.with_extension("svg"), chart)?;
    }
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Serialize)]
struct DecodeOutput<'a> {
    xi: &'a CognitionVector,
    decoder: &'a str,
    response: &'a [u64],
    estimate: f64,
}

fn cmd_decode(
    xi: CognitionVector,
    decoder: DecoderKind,
    response: Option<String>,
    grid: &SGrid,
    scale: &EstimationScale,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    let pop = Population::for_cognition(&xi, *scale)?;
    let mut rng = RngStream::root(seed).substream(context::DECODE).rng();
    let response = match response {
        Some(text) => {
            let counts = text
                .split(',')
                .map(|c| {
                    c.trim().parse::<u64>().map_err(|_| {
                        Error::Validation(format!("invalid spike count '{c}'"))
                    })
                })
                .collect::<Result<Vec<u64>>>()?;
            if counts.len() != xi.n {
                return Err(Error::Validation(format!(
                    "response has {} counts but the population has {}",
                    counts.len(),
                    xi.n
                )));
            }
            crate::noise::PopulationResponse::new(counts)
        }
        None => sample_population_response(&xi, scale, &mut rng)?,
    };
    let estimate = match &decoder {
        DecoderKind::Mvd => decode_mvd(&response, &pop, &mut rng),
        DecoderKind::Wad => decode_wad(&response, &pop)?,
        DecoderKind::Mld => decode_mld(&response, &LikelihoodTables::new(&pop, grid)),
        DecoderKind::Mad(prior) => {
            let tables = LikelihoodTables::new(&pop, grid);
            let table = LogPriorTable::new(prior, grid)?;
            crate::decoders::decode_mad(&response, &tables, &table)
        }
    };
    let output = DecodeOutput {
        xi: &xi,
        decoder: decoder.name(),
        response: response.counts(),
        estimate,
    };
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    println!("{text}");
    if let Some(path) = out {
        fs::write(path, text)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_fit(
    dataset_path: PathBuf,
    spec: GridSpec,
    decoders: Vec<DecoderKind>,
    library_trials: usize,
    seed: u64,
    scale: &EstimationScale,
    grid_step: f64,
    resume: bool,
    pooled: bool,
    out_dir: PathBuf,
) -> Result<()> {
    fs::create_dir_all(&out_dir)?;
    let dataset = load_dataset(&dataset_path)?;
    let targets = if pooled {
        vec![pooled_distribution(&dataset)?]
    } else {
        empirical_distributions(&dataset)?
    };
    println!(
        "fitting {} target(s) from {} ratings against {} decoder(s)",
        targets.len(),
        dataset.len(),
        decoders.len()
    );

    let mut all_results: Vec<FitResult> = Vec::new();
    for decoder in &decoders {
        let lib_path = out_dir.join(format!("library_{}.json", decoder.name()));
        let expected_header = crate::fitting::LibraryHeader {
            format_version: 1,
            grid: spec.clone(),
            decoder: decoder.clone(),
            trials: library_trials,
            seed,
            scale_lo: scale.lo(),
            scale_hi: scale.hi(),
            grid_step,
            binning: Binning::IntegerStars,
        };
        let library = if resume && lib_path.exists() {
            match ModelLibrary::load(&lib_path) {
                Ok(lib) if lib.header == expected_header => {
                    eprintln!("reusing library {}", lib_path.display());
                    lib
                }
                Ok(_) => {
                    eprintln!(
                        "library {} has a different header; recomputing",
                        lib_path.display()
                    );
                    compute_and_save(&spec, decoder, library_trials, seed, scale, grid_step, &lib_path)?
                }
                Err(e) => {
                    eprintln!("library {} unreadable ({e}); recomputing", lib_path.display());
                    compute_and_save(&spec, decoder, library_trials, seed, scale, grid_step, &lib_path)?
                }
            }
        } else {
            compute_and_save(&spec, decoder, library_trials, seed, scale, grid_step, &lib_path)?
        };

        let results = crate::fitting::fit_dataset(&targets, &library)?;
        let mut scores: Vec<f64> = results.iter().map(|r| r.jsd).collect();
        scores.sort_by(f64::total_cmp);
        let median = scores[scores.len() / 2];
        println!("{}: median best-fit JSD {:.4}", decoder.name(), median);

        if results.len() >= 3 {
            let corr = correlation_matrix(&results)?;
            fs::write(
                out_dir.join(format!("correlations_{}.csv", decoder.name())),
                corr.to_csv_string(),
            )?;
        }
        all_results.extend(results);
    }

    let fits_path = out_dir.join("fits.csv");
    fs::write(&fits_path, fit_results_to_csv(&all_results))?;
    println!("wrote {}", fits_path.display());
    Ok(())
}

fn compute_and_save(
    spec: &GridSpec,
    decoder: &DecoderKind,
    trials: usize,
    seed: u64,
    scale: &EstimationScale,
    grid_step: f64,
    path: &Path,
) -> Result<ModelLibrary> {
    let library = precompute_library(
        spec,
        decoder,
        trials,
        seed,
        scale,
        grid_step,
        Binning::IntegerStars,
    )?;
    library.save(path)?;
    eprintln!("computed library {}", path.display());
    Ok(library)
}

#[derive(Serialize)]
struct EegSingleOutput<'a> {
    xi: &'a CognitionVector,
    t_end: f64,
    delta: f64,
    frequency: Option<f64>,
    amplitude: f64,
    offset: f64,
    residual_rms: f64,
}

fn cmd_eeg(
    xi: Option<CognitionVector>,
    fits: Option<PathBuf>,
    options: EegOptions,
    scale: &EstimationScale,
    seed: u64,
    out_dir: PathBuf,
) -> Result<()> {
    fs::create_dir_all(&out_dir)?;
    let stream = RngStream::root(seed).substream(context::EEG);
    match (xi, fits) {
        (Some(xi), _) => {
            let statics = crate::model::static_population_response(&xi, scale)?;
            let binned = events_over_time(statics.rates(), &options, &stream)?;
            let fit = fit_sine(&binned)?;
            let centers = binned.centers();

            let mut csv = String::from("bin_center_s,count,fitted\n");
            let fitted: Vec<(f64, f64)> = centers
                .iter()
                .map(|&t| {
                    let value = match fit.frequency {
                        Some(f) => {
                            fit.amplitude
                                * (std::f64::consts::TAU * f * t + fit.phase).sin()
                                + fit.offset
                        }
                        None => fit.offset,
                    };
                    (t, value)
                })
                .collect();
            for ((&t, &c), &(_, fv)) in centers.iter().zip(&binned.counts).zip(&fitted) {
                csv.push_str(&format!("{t},{c},{fv}\n"));
            }
            fs::write(out_dir.join("events_over_time.csv"), csv)?;

            let points: Vec<(f64, f64)> =
                centers.iter().zip(&binned.counts).map(|(&t, &c)| (t, c as f64)).collect();
            fs::write(
                out_dir.join("events_over_time.svg"),
                svg::scatter_with_curve(
                    "events over time",
                    &points,
                    Some(&fitted),
                    "time [s]",
                    "total counts",
                ),
            )?;
            write_json(
                &EegSingleOutput {
                    xi: &xi,
                    t_end: options.t_end,
                    delta: options.delta,
                    frequency: fit.frequency,
                    amplitude: fit.amplitude,
                    offset: fit.offset,
                    residual_rms: fit.residual_rms,
                },
                &out_dir.join("eeg.json"),
            )?;
            match fit.frequency {
                Some(f) => println!("fitted EEG frequency: {f:.2} Hz"),
                None => println!("no oscillation detected"),
            }
        }
        (None, Some(fits_path)) => {
            let results = read_fit_results_csv(&fits_path, scale)?;
            let mut csv = String::from("target_user,target_item,decoder,frequency_hz\n");
            let mut freqs = Vec::with_capacity(results.len());
            for (i, r) in results.iter().enumerate() {
                let f = eeg_frequency(&r.xi, scale, &options, &stream.substream(i as u64))?;
                freqs.push(f);
                csv.push_str(&format!("{},{},{},{}\n", r.user, r.item, r.decoder, f));
            }
            fs::write(out_dir.join("eeg_frequencies.csv"), csv)?;
            fs::write(
                out_dir.join("eeg_histogram.svg"),
                svg::value_histogram("EEG frequency distribution", &freqs, 20, "Hz", None),
            )?;
            let mean = freqs.iter().sum::<f64>() / freqs.len() as f64;
            println!("estimated {} EEG frequencies, mean {:.1} Hz", freqs.len(), mean);
        }
        (None, None) => {
            return Err(Error::Validation("eeg needs --xi or --fits".into()));
        }
    }
    println!("wrote outputs to {}", out_dir.display());
    Ok(())
}

fn cmd_analyze(
    fits_path: PathBuf,
    scale: &EstimationScale,
    _seed: u64,
    out_dir: PathBuf,
) -> Result<()> {
    fs::create_dir_all(&out_dir)?;
    let results = read_fit_results_csv(&fits_path, scale)?;

    // pooled spiking rates across all best-fit vectors
    let ensemble: Vec<CognitionVector> = results.iter().map(|r| r.xi).collect();
    let stats = rate_statistics(&ensemble, scale)?;
    write_json(&stats.summary(), &out_dir.join("rate_stats.json"))?;
    let overlay: Vec<(f64, f64)> = {
        let max = stats.summary().max_rate;
        (0..=200)
            .map(|i| {
                let r = max * i as f64 / 200.0;
                (r, stats.lognormal_density(r))
            })
            .collect()
    };
    fs::write(
        out_dir.join("rate_histogram.svg"),
        svg::value_histogram(
            "neuronal activity distribution",
            stats.rates(),
            30,
            "spiking rate [Hz]",
            Some(&overlay),
        ),
    )?;
    println!(
        "pooled {} rates: mean {:.2} Hz, log-normal mean {:.2} Hz",
        stats.rates().len(),
        stats.mean_rate(),
        stats.summary().lognormal_mean
    );

    // correlations per decoder present in the file
    let mut decoders: Vec<String> = Vec::new();
    for r in &results {
        if !decoders.contains(&r.decoder) {
            decoders.push(r.decoder.clone());
        }
    }
    for name in &decoders {
        let subset: Vec<FitResult> =
            results.iter().filter(|r| &r.decoder == name).cloned().collect();
        if subset.len() < 3 {
            eprintln!("skipping correlations for {name}: fewer than 3 fits");
            continue;
        }
        let corr = correlation_matrix(&subset)?;
        fs::write(out_dir.join(format!("correlations_{name}.csv")), corr.to_csv_string())?;
        fs::write(
            out_dir.join(format!("correlation_heatmap_{name}.svg")),
            svg::heatmap(
                &format!("parameter correlations ({name})"),
                &corr.labels,
                &corr.values,
            ),
        )?;
        println!(
            "{name}: corr(n,w) {:.2}, corr(g,o) {:.2}, corr(std,g) {:.2}",
            corr.get("n", "w").unwrap_or(f64::NAN),
            corr.get("g", "o").unwrap_or(f64::NAN),
            corr.get("std", "g").unwrap_or(f64::NAN)
        );
    }
    println!("wrote outputs to {}", out_dir.display());
    Ok(())
}
