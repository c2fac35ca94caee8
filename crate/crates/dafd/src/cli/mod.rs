//! The `dafd` command-line surface. Every subcommand is a thin wrapper over
//! the library; all state flows through files under `--out`. Progress and
//! metrics go to stdout as `key=value` records; human-readable tables come
//! from `report` only.

mod config;

pub use config::{write_provenance, RunConfig};

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::dann::{fit, grid_search, SegmentPool, TrainMode, WEIGHT_DECAY};
use crate::error::{DafdError, Result};
use crate::eval::{
    build_report, enumerate_pairs, export_features, read_results_csv, run_pair, write_results_csv,
    PairData, PairResult, PairSpec, Scenario,
};
use crate::ingest::{
    adapt_dataset, load_canonical, synth_domain_pair, write_canonical, ColumnMapping, DomainShift,
    Position, SynthSpec, TrialRecord,
};
use crate::nn::{
    grad_check, load_checkpoint, save_checkpoint, Checkpoint, ModelParams, Tensor,
    INPUT_CHANNELS, INPUT_LEN,
};
use crate::rng::{derive_seed, stream};
use crate::signal::{preprocess_all, write_segment_dump, DomainTag, WindowConfig};

const GRADCHECK_TOLERANCE: f64 = 1e-4;

#[derive(Parser)]
#[command(
    name = "dafd",
    version,
    about = "Domain-adaptive fall detection: synthesize or adapt data, preprocess, train adversarially, and evaluate cross-domain pairs",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonOpts {
    /// TOML run-config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Canonical data directory (contains manifest.csv), or an input file
    /// where the command says so
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory (or file for export-features)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Training mode: source_only | dafd | dafd_adl | target_only
    #[arg(long)]
    mode: Option<String>,
    /// Pair scenario: cross_position | cross_config
    #[arg(long)]
    scenario: Option<String>,
    /// One source:target pair, e.g. upfall/WA:upfall/RP or synth/WA:synth/RP
    #[arg(long)]
    pair: Option<String>,
    /// Master random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Parallel worker bound for independent jobs
    #[arg(long)]
    jobs: Option<usize>,
    /// Maximum training epochs
    #[arg(long)]
    epochs: Option<usize>,
    /// Early-stopping patience in epochs
    #[arg(long)]
    patience: Option<usize>,
    /// Learning rate
    #[arg(long)]
    lr: Option<f64>,
    /// Domain regularization parameter
    #[arg(long)]
    lambda: Option<f64>,
    /// Dropout rate for the classifier heads
    #[arg(long)]
    dropout: Option<f64>,
}

impl CommonOpts {
    fn run_config(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::from_toml_file(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            data: self.data.clone(),
            out: self.out.clone(),
            mode: self.mode.clone(),
            scenario: self.scenario.clone(),
            pair: self.pair.clone(),
            seed: self.seed,
            jobs: self.jobs,
            epochs: self.epochs,
            patience: self.patience,
            lr: self.lr,
            lambda: self.lambda,
            dropout: self.dropout,
            ..RunConfig::default()
        };
        Ok(base.overlay(flags))
    }
}

fn parse_triple(s: &str) -> std::result::Result<Triple, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated values, got {s:?}"));
    }
    let mut out = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .trim()
            .parse()
            .map_err(|_| format!("bad number {:?}", p.trim()))?;
    }
    Ok(Triple(out))
}

#[derive(Debug, Clone, Copy)]
struct Triple([f64; 3]);

#[derive(Subcommand)]
enum Command {
    /// Generate a paired synthetic two-domain corpus in canonical layout
    Synth {
        #[command(flatten)]
        common: CommonOpts,
        /// Number of subjects
        #[arg(long)]
        subjects: Option<usize>,
        /// Trials per class per subject
        #[arg(long)]
        trials: Option<usize>,
        /// Source sampling rate in Hz
        #[arg(long)]
        rate: Option<f64>,
        /// Per-axis noise sigma in g
        #[arg(long)]
        noise: Option<f64>,
        /// Target-domain rotation about the vertical axis, degrees
        #[arg(long)]
        rotation: Option<f64>,
        /// Target-domain per-axis gain, e.g. 0.9,1.1,1.0
        #[arg(long, value_parser = parse_triple)]
        gain: Option<Triple>,
        /// Target-domain per-axis offset in g, e.g. 0.0,0.05,0.0
        #[arg(long, value_parser = parse_triple)]
        offset: Option<Triple>,
        /// Target-domain sampling rate override in Hz
        #[arg(long)]
        rate_override: Option<f64>,
        /// Fraction of ADL trials rendered as fall-like lie-down confusers
        #[arg(long)]
        confusers: Option<f64>,
    },
    /// Convert raw per-trial CSV exports to the canonical layout
    Adapt {
        #[command(flatten)]
        common: CommonOpts,
        /// Column-mapping TOML file (time_col/x_col/y_col/z_col/unit/rate_hz)
        #[arg(long)]
        mapping: PathBuf,
        /// Dataset identifier, e.g. upfall or umafall
        #[arg(long)]
        dataset: String,
        /// Sensor position code: N, WA, RP, LP, WR, A, C
        #[arg(long)]
        position: String,
    },
    /// Preprocess one pair into normalized 66x3 segments (debug dump)
    Preprocess {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Train one model on one pair in one mode
    Train {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run the 27-tuple hyperparameter grid search on one pair
    Grid {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Evaluate pairs of a scenario (or one --pair) over 5-fold LSOCV
    Evalpairs {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Render a results CSV as the metrics-by-mode table
    Report {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Export eval-mode extractor features for a trained model
    #[command(name = "export-features")]
    ExportFeatures {
        #[command(flatten)]
        common: CommonOpts,
        /// Model checkpoint to load
        #[arg(long)]
        model: PathBuf,
    },
    /// Verify analytic gradients against central finite differences
    Gradcheck {
        #[command(flatten)]
        common: CommonOpts,
        /// Finite-difference step
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
    },
    /// List the source->target pairs of a scenario
    Pairs {
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the process exit code: 0 success, 1 runtime failure, 2 usage error.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth {
            common,
            subjects,
            trials,
            rate,
            noise,
            rotation,
            gain,
            offset,
            rate_override,
            confusers,
        } => {
            let flags = RunConfig {
                subjects,
                trials_per_class: trials,
                rate_hz: rate,
                noise_sigma: noise,
                rotation_deg: rotation,
                gain: gain.map(|t| t.0),
                offset_g: offset.map(|t| t.0),
                rate_override_hz: rate_override,
                confuser_fraction: confusers,
                ..RunConfig::default()
            };
            let cfg = common.run_config()?.overlay(flags);
            cmd_synth(&cfg)
        }
        Command::Adapt {
            common,
            mapping,
            dataset,
            position,
        } => cmd_adapt(&common.run_config()?, &mapping, &dataset, &position),
        Command::Preprocess { common } => cmd_preprocess(&common.run_config()?),
        Command::Train { common } => cmd_train(&common.run_config()?),
        Command::Grid { common } => cmd_grid(&common.run_config()?),
        Command::Evalpairs { common } => cmd_evalpairs(&common.run_config()?),
        Command::Report { common } => cmd_report(&common.run_config()?),
        Command::ExportFeatures { common, model } => {
            cmd_export_features(&common.run_config()?, &model)
        }
        Command::Gradcheck { common, eps } => cmd_gradcheck(&common.run_config()?, eps),
        Command::Pairs { common } => cmd_pairs(&common.run_config()?),
    }
}

fn require<'a, T>(value: &'a Option<T>, what: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| DafdError::InvalidArgument(format!("--{what} is required")))
}

fn out_dir(cfg: &RunConfig) -> Result<&PathBuf> {
    let out = require(&cfg.out, "out")?;
    std::fs::create_dir_all(out).map_err(|e| DafdError::io(out, e))?;
    Ok(out)
}

fn synth_spec(cfg: &RunConfig) -> Result<SynthSpec> {
    Ok(SynthSpec {
        n_subjects: cfg.subjects.unwrap_or(8),
        trials_per_class_per_subject: cfg.trials_per_class.unwrap_or(4),
        rate_hz: cfg.rate_hz.unwrap_or(18.4),
        domain_shift: DomainShift {
            rotation_rad: cfg.rotation_deg.unwrap_or(25.0) * PI / 180.0,
            gain: cfg.gain.unwrap_or([0.9, 1.1, 1.0]),
            offset_g: cfg.offset_g.unwrap_or([0.0, 0.0, 0.0]),
            rate_override_hz: cfg.rate_override_hz,
        },
        noise_sigma: cfg.noise_sigma.unwrap_or(0.03),
        seed: cfg.seed(),
        confuser_fraction: cfg.confuser_fraction.unwrap_or(0.5),
    })
}

fn cmd_synth(cfg: &RunConfig) -> Result<()> {
    let out = out_dir(cfg)?;
    let spec = synth_spec(cfg)?;
    let pair = synth_domain_pair(&spec)?;
    let mut trials = pair.source;
    trials.extend(pair.target);
    let falls = trials
        .iter()
        .filter(|t| t.label == crate::ingest::Class::Fall)
        .count();
    let manifest = write_canonical(&trials, out)?;
    println!("trials={} falls={}", trials.len(), falls);
    println!("manifest={}", manifest.display());
    let mut effective = cfg.clone();
    effective.subjects = Some(spec.n_subjects);
    effective.trials_per_class = Some(spec.trials_per_class_per_subject);
    effective.rate_hz = Some(spec.rate_hz);
    effective.noise_sigma = Some(spec.noise_sigma);
    effective.rotation_deg = Some(spec.domain_shift.rotation_rad * 180.0 / PI);
    effective.gain = Some(spec.domain_shift.gain);
    effective.offset_g = Some(spec.domain_shift.offset_g);
    effective.rate_override_hz = spec.domain_shift.rate_override_hz;
    effective.confuser_fraction = Some(spec.confuser_fraction);
    write_provenance("synth", &effective, out, true)
}

fn cmd_adapt(cfg: &RunConfig, mapping_path: &Path, dataset: &str, position: &str) -> Result<()> {
    let raw_dir = require(&cfg.data, "data")?;
    let out = out_dir(cfg)?;
    let mapping = ColumnMapping::from_toml_file(mapping_path)?;
    let position = Position::from_str(position).map_err(DafdError::InvalidArgument)?;
    let trials = adapt_dataset(raw_dir, &mapping, dataset, position)?;
    let manifest = write_canonical(&trials, out)?;
    println!("trials={}", trials.len());
    println!("manifest={}", manifest.display());
    write_provenance("adapt", cfg, out, true)
}

fn manifest_path(data: &Path) -> PathBuf {
    if data.is_dir() {
        data.join("manifest.csv")
    } else {
        data.to_path_buf()
    }
}

fn load_pair_trials(
    data: &Path,
    pair: &PairSpec,
) -> Result<(Vec<TrialRecord>, Vec<TrialRecord>)> {
    let trials = load_canonical(&manifest_path(data))?;
    let select = |side: &crate::eval::PairSide| -> Vec<TrialRecord> {
        trials
            .iter()
            .filter(|t| t.dataset_id == side.dataset && t.position == side.position)
            .cloned()
            .collect()
    };
    let source = select(&pair.source);
    let target = select(&pair.target);
    if source.is_empty() || target.is_empty() {
        return Err(DafdError::InvalidArgument(format!(
            "pair {pair}: no trials for {} ({} found) or {} ({} found)",
            pair.source,
            source.len(),
            pair.target,
            target.len()
        )));
    }
    Ok((source, target))
}

/// Preprocesses both sides of a pair at the canonical 18.4 Hz window config,
/// printing exclusions as key=value records.
fn preprocess_pair(source: &[TrialRecord], target: &[TrialRecord]) -> PairData {
    let wc = WindowConfig::default();
    let (source_segments, excluded_src) = preprocess_all(source, wc.rate_hz, &wc, DomainTag::Source);
    let (target_segments, excluded_tgt) = preprocess_all(target, wc.rate_hz, &wc, DomainTag::Target);
    for e in excluded_src.iter().chain(&excluded_tgt) {
        println!("excluded={} reason=\"{}\"", e.trial_id, e.reason);
    }
    PairData {
        source: source_segments,
        target: target_segments,
    }
}

fn pair_from(cfg: &RunConfig) -> Result<PairSpec> {
    require(&cfg.pair, "pair")?
        .parse()
        .map_err(DafdError::InvalidArgument)
}

fn cmd_preprocess(cfg: &RunConfig) -> Result<()> {
    let data = require(&cfg.data, "data")?;
    let out = out_dir(cfg)?;
    let pair = pair_from(cfg)?;
    let (source, target) = load_pair_trials(data, &pair)?;
    let pair_data = preprocess_pair(&source, &target);
    let mut segments = pair_data.source;
    segments.extend(pair_data.target);
    let dump = out.join("segments.csv");
    write_segment_dump(&segments, &dump)?;
    println!("segments={}", segments.len());
    println!("dump={}", dump.display());
    write_provenance("preprocess", cfg, out, true)
}

/// Builds the mode's training pools from fully labeled source/target segments.
fn mode_pools(
    mode: TrainMode,
    data: &PairData,
) -> Result<(Option<SegmentPool>, Option<SegmentPool>)> {
    let source = || SegmentPool::labeled(data.source.clone(), DomainTag::Source);
    Ok(match mode {
        TrainMode::SourceOnly => (Some(source()?), None),
        TrainMode::Dafd => (
            Some(source()?),
            Some(SegmentPool::unlabeled(data.target.clone(), DomainTag::Target)?),
        ),
        TrainMode::DafdAdl => (
            Some(source()?),
            Some(SegmentPool::adl_only(data.target.clone(), DomainTag::Target)?),
        ),
        TrainMode::TargetOnly => (
            None,
            Some(SegmentPool::labeled(data.target.clone(), DomainTag::Target)?),
        ),
    })
}

fn mode_from(cfg: &RunConfig) -> Result<TrainMode> {
    require(&cfg.mode, "mode")?
        .parse()
        .map_err(DafdError::InvalidArgument)
}

fn write_history_csv(history: &crate::dann::TrainHistory, path: &Path) -> Result<()> {
    let mut out =
        String::from("epoch,train_fall,train_domain,train_total,val_fall,val_domain,val_total\n");
    for e in &history.epochs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.epoch,
            e.train.loss_fall,
            e.train.loss_domain,
            e.train.loss_total,
            e.val.loss_fall,
            e.val.loss_domain,
            e.val.loss_total
        ));
    }
    std::fs::write(path, out).map_err(|e| DafdError::io(path, e))
}

fn cmd_train(cfg: &RunConfig) -> Result<()> {
    let data = require(&cfg.data, "data")?;
    let out = out_dir(cfg)?;
    let pair = pair_from(cfg)?;
    let mode = mode_from(cfg)?;
    let hp = cfg.hyperparams()?;
    let train_cfg = cfg.train_config(mode)?;
    let (source, target) = load_pair_trials(data, &pair)?;
    let pair_data = preprocess_pair(&source, &target);
    let (source_pool, target_pool) = mode_pools(mode, &pair_data)?;
    let result = fit(source_pool.as_ref(), target_pool.as_ref(), &hp, &train_cfg)?;
    for e in &result.history.epochs {
        println!(
            "epoch={} train_fall={:.6} train_domain={:.6} val_fall={:.6} val_domain={:.6} val_total={:.6}",
            e.epoch, e.train.loss_fall, e.train.loss_domain,
            e.val.loss_fall, e.val.loss_domain, e.val.loss_total
        );
    }
    println!(
        "best_epoch={} stopped_epoch={}",
        result.history.best_epoch, result.history.stopped_epoch
    );
    let ckpt = Checkpoint {
        params: result.params,
        opt: result.opt,
        dropout: hp.dropout,
        lr: hp.lr,
        lambda: hp.lambda,
    };
    let ckpt_path = out.join("model.ckpt");
    save_checkpoint(&ckpt, &ckpt_path)?;
    write_history_csv(&result.history, &out.join("history.csv"))?;
    println!("checkpoint={}", ckpt_path.display());
    println!("weight_decay={WEIGHT_DECAY}");
    write_provenance("train", cfg, out, true)
}

fn cmd_grid(cfg: &RunConfig) -> Result<()> {
    let data = require(&cfg.data, "data")?;
    let out = out_dir(cfg)?;
    let pair = pair_from(cfg)?;
    let mode = cfg
        .mode
        .as_deref()
        .map(TrainMode::from_str)
        .transpose()
        .map_err(DafdError::InvalidArgument)?
        .unwrap_or(TrainMode::Dafd);
    let train_cfg = cfg.train_config(mode)?;
    let (source, target) = load_pair_trials(data, &pair)?;
    let pair_data = preprocess_pair(&source, &target);
    let (source_pool, target_pool) = mode_pools(mode, &pair_data)?;
    let (best, entries) = grid_search(
        source_pool.as_ref(),
        target_pool.as_ref(),
        &train_cfg,
        cfg.jobs(),
    )?;
    let mut csv = String::from("index,dropout,lr,lambda,best_val_loss,best_epoch,stopped_epoch\n");
    for (i, e) in entries.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i, e.hp.dropout, e.hp.lr, e.hp.lambda, e.best_val_loss, e.best_epoch, e.stopped_epoch
        ));
    }
    let grid_path = out.join("grid.csv");
    std::fs::write(&grid_path, csv).map_err(|e| DafdError::io(&grid_path, e))?;
    println!("tuples={}", entries.len());
    println!(
        "best_dropout={} best_lr={} best_lambda={}",
        best.dropout, best.lr, best.lambda
    );
    println!("grid={}", grid_path.display());
    write_provenance("grid", cfg, out, true)
}

fn cmd_evalpairs(cfg: &RunConfig) -> Result<()> {
    let data = require(&cfg.data, "data")?;
    let out = out_dir(cfg)?;
    let hp = cfg.hyperparams()?;
    let modes: Vec<TrainMode> = match &cfg.mode {
        Some(m) => vec![m.parse().map_err(DafdError::InvalidArgument)?],
        None => TrainMode::ALL.to_vec(),
    };
    let pairs: Vec<PairSpec> = match &cfg.pair {
        Some(p) => vec![p.parse().map_err(DafdError::InvalidArgument)?],
        None => {
            let scenario: Scenario = require(&cfg.scenario, "scenario")?
                .parse()
                .map_err(DafdError::InvalidArgument)?;
            enumerate_pairs(scenario, None)?
        }
    };
    let mut all_results: Vec<PairResult> = Vec::new();
    for (idx, pair) in pairs.iter().enumerate() {
        let (source, target) = load_pair_trials(data, pair)?;
        let pair_data = preprocess_pair(&source, &target);
        let mut train_cfg = cfg.train_config(TrainMode::Dafd)?;
        train_cfg.seed = derive_seed(cfg.seed(), 0xE7A1 + idx as u64);
        let results = run_pair(pair, &pair_data, &modes, &train_cfg, &hp, cfg.jobs())?;
        for r in &results {
            println!(
                "pair={} mode={} mean_f1={:.4} mean_sen={:.4} mean_spe={:.4} mean_pre={:.4}",
                r.pair, r.mode, r.mean.f1.value, r.mean.sen.value, r.mean.spe.value,
                r.mean.pre.value
            );
        }
        all_results.extend(results);
    }
    let results_path = out.join("results.csv");
    write_results_csv(&all_results, &results_path)?;
    println!("results={}", results_path.display());
    write_provenance("evalpairs", cfg, out, true)
}

fn cmd_report(cfg: &RunConfig) -> Result<()> {
    let input = require(&cfg.data, "data")?;
    let out = out_dir(cfg)?;
    let results_file = if input.is_dir() {
        input.join("results.csv")
    } else {
        input.clone()
    };
    let results = read_results_csv(&results_file)?;
    let report = build_report(&results)?;
    let text_path = out.join("report.txt");
    let csv_path = out.join("report.csv");
    std::fs::write(&text_path, &report.text).map_err(|e| DafdError::io(&text_path, e))?;
    std::fs::write(&csv_path, &report.csv).map_err(|e| DafdError::io(&csv_path, e))?;
    print!("{}", report.text);
    write_provenance("report", cfg, out, true)
}

fn cmd_export_features(cfg: &RunConfig, model: &Path) -> Result<()> {
    let data = require(&cfg.data, "data")?;
    let out = require(&cfg.out, "out")?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| DafdError::io(parent, e))?;
        }
    }
    let pair = pair_from(cfg)?;
    let checkpoint = load_checkpoint(model)?;
    let (source, target) = load_pair_trials(data, &pair)?;
    let pair_data = preprocess_pair(&source, &target);
    let mut segments = pair_data.source;
    segments.extend(pair_data.target);
    let rows = export_features(&checkpoint.params, &segments, out)?;
    println!("rows={rows}");
    println!("features={}", out.display());
    write_provenance("export-features", cfg, out, false)
}

fn cmd_gradcheck(cfg: &RunConfig, eps: f64) -> Result<()> {
    let seed = cfg.seed();
    let params = ModelParams::init(derive_seed(seed, 1));
    let mut rng = stream(seed, 2);
    let mut batch = Tensor::zeros(&[4, INPUT_CHANNELS, INPUT_LEN]);
    for v in batch.data_mut() {
        *v = rand::Rng::gen_range(&mut rng, 0.0..1.0);
    }
    let lambdas = match cfg.lambda {
        Some(l) => vec![l],
        None => crate::dann::GRID_LAMBDA.to_vec(),
    };
    let mut worst: f64 = 0.0;
    for lambda in lambdas {
        let report = grad_check(&params, &batch, lambda, eps)?;
        println!(
            "lambda={lambda} max_rel_err={:.3e} worst={} checked={} skipped={}",
            report.max_rel_err, report.worst_param, report.checked, report.skipped
        );
        worst = worst.max(report.max_rel_err);
    }
    println!("max_rel_err={worst:.3e} tolerance={GRADCHECK_TOLERANCE:.0e}");
    if worst < GRADCHECK_TOLERANCE {
        Ok(())
    } else {
        Err(DafdError::Train(format!(
            "gradient check failed: {worst:.3e} >= {GRADCHECK_TOLERANCE:.0e}"
        )))
    }
}

fn cmd_pairs(cfg: &RunConfig) -> Result<()> {
    let scenario: Scenario = require(&cfg.scenario, "scenario")?
        .parse()
        .map_err(DafdError::InvalidArgument)?;
    let pairs = enumerate_pairs(scenario, None)?;
    for p in &pairs {
        println!("{p}");
    }
    println!("pairs={}", pairs.len());
    Ok(())
}
