//! The cross-domain experiment runner: 5-fold leave-subjects-out evaluation
//! of each requested training mode on one source->target pair.

use std::collections::BTreeSet;
use std::path::Path;

use super::folds::{lsocv_folds, FoldPlan, FOLD_COUNT};
use super::metrics::{confusion, metrics, ConfusionCounts, Metric, MetricSet};
use super::pairs::{PairSpec, Scenario};
use crate::dann::{fit, predict, Hyperparams, SegmentPool, TrainConfig, TrainMode};
use crate::error::{DafdError, Result};
use crate::ingest::Class;
use crate::jobs::run_indexed_jobs;
use crate::rng::derive_seed;
use crate::signal::{DomainTag, Segment};

/// Preprocessed segments for one pair, labels intact on both sides (the
/// runner masks target labels per mode before training).
#[derive(Debug, Clone)]
pub struct PairData {
    pub source: Vec<Segment>,
    pub target: Vec<Segment>,
}

#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub fold: usize,
    pub confusion: ConfusionCounts,
    pub metrics: MetricSet,
}

#[derive(Debug, Clone)]
pub struct PairResult {
    pub pair: PairSpec,
    pub mode: TrainMode,
    pub folds: Vec<FoldOutcome>,
    pub mean: MetricSet,
}

impl PairResult {
    /// Per-fold values of one metric (for significance testing).
    pub fn fold_values(&self, pick: impl Fn(&MetricSet) -> Metric) -> Vec<f64> {
        self.folds.iter().map(|f| pick(&f.metrics).value).collect()
    }
}

/// Unweighted mean per metric over folds; the flag is set when any
/// contributing fold was degenerate.
fn mean_metrics(folds: &[FoldOutcome]) -> MetricSet {
    let combine = |pick: fn(&MetricSet) -> Metric| -> Metric {
        let n = folds.len().max(1) as f64;
        Metric {
            value: folds.iter().map(|f| pick(&f.metrics).value).sum::<f64>() / n,
            degenerate: folds.iter().any(|f| pick(&f.metrics).degenerate),
        }
    };
    MetricSet {
        sen: combine(|m| m.sen),
        spe: combine(|m| m.spe),
        pre: combine(|m| m.pre),
        f1: combine(|m| m.f1),
    }
}

fn subjects_of(segments: &[Segment]) -> Vec<String> {
    let set: BTreeSet<&str> = segments.iter().map(|s| s.subject_id.as_str()).collect();
    set.into_iter().map(String::from).collect()
}

fn fold_plans(data: &PairData, seed: u64) -> Result<(FoldPlan, FoldPlan)> {
    let src_subjects = subjects_of(&data.source);
    let tgt_subjects = subjects_of(&data.target);
    let src_plan = lsocv_folds(&src_subjects, derive_seed(seed, 0xA11))?;
    // shared subject sets (cross-position within one dataset) reuse one plan
    // so a test subject is held out of training in both pools at once
    let tgt_plan = if src_subjects == tgt_subjects {
        src_plan.clone()
    } else {
        lsocv_folds(&tgt_subjects, derive_seed(seed, 0xA12))?
    };
    Ok((src_plan, tgt_plan))
}

fn run_fold(
    data: &PairData,
    mode: TrainMode,
    fold: usize,
    src_plan: &FoldPlan,
    tgt_plan: &FoldPlan,
    cfg: &TrainConfig,
    hp: &Hyperparams,
) -> Result<FoldOutcome> {
    let src_test: BTreeSet<String> = src_plan.test_subjects(fold).iter().cloned().collect();
    let tgt_test: BTreeSet<String> = tgt_plan.test_subjects(fold).iter().cloned().collect();
    let src_train_segments: Vec<Segment> = data
        .source
        .iter()
        .filter(|s| !src_test.contains(&s.subject_id))
        .cloned()
        .collect();
    let tgt_train_segments: Vec<Segment> = data
        .target
        .iter()
        .filter(|s| !tgt_test.contains(&s.subject_id))
        .cloned()
        .collect();

    let source_pool = SegmentPool::labeled(src_train_segments, DomainTag::Source)?;
    let target_pool = match mode {
        TrainMode::SourceOnly => None,
        TrainMode::Dafd => Some(SegmentPool::unlabeled(tgt_train_segments, DomainTag::Target)?),
        TrainMode::DafdAdl => Some(SegmentPool::adl_only(tgt_train_segments, DomainTag::Target)?),
        TrainMode::TargetOnly => Some(SegmentPool::labeled(tgt_train_segments, DomainTag::Target)?),
    };

    let fold_cfg = TrainConfig {
        mode,
        seed: derive_seed(cfg.seed, 0xF1D0 + fold as u64 * 8 + mode_ordinal(mode)),
        ..cfg.clone()
    };
    let fitted = fit(
        if mode == TrainMode::TargetOnly {
            None
        } else {
            Some(&source_pool)
        },
        target_pool.as_ref(),
        hp,
        &fold_cfg,
    )?;

    let test_segments: Vec<&Segment> = data
        .target
        .iter()
        .filter(|s| tgt_test.contains(&s.subject_id))
        .collect();
    if test_segments.is_empty() {
        return Err(DafdError::Train(format!(
            "fold {fold}: no target test segments"
        )));
    }
    let labels: Vec<Class> = test_segments
        .iter()
        .map(|s| {
            s.label.ok_or_else(|| {
                DafdError::Train(format!("test segment {} has no label", s.trial_id))
            })
        })
        .collect::<Result<_>>()?;
    let predictions = predict(&fitted.params, &test_segments)?;
    let counts = confusion(&predictions, &labels)?;
    Ok(FoldOutcome {
        fold,
        confusion: counts,
        metrics: metrics(&counts),
    })
}

fn mode_ordinal(mode: TrainMode) -> u64 {
    TrainMode::ALL
        .iter()
        .position(|m| *m == mode)
        .expect("mode in ALL") as u64
}

/// Evaluates each requested mode over the 5-fold plan on one pair.
/// `jobs` bounds the parallel (mode, fold) workers.
pub fn run_pair(
    pair: &PairSpec,
    data: &PairData,
    modes: &[TrainMode],
    cfg: &TrainConfig,
    hp: &Hyperparams,
    jobs: usize,
) -> Result<Vec<PairResult>> {
    if data.source.is_empty() || data.target.is_empty() {
        return Err(DafdError::Train(format!(
            "pair {pair}: empty source or target pool after preprocessing"
        )));
    }
    let (src_plan, tgt_plan) = fold_plans(data, cfg.seed)?;
    let tasks: Vec<(usize, TrainMode, usize)> = modes
        .iter()
        .enumerate()
        .flat_map(|(mi, &mode)| (0..FOLD_COUNT).map(move |fold| (mi, mode, fold)))
        .collect();
    let outcomes = run_indexed_jobs(tasks.len(), jobs, |i| {
        let (_, mode, fold) = tasks[i];
        run_fold(data, mode, fold, &src_plan, &tgt_plan, cfg, hp)
    })?;

    let mut results = Vec::with_capacity(modes.len());
    for (mi, &mode) in modes.iter().enumerate() {
        let folds: Vec<FoldOutcome> = outcomes
            .iter()
            .zip(&tasks)
            .filter(|(_, (tmi, _, _))| *tmi == mi)
            .map(|(o, _)| o.clone())
            .collect();
        let mean = mean_metrics(&folds);
        results.push(PairResult {
            pair: pair.clone(),
            mode,
            folds,
            mean,
        });
    }
    Ok(results)
}

const RESULTS_HEADER: &str = "scenario,source_dataset,source_position,target_dataset,\
target_position,mode,fold,tp,tn,fp,fn,sen,spe,pre,f1,sen_deg,spe_deg,pre_deg,f1_deg";

/// Writes one row per (pair, mode, fold) with confusion counts and metrics.
pub fn write_results_csv(results: &[PairResult], path: &Path) -> Result<()> {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in results {
        for f in &r.folds {
            let m = &f.metrics;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.pair.scenario,
                r.pair.source.dataset,
                r.pair.source.position,
                r.pair.target.dataset,
                r.pair.target.position,
                r.mode,
                f.fold,
                f.confusion.true_pos,
                f.confusion.true_neg,
                f.confusion.false_pos,
                f.confusion.false_neg,
                m.sen.value,
                m.spe.value,
                m.pre.value,
                m.f1.value,
                m.sen.degenerate as u8,
                m.spe.degenerate as u8,
                m.pre.degenerate as u8,
                m.f1.degenerate as u8,
            ));
        }
    }
    std::fs::write(path, out).map_err(|e| DafdError::io(path, e))
}

/// Reads a results CSV back into `PairResult`s (fold rows regrouped by pair
/// and mode, means recomputed).
pub fn read_results_csv(path: &Path) -> Result<Vec<PairResult>> {
    let text = std::fs::read_to_string(path).map_err(|e| DafdError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == RESULTS_HEADER => {}
        _ => return Err(DafdError::parse(path, 1, "bad results header")),
    }
    let mut grouped: Vec<((PairSpec, TrainMode), Vec<FoldOutcome>)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 19 {
            return Err(DafdError::parse(
                path,
                line_no,
                format!("expected 19 columns, got {}", f.len()),
            ));
        }
        let perr = |m: String| DafdError::parse(path, line_no, m);
        let scenario: Scenario = f[0].parse().map_err(perr)?;
        let pair = PairSpec {
            scenario,
            source: format!("{}/{}", f[1], f[2]).parse().map_err(perr)?,
            target: format!("{}/{}", f[3], f[4]).parse().map_err(perr)?,
        };
        let mode: TrainMode = f[5].parse().map_err(perr)?;
        let parse_u64 = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| DafdError::parse(path, line_no, format!("bad count {s:?}")))
        };
        let parse_f64 = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| DafdError::parse(path, line_no, format!("bad value {s:?}")))
        };
        let metric = |v: &str, d: &str| -> Result<Metric> {
            Ok(Metric {
                value: parse_f64(v)?,
                degenerate: d == "1",
            })
        };
        let outcome = FoldOutcome {
            fold: parse_u64(f[6])? as usize,
            confusion: ConfusionCounts {
                true_pos: parse_u64(f[7])?,
                true_neg: parse_u64(f[8])?,
                false_pos: parse_u64(f[9])?,
                false_neg: parse_u64(f[10])?,
            },
            metrics: MetricSet {
                sen: metric(f[11], f[15])?,
                spe: metric(f[12], f[16])?,
                pre: metric(f[13], f[17])?,
                f1: metric(f[14], f[18])?,
            },
        };
        let key = (pair, mode);
        match grouped.iter_mut().find(|(k, _)| *k == key) {
            Some((_, folds)) => folds.push(outcome),
            None => grouped.push((key, vec![outcome])),
        }
    }
    Ok(grouped
        .into_iter()
        .map(|((pair, mode), folds)| {
            let mean = mean_metrics(&folds);
            PairResult {
                pair,
                mode,
                folds,
                mean,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{synth_domain_pair, SynthSpec};
    use crate::signal::{preprocess_all, WindowConfig};

    fn pair_data(seed: u64, subjects: usize) -> PairData {
        let spec = SynthSpec {
            n_subjects: subjects,
            trials_per_class_per_subject: 3,
            seed,
            confuser_fraction: 0.5,
            ..SynthSpec::default()
        };
        let pair = synth_domain_pair(&spec).unwrap();
        let cfg = WindowConfig::default();
        let (source, _) = preprocess_all(&pair.source, 18.4, &cfg, DomainTag::Source);
        let (target, _) = preprocess_all(&pair.target, 18.4, &cfg, DomainTag::Target);
        PairData { source, target }
    }

    fn synth_pair() -> PairSpec {
        "synth/WA:synth/RP".parse().unwrap()
    }

    #[test]
    fn run_pair_produces_all_modes_and_folds() {
        let data = pair_data(31, 6);
        let cfg = TrainConfig {
            max_epochs: 2,
            patience: 2,
            seed: 9,
            ..TrainConfig::default()
        };
        let results = run_pair(
            &synth_pair(),
            &data,
            &TrainMode::ALL,
            &cfg,
            &Hyperparams::default(),
            2,
        )
        .unwrap();
        assert_eq!(results.len(), 4);
        for r in &results {
            assert_eq!(r.folds.len(), FOLD_COUNT);
            for (i, f) in r.folds.iter().enumerate() {
                assert_eq!(f.fold, i);
                assert!(f.confusion.total() > 0);
            }
        }
    }

    #[test]
    fn results_csv_round_trips() {
        let data = pair_data(33, 6);
        let cfg = TrainConfig {
            max_epochs: 1,
            seed: 2,
            ..TrainConfig::default()
        };
        let results = run_pair(
            &synth_pair(),
            &data,
            &[TrainMode::SourceOnly, TrainMode::Dafd],
            &cfg,
            &Hyperparams::default(),
            2,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_results_csv(&results, &path).unwrap();
        let loaded = read_results_csv(&path).unwrap();
        assert_eq!(loaded.len(), results.len());
        for (a, b) in results.iter().zip(&loaded) {
            assert_eq!(a.pair, b.pair);
            assert_eq!(a.mode, b.mode);
            assert_eq!(a.folds.len(), b.folds.len());
            for (fa, fb) in a.folds.iter().zip(&b.folds) {
                assert_eq!(fa.confusion, fb.confusion);
                assert_eq!(fa.metrics.f1.value, fb.metrics.f1.value);
            }
        }
    }
}
