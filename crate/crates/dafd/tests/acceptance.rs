//! Acceptance suite: one test per criterion, each printing one pass line
//! (run with `cargo test -p dafd --test acceptance -- --nocapture` to see
//! them).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use rand::Rng;

use dafd::dann::{
    grid_tuples, make_epoch_batches, SegmentPool, TrainConfig, TrainMode, GRID_DROPOUT,
    GRID_LAMBDA, GRID_LR,
};
use dafd::eval::benchmark::run_benchmark;
use dafd::eval::{confusion, enumerate_pairs, metrics, ConfusionCounts, Scenario};
use dafd::ingest::Class;
use dafd::jobs::run_indexed_jobs;
use dafd::nn::{
    backward_pass, forward_pass, grad_check, grl_backward, grl_forward, LossWeights, Mode,
    ModelParams, ParamGroup, Tensor, FEATURE_DIM, INPUT_CHANNELS, INPUT_LEN, NUM_CLASSES,
};
use dafd::rng::{derive_seed, stream};
use dafd::signal::{minmax_normalize, DomainTag, ResampleFactor, Segment, WindowConfig};

fn unit_batch(b: usize, seed: u64) -> Tensor {
    let mut rng = stream(seed, 0xba7);
    let mut t = Tensor::zeros(&[b, INPUT_CHANNELS, INPUT_LEN]);
    for v in t.data_mut() {
        *v = rng.gen_range(0.0..1.0);
    }
    t
}

fn segment(subject: &str, label: Class, domain: DomainTag, mark: f64) -> Segment {
    Segment {
        values: (0..66)
            .map(|t| {
                let v = ((t as f64) * 0.21 + mark).sin() * 0.5 + 0.5;
                [v, 1.0 - v, (v * 2.0).fract()]
            })
            .collect(),
        label: Some(label),
        domain,
        subject_id: subject.into(),
        trial_id: format!("{subject}-{label}-{mark}"),
        impact_index: 37,
    }
}

/// Criterion 1: analytic gradients match central finite differences
/// (eps = 1e-5) within 1e-4 over 10 seeds and the three grid lambdas,
/// in under 60 seconds.
#[test]
fn criterion_1_gradient_fidelity() {
    let start = Instant::now();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    // each of the three grid lambdas is exercised by at least three seeds
    let reports = run_indexed_jobs(10, jobs, |seed| {
        let params = ModelParams::init(derive_seed(seed as u64, 0xACC1));
        let batch = unit_batch(4, seed as u64);
        let lambda = GRID_LAMBDA[seed % GRID_LAMBDA.len()];
        let report = grad_check(&params, &batch, lambda, 1e-5)?;
        Ok(report.max_rel_err)
    })
    .expect("grad checks run");
    let max_err = reports.iter().cloned().fold(0.0, f64::max);
    assert!(
        max_err < 1e-4,
        "max relative error {max_err:.3e} over 10 seeds x 3 lambdas"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "gradient fidelity took {elapsed:?}, budget 60 s"
    );
    println!(
        "criterion 1 (gradient fidelity): PASS  max_rel_err={max_err:.3e} elapsed={elapsed:.1?}"
    );
}

/// Criterion 2: temporal lengths 68/34/36/18/20/10, 40-dim features,
/// 2-dim head outputs. Exact.
#[test]
fn criterion_2_architecture_conformance() {
    let params = ModelParams::init(2);
    let batch = unit_batch(2, 9);
    let out = forward_pass(&params, &batch, 1.0, 0.0, Mode::Eval, None).unwrap();
    let conv_lengths: Vec<usize> = out.cache.layers.iter().map(|l| l.conv_out.shape()[2]).collect();
    let pool_lengths: Vec<usize> = out.cache.layers.iter().map(|l| l.pool_out.shape()[2]).collect();
    assert_eq!(conv_lengths, vec![68, 36, 20]);
    assert_eq!(pool_lengths, vec![34, 18, 10]);
    assert_eq!(out.features.shape(), &[2, FEATURE_DIM]);
    assert_eq!(FEATURE_DIM, 40);
    assert_eq!(out.fall_logits.shape(), &[2, NUM_CLASSES]);
    assert_eq!(out.domain_logits.shape(), &[2, NUM_CLASSES]);
    assert_eq!(NUM_CLASSES, 2);
    println!("criterion 2 (architecture conformance): PASS  66->68/34/36/18/20/10, features 40, heads 2");
}

/// Criterion 3: reversal layer is a bitwise identity forward and an exact
/// -lambda scaling backward; lambda = 0 blocks the domain loss from the
/// extractor entirely.
#[test]
fn criterion_3_grl_contract() {
    let mut rng = stream(3, 3);
    let values: Vec<f64> = (0..64).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let x = Tensor::from_vec(&[64], values.clone()).unwrap();
    let fwd = grl_forward(&x);
    for (a, b) in x.data().iter().zip(fwd.data()) {
        assert_eq!(a.to_bits(), b.to_bits(), "forward not bitwise identity");
    }
    for lambda in [0.0, 0.31, 1.0, 1.3] {
        let back = grl_backward(&x, lambda);
        for (g, out) in values.iter().zip(back.data()) {
            let expect = -lambda * g;
            assert_eq!(out.to_bits(), expect.to_bits(), "backward not exact -lambda*g");
        }
    }
    assert!(grl_backward(&x, 0.0).data().iter().all(|&v| v == 0.0));

    // lambda = 0: the domain loss contributes exactly zero extractor gradient
    let params = ModelParams::init(31);
    let batch = unit_batch(4, 31);
    let out = forward_pass(&params, &batch, 0.0, 0.0, Mode::Train, None).unwrap();
    let domain_targets = vec![Some(0), Some(0), Some(1), Some(1)];
    let (grads, _) = backward_pass(
        &params,
        &out.cache,
        &[None, None, None, None],
        &domain_targets,
        LossWeights { fall: 0.0, domain: 1.0 },
    )
    .unwrap();
    for t in grads.group(ParamGroup::Extractor) {
        assert!(t.data().iter().all(|&v| v == 0.0));
    }
    println!("criterion 3 (GRL contract): PASS  forward bitwise, backward exact -lambda*g");
}

/// Criterion 4: the 27-tuple grid, the Table-IV pair matrix (20 + 12 + 8),
/// 4+4 batch composition, and zero target falls in dafd_adl batches.
#[test]
fn criterion_4_protocol_conformance() {
    // grid
    let tuples = grid_tuples();
    assert_eq!(tuples.len(), 27);
    let expected: BTreeSet<String> = GRID_DROPOUT
        .iter()
        .flat_map(|d| {
            GRID_LR.iter().flat_map(move |lr| {
                GRID_LAMBDA.iter().map(move |l| format!("{d}/{lr}/{l}"))
            })
        })
        .collect();
    let got: BTreeSet<String> = tuples
        .iter()
        .map(|hp| format!("{}/{}/{}", hp.dropout, hp.lr, hp.lambda))
        .collect();
    assert_eq!(got, expected);
    assert_eq!(GRID_DROPOUT, [0.1, 0.2, 0.5]);
    assert_eq!(GRID_LR, [0.001, 0.0005, 0.0001]);
    assert_eq!(GRID_LAMBDA, [0.31, 1.0, 1.3]);

    // pair matrix
    let upfall = enumerate_pairs(Scenario::CrossPosition, Some("upfall")).unwrap();
    let umafall = enumerate_pairs(Scenario::CrossPosition, Some("umafall")).unwrap();
    let config = enumerate_pairs(Scenario::CrossConfig, None).unwrap();
    assert_eq!(upfall.len(), 20);
    assert_eq!(umafall.len(), 12);
    assert_eq!(config.len(), 8);
    let up_set: BTreeSet<String> = upfall.iter().map(|p| p.to_string()).collect();
    let mut expected_up = BTreeSet::new();
    for src in ["N", "WA", "RP", "WR", "A"] {
        for tgt in ["N", "WA", "RP", "WR", "A"] {
            if src != tgt {
                expected_up.insert(format!("upfall/{src}:upfall/{tgt}"));
            }
        }
    }
    assert_eq!(up_set, expected_up);
    let uma_set: BTreeSet<String> = umafall.iter().map(|p| p.to_string()).collect();
    let mut expected_uma = BTreeSet::new();
    for src in ["C", "WA", "WR", "A"] {
        for tgt in ["C", "WA", "WR", "A"] {
            if src != tgt {
                expected_uma.insert(format!("umafall/{src}:umafall/{tgt}"));
            }
        }
    }
    assert_eq!(uma_set, expected_uma);
    let config_set: BTreeSet<String> = config.iter().map(|p| p.to_string()).collect();
    let expected_config: BTreeSet<String> = [
        "upfall/WA:umafall/WA",
        "upfall/RP:umafall/LP",
        "upfall/WR:umafall/WR",
        "upfall/A:umafall/A",
        "umafall/WA:upfall/WA",
        "umafall/LP:upfall/RP",
        "umafall/WR:upfall/WR",
        "umafall/A:upfall/A",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(config_set, expected_config);

    // batch composition 4 + 4 and dafd_adl exclusion of target falls
    let source_segments: Vec<Segment> = (0..12)
        .map(|i| {
            segment(
                &format!("S{:02}", i % 3 + 1),
                if i % 2 == 0 { Class::Adl } else { Class::Fall },
                DomainTag::Source,
                i as f64,
            )
        })
        .collect();
    let target_segments: Vec<Segment> = (0..12)
        .map(|i| {
            segment(
                &format!("S{:02}", i % 3 + 1),
                if i % 2 == 0 { Class::Adl } else { Class::Fall },
                DomainTag::Target,
                100.0 + i as f64,
            )
        })
        .collect();
    let target_fall_ids: BTreeSet<String> = target_segments
        .iter()
        .filter(|s| s.label == Some(Class::Fall))
        .map(|s| s.trial_id.clone())
        .collect();
    let source = SegmentPool::labeled(source_segments, DomainTag::Source).unwrap();
    let adl_target = SegmentPool::adl_only(target_segments, DomainTag::Target).unwrap();
    let cfg = TrainConfig {
        mode: TrainMode::DafdAdl,
        ..TrainConfig::default()
    };
    let mut rng = stream(4, 4);
    for _ in 0..25 {
        let batches = make_epoch_batches(Some(&source), Some(&adl_target), &cfg, &mut rng).unwrap();
        for batch in &batches {
            assert_eq!(batch.items.len(), 8, "batch must be 4 source + 4 target");
            let (src_rows, tgt_rows): (Vec<&dafd::dann::BatchItem>, Vec<&dafd::dann::BatchItem>) =
                batch
                    .items
                    .iter()
                    .partition(|i| i.domain == DomainTag::Source);
            assert_eq!(src_rows.len(), 4);
            assert_eq!(tgt_rows.len(), 4);
            for item in tgt_rows {
                let id = &adl_target.get(item.index).trial_id;
                assert!(!target_fall_ids.contains(id), "target fall {id} in a dafd_adl batch");
            }
        }
    }
    println!("criterion 4 (protocol conformance): PASS  27 tuples, 20+12+8 pairs, 4+4 batches, no target falls in dafd_adl");
}

/// Criterion 5: 66 = 37+1+28 windows, min-max into [0, 1], and the paper's
/// 23/25 and 23/250 resampling factors. Exact.
#[test]
fn criterion_5_preprocessing_conformance() {
    let wc = WindowConfig::default();
    assert_eq!((wc.ws_b, wc.ws_f), (37, 28));
    assert_eq!(wc.window_len(), 66);
    // windows stay 66 long even when the impact touches a trial edge
    use dafd::ingest::{Position, TrialRecord};
    for peak_at in [0usize, 5, 50, 99] {
        let mut samples: Vec<[f64; 3]> = (0..100).map(|_| [0.0, 0.0, 1.0]).collect();
        samples[peak_at] = [2.0, 1.0, 3.0];
        let trial = TrialRecord {
            trial_id: format!("T{peak_at}"),
            subject_id: "S01".into(),
            dataset_id: "synth".into(),
            position: Position::WA,
            activity_code: "F1".into(),
            label: Class::Fall,
            sample_rate_hz: 18.4,
            samples,
        };
        let seg = dafd::signal::impact_window(&trial, &wc, DomainTag::Source).unwrap();
        assert_eq!(seg.values.len(), 66);
        assert_eq!(seg.impact_index, 37);
        let norm = minmax_normalize(&seg);
        for row in &norm.values {
            for v in row {
                assert!((0.0..=1.0).contains(v), "normalized value {v} outside [0,1]");
            }
        }
    }
    let f = ResampleFactor::from_rates(20.0, 18.4).unwrap();
    assert_eq!((f.p(), f.q()), (23, 25));
    let f = ResampleFactor::from_rates(200.0, 18.4).unwrap();
    assert_eq!((f.p(), f.q()), (23, 250));
    println!("criterion 5 (preprocessing conformance): PASS  66-sample windows, [0,1] range, factors 23/25 & 23/250");
}

/// Criterion 6: SEN/SPE/PRE/F1 reproduce hand-computed values on 20
/// enumerated confusion counts (degenerate cases included) to 1e-12.
#[test]
fn criterion_6_metric_correctness() {
    // (tp, tn, fp, fn) -> (sen, spe, pre, f1), None marks a degenerate metric
    #[allow(clippy::type_complexity)]
    let cases: [(u64, u64, u64, u64, Option<f64>, Option<f64>, Option<f64>, Option<f64>); 20] = [
        (90, 90, 10, 10, Some(0.9), Some(0.9), Some(0.9), Some(0.9)),
        (9, 10, 0, 1, Some(0.9), Some(1.0), Some(1.0), Some(2.0 * 0.9 / 1.9)),
        (0, 10, 0, 5, Some(0.0), Some(1.0), None, None),
        (0, 0, 0, 0, None, None, None, None),
        (1, 0, 0, 0, Some(1.0), None, Some(1.0), Some(1.0)),
        (0, 1, 0, 0, None, Some(1.0), None, None),
        (5, 5, 5, 5, Some(0.5), Some(0.5), Some(0.5), Some(0.5)),
        (3, 0, 1, 0, Some(1.0), Some(0.0), Some(0.75), Some(6.0 / 7.0)),
        (0, 3, 5, 0, None, Some(3.0 / 8.0), Some(0.0), None),
        (7, 2, 1, 3, Some(0.7), Some(2.0 / 3.0), Some(7.0 / 8.0), Some(1.225 / 1.575)),
        (1, 99, 0, 0, Some(1.0), Some(1.0), Some(1.0), Some(1.0)),
        (0, 99, 1, 0, None, Some(0.99), Some(0.0), None),
        (10, 0, 0, 90, Some(0.1), None, Some(1.0), Some(0.2 / 1.1)),
        (2, 2, 2, 0, Some(1.0), Some(0.5), Some(0.5), Some(2.0 / 3.0)),
        (0, 0, 4, 4, Some(0.0), Some(0.0), Some(0.0), None),
        (6, 1, 2, 1, Some(6.0 / 7.0), Some(1.0 / 3.0), Some(0.75), Some(0.8)),
        (1, 1, 0, 1, Some(0.5), Some(1.0), Some(1.0), Some(2.0 / 3.0)),
        (4, 0, 6, 0, Some(1.0), Some(0.0), Some(0.4), Some(4.0 / 7.0)),
        (0, 5, 0, 0, None, Some(1.0), None, None),
        (25, 50, 25, 0, Some(1.0), Some(2.0 / 3.0), Some(0.5), Some(2.0 / 3.0)),
    ];
    for (tp, tn, fp, fn_count, sen, spe, pre, f1) in cases {
        let m = metrics(&ConfusionCounts {
            true_pos: tp,
            true_neg: tn,
            false_pos: fp,
            false_neg: fn_count,
        });
        let check = |got: dafd::eval::Metric, expect: Option<f64>, name: &str| match expect {
            Some(v) => {
                assert!(!got.degenerate, "({tp},{tn},{fp},{fn_count}) {name} wrongly degenerate");
                assert!(
                    (got.value - v).abs() < 1e-12,
                    "({tp},{tn},{fp},{fn_count}) {name}: {} vs {v}",
                    got.value
                );
            }
            None => {
                assert!(got.degenerate, "({tp},{tn},{fp},{fn_count}) {name} should be degenerate");
                assert_eq!(got.value, 0.0);
            }
        };
        check(m.sen, sen, "sen");
        check(m.spe, spe, "spe");
        check(m.pre, pre, "pre");
        check(m.f1, f1, "f1");
    }
    println!("criterion 6 (metric correctness): PASS  20 hand-computed confusion cases at 1e-12");
}

/// Criterion 7: on the built-in synthetic benchmark (25-degree rotation,
/// gains 0.9/1.1/1.0, 20 subjects, 5-fold LSOCV, 5 seeds), median target F1
/// satisfies TargetOnly >= DAFD >= SourceOnly with DAFD at least 5 points
/// above SourceOnly, in under 10 minutes.
#[test]
fn criterion_7_synthetic_cross_domain_ordering() {
    let start = Instant::now();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let modes = [TrainMode::SourceOnly, TrainMode::Dafd, TrainMode::TargetOnly];
    let outcome = run_benchmark(&modes, 5, 7, jobs).expect("benchmark runs");
    let source_only = outcome.median_f1["source_only"];
    let dafd = outcome.median_f1["dafd"];
    let target_only = outcome.median_f1["target_only"];
    assert!(
        target_only >= dafd && dafd >= source_only,
        "ordering violated: target_only {target_only:.3}, dafd {dafd:.3}, source_only {source_only:.3}"
    );
    assert!(
        dafd - source_only >= 0.05,
        "adaptation gap {:.1} F1 points < 5",
        (dafd - source_only) * 100.0
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "benchmark took {elapsed:?}, budget 10 min");
    println!(
        "criterion 7 (synthetic cross-domain ordering): PASS  median F1 source_only={:.3} dafd={:.3} target_only={:.3} gap={:.1}pts elapsed={:.0?}",
        source_only, dafd, target_only, (dafd - source_only) * 100.0, elapsed
    );
}

/// Criterion 8: weighted sampling balances a 9:1 pool to a fall fraction in
/// [0.45, 0.55] over 50 epochs.
#[test]
fn criterion_8_oversampling_balance() {
    let mut segments = Vec::new();
    for i in 0..90 {
        segments.push(segment("S01", Class::Adl, DomainTag::Source, i as f64));
    }
    for i in 0..10 {
        segments.push(segment("S01", Class::Fall, DomainTag::Source, 1000.0 + i as f64));
    }
    let pool = SegmentPool::labeled(segments, DomainTag::Source).unwrap();
    let cfg = TrainConfig {
        mode: TrainMode::SourceOnly,
        ..TrainConfig::default()
    };
    let mut rng = stream(8, 8);
    let mut falls = 0usize;
    let mut total = 0usize;
    for _ in 0..50 {
        for batch in make_epoch_batches(Some(&pool), None, &cfg, &mut rng).unwrap() {
            for item in &batch.items {
                total += 1;
                if item.fall_target == Some(1) {
                    falls += 1;
                }
            }
        }
    }
    let fraction = falls as f64 / total as f64;
    assert!(
        (0.45..=0.55).contains(&fraction),
        "sampled fall fraction {fraction:.4} outside [0.45, 0.55]"
    );
    println!("criterion 8 (oversampling balance): PASS  fall fraction {fraction:.4} over 50 epochs");
}

fn snapshot_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).expect("read dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let rel = path.strip_prefix(base).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).expect("read file"));
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

fn run_pipeline(root: &Path) {
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let data = root.join("data");
    let run = root.join("run");
    let eval = root.join("eval");
    let report = root.join("report");
    let feats = root.join("features.csv");
    let commands: Vec<Vec<String>> = vec![
        vec![
            "dafd".into(), "synth".into(), "--out".into(), s(&data),
            "--subjects".into(), "6".into(), "--trials".into(), "3".into(), "--seed".into(), "11".into(),
        ],
        vec![
            "dafd".into(), "train".into(), "--data".into(), s(&data),
            "--pair".into(), "synth/WA:synth/RP".into(), "--mode".into(), "dafd".into(),
            "--out".into(), s(&run), "--seed".into(), "3".into(),
            "--epochs".into(), "6".into(), "--patience".into(), "6".into(),
        ],
        vec![
            "dafd".into(), "evalpairs".into(), "--data".into(), s(&data),
            "--pair".into(), "synth/WA:synth/RP".into(), "--out".into(), s(&eval),
            "--seed".into(), "5".into(), "--epochs".into(), "4".into(), "--patience".into(), "4".into(),
            "--jobs".into(), "4".into(),
        ],
        vec![
            "dafd".into(), "report".into(), "--data".into(), s(&eval), "--out".into(), s(&report),
        ],
        vec![
            "dafd".into(), "export-features".into(), "--data".into(), s(&data),
            "--pair".into(), "synth/WA:synth/RP".into(),
            "--model".into(), s(&run.join("model.ckpt")), "--out".into(), s(&feats),
        ],
    ];
    for argv in commands {
        let code = dafd::cli::dispatch(&argv);
        assert_eq!(code, 0, "command failed: {argv:?}");
    }
}

/// Criterion 9: rerunning every command with an identical RunConfig
/// reproduces all outputs byte for byte, checkpoints and reports included.
#[test]
fn criterion_9_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("ws");
    std::fs::create_dir_all(&root).unwrap();
    run_pipeline(&root);
    let first = snapshot_tree(&root);
    assert!(first.keys().any(|k| k.ends_with("model.ckpt")));
    assert!(first.keys().any(|k| k.ends_with("report.txt")));
    std::fs::remove_dir_all(&root).unwrap();
    std::fs::create_dir_all(&root).unwrap();
    run_pipeline(&root);
    let second = snapshot_tree(&root);
    assert_eq!(
        first.keys().collect::<Vec<_>>(),
        second.keys().collect::<Vec<_>>(),
        "file sets differ between reruns"
    );
    for (name, bytes) in &first {
        assert_eq!(bytes, &second[name], "file {name} differs between reruns");
    }
    println!(
        "criterion 9 (determinism): PASS  {} files byte-identical across reruns",
        first.len()
    );
}

/// Criterion 10 (optional, offline): with user-supplied UP-Fall and UMAFall
/// canonical exports (set DAFD_REAL_DATA to the directory holding
/// manifest.csv), all 40 pairs x 4 modes complete and DAFD beats SourceOnly
/// on a majority of pairs. Not part of CI.
#[test]
#[ignore = "requires real UP-Fall/UMAFall exports; set DAFD_REAL_DATA"]
fn criterion_10_real_data_directional() {
    let data = std::env::var("DAFD_REAL_DATA").expect("set DAFD_REAL_DATA to the canonical dir");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eval");
    for scenario in ["cross_position", "cross_config"] {
        let argv: Vec<String> = vec![
            "dafd".into(), "evalpairs".into(), "--data".into(), data.clone(),
            "--scenario".into(), scenario.into(),
            "--out".into(), out.join(scenario).to_string_lossy().into_owned(),
            "--seed".into(), "1".into(),
        ];
        assert_eq!(dafd::cli::dispatch(&argv), 0, "evalpairs {scenario} failed");
    }
    let mut wins = 0usize;
    let mut losses = 0usize;
    for scenario in ["cross_position", "cross_config"] {
        let results =
            dafd::eval::read_results_csv(&out.join(scenario).join("results.csv")).unwrap();
        let mut by_pair: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for r in &results {
            by_pair
                .entry(r.pair.to_string())
                .or_default()
                .insert(r.mode.name().to_string(), r.mean.f1.value);
        }
        for modes in by_pair.values() {
            if let (Some(d), Some(s)) = (modes.get("dafd"), modes.get("source_only")) {
                if d > s {
                    wins += 1;
                } else {
                    losses += 1;
                }
            }
        }
    }
    assert!(wins > losses, "dafd won {wins} pairs vs {losses}");
    println!("criterion 10 (real-data directional): PASS  dafd > source_only on {wins}/{} pairs", wins + losses);
}

/// Confusion counting itself is exercised by the other criteria; this pins
/// the positive class.
#[test]
fn fall_is_the_positive_class() {
    let c = confusion(&[Class::Fall], &[Class::Fall]).unwrap();
    assert_eq!(c.true_pos, 1);
}
