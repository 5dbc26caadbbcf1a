use puoc::data::ScenarioSpec;
use puoc::stats::Alternative;
use puoc_bench::runner::{mean_auc, sort_records};
use puoc_bench::*;

fn small(name: &str) -> ExperimentConfig {
    let mut cfg = builtin::config(name).unwrap();
    let mut spec = builtin::scenario(name, 0).unwrap();
    spec.n_pos_labeled = 200;
    spec.n_unlabeled = 400;
    spec.n_test_per_class = 200;
    cfg.scenario = ScenarioSource::Spec(spec);
    cfg.repeats = 3;
    cfg
}

fn record(model: &str, repeat: usize, auc: f64) -> ResultRecord {
    ResultRecord {
        model: model.into(),
        cell: 0,
        sweep_value: None,
        repeat,
        seed: repeat as u64,
        auc: Some(auc),
        alpha_hat: None,
        wall_time_ms: 0,
        verdicts: None,
        error: None,
    }
}

#[test]
fn record_count_is_models_times_cells_times_repeats() {
    let mut cfg = small("alpha-sweep");
    cfg.repeats = 10;
    let records = run_experiment(&cfg).unwrap();
    assert_eq!(records.len(), 60);
    assert!(records.iter().all(|r| !r.failed()));
    let mut sorted = records.clone();
    sort_records(&mut sorted);
    assert_eq!(sorted, records);
}

#[test]
fn reruns_and_thread_counts_do_not_change_results() {
    let cfg = small("size-sweep");
    let a = run_experiment(&cfg).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| run_experiment(&cfg).unwrap());
    assert_eq!(a, b);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.auc.unwrap().to_bits(), y.auc.unwrap().to_bits());
    }
}

#[test]
fn seeds_depend_on_cell_and_repeat_only() {
    let cfg = small("alpha-sweep");
    let records = run_experiment(&cfg).unwrap();
    for r in &records {
        assert_eq!(r.seed, puoc::data::derive_seed(cfg.base_seed, &[r.cell as u64, r.repeat as u64]));
    }
    let mut fewer = cfg.clone();
    fewer.repeats = 2;
    let sub = run_experiment(&fewer).unwrap();
    for r in &sub {
        assert!(records.contains(r));
    }
}

#[test]
fn failures_are_flagged_and_the_run_continues() {
    let mut cfg = small("fig1");
    cfg.models.push(ModelEntry::new("dual", ModelKind::from_name("pu-svm-dual").unwrap()));
    let records = run_experiment(&cfg).unwrap();
    assert_eq!(records.len(), 9);
    let dual: Vec<_> = records.iter().filter(|r| r.model == "dual").collect();
    assert!(dual.iter().all(|r| r.failed() && r.auc.is_none()));
    assert!(dual[0].error.as_ref().unwrap().contains("too large"));
    assert!(records.iter().filter(|r| r.model != "dual").all(|r| r.auc.is_some()));
}

#[test]
fn dual_and_other_models_run_on_small_instances() {
    let mut spec = ScenarioSpec::fig1(0);
    spec.n_pos_labeled = 60;
    spec.n_unlabeled = 120;
    spec.n_test_per_class = 100;
    let mut cfg = small("fig1");
    cfg.scenario = ScenarioSource::Spec(spec);
    cfg.repeats = 2;
    cfg.models = ["pu-svm-dual", "nnpu", "elkan-noto", "density-ratio"]
        .iter()
        .map(|k| ModelEntry::new(*k, ModelKind::from_name(k).unwrap()))
        .collect();
    let records = run_experiment(&cfg).unwrap();
    for r in &records {
        assert!(!r.failed(), "{r:?}");
        assert!(r.auc.unwrap() > 0.8, "{r:?}");
    }
    assert!(records.iter().filter(|r| r.model == "density-ratio").all(|r| r.alpha_hat.is_some()));
}

#[test]
fn estimated_prior_is_recorded() {
    let mut cfg = small("fig1");
    cfg.models = vec![ModelEntry {
        id: "pu-est".into(),
        kind: serde_json::from_str(r#"{"kind": "pu-svm", "prior": "estimated"}"#).unwrap(),
    }];
    let records = run_experiment(&cfg).unwrap();
    assert!(records.iter().all(|r| r.alpha_hat.is_some() && r.auc.unwrap() > 0.9));
}

#[test]
fn detection_verdicts_are_attached() {
    let mut cfg = small("fig1-shift");
    cfg.detection = Some(DetectionConfig {
        sample_size: 100,
        p_crit: Some(0.1),
    });
    let records = run_experiment(&cfg).unwrap();
    let pu: Vec<_> = records.iter().filter(|r| r.model == "pu-svm").collect();
    for r in pu {
        let v = r.verdicts.as_ref().unwrap();
        assert_eq!(v.len(), 2);
        assert!(v[1].unreliable, "{v:?}");
    }
}

#[test]
fn shift_sweep_mirrors_negatives() {
    let mut cfg = small("fig1");
    cfg.sweep = Some(Sweep::Shift(vec![false, true]));
    let records = run_experiment(&cfg).unwrap();
    assert!(mean_auc(&records, "pu-svm", 0).unwrap() > 0.9);
    assert!(mean_auc(&records, "pu-svm", 1).unwrap() < 0.3);
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let mut cfg = small("fig1");
    cfg.repeats = 0;
    assert!(matches!(run_experiment(&cfg), Err(BenchError::Config(_))));
    let mut cfg = small("fig1");
    cfg.sweep = Some(Sweep::Alpha(vec![0.5, 1.5]));
    assert!(run_experiment(&cfg).is_err());
    let mut cfg = small("fig1");
    cfg.models.push(cfg.models[0].clone());
    assert!(run_experiment(&cfg).is_err());
    let mut cfg = small("fig1");
    cfg.scenario = ScenarioSource::Builtin("fig9".into());
    assert!(run_experiment(&cfg).is_err());
    assert!(ExperimentConfig::from_json(r#"{"scenario": {"builtin": "fig1"}, "models": [{"id": "x", "kind": "svm"}]}"#).is_err());
}

#[test]
fn config_json_round_trip_and_defaults() {
    let cfg = ExperimentConfig::from_json(
        r#"{"scenario": {"builtin": "fig3"}, "models": [{"id": "oc", "kind": "oc-svm", "nu": 0.3}],
            "sweep": {"unlabeled_size": [100, 200]}}"#,
    )
    .unwrap();
    assert_eq!(cfg.repeats, 10);
    assert_eq!(cfg.cells(), 2);
    assert!(matches!(cfg.models[0].kind, ModelKind::OcSvm { nu, .. } if nu == 0.3));
    assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    for name in builtin::NAMES {
        let c = builtin::config(name).unwrap();
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }
}

#[test]
fn results_file_round_trip_reproduces_comparison() {
    let records = run_experiment(&small("fig1")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.jsonl");
    write_records(&path, &records).unwrap();
    let back = read_records(&path).unwrap();
    assert_eq!(back, records);
    assert_eq!(
        compare_models(&back, "oc-svm", "pu-svm").unwrap(),
        compare_models(&records, "oc-svm", "pu-svm").unwrap()
    );
    write_csv(dir.path().join("out.csv"), &records).unwrap();
    let text = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(text.lines().count(), records.len() + 1);
}

#[test]
fn compare_favors_the_uniformly_better_model() {
    let mut records: Vec<ResultRecord> = (0..6).map(|i| record("a", i, 0.5 + 0.05 * i as f64)).collect();
    records.extend((0..6).map(|i| record("b", i, 0.6 + 0.05 * i as f64)));
    let c = compare_models(&records, "a", "b").unwrap();
    assert_eq!(c.favored.as_deref(), Some("b"));
    let p = c.p_value().unwrap();
    assert!((p - 2.0 / 64.0).abs() < 1e-12, "{p}");
    assert_eq!(c.report.unwrap().alternative, Alternative::TwoSided);

    let swapped = compare_models(&records, "b", "a").unwrap();
    assert_eq!(swapped.favored.as_deref(), Some("b"));
    assert_eq!(swapped.p_value(), c.p_value());

    // five pairs cannot reach 0.05 two-sided
    let five: Vec<_> = records.iter().filter(|r| r.repeat < 5).cloned().collect();
    assert!(compare_models(&five, "a", "b").unwrap().favored.is_none());
}

#[test]
fn compare_identical_and_mismatched() {
    let mut records: Vec<ResultRecord> = (0..6).map(|i| record("a", i, 0.7)).collect();
    records.extend((0..6).map(|i| record("b", i, 0.7)));
    let c = compare_models(&records, "a", "b").unwrap();
    assert!(c.report.is_none() && !c.significant());
    assert!(c.to_string().contains("no significant difference"));

    records.pop();
    assert!(matches!(compare_models(&records, "a", "b"), Err(BenchError::Pairing(_))));
    assert!(matches!(compare_models(&records, "a", "zzz"), Err(BenchError::Pairing(_))));
}
