use puoc::data::{
    gen_multimodal_scenario, gen_two_gaussian_scenario, load_csv_dataset, load_test_csv, sample_mixture, scar_sample,
    seeded_rng, write_test_csv, write_train_csv, CsvSchema, DataPoint, GaussianMode, PuData, PuDataset, ScenarioSpec,
};
use puoc::PuError;
use std::fs;

fn pools(seed: u64, n: usize) -> (Vec<DataPoint>, Vec<DataPoint>) {
    let mut rng = seeded_rng(seed);
    let p = sample_mixture(&[GaussianMode::isotropic(vec![0.0, 0.0], 1.0, 1.0)], n, &mut rng);
    let q = sample_mixture(&[GaussianMode::isotropic(vec![4.0, 0.0], 1.0, 1.0)], n, &mut rng);
    (p, q)
}

#[test]
fn scar_mean_fraction_over_many_draws() {
    let (p, n) = pools(1, 1200);
    let mean = (0..200u64)
        .map(|seed| {
            scar_sample(&p, &n, 100, 1000, 0.7, seed)
                .unwrap()
                .latent_positive_fraction()
                .unwrap()
        })
        .sum::<f64>()
        / 200.0;
    assert!((mean - 0.7).abs() <= 0.01, "{mean}");
}

#[test]
fn scar_rejects_small_pools() {
    let (p, n) = pools(2, 50);
    assert!(matches!(
        scar_sample(&p, &n, 40, 100, 0.5, 0),
        Err(PuError::InsufficientData(_))
    ));
    assert!(scar_sample(&p, &n, 10, 20, 0.0, 0).is_err());
}

#[test]
fn generators_are_deterministic() {
    let a = gen_two_gaussian_scenario(&ScenarioSpec::fig1(5)).unwrap();
    let b = gen_two_gaussian_scenario(&ScenarioSpec::fig1(5)).unwrap();
    assert_eq!(a.train, b.train);
    assert_eq!(a.test_pos, b.test_pos);
    assert_eq!(a.test_neg, b.test_neg);
    let c = gen_two_gaussian_scenario(&ScenarioSpec::fig1(6)).unwrap();
    assert_ne!(a.train, c.train);
}

#[test]
fn canonical_sizes_and_shift() {
    let s = gen_two_gaussian_scenario(&ScenarioSpec::fig1_shift(1)).unwrap();
    assert_eq!(s.train.positive().len(), 1000);
    assert_eq!(s.train.unlabeled().len(), 2000);
    assert_eq!((s.test_pos.len(), s.test_neg.len()), (1000, 1000));
    let mean_x = s.test_neg.iter().map(|p| p[0]).sum::<f64>() / 1000.0;
    assert!((mean_x + 4.0).abs() < 0.2);
    // training negatives stay at +4
    let labels = s.train.latent_labels.as_ref().unwrap();
    let negs: Vec<&DataPoint> = s.train.unlabeled().iter().zip(labels).filter(|(_, &l)| l == 0).map(|(p, _)| p).collect();
    let neg_x = negs.iter().map(|p| p[0]).sum::<f64>() / negs.len() as f64;
    assert!((neg_x - 4.0).abs() < 0.2);
}

#[test]
fn shift_override_equal_to_training_modes_changes_nothing() {
    let mut spec = ScenarioSpec::fig1(3);
    let plain = gen_two_gaussian_scenario(&spec).unwrap();
    spec.test_negative_modes = Some(spec.negative_modes.clone());
    let same = gen_two_gaussian_scenario(&spec).unwrap();
    assert_eq!(plain.test_neg, same.test_neg);
    assert_eq!(plain.train, same.train);
}

#[test]
fn single_mode_multimodal_matches_two_gaussian() {
    let spec = ScenarioSpec::fig1(4);
    let a = gen_two_gaussian_scenario(&spec).unwrap();
    let b = gen_multimodal_scenario(&spec).unwrap();
    assert_eq!(a.train, b.train);
    assert_eq!(a.test_pos, b.test_pos);
}

#[test]
fn invalid_specs_rejected() {
    let mut spec = ScenarioSpec::fig1(0);
    spec.alpha = 0.0;
    assert!(gen_two_gaussian_scenario(&spec).is_err());
    let mut spec = ScenarioSpec::fig1(0);
    spec.positive_modes[0].weight = 0.5;
    assert!(gen_two_gaussian_scenario(&spec).is_err());
    let mut spec = ScenarioSpec::fig1(0);
    spec.negative_modes[0].var = vec![1.0, 0.0];
    assert!(gen_two_gaussian_scenario(&spec).is_err());
    assert!(gen_two_gaussian_scenario(&ScenarioSpec::fig3(0)).is_err());
}

#[test]
fn trainer_view_has_only_samples() {
    let s = gen_two_gaussian_scenario(&ScenarioSpec::fig1(2)).unwrap();
    // exhaustive destructuring: adding a field to the view breaks this test
    let PuData {
        positive,
        unlabeled,
        dim,
    } = s.train.view().clone();
    assert_eq!((positive.len(), unlabeled.len(), dim), (1000, 2000, 2));
}

#[test]
fn fresh_draws_follow_the_spec() {
    let spec = ScenarioSpec::fig1_shift(9);
    let unl = spec.draw_unlabeled(4000, true, 1).unwrap();
    let far_left = unl.iter().filter(|p| p[0] < -2.0).count() as f64 / 4000.0;
    assert!((far_left - 0.5 * 0.977).abs() < 0.04, "{far_left}");
    let unl = spec.draw_unlabeled(4000, false, 1).unwrap();
    assert!(unl.iter().filter(|p| p[0] < -2.0).count() < 100);
    assert_eq!(spec.draw_positive(10, 3).unwrap(), spec.draw_positive(10, 3).unwrap());
}

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let s = gen_multimodal_scenario(&ScenarioSpec::fig3(8)).unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    write_train_csv(&train, &s.train).unwrap();
    write_test_csv(&test, &s.test_pos, &s.test_neg).unwrap();
    let back = load_csv_dataset(&train, &CsvSchema::default()).unwrap();
    assert_eq!(back.positive(), s.train.positive());
    assert_eq!(back.unlabeled(), s.train.unlabeled());
    assert_eq!(back.latent_labels, s.train.latent_labels);
    let (tp, tn) = load_test_csv(&test, &CsvSchema::default()).unwrap();
    assert_eq!((tp, tn), (s.test_pos, s.test_neg));
}

#[test]
fn csv_small_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    fs::write(&path, "f0,f1,s\n1.0,2.0,p\n0.5,0.5,u\n-1,3e-2,u\n").unwrap();
    let ds = load_csv_dataset(&path, &CsvSchema::default()).unwrap();
    assert_eq!((ds.positive().len(), ds.unlabeled().len()), (1, 2));
    assert!(ds.latent_labels.is_none());

    fs::write(&path, "f0,s,y_latent\n1.0,p,\n0.5,u,1\n-1,u,0\n").unwrap();
    let ds: PuDataset = load_csv_dataset(&path, &CsvSchema::default()).unwrap();
    assert_eq!(ds.latent_labels, Some(vec![1, 0]));

    fs::write(&path, "f0,f1,s\n1.0,2.0,p\n0.5,inf,u\n").unwrap();
    match load_csv_dataset(&path, &CsvSchema::default()) {
        Err(PuError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }

    fs::write(&path, "f0,f1,s\n1.0,2.0,p\n0.5,u\n").unwrap();
    assert!(matches!(load_csv_dataset(&path, &CsvSchema::default()), Err(PuError::Parse { line: 3, .. })));

    fs::write(&path, "f0,s\n1.0,q\n").unwrap();
    assert!(matches!(load_csv_dataset(&path, &CsvSchema::default()), Err(PuError::Parse { line: 2, .. })));

    assert!(matches!(
        load_csv_dataset(dir.path().join("missing.csv"), &CsvSchema::default()),
        Err(PuError::Io(_))
    ));
}
