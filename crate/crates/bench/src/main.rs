use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;

use puoc::data::{
    derive_seed, load_csv_dataset, load_test_csv, seeded_rng, write_test_csv, write_train_csv, CsvSchema, DataPoint,
    PuData, ScenarioSpec,
};
use puoc::models::Scorer;
use puoc::reliability::{calibrate_p_crit, detect_high_alpha, detect_negative_shift, DEFAULT_P_CRIT};
use puoc::stats::roc_auc;
use puoc_bench::runner::mean_auc;
use puoc_bench::{builtin, compare_models, read_records, run_experiment, write_csv, write_records};
use puoc_bench::{BenchError, ExperimentConfig, ModelKind, PriorSource, Result};

#[derive(Parser)]
#[command(name = "puoc", version, about = "Positive-unlabeled and one-class learning experiments")]
struct Cli {
    /// Directory for outputs given without an explicit path.
    #[arg(long, global = true, env = "PUOC_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    HighAlpha,
    NegativeShift,
}

#[derive(Subcommand)]
enum Command {
    /// Write train.csv, test.csv and test_unlabeled.csv for a scenario.
    Gen {
        /// Built-in name or a JSON scenario file.
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n_unlabeled: Option<usize>,
        /// Target directory (defaults to the output directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit one model on a training CSV and save its parameters as JSON.
    Train {
        #[arg(long)]
        train: PathBuf,
        /// oc-svm, pu-svm, pu-svm-dual, nnpu, elkan-noto or density-ratio.
        #[arg(long, default_value = "pu-svm")]
        model: String,
        /// Hyperparameters as a JSON object, e.g. '{"nu": 0.3}'.
        #[arg(long)]
        params: Option<String>,
        /// Class prior for PU models; defaults to the latent labels in the file.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// AUC of a saved scorer on a labeled test CSV.
    Eval {
        #[arg(long)]
        scorer: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
    /// Check whether the unlabeled data is reliable for PU learning.
    Detect {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        train: PathBuf,
        /// Saved scorer; without one, a PU-SVM is fit on half the training
        /// file and the tests run on the other half.
        #[arg(long)]
        scorer: Option<PathBuf>,
        /// Unlabeled data seen at test time (negative-shift mode).
        #[arg(long)]
        test_unlabeled: Option<PathBuf>,
        #[arg(long, conflicts_with = "calibrate")]
        p_crit: Option<f64>,
        /// Estimate p_crit from two halves of a same-distribution sample.
        #[arg(long)]
        calibrate: bool,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment config and write one JSON record per line.
    Bench {
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        config: Option<PathBuf>,
        /// fig1, fig1-shift, fig3, alpha-sweep or size-sweep.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a flat CSV projection.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print the resolved config and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Paired Wilcoxon signed-rank test between two models in a results file.
    Compare {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn resolve(out_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

fn io(path: &Path, e: impl std::fmt::Display) -> BenchError {
    BenchError::Io(format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
    serde_json::from_str(&text).map_err(|e| BenchError::Format {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(v).expect("value serializes");
    std::fs::write(path, text).map_err(|e| io(path, e))
}

fn load_scenario(name: &str, seed: u64) -> Result<ScenarioSpec> {
    if builtin::NAMES.contains(&name) {
        return builtin::scenario(name, seed);
    }
    let mut spec: ScenarioSpec = read_json(Path::new(name))?;
    spec.seed = seed;
    Ok(spec)
}

fn model_kind(name: &str, params: Option<&str>, alpha: Option<f64>) -> Result<ModelKind> {
    let mut obj = match params {
        Some(p) => serde_json::from_str::<serde_json::Value>(p)
            .map_err(|e| BenchError::Config(format!("--params: {e}")))?,
        None => serde_json::json!({}),
    };
    let map = obj
        .as_object_mut()
        .ok_or_else(|| BenchError::Config("--params must be a JSON object".into()))?;
    map.insert("kind".into(), name.into());
    let mut kind: ModelKind = serde_json::from_value(obj).map_err(|e| BenchError::Config(format!("model `{name}`: {e}")))?;
    if let Some(a) = alpha {
        match &mut kind {
            ModelKind::PuSvm { prior, .. } | ModelKind::PuSvmDual { prior, .. } | ModelKind::Nnpu { prior, .. } => {
                *prior = PriorSource::Fixed(a)
            }
            _ => {}
        }
    }
    Ok(kind)
}

fn run(cli: Cli) -> Result<()> {
    let out_dir = cli.out_dir;
    let schema = CsvSchema::default();
    match cli.command {
        Command::Gen {
            scenario,
            seed,
            alpha,
            n_unlabeled,
            out,
        } => {
            let mut spec = load_scenario(&scenario, seed)?;
            if let Some(a) = alpha {
                spec.alpha = a;
            }
            if let Some(n) = n_unlabeled {
                spec.n_unlabeled = n;
            }
            let dir = out.map_or(out_dir.clone(), |o| resolve(&out_dir, &o));
            std::fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
            let sc = if spec.positive_modes.len() == 1 && spec.negative_modes.len() == 1 {
                puoc::data::gen_two_gaussian_scenario(&spec)?
            } else {
                puoc::data::gen_multimodal_scenario(&spec)?
            };
            write_train_csv(dir.join("train.csv"), &sc.train)?;
            write_test_csv(dir.join("test.csv"), &sc.test_pos, &sc.test_neg)?;
            let unl = spec.draw_unlabeled(spec.n_unlabeled, true, derive_seed(seed, &[99]))?;
            let ds = puoc::data::PuDataset::new(PuData::new(Vec::new(), unl)?, None, None)?;
            write_train_csv(dir.join("test_unlabeled.csv"), &ds)?;
            write_json(&dir.join("scenario.json"), &spec)?;
            println!("wrote train.csv, test.csv, test_unlabeled.csv, scenario.json to {}", dir.display());
        }
        Command::Train {
            train,
            model,
            params,
            alpha,
            seed,
            out,
        } => {
            let ds = load_csv_dataset(&train, &schema)?;
            let kind = model_kind(&model, params.as_deref(), alpha)?;
            let alpha_true = ds.alpha_true.or(ds.latent_positive_fraction());
            let trained = kind.train(ds.view(), alpha_true, seed)?;
            let path = resolve(&out_dir, &out.unwrap_or_else(|| PathBuf::from("scorer.json")));
            write_json(&path, &trained.scorer)?;
            if let Some(a) = trained.alpha_hat {
                println!("alpha_hat: {a:.4}");
            }
            println!("saved {} scorer to {}", kind.name(), path.display());
        }
        Command::Eval { scorer, test } => {
            let s: Scorer = read_json(&scorer)?;
            let (pos, neg) = load_test_csv(&test, &schema)?;
            let auc = roc_auc(&s.try_score_all(&pos)?, &s.try_score_all(&neg)?)?;
            println!("auc: {auc:.6}");
        }
        Command::Detect {
            mode,
            train,
            scorer,
            test_unlabeled,
            p_crit,
            calibrate,
            alpha,
            seed,
        } => {
            let ds = load_csv_dataset(&train, &schema)?;
            let (scorer, pos, unl) = match scorer {
                Some(path) => (read_json::<Scorer>(&path)?, ds.positive().to_vec(), ds.unlabeled().to_vec()),
                None => {
                    let (fit_pos, pos) = halves(ds.positive(), derive_seed(seed, &[1]));
                    let (fit_unl, unl) = halves(ds.unlabeled(), derive_seed(seed, &[2]));
                    let alpha_true = alpha.or(ds.alpha_true).or(ds.latent_positive_fraction());
                    let kind = model_kind("pu-svm", None, None)?;
                    let fit = PuData::new(fit_pos, fit_unl)?;
                    (kind.train(&fit, alpha_true, seed)?.scorer, pos, unl)
                }
            };
            let verdict = match mode {
                Mode::HighAlpha => {
                    let crit = threshold(p_crit, calibrate, &scorer, &pos, seed)?;
                    detect_high_alpha(&scorer, &pos, &unl, crit)?
                }
                Mode::NegativeShift => {
                    let path = test_unlabeled.ok_or_else(|| {
                        BenchError::Config("negative-shift mode needs --test-unlabeled".into())
                    })?;
                    let test = load_csv_dataset(&path, &schema)?;
                    let crit = threshold(p_crit, calibrate, &scorer, &unl, seed)?;
                    detect_negative_shift(&scorer, &unl, test.unlabeled(), crit)?
                }
            };
            let mode = match mode {
                Mode::HighAlpha => "high-alpha",
                Mode::NegativeShift => "negative-shift",
            };
            println!("mode: {mode}");
            println!("p_value: {:.6}", verdict.p_value);
            println!("p_crit: {:.6}", verdict.p_crit);
            println!("unreliable: {}", verdict.unreliable);
            println!("recommendation: {:?}", verdict.recommendation);
        }
        Command::Bench {
            config,
            builtin: name,
            repeats,
            out,
            csv,
            print_config,
        } => {
            let mut cfg = match (config, name) {
                (Some(path), _) => ExperimentConfig::load(path)?,
                (None, Some(name)) => builtin::config(&name)?,
                (None, None) => unreachable!("clap requires one source"),
            };
            if let Some(r) = repeats {
                cfg.repeats = r;
            }
            if let Some(o) = out {
                cfg.output_path = o;
            }
            if let Some(c) = csv {
                cfg.csv_path = Some(c);
            }
            cfg.validate()?;
            if print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            let records = run_experiment(&cfg)?;
            let path = resolve(&out_dir, &cfg.output_path);
            write_records(&path, &records)?;
            if let Some(c) = &cfg.csv_path {
                write_csv(resolve(&out_dir, c), &records)?;
            }
            print_summary(&cfg, &records);
            let failed = records.iter().filter(|r| r.failed()).count();
            if failed > 0 {
                eprintln!("{failed} of {} runs failed; see the error field", records.len());
            }
            println!("wrote {} records to {}", records.len(), path.display());
        }
        Command::Compare { results, a, b } => {
            let records = read_records(&results)?;
            println!("{}", compare_models(&records, &a, &b)?);
        }
    }
    Ok(())
}

fn halves(points: &[DataPoint], seed: u64) -> (Vec<DataPoint>, Vec<DataPoint>) {
    let mut v = points.to_vec();
    v.shuffle(&mut seeded_rng(seed));
    let second = v.split_off(v.len() / 2);
    (v, second)
}

fn threshold(p_crit: Option<f64>, calibrate: bool, scorer: &Scorer, reference: &[DataPoint], seed: u64) -> Result<f64> {
    if calibrate {
        Ok(calibrate_p_crit(scorer, reference, derive_seed(seed, &[3]))?)
    } else {
        Ok(p_crit.unwrap_or(DEFAULT_P_CRIT))
    }
}

fn print_summary(cfg: &ExperimentConfig, records: &[puoc_bench::ResultRecord]) {
    let axis = cfg.sweep.as_ref().map_or("cell", |s| s.axis());
    print!("{axis:>16}");
    for m in &cfg.models {
        print!("{:>16}", m.id);
    }
    println!();
    for cell in 0..cfg.cells() {
        let label = cfg.sweep.as_ref().map_or("-".to_string(), |s| s.value(cell).to_string());
        print!("{label:>16}");
        for m in &cfg.models {
            match mean_auc(records, &m.id, cell) {
                Some(a) => print!("{a:>16.4}"),
                None => print!("{:>16}", "failed"),
            }
        }
        println!();
    }
}
