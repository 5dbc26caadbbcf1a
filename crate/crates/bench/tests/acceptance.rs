//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits nonzero when any check fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use puoc::data::{derive_seed, gen_two_gaussian_scenario, seeded_rng, ScenarioSpec};
use puoc::math::{loss_eval, risk_pn, risk_pu_unbiased, ClassCode, ClassPrior, Kernel, LossKind};
use puoc::models::{
    nn_risk_and_grad, random_scorer, solve_pu_svm_dual, train_density_ratio, train_pu_svm_sgd,
    train_pu_svm_sgd_with, Activation, Mlp, MlpSpec, PuSvmOptions, Scorer, TrainConfig,
};
use puoc::reliability::{calibrate_p_crit, detect_high_alpha, detect_negative_shift};
use puoc::stats::{
    mann_whitney_u, mann_whitney_u_with, roc_auc, wilcoxon_signed_rank, wilcoxon_signed_rank_with, Alternative,
    PValueMethod,
};
use puoc_bench::runner::mean_auc;
use puoc_bench::{builtin, run_experiment};

type Outcome = (bool, String);

fn prior(a: f64) -> ClassPrior {
    ClassPrior::new(a).unwrap()
}

fn auc_of(s: &Scorer, pos: &[puoc::data::DataPoint], neg: &[puoc::data::DataPoint]) -> f64 {
    roc_auc(&s.score_all(pos), &s.score_all(neg)).unwrap()
}

fn builtin_means(name: &str) -> (Vec<f64>, Vec<f64>, Duration) {
    let start = Instant::now();
    let cfg = builtin::config(name).unwrap();
    let records = run_experiment(&cfg).unwrap();
    assert!(records.iter().all(|r| !r.failed()), "{name}: failed runs");
    let oc = (0..cfg.cells()).map(|c| mean_auc(&records, "oc-svm", c).unwrap()).collect();
    let pu = (0..cfg.cells()).map(|c| mean_auc(&records, "pu-svm", c).unwrap()).collect();
    (oc, pu, start.elapsed())
}

fn two_gaussian() -> Outcome {
    let (oc, pu, t1) = builtin_means("fig1");
    let (oc_s, pu_s, t2) = builtin_means("fig1-shift");
    let t = t1 + t2;
    let ok = oc[0] >= 0.85 && pu[0] >= 0.90 && oc_s[0] >= 0.80 && pu_s[0] <= 0.30 && t < Duration::from_secs(60);
    (
        ok,
        format!(
            "no shift OC {:.3} PU {:.3}; shift OC {:.3} PU {:.3}; {:.1}s",
            oc[0],
            pu[0],
            oc_s[0],
            pu_s[0],
            t.as_secs_f64()
        ),
    )
}

fn four_modes() -> Outcome {
    let (oc, pu, t) = builtin_means("fig3");
    let ok = oc[0] <= 0.30 && pu[0] >= 0.85 && t < Duration::from_secs(60);
    (ok, format!("OC {:.3} PU {:.3}; {:.1}s", oc[0], pu[0], t.as_secs_f64()))
}

fn mixture_cancellation() -> Outcome {
    let mut rng = seeded_rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let loss = LossKind::ALL[rng.random_range(0..4)];
        let n_p = rng.random_range(1..40);
        let n_n = rng.random_range(1..40);
        let sp: Vec<f64> = (0..n_p).map(|_| rng.random_range(-3.0..3.0)).collect();
        let sn: Vec<f64> = (0..n_n).map(|_| rng.random_range(-3.0..3.0)).collect();
        // the unlabeled sample is exactly the pooled classes, so alpha = n_p / (n_p + n_n)
        let alpha = prior(n_p as f64 / (n_p + n_n) as f64);
        let mut su: Vec<f64> = sp.iter().chain(&sn).copied().collect();
        su.shuffle(&mut rng);
        let pu = risk_pu_unbiased(loss, &sp, &su, alpha).unwrap().total;
        let pn = risk_pn(loss, &sp, &sn, alpha).unwrap();
        worst = worst.max((pu - pn).abs());
    }
    (worst <= 1e-10, format!("max |uPU - PN| = {worst:.2e} over 100 cases"))
}

fn double_hinge() -> Outcome {
    let mut rng = seeded_rng(4);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let t: f64 = rng.random_range(-10.0..10.0);
        let d = loss_eval(LossKind::DoubleHinge, ClassCode::Positive, t) - loss_eval(LossKind::DoubleHinge, ClassCode::Negative, t);
        worst = worst.max((d + 2.0 * t).abs());
    }
    (worst <= 1e-12, format!("max |l(+1,t) - l(-1,t) + 2t| = {worst:.2e} over 1e4 margins"))
}

fn dual_solver() -> Outcome {
    let mut worst_res = 0.0f64;
    let mut worst_gap = 0.0f64;
    let mut tau_exact = true;
    let mut slowest = Duration::ZERO;
    for seed in 0..10u64 {
        let mut spec = ScenarioSpec::fig1(seed);
        spec.n_pos_labeled = 10;
        spec.n_unlabeled = 30;
        spec.n_test_per_class = 500;
        let sc = gen_two_gaussian_scenario(&spec).unwrap();
        let d = sc.train.view();
        let start = Instant::now();
        let sol = solve_pu_svm_dual(d, prior(0.5), Kernel::Linear, 1e-9).unwrap();
        slowest = slowest.max(start.elapsed());
        worst_res = worst_res.max(sol.constraint_residuals().max());
        tau_exact &= sol.tau[..10].iter().all(|&t| t == 0.5 / 20.0);
        let dual = sol.to_scorer(d, Kernel::Linear).unwrap();
        let cfg = TrainConfig {
            epochs: 300,
            batch_size: 8,
            ..TrainConfig::default().with_seed(seed)
        };
        let opts = PuSvmOptions {
            unclamped: true,
            ..PuSvmOptions::default()
        };
        let sgd = train_pu_svm_sgd_with(d, prior(0.5), &cfg, &opts).unwrap();
        let gap = (auc_of(&dual, &sc.test_pos, &sc.test_neg) - auc_of(&sgd, &sc.test_pos, &sc.test_neg)).abs();
        worst_gap = worst_gap.max(gap);
    }
    let ok = worst_res <= 1e-6 && tau_exact && worst_gap <= 0.05 && slowest < Duration::from_secs(10);
    (
        ok,
        format!(
            "max residual {worst_res:.1e}; positive tau exact: {tau_exact}; max AUC gap {worst_gap:.3}; slowest {:.2}s",
            slowest.as_secs_f64()
        ),
    )
}

fn nnpu_gradient() -> Outcome {
    let configs = [
        (vec![2, 5, 1], Activation::Tanh, 0.5),
        (vec![2, 4, 3, 1], Activation::Tanh, 0.3),
        (vec![3, 6, 1], Activation::Relu, 0.7),
    ];
    let mut worst = 0.0f64;
    for (i, (sizes, act, alpha)) in configs.into_iter().enumerate() {
        let dim = sizes[0];
        let mut rng = seeded_rng(100 + i as u64);
        let net = Mlp::init(&MlpSpec::new(sizes, act), &mut rng);
        let mut point = |shift: f64| {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0) + shift).collect();
            puoc::data::DataPoint::new(v).unwrap()
        };
        let pos: Vec<_> = (0..4).map(|_| point(0.5)).collect();
        let unl: Vec<_> = (0..6).map(|_| point(-0.5)).collect();
        let (_, grad) = nn_risk_and_grad(&net, &pos, &unl, prior(alpha)).unwrap();
        let h = 1e-6;
        let mut diff = 0.0;
        for k in 0..net.params.len() {
            let mut p = net.clone();
            p.params[k] += h;
            let up = nn_risk_and_grad(&p, &pos, &unl, prior(alpha)).unwrap().0.total;
            p.params[k] -= 2.0 * h;
            let down = nn_risk_and_grad(&p, &pos, &unl, prior(alpha)).unwrap().0.total;
            let fd = (up - down) / (2.0 * h);
            diff += (fd - grad[k]).powi(2);
        }
        let gnorm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        worst = worst.max(diff.sqrt() / gnorm.max(1e-12));
    }
    (worst < 1e-4, format!("max relative error {worst:.2e} over 3 networks"))
}

fn two_sided(null: &[f64], observed: f64) -> f64 {
    let total = null.len() as f64;
    let le = null.iter().filter(|&&v| v <= observed + 1e-9).count() as f64 / total;
    let ge = null.iter().filter(|&&v| v >= observed - 1e-9).count() as f64 / total;
    (2.0 * le.min(ge)).min(1.0)
}

fn distinct(rng: &mut puoc::data::Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| i as f64 + rng.random_range(0.0..0.5)).collect();
    v.shuffle(rng);
    v
}

fn signed(rng: &mut puoc::data::Rng, n: usize) -> Vec<f64> {
    distinct(rng, n)
        .into_iter()
        .map(|m| if rng.random_bool(0.5) { m + 1.0 } else { -(m + 1.0) })
        .collect()
}

fn rank_tests() -> Outcome {
    let mut rng = seeded_rng(7);
    let mut worst_exact = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=12);
        let n1 = rng.random_range(1..n);
        let pooled = distinct(&mut rng, n);
        let (a, b) = pooled.split_at(n1);
        let r = mann_whitney_u(a, b, Alternative::TwoSided).unwrap();
        let null: Vec<f64> = (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == n1)
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| i + 1).sum::<usize>() as f64 - (n1 * (n1 + 1) / 2) as f64)
            .collect();
        worst_exact = worst_exact.max((r.p_value - two_sided(&null, r.statistic)).abs());

        let x = signed(&mut rng, n);
        let r = wilcoxon_signed_rank(&x, &vec![0.0; n], Alternative::TwoSided).unwrap();
        let null: Vec<f64> = (0u32..1 << n)
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| (i + 1) as f64).sum())
            .collect();
        worst_exact = worst_exact.max((r.p_value - two_sided(&null, r.statistic)).abs());
    }
    let mut worst_normal = 0.0f64;
    for _ in 0..50 {
        let pooled = distinct(&mut rng, 14);
        let (a, b) = pooled.split_at(7);
        let e = mann_whitney_u_with(a, b, Alternative::TwoSided, PValueMethod::Exact).unwrap();
        let n = mann_whitney_u_with(a, b, Alternative::TwoSided, PValueMethod::Asymptotic).unwrap();
        worst_normal = worst_normal.max((e.p_value - n.p_value).abs());
        let x = signed(&mut rng, 14);
        let y = vec![0.0; 14];
        let e = wilcoxon_signed_rank_with(&x, &y, Alternative::TwoSided, PValueMethod::Exact).unwrap();
        let n = wilcoxon_signed_rank_with(&x, &y, Alternative::TwoSided, PValueMethod::Asymptotic).unwrap();
        worst_normal = worst_normal.max((e.p_value - n.p_value).abs());
    }
    (
        worst_exact < 1e-12 && worst_normal <= 0.02,
        format!("max exact deviation {worst_exact:.1e}; max normal-approximation deviation at 14: {worst_normal:.4}"),
    )
}

fn auc_pairs() -> Outcome {
    let mut rng = seeded_rng(11);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n1 = rng.random_range(1..50);
        let n2 = rng.random_range(1..50);
        let pos: Vec<f64> = (0..n1).map(|_| rng.random_range(0..8) as f64).collect();
        let neg: Vec<f64> = (0..n2).map(|_| rng.random_range(0..8) as f64).collect();
        let mut wins = 0.0;
        for p in &pos {
            for n in &neg {
                wins += if p > n { 1.0 } else if p == n { 0.5 } else { 0.0 };
            }
        }
        let brute = wins / (n1 * n2) as f64;
        worst = worst.max((roc_auc(&pos, &neg).unwrap() - brute).abs());
    }
    (worst <= 1e-12, format!("max deviation {worst:.1e} over 100 tied score sets"))
}

const DETECT_N: usize = 200;

fn pu_scorer(spec: &ScenarioSpec, seed: u64) -> Scorer {
    let sc = gen_two_gaussian_scenario(spec).unwrap();
    let cfg = TrainConfig::default().with_seed(seed);
    train_pu_svm_sgd(sc.train.view(), prior(spec.alpha), Kernel::Linear, &cfg).unwrap()
}

fn high_alpha() -> Outcome {
    let start = Instant::now();
    let mut rates = Vec::new();
    let mut medians = Vec::new();
    for alpha in [0.5, 0.75, 0.9, 1.0] {
        let mut ps = Vec::new();
        let mut unreliable = 0;
        for seed in 0..50u64 {
            let mut spec = ScenarioSpec::fig1(seed);
            spec.alpha = alpha;
            let s = pu_scorer(&spec, seed);
            let pos = spec.draw_positive(DETECT_N, derive_seed(seed, &[10])).unwrap();
            let unl = spec.draw_unlabeled(DETECT_N, false, derive_seed(seed, &[11])).unwrap();
            let v = detect_high_alpha(&s, &pos, &unl, 0.1).unwrap();
            ps.push(v.p_value);
            unreliable += v.unreliable as usize;
        }
        ps.sort_by(f64::total_cmp);
        medians.push((ps[24] + ps[25]) / 2.0);
        rates.push(unreliable as f64 / 50.0);
    }
    let t = start.elapsed();
    let monotone = medians.windows(2).all(|w| w[0] <= w[1]);
    let ok = rates[3] >= 0.8 && rates[0] <= 0.2 && monotone && t < Duration::from_secs(300);
    (
        ok,
        format!(
            "unreliable rate {:.2} at alpha 1, {:.2} at alpha 0.5; medians {:.1e} {:.1e} {:.1e} {:.1e}; {:.1}s",
            rates[3],
            rates[0],
            medians[0],
            medians[1],
            medians[2],
            medians[3],
            t.as_secs_f64()
        ),
    )
}

fn shift_detection() -> Outcome {
    let mut with_shift = Vec::new();
    let mut without = Vec::new();
    for alpha in [0.5, 0.75] {
        let (mut hit, mut false_hit) = (0, 0);
        for seed in 0..50u64 {
            let mut spec = ScenarioSpec::fig1_shift(seed);
            spec.alpha = alpha;
            let s = pu_scorer(&spec, seed);
            let unl_train = spec.draw_unlabeled(DETECT_N, false, derive_seed(seed, &[12])).unwrap();
            let p_crit = calibrate_p_crit(&s, &unl_train, derive_seed(seed, &[13])).unwrap();
            let shifted = spec.draw_unlabeled(DETECT_N, true, derive_seed(seed, &[14])).unwrap();
            let same = spec.draw_unlabeled(DETECT_N, false, derive_seed(seed, &[14])).unwrap();
            hit += detect_negative_shift(&s, &unl_train, &shifted, p_crit).unwrap().unreliable as usize;
            false_hit += detect_negative_shift(&s, &unl_train, &same, p_crit).unwrap().unreliable as usize;
        }
        with_shift.push(hit as f64 / 50.0);
        without.push(false_hit as f64 / 50.0);
    }
    let ok = with_shift.iter().all(|&r| r >= 0.8) && without.iter().all(|&r| r <= 0.2);
    (
        ok,
        format!(
            "detection with shift {:.2}/{:.2}, without shift {:.2}/{:.2} (alpha 0.5/0.75)",
            with_shift[0], with_shift[1], without[0], without[1]
        ),
    )
}

fn random_scorer_detection() -> Outcome {
    let mut unreliable = 0;
    for seed in 0..100u64 {
        let mut spec = ScenarioSpec::fig1(seed);
        let s = random_scorer(2, &MlpSpec::with_hidden(2, &[16], Activation::Tanh), seed).unwrap();
        let pos = spec.draw_positive(DETECT_N, derive_seed(seed, &[10])).unwrap();
        spec.alpha = 1.0;
        let unl = spec.draw_unlabeled(DETECT_N, false, derive_seed(seed, &[11])).unwrap();
        let p_crit = calibrate_p_crit(&s, &pos, derive_seed(seed, &[13])).unwrap();
        unreliable += detect_high_alpha(&s, &pos, &unl, p_crit).unwrap().unreliable as usize;
    }
    let rate = unreliable as f64 / 100.0;
    (rate >= 0.6, format!("unreliable rate {rate:.2} at alpha 1 over 100 seeds"))
}

fn sweeps() -> Outcome {
    let (oc, pu, _) = builtin_means("alpha-sweep");
    let pu_down = pu.windows(2).all(|w| w[1] <= w[0]);
    let oc_range = oc.iter().cloned().fold(f64::MIN, f64::max) - oc.iter().cloned().fold(f64::MAX, f64::min);
    let (_, pu_size, _) = builtin_means("size-sweep");
    let gain = pu_size[2] - pu_size[0];
    let ok = pu_down && oc_range < 0.05 && gain >= 0.05;
    (
        ok,
        format!(
            "PU over alpha {:.4} {:.4} {:.4}; OC range {oc_range:.4}; PU 50 -> 2000 unlabeled {:.3} -> {:.3}",
            pu[0], pu[1], pu[2], pu_size[0], pu_size[2]
        ),
    )
}

fn scar_sampler() -> Outcome {
    let mut within = 0;
    for seed in 0..200u64 {
        let mut spec = ScenarioSpec::fig1(seed);
        spec.alpha = 0.7;
        let sc = gen_two_gaussian_scenario(&spec).unwrap();
        let frac = sc.train.latent_positive_fraction().unwrap();
        let n = spec.n_unlabeled as f64;
        let sd = (0.7 * 0.3 / n).sqrt();
        within += ((frac - 0.7).abs() <= 3.0 * sd) as usize;
    }
    let rate = within as f64 / 200.0;
    (rate >= 0.95, format!("{within}/200 draws within 3 sd"))
}

fn density_ratio() -> Outcome {
    let (mut lo_same, mut hi_same) = (f64::MAX, f64::MIN);
    let (mut lo_sep, mut hi_sep) = (f64::MAX, f64::MIN);
    let mut invariant = true;
    for seed in 0..10u64 {
        let cfg = TrainConfig::default().with_seed(seed);
        let sc = gen_two_gaussian_scenario(&ScenarioSpec::fig1(seed)).unwrap();
        let fit = train_density_ratio(sc.train.view(), 100, &cfg, 0.2).unwrap();
        lo_sep = lo_sep.min(fit.alpha_hat);
        hi_sep = hi_sep.max(fit.alpha_hat);
        invariant &= auc_of(&fit.scorer, &sc.test_pos, &sc.test_neg) == auc_of(&fit.ratio, &sc.test_pos, &sc.test_neg);

        let mut spec = ScenarioSpec::fig1(seed);
        spec.alpha = 1.0;
        let sc = gen_two_gaussian_scenario(&spec).unwrap();
        let fit = train_density_ratio(sc.train.view(), 100, &cfg, 0.2).unwrap();
        lo_same = lo_same.min(fit.alpha_hat);
        hi_same = hi_same.max(fit.alpha_hat);
    }
    let ok = lo_same >= 0.8 && hi_same <= 1.0 && lo_sep >= 0.5 && hi_sep <= 0.75 && invariant;
    (
        ok,
        format!(
            "alpha_hat [{lo_same:.3}, {hi_same:.3}] when p_p = p_u, [{lo_sep:.3}, {hi_sep:.3}] when separated; exact AUC invariance: {invariant}"
        ),
    )
}

fn bench_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("puoc-acceptance-{}", std::process::id()));
    let mut same = Vec::new();
    for name in builtin::NAMES {
        let mut runs = Vec::new();
        for run in 0..2 {
            let out = dir.join(format!("{name}-{run}.jsonl"));
            let status = Command::new(env!("CARGO_BIN_EXE_puoc"))
                .args(["bench", "--builtin", name, "--out"])
                .arg(&out)
                .output()
                .unwrap();
            assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
            let mut lines: Vec<String> = std::fs::read_to_string(&out).unwrap().lines().map(String::from).collect();
            lines.sort();
            runs.push(lines);
        }
        same.push(runs[0] == runs[1]);
    }
    let _ = std::fs::remove_dir_all(&dir);
    let ok = same.iter().all(|&s| s);
    (ok, format!("identical results for {} of {} built-in configs", same.iter().filter(|&&s| s).count(), same.len()))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 15] = [
        ("two-gaussian scenario, with and without shift", two_gaussian),
        ("four-mode scenario", four_modes),
        ("mixture cancellation", mixture_cancellation),
        ("double-hinge identity", double_hinge),
        ("dual solver", dual_solver),
        ("nnPU gradient check", nnpu_gradient),
        ("rank-test oracles", rank_tests),
        ("AUC pair counting", auc_pairs),
        ("high-alpha detection", high_alpha),
        ("shift detection, calibrated threshold", shift_detection),
        ("random-scorer detection", random_scorer_detection),
        ("alpha and size sweeps", sweeps),
        ("SCAR sampler", scar_sampler),
        ("density-ratio prior", density_ratio),
        ("bench determinism", bench_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        failed += !ok as usize;
        println!("{:>2} {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
