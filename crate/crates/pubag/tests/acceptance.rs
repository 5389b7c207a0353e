//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use pubag::config::{
    DataSource, ExperimentConfig, ExperimentKind, MethodKind, MethodSpec, SimSpec, TimingOptions,
};
use pubag::exec::Rayon;
use pubag::experiments::run;
use pubag::formats;
use pubag::records::{JsonLines, Line, Status};
use pubag_core::classifiers::{
    fit_svm, train_logit, DecisionModel, Kernel, Learner, LogisticObjective, SolverPath,
    TrainConfig,
};
use pubag_core::data::{generate_gaussian_pu, Dataset, PuSplit, SimConfig, SparseVec};
use pubag_core::eval::{auc, mean, pearson, precision_recall, spearman, std_dev, wilcoxon_paired};
use pubag_core::pu::{
    bagging_transductive, bagging_transductive_traced, bootstrap_diagnostics, speedup_threshold,
    BaggingConfig, Executor, Sampling, Sequential,
};
use pubag_core::rng;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: &str, title: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} criterion {id}: {title} ({detail})", if pass { "PASS" } else { "FAIL" });
    }
}

fn config(kind: ExperimentKind, sim: SimSpec, methods: Vec<MethodSpec>, replicates: usize, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml(
        "schema_version = 1\nkind = \"sim_sweep\"\n[data]\nsource = \"synthetic\"\n[[methods]]\nid = \"x\"\nmethod = \"biased\"\n",
    )
    .expect("template parses");
    cfg.kind = kind;
    cfg.data = DataSource::Synthetic(sim);
    cfg.methods = methods;
    cfg.replicates = replicates;
    cfg.seed = seed;
    cfg
}

fn results(lines: &[Line]) -> impl Iterator<Item = &pubag::records::ResultRecord> {
    lines.iter().filter_map(Line::as_result)
}

// ---------------------------------------------------------------- 1 and 2

fn simulation(report: &mut Report) {
    let gammas = [0.0, 0.2, 0.4, 0.6, 0.8];
    let ks: Vec<usize> = (1..=10).map(|i| 5 * i).collect();
    let mut bag = MethodSpec::new("bagging", MethodKind::Bagging, Learner::Logit, 0.1);
    bag.bootstraps = Some(200);
    let biased = MethodSpec::new("biased", MethodKind::Biased, Learner::Logit, 0.1);
    let mut cfg = config(ExperimentKind::SimSweep, SimSpec::default(), vec![bag, biased], 50, 2009);
    cfg.sweep.contamination = gammas.to_vec();
    cfg.sweep.subsample_sizes = ks.clone();

    let start = Instant::now();
    let mut lines: Vec<Line> = Vec::new();
    let ran = run(&cfg, &Rayon, &mut lines);
    let elapsed = start.elapsed().as_secs_f64();
    if let Err(e) = ran {
        report.check("1", "simulation sweep", false, format!("run failed: {e}"));
        report.check("2", "bagging vs biased", false, "sweep did not run".into());
        return;
    }
    let failed = results(&lines).filter(|r| r.status != Status::Ok).count();

    // mean AUC per (gamma index, K or None for biased)
    let mut cells: BTreeMap<(usize, Option<usize>), Vec<f64>> = BTreeMap::new();
    for r in results(&lines) {
        let g = gammas.iter().position(|&g| Some(g) == r.gamma).unwrap();
        let k = (r.method == "bagging").then_some(r.k).flatten();
        if let Some(a) = r.auc {
            cells.entry((g, k)).or_default().push(a);
        }
    }
    let m = |g: usize, k: Option<usize>| mean(&cells[&(g, k)]);

    let at_zero: Vec<f64> = ks.iter().map(|&k| m(0, Some(k))).collect();
    let spread = at_zero.iter().cloned().fold(f64::MIN, f64::max)
        - at_zero.iter().cloned().fold(f64::MAX, f64::min);
    let best_k = *ks
        .iter()
        .max_by(|&&a, &&b| {
            let ma = mean(&(0..5).map(|g| m(g, Some(a))).collect::<Vec<_>>());
            let mb = mean(&(0..5).map(|g| m(g, Some(b))).collect::<Vec<_>>());
            ma.total_cmp(&mb)
        })
        .unwrap();
    let curve: Vec<f64> = (0..5).map(|g| m(g, Some(best_k))).collect();
    let decreasing = curve.windows(2).all(|w| w[1] < w[0]);
    let rho = spearman(&gammas, &curve).unwrap_or(0.0);
    report.check(
        "1",
        "simulation: flat in K at zero contamination, decreasing in contamination",
        failed == 0 && spread < 0.03 && decreasing && rho <= -0.9,
        format!(
            "AUC spread over K at gamma=0 {spread:.4} < 0.03; best K={best_k}: {}; spearman {rho:.2}; {failed} failed runs; {elapsed:.0}s",
            curve.iter().map(|a| format!("{a:.4}")).collect::<Vec<_>>().join(" > ")
        ),
    );

    let mut margins = Vec::new();
    for g in 0..5 {
        let best = ks.iter().map(|&k| m(g, Some(k))).fold(f64::MIN, f64::max);
        margins.push(best - m(g, None));
    }
    report.check(
        "2",
        "bagging at best K is no worse than biased minus 0.01",
        margins.iter().all(|&d| d >= -0.01),
        format!(
            "bagging minus biased per gamma: {}",
            margins.iter().map(|d| format!("{d:+.4}")).collect::<Vec<_>>().join(" ")
        ),
    );
}

// ---------------------------------------------------------------- 3

/// Fourth central moment of a Binomial(k, p) count.
fn binomial_m4(k: f64, p: f64) -> f64 {
    let q = 1.0 - p;
    k * p * q * (1.0 + 3.0 * (k - 2.0) * p * q)
}

fn contamination_diagnostics(report: &mut Report) {
    let data = generate_gaussian_pu(&SimConfig::standard(0.2, 7)).unwrap();
    let bagging = |k: usize, sampling: Sampling| {
        BaggingConfig::new(Learner::Logit, TrainConfig::logit(0.1))
            .with_subsample_size(k)
            .with_bootstraps(500)
            .with_sampling(sampling)
            .with_seed(11)
    };
    let mut corr = Vec::new();
    let mut spread = Vec::new();
    for k in [10, 40] {
        let records = bootstrap_diagnostics(&data.train, &data.split, &bagging(k, Sampling::WithoutReplacement), &data.test, &Rayon).unwrap();
        let g: Vec<f64> = records.iter().map(|r| r.contamination.unwrap()).collect();
        let a: Vec<f64> = records.iter().map(|r| r.test_auc.unwrap()).collect();
        corr.push(pearson(&g, &a).unwrap_or(0.0));
        spread.push(std_dev(&g));
    }
    let realized = data.split.contamination(&data.train).unwrap();
    let mut moments_ok = true;
    let mut moment_detail = Vec::new();
    for k in [10, 40] {
        let records = bootstrap_diagnostics(&data.train, &data.split, &bagging(k, Sampling::WithReplacement), &data.test, &Rayon).unwrap();
        let g: Vec<f64> = records.iter().map(|r| r.contamination.unwrap()).collect();
        let n = g.len() as f64;
        let kf = k as f64;
        let var = realized * (1.0 - realized) / kf;
        let m4 = binomial_m4(kf, realized) / kf.powi(4);
        let se_mean = (var / n).sqrt();
        let se_var = ((m4 - var * var * (n - 3.0) / (n - 1.0)) / n).sqrt();
        let (em, ev) = (mean(&g), std_dev(&g).powi(2));
        let ok = (em - realized).abs() <= 3.0 * se_mean && (ev - var).abs() <= 3.0 * se_var;
        moments_ok &= ok;
        moment_detail.push(format!(
            "K={k}: mean {em:.4} vs {realized:.4} (se {se_mean:.4}), var {ev:.5} vs {var:.5} (se {se_var:.5})"
        ));
    }
    report.check(
        "3",
        "contamination diagnostics at gamma=0.2 with 500 bootstraps",
        corr[0] < 0.0 && corr[1] < 0.0 && spread[0] > spread[1] && moments_ok,
        format!(
            "corr(contamination, AUC) K=10 {:.3}, K=40 {:.3}; sd K=10 {:.4} > K=40 {:.4}; {}",
            corr[0], corr[1], spread[0], spread[1], moment_detail.join("; ")
        ),
    );
}

// ---------------------------------------------------------------- 4

fn timing(report: &mut Report) {
    let threshold = speedup_threshold(35.0, 3.0);
    let sim = SimSpec {
        n_pos: 238,
        n_unlabeled: 4762,
        n_test: 200,
        contamination: 0.1,
        ..SimSpec::default()
    };
    let medians = |kernel: Kernel| -> Result<(f64, f64), String> {
        let mut bag = MethodSpec::new("bagging", MethodKind::Bagging1, Learner::Svm, 1.0);
        bag.bootstraps = Some(35);
        bag.kernel = kernel;
        let mut biased = MethodSpec::new("biased", MethodKind::Biased, Learner::Svm, 1.0);
        biased.kernel = kernel;
        let mut cfg = config(ExperimentKind::Timing, sim.clone(), vec![bag, biased], 3, 5);
        cfg.timing = TimingOptions::default();
        let mut lines: Vec<Line> = Vec::new();
        run(&cfg, &Sequential, &mut lines).map_err(|e| e.to_string())?;
        let median_of = |id: &str| {
            lines.iter().find_map(|l| match l {
                Line::Timing(t) if t.method == id => Some(t.median_seconds),
                _ => None,
            })
        };
        match (median_of("bagging"), median_of("biased")) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err("missing timing summary".into()),
        }
    };
    match medians(Kernel::Rbf { sigma: 8.0 }) {
        Ok((bag, biased)) => report.check(
            "4",
            "speedup threshold and bagging faster than biased at U/P=20",
            (5.4..=5.7).contains(&threshold) && bag < biased,
            format!(
                "threshold(35, 3) = {threshold:.4}; RBF SVM n=5000, K=|P|=238, T=35: bagging {bag:.2}s vs biased {biased:.2}s"
            ),
        ),
        Err(e) => report.check("4", "speedup threshold and timing", false, e),
    }
    if let Ok((bag, biased)) = medians(Kernel::Linear) {
        println!("INFO criterion 4: linear SVM at the same size: bagging {bag:.2}s vs biased {biased:.2}s (reported, not asserted)");
    }
}

// ---------------------------------------------------------------- 5

fn pair_auc(s: &[f64], l: &[bool]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for i in 0..s.len() {
        for j in 0..s.len() {
            if l[i] && !l[j] {
                pairs += 1.0;
                wins += if s[i] > s[j] { 1.0 } else if s[i] == s[j] { 0.5 } else { 0.0 };
            }
        }
    }
    wins / pairs
}

fn metric_oracles(report: &mut Report) {
    let mut rng = rng::seeded(5);
    let mut auc_err = 0.0f64;
    let mut pr_bad = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..=50);
        let levels = rng.random_range(2..30);
        let mut l: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        l[0] = true;
        l[1] = false;
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64 * 0.37).collect();
        auc_err = auc_err.max((auc(&s, &l).unwrap() - pair_auc(&s, &l)).abs());

        let curve = precision_recall(&s, &l).unwrap();
        let mut th = s.clone();
        th.sort_by(|a, b| b.total_cmp(a));
        th.dedup();
        let n_pos = l.iter().filter(|&&x| x).count() as f64;
        let (mut area, mut last) = (0.0, 0.0);
        let mut ok = curve.points.len() == th.len();
        for (p, &t) in curve.points.iter().zip(&th) {
            let called = (0..n).filter(|&i| s[i] >= t).count() as f64;
            let tp = (0..n).filter(|&i| s[i] >= t && l[i]).count() as f64;
            ok &= p.threshold == t
                && (p.recall - tp / n_pos).abs() < 1e-12
                && (p.precision - tp / called).abs() < 1e-12;
            area += (tp / n_pos - last) * tp / called;
            last = tp / n_pos;
        }
        ok &= (curve.aupr - area).abs() < 1e-12;
        pr_bad += usize::from(!ok);
    }
    let mut w_bad = 0;
    for _ in 0..100 {
        let n = rng.random_range(10..60);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64).collect();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
        let mut w_plus = 0.0;
        for &di in d.iter().filter(|d| **d > 0.0) {
            let below = d.iter().filter(|x| x.abs() < di.abs()).count() as f64;
            let tied = d.iter().filter(|x| x.abs() == di.abs()).count() as f64;
            w_plus += below + (tied + 1.0) / 2.0;
        }
        let ok = match wilcoxon_paired(&a, &b) {
            Ok(w) => w.n_used == d.len() && (w.w_plus - w_plus).abs() < 1e-9,
            Err(_) => d.len() < 6,
        };
        w_bad += usize::from(!ok);
    }
    report.check(
        "5",
        "metric oracles",
        auc_err <= 1e-12 && pr_bad == 0 && w_bad == 0,
        format!("max AUC error {auc_err:.1e} over 200; PR mismatches {pr_bad}/200; Wilcoxon mismatches {w_bad}/100"),
    );
}

// ---------------------------------------------------------------- 6

struct Problem {
    pos: Vec<SparseVec>,
    neg: Vec<SparseVec>,
    d: usize,
}

fn problem(seed: u64, max_n: usize) -> Problem {
    let mut rng = rng::seeded(seed);
    let d = rng.random_range(2..8);
    let n_pos = rng.random_range(2..max_n / 2);
    let n_neg = rng.random_range(2..max_n / 2);
    let shift: f64 = rng.random_range(0.0..2.0);
    let mut draw = |s: f64| {
        let v: Vec<f64> = (0..d)
            .map(|j| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z + if j == 0 { s } else { 0.0 }
            })
            .collect();
        SparseVec::from_dense(&v)
    };
    let pos = (0..n_pos).map(|_| draw(shift)).collect();
    let neg = (0..n_neg).map(|_| draw(-shift)).collect();
    Problem { pos, neg, d }
}

impl Problem {
    fn refs(&self) -> (Vec<&SparseVec>, Vec<&SparseVec>) {
        (self.pos.iter().collect(), self.neg.iter().collect())
    }

    /// Augmented rows, labels and balanced costs.
    fn dense(&self, c: f64) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
        let n = (self.pos.len() + self.neg.len()) as f64;
        let cp = c * self.neg.len() as f64 / n;
        let cn = c * self.pos.len() as f64 / n;
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut cost = Vec::new();
        for (v, label, ci) in self
            .pos
            .iter()
            .map(|v| (v, 1.0, cp))
            .chain(self.neg.iter().map(|v| (v, -1.0, cn)))
        {
            let mut row = v.to_dense(self.d);
            row.push(1.0);
            x.push(row);
            y.push(label);
            cost.push(ci);
        }
        (x, y, cost)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn kernel_value(kernel: Kernel, a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() - 1;
    match kernel {
        Kernel::Linear => dot(&a[..n], &b[..n]),
        Kernel::Rbf { sigma } => {
            let d2: f64 = a[..n].iter().zip(&b[..n]).map(|(x, y)| (x - y).powi(2)).sum();
            (-d2 / (2.0 * sigma * sigma)).exp()
        }
    }
}

fn kkt_violation(x: &[Vec<f64>], y: &[f64], cost: &[f64], alpha: &[f64], kernel: Kernel) -> f64 {
    (0..x.len())
        .map(|i| {
            let g = (0..x.len())
                .map(|j| y[i] * y[j] * (kernel_value(kernel, &x[i], &x[j]) + 1.0) * alpha[j])
                .sum::<f64>()
                - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= cost[i] {
                g.max(0.0)
            } else {
                g
            };
            pg.abs()
        })
        .fold(0.0, f64::max)
}

fn solver_correctness(report: &mut Report) {
    let mut worst_kkt = 0.0f64;
    let mut unconverged = 0;
    let mut runs = 0;
    for seed in 0..60 {
        let p = problem(seed, 60);
        let (pos, neg) = p.refs();
        for (c, kernel) in [(0.1, Kernel::Linear), (10.0, Kernel::Linear), (1.0, Kernel::Rbf { sigma: 1.0 })] {
            let cfg = TrainConfig::svm(c).with_kernel(kernel);
            let path = if kernel == Kernel::Linear { SolverPath::PrimalWeights } else { SolverPath::KernelExpansion };
            let fit = fit_svm(&pos, &neg, &cfg, path).unwrap();
            let (x, y, cost) = p.dense(c);
            worst_kkt = worst_kkt.max(kkt_violation(&x, &y, &cost, &fit.alpha, kernel) - cfg.tolerance);
            unconverged += usize::from(!fit.classifier.diagnostics.converged);
            runs += 1;
        }
    }

    let mut rng = rng::seeded(77);
    let mut beaten = 0;
    for seed in 0..50 {
        let p = problem(1000 + seed, 30);
        let (pos, neg) = p.refs();
        let c = [0.5, 1.0, 5.0][seed as usize % 3];
        let cfg = TrainConfig::svm(c).with_tolerance(1e-9);
        let fit = fit_svm(&pos, &neg, &cfg, SolverPath::PrimalWeights).unwrap();
        let DecisionModel::Linear { weights, bias } = &fit.classifier.model else { unreachable!() };
        let mut w = weights.clone();
        w.resize(p.d, 0.0);
        w.push(*bias);
        let (x, y, cost) = p.dense(c);
        let primal = |w: &[f64]| {
            0.5 * dot(w, w)
                + (0..x.len()).map(|i| cost[i] * (1.0 - y[i] * dot(&x[i], w)).max(0.0)).sum::<f64>()
        };
        let best = primal(&w);
        let norm = dot(&w, &w).sqrt();
        for _ in 0..1000 {
            let u: Vec<f64> = (0..w.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
            let r = rng.random_range(0.0..0.1) * norm / dot(&u, &u).sqrt();
            let trial: Vec<f64> = w.iter().zip(&u).map(|(a, b)| a + r * b).collect();
            beaten += usize::from(primal(&trial) < best - 1e-10 * best.abs());
        }
    }

    let mut worst_grad = 0.0f64;
    for seed in 0..50 {
        let p = problem(2000 + seed, 40);
        let (pos, neg) = p.refs();
        let c = [0.1, 1.0, 10.0][seed as usize % 3];
        let cfg = TrainConfig::logit(c);
        let clf = train_logit(&pos, &neg, &cfg).unwrap();
        let DecisionModel::Linear { weights, bias } = &clf.model else { unreachable!() };
        let mut at: Vec<f64> = weights.clone();
        at.resize(p.d, 0.0);
        at.push(*bias);
        let at: Vec<f64> = at.iter().map(|v| v + rng.random_range(-0.5..0.5)).collect();
        let (x, y, cost) = p.dense(c);
        let f = |w: &[f64]| {
            dot(w, w) / (2.0 * c)
                + (0..x.len()).map(|i| cost[i] * (1.0 + (-y[i] * dot(&x[i], w)).exp()).ln()).sum::<f64>()
        };
        let objective = LogisticObjective::new(&pos, &neg, &cfg);
        let g = objective.gradient(&at);
        let h = 1e-5;
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..at.len() {
            let (mut up, mut down) = (at.clone(), at.clone());
            up[k] += h;
            down[k] -= h;
            err = err.max((g[k] - (f(&up) - f(&down)) / (2.0 * h)).abs());
            scale = scale.max(g[k].abs());
        }
        worst_grad = worst_grad.max(err / scale);
    }

    let mut worst_path = 0.0f64;
    for seed in 0..20 {
        let p = problem(3000 + seed, 50);
        let (pos, neg) = p.refs();
        let cfg = TrainConfig::svm(1.0).with_tolerance(1e-10);
        let a = fit_svm(&pos, &neg, &cfg, SolverPath::PrimalWeights).unwrap();
        let b = fit_svm(&pos, &neg, &cfg, SolverPath::KernelExpansion).unwrap();
        for v in p.pos.iter().chain(&p.neg) {
            worst_path = worst_path.max((a.classifier.decision(v) - b.classifier.decision(v)).abs());
        }
    }
    report.check(
        "6",
        "solver correctness",
        worst_kkt <= 1e-9 && unconverged == 0 && beaten == 0 && worst_grad < 1e-4 && worst_path < 1e-6,
        format!(
            "{runs} SVM runs, worst KKT excess over tolerance {worst_kkt:.1e}, {unconverged} unconverged; \
             {beaten} of 50000 perturbations beat the primal; logistic gradient rel. error {worst_grad:.1e}; \
             fast vs expansion path {worst_path:.1e}"
        ),
    );
}

// ---------------------------------------------------------------- 7

fn algorithm_compliance(report: &mut Report) {
    let mut rng = rng::seeded(99);
    let mut violations = 0;
    let mut checked = 0usize;
    let (mut dev_sum, mut var_sum) = (0.0, 0.0);
    for config in 0..100u64 {
        let n_pos = rng.random_range(2..8);
        let n_unl = rng.random_range(8..60);
        let sampling = if rng.random_bool(0.5) { Sampling::WithReplacement } else { Sampling::WithoutReplacement };
        let k = rng.random_range(1..=n_unl);
        let t = rng.random_range(1..25);
        let sim = SimConfig {
            dim: 5,
            n_pos,
            n_unlabeled: n_unl,
            n_test: 2,
            ..SimConfig::standard(0.3, config)
        };
        let data = generate_gaussian_pu(&sim).unwrap();
        let learner = if config % 2 == 0 { Learner::Svm } else { Learner::Logit };
        let cfg = BaggingConfig::new(learner, TrainConfig::for_learner(learner, 1.0))
            .with_subsample_size(k)
            .with_bootstraps(t)
            .with_sampling(sampling)
            .with_seed(config);
        let (score, trace) = bagging_transductive_traced(&data.train, &data.split, &cfg, &Rayon).unwrap();
        for (u, item) in score.items.iter().enumerate() {
            if item.fallback {
                continue;
            }
            checked += 1;
            let trained_on = |b: usize| score.bootstraps[b].subsample.contains(&u);
            let bad_member = trace.contributors[u].iter().any(|&b| trained_on(b));
            let missing = (0..t).filter(|&b| !trained_on(b)).count() != item.count;
            let direct = trace.contributors[u].iter().map(|&b| trace.decisions[b][u]).sum::<f64>()
                / item.count as f64;
            if bad_member || missing || (direct - item.score).abs() > 1e-12 {
                violations += 1;
            }
        }
        let p = match sampling {
            Sampling::WithoutReplacement => 1.0 - k as f64 / n_unl as f64,
            Sampling::WithReplacement => (1.0 - 1.0 / n_unl as f64).powi(k as i32),
        };
        let total: usize = score.items.iter().map(|s| s.count).sum();
        dev_sum += total as f64 - n_unl as f64 * t as f64 * p;
        var_sum += n_unl as f64 * t as f64 * p * (1.0 - p);
    }
    let z = if var_sum > 0.0 { dev_sum / var_sum.sqrt() } else { 0.0 };
    report.check(
        "7",
        "transductive exclusion rule",
        violations == 0 && z.abs() <= 3.0,
        format!("{violations} violations over {checked} scored items in 100 configs; pooled n(x) deviation {z:+.2} sd"),
    );
}

// ---------------------------------------------------------------- 8

fn sweep_bytes<E: Executor + Sync>(cfg: &ExperimentConfig, exec: &E) -> Vec<u8> {
    let mut sink = JsonLines::new(Vec::new());
    run(cfg, exec, &mut sink).unwrap();
    sink.into_inner()
}

fn reproducibility(report: &mut Report) {
    let mut bag = MethodSpec::new("bagging", MethodKind::Bagging, Learner::Svm, 1.0);
    bag.bootstraps = Some(30);
    let mut bag_rbf = MethodSpec::new("bagging_rbf", MethodKind::Bagging5, Learner::Svm, 1.0);
    bag_rbf.kernel = Kernel::Rbf { sigma: 8.0 };
    bag_rbf.bootstraps = Some(10);
    let mut biased = MethodSpec::new("biased", MethodKind::Biased, Learner::Logit, 1.0);
    biased.grid_search = true;
    let mut cfg = config(ExperimentKind::MethodCompare, SimSpec::default(), vec![bag, bag_rbf, biased], 8, 31);
    cfg.sweep.contamination = vec![0.1, 0.5];
    let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let seq = sweep_bytes(&cfg, &Sequential);
    let par = pool.install(|| sweep_bytes(&cfg, &Rayon));

    let data = generate_gaussian_pu(&SimConfig::standard(0.3, 3)).unwrap();
    let bcfg = BaggingConfig::new(Learner::Svm, TrainConfig::svm(1.0)).with_bootstraps(40).with_seed(8);
    let scores = |exec: &dyn Fn(&Dataset, &PuSplit) -> Vec<u8>| exec(&data.train, &data.split);
    let seq_scores = scores(&|d, s| {
        let mut out = Vec::new();
        formats::write_scores(&bagging_transductive(d, s, &bcfg, &Sequential).unwrap(), 5, &mut out).unwrap();
        out
    });
    let par_scores = scores(&|d, s| {
        let mut out = Vec::new();
        let score = pool.install(|| bagging_transductive(d, s, &bcfg, &Rayon).unwrap());
        formats::write_scores(&score, 5, &mut out).unwrap();
        out
    });
    report.check(
        "8",
        "byte-identical results, sequential vs parallel",
        seq == par && !seq.is_empty() && seq_scores == par_scores,
        format!(
            "compare run {} bytes on {} threads, score file {} bytes",
            seq.len(),
            pool.current_num_threads(),
            seq_scores.len()
        ),
    );
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    simulation(&mut report);
    contamination_diagnostics(&mut report);
    timing(&mut report);
    metric_oracles(&mut report);
    solver_correctness(&mut report);
    algorithm_compliance(&mut report);
    reproducibility(&mut report);
    if report.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", report.failures);
        ExitCode::FAILURE
    }
}
