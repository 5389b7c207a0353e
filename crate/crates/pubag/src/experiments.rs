//! Experiment runners: sweeps, method comparison and timing.
//!
//! Every run is a list of data cells (a contamination level for synthetic
//! data, or a task and `|P|` for files) crossed with method cells (a method,
//! possibly at a swept `K` or `T`). Replicates of a data cell run through the
//! executor; records are emitted ordered by cell, then replicate.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::time::Instant;

use pubag_core::classifiers::{train, Learner};
use pubag_core::data::{generate_gaussian_pu, make_pu_split, Dataset, PuSplit, SparseVec};
use pubag_core::eval::{
    self, default_c_grid, grid_search, kfold_by_key, median, wilcoxon_paired, FoldPlan, PrCurve,
};
use pubag_core::pu::{
    bagging_inductive, bagging_transductive, biased_baseline, mean_similarity_baseline,
    speedup_threshold, Executor, Sequential,
};
use pubag_core::rng;

use crate::config::{DataSource, ExperimentConfig, ExperimentKind, MethodKind, MethodSpec};
use crate::error::{Error, Result};
use crate::exec::Parallelism;
use crate::records::{
    Line, MacroSummary, Provenance, ResultRecord, Sink, Status, ThresholdRecord, TimingSummary,
    WilcoxonSummary,
};
use crate::svmlight;

/// One point of the data axis.
#[derive(Clone, Debug)]
struct DataCell {
    gamma: Option<f64>,
    task: Option<usize>,
    n_positives: Option<usize>,
}

/// One method at one swept setting.
#[derive(Clone, Copy, Debug)]
struct MethodCell {
    method: usize,
    k: Option<usize>,
    t: Option<usize>,
}

/// Training data of one replicate, with a held-out test set for synthetic data.
struct Instance<'a> {
    ds: Cow<'a, Dataset>,
    split: PuSplit,
    test: Option<Dataset>,
}

#[derive(Debug, Default)]
struct Outcome {
    auc: Option<f64>,
    aupr: Option<f64>,
    k: Option<usize>,
    t: Option<usize>,
    c: Option<f64>,
    flagged: Option<usize>,
    seconds: Option<f64>,
}

struct Tasks {
    names: Vec<String>,
    data: Vec<Dataset>,
}

fn load_tasks(cfg: &ExperimentConfig) -> Result<Option<Tasks>> {
    let DataSource::Files { tasks } = &cfg.data else {
        return Ok(None);
    };
    let mut out = Tasks {
        names: Vec::new(),
        data: Vec::new(),
    };
    for t in tasks {
        let ds = svmlight::load_with_groups(&t.path, t.groups.as_deref())?;
        if ds.labels().is_none() {
            return Err(Error::Config(format!(
                "task {} has no ground-truth labels",
                t.name
            )));
        }
        out.names.push(t.name.clone());
        out.data.push(ds);
    }
    Ok(Some(out))
}

fn data_cells(cfg: &ExperimentConfig, tasks: Option<&Tasks>) -> Vec<DataCell> {
    match (&cfg.data, tasks) {
        (_, Some(tasks)) => (0..tasks.data.len())
            .flat_map(|task| {
                cfg.sweep.n_positives.iter().map(move |&np| DataCell {
                    gamma: None,
                    task: Some(task),
                    n_positives: Some(np),
                })
            })
            .collect(),
        (DataSource::Synthetic(spec), None) => {
            let gammas = if cfg.sweep.contamination.is_empty() {
                vec![spec.contamination]
            } else {
                cfg.sweep.contamination.clone()
            };
            gammas
                .into_iter()
                .map(|g| DataCell {
                    gamma: Some(g),
                    task: None,
                    n_positives: None,
                })
                .collect()
        }
        (DataSource::Files { .. }, None) => Vec::new(),
    }
}

fn method_cells(cfg: &ExperimentConfig) -> Vec<MethodCell> {
    let mut cells = Vec::new();
    for (method, spec) in cfg.methods.iter().enumerate() {
        let base = MethodCell {
            method,
            k: None,
            t: None,
        };
        let swept = spec.method.is_bagging();
        match cfg.kind {
            ExperimentKind::SimSweep | ExperimentKind::KSweep
                if swept && !cfg.sweep.subsample_sizes.is_empty() =>
            {
                cells.extend(cfg.sweep.subsample_sizes.iter().map(|&k| MethodCell {
                    k: Some(k),
                    ..base
                }));
            }
            ExperimentKind::TSweep if swept && !cfg.sweep.bootstraps.is_empty() => {
                cells.extend(cfg.sweep.bootstraps.iter().map(|&t| MethodCell {
                    t: Some(t),
                    ..base
                }));
            }
            _ => cells.push(base),
        }
    }
    cells
}

fn instance<'a>(
    cfg: &ExperimentConfig,
    tasks: Option<&'a Tasks>,
    cell: &DataCell,
    seed: u64,
) -> Result<Instance<'a>> {
    match (&cfg.data, tasks, cell.task) {
        (DataSource::Synthetic(spec), _, _) => {
            let sim = generate_gaussian_pu(&spec.to_config(cell.gamma.unwrap_or(0.0), seed))?;
            Ok(Instance {
                ds: Cow::Owned(sim.train),
                split: sim.split,
                test: Some(sim.test),
            })
        }
        (_, Some(tasks), Some(task)) => {
            let ds = &tasks.data[task];
            let split = make_pu_split(ds, cell.n_positives.unwrap_or(1), seed)?;
            Ok(Instance {
                ds: Cow::Borrowed(ds),
                split,
                test: None,
            })
        }
        _ => Err(Error::Config("no data for cell".into())),
    }
}

/// Scores to evaluate and their hidden truth.
fn evaluation_rows<'b>(inst: &'b Instance) -> Result<(Vec<&'b SparseVec>, Vec<bool>)> {
    match &inst.test {
        Some(test) => {
            let all: Vec<usize> = (0..test.n_items()).collect();
            let truth = test
                .truth_of(&all)
                .ok_or_else(|| Error::Config("test set lacks labels".into()))?;
            Ok((test.rows().iter().collect(), truth))
        }
        None => {
            let u = inst.split.unlabeled();
            let truth = inst
                .ds
                .truth_of(u)
                .ok_or_else(|| Error::Config("unlabeled items lack ground truth".into()))?;
            Ok((inst.ds.select(u), truth))
        }
    }
}

/// Fits the method on `split` and scores `rows`. `transductive` scores the
/// unlabeled items of `split` themselves (rows must then be exactly `U`).
#[allow(clippy::too_many_arguments)]
fn fit_and_score<E: Executor + Sync>(
    ds: &Dataset,
    split: &PuSplit,
    rows: &[&SparseVec],
    transductive: bool,
    spec: &MethodSpec,
    mc: MethodCell,
    c: f64,
    seed: u64,
    exec: &E,
    out: &mut Outcome,
) -> Result<Vec<f64>> {
    let n_pos = split.positives().len();
    match spec.method {
        MethodKind::MeanSimilarity => {
            let start = Instant::now();
            let scores = mean_similarity_baseline(&ds.select(split.positives()), rows, spec.kernel);
            out.seconds = Some(start.elapsed().as_secs_f64());
            Ok(scores)
        }
        MethodKind::Biased => {
            let cfg = spec.train_config(c);
            out.c = Some(c);
            if transductive {
                let start = Instant::now();
                let fit = biased_baseline(ds, split, spec.learner, &cfg)?;
                out.seconds = Some(start.elapsed().as_secs_f64());
                Ok(fit.scores)
            } else {
                let start = Instant::now();
                let clf = train(
                    spec.learner,
                    &ds.select(split.positives()),
                    &ds.select(split.unlabeled()),
                    &cfg,
                )?;
                out.seconds = Some(start.elapsed().as_secs_f64());
                Ok(rows.iter().map(|x| clf.decision(x)).collect())
            }
        }
        _ => {
            let k = mc.k.unwrap_or_else(|| spec.subsample_size(n_pos));
            let bag_cfg = spec.bagging_config(c, k, mc.t, seed);
            let (k, t) = bag_cfg.resolve(n_pos, split.unlabeled().len())?;
            out.k = Some(k);
            out.t = Some(t);
            out.c = Some(c);
            if transductive {
                let start = Instant::now();
                let score = bagging_transductive(ds, split, &bag_cfg, exec)?;
                out.seconds = Some(start.elapsed().as_secs_f64());
                out.flagged = Some(score.flagged().len());
                Ok(score.scores())
            } else {
                let start = Instant::now();
                let bag = bagging_inductive(ds, split, &bag_cfg, exec)?;
                out.seconds = Some(start.elapsed().as_secs_f64());
                Ok(rows.iter().map(|x| bag.decision(x)).collect())
            }
        }
    }
}

/// Picks `C` by grouped cross-validation over `P` and `U`: each fold trains on
/// the remaining positives and unlabeled items and is scored by how well it
/// ranks its held-out positives above its held-out unlabeled items.
fn select_c<E: Executor + Sync>(
    inst: &Instance,
    spec: &MethodSpec,
    mc: MethodCell,
    seed: u64,
    exec: &E,
) -> Result<f64> {
    let ds = inst.ds.as_ref();
    let pos = inst.split.positives();
    let unl = inst.split.unlabeled();
    let items: Vec<usize> = pos.iter().chain(unl).copied().collect();
    let keys: Vec<String> = match ds.groups() {
        Some(g) => items.iter().map(|&i| g[i].clone()).collect(),
        None => items.iter().map(|i| format!("#{i}")).collect(),
    };
    // Groups holding a positive are spread over the folds first, so every fold
    // keeps some positives.
    let has_pos: BTreeSet<&str> = keys[..pos.len()].iter().map(String::as_str).collect();
    let (with_pos, without): (Vec<usize>, Vec<usize>) =
        (0..items.len()).partition(|&j| has_pos.contains(keys[j].as_str()));
    let k = spec.cv_folds;
    let mut assignments = vec![0; items.len()];
    for (part, salt) in [(&with_pos, 2), (&without, 3)] {
        if part.is_empty() {
            continue;
        }
        let part_keys: Vec<&str> = part.iter().map(|&j| keys[j].as_str()).collect();
        let plan = kfold_by_key(&part_keys, k, rng::derive(seed, salt))?;
        for (&j, &f) in part.iter().zip(&plan.assignments) {
            assignments[j] = f;
        }
    }
    let plan = FoldPlan {
        k,
        assignments,
        grouped: ds.groups().is_some(),
    };
    let grid = spec.c_grid.clone().unwrap_or_else(default_c_grid);
    let is_pos = |j: usize| j < pos.len();
    let search = grid_search(&grid, &plan, |c, train_idx, test_idx| {
        let split = PuSplit::new(
            train_idx.iter().filter(|&&j| is_pos(j)).map(|&j| items[j]).collect(),
            train_idx.iter().filter(|&&j| !is_pos(j)).map(|&j| items[j]).collect(),
            ds.n_items(),
        )?;
        let rows: Vec<&SparseVec> = test_idx.iter().map(|&j| ds.row(items[j])).collect();
        let labels: Vec<bool> = test_idx.iter().map(|&j| is_pos(j)).collect();
        let scores = fit_and_score(
            ds,
            &split,
            &rows,
            false,
            spec,
            mc,
            c,
            seed,
            exec,
            &mut Outcome::default(),
        )
        .map_err(|e| match e {
            Error::Core(c) => c,
            other => pubag_core::Error::InvalidConfig(other.to_string()),
        })?;
        eval::auc(&scores, &labels)
    })?;
    search
        .best
        .ok_or_else(|| Error::Config("grid search: every C failed".into()))
}

fn evaluate<E: Executor + Sync>(
    inst: &Instance,
    spec: &MethodSpec,
    mc: MethodCell,
    seed: u64,
    exec: &E,
) -> Result<Outcome> {
    let c = if spec.grid_search && spec.method != MethodKind::MeanSimilarity {
        select_c(inst, spec, mc, seed, exec)?
    } else {
        spec.c
    };
    let (rows, truth) = evaluation_rows(inst)?;
    let mut out = Outcome::default();
    let scores = fit_and_score(
        &inst.ds,
        &inst.split,
        &rows,
        inst.test.is_none(),
        spec,
        mc,
        c,
        seed,
        exec,
        &mut out,
    )?;
    out.auc = Some(eval::auc(&scores, &truth)?);
    let pr: PrCurve = eval::precision_recall(&scores, &truth)?;
    out.aupr = Some(pr.aupr);
    Ok(out)
}

struct Runner<'a, E> {
    cfg: &'a ExperimentConfig,
    provenance: Provenance,
    tasks: Option<Tasks>,
    exec: &'a E,
}

impl<E: Executor + Sync> Runner<'_, E> {
    fn record(
        &self,
        cell: usize,
        dc: &DataCell,
        mc: MethodCell,
        replicate: usize,
        inst: Option<&Instance>,
        result: Result<Outcome>,
    ) -> ResultRecord {
        let spec = &self.cfg.methods[mc.method];
        let (status, error, o) = match result {
            Ok(o) => (Status::Ok, None, o),
            Err(e @ Error::Core(pubag_core::Error::NotEnoughPositives { .. })) => {
                (Status::Skipped, Some(e.to_string()), Outcome::default())
            }
            Err(e) => (Status::Failed, Some(e.to_string()), Outcome::default()),
        };
        ResultRecord {
            provenance: self.provenance.clone(),
            cell,
            replicate,
            replicate_seed: rng::derive(self.cfg.seed, replicate as u64),
            method: spec.id.clone(),
            learner: spec.learner,
            task: dc
                .task
                .map(|t| self.tasks.as_ref().map_or(String::new(), |ts| ts.names[t].clone())),
            gamma: dc.gamma,
            n_positives: inst
                .map(|i| i.split.positives().len())
                .or(dc.n_positives)
                .unwrap_or(0),
            n_unlabeled: inst.map_or(0, |i| i.split.unlabeled().len()),
            k: o.k.or(mc.k),
            t: o.t.or(mc.t),
            c: o.c,
            status,
            error,
            auc: o.auc,
            aupr: o.aupr,
            contamination: inst.and_then(|i| i.split.contamination(&i.ds)),
            flagged: o.flagged,
            seconds: (self.cfg.kind == ExperimentKind::Timing)
                .then_some(o.seconds)
                .flatten(),
        }
    }

    /// All records of one data cell, ordered by method cell then replicate.
    fn run_data_cell(
        &self,
        d: usize,
        dc: &DataCell,
        mcs: &[MethodCell],
        outer: &impl Executor,
        inner: &(impl Executor + Sync),
    ) -> Vec<ResultRecord> {
        let per_replicate: Vec<Vec<ResultRecord>> = outer.run(self.cfg.replicates, |r| {
            let seed = rng::derive(self.cfg.seed, r as u64);
            let method_seed = rng::derive(seed, 1);
            let inst = instance(self.cfg, self.tasks.as_ref(), dc, seed);
            mcs.iter()
                .enumerate()
                .map(|(m, &mc)| {
                    let cell = d * mcs.len() + m;
                    match &inst {
                        Ok(inst) => {
                            let spec = &self.cfg.methods[mc.method];
                            let outcome = evaluate(inst, spec, mc, method_seed, inner);
                            self.record(cell, dc, mc, r, Some(inst), outcome)
                        }
                        Err(e) => self.record(cell, dc, mc, r, None, Err(clone_error(e))),
                    }
                })
                .collect()
        });
        let mut ordered = Vec::with_capacity(mcs.len() * self.cfg.replicates);
        for m in 0..mcs.len() {
            for rep in &per_replicate {
                ordered.push(rep[m].clone());
            }
        }
        ordered
    }
}

fn clone_error(e: &Error) -> Error {
    match e {
        Error::Core(c) => Error::Core(c.clone()),
        other => Error::Config(other.to_string()),
    }
}

/// Runs `cfg` and sends every record to `sink` as soon as its data cell is done.
pub fn run<E: Executor + Sync, S: Sink>(cfg: &ExperimentConfig, exec: &E, sink: &mut S) -> Result<()> {
    cfg.validate()?;
    let tasks = load_tasks(cfg)?;
    let runner = Runner {
        cfg,
        provenance: Provenance {
            experiment: cfg.kind,
            config_hash: cfg.hash(),
            seed: cfg.seed,
        },
        tasks,
        exec,
    };
    let dcs = data_cells(cfg, runner.tasks.as_ref());
    let mcs = method_cells(cfg);
    let mut results = Vec::new();
    for (d, dc) in dcs.iter().enumerate() {
        let records = if cfg.kind == ExperimentKind::Timing {
            // timed fits must not share the machine with each other
            let inner = if cfg.timing.parallel_bootstraps {
                Parallelism::Rayon
            } else {
                Parallelism::Sequential
            };
            runner.run_data_cell(d, dc, &mcs, &Sequential, &inner)
        } else {
            runner.run_data_cell(d, dc, &mcs, runner.exec, runner.exec)
        };
        for r in records {
            sink.emit(&Line::Result(r.clone()))?;
            results.push(r);
        }
    }
    match cfg.kind {
        ExperimentKind::MethodCompare => {
            for line in compare_summaries(cfg, &runner.provenance, &results) {
                sink.emit(&line)?;
            }
        }
        ExperimentKind::Timing => {
            for line in timing_summaries(cfg, &runner.provenance, &results) {
                sink.emit(&line)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Runs with the executor the config asks for.
pub fn run_configured<S: Sink>(cfg: &ExperimentConfig, sink: &mut S) -> Result<()> {
    let exec = if cfg.parallel {
        Parallelism::Rayon
    } else {
        Parallelism::Sequential
    };
    run(cfg, &exec, sink)
}

fn ok_auc(r: &ResultRecord) -> Option<f64> {
    (r.status == Status::Ok).then_some(r.auc).flatten()
}

fn distinct<T: PartialEq + Clone>(values: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Macro means per `(|P|, method)` and pairwise Wilcoxon tests over paired
/// (task, replicate) AUCs. The data key is the task for files and the
/// contamination level for synthetic data.
fn compare_summaries(cfg: &ExperimentConfig, prov: &Provenance, results: &[ResultRecord]) -> Vec<Line> {
    let methods: Vec<String> = distinct(results.iter().map(|r| r.method.clone()));
    let nps: Vec<usize> = match cfg.data {
        DataSource::Files { .. } => cfg.sweep.n_positives.clone(),
        DataSource::Synthetic(_) => distinct(results.iter().map(|r| r.n_positives)),
    };
    let key = |r: &ResultRecord| match &r.task {
        Some(t) => t.clone(),
        None => format!("{:?}", r.gamma),
    };
    let mut lines = Vec::new();
    for &np in &nps {
        let at_np: Vec<&ResultRecord> = results.iter().filter(|r| r.n_positives == np).collect();
        let data_keys = distinct(at_np.iter().map(|r| key(r)));
        for m in &methods {
            let per_task: Vec<f64> = data_keys
                .iter()
                .filter_map(|k| {
                    let aucs: Vec<f64> = at_np
                        .iter()
                        .filter(|r| &r.method == m && &key(r) == k)
                        .filter_map(|r| ok_auc(r))
                        .collect();
                    (!aucs.is_empty()).then(|| eval::mean(&aucs))
                })
                .collect();
            if !per_task.is_empty() {
                lines.push(Line::Summary(MacroSummary {
                    provenance: prov.clone(),
                    n_positives: np,
                    method: m.clone(),
                    macro_auc: eval::mean(&per_task),
                    n_tasks: per_task.len(),
                }));
            }
        }
        for (i, a) in methods.iter().enumerate() {
            for b in &methods[i + 1..] {
                let (mut xa, mut xb) = (Vec::new(), Vec::new());
                for ra in at_np.iter().filter(|r| &r.method == a) {
                    let paired = at_np.iter().find(|rb| {
                        &rb.method == b && key(rb) == key(ra) && rb.replicate == ra.replicate
                    });
                    if let (Some(x), Some(y)) = (ok_auc(ra), paired.and_then(|rb| ok_auc(rb))) {
                        xa.push(x);
                        xb.push(y);
                    }
                }
                let mut summary = WilcoxonSummary {
                    provenance: prov.clone(),
                    n_positives: np,
                    method_a: a.clone(),
                    method_b: b.clone(),
                    n_pairs: xa.len(),
                    n_used: None,
                    w_plus: None,
                    z: None,
                    p_value: None,
                    error: None,
                };
                match wilcoxon_paired(&xa, &xb) {
                    Ok(w) => {
                        summary.n_used = Some(w.n_used);
                        summary.w_plus = Some(w.w_plus);
                        summary.z = Some(w.z);
                        summary.p_value = Some(w.p_value);
                    }
                    Err(e) => summary.error = Some(e.to_string()),
                }
                lines.push(Line::Wilcoxon(summary));
            }
        }
    }
    lines
}

fn timing_summaries(cfg: &ExperimentConfig, prov: &Provenance, results: &[ResultRecord]) -> Vec<Line> {
    let mut lines = Vec::new();
    let cells = distinct(results.iter().map(|r| r.cell));
    for cell in cells {
        let rows: Vec<&ResultRecord> = results
            .iter()
            .filter(|r| r.cell == cell && r.status == Status::Ok)
            .collect();
        let Some(first) = rows.first() else { continue };
        let seconds: Vec<f64> = rows.iter().filter_map(|r| r.seconds).collect();
        let aucs: Vec<f64> = rows.iter().filter_map(|r| r.auc).collect();
        lines.push(Line::Timing(TimingSummary {
            provenance: prov.clone(),
            method: first.method.clone(),
            k: first.k,
            t: first.t,
            n_positives: first.n_positives,
            n_unlabeled: first.n_unlabeled,
            median_seconds: median(&seconds),
            median_auc: (!aucs.is_empty()).then(|| median(&aucs)),
            replicates: rows.len(),
        }));
        if let Some(t) = first.t {
            for &alpha in &cfg.timing.alphas {
                lines.push(Line::Threshold(ThresholdRecord {
                    provenance: prov.clone(),
                    method: first.method.clone(),
                    t,
                    alpha,
                    threshold: speedup_threshold(t as f64, alpha),
                    ratio: first.n_unlabeled as f64 / first.n_positives as f64,
                }));
            }
        }
    }
    lines
}

/// The learner named on the command line for one-shot scoring.
pub fn learner_from_name(name: &str) -> Result<Learner> {
    match name {
        "svm" => Ok(Learner::Svm),
        "logit" => Ok(Learner::Logit),
        other => Err(Error::Config(format!("unknown learner {other:?}"))),
    }
}
