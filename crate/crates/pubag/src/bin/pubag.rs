use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pubag::config::{ExperimentConfig, ExperimentKind, MethodKind, MethodSpec, Overrides};
use pubag::exec::Parallelism;
use pubag::experiments::{learner_from_name, run_configured};
use pubag::records::JsonLines;
use pubag::{formats, svmlight, Error, Result};
use pubag_core::classifiers::Kernel;
use pubag_core::data::{Dataset, Label, PuSplit};
use pubag_core::eval::{precision_recall, MetricsReport};
use pubag_core::pu::{bagging_transductive, Aggregation, Sampling};

#[derive(Parser)]
#[command(name = "pubag", version, about = "Bagging for positive-unlabeled learning")]
struct Cli {
    /// Base seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; results are appended. Defaults to the config's output or stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Experiment config (TOML).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Number of replicates; overrides the config file.
    #[arg(long)]
    replicates: Option<usize>,
    /// Run everything on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct ScoreArgs {
    /// Known positives (svmlight; labels are ignored).
    #[arg(long)]
    positives: PathBuf,
    /// Unlabeled items (svmlight). Labels other than 0 are used as ground
    /// truth for the optional metrics.
    #[arg(long)]
    unlabeled: PathBuf,
    #[arg(long, default_value = "svm")]
    learner: String,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Subsample size K; defaults to the number of positives.
    #[arg(long)]
    k: Option<usize>,
    /// Number of bootstraps T; defaults to the K-dependent rule.
    #[arg(long)]
    t: Option<usize>,
    /// Use an RBF kernel of this width.
    #[arg(long)]
    rbf_sigma: Option<f64>,
    #[arg(long)]
    with_replacement: bool,
    #[arg(long)]
    majority_vote: bool,
    /// Write ranking metrics against the unlabeled file's labels (JSON).
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Write the ROC curve (CSV).
    #[arg(long)]
    roc_csv: Option<PathBuf>,
    /// Write the precision-recall curve (CSV).
    #[arg(long)]
    pr_csv: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Contamination x K sweep on simulated data.
    SimSweep(RunArgs),
    /// Sweep over the subsample size K.
    KSweep(RunArgs),
    /// Sweep over the number of bootstraps T.
    TSweep(RunArgs),
    /// Compare methods over tasks and |P| with Wilcoxon tests.
    Compare(RunArgs),
    /// Wall-clock timing of bagging against the biased fit.
    Timing(RunArgs),
    /// Transductive bagging scores for a positive and an unlabeled file.
    Score(ScoreArgs),
}

fn experiment(cli: &Cli, kind: ExperimentKind, args: &RunArgs) -> Result<()> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config(format!("{} needs --config", kind.verb())))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if cfg.kind != kind {
        return Err(Error::Config(format!(
            "config describes {}, not {}",
            cfg.kind.verb(),
            kind.verb()
        )));
    }
    cfg.apply(&Overrides {
        seed: cli.seed,
        output: cli.output.clone(),
        replicates: args.replicates,
        parallel: args.sequential.then_some(false),
    });
    match cfg.output.clone() {
        Some(out) => run_configured(&cfg, &mut JsonLines::append(&out)?),
        None => run_configured(&cfg, &mut JsonLines::new(io::stdout().lock())),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn score_method(cli: &Cli, args: &ScoreArgs) -> Result<MethodSpec> {
    if let Some(path) = &cli.config {
        let cfg = ExperimentConfig::load(path)?;
        return cfg
            .methods
            .into_iter()
            .find(|m| m.method.is_bagging())
            .ok_or_else(|| Error::Config("config has no bagging method".into()));
    }
    let mut spec = MethodSpec::new("bagging", MethodKind::Bagging, learner_from_name(&args.learner)?, args.c);
    spec.subsample_size = args.k;
    spec.bootstraps = args.t;
    if let Some(sigma) = args.rbf_sigma {
        spec.kernel = Kernel::Rbf { sigma };
    }
    if args.with_replacement {
        spec.sampling = Sampling::WithReplacement;
    }
    if args.majority_vote {
        spec.aggregation = Aggregation::MajorityVote;
    }
    Ok(spec)
}

fn score(cli: &Cli, args: &ScoreArgs) -> Result<()> {
    let spec = score_method(cli, args)?;
    let pos = svmlight::load(&args.positives)?;
    let unl = svmlight::load(&args.unlabeled)?;
    let n_pos = pos.n_items();
    let mut rows = pos.rows().to_vec();
    rows.extend_from_slice(unl.rows());
    let mut labels: Vec<Option<Label>> = vec![Some(Label::Positive); n_pos];
    labels.extend((0..unl.n_items()).map(|i| unl.label(i)));
    let ds = Dataset::new(pos.n_features().max(unl.n_features()), rows).with_labels(labels)?;
    let split = PuSplit::new(
        (0..n_pos).collect(),
        (n_pos..ds.n_items()).collect(),
        ds.n_items(),
    )?;
    let k = spec.subsample_size(n_pos);
    let cfg = spec.bagging_config(spec.c, k, None, cli.seed.unwrap_or(0));
    let exec = if args.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Rayon
    };
    let result = bagging_transductive(&ds, &split, &cfg, &exec)?;
    match &cli.output {
        Some(path) => formats::write_scores(&result, n_pos, create(path)?)?,
        None => formats::write_scores(&result, n_pos, io::stdout().lock())?,
    }

    if args.metrics.is_some() || args.roc_csv.is_some() || args.pr_csv.is_some() {
        let truth = ds.truth_of(split.unlabeled()).ok_or_else(|| {
            Error::Config("metrics need a label on every unlabeled item".into())
        })?;
        let scores = result.scores();
        let report = MetricsReport::compute(&scores, &truth)?;
        if let Some(path) = &args.metrics {
            formats::write_metrics(&report, create(path)?)?;
        }
        if let Some(path) = &args.roc_csv {
            formats::write_roc_csv(&report.roc_points, create(path)?)?;
        }
        if let Some(path) = &args.pr_csv {
            formats::write_pr_csv(&precision_recall(&scores, &truth)?, create(path)?)?;
        }
    }
    Ok(())
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    let _ = writeln!(io::stderr(), "{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim(), 2),
    };
    let result = match &cli.command {
        Command::SimSweep(a) => experiment(&cli, ExperimentKind::SimSweep, a),
        Command::KSweep(a) => experiment(&cli, ExperimentKind::KSweep, a),
        Command::TSweep(a) => experiment(&cli, ExperimentKind::TSweep, a),
        Command::Compare(a) => experiment(&cli, ExperimentKind::MethodCompare, a),
        Command::Timing(a) => experiment(&cli, ExperimentKind::Timing, a),
        Command::Score(a) => score(&cli, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), 1),
    }
}
