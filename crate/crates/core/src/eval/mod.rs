//! Ranking metrics, cross-validation helpers and paired significance testing.

mod folds;
mod grid;
mod metrics;
mod stats;

pub use folds::{grouped_kfold, kfold_by_key, FoldPlan};
pub use grid::{default_c_grid, grid_search, GridCell, GridSearch};
pub use metrics::{auc, precision_recall, roc_curve, MetricsReport, PrCurve, PrPoint};
pub use stats::{
    mean, median, midranks, normal_cdf, pearson, spearman, std_dev, wilcoxon_paired, Wilcoxon,
};
