use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::folds::FoldPlan;
use crate::error::{Error, Result};

/// `C` in `exp(-12), exp(-10), ..., exp(2)`.
pub fn default_c_grid() -> Vec<f64> {
    (-6..=1).map(|k| libm::exp(2.0 * k as f64)).collect()
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridCell {
    pub c: f64,
    pub fold_scores: Vec<f64>,
    /// Mean over folds; `None` when the cell failed.
    pub mean_score: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSearch {
    pub cells: Vec<GridCell>,
    /// Best `C`; ties go to the smaller value. `None` if every cell failed.
    pub best: Option<f64>,
}

/// Cross-validated search over `grid`. `evaluate(c, train, test)` scores one
/// fold; an error fails only the cell it happened in.
pub fn grid_search<F>(grid: &[f64], folds: &FoldPlan, mut evaluate: F) -> Result<GridSearch>
where
    F: FnMut(f64, &[usize], &[usize]) -> Result<f64>,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut cells = Vec::with_capacity(grid.len());
    for &c in grid {
        let mut fold_scores = Vec::with_capacity(folds.k);
        let mut failure = None;
        for fold in 0..folds.k {
            match evaluate(c, &folds.train_items(fold), &folds.test_items(fold)) {
                Ok(score) => fold_scores.push(score),
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        let mean_score = failure
            .is_none()
            .then(|| fold_scores.iter().sum::<f64>() / fold_scores.len() as f64);
        cells.push(GridCell {
            c,
            fold_scores,
            mean_score,
            failure,
        });
    }
    let best = cells
        .iter()
        .filter_map(|cell| cell.mean_score.map(|m| (m, cell.c)))
        .fold(None, |best: Option<(f64, f64)>, (m, c)| match best {
            Some((bm, bc)) if bm > m || (bm == m && bc <= c) => Some((bm, bc)),
            _ => Some((m, c)),
        })
        .map(|(_, c)| c);
    Ok(GridSearch { cells, best })
}
