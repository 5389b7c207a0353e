//! Bagging meta-algorithms for learning from positive and unlabeled (PU) examples.
//!
//! The crate is `no_std` and only needs `alloc`. It contains every piece of the
//! learning pipeline that is pure computation:
//!
//! * [`data`]: sparse datasets, PU splits and the Gaussian PU simulator.
//! * [`classifiers`]: asymmetric-cost SVM (dual coordinate descent) and
//!   class-weighted logistic regression, the base learners.
//! * [`pu`]: inductive and transductive bagging, the biased baseline, the
//!   mean-similarity ranker and subsample contamination diagnostics.
//! * [`eval`]: ROC/PR metrics, grouped folds, grid search and the Wilcoxon
//!   signed-rank test.
//!
//! File formats, parallel execution, timing and the experiment runner live in
//! the `pubag` companion crate.

#![cfg_attr(not(test), no_std)]
#![warn(rust_2018_idioms)]

extern crate alloc;

pub mod classifiers;
pub mod data;
pub mod error;
pub mod eval;
pub mod pu;
pub mod rng;

pub use error::{Error, Result};
