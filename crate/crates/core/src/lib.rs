//! Extraction of true frequent itemsets from transactional data with a
//! bounded family-wise error rate.
//!
//! A dataset is treated as an i.i.d. sample from an unknown distribution
//! over transactions, and the goal is to report itemsets whose probability
//! of appearing in a fresh transaction is at least a threshold theta, such
//! that with probability at least 1 - delta no reported itemset falls below
//! it. Two distribution-free methods are provided, both driven by
//! (empirical) VC-dimension bounds on the range set of candidate itemsets; a
//! Set-Union Knapsack solver supplies the bounds for candidate collections.
//! Binomial-test baselines (Bonferroni over all itemsets, holdout) and a
//! ground-truth experiment harness round out the library.
//!
//! Modules:
//! - [`dataset`]: transaction data model, FIMI I/O, splitting, enlargement,
//!   d-index and length profile
//! - [`fim`]: exact frequent-itemset mining, frequency bands, negative
//!   border
//! - [`vcbounds`]: epsilon-approximation accuracies from dimension bounds
//! - [`sukp`]: Set-Union Knapsack solvers and dimension bounds from their
//!   optima
//! - [`tfi`]: the split-dataset and full-dataset extraction methods
//! - [`baselines`]: Binomial tail test, Bonferroni and holdout comparisons
//! - [`harness`]: ground-truth models, seeded trials, scoring, CSV output

// Parameter guards are written as !(x > 0.0) so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod dataset;
mod error;
pub mod fim;
pub mod harness;
mod itemset;
pub mod sukp;
pub mod tfi;
pub mod vcbounds;

pub use error::{Error, Result};
pub use itemset::{Item, Itemset};
