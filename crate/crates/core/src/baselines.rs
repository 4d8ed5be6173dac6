//! Comparison methods: the exact Binomial tail test, Bonferroni-corrected
//! testing over all itemsets, and the holdout procedure that discovers on an
//! exploratory part and tests on an evaluation part.
//!
//! All p-value work happens on the natural-log scale. Critical values like
//! delta / (2^|I| - 1) underflow linear f64 as soon as the universe has a
//! few hundred items, so the correction count is only ever handled as a log.

use serde::{Deserialize, Serialize};

use crate::dataset::TransactionDataset;
use crate::error::{Error, Result};
use crate::fim::{self, ItemsetCollection};

/// Outcome of one upper-tail Binomial test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialTestResult {
    /// ln P[Bin(n, theta0) >= k]; always <= 0.
    pub log_p_value: f64,
    /// exp(log_p_value); may underflow to 0 in linear scale.
    pub p_value: f64,
    pub k: u64,
    pub n: u64,
    pub theta0: f64,
}

/// Exact upper-tail probability P[Bin(n, theta0) >= k], computed stably in
/// log space. This is the p-value of the one-sided test of the composite
/// null "true frequency < theta0", whose supremum is attained at the
/// boundary.
pub fn binomial_tail_log(k: u64, n: u64, theta0: f64) -> Result<BinomialTestResult> {
    if n == 0 {
        return Err(Error::Parameter("binomial test requires n >= 1".into()));
    }
    if k > n {
        return Err(Error::Parameter(format!(
            "successes k = {k} exceed trials n = {n}"
        )));
    }
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(Error::Parameter(format!(
            "null boundary must be in (0,1), got {theta0}"
        )));
    }

    let log_p_value = if k == 0 {
        0.0
    } else if k == n {
        n as f64 * theta0.ln()
    } else {
        log_tail_sum(k, n, theta0)
    };
    Ok(BinomialTestResult {
        log_p_value,
        p_value: log_p_value.exp(),
        k,
        n,
        theta0,
    })
}

/// Streaming log-sum-exp over the tail terms, walking up from j = k with the
/// term recurrence l_{j+1} = l_j + ln((n-j)/(j+1)) + ln(p/(1-p)). Past the
/// mode the terms decay geometrically, so the walk stops as soon as the
/// remaining geometric mass cannot move the sum.
fn log_tail_sum(k: u64, n: u64, p: f64) -> f64 {
    let log_ratio_p = p.ln() - (-p).ln_1p(); // ln(p/(1-p))
    let mut log_term = ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p();

    // log-sum-exp with a running maximum
    let mut max_log = log_term;
    let mut sum = 1.0f64; // sum of exp(l_j - max_log)
    let mut j = k;
    while j < n {
        let step = ((n - j) as f64 / (j + 1) as f64).ln() + log_ratio_p;
        log_term += step;
        j += 1;
        if log_term > max_log {
            sum = sum * (max_log - log_term).exp() + 1.0;
            max_log = log_term;
        } else {
            sum += (log_term - max_log).exp();
        }
        // Decaying regime: remaining terms are bounded by a geometric series
        // with the current ratio.
        if step < 0.0 {
            let ratio = step.exp();
            let rest_bound = (log_term - max_log).exp() * ratio / (1.0 - ratio);
            if rest_bound < sum * 1e-18 {
                break;
            }
        }
    }
    (max_log + sum.ln()).min(0.0)
}

/// ln C(n, k) by direct product, O(min(k, n-k)).
fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut total = 0.0;
    for i in 1..=k {
        total += ((n - k + i) as f64).ln() - (i as f64).ln();
    }
    total
}

/// ln(2^num_items - 1) without materializing the count.
fn ln_num_itemsets(num_items: u64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let correction = if num_items < 1075 {
        (-(0.5f64.powi(num_items as i32))).ln_1p()
    } else {
        0.0
    };
    num_items as f64 * ln2 + correction
}

/// Bonferroni-corrected Binomial testing over all possible itemsets: mines
/// the frequent itemsets at `theta` and reports those whose tail p-value is
/// at most delta / (2^|I| - 1), compared in log space.
pub fn bonferroni_method(
    ds: &TransactionDataset,
    theta: f64,
    delta: f64,
) -> Result<ItemsetCollection> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    let universe = ds.item_universe();
    if universe.is_empty() {
        return Err(Error::Parameter(
            "bonferroni test requires at least one item".into(),
        ));
    }
    let mined = mine_with_theta_one_allowed(ds, theta)?;
    let n = ds.len() as u64;
    let log_crit = delta.ln() - ln_num_itemsets(universe.len() as u64);

    let mut out = ItemsetCollection::new(Default::default(), ds.len());
    for (itemset, f) in mined.iter() {
        let k = (f * n as f64).round() as u64;
        let test = binomial_tail_log(k, n, theta)?;
        if test.log_p_value <= log_crit {
            out.insert(itemset.clone(), f);
        }
    }
    Ok(out)
}

/// Holdout testing: mines the exploratory part at `theta`, then tests each
/// discovered itemset on the evaluation part with critical value delta / k,
/// where k is the number of discoveries.
pub fn holdout_method(
    ds_e: &TransactionDataset,
    ds_v: &TransactionDataset,
    theta: f64,
    delta: f64,
) -> Result<ItemsetCollection> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    if ds_v.is_empty() {
        return Err(Error::Parameter(
            "holdout requires a nonempty evaluation part".into(),
        ));
    }
    let mined = mine_with_theta_one_allowed(ds_e, theta)?;
    if mined.is_empty() {
        return Ok(ItemsetCollection::new(Default::default(), ds_v.len()));
    }
    let candidates: Vec<_> = mined.itemsets().cloned().collect();
    let freqs_v = fim::frequencies(ds_v, candidates.iter())?;
    let n_v = ds_v.len() as u64;
    let log_crit = delta.ln() - (candidates.len() as f64).ln();

    let mut out = ItemsetCollection::new(Default::default(), ds_v.len());
    for (itemset, f_v) in candidates.into_iter().zip(freqs_v) {
        let k = (f_v * n_v as f64).round() as u64;
        let test = binomial_tail_log(k, n_v, theta)?;
        if test.log_p_value <= log_crit {
            out.insert(itemset, f_v);
        }
    }
    Ok(out)
}

// The comparison methods share theta with the tested null boundary, which
// must stay strictly below 1; theta itself may be 1 for mining.
fn mine_with_theta_one_allowed(ds: &TransactionDataset, theta: f64) -> Result<ItemsetCollection> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Parameter(format!(
            "baseline methods require theta in (0,1), got {theta}"
        )));
    }
    fim::mine_frequent(ds, theta)
}
