//! The two extraction procedures that return itemsets whose true frequency
//! is at least theta with family-wise error rate at most delta: a
//! split-dataset method (explore on one part, test on the other) and a
//! full-dataset method built on the negative border of the candidate band.

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

use crate::dataset::TransactionDataset;
use crate::error::{Error, Result};
use crate::fim::{self, ItemsetCollection};
use crate::itemset::Item;
use crate::sukp::{self, EvcBoundTrace, SolveLimits, SukpBound};
use crate::vcbounds::{EpsilonResult, DEFAULT_VC_CONSTANT};

/// A confidence budget split into the two phases of either method, with
/// (1 - delta_1)(1 - delta_2) >= 1 - delta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaSplit {
    pub delta: f64,
    pub delta_1: f64,
    pub delta_2: f64,
}

impl DeltaSplit {
    /// The symmetric split delta_1 = delta_2 = 1 - sqrt(1 - delta), which
    /// meets the product constraint with equality.
    pub fn symmetric(delta: f64) -> Result<DeltaSplit> {
        check_delta(delta)?;
        let component = 1.0 - (1.0 - delta).sqrt();
        Ok(DeltaSplit {
            delta,
            delta_1: component,
            delta_2: component,
        })
    }

    /// An explicit split; the product constraint is validated.
    pub fn explicit(delta: f64, delta_1: f64, delta_2: f64) -> Result<DeltaSplit> {
        check_delta(delta)?;
        check_delta(delta_1)?;
        check_delta(delta_2)?;
        if (1.0 - delta_1) * (1.0 - delta_2) < (1.0 - delta) - 1e-12 {
            return Err(Error::Parameter(format!(
                "split ({delta_1}, {delta_2}) does not cover delta = {delta}"
            )));
        }
        Ok(DeltaSplit {
            delta,
            delta_1,
            delta_2,
        })
    }
}

/// Symmetric confidence split: delta_1 = delta_2 = 1 - sqrt(1 - delta).
pub fn split_delta(delta: f64) -> Result<DeltaSplit> {
    DeltaSplit::symmetric(delta)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "confidence parameter must be in (0,1), got {delta}"
        )));
    }
    Ok(())
}

/// Tuning knobs shared by both methods.
#[derive(Debug, Clone, PartialEq)]
pub struct TfiConfig {
    /// The universal constant of the VC epsilon bound.
    pub vc_constant: f64,
    /// Explicit (delta_1, delta_2) split; the symmetric rule when absent.
    pub split: Option<(f64, f64)>,
    /// Hard cap on the size of the collection handed to the SUKP solver.
    /// Exceeding it aborts with a diagnostic instead of degrading silently.
    pub max_sukp_collection: usize,
    /// Solver effort cap; past it the bounds fall back to proven estimates.
    pub solve_limits: SolveLimits,
}

impl Default for TfiConfig {
    fn default() -> Self {
        TfiConfig {
            vc_constant: DEFAULT_VC_CONSTANT,
            split: None,
            max_sukp_collection: 20_000,
            solve_limits: SolveLimits::default(),
        }
    }
}

impl TfiConfig {
    fn resolve_split(&self, delta: f64) -> Result<DeltaSplit> {
        match self.split {
            Some((d1, d2)) => DeltaSplit::explicit(delta, d1, d2),
            None => DeltaSplit::symmetric(delta),
        }
    }
}

/// Which extraction method produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    Method1,
    Method2,
}

/// Epsilon values for the two phases of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonsSection {
    pub phase1: EpsilonResult,
    pub phase2: Option<EpsilonResult>,
}

/// Dimension-bound provenance: the closed-form power-set bound and d-index
/// feeding phase 1, and the SUKP-derived bounds feeding phase 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsSection {
    pub powerset_vc: u64,
    pub d_index: u64,
    pub sukp_vc: Option<SukpBound>,
    pub sukp_evc_trace: Option<EvcBoundTrace>,
}

/// Intermediate collection sizes, for auditing which stage thinned what.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizesSection {
    pub c_e: Option<usize>,
    pub g: usize,
    pub w: Option<usize>,
    pub f: Option<usize>,
    pub output: usize,
}

/// Full record of one method run: parameters, both epsilons with their
/// provenance, the dimension bounds behind them, intermediate sizes, and the
/// output collection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TfiReport {
    pub method: MethodTag,
    pub theta: f64,
    pub delta: f64,
    pub delta_split: DeltaSplit,
    pub epsilons: EpsilonsSection,
    pub bounds: BoundsSection,
    pub sizes: SizesSection,
    /// Phase-1 acceptance region reached past frequency 1.
    pub vacuous_phase1: bool,
    /// Final acceptance region reached past frequency 1 (empty output).
    pub vacuous_output: bool,
    #[serde(serialize_with = "serialize_output")]
    pub output: ItemsetCollection,
}

#[derive(Serialize)]
struct OutputEntry<'a> {
    itemset: &'a [Item],
    frequency: f64,
}

fn serialize_output<S: Serializer>(
    coll: &ItemsetCollection,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<OutputEntry> = coll
        .iter()
        .map(|(itemset, frequency)| OutputEntry {
            itemset: itemset.items(),
            frequency,
        })
        .collect();
    rows.serialize(serializer)
}

fn check_method_params(theta: f64, delta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Parameter(format!(
            "theta must be in (0,1], got {theta}"
        )));
    }
    check_delta(delta)
}

fn powerset_dimension(num_items: usize) -> u64 {
    (num_items as u64).saturating_sub(1)
}

/// Split-dataset extraction. Phase 1 computes an accuracy eps_e for the
/// exploratory part over the range set of all itemsets, accepts everything
/// at frequency >= theta + eps_e outright, and keeps the band
/// [theta, theta + eps_e) as candidates. Phase 2 bounds the candidates'
/// range set through SUKP solves and tests them on the evaluation part at
/// theta + eps_v.
pub fn method1(
    ds_e: &TransactionDataset,
    ds_v: &TransactionDataset,
    theta: f64,
    delta: f64,
    config: &TfiConfig,
) -> Result<TfiReport> {
    check_method_params(theta, delta)?;
    if ds_e.is_empty() || ds_v.is_empty() {
        return Err(Error::Parameter(
            "both dataset parts must be nonempty".into(),
        ));
    }
    let split = config.resolve_split(delta)?;

    let mut universe: BTreeSet<Item> = ds_e.item_universe().into_iter().collect();
    universe.extend(ds_v.item_universe());
    let d_powerset = powerset_dimension(universe.len());
    let d_index = ds_e.d_index();
    let eps_e = EpsilonResult::from_bounds(
        Some(d_powerset),
        Some(d_index),
        ds_e.len() as u64,
        split.delta_1,
        config.vc_constant,
    )?;

    let fi_e = fim::mine_frequent(ds_e, theta)?;
    let accept_e = theta + eps_e.eps;
    let c_e = fi_e.filtered(|f| f >= accept_e);
    let band: ItemsetCollection = fi_e.filtered(|f| f < accept_e);

    let mut output = c_e.clone();
    let mut phase2 = None;
    let mut sukp_vc = None;
    let mut sukp_trace = None;
    let mut vacuous_output = false;

    if !band.is_empty() {
        if band.len() > config.max_sukp_collection {
            return Err(Error::ResourceCap(format!(
                "candidate band holds {} itemsets, cap is {}",
                band.len(),
                config.max_sukp_collection
            )));
        }
        let band_set = band.to_set();
        let vc = sukp::vc_bound_from_sukp(&band_set, false, &config.solve_limits)?;
        let profile_v = ds_v.length_profile()?;
        let (evc, trace) =
            sukp::evc_bound_from_sukp(&band_set, &profile_v, false, &config.solve_limits)?;
        let eps_v = EpsilonResult::from_bounds(
            Some(vc.b),
            Some(evc),
            ds_v.len() as u64,
            split.delta_2,
            config.vc_constant,
        )?;
        let accept_v = theta + eps_v.eps;
        vacuous_output = accept_v > 1.0;

        let candidates: Vec<_> = band.itemsets().cloned().collect();
        let freqs_v = fim::frequencies(ds_v, candidates.iter())?;
        for (itemset, f_v) in candidates.into_iter().zip(freqs_v) {
            if f_v >= accept_v {
                output.insert(itemset, f_v);
            }
        }
        phase2 = Some(eps_v);
        sukp_vc = Some(vc);
        sukp_trace = Some(trace);
    }

    let sizes = SizesSection {
        c_e: Some(c_e.len()),
        g: band.len(),
        w: None,
        f: None,
        output: output.len(),
    };
    Ok(TfiReport {
        method: MethodTag::Method1,
        theta,
        delta,
        delta_split: split,
        epsilons: EpsilonsSection {
            phase1: eps_e,
            phase2,
        },
        bounds: BoundsSection {
            powerset_vc: d_powerset,
            d_index,
            sukp_vc,
            sukp_evc_trace: sukp_trace,
        },
        sizes,
        vacuous_phase1: accept_e > 1.0,
        vacuous_output,
        output: ItemsetCollection::new(
            output.iter().map(|(k, v)| (k.clone(), v)).collect(),
            ds_e.len() + ds_v.len(),
        ),
    })
}

/// Full-dataset extraction. Phase 1 computes an accuracy eps_1 over the
/// range set of all itemsets; anything outside frequency
/// [theta - eps_1, theta + eps_1) is resolved by it, and the border of the
/// true frequent itemsets must hide inside the band together with the
/// negative border of the mined family. Phase 2 bounds that border's range
/// set through antichain-constrained SUKP solves and returns the plain
/// frequency cut at theta + eps_2.
pub fn method2(
    ds: &TransactionDataset,
    theta: f64,
    delta: f64,
    config: &TfiConfig,
) -> Result<TfiReport> {
    check_method_params(theta, delta)?;
    if ds.is_empty() {
        return Err(Error::Parameter("dataset must be nonempty".into()));
    }
    let split = config.resolve_split(delta)?;

    let universe_vec = ds.item_universe();
    let d_powerset = powerset_dimension(universe_vec.len());
    let d_index = ds.d_index();
    let n = ds.len() as u64;
    let eps_1 = EpsilonResult::from_bounds(
        Some(d_powerset),
        Some(d_index),
        n,
        split.delta_1,
        config.vc_constant,
    )?;

    let low = theta - eps_1.eps;
    if low <= 0.0 {
        return Err(Error::Infeasible(format!(
            "theta - eps_1 = {low} is not positive; the candidate band cannot be mined \
             (theta = {theta}, eps_1 = {})",
            eps_1.eps
        )));
    }

    let fi_low = fim::mine_frequent(ds, low)?;
    let high = theta + eps_1.eps;
    let band = fi_low.filtered(|f| f < high);
    let border = fim::negative_border(&fi_low.to_set(), &universe_vec)?;

    let mut family: BTreeSet<_> = band.to_set();
    family.extend(border.iter().cloned());
    if family.len() > config.max_sukp_collection {
        return Err(Error::ResourceCap(format!(
            "border family holds {} itemsets, cap is {}",
            family.len(),
            config.max_sukp_collection
        )));
    }

    let (eps_2, sukp_vc, sukp_trace) = if family.is_empty() {
        // Degenerate data: nothing to bound, both dimensions collapse to 0.
        let eps =
            EpsilonResult::from_bounds(Some(0), Some(0), n, split.delta_2, config.vc_constant)?;
        (eps, None, None)
    } else {
        let vc = sukp::vc_bound_from_sukp(&family, true, &config.solve_limits)?;
        let profile = ds.length_profile()?;
        let (evc, trace) =
            sukp::evc_bound_from_sukp(&family, &profile, true, &config.solve_limits)?;
        let eps = EpsilonResult::from_bounds(
            Some(vc.b),
            Some(evc),
            n,
            split.delta_2,
            config.vc_constant,
        )?;
        (eps, Some(vc), Some(trace))
    };

    let accept = theta + eps_2.eps;
    let output = fi_low.filtered(|f| f >= accept);

    let sizes = SizesSection {
        c_e: None,
        g: band.len(),
        w: Some(border.len()),
        f: Some(family.len()),
        output: output.len(),
    };
    Ok(TfiReport {
        method: MethodTag::Method2,
        theta,
        delta,
        delta_split: split,
        epsilons: EpsilonsSection {
            phase1: eps_1,
            phase2: Some(eps_2),
        },
        bounds: BoundsSection {
            powerset_vc: d_powerset,
            d_index,
            sukp_vc,
            sukp_evc_trace: sukp_trace,
        },
        sizes,
        vacuous_phase1: high > 1.0,
        vacuous_output: accept > 1.0,
        output,
    })
}
