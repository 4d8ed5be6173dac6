//! Set-Union Knapsack instances, an exact branch-and-bound solver (plain and
//! antichain-constrained), and the machinery that turns SUKP optima into
//! (empirical) VC-dimension upper bounds for a collection of itemsets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::dataset::LengthProfile;
use crate::error::{Error, Result};
use crate::itemset::{Item, Itemset};

/// A Set-Union Knapsack instance: subsets of a ground set with per-subset
/// profits, per-element weights, and a capacity on the weight of the union
/// of the selected subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct SukpInstance {
    elements: Vec<Item>,
    subsets: Vec<Itemset>,
    profits: Vec<f64>,
    weights: Vec<f64>,
    capacity: f64,
}

impl SukpInstance {
    pub fn new(
        elements: Vec<Item>,
        subsets: Vec<Itemset>,
        profits: Vec<f64>,
        weights: Vec<f64>,
        capacity: f64,
    ) -> Result<Self> {
        if profits.len() != subsets.len() {
            return Err(Error::Parameter("one profit per subset is required".into()));
        }
        if weights.len() != elements.len() {
            return Err(Error::Parameter(
                "one weight per element is required".into(),
            ));
        }
        if profits.iter().any(|p| !(*p > 0.0)) || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Parameter(
                "profits and weights must be positive".into(),
            ));
        }
        if !(capacity >= 0.0) {
            return Err(Error::Parameter(format!(
                "capacity must be non-negative, got {capacity}"
            )));
        }
        let universe: BTreeSet<Item> = elements.iter().copied().collect();
        for s in &subsets {
            if !s.items().iter().all(|i| universe.contains(i)) {
                return Err(Error::Parameter(format!(
                    "subset {s} uses elements outside the ground set"
                )));
            }
        }
        Ok(SukpInstance {
            elements,
            subsets,
            profits,
            weights,
            capacity,
        })
    }

    pub fn elements(&self) -> &[Item] {
        &self.elements
    }

    pub fn subsets(&self) -> &[Itemset] {
        &self.subsets
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }
}

/// Builds the unit-profit, unit-weight instance associated to a collection:
/// the ground set is the union of the collection's items.
pub fn build_instance(coll: &BTreeSet<Itemset>, capacity: u64) -> Result<SukpInstance> {
    if coll.is_empty() {
        return Err(Error::Parameter(
            "cannot build a SUKP instance from an empty collection".into(),
        ));
    }
    let universe: BTreeSet<Item> = coll
        .iter()
        .flat_map(|s| s.items().iter().copied())
        .collect();
    let elements: Vec<Item> = universe.into_iter().collect();
    let subsets: Vec<Itemset> = coll.iter().cloned().collect();
    let profits = vec![1.0; subsets.len()];
    let weights = vec![1.0; elements.len()];
    SukpInstance::new(elements, subsets, profits, weights, capacity as f64)
}

/// An (optimal) selection: indices into the instance's subset list, total
/// profit, and the weight of the union of the selected subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct SukpSolution {
    pub selected: Vec<usize>,
    pub profit: f64,
    pub union_weight: f64,
}

/// Cap on solver effort, in units of inner-loop work. When the budget is
/// exhausted the bound computations fall back to a proven upper estimate
/// instead of the exact optimum; the exact solvers run without a practical
/// budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveLimits {
    pub work_budget: u64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            work_budget: 20_000_000,
        }
    }
}

/// Exact optimum over all selections whose union weight fits the capacity.
pub fn solve_exact(inst: &SukpInstance) -> Result<SukpSolution> {
    let outcome = Solver::build(inst, false)?.run(u64::MAX, false);
    Ok(outcome.solution)
}

/// Exact optimum over selections of pairwise-incomparable subsets. This
/// relaxes the maximal-antichain condition, so the optimum upper-bounds the
/// profit over maximal antichains.
pub fn solve_exact_antichain(inst: &SukpInstance) -> Result<SukpSolution> {
    let outcome = Solver::build(inst, true)?.run(u64::MAX, false);
    Ok(outcome.solution)
}

/// q and b = floor(log2 q) + 1 for one SUKP solve, with the capacity used
/// and whether q is a completed solve or a proven upper estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SukpBound {
    pub capacity: u64,
    pub q: u64,
    pub b: u64,
    pub exact: bool,
}

fn bit_length(q: u64) -> u64 {
    if q == 0 {
        0
    } else {
        64 - q.leading_zeros() as u64
    }
}

/// VC-dimension bound for the range set of a collection: solve the SUKP
/// associated to the collection with capacity equal to the number of items
/// occurring in it, then b = floor(log2 q) + 1. With `antichain` set the
/// selection is restricted to antichains, which is the variant used to bound
/// the border of the true frequent itemsets.
pub fn vc_bound_from_sukp(
    coll: &BTreeSet<Itemset>,
    antichain: bool,
    limits: &SolveLimits,
) -> Result<SukpBound> {
    let universe: BTreeSet<Item> = coll
        .iter()
        .flat_map(|s| s.items().iter().copied())
        .collect();
    let capacity = universe.len() as u64;
    solve_bound(coll, capacity, antichain, limits)
}

fn solve_bound(
    coll: &BTreeSet<Itemset>,
    capacity: u64,
    antichain: bool,
    limits: &SolveLimits,
) -> Result<SukpBound> {
    let inst = build_instance(coll, capacity)?;
    let outcome = Solver::build(&inst, antichain)?.run(limits.work_budget, true);
    let mut q = outcome.q_upper;
    // Any feasible selection consists of distinct subsets of a union of at
    // most `capacity` items, so q can never exceed the number of subsets of
    // a capacity-sized set present in the collection. This keeps the
    // estimate from a truncated search meaningful.
    if capacity < 63 {
        let has_empty = coll.iter().any(|s| s.is_empty());
        let count_cap = (1u64 << capacity) - if has_empty { 0 } else { 1 };
        q = q.min(count_cap);
    }
    Ok(SukpBound {
        capacity,
        q,
        b: bit_length(q),
        exact: outcome.complete,
    })
}

/// One row of the empirical-VC bound computation: a transaction length, the
/// antichain upper bound at that length, and the SUKP profit and b value at
/// that capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvcTraceRow {
    pub length: u64,
    pub antichain_bound: u64,
    pub q: u64,
    pub b: u64,
    pub exact: bool,
}

/// Full audit trail of the empirical-VC bound: the per-length rows, the first
/// row index where b falls within the antichain bound (if any), and the
/// resulting bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvcBoundTrace {
    pub rows: Vec<EvcTraceRow>,
    pub chosen_index: Option<usize>,
    pub bound: u64,
    pub capped: bool,
    pub antichain: bool,
}

/// Empirical-VC-dimension bound for a collection on a dataset described by
/// its length profile. For each profile length the SUKP associated to the
/// collection is solved with that capacity, giving q_i and
/// b_i = floor(log2 q_i) + 1. The returned bound is max_i min(b_i, L_i*):
/// at the first index j where b_j <= L_j* this equals b_j whenever the
/// preceding antichain counts stay below it, and taking the max over rows
/// keeps the bound valid when they do not. When no row crosses, the value
/// degrades to the profile's own d-index bound and the trace records that
/// the cap fired.
pub fn evc_bound_from_sukp(
    coll: &BTreeSet<Itemset>,
    profile: &LengthProfile,
    antichain: bool,
    limits: &SolveLimits,
) -> Result<(u64, EvcBoundTrace)> {
    if coll.is_empty() {
        return Err(Error::Parameter("cannot bound an empty collection".into()));
    }
    let universe_size = coll
        .iter()
        .flat_map(|s| s.items().iter().copied())
        .collect::<BTreeSet<Item>>()
        .len() as u64;

    // Capacities above the whole ground set saturate, so those solves are
    // shared through the memo.
    let mut memo: BTreeMap<u64, (u64, bool)> = BTreeMap::new();
    let mut rows = Vec::with_capacity(profile.entries.len());
    let mut prev_b = u64::MAX;
    for entry in &profile.entries {
        let effective = entry.length.min(universe_size);
        let (q, exact) = match memo.get(&effective) {
            Some(&hit) => hit,
            None => {
                let bound = solve_bound(coll, effective, antichain, limits)?;
                memo.insert(effective, (bound.q, bound.exact));
                (bound.q, bound.exact)
            }
        };
        // The true optimum is monotone in capacity; clamping keeps rows from
        // truncated searches consistent with that.
        let b = bit_length(q).min(prev_b);
        prev_b = b;
        rows.push(EvcTraceRow {
            length: entry.length,
            antichain_bound: entry.antichain_bound,
            q,
            b,
            exact,
        });
    }

    let chosen_index = rows.iter().position(|r| r.b <= r.antichain_bound);
    let bound = rows
        .iter()
        .map(|r| r.b.min(r.antichain_bound))
        .max()
        .unwrap_or(0);
    let trace = EvcBoundTrace {
        rows,
        chosen_index,
        bound,
        capped: chosen_index.is_none(),
        antichain,
    };
    Ok((bound, trace))
}

struct SolveOutcome {
    solution: SukpSolution,
    q_upper: u64,
    complete: bool,
}

// Work threshold after which the power-of-two early exit may fire in bound
// mode. Small solves finish exactly, so traces report true optima.
const LOG2_EXIT_AFTER: u64 = 200_000;

/// Depth-first branch and bound over subset inclusion, ordered by subset
/// size ascending. The optimistic bound counts the remaining individually
/// feasible candidates, capping how many unseen singleton items the leftover
/// capacity can still pay for. In bound mode, long searches stop once no
/// power of two separates the incumbent from the optimistic bound, which
/// leaves floor(log2 q)+1 unchanged.
struct Solver {
    masks: Vec<Vec<u64>>,
    profits: Vec<f64>,
    original_index: Vec<usize>,
    element_weights: Vec<f64>,
    capacity: f64,
    conflicts: Vec<Vec<u64>>,
    unit: bool,
    words: usize,
    cand_words: usize,
}

struct SearchState {
    best_profit: f64,
    best_selected: Vec<usize>,
    best_union: Vec<u64>,
    work: u64,
    budget: u64,
    exhausted: bool,
    max_abandoned: f64,
    log2_mode: bool,
}

impl Solver {
    fn build(inst: &SukpInstance, antichain: bool) -> Result<Solver> {
        let index_of: HashMap<Item, usize> = inst
            .elements
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        let words = inst.elements.len().div_ceil(64).max(1);

        let mut order: Vec<usize> = (0..inst.subsets.len()).collect();
        order.sort_by_key(|&i| (inst.subsets[i].len(), i));

        let mut masks = Vec::with_capacity(order.len());
        let mut profits = Vec::with_capacity(order.len());
        for &i in &order {
            let mut mask = vec![0u64; words];
            for item in inst.subsets[i].items() {
                let pos = index_of[item];
                mask[pos / 64] |= 1 << (pos % 64);
            }
            masks.push(mask);
            profits.push(inst.profits[i]);
        }

        let n = masks.len();
        let cand_words = n.div_ceil(64).max(1);
        let conflicts = if antichain {
            let mut table = vec![vec![0u64; cand_words]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    if subset_mask(&masks[i], &masks[j]) || subset_mask(&masks[j], &masks[i]) {
                        table[i][j / 64] |= 1 << (j % 64);
                        table[j][i / 64] |= 1 << (i % 64);
                    }
                }
            }
            table
        } else {
            vec![Vec::new(); n]
        };

        let unit = inst.profits.iter().all(|&p| p == 1.0) && inst.weights.iter().all(|&w| w == 1.0);

        Ok(Solver {
            masks,
            profits,
            original_index: order,
            element_weights: inst.weights.clone(),
            capacity: inst.capacity,
            conflicts,
            unit,
            words,
            cand_words,
        })
    }

    fn weight_of_new(&self, mask: &[u64], union: &[u64]) -> f64 {
        if self.unit {
            let mut count = 0u32;
            for w in 0..self.words {
                count += (mask[w] & !union[w]).count_ones();
            }
            count as f64
        } else {
            let mut total = 0.0;
            for w in 0..self.words {
                let mut bits = mask[w] & !union[w];
                while bits != 0 {
                    let bit = bits.trailing_zeros() as usize;
                    total += self.element_weights[w * 64 + bit];
                    bits &= bits - 1;
                }
            }
            total
        }
    }

    fn weight_of(&self, mask: &[u64]) -> f64 {
        let zero = vec![0u64; self.words];
        self.weight_of_new(mask, &zero)
    }

    fn optimistic_bound(
        &self,
        start: usize,
        union: &[u64],
        union_weight: f64,
        forbidden: &[u64],
        profit: f64,
        state: &mut SearchState,
    ) -> f64 {
        let remaining = self.capacity - union_weight;
        let mut bound = profit;
        let mut new_singletons = 0u64;
        state.work += (self.masks.len() - start) as u64 + 1;
        for j in start..self.masks.len() {
            if forbidden[j / 64] >> (j % 64) & 1 == 1 {
                continue;
            }
            let extra = self.weight_of_new(&self.masks[j], union);
            if extra > remaining {
                continue;
            }
            if self.unit && extra == 1.0 && popcount(&self.masks[j]) == 1 {
                new_singletons += 1;
            } else {
                bound += self.profits[j];
            }
        }
        if self.unit {
            bound += (new_singletons as f64).min(remaining.max(0.0));
        }
        bound
    }

    fn run(&self, budget: u64, log2_mode: bool) -> SolveOutcome {
        let mut state = SearchState {
            best_profit: 0.0,
            best_selected: Vec::new(),
            best_union: vec![0u64; self.words],
            work: 0,
            budget,
            exhausted: false,
            max_abandoned: 0.0,
            log2_mode,
        };
        let union = vec![0u64; self.words];
        let forbidden = vec![0u64; self.cand_words];
        let mut selected = Vec::new();
        self.search(0, &union, 0.0, 0.0, &forbidden, &mut selected, &mut state);

        let mut chosen: Vec<usize> = state
            .best_selected
            .iter()
            .map(|&i| self.original_index[i])
            .collect();
        chosen.sort_unstable();
        let union_weight = self.weight_of(&state.best_union);
        let q_upper = if state.exhausted {
            state.best_profit.max(state.max_abandoned).round() as u64
        } else {
            state.best_profit.round() as u64
        };
        SolveOutcome {
            solution: SukpSolution {
                selected: chosen,
                profit: state.best_profit,
                union_weight,
            },
            q_upper,
            complete: !state.exhausted,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        idx: usize,
        union: &[u64],
        union_weight: f64,
        profit: f64,
        forbidden: &[u64],
        selected: &mut Vec<usize>,
        state: &mut SearchState,
    ) {
        if profit > state.best_profit {
            state.best_profit = profit;
            state.best_selected = selected.clone();
            state.best_union = union.to_vec();
        }
        if idx == self.masks.len() {
            return;
        }

        let bound = self.optimistic_bound(idx, union, union_weight, forbidden, profit, state);
        if bound <= state.best_profit {
            return;
        }
        if state.log2_mode
            && state.work > LOG2_EXIT_AFTER
            && state.best_profit > 0.0
            && bit_length(bound.floor() as u64) <= bit_length(state.best_profit.round() as u64)
        {
            return;
        }
        if state.exhausted || state.work > state.budget {
            state.exhausted = true;
            state.max_abandoned = state.max_abandoned.max(bound);
            return;
        }

        let extra = self.weight_of_new(&self.masks[idx], union);
        let fits = union_weight + extra <= self.capacity;
        let compatible = forbidden[idx / 64] >> (idx % 64) & 1 == 0;
        if fits && compatible {
            let mut new_union = union.to_vec();
            for (dst, src) in new_union.iter_mut().zip(&self.masks[idx]) {
                *dst |= src;
            }
            let mut new_forbidden = forbidden.to_vec();
            for (w, c) in self.conflicts[idx].iter().enumerate() {
                new_forbidden[w] |= c;
            }
            selected.push(idx);
            self.search(
                idx + 1,
                &new_union,
                union_weight + extra,
                profit + self.profits[idx],
                &new_forbidden,
                selected,
                state,
            );
            selected.pop();
        }
        self.search(
            idx + 1,
            union,
            union_weight,
            profit,
            forbidden,
            selected,
            state,
        );
    }
}

fn subset_mask(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn popcount(mask: &[u64]) -> u32 {
    mask.iter().map(|w| w.count_ones()).sum()
}
