//! Shared test oracles: brute-force reference implementations that stay
//! independent of the library's algorithmic paths, plus the planted
//! ground-truth model used by the experiment-level tests.
//
// Each integration test links its own copy, so not every helper is used by
// every test binary.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use tfimine::dataset::{GroundTruthModel, Transaction, TransactionDataset};
use tfimine::harness::{SourceSpec, SupportEntry};
use tfimine::{Item, Itemset};

/// All nonempty subsets of a universe (meant for universes of <= ~16 items).
pub fn all_nonempty_subsets(universe: &[Item]) -> Vec<Itemset> {
    let n = universe.len();
    let mut out = Vec::with_capacity((1usize << n) - 1);
    for mask in 1usize..(1 << n) {
        let items: Vec<Item> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| universe[i])
            .collect();
        out.push(Itemset::new(items));
    }
    out
}

/// Frequent itemsets by direct enumeration of every subset of the universe.
pub fn brute_frequent(ds: &TransactionDataset, theta: f64) -> BTreeMap<Itemset, f64> {
    let universe = ds.item_universe();
    let n = ds.len() as f64;
    let mut out = BTreeMap::new();
    for candidate in all_nonempty_subsets(&universe) {
        let count = ds
            .transactions()
            .iter()
            .filter(|t| candidate.is_subset_of(t))
            .count();
        let f = count as f64 / n;
        if f >= theta {
            out.insert(candidate, f);
        }
    }
    out
}

/// Negative border by direct enumeration: nonmembers all of whose proper
/// subsets (the empty set included) belong to the family.
pub fn brute_border(family: &BTreeSet<Itemset>, universe: &[Item]) -> BTreeSet<Itemset> {
    let mut out = BTreeSet::new();
    'candidates: for candidate in all_nonempty_subsets(universe) {
        if family.contains(&candidate) {
            continue;
        }
        let items = candidate.items().to_vec();
        let k = items.len();
        for sub_mask in 0usize..(1 << k) {
            if sub_mask == (1 << k) - 1 {
                continue; // the candidate itself
            }
            let sub = Itemset::new(
                (0..k)
                    .filter(|i| sub_mask >> i & 1 == 1)
                    .map(|i| items[i])
                    .collect(),
            );
            if !sub.is_empty() && !family.contains(&sub) {
                continue 'candidates;
            }
        }
        out.insert(candidate);
    }
    out
}

/// Unit-profit SUKP optimum by exhaustive enumeration of all selections.
pub fn brute_sukp(subsets: &[Itemset], capacity: usize, antichain: bool) -> u64 {
    let k = subsets.len();
    assert!(k <= 20, "exhaustive SUKP oracle limited to 20 subsets");
    let mut best = 0u64;
    'selections: for mask in 0usize..(1 << k) {
        let chosen: Vec<&Itemset> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &subsets[i])
            .collect();
        if antichain {
            for i in 0..chosen.len() {
                for j in (i + 1)..chosen.len() {
                    if chosen[i].is_subset_of(chosen[j]) || chosen[j].is_subset_of(chosen[i]) {
                        continue 'selections;
                    }
                }
            }
        }
        let mut union: BTreeSet<Item> = BTreeSet::new();
        for s in &chosen {
            union.extend(s.items().iter().copied());
        }
        if union.len() <= capacity {
            best = best.max(chosen.len() as u64);
        }
    }
    best
}

/// Empirical VC dimension of the range set of a collection on a dataset, by
/// explicit shattering: the size of the largest sub-bag of transactions on
/// which the support sets realize every subset.
pub fn brute_evc(coll: &[Itemset], ds: &TransactionDataset) -> u64 {
    let n = ds.len();
    assert!(n <= 16, "shattering oracle limited to 16 transactions");
    let ranges: Vec<u32> = coll
        .iter()
        .map(|a| {
            let mut bits = 0u32;
            for (i, t) in ds.transactions().iter().enumerate() {
                if a.is_subset_of(t) {
                    bits |= 1 << i;
                }
            }
            bits
        })
        .collect();
    let mut best = 0u64;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as u64;
        if size <= best {
            continue;
        }
        let mut seen: HashSet<u32> = HashSet::new();
        for r in &ranges {
            seen.insert(r & mask);
        }
        if seen.len() == 1usize << size {
            best = size;
        }
    }
    best
}

/// Exact d-index by enumeration over antichains of distinct transactions:
/// the largest d such that some antichain holds d transactions of length at
/// least d.
pub fn brute_d_index(ds: &TransactionDataset) -> u64 {
    let distinct: Vec<Transaction> = ds.distinct_counts().into_iter().map(|(t, _)| t).collect();
    let k = distinct.len();
    assert!(
        k <= 16,
        "antichain oracle limited to 16 distinct transactions"
    );
    let mut best = 0u64;
    'masks: for mask in 1usize..(1 << k) {
        let chosen: Vec<&Transaction> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &distinct[i])
            .collect();
        for i in 0..chosen.len() {
            for j in (i + 1)..chosen.len() {
                if chosen[i].is_subset_of(chosen[j]) || chosen[j].is_subset_of(chosen[i]) {
                    continue 'masks;
                }
            }
        }
        let mut lengths: Vec<usize> = chosen.iter().map(|t| t.len()).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        for (i, len) in lengths.iter().enumerate() {
            if *len > i {
                best = best.max((i + 1) as u64);
            }
        }
    }
    best
}

/// Exact upper-tail Binomial probability P[Bin(n, t/10) >= k] by integer
/// rational arithmetic; valid for n <= 30.
pub fn exact_binomial_tail_tenths(k: u64, n: u64, theta_tenths: u32) -> f64 {
    assert!(n <= 30 && (1..=9).contains(&theta_tenths));
    let t = theta_tenths as u128;
    let c = 10u128 - t;
    let mut numerator: u128 = 0;
    for j in k..=n {
        numerator += binomial_coeff(n, j) * t.pow(j as u32) * c.pow((n - j) as u32);
    }
    let denominator = 10u128.pow(n as u32);
    numerator as f64 / denominator as f64
}

fn binomial_coeff(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

/// Deterministic synthetic ground truth: twenty planted transactions over a
/// 40-item universe plus an empty filler transaction. Probabilities are
/// dyadic (multiples of 1/128), so every true frequency is exact in f64.
///
/// The item blocks are laid out to cover the evaluation grid:
/// true frequencies land at 0.5625, 0.53125, 0.5078125, 0.5, 0.25, 0.21875,
/// 0.203125, 0.0625..0.078125 and 0.03125, giving planted discoveries with
/// comfortable, tight, and boundary margins at theta = 0.5, 0.2 and 0.05.
pub fn planted_model() -> GroundTruthModel {
    let incidence = planted_incidence();
    let mut transactions: Vec<Vec<u32>> = vec![Vec::new(); 20];
    for (item, planted) in &incidence {
        for &t in planted {
            transactions[t].push(*item);
        }
    }
    let mut support: Vec<(Transaction, f64)> = Vec::with_capacity(21);
    for (idx, items) in transactions.into_iter().enumerate() {
        let p = if idx < 18 { 4.0 / 128.0 } else { 1.0 / 128.0 };
        support.push((Transaction::from_ids(items), p));
    }
    support.push((Transaction::empty(), 54.0 / 128.0));
    GroundTruthModel::new(support).expect("planted model is valid")
}

/// The planted model as an inline experiment source.
pub fn planted_source() -> SourceSpec {
    let support = planted_model()
        .support()
        .iter()
        .map(|(t, p)| SupportEntry {
            transaction: t.items().iter().map(|i| i.0).collect(),
            probability: *p,
        })
        .collect();
    SourceSpec::InlineModel { support }
}

fn planted_incidence() -> Vec<(u32, Vec<usize>)> {
    let mut inc: Vec<(u32, Vec<usize>)> = Vec::new();
    inc.push((0, (0..=17).collect()));
    inc.push((1, (0..=16).collect()));
    inc.push((2, {
        let mut v = vec![0usize, 1];
        v.extend(4..=17);
        v.push(18);
        v
    }));
    inc.push((3, (0..=7).collect()));
    inc.push((4, (8..=15).collect()));
    inc.push((5, (1..=7).collect()));
    inc.push((6, (9..=15).collect()));
    inc.push((7, {
        let mut v: Vec<usize> = (12..=17).collect();
        v.push(18);
        v.push(19);
        v
    }));
    inc.push((8, (5..=10).collect()));
    inc.push((9, vec![0, 1, 2, 3]));
    inc.push((10, vec![4, 5, 6, 7]));
    inc.push((11, vec![8, 9, 10, 11]));
    inc.push((12, vec![12, 13, 14, 15]));
    inc.push((13, vec![16, 17, 18, 19]));
    inc.push((14, vec![0, 1, 2]));
    inc.push((15, vec![6, 7, 8]));
    inc.push((16, vec![13, 14]));
    inc.push((17, vec![16, 17]));
    inc.push((18, vec![0, 19]));
    inc.push((19, vec![3, 10]));
    inc.push((20, vec![5, 16]));
    inc.push((21, vec![9, 12]));
    for item in 22..40u32 {
        inc.push((item, vec![(item - 22) as usize]));
    }
    inc
}

/// Small deterministic linear-congruential stream for generating random test
/// instances without pulling in an external generator.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        // xorshift64*
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn chance(&mut self, p: f64) -> bool {
        (self.next_u64() as f64 / u64::MAX as f64) < p
    }
}
