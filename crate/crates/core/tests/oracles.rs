//! Oracle-backed checks beyond the acceptance gate: simulation-driven method
//! behavior, soundness of the antichain bound variant, and the statistical
//! invariants of the data plumbing.

mod common;

use std::collections::BTreeSet;

use tfimine::dataset::{GroundTruthModel, Transaction, TransactionDataset};
use tfimine::fim;
use tfimine::harness::{self, true_frequent_itemsets};
use tfimine::sukp::{self, SolveLimits};
use tfimine::tfi::{self, TfiConfig};
use tfimine::Itemset;

#[test]
fn solver_stays_exact_past_the_acceptance_sizes() {
    // The acceptance gate stops at 15 subsets; spot-check a band above it.
    let mut rng = common::TestRng::new(0xFEED);
    for case in 0..25 {
        let num_elements = 4 + rng.below(8) as usize;
        let num_subsets = 16 + rng.below(3) as usize;
        let coll: BTreeSet<Itemset> = (0..num_subsets)
            .map(|_| {
                let size = 1 + rng.below(num_elements as u64) as usize;
                Itemset::from_ids((0..size).map(|_| rng.below(num_elements as u64) as u32))
            })
            .collect();
        let distinct: Vec<Itemset> = coll.iter().cloned().collect();
        for cap in [2u64, num_elements as u64 / 2, num_elements as u64] {
            let inst = sukp::build_instance(&coll, cap).unwrap();
            let plain = sukp::solve_exact(&inst).unwrap().profit.round() as u64;
            let anti = sukp::solve_exact_antichain(&inst).unwrap().profit.round() as u64;
            assert_eq!(
                plain,
                common::brute_sukp(&distinct, cap as usize, false),
                "case {case} cap {cap}"
            );
            assert_eq!(
                anti,
                common::brute_sukp(&distinct, cap as usize, true),
                "case {case} cap {cap} antichain"
            );
        }
    }
}

#[test]
fn method1_accepts_strong_candidates_without_phase2() {
    // Every frequent itemset clears theta + eps_e outright: the candidate
    // band is empty, phase 2 never runs, and the output is the accepted set.
    let rows: Vec<Transaction> = std::iter::repeat_n(Transaction::from_ids([1]), 50_000)
        .chain(std::iter::repeat_n(Transaction::empty(), 10_000))
        .collect();
    let ds = TransactionDataset::new(rows);
    let report = tfi::method1(&ds, &ds, 0.5, 0.1, &TfiConfig::default()).unwrap();
    assert_eq!(report.sizes.c_e, Some(1));
    assert_eq!(report.sizes.g, 0);
    assert!(report.epsilons.phase2.is_none());
    assert!(report.output.contains(&Itemset::from_ids([1])));
    assert_eq!(report.output.len(), 1);
}

#[test]
fn method1_recovers_planted_high_frequency_itemset() {
    // Generating distribution with t({1}) = 0.9; at n = 200000 split evenly
    // the margin over theta = 0.5 dwarfs both accuracies.
    let gt = GroundTruthModel::new(vec![
        (Transaction::from_ids([1]), 0.9),
        (Transaction::empty(), 0.1),
    ])
    .unwrap();
    let ds = gt.sample(200_000, 7).unwrap();
    let (ds_e, ds_v) = ds.random_split(0.5, 11).unwrap();
    let report = tfi::method1(&ds_e, &ds_v, 0.5, 0.1, &TfiConfig::default()).unwrap();
    assert!(report.output.contains(&Itemset::from_ids([1])));
}

#[test]
fn method1_output_lies_within_explored_frequent_sets() {
    let gt = common::planted_model();
    let ds = gt.sample(40_000, 3).unwrap();
    let (ds_e, ds_v) = ds.random_split(0.5, 5).unwrap();
    let theta = 0.2;
    let report = tfi::method1(&ds_e, &ds_v, theta, 0.1, &TfiConfig::default()).unwrap();

    let explored = fim::mine_frequent(&ds_e, theta).unwrap();
    let eps_e = report.epsilons.phase1.eps;
    let eps_v = report.epsilons.phase2.as_ref().map(|e| e.eps);
    for (itemset, _) in report.output.iter() {
        let f_e = explored
            .frequency(itemset)
            .expect("output member was explored");
        assert!(f_e >= theta);
        if f_e < theta + eps_e {
            // Accepted in phase 2: its evaluation frequency clears eps_v.
            let f_v = ds_v.frequency(itemset).unwrap();
            assert!(f_v >= theta + eps_v.unwrap());
        }
    }
}

#[test]
fn method2_output_grows_with_delta() {
    let gt = common::planted_model();
    let ds = gt.sample(20_000, 99).unwrap();
    let config = TfiConfig::default();
    let strict = tfi::method2(&ds, 0.3, 0.05, &config).unwrap();
    let loose = tfi::method2(&ds, 0.3, 0.2, &config).unwrap();
    assert!(
        loose.epsilons.phase2.as_ref().unwrap().eps <= strict.epsilons.phase2.as_ref().unwrap().eps
    );
    assert!(strict.output.to_set().is_subset(&loose.output.to_set()));
}

#[test]
fn antichain_bound_covers_every_antichain_subfamily() {
    // The antichain-constrained bound is what backs the border argument: it
    // must dominate the exact empirical VC dimension of every antichain
    // inside the collection.
    let mut rng = common::TestRng::new(0xA17);
    let limits = SolveLimits::default();
    for _ in 0..60 {
        let num_items = 1 + rng.below(5) as usize;
        let num_transactions = 1 + rng.below(5) as usize;
        let ds = TransactionDataset::new(
            (0..num_transactions)
                .map(|_| Transaction::from_ids((0..num_items as u32).filter(|_| rng.chance(0.5))))
                .collect(),
        );
        let coll: BTreeSet<Itemset> = (0..(1 + rng.below(8)) as usize)
            .map(|_| {
                Itemset::from_ids(
                    (0..(1 + rng.below(num_items as u64)) as usize)
                        .map(|_| rng.below(num_items as u64) as u32),
                )
            })
            .collect();
        let coll_vec: Vec<Itemset> = coll.iter().cloned().collect();
        let profile = ds.length_profile().unwrap();
        let (bound, _) = sukp::evc_bound_from_sukp(&coll, &profile, true, &limits).unwrap();

        // Enumerate antichain subfamilies and take the worst exact EVC.
        let k = coll_vec.len();
        let mut worst = 0;
        'subfamilies: for mask in 1usize..(1 << k) {
            let chosen: Vec<Itemset> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| coll_vec[i].clone())
                .collect();
            for i in 0..chosen.len() {
                for j in (i + 1)..chosen.len() {
                    if chosen[i].is_subset_of(&chosen[j]) || chosen[j].is_subset_of(&chosen[i]) {
                        continue 'subfamilies;
                    }
                }
            }
            worst = worst.max(common::brute_evc(&chosen, &ds));
        }
        assert!(
            bound >= worst,
            "antichain bound {bound} below exact worst-case {worst} for {coll:?}"
        );
    }
}

#[test]
fn d_index_is_exact_on_incomparable_distinct_transactions() {
    // Pairwise-incomparable distinct transactions: the one-scan relaxation
    // coincides with the antichain definition.
    let ds = TransactionDataset::new(vec![
        Transaction::from_ids([1, 2, 3]),
        Transaction::from_ids([4, 5, 6]),
        Transaction::from_ids([7, 8]),
        Transaction::from_ids([9]),
    ]);
    assert_eq!(ds.d_index(), common::brute_d_index(&ds));
    assert_eq!(ds.d_index(), 2);
}

#[test]
fn enlargement_preserves_expected_frequencies() {
    let ds = TransactionDataset::new(vec![
        Transaction::from_ids([1, 2]),
        Transaction::from_ids([1]),
        Transaction::from_ids([2, 3]),
        Transaction::from_ids([4]),
    ]);
    let probe = Itemset::from_ids([1]);
    let original = ds.frequency(&probe).unwrap();
    let mut total = 0.0;
    let seeds = 20;
    for seed in 0..seeds {
        let big = ds.enlarge(100_000, seed).unwrap();
        total += big.frequency(&probe).unwrap();
    }
    let mean = total / seeds as f64;
    assert!(
        (mean - original).abs() < 0.01,
        "mean {mean} drifted from {original}"
    );
}

#[test]
fn true_frequent_counts_match_brute_force_on_small_models() {
    let mut rng = common::TestRng::new(0x60D);
    for _ in 0..40 {
        // Dyadic probabilities over at most 10 items keep every true
        // frequency exact in floating point.
        let num_items = 1 + rng.below(10) as usize;
        let num_support = 1 + rng.below(6) as usize;
        let mut weights: Vec<u64> = (0..num_support).map(|_| 1 + rng.below(16)).collect();
        let total: u64 = weights.iter().sum();
        // Round the denominator up to the next power of two with a filler.
        let denom = total.next_power_of_two();
        let mut support: Vec<(Transaction, f64)> = Vec::new();
        let mut used: BTreeSet<Transaction> = BTreeSet::new();
        for w in weights.drain(..) {
            let t = Transaction::from_ids((0..num_items as u32).filter(|_| rng.chance(0.5)));
            if used.insert(t.clone()) {
                support.push((t, w as f64 / denom as f64));
            } else {
                let idx = support.iter().position(|(s, _)| *s == t).unwrap();
                support[idx].1 += w as f64 / denom as f64;
            }
        }
        if denom > total {
            let filler = Transaction::from_ids([num_items as u32 + 50]);
            support.push((filler, (denom - total) as f64 / denom as f64));
        }
        let gt = GroundTruthModel::new(support).unwrap();
        let theta = 0.3;

        let mined = true_frequent_itemsets(&gt, theta).unwrap();
        let universe: BTreeSet<u32> = gt
            .support()
            .iter()
            .flat_map(|(t, _)| t.items().iter().map(|i| i.0))
            .collect();
        let universe: Vec<tfimine::Item> = universe.into_iter().map(tfimine::Item).collect();
        let mut expected = 0usize;
        for candidate in common::all_nonempty_subsets(&universe) {
            if gt.true_frequency(&candidate) >= theta {
                expected += 1;
            }
        }
        assert_eq!(mined.len(), expected);
    }
}

#[test]
fn scoring_partitions_reported_sets() {
    let cfg = harness::ExperimentConfig {
        source: common::planted_source(),
        target_n: 5000,
        thetas: vec![0.2],
        delta: 0.1,
        trials: 4,
        seed: 31,
        methods: vec![
            harness::MethodKind::Method2,
            harness::MethodKind::Bonferroni,
        ],
        split_fraction: 0.5,
        vc_constant: 0.5,
        max_sukp_collection: 20_000,
        sukp_work_budget: SolveLimits::default().work_budget,
        reports_dir: None,
    };
    let rows = harness::run_experiment(&cfg).unwrap();
    for row in rows {
        assert_eq!(row.num_reported, row.true_positives + row.false_positives);
        let misses = row.num_tfis - row.true_positives.min(row.num_tfis);
        if row.num_tfis > 0 {
            let check = row.power + misses as f64 / row.num_tfis as f64;
            assert!((check - 1.0).abs() < 1e-12);
        }
    }
}
