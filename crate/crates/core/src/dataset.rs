//! Transaction data model, FIMI-format I/O, random splitting and enlargement,
//! and the dataset-level structural statistics used by the VC-dimension
//! bounds (d-index, transaction-length profile).

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::itemset::{Item, Itemset};

/// A transaction is a finite set of items; a single observation from the
/// generating distribution.
pub type Transaction = Itemset;

/// A bag of transactions. Duplicates are permitted and order is preserved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransactionDataset {
    transactions: Vec<Transaction>,
}

impl TransactionDataset {
    pub fn new(transactions: Vec<Transaction>) -> Self {
        TransactionDataset { transactions }
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    /// All items occurring in the dataset, in ascending order.
    pub fn item_universe(&self) -> Vec<Item> {
        let set: BTreeSet<Item> = self
            .transactions
            .iter()
            .flat_map(|t| t.items().iter().copied())
            .collect();
        set.into_iter().collect()
    }

    /// Distinct transactions with their multiplicities, in canonical order.
    pub fn distinct_counts(&self) -> Vec<(Transaction, u64)> {
        let mut counts: HashMap<&Transaction, u64> = HashMap::new();
        for t in &self.transactions {
            *counts.entry(t).or_insert(0) += 1;
        }
        let mut out: Vec<(Transaction, u64)> =
            counts.into_iter().map(|(t, c)| (t.clone(), c)).collect();
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Fraction of transactions containing `itemset`. The empty itemset is
    /// contained in every transaction.
    pub fn frequency(&self, itemset: &Itemset) -> Result<f64> {
        if self.transactions.is_empty() {
            return Err(Error::Parameter(
                "frequency is undefined on an empty dataset".into(),
            ));
        }
        let count = self
            .transactions
            .iter()
            .filter(|t| itemset.is_subset_of(t))
            .count();
        Ok(count as f64 / self.transactions.len() as f64)
    }

    /// Number of transactions containing `itemset`.
    pub fn support_count(&self, itemset: &Itemset) -> u64 {
        self.transactions
            .iter()
            .filter(|t| itemset.is_subset_of(t))
            .count() as u64
    }

    /// Splits the bag into an exploratory and an evaluation part by a seeded
    /// shuffle followed by a prefix cut at ceil(fraction_e * n). Both part
    /// sizes are therefore deterministic given the seed.
    pub fn random_split(
        &self,
        fraction_e: f64,
        seed: u64,
    ) -> Result<(TransactionDataset, TransactionDataset)> {
        let n = self.transactions.len();
        if n < 2 {
            return Err(Error::Parameter(format!(
                "cannot split a dataset of {n} transactions"
            )));
        }
        if !(fraction_e > 0.0 && fraction_e < 1.0) {
            return Err(Error::Parameter(format!(
                "split fraction must be in (0,1), got {fraction_e}"
            )));
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let cut = ((fraction_e * n as f64).ceil() as usize).min(n);
        let part_e = order[..cut]
            .iter()
            .map(|&i| self.transactions[i].clone())
            .collect();
        let part_v = order[cut..]
            .iter()
            .map(|&i| self.transactions[i].clone())
            .collect();
        Ok((
            TransactionDataset::new(part_e),
            TransactionDataset::new(part_v),
        ))
    }

    /// Draws `target_n` transactions i.i.d. uniformly with replacement.
    pub fn enlarge(&self, target_n: usize, seed: u64) -> Result<TransactionDataset> {
        let n = self.transactions.len();
        if n == 0 {
            return Err(Error::Parameter("cannot enlarge an empty dataset".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let transactions = (0..target_n)
            .map(|_| self.transactions[rng.gen_range(0..n)].clone())
            .collect();
        Ok(TransactionDataset::new(transactions))
    }

    /// The d-index upper bound: the largest d such that the dataset contains
    /// at least d distinct transactions of length at least d. Distinctness is
    /// a one-scan relaxation of the antichain condition, so the value can
    /// only be larger than the exact d-index and the bound stays valid.
    pub fn d_index(&self) -> u64 {
        let mut lengths: Vec<usize> = self
            .distinct_counts()
            .iter()
            .map(|(t, _)| t.len())
            .collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        let mut d = 0u64;
        for (i, len) in lengths.iter().enumerate() {
            if *len > i {
                d = (i + 1) as u64;
            } else {
                break;
            }
        }
        d
    }

    /// Distinct transaction lengths in decreasing order together with the
    /// number of distinct transactions at or above each length (an upper
    /// bound on the largest antichain of such transactions).
    pub fn length_profile(&self) -> Result<LengthProfile> {
        if self.transactions.is_empty() {
            return Err(Error::Parameter(
                "length profile is undefined on an empty dataset".into(),
            ));
        }
        let mut lengths: Vec<usize> = self
            .distinct_counts()
            .iter()
            .map(|(t, _)| t.len())
            .filter(|&l| l > 0)
            .collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        let mut entries = Vec::new();
        let mut i = 0;
        while i < lengths.len() {
            let len = lengths[i];
            let mut j = i;
            while j < lengths.len() && lengths[j] == len {
                j += 1;
            }
            // j distinct transactions have length >= len
            entries.push(ProfileEntry {
                length: len as u64,
                antichain_bound: j as u64,
            });
            i = j;
        }
        Ok(LengthProfile { entries })
    }

    /// Writes the dataset in FIMI format: one transaction per line, items as
    /// ascending space-separated ids. Empty transactions produce blank lines
    /// and are therefore not representable in this format.
    pub fn write_fimi<W: Write>(&self, mut writer: W) -> Result<()> {
        for t in &self.transactions {
            writeln!(writer, "{}", t.display_ids())?;
        }
        Ok(())
    }
}

/// Parses FIMI text: one transaction per nonempty line, whitespace-separated
/// non-negative integer ids. Duplicate ids within a line are collapsed and
/// blank lines are skipped. An empty stream yields an empty dataset.
pub fn parse_fimi<R: BufRead>(reader: R) -> Result<TransactionDataset> {
    let mut transactions = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut ids = Vec::new();
        for token in trimmed.split_whitespace() {
            let id: u32 = token.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("expected a non-negative integer, got {token:?}"),
            })?;
            ids.push(id);
        }
        transactions.push(Transaction::from_ids(ids));
    }
    Ok(TransactionDataset::new(transactions))
}

/// Parses FIMI text held in a string.
pub fn parse_fimi_str(text: &str) -> Result<TransactionDataset> {
    parse_fimi(text.as_bytes())
}

/// One row of the length profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub length: u64,
    pub antichain_bound: u64,
}

/// Distinct transaction lengths in decreasing order, each with an upper bound
/// on the number of pairwise-incomparable distinct transactions at or above
/// that length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthProfile {
    pub entries: Vec<ProfileEntry>,
}

impl LengthProfile {
    /// The d-index bound recoverable from the profile alone:
    /// max_i min(length_i, bound_i).
    pub fn d_index_bound(&self) -> u64 {
        self.entries
            .iter()
            .map(|e| e.length.min(e.antichain_bound))
            .max()
            .unwrap_or(0)
    }
}

/// An explicit probability distribution over transactions; the ground truth
/// the experiment harness samples from and scores against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthModel {
    support: Vec<(Transaction, f64)>,
}

impl GroundTruthModel {
    /// Validates that the support transactions are distinct and the
    /// probabilities are non-negative and sum to 1 within 1e-9.
    pub fn new(support: Vec<(Transaction, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut total = 0.0;
        for (t, p) in &support {
            if !(*p >= 0.0 && *p <= 1.0) {
                return Err(Error::Model(format!(
                    "probability {p} for {t} outside [0,1]"
                )));
            }
            if !seen.insert(t.clone()) {
                return Err(Error::Model(format!("duplicate support transaction {t}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Model(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(GroundTruthModel { support })
    }

    pub fn support(&self) -> &[(Transaction, f64)] {
        &self.support
    }

    /// True frequency of an itemset: total probability mass of the support
    /// transactions containing it.
    pub fn true_frequency(&self, itemset: &Itemset) -> f64 {
        self.support
            .iter()
            .filter(|(t, _)| itemset.is_subset_of(t))
            .map(|(_, p)| *p)
            .sum()
    }

    /// Draws `n` i.i.d. transactions; deterministic given the seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<TransactionDataset> {
        let mut cumulative = Vec::with_capacity(self.support.len());
        let mut acc = 0.0;
        for (_, p) in &self.support {
            acc += p;
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut transactions = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = match cumulative.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
                Ok(i) => (i + 1).min(self.support.len() - 1),
                Err(i) => i.min(self.support.len() - 1),
            };
            transactions.push(self.support[idx].0.clone());
        }
        Ok(TransactionDataset::new(transactions))
    }
}
