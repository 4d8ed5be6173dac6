//! Frequent-itemset mining, frequency-band selection, and negative-border
//! construction over the itemset lattice.
//!
//! The miner is an exact depth-first prefix enumeration over vertical
//! tid-lists of the distinct transactions. Duplicate transactions are
//! collapsed into weights first, so mining cost scales with the number of
//! distinct transactions rather than the bag size.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use crate::dataset::{Transaction, TransactionDataset};
use crate::error::{Error, Result};
use crate::itemset::{Item, Itemset};

/// A collection of itemsets with attached frequencies (fractions in `[0,1]`).
/// Iteration order is canonical (lexicographic on sorted item ids).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ItemsetCollection {
    entries: BTreeMap<Itemset, f64>,
    source_n: usize,
}

impl ItemsetCollection {
    pub fn new(entries: BTreeMap<Itemset, f64>, source_n: usize) -> Self {
        ItemsetCollection { entries, source_n }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of transactions the frequencies were computed from; 0 when the
    /// frequencies are model probabilities rather than empirical fractions.
    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn frequency(&self, itemset: &Itemset) -> Option<f64> {
        self.entries.get(itemset).copied()
    }

    pub fn contains(&self, itemset: &Itemset) -> bool {
        self.entries.contains_key(itemset)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Itemset, f64)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }

    pub fn itemsets(&self) -> impl Iterator<Item = &Itemset> {
        self.entries.keys()
    }

    pub fn to_set(&self) -> BTreeSet<Itemset> {
        self.entries.keys().cloned().collect()
    }

    pub fn insert(&mut self, itemset: Itemset, frequency: f64) {
        self.entries.insert(itemset, frequency);
    }

    /// Retains only the entries whose frequency satisfies the predicate.
    pub fn filtered<F: Fn(f64) -> bool>(&self, keep: F) -> ItemsetCollection {
        ItemsetCollection {
            entries: self
                .entries
                .iter()
                .filter(|(_, f)| keep(**f))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            source_n: self.source_n,
        }
    }

    /// One itemset per line: ascending space-separated ids, a tab, then the
    /// frequency with six decimal digits.
    pub fn write_text<W: Write>(&self, mut writer: W) -> Result<()> {
        for (itemset, freq) in &self.entries {
            writeln!(writer, "{}\t{:.6}", itemset.display_ids(), freq)?;
        }
        Ok(())
    }
}

impl FromIterator<(Itemset, f64)> for ItemsetCollection {
    fn from_iter<T: IntoIterator<Item = (Itemset, f64)>>(iter: T) -> Self {
        ItemsetCollection {
            entries: iter.into_iter().collect(),
            source_n: 0,
        }
    }
}

/// Exact set of nonempty itemsets with frequency at least `theta` in the
/// dataset, with their frequencies.
pub fn mine_frequent(ds: &TransactionDataset, theta: f64) -> Result<ItemsetCollection> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Parameter(format!(
            "mining threshold must be in (0,1], got {theta}"
        )));
    }
    if ds.is_empty() {
        return Err(Error::Parameter("cannot mine an empty dataset".into()));
    }
    let groups: Vec<(Transaction, f64)> = ds
        .distinct_counts()
        .into_iter()
        .map(|(t, c)| (t, c as f64))
        .collect();
    let entries = mine_groups(&groups, ds.len() as f64, theta);
    Ok(ItemsetCollection::new(entries, ds.len()))
}

/// Mining over explicitly weighted transactions: returns the nonempty
/// itemsets whose total weight fraction (weight / `total`) is at least
/// `theta`. Used by the harness to mine a ground-truth distribution, where
/// the weights are probabilities and `total` is 1.
pub fn mine_weighted(
    support: &[(Transaction, f64)],
    total: f64,
    theta: f64,
) -> Result<ItemsetCollection> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Parameter(format!(
            "mining threshold must be in (0,1], got {theta}"
        )));
    }
    if !(total > 0.0) {
        return Err(Error::Parameter(format!(
            "total weight must be positive, got {total}"
        )));
    }
    Ok(ItemsetCollection::new(
        mine_groups(support, total, theta),
        0,
    ))
}

fn mine_groups(groups: &[(Transaction, f64)], total: f64, theta: f64) -> BTreeMap<Itemset, f64> {
    // Vertical layout: per item, the indices of the groups containing it.
    let mut tidlists: HashMap<Item, Vec<u32>> = HashMap::new();
    for (gi, (t, _)) in groups.iter().enumerate() {
        for &item in t.items() {
            tidlists.entry(item).or_default().push(gi as u32);
        }
    }
    let weight_of = |tids: &[u32]| -> f64 { tids.iter().map(|&i| groups[i as usize].1).sum() };

    let mut roots: Vec<(Item, Vec<u32>, f64)> = tidlists
        .into_iter()
        .filter_map(|(item, tids)| {
            let w = weight_of(&tids);
            (w / total >= theta).then_some((item, tids, w))
        })
        .collect();
    roots.sort_unstable_by_key(|(item, _, _)| *item);

    let mut out = BTreeMap::new();
    let mut prefix: Vec<Item> = Vec::new();
    dfs(&roots, &mut prefix, total, theta, groups, &mut out);
    out
}

fn dfs(
    extensions: &[(Item, Vec<u32>, f64)],
    prefix: &mut Vec<Item>,
    total: f64,
    theta: f64,
    groups: &[(Transaction, f64)],
    out: &mut BTreeMap<Itemset, f64>,
) {
    for (i, (item, tids, weight)) in extensions.iter().enumerate() {
        prefix.push(*item);
        out.insert(Itemset::new(prefix.clone()), weight / total);
        let mut next = Vec::new();
        for (item2, tids2, _) in &extensions[i + 1..] {
            let merged = intersect(tids, tids2);
            let w: f64 = merged.iter().map(|&g| groups[g as usize].1).sum();
            if w / total >= theta {
                next.push((*item2, merged, w));
            }
        }
        if !next.is_empty() {
            dfs(&next, prefix, total, theta, groups, out);
        }
        prefix.pop();
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Nonempty itemsets with frequency in [`lo`, `hi`), implemented by mining at
/// `lo` and filtering.
pub fn frequency_band(ds: &TransactionDataset, lo: f64, hi: f64) -> Result<ItemsetCollection> {
    if !(lo > 0.0) {
        return Err(Error::Parameter(format!(
            "band lower bound must be positive, got {lo}"
        )));
    }
    if !(lo <= hi) {
        return Err(Error::Parameter(format!(
            "band bounds must satisfy lo <= hi, got [{lo}, {hi})"
        )));
    }
    let mined = mine_frequent(ds, lo.min(1.0))?;
    Ok(mined.filtered(|f| f >= lo && f < hi))
}

/// Exact frequencies of the given itemsets, computed over the collapsed
/// distinct transactions of the dataset.
pub fn frequencies<'a, I>(ds: &TransactionDataset, itemsets: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a Itemset>,
{
    if ds.is_empty() {
        return Err(Error::Parameter(
            "frequencies are undefined on an empty dataset".into(),
        ));
    }
    let groups = ds.distinct_counts();
    let n = ds.len() as f64;
    Ok(itemsets
        .into_iter()
        .map(|a| {
            let count: u64 = groups
                .iter()
                .filter(|(t, _)| a.is_subset_of(t))
                .map(|(_, c)| *c)
                .sum();
            count as f64 / n
        })
        .collect())
}

/// The negative border of a downward-closed family: the itemsets over
/// `universe` that are not members but whose proper subsets all are. The
/// empty itemset counts as a member, so singletons outside the family are
/// border candidates. The result is always an antichain.
///
/// Candidates are restricted to singletons and one-item extensions of
/// members, which is exhaustive for downward-closed input.
pub fn negative_border(
    freq_sets: &BTreeSet<Itemset>,
    universe: &[Item],
) -> Result<BTreeSet<Itemset>> {
    let is_member = |s: &Itemset| s.is_empty() || freq_sets.contains(s);
    for set in freq_sets {
        for &item in set.items() {
            let sub = set.without_item(item);
            if !is_member(&sub) {
                return Err(Error::Structure(format!(
                    "family is not downward closed: {set} present but {sub} missing"
                )));
            }
        }
    }

    let mut candidates: BTreeSet<Itemset> = BTreeSet::new();
    for &item in universe {
        let single = Itemset::new(vec![item]);
        if !freq_sets.contains(&single) {
            candidates.insert(single);
        }
    }
    for set in freq_sets {
        if set.is_empty() {
            continue;
        }
        for &item in universe {
            if !set.contains(item) {
                let ext = set.with_item(item);
                if !freq_sets.contains(&ext) {
                    candidates.insert(ext);
                }
            }
        }
    }

    Ok(candidates
        .into_iter()
        .filter(|c| c.items().iter().all(|&i| is_member(&c.without_item(i))))
        .collect())
}

/// True iff no member of the family is a subset of another (set semantics;
/// duplicates are collapsed).
pub fn is_antichain<'a, I>(sets: I) -> bool
where
    I: IntoIterator<Item = &'a Itemset>,
{
    let unique: Vec<&Itemset> = {
        let mut set = BTreeSet::new();
        sets.into_iter().filter(|s| set.insert(*s)).collect()
    };
    for i in 0..unique.len() {
        for j in (i + 1)..unique.len() {
            if unique[i].is_subset_of(unique[j]) || unique[j].is_subset_of(unique[i]) {
                return false;
            }
        }
    }
    true
}
