//! Items and itemsets: the shared set-of-items representation used for both
//! transactions and candidate patterns.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A single item, identified by a non-negative integer id. Ids need not be
/// contiguous; equality and ordering are by id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Item(pub u32);

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite set of items, kept sorted and deduplicated so that equality,
/// hashing and ordering are canonical. May be empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Itemset {
    items: Vec<Item>,
}

// Deserialization goes through the constructor so unsorted or duplicated
// input is canonicalized.
impl<'de> Deserialize<'de> for Itemset {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        Ok(Itemset::new(Vec::<Item>::deserialize(deserializer)?))
    }
}

impl Itemset {
    pub fn empty() -> Self {
        Itemset { items: Vec::new() }
    }

    /// Builds an itemset from arbitrary items, sorting and removing duplicates.
    pub fn new(mut items: Vec<Item>) -> Self {
        items.sort_unstable();
        items.dedup();
        Itemset { items }
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        Self::new(ids.into_iter().map(Item).collect())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn contains(&self, item: Item) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    /// Subset test on the sorted representations (merge walk).
    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        if self.items.len() > other.items.len() {
            return false;
        }
        let mut oi = other.items.iter();
        'outer: for item in &self.items {
            for o in oi.by_ref() {
                match o.cmp(item) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn is_proper_subset_of(&self, other: &Itemset) -> bool {
        self.items.len() < other.items.len() && self.is_subset_of(other)
    }

    /// The itemset extended with one more item.
    pub fn with_item(&self, item: Item) -> Itemset {
        let mut items = self.items.clone();
        match items.binary_search(&item) {
            Ok(_) => {}
            Err(pos) => items.insert(pos, item),
        }
        Itemset { items }
    }

    /// The itemset with one item removed (no-op if absent).
    pub fn without_item(&self, item: Item) -> Itemset {
        let mut items = self.items.clone();
        if let Ok(pos) = items.binary_search(&item) {
            items.remove(pos);
        }
        Itemset { items }
    }

    /// Items rendered as space-separated ascending ids.
    pub fn display_ids(&self) -> String {
        self.items
            .iter()
            .map(|i| i.0.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.display_ids())
    }
}

impl FromIterator<u32> for Itemset {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        Itemset::from_ids(iter)
    }
}
