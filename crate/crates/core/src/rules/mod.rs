//! Rules, rule sets, coverage evaluation, and candidate-rule mining.

mod forest;
mod fpgrowth;

pub use forest::mine_candidates_rf;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::data::{BinarizedDataset, Predicate};
use crate::{Error, Result};

/// A conjunction of predicate columns of a [`BinarizedDataset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    /// Sorted, non-empty predicate-column indices.
    items: Vec<u32>,
    pub support_pos: usize,
    pub support_neg: usize,
}

impl Rule {
    pub fn new(mut items: Vec<u32>, support_pos: usize, support_neg: usize) -> Result<Rule> {
        if items.is_empty() {
            return Err(Error::Data("a rule needs at least one predicate".into()));
        }
        items.sort_unstable();
        items.dedup();
        Ok(Rule {
            items,
            support_pos,
            support_neg,
        })
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty() // never true: enforced at construction
    }

    /// Coverage bitset over the dataset's rows: AND of the item columns.
    pub fn coverage(&self, dataset: &BinarizedDataset) -> Result<Bitset> {
        let first = self.items[0] as usize;
        if self.items.iter().any(|&i| i as usize >= dataset.n_columns()) {
            return Err(Error::Data(format!(
                "rule item out of range for {}-column dataset",
                dataset.n_columns()
            )));
        }
        let mut bits = dataset.columns[first].clone();
        for &i in &self.items[1..] {
            bits.and_with(&dataset.columns[i as usize]);
        }
        Ok(bits)
    }

    /// Evaluate the conjunction on a raw feature row.
    pub fn covers_raw(&self, predicates: &[Predicate], row: &[f64]) -> bool {
        self.items.iter().all(|&i| predicates[i as usize].eval(row))
    }

    pub fn describe(&self, predicates: &[Predicate], feature_names: &[String]) -> String {
        self.items
            .iter()
            .map(|&i| predicates[i as usize].describe(feature_names))
            .collect::<Vec<_>>()
            .join(" AND ")
    }
}

/// Whether a rule covers one dataset row.
pub fn covers(rule: &Rule, dataset: &BinarizedDataset, row: usize) -> Result<bool> {
    if row >= dataset.n_rows() {
        return Err(Error::Data(format!("row {row} out of range")));
    }
    for &i in &rule.items {
        let col = dataset
            .columns
            .get(i as usize)
            .ok_or_else(|| Error::Data(format!("rule item {i} out of range")))?;
        if !col.get(row) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Signed collection of rules: positive rules recommend label 1, negative
/// rules label 0. No duplicates within a polarity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub positive: Vec<Rule>,
    pub negative: Vec<Rule>,
}

impl RuleSet {
    pub fn empty() -> RuleSet {
        RuleSet::default()
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    /// Add a rule, rejecting duplicates within the polarity.
    pub fn add(&mut self, rule: Rule, positive: bool) -> bool {
        let side = if positive {
            &mut self.positive
        } else {
            &mut self.negative
        };
        if side.iter().any(|r| r.items == rule.items) {
            return false;
        }
        side.push(rule);
        true
    }

    /// Human-readable listing, one rule per line.
    pub fn to_text(&self, predicates: &[Predicate], feature_names: &[String]) -> String {
        let mut lines = Vec::new();
        for r in &self.positive {
            lines.push(format!("+ IF {}", r.describe(predicates, feature_names)));
        }
        for r in &self.negative {
            lines.push(format!("- IF {}", r.describe(predicates, feature_names)));
        }
        lines.join("\n")
    }
}

/// Union coverage of a rule set's two polarities.
pub fn set_coverage(rs: &RuleSet, dataset: &BinarizedDataset) -> Result<(Bitset, Bitset)> {
    let n = dataset.n_rows();
    let mut pos = Bitset::zeros(n);
    for r in &rs.positive {
        pos.or_with(&r.coverage(dataset)?);
    }
    let mut neg = Bitset::zeros(n);
    for r in &rs.negative {
        neg.or_with(&r.coverage(dataset)?);
    }
    Ok((pos, neg))
}

/// Mined candidate rules for each polarity, with precomputed coverage.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    pub pos_candidates: Vec<Rule>,
    pub neg_candidates: Vec<Rule>,
    /// Coverage bitsets over all dataset rows, aligned with the candidates.
    pub pos_coverage: Vec<Bitset>,
    pub neg_coverage: Vec<Bitset>,
    pub n_rows: usize,
}

impl CandidatePool {
    pub fn is_empty(&self) -> bool {
        self.pos_candidates.is_empty() && self.neg_candidates.is_empty()
    }

    pub fn candidates(&self, positive: bool) -> &[Rule] {
        if positive {
            &self.pos_candidates
        } else {
            &self.neg_candidates
        }
    }

    pub fn coverage(&self, positive: bool) -> &[Bitset] {
        if positive {
            &self.pos_coverage
        } else {
            &self.neg_coverage
        }
    }
}

/// Candidate ordered worst-first so a max-heap can evict the weakest of
/// the kept set: lower precision, then lower polarity support, then
/// lexicographically larger items.
pub(super) struct HeapEntry {
    pub(super) precision: f64,
    pub(super) support: usize,
    pub(super) items: Vec<u32>,
    pub(super) support_pos: usize,
    pub(super) support_neg: usize,
    pub(super) bits: Bitset,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .precision
            .total_cmp(&self.precision)
            .then(other.support.cmp(&self.support))
            .then(self.items.cmp(&other.items))
    }
}

/// Shared truncation: keep at most `max_candidates` entries by precision
/// (desc), support (desc), items (lex asc), and produce sorted rules.
pub(super) fn drain_heap(heap: BinaryHeap<HeapEntry>) -> (Vec<Rule>, Vec<Bitset>) {
    let mut entries: Vec<HeapEntry> = heap.into_vec();
    entries.sort_by(|a, b| b.cmp(a)); // best first
    let mut rules = Vec::with_capacity(entries.len());
    let mut bits = Vec::with_capacity(entries.len());
    for e in entries {
        rules.push(Rule {
            items: e.items,
            support_pos: e.support_pos,
            support_neg: e.support_neg,
        });
        bits.push(e.bits);
    }
    (rules, bits)
}

pub(super) fn push_bounded(heap: &mut BinaryHeap<HeapEntry>, entry: HeapEntry, cap: usize) {
    if heap.len() < cap {
        heap.push(entry);
    } else if let Some(worst) = heap.peek() {
        if entry < *worst {
            heap.pop();
            heap.push(entry);
        }
    }
}

/// Mine frequent predicate conjunctions separately on positive- and
/// negative-label rows (FP-Growth), keeping itemsets of length <=
/// `max_length` with support fraction >= `min_support_fraction` within the
/// polarity's rows. If more than `max_candidates` qualify per polarity,
/// the top by within-polarity precision are kept.
pub fn mine_candidates(
    dataset: &BinarizedDataset,
    labels: &[u8],
    min_support_fraction: f64,
    max_length: usize,
    max_candidates: usize,
) -> Result<CandidatePool> {
    if !(min_support_fraction > 0.0 && min_support_fraction < 1.0) {
        return Err(Error::Config("min_support_fraction must be in (0,1)".into()));
    }
    if max_length == 0 {
        return Err(Error::Config("max_length must be >= 1".into()));
    }
    if labels.len() != dataset.n_rows() {
        return Err(Error::Data("labels length mismatch".into()));
    }
    let n = dataset.n_rows();
    let label_bits = [
        Bitset::from_fn(n, |i| labels[i] == 0),
        Bitset::from_fn(n, |i| labels[i] == 1),
    ];

    let mut pools: Vec<(Vec<Rule>, Vec<Bitset>)> = Vec::with_capacity(2);
    for polarity in [1u8, 0u8] {
        let rows: Vec<usize> = (0..n).filter(|&i| labels[i] == polarity).collect();
        let transactions: Vec<Vec<u32>> = rows
            .iter()
            .map(|&i| {
                (0..dataset.n_columns() as u32)
                    .filter(|&j| dataset.columns[j as usize].get(i))
                    .collect()
            })
            .collect();
        let min_count = ((min_support_fraction * rows.len() as f64).ceil() as u64).max(1);

        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        fpgrowth::enumerate_frequent(&transactions, min_count, max_length, &mut |items, count| {
            let mut bits = dataset.columns[items[0] as usize].clone();
            for &i in &items[1..] {
                bits.and_with(&dataset.columns[i as usize]);
            }
            let support_pos = bits.and_count(&label_bits[1]);
            let support_neg = bits.and_count(&label_bits[0]);
            let own = if polarity == 1 { support_pos } else { support_neg };
            debug_assert_eq!(own as u64, count);
            let covered = support_pos + support_neg;
            let precision = own as f64 / covered as f64;
            push_bounded(
                &mut heap,
                HeapEntry {
                    precision,
                    support: own,
                    items: items.to_vec(),
                    support_pos,
                    support_neg,
                    bits,
                },
                max_candidates,
            );
        });
        pools.push(drain_heap(heap));
    }

    let (neg_candidates, neg_coverage) = pools.pop().unwrap();
    let (pos_candidates, pos_coverage) = pools.pop().unwrap();
    if pos_candidates.is_empty() && neg_candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    Ok(CandidatePool {
        pos_candidates,
        neg_candidates,
        pos_coverage,
        neg_coverage,
        n_rows: n,
    })
}
