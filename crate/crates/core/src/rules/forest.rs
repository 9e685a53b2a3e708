//! Candidate rules extracted from random-forest paths: an alternative to
//! frequent-pattern mining, kept behind a config switch.

use std::collections::BTreeSet;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::Bitset;
use crate::data::BinarizedDataset;
use crate::{Error, Result};

use super::{drain_heap, push_bounded, CandidatePool, HeapEntry};

const TREES: usize = 50;
const MIN_NODE_ROWS: usize = 5;

/// Mine candidates as root-to-node paths of depth <= `max_length` from a
/// small random forest fit to the labels over the predicate columns.
///
/// Negated branch conditions map to the complementary predicate column, so
/// paths stay plain conjunctions. Each path rule is assigned to the
/// polarity its covered training rows favor, then the same min-support and
/// top-by-precision truncation as FP-Growth mining applies.
pub fn mine_candidates_rf(
    dataset: &BinarizedDataset,
    labels: &[u8],
    min_support_fraction: f64,
    max_length: usize,
    max_candidates: usize,
    seed: u64,
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
    let m = dataset.n_columns();
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = n - n_pos;
    let label_bits = [
        Bitset::from_fn(n, |i| labels[i] == 0),
        Bitset::from_fn(n, |i| labels[i] == 1),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut paths: BTreeSet<Vec<u32>> = BTreeSet::new();
    let feats_per_split = ((m as f64).sqrt().ceil() as usize).max(1);

    for _ in 0..TREES {
        let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        grow(
            dataset,
            labels,
            &rows,
            &mut Vec::new(),
            max_length,
            feats_per_split,
            &mut rng,
            &mut paths,
        );
    }

    let min_pos = ((min_support_fraction * n_pos as f64).ceil() as usize).max(1);
    let min_neg = ((min_support_fraction * n_neg as f64).ceil() as usize).max(1);
    let mut pos_heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut neg_heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    for items in paths {
        let mut bits = dataset.columns[items[0] as usize].clone();
        for &i in &items[1..] {
            bits.and_with(&dataset.columns[i as usize]);
        }
        let support_pos = bits.and_count(&label_bits[1]);
        let support_neg = bits.and_count(&label_bits[0]);
        let covered = support_pos + support_neg;
        if covered == 0 {
            continue;
        }
        let positive = support_pos >= support_neg;
        let (own, min_count, heap) = if positive {
            (support_pos, min_pos, &mut pos_heap)
        } else {
            (support_neg, min_neg, &mut neg_heap)
        };
        if own < min_count {
            continue;
        }
        push_bounded(
            heap,
            HeapEntry {
                precision: own as f64 / covered as f64,
                support: own,
                items,
                support_pos,
                support_neg,
                bits,
            },
            max_candidates,
        );
    }

    let (pos_candidates, pos_coverage) = drain_heap(pos_heap);
    let (neg_candidates, neg_coverage) = drain_heap(neg_heap);
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

#[allow(clippy::too_many_arguments)]
fn grow(
    dataset: &BinarizedDataset,
    labels: &[u8],
    rows: &[usize],
    path: &mut Vec<u32>,
    max_depth: usize,
    feats_per_split: usize,
    rng: &mut ChaCha8Rng,
    paths: &mut BTreeSet<Vec<u32>>,
) {
    if path.len() >= max_depth || rows.len() < MIN_NODE_ROWS {
        return;
    }
    let pos = rows.iter().filter(|&&i| labels[i] == 1).count();
    if pos == 0 || pos == rows.len() {
        return;
    }

    // random feature subset, deterministic given the rng state
    let m = dataset.n_columns();
    let mut cols: Vec<u32> = (0..m as u32).collect();
    for i in (1..m).rev() {
        let j = rng.gen_range(0..=i);
        cols.swap(i, j);
    }
    cols.truncate(feats_per_split);
    cols.sort_unstable();

    let gini = |p: usize, n: usize| -> f64 {
        if n == 0 {
            return 0.0;
        }
        let f = p as f64 / n as f64;
        2.0 * f * (1.0 - f)
    };
    let parent = gini(pos, rows.len());
    let mut best: Option<(f64, u32)> = None;
    for &c in &cols {
        let col = &dataset.columns[c as usize];
        let (mut tp, mut tn) = (0usize, 0usize);
        for &i in rows {
            if col.get(i) {
                tp += usize::from(labels[i] == 1);
                tn += 1;
            }
        }
        let fp = pos - tp;
        let fn_ = rows.len() - tn;
        if tn == 0 || fn_ == 0 {
            continue;
        }
        let w = tn as f64 / rows.len() as f64;
        let gain = parent - w * gini(tp, tn) - (1.0 - w) * gini(fp, fn_);
        if gain > 1e-12 && best.as_ref().is_none_or(|&(bg, _)| gain > bg) {
            best = Some((gain, c));
        }
    }
    let Some((_, c)) = best else { return };

    let col = &dataset.columns[c as usize];
    let (true_rows, false_rows): (Vec<usize>, Vec<usize>) =
        rows.iter().partition(|&&i| col.get(i));

    for (branch_col, branch_rows) in [
        (c, &true_rows),
        (dataset.complement_of(c as usize) as u32, &false_rows),
    ] {
        path.push(branch_col);
        let mut items = path.clone();
        items.sort_unstable();
        items.dedup();
        paths.insert(items);
        grow(
            dataset,
            labels,
            branch_rows,
            path,
            max_depth,
            feats_per_split,
            rng,
            paths,
        );
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{binarize, gen_checkers};
    use crate::rules::covers;

    #[test]
    fn rf_candidates_respect_constraints_and_are_deterministic() {
        let raw = gen_checkers(800, 5).unwrap();
        let bin = binarize(&raw, 9).unwrap();
        let a = mine_candidates_rf(&bin, &bin.labels, 0.05, 1, 500, 7).unwrap();
        let b = mine_candidates_rf(&bin, &bin.labels, 0.05, 1, 500, 7).unwrap();
        assert_eq!(a.pos_candidates, b.pos_candidates);
        assert_eq!(a.neg_candidates, b.neg_candidates);
        assert!(!a.is_empty());

        let n_pos = bin.labels.iter().filter(|&&y| y == 1).count();
        for (rule, bits) in a.pos_candidates.iter().zip(&a.pos_coverage) {
            assert!(rule.len() <= 1);
            assert!(rule.support_pos as f64 >= 0.05 * n_pos as f64);
            for row in (0..bin.n_rows()).step_by(13) {
                assert_eq!(bits.get(row), covers(rule, &bin, row).unwrap());
            }
        }
    }

    #[test]
    fn rf_depth_two_paths_are_conjunctions() {
        let raw = gen_checkers(600, 8).unwrap();
        let bin = binarize(&raw, 4).unwrap();
        let pool = mine_candidates_rf(&bin, &bin.labels, 0.05, 2, 500, 3).unwrap();
        assert!(pool
            .pos_candidates
            .iter()
            .chain(&pool.neg_candidates)
            .any(|r| r.len() == 2));
        assert!(pool
            .pos_candidates
            .iter()
            .chain(&pool.neg_candidates)
            .all(|r| r.len() <= 2));
    }
}
