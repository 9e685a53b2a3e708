//! FP-Growth frequent-itemset enumeration over boolean transactions.
//!
//! Itemsets are streamed to a callback instead of materialized; dense
//! predicate matrices can produce millions of frequent itemsets and the
//! caller keeps only a bounded top set.

use std::collections::BTreeMap;

#[derive(Debug)]
struct Node {
    item: u32,
    count: u64,
    parent: usize,
    children: Vec<(u32, usize)>,
}

struct Tree {
    nodes: Vec<Node>,
    /// item -> (total count, node indices), ascending item order
    header: BTreeMap<u32, (u64, Vec<usize>)>,
}

impl Tree {
    fn new() -> Tree {
        Tree {
            nodes: vec![Node {
                item: u32::MAX,
                count: 0,
                parent: usize::MAX,
                children: Vec::new(),
            }],
            header: BTreeMap::new(),
        }
    }

    /// Insert `items` (already sorted by the global frequency order) with
    /// a transaction multiplicity.
    fn insert(&mut self, items: &[u32], count: u64) {
        let mut at = 0;
        for &item in items {
            let found = self.nodes[at]
                .children
                .iter()
                .find(|(i, _)| *i == item)
                .map(|&(_, n)| n);
            let next = match found {
                Some(n) => {
                    self.nodes[n].count += count;
                    n
                }
                None => {
                    let n = self.nodes.len();
                    self.nodes.push(Node {
                        item,
                        count,
                        parent: at,
                        children: Vec::new(),
                    });
                    self.nodes[at].children.push((item, n));
                    self.header.entry(item).or_default().1.push(n);
                    n
                }
            };
            self.header.get_mut(&item).unwrap().0 += count;
            at = next;
        }
    }
}

/// Enumerate frequent itemsets of the given transactions.
///
/// `transactions[i]` is the sorted list of item ids present in row `i`.
/// Every itemset with support count >= `min_count` and length <=
/// `max_length` is passed to `emit` exactly once, as (sorted items,
/// support count).
pub fn enumerate_frequent(
    transactions: &[Vec<u32>],
    min_count: u64,
    max_length: usize,
    emit: &mut dyn FnMut(&[u32], u64),
) {
    if max_length == 0 || transactions.is_empty() {
        return;
    }
    // global item frequencies
    let mut freq: BTreeMap<u32, u64> = BTreeMap::new();
    for t in transactions {
        for &i in t {
            *freq.entry(i).or_default() += 1;
        }
    }
    // frequency-descending order, item id ascending on ties
    let mut order: Vec<(u32, u64)> = freq
        .iter()
        .filter(|(_, &c)| c >= min_count)
        .map(|(&i, &c)| (i, c))
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let rank: BTreeMap<u32, usize> = order.iter().enumerate().map(|(r, &(i, _))| (i, r)).collect();

    let mut tree = Tree::new();
    let mut buf = Vec::new();
    for t in transactions {
        buf.clear();
        buf.extend(t.iter().copied().filter(|i| rank.contains_key(i)));
        buf.sort_by_key(|i| rank[i]);
        if !buf.is_empty() {
            tree.insert(&buf, 1);
        }
    }

    let mut suffix = Vec::new();
    mine(&tree, min_count, max_length, &mut suffix, emit);
}

fn mine(
    tree: &Tree,
    min_count: u64,
    max_length: usize,
    suffix: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32], u64),
) {
    for (&item, (total, node_idxs)) in &tree.header {
        if *total < min_count {
            continue;
        }
        suffix.push(item);
        let mut sorted: Vec<u32> = suffix.clone();
        sorted.sort_unstable();
        emit(&sorted, *total);

        if suffix.len() < max_length {
            // conditional pattern base: prefix paths of this item's nodes
            let mut cond_freq: BTreeMap<u32, u64> = BTreeMap::new();
            let mut paths: Vec<(Vec<u32>, u64)> = Vec::new();
            for &n in node_idxs {
                let count = tree.nodes[n].count;
                let mut path = Vec::new();
                let mut at = tree.nodes[n].parent;
                while at != 0 {
                    path.push(tree.nodes[at].item);
                    at = tree.nodes[at].parent;
                }
                if !path.is_empty() {
                    path.reverse();
                    for &p in &path {
                        *cond_freq.entry(p).or_default() += count;
                    }
                    paths.push((path, count));
                }
            }
            let keep: BTreeMap<u32, u64> = cond_freq
                .into_iter()
                .filter(|(_, c)| *c >= min_count)
                .collect();
            if !keep.is_empty() {
                let mut rank: Vec<(u32, u64)> = keep.iter().map(|(&i, &c)| (i, c)).collect();
                rank.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                let rank: BTreeMap<u32, usize> =
                    rank.iter().enumerate().map(|(r, &(i, _))| (i, r)).collect();
                let mut cond = Tree::new();
                let mut buf = Vec::new();
                for (path, count) in &paths {
                    buf.clear();
                    buf.extend(path.iter().copied().filter(|i| rank.contains_key(i)));
                    buf.sort_by_key(|i| rank[i]);
                    if !buf.is_empty() {
                        cond.insert(&buf, *count);
                    }
                }
                mine(&cond, min_count, max_length, suffix, emit);
            }
        }
        suffix.pop();
    }
}
