//! Dataset representation, binarization, synthetic generators, CSV
//! ingestion, and train/test splitting.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::{Error, Result};

/// A tabular dataset: real-valued feature rows plus binary labels.
#[derive(Debug, Clone)]
pub struct RawDataset {
    pub feature_names: Vec<String>,
    /// Row-major, `n x d`.
    pub rows: Vec<Vec<f64>>,
    /// One 0/1 label per row.
    pub labels: Vec<u8>,
}

impl RawDataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        let d = feature_names.len();
        if rows.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::Data(format!(
                "row {bad} has {} entries, expected {d}",
                rows[bad].len()
            )));
        }
        if let Some(bad) = labels.iter().position(|&y| y > 1) {
            return Err(Error::Data(format!("label at row {bad} is not 0/1")));
        }
        Ok(RawDataset {
            feature_names,
            rows,
            labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    /// New dataset holding only the given rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> RawDataset {
        RawDataset {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Write as CSV: feature columns in order, then a `label` column.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{},label", self.feature_names.join(","))?;
        for (row, y) in self.rows.iter().zip(&self.labels) {
            for v in row {
                write!(out, "{v},")?;
            }
            writeln!(out, "{y}")?;
        }
        Ok(())
    }
}

/// Comparison direction of a threshold predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Geq,
    Lt,
}

/// A single threshold test on one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub feature_index: usize,
    pub direction: Direction,
    pub threshold: f64,
}

impl Predicate {
    #[inline]
    pub fn eval(&self, row: &[f64]) -> bool {
        match self.direction {
            Direction::Geq => row[self.feature_index] >= self.threshold,
            Direction::Lt => row[self.feature_index] < self.threshold,
        }
    }

    pub fn describe(&self, feature_names: &[String]) -> String {
        let op = match self.direction {
            Direction::Geq => ">=",
            Direction::Lt => "<",
        };
        format!(
            "{} {op} {}",
            feature_names[self.feature_index], self.threshold
        )
    }
}

/// Boolean predicate-column view of a [`RawDataset`].
///
/// Columns come in complementary Geq/Lt pairs at adjacent indices, so
/// `j ^ 1` is always the complement of column `j`.
#[derive(Debug, Clone)]
pub struct BinarizedDataset {
    pub predicates: Vec<Predicate>,
    /// Column-major bit matrix; `columns[j].get(i)` is predicate `j` on row `i`.
    pub columns: Vec<Bitset>,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
}

impl BinarizedDataset {
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_columns(&self) -> usize {
        self.predicates.len()
    }

    /// Index of the complementary predicate column.
    pub fn complement_of(&self, col: usize) -> usize {
        col ^ 1
    }

    /// Evaluate predicates of an existing schema on new raw rows.
    pub fn from_predicates(
        predicates: Vec<Predicate>,
        feature_names: Vec<String>,
        raw: &RawDataset,
    ) -> Result<Self> {
        if raw.n_rows() == 0 {
            return Err(Error::EmptyInput);
        }
        for p in &predicates {
            if p.feature_index >= raw.n_features() {
                return Err(Error::Data(format!(
                    "predicate feature index {} out of range",
                    p.feature_index
                )));
            }
        }
        let n = raw.n_rows();
        let columns = predicates
            .iter()
            .map(|p| Bitset::from_fn(n, |i| p.eval(&raw.rows[i])))
            .collect();
        Ok(BinarizedDataset {
            predicates,
            columns,
            labels: raw.labels.clone(),
            feature_names,
        })
    }
}

/// Linear-interpolation quantile of already-sorted values (numpy default).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let t = h - lo as f64;
    sorted[lo] * (1.0 - t) + sorted[hi] * t
}

/// Binarize each feature into paired `>= t` / `< t` threshold columns.
///
/// Non-boolean features get thresholds at the k/(bins+1) quantiles,
/// k = 1..bins; 0/1 features get one identity column plus its negation.
/// Constant features contribute no columns (warned); duplicate thresholds
/// from tied quantiles are collapsed.
pub fn binarize(raw: &RawDataset, bins_per_feature: usize) -> Result<BinarizedDataset> {
    if raw.n_rows() == 0 {
        return Err(Error::EmptyInput);
    }
    if bins_per_feature == 0 {
        return Err(Error::Config("bins_per_feature must be >= 1".into()));
    }
    let n = raw.n_rows();
    let mut predicates = Vec::new();
    for f in 0..raw.n_features() {
        let mut values: Vec<f64> = raw.rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        if values[0] == values[n - 1] {
            log::warn!(
                "feature '{}' is constant; emitting no predicate columns",
                raw.feature_names[f]
            );
            continue;
        }
        let is_boolean = values.iter().all(|&v| v == 0.0 || v == 1.0);
        let thresholds: Vec<f64> = if is_boolean {
            vec![0.5]
        } else {
            let mut ts: Vec<f64> = (1..=bins_per_feature)
                .map(|k| quantile_sorted(&values, k as f64 / (bins_per_feature + 1) as f64))
                .collect();
            ts.dedup();
            ts
        };
        for t in thresholds {
            predicates.push(Predicate {
                feature_index: f,
                direction: Direction::Geq,
                threshold: t,
            });
            predicates.push(Predicate {
                feature_index: f,
                direction: Direction::Lt,
                threshold: t,
            });
        }
    }
    BinarizedDataset::from_predicates(predicates, raw.feature_names.clone(), raw)
}

/// Label rule of the two-feature checkerboard dataset.
///
/// The two indicator products can both fire only on the measure-zero
/// boundary x = 1; the sum is clamped to keep labels binary.
pub fn checkers_label(x1: f64, x2: f64) -> u8 {
    let a = u8::from(x1 <= 1.0) * u8::from(x2 >= 1.0);
    let b = u8::from(x1 >= 1.0) * u8::from(x2 <= 1.0);
    (a + b).min(1)
}

/// Two features i.i.d. Uniform(0,2), checkerboard labels.
pub fn gen_checkers(n: usize, seed: u64) -> Result<RawDataset> {
    if n == 0 {
        return Err(Error::Config("n must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x1: f64 = rng.gen::<f64>() * 2.0;
        let x2: f64 = rng.gen::<f64>() * 2.0;
        labels.push(checkers_label(x1, x2));
        rows.push(vec![x1, x2]);
    }
    RawDataset::new(vec!["x1".into(), "x2".into()], rows, labels)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Sample median (mean of the two middle order statistics when n is even).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// 20 standard-normal features; the label depends on the feature sum and
/// on normal densities of grouped feature sums, thresholded at sample
/// medians computed over the generated pool.
pub fn gen_gaussian(n: usize, seed: u64) -> Result<RawDataset> {
    if n == 0 {
        return Err(Error::Config("n must be >= 1".into()));
    }
    const D: usize = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..D).map(|_| rng.sample(StandardNormal)).collect())
        .collect();

    let sum_range = |r: &[f64], lo: usize, hi: usize| -> f64 { r[lo..hi].iter().sum() };
    let v1: Vec<f64> = rows.iter().map(|r| normal_pdf(sum_range(r, 0, 2))).collect();
    let v2: Vec<f64> = rows
        .iter()
        .map(|r| {
            normal_pdf(sum_range(r, 0, 4))
                + normal_pdf(sum_range(r, 4, 8))
                + normal_pdf(sum_range(r, 8, 16))
                + normal_pdf(sum_range(r, 16, 20))
        })
        .collect();
    let m1 = median(&v1);
    let m2 = median(&v2);
    let labels: Vec<u8> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let total: f64 = r.iter().sum();
            u8::from((total < 0.0 && v1[i] > m1) || (total >= 0.0 && v2[i] < m2))
        })
        .collect();

    let names = (1..=D).map(|i| format!("x{i}")).collect();
    RawDataset::new(names, rows, labels)
}

/// Train/test split parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

/// Disjoint, exhaustive, seeded-shuffle split into (train, test) indices.
pub fn split(raw: &RawDataset, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = raw.n_rows();
    if n < 2 {
        return Err(Error::Data("cannot split fewer than 2 rows".into()));
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Config("train_fraction must be in (0,1)".into()));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    // Fisher-Yates
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        indices.swap(i, j);
    }
    let k = ((spec.train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let test = indices.split_off(k);
    Ok((indices, test))
}

/// Load a CSV with a header row. Categorical columns (any cell that fails
/// numeric parsing) are one-hot encoded as `col_value` features; the label
/// column must be binary after mapping (numeric 0/1, or exactly two
/// distinct strings mapped in sorted order).
pub fn load_csv(path: &Path, label_column: &str) -> Result<RawDataset> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Data(format!("label column '{label_column}' not found")))?;

    let mut records: Vec<Vec<String>> = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        records.push(rec.iter().map(str::to_string).collect());
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }

    // Label mapping.
    let raw_labels: Vec<&str> = records.iter().map(|r| r[label_idx].as_str()).collect();
    let numeric_binary = raw_labels
        .iter()
        .all(|s| matches!(s.trim().parse::<f64>(), Ok(v) if v == 0.0 || v == 1.0));
    let labels: Vec<u8> = if numeric_binary {
        raw_labels
            .iter()
            .map(|s| u8::from(s.trim().parse::<f64>().unwrap() == 1.0))
            .collect()
    } else {
        let mut distinct: Vec<&str> = raw_labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != 2 {
            return Err(Error::Data(format!(
                "label column '{label_column}' has {} distinct values; expected a binary column",
                distinct.len()
            )));
        }
        raw_labels
            .iter()
            .map(|s| u8::from(*s == distinct[1]))
            .collect()
    };

    // Column typing: categorical iff any cell fails numeric parsing.
    let mut feature_names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (c, name) in headers.iter().enumerate() {
        if c == label_idx {
            continue;
        }
        let cells: Vec<&str> = records.iter().map(|r| r[c].trim()).collect();
        let parsed: Vec<Option<f64>> = cells.iter().map(|s| s.parse::<f64>().ok()).collect();
        if parsed.iter().all(Option::is_some) {
            feature_names.push(name.clone());
            columns.push(parsed.into_iter().map(Option::unwrap).collect());
        } else if cells.iter().any(|s| s.is_empty()) {
            let row = cells.iter().position(|s| s.is_empty()).unwrap();
            return Err(Error::CsvCell {
                row: row + 2, // 1-based, after header
                column: name.clone(),
                message: "empty cell".into(),
            });
        } else {
            let mut levels: Vec<&str> = cells.clone();
            levels.sort_unstable();
            levels.dedup();
            for level in levels {
                feature_names.push(format!("{name}_{level}"));
                columns.push(cells.iter().map(|s| f64::from(*s == level)).collect());
            }
        }
    }

    let n = records.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    RawDataset::new(feature_names, rows, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn binarize_median_threshold() {
        let raw = RawDataset::new(
            vec!["x0".into()],
            vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]],
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let bin = binarize(&raw, 1).unwrap();
        assert_eq!(bin.predicates.len(), 2);
        assert_eq!(bin.predicates[0].threshold, 1.5);
        assert_eq!(bin.predicates[0].direction, Direction::Geq);
        assert_eq!(bin.predicates[1].direction, Direction::Lt);
        let geq: Vec<bool> = (0..4).map(|i| bin.columns[0].get(i)).collect();
        let lt: Vec<bool> = (0..4).map(|i| bin.columns[1].get(i)).collect();
        assert_eq!(geq, vec![false, false, true, true]);
        assert_eq!(lt, vec![true, true, false, false]);
    }

    #[test]
    fn binarize_boolean_feature_gets_complement_pair() {
        let raw = RawDataset::new(
            vec!["b".into()],
            vec![vec![0.0], vec![1.0], vec![1.0]],
            vec![0, 1, 1],
        )
        .unwrap();
        let bin = binarize(&raw, 9).unwrap();
        assert_eq!(bin.n_columns(), 2);
        for i in 0..3 {
            assert_ne!(bin.columns[0].get(i), bin.columns[1].get(i));
            assert_eq!(bin.columns[0].get(i), raw.rows[i][0] == 1.0);
        }
    }

    #[test]
    fn binarize_constant_feature_emits_nothing() {
        let raw = RawDataset::new(
            vec!["c".into(), "x".into()],
            vec![vec![5.0, 0.0], vec![5.0, 1.0], vec![5.0, 2.0]],
            vec![0, 1, 1],
        )
        .unwrap();
        let bin = binarize(&raw, 2).unwrap();
        assert!(bin.predicates.iter().all(|p| p.feature_index == 1));
    }

    #[test]
    fn binarize_empty_errors() {
        let raw = RawDataset::new(vec!["x".into()], vec![], vec![]).unwrap();
        assert!(matches!(binarize(&raw, 3), Err(Error::EmptyInput)));
    }

    #[test]
    fn binarized_columns_rederivable_from_predicates() {
        let raw = gen_checkers(200, 3).unwrap();
        let bin = binarize(&raw, 5).unwrap();
        for (j, p) in bin.predicates.iter().enumerate() {
            for i in 0..raw.n_rows() {
                assert_eq!(bin.columns[j].get(i), p.eval(&raw.rows[i]), "col {j} row {i}");
            }
            // complementary column exists at the paired index
            let c = bin.complement_of(j);
            assert_eq!(bin.predicates[c].feature_index, p.feature_index);
            assert_eq!(bin.predicates[c].threshold, p.threshold);
            assert_ne!(bin.predicates[c].direction, p.direction);
        }
    }

    #[test]
    fn checkers_label_known_points() {
        assert_eq!(checkers_label(0.5, 1.5), 1);
        assert_eq!(checkers_label(1.5, 1.5), 0);
        assert_eq!(checkers_label(1.5, 0.5), 1);
        assert_eq!(checkers_label(0.5, 0.5), 0);
        // boundary: both indicators fire, clamped
        assert_eq!(checkers_label(1.0, 1.0), 1);
    }

    #[test]
    fn gen_checkers_labels_match_formula_and_are_deterministic() {
        let a = gen_checkers(500, 42).unwrap();
        let b = gen_checkers(500, 42).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.labels, b.labels);
        for (row, &y) in a.rows.iter().zip(&a.labels) {
            assert!(row[0] >= 0.0 && row[0] < 2.0);
            assert_eq!(y, checkers_label(row[0], row[1]));
        }
    }

    #[test]
    fn checkers_quantile_thresholds_express_label() {
        let raw = gen_checkers(4000, 7).unwrap();
        let bin = binarize(&raw, 9).unwrap();
        // thresholds should sit near 0.2, 0.4, ..., 1.8 per feature
        for f in 0..2 {
            let mut ts: Vec<f64> = bin
                .predicates
                .iter()
                .filter(|p| p.feature_index == f && p.direction == Direction::Geq)
                .map(|p| p.threshold)
                .collect();
            ts.sort_by(f64::total_cmp);
            assert_eq!(ts.len(), 9);
            for (k, t) in ts.iter().enumerate() {
                let expect = 0.2 * (k + 1) as f64;
                assert!((t - expect).abs() < 0.05, "threshold {t} vs {expect}");
            }
        }
        // the ~1.0 thresholds suffice to express the label
        let t1 = bin
            .predicates
            .iter()
            .find(|p| p.feature_index == 0 && (p.threshold - 1.0).abs() < 0.05)
            .unwrap()
            .threshold;
        let t2 = bin
            .predicates
            .iter()
            .find(|p| p.feature_index == 1 && (p.threshold - 1.0).abs() < 0.05)
            .unwrap()
            .threshold;
        let mismatch = raw
            .rows
            .iter()
            .zip(&raw.labels)
            .filter(|(r, &y)| {
                let pred = u8::from((r[0] < t1 && r[1] >= t2) || (r[0] >= t1 && r[1] < t2));
                pred != y
            })
            .count();
        assert!(
            (mismatch as f64) < 0.03 * raw.n_rows() as f64,
            "{mismatch} mismatches"
        );
    }

    #[test]
    fn gen_gaussian_shape_and_reference_reimplementation() {
        let raw = gen_gaussian(100, 11).unwrap();
        assert_eq!(raw.n_features(), 20);
        assert_eq!(raw.n_rows(), 100);
        assert!(raw.labels.iter().all(|&y| y <= 1));

        // straight-line reimplementation of the label pipeline
        let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut v1 = Vec::new();
        let mut v2 = Vec::new();
        for r in &raw.rows {
            v1.push(phi(r[0] + r[1]));
            let s = |lo: usize, hi: usize| r[lo..hi].iter().sum::<f64>();
            v2.push(phi(s(0, 4)) + phi(s(4, 8)) + phi(s(8, 16)) + phi(s(16, 20)));
        }
        let med = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            0.5 * (v[49] + v[50])
        };
        let (m1, m2) = (med(&v1), med(&v2));
        for (i, r) in raw.rows.iter().enumerate() {
            let total: f64 = r.iter().sum();
            let want = u8::from((total < 0.0 && v1[i] > m1) || (total >= 0.0 && v2[i] < m2));
            assert_eq!(raw.labels[i], want, "row {i}");
        }
    }

    #[test]
    fn gen_gaussian_subset_fraction_identity() {
        let raw = gen_gaussian(600, 5).unwrap();
        let phi = normal_pdf;
        let v1: Vec<f64> = raw.rows.iter().map(|r| phi(r[0] + r[1])).collect();
        let m1 = median(&v1);
        let neg: Vec<usize> = (0..raw.n_rows())
            .filter(|&i| raw.rows[i].iter().sum::<f64>() < 0.0)
            .collect();
        let frac_y1 = neg.iter().filter(|&&i| raw.labels[i] == 1).count() as f64;
        let frac_v1 = neg.iter().filter(|&&i| v1[i] > m1).count() as f64;
        assert_eq!(frac_y1, frac_v1);
    }

    #[test]
    fn split_basic_properties() {
        let raw = gen_checkers(10, 1).unwrap();
        let spec = SplitSpec {
            train_fraction: 0.8,
            seed: 9,
        };
        let (train, test) = split(&raw, &spec).unwrap();
        assert_eq!(train.len(), 8);
        assert_eq!(test.len(), 2);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        let (train2, test2) = split(&raw, &spec).unwrap();
        assert_eq!(train, train2);
        assert_eq!(test, test2);
    }

    #[test]
    fn split_checkers_paper_sizes() {
        let raw = gen_checkers(4800, 2).unwrap();
        let spec = SplitSpec {
            train_fraction: 4000.0 / 4800.0,
            seed: 0,
        };
        let (train, test) = split(&raw, &spec).unwrap();
        assert_eq!(train.len(), 4000);
        assert_eq!(test.len(), 800);
    }

    #[test]
    fn split_too_small_errors() {
        let raw = RawDataset::new(vec!["x".into()], vec![vec![1.0]], vec![0]).unwrap();
        assert!(split(
            &raw,
            &SplitSpec {
                train_fraction: 0.5,
                seed: 0
            }
        )
        .is_err());
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn load_csv_numeric_and_binary_label() {
        let f = write_temp("x,label\n1.5,0\n2.5,1\n");
        let raw = load_csv(f.path(), "label").unwrap();
        assert_eq!(raw.n_features(), 1);
        assert_eq!(raw.n_rows(), 2);
        assert_eq!(raw.labels, vec![0, 1]);
        assert_eq!(raw.rows[0][0], 1.5);
    }

    #[test]
    fn load_csv_one_hot_categorical() {
        let f = write_temp("color,label\nred,0\ngreen,1\nblue,1\nred,0\n");
        let raw = load_csv(f.path(), "label").unwrap();
        assert_eq!(raw.n_features(), 3);
        assert!(raw.feature_names.contains(&"color_red".to_string()));
        // row order preserved; one-hot is exclusive
        for row in &raw.rows {
            assert_eq!(row.iter().sum::<f64>(), 1.0);
        }
        assert_eq!(raw.rows[0][raw.feature_index("color_red").unwrap()], 1.0);
    }

    #[test]
    fn load_csv_string_binary_label_maps_sorted() {
        let f = write_temp("x,outcome\n1,bad\n2,good\n");
        let raw = load_csv(f.path(), "outcome").unwrap();
        assert_eq!(raw.labels, vec![0, 1]); // "bad" < "good"
    }

    #[test]
    fn load_csv_errors() {
        let f = write_temp("x,label\n1,0\n2,1\n");
        assert!(load_csv(f.path(), "missing").is_err());
        let f2 = write_temp("x,label\n1,0\n2,2\n3,1\n");
        assert!(load_csv(f2.path(), "label").is_err());
        let f3 = write_temp("x,label\n1,0\n,1\n");
        let err = load_csv(f3.path(), "label").unwrap_err();
        assert!(matches!(err, Error::CsvCell { row: 3, .. }), "{err}");
    }
}
