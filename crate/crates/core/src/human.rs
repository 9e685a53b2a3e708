//! Simulated human partners: per-instance decisions, deterministic
//! accept/reject behavior towards contradicting recommendations, and
//! calibrated confidence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::RawDataset;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmpOp {
    #[serde(alias = ">=")]
    Ge,
    #[serde(alias = ">")]
    Gt,
    #[serde(alias = "<")]
    Lt,
    #[serde(alias = "<=")]
    Le,
    #[serde(alias = "=", alias = "==")]
    Eq,
}

impl CmpOp {
    fn apply(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
        }
    }
}

/// Declarative boolean condition over named features of a raw row.
///
/// Serialized form: `{feature, op, value}` or `{feature, op, other}` for
/// feature-vs-feature comparisons, `{sum: [...], op, value}` for a
/// comparison on a feature sum, combined with `{all: [...]}`,
/// `{any: [...]}` and `{not: ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConditionNode {
    CmpFeature {
        feature: String,
        op: CmpOp,
        other: String,
    },
    Cmp {
        feature: String,
        op: CmpOp,
        value: f64,
    },
    SumCmp {
        sum: Vec<String>,
        op: CmpOp,
        value: f64,
    },
    All {
        all: Vec<ConditionNode>,
    },
    Any {
        any: Vec<ConditionNode>,
    },
    Not {
        not: Box<ConditionNode>,
    },
}

impl ConditionNode {
    pub fn eval(&self, raw: &RawDataset, row: &[f64]) -> Result<bool> {
        let idx = |name: &str| {
            raw.feature_index(name)
                .ok_or_else(|| Error::Config(format!("unknown feature '{name}' in condition")))
        };
        Ok(match self {
            ConditionNode::Cmp { feature, op, value } => op.apply(row[idx(feature)?], *value),
            ConditionNode::CmpFeature { feature, op, other } => {
                op.apply(row[idx(feature)?], row[idx(other)?])
            }
            ConditionNode::SumCmp { sum, op, value } => {
                let mut s = 0.0;
                for name in sum {
                    s += row[idx(name)?];
                }
                op.apply(s, *value)
            }
            ConditionNode::All { all } => {
                for c in all {
                    if !c.eval(raw, row)? {
                        return Ok(false);
                    }
                }
                true
            }
            ConditionNode::Any { any } => {
                for c in any {
                    if c.eval(raw, row)? {
                        return Ok(true);
                    }
                }
                false
            }
            ConditionNode::Not { not } => !not.eval(raw, row)?,
        })
    }
}

/// A region of the instance space.
///
/// Either a declarative condition tree, or a band on a fitted surrogate
/// classifier's decisiveness score `2|p(y|x) - 0.5|` (half-open: `lo < s
/// <= hi`), which is how the surrogate-human accuracy regions are defined.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionSpec {
    ModelBand { lo: f64, hi: f64 },
    Condition(ConditionNode),
}

/// What the simulated human does inside one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionDecision {
    /// Decide correctly with this probability, otherwise flip the label.
    Accuracy(f64),
    /// Copy the surrogate classifier's own thresholded decision.
    ModelDecision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdbMode {
    Rational,
    Neutral,
    Irrational,
}

/// Plain logistic regression on standardized features, used as the
/// surrogate decision model behind real-dataset and Gaussian humans.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub converged: bool,
}

impl LogisticModel {
    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let mut z = self.bias;
        for ((&x, &m), (&s, &w)) in row
            .iter()
            .zip(&self.means)
            .zip(self.stds.iter().zip(&self.weights))
        {
            z += w * (x - m) / s;
        }
        1.0 / (1.0 + (-z).exp())
    }

    /// Decisiveness score `2|p - 0.5|` in [0, 1].
    pub fn decisiveness(&self, row: &[f64]) -> f64 {
        2.0 * (self.predict_proba(row) - 0.5).abs()
    }

    /// Full-batch gradient descent with L2 regularization. Returns the best
    /// iterate even when the gradient has not converged (with a warning).
    pub fn fit(rows: &[Vec<f64>], labels: &[u8]) -> LogisticModel {
        let n = rows.len();
        let d = rows[0].len();
        let mut means = vec![0.0; d];
        let mut stds = vec![0.0; d];
        for row in rows {
            for (m, &x) in means.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in &mut means {
            *m /= n as f64;
        }
        for row in rows {
            for ((s, m), &x) in stds.iter_mut().zip(&means).zip(row) {
                *s += (x - *m) * (x - *m);
            }
        }
        for s in &mut stds {
            *s = (*s / n as f64).sqrt();
            if *s < 1e-12 {
                *s = 1.0;
            }
        }
        let std_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(means.iter().zip(&stds))
                    .map(|(&x, (&m, &s))| (x - m) / s)
                    .collect()
            })
            .collect();

        let l2 = 1e-4;
        let lr = 0.5;
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut converged = false;
        for _ in 0..2000 {
            let mut gw = vec![0.0; d];
            let mut gb = 0.0;
            for (row, &y) in std_rows.iter().zip(labels) {
                let z: f64 = b + row.iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>();
                let p = 1.0 / (1.0 + (-z).exp());
                let err = p - f64::from(y);
                for (g, &x) in gw.iter_mut().zip(row) {
                    *g += err * x;
                }
                gb += err;
            }
            gb /= n as f64;
            let mut norm2 = gb * gb;
            for (g, wi) in gw.iter_mut().zip(&w) {
                *g = *g / n as f64 + l2 * wi;
                norm2 += *g * *g;
            }
            for (wi, g) in w.iter_mut().zip(&gw) {
                *wi -= lr * g;
            }
            b -= lr * gb;
            if norm2.sqrt() < 1e-6 {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!("logistic surrogate did not converge; using best iterate");
        }
        LogisticModel {
            weights: w,
            bias: b,
            means,
            stds,
            converged,
        }
    }
}

/// Full description of one simulated human: accuracy regions plus
/// deterministic algorithm-discretion behavior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BehaviorSpec {
    pub accuracy_regions: Vec<(RegionSpec, RegionDecision)>,
    pub adb_mode: AdbMode,
    pub neutral_region: Option<RegionSpec>,
    /// Present when regions are model bands.
    pub surrogate: Option<LogisticModel>,
}

impl BehaviorSpec {
    fn region_matches(&self, region: &RegionSpec, raw: &RawDataset, row: &[f64]) -> Result<bool> {
        match region {
            RegionSpec::Condition(c) => c.eval(raw, row),
            RegionSpec::ModelBand { lo, hi } => {
                let model = self.surrogate.as_ref().ok_or_else(|| {
                    Error::Config("model-band region requires a fitted surrogate".into())
                })?;
                let s = model.decisiveness(row);
                Ok(s > *lo && s <= *hi)
            }
        }
    }

    /// Index of the first region matching the row.
    fn region_of(&self, raw: &RawDataset, row_idx: usize) -> Result<usize> {
        let row = &raw.rows[row_idx];
        for (k, (region, _)) in self.accuracy_regions.iter().enumerate() {
            if self.region_matches(region, raw, row)? {
                return Ok(k);
            }
        }
        Err(Error::UncoveredRow(row_idx))
    }

    fn region_of_values(&self, raw: &RawDataset, row: &[f64]) -> Result<usize> {
        for (k, (region, _)) in self.accuracy_regions.iter().enumerate() {
            if self.region_matches(region, raw, row)? {
                return Ok(k);
            }
        }
        Err(Error::Data("row matched by no behavior region".into()))
    }

    fn validate(&self) -> Result<()> {
        if self.accuracy_regions.is_empty() {
            return Err(Error::Config("behavior needs at least one region".into()));
        }
        if self.adb_mode == AdbMode::Neutral && self.neutral_region.is_none() {
            return Err(Error::Config("neutral ADB requires neutral_region".into()));
        }
        Ok(())
    }

    /// Regions with the lowest stated accuracy; rational humans accept there.
    fn lowest_accuracy(&self) -> Option<f64> {
        self.accuracy_regions
            .iter()
            .filter_map(|(_, d)| match d {
                RegionDecision::Accuracy(a) => Some(*a),
                RegionDecision::ModelDecision => None,
            })
            .min_by(f64::total_cmp)
    }

    /// True accept behavior for one row: whether this human would accept a
    /// contradicting recommendation. Deterministic.
    pub fn accepts_row(&self, raw: &RawDataset, row_idx: usize) -> Result<bool> {
        self.accepts_row_values(raw, &raw.rows[row_idx])
            .map_err(|e| match e {
                Error::Data(_) => Error::UncoveredRow(row_idx),
                other => other,
            })
    }

    /// Same as [`accepts_row`](Self::accepts_row) but for a raw feature row
    /// that need not belong to the dataset (`raw` supplies feature names).
    pub fn accepts_row_values(&self, raw: &RawDataset, row: &[f64]) -> Result<bool> {
        self.validate()?;
        match self.adb_mode {
            AdbMode::Neutral => {
                let region = self.neutral_region.as_ref().unwrap();
                self.region_matches(region, raw, row)
            }
            AdbMode::Rational | AdbMode::Irrational => {
                let low = self
                    .lowest_accuracy()
                    .ok_or_else(|| Error::Config("no accuracy regions defined".into()))?;
                let k = self.region_of_values(raw, row)?;
                let in_low = matches!(
                    self.accuracy_regions[k].1,
                    RegionDecision::Accuracy(a) if a == low
                );
                Ok(match self.adb_mode {
                    AdbMode::Rational => in_low,
                    _ => !in_low,
                })
            }
        }
    }
}

/// One simulated human's data: decisions `h`, true accept behavior `a`,
/// and optional confidence, aligned with the rows of the source dataset.
#[derive(Debug, Clone)]
pub struct HumanProfile {
    pub decisions: Vec<u8>,
    pub accepts: Vec<u8>,
    pub confidence: Option<Vec<f64>>,
    pub seed: u64,
    /// The generating behavior, kept so a perfect-oracle discretion model
    /// can evaluate unseen rows.
    pub behavior: BehaviorSpec,
}

impl HumanProfile {
    /// Simulate decisions, accepts, and confidence for every row.
    pub fn simulate(raw: &RawDataset, spec: &BehaviorSpec, seed: u64) -> Result<HumanProfile> {
        let decisions = simulate_decisions(raw, spec, seed)?;
        let accepts = simulate_adb(raw, spec)?;
        let confidence = record_confidence(spec, raw)?;
        Ok(HumanProfile {
            decisions,
            accepts,
            confidence: Some(confidence),
            seed,
            behavior: spec.clone(),
        })
    }

    /// Fraction of rows where the human decision disagrees with the label.
    pub fn standalone_loss(&self, labels: &[u8]) -> f64 {
        let wrong = self
            .decisions
            .iter()
            .zip(labels)
            .filter(|(h, y)| h != y)
            .count();
        wrong as f64 / labels.len() as f64
    }
}

/// Per-row human decisions: in a region with accuracy `p`, the decision
/// equals the label with probability `p` and is flipped otherwise.
pub fn simulate_decisions(raw: &RawDataset, spec: &BehaviorSpec, seed: u64) -> Result<Vec<u8>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(raw.n_rows());
    for i in 0..raw.n_rows() {
        let k = spec.region_of(raw, i)?;
        let y = raw.labels[i];
        let h = match spec.accuracy_regions[k].1 {
            RegionDecision::Accuracy(p) => {
                if rng.gen::<f64>() < p {
                    y
                } else {
                    1 - y
                }
            }
            RegionDecision::ModelDecision => {
                let model = spec.surrogate.as_ref().ok_or_else(|| {
                    Error::Config("model-decision region requires a surrogate".into())
                })?;
                u8::from(model.predict_proba(&raw.rows[i]) >= 0.5)
            }
        };
        out.push(h);
    }
    Ok(out)
}

/// Deterministic accept/reject vector for the spec's ADB mode.
pub fn simulate_adb(raw: &RawDataset, spec: &BehaviorSpec) -> Result<Vec<u8>> {
    (0..raw.n_rows())
        .map(|i| spec.accepts_row(raw, i).map(u8::from))
        .collect()
}

/// Calibrated confidence: each instance gets its region's accuracy; rows
/// in model-decision regions get the surrogate's own decisiveness-based
/// confidence `max(p, 1-p)`.
pub fn record_confidence(spec: &BehaviorSpec, raw: &RawDataset) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut out = Vec::with_capacity(raw.n_rows());
    for i in 0..raw.n_rows() {
        let k = spec.region_of(raw, i)?;
        out.push(match spec.accuracy_regions[k].1 {
            RegionDecision::Accuracy(p) => p,
            RegionDecision::ModelDecision => {
                let p = spec
                    .surrogate
                    .as_ref()
                    .ok_or_else(|| Error::Config("model-decision region requires a surrogate".into()))?
                    .predict_proba(&raw.rows[i]);
                p.max(1.0 - p)
            }
        });
    }
    Ok(out)
}

/// Accuracy band over the surrogate's decisiveness score.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BandSpec {
    pub lo: f64,
    pub hi: f64,
    pub decision: RegionDecision,
}

/// Build a surrogate human: fit a logistic model `p(y|x)` on a seeded
/// excluded subset of `fit_pool` rows, then define accuracy regions as
/// bands over `2|p - 0.5|`.
///
/// Returns the behavior spec plus the excluded row indices, which must not
/// be reused to train the advising model.
pub fn fit_surrogate_human(
    raw: &RawDataset,
    fit_pool: &[usize],
    holdout_fraction: f64,
    bands: &[BandSpec],
    adb_mode: AdbMode,
    neutral_region: Option<RegionSpec>,
    seed: u64,
) -> Result<(BehaviorSpec, Vec<usize>)> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(Error::Config("holdout_fraction must be in (0,1)".into()));
    }
    if bands.is_empty() {
        return Err(Error::Config("surrogate human needs at least one band".into()));
    }
    if fit_pool.len() < 2 {
        return Err(Error::Data("surrogate fit pool needs at least 2 rows".into()));
    }
    let mut pool: Vec<usize> = fit_pool.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..pool.len()).rev() {
        let j = rng.gen_range(0..=i);
        pool.swap(i, j);
    }
    let k = ((holdout_fraction * pool.len() as f64).round() as usize).clamp(1, pool.len() - 1);
    let excluded: Vec<usize> = pool[..k].to_vec();

    let fit_rows: Vec<Vec<f64>> = excluded.iter().map(|&i| raw.rows[i].clone()).collect();
    let fit_labels: Vec<u8> = excluded.iter().map(|&i| raw.labels[i]).collect();
    let model = LogisticModel::fit(&fit_rows, &fit_labels);

    let accuracy_regions = bands
        .iter()
        .map(|b| (RegionSpec::ModelBand { lo: b.lo, hi: b.hi }, b.decision))
        .collect();
    let spec = BehaviorSpec {
        accuracy_regions,
        adb_mode,
        neutral_region,
        surrogate: Some(model),
    };
    Ok((spec, excluded))
}

/// Canned behavior definitions for the synthetic datasets.
pub mod presets {
    use super::*;

    /// Checkers: 80% accuracy where x1 > x2, 100% elsewhere; neutral
    /// humans accept where x1 >= 1.
    pub fn checkers(adb_mode: AdbMode) -> BehaviorSpec {
        let low = ConditionNode::CmpFeature {
            feature: "x1".into(),
            op: CmpOp::Gt,
            other: "x2".into(),
        };
        BehaviorSpec {
            accuracy_regions: vec![
                (
                    RegionSpec::Condition(low.clone()),
                    RegionDecision::Accuracy(0.8),
                ),
                (
                    RegionSpec::Condition(ConditionNode::Not { not: Box::new(low) }),
                    RegionDecision::Accuracy(1.0),
                ),
            ],
            adb_mode,
            neutral_region: Some(RegionSpec::Condition(ConditionNode::Cmp {
                feature: "x1".into(),
                op: CmpOp::Ge,
                value: 1.0,
            })),
            surrogate: None,
        }
    }

    /// Gaussian-human bands: 50% accuracy where the surrogate is decisive
    /// (2|p-0.5| > 0.5), 100% elsewhere.
    pub fn gaussian_bands() -> Vec<BandSpec> {
        vec![
            BandSpec {
                lo: 0.5,
                hi: 1.0,
                decision: RegionDecision::Accuracy(0.5),
            },
            BandSpec {
                lo: -1.0,
                hi: 0.5,
                decision: RegionDecision::Accuracy(1.0),
            },
        ]
    }

    /// Neutral Gaussian humans accept where the feature sum is >= 0.
    pub fn gaussian_neutral_region() -> RegionSpec {
        RegionSpec::Condition(ConditionNode::SumCmp {
            sum: (1..=20).map(|i| format!("x{i}")).collect(),
            op: CmpOp::Ge,
            value: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_checkers;

    fn checkers_spec(mode: AdbMode) -> BehaviorSpec {
        presets::checkers(mode)
    }

    #[test]
    fn perfect_region_copies_labels() {
        let raw = gen_checkers(300, 1).unwrap();
        let spec = BehaviorSpec {
            accuracy_regions: vec![(
                RegionSpec::Condition(ConditionNode::Cmp {
                    feature: "x1".into(),
                    op: CmpOp::Ge,
                    value: -1.0,
                }),
                RegionDecision::Accuracy(1.0),
            )],
            adb_mode: AdbMode::Rational,
            neutral_region: None,
            surrogate: None,
        };
        let h = simulate_decisions(&raw, &spec, 4).unwrap();
        assert_eq!(h, raw.labels);
    }

    #[test]
    fn half_accuracy_region_near_half_agreement() {
        let raw = gen_checkers(4000, 2).unwrap();
        let spec = BehaviorSpec {
            accuracy_regions: vec![(
                RegionSpec::Condition(ConditionNode::Cmp {
                    feature: "x1".into(),
                    op: CmpOp::Ge,
                    value: -1.0,
                }),
                RegionDecision::Accuracy(0.5),
            )],
            adb_mode: AdbMode::Rational,
            neutral_region: None,
            surrogate: None,
        };
        let h = simulate_decisions(&raw, &spec, 6).unwrap();
        let agree = h.iter().zip(&raw.labels).filter(|(a, b)| a == b).count();
        let frac = agree as f64 / 4000.0;
        assert!((frac - 0.5).abs() < 0.025, "agreement {frac}");
    }

    #[test]
    fn checkers_region_accuracies_within_tolerance() {
        let raw = gen_checkers(4000, 3).unwrap();
        let spec = checkers_spec(AdbMode::Neutral);
        let h = simulate_decisions(&raw, &spec, 9).unwrap();
        let mut low = (0usize, 0usize);
        let mut high = (0usize, 0usize);
        for (i, row) in raw.rows.iter().enumerate() {
            let bucket = if row[0] > row[1] { &mut low } else { &mut high };
            bucket.0 += usize::from(h[i] == raw.labels[i]);
            bucket.1 += 1;
        }
        let low_acc = low.0 as f64 / low.1 as f64;
        let high_acc = high.0 as f64 / high.1 as f64;
        assert!((low_acc - 0.8).abs() < 0.02, "low-region accuracy {low_acc}");
        assert_eq!(high_acc, 1.0);
    }

    #[test]
    fn uncovered_row_error_names_row() {
        let raw = gen_checkers(10, 1).unwrap();
        let spec = BehaviorSpec {
            accuracy_regions: vec![(
                RegionSpec::Condition(ConditionNode::Cmp {
                    feature: "x1".into(),
                    op: CmpOp::Ge,
                    value: 100.0,
                }),
                RegionDecision::Accuracy(1.0),
            )],
            adb_mode: AdbMode::Rational,
            neutral_region: None,
            surrogate: None,
        };
        match simulate_decisions(&raw, &spec, 0) {
            Err(Error::UncoveredRow(0)) => {}
            other => panic!("expected UncoveredRow(0), got {other:?}"),
        }
    }

    #[test]
    fn adb_modes_checkers() {
        let raw = gen_checkers(500, 5).unwrap();
        let rational = simulate_adb(&raw, &checkers_spec(AdbMode::Rational)).unwrap();
        let irrational = simulate_adb(&raw, &checkers_spec(AdbMode::Irrational)).unwrap();
        let neutral = simulate_adb(&raw, &checkers_spec(AdbMode::Neutral)).unwrap();
        for (i, row) in raw.rows.iter().enumerate() {
            assert_eq!(rational[i] == 1, row[0] > row[1]);
            assert_eq!(irrational[i], 1 - rational[i]);
            assert_eq!(neutral[i] == 1, row[0] >= 1.0);
        }
        // deterministic
        assert_eq!(
            rational,
            simulate_adb(&raw, &checkers_spec(AdbMode::Rational)).unwrap()
        );
    }

    #[test]
    fn confidence_is_region_accuracy() {
        let raw = gen_checkers(200, 8).unwrap();
        let spec = checkers_spec(AdbMode::Neutral);
        let c = record_confidence(&spec, &raw).unwrap();
        assert_eq!(c.len(), raw.n_rows());
        for (i, row) in raw.rows.iter().enumerate() {
            let expect = if row[0] > row[1] { 0.8 } else { 1.0 };
            assert_eq!(c[i], expect);
        }
    }

    #[test]
    fn surrogate_bands_apply_stated_accuracy() {
        // hand-built surrogate: p depends only on x1, so decisiveness
        // bands are predictable per row
        let raw = gen_checkers(2000, 12).unwrap();
        let model = LogisticModel {
            weights: vec![4.0, 0.0],
            bias: 0.0,
            means: vec![1.0, 1.0],
            stds: vec![1.0, 1.0],
            converged: true,
        };
        let spec = BehaviorSpec {
            accuracy_regions: presets::gaussian_bands()
                .into_iter()
                .map(|b| (RegionSpec::ModelBand { lo: b.lo, hi: b.hi }, b.decision))
                .collect(),
            adb_mode: AdbMode::Rational,
            neutral_region: None,
            surrogate: Some(model.clone()),
        };
        let h = simulate_decisions(&raw, &spec, 3).unwrap();
        let mut confident = (0usize, 0usize);
        for (i, row) in raw.rows.iter().enumerate() {
            if model.decisiveness(row) > 0.5 {
                confident.0 += usize::from(h[i] == raw.labels[i]);
                confident.1 += 1;
            } else {
                assert_eq!(h[i], raw.labels[i], "indecisive band should be perfect");
            }
        }
        let acc = confident.0 as f64 / confident.1 as f64;
        assert!((acc - 0.5).abs() < 0.05, "confident-band accuracy {acc}");
        // rational humans accept exactly in the 50%-accuracy band
        let a = simulate_adb(&raw, &spec).unwrap();
        for (i, row) in raw.rows.iter().enumerate() {
            assert_eq!(a[i] == 1, model.decisiveness(row) > 0.5);
        }
    }

    #[test]
    fn model_decision_band_copies_surrogate() {
        let raw = gen_checkers(500, 13).unwrap();
        let model = LogisticModel {
            weights: vec![3.0, -3.0],
            bias: 0.0,
            means: vec![1.0, 1.0],
            stds: vec![1.0, 1.0],
            converged: true,
        };
        let spec = BehaviorSpec {
            accuracy_regions: vec![(
                RegionSpec::ModelBand { lo: -1.0, hi: 1.0 },
                RegionDecision::ModelDecision,
            )],
            adb_mode: AdbMode::Rational,
            neutral_region: None,
            surrogate: Some(model.clone()),
        };
        let h = simulate_decisions(&raw, &spec, 1).unwrap();
        for (i, row) in raw.rows.iter().enumerate() {
            assert_eq!(h[i], u8::from(model.predict_proba(row) >= 0.5));
        }
    }

    #[test]
    fn surrogate_fit_separable_and_excluded_disjoint() {
        // y = 1 iff x1 >= 1: linearly separable, logistic should learn it
        let raw = gen_checkers(1000, 21).unwrap();
        let raw = RawDataset::new(
            raw.feature_names.clone(),
            raw.rows.clone(),
            raw.rows.iter().map(|r| u8::from(r[0] >= 1.0)).collect(),
        )
        .unwrap();
        let pool: Vec<usize> = (0..800).collect();
        let (spec, excluded) = fit_surrogate_human(
            &raw,
            &pool,
            0.2,
            &presets::gaussian_bands(),
            AdbMode::Rational,
            None,
            17,
        )
        .unwrap();
        assert_eq!(excluded.len(), 160);
        assert!(excluded.iter().all(|i| pool.contains(i)));
        let model = spec.surrogate.as_ref().unwrap();
        let correct = raw
            .rows
            .iter()
            .zip(&raw.labels)
            .filter(|(r, &y)| u8::from(model.predict_proba(r) >= 0.5) == y)
            .count();
        assert!(correct as f64 / raw.n_rows() as f64 > 0.95);
    }

    #[test]
    fn condition_tree_serde_roundtrip() {
        let json = r#"{"all":[{"feature":"x1","op":">=","value":1.0},
                         {"not":{"feature":"x1","op":">","other":"x2"}}]}"#;
        let node: ConditionNode = serde_json::from_str(json).unwrap();
        let raw = gen_checkers(50, 2).unwrap();
        for row in &raw.rows {
            let want = row[0] >= 1.0 && !(row[0] > row[1]);
            assert_eq!(node.eval(&raw, row).unwrap(), want);
        }
        let back = serde_json::to_string(&node).unwrap();
        let node2: ConditionNode = serde_json::from_str(&back).unwrap();
        for row in &raw.rows {
            assert_eq!(
                node.eval(&raw, row).unwrap(),
                node2.eval(&raw, row).unwrap()
            );
        }
    }
}
