//! Discretion models: predictors of the probability that the human accepts
//! a contradicting recommendation, given the instance features.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::RawDataset;
use crate::human::HumanProfile;
use crate::{Error, Result};

/// One depth-1 tree: a single threshold split with a leaf value per side.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct Stump {
    feature: usize,
    threshold: f64,
    left_value: f64,
    right_value: f64,
}

impl Stump {
    #[inline]
    fn eval(&self, row: &[f64]) -> f64 {
        if row[self.feature] < self.threshold {
            self.left_value
        } else {
            self.right_value
        }
    }
}

/// Gradient-boosted decision stumps with logistic loss.
///
/// Each round fits one stump to the gradient/hessian of the logistic loss
/// and takes a damped Newton step per leaf. Deterministic given its inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoostedStumps {
    base_score: f64,
    learning_rate: f64,
    stumps: Vec<Stump>,
    n_features: usize,
}

const BOOST_ROUNDS: usize = 100;
const BOOST_LEARNING_RATE: f64 = 0.1;
const LEAF_REG: f64 = 1e-6;

impl BoostedStumps {
    pub fn fit(rows: &[Vec<f64>], labels: &[u8]) -> BoostedStumps {
        let n = rows.len();
        let d = rows[0].len();
        let pos = labels.iter().filter(|&&y| y == 1).count() as f64;
        let prior = (pos / n as f64).clamp(1e-6, 1.0 - 1e-6);
        let base_score = (prior / (1.0 - prior)).ln();

        // presort row indices per feature once
        let order: Vec<Vec<usize>> = (0..d)
            .map(|f| {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| rows[a][f].total_cmp(&rows[b][f]));
                idx
            })
            .collect();

        let mut scores = vec![base_score; n];
        let mut stumps = Vec::new();
        if pos == 0.0 || pos == n as f64 {
            // single-class training set: keep the constant prior
            return BoostedStumps {
                base_score,
                learning_rate: BOOST_LEARNING_RATE,
                stumps,
                n_features: d,
            };
        }

        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        for _ in 0..BOOST_ROUNDS {
            let mut g_total = 0.0;
            let mut h_total = 0.0;
            for i in 0..n {
                let p = 1.0 / (1.0 + (-scores[i]).exp());
                grad[i] = f64::from(labels[i]) - p;
                hess[i] = p * (1.0 - p);
                g_total += grad[i];
                h_total += hess[i];
            }

            // best split across features: scan sorted order with prefix sums
            let mut best: Option<(f64, usize, f64, f64, f64)> = None; // gain, feat, thr, left, right
            for (f, idx) in order.iter().enumerate() {
                let mut g_left = 0.0;
                let mut h_left = 0.0;
                for w in 0..n - 1 {
                    let i = idx[w];
                    g_left += grad[i];
                    h_left += hess[i];
                    let (a, b) = (rows[i][f], rows[idx[w + 1]][f]);
                    if a == b {
                        continue;
                    }
                    let g_right = g_total - g_left;
                    let h_right = h_total - h_left;
                    let gain = g_left * g_left / (h_left + LEAF_REG)
                        + g_right * g_right / (h_right + LEAF_REG);
                    if best.as_ref().is_none_or(|&(bg, _, _, _, _)| gain > bg) {
                        let thr = 0.5 * (a + b);
                        best = Some((
                            gain,
                            f,
                            thr,
                            g_left / (h_left + LEAF_REG),
                            g_right / (h_right + LEAF_REG),
                        ));
                    }
                }
            }
            let Some((_, feature, threshold, left_value, right_value)) = best else {
                break; // all features constant
            };
            let stump = Stump {
                feature,
                threshold,
                left_value,
                right_value,
            };
            for (score, row) in scores.iter_mut().zip(rows) {
                *score += BOOST_LEARNING_RATE * stump.eval(row);
            }
            stumps.push(stump);
        }

        BoostedStumps {
            base_score,
            learning_rate: BOOST_LEARNING_RATE,
            stumps,
            n_features: d,
        }
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let z = self.base_score
            + self.learning_rate * self.stumps.iter().map(|s| s.eval(row)).sum::<f64>();
        1.0 / (1.0 + (-z).exp())
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }
}

/// Summary of a discretion model, serialized into experiment records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscretionKind {
    Oracle,
    Learned,
    Constant,
}

/// A predictor of `p(a|x)`: the probability the human accepts a
/// contradicting recommendation on a given instance.
#[derive(Debug, Clone)]
pub enum DiscretionModel {
    /// Perfect knowledge: evaluates the generating behavior directly.
    Oracle { profile: HumanProfile, raw: RawDataset },
    /// Learned from (x, a) pairs.
    Learned {
        model: BoostedStumps,
        training_size: usize,
        holdout_accuracy: f64,
    },
    /// Fixed probability per row; `Constant { p: 0.5 }` with per-row coin
    /// flips is the degradation reference model.
    CoinFlip { seed: u64, n_features: usize },
}

impl DiscretionModel {
    pub fn kind(&self) -> DiscretionKind {
        match self {
            DiscretionModel::Oracle { .. } => DiscretionKind::Oracle,
            DiscretionModel::Learned { .. } => DiscretionKind::Learned,
            DiscretionModel::CoinFlip { .. } => DiscretionKind::Constant,
        }
    }

    pub fn training_size(&self) -> usize {
        match self {
            DiscretionModel::Learned { training_size, .. } => *training_size,
            _ => 0,
        }
    }

    /// Accuracy on held-out (x, a) pairs at threshold 0.5; 1.0 for the
    /// oracle by definition.
    pub fn holdout_accuracy(&self) -> f64 {
        match self {
            DiscretionModel::Oracle { .. } => 1.0,
            DiscretionModel::Learned {
                holdout_accuracy, ..
            } => *holdout_accuracy,
            DiscretionModel::CoinFlip { .. } => 0.5,
        }
    }

    fn expected_arity(&self) -> usize {
        match self {
            DiscretionModel::Oracle { raw, .. } => raw.n_features(),
            DiscretionModel::Learned { model, .. } => model.n_features(),
            DiscretionModel::CoinFlip { n_features, .. } => *n_features,
        }
    }

    /// Probability in [0,1] that the human accepts advice on this row.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.expected_arity() {
            return Err(Error::Data(format!(
                "row has {} features, model expects {}",
                row.len(),
                self.expected_arity()
            )));
        }
        Ok(match self {
            DiscretionModel::Oracle { profile, raw } => {
                f64::from(profile.behavior.accepts_row_values(raw, row)?)
            }
            DiscretionModel::Learned { model, .. } => model.predict_proba(row),
            DiscretionModel::CoinFlip { seed, .. } => {
                // deterministic per-row coin: hash the row bits with the seed
                let mut h = *seed ^ 0x9e37_79b9_7f4a_7c15;
                for v in row {
                    h ^= v.to_bits();
                    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
                    h ^= h >> 27;
                }
                f64::from(h & 1 == 1)
            }
        })
    }
}

/// Perfect-oracle discretion model built from a simulated profile.
///
/// In-sample rows reproduce the profile's accept vector exactly; unseen
/// rows are resolved by evaluating the generating behavior spec.
pub fn oracle(profile: &HumanProfile, raw: &RawDataset) -> DiscretionModel {
    DiscretionModel::Oracle {
        profile: profile.clone(),
        raw: raw.clone(),
    }
}

/// Train a boosted-stumps discretion model on a seeded random subset of the
/// (x, a) pairs; holdout accuracy is measured on the untouched remainder.
pub fn fit(
    rows: &[Vec<f64>],
    accepts: &[u8],
    subset_size: usize,
    seed: u64,
) -> Result<DiscretionModel> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if subset_size == 0 || subset_size > n {
        return Err(Error::Config(format!(
            "subset_size must be in 1..={n}, got {subset_size}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    let (train_idx, holdout_idx) = idx.split_at(subset_size);
    let train_rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| rows[i].clone()).collect();
    let train_labels: Vec<u8> = train_idx.iter().map(|&i| accepts[i]).collect();

    let single_class = train_labels.iter().all(|&a| a == train_labels[0]);
    if single_class {
        log::warn!("discretion subset contains a single class; using constant prior");
    }
    let model = BoostedStumps::fit(&train_rows, &train_labels);

    let eval_idx: &[usize] = if holdout_idx.is_empty() {
        train_idx
    } else {
        holdout_idx
    };
    let correct = eval_idx
        .iter()
        .filter(|&&i| u8::from(model.predict_proba(&rows[i]) >= 0.5) == accepts[i])
        .count();
    let holdout_accuracy = correct as f64 / eval_idx.len() as f64;

    Ok(DiscretionModel::Learned {
        model,
        training_size: subset_size,
        holdout_accuracy,
    })
}
