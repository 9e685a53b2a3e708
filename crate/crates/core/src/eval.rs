//! Deployment simulation, experiment plans, seeded sweeps, significance
//! tests, and plot-ready CSV output.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::data::{self, BinarizedDataset, RawDataset, SplitSpec};
use crate::discretion::{self, DiscretionModel};
use crate::human::{
    fit_surrogate_human, presets, AdbMode, BandSpec, BehaviorSpec, HumanProfile, RegionDecision,
    RegionSpec,
};
use crate::learner::{self, CandidateSource, FitResult, SearchConfig, SearchMode};
use crate::objective::TeamContext;
use crate::rules::{self, CandidatePool};
use crate::{Error, Result};

/// Per-row and aggregate outcome of one simulated deployment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TeamOutcome {
    pub recommendations: Vec<Option<u8>>,
    /// 1 where a shown contradicting recommendation was accepted.
    pub accepted: Vec<u8>,
    pub final_decisions: Vec<u8>,
    pub tdl: f64,
    pub cl: f64,
    pub ttl: f64,
    pub contradiction_count: usize,
    pub recommendation_count: usize,
}

/// Simulate the deployed team on test rows.
///
/// The advisor may show a recommendation; an agreeing recommendation
/// leaves the human decision in place, a contradicting one is resolved by
/// the human's true accept behavior. By default every shown contradiction
/// accrues reconciliation cost whether or not it is accepted;
/// `cl_on_acceptance` switches to counting accepted contradictions only.
pub fn simulate_team(
    fitted: &FitResult,
    disc: &DiscretionModel,
    test_rows: &[Vec<f64>],
    test_labels: &[u8],
    test_human: &[u8],
    test_accepts: &[u8],
    alpha: f64,
    cl_on_acceptance: bool,
) -> Result<TeamOutcome> {
    let n = test_rows.len();
    if test_labels.len() != n || test_human.len() != n || test_accepts.len() != n {
        return Err(Error::Data("test vectors must all have length n".into()));
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut recommendations = Vec::with_capacity(n);
    let mut accepted = vec![0u8; n];
    let mut final_decisions = Vec::with_capacity(n);
    let mut wrong = 0usize;
    let mut contradictions = 0usize;
    let mut charged = 0usize;
    let mut shown = 0usize;

    for i in 0..n {
        let rec = fitted.advise(disc, &test_rows[i])?;
        let h = test_human[i];
        let yhat = match rec {
            None => h,
            Some(r) if r == h => h,
            Some(r) => {
                contradictions += 1;
                if test_accepts[i] == 1 {
                    accepted[i] = 1;
                    charged += 1;
                    r
                } else {
                    if !cl_on_acceptance {
                        charged += 1;
                    }
                    h
                }
            }
        };
        if rec.is_some() {
            shown += 1;
        }
        wrong += usize::from(yhat != test_labels[i]);
        recommendations.push(rec);
        final_decisions.push(yhat);
    }

    let tdl = wrong as f64 / n as f64;
    let cl = alpha * charged as f64 / n as f64;
    Ok(TeamOutcome {
        recommendations,
        accepted,
        final_decisions,
        tdl,
        cl,
        ttl: tdl + cl,
        contradiction_count: contradictions,
        recommendation_count: shown,
    })
}

/// One row of the results table; the CSV schema, in column order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub dataset: String,
    pub adb_mode: String,
    pub mode: String,
    pub alpha: f64,
    pub seed: u64,
    pub discretion_kind: String,
    pub discretion_train_size: usize,
    pub discretion_accuracy: f64,
    pub tdl: f64,
    pub cl: f64,
    pub ttl: f64,
    pub contradictions: usize,
    pub recommendations: usize,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    Checkers {
        n: usize,
    },
    Gaussian {
        n: usize,
    },
    Csv {
        path: String,
        label_column: String,
    },
}

impl DatasetSpec {
    pub fn id(&self) -> String {
        match self {
            DatasetSpec::Checkers { .. } => "checkers".into(),
            DatasetSpec::Gaussian { .. } => "gaussian".into(),
            DatasetSpec::Csv { path, .. } => Path::new(path)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "csv".into()),
        }
    }
}

/// How the simulated human is built for each ADB mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BehaviorConfig {
    /// Checkers regions: 80% accuracy where x1 > x2, neutral accepts x1 >= 1.
    Checkers,
    /// Logistic surrogate with the decisive/indecisive 50%/100% bands and
    /// a feature-sum neutral region.
    GaussianSurrogate { holdout_fraction: f64 },
    /// Logistic surrogate with explicit bands (real datasets).
    Surrogate {
        holdout_fraction: f64,
        bands: Vec<BandSpec>,
        neutral_region: Option<RegionSpec>,
    },
    /// Fully explicit accuracy regions.
    Explicit {
        accuracy_regions: Vec<(RegionSpec, RegionDecision)>,
        neutral_region: Option<RegionSpec>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiscretionSpec {
    Oracle,
    Learned { subset_size: usize },
    CoinFlip,
}

/// Everything one experiment cell needs, minus the sweep axes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub dataset: DatasetSpec,
    pub bins_per_feature: usize,
    pub train_fraction: f64,
    pub behavior: BehaviorConfig,
    pub adb_modes: Vec<AdbMode>,
    pub modes: Vec<SearchMode>,
    pub discretion: DiscretionSpec,
    pub search: SearchConfig,
    /// Count reconciliation cost only on accepted contradictions.
    pub cl_on_acceptance: bool,
    /// Fixed per-covered-instance penalty for the decision-history
    /// baseline, independent of the environment's reconciliation cost.
    pub hyrs_penalty: f64,
    pub base_seed: u64,
}

impl ExperimentPlan {
    fn load_raw(&self, data_seed: u64) -> Result<RawDataset> {
        match &self.dataset {
            DatasetSpec::Checkers { n } => data::gen_checkers(*n, data_seed),
            DatasetSpec::Gaussian { n } => data::gen_gaussian(*n, data_seed),
            DatasetSpec::Csv { path, label_column } => {
                data::load_csv(Path::new(path), label_column)
            }
        }
    }
}

/// Data, human, and discretion artifacts shared by every cell of one
/// repetition.
pub struct PreparedRep {
    pub seed: u64,
    pub raw: RawDataset,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub binarized_train: BinarizedDataset,
    pub pool: CandidatePool,
    /// One (profile, discretion model) pair per plan ADB mode.
    pub humans: Vec<(AdbMode, HumanProfile, DiscretionModel)>,
}

impl PreparedRep {
    pub fn human_test_loss(&self, adb_idx: usize) -> f64 {
        let profile = &self.humans[adb_idx].1;
        let wrong = self
            .test_rows
            .iter()
            .filter(|&&i| profile.decisions[i] != self.raw.labels[i])
            .count();
        wrong as f64 / self.test_rows.len() as f64
    }
}

fn derive_seeds(base: u64, rep: u64) -> [u64; 6] {
    let mut rng = ChaCha8Rng::seed_from_u64(base ^ rep.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    std::array::from_fn(|_| rng.gen())
}

/// Build the per-repetition artifacts: dataset, split, surrogate human(s),
/// candidate pool, and discretion model(s).
pub fn prepare_rep(plan: &ExperimentPlan, rep_seed: u64) -> Result<PreparedRep> {
    let [data_seed, split_seed, surrogate_seed, human_seed, disc_seed, _] =
        derive_seeds(plan.base_seed, rep_seed);
    let raw = plan.load_raw(data_seed)?;
    let (train_idx, test_idx) = data::split(
        &raw,
        &SplitSpec {
            train_fraction: plan.train_fraction,
            seed: split_seed,
        },
    )?;

    // behavior shared across ADB modes except for the accept rule itself
    let mut excluded: Vec<usize> = Vec::new();
    let mut behavior_for = |adb: AdbMode| -> Result<BehaviorSpec> {
        Ok(match &plan.behavior {
            BehaviorConfig::Checkers => {
                let mut spec = presets::checkers(adb);
                spec.adb_mode = adb;
                spec
            }
            BehaviorConfig::GaussianSurrogate { holdout_fraction } => {
                let (spec, ex) = fit_surrogate_human(
                    &raw,
                    &train_idx,
                    *holdout_fraction,
                    &presets::gaussian_bands(),
                    adb,
                    Some(presets::gaussian_neutral_region()),
                    surrogate_seed,
                )?;
                excluded = ex;
                spec
            }
            BehaviorConfig::Surrogate {
                holdout_fraction,
                bands,
                neutral_region,
            } => {
                let (spec, ex) = fit_surrogate_human(
                    &raw,
                    &train_idx,
                    *holdout_fraction,
                    bands,
                    adb,
                    neutral_region.clone(),
                    surrogate_seed,
                )?;
                excluded = ex;
                spec
            }
            BehaviorConfig::Explicit {
                accuracy_regions,
                neutral_region,
            } => BehaviorSpec {
                accuracy_regions: accuracy_regions.clone(),
                adb_mode: adb,
                neutral_region: neutral_region.clone(),
                surrogate: None,
            },
        })
    };

    let mut humans_specs = Vec::new();
    for &adb in &plan.adb_modes {
        humans_specs.push((adb, behavior_for(adb)?));
    }

    // advising rows: train minus the surrogate's excluded fitting subset
    let advising: Vec<usize> = train_idx
        .iter()
        .copied()
        .filter(|i| !excluded.contains(i))
        .collect();
    let train_raw = raw.subset(&advising);
    let binarized_train = data::binarize(&train_raw, plan.bins_per_feature)?;
    let pool = match plan.search.candidate_source {
        CandidateSource::FpGrowth => rules::mine_candidates(
            &binarized_train,
            &binarized_train.labels,
            plan.search.min_support,
            plan.search.max_rule_length,
            plan.search.max_candidates,
        )?,
        CandidateSource::RandomForest => rules::mine_candidates_rf(
            &binarized_train,
            &binarized_train.labels,
            plan.search.min_support,
            plan.search.max_rule_length,
            plan.search.max_candidates,
            plan.search.seed ^ data_seed,
        )?,
    };

    let mut humans = Vec::new();
    for (adb, spec) in humans_specs {
        let profile = HumanProfile::simulate(&raw, &spec, human_seed)?;
        let disc = match &plan.discretion {
            DiscretionSpec::Oracle => discretion::oracle(&profile, &raw),
            DiscretionSpec::Learned { subset_size } => {
                let rows: Vec<Vec<f64>> =
                    advising.iter().map(|&i| raw.rows[i].clone()).collect();
                let accepts: Vec<u8> = advising.iter().map(|&i| profile.accepts[i]).collect();
                discretion::fit(&rows, &accepts, (*subset_size).min(rows.len()), disc_seed)?
            }
            DiscretionSpec::CoinFlip => DiscretionModel::CoinFlip {
                seed: disc_seed,
                n_features: raw.n_features(),
            },
        };
        humans.push((adb, profile, disc));
    }

    Ok(PreparedRep {
        seed: rep_seed,
        raw,
        train_rows: advising,
        test_rows: test_idx,
        binarized_train,
        pool,
        humans,
    })
}

/// Fit and deploy one cell on prepared artifacts.
pub fn run_prepared(
    plan: &ExperimentPlan,
    prep: &PreparedRep,
    adb_idx: usize,
    mode: SearchMode,
    alpha: f64,
) -> Result<(FitResult, TeamOutcome, ExperimentRecord)> {
    let started = Instant::now();
    let (adb, profile, disc) = &prep.humans[adb_idx];
    let [.., search_seed] = derive_seeds(plan.base_seed, prep.seed);

    // the decision-history baseline keeps its own fixed penalty and never
    // sees the environment's reconciliation cost during training
    let train_alpha = if mode == SearchMode::HyrsAdapted {
        plan.hyrs_penalty
    } else {
        alpha
    };
    let weights: Vec<f64> = match &plan.discretion {
        DiscretionSpec::Oracle => prep
            .train_rows
            .iter()
            .map(|&i| f64::from(profile.accepts[i]))
            .collect(),
        _ => prep
            .train_rows
            .iter()
            .map(|&i| disc.predict(&prep.raw.rows[i]))
            .collect::<Result<_>>()?,
    };
    let ctx = TeamContext::new(
        prep.binarized_train.clone(),
        prep.train_rows.iter().map(|&i| profile.decisions[i]).collect(),
        weights,
        train_alpha,
    )?;
    let cfg = SearchConfig {
        alpha: train_alpha,
        seed: search_seed,
        mode,
        ..plan.search.clone()
    };
    let fitted = learner::fit(&ctx, &prep.pool, &cfg)?;

    let test_rows: Vec<Vec<f64>> = prep
        .test_rows
        .iter()
        .map(|&i| prep.raw.rows[i].clone())
        .collect();
    let test_labels: Vec<u8> = prep.test_rows.iter().map(|&i| prep.raw.labels[i]).collect();
    let test_h: Vec<u8> = prep
        .test_rows
        .iter()
        .map(|&i| profile.decisions[i])
        .collect();
    let test_a: Vec<u8> = prep.test_rows.iter().map(|&i| profile.accepts[i]).collect();
    let outcome = simulate_team(
        &fitted,
        disc,
        &test_rows,
        &test_labels,
        &test_h,
        &test_a,
        alpha,
        plan.cl_on_acceptance,
    )?;

    let record = ExperimentRecord {
        dataset: plan.dataset.id(),
        adb_mode: format!("{adb:?}").to_lowercase(),
        mode: format!("{mode:?}").to_lowercase(),
        alpha,
        seed: prep.seed,
        discretion_kind: format!("{:?}", disc.kind()).to_lowercase(),
        discretion_train_size: disc.training_size(),
        discretion_accuracy: disc.holdout_accuracy(),
        tdl: outcome.tdl,
        cl: outcome.cl,
        ttl: outcome.ttl,
        contradictions: outcome.contradiction_count,
        recommendations: outcome.recommendation_count,
        wall_time_ms: started.elapsed().as_millis() as u64,
    };
    Ok((fitted, outcome, record))
}

/// Outcome of a sweep: successful records plus per-cell failures.
#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<String>,
}

/// Cross-product sweep over (seed x adb x mode x alpha). Repetitions run
/// in parallel; cell failures are recorded and the sweep continues.
pub fn sweep_alpha(plan: &ExperimentPlan, alphas: &[f64], seeds: &[u64]) -> SweepOutcome {
    if alphas.is_empty() || seeds.is_empty() {
        return SweepOutcome::default();
    }
    let per_rep: Vec<(Vec<ExperimentRecord>, Vec<String>)> = seeds
        .par_iter()
        .map(|&rep| {
            let mut records = Vec::new();
            let mut failures = Vec::new();
            match prepare_rep(plan, rep) {
                Ok(prep) => {
                    for adb_idx in 0..prep.humans.len() {
                        for &mode in &plan.modes {
                            for &alpha in alphas {
                                match run_prepared(plan, &prep, adb_idx, mode, alpha) {
                                    Ok((_, _, rec)) => records.push(rec),
                                    Err(e) => failures.push(format!(
                                        "seed {rep} adb {:?} mode {mode:?} alpha {alpha}: {e}",
                                        prep.humans[adb_idx].0
                                    )),
                                }
                            }
                        }
                    }
                }
                Err(e) => failures.push(format!("seed {rep}: preparation failed: {e}")),
            }
            (records, failures)
        })
        .collect();

    let mut out = SweepOutcome::default();
    for (records, failures) in per_rep {
        out.records.extend(records);
        out.failures.extend(failures);
    }
    out
}

/// Discretion-degradation sweep: per cell, fit the discretion model on a
/// row subset, fit the advisor against its predictions, and deploy against
/// the true accept behavior. The oracle is included as the 100%-accuracy
/// reference when `include_oracle` is set.
pub fn sweep_discretion(
    plan: &ExperimentPlan,
    subset_sizes: &[usize],
    seeds: &[u64],
    include_oracle: bool,
) -> SweepOutcome {
    let mut cells: Vec<DiscretionSpec> = Vec::new();
    if include_oracle {
        cells.push(DiscretionSpec::Oracle);
    }
    cells.extend(
        subset_sizes
            .iter()
            .map(|&s| DiscretionSpec::Learned { subset_size: s }),
    );

    let per_rep: Vec<(Vec<ExperimentRecord>, Vec<String>)> = seeds
        .par_iter()
        .map(|&rep| {
            let mut records = Vec::new();
            let mut failures = Vec::new();
            for spec in &cells {
                let cell_plan = ExperimentPlan {
                    discretion: spec.clone(),
                    ..plan.clone()
                };
                match prepare_rep(&cell_plan, rep) {
                    Ok(prep) => {
                        for adb_idx in 0..prep.humans.len() {
                            for &mode in &cell_plan.modes {
                                match run_prepared(
                                    &cell_plan,
                                    &prep,
                                    adb_idx,
                                    mode,
                                    cell_plan.search.alpha,
                                ) {
                                    Ok((_, _, rec)) => records.push(rec),
                                    Err(e) => failures.push(format!(
                                        "seed {rep} {spec:?} mode {mode:?}: {e}"
                                    )),
                                }
                            }
                        }
                    }
                    Err(e) => failures.push(format!("seed {rep} {spec:?}: {e}")),
                }
            }
            (records, failures)
        })
        .collect();

    let mut out = SweepOutcome::default();
    for (records, failures) in per_rep {
        out.records.extend(records);
        out.failures.extend(failures);
    }
    out
}

/// One-sided paired t-test p-value for mean(a) < mean(b), paired by index.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Data(
            "paired t-test needs two equal-length samples of size >= 2".into(),
        ));
    }
    let n = a.len() as f64;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    if var == 0.0 {
        return Ok(if mean < 0.0 {
            0.0
        } else if mean > 0.0 {
            1.0
        } else {
            0.5
        });
    }
    let t = mean / (var.sqrt() / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0)
        .map_err(|e| Error::Other(format!("t-distribution: {e}")))?;
    Ok(dist.cdf(t))
}

/// Write records as CSV (schema columns in order) plus a JSON sidecar of
/// the resolved configuration at `<path>.json`.
pub fn emit_results(
    records: &[ExperimentRecord],
    csv_path: &Path,
    config_sidecar: &serde_json::Value,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut writer = csv::Writer::from_path(csv_path)?;
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    let sidecar_path = csv_path.with_extension("json");
    std::fs::write(
        &sidecar_path,
        serde_json::to_string_pretty(config_sidecar).map_err(|e| Error::Other(e.to_string()))?,
    )?;
    Ok(())
}

/// Read back a results CSV written by [`emit_results`].
pub fn read_results(csv_path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_path(csv_path)?;
    let mut out = Vec::new();
    for rec in reader.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}
