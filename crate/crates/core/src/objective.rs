//! The team-loss objective: discretion-weighted decision loss plus
//! reconciliation cost, computed via the decision process and,
//! equivalently, via indicator-arithmetic closed forms.

use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::data::BinarizedDataset;
use crate::rules::{set_coverage, RuleSet};
use crate::{Error, Result};

/// Training-time decision for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeamDecision {
    One,
    Zero,
    /// No recommendation; the human decision stands.
    Abstain,
}

/// Everything the objective needs about the training population.
#[derive(Debug, Clone)]
pub struct TeamContext {
    pub dataset: BinarizedDataset,
    pub labels: Vec<u8>,
    pub human_decisions: Vec<u8>,
    /// Per-instance probability the human accepts a contradicting
    /// recommendation.
    pub accept_weights: Vec<f64>,
    /// Cost of one contradicting recommendation, relative to one decision
    /// error.
    pub alpha: f64,
}

impl TeamContext {
    pub fn new(
        dataset: BinarizedDataset,
        human_decisions: Vec<u8>,
        accept_weights: Vec<f64>,
        alpha: f64,
    ) -> Result<TeamContext> {
        let n = dataset.n_rows();
        if human_decisions.len() != n || accept_weights.len() != n {
            return Err(Error::Data("context vectors must all have length n".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Config("alpha must be in [0,1]".into()));
        }
        if accept_weights.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Data("accept weights must be in [0,1]".into()));
        }
        let labels = dataset.labels.clone();
        Ok(TeamContext {
            dataset,
            labels,
            human_decisions,
            accept_weights,
            alpha,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    /// Loss of the empty rule set: the human deciding alone, weighted.
    pub fn human_alone_loss(&self) -> f64 {
        self.labels
            .iter()
            .zip(&self.human_decisions)
            .zip(&self.accept_weights)
            .filter(|((y, h), _)| y != h)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Decomposed objective value; `total` is always the exact sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub decision_loss: f64,
    pub reconciliation_loss: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn new(decision_loss: f64, reconciliation_loss: f64) -> LossBreakdown {
        LossBreakdown {
            decision_loss,
            reconciliation_loss,
            total: decision_loss + reconciliation_loss,
        }
    }
}

/// Positive rules take precedence when both polarities cover a row.
pub fn team_decision(rs: &RuleSet, dataset: &BinarizedDataset, row: usize) -> Result<TeamDecision> {
    for r in &rs.positive {
        if crate::rules::covers(r, dataset, row)? {
            return Ok(TeamDecision::One);
        }
    }
    for r in &rs.negative {
        if crate::rules::covers(r, dataset, row)? {
            return Ok(TeamDecision::Zero);
        }
    }
    Ok(TeamDecision::Abstain)
}

#[inline]
fn decision_from_flags(pos: bool, neg: bool) -> TeamDecision {
    if pos {
        TeamDecision::One
    } else if neg {
        TeamDecision::Zero
    } else {
        TeamDecision::Abstain
    }
}

/// Per-row loss given coverage flags: the accept-weighted decision error
/// plus alpha when a covered row's recommendation contradicts the human.
#[inline]
pub(crate) fn row_loss(ctx: &TeamContext, i: usize, pos: bool, neg: bool) -> f64 {
    let (y, h, p) = (
        ctx.labels[i],
        ctx.human_decisions[i],
        ctx.accept_weights[i],
    );
    match decision_from_flags(pos, neg) {
        TeamDecision::Abstain => {
            if y != h {
                p
            } else {
                0.0
            }
        }
        TeamDecision::One => {
            let mut l = if y != 1 { p } else { 0.0 };
            if h != 1 {
                l += ctx.alpha;
            }
            l
        }
        TeamDecision::Zero => {
            let mut l = if y != 0 { p } else { 0.0 };
            if h != 0 {
                l += ctx.alpha;
            }
            l
        }
    }
}

/// Objective via the decision process: walk every row, apply the
/// recommend-or-abstain rule, and accumulate the two loss terms.
pub fn loss(ctx: &TeamContext, rs: &RuleSet) -> Result<LossBreakdown> {
    let (pos, neg) = set_coverage(rs, &ctx.dataset)?;
    Ok(loss_from_coverage(ctx, &pos, &neg))
}

/// Same objective given precomputed coverage bitsets.
pub fn loss_from_coverage(ctx: &TeamContext, pos: &Bitset, neg: &Bitset) -> LossBreakdown {
    let mut decision = 0.0;
    let mut contradictions = 0u64;
    for i in 0..ctx.n_rows() {
        let (p, n) = (pos.get(i), neg.get(i));
        let yhat = match decision_from_flags(p, n) {
            TeamDecision::One => 1,
            TeamDecision::Zero => 0,
            TeamDecision::Abstain => ctx.human_decisions[i],
        };
        if yhat != ctx.labels[i] {
            decision += ctx.accept_weights[i];
        }
        if (p || n) && yhat != ctx.human_decisions[i] {
            contradictions += 1;
        }
    }
    LossBreakdown::new(decision, ctx.alpha * contradictions as f64)
}

/// Objective via the indicator-arithmetic closed forms, with no reference
/// to the decision process. Matches [`loss`] exactly, term for term.
pub fn loss_closed_form(ctx: &TeamContext, rs: &RuleSet) -> Result<LossBreakdown> {
    let (pos, neg) = set_coverage(rs, &ctx.dataset)?;
    let mut decision = 0.0;
    let mut contradiction_sum = 0.0;
    for i in 0..ctx.n_rows() {
        let cp = f64::from(pos.get(i));
        let cn = f64::from(neg.get(i));
        let y = f64::from(ctx.labels[i]);
        let h = f64::from(ctx.human_decisions[i]);
        let p = ctx.accept_weights[i];
        decision += p
            * ((1.0 - y) * cp
                + y * (1.0 - cp) * cn
                + (1.0 - cp) * (1.0 - cn) * (y * (1.0 - h) + h * (1.0 - y)));
        contradiction_sum += (1.0 - h) * cp + h * (1.0 - cp) * cn;
    }
    Ok(LossBreakdown::new(decision, ctx.alpha * contradiction_sum))
}

/// Contribution of one row to the objective; these sum to `loss().total`
/// and drive the search's instance sampling.
pub fn per_instance_loss(ctx: &TeamContext, rs: &RuleSet, row: usize) -> Result<f64> {
    let mut pos = false;
    for r in &rs.positive {
        if crate::rules::covers(r, &ctx.dataset, row)? {
            pos = true;
            break;
        }
    }
    let mut neg = false;
    if !pos {
        for r in &rs.negative {
            if crate::rules::covers(r, &ctx.dataset, row)? {
                neg = true;
                break;
            }
        }
    }
    Ok(row_loss(ctx, row, pos, neg))
}
