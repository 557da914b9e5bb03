//! Trans-layer link prediction and ranking metrics.
//!
//! Every common pair gets the score
//! `s = psi(x1) + (1 - psi(x1)) w a1`, where `x1` is the pair's layer-1
//! hyperbolic distance, `a1` its layer-1 adjacency and `psi` a decreasing
//! distance kernel. Labels are layer-2 adjacency over the same pairs.
//! Ranking quality is summarized by AUROC (average-rank tie convention) and
//! AUPR (average precision with tie blocks processed jointly).

use crate::error::{Error, Result};
use crate::geom::{NodeCoords, TrigCache};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};

/// Distance kernel of the score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PsiKind {
    /// `psi(x) = e^{-x}`: hyperbolic distances and persistence combined.
    Exponential,
    /// `psi(x) = 0`: the binary predictor (layer-1 adjacency alone).
    Zero,
    /// `psi(x) = C` with `C in [0, 1)`: persistence with distances ignored.
    Constant(f64),
}

impl PsiKind {
    pub fn validate(&self) -> Result<()> {
        if let PsiKind::Constant(c) = self {
            if !(c.is_finite() && (0.0..1.0).contains(c)) {
                return Err(Error::InvalidParameter(format!(
                    "constant psi = {c}, need [0, 1)"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, x1: f64) -> f64 {
        match self {
            PsiKind::Exponential => (-x1).exp(),
            PsiKind::Zero => 0.0,
            PsiKind::Constant(c) => *c,
        }
    }
}

/// Scores and layer-2 labels over the common pairs, in lexicographic pair
/// order `(0,1), (0,2), ..., (1,2), ...`.
#[derive(Debug, Clone)]
pub struct ScoredPairs {
    pub n_common: usize,
    pub scores: Vec<f64>,
    pub labels: Vec<bool>,
}

impl ScoredPairs {
    pub fn new(n_common: usize, scores: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        let expect = n_common * (n_common.saturating_sub(1)) / 2;
        if scores.len() != labels.len() || scores.len() != expect {
            return Err(Error::InvalidParameter(format!(
                "scored-pair arrays must both have C({n_common}, 2) = {expect} entries"
            )));
        }
        Ok(Self {
            n_common,
            scores,
            labels,
        })
    }

    /// The `(k, l)` common-index pair of entry `idx`.
    pub fn pair(&self, mut idx: usize) -> (u32, u32) {
        let n = self.n_common;
        for k in 0..n {
            let row = n - k - 1;
            if idx < row {
                return (k as u32, (k + 1 + idx) as u32);
            }
            idx -= row;
        }
        unreachable!("index out of range")
    }
}

/// Scores every common pair from layer-1 geometry and adjacency, labelling
/// with layer-2 adjacency: `s = psi(x1) + (1 - psi(x1)) w a1`. All inputs are
/// aligned on common node indices.
pub fn score_pairs(
    coords1: &NodeCoords,
    adj1: &Graph,
    adj2: &Graph,
    w: f64,
    psi: &PsiKind,
) -> Result<ScoredPairs> {
    if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
        return Err(Error::InvalidParameter(format!("w = {w}, need w in [0, 1]")));
    }
    psi.validate()?;
    let n = coords1.len();
    if adj1.n_nodes() != n || adj2.n_nodes() != n {
        return Err(Error::InvalidParameter(
            "layers must be aligned on common nodes".into(),
        ));
    }
    let trig = TrigCache::new(coords1);
    let total = n * (n - 1) / 2;
    let mut scores = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for k in 0..n {
        for l in (k + 1)..n {
            let x1 = trig.distance(k, l);
            let p = psi.eval(x1);
            let a1 = adj1.has_edge(k as u32, l as u32);
            scores.push(if a1 { p + (1.0 - p) * w } else { p });
            labels.push(adj2.has_edge(k as u32, l as u32));
        }
    }
    ScoredPairs::new(n, scores, labels)
}

fn class_counts(sp: &ScoredPairs) -> (usize, usize) {
    let pos = sp.labels.iter().filter(|&&l| l).count();
    (pos, sp.labels.len() - pos)
}

/// Area under the ROC curve by the rank-sum estimator; tied scores take
/// their average rank.
pub fn auroc(sp: &ScoredPairs) -> Result<f64> {
    let (n_pos, n_neg) = class_counts(sp);
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateInput(format!(
            "AUROC needs both classes; have {n_pos} positives, {n_neg} negatives"
        )));
    }
    let mut order: Vec<u32> = (0..sp.scores.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| sp.scores[a as usize].total_cmp(&sp.scores[b as usize]));

    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len()
            && sp.scores[order[j] as usize] == sp.scores[order[i] as usize]
        {
            j += 1;
        }
        // Ranks i+1 ..= j averaged over the tie block.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_block = order[i..j]
            .iter()
            .filter(|&&idx| sp.labels[idx as usize])
            .count();
        rank_sum_pos += avg_rank * pos_in_block as f64;
        i = j;
    }
    let n_pos = n_pos as f64;
    Ok((rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg as f64))
}

/// Area under the precision-recall curve as average precision over the
/// descending-score sweep; tied scores are processed as one block.
pub fn aupr(sp: &ScoredPairs) -> Result<f64> {
    let (n_pos, _) = class_counts(sp);
    if n_pos == 0 {
        return Err(Error::DegenerateInput("AUPR needs at least one positive".into()));
    }
    let mut order: Vec<u32> = (0..sp.scores.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| sp.scores[b as usize].total_cmp(&sp.scores[a as usize]));

    let mut ap = 0.0f64;
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len()
            && sp.scores[order[j] as usize] == sp.scores[order[i] as usize]
        {
            j += 1;
        }
        let block_tp = order[i..j]
            .iter()
            .filter(|&&idx| sp.labels[idx as usize])
            .count();
        tp += block_tp;
        seen += j - i;
        let precision = tp as f64 / seen as f64;
        ap += precision * block_tp as f64 / n_pos as f64;
        i = j;
    }
    Ok(ap)
}

/// Evaluates AUROC and AUPR over a grid of persistence weights; `psi(x1)`
/// and the adjacency pattern are computed once and reused.
pub fn sweep_w(
    coords1: &NodeCoords,
    adj1: &Graph,
    adj2: &Graph,
    psi: &PsiKind,
    w_grid: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    psi.validate()?;
    let n = coords1.len();
    let trig = TrigCache::new(coords1);
    let total = n * (n - 1) / 2;
    let mut psi_vals = Vec::with_capacity(total);
    let mut a1 = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for k in 0..n {
        for l in (k + 1)..n {
            psi_vals.push(psi.eval(trig.distance(k, l)));
            a1.push(adj1.has_edge(k as u32, l as u32));
            labels.push(adj2.has_edge(k as u32, l as u32));
        }
    }
    let mut out = Vec::with_capacity(w_grid.len());
    for &w in w_grid {
        if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidParameter(format!("w = {w} in grid")));
        }
        let scores: Vec<f64> = psi_vals
            .iter()
            .zip(&a1)
            .map(|(&p, &adj)| if adj { p + (1.0 - p) * w } else { p })
            .collect();
        let sp = ScoredPairs::new(n, scores, labels.clone())?;
        out.push((w, auroc(&sp)?, aupr(&sp)?));
    }
    Ok(out)
}
