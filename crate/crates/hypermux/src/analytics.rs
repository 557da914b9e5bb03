//! Empirical multiplex statistics.
//!
//! All quantities are computed over the pairs of *common* nodes. Pairs are
//! classified by their layer-1 connectivity into the sets `S_c` (connected),
//! `S_d` (disconnected) and `S_all`, and per-set curves are binned on
//! hyperbolic distance with left-closed equal-width bins starting at 0
//! (default width 1). Empty bins carry a count of 0 and no estimate.

use crate::error::{Error, Result};
use crate::generator::Multiplex;
use crate::geom::{NodeCoords, TrigCache};
use crate::graph::Graph;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Pair sets over the common nodes, by layer-1 connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSet {
    Connected,
    Disconnected,
    All,
}

impl PairSet {
    pub fn label(&self) -> &'static str {
        match self {
            PairSet::Connected => "c",
            PairSet::Disconnected => "d",
            PairSet::All => "all",
        }
    }
}

/// Both layers restricted to the common nodes, reindexed by common index.
pub struct CommonView {
    pub n: usize,
    pub coords1: NodeCoords,
    pub coords2: NodeCoords,
    pub graph1: Graph,
    pub graph2: Graph,
}

/// Reindexes a layer onto the common nodes: `ids[k]` is the layer index of
/// common node `k`. Edges with a non-common endpoint are dropped.
pub fn restrict_to_common(
    graph: &Graph,
    coords: &NodeCoords,
    ids: impl Iterator<Item = u32>,
    n_common: usize,
) -> (Graph, NodeCoords) {
    let mut inverse = vec![u32::MAX; graph.n_nodes()];
    let mut radial = Vec::with_capacity(n_common);
    let mut angular = Vec::with_capacity(n_common);
    let ids: Vec<u32> = ids.collect();
    for (k, &i) in ids.iter().enumerate() {
        inverse[i as usize] = k as u32;
        radial.push(coords.radial[i as usize]);
        angular.push(coords.angular[i as usize]);
    }
    let mut g = Graph::new(n_common);
    for (k, &i) in ids.iter().enumerate() {
        for &nb in graph.neighbors(i) {
            let l = inverse[nb as usize];
            if l != u32::MAX && l > k as u32 {
                g.add_edge(k as u32, l);
            }
        }
    }
    g.sort_adjacency();
    (g, NodeCoords { radial, angular })
}

impl CommonView {
    pub fn new(m: &Multiplex) -> Self {
        let n = m.common_count;
        let (graph1, coords1) = restrict_to_common(
            &m.layer1.graph,
            &m.layer1.coords,
            m.node_map.iter().map(|&(i, _)| i),
            n,
        );
        let (graph2, coords2) = restrict_to_common(
            &m.layer2.graph,
            &m.layer2.coords,
            m.node_map.iter().map(|&(_, j)| j),
            n,
        );
        Self {
            n,
            coords1,
            coords2,
            graph1,
            graph2,
        }
    }

    /// Builds the view from already-loaded layers and an explicit node map.
    pub fn from_parts(
        graph1: &Graph,
        coords1: &NodeCoords,
        graph2: &Graph,
        coords2: &NodeCoords,
        node_map: &[(u32, u32)],
    ) -> Self {
        let n = node_map.len();
        let (g1, c1) = restrict_to_common(graph1, coords1, node_map.iter().map(|&(i, _)| i), n);
        let (g2, c2) = restrict_to_common(graph2, coords2, node_map.iter().map(|&(_, j)| j), n);
        Self {
            n,
            coords1: c1,
            coords2: c2,
            graph1: g1,
            graph2: g2,
        }
    }

    #[inline]
    fn in_set(&self, set: PairSet, k: u32, l: u32) -> bool {
        match set {
            PairSet::All => true,
            PairSet::Connected => self.graph1.has_edge(k, l),
            PairSet::Disconnected => !self.graph1.has_edge(k, l),
        }
    }
}

/// Partition of the common pairs by layer-1 connectivity.
#[derive(Debug, Clone)]
pub struct PairClassification {
    pub n_common: usize,
    /// `S_c` as explicit common-index pairs, lexicographic.
    pub connected: Vec<(u32, u32)>,
    /// `|S_d|`; the set itself is the complement of `connected` over all
    /// `C(n_common, 2)` pairs.
    pub n_disconnected: u64,
}

impl PairClassification {
    pub fn n_all(&self) -> u64 {
        self.connected.len() as u64 + self.n_disconnected
    }
}

/// Classifies all common pairs into `S_c` and `S_d`.
pub fn classify_pairs(view: &CommonView) -> Result<PairClassification> {
    if view.n < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 common nodes, have {}",
            view.n
        )));
    }
    let connected: Vec<(u32, u32)> = view.graph1.edges().collect();
    let total = view.n as u64 * (view.n as u64 - 1) / 2;
    Ok(PairClassification {
        n_common: view.n,
        n_disconnected: total - connected.len() as u64,
        connected,
    })
}

/// Left-closed equal-width distance bins accumulating a pair count and a
/// value sum (successes for probability curves, distances for mean curves).
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedCurve {
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub sums: Vec<f64>,
}

impl BinnedCurve {
    pub fn new(bin_width: f64) -> Self {
        Self {
            bin_width,
            counts: Vec::new(),
            sums: Vec::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64, value: f64) {
        let idx = (x / self.bin_width).floor() as usize;
        if idx >= self.counts.len() {
            self.counts.resize(idx + 1, 0);
            self.sums.resize(idx + 1, 0.0);
        }
        self.counts[idx] += 1;
        self.sums[idx] += value;
    }

    fn merge(&mut self, other: &BinnedCurve) {
        if other.counts.len() > self.counts.len() {
            self.counts.resize(other.counts.len(), 0);
            self.sums.resize(other.sums.len(), 0.0);
        }
        for (i, (&c, &s)) in other.counts.iter().zip(&other.sums).enumerate() {
            self.counts[i] += c;
            self.sums[i] += s;
        }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_left(&self, i: usize) -> f64 {
        i as f64 * self.bin_width
    }

    pub fn bin_right(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.bin_width
    }

    /// Per-bin estimate (success fraction or mean); `None` on empty bins.
    pub fn estimate(&self, i: usize) -> Option<f64> {
        (self.counts[i] > 0).then(|| self.sums[i] / self.counts[i] as f64)
    }

    pub fn total_pairs(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Deterministic parallel accumulation of a per-pair statistic into a curve.
/// Work is split over fixed outer-index chunks and partial histograms are
/// merged in chunk order, so results do not depend on the thread count.
fn scan_pairs(
    view: &CommonView,
    set: PairSet,
    bin_width: f64,
    eval: impl Fn(&CommonView, &TrigCache, &TrigCache, u32, u32) -> (f64, f64) + Sync,
) -> BinnedCurve {
    let trig1 = TrigCache::new(&view.coords1);
    let trig2 = TrigCache::new(&view.coords2);
    let n = view.n;
    const CHUNK: usize = 256;
    let starts: Vec<usize> = (0..n).step_by(CHUNK).collect();
    let partials: Vec<BinnedCurve> = starts
        .par_iter()
        .map(|&start| {
            let mut local = BinnedCurve::new(bin_width);
            for k in start..(start + CHUNK).min(n) {
                for l in (k + 1)..n {
                    if view.in_set(set, k as u32, l as u32) {
                        let (x, value) = eval(view, &trig1, &trig2, k as u32, l as u32);
                        local.add(x, value);
                    }
                }
            }
            local
        })
        .collect();
    let mut out = BinnedCurve::new(bin_width);
    for p in &partials {
        out.merge(p);
    }
    out
}

/// Trans-layer connection probability: fraction of set pairs connected in
/// layer 2, binned on the layer-1 hyperbolic distance `x1`.
pub fn trans_layer_probability(
    view: &CommonView,
    set: PairSet,
    bin_width: f64,
) -> Result<BinnedCurve> {
    check_curve_inputs(view, bin_width)?;
    Ok(scan_pairs(view, set, bin_width, |v, t1, _t2, k, l| {
        let x1 = t1.distance(k as usize, l as usize);
        (x1, v.graph2.has_edge(k, l) as u64 as f64)
    }))
}

/// Layer-2 connection probability: as above but binned on the layer-2
/// distance `x2`.
pub fn within_layer_probability(
    view: &CommonView,
    set: PairSet,
    bin_width: f64,
) -> Result<BinnedCurve> {
    check_curve_inputs(view, bin_width)?;
    Ok(scan_pairs(view, set, bin_width, |v, _t1, t2, k, l| {
        let x2 = t2.distance(k as usize, l as usize);
        (x2, v.graph2.has_edge(k, l) as u64 as f64)
    }))
}

/// Mean layer-2 distance conditioned on the layer-1 distance,
/// `E[x2 | x1]`, per set.
pub fn conditional_mean_distance(
    view: &CommonView,
    set: PairSet,
    bin_width: f64,
) -> Result<BinnedCurve> {
    check_curve_inputs(view, bin_width)?;
    Ok(scan_pairs(view, set, bin_width, |_v, t1, t2, k, l| {
        let x1 = t1.distance(k as usize, l as usize);
        let x2 = t2.distance(k as usize, l as usize);
        (x1, x2)
    }))
}

fn check_curve_inputs(view: &CommonView, bin_width: f64) -> Result<()> {
    if view.n < 2 {
        return Err(Error::DegenerateInput("fewer than 2 common nodes".into()));
    }
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::InvalidParameter(format!("bin width {bin_width}")));
    }
    Ok(())
}

/// Edge overlap between the layers: shared edges over the smaller common
/// edge count. Errors when either layer has no edges among common nodes.
pub fn edge_overlap(view: &CommonView) -> Result<f64> {
    let e1 = view.graph1.n_edges();
    let e2 = view.graph2.n_edges();
    if e1 == 0 || e2 == 0 {
        return Err(Error::Undefined(
            "edge overlap needs at least one common edge in each layer".into(),
        ));
    }
    let shared = view
        .graph1
        .edges()
        .filter(|&(k, l)| view.graph2.has_edge(k, l))
        .count();
    Ok(shared as f64 / e1.min(e2) as f64)
}

/// How bins are pooled when reading the persistence plateau off a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WAveraging {
    /// Unweighted mean over nonempty bins (one value per bin).
    #[default]
    ByBin,
    /// Pair-weighted mean (bins weighted by their pair counts).
    ByPair,
}

/// Estimates the link persistence probability as the plateau of
/// `p_trans^c(x1)` beyond `r_threshold` (typically the target layer's disc
/// radius): the mean and standard deviation over nonempty bins whose left
/// edge exceeds the threshold.
pub fn estimate_w(
    curve: &BinnedCurve,
    r_threshold: f64,
    averaging: WAveraging,
) -> Result<(f64, f64)> {
    let mut estimates = Vec::new();
    let mut weights = Vec::new();
    for i in 0..curve.n_bins() {
        if curve.bin_left(i) > r_threshold {
            if let Some(p) = curve.estimate(i) {
                estimates.push(p);
                weights.push(curve.counts[i] as f64);
            }
        }
    }
    if estimates.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "only {} nonempty bins beyond threshold {r_threshold}",
            estimates.len()
        )));
    }
    let (mean, var) = match averaging {
        WAveraging::ByBin => {
            let m = crate::stats::mean(&estimates);
            let v =
                estimates.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / estimates.len() as f64;
            (m, v)
        }
        WAveraging::ByPair => {
            let wsum: f64 = weights.iter().sum();
            let m = estimates.iter().zip(&weights).map(|(p, w)| p * w).sum::<f64>() / wsum;
            let v = estimates
                .iter()
                .zip(&weights)
                .map(|(p, w)| w * (p - m) * (p - m))
                .sum::<f64>()
                / wsum;
            (m, v)
        }
    };
    Ok((mean, var.sqrt()))
}

/// Mean local clustering over nodes of degree >= 2, plus the
/// degree-conditioned means `k -> c_bar(k)`.
pub fn clustering_stats(graph: &Graph) -> (f64, BTreeMap<usize, f64>) {
    let mut per_degree: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    let mut total = 0.0;
    let mut counted = 0usize;
    for u in 0..graph.n_nodes() as u32 {
        let k = graph.degree(u);
        if k < 2 {
            continue;
        }
        let nbs = graph.neighbors(u);
        let mut triangles = 0usize;
        for (a_idx, &a) in nbs.iter().enumerate() {
            for &b in &nbs[a_idx + 1..] {
                triangles += graph.has_edge(a, b) as usize;
            }
        }
        let c = 2.0 * triangles as f64 / (k as f64 * (k as f64 - 1.0));
        total += c;
        counted += 1;
        let entry = per_degree.entry(k).or_insert((0.0, 0));
        entry.0 += c;
        entry.1 += 1;
    }
    let mean = if counted > 0 { total / counted as f64 } else { 0.0 };
    let by_degree = per_degree
        .into_iter()
        .map(|(k, (sum, n))| (k, sum / n as f64))
        .collect();
    (mean, by_degree)
}

/// Empirical complementary CDF over distinct values:
/// `probs[i] = P(X >= values[i])`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ccdf {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl Ccdf {
    pub fn from_samples(mut xs: Vec<f64>) -> Self {
        if xs.is_empty() {
            return Self::default();
        }
        xs.sort_unstable_by(|a, b| a.total_cmp(b));
        let n = xs.len() as f64;
        let mut values = Vec::new();
        let mut probs = Vec::new();
        let mut i = 0;
        while i < xs.len() {
            values.push(xs[i]);
            probs.push((xs.len() - i) as f64 / n);
            let v = xs[i];
            while i < xs.len() && xs[i] == v {
                i += 1;
            }
        }
        Self { values, probs }
    }

    /// Median (smallest value with CCDF <= 1/2), if any samples exist.
    pub fn median(&self) -> Option<f64> {
        self.values
            .iter()
            .zip(&self.probs)
            .find(|(_, &p)| p <= 0.5)
            .map(|(&v, _)| v)
            .or(self.values.last().copied())
    }
}

/// CCDFs of the layer-2 endpoint degree product `k1 * k2`, split into
/// persistent links (common-index pairs, as recorded by link persistence)
/// and the remaining (non-persistent) layer-2 links among common nodes.
pub fn degree_product_ccdf(persistent_edges: &[(u32, u32)], view: &CommonView) -> (Ccdf, Ccdf) {
    let persistent: std::collections::HashSet<(u32, u32)> =
        persistent_edges.iter().copied().collect();
    let mut pers = Vec::new();
    let mut non_pers = Vec::new();
    for (k, l) in view.graph2.edges() {
        let product = (view.graph2.degree(k) * view.graph2.degree(l)) as f64;
        if persistent.contains(&(k, l)) {
            pers.push(product);
        } else {
            non_pers.push(product);
        }
    }
    (Ccdf::from_samples(pers), Ccdf::from_samples(non_pers))
}
