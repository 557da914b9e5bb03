//! Maximum-likelihood hyperbolic embedding of a single observed layer, plus
//! likelihood evaluators over one and two layers.
//!
//! Radial coordinates come from observed degrees through the static-model
//! rule `kappa_i = max(k_bar0, k_i - gamma T)`, `r_i = R - 2 ln(kappa_i / k_bar0)`.
//! Angular coordinates are found by greedy placement in decreasing-degree
//! order over a uniform candidate grid, maximizing the incremental
//! log-likelihood against already-placed nodes, followed by full-likelihood
//! refinement sweeps. The current angle is always among the candidates, so
//! the total log-likelihood is nondecreasing across refinement passes.

use crate::error::{Error, Result};
use crate::geom::{LayerParams, NodeCoords};
use crate::graph::Graph;
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Probability floor for likelihood terms; `ln(1e-15)`.
const LN_FLOOR: f64 = -34.538776394910684;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConfig {
    /// Angular grid resolution per node (>= 4).
    pub candidate_angles: usize,
    /// Full re-optimization sweeps after greedy placement.
    pub refinement_passes: usize,
    /// Temperature used in the likelihood.
    pub temperature: f64,
    /// Degree-distribution exponent (given or estimated).
    pub gamma: f64,
}

impl EmbeddingConfig {
    pub fn new(candidate_angles: usize, refinement_passes: usize, temperature: f64, gamma: f64) -> Result<Self> {
        if candidate_angles < 4 {
            return Err(Error::InvalidParameter(format!(
                "candidate_angles = {candidate_angles}, need >= 4"
            )));
        }
        Ok(Self {
            candidate_angles,
            refinement_passes,
            temperature,
            gamma,
        })
    }

    /// Defaults: 360 candidate angles, 3 refinement passes.
    pub fn with_model(temperature: f64, gamma: f64) -> Self {
        Self {
            candidate_angles: 360,
            refinement_passes: 3,
            temperature,
            gamma,
        }
    }

    /// Layer parameters for embedding `graph`: observed size and mean degree
    /// with this configuration's `gamma` and `temperature`.
    pub fn derive_layer_params(&self, graph: &Graph) -> Result<LayerParams> {
        crate::geom::derive_params(graph.n_nodes(), graph.mean_degree(), self.gamma, self.temperature)
    }
}

/// Radial coordinates from observed degrees (static-model rule).
pub fn infer_radial_coords(degrees: &[usize], params: &LayerParams) -> Vec<f64> {
    degrees
        .iter()
        .map(|&k| params.radius_from_degree(k as f64))
        .collect()
}

/// Log of the Fermi-Dirac factor for one pair: `ln p(x)` when connected,
/// `ln(1 - p(x))` when not, floored at `ln(1e-15)`.
#[inline]
pub fn pair_log_term(x: f64, connected: bool, params: &LayerParams) -> f64 {
    if params.temperature == 0.0 {
        let inside = x <= params.disc_radius;
        return if inside == connected { 0.0 } else { LN_FLOOR };
    }
    let z = (x - params.disc_radius) / (2.0 * params.temperature);
    // ln p = -softplus(z); ln(1-p) = -softplus(-z)
    let t = if connected { z } else { -z };
    let softplus = if t > 36.0 { t } else { t.exp().ln_1p() };
    (-softplus).max(LN_FLOOR)
}

struct Trig {
    cosh_r: Vec<f64>,
    sinh_r: Vec<f64>,
    cos_t: Vec<f64>,
    sin_t: Vec<f64>,
}

impl Trig {
    fn of(radial: &[f64], angular: &[f64]) -> Self {
        Self {
            cosh_r: radial.iter().map(|r| r.cosh()).collect(),
            sinh_r: radial.iter().map(|r| r.sinh()).collect(),
            cos_t: angular.iter().map(|t| t.cos()).collect(),
            sin_t: angular.iter().map(|t| t.sin()).collect(),
        }
    }

    #[inline]
    fn dist_to(&self, j: usize, cosh_r: f64, sinh_r: f64, cos_t: f64, sin_t: f64) -> f64 {
        let cos_dt = cos_t * self.cos_t[j] + sin_t * self.sin_t[j];
        (cosh_r * self.cosh_r[j] - sinh_r * self.sinh_r[j] * cos_dt)
            .max(1.0)
            .acosh()
    }
}

/// Total log-likelihood of `graph` under coordinates `coords`:
/// sum over unordered pairs of `a ln p + (1 - a) ln(1 - p)`.
pub fn log_likelihood(coords: &NodeCoords, graph: &Graph, params: &LayerParams) -> f64 {
    assert_eq!(coords.len(), graph.n_nodes(), "coordinate/adjacency size mismatch");
    let n = coords.len();
    let trig = Trig::of(&coords.radial, &coords.angular);
    const CHUNK: usize = 64;
    let starts: Vec<usize> = (0..n).step_by(CHUNK).collect();
    let partials: Vec<f64> = starts
        .par_iter()
        .map(|&start| {
            let mut acc = 0.0;
            for i in start..(start + CHUNK).min(n) {
                let nbs = graph.neighbors(i as u32);
                let mut nb_iter = nbs.iter().copied().skip_while(|&j| (j as usize) <= i).peekable();
                for j in (i + 1)..n {
                    let connected = match nb_iter.peek() {
                        Some(&nb) if nb as usize == j => {
                            nb_iter.next();
                            true
                        }
                        _ => false,
                    };
                    let x = trig.dist_to(
                        j,
                        trig.cosh_r[i],
                        trig.sinh_r[i],
                        trig.cos_t[i],
                        trig.sin_t[i],
                    );
                    acc += pair_log_term(x, connected, params);
                }
            }
            acc
        })
        .collect();
    partials.iter().sum()
}

/// Log-likelihood contribution of node `i` at angle `theta` against the
/// nodes listed in `others`.
fn node_terms(
    i: usize,
    theta: f64,
    radial: &[f64],
    trig: &Trig,
    others: &[u32],
    neighbor_mask: &[bool],
    params: &LayerParams,
) -> f64 {
    let cosh_r = radial[i].cosh();
    let sinh_r = radial[i].sinh();
    let (sin_t, cos_t) = theta.sin_cos();
    let mut acc = 0.0;
    for &j in others {
        let j = j as usize;
        if j == i {
            continue;
        }
        let x = trig.dist_to(j, cosh_r, sinh_r, cos_t, sin_t);
        acc += pair_log_term(x, neighbor_mask[j], params);
    }
    acc
}

/// Best candidate angle for node `i` against `others`: the top grid angle
/// (deterministic tie-break on the lowest index) refined by a golden-section
/// scan of one grid spacing around it. Without the continuous refinement,
/// nodes attracted to the same region pile up on identical grid angles and
/// acquire spurious near-zero mutual distances. Parallel over candidates.
fn best_angle(
    i: usize,
    grid: &[f64],
    radial: &[f64],
    trig: &Trig,
    others: &[u32],
    neighbor_mask: &[bool],
    params: &LayerParams,
) -> (f64, f64) {
    let scores: Vec<f64> = grid
        .par_iter()
        .map(|&theta| node_terms(i, theta, radial, trig, others, neighbor_mask, params))
        .collect();
    let mut best = 0;
    for (k, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = k;
        }
    }

    let spacing = TAU / grid.len() as f64;
    let eval = |theta: f64| node_terms(i, theta, radial, trig, others, neighbor_mask, params);
    let (mut lo, mut hi) = (grid[best] - spacing, grid[best] + spacing);
    let inv_phi = 0.6180339887498949;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..24 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        }
    }
    let theta = crate::geom::wrap_angle(0.5 * (lo + hi));
    let score = eval(theta);
    if score > scores[best] {
        (theta, score)
    } else {
        (grid[best], scores[best])
    }
}

/// Infers node coordinates for an observed layer.
///
/// Isolated nodes sit at `r = R` with a random angle and are excluded from
/// the optimization order.
pub fn embed_layer(
    graph: &Graph,
    params: &LayerParams,
    config: &EmbeddingConfig,
    rng: &mut impl Rng,
) -> Result<NodeCoords> {
    embed_layer_traced(graph, params, config, rng).map(|(coords, _)| coords)
}

/// As [`embed_layer`], also returning the total log-likelihood after greedy
/// placement and after each refinement pass.
pub fn embed_layer_traced(
    graph: &Graph,
    params: &LayerParams,
    config: &EmbeddingConfig,
    rng: &mut impl Rng,
) -> Result<(NodeCoords, Vec<f64>)> {
    if config.candidate_angles < 4 {
        return Err(Error::InvalidParameter("candidate_angles < 4".into()));
    }
    let n = graph.n_nodes();
    let degrees = graph.degrees();
    let radial = infer_radial_coords(&degrees, params);
    let mut angular: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();

    let grid: Vec<f64> = (0..config.candidate_angles)
        .map(|k| TAU * k as f64 / config.candidate_angles as f64)
        .collect();

    // Decreasing degree, ties by index; isolated nodes keep random angles.
    let mut order: Vec<u32> = (0..n as u32).filter(|&u| degrees[u as usize] > 0).collect();
    order.sort_by_key(|&u| (std::cmp::Reverse(degrees[u as usize]), u));

    let mut trig = Trig::of(&radial, &angular);
    let mut neighbor_mask = vec![false; n];

    // Greedy placement against already-placed nodes.
    let mut placed: Vec<u32> = Vec::with_capacity(order.len());
    for &u in &order {
        for &nb in graph.neighbors(u) {
            neighbor_mask[nb as usize] = true;
        }
        let (best_theta, _) = best_angle(
            u as usize,
            &grid,
            &radial,
            &trig,
            &placed,
            &neighbor_mask,
            params,
        );
        for &nb in graph.neighbors(u) {
            neighbor_mask[nb as usize] = false;
        }
        angular[u as usize] = best_theta;
        let (s, c) = best_theta.sin_cos();
        trig.sin_t[u as usize] = s;
        trig.cos_t[u as usize] = c;
        placed.push(u);
    }

    // Refinement sweeps over the full pair set. The current angle is always
    // a candidate, so each accepted move cannot decrease the likelihood.
    let everyone: Vec<u32> = (0..n as u32).collect();
    let mut trace = Vec::with_capacity(config.refinement_passes + 1);
    let snapshot = |angular: &Vec<f64>| {
        let coords = NodeCoords {
            radial: radial.clone(),
            angular: angular.clone(),
        };
        log_likelihood(&coords, graph, params)
    };
    trace.push(snapshot(&angular));
    for _pass in 0..config.refinement_passes {
        for &u in &order {
            for &nb in graph.neighbors(u) {
                neighbor_mask[nb as usize] = true;
            }
            let current = node_terms(
                u as usize,
                angular[u as usize],
                &radial,
                &trig,
                &everyone,
                &neighbor_mask,
                params,
            );
            let (best_theta, score) = best_angle(
                u as usize,
                &grid,
                &radial,
                &trig,
                &everyone,
                &neighbor_mask,
                params,
            );
            if score > current {
                angular[u as usize] = best_theta;
                let (s, c) = best_theta.sin_cos();
                trig.sin_t[u as usize] = s;
                trig.cos_t[u as usize] = c;
            }
            for &nb in graph.neighbors(u) {
                neighbor_mask[nb as usize] = false;
            }
        }
        trace.push(snapshot(&angular));
    }

    Ok((NodeCoords::new(radial, angular)?, trace))
}

/// Layer-2 log-likelihood conditioned on layer-1 adjacency and the link
/// persistence probability `w`: the sum over common pairs of
/// `ln[w a1 a2 + (1 - w a1) p2^{a2} (1 - p2)^{1-a2}]`.
///
/// All inputs are indexed by common node; at `w = 0` the result equals
/// [`log_likelihood`] of `(coords2, adj2)` exactly (identical float path).
pub fn conditional_layer2_log_likelihood(
    coords2: &NodeCoords,
    adj1: &Graph,
    adj2: &Graph,
    w: f64,
    params2: &LayerParams,
) -> Result<f64> {
    if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
        return Err(Error::InvalidParameter(format!("w = {w}, need w in [0, 1]")));
    }
    let n = coords2.len();
    if adj1.n_nodes() != n || adj2.n_nodes() != n {
        return Err(Error::InvalidParameter(
            "layers must be aligned on common nodes".into(),
        ));
    }
    if w == 0.0 {
        return Ok(log_likelihood(coords2, adj2, params2));
    }
    let trig = Trig::of(&coords2.radial, &coords2.angular);
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let a1 = adj1.has_edge(i as u32, j as u32);
            let a2 = adj2.has_edge(i as u32, j as u32);
            let x = trig.dist_to(
                j,
                trig.cosh_r[i],
                trig.sinh_r[i],
                trig.cos_t[i],
                trig.sin_t[i],
            );
            let base = pair_log_term(x, a2, params2);
            total += if a1 {
                let mix = w * (a2 as u8 as f64) + (1.0 - w) * base.exp();
                mix.max(1e-300).ln()
            } else {
                base
            };
        }
    }
    Ok(total)
}

/// Hurwitz zeta `sum_{k>=0} (a + k)^{-s}` by Euler-Maclaurin.
fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    const CUT: usize = 20;
    let mut sum = 0.0;
    for k in 0..CUT {
        sum += (a + k as f64).powf(-s);
    }
    let top = a + CUT as f64;
    sum += top.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * top.powf(-s);
    sum += s * top.powf(-s - 1.0) / 12.0;
    sum -= s * (s + 1.0) * (s + 2.0) * top.powf(-s - 3.0) / 720.0;
    sum
}

/// Discrete power-law fit of a degree tail at fixed `k_min`: the MLE exponent
/// maximizing `-n ln zeta(gamma, k_min) - gamma sum ln k` by golden-section.
fn fit_exponent(tail: &[usize], k_min: usize) -> f64 {
    let n = tail.len() as f64;
    let log_sum: f64 = tail.iter().map(|&k| (k as f64).ln()).sum();
    let objective = |gamma: f64| -n * hurwitz_zeta(gamma, k_min as f64).ln() - gamma * log_sum;
    let (mut lo, mut hi) = (1.01f64, 20.0f64);
    let inv_phi = 0.6180339887498949;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    while hi - lo > 1e-9 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
    }
    0.5 * (lo + hi)
}

/// KS distance between the empirical tail CDF and the fitted discrete law.
fn tail_ks(tail: &[usize], k_min: usize, gamma: f64) -> f64 {
    let n = tail.len() as f64;
    let z_min = hurwitz_zeta(gamma, k_min as f64);
    let mut d = 0.0f64;
    let mut below = 0usize;
    let mut i = 0;
    while i < tail.len() {
        let k = tail[i];
        while i < tail.len() && tail[i] == k {
            i += 1;
        }
        below = i;
        let emp = below as f64 / n;
        let model = 1.0 - hurwitz_zeta(gamma, (k + 1) as f64) / z_min;
        d = d.max((emp - model).abs());
    }
    let _ = below;
    d
}

/// Discrete power-law MLE of a degree sequence with `k_min` chosen by KS
/// minimization. Needs at least 50 nodes of degree >= 1 and a non-degenerate
/// sequence.
pub fn estimate_gamma(degrees: &[usize]) -> Result<f64> {
    let mut ks: Vec<usize> = degrees.iter().copied().filter(|&k| k >= 1).collect();
    if ks.len() < 50 {
        return Err(Error::DegenerateInput(format!(
            "need >= 50 nodes with degree >= 1, have {}",
            ks.len()
        )));
    }
    ks.sort_unstable();
    if ks.first() == ks.last() {
        return Err(Error::DegenerateInput("all degrees equal".into()));
    }

    // Candidate k_min values: distinct degrees whose tail keeps >= 50 points.
    let mut best: Option<(f64, f64)> = None; // (ks distance, gamma)
    let mut idx = 0;
    while idx < ks.len() {
        let k_min = ks[idx];
        let tail = &ks[idx..];
        if tail.len() < 50 || tail.first() == tail.last() {
            break;
        }
        let gamma = fit_exponent(tail, k_min);
        let d = tail_ks(tail, k_min, gamma);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, gamma));
        }
        while idx < ks.len() && ks[idx] == k_min {
            idx += 1;
        }
    }
    best.map(|(_, gamma)| gamma)
        .ok_or_else(|| Error::DegenerateInput("no admissible k_min candidate".into()))
}
