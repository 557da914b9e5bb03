//! Construction of single hyperbolic layers, correlated two-layer
//! multiplexes, and link persistence between layers.
//!
//! Edge creation consumes one counter-based uniform per unordered pair
//! (see [`crate::rng::PairStream`]), so a multiplex is a pure function of
//! `(seed, parameters)` at any parallelism degree. Link persistence draws one
//! threshold-coupled uniform per common layer-1 edge: for a fixed seed the
//! selected sets are nested across increasing `w`.

use crate::coupling::{
    assign_layer2_angle, sample_angular_offset, sample_conditional_radial, CorrelationParams,
};
use crate::error::{Error, Result};
use crate::geom::{LayerParams, NodeCoords, TrigCache};
use crate::graph::Graph;
use crate::rng::{salt, seeded_stream, PairStream};
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// One layer of a multiplex: adjacency plus node coordinates.
#[derive(Debug, Clone)]
pub struct Layer {
    pub graph: Graph,
    pub coords: NodeCoords,
}

/// A two-layer multiplex. The first `common_count` node indices of each layer
/// refer to the shared nodes; `node_map[k]` gives the layer-1 and layer-2
/// indices of common node `k`.
#[derive(Debug, Clone)]
pub struct Multiplex {
    pub common_count: usize,
    pub layer1: Layer,
    pub layer2: Layer,
    pub params1: LayerParams,
    pub params2: LayerParams,
    pub node_map: Vec<(u32, u32)>,
    /// Layer-1 edges (as common-node index pairs) selected by link
    /// persistence, including those already present in layer 2.
    pub persistent_edges: Vec<(u32, u32)>,
    /// Link persistence probability applied so far (0 before application).
    pub w: f64,
}

impl Multiplex {
    /// Common node index -> layer-1 node index.
    #[inline]
    pub fn l1_index(&self, k: usize) -> u32 {
        self.node_map[k].0
    }

    /// Common node index -> layer-2 node index.
    #[inline]
    pub fn l2_index(&self, k: usize) -> u32 {
        self.node_map[k].1
    }
}

/// Connects every unordered pair of `coords` independently with the layer's
/// Fermi-Dirac probability in their hyperbolic distance. Each pair consumes
/// exactly one uniform from `pairs`, so the result is independent of
/// iteration order and thread count.
pub fn generate_layer(params: &LayerParams, coords: &NodeCoords, pairs: &PairStream) -> Graph {
    let n = coords.len();
    let trig = TrigCache::new(coords);
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in (i + 1)..n {
                let x = trig.distance(i, j);
                if pairs.uniform(i as u32, j as u32) < params.connection_probability(x) {
                    row.push(j as u32);
                }
            }
            row
        })
        .collect();
    let mut g = Graph::new(n);
    for (i, row) in rows.into_iter().enumerate() {
        for j in row {
            g.add_edge(i as u32, j);
        }
    }
    g
}

/// Samples layer-1 coordinates: radial from the truncated exponential
/// density, angular uniform.
pub fn sample_layer_coords(params: &LayerParams, rng: &mut impl Rng) -> NodeCoords {
    let n = params.n_nodes;
    let mut radial = Vec::with_capacity(n);
    let mut angular = Vec::with_capacity(n);
    for _ in 0..n {
        radial.push(params.sample_radial(rng));
        angular.push(rng.random::<f64>() * TAU);
    }
    NodeCoords::new(radial, angular).expect("sampled coordinates are valid")
}

/// Constructs a correlated two-layer multiplex.
///
/// The first `common` nodes exist in both layers; their layer-2 coordinates
/// are coupled to layer 1 through the radial copula and the angular offset.
/// Remaining nodes of either layer draw independent marginal coordinates.
/// Edges are then created within each layer from its own connection
/// probability. No link persistence is applied (`w = 0`).
pub fn generate_gmm(
    params1: &LayerParams,
    params2: &LayerParams,
    corr: &CorrelationParams,
    common: usize,
    seed: u64,
) -> Result<Multiplex> {
    if common > params1.n_nodes.min(params2.n_nodes) {
        return Err(Error::InvalidParameter(format!(
            "common = {common} exceeds min layer size {}",
            params1.n_nodes.min(params2.n_nodes)
        )));
    }

    let mut rng1 = seeded_stream(seed, salt::COORDS_LAYER1);
    let coords1 = sample_layer_coords(params1, &mut rng1);

    let mut rng2 = seeded_stream(seed, salt::COORDS_LAYER2);
    let n2 = params2.n_nodes;
    let mut radial2 = Vec::with_capacity(n2);
    let mut angular2 = Vec::with_capacity(n2);
    for k in 0..common {
        let r2 = sample_conditional_radial(coords1.radial[k], params1, params2, corr.nu, &mut rng2)?;
        let l = sample_angular_offset(corr, n2, &mut rng2);
        radial2.push(r2);
        angular2.push(assign_layer2_angle(coords1.angular[k], l, n2));
    }
    for _ in common..n2 {
        radial2.push(params2.sample_radial(&mut rng2));
        angular2.push(rng2.random::<f64>() * TAU);
    }
    let coords2 = NodeCoords::new(radial2, angular2)?;

    let graph1 = generate_layer(params1, &coords1, &PairStream::new(seed, salt::EDGES_LAYER1));
    let graph2 = generate_layer(params2, &coords2, &PairStream::new(seed, salt::EDGES_LAYER2));

    Ok(Multiplex {
        common_count: common,
        layer1: Layer {
            graph: graph1,
            coords: coords1,
        },
        layer2: Layer {
            graph: graph2,
            coords: coords2,
        },
        params1: *params1,
        params2: *params2,
        node_map: (0..common as u32).map(|k| (k, k)).collect(),
        persistent_edges: Vec::new(),
        w: 0.0,
    })
}

/// Applies link persistence: every layer-1 edge whose endpoints are both
/// common is selected independently with probability `w`; selected pairs are
/// connected in layer 2 if absent and recorded in `persistent_edges`.
///
/// Selection draws the pair's uniform from a counter-based stream and keeps
/// it iff `u < w`, so runs sharing a seed have nested selections across `w`.
pub fn apply_link_persistence(m: &Multiplex, w: f64, seed: u64) -> Result<Multiplex> {
    if !(w.is_finite() && (0.0..=1.0).contains(&w)) {
        return Err(Error::InvalidParameter(format!("w = {w}, need w in [0, 1]")));
    }
    let pairs = PairStream::new(seed, salt::PERSISTENCE);
    let mut out = m.clone();
    out.w = w;
    out.persistent_edges.clear();

    // Common-node index lookup for layer-1 endpoints.
    let mut common_of_l1 = vec![u32::MAX; m.layer1.graph.n_nodes()];
    for (k, &(i1, _)) in m.node_map.iter().enumerate() {
        common_of_l1[i1 as usize] = k as u32;
    }

    for (u, v) in m.layer1.graph.edges() {
        let (ku, kv) = (common_of_l1[u as usize], common_of_l1[v as usize]);
        if ku == u32::MAX || kv == u32::MAX {
            continue;
        }
        let (ka, kb) = if ku < kv { (ku, kv) } else { (kv, ku) };
        if pairs.uniform(ka, kb) < w {
            out.persistent_edges.push((ka, kb));
            let (a2, b2) = (m.node_map[ka as usize].1, m.node_map[kb as usize].1);
            out.layer2.graph.add_edge(a2, b2);
        }
    }
    out.layer2.graph.sort_adjacency();
    out.persistent_edges.sort_unstable();
    Ok(out)
}
