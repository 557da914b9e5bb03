//! File formats: edge lists, coordinate files, node maps, flat key-value run
//! configuration, CSV export and the run manifest.
//!
//! Node identifiers in files are arbitrary whitespace-free strings; they map
//! to dense `u32` indices in first-seen order and the mapping is persisted in
//! the manifest. Coordinate files round-trip losslessly (shortest-roundtrip
//! float formatting).

use crate::analytics::{BinnedCurve, Ccdf};
use crate::coupling::CorrelationParams;
use crate::error::{Error, Result};
use crate::geom::{wrap_angle, LayerParams, NodeCoords};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

/// Dense-index mapping of string node identifiers, in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdMap {
    pub names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity map `0..n` for generated networks.
    pub fn dense(n: usize) -> Self {
        let mut m = Self::new();
        for i in 0..n {
            m.intern(&i.to_string());
        }
        m
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Rebuilds the lookup index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
    }
}

/// Result of parsing an edge list: the graph, the id mapping and the number
/// of dropped self-loops/duplicates.
#[derive(Debug)]
pub struct ParsedEdgeList {
    pub graph: Graph,
    pub ids: IdMap,
    pub dropped: usize,
}

/// Parses a whitespace-separated edge list. Lines starting with `#` (and
/// blank lines) are skipped; every other line must hold exactly two node
/// identifiers. Self-loops and duplicate edges are dropped and counted.
pub fn parse_edge_list(path: &Path) -> Result<ParsedEdgeList> {
    let mut ids = IdMap::new();
    let (graph, dropped) = parse_edge_list_with(path, &mut ids)?;
    Ok(ParsedEdgeList { graph, ids, dropped })
}

/// As [`parse_edge_list`], extending an existing id map (so the node set can
/// be seeded from a coordinate file, covering isolated nodes).
pub fn parse_edge_list_with(path: &Path, ids: &mut IdMap) -> Result<(Graph, usize)> {
    let text = std::fs::read_to_string(path)?;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    msg: format!("expected two node identifiers, got {line:?}"),
                })
            }
        };
        edges.push((ids.intern(a), ids.intern(b)));
    }
    Ok(Graph::from_edges(ids.len(), edges))
}

/// Interns the node ids of a coordinate file (first token per line) without
/// reading the coordinates.
pub fn scan_coord_ids(path: &Path, ids: &mut IdMap) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(id) = line.split_whitespace().next() {
            ids.intern(id);
        }
    }
    Ok(())
}

pub fn write_edge_list(path: &Path, graph: &Graph, ids: &IdMap) -> Result<()> {
    let mut out = String::new();
    for (u, v) in graph.edges() {
        writeln!(out, "{} {}", ids.names[u as usize], ids.names[v as usize]).unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a coordinate file with lines `id r theta` against an existing id
/// map. Every id must be known and every node must receive coordinates;
/// angles are wrapped to `[0, 2 pi)` on read.
pub fn read_coords(path: &Path, ids: &IdMap) -> Result<NodeCoords> {
    let text = std::fs::read_to_string(path)?;
    let n = ids.len();
    let mut radial = vec![f64::NAN; n];
    let mut angular = vec![f64::NAN; n];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.display().to_string(),
            line: lineno + 1,
            msg,
        };
        let mut tokens = line.split_whitespace();
        let (id, r, t) = match (tokens.next(), tokens.next(), tokens.next(), tokens.next()) {
            (Some(id), Some(r), Some(t), None) => (id, r, t),
            _ => return Err(parse_err(format!("expected `id r theta`, got {line:?}"))),
        };
        let idx = ids
            .get(id)
            .ok_or_else(|| Error::IdMismatch(format!("coordinate id {id:?} not in the graph")))?;
        let r: f64 = r
            .parse()
            .map_err(|e| parse_err(format!("bad radial value {r:?}: {e}")))?;
        let t: f64 = t
            .parse()
            .map_err(|e| parse_err(format!("bad angular value {t:?}: {e}")))?;
        radial[idx as usize] = r;
        angular[idx as usize] = wrap_angle(t);
    }
    if let Some(missing) = radial.iter().position(|r| r.is_nan()) {
        return Err(Error::IdMismatch(format!(
            "node {:?} has no coordinates in {}",
            ids.names[missing],
            path.display()
        )));
    }
    NodeCoords::new(radial, angular)
}

pub fn write_coords(path: &Path, coords: &NodeCoords, ids: &IdMap) -> Result<()> {
    let mut out = String::new();
    for i in 0..coords.len() {
        // Default float formatting is shortest-roundtrip, hence lossless.
        writeln!(
            out,
            "{} {} {}",
            ids.names[i], coords.radial[i], coords.angular[i]
        )
        .unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a node map with lines `id1 id2` tying a layer-1 node to a layer-2
/// node. Ids must exist in their respective maps; pairs must be unique.
pub fn read_node_map(path: &Path, ids1: &IdMap, ids2: &IdMap) -> Result<Vec<(u32, u32)>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = Vec::new();
    let mut seen1 = std::collections::HashSet::new();
    let mut seen2 = std::collections::HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    msg: format!("expected `id1 id2`, got {line:?}"),
                })
            }
        };
        let i1 = ids1
            .get(a)
            .ok_or_else(|| Error::IdMismatch(format!("node {a:?} not in layer 1")))?;
        let i2 = ids2
            .get(b)
            .ok_or_else(|| Error::IdMismatch(format!("node {b:?} not in layer 2")))?;
        if !seen1.insert(i1) || !seen2.insert(i2) {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                msg: format!("node map entry {a:?} {b:?} repeats an id"),
            });
        }
        map.push((i1, i2));
    }
    Ok(map)
}

/// Identity node map over ids present in both layers (first-seen order of
/// layer 1).
pub fn shared_id_map(ids1: &IdMap, ids2: &IdMap) -> Vec<(u32, u32)> {
    ids1.names
        .iter()
        .enumerate()
        .filter_map(|(i1, name)| ids2.get(name).map(|i2| (i1 as u32, i2)))
        .collect()
}

// ---------------------------------------------------------------------------
// CSV export. All files carry headers; column order is stable.

pub fn curve_to_csv(curve: &BinnedCurve) -> String {
    let mut out = String::from("bin_left,bin_right,count,estimate\n");
    for i in 0..curve.n_bins() {
        match curve.estimate(i) {
            Some(e) => writeln!(
                out,
                "{},{},{},{}",
                curve.bin_left(i),
                curve.bin_right(i),
                curve.counts[i],
                e
            )
            .unwrap(),
            None => writeln!(
                out,
                "{},{},0,",
                curve.bin_left(i),
                curve.bin_right(i)
            )
            .unwrap(),
        }
    }
    out
}

pub fn sweep_to_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("w,auroc,aupr\n");
    for (w, roc, pr) in rows {
        writeln!(out, "{w},{roc},{pr}").unwrap();
    }
    out
}

pub fn ccdf_to_csv(ccdf: &Ccdf) -> String {
    let mut out = String::from("value,ccdf\n");
    for (v, p) in ccdf.values.iter().zip(&ccdf.probs) {
        writeln!(out, "{v},{p}").unwrap();
    }
    out
}

/// Two-column curve (e.g. theory predictions on a grid).
pub fn xy_to_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = format!("{header}\n");
    for (x, y) in rows {
        writeln!(out, "{x},{y}").unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// Run configuration: flat `key = value` text, unknown keys rejected.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n1: usize,
    pub k1: f64,
    pub gamma1: f64,
    pub t1: f64,
    pub n2: usize,
    pub k2: f64,
    pub gamma2: f64,
    pub t2: f64,
    pub nu: f64,
    pub g: f64,
    pub w: f64,
    pub common: usize,
    pub seed: u64,
    pub bin_width: f64,
    /// Lower the layer-2 degree target so the persistence-inflated average
    /// degree lands on `k2` (uncorrelated-case correction).
    pub calibrate_k2: bool,
}

impl RunConfig {
    /// Parses the flat key-value format. Every key must be known; `n1, k1,
    /// gamma1, t1, n2, k2, gamma2, t2, nu, g, w` are required.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut values: HashMap<&str, (usize, &str)> = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_string(),
                line: lineno + 1,
                msg: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if values.insert(key, (lineno + 1, value)).is_some() {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line: lineno + 1,
                    msg: format!("duplicate key {key:?}"),
                });
            }
        }

        const KNOWN: [&str; 15] = [
            "n1", "k1", "gamma1", "t1", "n2", "k2", "gamma2", "t2", "nu", "g", "w", "common",
            "seed", "bin_width", "calibrate_k2",
        ];
        for (&key, &(line, _)) in &values {
            if !KNOWN.contains(&key) {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line,
                    msg: format!("unknown key {key:?}"),
                });
            }
        }

        fn req<'a, T: std::str::FromStr>(
            values: &HashMap<&str, (usize, &'a str)>,
            key: &str,
            path: &str,
        ) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            let (line, raw) = values.get(key).ok_or_else(|| Error::Parse {
                path: path.to_string(),
                line: 0,
                msg: format!("missing required key {key:?}"),
            })?;
            raw.parse().map_err(|e| Error::Parse {
                path: path.to_string(),
                line: *line,
                msg: format!("bad value for {key:?}: {e}"),
            })
        }

        fn opt<'a, T: std::str::FromStr>(
            values: &HashMap<&str, (usize, &'a str)>,
            key: &str,
            default: T,
            path: &str,
        ) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            match values.get(key) {
                None => Ok(default),
                Some((line, raw)) => raw.parse().map_err(|e| Error::Parse {
                    path: path.to_string(),
                    line: *line,
                    msg: format!("bad value for {key:?}: {e}"),
                }),
            }
        }

        let n1: usize = req(&values, "n1", path)?;
        let n2: usize = req(&values, "n2", path)?;
        Ok(Self {
            n1,
            k1: req(&values, "k1", path)?,
            gamma1: req(&values, "gamma1", path)?,
            t1: req(&values, "t1", path)?,
            n2,
            k2: req(&values, "k2", path)?,
            gamma2: req(&values, "gamma2", path)?,
            t2: req(&values, "t2", path)?,
            nu: req(&values, "nu", path)?,
            g: req(&values, "g", path)?,
            w: req(&values, "w", path)?,
            common: opt(&values, "common", n1.min(n2), path)?,
            seed: opt(&values, "seed", 0, path)?,
            bin_width: opt(&values, "bin_width", 1.0, path)?,
            calibrate_k2: opt(&values, "calibrate_k2", false, path)?,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Layer-2 degree target after optional calibration: solves the
    /// uncorrelated average-degree relation so the generated layer lands on
    /// the configured `k2` after persistence.
    pub fn effective_k2(&self) -> Result<f64> {
        if !self.calibrate_k2 {
            return Ok(self.k2);
        }
        let n = self.common as f64;
        let corrected = (self.k2 - self.w * self.k1) / (1.0 - self.w * self.k1 / n);
        if !(corrected.is_finite() && corrected > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cannot calibrate k2 = {} against w k1 = {}",
                self.k2,
                self.w * self.k1
            )));
        }
        Ok(corrected)
    }
}

/// Everything needed to reproduce and interpret a generation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub config: RunConfig,
    pub params1: LayerParams,
    pub params2: LayerParams,
    pub corr: CorrelationParams,
    pub w: f64,
    pub common_count: usize,
    pub layer1_edges: usize,
    pub layer2_edges: usize,
    pub persistent_edges: usize,
    pub mean_degree1: f64,
    pub mean_degree2: f64,
    /// Node identifier convention of the emitted files.
    pub node_ids: String,
    pub outputs: Vec<String>,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::InvalidParameter(format!("manifest serialization: {e}")))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}
