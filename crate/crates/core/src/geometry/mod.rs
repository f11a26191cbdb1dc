//! Discrete stand-ins for a complete Riemannian manifold `(M, g, dv)`.
//!
//! A [`DiscreteManifold`] is a connected weighted graph: every node carries a
//! volume weight, every edge a conductance and a length. Nodes may also carry a
//! boundary conductance coupling them to an implicit zero-valued ghost, which
//! is how the radial grids realise a Dirichlet condition at the truncation
//! radius. Distances from the base point are stored once and used for every
//! ball centred there.

mod cutoff;
mod graphs;
mod growth;
mod radial;
mod region;

pub use cutoff::{linear_cutoff, log_cutoff};
pub use graphs::{circle, from_edges, grid, segment, single_node, torus, two_node};
pub use growth::{fit_growth_exponent, fit_growth_exponent_with, volume_growth, GrowthFit};
pub use radial::{build_radial, sphere_area, RadialSpec, Warp};
pub(crate) use radial::interpolate;
pub use region::{Region, RegionKind};

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Deref, DerefMut};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when comparing stored distances against each other.
const DIST_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub conductance: f64,
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout {
    /// Cell-centred shells of a warped product, node `i` at radius `(i + 1/2) h`.
    Radial { h: f64, r_max: f64 },
    Graph,
}

/// A real value per node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeField(pub Vec<f64>);

impl NodeField {
    pub fn zeros(n: usize) -> Self {
        NodeField(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        NodeField(vec![value; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        NodeField((0..n).map(f).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        NodeField(self.0.iter().map(|v| a * v).collect())
    }
}

impl Deref for NodeField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for NodeField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for NodeField {
    fn from(v: Vec<f64>) -> Self {
        NodeField(v)
    }
}

#[derive(Clone, Debug)]
pub struct DiscreteManifold {
    volume_weights: Vec<f64>,
    edges: Vec<Edge>,
    boundary_conductance: Vec<f64>,
    dimension: usize,
    base_point: usize,
    node_distances: Vec<f64>,
    labels: Vec<f64>,
    layout: Layout,
    adjacency: Vec<Vec<(usize, usize)>>,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl DiscreteManifold {
    /// Assembles and validates a manifold.
    ///
    /// `node_distances` defaults to shortest-path distances from `base_point`.
    /// `labels` is the `r_or_id` column of the CSV dump; it defaults to the node index.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        volume_weights: Vec<f64>,
        edges: Vec<Edge>,
        boundary_conductance: Option<Vec<f64>>,
        dimension: usize,
        base_point: usize,
        node_distances: Option<Vec<f64>>,
        labels: Option<Vec<f64>>,
        layout: Layout,
    ) -> Result<Self> {
        let n = volume_weights.len();
        if n == 0 {
            return Err(Error::InvalidManifold("no nodes".into()));
        }
        if dimension == 0 {
            return Err(Error::InvalidManifold("dimension tag must be >= 1".into()));
        }
        if base_point >= n {
            return Err(Error::InvalidManifold(format!(
                "base point {base_point} out of range for {n} nodes"
            )));
        }
        for (i, &w) in volume_weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidManifold(format!(
                    "volume weight of node {i} is {w}, must be positive"
                )));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.i >= n || e.j >= n {
                return Err(Error::InvalidManifold(format!(
                    "edge {k} ({}, {}) references a missing node",
                    e.i, e.j
                )));
            }
            if e.i == e.j {
                return Err(Error::InvalidManifold(format!("edge {k} is a self-loop")));
            }
            if !(e.conductance.is_finite() && e.conductance > 0.0) {
                return Err(Error::InvalidManifold(format!(
                    "edge {k} has conductance {}, must be positive",
                    e.conductance
                )));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidManifold(format!(
                    "edge {k} has length {}, must be positive",
                    e.length
                )));
            }
            adjacency[e.i].push((e.j, k));
            adjacency[e.j].push((e.i, k));
        }
        let boundary_conductance = boundary_conductance.unwrap_or_else(|| vec![0.0; n]);
        if boundary_conductance.len() != n {
            return Err(Error::InvalidManifold("boundary conductance length mismatch".into()));
        }
        if let Some((i, b)) = boundary_conductance
            .iter()
            .enumerate()
            .find(|(_, b)| !(b.is_finite() && **b >= 0.0))
        {
            return Err(Error::InvalidManifold(format!(
                "boundary conductance of node {i} is {b}"
            )));
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| i as f64).collect());
        if labels.len() != n {
            return Err(Error::InvalidManifold("label length mismatch".into()));
        }

        let mut m = DiscreteManifold {
            volume_weights,
            edges,
            boundary_conductance,
            dimension,
            base_point,
            node_distances: Vec::new(),
            labels,
            layout,
            adjacency,
        };

        let reach = m.shortest_paths(base_point, f64::INFINITY);
        if reach.len() != n {
            return Err(Error::InvalidManifold(format!(
                "graph is disconnected: {} of {n} nodes reachable from the base point",
                reach.len()
            )));
        }
        let distances = match node_distances {
            Some(d) => {
                if d.len() != n {
                    return Err(Error::InvalidManifold("distance length mismatch".into()));
                }
                if let Some((i, v)) = d.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
                    return Err(Error::InvalidManifold(format!("distance of node {i} is {v}")));
                }
                d
            }
            None => {
                let mut d = vec![0.0; n];
                for (i, dist) in reach {
                    d[i] = dist;
                }
                d
            }
        };
        for (k, e) in m.edges.iter().enumerate() {
            let gap = (distances[e.i] - distances[e.j]).abs();
            if gap > e.length * (1.0 + DIST_SLACK) + DIST_SLACK {
                return Err(Error::InvalidManifold(format!(
                    "distances violate the triangle inequality along edge {k}: |{} - {}| > {}",
                    distances[e.i], distances[e.j], e.length
                )));
            }
        }
        m.node_distances = distances;
        Ok(m)
    }

    pub fn node_count(&self) -> usize {
        self.volume_weights.len()
    }

    pub fn volume_weights(&self) -> &[f64] {
        &self.volume_weights
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary_conductance(&self) -> &[f64] {
        &self.boundary_conductance
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn node_distances(&self) -> &[f64] {
        &self.node_distances
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Neighbours of node `i` as `(node, edge index)` pairs.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn total_volume(&self) -> f64 {
        self.volume_weights.iter().sum()
    }

    /// True when no node is coupled to a Dirichlet ghost.
    pub fn is_closed(&self) -> bool {
        self.boundary_conductance.iter().all(|&b| b == 0.0)
    }

    /// The radius standing in for infinity.
    pub fn truncation_radius(&self) -> f64 {
        match self.layout {
            Layout::Radial { r_max, .. } => r_max,
            Layout::Graph => self.node_distances.iter().cloned().fold(0.0, f64::max),
        }
    }

    pub(crate) fn check_radius(&self, radius: f64) -> Result<()> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidArgument(format!("radius {radius} must be finite and >= 0")));
        }
        let t = self.truncation_radius();
        if radius > t * (1.0 + DIST_SLACK) {
            return Err(Error::BeyondTruncation { radius, truncation: t });
        }
        Ok(())
    }

    /// Nodes within `cutoff` of `source` along edges, with their distances.
    pub fn shortest_paths(&self, source: usize, cutoff: f64) -> Vec<(usize, f64)> {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        let mut out = Vec::new();
        dist[source] = 0.0;
        heap.push(HeapItem(0.0, source));
        while let Some(HeapItem(d, i)) = heap.pop() {
            if done[i] {
                continue;
            }
            done[i] = true;
            out.push((i, d));
            for &(j, k) in &self.adjacency[i] {
                let nd = d + self.edges[k].length;
                if nd <= cutoff && nd < dist[j] {
                    dist[j] = nd;
                    heap.push(HeapItem(nd, j));
                }
            }
        }
        out
    }

    /// Members of the closed ball of radius `radius` about `center`.
    ///
    /// Balls about the base point use the stored distances; any other centre
    /// uses shortest paths. The centre itself always belongs to its ball.
    pub fn ball_nodes(&self, center: usize, radius: f64) -> Vec<usize> {
        let mut nodes: Vec<usize> = if center == self.base_point {
            (0..self.node_count())
                .filter(|&i| i == center || self.node_distances[i] <= radius)
                .collect()
        } else {
            self.shortest_paths(center, radius).into_iter().map(|(i, _)| i).collect()
        };
        nodes.sort_unstable();
        nodes
    }

    /// Distance between two nodes; measured from the stored distances when
    /// either is the base point.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        if a == self.base_point {
            return self.node_distances[b];
        }
        if b == self.base_point {
            return self.node_distances[a];
        }
        self.shortest_paths(a, f64::INFINITY)
            .into_iter()
            .find(|(i, _)| *i == b)
            .map(|(_, d)| d)
            .unwrap_or(f64::INFINITY)
    }

    /// Writes the node table (`node,r_or_id,volume_weight,dist_from_p`).
    pub fn write_nodes_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["node", "r_or_id", "volume_weight", "dist_from_p"])?;
        for i in 0..self.node_count() {
            w.write_record(&[
                i.to_string(),
                self.labels[i].to_string(),
                self.volume_weights[i].to_string(),
                self.node_distances[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the edge table (`i,j,conductance,length`).
    pub fn write_edges_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["i", "j", "conductance", "length"])?;
        for e in &self.edges {
            w.write_record(&[
                e.i.to_string(),
                e.j.to_string(),
                e.conductance.to_string(),
                e.length.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn field(&self, f: impl Fn(usize) -> f64) -> NodeField {
        NodeField::from_fn(self.node_count(), f)
    }

    pub(crate) fn check_field(&self, u: &[f64], what: &str) -> Result<()> {
        if u.len() != self.node_count() {
            return Err(Error::InvalidArgument(format!(
                "{what} has {} entries, manifold has {} nodes",
                u.len(),
                self.node_count()
            )));
        }
        Ok(())
    }
}
