use serde::{Deserialize, Serialize};

use super::{DiscreteManifold, Edge};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    Ball { center: usize, radius: f64 },
    /// Complement of the ball of this radius about the base point.
    Exterior { radius: f64 },
    /// `ball(p, outer) \ ball(p, inner)`.
    Annulus { inner: f64, outer: f64 },
    Whole,
}

/// A node set; everything outside it is held at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    nodes: Vec<usize>,
    mask: Vec<bool>,
    kind: RegionKind,
}

impl Region {
    pub fn new(m: &DiscreteManifold, kind: RegionKind) -> Result<Self> {
        let n = m.node_count();
        let nodes = match kind {
            RegionKind::Whole => (0..n).collect(),
            RegionKind::Ball { center, radius } => {
                if center >= n {
                    return Err(Error::InvalidArgument(format!("ball centre {center} out of range")));
                }
                m.check_radius(radius)?;
                m.ball_nodes(center, radius)
            }
            RegionKind::Exterior { radius } => {
                m.check_radius(radius)?;
                let inner = Self::mask_of(n, &m.ball_nodes(m.base_point(), radius));
                (0..n).filter(|&i| !inner[i]).collect()
            }
            RegionKind::Annulus { inner, outer } => {
                m.check_radius(inner)?;
                m.check_radius(outer)?;
                let hole = Self::mask_of(n, &m.ball_nodes(m.base_point(), inner));
                m.ball_nodes(m.base_point(), outer).into_iter().filter(|&i| !hole[i]).collect()
            }
        };
        Self::from_nodes(m, nodes, kind)
    }

    /// Region from an explicit node list (duplicates are dropped).
    pub fn from_nodes(m: &DiscreteManifold, mut nodes: Vec<usize>, kind: RegionKind) -> Result<Self> {
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.is_empty() {
            return Err(Error::EmptyRegion(format!("{kind:?}")));
        }
        if let Some(&bad) = nodes.iter().find(|&&i| i >= m.node_count()) {
            return Err(Error::InvalidArgument(format!("region node {bad} out of range")));
        }
        let mask = Self::mask_of(m.node_count(), &nodes);
        Ok(Region { nodes, mask, kind })
    }

    pub fn whole(m: &DiscreteManifold) -> Self {
        Self::new(m, RegionKind::Whole).expect("manifolds are never empty")
    }

    pub fn ball(m: &DiscreteManifold, center: usize, radius: f64) -> Result<Self> {
        Self::new(m, RegionKind::Ball { center, radius })
    }

    pub fn exterior(m: &DiscreteManifold, radius: f64) -> Result<Self> {
        Self::new(m, RegionKind::Exterior { radius })
    }

    pub fn annulus(m: &DiscreteManifold, inner: f64, outer: f64) -> Result<Self> {
        Self::new(m, RegionKind::Annulus { inner, outer })
    }

    fn mask_of(n: usize, nodes: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &i in nodes {
            mask[i] = true;
        }
        mask
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask.get(i).copied().unwrap_or(false)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.nodes.iter().all(|&i| other.contains(i))
    }

    /// Edges with exactly one endpoint inside; these carry the Dirichlet cut.
    pub fn cut_edges<'a>(&'a self, m: &'a DiscreteManifold) -> impl Iterator<Item = &'a Edge> + 'a {
        m.edges().iter().filter(move |e| self.contains(e.i) != self.contains(e.j))
    }

    /// Number of connected components of the induced subgraph.
    pub fn components(&self, m: &DiscreteManifold) -> usize {
        let mut seen = vec![false; m.node_count()];
        let mut count = 0;
        let mut stack = Vec::new();
        for &start in &self.nodes {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for &(j, _) in m.neighbors(i) {
                    if self.contains(j) && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        count
    }

    pub fn require_connected(&self, m: &DiscreteManifold) -> Result<()> {
        match self.components(m) {
            1 => Ok(()),
            components => Err(Error::DisconnectedRegion { components }),
        }
    }
}
