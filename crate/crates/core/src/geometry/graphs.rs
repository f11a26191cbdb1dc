//! Small catalogue of closed and bounded graph manifolds.

use super::{DiscreteManifold, Edge, Layout};
use crate::error::{Error, Result};

/// General weighted graph from `(i, j, conductance, length)` tuples.
pub fn from_edges(weights: Vec<f64>, edges: &[(usize, usize, f64, f64)], base_point: usize) -> Result<DiscreteManifold> {
    let edges = edges
        .iter()
        .map(|&(i, j, conductance, length)| Edge { i, j, conductance, length })
        .collect();
    DiscreteManifold::new(weights, edges, None, 1, base_point, None, None, Layout::Graph)
}

pub fn single_node(weight: f64) -> Result<DiscreteManifold> {
    DiscreteManifold::new(vec![weight], vec![], None, 1, 0, None, None, Layout::Graph)
}

pub fn two_node(conductance: f64, weights: (f64, f64)) -> Result<DiscreteManifold> {
    from_edges(vec![weights.0, weights.1], &[(0, 1, conductance, 1.0)], 0)
}

/// Closed circle of `n` equally spaced nodes and total length `length`.
pub fn circle(n: usize, length: f64) -> Result<DiscreteManifold> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("circle needs >= 3 nodes, got {n}")));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidArgument("circle length must be positive".into()));
    }
    let h = length / n as f64;
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0 / h, h)).collect();
    from_edges(vec![h; n], &edges, 0)
}

/// Closed flat 2-torus: an `nx × ny` periodic grid of spacing `h`.
pub fn torus(nx: usize, ny: usize, h: f64) -> Result<DiscreteManifold> {
    if nx < 3 || ny < 3 {
        return Err(Error::InvalidArgument("torus needs >= 3 nodes per side".into()));
    }
    lattice(nx, ny, h, true, false)
}

/// Flat square grid of spacing `h`, centred base point. With `dirichlet` every
/// missing neighbour becomes a zero ghost one spacing away.
pub fn grid(nx: usize, ny: usize, h: f64, dirichlet: bool) -> Result<DiscreteManifold> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument("grid needs >= 2 nodes per side".into()));
    }
    lattice(nx, ny, h, false, dirichlet)
}

fn lattice(nx: usize, ny: usize, h: f64, periodic: bool, dirichlet: bool) -> Result<DiscreteManifold> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidArgument("grid spacing must be positive".into()));
    }
    let id = |x: usize, y: usize| y * nx + x;
    let mut edges = Vec::new();
    let mut boundary = vec![0.0; nx * ny];
    for y in 0..ny {
        for x in 0..nx {
            // conductance = face length / spacing = 1 in two dimensions
            if x + 1 < nx {
                edges.push(Edge { i: id(x, y), j: id(x + 1, y), conductance: 1.0, length: h });
            } else if periodic {
                edges.push(Edge { i: id(x, y), j: id(0, y), conductance: 1.0, length: h });
            }
            if y + 1 < ny {
                edges.push(Edge { i: id(x, y), j: id(x, y + 1), conductance: 1.0, length: h });
            } else if periodic {
                edges.push(Edge { i: id(x, y), j: id(x, 0), conductance: 1.0, length: h });
            }
            if dirichlet {
                let missing = [x == 0, x + 1 == nx, y == 0, y + 1 == ny].iter().filter(|&&b| b).count();
                boundary[id(x, y)] = missing as f64;
            }
        }
    }
    let labels = (0..nx * ny).map(|i| i as f64).collect();
    DiscreteManifold::new(
        vec![h * h; nx * ny],
        edges,
        Some(boundary),
        2,
        id(nx / 2, ny / 2),
        None,
        Some(labels),
        Layout::Graph,
    )
}

/// Interval `[0, length]` cut into `cells` cells; the interior vertices are
/// nodes and both endpoints are Dirichlet ghosts.
pub fn segment(cells: usize, length: f64) -> Result<DiscreteManifold> {
    if cells < 2 {
        return Err(Error::InvalidArgument("segment needs >= 2 cells".into()));
    }
    let h = length / cells as f64;
    let n = cells - 1;
    let edges = (0..n.saturating_sub(1))
        .map(|i| Edge { i, j: i + 1, conductance: 1.0 / h, length: h })
        .collect();
    let mut boundary = vec![0.0; n];
    boundary[0] += 1.0 / h;
    boundary[n - 1] += 1.0 / h;
    let labels = (1..=n).map(|i| i as f64 * h).collect();
    DiscreteManifold::new(vec![h; n], edges, Some(boundary), 1, 0, None, Some(labels), Layout::Graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_is_closed_and_regular() {
        let m = torus(4, 5, 1.0).unwrap();
        assert_eq!(m.node_count(), 20);
        assert_eq!(m.edges().len(), 40);
        assert!(m.is_closed());
        assert!((0..20).all(|i| m.neighbors(i).len() == 4));
    }

    #[test]
    fn dirichlet_grid_has_ghosts_on_the_rim() {
        let m = grid(3, 3, 1.0, true).unwrap();
        assert!(!m.is_closed());
        assert_eq!(m.boundary_conductance()[0], 2.0);
        assert_eq!(m.boundary_conductance()[1], 1.0);
        assert_eq!(m.boundary_conductance()[4], 0.0);
        assert_eq!(m.base_point(), 4);
    }

    #[test]
    fn segment_layout() {
        let m = segment(4, 1.0).unwrap();
        assert_eq!(m.node_count(), 3);
        assert_eq!(m.labels(), &[0.25, 0.5, 0.75]);
        assert_eq!(m.boundary_conductance(), &[4.0, 0.0, 4.0]);
    }
}
