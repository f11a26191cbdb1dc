//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use varlab::geometry::{Edge, Layout};
use varlab::{DiscreteManifold, NodeField};

/// A random connected graph: a random spanning tree plus extra edges, with
/// random weights, conductances, lengths and (optionally) ghost couplings.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, with_boundary: bool) -> DiscreteManifold {
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    let mut add = |i: usize, j: usize, rng: &mut ChaCha8Rng, edges: &mut Vec<Edge>| {
        let key = (i.min(j), i.max(j));
        if i != j && present.insert(key) {
            edges.push(Edge { i, j, conductance: rng.gen_range(0.2..3.0), length: rng.gen_range(0.5..2.0) });
        }
    };
    for k in 1..n {
        let parent = rng.gen_range(0..k);
        add(k, parent, rng, &mut edges);
    }
    for _ in 0..n / 2 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        add(i, j, rng, &mut edges);
    }
    let boundary = with_boundary.then(|| (0..n).map(|_| if rng.gen_bool(0.3) { rng.gen_range(0.1..2.0) } else { 0.0 }).collect());
    DiscreteManifold::new(weights, edges, boundary, 2, 0, None, None, Layout::Graph).expect("random graph is valid")
}

pub fn random_potential(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> NodeField {
    NodeField::from_fn(n, |_| rng.gen_range(lo..hi))
}

pub fn positive_field(rng: &mut ChaCha8Rng, n: usize) -> NodeField {
    NodeField::from_fn(n, |_| rng.gen_range(0.1..1.5))
}

/// Dense `M^{-1/2}(4L + MV)M^{-1/2}` assembled from the edge list.
pub fn dense_pencil(m: &DiscreteManifold, v: &[f64]) -> DMatrix<f64> {
    let n = m.node_count();
    let w = m.volume_weights();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for e in m.edges() {
        l[(e.i, e.i)] += e.conductance;
        l[(e.j, e.j)] += e.conductance;
        l[(e.i, e.j)] -= e.conductance;
        l[(e.j, e.i)] -= e.conductance;
    }
    for (i, b) in m.boundary_conductance().iter().enumerate() {
        l[(i, i)] += b;
    }
    DMatrix::from_fn(n, n, |i, j| {
        let base = 4.0 * l[(i, j)] / (w[i] * w[j]).sqrt();
        if i == j { base + v[i] } else { base }
    })
}

/// Smallest eigenvalue of the dense pencil.
pub fn dense_lambda(m: &DiscreteManifold, v: &[f64]) -> f64 {
    SymmetricEigen::new(dense_pencil(m, v)).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Mass-weighted overlap `|⟨u, w⟩| / (‖u‖ ‖w‖)`.
pub fn overlap(m: &DiscreteManifold, u: &[f64], w: &[f64]) -> f64 {
    let mass = m.volume_weights();
    let dot: f64 = (0..u.len()).map(|i| mass[i] * u[i] * w[i]).sum();
    let nu: f64 = (0..u.len()).map(|i| mass[i] * u[i] * u[i]).sum();
    let nw: f64 = (0..u.len()).map(|i| mass[i] * w[i] * w[i]).sum();
    dot.abs() / (nu * nw).sqrt()
}
