//! Quadratic forms on a [`DiscreteManifold`].
//!
//! The stiffness `L` has quadratic form `u·Lu = Σ_edges c_ij (u_i - u_j)² +
//! Σ_i b_i u_i²` (the second sum is the Dirichlet ghost coupling), the mass is
//! the diagonal of volume weights, and `Δ = -M⁻¹ L`. Restricting to a
//! [`Region`] holds every outside node at zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DiscreteManifold, NodeField, Region};
use crate::linalg::{conjugate_gradient, thomas_solve, Csr};

/// Default relative tolerance of the potential solve (mass-weighted).
pub const SOLVE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct OperatorPair<'a> {
    manifold: &'a DiscreteManifold,
    potential: NodeField,
}

impl<'a> OperatorPair<'a> {
    pub fn new(manifold: &'a DiscreteManifold, potential: NodeField) -> Result<Self> {
        manifold.check_field(&potential, "potential")?;
        if !potential.is_finite() {
            return Err(Error::InvalidArgument("potential has non-finite entries".into()));
        }
        Ok(OperatorPair { manifold, potential })
    }

    /// `V ≡ 0`.
    pub fn free(manifold: &'a DiscreteManifold) -> Self {
        OperatorPair { manifold, potential: NodeField::zeros(manifold.node_count()) }
    }

    pub fn manifold(&self) -> &'a DiscreteManifold {
        self.manifold
    }

    pub fn potential(&self) -> &NodeField {
        &self.potential
    }

    pub fn mass(&self) -> &[f64] {
        self.manifold.volume_weights()
    }

    /// Same manifold, potential shifted by a constant.
    pub fn shifted(&self, c: f64) -> Self {
        OperatorPair { manifold: self.manifold, potential: self.potential.iter().map(|v| v + c).collect::<Vec<_>>().into() }
    }

    pub fn with_potential(&self, potential: NodeField) -> Result<Self> {
        OperatorPair::new(self.manifold, potential)
    }

    /// `L u` (not divided by the mass).
    pub fn stiffness_apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.manifold;
        let mut out: Vec<f64> = m.boundary_conductance().iter().zip(u).map(|(b, x)| b * x).collect();
        for e in m.edges() {
            let flux = e.conductance * (u[e.i] - u[e.j]);
            out[e.i] += flux;
            out[e.j] -= flux;
        }
        out
    }

    /// `u·Lu`.
    pub fn dirichlet_energy(&self, u: &[f64]) -> f64 {
        let m = self.manifold;
        let edges: f64 = m.edges().iter().map(|e| e.conductance * (u[e.i] - u[e.j]).powi(2)).sum();
        let ghosts: f64 = m.boundary_conductance().iter().zip(u).map(|(b, x)| b * x * x).sum();
        edges + ghosts
    }

    /// `(Δu)_i = -(1/m_i) Σ_j c_ij (u_i - u_j)`.
    pub fn laplacian_apply(&self, u: &NodeField) -> NodeField {
        self.stiffness_apply(u)
            .into_iter()
            .zip(self.mass())
            .map(|(lu, m)| -lu / m)
            .collect::<Vec<_>>()
            .into()
    }

    /// `I₀(u) = 4 u·Lu + Σ m_i V_i u_i²`.
    pub fn i0_energy(&self, u: &[f64]) -> f64 {
        4.0 * self.dirichlet_energy(u) + self.potential_energy(u)
    }

    pub fn potential_energy(&self, u: &[f64]) -> f64 {
        self.mass().iter().zip(self.potential.iter()).zip(u).map(|((m, v), x)| m * v * x * x).sum()
    }

    pub fn mass_norm_sq(&self, u: &[f64]) -> f64 {
        mass_norm_sq(self.mass(), u)
    }

    /// Node-wise `|∇f|²`: each edge's energy is split evenly between its
    /// endpoints, ghost couplings belong wholly to their node.
    pub fn gradient_square(&self, f: &[f64]) -> NodeField {
        let m = self.manifold;
        let mut g: Vec<f64> = m.boundary_conductance().iter().zip(f).map(|(b, x)| b * x * x).collect();
        for e in m.edges() {
            let half = 0.5 * e.conductance * (f[e.i] - f[e.j]).powi(2);
            g[e.i] += half;
            g[e.j] += half;
        }
        g.iter_mut().zip(self.mass()).for_each(|(gi, mi)| *gi /= mi);
        g.into()
    }

    /// `V^m = 2Δf - |∇f|² + V`.
    pub fn modified_scalar_curvature(&self, f: &NodeField) -> NodeField {
        let lap = self.laplacian_apply(f);
        let grad = self.gradient_square(f);
        (0..f.len())
            .map(|i| 2.0 * lap[i] - grad[i] + self.potential[i])
            .collect::<Vec<_>>()
            .into()
    }

    /// Both forms of the F-functional for the measure `e^{-f} dv`.
    pub fn f_functional(&self, f: &NodeField) -> Result<FFunctional> {
        self.manifold.check_field(f, "f")?;
        let density: Vec<f64> = f.iter().map(|x| (-x).exp()).collect();
        if let Some((node, _)) = density.iter().enumerate().find(|(_, d)| !d.is_finite()) {
            return Err(Error::Overflow { node, value: f[node] });
        }
        let vm = self.modified_scalar_curvature(f);
        let grad = self.gradient_square(f);
        let mut modified = 0.0;
        let mut original = 0.0;
        for i in 0..f.len() {
            let w = self.mass()[i] * density[i];
            modified += w * vm[i];
            original += w * (self.potential[i] + grad[i]);
        }
        Ok(FFunctional { modified, original, gap: modified - original })
    }

    /// The stiffness, mass and potential restricted to `region` with zero
    /// Dirichlet data outside.
    pub fn restrict(&self, region: &Region) -> RestrictedSystem {
        let m = self.manifold;
        let n = m.node_count();
        let mut local = vec![usize::MAX; n];
        for (k, &i) in region.nodes().iter().enumerate() {
            local[i] = k;
        }
        let size = region.len();
        let mut trip = Vec::with_capacity(size + 2 * m.edges().len());
        let mut coupled = false;
        for (k, &i) in region.nodes().iter().enumerate() {
            let b = m.boundary_conductance()[i];
            if b > 0.0 {
                coupled = true;
            }
            trip.push((k, k, b));
        }
        for e in m.edges() {
            match (region.contains(e.i), region.contains(e.j)) {
                (true, true) => {
                    let (a, b) = (local[e.i], local[e.j]);
                    trip.push((a, a, e.conductance));
                    trip.push((b, b, e.conductance));
                    trip.push((a, b, -e.conductance));
                    trip.push((b, a, -e.conductance));
                }
                (true, false) => {
                    coupled = true;
                    trip.push((local[e.i], local[e.i], e.conductance));
                }
                (false, true) => {
                    coupled = true;
                    trip.push((local[e.j], local[e.j], e.conductance));
                }
                (false, false) => {}
            }
        }
        RestrictedSystem {
            nodes: region.nodes().to_vec(),
            global_len: n,
            mass: region.nodes().iter().map(|&i| m.volume_weights()[i]).collect(),
            potential: region.nodes().iter().map(|&i| self.potential[i]).collect(),
            stiffness: Csr::from_triplets(size, trip),
            dirichlet_coupled: coupled,
        }
    }

    /// Solves `-Δu = f` on `region` with `u = 0` outside; the truncated
    /// stand-in for `u = ∫ G(x, y) f(y) dv`.
    pub fn potential_function(&self, f: &NodeField, region: &Region) -> Result<PotentialSolution> {
        self.potential_function_with(f, region, SOLVE_TOLERANCE)
    }

    pub fn potential_function_with(&self, f: &NodeField, region: &Region, tol: f64) -> Result<PotentialSolution> {
        self.manifold.check_field(f, "f")?;
        if !f.is_finite() {
            return Err(Error::InvalidArgument("f has non-finite entries".into()));
        }
        let sys = self.restrict(region);
        let fl = sys.gather(f);
        let rhs: Vec<f64> = fl.iter().zip(&sys.mass).map(|(f, m)| f * m).collect();
        let total: f64 = rhs.iter().sum();
        let scale: f64 = rhs.iter().map(|x| x.abs()).sum();
        if !sys.dirichlet_coupled && total.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Singular(format!(
                "no Dirichlet boundary reaches the region, so -Δu = f needs Σ m_i f_i = 0 (got {total:e})"
            )));
        }
        let direct = if sys.dirichlet_coupled {
            sys.stiffness.tridiagonal().and_then(|(d, o)| thomas_solve(&d, &o, &rhs))
        } else {
            None
        };
        let mut ul = match direct {
            Some(u) => u,
            None => {
                let mut x = vec![0.0; sys.len()];
                let diag = sys.stiffness.diagonal();
                conjugate_gradient(|v, out| sys.stiffness.matvec(v, out), &diag, &rhs, &mut x, 1e-3 * tol, 50 * sys.len() + 100);
                x
            }
        };
        if !sys.dirichlet_coupled {
            let mean = mass_dot(&sys.mass, &ul, &vec![1.0; ul.len()]) / sys.mass.iter().sum::<f64>();
            ul.iter_mut().for_each(|x| *x -= mean);
        }
        let residual = sys.laplace_residual(&ul, &fl);
        let fnorm = mass_norm_sq(&sys.mass, &fl).sqrt();
        if residual > tol * fnorm.max(f64::MIN_POSITIVE) && fnorm > 0.0 {
            return Err(Error::NoConvergence { solver: "potential solve", iterations: 0, residual });
        }
        let u = sys.expand(&ul);
        let gradient_sup = edge_gradient_sup(self.manifold, &u);
        Ok(PotentialSolution { u, residual, gradient_sup })
    }
}

/// `V := -Δ u_profile`, so that `V` is a divergence by construction.
///
/// Dirichlet ghosts take the profile's own value, so no flux leaves through
/// the truncation; see [`divergence_form_potential_with_ghost`] to prescribe
/// the exterior values instead.
pub fn divergence_form_potential(m: &DiscreteManifold, profile: &NodeField) -> Result<DivergenceForm> {
    divergence_form_potential_with_ghost(m, profile, profile)
}

/// As [`divergence_form_potential`], with the profile taking value `ghost[i]`
/// across node `i`'s Dirichlet coupling.
pub fn divergence_form_potential_with_ghost(m: &DiscreteManifold, profile: &NodeField, ghost: &[f64]) -> Result<DivergenceForm> {
    m.check_field(profile, "profile")?;
    m.check_field(ghost, "ghost")?;
    if !profile.is_finite() || ghost.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidArgument("profile has non-finite entries".into()));
    }
    let ops = OperatorPair::free(m);
    let mut potential = ops.laplacian_apply(profile).scaled(-1.0);
    for (i, b) in m.boundary_conductance().iter().enumerate() {
        potential[i] -= b * ghost[i] / m.volume_weights()[i];
    }
    Ok(DivergenceForm { potential, gradient_sup: edge_gradient_sup(m, profile) })
}

/// `max_edges |u_i - u_j| / ℓ_ij`.
pub fn edge_gradient_sup(m: &DiscreteManifold, u: &[f64]) -> f64 {
    m.edges().iter().map(|e| (u[e.i] - u[e.j]).abs() / e.length).fold(0.0, f64::max)
}

pub fn mass_norm_sq(mass: &[f64], u: &[f64]) -> f64 {
    mass.iter().zip(u).map(|(m, x)| m * x * x).sum()
}

pub fn mass_dot(mass: &[f64], u: &[f64], v: &[f64]) -> f64 {
    mass.iter().zip(u).zip(v).map(|((m, a), b)| m * a * b).sum()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FFunctional {
    /// `Σ m_i e^{-f_i} V^m_i`
    pub modified: f64,
    /// `Σ m_i e^{-f_i} (V_i + |∇f|²_i)`
    pub original: f64,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct PotentialSolution {
    pub u: NodeField,
    /// Mass-weighted norm of `-Δu - f` over the region.
    pub residual: f64,
    pub gradient_sup: f64,
}

#[derive(Clone, Debug)]
pub struct DivergenceForm {
    pub potential: NodeField,
    pub gradient_sup: f64,
}

/// Local (region-indexed) view of the operators.
#[derive(Clone, Debug)]
pub struct RestrictedSystem {
    pub nodes: Vec<usize>,
    pub global_len: usize,
    pub mass: Vec<f64>,
    pub potential: Vec<f64>,
    pub stiffness: Csr,
    /// Whether any Dirichlet coupling (cut edge or ghost) reaches the region.
    pub dirichlet_coupled: bool,
}

impl RestrictedSystem {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn gather(&self, field: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|&i| field[i]).collect()
    }

    pub fn expand(&self, local: &[f64]) -> NodeField {
        let mut out = vec![0.0; self.global_len];
        for (&i, &v) in self.nodes.iter().zip(local) {
            out[i] = v;
        }
        out.into()
    }

    /// `‖-Δu - f‖` in the mass-weighted norm.
    pub fn laplace_residual(&self, u: &[f64], f: &[f64]) -> f64 {
        let lu = self.stiffness.apply(u);
        lu.iter()
            .zip(&self.mass)
            .zip(f)
            .map(|((l, m), f)| m * (l / m - f).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `A = 4L + M V` applied to `u`.
    pub fn schrodinger_apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = self.stiffness.apply(u);
        for k in 0..u.len() {
            out[k] = 4.0 * out[k] + self.mass[k] * self.potential[k] * u[k];
        }
        out
    }

    pub fn inf_potential(&self) -> f64 {
        self.potential.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}
