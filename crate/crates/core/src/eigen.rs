//! The linear problem: `λ_V` as the bottom of the spectrum of `-4Δ + V`,
//! domain exhaustion, and λ at infinity in both of its forms.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{mass_norm_sq, OperatorPair, RestrictedSystem};
use crate::geometry::{NodeField, Region, RegionKind};
use crate::linalg::{conjugate_gradient, shift_invert_lanczos, tridiagonal_ground_state, Csr};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenConfig {
    /// Bound on the mass-weighted residual, relative to `max(1, |λ|)`.
    pub tolerance: f64,
    pub basis_size: usize,
    pub max_restarts: usize,
    /// Separation margin δ for `λ < λ∞` comparisons.
    pub margin: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig { tolerance: 1e-9, basis_size: 40, max_restarts: 200, margin: 1e-4 }
    }
}

/// Entries of the normalised ground state below this are set to zero.
const CLAMP: f64 = 1e-14;

#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub lambda: f64,
    #[serde(skip)]
    pub eigenfunction: NodeField,
    pub residual: f64,
    pub iterations: usize,
    pub region: RegionKind,
    pub region_nodes: usize,
    /// Smallest eigenfunction entry on the region after clamping.
    pub min_entry: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub radius: f64,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
    pub nodes: usize,
}

impl TracePoint {
    pub fn from_result(radius: f64, r: &SpectralResult) -> Self {
        TracePoint { radius, lambda: r.lambda, residual: r.residual, iterations: r.iterations, nodes: r.region_nodes }
    }
}

/// A λ sequence over radii; the reported value is the last entry.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralTrace {
    pub points: Vec<TracePoint>,
}

impl SpectralTrace {
    pub fn last(&self) -> f64 {
        self.points.last().map(|p| p.lambda).unwrap_or(f64::NAN)
    }

    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.points.windows(2).all(|w| w[1].lambda <= w[0].lambda + slack)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["R_or_r", "lambda", "residual", "iterations"])?;
        for p in &self.points {
            w.write_record(&[p.radius.to_string(), p.lambda.to_string(), p.residual.to_string(), p.iterations.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `C = M^{-1/2} (4L + MV) M^{-1/2}` on the region.
fn symmetric_pencil(sys: &RestrictedSystem) -> Csr {
    let sq: Vec<f64> = sys.mass.iter().map(|m| m.sqrt()).collect();
    let mut trip = Vec::new();
    for i in 0..sys.len() {
        for (j, v) in sys.stiffness.row(i) {
            trip.push((i, j, 4.0 * v / (sq[i] * sq[j])));
        }
        trip.push((i, i, sys.potential[i]));
    }
    Csr::from_triplets(sys.len(), trip)
}

/// Smallest eigenvalue of `(4L + MV) u = λ M u` with `u = 0` off the region.
pub fn lambda_constant(ops: &OperatorPair, region: &Region, cfg: &EigenConfig) -> Result<SpectralResult> {
    region.require_connected(ops.manifold())?;
    let sys = ops.restrict(region);
    let c = symmetric_pencil(&sys);
    let n = sys.len();

    let (lambda, y, iterations) = match c.tridiagonal() {
        Some((d, o)) => {
            let (lambda, y) = tridiagonal_ground_state(&d, &o);
            (lambda, y, 1)
        }
        None => {
            let shift = sys.inf_potential() - 1.0;
            let diag: Vec<f64> = c.diagonal().iter().map(|d| d - shift).collect();
            let solve = |b: &[f64]| -> Result<Vec<f64>> {
                let mut x = vec![0.0; n];
                let out = conjugate_gradient(
                    |v, o| {
                        c.matvec(v, o);
                        o.iter_mut().zip(v).for_each(|(oi, vi)| *oi -= shift * vi);
                    },
                    &diag,
                    b,
                    &mut x,
                    1e-14,
                    20 * n + 200,
                );
                if out.relative_residual > 1e-10 {
                    return Err(Error::NoConvergence {
                        solver: "shift-invert inner solve",
                        iterations: out.iterations,
                        residual: out.relative_residual,
                    });
                }
                Ok(x)
            };
            let start: Vec<f64> = sys.mass.iter().map(|m| m.sqrt()).collect();
            let target = cfg.tolerance * (1.0 + shift.abs());
            let out = shift_invert_lanczos(|v| c.apply(v), solve, &start, target, cfg.basis_size, cfg.max_restarts)?;
            (out.value, out.vector, out.iterations)
        }
    };

    let mut u: Vec<f64> = y.iter().zip(&sys.mass).map(|(y, m)| y / m.sqrt()).collect();
    let norm = mass_norm_sq(&sys.mass, &u).sqrt();
    let sum: f64 = u.iter().zip(&sys.mass).map(|(u, m)| u * m).sum();
    let sign = if sum < 0.0 { -1.0 } else { 1.0 };
    for x in u.iter_mut() {
        *x *= sign / norm;
        if x.abs() < CLAMP {
            *x = 0.0;
        }
    }
    let residual = linear_residual(&sys, &u, lambda);
    if residual > cfg.tolerance * lambda.abs().max(1.0) {
        return Err(Error::NoConvergence { solver: "ground state", iterations, residual });
    }
    let min_entry = u.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(SpectralResult {
        lambda,
        eigenfunction: sys.expand(&u),
        residual,
        iterations,
        region: region.kind(),
        region_nodes: n,
        min_entry,
    })
}

fn linear_residual(sys: &RestrictedSystem, u: &[f64], lambda: f64) -> f64 {
    let au = sys.schrodinger_apply(u);
    au.iter()
        .zip(&sys.mass)
        .zip(u)
        .map(|((a, m), u)| m * (a / m - lambda * u).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Mass-weighted norm of `-4Δu + Vu - λu` over the region.
pub fn el_residual_linear(ops: &OperatorPair, u: &NodeField, lambda: f64, region: &Region) -> Result<f64> {
    ops.manifold().check_field(u, "u")?;
    let sys = ops.restrict(region);
    Ok(linear_residual(&sys, &sys.gather(u), lambda))
}

fn check_increasing(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("no radii given".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Dirichlet ground states on `B_R(p)` for each radius, plus the whole
/// truncation when the last ball does not already cover it.
pub fn exhaustion_ground_states(
    ops: &OperatorPair,
    radii: &[f64],
    cfg: &EigenConfig,
) -> Result<Vec<(f64, SpectralResult)>> {
    check_increasing(radii)?;
    let m = ops.manifold();
    let mut out = Vec::with_capacity(radii.len() + 1);
    for &r in radii {
        let region = Region::ball(m, m.base_point(), r)?;
        out.push((r, lambda_constant(ops, &region, cfg)?));
    }
    if out.last().map(|(_, s)| s.region_nodes) != Some(m.node_count()) {
        out.push((m.truncation_radius(), lambda_constant(ops, &Region::whole(m), cfg)?));
    }
    Ok(out)
}

pub fn exhaustion_lambda(ops: &OperatorPair, radii: &[f64], cfg: &EigenConfig) -> Result<SpectralTrace> {
    let states = exhaustion_ground_states(ops, radii, cfg)?;
    Ok(SpectralTrace { points: states.iter().map(|(r, s)| TracePoint::from_result(*r, s)).collect() })
}

/// Smallest exterior region accepted by [`lambda_infinity_exterior`].
pub const MIN_EXTERIOR_NODES: usize = 8;

/// λ on `M - B_r(p)` with Dirichlet data on the ball and at truncation.
pub fn lambda_infinity_exterior(ops: &OperatorPair, radii: &[f64], cfg: &EigenConfig) -> Result<SpectralTrace> {
    check_increasing(radii)?;
    let m = ops.manifold();
    let mut points = Vec::with_capacity(radii.len());
    for &r in radii {
        let region = Region::exterior(m, r)?;
        if region.len() < MIN_EXTERIOR_NODES {
            return Err(Error::InvalidArgument(format!(
                "exterior of radius {r} has {} nodes, need >= {MIN_EXTERIOR_NODES}",
                region.len()
            )));
        }
        points.push(TracePoint::from_result(r, &lambda_constant(ops, &region, cfg)?));
    }
    Ok(SpectralTrace { points })
}

/// λ of `-4Δ + V∞` on the whole truncation.
pub fn lambda_infinity_const(ops: &OperatorPair, v_infinity: f64, cfg: &EigenConfig) -> Result<SpectralResult> {
    if !v_infinity.is_finite() {
        return Err(Error::InvalidArgument("v_infinity must be finite".into()));
    }
    let m = ops.manifold();
    let flat = ops.with_potential(NodeField::constant(m.node_count(), v_infinity))?;
    lambda_constant(&flat, &Region::whole(m), cfg)
}
