//! The log-entropy problems: `W`, the μ-constant, the Nehari functionals `N`
//! and `I`, the d-constant, and their at-infinity traces.
//!
//! Both minimisations run on the mass-weighted unit sphere. For μ the
//! objective is `W(u)`; for d it is `N(v)` on the sphere, which is half of the
//! scale-invariant `J(v) = log‖v‖² + 2N(v)/‖v‖²`, so that
//! `d = ½ exp(2 min N)` and the Nehari minimiser is `e^{N(v)} v`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eigen::{lambda_constant, EigenConfig};
use crate::error::{Error, Result};
use crate::forms::{mass_norm_sq, OperatorPair, RestrictedSystem};
use crate::geometry::{NodeField, Region, RegionKind};
use crate::linalg::{conjugate_gradient, dot, thomas_solve};

/// Entries below this are zero for the purpose of `u log u`.
const LOG_FLOOR: f64 = 1e-300;

/// `x log x²`, zero at zero.
fn xlogx2(x: f64) -> f64 {
    if x.abs() < LOG_FLOOR {
        0.0
    } else {
        x * (x * x).ln()
    }
}

/// `x² log x²`, zero at zero.
fn x2logx2(x: f64) -> f64 {
    x * xlogx2(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropyConfig {
    /// Euler–Lagrange residual a minimiser must reach.
    pub tolerance: f64,
    /// The descent keeps going until the residual is below this.
    pub target: f64,
    pub max_iterations: usize,
    /// Objective value below which the instance is reported as unbounded.
    pub objective_floor: f64,
    pub eigen: EigenConfig,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            tolerance: 1e-6,
            target: 1e-9,
            max_iterations: 4000,
            objective_floor: -1e8,
            eigen: EigenConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DescentStep {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StartRecord {
    pub label: String,
    pub initial: f64,
    pub last: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyResult {
    /// μ, or d.
    pub value: f64,
    #[serde(skip)]
    pub minimizer: NodeField,
    pub el_residual: f64,
    pub descent_trace: Vec<DescentStep>,
    pub restarts_used: usize,
    /// For d: largest `|J(a v) - J(v)|` over a few fixed scalings `a`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale_defect: Option<f64>,
    pub best_start: String,
    pub starts: Vec<StartRecord>,
    pub region: RegionKind,
}

impl EntropyResult {
    pub fn write_trace_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["iteration", "objective", "grad_norm", "step"])?;
        for s in &self.descent_trace {
            w.write_record(&[s.iteration.to_string(), s.objective.to_string(), s.grad_norm.to_string(), s.step.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `W(u) = 4 u·Lu + Σ m_i (V_i u_i² - u_i² log u_i²)`.
pub fn w_functional(ops: &OperatorPair, u: &[f64]) -> f64 {
    ops.i0_energy(u) - ops.mass().iter().zip(u).map(|(m, x)| m * x2logx2(*x)).sum::<f64>()
}

/// `N(u) = 4 u·Lu + Σ m_i (V_i u_i² - ½ u_i² log u_i²)`.
pub fn n_functional(ops: &OperatorPair, u: &[f64]) -> f64 {
    ops.i0_energy(u) - 0.5 * ops.mass().iter().zip(u).map(|(m, x)| m * x2logx2(*x)).sum::<f64>()
}

/// `I(u) = N(u) + ½ Σ m_i u_i²`.
pub fn i_functional(ops: &OperatorPair, u: &[f64]) -> f64 {
    n_functional(ops, u) + 0.5 * ops.mass_norm_sq(u)
}

/// `J(v) = log ‖v‖² + 2 N(v) / ‖v‖²`, invariant under `v ↦ a v`.
pub fn j_functional(ops: &OperatorPair, v: &[f64]) -> f64 {
    let s = ops.mass_norm_sq(v);
    s.ln() + 2.0 * n_functional(ops, v) / s
}

/// Euclidean gradient of `u ↦ 4u·Lu + Σ m V u² - β Σ m u² log u²`.
fn entropy_gradient(ops: &OperatorPair, u: &[f64], beta: f64) -> Vec<f64> {
    let lu = ops.stiffness_apply(u);
    (0..u.len())
        .map(|i| {
            let m = ops.mass()[i];
            8.0 * lu[i] + 2.0 * m * ops.potential()[i] * u[i] - beta * m * 2.0 * (xlogx2(u[i]) + u[i])
        })
        .collect()
}

/// Gradient of [`w_functional`] with respect to the node values.
pub fn w_gradient(ops: &OperatorPair, u: &[f64]) -> Vec<f64> {
    entropy_gradient(ops, u, 1.0)
}

pub fn n_gradient(ops: &OperatorPair, u: &[f64]) -> Vec<f64> {
    entropy_gradient(ops, u, 0.5)
}

/// Gradient of [`j_functional`].
pub fn j_gradient(ops: &OperatorPair, v: &[f64]) -> Vec<f64> {
    let s = ops.mass_norm_sq(v);
    let n = n_functional(ops, v);
    let gn = n_gradient(ops, v);
    (0..v.len())
        .map(|i| {
            let mv = ops.mass()[i] * v[i];
            2.0 * mv / s + 2.0 * gn[i] / s - 4.0 * n * mv / (s * s)
        })
        .collect()
}

/// The unique `a > 0` with `N(a u) = 0`, namely `exp(N(u) / ‖u‖²)`, and `a u`.
pub fn nehari_project(ops: &OperatorPair, u: &NodeField) -> Result<(f64, NodeField)> {
    ops.manifold().check_field(u, "u")?;
    let s = ops.mass_norm_sq(u);
    if s == 0.0 {
        return Err(Error::InvalidArgument("cannot project the zero field onto the Nehari set".into()));
    }
    let a = (n_functional(ops, u) / s).exp();
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!("Nehari scaling {a} is not representable")));
    }
    Ok((a, u.scaled(a)))
}

/// Mass-weighted norm of `4Δu - Vu + 2u log u + μu` over the region.
pub fn mu_el_residual(ops: &OperatorPair, u: &NodeField, mu: f64, region: &Region) -> f64 {
    let sys = ops.restrict(region);
    let ul = sys.gather(u);
    let lu = sys.stiffness.apply(&ul);
    (0..ul.len())
        .map(|k| {
            let m = sys.mass[k];
            let r = -4.0 * lu[k] / m - sys.potential[k] * ul[k] + xlogx2(ul[k]) + mu * ul[k];
            m * r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Mass-weighted norm of `-4Δu + Vu - u log u` over the region.
pub fn nehari_el_residual(ops: &OperatorPair, u: &NodeField, region: &Region) -> f64 {
    let sys = ops.restrict(region);
    let ul = sys.gather(u);
    let lu = sys.stiffness.apply(&ul);
    (0..ul.len())
        .map(|k| {
            let m = sys.mass[k];
            let r = 4.0 * lu[k] / m + sys.potential[k] * ul[k] - 0.5 * xlogx2(ul[k]);
            m * r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Which sphere-constrained objective the descent minimises.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Entropy {
    /// `W`, entropy weight 1.
    W,
    /// `N`, entropy weight ½.
    N,
}

impl Entropy {
    fn beta(self) -> f64 {
        match self {
            Entropy::W => 1.0,
            Entropy::N => 0.5,
        }
    }
}

struct Descent {
    u: Vec<f64>,
    value: f64,
    residual: f64,
    trace: Vec<DescentStep>,
}

/// Region-local evaluation of the objective and its pieces.
struct LocalProblem<'s> {
    sys: &'s RestrictedSystem,
    beta: f64,
    tridiagonal: Option<(Vec<f64>, Vec<f64>)>,
}

impl<'s> LocalProblem<'s> {
    fn new(sys: &'s RestrictedSystem, kind: Entropy) -> Self {
        LocalProblem { sys, beta: kind.beta(), tridiagonal: sys.stiffness.tridiagonal() }
    }

    fn objective(&self, u: &[f64]) -> f64 {
        let lu = self.sys.stiffness.apply(u);
        let mut f = 4.0 * dot(u, &lu);
        for k in 0..u.len() {
            let m = self.sys.mass[k];
            f += m * (self.sys.potential[k] * u[k] * u[k] - self.beta * x2logx2(u[k]));
        }
        f
    }

    /// `F(w) - F(u) - κ(‖w‖² - ‖u‖²)` assembled from `w - u` so that it keeps
    /// relative accuracy when the two fields nearly coincide. The multiplier
    /// term removes the first-order effect of rounding in the normalisation;
    /// on the exact sphere it vanishes.
    fn change(&self, u: &[f64], w: &[f64], kappa: f64) -> f64 {
        let diff: Vec<f64> = w.iter().zip(u).map(|(w, u)| w - u).collect();
        let sum: Vec<f64> = w.iter().zip(u).map(|(w, u)| w + u).collect();
        let mut total = 4.0 * dot(&diff, &self.sys.stiffness.apply(&sum));
        for k in 0..u.len() {
            let m = self.sys.mass[k];
            let quad = diff[k] * sum[k];
            let entropy = if u[k] < LOG_FLOOR || w[k] < LOG_FLOOR {
                x2logx2(w[k]) - x2logx2(u[k])
            } else {
                quad * (w[k] * w[k]).ln() + 2.0 * u[k] * u[k] * (diff[k] / u[k]).ln_1p()
            };
            total += m * ((self.sys.potential[k] - kappa) * quad - self.beta * entropy);
        }
        total
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let lu = self.sys.stiffness.apply(u);
        (0..u.len())
            .map(|k| {
                let m = self.sys.mass[k];
                8.0 * lu[k] + 2.0 * m * self.sys.potential[k] * u[k] - 2.0 * self.beta * m * (xlogx2(u[k]) + u[k])
            })
            .collect()
    }

    /// Mass-weighted norm of the Riemannian gradient `M⁻¹g - ⟨M⁻¹g, u⟩_M u`,
    /// which is twice the Euler–Lagrange residual at unit norm.
    fn riemannian_norm(&self, u: &[f64], g: &[f64]) -> f64 {
        let proj = dot(g, u);
        (0..u.len())
            .map(|k| {
                let m = self.sys.mass[k];
                let r = g[k] / m - proj * u[k];
                m * r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Solves `P x = b` with `P = 8L + 2M diag(w)`.
    fn precondition(&self, w: &[f64], b: &[f64]) -> Vec<f64> {
        let mut diag = self.sys.stiffness.diagonal();
        for k in 0..diag.len() {
            diag[k] = 8.0 * diag[k] + 2.0 * self.sys.mass[k] * w[k];
        }
        if let Some((d, o)) = &self.tridiagonal {
            let dd: Vec<f64> = d.iter().zip(&self.sys.mass).zip(w).map(|((d, m), w)| 8.0 * d + 2.0 * m * w).collect();
            let oo: Vec<f64> = o.iter().map(|x| 8.0 * x).collect();
            if let Some(x) = thomas_solve(&dd, &oo, b) {
                return x;
            }
        }
        let mut x = vec![0.0; b.len()];
        conjugate_gradient(
            |v, out| {
                self.sys.stiffness.matvec(v, out);
                for k in 0..v.len() {
                    out[k] = 8.0 * out[k] + 2.0 * self.sys.mass[k] * w[k] * v[k];
                }
            },
            &diag,
            b,
            &mut x,
            1e-10,
            10 * b.len() + 100,
        );
        x
    }

    fn normalize(&self, u: &mut [f64]) {
        let n = mass_norm_sq(&self.sys.mass, u).sqrt();
        u.iter_mut().for_each(|x| *x = x.abs() / n);
    }

    /// Preconditioned projected gradient descent with Armijo backtracking.
    fn descend(&self, start: &[f64], cfg: &EntropyConfig) -> Result<Descent> {
        let n = start.len();
        let mut u = start.to_vec();
        self.normalize(&mut u);
        let mut value = self.objective(&u);
        let mut g = self.gradient(&u);
        let mut gnorm = self.riemannian_norm(&u, &g);
        let mut trace = vec![DescentStep { iteration: 0, objective: value, grad_norm: gnorm, step: 0.0 }];
        let mut step: f64 = 1.0;
        for it in 1..=cfg.max_iterations {
            if 0.5 * gnorm <= cfg.target || n == 1 {
                break;
            }
            // Sphere multiplier, ½ g·u.
            let kappa = 0.5 * dot(&g, &u);
            // Linearised local weight V - β(log u² + 1) - κ, floored so P stays positive.
            let w: Vec<f64> = (0..n)
                .map(|k| {
                    let log = if u[k] > 1e-150 { (u[k] * u[k]).ln() } else { -690.0 };
                    (self.sys.potential[k] - self.beta * (log + 1.0) - kappa).max(0.0) + 1.0
                })
                .collect();
            // Work with the tangent part of g; preconditioning the full gradient
            // would bury the tangent direction under the normal component.
            let mu: Vec<f64> = u.iter().zip(&self.sys.mass).map(|(u, m)| u * m).collect();
            let gt: Vec<f64> = g.iter().zip(&mu).map(|(g, mu)| g - 2.0 * kappa * mu).collect();
            let pg = self.precondition(&w, &gt);
            let pmu = self.precondition(&w, &mu);
            let alpha = dot(&mu, &pg) / dot(&mu, &pmu);
            let mut d: Vec<f64> = pg.iter().zip(&pmu).map(|(a, b)| a - alpha * b).collect();
            let normal = dot(&mu, &d);
            d.iter_mut().zip(&u).for_each(|(d, u)| *d -= normal * u);
            let slope = dot(&gt, &d);
            if !(slope > 0.0) {
                break;
            }
            let mut t = (2.0 * step).min(1.0);
            let mut accepted = None;
            for _ in 0..60 {
                let mut trial: Vec<f64> = u.iter().zip(&d).map(|(u, d)| u - t * d).collect();
                self.normalize(&mut trial);
                let delta = self.change(&u, &trial, kappa);
                if delta.is_finite() && delta <= -1e-4 * t * slope {
                    accepted = Some((trial, value + delta));
                    break;
                }
                t *= 0.5;
            }
            let Some((trial, f)) = accepted else { break };
            if f < cfg.objective_floor {
                return Err(Error::UnboundedBelow { floor: cfg.objective_floor });
            }
            step = t;
            u = trial;
            value = f;
            g = self.gradient(&u);
            gnorm = self.riemannian_norm(&u, &g);
            trace.push(DescentStep { iteration: it, objective: value, grad_norm: gnorm, step });
        }
        // the trace accumulates exact differences; report the direct evaluation
        let value = self.objective(&u);
        Ok(Descent { u, value, residual: 0.5 * gnorm, trace })
    }
}

/// The fixed multi-start set: constant, linear ground state, and Gaussians of
/// three widths about the potential minimum.
fn starts(ops: &OperatorPair, region: &Region, sys: &RestrictedSystem, cfg: &EntropyConfig) -> Vec<(String, Vec<f64>)> {
    let mut out = vec![("constant".to_string(), vec![1.0; sys.len()])];
    if let Ok(gs) = lambda_constant(ops, region, &cfg.eigen) {
        out.push(("ground_state".to_string(), sys.gather(&gs.eigenfunction)));
    }
    let m = ops.manifold();
    let center = sys
        .nodes
        .iter()
        .copied()
        .min_by(|&a, &b| ops.potential()[a].total_cmp(&ops.potential()[b]))
        .expect("regions are non-empty");
    let mut dist = vec![f64::INFINITY; m.node_count()];
    for (i, d) in m.shortest_paths(center, f64::INFINITY) {
        dist[i] = d;
    }
    let extent = sys.nodes.iter().map(|&i| dist[i]).fold(0.0, f64::max);
    if extent > 0.0 {
        for frac in [0.125, 0.25, 0.5] {
            let w = frac * extent;
            let field = sys.nodes.iter().map(|&i| (-dist[i] * dist[i] / (2.0 * w * w)).exp().max(1e-200)).collect();
            out.push((format!("gaussian_{frac}"), field));
        }
    }
    out
}

fn minimize(ops: &OperatorPair, region: &Region, kind: Entropy, cfg: &EntropyConfig) -> Result<(Descent, Vec<StartRecord>, String, usize)> {
    region.require_connected(ops.manifold())?;
    let sys = ops.restrict(region);
    let problem = LocalProblem::new(&sys, kind);
    let mut records = Vec::new();
    let mut best: Option<(Descent, String)> = None;
    let mut fallback: Option<Descent> = None;
    let start_set = starts(ops, region, &sys, cfg);
    let used = start_set.len();
    for (label, start) in start_set {
        let mut s = start.clone();
        problem.normalize(&mut s);
        let initial = problem.objective(&s);
        let run = problem.descend(&start, cfg)?;
        log::debug!("start {label}: {initial} -> {} in {} steps, residual {:e}", run.value, run.trace.len() - 1, run.residual);
        records.push(StartRecord { label: label.clone(), initial, last: run.value, residual: run.residual });
        if run.residual <= cfg.tolerance {
            if best.as_ref().map_or(true, |(b, _)| run.value < b.value) {
                best = Some((run, label));
            }
        } else if fallback.as_ref().map_or(true, |f| run.residual < f.residual) {
            fallback = Some(run);
        }
    }
    match best {
        Some((run, label)) => Ok((run, records, label, used)),
        None => Err(Error::NoConvergence {
            solver: "entropy descent",
            iterations: cfg.max_iterations,
            residual: fallback.map_or(f64::INFINITY, |f| f.residual),
        }),
    }
}

/// `μ = inf { W(u) : ‖u‖ = 1, u = 0 off the region }`.
pub fn mu_constant(ops: &OperatorPair, region: &Region, cfg: &EntropyConfig) -> Result<EntropyResult> {
    let (run, starts, best_start, used) = minimize(ops, region, Entropy::W, cfg)?;
    let sys = ops.restrict(region);
    let minimizer = sys.expand(&run.u);
    let el_residual = mu_el_residual(ops, &minimizer, run.value, region);
    Ok(EntropyResult {
        value: run.value,
        minimizer,
        el_residual,
        descent_trace: run.trace,
        restarts_used: used,
        scale_defect: None,
        best_start,
        starts,
        region: region.kind(),
    })
}

/// `d = inf { I(u) : N(u) = 0 }`, through `d = ½ exp(min J)`.
pub fn d_constant(ops: &OperatorPair, region: &Region, cfg: &EntropyConfig) -> Result<EntropyResult> {
    let (run, starts, best_start, used) = minimize(ops, region, Entropy::N, cfg)?;
    let sys = ops.restrict(region);
    let v = sys.expand(&run.u);
    let (_, minimizer) = nehari_project(ops, &v)?;
    let el_residual = nehari_el_residual(ops, &minimizer, region);
    let value = 0.5 * (2.0 * run.value).exp();
    let j = j_functional(ops, &v);
    let scale_defect = [0.37, 2.9, 11.0].iter().map(|&a| (j_functional(ops, &v.scaled(a)) - j).abs()).fold(0.0, f64::max);
    Ok(EntropyResult {
        value,
        minimizer,
        el_residual,
        descent_trace: run.trace,
        restarts_used: used,
        scale_defect: Some(scale_defect),
        best_start,
        starts,
        region: region.kind(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyTracePoint {
    pub radius: f64,
    pub value: f64,
    pub el_residual: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyTrace {
    pub points: Vec<EntropyTracePoint>,
}

impl EntropyTrace {
    pub fn last(&self) -> f64 {
        self.points.last().map(|p| p.value).unwrap_or(f64::NAN)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["R_or_r", "value", "residual", "nodes"])?;
        for p in &self.points {
            w.write_record(&[p.radius.to_string(), p.value.to_string(), p.el_residual.to_string(), p.nodes.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn exterior_trace(
    ops: &OperatorPair,
    radii: &[f64],
    cfg: &EntropyConfig,
    solve: fn(&OperatorPair, &Region, &EntropyConfig) -> Result<EntropyResult>,
) -> Result<EntropyTrace> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("radii must be non-empty and strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(radii.len());
    for &r in radii {
        let region = Region::exterior(ops.manifold(), r)?;
        let res = solve(ops, &region, cfg)?;
        points.push(EntropyTracePoint { radius: r, value: res.value, el_residual: res.el_residual, nodes: region.len() });
    }
    Ok(EntropyTrace { points })
}

/// μ over fields supported outside `B_r(p)`, per radius.
pub fn mu_infinity(ops: &OperatorPair, radii: &[f64], cfg: &EntropyConfig) -> Result<EntropyTrace> {
    exterior_trace(ops, radii, cfg, mu_constant)
}

/// d over Nehari fields supported outside `B_r(p)`, per radius.
pub fn d_infinity(ops: &OperatorPair, radii: &[f64], cfg: &EntropyConfig) -> Result<EntropyTrace> {
    exterior_trace(ops, radii, cfg, d_constant)
}

/// Independent μ and d solves tabulated against `log(2√d)` and `log(2d)`.
#[derive(Clone, Debug, Serialize)]
pub struct Prop6Report {
    pub mu: f64,
    pub d: f64,
    pub log_2d: f64,
    pub log_2sqrt_d: f64,
    /// `μ - log(2√d)`
    pub gap_a: f64,
    /// `μ - log(2d)`
    pub gap_b: f64,
    pub residuals: Prop6Residuals,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Prop6Residuals {
    pub mu: f64,
    pub d: f64,
}

pub fn proposition6_report(ops: &OperatorPair, region: &Region, cfg: &EntropyConfig) -> Result<Prop6Report> {
    let mu = mu_constant(ops, region, cfg)?;
    let d = d_constant(ops, region, cfg)?;
    let log_2d = (2.0 * d.value).ln();
    let log_2sqrt_d = (2.0 * d.value.sqrt()).ln();
    Ok(Prop6Report {
        mu: mu.value,
        d: d.value,
        log_2d,
        log_2sqrt_d,
        gap_a: mu.value - log_2sqrt_d,
        gap_b: mu.value - log_2d,
        residuals: Prop6Residuals { mu: mu.el_residual, d: d.el_residual },
    })
}
