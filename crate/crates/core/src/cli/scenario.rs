//! Declarative scenario files.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::catalog::Potential;
use crate::ccdiag::Thresholds;
use crate::eigen::EigenConfig;
use crate::entropy::EntropyConfig;
use crate::error::{Error, Result};
use crate::geometry::{build_radial, circle, from_edges, grid, segment, single_node, torus, DiscreteManifold, RadialSpec, Region, RegionKind, Warp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Lambda,
    Exhaustion,
    LambdaInf,
    Mu,
    D,
    Prop6,
    Groundstate,
    Growth,
    Trichotomy,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Lambda => "lambda",
            Task::Exhaustion => "exhaustion",
            Task::LambdaInf => "lambda-inf",
            Task::Mu => "mu",
            Task::D => "d",
            Task::Prop6 => "prop6",
            Task::Groundstate => "groundstate",
            Task::Growth => "growth",
            Task::Trichotomy => "trichotomy",
            Task::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub i: usize,
    pub j: usize,
    pub conductance: f64,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    Radial {
        dimension: usize,
        r_max: f64,
        h: f64,
        #[serde(default = "Warp::flat")]
        warp: Warp,
    },
    Circle { nodes: usize, length: f64 },
    Torus { nx: usize, ny: usize, h: f64 },
    Grid {
        nx: usize,
        ny: usize,
        h: f64,
        #[serde(default = "yes")]
        dirichlet: bool,
    },
    Segment { cells: usize, length: f64 },
    SingleNode {
        #[serde(default = "unit")]
        weight: f64,
    },
    Graph {
        weights: Vec<f64>,
        edges: Vec<EdgeSpec>,
        #[serde(default)]
        base_point: usize,
    },
}

fn yes() -> bool {
    true
}

fn unit() -> f64 {
    1.0
}

impl ManifoldSpec {
    pub fn build(&self) -> Result<DiscreteManifold> {
        match self {
            ManifoldSpec::Radial { dimension, r_max, h, warp } => {
                build_radial(&RadialSpec { dimension: *dimension, warp: warp.clone(), r_max: *r_max, h: *h })
            }
            ManifoldSpec::Circle { nodes, length } => circle(*nodes, *length),
            ManifoldSpec::Torus { nx, ny, h } => torus(*nx, *ny, *h),
            ManifoldSpec::Grid { nx, ny, h, dirichlet } => grid(*nx, *ny, *h, *dirichlet),
            ManifoldSpec::Segment { cells, length } => segment(*cells, *length),
            ManifoldSpec::SingleNode { weight } => single_node(*weight),
            ManifoldSpec::Graph { weights, edges, base_point } => {
                let edges: Vec<_> = edges.iter().map(|e| (e.i, e.j, e.conductance, e.length)).collect();
                from_edges(weights.clone(), &edges, *base_point)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    #[default]
    Whole,
    /// About `center`, or the base point when omitted.
    Ball { center: Option<usize>, radius: f64 },
    Exterior { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

impl RegionSpec {
    pub fn build(&self, m: &DiscreteManifold) -> Result<Region> {
        match *self {
            RegionSpec::Whole => Ok(Region::whole(m)),
            RegionSpec::Ball { center, radius } => {
                let c = center.unwrap_or(m.base_point());
                if c >= m.node_count() {
                    return Err(Error::Scenario(format!("params.region.center {c} is not a node")));
                }
                Region::new(m, RegionKind::Ball { center: c, radius })
            }
            RegionSpec::Exterior { radius } => Region::exterior(m, radius),
            RegionSpec::Annulus { inner, outer } => Region::annulus(m, inner, outer),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub eigen: EigenConfig,
    pub entropy: EntropyConfig,
    pub thresholds: Thresholds,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eigen: EigenConfig::default(),
            entropy: EntropyConfig::default(),
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskParams {
    /// Region for lambda, groundstate, mu, d and prop6.
    pub region: RegionSpec,
    /// Ball radii for exhaustion and trichotomy.
    pub radii: Option<Vec<f64>>,
    /// Exterior radii for lambda-inf, and for the at-infinity traces of mu and d.
    pub exterior_radii: Option<Vec<f64>>,
    /// Limit of the potential; defaults to the family's own limit when it has one.
    pub v_infinity: Option<f64>,
    pub probe_radius: Option<f64>,
    /// Ball about the base point whose mass share is traced by trichotomy.
    pub mass_radius: Option<f64>,
    /// `[r_min, r_max]` for the growth fit.
    pub growth_range: Option<[f64; 2]>,
    pub growth_samples: usize,
    /// Random instances per property in verify.
    pub verify_samples: usize,
}

impl Default for TaskParams {
    fn default() -> Self {
        TaskParams {
            region: RegionSpec::Whole,
            radii: None,
            exterior_radii: None,
            v_infinity: None,
            probe_radius: None,
            mass_radius: None,
            growth_range: None,
            growth_samples: 16,
            verify_samples: 20,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    pub manifold: ManifoldSpec,
    #[serde(default)]
    pub potential: Potential,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub params: TaskParams,
    #[serde(default)]
    pub output: OutputSpec,
}

fn positive(x: f64, field: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Scenario(format!("{field} must be positive, got {x}")))
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Checks everything that can be checked without building the manifold.
    pub fn validate(&self) -> Result<()> {
        let e = &self.solver.eigen;
        positive(e.tolerance, "solver.eigen.tolerance")?;
        if e.basis_size < 2 || e.max_restarts == 0 {
            return Err(Error::Scenario("solver.eigen needs basis_size >= 2 and max_restarts >= 1".into()));
        }
        let n = &self.solver.entropy;
        positive(n.tolerance, "solver.entropy.tolerance")?;
        positive(n.target, "solver.entropy.target")?;
        if n.max_iterations == 0 {
            return Err(Error::Scenario("solver.entropy.max_iterations must be >= 1".into()));
        }
        if !(e.margin.is_finite() && e.margin >= 0.0) {
            return Err(Error::Scenario("solver.eigen.margin must be >= 0".into()));
        }
        self.solver.thresholds.validate().map_err(|e| Error::Scenario(format!("solver.thresholds: {e}")))?;
        self.potential.validate().map_err(|e| Error::Scenario(format!("potential: {e}")))?;
        for (name, list) in [("params.radii", &self.params.radii), ("params.exterior_radii", &self.params.exterior_radii)] {
            if let Some(r) = list {
                if r.is_empty() || r.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Scenario(format!("{name} must be non-empty, nonnegative and strictly increasing")));
                }
            }
        }
        if let Some(r) = self.params.probe_radius {
            positive(r, "params.probe_radius")?;
        }
        if let Some([a, b]) = self.params.growth_range {
            positive(a, "params.growth_range[0]")?;
            if !(b > a) {
                return Err(Error::Scenario("params.growth_range must be increasing".into()));
            }
        }
        if self.params.verify_samples == 0 {
            return Err(Error::Scenario("params.verify_samples must be >= 1".into()));
        }
        Ok(())
    }
}
