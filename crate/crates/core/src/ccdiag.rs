//! Concentration–compactness diagnostics for minimising sequences.
//!
//! The classifier looks at the `|u|²` mass profile of each field. It measures
//! the best ball of the probe radius, a second ball found after removing the
//! first, and how far the best centres wander. "Tends to infinity" and
//! "stays bounded" are measured against the truncation radius.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::OperatorPair;
use crate::geometry::{DiscreteManifold, NodeField, Region};

/// Monotonicity slack for sequences that are flat to rounding.
const SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Vanishing: final concentration below this.
    pub vanishing: f64,
    /// Dichotomy: both split masses above this.
    pub dichotomy: f64,
    /// Compactness: final concentration above `1 - compactness`.
    pub compactness: f64,
    /// Dichotomy needs the final cluster distance beyond this fraction of the truncation radius.
    pub separation_fraction: f64,
    /// Compactness allows centres to drift at most this fraction of the truncation radius.
    pub drift_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { vanishing: 0.05, dichotomy: 0.1, compactness: 0.05, separation_fraction: 0.5, drift_fraction: 0.25 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !(unit(self.vanishing) && unit(self.dichotomy) && unit(self.compactness)) {
            return Err(Error::InvalidArgument("trichotomy thresholds must lie in (0, 1)".into()));
        }
        if self.vanishing + self.dichotomy > 1.0 || self.dichotomy >= 1.0 - self.compactness {
            return Err(Error::InvalidArgument("trichotomy thresholds overlap; verdicts would not be exclusive".into()));
        }
        if !(self.separation_fraction > 0.0 && self.drift_fraction > 0.0) {
            return Err(Error::InvalidArgument("distance fractions must be positive".into()));
        }
        Ok(())
    }
}

fn density(m: &DiscreteManifold, u: &[f64]) -> Result<(Vec<f64>, f64)> {
    m.check_field(u, "u")?;
    let rho: Vec<f64> = m.volume_weights().iter().zip(u).map(|(w, x)| w * x * x).collect();
    let total: f64 = rho.iter().sum();
    if total == 0.0 {
        return Err(Error::InvalidArgument("concentration of the zero field is undefined".into()));
    }
    Ok((rho, total))
}

/// Heaviest ball of radius `r` over the nodes allowed by `mask`, counting only
/// allowed mass. Returns `(center, mass)`.
fn heaviest_ball(m: &DiscreteManifold, rho: &[f64], r: f64, mask: Option<&[bool]>) -> (usize, f64) {
    let allowed = |i: usize| mask.map_or(true, |k| k[i]);
    let mut best = (usize::MAX, -1.0);
    for z in (0..m.node_count()).filter(|&z| allowed(z) && rho[z] > 0.0) {
        let mass: f64 = m.ball_nodes(z, r).into_iter().filter(|&i| allowed(i)).map(|i| rho[i]).sum();
        if mass > best.1 {
            best = (z, mass);
        }
    }
    best
}

/// `Q(r) = max_z ∫_{B_r(z)} u² / ∫ u²`, with the maximum over every node.
pub fn concentration_function(m: &DiscreteManifold, u: &[f64], r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("probe radius {r} must be >= 0")));
    }
    let (rho, total) = density(m, u)?;
    Ok((heaviest_ball(m, &rho, r, None).1 / total).min(1.0))
}

/// Fraction of `Σ m u²` inside the region, per field.
pub fn mass_ratio(m: &DiscreteManifold, fields: &[NodeField], region: &Region) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|u| {
            let (rho, total) = density(m, u)?;
            Ok(region.nodes().iter().map(|&i| rho[i]).sum::<f64>() / total)
        })
        .collect()
}

/// A minimising sequence captured for analysis.
#[derive(Clone, Debug)]
pub struct SequenceSnapshot {
    pub fields: Vec<NodeField>,
    pub norms: Vec<f64>,
    pub objectives: Vec<f64>,
}

impl SequenceSnapshot {
    pub fn new(m: &DiscreteManifold, fields: Vec<NodeField>, objectives: Vec<f64>) -> Result<Self> {
        if objectives.len() != fields.len() {
            return Err(Error::InvalidArgument("one objective value per field is required".into()));
        }
        let mut norms = Vec::with_capacity(fields.len());
        for u in &fields {
            let (_, total) = density(m, u)?;
            norms.push(total.sqrt());
        }
        Ok(SequenceSnapshot { fields, norms, objectives })
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Vanishing,
    Dichotomy,
    Compactness,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldEvidence {
    /// Concentration at the probe radius.
    pub q: f64,
    /// `(radius, Q(radius))` over a few multiples of the probe radius.
    pub q_curve: Vec<(f64, f64)>,
    pub center: usize,
    pub center_distance: f64,
    /// Mass of the heaviest ball, and of the heaviest ball once that is removed.
    pub split: (f64, f64),
    pub second_center: Option<usize>,
    pub separation: f64,
    /// Share of `∫(|∇u|² + Vu²)` inside the heaviest ball, when attached.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_share: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub probe_radius: f64,
    pub truncation: f64,
    pub thresholds: Thresholds,
    /// Largest distance of any best centre from the first one.
    pub drift: f64,
    pub fields: Vec<FieldEvidence>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trichotomy {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

impl Trichotomy {
    /// Records the energy-density share of each heaviest ball alongside the
    /// `|u|²` evidence. It does not affect the verdict.
    pub fn attach_energy_density(&mut self, ops: &OperatorPair, snapshot: &SequenceSnapshot) {
        for (ev, u) in self.evidence.fields.iter_mut().zip(&snapshot.fields) {
            let grad = ops.gradient_square(u);
            let rho: Vec<f64> = (0..u.len())
                .map(|i| ops.mass()[i] * (grad[i] + ops.potential()[i] * u[i] * u[i]))
                .collect();
            let total: f64 = rho.iter().sum();
            let inside: f64 = ops.manifold().ball_nodes(ev.center, self.evidence.probe_radius).into_iter().map(|i| rho[i]).sum();
            ev.rho_share = (total != 0.0).then(|| inside / total);
        }
    }
}

fn nonincreasing(xs: impl Iterator<Item = f64> + Clone) -> bool {
    xs.clone().zip(xs.skip(1)).all(|(a, b)| b <= a + SLACK)
}

fn field_evidence(m: &DiscreteManifold, u: &[f64], r: f64) -> Result<FieldEvidence> {
    let (rho, total) = density(m, u)?;
    let (center, first) = heaviest_ball(m, &rho, r, None);
    let q = (first / total).min(1.0);
    let mut mask = vec![true; m.node_count()];
    for i in m.ball_nodes(center, r) {
        mask[i] = false;
    }
    let (second_center, second) = heaviest_ball(m, &rho, r, Some(&mask));
    let second_center = (second_center != usize::MAX).then_some(second_center);
    let separation = second_center.map_or(0.0, |z| m.distance(center, z));
    let q_curve = [0.25, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&k| {
            let rr = k * r;
            (rr, (heaviest_ball(m, &rho, rr, None).1 / total).min(1.0))
        })
        .collect();
    Ok(FieldEvidence {
        q,
        q_curve,
        center,
        center_distance: m.node_distances()[center],
        split: (q, second.max(0.0) / total),
        second_center,
        separation,
        rho_share: None,
    })
}

/// Classifies a minimising sequence as vanishing, dichotomy or compactness.
///
/// Checks run in that order of strength: compactness (final `Q > 1 - ε_c`,
/// bounded drift), dichotomy (two heavy balls drifting apart past the
/// separation threshold), vanishing (final `Q < ε_v` with `Q` decreasing).
/// Anything else is inconclusive.
pub fn trichotomy_classify(m: &DiscreteManifold, snapshot: &SequenceSnapshot, r_probe: f64, thresholds: &Thresholds) -> Result<Trichotomy> {
    thresholds.validate()?;
    if snapshot.len() < 3 {
        return Err(Error::InvalidArgument(format!("trichotomy needs at least 3 fields, got {}", snapshot.len())));
    }
    if !(r_probe > 0.0 && r_probe.is_finite()) {
        return Err(Error::InvalidArgument(format!("probe radius {r_probe} must be positive")));
    }
    let fields = snapshot.fields.iter().map(|u| field_evidence(m, u, r_probe)).collect::<Result<Vec<_>>>()?;
    let first = fields[0].center;
    let drift = fields.iter().map(|f| m.distance(first, f.center)).fold(0.0, f64::max);
    let truncation = m.truncation_radius();
    let last = fields.last().expect("at least three fields");

    let compact = last.q > 1.0 - thresholds.compactness && drift <= thresholds.drift_fraction * truncation;
    let dichotomy = last.split.0 > thresholds.dichotomy
        && last.split.0 < 1.0 - thresholds.dichotomy
        && last.split.1 > thresholds.dichotomy
        && last.separation > thresholds.separation_fraction * truncation
        && fields.windows(2).all(|w| w[1].separation >= w[0].separation - SLACK);
    let vanishing = last.q < thresholds.vanishing && nonincreasing(fields.iter().map(|f| f.q)) && fields[0].q > last.q;

    let verdict = if compact {
        Verdict::Compactness
    } else if dichotomy {
        Verdict::Dichotomy
    } else if vanishing {
        Verdict::Vanishing
    } else {
        Verdict::Inconclusive
    };
    Ok(Trichotomy {
        verdict,
        evidence: Evidence { probe_radius: r_probe, truncation, thresholds: *thresholds, drift, fields },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    /// `λ < λ∞ - δ`: a positive ground state exists.
    GroundStatePredicted,
    /// `|λ - λ∞| <= δ`.
    NoPrediction,
    /// `λ > λ∞ + δ`: the sufficient condition fails; nothing more is claimed.
    AtInfinityRegime,
}

/// Compares `λ` against `λ∞` with margin `δ`.
pub fn existence_predictor(lambda: f64, lambda_inf: f64, margin: f64) -> Result<Prediction> {
    if !(lambda.is_finite() && lambda_inf.is_finite() && margin >= 0.0) {
        return Err(Error::InvalidArgument(format!("predictor needs finite λ={lambda}, λ∞={lambda_inf} and δ={margin} >= 0")));
    }
    Ok(if lambda < lambda_inf - margin {
        Prediction::GroundStatePredicted
    } else if lambda > lambda_inf + margin {
        Prediction::AtInfinityRegime
    } else {
        Prediction::NoPrediction
    })
}
