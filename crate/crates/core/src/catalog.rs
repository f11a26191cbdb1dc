//! Named potential families, evaluated on the distance from the base point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::divergence_form_potential_with_ghost;
use crate::geometry::{interpolate, DiscreteManifold, Layout, NodeField};

fn one() -> f64 {
    1.0
}

fn check_table(r: &[f64], y: &[f64], what: &str) -> Result<()> {
    if r.len() < 2 || r.len() != y.len() {
        return Err(Error::InvalidArgument(format!("{what} table needs >= 2 samples and matching lengths")));
    }
    if r.windows(2).any(|w| !(w[1] > w[0])) || r.iter().chain(y).any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{what} table needs finite values and increasing radii")));
    }
    Ok(())
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} = {x} must be positive")))
    }
}

fn finite(xs: &[f64], what: &str) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be finite")))
    }
}

/// Radial profiles `u(r)` whose negative Laplacian becomes the potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `log(1 + scale·r)`
    Log1p {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `r^exponent`
    Power { exponent: f64 },
    /// `exp(-r²/width²)`
    Gaussian { width: f64 },
    Tabulated { r: Vec<f64>, u: Vec<f64> },
}

impl Profile {
    fn validate(&self) -> Result<()> {
        match self {
            Profile::Log1p { scale } => positive(*scale, "profile scale"),
            Profile::Power { exponent } => finite(&[*exponent], "profile exponent"),
            Profile::Gaussian { width } => positive(*width, "profile width"),
            Profile::Tabulated { r, u } => check_table(r, u, "profile"),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Profile::Log1p { scale } => (scale * r).ln_1p(),
            Profile::Power { exponent } => r.powf(*exponent),
            Profile::Gaussian { width } => (-(r * r) / (width * width)).exp(),
            Profile::Tabulated { r: rs, u } => interpolate(rs, u, r),
        }
    }
}

/// The potential catalogue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Constant { value: f64 },
    /// `scale · r²`
    Harmonic {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `level - depth · exp(-r²/width²)`
    GaussianWell {
        level: f64,
        depth: f64,
        #[serde(default = "one")]
        width: f64,
    },
    /// `offset + coefficient · r^exponent`
    Power {
        #[serde(default)]
        offset: f64,
        coefficient: f64,
        exponent: f64,
    },
    /// Piecewise-linear in `r`, constant beyond the ends.
    Tabulated { r: Vec<f64>, v: Vec<f64> },
    /// `-Δ u_profile`.
    DivergenceForm { profile: Profile },
}

impl Default for Potential {
    fn default() -> Self {
        Potential::Constant { value: 0.0 }
    }
}

/// A potential evaluated on a manifold.
#[derive(Clone, Debug)]
pub struct BuiltPotential {
    pub field: NodeField,
    /// `sup |∇u_profile|` for divergence-form potentials.
    pub gradient_sup: Option<f64>,
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::Constant { value } => finite(&[*value], "constant potential"),
            Potential::Harmonic { scale } => finite(&[*scale], "harmonic scale"),
            Potential::GaussianWell { level, depth, width } => {
                finite(&[*level, *depth], "well level and depth")?;
                positive(*width, "well width")
            }
            Potential::Power { offset, coefficient, exponent } => finite(&[*offset, *coefficient, *exponent], "power potential"),
            Potential::Tabulated { r, v } => check_table(r, v, "potential"),
            Potential::DivergenceForm { profile } => profile.validate(),
        }
    }

    fn eval(&self, r: f64) -> f64 {
        match self {
            Potential::Constant { value } => *value,
            Potential::Harmonic { scale } => scale * r * r,
            Potential::GaussianWell { level, depth, width } => level - depth * (-(r * r) / (width * width)).exp(),
            Potential::Power { offset, coefficient, exponent } => offset + coefficient * r.powf(*exponent),
            Potential::Tabulated { r: rs, v } => interpolate(rs, v, r),
            Potential::DivergenceForm { .. } => unreachable!("divergence forms are assembled globally"),
        }
    }

    /// Evaluates the potential at every node's distance from the base point.
    pub fn build(&self, m: &DiscreteManifold) -> Result<BuiltPotential> {
        self.validate()?;
        let r = m.node_distances();
        let built = match self {
            Potential::DivergenceForm { profile } => {
                let u = m.field(|i| profile.eval(r[i]));
                // The radial ghost coupling spans half a cell; this value makes its
                // flux the centred difference across the outer face. Graph
                // truncations continue the profile flat.
                let ghost: Vec<f64> = match m.layout() {
                    Layout::Radial { r_max, h } => u.iter().map(|ui| 0.5 * (profile.eval(r_max + 0.5 * h) + ui)).collect(),
                    Layout::Graph => u.to_vec(),
                };
                let form = divergence_form_potential_with_ghost(m, &u, &ghost)?;
                BuiltPotential { field: form.potential, gradient_sup: Some(form.gradient_sup) }
            }
            _ => BuiltPotential { field: m.field(|i| self.eval(r[i])), gradient_sup: None },
        };
        if let Some(i) = built.field.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("potential is not finite at node {i} (r = {})", r[i])));
        }
        Ok(built)
    }

    /// `lim V` as `r → ∞` where the family determines it.
    pub fn limit(&self) -> Option<f64> {
        match self {
            Potential::Constant { value } => Some(*value),
            Potential::GaussianWell { level, .. } => Some(*level),
            Potential::Power { offset, coefficient, exponent } if *exponent < 0.0 || *coefficient == 0.0 => Some(*offset),
            Potential::Tabulated { v, .. } => v.last().copied(),
            _ => None,
        }
    }
}
