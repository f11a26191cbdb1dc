use serde::Serialize;

use super::DiscreteManifold;
use crate::error::{Error, Result};

/// `V_p(R)`: total weight of the ball of radius `R` about the base point.
pub fn volume_growth(m: &DiscreteManifold, radius: f64) -> f64 {
    let p = m.base_point();
    m.volume_weights()
        .iter()
        .zip(m.node_distances())
        .enumerate()
        .filter(|(i, (_, &d))| *i == p || d <= radius)
        .map(|(_, (w, _))| w)
        .sum()
}

/// Least-squares fit of `log V_p(R) = log C + k log R`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub constant: f64,
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
}

pub fn fit_growth_exponent(m: &DiscreteManifold, r_min: f64, r_max: f64) -> Result<GrowthFit> {
    fit_growth_exponent_with(m, r_min, r_max, 16)
}

/// Fits over `samples` geometrically spaced radii in `[r_min, r_max]`.
pub fn fit_growth_exponent_with(m: &DiscreteManifold, r_min: f64, r_max: f64, samples: usize) -> Result<GrowthFit> {
    if samples < 4 {
        return Err(Error::InvalidArgument(format!("need >= 4 sample radii, got {samples}")));
    }
    if !(r_min > 0.0 && r_max > r_min) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    m.check_radius(r_max)?;
    let ratio = (r_max / r_min).powf(1.0 / (samples - 1) as f64);
    let radii: Vec<f64> = (0..samples).map(|k| r_min * ratio.powi(k as i32)).collect();
    let volumes: Vec<f64> = radii.iter().map(|&r| volume_growth(m, r)).collect();
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = volumes.iter().map(|v| v.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(GrowthFit { exponent: slope, constant: intercept.exp(), radii, volumes })
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
