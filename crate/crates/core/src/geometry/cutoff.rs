use super::{DiscreteManifold, NodeField};
use crate::error::{Error, Result};

/// `1` on `B_R(p)`, `2 - r/R` on `B_2R(p) \ B_R(p)`, `0` beyond.
pub fn linear_cutoff(m: &DiscreteManifold, radius: f64) -> Result<NodeField> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff radius {radius} must be positive")));
    }
    m.check_radius(2.0 * radius)?;
    Ok(m.field(|i| {
        let r = m.node_distances()[i];
        if r <= radius {
            1.0
        } else if r <= 2.0 * radius {
            2.0 - r / radius
        } else {
            0.0
        }
    }))
}

/// `1` on `B_√R(p)`, `2 - 2 log r / log R` out to `R`, `0` beyond.
pub fn log_cutoff(m: &DiscreteManifold, radius: f64) -> Result<NodeField> {
    if !(radius > std::f64::consts::E.powi(2)) {
        return Err(Error::InvalidArgument(format!("log cutoff needs R > e^2, got {radius}")));
    }
    m.check_radius(radius)?;
    let inner = radius.sqrt();
    let log_r = radius.ln();
    Ok(m.field(|i| {
        let r = m.node_distances()[i];
        if r <= inner {
            1.0
        } else if r <= radius {
            (2.0 - 2.0 * r.ln() / log_r).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }))
}
