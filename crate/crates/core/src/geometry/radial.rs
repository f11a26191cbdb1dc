//! Warped products `dr² + φ(r)² g_sphere` discretised on cell-centred shells.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{DiscreteManifold, Edge, Layout};
use crate::error::{Error, Result};

// 3-point Gauss-Legendre on [-1, 1].
const GAUSS_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Built-in warp families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Warp {
    /// `φ(r) = scale · r^exponent`; exponent 1 is flat space.
    Power {
        #[serde(default = "one")]
        scale: f64,
        exponent: f64,
    },
    /// `φ(r) = sinh(scale · r) / scale`, hyperbolic space of curvature `-scale²`.
    Sinh {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `φ(r) = value`, a cylinder.
    Constant { value: f64 },
    /// Piecewise-linear interpolation of samples; constant beyond the ends.
    Tabulated { r: Vec<f64>, phi: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl Warp {
    pub fn flat() -> Self {
        Warp::Power { scale: 1.0, exponent: 1.0 }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Warp::Power { scale, exponent } => scale * r.powf(*exponent),
            Warp::Sinh { scale } => (scale * r).sinh() / scale,
            Warp::Constant { value } => *value,
            Warp::Tabulated { r: rs, phi } => interpolate(rs, phi, r),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Warp::Sinh { scale } | Warp::Power { scale, .. } if !(scale.is_finite() && *scale > 0.0) => {
                Err(Error::InvalidArgument(format!("warp scale {scale} must be positive")))
            }
            Warp::Power { exponent, .. } if !exponent.is_finite() => {
                Err(Error::InvalidArgument("warp exponent must be finite".into()))
            }
            Warp::Tabulated { r, phi } => {
                if r.len() < 2 || r.len() != phi.len() {
                    return Err(Error::InvalidArgument(
                        "tabulated warp needs >= 2 samples and matching r/phi lengths".into(),
                    ));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) || r.iter().chain(phi).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "tabulated warp radii must be finite and strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let k = xs.partition_point(|&v| v <= x);
    let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialSpec {
    pub dimension: usize,
    pub warp: Warp,
    pub r_max: f64,
    pub h: f64,
}

impl RadialSpec {
    pub fn flat(dimension: usize, r_max: f64, h: f64) -> Self {
        RadialSpec { dimension, warp: Warp::flat(), r_max, h }
    }

    pub fn cell_count(&self) -> Result<usize> {
        if self.dimension < 2 {
            return Err(Error::InvalidArgument(format!(
                "radial dimension {} must be >= 2",
                self.dimension
            )));
        }
        if !(self.h.is_finite() && self.h > 0.0 && self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::InvalidArgument("h and r_max must be positive".into()));
        }
        let ratio = self.r_max / self.h;
        let n = ratio.round();
        if n < 8.0 {
            return Err(Error::InvalidArgument(format!("r_max / h = {ratio} must be >= 8")));
        }
        if (ratio - n).abs() > 1e-6 * n {
            return Err(Error::InvalidArgument(format!(
                "r_max = {} is not a whole number of cells of width {}",
                self.r_max, self.h
            )));
        }
        Ok(n as usize)
    }
}

/// Area of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

// Γ(k/2) for positive integers k.
fn gamma_half(k: usize) -> f64 {
    let mut g = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    while x < k as f64 / 2.0 - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Discretises a warped product on cells `[ih, (i+1)h]`.
///
/// Node `i` sits at `(i + 1/2) h` and carries the exact (3-point Gauss) shell
/// volume; consecutive nodes are joined through the face area `ω φ^{n-1}`
/// divided by `h`. The centre is Neumann-natural; the outermost node couples to
/// a zero ghost at `r_max` across half a cell.
pub fn build_radial(spec: &RadialSpec) -> Result<DiscreteManifold> {
    spec.warp.validate()?;
    let n_cells = spec.cell_count()?;
    let h = spec.h;
    let p = spec.dimension as f64 - 1.0;
    let omega = sphere_area(spec.dimension);
    let warp_at = |r: f64| -> Result<f64> {
        let v = spec.warp.eval(r);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::NonPositiveWarp { radius: r, value: v })
        }
    };

    let mut weights = Vec::with_capacity(n_cells);
    let mut radii = Vec::with_capacity(n_cells);
    for i in 0..n_cells {
        let mid = (i as f64 + 0.5) * h;
        let mut acc = 0.0;
        for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            acc += w * warp_at(mid + 0.5 * h * x)?.powf(p);
        }
        weights.push(omega * 0.5 * h * acc);
        radii.push(mid);
    }
    let mut edges = Vec::with_capacity(n_cells - 1);
    for i in 0..n_cells - 1 {
        let face = (i + 1) as f64 * h;
        edges.push(Edge {
            i,
            j: i + 1,
            conductance: omega * warp_at(face)?.powf(p) / h,
            length: h,
        });
    }
    let mut boundary = vec![0.0; n_cells];
    boundary[n_cells - 1] = omega * warp_at(n_cells as f64 * h)?.powf(p) / (0.5 * h);

    DiscreteManifold::new(
        weights,
        edges,
        Some(boundary),
        spec.dimension,
        0,
        Some(radii.clone()),
        Some(radii),
        Layout::Radial { h, r_max: n_cells as f64 * h },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(2), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_area(4), 2.0 * PI * PI, epsilon = 1e-13);
    }

    #[test]
    fn flat_plane_reproduces_annulus_areas() {
        let m = build_radial(&RadialSpec::flat(2, 4.0, 0.5)).unwrap();
        assert_eq!(m.node_count(), 8);
        assert_relative_eq!(m.node_distances()[0], 0.25);
        assert_relative_eq!(m.volume_weights()[0], PI * 0.25, epsilon = 1e-14);
        assert_relative_eq!(m.volume_weights()[1], PI * 0.75, epsilon = 1e-14);
        assert_relative_eq!(m.total_volume(), PI * 16.0, epsilon = 1e-12);
    }

    #[test]
    fn cylinder_weights_are_equal() {
        let spec = RadialSpec { dimension: 2, warp: Warp::Constant { value: 1.0 }, r_max: 2.0, h: 0.1 };
        let m = build_radial(&spec).unwrap();
        for w in m.volume_weights() {
            assert_relative_eq!(*w, 2.0 * PI * 0.1, epsilon = 1e-13);
        }
    }

    #[test]
    fn conductances_and_ghost() {
        let m = build_radial(&RadialSpec::flat(2, 1.0, 0.125)).unwrap();
        let e = m.edges()[0];
        assert_relative_eq!(e.conductance, 2.0 * PI * 0.125 / 0.125);
        let b = m.boundary_conductance();
        assert_relative_eq!(b[7], 2.0 * PI * 1.0 / 0.0625);
        assert!(b[..7].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn negative_warp_is_rejected_with_radius() {
        let spec = RadialSpec {
            dimension: 2,
            warp: Warp::Tabulated { r: vec![0.0, 1.0, 2.0], phi: vec![1.0, 1.0, -1.0] },
            r_max: 2.0,
            h: 0.25,
        };
        match build_radial(&spec) {
            Err(Error::NonPositiveWarp { radius, .. }) => assert!(radius > 1.0 && radius <= 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_coarse_or_misaligned_grids() {
        assert!(build_radial(&RadialSpec::flat(2, 1.0, 0.5)).is_err());
        assert!(build_radial(&RadialSpec::flat(2, 1.0, 0.3)).is_err());
        assert!(build_radial(&RadialSpec::flat(1, 1.0, 0.1)).is_err());
    }

    #[test]
    fn tabulated_interpolation() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [1.0, 2.0, 0.0];
        assert_eq!(interpolate(&xs, &ys, -1.0), 1.0);
        assert_eq!(interpolate(&xs, &ys, 0.5), 1.5);
        assert_eq!(interpolate(&xs, &ys, 2.0), 1.0);
        assert_eq!(interpolate(&xs, &ys, 5.0), 0.0);
    }
}
