//! Discrete variational laboratory for the λ-, μ- and d-constants of
//! Schrödinger-type functionals `∫ 4|∇u|² + V u²` on weighted graphs and
//! warped-product radial grids.

pub mod catalog;
pub mod ccdiag;
pub mod cli;
pub mod eigen;
pub mod entropy;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod linalg;

pub use error::{Error, Result};
pub use geometry::{DiscreteManifold, NodeField, Region, RegionKind};
