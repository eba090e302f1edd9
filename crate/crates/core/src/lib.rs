//! Exact volume fractions of regions bounded by multilinearly interpolated
//! level sets.
//!
//! Given node values of a level-set field on a uniform grid, every cell's
//! interface is the zero set of the bilinear (2D) or trilinear (3D)
//! interpolant of its corner values. This crate integrates the `phi >= 0`
//! part of each cell in closed form. Because refinement by the same
//! interpolation leaves the interface unchanged, fractions computed on a
//! refined grid sum back exactly to the coarse ones.
//!
//! ```
//! use cutvol::interp::CellCorners2D;
//! use cutvol::area2d::cell_area_2d;
//!
//! let alpha = cell_area_2d(&CellCorners2D::new(0.1, 0.6, -0.3, -0.1)).unwrap();
//! let exact = (17.0 * 4f64.ln() - 17.0 * 7f64.ln() + 15.0) / 9.0;
//! assert!((alpha.get() - exact).abs() < 1e-12);
//! ```

pub mod area2d;
pub mod decompose;
pub mod error;
pub mod fractions;
pub mod grid;
pub mod interp;
pub mod metrics;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod volume3d;

pub use error::{Error, Result};

/// Fraction of a cell's measure occupied by the `phi >= 0` phase.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct VolumeFraction(f64);

impl VolumeFraction {
    /// Clamps into `[0, 1]`.
    pub fn new(alpha: f64) -> Self {
        Self(alpha.clamp(0.0, 1.0))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cells-2d.md")]
    mod cells_2d {}
    #[doc = include_str!("../../../book/src/cells-3d.md")]
    mod cells_3d {}
    #[doc = include_str!("../../../book/src/refinement.md")]
    mod refinement {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/metrics-cli.md")]
    mod metrics_cli {}
}
