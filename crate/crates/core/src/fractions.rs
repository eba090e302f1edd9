//! Per-cell fractions over a whole grid.

use rayon::prelude::*;

use crate::area2d::cell_area_2d;
use crate::decompose::resolve_by_subdivision;
use crate::grid::ScalarGrid;
use crate::interp::{CellCorners2D, CellCorners3D};
use crate::oracle::{certified_bounds, linear_baseline_2d, linear_baseline_3d};
use crate::volume3d::cell_volume_3d;

/// Subdivision depth used when the closed form cannot resolve a 2D cell.
pub const FALLBACK_DEPTH_2D: u32 = 20;
/// Subdivision depth used when the closed form cannot resolve a 3D cell.
pub const FALLBACK_DEPTH_3D: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Linear,
    /// Certified subdivision bounds; the reported fraction is their midpoint.
    Oracle { depth: u32 },
}

/// Fractions in row-major cell order (`x` fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct GridFractions {
    pub cells: Vec<usize>,
    pub alpha: Vec<f64>,
    /// Present for [`Method::Oracle`].
    pub bounds: Option<Vec<(f64, f64)>>,
    /// Cells the closed form could not handle, filled by subdivision instead.
    pub unresolved: Vec<usize>,
}

struct CellOut {
    alpha: f64,
    bounds: (f64, f64),
    unresolved: bool,
}

fn analytic_2d(c: &CellCorners2D) -> CellOut {
    match cell_area_2d(c) {
        Ok(a) => CellOut { alpha: a.get(), bounds: (a.get(), a.get()), unresolved: false },
        Err(_) => {
            let (lo, hi) = certified_bounds(c, FALLBACK_DEPTH_2D);
            CellOut { alpha: 0.5 * (lo + hi), bounds: (lo, hi), unresolved: true }
        }
    }
}

fn analytic_3d(c: &CellCorners3D) -> CellOut {
    match cell_volume_3d(c) {
        Ok(a) => CellOut { alpha: a.get(), bounds: (a.get(), a.get()), unresolved: false },
        Err(_) => {
            let (lo, hi) = certified_bounds(c, FALLBACK_DEPTH_3D);
            let alpha = resolve_by_subdivision(c, FALLBACK_DEPTH_3D).map_or(0.5 * (lo + hi), |(a, _)| a.get());
            CellOut { alpha, bounds: (lo, hi), unresolved: true }
        }
    }
}

fn eval_cell(grid: &ScalarGrid, index: usize, method: Method) -> CellOut {
    let [i, j, k] = grid.cell_index(index);
    let exact = |a: f64| CellOut { alpha: a, bounds: (a, a), unresolved: false };
    if grid.dim() == 2 {
        let c = grid.cell_2d(i, j);
        match method {
            Method::Analytic => analytic_2d(&c),
            Method::Linear => exact(linear_baseline_2d(&c).get()),
            Method::Oracle { depth } => {
                let (lo, hi) = certified_bounds(&c, depth);
                CellOut { alpha: 0.5 * (lo + hi), bounds: (lo, hi), unresolved: false }
            }
        }
    } else {
        let c = grid.cell_3d(i, j, k);
        match method {
            Method::Analytic => analytic_3d(&c),
            Method::Linear => exact(linear_baseline_3d(&c).get()),
            Method::Oracle { depth } => {
                let (lo, hi) = certified_bounds(&c, depth);
                CellOut { alpha: 0.5 * (lo + hi), bounds: (lo, hi), unresolved: false }
            }
        }
    }
}

/// Evaluates every cell in parallel. Output order does not depend on the thread count.
pub fn grid_fractions(grid: &ScalarGrid, method: Method) -> GridFractions {
    let out: Vec<CellOut> = (0..grid.cell_count()).into_par_iter().map(|c| eval_cell(grid, c, method)).collect();
    let unresolved = out.iter().enumerate().filter(|(_, o)| o.unresolved).map(|(n, _)| n).collect();
    let bounds = matches!(method, Method::Oracle { .. }).then(|| out.iter().map(|o| o.bounds).collect());
    GridFractions { cells: grid.cells(), alpha: out.iter().map(|o| o.alpha).collect(), bounds, unresolved }
}
