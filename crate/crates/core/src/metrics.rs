//! Totals, refinement-consistency norms and convergence fits.

use crate::error::{Error, Result};
use crate::grid::ScalarGrid;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub resolutions: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_order: f64,
}

/// `Σ α · h^dim`.
pub fn total_volume(grid: &ScalarGrid, fractions: &[f64]) -> Result<f64> {
    let expected = grid.cell_count();
    if fractions.len() != expected {
        return Err(Error::ShapeMismatch { expected, actual: fractions.len() });
    }
    Ok(fractions.iter().sum::<f64>() * grid.h().powi(grid.dim() as i32))
}

/// Mean of each coarse cell's `2^(dim·levels)` descendants.
/// `fine_cells` are the per-axis cell counts of the fine grid.
pub fn aggregate_fine_to_coarse(fine: &[f64], fine_cells: &[usize], levels: u32) -> Result<Vec<f64>> {
    let expected: usize = fine_cells.iter().product();
    if fine.len() != expected {
        return Err(Error::ShapeMismatch { expected, actual: fine.len() });
    }
    let step = 1usize << levels;
    if fine_cells.iter().any(|&n| n % step != 0 || n == 0) {
        return Err(Error::IncompatibleLevels { levels });
    }
    let mut fc = [1usize; 3];
    fc[..fine_cells.len()].copy_from_slice(fine_cells);
    let steps: Vec<usize> = (0..3).map(|k| if k < fine_cells.len() { step } else { 1 }).collect();
    let cc: Vec<usize> = (0..3).map(|k| fc[k] / steps[k]).collect();
    let per = (steps[0] * steps[1] * steps[2]) as f64;
    let mut out = Vec::with_capacity(cc.iter().product());
    for k in 0..cc[2] {
        for j in 0..cc[1] {
            for i in 0..cc[0] {
                let mut s = 0.0;
                for dk in 0..steps[2] {
                    for dj in 0..steps[1] {
                        for di in 0..steps[0] {
                            let (x, y, z) = (i * steps[0] + di, j * steps[1] + dj, k * steps[2] + dk);
                            s += fine[x + fc[0] * (y + fc[1] * z)];
                        }
                    }
                }
                out.push(s / per);
            }
        }
    }
    Ok(out)
}

/// `L1 = Σ|αℓ−α0| / Σαℓ`, `L2 = sqrt(Σ|αℓ−α0|² / Σαℓ)`, `L∞ = max|αℓ−α0|`.
pub fn error_norms(coarse: &[f64], aggregated: &[f64]) -> Result<ErrorNorms> {
    if coarse.len() != aggregated.len() {
        return Err(Error::ShapeMismatch { expected: coarse.len(), actual: aggregated.len() });
    }
    let total: f64 = aggregated.iter().sum();
    if total == 0.0 {
        return Err(Error::DivideByZero);
    }
    let (mut s1, mut s2, mut linf) = (0.0, 0.0, 0.0_f64);
    for (a0, al) in coarse.iter().zip(aggregated) {
        let d = (al - a0).abs();
        s1 += d;
        s2 += d * d;
        linf = linf.max(d);
    }
    Ok(ErrorNorms { l1: s1 / total, l2: (s2 / total).sqrt(), linf })
}

/// Least-squares slope of `log(error)` against `log(h)`.
pub fn convergence_order(resolutions: &[f64], errors: &[f64]) -> Result<ConvergenceReport> {
    if resolutions.len() != errors.len() || resolutions.len() < 2 {
        return Err(Error::DegenerateFit);
    }
    if errors.iter().chain(resolutions).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit);
    }
    let x: Vec<f64> = resolutions.iter().map(|h| h.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(ConvergenceReport { resolutions: resolutions.to_vec(), errors: errors.to_vec(), fitted_order: sxy / sxx })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_grid_total() {
        let g = ScalarGrid::from_fn(2, 5, |_| 1.0).unwrap();
        assert_eq!(total_volume(&g, &[1.0; 16]).unwrap(), 1.0);
        assert!(matches!(total_volume(&g, &[1.0; 15]), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn aggregation() {
        let f = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
        assert_eq!(aggregate_fine_to_coarse(&f, &[4, 2], 0).unwrap(), f.to_vec());
        let a = aggregate_fine_to_coarse(&f, &[4, 2], 1).unwrap();
        assert_eq!(a.len(), 2);
        assert!((a[0] - (0.1 + 0.2 + 0.5 + 0.6) / 4.0).abs() < 1e-15);
        assert!(matches!(aggregate_fine_to_coarse(&f, &[4, 2], 2), Err(Error::IncompatibleLevels { levels: 2 })));
        let u = aggregate_fine_to_coarse(&[0.3; 64], &[4, 4, 4], 2).unwrap();
        assert!((u[0] - 0.3).abs() < 1e-15 && u.len() == 1);
    }

    #[test]
    fn norms() {
        let x = [0.5, 1.0, 0.25];
        assert_eq!(error_norms(&x, &x).unwrap(), ErrorNorms::default());
        let coarse = [1.0; 10];
        let mut agg = [1.0; 10];
        agg[3] = 1.1;
        agg[4] = 0.9;
        let n = error_norms(&coarse, &agg).unwrap();
        assert!((n.l1 - 0.02).abs() < 1e-15);
        assert!((n.linf - 0.1).abs() < 1e-15);
        assert!(matches!(error_norms(&[0.0], &[0.0]), Err(Error::DivideByZero)));
    }

    #[test]
    fn fitted_orders() {
        let r = convergence_order(&[0.1, 0.05], &[1e-2, 2.5e-3]).unwrap();
        assert!((r.fitted_order - 2.0).abs() < 1e-12);
        let r = convergence_order(&[0.1, 0.05], &[1e-2, 5e-3]).unwrap();
        assert!((r.fitted_order - 1.0).abs() < 1e-12);
        assert!(matches!(convergence_order(&[0.1], &[1e-2]), Err(Error::DegenerateFit)));
        assert!(matches!(convergence_order(&[0.1, 0.05], &[0.0, 1e-3]), Err(Error::DegenerateFit)));
    }
}
