//! Closed-form area fraction of a bilinear cell.
//!
//! The cell is viewed in its local frame `(eta, zeta)`: for fixed `eta` the
//! interpolant is affine in `zeta`, so the part of the column where
//! `phi >= 0` is an interval whose length is `0`, `1`, `zeta(eta)` or
//! `1 - zeta(eta)`. The `eta` range is cut at the interface crossings of the
//! two edges parallel to `eta`; on each piece the column length has one of
//! those four forms and the rational profile is integrated in closed form.
//! Saddle cells need no special treatment: their two hyperbola branches end
//! up in different pieces, and the asymptote always falls inside a piece
//! whose columns are entirely full or empty.

use crate::error::{Error, Result};
use crate::interp::{build_frame_2d, is_positive, Cell, CellCorners2D, LocalFrame2D, RationalCoeffs2D};
use crate::VolumeFraction;

/// Relative size below which `c` is treated as zero.
pub const TAU_DEG: f64 = 1e-12;

/// `(ln(1 + r) - r) / r²`, accurate for small `r`.
pub(crate) fn log1p_remainder(r: f64) -> f64 {
    if r.abs() < 0.05 {
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 2..24 {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            sum += sign * pow / k as f64;
            pow *= r;
        }
        sum
    } else {
        (r.ln_1p() - r) / (r * r)
    }
}

/// Definite integral of the column length between `eta0` and `eta1`.
///
/// With `i_zeta = 0` this is `∫ zeta(eta) d eta` (the region between the
/// `zeta = 0` edge and the curve); with `i_zeta = 1` it is
/// `∫ (1 - zeta(eta)) d eta`. Evaluated as
/// `(1 - 2 i_zeta) [((ad - bc) ln|c eta + d|)/c² - a eta / c] + i_zeta (eta1 - eta0)`,
/// rearranged so that the `1/c` terms cancel analytically.
pub fn integrate_rational_2d(rc: &RationalCoeffs2D, eta0: f64, eta1: f64, i_zeta: u8) -> Result<f64> {
    let RationalCoeffs2D { a, b, c, d } = *rc;
    let width = eta1 - eta0;
    if width == 0.0 {
        return Ok(0.0);
    }
    let under = if c.abs() <= TAU_DEG * rc.scale() {
        if d == 0.0 {
            return Err(Error::PoleInRange { eta0, eta1 });
        }
        -(a * 0.5 * (eta0 + eta1) + b) * width / d
    } else if (a * d - b * c).abs() <= TAU_DEG * rc.scale() * rc.scale() {
        // numerator and denominator share their root: zeta is the constant -a/c
        -a / c * width
    } else {
        let u0 = c * eta0 + d;
        let u1 = c * eta1 + d;
        if u0 == 0.0 || u1 == 0.0 || (u0 < 0.0) != (u1 < 0.0) {
            return Err(Error::PoleInRange { eta0, eta1 });
        }
        let s = width / u0;
        -s * (a * eta0 + b) + (a * d - b * c) * s * s * log1p_remainder(c * s)
    };
    let iz = f64::from(i_zeta);
    Ok((1.0 - 2.0 * iz) * under + iz * width)
}

/// How the columns of one `eta` piece are filled by the `phi >= 0` phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnFill {
    Empty,
    Full,
    /// Between the `zeta = 0` edge and the curve.
    Below,
    /// Between the curve and the `zeta = 1` edge.
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece2D {
    pub eta0: f64,
    pub eta1: f64,
    pub fill: ColumnFill,
}

/// Replaces exact zeros by a tiny positive value and rescales to unit max norm.
pub(crate) fn prepare<C: Cell>(cell: &C) -> C {
    let m = cell.max_abs();
    let bump = 1e-14 * if m > 0.0 { m } else { 1.0 };
    let c = cell.map(|v| if v == 0.0 { bump } else { v });
    let m = c.max_abs();
    c.map(|v| v / m)
}

/// Splits the `eta` range of a cell already expressed in its local frame.
pub fn pieces_2d(local: &CellCorners2D) -> Vec<Piece2D> {
    let rc = RationalCoeffs2D::from_local_cell(local);
    let v = local.values;
    let mut cuts = vec![0.0, 1.0];
    // edge zeta = 0: phi = a eta + b
    if is_positive(v[0]) != is_positive(v[1]) {
        cuts.push((-rc.b / rc.a).clamp(0.0, 1.0));
    }
    // edge zeta = 1: phi = (a + c) eta + (b + d)
    if is_positive(v[2]) != is_positive(v[3]) {
        cuts.push((-(rc.b + rc.d) / (rc.a + rc.c)).clamp(0.0, 1.0));
    }
    cuts.sort_by(|p, q| p.total_cmp(q));
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            let bottom = is_positive(rc.a * m + rc.b);
            let top = is_positive((rc.a + rc.c) * m + rc.b + rc.d);
            let fill = match (bottom, top) {
                (true, true) => ColumnFill::Full,
                (false, false) => ColumnFill::Empty,
                (true, false) => ColumnFill::Below,
                (false, true) => ColumnFill::Above,
            };
            Piece2D {
                eta0: w[0],
                eta1: w[1],
                fill,
            }
        })
        .collect()
}

/// Area of one piece in the local frame.
pub fn piece_area(rc: &RationalCoeffs2D, piece: &Piece2D) -> Result<f64> {
    let w = piece.eta1 - piece.eta0;
    match piece.fill {
        ColumnFill::Empty => Ok(0.0),
        ColumnFill::Full => Ok(w),
        ColumnFill::Below => integrate_rational_2d(rc, piece.eta0, piece.eta1, 0),
        ColumnFill::Above => integrate_rational_2d(rc, piece.eta0, piece.eta1, 1),
    }
}

/// Fraction of the unit square where the bilinear interpolant is `>= 0`.
pub fn cell_area_2d(cell: &CellCorners2D) -> Result<VolumeFraction> {
    if !cell.is_finite() {
        return Err(Error::InvalidArgument("non-finite corner value".into()));
    }
    let cell = prepare(cell);
    if let Some(positive) = cell.uniform_sign() {
        return Ok(VolumeFraction::new(if positive { 1.0 } else { 0.0 }));
    }
    let (frame, _) = build_frame_2d(&cell).map_err(|_| Error::Unresolved)?;
    area_in_frame(&cell, &frame)
}

pub(crate) fn area_in_frame(cell: &CellCorners2D, frame: &LocalFrame2D) -> Result<VolumeFraction> {
    let local = cell.permute(&frame.axes);
    let rc = RationalCoeffs2D::from_local_cell(&local);
    let mut total = 0.0;
    for p in pieces_2d(&local) {
        total += piece_area(&rc, &p)?;
    }
    Ok(VolumeFraction::new(total))
}
