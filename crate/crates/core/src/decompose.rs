//! Topology labels and the piecewise split used by the 3D integrator.

use crate::area2d::{prepare, ColumnFill};
use crate::error::{Error, Result};
use crate::interp::{build_frame_3d, is_positive, trilinear_coeffs, Cell, CellCorners3D, LocalFrame3D, RationalCoeffs3D};
use crate::oracle::certified_bounds;
use crate::volume3d::{cell_volume_3d, AuxTerms, EtaBound, IntegrationDomain};
use crate::VolumeFraction;

/// Relative magnitude below which a saddle value is not trusted for a sign decision.
pub const SADDLE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Empty,
    Full,
    /// One corner separated from the other seven.
    TypeI,
    /// Two corners sharing an edge separated from the other six.
    TypeII,
    /// One face separated from the opposite face.
    TypeIII,
    Composite,
    /// Connectivity depends on a saddle whose sign cannot be certified.
    Ambiguous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellTopology {
    pub kind: CellKind,
    /// Edges whose endpoints have different signs, as `(corner, corner)` pairs.
    pub crossing_edges: Vec<(usize, usize)>,
    /// Per face (`-x, +x, -y, +y, -z, +z`), the number of crossing edges.
    pub face_crossings: [u8; 6],
}

pub fn cube_edges() -> impl Iterator<Item = (usize, usize)> {
    (0..8usize).flat_map(|i| (0..3).filter(move |k| i >> k & 1 == 0).map(move |k| (i, i | 1 << k)))
}

fn face_corners(face: usize) -> [usize; 4] {
    let axis = face / 2;
    let side = face % 2;
    let mut out = [0; 4];
    let mut n = 0;
    for i in 0..8 {
        if (i >> axis) & 1 == side {
            out[n] = i;
            n += 1;
        }
    }
    out
}

/// Value of the bilinear face interpolant at its saddle, if the saddle lies inside the face.
fn face_saddle(v: [f64; 4]) -> Option<f64> {
    let [p00, p10, p01, p11] = v;
    let den = p00 + p11 - p01 - p10;
    if den == 0.0 {
        return None;
    }
    let s = (p00 - p01) / den;
    let t = (p00 - p10) / den;
    if s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0 {
        Some((p00 * p11 - p10 * p01) / den)
    } else {
        None
    }
}

/// Interior stationary points of the trilinear interpolant.
fn body_saddles(cell: &CellCorners3D) -> Vec<[f64; 3]> {
    let b = trilinear_coeffs(cell).beta;
    let (b1, b2, b3, b4, b5, b6, b7) = (b[1], b[2], b[3], b[4], b[5], b[6], b[7]);
    // With y fixed, d/dx = 0 and d/dz = 0 give z and x; d/dy = 0 is then a quadratic in y.
    let qa = b2 * b7 * b7 - b4 * b5 * b7;
    let qb = 2.0 * b2 * b6 * b7 - b4 * (b3 * b7 + b5 * b6) - b5 * (b1 * b7 + b4 * b6) + b7 * (b3 * b4 + b5 * b1);
    let qc = b2 * b6 * b6 - b4 * b3 * b6 - b5 * b1 * b6 + b7 * b3 * b1;
    let mut ys = Vec::new();
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    if scale == 0.0 {
        return vec![];
    }
    if qa.abs() <= 1e-14 * scale {
        if qb != 0.0 {
            ys.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            ys.push(q / qa);
            if q != 0.0 {
                ys.push(qc / q);
            }
        }
    }
    let inside = |t: f64| t > 0.0 && t < 1.0;
    ys.into_iter()
        .filter(|&y| inside(y))
        .filter_map(|y| {
            let den = b6 + b7 * y;
            if den == 0.0 {
                return None;
            }
            let z = -(b1 + b4 * y) / den;
            let x = -(b3 + b5 * y) / den;
            (inside(x) && inside(z)).then_some([x, y, z])
        })
        .collect()
}

/// Labels the cell by its corner signs and certifies face and body saddles.
pub fn classify(cell: &CellCorners3D) -> CellTopology {
    let v = cell.values;
    let crossing_edges: Vec<_> = cube_edges().filter(|&(i, j)| is_positive(v[i]) != is_positive(v[j])).collect();
    let mut face_crossings = [0u8; 6];
    for (face, count) in face_crossings.iter_mut().enumerate() {
        let fc = face_corners(face);
        *count = crossing_edges.iter().filter(|(i, j)| fc.contains(i) && fc.contains(j)).count() as u8;
    }
    let topo = |kind| CellTopology { kind, crossing_edges: crossing_edges.clone(), face_crossings };
    let positives = v.iter().filter(|&&x| is_positive(x)).count();
    if positives == 8 {
        return topo(CellKind::Full);
    }
    if positives == 0 {
        return topo(CellKind::Empty);
    }
    let scale = cell.max_abs();
    for (face, &crossings) in face_crossings.iter().enumerate() {
        if crossings == 4 {
            let fc = face_corners(face).map(|i| v[i]);
            match face_saddle(fc) {
                Some(s) if s.abs() > SADDLE_TOL * scale => {}
                _ => return topo(CellKind::Ambiguous),
            }
        }
    }
    for p in body_saddles(cell) {
        if cell.eval(&p).abs() <= SADDLE_TOL * scale {
            return topo(CellKind::Ambiguous);
        }
    }
    let minority_positive = positives <= 4;
    let minority: Vec<usize> = (0..8).filter(|&i| is_positive(v[i]) == minority_positive).collect();
    let kind = match minority.len() {
        1 => CellKind::TypeI,
        2 if (minority[0] ^ minority[1]).count_ones() == 1 => CellKind::TypeII,
        4 if (0..6).any(|f| face_corners(f) == [minority[0], minority[1], minority[2], minority[3]]) => CellKind::TypeIII,
        _ => CellKind::Composite,
    };
    topo(kind)
}

/// Pieces of a cell in its length-sorted local frame.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceList {
    pub frame: LocalFrame3D,
    pub coeffs: RationalCoeffs3D,
    pub pieces: Vec<IntegrationDomain>,
}

/// Splits a cell into elementary pieces in its length-sorted frame.
/// Uniform cells have no interface and are rejected.
pub fn split(cell: &CellCorners3D, topo: &CellTopology) -> Result<PieceList> {
    let cell = prepare(cell);
    if matches!(topo.kind, CellKind::Empty | CellKind::Full) {
        return Err(Error::NoInterface);
    }
    let (frame, coeffs) = build_frame_3d(&cell)?;
    let pieces = split_local(&cell.permute(&frame.axes));
    Ok(PieceList { frame, coeffs, pieces })
}

/// Splits a cell already expressed in local axes `(xi, eta, zeta)`.
///
/// `xi` is cut where the interface crosses the four `xi`-parallel edges and
/// where the two interface traces meet inside the cell. On each `xi` slab the
/// `eta` range is cut at the traces; empty pieces are dropped.
pub fn split_local(local: &CellCorners3D) -> Vec<IntegrationDomain> {
    let rc = RationalCoeffs3D::from_local_cell(local);
    let v = local.values;
    let mut cuts = vec![0.0, 1.0];
    for base in [0, 2, 4, 6] {
        let (p, q) = (v[base], v[base + 1]);
        if is_positive(p) != is_positive(q) {
            cuts.push((p / (p - q)).clamp(0.0, 1.0));
        }
    }
    let [t0, t1, t2, ..] = AuxTerms::new(&rc).t;
    for xi in real_roots(t0, t1, t2) {
        if xi > 0.0 && xi < 1.0 {
            let a = rc.a * xi + rc.c;
            let b = rc.b * xi + rc.d;
            if a != 0.0 && (0.0..=1.0).contains(&(-b / a)) {
                cuts.push(xi);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 <= x0 {
            continue;
        }
        let m = 0.5 * (x0 + x1);
        let a = rc.a * m + rc.c;
        let b = rc.b * m + rc.d;
        let c = rc.e * m + rc.g;
        let d = rc.f * m + rc.h;
        let mut etas = vec![(0.0, EtaBound::Zero), (1.0, EtaBound::One)];
        for (y, bound) in [(-b / a, EtaBound::Bottom), (-(b + d) / (a + c), EtaBound::Top)] {
            if y > 0.0 && y < 1.0 {
                etas.push((y, bound));
            }
        }
        etas.sort_by(|p, q| p.0.total_cmp(&q.0));
        for e in etas.windows(2) {
            let ym = 0.5 * (e[0].0 + e[1].0);
            let bottom = is_positive(a * ym + b);
            let top = is_positive((a + c) * ym + b + d);
            let fill = match (bottom, top) {
                (true, true) => ColumnFill::Full,
                (false, false) => continue,
                (true, false) => ColumnFill::Below,
                (false, true) => ColumnFill::Above,
            };
            out.push(IntegrationDomain { xi0: x0, xi1: x1, lower: e[0].1, upper: e[1].1, fill });
        }
    }
    out
}

fn real_roots(t0: f64, t1: f64, t2: f64) -> Vec<f64> {
    let scale = t0.abs().max(t1.abs()).max(t2.abs());
    if scale == 0.0 {
        return vec![];
    }
    if t0.abs() <= 1e-14 * scale {
        return if t1 != 0.0 { vec![-t2 / t1] } else { vec![] };
    }
    let disc = t1 * t1 - 4.0 * t0 * t2;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (t1 + t1.signum() * disc.sqrt());
    if q == 0.0 {
        vec![0.0]
    } else {
        vec![q / t0, t2 / q]
    }
}

/// Fraction of a cell with its uncertainty, subdividing ambiguous cells.
///
/// Non-ambiguous cells (and children) are integrated in closed form. An
/// ambiguous cell is split into eight children down to `max_depth`; an
/// ambiguous cell at the floor contributes the midpoint of its certified
/// bounds, and its uncertain volume is reported.
pub fn resolve_by_subdivision(cell: &CellCorners3D, max_depth: u32) -> Result<(VolumeFraction, f64)> {
    let (v, u) = resolve(cell, max_depth)?;
    Ok((VolumeFraction::new(v), u))
}

fn resolve(cell: &CellCorners3D, depth: u32) -> Result<(f64, f64)> {
    if classify(cell).kind != CellKind::Ambiguous {
        return Ok((cell_volume_3d(cell)?.get(), 0.0));
    }
    if depth == 0 {
        let (lo, hi) = certified_bounds(cell, 0);
        return Ok((0.5 * (lo + hi), hi - lo));
    }
    let mut v = 0.0;
    let mut u = 0.0;
    for k in 0..8 {
        let (cv, cu) = resolve(&cell.child(k), depth - 1)?;
        v += cv / 8.0;
        u += cu / 8.0;
    }
    Ok((v, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(bits: usize) -> CellCorners3D {
        CellCorners3D::from_fn(|i| {
            let mag = 1.0 + 0.07 * i as f64;
            if bits >> i & 1 == 1 {
                mag
            } else {
                -mag
            }
        })
    }

    #[test]
    fn all_sign_patterns_classify() {
        for bits in 0..256 {
            let t = classify(&pattern(bits));
            for f in t.face_crossings {
                assert_eq!(f % 2, 0);
            }
        }
    }

    #[test]
    fn elementary_labels() {
        assert_eq!(classify(&pattern(0b0000_0001)).kind, CellKind::TypeI);
        assert_eq!(classify(&pattern(0b1111_1110)).kind, CellKind::TypeI);
        assert_eq!(classify(&pattern(0b0000_0011)).kind, CellKind::TypeII);
        assert_eq!(classify(&pattern(0b0000_1111)).kind, CellKind::TypeIII);
        assert_eq!(classify(&pattern(0)).kind, CellKind::Empty);
        assert_eq!(classify(&pattern(255)).kind, CellKind::Full);
    }

    #[test]
    fn exact_face_saddle_is_ambiguous() {
        let c = CellCorners3D::from_fn(|i| if (i & 1) ^ (i >> 1 & 1) == 0 { 1.0 } else { -1.0 });
        assert_eq!(classify(&c).kind, CellKind::Ambiguous);
    }

    #[test]
    fn split_pieces_cover_the_phase() {
        let local = CellCorners3D::new([0.3, -0.7, 0.2, 0.9, -0.4, 0.5, -0.8, 0.6]);
        let pieces = split_local(&local);
        assert!(!pieces.is_empty());
        for p in &pieces {
            assert!(p.xi0 < p.xi1);
            assert_ne!(p.fill, ColumnFill::Empty);
        }
    }

    #[test]
    fn subdivision_on_unambiguous_cell_is_direct() {
        let c = pattern(1);
        let (v, u) = resolve_by_subdivision(&c, 3).unwrap();
        assert_eq!(u, 0.0);
        assert_eq!(v, cell_volume_3d(&c).unwrap());
    }

    #[test]
    fn subdivision_floor_reports_uncertainty() {
        let c = CellCorners3D::from_fn(|i| if (i & 1) ^ (i >> 1 & 1) == 0 { 1.0 } else { -1.0 });
        let (v, u) = resolve_by_subdivision(&c, 0).unwrap();
        assert_eq!(u, 1.0);
        assert_eq!(v.get(), 0.5);
    }
}
