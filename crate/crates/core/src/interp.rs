//! Multilinear interpolants on the unit cell.
//!
//! A cell is described by its corner values. Corner `i` sits at the point whose
//! coordinate along axis `k` is bit `k` of `i`, so in 2D the order is
//! `phi00, phi10, phi01, phi11` and in 3D `phi000, phi100, phi010, phi110, ...`.
//!
//! Besides evaluation, this module selects the local frame used by the closed
//! forms: an origin corner, an axis relabeling and the coefficients of the
//! interface written as a rational graph over the relabeled axes.

use crate::error::{Error, Result};

/// Smallest intersection length handed to the integrators.
pub const LENGTH_FLOOR: f64 = 1e-14;

/// Sign convention used by every sign test: zero counts as positive.
#[inline]
pub fn is_positive(v: f64) -> bool {
    v >= 0.0
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a * (1.0 - t) + b * t
}

/// Corner values of a unit cell in any supported dimension.
pub trait Cell: Copy + std::fmt::Debug + Send + Sync + 'static {
    const DIM: usize;
    const CORNERS: usize;

    fn values(&self) -> &[f64];

    fn from_fn(f: impl FnMut(usize) -> f64) -> Self;

    /// Evaluates the interpolant in Lagrange form. Exact at the corners.
    fn eval(&self, p: &[f64]) -> f64;

    fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let v = self.values();
        Self::from_fn(|i| f(v[i]))
    }

    fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    /// True when all corners share one sign.
    fn uniform_sign(&self) -> Option<bool> {
        let v = self.values();
        let s = is_positive(v[0]);
        v.iter().all(|&x| is_positive(x) == s).then_some(s)
    }

    /// The child cell of a dyadic split. Bit `k` of `which` selects the upper
    /// half along axis `k`; child corners are the parent interpolant sampled
    /// at the child's corners.
    fn child(&self, which: usize) -> Self {
        let mut p = [0.0; 3];
        Self::from_fn(|c| {
            for (k, pk) in p.iter_mut().enumerate().take(Self::DIM) {
                *pk = (((which >> k) & 1) + ((c >> k) & 1)) as f64 * 0.5;
            }
            self.eval(&p[..Self::DIM])
        })
    }

    /// Relabels axes: new axis `j` is old axis `axes[j]`.
    fn permute(&self, axes: &[usize]) -> Self {
        let v = self.values();
        Self::from_fn(|c| {
            let mut old = 0;
            for (j, &a) in axes.iter().enumerate() {
                old |= ((c >> j) & 1) << a;
            }
            v[old]
        })
    }

    /// Mirrors the cell along every axis whose bit is set in `mask`.
    fn reflect(&self, mask: usize) -> Self {
        let v = self.values();
        Self::from_fn(|c| v[c ^ mask])
    }
}

/// Corner values of a unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellCorners2D {
    pub values: [f64; 4],
}

impl CellCorners2D {
    pub fn new(phi00: f64, phi10: f64, phi01: f64, phi11: f64) -> Self {
        Self {
            values: [phi00, phi10, phi01, phi11],
        }
    }

    pub fn phi(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix | (iy << 1)]
    }
}

impl Cell for CellCorners2D {
    const DIM: usize = 2;
    const CORNERS: usize = 4;

    fn values(&self) -> &[f64] {
        &self.values
    }

    fn from_fn(mut f: impl FnMut(usize) -> f64) -> Self {
        Self {
            values: [f(0), f(1), f(2), f(3)],
        }
    }

    fn eval(&self, p: &[f64]) -> f64 {
        let v = &self.values;
        let lo = lerp(v[0], v[1], p[0]);
        let hi = lerp(v[2], v[3], p[0]);
        lerp(lo, hi, p[1])
    }
}

/// Corner values of a unit cube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellCorners3D {
    pub values: [f64; 8],
}

impl CellCorners3D {
    pub fn new(values: [f64; 8]) -> Self {
        Self { values }
    }

    pub fn phi(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        self.values[ix | (iy << 1) | (iz << 2)]
    }
}

impl Cell for CellCorners3D {
    const DIM: usize = 3;
    const CORNERS: usize = 8;

    fn values(&self) -> &[f64] {
        &self.values
    }

    fn from_fn(mut f: impl FnMut(usize) -> f64) -> Self {
        Self {
            values: [f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7)],
        }
    }

    fn eval(&self, p: &[f64]) -> f64 {
        let v = &self.values;
        let y0 = lerp(lerp(v[0], v[1], p[0]), lerp(v[2], v[3], p[0]), p[1]);
        let y1 = lerp(lerp(v[4], v[5], p[0]), lerp(v[6], v[7], p[0]), p[1]);
        lerp(y0, y1, p[2])
    }
}

/// `phi(x, y) = b0 + b1 x + b2 y + b3 x y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BilinearCoeffs {
    pub beta: [f64; 4],
}

/// `phi = b0 + b1 x + b2 y + b3 z + b4 xy + b5 yz + b6 xz + b7 xyz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrilinearCoeffs {
    pub beta: [f64; 8],
}

pub fn bilinear_coeffs(cell: &CellCorners2D) -> BilinearCoeffs {
    let [p00, p10, p01, p11] = cell.values;
    BilinearCoeffs {
        beta: [p00, p10 - p00, p01 - p00, p00 + p11 - p01 - p10],
    }
}

pub fn trilinear_coeffs(cell: &CellCorners3D) -> TrilinearCoeffs {
    let [p000, p100, p010, p110, p001, p101, p011, p111] = cell.values;
    TrilinearCoeffs {
        beta: [
            p000,
            p100 - p000,
            p010 - p000,
            p001 - p000,
            p110 - p100 - p010 + p000,
            p011 - p010 - p001 + p000,
            p101 - p100 - p001 + p000,
            p111 - p110 - p101 + p100 - p011 + p010 + p001 - p000,
        ],
    }
}

impl BilinearCoeffs {
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let [b0, b1, b2, b3] = self.beta;
        let [x, y] = p;
        b0 + b1 * x + b2 * y + b3 * x * y
    }

    /// Coefficient of the monomial whose variables are the set bits of `mask`.
    pub fn monomial(&self, mask: usize) -> f64 {
        self.beta[mask]
    }
}

impl TrilinearCoeffs {
    pub fn eval(&self, p: [f64; 3]) -> f64 {
        let b = &self.beta;
        let [x, y, z] = p;
        b[0] + b[1] * x
            + b[2] * y
            + b[3] * z
            + b[4] * x * y
            + b[5] * y * z
            + b[6] * x * z
            + b[7] * x * y * z
    }

    /// Coefficient of the monomial whose variables are the set bits of `mask`
    /// (bit 0 = x, bit 1 = y, bit 2 = z).
    pub fn monomial(&self, mask: usize) -> f64 {
        const SLOT: [usize; 8] = [0, 1, 2, 4, 3, 6, 5, 7];
        self.beta[SLOT[mask]]
    }
}

/// A corner of the unit cell; bit `k` is the coordinate along axis `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CornerIndex(pub usize);

impl CornerIndex {
    pub fn coord(self, axis: usize) -> usize {
        (self.0 >> axis) & 1
    }

    fn lex_key(self, dim: usize) -> [usize; 3] {
        let mut k = [0; 3];
        for (a, slot) in k.iter_mut().enumerate().take(dim) {
            *slot = self.coord(a);
        }
        k
    }
}

/// Picks the corner with the most edge neighbours of opposite sign.
///
/// Ties go to the lexicographically smallest `(i_x, i_y[, i_z])`.
pub fn select_origin<C: Cell>(cell: &C) -> Result<CornerIndex> {
    let v = cell.values();
    let mut best: Option<(usize, CornerIndex)> = None;
    for i in 0..C::CORNERS {
        let count = (0..C::DIM)
            .filter(|&k| is_positive(v[i]) != is_positive(v[i ^ (1 << k)]))
            .count();
        let cand = CornerIndex(i);
        best = match best {
            None => Some((count, cand)),
            Some((bc, bi)) => {
                if count > bc || (count == bc && cand.lex_key(C::DIM) < bi.lex_key(C::DIM)) {
                    Some((count, cand))
                } else {
                    Some((bc, bi))
                }
            }
        };
    }
    match best {
        Some((count, idx)) if count > 0 => Ok(idx),
        _ => Err(Error::NoInterface),
    }
}

fn edge_length(v_origin: f64, v_far: f64, root: impl FnOnce() -> f64, origin_coord: usize) -> Result<f64> {
    if v_origin == 0.0 && v_far == 0.0 {
        return Err(Error::DegenerateEdge);
    }
    if is_positive(v_origin) == is_positive(v_far) {
        return Ok(1.0);
    }
    let r = root();
    if !r.is_finite() {
        return Err(Error::DegenerateEdge);
    }
    Ok((r - origin_coord as f64).abs().clamp(LENGTH_FLOOR, 1.0))
}

/// Distances from the origin corner to the interface along the two edges
/// leaving it, or 1 where that edge has no sign change.
pub fn edge_lengths_2d(coeffs: &BilinearCoeffs, origin: CornerIndex) -> Result<[f64; 2]> {
    let [b0, b1, b2, b3] = coeffs.beta;
    let (ix, iy) = (origin.coord(0), origin.coord(1));
    let (fx, fy) = (ix as f64, iy as f64);
    let at = |x: usize, y: usize| coeffs.eval([x as f64, y as f64]);
    let lx = edge_length(at(ix, iy), at(1 - ix, iy), || -(b2 * fy + b0) / (b3 * fy + b1), ix)?;
    let ly = edge_length(at(ix, iy), at(ix, 1 - iy), || -(b1 * fx + b0) / (b3 * fx + b2), iy)?;
    Ok([lx, ly])
}

/// Three-dimensional counterpart of [`edge_lengths_2d`].
pub fn edge_lengths_3d(coeffs: &TrilinearCoeffs, origin: CornerIndex) -> Result<[f64; 3]> {
    let b = &coeffs.beta;
    let (ix, iy, iz) = (origin.coord(0), origin.coord(1), origin.coord(2));
    let (fx, fy, fz) = (ix as f64, iy as f64, iz as f64);
    let at = |x: usize, y: usize, z: usize| coeffs.eval([x as f64, y as f64, z as f64]);
    let o = at(ix, iy, iz);
    let lx = edge_length(
        o,
        at(1 - ix, iy, iz),
        || -((b[5] * fy + b[3]) * fz + b[2] * fy + b[0]) / ((b[7] * fy + b[6]) * fz + b[4] * fy + b[1]),
        ix,
    )?;
    let ly = edge_length(
        o,
        at(ix, 1 - iy, iz),
        || -((b[6] * fx + b[3]) * fz + b[1] * fx + b[0]) / ((b[7] * fx + b[5]) * fz + b[4] * fx + b[2]),
        iy,
    )?;
    let lz = edge_length(
        o,
        at(ix, iy, 1 - iz),
        || -((b[4] * fx + b[2]) * fy + b[1] * fx + b[0]) / ((b[7] * fx + b[5]) * fy + b[6] * fx + b[3]),
        iz,
    )?;
    Ok([lx, ly, lz])
}

/// Origin, axis relabeling and intersection lengths of a cell.
///
/// `axes[j]` is the original axis used as local axis `j`: in 2D the local
/// axes are `(eta, zeta)`, in 3D `(xi, eta, zeta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalFrame<const N: usize> {
    pub origin: CornerIndex,
    pub axes: [usize; N],
    pub lengths: [f64; N],
}

pub type LocalFrame2D = LocalFrame<2>;
pub type LocalFrame3D = LocalFrame<3>;

impl<const N: usize> LocalFrame<N> {
    /// Origin coordinate along local axis `j`.
    pub fn origin_local(&self, j: usize) -> usize {
        self.origin.coord(self.axes[j])
    }
}

/// `zeta(eta) = (-a eta - b) / (c eta + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalCoeffs2D {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RationalCoeffs2D {
    /// Coefficients for the cell relabeled so that local axis 0 is `eta`.
    pub fn from_local_cell(cell: &CellCorners2D) -> Self {
        let [b0, b1, b2, b3] = bilinear_coeffs(cell).beta;
        Self {
            a: b1,
            b: b0,
            c: b3,
            d: b2,
        }
    }

    pub fn zeta(&self, eta: f64) -> f64 {
        (-self.a * eta - self.b) / (self.c * eta + self.d)
    }

    pub fn scale(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }
}

/// `zeta(xi, eta) = (-xi (a eta + b) - c eta - d) / (xi (e eta + f) + g eta + h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalCoeffs3D {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

impl RationalCoeffs3D {
    /// Coefficients for the cell relabeled so that local axes are `(xi, eta, zeta)`.
    pub fn from_local_cell(cell: &CellCorners3D) -> Self {
        let t = trilinear_coeffs(cell);
        Self {
            a: t.monomial(0b011),
            b: t.monomial(0b001),
            c: t.monomial(0b010),
            d: t.monomial(0b000),
            e: t.monomial(0b111),
            f: t.monomial(0b101),
            g: t.monomial(0b110),
            h: t.monomial(0b100),
        }
    }

    pub fn numerator(&self, xi: f64, eta: f64) -> f64 {
        xi * (self.a * eta + self.b) + self.c * eta + self.d
    }

    pub fn denominator(&self, xi: f64, eta: f64) -> f64 {
        xi * (self.e * eta + self.f) + self.g * eta + self.h
    }

    pub fn zeta(&self, xi: f64, eta: f64) -> f64 {
        -self.numerator(xi, eta) / self.denominator(xi, eta)
    }
}

/// Stable ordering of axes by descending length; ties keep x, y, z order.
fn sort_axes<const N: usize>(lengths: &[f64; N]) -> [usize; N] {
    let mut axes = [0; N];
    for (j, a) in axes.iter_mut().enumerate() {
        *a = j;
    }
    axes.sort_by(|&p, &q| lengths[q].partial_cmp(&lengths[p]).unwrap_or(std::cmp::Ordering::Equal));
    axes
}

pub fn build_frame_2d(cell: &CellCorners2D) -> Result<(LocalFrame2D, RationalCoeffs2D)> {
    let origin = select_origin(cell)?;
    let lengths = edge_lengths_2d(&bilinear_coeffs(cell), origin)?;
    let axes = sort_axes(&lengths);
    let frame = LocalFrame { origin, axes, lengths };
    Ok((frame, RationalCoeffs2D::from_local_cell(&cell.permute(&axes))))
}

pub fn build_frame_3d(cell: &CellCorners3D) -> Result<(LocalFrame3D, RationalCoeffs3D)> {
    let origin = select_origin(cell)?;
    let lengths = edge_lengths_3d(&trilinear_coeffs(cell), origin)?;
    let axes = sort_axes(&lengths);
    let frame = LocalFrame { origin, axes, lengths };
    Ok((frame, RationalCoeffs3D::from_local_cell(&cell.permute(&axes))))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER_CELL: CellCorners2D = CellCorners2D {
        values: [0.1, 0.6, -0.3, -0.1],
    };

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bilinear_examples() {
        let b = bilinear_coeffs(&PAPER_CELL).beta;
        for (x, y) in b.iter().zip([0.1, 0.5, -0.4, -0.3]) {
            assert!(close(*x, y, 1e-15));
        }
        assert_eq!(bilinear_coeffs(&CellCorners2D::new(1., 1., 1., 1.)).beta, [1., 0., 0., 0.]);
        assert_eq!(bilinear_coeffs(&CellCorners2D::new(0., 1., 2., 3.)).beta, [0., 1., 2., 0.]);
    }

    #[test]
    fn trilinear_examples() {
        let c = CellCorners3D::new([2.5; 8]);
        assert_eq!(trilinear_coeffs(&c).beta, [2.5, 0., 0., 0., 0., 0., 0., 0.]);
        let x = CellCorners3D::from_fn(|i| (i & 1) as f64);
        assert_eq!(trilinear_coeffs(&x).beta, [0., 1., 0., 0., 0., 0., 0., 0.]);
    }

    #[test]
    fn eval_corners_and_center() {
        let b = BilinearCoeffs {
            beta: [0.1, 0.5, -0.4, -0.3],
        };
        assert_eq!(b.eval([0., 0.]), 0.1);
        assert!(close(b.eval([1., 1.]), -0.1, 1e-15));
        let one = CellCorners2D::new(1., 1., 1., 1.);
        assert_eq!(one.eval(&[0.5, 0.5]), 1.0);
    }

    #[test]
    fn origin_examples() {
        assert_eq!(select_origin(&PAPER_CELL).unwrap(), CornerIndex(0));
        assert_eq!(select_origin(&CellCorners2D::new(-1., 1., 1., 1.)).unwrap(), CornerIndex(0));
        let mut v = [1.0; 8];
        v[7] = -1.0;
        assert_eq!(select_origin(&CellCorners3D::new(v)).unwrap(), CornerIndex(7));
        assert!(matches!(
            select_origin(&CellCorners2D::new(1., 2., 3., 4.)),
            Err(Error::NoInterface)
        ));
    }

    #[test]
    fn lengths_examples() {
        let b = BilinearCoeffs {
            beta: [0.1, 0.5, -0.4, -0.3],
        };
        let l = edge_lengths_2d(&b, CornerIndex(0)).unwrap();
        assert_eq!(l[0], 1.0);
        assert!(close(l[1], 0.25, 1e-15));

        let half = bilinear_coeffs(&CellCorners2D::new(0.5, 0.5, -0.5, -0.5));
        assert_eq!(edge_lengths_2d(&half, CornerIndex(0)).unwrap(), [1.0, 0.5]);

        let plane = CellCorners3D::from_fn(|i| 0.5 - ((i >> 2) & 1) as f64);
        let l = edge_lengths_3d(&trilinear_coeffs(&plane), CornerIndex(0)).unwrap();
        assert_eq!(l, [1.0, 1.0, 0.5]);

        let pos = CellCorners3D::new([1.0; 8]);
        assert_eq!(edge_lengths_3d(&trilinear_coeffs(&pos), CornerIndex(0)).unwrap(), [1.0; 3]);

        let zero_edge = bilinear_coeffs(&CellCorners2D::new(0., 0., 1., -1.));
        assert!(matches!(edge_lengths_2d(&zero_edge, CornerIndex(0)), Err(Error::DegenerateEdge)));
    }

    #[test]
    fn worked_frame() {
        let (frame, rc) = build_frame_2d(&PAPER_CELL).unwrap();
        assert_eq!(frame.origin, CornerIndex(0));
        assert_eq!(frame.axes, [0, 1]);
        assert!(close(rc.a, 0.5, 1e-15) && close(rc.b, 0.1, 1e-15));
        assert!(close(rc.c, -0.3, 1e-15) && close(rc.d, -0.4, 1e-15));
        for k in 0..=10 {
            let eta = k as f64 / 10.0;
            assert!(close(rc.zeta(eta), (5.0 * eta + 1.0) / (3.0 * eta + 4.0), 1e-15));
        }
    }

    #[test]
    fn flat_frame() {
        let (frame, rc) = build_frame_2d(&CellCorners2D::new(0.5, 0.5, -0.5, -0.5)).unwrap();
        assert_eq!(frame.axes, [0, 1]);
        assert_eq!(rc.zeta(0.3), 0.5);
    }

    #[test]
    fn child_of_paper_cell() {
        let c = PAPER_CELL.child(0);
        let expect = [0.1, 0.35, -0.1, 0.075];
        for (a, b) in c.values.iter().zip(expect) {
            assert!(close(*a, b, 1e-16));
        }
    }

    #[test]
    fn permute_and_reflect_are_relabelings() {
        let c = CellCorners3D::from_fn(|i| i as f64 * 1.5 - 3.0);
        let p = c.permute(&[2, 0, 1]);
        // local (xi, eta, zeta) = (z, x, y)
        assert!(close(p.eval(&[0.2, 0.3, 0.7]), c.eval(&[0.3, 0.7, 0.2]), 1e-14));
        let r = c.reflect(0b101);
        assert!(close(r.eval(&[0.25, 0.5, 0.125]), c.eval(&[0.75, 0.5, 0.875]), 1e-14));
    }
}
