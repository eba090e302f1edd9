//! Closed-form volume fraction of a trilinear cell.
//!
//! In the local frame `(xi, eta, zeta)` the interpolant is affine in `zeta`:
//! `phi = P(xi, eta) + zeta Q(xi, eta)` with `P = A eta + B`, `Q = C eta + D`
//! and `A, B, C, D` linear in `xi`. For fixed `(xi, eta)` the `phi >= 0` part
//! of the `zeta` column is empty, full, `[0, zeta]` or `[zeta, 1]`. The cell
//! is cut into pieces (see [`crate::decompose`]) on which the column type is
//! constant and the `eta` limits are `0`, `1`, or one of the two interface
//! traces `eta = -B/A` (on `zeta = 0`) and `eta = -(B + D)/(A + C)` (on
//! `zeta = 1`). The inner `eta` integral is a rational function plus
//! `Xi1 / C² ln|..|` terms, and the outer `xi` integral is evaluated with
//! logarithms and dilogarithms.

pub mod primitives;

use crate::area2d::{integrate_rational_2d, prepare, ColumnFill};
use crate::decompose::split_local;
use crate::error::{Error, Result};
use crate::interp::{build_frame_3d, Cell, CellCorners3D, RationalCoeffs2D, RationalCoeffs3D};
use crate::quadrature;
use crate::VolumeFraction;

use primitives::{integrate_pf, integrate_pf_log, partial_fractions, split_log, Accum, Lin, LogArg, Poly, Rat};

/// Absolute error accepted from the closed form before other frames are tried.
pub const CLOSED_FORM_TOL: f64 = 1e-12;
/// `e` and `g` below this are treated as an identically zero `C`.
const C_ZERO_TOL: f64 = 1e-13;

/// Auxiliary coefficients `t0..t6` of the outer integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxTerms {
    pub t: [f64; 7],
}

impl AuxTerms {
    pub fn new(rc: &RationalCoeffs3D) -> Self {
        let RationalCoeffs3D { a, b, c, d, e, f, g, h } = *rc;
        let t0 = a * f - b * e;
        let t1 = a * h - b * g + c * f - d * e;
        let t2 = c * h - d * g;
        let t3 = e * e * t2 - e * g * t1 + g * g * t0;
        let t4 = e * h - f * g;
        let t5 = c * e - a * g;
        let t6 = e * t1 - 2.0 * g * t0;
        Self { t: [t0, t1, t2, t3, t4, t5, t6] }
    }

    /// `[Xi0, Xi1, Xi2, Xi3, Xi4]` at `xi`:
    /// `e xi + g`, `t0 xi² + t1 xi + t2`, `t1 + 2 t0 xi`, `f xi + h`, `a xi + c`.
    pub fn xi_terms(&self, rc: &RationalCoeffs3D, xi: f64) -> [f64; 5] {
        let [t0, t1, t2, ..] = self.t;
        [
            rc.e * xi + rc.g,
            (t0 * xi + t1) * xi + t2,
            t1 + 2.0 * t0 * xi,
            rc.f * xi + rc.h,
            rc.a * xi + rc.c,
        ]
    }
}

/// Lower or upper `eta` limit of a piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EtaBound {
    Zero,
    One,
    /// Interface trace on the `zeta = 0` face.
    Bottom,
    /// Interface trace on the `zeta = 1` face.
    Top,
}

/// One piece of the local cell: `xi0 < xi < xi1`, `lower(xi) < eta < upper(xi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationDomain {
    pub xi0: f64,
    pub xi1: f64,
    pub lower: EtaBound,
    pub upper: EtaBound,
    pub fill: ColumnFill,
}

impl IntegrationDomain {
    /// `1` when the phase lies between the interface and the `zeta = 1` face.
    pub fn i_zeta(&self) -> u8 {
        u8::from(self.fill == ColumnFill::Above)
    }

    /// `1` when the piece runs from an interface trace up to `eta = 1`.
    pub fn i_eta(&self) -> u8 {
        u8::from(self.upper == EtaBound::One && matches!(self.lower, EtaBound::Bottom | EtaBound::Top))
    }
}

/// `(A, B, C, D)` as linear functions of `xi`.
fn lines(rc: &RationalCoeffs3D) -> [Lin; 4] {
    [Lin::new(rc.a, rc.c), Lin::new(rc.b, rc.d), Lin::new(rc.e, rc.g), Lin::new(rc.f, rc.h)]
}

/// Value of an `eta` limit at `xi`.
pub fn bound_value(rc: &RationalCoeffs3D, bound: EtaBound, xi: f64) -> f64 {
    let [a, b, c, d] = lines(rc).map(|l| l.eval(xi));
    match bound {
        EtaBound::Zero => 0.0,
        EtaBound::One => 1.0,
        EtaBound::Bottom => -b / a,
        EtaBound::Top => -(b + d) / (a + c),
    }
}

/// Interface trace on the face `zeta = i_zeta` as a 2D rational profile in `xi`.
fn trace_profile(rc: &RationalCoeffs3D, i_zeta: u8) -> RationalCoeffs2D {
    let z = f64::from(i_zeta);
    RationalCoeffs2D {
        a: rc.b + z * rc.f,
        b: rc.d + z * rc.h,
        c: rc.a + z * rc.e,
        d: rc.c + z * rc.g,
    }
}

/// Antiderivative in `xi` of the trace `eta = q(xi)` on `zeta = i_zeta`
/// (`i_eta = 0`) or of `1 - q(xi)` (`i_eta = 1`).
#[allow(non_snake_case)]
pub fn antiderivative_G(xi: f64, rc: &RationalCoeffs3D, i_zeta: u8, i_eta: u8) -> f64 {
    let p = trace_profile(rc, i_zeta);
    let g = if p.c.abs() <= crate::area2d::TAU_DEG * p.scale() {
        -(p.a * xi * xi / 2.0 + p.b * xi) / p.d
    } else {
        (p.a * p.d - p.b * p.c) / (p.c * p.c) * (p.c * xi + p.d).abs().ln() - p.a * xi / p.c
    };
    let ie = f64::from(i_eta);
    (1.0 - 2.0 * ie) * g + xi * ie
}

/// `∫ (upper - lower) d xi` over the piece.
fn width_integral(rc: &RationalCoeffs3D, dom: &IntegrationDomain) -> Result<f64> {
    let one = |bound| -> Result<f64> {
        match bound {
            EtaBound::Zero => Ok(0.0),
            EtaBound::One => Ok(dom.xi1 - dom.xi0),
            EtaBound::Bottom => integrate_rational_2d(&trace_profile(rc, 0), dom.xi0, dom.xi1, 0),
            EtaBound::Top => integrate_rational_2d(&trace_profile(rc, 1), dom.xi0, dom.xi1, 0),
        }
    };
    Ok(one(dom.upper)? - one(dom.lower)?)
}

/// Inner integral `I(eta) = ∫ -(A eta + B)/(C eta + D) d eta` at an `eta` limit.
struct InnerTerm {
    rational: Option<Rat>,
    logs: Vec<(f64, LogArg)>,
}

fn inner_term(rc: &RationalCoeffs3D, aux: &AuxTerms, bound: EtaBound, c_zero: bool) -> InnerTerm {
    let [a, b, c, d] = lines(rc);
    let [t0, t1, t2, ..] = aux.t;
    let xi1 = LogArg::Quadratic(t0, t1, t2);
    let p = |l: Lin| Poly(vec![l.o, l.s]);
    if c_zero {
        let rational = match bound {
            EtaBound::Zero => None,
            EtaBound::One => Some(Rat::new(p(a).scale(-0.5).add(&p(b).scale(-1.0)), vec![d])),
            EtaBound::Bottom => Some(Rat::new(p(b).mul(&p(b)).scale(0.5), vec![a, d])),
            EtaBound::Top => Some(Rat::new(p(b).mul(&p(b)).add(&p(d).mul(&p(d)).scale(-1.0)).scale(0.5), vec![a, d])),
        };
        return InnerTerm { rational, logs: vec![] };
    }
    match bound {
        EtaBound::Zero => InnerTerm { rational: None, logs: vec![(1.0, LogArg::Linear(d))] },
        EtaBound::One => InnerTerm {
            rational: Some(Rat::new(p(a).scale(-1.0), vec![c])),
            logs: vec![(1.0, LogArg::Linear(c + d))],
        },
        EtaBound::Bottom => InnerTerm {
            rational: Some(Rat::new(p(b), vec![c])),
            logs: vec![(1.0, xi1), (-1.0, LogArg::Linear(a))],
        },
        EtaBound::Top => InnerTerm {
            rational: Some(Rat::new(p(a).mul(&p(b + d)), vec![c, a + c])),
            logs: vec![(1.0, xi1), (-1.0, LogArg::Linear(a + c))],
        },
    }
}

fn c_is_zero(rc: &RationalCoeffs3D) -> bool {
    rc.e.abs() <= C_ZERO_TOL && rc.g.abs() <= C_ZERO_TOL
}

/// `∫ [I(upper) - I(lower)] d xi` over the piece in closed form.
fn inner_integral_closed(rc: &RationalCoeffs3D, aux: &AuxTerms, dom: &IntegrationDomain) -> Result<Accum> {
    let c_zero = c_is_zero(rc);
    let upper = inner_term(rc, aux, dom.upper, c_zero);
    let lower = inner_term(rc, aux, dom.lower, c_zero);
    let mut logs: Vec<(f64, LogArg)> = upper.logs;
    for (s, arg) in lower.logs {
        match logs.iter().position(|(t, other)| *other == arg && *t == s) {
            Some(i) => {
                logs.remove(i);
            }
            None => logs.push((-s, arg)),
        }
    }
    let mut acc = Accum::default();
    for (sign, term) in [(1.0, upper.rational), (-1.0, lower.rational)] {
        if let Some(rat) = term {
            acc.merge(integrate_pf(&partial_fractions(&rat)?, dom.xi0, dom.xi1)?, sign);
        }
    }
    if !logs.is_empty() {
        let [_, _, c, _] = lines(rc);
        let [t0, t1, t2, ..] = aux.t;
        let weight = partial_fractions(&Rat::new(Poly(vec![t2, t1, t0]), vec![c, c]))?;
        for (sign, arg) in logs {
            let split = split_log(arg)?;
            acc.merge(integrate_pf_log(&weight, &split, dom.xi0, dom.xi1)?, sign);
        }
    }
    if !acc.value.is_finite() || !acc.magnitude.is_finite() {
        return Err(Error::DegenerateDenominator);
    }
    Ok(acc)
}

/// Antiderivative in `xi` of the inner integral `∫ [I(upper) - I(lower)]`,
/// normalized to vanish at `dom.xi0`.
#[allow(non_snake_case)]
pub fn antiderivative_F(xi: f64, rc: &RationalCoeffs3D, dom: &IntegrationDomain) -> Result<f64> {
    let sub = IntegrationDomain { xi1: xi, ..*dom };
    Ok(inner_integral_closed(rc, &AuxTerms::new(rc), &sub)?.value)
}

/// Volume of one piece with its estimated rounding error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PieceVolume {
    pub value: f64,
    pub error: f64,
}

/// Closed-form volume of one piece: `(1 - 2 i_zeta) ΔF + i_zeta ΔG` for
/// partial columns, `ΔG` for full ones.
pub fn elementary_volume_3d(rc: &RationalCoeffs3D, dom: &IntegrationDomain) -> Result<PieceVolume> {
    let width = width_integral(rc, dom)?;
    match dom.fill {
        ColumnFill::Empty => Ok(PieceVolume { value: 0.0, error: 0.0 }),
        ColumnFill::Full => Ok(PieceVolume { value: width, error: 4.0 * f64::EPSILON }),
        ColumnFill::Below | ColumnFill::Above => {
            let f = inner_integral_closed(rc, &AuxTerms::new(rc), dom)?;
            let iz = f64::from(dom.i_zeta());
            Ok(PieceVolume {
                value: (1.0 - 2.0 * iz) * f.value + iz * width,
                error: f.error() + 4.0 * f64::EPSILON,
            })
        }
    }
}

/// Column length integrated over `eta` at fixed `xi`, using the stable 2D closed form.
pub fn inner_integral(rc: &RationalCoeffs3D, dom: &IntegrationDomain, xi: f64) -> f64 {
    let lo = bound_value(rc, dom.lower, xi);
    let hi = bound_value(rc, dom.upper, xi);
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return 0.0;
    }
    let [a, b, c, d] = lines(rc).map(|l| l.eval(xi));
    let profile = RationalCoeffs2D { a, b, c, d };
    let i_zeta = match dom.fill {
        ColumnFill::Empty => return 0.0,
        ColumnFill::Full => return hi - lo,
        ColumnFill::Below => 0,
        ColumnFill::Above => 1,
    };
    integrate_rational_2d(&profile, lo, hi, i_zeta).unwrap_or_else(|_| {
        let column = |eta: f64| {
            let p = a * eta + b;
            let q = c * eta + d;
            let z = if q == 0.0 { f64::from(i_zeta) } else { (-p / q).clamp(0.0, 1.0) };
            if i_zeta == 0 {
                z
            } else {
                1.0 - z
            }
        };
        quadrature::integrate(&column, lo, hi, 1e-15, 200).0
    })
}

/// Piece volume by adaptive quadrature of [`inner_integral`] over `xi`.
pub fn elementary_volume_quadrature(rc: &RationalCoeffs3D, dom: &IntegrationDomain) -> PieceVolume {
    let (value, error) = quadrature::integrate(&|xi| inner_integral(rc, dom, xi), dom.xi0, dom.xi1, 1e-15, 300);
    PieceVolume { value, error }
}

/// How a cell's fraction was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    Uniform,
    /// Closed form in the frame with the given axis order.
    ClosedForm([usize; 3]),
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeReport {
    pub fraction: VolumeFraction,
    pub error: f64,
    pub path: EvalPath,
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn closed_form_in(cell: &CellCorners3D, axes: [usize; 3]) -> Result<PieceVolume> {
    let local = cell.permute(&axes);
    let rc = RationalCoeffs3D::from_local_cell(&local);
    let mut total = PieceVolume { value: 0.0, error: 0.0 };
    for dom in split_local(&local) {
        let v = elementary_volume_3d(&rc, &dom)?;
        total.value += v.value;
        total.error += v.error;
    }
    Ok(total)
}

fn quadrature_in(cell: &CellCorners3D, axes: [usize; 3]) -> PieceVolume {
    let local = cell.permute(&axes);
    let rc = RationalCoeffs3D::from_local_cell(&local);
    let mut total = PieceVolume { value: 0.0, error: 0.0 };
    for dom in split_local(&local) {
        let v = elementary_volume_quadrature(&rc, &dom);
        total.value += v.value;
        total.error += v.error;
    }
    total
}

/// Fraction of the unit cube where the trilinear interpolant is `>= 0`,
/// with the evaluation path and an error estimate.
///
/// The closed form is tried in the length-sorted local frame first, then in
/// the other axis orders; if none is well conditioned the outer integral
/// is done by adaptive Gauss-Kronrod quadrature of the exact inner integral.
pub fn cell_volume_3d_report(cell: &CellCorners3D) -> Result<VolumeReport> {
    if !cell.is_finite() {
        return Err(Error::InvalidArgument("non-finite corner value".into()));
    }
    let cell = prepare(cell);
    if let Some(positive) = cell.uniform_sign() {
        return Ok(VolumeReport {
            fraction: VolumeFraction::new(if positive { 1.0 } else { 0.0 }),
            error: 0.0,
            path: EvalPath::Uniform,
        });
    }
    let (frame, _) = build_frame_3d(&cell).map_err(|_| Error::Unresolved)?;
    let first = frame.axes;
    let order = std::iter::once(first).chain(PERMUTATIONS.into_iter().filter(|p| *p != first));
    for axes in order {
        if let Ok(v) = closed_form_in(&cell, axes) {
            if v.error <= CLOSED_FORM_TOL && (-1e-12..=1.0 + 1e-12).contains(&v.value) {
                return Ok(VolumeReport {
                    fraction: VolumeFraction::new(v.value),
                    error: v.error,
                    path: EvalPath::ClosedForm(axes),
                });
            }
        }
    }
    let v = quadrature_in(&cell, first);
    Ok(VolumeReport {
        fraction: VolumeFraction::new(v.value),
        error: v.error,
        path: EvalPath::Quadrature,
    })
}

pub fn cell_volume_3d(cell: &CellCorners3D) -> Result<VolumeFraction> {
    cell_volume_3d_report(cell).map(|r| r.fraction)
}

/// Closed-form fraction in a prescribed axis order, without fallbacks.
pub fn cell_volume_3d_in_frame(cell: &CellCorners3D, axes: [usize; 3]) -> Result<PieceVolume> {
    let cell = prepare(cell);
    if let Some(positive) = cell.uniform_sign() {
        return Ok(PieceVolume { value: if positive { 1.0 } else { 0.0 }, error: 0.0 });
    }
    closed_form_in(&cell, axes)
}
