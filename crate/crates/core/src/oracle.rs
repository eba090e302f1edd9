//! Brute-force volume bounds by subdivision, and the piecewise-linear baseline.
//!
//! On any box the multilinear interpolant takes values between its corner
//! extremes, so a box whose corners are all `>= 0` lies inside the phase and
//! one whose corners are all `<= 0` lies outside it (up to a null set).

use crate::interp::{is_positive, Cell, CellCorners2D, CellCorners3D};
use crate::VolumeFraction;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Signs {
    Positive,
    NonPositive,
    Mixed,
}

fn signs(values: &[f64]) -> Signs {
    if values.iter().all(|&v| is_positive(v)) {
        Signs::Positive
    } else if values.iter().all(|&v| v <= 0.0) {
        Signs::NonPositive
    } else {
        Signs::Mixed
    }
}

/// Certified `(lo, hi)` bounds on the fraction by recursive `2^d` subdivision.
///
/// Mixed-sign boxes at the depth floor count toward `hi` only.
pub fn certified_bounds<C: Cell>(cell: &C, max_depth: u32) -> (f64, f64) {
    match signs(cell.values()) {
        Signs::Positive => (1.0, 1.0),
        Signs::NonPositive => (0.0, 0.0),
        Signs::Mixed if max_depth == 0 => (0.0, 1.0),
        Signs::Mixed => {
            let mut lo = 0.0;
            let mut hi = 0.0;
            for k in 0..C::CORNERS {
                let (l, h) = certified_bounds(&cell.child(k), max_depth - 1);
                lo += l;
                hi += h;
            }
            let n = C::CORNERS as f64;
            (lo / n, hi / n)
        }
    }
}

/// Node ranges along one lattice line `phi(t) = p + (q - p) t`, `t = j / n`:
/// where `phi >= 0` and where `phi <= 0`.
///
/// Floating-point evaluation of `p + s t` is monotone in `t`, so both sets
/// are contiguous and share one boundary, found from the linear root.
///
/// `hint` carries the boundary of a neighbouring line to start the search from.
fn line_ranges(n: usize, p: f64, q: f64, hint: &mut Option<usize>) -> [Option<(usize, usize)>; 2] {
    let slope = q - p;
    let inv = 1.0 / n as f64;
    if slope == 0.0 {
        return [is_positive(p).then_some((0, n)), (p <= 0.0).then_some((0, n))];
    }
    let f = |j: usize| p + slope * (j as f64 * inv);
    let end = f(n);
    if p > 0.0 && end > 0.0 {
        *hint = None;
        return [Some((0, n)), None];
    }
    if p < 0.0 && end < 0.0 {
        *hint = None;
        return [None, Some((0, n))];
    }
    let rising = slope > 0.0;
    // first node where the sign has flipped to the far end's sign
    let far = |v: f64| if rising { v >= 0.0 } else { v <= 0.0 };
    let mut j = match *hint {
        Some(h) => h,
        None => {
            let guess = -p / slope * n as f64;
            if guess.is_finite() {
                guess.clamp(0.0, n as f64 + 1.0) as usize
            } else {
                0
            }
        }
    };
    while j > 0 && far(f(j - 1)) {
        j -= 1;
    }
    while j <= n && !far(f(j)) {
        j += 1;
    }
    // last node still carrying the near end's (weak) sign
    let near = |v: f64| if rising { v <= 0.0 } else { v >= 0.0 };
    let mut k = j;
    while k <= n && near(f(k)) {
        k += 1;
    }
    *hint = Some(j);
    let tail = (j <= n).then_some((j, n));
    let head = (k > 0).then(|| (0, k - 1));
    if rising {
        [tail, head]
    } else {
        [head, tail]
    }
}

/// Number of lattice boxes between consecutive nodes common to all ranges.
fn common_boxes(ranges: &[Option<(usize, usize)>]) -> usize {
    let mut lo = 0;
    let mut hi = usize::MAX;
    for r in ranges {
        match r {
            Some((a, b)) => {
                lo = lo.max(*a);
                hi = hi.min(*b);
            }
            None => return 0,
        }
    }
    hi.saturating_sub(lo)
}

/// The bounds of [`certified_bounds`] at depth `depth`, computed by counting
/// boxes of the uniform `2^depth` lattice line by line.
///
/// A box is fully inside (outside) exactly when all its corners are, and a
/// box of a coarser level with uniform signs has only uniform descendants,
/// so the counts equal those of the recursive bisection.
pub fn lattice_bounds_2d(cell: &CellCorners2D, depth: u32) -> (f64, f64) {
    match signs(&cell.values) {
        Signs::Positive => return (1.0, 1.0),
        Signs::NonPositive => return (0.0, 0.0),
        Signs::Mixed => {}
    }
    let n = 1usize << depth;
    let inv = 1.0 / n as f64;
    let mut hint = None;
    let mut line = |i: usize| {
        let x = i as f64 * inv;
        let v = &cell.values;
        let p = v[0] * (1.0 - x) + v[1] * x;
        let q = v[2] * (1.0 - x) + v[3] * x;
        line_ranges(n, p, q, &mut hint)
    };
    let mut inside = 0usize;
    let mut outside = 0usize;
    let mut left = line(0);
    for i in 1..=n {
        let right = line(i);
        inside += common_boxes(&[left[0], right[0]]);
        outside += common_boxes(&[left[1], right[1]]);
        left = right;
    }
    let total = (n * n) as f64;
    (inside as f64 / total, 1.0 - outside as f64 / total)
}

/// Three-dimensional counterpart of [`lattice_bounds_2d`].
pub fn lattice_bounds_3d(cell: &CellCorners3D, depth: u32) -> (f64, f64) {
    match signs(&cell.values) {
        Signs::Positive => return (1.0, 1.0),
        Signs::NonPositive => return (0.0, 0.0),
        Signs::Mixed => {}
    }
    let n = 1usize << depth;
    let inv = 1.0 / n as f64;
    let line = |i: usize, j: usize, hint: &mut Option<usize>| {
        let (x, y) = (i as f64 * inv, j as f64 * inv);
        let v = &cell.values;
        let face = |o: usize| {
            let lo = v[o] * (1.0 - x) + v[o + 1] * x;
            let hi = v[o + 2] * (1.0 - x) + v[o + 3] * x;
            lo * (1.0 - y) + hi * y
        };
        let p = face(0);
        let q = face(4);
        line_ranges(n, p, q, hint)
    };
    let row = |i: usize| {
        let mut hint = None;
        (0..=n).map(|j| line(i, j, &mut hint)).collect::<Vec<_>>()
    };
    let mut prev = row(0);
    let mut inside = 0usize;
    let mut outside = 0usize;
    for i in 1..=n {
        let cur = row(i);
        for j in 0..n {
            let quad = [prev[j], prev[j + 1], cur[j], cur[j + 1]];
            inside += common_boxes(&quad.map(|r| r[0]));
            outside += common_boxes(&quad.map(|r| r[1]));
        }
        prev = cur;
    }
    let total = (n * n * n) as f64;
    (inside as f64 / total, 1.0 - outside as f64 / total)
}

fn crossing(a: [f64; 2], b: [f64; 2], va: f64, vb: f64) -> [f64; 2] {
    let t = va / (va - vb);
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for k in 0..n {
        let (p, q) = (poly[k], poly[(k + 1) % n]);
        s += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * s.abs()
}

/// Marching-squares area: corners and linear edge crossings of the `phi >= 0`
/// part, with saddles joined when the cell-center average is `>= 0`.
pub fn linear_baseline_2d(cell: &CellCorners2D) -> VolumeFraction {
    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let v = [cell.phi(0, 0), cell.phi(1, 0), cell.phi(1, 1), cell.phi(0, 1)];
    let mut poly = Vec::with_capacity(8);
    let mut cuts = Vec::with_capacity(4);
    for k in 0..4 {
        let l = (k + 1) % 4;
        if is_positive(v[k]) {
            poly.push(square[k]);
        }
        if is_positive(v[k]) != is_positive(v[l]) {
            let p = crossing(square[k], square[l], v[k], v[l]);
            poly.push(p);
            cuts.push(p);
        }
    }
    if poly.len() < 3 {
        return VolumeFraction::new(0.0);
    }
    let mut area = shoelace(&poly);
    if cuts.len() == 4 && v.iter().sum::<f64>() < 0.0 {
        area -= shoelace(&cuts);
    }
    VolumeFraction::new(area)
}

type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn tet_volume(a: P3, b: P3, c: P3, d: P3) -> f64 {
    let (u, v, w) = (sub(b, a), sub(c, a), sub(d, a));
    let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) + u[2] * (v[0] * w[1] - v[1] * w[0]);
    det.abs() / 6.0
}

fn lerp3(a: P3, b: P3, va: f64, vb: f64) -> P3 {
    let t = va / (va - vb);
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
}

/// Fraction of a tetrahedron where its linear interpolant is `>= 0`.
fn clip_tet(p: [P3; 4], v: [f64; 4]) -> f64 {
    let full = 1.0;
    let pos: Vec<usize> = (0..4).filter(|&i| is_positive(v[i])).collect();
    let neg: Vec<usize> = (0..4).filter(|&i| !is_positive(v[i])).collect();
    match pos.len() {
        0 => 0.0,
        4 => full,
        1 | 3 => {
            let (apex, others) = if pos.len() == 1 { (pos[0], &neg) } else { (neg[0], &pos) };
            let frac: f64 = others.iter().map(|&o| v[apex] / (v[apex] - v[o])).product();
            if pos.len() == 1 {
                full * frac
            } else {
                full * (1.0 - frac)
            }
        }
        _ => {
            let (a, b) = (pos[0], pos[1]);
            let (r, s) = (neg[0], neg[1]);
            let (ar, as_) = (lerp3(p[a], p[r], v[a], v[r]), lerp3(p[a], p[s], v[a], v[s]));
            let (br, bs) = (lerp3(p[b], p[r], v[b], v[r]), lerp3(p[b], p[s], v[b], v[s]));
            let wedge = tet_volume(p[a], ar, as_, p[b]) + tet_volume(ar, as_, p[b], br) + tet_volume(as_, p[b], br, bs);
            wedge / tet_volume(p[0], p[1], p[2], p[3])
        }
    }
}

/// Kuhn triangulation into six tetrahedra along the `(0,0,0)-(1,1,1)` diagonal,
/// each clipped by the linear interpolant of its vertex values.
pub fn linear_baseline_3d(cell: &CellCorners3D) -> VolumeFraction {
    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let point = |i: usize| [(i & 1) as f64, (i >> 1 & 1) as f64, (i >> 2 & 1) as f64];
    let mut total = 0.0;
    for order in ORDERS {
        let mut idx = [0usize; 4];
        for k in 0..3 {
            idx[k + 1] = idx[k] | 1 << order[k];
        }
        total += clip_tet(idx.map(point), idx.map(|i| cell.values[i]));
    }
    VolumeFraction::new(total / 6.0)
}
