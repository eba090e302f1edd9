//! Uniform node grids of level-set values, shape generators, refinement and I/O.
//!
//! Grids cover the unit square or cube with `h = 1 / (n - 1)` by default;
//! values are stored row-major with `x` fastest.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::interp::{CellCorners2D, CellCorners3D};

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    dim: usize,
    nodes: [usize; 3],
    h: f64,
    values: Vec<f64>,
}

impl ScalarGrid {
    /// `nodes` holds one count per axis (2 or 3 entries).
    pub fn new(nodes: &[usize], h: f64, values: Vec<f64>) -> Result<Self> {
        let dim = nodes.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::DimensionMismatch(format!("{dim} axes given, expected 2 or 3")));
        }
        if nodes.iter().any(|&n| n < 2) {
            return Err(Error::InvalidArgument("every axis needs at least two nodes".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("spacing must be positive, got {h}")));
        }
        let expected: usize = nodes.iter().product();
        if values.len() != expected {
            return Err(Error::ShapeMismatch { expected, actual: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite node value".into()));
        }
        let mut n = [1; 3];
        n[..dim].copy_from_slice(nodes);
        Ok(Self { dim, nodes: n, h, values })
    }

    /// Samples `f` at the nodes of the unit square/cube with `n` nodes per axis.
    pub fn from_fn(dim: usize, n: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let nodes = vec![n; dim];
        let h = 1.0 / (n.max(2) - 1) as f64;
        let count = n.pow(dim as u32);
        let mut values = Vec::with_capacity(count);
        let mut p = vec![0.0; dim];
        for idx in 0..count {
            let mut rest = idx;
            for pk in p.iter_mut() {
                *pk = (rest % n) as f64 * h;
                rest /= n;
            }
            values.push(f(&p));
        }
        Self::new(&nodes, h, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes[..self.dim]
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cells(&self) -> Vec<usize> {
        self.nodes().iter().map(|n| n - 1).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.cells().iter().product()
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nodes[0] * (j + self.nodes[1] * k)
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    /// Cell multi-index of the `c`-th cell in row-major order.
    pub fn cell_index(&self, c: usize) -> [usize; 3] {
        let cells = [self.nodes[0] - 1, self.nodes[1] - 1, self.nodes[2].max(2) - 1];
        [c % cells[0], (c / cells[0]) % cells[1], c / (cells[0] * cells[1])]
    }

    pub fn cell_2d(&self, i: usize, j: usize) -> CellCorners2D {
        CellCorners2D::new(self.value(i, j, 0), self.value(i + 1, j, 0), self.value(i, j + 1, 0), self.value(i + 1, j + 1, 0))
    }

    pub fn cell_3d(&self, i: usize, j: usize, k: usize) -> CellCorners3D {
        CellCorners3D::new(std::array::from_fn(|c| self.value(i + (c & 1), j + (c >> 1 & 1), k + (c >> 2))))
    }
}

/// One refinement level: every interval is halved and new nodes take the
/// multilinear interpolant of the parent cell, built axis by axis from
/// edge midpoints so that shared nodes are computed once.
fn refine_once(g: &ScalarGrid) -> ScalarGrid {
    let dim = g.dim;
    let mut nodes = g.nodes;
    for n in nodes.iter_mut().take(dim) {
        *n = 2 * (*n - 1) + 1;
    }
    let idx = |i: usize, j: usize, k: usize| i + nodes[0] * (j + nodes[1] * k);
    let mut v = vec![0.0; nodes.iter().product()];
    for k in 0..g.nodes[2] {
        for j in 0..g.nodes[1] {
            for i in 0..g.nodes[0] {
                let (fk, fj) = if dim == 3 { (2 * k, 2 * j) } else { (0, 2 * j) };
                v[idx(2 * i, fj, fk)] = g.value(i, j, k);
            }
        }
    }
    let step_k = if dim == 3 { 2 } else { 1 };
    // x midpoints on coarse rows
    for k in (0..nodes[2]).step_by(step_k) {
        for j in (0..nodes[1]).step_by(2) {
            for i in (1..nodes[0]).step_by(2) {
                v[idx(i, j, k)] = 0.5 * (v[idx(i - 1, j, k)] + v[idx(i + 1, j, k)]);
            }
        }
    }
    // y midpoints on coarse planes
    for k in (0..nodes[2]).step_by(step_k) {
        for j in (1..nodes[1]).step_by(2) {
            for i in 0..nodes[0] {
                v[idx(i, j, k)] = 0.5 * (v[idx(i, j - 1, k)] + v[idx(i, j + 1, k)]);
            }
        }
    }
    if dim == 3 {
        for k in (1..nodes[2]).step_by(2) {
            for j in 0..nodes[1] {
                for i in 0..nodes[0] {
                    v[idx(i, j, k)] = 0.5 * (v[idx(i, j, k - 1)] + v[idx(i, j, k + 1)]);
                }
            }
        }
    }
    ScalarGrid { dim, nodes, h: 0.5 * g.h, values: v }
}

/// Refines `levels` times by multilinear interpolation. Existing nodes keep their values.
pub fn refine(grid: &ScalarGrid, levels: u32) -> ScalarGrid {
    let mut g = grid.clone();
    for _ in 0..levels {
        g = refine_once(&g);
    }
    g
}

/// Keeps every `2^levels`-th node.
pub fn coarsen(grid: &ScalarGrid, levels: u32) -> Result<ScalarGrid> {
    let step = 1usize << levels;
    for &n in grid.nodes() {
        if (n - 1) % step != 0 || (n - 1) / step < 1 {
            return Err(Error::NotDivisible { extent: n, levels });
        }
    }
    let mut nodes = grid.nodes;
    for n in nodes.iter_mut().take(grid.dim) {
        *n = (*n - 1) / step + 1;
    }
    let mut values = Vec::with_capacity(nodes.iter().product());
    for k in 0..nodes[2] {
        for j in 0..nodes[1] {
            for i in 0..nodes[0] {
                let kk = if grid.dim == 3 { k * step } else { 0 };
                values.push(grid.value(i * step, j * step, kk));
            }
        }
    }
    Ok(ScalarGrid { dim: grid.dim, nodes, h: grid.h * step as f64, values })
}

/// Analytic shapes sampled as signed distances, positive inside.
#[derive(Clone, Debug, PartialEq)]
pub enum ShapeSpec {
    Circle { center: [f64; 2], r: f64 },
    Sphere { center: [f64; 3], r: f64 },
    /// Pointwise maximum of the members' signed distances.
    Union(Vec<ShapeSpec>),
    /// Disk with a rectangular slot cut upward from its bottom.
    ZalesakDisk { center: [f64; 2], r: f64, notch_w: f64, notch_h: f64 },
    /// `count` circles drawn by a 64-bit LCG from `seed`, radii in `r_range`.
    RandomCircles { count: usize, seed: u64, r_range: (f64, f64) },
}

/// Knuth's MMIX linear congruential generator.
#[derive(Clone, Debug)]
pub struct Lcg(u64);

impl Lcg {
    pub const A: u64 = 6364136223846793005;
    pub const C: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(Self::A).wrapping_add(Self::C);
        self.0
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn box_sdf(p: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> f64 {
    // positive inside
    let dx = (lo[0] - p[0]).max(p[0] - hi[0]);
    let dy = (lo[1] - p[1]).max(p[1] - hi[1]);
    if dx <= 0.0 && dy <= 0.0 {
        -dx.max(dy)
    } else {
        -(dx.max(0.0).hypot(dy.max(0.0)))
    }
}

impl ShapeSpec {
    pub fn dim(&self) -> usize {
        match self {
            ShapeSpec::Sphere { .. } => 3,
            ShapeSpec::Union(members) => members.first().map_or(2, |m| m.dim()),
            _ => 2,
        }
    }

    /// The circles of a [`ShapeSpec::RandomCircles`] spec.
    pub fn expand(&self) -> ShapeSpec {
        match self {
            ShapeSpec::RandomCircles { count, seed, r_range } => {
                let mut rng = Lcg::new(*seed);
                let circles = (0..*count)
                    .map(|_| {
                        let r = r_range.0 + (r_range.1 - r_range.0) * rng.next_f64();
                        let cx = r + (1.0 - 2.0 * r) * rng.next_f64();
                        let cy = r + (1.0 - 2.0 * r) * rng.next_f64();
                        ShapeSpec::Circle { center: [cx, cy], r }
                    })
                    .collect();
                ShapeSpec::Union(circles)
            }
            other => other.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let inside = |c: &[f64], r: f64| r > 0.0 && c.iter().all(|&x| x - r >= 0.0 && x + r <= 1.0);
        let ok = match self {
            ShapeSpec::Circle { center, r } => inside(center, *r),
            ShapeSpec::Sphere { center, r } => inside(center, *r),
            ShapeSpec::Union(members) => {
                for m in members {
                    m.validate()?;
                }
                !members.is_empty() && members.iter().all(|m| m.dim() == members[0].dim())
            }
            ShapeSpec::ZalesakDisk { center, r, notch_w, notch_h } => {
                inside(center, *r) && *notch_w > 0.0 && *notch_w < 2.0 * r && *notch_h > 0.0 && *notch_h < 2.0 * r
            }
            ShapeSpec::RandomCircles { count, r_range, .. } => {
                *count > 0 && r_range.0 > 0.0 && r_range.0 <= r_range.1 && r_range.1 < 0.5
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpecOutOfDomain(format!("{self:?}")))
        }
    }

    /// Exact area or volume of the shape where a closed form applies: single
    /// circles and spheres, unions of two equal circles, and slotted disks
    /// whose slot ends between the disk center and the rim. `None` otherwise.
    pub fn exact_measure(&self) -> Option<f64> {
        use std::f64::consts::PI;
        match self.expand() {
            ShapeSpec::Circle { r, .. } => Some(PI * r * r),
            ShapeSpec::Sphere { r, .. } => Some(4.0 / 3.0 * PI * r.powi(3)),
            ShapeSpec::Union(members) => match members.as_slice() {
                [one] => one.exact_measure(),
                [ShapeSpec::Circle { center: c1, r: r1 }, ShapeSpec::Circle { center: c2, r: r2 }] if r1 == r2 => {
                    let r = *r1;
                    let d = (c1[0] - c2[0]).hypot(c1[1] - c2[1]);
                    let lens = if d >= 2.0 * r {
                        0.0
                    } else {
                        2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt()
                    };
                    Some(2.0 * PI * r * r - lens)
                }
                _ => None,
            },
            ShapeSpec::ZalesakDisk { r, notch_w, notch_h, .. } => {
                let half = 0.5 * notch_w;
                let above_center = notch_h - r;
                if above_center < 0.0 || above_center > (r * r - half * half).sqrt() {
                    return None;
                }
                let prim = |u: f64| 0.5 * u * (r * r - u * u).sqrt() + 0.5 * r * r * (u / r).asin();
                Some(PI * r * r - notch_w * above_center - (prim(half) - prim(-half)))
            }
            ShapeSpec::RandomCircles { .. } => None,
        }
    }

    /// Signed distance (or its max/min composition) at `p`, positive inside.
    pub fn signed_distance(&self, p: &[f64]) -> f64 {
        match self {
            ShapeSpec::Circle { center, r } => r - (p[0] - center[0]).hypot(p[1] - center[1]),
            ShapeSpec::Sphere { center, r } => {
                let d = (0..3).map(|k| (p[k] - center[k]).powi(2)).sum::<f64>().sqrt();
                r - d
            }
            ShapeSpec::Union(members) => members.iter().map(|m| m.signed_distance(p)).fold(f64::NEG_INFINITY, f64::max),
            ShapeSpec::ZalesakDisk { center, r, notch_w, notch_h } => {
                let disk = r - (p[0] - center[0]).hypot(p[1] - center[1]);
                let bottom = center[1] - r;
                let lo = [center[0] - 0.5 * notch_w, bottom - r];
                let hi = [center[0] + 0.5 * notch_w, bottom + notch_h];
                disk.min(-box_sdf([p[0], p[1]], lo, hi))
            }
            ShapeSpec::RandomCircles { .. } => self.expand().signed_distance(p),
        }
    }
}

/// Samples a shape on the unit domain with `nodes_per_axis` nodes per axis.
pub fn generate(spec: &ShapeSpec, nodes_per_axis: usize) -> Result<ScalarGrid> {
    spec.validate()?;
    if nodes_per_axis < 2 {
        return Err(Error::InvalidArgument("need at least two nodes per axis".into()));
    }
    let spec = spec.expand();
    ScalarGrid::from_fn(spec.dim(), nodes_per_axis, |p| spec.signed_distance(p))
}

fn parse_err(line: usize, token: &str, message: impl Into<String>) -> Error {
    Error::Parse { line, token: token.to_string(), message: message.into() }
}

/// Parses the LSG text format.
pub fn parse_lsg(text: &str) -> Result<ScalarGrid> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "", "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.first() != Some(&"LSG") {
        return Err(parse_err(1, fields.first().unwrap_or(&""), "expected `LSG` header"));
    }
    let dim: usize = fields
        .get(1)
        .ok_or_else(|| parse_err(1, "", "missing dimension"))?
        .parse()
        .map_err(|_| parse_err(1, fields[1], "bad dimension"))?;
    if !(2..=3).contains(&dim) {
        return Err(Error::DimensionMismatch(format!("header declares dimension {dim}")));
    }
    if fields.len() != dim + 3 {
        return Err(Error::DimensionMismatch(format!(
            "dimension {dim} needs {} header fields, found {}",
            dim + 3,
            fields.len()
        )));
    }
    let mut nodes = Vec::with_capacity(dim);
    for tok in &fields[2..2 + dim] {
        nodes.push(tok.parse::<usize>().map_err(|_| parse_err(1, tok, "bad node count"))?);
    }
    let h_tok = fields[2 + dim];
    let h: f64 = h_tok.parse().map_err(|_| parse_err(1, h_tok, "bad spacing"))?;
    let expected: usize = nodes.iter().product();
    let mut values = Vec::with_capacity(expected);
    let mut last_line = 1;
    for (n, line) in lines {
        last_line = n + 1;
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| parse_err(n + 1, tok, "not a number"))?;
            if values.len() == expected {
                return Err(parse_err(n + 1, tok, format!("more than {expected} values")));
            }
            values.push(v);
        }
    }
    if values.len() != expected {
        return Err(parse_err(last_line, "", format!("expected {expected} values, found {}", values.len())));
    }
    ScalarGrid::new(&nodes, h, values)
}

/// LSG text: header line, then one row of `x` values per line.
pub fn format_lsg(grid: &ScalarGrid) -> String {
    let mut out = String::from("LSG");
    let _ = write!(out, " {}", grid.dim);
    for n in grid.nodes() {
        let _ = write!(out, " {n}");
    }
    let _ = writeln!(out, " {:?}", grid.h);
    for row in grid.values.chunks(grid.nodes[0]) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses `i,j[,k],value` rows after one header line; `h` is `1 / (n - 1)`.
pub fn parse_csv(text: &str) -> Result<ScalarGrid> {
    let mut rows = Vec::new();
    let mut dim = None;
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let d = fields.len() - 1;
        if !(2..=3).contains(&d) {
            return Err(Error::DimensionMismatch(format!("line {}: {} fields", n + 1, fields.len())));
        }
        if *dim.get_or_insert(d) != d {
            return Err(Error::DimensionMismatch(format!("line {}: mixed dimensions", n + 1)));
        }
        let mut idx = [0usize; 3];
        for k in 0..d {
            idx[k] = fields[k].parse().map_err(|_| parse_err(n + 1, fields[k], "bad index"))?;
        }
        let v: f64 = fields[d].parse().map_err(|_| parse_err(n + 1, fields[d], "not a number"))?;
        rows.push((idx, v, n + 1));
    }
    let dim = dim.ok_or_else(|| parse_err(1, "", "no data rows"))?;
    let mut nodes = [1usize; 3];
    for (idx, _, _) in &rows {
        for k in 0..dim {
            nodes[k] = nodes[k].max(idx[k] + 1);
        }
    }
    let count: usize = nodes.iter().product();
    let mut values = vec![f64::NAN; count];
    for (idx, v, line) in rows {
        let at = idx[0] + nodes[0] * (idx[1] + nodes[1] * idx[2]);
        if !values[at].is_nan() {
            return Err(parse_err(line, "", "duplicate node"));
        }
        values[at] = v;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(parse_err(0, "", "missing nodes"));
    }
    let h = 1.0 / (nodes[0].max(2) - 1) as f64;
    ScalarGrid::new(&nodes[..dim], h, values)
}

pub fn format_csv(grid: &ScalarGrid) -> String {
    let mut out = String::from(if grid.dim == 2 { "i,j,value\n" } else { "i,j,k,value\n" });
    for (at, v) in grid.values.iter().enumerate() {
        let i = at % grid.nodes[0];
        let j = (at / grid.nodes[0]) % grid.nodes[1];
        let k = at / (grid.nodes[0] * grid.nodes[1]);
        if grid.dim == 2 {
            let _ = writeln!(out, "{i},{j},{v:?}");
        } else {
            let _ = writeln!(out, "{i},{j},{k},{v:?}");
        }
    }
    out
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads LSG, or CSV when the extension is `.csv`.
pub fn read_grid(path: &Path) -> Result<ScalarGrid> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    if is_csv(path) {
        parse_csv(&text)
    } else {
        parse_lsg(&text)
    }
}

pub fn write_grid(grid: &ScalarGrid, path: &Path) -> Result<()> {
    let text = if is_csv(path) { format_csv(grid) } else { format_lsg(grid) };
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::Cell;

    #[test]
    fn circle_values() {
        let c = ShapeSpec::Circle { center: [0.3, 0.5], r: 0.25 };
        assert_eq!(c.signed_distance(&[0.3, 0.5]), 0.25);
        assert!(c.signed_distance(&[0.55, 0.5]).abs() < 1e-16);
    }

    #[test]
    fn paper_refinement() {
        let g = ScalarGrid::new(&[2, 2], 1.0, vec![0.1, 0.6, -0.3, -0.1]).unwrap();
        let r = refine(&g, 1);
        assert_eq!(r.nodes(), &[3, 3]);
        let c = r.cell_2d(0, 0);
        for (a, b) in c.values().iter().zip([0.1, 0.35, -0.1, 0.075]) {
            assert!((a - b).abs() <= 1e-16);
        }
    }

    #[test]
    fn refine_reproduces_affine_and_round_trips() {
        let g = ScalarGrid::from_fn(3, 4, |p| 0.3 + p[0] - 2.0 * p[1] + 0.5 * p[2]).unwrap();
        let r = refine(&g, 2);
        assert_eq!(r.nodes(), &[13, 13, 13]);
        for (n, v) in r.values.iter().enumerate() {
            let [i, j, k] = [n % 13, (n / 13) % 13, n / 169];
            let (x, y, z) = (i as f64 * r.h, j as f64 * r.h, k as f64 * r.h);
            assert!((v - (0.3 + x - 2.0 * y + 0.5 * z)).abs() < 1e-14);
        }
        assert_eq!(coarsen(&r, 2).unwrap(), g);
    }

    #[test]
    fn refinement_restricts_the_interpolant() {
        let g = ScalarGrid::from_fn(3, 3, |p| (p[0] * 7.1).sin() + p[1] * p[2] - 0.2).unwrap();
        let r = refine(&g, 1);
        let parent = g.cell_3d(1, 0, 1);
        for w in 0..8 {
            let child = r.cell_3d(2 + (w & 1), w >> 1 & 1, 2 + (w >> 2));
            let expect = parent.child(w);
            for (a, b) in child.values().iter().zip(expect.values()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn coarsen_requires_divisibility() {
        let g = ScalarGrid::from_fn(2, 4, |_| 1.0).unwrap();
        assert!(matches!(coarsen(&g, 1), Err(Error::NotDivisible { .. })));
        let g = ScalarGrid::from_fn(2, 5, |_| 1.0).unwrap();
        assert_eq!(coarsen(&g, 1).unwrap().nodes(), &[3, 3]);
    }

    #[test]
    fn lsg_round_trip() {
        let g = generate(&ShapeSpec::Circle { center: [0.5, 0.5], r: 0.25 }, 9).unwrap();
        assert_eq!(parse_lsg(&format_lsg(&g)).unwrap(), g);
        let g3 = generate(&ShapeSpec::Sphere { center: [0.5; 3], r: 0.3 }, 5).unwrap();
        assert_eq!(parse_lsg(&format_lsg(&g3)).unwrap(), g3);
        assert_eq!(parse_csv(&format_csv(&g3)).unwrap().values(), g3.values());
    }

    #[test]
    fn lsg_header_example() {
        let g = parse_lsg("LSG 2 3 3 0.5\n1 2 3\n4 5 6\n7 8 9\n").unwrap();
        assert_eq!(g.nodes(), &[3, 3]);
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.value(2, 1, 0), 6.0);
    }

    #[test]
    fn lsg_errors() {
        assert!(matches!(parse_lsg("LSG 2 3 3 0.5\n1 2 3\n4 5\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_lsg("LSG 2 3 3 0.5\n1 2 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_lsg("LSG 3 3 3 0.5\n"), Err(Error::DimensionMismatch(_))));
        assert!(matches!(parse_lsg("GRID 2 3 3 0.5\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn spec_validation() {
        assert!(ShapeSpec::Circle { center: [0.1, 0.5], r: 0.25 }.validate().is_err());
        assert!(generate(&ShapeSpec::Circle { center: [0.5, 0.5], r: -0.1 }, 9).is_err());
    }

    #[test]
    fn random_circles_are_reproducible() {
        let s = ShapeSpec::RandomCircles { count: 15, seed: 7, r_range: (0.03, 0.08) };
        assert_eq!(s.expand(), s.expand());
        let ShapeSpec::Union(c) = s.expand() else { panic!() };
        assert_eq!(c.len(), 15);
        s.expand().validate().unwrap();
    }

    #[test]
    fn exact_measures() {
        use std::f64::consts::PI;
        let c = ShapeSpec::Circle { center: [0.5, 0.5], r: 0.25 };
        assert_eq!(c.exact_measure(), Some(PI / 16.0));
        let apart = ShapeSpec::Union(vec![
            ShapeSpec::Circle { center: [0.25, 0.5], r: 0.2 },
            ShapeSpec::Circle { center: [0.75, 0.5], r: 0.2 },
        ]);
        assert!((apart.exact_measure().unwrap() - 0.08 * PI).abs() < 1e-15);
        let z = ShapeSpec::ZalesakDisk { center: [0.5, 0.5], r: 0.4, notch_w: 0.2, notch_h: 0.6 };
        assert!((z.exact_measure().unwrap() - 0.383496150289560).abs() < 1e-14);
        let shallow = ShapeSpec::ZalesakDisk { center: [0.5, 0.5], r: 0.4, notch_w: 0.2, notch_h: 0.2 };
        assert_eq!(shallow.exact_measure(), None);
    }

    #[test]
    fn zalesak_notch() {
        let z = ShapeSpec::ZalesakDisk { center: [0.5, 0.5], r: 0.4, notch_w: 0.2, notch_h: 0.6 };
        assert!(z.signed_distance(&[0.5, 0.4]) < 0.0);
        assert!(z.signed_distance(&[0.5, 0.8]) > 0.0);
        assert!(z.signed_distance(&[0.3, 0.4]) > 0.0);
        assert!((z.signed_distance(&[0.5, 0.7]) - 0.0).abs() < 1e-15);
    }
}
