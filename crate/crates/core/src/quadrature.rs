//! Adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: returns the Kronrod value and |K15 - G7|.
pub fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = hw * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * hw, ((k - g) * hw).abs())
}

/// Integrates `f` over `[a, b]` by globally adaptive bisection: the panel
/// with the largest error estimate is split until the summed estimate is
/// below `tol` (or roundoff level) or `max_splits` is reached.
/// Returns `(value, error)`.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64, max_splits: u32) -> (f64, f64) {
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }
    impl PartialEq for Panel {
        fn eq(&self, other: &Self) -> bool {
            self.error == other.error
        }
    }
    impl Eq for Panel {}
    impl PartialOrd for Panel {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Panel {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.error.total_cmp(&other.error)
        }
    }

    if a == b {
        return (0.0, 0.0);
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let (mut total, mut err) = (value, error);
    for _ in 0..max_splits {
        if err <= tol.max(50.0 * f64::EPSILON * total.abs()) {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (lv, le) = gk15(&mut f, p.a, m);
        let (rv, re) = gk15(&mut f, m, p.b);
        total += lv + rv - p.value;
        err += le + re - p.error;
        heap.push(Panel { a: p.a, b: m, value: lv, error: le });
        heap.push(Panel { a: m, b: p.b, value: rv, error: re });
    }
    let total: f64 = heap.iter().map(|p| p.value).sum();
    let err: f64 = heap.iter().map(|p| p.error).sum();
    (total, err)
}
