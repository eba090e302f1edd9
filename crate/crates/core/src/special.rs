//! Dilogarithm and small complex helpers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

const PI2_6: f64 = PI * PI / 6.0;

// B_{2k} / (2k+1)! for k = 1..15, the odd-power coefficients of the
// Bernoulli expansion of Li2 in u = -ln(1 - z).
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0 / 6.0,
    -1.0 / 30.0 / 120.0,
    1.0 / 42.0 / 5040.0,
    -1.0 / 30.0 / 362_880.0,
    5.0 / 66.0 / 39_916_800.0,
    -691.0 / 2730.0 / 6_227_020_800.0,
    7.0 / 6.0 / 1_307_674_368_000.0,
    -3617.0 / 510.0 / 355_687_428_096_000.0,
    43_867.0 / 798.0 / 121_645_100_408_832_000.0,
    -174_611.0 / 330.0 / 51_090_942_171_709_440_000.0,
    854_513.0 / 138.0 / 25_852_016_738_884_976_640_000.0,
    -236_364_091.0 / 2730.0 / 15_511_210_043_330_985_984_000_000.0,
    8_553_103.0 / 6.0 / 10_888_869_450_418_352_160_768_000_000.0,
    -23_749_461_029.0 / 870.0 / 8_841_761_993_739_701_954_543_616_000_000.0,
    8_615_841_276_005.0 / 14322.0 / 8_222_838_654_177_922_817_725_562_880_000_000.0,
];

fn power_series(z: Complex64) -> Complex64 {
    let mut term = z;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..200 {
        let add = term / (k * k) as f64;
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
        term *= z;
    }
    sum
}

fn bernoulli_series(u: Complex64) -> Complex64 {
    let u2 = u * u;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in BERNOULLI.iter().rev() {
        acc = acc * u2 + c;
    }
    u - 0.25 * u2 + u * u2 * acc
}

/// Principal branch of Spence's function `Li2(z) = -∫_0^z ln(1-t)/t dt`,
/// with the cut on `[1, ∞)`.
pub fn dilog(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return z;
    }
    if z.re == 1.0 && z.im == 0.0 {
        return Complex64::new(PI2_6, 0.0);
    }
    let nz = z.norm_sqr();
    if nz <= 0.25 {
        return power_series(z);
    }
    let one = Complex64::new(1.0, 0.0);
    let rz = z.re;
    let (u, rest, sgn) = if rz <= 0.5 {
        if nz > 1.0 {
            let lz = (-z).ln();
            (-(one - one / z).ln(), -0.5 * lz * lz - PI2_6, -1.0)
        } else {
            (-(one - z).ln(), Complex64::new(0.0, 0.0), 1.0)
        }
    } else if nz <= 2.0 * rz {
        let u = -z.ln();
        (u, u * (one - z).ln() + PI2_6, -1.0)
    } else {
        let lz = (-z).ln();
        (-(one - one / z).ln(), -0.5 * lz * lz - PI2_6, -1.0)
    };
    sgn * bernoulli_series(u) + rest
}

/// Real part of `Li2` on the real line; continuous across the cut.
pub fn dilog_re(x: f64) -> f64 {
    dilog(Complex64::new(x, 0.0)).re
}

/// Two-argument arctangent in `(-π, π]`.
pub fn atan2_stable(y: f64, x: f64) -> Result<f64> {
    if y == 0.0 && x == 0.0 {
        return Err(Error::BothZero);
    }
    Ok(y.atan2(x))
}
