//! Definite integrals of rational functions times logarithms of linear or
//! quadratic factors, in closed form over real intervals.
//!
//! Every value is returned together with the sum of magnitudes of the terms
//! that were added, which bounds the cancellation error.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::dilog;

/// Slope below which a linear factor is treated as a constant, relative to its offset.
const SLOPE_TOL: f64 = 1e-14;
/// Roots closer than this (relative) are merged.
const MERGE_TOL: f64 = 1e-12;

/// Running sum of a definite integral and of the magnitudes it was built from.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accum {
    pub value: f64,
    pub magnitude: f64,
}

impl Accum {
    pub fn add(&mut self, coeff: f64, lo: f64, hi: f64) {
        self.add_terms(coeff, (lo, lo.abs()), (hi, hi.abs()));
    }

    /// Adds `coeff * (hi - lo)` where each end carries its own magnitude.
    pub fn add_terms(&mut self, coeff: f64, lo: (f64, f64), hi: (f64, f64)) {
        self.value += coeff * (hi.0 - lo.0);
        self.magnitude += coeff.abs() * (hi.1 + lo.1);
    }

    pub fn merge(&mut self, other: Accum, sign: f64) {
        self.value += sign * other.value;
        self.magnitude += other.magnitude;
    }

    /// Estimated absolute rounding error.
    pub fn error(&self) -> f64 {
        4.0 * f64::EPSILON * self.magnitude
    }
}

/// `s x + o`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lin {
    pub s: f64,
    pub o: f64,
}

impl Lin {
    pub fn new(s: f64, o: f64) -> Self {
        Self { s, o }
    }

    pub fn eval(self, x: f64) -> f64 {
        self.s * x + self.o
    }

    fn is_constant(self) -> bool {
        self.s.abs() <= SLOPE_TOL * self.o.abs()
    }
}

impl std::ops::Add for Lin {
    type Output = Lin;

    fn add(self, rhs: Lin) -> Lin {
        Lin::new(self.s + rhs.s, self.o + rhs.o)
    }
}

impl std::ops::Sub for Lin {
    type Output = Lin;

    fn sub(self, rhs: Lin) -> Lin {
        Lin::new(self.s - rhs.s, self.o - rhs.o)
    }
}

/// Polynomial with ascending coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &p) in self.0.iter().enumerate() {
            for (j, &q) in other.0.iter().enumerate() {
                out[i + j] += p * q;
            }
        }
        Poly(out)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n)
            .map(|i| self.0.get(i).unwrap_or(&0.0) + other.0.get(i).unwrap_or(&0.0))
            .collect())
    }

    /// Coefficients of `p(r + t)` in powers of `t`.
    fn shifted(&self, r: f64) -> Vec<f64> {
        let mut c = self.0.clone();
        let n = c.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                c[j] += r * c[j + 1];
            }
        }
        c
    }

    /// Quotient and remainder of division by a monic polynomial.
    fn divrem_monic(&self, den: &Poly) -> (Poly, Poly) {
        let dn = den.0.len() - 1;
        if self.0.len() <= dn {
            return (Poly::constant(0.0), self.clone());
        }
        let mut rem = self.0.clone();
        let mut quot = vec![0.0; self.0.len() - dn];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dn];
            quot[k] = q;
            for j in 0..=dn {
                rem[k + j] -= q * den.0[j];
            }
        }
        rem.truncate(dn.max(1));
        (Poly(quot), Poly(rem))
    }
}

/// `k * num / prod(den)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rat {
    pub num: Poly,
    pub den: Vec<Lin>,
}

impl Rat {
    pub fn new(num: Poly, den: Vec<Lin>) -> Self {
        Self { num, den }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.num.eval(x) / self.den.iter().map(|l| l.eval(x)).product::<f64>()
    }
}

/// Pole of order `coeffs.len()`: `sum_k coeffs[k-1] / (x - r)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pole {
    pub r: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractions {
    pub poly: Poly,
    pub poles: Vec<Pole>,
}

impl PartialFractions {
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.poly.eval(x);
        for p in &self.poles {
            let mut w = 1.0;
            for c in &p.coeffs {
                w /= x - p.r;
                v += c * w;
            }
        }
        v
    }
}

/// Truncated power series quotient `n / w` up to `t^(m-1)`.
fn series_div(n: &[f64], w: &[f64], m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for k in 0..m {
        let mut v = n.get(k).copied().unwrap_or(0.0);
        for (j, o) in out.iter().enumerate().take(k) {
            v -= o * w.get(k - j).copied().unwrap_or(0.0);
        }
        out[k] = v / w[0];
    }
    out
}

pub fn partial_fractions(rat: &Rat) -> Result<PartialFractions> {
    let mut k = 1.0;
    let mut roots: Vec<(f64, usize)> = Vec::new();
    for l in &rat.den {
        if l.is_constant() {
            if l.o == 0.0 {
                return Err(Error::DegenerateDenominator);
            }
            k /= l.o;
            continue;
        }
        k /= l.s;
        let r = -l.o / l.s;
        match roots.iter_mut().find(|(q, _)| (q - r).abs() <= MERGE_TOL * q.abs().max(1.0)) {
            Some(entry) => entry.1 += 1,
            None => roots.push((r, 1)),
        }
    }
    let num = rat.num.scale(k);
    let mut den = Poly::constant(1.0);
    for &(r, m) in &roots {
        for _ in 0..m {
            den = den.mul(&Poly(vec![-r, 1.0]));
        }
    }
    let (poly, rem) = num.divrem_monic(&den);
    let mut poles = Vec::with_capacity(roots.len());
    for (i, &(r, m)) in roots.iter().enumerate() {
        let mut w = Poly::constant(1.0);
        for (j, &(q, mq)) in roots.iter().enumerate() {
            if j != i {
                for _ in 0..mq {
                    w = w.mul(&Poly(vec![-q, 1.0]));
                }
            }
        }
        let taylor = series_div(&rem.shifted(r), &w.shifted(r), m);
        let coeffs = (0..m).map(|j| taylor[m - 1 - j]).collect();
        poles.push(Pole { r, coeffs });
    }
    Ok(PartialFractions { poly, poles })
}

/// Argument of a logarithm `ln|arg(x)|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogArg {
    Linear(Lin),
    /// `t0 x² + t1 x + t2`.
    Quadratic(f64, f64, f64),
}

/// `ln|arg(x)| = constant + sum_i Re ln(x - rho_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSplit {
    pub constant: f64,
    pub roots: Vec<Complex64>,
}

impl LogSplit {
    pub fn eval(&self, x: f64) -> f64 {
        self.constant + self.roots.iter().map(|r| (x - r).norm().ln()).sum::<f64>()
    }
}

fn split_linear(l: Lin) -> Result<LogSplit> {
    if l.is_constant() {
        if l.o == 0.0 {
            return Err(Error::DegenerateDenominator);
        }
        return Ok(LogSplit { constant: l.o.abs().ln(), roots: vec![] });
    }
    Ok(LogSplit {
        constant: l.s.abs().ln(),
        roots: vec![Complex64::new(-l.o / l.s, 0.0)],
    })
}

pub fn split_log(arg: LogArg) -> Result<LogSplit> {
    match arg {
        LogArg::Linear(l) => split_linear(l),
        LogArg::Quadratic(t0, t1, t2) => {
            if t0.abs() <= SLOPE_TOL * t1.abs().max(t2.abs()) {
                return split_linear(Lin::new(t1, t2));
            }
            let disc = t1 * t1 - 4.0 * t0 * t2;
            let roots = if disc >= 0.0 {
                let q = -0.5 * (t1 + t1.signum() * disc.sqrt());
                if q == 0.0 {
                    vec![Complex64::new(0.0, 0.0); 2]
                } else {
                    vec![Complex64::new(q / t0, 0.0), Complex64::new(t2 / q, 0.0)]
                }
            } else {
                let re = -t1 / (2.0 * t0);
                let im = (-disc).sqrt() / (2.0 * t0.abs());
                vec![Complex64::new(re, im), Complex64::new(re, -im)]
            };
            Ok(LogSplit { constant: t0.abs().ln(), roots })
        }
    }
}

fn xlog(u: Complex64) -> Complex64 {
    if u == Complex64::new(0.0, 0.0) {
        u
    } else {
        u * u.ln()
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Antiderivative of `x^n Re ln(x - rho)`, with its term magnitude.
fn poly_log_prim(n: usize, rho: Complex64, x: f64) -> (f64, f64) {
    let u = x - rho;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    let mut upow = Complex64::new(1.0, 0.0);
    for j in 0..=n {
        let jp = (j + 1) as f64;
        let coef = binom(n, j) * rho.powu((n - j) as u32);
        // u^(j+1) ln u / (j+1) - u^(j+1) / (j+1)²
        let p = coef * upow * xlog(u) / jp;
        let q = coef * upow * u / (jp * jp);
        sum += p - q;
        mag += p.norm() + q.norm();
        upow *= u;
    }
    (sum.re, mag)
}

fn near(rho: Complex64, r: f64) -> bool {
    rho.im == 0.0 && (rho.re - r).abs() <= MERGE_TOL * r.abs().max(1.0)
}

/// Antiderivative of `Re ln(x - rho) / (x - r)^k` for `k = 1, 2`, with its term magnitude.
fn pole_log_prim(k: usize, r: f64, rho: Complex64, x: f64) -> Result<(f64, f64)> {
    let xr = x - r;
    let lxr = xr.abs().ln();
    let v = match k {
        1 if near(rho, r) => {
            let v = 0.5 * lxr * lxr;
            (v, v.abs())
        }
        1 => {
            let w = Complex64::new(xr, 0.0) / (rho - r);
            let p = (r - rho).ln().re * lxr;
            let q = dilog(w).re;
            (p - q, p.abs() + q.abs())
        }
        2 if near(rho, r) => (-(lxr + 1.0) / xr, (lxr.abs() + 1.0) / xr.abs()),
        2 => {
            let rr = r - rho;
            let p = -xlog(x - rho) / (xr * rr);
            let q = lxr / rr;
            ((p + q).re, p.norm() + q.norm())
        }
        _ => return Err(Error::DegenerateDenominator),
    };
    Ok((check(v.0)?, check(v.1)?))
}

/// Antiderivative of `1 / (x - r)^k`.
fn pole_prim(k: usize, r: f64, x: f64) -> f64 {
    let xr = x - r;
    if k == 1 {
        xr.abs().ln()
    } else {
        -1.0 / ((k - 1) as f64 * xr.powi(k as i32 - 1))
    }
}

fn check(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DegenerateDenominator)
    }
}

/// `∫_{x0}^{x1} pf(x) dx`.
pub fn integrate_pf(pf: &PartialFractions, x0: f64, x1: f64) -> Result<Accum> {
    let mut acc = Accum::default();
    for (n, &c) in pf.poly.0.iter().enumerate() {
        let m = (n + 1) as f64;
        acc.add(c / m, x0.powi(n as i32 + 1), x1.powi(n as i32 + 1));
    }
    for p in &pf.poles {
        for (j, &c) in p.coeffs.iter().enumerate() {
            acc.add(c, check(pole_prim(j + 1, p.r, x0))?, check(pole_prim(j + 1, p.r, x1))?);
        }
    }
    if !acc.value.is_finite() {
        return Err(Error::DegenerateDenominator);
    }
    Ok(acc)
}

/// `∫_{x0}^{x1} pf(x) ln|arg(x)| dx`.
pub fn integrate_pf_log(pf: &PartialFractions, log: &LogSplit, x0: f64, x1: f64) -> Result<Accum> {
    let mut acc = integrate_pf(pf, x0, x1)?;
    acc.value *= log.constant;
    acc.magnitude *= log.constant.abs();
    for &rho in &log.roots {
        for (n, &c) in pf.poly.0.iter().enumerate() {
            acc.add_terms(c, poly_log_prim(n, rho, x0), poly_log_prim(n, rho, x1));
        }
        for p in &pf.poles {
            for (j, &c) in p.coeffs.iter().enumerate() {
                acc.add_terms(c, pole_log_prim(j + 1, p.r, rho, x0)?, pole_log_prim(j + 1, p.r, rho, x1)?);
            }
        }
    }
    Ok(acc)
}
