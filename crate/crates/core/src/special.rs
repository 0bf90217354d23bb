//! Complex log-gamma, digamma and Hurwitz zeta.
//!
//! Everything is evaluated in double precision. Gamma-type functions are
//! shifted up by the recurrence until the argument is far enough from the
//! origin for the Stirling series; the Hurwitz zeta function uses
//! Euler–Maclaurin summation with an explicit remainder bound.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy controls for the evaluators in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub target_abs_error: f64,
    /// Upper bound on Euler–Maclaurin correction terms (2..=30).
    pub euler_maclaurin_terms: usize,
    /// Minimum real part (or modulus, in the right half plane) before the
    /// asymptotic series is used.
    pub shift_threshold: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            target_abs_error: 1e-10,
            euler_maclaurin_terms: 30,
            shift_threshold: 10.0,
        }
    }
}

impl EvalOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_error > 0.0) {
            return Err(Error::invalid("target_abs_error must be positive"));
        }
        if !(2..=30).contains(&self.euler_maclaurin_terms) {
            return Err(Error::invalid("euler_maclaurin_terms must lie in [2, 30]"));
        }
        Ok(())
    }
}

/// Pole-proximity guard radius.
pub const POLE_GUARD: f64 = 1e-6;

/// B_{2k} / (2k)! for k = 1..=32.
#[rustfmt::skip]
const BERNOULLI_OVER_FACTORIAL: [f64; 32] = [
    0.08333333333333333, -0.001388888888888889, 3.306878306878307e-05,
    -8.267195767195768e-07, 2.08767569878681e-08, -5.284190138687493e-10,
    1.3382536530684679e-11, -3.3896802963225827e-13, 8.586062056277845e-15,
    -2.174868698558062e-16, 5.5090028283602295e-18, -1.3954464685812522e-19,
    3.534707039629467e-21, -8.953517427037546e-23, 2.267952452337683e-24,
    -5.744790668872202e-26, 1.455172475614865e-27, -3.6859949406653103e-29,
    9.336734257095045e-31, -2.36502241570063e-32, 5.990671762482134e-34,
    -1.5174548844682903e-35, 3.843758125454189e-37, -9.736353072646691e-39,
    2.466247044200681e-40, -6.247076741820743e-42, 1.5824030244644914e-43,
    -4.008273685948936e-45, 1.0153075855569557e-46, -2.5718041582418717e-48,
    6.514456035233815e-50, -1.6501309906896525e-51,
];

/// B_2 .. B_20.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn near_nonpositive_integer(s: Complex64) -> bool {
    s.re < POLE_GUARD && s.im.abs() < POLE_GUARD && (s.re - s.re.round()).abs() < POLE_GUARD
}

fn needs_shift(z: Complex64, threshold: f64) -> bool {
    z.re < threshold && !(z.re >= 0.0 && z.norm() >= threshold)
}

/// Principal branch of log Γ(s): analytic off the non-positive real axis and
/// agreeing with the real log-gamma on the positive axis.
pub fn log_gamma(s: Complex64) -> Result<Complex64> {
    log_gamma_with(s, &EvalOptions::default())
}

pub fn log_gamma_with(s: Complex64, opts: &EvalOptions) -> Result<Complex64> {
    if near_nonpositive_integer(s) {
        return Err(Error::Pole { function: "log_gamma", s });
    }
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while needs_shift(z, opts.shift_threshold) {
        shift += z.ln();
        z += 1.0;
    }
    Ok(stirling_log_gamma(z) - shift)
}

fn stirling_log_gamma(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI.iter().enumerate().take(9) {
        let n = 2.0 * (k as f64 + 1.0);
        series += pow * (b / (n * (n - 1.0)));
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series
}

/// ψ(s) = Γ'(s)/Γ(s).
pub fn digamma(s: Complex64) -> Result<Complex64> {
    digamma_with(s, &EvalOptions::default())
}

pub fn digamma_with(s: Complex64, opts: &EvalOptions) -> Result<Complex64> {
    if near_nonpositive_integer(s) {
        return Err(Error::Pole { function: "digamma", s });
    }
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while needs_shift(z, opts.shift_threshold) {
        shift += z.inv();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for (k, b) in BERNOULLI.iter().enumerate().take(9) {
        let n = 2.0 * (k as f64 + 1.0);
        series += pow * (b / n);
        pow *= inv2;
    }
    Ok(z.ln() - 0.5 * inv - series - shift)
}

/// Hurwitz zeta ζ(s, a) for `a` in (0, 1].
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    hurwitz_zeta_with(s, a, &EvalOptions::default())
}

pub fn hurwitz_zeta_with(s: Complex64, a: f64, opts: &EvalOptions) -> Result<Complex64> {
    if (s - 1.0).norm() < POLE_GUARD {
        return Err(Error::Pole { function: "hurwitz_zeta", s });
    }
    let reg = hurwitz_euler_maclaurin(s, a, opts, true)?;
    Ok(reg + (s - 1.0).inv())
}

/// ζ(s, a) − 1/(s − 1), analytic at s = 1 (where it equals −ψ(a)).
pub fn hurwitz_zeta_regularized(s: Complex64, a: f64, opts: &EvalOptions) -> Result<Complex64> {
    hurwitz_euler_maclaurin(s, a, opts, true)
}

/// (e^w − 1)/w, accurate near w = 0.
fn phi1(w: Complex64) -> Complex64 {
    if w.norm() < 1e-2 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..12 {
            term = term * w / k as f64;
            sum += term;
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

fn hurwitz_euler_maclaurin(s: Complex64, a: f64, opts: &EvalOptions, regularize: bool) -> Result<Complex64> {
    opts.validate()?;
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid(format!("Hurwitz parameter a = {a} outside (0, 1]")));
    }
    let max_terms = opts.euler_maclaurin_terms;
    let mut n_terms = (s.norm() / std::f64::consts::PI).ceil().max(12.0) as usize;
    if s.re < 0.0 {
        n_terms += (-s.re).ceil() as usize;
    }
    loop {
        let (value, remainder) = em_sum(s, a, n_terms, max_terms, opts.target_abs_error, regularize);
        if remainder <= opts.target_abs_error {
            return Ok(value);
        }
        if n_terms > 2_000_000 {
            return Err(Error::Quadrature(format!(
                "Euler-Maclaurin remainder {remainder:e} at s = {s} exceeds target"
            )));
        }
        n_terms *= 2;
    }
}

/// Returns the Euler–Maclaurin value with `n` direct terms and the bound on
/// the neglected remainder.
fn em_sum(s: Complex64, a: f64, n: usize, max_terms: usize, target: f64, regularize: bool) -> (Complex64, f64) {
    let mut direct = Complex64::new(0.0, 0.0);
    for k in 0..n {
        direct += pow_neg(k as f64 + a, s);
    }
    let x = n as f64 + a;
    let lnx = x.ln();
    let x_neg_s = pow_neg(x, s);
    // ∫_x^∞ u^{-s} du = x^{1-s}/(s-1); the regularized form drops 1/(s-1).
    let integral = if regularize {
        -lnx * phi1((1.0 - s) * lnx)
    } else {
        x_neg_s * x / (s - 1.0)
    };
    let mut total = direct + integral + 0.5 * x_neg_s;

    // T_k = B_{2k}/(2k)! * s(s+1)...(s+2k-2) * x^{-s-2k+1}
    let mut rising = s;
    let mut xpow = x_neg_s / x;
    let inv_x2 = 1.0 / (x * x);
    let mut remainder = f64::INFINITY;
    for k in 1..=max_terms {
        let term = rising * xpow * BERNOULLI_OVER_FACTORIAL[k - 1];
        total += term;
        let kk = 2.0 * k as f64;
        rising = rising * (s + kk - 1.0) * (s + kk);
        xpow *= inv_x2;
        let next = (rising * xpow).norm() * BERNOULLI_OVER_FACTORIAL[k].abs();
        let sigma_shift = s.re + kk + 1.0;
        if sigma_shift > 0.0 {
            remainder = next * (s + kk + 1.0).norm() / sigma_shift;
            if remainder <= target * 1e-2 {
                break;
            }
        }
    }
    (total, remainder)
}

/// x^{-s} for real x > 0.
#[inline]
pub(crate) fn pow_neg(x: f64, s: Complex64) -> Complex64 {
    let l = x.ln();
    let mag = (-s.re * l).exp();
    let (sin, cos) = (s.im * l).sin_cos();
    Complex64::new(mag * cos, -mag * sin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_special_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
    }

    #[test]
    fn log_gamma_recurrence() {
        let s = c(2.5, 3.0);
        let d = log_gamma(s + 1.0).unwrap() - log_gamma(s).unwrap() - s.ln();
        assert!(d.norm() < 1e-12, "{d}");
    }

    #[test]
    fn log_gamma_pole_is_an_error() {
        for k in 0..4 {
            assert!(matches!(log_gamma(c(-(k as f64), 0.0)), Err(Error::Pole { .. })));
        }
        assert!(digamma(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn digamma_special_values() {
        // −γ from the harmonic-number limit, computed independently below.
        let n = 2_000_000u64;
        let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        let euler_gamma = harmonic - (n as f64).ln() - 0.5 / n as f64 + 1.0 / (12.0 * (n as f64).powi(2));
        let d1 = digamma(c(1.0, 0.0)).unwrap();
        assert!((d1.re + euler_gamma).abs() < 1e-12, "{d1}");
        let dh = digamma(c(0.5, 0.0)).unwrap();
        assert!((dh.re - (-euler_gamma - 2.0 * 2f64.ln())).abs() < 1e-12);
        assert!((dh.re + 1.963_510_026_021_423_5).abs() < 1e-13);
    }

    #[test]
    fn digamma_recurrence() {
        let s = c(0.25, 5.0);
        let d = digamma(s + 1.0).unwrap() - digamma(s).unwrap() - s.inv();
        assert!(d.norm() < 1e-12, "{d}");
    }

    #[test]
    fn digamma_is_derivative_of_log_gamma() {
        let s = c(0.3, 7.5);
        let h = 1e-5;
        let fd = (log_gamma(s + h).unwrap() - log_gamma(s - h).unwrap()) / (2.0 * h);
        assert!((fd - digamma(s).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn hurwitz_basel() {
        let z2 = hurwitz_zeta(c(2.0, 0.0), 1.0).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-12);
        // direct summation oracle with integral tail
        let n = 1_000_000;
        let direct: f64 = (1..=n).map(|k| 1.0 / (k as f64).powi(2)).sum::<f64>() + 1.0 / n as f64
            - 0.5 / (n as f64).powi(2);
        assert!((z2.re - direct).abs() < 1e-10);
    }

    #[test]
    fn hurwitz_half_split_identity() {
        let s = c(3.0, 0.0);
        let lhs = hurwitz_zeta(s, 0.5).unwrap();
        let rhs = (2f64.powf(3.0) - 1.0) * hurwitz_zeta(s, 1.0).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn hurwitz_on_critical_line_matches_reference() {
        // mpmath.zeta(0.5+14j, 1/3) to 30 digits
        let want = c(-1.935_546_843_172_548_9, 1.898_452_647_231_733_9);
        let got = hurwitz_zeta(c(0.5, 14.0), 1.0 / 3.0).unwrap();
        assert!((got - want).norm() < 1e-9, "{got}");
        // independent oracle: long direct sum + first Euler-Maclaurin corrections
        let s = c(0.5, 14.0);
        let a = 1.0 / 3.0;
        let n = 20_000;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..n {
            sum += (-s * (k as f64 + a).ln()).exp();
        }
        let x = n as f64 + a;
        let xs = (-s * x.ln()).exp();
        sum += xs * x / (s - 1.0) + 0.5 * xs + s * xs / x / 12.0;
        assert!((got - sum).norm() < 1e-8, "{got} vs {sum}");
    }

    #[test]
    fn hurwitz_pole() {
        assert!(hurwitz_zeta(c(1.0, 0.0), 0.5).is_err());
        let reg = hurwitz_zeta_regularized(c(1.0, 0.0), 0.5, &EvalOptions::default()).unwrap();
        let psi = digamma(c(0.5, 0.0)).unwrap();
        assert!((reg + psi).norm() < 1e-11);
    }

    #[test]
    fn hurwitz_high_on_the_line() {
        // ζ(1/2 + 1000i) from mpmath
        let got = hurwitz_zeta(c(0.5, 1000.0), 1.0).unwrap();
        let want = c(0.356_334_367_194_396_06, 0.931_997_831_232_993_7);
        assert!((got - want).norm() < 1e-8, "{got}");
    }
}
