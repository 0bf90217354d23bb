//! The localized explicit formula: for h_t(r) = h(L(r − t)),
//!
//!   Σ_γ h_t(γ) = pole + arch − prime,
//!
//! evaluated piece by piece with an explicit truncation budget.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::prime_powers_up_to;
use crate::data::SelbergDatum;
use crate::error::{Error, Result};
use crate::fourier::FourierPair;
use crate::quad::GaussLegendre;
use crate::special::digamma;
use crate::zeros::{fit_count_constant, scan_zeros, ZeroList};

/// Hard tolerance added to the budget when deciding pass/fail.
pub const HARD_TOLERANCE: f64 = 1e-4;
/// Envelope level at the edge of the archimedean integration window.
pub const ARCH_EDGE: f64 = 1e-10;
/// Floor on the archimedean quadrature error estimate.
pub const QUAD_FLOOR: f64 = 1e-10;
/// Largest prime-power cutoff the prime side will enumerate.
pub const MAX_PRIME_CUTOFF: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EFParams {
    pub t: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub zero_height: f64,
    /// Half-width of the archimedean window around t; derived from the
    /// envelope when absent.
    pub quad_halfwidth: Option<f64>,
    /// Gauss–Legendre nodes per archimedean panel.
    pub quad_points: usize,
}

impl EFParams {
    pub fn new(t: f64, l: f64, zero_height: f64) -> Self {
        Self { t, l, zero_height, quad_halfwidth: None, quad_points: 10 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::invalid(format!("L = {} must be positive", self.l)));
        }
        if !(self.zero_height > 0.0) {
            return Err(Error::invalid(format!("zero_height = {} must be positive", self.zero_height)));
        }
        if !self.t.is_finite() {
            return Err(Error::invalid("t must be finite"));
        }
        if self.quad_points < 4 {
            return Err(Error::invalid("quad_points must be at least 4"));
        }
        if let Some(h) = self.quad_halfwidth {
            if !(h > 0.0) {
                return Err(Error::invalid("quad_halfwidth must be positive"));
            }
        }
        Ok(())
    }

    /// exp(support·L); g(log n / L) vanishes beyond it.
    pub fn prime_cutoff(&self, pair: &FourierPair) -> f64 {
        (pair.support_halfwidth * self.l).exp()
    }
}

/// m·(h(L(−i/2 − t)) + h(L(i/2 − t))): the pole at s = 1 and its mirror at
/// s = 0 seen as "zeros" with ordinates ∓i/2.
pub fn pole_term(f: &SelbergDatum, pair: &FourierPair, p: &EFParams) -> Complex64 {
    let m = f.pole_order() as f64;
    if m == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = Complex64::new(-p.t, -0.5) * p.l;
    let b = Complex64::new(-p.t, 0.5) * p.l;
    (pair.h(a) + pair.h(b)) * m
}

/// The archimedean density (2 log Q + 2 Re Σ λ ψ(λ(1/2 + ir) + μ))/(2π).
pub fn arch_density(f: &SelbergDatum, r: f64) -> f64 {
    let s = Complex64::new(0.5, r);
    // Re(λ/2 + μ) > 0 keeps the argument off the poles; NaN flags anything else.
    let psi: f64 =
        f.gamma_factors().iter().map(|gf| gf.lambda * digamma(gf.argument(s)).map_or(f64::NAN, |v| v.re)).sum();
    (2.0 * f.conductor_scale().ln() + 2.0 * psi) / (2.0 * PI)
}

/// Majorant of |arch_density| at |r| ≤ rmax, nondecreasing in rmax.
fn arch_density_bound(f: &SelbergDatum, rmax: f64) -> f64 {
    let psi: f64 = f
        .gamma_factors()
        .iter()
        .map(|gf| {
            let z = gf.lambda * (rmax + 1.0) + gf.mu.norm();
            let re = 0.5 * gf.lambda + gf.mu.re;
            gf.lambda * ((z + 1.0).ln() + PI / 2.0 + 1.0 + 1.0 / re)
        })
        .sum();
    (2.0 * f.conductor_scale().ln().abs() + 2.0 * psi) / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchEval {
    pub value: f64,
    pub quad_error: f64,
    pub tail: f64,
}

/// Smallest y (on a 5% geometric grid) with envelope(y) < level.
fn envelope_radius(pair: &FourierPair, level: f64) -> f64 {
    let target = level.ln();
    let mut y = 1.0;
    while pair.log_envelope(y) >= target {
        y *= 1.05;
    }
    y
}

/// (1/2π)∫ h(L(r − t))·(2 log Q + 2 Re Σ λψ) dr over |r − t| ≤ halfwidth,
/// with an envelope bound for the rest.
pub fn arch_term_detailed(f: &SelbergDatum, pair: &FourierPair, p: &EFParams) -> Result<ArchEval> {
    p.validate()?;
    let (t, l) = (p.t, p.l);
    let half = p.quad_halfwidth.unwrap_or_else(|| envelope_radius(pair, ARCH_EDGE) / l);
    let width = PI / (l * pair.support_halfwidth);
    let panels = (2.0 * half / width).ceil().max(1.0) as usize;
    let width = 2.0 * half / panels as f64;
    let hi = GaussLegendre::new(p.quad_points);
    let lo = GaussLegendre::new(p.quad_points - 2);
    let (mut a_hi, mut a_lo) = (0.0, 0.0);
    for k in 0..panels {
        let a = t - half + k as f64 * width;
        let b = a + width;
        let f_r = |r: f64| pair.h_real(l * (r - t)) * arch_density(f, r);
        a_hi += hi.integrate(a, b, f_r);
        a_lo += lo.integrate(a, b, f_r);
    }
    if !a_hi.is_finite() || !a_lo.is_finite() {
        return Err(Error::Quadrature(format!("archimedean integrand not finite near t = {t}")));
    }
    let weight = |y: f64| arch_density_bound(f, t.abs() + y / l);
    let tail = 2.0 / l * pair.weighted_envelope_tail(l * half, &weight, 0.5);
    Ok(ArchEval { value: a_hi, quad_error: (a_hi - a_lo).abs().max(QUAD_FLOOR), tail })
}

pub fn arch_term(f: &SelbergDatum, pair: &FourierPair, p: &EFParams) -> Result<Complex64> {
    Ok(Complex64::new(arch_term_detailed(f, pair, p)?.value, 0.0))
}

/// Precomputed prime side: (log n, b(n)Λ(n)·n^{−1/2}·g(log n / L)/L) for
/// prime powers n below the cutoff.
#[derive(Debug, Clone)]
pub struct PrimeSide {
    terms: Vec<(f64, Complex64)>,
}

impl PrimeSide {
    pub fn new(f: &SelbergDatum, pair: &FourierPair, l: f64) -> Result<Self> {
        Self::from_coefficients(&|n| f.b_lambda(n), pair, l)
    }

    /// Prime side of F minus that of G.
    pub fn difference(f: &SelbergDatum, g: &SelbergDatum, pair: &FourierPair, l: f64) -> Result<Self> {
        Self::from_coefficients(&|n| f.b_lambda(n) - g.b_lambda(n), pair, l)
    }

    fn from_coefficients(coef: &dyn Fn(u64) -> Complex64, pair: &FourierPair, l: f64) -> Result<Self> {
        let cutoff = (pair.support_halfwidth * l).exp();
        if cutoff > MAX_PRIME_CUTOFF {
            return Err(Error::invalid(format!("prime cutoff {cutoff:.3e} exceeds {MAX_PRIME_CUTOFF:e}")));
        }
        let mut terms = Vec::new();
        for (n, _) in prime_powers_up_to(cutoff.floor() as u64) {
            let c = coef(n);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ln = (n as f64).ln();
            let gv = pair.g(ln / l)?;
            if gv != 0.0 {
                terms.push((ln, c * (gv / ((n as f64).sqrt() * l))));
            }
        }
        Ok(Self { terms })
    }

    /// (1/L)Σ g(log n/L)(c(n) n^{−1/2−it} + conj(c(n)) n^{−1/2+it}).
    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, &(ln, c)| {
            let e = Complex64::from_polar(1.0, -t * ln);
            acc + c * e + c.conj() * e.conj()
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

pub fn prime_term(f: &SelbergDatum, pair: &FourierPair, p: &EFParams) -> Result<Complex64> {
    p.validate()?;
    Ok(PrimeSide::new(f, pair, p.l)?.eval(p.t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroSum {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Σ h(L(γ − t)) over zeros with |γ| ≤ zero_height (both half lines), plus
/// a bound for the zeros above the cutoff.
pub fn zero_sum(f: &SelbergDatum, zeros: &ZeroList, pair: &FourierPair, p: &EFParams) -> Result<ZeroSum> {
    p.validate()?;
    zeros.require(p.zero_height)?;
    let h = p.zero_height;
    if h <= p.t.abs() {
        return Err(Error::invalid(format!("zero_height {h} must exceed |t| = {}", p.t.abs())));
    }
    let value: f64 = zeros.signed_ordinates().filter(|g| g.abs() <= h).map(|g| pair.h_real(p.l * (g - p.t))).sum();
    Ok(ZeroSum { value: Complex64::new(value, 0.0), tail_bound: zero_tail_bound(f, pair, p)? })
}

/// Bound for Σ_{|γ| > H} |h(L(γ − t))|. With one-sided density
/// ρ(γ) = (d/2π)(log γ + 1) + max(c_F, 0)/2 and count fluctuation at most
/// 1 + d·log H, each half line contributes at most
/// 2·(∫_H^∞ ρ(γ)·env(L(γ ∓ t)) dγ + (1 + d log H)·env(L(H ∓ t))).
pub fn zero_tail_bound(f: &SelbergDatum, pair: &FourierPair, p: &EFParams) -> Result<f64> {
    let (h, t, l) = (p.zero_height, p.t, p.l);
    let d = f.degree();
    let c = fit_count_constant(f)?.max(0.0);
    let mut total = 0.0;
    for shift in [t, -t] {
        let rho = |y: f64| {
            let gamma = (shift + y / l).max(h);
            d / (2.0 * PI) * (gamma.ln() + 1.0) + c / 2.0
        };
        let y0 = l * (h - shift);
        let integral = pair.weighted_envelope_tail(y0, &rho, 0.5) / l;
        total += 2.0 * (integral + (1.0 + d * h.ln()) * pair.envelope(y0));
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetParts {
    pub zero_tail: f64,
    pub quadrature: f64,
    pub prime_tail: f64,
    pub pair_truncation: f64,
}

impl BudgetParts {
    pub fn total(&self) -> f64 {
        self.zero_tail + self.quadrature + self.prime_tail + self.pair_truncation
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EFReport {
    pub datum: String,
    pub pair: String,
    pub params: EFParams,
    pub prime_cutoff: f64,
    pub zero_sum: Complex64,
    pub pole_term: Complex64,
    pub arch_term: Complex64,
    pub prime_term: Complex64,
    pub residual: f64,
    pub budget: f64,
    pub pass: bool,
    #[serde(skip)]
    pub budget_parts: BudgetParts,
}

/// Assembles the four pieces against a certified zero list.
pub fn verify_formula_with_zeros(
    f: &SelbergDatum,
    zeros: &ZeroList,
    pair: &FourierPair,
    p: &EFParams,
) -> Result<EFReport> {
    p.validate()?;
    let zs = zero_sum(f, zeros, pair, p)?;
    let pole = pole_term(f, pair, p);
    let arch = arch_term_detailed(f, pair, p)?;
    let prime = prime_term(f, pair, p)?;
    let residual = (zs.value - pole - Complex64::new(arch.value, 0.0) + prime).norm();
    // The prime sum is exact (g vanishes past the cutoff) and a truncated
    // product is itself an admissible pair, so those two terms are zero.
    let parts = BudgetParts {
        zero_tail: zs.tail_bound,
        quadrature: arch.quad_error + arch.tail,
        prime_tail: 0.0,
        pair_truncation: 0.0,
    };
    let budget = parts.total();
    Ok(EFReport {
        datum: f.name().to_string(),
        pair: pair.label(),
        params: *p,
        prime_cutoff: p.prime_cutoff(pair),
        zero_sum: zs.value,
        pole_term: pole,
        arch_term: Complex64::new(arch.value, 0.0),
        prime_term: prime,
        residual,
        budget,
        pass: residual <= budget + HARD_TOLERANCE,
        budget_parts: parts,
    })
}

/// Scans zeros up to the zero height, then verifies.
pub fn verify_formula(f: &SelbergDatum, pair: &FourierPair, p: &EFParams) -> Result<EFReport> {
    p.validate()?;
    let zeros = scan_zeros(f, p.zero_height, None)?;
    verify_formula_with_zeros(f, &zeros, pair, p)
}

/// g(0)·d·log t / L.
pub fn stirling_h(f: &SelbergDatum, pair: &FourierPair, t: f64, l: f64) -> Result<f64> {
    if !(t > 0.0 && l > 0.0) {
        return Err(Error::invalid(format!("stirling_h needs t > 0 and L > 0 (got {t}, {l})")));
    }
    Ok(pair.g(0.0)? * f.degree() * t.ln() / l)
}

/// Chebyshev interpolant of t ↦ arch_term(t) on [a, b] with an empirical
/// error bound from off-node checks.
#[derive(Debug, Clone)]
pub struct ArchInterpolant {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
    pub error_bound: f64,
}

impl ArchInterpolant {
    pub fn new(f: &SelbergDatum, pair: &FourierPair, l: f64, a: f64, b: f64, degree: usize) -> Result<Self> {
        let n = degree + 1;
        let nodes: Vec<f64> = (0..n).map(|k| (PI * (k as f64 + 0.5) / n as f64).cos()).collect();
        let at = |x: f64| -> Result<ArchEval> {
            let t = 0.5 * (a + b) + 0.5 * (b - a) * x;
            arch_term_detailed(f, pair, &EFParams::new(t, l, f64::MAX))
        };
        let evals: Vec<ArchEval> = nodes.par_iter().map(|&x| at(x)).collect::<Result<_>>()?;
        let coeffs: Vec<f64> = (0..n)
            .map(|j| {
                let s: f64 = (0..n).map(|k| evals[k].value * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos()).sum();
                s * 2.0 / n as f64 * if j == 0 { 0.5 } else { 1.0 }
            })
            .collect();
        let mut interp = Self { a, b, coeffs, error_bound: 0.0 };
        let checks: Vec<f64> = (0..16).map(|k| -1.0 + (2.0 * k as f64 + 1.0) / 16.0 + 0.013).collect();
        let check_vals: Vec<ArchEval> = checks.par_iter().map(|&x| at(x)).collect::<Result<_>>()?;
        let max_dev = checks
            .iter()
            .zip(&check_vals)
            .map(|(&x, e)| (interp.eval(0.5 * (a + b) + 0.5 * (b - a) * x) - e.value).abs())
            .fold(0.0, f64::max);
        let per_point = evals.iter().chain(&check_vals).map(|e| e.quad_error + e.tail).fold(0.0, f64::max);
        interp.error_bound = 2.0 * max_dev + per_point;
        Ok(interp)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = (2.0 * t - self.a - self.b) / (self.b - self.a);
        // Clenshaw recurrence.
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }
}
