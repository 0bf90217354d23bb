//! Evaluation of built-in L-functions, their completions Φ and the
//! functional-equation residual.

use num_complex::Complex64;

use crate::data::{Evaluator, SelbergDatum};
use crate::error::{Error, Result};
use crate::special::{hurwitz_zeta_regularized, hurwitz_zeta_with, log_gamma_with, EvalOptions, POLE_GUARD};

/// F(s) for zeta, primitive Dirichlet L-functions and products thereof.
pub fn l_value(f: &SelbergDatum, s: Complex64) -> Result<Complex64> {
    l_value_with(f, s, &EvalOptions::default())
}

pub fn l_value_with(f: &SelbergDatum, s: Complex64, opts: &EvalOptions) -> Result<Complex64> {
    if f.pole_order() > 0 && (s - 1.0).norm() < POLE_GUARD {
        return Err(Error::Pole { function: "l_value", s });
    }
    match f.evaluator() {
        Evaluator::Zeta => hurwitz_zeta_with(s, 1.0, opts),
        Evaluator::Dirichlet(chi) => {
            let q = chi.modulus();
            let qf = q as f64;
            // Σ χ(a) = 0, so the 1/(s−1) parts cancel and the regularized
            // Hurwitz values give L(s, χ) uniformly, including at s = 1.
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, &v) in chi.values().iter().enumerate().skip(1) {
                if v.norm() == 0.0 {
                    continue;
                }
                acc += v * hurwitz_zeta_regularized(s, a as f64 / qf, opts)?;
            }
            Ok(acc * crate::special::pow_neg(qf, s))
        }
        Evaluator::Product(factors) => {
            let mut acc = Complex64::new(1.0, 0.0);
            for g in factors {
                acc *= l_value_with(g, s, opts)?;
            }
            Ok(acc)
        }
        Evaluator::CoefficientsOnly => Err(Error::Unsupported(f.name().to_string())),
    }
}

/// log(Q^s Γ_F(s)) = s log Q + Σ_j log Γ(λ_j s + μ_j), principal log-gamma.
pub fn log_gamma_factor(f: &SelbergDatum, s: Complex64) -> Result<Complex64> {
    let opts = EvalOptions::default();
    let mut acc = s * f.conductor_scale().ln();
    for g in f.gamma_factors() {
        acc += log_gamma_with(g.argument(s), &opts)?;
    }
    Ok(acc)
}

/// log Φ_F(s), accumulated in log space. Returns `-inf` real part when F(s) = 0.
pub fn log_completed_phi(f: &SelbergDatum, s: Complex64) -> Result<Complex64> {
    if f.pole_order() > 0 && (s.norm() < POLE_GUARD || (s - 1.0).norm() < POLE_GUARD) {
        return Err(Error::Pole { function: "completed_phi", s });
    }
    let lg = log_gamma_factor(f, s)?;
    let v = l_value(f, s)?;
    if v.norm() == 0.0 {
        return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
    }
    Ok(lg + v.ln())
}

/// Φ_F(s) = Q^s Γ_F(s) F(s).
pub fn completed_phi(f: &SelbergDatum, s: Complex64) -> Result<Complex64> {
    let l = log_completed_phi(f, s)?;
    if l.re == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(l.exp())
}

/// |Φ(s) − ω·conj Φ(1 − conj s)| / max(|Φ(s)|, tiny).
pub fn functional_equation_residual(f: &SelbergDatum, s: Complex64) -> Result<f64> {
    let reflected = Complex64::new(1.0 - s.re, s.im);
    let la = log_completed_phi(f, s)?;
    let lb = log_completed_phi(f, reflected)?.conj() + f.root_number().ln();
    if la.re == f64::NEG_INFINITY {
        return Ok(if lb.re == f64::NEG_INFINITY { 0.0 } else { lb.re.exp() / f64::MIN_POSITIVE });
    }
    Ok((1.0 - (lb - la).exp()).norm())
}
