//! The Selberg-class datum and its concrete instances.
//!
//! A [`SelbergDatum`] carries generator mappings for the Dirichlet
//! coefficients a(n) and for b(n)Λ(n), the gamma factors, the conductor
//! scale Q, the root number ω and the pole order at s = 1. Built-in data
//! (zeta, primitive Dirichlet L-functions and finite products of them) also
//! know how to evaluate themselves; see [`crate::lfunc`].

mod character;
mod conditions;
mod spec;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, prime_power, von_mangoldt};
use crate::error::{Error, Result};

pub use character::{CharacterTable, DirichletCharacter};
pub use conditions::{
    check_exceptional_thinness, check_growth_conditions, ExceptionalSet, GrowthReport, GrowthRow,
    ThinnessReport,
};
pub use spec::{parse_datum, DatumSpec};

pub type CoefficientFn = Arc<dyn Fn(u64) -> Complex64 + Send + Sync>;

/// One factor Γ(λs + μ) of the gamma factor Γ_F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub lambda: f64,
    pub mu: Complex64,
}

impl GammaFactor {
    pub fn new(lambda: f64, mu: Complex64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::invalid(format!("gamma factor scale {lambda} must be positive")));
        }
        if mu.re < 0.0 {
            return Err(Error::invalid(format!("gamma factor shift {mu} must have Re >= 0")));
        }
        Ok(Self { lambda, mu })
    }

    /// λs + μ
    pub fn argument(&self, s: Complex64) -> Complex64 {
        s * self.lambda + self.mu
    }
}

/// How a datum evaluates F(s) away from the region of absolute convergence.
#[derive(Clone)]
pub enum Evaluator {
    Zeta,
    Dirichlet(DirichletCharacter),
    Product(Vec<SelbergDatum>),
    /// Coefficients only: no analytic continuation available.
    CoefficientsOnly,
}

impl fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::Zeta => write!(f, "Zeta"),
            Evaluator::Dirichlet(chi) => write!(f, "Dirichlet(mod {}, #{})", chi.modulus(), chi.index()),
            Evaluator::Product(fs) => f
                .debug_list()
                .entries(fs.iter().map(|d| d.name()))
                .finish(),
            Evaluator::CoefficientsOnly => write!(f, "CoefficientsOnly"),
        }
    }
}

#[derive(Clone)]
pub struct SelbergDatum {
    name: String,
    a: CoefficientFn,
    b_lambda: CoefficientFn,
    gamma_factors: Vec<GammaFactor>,
    q: f64,
    omega: Complex64,
    pole_order: u32,
    real_coefficients: bool,
    evaluator: Evaluator,
}

impl fmt::Debug for SelbergDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelbergDatum")
            .field("name", &self.name)
            .field("gamma_factors", &self.gamma_factors)
            .field("q", &self.q)
            .field("omega", &self.omega)
            .field("pole_order", &self.pole_order)
            .field("evaluator", &self.evaluator)
            .finish()
    }
}

impl SelbergDatum {
    /// Assembles a datum and checks the axioms that can be checked locally:
    /// a(1) = 1, |ω| = 1, λ_j > 0, Re μ_j ≥ 0, Q > 0.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        a: CoefficientFn,
        b_lambda: CoefficientFn,
        gamma_factors: Vec<GammaFactor>,
        q: f64,
        omega: Complex64,
        pole_order: u32,
        real_coefficients: bool,
        evaluator: Evaluator,
    ) -> Result<Self> {
        let name = name.into();
        if (a(1) - 1.0).norm() > 1e-12 {
            return Err(Error::invalid(format!("{name}: a(1) = {} is not 1", a(1))));
        }
        if ((omega.norm()) - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("{name}: |omega| = {} is not 1", omega.norm())));
        }
        if !(q > 0.0) {
            return Err(Error::invalid(format!("{name}: Q = {q} must be positive")));
        }
        for g in &gamma_factors {
            GammaFactor::new(g.lambda, g.mu)?;
        }
        Ok(Self {
            name,
            a,
            b_lambda,
            gamma_factors,
            q,
            omega,
            pole_order,
            real_coefficients,
            evaluator,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn a(&self, n: u64) -> Complex64 {
        (self.a)(n)
    }

    /// b(n)Λ(n); zero off prime powers.
    pub fn b_lambda(&self, n: u64) -> Complex64 {
        if prime_power(n).is_none() {
            return Complex64::new(0.0, 0.0);
        }
        (self.b_lambda)(n)
    }

    /// b(n), zero off prime powers.
    pub fn b(&self, n: u64) -> Complex64 {
        let lam = von_mangoldt(n);
        if lam == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.b_lambda(n) / lam
        }
    }

    pub fn gamma_factors(&self) -> &[GammaFactor] {
        &self.gamma_factors
    }

    /// Q_F
    pub fn conductor_scale(&self) -> f64 {
        self.q
    }

    pub fn root_number(&self) -> Complex64 {
        self.omega
    }

    pub fn pole_order(&self) -> u32 {
        self.pole_order
    }

    /// d_F = 2 Σ λ_j
    pub fn degree(&self) -> f64 {
        2.0 * self.gamma_factors.iter().map(|g| g.lambda).sum::<f64>()
    }

    /// True when every coefficient is real, so F̄ = F.
    pub fn has_real_coefficients(&self) -> bool {
        self.real_coefficients
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// F̄(s) = conj F(conj s): conjugate coefficients, conjugate shifts μ,
    /// conjugate root number.
    pub fn conjugate(&self) -> SelbergDatum {
        if self.real_coefficients {
            return self.clone();
        }
        let a = self.a.clone();
        let bl = self.b_lambda.clone();
        let evaluator = match &self.evaluator {
            Evaluator::Dirichlet(chi) => Evaluator::Dirichlet(chi.conj()),
            Evaluator::Product(fs) => Evaluator::Product(fs.iter().map(|f| f.conjugate()).collect()),
            other => other.clone(),
        };
        SelbergDatum {
            name: format!("conj({})", self.name),
            a: Arc::new(move |n| a(n).conj()),
            b_lambda: Arc::new(move |n| bl(n).conj()),
            gamma_factors: self
                .gamma_factors
                .iter()
                .map(|g| GammaFactor { lambda: g.lambda, mu: g.mu.conj() })
                .collect(),
            q: self.q,
            omega: self.omega.conj(),
            pole_order: self.pole_order,
            real_coefficients: false,
            evaluator,
        }
    }

    /// Flattened list of primitive factors (the datum itself if not a product).
    pub fn factors(&self) -> Vec<SelbergDatum> {
        match &self.evaluator {
            Evaluator::Product(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }
}

/// The Riemann zeta function.
pub fn make_zeta() -> SelbergDatum {
    SelbergDatum::new(
        "zeta",
        Arc::new(|_| Complex64::new(1.0, 0.0)),
        Arc::new(|n| Complex64::new(von_mangoldt(n), 0.0)),
        vec![GammaFactor { lambda: 0.5, mu: Complex64::new(0.0, 0.0) }],
        std::f64::consts::PI.powf(-0.5),
        Complex64::new(1.0, 0.0),
        1,
        true,
        Evaluator::Zeta,
    )
    .expect("zeta datum is valid")
}

/// L(s, χ) for a primitive non-principal character χ mod q > 1.
///
/// Gamma factor Γ(s/2 + a/2) with a = 0 (even) or 1 (odd), Q = sqrt(q/π),
/// ω = τ(χ)/(i^a sqrt q). b(p^k) = χ(p)^k, which vanishes at ramified primes.
pub fn make_dirichlet_l(chi: &DirichletCharacter) -> Result<SelbergDatum> {
    let q = chi.modulus();
    if q <= 1 || chi.is_principal() {
        return Err(Error::BadCharacter { modulus: q, reason: "principal" });
    }
    if !chi.is_primitive() {
        return Err(Error::BadCharacter { modulus: q, reason: "not primitive" });
    }
    let parity = if chi.is_even() { 0.0 } else { 1.0 };
    let i_pow = if parity == 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
    let omega = chi.gauss_sum() / (i_pow * (q as f64).sqrt());
    let name = if chi.is_real() {
        format!("chi{q}")
    } else {
        format!("chi{q}_{}", chi.index())
    };
    let chi_a = chi.clone();
    let chi_b = chi.clone();
    SelbergDatum::new(
        name,
        Arc::new(move |n| chi_a.value(n)),
        Arc::new(move |n| match prime_power(n) {
            Some((p, k)) => chi_b.value(p).powu(k) * (p as f64).ln(),
            None => Complex64::new(0.0, 0.0),
        }),
        vec![GammaFactor { lambda: 0.5, mu: Complex64::new(parity / 2.0, 0.0) }],
        (q as f64 / std::f64::consts::PI).sqrt(),
        omega,
        0,
        chi.is_real(),
        Evaluator::Dirichlet(chi.clone()),
    )
}

/// F·G: coefficients convolve, b(n)Λ(n) add, gamma factors concatenate,
/// Q and ω multiply, pole orders add.
pub fn make_product(f: &SelbergDatum, g: &SelbergDatum) -> SelbergDatum {
    let (fa, ga) = (f.a.clone(), g.a.clone());
    let (fb, gb) = (f.b_lambda.clone(), g.b_lambda.clone());
    let mut factors = f.factors();
    factors.extend(g.factors());
    let mut gammas = f.gamma_factors.clone();
    gammas.extend(g.gamma_factors.iter().copied());
    let evaluator = if matches!(f.evaluator, Evaluator::CoefficientsOnly)
        || matches!(g.evaluator, Evaluator::CoefficientsOnly)
    {
        Evaluator::CoefficientsOnly
    } else {
        Evaluator::Product(factors)
    };
    SelbergDatum {
        name: format!("{}*{}", f.name, g.name),
        a: Arc::new(move |n| divisors(n).into_iter().map(|d| fa(d) * ga(n / d)).sum()),
        b_lambda: Arc::new(move |n| fb(n) + gb(n)),
        gamma_factors: gammas,
        q: f.q * g.q,
        omega: f.omega * g.omega,
        pole_order: f.pole_order + g.pole_order,
        real_coefficients: f.real_coefficients && g.real_coefficients,
        evaluator,
    }
}

/// c(n) = b_F(n) − b_G(n); zero off prime powers.
pub fn delta_c(f: &SelbergDatum, g: &SelbergDatum, n: u64) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::invalid(format!("delta_c needs n >= 2, got {n}")));
    }
    Ok(f.b(n) - g.b(n))
}

/// Formal exponential of the Dirichlet series Σ b(n)Λ(n)/(log n) n^{-s},
/// truncated at `cutoff`; returns the coefficients a(1..=cutoff).
///
/// Uses a(n)·log n = Σ_{d|n} b(d)Λ(d)·a(n/d), the coefficient form of
/// F' = F·(log F)'.
pub fn exp_log_series(datum: &SelbergDatum, cutoff: u64) -> Vec<Complex64> {
    let n_max = cutoff as usize;
    let mut a = vec![Complex64::new(0.0, 0.0); n_max + 1];
    if n_max == 0 {
        return a;
    }
    a[1] = Complex64::new(1.0, 0.0);
    let bl: Vec<Complex64> = (0..=cutoff).map(|n| datum.b_lambda(n)).collect();
    for n in 2..=n_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for d in divisors(n as u64) {
            let d = d as usize;
            if d >= 2 {
                acc += bl[d] * a[n / d];
            }
        }
        a[n] = acc / (n as f64).ln();
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi3() -> SelbergDatum {
        make_dirichlet_l(&DirichletCharacter::real_primitive(3).unwrap()).unwrap()
    }

    fn chi4() -> SelbergDatum {
        make_dirichlet_l(&DirichletCharacter::real_primitive(4).unwrap()).unwrap()
    }

    #[test]
    fn zeta_datum() {
        let z = make_zeta();
        assert_eq!(z.a(12), Complex64::new(1.0, 0.0));
        assert!((z.b_lambda(8).re - 2f64.ln()).abs() < 1e-15);
        assert_eq!(z.b_lambda(6), Complex64::new(0.0, 0.0));
        assert_eq!(z.degree(), 1.0);
        assert_eq!(z.pole_order(), 1);
    }

    #[test]
    fn zeta_b_coefficients_from_euler_factor() {
        // −log(1 − p^{-s}) = Σ_k p^{-ks}/k, so b(p^k) = 1 and bΛ(p^k) = log p.
        let z = make_zeta();
        for (n, p) in [(2u64, 2.0f64), (4, 2.0), (8, 2.0), (9, 3.0), (25, 5.0)] {
            assert!((z.b_lambda(n).re - p.ln()).abs() < 1e-15);
            assert!((z.b(n).re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dirichlet_mod_three() {
        let l = chi3();
        assert_eq!(l.a(2).re, -1.0);
        assert!((l.b_lambda(4).re - 2f64.ln()).abs() < 1e-15);
        assert!((l.b_lambda(8).re + 2f64.ln()).abs() < 1e-15);
        assert_eq!(l.b_lambda(3), Complex64::new(0.0, 0.0));
        assert_eq!(l.pole_order(), 0);
        assert!((l.root_number() - 1.0).norm() < 1e-12);
        assert_eq!(l.gamma_factors()[0].mu.re, 0.5);
    }

    #[test]
    fn rejects_principal_and_imprimitive() {
        assert!(make_dirichlet_l(&DirichletCharacter::builtin(5, 0).unwrap()).is_err());
        assert!(make_dirichlet_l(&DirichletCharacter::builtin(8, 1).unwrap()).is_err());
    }

    #[test]
    fn product_data() {
        let z = make_zeta();
        let zc = make_product(&z, &chi3());
        assert_eq!(zc.degree(), 2.0);
        let zz = make_product(&z, &z);
        assert_eq!(zz.pole_order(), 2);
        assert_eq!(zz.a(4).re, 3.0);
        assert_eq!(zz.a(12).re, 6.0);
        assert_eq!(zc.factors().len(), 2);
    }

    #[test]
    fn coefficient_differences() {
        let z = make_zeta();
        let c = chi3();
        assert_eq!(delta_c(&z, &z, 7).unwrap(), Complex64::new(0.0, 0.0));
        assert!((delta_c(&z, &c, 2).unwrap().re - 2.0).abs() < 1e-14);
        assert!(delta_c(&z, &c, 4).unwrap().norm() < 1e-14);
        assert!(delta_c(&z, &c, 1).is_err());
        // equal prime coefficients ⇒ zero at primes
        let d = chi4();
        let prod1 = make_product(&z, &d);
        let prod2 = make_product(&d, &z);
        for p in [2u64, 3, 5, 7, 11] {
            assert!(delta_c(&prod1, &prod2, p).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn exponentiated_b_series_reproduces_coefficients() {
        let mut data = vec![make_zeta(), chi3(), chi4()];
        for (q, j) in [(5, 1), (5, 2), (7, 1), (8, 3)] {
            data.push(make_dirichlet_l(&DirichletCharacter::builtin(q, j).unwrap()).unwrap());
        }
        data.push(make_product(&make_zeta(), &chi3()));
        for f in &data {
            let a = exp_log_series(f, 1000);
            for n in 1..=1000u64 {
                assert!((a[n as usize] - f.a(n)).norm() < 1e-9, "{} n={n}", f.name());
            }
        }
    }

    #[test]
    fn conjugate_datum() {
        let l = make_dirichlet_l(&DirichletCharacter::builtin(5, 1).unwrap()).unwrap();
        let lb = l.conjugate();
        assert!(!l.has_real_coefficients());
        for n in 1..20 {
            assert!((lb.a(n) - l.a(n).conj()).norm() < 1e-15);
        }
        assert!((lb.root_number() - l.root_number().conj()).norm() < 1e-15);
    }
}
