//! Checkers for the hypotheses placed on the exceptional set and on the
//! square-prime coefficient differences.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::arith::{for_each_prime, is_prime};
use crate::error::{Error, Result};

#[derive(Clone)]
enum Members {
    Finite(Vec<u64>),
    Predicate(Arc<dyn Fn(u64) -> bool + Send + Sync>),
}

/// A set of primes, given explicitly or by a predicate evaluated on primes.
#[derive(Clone)]
pub struct ExceptionalSet {
    label: String,
    members: Members,
    pub delta: Option<f64>,
    pub constant: Option<f64>,
}

impl fmt::Debug for ExceptionalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExceptionalSet").field("label", &self.label).finish()
    }
}

impl ExceptionalSet {
    pub fn empty() -> Self {
        Self { label: "empty".into(), members: Members::Finite(Vec::new()), delta: None, constant: None }
    }

    pub fn finite(label: impl Into<String>, mut primes: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::invalid(format!("exceptional set member {bad} is not prime")));
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(Self { label: label.into(), members: Members::Finite(primes), delta: None, constant: None })
    }

    /// Primes p with `test(p)`; the predicate is only consulted on primes.
    pub fn predicate(label: impl Into<String>, test: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        Self { label: label.into(), members: Members::Predicate(Arc::new(test)), delta: None, constant: None }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, p: u64) -> bool {
        match &self.members {
            Members::Finite(v) => v.binary_search(&p).is_ok(),
            Members::Predicate(f) => is_prime(p) && f(p),
        }
    }

    /// #{p ∈ E : p ≤ x} at each (ascending) x in `grid`.
    fn counts(&self, grid: &[f64]) -> Vec<u64> {
        let limit = grid.last().copied().unwrap_or(0.0).floor() as u64;
        let mut counts = vec![0u64; grid.len()];
        let mut tally = |p: u64| {
            let first = grid.partition_point(|&x| x < p as f64);
            for c in &mut counts[first..] {
                *c += 1;
            }
        };
        match &self.members {
            Members::Finite(v) => v.iter().filter(|&&p| p <= limit).for_each(|&p| tally(p)),
            Members::Predicate(f) => for_each_prime(limit, |p| {
                if f(p) {
                    tally(p)
                }
            }),
        }
        counts
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThinnessReport {
    pub set: String,
    pub delta: f64,
    pub x_max: f64,
    pub passes: bool,
    /// Smallest C with count(x) ≤ C·x^{1/2−δ} on the grid.
    pub fitted_constant: f64,
    pub ceiling: Option<f64>,
    /// Ratio count(x)/x^{1/2−δ} still rising over the last tenth of the grid.
    pub growing_at_end: bool,
    /// (x, count) on the geometric grid.
    pub counts: Vec<(f64, u64)>,
}

/// Thinness check #{p ∈ E, p ≤ x} ≪ x^{1/2−δ} on a geometric grid
/// (32 points per decade from 10 to `x_max`).
///
/// With a ceiling the check passes iff the fitted constant is at most the
/// ceiling; without one it passes iff the normalised count has stopped
/// growing by the end of the grid.
pub fn check_exceptional_thinness(
    set: &ExceptionalSet,
    x_max: f64,
    delta: f64,
    ceiling: Option<f64>,
) -> Result<ThinnessReport> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(format!("delta = {delta} outside (0, 1/2)")));
    }
    if !(x_max >= 10.0) {
        return Err(Error::invalid(format!("x_max = {x_max} must be at least 10")));
    }
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let x = 10f64 * 10f64.powf(k as f64 / 32.0);
        if x >= x_max * (1.0 - 1e-12) {
            break;
        }
        grid.push(x);
        k += 1;
    }
    grid.push(x_max);
    let counts = set.counts(&grid);
    let exponent = 0.5 - delta;
    let ratios: Vec<f64> = grid.iter().zip(&counts).map(|(x, &c)| c as f64 / x.powf(exponent)).collect();
    let fitted = ratios.iter().copied().fold(0.0, f64::max);
    let tail_start = grid.len() - (grid.len() / 10).max(1) - 1;
    let last = *ratios.last().unwrap();
    let growing = last > 0.0 && last >= fitted && last > ratios[tail_start] * (1.0 + 1e-12);
    let passes = match ceiling {
        Some(c) => fitted <= c,
        None => !growing,
    };
    Ok(ThinnessReport {
        set: set.label().to_string(),
        delta,
        x_max,
        passes,
        fitted_constant: fitted,
        ceiling,
        growing_at_end: growing,
        counts: grid.into_iter().zip(counts).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub x: f64,
    pub sum: f64,
    pub bound_1_ratio: f64,
    pub bound_3_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub x_max: f64,
    pub sum_at_x: f64,
    pub bound_1_ratio: f64,
    pub bound_3_ratio: f64,
    pub rows: Vec<GrowthRow>,
}

/// exp(x / (log x · (log log x)^5))
pub fn condition_3_scale(x: f64) -> f64 {
    let l = x.ln();
    (x / (l * l.ln().powi(5))).exp()
}

/// S(x) = Σ_{p ≤ e^x} diff(p)²·log p / p on the grid x = 10, 11, …, x_max,
/// with S(x)/x and S(x)/exp(x/(log x (log₂ x)^5)).
pub fn check_growth_conditions(diff: &dyn Fn(u64) -> f64, x_max: f64) -> Result<GrowthReport> {
    if !(x_max >= 10.0) {
        return Err(Error::invalid(format!("x_max = {x_max} must be at least 10")));
    }
    if x_max > 24.0 {
        return Err(Error::invalid(format!("x_max = {x_max} needs primes beyond e^24")));
    }
    let mut grid: Vec<f64> = (10..=x_max.floor() as u64).map(|x| x as f64).collect();
    if x_max.fract() != 0.0 {
        grid.push(x_max);
    }
    let limits: Vec<f64> = grid.iter().map(|x| x.exp()).collect();
    let mut sums = vec![0.0f64; grid.len()];
    let mut running = 0.0f64;
    let mut next = 0usize;
    let limit = limits.last().unwrap().floor() as u64;
    for_each_prime(limit, |p| {
        let pf = p as f64;
        while next < limits.len() && pf > limits[next] {
            sums[next] = running;
            next += 1;
        }
        let d = diff(p);
        if d != 0.0 {
            running += d * d * pf.ln() / pf;
        }
    });
    while next < limits.len() {
        sums[next] = running;
        next += 1;
    }
    let rows: Vec<GrowthRow> = grid
        .iter()
        .zip(&sums)
        .map(|(&x, &s)| GrowthRow { x, sum: s, bound_1_ratio: s / x, bound_3_ratio: s / condition_3_scale(x) })
        .collect();
    let last = rows.last().unwrap().clone();
    Ok(GrowthReport {
        x_max,
        sum_at_x: last.sum,
        bound_1_ratio: last.bound_1_ratio,
        bound_3_ratio: last.bound_3_ratio,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;

    #[test]
    fn empty_set_is_thin() {
        let r = check_exceptional_thinness(&ExceptionalSet::empty(), 1e4, 0.1, None).unwrap();
        assert!(r.passes);
        assert_eq!(r.fitted_constant, 0.0);
    }

    #[test]
    fn finite_set_is_thin_for_any_delta() {
        let small = ExceptionalSet::finite("p<=100", primes_up_to(100)).unwrap();
        for delta in [0.01, 0.1, 0.25, 0.49] {
            let r = check_exceptional_thinness(&small, 1e5, delta, None).unwrap();
            assert!(r.passes, "delta={delta}");
            assert_eq!(r.counts.last().unwrap().1, 25);
        }
    }

    #[test]
    fn primes_one_mod_four_are_not_thin() {
        let set = ExceptionalSet::predicate("p=1 mod 4", |p| p % 4 == 1);
        let r = check_exceptional_thinness(&set, 1e6, 0.1, None).unwrap();
        assert!(!r.passes && r.growing_at_end);
        // sieve oracle
        let direct = primes_up_to(1_000_000).into_iter().filter(|p| p % 4 == 1).count() as u64;
        assert_eq!(r.counts.last().unwrap().1, direct);
        let with_ceiling = check_exceptional_thinness(&set, 1e6, 0.1, Some(10.0)).unwrap();
        assert!(!with_ceiling.passes);
    }

    #[test]
    fn grid_resolution() {
        let r = check_exceptional_thinness(&ExceptionalSet::empty(), 1000.0, 0.2, None).unwrap();
        assert_eq!(r.counts.len(), 65);
    }

    #[test]
    fn rejects_non_primes() {
        assert!(ExceptionalSet::finite("bad", vec![2, 4]).is_err());
        assert!(check_exceptional_thinness(&ExceptionalSet::empty(), 5.0, 0.1, None).is_err());
        assert!(check_exceptional_thinness(&ExceptionalSet::empty(), 50.0, 0.5, None).is_err());
    }

    #[test]
    fn growth_zero_and_single_prime() {
        let r = check_growth_conditions(&|_| 0.0, 12.0).unwrap();
        assert_eq!(r.sum_at_x, 0.0);
        assert_eq!(r.bound_1_ratio, 0.0);
        let r = check_growth_conditions(&|p| if p == 3 { 1.0 } else { 0.0 }, 14.0).unwrap();
        assert!((r.sum_at_x - 3f64.ln() / 3.0).abs() < 1e-15);
        assert!(r.bound_1_ratio < 0.1 && r.bound_3_ratio < 0.1);
    }

    #[test]
    fn growth_constant_difference_follows_mertens() {
        // partial-summation oracle: Σ_{p≤y} log p / p = log y − 1.3325822757… + o(1)
        let r = check_growth_conditions(&|_| 2.0, 15.0).unwrap();
        let mertens = 4.0 * (15.0 - 1.332_582_275_733_220_8);
        assert!((r.sum_at_x - mertens).abs() < 0.05, "{}", r.sum_at_x);
        assert_eq!(r.rows.len(), 6);
    }
}
