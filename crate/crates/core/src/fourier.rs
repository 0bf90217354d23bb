//! Compactly supported Fourier pairs (g, h) with h(s) = ∫ g(u) e^{isu} du.
//! The sinc-product family has h(t) = ∏ sinc²(X_i t/2) and g the
//! convolution of unit-mass triangles of half-widths X_i.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

/// Below this |z| the sinc factor uses its Taylor polynomial.
pub const SINC_SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InghamParams {
    pub n: u64,
    pub alpha: f64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairFamily {
    SincProduct,
    Ingham,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierPair {
    pub family: PairFamily,
    pub widths: Vec<f64>,
    pub support_halfwidth: f64,
    /// Number of retained factors.
    pub truncation: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generator: Option<InghamParams>,
    /// Upper bound for Σ X_n² over the dropped factors (0 for finite lists).
    pub dropped_width_square_sum: f64,
}

/// sin(z)/z with a Taylor fallback near 0.
fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < SINC_SERIES_THRESHOLD {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
    } else {
        z.sin() / z
    }
}

fn sinc_real(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    } else {
        x.sin() / x
    }
}

pub fn sinc_product_pair(widths: &[f64]) -> Result<FourierPair> {
    if widths.is_empty() {
        return Err(Error::invalid("sinc_product_pair needs at least one width"));
    }
    if let Some(w) = widths.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::invalid(format!("width {w} must be positive and finite")));
    }
    Ok(FourierPair {
        family: PairFamily::SincProduct,
        widths: widths.to_vec(),
        support_halfwidth: widths.iter().sum(),
        truncation: widths.len(),
        generator: None,
        dropped_width_square_sum: 0.0,
    })
}

/// X_n = alpha / (n·log(n+1)^{3/2}) for n = N, …, N+M−1.
pub fn ingham_widths(n: u64, alpha: f64, m: usize) -> Result<Vec<f64>> {
    if n < 2 || m < 1 || !(alpha > 0.0) {
        return Err(Error::invalid(format!("ingham_widths needs N >= 2, M >= 1, alpha > 0 (got {n}, {m}, {alpha})")));
    }
    Ok((n..n + m as u64).map(|k| ingham_width(k, alpha)).collect())
}

fn ingham_width(k: u64, alpha: f64) -> f64 {
    let k = k as f64;
    alpha / (k * (k + 1.0).ln().powf(1.5))
}

/// Truncated Ingham product with M factors starting at N.
pub fn ingham_pair(n: u64, alpha: f64, m: usize) -> Result<FourierPair> {
    let widths = ingham_widths(n, alpha, m)?;
    let mut p = sinc_product_pair(&widths)?;
    p.family = PairFamily::Ingham;
    p.generator = Some(InghamParams { n, alpha, m });
    // Σ_{k ≥ K} X_k² ≤ X_K² + ∫_K^∞ alpha²/(x² log³(x+1)) dx ≤ X_K² + alpha²/(K log³(K+1)).
    let k = n + m as u64;
    let kf = k as f64;
    p.dropped_width_square_sum = ingham_width(k, alpha).powi(2) + alpha * alpha / (kf * (kf + 1.0).ln().powi(3));
    Ok(p)
}

impl FourierPair {
    /// h at a complex point (entire).
    pub fn h(&self, s: Complex64) -> Complex64 {
        self.widths.iter().fold(Complex64::new(1.0, 0.0), |acc, &x| {
            let f = sinc(s * (0.5 * x));
            acc * f * f
        })
    }

    /// h on the real axis.
    pub fn h_real(&self, t: f64) -> f64 {
        self.widths.iter().fold(1.0, |acc, &x| {
            let f = sinc_real(0.5 * x * t);
            acc * f * f
        })
    }

    /// log|h(t)| for real t (−∞ at zeros of h).
    pub fn log_abs_h(&self, t: f64) -> f64 {
        self.widths.iter().map(|&x| 2.0 * sinc_real(0.5 * x * t).abs().ln()).sum()
    }

    /// Monotone majorant of |h(y)|: ∏ min(1, 4/(X_i y)²).
    pub fn envelope(&self, y: f64) -> f64 {
        self.log_envelope(y).exp()
    }

    pub fn log_envelope(&self, y: f64) -> f64 {
        let y = y.abs();
        self.widths
            .iter()
            .map(|&x| {
                let v = x * y;
                if v > 2.0 {
                    (4.0 / (v * v)).ln()
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Bound on |h_M(t) − h_∞(t)| from the dropped factors.
    pub fn tail_bound(&self, t: f64) -> f64 {
        if self.dropped_width_square_sum == 0.0 {
            return 0.0;
        }
        self.h_real(t).abs() * (self.dropped_width_square_sum * t * t / 3.0).min(1.0)
    }

    /// g(x) = (1/2π)∫ h(u) e^{−ixu} du.
    pub fn g(&self, x: f64) -> Result<f64> {
        let x = x.abs();
        if x >= self.support_halfwidth {
            return Ok(0.0);
        }
        match self.widths.as_slice() {
            [a] => Ok(triangle(*a, x)),
            [a, b] => Ok(triangle_convolution(*a, *b, x)),
            _ => self.g_by_quadrature(x),
        }
    }

    /// g(x) by direct cosine quadrature of h, whatever the number of widths.
    pub fn g_by_quadrature(&self, x: f64) -> Result<f64> {
        let x = x.abs();
        let s = self.support_halfwidth;
        let width = (PI / (2.0 * s)).min(0.5);
        let u_max = self.decay_radius(1e-11);
        let panels = (u_max / width).ceil() as usize;
        let rule_hi = GaussLegendre::new(16);
        let rule_lo = GaussLegendre::new(12);
        let f = |u: f64| self.h_real(u) * (x * u).cos();
        let mut hi = 0.0;
        let mut lo = 0.0;
        for k in 0..panels {
            let (a, b) = (k as f64 * width, (k + 1) as f64 * width);
            hi += rule_hi.integrate(a, b, f);
            lo += rule_lo.integrate(a, b, f);
        }
        if (hi - lo).abs() > 1e-9 {
            return Err(Error::Quadrature(format!("g({x}) did not converge: {hi} vs {lo}")));
        }
        Ok(hi / PI)
    }

    /// A radius beyond which 2∫ envelope < eps.
    pub fn decay_radius(&self, eps: f64) -> f64 {
        let mut y = 1.0;
        while 2.0 * self.envelope_tail(y) > eps {
            y *= 1.25;
        }
        y
    }

    /// ∫_{y0}^∞ envelope(y) dy for y0 ≥ 0.
    pub fn envelope_tail(&self, y0: f64) -> f64 {
        self.weighted_envelope_tail(y0, &|_| 1.0, 0.0)
    }

    /// ∫_{y0}^∞ w(y)·envelope(y) dy for a nonnegative, nondecreasing weight
    /// with w(y) ≤ w(z)·(y/z)^growth for y ≥ z. Each panel uses its
    /// right-endpoint weight; the last piece is integrated in closed form.
    pub fn weighted_envelope_tail(&self, y0: f64, w: &dyn Fn(f64) -> f64, growth: f64) -> f64 {
        let y0 = y0.max(0.0);
        let min_x = self.widths.iter().cloned().fold(f64::INFINITY, f64::min);
        // Beyond y_all every factor is in its decaying regime: env = C·y^{−2n}.
        let y_all = 2.0 / min_x;
        let rule = GaussLegendre::new(8);
        let mut total = 0.0;
        let mut a = y0;
        // Linear panels on [y0, 1), then geometric panels with ratio 1.05.
        while a < y_all.max(y0) {
            let b = if a < 1.0 { (a + 0.25).min(1.0) } else { a * 1.05 }.min(y_all);
            if b <= a {
                break;
            }
            // The weight is monotone, so w(b)·∫env bounds the panel; the
            // envelope is smooth per panel up to kinks, so pad by 1%.
            total += 1.01 * w(b) * rule.integrate(a, b, |y| self.envelope(y));
            a = b;
            if self.log_envelope(a) < -745.0 {
                return total;
            }
        }
        let start = a.max(y0);
        let n = self.widths.len() as f64;
        let env = self.envelope(start);
        // ∫_start^∞ env(start)(start/y)^{2n}·w(start)(y/start)^growth dy.
        total + env * w(start) * start / (2.0 * n - 1.0 - growth)
    }

    /// ∫_{|y| ≥ y0} |h(y)| dy by quadrature up to the decay radius plus the
    /// envelope tail.
    pub fn abs_h_tail_integral(&self, y0: f64) -> f64 {
        let y0 = y0.max(0.0);
        let y1 = self.decay_radius(1e-12).max(y0);
        let rule = GaussLegendre::new(16);
        let width = 0.25;
        let panels = ((y1 - y0) / width).ceil() as usize;
        let mut acc = 0.0;
        for k in 0..panels {
            let a = y0 + k as f64 * width;
            let b = (a + width).min(y1);
            acc += rule.integrate(a, b, |y| self.h_real(y).abs());
        }
        2.0 * (acc + self.envelope_tail(y1))
    }

    /// JSON-friendly label, e.g. `sinc:1,1` or `ingham:2,1,200`.
    pub fn label(&self) -> String {
        match (&self.family, self.generator) {
            (PairFamily::Ingham, Some(p)) => format!("ingham:{},{},{}", p.n, p.alpha, p.m),
            _ => format!("sinc:{}", self.widths.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")),
        }
    }
}

/// Parses `sinc:X1,X2,…` or `ingham:N,alpha,M`.
pub fn parse_pair(spec: &str) -> Result<FourierPair> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("pair `{spec}` lacks a family prefix")))?;
    let nums: Vec<&str> = rest.split(',').map(str::trim).collect();
    let bad = |e: &dyn std::fmt::Display| Error::Parse(format!("pair `{spec}`: {e}"));
    match kind.trim() {
        "sinc" => {
            let w = nums.iter().map(|s| s.parse::<f64>().map_err(|e| bad(&e))).collect::<Result<Vec<_>>>()?;
            sinc_product_pair(&w).map_err(|e| bad(&e))
        }
        "ingham" if nums.len() == 3 => {
            let n = nums[0].parse::<u64>().map_err(|e| bad(&e))?;
            let alpha = nums[1].parse::<f64>().map_err(|e| bad(&e))?;
            let m = nums[2].parse::<usize>().map_err(|e| bad(&e))?;
            ingham_pair(n, alpha, m).map_err(|e| bad(&e))
        }
        _ => Err(Error::Parse(format!("unknown pair `{spec}`"))),
    }
}

fn triangle(a: f64, x: f64) -> f64 {
    ((1.0 - x.abs() / a) / a).max(0.0)
}

/// (T_a * T_b)(x), exact: the integrand is piecewise quadratic between the
/// breakpoints, so Simpson's rule on each piece is exact.
fn triangle_convolution(a: f64, b: f64, x: f64) -> f64 {
    let mut pts = vec![-a, 0.0, a, x - b, x, x + b];
    pts.retain(|p| *p >= -a && *p <= a);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let f = |u: f64| triangle(a, u) * triangle(b, x - u);
    pts.windows(2)
        .map(|w| {
            let (l, r) = (w[0], w[1]);
            (r - l) / 6.0 * (f(l) + 4.0 * f(0.5 * (l + r)) + f(r))
        })
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub pair: String,
    pub max_ratio: f64,
    pub worst_t: f64,
    pub holds: bool,
    /// (t, r(t)) per grid point.
    pub ratios: Vec<(f64, f64)>,
}

/// Logarithmic grid with `per_decade` points per decade from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round().max(1.0) as usize;
    (0..=n).map(|k| lo * 10f64.powf(decades * k as f64 / n as f64)).collect()
}

/// r(t) = |h(t)|·exp(t/log²t) over the grid; holds when the maximum is not
/// in the final tenth of the grid.
pub fn verify_decay(pair: &FourierPair, grid: &[f64]) -> Result<DecayReport> {
    if grid.is_empty() {
        return Err(Error::invalid("empty decay grid"));
    }
    if let Some(t) = grid.iter().find(|t| !(**t >= 10.0)) {
        return Err(Error::invalid(format!("decay grid value {t} below 10")));
    }
    let ratios: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| {
            let l = t.ln();
            (t, (pair.log_abs_h(t) + t / (l * l)).exp())
        })
        .collect();
    let (idx, &(worst_t, max_ratio)) = ratios
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &(f64, f64))>, (i, r)| match best {
            Some((_, b)) if b.1 >= r.1 => best,
            _ => Some((i, r)),
        })
        .unwrap();
    let tail_start = grid.len() - (grid.len() / 10).max(1);
    Ok(DecayReport { pair: pair.label(), max_ratio, worst_t, holds: idx < tail_start, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fejer_pair() {
        let p = sinc_product_pair(&[1.0]).unwrap();
        assert_abs_diff_eq!(p.h_real(2.0 * PI), 0.0, epsilon = 1e-15);
        assert_eq!(p.h_real(0.0), 1.0);
        assert_abs_diff_eq!(p.h(Complex64::new(0.0, 1.0)).re, 1.086_161_269_630_487_6, epsilon = 1e-14);
        assert_eq!(p.g(0.0).unwrap(), 1.0);
        assert_eq!(p.g(1.5).unwrap(), 0.0);
        let s = Complex64::new(3.0, 2.0);
        assert!((p.h(s) - p.h(-s)).norm() < 1e-12);
    }

    #[test]
    fn two_widths() {
        let p = sinc_product_pair(&[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(p.g(0.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        // T*T(x) for 0 ≤ x ≤ 1 is 2/3 − x² + x³/2.
        assert_abs_diff_eq!(p.g(0.5).unwrap(), 2.0 / 3.0 - 0.25 + 0.0625, epsilon = 1e-15);
        assert_abs_diff_eq!(p.g_by_quadrature(0.5).unwrap(), p.g(0.5).unwrap(), epsilon = 1e-8);
        let q = sinc_product_pair(&[1.0, 0.5]).unwrap();
        assert_abs_diff_eq!(q.g_by_quadrature(0.7).unwrap(), q.g(0.7).unwrap(), epsilon = 1e-8);
    }

    #[test]
    fn ingham_instances() {
        let w = ingham_widths(2, 1.0, 1).unwrap();
        assert_eq!(w, vec![1.0 / (2.0 * 3f64.ln().powf(1.5))]);
        let s2 = ingham_pair(2, 1.0, 50).unwrap().support_halfwidth;
        let s3 = ingham_pair(3, 1.0, 50).unwrap().support_halfwidth;
        assert!(s3 < s2);
        assert!(ingham_widths(1, 1.0, 3).is_err());
    }

    #[test]
    fn ingham_truncation_tail() {
        let m = ingham_pair(2, 1.0, 200).unwrap();
        let m2 = ingham_pair(2, 1.0, 400).unwrap();
        for t in log_grid(0.1, 1000.0, 16) {
            let diff = (m.h_real(t) - m2.h_real(t)).abs();
            assert!(diff <= m.tail_bound(t) + 1e-300, "t={t}: {diff} > {}", m.tail_bound(t));
        }
    }

    #[test]
    fn decay_sweeps() {
        let grid = log_grid(10.0, 1000.0, 64);
        let ingham = verify_decay(&ingham_pair(2, 1.0, 200).unwrap(), &grid).unwrap();
        assert!(ingham.holds && ingham.max_ratio.is_finite());
        let fejer = verify_decay(&sinc_product_pair(&[1.0]).unwrap(), &grid).unwrap();
        assert!(!fejer.holds);
        assert!(fejer.worst_t > 900.0);
    }

    #[test]
    fn transform_consistency() {
        for p in [
            sinc_product_pair(&[1.0]).unwrap(),
            sinc_product_pair(&[1.0, 1.0]).unwrap(),
            sinc_product_pair(&[0.7, 0.4, 0.3]).unwrap(),
        ] {
            // (1/2π)∫h = g(0); ∫h computed on [0, R] plus the envelope tail.
            let rule = GaussLegendre::new(16);
            let r = 2000.0;
            let integral = 2.0 * rule.integrate_panels(0.0, r, 4000, |u| p.h_real(u));
            let tail = 2.0 * p.envelope_tail(r);
            let g0 = p.g(0.0).unwrap();
            assert!((integral / (2.0 * PI) - g0).abs() <= 1e-6 + tail, "{}: {}", p.label(), integral / (2.0 * PI) - g0);
            assert_eq!(p.g(p.support_halfwidth * (1.0 + 1e-6)).unwrap(), 0.0);
        }
    }

    #[test]
    fn parseval_fejer() {
        let p = sinc_product_pair(&[1.0]).unwrap();
        // ∫ g² = 2∫_0^1 (1−u)² du = 2/3.
        let rule = GaussLegendre::new(16);
        let r = 4000.0;
        let h2 = 2.0 * rule.integrate_panels(0.0, r, 8000, |u| p.h_real(u).powi(2));
        // Beyond r, h² ≤ 16/u⁴.
        let tail = 2.0 * 16.0 / (3.0 * r * r * r);
        assert!((h2 / (2.0 * PI) - 2.0 / 3.0).abs() < 1e-6 + tail);
    }

    #[test]
    fn envelope_majorizes() {
        let p = ingham_pair(2, 1.0, 30).unwrap();
        for k in 0..2000 {
            let y = 0.37 * k as f64;
            assert!(p.h_real(y).abs() <= p.envelope(y) * (1.0 + 1e-12));
        }
        // Fejér: ∫_Y^∞ 4/y² = 4/Y.
        let f = sinc_product_pair(&[1.0]).unwrap();
        let t = f.envelope_tail(10.0);
        assert!(t >= 0.4 && t < 0.4 * 1.03, "{t}");
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("sinc:1,1").unwrap().widths, vec![1.0, 1.0]);
        assert_eq!(parse_pair("ingham:2,1,200").unwrap().truncation, 200);
        assert!(parse_pair("sinc:1,-1").is_err());
        assert!(parse_pair("gauss:1").is_err());
        let p = parse_pair("ingham:2,1,10").unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: FourierPair = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
