//! Experiments on pairs (F, G): windowed zero differences, degree
//! detection, prime-side differences inferred from zeros, the coefficient
//! probe, zero-neighbourhood masking and mean-value checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{prime_power, primes_up_to};
use crate::data::{make_dirichlet_l, make_product, make_zeta, DirichletCharacter, SelbergDatum};
use crate::ef::{arch_term_detailed, zero_sum, ArchInterpolant, EFParams, PrimeSide};
use crate::error::{Error, Result};
use crate::fourier::FourierPair;
use crate::quad::GaussLegendre;
use crate::zeros::ZeroList;

fn common_height(zf: &ZeroList, zg: &ZeroList) -> Result<f64> {
    zf.require(0.0)?;
    zg.require(0.0)?;
    Ok(zf.t_max.min(zg.t_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowDelta {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Σ h(L(γ_F − t)) − Σ h(L(γ_G − t)) up to the common certified height.
pub fn window_zero_delta(
    f: &SelbergDatum,
    g: &SelbergDatum,
    zf: &ZeroList,
    zg: &ZeroList,
    pair: &FourierPair,
    t: f64,
    l: f64,
) -> Result<WindowDelta> {
    let p = EFParams::new(t, l, common_height(zf, zg)?);
    let a = zero_sum(f, zf, pair, &p)?;
    let b = zero_sum(g, zg, pair, &p)?;
    Ok(WindowDelta { value: a.value - b.value, tail_bound: a.tail_bound + b.tail_bound })
}

/// (H_F − H_G) − (Z_F − Z_G): the prime-side difference D_F − D_G obtained
/// from gamma data and zeros only. Pole terms cancel when m_F = m_G.
pub fn infer_d_delta_from_zeros(
    f: &SelbergDatum,
    g: &SelbergDatum,
    zf: &ZeroList,
    zg: &ZeroList,
    pair: &FourierPair,
    t: f64,
    l: f64,
) -> Result<WindowDelta> {
    if f.pole_order() != g.pole_order() {
        return Err(Error::PoleOrderMismatch(f.pole_order(), g.pole_order()));
    }
    let p = EFParams::new(t, l, common_height(zf, zg)?);
    let hf = arch_term_detailed(f, pair, &p)?;
    let hg = arch_term_detailed(g, pair, &p)?;
    let z = window_zero_delta(f, g, zf, zg, pair, t, l)?;
    Ok(WindowDelta {
        value: Complex64::new(hf.value - hg.value, 0.0) - z.value,
        tail_bound: z.tail_bound + hf.quad_error + hf.tail + hg.quad_error + hg.tail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaskedRange {
    #[serde(rename = "T")]
    pub t_base: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub radius: f64,
    /// Merged open intervals inside [T, 2T].
    pub excluded: Vec<(f64, f64)>,
    pub measure_excluded: f64,
    /// Ordinates of F and G in [T − 1, 2T + 1].
    pub nearby_ordinates: usize,
}

impl MaskedRange {
    /// [T, 2T] minus the excluded intervals.
    pub fn unmasked(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cur = self.t_base;
        for &(a, b) in &self.excluded {
            if a > cur {
                out.push((cur, a));
            }
            cur = cur.max(b);
        }
        if cur < 2.0 * self.t_base {
            out.push((cur, 2.0 * self.t_base));
        }
        out
    }

    pub fn unmasked_measure(&self) -> f64 {
        self.t_base - self.measure_excluded
    }

    /// measure ≤ (ordinates in [T − 1, 2T + 1])·2/(W log T).
    pub fn satisfies_union_bound(&self) -> bool {
        self.measure_excluded <= self.nearby_ordinates as f64 * 2.0 * self.radius * (1.0 + 1e-12)
    }

    /// The whole of [T, 2T], nothing excluded.
    pub fn none(t_base: f64) -> Self {
        Self { t_base, w: f64::INFINITY, radius: 0.0, excluded: Vec::new(), measure_excluded: 0.0, nearby_ordinates: 0 }
    }
}

/// Excludes (γ − r, γ + r), r = 1/(W log T), around every ordinate of F or G.
pub fn build_mask(zf: &ZeroList, zg: &ZeroList, t_base: f64, w: f64) -> Result<MaskedRange> {
    if !(t_base > 1.0) || !(w >= 1.0) {
        return Err(Error::invalid(format!("build_mask needs T > 1 and W >= 1 (got {t_base}, {w})")));
    }
    for z in [zf, zg] {
        z.require(2.0 * t_base + 1.0)?;
    }
    let r = 1.0 / (w * t_base.ln());
    let (lo, hi) = (t_base, 2.0 * t_base);
    let mut gammas: Vec<f64> = zf
        .signed_ordinates()
        .chain(zg.signed_ordinates())
        .filter(|&g| g >= lo - 1.0 && g <= hi + 1.0)
        .collect();
    let nearby = gammas.len();
    gammas.sort_by(f64::total_cmp);
    let mut excluded: Vec<(f64, f64)> = Vec::new();
    for g in gammas {
        let (a, b) = ((g - r).max(lo), (g + r).min(hi));
        if a >= b {
            continue;
        }
        match excluded.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => excluded.push((a, b)),
        }
    }
    let measure_excluded = excluded.iter().map(|(a, b)| b - a).sum();
    Ok(MaskedRange { t_base, w, radius: r, excluded, measure_excluded, nearby_ordinates: nearby })
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeTestReport {
    pub f: String,
    pub g: String,
    #[serde(rename = "T")]
    pub t_base: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub samples: usize,
    pub mean_scaled_delta: f64,
    pub threshold: f64,
    pub verdict: String,
    /// (t, L·|H_F − H_G|) per sample.
    pub rows: Vec<(f64, f64)>,
}

pub const VERDICT_DISTINCT: &str = "distinct degrees";
pub const VERDICT_EQUAL: &str = "consistent with equal degrees";

/// Mean of L·|H_F(t) − H_G(t)| over t_k = T + (k + 1/2)T/samples, compared
/// with threshold·g(0)·log T (threshold factor 1/2 by default).
pub fn degree_test(
    f: &SelbergDatum,
    g: &SelbergDatum,
    pair: &FourierPair,
    t_base: f64,
    l: f64,
    samples: usize,
    threshold_factor: f64,
) -> Result<DegreeTestReport> {
    if !(t_base >= 100.0) {
        return Err(Error::invalid(format!("degree_test needs T >= 100, got {t_base}")));
    }
    if samples == 0 {
        return Err(Error::invalid("degree_test needs at least one sample"));
    }
    let ts: Vec<f64> = (0..samples).map(|k| t_base + (k as f64 + 0.5) * t_base / samples as f64).collect();
    let rows: Vec<(f64, f64)> = ts
        .par_iter()
        .map(|&t| {
            let p = EFParams::new(t, l, f64::MAX);
            let hf = arch_term_detailed(f, pair, &p)?.value;
            let hg = arch_term_detailed(g, pair, &p)?.value;
            Ok((t, l * (hf - hg).abs()))
        })
        .collect::<Result<_>>()?;
    let mean = rows.iter().map(|r| r.1).sum::<f64>() / samples as f64;
    let threshold = threshold_factor * pair.g(0.0)? * t_base.ln();
    Ok(DegreeTestReport {
        f: f.name().to_string(),
        g: g.name().to_string(),
        t_base,
        l,
        samples,
        mean_scaled_delta: mean,
        threshold,
        verdict: if mean > threshold { VERDICT_DISTINCT } else { VERDICT_EQUAL }.to_string(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMode {
    /// D from the Dirichlet coefficients.
    Coefficients,
    /// D from gamma data and zeros.
    Zeros,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub f: String,
    pub g: String,
    pub m: u64,
    pub mode: ProbeMode,
    pub masked: bool,
    /// (1/(|U|·g(log m/L)))·∫_U L·m^{it}(D_F − D_G) dt over the unmasked set U.
    pub estimate: Complex64,
    /// (1/T)·∫_U L·m^{it}(D_F − D_G) dt.
    pub raw_estimate: Complex64,
    /// (b_F(m) − b_G(m))Λ(m)/√m.
    pub target: Complex64,
    pub relative_error: f64,
    #[serde(rename = "T")]
    pub t_base: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub unmasked_measure: f64,
    /// Bound on the normalized estimate's error from zero tails and
    /// archimedean interpolation (0 in coefficient mode).
    pub budget: f64,
}

pub struct ProbeInputs<'a> {
    pub pair: &'a FourierPair,
    pub zeros: Option<(&'a ZeroList, &'a ZeroList)>,
    pub mode: ProbeMode,
    pub masked: bool,
    pub n_quad: usize,
}

/// The coefficient probe over [T, 2T].
pub fn coefficient_probe(
    f: &SelbergDatum,
    g: &SelbergDatum,
    m: u64,
    t_base: f64,
    l: f64,
    w: f64,
    inputs: &ProbeInputs,
) -> Result<ProbeResult> {
    let pair = inputs.pair;
    if m < 2 || prime_power(m).is_none() {
        return Err(Error::invalid(format!("probe index m = {m} must be a prime power")));
    }
    let cutoff = (pair.support_halfwidth * l).exp();
    if m as f64 > cutoff {
        return Err(Error::invalid(format!("probe index m = {m} exceeds the prime cutoff {cutoff:.3}")));
    }
    if inputs.n_quad == 0 {
        return Err(Error::invalid("n_quad must be positive"));
    }
    let need_zeros = inputs.masked || inputs.mode == ProbeMode::Zeros;
    let zeros = if need_zeros {
        Some(inputs.zeros.ok_or_else(|| Error::invalid("zero lists required for masked or zeros-mode probes"))?)
    } else {
        None
    };
    let mask = match (inputs.masked, zeros) {
        (true, Some((zf, zg))) => build_mask(zf, zg, t_base, w)?,
        _ => MaskedRange::none(t_base),
    };
    if mask.measure_excluded > 0.5 * t_base {
        return Err(Error::MaskTooLarge { fraction: mask.measure_excluded / t_base });
    }
    let ln_m = (m as f64).ln();
    let width = (1.0 / cutoff.ln().max(1.0)).min(2.0 * PI / (10.0 * ln_m)).min(1.0 / inputs.n_quad as f64);
    let rule = GaussLegendre::new(8);
    let mut nodes = Vec::new();
    for (a, b) in mask.unmasked() {
        let k = ((b - a) / width).ceil().max(1.0) as usize;
        let h = (b - a) / k as f64;
        for j in 0..k {
            nodes.extend(rule.mapped(a + j as f64 * h, a + (j + 1) as f64 * h));
        }
    }

    let mut budget_per_t = 0.0;
    let d_delta: Box<dyn Fn(f64) -> Complex64 + Sync> = match inputs.mode {
        ProbeMode::Coefficients => {
            let side = PrimeSide::difference(f, g, pair, l)?;
            Box::new(move |t| side.eval(t))
        }
        ProbeMode::Zeros => {
            if f.pole_order() != g.pole_order() {
                return Err(Error::PoleOrderMismatch(f.pole_order(), g.pole_order()));
            }
            let (zf, zg) = zeros.unwrap();
            let height = common_height(zf, zg)?;
            let hf = ArchInterpolant::new(f, pair, l, t_base, 2.0 * t_base, 48)?;
            let hg = ArchInterpolant::new(g, pair, l, t_base, 2.0 * t_base, 48)?;
            // Zero tails are largest at the top of the window.
            let tail = |t: f64| -> Result<f64> {
                let p = EFParams::new(t, l, height);
                Ok(crate::ef::zero_tail_bound(f, pair, &p)? + crate::ef::zero_tail_bound(g, pair, &p)?)
            };
            budget_per_t = tail(2.0 * t_base)?.max(tail(t_base)?) + hf.error_bound + hg.error_bound;
            let (yf, yg): (Vec<f64>, Vec<f64>) = (
                zf.signed_ordinates().filter(|x| x.abs() <= height).collect(),
                zg.signed_ordinates().filter(|x| x.abs() <= height).collect(),
            );
            Box::new(move |t| {
                let zs = |ys: &[f64]| ys.iter().map(|&y| pair.h_real(l * (y - t))).sum::<f64>();
                Complex64::new(hf.eval(t) - hg.eval(t) - (zs(&yf) - zs(&yg)), 0.0)
            })
        }
    };
    let terms: Vec<Complex64> = nodes
        .par_iter()
        .map(|&(t, wt)| Complex64::from_polar(l * wt, t * ln_m) * d_delta(t))
        .collect();
    let integral: Complex64 = terms.iter().sum();
    let measure = mask.unmasked_measure();
    let gm = pair.g(ln_m / l)?;
    let estimate = integral / (measure * gm);
    let target = (f.b_lambda(m) - g.b_lambda(m)) / (m as f64).sqrt();
    let relative_error =
        if target.norm() > 0.0 { (estimate - target).norm() / target.norm() } else { estimate.norm() };
    Ok(ProbeResult {
        f: f.name().to_string(),
        g: g.name().to_string(),
        m,
        mode: inputs.mode,
        masked: inputs.masked,
        estimate,
        raw_estimate: integral / t_base,
        target,
        relative_error,
        t_base,
        l,
        w,
        unmasked_measure: measure,
        budget: l * budget_per_t / gm,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanValueReport {
    pub f: String,
    pub g: String,
    #[serde(rename = "T")]
    pub t_base: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub lhs_integral: f64,
    pub rhs_bound: f64,
    pub ratio: f64,
}

/// ∫_T^{2T} |Σ_p Δ(p) p^{−1−2it} log p · g(2 log p/L)|² dt against
/// Σ_p |Δ(p)|²(T + p) log²p / p², where Δ(p) = a_F(p²) − a_G(p²).
pub fn mean_value_check(
    f: &SelbergDatum,
    g: &SelbergDatum,
    pair: &FourierPair,
    t_base: f64,
    l: f64,
    n_quad: usize,
) -> Result<MeanValueReport> {
    if !(t_base > 0.0 && l > 0.0) || n_quad == 0 {
        return Err(Error::invalid("mean_value_check needs T > 0, L > 0, n_quad > 0"));
    }
    let cutoff = (l * pair.support_halfwidth / 2.0).exp();
    let mut terms = Vec::new();
    let mut rhs = 0.0;
    for p in primes_up_to(cutoff.floor() as u64) {
        let delta = f.a(p * p) - g.a(p * p);
        if delta.norm() == 0.0 {
            continue;
        }
        let pf = p as f64;
        let lp = pf.ln();
        rhs += delta.norm_sqr() * (t_base + pf) * lp * lp / (pf * pf);
        let gv = pair.g(2.0 * lp / l)?;
        terms.push((2.0 * lp, delta * (lp * gv / pf)));
    }
    let max_freq = terms.iter().map(|t| t.0).fold(1.0, f64::max);
    let width = (1.0 / n_quad as f64).min(PI / (2.0 * max_freq));
    let panels = (t_base / width).ceil() as usize;
    let rule = GaussLegendre::new(8);
    let values: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|k| {
            let a = t_base + k as f64 * t_base / panels as f64;
            let b = t_base + (k + 1) as f64 * t_base / panels as f64;
            rule.integrate(a, b, |t| {
                terms.iter().map(|&(fr, c)| c * Complex64::from_polar(1.0, -t * fr)).sum::<Complex64>().norm_sqr()
            })
        })
        .collect();
    let lhs: f64 = values.iter().sum();
    Ok(MeanValueReport {
        f: f.name().to_string(),
        g: g.name().to_string(),
        t_base,
        l,
        lhs_integral: lhs,
        rhs_bound: rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MaskedZBound {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub measure_excluded: f64,
}

/// L∫_{unmasked}|Z_F − Z_G| dt against 1 + T log T·∫_{|y| ≥ L/(W log T)}|h|.
#[allow(clippy::too_many_arguments)]
pub fn masked_z_bound_check(
    zf: &ZeroList,
    zg: &ZeroList,
    pair: &FourierPair,
    t_base: f64,
    l: f64,
    w: f64,
    n_quad: usize,
) -> Result<MaskedZBound> {
    let mask = build_mask(zf, zg, t_base, w)?;
    let height = common_height(zf, zg)?;
    let yf: Vec<f64> = zf.signed_ordinates().filter(|x| x.abs() <= height).collect();
    let yg: Vec<f64> = zg.signed_ordinates().filter(|x| x.abs() <= height).collect();
    let rule = GaussLegendre::new(8);
    let width = (1.0 / n_quad.max(1) as f64).min(PI / (2.0 * l * pair.support_halfwidth));
    let mut nodes = Vec::new();
    for (a, b) in mask.unmasked() {
        let k = ((b - a) / width).ceil().max(1.0) as usize;
        let h = (b - a) / k as f64;
        for j in 0..k {
            nodes.extend(rule.mapped(a + j as f64 * h, a + (j + 1) as f64 * h));
        }
    }
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|&(t, wt)| {
            let zs = |ys: &[f64]| ys.iter().map(|&y| pair.h_real(l * (y - t))).sum::<f64>();
            wt * (zs(&yf) - zs(&yg)).abs()
        })
        .collect();
    let lhs = l * vals.iter().sum::<f64>();
    let rhs = 1.0 + t_base * t_base.ln() * pair.abs_h_tail_integral(l / (w * t_base.ln()));
    Ok(MaskedZBound { lhs, rhs, ratio: lhs / rhs, measure_excluded: mask.measure_excluded })
}

/// The built-in comparison pairs.
pub fn pair_catalog() -> Vec<(SelbergDatum, SelbergDatum)> {
    let chi = |q| make_dirichlet_l(&DirichletCharacter::real_primitive(q).expect("built-in")).expect("primitive");
    let (z, c3, c4) = (make_zeta(), chi(3), chi(4));
    vec![
        (z.clone(), c3.clone()),
        (c3.clone(), c4.clone()),
        (z.clone(), make_product(&z, &c3)),
        (make_product(&z, &c3), make_product(&z, &c4)),
    ]
}
