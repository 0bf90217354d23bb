//! Critical-line zeros: a Hardy-type rotated real form, sign-change scanning
//! with bisection refinement, and an argument-principle count that
//! certifies the scan.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::SelbergDatum;
use crate::error::{Error, Result};
use crate::lfunc::{l_value, log_gamma_factor};
use crate::report::{fmt17, SCHEMA_VERSION};

/// Bisection tolerance on ordinates.
pub const BISECTION_TOL: f64 = 1e-9;
/// Largest height the scanner accepts.
pub const MAX_HEIGHT: f64 = 1e4;

/// Sorted critical-line ordinates of one datum up to `t_max`.
///
/// `ordinates` holds the zeros 1/2 + iγ with γ in (0, t_max]. When the datum
/// has real coefficients the zeros below the axis are their mirror images;
/// otherwise `conjugate_ordinates` holds the γ > 0 with 1/2 − iγ a zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub label: String,
    pub ordinates: Vec<f64>,
    pub t_max: f64,
    pub complete: bool,
    pub self_conjugate: bool,
    #[serde(default)]
    pub conjugate_ordinates: Vec<f64>,
}

impl ZeroList {
    pub fn empty(label: impl Into<String>, t_max: f64) -> Self {
        Self {
            label: label.into(),
            ordinates: Vec::new(),
            t_max,
            complete: true,
            self_conjugate: true,
            conjugate_ordinates: Vec::new(),
        }
    }

    /// Every zero ordinate, both signs, in no particular order.
    pub fn signed_ordinates(&self) -> impl Iterator<Item = f64> + '_ {
        let below: &[f64] = if self.self_conjugate { &self.ordinates } else { &self.conjugate_ordinates };
        self.ordinates.iter().copied().chain(below.iter().map(|g| -g))
    }

    /// #{γ : 0 < γ ≤ t} on the upper half line.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g <= t)
    }

    /// #{ρ : |Im ρ| ≤ t}.
    pub fn count_both_halves(&self, t: f64) -> usize {
        let below = if self.self_conjugate { &self.ordinates } else { &self.conjugate_ordinates };
        self.count_up_to(t) + below.partition_point(|&g| g <= t)
    }

    /// Union with multiplicity, truncated to the smaller height.
    pub fn merge(&self, other: &ZeroList, label: impl Into<String>) -> ZeroList {
        let t_max = self.t_max.min(other.t_max);
        let merge = |a: &[f64], b: &[f64]| {
            let mut v: Vec<f64> = a.iter().chain(b).copied().filter(|&g| g <= t_max).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let self_conjugate = self.self_conjugate && other.self_conjugate;
        let lower = |z: &ZeroList| if z.self_conjugate { z.ordinates.clone() } else { z.conjugate_ordinates.clone() };
        ZeroList {
            label: label.into(),
            ordinates: merge(&self.ordinates, &other.ordinates),
            t_max,
            complete: self.complete && other.complete,
            self_conjugate,
            conjugate_ordinates: if self_conjugate { Vec::new() } else { merge(&lower(self), &lower(other)) },
        }
    }

    /// Fails unless the list is certified and reaches `height`.
    pub fn require(&self, height: f64) -> Result<()> {
        if !self.complete {
            return Err(Error::NotCertified(self.label.clone()));
        }
        if self.t_max < height {
            return Err(Error::Coverage { label: self.label.clone(), t_max: self.t_max, needed: height });
        }
        Ok(())
    }

    /// Writes `<stem>.csv` (header `ordinate`), `<stem>.json` metadata and,
    /// for non-self-conjugate data, `<stem>_conj.csv`.
    pub fn write_csv(&self, dir: &Path, stem: &str) -> Result<()> {
        write_column(&dir.join(format!("{stem}.csv")), &self.ordinates)?;
        if !self.self_conjugate {
            write_column(&dir.join(format!("{stem}_conj.csv")), &self.conjugate_ordinates)?;
        }
        let meta = ZeroListMeta {
            schema_version: SCHEMA_VERSION,
            label: self.label.clone(),
            t_max: self.t_max,
            complete: self.complete,
            self_conjugate: self.self_conjugate,
            count: self.ordinates.len(),
        };
        crate::report::write_json(&dir.join(format!("{stem}.json")), &meta)
    }

    pub fn read_csv(dir: &Path, stem: &str) -> Result<Self> {
        let meta_path = dir.join(format!("{stem}.json"));
        let text = fs::read_to_string(&meta_path).map_err(|e| io_err(&meta_path, e))?;
        let meta: ZeroListMeta = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let ordinates = read_column(&dir.join(format!("{stem}.csv")))?;
        let conjugate_ordinates =
            if meta.self_conjugate { Vec::new() } else { read_column(&dir.join(format!("{stem}_conj.csv")))? };
        Ok(Self {
            label: meta.label,
            ordinates,
            t_max: meta.t_max,
            complete: meta.complete,
            self_conjugate: meta.self_conjugate,
            conjugate_ordinates,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ZeroListMeta {
    schema_version: u32,
    label: String,
    t_max: f64,
    complete: bool,
    self_conjugate: bool,
    count: usize,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

fn write_column(path: &Path, values: &[f64]) -> Result<()> {
    let rows: Vec<Vec<String>> = values.iter().map(|v| vec![fmt17(*v)]).collect();
    crate::report::write_csv(path, &["ordinate"], &rows)
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some("ordinate") {
        return Err(Error::Parse(format!("{}: missing `ordinate` header", path.display())));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| l.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{}: {e}", path.display()))))
        .collect()
}

/// θ(t) = Im log(Q^s Γ_F(s)) − arg(ω)/2 at s = 1/2 + it.
fn theta(f: &SelbergDatum, t: f64) -> Result<f64> {
    Ok(log_gamma_factor(f, Complex64::new(0.5, t))?.im - 0.5 * f.root_number().arg())
}

/// Z(t) = e^{iθ(t)} F(1/2 + it): a positive multiple of ω^{-1/2}Φ(1/2 + it),
/// real on the critical line, with sign changes at odd-order zeros.
pub fn rotated_real_form(f: &SelbergDatum, t: f64) -> Result<f64> {
    let v = l_value(f, Complex64::new(0.5, t))?;
    let (sin, cos) = theta(f, t)?.sin_cos();
    let z = v * Complex64::new(cos, sin);
    let scale = z.norm().max(1e-2);
    if z.im.abs() > 1e-6 * scale {
        return Err(Error::PhaseCorrection { t, ratio: z.im.abs() / scale });
    }
    Ok(z.re)
}

/// Default mesh: 0.02 below height 100, 0.01 above.
pub fn default_mesh(t: f64) -> f64 {
    if t < 100.0 {
        0.02
    } else {
        0.01
    }
}

fn grid(t_lo: f64, t_hi: f64, mesh: Option<f64>) -> Vec<f64> {
    let mut pts = vec![t_lo];
    let mut t = t_lo;
    while t < t_hi {
        let step = mesh.unwrap_or_else(|| default_mesh(t));
        t = (t + step).min(t_hi);
        pts.push(t);
    }
    pts
}

/// Sign changes of Z on (t_lo, t_hi], refined by bisection.
fn sign_changes(f: &SelbergDatum, t_lo: f64, t_hi: f64, mesh: Option<f64>) -> Result<Vec<f64>> {
    let pts = grid(t_lo, t_hi, mesh);
    let values: Vec<f64> = pts.par_iter().map(|&t| rotated_real_form(f, t)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for k in 1..pts.len() {
        let (a, b) = (pts[k - 1], pts[k]);
        let (za, zb) = (values[k - 1], values[k]);
        if zb == 0.0 {
            if b > t_lo {
                roots.push(b);
            }
            continue;
        }
        if za == 0.0 || za.signum() == zb.signum() {
            continue;
        }
        roots.push(bisect(f, a, b, za)?);
    }
    Ok(roots)
}

fn bisect(f: &SelbergDatum, mut a: f64, mut b: f64, mut za: f64) -> Result<f64> {
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        let zm = rotated_real_form(f, m)?;
        if zm == 0.0 {
            return Ok(m);
        }
        if zm.signum() == za.signum() {
            a = m;
            za = zm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Continuous change of arg F along `path(u)`, u ∈ [0, 1], with adaptive
/// subdivision wherever the principal increment exceeds 0.5 rad.
fn arg_change(f: &SelbergDatum, path: &dyn Fn(f64) -> Complex64) -> Result<f64> {
    fn refine(
        f: &SelbergDatum,
        path: &dyn Fn(f64) -> Complex64,
        (u0, v0): (f64, Complex64),
        (u1, v1): (f64, Complex64),
        depth: u32,
    ) -> Result<f64> {
        let d = (v1 / v0).arg();
        if d.abs() < 0.5 || depth > 30 {
            return Ok(d);
        }
        let um = 0.5 * (u0 + u1);
        let vm = l_value(f, path(um))?;
        Ok(refine(f, path, (u0, v0), (um, vm), depth + 1)? + refine(f, path, (um, vm), (u1, v1), depth + 1)?)
    }
    const PIECES: usize = 64;
    let mut total = 0.0;
    let mut prev = (0.0, l_value(f, path(0.0))?);
    for k in 1..=PIECES {
        let u = k as f64 / PIECES as f64;
        let cur = (u, l_value(f, path(u))?);
        total += refine(f, path, prev, cur, 0)?;
        prev = cur;
    }
    Ok(total)
}

const SIGMA_RIGHT: f64 = 3.0;

/// (1/π)·arg F(1/2 + iT), continued from Re s = 3 along the horizontal line.
fn s_of_t(f: &SelbergDatum, t: f64) -> Result<f64> {
    let mut acc = 0.0;
    for g in f.factors() {
        let start = l_value(&g, Complex64::new(SIGMA_RIGHT, t))?.arg();
        let path = |u: f64| Complex64::new(SIGMA_RIGHT + (0.5 - SIGMA_RIGHT) * u, t);
        acc += start + arg_change(&g, &path)?;
    }
    Ok(acc / PI)
}

/// (1/π)·Δ arg F from s = 3 to s = 1/2 along the real axis, passing above
/// the pole at s = 1.
fn s_at_real_axis(f: &SelbergDatum) -> Result<f64> {
    let mut acc = 0.0;
    for g in f.factors() {
        acc += l_value(&g, Complex64::new(SIGMA_RIGHT, 0.0))?.arg();
        if g.pole_order() > 0 {
            let r = 0.25;
            let seg1 = |u: f64| Complex64::new(SIGMA_RIGHT + (1.0 + r - SIGMA_RIGHT) * u, 0.0);
            let arc = |u: f64| Complex64::new(1.0, 0.0) + Complex64::from_polar(r, PI * u);
            let seg2 = |u: f64| Complex64::new(1.0 - r + (0.5 - (1.0 - r)) * u, 0.0);
            acc += arg_change(&g, &seg1)? + arg_change(&g, &arc)? + arg_change(&g, &seg2)?;
        } else {
            let seg = |u: f64| Complex64::new(SIGMA_RIGHT + (0.5 - SIGMA_RIGHT) * u, 0.0);
            acc += arg_change(&g, &seg)?;
        }
    }
    Ok(acc / PI)
}

/// Argument-principle value of #{ρ : 0 < Im ρ ≤ T} for Φ_F (real-valued;
/// an integer up to rounding when T is not a zero ordinate):
/// (θ(T) − θ(0))/π + S(T) − S_0.
pub fn argument_count_value(f: &SelbergDatum, t: f64) -> Result<f64> {
    let th = (log_gamma_factor(f, Complex64::new(0.5, t))?.im - log_gamma_factor(f, Complex64::new(0.5, 0.0))?.im) / PI;
    Ok(th + s_of_t(f, t)? - s_at_real_axis(f)?)
}

/// Integer argument-principle count on the upper half line.
pub fn argument_count(f: &SelbergDatum, t: f64) -> Result<i64> {
    let v = argument_count_value(f, t)?;
    let r = v.round();
    if (v - r).abs() > 0.25 {
        return Err(Error::CountNotInteger { t, value: v });
    }
    Ok(r as i64)
}

/// Nudges a height away from known ordinates so the count is well defined.
fn safe_height(t: f64, ordinates: &[f64]) -> f64 {
    let mut h = t;
    for _ in 0..8 {
        if ordinates.iter().all(|&g| (g - h).abs() > 1e-4) {
            return h;
        }
        h -= 1e-3;
    }
    h
}

/// Scans one half line of `f` and certifies the result.
fn scan_half(f: &SelbergDatum, t_max: f64, mesh: Option<f64>) -> Result<Vec<f64>> {
    let mut roots = sign_changes(f, 0.0, t_max, mesh)?;
    let h = safe_height(t_max, &roots);
    let expected = argument_count(f, h)?;
    let found = roots.partition_point(|&g| g <= h) as i64;
    if found == expected {
        return Ok(roots);
    }
    // Locate the unit subinterval where the counts first disagree and rescan it finely.
    let (mut lo, mut hi) = (0.0, h);
    while hi - lo > 1.0 {
        let mid = safe_height(0.5 * (lo + hi), &roots);
        let n = argument_count(f, mid)?;
        if roots.partition_point(|&g| g <= mid) as i64 == n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let base = mesh.unwrap_or_else(|| default_mesh(lo));
    let fine = sign_changes(f, lo, hi, Some(base / 16.0))?;
    roots.retain(|&g| g <= lo || g > hi);
    roots.extend(fine);
    roots.sort_by(f64::total_cmp);
    let found_again = roots.partition_point(|&g| g <= h) as i64;
    if found_again != expected {
        return Err(Error::IncompleteZeros {
            label: f.name().to_string(),
            lo,
            hi,
            found: found_again as usize,
            expected,
        });
    }
    Ok(roots)
}

/// All critical-line zeros with 0 < |γ| ≤ `t_max`, certified against the
/// argument-principle count. Products are scanned factor by factor and
/// merged with multiplicity.
pub fn scan_zeros(f: &SelbergDatum, t_max: f64, mesh: Option<f64>) -> Result<ZeroList> {
    if !(t_max > 0.0 && t_max <= MAX_HEIGHT) {
        return Err(Error::invalid(format!("t_max = {t_max} outside (0, {MAX_HEIGHT}]")));
    }
    if let Some(m) = mesh {
        if !(m > 0.0 && m <= 0.05) {
            return Err(Error::invalid(format!("mesh = {m} outside (0, 0.05]")));
        }
    }
    let factors = f.factors();
    if factors.len() > 1 {
        let mut lists = factors.iter().map(|g| scan_zeros(g, t_max, mesh));
        let mut acc = lists.next().unwrap()?;
        for l in lists {
            acc = acc.merge(&l?, f.name());
        }
        acc.label = f.name().to_string();
        acc.t_max = t_max;
        return Ok(acc);
    }
    let ordinates = scan_half(f, t_max, mesh)?;
    let conjugate_ordinates =
        if f.has_real_coefficients() { Vec::new() } else { scan_half(&f.conjugate(), t_max, mesh)? };
    Ok(ZeroList {
        label: f.name().to_string(),
        ordinates,
        t_max,
        complete: true,
        self_conjugate: f.has_real_coefficients(),
        conjugate_ordinates,
    })
}

/// Sign changes of the product's own rotated form, without certification;
/// used to cross-check the factor-merge route.
pub fn scan_sign_changes(f: &SelbergDatum, t_max: f64, mesh: Option<f64>) -> Result<Vec<f64>> {
    sign_changes(f, 0.0, t_max, mesh)
}

/// Slope c_F of the smooth count (d/π)T log T + c_F T, fitted by least
/// squares to the theta phase on T = 1000, 2000, …, 10000.
pub fn fit_count_constant(f: &SelbergDatum) -> Result<f64> {
    let d = f.degree();
    let conj = f.conjugate();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..=10 {
        let t = 1000.0 * k as f64;
        let th = |g: &SelbergDatum| -> Result<f64> {
            Ok(log_gamma_factor(g, Complex64::new(0.5, t))?.im - log_gamma_factor(g, Complex64::new(0.5, 0.0))?.im)
        };
        let smooth = (th(f)? + th(&conj)?) / PI;
        xs.push(t);
        ys.push(smooth - d / PI * t * t.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroCountReport {
    pub datum: String,
    pub t: f64,
    /// Scanned zeros with |Im ρ| ≤ T.
    pub counted: usize,
    /// Argument-principle count with |Im ρ| ≤ T.
    pub argument_count: i64,
    pub predicted_main: f64,
    pub c_f: f64,
    pub discrepancy: f64,
    pub matches: bool,
}

/// Compares a zero list with the argument principle and the smooth main term.
pub fn zero_count_check_with(f: &SelbergDatum, zeros: &ZeroList, t: f64) -> Result<ZeroCountReport> {
    if t < 10.0 {
        return Err(Error::invalid(format!("zero_count_check needs T >= 10, got {t}")));
    }
    zeros.require(t)?;
    let all: Vec<f64> = zeros.signed_ordinates().map(f64::abs).collect();
    let h = safe_height(t, &all);
    let counted = zeros.count_both_halves(h);
    let upper = argument_count(f, h)?;
    let lower = if f.has_real_coefficients() { upper } else { argument_count(&f.conjugate(), h)? };
    let c_f = fit_count_constant(f)?;
    let predicted_main = f.degree() / PI * t * t.ln() + c_f * t;
    let argument_total = upper + lower;
    Ok(ZeroCountReport {
        datum: f.name().to_string(),
        t,
        counted,
        argument_count: argument_total,
        predicted_main,
        c_f,
        discrepancy: counted as f64 - predicted_main,
        matches: counted as i64 == argument_total,
    })
}

pub fn zero_count_check(f: &SelbergDatum, t: f64) -> Result<ZeroCountReport> {
    let zeros = scan_zeros(f, t, None)?;
    zero_count_check_with(f, &zeros, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_dirichlet_l, make_product, make_zeta, DirichletCharacter};

    fn chi(q: u64) -> SelbergDatum {
        make_dirichlet_l(&DirichletCharacter::real_primitive(q).unwrap()).unwrap()
    }

    #[test]
    fn rotated_form_of_zeta() {
        let z = make_zeta();
        // Z(0) is a positive multiple of Φ(1/2) = π^{-1/4} Γ(1/4) ζ(1/2) < 0.
        assert!(rotated_real_form(&z, 0.0).unwrap() < 0.0);
        assert!(rotated_real_form(&z, 14.0).unwrap() * rotated_real_form(&z, 14.2).unwrap() < 0.0);
    }

    #[test]
    fn wrong_phase_is_reported() {
        let l = chi(3);
        let bad = SelbergDatum::new(
            "bad",
            std::sync::Arc::new(move |n| l.a(n)),
            std::sync::Arc::new(|_| Complex64::new(0.0, 0.0)),
            chi(3).gamma_factors().to_vec(),
            chi(3).conductor_scale(),
            Complex64::new(0.0, 1.0),
            0,
            true,
            chi(3).evaluator().clone(),
        )
        .unwrap();
        assert!(matches!(rotated_real_form(&bad, 3.0), Err(Error::PhaseCorrection { .. })));
    }

    #[test]
    fn zeta_zeros_to_one_hundred() {
        let zl = scan_zeros(&make_zeta(), 100.0, None).unwrap();
        assert_eq!(zl.ordinates.len(), 29);
        assert!((zl.ordinates[0] - 14.134_725_141_734_694).abs() < 1e-8);
        assert!((zl.ordinates[28] - 98.831_194_218_193_69).abs() < 1e-8);
        assert!(zl.complete);
    }

    #[test]
    fn low_heights() {
        let zl = scan_zeros(&make_zeta(), 5.0, None).unwrap();
        assert!(zl.ordinates.is_empty() && zl.complete);
        let l3 = scan_zeros(&chi(3), 20.0, None).unwrap();
        assert!((l3.ordinates[0] - 8.039_737_155_681_467).abs() < 1e-8);
        let l4 = scan_zeros(&chi(4), 10.0, None).unwrap();
        assert!((l4.ordinates[0] - 6.020_948_904_697_597).abs() < 1e-8);
    }

    #[test]
    fn count_constant_matches_stirling() {
        for f in [make_zeta(), chi(3), make_product(&make_zeta(), &chi(4))] {
            let fitted = fit_count_constant(&f).unwrap();
            let symbolic = 2.0 / PI
                * (f.conductor_scale().ln()
                    + f.gamma_factors().iter().map(|g| g.lambda * g.lambda.ln()).sum::<f64>()
                    - f.degree() / 2.0);
            assert!((fitted - symbolic).abs() < 1e-3, "{}: {fitted} vs {symbolic}", f.name());
        }
    }

    #[test]
    fn zeta_count_at_one_hundred() {
        let r = zero_count_check(&make_zeta(), 100.0).unwrap();
        assert_eq!(r.counted, 58);
        assert_eq!(r.argument_count, 58);
        assert!(r.discrepancy.abs() <= 3.0 * 100f64.ln());
    }

    #[test]
    fn complex_character_halves() {
        let d = make_dirichlet_l(&DirichletCharacter::builtin(5, 1).unwrap()).unwrap();
        let zl = scan_zeros(&d, 30.0, None).unwrap();
        assert!(!zl.self_conjugate);
        assert!(!zl.conjugate_ordinates.is_empty());
        assert_ne!(zl.ordinates, zl.conjugate_ordinates);
    }

    #[test]
    fn product_zeros_merge_factors() {
        let p = make_product(&make_zeta(), &chi(3));
        let merged = scan_zeros(&p, 50.0, None).unwrap();
        let direct = scan_sign_changes(&p, 50.0, None).unwrap();
        assert_eq!(merged.ordinates.len(), direct.len());
        for (a, b) in merged.ordinates.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-8);
        }
        let zz = scan_zeros(&make_product(&make_zeta(), &make_zeta()), 30.0, None).unwrap();
        assert_eq!(zz.ordinates.len(), 6);
    }

    #[test]
    fn csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let d = make_dirichlet_l(&DirichletCharacter::builtin(7, 1).unwrap()).unwrap();
        let zl = scan_zeros(&d, 20.0, None).unwrap();
        zl.write_csv(dir.path(), "z").unwrap();
        let back = ZeroList::read_csv(dir.path(), "z").unwrap();
        assert_eq!(back, zl);
    }
}
