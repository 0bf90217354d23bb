//! Subcommand drivers: each runs one experiment from an
//! [`ExperimentConfig`], writes JSON and CSV under the output directory
//! and returns a pass flag with a one-line summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::comparator::{
    coefficient_probe, degree_test, mean_value_check, ProbeInputs, ProbeMode, ProbeResult, VERDICT_DISTINCT,
    VERDICT_EQUAL,
};
use crate::config::ExperimentConfig;
use crate::data::{check_exceptional_thinness, check_growth_conditions, parse_datum, CharacterTable, ExceptionalSet, SelbergDatum};
use crate::ef::{verify_formula_with_zeros, EFParams, EFReport};
use crate::error::{Error, Result};
use crate::fourier::{log_grid, parse_pair, verify_decay, DecayReport};
use crate::report::{fmt17, write_csv, write_json, SCHEMA_VERSION};
use crate::zeros::{scan_zeros, zero_count_check_with, ZeroCountReport, ZeroList};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    pass: bool,
    results: T,
}

fn emit<T: Serialize>(out: &Path, stem: &str, command: &str, pass: bool, results: T) -> Result<()> {
    write_json(&out.join(format!("{stem}.json")), &Document { schema_version: SCHEMA_VERSION, command, pass, results })
}

fn ensure_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::Io { path: out.display().to_string(), source: e })
}

/// File-system friendly form of a datum label.
pub fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '-' }).collect()
}

fn characters(cfg: &ExperimentConfig) -> Result<Option<CharacterTable>> {
    let path = &cfg.general.character_table;
    if path.is_empty() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    Ok(Some(CharacterTable::parse(&text)?))
}

fn datum(spec: &str, table: &Option<CharacterTable>) -> Result<SelbergDatum> {
    parse_datum(spec, table.as_ref())
}

fn b(x: bool) -> String {
    x.to_string()
}

pub fn run_zeros(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    ensure_dir(out)?;
    let table = characters(cfg)?;
    let c = &cfg.zeros;
    let mesh = if c.mesh > 0.0 { Some(c.mesh) } else { None };
    let mut reports: Vec<ZeroCountReport> = Vec::new();
    let mut pass = true;
    let mut parts = Vec::new();
    for spec in &c.datums {
        let f = datum(spec, &table)?;
        let zl = scan_zeros(&f, c.t_max, mesh)?;
        zl.write_csv(out, &format!("zeros_{}", file_stem(f.name())))?;
        let ok_count;
        if c.t_max >= 10.0 {
            let r = zero_count_check_with(&f, &zl, c.t_max)?;
            ok_count = r.matches && r.discrepancy.abs() <= c.discrepancy_logs * c.t_max.ln();
            parts.push(format!("{} {} zeros, count {}/{}", f.name(), zl.ordinates.len(), r.counted, r.argument_count));
            reports.push(r);
        } else {
            ok_count = zl.complete;
            parts.push(format!("{} {} zeros", f.name(), zl.ordinates.len()));
        }
        pass &= ok_count && zl.complete;
    }
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.datum.clone(),
                fmt17(r.t),
                r.counted.to_string(),
                r.argument_count.to_string(),
                fmt17(r.predicted_main),
                fmt17(r.c_f),
                fmt17(r.discrepancy),
                b(r.matches),
            ]
        })
        .collect();
    write_csv(
        &out.join("zeros_summary.csv"),
        &["datum", "T", "counted", "argument_count", "predicted_main", "c_f", "discrepancy", "matches"],
        &rows,
    )?;
    emit(out, "zeros_summary", "zeros", pass, &reports)?;
    Ok(Outcome { pass, summary: format!("zeros up to {}: {}", c.t_max, parts.join("; ")) })
}

pub fn run_verify_ef(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    ensure_dir(out)?;
    let table = characters(cfg)?;
    let c = &cfg.verify_ef;
    let pair = parse_pair(&c.pair)?;
    let mut reports: Vec<EFReport> = Vec::new();
    for spec in &c.datums {
        let f = datum(spec, &table)?;
        let zeros = scan_zeros(&f, c.zero_height, None)?;
        for &t in &c.t {
            for &l in &c.l {
                let mut p = EFParams::new(t, l, c.zero_height);
                p.quad_points = c.quad_points;
                p.quad_halfwidth = if c.quad_halfwidth > 0.0 { Some(c.quad_halfwidth) } else { None };
                reports.push(verify_formula_with_zeros(&f, &zeros, &pair, &p)?);
            }
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    let cplx = |z: num_complex::Complex64| [fmt17(z.re), fmt17(z.im)];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let mut row = vec![r.datum.clone(), r.pair.clone(), fmt17(r.params.t), fmt17(r.params.l), fmt17(r.params.zero_height)];
            for z in [r.zero_sum, r.pole_term, r.arch_term, r.prime_term] {
                row.extend(cplx(z));
            }
            row.extend([fmt17(r.residual), fmt17(r.budget), b(r.pass)]);
            row
        })
        .collect();
    write_csv(
        &out.join("verify_ef.csv"),
        &[
            "datum", "pair", "t", "L", "zero_height", "zero_sum_re", "zero_sum_im", "pole_re", "pole_im", "arch_re",
            "arch_im", "prime_re", "prime_im", "residual", "budget", "pass",
        ],
        &rows,
    )?;
    emit(out, "verify_ef", "verify-ef", pass, &reports)?;
    let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
    let failed = reports.iter().filter(|r| !r.pass).count();
    Ok(Outcome {
        pass,
        summary: format!("verify-ef: {} reports, {failed} failed, max residual {worst:.3e}", reports.len()),
    })
}

pub fn run_decay(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    ensure_dir(out)?;
    let c = &cfg.decay;
    let grid = log_grid(c.t_min, c.t_max, c.points_per_decade);
    let main = verify_decay(&parse_pair(&c.pair)?, &grid)?;
    let control = if c.control.is_empty() { None } else { Some(verify_decay(&parse_pair(&c.control)?, &grid)?) };
    let pass = main.holds && control.as_ref().is_none_or(|r| !r.holds);
    let mut all: Vec<&DecayReport> = vec![&main];
    all.extend(control.as_ref());
    let rows: Vec<Vec<String>> =
        all.iter().flat_map(|r| r.ratios.iter().map(|(t, v)| vec![r.pair.clone(), fmt17(*t), fmt17(*v)])).collect();
    write_csv(&out.join("decay.csv"), &["pair", "t", "ratio"], &rows)?;
    emit(out, "decay", "decay", pass, &all)?;
    Ok(Outcome {
        pass,
        summary: format!(
            "decay: {} holds={}{}",
            main.pair,
            main.holds,
            control.map(|r| format!(", control {} holds={}", r.pair, r.holds)).unwrap_or_default()
        ),
    })
}

pub fn run_degree_test(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    ensure_dir(out)?;
    let table = characters(cfg)?;
    let c = &cfg.degree_test;
    let (f, g) = (datum(&c.f, &table)?, datum(&c.g, &table)?);
    let pair = parse_pair(&c.pair)?;
    let l = if c.l > 0.0 { c.l } else { c.t_base.ln() };
    let r = degree_test(&f, &g, &pair, c.t_base, l, c.samples, c.threshold_factor)?;
    let expected = if (f.degree() - g.degree()).abs() > 1e-12 { VERDICT_DISTINCT } else { VERDICT_EQUAL };
    let pass = r.verdict == expected;
    let rows: Vec<Vec<String>> = r.rows.iter().map(|(t, v)| vec![fmt17(*t), fmt17(*v)]).collect();
    write_csv(&out.join("degree_test.csv"), &["t", "scaled_delta"], &rows)?;
    emit(out, "degree_test", "degree-test", pass, &r)?;
    Ok(Outcome {
        pass,
        summary: format!(
            "degree-test {} vs {}: mean {:.4} vs threshold {:.4}, {}",
            r.f, r.g, r.mean_scaled_delta, r.threshold, r.verdict
        ),
    })
}

#[derive(Serialize)]
struct ProbeRow {
    result: ProbeResult,
    pass: bool,
}

pub fn run_probe(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    ensure_dir(out)?;
    let table = characters(cfg)?;
    let c = &cfg.probe;
    let (f, g) = (datum(&c.f, &table)?, datum(&c.g, &table)?);
    let pair = parse_pair(&c.pair)?;
    let modes: Vec<ProbeMode> = match c.mode.as_str() {
        "zeros" => vec![ProbeMode::Zeros],
        "coefficients" => vec![ProbeMode::Coefficients],
        _ => vec![ProbeMode::Coefficients, ProbeMode::Zeros],
    };
    let needs_zeros = c.masked || modes.contains(&ProbeMode::Zeros);
    let height = if c.zero_height > 0.0 { c.zero_height } else { 2.0 * c.t_base + 100.0 };
    let zeros: Option<(ZeroList, ZeroList)> =
        if needs_zeros { Some((scan_zeros(&f, height, None)?, scan_zeros(&g, height, None)?)) } else { None };
    let mut rows = Vec::new();
    let mut pass = true;
    for &m in &c.m {
        let mut by_mode = BTreeMap::new();
        for &mode in &modes {
            let inputs = ProbeInputs {
                pair: &pair,
                zeros: zeros.as_ref().map(|(a, b)| (a, b)),
                mode,
                masked: c.masked,
                n_quad: c.n_quad,
            };
            let r = coefficient_probe(&f, &g, m, c.t_base, c.l, c.w, &inputs)?;
            // A vanishing target is judged against the size Λ(m)/√m of a unit coefficient.
            let scale = if r.target.norm() > 0.0 {
                r.target.norm()
            } else {
                crate::arith::von_mangoldt(m) / (m as f64).sqrt()
            };
            let ok = (r.estimate - r.target).norm() <= c.relative_tolerance * scale;
            by_mode.insert(mode as u8, r.clone());
            pass &= ok;
            rows.push(ProbeRow { result: r, pass: ok });
        }
        if let (Some(a), Some(z)) = (by_mode.get(&(ProbeMode::Coefficients as u8)), by_mode.get(&(ProbeMode::Zeros as u8))) {
            let agree = (a.estimate - z.estimate).norm() <= z.budget + c.hard_tolerance;
            pass &= agree;
        }
    }
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let x = &r.result;
            vec![
                x.m.to_string(),
                format!("{:?}", x.mode).to_lowercase(),
                b(x.masked),
                fmt17(x.estimate.re),
                fmt17(x.estimate.im),
                fmt17(x.target.re),
                fmt17(x.target.im),
                fmt17(x.relative_error),
                fmt17(x.budget),
                fmt17(x.unmasked_measure),
                b(r.pass),
            ]
        })
        .collect();
    write_csv(
        &out.join("probe.csv"),
        &["m", "mode", "masked", "estimate_re", "estimate_im", "target_re", "target_im", "relative_error", "budget", "unmasked_measure", "pass"],
        &csv,
    )?;
    emit(out, "probe", "probe", pass, &rows)?;
    let worst = rows.iter().map(|r| r.result.relative_error).fold(0.0, f64::max);
    Ok(Outcome {
        pass,
        summary: format!("probe {} vs {} at T = {}: {} runs, worst relative error {worst:.4}", f.name(), g.name(), c.t_base, rows.len()),
    })
}

pub fn run_meanvalue(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    ensure_dir(out)?;
    let table = characters(cfg)?;
    let c = &cfg.meanvalue;
    let pair = parse_pair(&c.pair)?;
    let mut reports = Vec::new();
    for entry in &c.pairs {
        let (a, bb) =
            entry.split_once(',').ok_or_else(|| Error::Parse(format!("meanvalue pair `{entry}` is not `F,G`")))?;
        let (f, g) = (datum(a.trim(), &table)?, datum(bb.trim(), &table)?);
        for &t in &c.t_base {
            reports.push(mean_value_check(&f, &g, &pair, t, c.l, c.n_quad)?);
        }
    }
    let pass = reports.iter().all(|r| r.ratio <= c.ratio_ceiling);
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| vec![r.f.clone(), r.g.clone(), fmt17(r.t_base), fmt17(r.l), fmt17(r.lhs_integral), fmt17(r.rhs_bound), fmt17(r.ratio)])
        .collect();
    write_csv(&out.join("meanvalue.csv"), &["f", "g", "T", "L", "lhs", "rhs", "ratio"], &rows)?;
    emit(out, "meanvalue", "meanvalue", pass, &reports)?;
    let worst = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(Outcome { pass, summary: format!("meanvalue: {} checks, max ratio {worst:.4} (ceiling {})", reports.len(), c.ratio_ceiling) })
}

/// "finite:2,3,5" or "residue:A:Q" (primes p ≡ A mod Q).
pub fn parse_exceptional_set(spec: &str) -> Result<ExceptionalSet> {
    let bad = || Error::Parse(format!("exceptional set `{spec}` is not finite:P,.. or residue:A:Q"));
    match spec.split_once(':') {
        Some(("finite", rest)) => {
            let ps = rest
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            ExceptionalSet::finite(spec, ps).map_err(|e| Error::Parse(e.to_string()))
        }
        Some(("residue", rest)) => {
            let (a, q) = rest.split_once(':').ok_or_else(bad)?;
            let (a, q) = (a.parse::<u64>().map_err(|_| bad())?, q.parse::<u64>().map_err(|_| bad())?);
            if q == 0 {
                return Err(bad());
            }
            Ok(ExceptionalSet::predicate(spec, move |p| p % q == a % q))
        }
        _ => Err(bad()),
    }
}

#[derive(Serialize)]
struct ConditionsDoc {
    growth: crate::data::GrowthReport,
    growth_pass: bool,
    thinness: Vec<(crate::data::ThinnessReport, bool)>,
}

pub fn run_conditions(cfg: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    ensure_dir(out)?;
    let c = &cfg.conditions;
    let d = c.square_difference;
    let growth = check_growth_conditions(&|_| d, c.growth_x)?;
    let growth_pass = growth.bound_1_ratio >= c.growth_ratio_min && growth.bound_1_ratio <= c.growth_ratio_max;
    let mut thinness = Vec::new();
    for (specs, expect_thin) in [(&c.thin_sets, true), (&c.thick_sets, false)] {
        for s in specs {
            let r = check_exceptional_thinness(&parse_exceptional_set(s)?, c.thinness_x_max, c.delta, None)?;
            let ok = r.passes == expect_thin;
            thinness.push((r, ok));
        }
    }
    let pass = growth_pass && thinness.iter().all(|t| t.1);
    let rows: Vec<Vec<String>> = growth
        .rows
        .iter()
        .map(|r| vec![fmt17(r.x), fmt17(r.sum), fmt17(r.bound_1_ratio), fmt17(r.bound_3_ratio)])
        .collect();
    write_csv(&out.join("conditions.csv"), &["x", "sum", "bound_1_ratio", "bound_3_ratio"], &rows)?;
    let summary = format!(
        "conditions: growth ratio {:.4} at x = {}, thinness {}",
        growth.bound_1_ratio,
        c.growth_x,
        thinness.iter().map(|(r, _)| format!("{}={}", r.set, if r.passes { "thin" } else { "not thin" })).collect::<Vec<_>>().join(", ")
    );
    emit(out, "conditions", "conditions", pass, ConditionsDoc { growth, growth_pass, thinness })?;
    Ok(Outcome { pass, summary })
}
