//! Experiment configuration: one TOML file with a section per subcommand.
//! Zero-valued numeric fields marked "derived" take their documented
//! defaults at run time.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub general: General,
    pub zeros: ZerosSection,
    pub verify_ef: VerifyEfSection,
    pub decay: DecaySection,
    pub degree_test: DegreeTestSection,
    pub probe: ProbeSection,
    pub meanvalue: MeanValueSection,
    pub conditions: ConditionsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct General {
    pub out_dir: String,
    /// Optional character table file; empty for built-ins only.
    pub character_table: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosSection {
    pub datums: Vec<String>,
    pub t_max: f64,
    /// Uniform mesh; 0 selects 0.02 below height 100 and 0.01 above.
    pub mesh: f64,
    /// Allowed |counted − main term| in units of log T.
    pub discrepancy_logs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyEfSection {
    pub datums: Vec<String>,
    pub pair: String,
    pub t: Vec<f64>,
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    pub zero_height: f64,
    pub quad_points: usize,
    /// Archimedean half-width; 0 derives it from the pair's envelope.
    pub quad_halfwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySection {
    /// Expected to satisfy the decay bound.
    pub pair: String,
    /// Expected to violate it; empty to skip.
    pub control: String,
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeTestSection {
    pub f: String,
    pub g: String,
    pub pair: String,
    #[serde(rename = "T")]
    pub t_base: f64,
    /// 0 selects log T.
    #[serde(rename = "L")]
    pub l: f64,
    pub samples: usize,
    /// The verdict threshold is threshold_factor·g(0)·log T.
    pub threshold_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub f: String,
    pub g: String,
    pub pair: String,
    pub m: Vec<u64>,
    #[serde(rename = "T")]
    pub t_base: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub n_quad: usize,
    /// "zeros", "coefficients" or "both".
    pub mode: String,
    pub masked: bool,
    /// 0 selects 2T + 100.
    pub zero_height: f64,
    pub relative_tolerance: f64,
    pub hard_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanValueSection {
    /// Entries "F,G".
    pub pairs: Vec<String>,
    pub pair: String,
    #[serde(rename = "T")]
    pub t_base: Vec<f64>,
    #[serde(rename = "L")]
    pub l: f64,
    pub n_quad: usize,
    pub ratio_ceiling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsSection {
    /// Constant coefficient difference at p² used for the growth checks.
    pub square_difference: f64,
    pub growth_x: f64,
    pub growth_ratio_min: f64,
    pub growth_ratio_max: f64,
    pub thinness_x_max: f64,
    pub delta: f64,
    /// Sets expected to be thin: "finite:2,3,5" or "residue:A:Q".
    pub thin_sets: Vec<String>,
    /// Sets expected to fail thinness.
    pub thick_sets: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let s = |v: &str| v.to_string();
        Self {
            schema_version: SCHEMA_VERSION,
            general: General { out_dir: s("ef-lab-out"), character_table: String::new() },
            zeros: ZerosSection { datums: vec![s("zeta")], t_max: 100.0, mesh: 0.0, discrepancy_logs: 3.0 },
            verify_ef: VerifyEfSection {
                datums: vec![s("zeta"), s("chi3")],
                pair: s("sinc:1,1"),
                t: vec![0.0, 20.0, 50.0],
                l: vec![1.0, 2.0, 4.0],
                zero_height: 200.0,
                quad_points: 10,
                quad_halfwidth: 0.0,
            },
            decay: DecaySection {
                pair: s("ingham:2,1,200"),
                control: s("sinc:1"),
                t_min: 10.0,
                t_max: 1000.0,
                points_per_decade: 64,
            },
            degree_test: DegreeTestSection {
                f: s("zeta"),
                g: s("zeta*chi3"),
                pair: s("sinc:1,1"),
                t_base: 1000.0,
                l: 0.0,
                samples: 64,
                threshold_factor: 0.5,
            },
            probe: ProbeSection {
                f: s("chi3"),
                g: s("chi4"),
                pair: s("sinc:1,1"),
                m: vec![2, 3, 4, 5],
                t_base: 200.0,
                l: 3.0,
                w: 4.0,
                n_quad: 1,
                mode: s("both"),
                masked: true,
                zero_height: 0.0,
                relative_tolerance: 0.25,
                hard_tolerance: 1e-4,
            },
            meanvalue: MeanValueSection {
                pairs: vec![s("zeta,chi3"), s("chi3,chi4"), s("zeta,zeta*chi3"), s("zeta*chi3,zeta*chi4")],
                pair: s("sinc:1,1"),
                t_base: vec![50.0, 100.0, 200.0],
                l: 4.0,
                n_quad: 4,
                ratio_ceiling: 8.0,
            },
            conditions: ConditionsSection {
                square_difference: 2.0,
                growth_x: 20.0,
                growth_ratio_min: 3.0,
                growth_ratio_max: 5.0,
                thinness_x_max: 1e6,
                delta: 0.1,
                thin_sets: vec![s("finite:2,3,5,7,11,13")],
                thick_sets: vec![s("residue:1:4")],
            },
        }
    }
}

impl ExperimentConfig {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "schema_version {} is not the supported version {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(Error::Parse(format!("{name} must not be empty")))
            } else {
                Ok(())
            }
        };
        nonempty("zeros.datums", self.zeros.datums.len())?;
        nonempty("verify_ef.datums", self.verify_ef.datums.len())?;
        nonempty("verify_ef.t", self.verify_ef.t.len())?;
        nonempty("verify_ef.L", self.verify_ef.l.len())?;
        nonempty("probe.m", self.probe.m.len())?;
        nonempty("meanvalue.pairs", self.meanvalue.pairs.len())?;
        nonempty("meanvalue.T", self.meanvalue.t_base.len())?;
        if !["zeros", "coefficients", "both"].contains(&self.probe.mode.as_str()) {
            return Err(Error::Parse(format!("probe.mode `{}` is not zeros, coefficients or both", self.probe.mode)));
        }
        Ok(())
    }
}
