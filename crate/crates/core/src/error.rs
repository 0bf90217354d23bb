use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{function} has a pole at s = {s}")]
    Pole { function: &'static str, s: Complex64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("datum `{0}` has no evaluation recipe")]
    Unsupported(String),

    #[error("character mod {modulus} is {reason}")]
    BadCharacter { modulus: u64, reason: &'static str },

    #[error("rotated form is not real at t = {t}: |Im|/scale = {ratio:e} (wrong root number or gamma data?)")]
    PhaseCorrection { t: f64, ratio: f64 },

    #[error(
        "zero scan of `{label}` incomplete on ({lo}, {hi}]: found {found}, argument principle gives {expected}"
    )]
    IncompleteZeros {
        label: String,
        lo: f64,
        hi: f64,
        found: usize,
        expected: i64,
    },

    #[error("zero list for `{label}` covers (0, {t_max}] but height {needed} is required")]
    Coverage {
        label: String,
        t_max: f64,
        needed: f64,
    },

    #[error("zero list for `{0}` is not certified complete")]
    NotCertified(String),

    #[error("argument-principle count at T = {t} is not near an integer ({value})")]
    CountNotInteger { t: f64, value: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("pole orders differ ({0} vs {1}); pole terms would not cancel")]
    PoleOrderMismatch(u32, u32),

    #[error("mask excludes {fraction:.3} of [T, 2T], more than half")]
    MaskTooLarge { fraction: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
