//! Machine-readable output: JSON with 17 significant digits for every
//! float, and LF-terminated CSV.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

use crate::error::{Error, Result};

/// Version stamped into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Positional decimal with 17 significant digits (`nan`, `inf`, `-inf` for
/// non-finite values).
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Exponent from the rounded scientific form avoids log10 edge cases.
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci.rsplit('e').next().unwrap().parse().unwrap();
    let decimals = (16 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

struct SigDigits;

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{:.16e}", value)
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes compactly; floats as `d.dddddddddddddddde±x`, NaN as null.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).map_err(|e| Error::Parse(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = to_json_string(value)?;
    fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

/// Writes a CSV table (LF line endings, RFC 4180 quoting); cells are
/// already formatted.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io { path: path.display().to_string(), source: e };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(|e| io_err(e.into()))?;
    w.write_record(header).map_err(|e| io_err(e.into()))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(e.into()))?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(14.134725141734694), "14.134725141734695");
        assert_eq!(fmt17(0.5), "0.50000000000000000");
        assert_eq!(fmt17(-2.5e-3), "-0.0025000000000000001");
        assert_eq!(fmt17(1e20), "100000000000000000000");
        for x in [std::f64::consts::PI, 1.0 / 3.0, 123456.789, 9.999999999999999e-5] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_floats() {
        #[derive(Serialize)]
        struct R {
            x: f64,
            y: f64,
            n: u32,
        }
        let s = to_json_string(&R { x: 0.1, y: f64::NAN, n: 3 }).unwrap();
        assert_eq!(s, "{\"x\":1.0000000000000001e-1,\"y\":null,\"n\":3}\n");
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["x"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn csv_quotes_and_lf() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv(&p, &["pair", "x"], &[vec!["sinc:1,1".into(), fmt17(0.5)]]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "pair,x\n\"sinc:1,1\",0.50000000000000000\n");
    }
}
