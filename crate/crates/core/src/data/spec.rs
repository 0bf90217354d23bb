//! Textual names for built-in data: `zeta`, `chi3`, `chi5_1`, `zeta*chi3`.

use serde::{Deserialize, Serialize};

use super::{make_dirichlet_l, make_product, make_zeta, CharacterTable, DirichletCharacter, SelbergDatum};
use crate::error::{Error, Result};

/// A datum name as it appears in configs and on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DatumSpec(pub String);

impl DatumSpec {
    pub fn build(&self, table: Option<&CharacterTable>) -> Result<SelbergDatum> {
        parse_datum(&self.0, table)
    }
}

/// Grammar: factors joined by `*`; a factor is `zeta`, `chi<q>` (the real
/// primitive character mod q) or `chi<q>_<j>` (character j mod q, looked up
/// in `table` first, then among the built-ins).
pub fn parse_datum(spec: &str, table: Option<&CharacterTable>) -> Result<SelbergDatum> {
    let mut factors = spec.split('*').map(|f| parse_factor(f.trim(), table));
    let first = factors
        .next()
        .ok_or_else(|| Error::Parse(format!("empty datum name `{spec}`")))??;
    let mut acc = first;
    for f in factors {
        acc = make_product(&acc, &f?);
    }
    Ok(acc)
}

fn parse_factor(name: &str, table: Option<&CharacterTable>) -> Result<SelbergDatum> {
    if name == "zeta" {
        return Ok(make_zeta());
    }
    let bad = || Error::Parse(format!("unknown datum `{name}`"));
    let rest = name.strip_prefix("chi").ok_or_else(bad)?;
    let chi = match rest.split_once('_') {
        None => {
            let q: u64 = rest.parse().map_err(|_| bad())?;
            DirichletCharacter::real_primitive(q).map_err(|_| bad())?
        }
        Some((q, j)) => {
            let q: u64 = q.parse().map_err(|_| bad())?;
            let j: u32 = j.parse().map_err(|_| bad())?;
            match table.and_then(|t| t.get(q, j)) {
                Some(chi) => chi.clone(),
                None => DirichletCharacter::builtin(q, j).map_err(|_| bad())?,
            }
        }
    };
    make_dirichlet_l(&chi)
        .map(|d| d.with_name(name.to_string()))
        .map_err(|e| Error::Parse(format!("datum `{name}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(parse_datum("zeta", None).unwrap().degree(), 1.0);
        let p = parse_datum("zeta*chi3", None).unwrap();
        assert_eq!(p.degree(), 2.0);
        assert_eq!(p.name(), "zeta*chi3");
        assert!(!parse_datum("chi5_1", None).unwrap().has_real_coefficients());
        assert!(parse_datum("chi6", None).is_err());
        assert!(parse_datum("chi8_1", None).is_err());
        assert!(parse_datum("eta", None).is_err());
    }

    #[test]
    fn table_characters_take_precedence() {
        let table = CharacterTable::parse("3 7 1 1 0\n3 7 2 -1 0\n").unwrap();
        let d = parse_datum("chi3_7", Some(&table)).unwrap();
        assert_eq!(d.a(2).re, -1.0);
        assert!(parse_datum("chi3_7", None).is_err());
    }
}
