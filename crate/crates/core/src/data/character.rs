use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{divisors, gcd};
use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

/// A Dirichlet character given by its table of values on residues mod `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    index: u32,
    values: Vec<Complex64>,
}

impl DirichletCharacter {
    /// Builds a character from its values on `0..q`; checks that it is a
    /// homomorphism on the unit group and vanishes elsewhere.
    pub fn from_values(modulus: u64, index: u32, values: Vec<Complex64>) -> Result<Self> {
        if modulus == 0 || values.len() as u64 != modulus {
            return Err(Error::BadCharacter { modulus, reason: "given a table of the wrong length" });
        }
        for a in 0..modulus {
            let v = values[a as usize];
            if gcd(a, modulus) == 1 {
                if (v.norm() - 1.0).abs() > TOL {
                    return Err(Error::BadCharacter { modulus, reason: "not unimodular on units" });
                }
            } else if v.norm() > TOL {
                return Err(Error::BadCharacter { modulus, reason: "nonzero off the unit group" });
            }
        }
        let chi = Self { modulus, index, values };
        for a in 1..modulus {
            for b in a..modulus {
                let lhs = chi.value(a * b);
                let rhs = chi.value(a) * chi.value(b);
                if (lhs - rhs).norm() > TOL {
                    return Err(Error::BadCharacter { modulus, reason: "not multiplicative" });
                }
            }
        }
        if (chi.value(1) - 1.0).norm() > TOL {
            return Err(Error::BadCharacter { modulus, reason: "not 1 at 1" });
        }
        Ok(chi)
    }

    /// Built-in characters for q ∈ {3, 4, 5, 7, 8}, indexed from 0 (principal).
    ///
    /// For cyclic unit groups index j sends the least primitive root g to
    /// e^{2πij/φ(q)}. Mod 8 the index encodes (χ(−1), χ(5)) = ((−1)^{j&1}, (−1)^{j>>1}).
    pub fn builtin(modulus: u64, index: u32) -> Result<Self> {
        let phi = (1..modulus).filter(|&a| gcd(a, modulus) == 1).count() as u32;
        if index >= phi.max(1) {
            return Err(Error::invalid(format!("character index {index} out of range mod {modulus}")));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); modulus as usize];
        match modulus {
            3 | 4 | 5 | 7 => {
                let g = match modulus {
                    3 => 2,
                    4 => 3,
                    5 => 2,
                    _ => 3,
                };
                let mut x = 1u64;
                for k in 0..phi {
                    let angle = 2.0 * PI * (index as f64) * (k as f64) / phi as f64;
                    values[x as usize] = unit(angle);
                    x = x * g % modulus;
                }
            }
            8 => {
                let e1 = (index & 1) as i32;
                let e2 = (index >> 1) as i32;
                // units: 1, 7 = -1, 5, 3 = -1 * 5 (mod 8)
                let minus = (-1f64).powi(e1);
                let five = (-1f64).powi(e2);
                values[1] = Complex64::new(1.0, 0.0);
                values[7] = Complex64::new(minus, 0.0);
                values[5] = Complex64::new(five, 0.0);
                values[3] = Complex64::new(minus * five, 0.0);
            }
            _ => {
                return Err(Error::invalid(format!(
                    "no built-in characters mod {modulus}; load a character table"
                )))
            }
        }
        Self::from_values(modulus, index, values)
    }

    /// The real primitive character mod `q` for q ∈ {3, 4, 5, 7, 8}
    /// (the Kronecker symbol; mod 8 the even one).
    pub fn real_primitive(modulus: u64) -> Result<Self> {
        let index = match modulus {
            3 | 4 => 1,
            5 => 2,
            7 => 3,
            8 => 2,
            _ => return Err(Error::invalid(format!("no built-in real character mod {modulus}"))),
        };
        Self::builtin(modulus, index)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    pub fn is_principal(&self) -> bool {
        (1..self.modulus)
            .filter(|&a| gcd(a, self.modulus) == 1)
            .all(|a| (self.value(a) - 1.0).norm() < TOL)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() < TOL)
    }

    /// χ(−1) = 1.
    pub fn is_even(&self) -> bool {
        (self.value(self.modulus - 1) - 1.0).norm() < TOL
    }

    /// Smallest d | q such that χ is trivial on units ≡ 1 mod d.
    pub fn conductor(&self) -> u64 {
        let q = self.modulus;
        for d in divisors(q) {
            let induced = (1..q)
                .filter(|&a| gcd(a, q) == 1 && a % d == 1 % d)
                .all(|a| (self.value(a) - 1.0).norm() < TOL);
            if induced {
                return d;
            }
        }
        q
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    pub fn conj(&self) -> Self {
        Self {
            modulus: self.modulus,
            index: self.index,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// τ(χ) = Σ_a χ(a) e^{2πia/q}.
    pub fn gauss_sum(&self) -> Complex64 {
        (1..self.modulus)
            .map(|a| self.value(a) * unit(2.0 * PI * a as f64 / self.modulus as f64))
            .sum()
    }

    pub(crate) fn values(&self) -> &[Complex64] {
        &self.values
    }
}

fn unit(angle: f64) -> Complex64 {
    let (s, c) = angle.sin_cos();
    // Snap to exact values so real characters stay exactly real.
    let snap = |x: f64| if (x - x.round()).abs() < 1e-13 { x.round() } else { x };
    Complex64::new(snap(c), snap(s))
}

/// Characters read from a plain-text table with lines
/// `q index residue value_re value_im`; residues not listed are 0.
#[derive(Debug, Clone, Default)]
pub struct CharacterTable {
    characters: BTreeMap<(u64, u32), DirichletCharacter>,
}

impl CharacterTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw: BTreeMap<(u64, u32), Vec<Complex64>> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!(
                    "character table line {}: expected 5 fields, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let bad = |what: &str| Error::Parse(format!("character table line {}: bad {what}", lineno + 1));
            let q: u64 = fields[0].parse().map_err(|_| bad("modulus"))?;
            let idx: u32 = fields[1].parse().map_err(|_| bad("index"))?;
            let r: u64 = fields[2].parse().map_err(|_| bad("residue"))?;
            let re: f64 = fields[3].parse().map_err(|_| bad("real part"))?;
            let im: f64 = fields[4].parse().map_err(|_| bad("imaginary part"))?;
            if q == 0 || r >= q {
                return Err(bad("residue"));
            }
            let entry = raw
                .entry((q, idx))
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); q as usize]);
            entry[r as usize] = Complex64::new(re, im);
        }
        let mut characters = BTreeMap::new();
        for ((q, idx), values) in raw {
            characters.insert((q, idx), DirichletCharacter::from_values(q, idx, values)?);
        }
        Ok(Self { characters })
    }

    pub fn get(&self, modulus: u64, index: u32) -> Option<&DirichletCharacter> {
        self.characters.get(&(modulus, index))
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_mod_three() {
        let chi = DirichletCharacter::real_primitive(3).unwrap();
        assert_eq!(chi.value(2), Complex64::new(-1.0, 0.0));
        assert_eq!(chi.value(3), Complex64::new(0.0, 0.0));
        assert!(chi.is_primitive() && !chi.is_even() && chi.is_real());
    }

    #[test]
    fn builtin_primitivity() {
        // mod 8: index 1 is induced from mod 4
        assert!(!DirichletCharacter::builtin(8, 1).unwrap().is_primitive());
        assert_eq!(DirichletCharacter::builtin(8, 1).unwrap().conductor(), 4);
        assert!(DirichletCharacter::builtin(8, 2).unwrap().is_primitive());
        assert!(DirichletCharacter::builtin(8, 3).unwrap().is_primitive());
        for q in [3, 5, 7] {
            assert!(DirichletCharacter::builtin(q, 0).unwrap().is_principal());
            for j in 1..(q as u32 - 1) {
                assert!(DirichletCharacter::builtin(q, j).unwrap().is_primitive(), "q={q} j={j}");
            }
        }
    }

    #[test]
    fn quadratic_characters_are_kronecker_symbols() {
        // (5/p): +1 for p ≡ ±1 mod 5
        let chi5 = DirichletCharacter::real_primitive(5).unwrap();
        assert_eq!(chi5.value(4).re, 1.0);
        assert_eq!(chi5.value(2).re, -1.0);
        let chi8 = DirichletCharacter::real_primitive(8).unwrap();
        assert!(chi8.is_even());
        assert_eq!(chi8.value(7).re, 1.0);
        assert_eq!(chi8.value(3).re, -1.0);
    }

    #[test]
    fn gauss_sum_modulus() {
        for (q, j) in [(3, 1), (4, 1), (5, 1), (5, 2), (7, 1), (7, 3), (8, 2), (8, 3)] {
            let tau = DirichletCharacter::builtin(q, j).unwrap().gauss_sum();
            assert!((tau.norm() - (q as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn table_parsing() {
        let text = "# chi mod 3\n3 1 1 1 0\n3 1 2 -1 0\n";
        let table = CharacterTable::parse(text).unwrap();
        let chi = table.get(3, 1).unwrap();
        assert_eq!(chi, &DirichletCharacter::real_primitive(3).unwrap());
        assert!(CharacterTable::parse("3 1 1 1").is_err());
        assert!(CharacterTable::parse("3 1 1 1 0\n3 1 2 1 0.5\n").is_err());
    }

    #[test]
    fn rejects_non_homomorphism() {
        let mut values = vec![Complex64::new(0.0, 0.0); 5];
        values[1] = Complex64::new(1.0, 0.0);
        values[2] = Complex64::new(-1.0, 0.0);
        values[3] = Complex64::new(1.0, 0.0);
        values[4] = Complex64::new(1.0, 0.0);
        assert!(DirichletCharacter::from_values(5, 9, values).is_err());
    }
}
