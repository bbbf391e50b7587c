//! Finite abelian groups in invariant-factor presentation, their elements
//! and characters.
//!
//! A group is a product `Z_{m_1} x ... x Z_{m_k}`. Its dual has the same
//! shape: the character with exponents `(a_1, ..., a_k)` sends `x` to
//! `exp(2πi Σ a_j x_j / m_j)`. A factor may be flagged as a stand-in for the
//! circle group: `T(N, d)` is `Z_N` whose frequencies are read symmetrically
//! around zero and must stay below `N/2`; `d` is the bandwidth used for
//! generated families.

mod smith;
mod subgroup;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use smith::{lattice_hermite_basis, smith_normal_form, IntMatrix, SmithForm};
pub use subgroup::{gamma_tower, GammaTower, Subgroup};

/// Global threshold for spectral support and exactness checks.
pub const TAU_EXACT: f64 = 1e-9;

/// Largest group order the crate will enumerate point by point.
pub const ENUMERATION_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Factor {
    pub order: u64,
    /// `Some(d)` marks a circle stand-in with bandwidth `d`.
    pub torus: Option<u64>,
}

impl Factor {
    pub fn cyclic(order: u64) -> Self {
        Self { order, torus: None }
    }

    pub fn torus(order: u64, bandwidth: u64) -> Self {
        Self {
            order,
            torus: Some(bandwidth),
        }
    }

    pub fn is_torus(&self) -> bool {
        self.torus.is_some()
    }

    /// Representative of `a` in `(-m/2, m/2]`.
    pub fn symmetric(&self, a: u64) -> i64 {
        let m = self.order;
        let a = a % m;
        if 2 * a > m {
            a as i64 - m as i64
        } else {
            a as i64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<Factor>,
    order: u64,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidGroup("no factors".into()));
        }
        let mut order: u64 = 1;
        for (j, f) in factors.iter().enumerate() {
            if f.order < 2 {
                return Err(Error::InvalidGroup(format!(
                    "factor {j} has order {} < 2",
                    f.order
                )));
            }
            if let Some(d) = f.torus {
                if 2 * d >= f.order {
                    return Err(Error::InvalidGroup(format!(
                        "torus factor {j}: 2d = {} must be < N = {}",
                        2 * d,
                        f.order
                    )));
                }
            }
            order = order.checked_mul(f.order).ok_or_else(|| {
                Error::InvalidGroup("group order overflows 64-bit integers".into())
            })?;
        }
        Ok(Self { factors, order })
    }

    pub fn cyclic(orders: &[u64]) -> Result<Self> {
        Self::new(orders.iter().map(|&m| Factor::cyclic(m)).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.order).collect()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn has_torus(&self) -> bool {
        self.factors.iter().any(Factor::is_torus)
    }

    pub fn ensure_enumerable(&self) -> Result<usize> {
        if self.order > ENUMERATION_LIMIT {
            return Err(Error::EnumerationBudget {
                order: self.order,
                budget: ENUMERATION_LIMIT,
            });
        }
        Ok(self.order as usize)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn trivial_character(&self) -> Character {
        Character(vec![0; self.rank()])
    }

    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement> {
        self.check_shape(coords.len())?;
        Ok(GroupElement(
            coords
                .into_iter()
                .zip(&self.factors)
                .map(|(x, f)| x % f.order)
                .collect(),
        ))
    }

    /// Builds a character from integer exponents, reducing each modulo its factor.
    pub fn character(&self, exponents: &[i64]) -> Result<Character> {
        self.check_shape(exponents.len())?;
        Ok(Character(
            exponents
                .iter()
                .zip(&self.factors)
                .map(|(&a, f)| a.rem_euclid(f.order as i64) as u64)
                .collect(),
        ))
    }

    pub fn check_shape(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(Error::ShapeMismatch {
                expected: self.rank(),
                found: len,
            });
        }
        Ok(())
    }

    /// Mixed-radix position of `x`, first coordinate most significant.
    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.0.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&c, f)| acc * f.order as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0u64; self.rank()];
        for (j, f) in self.factors.iter().enumerate().rev() {
            let m = f.order as usize;
            coords[j] = (index % m) as u64;
            index /= m;
        }
        GroupElement(coords)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Result<impl Iterator<Item = GroupElement> + '_> {
        let n = self.ensure_enumerable()?;
        Ok((0..n).map(move |i| self.element_at(i)))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.factors)
                .map(|((&a, &b), f)| (a + b) % f.order)
                .collect(),
        )
    }

    pub fn character_mul(&self, a: &Character, b: &Character) -> Character {
        Character(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), f)| (x + y) % f.order)
                .collect(),
        )
    }

    pub fn character_pow(&self, a: &Character, k: i64) -> Character {
        Character(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, f)| {
                    let m = f.order as i128;
                    ((x as i128 * k as i128).rem_euclid(m)) as u64
                })
                .collect(),
        )
    }

    pub fn conjugate(&self, a: &Character) -> Character {
        self.character_pow(a, -1)
    }

    /// Fractional turns `Σ a_j x_j / m_j mod 1`, computed per factor in
    /// exact integer arithmetic.
    pub fn pairing_turns(&self, chi: &Character, x: &GroupElement) -> f64 {
        let mut t = 0.0;
        for ((&a, &c), f) in chi.0.iter().zip(&x.0).zip(&self.factors) {
            let m = f.order as u128;
            let r = (a as u128 * c as u128) % m;
            t += r as f64 / m as f64;
        }
        t.fract()
    }

    /// `χ(x)` on the unit circle.
    pub fn evaluate_character(&self, chi: &Character, x: &GroupElement) -> Result<Complex64> {
        self.check_shape(chi.0.len())?;
        self.check_shape(x.0.len())?;
        Ok(unit_from_turns(self.pairing_turns(chi, x)))
    }

    /// Smallest `m >= 1` with `χ^m = 1`: `lcm_j m_j / gcd(a_j, m_j)`.
    pub fn character_order(&self, chi: &Character) -> u64 {
        chi.0
            .iter()
            .zip(&self.factors)
            .fold(1u64, |acc, (&a, f)| acc.lcm(&(f.order / a.gcd(&f.order))))
    }

    /// The image `χ[G]`: the `o(χ)`-th roots of unity.
    pub fn character_image(&self, chi: &Character) -> Vec<Complex64> {
        roots_of_unity(self.character_order(chi))
    }

    pub fn is_trivial(&self, chi: &Character) -> bool {
        chi.0.iter().all(|&a| a == 0)
    }

    /// Largest symmetric frequency of `χ` on torus factor `j` (0 on cyclic factors).
    pub fn torus_frequency(&self, chi: &Character, j: usize) -> i64 {
        let f = self.factors[j];
        if f.is_torus() {
            f.symmetric(chi.0[j])
        } else {
            0
        }
    }
}

pub fn unit_from_turns(turns: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * turns).sin_cos();
    Complex64::new(c, s)
}

pub fn roots_of_unity(m: u64) -> Vec<Complex64> {
    (0..m).map(|t| unit_from_turns(t as f64 / m as f64)).collect()
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.factors.len() {
            let fac = self.factors[i];
            let mut run = 1;
            while i + run < self.factors.len() && self.factors[i + run] == fac {
                run += 1;
            }
            let base = match fac.torus {
                None => format!("Z{}", fac.order),
                Some(d) => format!("T(N={},d={})", fac.order, d),
            };
            parts.push(if run > 1 {
                format!("{base}^{run}")
            } else {
                base
            });
            i += run;
        }
        write!(f, "{}", parts.join(" x "))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    /// Parses `Z4 x Z4 x T(N=4096,d=512)`; `Z2^12` repeats a factor.
    fn from_str(s: &str) -> Result<Self> {
        let mut factors = Vec::new();
        let mut p = Parser { src: s, pos: 0 };
        loop {
            p.skip_ws();
            let fac = p.factor()?;
            p.skip_ws();
            let reps = if p.eat('^') {
                p.skip_ws();
                p.number()?
            } else {
                1
            };
            if reps == 0 {
                return Err(p.err("repetition count must be positive"));
            }
            factors.extend(std::iter::repeat_n(fac, reps as usize));
            p.skip_ws();
            if p.at_end() {
                break;
            }
            if !(p.eat('x') || p.eat('×') || p.eat('*')) {
                return Err(p.err("expected 'x' between factors"));
            }
        }
        FiniteAbelianGroup::new(factors)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn err(&self, msg: &str) -> Error {
        Error::GroupParse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let digits: String = self.rest().chars().take_while(char::is_ascii_digit).collect();
        if digits.is_empty() {
            return Err(self.err("expected a number"));
        }
        let v = digits.parse().map_err(|_| self.err("number out of range"))?;
        self.pos += digits.len();
        Ok(v)
    }

    fn key_value(&mut self, key: char) -> Result<u64> {
        self.skip_ws();
        if !(self.eat(key) || self.eat(key.to_ascii_lowercase()) || self.eat(key.to_ascii_uppercase())) {
            return Err(self.err(&format!("expected '{key}='")));
        }
        self.skip_ws();
        self.expect('=')?;
        self.skip_ws();
        self.number()
    }

    fn factor(&mut self) -> Result<Factor> {
        if self.eat('Z') || self.eat('z') {
            return Ok(Factor::cyclic(self.number()?));
        }
        if self.eat('T') {
            self.skip_ws();
            self.expect('(')?;
            let n = self.key_value('N')?;
            self.skip_ws();
            self.expect(',')?;
            let d = self.key_value('d')?;
            self.skip_ws();
            self.expect(')')?;
            return Ok(Factor::torus(n, d));
        }
        Err(self.err("expected 'Z<m>' or 'T(N=..,d=..)'"))
    }
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FiniteAbelianGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Element of a group, coordinates reduced modulo the factor orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u64>);

/// Character of a group, given by its exponent tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Character(pub Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl Character {
    pub fn exponents(&self) -> &[u64] {
        &self.0
    }
}
