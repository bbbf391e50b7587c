//! Trigonometric polynomials on a finite abelian group: evaluation, exact
//! Fourier analysis and certified norms.

mod fft;
mod random;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Character, FiniteAbelianGroup, GroupElement, TAU_EXACT};

pub use random::{random_unit_polynomial, restrict_bandwidth, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    ExactEnumeration,
    GridCorrected,
}

/// Interval `[lo, hi]` that contains a norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub lo: f64,
    pub hi: f64,
    pub method: NormMethod,
}

impl NormCertificate {
    pub fn exact(value: f64) -> Self {
        Self {
            lo: value,
            hi: value,
            method: NormMethod::ExactEnumeration,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo - TAU_EXACT <= v && v <= self.hi + TAU_EXACT
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Largest distance from 1 of any value in the interval.
    pub fn unit_defect(&self) -> f64 {
        (1.0 - self.lo).max(self.hi - 1.0).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    group: FiniteAbelianGroup,
    coeffs: BTreeMap<Character, Complex64>,
}

impl TrigPolynomial {
    /// Builds a polynomial, merging repeated characters. Frequencies on torus
    /// factors must satisfy `|a| <= d`.
    pub fn new(
        group: &FiniteAbelianGroup,
        terms: impl IntoIterator<Item = (Character, Complex64)>,
    ) -> Result<Self> {
        let mut coeffs: BTreeMap<Character, Complex64> = BTreeMap::new();
        for (chi, c) in terms {
            group.check_shape(chi.0.len())?;
            let chi = Character(
                chi.0
                    .iter()
                    .zip(group.factors())
                    .map(|(&a, f)| a % f.order)
                    .collect(),
            );
            for (j, f) in group.factors().iter().enumerate() {
                if let Some(limit) = f.torus {
                    let frequency = f.symmetric(chi.0[j]);
                    if frequency.unsigned_abs() > limit {
                        return Err(Error::Bandwidth {
                            factor: j,
                            frequency,
                            limit,
                        });
                    }
                }
            }
            *coeffs.entry(chi).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(Self {
            group: group.clone(),
            coeffs,
        })
    }

    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        Self {
            group: group.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn character(group: &FiniteAbelianGroup, chi: Character) -> Result<Self> {
        Self::new(group, [(chi, Complex64::new(1.0, 0.0))])
    }

    pub fn constant(group: &FiniteAbelianGroup, c: Complex64) -> Self {
        Self::new(group, [(group.trivial_character(), c)]).expect("trivial character is valid")
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn coefficients(&self) -> &BTreeMap<Character, Complex64> {
        &self.coeffs
    }

    pub fn coefficient(&self, chi: &Character) -> Complex64 {
        self.coeffs.get(chi).copied().unwrap_or_default()
    }

    /// Characters with `|coefficient| > τ`.
    pub fn spectrum(&self) -> Vec<Character> {
        self.coeffs
            .iter()
            .filter(|(_, c)| c.norm() > TAU_EXACT)
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// `Σ |f̂(γ)|`.
    pub fn coefficient_l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Largest `|a_j|` over the spectrum on torus factor `j` (0 elsewhere).
    pub fn torus_degree(&self, j: usize) -> u64 {
        self.spectrum()
            .iter()
            .map(|chi| self.group.torus_frequency(chi, j).unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, x: &GroupElement) -> Result<Complex64> {
        self.group.check_shape(x.0.len())?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (chi, c) in &self.coeffs {
            acc += c * crate::group::unit_from_turns(self.group.pairing_turns(chi, x));
        }
        Ok(acc)
    }

    /// Values on every element, in lexicographic order.
    pub fn evaluate_all(&self) -> Result<Vec<Complex64>> {
        let n = self.group.ensure_enumerable()?;
        let moduli = self.group.moduli();
        if self.coeffs.len() <= 4 {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = self.evaluate(&self.group.element_at(i))?;
            }
            return Ok(out);
        }
        let mut table = vec![Complex64::new(0.0, 0.0); n];
        for (chi, c) in &self.coeffs {
            table[self.group.index_of(&GroupElement(chi.0.clone()))] += c;
        }
        fft::transform(&mut table, &moduli, fft::Direction::Synthesis);
        Ok(table)
    }

    pub fn add(&self, other: &TrigPolynomial) -> Result<TrigPolynomial> {
        self.same_group(other)?;
        let mut out = self.clone();
        for (chi, c) in &other.coeffs {
            *out.coeffs.entry(chi.clone()).or_default() += c;
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> TrigPolynomial {
        TrigPolynomial {
            group: self.group.clone(),
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), c * s)).collect(),
        }
    }

    /// `χ · f`.
    pub fn modulate(&self, chi: &Character) -> Result<TrigPolynomial> {
        self.group.check_shape(chi.0.len())?;
        TrigPolynomial::new(
            &self.group,
            self.coeffs
                .iter()
                .map(|(k, c)| (self.group.character_mul(k, chi), *c)),
        )
    }

    pub fn conjugate(&self) -> TrigPolynomial {
        TrigPolynomial {
            group: self.group.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (self.group.conjugate(k), c.conj()))
                .collect(),
        }
    }

    /// `x ↦ f(x + a)`.
    pub fn translate(&self, a: &GroupElement) -> Result<TrigPolynomial> {
        self.group.check_shape(a.0.len())?;
        Ok(TrigPolynomial {
            group: self.group.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| {
                    let phase = crate::group::unit_from_turns(self.group.pairing_turns(k, a));
                    (k.clone(), c * phase)
                })
                .collect(),
        })
    }

    fn same_group(&self, other: &TrigPolynomial) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch {
                left: self.group.to_string(),
                right: other.group.to_string(),
            });
        }
        Ok(())
    }
}

/// Coefficients from a full sample table:
/// `f̂(γ) = |G|⁻¹ Σ_x f(x) conj(γ(x))`.
pub fn fourier_transform(group: &FiniteAbelianGroup, table: &[Complex64]) -> Result<TrigPolynomial> {
    let n = group.ensure_enumerable()?;
    if table.len() != n {
        return Err(Error::TableSize {
            expected: n,
            found: table.len(),
        });
    }
    let mut work = table.to_vec();
    fft::transform(&mut work, &group.moduli(), fft::Direction::Analysis);
    let scale = 1.0 / n as f64;
    let peak = work.iter().map(|c| c.norm()).fold(0.0, f64::max) * scale;
    let floor = peak * f64::EPSILON * 0.5;
    let terms = work
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i, c * scale))
        .filter(|(_, c)| c.norm() > floor)
        .map(|(i, c)| (Character(group.element_at(i).0), c));
    let mut coeffs = BTreeMap::new();
    for (k, c) in terms {
        coeffs.insert(k, c);
    }
    Ok(TrigPolynomial {
        group: group.clone(),
        coeffs,
    })
}

/// Sample table of `f`; the inverse of [`fourier_transform`].
pub fn inverse_fourier_transform(f: &TrigPolynomial) -> Result<Vec<Complex64>> {
    f.evaluate_all()
}

/// Certified sup norm together with the first lexicographic grid point
/// attaining the grid maximum (ties within `τ`).
pub fn sup_norm_with_maximizer(f: &TrigPolynomial) -> Result<(NormCertificate, GroupElement)> {
    let group = f.group();
    let spectrum = f.spectrum();
    if spectrum.len() <= 1 {
        let c = spectrum.first().map_or(0.0, |k| f.coefficient(k).norm());
        return Ok((NormCertificate::exact(c), group.identity()));
    }
    let values = f.evaluate_all()?;
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let idx = values
        .iter()
        .position(|v| v.norm() >= max - TAU_EXACT)
        .unwrap_or(0);
    let mut correction = 1.0;
    for (j, fac) in group.factors().iter().enumerate() {
        if fac.is_torus() {
            let d = f.torus_degree(j);
            correction *= (std::f64::consts::PI * d as f64 / fac.order as f64).cos();
        }
    }
    let cert = if correction < 1.0 {
        NormCertificate {
            lo: max,
            hi: max / correction,
            method: NormMethod::GridCorrected,
        }
    } else {
        NormCertificate::exact(max)
    };
    Ok((cert, group.element_at(idx)))
}

/// Certified sup norm. On cyclic factors the maximum over the full group is
/// exact; on torus stand-ins the grid maximum `lo` is paired with
/// `hi = lo / Π cos(π d_j / N_j)`, `d_j` the degree on that factor.
pub fn sup_norm(f: &TrigPolynomial) -> Result<NormCertificate> {
    sup_norm_with_maximizer(f).map(|(c, _)| c)
}

/// `((1/|G|) Σ_x |f(x)|^p)^{1/p}`; a quasi-norm for `p < 1`.
pub fn lp_norm(f: &TrigPolynomial, p: f64) -> Result<NormCertificate> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must be positive and finite")));
    }
    let values = f.evaluate_all()?;
    Ok(NormCertificate::exact(lp_of_values(&values, p)))
}

pub(crate) fn lp_of_values(values: &[Complex64], p: f64) -> f64 {
    let n = values.len() as f64;
    let mean: f64 = values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n;
    mean.powf(1.0 / p)
}

/// Interchange form: group spec plus `(exponents, re, im)` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialRecord {
    pub group: String,
    pub terms: Vec<(Vec<u64>, f64, f64)>,
}

impl From<&TrigPolynomial> for PolynomialRecord {
    fn from(f: &TrigPolynomial) -> Self {
        Self {
            group: f.group.to_string(),
            terms: f
                .coeffs
                .iter()
                .map(|(k, c)| (k.0.clone(), c.re, c.im))
                .collect(),
        }
    }
}

impl TryFrom<&PolynomialRecord> for TrigPolynomial {
    type Error = Error;

    fn try_from(r: &PolynomialRecord) -> Result<Self> {
        let group: FiniteAbelianGroup = r.group.parse()?;
        for (e, _, _) in &r.terms {
            group.check_shape(e.len())?;
            for (j, (&a, f)) in e.iter().zip(group.factors()).enumerate() {
                if a >= f.order {
                    return Err(Error::Schema(format!(
                        "exponent {a} out of range for factor {j} of order {}",
                        f.order
                    )));
                }
            }
        }
        TrigPolynomial::new(
            &group,
            r.terms
                .iter()
                .map(|(e, re, im)| (Character(e.clone()), Complex64::new(*re, *im))),
        )
    }
}

impl Serialize for TrigPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PolynomialRecord::deserialize(d)?;
        TrigPolynomial::try_from(&r).map_err(serde::de::Error::custom)
    }
}
