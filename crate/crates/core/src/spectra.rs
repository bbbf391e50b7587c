//! Finite-window diagnostics for spectral sets: Sidon and `Λ(p)`-type
//! ratios, lower `ℓ¹` constants, lacunarity and Daugavet defects.
//!
//! Every estimator searches a candidate set and reports a one-sided bound
//! together with the candidate attaining it. Structured candidates come
//! first, then `budget` random ones drawn from a seeded stream, so a larger
//! budget only ever adds candidates.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Character, FiniteAbelianGroup};
use crate::trigpoly::{lp_of_values, sup_norm, PolynomialRecord, TrigPolynomial};

/// How a window's characters are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Generator {
    Explicit { characters: Vec<Vec<i64>> },
    /// Labels `a..=b` placed on the first factor.
    Interval { a: i64, b: i64 },
    /// Labels `base^k` for `k < count` on the first factor.
    Lacunary { base: u64, count: u32 },
    /// `size` distinct characters drawn uniformly from the dual.
    Random { size: usize, seed: u64 },
}

/// A finite set of characters together with the recipe that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumWindow {
    pub group: String,
    pub generator: Generator,
    pub characters: Vec<Character>,
    /// Integer labels of the realized characters, for label-based
    /// generators and explicit windows on rank-one groups.
    pub labels: Option<Vec<i64>>,
    /// Labels beyond the bandwidth of a torus factor, or repeating an
    /// earlier character after reduction, left out of the window.
    pub dropped: Vec<i64>,
}

impl SpectrumWindow {
    pub fn new(group: &FiniteAbelianGroup, generator: Generator) -> Result<Self> {
        let mut characters: Vec<Character> = Vec::new();
        let mut labels = Vec::new();
        let mut dropped = Vec::new();
        let mut push_label = |label: i64, characters: &mut Vec<Character>| -> Result<()> {
            let mut e = vec![0i64; group.rank()];
            e[0] = label;
            let fac = &group.factors()[0];
            let chi = group.character(&e)?;
            let out_of_band = fac.torus.is_some_and(|d| label.unsigned_abs() > d);
            if out_of_band || characters.contains(&chi) {
                dropped.push(label);
            } else {
                characters.push(chi);
                labels.push(label);
            }
            Ok(())
        };
        match &generator {
            Generator::Explicit { characters: exps } => {
                for e in exps {
                    let chi = group.character(e)?;
                    TrigPolynomial::character(group, chi.clone())?;
                    if !characters.contains(&chi) {
                        characters.push(chi);
                    }
                }
                if group.rank() == 1 {
                    labels = characters.iter().map(|c| group.factors()[0].symmetric(c.0[0])).collect();
                }
            }
            Generator::Interval { a, b } => {
                for label in *a..=*b {
                    push_label(label, &mut characters)?;
                }
            }
            Generator::Lacunary { base, count } => {
                if *base < 2 {
                    return Err(Error::InvalidArgument(format!("lacunary base {base} must be at least 2")));
                }
                for k in 0..*count {
                    let label = base
                        .checked_pow(k)
                        .and_then(|v| i64::try_from(v).ok())
                        .ok_or_else(|| Error::InvalidArgument(format!("{base}^{k} overflows")))?;
                    push_label(label, &mut characters)?;
                }
            }
            Generator::Random { size, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut pool: Vec<Character> = Vec::new();
                let n = group.ensure_enumerable()?;
                for i in 0..n {
                    let chi = Character(group.element_at(i).0);
                    if TrigPolynomial::character(group, chi.clone()).is_ok() {
                        pool.push(chi);
                    }
                }
                if *size > pool.len() {
                    return Err(Error::InvalidArgument(format!(
                        "cannot draw {size} distinct characters from {}",
                        pool.len()
                    )));
                }
                characters = pool.choose_multiple(&mut rng, *size).cloned().collect();
            }
        }
        let labelled = !matches!(generator, Generator::Random { .. })
            && (group.rank() == 1 || !matches!(generator, Generator::Explicit { .. }));
        Ok(Self {
            group: group.to_string(),
            generator,
            characters,
            labels: labelled.then_some(labels),
            dropped,
        })
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    fn parsed(&self) -> Result<FiniteAbelianGroup> {
        if self.characters.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        self.group.parse()
    }
}

/// Best candidate found by a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub witness_id: String,
    pub witness: PolynomialRecord,
    pub candidates: usize,
}

struct Candidate {
    id: String,
    coeffs: Vec<Complex64>,
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn rudin_shapiro(j: usize) -> f64 {
    if (j & (j >> 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Structured candidates in window order: one character, Dirichlet kernels
/// on dyadic prefixes and on the whole window, a Fejér-type taper and
/// Rudin–Shapiro signs.
fn structured(n: usize) -> Vec<Candidate> {
    let mut out = vec![Candidate {
        id: "single".into(),
        coeffs: (0..n).map(|j| real(if j == 0 { 1.0 } else { 0.0 })).collect(),
    }];
    let mut len = 2;
    while len < n {
        out.push(Candidate {
            id: format!("dirichlet-{len}"),
            coeffs: (0..n).map(|j| real(if j < len { 1.0 } else { 0.0 })).collect(),
        });
        len *= 2;
    }
    if n > 1 {
        let c = (n - 1) as f64 / 2.0;
        out.push(Candidate {
            id: "dirichlet".into(),
            coeffs: vec![real(1.0); n],
        });
        out.push(Candidate {
            id: "fejer".into(),
            coeffs: (0..n).map(|j| real(1.0 - (j as f64 - c).abs() / (c + 1.0))).collect(),
        });
        out.push(Candidate {
            id: "rudin-shapiro".into(),
            coeffs: (0..n).map(|j| real(rudin_shapiro(j))).collect(),
        });
    }
    out
}

/// `budget` random candidates; the `i`-th depends only on `(seed, i)`.
fn random_candidates(n: usize, budget: usize, seed: u64, complex: bool) -> Vec<Candidate> {
    let mut stream = ChaCha8Rng::seed_from_u64(seed);
    (0..budget)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream.gen());
            let coeffs = if i % 2 == 1 {
                (0..n).map(|_| real(if rng.gen::<bool>() { 1.0 } else { -1.0 })).collect()
            } else if complex {
                (0..n)
                    .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            } else {
                (0..n).map(|_| real(rng.sample(StandardNormal))).collect()
            };
            Candidate {
                id: format!("random-{i}"),
                coeffs,
            }
        })
        .collect()
}

/// Evaluates every candidate and keeps the first one with the largest
/// (`maximize`) or smallest score; candidates scoring `None` are skipped.
fn search<F>(
    group: &FiniteAbelianGroup,
    characters: &[Character],
    candidates: Vec<Candidate>,
    maximize: bool,
    score: F,
) -> Result<Estimate>
where
    F: Fn(&TrigPolynomial, &[Complex64]) -> Result<Option<f64>> + Sync,
{
    let scored: Vec<(usize, f64, TrigPolynomial)> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let f = TrigPolynomial::new(group, characters.iter().cloned().zip(c.coeffs.iter().copied()))?;
            Ok(score(&f, &c.coeffs)?.map(|v| (i, v, f)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let total = candidates.len();
    let best = scored
        .into_iter()
        .reduce(|a, b| {
            let better = if maximize { b.1 > a.1 } else { b.1 < a.1 };
            if better {
                b
            } else {
                a
            }
        })
        .ok_or_else(|| Error::InvalidArgument("no admissible candidate".into()))?;
    Ok(Estimate {
        value: best.1,
        witness_id: candidates[best.0].id.clone(),
        witness: PolynomialRecord::from(&best.2),
        candidates: total,
    })
}

/// Lower bound for the best constant `C` in `‖f‖_p ≤ C ‖f‖_r` over
/// polynomials with spectrum in the window.
pub fn lambda_ratio(window: &SpectrumWindow, r: f64, p: f64, budget: usize, seed: u64) -> Result<Estimate> {
    if !(r > 0.0 && p > r && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < r < p < ∞, got r = {r}, p = {p}")));
    }
    let group = window.parsed()?;
    group.ensure_enumerable()?;
    let n = window.len();
    let mut candidates = structured(n);
    candidates.extend(random_candidates(n, budget, seed, true));
    search(&group, &window.characters, candidates, true, |f, _| {
        let values = f.evaluate_all()?;
        let denom = lp_of_values(&values, r);
        Ok((denom > 0.0).then(|| lp_of_values(&values, p) / denom))
    })
}

/// Lower bound for the Sidon constant `sup Σ|c_γ| / ‖f‖_∞` over real
/// coefficient vectors; the sup norm enters through its certified upper end.
pub fn sidon_lower(window: &SpectrumWindow, budget: usize, seed: u64) -> Result<Estimate> {
    let group = window.parsed()?;
    let n = window.len();
    let mut candidates = structured(n);
    candidates.extend(random_candidates(n, budget, seed, false));
    search(&group, &window.characters, candidates, true, |f, coeffs| {
        let hi = sup_norm(f)?.hi;
        let l1: f64 = coeffs.iter().map(|c| c.norm()).sum();
        Ok((hi > 0.0).then(|| l1 / hi))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ell1Norm {
    Sup,
    L1,
}

/// Result of [`ell1_lower_constant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ell1Estimate {
    /// `min ‖Σ a_s g_s‖ / Σ|a_s|` over the tested vectors; an upper bound
    /// for the true lower `ℓ¹` constant.
    pub value: f64,
    pub minimizer: Vec<f64>,
    pub candidates: usize,
}

/// Largest `c` with `c Σ|a_s| ≤ ‖Σ a_s g_s‖` over the tested real vectors:
/// the basis vectors, every sign pattern when `S ≤ 12`, then `budget`
/// Gaussian vectors.
pub fn ell1_lower_constant(gs: &[TrigPolynomial], norm: Ell1Norm, budget: usize, seed: u64) -> Result<Ell1Estimate> {
    let first = gs.first().ok_or_else(|| Error::InvalidArgument("no functions given".into()))?;
    let group = first.group();
    for g in gs {
        if g.group() != group {
            return Err(Error::GroupMismatch {
                left: group.to_string(),
                right: g.group().to_string(),
            });
        }
    }
    let s = gs.len();
    let tables = gs.iter().map(|g| g.evaluate_all()).collect::<Result<Vec<_>>>()?;
    let mut vectors: Vec<Vec<f64>> = (0..s)
        .map(|i| (0..s).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    if s <= 12 {
        // the first sign is fixed since ±a give the same ratio
        for mask in 0..(1u32 << (s - 1)) {
            vectors.push(
                (0..s)
                    .map(|j| if j > 0 && mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 })
                    .collect(),
            );
        }
    }
    let mut stream = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let mut rng = ChaCha8Rng::seed_from_u64(stream.gen());
        vectors.push((0..s).map(|_| rng.sample(StandardNormal)).collect());
    }
    // torus stand-ins: the grid maximum is a lower end, so scale it up
    let correction: f64 = group
        .factors()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_torus())
        .map(|(j, f)| {
            let d = gs.iter().map(|g| g.torus_degree(j)).max().unwrap_or(0);
            (std::f64::consts::PI * d as f64 / f.order as f64).cos()
        })
        .product();
    let ratios: Vec<f64> = vectors
        .par_iter()
        .map(|a| {
            let l1: f64 = a.iter().map(|v| v.abs()).sum();
            let combo = (0..tables[0].len()).map(|x| {
                a.iter()
                    .zip(&tables)
                    .map(|(c, t)| t[x] * *c)
                    .sum::<Complex64>()
            });
            let n = match norm {
                Ell1Norm::Sup => combo.map(|v| v.norm()).fold(0.0, f64::max) / correction,
                Ell1Norm::L1 => lp_of_values(&combo.collect::<Vec<_>>(), 1.0),
            };
            n / l1
        })
        .collect();
    let (i, value) = ratios
        .iter()
        .copied()
        .enumerate()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("at least one basis vector");
    Ok(Ell1Estimate {
        value,
        minimizer: vectors[i].clone(),
        candidates: vectors.len(),
    })
}

/// Smallest ratio `λ_{n+1}/λ_n` of consecutive sorted labels.
pub fn lacunarity(window: &SpectrumWindow) -> Result<f64> {
    let labels = window
        .labels
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("window has no integer labels".into()))?;
    if labels.len() < 2 {
        return Err(Error::InvalidArgument("lacunarity needs at least two labels".into()));
    }
    if labels.iter().any(|&l| l <= 0) {
        return Err(Error::InvalidArgument("lacunarity needs positive labels".into()));
    }
    let mut sorted = labels.clone();
    sorted.sort_unstable();
    Ok(sorted
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .fold(f64::INFINITY, f64::min))
}

/// Result of [`daugavet_defect`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaugavetEstimate {
    /// Certified lower bound for `‖Id + φ⊗x‖` on `C_Λ`.
    pub lower: f64,
    /// `‖φ‖ ‖x‖` with `‖φ‖` the total variation of the weights.
    pub operator_norm: f64,
    /// `1 + ‖T‖ - lower`.
    pub defect: f64,
    pub witness_id: String,
    pub witness: Option<PolynomialRecord>,
    pub candidates: usize,
}

/// How close `‖Id + T‖` comes to `1 + ‖T‖` for the rank-one `T f = φ(f) x`,
/// `φ(f) = Σ_y w_y f(y)` with weights in group enumeration order, searched
/// over unit test functions with spectrum in `lambda`.
pub fn daugavet_defect(
    x: &TrigPolynomial,
    weights: &[Complex64],
    lambda: &[Character],
    budget: usize,
    seed: u64,
) -> Result<DaugavetEstimate> {
    let group = x.group();
    let order = group.ensure_enumerable()?;
    if weights.len() != order {
        return Err(Error::TableSize {
            expected: order,
            found: weights.len(),
        });
    }
    let phi_norm: f64 = weights.iter().map(|w| w.norm()).sum();
    let xcert = sup_norm(x)?;
    let operator_norm = phi_norm * xcert.hi;
    if phi_norm == 0.0 || xcert.hi == 0.0 {
        return Ok(DaugavetEstimate {
            lower: 1.0,
            operator_norm: 0.0,
            defect: 0.0,
            witness_id: "zero-operator".into(),
            witness: None,
            candidates: 0,
        });
    }
    if lambda.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut candidates: Vec<(String, TrigPolynomial)> = vec![("x".into(), x.clone())];
    for (i, chi) in lambda.iter().enumerate() {
        candidates.push((format!("character-{i}"), TrigPolynomial::character(group, chi.clone())?));
    }
    let mut stream = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..budget {
        let mut rng = ChaCha8Rng::seed_from_u64(stream.gen());
        let terms = lambda
            .iter()
            .map(|c| (c.clone(), Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))));
        candidates.push((format!("random-{i}"), TrigPolynomial::new(group, terms)?));
    }
    let scored = candidates
        .par_iter()
        .map(|(_, f)| {
            let fcert = sup_norm(f)?;
            if fcert.hi == 0.0 {
                return Ok(None);
            }
            let fvals = f.evaluate_all()?;
            let phi_f: Complex64 = weights.iter().zip(&fvals).map(|(w, v)| w * v).sum();
            let h = f.add(&x.scale(phi_f))?;
            Ok(Some(sup_norm(&h)?.lo / fcert.hi))
        })
        .collect::<Result<Vec<Option<f64>>>>()?;
    let (i, lower) = scored
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .ok_or_else(|| Error::InvalidArgument("every test function vanishes".into()))?;
    Ok(DaugavetEstimate {
        lower,
        operator_norm,
        defect: (1.0 + operator_norm - lower).max(0.0),
        witness_id: candidates[i].0.clone(),
        witness: Some(PolynomialRecord::from(&candidates[i].1)),
        candidates: candidates.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Estimator {
    LambdaRatio { r: f64, p: f64 },
    Sidon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub window: usize,
    pub ratio: f64,
    pub witness_id: String,
    pub witness: PolynomialRecord,
}

/// One estimator run over nested windows of increasing size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCurve {
    pub estimator: Estimator,
    pub budget: usize,
    pub seed: u64,
    pub points: Vec<GrowthPoint>,
}

impl GrowthCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,ratio,witness_id\n");
        for p in &self.points {
            writeln!(out, "{},{},{}", p.window, p.ratio, p.witness_id).expect("writing to a string");
        }
        out
    }
}

pub fn growth_curve(windows: &[SpectrumWindow], estimator: Estimator, budget: usize, seed: u64) -> Result<GrowthCurve> {
    if windows.windows(2).any(|w| w[1].len() <= w[0].len()) {
        return Err(Error::InvalidArgument("window sizes must strictly increase".into()));
    }
    let points = windows
        .iter()
        .map(|w| {
            let e = match estimator {
                Estimator::LambdaRatio { r, p } => lambda_ratio(w, r, p, budget, seed)?,
                Estimator::Sidon => sidon_lower(w, budget, seed)?,
            };
            Ok(GrowthPoint {
                window: w.len(),
                ratio: e.value,
                witness_id: e.witness_id,
                witness: e.witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthCurve {
        estimator,
        budget,
        seed,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyclic(m: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(&[m]).unwrap()
    }

    fn interval(m: u64, a: i64, b: i64) -> SpectrumWindow {
        SpectrumWindow::new(&cyclic(m), Generator::Interval { a, b }).unwrap()
    }

    #[test]
    fn windows_realize_their_generators() {
        let w = SpectrumWindow::new(&cyclic(100), Generator::Lacunary { base: 3, count: 5 }).unwrap();
        assert_eq!(w.labels.as_deref(), Some(&[1, 3, 9, 27, 81][..]));
        // 27 and 81 exceed the bandwidth even though 81 ≡ 17 would fit
        let t: FiniteAbelianGroup = "T(N=64,d=20)".parse().unwrap();
        let w = SpectrumWindow::new(&t, Generator::Lacunary { base: 3, count: 5 }).unwrap();
        assert_eq!(w.labels.as_deref(), Some(&[1, 3, 9][..]));
        assert_eq!(w.dropped, vec![27, 81]);
        let w = interval(8, 0, 9);
        assert_eq!(w.len(), 8);
        assert_eq!(w.dropped, vec![8, 9]);
        let g: FiniteAbelianGroup = "Z4 x Z5".parse().unwrap();
        let w = SpectrumWindow::new(&g, Generator::Random { size: 7, seed: 3 }).unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(w, SpectrumWindow::new(&g, Generator::Random { size: 7, seed: 3 }).unwrap());
        assert!(SpectrumWindow::new(&g, Generator::Random { size: 21, seed: 3 }).is_err());
    }

    #[test]
    fn lacunarity_examples() {
        let g = cyclic(1 << 20);
        let w = SpectrumWindow::new(&g, Generator::Lacunary { base: 3, count: 10 }).unwrap();
        assert!((lacunarity(&w).unwrap() - 3.0).abs() < 1e-15);
        assert!((lacunarity(&interval(1 << 10, 1, 40)).unwrap() - 40.0 / 39.0).abs() < 1e-15);
        let w = SpectrumWindow::new(
            &g,
            Generator::Explicit {
                characters: vec![vec![2], vec![5], vec![11], vec![23]],
            },
        )
        .unwrap();
        assert!((lacunarity(&w).unwrap() - 23.0 / 11.0).abs() < 1e-15);
        assert!(lacunarity(&interval(64, 1, 1)).is_err());
    }

    #[test]
    fn single_character_ratios_are_one() {
        let w = interval(64, 5, 5);
        let e = lambda_ratio(&w, 0.5, 3.0, 4, 0).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!((sidon_lower(&w, 4, 0).unwrap().value - 1.0).abs() < 1e-12);
        assert_eq!(lambda_ratio(&interval(64, 1, 0), 1.0, 2.0, 1, 0).unwrap_err(), Error::EmptySpectrum);
    }

    #[test]
    fn rademacher_sidon_constant_is_one() {
        let g: FiniteAbelianGroup = "Z2^10".parse().unwrap();
        let chars: Vec<Vec<i64>> = (0..10)
            .map(|j| (0..10).map(|i| i64::from(i == j)).collect())
            .collect();
        let w = SpectrumWindow::new(&g, Generator::Explicit { characters: chars }).unwrap();
        let e = sidon_lower(&w, 40, 5).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let gs: Vec<_> = w
            .characters
            .iter()
            .map(|c| TrigPolynomial::character(&g, c.clone()).unwrap())
            .collect();
        let c = ell1_lower_constant(&gs, Ell1Norm::Sup, 50, 1).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn powers_of_one_character_are_far_from_l1() {
        let g = cyclic(8);
        let gs: Vec<_> = (1..=4)
            .map(|s| TrigPolynomial::character(&g, g.character(&[s]).unwrap()).unwrap())
            .collect();
        let signs = ell1_lower_constant(&gs, Ell1Norm::Sup, 0, 0).unwrap();
        // best sign pattern (+,+,-,+): max over Z8 of |Σ ±ω^{sx}| is 2.6131
        assert!((signs.value - 0.653_281_482_438_188_3).abs() < 1e-12, "{}", signs.value);
        let searched = ell1_lower_constant(&gs, Ell1Norm::Sup, 4000, 2).unwrap();
        assert!(searched.value < signs.value && searched.value > 0.55);
        assert_eq!(ell1_lower_constant(&gs[..1], Ell1Norm::Sup, 10, 0).unwrap().value, 1.0);
    }

    #[test]
    fn sidon_growth_on_intervals() {
        let r8 = sidon_lower(&interval(512, 1, 8), 64, 9).unwrap().value;
        let r64 = sidon_lower(&interval(512, 1, 64), 64, 9).unwrap().value;
        assert!(r64 / r8 >= 2.0, "{r8} {r64}");
    }

    #[test]
    fn dirichlet_ratio_curve_increases() {
        let windows: Vec<_> = [16, 64, 256].iter().map(|&n| interval(4096, 0, n)).collect();
        let curve = growth_curve(&windows, Estimator::LambdaRatio { r: 0.5, p: 1.0 }, 8, 3).unwrap();
        let ratios: Vec<f64> = curve.points.iter().map(|p| p.ratio).collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
        assert!(curve.to_csv().starts_with("N,ratio,witness_id\n17,"));
        assert!(growth_curve(&[windows[1].clone(), windows[0].clone()], Estimator::Sidon, 1, 0).is_err());
    }

    #[test]
    fn daugavet_examples() {
        let g = cyclic(16);
        let one = TrigPolynomial::constant(&g, real(1.0));
        let mut delta = vec![real(0.0); 16];
        delta[0] = real(1.0);
        let e = daugavet_defect(&one, &delta, &[g.trivial_character()], 4, 0).unwrap();
        assert!((e.lower - 2.0).abs() < 1e-12 && e.defect.abs() < 1e-12);
        let zero = daugavet_defect(&one, &vec![real(0.0); 16], &[g.trivial_character()], 4, 0).unwrap();
        assert_eq!((zero.lower, zero.defect), (1.0, 0.0));
        assert!(daugavet_defect(&one, &delta[..3], &[g.trivial_character()], 1, 0).is_err());
    }

    #[test]
    fn daugavet_defect_persists_on_lacunary_spectrum() {
        // x = χ_1 and φ = mean against χ̄_3 − χ̄_9: the test functions cannot
        // use both φ and x at full strength at the same point
        let g = cyclic(64);
        let lambda: Vec<_> = [1i64, 3, 9, 27].iter().map(|&a| g.character(&[a]).unwrap()).collect();
        let x = TrigPolynomial::character(&g, lambda[0].clone()).unwrap();
        let weights: Vec<Complex64> = (0..64)
            .map(|y| {
                let e = |a: i64| crate::group::unit_from_turns(-(a * y) as f64 / 64.0);
                (e(3) - e(9)) / 64.0
            })
            .collect();
        let small = daugavet_defect(&x, &weights, &lambda, 16, 4).unwrap();
        let large = daugavet_defect(&x, &weights, &lambda, 256, 4).unwrap();
        assert!(large.lower >= small.lower);
        assert!(large.defect > 0.1, "{large:?}");
    }

    #[test]
    fn estimates_are_deterministic() {
        let w = interval(256, 1, 20);
        assert_eq!(sidon_lower(&w, 30, 17).unwrap(), sidon_lower(&w, 30, 17).unwrap());
        assert_eq!(lambda_ratio(&w, 1.0, 2.0, 30, 17).unwrap(), lambda_ratio(&w, 1.0, 2.0, 30, 17).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ratio_estimators_are_monotone_in_budget(seed in any::<u64>(), b in 1usize..12, extra in 1usize..12, n in 2i64..24) {
            let w = interval(128, 1, n);
            let lo = lambda_ratio(&w, 0.5, 2.0, b, seed).unwrap().value;
            let hi = lambda_ratio(&w, 0.5, 2.0, b + extra, seed).unwrap().value;
            prop_assert!(hi >= lo && lo >= 1.0 - 1e-12);
            let lo = sidon_lower(&w, b, seed).unwrap().value;
            let hi = sidon_lower(&w, b + extra, seed).unwrap().value;
            prop_assert!(hi >= lo && lo >= 1.0 - 1e-12);
            let gs: Vec<_> = w.characters.iter().take(5).map(|c| TrigPolynomial::character(&cyclic(128), c.clone()).unwrap()).collect();
            let a = ell1_lower_constant(&gs, Ell1Norm::L1, b, seed).unwrap().value;
            let c = ell1_lower_constant(&gs, Ell1Norm::L1, b + extra, seed).unwrap().value;
            prop_assert!(c <= a);
        }
    }
}
