//! Seeded random suites exercising the three disc lemmas: clustering of
//! near-extremal sums, sector rotations, and nets for the circle.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disc::{cluster_bounds, common_points, net_check, sector_rotations, Sector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    /// Trials whose instance satisfied the lemma's hypothesis.
    pub hypothesis_met: usize,
    pub violations: usize,
    /// Seed of the first violating trial, for replay.
    pub first_violation: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl LemmaReport {
    pub fn violations(&self) -> usize {
        self.suites.iter().map(|s| s.violations).sum()
    }
}

/// Outcome of one trial: (hypothesis met, conclusion holds).
type Trial = fn(&mut ChaCha8Rng) -> Result<(bool, bool)>;

fn disc_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..TAU))
}

/// Points clustered around a random direction, with `ε` just above the
/// tight value so the hypothesis usually holds.
fn cluster_trial(rng: &mut ChaCha8Rng) -> Result<(bool, bool)> {
    let n = rng.gen_range(1..8);
    let centre = rng.gen_range(0.0..TAU);
    let spread = rng.gen_range(0.0..0.6);
    let z: Vec<_> = (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.85f64..=1.0), centre + rng.gen_range(-spread..=spread)))
        .collect();
    let sum: Complex64 = z.iter().sum();
    let eps = (1.0 - sum.norm() / n as f64).max(1e-9) * rng.gen_range(0.8..1.5);
    let v = cluster_bounds(&z, eps)?;
    Ok((v.precondition, v.holds))
}

/// Sets avoiding their sectors, with a common point planted wherever the
/// rotated sets allow it; the rotated sets must still share nothing.
fn sector_trial(rng: &mut ChaCha8Rng) -> Result<(bool, bool)> {
    let n = rng.gen_range(1..7);
    let min = TAU / n as f64;
    let sectors: Vec<Sector> = (0..n)
        .map(|_| Sector::new(rng.gen_range(0.0..TAU), rng.gen_range(min..=TAU.max(min))))
        .collect();
    let t = sector_rotations(&sectors)?;
    let planted = disc_point(rng);
    let sets: Vec<Vec<Complex64>> = sectors
        .iter()
        .zip(&t)
        .map(|(s, tk)| {
            let mut pts = Vec::new();
            let pre = planted / tk;
            if !s.contains(pre) {
                pts.push(pre);
            }
            for _ in 0..200 {
                if pts.len() >= 20 {
                    break;
                }
                let z = disc_point(rng);
                if !s.contains(z) {
                    pts.push(z);
                }
            }
            pts
        })
        .collect();
    let avoid = sectors.iter().zip(&sets).all(|(s, w)| s.avoided_by(w));
    Ok((avoid, common_points(&t, &sets).is_empty()))
}

/// Random clouds in an annulus; the net bound must hold whenever the
/// sector hypothesis does.
fn net_trial(rng: &mut ChaCha8Rng) -> Result<(bool, bool)> {
    let delta = rng.gen_range(0.0..0.2);
    let pts: Vec<_> = (0..rng.gen_range(4..24))
        .map(|_| Complex64::from_polar(rng.gen_range(1.0 - delta..=1.0), rng.gen_range(0.0..TAU)))
        .collect();
    let eps = rng.gen_range(0.0..0.25);
    let theta = rng.gen_range(0.05..1.2);
    let v = net_check(&pts, delta, eps, theta)?;
    Ok((v.hypothesis, v.holds))
}

fn run_suite(name: &str, trial: Trial, trials: usize, seed: u64) -> Result<SuiteResult> {
    let mut stream = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..trials).map(|_| stream.gen()).collect();
    let outcomes = seeds
        .par_iter()
        .map(|&s| trial(&mut ChaCha8Rng::seed_from_u64(s)).map(|o| (s, o)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteResult {
        name: name.to_string(),
        trials,
        hypothesis_met: outcomes.iter().filter(|(_, (h, _))| *h).count(),
        violations: outcomes.iter().filter(|(_, (_, ok))| !ok).count(),
        first_violation: outcomes.iter().find(|(_, (_, ok))| !ok).map(|(s, _)| *s),
    })
}

/// Runs `trials` instances of each suite. Each suite draws its trial seeds
/// from its own stream derived from `seed`.
pub fn run_lemma_suites(trials: usize, seed: u64) -> Result<LemmaReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let suites: [(&str, Trial); 3] = [
        ("cluster", cluster_trial),
        ("sectors", sector_trial),
        ("net", net_trial),
    ];
    let suites = suites
        .iter()
        .enumerate()
        .map(|(i, (name, t))| run_suite(name, *t, trials, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport { seed, suites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_find_no_violations_and_exercise_hypotheses() {
        let r = run_lemma_suites(400, 1).unwrap();
        assert_eq!(r.violations(), 0, "{r:?}");
        for s in &r.suites {
            assert!(s.hypothesis_met > 40, "{s:?}");
        }
        assert_eq!(r, run_lemma_suites(400, 1).unwrap());
    }
}
