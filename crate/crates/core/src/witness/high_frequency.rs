use std::f64::consts::{PI, TAU};

use super::{degenerate, Method, Parameters, Prepared, TorusAlignment, WitnessCertificate};
use crate::error::{Error, Result};
use crate::group::{Character, GroupElement, TAU_EXACT};
use crate::trigpoly::TrigPolynomial;

/// Wraps an angle into `(-π, π]`.
fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Witness `g = χ_s` of high frequency on a torus factor.
///
/// Each `f_k` has degree `d_k` on that factor, so by Bernstein's inequality
/// it moves by at most `d_k δ` when the angle moves by `δ`. With
/// `δ = ε / max d_k` and `|s| ≥ π/δ` the values `e^{isφ}` over
/// `|φ - ϑ| ≤ δ` sweep the whole circle, so `g` can be aligned with `f_k`
/// near its maximizer. The bound is read at the grid point of that window
/// maximizing `|f_k + g|`.
pub fn witness_high_frequency(
    family: &[TrigPolynomial],
    lambda: &[Character],
    eps: f64,
) -> Result<WitnessCertificate> {
    let prep = Prepared::new(family, lambda, eps)?;
    let group = prep.group.clone();
    let torus: Vec<usize> = (0..group.rank())
        .filter(|&j| group.factors()[j].is_torus())
        .collect();
    if torus.is_empty() {
        return Err(Error::InvalidArgument("high-frequency witness needs a torus factor".into()));
    }
    let mut first_failure = None;
    for &j in &torus {
        let degrees: Vec<u64> = prep.family.iter().map(|f| f.torus_degree(j)).collect();
        let dmax = degrees.iter().copied().max().unwrap_or(0);
        let delta = if dmax == 0 { PI } else { (eps / dmax as f64).min(PI) };
        let required = PI / delta;
        let mut best: Option<(i64, &Character)> = None;
        let mut largest: Option<i64> = None;
        for chi in &prep.lambda {
            let s = group.torus_frequency(chi, j);
            if s == 0 {
                continue;
            }
            if largest.is_none_or(|b| s.abs() > b.abs()) {
                largest = Some(s);
            }
            if (s.abs() as f64) >= required - TAU_EXACT && best.is_none_or(|(b, _)| s.abs() < b.abs()) {
                best = Some((s, chi));
            }
        }
        match best {
            Some((s, chi)) => return build(&prep, eps, j, s, chi, delta, required, degrees),
            None => {
                first_failure.get_or_insert(Error::InsufficientHeadroom {
                    required,
                    guard: group.factors()[j].torus.unwrap_or(0),
                    best: largest,
                });
            }
        }
    }
    if eps >= 2.0 {
        return degenerate(&prep, Method::HighFrequency, eps);
    }
    Err(first_failure.expect("at least one torus factor was examined"))
}

#[allow(clippy::too_many_arguments)]
fn build(
    prep: &Prepared,
    eps: f64,
    j: usize,
    s: i64,
    chi: &Character,
    delta: f64,
    required: f64,
    degrees: Vec<u64>,
) -> Result<WitnessCertificate> {
    let group = &prep.group;
    let n = group.factors()[j].order;
    let g = TrigPolynomial::character(group, chi.clone())?;
    let step = TAU / n as f64;
    let reach = (delta / step + TAU_EXACT).floor() as i64;
    let mut points = Vec::new();
    let mut alignments = Vec::new();
    for (k, f) in prep.family.iter().enumerate() {
        let x = &prep.maxima[k];
        let theta = x.0[j] as f64 * step;
        let mut a = x.clone();
        a.0[j] = 0;
        let ga = g.evaluate(&a)?;
        let w = prep.direction(k);
        let psi = (w / ga).arg();
        let phi = theta + wrap(psi - s as f64 * theta) / s as f64;
        let mut best: Option<(f64, GroupElement)> = None;
        for t in -reach..=reach {
            let mut p = x.clone();
            p.0[j] = (x.0[j] as i64 + t).rem_euclid(n as i64) as u64;
            let v = (f.evaluate(&p)? + g.evaluate(&p)?).norm();
            if best.as_ref().is_none_or(|(b, _)| v > *b + TAU_EXACT) {
                best = Some((v, p));
            }
        }
        let (_, p) = best.expect("window contains the maximizer itself");
        let defect = (g.evaluate(&p)? - w).norm();
        alignments.push(TorusAlignment {
            maximizer: x.clone(),
            theta,
            phi,
            grid_point: p.0[j],
            defect,
        });
        points.push(p);
    }
    prep.certificate(
        Method::HighFrequency,
        eps,
        &g,
        &points,
        Parameters::HighFrequency {
            factor: j,
            s,
            delta,
            degrees,
            required_s: required,
            alignments,
        },
    )
}
