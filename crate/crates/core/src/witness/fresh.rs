use num_integer::Integer;

use super::{degenerate, CoordinateAlignment, Method, Parameters, Prepared, WitnessCertificate};
use crate::error::{Error, Result};
use crate::group::{unit_from_turns, Character, TAU_EXACT};
use crate::trigpoly::TrigPolynomial;

/// Witness `g ∈ Λ` that is nontrivial on a coordinate `l` where no `f_k`
/// depends. Changing coordinate `l` of the maximizer rotates `g` through
/// the `o`-th roots of unity, `o = m_l / gcd(s, m_l)`, without moving `f_k`;
/// the alignment `u^s = f_k(x) / g(x with x_l = 0)` is exact when the
/// required value is such a root.
pub fn witness_fresh_coordinate(
    family: &[TrigPolynomial],
    lambda: &[Character],
    eps: f64,
) -> Result<WitnessCertificate> {
    let prep = Prepared::new(family, lambda, eps)?;
    let group = &prep.group;
    let touched = prep.touched();
    let mut best: Option<(u64, usize, &Character)> = None;
    for l in (0..group.rank()).filter(|j| !touched.contains(j)) {
        let m = group.factors()[l].order;
        for chi in &prep.lambda {
            let s = chi.0[l];
            if s == 0 {
                continue;
            }
            let o = m / s.gcd(&m);
            if best.is_none_or(|(b, _, _)| o > b) {
                best = Some((o, l, chi));
            }
        }
    }
    let Some((order, l, chi)) = best else {
        if eps >= 2.0 {
            return degenerate(&prep, Method::FreshCoordinate, eps);
        }
        return Err(Error::NoFreshCoordinate);
    };
    let m = group.factors()[l].order;
    let s = chi.0[l];
    let g = TrigPolynomial::character(group, chi.clone())?;
    let mut points = Vec::new();
    let mut alignments = Vec::new();
    for (k, f) in prep.family.iter().enumerate() {
        let x = &prep.maxima[k];
        let mut base = x.clone();
        base.0[l] = 0;
        let gb = g.evaluate(&base)?;
        let fx = f.evaluate(x)?;
        let w = prep.direction(k);
        // g(base with x_l = u) = gb · e^{2πi s u / m}
        let (u, _) = (0..m)
            .map(|u| {
                let turns = ((s as u128 * u as u128) % m as u128) as f64 / m as f64;
                (u, (fx + gb * unit_from_turns(turns)).norm())
            })
            .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 + TAU_EXACT { c } else { acc });
        let mut p = x.clone();
        p.0[l] = u;
        let defect = (g.evaluate(&p)? - w).norm();
        alignments.push(CoordinateAlignment {
            maximizer: x.clone(),
            u,
            defect,
        });
        points.push(p);
    }
    let params = Parameters::FreshCoordinate {
        factor: l,
        s,
        image_order: order,
        g: chi.clone(),
        alignments: alignments.clone(),
    };
    prep.certificate(Method::FreshCoordinate, eps, &g, &points, params)
        .map_err(|e| match e {
            Error::TargetMissed { index, .. } => Error::AlignmentUnsolvable {
                index,
                defect: alignments[index].defect,
            },
            e => e,
        })
}
