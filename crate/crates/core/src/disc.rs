//! Elementary geometry of the closed unit disc: clustering of near-extremal
//! sums, rotating sector-avoiding sets apart, and nets for the circle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Character, FiniteAbelianGroup, TAU_EXACT};

/// Closed sector `{ r e^{iα} : r ∈ [0,1], α ∈ [start, start + width] }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub start: f64,
    pub width: f64,
}

impl Sector {
    pub fn new(start: f64, width: f64) -> Self {
        Self { start, width }
    }

    /// Membership with slack `τ` on the angular boundary. The origin lies in
    /// every sector.
    pub fn contains(&self, z: Complex64) -> bool {
        if z.norm() > 1.0 + TAU_EXACT {
            return false;
        }
        if z.norm() <= TAU_EXACT || self.width >= TAU - TAU_EXACT {
            return true;
        }
        let off = (z.arg() - self.start).rem_euclid(TAU);
        off <= self.width + TAU_EXACT || off >= TAU - TAU_EXACT
    }

    pub fn avoided_by(&self, points: &[Complex64]) -> bool {
        points.iter().all(|&z| !self.contains(z))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterVerdict {
    pub precondition: bool,
    /// `1 - |Σ z_k| / n`, the smallest ε for which the hypothesis holds.
    pub tight_eps: f64,
    pub max_modulus_defect: f64,
    pub modulus_bound: f64,
    pub max_spread: f64,
    pub spread_bound: f64,
    /// Both conclusions hold (vacuously true when the precondition fails).
    pub holds: bool,
}

/// Checks `|z_k| ≥ 1 - nε` and `|z_k - z_l| ≤ 2n√ε` for points whose sum
/// has modulus at least `n(1 - ε)`.
pub fn cluster_bounds(z: &[Complex64], eps: f64) -> Result<ClusterVerdict> {
    if z.is_empty() {
        return Err(Error::InvalidArgument("cluster_bounds needs at least one point".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must be positive")));
    }
    let n = z.len() as f64;
    let sum: Complex64 = z.iter().sum();
    let precondition = sum.norm() >= n * (1.0 - eps) - TAU_EXACT;
    let max_modulus_defect = z.iter().map(|w| 1.0 - w.norm()).fold(f64::NEG_INFINITY, f64::max);
    let mut max_spread: f64 = 0.0;
    for (i, a) in z.iter().enumerate() {
        for b in &z[i + 1..] {
            max_spread = max_spread.max((a - b).norm());
        }
    }
    let modulus_bound = n * eps;
    let spread_bound = 2.0 * n * eps.sqrt();
    let holds = !precondition
        || (max_modulus_defect <= modulus_bound + TAU_EXACT && max_spread <= spread_bound + TAU_EXACT);
    Ok(ClusterVerdict {
        precondition,
        tight_eps: 1.0 - sum.norm() / n,
        max_modulus_defect,
        modulus_bound,
        max_spread,
        spread_bound,
        holds,
    })
}

/// Rotations `t_k = e^{i Σ_{l<k} ϑ_l} e^{-iφ_k}` carrying sector `k` onto
/// the `k`-th consecutive arc, so sets avoiding their sectors get an empty
/// common intersection.
pub fn sector_rotations(sectors: &[Sector]) -> Result<Vec<Complex64>> {
    let n = sectors.len();
    if n == 0 {
        return Err(Error::InvalidArgument("no sectors given".into()));
    }
    let min = TAU / n as f64;
    let mut offset = 0.0;
    let mut out = Vec::with_capacity(n);
    for (index, s) in sectors.iter().enumerate() {
        if s.width < min - TAU_EXACT || s.width > TAU + TAU_EXACT {
            return Err(Error::SectorTooNarrow {
                index,
                width: s.width,
                min,
            });
        }
        out.push(Complex64::from_polar(1.0, offset - s.start));
        offset += s.width;
    }
    Ok(out)
}

/// Index `k` whose rotated sector `[Σ_{l<k} ϑ_l, Σ_{l≤k} ϑ_l]` contains `α`.
pub fn covering_sector(sectors: &[Sector], alpha: f64) -> Option<usize> {
    let a = alpha.rem_euclid(TAU);
    let mut lo = 0.0;
    for (k, s) in sectors.iter().enumerate() {
        let hi = lo + s.width;
        if a >= lo - TAU_EXACT && a <= hi + TAU_EXACT {
            return Some(k);
        }
        lo = hi;
    }
    None
}

/// Points lying in every `t_k W_k` (within `τ`). Empty for sector-avoiding
/// sets rotated by [`sector_rotations`].
pub fn common_points(rotations: &[Complex64], sets: &[Vec<Complex64>]) -> Vec<Complex64> {
    let Some((first, rest)) = sets.split_first() else {
        return Vec::new();
    };
    first
        .iter()
        .map(|w| rotations[0] * w)
        .filter(|z| {
            rest.iter()
                .zip(&rotations[1..])
                .all(|(set, t)| set.iter().any(|w| (t * w - z).norm() <= TAU_EXACT))
        })
        .collect()
}

/// Whether the `radius`-neighbourhood of `points` meets every closed sector
/// of angular width `width`. Each point sweeps out an exact arc of admissible
/// start angles; the check is that these arcs cover the circle.
pub fn meets_every_sector(points: &[Complex64], radius: f64, width: f64) -> bool {
    let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for w in points {
        let r = w.norm();
        if r <= radius + TAU_EXACT {
            return true;
        }
        let eta = (radius / r).min(1.0).asin();
        let len = width + 2.0 * eta;
        if len >= TAU - TAU_EXACT {
            return true;
        }
        let start = (w.arg() - width - eta).rem_euclid(TAU);
        arcs.push((start, len));
    }
    if arcs.is_empty() {
        return false;
    }
    arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // sweep twice round so arcs wrapping past 2π are handled
    let mut reach = arcs[0].0 + arcs[0].1;
    let origin = arcs[0].0;
    for &(s, l) in arcs.iter().skip(1).chain(arcs.iter().map(|(s, l)| (s + TAU, *l)).collect::<Vec<_>>().iter()) {
        if reach >= origin + TAU - TAU_EXACT {
            return true;
        }
        if s > reach + TAU_EXACT {
            return false;
        }
        reach = reach.max(s + l);
    }
    reach >= origin + TAU - TAU_EXACT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetVerdict {
    pub hypothesis: bool,
    /// `2ε + δ + ϑ`.
    pub bound: f64,
    /// Largest grid distance from the circle to the set.
    pub measured_radius: f64,
    /// Certified upper bound on the true covering radius.
    pub radius_upper: f64,
    /// Largest chord between angularly adjacent points.
    pub max_gap_chord: f64,
    /// `radius_upper ≤ bound`, required whenever the hypothesis holds.
    pub holds: bool,
}

const NET_GRID: usize = 1 << 14;
/// Largest set measured by the cubic exact method rather than the grid.
const EXACT_LIMIT: usize = 64;

/// Verifies that a set in the annulus `1 - δ ≤ |z| ≤ 1` whose
/// `ε`-neighbourhood meets every sector of width `ϑ` is a
/// `(2ε + δ + ϑ)`-net for the circle.
pub fn net_check(points: &[Complex64], delta: f64, eps: f64, theta: f64) -> Result<NetVerdict> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("net_check needs a nonempty set".into()));
    }
    for (index, z) in points.iter().enumerate() {
        let r = z.norm();
        if r > 1.0 + TAU_EXACT || r < 1.0 - delta - TAU_EXACT {
            return Err(Error::AnnulusViolation {
                index,
                modulus: r,
                inner: 1.0 - delta,
            });
        }
    }
    let hypothesis = meets_every_sector(points, eps, theta);
    let (measured, radius_upper) = if points.len() <= EXACT_LIMIT {
        let r = covering_radius_exact(points);
        (r, r + 1e-12)
    } else {
        let r = covering_radius(points, NET_GRID);
        // distance to a fixed set is 1-Lipschitz along the circle
        (r, r + PI / NET_GRID as f64)
    };
    let bound = 2.0 * eps + delta + theta;
    Ok(NetVerdict {
        hypothesis,
        bound,
        measured_radius: measured,
        radius_upper,
        max_gap_chord: max_gap_chord(points),
        holds: !hypothesis || radius_upper <= bound + TAU_EXACT,
    })
}

/// `max_{|u|=1} min_w |u - w|`, exactly. Along an arc where one point is
/// nearest, the distance to it peaks at the arc's ends or at that point's
/// antipode, and the arc ends lie on perpendicular bisectors of pairs.
pub fn covering_radius_exact(points: &[Complex64]) -> f64 {
    let mut angles: Vec<f64> = points.iter().map(|w| w.arg() + PI).collect();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            // |u - a| = |u - b|  ⟺  Re(u · conj(b - a)) = (|b|² - |a|²)/2
            let d = b - a;
            let rho = d.norm();
            if rho <= f64::EPSILON {
                continue;
            }
            let k = (b.norm_sqr() - a.norm_sqr()) / (2.0 * rho);
            if k.abs() <= 1.0 {
                let spread = k.acos();
                angles.push(d.arg() + spread);
                angles.push(d.arg() - spread);
            }
        }
    }
    angles
        .iter()
        .map(|&t| {
            let u = Complex64::from_polar(1.0, t);
            points.iter().map(|w| (u - w).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `max_j min_w |e^{2πij/K} - w|` over `K` equally spaced circle points.
pub fn covering_radius(points: &[Complex64], grid: usize) -> f64 {
    (0..grid)
        .map(|j| {
            let u = Complex64::from_polar(1.0, TAU * j as f64 / grid as f64);
            points.iter().map(|w| (u - w).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Largest chord between consecutive points in angular order.
pub fn max_gap_chord(points: &[Complex64]) -> f64 {
    let mut sorted: Vec<Complex64> = points.to_vec();
    sorted.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    sorted.dedup_by(|a, b| (*a - *b).norm() <= TAU_EXACT);
    if sorted.len() < 2 {
        return 2.0;
    }
    let n = sorted.len();
    (0..n)
        .map(|i| (sorted[(i + 1) % n] - sorted[i]).norm())
        .fold(0.0, f64::max)
}

/// Chord spacing `2 sin(π/m)` of the `m`-th roots of unity (2 for `m = 1`).
pub fn roots_chord(m: u64) -> f64 {
    if m <= 1 {
        2.0
    } else {
        2.0 * (PI / m as f64).sin()
    }
}

/// Whether the image of `chi` (the `o(χ)`-th roots of unity) is an `ε`-net
/// in the chord sense `2 sin(π/m) ≤ ε`.
pub fn image_is_net(group: &FiniteAbelianGroup, chi: &Character, eps: f64) -> bool {
    roots_chord(group.character_order(chi)) <= eps + TAU_EXACT
}
