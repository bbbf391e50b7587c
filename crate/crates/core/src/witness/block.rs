use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{degenerate, BlockCandidate, Method, MixedAlignment, Parameters, Prepared, WitnessCertificate};
use crate::disc::{covering_radius, meets_every_sector};
use crate::error::{Error, Result};
use crate::group::{unit_from_turns, Character, GroupElement, Subgroup, TAU_EXACT};
use crate::trigpoly::{sup_norm, TrigPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BlockOptions {
    /// Characters per block; `None` puts every independent tail in one block.
    pub block_width: Option<usize>,
}

const PHASE_GRID: usize = 1024;

/// Witness built from a block of independent characters living off the
/// coordinates the family depends on.
///
/// All characters of the chosen bucket `Λ₀` share their head (the
/// coordinates touched by `Δ`); `γ` is the conjugate of that head, so the
/// characters `γλ` depend on tail coordinates only. A block
/// `g_s = Σ_j c_j γλ_j` over independent `γλ_j` takes every value
/// `Σ_j c_j ζ_j` with `ζ_j` ranging over the roots of unity of the right
/// orders. The coefficients `c_j = e^{2πij/(mB)}` spread the block's
/// extreme values around the circle, so after normalizing by the exact
/// sup norm they form a net. For each `k` the bound is read at the point
/// taking its head from the maximizer `x^(k)` of `|f_k|` and its tail from
/// a `y^(k)` that aligns `g_s(y^(k))` with `γ(x^(k)) f_k(x^(k))`.
pub fn witness_block_basis(
    family: &[TrigPolynomial],
    lambda: &[Character],
    eps: f64,
    options: BlockOptions,
) -> Result<WitnessCertificate> {
    let prep = Prepared::new(family, lambda, eps)?;
    match build(&prep, eps, options) {
        Err(_) if eps >= 2.0 => degenerate(&prep, Method::BlockBasis, eps),
        r => r,
    }
}

/// Smallest block width `B` whose extreme values, spaced `2π/(mB)`, align
/// any unit value within angle `θ` satisfying `2 cos(θ/2) ≥ 2 - ε`.
pub fn required_block_width(m: u64, eps: f64) -> usize {
    if eps >= 2.0 {
        return 1;
    }
    let theta = 2.0 * (1.0 - eps / 2.0).acos();
    ((PI / (m as f64 * theta)) - TAU_EXACT).ceil().max(1.0) as usize
}

fn build(prep: &Prepared, eps: f64, options: BlockOptions) -> Result<WitnessCertificate> {
    let group = &prep.group;
    let head = prep.touched();
    let tail: Vec<usize> = (0..group.rank()).filter(|j| !head.contains(j)).collect();
    let project = |chi: &Character, coords: &[usize]| -> Character {
        let mut out = vec![0; group.rank()];
        for &j in coords {
            out[j] = chi.0[j];
        }
        Character(out)
    };

    // bucket Λ by head projection, keep the bucket with most independent tails
    let mut buckets: Vec<(Character, Vec<Character>)> = Vec::new();
    for chi in &prep.lambda {
        let h = project(chi, &head);
        match buckets.iter_mut().find(|(k, _)| *k == h) {
            Some((_, v)) => v.push(chi.clone()),
            None => buckets.push((h, vec![chi.clone()])),
        }
    }
    let mut chosen: Option<(Character, Vec<Character>)> = None;
    for (h, members) in &buckets {
        let mut span = Subgroup::trivial(group);
        let mut picked = Vec::new();
        for chi in members {
            let t = project(chi, &tail);
            let o = group.character_order(&t);
            if o == 1 {
                continue;
            }
            let joined = span.join(std::slice::from_ref(&t.0));
            if joined.order() == span.order() * o {
                span = joined;
                picked.push(chi.clone());
            }
        }
        if chosen.as_ref().is_none_or(|(_, p)| picked.len() > p.len()) {
            chosen = Some((h.clone(), picked));
        }
    }
    let (h, lambda0) = chosen.unwrap_or_else(|| (group.trivial_character(), Vec::new()));
    let m = lambda0
        .iter()
        .map(|chi| group.character_order(&project(chi, &tail)))
        .min()
        .unwrap_or(2);
    let required = required_block_width(m, eps);
    if lambda0.len() < required {
        return Err(Error::InsufficientTail {
            required,
            found: lambda0.len(),
        });
    }
    let width = options.block_width.unwrap_or(lambda0.len()).max(required).min(lambda0.len());
    let gamma = group.conjugate(&h);

    // the proof's budget: 2π/n₀ ≤ ε/3 and 4n₀√δ ≤ ε/3
    let n0 = (6.0 * PI / eps - TAU_EXACT).ceil().max(1.0) as u64;
    let sqrt_delta = eps / (12.0 * n0 as f64);
    let delta = sqrt_delta * sqrt_delta;
    let annulus = 1.0 - n0 as f64 * delta;
    let thicken = 2.0 * n0 as f64 * sqrt_delta;

    let n = group.ensure_enumerable()?;
    let tail_points: Vec<usize> = (0..n)
        .filter(|&i| head.iter().all(|&j| group.element_at(i).0[j] == 0))
        .collect();

    let mut candidates = Vec::new();
    let mut blocks = Vec::new();
    for chunk in lambda0.chunks(width).filter(|c| c.len() == width) {
        let terms = chunk.iter().enumerate().map(|(j, chi)| {
            let c = unit_from_turns(j as f64 / (m as f64 * width as f64));
            (project(chi, &tail), c)
        });
        let gs = TrigPolynomial::new(group, terms)?;
        let norm = sup_norm(&gs)?;
        let gs = gs.scale(Complex64::new(1.0 / norm.hi, 0.0));
        let table = gs.evaluate_all()?;
        let image: Vec<Complex64> = tail_points.iter().map(|&i| table[i]).collect();
        let top: Vec<Complex64> = image.iter().copied().filter(|v| v.norm() >= annulus - TAU_EXACT).collect();
        let radius = if top.is_empty() { 2.0 } else { covering_radius(&top, 4096) };
        candidates.push(BlockCandidate {
            characters: chunk.to_vec(),
            covering_radius: radius,
            sector_criterion: !top.is_empty() && meets_every_sector(&top, thicken, TAU / n0 as f64),
        });
        blocks.push((chunk.to_vec(), gs, image));
    }
    let s0 = candidates
        .iter()
        .position(|c| c.sector_criterion)
        .unwrap_or_else(|| {
            (0..candidates.len())
                .min_by(|&a, &b| candidates[a].covering_radius.total_cmp(&candidates[b].covering_radius))
                .expect("at least one block")
        });
    let (block, gs, image) = &blocks[s0];

    // targets γ(x^(k)) f_k(x^(k)), all of modulus ≈ 1
    let targets: Vec<Complex64> = (0..prep.family.len())
        .map(|k| group.evaluate_character(&gamma, &prep.maxima[k]).map(|c| c * prep.peaks[k]))
        .collect::<Result<_>>()?;
    let mut distinct: Vec<Complex64> = image.iter().copied().filter(|v| v.norm() >= 0.5).collect();
    distinct.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    distinct.dedup_by(|a, b| (*a - *b).norm() <= 1e-12);
    let score = |beta: f64| -> f64 {
        let r = Complex64::from_polar(1.0, beta);
        targets
            .iter()
            .map(|a| distinct.iter().map(|v| (a + r * v).norm()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min)
    };
    let peak = distinct.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut betas: Vec<f64> = (0..PHASE_GRID).map(|i| TAU * i as f64 / PHASE_GRID as f64).collect();
    for a in &targets {
        for v in distinct.iter().filter(|v| v.norm() >= peak - 1e-9) {
            betas.push((a.arg() - v.arg()).rem_euclid(TAU));
        }
    }
    let beta = betas
        .into_iter()
        .map(|b| (b, score(b)))
        .fold((0.0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 + 1e-12 { c } else { acc })
        .0;
    let rot = Complex64::from_polar(1.0, beta);

    // g = γ̄ g_{s₀} e^{iβ}: the same block written over the original characters
    let terms = block
        .iter()
        .map(|chi| (chi.clone(), gs.coefficient(&project(chi, &tail)) * rot));
    let witness = TrigPolynomial::new(group, terms)?;

    let mut points = Vec::new();
    let mut alignments = Vec::new();
    for (k, a) in targets.iter().enumerate() {
        let (best, _) = image
            .iter()
            .enumerate()
            .map(|(i, v)| (i, (a + rot * v).norm()))
            .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 + TAU_EXACT { c } else { acc });
        let y = group.element_at(tail_points[best]);
        let x = &prep.maxima[k];
        let p: GroupElement = super::splice(x, &y, &tail);
        alignments.push(MixedAlignment {
            x: x.clone(),
            y,
            defect: (a / a.norm() - rot * image[best]).norm(),
        });
        points.push(p);
    }
    prep.certificate(
        Method::BlockBasis,
        eps,
        &witness,
        &points,
        Parameters::BlockBasis {
            head,
            gamma,
            lambda0,
            block_width: width,
            required_width: required,
            n0,
            delta,
            candidates,
            s0,
            phase_offset: beta,
            alignments,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use crate::trigpoly::{random_unit_polynomial, Profile};

    fn rademacher(g: &FiniteAbelianGroup) -> Vec<Character> {
        (0..g.rank())
            .map(|j| {
                let mut e = vec![0i64; g.rank()];
                e[j] = 1;
                g.character(&e).unwrap()
            })
            .collect()
    }

    #[test]
    fn required_width_examples() {
        assert_eq!(required_block_width(2, 0.1), 3);
        assert_eq!(required_block_width(2, 2.0), 1);
        assert_eq!(required_block_width(1000, 0.1), 1);
    }

    #[test]
    fn rademacher_family_on_head_coordinates() {
        let g: FiniteAbelianGroup = "Z2^12".parse().unwrap();
        let lambda = rademacher(&g);
        for seed in 0..3 {
            let fam: Vec<_> = (0..2)
                .map(|k| random_unit_polynomial(&g, &lambda[..4], 100 * seed + k, Profile::Gaussian).unwrap().0)
                .collect();
            let cert = witness_block_basis(&fam, &lambda, 0.25, BlockOptions::default()).unwrap();
            assert!(cert.min_achieved() >= 1.75);
            let Parameters::BlockBasis { head, lambda0, .. } = &cert.parameters else { panic!() };
            assert_eq!(head, &vec![0, 1, 2, 3]);
            assert_eq!(lambda0.len(), 8);
        }
    }

    #[test]
    fn single_rademacher_character_aligns_exactly() {
        let g: FiniteAbelianGroup = "Z2^6".parse().unwrap();
        let lambda = rademacher(&g);
        let f = TrigPolynomial::character(&g, lambda[0].clone()).unwrap();
        let cert = witness_block_basis(&[f], &lambda, 0.5, BlockOptions::default()).unwrap();
        assert!((cert.min_achieved() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_eps_accepts_any_unit_witness() {
        let g: FiniteAbelianGroup = "Z2^2".parse().unwrap();
        let lambda = rademacher(&g);
        let f = TrigPolynomial::character(&g, lambda[0].clone()).unwrap();
        let cert = witness_block_basis(&[f], &lambda[..1], 2.0, BlockOptions::default()).unwrap();
        assert!(matches!(cert.parameters, Parameters::Degenerate { .. }));
        assert!(cert.meets_target());
    }

    #[test]
    fn too_few_tails_reports_requirement() {
        let g: FiniteAbelianGroup = "Z2^4".parse().unwrap();
        let lambda = rademacher(&g);
        let f = TrigPolynomial::character(&g, lambda[0].clone()).unwrap();
        match witness_block_basis(&[f], &lambda[..3], 0.05, BlockOptions::default()).unwrap_err() {
            Error::InsufficientTail { required, found } => {
                assert_eq!(found, 2);
                assert_eq!(required, required_block_width(2, 0.05));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn shared_head_bucket_is_used() {
        // every spectrum element outside Δ carries the same head exponent 1
        let g: FiniteAbelianGroup = "Z3 x Z2^6".parse().unwrap();
        let mut lambda = vec![g.character(&[1, 0, 0, 0, 0, 0, 0]).unwrap()];
        for j in 1..7 {
            let mut e = vec![0i64; 7];
            e[0] = 2;
            e[j] = 1;
            lambda.push(g.character(&e).unwrap());
        }
        let f = TrigPolynomial::character(&g, lambda[0].clone()).unwrap();
        let cert = witness_block_basis(&[f], &lambda, 0.3, BlockOptions { block_width: Some(3) }).unwrap();
        let Parameters::BlockBasis { gamma, candidates, .. } = &cert.parameters else { panic!() };
        assert_eq!(gamma, &g.character(&[1, 0, 0, 0, 0, 0, 0]).unwrap());
        assert_eq!(candidates.len(), 2);
        assert!(cert.min_achieved() >= 1.7);
    }

    #[test]
    fn modulation_invariance() {
        let g: FiniteAbelianGroup = "Z4 x Z2^6".parse().unwrap();
        let mut lambda = vec![g.character(&[1, 0, 0, 0, 0, 0, 0]).unwrap(), g.character(&[3, 0, 0, 0, 0, 0, 0]).unwrap()];
        for j in 1..7 {
            let mut e = vec![0i64; 7];
            e[j] = 1;
            lambda.push(g.character(&e).unwrap());
        }
        let chi = g.character(&[1, 0, 0, 0, 0, 0, 0]).unwrap();
        for seed in 0..4 {
            let fam: Vec<_> = (0..3)
                .map(|k| random_unit_polynomial(&g, &lambda[..2], seed * 7 + k, Profile::Gaussian).unwrap().0)
                .collect();
            let a = witness_block_basis(&fam, &lambda, 0.2, BlockOptions::default()).unwrap();
            let moved: Vec<_> = fam.iter().map(|f| f.modulate(&chi).unwrap()).collect();
            let moved_lambda: Vec<_> = lambda.iter().map(|l| g.character_mul(l, &chi)).collect();
            let b = witness_block_basis(&moved, &moved_lambda, 0.2, BlockOptions::default()).unwrap();
            for (x, y) in a.per_function.iter().zip(&b.per_function) {
                assert!((x.achieved - y.achieved).abs() < 1e-9, "{} vs {}", x.achieved, y.achieved);
            }
        }
    }
}
