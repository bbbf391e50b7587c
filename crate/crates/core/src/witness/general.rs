use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    witness_block_basis, witness_fresh_coordinate, witness_high_frequency, Attempt, BlockOptions, Dispatch, Method,
    MixedAlignment, Parameters, Prepared, Subject, TowerCase, WitnessCertificate,
};
use crate::disc::roots_chord;
use crate::error::{Error, Result};
use crate::group::{gamma_tower, Character, FiniteAbelianGroup, GammaTower, GroupElement, TAU_EXACT};
use crate::trigpoly::TrigPolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralOptions {
    /// Elements of `(Λ ∩ Γ_{l₀}) \ Δ` required before the first case is tried.
    pub min_fresh: usize,
    pub block: BlockOptions,
}

impl Default for GeneralOptions {
    fn default() -> Self {
        Self {
            min_fresh: 1,
            block: BlockOptions::default(),
        }
    }
}

/// Smallest `l₁ > l₀²` whose roots of unity form an `ε`-net in the chord
/// sense, `2 sin(π/l₁) ≤ ε`; and the same under the arc rule `2π/l₁ ≤ ε`.
pub fn second_case_thresholds(l0: usize, eps: f64) -> (u64, u64) {
    let start = (l0 as u64) * (l0 as u64) + 1;
    let chord = (start..)
        .find(|&l| roots_chord(l) <= eps + TAU_EXACT)
        .expect("chords shrink to zero");
    let arc = (start..)
        .find(|&l| std::f64::consts::TAU / l as f64 <= eps + TAU_EXACT)
        .expect("arcs shrink to zero");
    (chord, arc)
}

/// Tower-driven witness.
///
/// Builds `Γ_1 ⊂ Γ_2 ⊂ ... ⊂ ⟨Λ⟩` with `Δ` placed first in the maximal
/// independent set and takes the first level `Γ_{l₀}` containing `Δ`. If
/// that level holds enough of `Λ` beyond `Δ`, the family and `Λ ∩ Γ_{l₀}`
/// are handed to the structural constructors in turn. Otherwise some
/// `g ∈ Λ` has order at least `l₁` modulo `Γ_{l₀}`; on the annihilator
/// `H = Γ_{l₀}^⊥` it takes every `o`-th root of unity while every `f_k` is
/// `H`-periodic, so `x^(k) + y` with a suitable `y ∈ H` aligns `g` with
/// `f_k`.
pub fn witness_general(
    family: &[TrigPolynomial],
    lambda: &[Character],
    eps: f64,
    options: GeneralOptions,
) -> Result<WitnessCertificate> {
    let prep = Prepared::new(family, lambda, eps)?;
    let group = prep.group.clone();
    let tower = gamma_tower(&group, &prep.lambda, &prep.delta)?;
    let l0 = tower.first_level_containing(&prep.delta);
    let level = tower.level(l0);
    let lambda0: Vec<Character> = prep.lambda.iter().filter(|c| level.contains(&c.0)).cloned().collect();
    let fresh = lambda0.iter().filter(|c| !prep.delta.contains(c)).count();
    let mut dispatch = Dispatch {
        level_orders: tower.levels.iter().map(|s| s.order()).collect(),
        l0,
        fresh_in_level: fresh,
        min_fresh: options.min_fresh,
        case: TowerCase::First,
        attempts: Vec::new(),
    };

    if fresh >= options.min_fresh {
        let mut tries: Vec<Method> = Vec::new();
        if group.has_torus() {
            tries.push(Method::HighFrequency);
        }
        tries.extend([Method::FreshCoordinate, Method::BlockBasis]);
        for method in tries {
            let result = match method {
                Method::HighFrequency => witness_high_frequency(family, &lambda0, eps),
                Method::FreshCoordinate => witness_fresh_coordinate(family, &lambda0, eps),
                _ => witness_block_basis(family, &lambda0, eps, options.block),
            };
            match result {
                Ok(mut cert) => {
                    dispatch.attempts.push(Attempt { method, error: None });
                    // the certificate speaks about the full Λ
                    if let Subject::Continuous { lambda, .. } = &mut cert.subject {
                        *lambda = prep.lambda.clone();
                    }
                    cert.dispatch = Some(dispatch);
                    return Ok(cert);
                }
                Err(e) => dispatch.attempts.push(Attempt {
                    method,
                    error: Some(e.to_string()),
                }),
            }
        }
    }

    dispatch.case = TowerCase::Second;
    match second_case(&prep, &tower, l0, eps) {
        Ok(mut cert) => {
            dispatch.attempts.push(Attempt {
                method: Method::Tower,
                error: None,
            });
            cert.dispatch = Some(dispatch);
            Ok(cert)
        }
        Err(_) if prep.family.windows(2).all(|w| w[0] == w[1]) => {
            let cert = self_aligned(&prep, eps)?;
            dispatch.attempts.push(Attempt {
                method: Method::Tower,
                error: None,
            });
            Ok(WitnessCertificate {
                dispatch: Some(dispatch),
                ..cert
            })
        }
        Err(e) => {
            let first = if fresh >= options.min_fresh {
                let failures: Vec<String> = dispatch
                    .attempts
                    .iter()
                    .map(|a| format!("{}: {}", a.method, a.error.clone().unwrap_or_default()))
                    .collect();
                format!("first case failed ({})", failures.join("; "))
            } else {
                format!(
                    "first case needs {} element(s) of Λ ∩ Γ_{l0} outside Δ, found {fresh}; add such characters",
                    options.min_fresh
                )
            };
            Err(Error::WindowExhausted {
                case: "tower".into(),
                detail: format!("{first}; second case: {e}"),
            })
        }
    }
}

fn second_case(prep: &Prepared, tower: &GammaTower, l0: usize, eps: f64) -> Result<WitnessCertificate> {
    let group = &prep.group;
    let level = tower.level(l0);
    let (l1, l1_arc) = second_case_thresholds(l0, eps);
    let mut best_order = 0;
    let mut chosen = None;
    for chi in &prep.lambda {
        let o = level.coset_order(&chi.0);
        best_order = best_order.max(o);
        if o >= l1 {
            chosen = Some((chi.clone(), o));
            break;
        }
    }
    let Some((g_char, coset_order)) = chosen else {
        return Err(Error::WindowExhausted {
            case: "second".into(),
            detail: format!(
                "no λ has order ≥ l₁ = {l1} modulo Γ_{l0} (largest {best_order}); add a character of that order or enlarge the stand-in"
            ),
        });
    };
    let annihilator = level.annihilator();
    let h: Vec<GroupElement> = annihilator.elements()?.into_iter().map(GroupElement).collect();
    let g = TrigPolynomial::character(group, g_char.clone())?;
    let mut points = Vec::new();
    let mut alignments = Vec::new();
    for k in 0..prep.family.len() {
        let x = &prep.maxima[k];
        let fx = prep.peaks[k];
        let (p, y, _) = h
            .iter()
            .map(|y| {
                let p = group.add(x, y);
                let v = (fx + group.evaluate_character(&g_char, &p).expect("shapes agree")).norm();
                (p, y, v)
            })
            .fold(None, |acc: Option<(GroupElement, &GroupElement, f64)>, c| match acc {
                Some(a) if a.2 + TAU_EXACT >= c.2 => Some(a),
                _ => Some(c),
            })
            .expect("the annihilator contains the identity");
        let defect = (prep.direction(k) - g.evaluate(&p)?).norm();
        alignments.push(MixedAlignment {
            x: x.clone(),
            y: y.clone(),
            defect,
        });
        points.push(p);
    }
    prep.certificate(
        Method::Tower,
        eps,
        &g,
        &points,
        Parameters::Tower {
            l0,
            l1,
            l1_arc,
            g: g_char,
            coset_order,
            annihilator_order: annihilator.order(),
            alignments,
        },
    )
}

fn self_aligned(prep: &Prepared, eps: f64) -> Result<WitnessCertificate> {
    let scale = 1.0 / prep.certs[0].hi;
    let g = prep.family[0].scale(Complex64::new(scale, 0.0));
    prep.certificate(Method::Tower, eps, &g, &prep.maxima, Parameters::SelfAligned { scale })
}

/// Rebuilds the tower from the certificate's `Λ` and family and checks that
/// the recorded dispatch is the one the rules select.
pub fn replay_dispatch(cert: &WitnessCertificate) -> Result<()> {
    let Some(d) = &cert.dispatch else {
        return Ok(());
    };
    let Subject::Continuous { group, lambda, family, .. } = &cert.subject else {
        return Err(Error::Schema("dispatch log on a sequence-space certificate".into()));
    };
    let group: FiniteAbelianGroup = group.parse()?;
    let fam = family
        .iter()
        .map(TrigPolynomial::try_from)
        .collect::<Result<Vec<_>>>()?;
    let prep = Prepared::new(&fam, lambda, cert.target_eps)?;
    if prep.group != group {
        return Err(Error::GroupMismatch {
            left: group.to_string(),
            right: prep.group.to_string(),
        });
    }
    let tower = gamma_tower(&group, &prep.lambda, &prep.delta)?;
    let orders: Vec<u64> = tower.levels.iter().map(|s| s.order()).collect();
    let mismatch = |what: &str| Err(Error::Schema(format!("dispatch replay: {what} differs")));
    if orders != d.level_orders {
        return mismatch("tower");
    }
    let l0 = tower.first_level_containing(&prep.delta);
    if l0 != d.l0 {
        return mismatch("l0");
    }
    let level = tower.level(l0);
    let fresh = prep
        .lambda
        .iter()
        .filter(|c| level.contains(&c.0) && !prep.delta.contains(c))
        .count();
    if fresh != d.fresh_in_level {
        return mismatch("fresh count");
    }
    match d.case {
        TowerCase::First => {
            if fresh < d.min_fresh || cert.method == Method::Tower {
                return mismatch("case");
            }
            if let Parameters::Degenerate { .. } = cert.parameters {
                return Ok(());
            }
            let witness_spectrum: Vec<Character> = match &cert.subject {
                Subject::Continuous { witness, .. } => TrigPolynomial::try_from(witness)?.spectrum(),
                _ => unreachable!(),
            };
            if witness_spectrum.iter().any(|c| !level.contains(&c.0)) {
                return mismatch("first-case witness level");
            }
        }
        TowerCase::Second => {
            if let Parameters::SelfAligned { .. } = cert.parameters {
                return if prep.family.windows(2).all(|w| w[0] == w[1]) {
                    Ok(())
                } else {
                    mismatch("self-aligned family")
                };
            }
            let Parameters::Tower { l0: pl0, l1, g, coset_order, .. } = &cert.parameters else {
                return mismatch("case");
            };
            let (rule, _) = second_case_thresholds(l0, cert.target_eps);
            if *pl0 != l0 || *l1 != rule || *l1 <= (l0 * l0) as u64 {
                return mismatch("l1 rule");
            }
            if level.coset_order(&g.0) != *coset_order || *coset_order < *l1 {
                return mismatch("coset order");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::{random_unit_polynomial, Profile};
    use num_complex::Complex64;

    #[test]
    fn thresholds() {
        // chord rule accepts l1 = 3 for ε = 1.8, the arc rule needs 4
        assert_eq!(second_case_thresholds(1, 1.8), (3, 4));
        assert_eq!(second_case_thresholds(2, 2.0), (5, 5));
        let (l1, _) = second_case_thresholds(3, 0.1);
        assert!(l1 > 9 && roots_chord(l1) <= 0.1 && roots_chord(l1 - 1) > 0.1);
    }

    #[test]
    fn z9_tower_second_case() {
        let g = FiniteAbelianGroup::cyclic(&[9]).unwrap();
        let f = TrigPolynomial::character(&g, g.character(&[3]).unwrap()).unwrap();
        let lambda = vec![g.character(&[1]).unwrap(), g.character(&[3]).unwrap()];
        let cert = witness_general(&[f], &lambda, 1.8, GeneralOptions::default()).unwrap();
        assert_eq!(cert.method, Method::Tower);
        let d = cert.dispatch.as_ref().unwrap();
        assert_eq!(d.case, TowerCase::Second);
        assert_eq!(d.l0, 1);
        assert_eq!(d.fresh_in_level, 0);
        let Parameters::Tower { l1, l1_arc, g: gc, coset_order, annihilator_order, .. } = &cert.parameters else {
            panic!()
        };
        assert_eq!((*l1, *l1_arc, *coset_order, *annihilator_order), (3, 4, 3, 3));
        assert_eq!(gc, &g.character(&[1]).unwrap());
        assert!(cert.min_achieved() >= 2.0 - 1.8 - 3f64.sqrt());
        assert!((cert.min_achieved() - 2.0).abs() < 1e-12);
        replay_dispatch(&cert).unwrap();
    }

    #[test]
    fn large_cyclic_stand_in_delegates_to_high_frequency() {
        let g: FiniteAbelianGroup = "T(N=4096,d=256)".parse().unwrap();
        let lambda: Vec<_> = (0..6).map(|k| g.character(&[3i64.pow(k)]).unwrap()).collect();
        let (f, _) = random_unit_polynomial(&g, &lambda[..2], 1, Profile::Gaussian).unwrap();
        let cert = witness_general(&[f], &lambda, 0.05, GeneralOptions::default()).unwrap();
        assert_eq!(cert.method, Method::HighFrequency);
        assert_eq!(cert.dispatch.as_ref().unwrap().case, TowerCase::First);
        replay_dispatch(&cert).unwrap();
    }

    #[test]
    fn constant_function_with_fresh_character() {
        let g = FiniteAbelianGroup::cyclic(&[8]).unwrap();
        let f = TrigPolynomial::constant(&g, Complex64::new(1.0, 0.0));
        let lambda = vec![g.trivial_character(), g.character(&[5]).unwrap()];
        let cert = witness_general(&[f], &lambda, 0.1, GeneralOptions::default()).unwrap();
        assert!((cert.min_achieved() - 2.0).abs() < 1e-12);
        replay_dispatch(&cert).unwrap();
    }

    #[test]
    fn rademacher_dispatches_to_block_basis() {
        let g: FiniteAbelianGroup = "Z2^10".parse().unwrap();
        let lambda: Vec<_> = (0..10)
            .map(|j| {
                let mut e = vec![0i64; 10];
                e[j] = 1;
                g.character(&e).unwrap()
            })
            .collect();
        let fam: Vec<_> = (0..3)
            .map(|k| random_unit_polynomial(&g, &lambda[..3], k, Profile::Gaussian).unwrap().0)
            .collect();
        let cert = witness_general(&fam, &lambda, 0.1, GeneralOptions::default()).unwrap();
        assert_eq!(cert.method, Method::BlockBasis);
        let d = cert.dispatch.as_ref().unwrap();
        assert_eq!(d.attempts[0].method, Method::FreshCoordinate);
        assert!(d.attempts[0].error.is_some());
        replay_dispatch(&cert).unwrap();
    }

    #[test]
    fn exhausted_window_names_both_cases() {
        let g = FiniteAbelianGroup::cyclic(&[9]).unwrap();
        let f = TrigPolynomial::character(&g, g.character(&[3]).unwrap()).unwrap();
        let lambda = vec![g.character(&[1]).unwrap(), g.character(&[3]).unwrap()];
        let h = f.scale(Complex64::new(0.0, 1.0));
        match witness_general(&[f, h], &lambda, 0.5, GeneralOptions::default()).unwrap_err() {
            Error::WindowExhausted { case, detail } => {
                assert_eq!(case, "tower");
                assert!(detail.contains("first case needs 1"));
                assert!(detail.contains("l₁ = 13"), "{detail}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn tampered_dispatch_is_detected() {
        let g = FiniteAbelianGroup::cyclic(&[9]).unwrap();
        let f = TrigPolynomial::character(&g, g.character(&[3]).unwrap()).unwrap();
        let lambda = vec![g.character(&[1]).unwrap(), g.character(&[3]).unwrap()];
        let mut cert = witness_general(&[f], &lambda, 1.8, GeneralOptions::default()).unwrap();
        cert.dispatch.as_mut().unwrap().l0 = 2;
        assert!(replay_dispatch(&cert).is_err());
    }
}
