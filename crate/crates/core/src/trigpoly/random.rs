use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{sup_norm, NormCertificate, TrigPolynomial};
use crate::error::{Error, Result};
use crate::group::{Character, FiniteAbelianGroup};

/// Coefficient distribution for random families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "terms")]
pub enum Profile {
    /// Unit moduli, uniform phases.
    #[default]
    Flat,
    /// Independent complex Gaussians.
    Gaussian,
    /// Gaussian coefficients on `k` characters drawn without replacement.
    Sparse(usize),
}

/// Random polynomial with spectrum in `lambda`, scaled by the upper end of
/// its sup-norm certificate so the true norm lies in `[lo/hi, 1]`.
pub fn random_unit_polynomial(
    group: &FiniteAbelianGroup,
    lambda: &[Character],
    seed: u64,
    profile: Profile,
) -> Result<(TrigPolynomial, NormCertificate)> {
    if lambda.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support: Vec<Character> = match profile {
        Profile::Sparse(k) => {
            let k = k.clamp(1, lambda.len());
            lambda.choose_multiple(&mut rng, k).cloned().collect()
        }
        _ => lambda.to_vec(),
    };
    let terms: Vec<(Character, Complex64)> = support
        .into_iter()
        .map(|chi| {
            let c = match profile {
                Profile::Flat => Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
                Profile::Gaussian | Profile::Sparse(_) => {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                }
            };
            (chi, c)
        })
        .collect();
    let mut f = TrigPolynomial::new(group, terms)?;
    let mut cert = sup_norm(&f)?;
    if cert.hi <= f64::MIN_POSITIVE {
        // every coefficient vanished; fall back to the first character
        f = TrigPolynomial::character(group, lambda[0].clone())?;
        cert = sup_norm(&f)?;
    }
    let s = 1.0 / cert.hi;
    let f = f.scale(Complex64::new(s, 0.0));
    let cert = NormCertificate {
        lo: if cert.width() == 0.0 { 1.0 } else { cert.lo * s },
        hi: 1.0,
        method: cert.method,
    };
    Ok((f, cert))
}

/// Characters of `lambda` whose frequency on every torus factor is at most
/// `max_degree` in absolute value.
pub fn restrict_bandwidth(group: &FiniteAbelianGroup, lambda: &[Character], max_degree: u64) -> Vec<Character> {
    lambda
        .iter()
        .filter(|chi| {
            group
                .factors()
                .iter()
                .enumerate()
                .filter(|(_, f)| f.is_torus())
                .all(|(j, _)| group.torus_frequency(chi, j).unsigned_abs() <= max_degree)
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::TAU_EXACT;

    #[test]
    fn trivial_cases() {
        let g = FiniteAbelianGroup::cyclic(&[8]).unwrap();
        let (f, c) = random_unit_polynomial(&g, &[g.trivial_character()], 1, Profile::Gaussian).unwrap();
        assert_eq!(f.spectrum(), vec![g.trivial_character()]);
        assert!((f.coefficient(&g.trivial_character()).norm() - 1.0).abs() < 1e-12);
        assert_eq!((c.lo, c.hi), (1.0, 1.0));

        let chi = g.character(&[5]).unwrap();
        let (f, _) = random_unit_polynomial(&g, std::slice::from_ref(&chi), 7, Profile::Flat).unwrap();
        assert_eq!(f.spectrum(), vec![chi]);
        assert_eq!(random_unit_polynomial(&g, &[], 0, Profile::Flat).unwrap_err(), Error::EmptySpectrum);
    }

    #[test]
    fn deterministic_and_normalized() {
        let g = FiniteAbelianGroup::cyclic(&[8]).unwrap();
        let lambda = vec![g.character(&[1]).unwrap(), g.character(&[3]).unwrap()];
        for profile in [Profile::Flat, Profile::Gaussian, Profile::Sparse(1)] {
            let a = random_unit_polynomial(&g, &lambda, 42, profile).unwrap();
            let b = random_unit_polynomial(&g, &lambda, 42, profile).unwrap();
            assert_eq!(a, b);
            assert!(a.1.lo >= 1.0 - TAU_EXACT && a.1.hi == 1.0);
            for k in a.0.spectrum() {
                assert!(lambda.contains(&k));
            }
        }
    }

    #[test]
    fn torus_certificate_contains_one() {
        let g: FiniteAbelianGroup = "T(N=512,d=8)".parse().unwrap();
        let lambda: Vec<_> = [-3i64, 1, 2, 7].iter().map(|&a| g.character(&[a]).unwrap()).collect();
        let (f, c) = random_unit_polynomial(&g, &lambda, 9, Profile::Gaussian).unwrap();
        assert!(c.contains(1.0) && c.lo > 0.999);
        assert_eq!(restrict_bandwidth(&g, &lambda, 3).len(), 3);
        assert!(f.spectrum().len() == 4);
    }
}
