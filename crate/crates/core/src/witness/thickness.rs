use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    random_sparse_unit_vector, witness_block_basis, witness_fresh_coordinate, witness_general, witness_high_frequency,
    witness_lp, BlockOptions, GeneralOptions, WitnessCertificate,
};
use crate::error::{Error, Result};
use crate::group::{Character, FiniteAbelianGroup};
use crate::trigpoly::{random_unit_polynomial, Profile, TrigPolynomial};

/// Which constructor a continuous-space trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Strategy {
    /// The tower dispatcher.
    #[default]
    Auto,
    HighFrequency,
    FreshCoordinate,
    BlockBasis { block_width: Option<usize> },
}

/// How the random family members are drawn.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FamilySpec {
    /// Exponent vectors the members may use; `None` means all of `Λ`.
    #[serde(default)]
    pub spectrum: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "space")]
pub enum SpaceSpec {
    /// `ℓ^p` with sparse unit vectors.
    Lp { p: f64, max_support: usize, index_range: u64 },
    /// `C_Λ(G)` with the sup norm.
    Continuous {
        group: String,
        lambda: Vec<Vec<i64>>,
        #[serde(default)]
        family: FamilySpec,
        #[serde(default)]
        strategy: Strategy,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessConfig {
    pub space: SpaceSpec,
    /// Family size per trial.
    pub n: usize,
    /// Ignored for `ℓ^p`, whose target is `2^{1/p}`.
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<WitnessCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessReport {
    pub trials: usize,
    pub eps: f64,
    pub target: f64,
    /// Smallest bound over all successful trials; `None` if every trial failed.
    pub min_achieved: Option<f64>,
    pub seed: u64,
    pub failures: usize,
    pub outcomes: Vec<TrialOutcome>,
}

impl ThicknessReport {
    /// Every trial produced a certificate meeting its target.
    pub fn all_met(&self) -> bool {
        self.failures == 0
            && self
                .outcomes
                .iter()
                .all(|o| o.certificate.as_ref().is_some_and(|c| c.meets_target()))
    }
}

/// The space resolved once, shared by all trials.
enum Resolved {
    Lp {
        p: f64,
        max_support: usize,
        index_range: u64,
    },
    Continuous {
        group: FiniteAbelianGroup,
        lambda: Vec<Character>,
        family_spectrum: Vec<Character>,
        profile: Profile,
        strategy: Strategy,
    },
}

fn characters(group: &FiniteAbelianGroup, exps: &[Vec<i64>]) -> Result<Vec<Character>> {
    exps.iter().map(|e| group.character(e)).collect()
}

fn resolve(space: &SpaceSpec) -> Result<Resolved> {
    Ok(match space {
        SpaceSpec::Lp { p, max_support, index_range } => Resolved::Lp {
            p: *p,
            max_support: *max_support,
            index_range: *index_range,
        },
        SpaceSpec::Continuous { group, lambda, family, strategy } => {
            let group: FiniteAbelianGroup = group.parse()?;
            let lambda = characters(&group, lambda)?;
            if lambda.is_empty() {
                return Err(Error::EmptySpectrum);
            }
            let family_spectrum = match &family.spectrum {
                Some(s) => characters(&group, s)?,
                None => lambda.clone(),
            };
            Resolved::Continuous {
                group,
                lambda,
                family_spectrum,
                profile: family.profile,
                strategy: *strategy,
            }
        }
    })
}

fn run_trial(space: &Resolved, n: usize, eps: f64, seed: u64) -> Result<WitnessCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match space {
        Resolved::Lp { p, max_support, index_range } => {
            let fam = (0..n)
                .map(|_| random_sparse_unit_vector(&mut rng, *p, *max_support, *index_range))
                .collect::<Result<Vec<_>>>()?;
            witness_lp(&fam, *p)
        }
        Resolved::Continuous {
            group,
            lambda,
            family_spectrum,
            profile,
            strategy,
        } => {
            let fam: Vec<TrigPolynomial> = (0..n)
                .map(|_| random_unit_polynomial(group, family_spectrum, rng.gen(), *profile).map(|(f, _)| f))
                .collect::<Result<_>>()?;
            match strategy {
                Strategy::Auto => witness_general(&fam, lambda, eps, GeneralOptions::default()),
                Strategy::HighFrequency => witness_high_frequency(&fam, lambda, eps),
                Strategy::FreshCoordinate => witness_fresh_coordinate(&fam, lambda, eps),
                Strategy::BlockBasis { block_width } => {
                    witness_block_basis(&fam, lambda, eps, BlockOptions { block_width: *block_width })
                }
            }
        }
    }
}

/// Runs one witness construction per trial on freshly drawn families.
///
/// Each successful trial shows that its family is not an inner
/// `(target - η)`-net of the unit sphere for any `η > 0`. Trial seeds come
/// from a single stream seeded by `config.seed`, so the report is
/// reproducible regardless of how trials are scheduled. Constructor errors
/// are recorded per trial.
pub fn thickness_lower_bound(config: &ThicknessConfig) -> Result<ThicknessReport> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    if config.n == 0 {
        return Err(Error::InvalidArgument("the family size must be positive".into()));
    }
    let space = resolve(&config.space)?;
    let (eps, target) = match &space {
        Resolved::Lp { p, .. } => {
            if !(*p >= 1.0 && p.is_finite()) {
                return Err(Error::InvalidArgument(format!("p = {p} must be a finite value ≥ 1")));
            }
            let t = 2f64.powf(1.0 / p);
            (2.0 - t, t)
        }
        Resolved::Continuous { .. } => {
            if !(config.eps > 0.0 && config.eps <= 2.0) {
                return Err(Error::InvalidArgument(format!("ε = {} must lie in (0, 2]", config.eps)));
            }
            (config.eps, 2.0 - config.eps)
        }
    };
    let mut stream = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.trials).map(|_| stream.gen()).collect();
    let outcomes: Vec<TrialOutcome> = seeds
        .par_iter()
        .enumerate()
        .map(|(trial, &seed)| match run_trial(&space, config.n, eps, seed) {
            Ok(mut cert) => {
                cert.seed = Some(seed);
                TrialOutcome {
                    trial,
                    seed,
                    certificate: Some(cert),
                    error: None,
                }
            }
            Err(e) => TrialOutcome {
                trial,
                seed,
                certificate: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let min_achieved = outcomes
        .iter()
        .filter_map(|o| o.certificate.as_ref().map(|c| c.min_achieved()))
        .reduce(f64::min);
    let failures = outcomes.iter().filter(|o| o.error.is_some()).count();
    Ok(ThicknessReport {
        trials: config.trials,
        eps,
        target,
        min_achieved,
        seed: config.seed,
        failures,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rademacher(n: usize) -> Vec<Vec<i64>> {
        (0..n)
            .map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                e
            })
            .collect()
    }

    #[test]
    fn lp_reports_whitley_constant() {
        for p in [1.0, 2.0, 3.5] {
            let cfg = ThicknessConfig {
                space: SpaceSpec::Lp {
                    p,
                    max_support: 6,
                    index_range: 30,
                },
                n: 5,
                eps: 0.0,
                trials: 8,
                seed: 7,
            };
            let r = thickness_lower_bound(&cfg).unwrap();
            assert!((r.min_achieved.unwrap() - 2f64.powf(1.0 / p)).abs() < 1e-12);
            assert!(r.all_met());
        }
    }

    #[test]
    fn rademacher_block_basis_trials() {
        let cfg = ThicknessConfig {
            space: SpaceSpec::Continuous {
                group: "Z2^12".into(),
                lambda: rademacher(12),
                family: FamilySpec {
                    spectrum: Some(rademacher(12)[..4].to_vec()),
                    profile: Profile::Gaussian,
                },
                strategy: Strategy::BlockBasis { block_width: None },
            },
            n: 3,
            eps: 0.1,
            trials: 4,
            seed: 11,
        };
        let r = thickness_lower_bound(&cfg).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.min_achieved.unwrap() >= 1.9);
        let again = thickness_lower_bound(&cfg).unwrap();
        assert_eq!(r, again);
        let order: Vec<_> = r.outcomes.iter().map(|o| o.trial).collect();
        assert_eq!(order, vec![0, 1, 2, 3]);
    }

    #[test]
    fn witness_from_the_family_itself() {
        // f = χ₁ and Λ = {χ₁}: the only unit in Λ is f itself, giving 2
        let cfg = ThicknessConfig {
            space: SpaceSpec::Continuous {
                group: "Z8".into(),
                lambda: vec![vec![1]],
                family: FamilySpec::default(),
                strategy: Strategy::Auto,
            },
            n: 1,
            eps: 0.1,
            trials: 1,
            seed: 0,
        };
        let r = thickness_lower_bound(&cfg).unwrap();
        assert_eq!(r.failures, 0, "{:?}", r.outcomes[0].error);
        assert!((r.min_achieved.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn failures_are_recorded_not_raised() {
        let cfg = ThicknessConfig {
            space: SpaceSpec::Continuous {
                group: "Z8".into(),
                lambda: vec![vec![1], vec![2]],
                family: FamilySpec {
                    spectrum: Some(vec![vec![1]]),
                    profile: Profile::Flat,
                },
                strategy: Strategy::FreshCoordinate,
            },
            n: 2,
            eps: 0.1,
            trials: 3,
            seed: 1,
        };
        let r = thickness_lower_bound(&cfg).unwrap();
        assert_eq!(r.failures, 3);
        assert_eq!(r.min_achieved, None);
        assert!(!r.all_met());
    }
}
