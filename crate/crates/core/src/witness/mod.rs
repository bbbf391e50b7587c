//! Witness constructions: for unit polynomials `f_1, ..., f_n` with spectrum
//! in `Λ`, a unit `g` with spectrum in `Λ` and `min_k ‖f_k + g‖ ≥ 2 - ε`.

mod block;
mod certificate;
mod fresh;
mod general;
mod high_frequency;
mod lp;
mod thickness;
mod verify;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{Character, FiniteAbelianGroup, GroupElement, TAU_EXACT};
use crate::trigpoly::{sup_norm, sup_norm_with_maximizer, NormCertificate, PolynomialRecord, TrigPolynomial};

pub use block::{witness_block_basis, BlockOptions};
pub use certificate::*;
pub use fresh::witness_fresh_coordinate;
pub use general::{replay_dispatch, witness_general, GeneralOptions};
pub use high_frequency::witness_high_frequency;
pub use lp::{lp_distance, random_sparse_unit_vector, witness_lp, SparseVector};
pub use thickness::{thickness_lower_bound, FamilySpec, SpaceSpec, Strategy, ThicknessConfig, ThicknessReport, TrialOutcome};
pub use verify::{verify, VerifyReport, VerifyRow};

/// A family with its norm certificates and maximizers.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub group: FiniteAbelianGroup,
    pub lambda: Vec<Character>,
    pub family: Vec<TrigPolynomial>,
    pub certs: Vec<NormCertificate>,
    /// First lexicographic grid maximizer `x^(k)` of `|f_k|`.
    pub maxima: Vec<GroupElement>,
    /// `f_k(x^(k))`.
    pub peaks: Vec<Complex64>,
    /// `Δ = ∪ spec f_k`, in first-seen order.
    pub delta: Vec<Character>,
}

impl Prepared {
    pub fn new(family: &[TrigPolynomial], lambda: &[Character], eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("ε = {eps} must be positive and finite")));
        }
        let first = family
            .first()
            .ok_or_else(|| Error::InvalidArgument("the family is empty".into()))?;
        let group = first.group().clone();
        let mut lam: Vec<Character> = Vec::new();
        for chi in lambda {
            group.check_shape(chi.0.len())?;
            TrigPolynomial::character(&group, chi.clone())?;
            if !lam.contains(chi) {
                lam.push(chi.clone());
            }
        }
        if lam.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        let mut delta: Vec<Character> = Vec::new();
        let mut certs = Vec::new();
        let mut maxima = Vec::new();
        let mut peaks = Vec::new();
        for (k, f) in family.iter().enumerate() {
            if f.group() != &group {
                return Err(Error::GroupMismatch {
                    left: group.to_string(),
                    right: f.group().to_string(),
                });
            }
            for chi in f.spectrum() {
                if !lam.contains(&chi) {
                    return Err(Error::InvalidArgument(format!(
                        "spectrum of f_{k} contains {:?}, which is not in Λ",
                        chi.0
                    )));
                }
                if !delta.contains(&chi) {
                    delta.push(chi);
                }
            }
            let (cert, x) = sup_norm_with_maximizer(f)?;
            if cert.lo <= TAU_EXACT {
                return Err(Error::InvalidArgument(format!("f_{k} vanishes identically")));
            }
            peaks.push(f.evaluate(&x)?);
            certs.push(cert);
            maxima.push(x);
        }
        Ok(Self {
            group,
            lambda: lam,
            family: family.to_vec(),
            certs,
            maxima,
            peaks,
            delta,
        })
    }

    /// Coordinates on which some element of `Δ` is nontrivial.
    pub fn touched(&self) -> Vec<usize> {
        (0..self.group.rank())
            .filter(|&j| self.delta.iter().any(|chi| chi.0[j] != 0))
            .collect()
    }

    /// Unit direction `f_k(x^(k)) / |f_k(x^(k))|`.
    pub fn direction(&self, k: usize) -> Complex64 {
        let v = self.peaks[k];
        v / v.norm()
    }

    pub fn subject(&self, witness: &TrigPolynomial) -> Subject {
        Subject::Continuous {
            group: self.group.to_string(),
            lambda: self.lambda.clone(),
            family: self.family.iter().map(PolynomialRecord::from).collect(),
            witness: PolynomialRecord::from(witness),
        }
    }

    pub fn certificate(
        &self,
        method: Method,
        eps: f64,
        witness: &TrigPolynomial,
        points: &[GroupElement],
        parameters: Parameters,
    ) -> Result<WitnessCertificate> {
        let gcert = sup_norm(witness)?;
        let per_function = points
            .iter()
            .enumerate()
            .map(|(k, p)| bound_at(k, &self.family[k], &self.certs[k], witness, &gcert, p))
            .collect::<Result<Vec<_>>>()?;
        let cert = WitnessCertificate {
            schema: SCHEMA.to_string(),
            method,
            target_eps: eps,
            target: 2.0 - eps,
            subject: self.subject(witness),
            per_function,
            parameters,
            dispatch: None,
            seed: None,
        };
        check_target(&cert)?;
        Ok(cert)
    }
}

/// `|1/N - 1|` maximized over `N ∈ [lo, hi]`.
pub(crate) fn scale_defect(c: &NormCertificate) -> f64 {
    (1.0 / c.lo - 1.0).abs().max((1.0 / c.hi - 1.0).abs())
}

/// Bound for `‖f/‖f‖ + g/‖g‖‖` at `p`, with the unknown exact norms
/// replaced by their certificates.
pub(crate) fn bound_at(
    index: usize,
    f: &TrigPolynomial,
    fcert: &NormCertificate,
    g: &TrigPolynomial,
    gcert: &NormCertificate,
    p: &GroupElement,
) -> Result<FunctionBound> {
    let fv = f.evaluate(p)?;
    let gv = g.evaluate(p)?;
    let value = (fv + gv).norm();
    let slack = fv.norm() * scale_defect(fcert) + gv.norm() * scale_defect(gcert);
    Ok(FunctionBound {
        index,
        point: Some(p.clone()),
        value,
        slack,
        achieved: value - slack,
        plus_distance: None,
    })
}

pub(crate) fn check_target(cert: &WitnessCertificate) -> Result<()> {
    for b in &cert.per_function {
        if b.achieved < cert.target - TAU_EXACT {
            return Err(Error::TargetMissed {
                index: b.index,
                achieved: b.achieved,
                target: cert.target,
            });
        }
    }
    Ok(())
}

/// For `ε ≥ 2` every unit `g` in `C_Λ` witnesses the bound.
pub(crate) fn degenerate(prep: &Prepared, method: Method, eps: f64) -> Result<WitnessCertificate> {
    let g = prep.lambda[0].clone();
    let witness = TrigPolynomial::character(&prep.group, g.clone())?;
    prep.certificate(method, eps, &witness, &prep.maxima, Parameters::Degenerate { g })
}

/// `x` with the listed coordinates replaced by those of `y`.
pub(crate) fn splice(x: &GroupElement, y: &GroupElement, coords: &[usize]) -> GroupElement {
    let mut out = x.clone();
    for &j in coords {
        out.0[j] = y.0[j];
    }
    out
}
