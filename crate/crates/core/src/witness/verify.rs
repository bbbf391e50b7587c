use serde::{Deserialize, Serialize};

use super::{bound_at, lp_distance, replay_dispatch, Parameters, SparseVector, Subject, WitnessCertificate, SCHEMA};
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, TAU_EXACT};
use crate::trigpoly::{sup_norm, TrigPolynomial};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub index: usize,
    pub recorded: f64,
    pub recomputed: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub rows: Vec<VerifyRow>,
    /// Human-readable reasons for failure, each naming what disagreed.
    pub problems: Vec<String>,
}

/// Re-derives every bound of a certificate from its stored polynomials and
/// points alone, using fresh sup-norm certificates.
///
/// Structural defects (wrong schema, unparsable or inconsistent groups) are
/// errors; numerical disagreements produce a failing report.
pub fn verify(cert: &WitnessCertificate) -> Result<VerifyReport> {
    if cert.schema != SCHEMA {
        return Err(Error::Schema(format!("expected schema {SCHEMA}, found {}", cert.schema)));
    }
    let mut problems = Vec::new();
    let rows = match &cert.subject {
        Subject::Continuous { group, lambda, family, witness } => {
            let group: FiniteAbelianGroup = group.parse()?;
            for r in family.iter().chain(std::iter::once(witness)) {
                let g: FiniteAbelianGroup = r.group.parse()?;
                if g != group {
                    return Err(Error::GroupMismatch {
                        left: group.to_string(),
                        right: g.to_string(),
                    });
                }
            }
            for chi in lambda {
                group.check_shape(chi.0.len())?;
            }
            let fam = family.iter().map(TrigPolynomial::try_from).collect::<Result<Vec<_>>>()?;
            let g = TrigPolynomial::try_from(witness)?;
            for (name, f) in fam.iter().enumerate().map(|(k, f)| (format!("f_{k}"), f)).chain([("witness".to_string(), &g)]) {
                if let Some(chi) = f.spectrum().into_iter().find(|c| !lambda.contains(c)) {
                    problems.push(format!("{name} uses {:?}, which is not in Λ", chi.0));
                }
            }
            let gcert = sup_norm(&g)?;
            if !gcert.contains(1.0) {
                problems.push(format!("witness norm lies in [{}, {}], which excludes 1", gcert.lo, gcert.hi));
            }
            if cert.per_function.len() != fam.len() {
                problems.push(format!(
                    "{} bounds recorded for a family of {}",
                    cert.per_function.len(),
                    fam.len()
                ));
            }
            let mut rows = Vec::new();
            for (k, b) in cert.per_function.iter().enumerate() {
                let (Some(f), Some(p)) = (fam.get(b.index), &b.point) else {
                    problems.push(format!("bound {k} has no function or point"));
                    continue;
                };
                group.check_shape(p.0.len())?;
                let p = group.element(p.0.clone())?;
                let fresh = bound_at(b.index, f, &sup_norm(f)?, &g, &gcert, &p)?;
                rows.push(row(b.index, b.achieved, fresh.achieved, cert.target, &mut problems));
            }
            if let Parameters::Degenerate { .. } = cert.parameters {
                if cert.target_eps < 2.0 {
                    problems.push("degenerate witness claimed for ε < 2".into());
                }
            }
            if cert.dispatch.is_some() {
                if let Err(e) = replay_dispatch(cert) {
                    problems.push(e.to_string());
                }
            }
            rows
        }
        Subject::Sequence { p, family, witness_index } => {
            let fam: Vec<SparseVector> = family
                .iter()
                .map(|x| x.iter().map(|&(i, re, im)| (i, Complex64::new(re, im))).collect())
                .collect();
            for (k, x) in fam.iter().enumerate() {
                if x.contains_key(witness_index) {
                    problems.push(format!("x_{k} is supported at the witness index {witness_index}"));
                }
            }
            let e_m = SparseVector::from([(*witness_index, Complex64::new(-1.0, 0.0))]);
            let mut rows = Vec::new();
            for b in &cert.per_function {
                let Some(x) = fam.get(b.index) else {
                    problems.push(format!("bound {} has no vector", b.index));
                    continue;
                };
                let d = lp_distance(x, &e_m, *p)?;
                rows.push(row(b.index, b.achieved, d, cert.target, &mut problems));
            }
            if (cert.target - 2f64.powf(1.0 / p)).abs() > TAU_EXACT {
                problems.push(format!("target {} differs from 2^(1/p)", cert.target));
            }
            rows
        }
    };
    if let Subject::Continuous { .. } = cert.subject {
        if (cert.target - (2.0 - cert.target_eps)).abs() > TAU_EXACT {
            problems.push(format!("target {} differs from 2 - ε", cert.target));
        }
    }
    Ok(VerifyReport {
        pass: problems.is_empty(),
        rows,
        problems,
    })
}

fn row(index: usize, recorded: f64, recomputed: f64, target: f64, problems: &mut Vec<String>) -> VerifyRow {
    let agrees = (recorded - recomputed).abs() <= TAU_EXACT;
    let meets = recomputed >= target - TAU_EXACT;
    if !agrees {
        problems.push(format!("function {index}: recorded {recorded} but recomputed {recomputed}"));
    } else if !meets {
        problems.push(format!("function {index}: bound {recomputed} misses target {target}"));
    }
    VerifyRow {
        index,
        recorded,
        recomputed,
        ok: agrees && meets,
    }
}
