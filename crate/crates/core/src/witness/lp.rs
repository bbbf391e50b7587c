use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{FunctionBound, Method, Parameters, SparseRecord, Subject, WitnessCertificate, SCHEMA};
use crate::error::{Error, Result};
use crate::group::TAU_EXACT;

/// Finitely supported vector in `ℓ^p`, keyed by index.
pub type SparseVector = BTreeMap<u64, Complex64>;

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p = {p} must be finite and at least 1")));
    }
    Ok(())
}

fn norm_p(x: &SparseVector, p: f64) -> f64 {
    x.values().map(|c| c.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `‖x - y‖_p` for sparse vectors.
pub fn lp_distance(x: &SparseVector, y: &SparseVector, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut diff = x.clone();
    for (i, c) in y {
        *diff.entry(*i).or_default() -= c;
    }
    Ok(norm_p(&diff, p))
}

/// Witness `e_m` with `m` beyond every support: disjoint supports give
/// `‖x_k ± e_m‖_p = (‖x_k‖_p^p + 1)^{1/p} = 2^{1/p}` exactly.
pub fn witness_lp(family: &[SparseVector], p: f64) -> Result<WitnessCertificate> {
    check_p(p)?;
    if family.is_empty() {
        return Err(Error::InvalidArgument("the family is empty".into()));
    }
    for (k, x) in family.iter().enumerate() {
        let n = norm_p(x, p);
        if (n - 1.0).abs() > TAU_EXACT {
            return Err(Error::InvalidArgument(format!("x_{k} has ℓ^p norm {n}, expected 1")));
        }
    }
    let m = family
        .iter()
        .filter_map(|x| x.keys().next_back())
        .max()
        .map_or(0, |&i| i + 1);
    let e_m = SparseVector::from([(m, Complex64::new(1.0, 0.0))]);
    let minus = SparseVector::from([(m, Complex64::new(-1.0, 0.0))]);
    let per_function = family
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let value = lp_distance(x, &minus, p)?;
            Ok(FunctionBound {
                index: k,
                point: None,
                value,
                slack: 0.0,
                achieved: value,
                plus_distance: Some(lp_distance(x, &e_m, p)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let target = 2f64.powf(1.0 / p);
    let family = family
        .iter()
        .map(|x| x.iter().map(|(i, c)| (*i, c.re, c.im)).collect::<SparseRecord>())
        .collect();
    Ok(WitnessCertificate {
        schema: SCHEMA.to_string(),
        method: Method::LpFreshBasis,
        target_eps: 2.0 - target,
        target,
        subject: Subject::Sequence {
            p,
            family,
            witness_index: m,
        },
        per_function,
        parameters: Parameters::LpFreshBasis { m },
        dispatch: None,
        seed: None,
    })
}

/// Random unit vector with between 1 and `max_support` Gaussian entries at
/// indices drawn from `0..index_range`.
pub fn random_sparse_unit_vector<R: Rng + ?Sized>(
    rng: &mut R,
    p: f64,
    max_support: usize,
    index_range: u64,
) -> Result<SparseVector> {
    check_p(p)?;
    if max_support == 0 || index_range == 0 {
        return Err(Error::InvalidArgument("support and index range must be positive".into()));
    }
    let size = rng.gen_range(1..=max_support.min(index_range as usize));
    let mut x = SparseVector::new();
    while x.len() < size {
        let i = rng.gen_range(0..index_range);
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        if c.norm() > 0.0 {
            x.insert(i, c);
        }
    }
    let n = norm_p(&x, p);
    x.values_mut().for_each(|c| *c /= n);
    Ok(x)
}
