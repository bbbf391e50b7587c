//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thickness_lab::group::{Character, FiniteAbelianGroup, Subgroup};
use thickness_lab::lemmas::run_lemma_suites;
use thickness_lab::spectra::{lambda_ratio, sidon_lower, Generator, SpectrumWindow};
use thickness_lab::trigpoly::{
    fourier_transform, inverse_fourier_transform, lp_norm, random_unit_polynomial, restrict_bandwidth, Profile,
    TrigPolynomial,
};
use thickness_lab::witness::{
    random_sparse_unit_vector, replay_dispatch, verify, witness_block_basis, witness_general, witness_high_frequency,
    witness_lp, BlockOptions, GeneralOptions, Method, Parameters, Subject, TowerCase, WitnessCertificate,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn coordinate_characters(g: &FiniteAbelianGroup) -> Vec<Character> {
    (0..g.rank())
        .map(|j| {
            let e: Vec<i64> = (0..g.rank()).map(|i| i64::from(i == j)).collect();
            g.character(&e).unwrap()
        })
        .collect()
}

fn whitley_constant() -> Outcome {
    let mut worst: f64 = 0.0;
    for (i, p) in [1.0, 1.5, 2.0, 4.0].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        for _ in 0..20 {
            let n = rng.gen_range(1..=10);
            let fam: Vec<_> = (0..n)
                .map(|_| random_sparse_unit_vector(&mut rng, p, 8, 500).unwrap())
                .collect();
            let cert = witness_lp(&fam, p).map_err(|e| e.to_string())?;
            for b in &cert.per_function {
                worst = worst.max((b.value - 2f64.powf(1.0 / p)).abs());
                worst = worst.max((b.plus_distance.unwrap() - 2f64.powf(1.0 / p)).abs());
            }
            check(verify(&cert).map_err(|e| e.to_string())?.pass, "lp certificate failed verification")?;
        }
    }
    check(worst <= 1e-12, format!("largest deviation {worst:e}"))?;
    Ok(format!("max |d - 2^(1/p)| = {worst:.1e}"))
}

fn rademacher_certificate() -> Result<WitnessCertificate, String> {
    let g: FiniteAbelianGroup = "Z2^12".parse().unwrap();
    let lambda = coordinate_characters(&g);
    let fam: Vec<_> = (0..4)
        .map(|k| random_unit_polynomial(&g, &lambda[..4], 40 + k, Profile::Gaussian).unwrap().0)
        .collect();
    witness_block_basis(&fam, &lambda, 0.1, BlockOptions::default()).map_err(|e| e.to_string())
}

fn rademacher_witness() -> Outcome {
    let cert = rademacher_certificate()?;
    check(cert.method == Method::BlockBasis, "wrong method")?;
    check(cert.min_achieved() >= 1.9, format!("min achieved {}", cert.min_achieved()))?;
    let v = verify(&cert).map_err(|e| e.to_string())?;
    check(v.pass, format!("verify: {:?}", v.problems))?;
    Ok(format!("min achieved {:.6}, verified", cert.min_achieved()))
}

fn high_frequency_certificate() -> Result<WitnessCertificate, String> {
    let g: FiniteAbelianGroup = "T(N=4096,d=256)".parse().unwrap();
    let w = SpectrumWindow::new(&g, Generator::Lacunary { base: 3, count: 8 }).unwrap();
    let family_spectrum = restrict_bandwidth(&g, &w.characters, 8);
    let fam: Vec<_> = (0..3)
        .map(|k| random_unit_polynomial(&g, &family_spectrum, 7 + k, Profile::Gaussian).unwrap().0)
        .collect();
    witness_high_frequency(&fam, &w.characters, 0.05).map_err(|e| e.to_string())
}

fn high_frequency_witness() -> Outcome {
    let cert = high_frequency_certificate()?;
    check(cert.min_achieved() >= 1.95, format!("min achieved {}", cert.min_achieved()))?;
    check(
        cert.per_function.iter().all(|b| b.slack > 0.0),
        "grid-correction slack was not subtracted",
    )?;
    let Parameters::HighFrequency { s, required_s, .. } = cert.parameters else {
        return Err("wrong parameters".into());
    };
    check(verify(&cert).map_err(|e| e.to_string())?.pass, "verification failed")?;
    Ok(format!(
        "s = {s} (need {required_s:.1}), min achieved {:.6}",
        cert.min_achieved()
    ))
}

fn tower_certificate() -> Result<WitnessCertificate, String> {
    let g = FiniteAbelianGroup::cyclic(&[9]).unwrap();
    let f = TrigPolynomial::character(&g, g.character(&[3]).unwrap()).unwrap();
    let lambda = vec![g.character(&[1]).unwrap(), g.character(&[3]).unwrap()];
    witness_general(&[f], &lambda, 1.8, GeneralOptions::default()).map_err(|e| e.to_string())
}

fn tower_case() -> Outcome {
    let cert = tower_certificate()?;
    let d = cert.dispatch.as_ref().ok_or("no dispatch log")?;
    check(d.case == TowerCase::Second, "first case chosen")?;
    let Parameters::Tower { l0, l1, coset_order, .. } = &cert.parameters else {
        return Err("wrong parameters".into());
    };
    check(*l1 > (*l0 * *l0) as u64, "l1 > l0^2 violated")?;
    check(*coset_order == 3, format!("coset order {coset_order}"))?;
    let floor = 2.0 - 1.8 - 3f64.sqrt();
    check(cert.min_achieved() >= floor.max(cert.target), "bound below target")?;
    replay_dispatch(&cert).map_err(|e| e.to_string())?;
    check(verify(&cert).map_err(|e| e.to_string())?.pass, "verification failed")?;
    Ok(format!("l0 = {l0}, l1 = {l1}, coset order 3, achieved {:.6}", cert.min_achieved()))
}

fn lemma_suites() -> Outcome {
    let r = run_lemma_suites(10_000, 1).map_err(|e| e.to_string())?;
    check(r.violations() == 0, format!("{r:?}"))?;
    Ok(r
        .suites
        .iter()
        .map(|s| format!("{} 0/{} ({} with hypothesis)", s.name, s.trials, s.hypothesis_met))
        .collect::<Vec<_>>()
        .join(", "))
}

fn random_group(rng: &mut ChaCha8Rng, max_order: u64) -> FiniteAbelianGroup {
    loop {
        let rank = rng.gen_range(1..=4);
        let orders: Vec<u64> = (0..rank).map(|_| rng.gen_range(2..=64)).collect();
        if orders.iter().product::<u64>() <= max_order {
            return FiniteAbelianGroup::cyclic(&orders).unwrap();
        }
    }
}

fn harmonic_analysis() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let g = random_group(&mut rng, 1 << 16);
        let terms: Vec<_> = (0..rng.gen_range(1..40))
            .map(|_| {
                let x = g.element_at(rng.gen_range(0..g.order() as usize));
                (Character(x.0), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            })
            .collect();
        let f = TrigPolynomial::new(&g, terms).unwrap();
        let table = inverse_fourier_transform(&f).unwrap();
        let back = fourier_transform(&g, &table).unwrap();
        for (k, c) in f.coefficients() {
            worst = worst.max((back.coefficient(k) - c).norm());
        }
        for (k, c) in back.coefficients() {
            worst = worst.max((f.coefficient(k) - c).norm());
        }
        let l2 = lp_norm(&f, 2.0).unwrap().lo.powi(2);
        let parseval: f64 = f.coefficients().values().map(|c| c.norm_sqr()).sum();
        worst = worst.max((l2 - parseval).abs());
    }
    check(worst <= 1e-9, format!("round-trip/Parseval error {worst:e}"))?;
    for _ in 0..100 {
        let g = random_group(&mut rng, 10_000);
        let gens: Vec<Vec<u64>> = (0..rng.gen_range(0..4))
            .map(|_| g.element_at(rng.gen_range(0..g.order() as usize)).0)
            .collect();
        let h = Subgroup::generated(&g, &gens).unwrap();
        let ann = h.annihilator();
        check(ann.annihilator() == h, format!("H^⊥⊥ ≠ H in {g}"))?;
        check(h.order() * ann.order() == g.order(), format!("|H||H^⊥| ≠ |G| in {g}"))?;
    }
    Ok(format!("max round-trip/Parseval error {worst:.1e}; 100 subgroups dual"))
}

/// Values from the first verified run, frozen as regression oracles.
const SIDON_8: f64 = 2.194_768_557_464_474_4;
const SIDON_64: f64 = 5.681_827_839_718_486;
const RATIO_CURVE: [f64; 3] = [2.546_183_159_801_193, 5.698_153_901_047_988, 14.732_121_841_154_271];

fn spectra_growth() -> Outcome {
    let z512 = FiniteAbelianGroup::cyclic(&[512]).unwrap();
    let interval = |g: &FiniteAbelianGroup, a, b| SpectrumWindow::new(g, Generator::Interval { a, b }).unwrap();
    let s8 = sidon_lower(&interval(&z512, 1, 8), 64, 9).map_err(|e| e.to_string())?.value;
    let s64 = sidon_lower(&interval(&z512, 1, 64), 64, 9).map_err(|e| e.to_string())?.value;
    check(s64 / s8 >= 2.0, format!("Sidon growth {s8} → {s64}"))?;

    let z4096 = FiniteAbelianGroup::cyclic(&[4096]).unwrap();
    let curve: Vec<f64> = [16, 64, 256]
        .iter()
        .map(|&n| lambda_ratio(&interval(&z4096, 0, n), 0.5, 1.0, 16, 3).map(|e| e.value))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    check(curve.windows(2).all(|w| w[1] > w[0]), format!("ratio curve {curve:?}"))?;

    let big = FiniteAbelianGroup::cyclic(&[1 << 15]).unwrap();
    let plateau: Vec<f64> = (5..=8)
        .map(|k| {
            let w = SpectrumWindow::new(&big, Generator::Lacunary { base: 3, count: k + 1 }).unwrap();
            lambda_ratio(&w, 1.0, 2.0, 64, 5).map(|e| e.value)
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let (lo, hi) = plateau
        .iter()
        .fold((f64::INFINITY, 0f64), |(a, b), &v| (a.min(v), b.max(v)));
    check(hi / lo < 1.1, format!("lacunary plateau {plateau:?}"))?;

    let fixtures = [(s8, SIDON_8), (s64, SIDON_64)]
        .into_iter()
        .chain(curve.iter().copied().zip(RATIO_CURVE));
    for (got, want) in fixtures {
        check((got - want).abs() <= 1e-9 * want, format!("fixture drift: {got} vs {want}"))?;
    }
    Ok(format!(
        "sidon {s8:.3} → {s64:.3}; ratio {:.3} < {:.3} < {:.3}; plateau spread {:.1}%",
        curve[0],
        curve[1],
        curve[2],
        100.0 * (hi / lo - 1.0)
    ))
}

fn mutations_fail(cert: &WitnessCertificate) -> Result<usize, String> {
    let mut count = 0;
    for k in 0..cert.per_function.len() {
        let mut m = cert.clone();
        m.per_function[k].achieved += 0.1;
        check(!verify(&m).map_err(|e| e.to_string())?.pass, format!("bound {k} mutation passed"))?;
        count += 1;
    }
    if let Subject::Continuous { witness, .. } = &cert.subject {
        for t in 0..witness.terms.len() {
            for delta in [(0.05, 0.0), (0.0, -0.05)] {
                let mut m = cert.clone();
                if let Subject::Continuous { witness, .. } = &mut m.subject {
                    witness.terms[t].1 += delta.0;
                    witness.terms[t].2 += delta.1;
                }
                let pass = verify(&m).map(|r| r.pass).unwrap_or(false);
                check(!pass, format!("coefficient {t} mutation passed"))?;
                count += 1;
            }
        }
    }
    Ok(count)
}

fn certificate_audit() -> Outcome {
    let mut total = 0;
    for cert in [rademacher_certificate()?, high_frequency_certificate()?, tower_certificate()?] {
        check(verify(&cert).map_err(|e| e.to_string())?.pass, "unmutated certificate failed")?;
        total += mutations_fail(&cert)?;
    }
    Ok(format!("{total} mutations rejected"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("whitley constant", whitley_constant, Duration::from_secs(1)),
        ("rademacher witness", rademacher_witness, Duration::from_secs(60)),
        ("high-frequency witness", high_frequency_witness, Duration::from_secs(60)),
        ("tower case", tower_case, Duration::from_secs(1)),
        ("lemma suites", lemma_suites, Duration::from_secs(30)),
        ("harmonic analysis", harmonic_analysis, Duration::from_secs(60)),
        ("spectra growth", spectra_growth, Duration::from_secs(300)),
        ("certificate audit", certificate_audit, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if took <= *budget {
                Ok(d)
            } else {
                Err(format!("{d}; took {took:?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(d) => println!("acceptance {} PASS {name} [{} ms] {d}", i + 1, took.as_millis()),
            Err(d) => {
                failed += 1;
                println!("acceptance {} FAIL {name} [{} ms] {d}", i + 1, took.as_millis());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
