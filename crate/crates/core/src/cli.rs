//! Batch command-line front end: every command is also expressible as a
//! JSON config for `run --config`.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::group::{Character, FiniteAbelianGroup};
use crate::lemmas::{run_lemma_suites, LemmaReport};
use crate::spectra::{growth_curve, lacunarity, Estimator, Generator, GrowthCurve, SpectrumWindow};
use crate::trigpoly::{random_unit_polynomial, Profile, TrigPolynomial};
use crate::witness::{
    thickness_lower_bound, verify, witness_block_basis, witness_fresh_coordinate, witness_general,
    witness_high_frequency, BlockOptions, FamilySpec, GeneralOptions, SpaceSpec, Strategy, ThicknessConfig,
    ThicknessReport, VerifyReport, WitnessCertificate,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TARGET_MISSED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "THICKNESS_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "thickness-lab", version, about = "Witness certificates for thickness 2 of spaces of trigonometric polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Build one witness certificate for a random family.
    Witness(WitnessArgs),
    /// Run witness constructions over many seeded trials.
    Thickness(ThicknessArgs),
    /// Sidon and Λ(p)-type growth curves over spectrum windows.
    Spectra(SpectraArgs),
    /// Randomized suites for the disc lemmas.
    Lemmas(LemmasArgs),
    /// Recompute every bound of a stored certificate or report.
    Verify(VerifyArgs),
    /// Execute a JSON experiment config.
    #[serde(skip)]
    Run(RunArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct WitnessArgs {
    /// Group spec, e.g. "Z2^12" or "T(N=4096,d=256) x Z3".
    #[arg(long)]
    pub group: String,
    /// Spectrum Λ: rademacher, all, interval:A..B, lacunary:BASE,COUNT,
    /// random:SIZE or list:E1;E2 with comma-separated exponents.
    #[arg(long)]
    pub lambda: String,
    /// Spectrum of the family: a Λ spec or prefix:K. Defaults to the
    /// first third of Λ.
    #[arg(long)]
    #[serde(default)]
    pub family_spectrum: Option<String>,
    /// flat, gaussian or sparse:K.
    #[arg(long, default_value = "gaussian")]
    #[serde(default = "default_profile")]
    pub profile: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub seed: u64,
    /// auto, high-frequency, fresh-coordinate or block-basis.
    #[arg(long, default_value = "auto")]
    #[serde(default = "default_method")]
    pub method: String,
    #[arg(long)]
    #[serde(default)]
    pub block_width: Option<usize>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ThicknessArgs {
    /// lp or continuous.
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    #[serde(default)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 10)]
    #[serde(default = "default_max_support")]
    pub max_support: usize,
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_index_range")]
    pub index_range: u64,
    #[arg(long)]
    #[serde(default)]
    pub group: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub lambda: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub family_spectrum: Option<String>,
    #[arg(long, default_value = "gaussian")]
    #[serde(default = "default_profile")]
    pub profile: String,
    #[arg(long, default_value = "auto")]
    #[serde(default = "default_method")]
    pub method: String,
    #[arg(long)]
    #[serde(default)]
    pub block_width: Option<usize>,
    #[arg(long, default_value_t = 4)]
    #[serde(default = "default_n")]
    pub n: usize,
    /// Required for continuous spaces.
    #[arg(long)]
    #[serde(default)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SpectraArgs {
    #[arg(long)]
    pub group: String,
    /// One window per occurrence, in increasing size.
    #[arg(long = "lambda", required = true)]
    pub lambda: Vec<String>,
    /// sidon or ratio.
    #[arg(long, default_value = "ratio")]
    #[serde(default = "default_estimator")]
    pub estimator: String,
    #[arg(long, default_value_t = 0.5)]
    #[serde(default = "default_r")]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_p")]
    pub p: f64,
    #[arg(long, default_value_t = 64)]
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Growth curve as CSV.
    #[arg(long)]
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LemmasArgs {
    #[arg(long, default_value_t = 10_000)]
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// A certificate, a thickness report or a run report.
    pub file: PathBuf,
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

fn default_profile() -> String {
    "gaussian".into()
}
fn default_method() -> String {
    "auto".into()
}
fn default_estimator() -> String {
    "ratio".into()
}
fn default_max_support() -> usize {
    10
}
fn default_index_range() -> u64 {
    1000
}
fn default_n() -> usize {
    4
}
fn default_r() -> f64 {
    0.5
}
fn default_p() -> f64 {
    1.0
}
fn default_budget() -> usize {
    64
}
fn default_trials() -> usize {
    10_000
}

/// Invalid input: bad flags, unparsable configs or specs.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Library errors caused by the inputs rather than by a failed construction.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidGroup(_)
            | Error::GroupParse { .. }
            | Error::ShapeMismatch { .. }
            | Error::Aliasing { .. }
            | Error::Bandwidth { .. }
            | Error::EmptySpectrum
            | Error::InvalidArgument(_)
            | Error::EnumerationBudget { .. }
    )
}

fn lib(e: Error) -> anyhow::Error {
    if is_input_error(&e) {
        config_err(e.to_string())
    } else {
        e.into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    TargetMissed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Witness {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certificate: Option<WitnessCertificate>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Thickness(ThicknessReport),
    Spectra {
        windows: Vec<SpectrumWindow>,
        curve: GrowthCurve,
        /// Per window, when its labels allow it.
        lacunarity: Vec<Option<f64>>,
    },
    Lemmas(LemmaReport),
    Verify {
        file: PathBuf,
        reports: Vec<VerifyReport>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: Command,
    pub wall_time_ms: u64,
    pub status: Status,
    pub result: Outcome,
    /// Re-verification of every embedded certificate.
    pub verification: Vec<VerifyReport>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => EXIT_OK,
            Status::TargetMissed => EXIT_TARGET_MISSED,
        }
    }

    /// One line for the terminal.
    pub fn summary(&self) -> String {
        let detail = match &self.result {
            Outcome::Witness { certificate: Some(c), .. } => {
                format!("{} witness, min achieved {:.6} (target {:.6})", c.method, c.min_achieved(), c.target)
            }
            Outcome::Witness { error: Some(e), .. } => format!("no witness: {e}"),
            Outcome::Witness { .. } => String::new(),
            Outcome::Thickness(r) => format!(
                "{} trials, {} failed, min achieved {}",
                r.trials,
                r.failures,
                r.min_achieved.map_or("n/a".into(), |v| format!("{v:.6}"))
            ),
            Outcome::Spectra { curve, .. } => curve
                .points
                .iter()
                .map(|p| format!("N={} ratio={:.6}", p.window, p.ratio))
                .collect::<Vec<_>>()
                .join(", "),
            Outcome::Lemmas(r) => r
                .suites
                .iter()
                .map(|s| format!("{}: {}/{} violations", s.name, s.violations, s.trials))
                .collect::<Vec<_>>()
                .join(", "),
            Outcome::Verify { reports, .. } => format!(
                "{}/{} certificates pass",
                reports.iter().filter(|r| r.pass).count(),
                reports.len()
            ),
        };
        format!("{:?}: {detail}", self.status)
    }
}

/// Parses a Λ spec against a group.
pub fn parse_window(group: &FiniteAbelianGroup, spec: &str, seed: u64) -> anyhow::Result<SpectrumWindow> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let bad = |what: &str| config_err(format!("cannot parse spectrum spec {spec:?}: {what}"));
    let int = |s: &str| s.trim().parse::<i64>().map_err(|_| bad(&format!("{s:?} is not an integer")));
    let generator = match kind.trim() {
        "rademacher" | "coordinates" => Generator::Explicit {
            characters: (0..group.rank())
                .map(|j| (0..group.rank()).map(|i| i64::from(i == j)).collect())
                .collect(),
        },
        "all" => {
            let n = group.ensure_enumerable().map_err(lib)?;
            let mut chars = Vec::new();
            for i in 0..n {
                let e: Vec<i64> = group
                    .element_at(i)
                    .0
                    .iter()
                    .zip(group.factors())
                    .map(|(&a, f)| f.symmetric(a))
                    .collect();
                let chi = group.character(&e).map_err(lib)?;
                if TrigPolynomial::character(group, chi).is_ok() {
                    chars.push(e);
                }
            }
            Generator::Explicit { characters: chars }
        }
        "interval" => {
            let (a, b) = arg.split_once("..").ok_or_else(|| bad("expected A..B"))?;
            Generator::Interval { a: int(a)?, b: int(b)? }
        }
        "lacunary" => {
            let (b, c) = arg.split_once(',').ok_or_else(|| bad("expected BASE,COUNT"))?;
            Generator::Lacunary {
                base: int(b)?.try_into().map_err(|_| bad("negative base"))?,
                count: int(c)?.try_into().map_err(|_| bad("bad count"))?,
            }
        }
        "random" => Generator::Random {
            size: int(arg)?.try_into().map_err(|_| bad("negative size"))?,
            seed,
        },
        "list" => Generator::Explicit {
            characters: arg
                .split(';')
                .map(|e| e.split(',').map(int).collect::<anyhow::Result<Vec<_>>>())
                .collect::<anyhow::Result<_>>()?,
        },
        other => return Err(bad(&format!("unknown kind {other:?}"))),
    };
    let w = SpectrumWindow::new(group, generator).map_err(lib)?;
    if w.is_empty() {
        return Err(config_err(format!("spectrum spec {spec:?} realizes no characters")));
    }
    Ok(w)
}

fn parse_profile(s: &str) -> anyhow::Result<Profile> {
    match s.split_once(':') {
        None if s == "flat" => Ok(Profile::Flat),
        None if s == "gaussian" => Ok(Profile::Gaussian),
        Some(("sparse", k)) => k
            .parse()
            .map(Profile::Sparse)
            .map_err(|_| config_err(format!("bad sparse term count {k:?}"))),
        _ => Err(config_err(format!("unknown profile {s:?}; use flat, gaussian or sparse:K"))),
    }
}

fn parse_strategy(s: &str, block_width: Option<usize>) -> anyhow::Result<Strategy> {
    Ok(match s {
        "auto" | "tower" => Strategy::Auto,
        "high-frequency" => Strategy::HighFrequency,
        "fresh-coordinate" => Strategy::FreshCoordinate,
        "block-basis" => Strategy::BlockBasis { block_width },
        _ => return Err(config_err(format!("unknown method {s:?}"))),
    })
}

fn family_spectrum(
    group: &FiniteAbelianGroup,
    lambda: &[Character],
    spec: Option<&str>,
    seed: u64,
) -> anyhow::Result<Vec<Character>> {
    let k = match spec {
        None => lambda.len().div_ceil(3),
        Some(s) => match s.strip_prefix("prefix:") {
            Some(k) => k.parse().map_err(|_| config_err(format!("bad prefix length {k:?}")))?,
            None => return Ok(parse_window(group, s, seed)?.characters),
        },
    };
    if k == 0 || k > lambda.len() {
        return Err(config_err(format!("family prefix {k} must lie in 1..={}", lambda.len())));
    }
    Ok(lambda[..k].to_vec())
}

fn check_eps(eps: f64) -> anyhow::Result<()> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(config_err(format!("ε = {eps} must lie in (0, 2]")));
    }
    Ok(())
}

fn exponents(group: &FiniteAbelianGroup, chars: &[Character]) -> Vec<Vec<i64>> {
    chars
        .iter()
        .map(|c| c.0.iter().zip(group.factors()).map(|(&a, f)| f.symmetric(a)).collect())
        .collect()
}

fn run_witness(a: &WitnessArgs) -> anyhow::Result<(Outcome, Vec<VerifyReport>, Status)> {
    check_eps(a.eps)?;
    if a.n == 0 {
        return Err(config_err("the family size n must be positive"));
    }
    let group: FiniteAbelianGroup = a.group.parse().map_err(lib)?;
    let lambda = parse_window(&group, &a.lambda, a.seed)?.characters;
    let fam_spec = family_spectrum(&group, &lambda, a.family_spectrum.as_deref(), a.seed)?;
    let profile = parse_profile(&a.profile)?;
    let strategy = parse_strategy(&a.method, a.block_width)?;
    let family = (0..a.n as u64)
        .map(|k| random_unit_polynomial(&group, &fam_spec, a.seed.wrapping_add(k), profile).map(|(f, _)| f))
        .collect::<Result<Vec<_>, _>>()
        .map_err(lib)?;
    let result = match strategy {
        Strategy::Auto => witness_general(
            &family,
            &lambda,
            a.eps,
            GeneralOptions {
                block: BlockOptions {
                    block_width: a.block_width,
                },
                ..GeneralOptions::default()
            },
        ),
        Strategy::HighFrequency => witness_high_frequency(&family, &lambda, a.eps),
        Strategy::FreshCoordinate => witness_fresh_coordinate(&family, &lambda, a.eps),
        Strategy::BlockBasis { block_width } => witness_block_basis(&family, &lambda, a.eps, BlockOptions { block_width }),
    };
    match result {
        Ok(mut cert) => {
            cert.seed = Some(a.seed);
            let v = verify(&cert)?;
            let status = if cert.meets_target() && v.pass {
                Status::Ok
            } else {
                Status::TargetMissed
            };
            Ok((
                Outcome::Witness {
                    certificate: Some(cert),
                    error: None,
                },
                vec![v],
                status,
            ))
        }
        Err(e) if is_input_error(&e) => Err(config_err(e.to_string())),
        Err(e) => Ok((
            Outcome::Witness {
                certificate: None,
                error: Some(e.to_string()),
            },
            Vec::new(),
            Status::TargetMissed,
        )),
    }
}

fn run_thickness(a: &ThicknessArgs) -> anyhow::Result<(Outcome, Vec<VerifyReport>, Status)> {
    let space = match a.space.as_str() {
        "lp" => SpaceSpec::Lp {
            p: a.p.ok_or_else(|| config_err("--p is required for the lp space"))?,
            max_support: a.max_support,
            index_range: a.index_range,
        },
        "continuous" => {
            let g = a.group.as_deref().ok_or_else(|| config_err("--group is required"))?;
            let l = a.lambda.as_deref().ok_or_else(|| config_err("--lambda is required"))?;
            check_eps(a.eps.ok_or_else(|| config_err("--eps is required for continuous spaces"))?)?;
            let group: FiniteAbelianGroup = g.parse().map_err(lib)?;
            let lambda = parse_window(&group, l, a.seed)?.characters;
            let fam = family_spectrum(&group, &lambda, a.family_spectrum.as_deref(), a.seed)?;
            SpaceSpec::Continuous {
                group: group.to_string(),
                lambda: exponents(&group, &lambda),
                family: FamilySpec {
                    spectrum: Some(exponents(&group, &fam)),
                    profile: parse_profile(&a.profile)?,
                },
                strategy: parse_strategy(&a.method, a.block_width)?,
            }
        }
        s => return Err(config_err(format!("unknown space {s:?}; use lp or continuous"))),
    };
    let cfg = ThicknessConfig {
        space,
        n: a.n,
        eps: a.eps.unwrap_or(0.0),
        trials: a.trials,
        seed: a.seed,
    };
    let report = thickness_lower_bound(&cfg).map_err(lib)?;
    let verification = report
        .outcomes
        .iter()
        .filter_map(|o| o.certificate.as_ref())
        .map(verify)
        .collect::<Result<Vec<_>, _>>()?;
    let produced = report.trials - report.failures;
    let missed = report
        .outcomes
        .iter()
        .filter_map(|o| o.certificate.as_ref())
        .any(|c| !c.meets_target())
        || verification.iter().any(|v| !v.pass);
    let status = if produced == 0 || missed {
        Status::TargetMissed
    } else {
        Status::Ok
    };
    Ok((Outcome::Thickness(report), verification, status))
}

fn run_spectra(a: &SpectraArgs) -> anyhow::Result<(Outcome, Vec<VerifyReport>, Status)> {
    let group: FiniteAbelianGroup = a.group.parse().map_err(lib)?;
    let windows = a
        .lambda
        .iter()
        .map(|s| parse_window(&group, s, a.seed))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let estimator = match a.estimator.as_str() {
        "sidon" => Estimator::Sidon,
        "ratio" => Estimator::LambdaRatio { r: a.r, p: a.p },
        s => return Err(config_err(format!("unknown estimator {s:?}; use sidon or ratio"))),
    };
    if a.budget == 0 {
        return Err(config_err("the budget must be positive"));
    }
    let curve = growth_curve(&windows, estimator, a.budget, a.seed).map_err(lib)?;
    if let Some(path) = &a.csv {
        write_atomic(path, curve.to_csv().as_bytes())?;
    }
    let lac = windows.iter().map(|w| lacunarity(w).ok()).collect();
    Ok((
        Outcome::Spectra {
            windows,
            curve,
            lacunarity: lac,
        },
        Vec::new(),
        Status::Ok,
    ))
}

fn run_lemmas(a: &LemmasArgs) -> anyhow::Result<(Outcome, Vec<VerifyReport>, Status)> {
    let r = run_lemma_suites(a.trials, a.seed).map_err(lib)?;
    let status = if r.violations() == 0 {
        Status::Ok
    } else {
        Status::TargetMissed
    };
    Ok((Outcome::Lemmas(r), Vec::new(), status))
}

/// Certificates embedded in a stored JSON document of any supported kind.
fn embedded_certificates(text: &str) -> anyhow::Result<Vec<WitnessCertificate>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))?;
    if value.get("schema").is_some() {
        return Ok(vec![serde_json::from_value(value)?]);
    }
    let outcome = value.get("result").unwrap_or(&value);
    let mut out = Vec::new();
    if let Some(c) = outcome.get("certificate") {
        out.push(serde_json::from_value(c.clone())?);
    }
    if let Some(trials) = outcome.get("outcomes").and_then(|o| o.as_array()) {
        for t in trials {
            if let Some(c) = t.get("certificate") {
                out.push(serde_json::from_value(c.clone())?);
            }
        }
    }
    if out.is_empty() {
        return Err(config_err("no certificate found in the document"));
    }
    Ok(out)
}

fn run_verify(a: &VerifyArgs) -> anyhow::Result<(Outcome, Vec<VerifyReport>, Status)> {
    let text = fs::read_to_string(&a.file).map_err(|e| config_err(format!("cannot read {}: {e}", a.file.display())))?;
    let certs = embedded_certificates(&text)?;
    let reports = certs
        .iter()
        .map(|c| verify(c).map_err(|e| config_err(e.to_string())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let status = if reports.iter().all(|r| r.pass) {
        Status::Ok
    } else {
        Status::TargetMissed
    };
    Ok((
        Outcome::Verify {
            file: a.file.clone(),
            reports,
        },
        Vec::new(),
        status,
    ))
}

/// Parses a JSON experiment config, reporting the position of any error.
pub fn parse_config(text: &str) -> anyhow::Result<Command> {
    serde_json::from_str(text).map_err(|e| config_err(format!("config error: {e}")))
}

/// Executes a command and assembles its report. Output files are not
/// written here.
pub fn run(command: &Command) -> anyhow::Result<RunReport> {
    let started = Instant::now();
    let (config, (result, verification, status)) = match command {
        Command::Run(r) => {
            let text = fs::read_to_string(&r.config)
                .map_err(|e| config_err(format!("cannot read config {}: {e}", r.config.display())))?;
            let inner = parse_config(&text)?;
            if let Command::Run(_) = inner {
                return Err(config_err("a config cannot run another config"));
            }
            return run(&inner).map(|mut rep| {
                rep.wall_time_ms = started.elapsed().as_millis() as u64;
                rep
            });
        }
        Command::Witness(a) => (command.clone(), run_witness(a)?),
        Command::Thickness(a) => (command.clone(), run_thickness(a)?),
        Command::Spectra(a) => (command.clone(), run_spectra(a)?),
        Command::Lemmas(a) => (command.clone(), run_lemmas(a)?),
        Command::Verify(a) => (command.clone(), run_verify(a)?),
    };
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        wall_time_ms: started.elapsed().as_millis() as u64,
        status,
        result,
        verification,
    })
}

fn output_path(command: &Command) -> Option<&Path> {
    match command {
        Command::Witness(a) => a.out.as_deref(),
        Command::Thickness(a) => a.out.as_deref(),
        Command::Spectra(a) => a.out.as_deref(),
        Command::Lemmas(a) => a.out.as_deref(),
        Command::Verify(a) => a.out.as_deref(),
        Command::Run(_) => None,
    }
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .ok_or_else(|| config_err(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| config_err(format!("{THREADS_VAR}={v:?} must be a positive integer")))?;
        // a pool built earlier in the process already caps the threads
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn exit_code_for(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<ConfigError>().is_some() {
        EXIT_CONFIG
    } else {
        EXIT_INTERNAL
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = configure_threads().and_then(|()| {
        let report = run(&cli.command)?;
        let json = serde_json::to_string_pretty(&report)?;
        let out = match &cli.command {
            Command::Run(_) => output_path(&report.config),
            c => output_path(c),
        };
        match out {
            Some(path) => write_atomic(path, json.as_bytes())?,
            None => println!("{json}"),
        }
        eprintln!("{}", report.summary());
        Ok(report.exit_code())
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code_for(&e)
        }
    }
}
