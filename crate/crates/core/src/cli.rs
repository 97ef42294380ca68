//! Command-line front end: JSON run configurations, one subcommand per
//! operation family, deterministic JSON/CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::asymptotics::AsymptoticClass;
use crate::error::{Error, Result};
use crate::ideals::{
    check_quasinorm_axioms, ideal_preconditions, quasi_norm, snumbers_from_section,
    stype_membership, AxiomConfig, SNumberSequence,
};
use crate::numeric::TriState;
use crate::operator::{build_section, classify_boundedness_with, DEFAULT_CLASSIFY_N_MAX};
use crate::products::{alpha, ratio_band_with_exponent, BandConfig, BandVerdict};
use crate::sequences::{estimate_chi, SequenceConfig, SequenceSpec};
use crate::spectrum::{
    spectrum_grid, verify_resolvent, GridSpec, SpectralConfig, SpectralContext, SpectralPoint,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "TERRASPEC_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "terraspec",
    version,
    about = "Spectral numerics for the Rhaly operator on weighted c_0 spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundedness, compactness and norm between c_0(r) and c_0(s).
    Classify(CommonArgs),
    /// Label every node of a complex grid (CSV).
    SpectrumMap(CommonArgs),
    /// Classify the listed lambda values with full evidence.
    PointTest(CommonArgs),
    /// Residual check of the explicit resolvent section.
    ResolventVerify(CommonArgs),
    /// Bounded-band check of the product asymptotics.
    ProductBand(CommonArgs),
    /// Quasi-norm, s-type membership and ideal preconditions.
    IdealQnorm(CommonArgs),
    /// Seeded random trials of the quasi-norm axioms.
    IdealAxioms(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::SpectrumMap(_) => "spectrum-map",
            Command::PointTest(_) => "point-test",
            Command::ResolventVerify(_) => "resolvent-verify",
            Command::ProductBand(_) => "product-band",
            Command::IdealQnorm(_) => "ideal-qnorm",
            Command::IdealAxioms(_) => "ideal-axioms",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Classify(a)
            | Command::SpectrumMap(a)
            | Command::PointTest(a)
            | Command::ResolventVerify(a)
            | Command::ProductBand(a)
            | Command::IdealQnorm(a)
            | Command::IdealAxioms(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid and trial workloads.
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn unit_weight() -> SequenceConfig {
    SequenceConfig {
        family: "constant".into(),
        params: crate::sequences::SequenceParams {
            value: Some(1.0),
            ..Default::default()
        },
        asym: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub re: (f64, f64),
    pub im: (f64, f64),
    /// Nodes per axis `(re, im)`.
    pub resolution: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandBlock {
    #[serde(default = "default_band_range")]
    pub n_range: (usize, usize),
    #[serde(default = "default_slope_tol")]
    pub slope_tol: f64,
    #[serde(default = "default_band_ratio")]
    pub band_ratio: f64,
    /// Added to `alpha chi`; nonzero values probe that drift is detected.
    #[serde(default)]
    pub exponent_offset: f64,
    #[serde(default = "default_expect")]
    pub expect: BandVerdict,
}

fn default_band_range() -> (usize, usize) {
    (1 << 7, 1 << 15)
}
fn default_slope_tol() -> f64 {
    BandConfig::default().slope_tol
}
fn default_band_ratio() -> f64 {
    BandConfig::default().band_ratio
}
fn default_expect() -> BandVerdict {
    BandVerdict::BoundedBand
}

impl Default for BandBlock {
    fn default() -> Self {
        Self {
            n_range: default_band_range(),
            slope_tol: default_slope_tol(),
            band_ratio: default_band_ratio(),
            exponent_offset: 0.0,
            expect: default_expect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SNumbersBlock {
    /// Explicit s-numbers, largest first.
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub asym: Option<AsymptoticClass>,
    /// Take singular values of the weighted `section x section` block of `R_a` instead.
    #[serde(default)]
    pub section: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomBlock {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
}

fn default_trials() -> usize {
    200
}
fn default_dim() -> usize {
    8
}

/// One JSON configuration shared by all subcommands; each reads the blocks it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub a: SequenceConfig,
    #[serde(default = "unit_weight")]
    pub r: SequenceConfig,
    #[serde(default = "unit_weight")]
    pub s: SequenceConfig,
    /// `lim n a_n`; estimated from `chi_window` when absent.
    #[serde(default)]
    pub chi: Option<f64>,
    #[serde(default = "default_chi_window")]
    pub chi_window: (usize, usize),
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// `[re, im]` pairs.
    #[serde(default)]
    pub lambdas: Vec<(f64, f64)>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    /// Section dimension for resolvent checks.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub band: Option<BandBlock>,
    #[serde(default)]
    pub snumbers: Option<SNumbersBlock>,
    #[serde(default)]
    pub axioms: Option<AxiomBlock>,
    #[serde(default)]
    pub spectral: SpectralConfig,
}

fn default_chi_window() -> (usize, usize) {
    (1 << 10, 1 << 16)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for seq in [&self.a, &self.r, &self.s] {
            SequenceSpec::from_config(seq)?;
        }
        if self.n_max == Some(0) || self.n == Some(0) {
            return Err(Error::InvalidInput("n_max and n must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if t.is_nan() || t <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "tol must be positive, got {t}"
                )));
            }
        }
        if let Some(c) = self.chi {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "chi must be positive, got {c}"
                )));
            }
        }
        if let Some(b) = &self.band {
            if !(b.slope_tol > 0.0 && b.band_ratio > 1.0) {
                return Err(Error::InvalidInput(
                    "band tolerances must be positive".into(),
                ));
            }
        }
        let sp = &self.spectral;
        if !(sp.snap_tol > 0.0 && sp.boundary_tol > 0.0 && sp.min_verify_distance > 0.0) {
            return Err(Error::InvalidInput(
                "spectral tolerances must be positive".into(),
            ));
        }
        Ok(())
    }

    fn sequences(&self) -> Result<(SequenceSpec, SequenceSpec, SequenceSpec)> {
        Ok((
            SequenceSpec::from_config(&self.a)?,
            SequenceSpec::from_config(&self.r)?,
            SequenceSpec::from_config(&self.s)?,
        ))
    }

    fn chi(&self, a: &SequenceSpec) -> Result<(f64, Value)> {
        match self.chi {
            Some(c) => Ok((c, json!({"chi": c, "method": "configured"}))),
            None => {
                let est = estimate_chi(a, self.chi_window)?;
                Ok((est.chi, serde_json::to_value(est).expect("serializable")))
            }
        }
    }

    fn lambdas(&self) -> Result<Vec<Complex64>> {
        if self.lambdas.is_empty() {
            return Err(Error::InvalidInput(
                "`lambdas` must list at least one [re, im] pair".into(),
            ));
        }
        Ok(self
            .lambdas
            .iter()
            .map(|(re, im)| Complex64::new(*re, *im))
            .collect())
    }
}

/// Rendered output of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub exit_code: i32,
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn status_name(code: i32) -> &'static str {
    match code {
        EXIT_PASS => "pass",
        EXIT_INCONCLUSIVE => "inconclusive",
        _ => "fail",
    }
}

struct Header {
    command: &'static str,
    digest: String,
    seed: u64,
}

fn envelope(h: &Header, exit_code: i32, result: Value) -> Outcome {
    let doc = json!({
        "tool": "terraspec",
        "version": env!("CARGO_PKG_VERSION"),
        "command": h.command,
        "config_sha256": h.digest,
        "seed": h.seed,
        "status": status_name(exit_code),
        "result": result,
    });
    let mut body = serde_json::to_string_pretty(&doc).expect("serializable");
    body.push('\n');
    Outcome { body, exit_code }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn worst(codes: impl IntoIterator<Item = i32>) -> i32 {
    codes.into_iter().fold(EXIT_PASS, |acc, c| match (acc, c) {
        (EXIT_ASSERTION, _) | (_, EXIT_ASSERTION) => EXIT_ASSERTION,
        (EXIT_INCONCLUSIVE, _) | (_, EXIT_INCONCLUSIVE) => EXIT_INCONCLUSIVE,
        _ => EXIT_PASS,
    })
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

/// CSV rows `re,im,label,alpha,alpha_chi,dist_to_S,a1,a2` after `#` comment lines.
pub fn grid_csv(points: &[SpectralPoint], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("re,im,label,alpha,alpha_chi,dist_to_S,a1,a2\n");
    for p in points {
        let e = &p.evidence;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f(p.lambda.re),
            fmt_f(p.lambda.im),
            p.label.as_str(),
            fmt_opt(e.alpha),
            fmt_opt(e.alpha_chi),
            fmt_f(e.dist_to_s),
            e.a1.as_str(),
            e.a2.as_str()
        );
    }
    out
}

fn run_command(name: &'static str, cfg: &RunConfig, h: &Header) -> Result<Outcome> {
    let (a, r, s) = cfg.sequences()?;
    match name {
        "classify" => {
            let rep =
                classify_boundedness_with(&a, &r, &s, cfg.n_max.unwrap_or(DEFAULT_CLASSIFY_N_MAX))?;
            let code =
                if rep.bounded == TriState::Inconclusive || rep.compact == TriState::Inconclusive {
                    EXIT_INCONCLUSIVE
                } else {
                    EXIT_PASS
                };
            Ok(envelope(h, code, to_value(&rep)))
        }
        "spectrum-map" => {
            let grid = cfg
                .grid
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("spectrum-map needs a `grid` block".into()))?;
            let (chi, _) = cfg.chi(&a)?;
            let spec = GridSpec {
                re_range: grid.re,
                im_range: grid.im,
                resolution: grid.resolution,
            };
            let points = spectrum_grid(&a, &s, chi, &spec, cfg.spectral)?;
            let comments = vec![
                format!("tool terraspec {}", env!("CARGO_PKG_VERSION")),
                format!("command {}", h.command),
                format!("config_sha256 {}", h.digest),
                format!("seed {}", h.seed),
                format!("chi {}", fmt_f(chi)),
            ];
            Ok(Outcome {
                body: grid_csv(&points, &comments),
                exit_code: EXIT_PASS,
            })
        }
        "point-test" => {
            let (chi, chi_info) = cfg.chi(&a)?;
            let ctx = SpectralContext::new(&a, &s, chi, cfg.spectral)?;
            let points = cfg
                .lambdas()?
                .into_iter()
                .map(|l| ctx.classify(l))
                .collect::<Result<Vec<_>>>()?;
            let code = worst(points.iter().map(|p| {
                if p.evidence.a1 == TriState::Inconclusive
                    || p.evidence.a2 == TriState::Inconclusive
                {
                    EXIT_INCONCLUSIVE
                } else {
                    EXIT_PASS
                }
            }));
            Ok(envelope(
                h,
                code,
                json!({"chi": chi_info, "s_decreasing": ctx.s_decreasing(), "points": points}),
            ))
        }
        "resolvent-verify" => {
            let n = cfg.n.unwrap_or(200);
            let tol = cfg.tol.unwrap_or(1e-10);
            let checks = cfg
                .lambdas()?
                .into_iter()
                .map(|l| verify_resolvent(l, &a, n, tol))
                .collect::<Result<Vec<_>>>()?;
            let code = worst(
                checks
                    .iter()
                    .map(|c| match (c.passed, c.verification_claimed) {
                        (true, _) => EXIT_PASS,
                        (false, true) => EXIT_ASSERTION,
                        (false, false) => EXIT_INCONCLUSIVE,
                    }),
            );
            let lambdas: Vec<(f64, f64)> = cfg.lambdas.clone();
            Ok(envelope(
                h,
                code,
                json!({"lambdas": lambdas, "checks": checks}),
            ))
        }
        "product-band" => {
            let band = cfg.band.clone().unwrap_or_default();
            let (chi, chi_info) = cfg.chi(&a)?;
            let bc = BandConfig {
                slope_tol: band.slope_tol,
                band_ratio: band.band_ratio,
            };
            let mut reports = Vec::new();
            for l in cfg.lambdas()? {
                let exponent = alpha(l)? * chi + band.exponent_offset;
                reports.push(ratio_band_with_exponent(
                    &a,
                    l,
                    exponent,
                    band.n_range,
                    &bc,
                )?);
            }
            let code = worst(reports.iter().map(|r| match r.verdict {
                v if v == band.expect => EXIT_PASS,
                BandVerdict::Degenerate => EXIT_INCONCLUSIVE,
                _ => EXIT_ASSERTION,
            }));
            Ok(envelope(
                h,
                code,
                json!({"chi": chi_info, "band": band, "reports": reports}),
            ))
        }
        "ideal-qnorm" => {
            let block = cfg.snumbers.as_ref().ok_or_else(|| {
                Error::InvalidInput("ideal-qnorm needs an `snumbers` block".into())
            })?;
            let snum = match (&block.values, block.section) {
                (Some(v), None) => SNumberSequence::synthetic(v.clone(), block.asym)?,
                (None, Some(dim)) => {
                    snumbers_from_section(&build_section(&a, dim)?, &r, &s, cfg.spectral.dense_cap)?
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "`snumbers` needs exactly one of `values` or `section`".into(),
                    ))
                }
            };
            let q = quasi_norm(&snum, &a, &r)?;
            let member = stype_membership(&snum, &a, &r)?;
            let flags = ideal_preconditions(&a, &r)?;
            let code = if member.verdict == TriState::Inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_PASS
            };
            Ok(envelope(
                h,
                code,
                json!({"snumbers": snum, "quasi_norm": q, "membership": member, "preconditions": flags}),
            ))
        }
        "ideal-axioms" => {
            let block = cfg.axioms.clone().unwrap_or(AxiomBlock {
                trials: default_trials(),
                dim: default_dim(),
            });
            let ac = AxiomConfig {
                trials: block.trials,
                dim: block.dim,
                seed: h.seed,
                ..AxiomConfig::default()
            };
            let rep = check_quasinorm_axioms(&ac, &a, &r)?;
            let code = if rep.violations.total() == 0 {
                EXIT_PASS
            } else {
                EXIT_ASSERTION
            };
            Ok(envelope(h, code, to_value(&rep)))
        }
        other => Err(Error::InvalidInput(format!("unknown command `{other}`"))),
    }
}

/// Run `command` on raw configuration bytes. `seed_override` replaces the configured seed.
pub fn execute(
    command: &Command,
    config_bytes: &[u8],
    seed_override: Option<u64>,
) -> Result<Outcome> {
    let text = std::str::from_utf8(config_bytes)
        .map_err(|_| Error::InvalidInput("config is not UTF-8".into()))?;
    let cfg = RunConfig::from_json(text)?;
    let header = Header {
        command: command.name(),
        digest: digest(config_bytes),
        seed: seed_override.unwrap_or(cfg.seed),
    };
    let run = || run_command(command.name(), &cfg, &header);
    match command.args().jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn seed_from_env() -> std::result::Result<Option<u64>, String> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got `{v}`")),
        Err(_) => Ok(None),
    }
}

fn write_out(path: Option<&Path>, body: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(body.as_bytes())
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let args = cli.command.args().clone();
    let seed = match seed_from_env() {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let bytes = match std::fs::read(&args.config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return EXIT_CONFIG;
        }
    };
    match execute(&cli.command, &bytes, seed) {
        Ok(out) => {
            if let Err(e) = write_out(args.out.as_deref(), &out.body) {
                eprintln!("error: cannot write output: {e}");
                return EXIT_CONFIG;
            }
            out.exit_code
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            EXIT_CONFIG
        }
    }
}
