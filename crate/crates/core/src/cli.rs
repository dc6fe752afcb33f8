//! Batch front-end. Each command reads an optional JSON config, runs one
//! library operation and emits a versioned JSON envelope (plus CSV for Gram
//! scans). Exit codes: 0 success, 1 input or I/O error, 2 failed hypothesis,
//! 3 numerical breakdown.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::combinators::{self, CombineOptions, ConverseMode, Property};
use crate::constructions::{self, KadecSpec};
use crate::domain::IntervalUnion;
use crate::error::{Error, Result};
use crate::fourier::{self, SystemClass};
use crate::gram::{self, ScanConfig};
use crate::linalg::C64;
use crate::pw::{self, InterpolationProblem, Multiplier};
use crate::rational::Rational;
use crate::repro;
use crate::spectrum::{SpectrumSpec, Window};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug, Clone)]
#[command(name = "expriesz", version, about = "Exponential Riesz bases on unions of intervals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration for the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving report files; written atomically.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Window half-widths, strictly increasing.
    #[arg(long, global = true, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative level below which lambda_min is recomputed in extended precision.
    #[arg(long = "tol-eig", global = true)]
    pub tol_eig: Option<f64>,
    /// Smallest lambda_min accepted as a stable lower bound.
    #[arg(long, global = true)]
    pub floor: Option<f64>,
    /// Print the JSON envelope on stdout instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Gram scan (and optional completeness probe) of a spectrum on a domain.
    Certify,
    /// Gated union of systems: modes shift, cosets, multi, converse.
    Combine,
    /// Singular-value classification of a coset/cell matrix.
    Wkl,
    /// Layer decomposition A_{>=n} of a subset of [0, 1).
    Decompose,
    /// Build a spectrum (kadec, cosets, prime_rescaled, pathological).
    Construct,
    /// Interpolation solve, direct or two-step.
    Interp,
    /// Minimum minor of the P x P Fourier matrix.
    Chebotarev {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        allow_composite: bool,
    },
    /// Reproduce a worked example.
    Repro {
        #[arg(value_enum)]
        example: Example,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Ex25,
    Ex26,
    Sec12,
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    pub spectrum: SpectrumSpec,
    pub domain: IntervalUnion,
    #[serde(default)]
    pub completeness: bool,
}

fn default_property() -> Property {
    Property::RieszBasis
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum CombineConfig {
    Shift {
        s1: IntervalUnion,
        lambda1: SpectrumSpec,
        s2: IntervalUnion,
        lambda2: SpectrumSpec,
        a: Rational,
        #[serde(default = "default_property")]
        property: Property,
        #[serde(default)]
        exploratory: bool,
    },
    Cosets {
        s1: IntervalUnion,
        lambda1: SpectrumSpec,
        s2: IntervalUnion,
        lambda2: SpectrumSpec,
        n: Rational,
        offsets: Vec<Rational>,
        #[serde(default = "default_property")]
        property: Property,
        #[serde(default)]
        exploratory: bool,
    },
    Multi {
        n: u64,
        domains: Vec<IntervalUnion>,
        spectra: Vec<SpectrumSpec>,
        k: Vec<u64>,
        l: Vec<u64>,
        #[serde(default)]
        prime_mode: bool,
        #[serde(default)]
        subset: Option<Vec<usize>>,
    },
    Converse {
        s1: IntervalUnion,
        lambda1: SpectrumSpec,
        s2: IntervalUnion,
        lambda2: SpectrumSpec,
        multiplier: ConverseMode,
    },
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct WklConfig {
    pub n: Rational,
    pub offsets: Vec<Rational>,
    pub columns: Vec<i64>,
    #[serde(default = "one")]
    pub base_bound: f64,
    /// With `omega` and `s`, the hypotheses of the classification are checked too.
    #[serde(default)]
    pub omega: Option<SpectrumSpec>,
    #[serde(default)]
    pub s: Option<IntervalUnion>,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    pub domain: IntervalUnion,
    pub n: u64,
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstructConfig {
    Kadec(KadecSpec),
    Cosets {
        n: Rational,
        offsets: Vec<Rational>,
        #[serde(default)]
        cells: Option<Vec<i64>>,
    },
    PrimeRescaled {
        p: u64,
        rows: Vec<u64>,
        cols: Vec<u64>,
    },
    Pathological {
        epsilon: Rational,
        #[serde(default)]
        delta: Option<Rational>,
    },
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterpConfig {
    Direct {
        spectrum: SpectrumSpec,
        domain: IntervalUnion,
        window: f64,
        /// `[re, im]` pairs; random unit-norm targets from `--seed` when absent.
        #[serde(default)]
        targets: Option<Vec<(f64, f64)>>,
    },
    TwoStep {
        s1: IntervalUnion,
        lambda1: SpectrumSpec,
        s2: IntervalUnion,
        lambda2: SpectrumSpec,
        multiplier: Multiplier,
        window: f64,
    },
}

/// Result of one command before it is written out.
pub struct Outcome {
    pub summary: String,
    pub result: Value,
    pub files: Vec<(String, Vec<u8>)>,
}

fn parse_config<T: DeserializeOwned>(path: &Path) -> Result<(T, Value)> {
    let text = fs::read_to_string(path)?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let parsed: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let at = e.path().to_string();
        let inner = e.inner();
        if at == "." {
            Error::Parse(format!("{}: {inner}", path.display()))
        } else {
            Error::Parse(format!("{}: field `{at}`: {inner}", path.display()))
        }
    })?;
    let echo: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((parsed, echo))
}

fn need_config<T: DeserializeOwned>(cli: &Cli) -> Result<(T, Value)> {
    match &cli.config {
        Some(p) => parse_config(p),
        None => Err(Error::InvalidInput("this command needs --config <path>".into())),
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Parse(e.to_string()))
}

impl Cli {
    pub fn schedule(&self) -> Result<Vec<f64>> {
        let s = self.schedule.clone().unwrap_or_else(|| repro::DEFAULT_SCHEDULE.to_vec());
        if s.is_empty() || s.iter().any(|t| !(*t > 0.0)) || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!("schedule {s:?} must be positive and strictly increasing")));
        }
        Ok(s)
    }

    pub fn scan_config(&self) -> Result<ScanConfig> {
        let mut cfg = ScanConfig::default();
        for (name, v) in [("tol-eig", self.tol_eig), ("floor", self.floor)] {
            if let Some(x) = v {
                if !(x > 0.0) {
                    return Err(Error::InvalidInput(format!("--{name} must be positive")));
                }
            }
        }
        if let Some(x) = self.tol_eig {
            cfg.refine_below = x;
        }
        if let Some(x) = self.floor {
            cfg.stability_floor = x;
        }
        Ok(cfg)
    }

    fn combine_options(&self, exploratory: bool) -> Result<CombineOptions> {
        Ok(CombineOptions { schedule: self.schedule()?, exploratory, scan: self.scan_config()?, ..Default::default() })
    }

    fn echo(&self, input: Value) -> Result<Value> {
        Ok(json!({
            "schedule": self.schedule()?,
            "seed": self.seed,
            "scan": to_value(&self.scan_config()?)?,
            "input": input,
        }))
    }
}

fn csv_bytes(report: &gram::GramReport) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    report.write_csv(&mut buf)?;
    Ok(buf)
}

fn certify(cli: &Cli) -> Result<(Outcome, Value)> {
    let (cfg, echo): (CertifyConfig, Value) = need_config(cli)?;
    let ws = repro::windows(&cli.schedule()?)?;
    let report = gram::riesz_bound_scan(&cfg.spectrum, &cfg.domain, &ws, &cli.scan_config()?)?;
    let trend = if cfg.completeness { Some(gram::completeness_trend(&cfg.spectrum, &cfg.domain, &ws)?) } else { None };
    let mut summary = format!("verdict: {:?}\n", report.verdict);
    for r in &report.rows {
        summary.push_str(&format!("  T={:<6} n={:<5} lambda_min={:.6e} lambda_max={:.6e}\n", r.window_t, r.num_points, r.lambda_min, r.lambda_max));
    }
    if let Some(t) = &trend {
        summary.push_str(&format!("completeness evidence: {:?}\n", t.evidence));
    }
    let files = vec![("gram.csv".to_string(), csv_bytes(&report)?)];
    Ok((Outcome { summary, result: json!({ "gram": to_value(&report)?, "completeness": to_value(&trend)? }), files }, echo))
}

fn combine(cli: &Cli) -> Result<(Outcome, Value)> {
    let (cfg, echo): (CombineConfig, Value) = need_config(cli)?;
    let combined = match &cfg {
        CombineConfig::Shift { s1, lambda1, s2, lambda2, a, property, exploratory } => {
            combinators::combine_shift(s1, lambda1, s2, lambda2, *a, *property, &cli.combine_options(*exploratory)?)?
        }
        CombineConfig::Cosets { s1, lambda1, s2, lambda2, n, offsets, property, exploratory } => {
            combinators::combine_cosets(s1, lambda1, s2, lambda2, *n, offsets, *property, &cli.combine_options(*exploratory)?)?
        }
        CombineConfig::Multi { n, domains, spectra, k, l, prime_mode, subset } => {
            combinators::multi_combine(*n, domains, spectra, k, l, *prime_mode, subset.as_deref(), &cli.combine_options(false)?)?
        }
        CombineConfig::Converse { s1, lambda1, s2, lambda2, multiplier } => {
            let r = combinators::converse_check(s1, s2, lambda1, lambda2, multiplier, &cli.combine_options(false)?)?;
            let summary = format!(
                "{}max |m| on Lambda2: {:.3e}\nmin |m| on Lambda1: {:.6e}\ncompleteness evidence for Lambda1: {:?}\n",
                r.ledger.render(),
                r.max_on_lambda2,
                r.floor_on_lambda1.floor,
                r.probe.evidence
            );
            return Ok((Outcome { summary, result: to_value(&r)?, files: vec![] }, echo));
        }
    };
    let mut summary = combined.ledger.render();
    summary.push_str(&format!("claimed: {:?} ({})\n", combined.claimed_property, combined.statement_tag));
    let mut files = vec![];
    match &combined.counter_check {
        Some(combinators::CounterCheck::Gram(g)) => {
            summary.push_str(&format!("gram counter-check: {:?}\n", g.verdict));
            files.push(("gram.csv".to_string(), csv_bytes(g)?));
        }
        Some(combinators::CounterCheck::Completeness(t)) => summary.push_str(&format!("completeness counter-check: {:?}\n", t.evidence)),
        None => {}
    }
    Ok((Outcome { summary, result: to_value(&combined)?, files }, echo))
}

fn wkl(cli: &Cli) -> Result<(Outcome, Value)> {
    let (cfg, echo): (WklConfig, Value) = need_config(cli)?;
    let (analysis, class) = match (&cfg.omega, &cfg.s) {
        (Some(omega), Some(s)) => {
            let c = fourier::classify_system(cfg.n, omega, s, &cfg.offsets, &cfg.columns, cfg.base_bound)?;
            (c.analysis, c.class)
        }
        (None, None) => {
            let a = fourier::analyze(&fourier::build_wkl(cfg.n, &cfg.offsets, &cfg.columns)?, cfg.base_bound)?;
            let class = SystemClass::from_analysis(&a);
            (a, class)
        }
        _ => return Err(Error::InvalidInput("give both `omega` and `s`, or neither".into())),
    };
    let record = json!({
        "N": cfg.n,
        "offsets": cfg.offsets,
        "columns": cfg.columns,
        "sigma_min": analysis.sigma_min,
        "sigma_max": analysis.sigma_max,
        "rank": analysis.rank,
        "verdict": class,
        "certificate": analysis.certificate,
    });
    let summary = format!(
        "verdict: {class:?}\nsigma_min = {:.6e}, sigma_max = {:.6e}, rank = {}, certificate = {:.6e}\n",
        analysis.sigma_min, analysis.sigma_max, analysis.rank, analysis.certificate
    );
    Ok((Outcome { summary, result: record, files: vec![] }, echo))
}

fn decompose(cli: &Cli) -> Result<(Outcome, Value)> {
    let (cfg, echo): (DecomposeConfig, Value) = need_config(cli)?;
    let layers = combinators::a_ge_n(&cfg.domain, cfg.n)?;
    let mut summary = String::new();
    for (i, l) in layers.iter().enumerate() {
        let parts: Vec<String> = l.intervals().iter().map(|(a, b)| format!("[{a}, {b})")).collect();
        summary.push_str(&format!("A_>={}: {} (measure {})\n", i + 1, if parts.is_empty() { "∅".into() } else { parts.join(" ∪ ") }, l.measure()?));
    }
    Ok((Outcome { summary, result: to_value(&layers)?, files: vec![] }, echo))
}

fn construct(cli: &Cli) -> Result<(Outcome, Value)> {
    let (cfg, echo): (ConstructConfig, Value) = need_config(cli)?;
    let (result, summary) = match &cfg {
        ConstructConfig::Kadec(k) => {
            let s = constructions::kadec_spectrum(k)?;
            (json!({ "spectrum": to_value(&s)?, "domain": to_value(&k.domain()?)? }), s.provenance().join("\n"))
        }
        ConstructConfig::Cosets { n, offsets, cells } => {
            let s = constructions::coset_spectrum(*n, offsets)?;
            let d = match cells {
                Some(c) => Some(constructions::fundamental_cells(*n, c)?),
                None => None,
            };
            (json!({ "spectrum": to_value(&s)?, "domain": to_value(&d)? }), format!("{} cosets of {n}Z", offsets.len()))
        }
        ConstructConfig::PrimeRescaled { p, rows, cols } => {
            let r = constructions::prime_rescaled_basis(*p, rows, cols)?;
            let summary = format!("verdict: {:?}, certificate {:.6e}", r.class, r.analysis.certificate);
            (to_value(&r)?, summary)
        }
        ConstructConfig::Pathological { epsilon, delta } => {
            let pair = constructions::pathological_pair(*epsilon)?;
            let shifted = match delta {
                Some(d) => Some(constructions::shifted_union(&pair, *d)?),
                None => None,
            };
            (
                json!({ "lambda1": to_value(&pair.lambda1)?, "lambda2": to_value(&pair.lambda2)?, "shifted_union": to_value(&shifted)? }),
                format!("epsilon = {epsilon}"),
            )
        }
    };
    Ok((Outcome { summary: summary + "\n", result, files: vec![] }, echo))
}

fn interp(cli: &Cli) -> Result<(Outcome, Value)> {
    let (cfg, echo): (InterpConfig, Value) = need_config(cli)?;
    match &cfg {
        InterpConfig::Direct { spectrum, domain, window, targets } => {
            let points = spectrum.window(Window::new(*window)?)?;
            let targets: Vec<C64> = match targets {
                Some(t) => t.iter().map(|&(re, im)| C64::new(re, im)).collect(),
                None => repro::random_targets(points.len(), cli.seed),
            };
            let r = pw::interpolate(&InterpolationProblem { points: points.clone(), domain: domain.clone(), targets })?;
            let summary = format!(
                "points = {}, lambda_min = {:.6e}, residual = {:.3e}, amplification = {:.3e}\n",
                points.len(),
                r.lambda_min,
                r.residual,
                r.amplification
            );
            Ok((Outcome { summary, result: json!({ "points": points, "solution": to_value(&r)? }), files: vec![] }, echo))
        }
        InterpConfig::TwoStep { s1, lambda1, s2, lambda2, multiplier, window } => {
            let fx = repro::UnionFixture { s1: s1.clone(), lambda1: lambda1.clone(), s2: s2.clone(), lambda2: lambda2.clone() };
            let r = repro::two_step_on(&fx, multiplier, *window, cli.seed)?;
            let summary = format!(
                "residual = {:.3e} (Lambda1 {:.3e}, Lambda2 {:.3e}), multiplier floor = {:.6e}, support ok = {}\n",
                r.residual, r.residual_1, r.residual_2, r.floor, r.support_ok
            );
            let result = json!({
                "residual": r.residual,
                "residual_1": r.residual_1,
                "residual_2": r.residual_2,
                "floor": r.floor,
                "support_ok": r.support_ok,
                "g": to_value(&r.g)?,
                "f1": to_value(&r.f1)?,
            });
            Ok((Outcome { summary, result, files: vec![] }, echo))
        }
    }
}

fn chebotarev(p: u64, allow_composite: bool) -> Result<(Outcome, Value)> {
    let r = fourier::chebotarev_scan(p, allow_composite)?;
    let summary = format!(
        "P = {}: {} pairs, min |det| = {:.6e} at rows {:?}, cols {:?}; all nonzero: {}\n",
        r.p, r.pairs, r.min_abs_det, r.argmin_rows, r.argmin_cols, r.all_nonzero
    );
    Ok((Outcome { summary, result: to_value(&r)?, files: vec![] }, json!({ "p": p, "allow_composite": allow_composite })))
}

fn repro_cmd(cli: &Cli, example: Example) -> Result<(Outcome, Value)> {
    let cfg = cli.scan_config()?;
    let schedule = cli.schedule()?;
    let (summary, result, files) = match example {
        Example::Ex25 => {
            let r = repro::ex25(&schedule, &cfg)?;
            let summary = format!(
                "K = L = {{0, 2}}: {:?} (sigma_min = {:.3e}); Gram of E(2Z) on [0,1/4)∪[1/2,3/4): {:?}\n\
                 annihilator max |<h, e_λ>| = {:.3e}\n\
                 K = {{0, 1}}, L = {{0, 2}}: {:?}, certificate {:.6}; Gram: {:?}\n\
                 P = 5, K = {{0, 2}}, L = {{0, 3}}: {:?}, certificate {:.6}; Gram: {:?}\n\
                 Fourier minors, P = 5: min |det| = {:.6e}\n",
                r.singular.class,
                r.singular.analysis.sigma_min,
                r.singular_scan.lambda_mins(),
                r.annihilator_max,
                r.invertible.class,
                r.invertible.analysis.certificate,
                r.invertible_scan.verdict,
                r.prime.class,
                r.prime.analysis.certificate,
                r.prime_scan.verdict,
                r.chebotarev.min_abs_det
            );
            (summary, to_value(&r)?, vec![])
        }
        Example::Ex26 => {
            let r = repro::ex26(&schedule, &cfg)?;
            let files =
                r.rows.iter().enumerate().map(|(i, row)| Ok((format!("ex26_{}.csv", i + 1), csv_bytes(&row.report)?))).collect::<Result<Vec<_>>>()?;
            (r.table(), to_value(&r)?, files)
        }
        Example::Sec12 => {
            let r = repro::sec12(&cli.combine_options(false)?, cli.seed)?;
            let summary = format!(
                "{}gram counter-check: {:?}\ntwo-step residual at T = {}: {:.3e} (multiplier floor {:.6})\n",
                r.combined.ledger.render(),
                repro::counter_verdict(&r.combined),
                r.interpolation_window,
                r.two_step_residual,
                r.multiplier_floor
            );
            (summary, to_value(&r)?, vec![])
        }
    };
    Ok((Outcome { summary, result, files }, json!({ "example": example })))
}

/// Runs the command and returns the outcome with the full envelope as `result`.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let (name, (outcome, input)) = match &cli.command {
        Command::Certify => ("certify", certify(cli)?),
        Command::Combine => ("combine", combine(cli)?),
        Command::Wkl => ("wkl", wkl(cli)?),
        Command::Decompose => ("decompose", decompose(cli)?),
        Command::Construct => ("construct", construct(cli)?),
        Command::Interp => ("interp", interp(cli)?),
        Command::Chebotarev { p, allow_composite } => ("chebotarev", chebotarev(*p, *allow_composite)?),
        Command::Repro { example } => ("repro", repro_cmd(cli, *example)?),
    };
    let envelope = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": "expriesz",
        "version": crate::VERSION,
        "command": name,
        "config": cli.echo(input)?,
        "result": outcome.result,
    });
    Ok(Outcome { result: envelope, ..outcome })
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, &target)?;
    Ok(())
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s.into_bytes()
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_hypothesis_gate() {
        2
    } else if e.is_numerical() {
        3
    } else {
        1
    }
}

fn failure_report(cli: &Cli, e: &Error) -> Value {
    let ledger = match e {
        Error::Hypothesis(f) => serde_json::to_value(&f.ledger).ok(),
        _ => None,
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "tool": "expriesz",
        "version": crate::VERSION,
        "error": e.to_string(),
        "exit_code": exit_code(e),
        "violation": e.violation().and_then(|v| serde_json::to_value(v).ok()),
        "ledger": ledger,
        "config_path": cli.config.as_ref().map(|p| p.display().to_string()),
    })
}

/// Runs a parsed command line and writes its outputs. Returns the exit code.
pub fn execute(cli: &Cli) -> i32 {
    let written = run(cli).and_then(|out| {
        if let Some(dir) = &cli.out {
            fs::create_dir_all(dir)?;
            write_atomic(dir, "report.json", &pretty(&out.result))?;
            for (name, bytes) in &out.files {
                write_atomic(dir, name, bytes)?;
            }
        }
        if cli.json {
            print!("{}", String::from_utf8_lossy(&pretty(&out.result)));
        } else {
            print!("{}", out.summary);
        }
        Ok(())
    });
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Hypothesis(f) = &e {
                eprint!("{}", f.ledger.render());
            }
            if let Some(dir) = &cli.out {
                let _ = fs::create_dir_all(dir).and_then(|_| {
                    write_atomic(dir, "failure.json", &pretty(&failure_report(cli, &e))).map_err(|e| std::io::Error::other(e.to_string()))
                });
            }
            exit_code(&e)
        }
    }
}

pub fn main_entry() -> i32 {
    execute(&Cli::parse())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("expriesz").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn schedule_must_increase() {
        assert!(cli(&["--schedule", "16,8", "wkl"]).schedule().is_err());
        assert_eq!(cli(&["wkl"]).schedule().unwrap(), vec![16.0, 32.0, 64.0, 128.0]);
        assert!(cli(&["--floor=-1", "wkl"]).scan_config().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::DeltaTooLarge(0.3)), 2);
        assert_eq!(exit_code(&Error::GramSingular { lambda_min: 0.0 }), 3);
        assert_eq!(exit_code(&Error::EmptyInput), 1);
    }
}
