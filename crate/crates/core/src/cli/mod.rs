//! Batch command-line front end: `spectrum`, `sweep`, `frontier`, `validate`.
//!
//! Every command writes its tables and a `manifest.json` into the output
//! directory (`--out`, `SCHATTEN_OUT`, or the current directory). Settings can
//! also come from a flat `key = value` config file; explicit flags win.
//! Exit codes: 0 pass, 1 property failure, 2 usage, 3 numerical failure.

pub mod config;
pub mod suites;

use crate::asymptotics::{fit_power_log, regime_report, FitMode, GrowthFit, LogArg, Model, MonomialRegime};
use crate::error::{LabError, Result};
use crate::norms::{bp_norm, default_outer_grid, dl_norm, ga_norm_suite, series, GaRow, GridSpec, NormResult};
use crate::operators::{assemble_mgprime, assemble_mgsecond, assemble_tg, assemble_tg_in};
use crate::spaces::{SpaceParams, Symbol, SymbolKind};
use crate::spectra::{monomial_spectrum_closed_form, schatten_norm, singular_values, SchattenOrder};
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::Config;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use suites::{run_suite, Suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Manifest schema version.
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "schatten-lab", version, about = "Schatten norms of integration, multiplication and Toeplitz operators")]
pub struct Cli {
    /// Boundary clip δ_c = 1 − r_max for quadrature-based functionals.
    #[arg(long, global = true)]
    pub clip: Option<f64>,
    /// Extra quadrature refinements (each doubles panels and angular nodes).
    #[arg(long, global = true)]
    pub refine: Option<u32>,
    /// Worker threads; changes wall time only.
    #[arg(long, global = true, env = "SCHATTEN_THREADS")]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "SCHATTEN_OUT")]
    pub out: Option<PathBuf>,
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Singular values and Schatten norms of one truncated operator.
    Spectrum(SpectrumArgs),
    /// Growth sweep over a symbol family, with fitted exponents.
    Sweep(SweepArgs),
    /// Exploratory monomial sweeps on the region p(1−α) ≥ 4.
    Frontier(FrontierArgs),
    /// Run a property suite; exit 1 on any failed assertion.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorChoice {
    Tg,
    Mgprime,
    Mgsecond,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Coefficient,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Monomial,
    Kernelpow,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    /// `monomial:3`, `kernelpow:0.9,1`, `const:1`, `loglog`, `taylor:b0,b1,..`, `lacunary:a/n,..`
    #[arg(long)]
    pub symbol: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Largest basis index kept (matrix size N+1).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated Schatten exponents.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub operator: Option<OperatorChoice>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeChoice>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Kernel-power exponent γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// First sweep point: j for monomials, k in 1−|a| = 2^{−k} for kernel powers.
    #[arg(long)]
    pub from: Option<u32>,
    /// Last sweep point (inclusive), same units as `--from`.
    #[arg(long)]
    pub to: Option<u32>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FrontierArgs {
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub ps: Option<Vec<f64>>,
    /// Offset ε of the comparison functional X^p_{α−ε}.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ValidateArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Lattice radius (hyperbolic).
    #[arg(long)]
    pub r: Option<f64>,
}

/// Outcome of a command before it is turned into an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub property_failures: usize,
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub command: String,
    pub tool_version: &'static str,
    /// sha256 of the canonical effective configuration (threads and output dir excluded).
    pub config_hash: String,
    pub config: BTreeMap<String, String>,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputFile>,
}

/// Parse `args`, run, print errors, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(o) if o.property_failures > 0 => EXIT_PROPERTY,
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::InvalidParameter { .. } | LabError::Io(_) | LabError::Json(_) => EXIT_USAGE,
        LabError::Numerical(_) => EXIT_NUMERICAL,
    }
}

/// Run a parsed command line.
pub fn run(cli: Cli) -> Result<Outcome> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let threads = cfg.pick(cli.threads, "threads")?;
    if let Some(t) = threads {
        if t == 0 {
            return crate::error::invalid("threads", "need at least one thread");
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out: PathBuf = cfg
        .pick(cli.out.clone(), "out")?
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let global = Global {
        clip: cfg.pick(cli.clip, "clip")?,
        refine: cfg.pick(cli.refine, "refine")?.unwrap_or(0),
    };
    if let Some(c) = global.clip {
        if !(c > 0.0 && c < 1.0) {
            return crate::error::invalid("clip", format!("clip must lie in (0, 1), got {c}"));
        }
    }
    let start = Instant::now();
    let mut run = Run {
        out,
        params: BTreeMap::new(),
        files: Vec::new(),
    };
    if let Some(c) = global.clip {
        run.param("clip", c);
    }
    run.param("refine", global.refine);
    let (name, failures) = match &cli.command {
        Command::Spectrum(a) => ("spectrum", cmd_spectrum(a, &cfg, &global, &mut run)?),
        Command::Sweep(a) => ("sweep", cmd_sweep(a, &cfg, &global, &mut run)?),
        Command::Frontier(a) => ("frontier", cmd_frontier(a, &cfg, &mut run)?),
        Command::Validate(a) => ("validate", cmd_validate(a, &cfg, &global, &mut run)?),
    };
    run.write_manifest(name, start.elapsed().as_secs_f64())?;
    Ok(Outcome {
        files: run.files,
        property_failures: failures,
    })
}

struct Global {
    clip: Option<f64>,
    refine: u32,
}

impl Global {
    fn grid(&self, g: &Symbol, default_clip: f64) -> GridSpec {
        let mut s = default_outer_grid(g, self.clip.unwrap_or(default_clip));
        for _ in 0..self.refine {
            s = s.refined();
        }
        s
    }
}

struct Run {
    out: PathBuf,
    params: BTreeMap<String, String>,
    files: Vec<PathBuf>,
}

impl Run {
    fn param(&mut self, k: &str, v: impl std::fmt::Display) {
        self.params.insert(k.to_string(), v.to_string());
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.out.join(name);
        std::fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    fn write_manifest(&self, command: &str, wall: f64) -> Result<()> {
        let mut canon = format!("command={command}\n");
        for (k, v) in &self.params {
            let _ = writeln!(canon, "{k}={v}");
        }
        let outputs = self
            .files
            .iter()
            .map(|p| {
                Ok(OutputFile {
                    file: p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = RunManifest {
            manifest_version: MANIFEST_VERSION,
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash: hex::encode(Sha256::digest(canon.as_bytes())),
            config: self.params.clone(),
            wall_time_s: wall,
            outputs,
        };
        std::fs::write(self.out.join("manifest.json"), serde_json::to_string_pretty(&m)? + "\n")?;
        Ok(())
    }
}

pub fn sha256_file(p: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(p)?)))
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_spectrum(a: &SpectrumArgs, cfg: &Config, global: &Global, run: &mut Run) -> Result<usize> {
    let spec: String = cfg.require(a.symbol.clone(), "symbol")?;
    let g = Symbol::parse(&spec)?;
    let alpha: f64 = cfg.pick(a.alpha, "alpha")?.unwrap_or(0.0);
    let n: usize = cfg.pick(a.n, "n")?.unwrap_or(512);
    let ps: Vec<f64> = match &a.p {
        Some(v) => v.clone(),
        None => cfg.list("p")?.unwrap_or_else(|| vec![2.0]),
    };
    for &p in &ps {
        SchattenOrder::new(p)?;
    }
    let op = cfg.pick_enum(a.operator, "operator")?.unwrap_or(OperatorChoice::Tg);
    let mode = cfg.pick_enum(a.mode, "mode")?.unwrap_or(ModeChoice::Coefficient);
    run.param("symbol", &spec);
    run.param("alpha", alpha);
    run.param("n", n);
    run.param("p", fmt_list(&ps));
    run.param("operator", format!("{op:?}").to_lowercase());
    run.param("mode", format!("{mode:?}").to_lowercase());

    let m = match (op, mode) {
        (OperatorChoice::Tg, ModeChoice::Coefficient) => assemble_tg(&g, alpha, n)?,
        (OperatorChoice::Tg, ModeChoice::Integral) => assemble_tg_in(&g, SpaceParams::integral(alpha)?, n)?,
        (OperatorChoice::Mgprime, ModeChoice::Coefficient) => assemble_mgprime(&g, alpha, n)?,
        (OperatorChoice::Mgsecond, ModeChoice::Coefficient) => assemble_mgsecond(&g, alpha, n)?,
        _ => return crate::error::invalid("mode", "multiplication operators use the coefficient mode"),
    };
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    let s = singular_values(&m)?;
    let mut csv = Vec::new();
    s.write_csv(&mut csv)?;
    run.write("spectrum.csv", &String::from_utf8_lossy(&csv))?;

    let mut rows = Vec::new();
    for &p in &ps {
        let norm = schatten_norm(&s, SchattenOrder::new(p)?);
        let mut row = json!({
            "p": p,
            "norm": norm.value,
            "upper": finite(norm.upper),
            "estimate": finite(norm.estimate),
            "rigorous": norm.rigorous,
            "regime": regime_report(alpha, p),
        });
        if let (SymbolKind::Monomial(j), OperatorChoice::Tg, ModeChoice::Coefficient) = (&g.kind, op, mode) {
            let cf = monomial_spectrum_closed_form(*j, alpha, n)?;
            let c = schatten_norm(&cf, SchattenOrder::new(p)?);
            row["closed_form"] = json!({"norm": c.value, "estimate": finite(c.estimate),
                                        "rel_diff": (norm.value - c.value).abs() / c.value});
        }
        if op == OperatorChoice::Tg && !g.is_constant() {
            row["functionals"] = functional_row(&g, p, alpha, global)?;
        }
        rows.push(row);
    }
    let summary = json!({
        "symbol": g.label(),
        "operator": op,
        "mode": mode,
        "alpha": alpha,
        "n": n,
        "constant_symbol": m.constant_symbol,
        "tail_certificate": m.tail_certificate,
        "warnings": m.warnings,
        "norms": rows,
    });
    run.write("summary.json", &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    Ok(0)
}

fn finite(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}

/// `value`, `error` and `oracle` are in the functional's own (p-th power) units; `norm` and
/// `oracle_norm` are their p-th roots.
fn functional_json(r: &NormResult, p: f64) -> serde_json::Value {
    json!({"value": r.estimate(), "error": r.combined_error(), "oracle": r.oracle,
           "norm": r.norm(), "oracle_norm": r.oracle.map(|o| o.powf(1.0 / p))})
}

/// Comparison functionals for ‖T_g‖_{S_p}: B_p (all p > 1) and, at p = 2 and α = 0, DL.
fn functional_row(g: &Symbol, p: f64, alpha: f64, global: &Global) -> Result<serde_json::Value> {
    let grid = global.grid(g, 2f64.powi(-32));
    let mut row = serde_json::Map::new();
    if p > 1.0 {
        let b = bp_norm(g, p, &grid, true)?;
        row.insert("bp".into(), functional_json(&b, p));
    }
    if p == 2.0 && alpha == 0.0 {
        let d = dl_norm(g, &grid)?;
        row.insert("dl".into(), functional_json(&d, 2.0));
    }
    if p > 1.0 {
        if let SymbolKind::Monomial(j) = g.kind {
            let (v, err) = series::xpa_monomial(j, p, alpha, None)?;
            row.insert("xpa".into(), json!({"value": v, "error": err, "norm": v.powf(1.0 / p), "clip": 0.0}));
        } else if p == 2.0 && !g.is_constant() {
            // the nested functional is expensive, so it is taken over a coarse clipped disk
            let clip = global.clip.unwrap_or(2f64.powi(-8));
            if let Ok((v, err)) = series::xpa_series(g, p, alpha, &global.grid(g, clip)) {
                row.insert("xpa".into(), json!({"value": v, "error": err, "norm": v.sqrt(), "clip": clip}));
            }
        }
    }
    Ok(serde_json::Value::Object(row))
}

/// The fit used for a monomial sweep at (α, p).
pub fn monomial_fit(samples: &[(f64, f64)], alpha: f64, p: f64) -> Result<GrowthFit> {
    let rep = regime_report(alpha, p);
    match rep.monomial {
        MonomialRegime::Critical => fit_power_log(
            samples,
            Model::Power { log: LogArg::EX },
            FitMode::ForcedExponent {
                exponent: rep.predicted_exponent,
            },
        ),
        _ => fit_power_log(samples, Model::Power { log: LogArg::X }, FitMode::PowerOnly),
    }
}

/// ‖T_{z^j}‖_{S_p} estimate from the closed-form spectrum with N = 2j + 2048.
pub fn monomial_sp(j: usize, alpha: f64, p: f64) -> Result<f64> {
    let s = monomial_spectrum_closed_form(j, alpha, 2 * j + 2048)?;
    Ok(schatten_norm(&s, SchattenOrder::new(p)?).estimate)
}

fn powers_of_two(from: u32, to: u32) -> Vec<usize> {
    let mut v = Vec::new();
    let mut j = from.max(1) as usize;
    while j <= to as usize {
        v.push(j);
        j *= 2;
    }
    v
}

fn cmd_sweep(a: &SweepArgs, cfg: &Config, global: &Global, run: &mut Run) -> Result<usize> {
    let family = cfg.require_enum(a.family, "family")?;
    let p: f64 = cfg.require(a.p, "p")?;
    SchattenOrder::new(p)?;
    run.param("family", format!("{family:?}").to_lowercase());
    run.param("p", p);
    match family {
        Family::Monomial => {
            let alpha: f64 = cfg.pick(a.alpha, "alpha")?.unwrap_or(0.0);
            let from = cfg.pick(a.from, "from")?.unwrap_or(4);
            let to = cfg.pick(a.to, "to")?.unwrap_or(4096);
            run.param("alpha", alpha);
            run.param("from", from);
            run.param("to", to);
            let js = powers_of_two(from, to);
            let with_x = p > 1.0;
            let mut csv = String::from("j,s_p,xpa\n");
            let mut samples = Vec::new();
            let mut xs = Vec::new();
            for &j in &js {
                let s = monomial_sp(j, alpha, p)?;
                let x = if with_x {
                    Some(series::xpa_monomial(j, p, alpha, None)?.0.powf(1.0 / p))
                } else {
                    None
                };
                let _ = writeln!(csv, "{j},{s:?},{}", x.map(|v| format!("{v:?}")).unwrap_or_default());
                samples.push((j as f64, s));
                if let Some(v) = x {
                    xs.push((j as f64, v));
                }
            }
            run.write("sweep.csv", &csv)?;
            let rep = regime_report(alpha, p);
            let mut fits = serde_json::Map::new();
            fits.insert("regime".into(), serde_json::to_value(&rep)?);
            if samples.len() >= 6 {
                fits.insert("s_p".into(), serde_json::to_value(monomial_fit(&samples, alpha, p)?)?);
                if xs.len() >= 6 {
                    fits.insert("xpa".into(), serde_json::to_value(monomial_fit(&xs, alpha, p)?)?);
                }
            }
            run.write("fit.json", &(serde_json::to_string_pretty(&fits)? + "\n"))?;
        }
        Family::Kernelpow => {
            let gamma: f64 = cfg.pick(a.gamma, "gamma")?.unwrap_or(1.0);
            let from = cfg.pick(a.from, "from")?.unwrap_or(3);
            let to = cfg.pick(a.to, "to")?.unwrap_or(14);
            let clip = global.clip.unwrap_or(2f64.powi(-40));
            run.param("gamma", gamma);
            run.param("from", from);
            run.param("to", to);
            if to < from || to > 40 {
                return crate::error::invalid("to", "need from <= to <= 40");
            }
            let a_values: Vec<f64> = (from..=to).map(|k| 1.0 - 2f64.powi(-(k as i32))).collect();
            let rows = ga_norm_suite(gamma, p, &a_values, clip)?;
            let mut csv = String::from("a,bp,xp0,bplog,xp0_log,hs\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{:?},{:?},{:?},{:?},{},{:?}",
                    r.a,
                    r.bp.powf(1.0 / p),
                    r.xp0.powf(1.0 / p),
                    r.bplog.powf(1.0 / p),
                    r.xp0_log.map(|v| format!("{:?}", v.powf(1.0 / p))).unwrap_or_default(),
                    r.hs_sq.sqrt()
                );
            }
            run.write("sweep.csv", &csv)?;
            let fits = kernel_power_fits(&rows, gamma, p)?;
            run.write("fit.json", &(serde_json::to_string_pretty(&fits)? + "\n"))?;
        }
    }
    Ok(0)
}

/// Fits for a kernel-power sweep: B_p exponent against 1−|a|², log-powers of
/// X^p_0 (against 1−|a|), B_{p,log^{p/2}} and the HS norm with the exponent held at γ.
pub fn kernel_power_fits(rows: &[GaRow], gamma: f64, p: f64) -> Result<serde_json::Value> {
    let take = |f: &dyn Fn(&GaRow) -> f64, sq: bool| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.a > 0.0)
            .map(|r| (if sq { r.a * r.a } else { r.a }, f(r)))
            .collect()
    };
    let forced = FitMode::ForcedExponent { exponent: gamma };
    let bp = fit_power_log(&take(&|r| r.bp.powf(1.0 / p), true), Model::Boundary, FitMode::PowerOnly)?;
    let xp0 = fit_power_log(&take(&|r| r.xp0.powf(1.0 / p), false), Model::Boundary, forced)?;
    let bplog = fit_power_log(&take(&|r| r.bplog.powf(1.0 / p), true), Model::Boundary, forced)?;
    let mut out = json!({"gamma": gamma, "p": p, "bp": bp, "xp0": xp0, "bplog": bplog});
    if gamma == 1.0 {
        // HS norm of T_{g_a}; only at p = 2 is it the S_p norm itself
        out["hs"] = serde_json::to_value(fit_power_log(
            &take(&|r| r.hs_sq.sqrt(), true),
            Model::Boundary,
            forced,
        )?)?;
    }
    Ok(out)
}

fn cmd_frontier(a: &FrontierArgs, cfg: &Config, run: &mut Run) -> Result<usize> {
    let alphas = match &a.alphas {
        Some(v) => v.clone(),
        None => cfg.list("alphas")?.unwrap_or_else(|| vec![0.1, 0.25, 0.5]),
    };
    let ps = match &a.ps {
        Some(v) => v.clone(),
        None => cfg.list("ps")?.unwrap_or_else(|| vec![5.0, 6.0, 8.0, 12.0]),
    };
    let eps: f64 = cfg.pick(a.eps, "eps")?.unwrap_or(0.05);
    run.param("alphas", fmt_list(&alphas));
    run.param("ps", fmt_list(&ps));
    run.param("eps", eps);
    let js = powers_of_two(4, 1024);
    let mut csv = String::from("alpha,p,j,s_p,xpa,xpa_eps,tag\n");
    let mut cells = Vec::new();
    for &alpha in &alphas {
        for &p in &ps {
            if p * (1.0 - alpha) < 4.0 {
                continue;
            }
            SchattenOrder::new(p)?;
            let rep = regime_report(alpha, p);
            let tag = serde_json::to_value(rep.characterization)?;
            let tag = tag.as_str().unwrap_or("open").to_string();
            let ae = (alpha - eps).max(0.0);
            let mut s = Vec::new();
            let mut x = Vec::new();
            let mut xe = Vec::new();
            for &j in &js {
                let sp = monomial_sp(j, alpha, p)?;
                let xv = series::xpa_monomial(j, p, alpha, None)?.0.powf(1.0 / p);
                let xev = series::xpa_monomial(j, p, ae, None)?.0.powf(1.0 / p);
                let _ = writeln!(csv, "{alpha},{p},{j},{sp:?},{xv:?},{xev:?},{tag}");
                s.push((j as f64, sp));
                x.push((j as f64, xv));
                xe.push((j as f64, xev));
            }
            let fit = |v: &[(f64, f64)]| fit_power_log(v, Model::Power { log: LogArg::X }, FitMode::PowerOnly);
            cells.push(json!({
                "alpha": alpha,
                "p": p,
                "tag": tag,
                "exploratory": rep.exploratory,
                "s_p_exponent": fit(&s)?.exponent,
                "xpa_exponent": fit(&x)?.exponent,
                "xpa_eps_exponent": fit(&xe)?.exponent,
                "eps": eps,
            }));
        }
    }
    if cells.is_empty() {
        return crate::error::invalid("ps", "no (alpha, p) cell satisfies p(1-alpha) >= 4");
    }
    run.write("frontier.csv", &csv)?;
    run.write("frontier.json", &(serde_json::to_string_pretty(&cells)? + "\n"))?;
    Ok(0)
}

fn cmd_validate(a: &ValidateArgs, cfg: &Config, global: &Global, run: &mut Run) -> Result<usize> {
    let opts = SuiteOptions {
        c: cfg.pick(a.c, "c")?,
        t: cfg.pick(a.t, "t")?,
        r: cfg.pick(a.r, "r")?,
        clip: global.clip,
        refine: global.refine,
    };
    run.param("suite", a.suite.name());
    for (k, v) in [("c", opts.c), ("t", opts.t), ("r", opts.r)] {
        if let Some(v) = v {
            run.param(k, v);
        }
    }
    let rep = run_suite(a.suite, &opts)?;
    let failures = rep.failures().count();
    for c in &rep.checks {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        println!("{tag} {} (measured {:.6e}, bound {:.6e})", c.name, c.measured, c.bound);
    }
    for c in rep.failures() {
        eprintln!("failure: {}", serde_json::to_string(c)?);
    }
    println!("{}: {} checks, {} failed", a.suite.name(), rep.checks.len(), failures);
    run.write(
        &format!("validate-{}.json", a.suite.name()),
        &(serde_json::to_string_pretty(&rep)? + "\n"),
    )?;
    Ok(failures)
}
