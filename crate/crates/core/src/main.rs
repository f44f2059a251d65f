use besselsum::direct::{direct_sum, SumParams, DEFAULT_REL_TOL};
use besselsum::harness::{
    asymptotic_run, parse_csv, render_output, scan_grid, slope_fit, write_json, Format, Grid, PlanOverrides,
};
use besselsum::terminant::{scaled_terminant_gen, terminant_gen, Method, TerminantQuery};
use besselsum::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Modified Bessel function sums and their exponentially improved expansion.
#[derive(Parser)]
#[command(name = "besselsum", version)]
struct Cli {
    /// Flat JSON object of option values; command line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Oracle, expansion and remainder at one point.
    Eval(EvalArgs),
    /// Oracle against expansion over a geometric grid in `a`.
    Scan(ScanArgs),
    /// Generalised terminant T_omega(kappa; z).
    Terminant(TerminantArgs),
    /// Envelope slope of ln|r_obs| against X_1 from scan CSV.
    Slope(SlopeArgs),
}

#[derive(Args, Default)]
#[command(allow_negative_numbers = true)]
struct Common {
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    p: Option<u32>,
    /// Depth of the remainder prediction.
    #[arg(long = "M")]
    m: Option<usize>,
    /// Number of explicitly summed series.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Remainders R_k included in the prediction.
    #[arg(long)]
    remainder_k: Option<u64>,
    /// Requested relative accuracy of the oracle.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Predict remainders with the terminant sum for every p.
    #[arg(long)]
    terminant_sum: bool,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<EvalMethod>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    a_start: Option<f64>,
    #[arg(long)]
    a_stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Write to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TerminantArgs {
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    kappa: Option<u32>,
    #[arg(long)]
    z_mod: Option<f64>,
    #[arg(long)]
    z_arg: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<TerminantMethod>,
}

#[derive(Args)]
struct SlopeArgs {
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum EvalMethod {
    Direct,
    Asym,
    Both,
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum TerminantMethod {
    Asym,
    Oracle,
}

/// Contents of `--config`. Keys use the long flag names, with `_` or `-`.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Config {
    nu: Option<f64>,
    p: Option<u32>,
    a: Option<f64>,
    #[serde(alias = "a-start")]
    a_start: Option<f64>,
    #[serde(alias = "a-stop")]
    a_stop: Option<f64>,
    points: Option<usize>,
    #[serde(rename = "M")]
    m: Option<usize>,
    #[serde(rename = "K")]
    k: Option<usize>,
    #[serde(alias = "remainder-k")]
    remainder_k: Option<u64>,
    #[serde(alias = "rel-tol")]
    rel_tol: Option<f64>,
    terminant_sum: Option<bool>,
    format: Option<OutFormat>,
    method: Option<String>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    omega: Option<f64>,
    kappa: Option<u32>,
    #[serde(alias = "z-mod")]
    z_mod: Option<f64>,
    #[serde(alias = "z-arg")]
    z_arg: Option<f64>,
    input: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    let Some(path) = path else { return Ok(Config::default()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
}

fn required<T>(name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::Parse(format!("missing required option --{name}")))
}

fn config_method<T: ValueEnum>(cfg: &Config) -> Result<Option<T>> {
    cfg.method
        .as_deref()
        .map(|s| T::from_str(s, true).map_err(|_| Error::Parse(format!("unknown method {s:?} in config"))))
        .transpose()
}

fn overrides(c: &Common, cfg: &Config) -> PlanOverrides {
    PlanOverrides {
        k: c.k.or(cfg.k),
        m: c.m.or(cfg.m),
        n: None,
        remainder_k: c.remainder_k.or(cfg.remainder_k),
        rel_tol: c.rel_tol.or(cfg.rel_tol),
        terminant_sum: c.terminant_sum || cfg.terminant_sum.unwrap_or(false),
    }
}

fn format_of(c: &Common, cfg: &Config, default: Format) -> Format {
    match c.format.or(cfg.format) {
        Some(OutFormat::Csv) => Format::Csv,
        Some(OutFormat::Json) => Format::Json,
        None => default,
    }
}

fn params(c: &Common, cfg: &Config, a: Option<f64>) -> Result<SumParams> {
    SumParams::new(required("nu", c.nu.or(cfg.nu))?, required("p", c.p.or(cfg.p))?, required("a", a)?)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    let stdout = io::stdout();
    match cli.cmd {
        Cmd::Eval(args) => {
            let params = params(&args.common, &cfg, args.a.or(cfg.a))?;
            let ov = overrides(&args.common, &cfg);
            let format = format_of(&args.common, &cfg, Format::Json);
            let method = match args.method {
                Some(m) => m,
                None => config_method(&cfg)?.unwrap_or(EvalMethod::Both),
            };
            let mut out = stdout.lock();
            match method {
                EvalMethod::Both => {
                    let b = besselsum::harness::compare_run(&params, &ov)?;
                    render_output(&[b], format, &mut out)?;
                }
                EvalMethod::Direct => {
                    let o = direct_sum(&params, ov.rel_tol.unwrap_or(DEFAULT_REL_TOL))?;
                    match format {
                        Format::Csv => {
                            writeln!(out, "a,value,terms_used,tail_bound,rel_tol_achieved")?;
                            writeln!(
                                out,
                                "{:.16e},{:.16e},{},{:.16e},{:.16e}",
                                params.a, o.value, o.terms_used, o.tail_bound, o.rel_tol_achieved
                            )?;
                        }
                        Format::Json => json_line(&DirectReport { params, oracle: o }, &mut out)?,
                    }
                }
                EvalMethod::Asym => {
                    let r = asymptotic_run(&params, &ov)?;
                    match format {
                        Format::Csv => {
                            writeln!(out, "a,X_1,N_1,h,series_total,r_pred,value")?;
                            writeln!(
                                out,
                                "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                                params.a, r.x_1, r.plan.n[0], r.h, r.series_total, r.r_pred, r.value
                            )?;
                        }
                        Format::Json => json_line(&r, &mut out)?,
                    }
                }
            }
        }
        Cmd::Scan(args) => {
            let c = &args.common;
            let nu = required("nu", c.nu.or(cfg.nu))?;
            let p = required("p", c.p.or(cfg.p))?;
            let a_start = required("a-start", args.a_start.or(cfg.a_start))?;
            let a_stop = required("a-stop", args.a_stop.or(cfg.a_stop))?;
            let points = required("points", args.points.or(cfg.points))?;
            let ov = overrides(c, &cfg);
            let format = format_of(c, &cfg, Format::Csv);
            let scan = || scan_grid(nu, p, a_start, a_stop, points, Grid::Geometric, &ov);
            let rows = match args.threads.or(cfg.threads) {
                Some(0) => return Err(Error::Parse("--threads must be at least 1".into())),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Io(e.to_string()))?
                    .install(scan)?,
                None => scan()?,
            };
            match args.out.or(cfg.out) {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    render_output(&rows, format, BufWriter::new(file))?;
                }
                None => render_output(&rows, format, stdout.lock())?,
            }
        }
        Cmd::Terminant(args) => {
            let method = match args.method {
                Some(m) => m,
                None => config_method(&cfg)?.unwrap_or(TerminantMethod::Asym),
            };
            let q = TerminantQuery {
                omega: required("omega", args.omega.or(cfg.omega))?,
                kappa: required("kappa", args.kappa.or(cfg.kappa))?,
                z_mod: required("z-mod", args.z_mod.or(cfg.z_mod))?,
                z_arg: required("z-arg", args.z_arg.or(cfg.z_arg))?,
                method: match method {
                    TerminantMethod::Asym => Method::Asymptotic,
                    TerminantMethod::Oracle => Method::Oracle,
                },
            };
            let scaled = scaled_terminant_gen(&q)?;
            let value = match terminant_gen(&q) {
                Ok(v) => Some(v),
                Err(Error::Overflow { .. }) => None,
                Err(e) => return Err(e),
            };
            json_line(&TerminantReport { query: q, scaled, value }, &mut stdout.lock())?;
        }
        Cmd::Slope(args) => {
            let path = required("input", args.input.or(cfg.input))?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let fit = slope_fit(&parse_csv(&text)?)?;
            json_line(&fit, &mut stdout.lock())?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DirectReport {
    params: SumParams,
    oracle: besselsum::OracleResult,
}

#[derive(Serialize)]
struct TerminantReport {
    #[serde(flatten)]
    query: TerminantQuery,
    /// `e^z T`.
    scaled: Complex64,
    /// `T`, null when it overflows.
    value: Option<Complex64>,
}

fn json_line<T: Serialize, W: Write>(v: &T, out: &mut W) -> Result<()> {
    write_json(v, &mut *out)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
