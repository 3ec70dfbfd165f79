//! Command-line flags, the `key = value` config file, and their merge into a
//! validated [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use zeno_core::pipeline::MeasurementCount;
use zeno_core::response_second::KernelConvention;

#[derive(Debug, Parser)]
#[command(
    name = "zeno",
    version,
    about = "Survival laws under repeated measurement, response functions and their verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Exponential survival curve exp(-t/tau_E).
    Classical(Params),
    /// Product-law curve [1 - t^2/(tau_z N)^2]^N beside its limit exp(-t^2/(tau_z^2 N)).
    ZenoGaussian(Params),
    /// Renormalized single-interval response and its pieces.
    ResponseFirst(Params),
    /// Second-interval response for a flat-band field state.
    ResponseSecond(Params),
    /// Survival under N measurements, or the N = inf exponential.
    ZenoCurve(Params),
    /// Run every closed form against its quadrature oracle.
    Verify(Params),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Classical(_) => CommandKind::Classical,
            Command::ZenoGaussian(_) => CommandKind::ZenoGaussian,
            Command::ResponseFirst(_) => CommandKind::ResponseFirst,
            Command::ResponseSecond(_) => CommandKind::ResponseSecond,
            Command::ZenoCurve(_) => CommandKind::ZenoCurve,
            Command::Verify(_) => CommandKind::Verify,
        }
    }

    pub fn params(&self) -> &Params {
        match self {
            Command::Classical(p)
            | Command::ZenoGaussian(p)
            | Command::ResponseFirst(p)
            | Command::ResponseSecond(p)
            | Command::ZenoCurve(p)
            | Command::Verify(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Classical,
    ZenoGaussian,
    ResponseFirst,
    ResponseSecond,
    ZenoCurve,
    Verify,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Classical => "classical",
            CommandKind::ZenoGaussian => "zeno-gaussian",
            CommandKind::ResponseFirst => "response-first",
            CommandKind::ResponseSecond => "response-second",
            CommandKind::ZenoCurve => "zeno-curve",
            CommandKind::Verify => "verify",
        }
    }

    fn required(self) -> &'static [Key] {
        use Key::*;
        match self {
            CommandKind::Classical => &[TauE, T],
            CommandKind::ZenoGaussian => &[TauZ, T, N],
            CommandKind::ResponseFirst => &[E, DeltaTau],
            CommandKind::ResponseSecond => &[E, A, DeltaTau],
            CommandKind::ZenoCurve => &[E, A, Sigma, T, N],
            CommandKind::Verify => &[],
        }
    }

    fn optional(self) -> &'static [Key] {
        use Key::*;
        match self {
            CommandKind::Classical | CommandKind::ZenoGaussian => &[Points],
            CommandKind::ResponseFirst => &[Sigma, Epsilon],
            CommandKind::ResponseSecond => &[Epsilon, Kernel],
            CommandKind::ZenoCurve => &[Points, LandauPeierls],
            CommandKind::Verify => &[Tol, AllowFlags],
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Kernel {
    #[default]
    Printed,
    Integrated,
}

impl From<Kernel> for KernelConvention {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::Printed => KernelConvention::Printed,
            Kernel::Integrated => KernelConvention::Integrated,
        }
    }
}

/// Measurement count as given on the command line: a positive integer or `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Count(pub MeasurementCount);

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "Infinity" | "∞" => Ok(Count(MeasurementCount::Infinite)),
            t => match t.parse::<u64>() {
                Ok(0) => Err("N must be at least 1".into()),
                Ok(n) => Ok(Count(MeasurementCount::Finite(n))),
                Err(_) => Err(format!("N must be a positive integer or `inf`, got `{t}`")),
            },
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            MeasurementCount::Finite(n) => write!(f, "{n}"),
            MeasurementCount::Infinite => f.write_str("inf"),
        }
    }
}

/// Every flag. Each subcommand accepts the subset listed in its help; the
/// rest are rejected after parsing.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Params {
    /// Energy gap E (negative for decay, non-zero).
    #[arg(long = "E", allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Band cutoff frequency a of the flat-band field state.
    #[arg(long = "a", allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Coupling sigma multiplying the response function.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Classical lifetime.
    #[arg(long = "tau-E", allow_negative_numbers = true)]
    pub tau_e: Option<f64>,
    /// Zeno time.
    #[arg(long = "tau-z", allow_negative_numbers = true)]
    pub tau_z: Option<f64>,
    /// Total observation time.
    #[arg(long = "T", allow_negative_numbers = true)]
    pub total_time: Option<f64>,
    /// Number of measurements (positive integer or `inf`).
    #[arg(long = "N")]
    pub count: Option<Count>,
    /// Interval between measurements.
    #[arg(long = "delta-tau", allow_negative_numbers = true)]
    pub delta_tau: Option<f64>,
    /// Regulator for the divergent pieces.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Tolerance overriding every verification entry.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Number of curve points, including t = 0.
    #[arg(long)]
    pub points: Option<usize>,
    /// Flat-band kernel convention.
    #[arg(long, value_enum)]
    pub kernel: Option<Kernel>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Cap N at the Landau–Peierls bound and compare with N = inf.
    #[arg(long = "landau-peierls")]
    pub landau_peierls: bool,
    /// Exit 0 even when the verification report contains FLAG entries.
    #[arg(long = "allow-flags")]
    pub allow_flags: bool,
    /// Config file of `key = value` lines; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    E,
    A,
    Sigma,
    TauE,
    TauZ,
    T,
    N,
    DeltaTau,
    Epsilon,
    Tol,
    Points,
    Kernel,
    LandauPeierls,
    AllowFlags,
}

impl Key {
    const ALL: [Key; 14] = [
        Key::E,
        Key::A,
        Key::Sigma,
        Key::TauE,
        Key::TauZ,
        Key::T,
        Key::N,
        Key::DeltaTau,
        Key::Epsilon,
        Key::Tol,
        Key::Points,
        Key::Kernel,
        Key::LandauPeierls,
        Key::AllowFlags,
    ];

    fn name(self) -> &'static str {
        match self {
            Key::E => "E",
            Key::A => "a",
            Key::Sigma => "sigma",
            Key::TauE => "tau_E",
            Key::TauZ => "tau_z",
            Key::T => "T",
            Key::N => "N",
            Key::DeltaTau => "delta_tau",
            Key::Epsilon => "epsilon",
            Key::Tol => "tol",
            Key::Points => "points",
            Key::Kernel => "kernel",
            Key::LandauPeierls => "landau_peierls",
            Key::AllowFlags => "allow_flags",
        }
    }

    fn flag(self) -> String {
        format!("--{}", self.name().replace('_', "-"))
    }

    fn is_set(self, p: &Params) -> bool {
        match self {
            Key::E => p.energy.is_some(),
            Key::A => p.a.is_some(),
            Key::Sigma => p.sigma.is_some(),
            Key::TauE => p.tau_e.is_some(),
            Key::TauZ => p.tau_z.is_some(),
            Key::T => p.total_time.is_some(),
            Key::N => p.count.is_some(),
            Key::DeltaTau => p.delta_tau.is_some(),
            Key::Epsilon => p.epsilon.is_some(),
            Key::Tol => p.tol.is_some(),
            Key::Points => p.points.is_some(),
            Key::Kernel => p.kernel.is_some(),
            Key::LandauPeierls => p.landau_peierls,
            Key::AllowFlags => p.allow_flags,
        }
    }

    /// Resolved value for the `meta` block, `None` when unset.
    fn json(self, p: &Params) -> Option<Value> {
        if !self.is_set(p) {
            return None;
        }
        Some(match self {
            Key::E => json!(p.energy),
            Key::A => json!(p.a),
            Key::Sigma => json!(p.sigma),
            Key::TauE => json!(p.tau_e),
            Key::TauZ => json!(p.tau_z),
            Key::T => json!(p.total_time),
            Key::N => match p.count.map(|c| c.0) {
                Some(MeasurementCount::Finite(n)) => json!(n),
                _ => json!("inf"),
            },
            Key::DeltaTau => json!(p.delta_tau),
            Key::Epsilon => json!(p.epsilon),
            Key::Tol => json!(p.tol),
            Key::Points => json!(p.points),
            Key::Kernel => json!(match p.kernel {
                Some(Kernel::Integrated) => "integrated",
                _ => "printed",
            }),
            Key::LandauPeierls => json!(p.landau_peierls),
            Key::AllowFlags => json!(p.allow_flags),
        })
    }
}

fn parse_key(raw: &str) -> Option<Key> {
    let norm = raw.trim().replace('-', "_");
    Key::ALL.into_iter().find(|k| k.name() == norm)
}

fn parse_bool(v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => bail!("expected a boolean, got `{v}`"),
    }
}

fn parse_num<T: FromStr>(v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| anyhow!("malformed number `{v}`: {e}"))
}

/// Read a `key = value` config file. `#` starts a comment; blank lines are
/// skipped; `format` and `output` are accepted alongside the parameters.
pub fn parse_config_text(text: &str) -> Result<Params> {
    let mut p = Params::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {lineno}: expected `key = value`"))?;
        let (k, v) = (k.trim(), v.trim());
        let res: Result<()> = (|| {
            match k.replace('-', "_").as_str() {
                "format" => p.format = Some(<Format as ValueEnum>::from_str(v, true).map_err(|e| anyhow!(e))?),
                "output" => p.output = Some(PathBuf::from(v)),
                _ => match parse_key(k).ok_or_else(|| anyhow!("unknown key `{k}`"))? {
                    Key::E => p.energy = Some(parse_num(v)?),
                    Key::A => p.a = Some(parse_num(v)?),
                    Key::Sigma => p.sigma = Some(parse_num(v)?),
                    Key::TauE => p.tau_e = Some(parse_num(v)?),
                    Key::TauZ => p.tau_z = Some(parse_num(v)?),
                    Key::T => p.total_time = Some(parse_num(v)?),
                    Key::N => p.count = Some(v.parse::<Count>().map_err(|e| anyhow!(e))?),
                    Key::DeltaTau => p.delta_tau = Some(parse_num(v)?),
                    Key::Epsilon => p.epsilon = Some(parse_num(v)?),
                    Key::Tol => p.tol = Some(parse_num(v)?),
                    Key::Points => p.points = Some(parse_num(v)?),
                    Key::Kernel => p.kernel = Some(<Kernel as ValueEnum>::from_str(v, true).map_err(|e| anyhow!(e))?),
                    Key::LandauPeierls => p.landau_peierls = parse_bool(v)?,
                    Key::AllowFlags => p.allow_flags = parse_bool(v)?,
                },
            }
            Ok(())
        })();
        res.with_context(|| format!("config line {lineno}"))?;
    }
    Ok(p)
}

fn merge(flags: &Params, file: Params) -> Params {
    Params {
        energy: flags.energy.or(file.energy),
        a: flags.a.or(file.a),
        sigma: flags.sigma.or(file.sigma),
        tau_e: flags.tau_e.or(file.tau_e),
        tau_z: flags.tau_z.or(file.tau_z),
        total_time: flags.total_time.or(file.total_time),
        count: flags.count.or(file.count),
        delta_tau: flags.delta_tau.or(file.delta_tau),
        epsilon: flags.epsilon.or(file.epsilon),
        tol: flags.tol.or(file.tol),
        points: flags.points.or(file.points),
        kernel: flags.kernel.or(file.kernel),
        format: flags.format.or(file.format),
        output: flags.output.clone().or(file.output),
        landau_peierls: flags.landau_peierls || file.landau_peierls,
        allow_flags: flags.allow_flags || file.allow_flags,
        config: flags.config.clone(),
    }
}

/// Fully resolved and validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: Params,
    pub format: Format,
    pub output: Option<PathBuf>,
}

pub const DEFAULT_POINTS: usize = 101;

impl RunConfig {
    /// Resolved configuration as a JSON object, keys sorted.
    pub fn meta(&self) -> Value {
        let mut m = BTreeMap::new();
        m.insert("command".to_string(), json!(self.command.name()));
        m.insert(
            "format".to_string(),
            json!(match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }),
        );
        if let Some(o) = &self.output {
            m.insert("output".to_string(), json!(o.display().to_string()));
        }
        let mut params = BTreeMap::new();
        for k in Key::ALL {
            if let Some(v) = k.json(&self.params) {
                params.insert(k.name().to_string(), v);
            }
        }
        m.insert("params".to_string(), json!(params));
        json!(m)
    }

    pub fn points(&self) -> usize {
        self.params.points.unwrap_or(DEFAULT_POINTS)
    }

    pub fn energy(&self) -> f64 {
        self.params.energy.expect("validated")
    }
}

fn read_config_file(path: &Path) -> Result<Params> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
    parse_config_text(&text).with_context(|| format!("in config file {}", path.display()))
}

/// Merge flags over the optional config file and validate against the command.
pub fn resolve(command: &Command) -> Result<RunConfig> {
    let flags = command.params();
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => Params::default(),
    };
    resolve_with(command.kind(), flags, file)
}

/// As [`resolve`] with the config-file contents supplied directly.
pub fn resolve_with(kind: CommandKind, flags: &Params, file: Params) -> Result<RunConfig> {
    let params = merge(flags, file);
    let allowed = |k: Key| kind.required().contains(&k) || kind.optional().contains(&k);
    for k in Key::ALL {
        if k.is_set(&params) && !allowed(k) {
            bail!("{} is not used by `{kind}`", k.flag());
        }
    }
    for &k in kind.required() {
        if !k.is_set(&params) {
            bail!("`{kind}` requires {}", k.flag());
        }
    }
    validate(kind, &params)?;
    Ok(RunConfig {
        command: kind,
        format: params.format.unwrap_or_default(),
        output: params.output.clone(),
        params,
    })
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if x.is_nan() || x <= 0.0 || x.is_infinite() => bail!("{name} must be positive and finite, got {x}"),
        _ => Ok(()),
    }
}

fn validate(kind: CommandKind, p: &Params) -> Result<()> {
    if let Some(e) = p.energy {
        if e == 0.0 || !e.is_finite() {
            bail!("--E must be finite and non-zero, got {e}");
        }
    }
    positive("--a", p.a)?;
    positive("--tau-E", p.tau_e)?;
    positive("--tau-z", p.tau_z)?;
    positive("--T", p.total_time)?;
    positive("--delta-tau", p.delta_tau)?;
    positive("--epsilon", p.epsilon)?;
    positive("--tol", p.tol)?;
    if let Some(s) = p.sigma {
        if s.is_nan() || s < 0.0 || s.is_infinite() {
            bail!("--sigma must be finite and non-negative, got {s}");
        }
    }
    if let Some(n) = p.points {
        if n < 2 {
            bail!("--points must be at least 2, got {n}");
        }
    }
    if kind == CommandKind::ZenoGaussian && p.count == Some(Count(MeasurementCount::Infinite)) {
        bail!("`zeno-gaussian` needs a finite --N");
    }
    Ok(())
}
