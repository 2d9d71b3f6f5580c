use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use vvp_core::assembly::{kappa1_limit, Discretisation, BOUND_SLACK};
use vvp_core::fe::ElementKind;
use vvp_core::solver::{InitialGuess, Method, NonlinearSettings};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Subcommand)]
pub enum Command {
    /// Manufactured-solution convergence study on the unit square.
    Convergence,
    /// Lid-driven cavity on (0,2)x(0,1).
    Cavity,
    /// Small-data constants of the fixed-point argument.
    Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    TaylorHood,
    Mini,
    BernardiRaugel,
}

impl Family {
    pub fn discretisation(self) -> Discretisation {
        match self {
            Family::TaylorHood => Discretisation::TaylorHood,
            Family::Mini => Discretisation::Mini,
            Family::BernardiRaugel => Discretisation::BernardiRaugel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VorticitySpace {
    Cg1,
    Dg0,
    Dg1,
}

impl VorticitySpace {
    pub fn kind(self) -> ElementKind {
        match self {
            VorticitySpace::Cg1 => ElementKind::P1,
            VorticitySpace::Dg0 => ElementKind::DG0,
            VorticitySpace::Dg1 => ElementKind::DG1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Newton,
    Picard,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

macro_rules! display_via_value_enum {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&value_name(self))
            }
        }
    )*};
}
display_via_value_enum!(Command, Family, VorticitySpace, MethodArg);

/// A validated run description with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub family: Family,
    pub vorticity: VorticitySpace,
    /// Number of meshes in a convergence study, `n = 2, 4, …, 2^levels`.
    pub levels: usize,
    pub nx: usize,
    pub ny: usize,
    pub nu0: f64,
    /// Upper viscosity of the manufactured case; the cavity derives its own.
    pub nu1: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub perm: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub method: MethodArg,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Partial::default().resolve().expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn settings(&self) -> NonlinearSettings {
        let method = match self.method {
            MethodArg::Newton => Method::Newton,
            MethodArg::Picard => Method::Picard,
        };
        NonlinearSettings { method, tol: self.tol, max_iters: self.max_iters, initial_guess: InitialGuess::Zero }
    }

    /// Flat `key = value` text that parses back to the same config.
    pub fn to_kv_string(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("command", self.command.to_string()),
            ("family", self.family.to_string()),
            ("vorticity", self.vorticity.to_string()),
            ("levels", self.levels.to_string()),
            ("nx", self.nx.to_string()),
            ("ny", self.ny.to_string()),
            ("nu0", self.nu0.to_string()),
            ("nu1", self.nu1.to_string()),
            ("kappa1", self.kappa1.to_string()),
            ("kappa2", self.kappa2.to_string()),
            ("perm", self.perm.to_string()),
            ("tol", self.tol.to_string()),
            ("max-iters", self.max_iters.to_string()),
            ("method", self.method.to_string()),
            ("out", self.out.display().to_string()),
        ] {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    /// Pairings outside the covered families. Advisory only.
    pub fn warnings(&self) -> Vec<String> {
        use VorticitySpace::*;
        let covered: &[VorticitySpace] = match self.family {
            Family::TaylorHood | Family::Mini => &[Cg1, Dg1],
            Family::BernardiRaugel => &[Cg1, Dg0],
        };
        let mut w = Vec::new();
        if !covered.contains(&self.vorticity) {
            w.push(format!(
                "vorticity space {} with {} is not covered by the error analysis; results are unguaranteed",
                self.vorticity, self.family
            ));
        }
        w
    }
}

#[derive(Parser, Debug)]
#[command(name = "vvp", version, about = "Velocity-vorticity-pressure Navier-Stokes solver")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Flat key = value file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    family: Option<Family>,
    #[arg(long, global = true)]
    vorticity: Option<VorticitySpace>,
    #[arg(long, global = true)]
    levels: Option<usize>,
    #[arg(long, global = true)]
    nx: Option<usize>,
    #[arg(long, global = true)]
    ny: Option<usize>,
    #[arg(long, global = true)]
    nu0: Option<f64>,
    #[arg(long, global = true)]
    nu1: Option<f64>,
    #[arg(long, global = true)]
    kappa1: Option<f64>,
    #[arg(long, global = true)]
    kappa2: Option<f64>,
    #[arg(long, global = true)]
    perm: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    #[arg(long, global = true)]
    method: Option<MethodArg>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

/// Settings before defaults are applied.
#[derive(Debug, Clone, Default, PartialEq)]
struct Partial {
    command: Option<Command>,
    family: Option<Family>,
    vorticity: Option<VorticitySpace>,
    levels: Option<usize>,
    nx: Option<usize>,
    ny: Option<usize>,
    nu0: Option<f64>,
    nu1: Option<f64>,
    kappa1: Option<f64>,
    kappa2: Option<f64>,
    perm: Option<f64>,
    tol: Option<f64>,
    max_iters: Option<usize>,
    method: Option<MethodArg>,
    out: Option<PathBuf>,
}

impl Partial {
    fn from_cli(c: Cli) -> Self {
        Partial {
            command: c.command,
            family: c.family,
            vorticity: c.vorticity,
            levels: c.levels,
            nx: c.nx,
            ny: c.ny,
            nu0: c.nu0,
            nu1: c.nu1,
            kappa1: c.kappa1,
            kappa2: c.kappa2,
            perm: c.perm,
            tol: c.tol,
            max_iters: c.max_iters,
            method: c.method,
            out: c.out,
        }
    }

    /// Fields set in `other` win.
    fn overlay(self, other: Partial) -> Partial {
        Partial {
            command: other.command.or(self.command),
            family: other.family.or(self.family),
            vorticity: other.vorticity.or(self.vorticity),
            levels: other.levels.or(self.levels),
            nx: other.nx.or(self.nx),
            ny: other.ny.or(self.ny),
            nu0: other.nu0.or(self.nu0),
            nu1: other.nu1.or(self.nu1),
            kappa1: other.kappa1.or(self.kappa1),
            kappa2: other.kappa2.or(self.kappa2),
            perm: other.perm.or(self.perm),
            tol: other.tol.or(self.tol),
            max_iters: other.max_iters.or(self.max_iters),
            method: other.method.or(self.method),
            out: other.out.or(self.out),
        }
    }

    fn from_kv(text: &str) -> Result<Partial, CliError> {
        let mut p = Partial::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "command" => p.command = Some(enum_value(key, value)?),
                "family" => p.family = Some(enum_value(key, value)?),
                "vorticity" => p.vorticity = Some(enum_value(key, value)?),
                "levels" => p.levels = Some(number(key, value)?),
                "nx" => p.nx = Some(number(key, value)?),
                "ny" => p.ny = Some(number(key, value)?),
                "nu0" => p.nu0 = Some(number(key, value)?),
                "nu1" => p.nu1 = Some(number(key, value)?),
                "kappa1" => p.kappa1 = Some(number(key, value)?),
                "kappa2" => p.kappa2 = Some(number(key, value)?),
                "perm" => p.perm = Some(number(key, value)?),
                "tol" => p.tol = Some(number(key, value)?),
                "max-iters" | "max_iters" => p.max_iters = Some(number(key, value)?),
                "method" => p.method = Some(enum_value(key, value)?),
                "out" => p.out = Some(PathBuf::from(value)),
                _ => return Err(CliError::Validation(format!("line {}: unknown key `{key}`", lineno + 1))),
            }
        }
        Ok(p)
    }

    fn resolve(self) -> Result<RunConfig, CliError> {
        let command = self.command.unwrap_or(Command::Convergence);
        let cavity = command == Command::Cavity;
        let nu0 = self.nu0.unwrap_or(if cavity { 0.002 } else { 0.1 });
        let method = self.method.unwrap_or(MethodArg::Newton);
        let cfg = RunConfig {
            command,
            family: self.family.unwrap_or(if cavity { Family::Mini } else { Family::TaylorHood }),
            vorticity: self.vorticity.unwrap_or(if cavity { VorticitySpace::Cg1 } else { VorticitySpace::Dg1 }),
            levels: self.levels.unwrap_or(5),
            nx: self.nx.unwrap_or(64),
            ny: self.ny.unwrap_or(32),
            nu0,
            nu1: self.nu1.unwrap_or(1.0),
            kappa1: self.kappa1.unwrap_or(kappa1_limit(nu0)),
            kappa2: self.kappa2.unwrap_or(nu0 / 2.0),
            perm: self.perm.unwrap_or(0.1),
            tol: self.tol.unwrap_or(1e-8),
            max_iters: self.max_iters.unwrap_or(match method {
                MethodArg::Newton => 20,
                MethodArg::Picard => 50,
            }),
            method,
            out: self.out.unwrap_or_else(|| PathBuf::from("out")),
        };
        validate(&cfg)?;
        Ok(cfg)
    }
}

fn enum_value<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, false).map_err(|_| {
        let allowed: Vec<String> = T::value_variants().iter().map(value_name).collect();
        CliError::Validation(format!("key `{key}`: `{value}` is not one of {}", allowed.join(", ")))
    })
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Validation(format!("key `{key}`: cannot parse `{value}` as a number")))
}

fn validate(c: &RunConfig) -> Result<(), CliError> {
    let bad = |key: &str, msg: String| Err(CliError::Validation(format!("key `{key}`: {msg}")));
    let positive = [("nu0", c.nu0), ("kappa2", c.kappa2), ("perm", c.perm), ("tol", c.tol)];
    for (key, v) in positive {
        if !(v > 0.0 && v.is_finite()) {
            return bad(key, format!("must be positive and finite, got {v}"));
        }
    }
    if !(c.nu1 >= c.nu0 && c.nu1.is_finite()) {
        return bad("nu1", format!("must be finite and at least nu0 = {}, got {}", c.nu0, c.nu1));
    }
    let limit = kappa1_limit(c.nu0);
    if !(c.kappa1 > 0.0 && c.kappa1 <= limit * (1.0 + BOUND_SLACK)) {
        return bad("kappa1", format!("{} must lie in (0, 2/3 nu0] = (0, {limit}]", c.kappa1));
    }
    if !(2..=10).contains(&c.levels) {
        return bad("levels", format!("must lie in 2..=10, got {}", c.levels));
    }
    if c.command == Command::Cavity {
        for (key, v) in [("nx", c.nx), ("ny", c.ny)] {
            if v < 8 {
                return bad(key, format!("the cavity needs at least 8 cells per side, got {v}"));
            }
        }
    }
    if c.max_iters == 0 {
        return bad("max-iters", "must be at least 1".into());
    }
    Ok(())
}

/// Parses command-line arguments, the first being the program name.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut cli = Cli::try_parse_from(args)?;
    let base = match cli.config.take() {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path, source })?;
            Partial::from_kv(&text)?
        }
        None => Partial::default(),
    };
    base.overlay(Partial::from_cli(cli)).resolve()
}

/// Parses a flat `key = value` configuration.
pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    Partial::from_kv(text)?.resolve()
}
