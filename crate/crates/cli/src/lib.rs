//! `tlspin` command line: argument parsing, settings resolution and the six
//! subcommands. [`run`] is the whole program minus process exit, so tests can
//! drive it in-process.

pub mod config;
pub mod output;
pub mod specs;

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand};
use tlspin_core::doublewell::WellParams;
use tlspin_core::hamiltonian::ModelParams;
use tlspin_core::numerics::{TOL_ABS, TOL_EIG};
use tlspin_core::tl_algebra::Sign;

use config::{parse_config, ConfigFile};
use output::Format;
use specs::{NList, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_ZENO_N: &str = "1,2,5,10,50,100,200";
pub const DEFAULT_STEPS: usize = 101;
pub const DEFAULT_MAX_SITES: usize = 5;
pub const DEFAULT_SEED: u64 = 0x7115_0b1e;

#[derive(Debug, Parser)]
#[command(name = "tlspin", version, about = "Temperley-Lieb four-spin model: checks, spectrum, dynamics")]
pub struct Cli {
    /// Output format; the default depends on the subcommand.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Flat key = value file with defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Tolerance for algebraic identities.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_abs: Option<f64>,

    /// Tolerance for eigen-decomposition results.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_eig: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    #[arg(long = "J", allow_hyphen_values = true)]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// +1 or -1
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<Sign>,
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct WellArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    #[arg(long = "L", allow_hyphen_values = true)]
    pub l: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long = "V0", allow_hyphen_values = true)]
    pub v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hbar: Option<f64>,
    /// Table over V0 or a instead of a single point, e.g. V0=1:100:log10[:count].
    #[arg(long, value_name = "SPEC")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every algebraic and spectral check; exit 1 if a mandatory one fails.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Add seeded noise of this size to the generator (harness self-test).
        #[arg(long, value_name = "SIZE")]
        perturb: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Longest chain for the relation checks.
        #[arg(long, default_value_t = DEFAULT_MAX_SITES)]
        max_sites: usize,
    },
    /// Full spectrum of H with level multiplicities.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Tunneling trace starting from e1.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        /// Last sample time; defaults to the tunneling time.
        #[arg(long, allow_hyphen_values = true)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
    },
    /// Survival of e1 under n equally spaced measurements within the tunneling time.
    Zeno {
        #[command(flatten)]
        model: ModelArgs,
        /// Single value or comma list.
        #[arg(long, default_value = DEFAULT_ZENO_N)]
        n: NList,
    },
    /// Map double-well parameters onto (J, delta).
    Well {
        #[command(flatten)]
        well: WellArgs,
    },
    /// Evaluate a cup/cap diagram.
    #[command(group(ArgGroup::new("source").required(true).args(["expr", "file"])))]
    Diagram {
        expr: Option<String>,
        /// Read the diagram from a file.
        #[arg(long, value_name = "PATH")]
        file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<Sign>,
    },
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => m,
        }
    }
}

impl From<tlspin_core::Error> for Failure {
    fn from(e: tlspin_core::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

/// Built-ins, then the config file, then flags.
#[derive(Debug, Clone)]
pub(crate) struct Settings {
    pub format: Option<Format>,
    pub tol_abs: f64,
    pub tol_eig: f64,
    pub file: ConfigFile,
}

impl Settings {
    fn resolve(cli: &Cli) -> Result<Self, Failure> {
        let file = match &cli.config {
            None => ConfigFile::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
                parse_config(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
            }
        };
        let tol = |flag: Option<f64>, cfg: Option<f64>, default: f64, name: &str| {
            let v = flag.or(cfg).unwrap_or(default);
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Failure::Usage(format!("{name} must be finite and positive, got {v}")))
            }
        };
        Ok(Self {
            format: cli.format.or(file.format),
            tol_abs: tol(cli.tol_abs, file.tol_abs, TOL_ABS, "tol_abs")?,
            tol_eig: tol(cli.tol_eig, file.tol_eig, TOL_EIG, "tol_eig")?,
            file,
        })
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn model(&self, m: &ModelArgs) -> Result<ModelParams, Failure> {
        let f = &self.file;
        ModelParams::new(
            m.j.or(f.j).unwrap_or(1.0),
            m.delta.or(f.delta).unwrap_or(0.1),
            m.phi.or(f.phi).unwrap_or(0.0),
            m.eps.or(f.eps).unwrap_or(Sign::Plus),
            m.hbar.or(f.hbar).unwrap_or(1.0),
        )
        .map_err(|e| Failure::Usage(e.to_string()))
    }

    pub fn well(&self, w: &WellArgs) -> Result<WellParams, Failure> {
        let f = &self.file;
        WellParams::new(
            w.m.or(f.m).unwrap_or(1.0),
            w.l.or(f.l).unwrap_or(2.0),
            w.a.or(f.a).unwrap_or(0.5),
            w.v0.or(f.v0).unwrap_or(10.0),
            w.hbar.or(f.hbar).unwrap_or(1.0),
        )
        .map_err(|e| Failure::Usage(e.to_string()))
    }
}

/// Parses `args` (program name first) and runs the chosen subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let result = Settings::resolve(&cli).and_then(|settings| commands::dispatch(&cli.command, &settings));
    match result {
        Ok(report) => Outcome {
            code: report.code,
            stdout: report.stdout,
            stderr: report.stderr,
        },
        Err(f) => Outcome {
            code: f.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message()),
        },
    }
}
