//! The `jtriple` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jtriple_core::locality::{commutator_counterexample, run_battery, summary, BatteryMix};
use jtriple_core::rng::{random_map, trial_rng};
use jtriple_core::{CheckReport, ComplexLinearMap, DerivationBasis, TripleSystem, DEFAULT_TOL};

use crate::io::{
    read_element, read_json, read_map, read_system, to_json, BasisJson, BatteryJson,
    BatteryMapJson, MapJson, ReportJson, SystemJson,
};

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "JTRIPLE_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "jtriple",
    version,
    about = "Triple systems, derivations and their characterizations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a system description.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Compute a real basis of the triple derivations of a system.
    DerBasis {
        system: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run selected checks on a linear map.
    Check(CheckArgs),
    /// Classify a mix of random maps with all four characterizations.
    Battery(BatteryArgs),
    /// Write a named example map.
    Gallery {
        #[command(subcommand)]
        map: GalleryMap,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Rectangular complex matrices M(rows, cols).
    Matrix {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
    /// The Hilbert space C^n, stored as M(1, n).
    Hilbert {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
enum GalleryMap {
    /// a -> x0 a - a x0 on M(n, n), with x0 = E12 unless given.
    Commutator {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Element file holding x0.
        #[arg(long)]
        x0: Option<PathBuf>,
    },
    /// The identity map.
    Identity {
        #[arg(long)]
        dim: usize,
    },
    /// A map with complex Gaussian entries.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A random member of the derivation algebra of a system.
    Derivation {
        system: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The inner derivation L(a, b) - L(b, a).
    Inner {
        system: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to $JTRIPLE_TOL, then 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    system: PathBuf,
    map: PathBuf,
    #[arg(long)]
    h1: bool,
    #[arg(long)]
    h2: bool,
    #[arg(long)]
    local: bool,
    #[arg(long)]
    weak_local: bool,
    #[arg(long)]
    derivation: bool,
    #[arg(long)]
    dissipative: bool,
    #[arg(long)]
    tripotent_identities: bool,
    /// Derivation basis file; defaults to a sidecar next to the system file.
    #[arg(long)]
    basis: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct BatteryArgs {
    system: PathBuf,
    #[arg(long, default_value_t = 30)]
    derivations: usize,
    #[arg(long, default_value_t = 30)]
    generic: usize,
    #[arg(long, default_value_t = 30)]
    perturbed: usize,
    #[arg(long, default_value_t = 10)]
    commutators: usize,
    #[arg(long)]
    basis: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

/// Runs the command line on `args` (without the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("jtriple")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INPUT_ERROR
            } else {
                EXIT_OK
            };
        }
    };
    match execute(cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT_ERROR
        }
    }
}

/// Returns whether every check passed.
fn execute(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Gen { kind, output } => {
            let sys = match kind {
                GenKind::Matrix { rows, cols } => TripleSystem::matrix(rows, cols)?,
                GenKind::Hilbert { n } => TripleSystem::hilbert(n)?,
            };
            emit(output.as_deref(), &to_json(&SystemJson::from(&sys)))?;
            Ok(true)
        }
        Command::DerBasis { system, output } => {
            let sys = read_system(&system)?;
            emit(
                output.as_deref(),
                &to_json(&BasisJson::from(&sys.derivation_basis())),
            )?;
            Ok(true)
        }
        Command::Gallery { map, output } => {
            let t = gallery(map)?;
            emit(output.as_deref(), &to_json(&MapJson::from(&t)))?;
            Ok(true)
        }
        Command::Check(args) => check(args),
        Command::Battery(args) => battery(args),
    }
}

fn gallery(map: GalleryMap) -> anyhow::Result<ComplexLinearMap> {
    Ok(match map {
        GalleryMap::Commutator { n, x0 } => {
            let x0 = x0.as_deref().map(read_element).transpose()?;
            let c = commutator_counterexample(n, x0.as_ref())?;
            if c.normal {
                eprintln!("warning: x0 is normal, so the commutator map may be a derivation");
            }
            c.map
        }
        GalleryMap::Identity { dim } => {
            ensure!(dim > 0, "dimension must be positive");
            ComplexLinearMap::identity(dim)
        }
        GalleryMap::Random { dim, seed } => {
            ensure!(dim > 0, "dimension must be positive");
            random_map(dim, &mut trial_rng(seed, 0))
        }
        GalleryMap::Derivation { system, seed } => read_system(&system)?
            .derivation_basis()
            .random_member(&mut trial_rng(seed, 0)),
        GalleryMap::Inner { system, a, b } => {
            read_system(&system)?.inner_derivation(&read_element(&a)?, &read_element(&b)?)?
        }
    })
}

fn resolve_tol(flag: Option<f64>) -> anyhow::Result<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .with_context(|| format!("{TOL_ENV}={s:?} is not a number"))?,
            Err(_) => DEFAULT_TOL,
        },
    };
    ensure!(
        tol > 0.0 && tol.is_finite(),
        "tolerance must be positive, got {tol}"
    );
    Ok(tol)
}

fn validate(common: &Common) -> anyhow::Result<f64> {
    ensure!(common.trials >= 1, "--trials must be at least 1");
    resolve_tol(common.tol)
}

/// The derivation basis from `explicit`, else from the sidecar cache next to
/// the system file, computing and caching it if needed.
fn load_basis(
    sys: &TripleSystem,
    system_path: &Path,
    explicit: Option<&Path>,
) -> anyhow::Result<DerivationBasis> {
    if let Some(path) = explicit {
        return read_json::<BasisJson>(path)?.into_basis(sys.dim());
    }
    let sidecar = sidecar_path(system_path);
    if let Ok(json) = read_json::<BasisJson>(&sidecar) {
        if let Ok(basis) = json.into_basis(sys.dim()) {
            return Ok(basis);
        }
    }
    let basis = sys.derivation_basis();
    if let Err(e) = fs::write(&sidecar, to_json(&BasisJson::from(&basis))) {
        eprintln!(
            "warning: could not cache derivation basis at {}: {e}",
            sidecar.display()
        );
    }
    Ok(basis)
}

/// `sys.json` -> `sys.basis.json`.
pub fn sidecar_path(system_path: &Path) -> PathBuf {
    let stem = system_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    system_path.with_file_name(format!("{stem}.basis.json"))
}

fn check(args: CheckArgs) -> anyhow::Result<bool> {
    let tol = validate(&args.common)?;
    let sys = read_system(&args.system)?;
    let t = read_map(&args.map)?;
    if t.dim() != sys.dim() {
        bail!("map has dimension {}, system has {}", t.dim(), sys.dim());
    }
    let Common { trials, seed, .. } = args.common;
    let basis = if args.local || args.weak_local {
        Some(load_basis(&sys, &args.system, args.basis.as_deref())?)
    } else {
        None
    };

    let mut reports: Vec<CheckReport> = Vec::new();
    if args.derivation {
        reports.push(sys.is_triple_derivation(&t, tol));
    }
    if args.h1 {
        reports.push(sys.check_h1(&t, trials, seed, tol)?);
    }
    if args.h2 {
        reports.push(sys.check_h2(&t, trials, seed, tol)?);
    }
    if let Some(basis) = &basis {
        if args.local {
            reports.push(sys.check_local(&t, basis, trials, seed, tol)?);
        }
        if args.weak_local {
            reports.push(sys.check_weak_local(&t, basis, trials, seed, tol)?);
        }
    }
    if args.dissipative {
        reports.push(sys.check_dissipative(&t, trials, seed, tol)?);
    }
    if args.tripotent_identities {
        reports.push(sys.check_tripotent_identities(&t, trials, seed, tol)?);
    }
    ensure!(!reports.is_empty(), "no checks selected");

    let pass = reports.iter().all(|r| r.pass);
    let body = match args.common.format {
        Format::Json => to_json(&reports.iter().map(ReportJson::from).collect::<Vec<_>>()),
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let _ = writeln!(s, "{}", report_line(r));
            }
            s
        }
    };
    emit(args.common.output.as_deref(), &body)?;
    Ok(pass)
}

fn report_line(r: &CheckReport) -> String {
    format!(
        "{:<22} {} max_residual={:e} trials={} seed={} tol={:e}",
        r.name,
        if r.pass { "PASS" } else { "FAIL" },
        r.max_residual,
        r.trials,
        r.seed,
        r.tol
    )
}

fn battery(args: BatteryArgs) -> anyhow::Result<bool> {
    let tol = validate(&args.common)?;
    let sys = read_system(&args.system)?;
    let basis = load_basis(&sys, &args.system, args.basis.as_deref())?;
    let mix = BatteryMix {
        derivations: args.derivations,
        generic: args.generic,
        perturbed: args.perturbed,
        commutators: args.commutators,
    };
    let Common { trials, seed, .. } = args.common;
    let entries = run_battery(&sys, &basis, mix, trials, seed, tol)?;
    let agreeing = entries
        .iter()
        .filter(|e| e.classification.agreement())
        .count();
    let all_agree = agreeing == entries.len();

    let body = match args.common.format {
        Format::Json => to_json(&BatteryJson {
            seed,
            trials,
            tol,
            maps: entries.len(),
            agreeing,
            all_agree,
            results: entries.iter().map(BatteryMapJson::from).collect(),
        }),
        Format::Text => {
            let mut s = String::new();
            for e in &entries {
                let _ = writeln!(
                    s,
                    "{:>4} {:<11} {}",
                    e.index,
                    e.family.name(),
                    summary(&e.classification)
                );
            }
            let _ = writeln!(
                s,
                "agreement {agreeing}/{} seed={seed} trials={trials} tol={tol:e}",
                entries.len()
            );
            s
        }
    };
    emit(args.common.output.as_deref(), &body)?;
    Ok(all_agree)
}

fn emit(output: Option<&Path>, body: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
