use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qergo::commands;
use qergo::config::{
    base_config, BoundsConfig, CueConfig, DriveConfig, DriveKind, Expectation, HaarOracleConfig, LatticeConfig,
    MomentKindArg, SpinchainConfig, VerifyDesignConfig,
};
use qergo::manifest::OUT_DIR_ENV;
use qergo::{execute, CliError, CliResult, Report};

/// Ergodicity diagnostics for driven quantum systems.
///
/// Exit status: 0 pass, 1 failed check, 2 usage or configuration error.
#[derive(Parser, Debug)]
#[command(name = "qergo", version)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for CSV outputs and run manifests.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = "qergo-out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Temporal moments of a drive (or Haar samples) against Haar values.
    VerifyDesign(VerifyDesignArgs),
    /// Ergodic-lattice verification, export and Theorem-G2 checks.
    Lattice(LatticeArgs),
    /// Δ⁽¹⁾/Δ⁽²⁾ series and plateau sweeps for the kicked Ising chain.
    Spinchain(SpinchainArgs),
    /// Path-length lower bounds B₁, B₂, γ and packing numbers.
    Bounds(BoundsArgs),
    /// Euler-angle CUE drive checks.
    Cue(CueArgs),
    /// Closed-form Haar moments against Monte-Carlo.
    HaarOracle(HaarOracleArgs),
}

/// Accepts `100000`, `1e5` or `1.0e5`.
fn count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(format!("not a non-negative integer: {s}"))
    }
}

#[derive(Args, Debug)]
struct VerifyDesignArgs {
    /// TOML or JSON config (a run manifest works too).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    drive: Option<DriveKind>,
    /// Reference ensemble instead of a drive (`haar`).
    #[arg(long)]
    ensemble: Option<String>,
    /// Dimension (Haar ensemble, cue, static and el-11 drives).
    #[arg(long)]
    d: Option<usize>,
    /// Chain length for the Ising kick drives.
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    omegas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    quasienergies: Option<Vec<f64>>,
    /// Builtin lattice name or lattice JSON path for `--drive lattice`.
    #[arg(long)]
    lattice: Option<String>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    kind: Option<MomentKindArg>,
    #[arg(long = "T", value_parser = count)]
    t: Option<usize>,
    #[arg(long, value_parser = count)]
    samples: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = count)]
    pair_budget: Option<usize>,
}

impl VerifyDesignArgs {
    fn resolve(self) -> CliResult<VerifyDesignConfig> {
        let mut c: VerifyDesignConfig = base_config(self.config.as_deref())?;
        let touches_drive = self.l.is_some() || self.omegas.is_some() || self.quasienergies.is_some() || self.lattice.is_some();
        if let Some(kind) = self.drive {
            if c.drive.as_ref().is_none_or(|d| d.kind != kind) {
                c.drive = Some(DriveConfig::of(kind));
            }
            c.ensemble = None;
        }
        if let Some(e) = self.ensemble {
            c.ensemble = Some(e);
            if self.drive.is_none() {
                c.drive = None;
            }
        }
        if touches_drive && c.drive.is_none() {
            return Err(CliError::usage("drive parameters given without a drive"));
        }
        if let Some(d) = c.drive.as_mut() {
            set(&mut d.l, self.l);
            set(&mut d.omegas, self.omegas);
            set(&mut d.quasienergies, self.quasienergies);
            set(&mut d.lattice, self.lattice);
            set(&mut d.d, self.d);
        }
        if let Some(d) = self.d {
            c.d = d;
        }
        overlay(&mut c.k, self.k);
        overlay(&mut c.kind, self.kind);
        overlay(&mut c.t, self.t);
        overlay(&mut c.samples, self.samples);
        overlay(&mut c.tol, self.tol);
        overlay(&mut c.seed, self.seed);
        overlay(&mut c.pair_budget, self.pair_budget);
        Ok(c)
    }
}

fn overlay<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// el-11, el-12 or el-23.
    #[arg(long)]
    builtin: Option<String>,
    /// Lattice JSON file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Dimension for el-11.
    #[arg(long)]
    d: Option<usize>,
    /// Check orthonormality and the k-HSE constraints up to order k.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Enumerate resonant tuples directly instead of the hashed fast path.
    #[arg(long)]
    brute_force: bool,
    /// Write the lattice as JSON.
    #[arg(long)]
    export: Option<PathBuf>,
    /// Check ρ_sym(α) against Haar on the derived drive.
    #[arg(long)]
    theorem_g2: bool,
    #[arg(long)]
    g2_tol: Option<f64>,
    #[arg(long)]
    quadrature_points: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    omegas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    quasienergies: Option<Vec<f64>>,
}

impl LatticeArgs {
    fn resolve(self) -> CliResult<LatticeConfig> {
        let mut c: LatticeConfig = base_config(self.config.as_deref())?;
        if self.builtin.is_some() {
            c.file = None;
            c.builtin = self.builtin;
        }
        if self.file.is_some() {
            c.builtin = None;
            c.file = self.file;
        }
        overlay(&mut c.d, self.d);
        c.verify |= self.verify;
        set(&mut c.k, self.k);
        overlay(&mut c.tol, self.tol);
        c.brute_force |= self.brute_force;
        set(&mut c.export, self.export);
        c.theorem_g2 |= self.theorem_g2;
        overlay(&mut c.g2_tol, self.g2_tol);
        overlay(&mut c.quadrature_points, self.quadrature_points);
        set(&mut c.omegas, self.omegas);
        set(&mut c.quasienergies, self.quasienergies);
        Ok(c)
    }
}

#[derive(Args, Debug)]
struct SpinchainArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// floquet, cosine, fibonacci or all (comma separated).
    #[arg(long, value_delimiter = ',')]
    drive: Option<Vec<String>>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long = "K")]
    k: Option<usize>,
    /// 1 for Δ⁽¹⁾, 2 for Δ⁽¹⁾ and Δ⁽²⁾.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_parser = count)]
    t_opt: Option<usize>,
    #[arg(long, value_delimiter = ',', value_parser = count)]
    checkpoints: Option<Vec<usize>>,
    /// Plateau sweep over chain lengths.
    #[arg(long = "sweep-L", value_delimiter = ',')]
    sweep_l: Option<Vec<usize>>,
    /// Plateau sweep over body counts at fixed L.
    #[arg(long = "sweep-K", value_delimiter = ',')]
    sweep_k: Option<Vec<usize>>,
    /// Late time for sweeps.
    #[arg(long, value_parser = count)]
    t_late: Option<usize>,
    /// Check each series for a plateau or a decay after T_opt.
    #[arg(long, value_enum)]
    expect: Option<Expectation>,
    /// Worker threads for independent (drive, L, K) runs.
    #[arg(long)]
    workers: Option<usize>,
}

impl SpinchainArgs {
    fn resolve(self) -> CliResult<SpinchainConfig> {
        let mut c: SpinchainConfig = base_config(self.config.as_deref())?;
        overlay(&mut c.drives, self.drive);
        overlay(&mut c.l, self.l);
        overlay(&mut c.k, self.k);
        overlay(&mut c.order, self.order);
        overlay(&mut c.t_opt, self.t_opt);
        overlay(&mut c.checkpoints, self.checkpoints);
        set(&mut c.sweep_l, self.sweep_l);
        set(&mut c.sweep_k, self.sweep_k);
        overlay(&mut c.t_late, self.t_late);
        set(&mut c.expect, self.expect);
        overlay(&mut c.workers, self.workers);
        Ok(c)
    }
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Radii for the packing table.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
}

impl BoundsArgs {
    fn resolve(self) -> CliResult<BoundsConfig> {
        let mut c: BoundsConfig = base_config(self.config.as_deref())?;
        overlay(&mut c.d, self.d);
        overlay(&mut c.k, self.k);
        overlay(&mut c.eps, self.eps);
        Ok(c)
    }
}

#[derive(Args, Debug)]
struct CueArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    omegas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    quasienergies: Option<Vec<f64>>,
    #[arg(long = "T", value_parser = count)]
    t: Option<usize>,
    /// Samples for the pushforward check.
    #[arg(long, value_parser = count)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = count)]
    pair_budget: Option<usize>,
    #[arg(long)]
    unitary_tol: Option<f64>,
    #[arg(long)]
    frame_tol: Option<f64>,
    #[arg(long)]
    pushforward_tol: Option<f64>,
}

impl CueArgs {
    fn resolve(self) -> CliResult<CueConfig> {
        let mut c: CueConfig = base_config(self.config.as_deref())?;
        overlay(&mut c.d, self.d);
        set(&mut c.omegas, self.omegas);
        set(&mut c.quasienergies, self.quasienergies);
        overlay(&mut c.t, self.t);
        overlay(&mut c.samples, self.samples);
        overlay(&mut c.seed, self.seed);
        overlay(&mut c.pair_budget, self.pair_budget);
        overlay(&mut c.unitary_tol, self.unitary_tol);
        overlay(&mut c.frame_tol, self.frame_tol);
        overlay(&mut c.pushforward_tol, self.pushforward_tol);
        Ok(c)
    }
}

#[derive(Args, Debug)]
struct HaarOracleArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    kind: Option<MomentKindArg>,
    #[arg(long, value_parser = count)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Trace-distance tolerance for state moments.
    #[arg(long)]
    tol: Option<f64>,
    /// Allowed frame-potential gap in standard errors.
    #[arg(long)]
    sigmas: Option<f64>,
}

impl HaarOracleArgs {
    fn resolve(self) -> CliResult<HaarOracleConfig> {
        let mut c: HaarOracleConfig = base_config(self.config.as_deref())?;
        overlay(&mut c.d, self.d);
        overlay(&mut c.k, self.k);
        overlay(&mut c.kind, self.kind);
        overlay(&mut c.samples, self.samples);
        overlay(&mut c.seed, self.seed);
        overlay(&mut c.tol, self.tol);
        overlay(&mut c.sigmas, self.sigmas);
        Ok(c)
    }
}

fn dispatch(command: Command, out: &Path) -> CliResult<Report> {
    let (report, _) = match command {
        Command::VerifyDesign(a) => {
            let c = a.resolve()?;
            execute("verify-design", &c, Some(c.seed), 1, out, commands::verify_design)?
        }
        Command::Lattice(a) => execute("lattice", &a.resolve()?, None, 1, out, commands::lattice)?,
        Command::Spinchain(a) => {
            let c = a.resolve()?;
            execute("spinchain", &c, None, c.workers, out, commands::spinchain)?
        }
        Command::Bounds(a) => execute("bounds", &a.resolve()?, None, 1, out, commands::bounds)?,
        Command::Cue(a) => {
            let c = a.resolve()?;
            execute("cue", &c, Some(c.seed), 1, out, commands::cue)?
        }
        Command::HaarOracle(a) => {
            let c = a.resolve()?;
            execute("haar-oracle", &c, Some(c.seed), 1, out, commands::haar_oracle)?
        }
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command, &cli.out_dir) {
        Ok(report) => {
            if cli.json {
                match serde_json::to_string_pretty(&report) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
            } else {
                println!("{}", report.to_text());
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
