//! Run configurations. Each command resolves its settings as defaults, then
//! an optional TOML/JSON file, then command-line flags.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qergo_core::drives::{
    cosine_drive, design_cycle_drive, fibonacci_drive, floquet_kick_drive, great_circle_3design_drive,
    qubit_cue_drive, DriveSpec, FloquetDecomposition, ParentUnitary, GOLDEN_OMEGA2,
};
use qergo_core::euler::{cue_drive, default_cue_drive};
use qergo_core::lattice::{builtin_lattices, lattice_to_drive, ErgodicLattice};
use qergo_core::qcore::{identity, Pauli};
use qergo_core::spinchain::{ising_hamiltonians, ChainDrive};

use crate::error::{CliError, CliResult};
use crate::formats::read_lattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DriveKind {
    /// Two-tone qubit drive with Haar-distributed quasienergy eigenstates.
    QubitCue,
    /// Euler-angle CUE drive in dimension d.
    Cue,
    /// One-tone qubit drive tracing the 12-arc octahedron loop.
    GreatCircle,
    /// Drive built from an ergodic lattice.
    Lattice,
    /// Periodic Ising kicks on an L-site chain.
    FloquetKick,
    /// Ising kicks with a cosine-modulated mixing angle.
    Cosine,
    /// Ising kicks selected by the Fibonacci word.
    Fibonacci,
    /// Kicks cycling through {1, X, Y, Z}.
    PauliCycle,
    /// Time-independent diagonal Hamiltonian.
    Static,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MomentKindArg {
    State,
    Unitary,
}

impl From<MomentKindArg> for qergo_core::haar::MomentKind {
    fn from(k: MomentKindArg) -> Self {
        match k {
            MomentKindArg::State => qergo_core::haar::MomentKind::State,
            MomentKindArg::Unitary => qergo_core::haar::MomentKind::Unitary,
        }
    }
}

/// Drive family plus the parameters that override its defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub kind: DriveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omegas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quasienergies: Option<Vec<f64>>,
    /// Builtin lattice name (el-11, el-12, el-23) or a lattice JSON path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
}

/// Frequencies (1, √2) and q = √3 − 1: the qubit CUE preset used for decay fits.
pub const QUBIT_CUE_PRESET: (f64, f64, f64) = (1.0, std::f64::consts::SQRT_2, 0.732_050_807_568_877_2);

impl DriveConfig {
    pub fn of(kind: DriveKind) -> Self {
        Self { kind, d: None, l: None, omegas: None, quasienergies: None, lattice: None }
    }

    pub fn build(&self) -> CliResult<DriveSpec> {
        let chain = |drive: ChainDrive| -> CliResult<DriveSpec> {
            let l = self.l.unwrap_or(2);
            let (h0, h1) = ising_hamiltonians(l)?;
            let (w1, w2) = self.omega_pair(1.0, GOLDEN_OMEGA2)?;
            let seq = match drive {
                ChainDrive::Floquet => floquet_kick_drive(&h0, &h1)?,
                ChainDrive::Cosine => cosine_drive(&h0, &h1, w1, w2)?,
                ChainDrive::Fibonacci => fibonacci_drive(&h0, &h1, w1, w2)?,
            };
            Ok(DriveSpec::Kick(seq))
        };
        match self.kind {
            DriveKind::QubitCue => {
                let (w1, w2) = self.omega_pair(QUBIT_CUE_PRESET.0, QUBIT_CUE_PRESET.1)?;
                let q = self.single_q(QUBIT_CUE_PRESET.2)?;
                Ok(DriveSpec::Floquet(qubit_cue_drive(w1, w2, q)))
            }
            DriveKind::Cue => {
                let d = self.d.unwrap_or(3);
                let dec = match (&self.omegas, &self.quasienergies) {
                    (None, None) => default_cue_drive(d)?,
                    (Some(w), Some(q)) => cue_drive(d, w, q)?,
                    _ => return Err(CliError::usage("cue drive needs both omegas and quasienergies, or neither")),
                };
                Ok(DriveSpec::Floquet(dec))
            }
            DriveKind::GreatCircle => {
                let w = match self.omegas.as_deref() {
                    None => 1.0,
                    Some([w]) => *w,
                    Some(_) => return Err(CliError::usage("great-circle drive takes one frequency")),
                };
                Ok(DriveSpec::Floquet(great_circle_3design_drive(w, self.single_q(std::f64::consts::SQRT_2)?)))
            }
            DriveKind::Lattice => {
                let lat = self.load_lattice()?;
                let omegas = match &self.omegas {
                    Some(w) => w.clone(),
                    None => [1.0, 5f64.sqrt(), 7f64.sqrt()].into_iter().take(lat.m).collect(),
                };
                let qs = match &self.quasienergies {
                    Some(q) => q.clone(),
                    None => [2f64.sqrt(), 3f64.sqrt(), 11f64.sqrt()].into_iter().cycle().take(lat.d - 1).collect(),
                };
                Ok(DriveSpec::Floquet(lattice_to_drive(&lat, &omegas, &qs)?))
            }
            DriveKind::FloquetKick => chain(ChainDrive::Floquet),
            DriveKind::Cosine => chain(ChainDrive::Cosine),
            DriveKind::Fibonacci => chain(ChainDrive::Fibonacci),
            DriveKind::PauliCycle => {
                let design = vec![identity(2), Pauli::X.matrix(), Pauli::Y.matrix(), Pauli::Z.matrix()];
                Ok(DriveSpec::Kick(design_cycle_drive(&design)?))
            }
            DriveKind::Static => {
                let qs = match &self.quasienergies {
                    Some(q) => q.clone(),
                    None => {
                        let d = self.d.unwrap_or(2);
                        (0..d).map(|j| j as f64 - (d as f64 - 1.0) / 2.0).collect()
                    }
                };
                let d = qs.len();
                let dec = FloquetDecomposition::new(ParentUnitary::Identity { d, m: 1 }, vec![1.0], qs, None)?;
                Ok(DriveSpec::Floquet(dec))
            }
        }
    }

    pub fn load_lattice(&self) -> CliResult<ErgodicLattice> {
        let name = self.lattice.as_deref().unwrap_or("el-12");
        builtin_lattice(name, self.d.unwrap_or(2))?.map_or_else(|| read_lattice(Path::new(name)), Ok)
    }

    fn omega_pair(&self, w1: f64, w2: f64) -> CliResult<(f64, f64)> {
        match self.omegas.as_deref() {
            None => Ok((w1, w2)),
            Some([a, b]) => Ok((*a, *b)),
            Some(_) => Err(CliError::usage("this drive takes exactly two frequencies")),
        }
    }

    fn single_q(&self, q: f64) -> CliResult<f64> {
        match self.quasienergies.as_deref() {
            None => Ok(q),
            Some([x]) => Ok(*x),
            Some(_) => Err(CliError::usage("this drive takes one quasienergy q (Q = diag(−q, q))")),
        }
    }
}

/// Looks up a builtin lattice; `d` only matters for el-11.
pub fn builtin_lattice(name: &str, d: usize) -> CliResult<Option<ErgodicLattice>> {
    if !name.starts_with("el-") {
        return Ok(None);
    }
    let found = builtin_lattices(d)?.into_iter().find(|b| b.name == name);
    match found {
        Some(b) => Ok(Some(b.lattice)),
        None => Err(CliError::usage(format!("unknown builtin lattice {name} (el-11, el-12, el-23)"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyDesignConfig {
    pub drive: Option<DriveConfig>,
    /// `haar` samples the reference ensemble instead of a drive.
    pub ensemble: Option<String>,
    pub d: usize,
    pub k: Vec<usize>,
    pub kind: MomentKindArg,
    #[serde(rename = "T")]
    pub t: usize,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub pair_budget: usize,
}

impl Default for VerifyDesignConfig {
    fn default() -> Self {
        Self {
            drive: None,
            ensemble: None,
            d: 2,
            k: vec![1, 2],
            kind: MomentKindArg::State,
            t: 100_000,
            samples: 100_000,
            tol: 1e-2,
            seed: 1,
            pair_budget: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CueConfig {
    pub d: usize,
    pub omegas: Option<Vec<f64>>,
    pub quasienergies: Option<Vec<f64>>,
    #[serde(rename = "T")]
    pub t: usize,
    pub samples: usize,
    pub seed: u64,
    pub pair_budget: usize,
    pub unitary_tol: f64,
    pub frame_tol: f64,
    pub pushforward_tol: f64,
}

impl Default for CueConfig {
    fn default() -> Self {
        Self {
            d: 3,
            omegas: None,
            quasienergies: None,
            t: 100_000,
            samples: 100_000,
            seed: 1,
            pair_budget: 1_000_000,
            unitary_tol: 1e-2,
            frame_tol: 1e-2,
            pushforward_tol: 5e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub builtin: Option<String>,
    pub file: Option<PathBuf>,
    /// Dimension for el-11.
    pub d: usize,
    pub verify: bool,
    /// Highest constraint order; defaults to the lattice's own order for builtins.
    pub k: Option<usize>,
    pub tol: f64,
    pub brute_force: bool,
    pub export: Option<PathBuf>,
    pub theorem_g2: bool,
    pub g2_tol: f64,
    pub quadrature_points: usize,
    pub omegas: Option<Vec<f64>>,
    pub quasienergies: Option<Vec<f64>>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            builtin: None,
            file: None,
            d: 2,
            verify: false,
            k: None,
            tol: 1e-10,
            brute_force: false,
            export: None,
            theorem_g2: false,
            g2_tol: 1e-3,
            quadrature_points: 64,
            omegas: None,
            quasienergies: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// |Δ(T_last)| > |Δ(T_opt)| / 2.
    Plateau,
    /// |Δ(T_last)| < |Δ(T_opt)| / 3.
    Decay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinchainConfig {
    pub drives: Vec<String>,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub order: usize,
    pub t_opt: usize,
    pub checkpoints: Vec<usize>,
    /// Chain lengths for a plateau sweep (replaces the single run).
    pub sweep_l: Option<Vec<usize>>,
    /// Body counts for a plateau sweep at fixed L.
    pub sweep_k: Option<Vec<usize>>,
    pub t_late: usize,
    pub expect: Option<Expectation>,
    pub workers: usize,
}

impl Default for SpinchainConfig {
    fn default() -> Self {
        Self {
            drives: vec!["floquet".into()],
            l: 6,
            k: 2,
            order: 1,
            t_opt: 1000,
            checkpoints: vec![1000, 10_000, 100_000, 1_000_000],
            sweep_l: None,
            sweep_k: None,
            t_late: 1_000_000,
            expect: None,
            workers: 1,
        }
    }
}

impl SpinchainConfig {
    pub fn chain_drives(&self) -> CliResult<Vec<ChainDrive>> {
        let mut out = Vec::new();
        for name in &self.drives {
            if name == "all" {
                out.extend(ChainDrive::ALL);
                continue;
            }
            let d = ChainDrive::parse(name)
                .ok_or_else(|| CliError::usage(format!("unknown chain drive {name} (floquet, cosine, fibonacci, all)")))?;
            out.push(d);
        }
        if out.is_empty() {
            return Err(CliError::usage("no chain drive given"));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub d: usize,
    pub k: usize,
    pub eps: Vec<f64>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { d: 2, k: 1, eps: vec![0.5, 0.25, 0.1, 0.05] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HaarOracleConfig {
    pub d: usize,
    pub k: Vec<usize>,
    pub kind: MomentKindArg,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub sigmas: f64,
}

impl Default for HaarOracleConfig {
    fn default() -> Self {
        Self { d: 2, k: vec![1, 2, 3], kind: MomentKindArg::State, samples: 100_000, seed: 1, tol: 5e-3, sigmas: 3.0 }
    }
}

/// Reads a config file by extension (`.toml`, otherwise JSON). A run manifest
/// is accepted too: its `config` field is used.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |message: String| CliError::Format { path: path.to_path_buf(), message };
    if path.extension().is_some_and(|e| e == "toml") {
        return toml::from_str(&text).map_err(|e| bad(e.to_string()));
    }
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if let Some(cfg) = value.get_mut("config").filter(|_| value_is_manifest(&text)) {
        value = cfg.take();
    }
    serde_json::from_value(value).map_err(|e| bad(e.to_string()))
}

fn value_is_manifest(text: &str) -> bool {
    serde_json::from_str::<crate::manifest::RunManifest>(text).is_ok()
}

/// File contents if a path is given, otherwise defaults.
pub fn base_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    path.map_or_else(|| Ok(T::default()), load_config)
}
