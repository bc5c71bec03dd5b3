//! Lattice JSON and the CSV tables written by the commands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qergo_core::lattice::{ErgodicLattice, LatticeComponent};
use qergo_core::qcore::{StateVector, C64};

use crate::error::{CliError, CliResult};

/// `{d, m, components: [{alpha, n, vec: [[re, im], …]}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub d: usize,
    pub m: usize,
    pub components: Vec<ComponentFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentFile {
    pub alpha: usize,
    pub n: Vec<i64>,
    pub vec: Vec<[f64; 2]>,
}

impl From<&ErgodicLattice> for LatticeFile {
    fn from(lat: &ErgodicLattice) -> Self {
        let components = lat
            .components
            .iter()
            .map(|c| ComponentFile { alpha: c.alpha, n: c.n.clone(), vec: c.vec.iter().map(|z| [z.re, z.im]).collect() })
            .collect();
        Self { d: lat.d, m: lat.m, components }
    }
}

impl LatticeFile {
    pub fn into_lattice(self) -> CliResult<ErgodicLattice> {
        let components = self
            .components
            .into_iter()
            .map(|c| {
                let v: Vec<C64> = c.vec.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                LatticeComponent { alpha: c.alpha, n: c.n, vec: StateVector::from_vec(v) }
            })
            .collect();
        Ok(ErgodicLattice::new(self.d, self.m, components)?)
    }
}

pub fn read_lattice(path: &Path) -> CliResult<ErgodicLattice> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: LatticeFile =
        serde_json::from_str(&text).map_err(|e| CliError::Format { path: path.to_path_buf(), message: e.to_string() })?;
    file.into_lattice()
}

pub fn write_lattice(path: &Path, lat: &ErgodicLattice) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&LatticeFile::from(lat))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub k: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub deviation: f64,
    pub frame_potential: f64,
    pub frame_potential_stderr: f64,
}

/// Row of a spin-chain Δ table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinchainRow {
    pub drive: String,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub order: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub delta: f64,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qergo_core::lattice::{el_23_qubit, verify_orthonormality};

    #[test]
    fn lattice_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("el23.json");
        let lat = el_23_qubit();
        write_lattice(&p, &lat).unwrap();
        let back = read_lattice(&p).unwrap();
        assert_eq!(back, lat);
        assert!(verify_orthonormality(&back, 1e-10).pass);
    }

    #[test]
    fn malformed_lattice_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        std::fs::write(&p, r#"{"d": 2, "m": 1, "components": [{"alpha": 0, "n": [0], "vec": [[1, 0]]}]}"#).unwrap();
        assert!(read_lattice(&p).is_err());
        std::fs::write(&p, "{").unwrap();
        assert!(matches!(read_lattice(&p), Err(CliError::Format { .. })));
    }

    #[test]
    fn csv_header_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let rows = vec![SpinchainRow { drive: "cosine".into(), l: 6, k: 2, order: 1, t: 1000, delta: 0.125 }];
        write_csv(&p, &rows).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().next().unwrap(), "drive,L,K,order,T,delta");
        assert_eq!(read_csv::<SpinchainRow>(&p).unwrap(), rows);
    }
}
