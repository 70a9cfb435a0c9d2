//! Output documents and writers: CSV with round-trip-safe numbers, JSON
//! documents matching the shipped schemas.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use paulimix_core::divisibility::RateTrajectory;
use paulimix_core::{MarkovClass, PauliMixture, PEstimate};

use crate::config::GridSection;

/// 17 significant digits; parses back to the identical f64.
pub fn fmt17(value: f64) -> String {
    format!("{value:.16e}")
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixtureInfo {
    pub weights: [f64; 3],
    pub c: f64,
}

impl From<&PauliMixture> for MixtureInfo {
    fn from(m: &PauliMixture) -> Self {
        Self {
            weights: m.weights().as_array(),
            c: m.decoherence().rate_constant(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoiseInfo {
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateRow {
    pub t: f64,
    pub p: f64,
    pub pdot: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

/// Expands a trajectory into rows carrying p and dp/dt alongside the rates.
pub fn rate_rows(traj: &RateTrajectory) -> Result<Vec<RateRow>> {
    let f = traj.mixture.decoherence();
    traj.rates
        .iter()
        .map(|r| {
            Ok(RateRow {
                t: r.t,
                p: f.p(r.t)?,
                pdot: f.p_dot(r.t)?,
                gamma1: r.gamma1,
                gamma2: r.gamma2,
                gamma3: r.gamma3,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EstimateRow {
    pub t: f64,
    pub p_hat: f64,
    pub residual: f64,
    /// Overlap fidelity of the three-qubit reconstruction against theory.
    pub fidelity: f64,
}

pub fn estimate_rows(estimates: &[PEstimate], fidelities: &[f64]) -> Vec<EstimateRow> {
    estimates
        .iter()
        .zip(fidelities)
        .map(|(e, &fidelity)| EstimateRow {
            t: e.t,
            p_hat: e.p_hat,
            residual: e.residual,
            fidelity,
        })
        .collect()
}

/// JSON document written by the `rates` command.
#[derive(Debug, Serialize)]
pub struct RatesReport {
    pub mixture: MixtureInfo,
    pub grid: GridSection,
    pub rows: Vec<RateRow>,
    pub classification: MarkovClass,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitInfo {
    pub c_hat: f64,
    pub rss: f64,
    pub n_points: usize,
}

/// JSON document written by the `pipeline` command.
#[derive(Debug, Serialize)]
pub struct PipelineReport {
    pub mixture: MixtureInfo,
    pub grid: GridSection,
    pub noise: NoiseInfo,
    pub estimates: Vec<EstimateRow>,
    pub fit: FitInfo,
    pub rates_fitted: Vec<RateRow>,
    pub rates_theory: Vec<RateRow>,
    pub classification_fitted: MarkovClass,
    pub classification_theory: MarkovClass,
}

/// Summary JSON accompanying the CSV series of the `pipeline` command.
#[derive(Debug, Serialize)]
pub struct PipelineSummary {
    pub mixture: MixtureInfo,
    pub noise: NoiseInfo,
    pub fit: FitInfo,
    pub classification_fitted: MarkovClass,
    pub classification_theory: MarkovClass,
}

/// Verdict JSON accompanying the CSV output of the `rates` command.
#[derive(Debug, Serialize)]
pub struct VerdictRecord {
    pub mixture: MixtureInfo,
    pub classification: MarkovClass,
}

/// JSON document written by the `tomo-demo` command.
#[derive(Debug, Serialize)]
pub struct TomoDemoReport {
    pub t: f64,
    pub p: f64,
    pub noise: NoiseInfo,
    /// Fidelity of the three-qubit reconstruction against the exact state.
    pub fidelity_full: f64,
    /// Fidelity of the traced system state against the analytic channel output.
    pub fidelity_system: f64,
    /// Row-major [re, im] entries.
    pub system_theory: Vec<Vec<[f64; 2]>>,
    pub system_reconstructed: Vec<Vec<[f64; 2]>>,
}

/// Nested [re, im] representation of a complex matrix.
pub fn matrix_entries(m: &paulimix_core::ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let e = m.get(i, j);
                    [e.re, e.im]
                })
                .collect()
        })
        .collect()
}

pub fn write_rate_csv(path: &Path, rows: &[RateRow]) -> Result<()> {
    let mut out = String::from("t,p,pdot,gamma1,gamma2,gamma3\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt17(r.t),
            fmt17(r.p),
            fmt17(r.pdot),
            fmt17(r.gamma1),
            fmt17(r.gamma2),
            fmt17(r.gamma3)
        ));
    }
    write_file(path, out.as_bytes())
}

pub fn write_estimate_csv(path: &Path, rows: &[EstimateRow]) -> Result<()> {
    let mut out = String::from("t,p_hat,residual,fidelity\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(r.t),
            fmt17(r.p_hat),
            fmt17(r.residual),
            fmt17(r.fidelity)
        ));
    }
    write_file(path, out.as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(doc).context("serializing JSON document")?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    let mut file = std::fs::File::create(path)
        .with_context(|| format!("creating output file {}", path.display()))?;
    file.write_all(bytes)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `out.csv` + "rates_fit" -> `out.rates_fit.csv`; extension is preserved.
pub fn sibling(path: &Path, tag: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let name = format!("{stem}.{tag}.{ext}");
    path.with_file_name(name)
}
