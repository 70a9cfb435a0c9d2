//! Experiment configuration: JSON config file, command-line overrides, and
//! resolution into validated core types.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use paulimix_core::channels::Preset;
use paulimix_core::divisibility::{DEFAULT_GRID_POINTS, DEFAULT_T_END, DEFAULT_T_START};
use paulimix_core::simulator::{
    DEFAULT_EXPERIMENT_POINTS, DEFAULT_EXPERIMENT_T_END, DEFAULT_EXPERIMENT_T_START,
    DEFAULT_NOISE_SIGMA,
};
use paulimix_core::{DecoherenceFunction, MixingWeights, NoiseModel, PauliMixture};

/// Environment variable overriding the directory of relative output paths.
pub const OUT_DIR_ENV: &str = "PAULIMIX_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Theory,
    SyntheticExperiment,
    FullPipeline,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Theory => "theory",
            Mode::SyntheticExperiment => "synthetic-experiment",
            Mode::FullPipeline => "full-pipeline",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(Mode::Theory),
            "synthetic-experiment" => Ok(Mode::SyntheticExperiment),
            "full-pipeline" => Ok(Mode::FullPipeline),
            other => bail!(
                "config field 'mode': unknown mode '{other}' \
                 (expected theory | synthetic-experiment | full-pipeline)"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("config field 'format': unknown format '{other}' (expected csv | json)"),
        }
    }
}

/// Mixture selection in the config file: exactly one of the three forms.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_mix_a: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_start: f64,
    pub t_end: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

/// On-disk experiment configuration; every field optional, flags win.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixture: Option<MixtureSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing config file {}", path.display()))
    }
}

/// Command-line values that overlay the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub weights: Option<[f64; 3]>,
    pub two_mix_a: Option<f64>,
    pub c: Option<f64>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub n: Option<usize>,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// Fully validated configuration ready to run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub mixture: PauliMixture,
    pub grid: GridSection,
    pub noise: NoiseModel,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Merges config file and flags, applies per-command defaults, validates.
///
/// `required_mode` is the mode a subcommand implies; a conflicting explicit
/// mode is a config error.
pub fn resolve(
    file: &ExperimentConfig,
    flags: &Overrides,
    required_mode: Mode,
) -> Result<Resolved> {
    match flags
        .mode
        .map(Ok)
        .or_else(|| file.mode.as_deref().map(str::parse))
        .transpose()?
    {
        Some(m) if m != required_mode => bail!(
            "config field 'mode': '{}' conflicts with this command (requires '{}')",
            m.name(),
            required_mode.name()
        ),
        Some(_) | None => {}
    };

    let file_mixture = file.mixture.clone().unwrap_or_default();
    let preset = match &flags.preset {
        Some(p) => Some(*p),
        None => file_mixture
            .preset
            .as_deref()
            .map(|s| {
                s.parse::<Preset>()
                    .map_err(|e| anyhow!("config field 'mixture.preset': {e}"))
            })
            .transpose()?,
    };
    let weights = flags.weights.or(file_mixture.weights);
    let two_mix_a = flags.two_mix_a.or(file_mixture.two_mix_a);
    let c = flags.c.or(file.c);

    let mixture = match (preset, weights, two_mix_a) {
        (Some(p), None, None) => {
            let base = p.mixture();
            match c {
                Some(c) => PauliMixture::new(
                    *base.weights(),
                    DecoherenceFunction::new(c).context("config field 'c'")?,
                ),
                None => base,
            }
        }
        (None, Some([x1, x2, x3]), None) => {
            let w = MixingWeights::new(x1, x2, x3).context("config field 'weights'")?;
            let c = c.ok_or_else(|| anyhow!("config field 'c': required with explicit weights"))?;
            PauliMixture::new(w, DecoherenceFunction::new(c).context("config field 'c'")?)
        }
        (None, None, Some(a)) => {
            let w = MixingWeights::two_mix(a).context("config field 'two_mix_a'")?;
            let c = c.ok_or_else(|| anyhow!("config field 'c': required with two_mix_a"))?;
            PauliMixture::new(w, DecoherenceFunction::new(c).context("config field 'c'")?)
        }
        (None, None, None) => bail!(
            "config field 'mixture': specify a preset (fig2..fig6), weights x1,x2,x3, or two_mix_a"
        ),
        _ => bail!("config field 'mixture': preset, weights, and two_mix_a are mutually exclusive"),
    };

    let (default_start, default_end, default_n) = match required_mode {
        Mode::Theory => (DEFAULT_T_START, DEFAULT_T_END, DEFAULT_GRID_POINTS),
        Mode::SyntheticExperiment | Mode::FullPipeline => (
            DEFAULT_EXPERIMENT_T_START,
            DEFAULT_EXPERIMENT_T_END,
            DEFAULT_EXPERIMENT_POINTS,
        ),
    };
    let file_grid = file.grid;
    let grid = GridSection {
        t_start: flags
            .t_start
            .or(file_grid.map(|g| g.t_start))
            .unwrap_or(default_start),
        t_end: flags
            .t_end
            .or(file_grid.map(|g| g.t_end))
            .unwrap_or(default_end),
        n: flags.n.or(file_grid.map(|g| g.n)).unwrap_or(default_n),
    };
    if grid.n < 2 {
        bail!("config field 'grid.n': need at least 2 points, got {}", grid.n);
    }
    if required_mode == Mode::FullPipeline && grid.n < 3 {
        bail!(
            "config field 'grid.n': the pipeline fit needs at least 3 sample points, got {}",
            grid.n
        );
    }
    if !grid.t_start.is_finite() || grid.t_start < 0.0 {
        bail!("config field 'grid.t_start': must be >= 0, got {}", grid.t_start);
    }
    if !grid.t_end.is_finite() || grid.t_start >= grid.t_end {
        bail!(
            "config field 'grid': t_start {} must be below t_end {}",
            grid.t_start,
            grid.t_end
        );
    }

    let file_noise = file.noise.unwrap_or_default();
    let sigma = flags
        .sigma
        .or(file_noise.sigma)
        .unwrap_or(DEFAULT_NOISE_SIGMA);
    let seed = flags.seed.or(file_noise.seed).unwrap_or(0);
    let noise = NoiseModel::new(sigma, seed).context("config field 'noise.sigma'")?;

    let file_output = file.output.clone().unwrap_or_default();
    let out = flags
        .out
        .clone()
        .or(file_output.path)
        .map(apply_out_dir_override);
    let format = flags
        .format
        .or(file_output.format)
        .unwrap_or(OutputFormat::Csv);

    Ok(Resolved {
        mixture,
        grid,
        noise,
        out,
        format,
    })
}

/// Relative output paths land under `PAULIMIX_OUT_DIR` when it is set.
fn apply_out_dir_override(path: PathBuf) -> PathBuf {
    if path.is_absolute() {
        return path;
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => Path::new(&dir).join(path),
        None => path,
    }
}

/// Parses the `--weights x1,x2,x3` flag value.
pub fn parse_weights_arg(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated weights, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("invalid weight '{part}': {e}"))?;
    }
    Ok(out)
}
