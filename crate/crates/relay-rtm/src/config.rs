//! JSON run configuration.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "dims": { "t": 4, "r": 4, "s": 4, "u": 4 },
//!   "scenario": { "rho1_db": 10, "direct_link": false },
//!   "sweep": { "axis": "rho2", "start_db": 0, "stop_db": 30, "step_db": 5 },
//!   "rtm_kinds": ["opt1", "naf"],
//!   "metrics": ["capacity"],
//!   "trials": 1000,
//!   "seed": 7,
//!   "output": "fig4.csv"
//! }
//! ```
//!
//! Unknown keys are rejected everywhere. The SNR of the swept axis may be
//! omitted from `scenario`, as may `rho0_db` when the direct link is off.

use std::path::{Path, PathBuf};

use relay_rtm_core::{
    CMatrix, ChannelSet, Complex64, Dims, Metric, PowerBudget, RtmKind, SnrScenario,
};
use serde::Deserialize;
use thiserror::Error;

use crate::montecarlo::{SweepAxis, SweepSpec};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_OUTPUT: &str = "sweep.csv";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDims {
    t: usize,
    r: usize,
    s: usize,
    u: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    rho0_db: Option<f64>,
    rho1_db: Option<f64>,
    rho2_db: Option<f64>,
    direct_link: bool,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawAxis {
    Rho0,
    Rho1,
    Rho2,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: RawAxis,
    points_db: Option<Vec<f64>>,
    start_db: Option<f64>,
    stop_db: Option<f64>,
    step_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawKind {
    Opt1,
    Opt2,
    Naf,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawMetric {
    Capacity,
    Ostbc,
}

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    p1: f64,
    p2: f64,
    h0: RawMatrix,
    h1: RawMatrix,
    h2: RawMatrix,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExplain {
    seed: Option<u64>,
    #[serde(default)]
    trial: u64,
    sweep_db: Option<f64>,
    network: Option<RawNetwork>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    format_version: u32,
    dims: RawDims,
    scenario: RawScenario,
    sweep: RawSweep,
    rtm_kinds: Vec<RawKind>,
    metrics: Option<Vec<RawMetric>>,
    symbol_rate: Option<f64>,
    trials: u64,
    seed: u64,
    output: Option<PathBuf>,
    explain: Option<RawExplain>,
}

/// Where the explain report takes its single realization from.
#[derive(Debug, Clone, PartialEq)]
pub enum ExplainSource {
    /// Trial `trial` of the sweep's channel stream with the given seed.
    Sampled { seed: u64, trial: u64 },
    /// An explicit network; the scenario SNRs are not applied.
    Network {
        channels: ChannelSet,
        power: PowerBudget,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplainSpec {
    pub source: ExplainSource,
    /// Value of the swept SNR for the sampled realization; defaults to the
    /// first sweep point.
    pub sweep_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub format_version: u32,
    pub sweep: SweepSpec,
    pub output_path: PathBuf,
    pub explain: Option<ExplainSpec>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    build(raw)
}

fn sweep_points(raw: &RawSweep) -> Result<Vec<f64>, ConfigError> {
    let points = match (&raw.points_db, raw.start_db, raw.stop_db, raw.step_db) {
        (Some(p), None, None, None) => p.clone(),
        (None, Some(start), Some(stop), Some(step)) => {
            if ![start, stop, step].iter().all(|v| v.is_finite()) {
                return Err(invalid(
                    "sweep",
                    "start_db, stop_db and step_db must be finite",
                ));
            }
            if step <= 0.0 || stop < start {
                return Err(invalid(
                    "sweep.step_db",
                    "need step_db > 0 and stop_db >= start_db",
                ));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..n).map(|i| start + i as f64 * step).collect()
        }
        _ => {
            return Err(invalid(
                "sweep",
                "give either points_db or all of start_db, stop_db, step_db",
            ))
        }
    };
    if points.is_empty() {
        return Err(invalid("sweep.points_db", "no sweep points"));
    }
    if points.iter().any(|v| !v.is_finite()) {
        return Err(invalid("sweep.points_db", "points must be finite"));
    }
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid(
            "sweep.points_db",
            "points must be sorted ascending",
        ));
    }
    Ok(points)
}

fn matrix(field: &str, m: &RawMatrix, rows: usize, cols: usize) -> Result<CMatrix, ConfigError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(invalid(field, format!("expected a {rows}x{cols} matrix")));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = m[i][j];
        Complex64::new(re, im)
    }))
}

fn network(raw: &RawNetwork, dims: Dims) -> Result<(ChannelSet, PowerBudget), ConfigError> {
    let channels = ChannelSet {
        h0: matrix("explain.network.h0", &raw.h0, dims.r, dims.t)?,
        h1: matrix("explain.network.h1", &raw.h1, dims.s, dims.t)?,
        h2: matrix("explain.network.h2", &raw.h2, dims.r, dims.u)?,
    };
    let power =
        PowerBudget::new(raw.p1, raw.p2).map_err(|e| invalid("explain.network", e.to_string()))?;
    Ok((channels, power))
}

fn build(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    if raw.format_version != FORMAT_VERSION {
        return Err(invalid(
            "format_version",
            format!(
                "unsupported version {} (expected {FORMAT_VERSION})",
                raw.format_version
            ),
        ));
    }
    let d = &raw.dims;
    let dims = Dims::new(d.t, d.r, d.s, d.u)
        .map_err(|_| invalid("dims", "antenna counts must be positive"))?;

    let axis = match raw.sweep.axis {
        RawAxis::Rho0 => SweepAxis::Rho0,
        RawAxis::Rho1 => SweepAxis::Rho1,
        RawAxis::Rho2 => SweepAxis::Rho2,
    };
    let points = sweep_points(&raw.sweep)?;

    let sc = &raw.scenario;
    let snr =
        |value: Option<f64>, field: &str, swept: bool, needed: bool| -> Result<f64, ConfigError> {
            match value {
                Some(v) if !v.is_finite() => Err(invalid(field, "must be finite")),
                Some(v) => Ok(v),
                None if swept || !needed => Ok(0.0),
                None => Err(invalid(field, "missing")),
            }
        };
    let scenario = SnrScenario {
        rho0_db: snr(
            sc.rho0_db,
            "scenario.rho0_db",
            axis == SweepAxis::Rho0,
            sc.direct_link,
        )?,
        rho1_db: snr(
            sc.rho1_db,
            "scenario.rho1_db",
            axis == SweepAxis::Rho1,
            true,
        )?,
        rho2_db: snr(
            sc.rho2_db,
            "scenario.rho2_db",
            axis == SweepAxis::Rho2,
            true,
        )?,
        dims,
        direct_link_enabled: sc.direct_link,
    };

    if raw.rtm_kinds.is_empty() {
        return Err(invalid("rtm_kinds", "at least one RTM kind is required"));
    }
    let mut rtm_kinds: Vec<RtmKind> = raw
        .rtm_kinds
        .iter()
        .map(|k| match k {
            RawKind::Opt1 => RtmKind::Opt1,
            RawKind::Opt2 => RtmKind::Opt2,
            RawKind::Naf => RtmKind::Naf,
        })
        .collect();
    rtm_kinds.sort_by_key(|k| k.name());
    rtm_kinds.dedup();

    let mut metrics: Vec<Metric> = match &raw.metrics {
        None => vec![Metric::Capacity],
        Some(m) if m.is_empty() => {
            return Err(invalid("metrics", "at least one metric is required"))
        }
        Some(m) => m
            .iter()
            .map(|m| match m {
                RawMetric::Capacity => Metric::Capacity,
                RawMetric::Ostbc => Metric::Ostbc,
            })
            .collect(),
    };
    metrics.sort_by_key(|m| m.name());
    metrics.dedup();

    let symbol_rate = raw.symbol_rate.unwrap_or(1.0);
    if !(symbol_rate > 0.0 && symbol_rate <= 1.0) {
        return Err(invalid("symbol_rate", "must lie in (0, 1]"));
    }
    if raw.trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }

    let explain = match &raw.explain {
        None => None,
        Some(e) => {
            let sweep_db = e.sweep_db.unwrap_or(points[0]);
            if !sweep_db.is_finite() {
                return Err(invalid("explain.sweep_db", "must be finite"));
            }
            let source = match &e.network {
                Some(n) => {
                    if e.seed.is_some() {
                        return Err(invalid(
                            "explain.seed",
                            "cannot be combined with explain.network",
                        ));
                    }
                    let (channels, power) = network(n, dims)?;
                    ExplainSource::Network { channels, power }
                }
                None => ExplainSource::Sampled {
                    seed: e.seed.unwrap_or(raw.seed),
                    trial: e.trial,
                },
            };
            Some(ExplainSpec { source, sweep_db })
        }
    };

    Ok(RunConfig {
        format_version: raw.format_version,
        sweep: SweepSpec {
            scenario,
            sweep_axis: axis,
            sweep_points_db: points,
            rtm_kinds,
            metrics,
            symbol_rate,
            trials: raw.trials,
            seed: raw.seed,
        },
        output_path: raw.output.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
        explain,
    })
}
