//! Seeded iid Rayleigh sampling and ergodic averaging over SNR sweeps.
//!
//! Every trial owns a ChaCha8 substream selected by its index, so the
//! channels of trial `k` do not depend on how trials are scheduled. Per-trial
//! results are collected in trial order and reduced sequentially, which makes
//! the output bit-identical for any number of worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use relay_rtm_core::evaluate::{self, naf_rtm};
use relay_rtm_core::network::translate_scenario;
use relay_rtm_core::opt_capacity::optimize_capacity_rtm;
use relay_rtm_core::opt_ostbc::optimize_ostbc_rtm;
use relay_rtm_core::{
    CMatrix, ChannelSet, Complex64, Dims, Metric, RtmKind, RtmSolution, SnrScenario,
};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    Rho0,
    Rho1,
    Rho2,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Rho0 => "rho0",
            SweepAxis::Rho1 => "rho1",
            SweepAxis::Rho2 => "rho2",
        }
    }

    /// `template` with the swept SNR set to `db`.
    pub fn apply(&self, template: &SnrScenario, db: f64) -> SnrScenario {
        let mut scn = *template;
        match self {
            SweepAxis::Rho0 => scn.rho0_db = db,
            SweepAxis::Rho1 => scn.rho1_db = db,
            SweepAxis::Rho2 => scn.rho2_db = db,
        }
        scn
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: SnrScenario,
    pub sweep_axis: SweepAxis,
    pub sweep_points_db: Vec<f64>,
    pub rtm_kinds: Vec<RtmKind>,
    pub metrics: Vec<Metric>,
    /// OSTBC symbol rate, in `(0, 1]`.
    pub symbol_rate: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub sweep_value_db: f64,
    pub rtm_kind: RtmKind,
    pub metric: Metric,
    pub mean_bits: f64,
    pub stderr_bits: f64,
    pub trials: u64,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(&'static str),
    #[error("trial {trial} at {axis} = {sweep_db} dB ({rtm}/{metric}): {source}")]
    Trial {
        trial: u64,
        axis: &'static str,
        sweep_db: f64,
        rtm: &'static str,
        metric: &'static str,
        source: relay_rtm_core::Error,
    },
    #[error("trial {trial}: {source}")]
    Evaluation {
        trial: u64,
        source: relay_rtm_core::Error,
    },
    #[error("cannot build thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        self.scenario
            .dims
            .check()
            .map_err(|_| SweepError::InvalidSpec("antenna counts must be positive"))?;
        if self.trials == 0 {
            return Err(SweepError::InvalidSpec("trials must be at least 1"));
        }
        if self.sweep_points_db.is_empty() {
            return Err(SweepError::InvalidSpec("no sweep points"));
        }
        if self.sweep_points_db.iter().any(|v| !v.is_finite()) {
            return Err(SweepError::InvalidSpec("sweep points must be finite"));
        }
        if self.sweep_points_db.windows(2).any(|w| w[0] > w[1]) {
            return Err(SweepError::InvalidSpec("sweep points must be sorted"));
        }
        if self.rtm_kinds.is_empty() {
            return Err(SweepError::InvalidSpec("rtm_kinds is empty"));
        }
        if self.metrics.is_empty() {
            return Err(SweepError::InvalidSpec("metrics is empty"));
        }
        if !(self.symbol_rate > 0.0 && self.symbol_rate <= 1.0) {
            return Err(SweepError::InvalidSpec("symbol_rate must lie in (0, 1]"));
        }
        let s = &self.scenario;
        if ![s.rho0_db, s.rho1_db, s.rho2_db]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(SweepError::InvalidSpec("scenario SNRs must be finite"));
        }
        Ok(())
    }
}

fn cn_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(scale * re, scale * im)
    })
}

/// Unit-variance iid CN(0,1) channels for one trial.
///
/// H0 is always drawn, even when a scenario disables the direct link, so
/// that H1 and H2 of a trial are the same with and without it.
pub fn sample_channels(dims: Dims, seed: u64, trial_index: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    let h0 = cn_matrix(dims.r, dims.t, &mut rng);
    let h1 = cn_matrix(dims.s, dims.t, &mut rng);
    let h2 = cn_matrix(dims.r, dims.u, &mut rng);
    ChannelSet { h0, h1, h2 }
}

/// Mean and standard error of one output cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    job: impl FnOnce() -> T + Send,
) -> Result<T, SweepError> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(job))
        }
    }
}

/// Runs `trial` for indices `0..trials` in parallel and averages each of the
/// `cells` outputs. `threads = None` uses the global rayon pool.
pub fn ergodic_average<F>(
    trials: u64,
    cells: usize,
    threads: Option<usize>,
    trial: F,
) -> Result<Vec<Estimate>, SweepError>
where
    F: Fn(u64) -> Result<Vec<f64>, SweepError> + Sync,
{
    if trials == 0 {
        return Err(SweepError::InvalidSpec("trials must be at least 1"));
    }
    let rows: Vec<Vec<f64>> = with_threads(threads, || {
        (0..trials)
            .into_par_iter()
            .map(&trial)
            .collect::<Result<Vec<_>, _>>()
    })??;
    debug_assert!(rows.iter().all(|r| r.len() == cells));

    let n = trials as f64;
    Ok((0..cells)
        .map(|c| {
            let mean = compensated_sum(rows.iter().map(|r| r[c])) / n;
            let stderr = if trials > 1 {
                let ss = compensated_sum(rows.iter().map(|r| (r[c] - mean) * (r[c] - mean)));
                (ss / (n - 1.0) / n).sqrt()
            } else {
                0.0
            };
            Estimate { mean, stderr }
        })
        .collect())
}

fn build_rtm(
    kind: RtmKind,
    ch: &ChannelSet,
    pb: &relay_rtm_core::PowerBudget,
    dims: Dims,
) -> relay_rtm_core::Result<RtmSolution> {
    match kind {
        RtmKind::Opt1 => optimize_capacity_rtm(ch, pb, dims),
        RtmKind::Opt2 => optimize_ostbc_rtm(ch, pb, dims),
        RtmKind::Naf => naf_rtm(ch, pb, dims),
    }
}

fn one_trial(spec: &SweepSpec, trial: u64) -> Result<Vec<f64>, SweepError> {
    let dims = spec.scenario.dims;
    let raw = sample_channels(dims, spec.seed, trial);
    let mut out =
        Vec::with_capacity(spec.sweep_points_db.len() * spec.rtm_kinds.len() * spec.metrics.len());
    for &db in &spec.sweep_points_db {
        let scn = spec.sweep_axis.apply(&spec.scenario, db);
        let (ch, pb) = translate_scenario(&scn, &raw);
        for &kind in &spec.rtm_kinds {
            let ctx = |metric: &'static str, source| SweepError::Trial {
                trial,
                axis: spec.sweep_axis.name(),
                sweep_db: db,
                rtm: kind.name(),
                metric,
                source,
            };
            let sol = build_rtm(kind, &ch, &pb, dims).map_err(|e| ctx("rtm", e))?;
            for &metric in &spec.metrics {
                let report = match metric {
                    Metric::Capacity => evaluate::capacity(&ch, &pb, dims, &sol.x_matrix),
                    Metric::Ostbc => {
                        evaluate::ostbc_capacity(&ch, &pb, dims, &sol.x_matrix, spec.symbol_rate)
                    }
                }
                .map_err(|e| ctx(metric.name(), e))?;
                out.push(report.bits);
            }
        }
    }
    Ok(out)
}

/// One [`CurvePoint`] per (sweep point, RTM kind, metric), in that nesting
/// order. Each trial draws its channels once and reuses them for every
/// point and kind.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<CurvePoint>, SweepError> {
    spec.validate()?;
    let cells = spec.sweep_points_db.len() * spec.rtm_kinds.len() * spec.metrics.len();
    let est = ergodic_average(spec.trials, cells, threads, |k| one_trial(spec, k))?;

    let mut points = Vec::with_capacity(cells);
    let mut it = est.into_iter();
    for &db in &spec.sweep_points_db {
        for &kind in &spec.rtm_kinds {
            for &metric in &spec.metrics {
                let e = it.next().expect("one estimate per cell");
                points.push(CurvePoint {
                    sweep_value_db: db,
                    rtm_kind: kind,
                    metric,
                    mean_bits: e.mean,
                    stderr_bits: e.stderr,
                    trials: spec.trials,
                });
            }
        }
    }
    Ok(points)
}
