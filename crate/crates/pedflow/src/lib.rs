//! Experiment harness over `pedflow-core`: sweeps, calibration, the
//! policy studies, lane reporting, CSV output and SVG plots.

pub mod calibrate;
pub mod experiments;
pub mod lanes;
pub mod output;
pub mod plot;
pub mod sweep;

use std::collections::BTreeMap;

use pedflow_core::atxy::{AtxyDatabase, AtxyError};
use pedflow_core::config::ConfigError;
use pedflow_core::metrics::{analyze, Analysis, MetricsError};
use pedflow_core::sim::{run, RunOutput, SimError, SimParams};
use pedflow_core::tracker::TrackerError;
use thiserror::Error;

/// Seconds at the start of a run ignored by the overlap and push-back rates.
pub const TRANSIENT_SECONDS: f64 = 5.0;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error(transparent)]
    Atxy(#[from] AtxyError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

impl HarnessError {
    /// True for problems with the inputs rather than the run itself.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Self::Config(_) | Self::Invalid(_) | Self::Sim(SimError::InvalidParams(_))
        )
    }
}

/// One simulation together with its trap analysis.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub output: RunOutput,
    pub analysis: Analysis,
    pub overlap_rate: f64,
    pub pushback_rate: f64,
}

impl Evaluation {
    /// Time-averaged instantaneous speed of every pedestrian seen in the trap.
    pub fn pedestrian_mean_speeds(&self) -> Vec<f64> {
        pedestrian_mean_speeds(&self.output.trap)
    }
}

pub fn evaluate(params: &SimParams) -> Result<Evaluation, HarnessError> {
    let output = run(params)?;
    let analysis = analyze(&output.trap, &output.vmax)?;
    let (overlap_rate, pushback_rate) = output.health_rates(params.dt, TRANSIENT_SECONDS);
    Ok(Evaluation {
        output,
        analysis,
        overlap_rate,
        pushback_rate,
    })
}

pub fn pedestrian_mean_speeds(db: &AtxyDatabase) -> Vec<f64> {
    let dt = db.dt_seconds();
    db.tracks()
        .filter_map(|track| {
            let v: Vec<f64> = track
                .windows(2)
                .filter(|w| w[1].t == w[0].t + 1)
                .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y) / dt)
                .collect();
            (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
        })
        .collect()
}

/// Spearman rank correlation with average ranks for ties. `None` when either
/// side is constant or the lengths differ.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let mean = (a.len() as f64 + 1.0) / 2.0;
    let mut cov = 0.0;
    let (mut va, mut vb) = (0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - mean) * (y - mean);
        va += (x - mean).powi(2);
        vb += (y - mean).powi(2);
    }
    if va == 0.0 || vb == 0.0 {
        return None;
    }
    Some(cov / (va * vb).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Group-mean of `(x, y)` pairs keyed by `key`, in key order.
pub(crate) fn means_by<K: Ord + Copy>(items: impl IntoIterator<Item = (K, f64, f64)>) -> Vec<(K, f64, f64)> {
    let mut acc: BTreeMap<K, (f64, f64, usize)> = BTreeMap::new();
    for (k, x, y) in items {
        let e = acc.entry(k).or_insert((0.0, 0.0, 0));
        e.0 += x;
        e.1 += y;
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(k, (x, y, n))| (k, x / n as f64, y / n as f64))
        .collect()
}
