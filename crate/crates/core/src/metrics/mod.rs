//! Flow performances computed from an aTXY database.
//!
//! Per-pedestrian running means feed per-frame averages over the pedestrians
//! in the trap, which are in turn time-averaged into system values. All
//! averages use the recursive mean so they can be updated online.

mod fundamental;
mod los;
mod welch;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::atxy::{AtxyDatabase, AtxyRecord};

pub use fundamental::{fit_fundamental, fit_power, FitModel, FundamentalFit};
pub use los::{level_of_service, LevelOfService, LOS_THRESHOLDS};
pub use welch::{welch_t_test, SampleSummary, WelchResult};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("recursive mean needs t >= 1, got {0}")]
    Domain(u64),
    #[error("pedestrian {ped_id} has no record at frame {t}")]
    Gap { ped_id: u32, t: u32 },
    #[error("database has no trap rectangle")]
    MissingTrap,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("non-positive values under a log transform at points {0:?}")]
    NonPositive(Vec<usize>),
    #[error("degenerate fit: {0}")]
    Degenerate(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
}

/// `((t - 1) / t) * prev + z / t`.
pub fn recursive_mean(prev_mean: f64, t: u64, z: f64) -> Result<f64, MetricsError> {
    if t < 1 {
        return Err(MetricsError::Domain(t));
    }
    let t = t as f64;
    Ok((t - 1.0) / t * prev_mean + z / t)
}

/// Streaming mean built on [`recursive_mean`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMean {
    count: u64,
    mean: f64,
}

impl RunningMean {
    pub fn push(&mut self, z: f64) {
        self.count += 1;
        self.mean = recursive_mean(self.mean, self.count, z).expect("count >= 1");
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }
}

/// Running per-pedestrian speed statistics and walked distance.
#[derive(Debug, Clone, PartialEq)]
pub struct PerPedAccumulator {
    pub ped_id: u32,
    pub t_count: u64,
    pub v_bar: f64,
    pub v2_bar: f64,
    pub w: f64,
    pub vmax: Option<f64>,
    pub last: [f64; 2],
}

impl PerPedAccumulator {
    pub fn new(ped_id: u32, start: [f64; 2], vmax: Option<f64>) -> Self {
        Self {
            ped_id,
            t_count: 0,
            v_bar: 0.0,
            v2_bar: 0.0,
            w: 0.0,
            vmax,
            last: start,
        }
    }

    /// Moves to `p`, observed `dt` seconds after the previous position.
    pub fn observe(&mut self, p: [f64; 2], dt: f64) -> f64 {
        let step = (p[0] - self.last[0]).hypot(p[1] - self.last[1]);
        let speed = step / dt;
        self.t_count += 1;
        self.v_bar = recursive_mean(self.v_bar, self.t_count, speed).unwrap();
        self.v2_bar = recursive_mean(self.v2_bar, self.t_count, speed * speed).unwrap();
        self.w += step;
        self.last = p;
        speed
    }
}

/// `1 - v_bar² / v2_bar`, 0 for a pedestrian that never moved.
pub fn uncomfortability(acc: &PerPedAccumulator) -> f64 {
    if acc.v2_bar <= 0.0 {
        return 0.0;
    }
    (1.0 - acc.v_bar * acc.v_bar / acc.v2_bar).clamp(0.0, 1.0)
}

/// `w / v_bar - w / vmax`; `None` without a known vmax.
pub fn delay(acc: &PerPedAccumulator) -> Option<f64> {
    let vmax = acc.vmax?;
    if acc.v_bar <= 0.0 {
        return Some(0.0);
    }
    Some(acc.w / acc.v_bar - acc.w / vmax)
}

/// Speed between frames `t - 1` and `t`.
pub fn instantaneous_speed(db: &AtxyDatabase, ped_id: u32, t: u32) -> Result<f64, MetricsError> {
    let prev_t = t.checked_sub(1).ok_or(MetricsError::Gap { ped_id, t: 0 })?;
    let prev = db.get(ped_id, prev_t).ok_or(MetricsError::Gap { ped_id, t: prev_t })?;
    let cur = db.get(ped_id, t).ok_or(MetricsError::Gap { ped_id, t })?;
    Ok((cur.x - prev.x).hypot(cur.y - prev.y) / db.dt_seconds())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantReport {
    pub t: u32,
    /// Pedestrians inside the trap at `t`.
    pub n: usize,
    pub v_tilde: f64,
    pub d_tilde: f64,
    pub u_tilde: f64,
    /// ped/m²
    pub k: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl Summary {
    /// Sample mean and (n - 1) standard deviation.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std, n }
    }

    pub fn variance(&self) -> f64 {
        self.std * self.std
    }
}

/// Contiguous run of frames with someone in the trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusyPeriod {
    pub first_frame: u32,
    pub last_frame: u32,
    pub duration: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SystemReport {
    pub v_bar_sys: f64,
    pub d_bar_sys: f64,
    pub u_bar_sys: f64,
    /// Seconds from the first trap entry to the last trap exit.
    pub dissipation_time: f64,
    pub busy_periods: Vec<BusyPeriod>,
    pub k_mean: f64,
    pub n_mean: f64,
    pub speed_stats: Summary,
    pub accel_stats: Summary,
    pub pedestrians: usize,
    /// Pedestrians whose delay could not be computed (no vmax known).
    pub missing_vmax: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Analysis {
    pub instants: Vec<InstantReport>,
    pub system: SystemReport,
    /// Every instantaneous speed sample, in record order.
    pub speeds: Vec<f64>,
}

/// Per-frame and system flow performances of a trap database.
///
/// A pedestrian joins the frame averages from its second frame in the trap
/// (its first speed sample). Frames with nobody in the trap are skipped by
/// the time averages.
pub fn analyze(db: &AtxyDatabase, vmax_map: &BTreeMap<u32, f64>) -> Result<Analysis, MetricsError> {
    let trap = db.trap().ok_or(MetricsError::MissingTrap)?;
    let area = trap.area();
    let dt = db.dt_seconds();
    let Some((first, last)) = db.frame_range() else {
        return Ok(Analysis::default());
    };

    let mut by_frame: BTreeMap<u32, Vec<AtxyRecord>> = BTreeMap::new();
    for r in db.records() {
        by_frame.entry(r.t).or_default().push(*r);
    }

    let mut accs: BTreeMap<u32, PerPedAccumulator> = BTreeMap::new();
    let mut last_frame_seen: BTreeMap<u32, u32> = BTreeMap::new();
    let mut last_speed: BTreeMap<u32, f64> = BTreeMap::new();
    let mut missing: BTreeSet<u32> = BTreeSet::new();
    let mut instants = Vec::new();
    let mut speeds = Vec::new();
    let mut accels = Vec::new();
    let (mut v_sys, mut d_sys, mut u_sys) = (RunningMean::default(), RunningMean::default(), RunningMean::default());
    let (mut k_sys, mut n_sys) = (RunningMean::default(), RunningMean::default());

    for (&t, rows) in &by_frame {
        let mut v_sum = 0.0;
        let mut u_sum = 0.0;
        let mut d_sum = 0.0;
        let mut d_count = 0usize;
        let mut samples = 0usize;
        for r in rows {
            let contiguous = last_frame_seen.get(&r.ped_id) == Some(&(t.wrapping_sub(1)));
            last_frame_seen.insert(r.ped_id, t);
            if !contiguous {
                // (re)entry: restart the position chain, keep the running means
                accs.entry(r.ped_id)
                    .or_insert_with(|| {
                        let vmax = vmax_map.get(&r.ped_id).copied();
                        if vmax.is_none() {
                            missing.insert(r.ped_id);
                        }
                        PerPedAccumulator::new(r.ped_id, [r.x, r.y], vmax)
                    })
                    .last = [r.x, r.y];
                last_speed.remove(&r.ped_id);
                continue;
            }
            let acc = accs.get_mut(&r.ped_id).expect("accumulator exists");
            let speed = acc.observe([r.x, r.y], dt);
            speeds.push(speed);
            if let Some(prev) = last_speed.insert(r.ped_id, speed) {
                accels.push((speed - prev).abs() / dt);
            }
            v_sum += speed;
            u_sum += uncomfortability(acc);
            if let Some(d) = delay(acc) {
                d_sum += d;
                d_count += 1;
            }
            samples += 1;
        }
        let n = rows.len();
        let k = n as f64 / area;
        if samples == 0 {
            continue;
        }
        let report = InstantReport {
            t,
            n,
            v_tilde: v_sum / samples as f64,
            d_tilde: if d_count > 0 { d_sum / d_count as f64 } else { 0.0 },
            u_tilde: u_sum / samples as f64,
            k,
        };
        v_sys.push(report.v_tilde);
        u_sys.push(report.u_tilde);
        if d_count > 0 {
            d_sys.push(report.d_tilde);
        }
        k_sys.push(k);
        n_sys.push(n as f64);
        instants.push(report);
    }

    let frames: Vec<u32> = by_frame.keys().copied().collect();
    let mut busy_periods = Vec::new();
    let mut start = frames[0];
    for w in frames.windows(2) {
        if w[1] != w[0] + 1 {
            busy_periods.push(BusyPeriod {
                first_frame: start,
                last_frame: w[0],
                duration: (w[0] - start) as f64 * dt,
            });
            start = w[1];
        }
    }
    busy_periods.push(BusyPeriod {
        first_frame: start,
        last_frame: last,
        duration: (last - start) as f64 * dt,
    });

    let system = SystemReport {
        v_bar_sys: v_sys.mean().unwrap_or(0.0),
        d_bar_sys: d_sys.mean().unwrap_or(0.0),
        u_bar_sys: u_sys.mean().unwrap_or(0.0),
        dissipation_time: (last - first) as f64 * dt,
        busy_periods,
        k_mean: k_sys.mean().unwrap_or(0.0),
        n_mean: n_sys.mean().unwrap_or(0.0),
        speed_stats: Summary::of(&speeds),
        accel_stats: Summary::of(&accels),
        pedestrians: accs.len(),
        missing_vmax: missing.into_iter().collect(),
    };
    Ok(Analysis {
        instants,
        system,
        speeds,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MacroReport {
    /// ped/s/m
    pub q: f64,
    pub time_mean_speed: f64,
    pub space_mean_speed: f64,
    /// m²/ped
    pub area_module: f64,
    /// ped/m²
    pub k: f64,
    /// Pedestrians with both an entry and an exit.
    pub n: usize,
    /// Observation period (s).
    pub period: f64,
    /// Mean time spent in the trap (s).
    pub mean_travel_time: f64,
    /// Pedestrians still in the trap at the last frame.
    pub excluded: Vec<u32>,
}

/// `q = N / (T w)`, `u = L / t̄`, `M = w L T / (N t̄)`, `k = 1 / M`.
pub fn macroscopic_from_counts(n: usize, period: f64, width: f64, length: f64, mean_travel: f64) -> MacroReport {
    let q = n as f64 / (period * width);
    let area_module = width * length * period / (n as f64 * mean_travel);
    MacroReport {
        q,
        space_mean_speed: length / mean_travel,
        area_module,
        k: 1.0 / area_module,
        n,
        period,
        mean_travel_time: mean_travel,
        ..Default::default()
    }
}

/// Stream-level flow, speeds, density and area module of the trap.
///
/// A pedestrian's trap time runs from its first to one frame past its last
/// record; pedestrians still present at the final frame have no exit and
/// are excluded.
pub fn macroscopic(db: &AtxyDatabase) -> Result<MacroReport, MetricsError> {
    let trap = db.trap().ok_or(MetricsError::MissingTrap)?;
    let Some((first, last)) = db.frame_range() else {
        return Ok(MacroReport::default());
    };
    let dt = db.dt_seconds();
    let mut excluded = Vec::new();
    let mut travel = Vec::new();
    for track in db.tracks() {
        let exit = track.last().unwrap().t;
        if exit == last {
            excluded.push(track[0].ped_id);
            continue;
        }
        travel.push((exit + 1 - track[0].t) as f64 * dt);
    }
    let speeds: Vec<f64> = db
        .tracks()
        .flat_map(|tr| tr.windows(2).filter(|w| w[1].t == w[0].t + 1))
        .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y) / dt)
        .collect();
    let period = (last + 1 - first) as f64 * dt;
    if travel.is_empty() {
        return Ok(MacroReport {
            excluded,
            period,
            ..Default::default()
        });
    }
    let mean_travel = travel.iter().sum::<f64>() / travel.len() as f64;
    let mut report = macroscopic_from_counts(travel.len(), period, trap.width(), trap.length(), mean_travel);
    report.time_mean_speed = Summary::of(&speeds).mean;
    report.excluded = excluded;
    Ok(report)
}

/// Mean over pedestrians of the time-averaged velocity component along the
/// desired direction, normalised by each pedestrian's vmax.
pub fn efficiency(
    db: &AtxyDatabase,
    desired_directions: &BTreeMap<u32, [f64; 2]>,
    vmax_map: &BTreeMap<u32, f64>,
) -> f64 {
    let dt = db.dt_seconds();
    let mut per_ped = Vec::new();
    for track in db.tracks() {
        let id = track[0].ped_id;
        let (Some(e), Some(&v0)) = (desired_directions.get(&id), vmax_map.get(&id)) else {
            continue;
        };
        let mut along = RunningMean::default();
        for w in track.windows(2).filter(|w| w[1].t == w[0].t + 1) {
            let vx = (w[1].x - w[0].x) / dt;
            let vy = (w[1].y - w[0].y) / dt;
            along.push(vx * e[0] + vy * e[1]);
        }
        if let Some(m) = along.mean() {
            per_ped.push(m / v0);
        }
    }
    if per_ped.is_empty() {
        return 0.0;
    }
    (per_ped.iter().sum::<f64>() / per_ped.len() as f64).clamp(-1.0, 1.0)
}

/// Histogram with fixed `bin_width` starting at 0: `(lo, hi, count)`.
pub fn histogram(values: &[f64], bin_width: f64) -> Vec<(f64, f64, usize)> {
    if values.is_empty() || !bin_width.is_finite() || bin_width <= 0.0 {
        return Vec::new();
    }
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    let bins = ((max / bin_width).floor() as usize) + 1;
    let mut counts = vec![0usize; bins];
    for v in values {
        let i = ((v.max(0.0) / bin_width).floor() as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i as f64 * bin_width, (i + 1) as f64 * bin_width, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atxy::TrapRect;
    use rand::{Rng, SeedableRng};
    use rand_pcg::Pcg64;

    fn trap() -> TrapRect {
        TrapRect::new(0.0, 0.0, 2.0, 10.0).unwrap()
    }

    /// One pedestrian walking straight up at `v` m/s through the trap.
    fn walker(id: u32, x: f64, v: f64, dt: f64, start: u32) -> Vec<AtxyRecord> {
        let frames = (10.0 / (v * dt)).round() as u32;
        (0..=frames)
            .map(|k| AtxyRecord::new(id, start + k, x, k as f64 * v * dt))
            .collect()
    }

    #[test]
    fn recursive_mean_prefixes() {
        assert_eq!(recursive_mean(123.0, 1, 5.0).unwrap(), 5.0);
        let mut m = RunningMean::default();
        for (i, z) in [1.0, 2.0, 3.0].into_iter().enumerate() {
            m.push(z);
            let batch = (1..=i + 1).map(|k| k as f64).sum::<f64>() / (i + 1) as f64;
            assert!((m.mean().unwrap() - batch).abs() < 1e-15);
        }
        assert_eq!(m.mean(), Some(2.0));
        assert_eq!(recursive_mean(0.0, 0, 1.0), Err(MetricsError::Domain(0)));
    }

    #[test]
    fn recursive_mean_matches_batch_on_long_stream() {
        let mut rng = Pcg64::seed_from_u64(3);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let mut m = RunningMean::default();
        xs.iter().for_each(|&x| m.push(x));
        let batch = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((m.mean().unwrap() - batch).abs() < 1e-9 * batch);
    }

    #[test]
    fn speed_from_three_four_five() {
        let db = AtxyDatabase::new(
            vec![AtxyRecord::new(1, 0, 0.0, 0.0), AtxyRecord::new(1, 1, 0.3, 0.4)],
            0.5,
            None,
        )
        .unwrap();
        assert!((instantaneous_speed(&db, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            instantaneous_speed(&db, 1, 2),
            Err(MetricsError::Gap { ped_id: 1, t: 2 })
        );
        let still = AtxyDatabase::new(
            vec![AtxyRecord::new(1, 0, 1.0, 1.0), AtxyRecord::new(1, 1, 1.0, 1.0)],
            0.5,
            None,
        )
        .unwrap();
        assert_eq!(instantaneous_speed(&still, 1, 1).unwrap(), 0.0);
    }

    fn acc_from_speeds(speeds: &[f64], vmax: Option<f64>) -> PerPedAccumulator {
        let mut acc = PerPedAccumulator::new(1, [0.0, 0.0], vmax);
        let mut y = 0.0;
        for s in speeds {
            y += s;
            acc.observe([0.0, y], 1.0);
        }
        acc
    }

    #[test]
    fn uncomfortability_cases() {
        assert!(uncomfortability(&acc_from_speeds(&[1.3; 20], None)).abs() < 1e-12);
        let alt = acc_from_speeds(&[1.0, 2.0, 1.0, 2.0], None);
        assert!((uncomfortability(&alt) - 0.1).abs() < 1e-12);
        let never = PerPedAccumulator::new(1, [0.0, 0.0], None);
        assert_eq!(uncomfortability(&never), 0.0);
    }

    #[test]
    fn uncomfortability_is_variance_ratio() {
        let mut rng = Pcg64::seed_from_u64(8);
        for _ in 0..50 {
            let speeds: Vec<f64> = (0..rng.random_range(2..40))
                .map(|_| rng.random_range(0.0..2.5))
                .collect();
            let acc = acc_from_speeds(&speeds, None);
            let n = speeds.len() as f64;
            let mean = speeds.iter().sum::<f64>() / n;
            let var = speeds.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
            let m2 = speeds.iter().map(|s| s * s).sum::<f64>() / n;
            assert!((uncomfortability(&acc) - var / m2).abs() < 1e-9);
        }
    }

    #[test]
    fn delay_cases() {
        let at_max = acc_from_speeds(&[1.5; 5], Some(1.5));
        assert!(delay(&at_max).unwrap().abs() < 1e-12);
        let acc = PerPedAccumulator {
            w: 10.0,
            v_bar: 1.0,
            vmax: Some(2.0),
            ..PerPedAccumulator::new(1, [0.0, 0.0], None)
        };
        assert_eq!(delay(&acc), Some(5.0));
        let slow = acc_from_speeds(&[0.5, 0.7], Some(1.0));
        assert!(delay(&slow).unwrap() > 0.0);
        assert_eq!(delay(&acc_from_speeds(&[1.0], None)), None);
    }

    #[test]
    fn analyze_single_walker() {
        let dt = 0.1;
        let db = AtxyDatabase::new(walker(1, 1.0, 1.25, dt, 3), dt, Some(trap())).unwrap();
        let vmax = BTreeMap::from([(1, 1.25)]);
        let a = analyze(&db, &vmax).unwrap();
        assert!((a.system.v_bar_sys - 1.25).abs() < 1e-9);
        assert!(a.system.u_bar_sys.abs() < 1e-9);
        assert!(a.system.d_bar_sys.abs() < 1e-9);
        assert!((a.system.dissipation_time - 10.0 / 1.25).abs() < 1e-9);
        assert_eq!(a.system.busy_periods.len(), 1);
        assert!((a.instants[0].k - 1.0 / 20.0).abs() < 1e-12);
        assert!(a.system.missing_vmax.is_empty());
    }

    #[test]
    fn analyze_two_identical_walkers_average() {
        let dt = 0.1;
        let mut recs = walker(1, 0.5, 1.0, dt, 0);
        recs.extend(walker(2, 1.5, 1.0, dt, 0));
        let db = AtxyDatabase::new(recs, dt, Some(trap())).unwrap();
        let single = AtxyDatabase::new(walker(1, 0.5, 1.0, dt, 0), dt, Some(trap())).unwrap();
        let a = analyze(&db, &BTreeMap::new()).unwrap();
        let b = analyze(&single, &BTreeMap::new()).unwrap();
        for (x, y) in a.instants.iter().zip(&b.instants) {
            assert!((x.v_tilde - y.v_tilde).abs() < 1e-12);
            assert_eq!(x.n, 2 * y.n);
        }
        assert_eq!(a.system.missing_vmax, vec![1, 2]);
    }

    #[test]
    fn analyze_invariant_to_relabeling() {
        let dt = 0.2;
        let mut recs = walker(1, 0.5, 1.0, dt, 0);
        recs.extend(walker(2, 1.5, 1.4, dt, 4));
        let relabeled: Vec<_> = recs
            .iter()
            .rev()
            .map(|r| AtxyRecord {
                ped_id: 10 - r.ped_id,
                ..*r
            })
            .collect();
        let a = analyze(
            &AtxyDatabase::new(recs, dt, Some(trap())).unwrap(),
            &BTreeMap::from([(1, 1.5), (2, 1.5)]),
        )
        .unwrap();
        let b = analyze(
            &AtxyDatabase::new(relabeled, dt, Some(trap())).unwrap(),
            &BTreeMap::from([(9, 1.5), (8, 1.5)]),
        )
        .unwrap();
        assert_eq!(a.instants, b.instants);
        assert_eq!(a.system.v_bar_sys, b.system.v_bar_sys);
    }

    #[test]
    fn analyze_reports_separate_busy_periods() {
        let dt = 0.5;
        let mut recs = walker(1, 1.0, 1.0, dt, 0);
        recs.extend(walker(2, 1.0, 1.0, dt, 100));
        let a = analyze(&AtxyDatabase::new(recs, dt, Some(trap())).unwrap(), &BTreeMap::new()).unwrap();
        assert_eq!(a.system.busy_periods.len(), 2);
        assert!((a.system.busy_periods[1].duration - 10.0).abs() < 1e-12);
    }

    #[test]
    fn analyze_empty_and_missing_trap() {
        let db = AtxyDatabase::empty(0.1, Some(trap())).unwrap();
        assert_eq!(analyze(&db, &BTreeMap::new()).unwrap(), Analysis::default());
        let no_trap = AtxyDatabase::empty(0.1, None).unwrap();
        assert_eq!(analyze(&no_trap, &BTreeMap::new()), Err(MetricsError::MissingTrap));
    }

    #[test]
    fn macroscopic_substitutions() {
        let r = macroscopic_from_counts(30, 60.0, 2.0, 10.0, 8.0);
        assert!((r.q - 0.25).abs() < 1e-12);
        assert!((r.area_module - 5.0).abs() < 1e-12);
        assert!((r.q - r.space_mean_speed * r.k).abs() < 1e-12);
    }

    #[test]
    fn macroscopic_excludes_unfinished() {
        let dt = 0.1;
        let mut recs = walker(1, 1.0, 1.0, dt, 0);
        recs.extend(walker(2, 1.0, 2.0, dt, 0));
        let db = AtxyDatabase::new(recs, dt, Some(trap())).unwrap();
        let r = macroscopic(&db).unwrap();
        assert_eq!(r.excluded, vec![1]);
        assert_eq!(r.n, 1);
        assert!((r.space_mean_speed - 10.0 / 5.1).abs() < 1e-9);
    }

    #[test]
    fn efficiency_limits() {
        let dt = 0.1;
        let db = AtxyDatabase::new(walker(1, 1.0, 1.5, dt, 0), dt, Some(trap())).unwrap();
        let dirs = BTreeMap::from([(1, [0.0, 1.0])]);
        let e = efficiency(&db, &dirs, &BTreeMap::from([(1, 1.5)]));
        assert!((e - 1.0).abs() < 1e-9);
        let still = AtxyDatabase::new(
            (0..10).map(|t| AtxyRecord::new(1, t, 1.0, 1.0)).collect(),
            dt,
            Some(trap()),
        )
        .unwrap();
        assert_eq!(efficiency(&still, &dirs, &BTreeMap::from([(1, 1.5)])), 0.0);
    }

    #[test]
    fn histogram_counts_sum() {
        let h = histogram(&[0.05, 0.15, 0.15, 1.0], 0.1);
        assert_eq!(h.iter().map(|b| b.2).sum::<usize>(), 4);
        assert_eq!(h[1].2, 2);
        assert!(histogram(&[], 0.1).is_empty());
    }
}
