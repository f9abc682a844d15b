use pedflow_core::metrics::{welch_t_test, SampleSummary, Summary, WelchResult};
use pedflow_core::sim::SimParams;
use rayon::prelude::*;

use crate::sweep::SweepVariable;
use crate::{evaluate, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTarget {
    pub target_speed_mean: f64,
    pub target_speed_std: f64,
    /// A point is feasible only when its overlap rate is strictly below this.
    pub max_overlap_rate: f64,
    pub max_pushback_rate: f64,
}

impl Default for CalibrationTarget {
    fn default() -> Self {
        Self {
            target_speed_mean: 1.38,
            target_speed_std: 0.37,
            max_overlap_rate: 0.02,
            max_pushback_rate: 0.02,
        }
    }
}

impl CalibrationTarget {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !(pos(self.target_speed_mean) && pos(self.target_speed_std)) {
            return Err(HarnessError::Invalid("speed targets must be positive".into()));
        }
        if !(nonneg(self.max_overlap_rate) && nonneg(self.max_pushback_rate)) {
            return Err(HarnessError::Invalid("rate caps must be non-negative".into()));
        }
        Ok(())
    }
}

/// Variable assignments of one grid point.
pub type Assignment = Vec<(SweepVariable, f64)>;

/// Cartesian product of per-variable value lists applied to a base.
#[derive(Debug, Clone)]
pub struct CalibrationGrid {
    pub axes: Vec<(SweepVariable, Vec<f64>)>,
    pub base: SimParams,
    /// Seeds `base.seed .. base.seed + replications` are pooled per point.
    pub replications: u32,
}

impl CalibrationGrid {
    pub fn points(&self) -> Result<Vec<(Assignment, SimParams)>, HarnessError> {
        if self.replications == 0 {
            return Err(HarnessError::Invalid(
                "calibration needs at least one replication".into(),
            ));
        }
        if self.axes.iter().any(|(_, v)| v.is_empty()) {
            return Err(HarnessError::Invalid("calibration grid axis without values".into()));
        }
        let mut out: Vec<Assignment> = vec![Vec::new()];
        for (var, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push((*var, v));
                        p
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|assign| {
                let mut p = self.base.clone();
                for &(var, v) in &assign {
                    var.apply(&mut p, v)?;
                }
                p.validate()?;
                Ok((assign, p))
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationPoint {
    pub assignment: Assignment,
    pub params: SimParams,
    /// Trap-restricted instantaneous speeds, pooled over replications.
    pub speed: Summary,
    pub overlap_rate: f64,
    pub pushback_rate: f64,
    /// Per-pedestrian mean speeds, the sample used for the t-test.
    pub pedestrian_speeds: SampleSummary,
    pub objective: f64,
    pub feasible: bool,
}

impl CalibrationPoint {
    /// How far the point sits outside the caps (0 when feasible).
    pub fn violation(&self, target: &CalibrationTarget) -> f64 {
        let excess = |rate: f64, cap: f64| if rate < cap { 0.0 } else { rate - cap + f64::EPSILON };
        excess(self.overlap_rate, target.max_overlap_rate) + excess(self.pushback_rate, target.max_pushback_rate)
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub target: CalibrationTarget,
    /// Every grid point in grid order.
    pub points: Vec<CalibrationPoint>,
    pub winner: Option<usize>,
    pub welch: Option<WelchResult>,
}

impl CalibrationReport {
    pub fn winner_point(&self) -> Option<&CalibrationPoint> {
        self.winner.map(|i| &self.points[i])
    }

    /// Feasible points that no other feasible point beats on both the
    /// objective and the combined rate.
    pub fn frontier(&self) -> Vec<usize> {
        let feasible: Vec<usize> = (0..self.points.len()).filter(|&i| self.points[i].feasible).collect();
        let rate = |i: usize| self.points[i].overlap_rate + self.points[i].pushback_rate;
        feasible
            .iter()
            .copied()
            .filter(|&i| {
                !feasible.iter().any(|&j| {
                    j != i
                        && self.points[j].objective <= self.points[i].objective
                        && rate(j) <= rate(i)
                        && (self.points[j].objective < self.points[i].objective || rate(j) < rate(i))
                })
            })
            .collect()
    }

    /// Indices of the `count` points closest to feasibility.
    pub fn nearest_to_feasible(&self, count: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| {
            let va = self.points[a].violation(&self.target);
            let vb = self.points[b].violation(&self.target);
            va.total_cmp(&vb)
                .then(self.points[a].objective.total_cmp(&self.points[b].objective))
                .then(a.cmp(&b))
        });
        idx.truncate(count);
        idx
    }
}

fn score(
    assignment: Assignment,
    params: SimParams,
    replications: u32,
    target: &CalibrationTarget,
) -> Result<CalibrationPoint, HarnessError> {
    let mut speeds = Vec::new();
    let mut ped_speeds = Vec::new();
    let (mut overlap, mut pushback) = (0.0, 0.0);
    for r in 0..replications {
        let p = SimParams {
            seed: params.seed.wrapping_add(r as u64),
            ..params.clone()
        };
        let e = evaluate(&p)?;
        speeds.extend_from_slice(&e.analysis.speeds);
        ped_speeds.extend(e.pedestrian_mean_speeds());
        overlap += e.overlap_rate / replications as f64;
        pushback += e.pushback_rate / replications as f64;
    }
    let speed = Summary::of(&speeds);
    let objective = (speed.mean - target.target_speed_mean).powi(2) + (speed.std - target.target_speed_std).powi(2);
    Ok(CalibrationPoint {
        assignment,
        params,
        speed,
        overlap_rate: overlap,
        pushback_rate: pushback,
        pedestrian_speeds: SampleSummary::of(&ped_speeds),
        objective,
        feasible: overlap < target.max_overlap_rate && pushback < target.max_pushback_rate,
    })
}

/// Scores every grid point, keeps those under both rate caps and picks the
/// one closest to the target speed distribution. Ties go to the earlier grid
/// point. With a `reference` sample the winner is t-tested against it.
pub fn calibrate(
    grid: &CalibrationGrid,
    target: &CalibrationTarget,
    reference: Option<&SampleSummary>,
) -> Result<CalibrationReport, HarnessError> {
    target.validate()?;
    let points = grid.points()?;
    let scored: Vec<CalibrationPoint> = points
        .into_par_iter()
        .map(|(assign, p)| score(assign, p, grid.replications, target))
        .collect::<Result<_, _>>()?;
    let winner = scored
        .iter()
        .enumerate()
        .filter(|(_, p)| p.feasible)
        .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i);
    let welch = match (winner, reference) {
        (Some(i), Some(r)) => welch_t_test(scored[i].pedestrian_speeds, *r).ok(),
        _ => None,
    };
    Ok(CalibrationReport {
        target: *target,
        points: scored,
        winner,
        welch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimParams {
        SimParams {
            n_pedestrians: 30,
            t_max: 120.0,
            ..SimParams::default()
        }
    }

    #[test]
    fn grid_is_cartesian_in_order() {
        let grid = CalibrationGrid {
            axes: vec![
                (SweepVariable::Alpha, vec![0.1, 0.2]),
                (SweepVariable::Chi, vec![0.3, 0.4, 0.5]),
            ],
            base: base(),
            replications: 1,
        };
        let pts = grid.points().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1].0, vec![(SweepVariable::Alpha, 0.1), (SweepVariable::Chi, 0.4)]);
        assert_eq!(pts[3].1.alpha, 0.2);
        assert_eq!(pts[3].1.chi, 0.3);
    }

    #[test]
    fn single_point_grid_returns_that_point() {
        let grid = CalibrationGrid {
            axes: vec![(SweepVariable::Alpha, vec![0.205])],
            base: base(),
            replications: 1,
        };
        let target = CalibrationTarget {
            max_overlap_rate: 1.0,
            max_pushback_rate: 1.0,
            ..Default::default()
        };
        let reference = SampleSummary::new(1.363, 0.050, 119);
        let r = calibrate(&grid, &target, Some(&reference)).unwrap();
        assert_eq!(r.winner, Some(0));
        let w = r.winner_point().unwrap();
        let expected = (w.speed.mean - 1.38).powi(2) + (w.speed.std - 0.37).powi(2);
        assert!((w.objective - expected).abs() < 1e-15);
        assert!(r.welch.is_some());
        assert_eq!(r.frontier(), vec![0]);
    }

    #[test]
    fn zero_caps_leave_nothing_feasible() {
        let grid = CalibrationGrid {
            axes: vec![(SweepVariable::Alpha, vec![0.15, 0.205])],
            base: base(),
            replications: 1,
        };
        let target = CalibrationTarget {
            max_overlap_rate: 0.0,
            max_pushback_rate: 0.0,
            ..Default::default()
        };
        let r = calibrate(&grid, &target, None).unwrap();
        assert_eq!(r.winner, None);
        assert!(r.points.iter().all(|p| !p.feasible));
        assert_eq!(r.nearest_to_feasible(5).len(), 2);
    }

    #[test]
    fn winner_minimises_objective_over_feasible() {
        let grid = CalibrationGrid {
            axes: vec![(SweepVariable::VmaxMean, vec![1.2, 1.5, 1.8])],
            base: base(),
            replications: 1,
        };
        let r = calibrate(&grid, &CalibrationTarget::default(), None).unwrap();
        let best = r
            .points
            .iter()
            .filter(|p| p.feasible)
            .map(|p| p.objective)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(r.winner_point().unwrap().objective, best);
    }

    #[test]
    fn bad_targets_rejected() {
        let t = CalibrationTarget {
            target_speed_std: 0.0,
            ..Default::default()
        };
        assert!(t.validate().is_err());
    }
}
