//! One-way vs two-way, elderly share and crossing-policy studies.

use std::fmt;
use std::str::FromStr;

use pedflow_core::metrics::{fit_fundamental, fit_power, FitModel, FundamentalFit};
use pedflow_core::sim::{Scenario, SimParams};

use crate::sweep::{run_sweep, SweepResult, SweepSpec, SweepVariable};
use crate::{spearman, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentName {
    OnewayTwoway,
    Elderly,
    CrossingPolicy,
}

impl ExperimentName {
    pub fn name(self) -> &'static str {
        match self {
            Self::OnewayTwoway => "oneway_twoway",
            Self::Elderly => "elderly",
            Self::CrossingPolicy => "crossing_policy",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oneway_twoway" => Ok(Self::OnewayTwoway),
            "elderly" => Ok(Self::Elderly),
            "crossing_policy" => Ok(Self::CrossingPolicy),
            other => Err(format!(
                "unknown experiment `{other}` (expected oneway_twoway, elderly or crossing_policy)"
            )),
        }
    }
}

pub const DEFAULT_DENSITIES: [usize; 5] = [25, 50, 100, 150, 200];
pub const DEFAULT_FRACTIONS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const CROSSING_DENSITIES: [usize; 3] = [100, 200, 300];
/// Normal walkers in the elderly study (88.2 m/min).
pub const NORMAL_VMAX: f64 = 1.47;
/// Elderly walkers (50.4 m/min).
pub const ELDERLY_VMAX: f64 = 0.84;

fn density_sweep(base: &SimParams, densities: &[usize], replications: u32) -> SweepSpec {
    SweepSpec::new(
        SweepVariable::NPedestrians,
        densities.iter().map(|&n| n as f64).collect(),
        replications,
        base.clone(),
    )
}

#[derive(Debug, Clone)]
pub struct WaysReport {
    pub one_way: SweepResult,
    pub two_way: SweepResult,
    /// Densities (as n) where the two-way replicate mean speed does not
    /// exceed the one-way one.
    pub ordered: Vec<(f64, bool)>,
    /// Same comparison per replication, paired by seed.
    pub ordered_per_replication: Vec<(f64, u32, bool)>,
    /// Linear fit of dissipation time against n, per direction count.
    pub dissipation_linear: [Option<FundamentalFit>; 2],
    /// `(c, p, r2)` of `dissipation = c n^p`, per direction count.
    pub dissipation_power: [Option<(f64, f64, f64)>; 2],
}

impl WaysReport {
    pub fn fit(&self, ways: u8, model: FitModel) -> Option<&FundamentalFit> {
        let r = if ways == 1 { &self.one_way } else { &self.two_way };
        r.fits.iter().find(|f| f.model == model)
    }

    /// `(n, mean dissipation time)` for one or two ways.
    pub fn dissipation_curve(&self, ways: u8) -> Vec<(f64, f64)> {
        let r = if ways == 1 { &self.one_way } else { &self.two_way };
        r.replicate_means_of(|s| s.dissipation_time)
            .into_iter()
            .map(|(n, _, d)| (n, d))
            .collect()
    }
}

/// Matched density sweeps with one and two walking directions. Both share
/// seeds, so replication `r` at density `n` is a paired comparison.
pub fn oneway_twoway(base: &SimParams, densities: &[usize], replications: u32) -> Result<WaysReport, HarnessError> {
    let one = run_sweep(&density_sweep(
        &SimParams {
            n_ways: 1,
            ..base.clone()
        },
        densities,
        replications,
    ))?;
    let two = run_sweep(&density_sweep(
        &SimParams {
            n_ways: 2,
            ..base.clone()
        },
        densities,
        replications,
    ))?;
    let m1 = one.replicate_means();
    let m2 = two.replicate_means();
    let ordered = m1
        .iter()
        .filter_map(|a| m2.iter().find(|b| b.0 == a.0).map(|b| (a.0, b.2 <= a.2)))
        .collect();
    let mut per_rep = Vec::new();
    for a in &one.rows {
        if let Some(b) = two.row(a.value, a.replication) {
            per_rep.push((a.value, a.replication, b.v_bar_sys <= a.v_bar_sys));
        }
    }
    let mut report = WaysReport {
        one_way: one,
        two_way: two,
        ordered,
        ordered_per_replication: per_rep,
        dissipation_linear: [None, None],
        dissipation_power: [None, None],
    };
    for (i, ways) in [1u8, 2].into_iter().enumerate() {
        let curve = report.dissipation_curve(ways);
        report.dissipation_linear[i] = fit_fundamental(&curve, FitModel::Linear).ok();
        report.dissipation_power[i] = fit_power(&curve).ok();
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct ElderlyReport {
    pub sweep: SweepResult,
    /// `(fraction, mean v_bar_sys)` over replications.
    pub points: Vec<(f64, f64)>,
    /// Linear in the fraction.
    pub linear: Option<FundamentalFit>,
    /// `u = a + b ln(1 + 100 fraction)`.
    pub logarithmic: Option<FundamentalFit>,
    pub spearman: Option<f64>,
}

/// Base for the elderly study: one-way, 75 pedestrians, normal walkers at
/// 1.47 m/s and elderly at 0.84 m/s; everything else from `base`.
pub fn elderly_base(base: &SimParams) -> SimParams {
    SimParams {
        n_ways: 1,
        n_pedestrians: 75,
        vmax_mean: NORMAL_VMAX,
        elderly_vmax: ELDERLY_VMAX,
        ..base.clone()
    }
}

/// Sweeps the elderly share on `base` as given (see [`elderly_base`]).
pub fn elderly(base: &SimParams, fractions: &[f64], replications: u32) -> Result<ElderlyReport, HarnessError> {
    let sweep = run_sweep(&SweepSpec::new(
        SweepVariable::ElderlyFraction,
        fractions.to_vec(),
        replications,
        base.clone(),
    ))?;
    let points: Vec<(f64, f64)> = sweep.replicate_means().iter().map(|&(f, _, u)| (f, u)).collect();
    // Percentage shifted by one so the zero share stays on the log scale.
    let shifted: Vec<(f64, f64)> = points.iter().map(|&(f, u)| (1.0 + 100.0 * f, u)).collect();
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    Ok(ElderlyReport {
        linear: fit_fundamental(&points, FitModel::Linear).ok(),
        logarithmic: fit_fundamental(&shifted, FitModel::Logarithmic).ok(),
        spearman: spearman(&xs, &ys),
        sweep,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PolicyWins {
    pub delay: usize,
    pub uncomfortability: usize,
    pub dissipation: usize,
    pub replications: usize,
}

#[derive(Debug, Clone)]
pub struct CrossingReport {
    pub mixed: SweepResult,
    pub segregated: SweepResult,
    /// Segregated over mixed replicate-mean speed at the highest density.
    pub speed_ratio: f64,
    /// Paired replications at the highest density where segregated is lower.
    pub wins: PolicyWins,
    pub highest_density: f64,
}

pub fn crossing_policy(
    base: &SimParams,
    densities: &[usize],
    replications: u32,
) -> Result<CrossingReport, HarnessError> {
    let mixed = run_sweep(&density_sweep(
        &SimParams {
            scenario: Scenario::Mixed,
            ..base.clone()
        },
        densities,
        replications,
    ))?;
    let segregated = run_sweep(&density_sweep(
        &SimParams {
            scenario: Scenario::Segregated,
            ..base.clone()
        },
        densities,
        replications,
    ))?;
    let highest = densities
        .iter()
        .copied()
        .max()
        .ok_or_else(|| HarnessError::Invalid("crossing study needs densities".into()))? as f64;
    let mean_at = |r: &SweepResult| r.replicate_means().into_iter().find(|m| m.0 == highest).map(|m| m.2);
    let speed_ratio = match (mean_at(&segregated), mean_at(&mixed)) {
        (Some(s), Some(m)) if m > 0.0 => s / m,
        _ => f64::NAN,
    };
    let mut wins = PolicyWins::default();
    for m in mixed.rows.iter().filter(|r| r.value == highest) {
        let Some(s) = segregated.row(highest, m.replication) else {
            continue;
        };
        wins.replications += 1;
        wins.delay += (s.d_bar_sys < m.d_bar_sys) as usize;
        wins.uncomfortability += (s.u_bar_sys < m.u_bar_sys) as usize;
        wins.dissipation += (s.dissipation_time < m.dissipation_time) as usize;
    }
    Ok(CrossingReport {
        mixed,
        segregated,
        speed_ratio,
        wins,
        highest_density: highest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in [
            ExperimentName::OnewayTwoway,
            ExperimentName::Elderly,
            ExperimentName::CrossingPolicy,
        ] {
            assert_eq!(e.name().parse::<ExperimentName>().unwrap(), e);
        }
        assert!("lanes".parse::<ExperimentName>().is_err());
    }

    #[test]
    fn elderly_base_keeps_other_parameters() {
        let b = elderly_base(&SimParams::default());
        assert_eq!((b.n_ways, b.n_pedestrians), (1, 75));
        assert_eq!((b.vmax_mean, b.elderly_vmax), (1.47, 0.84));
        assert_eq!(b.alpha, SimParams::default().alpha);
    }

    #[test]
    fn small_oneway_twoway_pairs_rows() {
        let base = SimParams {
            t_max: 120.0,
            ..SimParams::default()
        };
        let r = oneway_twoway(&base, &[10, 20, 30], 1).unwrap();
        assert_eq!(r.ordered.len(), 3);
        assert_eq!(r.ordered_per_replication.len(), 3);
        assert_eq!(r.dissipation_curve(2).len(), 3);
        assert!(r.dissipation_linear[0].is_some());
    }

    #[test]
    fn crossing_counts_paired_replications() {
        let base = SimParams {
            t_max: 120.0,
            ..SimParams::default()
        };
        let r = crossing_policy(&base, &[10, 20], 2).unwrap();
        assert_eq!(r.highest_density, 20.0);
        assert_eq!(r.wins.replications, 2);
        assert!(r.speed_ratio.is_finite());
    }
}
