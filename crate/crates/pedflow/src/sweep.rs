use std::fmt;
use std::str::FromStr;

use pedflow_core::metrics::{fit_fundamental, FitModel, FundamentalFit};
use pedflow_core::sim::SimParams;
use rayon::prelude::*;

use crate::{evaluate, means_by, Evaluation, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    NPedestrians,
    VmaxMean,
    Mass,
    Alpha,
    Beta,
    Chi,
    Dt,
    ElderlyFraction,
    /// alpha, beta and chi set to the same value.
    ForceScale,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 9] = [
        Self::NPedestrians,
        Self::VmaxMean,
        Self::Mass,
        Self::Alpha,
        Self::Beta,
        Self::Chi,
        Self::Dt,
        Self::ElderlyFraction,
        Self::ForceScale,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NPedestrians => "n_pedestrians",
            Self::VmaxMean => "vmax_mean",
            Self::Mass => "mass",
            Self::Alpha => "alpha",
            Self::Beta => "beta",
            Self::Chi => "chi",
            Self::Dt => "dt",
            Self::ElderlyFraction => "elderly_fraction",
            Self::ForceScale => "alpha_beta_chi",
        }
    }

    pub fn apply(self, params: &mut SimParams, value: f64) -> Result<(), HarnessError> {
        match self {
            Self::NPedestrians => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(HarnessError::Invalid(format!(
                        "n_pedestrians must be a positive integer, got {value}"
                    )));
                }
                params.n_pedestrians = value as usize;
            }
            Self::VmaxMean => params.vmax_mean = value,
            Self::Mass => params.mass = value,
            Self::Alpha => params.alpha = value,
            Self::Beta => params.beta = value,
            Self::Chi => params.chi = value,
            Self::Dt => params.dt = value,
            Self::ElderlyFraction => params.elderly_fraction = value,
            Self::ForceScale => {
                params.alpha = value;
                params.beta = value;
                params.chi = value;
            }
        }
        Ok(())
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|v| v.name()).collect();
            format!("unknown sweep variable `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub replications: u32,
    pub base: SimParams,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<f64>, replications: u32, base: SimParams) -> Self {
        Self {
            variable,
            values,
            replications,
            base,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.values.is_empty() {
            return Err(HarnessError::Invalid("sweep needs at least one value".into()));
        }
        if self.replications == 0 {
            return Err(HarnessError::Invalid("sweep needs at least one replication".into()));
        }
        for &v in &self.values {
            self.params_for(v, 0)?.validate()?;
        }
        Ok(())
    }

    /// Replication `r` runs with seed `base.seed + r`, so every value sees
    /// the same seeds.
    pub fn params_for(&self, value: f64, replication: u32) -> Result<SimParams, HarnessError> {
        let mut p = self.base.clone();
        self.variable.apply(&mut p, value)?;
        p.seed = self.base.seed.wrapping_add(replication as u64);
        Ok(p)
    }
}

/// Scalar results of one sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub value: f64,
    pub replication: u32,
    pub seed: u64,
    pub v_bar_sys: f64,
    pub u_bar_sys: f64,
    pub d_bar_sys: f64,
    pub dissipation_time: f64,
    pub k_mean: f64,
    pub n_mean: f64,
    pub speed_mean: f64,
    pub speed_std: f64,
    pub overlap_rate: f64,
    pub pushback_rate: f64,
    pub complete: bool,
}

impl RunSummary {
    pub fn from_evaluation(value: f64, replication: u32, seed: u64, e: &Evaluation) -> Self {
        let s = &e.analysis.system;
        Self {
            value,
            replication,
            seed,
            v_bar_sys: s.v_bar_sys,
            u_bar_sys: s.u_bar_sys,
            d_bar_sys: s.d_bar_sys,
            dissipation_time: s.dissipation_time,
            k_mean: s.k_mean,
            n_mean: s.n_mean,
            speed_mean: s.speed_stats.mean,
            speed_std: s.speed_stats.std,
            overlap_rate: e.overlap_rate,
            pushback_rate: e.pushback_rate,
            complete: e.output.complete,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub value: f64,
    pub replication: u32,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub variable: SweepVariable,
    /// Successful runs in sweep order (value-major, then replication).
    pub rows: Vec<RunSummary>,
    pub failures: Vec<RunFailure>,
    /// Linear and logarithmic u-k fits, only for density sweeps.
    pub fits: Vec<FundamentalFit>,
}

impl SweepResult {
    /// `(value, mean k, mean v_bar_sys)` over replications, in value order.
    pub fn replicate_means(&self) -> Vec<(f64, f64, f64)> {
        self.replicate_means_of(|r| r.v_bar_sys)
    }

    /// `(value, mean k, mean of field)` over replications.
    pub fn replicate_means_of(&self, field: impl Fn(&RunSummary) -> f64) -> Vec<(f64, f64, f64)> {
        // keys are f64; order by position in the sweep instead
        let mut order: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !order.contains(&r.value) {
                order.push(r.value);
            }
        }
        means_by(self.rows.iter().map(|r| {
            let idx = order.iter().position(|v| *v == r.value).unwrap();
            (idx, r.k_mean, field(r))
        }))
        .into_iter()
        .map(|(i, k, y)| (order[i], k, y))
        .collect()
    }

    pub fn row(&self, value: f64, replication: u32) -> Option<&RunSummary> {
        self.rows
            .iter()
            .find(|r| r.value == value && r.replication == replication)
    }
}

/// `(k, u)` fits over replicate means. Fits that cannot be computed are
/// left out.
pub fn uk_fits(points: &[(f64, f64)]) -> Vec<FundamentalFit> {
    [FitModel::Linear, FitModel::Logarithmic]
        .into_iter()
        .filter_map(|m| fit_fundamental(points, m).ok())
        .collect()
}

/// Runs every `(value, replication)` pair, in parallel, and returns rows in
/// sweep order. A failing run is logged and the sweep carries on.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    let jobs: Vec<(f64, u32)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.replications).map(move |r| (v, r)))
        .collect();
    let outcomes: Vec<Result<RunSummary, RunFailure>> = jobs
        .par_iter()
        .map(|&(value, rep)| {
            let params = spec.params_for(value, rep).expect("validated");
            evaluate(&params)
                .map(|e| RunSummary::from_evaluation(value, rep, params.seed, &e))
                .map_err(|e| RunFailure {
                    value,
                    replication: rep,
                    seed: params.seed,
                    message: e.to_string(),
                })
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(f) => failures.push(f),
        }
    }
    let mut result = SweepResult {
        variable: spec.variable,
        rows,
        failures,
        fits: Vec::new(),
    };
    if spec.variable == SweepVariable::NPedestrians {
        let pts: Vec<(f64, f64)> = result.replicate_means().iter().map(|&(_, k, u)| (k, u)).collect();
        result.fits = uk_fits(&pts);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_base() -> SimParams {
        SimParams {
            n_pedestrians: 10,
            n_ways: 1,
            t_max: 120.0,
            ..SimParams::default()
        }
    }

    #[test]
    fn variable_names_round_trip() {
        for v in SweepVariable::ALL {
            assert_eq!(v.name().parse::<SweepVariable>().unwrap(), v);
        }
        assert!("speed".parse::<SweepVariable>().is_err());
    }

    #[test]
    fn force_scale_sets_all_three() {
        let mut p = SimParams::default();
        SweepVariable::ForceScale.apply(&mut p, 0.4).unwrap();
        assert_eq!((p.alpha, p.beta, p.chi), (0.4, 0.4, 0.4));
        assert!(SweepVariable::NPedestrians.apply(&mut p, 2.5).is_err());
    }

    #[test]
    fn invalid_specs_rejected() {
        let base = small_base();
        assert!(SweepSpec::new(SweepVariable::Mass, vec![], 1, base.clone())
            .validate()
            .is_err());
        assert!(SweepSpec::new(SweepVariable::Mass, vec![1.0], 0, base.clone())
            .validate()
            .is_err());
        assert!(SweepSpec::new(SweepVariable::Mass, vec![-1.0], 1, base)
            .validate()
            .is_err());
    }

    #[test]
    fn rows_in_sweep_order_and_deterministic() {
        let spec = SweepSpec::new(SweepVariable::VmaxMean, vec![1.6, 1.2], 2, small_base());
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.rows.len(), 4);
        let order: Vec<(f64, u32)> = a.rows.iter().map(|r| (r.value, r.replication)).collect();
        assert_eq!(order, vec![(1.6, 0), (1.6, 1), (1.2, 0), (1.2, 1)]);
        assert!(a.fits.is_empty());
        let means = a.replicate_means();
        assert_eq!(means[0].0, 1.6);
        assert!(means[0].2 > means[1].2);
    }

    #[test]
    fn failures_do_not_stop_the_sweep() {
        let base = SimParams {
            n_pedestrians: 5,
            n_ways: 1,
            t_max: 60.0,
            ..SimParams::default()
        };
        // A one-by-one generator cannot hold 5000 pedestrians.
        let tight = SimParams {
            generator_depth: 1.0,
            trap: pedflow_core::atxy::TrapRect::new(0.0, 0.0, 1.0, 32.0).unwrap(),
            ..base
        };
        let spec = SweepSpec::new(SweepVariable::NPedestrians, vec![2.0, 5000.0], 1, tight);
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].value, 5000.0);
    }
}
