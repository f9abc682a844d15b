use statrs::distribution::{ContinuousCDF, StudentsT};

use super::MetricsError;

/// Mean, unbiased variance and size of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub mean: f64,
    pub var: f64,
    pub n: usize,
}

impl SampleSummary {
    pub fn new(mean: f64, var: f64, n: usize) -> Self {
        Self { mean, var, n }
    }

    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self { mean, var, n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p_two_tail: f64,
    pub p_one_tail: f64,
}

/// Two-sample t-test assuming unequal variances, with Welch–Satterthwaite
/// degrees of freedom.
pub fn welch_t_test(a: SampleSummary, b: SampleSummary) -> Result<WelchResult, MetricsError> {
    if a.n < 2 || b.n < 2 {
        return Err(MetricsError::DegenerateSample(format!(
            "need n >= 2 in each sample, got {} and {}",
            a.n, b.n
        )));
    }
    if !(a.var >= 0.0 && b.var >= 0.0) {
        return Err(MetricsError::DegenerateSample("negative variance".into()));
    }
    let sa = a.var / a.n as f64;
    let sb = b.var / b.n as f64;
    let se2 = sa + sb;
    if se2 <= 0.0 {
        return Err(MetricsError::DegenerateSample("zero pooled variance".into()));
    }
    let t = (a.mean - b.mean) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.n - 1) as f64 + sb * sb / (b.n - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| MetricsError::DegenerateSample(e.to_string()))?;
    let p_one_tail = dist.cdf(-t.abs());
    Ok(WelchResult {
        t,
        df,
        p_two_tail: (2.0 * p_one_tail).min(1.0),
        p_one_tail,
    })
}
