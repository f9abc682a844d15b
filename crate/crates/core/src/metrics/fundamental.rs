use super::MetricsError;

/// Speed–density model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `u = m_f - psi * k`
    Linear,
    /// `u = a + b ln k`
    Logarithmic,
    /// `u = m_f exp(-k / k_c)`
    Exponential,
    /// `u = u_c ln(k_j / k)`
    Greenberg,
    /// `u = m_f exp(-(k / k_c)² / 2)`
    Bell,
}

impl FitModel {
    pub const ALL: [FitModel; 5] = [
        Self::Linear,
        Self::Logarithmic,
        Self::Exponential,
        Self::Greenberg,
        Self::Bell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Logarithmic => "logarithmic",
            Self::Exponential => "exponential",
            Self::Greenberg => "greenberg",
            Self::Bell => "bell",
        }
    }
}

impl std::str::FromStr for FitModel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown model `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalFit {
    pub model: FitModel,
    /// Natural parameters: linear `(m_f, psi)`, logarithmic `(a, b)`,
    /// exponential and bell `(m_f, k_c)`, greenberg `(u_c, k_j)`.
    pub coefficients: [f64; 2],
    /// Coefficient of determination on the untransformed `(k, u)` scale.
    pub r2: f64,
    /// Standard error of the regression slope in the transformed space.
    pub slope_std_error: f64,
    pub free_flow_speed: Option<f64>,
    pub jam_density: Option<f64>,
    pub capacity: Option<f64>,
}

impl FundamentalFit {
    pub fn predict(&self, k: f64) -> f64 {
        let [c0, c1] = self.coefficients;
        match self.model {
            FitModel::Linear => c0 - c1 * k,
            FitModel::Logarithmic => c0 + c1 * k.ln(),
            FitModel::Exponential => c0 * (-k / c1).exp(),
            FitModel::Greenberg => c0 * (c1 / k).ln(),
            FitModel::Bell => c0 * (-0.5 * (k / c1).powi(2)).exp(),
        }
    }
}

struct Ols {
    intercept: f64,
    slope: f64,
    slope_se: f64,
}

fn ols(x: &[f64], y: &[f64]) -> Result<Ols, MetricsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(MetricsError::Degenerate("regressor has zero variance".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let slope_se = if n > 2.0 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(Ols {
        intercept,
        slope,
        slope_se,
    })
}

/// Fits `model` to `(k, u)` points by least squares on the linearising
/// transform of each family.
pub fn fit_fundamental(points: &[(f64, f64)], model: FitModel) -> Result<FundamentalFit, MetricsError> {
    if points.len() < 3 {
        return Err(MetricsError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let ks: Vec<f64> = points.iter().map(|p| p.0).collect();
    let us: Vec<f64> = points.iter().map(|p| p.1).collect();
    let bad = |pred: &dyn Fn(&(f64, f64)) -> bool| -> Vec<usize> {
        points
            .iter()
            .enumerate()
            .filter(|(_, p)| !pred(p))
            .map(|(i, _)| i)
            .collect()
    };
    let needs_positive_k = matches!(model, FitModel::Logarithmic | FitModel::Greenberg);
    let needs_positive_u = matches!(model, FitModel::Exponential | FitModel::Bell);
    if needs_positive_k {
        let offending = bad(&|p| p.0 > 0.0);
        if !offending.is_empty() {
            return Err(MetricsError::NonPositive(offending));
        }
    }
    if needs_positive_u {
        let offending = bad(&|p| p.1 > 0.0);
        if !offending.is_empty() {
            return Err(MetricsError::NonPositive(offending));
        }
    }

    let mut fit = match model {
        FitModel::Linear => {
            let r = ols(&ks, &us)?;
            let (mf, psi) = (r.intercept, -r.slope);
            let (jam, cap) = if psi > 0.0 && mf > 0.0 {
                let kj = mf / psi;
                (Some(kj), Some(mf * kj / 4.0))
            } else {
                (None, None)
            };
            FundamentalFit {
                model,
                coefficients: [mf, psi],
                r2: 0.0,
                slope_std_error: r.slope_se,
                free_flow_speed: Some(mf),
                jam_density: jam,
                capacity: cap,
            }
        }
        FitModel::Logarithmic => {
            let lk: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
            let r = ols(&lk, &us)?;
            FundamentalFit {
                model,
                coefficients: [r.intercept, r.slope],
                r2: 0.0,
                slope_std_error: r.slope_se,
                free_flow_speed: None,
                jam_density: None,
                capacity: None,
            }
        }
        FitModel::Greenberg => {
            let lk: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
            let r = ols(&lk, &us)?;
            let uc = -r.slope;
            if uc == 0.0 {
                return Err(MetricsError::Degenerate("flat speed–log-density relation".into()));
            }
            let kj = (r.intercept / uc).exp();
            FundamentalFit {
                model,
                coefficients: [uc, kj],
                r2: 0.0,
                slope_std_error: r.slope_se,
                free_flow_speed: None,
                jam_density: Some(kj),
                capacity: None,
            }
        }
        FitModel::Exponential => {
            let lu: Vec<f64> = us.iter().map(|u| u.ln()).collect();
            let r = ols(&ks, &lu)?;
            if r.slope >= 0.0 {
                return Err(MetricsError::Degenerate("speed does not decay with density".into()));
            }
            let mf = r.intercept.exp();
            let kc = -1.0 / r.slope;
            FundamentalFit {
                model,
                coefficients: [mf, kc],
                r2: 0.0,
                slope_std_error: r.slope_se,
                free_flow_speed: Some(mf),
                jam_density: None,
                capacity: None,
            }
        }
        FitModel::Bell => {
            let k2: Vec<f64> = ks.iter().map(|k| k * k).collect();
            let lu: Vec<f64> = us.iter().map(|u| u.ln()).collect();
            let r = ols(&k2, &lu)?;
            if r.slope >= 0.0 {
                return Err(MetricsError::Degenerate("speed does not decay with density".into()));
            }
            let mf = r.intercept.exp();
            let kc = (-0.5 / r.slope).sqrt();
            FundamentalFit {
                model,
                coefficients: [mf, kc],
                r2: 0.0,
                slope_std_error: r.slope_se,
                free_flow_speed: Some(mf),
                jam_density: None,
                capacity: None,
            }
        }
    };

    let mean_u = us.iter().sum::<f64>() / us.len() as f64;
    let sst: f64 = us.iter().map(|u| (u - mean_u).powi(2)).sum();
    let sse: f64 = points.iter().map(|(k, u)| (u - fit.predict(*k)).powi(2)).sum();
    fit.r2 = if sst > 0.0 {
        1.0 - sse / sst
    } else if sse <= f64::EPSILON {
        1.0
    } else {
        0.0
    };
    Ok(fit)
}

/// `y = c * x^p` by least squares in log–log space: returns `(c, p, r2)`
/// with r² on the original scale.
pub fn fit_power(points: &[(f64, f64)]) -> Result<(f64, f64, f64), MetricsError> {
    if points.len() < 3 {
        return Err(MetricsError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let offending: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| !(p.0 > 0.0 && p.1 > 0.0))
        .map(|(i, _)| i)
        .collect();
    if !offending.is_empty() {
        return Err(MetricsError::NonPositive(offending));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let r = ols(&lx, &ly)?;
    let c = r.intercept.exp();
    let p = r.slope;
    let mean = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let sst: f64 = points.iter().map(|q| (q.1 - mean).powi(2)).sum();
    let sse: f64 = points.iter().map(|q| (q.1 - c * q.0.powf(p)).powi(2)).sum();
    let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    Ok((c, p, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    use rand_pcg::Pcg64;

    fn line(mf: f64, kj: f64) -> Vec<(f64, f64)> {
        (0..8)
            .map(|i| {
                let k = 0.3 * i as f64;
                (k, mf * (1.0 - k / kj))
            })
            .collect()
    }

    #[test]
    fn linear_fruin_row() {
        let f = fit_fundamental(&line(81.4, 3.99), FitModel::Linear).unwrap();
        assert!((f.free_flow_speed.unwrap() - 81.4).abs() < 1e-9);
        assert!((f.jam_density.unwrap() - 3.99).abs() < 1e-9);
        assert!((f.capacity.unwrap() - 81.20).abs() < 0.2);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_exact_slope_line() {
        let pts: Vec<_> = (1..6).map(|i| (i as f64 * 0.5, 81.4 - 20.4 * i as f64 * 0.5)).collect();
        let f = fit_fundamental(&pts, FitModel::Linear).unwrap();
        assert!((f.coefficients[1] - 20.4).abs() < 1e-9);
        assert!((f.jam_density.unwrap() - 3.99).abs() < 0.01);
        assert!((f.capacity.unwrap() - 81.2).abs() < 0.2);
        let g = fit_fundamental(
            &(1..6)
                .map(|i| (i as f64 * 0.4, 97.6 - 36.2 * i as f64 * 0.4))
                .collect::<Vec<_>>(),
            FitModel::Linear,
        )
        .unwrap();
        assert!((g.capacity.unwrap() - 65.79).abs() <= 0.15);
    }

    #[test]
    fn capacity_identity() {
        let f = fit_fundamental(&[(0.1, 1.4), (0.5, 1.2), (0.9, 1.1), (1.2, 0.8)], FitModel::Linear).unwrap();
        assert_eq!(
            f.capacity.unwrap(),
            f.free_flow_speed.unwrap() * f.jam_density.unwrap() / 4.0
        );
    }

    #[test]
    fn noisy_line_within_three_standard_errors() {
        let mut rng = Pcg64::seed_from_u64(17);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let pts: Vec<_> = (0..40)
            .map(|i| {
                let k = 0.05 * i as f64;
                (k, 5.0 - 2.0 * k + noise.sample(&mut rng))
            })
            .collect();
        let f = fit_fundamental(&pts, FitModel::Linear).unwrap();
        assert!((f.coefficients[1] - 2.0).abs() <= 3.0 * f.slope_std_error);
    }

    #[test]
    fn nonlinear_families_recover_generators() {
        let ks: Vec<f64> = (1..10).map(|i| 0.2 * i as f64).collect();
        let exp_pts: Vec<_> = ks.iter().map(|&k| (k, 1.5 * (-k / 1.2).exp())).collect();
        let f = fit_fundamental(&exp_pts, FitModel::Exponential).unwrap();
        assert!((f.coefficients[0] - 1.5).abs() < 1e-9 && (f.coefficients[1] - 1.2).abs() < 1e-9);

        let bell_pts: Vec<_> = ks
            .iter()
            .map(|&k| (k, 1.4 * (-0.5 * (k / 0.9).powi(2)).exp()))
            .collect();
        let f = fit_fundamental(&bell_pts, FitModel::Bell).unwrap();
        assert!((f.coefficients[0] - 1.4).abs() < 1e-9 && (f.coefficients[1] - 0.9).abs() < 1e-9);

        let gb_pts: Vec<_> = ks.iter().map(|&k| (k, 0.6 * (4.0 / k).ln())).collect();
        let f = fit_fundamental(&gb_pts, FitModel::Greenberg).unwrap();
        assert!((f.coefficients[0] - 0.6).abs() < 1e-9 && (f.coefficients[1] - 4.0).abs() < 1e-9);
        assert!((f.r2 - 1.0).abs() < 1e-12);

        let log_pts: Vec<_> = ks.iter().map(|&k| (k, 1.0 - 0.3 * k.ln())).collect();
        let f = fit_fundamental(&log_pts, FitModel::Logarithmic).unwrap();
        assert!((f.coefficients[1] + 0.3).abs() < 1e-12);
    }

    #[test]
    fn log_transforms_reject_non_positive() {
        let pts = [(0.0, 1.0), (0.5, 1.0), (1.0, 0.5)];
        assert_eq!(
            fit_fundamental(&pts, FitModel::Greenberg),
            Err(MetricsError::NonPositive(vec![0]))
        );
        let pts = [(0.1, 1.0), (0.5, -0.2), (1.0, 0.0)];
        assert_eq!(
            fit_fundamental(&pts, FitModel::Exponential),
            Err(MetricsError::NonPositive(vec![1, 2]))
        );
        assert!(matches!(
            fit_fundamental(&pts[..2], FitModel::Linear),
            Err(MetricsError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn power_law_recovered() {
        let pts: Vec<_> = (1..8).map(|i| (i as f64, 1.5 * (i as f64).powf(0.8))).collect();
        let (c, p, r2) = fit_power(&pts).unwrap();
        assert!((c - 1.5).abs() < 1e-9 && (p - 0.8).abs() < 1e-9 && (r2 - 1.0).abs() < 1e-12);
    }
}
