//! Least-squares fits for the scaling analysis: plain linear regression plus
//! power-law and exponential models on log-transformed data.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FitError {
    #[error("need at least {needed} points, have {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("log-space fit requires strictly positive values")]
    NonPositiveData,
    #[error("x values are all identical; slope is undefined")]
    DegenerateX,
}

/// Ordinary least squares y = slope * x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T: Real> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

/// Fits y = slope * x + intercept by least squares. Needs two points and
/// non-degenerate x. A perfectly flat exact fit reports r^2 = 1.
pub fn linear_regression<T: Real>(xs: &[T], ys: &[T]) -> Result<LinearFit<T>, FitError> {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let n = xs.len();
    if n < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: n });
    }
    let count = T::from_f64_lossy(n as f64);
    let mean_x = xs.iter().copied().sum::<T>() / count;
    let mean_y = ys.iter().copied().sum::<T>() / count;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() {
        return Err(FitError::DegenerateX);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = syy - slope * sxy;
    let r_squared = if syy == T::zero() {
        T::one() // constant data fitted exactly
    } else {
        (T::one() - ss_res / syy).max(T::zero())
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Scaling model for time-versus-size data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingModel {
    /// t = exp(intercept) * n^slope; fitted on (ln n, ln t).
    PowerLaw,
    /// t = exp(intercept) * exp(slope * n); fitted on (n, ln t).
    Exponential,
}

impl fmt::Display for ScalingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalingModel::PowerLaw => "power_law",
            ScalingModel::Exponential => "exponential",
        })
    }
}

impl FromStr for ScalingModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "power_law" => Ok(ScalingModel::PowerLaw),
            "exponential" => Ok(ScalingModel::Exponential),
            other => Err(format!("unknown scaling model `{other}`")),
        }
    }
}

/// A fitted scaling law over aggregated (size, time) points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit<T: Real> {
    pub model: ScalingModel,
    /// Power-law exponent or exponential rate.
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub n_points: usize,
}

/// Fits one scaling model to (n, t) points; needs at least 3 points with
/// strictly positive coordinates.
pub fn fit_scaling_points<T: Real>(
    points: &[(T, T)],
    model: ScalingModel,
) -> Result<ScalingFit<T>, FitError> {
    if points.len() < 3 {
        return Err(FitError::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|&(n, t)| n <= T::zero() || t <= T::zero()) {
        return Err(FitError::NonPositiveData);
    }
    let xs: Vec<T> = points
        .iter()
        .map(|&(n, _)| match model {
            ScalingModel::PowerLaw => n.ln(),
            ScalingModel::Exponential => n,
        })
        .collect();
    let ys: Vec<T> = points.iter().map(|&(_, t)| t.ln()).collect();
    let fit = linear_regression(&xs, &ys)?;
    Ok(ScalingFit {
        model,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        n_points: points.len(),
    })
}

/// Fits both models and returns (power-law, exponential, better-by-r^2).
pub fn classify_scaling<T: Real>(
    points: &[(T, T)],
) -> Result<(ScalingFit<T>, ScalingFit<T>, ScalingModel), FitError> {
    let power = fit_scaling_points(points, ScalingModel::PowerLaw)?;
    let expo = fit_scaling_points(points, ScalingModel::Exponential)?;
    let better = if power.r_squared >= expo.r_squared {
        ScalingModel::PowerLaw
    } else {
        ScalingModel::Exponential
    };
    Ok((power, expo, better))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_time_gives_unit_exponent() {
        let points: Vec<(f64, f64)> = [250.0, 500.0, 1000.0, 2000.0]
            .iter()
            .map(|&n| (n, 2.0 * n))
            .collect();
        let fit = fit_scaling_points(&points, ScalingModel::PowerLaw).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.intercept - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exact_exponential_recovers_rate() {
        let points: Vec<(f64, f64)> = [250.0f64, 500.0, 1000.0, 2000.0, 4000.0]
            .iter()
            .map(|&n| (n, 0.01 * (0.005 * n).exp()))
            .collect();
        let fit = fit_scaling_points(&points, ScalingModel::Exponential).unwrap();
        assert!((fit.slope - 0.005).abs() < 1e-6 * 0.005);
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
        // The wrong model must fit strictly worse.
        let (power, expo, better) = classify_scaling(&points).unwrap();
        assert!(power.r_squared < expo.r_squared);
        assert_eq!(better, ScalingModel::Exponential);
    }

    #[test]
    fn constant_times_give_zero_slope() {
        let points: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&n| (n, 3.0)).collect();
        let fit = fit_scaling_points(&points, ScalingModel::PowerLaw).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn insufficient_and_invalid_data_are_rejected() {
        let two: Vec<(f64, f64)> = vec![(1.0, 1.0), (2.0, 2.0)];
        assert_eq!(
            fit_scaling_points(&two, ScalingModel::PowerLaw),
            Err(FitError::InsufficientData { needed: 3, got: 2 })
        );
        let with_zero: Vec<(f64, f64)> = vec![(1.0, 1.0), (2.0, 0.0), (3.0, 2.0)];
        assert_eq!(
            fit_scaling_points(&with_zero, ScalingModel::PowerLaw),
            Err(FitError::NonPositiveData)
        );
        assert_eq!(
            linear_regression(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(FitError::DegenerateX)
        );
    }

    #[test]
    fn power_law_recovery_is_tight() {
        // n^1.37 scaled: relative error under 1e-6 on exact data.
        let points: Vec<(f64, f64)> = [100.0f64, 300.0, 900.0, 2700.0]
            .iter()
            .map(|&n| (n, 0.37 * n.powf(1.37)))
            .collect();
        let fit = fit_scaling_points(&points, ScalingModel::PowerLaw).unwrap();
        assert!((fit.slope - 1.37).abs() / 1.37 < 1e-6);
    }

    #[test]
    fn generic_over_f32() {
        let points: Vec<(f32, f32)> = vec![(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)];
        let fit = fit_scaling_points(&points, ScalingModel::PowerLaw).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-5);
    }
}
