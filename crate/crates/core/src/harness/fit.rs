use super::{Method, SweepRecord};
use crate::error::{JiveError, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// In `[0, 1]`; 1 for a perfect fit, including constant data.
    pub r_squared: f64,
}

/// Fits `ln(mean_error)` against `ln(axis_value)` over the usable records of
/// one method.
pub fn fit_loglog(records: &[SweepRecord], method: Method) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.method == method && r.usable())
        .map(|r| (r.axis_value, r.mean_error))
        .collect();
    if pts.len() < 3 {
        return Err(JiveError::InsufficientData {
            needed: 3,
            got: pts.len(),
        });
    }
    if let Some(&(x, y)) = pts.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(JiveError::NonpositiveError(if x > 0.0 { y } else { x }));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(JiveError::InsufficientData { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{Axis, CellStatus};
    use super::*;

    fn recs(f: impl Fn(f64) -> f64) -> Vec<SweepRecord> {
        [1.0, 4.0, 16.0, 64.0, 256.0]
            .iter()
            .map(|&x| SweepRecord {
                axis: Axis::N,
                axis_value: x,
                method: Method::Ajive,
                mean_error: f(x),
                std_error: 0.0,
                trials: 1,
                measured_theta_mean: 0.5,
                wall_ms: 0.0,
                status: CellStatus::Ok,
            })
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_loglog(&recs(|x| 3.0 * x.sqrt()), Method::Ajive).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let flat = fit_loglog(&recs(|_| 0.2), Method::Ajive).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.r_squared, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            fit_loglog(&recs(|x| x)[..2], Method::Ajive),
            Err(JiveError::InsufficientData { .. })
        ));
        assert!(matches!(
            fit_loglog(&recs(|x| x), Method::Stacked),
            Err(JiveError::InsufficientData { .. })
        ));
        assert!(matches!(
            fit_loglog(&recs(|x| x - 1.0), Method::Ajive),
            Err(JiveError::NonpositiveError(_))
        ));
    }
}
