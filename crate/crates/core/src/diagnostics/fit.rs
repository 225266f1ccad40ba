use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln epsilon, ln T_c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub residual_norm: f64,
    pub n_points: usize,
}

/// Fits `ln T_c = intercept + slope * ln epsilon` by ordinary least squares.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    if let Some(&(e, t)) = points
        .iter()
        .find(|(e, t)| !(e.is_finite() && *e > 0.0 && t.is_finite() && *t > 0.0))
    {
        return Err(Error::domain(format!(
            "power-law fit needs positive finite points, got ({e}, {t})"
        )));
    }
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::domain(format!(
            "power-law fit needs at least 2 distinct epsilon values, got {}",
            distinct.len()
        )));
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|&(e, t)| (e.ln(), t.ln())).collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_norm = xy
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(FitResult {
        slope,
        intercept,
        residual_norm,
        n_points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_inverse_square() {
        let pts: Vec<_> = [0.05, 0.1, 0.2, 0.3].iter().map(|&e: &f64| (e, e.powi(-2))).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!(f.residual_norm < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
    }

    #[test]
    fn prefactor_is_intercept() {
        let pts: Vec<_> = [0.05, 0.15, 0.25].iter().map(|&e: &f64| (e, 7.0 * e.powi(-2))).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_power_law(&[(0.1, 100.0), (0.1, 120.0)]).is_err());
        assert!(fit_power_law(&[]).is_err());
        assert!(fit_power_law(&[(0.1, 100.0), (0.2, f64::NAN)]).is_err());
        assert!(fit_power_law(&[(0.1, 100.0), (0.2, 0.0)]).is_err());
    }
}
