//! Least-squares growth exponents. Floating point, report-only.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of `log(count)` from the fitted line.
    pub residual: f64,
}

/// Slope of `log(count)` against `log(n)`.
pub fn fit_exponent(pairs: &[(f64, f64)]) -> Result<Fit> {
    if pairs.iter().any(|&(n, c)| n <= 0.0 || c <= 0.0) {
        return Err(Error::InvalidArgument("sizes and counts must be positive".into()));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if pairs.len() < 2 || sxx == 0.0 {
        return Err(Error::InvalidArgument("need at least two distinct sizes".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(Fit {
        slope,
        intercept,
        residual: (sse / m).sqrt(),
    })
}

/// Convenience for integer series.
pub fn fit_counts(pairs: &[(usize, usize)]) -> Result<Fit> {
    let v: Vec<(f64, f64)> = pairs.iter().map(|&(n, c)| (n as f64, c as f64)).collect();
    fit_exponent(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_law() {
        let f = fit_exponent(&[(10.0, 100.0), (100.0, 10000.0)]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn odd_numbers_are_linear() {
        let pairs: Vec<_> = [16, 32, 64, 128, 256].iter().map(|&n| (n, 2 * n - 1)).collect();
        let f = fit_counts(&pairs).unwrap();
        assert!((0.95..=1.05).contains(&f.slope));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_exponent(&[(10.0, 5.0)]).is_err());
        assert!(fit_exponent(&[(10.0, 5.0), (10.0, 6.0)]).is_err());
        assert!(fit_exponent(&[(10.0, 0.0), (20.0, 6.0)]).is_err());
    }
}
