use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_rate(x: &[f64], y: &[f64]) -> Result<RateFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!("{} x values, {} y values", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!("rate fit needs 3 points, got {}", x.len())));
    }
    if let Some(v) = x.iter().chain(y).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("log-log fit needs positive data, got {v}")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("x values are all equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(RateFit {
        x: x.to_vec(),
        y: y.to_vec(),
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_powers() {
        let f = fit_rate(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.slope, 1.0);
        assert!(f.residual < 1e-15);
        let x = [1.0, 0.25, 1.0 / 16.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.sqrt()).collect();
        assert!((fit_rate(&x, &y).unwrap().slope - 0.5).abs() < 1e-14);
    }

    #[test]
    fn noisy_square_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..12).map(|i| 0.5f64.powi(i)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 3.0 * v.sqrt() * (1.0 + 0.01 * rng.gen_range(-1.0..1.0)))
            .collect();
        let s = fit_rate(&x, &y).unwrap().slope;
        assert!((0.45..=0.55).contains(&s), "{s}");
    }

    #[test]
    fn bad_input() {
        assert!(fit_rate(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_rate(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]).is_err());
        assert!(fit_rate(&[1.0, 2.0, -3.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_rate(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
