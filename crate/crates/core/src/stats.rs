//! Pearson chi-square goodness of fit.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// Tests observed category counts against expected probabilities.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != probabilities.len() {
        return Err(Error::domain("observed and expected have different lengths"));
    }
    if observed.len() < 2 {
        return Err(Error::domain("chi-square needs at least two categories"));
    }
    if probabilities.iter().any(|&p| p.is_nan() || p <= 0.0) {
        return Err(Error::domain("expected probabilities must be positive"));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(Error::domain("no observations"));
    }
    let n = n as f64;
    let statistic = observed
        .iter()
        .zip(probabilities)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum::<f64>();
    let dof = observed.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::domain(e.to_string()))?;
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

/// Upper critical value of the chi-square distribution at `significance`.
pub fn chi_square_critical(dof: u64, significance: f64) -> Result<f64> {
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::domain(e.to_string()))?;
    Ok(dist.inverse_cdf(1.0 - significance))
}
