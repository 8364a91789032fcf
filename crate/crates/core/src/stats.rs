//! Streaming moments and the estimator summary record.

use crate::error::{CovError, Result};

/// Welford accumulator for mean and centred second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise merge.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let n = n1 + n2;
        let delta = other.mean - self.mean;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 { f64::NAN } else { self.m2 / (self.count - 1) as f64 }
    }

    pub fn output(&self) -> Result<EstimatorOutput> {
        if self.count < 2 {
            return Err(CovError::InvalidParameter(format!("need at least 2 samples, got {}", self.count)));
        }
        let sd = self.variance().max(0.0).sqrt();
        Ok(EstimatorOutput {
            estimate: self.mean,
            sd,
            se: sd / (self.count as f64).sqrt(),
            n: self.count,
            relative_error: None,
        })
    }
}

/// Monte Carlo estimate with its spread. `relative_error` is `se / |reference|` once a reference is attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOutput {
    pub estimate: f64,
    pub sd: f64,
    pub se: f64,
    pub n: u64,
    pub relative_error: Option<f64>,
}

impl EstimatorOutput {
    pub fn with_reference(mut self, reference: f64) -> Self {
        self.relative_error = Some(self.se / reference.abs());
        self
    }

    /// Absolute deviation from `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.estimate - target).abs() / self.se
    }
}

/// Mean, standard deviation and standard error of a stream of per-sample values.
pub fn estimate_mean<I: IntoIterator<Item = f64>>(values: I) -> Result<EstimatorOutput> {
    let mut m = Moments::default();
    for (i, v) in values.into_iter().enumerate() {
        if !v.is_finite() {
            return Err(CovError::PoisonedSample { index: i as u64 });
        }
        m.push(v);
    }
    m.output()
}
