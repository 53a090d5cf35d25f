use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Streaming mean/variance accumulator for Monte Carlo samples (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Estimate {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one sample. Non-finite samples are rejected.
    pub fn push(&mut self, sample: f64) -> Result<()> {
        if !sample.is_finite() {
            return Err(Error::data(format!("non-finite sample {sample}")));
        }
        self.push_unchecked(sample);
        Ok(())
    }

    #[inline]
    pub(crate) fn push_unchecked(&mut self, sample: f64) {
        self.count += 1;
        let delta = sample - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (sample - self.mean);
    }

    /// Combines two accumulators as if all samples had been pushed into one (Chan et al.).
    pub fn merge(&self, other: &Estimate) -> Estimate {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let (na, nb, n) = (self.count as f64, other.count as f64, count as f64);
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + delta * delta * na * nb / n;
        Estimate { count, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sum of squared deviations from the mean.
    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Unbiased sample variance; zero with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean, `sqrt(m2 / (K (K - 1)))`; zero with fewer than two samples.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count as f64 * (self.count - 1) as f64)).sqrt()
        }
    }

    /// Normal-approximation 95% interval `mean ± 1.96 stderr`.
    pub fn ci95(&self) -> (f64, f64) {
        let half = 1.96 * self.stderr();
        (self.mean - half, self.mean + half)
    }
}

impl FromIterator<f64> for Estimate {
    /// Non-finite values are skipped.
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut e = Estimate::new();
        for x in iter {
            let _ = e.push(x);
        }
        e
    }
}
