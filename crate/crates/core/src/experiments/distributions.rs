//! Samplers for the distributions used by the synthetic experiments.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard normal draw by Box–Muller (one of the pair is discarded).
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Gamma draw with scale 1 (Marsaglia–Tsang).
fn standard_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u = 1.0 - rng.gen::<f64>();
        return standard_gamma(shape + 1.0, rng) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = standard_normal(rng);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = 1.0 - rng.gen::<f64>();
        if u < 1.0 - 0.0331 * x.powi(4) || u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// A univariate distribution. `Normal` takes a variance, `Gamma` a shape and a scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Distribution {
    Normal { mean: f64, variance: f64 },
    Gamma { shape: f64, scale: f64 },
    Beta { alpha: f64, beta: f64 },
    Uniform { low: f64, high: f64 },
}

impl Distribution {
    pub fn normal(mean: f64, variance: f64) -> Result<Self> {
        if !(mean.is_finite() && variance.is_finite() && variance >= 0.0) {
            return Err(Error::contract(format!(
                "normal needs a finite mean and nonnegative variance, got ({mean}, {variance})"
            )));
        }
        Ok(Distribution::Normal { mean, variance })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite() && scale >= 0.0 && scale.is_finite()) {
            return Err(Error::contract(format!(
                "gamma needs shape > 0 and scale >= 0, got ({shape}, {scale})"
            )));
        }
        Ok(Distribution::Gamma { shape, scale })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::contract(format!(
                "beta needs positive shapes, got ({alpha}, {beta})"
            )));
        }
        Ok(Distribution::Beta { alpha, beta })
    }

    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        if !(low < high && low.is_finite() && high.is_finite()) {
            return Err(Error::contract(format!(
                "uniform needs low < high, got ({low}, {high})"
            )));
        }
        Ok(Distribution::Uniform { low, high })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Normal { mean, .. } => mean,
            Distribution::Gamma { shape, scale } => shape * scale,
            Distribution::Beta { alpha, beta } => alpha / (alpha + beta),
            Distribution::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Distribution::Normal { variance, .. } => variance,
            Distribution::Gamma { shape, scale } => shape * scale * scale,
            Distribution::Beta { alpha, beta } => {
                let s = alpha + beta;
                alpha * beta / (s * s * (s + 1.0))
            }
            Distribution::Uniform { low, high } => (high - low).powi(2) / 12.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Normal { mean, variance } => {
                mean + variance.sqrt() * standard_normal(rng)
            }
            Distribution::Gamma { shape, scale } => scale * standard_gamma(shape, rng),
            Distribution::Beta { alpha, beta } => {
                let a = standard_gamma(alpha, rng);
                let b = standard_gamma(beta, rng);
                a / (a + b)
            }
            Distribution::Uniform { low, high } => low + (high - low) * rng.gen::<f64>(),
        }
    }
}

pub fn sample_distribution<R: Rng + ?Sized>(dist: &Distribution, rng: &mut R) -> f64 {
    dist.sample(rng)
}

/// Multivariate normal sampled through the Cholesky factor of its covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct MultivariateNormal {
    mean: Vec<f64>,
    /// Lower-triangular factor, row-major.
    chol: Vec<f64>,
}

impl MultivariateNormal {
    /// `cov` is row-major `d × d`.
    pub fn new(mean: Vec<f64>, cov: &[f64]) -> Result<Self> {
        let d = mean.len();
        if cov.len() != d * d {
            return Err(Error::contract(format!(
                "covariance has {} entries, expected {}",
                cov.len(),
                d * d
            )));
        }
        for r in 0..d {
            for c in 0..r {
                if (cov[r * d + c] - cov[c * d + r]).abs() > 1e-12 * (1.0 + cov[r * d + c].abs()) {
                    return Err(Error::contract("covariance is not symmetric"));
                }
            }
        }
        let mut l = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..=r {
                let dot: f64 = (0..c).map(|k| l[r * d + k] * l[c * d + k]).sum();
                let v = cov[r * d + c] - dot;
                if r == c {
                    if v.is_nan() || v <= 0.0 {
                        return Err(Error::contract("covariance is not positive definite"));
                    }
                    l[r * d + c] = v.sqrt();
                } else {
                    l[r * d + c] = v / l[c * d + c];
                }
            }
        }
        Ok(MultivariateNormal { mean, chol: l })
    }

    /// Equal variances on the diagonal and a common covariance elsewhere.
    pub fn exchangeable(d: usize, mean: f64, variance: f64, covariance: f64) -> Result<Self> {
        let cov: Vec<f64> = (0..d * d)
            .map(|k| if k / d == k % d { variance } else { covariance })
            .collect();
        Self::new(vec![mean; d], &cov)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let d = self.dim();
        let z: Vec<f64> = (0..d).map(|_| standard_normal(rng)).collect();
        for (r, o) in out.iter_mut().enumerate().take(d) {
            *o = self.mean[r] + (0..=r).map(|k| self.chol[r * d + k] * z[k]).sum::<f64>();
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.sample_into(rng, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{stream_rng, StreamId, StreamKind};

    fn rng() -> rand_chacha::ChaCha8Rng {
        stream_rng(3, StreamId::new(StreamKind::DataGeneration, 99, 0))
    }

    fn moments(dist: Distribution, draws: usize) -> (f64, f64) {
        let mut r = rng();
        let xs: Vec<f64> = (0..draws).map(|_| dist.sample(&mut r)).collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        (mean, var)
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Distribution::gamma(0.0, 1.0).is_err());
        assert!(Distribution::beta(2.0, -1.0).is_err());
        assert!(Distribution::uniform(1.0, 1.0).is_err());
        assert!(Distribution::normal(0.0, -1.0).is_err());
        assert!(MultivariateNormal::new(vec![0.0; 2], &[1.0, 2.0, 2.0, 1.0]).is_err());
        assert!(MultivariateNormal::new(vec![0.0; 2], &[1.0, 0.5, 0.4, 1.0]).is_err());
    }

    #[test]
    fn small_shape_gamma() {
        let (mean, _) = moments(Distribution::gamma(0.5, 2.0).unwrap(), 200_000);
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn cholesky_reproduces_covariance() {
        let mvn = MultivariateNormal::new(vec![1.0, -1.0], &[4.0, 1.0, 1.0, 2.0]).unwrap();
        let l = &mvn.chol;
        assert!((l[0] - 2.0).abs() < 1e-15);
        assert!((l[2] - 0.5).abs() < 1e-15);
        assert!((l[2] * l[2] + l[3] * l[3] - 2.0).abs() < 1e-15);
        assert_eq!(l[1], 0.0);
    }

    #[test]
    fn normal_variance_parameter() {
        let (mean, var) = moments(Distribution::normal(5.0, 3.0).unwrap(), 200_000);
        assert!((mean - 5.0).abs() < 0.02);
        assert!((var - 3.0).abs() < 0.05);
    }
}
