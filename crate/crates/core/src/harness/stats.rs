//! Estimates with `k`-sigma bands.

use serde::{Deserialize, Serialize};

/// Width of every acceptance band, in standard errors.
pub const SIGMAS: f64 = 4.0;

/// A binomial proportion `hits / trials`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        Proportion { hits, trials }
    }

    pub fn estimate(&self) -> f64 {
        self.hits as f64 / self.trials.max(1) as f64
    }

    /// Binomial standard error at success probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials.max(1) as f64).sqrt()
    }

    /// `|hat p - p| <= k sigma(p)`.
    pub fn consistent_with(&self, p: f64, k: f64) -> bool {
        (self.estimate() - p).abs() <= k * self.sigma_at(p)
    }

    /// `lo - k sigma <= hat p <= hi + k sigma`, with sigma taken at the
    /// nearer end of the band.
    pub fn within_band(&self, lo: f64, hi: f64, k: f64) -> bool {
        let x = self.estimate();
        x >= lo - k * self.sigma_at(lo) && x <= hi + k * self.sigma_at(hi)
    }
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        if self.count == 0 {
            self.min = x;
            self.max = x;
        } else {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn from_values<I: IntoIterator<Item = f64>>(xs: I) -> Self {
        let mut m = Moments::default();
        for x in xs {
            m.push(x);
        }
        m
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count.max(1) as f64).sqrt()
    }
}

/// Aggregate of one metric over the trials of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    pub lo: f64,
    pub hi: f64,
    pub min: f64,
    pub max: f64,
}

impl MetricSummary {
    pub fn from_values<I: IntoIterator<Item = f64>>(metric: &str, xs: I) -> Self {
        let m = Moments::from_values(xs);
        let se = m.std_error();
        MetricSummary {
            metric: metric.to_string(),
            trials: m.count,
            mean: m.mean,
            std_error: se,
            lo: m.mean - SIGMAS * se,
            hi: m.mean + SIGMAS * se,
            min: m.min,
            max: m.max,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_bands() {
        let p = Proportion::new(5_000, 10_000);
        assert_eq!(p.estimate(), 0.5);
        assert!((p.sigma_at(0.5) - 0.005).abs() < 1e-15);
        assert!(p.consistent_with(0.51, 4.0));
        assert!(!p.consistent_with(0.53, 4.0));
        assert!(p.within_band(0.2, 0.49, 4.0));
        assert!(!p.within_band(0.6, 0.7, 4.0));
    }

    #[test]
    fn moments_match_direct_formulas() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let m = Moments::from_values(xs);
        let mean = 3.5;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 3.0;
        assert!((m.mean - mean).abs() < 1e-15);
        assert!((m.variance() - var).abs() < 1e-12);
        assert_eq!((m.min, m.max), (1.0, 7.0));
        let s = MetricSummary::from_values("x", xs);
        assert!((s.hi - s.lo - 8.0 * (var / 4.0).sqrt()).abs() < 1e-12);
    }
}
