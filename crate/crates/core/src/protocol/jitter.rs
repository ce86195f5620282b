//! Monte Carlo propagation of interaction-time jitter through the generation
//! pipeline.
//!
//! Each sample draws independent relative errors `ε₁, ε₂ ~ Normal(0, σ)`
//! and runs the generation with `gT₁(1+ε₁)`, `gT₂(1+ε₂)`. Sample `i` uses
//! its own ChaCha stream `(seed, i)`, so the result does not depend on how
//! the samples are scheduled across threads.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generation::{run_generation_at, GenerationConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorModel {
    /// Standard deviation of `ΔT/T`.
    pub rel_timing_jitter: f64,
    /// Probability that the second atom is detected at all.
    pub detector_efficiency: f64,
    pub samples: usize,
    pub seed: u64,
    /// Also jitter the first atom's interaction time.
    pub jitter_t1: bool,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self {
            rel_timing_jitter: 1e-2,
            detector_efficiency: 1.0,
            samples: 10_000,
            seed: 0,
            jitter_t1: true,
        }
    }
}

impl ErrorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_timing_jitter.is_finite() && self.rel_timing_jitter >= 0.0) {
            return Err(Error::domain("rel_timing_jitter must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.detector_efficiency) {
            return Err(Error::domain("detector_efficiency must lie in [0, 1]"));
        }
        if self.samples == 0 {
            return Err(Error::domain("at least one sample is required"));
        }
        Ok(())
    }
}

/// One Monte Carlo draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterSample {
    pub sample: usize,
    pub eps_t1: f64,
    pub eps_t2: f64,
    pub fidelity: f64,
    pub p2: f64,
    pub detected: bool,
    /// `1 − sin(√2 gT₂)` at the perturbed time.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

/// Statistics over detected samples. With no detected samples every
/// statistic is NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterReport {
    pub mean_fidelity: f64,
    pub std_fidelity: f64,
    pub mean_infidelity: f64,
    pub mean_p2: f64,
    pub std_p2: f64,
    pub fidelity_quantiles: Quantiles,
    /// Mean of the per-sample `1 − sin(√2 gT₂)`.
    pub mean_delta: f64,
    /// Root mean square of the per-sample `1 − sin(√2 gT₂)`.
    pub rms_delta: f64,
    pub samples_used: usize,
    pub samples_drawn: usize,
}

fn draw(config: &GenerationConfig, model: &ErrorModel, normal: &Normal<f64>, index: usize) -> Result<JitterSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(index as u64);
    let eps1 = normal.sample(&mut rng);
    let eps2 = normal.sample(&mut rng);
    let detected = rng.random::<f64>() < model.detector_efficiency;
    let eps_t1 = if model.jitter_t1 { eps1 } else { 0.0 };

    let gt2 = config.gt2() * (1.0 + eps2);
    let report = run_generation_at(config, config.gt1() * (1.0 + eps_t1), gt2)?;
    Ok(JitterSample {
        sample: index,
        eps_t1,
        eps_t2: eps2,
        fidelity: report.fidelity_to_target,
        p2: report.p2,
        detected,
        delta: 1.0 - (SQRT_2 * gt2).sin(),
    })
}

/// All samples, ordered by index.
pub fn monte_carlo_samples(config: &GenerationConfig, model: &ErrorModel) -> Result<Vec<JitterSample>> {
    config.validate()?;
    model.validate()?;
    let normal = Normal::new(0.0, model.rel_timing_jitter)
        .map_err(|e| Error::domain(format!("jitter distribution: {e}")))?;
    (0..model.samples)
        .into_par_iter()
        .map(|i| draw(config, model, &normal, i))
        .collect()
}

/// Running mean and variance; exact for constant input.
#[derive(Default)]
struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    fn std(&self) -> f64 {
        match self.count {
            0 => f64::NAN,
            1 => 0.0,
            n => (self.m2 / (n - 1) as f64).sqrt(),
        }
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Reduces samples in index order.
pub fn summarize(samples: &[JitterSample]) -> JitterReport {
    let mut fid = Welford::default();
    let mut infid = Welford::default();
    let mut p2 = Welford::default();
    let mut delta = Welford::default();
    let mut delta_sq = Welford::default();
    let mut sorted = Vec::with_capacity(samples.len());
    for s in samples.iter().filter(|s| s.detected) {
        fid.push(s.fidelity);
        infid.push(1.0 - s.fidelity);
        p2.push(s.p2);
        delta.push(s.delta);
        delta_sq.push(s.delta * s.delta);
        sorted.push(s.fidelity);
    }
    sorted.sort_by(f64::total_cmp);
    JitterReport {
        mean_fidelity: fid.mean(),
        std_fidelity: fid.std(),
        mean_infidelity: infid.mean(),
        mean_p2: p2.mean(),
        std_p2: p2.std(),
        fidelity_quantiles: Quantiles {
            q05: quantile(&sorted, 0.05),
            q25: quantile(&sorted, 0.25),
            q50: quantile(&sorted, 0.5),
            q75: quantile(&sorted, 0.75),
            q95: quantile(&sorted, 0.95),
        },
        mean_delta: delta.mean(),
        rms_delta: delta_sq.mean().sqrt(),
        samples_used: fid.count,
        samples_drawn: samples.len(),
    }
}

pub fn monte_carlo_jitter(config: &GenerationConfig, model: &ErrorModel) -> Result<JitterReport> {
    Ok(summarize(&monte_carlo_samples(config, model)?))
}
