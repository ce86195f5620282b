use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest timing index reachable with `gT ≤ 10²`.
pub const M2_MAX: u32 = 16;

/// Probe interaction angle `gT_P = 41π/4` (the `m₂ = 5` optimum).
pub const PROBE_GT: f64 = 41.0 * PI / 4.0;

/// One row of the interaction-time scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingResult {
    pub m2: u32,
    /// `gT₂ = π/4 + 2m₂π`.
    pub gt2: f64,
    /// `sin(√2 gT₂)`.
    pub sin_second: f64,
    /// `δ = 1 − sin(√2 gT₂)`.
    pub delta: f64,
    /// `|1 − sin(gT₂ + π/4)|`.
    pub residual_first: f64,
}

/// `gT₂ = (8m₂ + 1)π/4`, which satisfies `sin(gT₂ + π/4) = 1`.
pub fn gt2_for(m2: u32) -> f64 {
    f64::from(8 * m2 + 1) * PI / 4.0
}

fn row(m2: u32) -> TimingResult {
    let gt2 = gt2_for(m2);
    let sin_second = (SQRT_2 * gt2).sin();
    TimingResult {
        m2,
        gt2,
        sin_second,
        delta: 1.0 - sin_second,
        residual_first: (1.0 - (gt2 + PI / 4.0).sin()).abs(),
    }
}

fn check_range(m2_min: u32, m2_max: u32) -> Result<()> {
    if m2_min > m2_max {
        return Err(Error::domain(format!("empty m2 range [{m2_min}, {m2_max}]")));
    }
    if m2_max > M2_MAX {
        return Err(Error::domain(format!(
            "m2 = {m2_max} is outside the admissible window [0, {M2_MAX}]"
        )));
    }
    Ok(())
}

/// Every row of the scan over `m₂ ∈ [m2_min, m2_max]`.
pub fn timing_table(m2_min: u32, m2_max: u32) -> Result<Vec<TimingResult>> {
    check_range(m2_min, m2_max)?;
    Ok((m2_min..=m2_max).map(row).collect())
}

/// The `m₂` maximizing `sin(√2 gT₂)`; ties go to the smaller `m₂`.
pub fn optimize_t2(m2_min: u32, m2_max: u32) -> Result<TimingResult> {
    let table = timing_table(m2_min, m2_max)?;
    let mut best = table[0];
    for r in &table[1..] {
        if r.sin_second > best.sin_second {
            best = *r;
        }
    }
    Ok(best)
}

/// Timing indices whose `gT₂` falls inside `[gt_min, gt_max]`.
pub fn m2_range_for_gt(gt_min: f64, gt_max: f64) -> Result<(u32, u32)> {
    if !(gt_min.is_finite() && gt_max.is_finite()) || gt_min > gt_max {
        return Err(Error::domain(format!("invalid gT window [{gt_min}, {gt_max}]")));
    }
    let lo = ((gt_min - PI / 4.0) / (2.0 * PI)).ceil().max(0.0);
    let hi = ((gt_max - PI / 4.0) / (2.0 * PI)).floor().min(f64::from(M2_MAX));
    if hi < lo {
        return Err(Error::domain(format!(
            "no m2 with gT2 inside [{gt_min}, {gt_max}]"
        )));
    }
    Ok((lo as u32, hi as u32))
}

/// Jitter-induced deviation estimate `δ_exp = 2 (gT₂)² (ΔT₂/T₂)²`.
pub fn delta_exp(gt2: f64, rel_jitter: f64) -> Result<f64> {
    if !(gt2 >= 0.0 && rel_jitter >= 0.0) {
        return Err(Error::domain("delta_exp needs non-negative inputs"));
    }
    Ok(2.0 * gt2 * gt2 * rel_jitter * rel_jitter)
}
