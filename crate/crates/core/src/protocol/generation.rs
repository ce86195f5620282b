use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::timing::{gt2_for, M2_MAX};
use crate::fock::{
    check_probability, inner, make_fock, make_gbs, tensor, AtomLevel, FieldState, GbsParams, Ket,
    JointState, DEFAULT_N_MAX, MAX_N_MAX,
};
use crate::jc::{free_field_evolve, jc_closed_form, ramsey_prepare};
use crate::{Error, Result, C64, TOL};

/// First-atom interaction angle `gT₁ = π/2`.
pub const FIRST_ATOM_GT: f64 = PI / 2.0;

/// Highest photon number the protocol is meant to populate.
const PROTOCOL_MAX_PHOTONS: usize = 2;

/// Parameters of one generation run. Times are derived from `g`; `gt1`/`gt2`
/// override the nominal interaction angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub p: f64,
    pub phi1: f64,
    /// rad/s
    pub g: f64,
    /// rad/s
    pub omega: f64,
    /// Free-flight gap between the two atoms, seconds.
    pub dt_gap: f64,
    pub n_max: usize,
    pub m2: u32,
    pub gt1: Option<f64>,
    pub gt2: Option<f64>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            p: 0.5,
            phi1: 0.0,
            g: 1.0,
            omega: 0.0,
            dt_gap: 0.0,
            n_max: DEFAULT_N_MAX,
            m2: 5,
            gt1: None,
            gt2: None,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability(self.p)?;
        if !self.phi1.is_finite() {
            return Err(Error::domain("phi1 must be finite"));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::domain(format!("g = {} must be positive", self.g)));
        }
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::domain(format!("omega = {} must be non-negative", self.omega)));
        }
        if !(self.dt_gap.is_finite() && self.dt_gap >= 0.0) {
            return Err(Error::domain(format!("dt_gap = {} must be non-negative", self.dt_gap)));
        }
        if !(1..=MAX_N_MAX).contains(&self.n_max) {
            return Err(Error::domain(format!(
                "n_max = {} outside [1, {MAX_N_MAX}]",
                self.n_max
            )));
        }
        if self.m2 > M2_MAX {
            return Err(Error::domain(format!("m2 = {} outside [0, {M2_MAX}]", self.m2)));
        }
        for gt in [self.gt1, self.gt2].into_iter().flatten() {
            if !(gt.is_finite() && gt >= 0.0) {
                return Err(Error::domain(format!("interaction angle {gt} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Field phase seen by the second atom, `φ' = φ₁ + ωΔt`.
    pub fn phi_prime(&self) -> f64 {
        self.phi1 + self.omega * self.dt_gap
    }

    pub fn gt1(&self) -> f64 {
        self.gt1.unwrap_or(FIRST_ATOM_GT)
    }

    pub fn gt2(&self) -> f64 {
        self.gt2.unwrap_or_else(|| gt2_for(self.m2))
    }

    /// Target `|2, p, π − φ'⟩`.
    pub fn target(&self) -> GbsParams {
        GbsParams {
            n: 2,
            p: self.p,
            phi: PI - self.phi_prime(),
        }
    }
}

/// Result of one generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    /// Field left when both atoms exit in `|↓⟩`, normalized.
    pub post_selected_field: FieldState,
    /// Probability `𝒫₂` of finding the second atom in `|↓⟩`.
    pub p2: f64,
    /// `⟨t|ρ|t⟩` for the field conditioned on the second atom in `|↓⟩`
    /// (first atom traced out).
    pub fidelity_to_target: f64,
    pub target: GbsParams,
    /// Second atom ⊗ field after `T₂`, first atom in `|↓⟩`, normalized.
    pub joint_before_projection: JointState,
    /// Largest population above two photons seen after any step.
    pub leakage: f64,
    /// Population left with the first atom in `|↑⟩`.
    pub atom1_excited: f64,
    pub gt1: f64,
    pub gt2: f64,
    pub t1: f64,
    pub t2: f64,
    /// `1 − sin(√2 gT₂)` at the interaction angle used.
    pub delta: f64,
}

fn track_leakage(leakage: &mut f64, population: f64) -> Result<()> {
    *leakage = leakage.max(population);
    if population > TOL.leakage {
        return Err(Error::TruncationLeak {
            amplitude: population.sqrt(),
            n_max: PROTOCOL_MAX_PHOTONS,
        });
    }
    Ok(())
}

/// Runs the pipeline at the configured (or nominal) interaction angles.
pub fn run_generation(config: &GenerationConfig) -> Result<GenerationReport> {
    run_generation_at(config, config.gt1(), config.gt2())
}

/// Runs the pipeline with explicit interaction angles `gT₁`, `gT₂`.
///
/// The first atom is kept as a spectator after it leaves the cavity: each of
/// its two outcomes carries its own field branch through the rest of the
/// sequence, so timing errors on `T₁` show up in `fidelity_to_target`.
pub fn run_generation_at(config: &GenerationConfig, gt1: f64, gt2: f64) -> Result<GenerationReport> {
    config.validate()?;
    let n_max = config.n_max;
    let mut leakage = 0.0;

    let atom1 = ramsey_prepare(config.p, config.phi1)?;
    let after1 = jc_closed_form(&tensor(&atom1, &make_fock(0, n_max)?), 1.0, gt1)?;
    track_leakage(&mut leakage, after1.population_above(PROTOCOL_MAX_PHOTONS))?;

    let atom2 = ramsey_prepare(config.p, config.phi_prime())?;
    let mut after2 = Vec::with_capacity(2);
    for first in [AtomLevel::Down, AtomLevel::Up] {
        let field = free_field_evolve(&after1.branch(first), config.omega, config.dt_gap);
        let joint = jc_closed_form(&tensor(&atom2, &field), 1.0, gt2)?;
        track_leakage(&mut leakage, joint.population_above(PROTOCOL_MAX_PHOTONS))?;
        after2.push(joint);
    }

    let target = config.target();
    let target_state = make_gbs(target, n_max)?;
    let ground_branches: Vec<FieldState> =
        after2.iter().map(|j| j.branch(AtomLevel::Down)).collect();
    let p2: f64 = ground_branches.iter().map(|b| b.norm_sqr()).sum();
    if p2 == 0.0 {
        return Err(Error::domain("the second atom never exits in the ground state"));
    }
    let overlap: f64 = ground_branches
        .iter()
        .map(|b| inner(&target_state, b).map(|z| z.norm_sqr()))
        .sum::<Result<f64>>()?;

    // dominant first-atom branch; the excited one only exists off-nominal
    let main = if ground_branches[0].norm_sqr() > 0.0 { 0 } else { 1 };

    Ok(GenerationReport {
        post_selected_field: ground_branches[main].normalized()?,
        p2,
        fidelity_to_target: (overlap / p2).min(1.0),
        target,
        joint_before_projection: after2[main].normalized()?,
        leakage,
        atom1_excited: after1.branch(AtomLevel::Up).norm_sqr(),
        gt1,
        gt2,
        t1: gt1 / config.g,
        t2: gt2 / config.g,
        delta: 1.0 - (SQRT_2 * gt2).sin(),
    })
}

/// Exact `𝒩₂² = 1 − 2δp² + δ²p²`.
pub fn psi2_norm_sqr(p: f64, delta: f64) -> f64 {
    1.0 - 2.0 * delta * p * p + delta * delta * p * p
}

/// First-order `𝒩₂² ≈ 1 − 2δp²`.
pub fn psi2_norm_sqr_approx(p: f64, delta: f64) -> f64 {
    1.0 - 2.0 * delta * p * p
}

/// Analytic field after post-selection at `gT₂ = π/4 + 2m₂π`:
/// `(1/𝒩₂) Σₙ cₙ [pⁿ(1−p)^{2−n}]^½ e^{in(π−φ')} |n⟩` with
/// `c = (1, √2, 1 − δ)`, returned on `n_max = 2`.
pub fn predicted_psi2(p: f64, phi_eff: f64, delta: f64) -> Result<FieldState> {
    check_probability(p)?;
    let coeffs = [1.0, SQRT_2, 1.0 - delta];
    let phase = PI - phi_eff;
    let norm = psi2_norm_sqr(p, delta).sqrt();
    let amps = coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let weight = (p.powi(n as i32) * (1.0 - p).powi(2 - n as i32)).sqrt();
            C64::from_polar(c * weight / norm, n as f64 * phase)
        })
        .collect();
    FieldState::from_amplitudes(amps)
}
