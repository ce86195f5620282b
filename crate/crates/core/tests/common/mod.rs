#![allow(dead_code)]

use cavity_gbs::fock::{AtomLevel, FieldState, JointState, Ket};
use cavity_gbs::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_amps(rng: &mut impl Rng, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn random_field(rng: &mut impl Rng, n_max: usize) -> FieldState {
    FieldState::from_amplitudes(random_amps(rng, n_max + 1))
        .unwrap()
        .normalized()
        .unwrap()
}

/// Random normalized joint state with `|↑, n_max⟩` left empty.
pub fn random_joint(rng: &mut impl Rng, n_max: usize) -> JointState {
    let mut amps = random_amps(rng, 2 * (n_max + 1));
    amps[2 * n_max + 1] = C64::new(0.0, 0.0);
    let state = JointState::from_amplitudes(n_max, amps).unwrap().normalized().unwrap();
    assert_eq!(state.amp(AtomLevel::Up, n_max), C64::new(0.0, 0.0));
    state
}

/// Componentwise distance after fixing the gauge on the reference's
/// largest amplitude.
pub fn gauge_distance(reference: &[C64], other: &[C64]) -> f64 {
    let idx = reference
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .map(|(i, _)| i)
        .unwrap();
    let rot = |v: &[C64]| -> Vec<C64> {
        let r = v[idx];
        let ph = if r.norm() == 0.0 { C64::new(1.0, 0.0) } else { r.conj() / r.norm() };
        v.iter().map(|a| a * ph).collect()
    };
    rot(reference)
        .iter()
        .zip(rot(other))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn norm_sqr<K: Ket>(k: &K) -> f64 {
    k.norm_sqr()
}
