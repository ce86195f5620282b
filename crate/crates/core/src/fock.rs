//! Pure states on a truncated Fock space, a two-level atom, and their product.
//!
//! Joint states are stored atom-major: `|↓,0⟩ .. |↓,n_max⟩, |↑,0⟩ .. |↑,n_max⟩`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64, TOL};

/// Largest supported truncation.
pub const MAX_N_MAX: usize = 64;

/// Truncation used by the protocol pipelines unless configured otherwise.
pub const DEFAULT_N_MAX: usize = 4;

/// Anything with a flat amplitude vector.
pub trait Ket {
    fn amplitudes(&self) -> &[C64];

    fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOL.algebraic
    }
}

fn check_finite(amps: &[C64]) -> Result<()> {
    if amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max > MAX_N_MAX {
        return Err(Error::domain(format!(
            "n_max = {n_max} exceeds the supported maximum {MAX_N_MAX}"
        )));
    }
    Ok(())
}

/// Index of the largest-magnitude amplitude (first one on ties).
pub(crate) fn argmax_magnitude(amps: &[C64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, a) in amps.iter().enumerate() {
        let m = a.norm_sqr();
        if m > 0.0 && best.is_none_or(|(_, bm)| m > bm) {
            best = Some((i, m));
        }
    }
    best.map(|(i, _)| i)
}

/// Multiplies every amplitude by the phase that makes `amps[index]` real
/// and positive. A zero reference amplitude leaves the vector untouched.
pub(crate) fn rotate_to_real(amps: &[C64], index: usize) -> Vec<C64> {
    let r = amps[index];
    if r.norm() == 0.0 {
        return amps.to_vec();
    }
    let phase = r.conj() / r.norm();
    amps.iter().map(|a| a * phase).collect()
}

/// Field state `Σₙ cₙ|n⟩` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct FieldState {
    amps: Vec<C64>,
}

impl FieldState {
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::domain("a field state needs at least one amplitude"));
        }
        check_n_max(amps.len() - 1)?;
        check_finite(&amps)?;
        Ok(Self { amps })
    }

    pub fn zeros(n_max: usize) -> Result<Self> {
        check_n_max(n_max)?;
        Ok(Self {
            amps: vec![C64::new(0.0, 0.0); n_max + 1],
        })
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    /// Amplitude on `|n⟩`, zero above the truncation.
    pub fn amp(&self, n: usize) -> C64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    /// Returns the state divided by its norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        Ok(Self {
            amps: self.amps.iter().map(|a| a / norm).collect(),
        })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Same ray with the largest-magnitude amplitude made real and positive.
    pub fn gauge_fixed(&self) -> Self {
        match argmax_magnitude(&self.amps) {
            Some(i) => Self {
                amps: rotate_to_real(&self.amps, i),
            },
            None => self.clone(),
        }
    }

    /// Total population on `|n⟩` with `n > level`.
    pub fn population_above(&self, level: usize) -> f64 {
        self.amps.iter().skip(level + 1).map(|a| a.norm_sqr()).sum()
    }

    /// Embeds the state in a larger truncation (zero-padding).
    pub fn padded(&self, n_max: usize) -> Result<Self> {
        if n_max < self.n_max() {
            return Err(Error::domain(format!(
                "cannot pad a state with n_max = {} down to {n_max}",
                self.n_max()
            )));
        }
        check_n_max(n_max)?;
        let mut amps = self.amps.clone();
        amps.resize(n_max + 1, C64::default());
        Ok(Self { amps })
    }
}

impl Ket for FieldState {
    fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
}

/// Internal level of the two-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomLevel {
    /// Ground state `|↓⟩`.
    Down,
    /// Excited state `|↑⟩`.
    Up,
}

impl AtomLevel {
    pub(crate) fn block(self) -> usize {
        match self {
            AtomLevel::Down => 0,
            AtomLevel::Up => 1,
        }
    }
}

/// Atomic state `down|↓⟩ + up|↑⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomState {
    amps: [C64; 2],
}

impl AtomState {
    pub fn new(down: C64, up: C64) -> Result<Self> {
        let amps = [down, up];
        check_finite(&amps)?;
        Ok(Self { amps })
    }

    pub fn ground() -> Self {
        Self {
            amps: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        }
    }

    pub fn excited() -> Self {
        Self {
            amps: [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        }
    }

    pub fn down(&self) -> C64 {
        self.amps[0]
    }

    pub fn up(&self) -> C64 {
        self.amps[1]
    }

    pub fn amp(&self, level: AtomLevel) -> C64 {
        self.amps[level.block()]
    }
}

impl Ket for AtomState {
    fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
}

/// Atom ⊗ field state in atom-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct JointState {
    n_max: usize,
    amps: Vec<C64>,
}

impl JointState {
    pub fn from_amplitudes(n_max: usize, amps: Vec<C64>) -> Result<Self> {
        check_n_max(n_max)?;
        if amps.len() != 2 * (n_max + 1) {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: 2 * (n_max + 1),
            });
        }
        check_finite(&amps)?;
        Ok(Self { n_max, amps })
    }

    pub fn zeros(n_max: usize) -> Result<Self> {
        check_n_max(n_max)?;
        Ok(Self {
            n_max,
            amps: vec![C64::default(); 2 * (n_max + 1)],
        })
    }

    /// Basis state `|level, n⟩`.
    pub fn basis(level: AtomLevel, n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::domain(format!("photon number {n} exceeds n_max = {n_max}")));
        }
        let mut state = Self::zeros(n_max)?;
        state.amps[Self::index_of(n_max, level, n)] = C64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub(crate) fn index_of(n_max: usize, level: AtomLevel, n: usize) -> usize {
        level.block() * (n_max + 1) + n
    }

    pub fn amp(&self, level: AtomLevel, n: usize) -> C64 {
        if n > self.n_max {
            return C64::default();
        }
        self.amps[Self::index_of(self.n_max, level, n)]
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    /// Unnormalized field branch attached to `level`.
    pub fn branch(&self, level: AtomLevel) -> FieldState {
        let start = level.block() * (self.n_max + 1);
        FieldState {
            amps: self.amps[start..start + self.n_max + 1].to_vec(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        Ok(Self {
            n_max: self.n_max,
            amps: self.amps.iter().map(|a| a / norm).collect(),
        })
    }

    pub fn gauge_fixed(&self) -> Self {
        match argmax_magnitude(&self.amps) {
            Some(i) => Self {
                n_max: self.n_max,
                amps: rotate_to_real(&self.amps, i),
            },
            None => self.clone(),
        }
    }

    /// Population with more than `level` photons, summed over both atomic levels.
    pub fn population_above(&self, level: usize) -> f64 {
        self.branch(AtomLevel::Down).population_above(level)
            + self.branch(AtomLevel::Up).population_above(level)
    }
}

impl Ket for JointState {
    fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
}

/// Parameters `(N, p, φ)` of the generalized binomial state `|N, p, φ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbsParams {
    /// Maximum photon number.
    pub n: usize,
    /// Single-photon occurrence probability.
    pub p: f64,
    /// Mean phase in radians.
    pub phi: f64,
}

impl GbsParams {
    pub fn new(n: usize, p: f64, phi: f64) -> Result<Self> {
        let params = Self { n, p, phi };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.p)?;
        if !self.phi.is_finite() {
            return Err(Error::domain("phase must be finite"));
        }
        check_n_max(self.n)
    }

    /// Parameters of the 2GBS orthogonal to this one: `(N, 1 − p, π + φ)`.
    pub fn orthogonal(&self) -> Self {
        Self {
            n: self.n,
            p: 1.0 - self.p,
            phi: PI + self.phi,
        }
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("probability {p} outside [0, 1]")))
    }
}

/// `C(n, k)` in floating point.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Fock state `|n⟩`.
pub fn make_fock(n: usize, n_max: usize) -> Result<FieldState> {
    if n > n_max {
        return Err(Error::domain(format!("photon number {n} exceeds n_max = {n_max}")));
    }
    let mut state = FieldState::zeros(n_max)?;
    state.amps[n] = C64::new(1.0, 0.0);
    Ok(state)
}

/// Generalized binomial state
/// `|N,p,φ⟩ = Σₙ [C(N,n) pⁿ (1−p)^(N−n)]^½ e^{inφ} |n⟩`.
pub fn make_gbs(params: GbsParams, n_max: usize) -> Result<FieldState> {
    params.validate()?;
    if n_max < params.n {
        return Err(Error::domain(format!(
            "n_max = {n_max} cannot hold a GBS with N = {}",
            params.n
        )));
    }
    let GbsParams { n: big_n, p, phi } = params;
    let mut state = FieldState::zeros(n_max)?;
    for k in 0..=big_n {
        let weight = binomial(big_n, k) * p.powi(k as i32) * (1.0 - p).powi((big_n - k) as i32);
        state.amps[k] = C64::from_polar(weight.sqrt(), k as f64 * phi);
    }
    Ok(state)
}

/// Third member of the orthonormal triple built on `|2,p,φ⟩` and
/// `|2,1−p,π+φ⟩`:
/// `√(2p(1−p))|0⟩ + (2p−1)e^{iφ}|1⟩ − √(2p(1−p))e^{2iφ}|2⟩`.
pub fn make_gamma(p: f64, phi: f64, n_max: usize) -> Result<FieldState> {
    check_probability(p)?;
    if n_max < 2 {
        return Err(Error::domain(format!("n_max = {n_max} cannot hold a Γ state")));
    }
    let s = (2.0 * p * (1.0 - p)).sqrt();
    let mut state = FieldState::zeros(n_max)?;
    state.amps[0] = C64::new(s, 0.0);
    state.amps[1] = C64::from_polar(1.0, phi) * (2.0 * p - 1.0);
    state.amps[2] = -C64::from_polar(s, 2.0 * phi);
    Ok(state)
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner<K: Ket>(a: &K, b: &K) -> Result<C64> {
    let (x, y) = (a.amplitudes(), b.amplitudes());
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(u, v)| u.conj() * v).sum())
}

/// `|⟨a|b⟩|²` for normalized pure states.
pub fn fidelity<K: Ket>(a: &K, b: &K) -> Result<f64> {
    for s in [a, b] {
        if !s.is_normalized() {
            return Err(Error::Unnormalized {
                norm_sqr: s.norm_sqr(),
            });
        }
    }
    Ok(inner(a, b)?.norm_sqr().min(1.0))
}

/// `|atom⟩ ⊗ |field⟩` in atom-major order.
pub fn tensor(atom: &AtomState, field: &FieldState) -> JointState {
    let amps = atom
        .amplitudes()
        .iter()
        .flat_map(|a| field.amps.iter().map(move |f| a * f))
        .collect();
    JointState {
        n_max: field.n_max(),
        amps,
    }
}

/// Conditional (unnormalized) field state for an atomic outcome together
/// with its Born probability.
pub fn project_atom(joint: &JointState, outcome: AtomLevel) -> (FieldState, f64) {
    let branch = joint.branch(outcome);
    let probability = branch.norm_sqr();
    (branch, probability)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum BasisLabel {
    #[serde(rename = "field")]
    Field,
    #[serde(rename = "joint-atom-major")]
    JointAtomMajor,
}

/// Wire form shared by field and joint states.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateRepr {
    n_max: usize,
    amps: Vec<[f64; 2]>,
    basis: BasisLabel,
}

fn pairs(amps: &[C64]) -> Vec<[f64; 2]> {
    amps.iter().map(|a| [a.re, a.im]).collect()
}

fn from_pairs(pairs: &[[f64; 2]]) -> Vec<C64> {
    pairs.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl From<FieldState> for StateRepr {
    fn from(state: FieldState) -> Self {
        Self {
            n_max: state.n_max(),
            amps: pairs(&state.amps),
            basis: BasisLabel::Field,
        }
    }
}

impl TryFrom<StateRepr> for FieldState {
    type Error = Error;

    fn try_from(repr: StateRepr) -> Result<Self> {
        if repr.basis != BasisLabel::Field {
            return Err(Error::domain("expected basis \"field\""));
        }
        if repr.amps.len() != repr.n_max + 1 {
            return Err(Error::DimensionMismatch {
                left: repr.amps.len(),
                right: repr.n_max + 1,
            });
        }
        FieldState::from_amplitudes(from_pairs(&repr.amps))
    }
}

impl From<JointState> for StateRepr {
    fn from(state: JointState) -> Self {
        Self {
            n_max: state.n_max,
            amps: pairs(&state.amps),
            basis: BasisLabel::JointAtomMajor,
        }
    }
}

impl TryFrom<StateRepr> for JointState {
    type Error = Error;

    fn try_from(repr: StateRepr) -> Result<Self> {
        if repr.basis != BasisLabel::JointAtomMajor {
            return Err(Error::domain("expected basis \"joint-atom-major\""));
        }
        JointState::from_amplitudes(repr.n_max, from_pairs(&repr.amps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn real_amps(state: &FieldState) -> Vec<f64> {
        state.amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn fock_basis_vectors() {
        assert_eq!(real_amps(&make_fock(0, 3).unwrap()), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(real_amps(&make_fock(2, 3).unwrap()), vec![0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(make_fock(4, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn gbs_endpoints() {
        let vac = make_gbs(GbsParams::new(2, 0.0, 1.234).unwrap(), 2).unwrap();
        assert_eq!(real_amps(&vac), vec![1.0, 0.0, 0.0]);
        let top = make_gbs(GbsParams::new(2, 1.0, 0.0).unwrap(), 2).unwrap();
        assert_eq!(real_amps(&top), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn gbs_half() {
        // sqrt of the binomial pmf (1/4, 1/2, 1/4)
        let s = make_gbs(GbsParams::new(2, 0.5, 0.0).unwrap(), 2).unwrap();
        let expect = [0.25f64.sqrt(), 0.5f64.sqrt(), 0.25f64.sqrt()];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!(close(*a, C64::new(e, 0.0), 1e-15));
        }
        assert!((s.amp(1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
    }

    #[test]
    fn gbs_rejects_small_truncation() {
        let params = GbsParams::new(2, 0.3, 0.0).unwrap();
        assert!(matches!(make_gbs(params, 1), Err(Error::Domain(_))));
        assert!(GbsParams::new(2, 1.5, 0.0).is_err());
    }

    #[test]
    fn gamma_values() {
        let g = make_gamma(0.5, 0.0, 2).unwrap();
        assert!(close(g.amp(0), C64::new(0.5f64.sqrt(), 0.0), 1e-15));
        assert!(close(g.amp(1), C64::new(0.0, 0.0), 1e-15));
        assert!(close(g.amp(2), C64::new(-(0.5f64.sqrt()), 0.0), 1e-15));

        let g0 = make_gamma(0.0, 0.0, 2).unwrap();
        assert_eq!(real_amps(&g0), vec![0.0, -1.0, 0.0]);
        assert!(make_gamma(0.5, 0.0, 1).is_err());
    }

    #[test]
    fn gamma_orthogonal_to_gbs_pair() {
        for &p in &[0.0, 0.2, 0.5, 0.77, 1.0] {
            for &phi in &[0.0, 0.9, 2.5, -1.1] {
                let params = GbsParams::new(2, p, phi).unwrap();
                let gamma = make_gamma(p, phi, 4).unwrap();
                let a = make_gbs(params, 4).unwrap();
                let b = make_gbs(params.orthogonal(), 4).unwrap();
                assert!(inner(&gamma, &a).unwrap().norm() < TOL.algebraic);
                assert!(inner(&gamma, &b).unwrap().norm() < TOL.algebraic);
                assert!(inner(&a, &b).unwrap().norm() < TOL.algebraic);
            }
        }
    }

    #[test]
    fn inner_basics() {
        let v0 = make_fock(0, 3).unwrap();
        let v1 = make_fock(1, 3).unwrap();
        assert_eq!(inner(&v0, &v0).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(inner(&v0, &v1).unwrap(), C64::new(0.0, 0.0));
        let short = make_fock(0, 2).unwrap();
        assert!(matches!(inner(&v0, &short), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_slot() {
        let v = make_fock(1, 2).unwrap();
        let iv = v.scaled(C64::new(0.0, 1.0));
        assert_eq!(inner(&iv, &v).unwrap(), C64::new(0.0, -1.0));
        assert_eq!(inner(&v, &iv).unwrap(), C64::new(0.0, 1.0));
    }

    #[test]
    fn fidelity_rejects_unnormalized() {
        let v = make_fock(1, 2).unwrap();
        let half = v.scaled(C64::new(0.5, 0.0));
        assert!(matches!(fidelity(&v, &half), Err(Error::Unnormalized { .. })));
    }

    #[test]
    fn tensor_basis_ordering() {
        let f0 = make_fock(0, 2).unwrap();
        let f1 = make_fock(1, 2).unwrap();
        let j = tensor(&AtomState::ground(), &f0);
        assert_eq!(j.amp(AtomLevel::Down, 0), C64::new(1.0, 0.0));
        assert_eq!(j.amplitudes()[0], C64::new(1.0, 0.0));
        let j = tensor(&AtomState::excited(), &f1);
        assert_eq!(j.amp(AtomLevel::Up, 1), C64::new(1.0, 0.0));
        assert_eq!(j.amplitudes()[3 + 1], C64::new(1.0, 0.0));
    }

    #[test]
    fn project_ground_joint() {
        let j = JointState::basis(AtomLevel::Down, 0, 3).unwrap();
        let (field, prob) = project_atom(&j, AtomLevel::Down);
        assert_eq!(prob, 1.0);
        assert_eq!(field, make_fock(0, 3).unwrap());
        let (field, prob) = project_atom(&j, AtomLevel::Up);
        assert_eq!(prob, 0.0);
        assert_eq!(field.norm_sqr(), 0.0);
    }

    #[test]
    fn gauge_fix_makes_largest_amplitude_real_positive() {
        let s = FieldState::from_amplitudes(vec![
            C64::new(0.1, 0.0),
            C64::from_polar(0.9, 2.0),
            C64::new(0.0, 0.3),
        ])
        .unwrap();
        let g = s.gauge_fixed();
        assert!(g.amp(1).im.abs() < 1e-16 && g.amp(1).re > 0.0);
        assert!((g.norm_sqr() - s.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn truncation_limit() {
        assert!(FieldState::zeros(MAX_N_MAX).is_ok());
        assert!(FieldState::zeros(MAX_N_MAX + 1).is_err());
        assert!(FieldState::from_amplitudes(vec![C64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn json_shape() {
        let s = make_fock(1, 1).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"n_max":1,"amps":[[0.0,0.0],[1.0,0.0]],"basis":"field"}"#);
        let j = tensor(&AtomState::ground(), &s);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains(r#""basis":"joint-atom-major""#));
    }

    #[test]
    fn json_rejects_wrong_basis_or_length() {
        let bad = r#"{"n_max":1,"amps":[[1.0,0.0],[0.0,0.0]],"basis":"joint-atom-major"}"#;
        assert!(serde_json::from_str::<FieldState>(bad).is_err());
        let bad = r#"{"n_max":2,"amps":[[1.0,0.0],[0.0,0.0]],"basis":"field"}"#;
        assert!(serde_json::from_str::<FieldState>(bad).is_err());
        let bad = r#"{"n_max":0,"amps":[[1.0,0.0]],"basis":"joint-atom-major"}"#;
        assert!(serde_json::from_str::<JointState>(bad).is_err());
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(binomial(2, 1), 2.0);
        assert_eq!(binomial(8, 4), 70.0);
        assert_eq!(binomial(3, 5), 0.0);
    }
}
