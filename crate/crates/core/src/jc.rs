//! Resonant atom-cavity dynamics and the Ramsey-zone unitaries.
//!
//! Everything runs in the interaction picture with ℏ = 1, where the resonant
//! Jaynes-Cummings generator is `H = i g (σ₊a − σ₋a†)`. Under `exp(−iHt)` the
//! two-dimensional blocks `{|↑,n⟩, |↓,n+1⟩}` rotate by the angle `g√(n+1) t`:
//!
//! ```text
//! |↑,n⟩ → cos(g√(n+1)t)|↑,n⟩ − sin(g√(n+1)t)|↓,n+1⟩
//! |↓,n⟩ → cos(g√n t)|↓,n⟩ + sin(g√n t)|↑,n−1⟩
//! ```
//!
//! [`jc_closed_form`] applies these rotations directly; [`jc_expm_evolve`]
//! diagonalizes the truncated generator and is kept as an independent check.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::fock::{check_probability, AtomLevel, AtomState, FieldState, Ket, JointState};
use crate::{Error, Result, C64, TOL};

/// Coupling constant `g` and cavity frequency `ω`, both in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub g: f64,
    pub omega: f64,
}

impl CouplingSpec {
    pub fn new(g: f64, omega: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::domain(format!("coupling g = {g} must be positive")));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::domain(format!("frequency omega = {omega} must be non-negative")));
        }
        Ok(Self { g, omega })
    }
}

/// Which basis an [`OperatorMatrix`] acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorBasis {
    #[serde(rename = "field")]
    Field,
    #[serde(rename = "joint-atom-major")]
    JointAtomMajor,
}

/// Dense complex operator with a basis label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct OperatorMatrix {
    basis: OperatorBasis,
    matrix: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(basis: OperatorBasis, matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::domain("operator matrix must be square and non-empty"));
        }
        if basis == OperatorBasis::JointAtomMajor && !matrix.nrows().is_multiple_of(2) {
            return Err(Error::domain("joint-basis operators need an even dimension"));
        }
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { basis, matrix })
    }

    pub fn basis(&self) -> OperatorBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest entry-wise deviation `max |Aᵢⱼ − conj(Aⱼᵢ)|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    fn apply_amps(&self, amps: &[C64]) -> Result<Vec<C64>> {
        if amps.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: amps.len(),
            });
        }
        let v = DVector::from_column_slice(amps);
        Ok((&self.matrix * v).iter().copied().collect())
    }

    pub fn apply_field(&self, state: &FieldState) -> Result<FieldState> {
        if self.basis != OperatorBasis::Field {
            return Err(Error::domain("operator does not act on the field basis"));
        }
        FieldState::from_amplitudes(self.apply_amps(state.amplitudes())?)
    }

    pub fn apply_joint(&self, state: &JointState) -> Result<JointState> {
        if self.basis != OperatorBasis::JointAtomMajor {
            return Err(Error::domain("operator does not act on the joint basis"));
        }
        JointState::from_amplitudes(state.n_max(), self.apply_amps(state.amplitudes())?)
    }

    /// `⟨ψ|A|ψ⟩` on a joint state.
    pub fn expectation_joint(&self, state: &JointState) -> Result<C64> {
        let image = self.apply_joint(state)?;
        crate::fock::inner(state, &image)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    basis: OperatorBasis,
    dim: usize,
    /// Row-major `[re, im]` pairs.
    entries: Vec<[f64; 2]>,
}

impl From<OperatorMatrix> for OperatorRepr {
    fn from(op: OperatorMatrix) -> Self {
        let dim = op.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = op.matrix[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        Self {
            basis: op.basis,
            dim,
            entries,
        }
    }
}

impl TryFrom<OperatorRepr> for OperatorMatrix {
    type Error = Error;

    fn try_from(repr: OperatorRepr) -> Result<Self> {
        if repr.entries.len() != repr.dim * repr.dim {
            return Err(Error::DimensionMismatch {
                left: repr.entries.len(),
                right: repr.dim * repr.dim,
            });
        }
        let matrix = DMatrix::from_row_iterator(
            repr.dim,
            repr.dim,
            repr.entries.iter().map(|&[re, im]| C64::new(re, im)),
        );
        OperatorMatrix::new(repr.basis, matrix)
    }
}

fn check_no_leak(joint: &JointState) -> Result<()> {
    let n_max = joint.n_max();
    let top = joint.amp(AtomLevel::Up, n_max).norm();
    if top > TOL.algebraic {
        return Err(Error::TruncationLeak {
            amplitude: top,
            n_max,
        });
    }
    Ok(())
}

/// Resonant evolution for time `t` from the closed-form Rabi rotations.
///
/// Fails with [`Error::TruncationLeak`] when `|↑, n_max⟩` is populated, since
/// its partner `|↓, n_max+1⟩` lies outside the truncation.
pub fn jc_closed_form(joint: &JointState, g: f64, t: f64) -> Result<JointState> {
    check_no_leak(joint)?;
    let n_max = joint.n_max();
    let gt = g * t;
    let mut out = JointState::zeros(n_max)?;
    let idx = |level, n| JointState::index_of(n_max, level, n);
    let amps = out.amps_mut();

    // |↓,0⟩ is stationary
    amps[idx(AtomLevel::Down, 0)] = joint.amp(AtomLevel::Down, 0);
    // |↑,n_max⟩ has no partner inside the truncation
    amps[idx(AtomLevel::Up, n_max)] = joint.amp(AtomLevel::Up, n_max);

    for n in 0..n_max {
        let (s, c) = (gt * ((n + 1) as f64).sqrt()).sin_cos();
        let up = joint.amp(AtomLevel::Up, n);
        let down = joint.amp(AtomLevel::Down, n + 1);
        amps[idx(AtomLevel::Up, n)] = up * c + down * s;
        amps[idx(AtomLevel::Down, n + 1)] = down * c - up * s;
    }
    Ok(out)
}

/// Interaction-picture generator `i g (σ₊a − σ₋a†)` on the joint basis.
pub fn jc_hamiltonian(n_max: usize, spec: &CouplingSpec) -> Result<OperatorMatrix> {
    if n_max < 1 {
        return Err(Error::domain("the Jaynes-Cummings generator needs n_max >= 1"));
    }
    let dim = 2 * (n_max + 1);
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for n in 1..=n_max {
        let up = JointState::index_of(n_max, AtomLevel::Up, n - 1);
        let down = JointState::index_of(n_max, AtomLevel::Down, n);
        let coupling = spec.g * (n as f64).sqrt();
        h[(up, down)] = C64::new(0.0, coupling);
        h[(down, up)] = C64::new(0.0, -coupling);
    }
    OperatorMatrix::new(OperatorBasis::JointAtomMajor, h)
}

/// Total excitation number `σ_z/2 + a†a` on the joint basis.
pub fn excitation_operator(n_max: usize) -> Result<OperatorMatrix> {
    let dim = 2 * (n_max + 1);
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..=n_max {
        let d = JointState::index_of(n_max, AtomLevel::Down, n);
        let u = JointState::index_of(n_max, AtomLevel::Up, n);
        m[(d, d)] = C64::new(n as f64 - 0.5, 0.0);
        m[(u, u)] = C64::new(n as f64 + 0.5, 0.0);
    }
    OperatorMatrix::new(OperatorBasis::JointAtomMajor, m)
}

/// `exp(−iHt)` from the spectral decomposition of the Hermitian generator.
pub fn jc_propagator(n_max: usize, g: f64, t: f64) -> Result<OperatorMatrix> {
    let h = jc_hamiltonian(n_max, &CouplingSpec::new(g, 0.0)?)?;
    let eig = SymmetricEigen::new(h.matrix.clone());
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * t)));
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    OperatorMatrix::new(OperatorBasis::JointAtomMajor, u)
}

/// Resonant evolution through the matrix exponential of the truncated
/// generator. Independent of [`jc_closed_form`]; used as its oracle.
pub fn jc_expm_evolve(joint: &JointState, g: f64, t: f64) -> Result<JointState> {
    check_no_leak(joint)?;
    jc_propagator(joint.n_max(), g, t)?.apply_joint(joint)
}

/// Free evolution of the cavity field, `|n⟩ → e^{−inωΔt}|n⟩`.
pub fn free_field_evolve(field: &FieldState, omega: f64, dt: f64) -> FieldState {
    let theta = omega * dt;
    let amps = field
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, a)| a * C64::from_polar(1.0, -(n as f64) * theta))
        .collect();
    FieldState::from_amplitudes(amps).expect("phase rotation keeps amplitudes finite")
}

/// Preparation zone output `√p|↑⟩ + e^{iφ}√(1−p)|↓⟩`.
pub fn ramsey_prepare(p: f64, phi: f64) -> Result<AtomState> {
    check_probability(p)?;
    AtomState::new(C64::from_polar((1.0 - p).sqrt(), phi), C64::new(p.sqrt(), 0.0))
}

/// Decoding zone matrix in the `(↓, ↑)` basis: column 0 is the image of
/// `|↓⟩`, column 1 the image of `|↑⟩`.
pub fn ramsey_decode_matrix(p: f64, phi: f64) -> Result<[[C64; 2]; 2]> {
    check_probability(p)?;
    let sp = C64::new(p.sqrt(), 0.0);
    let sq = (1.0 - p).sqrt();
    Ok([
        // rows: ↓, ↑
        [sp, -C64::from_polar(sq, -phi)],
        [C64::from_polar(sq, phi), sp],
    ])
}

/// Decoding zone:
/// `|↑⟩ → √p|↑⟩ − e^{−iφ}√(1−p)|↓⟩`, `|↓⟩ → e^{iφ}√(1−p)|↑⟩ + √p|↓⟩`.
pub fn ramsey_decode(atom: &AtomState, p: f64, phi: f64) -> Result<AtomState> {
    let m = ramsey_decode_matrix(p, phi)?;
    let (d, u) = (atom.down(), atom.up());
    AtomState::new(m[0][0] * d + m[0][1] * u, m[1][0] * d + m[1][1] * u)
}

/// Applies the decoding zone to the atomic factor of a joint state.
pub fn ramsey_decode_joint(joint: &JointState, p: f64, phi: f64) -> Result<JointState> {
    let m = ramsey_decode_matrix(p, phi)?;
    let n_max = joint.n_max();
    let mut out = JointState::zeros(n_max)?;
    let amps = out.amps_mut();
    for n in 0..=n_max {
        let d = joint.amp(AtomLevel::Down, n);
        let u = joint.amp(AtomLevel::Up, n);
        amps[JointState::index_of(n_max, AtomLevel::Down, n)] = m[0][0] * d + m[0][1] * u;
        amps[JointState::index_of(n_max, AtomLevel::Up, n)] = m[1][0] * d + m[1][1] * u;
    }
    Ok(out)
}
