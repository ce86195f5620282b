//! Pseudo angular momentum on the two-photon Fock space `{|0⟩, |1⟩, |2⟩}`.
//!
//! With `n̂ = a†a`, the Holstein-Primakoff triple for two photons is
//! `J₂⁺ = √(2−n̂) a`, `J₂⁻ = a†√(2−n̂)`, `J₂⁰ = 1 − n̂`, and
//!
//! ```text
//! J₃ = √(p(1−p)) (e^{−iφ} J₂⁺ + e^{iφ} J₂⁻) − (2p−1) J₂⁰
//! ```
//!
//! has the eigenvectors `|2,p,φ⟩ (+1)`, `|Γ(2,p,φ)⟩ (0)`, `|2,1−p,π+φ⟩ (−1)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::fock::{check_probability, inner, make_gamma, make_gbs, FieldState, GbsParams, Ket};
use crate::jc::{OperatorBasis, OperatorMatrix};
use crate::{Error, Result, C64, TOL};

const DIM: usize = 3;

/// Orthonormal eigenbasis of `J₃`, labelled as spin-1 states `|1,m⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spin1Triple {
    /// `|2,p,φ⟩ ≡ |1,1⟩`
    pub plus: FieldState,
    /// `|Γ(2,p,φ)⟩ ≡ |1,0⟩`
    pub zero: FieldState,
    /// `|2,1−p,π+φ⟩ ≡ |1,−1⟩`
    pub minus: FieldState,
    pub p: f64,
    pub phi: f64,
}

impl Spin1Triple {
    pub fn new(p: f64, phi: f64) -> Result<Self> {
        let params = GbsParams::new(2, p, phi)?;
        Ok(Self {
            plus: make_gbs(params, 2)?,
            zero: make_gamma(p, phi, 2)?,
            minus: make_gbs(params.orthogonal(), 2)?,
            p,
            phi,
        })
    }

    /// States paired with their `J₃` eigenvalues, in the order `+1, 0, −1`.
    pub fn with_eigenvalues(&self) -> [(&FieldState, f64); 3] {
        [(&self.plus, 1.0), (&self.zero, 0.0), (&self.minus, -1.0)]
    }

    /// Gram matrix `⟨vᵢ|vⱼ⟩` in the order `plus, zero, minus`.
    pub fn gram(&self) -> [[C64; 3]; 3] {
        let v = [&self.plus, &self.zero, &self.minus];
        let mut g = [[C64::default(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = inner(v[i], v[j]).expect("same dimension");
            }
        }
        g
    }
}

/// `J₂⁺`, `J₂⁻`, `J₂⁰` on the three-dimensional field basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpOperators {
    pub plus: OperatorMatrix,
    pub minus: OperatorMatrix,
    pub zero: OperatorMatrix,
}

fn annihilation() -> DMatrix<C64> {
    let mut a = DMatrix::zeros(DIM, DIM);
    for n in 1..DIM {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn number_function(f: impl Fn(f64) -> f64) -> DMatrix<C64> {
    DMatrix::from_fn(DIM, DIM, |r, c| {
        if r == c {
            C64::new(f(r as f64), 0.0)
        } else {
            C64::default()
        }
    })
}

/// Builds the Holstein-Primakoff triple by composing truncated matrices:
/// `J₂⁺` applies `a` first and then `√(2−n̂)`.
pub fn hp_operators() -> HpOperators {
    let a = annihilation();
    let root = number_function(|n| (2.0 - n).sqrt());
    let field = |m| OperatorMatrix::new(OperatorBasis::Field, m).expect("finite 3x3 matrix");
    HpOperators {
        plus: field(&root * &a),
        minus: field(a.adjoint() * &root),
        zero: field(number_function(|n| 1.0 - n)),
    }
}

/// The pseudo angular momentum `J₃(p, φ)`.
pub fn j3_operator(p: f64, phi: f64) -> Result<OperatorMatrix> {
    check_probability(p)?;
    if !phi.is_finite() {
        return Err(Error::domain("phase must be finite"));
    }
    let hp = hp_operators();
    let s = (p * (1.0 - p)).sqrt();
    let m = hp.plus.matrix() * C64::from_polar(s, -phi) + hp.minus.matrix() * C64::from_polar(s, phi)
        - hp.zero.matrix() * C64::new(2.0 * p - 1.0, 0.0);
    OperatorMatrix::new(OperatorBasis::Field, m)
}

/// Outcome of checking `J₃ v = λ v` on the 2GBS triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenbasisReport {
    pub p: f64,
    pub phi: f64,
    /// Ascending numerical spectrum of the operator.
    pub eigenvalues: [f64; 3],
    /// `‖J₃v − λv‖` for `(|2,p,φ⟩, +1)`, `(|Γ⟩, 0)`, `(|2,1−p,π+φ⟩, −1)`.
    pub residuals: [f64; 3],
}

impl EigenbasisReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Largest distance of the numerical spectrum from `{−1, 0, +1}`.
    pub fn spectrum_error(&self) -> f64 {
        self.eigenvalues
            .iter()
            .zip([-1.0, 0.0, 1.0])
            .map(|(e, t)| (e - t).abs())
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol && self.spectrum_error() < tol
    }
}

/// Ascending eigenvalues and matching eigenvectors of a Hermitian field operator.
pub fn spectrum(op: &OperatorMatrix) -> Result<(Vec<f64>, Vec<FieldState>)> {
    let eig = SymmetricEigen::new(op.matrix().clone());
    let mut order: Vec<usize> = (0..op.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| FieldState::from_amplitudes(eig.eigenvectors.column(i).iter().copied().collect()))
        .collect::<Result<_>>()?;
    Ok((values, vectors))
}

/// Eigenvalue residuals of an arbitrary operator against the 2GBS triple.
pub fn verify_eigenbasis_with(op: &OperatorMatrix, p: f64, phi: f64) -> Result<EigenbasisReport> {
    if op.basis() != OperatorBasis::Field || op.dim() != DIM {
        return Err(Error::domain("expected a 3x3 field operator"));
    }
    let triple = Spin1Triple::new(p, phi)?;
    let mut residuals = [0.0; 3];
    for (slot, (v, lambda)) in residuals.iter_mut().zip(triple.with_eigenvalues()) {
        let image = op.apply_field(v)?;
        *slot = image
            .amplitudes()
            .iter()
            .zip(v.amplitudes())
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
    }
    let (values, _) = spectrum(op)?;
    Ok(EigenbasisReport {
        p,
        phi,
        eigenvalues: [values[0], values[1], values[2]],
        residuals,
    })
}

/// Residuals of `J₃(p, φ)` on its claimed eigenbasis.
pub fn verify_eigenbasis(p: f64, phi: f64) -> Result<EigenbasisReport> {
    verify_eigenbasis_with(&j3_operator(p, phi)?, p, phi)
}

/// Checks pairwise orthonormality of the triple.
pub fn triple_is_orthonormal(triple: &Spin1Triple) -> bool {
    let g = triple.gram();
    (0..3).all(|i| {
        (0..3).all(|j| {
            let target = if i == j { 1.0 } else { 0.0 };
            (g[i][j] - target).norm() <= TOL.algebraic
        })
    }) && [&triple.plus, &triple.zero, &triple.minus]
        .iter()
        .all(|v| v.is_normalized())
}
