//! Density matrices for the noisy-channel analysis.
//!
//! Only small registers are ever represented this way (the four-qubit
//! channel and test fixtures); capacity is limited accordingly.

use nalgebra::DMatrix;

use crate::error::{Result, SimError};
use crate::gate::{embed_unitary, Gate};
use crate::state::PureState;
use crate::C64;

/// Largest register representable as a dense density matrix.
pub const MAX_DM_QUBITS: usize = 10;

/// Entrywise tolerance for Hermiticity and unit trace.
pub const DM_TOL: f64 = 1e-12;

/// Slack allowed on the minimum eigenvalue before a matrix is rejected.
pub const PSD_SLACK: f64 = -1e-10;

/// Hermitian, unit-trace, positive-semidefinite operator on `n_qubits`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validate and wrap a candidate density matrix.
    pub fn new(n_qubits: usize, entries: DMatrix<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DM_QUBITS {
            return Err(SimError::Capacity {
                requested: n_qubits,
                max: MAX_DM_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(SimError::InvalidArgument(format!(
                "expected a {dim}x{dim} matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::InvalidArgument("entries must be finite".into()));
        }
        let herm_dev = (&entries - entries.adjoint())
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        if herm_dev > DM_TOL {
            return Err(SimError::Contract(format!(
                "matrix is not Hermitian: max deviation {herm_dev:.3e}"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > DM_TOL || trace.im.abs() > DM_TOL {
            return Err(SimError::Contract(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let min_eig = entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < PSD_SLACK {
            return Err(SimError::Contract(format!(
                "matrix is not PSD: min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Outer product `|s⟩⟨s|` of a pure state.
pub fn pure_to_dm(state: &PureState) -> Result<DensityMatrix> {
    if state.n_qubits() > MAX_DM_QUBITS {
        return Err(SimError::Capacity {
            requested: state.n_qubits(),
            max: MAX_DM_QUBITS,
        });
    }
    let dim = state.dim();
    let amps = state.amplitudes();
    let mut entries = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            entries[(i, j)] = amps[i] * amps[j].conj();
        }
    }
    DensityMatrix::new(state.n_qubits(), entries)
}

/// Conjugate a density matrix by a gate on the given targets: `UρU†`.
pub fn apply_unitary_to_dm(
    dm: &DensityMatrix,
    gate: &Gate,
    targets: &[usize],
) -> Result<DensityMatrix> {
    let u = embed_unitary(dm.n_qubits(), gate, targets)?;
    let rotated = &u * dm.entries() * u.adjoint();
    DensityMatrix::new(dm.n_qubits(), rotated)
}

/// Fidelity `F = √(⟨φ|ρ|φ⟩)` between a pure reference and a density matrix.
///
/// The quadratic form is clamped to `[0, 1]` with slack `1e-10` before the
/// square root to absorb rounding.
pub fn fidelity_pure_dm(phi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if phi.n_qubits() != rho.n_qubits() {
        return Err(SimError::InvalidArgument(format!(
            "qubit count mismatch: state has {}, density matrix has {}",
            phi.n_qubits(),
            rho.n_qubits()
        )));
    }
    let v = nalgebra::DVector::from_column_slice(phi.amplitudes());
    let form = (v.adjoint() * rho.entries() * &v)[(0, 0)].re;
    Ok(form.clamp(0.0, 1.0).sqrt())
}
