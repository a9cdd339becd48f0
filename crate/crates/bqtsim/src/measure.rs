//! Projectors and projective measurement on a subset of qubits.

use nalgebra::DMatrix;

use crate::error::{Result, SimError};
use crate::rng::SimRng;
use crate::state::PureState;
use crate::C64;

/// Tolerance for projector algebra (Hermiticity, idempotence).
pub const PROJECTOR_TOL: f64 = 1e-12;

/// Tolerance for completeness of a projector set.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Probability below which a branch is treated as impossible.
pub const BRANCH_EPS: f64 = 1e-12;

/// A Hermitian idempotent on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    n_qubits: usize,
    matrix: DMatrix<C64>,
}

impl Projector {
    /// Validate `P = P† = P²` and wrap.
    pub fn from_matrix(n_qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(SimError::InvalidArgument(format!(
                "projector must be {dim}x{dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = (&matrix - matrix.adjoint())
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        if herm > PROJECTOR_TOL {
            return Err(SimError::InvalidArgument(format!(
                "projector is not Hermitian: max deviation {herm:.3e}"
            )));
        }
        let idem = (&matrix * &matrix - &matrix)
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        if idem > PROJECTOR_TOL {
            return Err(SimError::InvalidArgument(format!(
                "projector is not idempotent: max |P² − P| = {idem:.3e}"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Rank-1 projector `|s⟩⟨s|` onto a pure state.
    pub fn onto(state: &PureState) -> Result<Self> {
        let dim = state.dim();
        let amps = state.amplitudes();
        let mut matrix = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                matrix[(i, j)] = amps[i] * amps[j].conj();
            }
        }
        Self::from_matrix(state.n_qubits(), matrix)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

/// Projective measurement of `targets` in the resolution given by
/// `projectors`, sampling the outcome with Born probabilities.
///
/// Returns `(outcome index, outcome probability, collapsed state)`. The
/// projector set must be mutually orthogonal and sum to the identity on the
/// measured subspace (within [`COMPLETENESS_TOL`]).
pub fn measure(
    state: &PureState,
    projectors: &[Projector],
    targets: &[usize],
    rng: &mut SimRng,
) -> Result<(usize, f64, PureState)> {
    let probs = branch_probabilities(state, projectors, targets)?;
    let u = rng.next_f64();
    let mut acc = 0.0;
    let mut outcome = probs.len() - 1;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            outcome = i;
            break;
        }
    }
    // Guard against landing on a zero-probability tail through rounding.
    if probs[outcome] < BRANCH_EPS {
        outcome = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
    }
    let collapsed = collapse(state, &projectors[outcome], targets, probs[outcome]);
    Ok((outcome, probs[outcome], collapsed))
}

/// Deterministically select a measurement branch.
///
/// Same contract as [`measure`], but the caller picks the outcome; an
/// outcome with probability below [`BRANCH_EPS`] is an error.
pub fn force_branch(
    state: &PureState,
    projectors: &[Projector],
    targets: &[usize],
    outcome: usize,
) -> Result<(f64, PureState)> {
    let probs = branch_probabilities(state, projectors, targets)?;
    if outcome >= probs.len() {
        return Err(SimError::InvalidArgument(format!(
            "outcome {outcome} out of range for {} projectors",
            probs.len()
        )));
    }
    let p = probs[outcome];
    if p < BRANCH_EPS {
        return Err(SimError::InvalidBranch {
            outcome,
            probability: p,
        });
    }
    Ok((p, collapse(state, &projectors[outcome], targets, p)))
}

/// Expectation `⟨ψ|P|ψ⟩` of a projector embedded on `targets`.
pub fn expectation(state: &PureState, projector: &Projector, targets: &[usize]) -> Result<f64> {
    validate_embedding(state, std::slice::from_ref(projector), targets)?;
    Ok(expectation_unchecked(state, projector, targets))
}

fn branch_probabilities(
    state: &PureState,
    projectors: &[Projector],
    targets: &[usize],
) -> Result<Vec<f64>> {
    validate_embedding(state, projectors, targets)?;
    let k = targets.len();
    let dim = 1usize << k;

    // Completeness and mutual orthogonality on the measured subspace.
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for p in projectors {
        sum += p.matrix();
    }
    let dev = (&sum - DMatrix::<C64>::identity(dim, dim))
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    if dev > COMPLETENESS_TOL {
        return Err(SimError::Contract(format!(
            "projector set does not resolve the identity: max deviation {dev:.3e}"
        )));
    }
    for (i, a) in projectors.iter().enumerate() {
        for b in &projectors[i + 1..] {
            let cross = (a.matrix() * b.matrix())
                .iter()
                .map(|x| x.norm())
                .fold(0.0, f64::max);
            if cross > COMPLETENESS_TOL {
                return Err(SimError::Contract(format!(
                    "projectors are not mutually orthogonal: max |P_iP_j| = {cross:.3e}"
                )));
            }
        }
    }

    let probs: Vec<f64> = projectors
        .iter()
        .map(|p| expectation_unchecked(state, p, targets))
        .collect();
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(SimError::Contract(format!(
            "branch probabilities sum to {total}, expected 1"
        )));
    }
    Ok(probs)
}

fn expectation_unchecked(state: &PureState, projector: &Projector, targets: &[usize]) -> f64 {
    let k = targets.len();
    let local_dim = 1usize << k;
    let offsets = local_offsets(state, targets);
    let target_mask: usize = targets.iter().map(|&q| state.mask_of(q)).sum();
    let amps = state.amplitudes();
    let m = projector.matrix();
    let mut acc = 0.0;
    let mut v = vec![C64::ZERO; local_dim];
    for base in 0..state.dim() {
        if base & target_mask != 0 {
            continue;
        }
        for (j, &off) in offsets.iter().enumerate() {
            v[j] = amps[base | off];
        }
        for r in 0..local_dim {
            let mut row = C64::ZERO;
            for (c, &vc) in v.iter().enumerate() {
                row += m[(r, c)] * vc;
            }
            acc += (v[r].conj() * row).re;
        }
    }
    acc
}

fn collapse(
    state: &PureState,
    projector: &Projector,
    targets: &[usize],
    probability: f64,
) -> PureState {
    let k = targets.len();
    let local_dim = 1usize << k;
    let offsets = local_offsets(state, targets);
    let target_mask: usize = targets.iter().map(|&q| state.mask_of(q)).sum();
    let amps = state.amplitudes();
    let m = projector.matrix();
    let scale = 1.0 / probability.sqrt();
    let mut out = vec![C64::ZERO; state.dim()];
    let mut v = vec![C64::ZERO; local_dim];
    for base in 0..state.dim() {
        if base & target_mask != 0 {
            continue;
        }
        for (j, &off) in offsets.iter().enumerate() {
            v[j] = amps[base | off];
        }
        for (r, &off_r) in offsets.iter().enumerate() {
            let mut acc = C64::ZERO;
            for (c, &vc) in v.iter().enumerate() {
                acc += m[(r, c)] * vc;
            }
            out[base | off_r] = acc * scale;
        }
    }
    PureState::from_propagated(state.n_qubits(), out)
}

fn local_offsets(state: &PureState, targets: &[usize]) -> Vec<usize> {
    let k = targets.len();
    let mut offsets = vec![0usize; 1 << k];
    for (j, off) in offsets.iter_mut().enumerate() {
        for (t, &q) in targets.iter().enumerate() {
            if (j >> (k - 1 - t)) & 1 == 1 {
                *off |= state.mask_of(q);
            }
        }
    }
    offsets
}

fn validate_embedding(
    state: &PureState,
    projectors: &[Projector],
    targets: &[usize],
) -> Result<()> {
    if projectors.is_empty() {
        return Err(SimError::InvalidArgument("empty projector set".into()));
    }
    let k = targets.len();
    if k == 0 || k > state.n_qubits() {
        return Err(SimError::InvalidArgument(format!(
            "{} measurement targets on a {}-qubit state",
            k,
            state.n_qubits()
        )));
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= state.n_qubits() || targets[..i].contains(&q) {
            return Err(SimError::InvalidArgument(format!(
                "bad measurement target {q}"
            )));
        }
    }
    for p in projectors {
        if p.n_qubits() != k {
            return Err(SimError::InvalidArgument(format!(
                "projector acts on {} qubits, expected {}",
                p.n_qubits(),
                k
            )));
        }
    }
    Ok(())
}
