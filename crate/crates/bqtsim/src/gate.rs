//! Unitary gates and their application to dense states.

use nalgebra::DMatrix;

use crate::error::{Result, SimError};
use crate::state::PureState;
use crate::C64;

/// Unitarity tolerance: ‖G·G† − I‖_max must stay below this.
pub const UNITARY_TOL: f64 = 1e-12;

/// A unitary on one to three qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    arity: usize,
    matrix: DMatrix<C64>,
}

impl Gate {
    /// Validate and wrap a `2^arity × 2^arity` unitary matrix.
    pub fn from_matrix(arity: usize, matrix: DMatrix<C64>) -> Result<Self> {
        if !(1..=3).contains(&arity) {
            return Err(SimError::InvalidArgument(format!(
                "gate arity must be 1..=3, got {arity}"
            )));
        }
        let dim = 1 << arity;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(SimError::InvalidArgument(format!(
                "gate matrix must be {dim}x{dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::InvalidArgument("gate entries must be finite".into()));
        }
        let gg = &matrix * matrix.adjoint();
        let id = DMatrix::<C64>::identity(dim, dim);
        let dev = (&gg - &id).iter().map(|a| a.norm()).fold(0.0, f64::max);
        if dev > UNITARY_TOL {
            return Err(SimError::InvalidArgument(format!(
                "matrix is not unitary: max |G·G† − I| = {dev:.3e}"
            )));
        }
        Ok(Self { arity, matrix })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn identity() -> Self {
        Self {
            arity: 1,
            matrix: DMatrix::identity(2, 2),
        }
    }

    pub fn x() -> Self {
        Self::single([
            [C64::ZERO, C64::ONE],
            [C64::ONE, C64::ZERO],
        ])
    }

    pub fn y() -> Self {
        Self::single([
            [C64::ZERO, -C64::I],
            [C64::I, C64::ZERO],
        ])
    }

    pub fn z() -> Self {
        Self::single([
            [C64::ONE, C64::ZERO],
            [C64::ZERO, -C64::ONE],
        ])
    }

    pub fn hadamard() -> Self {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::single([[s, s], [s, -s]])
    }

    /// CNOT with the first target qubit as control, second as target.
    pub fn cnot() -> Self {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 0)] = C64::ONE;
        m[(1, 1)] = C64::ONE;
        m[(2, 3)] = C64::ONE;
        m[(3, 2)] = C64::ONE;
        Self { arity: 2, matrix: m }
    }

    /// Toffoli: first two target qubits control, third is flipped.
    pub fn toffoli() -> Self {
        let mut m = DMatrix::<C64>::identity(8, 8);
        m[(6, 6)] = C64::ZERO;
        m[(7, 7)] = C64::ZERO;
        m[(6, 7)] = C64::ONE;
        m[(7, 6)] = C64::ONE;
        Self { arity: 3, matrix: m }
    }

    fn single(rows: [[C64; 2]; 2]) -> Self {
        Self {
            arity: 1,
            matrix: DMatrix::from_row_slice(2, 2, &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]]),
        }
    }
}

/// Apply `gate` to the given target qubits, identity elsewhere.
///
/// `targets[0]` is the most significant qubit of the gate's local basis, so
/// `apply_gate(s, &Gate::cnot(), &[c, t])` is a CNOT with control `c`.
pub fn apply_gate(state: &PureState, gate: &Gate, targets: &[usize]) -> Result<PureState> {
    let n = state.n_qubits();
    validate_targets(n, targets, gate.arity())?;
    let k = gate.arity();
    let local_dim = 1 << k;

    // Index offset contributed by each local basis pattern.
    let mut offsets = vec![0usize; local_dim];
    for (j, off) in offsets.iter_mut().enumerate() {
        for (t, &q) in targets.iter().enumerate() {
            if (j >> (k - 1 - t)) & 1 == 1 {
                *off |= state.mask_of(q);
            }
        }
    }
    let target_mask: usize = targets.iter().map(|&q| state.mask_of(q)).sum();

    let amps = state.amplitudes();
    let mut out = vec![C64::ZERO; state.dim()];
    let m = gate.matrix();
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
            for (cidx, &vj) in v.iter().enumerate() {
                acc += m[(r, cidx)] * vj;
            }
            out[base | off_r] = acc;
        }
    }
    Ok(PureState::from_propagated(n, out))
}

/// Dense `2^n × 2^n` unitary embedding `gate` on `targets`.
///
/// Used by the density-matrix path; kept quadratic in the full dimension, so
/// only suitable for small registers.
pub fn embed_unitary(n_qubits: usize, gate: &Gate, targets: &[usize]) -> Result<DMatrix<C64>> {
    validate_targets(n_qubits, targets, gate.arity())?;
    let dim = 1usize << n_qubits;
    let k = gate.arity();
    let target_mask: usize = targets
        .iter()
        .map(|&q| 1usize << (n_qubits - 1 - q))
        .sum();
    let local = |i: usize| -> usize {
        let mut l = 0usize;
        for (t, &q) in targets.iter().enumerate() {
            l |= ((i >> (n_qubits - 1 - q)) & 1) << (k - 1 - t);
        }
        l
    };
    let m = gate.matrix();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        let li = local(i);
        let rest = i & !target_mask;
        for lj in 0..(1 << k) {
            let entry = m[(li, lj)];
            if entry == C64::ZERO {
                continue;
            }
            // Rebuild the column index with the same non-target bits.
            let mut j = rest;
            for (t, &q) in targets.iter().enumerate() {
                if (lj >> (k - 1 - t)) & 1 == 1 {
                    j |= 1 << (n_qubits - 1 - q);
                }
            }
            out[(i, j)] = entry;
        }
    }
    Ok(out)
}

fn validate_targets(n_qubits: usize, targets: &[usize], arity: usize) -> Result<()> {
    if targets.len() != arity {
        return Err(SimError::InvalidArgument(format!(
            "gate arity {arity} does not match {} targets",
            targets.len()
        )));
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= n_qubits {
            return Err(SimError::InvalidArgument(format!(
                "target qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        if targets[..i].contains(&q) {
            return Err(SimError::InvalidArgument(format!(
                "repeated target qubit {q}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    #[test]
    fn library_gates_are_unitary() {
        for g in [
            Gate::identity(),
            Gate::x(),
            Gate::y(),
            Gate::z(),
            Gate::hadamard(),
            Gate::cnot(),
            Gate::toffoli(),
        ] {
            let dim = 1 << g.arity();
            let gg = g.matrix() * g.matrix().adjoint();
            let id = DMatrix::<C64>::identity(dim, dim);
            let dev = (&gg - &id).iter().map(|a| a.norm()).fold(0.0, f64::max);
            assert!(dev < UNITARY_TOL, "gate deviates by {dev:.3e}");
        }
    }

    #[test]
    fn x_flips_basis() {
        let s = PureState::basis(1, 0).unwrap();
        let out = apply_gate(&s, &Gate::x(), &[0]).unwrap();
        assert_eq!(out.amplitudes()[1], C64::ONE);
    }

    #[test]
    fn cnot_on_basis() {
        // CNOT(control=0, target=1) on |10⟩ → |11⟩
        let s = PureState::basis(2, 0b10).unwrap();
        let out = apply_gate(&s, &Gate::cnot(), &[0, 1]).unwrap();
        assert_eq!(out.amplitudes()[0b11], C64::ONE);
    }

    #[test]
    fn toffoli_fires_only_when_both_controls_set() {
        let s = PureState::basis(3, 0b110).unwrap();
        let out = apply_gate(&s, &Gate::toffoli(), &[0, 1, 2]).unwrap();
        assert_eq!(out.amplitudes()[0b111], C64::ONE);
        let s = PureState::basis(3, 0b100).unwrap();
        let out = apply_gate(&s, &Gate::toffoli(), &[0, 1, 2]).unwrap();
        assert_eq!(out.amplitudes()[0b100], C64::ONE);
    }

    #[test]
    fn rejects_bad_targets() {
        let s = PureState::basis(2, 0).unwrap();
        assert!(apply_gate(&s, &Gate::cnot(), &[0, 0]).is_err());
        assert!(apply_gate(&s, &Gate::cnot(), &[0, 2]).is_err());
        assert!(apply_gate(&s, &Gate::x(), &[0, 1]).is_err());
    }

    #[test]
    fn rejects_non_unitary_matrix() {
        let m = DMatrix::<C64>::from_row_slice(2, 2, &[C64::ONE, C64::ONE, C64::ZERO, C64::ONE]);
        assert!(Gate::from_matrix(1, m).is_err());
    }

    #[test]
    fn matches_embedded_unitary_on_random_states() {
        // Dense oracle: apply_gate must agree entrywise with multiplication
        // by the embedded full unitary for n ≤ 4.
        let mut rng = SimRng::seeded(17);
        let gates = [Gate::x(), Gate::hadamard(), Gate::cnot(), Gate::toffoli()];
        for n in 1..=4usize {
            for gate in gates.iter().filter(|g| g.arity() <= n) {
                for _ in 0..20 {
                    let s = PureState::random(n, &mut rng).unwrap();
                    let targets = random_targets(n, gate.arity(), &mut rng);
                    let fast = apply_gate(&s, gate, &targets).unwrap();
                    let u = embed_unitary(n, gate, &targets).unwrap();
                    let vec = nalgebra::DVector::from_column_slice(s.amplitudes());
                    let expect = &u * vec;
                    for (a, b) in fast.amplitudes().iter().zip(expect.iter()) {
                        assert!((a - b).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn norm_preserved_over_random_applications() {
        let mut rng = SimRng::seeded(23);
        let gates = [Gate::x(), Gate::y(), Gate::z(), Gate::hadamard(), Gate::cnot(), Gate::toffoli()];
        for _ in 0..1000 {
            let n = 1 + (rng.next_f64() * 5.0) as usize;
            let usable: Vec<&Gate> = gates.iter().filter(|g| g.arity() <= n).collect();
            let gate = usable[(rng.next_f64() * usable.len() as f64) as usize];
            let s = PureState::random(n, &mut rng).unwrap();
            let targets = random_targets(n, gate.arity(), &mut rng);
            let out = apply_gate(&s, gate, &targets).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
    }

    fn random_targets(n: usize, k: usize, rng: &mut SimRng) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let i = (rng.next_f64() * pool.len() as f64) as usize;
            out.push(pool.remove(i.min(pool.len() - 1)));
        }
        out
    }
}
