//! Dense pure states over a register of qubits.
//!
//! Amplitudes are stored with qubit 0 as the most significant bit of the
//! basis index (see the crate-level docs). Construction enforces
//! normalization to within [`CONSTRUCTION_TOL`]; operations elsewhere in the
//! crate preserve the norm to within [`PROPAGATION_TOL`].

use crate::error::{Result, SimError};
use crate::rng::SimRng;
use crate::C64;

/// Hard capacity for dense simulation: at most 2^26 amplitudes.
pub const MAX_QUBITS: usize = 26;

/// Norm tolerance accepted on user-supplied amplitudes.
pub const CONSTRUCTION_TOL: f64 = 1e-9;

/// Norm tolerance required of internally propagated states.
pub const PROPAGATION_TOL: f64 = 1e-12;

/// A normalized state vector on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Build a state from explicit amplitudes.
    ///
    /// Fails if the length is not `2^n_qubits`, any entry is non-finite, or
    /// the squared norm deviates from 1 by more than [`CONSTRUCTION_TOL`].
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_capacity(n_qubits)?;
        if n_qubits == 0 {
            return Err(SimError::InvalidArgument(
                "state must have at least one qubit".into(),
            ));
        }
        if amplitudes.len() != 1 << n_qubits {
            return Err(SimError::InvalidArgument(format!(
                "expected 2^{} = {} amplitudes, got {}",
                n_qubits,
                1usize << n_qubits,
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::InvalidArgument(
                "amplitudes must be finite".into(),
            ));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(SimError::InvalidArgument(format!(
                "state is not normalized: |norm^2 - 1| = {:.3e}",
                (norm_sq - 1.0).abs()
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        if n_qubits == 0 || index >= 1 << n_qubits {
            return Err(SimError::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![C64::ZERO; 1 << n_qubits];
        amplitudes[index] = C64::ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// `|0...0⟩` on `n_qubits` qubits.
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Haar-ish random state: complex-normal amplitudes, renormalized.
    pub fn random(n_qubits: usize, rng: &mut SimRng) -> Result<Self> {
        check_capacity(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amplitudes = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (a, b) = gauss_pair(rng);
            amplitudes.push(C64::new(a, b));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    // Internal constructor for amplitudes produced by norm-preserving ops.
    pub(crate) fn from_propagated(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.n_qubits != other.n_qubits {
            return Err(SimError::InvalidArgument(format!(
                "qubit count mismatch: {} vs {}",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|` — the phase-insensitive overlap used for state
    /// comparison throughout the protocol layer.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Bit of qubit `qubit` within basis index `index`.
    #[inline]
    pub fn bit_of(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.n_qubits - 1 - qubit)) & 1
    }

    /// Index mask selecting qubit `qubit`.
    #[inline]
    pub fn mask_of(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Tensor product; qubit indices of `self` precede those of `other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        check_capacity(n)?;
        let mut amplitudes = vec![C64::ZERO; 1 << n];
        let dim_b = other.dim();
        for (ia, &a) in self.amplitudes.iter().enumerate() {
            if a == C64::ZERO {
                continue;
            }
            let base = ia * dim_b;
            for (ib, &b) in other.amplitudes.iter().enumerate() {
                amplitudes[base + ib] = a * b;
            }
        }
        Ok(Self::from_propagated(n, amplitudes))
    }

    /// Relabel qubits: the amplitude carried by qubit `k` moves to qubit
    /// `permutation[k]`. Applying the inverse permutation restores the
    /// original state exactly.
    pub fn permute_qubits(&self, permutation: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        if permutation.len() != n {
            return Err(SimError::InvalidArgument(format!(
                "permutation length {} does not match {} qubits",
                permutation.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &p in permutation {
            if p >= n || seen[p] {
                return Err(SimError::InvalidArgument(
                    "permutation is not a bijection on qubit indices".into(),
                ));
            }
            seen[p] = true;
        }
        let mut amplitudes = vec![C64::ZERO; self.dim()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let mut j = 0usize;
            for (k, &p) in permutation.iter().enumerate() {
                let bit = (i >> (n - 1 - k)) & 1;
                j |= bit << (n - 1 - p);
            }
            amplitudes[j] = a;
        }
        Ok(Self::from_propagated(n, amplitudes))
    }
}

pub(crate) fn check_capacity(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(SimError::Capacity {
            requested: n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

// Box-Muller; two independent standard normals.
fn gauss_pair(rng: &mut SimRng) -> (f64, f64) {
    let u1 = rng.next_f64().max(f64::MIN_POSITIVE);
    let u2 = rng.next_f64();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn basis_kron_places_amplitude() {
        // |0⟩ ⊗ |1⟩ = |01⟩
        let a = PureState::basis(1, 0).unwrap();
        let b = PureState::basis(1, 1).unwrap();
        let ab = a.kron(&b).unwrap();
        assert_eq!(ab.n_qubits(), 2);
        assert_eq!(ab.amplitudes()[1], C64::ONE);
        assert_eq!(ab.amplitudes().iter().filter(|&&x| x != C64::ZERO).count(), 1);
    }

    #[test]
    fn superposition_kron_basis() {
        // (|0⟩+|1⟩)/√2 ⊗ |0⟩ = (|00⟩+|10⟩)/√2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(1, vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let zero = PureState::basis(1, 0).unwrap();
        let out = plus.kron(&zero).unwrap();
        assert!((out.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((out.amplitudes()[2].re - s).abs() < 1e-15);
        assert!(out.amplitudes()[1].norm() < 1e-15);
        assert!(out.amplitudes()[3].norm() < 1e-15);
    }

    #[test]
    fn kron_capacity_error() {
        let a = PureState::zeros(13).unwrap();
        let b = PureState::zeros(14).unwrap();
        match a.kron(&b) {
            Err(SimError::Capacity { requested: 27, max: 26 }) => {}
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unnormalized_and_nonfinite() {
        assert!(PureState::new(1, vec![c(1.0, 0.0), c(0.1, 0.0)]).is_err());
        assert!(PureState::new(1, vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
        assert!(PureState::new(2, vec![C64::ONE; 3]).is_err());
    }

    #[test]
    fn permute_swap_and_identity() {
        // swap on |01⟩ → |10⟩
        let s = PureState::basis(2, 1).unwrap();
        let swapped = s.permute_qubits(&[1, 0]).unwrap();
        assert_eq!(swapped.amplitudes()[2], C64::ONE);
        let same = s.permute_qubits(&[0, 1]).unwrap();
        assert_eq!(same, s);
    }

    #[test]
    fn permute_round_trip_random() {
        let mut rng = SimRng::seeded(5);
        let s = PureState::random(4, &mut rng).unwrap();
        let perm = [2usize, 0, 3, 1];
        let mut inv = [0usize; 4];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let back = s.permute_qubits(&perm).unwrap().permute_qubits(&inv).unwrap();
        for (a, b) in s.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn permute_rejects_non_bijection() {
        let s = PureState::basis(2, 0).unwrap();
        assert!(s.permute_qubits(&[0, 0]).is_err());
        assert!(s.permute_qubits(&[0, 2]).is_err());
    }

    #[test]
    fn random_state_is_normalized() {
        let mut rng = SimRng::seeded(9);
        for n in 1..=6 {
            let s = PureState::random(n, &mut rng).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }
}
