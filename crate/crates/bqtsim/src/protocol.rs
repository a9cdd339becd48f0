//! Bi-directional teleportation of GHZ-like states over a four-qubit
//! cluster channel.
//!
//! Both parties hold an n-qubit GHZ-like state `c0|0...0⟩ + c1|1...1⟩`. Each
//! reduces it to a single carrier qubit with a CNOT cascade, measures the
//! carrier together with its half of the channel in the Bell basis, sends
//! the outcome to the other side, applies the resulting Pauli correction,
//! and rebuilds the n-qubit state from the corrected qubit plus fresh `|0⟩`
//! ancillas.
//!
//! # Qubit possession
//!
//! The cluster channel `½(|0000⟩+|0011⟩+|1100⟩+|1111⟩)` on wires
//! `(a1, a2, b1, b2)` factorizes as `Bell(a1,a2) ⊗ Bell(b1,b2)`. For the
//! protocol to transfer states *between* the parties, **Alice holds
//! `{A wires, a1, b2}` and Bob holds `{B wires, b1, a2}`** — Alice's Bell
//! measurement on `(A1, a1)` lands her input on `a2` (Bob's side), and
//! symmetrically for Bob. The `a`/`b` wire names suggest otherwise, but the
//! algebra of the sixteen collapse states forces this assignment.
//!
//! # Correction table
//!
//! Corrections are derived from the single-qubit Bell decomposition applied
//! independently per direction (`Φ+→I, Ψ+→X, Φ−→Z, Ψ−→ZX`). The
//! multi-qubit summary table published alongside the protocol is internally
//! inconsistent — its third column swaps the carrier labels, and some rows
//! attach an error to the wrong factor relative to the collapse-state list —
//! so it is deliberately not transcribed; the exhaustive branch enumeration
//! cross-checks the decomposition instead.

use crate::error::{Result, SimError};
use crate::gate::{apply_gate, Gate};
use crate::measure::{force_branch, measure, Projector};
use crate::rng::SimRng;
use crate::state::{check_capacity, PureState};
use crate::C64;

/// Residual amplitude allowed on reduced ancilla wires.
const REDUCTION_TOL: f64 = 1e-12;

/// Residual amplitude allowed on reconstruction ancillas.
const ANCILLA_TOL: f64 = 1e-9;

/// One party's input: the n-qubit state `c0|0...0⟩ + c1|1...1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzLikeSpec {
    n: usize,
    c0: C64,
    c1: C64,
}

impl GhzLikeSpec {
    pub fn new(n: usize, c0: C64, c1: C64) -> Result<Self> {
        if n == 0 {
            return Err(SimError::InvalidArgument(
                "GHZ-like state needs at least one qubit".into(),
            ));
        }
        check_capacity(n)?;
        if ![c0.re, c0.im, c1.re, c1.im].iter().all(|x| x.is_finite()) {
            return Err(SimError::InvalidArgument(
                "coefficients must be finite".into(),
            ));
        }
        let norm_sq = c0.norm_sqr() + c1.norm_sqr();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(SimError::InvalidArgument(format!(
                "coefficients are not normalized: |c0|²+|c1|² = {norm_sq}"
            )));
        }
        Ok(Self { n, c0, c1 })
    }

    /// The maximally entangled case `c0 = c1 = 1/√2`.
    pub fn ghz(n: usize) -> Result<Self> {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(n, s, s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c0(&self) -> C64 {
        self.c0
    }

    pub fn c1(&self) -> C64 {
        self.c1
    }

    /// The single-qubit carrier `c0|0⟩ + c1|1⟩`.
    pub fn carrier(&self) -> PureState {
        PureState::from_propagated(1, vec![self.c0, self.c1])
    }
}

/// The four Bell-measurement outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn index(self) -> usize {
        match self {
            BellOutcome::PhiPlus => 0,
            BellOutcome::PhiMinus => 1,
            BellOutcome::PsiPlus => 2,
            BellOutcome::PsiMinus => 3,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| SimError::InvalidArgument(format!("bad Bell outcome index {i}")))
    }
}

impl std::fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PsiMinus => "psi-",
        };
        f.write_str(s)
    }
}

/// Pauli word a receiver applies to its corrected qubit.
///
/// `Zx` is the ordered word ZX: X first, then Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionOp {
    I,
    X,
    Z,
    Zx,
}

impl CorrectionOp {
    pub fn apply(self, state: &PureState, wire: usize) -> Result<PureState> {
        match self {
            CorrectionOp::I => Ok(state.clone()),
            CorrectionOp::X => apply_gate(state, &Gate::x(), &[wire]),
            CorrectionOp::Z => apply_gate(state, &Gate::z(), &[wire]),
            CorrectionOp::Zx => {
                let flipped = apply_gate(state, &Gate::x(), &[wire])?;
                apply_gate(&flipped, &Gate::z(), &[wire])
            }
        }
    }
}

impl std::fmt::Display for CorrectionOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CorrectionOp::I => "I",
            CorrectionOp::X => "X",
            CorrectionOp::Z => "Z",
            CorrectionOp::Zx => "ZX",
        };
        f.write_str(s)
    }
}

/// Role-to-index map for the joint register.
///
/// Layout: Alice's inputs first, then Bob's inputs, then the channel wires
/// `a1, a2, b1, b2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WireMap {
    n_alice: usize,
    n_bob: usize,
}

impl WireMap {
    pub fn new(n_alice: usize, n_bob: usize) -> Self {
        Self { n_alice, n_bob }
    }

    pub fn total(&self) -> usize {
        self.n_alice + self.n_bob + 4
    }

    pub fn alice_input(&self, i: usize) -> usize {
        debug_assert!(i < self.n_alice);
        i
    }

    pub fn bob_input(&self, i: usize) -> usize {
        debug_assert!(i < self.n_bob);
        self.n_alice + i
    }

    pub fn alice_wires(&self) -> Vec<usize> {
        (0..self.n_alice).collect()
    }

    pub fn bob_wires(&self) -> Vec<usize> {
        (self.n_alice..self.n_alice + self.n_bob).collect()
    }

    pub fn a1(&self) -> usize {
        self.n_alice + self.n_bob
    }

    pub fn a2(&self) -> usize {
        self.n_alice + self.n_bob + 1
    }

    pub fn b1(&self) -> usize {
        self.n_alice + self.n_bob + 2
    }

    pub fn b2(&self) -> usize {
        self.n_alice + self.n_bob + 3
    }
}

/// Record of one protocol run.
#[derive(Clone, Copy, Debug)]
pub struct Transcript {
    pub alice_outcome: BellOutcome,
    pub bob_outcome: BellOutcome,
    /// Applied by Alice to wire `b2` after hearing Bob's outcome.
    pub alice_correction: CorrectionOp,
    /// Applied by Bob to wire `a2` after hearing Alice's outcome.
    pub bob_correction: CorrectionOp,
    /// Overlap of Bob's reconstructed register with Alice's original.
    pub fidelity_alice_to_bob: f64,
    /// Overlap of Alice's reconstructed register with Bob's original.
    pub fidelity_bob_to_alice: f64,
    pub branch_probability: f64,
}

/// One forced branch from [`enumerate_branches`].
#[derive(Clone, Copy, Debug)]
pub struct BranchTranscript {
    pub transcript: Transcript,
    /// `|⟨analytic collapse | simulated collapse⟩|` on `(a2, b2)` before the
    /// corrections are applied.
    pub collapse_overlap: f64,
}

/// Build `c0|0...0⟩ + c1|1...1⟩` on `spec.n` qubits.
pub fn make_ghz_like(spec: &GhzLikeSpec) -> Result<PureState> {
    let dim = 1usize << spec.n;
    let mut amps = vec![C64::ZERO; dim];
    amps[0] = spec.c0;
    amps[dim - 1] = spec.c1;
    Ok(PureState::from_propagated(spec.n, amps))
}

/// The four-qubit cluster channel `½(|0000⟩+|0011⟩+|1100⟩+|1111⟩)` on wires
/// `(a1, a2, b1, b2)`.
pub fn make_cluster_channel() -> PureState {
    let h = C64::new(0.5, 0.0);
    let mut amps = vec![C64::ZERO; 16];
    for idx in [0b0000, 0b0011, 0b1100, 0b1111] {
        amps[idx] = h;
    }
    PureState::from_propagated(4, amps)
}

/// The Bell state for a given outcome, on a qubit pair.
pub fn bell_state(outcome: BellOutcome) -> PureState {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![C64::ZERO; 4];
    match outcome {
        BellOutcome::PhiPlus => {
            amps[0b00] = s;
            amps[0b11] = s;
        }
        BellOutcome::PhiMinus => {
            amps[0b00] = s;
            amps[0b11] = -s;
        }
        BellOutcome::PsiPlus => {
            amps[0b01] = s;
            amps[0b10] = s;
        }
        BellOutcome::PsiMinus => {
            amps[0b01] = s;
            amps[0b10] = -s;
        }
    }
    PureState::from_propagated(2, amps)
}

/// Rank-1 projectors onto the four Bell states, ordered like
/// [`BellOutcome::ALL`].
pub fn bell_projectors() -> Vec<Projector> {
    BellOutcome::ALL
        .iter()
        .map(|&o| Projector::onto(&bell_state(o)).expect("Bell projectors are valid"))
        .collect()
}

/// The receiver's correction for a sender's Bell outcome.
pub fn correction_for(outcome: BellOutcome) -> CorrectionOp {
    match outcome {
        BellOutcome::PhiPlus => CorrectionOp::I,
        BellOutcome::PsiPlus => CorrectionOp::X,
        BellOutcome::PhiMinus => CorrectionOp::Z,
        BellOutcome::PsiMinus => CorrectionOp::Zx,
    }
}

/// Collapse a GHZ-like register onto its first wire.
///
/// Applies CNOTs with `wires[0]` as control so that `wires[0]` carries
/// `c0|0⟩ + c1|1⟩` and every other listed wire is exactly `|0⟩`. Inputs whose
/// restriction to `wires` lies outside `span{|0...0⟩, |1...1⟩}` leave weight
/// on the ancilla wires and are rejected by the post-check.
pub fn reduction_circuit(state: &PureState, wires: &[usize]) -> Result<PureState> {
    validate_wires(state, wires)?;
    let control = wires[0];
    let mut out = state.clone();
    for &target in wires[1..].iter().rev() {
        out = apply_gate(&out, &Gate::cnot(), &[control, target])?;
    }
    let residual = max_amplitude_on(&out, &wires[1..]);
    if residual >= REDUCTION_TOL {
        return Err(SimError::Precondition(format!(
            "input is not GHZ-like on the given wires: residual amplitude {residual:.3e} after reduction"
        )));
    }
    Ok(out)
}

/// Inverse of [`reduction_circuit`]: spread `wire` onto `|0⟩` ancillas.
pub fn reconstruction_circuit(
    state: &PureState,
    wire: usize,
    ancillas: &[usize],
) -> Result<PureState> {
    let mut all = vec![wire];
    all.extend_from_slice(ancillas);
    validate_wires(state, &all)?;
    let residual = max_amplitude_on(state, ancillas);
    if residual >= ANCILLA_TOL {
        return Err(SimError::Precondition(format!(
            "ancilla wires are not |0⟩: residual amplitude {residual:.3e}"
        )));
    }
    let mut out = state.clone();
    for &target in ancillas {
        out = apply_gate(&out, &Gate::cnot(), &[wire, target])?;
    }
    Ok(out)
}

/// Analytic post-measurement state of the channel pair `(a2, b2)` for a
/// given pair of Bell outcomes, before any correction.
///
/// Each factor is the sender's carrier hit by the Pauli error matching the
/// outcome; the `a2` factor carries Alice's coefficients, the `b2` factor
/// Bob's. The sixteen cases are pinned against the published collapse-state
/// list in the branch-enumeration tests.
pub fn collapsed_pair_state(
    alice_outcome: BellOutcome,
    bob_outcome: BellOutcome,
    alice: &GhzLikeSpec,
    bob: &GhzLikeSpec,
) -> PureState {
    let a = collapsed_factor(alice_outcome, alice.c0, alice.c1);
    let b = collapsed_factor(bob_outcome, bob.c0, bob.c1);
    a.kron(&b).expect("two qubits fit")
}

fn collapsed_factor(outcome: BellOutcome, c0: C64, c1: C64) -> PureState {
    let amps = match outcome {
        BellOutcome::PhiPlus => vec![c0, c1],
        BellOutcome::PhiMinus => vec![c0, -c1],
        BellOutcome::PsiPlus => vec![c1, c0],
        BellOutcome::PsiMinus => vec![-c1, c0],
    };
    PureState::from_propagated(1, amps)
}

/// Run the full protocol once, sampling both Bell measurements.
pub fn run_bqt(alice: &GhzLikeSpec, bob: &GhzLikeSpec, rng: &mut SimRng) -> Result<Transcript> {
    let (state, wires) = prepare(alice, bob)?;
    let bell = bell_projectors();
    let (ai, pa, state) = measure(&state, &bell, &[wires.alice_input(0), wires.a1()], rng)?;
    let (bi, pb, state) = measure(&state, &bell, &[wires.bob_input(0), wires.b1()], rng)?;
    finish(
        state,
        BellOutcome::from_index(ai)?,
        BellOutcome::from_index(bi)?,
        pa * pb,
        alice,
        bob,
        &wires,
    )
}

/// Force every one of the sixteen `(Alice, Bob)` outcome pairs in turn.
pub fn enumerate_branches(alice: &GhzLikeSpec, bob: &GhzLikeSpec) -> Result<Vec<BranchTranscript>> {
    let (state, wires) = prepare(alice, bob)?;
    let bell = bell_projectors();
    let alice_targets = [wires.alice_input(0), wires.a1()];
    let bob_targets = [wires.bob_input(0), wires.b1()];
    let mut out = Vec::with_capacity(16);
    for ao in BellOutcome::ALL {
        let (pa, after_alice) = force_branch(&state, &bell, &alice_targets, ao.index())?;
        for bo in BellOutcome::ALL {
            let (pb, after_both) = force_branch(&after_alice, &bell, &bob_targets, bo.index())?;
            let simulated = factor_subsystem(&after_both, &[wires.a2(), wires.b2()])?;
            let analytic = collapsed_pair_state(ao, bo, alice, bob);
            let collapse_overlap = analytic.overlap(&simulated)?;
            let transcript = finish(after_both, ao, bo, pa * pb, alice, bob, &wires)?;
            out.push(BranchTranscript {
                transcript,
                collapse_overlap,
            });
        }
    }
    Ok(out)
}

fn prepare(alice: &GhzLikeSpec, bob: &GhzLikeSpec) -> Result<(PureState, WireMap)> {
    let wires = WireMap::new(alice.n, bob.n);
    check_capacity(wires.total())?;
    let joint = make_ghz_like(alice)?
        .kron(&make_ghz_like(bob)?)?
        .kron(&make_cluster_channel())?;
    let joint = reduction_circuit(&joint, &wires.alice_wires())?;
    let joint = reduction_circuit(&joint, &wires.bob_wires())?;
    Ok((joint, wires))
}

fn finish(
    state: PureState,
    alice_outcome: BellOutcome,
    bob_outcome: BellOutcome,
    branch_probability: f64,
    alice: &GhzLikeSpec,
    bob: &GhzLikeSpec,
    wires: &WireMap,
) -> Result<Transcript> {
    let bob_correction = correction_for(alice_outcome);
    let alice_correction = correction_for(bob_outcome);
    let state = bob_correction.apply(&state, wires.a2())?;
    let state = alice_correction.apply(&state, wires.b2())?;

    let alpha_qubit = factor_subsystem(&state, &[wires.a2()])?;
    let beta_qubit = factor_subsystem(&state, &[wires.b2()])?;

    let bob_register = rebuild_register(&alpha_qubit, alice.n)?;
    let alice_register = rebuild_register(&beta_qubit, bob.n)?;

    let fidelity_alice_to_bob = bob_register.overlap(&make_ghz_like(alice)?)?;
    let fidelity_bob_to_alice = alice_register.overlap(&make_ghz_like(bob)?)?;

    Ok(Transcript {
        alice_outcome,
        bob_outcome,
        alice_correction,
        bob_correction,
        fidelity_alice_to_bob,
        fidelity_bob_to_alice,
        branch_probability,
    })
}

fn rebuild_register(carrier: &PureState, n: usize) -> Result<PureState> {
    if n == 1 {
        return Ok(carrier.clone());
    }
    let full = carrier.kron(&PureState::zeros(n - 1)?)?;
    let ancillas: Vec<usize> = (1..n).collect();
    reconstruction_circuit(&full, 0, &ancillas)
}

/// Extract the pure state of an unentangled subsystem.
///
/// Computes the reduced density matrix on `wires` and reads off its
/// dominant column; fails if the subsystem is entangled with the rest
/// (purity below `1 − 1e-9`). The extracted state is defined up to a global
/// phase.
pub fn factor_subsystem(state: &PureState, wires: &[usize]) -> Result<PureState> {
    validate_wires(state, wires)?;
    let n = state.n_qubits();
    let k = wires.len();
    let kept_dim = 1usize << k;
    let rest: Vec<usize> = (0..n).filter(|q| !wires.contains(q)).collect();
    let rest_dim = 1usize << rest.len();

    let kept_offsets: Vec<usize> = (0..kept_dim)
        .map(|x| {
            let mut off = 0usize;
            for (t, &q) in wires.iter().enumerate() {
                if (x >> (k - 1 - t)) & 1 == 1 {
                    off |= state.mask_of(q);
                }
            }
            off
        })
        .collect();

    let amps = state.amplitudes();
    let mut rho = vec![C64::ZERO; kept_dim * kept_dim];
    let mut v = vec![C64::ZERO; kept_dim];
    for r in 0..rest_dim {
        let mut rest_off = 0usize;
        for (t, &q) in rest.iter().enumerate() {
            if (r >> (rest.len() - 1 - t)) & 1 == 1 {
                rest_off |= state.mask_of(q);
            }
        }
        for (x, &koff) in kept_offsets.iter().enumerate() {
            v[x] = amps[rest_off | koff];
        }
        for x in 0..kept_dim {
            for y in 0..kept_dim {
                rho[x * kept_dim + y] += v[x] * v[y].conj();
            }
        }
    }

    let purity: f64 = rho.iter().map(|e| e.norm_sqr()).sum();
    if (purity - 1.0).abs() > 1e-9 {
        return Err(SimError::Precondition(format!(
            "subsystem is entangled with the rest: purity {purity}"
        )));
    }

    // Rank-1 ρ = |v⟩⟨v|: any column with non-vanishing diagonal is v up to
    // scale, so take the strongest one and normalize.
    let best = (0..kept_dim)
        .max_by(|&a, &b| rho[a * kept_dim + a].re.total_cmp(&rho[b * kept_dim + b].re))
        .unwrap();
    let mut column: Vec<C64> = (0..kept_dim).map(|x| rho[x * kept_dim + best]).collect();
    let norm: f64 = column.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut column {
        *a /= norm;
    }
    Ok(PureState::from_propagated(k, column))
}

fn max_amplitude_on(state: &PureState, wires: &[usize]) -> f64 {
    if wires.is_empty() {
        return 0.0;
    }
    let mask: usize = wires.iter().map(|&q| state.mask_of(q)).sum();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm())
        .fold(0.0, f64::max)
}

fn validate_wires(state: &PureState, wires: &[usize]) -> Result<()> {
    if wires.is_empty() {
        return Err(SimError::InvalidArgument("empty wire list".into()));
    }
    for (i, &q) in wires.iter().enumerate() {
        if q >= state.n_qubits() || wires[..i].contains(&q) {
            return Err(SimError::InvalidArgument(format!("bad wire index {q}")));
        }
    }
    Ok(())
}
