//! Bell and GHZ measurements, implemented as a basis-change circuit
//! followed by computational measurement.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::statevector::{PureState, QubitLabel};

/// Outcome of a Bell measurement: the circuit CNOT(q1→q2), H(q1) maps the
/// Bell basis onto computational bits (phase, parity), so
/// 00 → Φ+, 01 → Ψ+, 10 → Φ−, 11 → Ψ−.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BellOutcome {
    pub phase_bit: u8,
    pub parity_bit: u8,
}

impl BellOutcome {
    pub fn bits(&self) -> String {
        format!("{}{}", self.phase_bit, self.parity_bit)
    }

    fn from_bits(bits: &str) -> Self {
        let b: Vec<u8> = bits.bytes().map(|c| c - b'0').collect();
        BellOutcome {
            phase_bit: b[0],
            parity_bit: b[1],
        }
    }
}

/// Outcome of a GHZ measurement: CNOT(q1→q2), CNOT(q1→q3), H(q1) followed
/// by computational measurement of (q1, q2, q3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GhzOutcome {
    pub phase_bit: u8,
    pub parity_bits: [u8; 2],
}

impl GhzOutcome {
    pub fn bits(&self) -> String {
        format!(
            "{}{}{}",
            self.phase_bit, self.parity_bits[0], self.parity_bits[1]
        )
    }

    fn from_bits(bits: &str) -> Self {
        let b: Vec<u8> = bits.bytes().map(|c| c - b'0').collect();
        GhzOutcome {
            phase_bit: b[0],
            parity_bits: [b[1], b[2]],
        }
    }
}

fn bell_circuit(state: &PureState, q1: &QubitLabel, q2: &QubitLabel) -> Result<PureState> {
    if q1 == q2 {
        return Err(Error::contract("bell measurement needs two distinct qubits"));
    }
    state
        .apply_gate(&Gate::cnot(), &[q1.clone(), q2.clone()])?
        .apply_gate(&Gate::hadamard(), std::slice::from_ref(q1))
}

fn ghz_circuit(
    state: &PureState,
    q1: &QubitLabel,
    q2: &QubitLabel,
    q3: &QubitLabel,
) -> Result<PureState> {
    if q1 == q2 || q1 == q3 || q2 == q3 {
        return Err(Error::contract("ghz measurement needs three distinct qubits"));
    }
    state
        .apply_gate(&Gate::cnot(), &[q1.clone(), q2.clone()])?
        .apply_gate(&Gate::cnot(), &[q1.clone(), q3.clone()])?
        .apply_gate(&Gate::hadamard(), std::slice::from_ref(q1))
}

/// Enumerate every Bell-measurement outcome on (q1, q2) with its
/// probability and post-state (measured qubits removed).
pub fn bell_measure(
    state: &PureState,
    q1: &QubitLabel,
    q2: &QubitLabel,
) -> Result<Vec<(BellOutcome, f64, PureState)>> {
    let rotated = bell_circuit(state, q1, q2)?;
    let branches = rotated.branch_enumerate(&[q1.clone(), q2.clone()])?;
    Ok(branches
        .into_iter()
        .map(|b| (BellOutcome::from_bits(&b.bits), b.prob, b.post))
        .collect())
}

/// Draw one Bell-measurement outcome with its Born probability.
pub fn bell_measure_sample<R: Rng>(
    state: &PureState,
    q1: &QubitLabel,
    q2: &QubitLabel,
    rng: &mut R,
) -> Result<(BellOutcome, PureState)> {
    let rotated = bell_circuit(state, q1, q2)?;
    let (bits, post) = rotated.sample_measure(&[q1.clone(), q2.clone()], rng)?;
    Ok((BellOutcome::from_bits(&bits), post))
}

/// Enumerate every GHZ-measurement outcome on (q1, q2, q3).
pub fn ghz_measure(
    state: &PureState,
    q1: &QubitLabel,
    q2: &QubitLabel,
    q3: &QubitLabel,
) -> Result<Vec<(GhzOutcome, f64, PureState)>> {
    let rotated = ghz_circuit(state, q1, q2, q3)?;
    let branches = rotated.branch_enumerate(&[q1.clone(), q2.clone(), q3.clone()])?;
    Ok(branches
        .into_iter()
        .map(|b| (GhzOutcome::from_bits(&b.bits), b.prob, b.post))
        .collect())
}

/// Draw one GHZ-measurement outcome with its Born probability.
pub fn ghz_measure_sample<R: Rng>(
    state: &PureState,
    q1: &QubitLabel,
    q2: &QubitLabel,
    q3: &QubitLabel,
    rng: &mut R,
) -> Result<(GhzOutcome, PureState)> {
    let rotated = ghz_circuit(state, q1, q2, q3)?;
    let (bits, post) = rotated.sample_measure(&[q1.clone(), q2.clone(), q3.clone()], rng)?;
    Ok((GhzOutcome::from_bits(&bits), post))
}
