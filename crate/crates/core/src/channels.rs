//! Entangled channel constructors and entanglement diagnostics.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{labels, PureState, QubitLabel};

/// The two communicating parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Alice => f.write_str("alice"),
            Party::Bob => f.write_str("bob"),
        }
    }
}

/// Which entangled resource a protocol runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    /// Six-qubit channel measured with GHZ measurements (reference scheme).
    SixQubitZhou,
    /// Four-qubit channel measured with Bell measurements (improved scheme).
    FourQubitImproved,
    /// A single Bell pair, indexed 0..=3 as Φ+, Ψ+, Φ−, Ψ−.
    BellPair(u8),
}

/// A channel kind plus the assignment of its qubits to parties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub ownership: BTreeMap<QubitLabel, Party>,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, ownership: BTreeMap<QubitLabel, Party>) -> Result<Self> {
        let expected = match kind {
            ChannelKind::SixQubitZhou => eq3_labels(),
            ChannelKind::FourQubitImproved => eq4_labels(),
            ChannelKind::BellPair(index) => {
                if index > 3 {
                    return Err(Error::contract(format!(
                        "bell pair index {index} out of range 0..=3"
                    )));
                }
                bell_pair_labels()
            }
        };
        if ownership.len() != expected.len()
            || !expected.iter().all(|l| ownership.contains_key(l))
        {
            return Err(Error::contract(
                "channel ownership must cover exactly the channel's labels",
            ));
        }
        Ok(ChannelSpec { kind, ownership })
    }

    /// The improved four-qubit channel: Alice holds A1 and A2, Bob holds
    /// B1 and B2.
    pub fn four_qubit_improved() -> Self {
        let ownership = eq4_labels()
            .into_iter()
            .map(|l| {
                let party = if l.as_str().starts_with('A') {
                    Party::Alice
                } else {
                    Party::Bob
                };
                (l, party)
            })
            .collect();
        ChannelSpec {
            kind: ChannelKind::FourQubitImproved,
            ownership,
        }
    }

    /// A lone Bell pair with Alice holding A1 and Bob holding B1.
    pub fn bell_pair(index: u8) -> Result<Self> {
        let ownership = bell_pair_labels()
            .into_iter()
            .zip([Party::Alice, Party::Bob])
            .collect();
        ChannelSpec::new(ChannelKind::BellPair(index), ownership)
    }

    /// The six-qubit channel with an explicit qubit assignment.
    pub fn six_qubit_zhou(ownership: BTreeMap<QubitLabel, Party>) -> Result<Self> {
        ChannelSpec::new(ChannelKind::SixQubitZhou, ownership)
    }

    /// The channel state on its canonical labels.
    pub fn state(&self) -> PureState {
        match self.kind {
            ChannelKind::SixQubitZhou => make_channel_eq3(),
            ChannelKind::FourQubitImproved => make_channel_eq4(),
            ChannelKind::BellPair(index) => {
                let ls = bell_pair_labels();
                make_bell_pair(index, (ls[0].clone(), ls[1].clone()))
                    .expect("index validated at construction")
            }
        }
    }

    pub fn labels(&self) -> Vec<QubitLabel> {
        match self.kind {
            ChannelKind::SixQubitZhou => eq3_labels(),
            ChannelKind::FourQubitImproved => eq4_labels(),
            ChannelKind::BellPair(_) => bell_pair_labels(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.labels().len()
    }

    /// Channel qubits held by `party`, in canonical label order.
    pub fn owned_by(&self, party: Party) -> Vec<QubitLabel> {
        self.labels()
            .into_iter()
            .filter(|l| self.ownership.get(l) == Some(&party))
            .collect()
    }
}

/// Canonical labels "1".."6" for the six-qubit channel.
pub fn eq3_labels() -> Vec<QubitLabel> {
    labels(&["1", "2", "3", "4", "5", "6"])
}

/// Canonical labels for the four-qubit channel.
pub fn eq4_labels() -> Vec<QubitLabel> {
    labels(&["A1", "B1", "A2", "B2"])
}

/// Canonical labels for a lone Bell pair.
pub fn bell_pair_labels() -> Vec<QubitLabel> {
    labels(&["A1", "B1"])
}

/// The six-qubit channel
/// ½(|000000⟩ + |001011⟩ + |110100⟩ + |111111⟩) on labels 1..6.
pub fn make_channel_eq3() -> PureState {
    let mut amps = vec![Complex64::new(0.0, 0.0); 64];
    for idx in [0b000000, 0b001011, 0b110100, 0b111111] {
        amps[idx] = Complex64::new(0.5, 0.0);
    }
    PureState::from_amplitudes(&eq3_labels(), amps).expect("normalized by construction")
}

/// The four-qubit channel
/// ½(|0000⟩ + |0011⟩ + |1100⟩ − |1111⟩) on labels A1, B1, A2, B2.
pub fn make_channel_eq4() -> PureState {
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    amps[0b0000] = Complex64::new(0.5, 0.0);
    amps[0b0011] = Complex64::new(0.5, 0.0);
    amps[0b1100] = Complex64::new(0.5, 0.0);
    amps[0b1111] = Complex64::new(-0.5, 0.0);
    PureState::from_amplitudes(&eq4_labels(), amps).expect("normalized by construction")
}

/// One of the four Bell states on the given label pair.
///
/// The index encodes (phase bit, parity bit): 0 → Φ+, 1 → Ψ+, 2 → Φ−,
/// 3 → Ψ−, with Φ± = (|00⟩ ± |11⟩)/√2 and Ψ± = (|01⟩ ± |10⟩)/√2.
pub fn make_bell_pair(index: u8, pair: (QubitLabel, QubitLabel)) -> Result<PureState> {
    if index > 3 {
        return Err(Error::contract(format!(
            "bell pair index {index} out of range 0..=3"
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if index & 0b10 == 0 { h } else { -h };
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    if index & 0b01 == 0 {
        amps[0b00] = Complex64::new(h, 0.0);
        amps[0b11] = Complex64::new(sign, 0.0);
    } else {
        amps[0b01] = Complex64::new(h, 0.0);
        amps[0b10] = Complex64::new(sign, 0.0);
    }
    PureState::from_amplitudes(&[pair.0, pair.1], amps)
}

/// Number of nonzero Schmidt coefficients across the bipartition
/// `partition` vs the remaining qubits.
pub fn schmidt_rank(state: &PureState, partition: &[QubitLabel]) -> Result<usize> {
    if partition.is_empty() || partition.len() >= state.n_qubits() {
        return Err(Error::contract(
            "partition must be a nonempty proper subset of the state's labels",
        ));
    }
    let complement: Vec<QubitLabel> = state
        .labels()
        .iter()
        .filter(|l| !partition.contains(l))
        .cloned()
        .collect();
    let mut order = partition.to_vec();
    order.extend(complement.iter().cloned());
    // Errors on unknown or duplicate labels surface here.
    let reordered = state.permuted(&order)?;

    let rows = 1usize << partition.len();
    let cols = 1usize << complement.len();
    let matrix = nalgebra::DMatrix::from_fn(rows, cols, |i, j| {
        reordered.amplitudes()[i * cols + j]
    });
    let singular_values = matrix.singular_values();
    Ok(singular_values.iter().filter(|s| **s > 1e-10).count())
}
