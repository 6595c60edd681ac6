//! Two-term message states and the CNOT compression that reduces them to
//! one or two carrier qubits.

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::Party;
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::statevector::{PureState, QubitLabel, NORM_TOLERANCE};

/// A two-term superposition α|x⟩ + β|y⟩ over labeled qubits.
#[derive(Debug, Clone)]
pub struct MessageState {
    alpha: Complex64,
    beta: Complex64,
    support: (String, String),
    labels: Vec<QubitLabel>,
    owner: Party,
}

impl MessageState {
    pub fn new(
        alpha: Complex64,
        beta: Complex64,
        support: (&str, &str),
        qubits: &[QubitLabel],
        owner: Party,
    ) -> Result<Self> {
        let (x, y) = (support.0.to_owned(), support.1.to_owned());
        if x.len() != y.len() || x.len() != qubits.len() || qubits.is_empty() {
            return Err(Error::contract(
                "support strings must match the label count",
            ));
        }
        if !x.chars().chain(y.chars()).all(|c| c == '0' || c == '1') {
            return Err(Error::contract("support must be binary strings"));
        }
        if x == y {
            return Err(Error::contract("support terms must be distinct"));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::contract("coefficients must be finite"));
        }
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        let deviation = (norm_sqr.sqrt() - 1.0).abs();
        if deviation > NORM_TOLERANCE {
            return Err(Error::NotNormalized { deviation });
        }
        // Reuse the state validation for label checks.
        PureState::basis_state(qubits, &x)?;
        Ok(MessageState {
            alpha,
            beta,
            support: (x, y),
            labels: qubits.to_vec(),
            owner,
        })
    }

    /// The paper-form message α|0…0⟩ + β|1…1⟩.
    pub fn canonical(
        alpha: Complex64,
        beta: Complex64,
        qubits: &[QubitLabel],
        owner: Party,
    ) -> Result<Self> {
        let x = "0".repeat(qubits.len());
        let y = "1".repeat(qubits.len());
        MessageState::new(alpha, beta, (&x, &y), qubits, owner)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn support(&self) -> (&str, &str) {
        (&self.support.0, &self.support.1)
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn owner(&self) -> Party {
        self.owner
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    /// The message as a dense state on its own labels.
    pub fn to_pure_state(&self) -> PureState {
        self.rendered_on(&self.labels)
            .expect("own labels are valid")
    }

    /// The same amplitude pattern on a different label list of equal length.
    pub fn rendered_on(&self, qubits: &[QubitLabel]) -> Result<PureState> {
        if qubits.len() != self.labels.len() {
            return Err(Error::contract("label count mismatch"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits.len()];
        amps[bits_to_index(&self.support.0)] = self.alpha;
        amps[bits_to_index(&self.support.1)] = self.beta;
        PureState::from_amplitudes(qubits, amps)
    }
}

fn bits_to_index(bits: &str) -> usize {
    bits.chars()
        .fold(0usize, |acc, c| (acc << 1) | usize::from(c == '1'))
}

/// The shape of a two-term message, without coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MessageForm {
    pub support: (String, String),
}

impl MessageForm {
    pub fn of(msg: &MessageState) -> Self {
        MessageForm {
            support: (msg.support.0.clone(), msg.support.1.clone()),
        }
    }

    pub fn canonical(n: usize) -> Self {
        MessageForm {
            support: ("0".repeat(n), "1".repeat(n)),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.support.0.len()
    }
}

/// Gate-level layout of a compression, derived from the support alone.
#[derive(Debug, Clone)]
pub(crate) struct CompressionLayout {
    pub pivot: usize,
    pub keep: Option<usize>,
    pub cnot_positions: Vec<usize>,
    pub spectator_positions: Vec<usize>,
    pub pivot_flip: bool,
    pub core_support: (String, String),
}

pub(crate) fn compression_layout(
    form: &MessageForm,
    keep_pair: bool,
) -> Result<CompressionLayout> {
    let x: Vec<char> = form.support.0.chars().collect();
    let y: Vec<char> = form.support.1.chars().collect();
    let differing: Vec<usize> = (0..x.len()).filter(|&i| x[i] != y[i]).collect();
    debug_assert!(!differing.is_empty());
    let pivot = differing[0];
    let (keep, first_cnot) = if keep_pair {
        let keep = *differing.get(1).ok_or_else(|| {
            Error::UnsupportedInput(
                "pair compression requires a support differing in at least two positions"
                    .into(),
            )
        })?;
        (Some(keep), 2)
    } else {
        (None, 1)
    };
    let cnot_positions: Vec<usize> = differing[first_cnot..].to_vec();
    let spectator_positions: Vec<usize> =
        (0..x.len()).filter(|i| !differing.contains(i)).collect();
    let pivot_flip = x[pivot] == '1';
    let core_support = match keep {
        None => ("0".to_string(), "1".to_string()),
        Some(k) => (format!("0{}", x[k]), format!("1{}", y[k])),
    };
    Ok(CompressionLayout {
        pivot,
        keep,
        cnot_positions,
        spectator_positions,
        pivot_flip,
        core_support,
    })
}

/// Record of a performed compression: which qubits stay active (the core),
/// which were freed into deterministic basis states, and the frame data
/// needed to rebuild the original message later.
#[derive(Debug, Clone)]
pub struct Compression {
    pub core: Vec<QubitLabel>,
    pub core_indices: Vec<usize>,
    pub freed: Vec<(QubitLabel, u8)>,
    pub pivot_flip: bool,
    pub cnot_positions: Vec<usize>,
    pub spectator_positions: Vec<usize>,
    /// Two-term support carried by the core after compression; the first
    /// term holds α.
    pub core_support: (String, String),
}

impl Compression {
    /// The single carrier qubit of a full compression.
    pub fn carrier(&self) -> &QubitLabel {
        &self.core[0]
    }
}

/// Disentangle a two-term message into a single carrier qubit
/// α|0⟩ + β|1⟩ plus deterministic freed qubits, inside a larger state.
pub fn compress(state: &PureState, msg: &MessageState) -> Result<(PureState, Compression)> {
    compress_with_layout(state, msg, false)
}

/// Compression that keeps two core qubits, as the GHZ-measurement scheme
/// needs. The core holds α|0 x_k⟩ + β|1 y_k⟩.
pub fn compress_keep_pair(
    state: &PureState,
    msg: &MessageState,
) -> Result<(PureState, Compression)> {
    compress_with_layout(state, msg, true)
}

fn compress_with_layout(
    state: &PureState,
    msg: &MessageState,
    keep_pair: bool,
) -> Result<(PureState, Compression)> {
    for label in msg.labels() {
        if !state.contains(label) {
            return Err(Error::contract(format!(
                "message qubit '{label}' is not in the state"
            )));
        }
    }
    let layout = compression_layout(&MessageForm::of(msg), keep_pair)?;
    let x: Vec<char> = msg.support.0.chars().collect();
    let pivot_label = msg.labels()[layout.pivot].clone();

    let mut out = state.clone();
    if layout.pivot_flip {
        out = out.apply_gate(&Gate::x(), &[pivot_label.clone()])?;
    }
    for &i in &layout.cnot_positions {
        out = out.apply_gate(
            &Gate::cnot(),
            &[pivot_label.clone(), msg.labels()[i].clone()],
        )?;
    }

    let mut core_indices = vec![layout.pivot];
    if let Some(k) = layout.keep {
        core_indices.push(k);
    }
    let core: Vec<QubitLabel> = core_indices
        .iter()
        .map(|&i| msg.labels()[i].clone())
        .collect();
    let freed: Vec<(QubitLabel, u8)> = layout
        .cnot_positions
        .iter()
        .chain(layout.spectator_positions.iter())
        .map(|&i| (msg.labels()[i].clone(), u8::from(x[i] == '1')))
        .collect();

    // The freed qubits must now be deterministic with the expected values;
    // anything else means the input had weight outside span{|x⟩, |y⟩}.
    if !freed.is_empty() {
        let freed_labels: Vec<QubitLabel> = freed.iter().map(|(l, _)| l.clone()).collect();
        let branches = out.branch_enumerate(&freed_labels)?;
        let expected: String = freed
            .iter()
            .map(|(_, b)| if *b == 1 { '1' } else { '0' })
            .collect();
        let ok = branches.len() == 1
            && branches[0].bits == expected
            && (branches[0].prob - 1.0).abs() <= NORM_TOLERANCE;
        if !ok {
            return Err(Error::UnsupportedInput(
                "state has weight outside the message support".into(),
            ));
        }
    }

    Ok((
        out,
        Compression {
            core,
            core_indices,
            freed,
            pivot_flip: layout.pivot_flip,
            cnot_positions: layout.cnot_positions,
            spectator_positions: layout.spectator_positions,
            core_support: layout.core_support,
        },
    ))
}

/// Append auxiliary qubits in |0⟩ and fan the carrier out onto them:
/// γ|0⟩ + δ|1⟩ becomes γ|0…0⟩ + δ|1…1⟩ over carrier plus auxiliaries.
pub fn decompress(
    state: &PureState,
    carrier: &QubitLabel,
    aux_labels: &[QubitLabel],
) -> Result<PureState> {
    if !state.contains(carrier) {
        return Err(Error::contract(format!(
            "carrier '{carrier}' is not in the state"
        )));
    }
    for aux in aux_labels {
        if state.contains(aux) {
            return Err(Error::contract(format!(
                "auxiliary label '{aux}' collides with an existing qubit"
            )));
        }
    }
    let mut out = state.clone();
    for aux in aux_labels {
        let fresh = PureState::basis_state(std::slice::from_ref(aux), "0")?;
        out = out.tensor(&fresh)?;
        out = out.apply_gate(&Gate::cnot(), &[carrier.clone(), aux.clone()])?;
    }
    Ok(out)
}
