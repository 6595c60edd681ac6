//! Shared execution of the pre-correction protocol phase: message
//! compression, channel fixups, measurement circuits and exact branch
//! enumeration. Both correction derivation and full protocol runs go
//! through this path so their conventions cannot drift apart.

use serde::Serialize;

use crate::channels::{ChannelKind, ChannelSpec, Party};
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::statevector::PureState;

use super::message::{compress, compress_keep_pair, Compression, MessageState};
use super::plan::{MeasurementKind, MeasurementPlan};

/// One entry in a protocol transcript.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TranscriptEvent {
    Compression {
        party: Party,
        core: Vec<String>,
        freed: Vec<(String, u8)>,
    },
    ChannelFixup {
        party: Party,
        gate: String,
        targets: Vec<String>,
    },
    Grouping {
        alice_measures: String,
        alice_retains: Vec<String>,
        bob_measures: String,
        bob_retains: Vec<String>,
    },
    Measurement {
        party: Party,
        kind: String,
        bits: String,
    },
    Correction {
        party: Party,
        targets: Vec<String>,
        pauli: String,
    },
    AuxIntroduced {
        party: Party,
        qubits: Vec<String>,
    },
}

pub(crate) struct PreparedDirection {
    pub compression: Compression,
    pub msg: MessageState,
}

/// The protocol state just before classical broadcast: every joint
/// measurement outcome with its probability and post-state.
pub(crate) struct PreCorrection {
    /// (broadcast key, probability, post-state) per occurring outcome.
    pub branches: Vec<(String, f64, PureState)>,
    pub directions: Vec<PreparedDirection>,
    pub events: Vec<TranscriptEvent>,
    pub bits_per_direction: Vec<usize>,
}

pub(crate) fn execute_pre_correction(
    channel: &ChannelSpec,
    plan: &MeasurementPlan,
    msgs: &[MessageState],
) -> Result<PreCorrection> {
    if msgs.len() != plan.directions.len() {
        return Err(Error::contract(
            "one message per plan direction is required",
        ));
    }
    let channel_labels = channel.labels();
    for (msg, direction) in msgs.iter().zip(&plan.directions) {
        if msg.owner() != direction.sender {
            return Err(Error::contract(format!(
                "message owner {} does not match plan sender {}",
                msg.owner(),
                direction.sender
            )));
        }
        if msg.support() != (direction.form.support.0.as_str(), direction.form.support.1.as_str())
        {
            return Err(Error::contract(
                "message support does not match the plan's message form",
            ));
        }
        if msg.labels().iter().any(|l| channel_labels.contains(l)) {
            return Err(Error::contract(
                "message labels collide with channel labels",
            ));
        }
    }

    let mut state = msgs
        .iter()
        .skip(1)
        .try_fold(msgs[0].to_pure_state(), |acc, m| {
            acc.tensor(&m.to_pure_state())
        })?
        .tensor(&channel.state())?;

    let mut events = Vec::new();
    if channel.kind == ChannelKind::SixQubitZhou {
        let alice = &plan.directions[0];
        let bob = plan.directions.get(1);
        events.push(TranscriptEvent::Grouping {
            alice_measures: alice.channel_qubit.to_string(),
            alice_retains: bob
                .map(|d| d.receive.iter().map(|l| l.to_string()).collect())
                .unwrap_or_default(),
            bob_measures: bob
                .map(|d| d.channel_qubit.to_string())
                .unwrap_or_default(),
            bob_retains: alice.receive.iter().map(|l| l.to_string()).collect(),
        });
    }

    let mut directions = Vec::new();
    for (msg, direction) in msgs.iter().zip(&plan.directions) {
        let (next, compression) = match direction.kind {
            MeasurementKind::Bell => compress(&state, msg)?,
            MeasurementKind::Ghz => compress_keep_pair(&state, msg)?,
        };
        state = next;
        events.push(TranscriptEvent::Compression {
            party: direction.sender,
            core: compression.core.iter().map(|l| l.to_string()).collect(),
            freed: compression
                .freed
                .iter()
                .map(|(l, b)| (l.to_string(), *b))
                .collect(),
        });
        directions.push(PreparedDirection {
            compression,
            msg: msg.clone(),
        });
    }

    for fixup in &plan.fixups {
        state = state.apply_gate(
            &Gate::cz(),
            &[fixup.targets.0.clone(), fixup.targets.1.clone()],
        )?;
        events.push(TranscriptEvent::ChannelFixup {
            party: fixup.party,
            gate: "cz".to_string(),
            targets: vec![fixup.targets.0.to_string(), fixup.targets.1.to_string()],
        });
    }

    let mut measured = Vec::new();
    let mut bits_per_direction = Vec::new();
    for (prepared, direction) in directions.iter().zip(&plan.directions) {
        let core = &prepared.compression.core;
        let pivot = core[0].clone();
        match direction.kind {
            MeasurementKind::Bell => {
                state = state
                    .apply_gate(&Gate::cnot(), &[pivot.clone(), direction.channel_qubit.clone()])?
                    .apply_gate(&Gate::hadamard(), std::slice::from_ref(&pivot))?;
                measured.extend([pivot, direction.channel_qubit.clone()]);
                bits_per_direction.push(2);
            }
            MeasurementKind::Ghz => {
                let keep = core[1].clone();
                state = state
                    .apply_gate(&Gate::cnot(), &[pivot.clone(), keep.clone()])?
                    .apply_gate(&Gate::cnot(), &[pivot.clone(), direction.channel_qubit.clone()])?
                    .apply_gate(&Gate::hadamard(), std::slice::from_ref(&pivot))?;
                measured.extend([pivot, keep, direction.channel_qubit.clone()]);
                bits_per_direction.push(3);
            }
        }
    }

    let branches = state
        .branch_enumerate(&measured)?
        .into_iter()
        .map(|b| (b.bits, b.prob, b.post))
        .collect();

    Ok(PreCorrection {
        branches,
        directions,
        events,
        bits_per_direction,
    })
}
