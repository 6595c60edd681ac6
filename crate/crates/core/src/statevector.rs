//! Dense pure-state simulation over a register of labeled qubits.
//!
//! States are immutable: every operation returns a new value. The leftmost
//! label is the most significant bit of the amplitude index, so a ket
//! written `|q1 q2⟩` maps position 0 of the label list to the high bit.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gates::Gate;

/// Complex amplitude used throughout the simulator.
pub type Amplitude = Complex64;

/// Tolerance for normalization, unitarity and fidelity assertions.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Branches with probability at or below this threshold are pruned.
pub const BRANCH_PRUNE_THRESHOLD: f64 = 1e-12;

/// Name of a single qubit, unique within any one state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitLabel(String);

impl QubitLabel {
    pub fn new(name: impl Into<String>) -> Self {
        QubitLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for QubitLabel {
    fn from(name: &str) -> Self {
        QubitLabel::new(name)
    }
}

/// Convenience constructor for a list of labels.
pub fn labels(names: &[&str]) -> Vec<QubitLabel> {
    names.iter().map(|n| QubitLabel::new(*n)).collect()
}

/// One measurement outcome from [`PureState::branch_enumerate`].
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    /// Outcome bits in the order the measured qubits were requested.
    pub bits: String,
    /// Born probability of this outcome.
    pub prob: f64,
    /// Renormalized post-state with the measured qubits removed.
    pub post: PureState,
}

/// A normalized pure state over labeled qubits.
#[derive(Debug, Clone)]
pub struct PureState {
    labels: Vec<QubitLabel>,
    amps: Vec<Complex64>,
}

impl PureState {
    /// The computational basis state `|bits⟩` on the given labels.
    pub fn basis_state(qubits: &[QubitLabel], bits: &str) -> Result<Self> {
        check_labels_distinct(qubits)?;
        if qubits.len() != bits.len() {
            return Err(Error::contract(format!(
                "expected {} bits for {} labels, got {}",
                qubits.len(),
                qubits.len(),
                bits.len()
            )));
        }
        let index = parse_bits(bits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits.len()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(PureState {
            labels: qubits.to_vec(),
            amps,
        })
    }

    /// Build a state from explicit amplitudes, validating length, finiteness
    /// and normalization.
    pub fn from_amplitudes(qubits: &[QubitLabel], amps: Vec<Complex64>) -> Result<Self> {
        check_labels_distinct(qubits)?;
        if amps.len() != 1 << qubits.len() {
            return Err(Error::contract(format!(
                "expected {} amplitudes for {} qubits, got {}",
                1usize << qubits.len(),
                qubits.len(),
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::contract("amplitudes must be finite"));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sqr.sqrt() - 1.0).abs();
        if deviation > NORM_TOLERANCE {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(PureState {
            labels: qubits.to_vec(),
            amps,
        })
    }

    pub(crate) fn new_unchecked(labels: Vec<QubitLabel>, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << labels.len());
        debug_assert!({
            let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            (n.sqrt() - 1.0).abs() < 1e-8
        });
        PureState { labels, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of the basis state `|bits⟩`.
    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        if bits.len() != self.n_qubits() {
            return Err(Error::contract("bitstring length mismatch"));
        }
        Ok(self.amps[parse_bits(bits)?])
    }

    pub fn contains(&self, label: &QubitLabel) -> bool {
        self.labels.contains(label)
    }

    fn position(&self, label: &QubitLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::contract(format!("unknown qubit label '{label}'")))
    }

    /// Bit shift of `label` inside an amplitude index.
    fn shift(&self, label: &QubitLabel) -> Result<usize> {
        Ok(self.n_qubits() - 1 - self.position(label)?)
    }

    /// Apply `gate` to the target qubits, identity on the rest.
    pub fn apply_gate(&self, gate: &Gate, targets: &[QubitLabel]) -> Result<Self> {
        if targets.len() != gate.arity() {
            return Err(Error::contract(format!(
                "gate of arity {} applied to {} targets",
                gate.arity(),
                targets.len()
            )));
        }
        check_labels_distinct(targets)?;
        let shifts: Vec<usize> = targets
            .iter()
            .map(|t| self.shift(t))
            .collect::<Result<_>>()?;
        let arity = gate.arity();
        let block = 1usize << arity;
        let target_mask: usize = shifts.iter().map(|s| 1usize << s).sum();

        let mut amps = self.amps.clone();
        let mut sub_indices = vec![0usize; block];
        for base in 0..self.amps.len() {
            if base & target_mask != 0 {
                continue;
            }
            for (g, slot) in sub_indices.iter_mut().enumerate() {
                let mut idx = base;
                for (j, &s) in shifts.iter().enumerate() {
                    idx |= ((g >> (arity - 1 - j)) & 1) << s;
                }
                *slot = idx;
            }
            for (row, &out_idx) in sub_indices.iter().enumerate() {
                let mut value = Complex64::new(0.0, 0.0);
                for (col, &in_idx) in sub_indices.iter().enumerate() {
                    value += gate.entry(row, col) * self.amps[in_idx];
                }
                amps[out_idx] = value;
            }
        }
        Ok(PureState::new_unchecked(self.labels.clone(), amps))
    }

    /// Tensor product; `self`'s labels come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut combined = self.labels.clone();
        combined.extend(other.labels.iter().cloned());
        check_labels_distinct(&combined)?;
        let nb = other.n_qubits();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << combined.len()];
        for (ia, a) in self.amps.iter().enumerate() {
            for (ib, b) in other.amps.iter().enumerate() {
                amps[(ia << nb) | ib] = a * b;
            }
        }
        Ok(PureState::new_unchecked(combined, amps))
    }

    /// Enumerate every computational-basis outcome of measuring `qubits`,
    /// with exact Born probabilities. Measured qubits are removed from each
    /// post-state; outcomes with probability at or below
    /// [`BRANCH_PRUNE_THRESHOLD`] are dropped.
    pub fn branch_enumerate(&self, qubits: &[QubitLabel]) -> Result<Vec<MeasurementBranch>> {
        check_labels_distinct(qubits)?;
        let measured_shifts: Vec<usize> = qubits
            .iter()
            .map(|q| self.shift(q))
            .collect::<Result<_>>()?;
        if qubits.is_empty() {
            return Ok(vec![MeasurementBranch {
                bits: String::new(),
                prob: 1.0,
                post: self.clone(),
            }]);
        }
        let k = qubits.len();
        let remaining: Vec<QubitLabel> = self
            .labels
            .iter()
            .filter(|l| !qubits.contains(l))
            .cloned()
            .collect();
        let remaining_shifts: Vec<usize> = remaining
            .iter()
            .map(|l| self.shift(l).expect("label present"))
            .collect();
        let r = remaining.len();

        let mut buckets = vec![vec![Complex64::new(0.0, 0.0); 1 << r]; 1 << k];
        let mut probs = vec![0.0f64; 1 << k];
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut m = 0usize;
            for (j, &s) in measured_shifts.iter().enumerate() {
                m |= ((idx >> s) & 1) << (k - 1 - j);
            }
            let mut rem = 0usize;
            for (j, &s) in remaining_shifts.iter().enumerate() {
                rem |= ((idx >> s) & 1) << (r - 1 - j);
            }
            buckets[m][rem] = *amp;
            probs[m] += amp.norm_sqr();
        }

        let mut branches = Vec::new();
        for (m, prob) in probs.into_iter().enumerate() {
            if prob <= BRANCH_PRUNE_THRESHOLD {
                continue;
            }
            let scale = 1.0 / prob.sqrt();
            let amps: Vec<Complex64> = buckets[m].iter().map(|a| a * scale).collect();
            branches.push(MeasurementBranch {
                bits: format_bits(m, k),
                prob,
                post: PureState::new_unchecked(remaining.clone(), amps),
            });
        }
        Ok(branches)
    }

    /// Draw one measurement outcome with its Born probability.
    /// Deterministic for a fixed RNG state.
    pub fn sample_measure<R: Rng>(
        &self,
        qubits: &[QubitLabel],
        rng: &mut R,
    ) -> Result<(String, PureState)> {
        let branches = self.branch_enumerate(qubits)?;
        if branches.len() == 1 {
            let b = branches.into_iter().next().expect("one branch");
            return Ok((b.bits, b.post));
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let last = branches.len() - 1;
        for (i, b) in branches.into_iter().enumerate() {
            acc += b.prob;
            if u < acc || i == last {
                return Ok((b.bits, b.post));
            }
        }
        unreachable!("branch probabilities sum to 1")
    }

    /// Reorder the labels; the amplitudes move with their qubits.
    pub fn permuted(&self, order: &[QubitLabel]) -> Result<Self> {
        check_labels_distinct(order)?;
        if order.len() != self.n_qubits()
            || !order.iter().all(|l| self.labels.contains(l))
        {
            return Err(Error::contract(
                "permutation must list exactly the state's labels",
            ));
        }
        let n = self.n_qubits();
        let shifts: Vec<usize> = order
            .iter()
            .map(|l| self.shift(l).expect("label present"))
            .collect();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (new_idx, slot) in amps.iter_mut().enumerate() {
            let mut old_idx = 0usize;
            for (j, &s) in shifts.iter().enumerate() {
                old_idx |= ((new_idx >> (n - 1 - j)) & 1) << s;
            }
            *slot = self.amps[old_idx];
        }
        Ok(PureState::new_unchecked(order.to_vec(), amps))
    }

    /// |⟨self|other⟩|², aligning `other` by label.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        let mine: BTreeSet<_> = self.labels.iter().collect();
        let theirs: BTreeSet<_> = other.labels.iter().collect();
        if mine != theirs {
            return Err(Error::contract("fidelity requires matching label sets"));
        }
        let aligned = other.permuted(&self.labels)?;
        let overlap: Complex64 = self
            .amps
            .iter()
            .zip(aligned.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    /// Reduced density operator over the `keep` qubits, in that order.
    pub fn partial_trace(&self, keep: &[QubitLabel]) -> Result<MixedState> {
        check_labels_distinct(keep)?;
        let keep_shifts: Vec<usize> = keep
            .iter()
            .map(|q| self.shift(q))
            .collect::<Result<_>>()?;
        let env_shifts: Vec<usize> = self
            .labels
            .iter()
            .filter(|l| !keep.contains(l))
            .map(|l| self.shift(l).expect("label present"))
            .collect();
        let k = keep.len();
        let dim = 1usize << k;
        let env_dim = 1usize << env_shifts.len();

        let scatter = |sub: usize, shifts: &[usize]| -> usize {
            let mut idx = 0usize;
            for (j, &s) in shifts.iter().enumerate() {
                idx |= ((sub >> (shifts.len() - 1 - j)) & 1) << s;
            }
            idx
        };

        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            let base_i = scatter(i, &keep_shifts);
            for j in 0..dim {
                let base_j = scatter(j, &keep_shifts);
                let mut entry = Complex64::new(0.0, 0.0);
                for e in 0..env_dim {
                    let env = scatter(e, &env_shifts);
                    entry += self.amps[base_i | env] * self.amps[base_j | env].conj();
                }
                rho[i * dim + j] = entry;
            }
        }
        MixedState::new(keep.to_vec(), rho)
    }
}

fn check_labels_distinct(qubits: &[QubitLabel]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for label in qubits {
        if label.as_str().is_empty() {
            return Err(Error::contract("qubit labels must be non-empty"));
        }
        if !seen.insert(label) {
            return Err(Error::contract(format!("duplicate qubit label '{label}'")));
        }
    }
    Ok(())
}

fn parse_bits(bits: &str) -> Result<usize> {
    let mut index = 0usize;
    for c in bits.chars() {
        index <<= 1;
        match c {
            '0' => {}
            '1' => index |= 1,
            other => {
                return Err(Error::contract(format!(
                    "non-binary character '{other}' in bitstring"
                )))
            }
        }
    }
    Ok(index)
}

pub(crate) fn format_bits(value: usize, width: usize) -> String {
    (0..width)
        .map(|j| {
            if (value >> (width - 1 - j)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct PureStateRepr {
    labels: Vec<String>,
    amps: Vec<[f64; 2]>,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PureStateRepr {
            labels: self.labels.iter().map(|l| l.as_str().to_owned()).collect(),
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PureStateRepr::deserialize(deserializer)?;
        let qubits: Vec<QubitLabel> = repr.labels.iter().map(|l| QubitLabel::new(l)).collect();
        let amps = repr
            .amps
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        PureState::from_amplitudes(&qubits, amps).map_err(serde::de::Error::custom)
    }
}

/// A density operator over labeled qubits. Validated to be Hermitian,
/// trace-one and positive semidefinite at construction.
#[derive(Debug, Clone)]
pub struct MixedState {
    labels: Vec<QubitLabel>,
    rho: Vec<Complex64>,
}

impl MixedState {
    pub fn new(labels: Vec<QubitLabel>, rho: Vec<Complex64>) -> Result<Self> {
        check_labels_distinct(&labels)?;
        let dim = 1usize << labels.len();
        if rho.len() != dim * dim {
            return Err(Error::contract(format!(
                "density matrix must have {} entries, got {}",
                dim * dim,
                rho.len()
            )));
        }
        let mut trace = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            trace += rho[i * dim + i];
            for j in 0..dim {
                let a = rho[i * dim + j];
                let b = rho[j * dim + i];
                if (a - b.conj()).norm() > NORM_TOLERANCE {
                    return Err(Error::contract("density matrix is not Hermitian"));
                }
            }
        }
        if (trace - 1.0).norm() > NORM_TOLERANCE {
            return Err(Error::contract(format!(
                "density matrix trace {} is not 1",
                trace
            )));
        }
        let matrix = nalgebra::DMatrix::from_fn(dim, dim, |i, j| rho[i * dim + j]);
        let eigen = matrix.symmetric_eigenvalues();
        if eigen.iter().any(|v| *v < -NORM_TOLERANCE) {
            return Err(Error::contract(
                "density matrix has a negative eigenvalue",
            ));
        }
        Ok(MixedState { labels, rho })
    }

    /// I / 2^n over the given labels.
    pub fn maximally_mixed(labels: &[QubitLabel]) -> Result<Self> {
        check_labels_distinct(labels)?;
        let dim = 1usize << labels.len();
        let weight = Complex64::new(1.0 / dim as f64, 0.0);
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            rho[i * dim + i] = weight;
        }
        Ok(MixedState {
            labels: labels.to_vec(),
            rho,
        })
    }

    /// |ψ⟩⟨ψ| for a pure state.
    pub fn from_pure(state: &PureState) -> Self {
        let dim = state.amps.len();
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                rho[i * dim + j] = state.amps[i] * state.amps[j].conj();
            }
        }
        MixedState {
            labels: state.labels.clone(),
            rho,
        }
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.rho[row * self.dim() + col]
    }

    /// Convex mixture of density operators over identical labels.
    pub fn mixture(parts: &[(f64, MixedState)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::contract("mixture of zero states"))?;
        let labels = first.1.labels.clone();
        let dim = first.1.dim();
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (weight, part) in parts {
            if part.labels != labels {
                return Err(Error::contract("mixture requires identical labels"));
            }
            for (slot, value) in rho.iter_mut().zip(part.rho.iter()) {
                *slot += Complex64::new(*weight, 0.0) * value;
            }
        }
        MixedState::new(labels, rho)
    }

    /// Largest entrywise deviation from another operator on the same labels.
    pub fn max_entry_distance(&self, other: &Self) -> Result<f64> {
        if self.labels != other.labels {
            return Err(Error::contract("label mismatch"));
        }
        Ok(self
            .rho
            .iter()
            .zip(other.rho.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// ⟨ψ|ρ|ψ⟩ for a pure state on the same label set; equals fidelity
    /// when ρ is pure.
    pub fn overlap(&self, pure: &PureState) -> Result<f64> {
        let aligned = pure.permuted(&self.labels)?;
        let dim = self.dim();
        let mut value = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                value += aligned.amps[i].conj() * self.rho[i * dim + j] * aligned.amps[j];
            }
        }
        Ok(value.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_state() -> PureState {
        PureState::from_amplitudes(
            &labels(&["q"]),
            vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
        )
        .unwrap()
    }

    /// A deterministic pseudo-random state for property checks.
    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> PureState {
        let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        let qubits: Vec<QubitLabel> = names.iter().map(|s| QubitLabel::new(s)).collect();
        let mut amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        PureState::from_amplitudes(&qubits, amps).unwrap()
    }

    #[test]
    fn basis_state_single_qubit() {
        let s = PureState::basis_state(&labels(&["a1"]), "0").unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn basis_state_two_qubits() {
        let s = PureState::basis_state(&labels(&["a1", "a2"]), "11").unwrap();
        assert_eq!(
            s.amplitudes(),
            &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn basis_state_rejects_non_binary() {
        let err = PureState::basis_state(&labels(&["x"]), "2").unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn basis_state_rejects_length_mismatch() {
        assert!(PureState::basis_state(&labels(&["x"]), "01").is_err());
    }

    #[test]
    fn from_amplitudes_accepts_plus() {
        let s = plus_state();
        assert_eq!(s.n_qubits(), 1);
    }

    #[test]
    fn from_amplitudes_rejects_unnormalized() {
        let err =
            PureState::from_amplitudes(&labels(&["q"]), vec![c(1.0, 0.0), c(1.0, 0.0)])
                .unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn from_amplitudes_accepts_half_grid() {
        let s = PureState::from_amplitudes(
            &labels(&["q1", "q2"]),
            vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)],
        )
        .unwrap();
        assert_eq!(s.n_qubits(), 2);
    }

    #[test]
    fn from_amplitudes_rejects_wrong_length() {
        assert!(PureState::from_amplitudes(&labels(&["q"]), vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(PureState::basis_state(&labels(&["a", "a"]), "00").is_err());
    }

    #[test]
    fn cnot_truth_table() {
        let qs = labels(&["c", "t"]);
        let s = PureState::basis_state(&qs, "10").unwrap();
        let out = s.apply_gate(&Gate::cnot(), &qs).unwrap();
        assert!((out.amplitude("11").unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn cnot_disentangles_two_term_state() {
        // α|00⟩ + β|11⟩ with the first qubit as control becomes
        // (α|0⟩ + β|1⟩) ⊗ |0⟩.
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let qs = labels(&["a1", "a2"]);
        let s = PureState::from_amplitudes(
            &qs,
            vec![alpha, c(0.0, 0.0), c(0.0, 0.0), beta],
        )
        .unwrap();
        let out = s.apply_gate(&Gate::cnot(), &qs).unwrap();
        assert!((out.amplitude("00").unwrap() - alpha).norm() < 1e-12);
        assert!((out.amplitude("10").unwrap() - beta).norm() < 1e-12);
        assert!(out.amplitude("01").unwrap().norm() < 1e-12);
        assert!(out.amplitude("11").unwrap().norm() < 1e-12);
    }

    #[test]
    fn hadamard_on_zero() {
        let q = labels(&["q"]);
        let s = PureState::basis_state(&q, "0").unwrap();
        let out = s.apply_gate(&Gate::hadamard(), &q).unwrap();
        assert!((out.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((out.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn apply_gate_unknown_label() {
        let s = PureState::basis_state(&labels(&["q"]), "0").unwrap();
        assert!(s.apply_gate(&Gate::x(), &labels(&["r"])).is_err());
    }

    #[test]
    fn tensor_basis_states() {
        let a = PureState::basis_state(&labels(&["a"]), "0").unwrap();
        let b = PureState::basis_state(&labels(&["b"]), "1").unwrap();
        let ab = a.tensor(&b).unwrap();
        assert!((ab.amplitude("01").unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn tensor_message_with_bell_pair() {
        // (α|0⟩ + β|1⟩) ⊗ Φ+ expanded by hand.
        let (alpha, beta) = (c(0.6, 0.0), c(0.8, 0.0));
        let msg =
            PureState::from_amplitudes(&labels(&["m"]), vec![alpha, beta]).unwrap();
        let h = FRAC_1_SQRT_2;
        let bell = PureState::from_amplitudes(
            &labels(&["p", "q"]),
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        )
        .unwrap();
        let joint = msg.tensor(&bell).unwrap();
        let expected = [
            alpha * h,
            c(0.0, 0.0),
            c(0.0, 0.0),
            alpha * h,
            beta * h,
            c(0.0, 0.0),
            c(0.0, 0.0),
            beta * h,
        ];
        for (got, want) in joint.amplitudes().iter().zip(expected.iter()) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_rejects_shared_label() {
        let a = PureState::basis_state(&labels(&["a1"]), "0").unwrap();
        let b = PureState::basis_state(&labels(&["a1"]), "0").unwrap();
        assert!(a.tensor(&b).is_err());
    }

    #[test]
    fn branch_enumerate_plus() {
        let s = plus_state();
        let branches = s.branch_enumerate(&labels(&["q"])).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert!((b.prob - 0.5).abs() < 1e-12);
            assert_eq!(b.post.n_qubits(), 0);
        }
        assert_eq!(branches[0].bits, "0");
        assert_eq!(branches[1].bits, "1");
    }

    #[test]
    fn branch_enumerate_product_second_qubit() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.8, 0.0));
        let s = PureState::from_amplitudes(
            &labels(&["m", "z"]),
            vec![alpha, c(0.0, 0.0), beta, c(0.0, 0.0)],
        )
        .unwrap();
        let branches = s.branch_enumerate(&labels(&["z"])).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].bits, "0");
        assert!((branches[0].prob - 1.0).abs() < 1e-12);
        let post = &branches[0].post;
        assert!((post.amplitude("0").unwrap() - alpha).norm() < 1e-12);
        assert!((post.amplitude("1").unwrap() - beta).norm() < 1e-12);
    }

    #[test]
    fn branch_enumerate_unknown_label() {
        let s = plus_state();
        assert!(s.branch_enumerate(&labels(&["nope"])).is_err());
    }

    #[test]
    fn sample_measure_deterministic_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = PureState::basis_state(&labels(&["q"]), "0").unwrap();
        for _ in 0..16 {
            let (bits, _) = s.sample_measure(&labels(&["q"]), &mut rng).unwrap();
            assert_eq!(bits, "0");
        }
    }

    #[test]
    fn sample_measure_empty_list_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = plus_state();
        let (bits, post) = s.sample_measure(&[], &mut rng).unwrap();
        assert_eq!(bits, "");
        assert_eq!(post.n_qubits(), 1);
    }

    #[test]
    fn sample_measure_frequencies_match_born_rule() {
        // 3σ binomial bound at 10^5 trials is about 0.0047.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let s = plus_state();
        let q = labels(&["q"]);
        let trials = 100_000;
        let mut zeros = 0usize;
        for _ in 0..trials {
            let (bits, _) = s.sample_measure(&q, &mut rng).unwrap();
            if bits == "0" {
                zeros += 1;
            }
        }
        let freq = zeros as f64 / trials as f64;
        assert!((0.495..=0.505).contains(&freq), "freq = {freq}");
    }

    #[test]
    fn fidelity_identity_orthogonal_overlap() {
        let q = labels(&["q"]);
        let zero = PureState::basis_state(&q, "0").unwrap();
        let one = PureState::basis_state(&q, "1").unwrap();
        assert!((zero.fidelity(&zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(zero.fidelity(&one).unwrap() < 1e-12);
        assert!((zero.fidelity(&plus_state()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_label_set_mismatch() {
        let a = PureState::basis_state(&labels(&["a"]), "0").unwrap();
        let b = PureState::basis_state(&labels(&["b"]), "0").unwrap();
        assert!(a.fidelity(&b).is_err());
    }

    #[test]
    fn fidelity_invariant_under_label_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_state(3, &mut rng);
            let t = random_state(3, &mut rng);
            let reordered = t
                .permuted(&labels(&["q2", "q0", "q1"]))
                .unwrap();
            let f1 = s.fidelity(&t).unwrap();
            let f2 = s.fidelity(&reordered).unwrap();
            assert!((f1 - f2).abs() < 1e-10);
        }
    }

    #[test]
    fn partial_trace_bell_pair_is_maximally_mixed() {
        let h = FRAC_1_SQRT_2;
        let bell = PureState::from_amplitudes(
            &labels(&["p", "q"]),
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        )
        .unwrap();
        let rho = bell.partial_trace(&labels(&["p"])).unwrap();
        let expected = MixedState::maximally_mixed(&labels(&["p"])).unwrap();
        assert!(rho.max_entry_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        let s = PureState::basis_state(&labels(&["p", "q"]), "00").unwrap();
        let rho = s.partial_trace(&labels(&["p"])).unwrap();
        assert!((rho.entry(0, 0) - 1.0).norm() < 1e-12);
        assert!(rho.entry(1, 1).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_unknown_label() {
        let s = plus_state();
        assert!(s.partial_trace(&labels(&["nope"])).is_err());
    }

    #[test]
    fn tensor_then_trace_recovers_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_state(2, &mut rng);
            let b = {
                // Relabel to keep the label sets disjoint.
                let amps = random_state(2, &mut rng).amps;
                PureState::from_amplitudes(&labels(&["r0", "r1"]), amps).unwrap()
            };
            let joint = a.tensor(&b).unwrap();
            let reduced = joint.partial_trace(&labels(&["q0", "q1"])).unwrap();
            let projector = MixedState::from_pure(&a);
            assert!(reduced.max_entry_distance(&projector).unwrap() < 1e-10);
        }
    }

    #[test]
    fn gates_preserve_norm_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let s = random_state(3, &mut rng);
            let out = s
                .apply_gate(&Gate::hadamard(), &labels(&["q1"]))
                .unwrap()
                .apply_gate(&Gate::cnot(), &labels(&["q0", "q2"]))
                .unwrap()
                .apply_gate(&Gate::y(), &labels(&["q2"]))
                .unwrap();
            let norm: f64 = out.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn branch_probabilities_sum_to_one_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n_measured in 1..=3 {
            for _ in 0..20 {
                let s = random_state(4, &mut rng);
                let measured: Vec<QubitLabel> = s.labels()[..n_measured].to_vec();
                let total: f64 = s
                    .branch_enumerate(&measured)
                    .unwrap()
                    .iter()
                    .map(|b| b.prob)
                    .sum();
                assert!((total - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn measuring_all_qubits_leaves_scalar_state() {
        let s = plus_state();
        let branches = s.branch_enumerate(&labels(&["q"])).unwrap();
        for b in branches {
            assert_eq!(b.post.n_qubits(), 0);
            assert_eq!(b.post.amplitudes().len(), 1);
        }
    }

    #[test]
    fn pure_state_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_state(2, &mut rng);
        let json = serde_json::to_string(&s).unwrap();
        let back: PureState = serde_json::from_str(&json).unwrap();
        assert!((s.fidelity(&back).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_state_rejects_bad_operators() {
        let l = labels(&["q"]);
        // Not trace one.
        assert!(MixedState::new(
            l.clone(),
            vec![c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        )
        .is_err());
        // Not Hermitian.
        assert!(MixedState::new(
            l.clone(),
            vec![c(0.5, 0.0), c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0)]
        )
        .is_err());
        // Negative eigenvalue.
        assert!(MixedState::new(
            l,
            vec![c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]
        )
        .is_err());
    }
}
