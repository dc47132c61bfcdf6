//! The switch supermap: superposed causal orders of local unitaries, followed
//! by a measurement of the control register in the coherent (±) basis.
//!
//! Every protocol is a superposition of *branches*. Branch `j` is a product
//! state in which each target qubit went through one of its two orders, and
//! the control register is in basis state `|j⟩`:
//!
//! * two-order protocols (single qubit, Bell, GHZ): branch 0 applies U·Ũ to
//!   every qubit, branch 1 applies Ũ·U to every qubit;
//! * W protocols: branch `j` applies Ũ·U to qubit `j` and U·Ũ elsewhere, with
//!   the control embedded in ⌈log₂ n⌉ qubits.
//!
//! Projecting control qubit `k` onto `|±⟩` multiplies branch `j` by
//! `(±1)^{bit_k(j)}/√2`, which gives each outcome state directly.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{hadamard, local_tensor, UnitaryPair};
use crate::metrics::MetricKind;
use crate::qla::{apply, kron, ComplexMatrix, StateVector};

/// Outcomes with probability below this are reported as unreachable.
pub const UNREACHABLE_PROB: f64 = 1e-12;
const CONTROL_TOL: f64 = 1e-12;
const INPUT_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// One target qubit, two orders.
    Single,
    Bell,
    Ghz(usize),
    W(usize),
}

impl Protocol {
    pub fn num_targets(&self) -> usize {
        match *self {
            Protocol::Single => 1,
            Protocol::Bell => 2,
            Protocol::Ghz(n) | Protocol::W(n) => n,
        }
    }

    pub fn is_two_order(&self) -> bool {
        !matches!(self, Protocol::W(_))
    }

    /// Size of the control register in qubits.
    pub fn control_qubits(&self) -> usize {
        match *self {
            Protocol::W(n) => ceil_log2(n),
            _ => 1,
        }
    }

    /// Number of control basis states that carry amplitude.
    pub fn num_branches(&self) -> usize {
        match *self {
            Protocol::W(n) => n,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Protocol::Ghz(n) if n < 2 => Err(Error::InvalidSpec(format!("GHZ needs n >= 2, got {n}"))),
            Protocol::W(n) if n < 3 => Err(Error::InvalidSpec(format!("W needs n >= 3, got {n}"))),
            _ => Ok(()),
        }
    }

    /// Natural entanglement measure of the outcomes; none for a single target.
    pub fn default_metric(&self) -> Option<MetricKind> {
        match self {
            Protocol::Single => None,
            Protocol::Bell => Some(MetricKind::Concurrence),
            _ => Some(MetricKind::GmeConcurrence),
        }
    }

    pub fn outcome_labels(&self) -> Vec<String> {
        let d = self.control_qubits();
        (0..1usize << d).map(|s| sign_label(s, d)).collect()
    }
}

/// Short names: `single`, `bell`, `ghz<n>`, `w<n>`.
impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Single => f.write_str("single"),
            Protocol::Bell => f.write_str("bell"),
            Protocol::Ghz(n) => write!(f, "ghz{n}"),
            Protocol::W(n) => write!(f, "w{n}"),
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            input: s.into(),
            reason: "expected single, bell, ghz<n> or w<n>".into(),
        };
        let sized = |rest: &str| rest.parse::<usize>().map_err(|_| bad());
        let p = match s {
            "single" => Protocol::Single,
            "bell" => Protocol::Bell,
            _ if s.starts_with("ghz") => Protocol::Ghz(sized(&s[3..])?),
            _ if s.starts_with('w') => Protocol::W(sized(&s[1..])?),
            _ => return Err(bad()),
        };
        p.validate()?;
        Ok(p)
    }
}

fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

/// Label of control outcome `s` on `d` qubits: bit 0 → `+`, bit 1 → `-`,
/// first control qubit leftmost.
pub fn sign_label(s: usize, d: usize) -> String {
    (0..d)
        .map(|k| if s >> (d - 1 - k) & 1 == 0 { '+' } else { '-' })
        .collect()
}

/// Overlap sign ∏_k (−1)^{s_k · j_k} between coherent outcome `s` and basis state `j`.
pub fn coherent_sign(s: usize, j: usize) -> f64 {
    if (s & j).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Protocol descriptor: one pair of unitaries and one input state per target.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSpec {
    protocol: Protocol,
    pairs: Vec<UnitaryPair>,
    input: Vec<StateVector>,
    control: StateVector,
}

impl SwitchSpec {
    /// Spec with the even control superposition.
    pub fn new(protocol: Protocol, pairs: Vec<UnitaryPair>, input: Vec<StateVector>) -> Result<Self> {
        protocol.validate()?;
        let control = even_control(protocol);
        Self::with_control(protocol, pairs, input, control)
    }

    /// Accepts an explicit control state, which must equal the even
    /// superposition up to a global phase.
    pub fn with_control(
        protocol: Protocol,
        pairs: Vec<UnitaryPair>,
        input: Vec<StateVector>,
        control: StateVector,
    ) -> Result<Self> {
        protocol.validate()?;
        let n = protocol.num_targets();
        if pairs.len() != n || input.len() != n {
            return Err(Error::InvalidSpec(format!(
                "protocol needs {n} pairs and {n} inputs, got {} and {}",
                pairs.len(),
                input.len()
            )));
        }
        for (i, s) in input.iter().enumerate() {
            if s.num_qubits() != 1 {
                return Err(Error::InvalidSpec(format!("input {i} is not a single-qubit state")));
            }
            if (s.norm() - 1.0).abs() > INPUT_NORM_TOL {
                return Err(Error::InvalidSpec(format!(
                    "input {i} is not normalized (norm {})",
                    s.norm()
                )));
            }
        }
        let even = even_control(protocol);
        if control.dim() != even.dim() {
            return Err(Error::InvalidSpec(format!(
                "control register needs {} qubits, got {}",
                even.num_qubits(),
                control.num_qubits()
            )));
        }
        let fid = even.fidelity(&control)?;
        if (fid - 1.0).abs() > CONTROL_TOL || (control.norm() - 1.0).abs() > CONTROL_TOL {
            return Err(Error::InvalidSpec("control must be the even superposition".into()));
        }
        Ok(Self {
            protocol,
            pairs,
            input,
            control: even,
        })
    }

    /// (σ_z, R_y(2λ)) on every qubit with input |η⟩^⊗n.
    pub fn z_ry_family(protocol: Protocol, two_lambda: f64, alpha: f64) -> Result<Self> {
        let n = protocol.num_targets();
        let eta = StateVector::eta(alpha)?;
        Self::new(protocol, vec![UnitaryPair::z_ry(two_lambda); n], vec![eta; n])
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn num_targets(&self) -> usize {
        self.protocol.num_targets()
    }

    pub fn pairs(&self) -> &[UnitaryPair] {
        &self.pairs
    }

    pub fn input(&self) -> &[StateVector] {
        &self.input
    }

    pub fn control(&self) -> &StateVector {
        &self.control
    }

    /// Same spec with U and Ũ exchanged on every qubit.
    pub fn swapped(&self) -> Self {
        Self {
            pairs: self.pairs.iter().map(UnitaryPair::swapped).collect(),
            ..self.clone()
        }
    }

    /// ⊗_i φ_i.
    pub fn input_product(&self) -> StateVector {
        StateVector::product(&self.input).expect("validated spec has inputs")
    }

    /// Product state of branch `j` (see module docs).
    pub fn branch_state(&self, j: usize) -> StateVector {
        let factors: Vec<StateVector> = self
            .pairs
            .iter()
            .zip(&self.input)
            .enumerate()
            .map(|(i, (p, phi))| {
                let reversed = match self.protocol {
                    Protocol::W(_) => i == j,
                    _ => j == 1,
                };
                let op = if reversed {
                    p.backward_order()
                } else {
                    p.forward_order()
                };
                apply(&op, phi).expect("2x2 on one qubit")
            })
            .collect();
        StateVector::product(&factors).expect("non-empty")
    }
}

/// Even superposition over the branches of `protocol`: |+⟩ for two-order
/// protocols, Σ_{j<n}|j⟩/√n on ⌈log₂ n⌉ qubits for W.
pub fn even_control(protocol: Protocol) -> StateVector {
    let d = protocol.control_qubits();
    let k = protocol.num_branches();
    let a = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << d];
    amps.iter_mut().take(k).for_each(|z| *z = a);
    StateVector::new(amps).expect("power of two")
}

/// One coherent-basis measurement result.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub probability: f64,
    /// Normalized post-measurement target state, phase-canonicalized; `None`
    /// when the outcome is unreachable.
    pub state: Option<StateVector>,
}

impl Outcome {
    pub fn is_reachable(&self) -> bool {
        self.state.is_some()
    }

    /// Builds an outcome from the unnormalized projected target vector.
    pub fn from_projection(label: String, projected: StateVector) -> Self {
        let probability = projected.norm_sqr();
        let state = if probability < UNREACHABLE_PROB {
            None
        } else {
            let mut s = projected.scaled(Complex64::new(1.0 / probability.sqrt(), 0.0));
            s.canonicalize_phase();
            Some(s)
        };
        Self {
            label,
            probability,
            state,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeEnsemble {
    pub outcomes: Vec<Outcome>,
}

impl OutcomeEnsemble {
    pub fn get(&self, label: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.label == label)
    }

    pub fn probability_sum(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn reachable(&self) -> impl Iterator<Item = (&str, &StateVector)> {
        self.outcomes
            .iter()
            .filter_map(|o| o.state.as_ref().map(|s| (o.label.as_str(), s)))
    }
}

/// S = UŨ ⊗ |0⟩⟨0| + ŨU ⊗ |1⟩⟨1| on (target ⊗ control).
pub fn switch_operator(p: &UnitaryPair) -> ComplexMatrix {
    let p0 = ComplexMatrix::diag(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let p1 = ComplexMatrix::diag(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
    &kron(&p.forward_order(), &p0) + &kron(&p.backward_order(), &p1)
}

/// Dense switch operator for the whole spec on (targets ⊗ control).
pub fn controlled_order_operator(spec: &SwitchSpec) -> ComplexMatrix {
    let d = spec.protocol.control_qubits();
    let dim_c = 1usize << d;
    let projector = |j: usize| {
        let mut m = ComplexMatrix::zeros(dim_c, dim_c);
        m.set(j, j, Complex64::new(1.0, 0.0));
        m
    };
    if spec.protocol.is_two_order() {
        let (v, vt) = local_tensor(&spec.pairs).expect("validated spec");
        let forward = &v * &vt;
        let backward = &vt * &v;
        &kron(&forward, &projector(0)) + &kron(&backward, &projector(1))
    } else {
        let n = spec.num_targets();
        let dim_t = 1usize << n;
        let mut total = ComplexMatrix::zeros(dim_t * dim_c, dim_t * dim_c);
        // Identity (unused) blocks keep S unitary when n is not a power of two.
        for j in 0..dim_c {
            let term = if j < n {
                let factors: Vec<ComplexMatrix> = spec
                    .pairs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if i == j { p.backward_order() } else { p.forward_order() })
                    .collect();
                crate::qla::kron_all(&factors).expect("non-empty")
            } else {
                ComplexMatrix::identity(dim_t)
            };
            total = &total + &kron(&term, &projector(j));
        }
        total
    }
}

/// S(|φ⟩ ⊗ |φ_c⟩) before the control is measured.
pub fn joint_state(spec: &SwitchSpec) -> StateVector {
    let s = controlled_order_operator(spec);
    let input = spec.input_product().tensor(&spec.control);
    apply(&s, &input).expect("dimensions agree")
}

/// Measures the trailing `control_qubits` of `joint` in the coherent basis and
/// returns every outcome in label order.
pub fn measure_control(joint: &StateVector, control_qubits: usize) -> Result<OutcomeEnsemble> {
    let n = joint.num_qubits();
    if control_qubits == 0 || control_qubits >= n {
        return Err(Error::InvalidQubits(format!(
            "cannot measure {control_qubits} of {n} qubits"
        )));
    }
    let mut rotated = joint.clone();
    for q in n - control_qubits..n {
        rotated.apply_single(q, &hadamard())?;
    }
    let dim_c = 1usize << control_qubits;
    let amps = rotated.amplitudes();
    let outcomes = (0..dim_c)
        .map(|s| {
            let slice: Vec<Complex64> = (0..amps.len() / dim_c).map(|t| amps[t * dim_c + s]).collect();
            Outcome::from_projection(
                sign_label(s, control_qubits),
                StateVector::new(slice).expect("power of two"),
            )
        })
        .collect();
    Ok(OutcomeEnsemble { outcomes })
}

fn measure_branches(spec: &SwitchSpec) -> OutcomeEnsemble {
    let protocol = spec.protocol;
    let d = protocol.control_qubits();
    let branches: Vec<StateVector> = (0..protocol.num_branches()).map(|j| spec.branch_state(j)).collect();
    let control = spec.control.amplitudes();
    let norm = (1u64 << d) as f64;
    let outcomes = (0..1usize << d)
        .map(|s| {
            let mut acc = branches[0].scaled(Complex64::new(0.0, 0.0));
            for (j, b) in branches.iter().enumerate() {
                let w = control[j] * coherent_sign(s, j) / norm.sqrt();
                acc.add_scaled(w, b).expect("same size");
            }
            Outcome::from_projection(sign_label(s, d), acc)
        })
        .collect();
    OutcomeEnsemble { outcomes }
}

/// Two-order protocols: outcomes `+` and `-` with states (→V ± ←V)|φ⟩/√L± and
/// probabilities L±/4.
pub fn run_two_order(spec: &SwitchSpec) -> Result<OutcomeEnsemble> {
    if !spec.protocol.is_two_order() {
        return Err(Error::InvalidSpec(
            "run_two_order needs a single, Bell or GHZ protocol".into(),
        ));
    }
    Ok(measure_branches(spec))
}

/// W protocols: 2^d outcomes labelled by sign strings over the control qubits.
pub fn run_w(spec: &SwitchSpec) -> Result<OutcomeEnsemble> {
    if spec.protocol.is_two_order() {
        return Err(Error::InvalidSpec("run_w needs a W protocol".into()));
    }
    Ok(measure_branches(spec))
}

pub fn run(spec: &SwitchSpec) -> OutcomeEnsemble {
    measure_branches(spec)
}
