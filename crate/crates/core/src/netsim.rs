//! Networked switch constructions on one flat state vector.
//!
//! * Entanglement mapping: control qubit i (of an entangled control register)
//!   selects the order of pair i acting on client i. Measuring the controls in
//!   the coherent basis hands the control's correlations to the clients.
//! * Hierarchical distribution: a coordinator prepares an m-qubit control
//!   state; entangler j uses control qubit j to drive a two-order switch on its
//!   k_j clients. With a GHZ coordinator and orthogonal branch vectors on every
//!   client, each measurement branch is a GHZ state over all clients, up to
//!   local unitaries.
//!
//! Layout: clients first (entangler by entangler), then one control qubit per
//! switch. Flat vectors are capped at [`MAX_QUBITS`].

use crate::error::{Error, Result};
use crate::gates::UnitaryPair;
use crate::parallel::map_ordered;
use crate::qla::{eigvals_hermitian, kron_all, ComplexMatrix, StateVector};
use crate::switch::measure_control;
use crate::verify::{apply_local, branch_basis_lu, canonical_lu_pairs, ghz_fidelity_up_to_phase};

pub const MAX_QUBITS: usize = 12;
/// Operator-Schmidt rank threshold: λ₂ ≤ this · λ₁ counts as rank one.
const SCHMIDT_RATIO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Entangler {
    pub id: String,
    pub pairs: Vec<UnitaryPair>,
    pub inputs: Vec<StateVector>,
}

impl Entangler {
    pub fn new(id: impl Into<String>, pairs: Vec<UnitaryPair>, inputs: Vec<StateVector>) -> Result<Self> {
        let id = id.into();
        if pairs.len() != inputs.len() {
            return Err(Error::InvalidTopology(format!(
                "entangler {id}: {} pairs for {} inputs",
                pairs.len(),
                inputs.len()
            )));
        }
        if pairs.len() < 2 {
            return Err(Error::InvalidTopology(format!(
                "entangler {id} needs at least 2 clients"
            )));
        }
        if let Some(i) = inputs.iter().position(|s| s.num_qubits() != 1) {
            return Err(Error::InvalidTopology(format!(
                "entangler {id}: input {i} is not a single qubit"
            )));
        }
        Ok(Self { id, pairs, inputs })
    }

    /// `clients` copies of the same pair and input.
    pub fn uniform(id: impl Into<String>, clients: usize, pair: &UnitaryPair, input: &StateVector) -> Result<Self> {
        Self::new(id, vec![pair.clone(); clients], vec![input.clone(); clients])
    }

    pub fn clients(&self) -> usize {
        self.pairs.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoordinatorState {
    /// (|0…0⟩ + |1…1⟩)/√2 over the entanglers' control qubits.
    #[default]
    Ghz,
    /// |+⟩ on every control qubit: independent switches.
    ProductPlus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub coordinator: String,
    pub coordinator_state: CoordinatorState,
    pub entanglers: Vec<Entangler>,
}

impl Topology {
    pub fn new(
        coordinator: impl Into<String>,
        coordinator_state: CoordinatorState,
        entanglers: Vec<Entangler>,
    ) -> Result<Self> {
        let coordinator = coordinator.into();
        if entanglers.is_empty() {
            return Err(Error::InvalidTopology("no entanglers".into()));
        }
        let mut ids: Vec<&str> = entanglers
            .iter()
            .map(|e| e.id.as_str())
            .chain([coordinator.as_str()])
            .collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidTopology(format!("duplicate node id {}", w[0])));
        }
        let topo = Self {
            coordinator,
            coordinator_state,
            entanglers,
        };
        let total = topo.num_clients() + topo.entanglers.len();
        if total > MAX_QUBITS {
            return Err(Error::InvalidTopology(format!(
                "{total} qubits exceed the state-vector cap of {MAX_QUBITS}"
            )));
        }
        Ok(topo)
    }

    /// `m` entanglers with `k` clients each, all with the same pair and input.
    pub fn uniform(m: usize, k: usize, pair: &UnitaryPair, input: &StateVector) -> Result<Self> {
        let entanglers = (1..=m)
            .map(|j| Entangler::uniform(format!("e{j}"), k, pair, input))
            .collect::<Result<Vec<_>>>()?;
        Self::new("e0", CoordinatorState::Ghz, entanglers)
    }

    pub fn num_clients(&self) -> usize {
        self.entanglers.iter().map(Entangler::clients).sum()
    }

    fn client_pairs(&self) -> impl Iterator<Item = (&UnitaryPair, &StateVector)> {
        self.entanglers.iter().flat_map(|e| e.pairs.iter().zip(&e.inputs))
    }

    /// Entangler index serving each client, in client order.
    fn client_owner(&self) -> Vec<usize> {
        self.entanglers
            .iter()
            .enumerate()
            .flat_map(|(j, e)| std::iter::repeat_n(j, e.clients()))
            .collect()
    }
}

/// One coherent-basis measurement branch of the control register.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchResult {
    pub control_outcome: String,
    pub probability: f64,
    /// `None` for unreachable branches.
    pub client_state: Option<StateVector>,
    /// GHZ fidelity, up to the relative phase, after the branch-basis local unitaries.
    pub ghz_fidelity: Option<f64>,
}

/// Applies, for every client, its forward order when the driving control
/// qubit is |0⟩ and its backward order when it is |1⟩.
fn apply_switches(state: &mut StateVector, pairs: &[&UnitaryPair], driver: &[usize]) -> Result<()> {
    let clients = pairs.len();
    for (i, (p, &d)) in pairs.iter().zip(driver).enumerate() {
        let control = clients + d;
        state.apply_controlled(control, false, i, &p.forward_order())?;
        state.apply_controlled(control, true, i, &p.backward_order())?;
    }
    Ok(())
}

fn branches(joint: &StateVector, controls: usize, lus: &[ComplexMatrix]) -> Result<Vec<BranchResult>> {
    let ensemble = measure_control(joint, controls)?;
    let results = map_ordered(ensemble.outcomes, |o| -> Result<BranchResult> {
        let ghz_fidelity = match &o.state {
            Some(s) => Some(ghz_fidelity_up_to_phase(&apply_local(s, lus)?)),
            None => None,
        };
        Ok(BranchResult {
            control_outcome: o.label,
            probability: o.probability,
            client_state: o.state,
            ghz_fidelity,
        })
    });
    results.into_iter().collect()
}

/// Entanglement mapping: control qubit i drives the switch on client i.
pub fn map_entanglement(
    control: &StateVector,
    pairs: &[UnitaryPair],
    inputs: &[StateVector],
) -> Result<Vec<BranchResult>> {
    let n = pairs.len();
    if inputs.len() != n || control.num_qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} pairs, {} inputs and a {}-qubit control",
            n,
            inputs.len(),
            control.num_qubits()
        )));
    }
    if 2 * n > MAX_QUBITS {
        return Err(Error::InvalidTopology(format!(
            "{} qubits exceed the cap of {MAX_QUBITS}",
            2 * n
        )));
    }
    control.ensure_normalized(1e-10)?;
    let mut joint = StateVector::product(inputs)?.tensor(control);
    let refs: Vec<&UnitaryPair> = pairs.iter().collect();
    let driver: Vec<usize> = (0..n).collect();
    apply_switches(&mut joint, &refs, &driver)?;
    let lus = pairs
        .iter()
        .zip(inputs)
        .map(|(p, phi)| branch_basis_lu(p, phi))
        .collect::<Result<Vec<_>>>()?;
    branches(&joint, n, &lus)
}

fn coordinator_register(topo: &Topology) -> StateVector {
    let m = topo.entanglers.len();
    match topo.coordinator_state {
        CoordinatorState::Ghz => StateVector::ghz(m),
        CoordinatorState::ProductPlus => StateVector::product(&vec![StateVector::plus(); m]).expect("m >= 1"),
    }
}

/// (clients ⊗ controls) state after every entangler acted, before measurement.
pub fn hierarchy_joint_state(topo: &Topology) -> Result<StateVector> {
    let inputs: Vec<StateVector> = topo.client_pairs().map(|(_, phi)| phi.clone()).collect();
    let pairs: Vec<&UnitaryPair> = topo.client_pairs().map(|(p, _)| p).collect();
    let mut joint = StateVector::product(&inputs)?.tensor(&coordinator_register(topo));
    apply_switches(&mut joint, &pairs, &topo.client_owner())?;
    Ok(joint)
}

/// Coordinator plus edge entanglers. Refuses, naming the client, when a
/// client's branch vectors are not orthogonal.
pub fn run_hierarchy(topo: &Topology) -> Result<Vec<BranchResult>> {
    let pairs: Vec<(UnitaryPair, StateVector)> = topo.client_pairs().map(|(p, s)| (p.clone(), s.clone())).collect();
    let lus = canonical_lu_pairs(&pairs)?;
    let joint = hierarchy_joint_state(topo)?;
    branches(&joint, topo.entanglers.len(), &lus)
}

/// Per-control-value client operator, extracted from the simulation kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTerm {
    /// Control register basis state, as a sign-free bit string (`0`/`1`).
    pub control: String,
    /// Largest amplitude leaking into any other control value.
    pub leakage: f64,
    /// Per client, λ₂/λ₁ of the realigned block across the client|rest cut.
    pub schmidt_ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub terms: Vec<OperatorTerm>,
}

impl AuditReport {
    /// True when every term is a control projector times a product of
    /// single-client operators.
    pub fn no_interaction(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.leakage < 1e-12 && t.schmidt_ratios.iter().all(|&r| r <= SCHMIDT_RATIO_TOL))
    }
}

/// Decomposes the joint operator built by [`run_hierarchy`] into
/// Σ_c B_c ⊗ |c⟩⟨c| by driving the same kernels on every basis input, and
/// measures how far each B_c is from a tensor product over clients.
pub fn audit_no_interaction(topo: &Topology) -> Result<AuditReport> {
    let n = topo.num_clients();
    let m = topo.entanglers.len();
    let pairs: Vec<&UnitaryPair> = topo.client_pairs().map(|(p, _)| p).collect();
    let owner = topo.client_owner();
    let dim = 1usize << n;
    let dim_c = 1usize << m;
    let terms = (0..dim_c)
        .map(|c| {
            let mut block = ComplexMatrix::zeros(dim, dim);
            let mut leakage: f64 = 0.0;
            for x in 0..dim {
                let mut s = StateVector::basis(n + m, x * dim_c + c);
                apply_switches(&mut s, &pairs, &owner)?;
                for (idx, z) in s.amplitudes().iter().enumerate() {
                    if idx % dim_c == c {
                        block.set(idx / dim_c, x, *z);
                    } else {
                        leakage = leakage.max(z.norm());
                    }
                }
            }
            let schmidt_ratios = (0..n)
                .map(|q| schmidt_ratio(&block, n, q))
                .collect::<Result<Vec<_>>>()?;
            let control = (0..m)
                .map(|k| if c >> (m - 1 - k) & 1 == 1 { '1' } else { '0' })
                .collect();
            Ok(OperatorTerm {
                control,
                leakage,
                schmidt_ratios,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AuditReport { terms })
}

/// λ₂/λ₁ of R R†, where R realigns `block` so that qubit `q`'s (out, in)
/// indices label rows and the remaining qubits' indices label columns.
fn schmidt_ratio(block: &ComplexMatrix, n: usize, q: usize) -> Result<f64> {
    let bit = 1usize << (n - 1 - q);
    let mut gram = ComplexMatrix::zeros(4, 4);
    let dim = 1usize << n;
    for r in 0..dim {
        if r & bit != 0 {
            continue;
        }
        for c in 0..dim {
            if c & bit != 0 {
                continue;
            }
            // Row vector of R for the rest-indices (r, c): the 2x2 block on qubit q.
            let v = [
                block.get(r, c),
                block.get(r, c | bit),
                block.get(r | bit, c),
                block.get(r | bit, c | bit),
            ];
            for a in 0..4 {
                for b in 0..4 {
                    let g = gram.get(a, b) + v[a] * v[b].conj();
                    gram.set(a, b, g);
                }
            }
        }
    }
    let ev = eigvals_hermitian(&gram)?;
    Ok(if ev[0] > 0.0 { ev[1].max(0.0) / ev[0] } else { 0.0 })
}

/// Dense B_c for control value `c` built from the pairs directly, for cross-checks.
pub fn expected_block(topo: &Topology, c: usize) -> ComplexMatrix {
    let m = topo.entanglers.len();
    let factors: Vec<ComplexMatrix> = topo
        .client_pairs()
        .zip(topo.client_owner())
        .map(|((p, _), j)| {
            if c >> (m - 1 - j) & 1 == 1 {
                p.backward_order()
            } else {
                p.forward_order()
            }
        })
        .collect();
    kron_all(&factors).expect("at least one client")
}
