//! Executable forms of the generation conditions.
//!
//! Everything hangs on one scalar per target qubit, the overlap
//! ⟨φ|←U†→U|φ⟩ between the two branch vectors →U|φ⟩ and ←U|φ⟩:
//!
//! * all overlaps zero: every outcome is maximally entangled (Bell), GHZ-like
//!   or W-like, and local unitaries map the branch vectors to |0⟩, |1⟩;
//! * some overlap of unit modulus: that qubit factors out of every outcome.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::UnitaryPair;
use crate::metrics::{evaluate, linear_entropy, MetricKind};
use crate::qla::{apply, ComplexMatrix, StateVector};
use crate::switch::{coherent_sign, run, Protocol, SwitchSpec};

/// Tolerance on condition scalars.
pub const CONDITION_TOL: f64 = 1e-9;
const GRAM_SCHMIDT_FLOOR: f64 = 1e-12;

/// ⟨φ| (ŨU)† (UŨ) |φ⟩.
pub fn overlap(pair: &UnitaryPair, phi: &StateVector) -> Result<Complex64> {
    let a = apply(&pair.forward_order(), phi)?;
    let b = apply(&pair.backward_order(), phi)?;
    b.inner(&a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub per_qubit_overlap: Vec<Complex64>,
    pub all_orthogonal: bool,
    pub any_aligned: bool,
    pub tol: f64,
}

impl ConditionReport {
    fn from_overlaps(per_qubit_overlap: Vec<Complex64>, tol: f64) -> Self {
        let all_orthogonal = per_qubit_overlap.iter().all(|z| z.norm() < tol);
        let any_aligned = per_qubit_overlap.iter().any(|z| z.norm() > 1.0 - tol);
        Self {
            per_qubit_overlap,
            all_orthogonal,
            any_aligned,
            tol,
        }
    }

    /// Qubits whose branch vectors coincide up to phase.
    pub fn aligned_qubits(&self) -> Vec<usize> {
        self.indices_where(|m| m > 1.0 - self.tol)
    }

    /// First qubit breaking the orthogonality condition, with its overlap modulus.
    pub fn first_violation(&self) -> Option<(usize, f64)> {
        self.per_qubit_overlap
            .iter()
            .map(|z| z.norm())
            .enumerate()
            .find(|&(_, m)| m >= self.tol)
    }

    fn indices_where(&self, pred: impl Fn(f64) -> bool) -> Vec<usize> {
        (0..self.per_qubit_overlap.len())
            .filter(|&i| pred(self.per_qubit_overlap[i].norm()))
            .collect()
    }
}

/// Per-qubit overlaps of `spec` against `tol`. The same scalar governs the
/// Bell, GHZ and W protocols.
pub fn check_max_entanglement(spec: &SwitchSpec, tol: f64) -> ConditionReport {
    let overlaps = spec
        .pairs()
        .iter()
        .zip(spec.input())
        .map(|(p, phi)| overlap(p, phi).expect("validated spec"))
        .collect();
    ConditionReport::from_overlaps(overlaps, tol)
}

/// True when some qubit has ←U|φ⟩ = →U|φ⟩ up to a global phase.
pub fn check_separability(spec: &SwitchSpec, tol: f64) -> bool {
    check_max_entanglement(spec, tol).any_aligned
}

/// |0⟩⟨a| + |1⟩⟨b̂| with a = UŨ|φ⟩ and b̂ the normalized part of ŨU|φ⟩
/// orthogonal to a. When the branch vectors are parallel, b̂ is the
/// orthogonal complement of a.
pub fn branch_basis_lu(pair: &UnitaryPair, phi: &StateVector) -> Result<ComplexMatrix> {
    let a = apply(&pair.forward_order(), phi)?.normalized()?;
    let b = apply(&pair.backward_order(), phi)?;
    let mut b_perp = b.clone();
    b_perp.add_scaled(-a.inner(&b)?, &a)?;
    let b_hat = if b_perp.norm() < GRAM_SCHMIDT_FLOOR {
        let x = a.amplitudes();
        StateVector::new(vec![-x[1].conj(), x[0].conj()])?
    } else {
        b_perp.normalized()?
    };
    let (x, y) = (a.amplitudes(), b_hat.amplitudes());
    Ok(ComplexMatrix::from_rows([
        [x[0].conj(), x[1].conj()],
        [y[0].conj(), y[1].conj()],
    ]))
}

/// Local unitaries taking each qubit's branch vectors to |0⟩ and |1⟩.
/// Refuses unless the orthogonality condition holds at [`CONDITION_TOL`].
pub fn canonical_lu(spec: &SwitchSpec) -> Result<Vec<ComplexMatrix>> {
    let pairs: Vec<(UnitaryPair, StateVector)> =
        spec.pairs().iter().cloned().zip(spec.input().iter().cloned()).collect();
    canonical_lu_pairs(&pairs)
}

/// [`canonical_lu`] for an explicit list of (pair, input) per qubit.
pub fn canonical_lu_pairs(pairs: &[(UnitaryPair, StateVector)]) -> Result<Vec<ComplexMatrix>> {
    let overlaps = pairs
        .iter()
        .map(|(p, phi)| overlap(p, phi))
        .collect::<Result<Vec<_>>>()?;
    let report = ConditionReport::from_overlaps(overlaps, CONDITION_TOL);
    if let Some((qubit, magnitude)) = report.first_violation() {
        return Err(Error::ConditionViolated { qubit, magnitude });
    }
    pairs.iter().map(|(p, phi)| branch_basis_lu(p, phi)).collect()
}

/// Applies one single-qubit unitary per qubit.
pub fn apply_local(state: &StateVector, unitaries: &[ComplexMatrix]) -> Result<StateVector> {
    if unitaries.len() != state.num_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{} local unitaries for {} qubits",
            unitaries.len(),
            state.num_qubits()
        )));
    }
    let mut out = state.clone();
    for (q, u) in unitaries.iter().enumerate() {
        out.apply_single(q, u)?;
    }
    Ok(out)
}

/// max over θ of |⟨GHZ_θ|ψ⟩|² with |GHZ_θ⟩ = (|0…0⟩ + e^{iθ}|1…1⟩)/√2.
pub fn ghz_fidelity_up_to_phase(state: &StateVector) -> f64 {
    let a = state.amplitudes();
    let s = a[0].norm() + a[a.len() - 1].norm();
    (s * s / 2.0).min(1.0)
}

/// Σ_j sign(s, j)|e_j⟩/√n, where |e_j⟩ has qubit j set and the others clear.
pub fn signed_w(n: usize, outcome: usize) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    let a = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        amps[1 << (n - 1 - j)] = Complex64::new(coherent_sign(outcome, j) * a, 0.0);
    }
    StateVector::new(amps).expect("power of two")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOutcome {
    pub label: String,
    pub probability: f64,
    /// Fidelity of the locally rotated outcome with the canonical target.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LuReduction {
    pub unitaries: Vec<ComplexMatrix>,
    pub outcomes: Vec<ReducedOutcome>,
}

/// Rotates every reachable outcome with [`canonical_lu`] and compares it with
/// the canonical target: GHZ up to the relative phase for two-order protocols
/// (|Φ±⟩ for Bell), the signed W state of the same outcome for W protocols.
pub fn reduce(spec: &SwitchSpec) -> Result<LuReduction> {
    let unitaries = canonical_lu(spec)?;
    let n = spec.num_targets();
    let ensemble = run(spec);
    let outcomes = ensemble
        .outcomes
        .iter()
        .enumerate()
        .filter_map(|(s, o)| o.state.as_ref().map(|st| (s, o, st)))
        .map(|(s, o, st)| {
            let reduced = apply_local(st, &unitaries)?;
            let fidelity = match spec.protocol() {
                Protocol::W(_) => signed_w(n, s).fidelity(&reduced)?,
                _ => ghz_fidelity_up_to_phase(&reduced),
            };
            Ok(ReducedOutcome {
                label: o.label.clone(),
                probability: o.probability,
                fidelity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LuReduction { unitaries, outcomes })
}

/// Everything `verify` reports about one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeCertificate {
    pub label: String,
    pub probability: f64,
    pub reachable: bool,
    pub metric: Option<(MetricKind, f64)>,
    /// Only for 3-qubit outcomes.
    pub class: Option<StateClass>,
    /// Only when [`canonical_lu`] succeeds.
    pub lu_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub condition: ConditionReport,
    pub separable: bool,
    pub outcomes: Vec<OutcomeCertificate>,
}

/// Condition report plus, per outcome, its entanglement measure, its class
/// (3 qubits) and its fidelity with the canonical target after the local
/// reduction.
pub fn certify(spec: &SwitchSpec, tol: f64) -> Result<Certificate> {
    let condition = check_max_entanglement(spec, tol);
    let separable = condition.any_aligned;
    let reduction = reduce(spec).ok();
    let metric_kind = spec.protocol().default_metric();
    let outcomes = run(spec)
        .outcomes
        .into_iter()
        .map(|o| {
            let (metric, class) = match &o.state {
                Some(s) => (
                    metric_kind.map(|k| evaluate(k, s).map(|v| (k, v))).transpose()?,
                    if s.num_qubits() == 3 {
                        Some(certify_class(s, tol)?)
                    } else {
                        None
                    },
                ),
                None => (None, None),
            };
            let lu_fidelity = reduction
                .as_ref()
                .and_then(|r| r.outcomes.iter().find(|x| x.label == o.label))
                .map(|x| x.fidelity);
            Ok(OutcomeCertificate {
                reachable: o.is_reachable(),
                label: o.label,
                probability: o.probability,
                metric,
                class,
                lu_fidelity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certificate {
        condition,
        separable,
        outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateClass {
    Separable,
    Biseparable,
    GhzClass,
    WClass,
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateClass::Separable => "separable",
            StateClass::Biseparable => "biseparable",
            StateClass::GhzClass => "GHZ-class",
            StateClass::WClass => "W-class",
        })
    }
}

/// Three-tangle 4|d₁ − 2d₂ + 4d₃| (Cayley hyperdeterminant) of a 3-qubit pure state.
pub fn three_tangle(state: &StateVector) -> Result<f64> {
    if state.num_qubits() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "three-tangle needs 3 qubits, got {}",
            state.num_qubits()
        )));
    }
    let a = state.amplitudes();
    let (a000, a001, a010, a011, a100, a101, a110, a111) = (a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]);
    let sq = |z: Complex64| z * z;
    let d1 = sq(a000) * sq(a111) + sq(a001) * sq(a110) + sq(a010) * sq(a101) + sq(a100) * sq(a011);
    let d2 = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    let norm2 = state.norm_sqr();
    Ok(4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm() / (norm2 * norm2))
}

/// Entanglement class of a 3-qubit pure state: pure single-qubit marginals
/// decide separability, then the three-tangle separates GHZ from W.
pub fn certify_class(state: &StateVector, tol: f64) -> Result<StateClass> {
    if state.num_qubits() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "class certificate needs 3 qubits, got {}",
            state.num_qubits()
        )));
    }
    state.ensure_normalized(1e-10)?;
    let pure_cuts = (0..3)
        .map(|q| linear_entropy(state, &[q]).map(|le| le < tol))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&p| p)
        .count();
    Ok(match pure_cuts {
        3 => StateClass::Separable,
        1 | 2 => StateClass::Biseparable,
        _ if three_tangle(state)? > tol => StateClass::GhzClass,
        _ => StateClass::WClass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{pauli, ry, Axis};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn overlap_examples() {
        for &(two_lambda, alpha) in &[(0.3, 0.1), (1.0, 0.5), (2.5, 0.9)] {
            let o = overlap(&UnitaryPair::z_ry(two_lambda), &StateVector::eta(alpha).unwrap()).unwrap();
            assert!((o - c(two_lambda.cos())).norm() < 1e-14);
        }
        assert_eq!(
            overlap(&UnitaryPair::identity(), &StateVector::eta(0.3).unwrap()).unwrap(),
            c(1.0)
        );
        let zx = UnitaryPair::new(pauli(Axis::Z), pauli(Axis::X)).unwrap();
        assert!((overlap(&zx, &StateVector::basis(1, 0)).unwrap() - c(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn ghz_default_satisfies_condition() {
        let spec = SwitchSpec::z_ry_family(Protocol::Ghz(3), FRAC_PI_2, 0.5).unwrap();
        let r = check_max_entanglement(&spec, CONDITION_TOL);
        assert!(r.all_orthogonal && !r.any_aligned);
        assert!(!check_separability(&spec, CONDITION_TOL));
        assert_eq!(r.first_violation(), None);
    }

    #[test]
    fn identity_pair_is_aligned() {
        let eta = StateVector::eta(0.5).unwrap();
        let pairs = vec![
            UnitaryPair::z_ry(FRAC_PI_2),
            UnitaryPair::identity(),
            UnitaryPair::z_ry(FRAC_PI_2),
        ];
        let spec = SwitchSpec::new(Protocol::Ghz(3), pairs, vec![eta; 3]).unwrap();
        let r = check_max_entanglement(&spec, CONDITION_TOL);
        assert!(!r.all_orthogonal && r.any_aligned);
        assert_eq!(r.aligned_qubits(), vec![1]);
        assert_eq!(r.first_violation().unwrap().0, 1);
        assert!(matches!(
            canonical_lu(&spec),
            Err(Error::ConditionViolated { qubit: 1, .. })
        ));
    }

    #[test]
    fn bell_with_identity_tilde_is_separable() {
        let p = UnitaryPair::new(pauli(Axis::Z), ComplexMatrix::identity(2)).unwrap();
        let spec = SwitchSpec::new(Protocol::Bell, vec![p; 2], vec![StateVector::eta(0.4).unwrap(); 2]).unwrap();
        assert!(check_separability(&spec, CONDITION_TOL));
    }

    #[test]
    fn canonical_lu_maps_branches_to_basis() {
        let spec = SwitchSpec::z_ry_family(Protocol::Ghz(3), FRAC_PI_2, 0.5).unwrap();
        let lus = canonical_lu(&spec).unwrap();
        for ((u, p), phi) in lus.iter().zip(spec.pairs()).zip(spec.input()) {
            assert!(u.is_unitary(1e-12));
            let a = apply(u, &apply(&p.forward_order(), phi).unwrap()).unwrap();
            let b = apply(u, &apply(&p.backward_order(), phi).unwrap()).unwrap();
            assert!((a.fidelity(&StateVector::basis(1, 0)).unwrap() - 1.0).abs() < 1e-12);
            assert!((b.fidelity(&StateVector::basis(1, 1)).unwrap() - 1.0).abs() < 1e-12);
        }
        for o in reduce(&spec).unwrap().outcomes {
            assert!((o.fidelity - 1.0).abs() < 1e-12, "{}: {}", o.label, o.fidelity);
        }
    }

    #[test]
    fn canonical_input_gives_diagonal_lu() {
        // U = σ_x R, Ũ = R† with R = R_y(π/2): UŨ|1⟩ = |0⟩ and ŨU|1⟩ = R†σ_x R|1⟩ = ±|1⟩.
        let r = ry(FRAC_PI_2);
        let pair = UnitaryPair::new(&pauli(Axis::X) * &r, r.adjoint()).unwrap();
        let lu = branch_basis_lu(&pair, &StateVector::basis(1, 1)).unwrap();
        assert!(lu.get(0, 1).norm() < 1e-14 && lu.get(1, 0).norm() < 1e-14);
        assert!((lu.get(0, 0).norm() - 1.0).abs() < 1e-14 && (lu.get(1, 1).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lenient_lu_handles_parallel_branches() {
        let lu = branch_basis_lu(&UnitaryPair::identity(), &StateVector::eta(0.3).unwrap()).unwrap();
        assert!(lu.is_unitary(1e-14));
    }

    #[test]
    fn w_reduction_matches_signed_w() {
        let spec = SwitchSpec::z_ry_family(Protocol::W(3), FRAC_PI_2, 0.5).unwrap();
        let red = reduce(&spec).unwrap();
        assert_eq!(red.outcomes.len(), 4);
        for o in &red.outcomes {
            assert!((o.fidelity - 1.0).abs() < 1e-12, "{}: {}", o.label, o.fidelity);
        }
    }

    #[test]
    fn ghz_fidelity_absorbs_relative_phase() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(h);
        amps[7] = Complex64::from_polar(h, 1.3);
        let s = StateVector::new(amps).unwrap();
        assert!((ghz_fidelity_up_to_phase(&s) - 1.0).abs() < 1e-15);
        assert!((ghz_fidelity_up_to_phase(&StateVector::basis(3, 0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn three_tangle_reference_values() {
        assert!((three_tangle(&StateVector::ghz(3)).unwrap() - 1.0).abs() < 1e-14);
        assert!(three_tangle(&StateVector::w(3)).unwrap() < 1e-15);
        assert!(three_tangle(&StateVector::basis(3, 5)).unwrap() < 1e-15);
        assert!(three_tangle(&StateVector::ghz(2)).is_err());
    }

    #[test]
    fn certify_reports_every_outcome() {
        let spec = SwitchSpec::z_ry_family(Protocol::Ghz(3), FRAC_PI_2, 0.5).unwrap();
        let cert = certify(&spec, CONDITION_TOL).unwrap();
        assert!(cert.condition.all_orthogonal && !cert.separable);
        assert_eq!(cert.outcomes.len(), 2);
        for o in &cert.outcomes {
            assert_eq!(o.class, Some(StateClass::GhzClass));
            let (kind, value) = o.metric.unwrap();
            assert_eq!(kind, MetricKind::GmeConcurrence);
            assert!((value - 1.0).abs() < 1e-12);
            assert!((o.lu_fidelity.unwrap() - 1.0).abs() < 1e-12);
        }
        let edge = SwitchSpec::z_ry_family(Protocol::Bell, 0.0, 0.5).unwrap();
        let cert = certify(&edge, CONDITION_TOL).unwrap();
        assert!(cert.separable);
        assert!(!cert.outcomes[1].reachable && cert.outcomes[1].metric.is_none());
        assert!(cert
            .outcomes
            .iter()
            .all(|o| o.lu_fidelity.is_none() && o.class.is_none()));
    }

    #[test]
    fn certificates() {
        assert_eq!(
            certify_class(&StateVector::ghz(3), CONDITION_TOL).unwrap(),
            StateClass::GhzClass
        );
        assert_eq!(
            certify_class(&StateVector::w(3), CONDITION_TOL).unwrap(),
            StateClass::WClass
        );
        let bisep = StateVector::basis(1, 0).tensor(&StateVector::ghz(2));
        assert_eq!(certify_class(&bisep, CONDITION_TOL).unwrap(), StateClass::Biseparable);
        assert_eq!(
            certify_class(&StateVector::basis(3, 3), CONDITION_TOL).unwrap(),
            StateClass::Separable
        );
        assert!(certify_class(&StateVector::ghz(4), CONDITION_TOL).is_err());
    }

    #[test]
    fn switch_outputs_certify_as_expected() {
        let ghz = SwitchSpec::z_ry_family(Protocol::Ghz(3), 2.0 * FRAC_PI_4, 0.3).unwrap();
        for (_, s) in run(&ghz).reachable() {
            assert_eq!(certify_class(s, CONDITION_TOL).unwrap(), StateClass::GhzClass);
        }
        let w = SwitchSpec::z_ry_family(Protocol::W(3), 2.0 * FRAC_PI_4, 0.3).unwrap();
        for (_, s) in run(&w).reachable() {
            assert_eq!(certify_class(s, CONDITION_TOL).unwrap(), StateClass::WClass);
        }
        let flat = SwitchSpec::z_ry_family(Protocol::W(3), 0.0, 0.3).unwrap();
        for (_, s) in run(&flat).reachable() {
            assert_eq!(certify_class(s, CONDITION_TOL).unwrap(), StateClass::Separable);
        }
    }
}
