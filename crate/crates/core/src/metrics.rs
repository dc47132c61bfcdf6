//! Entanglement measures: two-qubit concurrence, GME concurrence of pure
//! states, and purities.
//!
//! Both measures are computed so that separable inputs come out at the level
//! of machine epsilon rather than its square root:
//!
//! * concurrence factors ρ = AA† and takes the singular values of A†(σ_y⊗σ_y)A*,
//!   which are exactly the square roots of the eigenvalues of ρρ̃ without
//!   taking a numerical square root;
//! * the linear entropy 1 − Tr ρ_A² of a pure state equals twice the sum of
//!   squared 2×2 minors of its amplitude matrix across the cut.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qla::{eigh, eigvals_hermitian, kron, scatter_offsets, ComplexMatrix, DensityMatrix, StateVector};

/// Eigenvalues of ρ below this are dropped from its factorization.
const RANK_CUTOFF: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Concurrence,
    GmeConcurrence,
    Purity,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Concurrence => "concurrence",
            MetricKind::GmeConcurrence => "gme_concurrence",
            MetricKind::Purity => "purity",
        })
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concurrence" => Ok(MetricKind::Concurrence),
            "gme_concurrence" | "gme" => Ok(MetricKind::GmeConcurrence),
            "purity" => Ok(MetricKind::Purity),
            other => Err(Error::Parse {
                input: other.into(),
                reason: "unknown metric".into(),
            }),
        }
    }
}

/// Value of a measure across one bipartition: `qubits` on one side, the rest on the other.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutValue {
    pub qubits: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub metric: MetricKind,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsystem_values: Option<Vec<CutValue>>,
}

/// Which bipartitions enter the minimum of the GME concurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutScan {
    #[default]
    SingleQubit,
    /// Every bipartition, each listed once by its smaller side.
    AllBipartitions,
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Wootters concurrence max{0, μ₁−μ₂−μ₃−μ₄} of a two-qubit density matrix, with
/// μ the decreasing square roots of the eigenvalues of ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y).
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a 2-qubit state, got {} qubits",
            rho.num_qubits()
        )));
    }
    let eig = eigh(rho.matrix())?;
    let kept: Vec<usize> = (0..4).filter(|&k| eig.values[k] > RANK_CUTOFF).collect();
    let r = kept.len();
    if r == 0 {
        return Err(Error::InvalidDensity(
            "density matrix has no positive eigenvalue".into(),
        ));
    }
    let mut a = ComplexMatrix::zeros(4, r);
    for (col, &k) in kept.iter().enumerate() {
        let v = eig.vector(k);
        let s = eig.values[k].sqrt();
        for (row, z) in v.iter().enumerate() {
            a.set(row, col, z * s);
        }
    }
    let sy = ComplexMatrix::from_rows([
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
    ]);
    let a_tilde = &kron(&sy, &sy) * &a.conj();
    let t = &a.adjoint() * &a_tilde;

    // Singular values of T are the nonnegative eigenvalues of [[0, T], [T†, 0]].
    let mut dilation = ComplexMatrix::zeros(2 * r, 2 * r);
    for i in 0..r {
        for j in 0..r {
            dilation.set(i, r + j, t.get(i, j));
            dilation.set(r + j, i, t.get(i, j).conj());
        }
    }
    let mut mu: Vec<f64> = eigvals_hermitian(&dilation)?
        .into_iter()
        .take(r)
        .map(|x| x.max(0.0))
        .collect();
    mu.resize(4, 0.0);
    Ok(clamp_unit(mu[0] - mu[1] - mu[2] - mu[3]))
}

/// 2|ψ₀₀ψ₁₁ − ψ₀₁ψ₁₀| for a normalized two-qubit pure state.
pub fn concurrence_pure(state: &StateVector) -> Result<f64> {
    if state.num_qubits() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a 2-qubit state, got {} qubits",
            state.num_qubits()
        )));
    }
    state.ensure_normalized(NORM_TOL)?;
    let a = state.amplitudes();
    Ok(clamp_unit(2.0 * (a[0] * a[3] - a[1] * a[2]).norm()))
}

/// Tr(ρ²).
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// 1 − Tr ρ_cut² for the pure state `state`, with `cut` the qubits kept.
/// The state need not be normalized.
pub fn linear_entropy(state: &StateVector, cut: &[usize]) -> Result<f64> {
    let n = state.num_qubits();
    let mut side: Vec<usize> = cut.to_vec();
    side.sort_unstable();
    side.dedup();
    if side.len() != cut.len() || side.iter().any(|&q| q >= n) {
        return Err(Error::InvalidQubits(format!("bad cut {cut:?} for {n} qubits")));
    }
    if side.is_empty() || side.len() == n {
        return Ok(0.0);
    }
    let other: Vec<usize> = (0..n).filter(|q| !side.contains(q)).collect();
    let (rows, cols) = if side.len() <= other.len() {
        (&side, &other)
    } else {
        (&other, &side)
    };
    let row_off = scatter_offsets(n, rows);
    let col_off = scatter_offsets(n, cols);
    let amps = state.amplitudes();
    let m: Vec<Vec<Complex64>> = row_off
        .iter()
        .map(|&r| col_off.iter().map(|&c| amps[r | c]).collect())
        .collect();

    let mut minors = 0.0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let (ri, rj) = (&m[i], &m[j]);
            for k in 0..ri.len() {
                for l in k + 1..ri.len() {
                    minors += (ri[k] * rj[l] - ri[l] * rj[k]).norm_sqr();
                }
            }
        }
    }
    let norm2 = state.norm_sqr();
    if norm2 == 0.0 {
        return Err(Error::NotNormalized(0.0));
    }
    Ok(2.0 * minors / (norm2 * norm2))
}

/// √(2(1 − Tr ρ_cut²)), the pure-state concurrence across one bipartition.
pub fn cut_concurrence(state: &StateVector, cut: &[usize]) -> Result<f64> {
    Ok(clamp_unit((2.0 * linear_entropy(state, cut)?).sqrt()))
}

/// GME concurrence minimized over single-qubit cuts.
pub fn gme_concurrence(state: &StateVector) -> Result<MetricReport> {
    gme_concurrence_with(state, CutScan::SingleQubit)
}

pub fn gme_concurrence_with(state: &StateVector, scan: CutScan) -> Result<MetricReport> {
    state.ensure_normalized(NORM_TOL)?;
    let n = state.num_qubits();
    if n < 2 {
        return Err(Error::InvalidQubits("GME concurrence needs at least 2 qubits".into()));
    }
    let cuts = match scan {
        CutScan::SingleQubit => (0..n).map(|q| vec![q]).collect(),
        CutScan::AllBipartitions => bipartitions(n),
    };
    let values = cuts
        .into_iter()
        .map(|qubits| {
            let value = cut_concurrence(state, &qubits)?;
            Ok(CutValue { qubits, value })
        })
        .collect::<Result<Vec<_>>>()?;
    let value = values.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    Ok(MetricReport {
        metric: MetricKind::GmeConcurrence,
        value,
        subsystem_values: Some(values),
    })
}

/// Evaluates `kind` on one pure state.
pub fn evaluate(kind: MetricKind, state: &StateVector) -> Result<f64> {
    match kind {
        MetricKind::Concurrence => concurrence(&DensityMatrix::from_pure(state)?),
        MetricKind::GmeConcurrence => Ok(gme_concurrence(state)?.value),
        MetricKind::Purity => Ok(DensityMatrix::from_pure(state)?.purity()),
    }
}

/// Smaller side of every bipartition of `n` qubits, ordered by size then lexicographically.
/// Halves of even `n` are listed once, by the side holding qubit 0.
pub fn bipartitions(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u64..1 << n)
        .filter_map(|mask| {
            let side: Vec<usize> = (0..n).filter(|&q| mask >> q & 1 == 1).collect();
            let keep = 2 * side.len() < n || (2 * side.len() == n && side[0] == 0);
            keep.then_some(side)
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qla::partial_trace;
    use crate::switch::{Protocol, SwitchSpec};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn pure(s: &StateVector) -> DensityMatrix {
        DensityMatrix::from_pure(s).unwrap()
    }

    fn w3_gme() -> f64 {
        2.0 * 2f64.sqrt() / 3.0
    }

    #[test]
    fn concurrence_of_bell_and_product() {
        assert!((concurrence(&pure(&StateVector::ghz(2))).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(concurrence(&pure(&StateVector::basis(2, 0))).unwrap(), 0.0);
        assert!((concurrence_pure(&StateVector::ghz(2)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn concurrence_of_werner_states() {
        // ρ = p|Φ⁺⟩⟨Φ⁺| + (1−p)I/4 has C = max(0, (3p−1)/2).
        let bell = pure(&StateVector::ghz(2));
        for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let m = &bell.matrix().scale(c(p)) + &ComplexMatrix::identity(4).scale(c((1.0 - p) / 4.0));
            let got = concurrence(&DensityMatrix::new(m).unwrap()).unwrap();
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((got - want).abs() < 1e-12, "p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn concurrence_of_complex_pure_state() {
        // (|01⟩ + i|10⟩)/√2 is maximally entangled; dropping conjugation in ρ̃ would give 0.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::new(vec![c(0.0), c(h), Complex64::new(0.0, h), c(0.0)]).unwrap();
        assert!((concurrence(&pure(&s)).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn bell_switch_output_matches_pure_state_identity() {
        let spec = SwitchSpec::z_ry_family(Protocol::Bell, 2.0 * FRAC_PI_8, 0.5).unwrap();
        let ens = crate::switch::run(&spec);
        let plus = ens.get("+").unwrap().state.clone().unwrap();
        let c_mixed = concurrence(&pure(&plus)).unwrap();
        let rho_a = partial_trace(&pure(&plus), &[0]).unwrap();
        let oracle = (2.0 * (1.0 - rho_a.purity())).sqrt();
        assert!(c_mixed > 0.0 && c_mixed < 1.0);
        assert!((c_mixed - oracle).abs() < 1e-9);
    }

    #[test]
    fn rejects_wrong_sizes() {
        assert!(concurrence(&pure(&StateVector::ghz(3))).is_err());
        assert!(concurrence_pure(&StateVector::ghz(3)).is_err());
        assert!(gme_concurrence(&StateVector::new(vec![c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap()).is_err());
    }

    #[test]
    fn gme_of_reference_states() {
        let ghz = gme_concurrence(&StateVector::ghz(3)).unwrap();
        assert!((ghz.value - 1.0).abs() < 1e-14);
        assert_eq!(ghz.subsystem_values.as_ref().unwrap().len(), 3);

        let w = gme_concurrence(&StateVector::w(3)).unwrap();
        assert!((w.value - w3_gme()).abs() < 1e-14);

        let bisep = StateVector::basis(1, 0).tensor(&StateVector::ghz(2));
        let r = gme_concurrence(&bisep).unwrap();
        assert!(r.value < 1e-15);
        let per_cut: Vec<f64> = r.subsystem_values.unwrap().iter().map(|c| c.value).collect();
        assert!(per_cut[0] < 1e-15 && (per_cut[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_states_are_exactly_zero() {
        let eta = StateVector::eta(0.3).unwrap();
        let prod = StateVector::product(&[eta.clone(), eta.clone(), eta]).unwrap();
        assert!(gme_concurrence(&prod).unwrap().value < 1e-15);
    }

    #[test]
    fn all_bipartitions_can_be_stricter() {
        // |Φ⁺⟩⊗|Φ⁺⟩ on qubits (0,1),(2,3): every single-qubit cut is maximal but
        // the {0,1}|{2,3} cut is pure.
        let s = StateVector::ghz(2).tensor(&StateVector::ghz(2));
        assert!((gme_concurrence(&s).unwrap().value - 1.0).abs() < 1e-14);
        let full = gme_concurrence_with(&s, CutScan::AllBipartitions).unwrap();
        assert!(full.value < 1e-15);
        assert_eq!(full.subsystem_values.unwrap().len(), 7);
    }

    #[test]
    fn bipartition_listing() {
        assert_eq!(bipartitions(3), vec![vec![0], vec![1], vec![2]]);
        let four = bipartitions(4);
        assert_eq!(four.len(), 7);
        assert_eq!(&four[4..], &[vec![0, 1], vec![0, 2], vec![0, 3]]);
    }

    #[test]
    fn linear_entropy_matches_partial_trace() {
        let spec = SwitchSpec::z_ry_family(Protocol::Ghz(4), 0.6, 0.35).unwrap();
        let s = crate::switch::run(&spec).get("-").unwrap().state.clone().unwrap();
        let rho = pure(&s);
        for cut in [vec![0], vec![2], vec![1, 3], vec![0, 1, 2]] {
            let via_trace = 1.0 - partial_trace(&rho, &cut).unwrap().purity();
            assert!((linear_entropy(&s, &cut).unwrap() - via_trace).abs() < 1e-13);
        }
        assert!(linear_entropy(&s, &[0, 0]).is_err());
        assert!(linear_entropy(&s, &[4]).is_err());
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&pure(&StateVector::w(3))) - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::new(ComplexMatrix::identity(2).scale(c(0.5))).unwrap();
        assert!((purity(&mixed) - 0.5).abs() < 1e-15);
        let marginal = partial_trace(&pure(&StateVector::w(3)), &[1]).unwrap();
        assert!((purity(&marginal) - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn ghz_ridge_is_maximal() {
        let spec = SwitchSpec::z_ry_family(Protocol::Ghz(3), 2.0 * FRAC_PI_4, 0.2).unwrap();
        for (_, s) in crate::switch::run(&spec).reachable() {
            assert!((gme_concurrence(s).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_names_round_trip() {
        for k in [MetricKind::Concurrence, MetricKind::GmeConcurrence, MetricKind::Purity] {
            assert_eq!(k.to_string().parse::<MetricKind>().unwrap(), k);
        }
        assert!("negativity".parse::<MetricKind>().is_err());
    }
}
