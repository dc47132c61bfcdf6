use num_complex::Complex64;

use super::eigen::eigvals_hermitian;
use super::matrix::{kron, ComplexMatrix};
use super::state::StateVector;
use crate::error::{Error, Result};

pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
pub const DENSITY_TRACE_TOL: f64 = 1e-12;
pub const DENSITY_EIGEN_FLOOR: f64 = -1e-10;

/// Validated density operator on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let dim = matrix.rows();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let herm = matrix.hermiticity_defect();
        if herm > DENSITY_HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min_eig = eigvals_hermitian(&matrix)?.last().copied().unwrap_or(0.0);
        if min_eig < DENSITY_EIGEN_FLOOR {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    /// |ψ⟩⟨ψ| for a normalized state.
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        state.ensure_normalized(1e-10)?;
        let a = state.amplitudes();
        Ok(Self {
            num_qubits: state.num_qubits(),
            matrix: ComplexMatrix::outer(a, a),
        })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so Tr(ρ²) = Σ |ρ_ij|².
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Reduced state on the qubits in `keep`, listed in ascending order in the result.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() {
        return Err(Error::InvalidQubits("keep set is empty".into()));
    }
    if kept.len() != keep.len() {
        return Err(Error::InvalidQubits("keep set has duplicates".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidQubits(format!("qubit {bad} out of range for {n} qubits")));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    let kept_offsets = scatter_offsets(n, &kept);
    let traced_offsets = scatter_offsets(n, &traced);
    let dk = kept_offsets.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (i, &oi) in kept_offsets.iter().enumerate() {
        for (j, &oj) in kept_offsets.iter().enumerate() {
            let sum: Complex64 = traced_offsets.iter().map(|&t| rho.matrix.get(oi | t, oj | t)).sum();
            out.set(i, j, sum);
        }
    }
    Ok(DensityMatrix {
        num_qubits: kept.len(),
        matrix: out,
    })
}

/// Maps every value of the sub-register `qubits` (first listed = most
/// significant) to its bit pattern inside the full `n`-qubit index.
pub(crate) fn scatter_offsets(n: usize, qubits: &[usize]) -> Vec<usize> {
    let m = qubits.len();
    (0..1usize << m)
        .map(|local| {
            qubits.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
                if local >> (m - 1 - pos) & 1 == 1 {
                    acc | 1 << (n - 1 - q)
                } else {
                    acc
                }
            })
        })
        .collect()
}

fn sigma_y() -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_rows([[z, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), z]])
}

/// (σ_y⊗σ_y) ρ* (σ_y⊗σ_y) for a two-qubit state.
pub fn spin_flip(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.num_qubits != 2 {
        return Err(Error::DimensionMismatch(format!(
            "spin flip needs a 2-qubit state, got {} qubits",
            rho.num_qubits
        )));
    }
    let yy = kron(&sigma_y(), &sigma_y());
    let flipped = &(&yy * &rho.matrix.conj()) * &yy;
    Ok(DensityMatrix {
        num_qubits: 2,
        matrix: flipped,
    })
}
