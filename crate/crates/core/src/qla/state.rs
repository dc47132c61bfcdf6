use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Amplitudes below this modulus are treated as zero when fixing the global phase.
pub const PHASE_ZERO_TOL: f64 = 1e-12;

/// Pure state of `num_qubits` qubits. Qubit 0 is the leftmost tensor factor,
/// i.e. the most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes without renormalizing them.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Computational basis state |index⟩.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amplitudes }
    }

    /// √α|0⟩ + √(1−α)|1⟩ for α ∈ [0, 1].
    pub fn eta(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidSpec(format!("alpha {alpha} outside [0, 1]")));
        }
        Self::new(vec![
            Complex64::new(alpha.sqrt(), 0.0),
            Complex64::new((1.0 - alpha).sqrt(), 0.0),
        ])
    }

    /// (|0⟩ + |1⟩)/√2 on one qubit.
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            num_qubits: 1,
            amplitudes: vec![Complex64::new(h, 0.0); 2],
        }
    }

    /// (|0…0⟩ + |1…1⟩)/√2.
    pub fn ghz(num_qubits: usize) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut s = Self::basis(num_qubits, 0);
        s.amplitudes[0] = h;
        *s.amplitudes.last_mut().unwrap() = h;
        s
    }

    /// Equal superposition of the single-excitation basis states.
    pub fn w(num_qubits: usize) -> Self {
        let a = Complex64::new(1.0 / (num_qubits as f64).sqrt(), 0.0);
        let mut s = Self::basis(num_qubits, 0);
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        for q in 0..num_qubits {
            s.amplitudes[1 << q] = a;
        }
        s
    }

    /// Tensor product of the given states, first factor leftmost.
    pub fn product(factors: &[StateVector]) -> Result<Self> {
        let mut iter = factors.iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidQubits("empty product".into()))?
            .clone();
        Ok(iter.fold(first, |acc, f| acc.tensor(f)))
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        self.amplitudes.iter_mut().for_each(|z| *z /= n);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn ensure_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|², the fidelity between two normalized pure states.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn scaled(&self, s: Complex64) -> StateVector {
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|z| z * s).collect(),
        }
    }

    /// `self + s·other` for equally sized states.
    pub fn add_scaled(&mut self, s: Complex64, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("adding states of different size".into()));
        }
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += s * b;
        }
        Ok(())
    }

    /// Rotates the global phase so the first amplitude with modulus above
    /// [`PHASE_ZERO_TOL`] is real and positive.
    pub fn canonicalize_phase(&mut self) {
        if let Some(lead) = self.amplitudes.iter().find(|z| z.norm() > PHASE_ZERO_TOL).copied() {
            let phase = lead.conj() / lead.norm();
            self.amplitudes.iter_mut().for_each(|z| *z *= phase);
        }
    }

    fn bit_of(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::InvalidQubits(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Applies a 2×2 operator to one qubit in place.
    pub fn apply_single(&mut self, qubit: usize, gate: &ComplexMatrix) -> Result<()> {
        self.apply_masked(qubit, gate, 0, 0)
    }

    /// Applies a 2×2 operator to `target` on the branch where `control` reads `value`.
    pub fn apply_controlled(&mut self, control: usize, value: bool, target: usize, gate: &ComplexMatrix) -> Result<()> {
        self.check_qubit(control)?;
        if control == target {
            return Err(Error::InvalidQubits("control and target coincide".into()));
        }
        let mask = self.bit_of(control);
        self.apply_masked(target, gate, mask, if value { mask } else { 0 })
    }

    fn apply_masked(&mut self, qubit: usize, gate: &ComplexMatrix, mask: usize, want: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        if gate.rows() != 2 || gate.cols() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "single-qubit gate must be 2x2, got {}x{}",
                gate.rows(),
                gate.cols()
            )));
        }
        let (g00, g01, g10, g11) = (gate.get(0, 0), gate.get(0, 1), gate.get(1, 0), gate.get(1, 1));
        let bit = self.bit_of(qubit);
        for i in 0..self.amplitudes.len() {
            if i & bit != 0 || i & mask != want {
                continue;
            }
            let j = i | bit;
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
            self.amplitudes[i] = g00 * a0 + g01 * a1;
            self.amplitudes[j] = g10 * a0 + g11 * a1;
        }
        Ok(())
    }
}

/// Matrix–vector product; the result is not renormalized.
pub fn apply(op: &ComplexMatrix, state: &StateVector) -> Result<StateVector> {
    if !op.is_square() {
        return Err(Error::NotSquare {
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    if op.rows() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on a {}-qubit state",
            op.rows(),
            op.cols(),
            state.num_qubits()
        )));
    }
    StateVector::new(op.mul_vec(state.amplitudes())?)
}
