//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use num_complex::Complex64;
use qswitch::gates::{pauli, ry, Axis, UnitaryPair};
use qswitch::qla::{ComplexMatrix, StateVector};
use qswitch::switch::{Protocol, SwitchSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(rng: &mut TestRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn phase(rng: &mut TestRng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

/// Haar-random element of U(2): a uniform unit quaternion times a global phase.
pub fn haar_unitary(rng: &mut TestRng) -> ComplexMatrix {
    let q: [f64; 4] = std::array::from_fn(|_| gauss(rng));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    let m = ComplexMatrix::from_rows([
        [Complex64::new(a, b), Complex64::new(c, d)],
        [Complex64::new(-c, d), Complex64::new(a, -b)],
    ]);
    m.scale(phase(rng))
}

/// Uniformly random pure state on `n` qubits.
pub fn haar_state(rng: &mut TestRng, n: usize) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(gauss(rng), gauss(rng)))
        .collect();
    StateVector::new(amps).unwrap().normalized().unwrap()
}

fn conjugate(w: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    w.try_mul(m).unwrap().try_mul(&w.adjoint()).unwrap()
}

/// Random (pair, input) with ⟨←Uφ|→Uφ⟩ = 0: the (σ_z, R_y(π/2)) family at a
/// random α, conjugated by a Haar unitary, with independent phases on U and Ũ.
pub fn orthogonal_qubit(rng: &mut TestRng) -> (UnitaryPair, StateVector) {
    let w = haar_unitary(rng);
    let u = conjugate(&w, &pauli(Axis::Z)).scale(phase(rng));
    let ut = conjugate(&w, &ry(FRAC_PI_2)).scale(phase(rng));
    let phi = StateVector::new(
        w.mul_vec(StateVector::eta(rng.random::<f64>()).unwrap().amplitudes())
            .unwrap(),
    )
    .unwrap();
    (UnitaryPair::new(u, ut).unwrap(), phi)
}

/// Fully random (pair, input); orthogonal or aligned with probability zero.
pub fn generic_qubit(rng: &mut TestRng) -> (UnitaryPair, StateVector) {
    (
        UnitaryPair::new(haar_unitary(rng), haar_unitary(rng)).unwrap(),
        haar_state(rng, 1),
    )
}

/// Same as [`orthogonal_qubit`] but with λ = π/4 ± δ, δ ∈ [1e-3, 0.3].
pub fn near_miss_qubit(rng: &mut TestRng) -> (UnitaryPair, StateVector) {
    let delta = rng.random_range(1e-3..0.3) * if rng.random::<bool>() { 1.0 } else { -1.0 };
    let w = haar_unitary(rng);
    let u = conjugate(&w, &pauli(Axis::Z));
    let ut = conjugate(&w, &ry(2.0 * (FRAC_PI_4 + delta)));
    let phi = StateVector::new(
        w.mul_vec(StateVector::eta(rng.random::<f64>()).unwrap().amplitudes())
            .unwrap(),
    )
    .unwrap();
    (UnitaryPair::new(u, ut).unwrap(), phi)
}

/// Eigenvector of a 2×2 matrix for one of its eigenvalues.
fn eigvec2(m: &ComplexMatrix) -> [Complex64; 2] {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let half_tr = (a + d) / 2.0;
    let lambda = half_tr + (half_tr * half_tr - (a * d - b * c)).sqrt();
    let v1 = [b, lambda - a];
    let v2 = [lambda - d, c];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    if n < 1e-24 {
        // scalar matrix: every vector is an eigenvector
        return [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    }
    [v[0] / n.sqrt(), v[1] / n.sqrt()]
}

/// Random (pair, input) with |⟨←Uφ|→Uφ⟩| = 1: either commuting unitaries or
/// φ an eigenvector of (←U)†→U.
pub fn aligned_qubit(rng: &mut TestRng) -> (UnitaryPair, StateVector) {
    if rng.random::<bool>() {
        let w = haar_unitary(rng);
        let diag = |rng: &mut TestRng| ComplexMatrix::diag(&[phase(rng), phase(rng)]);
        let u = conjugate(&w, &diag(rng));
        let ut = conjugate(&w, &diag(rng));
        (UnitaryPair::new(u, ut).unwrap(), haar_state(rng, 1))
    } else {
        let pair = UnitaryPair::new(haar_unitary(rng), haar_unitary(rng)).unwrap();
        let m = pair.backward_order().adjoint().try_mul(&pair.forward_order()).unwrap();
        let phi = StateVector::new(eigvec2(&m).to_vec()).unwrap().normalized().unwrap();
        (pair, phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Orthogonal,
    Generic,
    NearMiss,
    Aligned,
}

pub fn qubit(rng: &mut TestRng, kind: Kind) -> (UnitaryPair, StateVector) {
    match kind {
        Kind::Orthogonal => orthogonal_qubit(rng),
        Kind::Generic => generic_qubit(rng),
        Kind::NearMiss => near_miss_qubit(rng),
        Kind::Aligned => aligned_qubit(rng),
    }
}

pub fn spec_from(protocol: Protocol, qubits: Vec<(UnitaryPair, StateVector)>) -> SwitchSpec {
    let (pairs, input) = qubits.into_iter().unzip();
    SwitchSpec::new(protocol, pairs, input).unwrap()
}

/// Spec whose qubits are all orthogonal, or one with exactly one qubit
/// replaced by `spoiler` at a random position.
pub fn mixed_spec(rng: &mut TestRng, protocol: Protocol, spoiler: Option<Kind>) -> SwitchSpec {
    let n = protocol.num_targets();
    let spoiled = spoiler.map(|k| (rng.random_range(0..n), k));
    let qubits = (0..n)
        .map(|i| match spoiled {
            Some((j, k)) if j == i => qubit(rng, k),
            _ => orthogonal_qubit(rng),
        })
        .collect();
    spec_from(protocol, qubits)
}

/// Every qubit drawn with the same `kind`.
pub fn uniform_spec(rng: &mut TestRng, protocol: Protocol, kind: Kind) -> SwitchSpec {
    let qubits = (0..protocol.num_targets()).map(|_| qubit(rng, kind)).collect();
    spec_from(protocol, qubits)
}

/// Draws a spec for the equivalence suites: a quarter satisfying, the rest
/// spoiled on one qubit or fully generic.
pub fn equivalence_spec(rng: &mut TestRng, protocol: Protocol) -> SwitchSpec {
    match rng.random_range(0..4) {
        0 => mixed_spec(rng, protocol, None),
        1 => mixed_spec(rng, protocol, Some(Kind::NearMiss)),
        2 => mixed_spec(rng, protocol, Some(Kind::Generic)),
        _ => uniform_spec(rng, protocol, Kind::Generic),
    }
}

/// √(2(1 − Tr ρ_A²)) for a pure 2-qubit state, with ρ_A built by hand.
pub fn two_qubit_entropy_concurrence(s: &StateVector) -> f64 {
    let a = s.amplitudes();
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                rho[i][k] += a[2 * i + j] * a[2 * k + j].conj();
            }
        }
    }
    let tr_sq: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |k| (i, k)))
        .map(|(i, k)| rho[i][k].norm_sqr())
        .sum();
    (2.0 * (1.0 - tr_sq)).max(0.0).sqrt()
}
