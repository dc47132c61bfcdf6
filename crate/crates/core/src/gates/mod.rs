//! Single-qubit unitaries and their local tensor assemblies.

mod expr;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

pub use expr::{parse_complex, parse_real};

use crate::error::{Error, Result};
use crate::qla::{kron, ComplexMatrix};

/// Gates are accepted as unitary when ‖U†U − I‖_max is below this.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match axis {
        Axis::X => ComplexMatrix::from_rows([[o, one], [one, o]]),
        Axis::Y => ComplexMatrix::from_rows([[o, -i], [i, o]]),
        Axis::Z => ComplexMatrix::from_rows([[one, o], [o, -one]]),
    }
}

/// R_y(2λ) = e^{−iσ_yλ} = [[cos λ, −sin λ], [sin λ, cos λ]], given the full angle 2λ.
pub fn ry(two_lambda: f64) -> ComplexMatrix {
    let (s, c) = (two_lambda / 2.0).sin_cos();
    ComplexMatrix::from_real_rows([[c, -s], [s, c]])
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows([[h, h], [h, -h]])
}

/// The two unitaries (U, Ũ) placed in superposed order on one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPair {
    u: ComplexMatrix,
    u_tilde: ComplexMatrix,
}

impl UnitaryPair {
    pub fn new(u: ComplexMatrix, u_tilde: ComplexMatrix) -> Result<Self> {
        for m in [&u, &u_tilde] {
            if m.rows() != 2 || m.cols() != 2 {
                return Err(Error::DimensionMismatch(format!(
                    "pair entries must be 2x2, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(Self {
            u: u.ensure_unitary(UNITARY_TOL)?,
            u_tilde: u_tilde.ensure_unitary(UNITARY_TOL)?,
        })
    }

    /// (σ_z, R_y(2λ)), the family used for the concurrence surfaces.
    pub fn z_ry(two_lambda: f64) -> Self {
        Self {
            u: pauli(Axis::Z),
            u_tilde: ry(two_lambda),
        }
    }

    pub fn identity() -> Self {
        Self {
            u: ComplexMatrix::identity(2),
            u_tilde: ComplexMatrix::identity(2),
        }
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn u_tilde(&self) -> &ComplexMatrix {
        &self.u_tilde
    }

    /// U·Ũ: Ũ acts first.
    pub fn forward_order(&self) -> ComplexMatrix {
        &self.u * &self.u_tilde
    }

    /// Ũ·U: U acts first.
    pub fn backward_order(&self) -> ComplexMatrix {
        &self.u_tilde * &self.u
    }

    /// The same pair with the roles of U and Ũ exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            u: self.u_tilde.clone(),
            u_tilde: self.u.clone(),
        }
    }
}

pub fn forward_order(p: &UnitaryPair) -> ComplexMatrix {
    p.forward_order()
}

pub fn backward_order(p: &UnitaryPair) -> ComplexMatrix {
    p.backward_order()
}

/// (V, Ṽ) = (⊗ U_i, ⊗ Ũ_i) in qubit order.
pub fn local_tensor(pairs: &[UnitaryPair]) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (first, rest) = pairs
        .split_first()
        .ok_or_else(|| Error::InvalidSpec("local tensor of an empty pair list".into()))?;
    Ok(rest
        .iter()
        .fold((first.u.clone(), first.u_tilde.clone()), |(v, vt), p| {
            (kron(&v, &p.u), kron(&vt, &p.u_tilde))
        }))
}

/// Textual gate description accepted in spec files and on the command line:
/// `pauli_x | pauli_y | pauli_z | ry(<radians>) | matrix([[a, b], [c, d]])`.
#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    Pauli(Axis),
    /// Argument is the full rotation angle 2λ.
    Ry(f64),
    Matrix(ComplexMatrix),
}

impl GateSpec {
    pub fn matrix(&self) -> ComplexMatrix {
        match self {
            GateSpec::Pauli(a) => pauli(*a),
            GateSpec::Ry(angle) => ry(*angle),
            GateSpec::Matrix(m) => m.clone(),
        }
    }
}

impl FromStr for GateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let fail = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        match text {
            "pauli_x" => return Ok(GateSpec::Pauli(Axis::X)),
            "pauli_y" => return Ok(GateSpec::Pauli(Axis::Y)),
            "pauli_z" => return Ok(GateSpec::Pauli(Axis::Z)),
            _ => {}
        }
        if let Some(arg) = text.strip_prefix("ry(").and_then(|r| r.strip_suffix(')')) {
            return Ok(GateSpec::Ry(parse_real(arg)?));
        }
        if let Some(body) = text.strip_prefix("matrix(").and_then(|r| r.strip_suffix(')')) {
            let rows = split_bracketed(body.trim()).ok_or_else(|| fail("expected [[a, b], [c, d]]"))?;
            if rows.len() != 2 {
                return Err(fail("matrix literal must have 2 rows"));
            }
            let mut entries = Vec::with_capacity(4);
            for row in rows {
                let cells = split_bracketed(row.trim()).ok_or_else(|| fail("each row must be [a, b]"))?;
                if cells.len() != 2 {
                    return Err(fail("each row must have 2 entries"));
                }
                for cell in cells {
                    entries.push(parse_complex(cell)?);
                }
            }
            let m = ComplexMatrix::new(2, 2, entries)?;
            return Ok(GateSpec::Matrix(m.ensure_unitary(UNITARY_TOL)?));
        }
        Err(fail(
            "unknown gate; expected pauli_x|pauli_y|pauli_z|ry(<radians>)|matrix([[..],[..]])",
        ))
    }
}

/// Splits `[a, b, ...]` at top-level commas.
fn split_bracketed(text: &str) -> Option<Vec<&str>> {
    let inner = text.strip_prefix('[')?.strip_suffix(']')?;
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in inner.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return None;
        }
    }
    if depth != 0 {
        return None;
    }
    parts.push(&inner[start..]);
    Some(parts)
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSpec::Pauli(Axis::X) => write!(f, "pauli_x"),
            GateSpec::Pauli(Axis::Y) => write!(f, "pauli_y"),
            GateSpec::Pauli(Axis::Z) => write!(f, "pauli_z"),
            GateSpec::Ry(a) => write!(f, "ry({a})"),
            GateSpec::Matrix(m) => {
                let cell = |z: Complex64| format!("{}{:+}i", z.re, z.im);
                write!(
                    f,
                    "matrix([[{}, {}], [{}, {}]])",
                    cell(m.get(0, 0)),
                    cell(m.get(0, 1)),
                    cell(m.get(1, 0)),
                    cell(m.get(1, 1))
                )
            }
        }
    }
}
