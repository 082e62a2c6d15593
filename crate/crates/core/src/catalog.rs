//! Named reference gates.

use num_complex::Complex64;

use crate::diag3::w_example_gate;
use crate::error::{Error, Result};
use crate::tensor::{CMatrix, Operator};

pub const NAMES: [&str; 6] = [
    "cnot",
    "swap",
    "toffoli",
    "ccz",
    "example1-d",
    "wstate-gate",
];

fn permutation_gate(dims: Vec<usize>, image: impl Fn(usize) -> usize) -> Operator {
    let total: usize = dims.iter().product();
    let mut m = CMatrix::zeros(total, total);
    for col in 0..total {
        m[(image(col), col)] = Complex64::new(1.0, 0.0);
    }
    Operator::new(dims, m).expect("square permutation")
}

fn signs(values: [f64; 8]) -> Operator {
    let d = values.map(Complex64::from);
    Operator::from_diagonal(vec![2, 2, 2], &d).expect("8 entries")
}

/// Looks up a catalog gate by name.
pub fn example(name: &str) -> Result<Operator> {
    Ok(match name {
        "cnot" => permutation_gate(vec![2, 2], |i| if i >= 2 { i ^ 1 } else { i }),
        "swap" => permutation_gate(vec![2, 2], |i| ((i & 1) << 1) | (i >> 1)),
        "toffoli" => permutation_gate(vec![2, 2, 2], |i| if i >= 6 { i ^ 1 } else { i }),
        "ccz" => signs([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0]),
        "example1-d" => signs([-1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0]),
        "wstate-gate" => w_example_gate(std::f64::consts::FRAC_PI_4),
        other => {
            return Err(Error::DegenerateInput(format!(
                "unknown example '{other}' (known: {})",
                NAMES.join(", ")
            )))
        }
    })
}

/// Hadamard on the last of three qubits.
pub fn hadamard_on_third() -> CMatrix {
    let h = CMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0].map(Complex64::from))
        * Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    CMatrix::identity(4, 4).kronecker(&h)
}
