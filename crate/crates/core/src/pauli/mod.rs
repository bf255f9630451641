//! Generalized Pauli strings on qudit registers and decomposition of observables.

mod decompose;
mod observable;
mod register;
mod spin;
mod string;

pub use decompose::{decompose_matrix, decompose_spin, SpinFactor, SpinPolynomial, SpinProduct, COEFF_TOL};
pub use observable::{Observable, Term};
pub use register::QuditRegister;
pub use spin::{ladder_weight, spin_coefficients, spin_matrix, Axis};
pub use string::{local_matrix, CommutationMode, root_of_unity, PauliString, DEFAULT_DIMENSION_CAP};
