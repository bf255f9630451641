//! Expands a spin-1 Heisenberg bond into qudit Pauli strings.

use qudit_observe::pauli::{decompose_spin, Axis, SpinFactor, SpinPolynomial, SpinProduct};

fn main() -> qudit_observe::Result<()> {
    let bond = |axis| SpinProduct {
        coeff: 1.0,
        factors: vec![SpinFactor { qudit: 0, axis }, SpinFactor { qudit: 1, axis }],
    };
    let poly = SpinPolynomial {
        dims: vec![3, 3],
        terms: vec![bond(Axis::X), bond(Axis::Y), bond(Axis::Z)],
    };
    let obs = decompose_spin(&poly)?;
    println!("{} strings, hermitian: {}", obs.len(), obs.is_hermitian());
    for term in obs.terms().iter().take(6) {
        println!("  {:+.4} {:?}", term.coeff, term.string.exps());
    }
    Ok(())
}
