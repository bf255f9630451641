//! Qudit Clifford gates, conjugation of Pauli strings and synthesis of
//! circuits that diagonalize commuting cliques.

mod circuit;
mod gate;
mod synth;

pub use circuit::{conjugate_ps, CliffordCircuit};
pub(crate) use gate::phase_gate_entry;
pub use gate::{gate_unitary, Gate, GateKind};
pub use synth::diagonalize_clique;
