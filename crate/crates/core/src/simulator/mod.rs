//! Dense statevector backend with whole-circuit noise and stabilizer error probes.

mod noise;
mod probe;
mod state;

pub use noise::{circuit_error_prob, outcome_to_eigenindex, sample_shot, NoiseModel, Shot, ShotSampler};
pub use probe::{stabilizer_probe, ProbeCircuit, ProbeRecord, ProbeTally};
pub use state::{apply_circuit, prepare_product_state, StateSpec, StateVector};
