use rand::Rng;
use serde::{Deserialize, Serialize};

use super::noise::NoiseModel;
use super::state::{apply_circuit, StateVector};
use crate::clifford::{CliffordCircuit, Gate, GateKind};
use crate::error::{Error, Result};

/// Error-flag counts `(ζ_e, ζ_ne)` from stabilizer probes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeTally {
    pub errors: u64,
    pub clean: u64,
}

impl ProbeTally {
    pub fn record(&mut self, error: bool) {
        if error {
            self.errors += 1;
        } else {
            self.clean += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.errors + self.clean
    }
}

/// Gate counts of a probed circuit and its error flag, the input to noise fitting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub n_loc: usize,
    pub n_ent: usize,
    /// Number of computational outcomes `D`; a randomized outcome still
    /// matches with probability `1/D`. Zero disables that correction.
    #[serde(default)]
    pub outcomes: u64,
    pub error: bool,
}

/// A measurement circuit padded so that it permutes computational states.
///
/// Every Fourier gate is repeated four times (`H⁴ = I`); the remaining gates
/// are diagonal or permutations.
#[derive(Clone, Debug)]
pub struct ProbeCircuit {
    padded: CliffordCircuit,
    /// Digit-level action of the padded circuit (Fourier runs act trivially).
    classical: Vec<Gate>,
}

impl ProbeCircuit {
    pub fn new(circuit: &CliffordCircuit) -> Result<Self> {
        let reg = circuit.register();
        let mut padded = CliffordCircuit::empty(reg);
        let mut classical = Vec::new();
        for g in circuit.gates() {
            match g.kind {
                GateKind::H | GateKind::HInv => {
                    for _ in 0..4 {
                        padded.push(g.clone())?;
                    }
                }
                GateKind::X | GateKind::Csum => {
                    padded.push(g.clone())?;
                    classical.push(g.clone());
                }
                GateKind::S | GateKind::SInv | GateKind::Z => padded.push(g.clone())?,
            }
        }
        let probe = Self { padded, classical };
        probe.verify()?;
        Ok(probe)
    }

    /// Checks the padded circuit against its digit map on a few basis states.
    fn verify(&self) -> Result<()> {
        let reg = self.padded.register();
        let n = reg.total_dim();
        for idx in [0, n / 2, n - 1] {
            let input = reg.digits(idx);
            let out = apply_circuit(&StateVector::basis(reg, &input)?, &self.padded)?;
            let want = reg.index(&self.forward(&input));
            let weight = out.amplitudes()[want].norm_sqr();
            if (weight - 1.0).abs() > 1e-9 {
                return Err(Error::ProbeConstruction(format!(
                    "padded circuit does not send |{input:?}⟩ to a basis state"
                )));
            }
        }
        Ok(())
    }

    pub fn circuit(&self) -> &CliffordCircuit {
        &self.padded
    }

    pub fn n_loc(&self) -> usize {
        self.padded.n_loc()
    }

    pub fn n_ent(&self) -> usize {
        self.padded.n_ent()
    }

    pub fn error_prob(&self, noise: &NoiseModel) -> f64 {
        noise.error_prob(self.n_loc(), self.n_ent())
    }

    fn forward(&self, digits: &[u32]) -> Vec<u32> {
        let mut v = digits.to_vec();
        for g in &self.classical {
            step(&mut v, g, false);
        }
        v
    }

    fn backward(&self, digits: &[u32]) -> Vec<u32> {
        let mut v = digits.to_vec();
        for g in self.classical.iter().rev() {
            step(&mut v, g, true);
        }
        v
    }

    /// One noisy probe: pick a random target output, run the preimage, flag a mismatch.
    pub fn probe<R: Rng>(&self, noise: &NoiseModel, rng: &mut R) -> bool {
        let reg = self.padded.register();
        let target: Vec<u32> = reg.dims().iter().map(|&d| rng.random_range(0..d)).collect();
        let input = self.backward(&target);
        let mut out = self.forward(&input);
        let xi = self.error_prob(noise);
        if xi > 0.0 && rng.random::<f64>() < xi {
            out = reg.dims().iter().map(|&d| rng.random_range(0..d)).collect();
        }
        out != target
    }
}

fn step(v: &mut [u32], g: &Gate, inverse: bool) {
    let d = g.dim;
    let shift = |x: u32, by: u32| if inverse { (x + d - by) % d } else { (x + by) % d };
    match g.kind {
        GateKind::X => v[g.qudits[0]] = shift(v[g.qudits[0]], 1),
        GateKind::Csum => v[g.qudits[1]] = shift(v[g.qudits[1]], v[g.qudits[0]]),
        _ => {}
    }
}

/// Builds the padded probe for `circuit` and runs one noisy probe.
pub fn stabilizer_probe<R: Rng>(circuit: &CliffordCircuit, noise: &NoiseModel, rng: &mut R) -> Result<bool> {
    Ok(ProbeCircuit::new(circuit)?.probe(noise, rng))
}
