use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::state::{apply_circuit, StateVector};
use crate::clifford::CliffordCircuit;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Whole-circuit depolarizing model: local, entangling and readout error rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub xi_loc: f64,
    pub xi_ent: f64,
    pub xi_detect: f64,
}

impl NoiseModel {
    pub fn new(xi_loc: f64, xi_ent: f64, xi_detect: f64) -> Result<Self> {
        let m = Self {
            xi_loc,
            xi_ent,
            xi_detect,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("xi_loc", self.xi_loc), ("xi_ent", self.xi_ent), ("xi_detect", self.xi_detect)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidProbability { name, value: v });
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let m: Self = serde_json::from_str(&text).map_err(|source| Error::Parse {
            path: path.display().to_string(),
            source,
        })?;
        m.validate()?;
        Ok(m)
    }

    /// Error probability for a circuit with the given gate counts.
    pub fn error_prob(&self, n_loc: usize, n_ent: usize) -> f64 {
        1.0 - (1.0 - self.xi_detect)
            * (1.0 - self.xi_ent).powi(n_ent as i32)
            * (1.0 - self.xi_loc).powi(n_loc as i32)
    }
}

/// `ξ(C) = 1 − (1−ξ_detect)(1−ξ_ent)^{#ent}(1−ξ_loc)^{#loc}`.
pub fn circuit_error_prob(circuit: &CliffordCircuit, noise: &NoiseModel) -> f64 {
    noise.error_prob(circuit.n_loc(), circuit.n_ent())
}

/// Outcome sampler for a fixed state and measurement circuit.
#[derive(Clone, Debug)]
pub struct ShotSampler {
    state: StateVector,
    cumulative: Vec<f64>,
    xi: f64,
}

/// One measured digit string and whether noise replaced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shot {
    pub digits: Vec<u32>,
    pub error_injected: bool,
}

impl ShotSampler {
    pub fn new(state: &StateVector, circuit: &CliffordCircuit, noise: &NoiseModel) -> Result<Self> {
        let rotated = apply_circuit(state, circuit)?;
        let mut acc = 0.0;
        let cumulative = rotated
            .probabilities()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            state: rotated,
            cumulative,
            xi: circuit_error_prob(circuit, noise),
        })
    }

    pub fn error_prob(&self) -> f64 {
        self.xi
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Shot {
        let reg = self.state.register();
        let total = *self.cumulative.last().expect("nonempty state");
        let u = rng.random::<f64>() * total;
        let mut idx = self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1);
        // never land on a zero-probability outcome through rounding
        while idx > 0 && self.cumulative[idx] == self.cumulative[idx - 1] {
            idx -= 1;
        }
        let error_injected = self.xi > 0.0 && rng.random::<f64>() < self.xi;
        if error_injected {
            idx = rng.random_range(0..reg.total_dim());
        }
        Shot {
            digits: reg.digits(idx),
            error_injected,
        }
    }
}

/// Applies the circuit, samples a computational outcome and randomizes it with probability `ξ(C)`.
pub fn sample_shot<R: Rng>(
    state: &StateVector,
    circuit: &CliffordCircuit,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Shot> {
    Ok(ShotSampler::new(state, circuit, noise)?.sample(rng))
}

/// Eigenindex of a diagonal string and its phase exponent for a measured digit string.
pub fn outcome_to_eigenindex(digits: &[u32], diagonal: &PauliString) -> Result<(u32, u32)> {
    Ok((diagonal.eigenindex(digits)?, diagonal.phase_exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Gate;
    use crate::pauli::QuditRegister;
    use num_complex::Complex64 as C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn error_probabilities() {
        let q = QuditRegister::uniform(2, 2).unwrap();
        let mut c = CliffordCircuit::empty(&q);
        assert_eq!(circuit_error_prob(&c, &NoiseModel::noiseless()), 0.0);
        c.push(Gate::csum(0, 1, 2)).unwrap();
        let n = NoiseModel::new(0.0, 0.1, 0.0).unwrap();
        assert!((circuit_error_prob(&c, &n) - 0.1).abs() < 1e-15);
        let n = NoiseModel::new(0.0041, 0.079, 0.0).unwrap();
        let want = 1.0 - 0.9959f64.powi(4) * 0.921f64.powi(2);
        assert!((n.error_prob(4, 2) - want).abs() < 1e-15);
        assert!(NoiseModel::new(1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn noiseless_shots() {
        let q = QuditRegister::uniform(2, 2).unwrap();
        let zero = StateVector::basis(&q, &[0, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let s = sample_shot(&zero, &CliffordCircuit::empty(&q), &NoiseModel::noiseless(), &mut rng).unwrap();
            assert_eq!(s.digits, vec![0, 0]);
        }
        let q1 = QuditRegister::uniform(2, 1).unwrap();
        let plus = StateVector::from_amplitudes(&q1, vec![C64::new(1.0, 0.0); 2]).unwrap();
        let h = CliffordCircuit::new(&q1, vec![Gate::h(0, 2)]).unwrap();
        let sampler = ShotSampler::new(&plus, &h, &NoiseModel::noiseless()).unwrap();
        assert!((0..50).all(|_| sampler.sample(&mut rng).digits == vec![0]));
    }

    #[test]
    fn full_noise_is_uniform() {
        let q = QuditRegister::uniform(3, 1).unwrap();
        let zero = StateVector::basis(&q, &[0]).unwrap();
        let sampler = ShotSampler::new(&zero, &CliffordCircuit::empty(&q), &NoiseModel::new(0.0, 0.0, 1.0).unwrap())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0f64; 3];
        for _ in 0..10_000 {
            counts[sampler.sample(&mut rng).digits[0] as usize] += 1.0;
        }
        let e = 10_000.0 / 3.0;
        let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
        // χ²(2) at p = 0.01
        assert!(chi2 < 9.21, "{chi2}");
    }

    #[test]
    fn eigenindex_readout() {
        let q = QuditRegister::uniform(3, 1).unwrap();
        let z2 = PauliString::single(&q, 0, 0, 2).unwrap();
        assert_eq!(outcome_to_eigenindex(&[2], &z2).unwrap(), (1, 0));
        let x = PauliString::single(&q, 0, 1, 0).unwrap();
        assert!(outcome_to_eigenindex(&[0], &x).is_err());
    }

    #[test]
    fn same_seed_same_shots() {
        let q = QuditRegister::uniform(2, 2).unwrap();
        let psi = StateVector::from_amplitudes(&q, vec![C64::new(1.0, 0.0); 4]).unwrap();
        let s = ShotSampler::new(&psi, &CliffordCircuit::empty(&q), &NoiseModel::new(0.1, 0.0, 0.2).unwrap()).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..100).map(|_| s.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(run(5), run(5));
    }
}
