use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::clifford::{gate_unitary, phase_gate_entry, CliffordCircuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::pauli::{Observable, QuditRegister, DEFAULT_DIMENSION_CAP};

const NORM_TOL: f64 = 1e-12;

/// Dense amplitudes over a register, qudit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    register: QuditRegister,
    amps: Vec<C64>,
}

/// State file: either per-qudit factors or a full amplitude list, as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub dims: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

fn to_c64(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

fn normalize(v: &mut [C64]) -> Result<()> {
    let n: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    v.iter_mut().for_each(|a| *a /= n);
    Ok(())
}

impl StateSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|source| Error::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn build(&self) -> Result<StateVector> {
        let register = QuditRegister::new(self.dims.clone())?;
        match (&self.factors, &self.amplitudes) {
            (Some(f), None) => {
                let f: Vec<Vec<C64>> = f.iter().map(|v| to_c64(v)).collect();
                prepare_product_state(&register, &f)
            }
            (None, Some(a)) => StateVector::from_amplitudes(&register, to_c64(a)),
            _ => Err(Error::Format("state needs exactly one of `factors` or `amplitudes`".into())),
        }
    }
}

/// Normalized tensor product of per-qudit amplitude lists.
pub fn prepare_product_state(register: &QuditRegister, factors: &[Vec<C64>]) -> Result<StateVector> {
    if factors.len() != register.len() {
        return Err(Error::LengthMismatch {
            expected: register.len(),
            found: factors.len(),
        });
    }
    check_cap(register)?;
    let mut amps = vec![C64::new(1.0, 0.0)];
    for (j, f) in factors.iter().enumerate() {
        if f.len() != register.dim(j) as usize {
            return Err(Error::LengthMismatch {
                expected: register.dim(j) as usize,
                found: f.len(),
            });
        }
        let mut f = f.clone();
        normalize(&mut f)?;
        amps = amps.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
    }
    Ok(StateVector {
        register: register.clone(),
        amps,
    })
}

fn check_cap(register: &QuditRegister) -> Result<()> {
    let total = register.total_dim();
    if total > DEFAULT_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim: total,
            cap: DEFAULT_DIMENSION_CAP,
        });
    }
    Ok(())
}

impl StateVector {
    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(register: &QuditRegister, mut amps: Vec<C64>) -> Result<Self> {
        check_cap(register)?;
        if amps.len() != register.total_dim() {
            return Err(Error::LengthMismatch {
                expected: register.total_dim(),
                found: amps.len(),
            });
        }
        normalize(&mut amps)?;
        Ok(Self {
            register: register.clone(),
            amps,
        })
    }

    pub fn basis(register: &QuditRegister, digits: &[u32]) -> Result<Self> {
        check_cap(register)?;
        let mut amps = vec![C64::new(0.0, 0.0); register.total_dim()];
        amps[register.index(digits)] = C64::new(1.0, 0.0);
        Ok(Self {
            register: register.clone(),
            amps,
        })
    }

    pub fn register(&self) -> &QuditRegister {
        &self.register
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨ψ|O|ψ⟩` by dense matrix.
    pub fn expectation(&self, obs: &Observable) -> Result<C64> {
        self.register.check_same(obs.register())?;
        let m = obs.matrix(DEFAULT_DIMENSION_CAP)?;
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        Ok(v.dotc(&(m * &v)))
    }

    fn stride(&self, q: usize) -> usize {
        self.register.dims()[q + 1..].iter().map(|&d| d as usize).product()
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        g.validate(&self.register)?;
        let d = g.dim as usize;
        let q = g.qudits[0];
        let stride = self.stride(q);
        match g.kind {
            GateKind::Csum => {
                let t = g.qudits[1];
                let st = self.stride(t);
                let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
                for (idx, &a) in self.amps.iter().enumerate() {
                    let c = (idx / stride) % d;
                    let tv = (idx / st) % d;
                    out[idx + ((tv + c) % d) * st - tv * st] = a;
                }
                self.amps = out;
            }
            GateKind::S | GateKind::SInv | GateKind::Z => {
                let diag: Vec<C64> = (0..d as u32)
                    .map(|j| match g.kind {
                        GateKind::Z => crate::pauli::root_of_unity(j as i64, g.dim),
                        k => phase_gate_entry(g.dim, j, k == GateKind::SInv),
                    })
                    .collect();
                for (idx, a) in self.amps.iter_mut().enumerate() {
                    *a *= diag[(idx / stride) % d];
                }
            }
            _ => {
                let u = gate_unitary(g)?;
                let mut buf = vec![C64::new(0.0, 0.0); d];
                for outer in 0..self.amps.len() / (d * stride) {
                    for inner in 0..stride {
                        let base = outer * d * stride + inner;
                        for (k, b) in buf.iter_mut().enumerate() {
                            *b = self.amps[base + k * stride];
                        }
                        for i in 0..d {
                            self.amps[base + i * stride] = (0..d).map(|k| u[(i, k)] * buf[k]).sum();
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Applies the circuit gate by gate.
pub fn apply_circuit(state: &StateVector, circuit: &CliffordCircuit) -> Result<StateVector> {
    state.register.check_same(circuit.register())?;
    let mut out = state.clone();
    for g in circuit.gates() {
        out.apply_gate(g)?;
    }
    debug_assert!((out.norm() - 1.0).abs() < NORM_TOL * 10.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::diagonalize_clique;
    use crate::pauli::{CommutationMode, PauliString};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn product_states() {
        let q = QuditRegister::uniform(2, 1).unwrap();
        let plus = prepare_product_state(&q, &[vec![c(1.0), c(1.0)]]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(plus.amplitudes().iter().all(|a| (a - c(s)).norm() < 1e-15));

        let q3 = QuditRegister::uniform(3, 3).unwrap();
        let u = vec![c(1.0); 3];
        let pbc = prepare_product_state(&q3, &[u.clone(), u.clone(), u]).unwrap();
        assert_eq!(pbc.amplitudes().len(), 27);
        assert!(pbc.amplitudes().iter().all(|a| (a.re - 1.0 / 27f64.sqrt()).abs() < 1e-15));

        let q5 = QuditRegister::new(vec![2, 2, 2, 2, 3]).unwrap();
        let one = vec![c(0.0), c(1.0)];
        let zero = vec![c(1.0), c(0.0)];
        let obc = prepare_product_state(&q5, &[one.clone(), zero.clone(), one, zero, vec![c(1.0), c(1.0), c(0.0)]])
            .unwrap();
        let idx = q5.index(&[1, 0, 1, 0, 0]);
        assert!((obc.amplitudes()[idx].re - s).abs() < 1e-15);
        assert!((obc.amplitudes()[idx + 1].re - s).abs() < 1e-15);

        assert!(matches!(prepare_product_state(&q, &[vec![c(0.0), c(0.0)]]), Err(Error::ZeroVector)));
        assert!(prepare_product_state(&q, &[vec![c(1.0)]]).is_err());
    }

    #[test]
    fn gates_on_basis_states() {
        let q = QuditRegister::uniform(2, 1).unwrap();
        let zero = StateVector::basis(&q, &[0]).unwrap();
        assert_eq!(apply_circuit(&zero, &CliffordCircuit::empty(&q)).unwrap(), zero);
        let h = CliffordCircuit::new(&q, vec![Gate::h(0, 2)]).unwrap();
        let plus = apply_circuit(&zero, &h).unwrap();
        assert!((plus.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        let q3 = QuditRegister::uniform(3, 2).unwrap();
        let s = StateVector::basis(&q3, &[1, 2]).unwrap();
        let cs = CliffordCircuit::new(&q3, vec![Gate::csum(0, 1, 3)]).unwrap();
        let out = apply_circuit(&s, &cs).unwrap();
        assert_eq!(out, StateVector::basis(&q3, &[1, 0]).unwrap());
    }

    #[test]
    fn gatewise_matches_dense_unitary() {
        let q = QuditRegister::new(vec![3, 2, 3]).unwrap();
        let gates = vec![
            Gate::h(0, 3),
            Gate::s(2, 3),
            Gate::csum(2, 0, 3),
            Gate::h_inv(2, 3),
            Gate::h(1, 2),
            Gate::s_inv(1, 2),
            Gate::x(0, 3),
            Gate::z(2, 3),
            Gate::csum(0, 2, 3),
        ];
        let circ = CliffordCircuit::new(&q, gates).unwrap();
        let amps: Vec<C64> = (0..18).map(|k| C64::new((k as f64 * 0.7).sin(), (k as f64 * 0.3).cos())).collect();
        let psi = StateVector::from_amplitudes(&q, amps).unwrap();
        let out = apply_circuit(&psi, &circ).unwrap();
        let u = circ.unitary(DEFAULT_DIMENSION_CAP).unwrap();
        let want = u * nalgebra::DVector::from_column_slice(psi.amplitudes());
        for (a, b) in out.amplitudes().iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonalized_expectations_are_preserved() {
        // ⟨ψ|P|ψ⟩ = ⟨Uψ|U P U†|Uψ⟩ with U P U† diagonal
        let q = QuditRegister::uniform(2, 2).unwrap();
        let xx = PauliString::new(&q, vec![(1, 0), (1, 0)], 0).unwrap();
        let zz = PauliString::new(&q, vec![(0, 1), (0, 1)], 0).unwrap();
        let circ = diagonalize_clique(&[xx.clone(), zz], CommutationMode::General).unwrap();
        let amps: Vec<C64> = (0..4).map(|k| C64::new(1.0 + k as f64, 0.5 * k as f64)).collect();
        let psi = StateVector::from_amplitudes(&q, amps).unwrap();
        let obs = Observable::new(&q, vec![(c(1.0), xx.clone())]).unwrap();
        let want = psi.expectation(&obs).unwrap();
        let rotated = apply_circuit(&psi, &circ).unwrap();
        let diag = crate::clifford::conjugate_ps(&circ, &xx).unwrap();
        let got: C64 = rotated
            .probabilities()
            .iter()
            .enumerate()
            .map(|(idx, &p)| {
                let digits = q.digits(idx);
                let mu = diag.eigenindex(&digits).unwrap();
                crate::pauli::root_of_unity(diag.eigen_offset() as i64, q.phase_order())
                    * crate::pauli::root_of_unity(mu as i64, q.lcm())
                    * p
            })
            .sum();
        assert!((got - want).norm() < 1e-12);
    }
}
