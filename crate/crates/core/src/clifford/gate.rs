use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{root_of_unity, PauliString, QuditRegister};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    /// Discrete Fourier transform `|j⟩ ↦ Σ_i ω^{ji} |i⟩ / √d`.
    #[serde(rename = "H")]
    H,
    #[serde(rename = "H_inv")]
    HInv,
    /// Quadratic phase gate.
    #[serde(rename = "S")]
    S,
    #[serde(rename = "S_inv")]
    SInv,
    /// `|i⟩|j⟩ ↦ |i⟩|i + j⟩`, control first.
    #[serde(rename = "CSUM")]
    Csum,
    /// Shift `X_d`.
    #[serde(rename = "X")]
    X,
    /// Clock `Z_d`.
    #[serde(rename = "Z")]
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qudits: Vec<usize>,
    pub dim: u32,
}

impl Gate {
    pub fn h(q: usize, d: u32) -> Self {
        Self::local(GateKind::H, q, d)
    }

    pub fn h_inv(q: usize, d: u32) -> Self {
        Self::local(GateKind::HInv, q, d)
    }

    pub fn s(q: usize, d: u32) -> Self {
        Self::local(GateKind::S, q, d)
    }

    pub fn s_inv(q: usize, d: u32) -> Self {
        Self::local(GateKind::SInv, q, d)
    }

    pub fn x(q: usize, d: u32) -> Self {
        Self::local(GateKind::X, q, d)
    }

    pub fn z(q: usize, d: u32) -> Self {
        Self::local(GateKind::Z, q, d)
    }

    pub fn csum(control: usize, target: usize, d: u32) -> Self {
        Self {
            kind: GateKind::Csum,
            qudits: vec![control, target],
            dim: d,
        }
    }

    fn local(kind: GateKind, q: usize, d: u32) -> Self {
        Self {
            kind,
            qudits: vec![q],
            dim: d,
        }
    }

    pub fn is_entangling(&self) -> bool {
        self.kind == GateKind::Csum
    }

    pub fn inverse(&self) -> Vec<Gate> {
        let q = self.qudits[0];
        let d = self.dim;
        match self.kind {
            GateKind::H => vec![Gate::h_inv(q, d)],
            GateKind::HInv => vec![Gate::h(q, d)],
            GateKind::S => vec![Gate::s_inv(q, d)],
            GateKind::SInv => vec![Gate::s(q, d)],
            GateKind::Csum => vec![self.clone(); d as usize - 1],
            GateKind::X | GateKind::Z => vec![self.clone(); d as usize - 1],
        }
    }

    /// Checks arity, qudit indices and dimension against the register.
    pub fn validate(&self, register: &QuditRegister) -> Result<()> {
        let arity = if self.is_entangling() { 2 } else { 1 };
        if self.qudits.len() != arity {
            return Err(Error::InvalidGate(format!("{self}: expected {arity} qudit(s)")));
        }
        for &q in &self.qudits {
            if q >= register.len() {
                return Err(Error::QuditIndex {
                    index: q,
                    len: register.len(),
                });
            }
            if register.dim(q) != self.dim {
                return Err(Error::InvalidGate(format!(
                    "{self}: qudit {q} has dimension {}",
                    register.dim(q)
                )));
            }
        }
        if arity == 2 && self.qudits[0] == self.qudits[1] {
            return Err(Error::InvalidGate(format!("{self}: control equals target")));
        }
        Ok(())
    }

    /// Image of `X_q` and `Z_q` (for each acted-on qudit) under `U · U†`.
    ///
    /// Returned as `(x_images, z_images)` indexed like `self.qudits`.
    pub(crate) fn images(&self, register: &QuditRegister) -> Result<(Vec<PauliString>, Vec<PauliString>)> {
        let d = self.dim;
        // local phases are in ω_{2d} units; rescale into ω_{2 d_P}
        let scale = (register.lcm() / d) as i64;
        let one = |q: usize, r: i64, s: i64, phase: i64| -> Result<PauliString> {
            let mut exps = vec![(0i64, 0i64); register.len()];
            exps[q] = (r, s);
            PauliString::from_raw(register, &exps, phase * scale)
        };
        let d = d as i64;
        match self.kind {
            GateKind::Csum => {
                let (c, t) = (self.qudits[0], self.qudits[1]);
                let mut xc = vec![(0i64, 0i64); register.len()];
                xc[c] = (1, 0);
                xc[t] = (1, 0);
                let mut zt = vec![(0i64, 0i64); register.len()];
                zt[c] = (0, -1);
                zt[t] = (0, 1);
                Ok((
                    vec![PauliString::from_raw(register, &xc, 0)?, one(t, 1, 0, 0)?],
                    vec![one(c, 0, 1, 0)?, PauliString::from_raw(register, &zt, 0)?],
                ))
            }
            kind => {
                let q = self.qudits[0];
                let (x, z) = match kind {
                    GateKind::H => (one(q, 0, 1, 0)?, one(q, -1, 0, 0)?),
                    GateKind::HInv => (one(q, 0, -1, 0)?, one(q, 1, 0, 0)?),
                    // X ↦ i XZ for the qubit phase gate diag(1, i)
                    GateKind::S if d == 2 => (one(q, 1, 1, 1)?, one(q, 0, 1, 0)?),
                    GateKind::SInv if d == 2 => (one(q, 1, 1, 3)?, one(q, 0, 1, 0)?),
                    GateKind::S => (one(q, 1, 1, 0)?, one(q, 0, 1, 0)?),
                    GateKind::SInv => (one(q, 1, -1, 0)?, one(q, 0, 1, 0)?),
                    GateKind::X => (one(q, 1, 0, 0)?, one(q, 0, 1, -2)?),
                    GateKind::Z => (one(q, 1, 0, 2)?, one(q, 0, 1, 0)?),
                    GateKind::Csum => unreachable!(),
                };
                Ok((vec![x], vec![z]))
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GateKind::H => "H",
            GateKind::HInv => "H_inv",
            GateKind::S => "S",
            GateKind::SInv => "S_inv",
            GateKind::Csum => "CSUM",
            GateKind::X => "X",
            GateKind::Z => "Z",
        };
        write!(f, "{name}_{}{:?}", self.dim, self.qudits)
    }
}

/// Diagonal phases of the phase gate in `ω_{2d}` units.
///
/// Odd `d` uses `ω_d^{j(j-1)/2}`. At `d = 2` that formula is the identity, so
/// the qubit gate is `diag(1, i)` instead.
fn phase_gate_exponent(d: u32, j: u32) -> i64 {
    if d == 2 {
        j as i64
    } else {
        (j as i64) * (j as i64 - 1)
    }
}

/// Dense unitary of a gate on its own qudits (control is the more significant factor).
pub fn gate_unitary(g: &Gate) -> Result<DMatrix<C64>> {
    let d = g.dim;
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let arity = if g.is_entangling() { 2 } else { 1 };
    if g.qudits.len() != arity {
        return Err(Error::InvalidGate(g.to_string()));
    }
    let n = d as usize;
    let zero = C64::new(0.0, 0.0);
    Ok(match g.kind {
        GateKind::H | GateKind::HInv => {
            let norm = 1.0 / (d as f64).sqrt();
            let sign = if g.kind == GateKind::H { 1 } else { -1 };
            DMatrix::from_fn(n, n, |i, j| root_of_unity(sign * (i * j) as i64, d) * norm)
        }
        GateKind::S | GateKind::SInv => {
            let sign = if g.kind == GateKind::S { 1 } else { -1 };
            DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    root_of_unity(sign * phase_gate_exponent(d, j as u32), 2 * d)
                } else {
                    zero
                }
            })
        }
        GateKind::X => DMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { C64::new(1.0, 0.0) } else { zero }),
        GateKind::Z => DMatrix::from_fn(n, n, |i, j| if i == j { root_of_unity(j as i64, d) } else { zero }),
        GateKind::Csum => DMatrix::from_fn(n * n, n * n, |row, col| {
            let (ci, ti) = (col / n, col % n);
            if row == ci * n + (ci + ti) % n {
                C64::new(1.0, 0.0)
            } else {
                zero
            }
        }),
    })
}

/// Diagonal entry of the phase gate at basis digit `j`, used by the simulator.
pub(crate) fn phase_gate_entry(d: u32, j: u32, inverse: bool) -> C64 {
    let e = phase_gate_exponent(d, j);
    root_of_unity(if inverse { -e } else { e }, 2 * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>) -> bool {
        (a - b).iter().all(|v| v.norm() < 1e-12)
    }

    #[test]
    fn hadamard_qubit() {
        let h = gate_unitary(&Gate::h(0, 2)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)],
        );
        assert!(close(&h, &want));
    }

    #[test]
    fn phase_gate_qubit_is_diag_1_i() {
        let s = gate_unitary(&Gate::s(0, 2)).unwrap();
        assert!((s[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((s[(1, 1)] - C64::new(0.0, 1.0)).norm() < 1e-15);
        let s3 = gate_unitary(&Gate::s(0, 3)).unwrap();
        assert!((s3[(2, 2)] - root_of_unity(1, 3)).norm() < 1e-15);
    }

    #[test]
    fn csum_qutrit() {
        let u = gate_unitary(&Gate::csum(0, 1, 3)).unwrap();
        // |1⟩|2⟩ = index 5 maps to |1⟩|0⟩ = index 3
        assert_eq!(u[(3, 5)], C64::new(1.0, 0.0));
    }

    #[test]
    fn all_gates_unitary() {
        for d in [2, 3, 5] {
            for g in [
                Gate::h(0, d),
                Gate::h_inv(0, d),
                Gate::s(0, d),
                Gate::s_inv(0, d),
                Gate::x(0, d),
                Gate::z(0, d),
                Gate::csum(0, 1, d),
            ] {
                let u = gate_unitary(&g).unwrap();
                let n = u.nrows();
                assert!(close(&(u.adjoint() * &u), &DMatrix::identity(n, n)), "{g}");
            }
            // the Fourier transform has order four
            let h = gate_unitary(&Gate::h(0, d)).unwrap();
            let h4 = &h * &h * &h * &h;
            assert!(close(&h4, &DMatrix::identity(d as usize, d as usize)));
        }
    }

    #[test]
    fn validation() {
        let reg = QuditRegister::new(vec![2, 3]).unwrap();
        assert!(Gate::csum(0, 1, 2).validate(&reg).is_err());
        assert!(Gate::h(1, 3).validate(&reg).is_ok());
        assert!(Gate::h(2, 3).validate(&reg).is_err());
    }
}
