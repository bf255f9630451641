use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::gate::{gate_unitary, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, QuditRegister};

/// Ordered gate list on a register.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordCircuit {
    register: QuditRegister,
    gates: Vec<Gate>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    dims: Vec<u32>,
    gates: Vec<Gate>,
    #[serde(default)]
    n_loc: usize,
    #[serde(default)]
    n_ent: usize,
    #[serde(default)]
    depth: usize,
}

impl CliffordCircuit {
    pub fn empty(register: &QuditRegister) -> Self {
        Self {
            register: register.clone(),
            gates: Vec::new(),
        }
    }

    pub fn new(register: &QuditRegister, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.validate(register)?;
        }
        Ok(Self {
            register: register.clone(),
            gates,
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(&self.register)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn register(&self) -> &QuditRegister {
        &self.register
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of single-qudit gates.
    pub fn n_loc(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_entangling()).count()
    }

    /// Number of two-qudit gates.
    pub fn n_ent(&self) -> usize {
        self.gates.iter().filter(|g| g.is_entangling()).count()
    }

    /// Circuit depth with runs of single-qudit gates on one qudit fused into
    /// one local layer.
    pub fn depth(&self) -> usize {
        let q = self.register.len();
        let mut level = vec![0usize; q];
        let mut open_local = vec![false; q];
        for g in &self.gates {
            if g.is_entangling() {
                let (c, t) = (g.qudits[0], g.qudits[1]);
                let l = level[c].max(level[t]) + 1;
                level[c] = l;
                level[t] = l;
                open_local[c] = false;
                open_local[t] = false;
            } else {
                let k = g.qudits[0];
                if !open_local[k] {
                    level[k] += 1;
                    open_local[k] = true;
                }
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Inverse circuit.
    pub fn inverse(&self) -> Self {
        let gates = self.gates.iter().rev().flat_map(Gate::inverse).collect();
        Self {
            register: self.register.clone(),
            gates,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CircuitJson {
            dims: self.register.dims().to_vec(),
            gates: self.gates.clone(),
            n_loc: self.n_loc(),
            n_ent: self.n_ent(),
            depth: self.depth(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: CircuitJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Format(format!("circuit: {e}")))?;
        Self::new(&QuditRegister::new(doc.dims)?, doc.gates)
    }

    /// Dense `U_C`, built column by column from gate actions.
    pub fn unitary(&self, cap: usize) -> Result<DMatrix<C64>> {
        let n = self.register.total_dim();
        if n > cap {
            return Err(Error::DimensionCap { dim: n, cap });
        }
        let mut u = DMatrix::<C64>::identity(n, n);
        for g in &self.gates {
            u = embed(&self.register, g)? * u;
        }
        Ok(u)
    }
}

/// Embeds a gate into the full register as a dense matrix.
fn embed(register: &QuditRegister, g: &Gate) -> Result<DMatrix<C64>> {
    let local = gate_unitary(g)?;
    let n = register.total_dim();
    let mut m = DMatrix::zeros(n, n);
    for col in 0..n {
        let digits = register.digits(col);
        let sub_col = g
            .qudits
            .iter()
            .fold(0usize, |acc, &q| acc * g.dim as usize + digits[q] as usize);
        for sub_row in 0..local.nrows() {
            let v = local[(sub_row, sub_col)];
            if v.norm() == 0.0 {
                continue;
            }
            let mut out = digits.clone();
            let mut rest = sub_row;
            for &q in g.qudits.iter().rev() {
                out[q] = (rest % g.dim as usize) as u32;
                rest /= g.dim as usize;
            }
            m[(register.index(&out), col)] += v;
        }
    }
    Ok(m)
}

/// `U_C P U_C†` computed from per-gate images of the generators, phase included.
pub fn conjugate_ps(circuit: &CliffordCircuit, p: &PauliString) -> Result<PauliString> {
    circuit.register.check_same(p.register())?;
    let mut cur = p.clone();
    for g in &circuit.gates {
        cur = conjugate_gate(g, &cur)?;
    }
    Ok(cur)
}

pub(crate) fn conjugate_gate(g: &Gate, p: &PauliString) -> Result<PauliString> {
    let register = p.register();
    g.validate(register)?;
    let (xs, zs) = g.images(register)?;
    // the untouched part keeps its phase; acted-on factors are rebuilt from images
    let mut exps = p.exps().to_vec();
    for &q in &g.qudits {
        exps[q] = (0, 0);
    }
    let mut out = PauliString::new(register, exps, p.phase_exp())?;
    for (k, &q) in g.qudits.iter().enumerate() {
        let (r, s) = p.exps()[q];
        out = out.multiply(&xs[k].pow(r))?.multiply(&zs[k].pow(s))?;
    }
    Ok(out)
}
