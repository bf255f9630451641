use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::observable::Observable;
use super::register::QuditRegister;
use super::spin::{spin_coefficients, Axis};
use super::string::{root_of_unity, PauliString};
use crate::error::{Error, Result};

/// Coefficients below this magnitude are treated as numerical noise.
pub const COEFF_TOL: f64 = 1e-12;

/// One spin factor `S_axis` acting on `qudit`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinFactor {
    pub qudit: usize,
    pub axis: Axis,
}

/// `coeff · Π factors`; an empty factor list is the identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinProduct {
    pub coeff: f64,
    #[serde(default)]
    pub factors: Vec<SpinFactor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinPolynomial {
    pub dims: Vec<u32>,
    pub terms: Vec<SpinProduct>,
}

/// Decomposes a dense operator into Pauli strings with `c = tr(P† O) / D`.
pub fn decompose_matrix(register: &QuditRegister, m: &DMatrix<C64>, cap: usize) -> Result<Observable> {
    let dim = register.total_dim();
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.nrows().max(m.ncols()),
        });
    }
    let q = register.len();
    let dims = register.dims();
    let mut terms = Vec::new();
    // iterate over all (r, s) assignments as a mixed-radix counter
    let mut exps = vec![(0u32, 0u32); q];
    loop {
        let p = PauliString::new(register, exps.clone(), 0)?;
        // P|μ⟩ = Π_j ω_{d_j}^{s_j μ_j} |μ + r⟩, so tr(P† O) = Σ_μ conj(P_{μ+r,μ}) O_{μ+r,μ}
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..dim {
            let digits = register.digits(col);
            let mut row_digits = digits.clone();
            let mut phase = C64::new(1.0, 0.0);
            for j in 0..q {
                let (r, s) = exps[j];
                row_digits[j] = (digits[j] + r) % dims[j];
                phase *= root_of_unity((s * digits[j]) as i64, dims[j]);
            }
            acc += phase.conj() * m[(register.index(&row_digits), col)];
        }
        let c = acc / dim as f64;
        if c.norm() >= COEFF_TOL {
            terms.push((c, p));
        }
        if !advance(&mut exps, dims) {
            break;
        }
    }
    Observable::new(register, terms)
}

fn advance(exps: &mut [(u32, u32)], dims: &[u32]) -> bool {
    for j in (0..exps.len()).rev() {
        let d = dims[j];
        exps[j].1 += 1;
        if exps[j].1 < d {
            return true;
        }
        exps[j].1 = 0;
        exps[j].0 += 1;
        if exps[j].0 < d {
            return true;
        }
        exps[j].0 = 0;
    }
    false
}

/// Expands a spin polynomial factor by factor into Pauli strings.
pub fn decompose_spin(poly: &SpinPolynomial) -> Result<Observable> {
    let register = QuditRegister::new(poly.dims.clone())?;
    let mut terms = Vec::new();
    for product in &poly.terms {
        let mut partial = vec![(C64::new(product.coeff, 0.0), PauliString::identity(&register))];
        for f in &product.factors {
            if f.qudit >= register.len() {
                return Err(Error::QuditIndex {
                    index: f.qudit,
                    len: register.len(),
                });
            }
            let local = spin_coefficients(register.dim(f.qudit), f.axis)?;
            let mut next = Vec::with_capacity(partial.len() * local.len());
            for (c, p) in &partial {
                for &((r, s), cl) in &local {
                    let single = PauliString::single(&register, f.qudit, r, s)?;
                    next.push((c * cl, p.multiply(&single)?));
                }
            }
            partial = next;
        }
        terms.extend(partial);
    }
    let merged = Observable::new(&register, terms)?;
    // drop coefficients that cancelled to noise during merging
    let kept = merged
        .terms()
        .iter()
        .filter(|t| t.coeff.norm() >= COEFF_TOL)
        .map(|t| (t.coeff, t.string.clone()))
        .collect();
    Observable::new(&register, kept)
}
