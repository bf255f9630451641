use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::register::QuditRegister;
use super::string::{root_of_unity, PauliString};
use crate::error::{Error, Result};

/// One weighted term `c · P` of an observable.
///
/// `string` is always in normalized form (see [`PauliString::normalized`]),
/// so its eigenvalues are exactly `ω_{d_P}^μ`; any extra global phase of the
/// input string has been folded into `coeff`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub string: PauliString,
}

/// A register plus weighted Pauli-string terms, merged and sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    register: QuditRegister,
    terms: Vec<Term>,
}

const HERMITIAN_TOL: f64 = 1e-10;

impl Observable {
    /// Normalizes every string, merges duplicates and sorts lexicographically
    /// on `(r_1, s_1, …, r_q, s_q)`. Terms whose merged coefficient is exactly
    /// zero are kept out.
    pub fn new(register: &QuditRegister, terms: Vec<(C64, PauliString)>) -> Result<Self> {
        let order = register.phase_order();
        let mut merged: BTreeMap<Vec<(u32, u32)>, (C64, PauliString)> = BTreeMap::new();
        for (c, p) in terms {
            register.check_same(p.register())?;
            let (shift, n) = p.normalized();
            let c = c * root_of_unity(shift, order);
            merged
                .entry(n.key())
                .and_modify(|e| e.0 += c)
                .or_insert((c, n));
        }
        let terms = merged
            .into_values()
            .filter(|(c, _)| *c != C64::new(0.0, 0.0))
            .map(|(coeff, string)| Term { coeff, string })
            .collect();
        Ok(Self {
            register: register.clone(),
            terms,
        })
    }

    pub fn register(&self) -> &QuditRegister {
        &self.register
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficients(&self) -> Vec<C64> {
        self.terms.iter().map(|t| t.coeff).collect()
    }

    pub fn strings(&self) -> Vec<PauliString> {
        self.terms.iter().map(|t| t.string.clone()).collect()
    }

    /// Checks term by term that `(c P)†` appears with the matching coefficient.
    pub fn is_hermitian(&self) -> bool {
        let order = self.register.phase_order();
        let index: BTreeMap<_, _> = self
            .terms
            .iter()
            .map(|t| (t.string.key(), t.coeff))
            .collect();
        self.terms.iter().all(|t| {
            let (shift, n) = t.string.dagger().normalized();
            let want = t.coeff.conj() * root_of_unity(shift, order);
            match index.get(&n.key()) {
                Some(c) => (c - want).norm() <= HERMITIAN_TOL * (1.0 + want.norm()),
                None => want.norm() <= HERMITIAN_TOL,
            }
        })
    }

    /// `Σ c_i P_i` as a dense matrix.
    pub fn matrix(&self, cap: usize) -> Result<DMatrix<C64>> {
        let n = self.register.total_dim();
        if n > cap {
            return Err(Error::DimensionCap { dim: n, cap });
        }
        let mut m = DMatrix::zeros(n, n);
        for t in &self.terms {
            m += t.string.matrix(cap)? * t.coeff;
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    re: f64,
    #[serde(default)]
    im: f64,
    paulis: Vec<[u32; 2]>,
}

#[derive(Serialize, Deserialize)]
struct ObservableJson {
    dims: Vec<u32>,
    terms: Vec<TermJson>,
}

impl Observable {
    pub fn to_json(&self) -> serde_json::Value {
        // the stored strings carry a normalized phase; the file format has no
        // phase field, so fold it back into the coefficient
        let order = self.register.phase_order();
        let doc = ObservableJson {
            dims: self.register.dims().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let c = t.coeff * root_of_unity(t.string.phase_exp() as i64, order);
                    TermJson {
                        re: c.re,
                        im: c.im,
                        paulis: t.string.exps().iter().map(|&(r, s)| [r, s]).collect(),
                    }
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: ObservableJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::Format(format!("observable: {e}")))?;
        let register = QuditRegister::new(doc.dims)?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            let exps = t.paulis.iter().map(|p| (p[0], p[1])).collect();
            terms.push((C64::new(t.re, t.im), PauliString::new(&register, exps, 0)?));
        }
        Self::new(&register, terms)
    }
}
