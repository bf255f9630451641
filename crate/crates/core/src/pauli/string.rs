use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::register::QuditRegister;
use crate::error::{Error, Result};

/// Default cap on the Hilbert-space dimension of dense matrices and states.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// `exp(2πi k / n)`.
pub fn root_of_unity(k: i64, n: u32) -> C64 {
    let n = n as i64;
    let k = k.rem_euclid(n);
    // exact values on the axes keep dense oracles tidy
    if 4 * k % n == 0 {
        return match 4 * k / n {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
}

/// Dense `X_d^r Z_d^s = Σ_μ |μ+r⟩ ω_d^{sμ} ⟨μ|`.
pub fn local_matrix(d: u32, r: u32, s: u32) -> Result<DMatrix<C64>> {
    for value in [r, s] {
        if value >= d {
            return Err(Error::ExponentOutOfRange { value, dim: d });
        }
    }
    let n = d as usize;
    let mut m = DMatrix::zeros(n, n);
    for mu in 0..n {
        m[((mu + r as usize) % n, mu)] = root_of_unity((s as usize * mu) as i64, d);
    }
    Ok(m)
}

/// Which commutation relation defines graph edges and cliques.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommutationMode {
    #[serde(rename = "gc", alias = "general")]
    General,
    #[serde(rename = "bc", alias = "bitwise")]
    Bitwise,
}

impl FromStr for CommutationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gc" | "general" => Ok(Self::General),
            "bc" | "bitwise" => Ok(Self::Bitwise),
            other => Err(Error::InvalidSetting(format!("unknown commutation mode {other:?}"))),
        }
    }
}

impl fmt::Display for CommutationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::General => "gc",
            Self::Bitwise => "bc",
        })
    }
}

/// A generalized Pauli string `ω_{2 d_P}^τ ⊗_j X_{d_j}^{r_j} Z_{d_j}^{s_j}`.
///
/// The phase exponent `τ` is kept modulo `2 d_P`, which is fine enough to
/// represent products such as `XZ` on a qubit exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    register: QuditRegister,
    exps: Vec<(u32, u32)>,
    phase: u32,
}

impl PauliString {
    pub fn identity(register: &QuditRegister) -> Self {
        Self {
            register: register.clone(),
            exps: vec![(0, 0); register.len()],
            phase: 0,
        }
    }

    pub fn new(register: &QuditRegister, exps: Vec<(u32, u32)>, phase: u32) -> Result<Self> {
        if exps.len() != register.len() {
            return Err(Error::LengthMismatch {
                expected: register.len(),
                found: exps.len(),
            });
        }
        for (&(r, s), &d) in exps.iter().zip(register.dims()) {
            for value in [r, s] {
                if value >= d {
                    return Err(Error::ExponentOutOfRange { value, dim: d });
                }
            }
        }
        Ok(Self {
            register: register.clone(),
            exps,
            phase: phase % register.phase_order(),
        })
    }

    /// Builds a string from possibly unreduced (even negative) exponents.
    pub fn from_raw(register: &QuditRegister, exps: &[(i64, i64)], phase: i64) -> Result<Self> {
        if exps.len() != register.len() {
            return Err(Error::LengthMismatch {
                expected: register.len(),
                found: exps.len(),
            });
        }
        let exps = exps
            .iter()
            .zip(register.dims())
            .map(|(&(r, s), &d)| {
                let d = d as i64;
                (r.rem_euclid(d) as u32, s.rem_euclid(d) as u32)
            })
            .collect();
        Ok(Self {
            register: register.clone(),
            exps,
            phase: phase.rem_euclid(register.phase_order() as i64) as u32,
        })
    }

    /// `X^r Z^s` on a single qudit, identity elsewhere.
    pub fn single(register: &QuditRegister, qudit: usize, r: u32, s: u32) -> Result<Self> {
        if qudit >= register.len() {
            return Err(Error::QuditIndex {
                index: qudit,
                len: register.len(),
            });
        }
        let mut exps = vec![(0, 0); register.len()];
        exps[qudit] = (r, s);
        Self::new(register, exps, 0)
    }

    pub fn register(&self) -> &QuditRegister {
        &self.register
    }

    pub fn exps(&self) -> &[(u32, u32)] {
        &self.exps
    }

    pub fn phase_exp(&self) -> u32 {
        self.phase
    }

    pub fn with_phase(mut self, phase: i64) -> Self {
        self.phase = phase.rem_euclid(self.register.phase_order() as i64) as u32;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == (0, 0))
    }

    /// True when every `r_j` is zero, i.e. the string is a phase times powers of `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.exps.iter().all(|&(r, _)| r == 0)
    }

    /// Exponent pairs without the phase; the key used for ordering terms.
    pub fn key(&self) -> Vec<(u32, u32)> {
        self.exps.clone()
    }

    /// Scale factor converting a local `ω_d` exponent into `ω_{2 d_P}` units.
    fn unit(&self, qudit: usize) -> i64 {
        (self.register.phase_order() / self.register.dim(qudit)) as i64
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.register.check_same(&other.register)?;
        let mut phase = self.phase as i64 + other.phase as i64;
        let mut exps = Vec::with_capacity(self.exps.len());
        for (j, (&(r1, s1), &(r2, s2))) in self.exps.iter().zip(&other.exps).enumerate() {
            let d = self.register.dim(j);
            // Z^{s1} X^{r2} = ω^{s1 r2} X^{r2} Z^{s1}
            phase += self.unit(j) * (s1 as i64 * r2 as i64);
            exps.push(((r1 + r2) % d, (s1 + s2) % d));
        }
        Ok(Self {
            register: self.register.clone(),
            exps,
            phase: phase.rem_euclid(self.register.phase_order() as i64) as u32,
        })
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut phase = -(self.phase as i64);
        let mut exps = Vec::with_capacity(self.exps.len());
        for (j, &(r, s)) in self.exps.iter().enumerate() {
            let d = self.register.dim(j);
            // (X^r Z^s)† = Z^{-s} X^{-r} = ω^{rs} X^{-r} Z^{-s}
            phase += self.unit(j) * (r as i64 * s as i64);
            exps.push(((d - r) % d, (d - s) % d));
        }
        Self {
            register: self.register.clone(),
            exps,
            phase: phase.rem_euclid(self.register.phase_order() as i64) as u32,
        }
    }

    /// `self^n` for `n ≥ 0`.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(&self.register);
        for _ in 0..n {
            acc = acc.multiply(self).expect("same register");
        }
        acc
    }

    /// Symplectic commutation phase: `P_a P_b = ω_{d_P}^{k} P_b P_a` with `k` returned.
    pub fn commutation_phase(&self, other: &Self) -> Result<u32> {
        self.register.check_same(&other.register)?;
        let lcm = self.register.lcm() as i64;
        let mut k = 0i64;
        for (j, (&(r1, s1), &(r2, s2))) in self.exps.iter().zip(&other.exps).enumerate() {
            let scale = lcm / self.register.dim(j) as i64;
            k += scale * (s1 as i64 * r2 as i64 - s2 as i64 * r1 as i64);
        }
        Ok(k.rem_euclid(lcm) as u32)
    }

    pub fn commutes_general(&self, other: &Self) -> Result<bool> {
        Ok(self.commutation_phase(other)? == 0)
    }

    /// Every single-qudit factor pair commutes on its own.
    pub fn commutes_bitwise(&self, other: &Self) -> Result<bool> {
        self.register.check_same(&other.register)?;
        Ok(self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(self.register.dims())
            .all(|((&(r1, s1), &(r2, s2)), &d)| {
                let d = d as i64;
                (s1 as i64 * r2 as i64 - s2 as i64 * r1 as i64).rem_euclid(d) == 0
            }))
    }

    pub fn commutes(&self, other: &Self, mode: CommutationMode) -> Result<bool> {
        match mode {
            CommutationMode::General => self.commutes_general(other),
            CommutationMode::Bitwise => self.commutes_bitwise(other),
        }
    }

    /// Number of qubit factors with both `X` and `Z` present, mod 2.
    fn qubit_xz_parity(&self) -> u32 {
        self.exps
            .iter()
            .zip(self.register.dims())
            .filter(|&(&(r, s), &d)| d == 2 && r == 1 && s == 1)
            .count() as u32
            % 2
    }

    /// Offset `ε ∈ {0, 1}` such that the spectrum is `ω_{2 d_P}^ε · {ω_{d_P}^μ}`.
    ///
    /// `P^{d_P} = (-1)^{τ + #XZ-qubit-factors}` because `d_P` is squarefree.
    pub fn eigen_offset(&self) -> u32 {
        (self.phase + self.qubit_xz_parity()) % 2
    }

    /// Splits `self = ω_{2 d_P}^k · N` where `N` has the same exponents and the
    /// phase that makes `N^{d_P} = I`, so its eigenvalues are exactly `ω_{d_P}^μ`.
    /// Returns `(k, N)`.
    pub fn normalized(&self) -> (i64, Self) {
        let target = self.qubit_xz_parity();
        let shift = self.phase as i64 - target as i64;
        let n = Self {
            register: self.register.clone(),
            exps: self.exps.clone(),
            phase: target,
        };
        (shift, n)
    }

    /// Global phase as a complex number.
    pub fn phase_factor(&self) -> C64 {
        root_of_unity(self.phase as i64, self.register.phase_order())
    }

    /// Dense matrix, rejected above `cap`.
    pub fn matrix(&self, cap: usize) -> Result<DMatrix<C64>> {
        let dim = self.register.total_dim();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        let mut m = DMatrix::from_element(1, 1, self.phase_factor());
        for (j, &(r, s)) in self.exps.iter().enumerate() {
            m = m.kronecker(&local_matrix(self.register.dim(j), r, s)?);
        }
        Ok(m)
    }

    /// Diagonal eigenvalue readout for computational-basis digits.
    ///
    /// Requires a diagonal string. Returns `μ` with the eigenvalue
    /// `ω_{2 d_P}^ε ω_{d_P}^μ`, where `ε` is [`Self::eigen_offset`].
    pub fn eigenindex(&self, digits: &[u32]) -> Result<u32> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal(self.to_string()));
        }
        if digits.len() != self.exps.len() {
            return Err(Error::LengthMismatch {
                expected: self.exps.len(),
                found: digits.len(),
            });
        }
        let lcm = self.register.lcm() as i64;
        let eps = self.eigen_offset() as i64;
        let mut mu = (self.phase as i64 - eps) / 2;
        for (j, (&(_, s), &n)) in self.exps.iter().zip(digits).enumerate() {
            mu += (lcm / self.register.dim(j) as i64) * s as i64 * n as i64;
        }
        Ok(mu.rem_euclid(lcm) as u32)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != 0 {
            write!(f, "w{}^{} ", self.register.phase_order(), self.phase)?;
        }
        for (j, &(r, s)) in self.exps.iter().enumerate() {
            if j > 0 {
                write!(f, "⊗")?;
            }
            match (r, s) {
                (0, 0) => write!(f, "I")?,
                (r, 0) => write!(f, "X{}", r)?,
                (0, s) => write!(f, "Z{}", s)?,
                (r, s) => write!(f, "X{}Z{}", r, s)?,
            }
        }
        Ok(())
    }
}
