use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of qudit dimensions.
///
/// Every dimension must be prime. Commutation and diagonalization both
/// factorize over blocks of equal prime dimension, so mixed registers such
/// as `[2, 2, 3]` are fine, but composite dimensions are rejected.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct QuditRegister {
    dims: Vec<u32>,
    lcm: u32,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl QuditRegister {
    pub fn new(dims: Vec<u32>) -> Result<Self> {
        let mut lcm = 1u32;
        for &d in &dims {
            if d < 2 {
                return Err(Error::DimensionTooSmall(d));
            }
            if !is_prime(d) {
                return Err(Error::CompositeDimension(d));
            }
            lcm = lcm / gcd(lcm, d) * d;
        }
        Ok(Self { dims, lcm })
    }

    /// `n` qudits of dimension `d`.
    pub fn uniform(d: u32, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn dim(&self, qudit: usize) -> u32 {
        self.dims[qudit]
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Least common multiple of the dimensions. Pauli-string eigenvalues are
    /// powers of the primitive root of unity of this order.
    pub fn lcm(&self) -> u32 {
        self.lcm
    }

    /// Order of the root of unity used for global phases (`2 * lcm`).
    pub fn phase_order(&self) -> u32 {
        2 * self.lcm
    }

    /// Hilbert-space dimension, the product of all qudit dimensions.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().map(|&d| d as usize).product()
    }

    /// Digits of a basis index; qudit 0 is the most significant digit.
    pub fn digits(&self, mut index: usize) -> Vec<u32> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = (index % d as usize) as u32;
            index /= d as usize;
        }
        out
    }

    pub fn index(&self, digits: &[u32]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0usize, |acc, (&n, &d)| acc * d as usize + n as usize)
    }

    /// Distinct prime dimensions in ascending order.
    pub fn primes(&self) -> Vec<u32> {
        let mut p = self.dims.clone();
        p.sort_unstable();
        p.dedup();
        p
    }

    /// Qudit indices whose dimension equals `d`.
    pub fn block(&self, d: u32) -> Vec<usize> {
        (0..self.dims.len()).filter(|&j| self.dims[j] == d).collect()
    }

    pub fn check_same(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::RegisterMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<u32>> for QuditRegister {
    type Error = Error;

    fn try_from(dims: Vec<u32>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<QuditRegister> for Vec<u32> {
    fn from(reg: QuditRegister) -> Self {
        reg.dims
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_and_dims() {
        let reg = QuditRegister::new(vec![2, 2, 3]).unwrap();
        assert_eq!(reg.lcm(), 6);
        assert_eq!(reg.len(), 3);
        assert_eq!(reg.total_dim(), 12);
        assert_eq!(reg.primes(), vec![2, 3]);
        assert_eq!(reg.block(2), vec![0, 1]);
    }

    #[test]
    fn rejects_composite_and_small() {
        assert!(matches!(
            QuditRegister::new(vec![2, 4]),
            Err(Error::CompositeDimension(4))
        ));
        assert!(matches!(
            QuditRegister::new(vec![1]),
            Err(Error::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn digits_round_trip() {
        let reg = QuditRegister::new(vec![2, 3, 5]).unwrap();
        for i in 0..reg.total_dim() {
            assert_eq!(reg.index(&reg.digits(i)), i);
        }
        assert_eq!(reg.digits(5 + 15), vec![1, 1, 0]);
    }
}
