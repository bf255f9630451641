use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::string::root_of_unity;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::Format(format!("unknown spin axis {other:?}"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

fn check_dim(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    Ok(())
}

/// Ladder weight `σ_μ` for spin `(d_S - 1)/2`.
pub fn ladder_weight(d: u32, mu: u32) -> f64 {
    let d = d as f64;
    let m = mu as f64;
    (2.0 * ((d + 1.0) / 2.0) * (m + 1.0) - (m + 1.0) * (m + 2.0)).sqrt()
}

/// Spin operator of dimension `d_S`, scaled so that `d_S = 2` gives the Pauli matrices.
pub fn spin_matrix(d: u32, axis: Axis) -> Result<DMatrix<C64>> {
    check_dim(d)?;
    let n = d as usize;
    let mut m = DMatrix::zeros(n, n);
    match axis {
        Axis::X | Axis::Y => {
            let (up, down) = if axis == Axis::X {
                (C64::new(1.0, 0.0), C64::new(1.0, 0.0))
            } else {
                (C64::new(0.0, 1.0), C64::new(0.0, -1.0))
            };
            for mu in 0..n - 1 {
                let w = ladder_weight(d, mu as u32);
                m[(mu + 1, mu)] = up * w;
                m[(mu, mu + 1)] = down * w;
            }
        }
        Axis::Z => {
            for mu in 0..n {
                m[(mu, mu)] = C64::new(2.0 * ((d as f64 - 1.0) / 2.0 - mu as f64), 0.0);
            }
        }
    }
    Ok(m)
}

/// Nonzero coefficients `c^{r,s}` with `S_axis = Σ c^{r,s} X^r Z^s`, in closed form.
pub fn spin_coefficients(d: u32, axis: Axis) -> Result<Vec<((u32, u32), C64)>> {
    check_dim(d)?;
    let inv_d = 1.0 / d as f64;
    let mut out = Vec::new();
    let mut push = |r: u32, s: u32, c: C64| {
        if c.norm() > 1e-12 {
            out.push(((r, s), c));
        }
    };
    match axis {
        Axis::X | Axis::Y => {
            let (prefactor, sign) = if axis == Axis::X {
                (C64::new(inv_d, 0.0), 1.0)
            } else {
                (C64::new(0.0, inv_d), -1.0)
            };
            // raising part lives on r = 1, lowering part on r = d - 1; for a
            // qubit both land on r = 1
            let mut acc: BTreeMap<(u32, u32), C64> = BTreeMap::new();
            for s in 0..d {
                for mu in 0..d - 1 {
                    let w = ladder_weight(d, mu);
                    *acc.entry((1, s)).or_default() += root_of_unity(-((s * mu) as i64), d) * w;
                    *acc.entry((d - 1, s)).or_default() +=
                        root_of_unity(-((s * (mu + 1)) as i64), d) * (w * sign);
                }
            }
            for ((r, s), c) in acc {
                push(r, s, prefactor * c);
            }
        }
        Axis::Z => {
            for s in 0..d {
                let mut c = C64::new(0.0, 0.0);
                for mu in 0..d {
                    c += root_of_unity(-((s * mu) as i64), d) * ((d as f64 - 1.0) / 2.0 - mu as f64);
                }
                push(0, s, c * (2.0 * inv_d));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::string::local_matrix;

    fn rebuild(d: u32, coeffs: &[((u32, u32), C64)]) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(d as usize, d as usize);
        for &((r, s), c) in coeffs {
            m += local_matrix(d, r, s).unwrap() * c;
        }
        m
    }

    #[test]
    fn qubit_spins_are_paulis() {
        let z = spin_coefficients(2, Axis::Z).unwrap();
        assert_eq!(z.len(), 1);
        assert_eq!(z[0].0, (0, 1));
        assert!((z[0].1 - C64::new(1.0, 0.0)).norm() < 1e-15);
        let x = spin_coefficients(2, Axis::X).unwrap();
        assert_eq!(x.len(), 1);
        assert_eq!(x[0].0, (1, 0));
        assert!((x[0].1 - C64::new(1.0, 0.0)).norm() < 1e-15);
        let y = spin_matrix(2, Axis::Y).unwrap();
        assert_eq!(y[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], C64::new(0.0, 1.0));
    }

    #[test]
    fn qutrit_z() {
        let m = spin_matrix(3, Axis::Z).unwrap();
        let diag: Vec<f64> = (0..3).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![2.0, 0.0, -2.0]);
        let rebuilt = rebuild(3, &spin_coefficients(3, Axis::Z).unwrap());
        assert!((rebuilt - m).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn reconstruction_and_counts() {
        for d in 2..=7 {
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                let c = spin_coefficients(d, axis).unwrap();
                let bound = if axis == Axis::Z { d } else { 2 * d } as usize;
                assert!(c.len() <= bound, "d={d} {axis}: {}", c.len());
                let err = (rebuild(d, &c) - spin_matrix(d, axis).unwrap())
                    .iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max);
                assert!(err <= 1e-12, "d={d} {axis}: {err}");
            }
            let x = spin_matrix(d, Axis::X).unwrap();
            assert!(x.iter().all(|v| v.im == 0.0));
            assert_eq!(x, x.transpose());
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(spin_matrix(1, Axis::X).is_err());
        assert!(spin_coefficients(1, Axis::Z).is_err());
    }
}
