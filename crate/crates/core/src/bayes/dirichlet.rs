use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pauli::{root_of_unity, PauliString};

fn check(s: &[u64], a: &[f64]) -> Result<()> {
    if s.len() != a.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: s.len(),
        });
    }
    if let Some(&bad) = a.iter().find(|&&x| x.is_nan() || x < 0.0) {
        return Err(Error::InvalidProbability {
            name: "prior",
            value: bad,
        });
    }
    Ok(())
}

/// Posterior mean `θ̃_μ = (s_μ + a_μ) / (Σ a + Σ s)` of the outcome distribution.
pub fn posterior_mean_theta(s: &[u64], a: &[f64]) -> Result<Vec<f64>> {
    check(s, a)?;
    let total: f64 = s.iter().map(|&x| x as f64).sum::<f64>() + a.iter().sum::<f64>();
    if total <= 0.0 {
        return Err(Error::ZeroDenominator("posterior mean"));
    }
    Ok(s.iter().zip(a).map(|(&x, &p)| (x as f64 + p) / total).collect())
}

/// `Σ_μ θ_μ ω_n^μ`.
pub fn root_mean(theta: &[f64]) -> C64 {
    let n = theta.len() as u32;
    theta
        .iter()
        .enumerate()
        .map(|(mu, &t)| root_of_unity(mu as i64, n) * t)
        .sum()
}

/// Posterior mean of `⟨P⟩` from eigenindex counts of `P`.
///
/// Counts index the eigenvalue `ω_{2 d_P}^ε ω_{d_P}^μ`, with `ε` the string's
/// eigen offset (zero for the normalized strings stored in observables).
pub fn ps_mean(p: &PauliString, s: &[u64], a: &[f64]) -> Result<C64> {
    let d = p.register().lcm() as usize;
    if s.len() != d {
        return Err(Error::LengthMismatch { expected: d, found: s.len() });
    }
    let theta = posterior_mean_theta(s, a)?;
    Ok(root_of_unity(p.eigen_offset() as i64, p.register().phase_order()) * root_mean(&theta))
}

/// Posterior mean of `⟨P† P⟩ - |⟨P⟩|²`:
/// `Σ_{μ≠ν} E[θ_μ θ_ν] (1 - ω^{ν-μ})` with Dirichlet second moments.
///
/// Real up to rounding; returned as a real number.
pub fn self_covariance(s: &[u64], a: &[f64]) -> Result<f64> {
    check(s, a)?;
    let d = s.len();
    let alpha: Vec<f64> = s.iter().zip(a).map(|(&x, &p)| x as f64 + p).collect();
    let total: f64 = alpha.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroDenominator("self covariance"));
    }
    let norm = total * (total + 1.0);
    let mut q = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            if mu != nu {
                let w = root_of_unity(nu as i64 - mu as i64, d as u32);
                q += alpha[mu] * alpha[nu] / norm * (1.0 - w.re);
            }
        }
    }
    Ok(q)
}

/// Posterior mean and variance of an error rate from `(errors, clean)` counts.
pub fn beta_posterior(errors: u64, clean: u64) -> (f64, f64) {
    let a = errors as f64 + 1.0;
    let b = clean as f64 + 1.0;
    let n = a + b;
    (a / n, a * b / (n * n * (n + 1.0)))
}
