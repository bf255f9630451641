use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bayes::beta_posterior;
use crate::pauli::root_of_unity;
use crate::simulator::ProbeTally;

/// Posterior mean and variance of an error probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiEstimate {
    pub mean: f64,
    pub variance: f64,
}

/// Error probability of a circuit from its probe tally.
///
/// A randomized outcome still matches the probe target with probability
/// `1/D`, so the flag rate is `ξ(1 − 1/D)`; the beta posterior of the flag
/// rate is rescaled accordingly (`outcomes = D`) and clipped to `[0, 1]`.
pub fn circuit_xi(tally: &ProbeTally, outcomes: usize) -> XiEstimate {
    let (m, v) = beta_posterior(tally.errors, tally.clean);
    let keep = if outcomes > 1 { 1.0 - 1.0 / outcomes as f64 } else { 1.0 };
    XiEstimate {
        mean: (m / keep).min(1.0),
        variance: v / (keep * keep),
    }
}

/// Per-string error probabilities: each string inherits the error of the
/// circuits that measured it, weighted by shots.
///
/// `usage[k]` lists `(clique, shots)` for string `k`; strings never measured
/// weight their cliques equally.
pub fn estimate_xi(circuit_xis: &[XiEstimate], usage: &[Vec<(usize, u64)>]) -> Vec<XiEstimate> {
    usage
        .iter()
        .map(|u| {
            let total: u64 = u.iter().map(|&(_, s)| s).sum();
            let weight = |s: u64| if total == 0 { 1.0 / u.len() as f64 } else { s as f64 / total as f64 };
            let mut mean = 0.0;
            let mut variance = 0.0;
            for &(k, s) in u {
                let w = weight(s);
                mean += w * circuit_xis[k].mean;
                variance += w * w * circuit_xis[k].variance;
            }
            XiEstimate { mean, variance }
        })
        .collect()
}

/// `Σ_μ (θ̃_μ − 1/d) ω_d^μ`, scaled by the string's phase offset `ω_{2d}^ε`.
pub fn centered_root_mean(theta: &[f64], offset: u32) -> C64 {
    let d = theta.len() as u32;
    let s: C64 = theta
        .iter()
        .enumerate()
        .map(|(mu, &t)| root_of_unity(mu as i64, d) * (t - 1.0 / d as f64))
        .sum();
    s * root_of_unity(offset as i64, 2 * d)
}

/// Undoes the outcome randomization in a noisy eigenvalue distribution:
/// `(θ̃ − ξ/d) / (1 − ξ)`.
///
/// Not clipped: only moments `Σ θ ω^μ` are used downstream, and those come
/// out exact even when the randomized outcomes cover only a subgroup of `Z_d`.
pub fn denoise_theta(theta: &[f64], xi: f64) -> Vec<f64> {
    let d = theta.len() as f64;
    if xi >= 1.0 {
        return vec![1.0 / d; theta.len()];
    }
    theta.iter().map(|&x| (x - xi / d) / (1.0 - xi)).collect()
}

/// Expected shift of the estimate caused by randomized outcomes:
/// `Σ_i c_i ξ̃_i Σ_μ (θ̃_iμ − 1/d_P) ω^μ`.
pub fn systematic_deviation(xi: &[f64], thetas: &[Vec<f64>], offsets: &[u32], coeffs: &[C64]) -> C64 {
    coeffs
        .iter()
        .zip(xi)
        .zip(thetas.iter().zip(offsets))
        .map(|((c, &x), (t, &e))| c * x * centered_root_mean(t, e))
        .sum()
}

/// `Σ_i |c_i| ξ̃_i max_μ |ω^μ − Σ_ν θ̃_iν ω^ν|`.
pub fn worst_case_bound(xi: &[f64], thetas: &[Vec<f64>], coeffs: &[C64]) -> f64 {
    coeffs
        .iter()
        .zip(xi)
        .zip(thetas)
        .map(|((c, &x), t)| {
            let d = t.len() as u32;
            let mean = crate::bayes::root_mean(t);
            let worst = (0..d).map(|mu| (root_of_unity(mu as i64, d) - mean).norm()).fold(0.0, f64::max);
            c.norm() * x * worst
        })
        .sum()
}
