use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::dirichlet::{posterior_mean_theta, root_mean};
use crate::error::{Error, Result};
use crate::pauli::root_of_unity;

/// Outcome distributions of `P_i`, `P_j` and `P_i† P_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaTriple {
    pub theta_i: Vec<f64>,
    pub theta_j: Vec<f64>,
    pub theta_ij: Vec<f64>,
}

impl ThetaTriple {
    pub fn d(&self) -> usize {
        self.theta_i.len()
    }

    /// `Q = Σ_μ θ_ij,μ ω^μ - conj(Σ θ_i,μ ω^μ) Σ θ_j,ν ω^ν`.
    pub fn covariance(&self) -> C64 {
        root_mean(&self.theta_ij) - root_mean(&self.theta_i).conj() * root_mean(&self.theta_j)
    }
}

const NORM_TOL: f64 = 1e-10;

fn check_state(psi: &[C64], d: usize) -> Result<()> {
    if psi.len() != d * d {
        return Err(Error::LengthMismatch {
            expected: d * d,
            found: psi.len(),
        });
    }
    let n: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n.sqrt()));
    }
    Ok(())
}

/// `θ^{(A,B)}_μ = Σ_{(B j' - A i') mod d = μ} |φ_{i'j'}|²`.
pub fn product_marginal(psi: &[C64], d: usize, a: usize, b: usize) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for i in 0..d {
        for j in 0..d {
            out[(b * j + d * d - a * i) % d] += psi[i * d + j].norm_sqr();
        }
    }
    out
}

/// Maps a two-qudit state `Σ φ_{i'j'} |i'⟩|j'⟩` (row-major) to its probability triple.
pub fn state_to_probs(psi: &[C64], d: usize) -> Result<ThetaTriple> {
    check_state(psi, d)?;
    Ok(probs_unchecked(psi, d))
}

pub(crate) fn probs_unchecked(psi: &[C64], d: usize) -> ThetaTriple {
    let mut theta_i = vec![0.0; d];
    let mut theta_j = vec![0.0; d];
    let mut theta_ij = vec![0.0; d];
    for i in 0..d {
        for j in 0..d {
            let w = psi[i * d + j].norm_sqr();
            theta_i[i] += w;
            theta_j[j] += w;
            theta_ij[(j + d - i) % d] += w;
        }
    }
    ThetaTriple {
        theta_i,
        theta_j,
        theta_ij,
    }
}

/// Joint probabilities `ϑ_{μν} = θ_iμ θ_jν + d⁻² Σ_{A,B} ω^{Aμ - Bν} Q^{(A,B)}`
/// rebuilt from every product marginal of the state.
pub fn joint_probs(psi: &[C64], d: usize) -> Result<DMatrix<f64>> {
    check_state(psi, d)?;
    let t = probs_unchecked(psi, d);
    let dn = d as u32;
    let w = |k: i64| root_of_unity(k, dn);
    // Q^{(A,B)} = Σ θ^{(A,B)}_μ ω^μ - Σ θ_iμ θ_jν ω^{Bν - Aμ}
    let mut q = vec![C64::new(0.0, 0.0); d * d];
    for a in 0..d {
        let pa: C64 = (0..d).map(|mu| w(-((a * mu) as i64)) * t.theta_i[mu]).sum();
        for b in 0..d {
            let pb: C64 = (0..d).map(|nu| w((b * nu) as i64) * t.theta_j[nu]).sum();
            q[a * d + b] = root_mean(&product_marginal(psi, d, a, b)) - pa * pb;
        }
    }
    let scale = 1.0 / (d * d) as f64;
    Ok(DMatrix::from_fn(d, d, |mu, nu| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                acc += w((a * mu) as i64 - (b * nu) as i64) * q[a * d + b];
            }
        }
        t.theta_i[mu] * t.theta_j[nu] + acc.re * scale
    }))
}

/// Largest amount by which a reconstructed joint probability leaves `[0, 1]`.
pub fn region_violation(psi: &[C64], d: usize) -> Result<f64> {
    let j = joint_probs(psi, d)?;
    Ok(j.iter().map(|&v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max))
}

/// Haar-random pure state of dimension `n` (normalized complex Gaussians).
pub fn haar_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= norm;
    }
    v
}

/// `ψ' ∝ γ ψ + sqrt(1 - γ²) χ` with Haar-random `χ`.
pub fn propose<R: Rng + ?Sized>(psi: &[C64], gamma: f64, rng: &mut R) -> Vec<C64> {
    let chi = haar_state(psi.len(), rng);
    let mix = (1.0 - gamma * gamma).max(0.0).sqrt();
    let mut out: Vec<C64> = psi.iter().zip(&chi).map(|(a, c)| a * gamma + c * mix).collect();
    let norm = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return chi;
    }
    for a in &mut out {
        *a /= norm;
    }
    out
}

/// Result of fitting a starting state to the posterior mode.
#[derive(Clone, Debug)]
pub struct ChainStart {
    pub psi: Vec<C64>,
    pub triple: ThetaTriple,
    /// Set when no consistent joint distribution was found and the uniform state was used.
    pub fallback: bool,
}

const IPF_SWEEPS: usize = 200;
const IPF_TOL: f64 = 1e-8;

/// Iterative proportional fitting of a `d × d` joint to row, column and
/// difference-class marginals, from `θ_i ⊗ θ_j`. Returns `None` if it does not
/// reach the tolerance.
pub fn ipf(theta_i: &[f64], theta_j: &[f64], theta_ij: &[f64]) -> Option<DMatrix<f64>> {
    let d = theta_i.len();
    let mut m = DMatrix::from_fn(d, d, |i, j| theta_i[i] * theta_j[j]);
    let class = |i: usize, j: usize| (j + d - i) % d;
    for _ in 0..IPF_SWEEPS {
        for (i, &t) in theta_i.iter().enumerate() {
            let s: f64 = m.row(i).sum();
            let f = if s > 0.0 { t / s } else { 0.0 };
            m.row_mut(i).scale_mut(f);
        }
        for (j, &t) in theta_j.iter().enumerate() {
            let s: f64 = m.column(j).sum();
            let f = if s > 0.0 { t / s } else { 0.0 };
            m.column_mut(j).scale_mut(f);
        }
        let mut sums = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                sums[class(i, j)] += m[(i, j)];
            }
        }
        for i in 0..d {
            for j in 0..d {
                let k = class(i, j);
                m[(i, j)] *= if sums[k] > 0.0 { theta_ij[k] / sums[k] } else { 0.0 };
            }
        }
        let mut err = 0.0f64;
        for i in 0..d {
            err = err.max((m.row(i).sum() - theta_i[i]).abs());
            err = err.max((m.column(i).sum() - theta_j[i]).abs());
        }
        let mut sums = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                sums[class(i, j)] += m[(i, j)];
            }
        }
        for k in 0..d {
            err = err.max((sums[k] - theta_ij[k]).abs());
        }
        if err < IPF_TOL {
            return Some(m);
        }
    }
    None
}

/// Starting state at the posterior mode: `θ_i`, `θ_j` at their posterior
/// means, `θ_ij` at its Dirichlet mode, shrunk toward the independent value
/// `θ_i * θ_j` (circular convolution) if no joint distribution matches.
pub fn init_chain(s_i: &[u64], s_j: &[u64], s_ij: &[u64], a: &[f64]) -> Result<ChainStart> {
    let d = a.len();
    for s in [s_i, s_j, s_ij] {
        if s.len() != d {
            return Err(Error::LengthMismatch { expected: d, found: s.len() });
        }
    }
    let theta_i = posterior_mean_theta(s_i, a)?;
    let theta_j = posterior_mean_theta(s_j, a)?;
    // mode of Dirichlet(s + a) is (s + a - 1) / (Σ s + Σ a - d), clipped at zero
    let raw: Vec<f64> = s_ij.iter().zip(a).map(|(&s, &p)| (s as f64 + p - 1.0).max(0.0)).collect();
    let total: f64 = raw.iter().sum();
    let mode: Vec<f64> = if total > 0.0 {
        raw.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / d as f64; d]
    };
    let mut indep = vec![0.0; d];
    for i in 0..d {
        for j in 0..d {
            indep[(j + d - i) % d] += theta_i[i] * theta_j[j];
        }
    }
    let blend = |lambda: f64| -> Vec<f64> { mode.iter().zip(&indep).map(|(m, x)| (1.0 - lambda) * m + lambda * x).collect() };
    let mut joint = ipf(&theta_i, &theta_j, &mode);
    if joint.is_none() {
        // bisect on the shrink factor; λ = 1 is always feasible
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut best = ipf(&theta_i, &theta_j, &indep);
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            match ipf(&theta_i, &theta_j, &blend(mid)) {
                Some(m) => {
                    hi = mid;
                    best = Some(m);
                }
                None => lo = mid,
            }
        }
        joint = best;
    }
    let (psi, fallback) = match joint {
        Some(m) => {
            let mut psi: Vec<C64> = (0..d * d).map(|k| C64::new(m[(k / d, k % d)].max(0.0).sqrt(), 0.0)).collect();
            let n = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut psi {
                *a /= n;
            }
            (psi, false)
        }
        None => (vec![C64::new(1.0 / d as f64, 0.0); d * d], true),
    };
    let triple = probs_unchecked(&psi, d);
    Ok(ChainStart { psi, triple, fallback })
}
