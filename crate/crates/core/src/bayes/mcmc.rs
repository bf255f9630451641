use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::state::{init_chain, probs_unchecked, propose, ThetaTriple};
use crate::error::{Error, Result};
use crate::rng::stream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McmcConfig {
    pub n_chains: usize,
    pub min_samples: usize,
    pub max_samples: usize,
    /// Samples added per chain between convergence checks.
    pub check_every: usize,
    pub target_acceptance: f64,
    pub burn_in: f64,
    pub geweke_threshold: f64,
    pub rhat_threshold: f64,
    pub seed: u64,
    /// Keep every sample for a chain-trace dump.
    pub keep_trace: bool,
    /// Keep every sampled two-qudit state (memory heavy; for diagnostics).
    pub keep_states: bool,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            n_chains: 8,
            min_samples: 500,
            max_samples: 5000,
            check_every: 500,
            target_acceptance: 0.25,
            burn_in: 0.2,
            geweke_threshold: 2.0,
            rhat_threshold: 1.1,
            seed: 0,
            keep_trace: false,
            keep_states: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Per chain, the larger `|z|` of the real and imaginary sequences.
    pub geweke_z: Vec<f64>,
    /// Larger of the real and imaginary `R̂`.
    pub rhat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub sample: usize,
    pub chain: usize,
    pub q_re: f64,
    pub q_im: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub value: C64,
    pub mc_std_error: f64,
    /// Retained samples summed over chains.
    pub n_samples: usize,
    pub acceptance: f64,
    pub gamma: f64,
    pub diagnostics: Diagnostics,
    pub converged: bool,
    /// True if some chain started from the uniform fallback state.
    pub init_fallback: bool,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
    /// Sampled states in chain order, when `keep_states` is set.
    #[serde(skip)]
    pub states: Vec<Vec<C64>>,
}

/// Log of the unnormalized posterior `Π θ^{s + a - 1}` over the triple.
pub fn log_posterior(t: &ThetaTriple, s_i: &[u64], s_j: &[u64], s_ij: &[u64], a: &[f64]) -> f64 {
    let mut lp = 0.0;
    for (theta, s) in [(&t.theta_i, s_i), (&t.theta_j, s_j), (&t.theta_ij, s_ij)] {
        for mu in 0..theta.len() {
            let e = s[mu] as f64 + a[mu] - 1.0;
            if e == 0.0 {
                continue;
            }
            if theta[mu] <= 0.0 {
                return f64::NEG_INFINITY;
            }
            lp += e * theta[mu].ln();
        }
    }
    lp
}

const GAMMA_MAX: f64 = 1.0 - 1e-6;
const PILOT_BATCH: usize = 100;
const PILOT_ROUNDS: usize = 20;

/// Starting mixing parameter `1 - 1/min(totals)`, or 0 without data.
pub fn initial_gamma(totals: [u64; 3]) -> f64 {
    let m = *totals.iter().min().expect("three totals");
    if m == 0 {
        0.0
    } else {
        (1.0 - 1.0 / m as f64).clamp(0.0, GAMMA_MAX)
    }
}

/// Adjusts `γ` with pilot batches until the acceptance rate lands in `[0.25, 0.40]`.
///
/// `pilot(γ)` runs a batch of proposals and returns the acceptance rate. Low
/// acceptance means steps are too long, so `1 - γ` shrinks; high acceptance
/// lengthens them.
pub fn tune_gamma(totals: [u64; 3], mut pilot: impl FnMut(f64) -> f64) -> f64 {
    let mut gamma = initial_gamma(totals);
    for _ in 0..PILOT_ROUNDS {
        let rate = pilot(gamma);
        let step = 1.0 - gamma;
        let next = if rate < 0.25 {
            step * (2.0 / 3.0)
        } else if rate > 0.40 {
            step * 1.5
        } else {
            return gamma;
        };
        let updated = (1.0 - next).clamp(0.0, GAMMA_MAX);
        if updated == gamma {
            // pinned at a bound: nothing left to adjust
            return gamma;
        }
        gamma = updated;
    }
    gamma
}

struct Chain {
    psi: Vec<C64>,
    triple: ThetaTriple,
    logp: f64,
    accepted: usize,
    proposed: usize,
    q: Vec<C64>,
    flags: Vec<bool>,
    states: Vec<Vec<C64>>,
}

struct Target<'a> {
    d: usize,
    s_i: &'a [u64],
    s_j: &'a [u64],
    s_ij: &'a [u64],
    a: &'a [f64],
}

impl Target<'_> {
    fn logp(&self, t: &ThetaTriple) -> f64 {
        log_posterior(t, self.s_i, self.s_j, self.s_ij, self.a)
    }

    fn step<R: Rng>(&self, chain: &mut Chain, gamma: f64, rng: &mut R) -> bool {
        let cand = propose(&chain.psi, gamma, rng);
        let triple = probs_unchecked(&cand, self.d);
        let lp = self.logp(&triple);
        let accept = lp.is_finite() && (lp >= chain.logp || rng.random::<f64>().ln() < lp - chain.logp);
        if accept {
            chain.psi = cand;
            chain.triple = triple;
            chain.logp = lp;
        }
        accept
    }
}

/// Posterior mean of `Q^{(1,1)}_ij` by Metropolis–Hastings over two-qudit states.
///
/// `stream_id` keys the random streams (one per chain) so that distinct pairs
/// get independent samples from the same seed.
pub fn covariance_mcmc(
    s_i: &[u64],
    s_j: &[u64],
    s_ij: &[u64],
    a: &[f64],
    cfg: &McmcConfig,
    stream_id: u64,
) -> Result<CovarianceEstimate> {
    let d = a.len();
    if cfg.n_chains == 0 || cfg.min_samples == 0 || cfg.max_samples < cfg.min_samples {
        return Err(Error::InvalidSetting("MCMC sample counts".into()));
    }
    let start = init_chain(s_i, s_j, s_ij, a)?;
    let target = Target { d, s_i, s_j, s_ij, a };
    let start_logp = target.logp(&start.triple);
    let totals = [s_i.iter().sum(), s_j.iter().sum(), s_ij.iter().sum()];
    let gamma = if start.fallback {
        0.0
    } else {
        let mut rng = stream(cfg.seed, &[stream_id, u64::MAX]);
        let mut pilot_chain = new_chain(&start.psi, &start.triple, start_logp);
        tune_gamma(totals, |g| {
            let acc = (0..PILOT_BATCH).filter(|_| target.step(&mut pilot_chain, g, &mut rng)).count();
            acc as f64 / PILOT_BATCH as f64
        })
    };

    let mut rngs: Vec<_> = (0..cfg.n_chains).map(|c| stream(cfg.seed, &[stream_id, c as u64])).collect();
    let mut chains: Vec<Chain> = (0..cfg.n_chains)
        .map(|_| new_chain(&start.psi, &start.triple, start_logp))
        .collect();
    let mut len = 0;
    let mut goal = cfg.min_samples;
    loop {
        chains.par_iter_mut().zip(rngs.par_iter_mut()).for_each(|(chain, rng)| {
            for _ in len..goal {
                let acc = target.step(chain, gamma, rng);
                chain.proposed += 1;
                chain.accepted += acc as usize;
                chain.q.push(chain.triple.covariance());
                chain.flags.push(acc);
                if cfg.keep_states {
                    chain.states.push(chain.psi.clone());
                }
            }
        });
        len = goal;
        let diag = diagnose(&chains, cfg.burn_in)?;
        let converged = diag.geweke_z.iter().all(|z| z.abs() <= cfg.geweke_threshold) && diag.rhat <= cfg.rhat_threshold;
        if converged || len >= cfg.max_samples {
            return Ok(summarize(&chains, cfg, gamma, diag, converged, start.fallback));
        }
        goal = (len + cfg.check_every.max(1)).min(cfg.max_samples);
    }
}

fn new_chain(psi: &[C64], triple: &ThetaTriple, logp: f64) -> Chain {
    Chain {
        psi: psi.to_vec(),
        triple: triple.clone(),
        logp,
        accepted: 0,
        proposed: 0,
        q: Vec::new(),
        flags: Vec::new(),
        states: Vec::new(),
    }
}

fn retained(chain: &Chain, burn_in: f64) -> &[C64] {
    let skip = (chain.q.len() as f64 * burn_in).floor() as usize;
    &chain.q[skip..]
}

fn diagnose(chains: &[Chain], burn_in: f64) -> Result<Diagnostics> {
    let re: Vec<Vec<f64>> = chains.iter().map(|c| retained(c, burn_in).iter().map(|q| q.re).collect()).collect();
    let im: Vec<Vec<f64>> = chains.iter().map(|c| retained(c, burn_in).iter().map(|q| q.im).collect()).collect();
    let mut geweke = Vec::with_capacity(chains.len());
    for k in 0..chains.len() {
        geweke.push(geweke_z(&re[k])?.abs().max(geweke_z(&im[k])?.abs()));
    }
    let rhat = gelman_rubin(&re)?.max(gelman_rubin(&im)?);
    Ok(Diagnostics { geweke_z: geweke, rhat })
}

fn summarize(
    chains: &[Chain],
    cfg: &McmcConfig,
    gamma: f64,
    diagnostics: Diagnostics,
    converged: bool,
    init_fallback: bool,
) -> CovarianceEstimate {
    let mut sum = C64::new(0.0, 0.0);
    let mut n = 0;
    let mut var_of_mean = 0.0;
    for c in chains {
        let kept = retained(c, cfg.burn_in);
        sum += kept.iter().sum::<C64>();
        n += kept.len();
        let re: Vec<f64> = kept.iter().map(|q| q.re).collect();
        let im: Vec<f64> = kept.iter().map(|q| q.im).collect();
        var_of_mean += batch_means_variance(&re) + batch_means_variance(&im);
    }
    let k = chains.len() as f64;
    let accepted: usize = chains.iter().map(|c| c.accepted).sum();
    let proposed: usize = chains.iter().map(|c| c.proposed).sum();
    let trace = if cfg.keep_trace {
        chains
            .iter()
            .enumerate()
            .flat_map(|(ci, c)| {
                c.q.iter().zip(&c.flags).enumerate().map(move |(s, (q, &f))| TraceRow {
                    sample: s,
                    chain: ci,
                    q_re: q.re,
                    q_im: q.im,
                    accepted: f,
                })
            })
            .collect()
    } else {
        Vec::new()
    };
    CovarianceEstimate {
        value: sum / n as f64,
        // chains are independent and equally long, so the pooled mean's
        // variance is the average per-chain variance over k
        mc_std_error: (var_of_mean / (k * k)).sqrt(),
        n_samples: n,
        acceptance: accepted as f64 / proposed.max(1) as f64,
        gamma,
        diagnostics,
        converged,
        init_fallback,
        trace,
        states: chains.iter().flat_map(|c| c.states.iter().cloned()).collect(),
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Batch-means estimate of the variance of the sample mean (batch size ≈ √n).
pub fn batch_means_variance(x: &[f64]) -> f64 {
    let n = x.len();
    let b = ((n as f64).sqrt().floor() as usize).max(1);
    let k = n / b;
    if k < 2 {
        return if n > 1 { sample_var(x) / n as f64 } else { 0.0 };
    }
    let means: Vec<f64> = (0..k).map(|i| mean(&x[i * b..(i + 1) * b])).collect();
    sample_var(&means) * b as f64 / (k * b) as f64
}

/// Integrated autocorrelation time with Geyer's initial positive sequence.
pub fn autocorrelation_time(x: &[f64]) -> f64 {
    let n = x.len();
    let m = mean(x);
    let c0 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 1.0;
    }
    let rho = |k: usize| (0..n - k).map(|t| (x[t] - m) * (x[t + k] - m)).sum::<f64>() / (n as f64 * c0);
    let mut tau = -1.0;
    let mut k = 0;
    while k + 1 < n {
        let pair = rho(k) + rho(k + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 2;
    }
    tau.max(1.0)
}

const MIN_DIAG_SAMPLES: usize = 50;

/// Geweke z-score: first 10% against last 50% of the sequence.
///
/// Segment-mean variances use the segment variance scaled by the whole
/// sequence's autocorrelation time.
pub fn geweke_z(chain: &[f64]) -> Result<f64> {
    let n = chain.len();
    if n < MIN_DIAG_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_DIAG_SAMPLES,
            have: n,
        });
    }
    let a = &chain[..n / 10];
    let b = &chain[n - n / 2..];
    let tau = autocorrelation_time(chain);
    let va = sample_var(a) * tau / a.len() as f64;
    let vb = sample_var(b) * tau / b.len() as f64;
    let diff = mean(a) - mean(b);
    if va + vb == 0.0 {
        return Ok(if diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(diff / (va + vb).sqrt())
}

/// Gelman–Rubin potential scale reduction factor across equally long chains.
pub fn gelman_rubin(chains: &[Vec<f64>]) -> Result<f64> {
    let n = chains.iter().map(Vec::len).min().unwrap_or(0);
    if n < MIN_DIAG_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_DIAG_SAMPLES,
            have: n,
        });
    }
    let m = chains.len();
    if m < 2 {
        return Ok(1.0);
    }
    let means: Vec<f64> = chains.iter().map(|c| mean(&c[..n])).collect();
    let w = chains.iter().map(|c| sample_var(&c[..n])).sum::<f64>() / m as f64;
    let b = n as f64 * sample_var(&means);
    if w == 0.0 {
        return Ok(if b == 0.0 { 1.0 } else { f64::INFINITY });
    }
    let nf = n as f64;
    let v = (nf - 1.0) / nf * w + b / nf;
    Ok((v / w).sqrt())
}

/// Writes the chain trace as CSV (`sample,chain,q_re,q_im,accepted`).
pub fn write_chain_csv(path: &Path, est: &CovarianceEstimate) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "sample,chain,q_re,q_im,accepted")?;
    for r in &est.trace {
        writeln!(f, "{},{},{:e},{:e},{}", r.sample, r.chain, r.q_re, r.q_im, r.accepted as u8)?;
    }
    Ok(())
}
