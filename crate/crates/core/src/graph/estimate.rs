use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::CommutationGraph;
use crate::bayes::{ps_mean, self_covariance};
use crate::error::{Error, Result};

/// MCMC estimate of `Q̃_ij` for one pair `i < j`, with the tallies it was computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct PairEstimate {
    pub value: C64,
    pub mc_std_error: f64,
    /// `(m_i, m_j, m_ij)` at computation time; a mismatch marks the value stale.
    pub computed_at: (u64, u64, u64),
}

/// Current point estimates `P̃_i`, `Q̃_ii` and pairwise `Q̃_ij`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeEstimates {
    pub p_tilde: Vec<C64>,
    pub q_diag: Vec<f64>,
    pub pairs: BTreeMap<(usize, usize), PairEstimate>,
}

impl EdgeEstimates {
    /// Closed-form single-string estimates from the graph's tallies; pair values start empty.
    pub fn from_tallies(graph: &CommutationGraph) -> Result<Self> {
        let mut e = Self::default();
        e.refresh_single(graph)?;
        Ok(e)
    }

    /// Allocation-only estimates: `Q̃_ii = 1`, `Q̃_ij = 0`.
    pub fn flat(p: usize) -> Self {
        Self {
            p_tilde: vec![C64::new(0.0, 0.0); p],
            q_diag: vec![1.0; p],
            pairs: BTreeMap::new(),
        }
    }

    pub fn refresh_single(&mut self, graph: &CommutationGraph) -> Result<()> {
        let t = &graph.tallies;
        self.p_tilde = (0..graph.len())
            .map(|i| ps_mean(&graph.strings()[i], t.counts(i), t.prior()))
            .collect::<Result<_>>()?;
        self.q_diag = (0..graph.len())
            .map(|i| self_covariance(t.counts(i), t.prior()))
            .collect::<Result<_>>()?;
        Ok(())
    }

    /// `Q̃_ij` with `Q̃_ji = conj(Q̃_ij)`; `None` when the pair has no estimate.
    pub fn q(&self, i: usize, j: usize) -> Option<C64> {
        if i == j {
            return Some(C64::new(self.q_diag[i], 0.0));
        }
        let v = self.pairs.get(&(i.min(j), i.max(j)))?.value;
        Some(if i < j { v } else { v.conj() })
    }

    pub fn is_stale(&self, graph: &CommutationGraph, i: usize, j: usize) -> bool {
        let t = &graph.tallies;
        let now = (t.m(i), t.m(j), t.m_pair(i, j));
        self.pairs.get(&(i, j)).is_none_or(|e| e.computed_at != now)
    }
}

/// `(m_ij + 2) / ((m_i + 2)(m_j + 2)) · Q̃_ij`.
pub fn scaled_covariance(m_i: u64, m_j: u64, m_ij: u64, q: C64) -> C64 {
    q * ((m_ij as f64 + 2.0) / ((m_i as f64 + 2.0) * (m_j as f64 + 2.0)))
}

/// Estimation variance with the counts of `bump` vertices raised by `b`.
fn variance_with(graph: &CommutationGraph, est: &EdgeEstimates, bump: &[usize], b: u64) -> f64 {
    let p = graph.len();
    let mut inside = vec![false; p];
    for &v in bump {
        inside[v] = true;
    }
    let t = &graph.tallies;
    let m: Vec<u64> = (0..p).map(|i| t.m(i) + if inside[i] { b } else { 0 }).collect();
    let c = graph.coeffs();
    let mut var = 0.0;
    for i in 0..p {
        var += c[i].norm_sqr() * est.q_diag[i] / (m[i] as f64 + 2.0);
    }
    for (i, j) in graph.edges() {
        let Some(q) = est.q(i, j) else { continue };
        let m_ij = t.m_pair(i, j) + if inside[i] && inside[j] { b } else { 0 };
        let s = scaled_covariance(m[i], m[j], m_ij, q);
        // (i, j) and (j, i) together contribute 2 Re(conj(c_i) c_j S_ij)
        var += 2.0 * (c[i].conj() * c[j] * s).re;
    }
    var
}

/// Estimation variance `Σ_ij conj(c_i) c_j (m_ij+2)/((m_i+2)(m_j+2)) Q̃_ij` over self-edges and edges.
pub fn variance(graph: &CommutationGraph, est: &EdgeEstimates) -> f64 {
    variance_with(graph, est, &[], 0)
}

/// `Õ` and `(ΔÕ)²` from the current estimates.
pub fn estimate_observable(graph: &CommutationGraph, est: &EdgeEstimates) -> Result<(C64, f64)> {
    if est.p_tilde.len() != graph.len() || est.q_diag.len() != graph.len() {
        return Err(Error::LengthMismatch {
            expected: graph.len(),
            found: est.p_tilde.len().min(est.q_diag.len()),
        });
    }
    for (i, j) in graph.edges() {
        if graph.tallies.m_pair(i, j) > 0 && est.q(i, j).is_none() {
            return Err(Error::MissingEstimate(i, j));
        }
    }
    let mut o = graph.constant();
    for (c, p) in graph.coeffs().iter().zip(&est.p_tilde) {
        o += c * p;
    }
    if graph.is_hermitian() {
        if o.im.abs() > 1e-9 {
            log::warn!("dropping imaginary part {:e} of a hermitian estimate", o.im);
        }
        o.im = 0.0;
    }
    Ok((o, variance(graph, est)))
}

/// Decrease of `(ΔÕ)²` if `b` more shots went to the clique, holding all `Q̃` fixed.
pub fn variance_decrease(graph: &CommutationGraph, est: &EdgeEstimates, clique: &[usize], b: u64) -> f64 {
    variance(graph, est) - variance_with(graph, est, clique, b)
}
