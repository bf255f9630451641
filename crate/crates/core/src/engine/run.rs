use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::awareness::{circuit_xi, denoise_theta, estimate_xi, systematic_deviation, worst_case_bound, XiEstimate};
use super::settings::RunSettings;
use crate::bayes::{covariance_mcmc, posterior_mean_theta, McmcConfig};
use crate::clifford::CliffordCircuit;
use crate::error::{Error, Result};
use crate::graph::{
    build_graph, estimate_observable, variance_decrease, CommutationGraph, EdgeEstimates, PairEstimate, TallyStore,
};
use crate::pauli::Observable;
use crate::rng::{derive_seed, stream};
use crate::simulator::{NoiseModel, ProbeCircuit, ProbeRecord, ProbeTally, ShotSampler, StateVector};

const TAG_SHOTS: u64 = 1;
const TAG_PROBES: u64 = 2;
const TAG_MCMC: u64 = 3;

/// One line of the per-batch history.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub m_total: u64,
    pub o_est_re: f64,
    pub o_est_im: f64,
    pub var_stat: f64,
    pub dev_sys_sq: f64,
    pub var_noise_aware: f64,
    pub selected_clique: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliqueLedger {
    pub vertices: Vec<usize>,
    pub shots: u64,
    pub probes: u64,
    pub probe_errors: u64,
    pub n_loc: usize,
    pub n_ent: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub string: String,
    pub coeff_re: f64,
    pub coeff_im: f64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub self_covariance: f64,
    pub shots: u64,
    pub xi: Option<XiEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub q_re: f64,
    pub q_im: f64,
    pub mc_std_error: f64,
    pub joint_shots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub estimate_re: f64,
    pub estimate_im: f64,
    /// Statistical variance `(ΔÕ)²`.
    pub variance: f64,
    /// Estimated shift `Õ_e − Õ` from randomized outcomes (zero unless noise-aware).
    pub deviation_re: f64,
    pub deviation_im: f64,
    pub deviation_sq: f64,
    /// Propagated uncertainty of the deviation from `ξ̃` and the term means.
    pub deviation_std: f64,
    /// `(ΔÕ)² + |Õ_e − Õ|²`.
    pub noise_aware_variance: f64,
    pub worst_case_bound: f64,
    pub measurement_shots: u64,
    pub probe_shots: u64,
    /// MCMC pair refreshes that hit `max_samples` without passing diagnostics.
    pub unconverged_refreshes: usize,
    pub terms: Vec<TermReport>,
    pub pairs: Vec<PairReport>,
    pub cliques: Vec<CliqueLedger>,
    pub history: Vec<HistoryRow>,
    #[serde(skip)]
    pub probe_records: Vec<ProbeRecord>,
    /// Final tallies, for re-running pair samplers (chain dumps).
    #[serde(skip)]
    pub tallies: Option<TallyStore>,
}

impl EstimationReport {
    pub fn estimate(&self) -> C64 {
        C64::new(self.estimate_re, self.estimate_im)
    }
}

/// Clique with the largest variance decrease for `b` more shots; ties go to the lowest index.
pub fn select_clique(graph: &CommutationGraph, est: &EdgeEstimates, b: u64) -> Result<usize> {
    if graph.cliques().is_empty() {
        return Err(Error::Empty("cliques"));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (k, c) in graph.cliques().iter().enumerate() {
        let dec = variance_decrease(graph, est, &c.vertices, b);
        if dec > best.1 {
            best = (k, dec);
        }
    }
    Ok(best.0)
}

/// Adds a batch of digit strings measured after clique `k`'s circuit to the tallies.
pub fn record_batch(graph: &mut CommutationGraph, k: usize, outcomes: &[Vec<u32>]) -> Result<()> {
    let clique = graph.cliques().get(k).ok_or(Error::Empty("clique"))?.clone();
    let mut mu = vec![0; clique.vertices.len()];
    for digits in outcomes {
        for (slot, p) in mu.iter_mut().zip(clique.diagonal_strings()) {
            *slot = p.eigenindex(digits)?;
        }
        graph.tallies.record_shot(&clique.vertices, &mu);
    }
    Ok(())
}

/// Runs MCMC for every edge whose tallies changed since its last estimate.
///
/// Returns how many refreshed pairs failed to converge.
pub fn refresh_pairs(graph: &CommutationGraph, est: &mut EdgeEstimates, cfg: &McmcConfig, round: u64) -> Result<usize> {
    let p = graph.len() as u64;
    let stale: Vec<(usize, usize)> = graph.edges().into_iter().filter(|&(i, j)| est.is_stale(graph, i, j)).collect();
    let t = &graph.tallies;
    let fresh: Vec<Result<(_, PairEstimate, bool)>> = stale
        .par_iter()
        .map(|&(i, j)| {
            let id = round * p * p + (i as u64) * p + j as u64;
            let r = covariance_mcmc(t.counts(i), t.counts(j), &t.pair_counts(i, j), t.prior(), cfg, id)?;
            let e = PairEstimate {
                value: r.value,
                mc_std_error: r.mc_std_error,
                computed_at: (t.m(i), t.m(j), t.m_pair(i, j)),
            };
            Ok(((i, j), e, r.converged))
        })
        .collect();
    let mut unconverged = 0;
    for r in fresh {
        let (key, e, ok) = r?;
        unconverged += !ok as usize;
        est.pairs.insert(key, e);
    }
    Ok(unconverged)
}

struct Awareness {
    deviation: C64,
    deviation_std: f64,
    bound: f64,
    xi: Vec<XiEstimate>,
}

fn awareness(
    graph: &CommutationGraph,
    est: &EdgeEstimates,
    probe_tallies: &[ProbeTally],
    usage: &[Vec<(usize, u64)>],
    outcomes: usize,
) -> Result<Awareness> {
    let circuit_xis: Vec<XiEstimate> = probe_tallies.iter().map(|t| circuit_xi(t, outcomes)).collect();
    let xi = estimate_xi(&circuit_xis, usage);
    let t = &graph.tallies;
    let mut thetas = Vec::with_capacity(graph.len());
    let mut std2 = 0.0;
    for (i, x) in xi.iter().enumerate() {
        let theta = denoise_theta(&posterior_mean_theta(t.counts(i), t.prior())?, x.mean);
        let clean_norm = (crate::bayes::root_mean(&theta)).norm();
        let c2 = graph.coeffs()[i].norm_sqr();
        let keep = (1.0 - x.mean).max(1e-12);
        let mean_var = est.q_diag[i] / (t.m(i) as f64 + 2.0) / (keep * keep);
        std2 += c2 * (clean_norm * clean_norm * x.variance + x.mean * x.mean * mean_var);
        thetas.push(theta);
    }
    let xs: Vec<f64> = xi.iter().map(|x| x.mean).collect();
    let offsets: Vec<u32> = graph.strings().iter().map(|s| s.eigen_offset()).collect();
    Ok(Awareness {
        deviation: systematic_deviation(&xs, &thetas, &offsets, graph.coeffs()),
        deviation_std: std2.sqrt(),
        bound: worst_case_bound(&xs, &thetas, graph.coeffs()),
        xi,
    })
}

/// The full adaptive loop: plan, then measure batch by batch until `M` is spent.
///
/// Without a noise model shots are noiseless. Probes run only when
/// `settings.noise_aware` is set; they take a `probe_split` share of every
/// batch (rounded cumulatively) and target the batch's clique circuit.
pub fn run_estimation(
    obs: &Observable,
    state: &StateVector,
    settings: &RunSettings,
    noise: Option<&NoiseModel>,
) -> Result<EstimationReport> {
    settings.validate()?;
    obs.register().check_same(state.register())?;
    let noise = noise.copied().unwrap_or_default();
    noise.validate()?;

    let mut graph = build_graph(obs, settings.mode)?;
    graph.clique_cover();
    graph.synthesize_circuits()?;
    let p = graph.len();
    let n_cliques = graph.cliques().len();
    let circuits: Vec<CliffordCircuit> = graph
        .cliques()
        .iter()
        .map(|c| c.circuit().cloned().ok_or(Error::Empty("clique circuit")))
        .collect::<Result<_>>()?;
    let samplers: Vec<ShotSampler> = circuits.iter().map(|c| ShotSampler::new(state, c, &noise)).collect::<Result<_>>()?;
    let probes: Vec<ProbeCircuit> = if settings.noise_aware {
        circuits.iter().map(ProbeCircuit::new).collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let outcomes = state.register().total_dim();

    let mcmc = McmcConfig {
        seed: derive_seed(settings.seed, &[TAG_MCMC]),
        ..settings.mcmc.clone()
    };
    let flat = EdgeEstimates::flat(p);
    let mut est = EdgeEstimates::from_tallies(&graph)?;
    let mut usage: Vec<Vec<(usize, u64)>> = vec![Vec::new(); p];
    for (k, c) in graph.cliques().iter().enumerate() {
        for &v in &c.vertices {
            usage[v].push((k, 0));
        }
    }
    let mut ledger: Vec<CliqueLedger> = graph
        .cliques()
        .iter()
        .map(|c| CliqueLedger {
            vertices: c.vertices.clone(),
            shots: 0,
            probes: 0,
            probe_errors: 0,
            n_loc: c.n_loc(),
            n_ent: c.n_ent(),
            depth: c.depth(),
        })
        .collect();
    let mut probe_tallies = vec![ProbeTally::default(); n_cliques];
    let mut probe_records = Vec::new();
    let mut history = Vec::new();
    let mut unconverged = 0;
    let mut rounds = 0u64;
    let (mut used, mut probes_done, mut meas_done) = (0u64, 0u64, 0u64);
    let b = settings.batch();
    let split = if settings.noise_aware { settings.probe_split } else { 0.0 };
    let mut last = None;

    if p == 0 {
        log::warn!("observable has no non-identity terms; nothing to measure");
    }
    let mut batch = 0u64;
    while p > 0 && used < settings.budget {
        let size = b.min(settings.budget - used);
        let due = ((used + size) as f64 * split).floor() as u64;
        let n_probe = due - probes_done;
        let n_meas = size - n_probe;
        let alloc = if settings.adaptive { &est } else { &flat };
        let k = select_clique(&graph, alloc, n_meas.max(1))?;

        let mut rng = stream(settings.seed, &[TAG_SHOTS, batch]);
        let shots: Vec<Vec<u32>> = (0..n_meas).map(|_| samplers[k].sample(&mut rng).digits).collect();
        record_batch(&mut graph, k, &shots)?;
        ledger[k].shots += n_meas;
        for &v in &graph.cliques()[k].vertices {
            if let Some(u) = usage[v].iter_mut().find(|u| u.0 == k) {
                u.1 += n_meas;
            }
        }
        if n_probe > 0 {
            let mut rng = stream(settings.seed, &[TAG_PROBES, batch]);
            for _ in 0..n_probe {
                let flag = probes[k].probe(&noise, &mut rng);
                probe_tallies[k].record(flag);
                probe_records.push(ProbeRecord {
                    n_loc: probes[k].n_loc(),
                    n_ent: probes[k].n_ent(),
                    outcomes: outcomes as u64,
                    error: flag,
                });
            }
            ledger[k].probes += n_probe;
            ledger[k].probe_errors = probe_tallies[k].errors;
        }
        used += size;
        probes_done += n_probe;
        meas_done += n_meas;
        batch += 1;

        est.refresh_single(&graph)?;
        let missing = est.pairs.len() < graph.edges().len();
        if missing || batch.is_multiple_of(settings.refresh_every as u64) || used == settings.budget {
            unconverged += refresh_pairs(&graph, &mut est, &mcmc, rounds)?;
            rounds += 1;
        }
        let (o, var) = estimate_observable(&graph, &est)?;
        let aw = if settings.noise_aware {
            Some(awareness(&graph, &est, &probe_tallies, &usage, outcomes)?)
        } else {
            None
        };
        let dev_sq = aw.as_ref().map_or(0.0, |a| a.deviation.norm_sqr());
        history.push(HistoryRow {
            m_total: used,
            o_est_re: o.re,
            o_est_im: o.im,
            var_stat: var,
            dev_sys_sq: dev_sq,
            var_noise_aware: var + dev_sq,
            selected_clique: k,
        });
        last = Some((o, var, aw));
    }

    let (o, var, aw) = last.unwrap_or((graph.constant(), 0.0, None));
    let terms = (0..p)
        .map(|i| TermReport {
            string: graph.strings()[i].to_string(),
            coeff_re: graph.coeffs()[i].re,
            coeff_im: graph.coeffs()[i].im,
            mean_re: est.p_tilde[i].re,
            mean_im: est.p_tilde[i].im,
            self_covariance: est.q_diag[i],
            shots: graph.tallies.m(i),
            xi: aw.as_ref().map(|a| a.xi[i]),
        })
        .collect();
    let pairs = est
        .pairs
        .iter()
        .map(|(&(i, j), e)| PairReport {
            i,
            j,
            q_re: e.value.re,
            q_im: e.value.im,
            mc_std_error: e.mc_std_error,
            joint_shots: graph.tallies.m_pair(i, j),
        })
        .collect();
    let deviation = aw.as_ref().map_or(C64::new(0.0, 0.0), |a| a.deviation);
    let dev_sq = deviation.norm_sqr();
    Ok(EstimationReport {
        estimate_re: o.re,
        estimate_im: o.im,
        variance: var,
        deviation_re: deviation.re,
        deviation_im: deviation.im,
        deviation_sq: dev_sq,
        deviation_std: aw.as_ref().map_or(0.0, |a| a.deviation_std),
        noise_aware_variance: var + dev_sq,
        worst_case_bound: aw.as_ref().map_or(0.0, |a| a.bound),
        measurement_shots: meas_done,
        probe_shots: probes_done,
        unconverged_refreshes: unconverged,
        terms,
        pairs,
        cliques: ledger,
        history,
        probe_records,
        tallies: Some(graph.tallies.clone()),
    })
}

/// Writes the history as CSV with full double precision.
pub fn write_history_csv<W: std::io::Write>(out: W, history: &[HistoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in history {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
