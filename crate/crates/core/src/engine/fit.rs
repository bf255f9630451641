use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{NoiseModel, ProbeRecord};

/// Grid posterior summary for one rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePosterior {
    pub map: f64,
    pub mean: f64,
    pub std: f64,
    /// The likelihood does not depend on this rate; its marginal is the flat prior.
    pub unidentifiable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseFit {
    pub xi_loc: RatePosterior,
    pub xi_ent: RatePosterior,
    pub xi_detect: RatePosterior,
    pub n_records: usize,
}

impl NoiseFit {
    pub fn map(&self) -> NoiseModel {
        NoiseModel {
            xi_loc: self.xi_loc.map,
            xi_ent: self.xi_ent.map,
            xi_detect: self.xi_detect.map,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub points: usize,
    pub refinements: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            points: 101,
            refinements: 2,
        }
    }
}

/// Records aggregated by `(n_loc, n_ent, outcomes)`: `(errors, clean)`.
type Groups = Vec<((usize, usize, u64), (u64, u64))>;

fn group(records: &[ProbeRecord]) -> Groups {
    let mut g: BTreeMap<(usize, usize, u64), (u64, u64)> = BTreeMap::new();
    for r in records {
        let e = g.entry((r.n_loc, r.n_ent, r.outcomes)).or_default();
        if r.error {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    g.into_iter().collect()
}

fn log_likelihood(groups: &Groups, l: f64, e: f64, d: f64) -> f64 {
    let (ll, le, ld) = ((1.0 - l).ln(), (1.0 - e).ln(), (1.0 - d).ln());
    let mut total = 0.0;
    for &((n_loc, n_ent, outcomes), (err, clean)) in groups {
        let keep = if outcomes > 1 { 1.0 - 1.0 / outcomes as f64 } else { 1.0 };
        let ok = (ld + n_ent as f64 * le + n_loc as f64 * ll).exp();
        let flag = (1.0 - ok) * keep;
        if err > 0 {
            total += err as f64 * flag.ln();
        }
        if clean > 0 {
            total += clean as f64 * (1.0 - flag).ln();
        }
    }
    total
}

struct Axis {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Axis {
    fn at(&self, k: usize) -> f64 {
        if self.n == 1 {
            return 0.5 * (self.lo + self.hi);
        }
        self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64
    }

    fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1).max(1) as f64
    }
}

struct GridSummary {
    map: [f64; 3],
    mean: [f64; 3],
    std: [f64; 3],
}

fn evaluate(groups: &Groups, axes: &[Axis; 3]) -> GridSummary {
    let n = axes[0].n;
    // log posterior on the grid, parallel over the first axis
    let slabs: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let l = axes[0].at(a);
            let mut v = Vec::with_capacity(axes[1].n * axes[2].n);
            for b in 0..axes[1].n {
                for c in 0..axes[2].n {
                    v.push(log_likelihood(groups, l, axes[1].at(b), axes[2].at(c)));
                }
            }
            v
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for (a, slab) in slabs.iter().enumerate() {
        for (k, &lp) in slab.iter().enumerate() {
            if lp > best.0 {
                best = (lp, [axes[0].at(a), axes[1].at(k / axes[2].n), axes[2].at(k % axes[2].n)]);
            }
        }
    }
    let mut w = 0.0;
    let mut m1 = [0.0; 3];
    let mut m2 = [0.0; 3];
    for (a, slab) in slabs.iter().enumerate() {
        for (k, &lp) in slab.iter().enumerate() {
            let p = (lp - best.0).exp();
            if p == 0.0 {
                continue;
            }
            let x = [axes[0].at(a), axes[1].at(k / axes[2].n), axes[2].at(k % axes[2].n)];
            w += p;
            for i in 0..3 {
                m1[i] += p * x[i];
                m2[i] += p * x[i] * x[i];
            }
        }
    }
    let mean = m1.map(|v| v / w);
    let mut std = [0.0; 3];
    for i in 0..3 {
        std[i] = (m2[i] / w - mean[i] * mean[i]).max(0.0).sqrt();
    }
    GridSummary {
        map: best.1,
        mean,
        std,
    }
}

/// Grid posterior over `(ξ_loc, ξ_ent, ξ_detect)` from probe records, flat prior on `[0,1]³`.
///
/// Each record flags an error with probability `ξ(C)(1 − 1/D)`. After the
/// full-range grid, each refinement re-grids a box of six marginal standard
/// deviations (at least three current steps) around the posterior mean.
pub fn fit_noise_model(records: &[ProbeRecord], cfg: &FitConfig) -> Result<NoiseFit> {
    if records.is_empty() {
        return Err(Error::Empty("probe records"));
    }
    let groups = group(records);
    let no_loc = records.iter().all(|r| r.n_loc == 0);
    let no_ent = records.iter().all(|r| r.n_ent == 0);
    let n = cfg.points.max(2);
    // keep 1 out of the grid: ξ = 1 makes every clean record impossible
    let top = 1.0 - 1e-12;
    let mut axes = [0, 1, 2].map(|_| Axis { lo: 0.0, hi: top, n });
    let mut s = evaluate(&groups, &axes);
    for _ in 0..cfg.refinements {
        axes = [0, 1, 2].map(|i| {
            let half = (6.0 * s.std[i]).max(3.0 * axes[i].step());
            let centre = s.mean[i];
            Axis {
                lo: (centre - half).max(0.0),
                hi: (centre + half).min(top),
                n,
            }
        });
        s = evaluate(&groups, &axes);
    }
    let flat = RatePosterior {
        map: 0.5,
        mean: 0.5,
        std: (1.0f64 / 12.0).sqrt(),
        unidentifiable: true,
    };
    let rate = |i: usize, unid: bool| {
        if unid {
            flat
        } else {
            RatePosterior {
                map: s.map[i],
                mean: s.mean[i],
                std: s.std[i],
                unidentifiable: false,
            }
        }
    };
    Ok(NoiseFit {
        xi_loc: rate(0, no_loc),
        xi_ent: rate(1, no_ent),
        xi_detect: rate(2, false),
        n_records: records.len(),
    })
}
