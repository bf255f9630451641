use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome counts of the product string `P_i† P_j` for one pair `i < j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTally {
    pub m: u64,
    pub counts: Vec<u64>,
}

/// All measurement tallies of a commutation graph.
///
/// Pair tallies are keyed by `(i, j)` with `i < j` and count the eigenindex
/// of `P_i† P_j`, i.e. `μ_j - μ_i mod d_P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TallyStore {
    d_p: usize,
    counts: Vec<Vec<u64>>,
    pairs: BTreeMap<(usize, usize), PairTally>,
    prior: Vec<f64>,
}

impl TallyStore {
    pub fn new(p: usize, d_p: usize) -> Self {
        Self {
            d_p,
            counts: vec![vec![0; d_p]; p],
            pairs: BTreeMap::new(),
            prior: vec![1.0; d_p],
        }
    }

    pub fn with_prior(mut self, prior: Vec<f64>) -> Self {
        assert_eq!(prior.len(), self.d_p, "prior length must equal d_P");
        self.prior = prior;
        self
    }

    pub fn d_p(&self) -> usize {
        self.d_p
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn counts(&self, i: usize) -> &[u64] {
        &self.counts[i]
    }

    pub fn m(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    /// Joint-shot count; `m_ii = m_i`.
    pub fn m_pair(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return self.m(i);
        }
        self.pairs.get(&(i.min(j), i.max(j))).map_or(0, |t| t.m)
    }

    /// Counts of `P_i† P_j` (reversed outcome labels when `i > j`).
    pub fn pair_counts(&self, i: usize, j: usize) -> Vec<u64> {
        let d = self.d_p;
        match self.pairs.get(&(i.min(j), i.max(j))) {
            None => vec![0; d],
            Some(t) if i < j => t.counts.clone(),
            Some(t) => (0..d).map(|mu| t.counts[(d - mu) % d]).collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(usize, usize), &PairTally)> {
        self.pairs.iter()
    }

    /// Records one shot of a clique: `mu[k]` is the eigenindex of `vertices[k]`.
    pub fn record_shot(&mut self, vertices: &[usize], mu: &[u32]) {
        debug_assert_eq!(vertices.len(), mu.len());
        let d = self.d_p;
        for (&i, &m) in vertices.iter().zip(mu) {
            self.counts[i][m as usize] += 1;
        }
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                let (i, j, mi, mj) = if vertices[a] < vertices[b] {
                    (vertices[a], vertices[b], mu[a], mu[b])
                } else {
                    (vertices[b], vertices[a], mu[b], mu[a])
                };
                let t = self.pairs.entry((i, j)).or_insert_with(|| PairTally {
                    m: 0,
                    counts: vec![0; d],
                });
                t.m += 1;
                t.counts[(mj as usize + d - mi as usize) % d] += 1;
            }
        }
    }
}
