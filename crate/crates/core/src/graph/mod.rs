//! Commutation graph over the terms of an observable, overlapping clique
//! covers, measurement tallies and the variance of the estimator.

mod estimate;
mod tally;

pub use estimate::{estimate_observable, scaled_covariance, variance, variance_decrease, EdgeEstimates, PairEstimate};
pub use tally::{PairTally, TallyStore};

use num_complex::Complex64 as C64;
use serde_json::json;

use crate::clifford::{conjugate_ps, diagonalize_clique, CliffordCircuit};
use crate::error::Result;
use crate::pauli::{CommutationMode, Observable, PauliString, QuditRegister};

/// A set of pairwise commuting vertices and, once synthesized, the circuit
/// that diagonalizes them.
#[derive(Clone, Debug, PartialEq)]
pub struct Clique {
    pub vertices: Vec<usize>,
    circuit: Option<CliffordCircuit>,
    diagonal: Vec<PauliString>,
}

impl Clique {
    pub fn new(vertices: Vec<usize>) -> Self {
        Self {
            vertices,
            circuit: None,
            diagonal: Vec::new(),
        }
    }

    pub fn circuit(&self) -> Option<&CliffordCircuit> {
        self.circuit.as_ref()
    }

    /// Conjugated (diagonal) images of the clique's strings, same order as `vertices`.
    pub fn diagonal_strings(&self) -> &[PauliString] {
        &self.diagonal
    }

    pub fn n_loc(&self) -> usize {
        self.circuit.as_ref().map_or(0, CliffordCircuit::n_loc)
    }

    pub fn n_ent(&self) -> usize {
        self.circuit.as_ref().map_or(0, CliffordCircuit::n_ent)
    }

    pub fn depth(&self) -> usize {
        self.circuit.as_ref().map_or(0, CliffordCircuit::depth)
    }
}

/// Vertices are the non-identity terms of the observable; identity terms
/// are a known constant and are kept aside.
#[derive(Clone, Debug)]
pub struct CommutationGraph {
    register: QuditRegister,
    mode: CommutationMode,
    coeffs: Vec<C64>,
    strings: Vec<PauliString>,
    constant: C64,
    hermitian: bool,
    adjacency: Vec<Vec<bool>>,
    cliques: Vec<Clique>,
    pub tallies: TallyStore,
}

pub fn build_graph(obs: &Observable, mode: CommutationMode) -> Result<CommutationGraph> {
    let mut coeffs = Vec::new();
    let mut strings = Vec::new();
    let mut constant = C64::new(0.0, 0.0);
    for t in obs.terms() {
        if t.string.is_identity() {
            // normalized identity has phase 0, so the term is just its coefficient
            constant += t.coeff;
        } else {
            coeffs.push(t.coeff);
            strings.push(t.string.clone());
        }
    }
    let p = strings.len();
    let mut adjacency = vec![vec![false; p]; p];
    for i in 0..p {
        adjacency[i][i] = true;
        for j in i + 1..p {
            let e = strings[i].commutes(&strings[j], mode)?;
            adjacency[i][j] = e;
            adjacency[j][i] = e;
        }
    }
    let d_p = obs.register().lcm() as usize;
    Ok(CommutationGraph {
        register: obs.register().clone(),
        mode,
        coeffs,
        strings,
        constant,
        hermitian: obs.is_hermitian(),
        adjacency,
        cliques: Vec::new(),
        tallies: TallyStore::new(p, d_p),
    })
}

/// Greedy overlapping clique cover over an explicit adjacency matrix.
///
/// Vertices are visited by descending weight (lowest index on ties). Each
/// uncovered vertex seeds a clique grown greedily in the same order; then
/// every vertex seeds one more clique, and distinct results are appended up
/// to `3p` cliques in total.
pub fn clique_cover_from_adjacency(adjacency: &[Vec<bool>], weights: &[f64]) -> Vec<Vec<usize>> {
    let p = adjacency.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let grow = |seed: usize| -> Vec<usize> {
        let mut clique = vec![seed];
        for &u in &order {
            if u != seed && clique.iter().all(|&v| adjacency[u][v]) {
                clique.push(u);
            }
        }
        clique.sort_unstable();
        clique
    };
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut covered = vec![false; p];
    for &v in &order {
        if covered[v] {
            continue;
        }
        let c = grow(v);
        for &u in &c {
            covered[u] = true;
        }
        cliques.push(c);
    }
    for &v in &order {
        if cliques.len() >= 3 * p {
            break;
        }
        let c = grow(v);
        if !cliques.contains(&c) {
            cliques.push(c);
        }
    }
    cliques
}

impl CommutationGraph {
    pub fn register(&self) -> &QuditRegister {
        &self.register
    }

    pub fn mode(&self) -> CommutationMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn d_p(&self) -> usize {
        self.register.lcm() as usize
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    /// Sum of identity-term coefficients.
    pub fn constant(&self) -> C64 {
        self.constant
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    /// Unordered adjacent pairs `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let p = self.len();
        (0..p)
            .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacency[i][j])
            .collect()
    }

    pub fn cliques(&self) -> &[Clique] {
        &self.cliques
    }

    /// Runs the clique-cover heuristic and stores the (unsynthesized) cliques.
    pub fn clique_cover(&mut self) -> &[Clique] {
        let weights: Vec<f64> = self.coeffs.iter().map(|c| c.norm()).collect();
        self.cliques = clique_cover_from_adjacency(&self.adjacency, &weights)
            .into_iter()
            .map(Clique::new)
            .collect();
        &self.cliques
    }

    /// Synthesizes and caches the diagonalizing circuit of every clique.
    pub fn synthesize_circuits(&mut self) -> Result<()> {
        for clique in &mut self.cliques {
            let strings: Vec<PauliString> = clique.vertices.iter().map(|&v| self.strings[v].clone()).collect();
            let circuit = diagonalize_clique(&strings, self.mode)?;
            clique.diagonal = strings
                .iter()
                .map(|s| conjugate_ps(&circuit, s))
                .collect::<Result<_>>()?;
            clique.circuit = Some(circuit);
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<_> = self
            .strings
            .iter()
            .zip(&self.coeffs)
            .enumerate()
            .map(|(i, (s, c))| {
                json!({
                    "index": i,
                    "re": c.re,
                    "im": c.im,
                    "paulis": s.exps().iter().map(|&(r, s)| [r, s]).collect::<Vec<_>>(),
                    "phase_exp": s.phase_exp(),
                })
            })
            .collect();
        let cliques: Vec<_> = self
            .cliques
            .iter()
            .map(|c| {
                json!({
                    "vertices": c.vertices,
                    "circuit": c.circuit.as_ref().map(CliffordCircuit::to_json),
                    "n_loc": c.n_loc(),
                    "n_ent": c.n_ent(),
                    "depth": c.depth(),
                })
            })
            .collect();
        json!({
            "dims": self.register.dims(),
            "mode": self.mode,
            "constant": {"re": self.constant.re, "im": self.constant.im},
            "vertices": vertices,
            "edges": self.edges(),
            "cliques": cliques,
        })
    }
}
