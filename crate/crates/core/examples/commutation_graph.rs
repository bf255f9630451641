//! Groups the strings of a two-qubit observable under both commutation
//! rules and compares the measurement circuits each grouping needs.

use qudit_observe::graph::build_graph;
use qudit_observe::pauli::{CommutationMode, Observable, PauliString, QuditRegister};
use num_complex::Complex64 as C64;

fn main() -> qudit_observe::Result<()> {
    let reg = QuditRegister::new(vec![2, 2])?;
    let terms = [
        (1.0, [(1, 0), (1, 0)]),
        (1.0, [(0, 1), (0, 1)]),
        (0.5, [(0, 1), (0, 0)]),
        (0.3, [(0, 0), (1, 0)]),
    ];
    let terms = terms
        .iter()
        .map(|&(c, exps)| Ok((C64::new(c, 0.0), PauliString::new(&reg, exps.to_vec(), 0)?)))
        .collect::<qudit_observe::Result<Vec<_>>>()?;
    let obs = Observable::new(&reg, terms)?;

    for mode in [CommutationMode::General, CommutationMode::Bitwise] {
        let mut graph = build_graph(&obs, mode)?;
        graph.clique_cover();
        graph.synthesize_circuits()?;
        println!("{mode}: {} edges, {} cliques", graph.edges().len(), graph.cliques().len());
        for clique in graph.cliques() {
            println!(
                "  {:?}  local {} entangling {} depth {}",
                clique.vertices,
                clique.n_loc(),
                clique.n_ent(),
                clique.depth()
            );
        }
    }
    Ok(())
}
