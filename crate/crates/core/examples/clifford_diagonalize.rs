//! Builds a Clifford circuit that maps a commuting set of qutrit strings to
//! diagonal ones, then checks the images.

use qudit_observe::clifford::{conjugate_ps, diagonalize_clique};
use qudit_observe::pauli::{CommutationMode, PauliString, QuditRegister};

fn main() -> qudit_observe::Result<()> {
    let reg = QuditRegister::uniform(3, 2)?;
    // X⊗X and Z⊗Z² commute on qutrits
    let clique = vec![
        PauliString::new(&reg, vec![(1, 0), (1, 0)], 0)?,
        PauliString::new(&reg, vec![(0, 1), (0, 2)], 0)?,
    ];
    let circuit = diagonalize_clique(&clique, CommutationMode::General)?;
    for gate in circuit.gates() {
        println!("{:?} on {:?}", gate.kind, gate.qudits);
    }
    for p in &clique {
        let image = conjugate_ps(&circuit, p)?;
        println!("{:?} -> {:?} (diagonal: {})", p.exps(), image.exps(), image.is_diagonal());
    }
    Ok(())
}
