//! Prepares a Bell pair, disentangles it with a CSUM before measuring (so
//! the second digit is always 0 when nothing goes wrong) and runs a few
//! stabilizer probes.

use num_complex::Complex64 as C64;
use qudit_observe::clifford::{CliffordCircuit, Gate};
use qudit_observe::pauli::QuditRegister;
use qudit_observe::rng::stream;
use qudit_observe::simulator::{NoiseModel, ProbeCircuit, ShotSampler, StateVector};

fn main() -> qudit_observe::Result<()> {
    let reg = QuditRegister::uniform(2, 2)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)];
    let state = StateVector::from_amplitudes(&reg, amps)?;
    let mut rng = stream(5, &[0]);

    let mut circuit = CliffordCircuit::empty(&reg);
    circuit.push(Gate::csum(0, 1, 2))?;
    for noise in [NoiseModel::noiseless(), NoiseModel::new(0.0, 0.2, 0.0)?] {
        let sampler = ShotSampler::new(&state, &circuit, &noise)?;
        let mut clean = 0;
        for _ in 0..1000 {
            clean += (sampler.sample(&mut rng).digits[1] == 0) as u32;
        }
        println!("error prob {:.2}: {clean}/1000 shots read 0 on the second qubit", sampler.error_prob());
    }

    circuit.push(Gate::h(0, 2))?;
    let probe = ProbeCircuit::new(&circuit)?;
    let noise = NoiseModel::new(0.01, 0.05, 0.0)?;
    let flags = (0..2000).filter(|_| probe.probe(&noise, &mut rng)).count();
    println!(
        "probe: {} local, {} entangling gates, {flags}/2000 flagged (expected {:.0})",
        probe.n_loc(),
        probe.n_ent(),
        2000.0 * probe.error_prob(&noise) * 0.75
    );
    Ok(())
}
