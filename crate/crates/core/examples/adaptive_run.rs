//! Estimates XX + ZZ + 0.5 ZI on a noisy Bell-like state, once with uniform
//! shot allocation and once adaptively.

use num_complex::Complex64 as C64;
use qudit_observe::engine::{run_estimation, RunSettings};
use qudit_observe::pauli::{Observable, PauliString, QuditRegister};
use qudit_observe::simulator::{NoiseModel, StateVector};

fn main() -> qudit_observe::Result<()> {
    let reg = QuditRegister::uniform(2, 2)?;
    let string = |exps: [(u32, u32); 2]| PauliString::new(&reg, exps.to_vec(), 0);
    let obs = Observable::new(
        &reg,
        vec![
            (C64::new(1.0, 0.0), string([(1, 0), (1, 0)])?),
            (C64::new(1.0, 0.0), string([(0, 1), (0, 1)])?),
            (C64::new(0.5, 0.0), string([(0, 1), (0, 0)])?),
        ],
    )?;
    let amps = [0.8, 0.1, 0.1, 0.58].map(|a| C64::new(a, 0.0)).to_vec();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let state = StateVector::from_amplitudes(&reg, amps.iter().map(|a| a / norm).collect())?;
    let exact = state.expectation(&obs)?;
    let noise = NoiseModel::new(0.004, 0.08, 0.0)?;
    println!("exact {:.4}", exact.re);

    for adaptive in [false, true] {
        let settings = RunSettings { adaptive, budget: 2000, noise_aware: true, seed: 3, ..RunSettings::default() };
        let report = run_estimation(&obs, &state, &settings, Some(&noise))?;
        println!(
            "adaptive {adaptive}: {:.4} ± {:.4} (noise-aware ± {:.4}, deviation {:+.4}, {} probes)",
            report.estimate_re,
            report.variance.sqrt(),
            report.noise_aware_variance.sqrt(),
            report.deviation_re,
            report.probe_shots
        );
    }
    Ok(())
}
