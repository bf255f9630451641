//! Simulates probe outcomes for circuits of several shapes and recovers the
//! per-gate error rates.

use qudit_observe::engine::{fit_noise_model, FitConfig};
use qudit_observe::rng::stream;
use qudit_observe::simulator::{NoiseModel, ProbeRecord};
use rand::Rng;

fn main() -> qudit_observe::Result<()> {
    let truth = NoiseModel::new(0.01, 0.06, 0.0)?;
    let seed: u64 = std::env::args().nth(1).map_or(2, |s| s.parse().unwrap());
    let mut rng = stream(seed, &[]);
    let mut records = Vec::new();
    for (n_loc, n_ent) in [(4, 0), (8, 1), (4, 2), (12, 3)] {
        let xi = truth.error_prob(n_loc, n_ent);
        for _ in 0..3000 {
            // a randomized outcome on a 4-dimensional register still matches a quarter of the time
            let error = rng.random::<f64>() < xi * 0.75;
            records.push(ProbeRecord { n_loc, n_ent, outcomes: 4, error });
        }
    }
    let fit = fit_noise_model(&records, &FitConfig::default())?;
    for (name, t, r) in [("local", truth.xi_loc, &fit.xi_loc), ("entangling", truth.xi_ent, &fit.xi_ent)] {
        println!("{name:>10}: true {t:.4}  fit {:.4} ± {:.4}", r.mean, r.std);
    }
    Ok(())
}
