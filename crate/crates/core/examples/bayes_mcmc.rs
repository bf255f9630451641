//! Samples the posterior covariance of two qubit strings from their
//! eigenvalue tallies.

use qudit_observe::bayes::{covariance_mcmc, McmcConfig};

fn main() -> qudit_observe::Result<()> {
    // 200 joint shots: outcomes mostly agree, so the strings are correlated
    let s_i = [120, 80];
    let s_j = [110, 90];
    let s_ij = [170, 30];
    let cfg = McmcConfig { seed: 11, ..McmcConfig::default() };
    let est = covariance_mcmc(&s_i, &s_j, &s_ij, &[1.0, 1.0], &cfg, 0)?;
    println!("Q = {:.4} ± {:.4}", est.value, est.mc_std_error);
    println!(
        "{} samples, acceptance {:.2}, gamma {:.3}, converged {}",
        est.n_samples, est.acceptance, est.gamma, est.converged
    );
    println!("geweke {:?}, rhat {:.3}", est.diagnostics.geweke_z, est.diagnostics.rhat);
    Ok(())
}
