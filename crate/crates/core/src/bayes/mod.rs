//! Bayesian estimators: closed-form Dirichlet moments for single strings and
//! a constrained Metropolis–Hastings sampler for pairwise covariances.

mod dirichlet;
mod mcmc;
mod state;

pub use dirichlet::{beta_posterior, posterior_mean_theta, ps_mean, root_mean, self_covariance};
pub use mcmc::{
    autocorrelation_time, batch_means_variance, covariance_mcmc, gelman_rubin, geweke_z, initial_gamma, log_posterior,
    tune_gamma, write_chain_csv, CovarianceEstimate, Diagnostics, McmcConfig, TraceRow,
};
pub use state::{
    haar_state, init_chain, ipf, joint_probs, product_marginal, propose, region_violation, state_to_probs, ChainStart,
    ThetaTriple,
};
