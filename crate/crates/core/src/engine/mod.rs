//! The adaptive measurement loop, error-awareness accounting, noise-model
//! fitting and run comparison metrics.

mod awareness;
mod fit;
mod metrics;
mod run;
mod settings;

pub use awareness::{
    centered_root_mean, circuit_xi, denoise_theta, estimate_xi, systematic_deviation, worst_case_bound, XiEstimate,
};
pub use fit::{fit_noise_model, FitConfig, NoiseFit, RatePosterior};
pub use metrics::{estimate_distance, relative_advantage};
pub use run::{
    record_batch, refresh_pairs, run_estimation, select_clique, write_history_csv, CliqueLedger, EstimationReport,
    HistoryRow, PairReport, TermReport,
};
pub use settings::RunSettings;
