use crate::error::{Error, Result};

/// Mean distance of estimates from the exact value in units of their reported error.
pub fn estimate_distance(runs: &[(f64, f64)], exact: f64) -> Result<f64> {
    if runs.is_empty() {
        return Err(Error::Empty("runs"));
    }
    let mut sum = 0.0;
    for &(o, var) in runs {
        if var <= 0.0 {
            return Err(Error::ZeroDenominator("reported variance"));
        }
        sum += (o - exact).abs() / var.sqrt();
    }
    Ok(sum / runs.len() as f64)
}

/// `2 (v_bc − v_gc) / (v_bc + v_gc)`: positive when general commutation wins.
pub fn relative_advantage(v_bc: f64, v_gc: f64) -> Result<f64> {
    let den = v_bc + v_gc;
    if den == 0.0 {
        return Err(Error::ZeroDenominator("relative advantage"));
    }
    Ok(2.0 * (v_bc - v_gc) / den)
}
