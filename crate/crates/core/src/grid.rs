use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{Error, Result};

/// `n` points spaced geometrically from `lo` to `hi`, endpoints exact.
pub fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi / lo).ln() / (n - 1) as f64;
            let mut g: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
            g[n - 1] = hi;
            g
        }
    }
}

/// Default radius grid: 200 geometric points over `[1e-3, 1e3]`.
pub fn default_radius_grid() -> Vec<f64> {
    geometric(1e-3, 1e3, 200)
}

/// Default lambda grid: 25 geometric points over `[1e-2, 1e2]`.
pub fn default_lambda_grid() -> Vec<f64> {
    geometric(1e-2, 1e2, 25)
}

pub fn validate(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if !grid.iter().all(|x| *x > 0.0 && x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadGrid);
    }
    Ok(())
}
