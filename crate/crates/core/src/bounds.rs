//! Safety limits on problem sizes.
//!
//! Each exponential algorithm has a default ceiling on `n`. Setting the
//! environment variable `PERMATRELLIS_MAX_N` replaces every ceiling with the
//! given value.

use crate::error::{Error, Result};

pub const ENV_MAX_N: &str = "PERMATRELLIS_MAX_N";

pub const NAIVE_MAX_N: usize = 10;
pub const TRELLIS_MAX_N: usize = 30;
pub const BITMASK_MAX_N: usize = 62;
pub const TSP_MAX_N: usize = 28;
pub const TSP_BRUTEFORCE_MAX_N: usize = 10;
pub const RYSER_MAX_N: usize = 32;

fn env_override() -> Option<usize> {
    std::env::var(ENV_MAX_N).ok()?.trim().parse().ok()
}

/// Fails with [`Error::TooLarge`] when `n` exceeds the limit for `what`.
pub fn check_max(what: &'static str, n: usize, default_max: usize) -> Result<()> {
    let max = env_override().unwrap_or(default_max);
    if n > max {
        Err(Error::TooLarge { what, n, max })
    } else {
        Ok(())
    }
}

pub fn check_min(what: &'static str, n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::TooSmall { what, n, min })
    } else {
        Ok(())
    }
}
