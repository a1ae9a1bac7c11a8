//! Counting the exceptional set ℬ = { n ≡ 1 (mod 4) : every prime factor of
//! n is ≡ 1 (mod 4) } and the Euler products behind its vanishing density.

mod euler;
mod report;
mod sieve;

pub use euler::{
    dirichlet_factor_check, euler_product_p, reciprocal_sum_3mod4, reciprocal_sum_exceedance,
    FactorCheck,
};
pub use report::{density_experiment, render_ratio, DensityReport};
pub use sieve::{count_b_segmented, count_b_with_table, is_in_b, SpfTable, SEGMENT_THRESHOLD};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("n = {n} outside sieve range [1, {limit}]")]
    OutOfTableRange { n: u64, limit: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
