//! Exact tools for `k/n = 1/x + 1/y + 1/z` built on the quadratic
//! parametrization `F(n) = t²(kx−n)² − 2nxt`: a perfect-square `F` yields
//! `y, z = t(kx−n) ± √F`.

pub mod constructions;
mod decimal;
pub mod density;
mod factor;
pub mod fundamental;
pub mod harness;
pub mod isqrt;
pub mod search;
mod solution;

pub use constructions::{
    construct_divisor_b, construct_mod4, mordell_uncovered, progression_for_divisor,
    smallest_divisor_3mod4, ConstructionError, ProgressionSpec,
};
pub use density::{
    density_experiment, dirichlet_factor_check, euler_product_p, is_in_b, DensityError,
    DensityReport, FactorCheck, SpfTable,
};
pub use fundamental::{
    admissible_domain, default_n1, eval_f, recover_t, solve_via_f, verify_identity,
    AdmissibleDomain, FError, Parametrization,
};
pub use harness::{
    solve_one, verify_range, HarnessConfig, HarnessError, OracleFallback, RunOutcome,
    VerificationReport, Verifier,
};
pub use isqrt::integer_sqrt_checked;
pub use search::{
    cross_check_equivalence, oracle_enumerate, parametric_search, CrossCheckReport, SearchBudget,
    SearchError, Triple,
};
pub use solution::{ConstructionMethod, MethodTag, Solution};
