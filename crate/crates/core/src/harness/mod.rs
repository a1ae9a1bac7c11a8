//! Range verification: resolve every `n` in `[lo, hi)` through the method
//! cascade and aggregate the coverage.

mod checkpoint;
mod report;

pub use checkpoint::{checkpoint_resume, checkpoint_save, CheckpointState};
pub use report::{ChunkResult, ExceptionRecord, FailureRecord, VerificationReport};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

use crate::constructions::{construct_divisor_b, construct_mod4, smallest_divisor_3mod4};
use crate::search::{oracle_first, parametric_search, SearchBudget, SearchError};
use crate::solution::{ConstructionMethod, MethodTag, Solution};

/// Default number of integers per work chunk.
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

/// Largest `n` for which `OracleFallback::Auto` runs the oracle.
pub const ORACLE_AUTO_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no solution for n = {n} within budget ({budget}; {evaluations} used, oracle {})",
        if *oracle_ran { "exhausted" } else { "disabled" })]
    NoSolutionWithinBudget {
        n: u64,
        budget: SearchBudget,
        evaluations: u64,
        oracle_ran: bool,
    },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OracleFallback {
    /// On for `n ≤ ORACLE_AUTO_LIMIT`, off above.
    #[default]
    Auto,
    On,
    Off,
}

impl OracleFallback {
    fn enabled_for(self, n: u64) -> bool {
        match self {
            OracleFallback::Auto => n <= ORACLE_AUTO_LIMIT,
            OracleFallback::On => true,
            OracleFallback::Off => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessConfig {
    /// Overrides `SearchBudget::x_max`.
    pub x_max: Option<u64>,
    /// Overrides `SearchBudget::t_max_per_x`.
    pub t_max_per_x: Option<u64>,
    pub total_evals: Option<u64>,
    pub oracle_fallback: OracleFallback,
    /// Try `DivisorB` before searching when `n ≡ 1 (mod 4)`.
    pub divisor_method: bool,
    pub chunk_size: u64,
    pub threads: usize,
    pub log_solutions: bool,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            x_max: None,
            t_max_per_x: None,
            total_evals: None,
            oracle_fallback: OracleFallback::Auto,
            divisor_method: true,
            chunk_size: DEFAULT_CHUNK_SIZE,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            log_solutions: false,
        }
    }
}

impl HarnessConfig {
    pub fn budget_for(&self, k: u64, n: u64) -> SearchBudget {
        let mut b = SearchBudget::default_for(k, n);
        if let Some(x) = self.x_max {
            b.x_max = x;
        }
        if let Some(t) = self.t_max_per_x {
            b.t_max_per_x = t;
        }
        if let Some(e) = self.total_evals {
            b.total_evals = e;
        }
        b
    }
}

/// Everything that determines report content. Thread count is excluded.
#[derive(Serialize)]
struct RunKey<'a> {
    version: u32,
    k: u64,
    lo: u64,
    hi: u64,
    chunk_size: u64,
    x_max: &'a Option<u64>,
    t_max_per_x: &'a Option<u64>,
    total_evals: &'a Option<u64>,
    oracle_fallback: OracleFallback,
    divisor_method: bool,
    log_solutions: bool,
}

/// Resolves one `n`: residue-class construction, then (for `n ≡ 1 mod 4`)
/// the divisor construction, then the parametric search, then the oracle.
/// The constructions exist only for `k = 4`; other `k` start at the search.
pub fn solve_one(k: u64, n: u64, config: &HarnessConfig) -> Result<Solution, HarnessError> {
    if k < 4 {
        return Err(HarnessError::InvalidConfig("k must be ≥ 4".into()));
    }
    if n < 2 {
        return Err(HarnessError::InvalidRange("n must be ≥ 2".into()));
    }
    if k == 4 {
        if let Ok(sol) = construct_mod4(n) {
            return Ok(sol);
        }
        if config.divisor_method && n % 4 == 1 {
            if let Some(b) = smallest_divisor_3mod4(n) {
                if let Ok(sol) = construct_divisor_b(n, b) {
                    return Ok(sol);
                }
            }
        }
    }
    let budget = config.budget_for(k, n);
    let evaluations = match parametric_search(k, n, &budget) {
        Ok(sol) => return Ok(sol),
        Err(SearchError::Exhausted { evaluations, .. }) => evaluations,
        Err(SearchError::InvalidParameter(m)) => return Err(HarnessError::InvalidConfig(m.into())),
        // A rejected divisor candidate is a defect in the search; fall
        // through to the oracle rather than losing the n.
        Err(SearchError::EquivalenceViolation(_)) => 0,
    };
    let oracle_ran = config.oracle_fallback.enabled_for(n);
    if oracle_ran {
        if let Some((x, y, z)) = oracle_first(k, n) {
            return Ok(Solution {
                k,
                n,
                x,
                y,
                z,
                method: ConstructionMethod::Oracle,
                t: None,
                m: None,
            });
        }
    }
    Err(HarnessError::NoSolutionWithinBudget {
        n,
        budget,
        evaluations,
        oracle_ran,
    })
}

/// Whether the run finished or stopped early at a chunk limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Complete(VerificationReport),
    Interrupted {
        completed_chunks: u64,
        total_chunks: u64,
    },
}

/// Range verification engine with optional checkpointing.
#[derive(Debug, Clone)]
pub struct Verifier {
    k: u64,
    lo: u64,
    hi: u64,
    config: HarnessConfig,
    checkpoint: Option<PathBuf>,
    chunk_limit: Option<u64>,
}

impl Verifier {
    pub fn new(k: u64, lo: u64, hi: u64, config: HarnessConfig) -> Self {
        Verifier {
            k,
            lo,
            hi,
            config,
            checkpoint: None,
            chunk_limit: None,
        }
    }

    /// Saves progress to `path` after every chunk and resumes from it.
    pub fn checkpoint(mut self, path: impl AsRef<Path>) -> Self {
        self.checkpoint = Some(path.as_ref().to_path_buf());
        self
    }

    /// Stops after processing this many chunks in the current invocation.
    pub fn chunk_limit(mut self, limit: u64) -> Self {
        self.chunk_limit = Some(limit);
        self
    }

    pub fn total_chunks(&self) -> u64 {
        (self.hi - self.lo).div_ceil(self.config.chunk_size.max(1))
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.lo < 2 || self.lo >= self.hi {
            return Err(HarnessError::InvalidRange(format!(
                "need 2 ≤ lo < hi, got [{}, {})",
                self.lo, self.hi
            )));
        }
        if self.k < 4 {
            return Err(HarnessError::InvalidConfig("k must be ≥ 4".into()));
        }
        if self.config.chunk_size == 0 {
            return Err(HarnessError::InvalidConfig("chunk size must be ≥ 1".into()));
        }
        if self.config.threads == 0 {
            return Err(HarnessError::InvalidConfig("threads must be ≥ 1".into()));
        }
        Ok(())
    }

    fn config_hash(&self) -> String {
        let c = &self.config;
        checkpoint::hash_config(&RunKey {
            version: report::REPORT_FORMAT_VERSION,
            k: self.k,
            lo: self.lo,
            hi: self.hi,
            chunk_size: c.chunk_size,
            x_max: &c.x_max,
            t_max_per_x: &c.t_max_per_x,
            total_evals: &c.total_evals,
            oracle_fallback: c.oracle_fallback,
            divisor_method: c.divisor_method,
            log_solutions: c.log_solutions,
        })
    }

    fn run_chunk(&self, index: u64, pool: &rayon::ThreadPool) -> ChunkResult {
        let start = self.lo + index * self.config.chunk_size;
        let end = (start + self.config.chunk_size).min(self.hi);
        let outcomes: Vec<(u64, Result<Solution, HarnessError>)> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|n| (n, solve_one(self.k, n, &self.config)))
                .collect()
        });
        let mut chunk = ChunkResult {
            index,
            ..Default::default()
        };
        for (n, outcome) in outcomes {
            match outcome {
                Ok(sol) => {
                    let tag = sol.method.tag();
                    *chunk.counts.entry(tag).or_default() += 1;
                    if matches!(tag, MethodTag::ParametricSearch | MethodTag::Oracle) {
                        chunk.exceptions.push(ExceptionRecord {
                            n,
                            method: sol.method,
                        });
                    }
                    if self.config.log_solutions {
                        chunk.solutions.push(sol);
                    }
                }
                Err(e) => chunk.failures.push(FailureRecord {
                    n,
                    reason: e.to_string(),
                }),
            }
        }
        chunk
    }

    pub fn run(&self) -> Result<RunOutcome, HarnessError> {
        self.validate()?;
        let started = Instant::now();
        let total = self.total_chunks();
        let hash = self.config_hash();
        let mut state = match &self.checkpoint {
            Some(path) => checkpoint_resume(path, &hash, total)?,
            None => CheckpointState::fresh(hash, total),
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.threads)
            .build()
            .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        let pending: Vec<u64> = (0..total)
            .filter(|i| !state.completed.contains_key(i))
            .collect();
        let budget = self.chunk_limit.unwrap_or(u64::MAX);
        for &index in pending.iter().take(budget.min(usize::MAX as u64) as usize) {
            let chunk = self.run_chunk(index, &pool);
            state.completed.insert(index, chunk);
            if let Some(path) = &self.checkpoint {
                checkpoint_save(path, &state)?;
            }
        }
        if !state.is_complete() {
            return Ok(RunOutcome::Interrupted {
                completed_chunks: state.completed.len() as u64,
                total_chunks: total,
            });
        }
        let completed: BTreeMap<u64, ChunkResult> = state.completed;
        let mut report = VerificationReport::assemble(
            self.k,
            self.lo,
            self.hi,
            self.config.chunk_size,
            completed.into_values(),
            self.config.log_solutions,
        );
        report.elapsed = started.elapsed();
        Ok(RunOutcome::Complete(report))
    }
}

/// Verifies every `n` in `[lo, hi)`. Failures are collected in the report.
pub fn verify_range(
    k: u64,
    lo: u64,
    hi: u64,
    config: &HarnessConfig,
) -> Result<VerificationReport, HarnessError> {
    match Verifier::new(k, lo, hi, config.clone()).run()? {
        RunOutcome::Complete(r) => Ok(r),
        RunOutcome::Interrupted { .. } => unreachable!("no chunk limit set"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{is_in_b, SpfTable};
    use crate::fundamental::verify_identity;

    fn config(threads: usize) -> HarnessConfig {
        HarnessConfig {
            threads,
            ..Default::default()
        }
    }

    #[test]
    fn cascade_examples() {
        let c = config(1);
        let s = solve_one(4, 12, &c).unwrap();
        assert_eq!(
            (s.method, s.x, s.y, s.z),
            (ConstructionMethod::Mod4Zero, 4, 24, 24)
        );
        let s = solve_one(4, 9, &c).unwrap();
        assert_eq!(
            (s.method, s.y, s.z),
            (ConstructionMethod::DivisorB(3), 18, 18)
        );
        let s = solve_one(4, 5, &c).unwrap();
        assert_eq!(
            s.method,
            ConstructionMethod::ParametricSearch { x: 2, t: 4 }
        );
        let s = solve_one(4, 6721, &c).unwrap();
        assert_eq!(
            (s.method, s.x, s.t, s.y),
            (
                ConstructionMethod::DivisorB(11),
                1683,
                Some(186966),
                2_056_626
            )
        );
        assert!(solve_one(4, 1, &c).is_err());
    }

    #[test]
    fn cascade_without_divisor_method() {
        let c = HarnessConfig {
            divisor_method: false,
            ..config(1)
        };
        let s = solve_one(4, 9, &c).unwrap();
        assert_eq!(s.method.tag(), MethodTag::ParametricSearch);
    }

    #[test]
    fn higher_k_falls_back_to_oracle_below_threshold() {
        let c = config(1);
        // k = 5, n = 10 has decompositions but none with integral t.
        let s = solve_one(5, 10, &c).unwrap();
        assert_eq!(s.method, ConstructionMethod::Oracle);
        assert_eq!((s.x, s.y, s.z), (3, 7, 42));
        let off = HarnessConfig {
            oracle_fallback: OracleFallback::Off,
            ..c
        };
        assert!(matches!(
            solve_one(5, 10, &off),
            Err(HarnessError::NoSolutionWithinBudget {
                n: 10,
                oracle_ran: false,
                ..
            })
        ));
        let s = solve_one(5, 11, &off).unwrap();
        assert!(verify_identity(5, 11, s.x, s.y, s.z));
    }

    #[test]
    fn small_range_counts() {
        let r = verify_range(4, 2, 102, &config(2)).unwrap();
        assert_eq!(r.mod4_count(), 75);
        assert_eq!(r.count(MethodTag::DivisorB), 10);
        assert_eq!(
            r.count(MethodTag::ParametricSearch) + r.count(MethodTag::Oracle),
            15
        );
        assert!(r.failures.is_empty());
        assert!(r.coverage_holds());
        let exc: Vec<u64> = r.exceptions.iter().map(|e| e.n).collect();
        assert_eq!(
            exc,
            vec![5, 13, 17, 25, 29, 37, 41, 53, 61, 65, 73, 85, 89, 97, 101]
        );
    }

    #[test]
    fn exceptions_match_b() {
        let lo = 2;
        let hi = 20_000;
        let r = verify_range(
            4,
            lo,
            hi,
            &HarnessConfig {
                chunk_size: 3000,
                ..config(4)
            },
        )
        .unwrap();
        let table = SpfTable::new(hi);
        let want: Vec<u64> = (5..hi).filter(|&n| is_in_b(n, &table).unwrap()).collect();
        let got: Vec<u64> = r
            .exceptions
            .iter()
            .map(|e| e.n)
            .filter(|n| n % 4 == 1)
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn deterministic_across_threads_and_chunks() {
        let base = verify_range(
            4,
            2,
            3000,
            &HarnessConfig {
                log_solutions: true,
                ..config(1)
            },
        )
        .unwrap();
        for threads in [3, 8] {
            let r = verify_range(
                4,
                2,
                3000,
                &HarnessConfig {
                    log_solutions: true,
                    ..config(threads)
                },
            )
            .unwrap();
            assert_eq!(r.to_json(), base.to_json());
        }
        let sols = base.solutions.as_ref().unwrap();
        assert_eq!(sols.len(), 2998);
        assert!(sols.iter().all(|s| verify_identity(4, s.n, s.x, s.y, s.z)));
    }

    #[test]
    fn bad_ranges_and_configs() {
        assert!(matches!(
            verify_range(4, 5, 2, &config(1)),
            Err(HarnessError::InvalidRange(_))
        ));
        assert!(matches!(
            verify_range(4, 1, 10, &config(1)),
            Err(HarnessError::InvalidRange(_))
        ));
        assert!(matches!(
            verify_range(4, 5, 5, &config(1)),
            Err(HarnessError::InvalidRange(_))
        ));
        assert!(matches!(
            verify_range(4, 2, 10, &config(0)),
            Err(HarnessError::InvalidConfig(_))
        ));
        let zero_chunk = HarnessConfig {
            chunk_size: 0,
            ..config(1)
        };
        assert!(matches!(
            verify_range(4, 2, 10, &zero_chunk),
            Err(HarnessError::InvalidConfig(_))
        ));
    }

    #[test]
    fn budget_failures_are_recorded() {
        let c = HarnessConfig {
            x_max: Some(1),
            oracle_fallback: OracleFallback::Off,
            ..config(2)
        };
        let r = verify_range(4, 2, 30, &c).unwrap();
        let failed: Vec<u64> = r.failures.iter().map(|f| f.n).collect();
        assert_eq!(failed, vec![5, 13, 17, 25, 29]);
        assert!(r.coverage_holds());
    }
}
