use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Duration;

use crate::decimal;
use crate::solution::{ConstructionMethod, MethodTag, Solution};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// An `n` that neither residue-class construction covered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionRecord {
    #[serde(with = "decimal")]
    pub n: u64,
    pub method: ConstructionMethod,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    #[serde(with = "decimal")]
    pub n: u64,
    pub reason: String,
}

/// Results for one chunk of the range, in ascending `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChunkResult {
    #[serde(with = "decimal")]
    pub index: u64,
    #[serde(with = "decimal::map")]
    pub counts: BTreeMap<MethodTag, u64>,
    pub exceptions: Vec<ExceptionRecord>,
    pub failures: Vec<FailureRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solutions: Vec<Solution>,
}

/// Coverage of `[lo, hi)` by construction method.
///
/// `elapsed` is neither serialized nor compared: the report depends only on
/// the inputs, so runs with different thread counts or resumed from a
/// checkpoint produce identical files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(with = "decimal")]
    pub format_version: u32,
    #[serde(with = "decimal")]
    pub k: u64,
    #[serde(with = "decimal")]
    pub lo: u64,
    #[serde(with = "decimal")]
    pub hi: u64,
    #[serde(with = "decimal")]
    pub chunk_size: u64,
    #[serde(with = "decimal::map")]
    pub per_method_counts: BTreeMap<MethodTag, u64>,
    pub exceptions: Vec<ExceptionRecord>,
    pub failures: Vec<FailureRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Vec<Solution>>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PartialEq for VerificationReport {
    fn eq(&self, other: &Self) -> bool {
        self.format_version == other.format_version
            && self.k == other.k
            && self.lo == other.lo
            && self.hi == other.hi
            && self.chunk_size == other.chunk_size
            && self.per_method_counts == other.per_method_counts
            && self.exceptions == other.exceptions
            && self.failures == other.failures
            && self.solutions == other.solutions
    }
}

impl Eq for VerificationReport {}

impl VerificationReport {
    /// Merges chunk results, which must be given in index order.
    pub(crate) fn assemble(
        k: u64,
        lo: u64,
        hi: u64,
        chunk_size: u64,
        chunks: impl IntoIterator<Item = ChunkResult>,
        log_solutions: bool,
    ) -> Self {
        let mut per_method_counts: BTreeMap<MethodTag, u64> =
            MethodTag::ALL.iter().map(|&t| (t, 0)).collect();
        let mut exceptions = Vec::new();
        let mut failures = Vec::new();
        let mut solutions = Vec::new();
        for chunk in chunks {
            for (tag, c) in chunk.counts {
                *per_method_counts.entry(tag).or_default() += c;
            }
            exceptions.extend(chunk.exceptions);
            failures.extend(chunk.failures);
            solutions.extend(chunk.solutions);
        }
        VerificationReport {
            format_version: REPORT_FORMAT_VERSION,
            k,
            lo,
            hi,
            chunk_size,
            per_method_counts,
            exceptions,
            failures,
            solutions: log_solutions.then_some(solutions),
            elapsed: Duration::ZERO,
        }
    }

    pub fn range_len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn count(&self, tag: MethodTag) -> u64 {
        self.per_method_counts.get(&tag).copied().unwrap_or(0)
    }

    pub fn solved(&self) -> u64 {
        self.per_method_counts.values().sum()
    }

    pub fn mod4_count(&self) -> u64 {
        MethodTag::ALL
            .iter()
            .filter(|t| t.is_mod4())
            .map(|&t| self.count(t))
            .sum()
    }

    /// Solved plus failed covers the whole range.
    pub fn coverage_holds(&self) -> bool {
        self.solved() + self.failures.len() as u64 == self.range_len()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `method,count` rows.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["method", "count"])
            .expect("in-memory write");
        for (tag, c) in &self.per_method_counts {
            w.write_record([tag.as_str(), &c.to_string()])
                .expect("in-memory write");
        }
        w.write_record(["failures", &self.failures.len().to_string()])
            .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }
}
