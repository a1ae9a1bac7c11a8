use serde::{Deserialize, Serialize};

use super::sieve::{count_b_segmented, count_b_with_table, SpfTable, SEGMENT_THRESHOLD};
use super::DensityError;
use crate::decimal;

/// Digits after the decimal point in rendered ratios.
pub const RATIO_DIGITS: u32 = 12;

/// `B(x) = |ℬ ∩ [1, x]|` at a list of checkpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    #[serde(with = "decimal::vec")]
    pub checkpoints: Vec<u64>,
    /// Counts including `n = 1` when `include_one` is set.
    #[serde(with = "decimal::vec")]
    pub b_counts: Vec<u64>,
    #[serde(with = "decimal::vec")]
    pub b_counts_excluding_one: Vec<u64>,
    /// `b_counts[i] / checkpoints[i]`, exact, rounded half-up.
    pub ratios: Vec<String>,
    pub include_one: bool,
}

impl DensityReport {
    fn from_counts(checkpoints: Vec<u64>, b_counts: Vec<u64>) -> Self {
        let ratios = checkpoints
            .iter()
            .zip(&b_counts)
            .map(|(&x, &b)| render_ratio(b, x, RATIO_DIGITS))
            .collect();
        DensityReport {
            b_counts_excluding_one: b_counts.iter().map(|b| b - 1).collect(),
            checkpoints,
            b_counts,
            ratios,
            include_one: true,
        }
    }

    /// `x,b_count,ratio` with a header row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["x", "b_count", "ratio"])
            .expect("in-memory write");
        for ((x, b), r) in self
            .checkpoints
            .iter()
            .zip(&self.b_counts)
            .zip(&self.ratios)
        {
            w.write_record([x.to_string(), b.to_string(), r.clone()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    /// Whether `B(x)/x` strictly decreases from one checkpoint to the next,
    /// compared exactly by cross-multiplication.
    pub fn strictly_decreasing(&self) -> bool {
        self.checkpoints
            .windows(2)
            .zip(self.b_counts.windows(2))
            .all(|(x, b)| (b[1] as u128) * (x[0] as u128) < (b[0] as u128) * (x[1] as u128))
    }
}

/// `num/den` as a decimal string with `digits` fractional digits, rounded
/// half-up using integer arithmetic only.
pub fn render_ratio(num: u64, den: u64, digits: u32) -> String {
    assert!(den > 0, "zero denominator");
    let scale = 10u128.pow(digits);
    let scaled = (num as u128 * scale * 2 + den as u128) / (2 * den as u128);
    let int = scaled / scale;
    let frac = scaled % scale;
    if digits == 0 {
        return int.to_string();
    }
    format!("{int}.{frac:0width$}", width = digits as usize)
}

/// Counts `B(x)` at every checkpoint in one sieve pass. Checkpoints must be
/// strictly ascending and positive.
pub fn density_experiment(checkpoints: &[u64]) -> Result<DensityReport, DensityError> {
    if checkpoints.is_empty() {
        return Err(DensityError::InvalidParameter("no checkpoints".into()));
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DensityError::InvalidParameter(
            "checkpoints must be positive and strictly ascending".into(),
        ));
    }
    let max = *checkpoints.last().unwrap();
    let counts = if max <= SEGMENT_THRESHOLD {
        count_b_with_table(&SpfTable::new(max.max(2)), checkpoints)?
    } else {
        count_b_segmented(checkpoints)
    };
    Ok(DensityReport::from_counts(checkpoints.to_vec(), counts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_checkpoints() {
        let r = density_experiment(&[100]).unwrap();
        assert_eq!(r.b_counts, vec![15]);
        assert_eq!(r.b_counts_excluding_one, vec![14]);
        assert_eq!(r.ratios, vec!["0.150000000000"]);
        let r = density_experiment(&[10]).unwrap();
        assert_eq!(r.b_counts, vec![2]);
        let r = density_experiment(&[1]).unwrap();
        assert_eq!(r.b_counts, vec![1]);
    }

    #[test]
    fn golden_counts() {
        let r = density_experiment(&[1_000, 10_000, 100_000, 1_000_000]).unwrap();
        assert_eq!(r.b_counts, vec![123, 1074, 9623, 87882]);
        assert!(r.strictly_decreasing());
    }

    #[test]
    fn invalid_checkpoints() {
        assert!(density_experiment(&[]).is_err());
        assert!(density_experiment(&[0, 10]).is_err());
        assert!(density_experiment(&[10, 10]).is_err());
        assert!(density_experiment(&[100, 10]).is_err());
    }

    #[test]
    fn ratio_rendering() {
        assert_eq!(render_ratio(1, 3, 4), "0.3333");
        assert_eq!(render_ratio(2, 3, 4), "0.6667");
        assert_eq!(render_ratio(1, 8, 2), "0.13");
        assert_eq!(render_ratio(5, 5, 3), "1.000");
        assert_eq!(render_ratio(7, 2, 0), "4");
    }

    #[test]
    fn csv_layout() {
        let r = density_experiment(&[10, 100]).unwrap();
        assert_eq!(
            r.to_csv(),
            "x,b_count,ratio\n10,2,0.200000000000\n100,15,0.150000000000\n"
        );
        let json = serde_json::to_string(&r).unwrap();
        let back: DensityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
