//! Average/best aggregation over the k samples generated per task.

use crate::codebleu::SampleScores;
use crate::MetricError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Aggregates {
    pub avg_bleu: f64,
    pub best_bleu: f64,
    pub avg_cb: f64,
    pub best_cb: f64,
}

pub fn aggregate(samples: &[SampleScores]) -> Result<Aggregates, MetricError> {
    if samples.is_empty() {
        return Err(MetricError::EmptySamples);
    }
    let n = samples.len() as f64;
    Ok(Aggregates {
        avg_bleu: samples.iter().map(|s| s.bleu).sum::<f64>() / n,
        best_bleu: samples.iter().map(|s| s.bleu).fold(f64::MIN, f64::max),
        avg_cb: samples.iter().map(|s| s.cb).sum::<f64>() / n,
        best_cb: samples.iter().map(|s| s.cb).fold(f64::MIN, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(bleu: f64, cb: f64) -> SampleScores {
        SampleScores {
            bleu,
            cb,
            components: [cb; 4],
            analysis_failed: false,
        }
    }

    #[test]
    fn single_sample_avg_equals_best() {
        let agg = aggregate(&[sample(0.3, 0.7)]).unwrap();
        assert_eq!(agg.avg_bleu, agg.best_bleu);
        assert_eq!(agg.avg_cb, agg.best_cb);
    }

    #[test]
    fn mean_and_max_arithmetic() {
        let samples: Vec<_> = [0.2, 0.4, 0.6, 0.8, 1.0]
            .iter()
            .map(|&b| sample(b, b / 2.0))
            .collect();
        let agg = aggregate(&samples).unwrap();
        assert!((agg.avg_bleu - 0.6).abs() < 1e-12);
        assert!((agg.best_bleu - 1.0).abs() < 1e-12);
        assert!((agg.avg_cb - 0.3).abs() < 1e-12);
        assert!((agg.best_cb - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_samples_error() {
        assert!(matches!(aggregate(&[]), Err(MetricError::EmptySamples)));
    }
}
