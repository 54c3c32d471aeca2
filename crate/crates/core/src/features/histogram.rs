use serde::{Deserialize, Serialize};

/// Intensity distribution of a frame region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramStats {
    /// 256 probabilities, one per intensity.
    pub bins: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Shannon entropy in bits.
    pub entropy: f64,
}

pub fn histogram_stats<'a>(rows: impl Iterator<Item = &'a [u8]>) -> HistogramStats {
    let mut counts = [0u64; 256];
    let mut n = 0u64;
    for row in rows {
        for &p in row {
            counts[p as usize] += 1;
        }
        n += row.len() as u64;
    }
    if n == 0 {
        return HistogramStats {
            bins: vec![0.0; 256],
            mean: 0.0,
            variance: 0.0,
            entropy: 0.0,
        };
    }
    let total = n as f64;
    let bins: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let mean = counts
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum::<f64>()
        / total;
    let variance = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(v, &c)| {
            let d = v as f64 - mean;
            d * d * c as f64
        })
        .sum::<f64>()
        / total;
    let entropy = -bins
        .iter()
        .filter(|&&p| p > 0.0 && p < 1.0)
        .map(|&p| p * p.log2())
        .sum::<f64>();
    HistogramStats {
        bins,
        mean,
        variance,
        entropy: entropy + 0.0,
    }
}
