//! Nearest-rank percentiles, frequency tables and mean/standard-error summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Percentile levels reported by every study.
pub const LEVELS: [u32; 7] = [10, 20, 25, 50, 75, 80, 90];

/// Nearest-rank percentile: the `⌈p·N/100⌉`-th smallest value (`p` in `1..=100`).
pub fn nearest_rank(sorted: &[f64], p: u32) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (p as usize * sorted.len()).div_ceil(100);
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p10: f64,
    pub p20: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p80: f64,
    pub p90: f64,
}

impl Percentiles {
    /// `None` when there are no finite values. Non-finite values are dropped.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        let at = |p: u32| nearest_rank(&v, p);
        Some(Self {
            p10: at(10)?,
            p20: at(20)?,
            p25: at(25)?,
            p50: at(50)?,
            p75: at(75)?,
            p80: at(80)?,
            p90: at(90)?,
        })
    }

    pub fn values(&self) -> [(u32, f64); 7] {
        [
            (10, self.p10),
            (20, self.p20),
            (25, self.p25),
            (50, self.p50),
            (75, self.p75),
            (80, self.p80),
            (90, self.p90),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub model: String,
    pub count: usize,
    pub proportion: f64,
}

/// Counts per label, most frequent first (ties by label).
pub fn frequency_table<'a>(labels: impl IntoIterator<Item = &'a str>) -> Vec<FrequencyRow> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut total = 0usize;
    for l in labels {
        *counts.entry(l).or_default() += 1;
        total += 1;
    }
    let mut rows: Vec<FrequencyRow> = counts
        .into_iter()
        .map(|(model, count)| FrequencyRow {
            model: model.to_string(),
            count,
            proportion: count as f64 / total as f64,
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.model.cmp(&b.model)));
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    /// Standard error of the mean (sample standard deviation over `√N`).
    pub se: f64,
    pub count: usize,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, se, count: n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_record_fills_every_level() {
        let p = Percentiles::of([2.5]).unwrap();
        assert!(p.values().iter().all(|(_, v)| *v == 2.5));
    }

    #[test]
    fn nearest_rank_on_ten_values() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        let p = Percentiles::of(v).unwrap();
        assert_eq!(
            (p.p10, p.p25, p.p50, p.p75, p.p90),
            (1.0, 3.0, 5.0, 8.0, 9.0)
        );
    }

    #[test]
    fn frequency_order() {
        let t = frequency_table(["b", "a", "b", "c", "a", "b"]);
        assert_eq!(t[0].model, "b");
        assert_eq!(t[1].model, "a");
        assert_eq!(t[0].count, 3);
        assert!((t[0].proportion - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn agrees_with_sort_and_index(mut v in prop::collection::vec(-5i32..5, 1..60)) {
            let p = Percentiles::of(v.iter().map(|&x| x as f64)).unwrap();
            v.sort();
            let n = v.len();
            for (level, got) in p.values() {
                // Smallest index i with (i + 1) / n ≥ level / 100.
                let i = (0..n).find(|&i| 100 * (i + 1) >= level as usize * n).unwrap();
                prop_assert_eq!(got, v[i] as f64);
            }
            let vals = p.values();
            prop_assert!(vals.windows(2).all(|w| w[0].1 <= w[1].1));
        }
    }
}
