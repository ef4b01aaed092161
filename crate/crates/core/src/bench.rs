//! Timing harness for the two metrization kernels.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate, GeneratorConfig};
use crate::metrize::{metrize, metrize_per_source, METRIC_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub repeats: usize,
    pub reference_median_ms: f64,
    pub reference_min_ms: f64,
    pub reference_max_ms: f64,
    pub per_source_median_ms: f64,
    pub max_abs_diff: f64,
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        0.5 * (xs[m - 1] + xs[m])
    } else {
        xs[m]
    }
}

fn time_ms<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

/// Times both kernels on a generated instance per size. The kernels must agree
/// to [`METRIC_TOL`] before any timing is reported.
pub fn bench(config: &GeneratorConfig, sizes: &[usize], repeats: usize) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() {
        return Err(Error::NoSizes);
    }
    let repeats = repeats.max(1);
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let inst = generate(&GeneratorConfig {
            n_points: n,
            ..config.clone()
        })?;
        let reference = metrize(&inst);
        let alt = metrize_per_source(&inst);
        let (max_diff, i, j) = reference.matrix().max_abs_diff(alt.matrix());
        if max_diff > METRIC_TOL {
            return Err(Error::KernelDisagreement { n, i, j, max_diff });
        }
        let mut ref_times: Vec<f64> = (0..repeats).map(|_| time_ms(|| metrize(&inst)).1).collect();
        let mut alt_times: Vec<f64> = (0..repeats)
            .map(|_| time_ms(|| metrize_per_source(&inst)).1)
            .collect();
        let (lo, hi) = ref_times
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &t| {
                (lo.min(t), hi.max(t))
            });
        rows.push(BenchRow {
            n,
            repeats,
            reference_median_ms: median(&mut ref_times),
            reference_min_ms: lo,
            reference_max_ms: hi,
            per_source_median_ms: median(&mut alt_times),
            max_abs_diff: max_diff,
        });
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}
