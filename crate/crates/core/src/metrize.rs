//! The induced metric: infimum of chain sums, computed as all-pairs shortest
//! paths over the complete graph weighted by `D`.
//!
//! On a finite space the infimum over chains of arbitrary length is attained
//! by a simple path, hence by a chain with at most `n` points. Both kernels
//! below search exactly that space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::ffunc::FFunction;
use crate::matrix::DistMatrix;
use crate::report::VerdictReport;
use crate::space::{shortest_from, FMetricInstance};

/// Tolerance for the metric axioms of `d`.
pub const METRIC_TOL: f64 = 1e-12;

/// Absolute tolerance on the f-scale for the `f(D) <= f(d + eps*) + alpha` check.
pub const INEQ2_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct InducedMetric {
    points: Vec<String>,
    d: DistMatrix,
    /// `next[i][j]`: the point after `i` on a minimizing chain to `j`.
    next: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricFile {
    pub points: Vec<String>,
    #[serde(rename = "d")]
    pub matrix: DistMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<WitnessChain>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WitnessChain {
    pub from: String,
    pub to: String,
    pub chain: Vec<String>,
    pub total: f64,
}

impl InducedMetric {
    /// Wraps an arbitrary matrix, e.g. to audit it with [`check_metric_axioms`].
    pub fn from_matrix(points: Vec<String>, d: DistMatrix) -> Result<Self> {
        if points.len() != d.size() {
            return Err(Error::Shape {
                expected: points.len(),
                row: 0,
                found: d.size(),
            });
        }
        Ok(InducedMetric {
            points,
            d,
            next: None,
        })
    }

    pub fn size(&self) -> usize {
        self.d.size()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d.get(i, j)
    }

    pub fn matrix(&self) -> &DistMatrix {
        &self.d
    }

    pub fn has_witnesses(&self) -> bool {
        self.next.is_some()
    }

    /// A minimizing chain from `i` to `j`, when witnesses were retained.
    pub fn witness_chain(&self, i: usize, j: usize) -> Option<Vec<usize>> {
        let next = self.next.as_ref()?;
        let n = self.size();
        let mut chain = vec![i];
        let mut cur = i;
        while cur != j {
            cur = next[cur * n + j];
            chain.push(cur);
        }
        Some(chain)
    }

    pub fn to_file(&self) -> MetricFile {
        let witnesses = self.next.as_ref().map(|_| {
            self.d
                .pairs()
                .map(|(i, j)| {
                    let chain = self.witness_chain(i, j).expect("witnesses retained");
                    WitnessChain {
                        from: self.points[i].clone(),
                        to: self.points[j].clone(),
                        chain: chain.iter().map(|&k| self.points[k].clone()).collect(),
                        total: self.dist(i, j),
                    }
                })
                .collect()
        });
        MetricFile {
            points: self.points.clone(),
            matrix: self.d.clone(),
            witnesses,
        }
    }
}

/// Reference kernel: Floyd-Warshall with ascending `k, i, j` and strict
/// improvement only, so results are bit-reproducible and direct edges win
/// ties.
pub fn metrize(inst: &FMetricInstance) -> InducedMetric {
    floyd_warshall(inst, false)
}

/// Like [`metrize`] but keeps a next-hop table for witness chains.
pub fn metrize_with_witnesses(inst: &FMetricInstance) -> InducedMetric {
    floyd_warshall(inst, true)
}

fn floyd_warshall(inst: &FMetricInstance, keep_next: bool) -> InducedMetric {
    let n = inst.size();
    let mut d = inst.matrix().clone();
    let mut next: Vec<usize> = if keep_next {
        (0..n * n).map(|idx| idx % n).collect()
    } else {
        Vec::new()
    };
    for k in 0..n {
        for i in 0..n {
            let dik = d.get(i, k);
            for j in 0..n {
                let via = dik + d.get(k, j);
                if via < d.get(i, j) {
                    d.set(i, j, via);
                    if keep_next {
                        next[i * n + j] = next[i * n + k];
                    }
                }
            }
        }
    }
    InducedMetric {
        points: inst.points().to_vec(),
        d,
        next: keep_next.then_some(next),
    }
}

/// Alternative kernel: one dense Dijkstra per source, rows in parallel.
/// The upper triangle is mirrored so the output is exactly symmetric.
pub fn metrize_per_source(inst: &FMetricInstance) -> InducedMetric {
    let n = inst.size();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| shortest_from(inst, s).0)
        .collect();
    let mut d = DistMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            d.set(i, j, rows[i][j]);
            d.set(j, i, rows[i][j]);
        }
    }
    InducedMetric {
        points: inst.points().to_vec(),
        d,
        next: None,
    }
}

/// Symmetry, zero diagonal, positivity off the diagonal, and the triangle
/// inequality over all triples.
pub fn check_metric_axioms(m: &InducedMetric) -> VerdictReport {
    let mut report = VerdictReport::new(
        "metric-axioms",
        "d(x,y) = 0 iff x = y; d(x,y) = d(y,x); d(x,z) <= d(x,y) + d(y,z)",
    )
    .with_tolerance("absolute", METRIC_TOL);
    let n = m.size();
    let id = |i: usize| m.points[i].as_str();
    for i in 0..n {
        if m.dist(i, i).abs() > METRIC_TOL {
            report.violation(json!({"axiom": "identity", "point": id(i), "d": m.dist(i, i)}));
        }
        for j in i + 1..n {
            let (a, b) = (m.dist(i, j), m.dist(j, i));
            if (a - b).abs() > METRIC_TOL {
                report.violation(
                    json!({"axiom": "symmetry", "pair": [id(i), id(j)], "d_xy": a, "d_yx": b}),
                );
            }
            if !(a > 0.0) {
                report.violation(json!({"axiom": "identity", "pair": [id(i), id(j)], "d": a}));
            }
        }
    }
    let mut triples = 0u64;
    for x in 0..n {
        for y in 0..n {
            if y == x {
                continue;
            }
            let dxy = m.dist(x, y);
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                triples += 1;
                let (direct, detour) = (m.dist(x, z), dxy + m.dist(y, z));
                if direct > detour + METRIC_TOL {
                    report.violation(json!({
                        "axiom": "triangle",
                        "triple": [id(x), id(y), id(z)],
                        "d_xz": direct,
                        "d_xy_plus_d_yz": detour,
                    }));
                }
            }
        }
    }
    report.fact("ordered_triples", triples);
    report
}

/// `f(D(x,y)) <= f(d(x,y) + eps_star) + alpha` for every pair `x != y`.
pub fn check_inequality_2(
    inst: &FMetricInstance,
    m: &InducedMetric,
    eps_star: f64,
) -> Result<VerdictReport> {
    if !(eps_star > 0.0) || !eps_star.is_finite() {
        return Err(Error::InvalidRadius(eps_star));
    }
    let f: &FFunction = inst.control().f();
    let alpha = inst.control().alpha();
    let mut report = VerdictReport::new(
        "d-controls-D",
        "for every eps* > 0 and x != y: f(D(x,y)) <= f(d(x,y) + eps*) + alpha",
    )
    .with_tolerance("f_scale_absolute", INEQ2_TOL);
    report.fact("eps_star", eps_star);
    for (i, j) in inst.matrix().pairs() {
        let lhs = f.eval(inst.dist(i, j))?;
        let rhs = f.eval(m.dist(i, j) + eps_star)? + alpha;
        if lhs > rhs + INEQ2_TOL {
            report.violation(json!({
                "pair": [inst.id(i), inst.id(j)],
                "D": inst.dist(i, j),
                "d": m.dist(i, j),
                "lhs": lhs,
                "rhs": rhs,
            }));
        }
    }
    Ok(report)
}

/// Entrywise `d <= D`.
pub fn check_dominated(inst: &FMetricInstance, m: &InducedMetric) -> VerdictReport {
    let mut report = VerdictReport::new("d-below-D", "d(x,y) <= D(x,y) for all x, y");
    for (i, j) in inst.matrix().pairs() {
        if m.dist(i, j) > inst.dist(i, j) {
            report.violation(json!({
                "pair": [inst.id(i), inst.id(j)],
                "d": m.dist(i, j),
                "D": inst.dist(i, j),
            }));
        }
    }
    report
}
