//! Nested families of nonempty sets and the Cantor intersection property.
//!
//! Every finite F-metric space is complete, so for a decreasing family whose
//! D-diameters reach 0 the intersection must be a single point. The converse
//! (the intersection property forcing completeness) needs a non-complete
//! ambient space and has no finite counterpart; reports say so explicitly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::VerdictReport;
use crate::topology::{diameters, Geometry, MetricKind};

/// Default convergence tolerance for the final diameter.
pub const CANTOR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestedFamily {
    /// Sorted point indices, each contained in its predecessor.
    pub sets: Vec<Vec<usize>>,
    #[serde(rename = "diam_trace_D")]
    pub diam_trace_original: Vec<f64>,
    #[serde(rename = "diam_trace_d")]
    pub diam_trace_induced: Vec<f64>,
}

impl NestedFamily {
    pub fn intersection(&self) -> Vec<usize> {
        let mut acc = self.sets[0].clone();
        for s in &self.sets[1..] {
            acc.retain(|p| s.binary_search(p).is_ok());
        }
        acc
    }

    pub fn final_diam_original(&self) -> f64 {
        *self
            .diam_trace_original
            .last()
            .expect("families are nonempty")
    }

    pub fn final_diam_induced(&self) -> f64 {
        *self
            .diam_trace_induced
            .last()
            .expect("families are nonempty")
    }

    /// Diameter traces as CSV: `level,size,diam_D,diam_d`.
    pub fn traces_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["level", "size", "diam_D", "diam_d"])
            .expect("in-memory write");
        for (k, set) in self.sets.iter().enumerate() {
            w.write_record([
                k.to_string(),
                set.len().to_string(),
                self.diam_trace_original[k].to_string(),
                self.diam_trace_induced[k].to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

/// Checks nonemptiness and nesting and computes both diameter traces.
pub fn validate_family(geo: &Geometry, family: &[Vec<usize>]) -> Result<NestedFamily> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(family.len());
    for (k, raw) in family.iter().enumerate() {
        let set = geo.normalize(raw)?;
        if set.is_empty() {
            return Err(Error::EmptyMember(k));
        }
        if let Some(prev) = sets.last() {
            if set.iter().any(|p| prev.binary_search(p).is_err()) {
                return Err(Error::NotNested(k));
            }
        }
        sets.push(set);
    }
    let mut diam_trace_original = Vec::with_capacity(sets.len());
    let mut diam_trace_induced = Vec::with_capacity(sets.len());
    for set in &sets {
        let pair = diameters(geo, set)?;
        diam_trace_original.push(pair.diam_original);
        diam_trace_induced.push(pair.diam_induced);
    }
    Ok(NestedFamily {
        sets,
        diam_trace_original,
        diam_trace_induced,
    })
}

/// Hypothesis: the final D-diameter is below `tol`. Conclusion: the
/// intersection is a single point. Also re-checks the transfer to `d`: the
/// d-diameters are dominated by the D-diameters at every level and shrink
/// below `tol` as well.
pub fn cantor_check(geo: &Geometry, nf: &NestedFamily, tol: f64) -> Result<VerdictReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let inst = geo.instance();
    let mut report = VerdictReport::new(
        "cantor-intersection",
        "decreasing nonempty closed sets with diam_D -> 0 intersect in exactly one point",
    )
    .with_tolerance("final_diameter", tol);
    report.fact("levels", nf.sets.len());
    report.fact("diam_trace_D", &nf.diam_trace_original);
    report.fact("diam_trace_d", &nf.diam_trace_induced);
    report.note("every subset of a finite space is closed in both topologies");
    report.note("converse (intersection property implies completeness) not applicable: finite spaces are complete");

    for (k, (&dd, &d_orig)) in nf
        .diam_trace_induced
        .iter()
        .zip(&nf.diam_trace_original)
        .enumerate()
    {
        if dd > d_orig {
            report.violation(json!({"level": k, "diam_d": dd, "diam_D": d_orig}));
        }
    }

    let inter = nf.intersection();
    report.fact(
        "intersection",
        inter.iter().map(|&i| inst.id(i)).collect::<Vec<_>>(),
    );

    if nf.final_diam_original() >= tol {
        report.hypothesis_unsatisfied(format!(
            "final diam_D = {} is not below {tol}",
            nf.final_diam_original()
        ));
        return Ok(report);
    }
    if inter.len() != 1 {
        report.violation(
            json!({"intersection_size": inter.len(), "final_diam_D": nf.final_diam_original()}),
        );
    }
    if nf.final_diam_induced() >= tol {
        report.violation(json!({"final_diam_d": nf.final_diam_induced()}));
    }
    Ok(report)
}

/// Builds a strictly decreasing family ending in a single point.
///
/// The family shrinks toward an anchor point: the medoid of the space (least
/// total D-distance, lowest index on ties) when `seed == 0`, otherwise a point
/// drawn with a ChaCha8 generator seeded by `seed`. Each level drops the
/// points farthest from the anchor in D (lowest index first on ties). The
/// family has `min(steps, n)` levels; it starts at the whole space and, when it
/// has at least two levels, ends at `{anchor}`.
pub fn shrink_generator(geo: &Geometry, seed: u64, steps: usize) -> Result<NestedFamily> {
    let n = geo.size();
    let levels = steps.clamp(1, n);
    let anchor = if seed == 0 {
        (0..n)
            .map(|i| {
                (
                    i,
                    (0..n)
                        .map(|j| geo.dist(MetricKind::Original, i, j))
                        .sum::<f64>(),
                )
            })
            .fold(
                (0, f64::INFINITY),
                |acc, (i, s)| if s < acc.1 { (i, s) } else { acc },
            )
            .0
    } else {
        ChaCha8Rng::seed_from_u64(seed).random_range(0..n)
    };

    // Removal order: farthest first, ties by index; the anchor is last.
    let mut order: Vec<usize> = (0..n).filter(|&p| p != anchor).collect();
    order.sort_by(|&p, &q| {
        geo.dist(MetricKind::Original, anchor, q)
            .total_cmp(&geo.dist(MetricKind::Original, anchor, p))
            .then(p.cmp(&q))
    });

    let mut family = Vec::with_capacity(levels);
    for k in 0..levels {
        // Sizes fall from n to 1 strictly, evenly spread over the levels.
        let removed = if levels == 1 {
            0
        } else {
            (k * (n - 1)).div_ceil(levels - 1)
        };
        let mut set: Vec<usize> = order[removed..].to_vec();
        set.push(anchor);
        family.push(set);
    }
    validate_family(geo, &family)
}
