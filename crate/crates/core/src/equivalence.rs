//! One report that walks the chain (i) => (ii) => (iii) => (iv) => (i) of the
//! compactness equivalence on a concrete instance.
//!
//! (i)   F-complete and F-totally bounded
//! (ii)  F-compact
//! (iii) compact under d
//! (iv)  complete and totally bounded under d
//!
//! On a finite space every statement holds; what is checked is the concrete
//! machinery behind each implication: nets and ball containments, nested
//! families, finite subcovers, and the finite intersection property.

use crate::cantor::{cantor_check, shrink_generator, CANTOR_TOL};
use crate::error::Result;
use crate::ffunc::{check_f1, log_grid, WORKING_RANGE};
use crate::metrize::{check_dominated, check_inequality_2, check_metric_axioms};
use crate::report::VerdictReport;
use crate::space::{check_d3, FMetricInstance};
use crate::topology::{
    ball, check_cover, check_f_bounded, check_fip, check_tb_equivalence, finite_subcover,
    greedy_net, Cover, Geometry, MetricKind,
};

/// Multipliers of the space's D-diameter used as the eps grid.
pub const EPS_GRID: [f64; 6] = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0];

/// Values of eps* for the `f(D) <= f(d + eps*) + alpha` check.
pub const EPS_STAR_GRID: [f64; 3] = [1e-6, 0.1, 1.0];

/// `EPS_GRID` scaled by the D-diameter (by 1 for a singleton).
pub fn scaled_eps_grid(inst: &FMetricInstance) -> Vec<f64> {
    let diam = inst.diameter();
    let scale = if diam > 0.0 { diam } else { 1.0 };
    EPS_GRID.iter().map(|k| k * scale).collect()
}

fn ball_cover(geo: &Geometry, radius: f64, kind: MetricKind) -> Result<Cover> {
    let balls = (0..geo.size())
        .map(|p| ball(geo, p, radius, kind))
        .collect::<Result<Vec<_>>>()?;
    Ok(Cover {
        target: geo.all_points(),
        balls,
    })
}

pub fn equivalence_report(inst: &FMetricInstance) -> Result<VerdictReport> {
    let mut top = VerdictReport::new(
        "equivalence",
        "(i) F-complete and F-totally bounded <=> (ii) F-compact <=> (iii) compact under d <=> (iv) complete and totally bounded under d",
    );
    top.fact("points", inst.size());
    top.fact("function", inst.control().f().name());
    top.fact("alpha", inst.control().alpha());

    let mut axioms = VerdictReport::new("axioms", "(f, alpha) controls D and D is an F-metric");
    let grid = log_grid(WORKING_RANGE.0, WORKING_RANGE.1, 1000);
    axioms.push_section(check_f1(inst.control().f(), &grid)?);
    axioms.push_section(check_d3(inst)?);
    let gate_failed = axioms.status.is_failure();
    top.push_section(axioms);
    if gate_failed {
        top.note("stopped after the axioms section: later sections assume a valid F-metric");
        return Ok(top);
    }

    let geo = Geometry::new(inst.clone());
    let all = geo.all_points();
    let eps_grid = scaled_eps_grid(inst);

    let mut metric = VerdictReport::new(
        "induced-metric",
        "d is a metric with d <= D that controls D",
    );
    metric.push_section(check_metric_axioms(geo.metric()));
    metric.push_section(check_dominated(inst, geo.metric()));
    for eps_star in EPS_STAR_GRID {
        metric.push_section(check_inequality_2(inst, geo.metric(), eps_star)?);
    }
    metric.push_section(check_f_bounded(&geo, &all)?);
    top.push_section(metric);

    let family = shrink_generator(&geo, 0, inst.size())?;

    let mut i = VerdictReport::new("(i)", "X is F-complete and F-totally bounded");
    i.push_section(cantor_check(&geo, &family, CANTOR_TOL)?);
    for &eps in &eps_grid {
        i.push_section(check_tb_equivalence(&geo, &all, eps)?);
    }
    top.push_section(i);

    let mut ii = VerdictReport::new("(ii)", "X is F-compact");
    ii.push_section(check_fip(inst, &family.sets)?);
    let radius = 0.5 * eps_grid[4];
    let sub = finite_subcover(&ball_cover(&geo, radius, MetricKind::Original)?)?;
    let mut cover = check_cover(&geo, &sub)?;
    cover.check_name = "finite-subcover-D".into();
    ii.push_section(cover);
    top.push_section(ii);

    let mut iii = VerdictReport::new("(iii)", "X is compact under d");
    let sub = finite_subcover(&ball_cover(&geo, radius, MetricKind::Induced)?)?;
    let mut cover = check_cover(&geo, &sub)?;
    cover.check_name = "finite-subcover-d".into();
    iii.push_section(cover);
    top.push_section(iii);

    let mut iv = VerdictReport::new("(iv)", "X is complete and totally bounded under d");
    let mut complete = VerdictReport::new(
        "cantor-under-d",
        "the nested family's d-diameters vanish with a one-point intersection",
    );
    if family.final_diam_induced() >= CANTOR_TOL || family.intersection().len() != 1 {
        complete.violation(serde_json::json!({"diam_trace_d": family.diam_trace_induced}));
    }
    iv.push_section(complete);
    for &eps in &eps_grid {
        let net = greedy_net(&geo, &all, eps, MetricKind::Induced)?;
        let mut r = check_cover(&geo, &net)?;
        r.check_name = format!("d-net eps={eps}");
        iv.push_section(r);
    }
    top.push_section(iv);

    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffunc::{Builtin, ControlPair};
    use crate::report::Status;
    use crate::space::fixtures::*;

    #[test]
    fn three_point_passes() {
        let r = equivalence_report(&three_point()).unwrap();
        assert!(r.passed(), "{}", r.table());
        let names: Vec<_> = r.sections.iter().map(|s| s.check_name.as_str()).collect();
        assert_eq!(
            names,
            ["axioms", "induced-metric", "(i)", "(ii)", "(iii)", "(iv)"]
        );
    }

    #[test]
    fn d3_failure_stops_early() {
        let bad = three_point().with_control(ControlPair::new(Builtin::Ln, 0.0).unwrap());
        let r = equivalence_report(&bad).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.sections.len(), 1);
        let d3 = &r.sections[0].sections[1];
        assert_eq!(
            d3.violations().next().unwrap()["pair"],
            serde_json::json!(["a", "c"])
        );
    }

    #[test]
    fn singleton_passes() {
        let r = equivalence_report(&singleton()).unwrap();
        assert!(r.passed(), "{}", r.table());
        assert_eq!(r.sections.len(), 6);
    }
}
