//! Balls, diameters, covers and set families over a finite instance, in both
//! the original distance `D` and the induced metric `d`.
//!
//! Balls are open: `B(x, r) = { y : dist(x, y) < r }`.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ffunc::delta_for;
use crate::metrize::{metrize, InducedMetric};
use crate::report::VerdictReport;
use crate::space::FMetricInstance;

/// Which distance a ball or net is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    /// The F-metric `D`.
    #[serde(rename = "D")]
    Original,
    /// The induced metric `d`.
    #[serde(rename = "d")]
    Induced,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Original => "D",
            MetricKind::Induced => "d",
        })
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "D" => Ok(MetricKind::Original),
            "d" => Ok(MetricKind::Induced),
            other => Err(format!("metric must be `D` or `d`, got `{other}`")),
        }
    }
}

/// An instance together with its induced metric.
#[derive(Clone, Debug)]
pub struct Geometry {
    inst: FMetricInstance,
    metric: InducedMetric,
}

impl Geometry {
    pub fn new(inst: FMetricInstance) -> Self {
        let metric = metrize(&inst);
        Geometry { inst, metric }
    }

    pub fn from_parts(inst: FMetricInstance, metric: InducedMetric) -> Result<Self> {
        if inst.size() != metric.size() {
            return Err(Error::Shape {
                expected: inst.size(),
                row: 0,
                found: metric.size(),
            });
        }
        Ok(Geometry { inst, metric })
    }

    pub fn instance(&self) -> &FMetricInstance {
        &self.inst
    }

    pub fn metric(&self) -> &InducedMetric {
        &self.metric
    }

    pub fn size(&self) -> usize {
        self.inst.size()
    }

    #[inline]
    pub fn dist(&self, kind: MetricKind, i: usize, j: usize) -> f64 {
        match kind {
            MetricKind::Original => self.inst.dist(i, j),
            MetricKind::Induced => self.metric.dist(i, j),
        }
    }

    fn ids(&self, set: &[usize]) -> Vec<&str> {
        set.iter().map(|&i| self.inst.id(i)).collect()
    }

    /// Sorted, deduplicated copy of `set` after range checks.
    pub fn normalize(&self, set: &[usize]) -> Result<Vec<usize>> {
        for &i in set {
            self.inst.check_index(i)?;
        }
        let mut v = set.to_vec();
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }

    pub fn all_points(&self) -> Vec<usize> {
        (0..self.size()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub kind: MetricKind,
    /// Sorted point indices.
    pub members: Vec<usize>,
}

impl Ball {
    pub fn contains(&self, p: usize) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn is_subset_of(&self, other: &Ball) -> bool {
        self.members.iter().all(|&p| other.contains(p))
    }

    pub fn to_json(&self, inst: &FMetricInstance) -> Value {
        json!({
            "center": inst.id(self.center),
            "radius": self.radius,
            "metric": self.kind,
            "members": self.members.iter().map(|&i| inst.id(i)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    /// Sorted point indices that must be covered.
    pub target: Vec<usize>,
    pub balls: Vec<Ball>,
}

impl Cover {
    /// First target point outside every ball, if any.
    pub fn uncovered(&self) -> Option<usize> {
        self.target
            .iter()
            .copied()
            .find(|&p| !self.balls.iter().any(|b| b.contains(p)))
    }

    pub fn centers(&self) -> Vec<usize> {
        self.balls.iter().map(|b| b.center).collect()
    }

    pub fn to_json(&self, inst: &FMetricInstance) -> Value {
        json!({
            "target": self.target.iter().map(|&i| inst.id(i)).collect::<Vec<_>>(),
            "centers": self.centers().iter().map(|&i| inst.id(i)).collect::<Vec<_>>(),
            "balls": self.balls.iter().map(|b| b.to_json(inst)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterPair {
    pub set: Vec<usize>,
    #[serde(rename = "diam_D")]
    pub diam_original: f64,
    #[serde(rename = "diam_d")]
    pub diam_induced: f64,
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRadius(r))
    }
}

pub fn ball(geo: &Geometry, center: usize, radius: f64, kind: MetricKind) -> Result<Ball> {
    geo.inst.check_index(center)?;
    check_radius(radius)?;
    let members = (0..geo.size())
        .filter(|&y| geo.dist(kind, center, y) < radius)
        .collect();
    Ok(Ball {
        center,
        radius,
        kind,
        members,
    })
}

fn diameter(geo: &Geometry, kind: MetricKind, set: &[usize]) -> f64 {
    let mut best = 0.0_f64;
    for (k, &i) in set.iter().enumerate() {
        for &j in &set[k + 1..] {
            best = best.max(geo.dist(kind, i, j));
        }
    }
    best
}

/// Diameters of `set` under both distances. Empty sets and singletons have
/// diameter 0.
pub fn diameters(geo: &Geometry, set: &[usize]) -> Result<DiameterPair> {
    let set = geo.normalize(set)?;
    let diam_original = diameter(geo, MetricKind::Original, &set);
    let diam_induced = diameter(geo, MetricKind::Induced, &set);
    // d <= D entrywise by construction
    assert!(
        diam_induced <= diam_original,
        "diam_d {diam_induced} exceeds diam_D {diam_original}"
    );
    Ok(DiameterPair {
        set,
        diam_original,
        diam_induced,
    })
}

/// Reports the least bound `M` with `D(x,y) <= M` on `set`, and checks that
/// the same bound holds for `d`.
pub fn check_f_bounded(geo: &Geometry, set: &[usize]) -> Result<VerdictReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let diam = diameters(geo, set)?;
    let mut report = VerdictReport::new(
        "f-bounded",
        "exists M > 0 with D(x,y) <= M on A; then d(x,y) <= M on A and diam_d(A) <= diam_D(A)",
    );
    report.fact("set", geo.ids(&diam.set));
    report.fact("M", diam.diam_original);
    report.fact("diam_d", diam.diam_induced);
    if diam.set.len() == 1 {
        report.fact("vacuous", true);
        report.note("singleton set: every M > 0 bounds it; least bound reported as 0");
    }
    let m = diam.diam_original;
    for (k, &i) in diam.set.iter().enumerate() {
        for &j in &diam.set[k + 1..] {
            let d = geo.metric.dist(i, j);
            if d > m {
                report.violation(json!({"pair": [geo.inst.id(i), geo.inst.id(j)], "d": d, "M": m}));
            }
        }
    }
    Ok(report)
}

/// Greedy net: scans `set` in index order and opens a ball at every point not
/// yet covered. Centers are drawn from `set` itself.
pub fn greedy_net(geo: &Geometry, set: &[usize], eps: f64, kind: MetricKind) -> Result<Cover> {
    check_radius(eps)?;
    let target = geo.normalize(set)?;
    if target.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut balls: Vec<Ball> = Vec::new();
    for &p in &target {
        if !balls.iter().any(|b| b.contains(p)) {
            balls.push(ball(geo, p, eps, kind)?);
        }
    }
    Ok(Cover { target, balls })
}

/// Greedy set cover over the balls of `cover`: repeatedly keep the ball that
/// covers the most still-uncovered target points, lowest index on ties.
/// Kept balls are returned in their original order.
pub fn finite_subcover(cover: &Cover) -> Result<Cover> {
    if let Some(p) = cover.uncovered() {
        return Err(Error::NotACover(p));
    }
    let mut remaining = cover.target.clone();
    let mut kept = vec![false; cover.balls.len()];
    while !remaining.is_empty() {
        let (best, gain) = cover
            .balls
            .iter()
            .enumerate()
            .filter(|(k, _)| !kept[*k])
            .map(|(k, b)| (k, remaining.iter().filter(|&&p| b.contains(p)).count()))
            .fold(
                (usize::MAX, 0),
                |acc, (k, g)| if g > acc.1 { (k, g) } else { acc },
            );
        debug_assert!(gain > 0, "input was verified to cover the target");
        kept[best] = true;
        let chosen = &cover.balls[best];
        remaining.retain(|&p| !chosen.contains(p));
    }
    let balls = cover
        .balls
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(b, _)| b.clone())
        .collect();
    Ok(Cover {
        target: cover.target.clone(),
        balls,
    })
}

/// Verifies that `cover` covers its target and that every D-ball lies inside
/// the d-ball with the same center and radius.
pub fn check_cover(geo: &Geometry, cover: &Cover) -> Result<VerdictReport> {
    let mut report = VerdictReport::new(
        "cover",
        "target is contained in the union of the balls; B_D(x,r) is contained in B_d(x,r)",
    );
    report.fact("balls", cover.balls.len());
    if let Some(p) = cover.uncovered() {
        report.violation(json!({"uncovered": geo.inst.id(p)}));
    }
    for b in cover
        .balls
        .iter()
        .filter(|b| b.kind == MetricKind::Original)
    {
        if let Some(y) = forward_escape(geo, b.center, b.radius)? {
            report.violation(json!({"center": geo.inst.id(b.center), "radius": b.radius, "escapes_d_ball": geo.inst.id(y)}));
        }
    }
    Ok(report)
}

/// A point of `B_D(center, r)` outside `B_d(center, r)`, if any.
pub fn forward_escape(geo: &Geometry, center: usize, r: f64) -> Result<Option<usize>> {
    let inner = ball(geo, center, r, MetricKind::Original)?;
    let outer = ball(geo, center, r, MetricKind::Induced)?;
    Ok(inner.members.into_iter().find(|&y| !outer.contains(y)))
}

/// A point of `B_d(center, r)` outside `B_D(center, eps)`, if any.
///
/// A singleton d-ball is contained in every ball around its center, so
/// nothing is evaluated in that case (`D(center, center) = 0` lies outside
/// the domain of f).
pub fn reverse_escape(geo: &Geometry, center: usize, r: f64, eps: f64) -> Result<Option<usize>> {
    let inner = ball(geo, center, r, MetricKind::Induced)?;
    if inner.members.len() == 1 {
        return Ok(None);
    }
    let outer = ball(geo, center, eps, MetricKind::Original)?;
    Ok(inner
        .members
        .into_iter()
        .find(|&y| y != center && !outer.contains(y)))
}

/// Both directions of the total-boundedness equivalence on `set` at scale
/// `eps`.
///
/// Forward: an eps-net in `D` is an eps-net in `d` because each D-ball sits
/// inside the same d-ball. Reverse: with `delta` such that `f(t) < f(eps) -
/// alpha` on `(0, delta)`, a (delta/2)-net in `d` is an eps-net in `D`,
/// because `f(D(y,b)) <= f(d(y,b) + delta/2) + alpha < f(eps)`.
pub fn check_tb_equivalence(geo: &Geometry, set: &[usize], eps: f64) -> Result<VerdictReport> {
    check_radius(eps)?;
    let f = geo.inst.control().f();
    let alpha = geo.inst.control().alpha();
    let mut report = VerdictReport::new(
        "total-boundedness-equivalence",
        "A is totally bounded under D iff it is totally bounded under d",
    );
    report.fact("eps", eps);

    let mut forward = VerdictReport::new(
        "forward",
        "A covered by B_D(a_i, eps) and B_D(a_i, eps) contained in B_d(a_i, eps)",
    );
    let net = greedy_net(geo, set, eps, MetricKind::Original)?;
    forward.fact("centers", geo.ids(&net.centers()));
    for b in &net.balls {
        if let Some(y) = forward_escape(geo, b.center, eps)? {
            forward.violation(json!({
                "center": geo.inst.id(b.center),
                "point": geo.inst.id(y),
                "D": geo.dist(MetricKind::Original, b.center, y),
                "d": geo.dist(MetricKind::Induced, b.center, y),
            }));
        }
    }

    let mut reverse = VerdictReport::new(
        "reverse",
        "with f(t) < f(eps) - alpha on (0, delta): B_d(b_i, delta/2) contained in B_D(b_i, eps)",
    );
    let target = f.eval(eps)? - alpha;
    let delta = delta_for(f, target)?;
    let half = 0.5 * delta;
    reverse.fact("f_eps_minus_alpha", target);
    reverse.fact("delta", delta);
    let net = greedy_net(geo, set, half, MetricKind::Induced)?;
    reverse.fact("centers", geo.ids(&net.centers()));
    for b in &net.balls {
        if let Some(y) = reverse_escape(geo, b.center, half, eps)? {
            let d_yb = geo.dist(MetricKind::Induced, y, b.center);
            reverse.violation(json!({
                "center": geo.inst.id(b.center),
                "point": geo.inst.id(y),
                "D": geo.dist(MetricKind::Original, y, b.center),
                "d": d_yb,
                "f_D": f.eval(geo.dist(MetricKind::Original, y, b.center))?,
                "f_d_plus_half_delta_plus_alpha": f.eval(d_yb + half)? + alpha,
                "f_eps": f.eval(eps)?,
            }));
        }
    }

    report.push_section(forward);
    report.push_section(reverse);
    Ok(report)
}

/// Bit-packed subset of a finite ground set.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn from_indices(n: usize, set: &[usize]) -> Self {
        let mut words = vec![0u64; n.div_ceil(64).max(1)];
        for &i in set {
            words[i / 64] |= 1 << (i % 64);
        }
        Bits(words)
    }

    fn full(n: usize) -> Self {
        Bits::from_indices(n, &(0..n).collect::<Vec<_>>())
    }

    fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(k * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }
}

/// Families up to this size get an exhaustive level-by-level search for the
/// smallest subfamily with empty intersection.
pub const FIP_EXHAUSTIVE_LIMIT: usize = 16;

fn intersect(n: usize, sets: &[Bits], pick: &[usize]) -> Bits {
    let mut acc = Bits::full(n);
    for &k in pick {
        acc.and_assign(&sets[k]);
    }
    acc
}

/// Smallest subfamily (by size, then lexicographically) with empty
/// intersection.
fn smallest_empty_subfamily(n: usize, sets: &[Bits]) -> Option<Vec<usize>> {
    let m = sets.len();
    for k in 1..=m {
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            if intersect(n, sets, &pick).is_empty() {
                return Some(pick);
            }
            // next combination
            let mut i = k;
            while i > 0 && pick[i - 1] == m - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            pick[i - 1] += 1;
            for j in i..k {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    None
}

/// Shortest failing prefix, then drop members while the intersection stays
/// empty. The result is irreducible but not necessarily of minimum size.
fn irreducible_empty_subfamily(n: usize, sets: &[Bits]) -> Option<Vec<usize>> {
    let mut acc = Bits::full(n);
    let mut prefix = None;
    for (k, s) in sets.iter().enumerate() {
        acc.and_assign(s);
        if acc.is_empty() {
            prefix = Some(k + 1);
            break;
        }
    }
    let mut pick: Vec<usize> = (0..prefix?).collect();
    let mut k = 0;
    while k < pick.len() {
        let mut without = pick.clone();
        without.remove(k);
        if !without.is_empty() && intersect(n, sets, &without).is_empty() {
            pick = without;
        } else {
            k += 1;
        }
    }
    Some(pick)
}

/// Finite intersection property of a family of subsets.
///
/// On a finite ground set every subset is closed, and the family is itself a
/// finite subfamily, so FIP holds exactly when the total intersection is
/// nonempty. The report gives the total intersection, whether all pairwise
/// intersections are nonempty, and on failure a subfamily with empty
/// intersection together with its size (the failing stage).
pub fn check_fip(inst: &FMetricInstance, family: &[Vec<usize>]) -> Result<VerdictReport> {
    let n = inst.size();
    for set in family {
        for &i in set {
            inst.check_index(i)?;
        }
    }
    let ids = |v: &[usize]| v.iter().map(|&i| inst.id(i).to_owned()).collect::<Vec<_>>();
    let sets: Vec<Bits> = family.iter().map(|s| Bits::from_indices(n, s)).collect();
    let m = sets.len();

    let mut report = VerdictReport::new(
        "finite-intersection-property",
        "a family of closed sets with the finite intersection property has nonempty intersection",
    );
    report.fact("family_size", m);

    let total = intersect(n, &sets, &(0..m).collect::<Vec<_>>());
    report.fact("total_intersection", ids(&total.indices()));
    if m == 0 {
        report.note("empty family: vacuous; total intersection is the whole space");
    }

    let pairwise = (0..m).all(|a| {
        (a + 1..m).all(|b| {
            let mut x = sets[a].clone();
            x.and_assign(&sets[b]);
            !x.is_empty()
        }) && !sets[a].is_empty()
    });
    report.fact("pairwise_nonempty", pairwise);

    if total.is_empty() {
        let (witness, exhaustive) = if m <= FIP_EXHAUSTIVE_LIMIT {
            (smallest_empty_subfamily(n, &sets), true)
        } else {
            (irreducible_empty_subfamily(n, &sets), false)
        };
        let witness = witness.expect("the whole family has empty intersection");
        report.fact("fip_holds", false);
        report.fact("failing_stage", witness.len());
        report.violation(json!({
            "subfamily": witness,
            "sets": witness.iter().map(|&k| ids(&family[k])).collect::<Vec<_>>(),
            "intersection": [],
            "minimum_size": exhaustive,
        }));
    } else {
        report.fact("fip_holds", true);
        report.certificate(json!({"common_point": inst.id(total.indices()[0])}));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyDiagnostic {
    /// 1-based start of the first tail that stays within `eps` under `D`.
    #[serde(rename = "N_D")]
    pub n_original: Option<usize>,
    #[serde(rename = "N_d")]
    pub n_induced: Option<usize>,
}

/// For a finite sequence, the smallest 1-based `N` such that all pairwise
/// distances among terms `N..` are below `eps`, in each metric.
///
/// A tail must keep at least two terms, otherwise every finite sequence would
/// stabilize trivially at its last term; a one-term sequence stabilizes at 1.
pub fn cauchy_prefix_diagnostic(
    geo: &Geometry,
    seq: &[usize],
    eps: f64,
) -> Result<CauchyDiagnostic> {
    check_radius(eps)?;
    if seq.is_empty() {
        return Err(Error::EmptySet);
    }
    for &p in seq {
        geo.inst.check_index(p)?;
    }
    let settle = |kind: MetricKind| -> Option<usize> {
        let len = seq.len();
        if len == 1 {
            return Some(1);
        }
        let mut tail_diam = 0.0_f64;
        let mut first = None;
        for k in (0..len - 1).rev() {
            for &q in &seq[k + 1..] {
                tail_diam = tail_diam.max(geo.dist(kind, seq[k], q));
            }
            if tail_diam < eps {
                first = Some(k + 1);
            } else {
                break;
            }
        }
        first
    };
    Ok(CauchyDiagnostic {
        n_original: settle(MetricKind::Original),
        n_induced: settle(MetricKind::Induced),
    })
}
