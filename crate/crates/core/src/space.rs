//! Finite F-metric instances and the chain-inequality verifier.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::ffunc::{ControlPair, FSpec};
use crate::matrix::DistMatrix;
use crate::report::VerdictReport;

/// Absolute tolerance on the f-scale for the chain inequality.
pub const D3_TOL: f64 = 1e-9;

/// Loader tolerance for `|D(x,y) - D(y,x)|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Largest instance accepted by [`brute_force_min_chain`].
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// On-disk form of an instance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub points: Vec<String>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    pub f: FSpec,
    pub alpha: f64,
}

/// A finite point set with a validated distance matrix and its control pair.
///
/// Identity of indiscernibles and symmetry are enforced at construction;
/// the chain inequality is a property checked by [`check_d3`].
#[derive(Clone, Debug)]
pub struct FMetricInstance {
    points: Vec<String>,
    index: HashMap<String, usize>,
    dist: DistMatrix,
    control: ControlPair,
}

impl FMetricInstance {
    pub fn new(points: Vec<String>, dist: DistMatrix, control: ControlPair) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        if dist.size() != n {
            return Err(Error::Shape {
                expected: n,
                row: dist.size().min(n),
                found: dist.size(),
            });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in points.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        let mut dist = dist;
        for i in 0..n {
            let v = dist.get(i, i);
            if v != 0.0 {
                return Err(Error::NonzeroDiagonal {
                    id: points[i].clone(),
                    value: v,
                });
            }
        }
        for (i, j) in dist.pairs().collect::<Vec<_>>() {
            let (xy, yx) = (dist.get(i, j), dist.get(j, i));
            if (xy - yx).abs() > SYMMETRY_TOL {
                return Err(Error::Asymmetric {
                    x: points[i].clone(),
                    y: points[j].clone(),
                    xy,
                    yx,
                });
            }
            if !(xy > 0.0) {
                return Err(Error::NonpositiveEntry {
                    x: points[i].clone(),
                    y: points[j].clone(),
                    value: xy,
                });
            }
            // The upper triangle is authoritative.
            dist.set(j, i, xy);
        }
        Ok(FMetricInstance {
            points,
            index,
            dist,
            control,
        })
    }

    pub fn from_rows(points: &[&str], rows: &[Vec<f64>], control: ControlPair) -> Result<Self> {
        let points = points.iter().map(|s| (*s).to_owned()).collect();
        FMetricInstance::new(points, DistMatrix::from_rows(rows)?, control)
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let control = ControlPair::new(file.f.resolve()?, file.alpha)?;
        FMetricInstance::new(
            file.points.clone(),
            DistMatrix::from_rows(&file.d)?,
            control,
        )
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            points: self.points.clone(),
            d: self.dist.to_rows(),
            f: FSpec::from(self.control.f()),
            alpha: self.control.alpha(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance entries are finite")
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn id(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownId(id.to_owned()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        ids.iter().map(|s| self.index_of(s.as_ref())).collect()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.size() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                size: self.size(),
            })
        }
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist.get(i, j)
    }

    pub fn matrix(&self) -> &DistMatrix {
        &self.dist
    }

    pub fn control(&self) -> &ControlPair {
        &self.control
    }

    /// Same points and distances under a different control pair.
    pub fn with_control(&self, control: ControlPair) -> Self {
        FMetricInstance {
            control,
            ..self.clone()
        }
    }

    /// Relabels points: new point `k` is old point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size();
        let mut dist = DistMatrix::zeros(n);
        for a in 0..n {
            for b in 0..n {
                dist.set(a, b, self.dist(perm[a], perm[b]));
            }
        }
        let points = perm.iter().map(|&k| self.points[k].clone()).collect();
        FMetricInstance::new(points, dist, self.control.clone())
    }

    /// Largest off-diagonal entry; 0 for a singleton.
    pub fn diameter(&self) -> f64 {
        self.dist
            .pairs()
            .map(|(i, j)| self.dist(i, j))
            .fold(0.0, f64::max)
    }
}

pub fn load_instance(document: &str) -> Result<FMetricInstance> {
    let file: InstanceFile = serde_json::from_str(document)?;
    FMetricInstance::from_file(&file)
}

pub fn load_instance_path(path: impl AsRef<Path>) -> Result<FMetricInstance> {
    load_instance(&std::fs::read_to_string(path)?)
}

/// A chain from its first to its last point with the sum of consecutive
/// distances, accumulated left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSum {
    pub chain: Vec<usize>,
    pub total: f64,
}

impl ChainSum {
    pub fn ids(&self, inst: &FMetricInstance) -> Vec<String> {
        self.chain.iter().map(|&i| inst.id(i).to_owned()).collect()
    }

    /// Recomputes the total from the chain in the same summation order.
    pub fn recompute(chain: &[usize], inst: &FMetricInstance) -> f64 {
        chain
            .windows(2)
            .fold(0.0, |acc, w| acc + inst.dist(w[0], w[1]))
    }
}

/// Single-source shortest chains over the complete graph weighted by `D`.
///
/// Dense Dijkstra, `O(n^2)`. Returns distances and predecessors. Ties keep
/// the first-found predecessor, and candidates are scanned in index order, so
/// the output is deterministic.
pub(crate) fn shortest_from(inst: &FMetricInstance, source: usize) -> (Vec<f64>, Vec<usize>) {
    let n = inst.size();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !done[v] && (u == usize::MAX || dist[v] < dist[u]) {
                u = v;
            }
        }
        done[u] = true;
        let du = dist[u];
        let row = inst.matrix().row(u);
        for v in 0..n {
            if !done[v] {
                let cand = du + row[v];
                if cand < dist[v] {
                    dist[v] = cand;
                    pred[v] = u;
                }
            }
        }
    }
    (dist, pred)
}

fn walk_back(pred: &[usize], source: usize, target: usize) -> Vec<usize> {
    let mut chain = vec![target];
    let mut cur = target;
    while cur != source {
        cur = pred[cur];
        chain.push(cur);
    }
    chain.reverse();
    chain
}

/// A minimum-total chain from `x` to `y`.
///
/// Off-diagonal distances are strictly positive, so cutting a repeated point
/// out of a chain strictly lowers its total; minimal chains are simple paths
/// and shortest-path search over them is exhaustive.
pub fn min_chain_sum(inst: &FMetricInstance, x: usize, y: usize) -> Result<ChainSum> {
    inst.check_index(x)?;
    inst.check_index(y)?;
    if x == y {
        return Err(Error::SameEndpoints);
    }
    let (dist, pred) = shortest_from(inst, x);
    let chain = walk_back(&pred, x, y);
    debug_assert_eq!(ChainSum::recompute(&chain, inst), dist[y]);
    Ok(ChainSum {
        chain,
        total: dist[y],
    })
}

/// Exhaustive minimum over all simple paths from `x` to `y`.
///
/// Independent of [`min_chain_sum`]; intended as its oracle on small
/// instances.
pub fn brute_force_min_chain(inst: &FMetricInstance, x: usize, y: usize) -> Result<ChainSum> {
    let n = inst.size();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForBruteForce {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    inst.check_index(x)?;
    inst.check_index(y)?;
    if x == y {
        return Err(Error::SameEndpoints);
    }

    struct Search<'a> {
        inst: &'a FMetricInstance,
        target: usize,
        path: Vec<usize>,
        used: Vec<bool>,
        best: Option<ChainSum>,
    }

    impl Search<'_> {
        fn extend(&mut self, total: f64) {
            let last = *self.path.last().expect("path starts nonempty");
            if last == self.target {
                if self.best.as_ref().is_none_or(|b| total < b.total) {
                    self.best = Some(ChainSum {
                        chain: self.path.clone(),
                        total,
                    });
                }
                return;
            }
            for next in 0..self.inst.size() {
                if self.used[next] {
                    continue;
                }
                self.used[next] = true;
                self.path.push(next);
                self.extend(total + self.inst.dist(last, next));
                self.path.pop();
                self.used[next] = false;
            }
        }
    }

    let mut used = vec![false; n];
    used[x] = true;
    let mut search = Search {
        inst,
        target: y,
        path: vec![x],
        used,
        best: None,
    };
    search.extend(0.0);
    Ok(search.best.expect("the direct chain always exists"))
}

/// Checks the chain inequality on every pair.
///
/// Because `f` is nondecreasing, `f(D(x,y)) <= f(s) + alpha` at the minimal
/// chain sum `s` implies the inequality for every chain from `x` to `y`, so one
/// comparison per pair suffices.
pub fn check_d3(inst: &FMetricInstance) -> Result<VerdictReport> {
    let f = inst.control().f();
    let alpha = inst.control().alpha();
    let mut report = VerdictReport::new(
        "d3-chain-inequality",
        "D(x,y) > 0 implies f(D(x,y)) <= f(sum of D along any chain from x to y) + alpha",
    )
    .with_tolerance("f_scale_absolute", D3_TOL);
    report.fact("function", f.name());
    report.fact("alpha", alpha);
    report.note(
        "checked at the minimal chain sum per pair; f nondecreasing extends it to all chains",
    );

    let n = inst.size();
    if n == 1 {
        report.note("singleton instance: vacuous");
        return Ok(report);
    }

    // (slack, x, y); smallest slack marks the binding pair
    let mut binding: Option<(f64, usize, usize)> = None;
    for x in 0..n {
        let (dist, pred) = shortest_from(inst, x);
        for y in x + 1..n {
            let direct = inst.dist(x, y);
            let lhs = f.eval(direct)?;
            let rhs = f.eval(dist[y])? + alpha;
            let slack = rhs - lhs;
            if binding.is_none_or(|(s, _, _)| slack < s) {
                binding = Some((slack, x, y));
            }
            if lhs > rhs + D3_TOL {
                let chain = walk_back(&pred, x, y);
                report.violation(json!({
                    "pair": [inst.id(x), inst.id(y)],
                    "D": direct,
                    "min_chain": chain.iter().map(|&k| inst.id(k)).collect::<Vec<_>>(),
                    "min_chain_sum": dist[y],
                    "lhs": lhs,
                    "rhs": rhs,
                }));
            }
        }
    }
    if let Some((slack, x, y)) = binding {
        report.fact(
            "binding_pair",
            json!({ "pair": [inst.id(x), inst.id(y)], "slack": slack }),
        );
    }
    Ok(report)
}
