//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffunc::{Builtin, ControlPair, FFunction};
use crate::matrix::DistMatrix;
use crate::metrize::metrize;
use crate::space::FMetricInstance;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightDistribution {
    /// Independent off-diagonal entries, uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Euclidean distances between points uniform in `[0, scale]^dim`.
    /// Always satisfies the triangle inequality.
    Euclidean { dim: usize, scale: f64 },
}

impl Default for WeightDistribution {
    fn default() -> Self {
        WeightDistribution::Uniform { lo: 0.1, hi: 10.0 }
    }
}

impl WeightDistribution {
    fn validate(&self) -> Result<()> {
        match *self {
            WeightDistribution::Uniform { lo, hi } => {
                if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                    return Err(Error::InvalidDistribution(format!(
                        "uniform needs 0 < lo <= hi < inf, got [{lo}, {hi}]"
                    )));
                }
            }
            WeightDistribution::Euclidean { dim, scale } => {
                if dim == 0 || !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::InvalidDistribution(format!(
                        "euclidean needs dim >= 1 and a positive finite scale, got dim={dim}, scale={scale}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses `uniform:LO,HI` or `euclidean:DIM[,SCALE]`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDistribution(format!("cannot parse `{s}`"));
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        let dist = match (kind, nums.as_slice()) {
            ("uniform", []) => WeightDistribution::default(),
            ("uniform", [lo, hi]) => WeightDistribution::Uniform { lo: *lo, hi: *hi },
            ("euclidean", [dim]) => WeightDistribution::Euclidean {
                dim: *dim as usize,
                scale: 10.0,
            },
            ("euclidean", [dim, scale]) => WeightDistribution::Euclidean {
                dim: *dim as usize,
                scale: *scale,
            },
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "alpha", rename_all = "snake_case")]
pub enum AlphaMode {
    Fixed(f64),
    /// Smallest alpha for which the chain inequality holds.
    Calibrated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_points: usize,
    pub weights: WeightDistribution,
    pub f: Builtin,
    pub alpha: AlphaMode,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn calibrated(n_points: usize, f: Builtin, seed: u64) -> Self {
        GeneratorConfig {
            n_points,
            weights: WeightDistribution::default(),
            f,
            alpha: AlphaMode::Calibrated,
            seed,
        }
    }
}

fn sample_matrix(
    n: usize,
    weights: WeightDistribution,
    rng: &mut ChaCha8Rng,
) -> Result<DistMatrix> {
    let mut d = DistMatrix::zeros(n);
    match weights {
        WeightDistribution::Uniform { lo, hi } => {
            for i in 0..n {
                for j in i + 1..n {
                    let v = if hi > lo {
                        rng.random_range(lo..=hi)
                    } else {
                        lo
                    };
                    d.set(i, j, v);
                    d.set(j, i, v);
                }
            }
        }
        WeightDistribution::Euclidean { dim, scale } => {
            let coords: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..dim).map(|_| rng.random_range(0.0..scale)).collect())
                .collect();
            for i in 0..n {
                for j in i + 1..n {
                    let v = coords[i]
                        .iter()
                        .zip(&coords[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if !(v > 0.0) {
                        return Err(Error::InvalidDistribution(
                            "coincident sample points".into(),
                        ));
                    }
                    d.set(i, j, v);
                    d.set(j, i, v);
                }
            }
        }
    }
    Ok(d)
}

/// `max over pairs of f(D(x,y)) - f(s(x,y))`, clamped at 0, where `s` is the
/// shortest-chain matrix. With `f` nondecreasing the chain inequality is
/// tightest at `s`, so this is the least valid alpha.
pub fn calibrate_alpha(f: &FFunction, inst: &FMetricInstance) -> Result<f64> {
    let s = metrize(inst);
    let mut alpha = 0.0_f64;
    for (i, j) in inst.matrix().pairs() {
        let gap = f.eval(inst.dist(i, j))? - f.eval(s.dist(i, j))?;
        alpha = alpha.max(gap);
    }
    Ok(alpha)
}

/// Deterministic given the config. Point ids are `p0, p1, ...`.
pub fn generate(config: &GeneratorConfig) -> Result<FMetricInstance> {
    if config.n_points == 0 {
        return Err(Error::NoPoints);
    }
    config.weights.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let d = sample_matrix(config.n_points, config.weights, &mut rng)?;
    let points: Vec<String> = (0..config.n_points).map(|i| format!("p{i}")).collect();
    let f: FFunction = config.f.into();
    let provisional = FMetricInstance::new(points, d, ControlPair::new(f.clone(), 0.0)?)?;
    let alpha = match config.alpha {
        AlphaMode::Fixed(a) => a,
        AlphaMode::Calibrated => calibrate_alpha(&f, &provisional)?,
    };
    Ok(provisional.with_control(ControlPair::new(f, alpha)?))
}
