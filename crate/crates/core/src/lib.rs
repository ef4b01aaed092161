//! Finite F-metric spaces.
//!
//! An F-metric `D` on a set `X` satisfies `D(x,y) = 0 <=> x = y`, symmetry,
//! and a relaxed chain inequality
//!
//! ```text
//! D(x,y) > 0  =>  f(D(x,y)) <= f(D(u1,u2) + ... + D(u_{N-1},u_N)) + alpha
//! ```
//!
//! for every chain `x = u1, ..., uN = y`, where `f` is nondecreasing and
//! tends to `-inf` exactly at `0+`. Such a space carries an ordinary metric
//! `d(x,y)`, the infimum of chain sums, which generates the same topology.
//!
//! This crate loads finite instances, verifies the axioms, builds `d` by
//! all-pairs shortest paths, and checks the metric-space facts that transfer
//! between `D` and `d` (diameters, nets, covers, nested families, finite
//! intersections) on concrete data.

// `!(x > 0.0)` also rejects NaN; index loops read better on square matrices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod cantor;
pub mod equivalence;
pub mod error;
pub mod ffunc;
pub mod generate;
pub mod matrix;
pub mod metrize;
pub mod report;
pub mod space;
pub mod topology;

pub use cantor::{cantor_check, shrink_generator, validate_family, NestedFamily};
pub use equivalence::equivalence_report;
pub use error::{Error, Result};
pub use ffunc::{check_f1, delta_by_bisection, delta_for, Builtin, ControlPair, FFunction};
pub use generate::{generate, AlphaMode, GeneratorConfig, WeightDistribution};
pub use matrix::DistMatrix;
pub use metrize::{
    check_inequality_2, check_metric_axioms, metrize, metrize_per_source, metrize_with_witnesses,
    InducedMetric,
};
pub use report::{Status, VerdictReport};
pub use space::{
    brute_force_min_chain, check_d3, load_instance, load_instance_path, min_chain_sum, ChainSum,
    FMetricInstance, InstanceFile,
};
pub use topology::{
    ball, cauchy_prefix_diagnostic, check_f_bounded, check_fip, check_tb_equivalence, diameters,
    finite_subcover, greedy_net, Ball, Cover, DiameterPair, Geometry, MetricKind,
};
