#![allow(dead_code)]

use fmetric::{generate, Builtin, ControlPair, FMetricInstance, GeneratorConfig};

/// 100 calibrated instances with 3..=7 points, cycling through every built-in f.
pub fn small_corpus() -> Vec<FMetricInstance> {
    (0..100u64)
        .map(|seed| {
            let n = 3 + (seed % 5) as usize;
            let f = Builtin::ALL[(seed % 4) as usize];
            generate(&GeneratorConfig::calibrated(n, f, seed)).expect("valid config")
        })
        .collect()
}

/// D(a,b)=1, D(b,c)=1, D(a,c)=2.5 under (ln, ln 3).
pub fn three_point() -> FMetricInstance {
    FMetricInstance::from_rows(
        &["a", "b", "c"],
        &[
            vec![0.0, 1.0, 2.5],
            vec![1.0, 0.0, 1.0],
            vec![2.5, 1.0, 0.0],
        ],
        ControlPair::new(Builtin::Ln, 3f64.ln()).unwrap(),
    )
    .unwrap()
}

pub const THREE_POINT_JSON: &str = r#"{
  "points": ["a", "b", "c"],
  "D": [[0, 1, 2.5], [1, 0, 1], [2.5, 1, 0]],
  "f": {"name": "ln", "params": {}},
  "alpha": 1.0986122886681098
}"#;
