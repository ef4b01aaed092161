//! The function class used to control the chain inequality.
//!
//! A member `f : (0, inf) -> R` must be nondecreasing and must tend to
//! `-inf` exactly along sequences tending to `0+`. Neither property can be
//! proved for an arbitrary closure, so both are certified numerically on a
//! working range (see [`WORKING_RANGE`]).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::VerdictReport;

/// Numeric domain on which class membership is certified.
pub const WORKING_RANGE: (f64, f64) = (1e-12, 1e6);

/// Relative tolerance for the monotonicity check.
pub const F1_REL_TOL: f64 = 1e-12;

/// First lower-bracket candidate for the sublevel bisection.
const BRACKET_START: f64 = 1e-300;
const BISECTION_MAX_ITERS: usize = 200;

/// Built-in members of the class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `ln t`
    Ln,
    /// `-1/t`
    NegReciprocal,
    /// `ln t + t`
    LnPlusT,
    /// `-1/sqrt(t)`
    NegInvSqrt,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::Ln,
        Builtin::NegReciprocal,
        Builtin::LnPlusT,
        Builtin::NegInvSqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Ln => "ln",
            Builtin::NegReciprocal => "neg_reciprocal",
            Builtin::LnPlusT => "ln_plus_t",
            Builtin::NegInvSqrt => "neg_inv_sqrt",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::UnknownFunction(name.to_owned()))
    }

    fn apply(self, t: f64) -> f64 {
        match self {
            Builtin::Ln => t.ln(),
            Builtin::NegReciprocal => -1.0 / t,
            Builtin::LnPlusT => t.ln() + t,
            Builtin::NegInvSqrt => -1.0 / t.sqrt(),
        }
    }

    /// Sup of `{t : f(t) < y}` where an elementary inverse exists.
    /// `None` means the sublevel set is all of `(0, inf)`.
    fn sublevel_sup(self, y: f64) -> Option<Option<f64>> {
        match self {
            Builtin::Ln => Some(Some(y.exp())),
            Builtin::NegReciprocal => Some((y < 0.0).then(|| -1.0 / y)),
            Builtin::NegInvSqrt => Some((y < 0.0).then(|| 1.0 / (y * y))),
            Builtin::LnPlusT => None,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

type EvalFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Kind {
    Builtin(Builtin),
    Custom(Arc<EvalFn>),
}

/// A member of the control class, immutable once constructed.
#[derive(Clone)]
pub struct FFunction {
    name: String,
    params: BTreeMap<String, f64>,
    kind: Kind,
}

impl fmt::Debug for FFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("builtin", &self.builtin())
            .finish()
    }
}

impl PartialEq for FFunction {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (Kind::Builtin(a), Kind::Builtin(b)) => a == b,
            (Kind::Custom(a), Kind::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl From<Builtin> for FFunction {
    fn from(b: Builtin) -> Self {
        FFunction {
            name: b.name().to_owned(),
            params: BTreeMap::new(),
            kind: Kind::Builtin(b),
        }
    }
}

impl FFunction {
    pub fn builtin(&self) -> Option<Builtin> {
        match self.kind {
            Kind::Builtin(b) => Some(b),
            Kind::Custom(_) => None,
        }
    }

    /// Registers a user-supplied function. Class membership is not assumed;
    /// run [`check_f1`] and [`delta_for`] to certify it numerically.
    pub fn custom<F>(name: impl Into<String>, params: BTreeMap<String, f64>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        FFunction {
            name: name.into(),
            params,
            kind: Kind::Custom(Arc::new(eval)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain {
                name: self.name.clone(),
                t,
            });
        }
        let v = match &self.kind {
            Kind::Builtin(b) => b.apply(t),
            Kind::Custom(f) => f(t),
        };
        // -inf is a legitimate limit value only at 0, which is excluded above.
        if v.is_nan() || (v.is_infinite() && t.is_finite()) {
            return Err(Error::NonFiniteValue {
                name: self.name.clone(),
                t,
            });
        }
        Ok(v)
    }

    /// Closed-form sublevel bound, if one exists for this function.
    pub fn closed_form_delta(&self, y: f64) -> Option<f64> {
        let sup = self.builtin()?.sublevel_sup(y)?;
        let delta = match sup {
            Some(s) if s > 0.0 => s.min(WORKING_RANGE.1).next_down(),
            // exp underflow: no representable closed form
            Some(_) => return None,
            None => WORKING_RANGE.1,
        };
        (delta > 0.0).then_some(delta)
    }
}

/// Returns `delta > 0` such that `f(t) < y` for every `t` in `(0, delta)`.
///
/// Uses the closed-form inverse when the function has one and falls back to
/// bisection otherwise. The result is capped at the top of the working range
/// when the sublevel set is unbounded.
pub fn delta_for(f: &FFunction, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::NonFiniteTarget(y));
    }
    match f.closed_form_delta(y) {
        Some(d) => Ok(d),
        None => delta_by_bisection(f, y),
    }
}

/// Sublevel bound by bracketing and bisection, ignoring any closed form.
///
/// The lower bracket starts at `1e-300` and is scaled up by 10 until `f` is
/// finite there; it must then satisfy `f(t_lo) < y`. The returned value is
/// always a point with `f(delta) < y`, so by monotonicity every smaller `t`
/// also qualifies.
pub fn delta_by_bisection(f: &FFunction, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::NonFiniteTarget(y));
    }
    let top = WORKING_RANGE.1;
    let bracket_failure = || Error::BracketFailure {
        name: f.name().to_owned(),
        y,
    };

    let mut lo = BRACKET_START;
    let f_lo = loop {
        match f.eval(lo) {
            Ok(v) => break v,
            Err(_) if lo < top => lo *= 10.0,
            Err(_) => return Err(bracket_failure()),
        }
    };
    if !(f_lo < y) {
        return Err(bracket_failure());
    }

    // Walk up by decades until f(hi) >= y.
    let mut hi = lo;
    loop {
        let next = (hi * 10.0).min(top);
        let v = f.eval(next)?;
        if v >= y {
            lo = hi;
            hi = next;
            break;
        }
        if next >= top {
            return Ok(top);
        }
        hi = next;
    }

    for _ in 0..BISECTION_MAX_ITERS {
        let mid = if hi / lo > 2.0 {
            lo * (hi / lo).sqrt()
        } else {
            lo + 0.5 * (hi - lo)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if f.eval(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Certifies monotonicity of `f` along an ascending grid of positive points.
pub fn check_f1(f: &FFunction, grid: &[f64]) -> Result<VerdictReport> {
    for (k, &t) in grid.iter().enumerate() {
        let ascending = k == 0 || grid[k - 1] < t;
        if !(t > 0.0) || !t.is_finite() || !ascending {
            return Err(Error::InvalidGrid(k));
        }
    }
    let mut report = VerdictReport::new("f1-nondecreasing", "0 < s < t implies f(s) <= f(t)")
        .with_tolerance("relative", F1_REL_TOL);
    report.fact("function", f.name());
    report.fact("grid_points", grid.len());

    let values = grid
        .iter()
        .map(|&t| f.eval(t))
        .collect::<Result<Vec<_>>>()?;
    for k in 1..grid.len() {
        let (fs, ft) = (values[k - 1], values[k]);
        let tol = F1_REL_TOL * fs.abs().max(ft.abs());
        if fs > ft + tol {
            report.violation(json!({
                "s": grid[k - 1], "t": grid[k], "f_s": fs, "f_t": ft,
            }));
        }
    }
    Ok(report)
}

/// `count` log-spaced points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect();
    grid.dedup();
    grid
}

/// The control pair `(f, alpha)` of an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlPair {
    f: FFunction,
    alpha: f64,
}

impl ControlPair {
    pub fn new(f: impl Into<FFunction>, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(ControlPair { f: f.into(), alpha })
    }

    pub fn f(&self) -> &FFunction {
        &self.f
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        ControlPair::new(self.f.clone(), alpha)
    }
}

/// Wire form of the function part of an instance file.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct FSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl FSpec {
    pub fn resolve(&self) -> Result<FFunction> {
        let b = Builtin::from_name(&self.name)?;
        if let Some(param) = self.params.keys().next() {
            return Err(Error::UnexpectedParam {
                name: self.name.clone(),
                param: param.clone(),
            });
        }
        Ok(b.into())
    }
}

impl From<&FFunction> for FSpec {
    fn from(f: &FFunction) -> Self {
        FSpec {
            name: f.name().to_owned(),
            params: f.params().clone(),
        }
    }
}
