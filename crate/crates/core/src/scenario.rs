//! Scenario files, configuration defaults, and experiment execution.
//!
//! Scenarios are line-oriented `key = value` documents with `#` comments.
//! Quadratic smooth parts are given as `(A, b)` with an optional drift
//! schedule that translates the minimizer along the all-ones direction;
//! the nonsmooth part per objective is one of `zero`, `l1:<lambda>`, or
//! `box:<lo>,<hi>`.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::engine::{run_online, EngineConfig, Trajectory};
use crate::error::{Error, Result};
use crate::metrics::{compile_report, RegretReport};
use crate::objective::{CompositeObjective, ObjectiveStream, ProxTerm, SmoothTerm};
use crate::oracles::{OptimumTrace, DEFAULT_ORACLE_TOL};

/// Drift schedule for a quadratic's minimizer: the offset `s(t)` applied
/// along the all-ones direction at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drift {
    None,
    /// `s(t) = rate * (t - 1)`.
    Linear {
        rate: f64,
    },
    /// `s(t) = amp * sin(2 pi (t - 1) / period)`.
    Sin {
        amp: f64,
        period: f64,
    },
    /// `s(t) = delta` for `t >= at`, else 0.
    Jump {
        at: usize,
        delta: f64,
    },
}

impl Drift {
    pub fn offset(&self, t: usize) -> f64 {
        match *self {
            Drift::None => 0.0,
            Drift::Linear { rate } => rate * (t - 1) as f64,
            Drift::Sin { amp, period } => {
                amp * (2.0 * std::f64::consts::PI * (t - 1) as f64 / period).sin()
            }
            Drift::Jump { at, delta } => {
                if t >= at {
                    delta
                } else {
                    0.0
                }
            }
        }
    }
}

/// Nonsmooth selection for one objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonsmoothSpec {
    Zero,
    L1 { lambda: f64 },
    Box { lo: f64, hi: f64 },
}

impl NonsmoothSpec {
    fn build(&self) -> ProxTerm {
        match *self {
            NonsmoothSpec::Zero => ProxTerm::zero(),
            NonsmoothSpec::L1 { lambda } => ProxTerm::l1(lambda),
            NonsmoothSpec::Box { lo, hi } => ProxTerm::box_indicator(lo, hi),
        }
    }
}

/// One objective's building blocks.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub drift: Drift,
    pub g: NonsmoothSpec,
    /// Explicit step size; `None` means the default `1/L`.
    pub step: Option<f64>,
}

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub name: String,
    pub dim: usize,
    pub num_objectives: usize,
    pub horizon: usize,
    pub inner_iters: usize,
    pub alphas: Vec<f64>,
    pub x1: DVector<f64>,
    /// Reserved for randomized drift perturbations; current schedules are
    /// deterministic, so the seed only pins future extensions.
    pub seed: u64,
    pub objectives: Vec<ObjectiveSpec>,
}

fn parse_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

/// Raw `key = value` pairs with their line numbers, comments stripped.
fn parse_raw(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, line, "expected `key = value`"))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(parse_err(line_no, &key, "empty key"));
        }
        if !seen.insert(key.clone()) {
            return Err(parse_err(line_no, &key, "duplicate key"));
        }
        pairs.push((line_no, key, value));
    }
    Ok(pairs)
}

struct DocReader {
    pairs: Vec<(usize, String, String)>,
    consumed: BTreeSet<String>,
}

impl DocReader {
    fn get(&mut self, key: &str) -> Option<(usize, String)> {
        let found = self
            .pairs
            .iter()
            .find(|(_, k, _)| k == key)
            .map(|(l, _, v)| (*l, v.clone()));
        if found.is_some() {
            self.consumed.insert(key.to_string());
        }
        found
    }

    fn require(&mut self, key: &str) -> Result<(usize, String)> {
        self.get(key)
            .ok_or_else(|| parse_err(0, key, "missing required key"))
    }

    fn unknown_keys(&self) -> Vec<(usize, String)> {
        self.pairs
            .iter()
            .filter(|(_, k, _)| !self.consumed.contains(k))
            .map(|(l, k, _)| (*l, k.clone()))
            .collect()
    }
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| parse_err(line, key, format!("not a nonnegative integer: `{value}`")))
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| parse_err(line, key, format!("not a number: `{value}`")))
}

fn parse_f64_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_f64(line, key, v.trim()))
        .collect()
}

fn parse_drift(line: usize, key: &str, value: &str) -> Result<Drift> {
    if value == "none" {
        return Ok(Drift::None);
    }
    let (kind, args) = value
        .split_once(':')
        .ok_or_else(|| parse_err(line, key, format!("unknown drift `{value}`")))?;
    let nums = parse_f64_list(line, key, args)?;
    match (kind, nums.as_slice()) {
        ("linear", [rate]) => Ok(Drift::Linear { rate: *rate }),
        ("sin", [amp, period]) if *period > 0.0 => Ok(Drift::Sin {
            amp: *amp,
            period: *period,
        }),
        ("sin", _) => Err(parse_err(
            line,
            key,
            "sin drift needs `sin:<amp>,<period>` with period > 0",
        )),
        ("jump", [at, delta]) if *at >= 1.0 && at.fract() == 0.0 => Ok(Drift::Jump {
            at: *at as usize,
            delta: *delta,
        }),
        ("jump", _) => Err(parse_err(
            line,
            key,
            "jump drift needs `jump:<t>,<delta>` with integer t >= 1",
        )),
        _ => Err(parse_err(line, key, format!("unknown drift `{value}`"))),
    }
}

fn parse_nonsmooth(line: usize, key: &str, value: &str) -> Result<NonsmoothSpec> {
    if value == "zero" {
        return Ok(NonsmoothSpec::Zero);
    }
    let (kind, args) = value
        .split_once(':')
        .ok_or_else(|| parse_err(line, key, format!("unknown nonsmooth term `{value}`")))?;
    let nums = parse_f64_list(line, key, args)?;
    match (kind, nums.as_slice()) {
        ("l1", [lambda]) if *lambda >= 0.0 => Ok(NonsmoothSpec::L1 { lambda: *lambda }),
        ("l1", _) => Err(parse_err(
            line,
            key,
            "l1 needs `l1:<lambda>` with lambda >= 0",
        )),
        ("box", [lo, hi]) if lo <= hi => Ok(NonsmoothSpec::Box { lo: *lo, hi: *hi }),
        ("box", _) => Err(parse_err(
            line,
            key,
            "box needs `box:<lo>,<hi>` with lo <= hi",
        )),
        _ => Err(parse_err(
            line,
            key,
            format!("unknown nonsmooth term `{value}`"),
        )),
    }
}

fn build_spec(pairs: Vec<(usize, String, String)>) -> Result<ScenarioSpec> {
    let mut doc = DocReader {
        pairs,
        consumed: BTreeSet::new(),
    };
    let (_, name) = doc.require("name")?;
    let (l, v) = doc.require("n")?;
    let dim = parse_usize(l, "n", &v)?;
    let (l, v) = doc.require("N")?;
    let num_objectives = parse_usize(l, "N", &v)?;
    let (l, v) = doc.require("T")?;
    let horizon = parse_usize(l, "T", &v)?;
    let (l, v) = doc.require("K")?;
    let inner_iters = parse_usize(l, "K", &v)?;
    for (key, val) in [
        ("n", dim),
        ("N", num_objectives),
        ("T", horizon),
        ("K", inner_iters),
    ] {
        if val == 0 {
            return Err(parse_err(0, key, "must be a positive integer"));
        }
    }
    let alphas = match doc.get("alphas") {
        Some((l, v)) => {
            let a = parse_f64_list(l, "alphas", &v)?;
            if a.len() != num_objectives {
                return Err(parse_err(
                    l,
                    "alphas",
                    format!("expected {num_objectives} weights"),
                ));
            }
            let sum: f64 = a.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(parse_err(l, "alphas", "weights must sum to 1"));
            }
            for w in &a {
                if !(0.0..=1.0).contains(w) {
                    return Err(parse_err(l, "alphas", format!("weight {w} outside [0, 1]")));
                }
            }
            a
        }
        None => vec![1.0 / num_objectives as f64; num_objectives],
    };
    let x1 = match doc.get("x1") {
        Some((l, v)) => {
            let coords = parse_f64_list(l, "x1", &v)?;
            if coords.len() != dim {
                return Err(parse_err(l, "x1", format!("expected {dim} coordinates")));
            }
            DVector::from_vec(coords)
        }
        None => DVector::zeros(dim),
    };
    let seed = match doc.get("seed") {
        Some((l, v)) => parse_usize(l, "seed", &v)? as u64,
        None => 0,
    };
    let mut objectives = Vec::with_capacity(num_objectives);
    for i in 1..=num_objectives {
        let a_key = format!("objective.{i}.quadratic.A");
        let (l, v) = doc.require(&a_key)?;
        let entries = parse_f64_list(l, &a_key, &v)?;
        if entries.len() != dim * dim {
            return Err(parse_err(
                l,
                &a_key,
                format!("expected {} entries (row-major {dim}x{dim})", dim * dim),
            ));
        }
        let a = DMatrix::from_row_slice(dim, dim, &entries);
        let b_key = format!("objective.{i}.quadratic.b");
        let b = match doc.get(&b_key) {
            Some((l, v)) => {
                let coords = parse_f64_list(l, &b_key, &v)?;
                if coords.len() != dim {
                    return Err(parse_err(l, &b_key, format!("expected {dim} coordinates")));
                }
                DVector::from_vec(coords)
            }
            None => DVector::zeros(dim),
        };
        let drift_key = format!("objective.{i}.drift");
        let drift = match doc.get(&drift_key) {
            Some((l, v)) => parse_drift(l, &drift_key, &v)?,
            None => Drift::None,
        };
        let g_key = format!("objective.{i}.g");
        let g = match doc.get(&g_key) {
            Some((l, v)) => parse_nonsmooth(l, &g_key, &v)?,
            None => NonsmoothSpec::Zero,
        };
        let step_key = format!("objective.{i}.step");
        let step = match doc.get(&step_key) {
            Some((l, v)) => {
                let s = parse_f64(l, &step_key, &v)?;
                if s <= 0.0 {
                    return Err(parse_err(l, &step_key, "step must be > 0"));
                }
                Some(s)
            }
            None => None,
        };
        objectives.push(ObjectiveSpec {
            a,
            b,
            drift,
            g,
            step,
        });
    }
    if let Some((l, k)) = doc.unknown_keys().first() {
        return Err(parse_err(*l, k, "unknown key"));
    }
    Ok(ScenarioSpec {
        name,
        dim,
        num_objectives,
        horizon,
        inner_iters,
        alphas,
        x1,
        seed,
        objectives,
    })
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    build_spec(parse_raw(text)?)
}

/// Parse with `key=value` overrides replacing (or adding) entries before
/// validation, mirroring the CLI's `--override` flag.
pub fn parse_scenario_with_overrides(
    text: &str,
    overrides: &[(String, String)],
) -> Result<ScenarioSpec> {
    let mut pairs = parse_raw(text)?;
    for (key, value) in overrides {
        match pairs.iter_mut().find(|(_, k, _)| k == key) {
            Some(entry) => entry.2 = value.clone(),
            None => pairs.push((0, key.clone(), value.clone())),
        }
    }
    build_spec(pairs)
}

impl ScenarioSpec {
    /// Materialize the time-indexed objective family. Drift translates the
    /// quadratic's minimizer by `s(t)` along the all-ones direction, i.e.
    /// `b_{i,t} = b_i - s_i(t) * (A_i 1)`.
    pub fn build_stream(&self) -> Result<ObjectiveStream> {
        let ones = DVector::from_element(self.dim, 1.0);
        let mut slices = Vec::with_capacity(self.horizon);
        for t in 1..=self.horizon {
            let mut slice = Vec::with_capacity(self.num_objectives);
            for obj in &self.objectives {
                let shift = obj.drift.offset(t);
                let b_t = &obj.b - (&obj.a * &ones) * shift;
                let smooth = SmoothTerm::quadratic(obj.a.clone(), b_t)?;
                slice.push(CompositeObjective::new(smooth, obj.g.build()));
            }
            slices.push(slice);
        }
        Ok(ObjectiveStream::from_slices(self.dim, slices))
    }

    /// Engine configuration with defaults resolved against the stream:
    /// omitted step sizes become `1/max_t L_{f_{i,t}}`, the largest step
    /// the algorithm admits.
    pub fn engine_config(&self, stream: &ObjectiveStream) -> Result<EngineConfig> {
        let mut steps = Vec::with_capacity(self.num_objectives);
        for (i, obj) in self.objectives.iter().enumerate() {
            match obj.step {
                Some(s) => steps.push(s),
                None => {
                    let max_l = (1..=self.horizon)
                        .map(|t| stream.at(t)[i].smooth.lipschitz())
                        .fold(0.0f64, f64::max);
                    steps.push(if max_l > 0.0 { 1.0 / max_l } else { 1.0 });
                }
            }
        }
        let config = EngineConfig::new(self.alphas.clone(), steps, self.inner_iters, self.horizon)?;
        config.validate_against(stream)?;
        Ok(config)
    }
}

/// Knobs for one experiment run.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentOptions {
    /// Record inner iterates and candidates (needed for the inner-iterate
    /// lemma verdicts).
    pub record_inner: bool,
    /// Oracle residual tolerance.
    pub oracle_tol: f64,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            record_inner: false,
            oracle_tol: DEFAULT_ORACLE_TOL,
        }
    }
}

/// A completed experiment: the run, its oracles, and the compiled report.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub stream: ObjectiveStream,
    pub config: EngineConfig,
    pub trajectory: Trajectory,
    pub trace: OptimumTrace,
    pub report: RegretReport,
}

/// Execute a scenario end to end: run the engine with a metrics observer,
/// solve all oracles, and evaluate every bound checker. Deterministic given
/// the spec.
pub fn run_experiment(spec: &ScenarioSpec, options: &ExperimentOptions) -> Result<Experiment> {
    let stream = spec.build_stream()?;
    let config = spec.engine_config(&stream)?;
    let mut observed_steps = 0usize;
    let trajectory = run_online(&stream, &spec.x1, &config, options.record_inner, |ev| {
        debug_assert_eq!(ev.t, observed_steps + 1);
        observed_steps += 1;
    })?;
    debug_assert_eq!(observed_steps, spec.horizon);
    let trace = OptimumTrace::solve(&stream, spec.horizon, options.oracle_tol)?;
    let report = compile_report(
        &spec.name,
        &stream,
        &trajectory,
        &trace,
        &config,
        options.oracle_tol,
    )?;
    Ok(Experiment {
        stream,
        config,
        trajectory,
        trace,
        report,
    })
}
