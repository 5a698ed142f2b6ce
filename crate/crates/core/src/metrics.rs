//! Regret and path-length quantities, plus numeric evaluation of both sides
//! of every stated bound.
//!
//! Checkers never assume a bound holds: each one evaluates `lhs` and `rhs`
//! and records a verdict with slack. Inequalities get the additive slack
//! `1e-9 * (1 + |lhs| + |rhs|)` so floating-point noise at desk scale cannot
//! flip an honest verdict either way.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{EngineConfig, Trajectory};
use crate::error::{Error, Result};
use crate::objective::{
    prox_grad_map, subdiff_distance, CompositeObjective, ObjectiveStream, ProxTerm, SmoothTerm,
};
use crate::oracles::{static_optimum, OptimumTrace};

/// Whether a checked inequality held, failed, or could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Satisfied,
    Violated,
    Skipped,
}

/// One evaluated inequality: `lhs <= rhs` up to the slack rule.
#[derive(Debug, Clone, Copy)]
pub struct Verdict {
    pub lhs: f64,
    pub rhs: f64,
    pub status: VerdictStatus,
    /// `rhs - lhs`; positive means margin, negative means violation.
    pub slack: f64,
}

impl Verdict {
    /// Evaluate `lhs <= rhs` with slack `1e-9 * (1 + |lhs| + |rhs|)`.
    /// Infinities are handled exactly; NaN on either side is a violation.
    pub fn check(lhs: f64, rhs: f64) -> Verdict {
        let slack = rhs - lhs;
        let status = if lhs.is_nan() || rhs.is_nan() {
            VerdictStatus::Violated
        } else if rhs == f64::INFINITY || lhs == f64::NEG_INFINITY {
            VerdictStatus::Satisfied
        } else if lhs == f64::INFINITY {
            VerdictStatus::Violated
        } else if lhs <= rhs + 1e-9 * (1.0 + lhs.abs() + rhs.abs()) {
            VerdictStatus::Satisfied
        } else {
            VerdictStatus::Violated
        };
        Verdict {
            lhs,
            rhs,
            status,
            slack,
        }
    }

    pub fn skipped() -> Verdict {
        Verdict {
            lhs: f64::NAN,
            rhs: f64::NAN,
            status: VerdictStatus::Skipped,
            slack: f64::NAN,
        }
    }

    pub fn satisfied(&self) -> bool {
        self.status == VerdictStatus::Satisfied
    }
}

/// The tightest verdict of a sequence: minimum slack, preferring violated
/// members. An empty sequence aggregates to skipped.
pub fn worst_verdict<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Verdict {
    let mut worst: Option<Verdict> = None;
    for v in verdicts {
        let replace = match &worst {
            None => true,
            Some(w) => {
                let vs = if v.slack.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    v.slack
                };
                let ws = if w.slack.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    w.slack
                };
                (v.status == VerdictStatus::Violated && w.status != VerdictStatus::Violated)
                    || (v.status == w.status && vs < ws)
            }
        };
        if replace {
            worst = Some(*v);
        }
    }
    worst.unwrap_or_else(Verdict::skipped)
}

/// Cumulative path lengths: iterate movement `v_t`, optimum movement `w_t`,
/// and the subdifferential-distance sum `sigma_t`.
#[derive(Debug, Clone)]
pub struct PathLengths {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub sigma: Vec<f64>,
    /// True when any sigma term fell back to the gradient-mapping surrogate.
    pub sigma_surrogate: bool,
}

fn check_horizons(traj: &Trajectory, trace: &OptimumTrace) -> Result<usize> {
    let horizon = traj.horizon();
    if trace.horizon() != horizon {
        return Err(Error::HorizonMismatch {
            expected: horizon,
            actual: trace.horizon(),
        });
    }
    Ok(horizon)
}

/// Dynamic regret of objective `i` (0-based):
/// `sum_t phi_{i,t}(x^t) - phi_{i,t}(x^{opt,t,i})`.
pub fn dynamic_regret(
    traj: &Trajectory,
    trace: &OptimumTrace,
    stream: &ObjectiveStream,
    i: usize,
) -> Result<f64> {
    let horizon = check_horizons(traj, trace)?;
    if stream.horizon() < horizon {
        return Err(Error::HorizonMismatch {
            expected: horizon,
            actual: stream.horizon(),
        });
    }
    let mut sum = 0.0;
    for t in 1..=horizon {
        let phi = stream.at(t)[i].value(traj.x(t)).to_f64();
        sum += phi - trace.entry(t, i).value;
    }
    Ok(sum)
}

/// Static regret of objective `i`: the same cumulative cost measured against
/// the best fixed decision in hindsight.
pub fn static_regret(
    traj: &Trajectory,
    stream: &ObjectiveStream,
    i: usize,
    tol: f64,
) -> Result<f64> {
    let horizon = traj.horizon();
    if stream.horizon() != horizon {
        return Err(Error::HorizonMismatch {
            expected: horizon,
            actual: stream.horizon(),
        });
    }
    let x_static = static_optimum(stream, i, tol)?;
    let mut sum = 0.0;
    for t in 1..=horizon {
        let phi_run = stream.at(t)[i].value(traj.x(t)).to_f64();
        let phi_best = stream.at(t)[i].value(&x_static).to_f64();
        sum += phi_run - phi_best;
    }
    Ok(sum)
}

/// Exact cumulative sums of the three path quantities.
///
/// `w_t` sums consecutive optimum displacements up to the horizon; the last
/// available pair is `(T-1, T)`. `sigma` uses exact subdifferential
/// distances where the prox family has a closed form and flags the
/// surrogate otherwise; iterates outside a domain contribute an exact
/// `+inf`.
pub fn path_lengths(
    traj: &Trajectory,
    trace: &OptimumTrace,
    stream: &ObjectiveStream,
) -> Result<PathLengths> {
    let horizon = check_horizons(traj, trace)?;
    let num_obj = stream.num_objectives();
    let mut v = Vec::with_capacity(horizon);
    let mut w = Vec::with_capacity(horizon);
    let mut sigma = Vec::with_capacity(horizon);
    let mut surrogate = false;
    let mut v_acc = 0.0;
    let mut w_acc = 0.0;
    let mut s_acc = 0.0;
    for t in 1..=horizon {
        v_acc += (traj.x(t + 1) - traj.x(t)).norm();
        v.push(v_acc);
        if t < horizon {
            let step = (0..num_obj)
                .map(|i| (&trace.entry(t + 1, i).point - &trace.entry(t, i).point).norm())
                .fold(0.0f64, f64::max);
            w_acc += step;
        }
        w.push(w_acc);
        for i in 0..num_obj {
            match subdiff_distance(&stream.at(t)[i], traj.x(t)) {
                Ok(d) => {
                    surrogate |= d.is_surrogate();
                    s_acc += d.value();
                }
                Err(Error::OutsideDomain) => s_acc = f64::INFINITY,
                Err(e) => return Err(e),
            }
        }
        sigma.push(s_acc);
    }
    Ok(PathLengths {
        v,
        w,
        sigma,
        sigma_surrogate: surrogate,
    })
}

/// The Slow Changes constant: largest per-step variation of any `f` or `g`
/// value along the trajectory. Infinite `g` values at iterates surface as
/// an infinite drift, i.e. a violated assumption.
pub fn drift_bound(traj: &Trajectory, stream: &ObjectiveStream) -> Result<f64> {
    let horizon = traj.horizon();
    if stream.horizon() < horizon {
        return Err(Error::HorizonMismatch {
            expected: horizon,
            actual: stream.horizon(),
        });
    }
    let mut e = 0.0f64;
    for t in 1..=horizon {
        for obj in stream.at(t) {
            let df = (obj.smooth.value(traj.x(t + 1)) - obj.smooth.value(traj.x(t))).abs();
            let g_next = obj.nonsmooth.value(traj.x(t + 1));
            let g_cur = obj.nonsmooth.value(traj.x(t));
            let dg = match (g_next.finite(), g_cur.finite()) {
                (Some(a), Some(b)) => (a - b).abs(),
                _ => f64::INFINITY,
            };
            e = e.max(df).max(dg);
        }
    }
    Ok(e)
}

/// Both sides of the descent lemma at one triple `(x, y, c)`:
/// `phi(T(x)) - phi(y) <= (1/2c) [||x - y||^2 - ||T(x) - y||^2]`.
pub fn check_lemma1(
    obj: &CompositeObjective,
    x: &DVector<f64>,
    y: &DVector<f64>,
    c: f64,
) -> Result<Verdict> {
    let step = prox_grad_map(obj, x, c)?;
    let lhs = obj.value(&step.point).sub_to_f64(obj.value(y));
    let rhs = ((x - y).norm_squared() - (&step.point - y).norm_squared()) / (2.0 * c);
    Ok(Verdict::check(lhs, rhs))
}

/// Verdict sequences for the three parts of the technical lemma.
#[derive(Debug, Clone)]
pub struct Lemma2Verdicts {
    /// Per `t`: `||x^{t+1} - x^t|| <= K sigma_t`.
    pub a: Vec<Verdict>,
    /// Per `(t, i)`: `||x^{t+1} - x^{opt,t,i}|| <= 2 v_t + w_t + ||x^1 - x^{opt,1,i}||`.
    pub b: Vec<Vec<Verdict>>,
    /// Per `(t, i)`: the inner-iterate variant; `None` without inner records.
    pub c: Option<Vec<Vec<Verdict>>>,
}

pub fn check_lemma2(
    traj: &Trajectory,
    trace: &OptimumTrace,
    k: usize,
    path: &PathLengths,
) -> Result<Lemma2Verdicts> {
    let horizon = check_horizons(traj, trace)?;
    let num_obj = trace.num_objectives();
    let mut a = Vec::with_capacity(horizon);
    let mut b = Vec::with_capacity(horizon);
    let mut c = traj.inner.as_ref().map(|_| Vec::with_capacity(horizon));
    for t in 1..=horizon {
        let lhs_a = (traj.x(t + 1) - traj.x(t)).norm();
        a.push(Verdict::check(lhs_a, k as f64 * path.sigma[t - 1]));
        let mut row_b = Vec::with_capacity(num_obj);
        let mut row_c = Vec::with_capacity(num_obj);
        for i in 0..num_obj {
            let d1 = (traj.x(1) - &trace.entry(1, i).point).norm();
            let lhs_b = (traj.x(t + 1) - &trace.entry(t, i).point).norm();
            let rhs_b = 2.0 * path.v[t - 1] + path.w[t - 1] + d1;
            row_b.push(Verdict::check(lhs_b, rhs_b));
            if let Some(records) = &traj.inner {
                let x_tk = &records[t - 1].iterates[k];
                let lhs_c = (x_tk - &trace.entry(t, i).point).norm();
                let rhs_c = rhs_b + k as f64 * path.sigma[t - 1];
                row_c.push(Verdict::check(lhs_c, rhs_c));
            }
        }
        b.push(row_b);
        if let Some(cs) = c.as_mut() {
            cs.push(row_c);
        }
    }
    Ok(Lemma2Verdicts { a, b, c })
}

/// Per-objective verdicts for the main regret bound, in both of its
/// forms: the statement's `v_T` and the derivation's `2 v_T`.
#[derive(Debug, Clone)]
pub struct Theorem1Verdicts {
    pub stated: Vec<Verdict>,
    pub proof_variant: Vec<Verdict>,
}

/// The squared weight factor shared by the theorem and the proposition:
/// `(sum_i ||x^1 - x^{opt,1,i}|| / (2 alpha C_i))^2`.
fn theorem_weight_factor(config: &EngineConfig, x1: &DVector<f64>, trace: &OptimumTrace) -> f64 {
    let alpha = config.alpha_min();
    let mut sum = 0.0;
    for (i, &c_i) in config.steps.iter().enumerate() {
        sum += (x1 - &trace.entry(1, i).point).norm() / (2.0 * alpha * c_i);
    }
    sum * sum
}

pub fn check_theorem1(
    regrets: &[f64],
    path: &PathLengths,
    config: &EngineConfig,
    x1: &DVector<f64>,
    trace: &OptimumTrace,
) -> Result<Theorem1Verdicts> {
    if config.one_hot().is_some() {
        return Err(Error::WeightCase(
            "weights are one-hot: the theorem does not apply, use the corollary checker".into(),
        ));
    }
    let horizon = path.v.len();
    let k = config.inner_iters as f64;
    let (v_t, w_t, s_t) = (
        path.v[horizon - 1],
        path.w[horizon - 1],
        path.sigma[horizon - 1],
    );
    let factor = theorem_weight_factor(config, x1, trace);
    let rhs_stated = (v_t + w_t + k * s_t).powi(2) * factor;
    let rhs_proof = (2.0 * v_t + w_t + k * s_t).powi(2) * factor;
    Ok(Theorem1Verdicts {
        stated: regrets
            .iter()
            .map(|&r| Verdict::check(r, rhs_stated))
            .collect(),
        proof_variant: regrets
            .iter()
            .map(|&r| Verdict::check(r, rhs_proof))
            .collect(),
    })
}

/// The four single-objective bounds: the two corollary bounds plus the
/// displayed `C/(T(K+1))` pair that follows them (reported, never assumed).
#[derive(Debug, Clone)]
pub struct CorollaryVerdicts {
    /// `sum_t phi(x^{t+1}) - phi(x^{opt,t,i}) <= C/(K+1) ||x^1 - x^{opt,1,i}||^2`.
    pub first: Verdict,
    /// The `x^t`-indexed sum against `T e + C/(K+1) ||x^1 - x^{opt,1,i}||^2`.
    pub second: Verdict,
    /// Per-t `phi(x^{t+1})` gap against `C/(T(K+1)) ||x^1 - x^{opt,1,i}||`
    /// (unsquared, as displayed); the worst instance.
    pub box_first: Verdict,
    /// Final-time gap against `e + C/(T(K+1)) ||x^1 - x^{opt,1,i}||`.
    pub box_second: Verdict,
}

pub fn check_corollary(
    traj: &Trajectory,
    trace: &OptimumTrace,
    stream: &ObjectiveStream,
    config: &EngineConfig,
    drift: f64,
) -> Result<CorollaryVerdicts> {
    let i = config
        .one_hot()
        .ok_or_else(|| Error::WeightCase("the corollary requires one-hot weights".into()))?;
    let horizon = check_horizons(traj, trace)?;
    let c_max = config
        .steps
        .iter()
        .map(|&c| 1.0 / c)
        .fold(f64::NEG_INFINITY, f64::max);
    let k = config.inner_iters as f64;
    let d1 = (traj.x(1) - &trace.entry(1, i).point).norm();
    let mut sum_next = 0.0;
    let mut sum_cur = 0.0;
    let mut box_first = Vec::with_capacity(horizon);
    let box_rhs = c_max / (horizon as f64 * (k + 1.0)) * d1;
    for t in 1..=horizon {
        let opt_val = trace.entry(t, i).value;
        let gap_next = stream.at(t)[i].value(traj.x(t + 1)).to_f64() - opt_val;
        let gap_cur = stream.at(t)[i].value(traj.x(t)).to_f64() - opt_val;
        sum_next += gap_next;
        sum_cur += gap_cur;
        box_first.push(Verdict::check(gap_next, box_rhs));
    }
    let final_gap =
        stream.at(horizon)[i].value(traj.x(horizon)).to_f64() - trace.entry(horizon, i).value;
    Ok(CorollaryVerdicts {
        first: Verdict::check(sum_next, c_max / (k + 1.0) * d1 * d1),
        second: Verdict::check(
            sum_cur,
            horizon as f64 * drift + c_max / (k + 1.0) * d1 * d1,
        ),
        box_first: worst_verdict(&box_first),
        box_second: Verdict::check(final_gap, drift + box_rhs),
    })
}

/// Per `(t, i)` verdicts for the gradient-gap proposition:
/// `||grad f_{i,t}(x^t) - grad f_{i,t}(x^{opt,t,i})||^2 <= 2 L * (theorem rhs core)`.
pub fn check_proposition(
    traj: &Trajectory,
    trace: &OptimumTrace,
    stream: &ObjectiveStream,
    path: &PathLengths,
    config: &EngineConfig,
) -> Result<Vec<Vec<Verdict>>> {
    let horizon = check_horizons(traj, trace)?;
    let num_obj = trace.num_objectives();
    let mut max_l = 0.0f64;
    for t in 1..=horizon {
        for obj in stream.at(t) {
            max_l = max_l.max(obj.smooth.lipschitz());
        }
    }
    let k = config.inner_iters as f64;
    let (v_t, w_t, s_t) = (
        path.v[horizon - 1],
        path.w[horizon - 1],
        path.sigma[horizon - 1],
    );
    let core = (v_t + w_t + k * s_t).powi(2) * theorem_weight_factor(config, traj.x(1), trace);
    let rhs = 2.0 * max_l * core;
    let mut verdicts = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let mut row = Vec::with_capacity(num_obj);
        for i in 0..num_obj {
            let g_run = stream.at(t)[i].smooth.gradient(traj.x(t));
            let g_opt = stream.at(t)[i].smooth.gradient(&trace.entry(t, i).point);
            row.push(Verdict::check((g_run - g_opt).norm_squared(), rhs));
        }
        verdicts.push(row);
    }
    Ok(verdicts)
}

/// Per-time trace of the minimum composite `phi_t` and the combined optimum
/// `x^{opt,t} = sum_i alpha_i x^{opt,t,i}`.
///
/// Both sides of the claimed identity
/// `min sum alpha_i phi_{i,t}(x_i) = phi_t(x^{opt,t})` are exposed and never
/// asserted equal: `weighted_opt_value` is the attained left side
/// `sum_i alpha_i phi_{i,t}(x^{opt,t,i})`, `phi_at_combined` the right side.
#[derive(Debug, Clone)]
pub struct MinCompositeTrace {
    pub phi_at_xt: Vec<f64>,
    pub x_opt_combined: Vec<DVector<f64>>,
    pub phi_at_combined: Vec<f64>,
    pub weighted_opt_value: Vec<f64>,
}

pub fn min_composite_trace(
    traj: &Trajectory,
    stream: &ObjectiveStream,
    alphas: &[f64],
    trace: &OptimumTrace,
) -> Result<MinCompositeTrace> {
    let horizon = check_horizons(traj, trace)?;
    let num_obj = trace.num_objectives();
    let mut phi_at_xt = Vec::with_capacity(horizon);
    let mut x_opt_combined = Vec::with_capacity(horizon);
    let mut phi_at_combined = Vec::with_capacity(horizon);
    let mut weighted_opt_value = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let min_at = |x: &DVector<f64>| {
            (0..num_obj)
                .map(|i| stream.at(t)[i].value(x).to_f64())
                .fold(f64::INFINITY, f64::min)
        };
        phi_at_xt.push(min_at(traj.x(t)));
        let mut combined = DVector::zeros(stream.dim());
        let mut weighted = 0.0;
        for (i, &a) in alphas.iter().enumerate() {
            combined += a * &trace.entry(t, i).point;
            weighted += a * trace.entry(t, i).value;
        }
        phi_at_combined.push(min_at(&combined));
        x_opt_combined.push(combined);
        weighted_opt_value.push(weighted);
    }
    Ok(MinCompositeTrace {
        phi_at_xt,
        x_opt_combined,
        phi_at_combined,
        weighted_opt_value,
    })
}

/// Inner-displacement pairs `(t, k)` where `||x^{t,k+1} - x^{t,k}||`
/// increased. The contraction claim is recorded, not assumed; callers
/// report these rather than assert emptiness.
pub fn inner_contraction_violations(traj: &Trajectory) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if let Some(records) = &traj.inner {
        for (idx, record) in records.iter().enumerate() {
            let d = record.displacements();
            for k in 1..d.len() {
                if d[k] > d[k - 1] + 1e-12 * (1.0 + d[k - 1]) {
                    out.push((idx + 1, k));
                }
            }
        }
    }
    out
}

/// Candidate triples `(t, k, i)` where `phi_{i,t}(y^{t,k+1,i})` exceeded
/// `phi_{i,t}(x^{t,k})`, violating the descent half of the lemma. Expected
/// empty for admissible steps.
pub fn candidate_descent_violations(
    traj: &Trajectory,
    stream: &ObjectiveStream,
) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    if let Some(records) = &traj.inner {
        for (idx, record) in records.iter().enumerate() {
            let t = idx + 1;
            for (k, cands) in record.candidates.iter().enumerate() {
                let x_tk = &record.iterates[k];
                for (i, y) in cands.iter().enumerate() {
                    let before = stream.at(t)[i].value(x_tk);
                    let after = stream.at(t)[i].value(y);
                    if after.sub_to_f64(before) > 1e-12 * (1.0 + before.to_f64().abs()) {
                        out.push((t, k, i));
                    }
                }
            }
        }
    }
    out
}

/// Canonical names of every per-run bound checker, in summary order.
pub const BOUND_NAMES: [&str; 10] = [
    "lemma2a",
    "lemma2b",
    "lemma2c",
    "thm1_stated",
    "thm1_proof_variant",
    "cor1",
    "cor2",
    "cor_box1",
    "cor_box2",
    "prop",
];

/// Aggregated summary line for one bound checker.
#[derive(Debug, Clone)]
pub struct BoundSummary {
    pub name: &'static str,
    pub verdict: Verdict,
    /// True when this bound's rhs involves sigma and any sigma term was a
    /// surrogate, so the verdict is surrogate-based rather than exact.
    pub surrogate_sigma: bool,
}

/// One `(t, i)` line of the per-step trace.
#[derive(Debug, Clone, Copy)]
pub struct StepRow {
    /// Time step, 1-based.
    pub t: usize,
    /// Objective index, 1-based to match scenario files.
    pub i: usize,
    pub phi_xt: f64,
    pub phi_opt: f64,
    pub gap: f64,
    /// Cumulative per-objective regret through `t`.
    pub reg_cum: f64,
}

/// Everything a completed run reports: regrets, path quantities, drift, the
/// per-step trace, and one verdict per implemented bound.
#[derive(Debug, Clone)]
pub struct RegretReport {
    pub scenario: String,
    pub horizon: usize,
    pub num_objectives: usize,
    pub alphas: Vec<f64>,
    pub dynamic_regret: Vec<f64>,
    /// NaN with a note when the static problem is unsupported.
    pub static_regret: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub sigma: Vec<f64>,
    pub sigma_surrogate: bool,
    /// Slow Changes constant `e` measured along the run.
    pub drift: f64,
    pub alpha_min: f64,
    /// Largest gradient Lipschitz constant across `(i, t)`.
    pub max_lipschitz: f64,
    pub rows: Vec<StepRow>,
    pub composite: MinCompositeTrace,
    /// One entry per name in [`BOUND_NAMES`], in that order.
    pub bounds: Vec<BoundSummary>,
    pub lemma2: Lemma2Verdicts,
    pub theorem1: Option<Theorem1Verdicts>,
    pub corollary: Option<CorollaryVerdicts>,
    pub proposition: Vec<Vec<Verdict>>,
    pub notes: Vec<String>,
}

impl RegretReport {
    pub fn bound(&self, name: &str) -> &BoundSummary {
        self.bounds
            .iter()
            .find(|b| b.name == name)
            .unwrap_or_else(|| panic!("unknown bound name {name}"))
    }
}

/// Compute every metric and bound verdict for a completed run.
pub fn compile_report(
    scenario: &str,
    stream: &ObjectiveStream,
    traj: &Trajectory,
    trace: &OptimumTrace,
    config: &EngineConfig,
    oracle_tol: f64,
) -> Result<RegretReport> {
    let horizon = check_horizons(traj, trace)?;
    let num_obj = stream.num_objectives();
    let path = path_lengths(traj, trace, stream)?;
    let drift = drift_bound(traj, stream)?;
    let mut notes = Vec::new();
    if !drift.is_finite() {
        notes.push("assumption violated: infinite objective variation along the run".into());
    }
    let mut dynamic = Vec::with_capacity(num_obj);
    for i in 0..num_obj {
        dynamic.push(dynamic_regret(traj, trace, stream, i)?);
    }
    let mut static_reg = Vec::with_capacity(num_obj);
    for i in 0..num_obj {
        match static_regret(traj, stream, i, oracle_tol) {
            Ok(r) => static_reg.push(r),
            Err(Error::UnsupportedScenario(msg)) => {
                static_reg.push(f64::NAN);
                notes.push(format!(
                    "static regret unsupported for objective {}: {msg}",
                    i + 1
                ));
            }
            Err(e) => return Err(e),
        }
    }
    let lemma2 = check_lemma2(traj, trace, config.inner_iters, &path)?;
    let (theorem1, corollary) = if config.one_hot().is_some() {
        (
            None,
            Some(check_corollary(traj, trace, stream, config, drift)?),
        )
    } else {
        (
            Some(check_theorem1(&dynamic, &path, config, traj.x(1), trace)?),
            None,
        )
    };
    let proposition = check_proposition(traj, trace, stream, &path, config)?;
    let composite = min_composite_trace(traj, stream, &config.alphas, trace)?;
    let mut rows = Vec::with_capacity(horizon * num_obj);
    let mut reg_cum = vec![0.0; num_obj];
    for t in 1..=horizon {
        for (i, cum) in reg_cum.iter_mut().enumerate() {
            let phi_xt = stream.at(t)[i].value(traj.x(t)).to_f64();
            let phi_opt = trace.entry(t, i).value;
            let gap = phi_xt - phi_opt;
            *cum += gap;
            rows.push(StepRow {
                t,
                i: i + 1,
                phi_xt,
                phi_opt,
                gap,
                reg_cum: *cum,
            });
        }
    }
    let mut max_lipschitz = 0.0f64;
    for t in 1..=horizon {
        for obj in stream.at(t) {
            max_lipschitz = max_lipschitz.max(obj.smooth.lipschitz());
        }
    }
    let surrogate = path.sigma_surrogate;
    let flat = |vv: &Vec<Vec<Verdict>>| vv.iter().flatten().copied().collect::<Vec<_>>();
    let summary = |name: &'static str, verdict: Verdict, uses_sigma: bool| BoundSummary {
        name,
        verdict,
        surrogate_sigma: uses_sigma && surrogate,
    };
    let bounds = vec![
        summary("lemma2a", worst_verdict(&lemma2.a), true),
        summary("lemma2b", worst_verdict(&flat(&lemma2.b)), false),
        summary(
            "lemma2c",
            lemma2
                .c
                .as_ref()
                .map_or_else(Verdict::skipped, |c| worst_verdict(&flat(c))),
            true,
        ),
        summary(
            "thm1_stated",
            theorem1
                .as_ref()
                .map_or_else(Verdict::skipped, |t| worst_verdict(&t.stated)),
            true,
        ),
        summary(
            "thm1_proof_variant",
            theorem1
                .as_ref()
                .map_or_else(Verdict::skipped, |t| worst_verdict(&t.proof_variant)),
            true,
        ),
        summary(
            "cor1",
            corollary
                .as_ref()
                .map_or_else(Verdict::skipped, |c| c.first),
            false,
        ),
        summary(
            "cor2",
            corollary
                .as_ref()
                .map_or_else(Verdict::skipped, |c| c.second),
            false,
        ),
        summary(
            "cor_box1",
            corollary
                .as_ref()
                .map_or_else(Verdict::skipped, |c| c.box_first),
            false,
        ),
        summary(
            "cor_box2",
            corollary
                .as_ref()
                .map_or_else(Verdict::skipped, |c| c.box_second),
            false,
        ),
        summary("prop", worst_verdict(&flat(&proposition)), true),
    ];
    debug_assert_eq!(bounds.len(), BOUND_NAMES.len());
    notes.push(format!(
        "optimum trace solved to tol {oracle_tol}; w_t follows the oracle's limit-point selection"
    ));
    let contraction = inner_contraction_violations(traj);
    if traj.inner.is_some() {
        notes.push(format!(
            "inner displacement increases observed: {}",
            contraction.len()
        ));
        let descent = candidate_descent_violations(traj, stream);
        if !descent.is_empty() {
            notes.push(format!("candidate descent violations: {}", descent.len()));
        }
    }
    Ok(RegretReport {
        scenario: scenario.to_string(),
        horizon,
        num_objectives: num_obj,
        alphas: config.alphas.clone(),
        dynamic_regret: dynamic,
        static_regret: static_reg,
        v: path.v,
        w: path.w,
        sigma: path.sigma,
        sigma_surrogate: surrogate,
        drift,
        alpha_min: config.alpha_min(),
        max_lipschitz,
        rows,
        composite,
        bounds,
        lemma2,
        theorem1,
        corollary,
        proposition,
        notes,
    })
}

/// Outcome of the randomized descent-lemma suite.
#[derive(Debug, Clone)]
pub struct Lemma1Suite {
    pub samples: usize,
    pub satisfied: usize,
    pub descent_ok: usize,
    /// Smallest inequality slack seen across the suite.
    pub min_slack: f64,
    /// Largest value of `phi(T(x)) - phi(x)` seen (must stay <= 1e-12).
    pub max_descent_gap: f64,
}

impl Lemma1Suite {
    pub fn all_passed(&self) -> bool {
        self.satisfied == self.samples && self.descent_ok == self.samples
    }
}

/// Random builtin composite: quadratic smooth part with eigenvalues
/// log-uniform in `[1e-2, 1e2]` (condition at most 1e4) and a prox term
/// drawn from the three builtin families.
fn random_builtin_composite(rng: &mut ChaCha8Rng) -> (CompositeObjective, usize) {
    let n = rng.gen_range(1..=5);
    let mut m = nalgebra::DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    // Keep the QR factor well defined.
    for j in 0..n {
        m[(j, j)] += 2.0;
    }
    let q = m.qr().q();
    let eigs = DVector::from_fn(n, |_, _| {
        let exp = rng.gen_range(-2.0..=2.0);
        10.0f64.powf(exp)
    });
    let a_raw = &q * nalgebra::DMatrix::from_diagonal(&eigs) * q.transpose();
    let a = (&a_raw + a_raw.transpose()) * 0.5;
    let b = DVector::from_fn(n, |_, _| rng.gen_range(-5.0..5.0));
    let smooth = SmoothTerm::quadratic(a, b).expect("sampled quadratic is symmetric PSD");
    let nonsmooth = match rng.gen_range(0..3) {
        0 => ProxTerm::zero(),
        1 => ProxTerm::l1(rng.gen_range(0.1..2.0)),
        _ => {
            let lo = rng.gen_range(-5.0..0.0);
            let hi = rng.gen_range(0.0..5.0);
            ProxTerm::box_indicator(lo, hi)
        }
    };
    (CompositeObjective::new(smooth, nonsmooth), n)
}

/// Randomized verification of the descent lemma: `samples` draws of
/// (builtin composite, x, y in `[-10,10]^n`, c in `(0, 1/L]`), checking the
/// full inequality and the descent half `phi(T(x)) <= phi(x) + 1e-12`.
pub fn run_lemma1_suite(samples: usize, seed: u64) -> Lemma1Suite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut satisfied = 0;
    let mut descent_ok = 0;
    let mut min_slack = f64::INFINITY;
    let mut max_descent_gap = f64::NEG_INFINITY;
    for _ in 0..samples {
        let (obj, n) = random_builtin_composite(&mut rng);
        let x = DVector::from_fn(n, |_, _| rng.gen_range(-10.0..10.0));
        let y = DVector::from_fn(n, |_, _| rng.gen_range(-10.0..10.0));
        let c = (1.0 - rng.gen_range(0.0..1.0)) * obj.max_step();
        let verdict = check_lemma1(&obj, &x, &y, c).expect("sampled step is admissible");
        if verdict.satisfied() {
            satisfied += 1;
        }
        if verdict.slack < min_slack {
            min_slack = verdict.slack;
        }
        let step = prox_grad_map(&obj, &x, c).expect("sampled step is admissible");
        let descent_gap = obj.value(&step.point).sub_to_f64(obj.value(&x));
        if descent_gap <= 1e-12 {
            descent_ok += 1;
        }
        if descent_gap > max_descent_gap {
            max_descent_gap = descent_gap;
        }
    }
    Lemma1Suite {
        samples,
        satisfied,
        descent_ok,
        min_slack,
        max_descent_gap,
    }
}
