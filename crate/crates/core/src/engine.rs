//! Online multi-objective proximal gradient descent.
//!
//! Per time step the engine runs `K + 1` inner iterations; each iteration
//! computes one prox-gradient candidate per objective and combines them with
//! the configured weights. The outer loop is strictly sequential: the
//! decision for `t + 1` is committed before the objectives at `t + 1` are
//! read.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::objective::{prox_grad_map, CompositeObjective, ObjectiveStream};

/// Weights, step sizes, and budgets for one run.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Combination weights `alpha_i >= 0`, summing to 1 within `1e-12`.
    pub alphas: Vec<f64>,
    /// Per-objective step sizes `C_i`, each in `(0, 1/L_{f_{i,t}}]` for all `t`.
    pub steps: Vec<f64>,
    /// Inner iteration budget `K`; the inner loop runs `K + 1` combines.
    pub inner_iters: usize,
    /// Horizon `T`.
    pub horizon: usize,
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

impl EngineConfig {
    pub fn new(
        alphas: Vec<f64>,
        steps: Vec<f64>,
        inner_iters: usize,
        horizon: usize,
    ) -> Result<EngineConfig> {
        assert_eq!(
            alphas.len(),
            steps.len(),
            "alphas and steps must have equal length"
        );
        assert!(horizon >= 1, "horizon must be at least 1");
        let sum: f64 = alphas.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSum { sum });
        }
        for (i, &a) in alphas.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::WeightRange { index: i, value: a });
            }
        }
        for (i, &c) in steps.iter().enumerate() {
            if c <= 0.0 {
                return Err(Error::StepNotPositive {
                    index: i + 1,
                    value: c,
                });
            }
        }
        Ok(EngineConfig {
            alphas,
            steps,
            inner_iters,
            horizon,
        })
    }

    /// Smallest nonzero weight (the theorem's `alpha`).
    pub fn alpha_min(&self) -> f64 {
        self.alphas
            .iter()
            .copied()
            .filter(|&a| a != 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether the weights put all mass on a single objective.
    pub fn one_hot(&self) -> Option<usize> {
        self.alphas.iter().position(|&a| a == 1.0)
    }

    /// Check the step sizes against every `L_{f_{i,t}}` in the stream and the
    /// horizon against the stream length.
    pub fn validate_against(&self, stream: &ObjectiveStream) -> Result<()> {
        if stream.num_objectives() != self.alphas.len() {
            return Err(Error::DimensionMismatch {
                expected: self.alphas.len(),
                actual: stream.num_objectives(),
            });
        }
        if stream.horizon() < self.horizon {
            return Err(Error::HorizonMismatch {
                expected: self.horizon,
                actual: stream.horizon(),
            });
        }
        for t in 1..=self.horizon {
            for (i, obj) in stream.at(t).iter().enumerate() {
                let l = obj.smooth.lipschitz();
                if l > 0.0 && self.steps[i] > 1.0 / l {
                    return Err(Error::StepExceedsLimit {
                        index: i + 1,
                        step: self.steps[i],
                        limit: 1.0 / l,
                        t,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Full inner record for one time step: iterates `x^{t,0} .. x^{t,K+1}` and
/// the per-objective candidates at each inner iteration.
#[derive(Debug, Clone)]
pub struct InnerRecord {
    /// `x^{t,k}` for `k = 0 ..= K+1`.
    pub iterates: Vec<DVector<f64>>,
    /// `candidates[k][i] = y^{t,k+1,i}` for `k = 0 ..= K`.
    pub candidates: Vec<Vec<DVector<f64>>>,
}

impl InnerRecord {
    /// Inner displacement sequence `||x^{t,k+1} - x^{t,k}||` for `k = 0 ..= K`.
    pub fn displacements(&self) -> Vec<f64> {
        self.iterates
            .windows(2)
            .map(|w| (&w[1] - &w[0]).norm())
            .collect()
    }
}

/// Recorded run: outer iterates `x^1 .. x^{T+1}` plus optional inner records.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// `x^t` for `t = 1 ..= T+1`.
    pub outer: Vec<DVector<f64>>,
    /// One record per time step when inner recording was requested.
    pub inner: Option<Vec<InnerRecord>>,
}

impl Trajectory {
    /// Horizon `T` covered by this run.
    pub fn horizon(&self) -> usize {
        self.outer.len() - 1
    }

    pub fn x(&self, t: usize) -> &DVector<f64> {
        &self.outer[t - 1]
    }
}

/// Everything the observer hook sees after a time step commits.
#[derive(Debug)]
pub struct StepEvent<'a> {
    pub t: usize,
    pub x_t: &'a DVector<f64>,
    pub x_next: &'a DVector<f64>,
    pub inner: Option<&'a InnerRecord>,
}

/// Weighted combination over the nonzero-weight candidates, summed in index
/// order so runs are bitwise reproducible.
fn combine(alphas: &[f64], candidates: &[Option<DVector<f64>>], dim: usize) -> DVector<f64> {
    let mut x = DVector::zeros(dim);
    for (a, y) in alphas.iter().zip(candidates) {
        if *a != 0.0 {
            x += *a * y.as_ref().expect("nonzero-weight candidate computed");
        }
    }
    x
}

/// One inner iteration: per-objective prox-gradient candidates and their
/// weighted combination.
pub fn inner_step(
    objectives: &[CompositeObjective],
    x: &DVector<f64>,
    config: &EngineConfig,
) -> Result<(DVector<f64>, Vec<DVector<f64>>)> {
    let mut candidates = Vec::with_capacity(objectives.len());
    for (obj, &c) in objectives.iter().zip(&config.steps) {
        candidates.push(Some(prox_grad_map(obj, x, c)?.point));
    }
    let next = combine(&config.alphas, &candidates, x.len());
    Ok((next, candidates.into_iter().map(Option::unwrap).collect()))
}

/// Inner iteration computing only what the combine needs; zero-weight
/// candidates are skipped. Produces bitwise the same combine as
/// [`inner_step`].
fn inner_step_fast(
    objectives: &[CompositeObjective],
    x: &DVector<f64>,
    config: &EngineConfig,
) -> Result<DVector<f64>> {
    let mut candidates = Vec::with_capacity(objectives.len());
    for ((obj, &c), &a) in objectives.iter().zip(&config.steps).zip(&config.alphas) {
        if a != 0.0 {
            candidates.push(Some(prox_grad_map(obj, x, c)?.point));
        } else {
            candidates.push(None);
        }
    }
    Ok(combine(&config.alphas, &candidates, x.len()))
}

/// One time step: `K + 1` inner iterations starting from `x^{t,0} = x_in`.
pub fn run_time_step(
    stream: &ObjectiveStream,
    t: usize,
    x_in: &DVector<f64>,
    config: &EngineConfig,
    record_inner: bool,
) -> Result<(DVector<f64>, Option<InnerRecord>)> {
    let objectives = stream.at(t);
    let mut x = x_in.clone();
    if record_inner {
        let mut record = InnerRecord {
            iterates: vec![x.clone()],
            candidates: Vec::with_capacity(config.inner_iters + 1),
        };
        for _ in 0..=config.inner_iters {
            let (next, cands) = inner_step(objectives, &x, config)?;
            record.candidates.push(cands);
            record.iterates.push(next.clone());
            x = next;
        }
        Ok((x, Some(record)))
    } else {
        for _ in 0..=config.inner_iters {
            x = inner_step_fast(objectives, &x, config)?;
        }
        Ok((x, None))
    }
}

/// Run the full online loop over `t = 1 ..= T`.
///
/// The engine reads only the objectives at the current `t`; `x^{t+1}` is
/// committed before `t + 1` is revealed. The observer is invoked exactly `T`
/// times, in increasing `t`, after each commit.
pub fn run_online(
    stream: &ObjectiveStream,
    x1: &DVector<f64>,
    config: &EngineConfig,
    record_inner: bool,
    mut observer: impl FnMut(StepEvent<'_>),
) -> Result<Trajectory> {
    config.validate_against(stream)?;
    if x1.len() != stream.dim() {
        return Err(Error::DimensionMismatch {
            expected: stream.dim(),
            actual: x1.len(),
        });
    }
    for obj in stream.at(1) {
        if !obj.nonsmooth.in_domain(x1) {
            return Err(Error::OutsideDomain);
        }
    }
    let mut outer = Vec::with_capacity(config.horizon + 1);
    let mut inner_records = record_inner.then(Vec::new);
    outer.push(x1.clone());
    for t in 1..=config.horizon {
        let x_t = outer.last().expect("outer nonempty").clone();
        let (x_next, record) = run_time_step(stream, t, &x_t, config, record_inner)?;
        outer.push(x_next);
        if let Some(records) = inner_records.as_mut() {
            records.push(record.expect("inner record requested"));
        }
        let records = inner_records.as_ref();
        observer(StepEvent {
            t,
            x_t: &x_t,
            x_next: outer.last().expect("pushed"),
            inner: records.map(|r| r.last().expect("pushed")),
        });
    }
    Ok(Trajectory {
        outer,
        inner: inner_records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{ProxTerm, SmoothTerm};
    use approx::assert_abs_diff_eq;
    use nalgebra::{dvector, DMatrix};

    fn quad_1d(a: f64, b: f64) -> CompositeObjective {
        CompositeObjective::new(
            SmoothTerm::quadratic(DMatrix::from_element(1, 1, a), dvector![b]).unwrap(),
            ProxTerm::zero(),
        )
    }

    fn stationary(objs: Vec<CompositeObjective>, horizon: usize) -> ObjectiveStream {
        ObjectiveStream::from_slices(1, vec![objs; horizon])
    }

    #[test]
    fn inner_step_single_quadratic_lands_on_minimizer() {
        let a = 4.0;
        let stream = stationary(vec![quad_1d(1.0, -a)], 1);
        let config = EngineConfig::new(vec![1.0], vec![1.0], 0, 1).unwrap();
        let (next, cands) = inner_step(stream.at(1), &dvector![-2.0], &config).unwrap();
        assert_abs_diff_eq!(next[0], a, epsilon = 1e-12);
        assert_eq!(cands.len(), 1);
    }

    #[test]
    fn inner_step_symmetric_pair_averages_to_zero() {
        let stream = stationary(vec![quad_1d(1.0, -1.0), quad_1d(1.0, 1.0)], 1);
        let config = EngineConfig::new(vec![0.5, 0.5], vec![1.0, 1.0], 0, 1).unwrap();
        for x0 in [-3.0, 0.0, 5.5] {
            let (next, cands) = inner_step(stream.at(1), &dvector![x0], &config).unwrap();
            assert_abs_diff_eq!(cands[0][0], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(cands[1][0], -1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(next[0], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn inner_step_degenerate_weights_follow_single_objective() {
        let stream = stationary(vec![quad_1d(1.0, -1.0), quad_1d(2.0, 1.0)], 1);
        let config = EngineConfig::new(vec![1.0, 0.0], vec![1.0, 0.5], 0, 1).unwrap();
        let x = dvector![2.5];
        let (next, _) = inner_step(stream.at(1), &x, &config).unwrap();
        let direct = prox_grad_map(&stream.at(1)[0], &x, 1.0).unwrap().point;
        assert_eq!(next[0], direct[0]);
    }

    #[test]
    fn run_time_step_budget_zero_is_one_inner_step() {
        let stream = stationary(vec![quad_1d(1.0, -3.0)], 1);
        let config = EngineConfig::new(vec![1.0], vec![1.0], 0, 1).unwrap();
        let x_in = dvector![10.0];
        let (out, record) = run_time_step(&stream, 1, &x_in, &config, true).unwrap();
        let record = record.unwrap();
        assert_eq!(record.candidates.len(), 1);
        assert_eq!(record.iterates.len(), 2);
        let (single, _) = inner_step(stream.at(1), &x_in, &config).unwrap();
        assert_eq!(out[0], single[0]);
    }

    #[test]
    fn run_time_step_exact_quadratic_reaches_and_holds_optimum() {
        let stream = stationary(vec![quad_1d(1.0, 0.0)], 1);
        let config = EngineConfig::new(vec![1.0], vec![1.0], 5, 1).unwrap();
        let (out, record) = run_time_step(&stream, 1, &dvector![7.0], &config, true).unwrap();
        assert_abs_diff_eq!(out[0], 0.0, epsilon = 1e-12);
        let record = record.unwrap();
        assert_eq!(record.iterates.len(), 7);
        for it in &record.iterates[1..] {
            assert_abs_diff_eq!(it[0], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn run_time_step_symmetric_pair_settles_immediately() {
        // Candidates are (1, -1) from any point, so x lands at 0 after the
        // first combine and stays for every K.
        let stream = stationary(vec![quad_1d(1.0, -1.0), quad_1d(1.0, 1.0)], 1);
        for k in [0usize, 1, 4, 9] {
            let config = EngineConfig::new(vec![0.5, 0.5], vec![1.0, 1.0], k, 1).unwrap();
            let (out, record) = run_time_step(&stream, 1, &dvector![4.0], &config, true).unwrap();
            assert_abs_diff_eq!(out[0], 0.0, epsilon = 1e-12);
            let record = record.unwrap();
            for it in &record.iterates[1..] {
                assert_abs_diff_eq!(it[0], 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn run_online_horizon_one_matches_run_time_step() {
        let stream = stationary(vec![quad_1d(2.0, 1.0)], 1);
        let config = EngineConfig::new(vec![1.0], vec![0.5], 3, 1).unwrap();
        let x1 = dvector![1.25];
        let traj = run_online(&stream, &x1, &config, false, |_| {}).unwrap();
        let (direct, _) = run_time_step(&stream, 1, &x1, &config, false).unwrap();
        assert_eq!(traj.outer.len(), 2);
        assert_eq!(traj.outer[1][0], direct[0]);
    }

    #[test]
    fn run_online_stays_at_common_minimizer() {
        let stream = stationary(
            vec![
                CompositeObjective::new(
                    SmoothTerm::quadratic(DMatrix::from_element(1, 1, 1.0), dvector![0.0]).unwrap(),
                    ProxTerm::l1(0.5),
                ),
                quad_1d(2.0, 0.0),
            ],
            6,
        );
        let config = EngineConfig::new(vec![0.4, 0.6], vec![1.0, 0.5], 2, 6).unwrap();
        let traj = run_online(&stream, &dvector![0.0], &config, false, |_| {}).unwrap();
        for x in &traj.outer {
            assert_abs_diff_eq!(x[0], 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn run_online_observer_contract() {
        let stream = stationary(vec![quad_1d(1.0, -1.0)], 5);
        let config = EngineConfig::new(vec![1.0], vec![1.0], 1, 5).unwrap();
        let mut seen = Vec::new();
        let traj = run_online(&stream, &dvector![0.0], &config, true, |ev| {
            seen.push((ev.t, ev.x_t[0], ev.x_next[0], ev.inner.is_some()));
        })
        .unwrap();
        assert_eq!(seen.len(), 5);
        for (idx, (t, x_t, x_next, has_inner)) in seen.iter().enumerate() {
            assert_eq!(*t, idx + 1);
            assert_eq!(*x_t, traj.outer[idx][0]);
            assert_eq!(*x_next, traj.outer[idx + 1][0]);
            assert!(has_inner);
        }
    }

    #[test]
    fn run_online_rejects_short_stream_and_bad_start() {
        let stream = stationary(vec![quad_1d(1.0, 0.0)], 3);
        let config = EngineConfig::new(vec![1.0], vec![1.0], 1, 5).unwrap();
        assert!(matches!(
            run_online(&stream, &dvector![0.0], &config, false, |_| {}),
            Err(Error::HorizonMismatch { .. })
        ));
        let boxed = stationary(
            vec![CompositeObjective::new(
                SmoothTerm::quadratic(DMatrix::from_element(1, 1, 1.0), dvector![0.0]).unwrap(),
                ProxTerm::box_indicator(-1.0, 1.0),
            )],
            3,
        );
        let config = EngineConfig::new(vec![1.0], vec![1.0], 1, 3).unwrap();
        assert!(matches!(
            run_online(&boxed, &dvector![5.0], &config, false, |_| {}),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn config_validation_errors() {
        assert!(matches!(
            EngineConfig::new(vec![0.5, 0.4], vec![1.0, 1.0], 1, 1),
            Err(Error::WeightSum { .. })
        ));
        assert!(matches!(
            EngineConfig::new(vec![1.5, -0.5], vec![1.0, 1.0], 1, 1),
            Err(Error::WeightRange { .. })
        ));
        assert!(matches!(
            EngineConfig::new(vec![1.0], vec![0.0], 1, 1),
            Err(Error::StepNotPositive { .. })
        ));
        let config = EngineConfig::new(vec![1.0], vec![0.6], 1, 1).unwrap();
        let stream = stationary(vec![quad_1d(2.0, 0.0)], 1);
        assert!(matches!(
            config.validate_against(&stream),
            Err(Error::StepExceedsLimit { .. })
        ));
        let config = EngineConfig::new(vec![0.3, 0.7], vec![1.0, 1.0], 1, 1).unwrap();
        assert_abs_diff_eq!(config.alpha_min(), 0.3);
        let onehot = EngineConfig::new(vec![0.0, 1.0], vec![1.0, 1.0], 1, 1).unwrap();
        assert_eq!(onehot.one_hot(), Some(1));
        assert_abs_diff_eq!(onehot.alpha_min(), 1.0);
    }

    #[test]
    fn fixed_point_invariance() {
        // x is a fixed point of every positive-weight operator: the step
        // returns x exactly.
        let stream = stationary(
            vec![
                CompositeObjective::new(
                    SmoothTerm::quadratic(DMatrix::from_element(1, 1, 1.0), dvector![-2.0])
                        .unwrap(),
                    ProxTerm::zero(),
                ),
                quad_1d(1.0, 5.0), // zero weight, different fixed point
            ],
            1,
        );
        let config = EngineConfig::new(vec![1.0, 0.0], vec![1.0, 1.0], 7, 1).unwrap();
        let (out, _) = run_time_step(&stream, 1, &dvector![2.0], &config, false).unwrap();
        assert_eq!(out[0], 2.0);
    }

    #[test]
    fn combine_matches_recorded_candidates_bitwise() {
        let stream = stationary(vec![quad_1d(1.3, -0.4), quad_1d(0.9, 0.7)], 4);
        let config = EngineConfig::new(vec![0.3, 0.7], vec![1.0 / 1.3, 1.0 / 0.9], 3, 4).unwrap();
        let traj = run_online(&stream, &dvector![2.0], &config, true, |_| {}).unwrap();
        let records = traj.inner.as_ref().unwrap();
        for record in records {
            for (k, cands) in record.candidates.iter().enumerate() {
                let mut sum = DVector::zeros(1);
                for (a, y) in config.alphas.iter().zip(cands) {
                    if *a != 0.0 {
                        sum += *a * y;
                    }
                }
                assert_eq!(
                    sum[0],
                    record.iterates[k + 1][0],
                    "bitwise combine at k={k}"
                );
            }
        }
    }

    #[test]
    fn runs_are_deterministic_and_recording_does_not_change_iterates() {
        let stream = stationary(vec![quad_1d(1.3, -0.4), quad_1d(0.9, 0.7)], 6);
        let config = EngineConfig::new(vec![0.25, 0.75], vec![0.7, 1.1], 4, 6).unwrap();
        let a = run_online(&stream, &dvector![1.5], &config, false, |_| {}).unwrap();
        let b = run_online(&stream, &dvector![1.5], &config, false, |_| {}).unwrap();
        let c = run_online(&stream, &dvector![1.5], &config, true, |_| {}).unwrap();
        for t in 0..a.outer.len() {
            assert_eq!(a.outer[t][0].to_bits(), b.outer[t][0].to_bits());
            assert_eq!(a.outer[t][0].to_bits(), c.outer[t][0].to_bits());
        }
    }
}
