//! Offline ground truth: per-objective minimizers, static minimizers,
//! scalarized solves, brute-force Pareto dominance, and gradient checking.
//!
//! The solvers here are deliberately independent of the online engine: they
//! start from their own points, run to a much tighter tolerance, and verify
//! their own residuals, so regret numbers are measured against a legitimate
//! oracle rather than against the path being graded.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::objective::{
    prox_grad_map, subdiff_distance, CompositeObjective, ObjectiveStream, ProxTerm, SmoothTerm,
};

/// Default residual tolerance for oracle solves.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-10;
/// Default iteration budget for oracle solves.
pub const DEFAULT_ORACLE_MAX_ITERS: usize = 200_000;

/// One solved optimum: the point, its composite value, and the verified
/// residual `d(0, dphi(x))`.
#[derive(Debug, Clone)]
pub struct OptEntry {
    pub point: DVector<f64>,
    pub value: f64,
    pub residual: f64,
}

/// Per-objective, per-time optima `x^{opt,t,i}`.
#[derive(Debug, Clone)]
pub struct OptimumTrace {
    entries: Vec<Vec<OptEntry>>, // [t-1][i]
}

impl OptimumTrace {
    /// Solve every `(i, t)` minimization over the first `horizon` steps of
    /// the stream. Solves warm-start from the previous time step's optimum
    /// (never from the engine's iterates).
    pub fn solve(stream: &ObjectiveStream, horizon: usize, tol: f64) -> Result<OptimumTrace> {
        if stream.horizon() < horizon {
            return Err(Error::HorizonMismatch {
                expected: horizon,
                actual: stream.horizon(),
            });
        }
        let n = stream.dim();
        let num_obj = stream.num_objectives();
        let mut entries: Vec<Vec<OptEntry>> = Vec::with_capacity(horizon);
        let mut warm: Vec<DVector<f64>> = vec![DVector::zeros(n); num_obj];
        for t in 1..=horizon {
            let mut slice = Vec::with_capacity(num_obj);
            for (i, obj) in stream.at(t).iter().enumerate() {
                let (point, residual) = solve_offline(obj, &warm[i], tol, DEFAULT_ORACLE_MAX_ITERS)
                    .map_err(|e| Error::OracleAt {
                        i: i + 1,
                        t,
                        source: Box::new(e),
                    })?;
                let value = obj.value(&point).to_f64();
                warm[i] = point.clone();
                slice.push(OptEntry {
                    point,
                    value,
                    residual,
                });
            }
            entries.push(slice);
        }
        Ok(OptimumTrace { entries })
    }

    pub fn horizon(&self) -> usize {
        self.entries.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.entries[0].len()
    }

    /// Entry for objective `i` (0-based) at time `t` (1-based).
    pub fn entry(&self, t: usize, i: usize) -> &OptEntry {
        &self.entries[t - 1][i]
    }
}

/// Direct minimization of `0.5 x'Ax + b'x` via the symmetric spectrum,
/// using a pseudo-inverse on near-zero eigenvalues.
fn solve_quadratic_direct(
    a: &nalgebra::DMatrix<f64>,
    b: &DVector<f64>,
    tol: f64,
) -> Result<(DVector<f64>, f64)> {
    let eigen = a.clone().symmetric_eigen();
    let max_ev = eigen
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let cutoff = 1e-12 * max_ev.max(1.0);
    let vt_b = eigen.eigenvectors.transpose() * b;
    let coeffs = DVector::from_fn(b.len(), |j, _| {
        if eigen.eigenvalues[j].abs() > cutoff {
            -vt_b[j] / eigen.eigenvalues[j]
        } else {
            0.0
        }
    });
    let x = &eigen.eigenvectors * coeffs;
    let residual = (a * &x + b).norm();
    if residual <= tol {
        Ok((x, residual))
    } else {
        // b has a component outside the range of A: no stationary point.
        Err(Error::ConvergenceFailure {
            residual,
            iterations: 0,
            tol,
            best: Box::new(x),
        })
    }
}

/// Minimize one composite objective to residual `tol`.
///
/// Pure quadratics (`g = 0`) are solved directly through the spectrum;
/// everything else runs prox-gradient iterations `x <- T(x)` at step `1/L`
/// until `d(0, dphi(x)) <= tol` or the budget runs out. Failures carry the
/// best iterate and its residual.
pub fn solve_offline(
    obj: &CompositeObjective,
    x0: &DVector<f64>,
    tol: f64,
    max_iters: usize,
) -> Result<(DVector<f64>, f64)> {
    assert!(tol > 0.0, "oracle tolerance must be positive");
    if let (Some((a, b)), ProxTerm::Zero) = (obj.smooth.quadratic_data(), &obj.nonsmooth) {
        return solve_quadratic_direct(a, b, tol);
    }
    let c = obj.max_step();
    let mut x = x0.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        x = prox_grad_map(obj, &x, c)?.point;
        residual = subdiff_distance(obj, &x)?.value();
        if residual <= tol {
            return Ok((x, residual));
        }
    }
    Err(Error::ConvergenceFailure {
        residual,
        iterations: max_iters,
        tol,
        best: Box::new(x),
    })
}

/// Weighted sum of smooth terms. Stays quadratic when every input is
/// quadratic; otherwise a custom closure with the summed Lipschitz bound.
fn combine_smooth(terms: &[(f64, SmoothTerm)]) -> Result<SmoothTerm> {
    assert!(!terms.is_empty(), "cannot combine an empty smooth family");
    if terms.iter().all(|(_, s)| s.quadratic_data().is_some()) {
        let n = terms[0].1.quadratic_data().expect("quadratic").1.len();
        let mut a_sum = nalgebra::DMatrix::zeros(n, n);
        let mut b_sum = DVector::zeros(n);
        for (w, s) in terms {
            let (a, b) = s.quadratic_data().expect("checked quadratic");
            a_sum += a * *w;
            b_sum += b * *w;
        }
        return SmoothTerm::quadratic(a_sum, b_sum);
    }
    let parts: Vec<(f64, SmoothTerm)> = terms.to_vec();
    let lipschitz = parts.iter().map(|(w, s)| w * s.lipschitz()).sum();
    let value_parts = parts.clone();
    Ok(SmoothTerm::custom(
        move |x| value_parts.iter().map(|(w, s)| w * s.value(x)).sum(),
        move |x| {
            let mut g = DVector::zeros(x.len());
            for (w, s) in &parts {
                g += s.gradient(x) * *w;
            }
            g
        },
        lipschitz,
    ))
}

/// Positively weighted sum of nonsmooth terms, for families closed under
/// addition: zero and l1 terms mix (weights scale lambda), box indicators
/// intersect. Anything else is an unsupported scenario.
fn combine_nonsmooth(terms: &[(f64, ProxTerm)]) -> Result<ProxTerm> {
    let mut lambda_sum = 0.0;
    let mut has_l1 = false;
    let mut boxes: Vec<(f64, f64)> = Vec::new();
    for (w, g) in terms {
        if *w == 0.0 {
            continue;
        }
        match g {
            ProxTerm::Zero => {}
            ProxTerm::L1 { lambda } => {
                has_l1 = true;
                lambda_sum += w * lambda;
            }
            ProxTerm::Box { lo, hi } => boxes.push((*lo, *hi)),
            ProxTerm::Custom { .. } => {
                return Err(Error::UnsupportedScenario(
                    "custom nonsmooth terms cannot be combined".into(),
                ))
            }
        }
    }
    match (has_l1, boxes.is_empty()) {
        (false, true) => Ok(ProxTerm::zero()),
        (true, true) => {
            if lambda_sum == 0.0 {
                Ok(ProxTerm::zero())
            } else {
                Ok(ProxTerm::l1(lambda_sum))
            }
        }
        (false, false) => {
            let lo = boxes.iter().map(|b| b.0).fold(f64::NEG_INFINITY, f64::max);
            let hi = boxes.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
            if lo > hi {
                return Err(Error::UnsupportedScenario(
                    "box domains have empty intersection".into(),
                ));
            }
            Ok(ProxTerm::box_indicator(lo, hi))
        }
        (true, false) => Err(Error::UnsupportedScenario(
            "cannot combine l1 and box nonsmooth terms".into(),
        )),
    }
}

/// Minimizer of the summed objective `sum_t phi_{i,t}` for objective `i`
/// (0-based) over the whole stream.
pub fn static_optimum(stream: &ObjectiveStream, i: usize, tol: f64) -> Result<DVector<f64>> {
    let horizon = stream.horizon();
    let smooth_terms: Vec<(f64, SmoothTerm)> = (1..=horizon)
        .map(|t| (1.0, stream.at(t)[i].smooth.clone()))
        .collect();
    let nonsmooth_terms: Vec<(f64, ProxTerm)> = (1..=horizon)
        .map(|t| (1.0, stream.at(t)[i].nonsmooth.clone()))
        .collect();
    let summed = CompositeObjective::new(
        combine_smooth(&smooth_terms)?,
        combine_nonsmooth(&nonsmooth_terms)?,
    );
    let (x, _) = solve_offline(
        &summed,
        &DVector::zeros(stream.dim()),
        tol,
        DEFAULT_ORACLE_MAX_ITERS,
    )?;
    Ok(x)
}

/// Minimizer of the scalarized problem `min sum_i omega_i phi_i` over one
/// time slice. Weights must be nonnegative and sum to 1; zero-weight
/// objectives drop out entirely.
pub fn solve_scalarized(
    objectives: &[CompositeObjective],
    omegas: &[f64],
    dim: usize,
    tol: f64,
) -> Result<DVector<f64>> {
    assert_eq!(objectives.len(), omegas.len(), "one weight per objective");
    let sum: f64 = omegas.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum { sum });
    }
    for (i, &w) in omegas.iter().enumerate() {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::WeightRange { index: i, value: w });
        }
    }
    let smooth_terms: Vec<(f64, SmoothTerm)> = objectives
        .iter()
        .zip(omegas)
        .filter(|(_, &w)| w != 0.0)
        .map(|(o, &w)| (w, o.smooth.clone()))
        .collect();
    let nonsmooth_terms: Vec<(f64, ProxTerm)> = objectives
        .iter()
        .zip(omegas)
        .filter(|(_, &w)| w != 0.0)
        .map(|(o, &w)| (w, o.nonsmooth.clone()))
        .collect();
    let combined = CompositeObjective::new(
        combine_smooth(&smooth_terms)?,
        combine_nonsmooth(&nonsmooth_terms)?,
    );
    let (x, _) = solve_offline(
        &combined,
        &DVector::zeros(dim),
        tol,
        DEFAULT_ORACLE_MAX_ITERS,
    )?;
    Ok(x)
}

/// Strict Pareto dominance: `a` is no worse everywhere and strictly better
/// somewhere. Exact comparisons, no tolerance.
pub fn pareto_dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors must have equal length");
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Dominance with an additive margin, used where solver residuals must not
/// flip a comparison: requires `a <= b + margin` everywhere and
/// `a < b - margin` somewhere.
pub fn dominates_with_margin(a: &[f64], b: &[f64], margin: f64) -> bool {
    assert_eq!(a.len(), b.len(), "objective vectors must have equal length");
    a.iter().zip(b).all(|(x, y)| *x <= y + margin) && a.iter().zip(b).any(|(x, y)| *x < y - margin)
}

/// A nondominated grid point together with its objective values.
#[derive(Debug, Clone)]
pub struct FrontPoint {
    pub point: DVector<f64>,
    pub values: Vec<f64>,
}

/// Brute-force Pareto front on a regular grid over `[lo, hi]` per axis.
///
/// Desk scale only: dimension at most 2 and at most 401 samples per axis.
/// Grid points outside the common domain (any objective infinite) are
/// excluded. The scan is the plain O(M^2) pairwise one.
pub fn grid_pareto_front(
    objectives: &[CompositeObjective],
    lo: &DVector<f64>,
    hi: &DVector<f64>,
    resolution: usize,
) -> Result<Vec<FrontPoint>> {
    let n = lo.len();
    if n == 0 || n > 2 || hi.len() != n {
        return Err(Error::UnsupportedGrid(format!(
            "pareto grid supports dimensions 1..=2, got {n}"
        )));
    }
    if !(2..=401).contains(&resolution) {
        return Err(Error::UnsupportedGrid(format!(
            "pareto grid supports 2..=401 points per axis, got {resolution}"
        )));
    }
    let axis = |j: usize, k: usize| lo[j] + (hi[j] - lo[j]) * k as f64 / (resolution - 1) as f64;
    let mut points: Vec<DVector<f64>> = Vec::new();
    match n {
        1 => {
            for k in 0..resolution {
                points.push(DVector::from_vec(vec![axis(0, k)]));
            }
        }
        _ => {
            for k0 in 0..resolution {
                for k1 in 0..resolution {
                    points.push(DVector::from_vec(vec![axis(0, k0), axis(1, k1)]));
                }
            }
        }
    }
    let mut evaluated: Vec<FrontPoint> = Vec::new();
    for p in points {
        let mut values = Vec::with_capacity(objectives.len());
        let mut finite = true;
        for obj in objectives {
            match obj.value(&p).finite() {
                Some(v) => values.push(v),
                None => {
                    finite = false;
                    break;
                }
            }
        }
        if finite {
            evaluated.push(FrontPoint { point: p, values });
        }
    }
    let front = evaluated
        .iter()
        .enumerate()
        .filter(|(idx, fp)| {
            !evaluated
                .iter()
                .enumerate()
                .any(|(j, other)| j != *idx && pareto_dominates(&other.values, &fp.values))
        })
        .map(|(_, fp)| fp.clone())
        .collect();
    Ok(front)
}

/// Central finite differences of a smooth term, coordinate by coordinate.
pub fn finite_diff_gradient(f: &SmoothTerm, x: &DVector<f64>, h: f64) -> DVector<f64> {
    assert!(h > 0.0, "finite difference step must be positive");
    DVector::from_fn(x.len(), |j, _| {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        (f.value(&xp) - f.value(&xm)) / (2.0 * h)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{dmatrix, dvector, DMatrix};

    fn quad_1d(a: f64, b: f64, g: ProxTerm) -> CompositeObjective {
        CompositeObjective::new(
            SmoothTerm::quadratic(DMatrix::from_element(1, 1, a), dvector![b]).unwrap(),
            g,
        )
    }

    #[test]
    fn solve_offline_pure_quadratic_direct() {
        let a = 3.5;
        let obj = quad_1d(1.0, -a, ProxTerm::zero());
        let (x, r) = solve_offline(&obj, &dvector![0.0], 1e-10, 10).unwrap();
        assert_abs_diff_eq!(x[0], a, epsilon = 1e-12);
        assert!(r <= 1e-10);
    }

    #[test]
    fn solve_offline_l1_shrinks_to_origin() {
        // min 0.5 x^2 + |x| = 0 at 0 since |grad f(0)| = 0 <= 1.
        let obj = quad_1d(1.0, 0.0, ProxTerm::l1(1.0));
        let (x, r) = solve_offline(&obj, &dvector![4.0], 1e-10, 1000).unwrap();
        assert_abs_diff_eq!(x[0], 0.0, epsilon = 1e-10);
        assert!(r <= 1e-10);
    }

    #[test]
    fn solve_offline_shifted_l1() {
        // min 0.5 (x-3)^2 + |x|: optimality 0 in (x-3) + sign(x) gives x = 2.
        let obj = quad_1d(1.0, -3.0, ProxTerm::l1(1.0));
        let (x, _) = solve_offline(&obj, &dvector![0.0], 1e-12, 10_000).unwrap();
        assert_abs_diff_eq!(x[0], 2.0, epsilon = 1e-10);
        // Grid confirmation.
        let grid_best = (0..=60_000)
            .map(|k| -1.0 + 4.0 * k as f64 / 60_000.0)
            .min_by(|u, v| {
                let fu = 0.5 * (u - 3.0) * (u - 3.0) + u.abs();
                let fv = 0.5 * (v - 3.0) * (v - 3.0) + v.abs();
                fu.partial_cmp(&fv).unwrap()
            })
            .unwrap();
        assert_abs_diff_eq!(grid_best, 2.0, epsilon = 1e-4);
    }

    #[test]
    fn solve_offline_unbounded_reports_failure() {
        // f(x) = b'x with A = 0 and g = 0: no stationary point.
        let obj = quad_1d(0.0, 1.0, ProxTerm::zero());
        let err = solve_offline(&obj, &dvector![0.0], 1e-10, 10).unwrap_err();
        assert!(matches!(err, Error::ConvergenceFailure { .. }));
    }

    #[test]
    fn solve_offline_residual_recheck() {
        // The returned residual must agree with an independent re-evaluation.
        let cases = vec![
            quad_1d(2.0, -1.0, ProxTerm::zero()),
            quad_1d(1.0, -3.0, ProxTerm::l1(0.7)),
            quad_1d(1.5, 2.0, ProxTerm::box_indicator(-0.5, 0.5)),
        ];
        for obj in cases {
            let (x, r) = solve_offline(&obj, &dvector![1.0], 1e-10, 100_000).unwrap();
            let again = subdiff_distance(&obj, &x).unwrap().value();
            assert_abs_diff_eq!(r, again, epsilon = 1e-15);
            assert!(again <= 1e-10);
        }
    }

    #[test]
    fn optimum_trace_residual_invariant() {
        let slices = (0..4)
            .map(|t| {
                vec![
                    quad_1d(1.0, -(t as f64), ProxTerm::l1(0.3)),
                    quad_1d(2.0, 1.0, ProxTerm::zero()),
                ]
            })
            .collect();
        let stream = ObjectiveStream::from_slices(1, slices);
        let trace = OptimumTrace::solve(&stream, 4, 1e-10).unwrap();
        assert_eq!(trace.horizon(), 4);
        assert_eq!(trace.num_objectives(), 2);
        for t in 1..=4 {
            for i in 0..2 {
                assert!(trace.entry(t, i).residual <= 1e-10);
            }
        }
    }

    #[test]
    fn static_optimum_examples() {
        // Stationary stream: static optimum equals the per-t optimum.
        let stationary =
            ObjectiveStream::from_slices(1, vec![vec![quad_1d(1.0, -2.0, ProxTerm::zero())]; 5]);
        let x = static_optimum(&stationary, 0, 1e-10).unwrap();
        assert_abs_diff_eq!(x[0], 2.0, epsilon = 1e-9);
        // Two-step stream 0.5 x^2 then 0.5 (x-2)^2: summed minimizer at 1.
        let two_step = ObjectiveStream::from_slices(
            1,
            vec![
                vec![quad_1d(1.0, 0.0, ProxTerm::zero())],
                vec![quad_1d(1.0, -2.0, ProxTerm::zero())],
            ],
        );
        let x = static_optimum(&two_step, 0, 1e-10).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn static_optimum_drifting_matches_manual_sum() {
        // Linearly drifting centers a_t = t: the sum is a quadratic centered
        // at the mean center.
        let horizon = 6;
        let slices = (1..=horizon)
            .map(|t| vec![quad_1d(1.0, -(t as f64), ProxTerm::zero())])
            .collect();
        let stream = ObjectiveStream::from_slices(1, slices);
        let x = static_optimum(&stream, 0, 1e-10).unwrap();
        let mean = (1..=horizon).map(|t| t as f64).sum::<f64>() / horizon as f64;
        assert_abs_diff_eq!(x[0], mean, epsilon = 1e-9);
    }

    #[test]
    fn static_optimum_rejects_mixed_nonsmooth() {
        let stream = ObjectiveStream::from_slices(
            1,
            vec![
                vec![quad_1d(1.0, 0.0, ProxTerm::l1(0.5))],
                vec![quad_1d(1.0, 0.0, ProxTerm::box_indicator(-1.0, 1.0))],
            ],
        );
        assert!(matches!(
            static_optimum(&stream, 0, 1e-10),
            Err(Error::UnsupportedScenario(_))
        ));
    }

    #[test]
    fn scalarized_one_hot_matches_per_objective_oracle() {
        let objs = vec![
            quad_1d(1.0, -1.0, ProxTerm::l1(0.2)),
            quad_1d(2.0, 3.0, ProxTerm::l1(0.2)),
        ];
        let tol = 1e-10;
        for i in 0..2 {
            let mut w = vec![0.0; 2];
            w[i] = 1.0;
            let xs = solve_scalarized(&objs, &w, 1, tol).unwrap();
            let (xo, _) = solve_offline(&objs[i], &dvector![0.5], tol, 100_000).unwrap();
            assert!((xs - xo).norm() <= 2.0 * tol);
        }
    }

    #[test]
    fn scalarized_ill_scaled_pair_sticks_to_dominant_objective() {
        // f1 = 1000 x^2, f2 = 0.001 (x-2)^2 with equal weights: the solution
        // is within 1e-3 of argmin f1 = 0.
        let objs = vec![
            quad_1d(2000.0, 0.0, ProxTerm::zero()),
            quad_1d(0.002, -0.004, ProxTerm::zero()),
        ];
        let x = solve_scalarized(&objs, &[0.5, 0.5], 1, 1e-12).unwrap();
        assert!(x[0].abs() <= 1e-3, "got {}", x[0]);
        // Exact stationary point of the weighted sum.
        assert_abs_diff_eq!(x[0], 0.002 / 1000.001, epsilon = 1e-12);
    }

    #[test]
    fn scalarized_symmetric_pair_lands_between() {
        let objs = vec![
            quad_1d(1.0, -1.0, ProxTerm::zero()),
            quad_1d(1.0, 1.0, ProxTerm::zero()),
        ];
        let x = solve_scalarized(&objs, &[0.5, 0.5], 1, 1e-12).unwrap();
        assert_abs_diff_eq!(x[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dominance_kernel_examples() {
        assert!(!pareto_dominates(&[1.0, 1.0], &[1.0, 1.0]));
        assert!(pareto_dominates(&[0.0, 1.0], &[1.0, 1.0]));
        assert!(!pareto_dominates(&[0.0, 2.0], &[1.0, 1.0]));
    }

    #[test]
    fn grid_front_single_objective_is_argmin_set() {
        let objs = vec![quad_1d(2.0, 0.0, ProxTerm::zero())];
        let front = grid_pareto_front(&objs, &dvector![-1.0], &dvector![1.0], 201).unwrap();
        assert_eq!(front.len(), 1);
        assert_abs_diff_eq!(front[0].point[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_front_two_quadratics_spans_segment() {
        // f1 = x^2, f2 = (x-2)^2 on [-1, 3]: front is [0, 2] up to one step.
        let objs = vec![
            quad_1d(2.0, 0.0, ProxTerm::zero()),
            quad_1d(2.0, -4.0, ProxTerm::zero()),
        ];
        let front = grid_pareto_front(&objs, &dvector![-1.0], &dvector![3.0], 401).unwrap();
        let xs: Vec<f64> = front.iter().map(|fp| fp.point[0]).collect();
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let step = 0.01;
        assert!((min - 0.0).abs() <= step + 1e-12, "front starts at {min}");
        assert!((max - 2.0).abs() <= step + 1e-12, "front ends at {max}");
        for x in xs {
            assert!(x >= -step - 1e-12 && x <= 2.0 + step + 1e-12);
        }
    }

    #[test]
    fn grid_front_identical_objectives_reduces_to_argmin() {
        let objs = vec![
            quad_1d(2.0, -2.0, ProxTerm::zero()),
            quad_1d(2.0, -2.0, ProxTerm::zero()),
        ];
        let front = grid_pareto_front(&objs, &dvector![-1.0], &dvector![3.0], 401).unwrap();
        assert_eq!(front.len(), 1);
        assert_abs_diff_eq!(front[0].point[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_front_rejects_desk_scale_violations() {
        let objs = vec![quad_1d(1.0, 0.0, ProxTerm::zero())];
        assert!(grid_pareto_front(&objs, &dvector![-1.0], &dvector![1.0], 402).is_err());
        let objs3 = vec![CompositeObjective::new(
            SmoothTerm::quadratic(DMatrix::identity(3, 3), DVector::zeros(3)).unwrap(),
            ProxTerm::zero(),
        )];
        assert!(grid_pareto_front(
            &objs3,
            &DVector::zeros(3),
            &DVector::from_element(3, 1.0),
            11
        )
        .is_err());
    }

    #[test]
    fn scalarized_points_are_nondominated_on_grid() {
        let objs = vec![
            quad_1d(2.0, 0.0, ProxTerm::zero()),
            quad_1d(2.0, -4.0, ProxTerm::zero()),
        ];
        let front = grid_pareto_front(&objs, &dvector![-1.0], &dvector![3.0], 401).unwrap();
        for w1 in [0.2, 0.5, 0.8] {
            let x = solve_scalarized(&objs, &[w1, 1.0 - w1], 1, 1e-12).unwrap();
            let values: Vec<f64> = objs.iter().map(|o| o.value(&x).to_f64()).collect();
            for fp in &front {
                assert!(
                    !dominates_with_margin(&fp.values, &values, 1e-9),
                    "front point dominates scalarized minimizer for w1={w1}"
                );
            }
        }
    }

    #[test]
    fn finite_diff_examples() {
        let t = SmoothTerm::quadratic(DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
        let g = finite_diff_gradient(&t, &dvector![1.0, 2.0], 1e-5);
        assert_abs_diff_eq!(g[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(g[1], 2.0, epsilon = 1e-8);
        let t = SmoothTerm::quadratic(DMatrix::from_element(1, 1, 2000.0), dvector![0.0]).unwrap();
        let g = finite_diff_gradient(&t, &dvector![1.0], 1e-5);
        assert_abs_diff_eq!(g[0], 2000.0, epsilon = 2e-4);
        let konst = SmoothTerm::custom(|_| 4.2, |x| DVector::zeros(x.len()), 0.0);
        let g = finite_diff_gradient(&konst, &dvector![1.0, -1.0], 1e-5);
        assert_abs_diff_eq!(g.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn combine_smooth_mixed_custom_path() {
        let q = SmoothTerm::quadratic(dmatrix![2.0], dvector![1.0]).unwrap();
        let c = SmoothTerm::custom(
            |x: &DVector<f64>| x[0].powi(2),
            |x| dvector![2.0 * x[0]],
            2.0,
        );
        let s = combine_smooth(&[(0.5, q), (0.5, c)]).unwrap();
        // 0.5 (x^2 + x) + 0.5 x^2 at x = 2: 0.5*6 + 0.5*4 = 5.
        assert_abs_diff_eq!(s.value(&dvector![2.0]), 5.0, epsilon = 1e-12);
        // gradient: 0.5 (2x + 1) + 0.5 (2x) = 2x + 0.5 at x = 2: 4.5.
        assert_abs_diff_eq!(s.gradient(&dvector![2.0])[0], 4.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.lipschitz(), 2.0, epsilon = 1e-12);
    }
}
