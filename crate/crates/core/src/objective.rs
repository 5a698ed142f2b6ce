//! Composite time-varying objectives: smooth terms, nonsmooth prox terms,
//! and the prox-gradient operator.
//!
//! A composite objective is `phi(x) = f(x) + g(x)` with `f` convex and
//! `L`-smooth and `g` proper, lower semicontinuous, and convex with a cheap
//! proximal map. The prox-gradient operator
//! `T(x) = prox_{c g}(x - c grad f(x))` is the single step every other
//! module builds on.

use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

/// Extended-real value: finite or plus infinity.
///
/// Indicator functions need exact domain semantics, so infinity is a
/// dedicated variant rather than a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Collapse to `f64`, mapping `PosInf` to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// `self - rhs` as an `f64`, with the usual extended-real conventions.
    /// `PosInf - PosInf` has no meaning and yields NaN.
    pub fn sub_to_f64(self, rhs: ExtReal) -> f64 {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a - b,
            (ExtReal::Finite(_), ExtReal::PosInf) => f64::NEG_INFINITY,
            (ExtReal::PosInf, ExtReal::Finite(_)) => f64::INFINITY,
            (ExtReal::PosInf, ExtReal::PosInf) => f64::NAN,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &ExtReal) -> Option<std::cmp::Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(std::cmp::Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(std::cmp::Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(std::cmp::Ordering::Equal),
        }
    }
}

type ValueFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

#[derive(Clone)]
enum SmoothKind {
    /// `f(x) = 0.5 x' A x + b' x` with `A` symmetric PSD.
    Quadratic { a: DMatrix<f64>, b: DVector<f64> },
    /// User-supplied value/gradient pair with a declared Lipschitz constant.
    Custom { value: ValueFn, gradient: GradFn },
}

/// Differentiable convex term with an `L`-Lipschitz gradient.
#[derive(Clone)]
pub struct SmoothTerm {
    kind: SmoothKind,
    lipschitz: f64,
}

impl fmt::Debug for SmoothTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SmoothKind::Quadratic { a, .. } => f
                .debug_struct("SmoothTerm")
                .field("kind", &format!("quadratic {}x{}", a.nrows(), a.ncols()))
                .field("lipschitz", &self.lipschitz)
                .finish(),
            SmoothKind::Custom { .. } => f
                .debug_struct("SmoothTerm")
                .field("kind", &"custom")
                .field("lipschitz", &self.lipschitz)
                .finish(),
        }
    }
}

/// Relative symmetry tolerance for quadratic construction.
const SYMMETRY_TOL: f64 = 1e-12;
/// Relative tolerance below zero still accepted as PSD.
const PSD_TOL: f64 = 1e-10;

impl SmoothTerm {
    /// Quadratic `f(x) = 0.5 x' A x + b' x`.
    ///
    /// `A` must be symmetric positive semidefinite; the gradient Lipschitz
    /// constant is the largest eigenvalue of `A`, computed here once.
    pub fn quadratic(a: DMatrix<f64>, b: DVector<f64>) -> Result<SmoothTerm> {
        assert_eq!(a.nrows(), a.ncols(), "quadratic matrix must be square");
        assert_eq!(
            a.nrows(),
            b.len(),
            "matrix and linear term dimensions differ"
        );
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..a.nrows() {
            for j in (i + 1)..a.ncols() {
                if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let eigen = a.clone().symmetric_eigen();
        let max_ev = eigen
            .eigenvalues
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let min_ev = eigen
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        if min_ev < -PSD_TOL * max_ev.abs().max(1.0) {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_ev,
            });
        }
        Ok(SmoothTerm {
            kind: SmoothKind::Quadratic { a, b },
            lipschitz: max_ev.max(0.0),
        })
    }

    /// User-supplied smooth term with a declared gradient Lipschitz constant.
    ///
    /// The declared constant is trusted here; run
    /// [`SmoothTerm::validate_lipschitz`] to spot-check it.
    pub fn custom(
        value: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        lipschitz: f64,
    ) -> SmoothTerm {
        assert!(lipschitz >= 0.0, "Lipschitz constant must be nonnegative");
        SmoothTerm {
            kind: SmoothKind::Custom {
                value: Arc::new(value),
                gradient: Arc::new(gradient),
            },
            lipschitz,
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match &self.kind {
            SmoothKind::Quadratic { a, b } => 0.5 * (a * x).dot(x) + b.dot(x),
            SmoothKind::Custom { value, .. } => value(x),
        }
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            SmoothKind::Quadratic { a, b } => a * x + b,
            SmoothKind::Custom { gradient, .. } => gradient(x),
        }
    }

    /// Declared gradient Lipschitz constant `L`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// The quadratic data `(A, b)` when this term was built by
    /// [`SmoothTerm::quadratic`]. Oracles use it for direct solves.
    pub fn quadratic_data(&self) -> Option<(&DMatrix<f64>, &DVector<f64>)> {
        match &self.kind {
            SmoothKind::Quadratic { a, b } => Some((a, b)),
            SmoothKind::Custom { .. } => None,
        }
    }

    /// Sampled-ratio check of the declared Lipschitz constant:
    /// `||grad(x) - grad(y)|| <= L ||x - y||` must hold up to relative
    /// slack `1e-9` on every sampled pair.
    pub fn validate_lipschitz(&self, dim: usize, samples: usize, rng: &mut impl Rng) -> Result<()> {
        for _ in 0..samples {
            let x = DVector::from_fn(dim, |_, _| rng.gen_range(-10.0..10.0));
            let y = DVector::from_fn(dim, |_, _| rng.gen_range(-10.0..10.0));
            let dx = (&x - &y).norm();
            if dx == 0.0 {
                continue;
            }
            let dg = (self.gradient(&x) - self.gradient(&y)).norm();
            if dg > self.lipschitz * dx * (1.0 + 1e-9) {
                return Err(Error::LipschitzViolated {
                    declared: self.lipschitz,
                    observed: dg / dx,
                });
            }
        }
        Ok(())
    }
}

type ExtValueFn = Arc<dyn Fn(&DVector<f64>) -> ExtReal + Send + Sync>;
type ProxFn = Arc<dyn Fn(&DVector<f64>, f64) -> DVector<f64> + Send + Sync>;

/// Proper lower-semicontinuous convex term with an exact proximal map.
///
/// The three builtin families (zero, `lambda * l1`, box indicator) carry
/// exact subdifferential distances; custom terms fall back to the gradient
/// mapping surrogate in [`subdiff_distance`].
#[derive(Clone)]
pub enum ProxTerm {
    /// `g(x) = 0`.
    Zero,
    /// `g(x) = lambda * ||x||_1` with `lambda >= 0`.
    L1 { lambda: f64 },
    /// Indicator of the box `[lo, hi]^n` (the same interval per coordinate).
    Box { lo: f64, hi: f64 },
    /// User-supplied value and prox.
    Custom { value: ExtValueFn, prox: ProxFn },
}

impl fmt::Debug for ProxTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProxTerm::Zero => write!(f, "ProxTerm::Zero"),
            ProxTerm::L1 { lambda } => write!(f, "ProxTerm::L1({lambda})"),
            ProxTerm::Box { lo, hi } => write!(f, "ProxTerm::Box[{lo}, {hi}]"),
            ProxTerm::Custom { .. } => write!(f, "ProxTerm::Custom"),
        }
    }
}

fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

impl ProxTerm {
    pub fn zero() -> ProxTerm {
        ProxTerm::Zero
    }

    pub fn l1(lambda: f64) -> ProxTerm {
        assert!(lambda >= 0.0, "l1 weight must be nonnegative");
        ProxTerm::L1 { lambda }
    }

    pub fn box_indicator(lo: f64, hi: f64) -> ProxTerm {
        assert!(lo <= hi, "box bounds must satisfy lo <= hi");
        ProxTerm::Box { lo, hi }
    }

    pub fn custom(
        value: impl Fn(&DVector<f64>) -> ExtReal + Send + Sync + 'static,
        prox: impl Fn(&DVector<f64>, f64) -> DVector<f64> + Send + Sync + 'static,
    ) -> ProxTerm {
        ProxTerm::Custom {
            value: Arc::new(value),
            prox: Arc::new(prox),
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> ExtReal {
        match self {
            ProxTerm::Zero => ExtReal::Finite(0.0),
            ProxTerm::L1 { lambda } => {
                ExtReal::Finite(lambda * x.iter().map(|v| v.abs()).sum::<f64>())
            }
            ProxTerm::Box { lo, hi } => {
                if x.iter().all(|&v| v >= *lo && v <= *hi) {
                    ExtReal::Finite(0.0)
                } else {
                    ExtReal::PosInf
                }
            }
            ProxTerm::Custom { value, .. } => value(x),
        }
    }

    /// `prox_{c g}(v) = argmin_x 0.5 ||x - v||^2 + c g(x)` for `c > 0`.
    pub fn prox(&self, v: &DVector<f64>, c: f64) -> DVector<f64> {
        assert!(c > 0.0, "prox scale must be positive");
        match self {
            ProxTerm::Zero => v.clone(),
            ProxTerm::L1 { lambda } => v.map(|vi| soft_threshold(vi, c * lambda)),
            ProxTerm::Box { lo, hi } => v.map(|vi| vi.clamp(*lo, *hi)),
            ProxTerm::Custom { prox, .. } => prox(v, c),
        }
    }

    /// Whether `x` lies in `dom g`.
    pub fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.value(x).is_finite()
    }

    /// Exact `d(0, grad_f + dg(x))` when a closed form exists for this
    /// family. `grad_f` is the smooth gradient at `x`. Returns `None` for
    /// custom terms and `Err` when `x` is outside `dom g`.
    fn exact_subdiff_distance(
        &self,
        x: &DVector<f64>,
        grad_f: &DVector<f64>,
    ) -> Option<Result<f64>> {
        match self {
            ProxTerm::Zero => Some(Ok(grad_f.norm())),
            ProxTerm::L1 { lambda } => {
                // Separable: distance of -grad coordinate to lambda*[-1,1]
                // at zeros, exact singleton lambda*sign(x_j) elsewhere.
                let mut sq = 0.0;
                for j in 0..x.len() {
                    let d = if x[j] > 0.0 {
                        grad_f[j] + lambda
                    } else if x[j] < 0.0 {
                        grad_f[j] - lambda
                    } else {
                        (grad_f[j].abs() - lambda).max(0.0)
                    };
                    sq += d * d;
                }
                Some(Ok(sq.sqrt()))
            }
            ProxTerm::Box { lo, hi } => {
                if !self.in_domain(x) {
                    return Some(Err(Error::OutsideDomain));
                }
                let mut sq = 0.0;
                for j in 0..x.len() {
                    let at_lo = x[j] <= *lo;
                    let at_hi = x[j] >= *hi;
                    let d = match (at_lo, at_hi) {
                        (true, true) => 0.0, // degenerate interval, normal cone is R
                        (true, false) => (-grad_f[j]).max(0.0),
                        (false, true) => grad_f[j].max(0.0),
                        (false, false) => grad_f[j],
                    };
                    sq += d * d;
                }
                Some(Ok(sq.sqrt()))
            }
            ProxTerm::Custom { .. } => None,
        }
    }
}

/// Representatives of the builtin prox families: the zero function, the l1
/// norm, and a box indicator. All three carry exact subdifferential
/// distances; samplers and smoke tests iterate this catalog.
pub fn builtin_prox_terms() -> Vec<ProxTerm> {
    vec![
        ProxTerm::zero(),
        ProxTerm::l1(1.0),
        ProxTerm::box_indicator(-1.0, 1.0),
    ]
}

/// `phi = f + g`: the composite objective the whole crate works with.
#[derive(Debug, Clone)]
pub struct CompositeObjective {
    pub smooth: SmoothTerm,
    pub nonsmooth: ProxTerm,
}

/// One prox-gradient application with its gradient mapping.
#[derive(Debug, Clone)]
pub struct ProxGradStep {
    /// `T(x) = prox_{c g}(x - c grad f(x))`.
    pub point: DVector<f64>,
    /// `G(x) = (x - T(x)) / c`; vanishes exactly at composite minimizers.
    pub gradient_mapping: DVector<f64>,
}

/// Result of a subdifferential distance query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubdiffDistance {
    /// Exact `d(0, dphi(x))` from a closed form.
    Exact(f64),
    /// Gradient-mapping surrogate `||G(x)||` (no closed form available).
    Surrogate(f64),
}

impl SubdiffDistance {
    pub fn value(self) -> f64 {
        match self {
            SubdiffDistance::Exact(v) | SubdiffDistance::Surrogate(v) => v,
        }
    }

    pub fn is_surrogate(self) -> bool {
        matches!(self, SubdiffDistance::Surrogate(_))
    }
}

impl CompositeObjective {
    pub fn new(smooth: SmoothTerm, nonsmooth: ProxTerm) -> CompositeObjective {
        CompositeObjective { smooth, nonsmooth }
    }

    /// `phi(x) = f(x) + g(x)`.
    pub fn value(&self, x: &DVector<f64>) -> ExtReal {
        ExtReal::Finite(self.smooth.value(x)) + self.nonsmooth.value(x)
    }

    /// Largest admissible prox-gradient step: `1/L`, or 1 when `L = 0`.
    pub fn max_step(&self) -> f64 {
        let l = self.smooth.lipschitz();
        if l > 0.0 {
            1.0 / l
        } else {
            1.0
        }
    }

    fn check_step(&self, c: f64) -> Result<()> {
        let l = self.smooth.lipschitz();
        let ok = if l > 0.0 {
            c > 0.0 && c <= 1.0 / l
        } else {
            c > 0.0
        };
        if ok {
            Ok(())
        } else {
            Err(Error::StepOutOfRange {
                step: c,
                lipschitz: l,
            })
        }
    }
}

/// Prox-gradient operator `T(x) = prox_{c g}(x - c grad f(x))` with its
/// gradient mapping `G(x) = (x - T(x)) / c`.
///
/// Requires `0 < c <= 1/L` (any `c > 0` when `L = 0`).
pub fn prox_grad_map(obj: &CompositeObjective, x: &DVector<f64>, c: f64) -> Result<ProxGradStep> {
    obj.check_step(c)?;
    let forward = x - c * obj.smooth.gradient(x);
    let point = obj.nonsmooth.prox(&forward, c);
    let gradient_mapping = (x - &point) / c;
    Ok(ProxGradStep {
        point,
        gradient_mapping,
    })
}

/// `d(0, dphi(x))`: exact for the builtin prox families, gradient-mapping
/// surrogate `||G(x)||` at step `1/L` otherwise (flagged).
pub fn subdiff_distance(obj: &CompositeObjective, x: &DVector<f64>) -> Result<SubdiffDistance> {
    if !obj.nonsmooth.in_domain(x) {
        return Err(Error::OutsideDomain);
    }
    let grad = obj.smooth.gradient(x);
    match obj.nonsmooth.exact_subdiff_distance(x, &grad) {
        Some(r) => r.map(SubdiffDistance::Exact),
        None => {
            let c = obj.max_step();
            let step = prox_grad_map(obj, x, c)?;
            Ok(SubdiffDistance::Surrogate(step.gradient_mapping.norm()))
        }
    }
}

/// Time-indexed family of `N` composite objectives over a fixed dimension.
#[derive(Debug, Clone)]
pub struct ObjectiveStream {
    dim: usize,
    slices: Vec<Vec<CompositeObjective>>,
}

impl ObjectiveStream {
    /// Build from per-time slices; every slice must hold the same number of
    /// objectives, with objective identity stable across time.
    pub fn from_slices(dim: usize, slices: Vec<Vec<CompositeObjective>>) -> ObjectiveStream {
        assert!(
            !slices.is_empty(),
            "stream must cover at least one time step"
        );
        let n = slices[0].len();
        assert!(n > 0, "stream must hold at least one objective");
        assert!(
            slices.iter().all(|s| s.len() == n),
            "every time step must hold the same number of objectives"
        );
        ObjectiveStream { dim, slices }
    }

    /// Decision dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of objectives `N`.
    pub fn num_objectives(&self) -> usize {
        self.slices[0].len()
    }

    /// Horizon `T` (number of available time steps).
    pub fn horizon(&self) -> usize {
        self.slices.len()
    }

    /// Objectives at time `t` (1-based, `1 <= t <= T`).
    pub fn at(&self, t: usize) -> &[CompositeObjective] {
        assert!(t >= 1 && t <= self.slices.len(), "time index out of range");
        &self.slices[t - 1]
    }
}
