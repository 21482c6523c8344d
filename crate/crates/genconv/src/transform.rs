//! The modified Stieltjes transform R_gamma(u; mu) = integral of
//! (1 - i u x)^(-gamma) d mu(x), its Fourier (gamma -> infinity) and
//! logarithmic (gamma -> 0) limits, its moment series, and the
//! gamma-scale-mixture reading of the same integral.

use num_complex::Complex64;
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::measures::{MixtureMeasure, MomentSequence, ScaledBetaComponent};
use crate::specfun::{self, neumaier, QuadratureRule};

/// Absolute tolerance requested from beta-component quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// Dyadic refinement cap for adaptive quadrature.
const MAX_REFINEMENT_DEPTH: usize = 20;

static GL64: Lazy<QuadratureRule> =
    Lazy::new(|| specfun::gauss_legendre(64).expect("64 is a valid order"));

/// Compensated accumulation of complex values, component-wise.
#[derive(Debug, Default, Clone, Copy)]
struct ComplexSum {
    re: neumaier::Sum,
    im: neumaier::Sum,
}

impl ComplexSum {
    fn new() -> Self {
        Self::default()
    }

    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// The transform kernel (1 - i u x)^(-gamma), evaluated through the
/// principal logarithm. Re(1 - i u x) = 1 > 0, so the argument never
/// crosses the branch cut and the principal choice is canonical.
#[inline]
fn kernel(u: f64, gamma: f64, x: f64) -> Complex64 {
    (-gamma * Complex64::new(1.0, -u * x).ln()).exp()
}

/// Sampled transform values over a u-grid.
#[derive(Debug, Clone)]
pub struct TransformGrid {
    pub gamma: f64,
    pub u_values: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// R_gamma(u; mu). Dirac atoms contribute closed-form kernel values;
/// scaled beta components are integrated adaptively to [`QUAD_TOL`].
/// R_gamma(0; mu) = 1 exactly for every probability measure.
pub fn r_transform(measure: &MixtureMeasure, gamma: f64, u: f64) -> Result<Complex64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    if !u.is_finite() {
        return Err(Error::Domain(format!("u must be finite, got {u}")));
    }
    if u == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    integrate_measure(measure, |x| kernel(u, gamma, x))
}

/// Characteristic function phi(u) = integral of exp(i u x) d mu(x).
pub fn characteristic_function(measure: &MixtureMeasure, u: f64) -> Result<Complex64> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("u must be finite, got {u}")));
    }
    if u == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    integrate_measure(measure, |x| Complex64::new(0.0, u * x).exp())
}

/// | R_gamma(u/gamma; mu) - phi(u; mu) |: how far the rescaled transform
/// still is from its Fourier limit at a finite gamma.
pub fn fourier_limit_residual(measure: &MixtureMeasure, gamma: f64, u: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    let r = r_transform(measure, gamma, u / gamma)?;
    let phi = characteristic_function(measure, u)?;
    Ok((r - phi).norm())
}

/// integral of log(1/(1 - i u x)) d mu(x), the gamma -> 0 limit of
/// (R_gamma(u) - 1)/gamma, using the principal logarithm.
pub fn log_limit(measure: &MixtureMeasure, u: f64) -> Result<Complex64> {
    if !u.is_finite() {
        return Err(Error::Domain(format!("u must be finite, got {u}")));
    }
    if u == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    integrate_measure(measure, |x| -Complex64::new(1.0, -u * x).ln())
}

/// | (R_gamma(u) - 1)/gamma - log_limit(u) |: distance from the small-gamma
/// limit at a finite gamma.
pub fn log_limit_residual(measure: &MixtureMeasure, gamma: f64, u: f64) -> Result<f64> {
    let r = r_transform(measure, gamma, u)?;
    let l = log_limit(measure, u)?;
    Ok(((r - 1.0) / gamma - l).norm())
}

/// Partial sum of the moment series: sum over k = 0..=k_max of
/// (gamma)_k / k! * kappa_k * (i u)^k.
///
/// This is a partial-sum primitive; it performs no convergence test, and
/// divergence outside the series' radius is the caller's concern.
pub fn series_eval(
    moments: &MomentSequence,
    gamma: f64,
    u: f64,
    k_max: usize,
) -> Result<Complex64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    if k_max > moments.order() {
        return Err(Error::Domain(format!(
            "series order {k_max} exceeds available moments {}",
            moments.order()
        )));
    }
    let iu = Complex64::new(0.0, u);
    let mut acc = ComplexSum::new();
    let mut coeff = 1.0; // (gamma)_k / k!
    let mut iu_pow = Complex64::new(1.0, 0.0);
    for k in 0..=k_max {
        acc.add(coeff * moments.get(k) * iu_pow);
        coeff *= (gamma + k as f64) / (k as f64 + 1.0);
        iu_pow *= iu;
    }
    Ok(acc.value())
}

/// Characteristic function of a gamma distribution whose scale parameter is
/// random with law `mixing` (negative scales meaning the mirrored gamma on
/// the negative axis). Definitionally equal to `r_transform(mixing, gamma, t)`;
/// this entry point exists to expose the probabilistic interpretation.
pub fn gamma_mixture_cf(mixing: &MixtureMeasure, gamma: f64, t: f64) -> Result<Complex64> {
    r_transform(mixing, gamma, t)
}

/// Transform values over a grid of u values (u = 0 produces exactly 1).
pub fn evaluate_grid(measure: &MixtureMeasure, gamma: f64, us: &[f64]) -> Result<TransformGrid> {
    let mut values = Vec::with_capacity(us.len());
    for &u in us {
        values.push(r_transform(measure, gamma, u)?);
    }
    Ok(TransformGrid {
        gamma,
        u_values: us.to_vec(),
        values,
    })
}

fn integrate_measure<F: Fn(f64) -> Complex64>(
    measure: &MixtureMeasure,
    f: F,
) -> Result<Complex64> {
    let mut acc = ComplexSum::new();
    for &(x, w) in measure.diracs() {
        acc.add(w * f(x));
    }
    for &(w, c) in measure.betas() {
        let (v, _) = integrate_beta_expectation(&c, &f, QUAD_TOL)?;
        acc.add(w * v);
    }
    Ok(acc.value())
}

/// Route decisions and effort bookkeeping for one adaptive integration.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadDiagnostics {
    /// Endpoint-softening substitution applied at the left endpoint (alpha < 1).
    pub softened_left: bool,
    /// Endpoint-softening substitution applied at the right endpoint (beta < 1).
    pub softened_right: bool,
    /// Deepest dyadic refinement level reached.
    pub max_depth: usize,
    /// Total 64-point panel evaluations.
    pub panels: usize,
    /// Final accumulated error estimate.
    pub error_estimate: f64,
}

/// E[f(W)] for W distributed as the scaled beta component: the integral of
/// the component density times `f`, to absolute tolerance `tol`.
///
/// Integrable endpoint singularities (alpha < 1 or beta < 1) are removed by
/// the substitutions s = t^alpha / s = (1-t)^beta before the adaptive
/// Gauss-Legendre refinement; the choice is reported in the diagnostics.
pub fn integrate_beta_expectation<F: Fn(f64) -> Complex64>(
    c: &ScaledBetaComponent,
    f: &F,
    tol: f64,
) -> Result<(Complex64, QuadDiagnostics)> {
    let ln_norm = specfun::ln_beta(c.alpha, c.beta)?;
    let inv_beta = (-ln_norm).exp();
    let (a, width) = (c.a, c.b - c.a);
    let g = |t: f64| f(a + width * t);

    let mut diag = QuadDiagnostics {
        softened_left: c.alpha < 1.0,
        softened_right: c.beta < 1.0,
        ..Default::default()
    };
    let mut acc = ComplexSum::new();

    // Left piece: t in [0, 1/2].
    if c.alpha < 1.0 {
        // s = t^alpha removes the t^(alpha-1) factor exactly.
        let upper = 0.5f64.powf(c.alpha);
        let scale = inv_beta / c.alpha;
        let integrand = |s: f64| {
            let t = s.powf(1.0 / c.alpha);
            scale * (1.0 - t).powf(c.beta - 1.0) * g(t)
        };
        adaptive(&integrand, 0.0, upper, 0.5 * tol, &mut acc, &mut diag);
    } else {
        let integrand =
            |t: f64| inv_beta * t.powf(c.alpha - 1.0) * (1.0 - t).powf(c.beta - 1.0) * g(t);
        adaptive(&integrand, 0.0, 0.5, 0.5 * tol, &mut acc, &mut diag);
    }

    // Right piece: t in [1/2, 1].
    if c.beta < 1.0 {
        let upper = 0.5f64.powf(c.beta);
        let scale = inv_beta / c.beta;
        let integrand = |s: f64| {
            let t = 1.0 - s.powf(1.0 / c.beta);
            scale * t.powf(c.alpha - 1.0) * g(t)
        };
        adaptive(&integrand, 0.0, upper, 0.5 * tol, &mut acc, &mut diag);
    } else {
        let integrand =
            |t: f64| inv_beta * t.powf(c.alpha - 1.0) * (1.0 - t).powf(c.beta - 1.0) * g(t);
        adaptive(&integrand, 0.5, 1.0, 0.5 * tol, &mut acc, &mut diag);
    }

    if diag.error_estimate > tol {
        return Err(Error::QuadratureNonConvergence {
            achieved: diag.error_estimate,
            requested: tol,
        });
    }
    Ok((acc.value(), diag))
}

fn gl_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = ComplexSum::new();
    for (&x, &w) in GL64.nodes.iter().zip(&GL64.weights) {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    acc: &mut ComplexSum,
    diag: &mut QuadDiagnostics,
) {
    let whole = gl_panel(f, a, b);
    diag.panels += 1;
    refine(f, a, b, whole, tol, MAX_REFINEMENT_DEPTH, acc, diag);
}

fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: usize,
    acc: &mut ComplexSum,
    diag: &mut QuadDiagnostics,
) {
    let mid = 0.5 * (a + b);
    let left = gl_panel(f, a, mid);
    let right = gl_panel(f, mid, b);
    diag.panels += 2;
    diag.max_depth = diag.max_depth.max(MAX_REFINEMENT_DEPTH - depth + 1);
    let delta = (left + right - whole).norm();
    if delta <= tol || depth == 0 || mid <= a || mid >= b {
        acc.add(left);
        acc.add(right);
        diag.error_estimate += delta;
        return;
    }
    refine(f, a, mid, left, 0.5 * tol, depth - 1, acc, diag);
    refine(f, mid, b, right, 0.5 * tol, depth - 1, acc, diag);
}
