//! Verification harness: every identity the library claims, measured at
//! fixed tolerances with seeded randomness and reported as a machine-readable
//! check list. This is the engine behind the CLI `verify` subcommand.
//!
//! One check is expected to fail: the pair beta-stability law in the form
//! "beta(n,n) star_n beta(n,n) = beta(2n,2n)" does not hold (the harness
//! measures a defect near 1e-2), while the index-corrected form (star_2n)
//! and the half-shift form (inputs beta(n+1/2), target beta(2n+1/2), the
//! k = 2 case of the k-tuple stability law) both hold to full precision.
//! The failing check is kept as stated so the defect stays visible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::convolve::{
    associativity_defect, classical_limit_residual, pair_conv_moments, star_n, verify_identity,
    DirichletParams,
};
use crate::error::Result;
use crate::measures::{
    discretize_scaled_beta, moments_of, scaled_beta_cdf, DiscreteMeasure, MixtureMeasure,
    MixturePart, ScaledBetaComponent,
};
use crate::sampler::{
    empirical_moments, ks_statistic, sample_beta_linear_form, sample_linear_form, substream_seed,
    SampleBatch,
};
use crate::specfun::{hyp2f1_terminating, neumaier};
use crate::transform::{log_limit_residual, r_transform, series_eval};

/// Seed the bundled suite runs under unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 42;

/// How a check's `max_error` compares against its `tolerance` to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Passes when `max_error <= tolerance` (the usual case).
    AtMost,
    /// Passes when `max_error >= tolerance` (witnesses that must be large,
    /// e.g. the non-associativity defect).
    AtLeast,
}

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub mode: CheckMode,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: &str, max_error: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            max_error,
            tolerance,
            mode: CheckMode::AtMost,
            passed: max_error <= tolerance,
            detail,
        }
    }

    fn at_least(name: &str, max_error: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            max_error,
            tolerance,
            mode: CheckMode::AtLeast,
            passed: max_error >= tolerance,
            detail,
        }
    }
}

/// Full report of the verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

/// Runs the bundled suite. Deterministic for a fixed seed.
pub fn run_default_suite(seed: u64) -> Result<VerifyReport> {
    let s = |i: u64| substream_seed(seed, i);
    let mut checks = Vec::new();
    checks.push(defining_identity(s(1))?);
    checks.push(pair_moment_routes(s(2))?);
    checks.push(pair_moment_monte_carlo(s(3))?);
    let (bridge, alternate) = hypergeometric_checks(s(4))?;
    checks.push(bridge);
    checks.push(alternate);
    checks.extend(beta_stability_pair_checks()?);
    checks.extend(beta_stability_ktuple_checks(s(8))?);
    checks.extend(fourier_limit_checks()?);
    checks.push(log_limit_check()?);
    checks.push(series_expansion_check(s(11))?);
    checks.extend(non_associativity_checks()?);
    checks.extend(classical_limit_checks(s(13))?);
    checks.push(determinism_check(s(3), s(8), s(13))?);
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        seed,
        checks,
        all_passed,
    })
}

fn rng_for(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn random_discrete<R: Rng>(rng: &mut R, max_atoms: usize, span: f64) -> DiscreteMeasure {
    let k = rng.random_range(1..=max_atoms);
    let mut atoms: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            (
                rng.random_range(-span..span),
                rng.random::<f64>() + 0.05,
            )
        })
        .collect();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    for a in &mut atoms {
        a.1 /= total;
    }
    DiscreteMeasure::new(atoms).expect("normalized random atoms form a measure")
}

/// Moment comparisons are scaled by max(1, S)^m, S the largest atom
/// magnitude: the intrinsic size of an order-m moment.
fn scaled_gap(x: f64, y: f64, s: f64, m: usize) -> f64 {
    (x - y).abs() / s.max(1.0).powi(m as i32)
}

/// Defining identity R_2n(u; mu1 star_n mu2) = R_n(u; mu1) R_n(u; mu2) over
/// random discrete pairs and a u grid.
pub fn defining_identity(seed: u64) -> Result<CheckResult> {
    let grid: Vec<f64> = (0..41).map(|i| -10.0 + 0.5 * i as f64).collect();
    let mut rng = rng_for(seed);
    let mut worst = 0.0f64;
    for &n in &[0.5, 1.0, 2.0, 3.5] {
        for _ in 0..20 {
            let m1 = random_discrete(&mut rng, 5, 3.0);
            let m2 = random_discrete(&mut rng, 5, 3.0);
            worst = worst.max(verify_identity(&m1, &m2, n, &grid)?);
        }
    }
    Ok(CheckResult::at_most(
        "defining_identity",
        worst,
        1e-8,
        "max |R_2n(u; nu) - R_n(u; mu1) R_n(u; mu2)| over n in {0.5,1,2,3.5}, \
         20 random pairs (<=5 atoms in [-3,3]) each, 41-point u grid on [-10,10]"
            .to_string(),
    ))
}

fn random_pair_triples(seed: u64, count: usize) -> Vec<(f64, f64, f64)> {
    let mut rng = rng_for(seed);
    (0..count)
        .map(|_| {
            (
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.5..4.0),
            )
        })
        .collect()
}

/// Moment-route / mixture-route agreement for delta_a star_n delta_b.
pub fn pair_moment_routes(seed: u64) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for (a, b, n) in random_pair_triples(seed, 50) {
        let direct = pair_conv_moments(a, b, n, 20)?;
        let nu = star_n(&DiscreteMeasure::dirac(a), &DiscreteMeasure::dirac(b), n)?;
        let via_mixture = moments_of(&nu, 20)?;
        let s = a.abs().max(b.abs());
        for m in 0..=20 {
            worst = worst.max(scaled_gap(direct.get(m), via_mixture.get(m), s, m));
        }
    }
    Ok(CheckResult::at_most(
        "pair_moment_routes",
        worst,
        1e-10,
        "pair_conv_moments vs moments_of(star_n(delta_a, delta_b, n)), 50 random \
         (a,b,n), M = 20; gaps scaled by max(1, max(|a|,|b|))^m"
            .to_string(),
    ))
}

/// Exact pair-convolution moments against 10^6-sample Monte Carlo.
pub fn pair_moment_monte_carlo(seed: u64) -> Result<CheckResult> {
    let mut worst_sigmas = 0.0f64;
    for (i, (a, b, n)) in random_pair_triples(seed, 50).into_iter().enumerate() {
        let exact = pair_conv_moments(a, b, n, 6)?;
        let params = DirichletParams::symmetric(n, 2)?;
        let mus = [DiscreteMeasure::dirac(a), DiscreteMeasure::dirac(b)];
        let batch = sample_linear_form(&mus, &params, 1_000_000, substream_seed(seed, 100 + i as u64))?;
        let em = empirical_moments(&batch, 6)?;
        for m in 1..=6 {
            let se = em.std_errors[m].max(1e-300);
            worst_sigmas = worst_sigmas.max((em.moments.get(m) - exact.get(m)).abs() / se);
        }
    }
    Ok(CheckResult::at_most(
        "pair_moment_monte_carlo",
        worst_sigmas,
        4.0,
        "exact pair moments vs empirical moments of 10^6 sampled a X + b (1-X) \
         per triple, m <= 6; reported in standard errors"
            .to_string(),
    ))
}

/// The hypergeometric bridge kappa_m = b^m 2F1(-m, n; 2n; 1 - a/b), plus the
/// alternate form b^m (n)_m / (2n)_m * 2F1(-m, n; 1-m-n; a/b), whose outcome
/// is recorded rather than assumed.
pub fn hypergeometric_checks(seed: u64) -> Result<(CheckResult, CheckResult)> {
    let mut rng = rng_for(seed);
    let mut worst_bridge = 0.0f64;
    let mut worst_alternate = 0.0f64;
    for _ in 0..50 {
        // same-sign pairs with a/b in [0.5, 1.5]: |1 - a/b| <= 0.5 keeps the
        // z-form series well conditioned in f64
        let b: f64 = {
            let mag = rng.random_range(0.5..3.0);
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        };
        let a = b * rng.random_range(0.5..1.5);
        let n = rng.random_range(0.5..4.0);
        let exact = pair_conv_moments(a, b, n, 20)?;
        let s = a.abs().max(b.abs());
        let mut poch_ratio = 1.0; // (n)_m / (2n)_m
        for m in 0..=20usize {
            let bridge = b.powi(m as i32) * hyp2f1_terminating(m, n, 2.0 * n, 1.0 - a / b)?;
            worst_bridge = worst_bridge.max(scaled_gap(exact.get(m), bridge, s, m));
            let alternate = b.powi(m as i32)
                * poch_ratio
                * hyp2f1_terminating(m, n, 1.0 - m as f64 - n, a / b)?;
            worst_alternate = worst_alternate.max(scaled_gap(exact.get(m), alternate, s, m));
            poch_ratio *= (n + m as f64) / (2.0 * n + m as f64);
        }
    }
    let bridge = CheckResult::at_most(
        "hypergeometric_bridge",
        worst_bridge,
        1e-10,
        "kappa_m vs b^m 2F1(-m, n; 2n; 1 - a/b), 50 random same-sign (a,b) with \
         a/b in [0.5,1.5], m <= 20; gaps scaled by max(1, max(|a|,|b|))^m"
            .to_string(),
    );
    let outcome = if worst_alternate <= 1e-8 {
        "alternate form matches the sign-free moments with NO correction factor"
    } else {
        "alternate form DOES NOT match the sign-free moments; a correction factor is required"
    };
    let alternate = CheckResult::at_most(
        "hypergeometric_alternate_form",
        worst_alternate,
        1e-8,
        format!(
            "recorded probe of kappa_m vs b^m (n)_m/(2n)_m 2F1(-m, n; 1-m-n; a/b): {outcome}"
        ),
    );
    Ok((bridge, alternate))
}

fn beta_measure(a: f64, b: f64, alpha: f64, beta: f64) -> Result<MixtureMeasure> {
    MixtureMeasure::new(vec![(
        1.0,
        MixturePart::Beta(ScaledBetaComponent::new(a, b, alpha, beta)?),
    )])
}

/// Max scaled moment gap (m <= 10) between `star_index`-convolving two
/// discretized beta(alpha_in, alpha_in) inputs on (a, b) and the
/// beta(alpha_out, alpha_out) target on the same interval.
///
/// The 40-point Gauss-Jacobi discretization reproduces the input moments
/// through order 79 exactly up to rounding, and the convolution moments of
/// order m depend only on input moments up to m, so the approximation
/// budget of this route is pure f64 roundoff (~1e-13 at these scales).
fn pair_stability_gap(a: f64, b: f64, alpha_in: f64, star_index: f64, alpha_out: f64) -> Result<f64> {
    let input = ScaledBetaComponent::new(a, b, alpha_in, alpha_in)?;
    let input_hat = discretize_scaled_beta(&input, 40)?;
    let nu = star_n(&input_hat, &input_hat, star_index)?;
    let got = moments_of(&nu, 10)?;
    let target = moments_of(&beta_measure(a, b, alpha_out, alpha_out)?, 10)?;
    let s = a.abs().max(b.abs());
    let mut worst = 0.0f64;
    for m in 0..=10 {
        worst = worst.max(scaled_gap(got.get(m), target.get(m), s, m));
    }
    Ok(worst)
}

/// Pair beta-stability checks: the law as stated (star index n, inputs and
/// target as printed), the direct transform-identity route for the same law,
/// and the two corrected forms that actually hold.
pub fn beta_stability_pair_checks() -> Result<Vec<CheckResult>> {
    let cases = [(0.0, 1.0, 1.0), (-1.0, 2.0, 2.5)];

    let mut as_stated = 0.0f64;
    let mut corrected_index = 0.0f64;
    let mut half_shift = 0.0f64;
    let mut transform_route = 0.0f64;
    let mut details = Vec::new();
    for &(a, b, n) in &cases {
        let stated = pair_stability_gap(a, b, n, n, 2.0 * n)?;
        as_stated = as_stated.max(stated);
        corrected_index = corrected_index.max(pair_stability_gap(a, b, n, 2.0 * n, 2.0 * n)?);
        half_shift = half_shift.max(pair_stability_gap(a, b, n + 0.5, n, 2.0 * n + 0.5)?);
        details.push(format!("(A,B,n)=({a},{b},{n}): stated-form defect {stated:.3e}"));

        // transform route for the stated law:
        // R_2n(u; beta(2n,2n)) vs R_n(u; beta(n,n))^2
        let input = beta_measure(a, b, n, n)?;
        let target = beta_measure(a, b, 2.0 * n, 2.0 * n)?;
        for i in 0..=20 {
            let u = -5.0 + 0.5 * i as f64;
            let lhs = r_transform(&target, 2.0 * n, u)?;
            let rhs = r_transform(&input, n, u)?;
            transform_route = transform_route.max((lhs - rhs * rhs).norm());
        }
    }

    Ok(vec![
        CheckResult::at_most(
            "beta_stability_pair_as_stated",
            as_stated,
            1e-8,
            format!(
                "beta(n,n) star_n beta(n,n) vs beta(2n,2n), moments m <= 10 via 40-point \
                 Gauss-Jacobi discretization; {}; this law has a genuine nonzero defect; \
                 see the corrected-index and half-shift checks, which pass",
                details.join("; ")
            ),
        ),
        CheckResult::at_most(
            "beta_stability_pair_transform_route",
            transform_route,
            1e-6,
            "same law through the defining identity: max |R_2n(u; beta(2n,2n)) - \
             R_n(u; beta(n,n))^2| over u in [-5,5]; fails with the same defect"
                .to_string(),
        ),
        CheckResult::at_most(
            "beta_stability_pair_corrected_index",
            corrected_index,
            1e-8,
            "index-corrected law: beta(n,n) star_2n beta(n,n) = beta(2n,2n) \
             (star index 2n), moments m <= 10"
                .to_string(),
        ),
        CheckResult::at_most(
            "beta_stability_pair_half_shift",
            half_shift,
            1e-8,
            "half-shift law (k = 2 case of the k-tuple stability): \
             beta(n+1/2,n+1/2) star_n beta(n+1/2,n+1/2) = beta(2n+1/2,2n+1/2), \
             moments m <= 10"
                .to_string(),
        ),
    ])
}

/// k-tuple beta stability: for r = (0.5, 1, 2), inputs beta(r_j+1/2, r_j+1/2)
/// on (0,1) mixed by Dirichlet(r) weights give beta(sum r + 1/2, sum r + 1/2);
/// tested by KS and by empirical moments on 10^5 draws.
pub fn beta_stability_ktuple_checks(seed: u64) -> Result<Vec<CheckResult>> {
    const N: usize = 100_000;
    let r = [0.5, 1.0, 2.0];
    let components: Vec<ScaledBetaComponent> = r
        .iter()
        .map(|&rj| ScaledBetaComponent::new(0.0, 1.0, rj + 0.5, rj + 0.5))
        .collect::<Result<_>>()?;
    let params = DirichletParams::new(r.to_vec())?;
    let batch = sample_beta_linear_form(&components, &params, N, seed)?;

    let total: f64 = 0.5 + r.iter().sum::<f64>();
    let target = ScaledBetaComponent::new(0.0, 1.0, total, total)?;
    let d = ks_statistic(&batch, |x| scaled_beta_cdf(&target, x));
    let crit = 1.63 / (N as f64).sqrt();

    let exact = moments_of(&beta_measure(0.0, 1.0, total, total)?, 6)?;
    let em = empirical_moments(&batch, 6)?;
    let mut sigmas = 0.0f64;
    for m in 1..=6 {
        let se = em.std_errors[m].max(1e-300);
        sigmas = sigmas.max((em.moments.get(m) - exact.get(m)).abs() / se);
    }

    Ok(vec![
        CheckResult::at_most(
            "beta_stability_ktuple_ks",
            d,
            crit,
            format!(
                "KS distance of 10^5 Dirichlet(0.5,1,2) linear-form draws of \
                 beta(r_j+1/2) inputs against beta({total},{total}); 1% critical value"
            ),
        ),
        CheckResult::at_most(
            "beta_stability_ktuple_moments",
            sigmas,
            4.0,
            "empirical moments m <= 6 of the same draws vs exact target moments, \
             in standard errors"
                .to_string(),
        ),
    ])
}

fn limit_test_measures() -> Vec<MixtureMeasure> {
    vec![
        DiscreteMeasure::dirac(1.0).into(),
        MixtureMeasure::new(vec![
            (0.5, MixturePart::Dirac(1.0)),
            (0.5, MixturePart::Dirac(-1.0)),
        ])
        .expect("valid mixture"),
    ]
}

/// Fourier-limit residual size and decay: |R_gamma(u/gamma) - phi(u)| at
/// gamma = 10^4 must be small and at most 1/50 of its gamma = 10^2 value.
pub fn fourier_limit_checks() -> Result<Vec<CheckResult>> {
    let mut worst_size = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for m in limit_test_measures() {
        for &u in &[1.0, 5.0] {
            let fine = crate::transform::fourier_limit_residual(&m, 1e4, u)?;
            let coarse = crate::transform::fourier_limit_residual(&m, 1e2, u)?;
            worst_size = worst_size.max(fine);
            worst_ratio = worst_ratio.max(fine / coarse);
        }
    }
    Ok(vec![
        CheckResult::at_most(
            "fourier_limit_size",
            worst_size,
            5e-3,
            "|R_gamma(u/gamma) - phi(u)| at gamma = 10^4 for delta_1 and the \
             symmetric two-point measure, u in {1, 5}"
                .to_string(),
        ),
        CheckResult::at_most(
            "fourier_limit_decay",
            worst_ratio,
            0.02,
            "ratio of the gamma = 10^4 residual to the gamma = 10^2 residual \
             (must be at most 1/50)"
                .to_string(),
        ),
    ])
}

/// Small-gamma limit: |(R_gamma(u) - 1)/gamma - log_limit(u)| at gamma = 1e-5.
pub fn log_limit_check() -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for m in limit_test_measures() {
        for &u in &[0.5, 1.0] {
            worst = worst.max(log_limit_residual(&m, 1e-5, u)?);
        }
    }
    Ok(CheckResult::at_most(
        "log_limit",
        worst,
        1e-4,
        "|(R_gamma(u) - 1)/gamma - log_limit(u)| at gamma = 1e-5 for delta_1 and \
         the symmetric two-point measure, u in {0.5, 1}"
            .to_string(),
    ))
}

/// Moment series partial sums against the direct transform for compactly
/// supported measures with |u| max|x| <= 0.5, K = 60.
pub fn series_expansion_check(seed: u64) -> Result<CheckResult> {
    let mut rng = rng_for(seed);
    let mut measures: Vec<MixtureMeasure> = vec![
        DiscreteMeasure::dirac(0.5).into(),
        DiscreteMeasure::dirac(-1.0).into(),
        DiscreteMeasure::dirac(1.0).into(),
        MixtureMeasure::new(vec![
            (0.5, MixturePart::Dirac(-1.0)),
            (0.5, MixturePart::Dirac(1.0)),
        ])?,
    ];
    for _ in 0..10 {
        measures.push(random_discrete(&mut rng, 5, 1.0).into());
    }
    let mut worst = 0.0f64;
    for m in &measures {
        let k = moments_of(m, 60)?;
        for &gamma in &[0.5, 1.0, 2.0, 3.5] {
            for &u in &[-0.5, -0.25, 0.1, 0.5] {
                let series = series_eval(&k, gamma, u, 60)?;
                let direct = r_transform(m, gamma, u)?;
                worst = worst.max((series - direct).norm());
            }
        }
    }
    Ok(CheckResult::at_most(
        "series_expansion",
        worst,
        1e-10,
        "partial moment series at K = 60 vs the direct transform for measures \
         with atoms in [-1,1], |u| <= 0.5, gamma in {0.5,1,2,3.5}"
            .to_string(),
    ))
}

/// Non-associativity witness: the defect for (1,2,3) at n = 1 equals 1/2
/// exactly (E X = 1/2), and in particular is far from zero.
pub fn non_associativity_checks() -> Result<Vec<CheckResult>> {
    let defect = associativity_defect(1.0, 2.0, 3.0, 1.0)?;
    Ok(vec![
        CheckResult::at_most(
            "non_associativity_value",
            (defect - 0.5).abs(),
            1e-12,
            "|mean((d1 star d2) star d3) - mean(d1 star (d2 star d3))| at n = 1 \
             against the analytic value 1/2"
                .to_string(),
        ),
        CheckResult::at_least(
            "non_associativity_nonzero",
            defect,
            0.1,
            "the same defect must be genuinely nonzero (pass means defect > 0.1): \
             the operation is commutative but NOT associative"
                .to_string(),
        ),
    ])
}

/// Classical-convolution limit: the closed form (a-b)^2/(2n+1) at
/// (0,1,1000), and the empirical variance of 2W from 10^5 samples.
pub fn classical_limit_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let formula = classical_limit_residual(0.0, 1.0, 1000.0)?;
    let formula_gap = (formula - 1.0 / 2001.0).abs();

    let (var_hat, se_var) = classical_limit_empirical_variance(seed)?;
    let sigmas = (var_hat - 1.0 / 2001.0).abs() / se_var.max(1e-300);

    Ok(vec![
        CheckResult::at_most(
            "classical_limit_formula",
            formula_gap,
            1e-12,
            "classical_limit_residual(0, 1, 1000) against 1/2001".to_string(),
        ),
        CheckResult::at_most(
            "classical_limit_monte_carlo",
            sigmas,
            4.0,
            "empirical variance of 2W from 10^5 draws of W ~ delta_0 star_1000 delta_1, \
             in standard errors of the variance estimate"
                .to_string(),
        ),
    ])
}

fn classical_limit_empirical_variance(seed: u64) -> Result<(f64, f64)> {
    let params = DirichletParams::symmetric(1000.0, 2)?;
    let mus = [DiscreteMeasure::dirac(0.0), DiscreteMeasure::dirac(1.0)];
    let batch = sample_linear_form(&mus, &params, 100_000, seed)?;
    let doubled: Vec<f64> = batch.values.iter().map(|x| 2.0 * x).collect();
    let n = doubled.len() as f64;
    let mean = neumaier::sum(&doubled) / n;
    let mut m2 = neumaier::Sum::new();
    let mut m4 = neumaier::Sum::new();
    for &x in &doubled {
        let d = x - mean;
        m2.add(d * d);
        m4.add(d * d * d * d);
    }
    let var = m2.value() / n;
    let fourth = m4.value() / n;
    // Var(sample variance) ~ (mu_4 - mu_2^2)/n
    let se = ((fourth - var * var).max(0.0) / n).sqrt();
    Ok((var, se))
}

/// Bit-exact reproducibility of the Monte Carlo checks under their seeds.
pub fn determinism_check(seed_pair: u64, seed_ktuple: u64, seed_classical: u64) -> Result<CheckResult> {
    let mut mismatches = 0usize;

    let triples = random_pair_triples(seed_pair, 50);
    let (a, b, n) = triples[0];
    let params = DirichletParams::symmetric(n, 2)?;
    let mus = [DiscreteMeasure::dirac(a), DiscreteMeasure::dirac(b)];
    let s = substream_seed(seed_pair, 100);
    let first = sample_linear_form(&mus, &params, 1_000_000, s)?;
    let second = sample_linear_form(&mus, &params, 1_000_000, s)?;
    mismatches += count_bit_mismatches(&first, &second);
    let em1 = empirical_moments(&first, 6)?;
    let em2 = empirical_moments(&second, 6)?;
    for m in 0..=6 {
        if em1.moments.get(m).to_bits() != em2.moments.get(m).to_bits() {
            mismatches += 1;
        }
    }

    let r = [0.5, 1.0, 2.0];
    let components: Vec<ScaledBetaComponent> = r
        .iter()
        .map(|&rj| ScaledBetaComponent::new(0.0, 1.0, rj + 0.5, rj + 0.5))
        .collect::<Result<_>>()?;
    let kt_params = DirichletParams::new(r.to_vec())?;
    let k1 = sample_beta_linear_form(&components, &kt_params, 100_000, seed_ktuple)?;
    let k2 = sample_beta_linear_form(&components, &kt_params, 100_000, seed_ktuple)?;
    mismatches += count_bit_mismatches(&k1, &k2);

    let (v1, _) = classical_limit_empirical_variance(seed_classical)?;
    let (v2, _) = classical_limit_empirical_variance(seed_classical)?;
    if v1.to_bits() != v2.to_bits() {
        mismatches += 1;
    }

    Ok(CheckResult::at_most(
        "determinism",
        mismatches as f64,
        0.0,
        "re-running the Monte Carlo checks with the same seeds must reproduce \
         every draw and derived statistic bit-exactly; value counts mismatching bits"
            .to_string(),
    ))
}

fn count_bit_mismatches(a: &SampleBatch, b: &SampleBatch) -> usize {
    a.values
        .iter()
        .zip(&b.values)
        .filter(|(x, y)| x.to_bits() != y.to_bits())
        .count()
        + (a.values.len() != b.values.len()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_associativity_passes() {
        let checks = non_associativity_checks().unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }

    #[test]
    fn fourier_and_log_limits_pass() {
        assert!(fourier_limit_checks().unwrap().iter().all(|c| c.passed));
        assert!(log_limit_check().unwrap().passed);
    }

    #[test]
    fn stated_pair_stability_fails_and_corrections_pass() {
        let checks = beta_stability_pair_checks().unwrap();
        let by_name = |n: &str| checks.iter().find(|c| c.name == n).unwrap();
        let stated = by_name("beta_stability_pair_as_stated");
        assert!(!stated.passed, "the stated law should show its defect");
        assert!(stated.max_error > 1e-3);
        assert!(!by_name("beta_stability_pair_transform_route").passed);
        assert!(by_name("beta_stability_pair_corrected_index").passed);
        assert!(by_name("beta_stability_pair_half_shift").passed);
    }

    #[test]
    fn check_modes_serialize() {
        let c = CheckResult::at_least("x", 0.5, 0.1, "d".into());
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"at_least\""));
        assert!(c.passed);
    }
}
