//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `cargo test --test acceptance -- --nocapture` to see all lines).
//!
//! Criterion 4 (pair beta stability in its stated star_n form) fails by
//! design of honesty: the law as stated has a genuine defect near 1e-2,
//! measured here through two independent routes. The corrected forms of the
//! same law pass and are asserted in the same test block; see the harness
//! detail strings for the exact statements.

use std::time::Instant;

use genconv::report::{self, CheckResult};
use genconv::sampler::substream_seed;

const SEED: u64 = report::DEFAULT_SEED;

fn subseed(i: u64) -> u64 {
    substream_seed(SEED, i)
}

fn announce(criterion: &str, c: &CheckResult) {
    println!(
        "ACCEPTANCE {criterion} [{}]: {} (measured {:.3e}, tolerance {:.3e})",
        c.name,
        if c.passed { "PASS" } else { "FAIL" },
        c.max_error,
        c.tolerance
    );
}

fn assert_check(criterion: &str, c: &CheckResult) {
    announce(criterion, c);
    assert!(
        c.passed,
        "{criterion} failed: {} measured {:.6e} vs tolerance {:.3e} ({})",
        c.name, c.max_error, c.tolerance, c.detail
    );
}

#[test]
fn criterion_01_defining_identity() {
    let start = Instant::now();
    let check = report::defining_identity(subseed(1)).unwrap();
    let elapsed = start.elapsed();
    assert_check("defining identity", &check);
    println!("ACCEPTANCE defining identity runtime: {elapsed:.2?} (budget 30s)");
    assert!(elapsed.as_secs_f64() <= 30.0, "runtime {elapsed:.2?} over budget");
}

#[test]
fn criterion_02_moment_routes_and_monte_carlo() {
    let routes = report::pair_moment_routes(subseed(2)).unwrap();
    assert_check("moment routes", &routes);
    let mc = report::pair_moment_monte_carlo(subseed(3)).unwrap();
    assert_check("moment Monte Carlo", &mc);
}

#[test]
fn criterion_03_hypergeometric_bridge() {
    let (bridge, alternate) = report::hypergeometric_checks(subseed(4)).unwrap();
    assert_check("hypergeometric bridge", &bridge);
    // the alternate form's outcome is recorded in the report; it happens
    // to match exactly, which the detail string documents
    announce("hypergeometric alternate form (recorded)", &alternate);
    println!("  -> {}", alternate.detail);
    assert_check("hypergeometric alternate form", &alternate);
}

#[test]
fn criterion_04_pair_beta_stability_as_stated() {
    let checks = report::beta_stability_pair_checks().unwrap();
    let by_name = |n: &str| checks.iter().find(|c| c.name == n).unwrap();

    // context first: the corrected forms of the law hold to full precision
    assert_check(
        "pair stability (corrected index)",
        by_name("beta_stability_pair_corrected_index"),
    );
    assert_check(
        "pair stability (half shift)",
        by_name("beta_stability_pair_half_shift"),
    );

    // the criterion as stated: star index n, inputs beta(n,n), target
    // beta(2n,2n); measured through both permitted routes; this fails with
    // a genuine mathematical defect and is intentionally left red
    let stated = by_name("beta_stability_pair_as_stated");
    announce("pair stability (as stated, moment route)", stated);
    let transform = by_name("beta_stability_pair_transform_route");
    announce("pair stability (as stated, transform route)", transform);
    assert!(
        stated.passed || transform.passed,
        "pair beta stability as stated fails on both routes: moment-route defect \
         {:.6e} (tolerance {:.1e}), transform-route defect {:.6e} (tolerance {:.1e}). \
         The law as stated does not hold; the corrected-index and half-shift forms \
         asserted above do.",
        stated.max_error,
        stated.tolerance,
        transform.max_error,
        transform.tolerance
    );
}

#[test]
fn criterion_05_ktuple_beta_stability() {
    for check in report::beta_stability_ktuple_checks(subseed(8)).unwrap() {
        assert_check("k-tuple stability", &check);
    }
}

#[test]
fn criterion_06_fourier_limit() {
    for check in report::fourier_limit_checks().unwrap() {
        assert_check("Fourier limit", &check);
    }
}

#[test]
fn criterion_07_log_limit() {
    assert_check("log limit", &report::log_limit_check().unwrap());
}

#[test]
fn criterion_08_series_expansion() {
    assert_check(
        "series expansion",
        &report::series_expansion_check(subseed(11)).unwrap(),
    );
}

#[test]
fn criterion_09_non_associativity() {
    for check in report::non_associativity_checks().unwrap() {
        assert_check("non-associativity", &check);
    }
}

#[test]
fn criterion_10_classical_limit() {
    for check in report::classical_limit_checks(subseed(13)).unwrap() {
        assert_check("classical limit", &check);
    }
}

#[test]
fn criterion_11_determinism() {
    let check = report::determinism_check(subseed(3), subseed(8), subseed(13)).unwrap();
    assert_check("determinism", &check);
}
