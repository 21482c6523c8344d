//! Generalized convolutions induced by the modified Stieltjes transform:
//! the commutative star_n family (pairing transform indices n and 2n), its
//! non-commutative Dirichlet-weighted variants, and the k-tuple stochastic
//! linear form, each available through exact moment algebra and (for pairs)
//! through an explicit mixture construction.

use crate::error::{Error, Result};
use crate::measures::{
    moments_of, DiscreteMeasure, MixtureMeasure, MixturePart, MomentSequence, ScaledBetaComponent,
};
use crate::specfun::{log_gamma, neumaier};
use crate::transform::r_transform;

/// Parameter vector (a_1..a_k) of a Dirichlet weight law, k >= 2.
/// The commutative k-tuple convolution is the constant vector (n, ..., n).
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alphas: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::Domain(format!(
                "Dirichlet parameters need k >= 2 entries, got {}",
                alphas.len()
            )));
        }
        for &a in &alphas {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::Domain(format!("Dirichlet parameter {a} invalid")));
            }
        }
        Ok(DirichletParams { alphas })
    }

    /// Constant vector (n, ..., n) of length k.
    pub fn symmetric(n: f64, k: usize) -> Result<Self> {
        Self::new(vec![n; k])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn total(&self) -> f64 {
        neumaier::sum(&self.alphas)
    }
}

/// Mixing weights E[X^k (1-X)^(m-k)] * C(m,k) for X ~ Beta(n, n):
/// w_k = C(m,k) (n)_k (n)_(m-k) / (2n)_m. They are positive and sum to 1.
fn beta_mixing_weights(n: f64, m: usize) -> Vec<f64> {
    // w_0 = (n)_m / (2n)_m
    let mut w0 = 1.0;
    for i in 0..m {
        w0 *= (n + i as f64) / (2.0 * n + i as f64);
    }
    let mut ws = Vec::with_capacity(m + 1);
    let mut w = w0;
    for k in 0..=m {
        ws.push(w);
        if k < m {
            w *= (m - k) as f64 * (n + k as f64)
                / ((k as f64 + 1.0) * (n + (m - k) as f64 - 1.0));
        }
    }
    ws
}

/// Moments of the star_n convolution computed purely in moment space:
/// kappa_m(nu) = sum_k C(m,k) (n)_k (n)_(m-k) / (2n)_m kappa_k(mu1) kappa_(m-k)(mu2).
pub fn star_n_moments(
    k1: &MomentSequence,
    k2: &MomentSequence,
    n: f64,
    max_order: usize,
) -> Result<MomentSequence> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("n must be positive, got {n}")));
    }
    if max_order > k1.order() || max_order > k2.order() {
        return Err(Error::Domain(format!(
            "need input moments up to order {max_order}"
        )));
    }
    let mut values = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order {
        let ws = beta_mixing_weights(n, m);
        let mut acc = neumaier::Sum::new();
        for (k, w) in ws.iter().enumerate() {
            acc.add(w * k1.get(k) * k2.get(m - k));
        }
        let v = acc.value();
        if !v.is_finite() {
            return Err(Error::MomentOverflow { order: m });
        }
        values.push(v);
    }
    values[0] = 1.0;
    MomentSequence::new(values)
}

/// Exact moments of delta_a star_n delta_b: the law of a X + b (1-X) with
/// X ~ Beta(n, n), via the sign-free binomial form
/// kappa_m = sum_k C(m,k) (n)_k (n)_(m-k) a^k b^(m-k) / (2n)_m.
pub fn pair_conv_moments(a: f64, b: f64, n: f64, max_order: usize) -> Result<MomentSequence> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("n must be positive, got {n}")));
    }
    if max_order > crate::measures::MAX_MOMENT_ORDER {
        return Err(Error::Domain(format!(
            "moment order {max_order} exceeds the supported maximum"
        )));
    }
    let mut pow_a = Vec::with_capacity(max_order + 1);
    let mut pow_b = Vec::with_capacity(max_order + 1);
    let (mut pa, mut pb) = (1.0, 1.0);
    for _ in 0..=max_order {
        pow_a.push(pa);
        pow_b.push(pb);
        pa *= a;
        pb *= b;
    }
    let mut values = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order {
        let ws = beta_mixing_weights(n, m);
        let mut acc = neumaier::Sum::new();
        for (k, w) in ws.iter().enumerate() {
            acc.add(w * pow_a[k] * pow_b[m - k]);
        }
        let v = acc.value();
        if !v.is_finite() {
            return Err(Error::MomentOverflow { order: m });
        }
        values.push(v);
    }
    values[0] = 1.0;
    MomentSequence::new(values)
}

/// The commutative generalized convolution mu1 star_n mu2 of two discrete
/// measures, as an explicit mixture: the atom pair (a, b) contributes a
/// Dirac at a when a = b and otherwise the symmetric scaled beta component
/// on (min(a,b), max(a,b)) with parameters (n, n).
///
/// The result satisfies R_2n(u; nu) = R_n(u; mu1) R_n(u; mu2).
pub fn star_n(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, n: f64) -> Result<MixtureMeasure> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("n must be positive, got {n}")));
    }
    let mut parts = Vec::with_capacity(mu1.atoms().len() * mu2.atoms().len());
    for &(a, w1) in mu1.atoms() {
        for &(b, w2) in mu2.atoms() {
            let part = if a == b {
                MixturePart::Dirac(a)
            } else {
                MixturePart::Beta(ScaledBetaComponent::new(a.min(b), a.max(b), n, n)?)
            };
            parts.push((w1 * w2, part));
        }
    }
    MixtureMeasure::new(parts)
}

/// Non-commutative pair convolution: the law of W = a X + b (1-X) with
/// X ~ Beta(alpha1, alpha2), extended bilinearly over atom pairs. Under the
/// affine map x -> b + (a-b) x the orientation of the interval flips when
/// a < b, which swaps the two beta parameters; (alpha1, alpha2) = (n, n)
/// reduces to `star_n` exactly.
pub fn pair_conv_noncommutative(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    alpha1: f64,
    alpha2: f64,
) -> Result<MixtureMeasure> {
    if !(alpha1 > 0.0) || !(alpha2 > 0.0) {
        return Err(Error::Domain(format!(
            "shape parameters must be positive, got ({alpha1}, {alpha2})"
        )));
    }
    let mut parts = Vec::with_capacity(mu1.atoms().len() * mu2.atoms().len());
    for &(a, w1) in mu1.atoms() {
        for &(b, w2) in mu2.atoms() {
            let part = if a == b {
                MixturePart::Dirac(a)
            } else if a > b {
                // W - b = (a-b) X: density (w-b)^(alpha1-1) (a-w)^(alpha2-1)
                MixturePart::Beta(ScaledBetaComponent::new(b, a, alpha1, alpha2)?)
            } else {
                // reflected: density (b-w)^(alpha1-1) (w-a)^(alpha2-1)
                MixturePart::Beta(ScaledBetaComponent::new(a, b, alpha2, alpha1)?)
            };
            parts.push((w1 * w2, part));
        }
    }
    MixtureMeasure::new(parts)
}

/// Per-moment composition budget for the k-tuple enumeration.
const COMPOSITION_LIMIT: u128 = 10_000_000;
/// Atom-combination budget for [`ktuple_conv_measure`].
const COMBINATION_LIMIT: u128 = 1_000_000;
/// Highest moment order for the k-tuple operations.
const KTUPLE_MAX_ORDER: usize = 100;

fn compositions_count(m: usize, k: usize) -> u128 {
    // C(m + k - 1, k - 1), saturating
    let mut c: u128 = 1;
    for i in 0..(k - 1) {
        c = c.saturating_mul((m + k - 1 - i) as u128) / (i as u128 + 1);
    }
    c
}

/// Visits weak compositions (m_1..m_k) of m in colexicographic order
/// (last coordinate slowest), which fixes the summation order and makes
/// results bit-reproducible.
fn for_each_composition<F: FnMut(&[usize])>(m: usize, k: usize, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(buf: &mut [usize], pos: usize, remaining: usize, f: &mut F) {
        if pos == 0 {
            buf[0] = remaining;
            f(buf);
            return;
        }
        for v in 0..=remaining {
            buf[pos] = v;
            rec(buf, pos - 1, remaining - v, f);
        }
    }
    let mut buf = vec![0usize; k];
    rec(&mut buf, k - 1, m, f);
}

/// Exact moments of the Dirichlet stochastic linear form
/// W = sum_j X_j u_j with (X_1..X_k) ~ Dirichlet(a_1..a_k) and fixed
/// locations u_j:
/// E W^m = sum over m_1+..+m_k = m of the multinomial coefficient times
/// prod u_j^(m_j) * prod (a_j)_(m_j) / (a_0)_m, a_0 = sum a_j.
pub fn ktuple_conv_moments(
    locations: &[f64],
    params: &DirichletParams,
    max_order: usize,
) -> Result<MomentSequence> {
    let k = params.k();
    if locations.len() != k {
        return Err(Error::Domain(format!(
            "{} locations for {} Dirichlet parameters",
            locations.len(),
            k
        )));
    }
    if max_order > KTUPLE_MAX_ORDER {
        return Err(Error::Domain(format!(
            "k-tuple moment order {max_order} exceeds the supported maximum {KTUPLE_MAX_ORDER}"
        )));
    }
    let count = compositions_count(max_order, k);
    if count > COMPOSITION_LIMIT {
        return Err(Error::CombinatorialBlowup {
            count,
            limit: COMPOSITION_LIMIT,
        });
    }

    let alpha0 = params.total();
    // Tables: ln j!, ln Gamma(a_j + t) - ln Gamma(a_j), ln |u_j|, sign(u_j).
    let mut ln_fact = vec![0.0; max_order + 1];
    for t in 1..=max_order {
        ln_fact[t] = ln_fact[t - 1] + (t as f64).ln();
    }
    let mut ln_poch: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &a in params.alphas() {
        let base = log_gamma(a)?;
        let col: Result<Vec<f64>> = (0..=max_order)
            .map(|t| Ok(log_gamma(a + t as f64)? - base))
            .collect();
        ln_poch.push(col?);
    }
    let ln_poch0: Vec<f64> = {
        let base = log_gamma(alpha0)?;
        (0..=max_order)
            .map(|t| log_gamma(alpha0 + t as f64).map(|v| v - base))
            .collect::<Result<_>>()?
    };
    let ln_abs_u: Vec<f64> = locations.iter().map(|&u| u.abs().ln()).collect();

    let mut values = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order {
        let mut acc = neumaier::Sum::new();
        for_each_composition(m, k, &mut |comp| {
            let mut ln_term = ln_fact[m] - ln_poch0[m];
            let mut negative = false;
            let mut zero = false;
            for (j, &mj) in comp.iter().enumerate() {
                if mj == 0 {
                    continue;
                }
                if locations[j] == 0.0 {
                    zero = true;
                    break;
                }
                ln_term += ln_poch[j][mj] - ln_fact[mj] + mj as f64 * ln_abs_u[j];
                if locations[j] < 0.0 && mj % 2 == 1 {
                    negative = !negative;
                }
            }
            if !zero {
                let t = ln_term.exp();
                acc.add(if negative { -t } else { t });
            }
        });
        let v = acc.value();
        if !v.is_finite() {
            return Err(Error::MomentOverflow { order: m });
        }
        values.push(v);
    }
    values[0] = 1.0;
    MomentSequence::new(values)
}

/// Moments of the k-tuple generalized convolution of discrete measures:
/// the Dirichlet linear form with U_j drawn independently from mu_j,
/// expanded as the weighted sum over all atom combinations. For k >= 3 the
/// law has no finite scaled-beta mixture representation in general, so
/// moments (plus sampling) are the supported interfaces.
pub fn ktuple_conv_measure(
    mus: &[DiscreteMeasure],
    params: &DirichletParams,
    max_order: usize,
) -> Result<MomentSequence> {
    let k = params.k();
    if mus.len() != k {
        return Err(Error::Domain(format!(
            "{} measures for {} Dirichlet parameters",
            mus.len(),
            k
        )));
    }
    let combos = mus
        .iter()
        .fold(1u128, |acc, m| acc.saturating_mul(m.atoms().len() as u128));
    if combos > COMBINATION_LIMIT {
        return Err(Error::CombinatorialBlowup {
            count: combos,
            limit: COMBINATION_LIMIT,
        });
    }

    let mut acc: Vec<neumaier::Sum> = vec![neumaier::Sum::new(); max_order + 1];
    let mut idx = vec![0usize; k];
    let mut locations = vec![0.0f64; k];
    loop {
        let mut weight = 1.0;
        for (j, &i) in idx.iter().enumerate() {
            let (x, w) = mus[j].atoms()[i];
            locations[j] = x;
            weight *= w;
        }
        let partial = ktuple_conv_moments(&locations, params, max_order)?;
        for (m, a) in acc.iter_mut().enumerate() {
            a.add(weight * partial.get(m));
        }
        // odometer over atom indices
        let mut j = 0;
        loop {
            if j == k {
                break;
            }
            idx[j] += 1;
            if idx[j] < mus[j].atoms().len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == k {
            break;
        }
    }
    let mut values: Vec<f64> = acc.iter().map(|a| a.value()).collect();
    values[0] = 1.0;
    for (m, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::MomentOverflow { order: m });
        }
    }
    MomentSequence::new(values)
}

/// Max over the u grid of |R_2n(u; mu1 star_n mu2) - R_n(u; mu1) R_n(u; mu2)|,
/// the defining identity of the convolution.
pub fn verify_identity(
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    n: f64,
    u_grid: &[f64],
) -> Result<f64> {
    let nu = star_n(mu1, mu2, n)?;
    let m1: MixtureMeasure = mu1.into();
    let m2: MixtureMeasure = mu2.into();
    let mut worst = 0.0f64;
    for &u in u_grid {
        let lhs = r_transform(&nu, 2.0 * n, u)?;
        let rhs = r_transform(&m1, n, u)? * r_transform(&m2, n, u)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// |kappa_order((delta_a star delta_b) star delta_c)
///  - kappa_order(delta_a star (delta_b star delta_c))| via moment algebra.
pub fn associativity_defect_moment(
    a: f64,
    b: f64,
    c: f64,
    n: f64,
    order: usize,
) -> Result<f64> {
    let ka = moments_of(&DiscreteMeasure::dirac(a).into(), order)?;
    let kb = moments_of(&DiscreteMeasure::dirac(b).into(), order)?;
    let kc = moments_of(&DiscreteMeasure::dirac(c).into(), order)?;
    let left = star_n_moments(&star_n_moments(&ka, &kb, n, order)?, &kc, n, order)?;
    let right = star_n_moments(&ka, &star_n_moments(&kb, &kc, n, order)?, n, order)?;
    Ok((left.get(order) - right.get(order)).abs())
}

/// First-moment witness that star_n is not associative:
/// |mean((delta_a star delta_b) star delta_c) - mean(delta_a star (delta_b star delta_c))|.
pub fn associativity_defect(a: f64, b: f64, c: f64, n: f64) -> Result<f64> {
    associativity_defect_moment(a, b, c, n, 1)
}

/// Variance of 2W for W ~ delta_a star_n delta_b, i.e.
/// 4 (a-b)^2 Var Beta(n,n) = (a-b)^2 / (2n+1): the distance of the doubled
/// convolution from the classical convolution delta_(a+b), which it
/// approaches as n grows.
pub fn classical_limit_residual(a: f64, b: f64, n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("n must be positive, got {n}")));
    }
    Ok((a - b) * (a - b) / (2.0 * n + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::moments_of;
    use crate::specfun::hyp2f1_terminating;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pair_conv_uniform_case() {
        // a=1, b=0, n=1: W ~ Uniform(0,1)
        let k = pair_conv_moments(1.0, 0.0, 1.0, 3).unwrap();
        assert_eq!(k.get(0), 1.0);
        assert_abs_diff_eq!(k.get(1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(k.get(2), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.get(3), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn pair_conv_degenerate_and_symmetric() {
        let c = -1.7;
        let k = pair_conv_moments(c, c, 2.5, 6).unwrap();
        for m in 0..=6 {
            assert_abs_diff_eq!(k.get(m), c.powi(m as i32), epsilon = 1e-12);
        }
        // a=1, b=-1, n=1: W ~ Uniform(-1,1)
        let k = pair_conv_moments(1.0, -1.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(k.get(1), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.get(2), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn star_of_equal_diracs_is_dirac() {
        let d = DiscreteMeasure::dirac(0.7);
        let nu = star_n(&d, &d, 3.0).unwrap();
        assert_eq!(nu.diracs(), &[(0.7, 1.0)]);
        assert!(nu.betas().is_empty());
    }

    #[test]
    fn star_of_distinct_diracs_is_scaled_beta() {
        let nu = star_n(&DiscreteMeasure::dirac(0.0), &DiscreteMeasure::dirac(1.0), 1.0).unwrap();
        assert!(nu.diracs().is_empty());
        assert_eq!(nu.betas().len(), 1);
        let (w, c) = nu.betas()[0];
        assert_eq!(w, 1.0);
        assert_eq!((c.a, c.b, c.alpha, c.beta), (0.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn star_expands_pairwise() {
        let m1 = DiscreteMeasure::new(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let m2 = DiscreteMeasure::dirac(2.0);
        let nu = star_n(&m1, &m2, 1.0).unwrap();
        assert!(nu.diracs().is_empty());
        assert_eq!(nu.betas().len(), 2);
        assert_eq!(nu.betas()[0].1.a, 0.0);
        assert_eq!(nu.betas()[0].1.b, 2.0);
        assert_eq!(nu.betas()[1].1.a, 1.0);
        assert_eq!(nu.betas()[1].1.b, 2.0);
        assert_abs_diff_eq!(nu.betas()[0].0, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn star_is_commutative_in_canonical_form() {
        let m1 = DiscreteMeasure::new(vec![(-1.5, 0.25), (0.5, 0.375), (2.0, 0.375)]).unwrap();
        let m2 = DiscreteMeasure::new(vec![(0.5, 0.6), (1.0, 0.4)]).unwrap();
        let ab = star_n(&m1, &m2, 1.5).unwrap();
        let ba = star_n(&m2, &m1, 1.5).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn defining_identity_for_dirac_pairs() {
        let grid: Vec<f64> = (0..21).map(|i| -5.0 + 0.5 * i as f64).collect();
        for n in [0.5, 1.0, 2.0] {
            let err = verify_identity(
                &DiscreteMeasure::dirac(-0.8),
                &DiscreteMeasure::dirac(1.3),
                n,
                &grid,
            )
            .unwrap();
            assert!(err <= 1e-8, "n={n}: {err}");
        }
        // the grid {0} gives 0 exactly
        let err = verify_identity(
            &DiscreteMeasure::dirac(-0.8),
            &DiscreteMeasure::dirac(1.3),
            1.0,
            &[0.0],
        )
        .unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn moment_route_matches_mixture_route() {
        for (a, b, n) in [(0.3, 1.9, 0.5), (-2.0, 2.5, 1.0), (1.0, -1.0, 3.5)] {
            let direct = pair_conv_moments(a, b, n, 20).unwrap();
            let nu = star_n(&DiscreteMeasure::dirac(a), &DiscreteMeasure::dirac(b), n).unwrap();
            let via_mixture = moments_of(&nu, 20).unwrap();
            let scale = a.abs().max(b.abs()).max(1.0);
            for m in 0..=20usize {
                let tol = 1e-10 * scale.powi(m as i32);
                assert!(
                    (direct.get(m) - via_mixture.get(m)).abs() <= tol,
                    "(a,b,n)=({a},{b},{n}), m={m}: {} vs {}",
                    direct.get(m),
                    via_mixture.get(m)
                );
            }
        }
    }

    #[test]
    fn hypergeometric_bridge() {
        // kappa_m = b^m 2F1(-m, n; 2n; 1 - a/b) for b != 0
        for (a, b, n) in [(1.2, 0.9, 1.0), (0.4, 0.8, 2.5), (-1.0, -1.4, 0.75)] {
            let k = pair_conv_moments(a, b, n, 20).unwrap();
            let z = 1.0 - a / b;
            for m in 0..=20usize {
                let f = hyp2f1_terminating(m, n, 2.0 * n, z).unwrap();
                let expected = b.powi(m as i32) * f;
                let tol = 1e-10 * a.abs().max(b.abs()).max(1.0).powi(m as i32);
                assert!(
                    (k.get(m) - expected).abs() <= tol,
                    "(a,b,n)=({a},{b},{n}), m={m}: {} vs {expected}",
                    k.get(m)
                );
            }
        }
    }

    #[test]
    fn noncommutative_symmetric_case_reduces_to_star() {
        let m1 = DiscreteMeasure::new(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        let m2 = DiscreteMeasure::dirac(1.0);
        let sym = pair_conv_noncommutative(&m1, &m2, 1.5, 1.5).unwrap();
        let star = star_n(&m1, &m2, 1.5).unwrap();
        assert_eq!(sym, star);
    }

    #[test]
    fn noncommutative_orientation() {
        // mu1 = delta_1, mu2 = delta_0, X ~ Beta(2,1): W = X itself
        let nu = pair_conv_noncommutative(
            &DiscreteMeasure::dirac(1.0),
            &DiscreteMeasure::dirac(0.0),
            2.0,
            1.0,
        )
        .unwrap();
        let (w, c) = nu.betas()[0];
        assert_eq!(w, 1.0);
        assert_eq!((c.a, c.b, c.alpha, c.beta), (0.0, 1.0, 2.0, 1.0));
        let k = moments_of(&nu, 1).unwrap();
        assert_abs_diff_eq!(k.get(1), 2.0 / 3.0, epsilon = 1e-14);

        // swapping the arguments with unequal shapes changes the law
        let swapped = pair_conv_noncommutative(
            &DiscreteMeasure::dirac(0.0),
            &DiscreteMeasure::dirac(1.0),
            2.0,
            1.0,
        )
        .unwrap();
        let ks = moments_of(&swapped, 1).unwrap();
        assert_abs_diff_eq!(ks.get(1), 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn noncommutative_mean_gap_formula() {
        // first moments of the two orders differ by |a-b| |a1-a2| / (a1+a2)
        let (a, b, a1, a2) = (2.0, -0.5, 3.0, 1.25);
        let fwd = pair_conv_noncommutative(
            &DiscreteMeasure::dirac(a),
            &DiscreteMeasure::dirac(b),
            a1,
            a2,
        )
        .unwrap();
        let rev = pair_conv_noncommutative(
            &DiscreteMeasure::dirac(b),
            &DiscreteMeasure::dirac(a),
            a1,
            a2,
        )
        .unwrap();
        let gap = (moments_of(&fwd, 1).unwrap().get(1) - moments_of(&rev, 1).unwrap().get(1)).abs();
        let expected = (a - b).abs() * (a1 - a2).abs() / (a1 + a2);
        assert_abs_diff_eq!(gap, expected, epsilon = 1e-12);
    }

    #[test]
    fn ktuple_constant_locations() {
        let params = DirichletParams::symmetric(1.5, 3).unwrap();
        let k = ktuple_conv_moments(&[0.8, 0.8, 0.8], &params, 6).unwrap();
        for m in 0..=6 {
            assert_abs_diff_eq!(k.get(m), 0.8f64.powi(m as i32), epsilon = 1e-12);
        }
    }

    #[test]
    fn ktuple_two_reduces_to_pair() {
        let params = DirichletParams::symmetric(2.5, 2).unwrap();
        let via_ktuple = ktuple_conv_moments(&[0.3, -1.2], &params, 12).unwrap();
        let via_pair = pair_conv_moments(0.3, -1.2, 2.5, 12).unwrap();
        for m in 0..=12 {
            assert!(
                (via_ktuple.get(m) - via_pair.get(m)).abs() <= 1e-12,
                "m={m}: {} vs {}",
                via_ktuple.get(m),
                via_pair.get(m)
            );
        }
    }

    #[test]
    fn ktuple_dirichlet_hand_values() {
        // locations (1,0,0), alpha = (1,1,1): kappa_1 = 1/3, kappa_2 = 1/6
        let params = DirichletParams::symmetric(1.0, 3).unwrap();
        let k = ktuple_conv_moments(&[1.0, 0.0, 0.0], &params, 2).unwrap();
        assert_abs_diff_eq!(k.get(1), 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k.get(2), 1.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn ktuple_permutation_symmetry_in_commutative_case() {
        let params = DirichletParams::symmetric(1.75, 3).unwrap();
        let base = ktuple_conv_moments(&[0.5, -1.0, 2.0], &params, 8).unwrap();
        for perm in [[-1.0, 0.5, 2.0], [2.0, -1.0, 0.5], [0.5, 2.0, -1.0]] {
            let other = ktuple_conv_moments(&perm, &params, 8).unwrap();
            for m in 0..=8 {
                assert!(
                    (base.get(m) - other.get(m)).abs() <= 1e-11 * base.get(m).abs().max(1.0),
                    "m={m}"
                );
            }
        }
    }

    #[test]
    fn ktuple_measure_consistency() {
        // k=2, atoms only, alpha=(n,n): must match the mixture route
        let m1 = DiscreteMeasure::new(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let m2 = DiscreteMeasure::new(vec![(-1.0, 0.25), (2.0, 0.75)]).unwrap();
        let params = DirichletParams::symmetric(1.5, 2).unwrap();
        let via_moments = ktuple_conv_measure(&[m1.clone(), m2.clone()], &params, 10).unwrap();
        let via_mixture = moments_of(&star_n(&m1, &m2, 1.5).unwrap(), 10).unwrap();
        for m in 0..=10 {
            assert!(
                (via_moments.get(m) - via_mixture.get(m)).abs() <= 1e-10,
                "m={m}: {} vs {}",
                via_moments.get(m),
                via_mixture.get(m)
            );
        }

        // all inputs the same Dirac
        let params3 = DirichletParams::symmetric(0.7, 3).unwrap();
        let d = DiscreteMeasure::dirac(0.4);
        let k = ktuple_conv_measure(&[d.clone(), d.clone(), d], &params3, 5).unwrap();
        for m in 0..=5 {
            assert_abs_diff_eq!(k.get(m), 0.4f64.powi(m as i32), epsilon = 1e-12);
        }

        // symmetric three diracs: mean 2
        let trio = [
            DiscreteMeasure::dirac(1.0),
            DiscreteMeasure::dirac(2.0),
            DiscreteMeasure::dirac(3.0),
        ];
        let params = DirichletParams::symmetric(1.0, 3).unwrap();
        let k = ktuple_conv_measure(&trio, &params, 1).unwrap();
        assert_abs_diff_eq!(k.get(1), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn associativity_defect_values() {
        // ((1 star 2) star 3) vs (1 star (2 star 3)) with E X = 1/2:
        // means 9/4 vs 7/4
        let d = associativity_defect(1.0, 2.0, 3.0, 1.0).unwrap();
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-12);
        assert_eq!(associativity_defect(0.3, 0.3, 0.3, 2.0).unwrap(), 0.0);
        // a = c: commutativity makes the two bracketings the same measure,
        // so every moment defect vanishes, not just the mean
        let sym = associativity_defect_moment(1.0, 4.0, 1.0, 1.0, 2).unwrap();
        assert!(sym <= 1e-14);
        // second-moment witness for an asymmetric triple; the bracket
        // expansion by hand gives 47.5/9 - 59/18 = 2 exactly
        let second = associativity_defect_moment(1.0, 2.0, 3.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(second, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn classical_limit_formula() {
        assert_eq!(classical_limit_residual(1.3, 1.3, 5.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            classical_limit_residual(0.0, 1.0, 1000.0).unwrap(),
            1.0 / 2001.0,
            epsilon = 1e-18
        );
        let mut prev = f64::INFINITY;
        for n in [0.5, 1.0, 2.0, 8.0, 100.0] {
            let v = classical_limit_residual(-1.0, 2.0, n).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn guards_reject_blowups() {
        let params = DirichletParams::new(vec![1.0; 12]).unwrap();
        let locs = vec![0.5; 12];
        match ktuple_conv_moments(&locs, &params, 100) {
            Err(Error::CombinatorialBlowup { .. }) => {}
            other => panic!("expected blowup guard, got {other:?}"),
        }
    }

    #[test]
    fn mixing_weights_sum_to_one() {
        for n in [0.5, 1.0, 3.25] {
            for m in [0usize, 1, 7, 40] {
                let ws = beta_mixing_weights(n, m);
                assert_eq!(ws.len(), m + 1);
                let total: f64 = neumaier::sum(&ws);
                assert!(
                    (total - 1.0).abs() < 1e-13,
                    "n={n}, m={m}: weights sum to {total}"
                );
                assert!(ws.iter().all(|w| *w > 0.0));
            }
        }
    }
}
