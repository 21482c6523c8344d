//! Probability-measure representations closed under the convolution
//! constructions in this crate: finite atom lists, affinely rescaled beta
//! components, and mixtures of the two, plus exact moment computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, neumaier};

/// Weight sums must match 1 to this absolute tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Atom locations closer than this (relative) merge on construction.
const ATOM_MERGE_REL_TOL: f64 = 1e-12;

/// Highest moment order accepted by [`moments_of`].
pub const MAX_MOMENT_ORDER: usize = 200;

fn locations_mergeable(a: f64, b: f64) -> bool {
    (a - b).abs() <= ATOM_MERGE_REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Deterministic sum of a weight group: sorting first makes the result
/// independent of the order in which the group was assembled.
fn canonical_weight_sum(mut ws: Vec<f64>) -> f64 {
    ws.sort_by(f64::total_cmp);
    neumaier::sum(&ws)
}

/// A measure concentrated on finitely many points, in canonical form:
/// strictly increasing locations, positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for &(x, w) in &atoms {
            if !x.is_finite() || !w.is_finite() {
                return Err(Error::InvalidMeasure(format!("non-finite atom ({x}, {w})")));
            }
            if w <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {x} has non-positive weight {w}"
                )));
            }
        }
        let atoms = merge_atoms(atoms);
        let total = canonical_weight_sum(atoms.iter().map(|a| a.1).collect());
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!(
                "atom weights sum to {total}, expected 1"
            )));
        }
        Ok(DiscreteMeasure { atoms })
    }

    /// Unit point mass at `x`.
    pub fn dirac(x: f64) -> Self {
        DiscreteMeasure {
            atoms: vec![(x, 1.0)],
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        let mut acc = neumaier::Sum::new();
        for &(x, w) in &self.atoms {
            acc.add(w * x);
        }
        acc.value()
    }
}

fn merge_atoms(mut atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    let mut i = 0;
    while i < atoms.len() {
        let anchor = atoms[i].0;
        let mut ws = Vec::new();
        while i < atoms.len() && locations_mergeable(anchor, atoms[i].0) {
            ws.push(atoms[i].1);
            i += 1;
        }
        out.push((anchor, canonical_weight_sum(ws)));
    }
    out
}

/// Beta distribution rescaled affinely onto the open interval (A, B):
/// density (x-A)^(alpha-1) (B-x)^(beta-1) / (B(alpha,beta) (B-A)^(alpha+beta-1)).
///
/// The degenerate case A = B is not representable; use a Dirac atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBetaComponent {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ScaledBetaComponent {
    pub fn new(a: f64, b: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || !(b > a) {
            return Err(Error::InvalidMeasure(format!(
                "scaled beta needs finite endpoints with B > A, got A={a}, B={b}"
            )));
        }
        if !(alpha > 0.0) || !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "scaled beta needs positive shape parameters, got ({alpha}, {beta})"
            )));
        }
        Ok(ScaledBetaComponent { a, b, alpha, beta })
    }

    /// Density at `x` (zero outside (A, B)).
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.a || x >= self.b {
            return 0.0;
        }
        let ln_norm = specfun::ln_beta(self.alpha, self.beta).expect("valid shapes")
            + (self.alpha + self.beta - 1.0) * (self.b - self.a).ln();
        ((self.alpha - 1.0) * (x - self.a).ln() + (self.beta - 1.0) * (self.b - x).ln() - ln_norm)
            .exp()
    }

    /// CDF at `x`; 0 left of A, 1 right of B.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.a {
            return 0.0;
        }
        if x >= self.b {
            return 1.0;
        }
        let t = (x - self.a) / (self.b - self.a);
        specfun::regularized_incomplete_beta(self.alpha, self.beta, t.clamp(0.0, 1.0))
            .expect("component invariants keep the arguments in range")
    }

    /// E (A + (B-A) Y)^m for Y ~ Beta(alpha, beta), for m = 0..=max_order.
    ///
    /// Symmetric components are expanded around the interval midpoint (odd
    /// central moments vanish identically there, which keeps wide intervals
    /// straddling zero well conditioned); asymmetric components use the
    /// binomial expansion around A with E Y^j = (alpha)_j / (alpha+beta)_j.
    fn raw_moments(&self, max_order: usize) -> Vec<f64> {
        let m = max_order;
        let mut out = Vec::with_capacity(m + 1);
        if self.alpha == self.beta {
            let c = 0.5 * (self.a + self.b);
            let s = 0.5 * (self.b - self.a);
            // E Z^(2i) for Z = 2Y - 1: ratio (2i-1) / (2 alpha + 2i - 1)
            let mut ez = vec![0.0; m + 1];
            ez[0] = 1.0;
            for i in 1..=m / 2 {
                ez[2 * i] = ez[2 * i - 2] * (2.0 * i as f64 - 1.0)
                    / (2.0 * self.alpha + 2.0 * i as f64 - 1.0);
            }
            for order in 0..=m {
                let mut acc = neumaier::Sum::new();
                let mut binom = 1.0;
                for j in 0..=order {
                    if j % 2 == 0 {
                        acc.add(binom * c.powi((order - j) as i32) * s.powi(j as i32) * ez[j]);
                    }
                    binom *= (order - j) as f64 / (j + 1) as f64;
                }
                out.push(acc.value());
            }
        } else {
            let width = self.b - self.a;
            let mut ey = vec![1.0; m + 1];
            for j in 1..=m {
                ey[j] = ey[j - 1] * (self.alpha + j as f64 - 1.0)
                    / (self.alpha + self.beta + j as f64 - 1.0);
            }
            for order in 0..=m {
                let mut acc = neumaier::Sum::new();
                let mut binom = 1.0;
                for j in 0..=order {
                    acc.add(binom * self.a.powi((order - j) as i32) * width.powi(j as i32) * ey[j]);
                    binom *= (order - j) as f64 / (j + 1) as f64;
                }
                out.push(acc.value());
            }
        }
        out
    }
}

/// One part of a mixture: a point mass or a scaled beta component.
#[derive(Debug, Clone, PartialEq)]
pub enum MixturePart {
    Dirac(f64),
    Beta(ScaledBetaComponent),
}

/// Weighted mixture of Dirac atoms and scaled beta components, in
/// canonical form (atoms merged and sorted, beta components sorted,
/// weights positive and summing to one).
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureMeasure {
    diracs: Vec<(f64, f64)>,
    betas: Vec<(f64, ScaledBetaComponent)>,
}

impl MixtureMeasure {
    pub fn new(components: Vec<(f64, MixturePart)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidMeasure("no mixture components".into()));
        }
        let mut atom_parts: Vec<(f64, f64)> = Vec::new();
        let mut beta_parts: Vec<(f64, ScaledBetaComponent)> = Vec::new();
        for (w, part) in components {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "mixture component has non-positive weight {w}"
                )));
            }
            match part {
                MixturePart::Dirac(x) => {
                    if !x.is_finite() {
                        return Err(Error::InvalidMeasure("non-finite Dirac location".into()));
                    }
                    atom_parts.push((x, w));
                }
                MixturePart::Beta(c) => {
                    ScaledBetaComponent::new(c.a, c.b, c.alpha, c.beta)?;
                    beta_parts.push((w, c));
                }
            }
        }
        let diracs = merge_atoms(atom_parts);
        let betas = merge_betas(beta_parts);
        let mut all: Vec<f64> = diracs.iter().map(|a| a.1).collect();
        all.extend(betas.iter().map(|b| b.0));
        let total = canonical_weight_sum(all);
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(MixtureMeasure { diracs, betas })
    }

    /// Atom part of the mixture, as (location, weight) pairs.
    pub fn diracs(&self) -> &[(f64, f64)] {
        &self.diracs
    }

    /// Continuous part of the mixture, as (weight, component) pairs.
    pub fn betas(&self) -> &[(f64, ScaledBetaComponent)] {
        &self.betas
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, MixturePart)> + '_ {
        self.diracs
            .iter()
            .map(|&(x, w)| (w, MixturePart::Dirac(x)))
            .chain(self.betas.iter().map(|&(w, c)| (w, MixturePart::Beta(c))))
    }

    /// Projection back to a discrete measure, if there is no continuous part.
    pub fn as_discrete(&self) -> Option<DiscreteMeasure> {
        if self.betas.is_empty() {
            Some(DiscreteMeasure {
                atoms: self.diracs.clone(),
            })
        } else {
            None
        }
    }

    pub fn mean(&self) -> f64 {
        let mut acc = neumaier::Sum::new();
        for &(x, w) in &self.diracs {
            acc.add(w * x);
        }
        for &(w, c) in &self.betas {
            acc.add(w * (c.a + (c.b - c.a) * c.alpha / (c.alpha + c.beta)));
        }
        acc.value()
    }
}

impl From<DiscreteMeasure> for MixtureMeasure {
    fn from(d: DiscreteMeasure) -> Self {
        MixtureMeasure {
            diracs: d.atoms,
            betas: Vec::new(),
        }
    }
}

impl From<&DiscreteMeasure> for MixtureMeasure {
    fn from(d: &DiscreteMeasure) -> Self {
        d.clone().into()
    }
}

fn beta_key(c: &ScaledBetaComponent) -> [f64; 4] {
    [c.a, c.b, c.alpha, c.beta]
}

fn merge_betas(mut parts: Vec<(f64, ScaledBetaComponent)>) -> Vec<(f64, ScaledBetaComponent)> {
    parts.sort_by(|x, y| {
        let (kx, ky) = (beta_key(&x.1), beta_key(&y.1));
        kx.iter()
            .zip(&ky)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| !o.is_eq())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.0.total_cmp(&y.0))
    });
    let mut out: Vec<(f64, ScaledBetaComponent)> = Vec::with_capacity(parts.len());
    let mut i = 0;
    while i < parts.len() {
        let comp = parts[i].1;
        let key = beta_key(&comp);
        let mut ws = Vec::new();
        while i < parts.len() && beta_key(&parts[i].1) == key {
            ws.push(parts[i].0);
            i += 1;
        }
        out.push((canonical_weight_sum(ws), comp));
    }
    out
}

/// Convex combination of mixtures: weights must be positive and sum to one.
pub fn convex_combine(entries: &[(f64, MixtureMeasure)]) -> Result<MixtureMeasure> {
    if entries.is_empty() {
        return Err(Error::InvalidMeasure("empty convex combination".into()));
    }
    let total = canonical_weight_sum(entries.iter().map(|e| e.0).collect());
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidMeasure(format!(
            "combination weights sum to {total}, expected 1"
        )));
    }
    let mut parts = Vec::new();
    for (w, m) in entries {
        if !(*w > 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "combination weight {w} is not positive"
            )));
        }
        for (cw, part) in m.components() {
            parts.push((w * cw, part));
        }
    }
    MixtureMeasure::new(parts)
}

/// Moments kappa_0..kappa_M of a measure; the currency of the exact
/// convolution algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSequence {
    values: Vec<f64>,
}

impl MomentSequence {
    /// Wraps a raw sequence. kappa_0 must equal 1; the Hankel positive
    /// semidefiniteness check is a diagnostic (a warning in the log), not
    /// a constructor failure, since rounding can push tiny eigenvalues
    /// slightly negative on valid sequences.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empty moment sequence".into()));
        }
        if (values[0] - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "kappa_0 must be 1, got {}",
                values[0]
            )));
        }
        let seq = MomentSequence { values };
        let min_eig = seq.hankel_min_eigenvalue();
        let scale = seq.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if min_eig < -1e-8 * scale {
            log::warn!(
                "moment sequence fails the Hankel PSD diagnostic: min eigenvalue {min_eig:.3e}"
            );
        }
        Ok(seq)
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, m: usize) -> f64 {
        self.values[m]
    }

    /// Smallest eigenvalue of the Hankel matrix [kappa_(i+j)], a necessary
    /// condition witness for being a moment sequence of a probability
    /// measure (nonnegative up to rounding).
    pub fn hankel_min_eigenvalue(&self) -> f64 {
        let h = self.order() / 2 + 1;
        let mat = nalgebra::DMatrix::from_fn(h, h, |i, j| self.values[i + j]);
        let eig = nalgebra::SymmetricEigen::new(mat);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Exact moments of a mixture up to order `max_order` (at most 200).
///
/// Dirac atoms contribute powers of their location; beta components use
/// the closed-form Pochhammer ratios of their base Beta law.
pub fn moments_of(measure: &MixtureMeasure, max_order: usize) -> Result<MomentSequence> {
    if max_order > MAX_MOMENT_ORDER {
        return Err(Error::Domain(format!(
            "moment order {max_order} exceeds the supported maximum {MAX_MOMENT_ORDER}"
        )));
    }
    let mut acc: Vec<neumaier::Sum> = vec![neumaier::Sum::new(); max_order + 1];
    for &(x, w) in &measure.diracs {
        let mut p = 1.0;
        for a in acc.iter_mut() {
            a.add(w * p);
            p *= x;
        }
    }
    for &(w, c) in &measure.betas {
        for (m, v) in c.raw_moments(max_order).into_iter().enumerate() {
            acc[m].add(w * v);
        }
    }
    let mut values: Vec<f64> = acc.iter().map(|a| a.value()).collect();
    values[0] = 1.0; // exact for any probability measure
    for (m, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::MomentOverflow { order: m });
        }
    }
    MomentSequence::new(values)
}

/// CDF of a scaled beta component (free function mirror of
/// [`ScaledBetaComponent::cdf`]).
pub fn scaled_beta_cdf(component: &ScaledBetaComponent, x: f64) -> f64 {
    component.cdf(x)
}

/// Discrete approximation of a scaled beta component by the Gauss-Jacobi
/// rule matched to its density: the resulting atoms reproduce the first
/// 2*points - 1 moments exactly (up to rounding).
pub fn discretize_scaled_beta(c: &ScaledBetaComponent, points: usize) -> Result<DiscreteMeasure> {
    let rule = specfun::gauss_jacobi(points, c.beta - 1.0, c.alpha - 1.0)?;
    let mass = neumaier::sum(&rule.weights);
    let atoms = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| (c.a + (c.b - c.a) * 0.5 * (x + 1.0), w / mass))
        .collect();
    DiscreteMeasure::new(atoms)
}

// ---------------------------------------------------------------------------
// JSON measure descriptions
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum MeasureJson {
    Discrete { atoms: Vec<(f64, f64)> },
    Mixture { components: Vec<ComponentJson> },
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    w: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dirac: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<BetaJson>,
}

#[derive(Serialize, Deserialize)]
struct BetaJson {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    alpha: f64,
    beta: f64,
}

impl MixtureMeasure {
    /// Parses the JSON measure description consumed by the CLI:
    /// `{"type":"discrete","atoms":[[x,w],...]}` or
    /// `{"type":"mixture","components":[{"w":0.5,"dirac":1.0},
    /// {"w":0.5,"beta":{"A":0,"B":1,"alpha":2,"beta":2}}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: MeasureJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("measure JSON: {e}")))?;
        match parsed {
            MeasureJson::Discrete { atoms } => Ok(DiscreteMeasure::new(atoms)?.into()),
            MeasureJson::Mixture { components } => {
                let mut parts = Vec::with_capacity(components.len());
                for c in components {
                    let part = match (c.dirac, c.beta) {
                        (Some(x), None) => MixturePart::Dirac(x),
                        (None, Some(b)) => {
                            MixturePart::Beta(ScaledBetaComponent::new(b.a, b.b, b.alpha, b.beta)?)
                        }
                        _ => {
                            return Err(Error::Parse(
                                "each mixture component needs exactly one of \"dirac\" or \"beta\""
                                    .into(),
                            ))
                        }
                    };
                    parts.push((c.w, part));
                }
                MixtureMeasure::new(parts)
            }
        }
    }

    /// Serializes the canonical form; purely atomic mixtures use the
    /// compact `discrete` representation so round-trips are identical.
    pub fn to_json(&self) -> String {
        let doc = if self.betas.is_empty() {
            MeasureJson::Discrete {
                atoms: self.diracs.clone(),
            }
        } else {
            MeasureJson::Mixture {
                components: self
                    .diracs
                    .iter()
                    .map(|&(x, w)| ComponentJson {
                        w,
                        dirac: Some(x),
                        beta: None,
                    })
                    .chain(self.betas.iter().map(|&(w, c)| ComponentJson {
                        w,
                        dirac: None,
                        beta: Some(BetaJson {
                            a: c.a,
                            b: c.b,
                            alpha: c.alpha,
                            beta: c.beta,
                        }),
                    }))
                    .collect(),
            }
        };
        serde_json::to_string_pretty(&doc).expect("measure serialization cannot fail")
    }
}
