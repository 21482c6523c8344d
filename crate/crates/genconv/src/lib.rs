//! Numerics for the modified Stieltjes transform of probability measures,
//!
//! ```text
//! R_gamma(u; mu) = integral of (1 - i u x)^(-gamma) d mu(x),
//! ```
//!
//! and for the generalized convolutions it induces: the commutative star_n
//! family defined by R_2n(u; nu) = R_n(u; mu1) R_n(u; mu2), its
//! non-commutative Dirichlet-weighted variants, and the k-tuple stochastic
//! linear form. The crate provides exact moment algebra over discrete and
//! scaled-beta mixture measures, adaptive quadrature evaluation of the
//! transform, seedable Monte Carlo samplers serving as independent oracles,
//! and a verification harness that measures every identity the library
//! claims and reports the defects it finds.

pub mod convolve;
pub mod error;
pub mod measures;
pub mod report;
pub mod sampler;
pub mod specfun;
pub mod transform;

pub use error::{Error, ErrorKind, Result};
pub use measures::{
    DiscreteMeasure, MixtureMeasure, MixturePart, MomentSequence, ScaledBetaComponent,
};
pub use convolve::DirichletParams;
pub use sampler::SampleBatch;
pub use transform::TransformGrid;
