//! Quasi-stationary Markov measures on one-sided shift spaces.
//!
//! The crate builds Markov measures from a positive probability vector and a
//! sequence of positive stochastic matrices, decides quasi-stationarity from
//! certificates carried by the sequence, evaluates the associated
//! Radon-Nikodym densities with certified truncation error, classifies pairs
//! of measures as equivalent or mutually singular, and realizes the induced
//! Cuntz isometries on finite orthonormal cylinder bases.
//!
//! Module map:
//! - [`symbolic`] — alphabets, words, cylinders, the shift and its inverse
//!   branches;
//! - [`matseq`] — stochastic matrices, certified matrix sequences, forward
//!   products, Perron-Frobenius vectors;
//! - [`measure`] — cylinder masses, consistency, quasi-stationarity verdicts,
//!   path sampling, mixing correlations;
//! - [`density`] — the infinite ratio product, branch densities, finite-level
//!   likelihood ratios, Hellinger terms;
//! - [`classify`] — the equivalent/singular/undecided trichotomy with
//!   certificates;
//! - [`cuntzrep`] — finite-level compressed isometries, Cuntz relation
//!   checks, projection-valued-measure algebra, cyclicity;
//! - [`exact`] — rational arithmetic used by the test suites as an
//!   independent oracle.

pub mod classify;
pub mod cuntzrep;
pub mod density;
pub mod exact;
pub mod matseq;
pub mod measure;
pub mod symbolic;

pub use classify::{
    classify_pair, representation_verdict, stationary_equivalent, DichotomyVerdict,
};
pub use cuntzrep::{build_level, check_cuntz_relations, LevelSpace};
pub use density::{DensityEngine, PairEngine};
pub use matseq::{forward_product, perron_left, MatrixSequence, StochasticMatrix};
pub use measure::MarkovMeasureSpec;
pub use symbolic::{Alphabet, Word};
