//! Shared fixtures for the integration suites: the built-in example families
//! and randomized spec generators.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use qsmarkov::matseq::{CoeffFamily, Direction, MatrixSequence, StochasticMatrix};
use qsmarkov::measure::MarkovMeasureSpec;
use qsmarkov::symbolic::{enumerate_words, Word};

pub fn t_workhorse() -> StochasticMatrix {
    StochasticMatrix::from_rows(&[vec![0.7, 0.3], vec![0.4, 0.6]]).unwrap()
}

pub fn t_uniform2() -> StochasticMatrix {
    StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
}

pub fn t_three() -> StochasticMatrix {
    StochasticMatrix::from_rows(&[
        vec![0.5, 0.3, 0.2],
        vec![0.2, 0.6, 0.2],
        vec![0.3, 0.3, 0.4],
    ])
    .unwrap()
}

pub fn d_workhorse() -> Direction {
    Direction::from_rows(&[vec![0.1, -0.1], vec![-0.05, 0.05]]).unwrap()
}

pub fn uniform_spec() -> MarkovMeasureSpec {
    MarkovMeasureSpec::stationary(t_uniform2()).unwrap()
}

pub fn skew_rows_spec() -> MarkovMeasureSpec {
    MarkovMeasureSpec::with_lambda(
        vec![0.8, 0.2],
        MatrixSequence::constant(
            StochasticMatrix::from_rows(&[vec![0.8, 0.2], vec![0.8, 0.2]]).unwrap(),
        ),
    )
    .unwrap()
}

pub fn geometric_spec(ratio: f64) -> MarkovMeasureSpec {
    MarkovMeasureSpec::with_derived_lambda(
        MatrixSequence::perturbation(
            t_workhorse(),
            d_workhorse(),
            CoeffFamily::Geometric { ratio },
        )
        .unwrap(),
    )
    .unwrap()
}

pub fn power_two_spec() -> MarkovMeasureSpec {
    MarkovMeasureSpec::with_derived_lambda(
        MatrixSequence::perturbation(
            t_workhorse(),
            d_workhorse(),
            CoeffFamily::Power { exponent: 2.0 },
        )
        .unwrap(),
    )
    .unwrap()
}

pub fn signed_half_spec() -> MarkovMeasureSpec {
    MarkovMeasureSpec::with_derived_lambda(
        MatrixSequence::perturbation(
            t_workhorse(),
            d_workhorse(),
            CoeffFamily::SignedPower { exponent: 0.5 },
        )
        .unwrap(),
    )
    .unwrap()
}

pub fn eventually_constant_spec() -> MarkovMeasureSpec {
    let prefix = vec![
        StochasticMatrix::from_rows(&[vec![0.6, 0.4], vec![0.5, 0.5]]).unwrap(),
        StochasticMatrix::from_rows(&[vec![0.65, 0.35], vec![0.45, 0.55]]).unwrap(),
    ];
    MarkovMeasureSpec::with_derived_lambda(
        MatrixSequence::eventually_constant(prefix, t_workhorse()).unwrap(),
    )
    .unwrap()
}

/// A geometric instance with fast coefficient decay, sized for the
/// finite-level isometry checks: the truncation depth at the test targets
/// stays below the tested level, so residuals track the truncation target.
pub fn rep_geometric_spec() -> MarkovMeasureSpec {
    geometric_spec(0.02)
}

/// The quasi-stationary members of the built-in family suite at N = 2.
pub fn qs_suite() -> Vec<(&'static str, MarkovMeasureSpec)> {
    vec![
        (
            "constant",
            MarkovMeasureSpec::stationary(t_workhorse()).unwrap(),
        ),
        ("eventually-constant", eventually_constant_spec()),
        ("geometric r=0.5", geometric_spec(0.5)),
        ("power p=2", power_two_spec()),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Constant,
    EventuallyConstant,
    Geometric,
    PowerTwo,
    SignedHalf,
}

pub const ALL_KINDS: [FamilyKind; 5] = [
    FamilyKind::Constant,
    FamilyKind::EventuallyConstant,
    FamilyKind::Geometric,
    FamilyKind::PowerTwo,
    FamilyKind::SignedHalf,
];

pub fn random_stochastic(n: usize, rng: &mut ChaCha8Rng) -> StochasticMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.iter().map(|v| v / sum).collect()
        })
        .collect();
    StochasticMatrix::from_rows(&rows).unwrap()
}

/// A zero-row-sum direction scaled so that `max|D| = scale`.
pub fn random_direction(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Direction {
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean: f64 = raw.iter().sum::<f64>() / n as f64;
            raw.iter().map(|v| v - mean).collect()
        })
        .collect();
    let max_abs = rows
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    for row in &mut rows {
        for v in row.iter_mut() {
            *v *= scale / max_abs;
        }
    }
    Direction::from_rows(&rows).unwrap()
}

/// A randomized spec of the requested family kind; the perturbation size is
/// kept at half the limit matrix's entry floor so every kind stays valid.
pub fn random_family_spec(kind: FamilyKind, n: usize, rng: &mut ChaCha8Rng) -> MarkovMeasureSpec {
    let limit = random_stochastic(n, rng);
    let scale = 0.5 * limit.min_entry();
    let seq = match kind {
        FamilyKind::Constant => MatrixSequence::constant(limit),
        FamilyKind::EventuallyConstant => {
            let prefix = vec![random_stochastic(n, rng), random_stochastic(n, rng)];
            MatrixSequence::eventually_constant(prefix, limit).unwrap()
        }
        FamilyKind::Geometric => MatrixSequence::perturbation(
            limit,
            random_direction(n, scale, rng),
            CoeffFamily::Geometric { ratio: 0.5 },
        )
        .unwrap(),
        FamilyKind::PowerTwo => MatrixSequence::perturbation(
            limit,
            random_direction(n, scale, rng),
            CoeffFamily::Power { exponent: 2.0 },
        )
        .unwrap(),
        FamilyKind::SignedHalf => MatrixSequence::perturbation(
            limit,
            random_direction(n, scale, rng),
            CoeffFamily::SignedPower { exponent: 0.5 },
        )
        .unwrap(),
    };
    MarkovMeasureSpec::with_derived_lambda(seq).unwrap()
}

/// Exhaustive evaluation of `μ(σ^{-k}(C(I)) ∩ C(J))` by enumerating every
/// word long enough to pin both constraints. Independent of the closed
/// formula inside `mixing_correlation`.
pub fn mixing_brute_oracle(spec: &MarkovMeasureSpec, i: &Word, j: &Word, k: usize) -> f64 {
    let total_len = j.len().max(k + i.len());
    let mut total = 0.0;
    for word in enumerate_words(spec.alphabet(), total_len).unwrap() {
        if !word.has_prefix(j) {
            continue;
        }
        let matches_i = i
            .symbols()
            .iter()
            .enumerate()
            .all(|(offset, &s)| word.symbols()[k + offset] == s);
        if matches_i {
            total += spec.cylinder_mass(&word).unwrap();
        }
    }
    total
}
