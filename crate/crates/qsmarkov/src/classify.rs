//! Decides equivalence vs. mutual singularity for pairs of quasi-stationary
//! Markov measures.
//!
//! Two quasi-stationary Markov measures are either equivalent or mutually
//! singular — never in between — and the corresponding Cuntz algebra
//! representations are respectively unitarily equivalent or disjoint. The
//! numerical classifier deliberately weakens that dichotomy to a trichotomy:
//! `Equivalent` and `Singular` are emitted only with a certified closed-form
//! argument, and everything else is `Undecided` with sampled diagnostics.
//! Soundness over completeness.
//!
//! Decision order:
//! 1. structurally identical sequences — equivalent with difference bound 0;
//! 2. a finite certified bound on `Σ_n max_ij |T(n) - T'(n)|` (summable
//!    differences, via both sequences' deviation-from-limit bounds around a
//!    common limit matrix) — equivalent;
//! 3. a certified positive floor on every per-step Hellinger term beyond some
//!    `n0` (possible when the limit matrices differ in *every* row) —
//!    singular;
//! 4. otherwise undecided, with Kakutani partial-sum statistics along sampled
//!    paths attached as advisory diagnostics.
//!
//! A mismatch of the initial vectors alone never affects the verdict: it
//! multiplies every finite-level likelihood ratio by a factor bounded away
//! from zero and infinity, so the routes above ignore `λ` entirely.

use thiserror::Error;

use crate::density::{row_gap_range, PairEngine};
use crate::matseq::MatrixError;
use crate::measure::{MarkovMeasureSpec, MeasureError, QSStatus};

const FLOOR_SEARCH_CAP: usize = 1 << 24;

/// Default sampling parameters for the advisory diagnostics.
pub const DIAGNOSTIC_PATHS: usize = 200;
pub const DIAGNOSTIC_PATH_LEN: usize = 200;
pub const DIAGNOSTIC_SEED: u64 = 0xD1CE;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("the {0:?} measure is not certified quasi-stationary")]
    NotQuasiStationary(WhichMeasure),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("measures act on different alphabets: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichMeasure {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Equivalent,
    Singular,
    Undecided,
}

/// The certificate backing a verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Certified bound on `Σ_n max_ij |T(n)_ij - T'(n)_ij|`.
    SummableDifference { bound: f64 },
    /// All per-step Hellinger terms are at least `certified_floor` from step
    /// `from_n` on; `limit_gap` is the smallest limit-row Hellinger gap the
    /// terms converge to.
    PerTermHellingerFloor {
        limit_gap: f64,
        certified_floor: f64,
        from_n: usize,
    },
    /// Equivalence with the stationary limit measure via the telescoping
    /// bound `Σ_n max|T(n) - T∞| <= Σ_k k·max|T(k+1) - T(k)|`.
    StationaryReduction {
        weighted_bound: f64,
        difference_bound: f64,
    },
    /// Advisory statistics only; never certifies a decision.
    SampledKakutani(KakutaniDiagnostics),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomyVerdict {
    pub status: Status,
    pub certificate: Certificate,
}

/// Kakutani partial sums along paths sampled under each measure.
#[derive(Debug, Clone, PartialEq)]
pub struct KakutaniDiagnostics {
    pub path_len: usize,
    pub paths_per_measure: usize,
    pub under_first: SumStats,
    pub under_second: SumStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl SumStats {
    fn from_values(values: &[f64]) -> Self {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut total = 0.0;
        for &v in values {
            min = min.min(v);
            max = max.max(v);
            total += v;
        }
        SumStats {
            min,
            max,
            mean: total / values.len() as f64,
        }
    }
}

fn require_quasi_stationary(
    spec: &MarkovMeasureSpec,
    which: WhichMeasure,
) -> Result<(), ClassifyError> {
    match spec.is_quasi_stationary().status {
        QSStatus::QuasiStationary => Ok(()),
        _ => Err(ClassifyError::NotQuasiStationary(which)),
    }
}

/// Classifies a pair of quasi-stationary measures as equivalent, mutually
/// singular, or undecided, with a certificate for any decision.
pub fn classify_pair(
    a: &MarkovMeasureSpec,
    b: &MarkovMeasureSpec,
) -> Result<DichotomyVerdict, ClassifyError> {
    classify_pair_with(a, b, DIAGNOSTIC_PATHS, DIAGNOSTIC_PATH_LEN, DIAGNOSTIC_SEED)
}

pub fn classify_pair_with(
    a: &MarkovMeasureSpec,
    b: &MarkovMeasureSpec,
    diagnostic_paths: usize,
    diagnostic_len: usize,
    seed: u64,
) -> Result<DichotomyVerdict, ClassifyError> {
    if a.n_symbols() != b.n_symbols() {
        return Err(ClassifyError::AlphabetMismatch(
            a.n_symbols(),
            b.n_symbols(),
        ));
    }
    require_quasi_stationary(a, WhichMeasure::First)?;
    require_quasi_stationary(b, WhichMeasure::Second)?;

    // route 1: identical sequences (λ mismatch is immaterial)
    if a.seq() == b.seq() {
        return Ok(DichotomyVerdict {
            status: Status::Equivalent,
            certificate: Certificate::SummableDifference { bound: 0.0 },
        });
    }

    let limit_a = a.seq().limit_matrix()?;
    let limit_b = b.seq().limit_matrix()?;
    let limits_equal = limit_a.max_abs_diff(&limit_b) == 0.0;

    // route 2: summable differences around a common limit
    if limits_equal {
        if let (Some(dev_a), Some(dev_b)) = (
            a.seq().deviation_from_limit_bound(),
            b.seq().deviation_from_limit_bound(),
        ) {
            return Ok(DichotomyVerdict {
                status: Status::Equivalent,
                certificate: Certificate::SummableDifference {
                    bound: dev_a + dev_b,
                },
            });
        }
    }

    // route 3: per-step Hellinger floor when every limit row differs
    let (min_gap, _max_gap) = row_gap_range(&limit_a, &limit_b);
    if min_gap > 0.0 {
        if let Some(from_n) = hellinger_floor_step(a, b, min_gap) {
            return Ok(DichotomyVerdict {
                status: Status::Singular,
                certificate: Certificate::PerTermHellingerFloor {
                    limit_gap: min_gap,
                    certified_floor: min_gap / 2.0,
                    from_n,
                },
            });
        }
    }

    // no certificate applies: sample and report
    let pair = PairEngine::new(a.clone(), b.clone()).expect("alphabets already checked");
    let sums_first: Vec<f64> = a
        .sample_paths(diagnostic_len, diagnostic_paths, seed)
        .iter()
        .map(|p| pair.kakutani_sum(p).partial_sum)
        .collect();
    let sums_second: Vec<f64> = b
        .sample_paths(diagnostic_len, diagnostic_paths, seed ^ 1)
        .iter()
        .map(|p| pair.kakutani_sum(p).partial_sum)
        .collect();
    Ok(DichotomyVerdict {
        status: Status::Undecided,
        certificate: Certificate::SampledKakutani(KakutaniDiagnostics {
            path_len: diagnostic_len,
            paths_per_measure: diagnostic_paths,
            under_first: SumStats::from_values(&sums_first),
            under_second: SumStats::from_values(&sums_second),
        }),
    })
}

/// Finds the first step `n0` from which every per-step Hellinger term is
/// certified to exceed half the minimal limit-row gap.
///
/// The term at step `n` differs from its limit value by at most
/// `N (B_a(n) + B_b(n)) / (2 sqrt(c))`, where the `B` are the certified tail
/// bounds (which dominate `max|T(n) - T∞|`) and `c` is the common entry
/// floor.
fn hellinger_floor_step(
    a: &MarkovMeasureSpec,
    b: &MarkovMeasureSpec,
    min_gap: f64,
) -> Option<usize> {
    let floor_a = a.seq().entry_floor()?;
    let floor_b = b.seq().entry_floor()?;
    let c = floor_a.min(floor_b);
    if !(c.is_finite() && c > 0.0) {
        return None;
    }
    let n_sym = a.n_symbols() as f64;
    let target = min_gap / 2.0;
    let mut n = 1usize;
    while n <= FLOOR_SEARCH_CAP {
        let deviation =
            n_sym * (a.seq().tail_bound(n)? + b.seq().tail_bound(n)?) / (2.0 * c.sqrt());
        if deviation <= target {
            return Some(n);
        }
        n *= 2;
    }
    None
}

/// The outcome of comparing a measure with its own stationary limit.
#[derive(Debug, Clone, PartialEq)]
pub enum StationaryEquivalence {
    Equivalent {
        verdict: DichotomyVerdict,
        stationary: MarkovMeasureSpec,
    },
    NotApplicable {
        reason: String,
    },
}

/// Checks the strengthened certificate `Σ_n n·max|T(n) - T(n+1)| < ∞` and,
/// when it holds, certifies equivalence between the measure and the
/// stationary measure of its limit matrix.
pub fn stationary_equivalent(
    m: &MarkovMeasureSpec,
) -> Result<StationaryEquivalence, ClassifyError> {
    if m.is_quasi_stationary().status != QSStatus::QuasiStationary {
        return Ok(StationaryEquivalence::NotApplicable {
            reason: "measure is not certified quasi-stationary".to_string(),
        });
    }
    let Some(weighted) = m.seq().weighted_step_bound() else {
        return Ok(StationaryEquivalence::NotApplicable {
            reason: "no closed-form bound on the weighted difference sum".to_string(),
        });
    };
    let stationary = m.stationary_limit_measure()?;
    Ok(StationaryEquivalence::Equivalent {
        verdict: DichotomyVerdict {
            status: Status::Equivalent,
            certificate: Certificate::StationaryReduction {
                weighted_bound: weighted,
                difference_bound: weighted,
            },
        },
        stationary,
    })
}

/// Restates a measure verdict for the associated Cuntz algebra
/// representations: equivalent measures induce unitarily equivalent
/// representations, mutually singular measures induce disjoint ones.
pub fn representation_verdict(verdict: &DichotomyVerdict) -> &'static str {
    match verdict.status {
        Status::Equivalent => "representations unitarily equivalent",
        Status::Singular => "representations disjoint",
        Status::Undecided => "undecided",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matseq::{CoeffFamily, Direction, MatrixSequence, StochasticMatrix};

    fn t_workhorse() -> StochasticMatrix {
        StochasticMatrix::from_rows(&[vec![0.7, 0.3], vec![0.4, 0.6]]).unwrap()
    }

    fn uniform2() -> MarkovMeasureSpec {
        MarkovMeasureSpec::stationary(
            StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
        )
        .unwrap()
    }

    fn skew2() -> MarkovMeasureSpec {
        MarkovMeasureSpec::with_lambda(
            vec![0.8, 0.2],
            MatrixSequence::constant(
                StochasticMatrix::from_rows(&[vec![0.8, 0.2], vec![0.8, 0.2]]).unwrap(),
            ),
        )
        .unwrap()
    }

    fn geometric_spec(ratio: f64) -> MarkovMeasureSpec {
        let d = Direction::from_rows(&[vec![0.1, -0.1], vec![-0.05, 0.05]]).unwrap();
        MarkovMeasureSpec::with_derived_lambda(
            MatrixSequence::perturbation(t_workhorse(), d, CoeffFamily::Geometric { ratio })
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn identical_specs_are_equivalent_with_zero_bound() {
        let m = geometric_spec(0.5);
        let verdict = classify_pair(&m, &m).unwrap();
        assert_eq!(verdict.status, Status::Equivalent);
        assert_eq!(
            verdict.certificate,
            Certificate::SummableDifference { bound: 0.0 }
        );
    }

    #[test]
    fn uniform_vs_skew_rows_is_singular() {
        let verdict = classify_pair(&uniform2(), &skew2()).unwrap();
        assert_eq!(verdict.status, Status::Singular);
        match verdict.certificate {
            Certificate::PerTermHellingerFloor {
                limit_gap,
                certified_floor,
                from_n,
            } => {
                assert!((limit_gap - 0.051317).abs() < 1e-6);
                assert!(certified_floor > 0.0 && certified_floor <= limit_gap);
                assert_eq!(from_n, 1); // constant sequences deviate by zero
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn geometric_perturbation_vs_limit_is_equivalent() {
        let m = geometric_spec(0.5);
        let limit = m.stationary_limit_measure().unwrap();
        let verdict = classify_pair(&m, &limit).unwrap();
        assert_eq!(verdict.status, Status::Equivalent);
        match verdict.certificate {
            Certificate::SummableDifference { bound } => {
                // Σ |c_n| max|D| = (r/(1-r)) · 0.1 = 0.1
                assert!((bound - 0.1).abs() < 1e-12);
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn verdict_is_symmetric() {
        let pairs = [
            (uniform2(), skew2()),
            (
                geometric_spec(0.5),
                geometric_spec(0.5).stationary_limit_measure().unwrap(),
            ),
        ];
        for (a, b) in pairs {
            let forward = classify_pair(&a, &b).unwrap();
            let backward = classify_pair(&b, &a).unwrap();
            assert_eq!(forward.status, backward.status);
        }
    }

    #[test]
    fn non_quasi_stationary_inputs_are_rejected() {
        let d = Direction::from_rows(&[vec![0.1, -0.1], vec![-0.05, 0.05]]).unwrap();
        let signed = MarkovMeasureSpec::with_derived_lambda(
            MatrixSequence::perturbation(
                t_workhorse(),
                d,
                CoeffFamily::SignedPower { exponent: 0.5 },
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(
            classify_pair(&signed, &uniform2()).unwrap_err(),
            ClassifyError::NotQuasiStationary(WhichMeasure::First)
        );
        assert_eq!(
            classify_pair(&uniform2(), &signed).unwrap_err(),
            ClassifyError::NotQuasiStationary(WhichMeasure::Second)
        );
    }

    #[test]
    fn undecided_pairs_come_with_diagnostics() {
        // distinct limits that differ in only one row: no floor over all rows,
        // and differences are not summable — honest undecided
        let t_other = StochasticMatrix::from_rows(&[vec![0.7, 0.3], vec![0.5, 0.5]]).unwrap();
        let a = MarkovMeasureSpec::stationary(t_workhorse()).unwrap();
        let b = MarkovMeasureSpec::stationary(t_other).unwrap();
        let verdict = classify_pair_with(&a, &b, 50, 100, 3).unwrap();
        assert_eq!(verdict.status, Status::Undecided);
        match verdict.certificate {
            Certificate::SampledKakutani(diag) => {
                assert_eq!(diag.paths_per_measure, 50);
                assert!(diag.under_first.mean > 0.0);
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn stationary_equivalent_examples() {
        // constant sequence: bound 0
        let constant = MarkovMeasureSpec::stationary(t_workhorse()).unwrap();
        match stationary_equivalent(&constant).unwrap() {
            StationaryEquivalence::Equivalent {
                verdict,
                stationary,
            } => {
                assert_eq!(verdict.status, Status::Equivalent);
                assert_eq!(stationary, constant);
                match verdict.certificate {
                    Certificate::StationaryReduction { weighted_bound, .. } => {
                        assert_eq!(weighted_bound, 0.0)
                    }
                    other => panic!("unexpected certificate {other:?}"),
                }
            }
            other => panic!("expected equivalence, got {other:?}"),
        }

        // geometric: Σ n |c_n - c_{n+1}| = r/(1-r), times max|D|
        match stationary_equivalent(&geometric_spec(0.5)).unwrap() {
            StationaryEquivalence::Equivalent { verdict, .. } => match verdict.certificate {
                Certificate::StationaryReduction { weighted_bound, .. } => {
                    assert!((weighted_bound - 0.1).abs() < 1e-12);
                }
                other => panic!("unexpected certificate {other:?}"),
            },
            other => panic!("expected equivalence, got {other:?}"),
        }

        // signed power p = 0.5 is not even quasi-stationary
        let d = Direction::from_rows(&[vec![0.1, -0.1], vec![-0.05, 0.05]]).unwrap();
        let signed = MarkovMeasureSpec::with_derived_lambda(
            MatrixSequence::perturbation(
                t_workhorse(),
                d,
                CoeffFamily::SignedPower { exponent: 0.5 },
            )
            .unwrap(),
        )
        .unwrap();
        assert!(matches!(
            stationary_equivalent(&signed).unwrap(),
            StationaryEquivalence::NotApplicable { .. }
        ));
    }

    #[test]
    fn stationary_equivalence_consistent_with_classifier() {
        for m in [geometric_spec(0.5), geometric_spec(0.3)] {
            if let StationaryEquivalence::Equivalent { stationary, .. } =
                stationary_equivalent(&m).unwrap()
            {
                let verdict = classify_pair(&m, &stationary).unwrap();
                assert_ne!(verdict.status, Status::Singular);
            } else {
                panic!("geometric family must reduce to its stationary limit");
            }
        }
    }

    #[test]
    fn singular_pair_has_large_sampled_kakutani_sums() {
        // advisory sanity check: along sampled paths the partial sums at
        // length 200 exceed 5 for a pair certified singular
        let a = uniform2();
        let b = skew2();
        let pair = PairEngine::new(a, b.clone()).unwrap();
        let paths = b.sample_paths(200, 1000, 41);
        let exceeding = paths
            .iter()
            .filter(|p| pair.kakutani_sum(p).partial_sum > 5.0)
            .count();
        assert!(exceeding >= 990, "only {exceeding} of 1000 exceeded");
    }

    #[test]
    fn representation_verdict_restates_status() {
        let eq = DichotomyVerdict {
            status: Status::Equivalent,
            certificate: Certificate::SummableDifference { bound: 0.0 },
        };
        assert_eq!(
            representation_verdict(&eq),
            "representations unitarily equivalent"
        );
        let sing = DichotomyVerdict {
            status: Status::Singular,
            certificate: Certificate::SummableDifference { bound: 0.0 },
        };
        assert_eq!(representation_verdict(&sing), "representations disjoint");
        let und = DichotomyVerdict {
            status: Status::Undecided,
            certificate: Certificate::SummableDifference { bound: 0.0 },
        };
        assert_eq!(representation_verdict(&und), "undecided");
    }
}
