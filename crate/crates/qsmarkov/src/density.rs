//! Radon-Nikodym machinery for quasi-stationary Markov measures.
//!
//! The central object is the infinite product of consecutive transition
//! ratios along a word,
//!
//! ```text
//! F(x1 x2 …) = Π_{n>=1} T(n)_{x_n, x_{n+1}} / T(n+1)_{x_n, x_{n+1}},
//! ```
//!
//! which is the reciprocal of the density of the shifted measure, while the
//! branch densities satisfy
//!
//! ```text
//! f_j(x1 x2 …)² = δ_{j,x1} · (λ_{x2} / (λ_{x1} T(1)_{x1,x2})) · F(x2 x3 …).
//! ```
//!
//! A [`DensityEngine`] truncates the product at a depth chosen so that the
//! certified tail bound of the sequence keeps the error on `log F` below a
//! target; evaluations on finite prefixes interpret the prefix as "any
//! infinite extension", with the unseen tail absorbed into the error bound.
//! Everything is computed in log space.

use thiserror::Error;

use crate::matseq::{MatrixError, StochasticMatrix};
use crate::measure::{MarkovMeasureSpec, MeasureError, QSStatus, SamplePath};
use crate::symbolic::{PathPrefix, Word};

/// Default target absolute error on `log F`.
pub const DEFAULT_EPS_LOG_F: f64 = 1e-10;

const DEPTH_SEARCH_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("sequence is not quasi-stationary; densities are undefined")]
    NotQuasiStationary,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("prefix of length {got} is too short, need at least {needed}")]
    PrefixTooShort { got: usize, needed: usize },
    #[error("level index n={n} outside the valid range {min}..={max}")]
    BadLevel { n: usize, min: usize, max: usize },
    #[error("specs act on different alphabets: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("no truncation depth below {cap} meets the target {target:e}")]
    DepthUnreachable { target: f64, cap: usize },
}

/// A value together with a certified bound on the absolute error of its
/// logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub log_error_bound: f64,
}

/// Evaluates the ratio product and branch densities of one measure with
/// certified truncation error.
#[derive(Debug, Clone)]
pub struct DensityEngine {
    spec: MarkovMeasureSpec,
    eps_log_f: f64,
    depth: usize,
    entry_floor: f64,
    /// `ln T(k)` for `k = 1 ..= depth+1`, row-major; the product factors up
    /// to the realized depth are pure table lookups.
    log_matrices: Vec<Vec<f64>>,
}

impl DensityEngine {
    pub fn new(spec: &MarkovMeasureSpec) -> Result<Self, DensityError> {
        Self::with_eps(spec, DEFAULT_EPS_LOG_F)
    }

    /// Builds an engine whose truncated `log F` carries absolute error at
    /// most `eps_log_f`, certified from the sequence's tail bound.
    pub fn with_eps(spec: &MarkovMeasureSpec, eps_log_f: f64) -> Result<Self, DensityError> {
        assert!(eps_log_f > 0.0, "error target must be positive");
        let verdict = spec.is_quasi_stationary();
        match verdict.status {
            QSStatus::QuasiStationary => {}
            QSStatus::NotQuasiStationary => return Err(DensityError::NotQuasiStationary),
            QSStatus::Undecided => {
                return Err(DensityError::Matrix(MatrixError::MissingTailCertificate))
            }
        }
        let entry_floor = verdict
            .evidence
            .entry_floor
            .ok_or(MatrixError::MissingTailCertificate)?;
        let mut depth = 0;
        loop {
            if tail_log_bound_at(spec, entry_floor, depth + 1) <= eps_log_f {
                break;
            }
            depth += 1;
            if depth > DEPTH_SEARCH_CAP {
                return Err(DensityError::DepthUnreachable {
                    target: eps_log_f,
                    cap: DEPTH_SEARCH_CAP,
                });
            }
        }
        let n = spec.n_symbols();
        let log_matrices = (1..=depth + 1)
            .map(|k| {
                let t = spec.seq().matrix(k);
                let mut logs = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        logs.push(t.get(i, j).ln());
                    }
                }
                logs
            })
            .collect();
        Ok(DensityEngine {
            spec: spec.clone(),
            eps_log_f,
            depth,
            entry_floor,
            log_matrices,
        })
    }

    /// `ln T(k)_{i,j}`, from the cache when `k` is within the realized depth.
    fn log_entry(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.spec.n_symbols();
        match self.log_matrices.get(k - 1) {
            Some(table) => table[i * n + j],
            None => self.spec.seq().matrix(k).get(i, j).ln(),
        }
    }

    pub fn spec(&self) -> &MarkovMeasureSpec {
        &self.spec
    }

    pub fn eps_log_f(&self) -> f64 {
        self.eps_log_f
    }

    /// The realized truncation depth `m`; factors `1..=m` of the product are
    /// evaluated, the rest is covered by the certificate. Zero for constant
    /// sequences, whose product is identically 1.
    pub fn realized_depth(&self) -> usize {
        self.depth
    }

    /// Certified bound on `Σ_{k>=from} |log(T(k)_e / T(k+1)_e)|` over any
    /// entry path `e`.
    pub fn tail_log_bound(&self, from: usize) -> f64 {
        tail_log_bound_at(&self.spec, self.entry_floor, from)
    }

    /// The ratio product `F` truncated at the realized depth (or at the end
    /// of the prefix, whichever is shorter), with its certified error bound.
    pub fn ratio_product(&self, x: &PathPrefix) -> Result<Evaluated, DensityError> {
        if x.is_empty() {
            return Err(DensityError::PrefixTooShort { got: 0, needed: 1 });
        }
        let symbols = x.symbols();
        let effective = self.depth.min(symbols.len() - 1);
        let mut log_value = 0.0;
        for k in 1..=effective {
            let row = symbols[k - 1] as usize;
            let col = symbols[k] as usize;
            log_value += self.log_entry(k, row, col) - self.log_entry(k + 1, row, col);
        }
        Ok(Evaluated {
            value: log_value.exp(),
            log_error_bound: self.tail_log_bound(effective + 1),
        })
    }

    /// The branch density `f_j` at a prefix: zero off the cylinder of `j`,
    /// otherwise `sqrt((λ_{x2} / (λ_{x1} T(1)_{x1,x2})) · F(x2 x3 …))`.
    pub fn branch_density(&self, j: u8, x: &PathPrefix) -> Result<f64, DensityError> {
        if x.len() < 2 {
            return Err(DensityError::PrefixTooShort {
                got: x.len(),
                needed: 2,
            });
        }
        let x1 = x.symbols()[0] as usize;
        if x1 != j as usize {
            return Ok(0.0);
        }
        let x2 = x.symbols()[1] as usize;
        let lambda = self.spec.lambda();
        let shifted = x.shift().expect("len >= 2");
        let product = self.ratio_product(&shifted)?;
        let log_f2 =
            lambda[x2].ln() - lambda[x1].ln() - self.log_entry(1, x1, x2) + product.value.ln();
        Ok((0.5 * log_f2).exp())
    }

    /// Density of the shifted measure, `1 / F(x)`.
    pub fn shift_density(&self, x: &PathPrefix) -> Result<f64, DensityError> {
        Ok(1.0 / self.ratio_product(x)?.value)
    }

    /// The finite-level branch density: the density of the branch image
    /// restricted to length-`n` cylinders,
    /// `δ_{j,x1} (λ_{x2}/(λ_{x1}T(1)_{x1,x2})) Π_{k=1}^{n-2} T(k)_{x_{k+1},x_{k+2}} / T(k+1)_{x_{k+1},x_{k+2}}`.
    /// Converges to `f_j²` as `n` grows.
    pub fn finite_level_branch_density(
        &self,
        j: u8,
        x: &PathPrefix,
        n: usize,
    ) -> Result<f64, DensityError> {
        if n < 3 {
            return Err(DensityError::BadLevel {
                n,
                min: 3,
                max: usize::MAX,
            });
        }
        if x.len() < n {
            return Err(DensityError::PrefixTooShort {
                got: x.len(),
                needed: n,
            });
        }
        let symbols = x.symbols();
        let x1 = symbols[0] as usize;
        if x1 != j as usize {
            return Ok(0.0);
        }
        let x2 = symbols[1] as usize;
        let lambda = self.spec.lambda();
        let mut log_value = lambda[x2].ln() - lambda[x1].ln() - self.log_entry(1, x1, x2);
        for k in 1..=n - 2 {
            let row = symbols[k] as usize;
            let col = symbols[k + 1] as usize;
            log_value += self.log_entry(k, row, col) - self.log_entry(k + 1, row, col);
        }
        Ok(log_value.exp())
    }
}

fn tail_log_bound_at(spec: &MarkovMeasureSpec, entry_floor: f64, from: usize) -> f64 {
    let bound = spec
        .seq()
        .tail_bound(from)
        .expect("engine construction verified the certificate");
    let q = bound / entry_floor;
    if q < 1.0 {
        // Σ |log(1+u_k)| <= -log(1 - Σ|u_k|) for Σ|u_k| < 1
        -(-q).ln_1p()
    } else {
        f64::INFINITY
    }
}

/// Joint evaluations for a pair of measures on the same alphabet.
#[derive(Debug, Clone)]
pub struct PairEngine {
    first: MarkovMeasureSpec,
    second: MarkovMeasureSpec,
}

/// Partial Kakutani sum along a path, with the individual Hellinger terms.
#[derive(Debug, Clone)]
pub struct KakutaniSum {
    pub partial_sum: f64,
    pub per_step: Vec<f64>,
}

impl PairEngine {
    pub fn new(first: MarkovMeasureSpec, second: MarkovMeasureSpec) -> Result<Self, DensityError> {
        if first.n_symbols() != second.n_symbols() {
            return Err(DensityError::AlphabetMismatch(
                first.n_symbols(),
                second.n_symbols(),
            ));
        }
        Ok(PairEngine { first, second })
    }

    pub fn first(&self) -> &MarkovMeasureSpec {
        &self.first
    }

    pub fn second(&self) -> &MarkovMeasureSpec {
        &self.second
    }

    /// The finite-level likelihood ratio of the second measure against the
    /// first on length-`n` cylinders:
    /// `(λ'_{x1}/λ_{x1}) Π_{k=1}^{n-1} T'(k)_{x_k,x_{k+1}} / T(k)_{x_k,x_{k+1}}`.
    pub fn likelihood_ratio(&self, x: &Word, n: usize) -> Result<f64, DensityError> {
        if n < 1 || x.len() < n {
            return Err(DensityError::PrefixTooShort {
                got: x.len(),
                needed: n.max(1),
            });
        }
        let symbols = x.symbols();
        let x1 = symbols[0] as usize;
        let mut log_z = self.second.lambda()[x1].ln() - self.first.lambda()[x1].ln();
        for k in 1..n {
            let t = self.first.seq().matrix(k);
            let t_prime = self.second.seq().matrix(k);
            let row = symbols[k - 1] as usize;
            let col = symbols[k] as usize;
            log_z += t_prime.get(row, col).ln() - t.get(row, col).ln();
        }
        Ok(log_z.exp())
    }

    /// The step-`n` Hellinger gap of row `i`:
    /// `1 - Σ_x sqrt(T'(n)_{i,x}) sqrt(T(n)_{i,x})`, in `[0, 1)` and zero iff
    /// the rows coincide.
    pub fn hellinger_term(&self, i: u8, n: usize) -> f64 {
        let t = self.first.seq().matrix(n);
        let t_prime = self.second.seq().matrix(n);
        hellinger_gap_rows(t.row(i as usize), t_prime.row(i as usize))
    }

    /// `Σ_x sqrt(T'(n)_{i,x} / T(n)_{i,x}) · T(n)_{i,x}`; algebraically equal
    /// to one minus the Hellinger term.
    pub fn conditional_sqrt_ratio(&self, i: u8, n: usize) -> f64 {
        let t = self.first.seq().matrix(n);
        let t_prime = self.second.seq().matrix(n);
        t.row(i as usize)
            .iter()
            .zip(t_prime.row(i as usize))
            .map(|(&p, &q)| (q / p).sqrt() * p)
            .sum()
    }

    /// Accumulates the per-step Hellinger terms along a sampled path.
    pub fn kakutani_sum(&self, path: &SamplePath) -> KakutaniSum {
        self.kakutani_sum_of_prefix(&path.prefix)
    }

    pub fn kakutani_sum_of_prefix(&self, prefix: &Word) -> KakutaniSum {
        let symbols = prefix.symbols();
        let mut per_step = Vec::with_capacity(symbols.len().saturating_sub(1));
        let mut partial_sum = 0.0;
        for (n, &i) in symbols
            .iter()
            .take(symbols.len().saturating_sub(1))
            .enumerate()
        {
            let term = self.hellinger_term(i, n + 1);
            per_step.push(term);
            partial_sum += term;
        }
        KakutaniSum {
            partial_sum,
            per_step,
        }
    }
}

/// Hellinger gap of two probability rows; clamped at zero against rounding.
pub fn hellinger_gap_rows(p: &[f64], q: &[f64]) -> f64 {
    let affinity: f64 = p.iter().zip(q).map(|(&a, &b)| (a * b).sqrt()).sum();
    (1.0 - affinity).max(0.0)
}

/// Hellinger gap of the worst row of two stochastic matrices, and the best.
pub fn row_gap_range(a: &StochasticMatrix, b: &StochasticMatrix) -> (f64, f64) {
    let mut min_gap = f64::INFINITY;
    let mut max_gap = 0.0f64;
    for i in 0..a.dim() {
        let gap = hellinger_gap_rows(a.row(i), b.row(i));
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
    }
    (min_gap, max_gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matseq::{CoeffFamily, Direction, MatrixSequence};
    use crate::symbolic::enumerate_words;

    fn t_workhorse() -> StochasticMatrix {
        StochasticMatrix::from_rows(&[vec![0.7, 0.3], vec![0.4, 0.6]]).unwrap()
    }

    fn uniform2() -> MarkovMeasureSpec {
        MarkovMeasureSpec::stationary(
            StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
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

    fn w(spec: &MarkovMeasureSpec, text: &str) -> Word {
        Word::parse(spec.alphabet(), text).unwrap()
    }

    #[test]
    fn constant_sequence_has_unit_product_and_depth_zero() {
        let engine = DensityEngine::new(&uniform2()).unwrap();
        assert_eq!(engine.realized_depth(), 0);
        let x = w(engine.spec(), "0101");
        let eval = engine.ratio_product(&x).unwrap();
        assert_eq!(eval.value, 1.0);
        assert_eq!(eval.log_error_bound, 0.0);
    }

    #[test]
    fn truncation_error_certified_against_deeper_evaluation() {
        let spec = geometric_spec(0.5);
        let shallow = DensityEngine::with_eps(&spec, 1e-6).unwrap();
        let deep = DensityEngine::with_eps(&spec, 1e-13).unwrap();
        assert!(shallow.realized_depth() < deep.realized_depth());
        let x = w(&spec, "01")
            .periodic_extension(deep.realized_depth() + 2)
            .unwrap();
        let coarse = shallow.ratio_product(&x).unwrap();
        let fine = deep.ratio_product(&x).unwrap();
        let log_gap = (coarse.value.ln() - fine.value.ln()).abs();
        assert!(
            log_gap <= coarse.log_error_bound,
            "gap {log_gap} exceeds certified bound {}",
            coarse.log_error_bound
        );
        assert!(coarse.log_error_bound <= 1e-6);
    }

    #[test]
    fn ratio_product_is_positive_and_finite() {
        let spec = geometric_spec(0.5);
        let engine = DensityEngine::new(&spec).unwrap();
        for path in spec.sample_paths(engine.realized_depth() + 2, 100, 3) {
            let eval = engine.ratio_product(&path.prefix).unwrap();
            assert!(eval.value > 0.0 && eval.value.is_finite());
            assert!(eval.log_error_bound.is_finite());
        }
    }

    #[test]
    fn uniform_branch_density_is_sqrt_two_on_cylinder() {
        let engine = DensityEngine::new(&uniform2()).unwrap();
        let x = w(engine.spec(), "011");
        assert!((engine.branch_density(0, &x).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(engine.branch_density(1, &x).unwrap(), 0.0);
    }

    #[test]
    fn stationary_branch_density_closed_form() {
        let spec = MarkovMeasureSpec::stationary(t_workhorse()).unwrap();
        let engine = DensityEngine::new(&spec).unwrap();
        let x = w(&spec, "01");
        let ratio: f64 = (3.0 / 7.0) / ((4.0 / 7.0) * 0.3);
        let expected = ratio.sqrt();
        assert!((engine.branch_density(0, &x).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn densities_reject_non_quasi_stationary_sequences() {
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
            DensityEngine::new(&signed).unwrap_err(),
            DensityError::NotQuasiStationary
        );
        let opaque = MarkovMeasureSpec::with_derived_lambda(
            MatrixSequence::explicit(vec![t_workhorse()], None).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            DensityEngine::new(&opaque).unwrap_err(),
            DensityError::Matrix(MatrixError::MissingTailCertificate)
        ));
    }

    #[test]
    fn branch_sum_formula_matches_shift_density() {
        for spec in [uniform2(), geometric_spec(0.5)] {
            let engine = DensityEngine::new(&spec).unwrap();
            let len = engine.realized_depth() + 3;
            for path in spec.sample_paths(len, 200, 17) {
                let x = &path.prefix;
                let mut sum = 0.0;
                for j in spec.alphabet().symbols() {
                    let f = engine
                        .branch_density(j, &x.inverse_branch(j).unwrap())
                        .unwrap();
                    sum += 1.0 / (f * f);
                }
                let target = engine.shift_density(x).unwrap();
                assert!(
                    (sum - target).abs() <= 1e-10 * target.max(1.0),
                    "sum formula residual {} vs {}",
                    sum,
                    target
                );
            }
        }
    }

    #[test]
    fn finite_level_density_examples() {
        // constant sequences: every ratio factor is 1
        let spec = MarkovMeasureSpec::stationary(t_workhorse()).unwrap();
        let engine = DensityEngine::new(&spec).unwrap();
        let x = w(&spec, "010101");
        let expected = (3.0 / 7.0) / ((4.0 / 7.0) * 0.3);
        for n in [3usize, 4, 6] {
            let z = engine.finite_level_branch_density(0, &x, n).unwrap();
            assert!((z - expected).abs() < 1e-13);
        }
        assert_eq!(engine.finite_level_branch_density(1, &x, 3).unwrap(), 0.0);
    }

    #[test]
    fn finite_level_density_converges_to_branch_square() {
        let spec = geometric_spec(0.5);
        let engine = DensityEngine::with_eps(&spec, 1e-13).unwrap();
        let len = engine.realized_depth() + 2;
        for path in spec.sample_paths(len.max(41), 20, 5) {
            let x = &path.prefix;
            let f = engine.branch_density(x.symbols()[0], x).unwrap();
            let target = f * f;
            let mut prev_gap = f64::INFINITY;
            for n in [10usize, 20, 40] {
                let z = engine
                    .finite_level_branch_density(x.symbols()[0], x, n)
                    .unwrap();
                let gap = (z - target).abs();
                assert!(
                    gap <= prev_gap + 1e-14,
                    "gap not decreasing: {gap} vs {prev_gap}"
                );
                // the two share factors up to n-2; the gap is covered by the
                // certified tail of the shorter product
                let certified =
                    target * engine.tail_log_bound(n - 1).exp_m1() + target * engine.eps_log_f();
                assert!(gap <= certified, "gap {gap} above certificate {certified}");
                prev_gap = gap;
            }
        }
    }

    #[test]
    fn likelihood_ratio_identity_and_hand_value() {
        let uniform = uniform2();
        let other = MarkovMeasureSpec::with_lambda(
            vec![0.8, 0.2],
            MatrixSequence::constant(
                StochasticMatrix::from_rows(&[vec![0.8, 0.2], vec![0.8, 0.2]]).unwrap(),
            ),
        )
        .unwrap();
        let same = PairEngine::new(uniform.clone(), uniform.clone()).unwrap();
        let x = w(&uniform, "0110");
        for n in 1..=4 {
            assert!((same.likelihood_ratio(&x, n).unwrap() - 1.0).abs() < 1e-15);
        }
        let pair = PairEngine::new(uniform.clone(), other).unwrap();
        let z2 = pair.likelihood_ratio(&w(&uniform, "00"), 2).unwrap();
        assert!((z2 - 2.56).abs() < 1e-14);
    }

    #[test]
    fn likelihood_ratio_martingale_property() {
        let pair = PairEngine::new(
            uniform2(),
            MarkovMeasureSpec::stationary(t_workhorse()).unwrap(),
        )
        .unwrap();
        let alphabet = pair.first().alphabet();
        for n in 1..=6usize {
            for word in enumerate_words(alphabet, n).unwrap() {
                let z_n = pair.likelihood_ratio(&word, n).unwrap();
                let t_n = pair.first().seq().matrix(n);
                let last = word.symbols()[n - 1] as usize;
                let mut expectation = 0.0;
                for s in alphabet.symbols() {
                    let child = word.concat(&Word::new(alphabet, vec![s]).unwrap()).unwrap();
                    expectation +=
                        pair.likelihood_ratio(&child, n + 1).unwrap() * t_n.get(last, s as usize);
                }
                let rel = (expectation - z_n).abs() / z_n.max(1.0);
                assert!(rel <= 1e-12, "martingale residual {rel} at {word}");
            }
        }
    }

    #[test]
    fn hellinger_term_examples() {
        let uniform = uniform2();
        let skew = MarkovMeasureSpec::with_lambda(
            vec![0.8, 0.2],
            MatrixSequence::constant(
                StochasticMatrix::from_rows(&[vec![0.8, 0.2], vec![0.8, 0.2]]).unwrap(),
            ),
        )
        .unwrap();
        let same = PairEngine::new(uniform.clone(), uniform.clone()).unwrap();
        assert_eq!(same.hellinger_term(0, 1), 0.0);

        let pair = PairEngine::new(uniform, skew).unwrap();
        let term = pair.hellinger_term(0, 1);
        let expected = 1.0 - (0.4f64.sqrt() + 0.1f64.sqrt());
        assert!((term - expected).abs() < 1e-15);
        assert!((term - 0.051317).abs() < 1e-6);

        let cond = pair.conditional_sqrt_ratio(0, 1);
        assert!((cond - 0.948683).abs() < 1e-6);
        for i in 0..2u8 {
            for n in [1usize, 2, 5] {
                let lhs = pair.conditional_sqrt_ratio(i, n);
                let rhs = 1.0 - pair.hellinger_term(i, n);
                assert!((lhs - rhs).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn hellinger_nonnegative_on_random_rows() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let mut p = [rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0)];
            let mut q = [rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0)];
            let (ps, qs) = (p[0] + p[1], q[0] + q[1]);
            p.iter_mut().for_each(|v| *v /= ps);
            q.iter_mut().for_each(|v| *v /= qs);
            let gap = hellinger_gap_rows(&p, &q);
            assert!((0.0..1.0).contains(&gap));
        }
        // ε-perturbed rows have strictly positive gap
        let gap = hellinger_gap_rows(&[0.5, 0.5], &[0.5 + 1e-6, 0.5 - 1e-6]);
        assert!(gap > 0.0);
    }

    #[test]
    fn kakutani_sum_examples() {
        let uniform = uniform2();
        let same = PairEngine::new(uniform.clone(), uniform.clone()).unwrap();
        let path = &uniform.sample_paths(50, 1, 1)[0];
        assert_eq!(same.kakutani_sum(path).partial_sum, 0.0);

        let skew = MarkovMeasureSpec::with_lambda(
            vec![0.8, 0.2],
            MatrixSequence::constant(
                StochasticMatrix::from_rows(&[vec![0.8, 0.2], vec![0.8, 0.2]]).unwrap(),
            ),
        )
        .unwrap();
        let pair = PairEngine::new(uniform, skew).unwrap();
        let sum = pair.kakutani_sum(path);
        let per_term = 1.0 - (0.4f64.sqrt() + 0.1f64.sqrt());
        assert!((sum.partial_sum - 49.0 * per_term).abs() < 1e-12);
    }

    #[test]
    fn kakutani_sum_bounded_for_summable_difference_pair() {
        // geometric perturbation against its own limit: per-step terms decay
        // like the coefficient, so partial sums stay below a small constant
        let spec = geometric_spec(0.5);
        let limit = spec.stationary_limit_measure().unwrap();
        let pair = PairEngine::new(limit, spec.clone()).unwrap();
        for path in spec.sample_paths(200, 20, 13) {
            let sum = pair.kakutani_sum(&path);
            assert!(sum.partial_sum < 0.1, "partial sum {}", sum.partial_sum);
        }
    }
}
