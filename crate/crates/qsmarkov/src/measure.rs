//! Markov measures on the space of one-sided infinite words: cylinder
//! masses, Kolmogorov consistency, quasi-stationarity verdicts, the
//! stationary limit measure, seeded path sampling, and shift-mixing
//! correlations.
//!
//! All masses are accumulated in log space and exponentiated at the boundary;
//! depth-50 cylinder masses underflow f64 otherwise.

use rand::distributions::Uniform;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matseq::{perron_left, MatrixError, MatrixSequence, StochasticMatrix};
use crate::symbolic::{enumerate_words, Alphabet, SymbolicError, Word};

/// Largest `‖λ T(1) - λ‖∞` accepted for a user-supplied initial vector.
pub const LAMBDA_TOL: f64 = 1e-10;

/// Relative tolerance for the additivity checks.
pub const MASS_REL_TOL: f64 = 1e-12;

/// Probe depth used when reporting partial sums of the quasi-stationarity
/// criteria.
pub const DEFAULT_QS_PROBE_DEPTH: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("initial vector has {got} entries, expected {expected}")]
    LambdaDimension { got: usize, expected: usize },
    #[error("initial vector entry {index} is not strictly positive")]
    LambdaNotPositive { index: usize },
    #[error("‖λT(1) − λ‖∞ = {residual:e} exceeds {LAMBDA_TOL:e}; λ must be fixed by T(1)")]
    LambdaNotFixed { residual: f64 },
    #[error("sequence is not quasi-stationary")]
    NotQuasiStationary,
    #[error("word uses an alphabet of {got} symbols, spec has {expected}")]
    AlphabetMismatch { got: usize, expected: usize },
    #[error("mixing shift k={k} is smaller than |J|={j_len} and brute force exceeds the cap")]
    MixingCapExceeded { k: usize, j_len: usize },
}

/// A Markov measure: a positive probability row vector `λ` fixed by the first
/// matrix, together with a certified matrix sequence.
///
/// The cylinder indexed by `i_1 … i_k` receives mass
/// `λ_{i_1} T(1)_{i_1,i_2} ⋯ T(k-1)_{i_{k-1},i_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasureSpec {
    lambda: Vec<f64>,
    seq: MatrixSequence,
}

impl MarkovMeasureSpec {
    /// Derives `λ` as the Perron vector of `T(1)`, which satisfies the
    /// fixed-point requirement by construction.
    pub fn with_derived_lambda(seq: MatrixSequence) -> Result<Self, MeasureError> {
        let lambda = perron_left(&seq.matrix(1))?.weights().to_vec();
        Ok(MarkovMeasureSpec { lambda, seq })
    }

    /// Accepts a user-supplied `λ` only when it is positive and fixed by
    /// `T(1)` within [`LAMBDA_TOL`].
    pub fn with_lambda(lambda: Vec<f64>, seq: MatrixSequence) -> Result<Self, MeasureError> {
        if lambda.len() != seq.dim() {
            return Err(MeasureError::LambdaDimension {
                got: lambda.len(),
                expected: seq.dim(),
            });
        }
        for (index, &v) in lambda.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(MeasureError::LambdaNotPositive { index });
            }
        }
        let sum: f64 = lambda.iter().sum();
        let lambda: Vec<f64> = lambda.iter().map(|v| v / sum).collect();
        let image = seq.matrix(1).left_apply(&lambda);
        let residual = image
            .iter()
            .zip(&lambda)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual > LAMBDA_TOL {
            return Err(MeasureError::LambdaNotFixed { residual });
        }
        Ok(MarkovMeasureSpec { lambda, seq })
    }

    /// The stationary measure of a single matrix.
    pub fn stationary(t: StochasticMatrix) -> Result<Self, MeasureError> {
        Self::with_derived_lambda(MatrixSequence::constant(t))
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn seq(&self) -> &MatrixSequence {
        &self.seq
    }

    pub fn n_symbols(&self) -> usize {
        self.seq.dim()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.n_symbols()).expect("sequence dimension is a valid alphabet")
    }

    fn check_word(&self, w: &Word) -> Result<(), MeasureError> {
        if w.alphabet().n_symbols() != self.n_symbols() {
            return Err(MeasureError::AlphabetMismatch {
                got: w.alphabet().n_symbols(),
                expected: self.n_symbols(),
            });
        }
        Ok(())
    }

    /// `ln μ(C(I))`; zero for the empty word.
    pub fn log_cylinder_mass(&self, word: &Word) -> Result<f64, MeasureError> {
        self.check_word(word)?;
        let symbols = word.symbols();
        if symbols.is_empty() {
            return Ok(0.0);
        }
        let mut log_mass = self.lambda[symbols[0] as usize].ln();
        for k in 1..symbols.len() {
            let t = self.seq.matrix(k);
            log_mass += t.get(symbols[k - 1] as usize, symbols[k] as usize).ln();
        }
        Ok(log_mass)
    }

    pub fn cylinder_mass(&self, word: &Word) -> Result<f64, MeasureError> {
        Ok(self.log_cylinder_mass(word)?.exp())
    }

    /// Checks `Σ_j μ(C(Ij)) = μ(C(I))` for every word with `|I| < depth`.
    pub fn consistency_check(&self, depth: usize) -> Result<ConsistencyReport, MeasureError> {
        let alphabet = self.alphabet();
        let mut report = ConsistencyReport {
            depth,
            words_checked: 0,
            max_abs_deviation: 0.0,
            max_rel_deviation: 0.0,
            worst_word: Word::empty(alphabet),
        };
        for len in 0..depth {
            for word in enumerate_words(alphabet, len)? {
                let mass = self.cylinder_mass(&word)?;
                let mut children_sum = 0.0;
                for j in alphabet.symbols() {
                    let child = word.concat(&Word::new(alphabet, vec![j])?)?;
                    children_sum += self.cylinder_mass(&child)?;
                }
                let abs_dev = (children_sum - mass).abs();
                let rel_dev = abs_dev / mass;
                report.words_checked += 1;
                if abs_dev > report.max_abs_deviation {
                    report.max_abs_deviation = abs_dev;
                }
                if rel_dev > report.max_rel_deviation {
                    report.max_rel_deviation = rel_dev;
                    report.worst_word = word.clone();
                }
            }
        }
        Ok(report)
    }

    /// Decides quasi-stationarity from the sequence's certificates.
    ///
    /// The positive verdict uses the summable-consecutive-difference
    /// criterion: a finite certified tail bound together with a positive
    /// entry floor. The negative verdict uses the closed-form family rule for
    /// divergent coefficient families. Without either, the verdict is
    /// `Undecided` — partial sums to a probe depth are reported as evidence
    /// but never promoted to a decision.
    pub fn is_quasi_stationary(&self) -> QSVerdict {
        self.is_quasi_stationary_with_probe(DEFAULT_QS_PROBE_DEPTH)
    }

    pub fn is_quasi_stationary_with_probe(&self, probe_depth: usize) -> QSVerdict {
        let n = self.n_symbols();
        let mut ratio_partial = vec![0.0; n * n];
        let mut diff_partial = 0.0;
        let mut current = self.seq.matrix(1);
        for k in 1..=probe_depth {
            let next = self.seq.matrix(k + 1);
            diff_partial += current.max_abs_diff(&next);
            for i in 0..n {
                for j in 0..n {
                    ratio_partial[i * n + j] += (current.get(i, j) / next.get(i, j) - 1.0).abs();
                }
            }
            current = next;
        }
        let tail_bound_total = self.seq.tail_bound(1);
        let entry_floor = self.seq.entry_floor();
        let evidence = QSEvidence {
            tail_bound_total,
            entry_floor,
            ratio_partial_sums: ratio_partial,
            diff_partial_sum: diff_partial,
            probe_depth,
        };
        if self.seq.divergence_certified() {
            return QSVerdict {
                status: QSStatus::NotQuasiStationary,
                criterion: "closed-form divergence of the consecutive-difference sum",
                evidence,
            };
        }
        match (tail_bound_total, entry_floor) {
            (Some(_), Some(floor)) if floor > 0.0 => QSVerdict {
                status: QSStatus::QuasiStationary,
                criterion:
                    "certified tail bound on consecutive differences with positive entry floor",
                evidence,
            },
            _ => QSVerdict {
                status: QSStatus::Undecided,
                criterion: "no tail certificate; partial sums reported only as diagnostics",
                evidence,
            },
        }
    }

    /// The stationary measure of the declared limit matrix.
    pub fn stationary_limit_measure(&self) -> Result<MarkovMeasureSpec, MeasureError> {
        match self.is_quasi_stationary().status {
            QSStatus::QuasiStationary => {}
            QSStatus::NotQuasiStationary => return Err(MeasureError::NotQuasiStationary),
            QSStatus::Undecided => {
                return Err(MeasureError::Matrix(MatrixError::MissingTailCertificate))
            }
        }
        let limit = self.seq.limit_matrix()?;
        MarkovMeasureSpec::stationary(limit)
    }

    /// Draws `count` prefixes of length `len`. Each path derives its own
    /// generator from `seed` and the path index, so draws are reproducible
    /// regardless of evaluation order.
    pub fn sample_paths(&self, len: usize, count: usize, seed: u64) -> Vec<SamplePath> {
        assert!(len >= 1, "paths must have at least one symbol");
        let alphabet = self.alphabet();
        let matrices: Vec<StochasticMatrix> = (1..len).map(|k| self.seq.matrix(k)).collect();
        let unit = Uniform::new(0.0f64, 1.0);
        (0..count)
            .map(|index| {
                let path_seed = splitmix64(seed ^ splitmix64(index as u64));
                let mut rng = ChaCha8Rng::seed_from_u64(path_seed);
                let mut symbols = Vec::with_capacity(len);
                let mut log_mass;
                let first = draw_from(&self.lambda, rng.sample(unit));
                log_mass = self.lambda[first].ln();
                symbols.push(first as u8);
                for t in &matrices {
                    let prev = *symbols.last().unwrap() as usize;
                    let next = draw_from(t.row(prev), rng.sample(unit));
                    log_mass += t.get(prev, next).ln();
                    symbols.push(next as u8);
                }
                SamplePath {
                    prefix: Word::new(alphabet, symbols).expect("sampled symbols are in range"),
                    seed: path_seed,
                    log_mass,
                }
            })
            .collect()
    }

    /// `μ(σ^{-k}(C(I)) ∩ C(J))`, the mixing correlation at shift `k`.
    ///
    /// For `k >= |J|` this is the exact product formula
    /// `μ(C(J)) · (T(r)⋯T(k))_{j_r, i_1} · T(k+1)_{i_1,i_2} ⋯ T(k+l-1)`;
    /// for smaller `k` the overlap is resolved by exhaustive enumeration.
    pub fn mixing_correlation(&self, i: &Word, j: &Word, k: usize) -> Result<f64, MeasureError> {
        self.check_word(i)?;
        self.check_word(j)?;
        let l = i.len();
        let r = j.len();
        if l == 0 {
            return self.cylinder_mass(j);
        }
        if k < r {
            return self.mixing_brute_force(i, j, k);
        }
        let i_syms = i.symbols();
        // log of the trailing factor T(k+1)_{i1,i2} … T(k+l-1)_{i_{l-1},i_l}
        let mut log_tail = 0.0;
        for s in 1..l {
            let t = self.seq.matrix(k + s);
            log_tail += t.get(i_syms[s - 1] as usize, i_syms[s] as usize).ln();
        }
        if r == 0 {
            if k == 0 {
                // σ^0 is the identity: μ(C(I))
                return self.cylinder_mass(i);
            }
            // μ(σ^{-k} C(I)) = (λ T(1)…T(k))_{i_1} · tail
            let mut row = self.lambda.clone();
            for t in 1..=k {
                row = self.seq.matrix(t).left_apply(&row);
            }
            return Ok(row[i_syms[0] as usize] * log_tail.exp());
        }
        // bridge factor (T(r) T(r+1) … T(k))_{j_r, i_1}
        let mut bridge = self.seq.matrix(r);
        for t in r + 1..=k {
            bridge = bridge.multiply(&self.seq.matrix(t));
        }
        let j_last = j.symbols()[r - 1] as usize;
        let log_mass_j = self.log_cylinder_mass(j)?;
        Ok((log_mass_j + bridge.get(j_last, i_syms[0] as usize).ln() + log_tail).exp())
    }

    /// Exhaustive fallback: sums cylinder masses over all words consistent
    /// with `prefix J` and `symbols of I at positions k+1 … k+|I|`.
    fn mixing_brute_force(&self, i: &Word, j: &Word, k: usize) -> Result<f64, MeasureError> {
        let alphabet = self.alphabet();
        let total_len = j.len().max(k + i.len());
        let mut template: Vec<Option<u8>> = vec![None; total_len];
        for (pos, &s) in j.symbols().iter().enumerate() {
            template[pos] = Some(s);
        }
        for (offset, &s) in i.symbols().iter().enumerate() {
            let pos = k + offset;
            match template[pos] {
                Some(existing) if existing != s => return Ok(0.0),
                _ => template[pos] = Some(s),
            }
        }
        let free_positions: Vec<usize> = template
            .iter()
            .enumerate()
            .filter_map(|(pos, s)| s.is_none().then_some(pos))
            .collect();
        let fills = enumerate_words(alphabet, free_positions.len())
            .map_err(|_| MeasureError::MixingCapExceeded { k, j_len: j.len() })?;
        let mut total = 0.0;
        let mut symbols: Vec<u8> = template.iter().map(|s| s.unwrap_or(0)).collect();
        for fill in fills {
            for (slot, &value) in free_positions.iter().zip(fill.symbols()) {
                symbols[*slot] = value;
            }
            let word = Word::new(alphabet, symbols.clone())?;
            total += self.cylinder_mass(&word)?;
        }
        Ok(total)
    }
}

fn draw_from(pmf: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (idx, &p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return idx;
        }
    }
    pmf.len() - 1
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub depth: usize,
    pub words_checked: usize,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
    pub worst_word: Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QSStatus {
    QuasiStationary,
    NotQuasiStationary,
    Undecided,
}

/// Partial sums of the two summability criteria plus the certificate data
/// the verdict was actually based on.
#[derive(Debug, Clone)]
pub struct QSEvidence {
    pub tail_bound_total: Option<f64>,
    pub entry_floor: Option<f64>,
    /// Per-entry partial sums `Σ_{n<=probe} |T(n)_ij / T(n+1)_ij - 1|`,
    /// row-major.
    pub ratio_partial_sums: Vec<f64>,
    /// Partial sum `Σ_{n<=probe} max_ij |T(n)_ij - T(n+1)_ij|`.
    pub diff_partial_sum: f64,
    pub probe_depth: usize,
}

#[derive(Debug, Clone)]
pub struct QSVerdict {
    pub status: QSStatus,
    pub criterion: &'static str,
    pub evidence: QSEvidence,
}

/// A sampled prefix with its generator seed and exact log cylinder mass.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub prefix: Word,
    pub seed: u64,
    pub log_mass: f64,
}
