//! Finite-level realization of the isometries `S_j f = f_j (f ∘ σ)` on
//! orthonormal cylinder bases, with Cuntz relation checks, the
//! projection-valued measure, and monic cyclicity.
//!
//! Level `n` carries the orthonormal basis `e_I = χ_{C(I)} / sqrt(μ(C(I)))`
//! indexed by the `N^n` words of length `n` (cylinders of equal length are
//! disjoint, so the Gram matrix is the identity by construction). The true
//! isometry maps level `n` into level `n+1`; its compression has exactly one
//! nonzero per column, at row `iI` for column `I`.
//!
//! For constant (stationary) sequences the nonzero coefficient is exactly 1
//! whenever `|I| >= 1`: the branch density is constant on `C(iI)` and the
//! mass ratio cancels it algebraically, so `S_i e_I = e_{iI}` and the Cuntz
//! relations hold exactly at the compressed level. For genuinely
//! inhomogeneous sequences the density is evaluated at the periodic
//! representative of the target cylinder with the engine's truncated product,
//! and the certified error bound quantifies both the truncation and the
//! variation of the density over the cylinder. Adjoints are transposes in the
//! orthonormal basis, exact by construction.

use thiserror::Error;

use crate::density::{DensityEngine, DensityError, DEFAULT_EPS_LOG_F};
use crate::matseq::SequenceKind;
use crate::measure::{MarkovMeasureSpec, MeasureError};
use crate::symbolic::{enumerate_words_with_cap, SymbolicError, Word};

/// Default cap on the dimension of a dense level space.
pub const DEFAULT_LEVEL_CAP: usize = 4096;

/// Rank threshold for the cyclicity check: a vector counts as new if its
/// residual after projection keeps this fraction of its norm.
const RANK_REL_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("level {level} needs {required} basis vectors, over the cap {cap}")]
    LevelCapExceeded {
        level: usize,
        required: u128,
        cap: usize,
    },
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("word of length {len} does not fit level {level}")]
    WordTooLong { len: usize, level: usize },
    #[error("vector has {got} entries, level space has dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("level must be at least {min}, got {got}")]
    LevelTooSmall { got: usize, min: usize },
    #[error("step data has {got} values, expected {expected} for level {k}")]
    StepDataMismatch {
        got: usize,
        expected: usize,
        k: usize,
    },
}

/// Orthonormal cylinder basis of level `n`: lexicographically ordered words
/// with their exact log masses.
#[derive(Debug, Clone)]
pub struct LevelSpace {
    level: usize,
    words: Vec<Word>,
    log_masses: Vec<f64>,
}

impl LevelSpace {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, index: usize) -> &Word {
        &self.words[index]
    }

    pub fn log_mass(&self, index: usize) -> f64 {
        self.log_masses[index]
    }

    pub fn mass(&self, index: usize) -> f64 {
        self.log_masses[index].exp()
    }

    /// Coordinates of the constant function `1` in this basis:
    /// `⟨e_I, 1⟩ = sqrt(μ(C(I)))`.
    pub fn constant_function(&self) -> Vec<f64> {
        self.log_masses.iter().map(|lm| (0.5 * lm).exp()).collect()
    }
}

pub fn build_level(spec: &MarkovMeasureSpec, n: usize) -> Result<LevelSpace, RepError> {
    build_level_with_cap(spec, n, DEFAULT_LEVEL_CAP)
}

pub fn build_level_with_cap(
    spec: &MarkovMeasureSpec,
    n: usize,
    cap: usize,
) -> Result<LevelSpace, RepError> {
    let alphabet = spec.alphabet();
    let words = enumerate_words_with_cap(alphabet, n, cap).map_err(|err| match err {
        SymbolicError::EnumerationCapExceeded { required, cap } => RepError::LevelCapExceeded {
            level: n,
            required,
            cap,
        },
        other => RepError::Symbolic(other),
    })?;
    let log_masses = words
        .iter()
        .map(|w| spec.log_cylinder_mass(w))
        .collect::<Result<Vec<f64>, MeasureError>>()?;
    Ok(LevelSpace {
        level: n,
        words,
        log_masses,
    })
}

/// A dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Dense {
        let mut out = Dense::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Dense::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let row_k = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(row_k) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(&a, &x)| a * x).sum())
            .collect()
    }

    pub fn transpose_apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (row, &scale) in self.data.chunks_exact(self.cols).zip(v) {
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * scale;
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Dense) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn max_abs_diff_identity(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((self.get(r, c) - target).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpKind {
    /// Compressed `S_i`, mapping level `n` into level `n+1`.
    Isometry { symbol: u8, from_level: usize },
    /// Diagonal range projection of a cylinder on one level.
    Projection { prefix: Word, level: usize },
}

/// A compressed operator with a certified bound on the max-norm distance of
/// its entries from the true compression.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedOp {
    pub kind: OpKind,
    pub mat: Dense,
    pub error_bound: f64,
}

/// The compressed isometry `S_i : level n → level n+1` at the default
/// truncation target.
pub fn compressed_isometry(
    spec: &MarkovMeasureSpec,
    i: u8,
    n: usize,
) -> Result<CompressedOp, RepError> {
    compressed_isometry_with_eps(spec, i, n, DEFAULT_EPS_LOG_F)
}

pub fn compressed_isometry_with_eps(
    spec: &MarkovMeasureSpec,
    i: u8,
    n: usize,
    eps_log_f: f64,
) -> Result<CompressedOp, RepError> {
    let engine = DensityEngine::with_eps(spec, eps_log_f)?;
    let source = build_level(spec, n)?;
    let target = build_level(spec, n + 1)?;
    compressed_isometry_with_engine(&engine, &source, &target, i)
}

fn compressed_isometry_with_engine(
    engine: &DensityEngine,
    source: &LevelSpace,
    target: &LevelSpace,
    i: u8,
) -> Result<CompressedOp, RepError> {
    let spec = engine.spec();
    let n = source.level();
    let n_symbols = spec.n_symbols();
    let stationary = matches!(spec.seq().kind(), SequenceKind::Constant(_));
    let mut mat = Dense::zeros(target.dim(), source.dim());
    let mut error_bound = 0.0f64;

    // log-variation of the density over a target cylinder plus truncation
    let half_log_bound = if stationary && n >= 1 {
        0.0
    } else if n >= 1 {
        engine.tail_log_bound(n) + engine.eps_log_f() / 2.0
    } else {
        // level 0: the second symbol is free, so the λ/T prefactor varies too
        let t1 = spec.seq().matrix(1);
        let lambda = spec.lambda();
        let logs: Vec<f64> = (0..n_symbols)
            .map(|s| lambda[s].ln() - t1.get(i as usize, s).ln())
            .collect();
        let spread = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - logs.iter().cloned().fold(f64::INFINITY, f64::min);
        engine.tail_log_bound(1) + engine.eps_log_f() / 2.0 + spread / 2.0
    };

    let rep_len = engine.realized_depth() + 2;
    for (col, word) in source.words().iter().enumerate() {
        let extended = word.inverse_branch(i)?;
        let row = (i as usize) * source.dim() + col;
        debug_assert_eq!(target.word(row), &extended);
        let entry = if stationary && n >= 1 {
            1.0
        } else {
            let rep = extended.periodic_extension(rep_len)?;
            let density = engine.branch_density(i, &rep)?;
            let log_mass_ratio = target.log_mass(row) - source.log_mass(col);
            density * (0.5 * log_mass_ratio).exp()
        };
        mat.set(row, col, entry);
        error_bound = error_bound.max(entry * half_log_bound.exp_m1());
    }
    Ok(CompressedOp {
        kind: OpKind::Isometry {
            symbol: i,
            from_level: n,
        },
        mat,
        error_bound,
    })
}

/// Residuals of the Cuntz relations for the compressed isometries at one
/// level, against the certified error budget.
#[derive(Debug, Clone)]
pub struct CuntzReport {
    pub level: usize,
    pub eps_log_f: f64,
    pub source_dim: usize,
    pub target_dim: usize,
    /// `max_{i,j} ‖S_i* S_j − δ_ij I‖max` on level `n`.
    pub isometry_residual: f64,
    /// `‖Σ_i S_i S_i* − I‖max` on level `n+1`.
    pub completeness_residual: f64,
    /// Certified bound both residuals must stay below.
    pub error_budget: f64,
    pub op_error_bounds: Vec<f64>,
}

pub fn check_cuntz_relations(spec: &MarkovMeasureSpec, n: usize) -> Result<CuntzReport, RepError> {
    check_cuntz_relations_with_eps(spec, n, DEFAULT_EPS_LOG_F)
}

pub fn check_cuntz_relations_with_eps(
    spec: &MarkovMeasureSpec,
    n: usize,
    eps_log_f: f64,
) -> Result<CuntzReport, RepError> {
    if n < 1 {
        return Err(RepError::LevelTooSmall { got: n, min: 1 });
    }
    let engine = DensityEngine::with_eps(spec, eps_log_f)?;
    let source = build_level(spec, n)?;
    let target = build_level(spec, n + 1)?;
    let ops: Vec<CompressedOp> = spec
        .alphabet()
        .symbols()
        .map(|i| compressed_isometry_with_engine(&engine, &source, &target, i))
        .collect::<Result<_, _>>()?;

    let mut isometry_residual = 0.0f64;
    for a in &ops {
        let at = a.mat.transpose();
        for b in &ops {
            let product = at.mul(&b.mat);
            let same = matches!(
                (&a.kind, &b.kind),
                (
                    OpKind::Isometry { symbol: sa, .. },
                    OpKind::Isometry { symbol: sb, .. }
                ) if sa == sb
            );
            let residual = if same {
                product.max_abs_diff_identity()
            } else {
                product.max_abs()
            };
            isometry_residual = isometry_residual.max(residual);
        }
    }

    let mut completeness = Dense::zeros(target.dim(), target.dim());
    for op in &ops {
        completeness.add_assign(&op.mat.mul(&op.mat.transpose()));
    }
    let completeness_residual = completeness.max_abs_diff_identity();

    // each diagonal coefficient is a product of consecutive-ratio factors
    // whose total log is below tail_log_bound(n); the truncation target
    // covers the leftover factors when the engine depth is shallower
    let error_budget = (engine.tail_log_bound(n.max(1)) + engine.eps_log_f()).exp_m1() + 1e-12;

    Ok(CuntzReport {
        level: n,
        eps_log_f,
        source_dim: source.dim(),
        target_dim: target.dim(),
        isometry_residual,
        completeness_residual,
        error_budget,
        op_error_bounds: ops.iter().map(|op| op.error_bound).collect(),
    })
}

/// Diagonal 0/1 projection selecting the basis words with the given prefix.
pub fn projection_of_cylinder(level: &LevelSpace, prefix: &Word) -> Result<CompressedOp, RepError> {
    if prefix.len() > level.level() {
        return Err(RepError::WordTooLong {
            len: prefix.len(),
            level: level.level(),
        });
    }
    let dim = level.dim();
    let mut mat = Dense::zeros(dim, dim);
    for (idx, word) in level.words().iter().enumerate() {
        if word.has_prefix(prefix) {
            mat.set(idx, idx, 1.0);
        }
    }
    Ok(CompressedOp {
        kind: OpKind::Projection {
            prefix: prefix.clone(),
            level: level.level(),
        },
        mat,
        error_bound: 0.0,
    })
}

/// `⟨x, P(C(I)) x⟩`, the scalar spectral measure of the cylinder.
pub fn scalar_measure(level: &LevelSpace, x: &[f64], prefix: &Word) -> Result<f64, RepError> {
    if x.len() != level.dim() {
        return Err(RepError::DimensionMismatch {
            got: x.len(),
            expected: level.dim(),
        });
    }
    if prefix.len() > level.level() {
        return Err(RepError::WordTooLong {
            len: prefix.len(),
            level: level.level(),
        });
    }
    Ok(level
        .words()
        .iter()
        .zip(x)
        .filter(|(word, _)| word.has_prefix(prefix))
        .map(|(_, &coeff)| coeff * coeff)
        .sum())
}

/// Residual of the norm identity `‖π(f)x‖² = ∫ |f|² dm_x` for a step
/// function constant on level-`k` cylinders, given by its `N^k` values in
/// lexicographic order.
pub fn step_function_norm_residual(
    level: &LevelSpace,
    x: &[f64],
    k: usize,
    f_values: &[f64],
) -> Result<f64, RepError> {
    if x.len() != level.dim() {
        return Err(RepError::DimensionMismatch {
            got: x.len(),
            expected: level.dim(),
        });
    }
    if k > level.level() {
        return Err(RepError::WordTooLong {
            len: k,
            level: level.level(),
        });
    }
    let alphabet_size = level
        .words()
        .first()
        .map(|w| w.alphabet().n_symbols())
        .unwrap_or(2);
    let expected = alphabet_size.pow(k as u32);
    if f_values.len() != expected {
        return Err(RepError::StepDataMismatch {
            got: f_values.len(),
            expected,
            k,
        });
    }
    // π(f) acts diagonally: the word's length-k prefix selects the value
    let mut lhs = 0.0;
    let mut per_prefix = vec![0.0f64; expected];
    for (word, &coeff) in level.words().iter().zip(x) {
        let prefix_index = word.truncate(k).expect("k <= level").lex_index();
        let f = f_values[prefix_index];
        lhs += f * f * coeff * coeff;
        per_prefix[prefix_index] += coeff * coeff;
    }
    let rhs: f64 = f_values
        .iter()
        .zip(&per_prefix)
        .map(|(&f, &mass)| f * f * mass)
        .sum();
    Ok((lhs - rhs).abs())
}

/// Residuals of the projection-valued-measure algebra at one level.
#[derive(Debug, Clone)]
pub struct PvmReport {
    pub level: usize,
    /// `max |P(I)P(J) − P(C(I) ∩ C(J))|` over the sampled prefix pairs.
    pub multiplicativity_residual: f64,
    /// `max_k ‖Σ_{|I|=k} P(I) − Id‖max`.
    pub resolution_residual: f64,
    /// Worst norm-identity residual over the sampled step functions.
    pub norm_identity_residual: f64,
    pub trials: usize,
}

pub fn pvm_algebra_report(
    spec: &MarkovMeasureSpec,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<PvmReport, RepError> {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    let level = build_level(spec, n)?;
    let alphabet = spec.alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut multiplicativity = 0.0f64;
    let mut norm_identity = 0.0f64;

    for _ in 0..trials {
        // random prefix pair
        let len_i = rng.gen_range(0..=n);
        let len_j = rng.gen_range(0..=n);
        let word_i = random_word(&mut rng, alphabet, len_i);
        let word_j = random_word(&mut rng, alphabet, len_j);
        let p_i = projection_of_cylinder(&level, &word_i)?;
        let p_j = projection_of_cylinder(&level, &word_j)?;
        let product = p_i.mat.mul(&p_j.mat);
        let expected = if word_i.has_prefix(&word_j) {
            Some(word_i.clone())
        } else if word_j.has_prefix(&word_i) {
            Some(word_j.clone())
        } else {
            None
        };
        let expected_mat = match expected {
            Some(word) => projection_of_cylinder(&level, &word)?.mat,
            None => Dense::zeros(level.dim(), level.dim()),
        };
        let residual = product
            .data
            .iter()
            .zip(&expected_mat.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        multiplicativity = multiplicativity.max(residual);

        // random unit vector and random step function on a random level
        let mut x: Vec<f64> = (0..level.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        let k = rng.gen_range(0..=n);
        let f_values: Vec<f64> = (0..alphabet.n_symbols().pow(k as u32))
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        norm_identity = norm_identity.max(step_function_norm_residual(&level, &x, k, &f_values)?);
    }

    let mut resolution = 0.0f64;
    for k in 0..=n {
        let mut sum = Dense::zeros(level.dim(), level.dim());
        for prefix in enumerate_words_with_cap(alphabet, k, DEFAULT_LEVEL_CAP)? {
            sum.add_assign(&projection_of_cylinder(&level, &prefix)?.mat);
        }
        resolution = resolution.max(sum.max_abs_diff_identity());
    }

    Ok(PvmReport {
        level: n,
        multiplicativity_residual: multiplicativity,
        resolution_residual: resolution,
        norm_identity_residual: norm_identity,
        trials,
    })
}

fn random_word(rng: &mut impl rand::Rng, alphabet: crate::symbolic::Alphabet, len: usize) -> Word {
    let symbols: Vec<u8> = (0..len)
        .map(|_| rng.gen_range(0..alphabet.n_symbols() as u8))
        .collect();
    Word::new(alphabet, symbols).expect("random symbols are in range")
}

/// All compressed isometries between consecutive levels up to `top_level`.
#[derive(Debug, Clone)]
pub struct RepOperators {
    levels: Vec<LevelSpace>,
    /// `isometries[t][i]` maps level `t` into level `t+1`.
    isometries: Vec<Vec<CompressedOp>>,
}

impl RepOperators {
    pub fn build(
        spec: &MarkovMeasureSpec,
        top_level: usize,
        eps_log_f: f64,
    ) -> Result<Self, RepError> {
        let engine = DensityEngine::with_eps(spec, eps_log_f)?;
        let levels: Vec<LevelSpace> = (0..=top_level)
            .map(|t| build_level(spec, t))
            .collect::<Result<_, _>>()?;
        let mut isometries = Vec::with_capacity(top_level);
        for t in 0..top_level {
            let per_symbol = spec
                .alphabet()
                .symbols()
                .map(|i| compressed_isometry_with_engine(&engine, &levels[t], &levels[t + 1], i))
                .collect::<Result<Vec<_>, _>>()?;
            isometries.push(per_symbol);
        }
        Ok(RepOperators { levels, isometries })
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, t: usize) -> &LevelSpace {
        &self.levels[t]
    }

    pub fn isometry(&self, from_level: usize, symbol: u8) -> &CompressedOp {
        &self.isometries[from_level][symbol as usize]
    }

    /// `S_I S_I* 1` computed with the compressed operators, as a vector on
    /// the top level.
    pub fn range_projection_of_one(&self, word: &Word) -> Vec<f64> {
        let n = self.top_level();
        let k = word.len();
        assert!(k <= n, "word longer than the top level");
        let mut v = self.levels[n].constant_function();
        for s in 1..=k {
            v = self.isometries[n - s][word.symbol(s) as usize]
                .mat
                .transpose_apply(&v);
        }
        for s in (1..=k).rev() {
            v = self.isometries[n - s][word.symbol(s) as usize]
                .mat
                .apply(&v);
        }
        v
    }

    /// Dimension of `span { S_I S_I* 1 : |I| <= top_level }`.
    pub fn cyclic_span_dimension(&self) -> usize {
        let n = self.top_level();
        let alphabet = self.levels[0]
            .words()
            .first()
            .map(|w| w.alphabet())
            .expect("level 0 contains the empty word");
        let mut vectors = Vec::new();
        for k in 0..=n {
            for word in enumerate_words_with_cap(alphabet, k, DEFAULT_LEVEL_CAP)
                .expect("levels already built under the cap")
            {
                vectors.push(self.range_projection_of_one(&word));
            }
        }
        rank_with_threshold(vectors, RANK_REL_TOL)
    }
}

fn rank_with_threshold(vectors: Vec<Vec<f64>>, rel_tol: f64) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in vectors {
        let norm0 = l2_norm(&v);
        if norm0 <= 1e-14 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm0);
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(&a, &c)| a * c).sum();
            for (x, &c) in v.iter_mut().zip(b) {
                *x -= dot * c;
            }
        }
        let residual = l2_norm(&v);
        if residual > rel_tol {
            v.iter_mut().for_each(|x| *x /= residual);
            basis.push(v);
        }
    }
    basis.len()
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct CyclicityReport {
    pub level: usize,
    pub expected_dimension: usize,
    pub dimension: usize,
}

impl CyclicityReport {
    pub fn is_cyclic(&self) -> bool {
        self.dimension == self.expected_dimension
    }
}

/// Rank of the family `{S_I S_I* 1 : |I| <= n}` inside level `n`; the
/// representation is monic at this resolution iff the rank is `N^n`.
pub fn monic_cyclicity_check(
    spec: &MarkovMeasureSpec,
    n: usize,
    eps_log_f: f64,
) -> Result<CyclicityReport, RepError> {
    let ops = RepOperators::build(spec, n, eps_log_f)?;
    Ok(CyclicityReport {
        level: n,
        expected_dimension: ops.level(n).dim(),
        dimension: ops.cyclic_span_dimension(),
    })
}
