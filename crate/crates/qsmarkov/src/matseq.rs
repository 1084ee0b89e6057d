//! Stochastic matrices with strictly positive entries, certified matrix
//! sequences, forward products, and Perron-Frobenius left eigenvectors.
//!
//! A [`MatrixSequence`] is the central object: an evaluator `n ↦ T(n)`
//! together with *certificates* carried as data — a tail bound
//! `B(m) >= Σ_{k>=m} max_ij |T(k)_ij - T(k+1)_ij|` and a strictly positive
//! entry floor. Deciding convergence of an arbitrary black-box sequence is
//! impossible, so every decision downstream (quasi-stationarity, density
//! truncation depths, the equivalence/singularity classifier) consumes these
//! certificates rather than guessing from finitely many terms.

use thiserror::Error;

/// Tolerance on row sums during validation (rows are renormalized afterwards).
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Residual tolerance for Perron-Frobenius left eigenvectors.
pub const PF_RESIDUAL_TOL: f64 = 1e-12;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 64;

/// Hard cap on forward-product depth.
pub const PRODUCT_DEPTH_CAP: usize = 1_000_000;

const POWER_ITERATION_CAP: usize = 500_000;

/// How many leading matrices of a perturbation family are validated entry by
/// entry at construction, on top of the closed-form floor bound.
const PROBE_VALIDATION_DEPTH: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("dimension {0} out of supported range 2..={MAX_DIM}")]
    BadDimension(usize),
    #[error("entry ({row},{col}) is not strictly positive")]
    NonPositiveEntry { row: usize, col: usize },
    #[error("row {row} sums to {sum}, outside 1 ± {ROW_SUM_TOL}")]
    RowSumOff { row: usize, sum: f64 },
    #[error("row {row} of a perturbation direction sums to {sum}, expected 0")]
    DirectionRowSumOff { row: usize, sum: f64 },
    #[error("matrix dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("power iteration did not reach residual {PF_RESIDUAL_TOL} in {0} iterations")]
    NoConvergence(usize),
    #[error("geometric ratio {0} outside (0, 1)")]
    BadRatio(f64),
    #[error("power-law exponent {0} must be positive")]
    BadExponent(f64),
    #[error("perturbation floor {floor} is not positive: entries may leave (0, 1)")]
    EntryFloorViolated { floor: f64 },
    #[error("sequence has no tail certificate / declared limit")]
    MissingTailCertificate,
    #[error("forward product to depth {requested} exceeds cap {cap}")]
    DepthCapExceeded { requested: usize, cap: usize },
    #[error("invalid product range: need 1 <= p < n, got p={p}, n={n}")]
    BadProductRange { p: usize, n: usize },
    #[error("explicit sequence must contain at least one matrix")]
    EmptyExplicitList,
}

/// A row-stochastic matrix with strictly positive entries.
///
/// Validation accepts raw rows whose sums lie within [`ROW_SUM_TOL`] of 1 and
/// renormalizes each row to sum to exactly 1 (up to rounding).
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    dim: usize,
    entries: Vec<f64>, // row-major
}

impl StochasticMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(MatrixError::BadDimension(dim));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(MatrixError::RaggedRow {
                    row: i,
                    got: row.len(),
                    expected: dim,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(MatrixError::NonPositiveEntry { row: i, col: j });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(MatrixError::RowSumOff { row: i, sum });
            }
            entries.extend(row.iter().map(|v| v / sum));
        }
        Ok(StochasticMatrix { dim, entries })
    }

    pub(crate) fn new_unchecked(dim: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        StochasticMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_ij |self_ij - other_ij|`. Both matrices must share a dimension.
    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch in max_abs_diff");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn multiply(&self, other: &StochasticMatrix) -> StochasticMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in multiply");
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                let row_k = &other.entries[k * n..(k + 1) * n];
                for j in 0..n {
                    out[i * n + j] += a * row_k[j];
                }
            }
        }
        StochasticMatrix::new_unchecked(n, out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![0.0; n];
        for (i, &vi) in v.iter().enumerate() {
            let row = &self.entries[i * n..(i + 1) * n];
            for j in 0..n {
                out[j] += vi * row[j];
            }
        }
        out
    }
}

/// The positive probability row vector fixed by a positive stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronVector {
    weights: Vec<f64>,
}

impl PerronVector {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn residual(&self, t: &StochasticMatrix) -> f64 {
        let image = t.left_apply(&self.weights);
        image
            .iter()
            .zip(&self.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Left Perron-Frobenius probability eigenvector of `t`.
///
/// Power iteration, with a direct linear solve fallback for small dimensions
/// so that test outcomes do not depend on iteration counts.
pub fn perron_left(t: &StochasticMatrix) -> Result<PerronVector, MatrixError> {
    let n = t.dim();
    let mut v = vec![1.0 / n as f64; n];
    let mut stalled = 0;
    for _ in 0..POWER_ITERATION_CAP {
        let mut next = t.left_apply(&v);
        let sum: f64 = next.iter().sum();
        for x in &mut next {
            *x /= sum;
        }
        let step = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        // iterate down to rounding level; the loose tolerance is only the
        // acceptance threshold, not the stopping rule
        if step == 0.0 {
            break;
        }
        if step <= 1e-15 {
            stalled += 1;
            if stalled >= 4 {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    let candidate = PerronVector { weights: v };
    if candidate.residual(t) <= PF_RESIDUAL_TOL {
        return Ok(candidate);
    }
    if n <= 8 {
        if let Some(solved) = perron_direct_solve(t) {
            return Ok(solved);
        }
    }
    Err(MatrixError::NoConvergence(POWER_ITERATION_CAP))
}

/// Solves `v (T - I) = 0`, `Σ v_i = 1` by Gaussian elimination on the
/// transposed system with the last equation replaced by the normalization.
fn perron_direct_solve(t: &StochasticMatrix) -> Option<PerronVector> {
    let n = t.dim();
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            // row i of the system: Σ_k v_k (T_{k,i} - δ_{k,i}) = 0
            a[i * n + j] = t.get(j, i) - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = 1.0;
    }
    b[n - 1] = 1.0;

    // partial-pivot Gaussian elimination
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .abs()
                    .partial_cmp(&a[s * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        if a[pivot_row * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut v = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * v[j];
        }
        v[row] = acc / a[row * n + row];
    }
    let sum: f64 = v.iter().sum();
    for x in &mut v {
        *x /= sum;
    }
    if v.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return None;
    }
    let candidate = PerronVector { weights: v };
    if candidate.residual(t) <= PF_RESIDUAL_TOL {
        Some(candidate)
    } else {
        None
    }
}

/// Coefficient family `c_n` of a perturbation sequence `T(n) = T∞ + c_n D`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffFamily {
    /// `c_n = r^n`, `0 < r < 1`.
    Geometric { ratio: f64 },
    /// `c_n = n^(-p)`, `p > 0`. Consecutive differences always telescope to a
    /// summable tail, so these are quasi-stationary for every `p > 0`.
    Power { exponent: f64 },
    /// `c_n = (-1)^n n^(-p)`, `p > 0`. Consecutive differences do not
    /// telescope; their sum diverges for `p <= 1`, which is exactly the knob
    /// used to build non-quasi-stationary instances.
    SignedPower { exponent: f64 },
}

impl CoeffFamily {
    fn validate(&self) -> Result<(), MatrixError> {
        match *self {
            CoeffFamily::Geometric { ratio } => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(MatrixError::BadRatio(ratio));
                }
            }
            CoeffFamily::Power { exponent } | CoeffFamily::SignedPower { exponent } => {
                if !(exponent.is_finite() && exponent > 0.0) {
                    return Err(MatrixError::BadExponent(exponent));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            CoeffFamily::Geometric { ratio } => ratio.powi(n as i32),
            CoeffFamily::Power { exponent } => nf.powf(-exponent),
            CoeffFamily::SignedPower { exponent } => {
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * nf.powf(-exponent)
            }
        }
    }

    /// `sup_n |c_n|`, attained at n = 1 for all three families.
    pub fn sup_abs(&self) -> f64 {
        self.value(1).abs()
    }

    /// Certified bound on `Σ_{k>=m} |c_k - c_{k+1}|`, or `None` if divergent.
    pub fn step_tail(&self, m: usize) -> Option<f64> {
        debug_assert!(m >= 1);
        let mf = m as f64;
        match *self {
            // Σ_{k>=m} r^k (1-r) = r^m
            CoeffFamily::Geometric { ratio } => Some(ratio.powi(m as i32)),
            // decreasing, telescopes: Σ_{k>=m} (c_k - c_{k+1}) = c_m
            CoeffFamily::Power { exponent } => Some(mf.powf(-exponent)),
            // |c_k - c_{k+1}| = k^-p + (k+1)^-p; integral comparison needs p > 1
            CoeffFamily::SignedPower { exponent } => {
                if exponent > 1.0 {
                    Some(2.0 * (mf.powf(-exponent) + mf.powf(1.0 - exponent) / (exponent - 1.0)))
                } else {
                    None
                }
            }
        }
    }

    /// Certified bound on `Σ_{n>=1} |c_n|`, or `None` if divergent.
    pub fn abs_sum(&self) -> Option<f64> {
        match *self {
            CoeffFamily::Geometric { ratio } => Some(ratio / (1.0 - ratio)),
            CoeffFamily::Power { exponent } | CoeffFamily::SignedPower { exponent } => {
                if exponent > 1.0 {
                    Some(1.0 + 1.0 / (exponent - 1.0))
                } else {
                    None
                }
            }
        }
    }

    /// Certified bound on `Σ_{n>=1} n |c_n - c_{n+1}|`, or `None`.
    pub fn weighted_step_sum(&self) -> Option<f64> {
        match *self {
            // Σ n r^n (1-r) = r / (1-r)
            CoeffFamily::Geometric { ratio } => Some(ratio / (1.0 - ratio)),
            // n (n^-p - (n+1)^-p) <= p n^-p by the mean value theorem
            CoeffFamily::Power { exponent } => {
                if exponent > 1.0 {
                    Some(exponent * (1.0 + 1.0 / (exponent - 1.0)))
                } else {
                    None
                }
            }
            // n (n^-p + (n+1)^-p) <= 2 n^(1-p)
            CoeffFamily::SignedPower { exponent } => {
                if exponent > 2.0 {
                    Some(2.0 * (1.0 + 1.0 / (exponent - 2.0)))
                } else {
                    None
                }
            }
        }
    }

    /// True when `Σ |c_n - c_{n+1}|` provably diverges.
    pub fn step_divergent(&self) -> bool {
        matches!(*self, CoeffFamily::SignedPower { exponent } if exponent <= 1.0)
    }
}

/// A matrix with zero row sums, the direction of a perturbation family.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    dim: usize,
    entries: Vec<f64>,
}

impl Direction {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(MatrixError::BadDimension(dim));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(MatrixError::RaggedRow {
                    row: i,
                    got: row.len(),
                    expected: dim,
                });
            }
            let sum: f64 = row.iter().sum();
            if sum.abs() > ROW_SUM_TOL {
                return Err(MatrixError::DirectionRowSumOff { row: i, sum });
            }
            entries.extend_from_slice(row);
        }
        Ok(Direction { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// The supported sequence shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    Constant(StochasticMatrix),
    /// Exactly `prefix` then `tail` forever.
    EventuallyConstant {
        prefix: Vec<StochasticMatrix>,
        tail: StochasticMatrix,
    },
    /// `T(n) = limit + c_n · direction`.
    Perturbation {
        limit: StochasticMatrix,
        direction: Direction,
        coeff: CoeffFamily,
    },
    /// Externally supplied matrices. With a declared tail the sequence is
    /// `matrices` then `tail` forever and carries the same certificate as an
    /// eventually-constant family; without one it is opaque — evaluation
    /// repeats the last matrix and every certificate is `None`.
    Explicit {
        matrices: Vec<StochasticMatrix>,
        tail: Option<StochasticMatrix>,
    },
}

/// A sequence `n ↦ T(n)` of positive stochastic matrices plus certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSequence {
    kind: SequenceKind,
    dim: usize,
}

impl MatrixSequence {
    pub fn constant(t: StochasticMatrix) -> Self {
        let dim = t.dim();
        MatrixSequence {
            kind: SequenceKind::Constant(t),
            dim,
        }
    }

    pub fn eventually_constant(
        prefix: Vec<StochasticMatrix>,
        tail: StochasticMatrix,
    ) -> Result<Self, MatrixError> {
        let dim = tail.dim();
        for m in &prefix {
            if m.dim() != dim {
                return Err(MatrixError::DimensionMismatch(m.dim(), dim));
            }
        }
        Ok(MatrixSequence {
            kind: SequenceKind::EventuallyConstant { prefix, tail },
            dim,
        })
    }

    pub fn perturbation(
        limit: StochasticMatrix,
        direction: Direction,
        coeff: CoeffFamily,
    ) -> Result<Self, MatrixError> {
        coeff.validate()?;
        let dim = limit.dim();
        if direction.dim() != dim {
            return Err(MatrixError::DimensionMismatch(direction.dim(), dim));
        }
        // closed-form floor: entries stay >= min_ij (limit_ij - sup|c_n| |D_ij|)
        let sup = coeff.sup_abs();
        let mut floor = f64::INFINITY;
        for i in 0..dim {
            for j in 0..dim {
                floor = floor.min(limit.get(i, j) - sup * direction.get(i, j).abs());
            }
        }
        if !(floor.is_finite() && floor > 0.0) {
            return Err(MatrixError::EntryFloorViolated { floor });
        }
        let seq = MatrixSequence {
            kind: SequenceKind::Perturbation {
                limit,
                direction,
                coeff,
            },
            dim,
        };
        // probe the leading matrices where |c_n| is largest
        for n in 1..=PROBE_VALIDATION_DEPTH {
            let m = seq.matrix(n);
            StochasticMatrix::from_rows(&m.rows())?;
        }
        Ok(seq)
    }

    pub fn explicit(
        matrices: Vec<StochasticMatrix>,
        tail: Option<StochasticMatrix>,
    ) -> Result<Self, MatrixError> {
        let dim = match (matrices.first(), &tail) {
            (Some(m), _) => m.dim(),
            (None, Some(t)) => t.dim(),
            (None, None) => return Err(MatrixError::EmptyExplicitList),
        };
        if matrices.is_empty() {
            return Err(MatrixError::EmptyExplicitList);
        }
        for m in matrices.iter().chain(tail.iter()) {
            if m.dim() != dim {
                return Err(MatrixError::DimensionMismatch(m.dim(), dim));
            }
        }
        Ok(MatrixSequence {
            kind: SequenceKind::Explicit { matrices, tail },
            dim,
        })
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The n-th matrix of the sequence, `n >= 1`.
    pub fn matrix(&self, n: usize) -> StochasticMatrix {
        assert!(n >= 1, "sequence index is 1-based");
        match &self.kind {
            SequenceKind::Constant(t) => t.clone(),
            SequenceKind::EventuallyConstant { prefix, tail } => {
                prefix.get(n - 1).unwrap_or(tail).clone()
            }
            SequenceKind::Perturbation {
                limit,
                direction,
                coeff,
            } => {
                let c = coeff.value(n);
                let dim = limit.dim();
                let mut entries = Vec::with_capacity(dim * dim);
                for i in 0..dim {
                    for j in 0..dim {
                        entries.push(limit.get(i, j) + c * direction.get(i, j));
                    }
                }
                StochasticMatrix::new_unchecked(dim, entries)
            }
            SequenceKind::Explicit { matrices, tail } => matrices
                .get(n - 1)
                .or(tail.as_ref())
                .unwrap_or_else(|| matrices.last().expect("non-empty list"))
                .clone(),
        }
    }

    /// Certified bound `B(m) >= Σ_{k>=m} max_ij |T(k)_ij - T(k+1)_ij|`,
    /// or `None` when the sequence carries no certificate.
    pub fn tail_bound(&self, m: usize) -> Option<f64> {
        assert!(m >= 1);
        match &self.kind {
            SequenceKind::Constant(_) => Some(0.0),
            SequenceKind::EventuallyConstant { prefix, .. } => {
                Some(self.finite_step_sum(m, prefix.len()))
            }
            SequenceKind::Perturbation {
                direction, coeff, ..
            } => coeff.step_tail(m).map(|s| s * direction.max_abs()),
            SequenceKind::Explicit { matrices, tail } => tail
                .as_ref()
                .map(|_| self.finite_step_sum(m, matrices.len())),
        }
    }

    /// `Σ_{k=m}^{len} max |T(k) - T(k+1)|` for sequences constant beyond `len`.
    fn finite_step_sum(&self, m: usize, len: usize) -> f64 {
        let mut sum = 0.0;
        for k in m..=len {
            sum += self.matrix(k).max_abs_diff(&self.matrix(k + 1));
        }
        sum
    }

    /// Certified lower bound on `inf_{n,i,j} T(n)_ij`.
    pub fn entry_floor(&self) -> Option<f64> {
        match &self.kind {
            SequenceKind::Constant(t) => Some(t.min_entry()),
            SequenceKind::EventuallyConstant { prefix, tail } => Some(
                prefix
                    .iter()
                    .map(StochasticMatrix::min_entry)
                    .fold(tail.min_entry(), f64::min),
            ),
            SequenceKind::Perturbation {
                limit,
                direction,
                coeff,
            } => {
                let sup = coeff.sup_abs();
                let mut floor = f64::INFINITY;
                for i in 0..limit.dim() {
                    for j in 0..limit.dim() {
                        floor = floor.min(limit.get(i, j) - sup * direction.get(i, j).abs());
                    }
                }
                Some(floor)
            }
            SequenceKind::Explicit { matrices, tail } => Some(
                matrices
                    .iter()
                    .chain(tail.iter())
                    .map(StochasticMatrix::min_entry)
                    .fold(f64::INFINITY, f64::min),
            ),
        }
    }

    /// The declared limit matrix `T∞`.
    pub fn limit_matrix(&self) -> Result<StochasticMatrix, MatrixError> {
        match &self.kind {
            SequenceKind::Constant(t) => Ok(t.clone()),
            SequenceKind::EventuallyConstant { tail, .. } => Ok(tail.clone()),
            SequenceKind::Perturbation { limit, .. } => Ok(limit.clone()),
            SequenceKind::Explicit { tail, .. } => {
                tail.clone().ok_or(MatrixError::MissingTailCertificate)
            }
        }
    }

    /// Certified bound on `Σ_n max_ij |T(n)_ij - T∞_ij|`, or `None`.
    pub fn deviation_from_limit_bound(&self) -> Option<f64> {
        match &self.kind {
            SequenceKind::Constant(_) => Some(0.0),
            SequenceKind::EventuallyConstant { prefix, tail } => {
                Some(prefix.iter().map(|m| m.max_abs_diff(tail)).sum())
            }
            SequenceKind::Perturbation {
                direction, coeff, ..
            } => coeff.abs_sum().map(|s| s * direction.max_abs()),
            SequenceKind::Explicit { matrices, tail } => tail
                .as_ref()
                .map(|t| matrices.iter().map(|m| m.max_abs_diff(t)).sum()),
        }
    }

    /// Certified bound on `Σ_n n · max_ij |T(n)_ij - T(n+1)_ij|`, or `None`.
    pub fn weighted_step_bound(&self) -> Option<f64> {
        match &self.kind {
            SequenceKind::Constant(_) => Some(0.0),
            SequenceKind::EventuallyConstant { prefix, .. } => {
                Some(self.finite_weighted_step_sum(prefix.len()))
            }
            SequenceKind::Perturbation {
                direction, coeff, ..
            } => coeff.weighted_step_sum().map(|s| s * direction.max_abs()),
            SequenceKind::Explicit { matrices, tail } => tail
                .as_ref()
                .map(|_| self.finite_weighted_step_sum(matrices.len())),
        }
    }

    fn finite_weighted_step_sum(&self, len: usize) -> f64 {
        (1..=len)
            .map(|k| k as f64 * self.matrix(k).max_abs_diff(&self.matrix(k + 1)))
            .sum()
    }

    /// True when `Σ_n max |T(n) - T(n+1)|` provably diverges — the family
    /// rule for certifying a *negative* quasi-stationarity verdict.
    pub fn divergence_certified(&self) -> bool {
        match &self.kind {
            SequenceKind::Perturbation {
                direction, coeff, ..
            } => coeff.step_divergent() && direction.max_abs() > 0.0,
            _ => false,
        }
    }
}

/// The product `T(p+1) T(p+2) … T(n)`, `1 <= p < n`.
pub fn forward_product(
    seq: &MatrixSequence,
    p: usize,
    n: usize,
) -> Result<StochasticMatrix, MatrixError> {
    if p < 1 || n <= p {
        return Err(MatrixError::BadProductRange { p, n });
    }
    if n > PRODUCT_DEPTH_CAP {
        return Err(MatrixError::DepthCapExceeded {
            requested: n,
            cap: PRODUCT_DEPTH_CAP,
        });
    }
    let mut acc = seq.matrix(p + 1);
    for k in p + 2..=n {
        acc = acc.multiply(&seq.matrix(k));
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProductLimitOutcome {
    Converged {
        /// Rank-one matrix with every row equal to the Perron vector of `T∞`.
        limit: StochasticMatrix,
        achieved_n: usize,
    },
    NotConverged {
        best_error: f64,
    },
}

/// Finds the first `n <= max_n` with
/// `max_ij |(T(p+1)…T(n))_ij - Q_ij| <= tol`, where `Q` has identical rows
/// equal to the Perron vector of the declared limit matrix.
pub fn product_limit_check(
    seq: &MatrixSequence,
    p: usize,
    tol: f64,
    max_n: usize,
) -> Result<ProductLimitOutcome, MatrixError> {
    if p < 1 || max_n <= p {
        return Err(MatrixError::BadProductRange { p, n: max_n });
    }
    if seq.tail_bound(1).is_none() {
        return Err(MatrixError::MissingTailCertificate);
    }
    let t_inf = seq.limit_matrix()?;
    let v = perron_left(&t_inf)?;
    let dim = t_inf.dim();
    let mut q_entries = Vec::with_capacity(dim * dim);
    for _ in 0..dim {
        q_entries.extend_from_slice(v.weights());
    }
    let q = StochasticMatrix::new_unchecked(dim, q_entries);

    let mut acc = seq.matrix(p + 1);
    let mut best = f64::INFINITY;
    for n in p + 1..=max_n {
        if n > p + 1 {
            acc = acc.multiply(&seq.matrix(n));
        }
        let err = acc.max_abs_diff(&q);
        best = best.min(err);
        if err <= tol {
            return Ok(ProductLimitOutcome::Converged {
                limit: q,
                achieved_n: n,
            });
        }
    }
    Ok(ProductLimitOutcome::NotConverged { best_error: best })
}
