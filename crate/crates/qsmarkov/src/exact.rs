//! Exact rational arithmetic for desk-scale oracle computations.
//!
//! Everything the floating-point code computes approximately — cylinder
//! masses, forward products, Perron vectors of small matrices — can be
//! reproduced here exactly for rational inputs, which is how the test suites
//! calibrate their tolerances. Intended for dimensions <= 3 and depths <= 12;
//! nothing enforces this beyond cost.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("rational convertible to f64")
}

/// A square matrix of exact rationals with unit row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    dim: usize,
    entries: Vec<BigRational>,
}

impl ExactMatrix {
    /// Builds from `(numerator, denominator)` pairs; panics unless every row
    /// sums to exactly 1 — oracles must start from exact stochastic data.
    pub fn from_fractions(rows: &[&[(i64, i64)]]) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "ragged exact matrix");
            let mut sum = BigRational::zero();
            for &(num, den) in row.iter() {
                let v = ratio(num, den);
                sum += &v;
                entries.push(v);
            }
            assert!(sum.is_one(), "exact matrix row does not sum to 1");
        }
        ExactMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.dim + j]
    }

    pub fn multiply(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        ExactMatrix { dim: n, entries }
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| to_f64(self.get(i, j))).collect())
            .collect()
    }
}

/// Exact left Perron vector: solves `v (T - I) = 0`, `Σ v_i = 1` by Gaussian
/// elimination over the rationals.
pub fn perron_left_exact(t: &ExactMatrix) -> Vec<BigRational> {
    let n = t.dim();
    // unknowns v_0..v_{n-1}; equations: columns of (T - I) except the last,
    // plus the normalization row
    let mut a = vec![BigRational::zero(); n * n];
    let mut b = vec![BigRational::zero(); n];
    for eq in 0..n - 1 {
        for j in 0..n {
            let mut coeff = t.get(j, eq).clone();
            if j == eq {
                coeff -= BigRational::one();
            }
            a[eq * n + j] = coeff;
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = BigRational::one();
    }
    b[n - 1] = BigRational::one();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r * n + col].is_zero())
            .expect("singular exact system");
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        for row in 0..n {
            if row == col || a[row * n + col].is_zero() {
                continue;
            }
            let factor = &a[row * n + col] / &a[col * n + col];
            for j in col..n {
                let delta = &factor * &a[col * n + j];
                a[row * n + j] -= delta;
            }
            let delta = &factor * &b[col];
            b[row] -= delta;
        }
    }
    let v: Vec<BigRational> = (0..n).map(|i| &b[i] / &a[i * n + i]).collect();
    assert!(
        v.iter().all(|x| x.is_positive()),
        "non-positive Perron vector"
    );
    v
}

/// Exact cylinder mass `λ_{w1} T(1)_{w1,w2} … T(k-1)_{w_{k-1},w_k}` where
/// `matrices[i]` is `T(i+1)`.
pub fn cylinder_mass_exact(
    lambda: &[BigRational],
    matrices: &dyn Fn(usize) -> ExactMatrix,
    word: &[usize],
) -> BigRational {
    if word.is_empty() {
        return BigRational::one();
    }
    let mut mass = lambda[word[0]].clone();
    for k in 1..word.len() {
        mass *= matrices(k).get(word[k - 1], word[k]).clone();
    }
    mass
}
