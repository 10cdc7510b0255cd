//! Dense vector and matrix primitives shared by the transforms.
//!
//! Dimensions are small (a handful of phases, never more than a few dozen), so
//! everything is stored densely on the heap and computed with plain loops.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Relative threshold below which a direction is treated as zero.
pub const EPS_ZERO_REL: f64 = 1e-12;

/// Relative threshold on Gram-Schmidt residuals used by [`hodge_complement`].
pub const EPS_RANK_REL: f64 = 1e-9;

/// Instantaneous values of an n-phase quantity (volts, amperes or webers).
#[derive(Clone, PartialEq)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    /// Validated constructor: at least two phases, all values finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidVector(format!(
                "need at least 2 phases, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidVector(format!(
                "component {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The `i`-th canonical basis vector of dimension `dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self(self.0.iter().map(|x| k * x).collect())
    }

    /// `self + k * other`, without checking dimensions.
    pub(crate) fn axpy(&self, k: f64, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }

    /// Unit vector along `self`, or `None` if the norm is zero.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scaled(1.0 / n))
    }
}

impl From<[f64; 3]> for PhaseVector {
    fn from(v: [f64; 3]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Debug for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl Index<usize> for PhaseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &PhaseVector {
    type Output = PhaseVector;

    fn add(self, rhs: &PhaseVector) -> PhaseVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        PhaseVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &PhaseVector {
    type Output = PhaseVector;

    fn sub(self, rhs: &PhaseVector) -> PhaseVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        PhaseVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&PhaseVector> for f64 {
    type Output = PhaseVector;

    fn mul(self, rhs: &PhaseVector) -> PhaseVector {
        rhs.scaled(self)
    }
}

impl Neg for &PhaseVector {
    type Output = PhaseVector;

    fn neg(self) -> PhaseVector {
        self.scaled(-1.0)
    }
}

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from row-major data; rejects non-square or non-finite input.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[PhaseVector]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_row_major(dim, data)
    }

    pub(crate) fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.dim + j] = x;
    }

    pub fn row(&self, i: usize) -> PhaseVector {
        PhaseVector(self.data[i * self.dim..(i + 1) * self.dim].to_vec())
    }

    pub fn rows(&self) -> Vec<PhaseVector> {
        (0..self.dim).map(|i| self.row(i)).collect()
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| k * x).collect(),
        }
    }

    pub fn mul_vec(&self, v: &PhaseVector) -> Result<PhaseVector> {
        check_dims(self.dim, v.dim())?;
        Ok(PhaseVector(
            (0..self.dim)
                .map(|i| {
                    let row = &self.data[i * self.dim..(i + 1) * self.dim];
                    row.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
                })
                .collect(),
        ))
    }

    pub fn mul_mat(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        check_dims(self.dim, other.dim)?;
        Ok(Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.get(i, k) * other.get(k, j)).sum()
        }))
    }

    /// `self * other^T`, the form every frame rotation takes.
    pub fn mul_transpose(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        check_dims(self.dim, other.dim)?;
        Ok(Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.get(i, k) * other.get(j, k)).sum()
        }))
    }

    pub fn add(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        check_dims(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SquareMatrix) -> Result<SquareMatrix> {
        check_dims(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// max |(M M^T - I)_ij|
    pub fn orthonormality_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let s: f64 = (0..self.dim).map(|k| self.get(i, k) * self.get(j, k)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// max |(M + M^T)_ij|
    pub fn skew_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) + self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> f64 {
        determinant(self.dim, self.data.clone())
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.dim).map(|i| &self.data[i * self.dim..(i + 1) * self.dim]))
            .finish()
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

fn determinant(n: usize, mut a: Vec<f64>) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .unwrap_or(col);
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor != 0.0 {
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    det
}

pub fn dot(u: &PhaseVector, v: &PhaseVector) -> Result<f64> {
    check_dims(u.dim(), v.dim())?;
    Ok(u.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
}

/// Right-handed cross product of two 3-component vectors.
pub fn cross(u: &PhaseVector, v: &PhaseVector) -> Result<PhaseVector> {
    if u.dim() != 3 {
        return Err(Error::CrossDimension { dim: u.dim() });
    }
    if v.dim() != 3 {
        return Err(Error::CrossDimension { dim: v.dim() });
    }
    Ok(PhaseVector(vec![
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]))
}

/// Component of `w` along `u`: `((u.w)/(u.u)) u`.
pub fn project(u: &PhaseVector, w: &PhaseVector) -> Result<PhaseVector> {
    check_dims(u.dim(), w.dim())?;
    let scale = u.max_abs().max(w.max_abs());
    let norm = u.norm();
    if norm == 0.0 || norm <= EPS_ZERO_REL * scale {
        return Err(Error::DegenerateDirection { norm });
    }
    let k = dot(u, w)? / u.norm_squared();
    Ok(u.scaled(k))
}

/// Vector orthogonal to `n - 1` independent vectors of dimension `n`.
///
/// Computed as the cofactor vector of the formal determinant whose last row
/// holds the unit basis symbols, so `[basis; result]` has a positive
/// determinant. The result is not normalized; in three dimensions it is
/// exactly `cross(basis[0], basis[1])`.
pub fn hodge_complement(basis: &[PhaseVector]) -> Result<PhaseVector> {
    let n = basis.len() + 1;
    if n < 2 {
        return Err(Error::InvalidVector(
            "hodge_complement needs at least one input vector".into(),
        ));
    }
    for b in basis {
        check_dims(n, b.dim())?;
    }

    let rank = numerical_rank(basis);
    if rank < n - 1 {
        return Err(Error::RankDeficient {
            rank,
            required: n - 1,
        });
    }

    let m = n - 1;
    let last_row_sign = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(n);
    let mut minor = Vec::with_capacity(m * m);
    for j in 0..n {
        minor.clear();
        for b in basis {
            minor.extend(b.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| *x));
        }
        let sign = if j % 2 == 0 { last_row_sign } else { -last_row_sign };
        out.push(sign * determinant(m, minor.clone()));
    }
    Ok(PhaseVector(out))
}

/// Number of Gram-Schmidt steps whose residual exceeds
/// `EPS_RANK_REL * max input norm`.
pub(crate) fn numerical_rank(vectors: &[PhaseVector]) -> usize {
    let largest = vectors.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    if largest == 0.0 {
        return 0;
    }
    let tol = EPS_RANK_REL * largest;
    let mut kept: Vec<PhaseVector> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        // two passes keep the residual orthogonal when inputs are nearly dependent
        for _ in 0..2 {
            for q in &kept {
                let c = dot(q, &r).unwrap_or(0.0);
                r = r.axpy(-c, q);
            }
        }
        let norm = r.norm();
        if norm > tol {
            kept.push(r.scaled(1.0 / norm));
        }
    }
    kept.len()
}

pub fn is_orthonormal(m: &SquareMatrix, tol: f64) -> bool {
    m.orthonormality_violation() <= tol
}

pub fn skew_part_check(m: &SquareMatrix, tol: f64) -> bool {
    m.skew_violation() <= tol
}
