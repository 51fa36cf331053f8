//! Dense complex multilinear algebra.
//!
//! Every multi-factor index in the crate uses the same convention: the first
//! tensor factor is the slowest-varying digit. For a one-particle space
//! `l ⊗ h` the basis index is `x * d_h + s`, and for `n` particles the first
//! particle is slowest.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Default absolute tolerance (Frobenius norm) for equality checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Operator {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols} operator")));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "operator entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Operator { rows, cols, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidShape("ragged rows".into()));
        }
        Operator::new(r, c, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let converted: Vec<Vec<C64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Operator::from_rows(&converted)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Operator { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Operator {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Operator::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Operator::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Operator::diag(&v)
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Operator::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Matrix unit `E_ij = |i⟩⟨j|` of size `dim`.
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Operator::zeros(dim, dim);
        m.data[i * dim + j] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square operator.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] += value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn dagger(&self) -> Self {
        Operator::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Operator::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Operator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Operator) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "distance between differently shaped operators"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.distance(other) <= tol
    }

    /// `‖M − M†‖_F`
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(M + M†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Operator::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// `max(‖M² − M‖_F, ‖M − M†‖_F)`
    pub fn projection_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let sq = self * self;
        sq.distance(self).max(self.hermiticity_defect())
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "operator applied to vector of wrong length");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `[A, B] = AB − BA`
    pub fn commutator(&self, other: &Operator) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Operator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    fn matmul(&self, rhs: &Operator) -> Operator {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product of {}x{} and {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Operator::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Operator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Operator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.map(|z| -z)
    }
}

/// A complex state vector. Normalization is explicit: see [`StateVector::normalized`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes as given, without normalizing.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("state vector"));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state vector"));
        }
        Ok(StateVector { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        StateVector::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Normalizes `amplitudes` and returns the state with its original norm.
    /// Fails if the norm is below `1e-12`.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<(Self, f64)> {
        let mut v = StateVector::new(amplitudes)?;
        let norm = v.normalize()?;
        Ok((v, norm))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    /// Rescales to unit norm, returning the norm before rescaling.
    pub fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm();
        if norm < 1e-12 {
            return Err(Error::ZeroVector { norm });
        }
        for z in &mut self.amplitudes {
            *z /= norm;
        }
        Ok(norm)
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        StateVector {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> Operator {
        Operator::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        vec_norm(
            &self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        )
    }

    pub fn expectation(&self, op: &Operator) -> C64 {
        inner(&self.amplitudes, &op.apply(&self.amplitudes))
    }
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len(), "inner product of vectors with different lengths");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: Operator,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const POSITIVITY_TOL: f64 = 1e-10;

    pub fn new(matrix: Operator) -> Result<Self> {
        matrix.ensure_square()?;
        let defect = matrix.hermiticity_defect();
        if defect > Self::HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("hermiticity defect {defect:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {:.6}{:+.6}i", tr.re, tr.im)));
        }
        let min = hermitian_spectrum(&matrix)?[0];
        if min < -Self::POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!("minimum eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!("pure state has norm {n:.15}")));
        }
        Ok(DensityMatrix {
            matrix: psi.projector(),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: Operator::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_operator(self) -> Operator {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_spectrum(&self.matrix).expect("density matrix is Hermitian")
    }
}

/// Ordered tensor-factor dimensions, slowest-varying first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorShape {
    dims: Vec<usize>,
}

impl FactorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("no factors".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidShape(format!("zero factor dimension in {dims:?}")));
        }
        Ok(FactorShape { dims })
    }

    pub fn uniform(dim: usize, count: usize) -> Result<Self> {
        FactorShape::new(vec![dim; count])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Shape after moving factor `k` to position `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<FactorShape> {
        let inv = invert_mapping(perm, self.len())?;
        Ok(FactorShape {
            dims: inv.iter().map(|&k| self.dims[k]).collect(),
        })
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }
}

fn invert_mapping(perm: &[usize], len: usize) -> Result<Vec<usize>> {
    if perm.len() != len {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {} factors",
            perm.len(),
            len
        )));
    }
    let mut inv = vec![usize::MAX; len];
    for (k, &target) in perm.iter().enumerate() {
        if target >= len || inv[target] != usize::MAX {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
        }
        inv[target] = k;
    }
    Ok(inv)
}

/// Kronecker product with `a` as the slowest-varying factor.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let cols = ac * bc;
    let mut data = vec![ZERO; ar * br * cols];
    for ia in 0..ar {
        for ja in 0..ac {
            let x = a.get(ia, ja);
            if x == ZERO {
                continue;
            }
            for ib in 0..br {
                let row = (ia * br + ib) * cols + ja * bc;
                let brow = b.row(ib);
                for (o, &y) in data[row..row + bc].iter_mut().zip(brow) {
                    *o = x * y;
                }
            }
        }
    }
    Operator {
        rows: ar * br,
        cols,
        data,
    }
}

/// `ops[0] ⊗ ops[1] ⊗ …`
pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a Operator>) -> Operator {
    let mut iter = ops.into_iter();
    let first = iter.next().expect("kron_all of an empty list").clone();
    iter.fold(first, |acc, op| kron(&acc, op))
}

pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for &a in u {
        out.extend(v.iter().map(|&b| a * b));
    }
    out
}

/// Trace over the factors not listed in `keep`. Kept factors stay in
/// ascending order.
pub fn partial_trace(m: &Operator, shape: &FactorShape, keep: &[usize]) -> Result<Operator> {
    let dim = m.ensure_square()?;
    if shape.total() != dim {
        return Err(Error::DimensionMismatch {
            context: "partial trace shape",
            expected: shape.total(),
            found: dim,
        });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= shape.len()) {
        return Err(Error::OutOfRange {
            context: "partial trace factor",
            index: bad,
            limit: shape.len(),
        });
    }
    let traced: Vec<usize> = (0..shape.len()).filter(|k| !kept.contains(k)).collect();
    let strides = shape.strides();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| shape.dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| shape.dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let offsets = |factors: &[usize], dims: &[usize], total: usize| -> Vec<usize> {
        (0..total)
            .map(|mut idx| {
                let mut off = 0;
                for p in (0..factors.len()).rev() {
                    off += (idx % dims[p]) * strides[factors[p]];
                    idx /= dims[p];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept, &kept_dims, kept_total);
    let traced_off = offsets(&traced, &traced_dims, traced_total);

    let mut out = Operator::zeros(kept_total, kept_total);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &traced_off {
                acc += m.get(ro + t, co + t);
            }
            out.set(r, c, acc);
        }
    }
    Ok(out)
}

/// Index map of the factor permutation moving factor `k` to position
/// `perm[k]`: basis index `i` maps to `map[i]`.
pub fn permutation_index_map(shape: &FactorShape, perm: &[usize]) -> Result<Vec<usize>> {
    let inv = invert_mapping(perm, shape.len())?;
    let out_shape = FactorShape {
        dims: inv.iter().map(|&k| shape.dims[k]).collect(),
    };
    let out_strides = out_shape.strides();
    // Stride in the output for each input factor.
    let moved: Vec<usize> = perm.iter().map(|&p| out_strides[p]).collect();
    Ok((0..shape.total())
        .map(|i| shape.digits(i).iter().zip(&moved).map(|(&d, &s)| d * s).sum())
        .collect())
}

pub fn permute_vector(v: &StateVector, shape: &FactorShape, perm: &[usize]) -> Result<StateVector> {
    if v.dim() != shape.total() {
        return Err(Error::DimensionMismatch {
            context: "permute_factors vector",
            expected: shape.total(),
            found: v.dim(),
        });
    }
    let map = permutation_index_map(shape, perm)?;
    let mut out = vec![ZERO; v.dim()];
    for (i, &z) in v.amplitudes().iter().enumerate() {
        out[map[i]] = z;
    }
    StateVector::new(out)
}

/// Conjugates `m` by the permutation matrix moving factor `k` to `perm[k]`.
pub fn permute_operator(m: &Operator, shape: &FactorShape, perm: &[usize]) -> Result<Operator> {
    let dim = m.ensure_square()?;
    if dim != shape.total() {
        return Err(Error::DimensionMismatch {
            context: "permute_factors operator",
            expected: shape.total(),
            found: dim,
        });
    }
    let map = permutation_index_map(shape, perm)?;
    Ok(conjugate_by_index_map(m, &map))
}

pub(crate) fn conjugate_by_index_map(m: &Operator, map: &[usize]) -> Operator {
    let dim = m.rows;
    let mut out = Operator::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            out.set(map[i], map[j], m.get(i, j));
        }
    }
    out
}

fn check_hermitian(m: &Operator) -> Result<()> {
    m.ensure_square()?;
    let defect = m.hermiticity_defect();
    if defect > 1e-10 * m.frobenius_norm().max(f64::MIN_POSITIVE) && defect > 0.0 {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Real eigenvalues of a Hermitian operator, ascending.
pub fn hermitian_spectrum(m: &Operator) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.0)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors.
pub fn hermitian_eigen(m: &Operator) -> Result<(Vec<f64>, Vec<StateVector>)> {
    check_hermitian(m)?;
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..m.rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| StateVector {
            amplitudes: eig.eigenvectors.column(k).iter().copied().collect(),
        })
        .collect();
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_x() -> Operator {
        Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn sigma_z() -> Operator {
        Operator::real_diag(&[1.0, -1.0])
    }

    #[test]
    fn kron_identities() {
        let i2 = Operator::identity(2);
        assert_eq!(kron(&i2, &i2), Operator::identity(4));
        let a = Operator::real_diag(&[1.0, 0.0]);
        let b = Operator::real_diag(&[0.0, 1.0]);
        assert_eq!(kron(&a, &b), Operator::real_diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_matches_double_loop() {
        let a = sigma_x();
        let b = sigma_z();
        let k = kron(&a, &b);
        for ia in 0..2 {
            for ja in 0..2 {
                for ib in 0..2 {
                    for jb in 0..2 {
                        assert_eq!(k.get(ia * 2 + ib, ja * 2 + jb), a.get(ia, ja) * b.get(ib, jb));
                    }
                }
            }
        }
    }

    #[test]
    fn kron_rectangular() {
        let a = Operator::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let b = Operator::from_fn(3, 1, |i, _| c(1.0 + i as f64, 0.0));
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (6, 3));
        assert_eq!(k.get(5, 2), a.get(1, 2) * b.get(2, 0));
    }

    #[test]
    fn operator_rejects_bad_input() {
        assert!(matches!(
            Operator::new(2, 2, vec![ONE; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Operator::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn partial_trace_full_and_product() {
        let rho = Operator::real_diag(&[0.25, 0.75]);
        let sigma = Operator::from_real_rows(&[&[0.5, 0.2], &[0.2, 1.5]]).unwrap();
        let shape = FactorShape::new(vec![2, 2]).unwrap();
        let pt = partial_trace(&kron(&rho, &sigma), &shape, &[0]).unwrap();
        assert!(pt.approx_eq(&rho.scale(sigma.trace()), 1e-14));
        let all = partial_trace(&kron(&rho, &sigma), &shape, &[]).unwrap();
        assert_eq!((all.rows(), all.cols()), (1, 1));
        assert!((all.get(0, 0) - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = StateVector::from_real(&[s, 0.0, 0.0, s]).unwrap();
        let shape = FactorShape::new(vec![2, 2]).unwrap();
        let reduced = partial_trace(&phi.projector(), &shape, &[0]).unwrap();
        // |Φ⁺⟩⟨Φ⁺| = ½ Σ_ab |aa⟩⟨bb| → ½ Σ_a |a⟩⟨a|
        assert!(reduced.approx_eq(&Operator::identity(2).scale_real(0.5), 1e-15));
    }

    #[test]
    fn partial_trace_shape_errors() {
        let m = Operator::identity(6);
        let shape = FactorShape::new(vec![2, 2]).unwrap();
        assert!(matches!(
            partial_trace(&m, &shape, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let shape = FactorShape::new(vec![2, 3]).unwrap();
        assert!(matches!(partial_trace(&m, &shape, &[2]), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn partial_trace_middle_factor() {
        // A ⊗ B ⊗ C, keep {0, 2} → tr(B)·A ⊗ C
        let a = Operator::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0));
        let b = Operator::from_fn(3, 3, |i, j| c(i as f64 - j as f64, (i * j) as f64));
        let cc = Operator::from_fn(2, 2, |i, j| c(1.0, (i + j) as f64));
        let m = kron_all([&a, &b, &cc]);
        let shape = FactorShape::new(vec![2, 3, 2]).unwrap();
        let got = partial_trace(&m, &shape, &[2, 0]).unwrap();
        let want = kron(&a, &cc).scale(b.trace());
        assert!(got.approx_eq(&want, 1e-12));
    }

    #[test]
    fn permute_swap_on_2x3() {
        let shape = FactorShape::new(vec![2, 3]).unwrap();
        for a in 0..2 {
            for b in 0..3 {
                let v = StateVector::basis(6, a * 3 + b);
                let w = permute_vector(&v, &shape, &[1, 0]).unwrap();
                assert_eq!(w, StateVector::basis(6, b * 2 + a));
            }
        }
        assert_eq!(shape.permuted(&[1, 0]).unwrap().dims(), &[3, 2]);
    }

    #[test]
    fn permute_identity_and_involution() {
        let shape = FactorShape::new(vec![2, 2, 3]).unwrap();
        let v = StateVector::new((0..12).map(|k| c(k as f64, -(k as f64) / 3.0)).collect()).unwrap();
        assert_eq!(permute_vector(&v, &shape, &[0, 1, 2]).unwrap(), v);
        let swapped = permute_vector(&v, &shape, &[1, 0, 2]).unwrap();
        assert_eq!(permute_vector(&swapped, &shape, &[1, 0, 2]).unwrap(), v);
    }

    #[test]
    fn permute_rejects_non_bijection() {
        let shape = FactorShape::new(vec![2, 2]).unwrap();
        let v = StateVector::basis(4, 0);
        assert!(matches!(
            permute_vector(&v, &shape, &[0, 0]),
            Err(Error::InvalidPermutation(_))
        ));
    }

    #[test]
    fn permute_operator_is_conjugation_by_permutation_matrix() {
        let shape = FactorShape::new(vec![2, 3]).unwrap();
        let map = permutation_index_map(&shape, &[1, 0]).unwrap();
        let w = Operator::from_fn(6, 6, |i, j| if map[j] == i { ONE } else { ZERO });
        let m = Operator::from_fn(6, 6, |i, j| c(i as f64, j as f64 * 0.5));
        let direct = &(&w * &m) * &w.dagger();
        assert!(permute_operator(&m, &shape, &[1, 0]).unwrap().approx_eq(&direct, 0.0));
    }

    #[test]
    fn spectrum_examples() {
        let s = hermitian_spectrum(&Operator::real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert!(s.iter().zip([1.0, 2.0, 3.0]).all(|(a, b)| (a - b).abs() < 1e-14));
        let s = hermitian_spectrum(&sigma_x()).unwrap();
        assert!((s[0] + 1.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectrum_rejects_non_hermitian() {
        let m = Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_spectrum(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(Operator::real_diag(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(Operator::real_diag(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(Operator::real_diag(&[1.5, -0.5])).is_err());
        let nonherm = Operator::from_rows(&[vec![c(0.5, 0.0), c(0.1, 0.0)], vec![c(0.0, 0.0), c(0.5, 0.0)]]).unwrap();
        assert!(DensityMatrix::new(nonherm).is_err());
    }

    #[test]
    fn normalize_reports_norm_and_rejects_zero() {
        let (v, n) = StateVector::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((n - 5.0).abs() < 1e-15);
        assert!((v.norm() - 1.0).abs() < 1e-15);
        assert!(matches!(
            StateVector::normalized(vec![ZERO, ZERO]),
            Err(Error::ZeroVector { .. })
        ));
    }
}
