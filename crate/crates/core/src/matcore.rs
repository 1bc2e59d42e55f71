//! Dense real matrix kernel shared by every other module.
//!
//! Structural checks (symmetry, skewness) use a relative Frobenius tolerance
//! of [`STRUCT_TOL`]; verdicts take a caller-supplied tolerance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;

/// Relative Frobenius tolerance for symmetry / skewness / orthogonality checks.
pub const STRUCT_TOL: f64 = 1e-10;

/// Default tolerance for verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

/// The standard symplectic matrix `[[0, I], [-I, 0]]` in `(x, p)` ordering.
pub fn standard_j(n: usize) -> DenseMatrix {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

pub fn check_finite(m: &DenseMatrix) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_square(m: &DenseMatrix) -> Result<()> {
    if m.nrows() == m.ncols() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() })
    }
}

/// `‖m − mᵀ‖_F / ‖m‖_F` (zero for the zero matrix).
pub fn asymmetry(m: &DenseMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).norm() / norm
}

/// `‖m + mᵀ‖_F / ‖m‖_F` (zero for the zero matrix).
pub fn skewness_defect(m: &DenseMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m + m.transpose()).norm() / norm
}

pub fn check_symmetric(m: &DenseMatrix) -> Result<()> {
    check_square(m)?;
    check_finite(m)?;
    let a = asymmetry(m);
    if a > STRUCT_TOL {
        return Err(Error::NotSymmetric(a));
    }
    Ok(())
}

pub fn check_skew(m: &DenseMatrix) -> Result<()> {
    check_square(m)?;
    check_finite(m)?;
    let s = skewness_defect(m);
    if s > STRUCT_TOL {
        return Err(Error::NotSkew(s));
    }
    Ok(())
}

pub fn symmetrize(m: &DenseMatrix) -> DenseMatrix {
    (m + m.transpose()) * 0.5
}

pub fn antisymmetrize(m: &DenseMatrix) -> DenseMatrix {
    (m - m.transpose()) * 0.5
}

pub fn det(m: &DenseMatrix) -> f64 {
    m.clone().lu().determinant()
}

pub fn inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::Singular(d.abs()));
    }
    m.clone().try_inverse().ok_or(Error::Singular(d.abs()))
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: DVector<f64>,
    /// Orthogonal; column `k` belongs to `values[k]`.
    pub vectors: DenseMatrix,
}

impl SymEig {
    pub fn reconstruct(&self) -> DenseMatrix {
        &self.vectors * DMatrix::from_diagonal(&self.values) * self.vectors.transpose()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

pub fn sym_eig(m: &DenseMatrix) -> Result<SymEig> {
    check_symmetric(m)?;
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(order.len(), order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = DMatrix::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SymEig { values, vectors })
}

fn spd_eig(m: &DenseMatrix) -> Result<SymEig> {
    let eig = sym_eig(m)?;
    let floor = 1e-12 * m.norm();
    if eig.min() <= floor {
        return Err(Error::NotPositiveDefinite(eig.min()));
    }
    Ok(eig)
}

fn spectral_map(eig: &SymEig, f: impl Fn(f64) -> f64) -> DenseMatrix {
    let d = eig.values.map(f);
    symmetrize(&(&eig.vectors * DMatrix::from_diagonal(&d) * eig.vectors.transpose()))
}

/// Symmetric positive-definite square root.
pub fn sqrt_spd(m: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = spd_eig(m)?;
    Ok(spectral_map(&eig, f64::sqrt))
}

/// Inverse of the symmetric positive-definite square root.
pub fn inv_sqrt_spd(m: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = spd_eig(m)?;
    Ok(spectral_map(&eig, |x| 1.0 / x.sqrt()))
}

/// Smallest eigenvalue test for positive definiteness, with the same floor
/// as [`sqrt_spd`].
pub fn check_spd(m: &DenseMatrix) -> Result<()> {
    spd_eig(m).map(|_| ())
}

/// A complex Hermitian matrix stored as `re + i·im`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    re: DenseMatrix,
    im: DenseMatrix,
}

impl HermitianMatrix {
    pub fn new(re: DenseMatrix, im: DenseMatrix) -> Result<Self> {
        if re.shape() != im.shape() || re.nrows() != re.ncols() {
            return Err(Error::MalformedHermitian(format!(
                "shapes {:?} and {:?}",
                re.shape(),
                im.shape()
            )));
        }
        if re.iter().chain(im.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = (re.norm_squared() + im.norm_squared()).sqrt().max(f64::MIN_POSITIVE);
        let asym = (&re - re.transpose()).norm() / scale;
        let skew = (&im + im.transpose()).norm() / scale;
        if asym > STRUCT_TOL {
            return Err(Error::MalformedHermitian(format!("real part asymmetry {asym:.3e}")));
        }
        if skew > STRUCT_TOL {
            return Err(Error::MalformedHermitian(format!("imaginary part not skew ({skew:.3e})")));
        }
        Ok(Self { re, im })
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn re(&self) -> &DenseMatrix {
        &self.re
    }

    pub fn im(&self) -> &DenseMatrix {
        &self.im
    }

    pub fn norm(&self) -> f64 {
        (self.re.norm_squared() + self.im.norm_squared()).sqrt()
    }

    /// Real symmetric embedding `[[Re, −Im], [Im, Re]]`; its spectrum is the
    /// Hermitian spectrum with every multiplicity doubled.
    pub fn real_embedding(&self) -> DenseMatrix {
        let d = self.dim();
        let mut e = DMatrix::zeros(2 * d, 2 * d);
        e.view_mut((0, 0), (d, d)).copy_from(&self.re);
        e.view_mut((d, d), (d, d)).copy_from(&self.re);
        e.view_mut((0, d), (d, d)).copy_from(&(-&self.im));
        e.view_mut((d, 0), (d, d)).copy_from(&self.im);
        symmetrize(&e)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // The embedding is symmetric by construction.
        SymmetricEigen::new(self.real_embedding()).eigenvalues.min()
    }
}

/// PSD verdict `min eigenvalue ≥ −tol·‖h‖_F`, with the minimum eigenvalue.
pub fn is_psd_hermitian(h: &HermitianMatrix, tol: f64) -> (bool, f64) {
    let min = h.min_eigenvalue();
    (min >= -tol * h.norm(), min)
}

/// Real canonical form of an invertible skew-symmetric matrix:
/// `m = q · blockdiag([[0, μ₁], [−μ₁, 0]], …) · qᵀ` with `q` orthogonal and
/// the blocks on adjacent index pairs `(2j, 2j+1)`.
#[derive(Debug, Clone)]
pub struct SkewCanonical {
    pub q: DenseMatrix,
    /// Block magnitudes, descending.
    pub mus: Vec<f64>,
}

impl SkewCanonical {
    pub fn block_matrix(&self) -> DenseMatrix {
        let n = self.mus.len();
        let mut b = DMatrix::zeros(2 * n, 2 * n);
        for (j, &mu) in self.mus.iter().enumerate() {
            b[(2 * j, 2 * j + 1)] = mu;
            b[(2 * j + 1, 2 * j)] = -mu;
        }
        b
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        &self.q * self.block_matrix() * self.q.transpose()
    }

    /// `q` with its columns reordered from block order `(a₁, b₁, a₂, b₂, …)`
    /// to `(a₁, …, aₙ, b₁, …, bₙ)`, so that
    /// `m = q_xp · [[0, D], [−D, 0]] · q_xpᵀ` with `D = diag(μ)`.
    pub fn q_xp(&self) -> DenseMatrix {
        let n = self.mus.len();
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            out.set_column(j, &self.q.column(2 * j));
            out.set_column(n + j, &self.q.column(2 * j + 1));
        }
        out
    }
}

pub fn skew_canonical(m: &DenseMatrix) -> Result<SkewCanonical> {
    check_skew(m)?;
    let dim = m.nrows();
    if dim % 2 != 0 {
        return Err(Error::Singular(0.0));
    }
    let d = det(m);
    if d.abs() <= 1e-12 {
        return Err(Error::Singular(d.abs()));
    }
    let m = antisymmetrize(m);
    let n = dim / 2;
    // −m² is symmetric PSD with eigenvalues μⱼ², each twice.
    let gram = symmetrize(&(m.transpose() * &m));
    let mut q = DMatrix::zeros(dim, dim);
    let mut mus = Vec::with_capacity(n);
    let mut proj = DMatrix::<f64>::identity(dim, dim);
    for j in 0..n {
        // Deflate: work in the orthogonal complement of the planes found so far,
        // which is invariant under m.
        let restricted = symmetrize(&(&proj * &gram * &proj));
        let eig = SymmetricEigen::new(restricted);
        let top = eig.eigenvalues.imax();
        let mut u = &proj * eig.eigenvectors.column(top);
        u /= u.norm();
        let w = &m * &u;
        let mu = w.norm();
        let mut v = &proj * (w / mu);
        v -= &u * u.dot(&v);
        v /= v.norm();
        // m u = μ v, m v = −μ u; the block [[0, μ], [−μ, 0]] needs (a, b) = (u, −v).
        q.set_column(2 * j, &u);
        q.set_column(2 * j + 1, &(-&v));
        mus.push(mu);
        proj -= &u * u.transpose() + &v * v.transpose();
    }
    Ok(SkewCanonical { q, mus })
}

/// Pfaffian by Householder tridiagonalization.
pub fn pfaffian(m: &DenseMatrix) -> Result<f64> {
    check_skew(m)?;
    let dim = m.nrows();
    if dim % 2 != 0 {
        return Ok(0.0);
    }
    let mut a = antisymmetrize(m);
    let mut sign = 1.0;
    for k in 0..dim.saturating_sub(2) {
        let x = a.view((k + 1, k), (dim - k - 1, 1)).clone_owned();
        let tail = x.rows(1, x.nrows() - 1).norm();
        if tail == 0.0 {
            continue;
        }
        let alpha = -x[0].signum() * x.norm();
        let mut v = x.clone();
        v[0] -= alpha;
        let vn = v.norm_squared();
        let mut h = DMatrix::<f64>::identity(dim, dim);
        let block = DMatrix::<f64>::identity(dim - k - 1, dim - k - 1) - (&v * v.transpose()) * (2.0 / vn);
        h.view_mut((k + 1, k + 1), (dim - k - 1, dim - k - 1)).copy_from(&block);
        a = &h * &a * &h;
        sign = -sign;
    }
    let mut pf = sign;
    for i in (0..dim).step_by(2) {
        pf *= a[(i, i + 1)];
    }
    Ok(pf)
}
