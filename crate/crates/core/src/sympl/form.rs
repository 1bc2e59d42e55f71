use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matcore::{self, DenseMatrix};

/// Tolerance on `|det Ω − 1|` for a normalized form.
pub const DET_TOL: f64 = 1e-9;

/// A constant symplectic form `ω(z, z′) = z · Ω⁻¹ z′`, normalized to `det Ω = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    n: usize,
    omega: DenseMatrix,
}

impl Form {
    /// The standard form `J`.
    pub fn standard(n: usize) -> Self {
        Self { n, omega: matcore::standard_j(n) }
    }

    /// Wraps an already-normalized skew matrix.
    pub fn new(omega: DenseMatrix) -> Result<Self> {
        matcore::check_skew(&omega)?;
        if omega.nrows() % 2 != 0 || omega.nrows() == 0 {
            return Err(Error::InvalidArgument(format!("form dimension {} is not even", omega.nrows())));
        }
        let d = matcore::det(&omega);
        if (d - 1.0).abs() > DET_TOL {
            return Err(Error::InvalidArgument(format!("form is not normalized: det = {d}")));
        }
        let n = omega.nrows() / 2;
        Ok(Self { n, omega: matcore::antisymmetrize(&omega) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn omega(&self) -> &DenseMatrix {
        &self.omega
    }

    pub fn omega_inv(&self) -> DenseMatrix {
        matcore::antisymmetrize(&matcore::inverse(&self.omega).expect("normalized forms are invertible"))
    }

    /// `ω(z, z′) = z · Ω⁻¹ z′`.
    pub fn eval(&self, z: &nalgebra::DVector<f64>, zp: &nalgebra::DVector<f64>) -> f64 {
        z.dot(&(self.omega_inv() * zp))
    }

    pub fn is_standard(&self) -> bool {
        self.omega == matcore::standard_j(self.n)
    }

    pub fn negated(&self) -> Self {
        Self { n: self.n, omega: -&self.omega }
    }
}

/// `true` when `Ω₁ = ±Ω₂` within `1e-9` in Frobenius norm.
pub fn forms_coincide(f1: &Form, f2: &Form) -> bool {
    if f1.n != f2.n {
        return false;
    }
    (f1.omega() - f2.omega()).norm() <= 1e-9 || (f1.omega() + f2.omega()).norm() <= 1e-9
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormWarning {
    /// At `n = 1` every normalized form is `±J`; a raw input other than `±J`
    /// only carried a rescaling of Planck's constant.
    NontrivialFormAtN1,
}

#[derive(Debug, Clone)]
pub struct NormalizedForm {
    pub form: Form,
    /// Factor applied to the raw matrix: `Ω = scale · Ω_raw`.
    pub scale: f64,
    pub warning: Option<FormWarning>,
}

/// Normalizes an invertible skew matrix to unit determinant.
pub fn make_form(omega_raw: &DenseMatrix) -> Result<NormalizedForm> {
    matcore::check_skew(omega_raw)?;
    let dim = omega_raw.nrows();
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::Singular(0.0));
    }
    let d = matcore::det(omega_raw);
    if d.abs() <= 1e-12 {
        return Err(Error::Singular(d.abs()));
    }
    // det of an invertible skew matrix is a positive square (the Pfaffian squared)
    let scale = if (d - 1.0).abs() <= DET_TOL { 1.0 } else { d.abs().powf(-1.0 / dim as f64) };
    let form = Form::new(omega_raw * scale)?;
    let warning = (form.n == 1 && scale != 1.0).then_some(FormWarning::NontrivialFormAtN1);
    Ok(NormalizedForm { form, scale, warning })
}

/// A Darboux matrix `S` with `S J Sᵀ = Ω` for its target form.
#[derive(Debug, Clone)]
pub struct DarbouxMatrix {
    s: DenseMatrix,
    s_inv: DenseMatrix,
    target: Form,
}

impl DarbouxMatrix {
    /// Validates `‖S J Sᵀ − Ω‖_F ≤ 1e-9·‖Ω‖_F` and `|det S| = 1` within `1e-9`.
    pub fn new(s: DenseMatrix, target: Form) -> Result<Self> {
        if s.nrows() != target.dim() || s.ncols() != target.dim() {
            return Err(Error::DimensionMismatch { expected: target.dim(), got: s.nrows() });
        }
        matcore::check_finite(&s)?;
        let r = darboux_residual(&s, &target);
        if r > 1e-9 {
            return Err(Error::InvalidArgument(format!("S J Sᵀ misses Ω by relative {r:.3e}")));
        }
        let d = matcore::det(&s);
        if (d.abs() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("|det S| = {} is not 1", d.abs())));
        }
        let s_inv = matcore::inverse(&s)?;
        Ok(Self { s, s_inv, target })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.s
    }

    pub fn inverse(&self) -> &DenseMatrix {
        &self.s_inv
    }

    pub fn target(&self) -> &Form {
        &self.target
    }

    pub fn residual(&self) -> f64 {
        darboux_residual(&self.s, &self.target)
    }
}

/// `‖S J Sᵀ − Ω‖_F / ‖Ω‖_F`.
pub fn darboux_residual(s: &DenseMatrix, form: &Form) -> f64 {
    let j = matcore::standard_j(form.n());
    (s * j * s.transpose() - form.omega()).norm() / form.omega().norm()
}

/// Deterministic Darboux matrix built from the skew canonical form of `Ω`:
/// `S = Q_xp · diag(√μ, √μ)`. The standard form maps to the identity.
pub fn darboux_factor(form: &Form) -> Result<DarbouxMatrix> {
    let n = form.n();
    if form.is_standard() {
        return DarbouxMatrix::new(DMatrix::identity(2 * n, 2 * n), form.clone());
    }
    let canon = matcore::skew_canonical(form.omega())?;
    let mut scale = DMatrix::zeros(2 * n, 2 * n);
    for (j, mu) in canon.mus.iter().enumerate() {
        scale[(j, j)] = mu.sqrt();
        scale[(n + j, n + j)] = mu.sqrt();
    }
    DarbouxMatrix::new(canon.q_xp() * scale, form.clone())
}

fn congruence_defect(m: &DenseMatrix, form: &Form, sign: f64) -> Result<f64> {
    if m.nrows() != form.dim() || m.ncols() != form.dim() {
        return Err(Error::DimensionMismatch { expected: form.dim(), got: m.nrows() });
    }
    let om = form.omega();
    Ok((m * om * m.transpose() - om * sign).norm() / om.norm())
}

/// `M Ω Mᵀ = Ω` within `tol` relative.
pub fn is_symplectic(m: &DenseMatrix, form: &Form, tol: f64) -> Result<bool> {
    Ok(congruence_defect(m, form, 1.0)? <= tol)
}

/// `M Ω Mᵀ = −Ω` within `tol` relative.
pub fn is_antisymplectic(m: &DenseMatrix, form: &Form, tol: f64) -> Result<bool> {
    Ok(congruence_defect(m, form, -1.0)? <= tol)
}

/// Symmetric positive-definite `2n × 2n` covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix(DenseMatrix);

impl CovMatrix {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        if m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::InvalidArgument(format!("covariance dimension {} is not even", m.nrows())));
        }
        matcore::check_symmetric(&m)?;
        let m = matcore::symmetrize(&m);
        matcore::check_spd(&m)?;
        Ok(Self(m))
    }

    pub fn n(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.0
    }

    pub fn scaled(&self, mu: f64) -> Result<Self> {
        Self::new(&self.0 * mu)
    }

    /// `M A Mᵀ`.
    pub fn congruence(&self, m: &DenseMatrix) -> Result<Self> {
        Self::new(m * &self.0 * m.transpose())
    }
}
