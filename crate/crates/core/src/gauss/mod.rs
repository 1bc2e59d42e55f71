//! Gaussian states on arbitrary forms.

mod regions;

pub use regions::{classify, classify_report, generate_gaussian_region, ClassifyReport, RegionLabel, BOUNDARY_TOL};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matcore::{self, DenseMatrix, HermitianMatrix};
use crate::sympl::{
    is_antisymplectic, is_symplectic, make_form, spectrum_for_matrix, symplectic_spectrum,
    CovMatrix, DarbouxMatrix, Form,
};

/// `G(z) = exp(−½ (z − m)·A⁻¹(z − m)) / ((2π)ⁿ √det A)` on a given form.
#[derive(Debug, Clone)]
pub struct GaussianState {
    pub mean: DVector<f64>,
    pub cov: CovMatrix,
    pub form: Form,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cov: CovMatrix, form: Form) -> Result<Self> {
        if cov.dim() != form.dim() {
            return Err(Error::DimensionMismatch { expected: form.dim(), got: cov.dim() });
        }
        if mean.len() != form.dim() {
            return Err(Error::DimensionMismatch { expected: form.dim(), got: mean.len() });
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { mean, cov, form })
    }

    pub fn centered(cov: CovMatrix, form: Form) -> Result<Self> {
        let dim = cov.dim();
        Self::new(DVector::zeros(dim), cov, form)
    }

    /// `cov = ½ S Sᵀ` for the given Darboux matrix: a minimal-uncertainty state of its form.
    pub fn minimal(s: &DarbouxMatrix) -> Result<Self> {
        let cov = CovMatrix::new(matcore::symmetrize(&(s.matrix() * s.matrix().transpose() * 0.5)))?;
        Self::centered(cov, s.target().clone())
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn lambda1(&self) -> Result<f64> {
        Ok(symplectic_spectrum(&self.cov, &self.form)?.values[0])
    }
}

/// `A + (iα/2)Ω` as a Hermitian matrix.
pub fn uncertainty_matrix(cov: &CovMatrix, omega: &DenseMatrix, alpha: f64) -> Result<HermitianMatrix> {
    HermitianMatrix::new(cov.matrix().clone(), omega * (0.5 * alpha))
}

/// Positive semidefiniteness of `A + (iα/2)Ω`, with the tolerance scaled by `‖A‖`.
pub fn uncertainty_psd(cov: &CovMatrix, omega: &DenseMatrix, alpha: f64, tol: f64) -> Result<(bool, f64)> {
    let h = uncertainty_matrix(cov, omega, alpha)?;
    let min = h.min_eigenvalue();
    Ok((min >= -tol * cov.matrix().norm().max(1.0), min))
}

/// Wigner membership: `λ_{ω,1}(A) ≥ ½`.
pub fn is_wigner(state: &GaussianState, tol: f64) -> Result<(bool, f64)> {
    let l1 = state.lambda1()?;
    Ok((l1 >= 0.5 - tol, l1))
}

/// The Narcowich-Wigner interval `[−2λ₁, 2λ₁]` of a Gaussian for its form.
#[derive(Debug, Clone)]
pub struct NWInterval {
    pub form: Form,
    pub lo: f64,
    pub hi: f64,
}

impl NWInterval {
    pub fn contains(&self, alpha: f64, tol: f64) -> bool {
        alpha >= self.lo - tol && alpha <= self.hi + tol
    }
}

pub fn nw_interval(state: &GaussianState) -> Result<NWInterval> {
    let hi = 2.0 * state.lambda1()?;
    Ok(NWInterval { form: state.form.clone(), lo: -hi, hi })
}

/// `1 / (2ⁿ √det A)`, independent of the form.
pub fn purity(state: &GaussianState) -> f64 {
    let n = state.n() as i32;
    1.0 / (2f64.powi(n) * matcore::det(state.cov.matrix()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    /// From the Darboux matrix's target form to `J`.
    ToStandard,
    /// From `J` to the Darboux matrix's target form.
    FromStandard,
}

pub fn change_frame(state: &GaussianState, s: &DarbouxMatrix, direction: FrameDirection) -> Result<GaussianState> {
    let n = state.n();
    if s.target().n() != n {
        return Err(Error::FormMismatch);
    }
    let close = |a: &Form, b: &Form| (a.omega() - b.omega()).norm() <= 1e-9 * b.omega().norm();
    match direction {
        FrameDirection::ToStandard => {
            if !close(&state.form, s.target()) {
                return Err(Error::FormMismatch);
            }
            let si = s.inverse();
            GaussianState::new(si * &state.mean, state.cov.congruence(si)?, Form::standard(n))
        }
        FrameDirection::FromStandard => {
            if !state.form.is_standard() && !close(&state.form, &Form::standard(n)) {
                return Err(Error::FormMismatch);
            }
            GaussianState::new(s.matrix() * &state.mean, state.cov.congruence(s.matrix())?, s.target().clone())
        }
    }
}

/// What a linear change of variables `z ↦ Mz` does to Wigner membership.
#[derive(Debug, Clone)]
pub struct RepresentabilityReport {
    /// `Ω₂ = (1/α) M Ω₁ Mᵀ`.
    pub induced_form: Form,
    /// `|det M|^{1/n}`.
    pub alpha: f64,
    pub m_symplectic: bool,
    pub m_antisymplectic: bool,
    /// `λ_{ω₁,1}` of the transformed covariance.
    pub lambda1_image_form1: f64,
    pub still_wigner_on_form1: bool,
    /// `λ_{ω₁,1}(A)` and `λ_{ω₂,1}(A)` of the original covariance.
    pub lambda1_form1: f64,
    pub lambda1_form2: f64,
    /// `λ_{ω₁,1}(A) ≥ ½` and `λ_{ω₂,1}(A) ≥ α/2`.
    pub wigner_on_form2: bool,
    /// `λ_{ω₂,1}` of the transformed covariance.
    pub lambda1_image_form2: f64,
    pub image_wigner_on_form2: bool,
}

/// `z ↦ |det M| G(Mz)`: covariance `M⁻¹ A M⁻ᵀ`, mean `M⁻¹ m`.
pub fn transform(state: &GaussianState, m: &DenseMatrix, tol: f64) -> Result<(GaussianState, RepresentabilityReport)> {
    let dim = state.form.dim();
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: m.nrows() });
    }
    matcore::check_finite(m)?;
    let det = matcore::det(m);
    if det.abs() <= 1e-12 {
        return Err(Error::Singular(det.abs()));
    }
    let mi = matcore::inverse(m)?;
    let image = GaussianState::new(&mi * &state.mean, state.cov.congruence(&mi)?, state.form.clone())?;

    let n = state.n();
    let alpha = det.abs().powf(1.0 / n as f64);
    let induced_form = make_form(&matcore::antisymmetrize(&(m * state.form.omega() * m.transpose() / alpha)))?.form;

    let lambda1_image_form1 = image.lambda1()?;
    let lambda1_form1 = state.lambda1()?;
    let lambda1_form2 = symplectic_spectrum(&state.cov, &induced_form)?.values[0];
    let lambda1_image_form2 = symplectic_spectrum(&image.cov, &induced_form)?.values[0];
    let report = RepresentabilityReport {
        m_symplectic: is_symplectic(m, &state.form, tol)?,
        m_antisymplectic: is_antisymplectic(m, &state.form, tol)?,
        lambda1_image_form1,
        still_wigner_on_form1: lambda1_image_form1 >= 0.5 - tol,
        lambda1_form1,
        lambda1_form2,
        wigner_on_form2: lambda1_form1 >= 0.5 - tol && lambda1_form2 >= alpha / 2.0 - tol,
        lambda1_image_form2,
        image_wigner_on_form2: lambda1_image_form2 >= 0.5 - tol,
        induced_form,
        alpha,
    };
    Ok((image, report))
}

/// `diag(I, I_A, −I_B)` in `(x_A, x_B, p_A, p_B)` order: reverses Bob's momenta.
pub fn partial_transpose_matrix(n: usize, n_a: usize) -> Result<DenseMatrix> {
    if n_a == 0 || n_a >= n {
        return Err(Error::BadSplit { n_a, n });
    }
    let diag = DVector::from_fn(2 * n, |i, _| if i >= n + n_a { -1.0 } else { 1.0 });
    Ok(DMatrix::from_diagonal(&diag))
}

/// `Ω_PPT = P J Pᵀ`.
pub fn ppt_form(n: usize, n_a: usize) -> Result<Form> {
    let p = partial_transpose_matrix(n, n_a)?;
    Form::new(&p * matcore::standard_j(n) * p.transpose())
}

/// Necessary separability test: `λ_{Ω_PPT,1}(A) ≥ ½`. `false` certifies entanglement.
pub fn ppt_check(state: &GaussianState, n_a: usize, tol: f64) -> Result<(bool, f64)> {
    let n = state.n();
    if (state.form.omega() - matcore::standard_j(n)).norm() > 1e-9 {
        return Err(Error::FormMismatch);
    }
    let form = ppt_form(n, n_a)?;
    let l1 = symplectic_spectrum(&state.cov, &form)?.values[0];
    Ok((l1 >= 0.5 - tol, l1))
}

/// A point `(α, Σ)` of a Narcowich-Wigner spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct NWPoint {
    pub alpha: f64,
    pub sigma: DenseMatrix,
}

impl NWPoint {
    pub fn new(alpha: f64, sigma: DenseMatrix) -> Result<Self> {
        matcore::check_skew(&sigma)?;
        if !alpha.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { alpha, sigma: matcore::antisymmetrize(&sigma) })
    }
}

/// `(α, Σ) ⊕ (β, Υ) = (γ, (α/γ)Σ + (β/γ)Υ)` with `γ = |det(αΣ + βΥ)|^{1/2n} > 0`.
pub fn nw_combine(p1: &NWPoint, p2: &NWPoint) -> Result<NWPoint> {
    if p1.sigma.nrows() != p2.sigma.nrows() {
        return Err(Error::DimensionMismatch { expected: p1.sigma.nrows(), got: p2.sigma.nrows() });
    }
    let sum = &p1.sigma * p1.alpha + &p2.sigma * p2.alpha;
    let det = matcore::det(&sum);
    if det.abs() < 1e-12 {
        return Err(Error::DegenerateCombination(det.abs()));
    }
    let gamma = det.abs().powf(1.0 / sum.nrows() as f64);
    NWPoint::new(gamma, sum / gamma)
}

/// Moduli of the eigenvalues of `A Σ⁻¹` for an arbitrary invertible skew `Σ`.
pub fn spectrum_against(cov: &CovMatrix, sigma: &DenseMatrix) -> Result<Vec<f64>> {
    spectrum_for_matrix(cov.matrix(), sigma)
}

#[cfg(test)]
mod tests;

/// Two-mode squeezed vacuum covariance in `(x₁, x₂, p₁, p₂)` order.
pub fn two_mode_squeezed(r: f64) -> CovMatrix {
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, s, 0.0, 0.0,
        s, c, 0.0, 0.0,
        0.0, 0.0, c, -s,
        0.0, 0.0, -s, c,
    ]) * 0.5;
    CovMatrix::new(m).expect("squeezed vacuum covariance is SPD")
}
