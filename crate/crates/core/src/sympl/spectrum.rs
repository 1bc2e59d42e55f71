use nalgebra::{DMatrix, DVector};

use super::form::{darboux_factor, make_form, CovMatrix, DarbouxMatrix, Form};
use crate::error::{Error, Result};
use crate::matcore::{self, DenseMatrix};

/// Relative tolerance for pairing singular values of `A^{1/2} Ω⁻¹ A^{1/2}`.
pub const PAIR_TOL: f64 = 1e-7;

/// Ascending symplectic eigenvalues of a covariance matrix for a form.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub form: Form,
    pub values: Vec<f64>,
}

impl SpectrumResult {
    /// The smallest symplectic eigenvalue `λ_{ω,1}`.
    pub fn lambda1(&self) -> f64 {
        self.values[0]
    }
}

/// Moduli of the eigenvalues of `A Ω⁻¹` for any invertible skew `Ω`, one per pair.
pub(crate) fn spectrum_for_matrix(a: &DenseMatrix, omega: &DenseMatrix) -> Result<Vec<f64>> {
    if a.nrows() != omega.nrows() {
        return Err(Error::DimensionMismatch { expected: omega.nrows(), got: a.nrows() });
    }
    let half = matcore::sqrt_spd(a)?;
    let om_inv = matcore::inverse(omega)?;
    let k = matcore::antisymmetrize(&(&half * om_inv * &half));
    let mut s: Vec<f64> = k.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| x.total_cmp(y));
    let top = *s.last().unwrap();
    let n = s.len() / 2;
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let gap = (s[2 * j + 1] - s[2 * j]).abs() / top;
        if gap > PAIR_TOL {
            return Err(Error::PairingFailure(gap));
        }
        values.push(0.5 * (s[2 * j] + s[2 * j + 1]));
    }
    Ok(values)
}

pub fn symplectic_spectrum(a: &CovMatrix, form: &Form) -> Result<SpectrumResult> {
    let values = spectrum_for_matrix(a.matrix(), form.omega())?;
    Ok(SpectrumResult { form: form.clone(), values })
}

#[derive(Debug, Clone)]
pub struct WilliamsonFactorization {
    pub s: DarbouxMatrix,
    /// Ascending; equal to the symplectic spectrum.
    pub d: Vec<f64>,
}

impl WilliamsonFactorization {
    pub fn diagonal(&self) -> DenseMatrix {
        doubled_diagonal(&self.d)
    }

    /// `‖S⁻¹ A S⁻ᵀ − diag(d, d)‖_F / ‖A‖_F`.
    pub fn residual(&self, a: &CovMatrix) -> f64 {
        let si = self.s.inverse();
        (si * a.matrix() * si.transpose() - self.diagonal()).norm() / a.matrix().norm()
    }
}

pub(crate) fn doubled_diagonal(d: &[f64]) -> DenseMatrix {
    let doubled: Vec<f64> = d.iter().chain(d.iter()).copied().collect();
    DMatrix::from_diagonal(&DVector::from_vec(doubled))
}

/// Classical Williamson: `B = T diag(d, d) Tᵀ` with `T` σ-symplectic, `d` ascending.
pub(crate) fn williamson_standard(b: &DenseMatrix) -> Result<(DenseMatrix, Vec<f64>)> {
    let n = b.nrows() / 2;
    let half = matcore::sqrt_spd(b)?;
    let inv_half = matcore::inv_sqrt_spd(b)?;
    let k = matcore::antisymmetrize(&(&inv_half * matcore::standard_j(n) * &inv_half));
    let canon = matcore::skew_canonical(&k)?;
    // K = Q [[0, D⁻¹], [−D⁻¹, 0]] Qᵀ; descending μ gives ascending d = 1/μ.
    let d: Vec<f64> = canon.mus.iter().map(|mu| 1.0 / mu).collect();
    let scale = doubled_diagonal(&d.iter().map(|x| 1.0 / x.sqrt()).collect::<Vec<_>>());
    Ok((half * canon.q_xp() * scale, d))
}

/// `S⁻¹ A S⁻ᵀ = diag(d, d)` with `S` a Darboux matrix of `form`.
///
/// Pulls `A` back to the standard frame through a Darboux witness, applies the
/// classical theorem there and composes.
pub fn williamson(a: &CovMatrix, form: &Form) -> Result<WilliamsonFactorization> {
    if a.dim() != form.dim() {
        return Err(Error::DimensionMismatch { expected: form.dim(), got: a.dim() });
    }
    // Pairing is enforced here so that degenerate inputs fail like the spectrum does.
    spectrum_for_matrix(a.matrix(), form.omega())?;
    let witness = darboux_factor(form)?;
    let wi = witness.inverse();
    let b = matcore::symmetrize(&(wi * a.matrix() * wi.transpose()));
    let (t, d) = williamson_standard(&b)?;
    let s = DarbouxMatrix::new(witness.matrix() * t, form.clone())?;
    Ok(WilliamsonFactorization { s, d })
}

#[derive(Debug, Clone)]
pub struct PrescribedSpectrum {
    /// `P` with `P⁻¹ A P⁻ᵀ = diag(λ, λ)`.
    pub p: DenseMatrix,
    /// `Δ = P J Pᵀ` before normalization.
    pub delta_raw: DenseMatrix,
    /// `Δ` normalized to unit determinant.
    pub delta: Form,
    /// `delta = scale · delta_raw`.
    pub scale: f64,
    pub spectrum_raw: Vec<f64>,
    /// Spectrum relative to the normalized form: `λ / scale`.
    pub spectrum_normalized: Vec<f64>,
}

/// A form for which `A` has the prescribed symplectic spectrum.
pub fn prescribe_spectrum(a: &CovMatrix, lambdas: &[f64]) -> Result<PrescribedSpectrum> {
    let n = a.n();
    if lambdas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lambdas.len() });
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) || lambdas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::BadLambdas("lambdas must be positive and ascending".into()));
    }
    let (t, d) = williamson_standard(a.matrix())?;
    let r_inv: Vec<f64> = lambdas.iter().zip(&d).map(|(l, s)| (s / l).sqrt()).collect();
    let p = t * doubled_diagonal(&r_inv);
    let delta_raw = matcore::antisymmetrize(&(&p * matcore::standard_j(n) * p.transpose()));
    let nf = make_form(&delta_raw)?;
    Ok(PrescribedSpectrum {
        p,
        delta_raw,
        delta: nf.form,
        scale: nf.scale,
        spectrum_raw: lambdas.to_vec(),
        spectrum_normalized: lambdas.iter().map(|l| l / nf.scale).collect(),
    })
}
