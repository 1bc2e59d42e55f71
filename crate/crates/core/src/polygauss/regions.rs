//! Non-Gaussian members of the regions A1, A2 and A4, with certificates.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{
    convolve, fock_product, gaussian_pg, grid_min, klm_check, overlap, push_forward, translate, KlmPoints, PolyGauss,
};
use crate::error::{Error, Result};
use crate::gauss::{generate_gaussian_region, nw_combine, GaussianState, NWPoint, RegionLabel};
use crate::matcore::{self, DenseMatrix};
use crate::sympl::{
    darboux_factor, find_ratio_matrix, forms_coincide, make_form, symplectic_spectrum, williamson, CovMatrix, Form,
};

fn rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

/// Evidence that `f = p·h₁ + (1 − p)·h₅` lies in A1 (or A2 with the forms swapped).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct A1Certificate {
    pub label: String,
    /// A point where `f < 0`, so `f` is not non-negative.
    pub negativity_point: Vec<f64>,
    pub negativity_value: f64,
    /// `∫ f g₂ < 0` for a Wigner function `g₂` of the other form.
    pub witness_overlap: f64,
    pub witness: PolyGauss,
    pub witness_kind: String,
    /// Whether a Gaussian witness was found. Overlaps of two Gaussians are
    /// positive, so the search falls back to a Fock witness.
    pub gaussian_witness_found: bool,
    /// `(p, 1 − p)`.
    pub weights: [f64; 2],
    pub translation: Vec<f64>,
    /// Translated Fock-1 Wigner function of the own form (pure state).
    pub fock_component: PolyGauss,
    pub gaussian_component_cov: Vec<Vec<f64>>,
    /// `λ₁` of the Gaussian component for the own form (≥ ½) and the other form (< ½).
    pub gaussian_component_lambda1_own: f64,
    pub gaussian_component_lambda1_other: f64,
    /// `∫ h₅ g₂ < 0`.
    pub gaussian_witness_overlap: f64,
    /// `∫ h₁ g₂`.
    pub fock_witness_overlap: f64,
    /// `h₅(z)/|h₁(z)|` and `|∫h₅g₂| / ∫h₁g₂` (absent when the latter overlap is non-positive).
    pub alpha_prime: f64,
    pub beta_prime: Option<f64>,
}

/// One `⊕` decomposition with its evaluated result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub left_alpha: f64,
    pub left_sigma: Vec<Vec<f64>>,
    pub right_alpha: f64,
    pub right_sigma: Vec<Vec<f64>>,
    pub result_alpha: f64,
    /// `‖Σ_result − J‖_F`.
    pub result_residual: f64,
}

/// Evidence that `f₄ = g₄(S₁⁻¹ ·)` with `g₄ = G_A ⋆ h^ω` lies in A4.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct A4Certificate {
    pub alpha0: f64,
    pub gamma0: f64,
    /// `Ω = S₁⁻¹ Ω₂ S₁⁻ᵀ`, the second form seen from the first form's Darboux frame.
    pub reduced_form: Vec<Vec<f64>>,
    pub sigma2: Vec<Vec<f64>>,
    /// Covariance `A` of the Gaussian factor, in the reduced frame.
    pub cov: Vec<Vec<f64>>,
    /// `λ_{ω,1}(A) = α₀ − 1`.
    pub lambda1_reduced_form: f64,
    /// `λ_{Σ₂,1}(A)` and the required lower bound `γ₀^{1/2n}`.
    pub lambda1_sigma2: f64,
    pub required_lambda1_sigma2: f64,
    /// `(1 − α₀, J) ⊕ (α₀, J)`.
    pub standard_decomposition: Decomposition,
    /// `(γ₀^{1/2n}, Σ₂) ⊕ (α₀, Ω)`.
    pub form_decomposition: Decomposition,
    pub fock_index: usize,
    pub planck: f64,
    pub negativity_point: Vec<f64>,
    pub negativity_value: f64,
    /// Minimum eigenvalues of sampled KLM matrices of `f₄` at `(1, Ω₁)` and `(1, Ω₂)`.
    pub klm_min_eig_form1: f64,
    pub klm_min_eig_form2: f64,
    pub klm_verdict_form1: bool,
    pub klm_verdict_form2: bool,
    pub klm_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    A1(A1Certificate),
    A4(A4Certificate),
}

/// Fock `|1⟩` on the first mode, vacuum elsewhere, at `ħ = 1`.
fn fock_one(n: usize, hbar: f64, m: usize) -> Result<PolyGauss> {
    let mut ms = vec![0; n];
    ms[0] = m;
    fock_product(&ms, hbar)
}

/// A non-Gaussian function in A1, A2 or A4 for the pair of forms.
pub fn generate_nongaussian_region(
    label: RegionLabel,
    f1: &Form,
    f2: &Form,
    seed: u64,
) -> Result<(PolyGauss, Certificate)> {
    if f1.n() != f2.n() {
        return Err(Error::DimensionMismatch { expected: f1.dim(), got: f2.dim() });
    }
    if forms_coincide(f1, f2) {
        return Err(Error::FormsCoincide);
    }
    match label {
        RegionLabel::A1 => mixed_region(f1, f2, seed, "A1"),
        RegionLabel::A2 => mixed_region(f2, f1, seed, "A2"),
        RegionLabel::A4 => intersection_region(f1, f2, seed),
        other => Err(Error::InvalidArgument(format!(
            "region {other} is reached by Gaussians; use the Gaussian generator"
        ))),
    }
}

/// `p·h₁ + (1 − p)·h₅`: Wigner for `own` as a mixture of two `own`-Wigner
/// functions, negative at a point, and negative against an `other`-Wigner witness.
fn mixed_region(own: &Form, other: &Form, seed: u64, tag: &str) -> Result<(PolyGauss, Certificate)> {
    let n = own.n();
    let s_own = darboux_factor(own)?;
    let h1 = push_forward(&fock_one(n, 1.0, 1)?, s_own.matrix())?;
    let h5_state = generate_gaussian_region(RegionLabel::A5, own, other, seed)?;
    let h5 = gaussian_pg(&h5_state);
    let lambda_own = symplectic_spectrum(&h5_state.cov, own)?.values[0];

    // Gaussian witnesses: minimal Gaussians of the other form, in several frames.
    let s_other = darboux_factor(other)?;
    let mut gaussian_witness_found = false;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    for _ in 0..8 {
        let p = crate::sympl::random::random_symplectic(&mut rng, n);
        let s = s_other.matrix() * p;
        let cov = CovMatrix::new(matcore::symmetrize(&(&s * s.transpose() * 0.5)))?;
        let g = gaussian_pg(&GaussianState::centered(cov, other.clone())?);
        if overlap(&h5, &g)? < 0.0 {
            gaussian_witness_found = true;
            break;
        }
    }
    // Fock witness in the other form's Williamson frame of h₅: the first
    // Williamson invariant is below ½, which makes ⟨1|ρ|1⟩ negative there.
    let w = williamson(&h5_state.cov, other)?;
    let g2 = push_forward(&fock_one(n, 1.0, 1)?, w.s.matrix())?;
    let b = overlap(&h5, &g2)?;
    if b >= 0.0 {
        return Err(Error::SearchExhausted(format!(
            "witness overlap with the Gaussian component is {b:.3e}, not negative"
        )));
    }

    let z2 = DVector::zeros(2 * n);
    let v1 = h1.eval(&z2);
    let eig = matcore::sym_eig(h5_state.cov.matrix())?;
    let top = eig.values.len() - 1;
    let dir = eig.vectors.column(top) * eig.values[top].sqrt();
    for step in 0..200 {
        let t = 0.25 * step as f64;
        for sign in [1.0, -1.0] {
            if step == 0 && sign < 0.0 {
                continue;
            }
            let z1 = &h5_state.mean + &dir * (sign * t);
            let zeta = &z1 - &z2;
            let h1z = translate(&h1, &zeta)?;
            let a = overlap(&h1z, &g2)?;
            let alpha_prime = h5.eval(&z1) / v1.abs();
            let beta_prime = (a > 0.0).then(|| b.abs() / a);
            if beta_prime.is_some_and(|bp| alpha_prime >= bp) {
                continue;
            }
            let x = match beta_prime {
                Some(bp) => (alpha_prime * bp).sqrt(),
                None => (4.0 * alpha_prime).max(1.0),
            };
            let p = x / (1.0 + x);
            let f = h1z.mix(&h5, p)?;
            let value = f.eval(&z1);
            let witness_overlap = overlap(&f, &g2)?;
            if value < -1e-10 && witness_overlap < -1e-10 {
                let cert = A1Certificate {
                    label: tag.to_string(),
                    negativity_point: vec_of(&z1),
                    negativity_value: value,
                    witness_overlap,
                    witness: g2,
                    witness_kind: "fock-1 in the Williamson frame of the Gaussian component".into(),
                    gaussian_witness_found,
                    weights: [p, 1.0 - p],
                    translation: vec_of(&zeta),
                    fock_component: h1z,
                    gaussian_component_cov: rows(h5_state.cov.matrix()),
                    gaussian_component_lambda1_own: lambda_own,
                    gaussian_component_lambda1_other: w.d[0],
                    gaussian_witness_overlap: b,
                    fock_witness_overlap: a,
                    alpha_prime,
                    beta_prime,
                };
                return Ok((f, Certificate::A1(cert)));
            }
        }
    }
    Err(Error::SearchExhausted("no translation separated the negativity and witness conditions".into()))
}

fn decomposition(left: &NWPoint, right: &NWPoint) -> Result<Decomposition> {
    let out = nw_combine(left, right)?;
    let n = out.sigma.nrows() / 2;
    Ok(Decomposition {
        left_alpha: left.alpha,
        left_sigma: rows(&left.sigma),
        right_alpha: right.alpha,
        right_sigma: rows(&right.sigma),
        result_alpha: out.alpha,
        result_residual: (&out.sigma - matcore::standard_j(n)).norm(),
    })
}

/// Number of sampled points in the certificate KLM checks.
const A4_KLM_POINTS: usize = 64;

/// `G_A ⋆ h^ω` in the first form's Darboux frame, pushed back to the original frame.
fn intersection_region(f1: &Form, f2: &Form, seed: u64) -> Result<(PolyGauss, Certificate)> {
    let n = f1.n();
    let dim = 2 * n;
    let j = matcore::standard_j(n);
    let s1 = darboux_factor(f1)?;
    let s1i = s1.inverse();
    let omega = make_form(&matcore::antisymmetrize(&(s1i * f2.omega() * s1i.transpose())))?.form;

    // smallest α₀ > 1 on a geometric scan with γ(α₀) = det(J − α₀Ω) > 0
    let gamma = |a: f64| matcore::det(&(&j - omega.omega() * a));
    let mut alpha0 = 1.0 + 1e-3;
    let mut step = 1e-3;
    while gamma(alpha0) <= 1e-12 {
        alpha0 += step;
        step *= 1.05;
        if alpha0 > 1e6 {
            return Err(Error::SearchExhausted("det(J − αΩ) stayed non-positive".into()));
        }
    }
    let gamma0 = gamma(alpha0);
    let root = gamma0.powf(1.0 / dim as f64);
    let sigma2_raw = (&j - omega.omega() * alpha0) / root;
    let eta2 = make_form(&matcore::antisymmetrize(&sigma2_raw))?.form;

    let k = root / (alpha0 - 1.0);
    let a0 = find_ratio_matrix(&eta2, &omega, k, seed)?;
    let l_eta1 = symplectic_spectrum(&a0, &omega)?.values[0];
    let a = a0.scaled((alpha0 - 1.0) / l_eta1)?;
    let lambda1_reduced_form = symplectic_spectrum(&a, &omega)?.values[0];
    let lambda1_sigma2 = symplectic_spectrum(&a, &eta2)?.values[0];
    if lambda1_sigma2 < root * (1.0 - 1e-9) {
        return Err(Error::SearchExhausted(format!(
            "λ(Σ₂) = {lambda1_sigma2:.6e} below the required {root:.6e}"
        )));
    }

    let standard_decomposition = decomposition(&NWPoint::new(1.0 - alpha0, j.clone())?, &NWPoint::new(alpha0, j.clone())?)?;
    let form_decomposition =
        decomposition(&NWPoint::new(root, eta2.omega().clone())?, &NWPoint::new(alpha0, omega.omega().clone())?)?;

    let ga = gaussian_pg(&GaussianState::centered(a.clone(), omega.clone())?);
    // Williamson frame of A for Ω: there A is diag(d, d) with d₁ = α₀ − 1 < α₀/2.
    let w = williamson(&a, &omega)?;
    for m in 1..=3 {
        let h_omega = push_forward(&fock_one(n, alpha0, m)?, w.s.matrix())?;
        let g4 = convolve(&ga, &h_omega)?;
        // scan where g₄ is well conditioned
        let local = push_forward(&g4, w.s.inverse())?;
        // odd Fock indices are most negative at the centre; the grid covers the rest
        let mut best = (local.eval(&DVector::zeros(dim)), DVector::zeros(dim));
        let per_axis = match dim {
            2 => Some(201),
            4 => Some(31),
            6 => Some(13),
            _ => None,
        };
        if let Some(per_axis) = per_axis {
            let gm = grid_min(&local, 4.0, per_axis)?;
            if gm.value < best.0 {
                best = (gm.value, gm.argmin);
            }
        }
        let z_g4 = w.s.matrix() * &best.1;
        let value = g4.eval(&z_g4);
        if value >= -1e-12 {
            continue;
        }
        let f4 = push_forward(&g4, s1.matrix())?;
        let z_f4 = s1.matrix() * &z_g4;
        let negativity_value = f4.eval(&z_f4);
        let points = KlmPoints::Sampled { count: A4_KLM_POINTS, seed };
        let k1 = klm_check(&f4, 1.0, f1.omega(), &points, 1e-9)?;
        let k2 = klm_check(&f4, 1.0, f2.omega(), &points, 1e-9)?;
        let cert = A4Certificate {
            alpha0,
            gamma0,
            reduced_form: rows(omega.omega()),
            sigma2: rows(eta2.omega()),
            cov: rows(a.matrix()),
            lambda1_reduced_form,
            lambda1_sigma2,
            required_lambda1_sigma2: root,
            standard_decomposition,
            form_decomposition,
            fock_index: m,
            planck: alpha0,
            negativity_point: vec_of(&z_f4),
            negativity_value,
            klm_min_eig_form1: k1.min_eig,
            klm_min_eig_form2: k2.min_eig,
            klm_verdict_form1: k1.verdict,
            klm_verdict_form2: k2.verdict,
            klm_points: A4_KLM_POINTS,
        };
        return Ok((f4, Certificate::A4(cert)));
    }
    Err(Error::SearchExhausted(format!(
        "no Fock index in 1..=3 made G_A ⋆ h negative (α₀ = {alpha0:.6}, λ₁ = {lambda1_reduced_form:.3e})"
    )))
}

