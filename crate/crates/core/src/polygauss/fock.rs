use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::poly::{GaussianMoments, Poly};
use super::{push_forward, tensor, PolyGauss, Term, DEGREE_BUDGET};
use crate::error::{Error, Result};

/// `H_m(x / √ħ)` as a polynomial in `x`, by the physicists' recurrence.
fn scaled_hermite(m: usize, hbar: f64) -> Poly {
    let t = Poly::var(1, 0).scale(1.0 / hbar.sqrt());
    let mut prev = Poly::constant(1, 1.0);
    if m == 0 {
        return prev;
    }
    let mut cur = t.scale(2.0);
    for k in 1..m {
        let mut next = t.mul(&cur).scale(2.0);
        next.add_scaled(&prev, -2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Wigner function of the Fock state `|m⟩` of one mode at Planck constant `ħ`:
/// `W(x, p) = (2πħ)⁻¹ ∫ e^{−iyp/ħ} ψ(x + y/2) ψ(x − y/2) dy` with
/// `ψ ∝ H_m(x/√ħ) e^{−x²/2ħ}`.
pub fn fock_wigner(m: usize, hbar: f64) -> Result<PolyGauss> {
    if 2 * m > DEGREE_BUDGET {
        return Err(Error::DegreeBudgetExceeded { degree: 2 * m, budget: DEGREE_BUDGET });
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("Planck constant must be positive, got {hbar}")));
    }
    if hbar != 1.0 {
        // W_ħ(z) = ħ⁻¹ W₁(z/√ħ); scaling afterwards avoids cancellation in ħ-dependent coefficients
        let unit = fock_wigner(m, 1.0)?;
        return push_forward(&unit, &(DMatrix::identity(2, 2) * hbar.sqrt()))?.scale(1.0 / hbar);
    }
    let h = scaled_hermite(m, hbar);
    // ∫ h² e^{−x²/ħ} dx = √(πħ) E[h(X)²], X ~ N(0, ħ/2)
    let norm_sq = (PI * hbar).sqrt() * h.mul(&h).expectation(&DMatrix::from_element(1, 1, hbar / 2.0));

    // Q(x, y) = h(x + y/2) h(x − y/2)
    let zero = DVector::zeros(1);
    let plus = h.substitute(&DMatrix::from_row_slice(1, 2, &[1.0, 0.5]), &zero);
    let minus = h.substitute(&DMatrix::from_row_slice(1, 2, &[1.0, -0.5]), &zero);
    let q = plus.mul(&minus);

    // With e^{−y²/4ħ} = √(4πħ) φ_{2ħ}(y), the y-integral is
    // √(4πħ) e^{−p²/ħ} E[Q(x, −2ip + W)], W ~ N(0, 2ħ). Q is even in y, so
    // only even powers of −2ip survive and the result is real.
    let mut moments = GaussianMoments::new(DMatrix::from_element(1, 1, 2.0 * hbar));
    let mut r = Poly::zero(2);
    for (e, c) in q.terms() {
        let (a, b) = (e[0] as usize, e[1] as usize);
        for k in (0..=b).step_by(2) {
            let w = moments.get(&[(b - k) as u8]);
            if w == 0.0 {
                continue;
            }
            // (−2i)^k = (−4)^{k/2} for even k
            let factor = (-4f64).powi(k as i32 / 2) * binomial(b, k) * w;
            r.add_term(vec![a as u8, k as u8], c * factor);
        }
    }
    r.prune(1e-15);
    // W = √(4πħ) / (2πħ N) · R · e^{−(x²+p²)/ħ} and G_{(ħ/2)I} = e^{−(x²+p²)/ħ} / (πħ)
    let coeff = (4.0 * PI * hbar).sqrt() / (2.0 * norm_sq);
    let term = Term::new(coeff, DVector::zeros(2), DMatrix::identity(2, 2) * (hbar / 2.0), r)?;
    PolyGauss::new(1, vec![term])
}

/// Minimal Gaussian `G_{(ħ/2)I}` on `n` modes.
pub fn vacuum(n: usize, hbar: f64) -> Result<PolyGauss> {
    let term = Term::new(1.0, DVector::zeros(2 * n), DMatrix::identity(2 * n, 2 * n) * (hbar / 2.0), Poly::constant(2 * n, 1.0))?;
    PolyGauss::new(n, vec![term])
}

/// `|m₁⟩ ⊗ … ⊗ |mₙ⟩` at Planck constant `ħ`, in `(x, p)` ordering.
pub fn fock_product(ms: &[usize], hbar: f64) -> Result<PolyGauss> {
    let mut iter = ms.iter();
    let first = iter.next().ok_or_else(|| Error::InvalidArgument("need at least one mode".into()))?;
    let mut f = fock_wigner(*first, hbar)?;
    for &m in iter {
        f = tensor(&f, &fock_wigner(m, hbar)?)?;
    }
    Ok(f)
}
