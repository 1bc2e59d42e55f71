//! Seeded generators for forms, symplectic matrices and covariance matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::form::{make_form, CovMatrix, Form};
use crate::matcore::{self, DenseMatrix};

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `Ω = M J Mᵀ` for a Gaussian `M`, normalized.
pub fn random_form<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Form {
    loop {
        let m = gaussian_matrix(rng, 2 * n, 2 * n);
        let om = matcore::antisymmetrize(&(&m * matcore::standard_j(n) * m.transpose()));
        // skip badly conditioned draws
        if matcore::det(&m).abs() < 1e-2 {
            continue;
        }
        if let Ok(nf) = make_form(&om) {
            return nf.form;
        }
    }
}

/// Product of σ-symplectic shears and a `diag(U, U⁻ᵀ)` block.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DenseMatrix {
    let sym = |rng: &mut R| {
        let g = gaussian_matrix(rng, n, n) * 0.5;
        matcore::symmetrize(&g)
    };
    let mut upper = DMatrix::identity(2 * n, 2 * n);
    upper.view_mut((0, n), (n, n)).copy_from(&sym(rng));
    let mut lower = DMatrix::identity(2 * n, 2 * n);
    lower.view_mut((n, 0), (n, n)).copy_from(&sym(rng));
    let u = DMatrix::identity(n, n) + gaussian_matrix(rng, n, n) * 0.3;
    let u_inv_t = u.clone().try_inverse().expect("perturbed identity is invertible").transpose();
    let mut block = DMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&u);
    block.view_mut((n, n), (n, n)).copy_from(&u_inv_t);
    upper * block * lower
}

/// `G Gᵀ + shift·I` for a Gaussian `G`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize, shift: f64) -> CovMatrix {
    let g = gaussian_matrix(rng, 2 * n, 2 * n);
    CovMatrix::new(&g * g.transpose() + DMatrix::identity(2 * n, 2 * n) * shift)
        .expect("shifted Gram matrix is SPD")
}
