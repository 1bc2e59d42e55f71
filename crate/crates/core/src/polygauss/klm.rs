use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{FourierTransform, PolyGauss};
use crate::error::{Error, Result};
use crate::matcore::{self, DenseMatrix, HermitianMatrix};

pub const MAX_KLM_POINTS: usize = 512;

/// Outcome of a finite Kastler-Loupias-Miracle test.
#[derive(Debug, Clone)]
pub struct KLMReport {
    pub alpha: f64,
    pub sigma: DenseMatrix,
    pub points: Vec<DVector<f64>>,
    pub min_eig: f64,
    /// `max |M_jk|`.
    pub scale: f64,
    /// `min_eig ≥ −tol · N · max|M_jk|`. `false` certifies non-membership.
    pub verdict: bool,
}

#[derive(Debug, Clone)]
pub enum KlmPoints {
    Explicit(Vec<DVector<f64>>),
    /// `count` points: a small axis lattice plus draws from `N(0, B⁻¹)` for the
    /// typical term shape `B`.
    Sampled { count: usize, seed: u64 },
}

/// Deterministic sample of `count` frequency points for `f`.
pub fn sample_points(f: &PolyGauss, count: usize, seed: u64) -> Result<Vec<DVector<f64>>> {
    let dim = f.dim();
    let cov = matcore::symmetrize(&matcore::inverse(&f.typical_shape())?);
    let root = matcore::sqrt_spd(&cov)?;
    let mut pts = vec![DVector::zeros(dim)];
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            if pts.len() < count {
                pts.push(root.column(i) * sign);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while pts.len() < count {
        let g = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        pts.push(&root * g);
    }
    pts.truncate(count);
    Ok(pts)
}

/// Builds `M_jk = F(f)(a_j − a_k) e^{(iα/2) a_k·Σ a_j}` and tests it for
/// positive semidefiniteness.
pub fn klm_check(f: &PolyGauss, alpha: f64, sigma: &DenseMatrix, points: &KlmPoints, tol: f64) -> Result<KLMReport> {
    let dim = f.dim();
    matcore::check_skew(sigma)?;
    if sigma.nrows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: sigma.nrows() });
    }
    let pts = match points {
        KlmPoints::Explicit(p) => p.clone(),
        KlmPoints::Sampled { count, seed } => {
            if *count > MAX_KLM_POINTS {
                return Err(Error::TooManyPoints(*count));
            }
            sample_points(f, *count, *seed)?
        }
    };
    let n = pts.len();
    if n > MAX_KLM_POINTS {
        return Err(Error::TooManyPoints(n));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("KLM check needs at least 2 points".into()));
    }
    if let Some(p) = pts.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
    }
    let ft = FourierTransform::new(f);
    let mut re = DMatrix::zeros(n, n);
    let mut im = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let val = ft.eval(&(&pts[j] - &pts[k]));
            let phase = 0.5 * alpha * pts[k].dot(&(sigma * &pts[j]));
            let m = val * nalgebra::Complex::from_polar(1.0, phase);
            re[(j, k)] = m.re;
            im[(j, k)] = m.im;
            if j != k {
                re[(k, j)] = m.re;
                im[(k, j)] = -m.im;
            } else {
                im[(j, j)] = 0.0;
            }
        }
    }
    let scale = re.iter().zip(im.iter()).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max);
    let h = HermitianMatrix::new(re, im)?;
    let min_eig = h.min_eigenvalue();
    Ok(KLMReport {
        alpha,
        sigma: sigma.clone(),
        points: pts,
        min_eig,
        scale,
        verdict: min_eig >= -tol * n as f64 * scale,
    })
}

/// Runs sampled checks with `16, 32, …` points up to `max_points`, stopping at
/// the first rejection.
pub fn klm_escalate(f: &PolyGauss, alpha: f64, sigma: &DenseMatrix, seed: u64, max_points: usize, tol: f64) -> Result<KLMReport> {
    if max_points > MAX_KLM_POINTS {
        return Err(Error::TooManyPoints(max_points));
    }
    let mut count = 16.min(max_points);
    loop {
        let report = klm_check(f, alpha, sigma, &KlmPoints::Sampled { count, seed }, tol)?;
        if !report.verdict || count >= max_points {
            return Ok(report);
        }
        count = (count * 2).min(max_points);
    }
}
