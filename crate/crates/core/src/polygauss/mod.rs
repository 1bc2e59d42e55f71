//! Exact algebra of polynomial × Gaussian phase-space functions
//! `f(z) = Σ_t c_t P_t(z − m_t) G_{B_t}(z − m_t)`.

mod fock;
mod grid;
mod klm;
pub mod poly;
mod regions;

pub use fock::{fock_product, fock_wigner, vacuum};
pub use grid::{grid_box, grid_min, sample_grid, GridAxis, GridMin, GridSamples, GRID_BUDGET};
pub use klm::{klm_check, klm_escalate, sample_points, KlmPoints, KLMReport, MAX_KLM_POINTS};
pub use regions::{generate_nongaussian_region, A1Certificate, A4Certificate, Certificate};

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{FrameDirection, GaussianState};
use crate::matcore::{self, DenseMatrix};
use crate::sympl::{DarbouxMatrix, Form};
use poly::Poly;

/// Largest total polynomial degree a term may carry.
pub const DEGREE_BUDGET: usize = 24;
/// Largest number of terms after canonical merging.
pub const TERM_BUDGET: usize = 512;
/// Centers and shapes closer than this are merged into one term.
pub const MERGE_TOL: f64 = 1e-12;

/// `c · P(z − m) · G_B(z − m)` with `G_B` the normalized centred Gaussian density.
#[derive(Debug, Clone)]
pub struct Term {
    coeff: f64,
    center: DVector<f64>,
    shape: DenseMatrix,
    poly: Poly,
    precision: DenseMatrix,
    norm: f64,
}

impl Term {
    pub fn new(coeff: f64, center: DVector<f64>, shape: DenseMatrix, poly: Poly) -> Result<Self> {
        let dim = center.len();
        if shape.nrows() != dim || shape.ncols() != dim || poly.nvars() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: shape.nrows() });
        }
        if !coeff.is_finite() || center.iter().any(|v| !v.is_finite()) || poly.terms().any(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        matcore::check_symmetric(&shape)?;
        let shape = matcore::symmetrize(&shape);
        matcore::check_spd(&shape)?;
        let degree = poly.degree();
        if degree > DEGREE_BUDGET {
            return Err(Error::DegreeBudgetExceeded { degree, budget: DEGREE_BUDGET });
        }
        let precision = matcore::symmetrize(&matcore::inverse(&shape)?);
        let norm = 1.0 / ((2.0 * PI).powf(dim as f64 / 2.0) * matcore::det(&shape).sqrt());
        Ok(Self { coeff, center, shape, poly, precision, norm })
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DenseMatrix {
        &self.shape
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn eval(&self, z: &DVector<f64>) -> f64 {
        let y = z - &self.center;
        let q = y.dot(&(&self.precision * &y));
        self.coeff * self.norm * (-0.5 * q).exp() * self.poly.eval(y.as_slice())
    }

    pub fn integral(&self) -> f64 {
        self.coeff * self.poly.expectation(&self.shape)
    }

    /// `E[P(d + W)]`, `W ~ N(0, B)`, as a polynomial in `d`.
    fn smoothed(&self) -> Poly {
        let dim = self.center.len();
        let mut l = DMatrix::zeros(dim, 2 * dim);
        l.view_mut((0, 0), (dim, dim)).fill_with_identity();
        l.view_mut((0, dim), (dim, dim)).fill_with_identity();
        self.poly.substitute(&l, &DVector::zeros(dim)).integrate_tail(dim, &self.shape)
    }
}

/// A finite sum of polynomial × Gaussian terms on `2n` phase-space coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PolyGaussRepr", into = "PolyGaussRepr")]
pub struct PolyGauss {
    n: usize,
    terms: Vec<Term>,
}

fn same_frame(a: &Term, b: &Term) -> bool {
    (&a.center - &b.center).amax() <= MERGE_TOL && (&a.shape - &b.shape).amax() <= MERGE_TOL
}

impl PolyGauss {
    /// Builds the canonical form: terms sharing (center, shape) are merged,
    /// vanishing terms dropped.
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            if t.center.len() != 2 * n {
                return Err(Error::DimensionMismatch { expected: 2 * n, got: t.center.len() });
            }
            if t.coeff == 0.0 || t.poly.is_zero() {
                continue;
            }
            if let Some(slot) = merged.iter_mut().find(|m| same_frame(m, &t)) {
                let mut p = slot.poly.scale(slot.coeff);
                p.add_scaled(&t.poly, t.coeff);
                slot.poly = p;
                slot.coeff = 1.0;
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| !t.poly.is_zero());
        if merged.len() > TERM_BUDGET {
            return Err(Error::TermBudgetExceeded { terms: merged.len(), budget: TERM_BUDGET });
        }
        Ok(Self { n, terms: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.poly.degree()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &DVector<f64>) -> f64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    pub fn integral(&self) -> f64 {
        self.terms.iter().map(Term::integral).sum()
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        let terms = self.terms.iter().map(|t| Term { coeff: t.coeff * c, ..t.clone() }).collect();
        Self::new(self.n, terms)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modes(other)?;
        Self::new(self.n, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    /// `p·f + (1 − p)·g`.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        self.scale(p)?.add(&other.scale(1.0 - p)?)
    }

    fn check_modes(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    /// Weighted mean of the term shapes, weights `|∫ term|`.
    pub fn typical_shape(&self) -> DenseMatrix {
        let dim = self.dim();
        let mut acc = DMatrix::zeros(dim, dim);
        let mut w = 0.0;
        for t in &self.terms {
            let wt = t.integral().abs().max(1e-300);
            acc += &t.shape * wt;
            w += wt;
        }
        acc / w
    }

    /// Mean of the term centers.
    pub fn typical_center(&self) -> DVector<f64> {
        let mut acc = DVector::zeros(self.dim());
        for t in &self.terms {
            acc += &t.center;
        }
        acc / self.terms.len().max(1) as f64
    }
}

/// A single normalized Gaussian term.
pub fn gaussian_pg(state: &GaussianState) -> PolyGauss {
    let dim = state.form.dim();
    let term = Term::new(1.0, state.mean.clone(), state.cov.matrix().clone(), Poly::constant(dim, 1.0))
        .expect("state covariance is SPD");
    PolyGauss::new(state.n(), vec![term]).expect("single term")
}

/// `z ↦ f(z − ζ)`.
pub fn translate(f: &PolyGauss, zeta: &DVector<f64>) -> Result<PolyGauss> {
    if zeta.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: zeta.len() });
    }
    let terms = f.terms.iter().map(|t| Term { center: &t.center + zeta, ..t.clone() }).collect();
    PolyGauss::new(f.n, terms)
}

/// `z ↦ f(S⁻¹ z)` for invertible `S`.
pub fn push_forward(f: &PolyGauss, s: &DenseMatrix) -> Result<PolyGauss> {
    let dim = f.dim();
    if s.nrows() != dim || s.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: s.nrows() });
    }
    let det = matcore::det(s);
    let s_inv = matcore::inverse(s)?;
    let zero = DVector::zeros(dim);
    let mut terms = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        // G_B(S⁻¹y) = |det S| G_{SBSᵀ}(y)
        terms.push(Term::new(
            t.coeff * det.abs(),
            s * &t.center,
            matcore::symmetrize(&(s * &t.shape * s.transpose())),
            t.poly.substitute(&s_inv, &zero),
        )?);
    }
    PolyGauss::new(f.n, terms)
}

/// Frame change through a Darboux matrix: `FromStandard` gives `f(S⁻¹z)`,
/// `ToStandard` gives `f(Sz)`.
pub fn change_frame_pg(f: &PolyGauss, s: &DarbouxMatrix, direction: FrameDirection) -> Result<PolyGauss> {
    if s.target().n() != f.n {
        return Err(Error::FormMismatch);
    }
    match direction {
        FrameDirection::FromStandard => push_forward(f, s.matrix()),
        FrameDirection::ToStandard => push_forward(f, s.inverse()),
    }
}

/// `(f ⊗ g)(x_f, x_g, p_f, p_g) = f(x_f, p_f) g(x_g, p_g)`.
pub fn tensor(f: &PolyGauss, g: &PolyGauss) -> Result<PolyGauss> {
    let (n1, n2) = (f.n, g.n);
    let n = n1 + n2;
    let map_f: Vec<usize> = (0..n1).chain(n..n + n1).collect();
    let map_g: Vec<usize> = (n1..n).chain(n + n1..2 * n).collect();
    let mut terms = Vec::new();
    for a in &f.terms {
        for b in &g.terms {
            let mut center = DVector::zeros(2 * n);
            let mut shape = DMatrix::zeros(2 * n, 2 * n);
            for (i, &pi) in map_f.iter().enumerate() {
                center[pi] = a.center[i];
                for (j, &pj) in map_f.iter().enumerate() {
                    shape[(pi, pj)] = a.shape[(i, j)];
                }
            }
            for (i, &pi) in map_g.iter().enumerate() {
                center[pi] = b.center[i];
                for (j, &pj) in map_g.iter().enumerate() {
                    shape[(pi, pj)] = b.shape[(i, j)];
                }
            }
            let poly = a.poly.embed(2 * n, &map_f).mul(&b.poly.embed(2 * n, &map_g));
            terms.push(Term::new(a.coeff * b.coeff, center, shape, poly)?);
        }
    }
    PolyGauss::new(n, terms)
}

/// `(f ⋆ g)(z) = ∫ f(z − z′) g(z′) dz′`, exactly.
pub fn convolve(f: &PolyGauss, g: &PolyGauss) -> Result<PolyGauss> {
    f.check_modes(g)?;
    let dim = f.dim();
    let degree = f.degree() + g.degree();
    if degree > DEGREE_BUDGET {
        return Err(Error::DegreeBudgetExceeded { degree, budget: DEGREE_BUDGET });
    }
    let id = DMatrix::<f64>::identity(dim, dim);
    let zero = DVector::zeros(dim);
    let mut terms = Vec::with_capacity(f.terms.len() * g.terms.len());
    for a in &f.terms {
        for b in &g.terms {
            // G_{B₁}(u − v) G_{B₂}(v) = G_{B₁+B₂}(u) G_C(v − B₂(B₁+B₂)⁻¹u)
            let sum = matcore::symmetrize(&(&a.shape + &b.shape));
            let sum_inv = matcore::inverse(&sum)?;
            let k1 = &a.shape * &sum_inv;
            let k2 = &b.shape * &sum_inv;
            let c = matcore::symmetrize(&(&a.shape - &k1 * &a.shape));
            let mut l1 = DMatrix::zeros(dim, 2 * dim);
            l1.view_mut((0, 0), (dim, dim)).copy_from(&k1);
            l1.view_mut((0, dim), (dim, dim)).copy_from(&(-&id));
            let mut l2 = DMatrix::zeros(dim, 2 * dim);
            l2.view_mut((0, 0), (dim, dim)).copy_from(&k2);
            l2.view_mut((0, dim), (dim, dim)).copy_from(&id);
            let joint = a.poly.substitute(&l1, &zero).mul(&b.poly.substitute(&l2, &zero));
            let mut poly = joint.integrate_tail(dim, &c);
            poly.prune(1e-15);
            terms.push(Term::new(a.coeff * b.coeff, &a.center + &b.center, sum, poly)?);
        }
    }
    PolyGauss::new(f.n, terms)
}

fn gaussian_density(cov: &DenseMatrix, x: &DVector<f64>) -> Result<f64> {
    let dim = x.len() as f64;
    let inv = matcore::inverse(cov)?;
    Ok((-0.5 * x.dot(&(inv * x))).exp() / ((2.0 * PI).powf(dim / 2.0) * matcore::det(cov).sqrt()))
}

/// `∫ f g dz`, exactly.
pub fn overlap(f: &PolyGauss, g: &PolyGauss) -> Result<f64> {
    f.check_modes(g)?;
    let dim = f.dim();
    let id = DMatrix::<f64>::identity(dim, dim);
    let mut total = 0.0;
    for a in &f.terms {
        for b in &g.terms {
            let delta = &b.center - &a.center;
            let sum = matcore::symmetrize(&(&a.shape + &b.shape));
            let sum_inv = matcore::inverse(&sum)?;
            let c = matcore::symmetrize(&(&a.shape * &sum_inv * &b.shape));
            let m = &a.shape * &sum_inv * &delta;
            let pa = a.poly.substitute(&id, &m);
            let pb = b.poly.substitute(&id, &(&m - &delta));
            let e = pa.mul(&pb).expectation(&c);
            total += a.coeff * b.coeff * gaussian_density(&sum, &delta)? * e;
        }
    }
    Ok(total)
}

/// Plain Fourier transform `F(f)(a) = ∫ f(z) e^{−i z·a} dz`, precomputed for
/// repeated evaluation.
pub struct FourierTransform {
    terms: Vec<(f64, DVector<f64>, DenseMatrix, Poly)>,
}

impl FourierTransform {
    pub fn new(f: &PolyGauss) -> Self {
        let terms = f.terms.iter().map(|t| (t.coeff, t.center.clone(), t.shape.clone(), t.smoothed())).collect();
        Self { terms }
    }

    /// `Σ c e^{−i a·m} e^{−½ aᵀBa} E[P(−iBa + W)]`.
    pub fn eval(&self, a: &DVector<f64>) -> Complex<f64> {
        let mut total = Complex::new(0.0, 0.0);
        for (c, m, b, smooth) in &self.terms {
            let ba = b * a;
            let envelope = (-0.5 * a.dot(&ba)).exp();
            if envelope == 0.0 {
                continue;
            }
            let arg: Vec<Complex<f64>> = ba.iter().map(|v| Complex::new(0.0, -v)).collect();
            let phase = Complex::from_polar(1.0, -a.dot(m));
            total += phase * smooth.eval_complex(&arg) * (c * envelope);
        }
        total
    }
}

pub fn fourier(f: &PolyGauss, a: &DVector<f64>) -> Complex<f64> {
    FourierTransform::new(f).eval(a)
}

/// Symplectic Fourier transform `(2π)⁻ⁿ ∫ e^{−iω(z, z′)} f(z′) dz′`, the plain
/// transform evaluated at `−Ω⁻¹ z`.
pub fn symplectic_fourier(f: &PolyGauss, form: &Form, z: &DVector<f64>) -> Complex<f64> {
    let a = -(form.omega_inv() * z);
    fourier(f, &a) / (2.0 * PI).powi(f.n as i32)
}

#[derive(Serialize, Deserialize)]
struct MonomialRepr {
    exponent: Vec<u8>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: f64,
    center: Vec<f64>,
    shape: Vec<Vec<f64>>,
    poly: Vec<MonomialRepr>,
}

#[derive(Serialize, Deserialize)]
struct PolyGaussRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl From<PolyGauss> for PolyGaussRepr {
    fn from(f: PolyGauss) -> Self {
        let terms = f
            .terms
            .iter()
            .map(|t| TermRepr {
                coeff: t.coeff,
                center: t.center.iter().copied().collect(),
                shape: t.shape.row_iter().map(|r| r.iter().copied().collect()).collect(),
                poly: t.poly.terms().map(|(e, c)| MonomialRepr { exponent: e.clone(), coef: *c }).collect(),
            })
            .collect();
        Self { n: f.n, terms }
    }
}

impl TryFrom<PolyGaussRepr> for PolyGauss {
    type Error = Error;

    fn try_from(r: PolyGaussRepr) -> Result<Self> {
        let dim = 2 * r.n;
        let mut terms = Vec::with_capacity(r.terms.len());
        for t in r.terms {
            if t.shape.len() != dim || t.shape.iter().any(|row| row.len() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, got: t.shape.len() });
            }
            if t.poly.iter().any(|m| m.exponent.len() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, got: t.center.len() });
            }
            let shape = DMatrix::from_fn(dim, dim, |i, j| t.shape[i][j]);
            let poly = Poly::from_terms(dim, t.poly.into_iter().map(|m| (m.exponent, m.coef)));
            terms.push(Term::new(t.coeff, DVector::from_vec(t.center), shape, poly)?);
        }
        Self::new(r.n, terms)
    }
}
