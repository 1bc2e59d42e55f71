//! Constructive searches: prescribed eigenvectors, separating and ratio matrices.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::form::{darboux_factor, forms_coincide, CovMatrix, Form};
use super::spectrum::{doubled_diagonal, symplectic_spectrum};
use crate::error::{Error, Result};
use crate::matcore::{self, DenseMatrix};

/// Candidate budget shared by the separating and ratio searches.
pub const SEARCH_BUDGET: usize = 10_000;

/// `σ(z, z′) = z · J⁻¹ z′`.
pub fn sigma(z: &DVector<f64>, zp: &DVector<f64>) -> f64 {
    let n = z.len() / 2;
    -(z.dot(&(matcore::standard_j(n) * zp)))
}

/// Completes `(e, f)` with `σ(f, e) = 1` to a σ-symplectic matrix whose
/// column 0 is `e` and column `n` is `f`.
fn symplectic_completion(e: &DVector<f64>, f: &DVector<f64>) -> Result<DenseMatrix> {
    let dim = e.len();
    let n = dim / 2;
    let j = matcore::standard_j(n);
    let mut v = DMatrix::zeros(dim, dim);
    v.set_column(0, e);
    v.set_column(n, f);
    if n == 1 {
        return Ok(v);
    }
    // The σ-complement of span{e, f} is the Euclidean complement of span{Je, Jf}.
    let c1 = &j * e;
    let mut c2 = &j * f;
    let q1 = &c1 / c1.norm();
    c2 -= &q1 * q1.dot(&c2);
    let q2 = &c2 / c2.norm();
    let proj = DMatrix::identity(dim, dim) - &q1 * q1.transpose() - &q2 * q2.transpose();
    let eig = matcore::sym_eig(&matcore::symmetrize(&proj))?;
    // eigenvalues ascending: the last dim − 2 span the complement
    let basis = eig.vectors.columns(2, dim - 2).into_owned();
    let gram = matcore::antisymmetrize(&(basis.transpose() * (-&j) * &basis));
    let canon = matcore::skew_canonical(&gram)?;
    for (idx, mu) in canon.mus.iter().enumerate() {
        let a = canon.q.column(2 * idx);
        let b = canon.q.column(2 * idx + 1);
        // σ(Ba/√μ, Bb/√μ) = aᵀ G b / μ = 1, so Ba/√μ plays the role of f.
        let fx = &basis * a / mu.sqrt();
        let ey = &basis * b / mu.sqrt();
        v.set_column(1 + idx, &ey);
        v.set_column(n + 1 + idx, &fx);
    }
    Ok(v)
}

/// A covariance matrix for which `e + i f` is an eigenvector of `i A J⁻¹`
/// with smallest symplectic eigenvalue `|σ(f, e)|`.
pub fn build_with_eigenvector(e: &DVector<f64>, f: &DVector<f64>, extra_lambdas: &[f64]) -> Result<CovMatrix> {
    let dim = e.len();
    if dim % 2 != 0 || dim == 0 || f.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim.max(2), got: f.len() });
    }
    let n = dim / 2;
    if extra_lambdas.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, got: extra_lambdas.len() });
    }
    let s = sigma(f, e);
    if s.abs() < 1e-12 {
        return Err(Error::DegeneratePair(s.abs()));
    }
    let lambda1 = s.abs();
    let mut lambdas = vec![lambda1];
    for &l in extra_lambdas {
        let prev = *lambdas.last().unwrap();
        if !(l.is_finite() && l >= prev * (1.0 - 1e-12)) {
            return Err(Error::BadLambdas(format!(
                "extra lambdas must be ascending and at least |sigma(f, e)| = {lambda1}"
            )));
        }
        lambdas.push(l);
    }
    let f_used = if s < 0.0 { -f } else { f.clone() };
    let root = lambda1.sqrt();
    let v = symplectic_completion(&(e / root), &(f_used / root))?;
    CovMatrix::new(&v * doubled_diagonal(&lambdas) * v.transpose())
}

fn lambda1(a: &CovMatrix, form: &Form) -> Result<f64> {
    Ok(symplectic_spectrum(a, form)?.values[0])
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    &v / v.norm()
}

fn diagonal_candidate(rng: &mut ChaCha8Rng, frame: &DenseMatrix, spread: f64) -> Result<CovMatrix> {
    let dim = frame.nrows();
    let d = DVector::from_fn(dim, |_, _| (spread * rng.sample::<f64, _>(StandardNormal)).exp());
    CovMatrix::new(matcore::symmetrize(&(frame * DMatrix::from_diagonal(&d) * frame.transpose())))
}

/// Pair `(e, f)` in the standard frame with `σ(f, e)` small while the pairing
/// against `Ω′` stays of order one. Returns `(e, f, ‖f₀‖)`.
fn eigenvector_pair(rng: &mut ChaCha8Rng, m: &DenseMatrix, draws: usize) -> (DVector<f64>, DVector<f64>, f64) {
    let dim = m.nrows();
    let j = matcore::standard_j(dim / 2);
    let mut best: Option<(DVector<f64>, DVector<f64>, f64)> = None;
    for _ in 0..draws {
        let e = random_unit(rng, dim);
        let c = j.transpose() * &e;
        let g = m.transpose() * &e;
        let f0 = &g - &c * g.dot(&c);
        let size = f0.norm();
        if best.as_ref().is_none_or(|b| size > b.2) {
            best = Some((e, f0, size));
        }
    }
    best.unwrap()
}

struct RatioSearch<'a> {
    f1: &'a Form,
    f2: &'a Form,
    rng: ChaCha8Rng,
    used: usize,
}

impl RatioSearch<'_> {
    fn ratio(&self, a: &CovMatrix) -> Result<f64> {
        Ok(lambda1(a, self.f1)? / lambda1(a, self.f2)?)
    }

    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > SEARCH_BUDGET {
            return Err(Error::SearchExhausted(format!("no candidate within {SEARCH_BUDGET} trials")));
        }
        Ok(())
    }
}

/// `A` with `λ_{ω₁,1}(A) / λ_{ω₂,1}(A) ≥ k`, normalized to `λ_{ω₁,1}(A) = 1`.
pub fn find_ratio_matrix(f1: &Form, f2: &Form, k: f64, seed: u64) -> Result<CovMatrix> {
    if f1.n() != f2.n() {
        return Err(Error::DimensionMismatch { expected: f1.dim(), got: f2.dim() });
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!("ratio target must be positive, got {k}")));
    }
    if forms_coincide(f1, f2) {
        return Err(Error::FormsCoincide);
    }
    let dim = f1.dim();
    let n = f1.n();
    let mut search = RatioSearch { f1, f2, rng: ChaCha8Rng::seed_from_u64(seed), used: 0 };
    let finish = |a: CovMatrix| -> Result<CovMatrix> {
        let l1 = lambda1(&a, f1)?;
        a.scaled(1.0 / l1)
    };

    let s1 = darboux_factor(f1)?;
    let s2 = darboux_factor(f2)?;
    let s1i = s1.inverse();
    // f1 becomes J, f2 becomes Ω′ = S₁⁻¹ Ω₂ S₁⁻ᵀ
    let omega_red = matcore::antisymmetrize(&(s1i * f2.omega() * s1i.transpose()));
    let j = matcore::standard_j(n);
    let m = &j * omega_red * j.transpose();

    search.spend()?;
    let id = CovMatrix::new(DMatrix::identity(dim, dim))?;
    if search.ratio(&id)? >= k {
        return finish(id);
    }
    // Product frames: diagonals in the canonical frame of either form.
    for round in 0..32 {
        let spread = 0.25 * (1 + round / 4) as f64;
        for frame in [s2.matrix(), s1.matrix()] {
            search.spend()?;
            let a = diagonal_candidate(&mut search.rng, frame, spread)?;
            if search.ratio(&a)? >= k {
                return finish(a);
            }
        }
    }
    loop {
        let (e, f0, size) = eigenvector_pair(&mut search.rng, &m, 16);
        if size < 1e-9 {
            search.spend()?;
            continue;
        }
        let c = j.transpose() * &e;
        let mut eps = size / (2.0 * k);
        for _ in 0..40 {
            search.spend()?;
            let f = &f0 / size + &c * eps;
            let a_red = build_with_eigenvector(&e, &f, &vec![eps; n - 1])?;
            let a = a_red.congruence(s1.matrix())?;
            if let Ok(r) = search.ratio(&a) {
                if r >= k {
                    return finish(a);
                }
            }
            eps *= 0.5;
        }
    }
}

fn spectral_gap(a: &CovMatrix, f1: &Form, f2: &Form) -> Result<(f64, f64)> {
    let s1 = symplectic_spectrum(a, f1)?.values;
    let s2 = symplectic_spectrum(a, f2)?.values;
    let gap = s1.iter().zip(&s2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let top = s1.iter().chain(&s2).copied().fold(0.0, f64::max);
    Ok((gap, top))
}

/// `A` whose symplectic spectra for the two forms differ by more than `1e-6`
/// in max norm.
pub fn find_separating_matrix(f1: &Form, f2: &Form, seed: u64) -> Result<CovMatrix> {
    if f1.n() != f2.n() {
        return Err(Error::DimensionMismatch { expected: f1.dim(), got: f2.dim() });
    }
    if forms_coincide(f1, f2) {
        return Err(Error::FormsCoincide);
    }
    let dim = f1.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s2 = darboux_factor(f2)?;
    let accept = |a: CovMatrix| -> Result<Option<CovMatrix>> {
        let (gap, top) = spectral_gap(&a, f1, f2)?;
        if gap > 1e-6 * top {
            // scale so the spectra are of order one and the gap clears 1e-6
            let scaled = a.scaled(1.0 / top)?;
            if spectral_gap(&scaled, f1, f2)?.0 > 1e-6 {
                return Ok(Some(scaled));
            }
        }
        Ok(None)
    };
    if let Some(a) = accept(CovMatrix::new(DMatrix::identity(dim, dim))?)? {
        return Ok(a);
    }
    for round in 0..64 {
        let a = diagonal_candidate(&mut rng, s2.matrix(), 0.25 * (1 + round / 8) as f64)?;
        if let Some(a) = accept(a)? {
            return Ok(a);
        }
    }
    let a = find_ratio_matrix(f1, f2, 2.0, seed)?;
    accept(a)?.ok_or_else(|| Error::SearchExhausted("ratio matrix did not separate spectra".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympl::random::random_form;
    use nalgebra::Complex;

    fn two_scale_form() -> Form {
        let mut om = DMatrix::zeros(4, 4);
        om[(0, 2)] = 2.0;
        om[(2, 0)] = -2.0;
        om[(1, 3)] = 0.5;
        om[(3, 1)] = -0.5;
        Form::new(om).unwrap()
    }

    /// `A J⁻¹ (e + i f) − c·i (e + i f)` by explicit real arithmetic.
    fn eigen_defect(a: &DenseMatrix, e: &DVector<f64>, f: &DVector<f64>, c: f64) -> f64 {
        let n = e.len() / 2;
        let jinv = -matcore::standard_j(n);
        let u: Vec<Complex<f64>> = e.iter().zip(f.iter()).map(|(x, y)| Complex::new(*x, *y)).collect();
        let mut worst: f64 = 0.0;
        for r in 0..e.len() {
            let mut acc = Complex::new(0.0, 0.0);
            for (k, uk) in u.iter().enumerate() {
                let coeff: f64 = (0..e.len()).map(|m| a[(r, m)] * jinv[(m, k)]).sum();
                acc += uk * coeff;
            }
            let want = Complex::new(0.0, c) * u[r];
            worst = worst.max((acc - want).norm());
        }
        worst
    }

    #[test]
    fn unit_pair_gives_identity() {
        let e = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let f = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(sigma(&f, &e), 1.0);
        let a = build_with_eigenvector(&e, &f, &[1.0]).unwrap();
        assert!((a.matrix() - DMatrix::<f64>::identity(4, 4)).norm() <= 1e-12);
        assert!(eigen_defect(a.matrix(), &e, &f, -1.0) <= 1e-12);
    }

    #[test]
    fn scaled_pair() {
        let e = DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]);
        let f = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        let a = build_with_eigenvector(&e, &f, &[2.0]).unwrap();
        assert!(eigen_defect(a.matrix(), &e, &f, -2.0) <= 1e-12);
        let spec = symplectic_spectrum(&a, &Form::standard(2)).unwrap().values;
        assert!((spec[0] - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn random_pairs_either_orientation() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for n in 1..=4 {
            for _ in 0..25 {
                let e = random_unit(&mut rng, 2 * n);
                let f = random_unit(&mut rng, 2 * n);
                let s = sigma(&f, &e);
                if s.abs() < 1e-3 {
                    continue;
                }
                let l1 = s.abs();
                let extra: Vec<f64> = (1..n).map(|i| l1 * (1.0 + i as f64 * 0.7)).collect();
                let a = build_with_eigenvector(&e, &f, &extra).unwrap();
                let sign = if s > 0.0 { -1.0 } else { 1.0 };
                assert!(eigen_defect(a.matrix(), &e, &f, sign * l1) <= 1e-9);
                let spec = symplectic_spectrum(&a, &Form::standard(n)).unwrap().values;
                assert!((spec[0] - l1).abs() <= 1e-9 * l1.max(1.0));
            }
        }
    }

    #[test]
    fn eigenvector_errors() {
        let e = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let f = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(build_with_eigenvector(&e, &f, &[1.0]), Err(Error::DegeneratePair(_))));
        let f = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(build_with_eigenvector(&e, &f, &[0.5]), Err(Error::BadLambdas(_))));
    }

    fn ratio(a: &CovMatrix, f1: &Form, f2: &Form) -> f64 {
        symplectic_spectrum(a, f1).unwrap().values[0] / symplectic_spectrum(a, f2).unwrap().values[0]
    }

    #[test]
    fn two_scale_diagonal_gives_ratio_two() {
        let a = CovMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0, 3.0, 3.0]))).unwrap();
        assert!((ratio(&a, &Form::standard(2), &two_scale_form()) - 2.0).abs() <= 1e-12);
        let (gap, _) = spectral_gap(&a, &Form::standard(2), &two_scale_form()).unwrap();
        assert!(gap > 1e-6);
    }

    #[test]
    fn ratio_search_on_two_scale_forms() {
        let j = Form::standard(2);
        let om = two_scale_form();
        for k in [2.0, 10.0, 100.0, 1000.0] {
            let a = find_ratio_matrix(&j, &om, k, 0).unwrap();
            assert!(ratio(&a, &j, &om) >= k, "k = {k}");
        }
        assert!(matches!(find_ratio_matrix(&j, &j, 2.0, 0), Err(Error::FormsCoincide)));
        assert!(matches!(find_ratio_matrix(&j, &j.negated(), 2.0, 0), Err(Error::FormsCoincide)));
    }

    #[test]
    fn ratio_search_on_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=3 {
            for trial in 0..10 {
                let f1 = random_form(&mut rng, n);
                let f2 = random_form(&mut rng, n);
                for k in [1.0, 5.0, 50.0] {
                    let a = find_ratio_matrix(&f1, &f2, k, trial).unwrap();
                    assert!(ratio(&a, &f1, &f2) >= k);
                }
            }
        }
    }

    #[test]
    fn separating_search() {
        let j = Form::standard(2);
        assert!(matches!(find_separating_matrix(&j, &j, 0), Err(Error::FormsCoincide)));
        let a = find_separating_matrix(&j, &two_scale_form(), 0).unwrap();
        assert!(spectral_gap(&a, &j, &two_scale_form()).unwrap().0 > 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for trial in 0..20 {
            let f1 = random_form(&mut rng, 2);
            let f2 = random_form(&mut rng, 2);
            let a = find_separating_matrix(&f1, &f2, trial).unwrap();
            assert!(spectral_gap(&a, &f1, &f2).unwrap().0 > 1e-6);
        }
    }
}
