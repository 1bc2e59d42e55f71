use super::*;
use crate::sympl::random::{random_form, random_spd, random_symplectic};
use crate::sympl::{darboux_factor, symplectic_spectrum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn diag(v: &[f64]) -> CovMatrix {
    CovMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(v.to_vec()))).unwrap()
}

fn two_scale_form(theta: f64) -> Form {
    let mut om = DMatrix::zeros(4, 4);
    om[(0, 2)] = theta;
    om[(2, 0)] = -theta;
    om[(1, 3)] = 1.0 / theta;
    om[(3, 1)] = -1.0 / theta;
    Form::new(om).unwrap()
}

fn state(cov: CovMatrix, form: &Form) -> GaussianState {
    GaussianState::centered(cov, form.clone()).unwrap()
}

#[test]
fn wigner_examples() {
    let j = Form::standard(2);
    let (ok, l1) = is_wigner(&state(diag(&[0.5; 4]), &j), 1e-9).unwrap();
    assert!(ok);
    assert!((l1 - 0.5).abs() < 1e-14);

    let cov = diag(&[0.6; 4]);
    let (ok, l1) = is_wigner(&state(cov.clone(), &two_scale_form(2.0)), 1e-9).unwrap();
    assert!(!ok);
    assert!((l1 - 0.3).abs() < 1e-12);
    let (ok, l1) = is_wigner(&state(cov, &j), 1e-9).unwrap();
    assert!(ok);
    assert!((l1 - 0.6).abs() < 1e-12);
}

#[test]
fn wigner_verdict_matches_hermitian_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut seen = [0usize; 2];
    for i in 0..500 {
        let n = 1 + i % 3;
        let a = random_spd(&mut rng, n, 0.05).scaled(rng.random_range(0.1..1.5)).unwrap();
        let f = random_form(&mut rng, n);
        let (verdict, _) = is_wigner(&state(a.clone(), &f), 1e-9).unwrap();
        let (psd, _) = uncertainty_psd(&a, f.omega(), 1.0, 1e-9).unwrap();
        assert_eq!(verdict, psd);
        seen[verdict as usize] += 1;
    }
    assert!(seen[0] > 20 && seen[1] > 20, "{seen:?}");
}

#[test]
fn nw_interval_examples() {
    let s = darboux_factor(&two_scale_form(2.0)).unwrap();
    let minimal = GaussianState::minimal(&s).unwrap();
    let iv = nw_interval(&minimal).unwrap();
    assert!((iv.hi - 1.0).abs() < 1e-9 && (iv.lo + 1.0).abs() < 1e-9);

    let iv = nw_interval(&state(diag(&[1.0; 4]), &Form::standard(2))).unwrap();
    assert!((iv.hi - 2.0).abs() < 1e-12);

    let iv = nw_interval(&state(diag(&[2.0, 2.0, 3.0, 3.0]), &two_scale_form(2.0))).unwrap();
    assert!((iv.hi - 6f64.sqrt()).abs() < 1e-12);
    assert_eq!(iv.lo, -iv.hi);
}

#[test]
fn nw_characterizations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let a = random_spd(&mut rng, n, 0.1);
        let f = random_form(&mut rng, n);
        let st = state(a.clone(), &f);
        let iv = nw_interval(&st).unwrap();
        let l1 = st.lambda1().unwrap();
        for _ in 0..10 {
            let alpha = rng.random_range(-3.0 * iv.hi..3.0 * iv.hi);
            if (alpha.abs() - iv.hi).abs() < 1e-6 * iv.hi {
                continue;
            }
            let by_interval = iv.contains(alpha, 0.0);
            let by_spectrum = l1 >= alpha.abs() / 2.0;
            let (by_matrix, _) = uncertainty_psd(&a, f.omega(), alpha, 1e-10).unwrap();
            assert_eq!(by_interval, by_spectrum);
            assert_eq!(by_interval, by_matrix, "alpha {alpha} interval {:?}", (iv.lo, iv.hi));
        }
    }
}

#[test]
fn nw_scaling_and_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for n in 1..=3 {
        let a = random_spd(&mut rng, n, 0.3);
        let f = random_form(&mut rng, n);
        let base = nw_interval(&state(a.clone(), &f)).unwrap();
        for lam in [0.5, 2.0, 3.7] {
            let dil = nw_interval(&state(a.scaled(1.0 / (lam * lam)).unwrap(), &f)).unwrap();
            assert!((dil.hi - base.hi / (lam * lam)).abs() <= 1e-9 * base.hi);
        }
        let s = darboux_factor(&f).unwrap();
        let p = s.matrix() * random_symplectic(&mut rng, n) * s.inverse();
        let (img, rep) = transform(&state(a.clone(), &f), &p, 1e-8).unwrap();
        assert!(rep.m_symplectic);
        assert!((nw_interval(&img).unwrap().hi - base.hi).abs() <= 1e-9 * base.hi.max(1.0));
        // ω-anti-symplectic: compose with the reflection diag(I, −I) in the σ frame
        let r = DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| if i < n { 1.0 } else { -1.0 }));
        let q = s.matrix() * r * s.inverse();
        let (img, rep) = transform(&state(a.clone(), &f), &q, 1e-8).unwrap();
        assert!(rep.m_antisymplectic);
        assert!((nw_interval(&img).unwrap().hi - base.hi).abs() <= 1e-9 * base.hi.max(1.0));
    }
}

/// `(2π)ⁿ ∫ G_A²` by the trapezoid rule on a cube.
fn purity_by_quadrature(a: &CovMatrix) -> f64 {
    let dim = a.dim();
    let ainv = a.matrix().clone().try_inverse().unwrap();
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).powi(dim as i32 / 2) * a.matrix().determinant().sqrt());
    let half = 7.0 * a.matrix().diagonal().max().sqrt();
    let pts = if dim == 2 { 201 } else { 41 };
    let h = 2.0 * half / (pts - 1) as f64;
    let mut idx = vec![0usize; dim];
    let mut total = 0.0;
    loop {
        let z = DVector::from_fn(dim, |i, _| -half + h * idx[i] as f64);
        let g = norm * (-0.5 * z.dot(&(&ainv * &z))).exp();
        total += g * g;
        let mut k = 0;
        while k < dim {
            idx[k] += 1;
            if idx[k] < pts {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == dim {
            break;
        }
    }
    (2.0 * std::f64::consts::PI).powi(dim as i32 / 2) * total * h.powi(dim as i32)
}

#[test]
fn purity_examples_against_quadrature() {
    let j1 = Form::standard(1);
    let j2 = Form::standard(2);
    assert!((purity(&state(diag(&[0.5; 2]), &j1)) - 1.0).abs() < 1e-14);
    assert!((purity(&state(diag(&[0.5; 4]), &j2)) - 1.0).abs() < 1e-14);

    let cases = [diag(&[1.0; 4]), diag(&[0.5 * 1.7; 4]), diag(&[0.7, 1.1]), two_mode_squeezed(0.3)];
    for cov in cases {
        let form = Form::standard(cov.n());
        let closed = purity(&state(cov.clone(), &form));
        let quad = purity_by_quadrature(&cov);
        assert!((closed - quad).abs() <= 1e-6, "{closed} vs {quad}");
    }
    assert!((purity(&state(diag(&[1.0; 4]), &j2)) - 0.25).abs() < 1e-14);
    let mu: f64 = 1.7;
    assert!((purity(&state(diag(&[0.5 * mu; 4]), &j2)) - mu.powi(-2)).abs() < 1e-14);
}

#[test]
fn frame_changes() {
    let form = two_scale_form(2.0);
    let s = darboux_factor(&form).unwrap();
    let minimal = GaussianState::minimal(&s).unwrap();
    let back = change_frame(&minimal, &s, FrameDirection::ToStandard).unwrap();
    assert!((back.cov.matrix() - DMatrix::identity(4, 4) * 0.5).norm() <= 1e-12);
    assert!(back.form.is_standard());

    let r2 = 2f64.sqrt();
    let witness = DarbouxMatrix::new(
        DMatrix::from_diagonal(&DVector::from_vec(vec![r2, 1.0 / r2, r2, 1.0 / r2])),
        form.clone(),
    )
    .unwrap();
    let st = state(diag(&[2.0, 2.0, 3.0, 3.0]), &form);
    let pulled = change_frame(&st, &witness, FrameDirection::ToStandard).unwrap();
    let want = symplectic_spectrum(&st.cov, &form).unwrap().values;
    let got = symplectic_spectrum(&pulled.cov, &Form::standard(2)).unwrap().values;
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-8);
    }
    assert!((purity(&pulled) - purity(&st)).abs() <= 1e-12);
    assert!(matches!(
        change_frame(&state(diag(&[1.0; 4]), &Form::standard(2)), &witness, FrameDirection::ToStandard),
        Err(Error::FormMismatch)
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for n in 1..=3 {
        let f = random_form(&mut rng, n);
        let s = darboux_factor(&f).unwrap();
        let st = state(random_spd(&mut rng, n, 0.3), &f);
        let pulled = change_frame(&st, &s, FrameDirection::ToStandard).unwrap();
        let pushed = change_frame(&pulled, &s, FrameDirection::FromStandard).unwrap();
        assert!((pushed.cov.matrix() - st.cov.matrix()).norm() <= 1e-9 * st.cov.matrix().norm());
        let a = symplectic_spectrum(&st.cov, &f).unwrap().values;
        let b = symplectic_spectrum(&pulled.cov, &Form::standard(n)).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-8 * x.max(1.0));
        }
    }
}

/// Smallest symplectic eigenvalue of `P A P` for `J`, from `|eig(P A P J⁻¹)|`.
fn brute_force_lambda1(a: &DenseMatrix, p: &DenseMatrix) -> f64 {
    let n = a.nrows() / 2;
    let m = p * a * p * (-matcore::standard_j(n));
    m.complex_eigenvalues().iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
}

#[test]
fn partial_transpose_of_squeezed_state() {
    let j = Form::standard(2);
    let p = partial_transpose_matrix(2, 1).unwrap();
    assert!(!is_symplectic(&p, &j, 1e-9).unwrap());
    assert!(!is_antisymplectic(&p, &j, 1e-9).unwrap());
    for r in [0.0, 0.2, 0.5, 1.0] {
        let st = state(two_mode_squeezed(r), &j);
        let (img, rep) = transform(&st, &p, 1e-9).unwrap();
        let brute = brute_force_lambda1(st.cov.matrix(), &p);
        assert!((rep.lambda1_image_form1 - brute).abs() <= 1e-9);
        assert!((brute - 0.5 * (-2.0 * r).exp()).abs() <= 1e-9);
        assert_eq!(rep.still_wigner_on_form1, r == 0.0);
        assert!((rep.alpha - 1.0).abs() < 1e-12);
        // P is an involution, so the induced form is Ω_PPT and the image is Wigner there
        assert!((rep.induced_form.omega() - ppt_form(2, 1).unwrap().omega()).norm() <= 1e-12);
        assert!(rep.image_wigner_on_form2);
        assert_eq!(rep.wigner_on_form2, r == 0.0);
        assert!(img.cov.matrix().iter().all(|v| v.is_finite()));

        let (sep, l1) = ppt_check(&st, 1, 1e-9).unwrap();
        assert_eq!(sep, r == 0.0);
        let (psd, _) = uncertainty_psd(&st.cov, ppt_form(2, 1).unwrap().omega(), 1.0, 1e-9).unwrap();
        assert_eq!(sep, psd);
        assert!((l1 - 0.5 * (-2.0 * r).exp()).abs() <= 1e-9);
    }
    assert!(matches!(ppt_check(&state(diag(&[0.5; 4]), &j), 0, 1e-9), Err(Error::BadSplit { .. })));
    assert!(matches!(ppt_check(&state(diag(&[0.5; 4]), &j), 2, 1e-9), Err(Error::BadSplit { .. })));
    assert!(matches!(
        ppt_check(&state(diag(&[0.5; 4]), &two_scale_form(2.0)), 1, 1e-9),
        Err(Error::FormMismatch)
    ));
}

#[test]
fn transform_identity_symplectic_and_roundtrip() {
    let j = Form::standard(2);
    let st = GaussianState::new(DVector::from_vec(vec![0.3, -1.0, 2.0, 0.5]), diag(&[0.7; 4]), j.clone()).unwrap();
    let (img, rep) = transform(&st, &DMatrix::identity(4, 4), 1e-9).unwrap();
    assert!(rep.m_symplectic && rep.still_wigner_on_form1 && rep.wigner_on_form2);
    assert!((img.cov.matrix() - st.cov.matrix()).norm() == 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for n in 1..=3 {
        let f = Form::standard(n);
        let a = random_spd(&mut rng, n, 0.6);
        let mean = DVector::from_fn(2 * n, |_, _| rng.random_range(-1.0..1.0));
        let st = GaussianState::new(mean, a, f.clone()).unwrap();
        if !is_wigner(&st, 1e-9).unwrap().0 {
            continue;
        }
        let m = random_symplectic(&mut rng, n);
        let (img, rep) = transform(&st, &m, 1e-8).unwrap();
        assert!(rep.still_wigner_on_form1);
        assert!((purity(&img) - purity(&st)).abs() <= 1e-9);

        let g = crate::sympl::random::gaussian_matrix(&mut rng, 2 * n, 2 * n) + DMatrix::identity(2 * n, 2 * n) * 3.0;
        let (img, _) = transform(&st, &g, 1e-9).unwrap();
        let (back, _) = transform(&img, &g.clone().try_inverse().unwrap(), 1e-9).unwrap();
        assert!((back.cov.matrix() - st.cov.matrix()).norm() <= 1e-10 * st.cov.matrix().norm());
        assert!((back.mean - &st.mean).norm() <= 1e-10);
    }
    assert!(matches!(transform(&st, &DMatrix::zeros(4, 4), 1e-9), Err(Error::Singular(_))));
}

#[test]
fn classify_examples() {
    let j = Form::standard(2);
    let id = diag(&[1.0; 4]);
    let rep = classify_report(&id, &j, &two_scale_form(2.0)).unwrap();
    assert_eq!(rep.label, RegionLabel::A7);
    assert!((rep.lambda1_form2 - 0.5).abs() < 1e-12);
    assert_eq!(classify(&id, &j, &two_scale_form(3.0)).unwrap(), RegionLabel::A5);
    assert_eq!(classify(&diag(&[0.1; 4]), &j, &two_scale_form(2.0)).unwrap(), RegionLabel::A3);
    assert_eq!(classify(&diag(&[0.9; 4]), &j, &two_scale_form(2.0)).unwrap(), RegionLabel::A5);
    assert_eq!(classify(&diag(&[2.0; 4]), &j, &two_scale_form(2.0)).unwrap(), RegionLabel::A7);
    assert_eq!(classify(&diag(&[0.9; 4]), &two_scale_form(2.0), &j).unwrap(), RegionLabel::A6);
}

#[test]
fn classify_is_monotone_in_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..50 {
        let n = rng.random_range(1..=3);
        let a = random_spd(&mut rng, n, 0.2);
        let (f1, f2) = (random_form(&mut rng, n), random_form(&mut rng, n));
        let mut prev = (false, false);
        for k in 0..40 {
            let mu = 0.05 * 1.2f64.powi(k);
            let (in1, in2, _) = classify(&a.scaled(mu).unwrap(), &f1, &f2).unwrap().membership();
            assert!(in1 >= prev.0 && in2 >= prev.1);
            prev = (in1, in2);
        }
    }
}

#[test]
fn gaussian_region_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let mut pairs = vec![(Form::standard(2), two_scale_form(2.0))];
    for n in 1..=3 {
        pairs.push((random_form(&mut rng, n), random_form(&mut rng, n)));
    }
    for (f1, f2) in &pairs {
        for label in [RegionLabel::A3, RegionLabel::A5, RegionLabel::A6, RegionLabel::A7] {
            if f1.n() == 1 && matches!(label, RegionLabel::A5 | RegionLabel::A6) {
                assert!(matches!(generate_gaussian_region(label, f1, f2, 0), Err(Error::FormsCoincide)));
                continue;
            }
            for seed in 0..3 {
                let st = generate_gaussian_region(label, f1, f2, seed).unwrap();
                assert_eq!(classify(&st.cov, f1, f2).unwrap(), label);
            }
        }
    }
    let j = Form::standard(2);
    assert!(matches!(generate_gaussian_region(RegionLabel::A5, &j, &j, 0), Err(Error::FormsCoincide)));
    assert!(matches!(generate_gaussian_region(RegionLabel::A1, &j, &two_scale_form(2.0), 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn region_labels_round_trip() {
    for l in RegionLabel::ALL {
        assert_eq!(l.to_string().parse::<RegionLabel>().unwrap(), l);
    }
    assert!("A8".parse::<RegionLabel>().is_err());
}

#[test]
fn nw_combination_examples() {
    let j = matcore::standard_j(2);
    let a0 = 1.3;
    let c = nw_combine(&NWPoint::new(1.0 - a0, j.clone()).unwrap(), &NWPoint::new(a0, j.clone()).unwrap()).unwrap();
    assert!((c.alpha - 1.0).abs() < 1e-12 && (&c.sigma - &j).norm() < 1e-12);

    let om = two_scale_form(2.0).omega().clone();
    let gamma0 = (&j - &om * a0).determinant();
    assert!(gamma0 > 0.0);
    let root = gamma0.powf(0.25);
    let sigma2 = (&j - &om * a0) / root;
    let c = nw_combine(&NWPoint::new(root, sigma2).unwrap(), &NWPoint::new(a0, om.clone()).unwrap()).unwrap();
    assert!((c.alpha - 1.0).abs() < 1e-12 && (&c.sigma - &j).norm() < 1e-12);

    let c = nw_combine(&NWPoint::new(1.0, j.clone()).unwrap(), &NWPoint::new(0.0, om).unwrap()).unwrap();
    assert!((c.alpha - 1.0).abs() < 1e-12 && (&c.sigma - &j).norm() < 1e-12);

    let degenerate = nw_combine(&NWPoint::new(1.0, j.clone()).unwrap(), &NWPoint::new(-1.0, j).unwrap());
    assert!(matches!(degenerate, Err(Error::DegenerateCombination(_))));
}
