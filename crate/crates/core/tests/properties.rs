use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sympwig::gauss::{is_wigner, nw_interval, purity, transform, uncertainty_psd, FrameDirection, GaussianState};
use sympwig::matcore::{self, is_psd_hermitian, HermitianMatrix};
use sympwig::polygauss::{change_frame_pg, fock_product, gaussian_pg, overlap, translate};
use sympwig::sympl::random::{random_form, random_spd, random_symplectic};
use sympwig::sympl::{darboux_factor, is_symplectic, symplectic_spectrum, CovMatrix, DarbouxMatrix, Form};

fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// A random form, covariance and form-symplectic map of moderate condition.
fn instance(seed: u64, n: usize) -> (Form, CovMatrix, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let form = random_form(&mut rng, n);
    let a = random_spd(&mut rng, n, 0.2);
    let s = darboux_factor(&form).unwrap();
    let m = loop {
        let m = s.matrix() * random_symplectic(&mut rng, n) * s.inverse();
        let sv = m.clone().svd(false, false).singular_values;
        if sv.max() / sv.min() <= 1e3 {
            break m;
        }
    };
    (form, a, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_congruence_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let (form, a, m) = instance(seed, n);
        let base = symplectic_spectrum(&a, &form).unwrap().values;
        let moved = symplectic_spectrum(&a.congruence(&m).unwrap(), &form).unwrap().values;
        prop_assert!(max_rel_diff(&base, &moved) <= 1e-8);
    }

    #[test]
    fn spectrum_scales_linearly(seed in any::<u64>(), n in 1usize..=3, mu in prop::sample::select(vec![0.1, 1.0, 7.3])) {
        let (form, a, _) = instance(seed, n);
        let base: Vec<f64> = symplectic_spectrum(&a, &form).unwrap().values.iter().map(|x| x * mu).collect();
        let scaled = symplectic_spectrum(&a.scaled(mu).unwrap(), &form).unwrap().values;
        prop_assert!(max_rel_diff(&base, &scaled) <= 1e-9);
    }

    #[test]
    fn darboux_pushforward_carries_the_standard_spectrum(seed in any::<u64>(), n in 1usize..=3) {
        let (form, a, _) = instance(seed, n);
        let s = darboux_factor(&form).unwrap();
        let pushed = a.congruence(s.matrix()).unwrap();
        let want = symplectic_spectrum(&a, &Form::standard(n)).unwrap().values;
        let got = symplectic_spectrum(&pushed, &form).unwrap().values;
        prop_assert!(max_rel_diff(&want, &got) <= 1e-8);
    }

    #[test]
    fn two_darboux_matrices_differ_by_a_standard_symplectic_map(seed in any::<u64>(), n in 1usize..=3) {
        let (form, _, m) = instance(seed, n);
        let s = darboux_factor(&form).unwrap();
        // m is form-symplectic, so m·S is another Darboux matrix of the same form
        let other = DarbouxMatrix::new(&m * s.matrix(), form.clone()).unwrap();
        let relative = other.inverse() * s.matrix();
        prop_assert!(is_symplectic(&relative, &Form::standard(n), 1e-7).unwrap());
    }

    #[test]
    fn wigner_verdict_matches_the_hermitian_test(seed in any::<u64>(), n in 1usize..=3, target in 0.3f64..0.7) {
        let (form, a, _) = instance(seed, n);
        let a = a.scaled(target / symplectic_spectrum(&a, &form).unwrap().lambda1()).unwrap();
        let st = GaussianState::centered(a.clone(), form.clone()).unwrap();
        let (spectral, _) = is_wigner(&st, 1e-9).unwrap();
        let (hermitian, _) = uncertainty_psd(&a, form.omega(), 1.0, 1e-9).unwrap();
        prop_assert_eq!(spectral, hermitian);
    }

    #[test]
    fn hermitian_psd_verdict_is_monotone(seed in any::<u64>(), n in 1usize..=3, eps in 1e-6f64..1.0) {
        let (form, a, _) = instance(seed, n);
        let im = form.omega() * 0.5;
        let h = HermitianMatrix::new(a.matrix().clone(), im.clone()).unwrap();
        let dim = a.dim();
        let shifted = HermitianMatrix::new(a.matrix() + DMatrix::identity(dim, dim) * eps, im).unwrap();
        let (before, _) = is_psd_hermitian(&h, 1e-9);
        let (after, _) = is_psd_hermitian(&shifted, 1e-9);
        prop_assert!(!before || after);
    }

    #[test]
    fn symplectic_transforms_keep_interval_and_purity(seed in any::<u64>(), n in 1usize..=3) {
        let (form, a, m) = instance(seed, n);
        let st = GaussianState::centered(a, form).unwrap();
        let (img, rep) = transform(&st, &m, 1e-9).unwrap();
        prop_assert!(rep.m_symplectic);
        let (i0, i1) = (nw_interval(&st).unwrap(), nw_interval(&img).unwrap());
        prop_assert!((i0.hi - i1.hi).abs() <= 1e-9 * i0.hi.max(1.0));
        prop_assert!((i0.lo + i0.hi).abs() <= 1e-15);
        prop_assert!((purity(&st) - purity(&img)).abs() <= 1e-9);
    }

    #[test]
    fn transform_then_inverse_restores_the_state(seed in any::<u64>(), n in 1usize..=3) {
        let (form, a, m) = instance(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mean = DVector::from_fn(2 * n, |i, _| (i as f64) - 0.5 * n as f64);
        let st = GaussianState::new(mean, a, form).unwrap();
        let general = &m * random_spd(&mut rng, n, 1.0).matrix();
        let (img, _) = transform(&st, &general, 1e-9).unwrap();
        let back_form = GaussianState::new(img.mean.clone(), img.cov.clone(), st.form.clone()).unwrap();
        let inv = matcore::inverse(&general).unwrap();
        let (back, _) = transform(&back_form, &inv, 1e-9).unwrap();
        let scale = st.cov.matrix().norm();
        prop_assert!((back.cov.matrix() - st.cov.matrix()).norm() <= 1e-8 * scale);
        prop_assert!((&back.mean - &st.mean).norm() <= 1e-8);
    }

    #[test]
    fn overlap_is_invariant_under_a_common_frame_change(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = random_form(&mut rng, 1);
        let s = darboux_factor(&form).unwrap();
        let f = fock_product(&[1], 1.0).unwrap();
        let g = translate(
            &gaussian_pg(&GaussianState::centered(random_spd(&mut rng, 1, 0.3), Form::standard(1)).unwrap()),
            &DVector::from_vec(vec![0.3, -0.2]),
        )
        .unwrap();
        let before = overlap(&f, &g).unwrap();
        let fs = change_frame_pg(&f, &s, FrameDirection::FromStandard).unwrap();
        let gs = change_frame_pg(&g, &s, FrameDirection::FromStandard).unwrap();
        let after = overlap(&fs, &gs).unwrap();
        prop_assert!((before - after).abs() <= 1e-10 * before.abs().max(1e-3));
    }
}
