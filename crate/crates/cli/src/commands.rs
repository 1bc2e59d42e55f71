//! One function per subcommand, each returning its JSON result.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};
use sympwig::gauss::{
    self, classify_report, generate_gaussian_region, is_wigner, nw_interval, ppt_check, purity, GaussianState,
};
use sympwig::matcore::{self, DenseMatrix};
use sympwig::polygauss::{
    self, fock_product, generate_nongaussian_region, grid_min, klm_check, klm_escalate, sample_grid, Certificate,
    KlmPoints,
};
use sympwig::sympl::{
    self, darboux_factor, find_ratio_matrix, find_separating_matrix, is_antisymplectic, is_symplectic,
    prescribe_spectrum, symplectic_spectrum, CovMatrix, Form, FormWarning,
};
use sympwig::{PolyGauss, RegionLabel};

use crate::doc::{self, load_cov, load_function, load_map, load_mean, polygauss_document, rows, vec_of, FormArg, MatrixDocument, MatrixKind};
use crate::error::CliError;
use crate::FixtureKind;

type Out = Result<Value, CliError>;

fn cov_doc(m: &DenseMatrix) -> Value {
    MatrixDocument::to_value(m, MatrixKind::Covariance)
}

fn form_doc(m: &DenseMatrix) -> Value {
    MatrixDocument::to_value(m, MatrixKind::Form)
}

/// Mode count shared by two form arguments, if either is a file.
fn pair_modes(a: &FormArg, b: &FormArg) -> Result<Option<usize>, CliError> {
    Ok(match a.mode_count()? {
        Some(n) => Some(n),
        None => b.mode_count()?,
    })
}

pub fn spectrum(cov: &Path, form: &FormArg, tol: f64) -> Out {
    let a = load_cov(cov)?;
    let form = form.form(Some(a.n()))?;
    let s = symplectic_spectrum(&a, &form)?;
    let l1 = s.lambda1();
    Ok(json!({ "spectrum": s.values, "lambda1": l1, "wigner": l1 >= 0.5 - tol }))
}

pub fn williamson(cov: &Path, form: &FormArg) -> Out {
    let a = load_cov(cov)?;
    let form = form.form(Some(a.n()))?;
    let w = sympl::williamson(&a, &form)?;
    Ok(json!({
        "d": w.d,
        "s": rows(w.s.matrix()),
        "residual": w.residual(&a),
        "darboux_residual": w.s.residual(),
    }))
}

pub fn darboux(form: &FormArg, n: Option<usize>) -> Out {
    let nf = form.load(n)?;
    let s = darboux_factor(&nf.form)?;
    let warning = nf.warning.map(|w| match w {
        FormWarning::NontrivialFormAtN1 => "NontrivialFormAtN1",
    });
    Ok(json!({
        "form": form_doc(nf.form.omega()),
        "scale": nf.scale,
        "warning": warning,
        "s": rows(s.matrix()),
        "residual": s.residual(),
    }))
}

pub fn verify(map: &Path, form: &FormArg, tol: f64) -> Out {
    let m = load_map(map)?;
    let form = form.form(Some(m.nrows() / 2))?;
    Ok(json!({
        "symplectic": is_symplectic(&m, &form, tol)?,
        "antisymplectic": is_antisymplectic(&m, &form, tol)?,
        "det": matcore::det(&m),
    }))
}

fn state_from(cov_path: &Path, form: &FormArg) -> Result<GaussianState, CliError> {
    let a = load_cov(cov_path)?;
    let form = form.form(Some(a.n()))?;
    let mean = load_mean(cov_path, a.dim())?;
    Ok(GaussianState::new(mean, a, form)?)
}

pub fn nw(cov: &Path, form: &FormArg, tol: f64) -> Out {
    let state = state_from(cov, form)?;
    let interval = nw_interval(&state)?;
    let (wigner, l1) = is_wigner(&state, tol)?;
    Ok(json!({
        "interval": [interval.lo, interval.hi],
        "lambda1": l1,
        "wigner": wigner,
        "purity": purity(&state),
    }))
}

pub fn classify(state: &Path, form1: &FormArg, form2: &FormArg, tol: f64, seed: u64) -> Out {
    let v = doc::read_json(state)?;
    if v.get("kind").and_then(Value::as_str) == Some("polygauss") {
        let f = load_function(state)?;
        let n = Some(f.n());
        let (f1, f2) = (form1.form(n)?, form2.form(n)?);
        return classify_function(&v, &f, &f1, &f2, tol, seed);
    }
    let a = load_cov(state)?;
    let n = Some(a.n());
    let (f1, f2) = (form1.form(n)?, form2.form(n)?);
    let r = classify_report(&a, &f1, &f2)?;
    Ok(json!({
        "label": r.label.to_string(),
        "lambda1_form1": r.lambda1_form1,
        "lambda1_form2": r.lambda1_form2,
        "interval_form1": [r.interval_form1.lo, r.interval_form1.hi],
        "interval_form2": [r.interval_form2.lo, r.interval_form2.hi],
        "nonnegative": true,
    }))
}

fn dmat(rows: &[Vec<f64>]) -> Result<DenseMatrix, CliError> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::validation("MalformedDocument", "certificate matrix is not square"));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

/// Recomputes the evidence of a generated non-Gaussian certificate.
fn classify_function(v: &Value, f: &PolyGauss, f1: &Form, f2: &Form, tol: f64, seed: u64) -> Out {
    let cert: Certificate = serde_json::from_value(v.get("certificate").cloned().unwrap_or(Value::Null))
        .map_err(|e| CliError::validation("MalformedDocument", format!("certificate: {e}")))?;
    match cert {
        Certificate::A1(c) => {
            let own_is_first = c.label == "A1";
            let (own, other) = if own_is_first { (f1, f2) } else { (f2, f1) };
            let point = DVector::from_vec(c.negativity_point.clone());
            let value = f.eval(&point);
            let witness_overlap = polygauss::overlap(f, &c.witness)?;
            let cov = CovMatrix::new(dmat(&c.gaussian_component_cov)?)?;
            let lambda_own = symplectic_spectrum(&cov, own)?.lambda1();
            let lambda_other = symplectic_spectrum(&cov, other)?.lambda1();
            let gaussian = polygauss::gaussian_pg(&GaussianState::centered(cov, own.clone())?);
            let rebuilt = c.fock_component.mix(&gaussian, c.weights[0])?;
            let probes = [point.clone(), DVector::zeros(f.dim()), DVector::from_vec(c.translation.clone())];
            let mismatch = probes.iter().map(|z| (rebuilt.eval(z) - f.eval(z)).abs()).fold(0.0, f64::max);
            let in_own = lambda_own >= 0.5 - tol && mismatch <= 1e-9 && (0.0..=1.0).contains(&c.weights[0]);
            let in_other = witness_overlap >= -tol;
            let nonneg = value >= -tol;
            let (in1, in2) = if own_is_first { (in_own, in_other) } else { (in_other, in_own) };
            let label = RegionLabel::from_membership(in1, in2, nonneg).map(|l| l.to_string());
            Ok(json!({
                "label": label,
                "nonnegative": nonneg,
                "in_form1": in1,
                "in_form2": in2,
                "negativity_value": value,
                "witness_overlap": witness_overlap,
                "mixture_mismatch": mismatch,
                "gaussian_component_lambda1_own": lambda_own,
                "gaussian_component_lambda1_other": lambda_other,
            }))
        }
        Certificate::A4(c) => {
            let point = DVector::from_vec(c.negativity_point.clone());
            let value = f.eval(&point);
            let a = CovMatrix::new(dmat(&c.cov)?)?;
            let reduced = Form::new(dmat(&c.reduced_form)?)?;
            let sigma2 = Form::new(dmat(&c.sigma2)?)?;
            let l_reduced = symplectic_spectrum(&a, &reduced)?.lambda1();
            let l_sigma2 = symplectic_spectrum(&a, &sigma2)?.lambda1();
            let points = KlmPoints::Sampled { count: c.klm_points.max(1), seed };
            let k1 = klm_check(f, 1.0, f1.omega(), &points, 1e-9)?;
            let k2 = klm_check(f, 1.0, f2.omega(), &points, 1e-9)?;
            let decompositions_ok =
                c.standard_decomposition.result_residual <= 1e-8 && c.form_decomposition.result_residual <= 1e-8;
            let conditions = (l_reduced - (c.alpha0 - 1.0)).abs() <= 1e-8 * c.alpha0
                && l_sigma2 >= c.required_lambda1_sigma2 * (1.0 - 1e-9)
                && c.alpha0 < 2.0
                && decompositions_ok;
            let in1 = conditions && k1.verdict;
            let in2 = conditions && k2.verdict;
            let nonneg = value >= -tol;
            let label = RegionLabel::from_membership(in1, in2, nonneg).map(|l| l.to_string());
            Ok(json!({
                "label": label,
                "nonnegative": nonneg,
                "in_form1": in1,
                "in_form2": in2,
                "negativity_value": value,
                "lambda1_reduced_form": l_reduced,
                "lambda1_sigma2": l_sigma2,
                "required_lambda1_sigma2": c.required_lambda1_sigma2,
                "klm_min_eig_form1": k1.min_eig,
                "klm_min_eig_form2": k2.min_eig,
            }))
        }
    }
}

pub fn ppt(cov: &Path, split: usize, tol: f64) -> Out {
    let a = load_cov(cov)?;
    let mean = load_mean(cov, a.dim())?;
    let state = GaussianState::new(mean, a.clone(), Form::standard(a.n()))?;
    let (sep, l1) = ppt_check(&state, split, tol)?;
    Ok(json!({ "separable_necessary": sep, "lambda1_ppt": l1 }))
}

pub fn transform(cov: &Path, map: &Path, form: &FormArg, tol: f64) -> Out {
    let state = state_from(cov, form)?;
    let m = load_map(map)?;
    let (image, r) = gauss::transform(&state, &m, tol)?;
    Ok(json!({
        "covariance": cov_doc(image.cov.matrix()),
        "mean": vec_of(&image.mean),
        "induced_form": form_doc(r.induced_form.omega()),
        "alpha": r.alpha,
        "m_symplectic": r.m_symplectic,
        "m_antisymplectic": r.m_antisymplectic,
        "lambda1_form1": r.lambda1_form1,
        "lambda1_form2": r.lambda1_form2,
        "lambda1_image_form1": r.lambda1_image_form1,
        "lambda1_image_form2": r.lambda1_image_form2,
        "still_wigner_on_form1": r.still_wigner_on_form1,
        "wigner_on_form2": r.wigner_on_form2,
        "image_wigner_on_form2": r.image_wigner_on_form2,
    }))
}

fn emit(v: Value, out: Option<&Path>) -> Out {
    if let Some(path) = out {
        doc::write_atomic(path, doc::render(&v).as_bytes())?;
    }
    Ok(v)
}

pub fn generate(region: RegionLabel, form1: &FormArg, form2: &FormArg, seed: u64, out: Option<&Path>) -> Out {
    let n = pair_modes(form1, form2)?;
    let (f1, f2) = (form1.form(n)?, form2.form(n)?);
    let v = if region.is_gaussian_reachable() {
        let state = generate_gaussian_region(region, &f1, &f2, seed)?;
        json!({
            "kind": "gaussian",
            "region": region.to_string(),
            "covariance": cov_doc(state.cov.matrix()),
            "mean": vec_of(&state.mean),
            "form": form_doc(f1.omega()),
        })
    } else {
        let (f, cert) = generate_nongaussian_region(region, &f1, &f2, seed)?;
        json!({
            "kind": "polygauss",
            "region": region.to_string(),
            "function": f,
            "certificate": cert,
        })
    };
    emit(v, out)
}

pub fn klm(function: &Path, alpha: f64, sigma: &FormArg, points: usize, escalate: bool, seed: u64, tol: f64) -> Out {
    let f = load_function(function)?;
    let sigma = sigma.form(Some(f.n()))?;
    let report = if escalate {
        klm_escalate(&f, alpha, sigma.omega(), seed, points, tol)?
    } else {
        klm_check(&f, alpha, sigma.omega(), &KlmPoints::Sampled { count: points, seed }, tol)?
    };
    Ok(json!({
        "alpha": report.alpha,
        "min_eig": report.min_eig,
        "scale": report.scale,
        "verdict": report.verdict,
        "points": report.points.iter().map(vec_of).collect::<Vec<_>>(),
    }))
}

pub fn convolve(f: &Path, g: &Path, out: Option<&Path>) -> Out {
    let h = polygauss::convolve(&load_function(f)?, &load_function(g)?)?;
    emit(polygauss_document(&h), out)
}

pub fn overlap(f: &Path, g: &Path) -> Out {
    Ok(json!({ "overlap": polygauss::overlap(&load_function(f)?, &load_function(g)?)? }))
}

pub fn grid(function: &Path, out: &Path, per_axis: usize, box_sigmas: f64) -> Out {
    let f = load_function(function)?;
    let samples = sample_grid(&f, box_sigmas, per_axis)?;
    doc::write_atomic(out, doc::grid_csv(&samples).as_bytes())?;
    let (idx, sample_min) = samples
        .values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    let mut v = json!({
        "file": out.display().to_string(),
        "axes": samples.axes.iter().map(|a| json!({ "min": a.min, "max": a.max, "count": a.count })).collect::<Vec<_>>(),
        "samples": samples.values.len(),
        "sample_min": sample_min,
        "sample_argmin": samples.coords(idx),
    });
    if per_axis >= 8 {
        let refined = grid_min(&f, box_sigmas, per_axis)?;
        v["min"] = json!(refined.value);
        v["argmin"] = json!(vec_of(&refined.argmin));
    }
    Ok(v)
}

pub fn ratio(form1: &FormArg, form2: &FormArg, k: f64, seed: u64) -> Out {
    let n = pair_modes(form1, form2)?;
    let (f1, f2) = (form1.form(n)?, form2.form(n)?);
    let a = find_ratio_matrix(&f1, &f2, k, seed)?;
    let s1 = symplectic_spectrum(&a, &f1)?;
    let s2 = symplectic_spectrum(&a, &f2)?;
    Ok(json!({
        "covariance": cov_doc(a.matrix()),
        "spectrum_form1": s1.values,
        "spectrum_form2": s2.values,
        "ratio": s1.lambda1() / s2.lambda1(),
    }))
}

pub fn separate(form1: &FormArg, form2: &FormArg, seed: u64) -> Out {
    let n = pair_modes(form1, form2)?;
    let (f1, f2) = (form1.form(n)?, form2.form(n)?);
    let a = find_separating_matrix(&f1, &f2, seed)?;
    Ok(json!({
        "covariance": cov_doc(a.matrix()),
        "spectrum_form1": symplectic_spectrum(&a, &f1)?.values,
        "spectrum_form2": symplectic_spectrum(&a, &f2)?.values,
    }))
}

pub fn prescribe(cov: &Path, lambdas: &[f64]) -> Out {
    let a = load_cov(cov)?;
    let p = prescribe_spectrum(&a, lambdas)?;
    Ok(json!({
        "p": rows(&p.p),
        "form": form_doc(p.delta.omega()),
        "form_raw": rows(&p.delta_raw),
        "scale": p.scale,
        "spectrum_raw": p.spectrum_raw,
        "spectrum_normalized": p.spectrum_normalized,
    }))
}

pub fn fock(m: &[usize], hbar: f64, out: Option<&Path>) -> Out {
    emit(polygauss_document(&fock_product(m, hbar)?), out)
}

pub fn fixture(kind: FixtureKind, n: usize, r: f64, a: f64, b: f64, theta: f64) -> Out {
    if n == 0 {
        return Err(CliError::validation("InvalidArgument", "n must be positive"));
    }
    Ok(match kind {
        FixtureKind::StandardForm => form_doc(&matcore::standard_j(n)),
        FixtureKind::TwoScaleForm => {
            let mut om = DMatrix::zeros(4, 4);
            om[(0, 2)] = theta;
            om[(2, 0)] = -theta;
            om[(1, 3)] = 1.0 / theta;
            om[(3, 1)] = -1.0 / theta;
            form_doc(&om)
        }
        FixtureKind::DiagonalCov => cov_doc(&DMatrix::from_diagonal(&DVector::from_vec(vec![a, a, b, b]))),
        FixtureKind::Squeezed => cov_doc(gauss::two_mode_squeezed(r).matrix()),
        FixtureKind::Vacuum => cov_doc(&(DMatrix::identity(2 * n, 2 * n) * 0.5)),
    })
}
