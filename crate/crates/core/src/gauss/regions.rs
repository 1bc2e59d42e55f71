use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GaussianState, NWInterval};
use crate::error::{Error, Result};
use crate::sympl::{find_ratio_matrix, forms_coincide, random::random_spd, symplectic_spectrum, CovMatrix, Form};

/// Tolerance applied to `λ₁ ≥ ½` when sorting states into regions.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// The seven regions cut out of `L¹ ∩ L²` by two Wigner classes `F^{ω₁}`, `F^{ω₂}`
/// and the set `L` of functions with non-negative values:
///
/// | label | `F^{ω₁}` | `F^{ω₂}` | `L` |
/// |-------|----------|----------|-----|
/// | A1    | yes      | no       | no  |
/// | A2    | no       | yes      | no  |
/// | A3    | no       | no       | yes |
/// | A4    | yes      | yes      | no  |
/// | A5    | yes      | no       | yes |
/// | A6    | no       | yes      | yes |
/// | A7    | yes      | yes      | yes |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 7] = [Self::A1, Self::A2, Self::A3, Self::A4, Self::A5, Self::A6, Self::A7];

    /// Membership triple `(in F^{ω₁}, in F^{ω₂}, non-negative)`.
    pub fn membership(self) -> (bool, bool, bool) {
        match self {
            Self::A1 => (true, false, false),
            Self::A2 => (false, true, false),
            Self::A3 => (false, false, true),
            Self::A4 => (true, true, false),
            Self::A5 => (true, false, true),
            Self::A6 => (false, true, true),
            Self::A7 => (true, true, true),
        }
    }

    pub fn from_membership(in1: bool, in2: bool, nonneg: bool) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.membership() == (in1, in2, nonneg))
    }

    pub fn is_gaussian_reachable(self) -> bool {
        self.membership().2
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for RegionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown region label {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyReport {
    pub label: RegionLabel,
    pub lambda1_form1: f64,
    pub lambda1_form2: f64,
    pub interval_form1: NWInterval,
    pub interval_form2: NWInterval,
}

pub fn classify_report(cov: &CovMatrix, f1: &Form, f2: &Form) -> Result<ClassifyReport> {
    let l1 = symplectic_spectrum(cov, f1)?.values[0];
    let l2 = symplectic_spectrum(cov, f2)?.values[0];
    let label = RegionLabel::from_membership(l1 >= 0.5 - BOUNDARY_TOL, l2 >= 0.5 - BOUNDARY_TOL, true)
        .expect("every membership pair with non-negativity has a label");
    Ok(ClassifyReport {
        label,
        lambda1_form1: l1,
        lambda1_form2: l2,
        interval_form1: NWInterval { form: f1.clone(), lo: -2.0 * l1, hi: 2.0 * l1 },
        interval_form2: NWInterval { form: f2.clone(), lo: -2.0 * l2, hi: 2.0 * l2 },
    })
}

/// Region of a centred Gaussian; only A3, A5, A6 and A7 can occur.
pub fn classify(cov: &CovMatrix, f1: &Form, f2: &Form) -> Result<RegionLabel> {
    Ok(classify_report(cov, f1, f2)?.label)
}

fn lambda1(cov: &CovMatrix, form: &Form) -> Result<f64> {
    Ok(symplectic_spectrum(cov, form)?.values[0])
}

/// A centred Gaussian (on `f1`) lying in the requested Gaussian-reachable region.
pub fn generate_gaussian_region(label: RegionLabel, f1: &Form, f2: &Form, seed: u64) -> Result<GaussianState> {
    if f1.n() != f2.n() {
        return Err(Error::DimensionMismatch { expected: f1.dim(), got: f2.dim() });
    }
    let n = f1.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cov = match label {
        RegionLabel::A3 | RegionLabel::A7 => {
            let a = random_spd(&mut rng, n, 0.5);
            let (l1, l2) = (lambda1(&a, f1)?, lambda1(&a, f2)?);
            let mu = if label == RegionLabel::A3 {
                // 0 < μ < 1/(2 λ_max)
                0.5 / (2.0 * l1.max(l2))
            } else {
                // μ ≥ 1/(2 λ_min)
                1.25 / (2.0 * l1.min(l2))
            };
            a.scaled(mu)?
        }
        RegionLabel::A5 | RegionLabel::A6 => {
            if forms_coincide(f1, f2) {
                return Err(Error::FormsCoincide);
            }
            // a wedge 2λ_{big} > μ⁻¹ > 2λ_{small} from a ratio-2 matrix
            let a = if label == RegionLabel::A5 {
                find_ratio_matrix(f1, f2, 2.0, seed)?
            } else {
                find_ratio_matrix(f2, f1, 2.0, seed)?
            };
            let (l1, l2) = (lambda1(&a, f1)?, lambda1(&a, f2)?);
            a.scaled(1.0 / (2.0 * (l1 * l2).sqrt()))?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "region {other} contains no Gaussian; use the non-Gaussian generator"
            )))
        }
    };
    let state = GaussianState::centered(cov, f1.clone())?;
    let got = classify(&state.cov, f1, f2)?;
    if got != label {
        return Err(Error::SearchExhausted(format!("generated state classified as {got}, wanted {label}")));
    }
    Ok(state)
}
