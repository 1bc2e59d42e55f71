//! Symplectic forms, Darboux matrices, symplectic spectra and the searches
//! built on them.

mod form;
pub mod random;
mod search;
mod spectrum;

pub use form::{
    darboux_factor, darboux_residual, forms_coincide, is_antisymplectic, is_symplectic, make_form, CovMatrix,
    DarbouxMatrix, Form, FormWarning, NormalizedForm, DET_TOL,
};
pub use search::{build_with_eigenvector, find_ratio_matrix, find_separating_matrix, sigma, SEARCH_BUDGET};
pub use spectrum::{
    prescribe_spectrum, symplectic_spectrum, williamson, PrescribedSpectrum, SpectrumResult,
    WilliamsonFactorization, PAIR_TOL,
};
pub(crate) use spectrum::spectrum_for_matrix;
