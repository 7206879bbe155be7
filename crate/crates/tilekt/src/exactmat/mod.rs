//! Exact arbitrary-precision integer matrix algebra: Smith normal form and
//! presentations of kernels, images, cokernels and subquotients with explicit
//! change-of-basis maps.
//!
//! Everything here is a pure function over immutable values; no floating
//! point arithmetic occurs anywhere in this module.

mod matrix;
mod present;
mod snf;
mod spectral;

pub use matrix::{IntMatrix, RatMatrix};
pub use present::{
    check_well_defined, cokernel, induced_endo, induced_map, image_embedding, kernel_embedding,
    normalize_reduced, rank, subquotient_ker_over_im, PresentError, PresentedGroup,
};
pub use snf::{snf, SmithDecomposition};
pub use spectral::{char_poly, int_poly_div_exact, min_poly, spectral_scan, IntPoly, SpectralScan};
