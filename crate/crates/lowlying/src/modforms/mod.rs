//! Exact modular-form data: q-expansions, the cusp space for `SL_2(Z)`,
//! Hecke operators, eigenforms, `L(1, sym^2 f)` and the level 11 fixture.

pub mod cache;
mod eigen;
mod form;
mod level;
pub mod qseries;
mod space;
mod symsq;

pub use eigen::{bareiss_solve, charpoly, eigenforms, exact_eigenvectors, is_squarefree, ExactEigenvector, RESIDUAL_BOUND, SEPARATING_OPERATORS};
pub use form::HeckeEigenform;
pub use level::eta_product_level11;
pub use qseries::QSeries;
pub use space::{dim_cusp, hecke_action, hecke_matrix, victor_miller_basis, CuspSpace};
pub use symsq::{l1_sym2, sym_sq_truncation, SymSqData};
