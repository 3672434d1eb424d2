//! Special functions, quadrature and test functions.

pub mod bessel;
pub mod gamma;
pub mod quad;
pub mod series;
pub mod testfn;
pub mod vh;
pub mod window;

pub use bessel::{bessel_j, bessel_j_all};
pub use gamma::{digamma, digamma_complex, ln_gamma};
pub use series::{bessel_series_check, vh_oscillatory_term, digamma_arch_term, BesselSeriesReport, SeriesKind};
pub use testfn::{make_sinc_sq, SincSq, TestFunction, TestFunctionSpec, TrigTerm};
pub use vh::{vh_plane_integral, PlaneIntegral, VhTransform};
pub use window::SmoothWindow;
