//! Shared numerical kernels.

pub mod fourier;
pub mod lattice;
pub mod quadrature;
pub mod roots;

pub use fourier::{fft_in_place, shift_periodic, to_momentum, to_position, FftDirection, FftPlan};
pub use lattice::{truncation_for, SeriesTruncation};
pub use quadrature::{integrate, integrate_segments, QuadratureSpec};
pub use roots::bisect;
