//! Volume-integral solvers for acoustic and elastic scattering by
//! penetrable media, together with the singular-source probe that recovers
//! the scatterer boundary and the boundary value of the material contrast
//! from the logarithmic blow-up of a near-boundary indicator.
//!
//! Modules:
//! - [`geometry`]: implicit scatterer shapes, normals, probe paths
//! - [`acoustic`]: Helmholtz kernels and the acoustic forward solver
//! - [`elastic`]: Kelvin/Kupradze kernels and the elastic forward solver
//! - [`probe`]: the singular-source experiment and the blow-up fit
//! - [`oracle`]: independent references (Mie, Born, half-ball integral,
//!   adaptive singular quadrature, finite differences)

pub mod acoustic;
pub mod conv;
pub mod elastic;
pub mod error;
pub mod fft;
pub mod geometry;
pub mod gmres;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod probe;
pub mod quadrature;
pub mod sphere;

pub use error::{Error, Result};
