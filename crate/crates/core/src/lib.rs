//! Quantum search on the `2n × 2n` torus with the staggered quantum walk
//! with Hamiltonians.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: torus geometry and the four-tessellation cover;
//! * [`walk`]: matrix-free evolution, oracle and state vectors;
//! * [`dense`]: dense-matrix oracles for small lattices;
//! * [`spectral`]: momentum-space eigenbasis of the unmarked evolution;
//! * [`asymptotics`]: the search eigenphase `λ`, `C²` and the run-time model;
//! * [`experiments`] and [`emit`]: sweeps, fits and CSV/JSON output.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod asymptotics;
pub mod dense;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod scalar;
pub mod spectral;
pub mod walk;

pub use error::{Error, Result};
pub use lattice::{build_tessellation, edge_cover_check, Label, LatticeSpec, Polygon, Tessellation, Vertex};
pub use scalar::{Cplx, Real};
pub use walk::{GlobalSign, Ordering};

pub type Complex64 = Cplx<f64>;
pub type State = walk::StateVector<f64>;
pub type State32 = walk::StateVector<f32>;
pub type Config = walk::WalkConfig<f64>;
pub type Config32 = walk::WalkConfig<f32>;
pub type Walk = walk::Walk<f64>;
pub type Entry = spectral::SpectralEntry<f64>;
pub type Block = spectral::ReducedBlock<f64>;
pub type Table = asymptotics::SecularTable<f64>;
