//! Simulation and analysis toolkit for fuzzy source states on a periodic line.
//!
//! States are complex amplitude fields built from weighted, phased point sources
//! (Gaussian-regularized). They evolve either by direct propagator convolution
//! ([`kernels::evolve_convolution`]) or spectrally under `F0(p) = p^s / (2 m0)`
//! ([`spectral::evolve_spectral`], [`spectral::evolve_split_step`]). The [`analysis`]
//! module splits coherent patterns into member densities and interference, measures
//! overlaps, fringes and far-field decay, and samples positions from densities.
//! [`scenario`] wraps all of it in JSON-configured, checklist-reporting runs.
//!
//! All numerics are generic over [`Real`]; the `*F64`/`*F32` aliases below fix the
//! scalar. Units have `hbar = 1`.

pub mod analysis;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod kernels;
pub mod real;
pub mod scenario;
pub mod source;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use grid::Grid;
pub use real::Real;
pub use source::{build_source_state, source_components, EnsembleMember, EnsembleSpec, PointSource, SourceSpec};
pub use spectral::{evolve_spectral, evolve_split_step, EvolutionSpec, SpectralPlan};
pub use state::FuzzyState;

pub type GridF64 = Grid<f64>;
pub type GridF32 = Grid<f32>;
pub type FuzzyStateF64 = FuzzyState<f64>;
pub type FuzzyStateF32 = FuzzyState<f32>;
pub type DensityF64 = analysis::Density<f64>;
pub type DensityF32 = analysis::Density<f32>;
pub type SourceSpecF64 = SourceSpec<f64>;
pub type SourceSpecF32 = SourceSpec<f32>;
pub type EnsembleSpecF64 = EnsembleSpec<f64>;
pub type EvolutionSpecF64 = EvolutionSpec<f64>;
pub type EvolutionSpecF32 = EvolutionSpec<f32>;
pub type SpectralPlanF64 = SpectralPlan<f64>;
pub type SpectralPlanF32 = SpectralPlan<f32>;
