use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::real::Real;
use crate::source::{build_source_state, EnsembleSpec};
use crate::spectral::{evolve, EvolutionSpec};
use crate::state::FuzzyState;

/// Relative disagreement allowed between the 50% and 90% window moments.
pub const MOMENT_STABILITY_TOL: f64 = 0.05;

/// Nonnegative field `w(x_j)` with its midpoint-rule integral.
#[derive(Debug, Clone, PartialEq)]
pub struct Density<T> {
    grid: Grid<T>,
    samples: Vec<T>,
    norm: T,
}

impl<T: Real> Density<T> {
    pub fn new(grid: Grid<T>, samples: Vec<T>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "{} density samples for a grid of {} points",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(index) = samples.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(j) = samples.iter().position(|&w| w < T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "density sample {j} is negative ({})",
                samples[j]
            )));
        }
        let norm = samples.iter().copied().sum::<T>() * grid.dx();
        Ok(Self {
            grid,
            samples,
            norm,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    /// `sum w_j dx`.
    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.norm - T::one()).abs() <= tol
    }
}

/// Real field of either sign, e.g. the interference term `w_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedField<T> {
    grid: Grid<T>,
    samples: Vec<T>,
}

impl<T: Real> SignedField<T> {
    pub fn new(grid: Grid<T>, samples: Vec<T>) -> Self {
        Self { grid, samples }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn integral(&self) -> T {
        self.samples.iter().copied().sum::<T>() * self.grid.dx()
    }

    pub fn min(&self) -> T {
        self.samples.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.samples.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().map(|v| v.abs()).fold(T::zero(), T::max)
    }
}

/// `w(x_j) = |g(x_j)|^2`.
pub fn density<T: Real>(state: &FuzzyState<T>) -> Density<T> {
    let samples: Vec<T> = state.samples().iter().map(|z| z.norm_sqr()).collect();
    let norm = samples.iter().copied().sum::<T>() * state.grid().dx();
    Density {
        grid: *state.grid(),
        samples,
        norm,
    }
}

/// `sum_i P_i w_i(x, t)` with every member prepared and evolved on its own.
pub fn mixed_density<T: Real>(
    grid: &Grid<T>,
    ensemble: &EnsembleSpec<T>,
    evolution: &EvolutionSpec<T>,
) -> Result<Density<T>> {
    ensemble.validate(grid)?;
    let mut acc = vec![T::zero(); grid.len()];
    for member in &ensemble.members {
        let state = evolve(&build_source_state(grid, &member.sources)?, evolution)?;
        let w = density(&state);
        for (a, v) in acc.iter_mut().zip(w.samples()) {
            *a = *a + member.probability * *v;
        }
    }
    Density::new(*grid, acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport<T> {
    pub mean: T,
    pub variance: T,
    pub mean_central_50: T,
    pub variance_central_50: T,
    pub mean_central_90: T,
    pub variance_central_90: T,
    /// Set when the truncated moments disagree, i.e. the moments do not exist on the
    /// continuum and the grid values are artefacts of truncation.
    pub undefined_flag: bool,
}

fn window_moments<T: Real>(grid: &Grid<T>, w: &[T], lo: usize, hi: usize) -> (T, T) {
    let mass: T = w[lo..hi].iter().copied().sum();
    if !(mass > T::zero()) {
        return (T::nan(), T::nan());
    }
    let mean = (lo..hi).map(|j| grid.x(j) * w[j]).sum::<T>() / mass;
    let var = (lo..hi)
        .map(|j| {
            let d = grid.x(j) - mean;
            d * d * w[j]
        })
        .sum::<T>()
        / mass;
    (mean, var)
}

/// Mean and variance over the grid, with a truncation-stability flag.
///
/// The moments are recomputed on the central 50% and central 90% of the lattice (each
/// renormalized); they must agree to 5%, variance relative to itself and mean relative to
/// the standard deviation. Otherwise `undefined_flag` is set.
pub fn moments<T: Real>(density: &Density<T>) -> MomentReport<T> {
    let grid = density.grid();
    let n = grid.len();
    let w = density.samples();
    let (mean, variance) = window_moments(grid, w, 0, n);
    let (m50, v50) = window_moments(grid, w, n / 4, n - n / 4);
    let (m90, v90) = window_moments(grid, w, n / 20, n - n / 20);
    let tol = T::lit(MOMENT_STABILITY_TOL);
    let stable = (v50 - v90).abs() <= tol * v90 && (m50 - m90).abs() <= tol * v90.sqrt();
    MomentReport {
        mean,
        variance,
        mean_central_50: m50,
        variance_central_50: v50,
        mean_central_90: m90,
        variance_central_90: v90,
        undefined_flag: !stable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gaussian_free_closed_form;
    use crate::source::{EnsembleMember, SourceSpec};
    use num_complex::Complex;

    fn grid() -> Grid<f64> {
        Grid::new(-50.0, 50.0, 4096).unwrap()
    }

    #[test]
    fn density_of_normalized_state() {
        let g = gaussian_free_closed_form(1.0, 0.0, 0.0, 1.0, 0.0, &grid()).unwrap();
        let w = density(&g);
        assert!((w.norm() - 1.0).abs() < 1e-12);
        let rotated = density(&g.scaled(Complex::from_polar(1.0, 0.77)));
        for (a, b) in w.samples().iter().zip(rotated.samples()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(density(&FuzzyState::zeros(grid())).norm(), 0.0);
    }

    #[test]
    fn rejects_negative_samples() {
        let g = Grid::new(0.0, 1.0, 8).unwrap();
        assert!(Density::new(g, vec![0.1, -0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn gaussian_moments() {
        // |g|^2 variance = sigma0^2 / 2
        for (x0, s0) in [(0.0, 1.0), (3.5, 1.5)] {
            let g = gaussian_free_closed_form(s0, x0, 0.0, 1.0, 0.0, &grid()).unwrap();
            let m = moments(&density(&g));
            assert!((m.mean - x0).abs() < 1e-8);
            assert!((m.variance - s0 * s0 / 2.0).abs() < 1e-8);
            assert!(!m.undefined_flag);
        }
    }

    #[test]
    fn flat_density_moments_flagged() {
        let g = grid();
        let w = Density::new(g, vec![1.0 / g.length(); g.len()]).unwrap();
        assert!(moments(&w).undefined_flag);
    }

    #[test]
    fn single_member_mixture_is_member_density() {
        let g = grid();
        let spec = SourceSpec::single(2.0, 0.5);
        let ens = EnsembleSpec {
            members: vec![EnsembleMember {
                probability: 1.0,
                sources: spec.clone(),
            }],
        };
        let ev = EvolutionSpec::free(2, 1.0, 1.5);
        let mixed = mixed_density(&g, &ens, &ev).unwrap();
        let direct = density(&evolve(&build_source_state(&g, &spec).unwrap(), &ev).unwrap());
        assert_eq!(mixed.samples(), direct.samples());
    }
}
