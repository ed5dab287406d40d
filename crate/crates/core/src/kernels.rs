//! Closed-form kernels and the direct-quadrature propagator evolution.
//!
//! The convolution path here is deliberately independent of the FFT engine in
//! [`crate::spectral`]: it sums the Fresnel kernel point by point, so the two routes
//! can check each other.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::real::Real;
use crate::state::FuzzyState;

/// Samples with `|g|^2` below this fraction of the peak are outside the effective support.
pub const SUPPORT_FLOOR: f64 = 1e-16;

fn check_positive_time<T: Real>(t: T) -> Result<()> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::NonPositiveTime(t.as_f64()));
    }
    Ok(())
}

fn check_mass<T: Real>(m0: T) -> Result<()> {
    if !(m0 > T::zero()) || !m0.is_finite() {
        return Err(Error::InvalidEvolution(format!("mass must be positive, got {m0}")));
    }
    Ok(())
}

/// Free propagator `G(x,t) = sqrt(m0/(2 pi i t)) exp(i m0 x^2 / (2t))`.
///
/// The prefactor is `sqrt(m0/(2 pi t)) * exp(-i pi/4)`: the branch for which convolving
/// with `G` reproduces multiplication by `exp(-i p^2 t / (2 m0))` in momentum space.
pub fn propagator<T: Real>(m0: T, x: T, t: T) -> Result<Complex<T>> {
    check_positive_time(t)?;
    check_mass(m0)?;
    Ok(propagator_unchecked(m0, x, t))
}

#[inline]
fn propagator_unchecked<T: Real>(m0: T, x: T, t: T) -> Complex<T> {
    let modulus = (m0 / (T::TAU() * t)).sqrt();
    let phase = m0 * x * x / (T::lit(2.0) * t) - T::FRAC_PI_4();
    Complex::from_polar(modulus, phase)
}

/// `sqrt(m0/(2 pi i t)) exp(i m0 x^2/(2t))` for complex `m0`, principal square root.
///
/// Agrees with [`propagator`] for real positive `m0`. With `m0 = i/(2k^2)` it is the heat
/// kernel of [`diffusion_kernel`].
pub fn propagator_continued<T: Real>(m0: Complex<T>, x: T, t: T) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    let pref = (m0 / (i * T::TAU() * t)).sqrt();
    pref * (i * m0 * (x * x / (T::lit(2.0) * t))).exp()
}

/// Half-width `W` used by the oscillation guard: the largest distance between an output
/// grid point and the effective support of `state`.
pub fn resolution_half_width<T: Real>(state: &FuzzyState<T>) -> T {
    let grid = state.grid();
    let peak = state
        .samples()
        .iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), T::max);
    if peak == T::zero() {
        return T::zero();
    }
    let floor = peak * T::lit(SUPPORT_FLOOR);
    let mut lo = None;
    let mut hi = 0;
    for (j, z) in state.samples().iter().enumerate() {
        if z.norm_sqr() >= floor {
            lo.get_or_insert(j);
            hi = j;
        }
    }
    let lo = lo.unwrap_or(0);
    let last = grid.x(grid.len() - 1);
    (last - grid.x(lo)).max(grid.x(hi) - grid.x_min())
}

/// `m0 * W * dx / t`; the convolution is refused when this exceeds `pi`.
pub fn resolution_ratio<T: Real>(state: &FuzzyState<T>, m0: T, t: T) -> T {
    m0 * resolution_half_width(state) * state.grid().dx() / t
}

/// Direct O(n^2) quadrature `g(x', t) = sum_j G(x' - x_j, t) g0(x_j) dx`.
///
/// Displacements are taken on the real line (no periodic images), so the state should
/// sit well inside the grid. Each output point is summed in a fixed order, so the result
/// does not depend on how rayon schedules the rows.
pub fn evolve_convolution<T: Real>(state: &FuzzyState<T>, m0: T, t: T) -> Result<FuzzyState<T>> {
    check_positive_time(t)?;
    check_mass(m0)?;
    let grid = *state.grid();
    let ratio = resolution_ratio(state, m0, t);
    if ratio > T::PI() {
        return Err(Error::UnderResolved {
            ratio: ratio.as_f64(),
            half_width: resolution_half_width(state).as_f64(),
            dx: grid.dx().as_f64(),
            t: t.as_f64(),
        });
    }

    let n = grid.len();
    let dx = grid.dx();
    // kernel[(i - j) + n - 1] = G((i - j) dx, t) dx
    let kernel: Vec<Complex<T>> = (0..2 * n - 1)
        .map(|k| {
            let d = T::lit(k as f64 - (n as f64 - 1.0)) * dx;
            propagator_unchecked(m0, d, t).scale(dx)
        })
        .collect();

    let input = state.samples();
    let out: Vec<Complex<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = &kernel[i..i + n];
            // row[j] = kernel[i + j], want kernel[i - j + n - 1]; walk the row backwards
            row.iter()
                .rev()
                .zip(input)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (k, g)| acc + k * g)
        })
        .collect();

    FuzzyState::new(grid, out, state.time() + t)
}

/// Parameters of a Gaussian wavepacket `g0 ∝ exp(-(x-x0)^2/(2 sigma0^2) + i p0 (x-x0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket<T> {
    pub sigma0: T,
    pub x0: T,
    pub p0: T,
}

impl<T: Real> GaussianPacket<T> {
    pub fn new(sigma0: T, x0: T, p0: T) -> Self {
        Self { sigma0, x0, p0 }
    }

    /// Density variance `sigma0^2/2 * (1 + t^2/(m0^2 sigma0^4))`.
    pub fn density_variance(&self, m0: T, t: T) -> T {
        let s2 = self.sigma0 * self.sigma0;
        s2 * T::lit(0.5) * (T::one() + t * t / (m0 * m0 * s2 * s2))
    }

    /// Density center `x0 + p0 t / m0`.
    pub fn density_center(&self, m0: T, t: T) -> T {
        self.x0 + self.p0 * t / m0
    }
}

/// Exact free evolution of a [`GaussianPacket`] on the real line, sampled on `grid`:
///
/// `g(x,t) = (pi sigma0^2)^(-1/4) tau^(-1/2) exp(-(x - x0 - p0 t/m0)^2 / (2 sigma0^2 tau)
///            + i p0 (x - x0) - i p0^2 t / (2 m0))`, `tau = 1 + i t/(m0 sigma0^2)`.
pub fn gaussian_free_closed_form<T: Real>(
    sigma0: T,
    x0: T,
    p0: T,
    m0: T,
    t: T,
    grid: &Grid<T>,
) -> Result<FuzzyState<T>> {
    if !(sigma0 > T::zero()) {
        return Err(Error::InvalidArgument(format!("sigma0 must be positive, got {sigma0}")));
    }
    check_mass(m0)?;
    if !(t >= T::zero()) {
        return Err(Error::InvalidArgument(format!("t must be non-negative, got {t}")));
    }
    let s2 = sigma0 * sigma0;
    let tau = Complex::new(T::one(), t / (m0 * s2));
    let amp = (T::PI() * s2).powf(T::lit(-0.25));
    let pref = tau.sqrt().inv().scale(amp);
    let center = x0 + p0 * t / m0;
    let two_s2_tau = tau.scale(T::lit(2.0) * s2);
    FuzzyState::from_fn(*grid, t, |x| {
        let u = x - center;
        let gauss = Complex::new(-u * u, T::zero()) / two_s2_tau;
        let carrier = Complex::new(T::zero(), p0 * (x - x0) - p0 * p0 * t / (T::lit(2.0) * m0));
        pref * (gauss + carrier).exp()
    })
}

/// Normalized heat kernel `1/(2 k sqrt(pi t)) exp(-x^2/(4 k^2 t))`; variance `2 k^2 t`.
pub fn diffusion_kernel<T: Real>(k: T, x: T, t: T) -> Result<T> {
    check_positive_time(t)?;
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "diffusion constant must be positive, got {k}"
        )));
    }
    Ok(diffusion_kernel_unchecked(k, x, t))
}

#[inline]
fn diffusion_kernel_unchecked<T: Real>(k: T, x: T, t: T) -> T {
    let norm = T::one() / (T::lit(2.0) * k * (T::PI() * t).sqrt());
    norm * (-x * x / (T::lit(4.0) * k * k * t)).exp()
}

/// [`diffusion_kernel`] evaluated at every grid point (displacement measured from 0).
pub fn diffusion_kernel_on_grid<T: Real>(k: T, t: T, grid: &Grid<T>) -> Result<Vec<T>> {
    diffusion_kernel(k, T::zero(), t)?;
    Ok((0..grid.len())
        .map(|j| diffusion_kernel_unchecked(k, grid.x(j), t))
        .collect())
}

/// Max over the grid of `|G(x,t)|_{m0 = i/(2k^2)} - w_D(x,t)|`.
///
/// The propagator's functional form is evaluated at the imaginary mass; both sides are
/// closed forms, so the residual is pure round-off.
pub fn diffusion_correspondence_residual<T: Real>(k: T, t: T, grid: &Grid<T>) -> Result<T> {
    let heat = diffusion_kernel_on_grid(k, t, grid)?;
    let m0 = Complex::new(T::zero(), T::one() / (T::lit(2.0) * k * k));
    Ok((0..grid.len())
        .map(|j| {
            let g = propagator_continued(m0, grid.x(j), t);
            (g - Complex::new(heat[j], T::zero())).norm()
        })
        .fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, FRAC_PI_4};

    #[test]
    fn propagator_at_origin() {
        // |G| = sqrt(1/(2 pi)), arg G = -pi/4 (see module docs for the branch)
        let g = propagator(1.0f64, 0.0, 1.0).unwrap();
        assert!((g.norm() - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((g.arg() + FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn propagator_phase_by_substitution() {
        // m0 x^2 / (2t) = 2 * 1 / 1 = 2
        let g = propagator(2.0, 1.0, 0.5).unwrap();
        let expected = Complex::from_polar((2.0 / (2.0 * PI * 0.5)).sqrt(), 2.0 - FRAC_PI_4);
        assert!((g - expected).norm() < 1e-15);
    }

    #[test]
    fn propagator_modulus_independent_of_x() {
        let m = (1.0 / (2.0 * PI)).sqrt();
        for i in 0..200 {
            let x = -50.0 + 0.5 * i as f64;
            assert!((propagator(1.0, x, 1.0).unwrap().norm() - m).abs() < 1e-14);
        }
    }

    #[test]
    fn propagator_rejects_bad_time() {
        assert!(matches!(propagator(1.0, 0.0, 0.0), Err(Error::NonPositiveTime(_))));
        assert!(propagator(1.0, 0.0, -1.0).is_err());
        assert!(propagator(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn continued_matches_real_mass() {
        for &(m, x, t) in &[(1.0, 0.3, 0.7), (2.5, -4.0, 3.0)] {
            let a = propagator(m, x, t).unwrap();
            let b = propagator_continued(Complex::new(m, 0.0), x, t);
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn heat_kernel_values() {
        let v = diffusion_kernel(1.0, 0.0, 1.0).unwrap();
        assert!((v - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
        assert!((v - 0.282_094_791_773_878_14).abs() < 1e-15);
        assert!(diffusion_kernel(0.0, 0.0, 1.0).is_err());
        assert!(diffusion_kernel(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn heat_kernel_norm_and_variance() {
        let grid = Grid::new(-60.0, 60.0, 8192).unwrap();
        for &(k, t) in &[(1.0, 1.0), (0.5, 2.0), (2.0, 3.0)] {
            let w = diffusion_kernel_on_grid(k, t, &grid).unwrap();
            let dx = grid.dx();
            let norm: f64 = w.iter().sum::<f64>() * dx;
            let var: f64 = w
                .iter()
                .enumerate()
                .map(|(j, v)| grid.x(j).powi(2) * v)
                .sum::<f64>()
                * dx;
            assert!((norm - 1.0).abs() < 1e-10, "norm {norm}");
            assert!((var - 2.0 * k * k * t).abs() < 1e-10, "var {var}");
        }
    }

    #[test]
    fn correspondence_residual_is_roundoff() {
        let grid = Grid::new(-20.0, 20.0, 1024).unwrap();
        assert!(diffusion_correspondence_residual(1.0, 1.0, &grid).unwrap() <= 1e-12);
        assert!(diffusion_correspondence_residual(0.5, 2.0, &grid).unwrap() <= 1e-12);
    }

    #[test]
    fn closed_form_at_zero_time_is_initial_packet() {
        let grid = Grid::<f64>::new(-20.0, 20.0, 1024).unwrap();
        let g = gaussian_free_closed_form(1.3, 0.5, 0.8, 1.0, 0.0, &grid).unwrap();
        for j in 0..grid.len() {
            let x = grid.x(j);
            let expected = Complex::from_polar(
                (PI * 1.69f64).powf(-0.25) * (-(x - 0.5).powi(2) / (2.0 * 1.69)).exp(),
                0.8 * (x - 0.5),
            );
            assert!((g.samples()[j] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn guard_refuses_under_resolved_kernel() {
        let grid = Grid::new(-50.0, 50.0, 4096).unwrap();
        let g = gaussian_free_closed_form(1.0, 0.0, 0.0, 1.0, 0.0, &grid).unwrap();
        let err = evolve_convolution(&g, 1.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::UnderResolved { .. }), "{err}");
        assert!(evolve_convolution(&g, 1.0, 0.0).is_err());
    }
}
