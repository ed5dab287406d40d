//! Uniform periodic lattice and its discrete-Fourier dual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Smallest sample count accepted by [`Grid::new`].
pub const MIN_POINTS: usize = 8;

/// Uniform periodic grid `x_j = x_min + j*dx`, `j = 0..n`, with `dx = (x_max - x_min)/n`.
///
/// The point `x_max` itself is the periodic image of `x_min` and is not sampled.
/// The dual lattice is `p_k = 2*pi*k/(n*dx)` for `k` in `[-n/2, n/2)`, stored in FFT
/// order (non-negative frequencies first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    x_min: T,
    x_max: T,
    n: usize,
    dx: T,
}

impl<T: Real> Grid<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite, got [{x_min}, {x_max}]"
            )));
        }
        if x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "x_max ({x_max}) must exceed x_min ({x_min})"
            )));
        }
        if n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n = {n} is below the minimum of {MIN_POINTS}"
            )));
        }
        let dx = (x_max - x_min) / T::from_count(n);
        if !(dx > T::zero()) {
            return Err(Error::InvalidGrid("spacing underflows to zero".into()));
        }
        Ok(Self { x_min, x_max, n, dx })
    }

    #[inline]
    pub fn x_min(&self) -> T {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    /// Period of the domain, `x_max - x_min`.
    #[inline]
    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    /// Midpoint of the domain.
    #[inline]
    pub fn center(&self) -> T {
        (self.x_min + self.x_max) * T::lit(0.5)
    }

    #[inline]
    pub fn x(&self, j: usize) -> T {
        self.x_min + T::from_count(j) * self.dx
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Momentum spacing `2*pi/(n*dx)`.
    #[inline]
    pub fn dp(&self) -> T {
        T::TAU() / (T::from_count(self.n) * self.dx)
    }

    /// Momentum of FFT bin `k` (`k < n`), mapped into `[-n/2, n/2)`.
    #[inline]
    pub fn momentum(&self, k: usize) -> T {
        let signed = if k < self.n / 2 {
            k as f64
        } else {
            k as f64 - self.n as f64
        };
        T::lit(signed) * self.dp()
    }

    /// All momenta in FFT order.
    pub fn momenta(&self) -> Vec<T> {
        (0..self.n).map(|k| self.momentum(k)).collect()
    }

    /// Largest resolvable momentum magnitude, `pi/dx`.
    #[inline]
    pub fn nyquist(&self) -> T {
        T::PI() / self.dx
    }

    /// True when `x` lies strictly inside `(x_min, x_max)`.
    #[inline]
    pub fn contains_strictly(&self, x: T) -> bool {
        x > self.x_min && x < self.x_max
    }

    /// Index of the grid point nearest to `x`, clamped to the lattice.
    pub fn nearest_index(&self, x: T) -> usize {
        let r = ((x - self.x_min) / self.dx).round();
        if r <= T::zero() {
            0
        } else {
            r.to_usize().unwrap_or(usize::MAX).min(self.n - 1)
        }
    }

    /// Displacement `x - y` reduced to the periodic cell `[-length/2, length/2)`.
    pub fn periodic_displacement(&self, x: T, y: T) -> T {
        let l = self.length();
        let d = x - y;
        d - l * (d / l + T::lit(0.5)).floor()
    }

    /// Same lattice within a relative tolerance on the bounds.
    pub fn compatible_with(&self, other: &Grid<T>) -> bool {
        let tol = T::lit(1e-12) * self.length().max(T::one());
        self.n == other.n
            && (self.x_min - other.x_min).abs() <= tol
            && (self.x_max - other.x_max).abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_from_bounds() {
        let g = Grid::<f64>::new(-50.0, 50.0, 4096).unwrap();
        assert!((g.dx() - 100.0 / 4096.0).abs() < 1e-15);
        assert_eq!(g.len(), 4096);
    }

    #[test]
    fn unit_cell_momenta() {
        let g = Grid::<f64>::new(0.0, 1.0, 8).unwrap();
        assert_eq!(g.dx(), 0.125);
        assert!((g.dp() - std::f64::consts::TAU).abs() < 1e-12);
        let ps = g.momenta();
        let expected = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (p, k) in ps.iter().zip(expected) {
            assert!((p - k * std::f64::consts::TAU).abs() < 1e-12);
        }
        assert!((g.nyquist() - 4.0 * std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Grid::<f64>::new(-10.0, 10.0, 7).is_err());
        assert!(Grid::<f64>::new(1.0, 1.0, 64).is_err());
        assert!(Grid::<f64>::new(2.0, 1.0, 64).is_err());
        assert!(Grid::<f64>::new(f64::NAN, 1.0, 64).is_err());
        assert!(Grid::<f64>::new(0.0, f64::INFINITY, 64).is_err());
    }

    #[test]
    fn periodic_displacement_wraps() {
        let g = Grid::<f64>::new(-5.0, 5.0, 64).unwrap();
        assert!((g.periodic_displacement(4.5, -4.5) - (-1.0)).abs() < 1e-12);
        assert!((g.periodic_displacement(1.0, 0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nearest_index_clamps() {
        let g = Grid::<f64>::new(0.0, 1.0, 8).unwrap();
        assert_eq!(g.nearest_index(-3.0), 0);
        assert_eq!(g.nearest_index(0.26), 2);
        assert_eq!(g.nearest_index(9.0), 7);
    }
}
