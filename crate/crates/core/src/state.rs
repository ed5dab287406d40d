//! Complex amplitude fields on a [`Grid`].

use std::io::{self, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::real::Real;

/// Amplitude `g(x_j)` sampled on a grid, stamped with the evolution time it represents.
///
/// Constructors reject non-finite samples, so every `FuzzyState` in circulation is finite.
/// The local phase `arg g` carries the correlation structure; the density is `|g|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyState<T> {
    grid: Grid<T>,
    samples: Vec<Complex<T>>,
    time: T,
}

impl<T: Real> FuzzyState<T> {
    pub fn new(grid: Grid<T>, samples: Vec<Complex<T>>, time: T) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.len()
            )));
        }
        if let Some(index) = samples.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if !time.is_finite() {
            return Err(Error::InvalidArgument(format!("timestamp {time} is not finite")));
        }
        Ok(Self { grid, samples, time })
    }

    /// Builds a state by evaluating `f` at every grid point.
    pub fn from_fn(grid: Grid<T>, time: T, mut f: impl FnMut(T) -> Complex<T>) -> Result<Self> {
        let samples = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self::new(grid, samples, time)
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            grid,
            samples: vec![Complex::new(T::zero(), T::zero()); grid.len()],
            time: T::zero(),
        }
    }

    /// Unit-norm plane wave occupying FFT bin `k`.
    pub fn plane_wave(grid: Grid<T>, k: usize) -> Self {
        let p = grid.momentum(k);
        let amp = T::one() / grid.length().sqrt();
        let x0 = grid.x_min();
        let samples = (0..grid.len())
            .map(|j| Complex::from_polar(amp, p * (grid.x(j) - x0)))
            .collect();
        Self {
            grid,
            samples,
            time: T::zero(),
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    #[inline]
    pub fn time(&self) -> T {
        self.time
    }

    pub fn with_time(mut self, time: T) -> Self {
        self.time = time;
        self
    }

    /// `N2 = sum |g_j|^2 dx`, the midpoint rule on the periodic grid.
    pub fn norm2(&self) -> T {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<T>() * self.grid.dx()
    }

    /// Rescales to `N2 = 1`.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm2();
        if !(n2 > T::zero()) {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex::new(T::one() / n2.sqrt(), T::zero())))
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * factor).collect(),
            time: self.time,
        }
    }

    /// `sum g_j dx`, the plain (not squared) integral of the amplitude.
    pub fn integral(&self) -> Complex<T> {
        self.samples
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
            .scale(self.grid.dx())
    }

    /// `<self|other> = sum conj(self_j) other_j dx`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same_grid(other)?;
        let acc = self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        Ok(acc.scale(self.grid.dx()))
    }

    /// Discrete L2 distance `sqrt(sum |a - b|^2 dx)`.
    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        let s: T = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.dx()).sqrt())
    }

    /// L2 distance divided by the L2 norm of `reference`.
    pub fn relative_l2_distance(&self, reference: &Self) -> Result<T> {
        let d = self.l2_distance(reference)?;
        let r = reference.norm2().sqrt();
        if !(r > T::zero()) {
            return Err(Error::ZeroNorm);
        }
        Ok(d / r)
    }

    pub fn max_abs_difference(&self, other: &Self) -> Result<T> {
        self.check_same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    /// Pointwise sum; timestamps must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            time: self.time,
        })
    }

    /// Periodic shift by `cells` grid points toward `+x`.
    pub fn shifted(&self, cells: isize) -> Self {
        let n = self.samples.len() as isize;
        let k = cells.rem_euclid(n) as usize;
        let mut samples = self.samples.clone();
        samples.rotate_right(k);
        Self {
            grid: self.grid,
            samples,
            time: self.time,
        }
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if !self.grid.compatible_with(&other.grid) {
            return Err(Error::Mismatch("states live on different grids".into()));
        }
        Ok(())
    }

    /// Debug dump: header line then `x,re,im` rows.
    pub fn write_columns<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,re_g,im_g")?;
        for (j, z) in self.samples.iter().enumerate() {
            writeln!(out, "{},{},{}", self.grid.x(j), z.re, z.im)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid<f64> {
        Grid::new(-10.0, 10.0, 256).unwrap()
    }

    fn gaussian(scale: f64) -> FuzzyState<f64> {
        FuzzyState::from_fn(grid(), 0.0, |x| Complex::new(scale * (-x * x / 2.0).exp(), 0.0))
            .unwrap()
    }

    #[test]
    fn rejects_non_finite_and_wrong_length() {
        let g = grid();
        let mut s = vec![Complex::new(0.0, 0.0); g.len()];
        s[17] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(
            FuzzyState::new(g, s, 0.0),
            Err(Error::NonFinite { index: 17 })
        ));
        assert!(FuzzyState::new(g, vec![Complex::new(0.0, 0.0); 3], 0.0).is_err());
    }

    #[test]
    fn norm_is_quadratic() {
        let a = gaussian(1.0).norm2();
        let b = gaussian(2.0).norm2();
        assert!((b - 4.0 * a).abs() < 1e-12);
        assert!((a - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_field_norm_and_normalize() {
        let z = FuzzyState::zeros(grid());
        assert_eq!(z.norm2(), 0.0);
        assert!(matches!(z.normalize(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn normalize_is_idempotent() {
        let once = gaussian(3.0).normalize().unwrap();
        assert!((once.norm2() - 1.0).abs() < 1e-12);
        let twice = once.normalize().unwrap();
        assert!(once.max_abs_difference(&twice).unwrap() < 1e-15);
    }

    #[test]
    fn plane_wave_is_normalized() {
        let pw = FuzzyState::plane_wave(grid(), 5);
        assert!((pw.norm2() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_wraps_around() {
        let s = gaussian(1.0);
        let back = s.shifted(7).shifted(-7);
        assert_eq!(s, back);
        assert_eq!(s.shifted(256), s);
    }

    #[test]
    fn columns_have_header_and_rows() {
        let mut buf = Vec::new();
        gaussian(1.0).write_columns(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,re_g,im_g\n"));
        assert_eq!(text.lines().count(), 257);
    }
}
