//! Overlap of member densities and fringe diagnostics of two-source patterns.

use super::decomposition::DecompositionResult;
use super::density::Density;
use super::linear_fit;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::real::Real;

/// Inputs to [`overlap_measure`] must integrate to 1 within this tolerance.
pub const OVERLAP_NORM_TOL: f64 = 1e-6;

/// `R_w = sum sqrt(w1 w2) dx`, in `[0, 1]` by Cauchy-Schwarz.
pub fn overlap_measure<T: Real>(w1: &Density<T>, w2: &Density<T>) -> Result<T> {
    if !w1.grid().compatible_with(w2.grid()) {
        return Err(Error::Mismatch("densities live on different grids".into()));
    }
    for w in [w1, w2] {
        if !w.is_normalized(T::lit(OVERLAP_NORM_TOL)) {
            return Err(Error::Unnormalized(w.norm().as_f64()));
        }
    }
    Ok(w1
        .samples()
        .iter()
        .zip(w2.samples())
        .map(|(a, b)| (*a * *b).sqrt())
        .sum::<T>()
        * w1.grid().dx())
}

/// Fringe period `2 pi t / (m0 L)` of two sources a distance `L` apart.
pub fn fringe_spacing<T: Real>(m0: T, separation: T, t: T) -> Result<T> {
    for (name, v) in [("m0", m0), ("separation", separation), ("t", t)] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(T::TAU() * t / (m0 * separation))
}

/// `(max - min) / (max + min)` over grid points with `|x - center| <= half_width`.
pub fn visibility<T: Real>(field: &Density<T>, center: T, half_width: T) -> Result<T> {
    let grid = field.grid();
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    let mut count = 0usize;
    for (j, &w) in field.samples().iter().enumerate() {
        if (grid.x(j) - center).abs() <= half_width {
            lo = lo.min(w);
            hi = hi.max(w);
            count += 1;
        }
    }
    if count < 3 {
        return Err(Error::InvalidArgument(format!(
            "visibility window around {center} holds {count} samples"
        )));
    }
    if !(hi + lo > T::zero()) {
        return Ok(T::zero());
    }
    Ok((hi - lo) / (hi + lo))
}

/// Integrated fringe contrast `(pi/2) sum |w_n| / sum w_m`.
///
/// For two equal-weight members with rapidly oscillating interference this tends to the
/// overlap `R_w`: 1 for coincident envelopes, 0 for disjoint ones.
pub fn fringe_contrast<T: Real>(d: &DecompositionResult<T>) -> T {
    let num: T = d.w_n.samples().iter().map(|v| v.abs()).sum();
    let den: T = d.w_m.samples().iter().copied().sum();
    if !(den > T::zero()) {
        return T::zero();
    }
    T::FRAC_PI_2() * num / den
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeMeasurement<T> {
    /// Sub-sample peak positions inside the window, ascending.
    pub peaks: Vec<T>,
    /// Slope of peak position against peak index.
    pub period: T,
    /// Fitted position of peak number zero; with `period` this fixes the fringe phase.
    pub origin: T,
}

impl<T: Real> FringeMeasurement<T> {
    /// Shift of `other`'s fringes relative to `self`, reduced to `[0, period)`.
    pub fn displacement_to(&self, other: &Self) -> T {
        let p = self.period;
        let d = other.origin - self.origin;
        d - p * (d / p).floor()
    }
}

/// Locates fringe maxima of `field` inside `[lo, hi]` and fits their spacing.
///
/// Peaks are refined by a parabola through the three samples around each local maximum.
pub fn measure_fringes<T: Real>(field: &Density<T>, lo: T, hi: T) -> Result<FringeMeasurement<T>> {
    let grid: &Grid<T> = field.grid();
    let w = field.samples();
    let n = w.len();
    let mut peaks = Vec::new();
    for j in 1..n - 1 {
        let x = grid.x(j);
        if x < lo || x > hi {
            continue;
        }
        if w[j] > w[j - 1] && w[j] >= w[j + 1] {
            let (a, b, c) = (w[j - 1], w[j], w[j + 1]);
            let denom = a - T::lit(2.0) * b + c;
            let offset = if denom != T::zero() {
                T::lit(0.5) * (a - c) / denom
            } else {
                T::zero()
            };
            peaks.push(x + offset * grid.dx());
        }
    }
    if peaks.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "found {} fringe maxima in [{lo}, {hi}], need at least 2",
            peaks.len()
        )));
    }
    let pts: Vec<(T, T)> = peaks
        .iter()
        .enumerate()
        .map(|(k, x)| (T::from_count(k), *x))
        .collect();
    let (period, origin, _) = linear_fit(&pts);
    Ok(FringeMeasurement {
        peaks,
        period,
        origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_density(grid: &Grid<f64>, center: f64, std: f64) -> Density<f64> {
        let norm = 1.0 / (std * (2.0 * std::f64::consts::PI).sqrt());
        Density::new(
            *grid,
            (0..grid.len())
                .map(|j| norm * (-(grid.x(j) - center).powi(2) / (2.0 * std * std)).exp())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn overlap_identity_and_disjoint() {
        let grid = Grid::new(-50.0, 50.0, 4096).unwrap();
        let a = gaussian_density(&grid, 0.0, 1.0);
        assert!((overlap_measure(&a, &a).unwrap() - 1.0).abs() < 1e-10);
        let b = gaussian_density(&grid, -30.0, 0.5);
        let c = gaussian_density(&grid, 30.0, 0.5);
        assert!(overlap_measure(&b, &c).unwrap() < 1e-100);
    }

    #[test]
    fn overlap_rejects_unnormalized() {
        let grid = Grid::new(-50.0, 50.0, 4096).unwrap();
        let a = gaussian_density(&grid, 0.0, 1.0);
        let half = Density::new(grid, a.samples().iter().map(|v| v * 0.5).collect()).unwrap();
        assert!(matches!(overlap_measure(&a, &half), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn spacing_formula() {
        let d = fringe_spacing(1.0f64, 10.0, 1.0).unwrap();
        assert!((d - 0.628_318_530_717_958_6).abs() < 1e-15);
        assert!((fringe_spacing(1.0f64, 10.0, 2.0).unwrap() - 2.0 * d).abs() < 1e-15);
        assert!(fringe_spacing(1.0, 0.0, 1.0).is_err());
        assert!(fringe_spacing(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn fringes_of_a_cosine() {
        let grid = Grid::new(-20.0, 20.0, 4096).unwrap();
        let k = 2.0 * std::f64::consts::PI / 1.3;
        let make = |shift: f64| {
            Density::new(
                grid,
                (0..grid.len())
                    .map(|j| 1.0 + (k * (grid.x(j) - shift)).cos())
                    .collect(),
            )
            .unwrap()
        };
        let a = measure_fringes(&make(0.0), -5.0, 5.0).unwrap();
        assert!((a.period - 1.3).abs() < 1e-4);
        let b = measure_fringes(&make(0.65), -5.0, 5.0).unwrap();
        assert!((a.displacement_to(&b) - 0.65).abs() < 1e-3);
        let flat = Density::new(grid, vec![1.0; grid.len()]).unwrap();
        assert!(measure_fringes(&flat, -5.0, 5.0).is_err());
        assert_eq!(visibility(&flat, 0.0, 1.0).unwrap(), 0.0);
        assert!((visibility(&make(0.0), 0.0, 1.3).unwrap() - 1.0).abs() < 1e-3);
    }
}
