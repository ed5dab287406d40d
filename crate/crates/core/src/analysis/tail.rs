//! Power-law fits to the far field of an evolved state.
//!
//! The far-field modulus of a spread-out state beats against weak contributions
//! (for instance components that have wrapped around the periodic domain). Taking the
//! upper envelope of the beats biases the fit at first order in the beat amplitude, so
//! each local maximum is paired with its neighbouring minima and the geometric midline
//! `sqrt(max * sqrt(min_left * min_right))` is fitted instead. That midline is accurate to
//! second order in the relative beat amplitude.

use serde::Serialize;

use super::linear_fit;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::FuzzyState;

/// Fits refuse windows whose amplitude drops below this.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

/// Below this many extrema pairs the modulus is treated as smooth and fitted directly.
pub const MIN_ENVELOPE_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// Midline of local maxima and their neighbouring minima.
    ExtremaMidline,
    /// Raw samples; the modulus had no oscillation to remove.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit<T> {
    /// Slope of `log|g|` against `log|x|`.
    pub exponent: T,
    pub window: (T, T),
    /// RMS of the log-log fit residuals.
    pub residual: T,
    pub points: usize,
    pub envelope: EnvelopeKind,
    /// `(log|x|, log|g|, log envelope)` at each fitted point.
    #[serde(skip)]
    pub samples: Vec<(T, T, T)>,
}

/// `-(s - 2) / (2 (s - 1))`, the far-field decay exponent of `|g|` under `F0 = p^s/(2 m0)`.
pub fn predicted_tail_exponent<T: Real>(s: u32) -> T {
    let s = T::from_count(s as usize);
    -(s - T::lit(2.0)) / (T::lit(2.0) * (s - T::one()))
}

/// Fits `|g| ~ |x|^exponent` over `window`, which must lie on one side of the origin and
/// span at least a decade in `|x|`.
pub fn fit_tail_exponent<T: Real>(state: &FuzzyState<T>, window: (T, T)) -> Result<TailFit<T>> {
    let (a, b) = window;
    let grid = state.grid();
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo < grid.x_min() || hi > grid.x(grid.len() - 1) {
        return Err(Error::TailFit(format!(
            "window [{lo}, {hi}] leaves the grid [{}, {})",
            grid.x_min(),
            grid.x_max()
        )));
    }
    if !(lo > T::zero() || hi < T::zero()) {
        return Err(Error::TailFit(format!(
            "window [{lo}, {hi}] must not contain the origin"
        )));
    }
    let (near, far) = if lo > T::zero() {
        (lo, hi)
    } else {
        (hi.abs(), lo.abs())
    };
    if far < T::lit(10.0) * near * T::lit(1.0 - 1e-9) {
        return Err(Error::TailFit(format!(
            "window spans |x| in [{near}, {far}], less than one decade"
        )));
    }

    let idx: Vec<usize> = (0..grid.len())
        .filter(|&j| {
            let x = grid.x(j);
            x >= lo && x <= hi
        })
        .collect();
    let amp: Vec<T> = state.samples().iter().map(|z| z.norm()).collect();
    if let Some(&j) = idx.iter().find(|&&j| amp[j] <= T::lit(AMPLITUDE_FLOOR)) {
        return Err(Error::TailFit(format!(
            "|g| = {} at x = {} is below the floor {AMPLITUDE_FLOOR}",
            amp[j],
            grid.x(j)
        )));
    }

    let interior: Vec<usize> = idx
        .iter()
        .copied()
        .filter(|&j| j > 0 && j + 1 < grid.len())
        .collect();
    let maxima: Vec<usize> = interior
        .iter()
        .copied()
        .filter(|&j| amp[j] > amp[j - 1] && amp[j] >= amp[j + 1])
        .collect();
    let minima: Vec<usize> = interior
        .iter()
        .copied()
        .filter(|&j| amp[j] < amp[j - 1] && amp[j] <= amp[j + 1])
        .collect();

    let mut midline = Vec::new();
    for &m in &maxima {
        let left = minima.partition_point(|&k| k < m);
        if left == 0 || left >= minima.len() {
            continue;
        }
        let trough = (amp[minima[left - 1]] * amp[minima[left]]).sqrt();
        midline.push((m, (amp[m] * trough).sqrt()));
    }

    let (envelope, chosen): (EnvelopeKind, Vec<(usize, T)>) = if midline.len() >= MIN_ENVELOPE_POINTS {
        (EnvelopeKind::ExtremaMidline, midline)
    } else {
        (EnvelopeKind::Raw, idx.iter().map(|&j| (j, amp[j])).collect())
    };
    if chosen.len() < MIN_ENVELOPE_POINTS {
        return Err(Error::TailFit(format!(
            "only {} samples in the window",
            chosen.len()
        )));
    }

    let samples: Vec<(T, T, T)> = chosen
        .iter()
        .map(|&(j, e)| (grid.x(j).abs().ln(), amp[j].ln(), e.ln()))
        .collect();
    let pts: Vec<(T, T)> = samples.iter().map(|s| (s.0, s.2)).collect();
    let (exponent, _, residual) = linear_fit(&pts);
    Ok(TailFit {
        exponent,
        window: (lo, hi),
        residual,
        points: pts.len(),
        envelope,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex;

    #[test]
    fn predicted_exponents() {
        assert_eq!(predicted_tail_exponent::<f64>(2), 0.0);
        assert!((predicted_tail_exponent::<f64>(4) + 1.0 / 3.0).abs() < 1e-15);
        assert!((predicted_tail_exponent::<f64>(6) + 0.4).abs() < 1e-15);
    }

    #[test]
    fn exact_power_law_with_beats() {
        let grid = Grid::<f64>::new(-2000.0, 2000.0, 1 << 16).unwrap();
        // dominant x^-0.4 chirp plus a 5% constant-amplitude component at another frequency
        let s = FuzzyState::from_fn(grid, 0.0, |x| {
            let ax = x.abs().max(1.0);
            Complex::from_polar(ax.powf(-0.4), 0.8 * x) + Complex::from_polar(0.05 * 100f64.powf(-0.4), 0.3 * x)
        })
        .unwrap();
        let fit = fit_tail_exponent(&s, (100.0, 1000.0)).unwrap();
        assert_eq!(fit.envelope, EnvelopeKind::ExtremaMidline);
        assert!((fit.exponent + 0.4).abs() < 0.01, "{}", fit.exponent);

        let smooth = FuzzyState::from_fn(grid, 0.0, |x| Complex::new(x.abs().max(1.0).powf(-0.25), 0.0))
            .unwrap();
        let fit = fit_tail_exponent(&smooth, (-1500.0, -150.0)).unwrap();
        assert_eq!(fit.envelope, EnvelopeKind::Raw);
        assert!((fit.exponent + 0.25).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_windows() {
        let grid = Grid::<f64>::new(-100.0, 100.0, 4096).unwrap();
        let s = FuzzyState::from_fn(grid, 0.0, |_| Complex::new(1.0, 0.0)).unwrap();
        assert!(fit_tail_exponent(&s, (10.0, 50.0)).is_err());
        assert!(fit_tail_exponent(&s, (-5.0, 50.0)).is_err());
        assert!(fit_tail_exponent(&s, (9.0, 200.0)).is_err());
        let tiny = FuzzyState::from_fn(grid, 0.0, |x| Complex::new((-x * x).exp(), 0.0)).unwrap();
        assert!(fit_tail_exponent(&tiny, (5.0, 50.0)).is_err());
    }
}
