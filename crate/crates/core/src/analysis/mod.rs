//! Diagnostics computed from evolved states.

mod decomposition;
mod delta;
mod density;
mod interference;
mod sampling;
mod tail;

pub use decomposition::{decompose, DecompositionResult, DecompositionSummary, BOUND_SLACK};
pub use delta::{delta_functional, gaussian_delta_closed_form, unit_integral, TestFunction};
pub use density::{density, mixed_density, moments, Density, MomentReport, SignedField, MOMENT_STABILITY_TOL};
pub use interference::{
    fringe_contrast, fringe_spacing, measure_fringes, overlap_measure, visibility,
    FringeMeasurement, OVERLAP_NORM_TOL,
};
pub use sampling::{sample_positions, SAMPLE_CHUNK};
pub use tail::{fit_tail_exponent, predicted_tail_exponent, EnvelopeKind, TailFit};

use crate::real::Real;

/// Ordinary least squares `y = slope * x + intercept`; returns `(slope, intercept, rms)`.
///
/// Needs at least two points with distinct `x`; otherwise the slope is NaN.
pub fn linear_fit<T: Real>(points: &[(T, T)]) -> (T, T, T) {
    let n = T::from_count(points.len());
    if points.len() < 2 {
        return (T::nan(), T::nan(), T::nan());
    }
    let mx = points.iter().map(|p| p.0).sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: T = points
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 * i as f64 - 2.0)).collect();
        let (m, b, r) = linear_fit(&pts);
        assert!((m - 3.0).abs() < 1e-12);
        assert!((b + 2.0).abs() < 1e-12);
        assert!(r < 1e-12);
        assert!(linear_fit(&pts[..1]).0.is_nan());
    }
}
