//! Default bounds for every checklist entry, overridable per config under `"tolerances"`.

use serde::{Deserialize, Serialize};

/// One field per bound. Missing fields in a config's `"tolerances"` object keep these
/// defaults; unknown fields are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Max-abs error of a forward/inverse transform round trip.
    pub fft_round_trip: f64,
    /// `|norm2 - 1|` after normalizing, and the change on normalizing twice.
    pub normalize: f64,
    /// Max-abs error when a one-cell source shift is compared with a one-index rotation.
    pub source_shift: f64,
    /// `|norm2(evolved) - norm2(initial)|` for spectral evolution.
    pub unitarity: f64,
    /// Max-abs difference between shift-then-evolve and evolve-then-shift.
    pub shift_commutation: f64,
    /// Max-abs error of evolving forward then backward.
    pub time_reversal: f64,
    /// Relative L2 distance between independent evolutions (spectral, convolution, closed form).
    pub oracle_l2: f64,
    /// `|norm2 - 1|` after convolution evolution.
    pub convolution_norm: f64,
    /// Relative L2 distance of `U(t/2) U(t/2)` against `U(t)`.
    pub semigroup: f64,
    /// Deviation of `|G|` from `sqrt(m0/(2 pi t))`.
    pub propagator_modulus: f64,
    /// Relative error of the evolved density variance.
    pub variance_rel: f64,
    /// `|integral w_n|`.
    pub zero_integral: f64,
    /// Slack in `|w_n| <= sum 2 sqrt(w_i w_j)`.
    pub bound_slack: f64,
    /// Relative L2 projection of `w_n` onto the member densities.
    pub projection: f64,
    /// Relative error of the measured fringe period.
    pub fringe_period_rel: f64,
    /// Relative error of the fringe shift under a pi phase flip, in units of half a period.
    pub half_period_shift_rel: f64,
    /// Upper bound on mixed-state visibility at the pattern center.
    pub mixed_visibility: f64,
    /// Lower bound on pure-state visibility when the overlap is at least `high_overlap`.
    pub pure_visibility: f64,
    pub high_overlap: f64,
    /// `|integrated fringe contrast - R_w|`.
    pub visibility_link: f64,
    /// Deviation of the fitted tail exponent from `-(s-2)/(2(s-1))`.
    pub tail_exponent: f64,
    /// Minimum span of the tail window in decades.
    pub tail_decades: f64,
    /// Analytic continuation of the propagator against the heat kernel.
    pub diffusion_residual: f64,
    /// Heat kernel norm and relative variance.
    pub diffusion_moments: f64,
    /// Max-abs error of the Chapman-Kolmogorov identity on the grid.
    pub chapman_kolmogorov: f64,
    /// Max-abs difference between numerical and closed-form δ-functionals.
    pub delta_closed_form: f64,
    /// Norm drift over a split-step run.
    pub split_step_norm: f64,
    /// Split-step with `V = 0` against one spectral step.
    pub split_step_free: f64,
    /// Max deviation of the harmonic-well center from the classical trajectory.
    pub harmonic_center: f64,
    /// Deviation of the measured split-step convergence order from 2.
    pub convergence_order: f64,
}

impl Tolerances {
    pub const DEFAULT: Self = Self {
        fft_round_trip: 1e-12,
        normalize: 1e-12,
        source_shift: 1e-14,
        unitarity: 1e-12,
        shift_commutation: 1e-12,
        time_reversal: 1e-12,
        oracle_l2: 1e-6,
        convolution_norm: 1e-6,
        semigroup: 1e-6,
        propagator_modulus: 1e-14,
        variance_rel: 1e-6,
        zero_integral: 1e-8,
        bound_slack: 1e-12,
        projection: 1e-3,
        fringe_period_rel: 0.01,
        half_period_shift_rel: 0.01,
        mixed_visibility: 0.01,
        pure_visibility: 0.98,
        high_overlap: 0.99,
        visibility_link: 0.02,
        tail_exponent: 0.05,
        tail_decades: 1.0,
        diffusion_residual: 1e-12,
        diffusion_moments: 1e-10,
        chapman_kolmogorov: 1e-10,
        delta_closed_form: 1e-8,
        split_step_norm: 1e-10,
        split_step_free: 1e-12,
        harmonic_center: 1e-4,
        convergence_order: 0.1,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
