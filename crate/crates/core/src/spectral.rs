//! Momentum-space evolution under `F0(p) = p^s / (2 m0)` for even `s`.
//!
//! Sign convention: the symbol is `exp(-i F0(p) t)` with the transform pair of
//! [`crate::fourier`], so a packet with positive carrier momentum drifts toward `+x`.
//! The momentum operator is `-i d/dx` under the same convention.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::Fourier;
use crate::grid::Grid;
use crate::real::Real;
use crate::source::{build_source_state, SourceSpec};
use crate::state::FuzzyState;

/// Largest `F0(p) t` accepted by [`first_order_check`].
pub const FIRST_ORDER_MAX_PHASE: f64 = 0.1;

fn check_exponent(s: u32) -> Result<()> {
    if s == 0 || s % 2 != 0 {
        return Err(Error::InvalidEvolution(format!(
            "exponent s = {s} must be a positive even integer"
        )));
    }
    Ok(())
}

fn check_mass<T: Real>(m0: T) -> Result<()> {
    if !(m0 > T::zero()) || !m0.is_finite() {
        return Err(Error::InvalidEvolution(format!("mass must be positive, got {m0}")));
    }
    Ok(())
}

/// Free symbol `F0(p) = p^s / (2 m0)`.
#[inline]
pub fn free_symbol<T: Real>(p: T, s: u32, m0: T) -> T {
    p.powi(s as i32) / (T::lit(2.0) * m0)
}

/// Evolution parameters. Without a potential the evolution is a single spectral step;
/// with one it is Strang-split in steps of `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSpec<T> {
    pub s: u32,
    pub m0: T,
    pub t_final: T,
    pub dt: Option<T>,
    /// `V(x_j)` on the state's grid.
    pub potential: Option<Vec<T>>,
}

impl<T: Real> EvolutionSpec<T> {
    pub fn free(s: u32, m0: T, t_final: T) -> Self {
        Self {
            s,
            m0,
            t_final,
            dt: None,
            potential: None,
        }
    }

    pub fn with_potential(mut self, potential: Vec<T>, dt: T) -> Self {
        self.potential = Some(potential);
        self.dt = Some(dt);
        self
    }

    pub fn validate(&self, grid: &Grid<T>) -> Result<()> {
        check_exponent(self.s)?;
        check_mass(self.m0)?;
        if !(self.t_final >= T::zero()) || !self.t_final.is_finite() {
            return Err(Error::InvalidEvolution(format!(
                "t_final must be finite and >= 0, got {}",
                self.t_final
            )));
        }
        if let Some(v) = &self.potential {
            if v.len() != grid.len() {
                return Err(Error::InvalidEvolution(format!(
                    "potential has {} samples for a grid of {}",
                    v.len(),
                    grid.len()
                )));
            }
            if let Some(j) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidEvolution(format!(
                    "potential sample {j} is not finite"
                )));
            }
            match self.dt {
                Some(dt) if dt > T::zero() && dt.is_finite() => {}
                Some(dt) => {
                    return Err(Error::InvalidEvolution(format!("dt must be positive, got {dt}")))
                }
                None => {
                    return Err(Error::InvalidEvolution(
                        "dt is required when a potential is present".into(),
                    ))
                }
            }
            self.step_count()?;
        }
        Ok(())
    }

    /// Number of split steps, `t_final / dt`, which must be an integer within round-off.
    pub fn step_count(&self) -> Result<usize> {
        let dt = self
            .dt
            .ok_or_else(|| Error::InvalidEvolution("dt not set".into()))?;
        let ratio = self.t_final / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > T::lit(1e-9) * ratio.max(T::one()) {
            return Err(Error::InvalidEvolution(format!(
                "dt = {dt} does not divide t_final = {}",
                self.t_final
            )));
        }
        Ok(steps.to_usize().unwrap_or(0))
    }
}

/// Unit-modulus table `exp(-i F0(p_k) t)` for one time value.
#[derive(Debug, Clone)]
pub struct PhaseTable<T> {
    pub t: T,
    factors: Vec<Complex<T>>,
}

impl<T: Real> PhaseTable<T> {
    pub fn factors(&self) -> &[Complex<T>] {
        &self.factors
    }
}

/// FFT plan plus the free symbol sampled on the dual lattice.
#[derive(Debug)]
pub struct SpectralPlan<T: Real> {
    grid: Grid<T>,
    s: u32,
    m0: T,
    symbol: Vec<T>,
    fourier: Fourier<T>,
}

impl<T: Real> SpectralPlan<T> {
    pub fn new(grid: &Grid<T>, s: u32, m0: T) -> Result<Self> {
        check_exponent(s)?;
        check_mass(m0)?;
        let symbol = grid.momenta().into_iter().map(|p| free_symbol(p, s, m0)).collect();
        Ok(Self {
            grid: *grid,
            s,
            m0,
            symbol,
            fourier: Fourier::new(grid.len()),
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn exponent(&self) -> u32 {
        self.s
    }

    pub fn mass(&self) -> T {
        self.m0
    }

    pub fn fourier(&self) -> &Fourier<T> {
        &self.fourier
    }

    /// `F0(p_k)` in FFT order.
    pub fn symbol(&self) -> &[T] {
        &self.symbol
    }

    /// `exp(-i F0(p_k) t)`; negative `t` gives the conjugate (time-reversed) table.
    pub fn phase_table(&self, t: T) -> PhaseTable<T> {
        let factors = self
            .symbol
            .iter()
            .map(|&f| Complex::from_polar(T::one(), -f * t))
            .collect();
        PhaseTable { t, factors }
    }

    /// Applies a precomputed table; the timestamp advances by `table.t`.
    pub fn apply(&self, state: &FuzzyState<T>, table: &PhaseTable<T>) -> Result<FuzzyState<T>> {
        self.check_grid(state)?;
        let mut buf = state.samples().to_vec();
        self.fourier.forward(&mut buf);
        for (z, f) in buf.iter_mut().zip(&table.factors) {
            *z = *z * f;
        }
        self.fourier.inverse(&mut buf);
        FuzzyState::new(self.grid, buf, state.time() + table.t)
    }

    /// Forward evolution by `t >= 0`. `t = 0` returns the input unchanged.
    pub fn evolve(&self, state: &FuzzyState<T>, t: T) -> Result<FuzzyState<T>> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::InvalidEvolution(format!(
                "evolution time must be finite and >= 0, got {t}"
            )));
        }
        if t == T::zero() {
            self.check_grid(state)?;
            return Ok(state.clone());
        }
        self.apply(state, &self.phase_table(t))
    }

    /// Undoes [`SpectralPlan::evolve`] by `t` using the conjugate symbol.
    pub fn evolve_reverse(&self, state: &FuzzyState<T>, t: T) -> Result<FuzzyState<T>> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::InvalidEvolution(format!(
                "reversal time must be finite and >= 0, got {t}"
            )));
        }
        self.apply(state, &self.phase_table(-t))
    }

    /// Momentum amplitudes `FFT(g)` in FFT order (unscaled).
    pub fn momentum_amplitudes(&self, state: &FuzzyState<T>) -> Result<Vec<Complex<T>>> {
        self.check_grid(state)?;
        let mut buf = state.samples().to_vec();
        self.fourier.forward(&mut buf);
        Ok(buf)
    }

    fn check_grid(&self, state: &FuzzyState<T>) -> Result<()> {
        if !self.grid.compatible_with(state.grid()) {
            return Err(Error::Mismatch("state grid differs from plan grid".into()));
        }
        Ok(())
    }
}

/// One-shot spectral evolution: transform, multiply by `exp(-i p^s t/(2 m0))`, transform back.
pub fn evolve_spectral<T: Real>(
    state: &FuzzyState<T>,
    s: u32,
    m0: T,
    t: T,
) -> Result<FuzzyState<T>> {
    SpectralPlan::new(state.grid(), s, m0)?.evolve(state, t)
}

/// Strang splitting `e^{-iV dt/2} e^{-iH0 dt} e^{-iV dt/2}`, repeated `t_final/dt` times.
pub fn evolve_split_step<T: Real>(
    state: &FuzzyState<T>,
    spec: &EvolutionSpec<T>,
) -> Result<FuzzyState<T>> {
    spec.validate(state.grid())?;
    let potential = spec
        .potential
        .as_ref()
        .ok_or_else(|| Error::InvalidEvolution("split-step evolution needs a potential".into()))?;
    let dt = spec.dt.expect("validated");
    let steps = spec.step_count()?;
    let plan = SpectralPlan::new(state.grid(), spec.s, spec.m0)?;
    if steps == 0 {
        return Ok(state.clone());
    }

    let half = T::lit(0.5) * dt;
    let half_kick: Vec<Complex<T>> = potential
        .iter()
        .map(|&v| Complex::from_polar(T::one(), -v * half))
        .collect();
    let full_kick: Vec<Complex<T>> = potential
        .iter()
        .map(|&v| Complex::from_polar(T::one(), -v * dt))
        .collect();
    let drift = plan.phase_table(dt);
    let fourier = plan.fourier();

    let mut buf = state.samples().to_vec();
    mul_assign(&mut buf, &half_kick);
    for step in 0..steps {
        fourier.forward(&mut buf);
        mul_assign(&mut buf, drift.factors());
        fourier.inverse(&mut buf);
        // adjacent half kicks of consecutive steps merge into one full kick
        if step + 1 < steps {
            mul_assign(&mut buf, &full_kick);
        } else {
            mul_assign(&mut buf, &half_kick);
        }
    }
    FuzzyState::new(*state.grid(), buf, state.time() + T::from_count(steps) * dt)
}

fn mul_assign<T: Real>(buf: &mut [Complex<T>], factors: &[Complex<T>]) {
    for (z, f) in buf.iter_mut().zip(factors) {
        *z = *z * f;
    }
}

/// Dispatches on `spec`: spectral evolution when there is no potential, split-step otherwise.
pub fn evolve<T: Real>(state: &FuzzyState<T>, spec: &EvolutionSpec<T>) -> Result<FuzzyState<T>> {
    spec.validate(state.grid())?;
    match spec.potential {
        Some(_) => evolve_split_step(state, spec),
        None => evolve_spectral(state, spec.s, spec.m0, spec.t_final),
    }
}

/// Spectral derivative `p g` with `p = -i d/dx`.
pub fn momentum_operator_apply<T: Real>(state: &FuzzyState<T>) -> Result<FuzzyState<T>> {
    let grid = state.grid();
    let fourier = Fourier::new(grid.len());
    let mut buf = state.samples().to_vec();
    fourier.forward(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        *z = z.scale(grid.momentum(k));
    }
    fourier.inverse(&mut buf);
    FuzzyState::new(*grid, buf, state.time())
}

/// `<g|p|g> / <g|g>`.
pub fn momentum_expectation<T: Real>(state: &FuzzyState<T>) -> Result<T> {
    let pg = momentum_operator_apply(state)?;
    let n2 = state.norm2();
    if !(n2 > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    Ok(state.inner(&pg)?.re / n2)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FirstOrderRow<T> {
    pub t: T,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FirstOrderReport<T> {
    pub s: u32,
    pub p_window: T,
    pub rows: Vec<FirstOrderRow<T>>,
    /// Least-squares slope of `log residual` against `log t` over rows with `t > 0`.
    pub slope: T,
}

impl<T: Real> FirstOrderReport<T> {
    pub fn is_second_order(&self, tolerance: T) -> bool {
        (self.slope - T::lit(2.0)).abs() <= tolerance
    }
}

/// Compares the evolved spectrum with its first-order expansion `phi0 (1 - i F0 t)`.
///
/// For each `t` the residual is the max over `|p_k| <= p_window` of
/// `|phi(p,t) - phi0(p)(1 - i F0(p) t)|`, scaled by the window's peak `|phi0|` so that a
/// lone source at the origin has `phi0 = 1`. `phi(p,t)` comes from actually evolving the
/// regularized source state, not from the closed-form symbol.
pub fn first_order_check<T: Real>(
    grid: &Grid<T>,
    spec: &SourceSpec<T>,
    s: u32,
    m0: T,
    times: &[T],
    p_window: T,
) -> Result<FirstOrderReport<T>> {
    let plan = SpectralPlan::new(grid, s, m0)?;
    if !(p_window > T::zero()) || p_window > grid.nyquist() {
        return Err(Error::InvalidArgument(format!(
            "momentum window {p_window} must lie in (0, {}]",
            grid.nyquist()
        )));
    }
    let f_max = free_symbol(p_window, s, m0);
    for &t in times {
        if !(t >= T::zero()) {
            return Err(Error::InvalidArgument(format!("negative time {t}")));
        }
        if f_max * t > T::lit(FIRST_ORDER_MAX_PHASE) {
            return Err(Error::ExpansionRegime(format!(
                "F0(p_window) t = {} exceeds {FIRST_ORDER_MAX_PHASE}",
                f_max * t
            )));
        }
    }

    let g0 = build_source_state(grid, spec)?;
    let phi0 = plan.momentum_amplitudes(&g0)?;
    let window: Vec<usize> = (0..grid.len())
        .filter(|&k| grid.momentum(k).abs() <= p_window)
        .collect();
    let scale = window
        .iter()
        .map(|&k| phi0[k].norm())
        .fold(T::zero(), T::max);
    if !(scale > T::zero()) {
        return Err(Error::ZeroNorm);
    }

    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        let gt = plan.evolve(&g0, t)?;
        let phi = plan.momentum_amplitudes(&gt)?;
        let residual = window
            .iter()
            .map(|&k| {
                let linear = phi0[k] * Complex::new(T::one(), -plan.symbol()[k] * t);
                (phi[k] - linear).norm()
            })
            .fold(T::zero(), T::max)
            / scale;
        rows.push(FirstOrderRow { t, residual });
    }

    let pts: Vec<(T, T)> = rows
        .iter()
        .filter(|r| r.t > T::zero() && r.residual > T::zero())
        .map(|r| (r.t.ln(), r.residual.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        crate::analysis::linear_fit(&pts).0
    } else {
        T::nan()
    };
    Ok(FirstOrderReport {
        s,
        p_window,
        rows,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gaussian_free_closed_form;

    fn grid() -> Grid<f64> {
        Grid::new(-50.0, 50.0, 1024).unwrap()
    }

    #[test]
    fn rejects_odd_exponent() {
        assert!(SpectralPlan::new(&grid(), 3, 1.0).is_err());
        assert!(SpectralPlan::new(&grid(), 0, 1.0).is_err());
        assert!(SpectralPlan::new(&grid(), 2, -1.0).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let g = gaussian_free_closed_form(1.0, 0.0, 0.5, 1.0, 0.0, &grid()).unwrap();
        let out = evolve_spectral(&g, 2, 1.0, 0.0).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn plane_wave_acquires_global_phase() {
        let grid = grid();
        let k = 7;
        let p = grid.momentum(k);
        let pw = FuzzyState::plane_wave(grid, k);
        let t = 0.9;
        let out = evolve_spectral(&pw, 2, 1.0, t).unwrap();
        let expected = pw.scaled(Complex::from_polar(1.0, -p * p * t / 2.0));
        assert!(out.max_abs_difference(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn phase_table_is_unitary() {
        let plan = SpectralPlan::new(&grid(), 6, 0.7).unwrap();
        for f in plan.phase_table(3.3).factors() {
            assert!((f.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn drift_direction_follows_carrier() {
        let grid = grid();
        let g = gaussian_free_closed_form(1.0, 0.0, 2.0, 1.0, 0.0, &grid).unwrap();
        let out = evolve_spectral(&g, 2, 1.0, 3.0).unwrap();
        let mean: f64 = out
            .samples()
            .iter()
            .enumerate()
            .map(|(j, z)| grid.x(j) * z.norm_sqr())
            .sum::<f64>()
            * grid.dx();
        assert!((mean - 6.0).abs() < 1e-8, "mean = {mean}");
    }

    #[test]
    fn momentum_operator_on_plane_wave() {
        let grid = grid();
        for k in [0usize, 3, 500, 1020] {
            let pw = FuzzyState::plane_wave(grid, k);
            let out = momentum_operator_apply(&pw).unwrap();
            let expected = pw.scaled(Complex::new(grid.momentum(k), 0.0));
            assert!(out.max_abs_difference(&expected).unwrap() < 1e-11);
        }
    }

    #[test]
    fn momentum_expectation_matches_carrier() {
        let grid = grid();
        let real = gaussian_free_closed_form(1.0, 0.0, 0.0, 1.0, 0.0, &grid).unwrap();
        assert!(momentum_expectation(&real).unwrap().abs() < 1e-12);
        let moving = gaussian_free_closed_form(1.0, 3.0, 1.7, 1.0, 0.0, &grid).unwrap();
        assert!((momentum_expectation(&moving).unwrap() - 1.7).abs() < 1e-8);
    }

    #[test]
    fn split_step_validation() {
        let grid = grid();
        let g = gaussian_free_closed_form(1.0, 0.0, 0.0, 1.0, 0.0, &grid).unwrap();
        let v = vec![0.0; grid.len()];
        let no_pot = EvolutionSpec::free(2, 1.0, 1.0);
        assert!(evolve_split_step(&g, &no_pot).is_err());
        let bad_dt = EvolutionSpec::free(2, 1.0, 1.0).with_potential(v.clone(), 0.0);
        assert!(evolve_split_step(&g, &bad_dt).is_err());
        let not_dividing = EvolutionSpec::free(2, 1.0, 1.0).with_potential(v.clone(), 0.3);
        assert!(evolve_split_step(&g, &not_dividing).is_err());
        let mut nan = v;
        nan[3] = f64::NAN;
        let nan_spec = EvolutionSpec::free(2, 1.0, 1.0).with_potential(nan, 0.1);
        assert!(evolve_split_step(&g, &nan_spec).is_err());
    }

    #[test]
    fn split_step_without_potential_is_spectral() {
        let grid = grid();
        let g = gaussian_free_closed_form(1.0, -2.0, 1.0, 1.0, 0.0, &grid).unwrap();
        let spec = EvolutionSpec::free(2, 1.0, 2.0).with_potential(vec![0.0; grid.len()], 0.01);
        let a = evolve_split_step(&g, &spec).unwrap();
        let b = evolve_spectral(&g, 2, 1.0, 2.0).unwrap();
        assert!(a.max_abs_difference(&b).unwrap() < 1e-12);
        assert!((a.time() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn first_order_zero_time_has_zero_residual() {
        let grid = grid();
        let spec = SourceSpec::single(0.0, 0.2);
        let r = first_order_check(&grid, &spec, 2, 1.0, &[0.0, 1e-3, 5e-4], 2.0).unwrap();
        assert_eq!(r.rows[0].residual, 0.0);
        assert!(r.is_second_order(0.1), "slope {}", r.slope);
    }

    #[test]
    fn first_order_rejects_large_phase() {
        let grid = grid();
        let spec = SourceSpec::single(0.0, 0.2);
        let err = first_order_check(&grid, &spec, 2, 1.0, &[1.0], 2.0).unwrap_err();
        assert!(matches!(err, Error::ExpansionRegime(_)));
    }
}
