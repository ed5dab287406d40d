//! δ-sequence functionals `I(chi, t) = sum chi(x_j) g(x_j, t) dx`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::FuzzyState;

/// Gaussian test functions are treated as supported on `center +/- GAUSSIAN_REACH * width`.
pub const GAUSSIAN_REACH: f64 = 8.0;

/// Built-in test functions, all normalized to `chi(center) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction<T> {
    /// `exp(-(x - center)^2 / (2 width^2))`.
    Gaussian { center: T, width: T },
    /// `exp(1 - 1/(1 - r^2))` for `r = (x - center)/radius`, `|r| < 1`; zero outside.
    Bump { center: T, radius: T },
    /// `chi = 1` on the whole grid.
    Unit,
}

impl<T: Real> TestFunction<T> {
    pub fn eval(&self, x: T) -> T {
        match *self {
            TestFunction::Gaussian { center, width } => {
                let u = (x - center) / width;
                (-T::lit(0.5) * u * u).exp()
            }
            TestFunction::Bump { center, radius } => {
                let r = (x - center) / radius;
                let r2 = r * r;
                if r2 >= T::one() {
                    T::zero()
                } else {
                    (T::one() - T::one() / (T::one() - r2)).exp()
                }
            }
            TestFunction::Unit => T::one(),
        }
    }

    pub fn center(&self) -> T {
        match *self {
            TestFunction::Gaussian { center, .. } | TestFunction::Bump { center, .. } => center,
            TestFunction::Unit => T::zero(),
        }
    }

    /// Interval outside which `chi` is (numerically) zero.
    pub fn support(&self) -> (T, T) {
        match *self {
            TestFunction::Gaussian { center, width } => {
                let r = T::lit(GAUSSIAN_REACH) * width;
                (center - r, center + r)
            }
            TestFunction::Bump { center, radius } => (center - radius, center + radius),
            TestFunction::Unit => (T::neg_infinity(), T::infinity()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scale = match *self {
            TestFunction::Gaussian { width, .. } => width,
            TestFunction::Bump { radius, .. } => radius,
            TestFunction::Unit => return Ok(()),
        };
        if !(scale > T::zero()) || !scale.is_finite() || !self.center().is_finite() {
            return Err(Error::InvalidArgument(format!(
                "test function needs a finite center and positive scale, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// `I(chi) = sum chi(x_j) g(x_j) dx`.
pub fn delta_functional<T: Real>(state: &FuzzyState<T>, chi: &TestFunction<T>) -> Result<Complex<T>> {
    chi.validate()?;
    let grid = state.grid();
    let (lo, hi) = chi.support();
    if *chi != TestFunction::Unit && (lo < grid.x_min() || hi > grid.x_max()) {
        return Err(Error::TestFunctionSupport(format!(
            "[{lo}, {hi}] not inside [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let acc = state
        .samples()
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (j, g)| {
            acc + g.scale(chi.eval(grid.x(j)))
        });
    Ok(acc.scale(grid.dx()))
}

/// Rescales `state` so that `sum g dx = 1`, the normalization under which a shrinking
/// source forms a δ-sequence (an `L2`-normalized one integrates to zero in the limit).
pub fn unit_integral<T: Real>(state: &FuzzyState<T>) -> Result<FuzzyState<T>> {
    let i = state.integral();
    if !(i.norm() > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    Ok(state.scaled(i.inv()))
}

/// Exact `I(chi, t)` for a Gaussian test function against a unit-integral Gaussian source
/// of width `sigma_reg` at `x0` evolved freely (`s = 2`) for time `t`:
/// `width / sqrt(A) * exp(-(center - x0)^2 / (2 A))`, `A = width^2 + sigma_reg^2 + i t/m0`.
pub fn gaussian_delta_closed_form<T: Real>(
    width: T,
    center: T,
    x0: T,
    sigma_reg: T,
    m0: T,
    t: T,
) -> Complex<T> {
    let a = Complex::new(width * width + sigma_reg * sigma_reg, t / m0);
    let c = center - x0;
    let e = (Complex::new(-c * c, T::zero()) / a.scale(T::lit(2.0))).exp();
    e * a.sqrt().inv().scale(width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::source::{build_source_state, SourceSpec};

    #[test]
    fn test_functions_peak_at_one() {
        let g = TestFunction::Gaussian { center: 1.0, width: 0.5 };
        let b = TestFunction::Bump { center: -2.0, radius: 1.5 };
        assert_eq!(g.eval(1.0), 1.0);
        assert_eq!(b.eval(-2.0), 1.0);
        assert_eq!(b.eval(-0.5), 0.0);
        assert_eq!(b.eval(5.0), 0.0);
        assert!(b.eval(-1.0) > 0.0);
    }

    #[test]
    fn narrow_source_picks_out_value() {
        let grid = Grid::<f64>::new(-20.0, 20.0, 8192).unwrap();
        let s = unit_integral(&build_source_state(&grid, &SourceSpec::single(0.7, 0.02)).unwrap()).unwrap();
        for chi in [
            TestFunction::Gaussian { center: 0.0, width: 1.0 },
            TestFunction::Bump { center: 0.3, radius: 2.0 },
        ] {
            let i = delta_functional(&s, &chi).unwrap();
            assert!((i.re - chi.eval(0.7)).abs() < 1e-3, "{i} vs {}", chi.eval(0.7));
            assert!(i.im.abs() < 1e-15);
        }
    }

    #[test]
    fn unit_test_function_integrates() {
        let grid = Grid::new(-20.0, 20.0, 4096).unwrap();
        let s = build_source_state(&grid, &SourceSpec::single(0.0, 0.5)).unwrap();
        let i = delta_functional(&s, &TestFunction::Unit).unwrap();
        assert!((i - s.integral()).norm() < 1e-15);
    }

    #[test]
    fn support_outside_grid_rejected() {
        let grid = Grid::new(-5.0, 5.0, 256).unwrap();
        let s = FuzzyState::zeros(grid);
        let chi = TestFunction::Gaussian { center: 0.0, width: 1.0 };
        assert!(matches!(
            delta_functional(&s, &chi),
            Err(Error::TestFunctionSupport(_))
        ));
    }

    #[test]
    fn closed_form_zero_time() {
        let v = gaussian_delta_closed_form(1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }
}
