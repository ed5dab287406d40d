//! Weighted, phased point sources and the regularized initial states built from them.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::real::Real;
use crate::state::FuzzyState;

/// Tolerance on `sum(weight) == 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct PointSource<T> {
    pub x: T,
    pub weight: T,
    /// Phase in radians.
    #[serde(default)]
    pub phase: T,
}

impl<T: Real> PointSource<T> {
    pub fn new(x: T, weight: T, phase: T) -> Self {
        Self { x, weight, phase }
    }
}

/// Point sources smeared by a common Gaussian of width `sigma_reg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct SourceSpec<T> {
    pub points: Vec<PointSource<T>>,
    pub sigma_reg: T,
}

impl<T: Real> SourceSpec<T> {
    pub fn new(points: Vec<PointSource<T>>, sigma_reg: T) -> Self {
        Self { points, sigma_reg }
    }

    /// A single unit-weight, zero-phase source.
    pub fn single(x: T, sigma_reg: T) -> Self {
        Self::new(vec![PointSource::new(x, T::one(), T::zero())], sigma_reg)
    }

    /// Two equal-weight sources at `center -/+ separation/2` with phases `(0, relative_phase)`.
    pub fn pair(center: T, separation: T, relative_phase: T, sigma_reg: T) -> Self {
        let half = separation * T::lit(0.5);
        let w = T::lit(0.5);
        Self::new(
            vec![
                PointSource::new(center - half, w, T::zero()),
                PointSource::new(center + half, w, relative_phase),
            ],
            sigma_reg,
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self, grid: &Grid<T>) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidSource("no sources given".into()));
        }
        let mut total = T::zero();
        for (i, p) in self.points.iter().enumerate() {
            if !p.weight.is_finite() || p.weight < T::zero() {
                return Err(Error::InvalidSource(format!(
                    "weight of source {i} is {} (must be finite and >= 0)",
                    p.weight
                )));
            }
            if !p.phase.is_finite() {
                return Err(Error::InvalidSource(format!("phase of source {i} is not finite")));
            }
            if !grid.contains_strictly(p.x) {
                return Err(Error::InvalidSource(format!(
                    "source {i} at x = {} lies outside ({}, {})",
                    p.x,
                    grid.x_min(),
                    grid.x_max()
                )));
            }
            total = total + p.weight;
        }
        if (total - T::one()).abs() > T::lit(WEIGHT_SUM_TOL) {
            return Err(Error::InvalidSource(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        if !self.sigma_reg.is_finite() || self.sigma_reg < T::lit(2.0) * grid.dx() {
            return Err(Error::InvalidSource(format!(
                "sigma_reg = {} cannot be resolved; need at least 2*dx = {}",
                self.sigma_reg,
                T::lit(2.0) * grid.dx()
            )));
        }
        Ok(())
    }

    fn unnormalized_components(&self, grid: &Grid<T>) -> Vec<Vec<Complex<T>>> {
        let two_var = T::lit(2.0) * self.sigma_reg * self.sigma_reg;
        self.points
            .iter()
            .map(|p| {
                let coeff = Complex::from_polar(p.weight.sqrt(), p.phase);
                (0..grid.len())
                    .map(|j| {
                        let d = grid.periodic_displacement(grid.x(j), p.x);
                        coeff.scale((-d * d / two_var).exp())
                    })
                    .collect()
            })
            .collect()
    }
}

/// Builds `g0(x) = C * sum_i sqrt(w_i) exp(-(x-x_i)^2 / (2 sigma^2)) exp(i alpha_i)` with
/// `C` fixed so that `N2 = 1`. Distances are measured periodically.
pub fn build_source_state<T: Real>(grid: &Grid<T>, spec: &SourceSpec<T>) -> Result<FuzzyState<T>> {
    let components = source_components(grid, spec)?;
    let mut total = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for c in &components {
        for (acc, z) in total.iter_mut().zip(c.samples()) {
            *acc = *acc + z;
        }
    }
    FuzzyState::new(*grid, total, T::zero())
}

/// The individual terms of [`build_source_state`], sharing its normalization constant.
///
/// Their sum is the pure source state; each one is what a lone source contributes.
pub fn source_components<T: Real>(
    grid: &Grid<T>,
    spec: &SourceSpec<T>,
) -> Result<Vec<FuzzyState<T>>> {
    spec.validate(grid)?;
    let raw = spec.unnormalized_components(grid);
    let mut total = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for c in &raw {
        for (acc, z) in total.iter_mut().zip(c) {
            *acc = *acc + z;
        }
    }
    let n2: T = total.iter().map(|z| z.norm_sqr()).sum::<T>() * grid.dx();
    if !(n2 > T::zero()) {
        // Only reachable when sources cancel exactly.
        return Err(Error::ZeroNorm);
    }
    let c = T::one() / n2.sqrt();
    raw.into_iter()
        .map(|v| FuzzyState::new(*grid, v.into_iter().map(|z| z.scale(c)).collect(), T::zero()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct EnsembleMember<T> {
    pub probability: T,
    pub sources: SourceSpec<T>,
}

/// Probabilistic mixture of independently prepared source states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct EnsembleSpec<T> {
    pub members: Vec<EnsembleMember<T>>,
}

impl<T: Real> EnsembleSpec<T> {
    /// One member per source of `spec`, each a lone source with probability equal to its weight.
    pub fn incoherent(spec: &SourceSpec<T>) -> Self {
        let members = spec
            .points
            .iter()
            .map(|p| EnsembleMember {
                probability: p.weight,
                sources: SourceSpec::new(vec![PointSource::new(p.x, T::one(), p.phase)], spec.sigma_reg),
            })
            .collect();
        Self { members }
    }

    pub fn validate(&self, grid: &Grid<T>) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::InvalidSource("ensemble has no members".into()));
        }
        let mut total = T::zero();
        for (i, m) in self.members.iter().enumerate() {
            if !m.probability.is_finite() || m.probability < T::zero() {
                return Err(Error::InvalidSource(format!(
                    "probability of member {i} is {} (must be finite and >= 0)",
                    m.probability
                )));
            }
            m.sources.validate(grid)?;
            total = total + m.probability;
        }
        if (total - T::one()).abs() > T::lit(WEIGHT_SUM_TOL) {
            return Err(Error::InvalidSource(format!(
                "member probabilities sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid<f64> {
        Grid::new(-50.0, 50.0, 4096).unwrap()
    }

    #[test]
    fn single_source_is_normalized_gaussian() {
        let g = grid();
        let s = build_source_state(&g, &SourceSpec::single(0.0, 1.0)).unwrap();
        assert!((s.norm2() - 1.0).abs() < 1e-12);
        let peak = s
            .samples()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap()
            .0;
        assert_eq!(g.x(peak), 0.0);
        // analytic amplitude at the peak: (pi sigma^2)^(-1/4)
        assert!((s.samples()[peak].re - std::f64::consts::PI.powf(-0.25)).abs() < 1e-12);
        assert_eq!(s.time(), 0.0);
    }

    #[test]
    fn symmetric_pair_has_even_density() {
        let g = grid();
        let s = build_source_state(&g, &SourceSpec::pair(0.0, 10.0, 0.0, 0.5)).unwrap();
        let mid = g.nearest_index(0.0);
        for k in 1..1000 {
            let a = s.samples()[mid + k].norm_sqr();
            let b = s.samples()[mid - k].norm_sqr();
            assert!((a - b).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn antiphase_pair_vanishes_at_midpoint() {
        // sqrt(1/2) e^{-25/(2*0.25)} (1 + e^{i pi}) = 0 at x = 0, up to the sin(pi) round-off
        let g = grid();
        let spec = SourceSpec::pair(0.0, 10.0, std::f64::consts::PI, 0.5);
        let s = build_source_state(&g, &spec).unwrap();
        let mid = g.nearest_index(0.0);
        assert_eq!(g.x(mid), 0.0);
        assert!(s.samples()[mid].norm() < 1e-20);
    }

    #[test]
    fn components_sum_to_state() {
        let g = grid();
        let spec = SourceSpec::pair(1.0, 6.0, 0.7, 0.4);
        let s = build_source_state(&g, &spec).unwrap();
        let parts = source_components(&g, &spec).unwrap();
        let sum = parts[0].add(&parts[1]).unwrap();
        assert!(sum.max_abs_difference(&s).unwrap() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        let g = grid();
        let bad_sum = SourceSpec::new(
            vec![PointSource::new(-1.0, 0.45, 0.0), PointSource::new(1.0, 0.45, 0.0)],
            0.5,
        );
        let e = bad_sum.validate(&g).unwrap_err().to_string();
        assert!(e.contains("sum"), "{e}");
        assert!(SourceSpec::single(60.0, 0.5).validate(&g).is_err());
        assert!(SourceSpec::single(-50.0, 0.5).validate(&g).is_err());
        assert!(SourceSpec::single(0.0, g.dx()).validate(&g).is_err());
        let neg = SourceSpec::new(
            vec![PointSource::new(-1.0, 1.5, 0.0), PointSource::new(1.0, -0.5, 0.0)],
            0.5,
        );
        assert!(neg.validate(&g).is_err());
    }

    #[test]
    fn incoherent_ensemble_mirrors_weights() {
        let g = grid();
        let spec = SourceSpec::pair(0.0, 10.0, 0.0, 0.5);
        let e = EnsembleSpec::incoherent(&spec);
        e.validate(&g).unwrap();
        assert_eq!(e.members.len(), 2);
        assert_eq!(e.members[1].probability, 0.5);
    }
}
