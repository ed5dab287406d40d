use serde::Serialize;

use super::density::{density, Density, SignedField};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::state::FuzzyState;

/// Absolute slack on the pointwise cross-term bound.
pub const BOUND_SLACK: f64 = 1e-12;

/// `w_s = w_m + l_g w_n`, split into its pieces.
#[derive(Debug, Clone)]
pub struct DecompositionResult<T> {
    /// Density of the coherent (pure) state.
    pub w_s: Density<T>,
    /// Sum of the member densities.
    pub w_m: Density<T>,
    /// Interference term `w_s - w_m`.
    pub w_n: SignedField<T>,
    /// `sum_{i<j} 2 sqrt(w_i w_j)` per grid point.
    pub cross_bound: Vec<T>,
    /// 1 for a pure state, 0 for a mixture.
    pub l_g: u8,
    /// Relative L2 size of the least-squares projection of `w_n` onto the member densities.
    pub projection_coeff: T,
    pub member_densities: Vec<Density<T>>,
}

/// Serialized form of a [`DecompositionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionSummary<T> {
    pub l_g: u8,
    pub w_n_integral: T,
    pub w_n_min: T,
    pub w_n_max: T,
    pub projection_coeff: T,
    /// `max_x (|w_n| - sum 2 sqrt(w_i w_j))`; nonpositive when the bound holds.
    pub bound_max_excess: T,
    pub bound_ok: bool,
}

impl<T: Real> DecompositionResult<T> {
    pub fn bound_max_excess(&self) -> T {
        self.w_n
            .samples()
            .iter()
            .zip(&self.cross_bound)
            .map(|(n, b)| n.abs() - *b)
            .fold(T::neg_infinity(), T::max)
    }

    pub fn bound_holds(&self) -> bool {
        self.bound_max_excess() <= T::lit(BOUND_SLACK)
    }

    pub fn summary(&self) -> DecompositionSummary<T> {
        let excess = self.bound_max_excess();
        DecompositionSummary {
            l_g: self.l_g,
            w_n_integral: self.w_n.integral(),
            w_n_min: self.w_n.min(),
            w_n_max: self.w_n.max(),
            projection_coeff: self.projection_coeff,
            bound_max_excess: excess,
            bound_ok: excess <= T::lit(BOUND_SLACK),
        }
    }
}

/// Splits the density of `pure` into the member densities and the interference term.
///
/// The members must be the evolved single-source pieces of the same preparation, carrying
/// their weights in their norms (see [`crate::source::source_components`]); then
/// `w_n = 2 Re sum_{i<j} conj(g_i) g_j` exactly.
pub fn decompose<T: Real>(
    pure: &FuzzyState<T>,
    members: &[FuzzyState<T>],
) -> Result<DecompositionResult<T>> {
    if members.is_empty() {
        return Err(Error::InvalidArgument("no member states given".into()));
    }
    let tol = T::lit(1e-12) * pure.time().abs().max(T::one());
    for (i, m) in members.iter().enumerate() {
        pure.check_same_grid(m)
            .map_err(|_| Error::Mismatch(format!("member {i} is on a different grid")))?;
        if (m.time() - pure.time()).abs() > tol {
            return Err(Error::Mismatch(format!(
                "member {i} has timestamp {} but the pure state has {}",
                m.time(),
                pure.time()
            )));
        }
    }
    let grid = *pure.grid();
    let w_s = density(pure);
    let member_densities: Vec<Density<T>> = members.iter().map(density).collect();
    let n = grid.len();

    let mut w_m = vec![T::zero(); n];
    for d in &member_densities {
        for (a, v) in w_m.iter_mut().zip(d.samples()) {
            *a = *a + *v;
        }
    }
    let w_n: Vec<T> = w_s.samples().iter().zip(&w_m).map(|(s, m)| *s - *m).collect();

    let mut cross_bound = vec![T::zero(); n];
    for a in 0..member_densities.len() {
        for b in a + 1..member_densities.len() {
            let (wa, wb) = (member_densities[a].samples(), member_densities[b].samples());
            for j in 0..n {
                cross_bound[j] = cross_bound[j] + T::lit(2.0) * (wa[j] * wb[j]).sqrt();
            }
        }
    }

    let projection_coeff = projection_fraction(&w_n, &member_densities);
    Ok(DecompositionResult {
        w_s,
        w_m: Density::new(grid, w_m)?,
        w_n: SignedField::new(grid, w_n),
        cross_bound,
        l_g: 1,
        projection_coeff,
        member_densities,
    })
}

/// `||P w_n|| / ||w_n||`, with `P` the orthogonal projector onto `span{w_i}`.
fn projection_fraction<T: Real>(w_n: &[T], basis: &[Density<T>]) -> T {
    let norm_n: T = w_n.iter().map(|v| *v * *v).sum::<T>().sqrt();
    if !(norm_n > T::zero()) {
        return T::zero();
    }
    let k = basis.len();
    let mut gram = vec![vec![T::zero(); k]; k];
    let mut rhs = vec![T::zero(); k];
    for a in 0..k {
        let wa = basis[a].samples();
        rhs[a] = wa.iter().zip(w_n).map(|(x, y)| *x * *y).sum();
        for b in a..k {
            let wb = basis[b].samples();
            let v: T = wa.iter().zip(wb).map(|(x, y)| *x * *y).sum();
            gram[a][b] = v;
            gram[b][a] = v;
        }
    }
    let coeffs = solve_symmetric(gram, rhs);
    let n = w_n.len();
    let mut proj = vec![T::zero(); n];
    for (c, d) in coeffs.iter().zip(basis) {
        for (p, v) in proj.iter_mut().zip(d.samples()) {
            *p = *p + *c * *v;
        }
    }
    proj.iter().map(|v| *v * *v).sum::<T>().sqrt() / norm_n
}

/// Gaussian elimination with partial pivoting; directions with a vanishing pivot
/// (linearly dependent members) get a zero coefficient.
fn solve_symmetric<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Vec<T> {
    let k = b.len();
    let scale = a
        .iter()
        .enumerate()
        .map(|(i, r)| r[i].abs())
        .fold(T::zero(), T::max);
    let eps = scale * T::lit(1e-13);
    let mut active = vec![true; k];
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() <= eps {
            active[col] = false;
            continue;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] = a[row][c] - f * a[col][c];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); k];
    for row in (0..k).rev() {
        if !active[row] {
            continue;
        }
        let mut s = b[row];
        for c in row + 1..k {
            s = s - a[row][c] * x[c];
        }
        x[row] = s / a[row][row];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::source::{build_source_state, source_components, SourceSpec};
    use crate::spectral::evolve_spectral;

    fn evolved_pair(w1: f64, t: f64) -> (FuzzyState<f64>, Vec<FuzzyState<f64>>) {
        let grid = Grid::new(-50.0, 50.0, 4096).unwrap();
        let spec = SourceSpec::new(
            vec![
                crate::source::PointSource::new(-5.0, w1, 0.0),
                crate::source::PointSource::new(5.0, 1.0 - w1, 0.0),
            ],
            0.5,
        );
        let pure = evolve_spectral(&build_source_state(&grid, &spec).unwrap(), 2, 1.0, t).unwrap();
        let members = source_components(&grid, &spec)
            .unwrap()
            .iter()
            .map(|c| evolve_spectral(c, 2, 1.0, t).unwrap())
            .collect();
        (pure, members)
    }

    #[test]
    fn interference_term_integrates_to_zero_and_dips_negative() {
        let (pure, members) = evolved_pair(0.5, 2.0);
        let d = decompose(&pure, &members).unwrap();
        let s = d.summary();
        assert!(s.w_n_integral.abs() <= 1e-8, "{}", s.w_n_integral);
        assert!(s.w_n_min < 0.0);
        assert!(s.bound_ok, "excess {}", s.bound_max_excess);
        assert_eq!(s.l_g, 1);
    }

    #[test]
    fn vanishing_weight_kills_interference() {
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-4, 1e-6] {
            let (pure, members) = evolved_pair(1.0 - eps, 2.0);
            let m = decompose(&pure, &members).unwrap().w_n.max_abs();
            assert!(m < last);
            last = m;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn mismatched_timestamps_rejected() {
        let (pure, mut members) = evolved_pair(0.5, 2.0);
        members[1] = members[1].clone().with_time(1.0);
        assert!(matches!(decompose(&pure, &members), Err(Error::Mismatch(_))));
    }

    #[test]
    fn projection_of_member_combination_is_total() {
        let grid = Grid::<f64>::new(-10.0, 10.0, 256).unwrap();
        let a: Vec<f64> = (0..256).map(|j| (-(grid.x(j) - 1.0).powi(2)).exp()).collect();
        let b: Vec<f64> = (0..256).map(|j| (-(grid.x(j) + 1.0).powi(2)).exp()).collect();
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 0.5 * y).collect();
        let basis = vec![Density::new(grid, a).unwrap(), Density::new(grid, b).unwrap()];
        assert!((projection_fraction(&combo, &basis) - 1.0).abs() < 1e-10);
        let dup = vec![basis[0].clone(), basis[0].clone()];
        assert!((projection_fraction(basis[0].samples(), &dup) - 1.0).abs() < 1e-10);
    }
}
