//! Thin wrapper over `rustfft` fixing the transform convention.
//!
//! Forward: `c_k = sum_j g_j exp(-2*pi*i*j*k/n)`. Inverse carries the `1/n`, so
//! `inverse(forward(g)) == g` up to round-off and plane waves `exp(i*p_k*x)` map to
//! single bins.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::real::Real;

pub struct Fourier<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    n: usize,
}

impl<T: Real> Fourier<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.n);
        self.forward.process(buf);
    }

    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inverse.process(buf);
        let scale = T::one() / T::from_count(self.n);
        for v in buf.iter_mut() {
            *v = v.scale(scale);
        }
    }
}

impl<T: Real> std::fmt::Debug for Fourier<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("n", &self.n).finish()
    }
}
