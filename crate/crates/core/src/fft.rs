//! Three-dimensional complex FFT built from 1-D rustfft plans.
//!
//! Lines along each axis are transformed independently and in parallel;
//! results are bitwise deterministic regardless of thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Fft3 {
    pub dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = [
            planner.plan_fft_forward(dims[0]),
            planner.plan_fft_forward(dims[1]),
            planner.plan_fft_forward(dims[2]),
        ];
        let inverse = [
            planner.plan_fft_inverse(dims[0]),
            planner.plan_fft_inverse(dims[1]),
            planner.plan_fft_inverse(dims[2]),
        ];
        Fft3 {
            dims,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    /// Inverse transform including the 1/N normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, false);
        let scale = 1.0 / self.len() as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, data: &mut [Complex64], fwd: bool) {
        assert_eq!(data.len(), self.len(), "field length does not match plan");
        let [n1, n2, n3] = self.dims;

        // axis 2 (contiguous lines)
        let plan = if fwd { &self.forward[2] } else { &self.inverse[2] };
        data.par_chunks_mut(n3).for_each(|line| plan.process(line));

        // axis 1: lines with stride n3 inside each (i1) slab
        let plan = if fwd { &self.forward[1] } else { &self.inverse[1] };
        data.par_chunks_mut(n2 * n3).for_each(|slab| {
            let mut scratch = vec![Complex64::ZERO; n2];
            for k in 0..n3 {
                for j in 0..n2 {
                    scratch[j] = slab[j * n3 + k];
                }
                plan.process(&mut scratch);
                for j in 0..n2 {
                    slab[j * n3 + k] = scratch[j];
                }
            }
        });

        // axis 0: stride n2*n3; parallelize over (i2) to keep chunks disjoint
        let plan = if fwd { &self.forward[0] } else { &self.inverse[0] };
        let stride = n2 * n3;
        let ptr = SendPtr(data.as_mut_ptr());
        (0..n2).into_par_iter().for_each(|j| {
            let ptr = &ptr;
            let mut scratch = vec![Complex64::ZERO; n1];
            for k in 0..n3 {
                let off = j * n3 + k;
                unsafe {
                    for i in 0..n1 {
                        scratch[i] = *ptr.0.add(i * stride + off);
                    }
                }
                plan.process(&mut scratch);
                unsafe {
                    for i in 0..n1 {
                        *ptr.0.add(i * stride + off) = scratch[i];
                    }
                }
            }
        });
    }
}

// Each (j, k) line is touched by exactly one task, so the raw-pointer
// writes never alias.
struct SendPtr(*mut Complex64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}
