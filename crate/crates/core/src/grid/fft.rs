//! 3D complex FFT passes built on rustfft, with the lane handling for each
//! axis of the `[comp][z][y][x]` layout (x contiguous).

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

use crate::real::Real;

pub fn plan<T: Real>(n: usize, dir: FftDirection) -> Arc<dyn Fft<T>> {
    let mut planner = FftPlanner::new();
    planner.plan_fft(n, dir)
}

/// In-place FFT along every axis of each component of a `[comp][z][y][x]` cube.
pub fn fft3d<T: Real>(data: &mut [Complex<T>], n: usize, ncomp: usize, dir: FftDirection) {
    debug_assert_eq!(data.len(), ncomp * n * n * n);
    let fft = plan::<T>(n, dir);
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    for c in 0..ncomp {
        let cube = &mut data[c * n * n * n..(c + 1) * n * n * n];
        fft_axis_x(cube, n, fft.as_ref(), &mut scratch);
        fft_axis_y(cube, n, fft.as_ref(), &mut scratch);
        fft_axis_z(cube, n, fft.as_ref(), &mut scratch);
    }
}

fn fft_axis_x<T: Real>(cube: &mut [Complex<T>], n: usize, fft: &dyn Fft<T>, scratch: &mut [Complex<T>]) {
    for lane in cube.chunks_exact_mut(n) {
        fft.process_with_scratch(lane, scratch);
    }
}

fn fft_axis_y<T: Real>(cube: &mut [Complex<T>], n: usize, fft: &dyn Fft<T>, scratch: &mut [Complex<T>]) {
    // Lanes run along y with stride n inside each z-plane. Transpose the
    // plane so lanes become contiguous, run the batch, transpose back.
    let mut plane = vec![Complex::new(T::zero(), T::zero()); n * n];
    for z in 0..n {
        let base = z * n * n;
        for y in 0..n {
            for x in 0..n {
                plane[x * n + y] = cube[base + y * n + x];
            }
        }
        for lane in plane.chunks_exact_mut(n) {
            fft.process_with_scratch(lane, scratch);
        }
        for y in 0..n {
            for x in 0..n {
                cube[base + y * n + x] = plane[x * n + y];
            }
        }
    }
}

fn fft_axis_z<T: Real>(cube: &mut [Complex<T>], n: usize, fft: &dyn Fft<T>, scratch: &mut [Complex<T>]) {
    // Lanes run along z with stride n*n. Work one y-row at a time: gather the
    // [z][x] slab into [x][z] scratch, run, scatter back.
    let mut slab = vec![Complex::new(T::zero(), T::zero()); n * n];
    for y in 0..n {
        for z in 0..n {
            let base = z * n * n + y * n;
            for x in 0..n {
                slab[x * n + z] = cube[base + x];
            }
        }
        for lane in slab.chunks_exact_mut(n) {
            fft.process_with_scratch(lane, scratch);
        }
        for z in 0..n {
            let base = z * n * n + y * n;
            for x in 0..n {
                cube[base + x] = slab[x * n + z];
            }
        }
    }
}
