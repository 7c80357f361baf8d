//! Scaled-frequency DFT (chirp-z / Bluestein): evaluates the box Fourier
//! sum of a grid field at the contracted frequencies tau * xi_k, exactly.
//!
//! This is how the Duhamel integrand F_hat(sqrt(s) xi) is produced: for each
//! quadrature node the grid data is transformed once per axis with stride
//! factor tau = sqrt(s). Resampling the field in physical space would alias
//! catastrophically as s -> 0; the chirp-z route has no such regime.

use num_complex::Complex;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

use crate::grid::{GridSpec, RealField, SpectralField};
use crate::real::Real;

/// Precomputed tables for one (n, tau) pair; valid for every axis and lane.
pub struct CztPlan<T: Real> {
    n: usize,
    npad: usize,
    kmax: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// a-side chirp: W^{m^2/2}, m in 0..n.
    pre: Vec<Complex<T>>,
    /// FFT of the convolution chirp W^{-p^2/2}, scaled by 1/npad.
    chirp_hat: Vec<Complex<T>>,
    /// Output phase e^{i pi tau k} W^{k^2/2} / n for k in [-kmax, kmax].
    post: Vec<Complex<T>>,
}

/// Scratch buffers reused across lanes.
pub struct CztScratch<T: Real> {
    padded: Vec<Complex<T>>,
    fft_scratch: Vec<Complex<T>>,
}

impl<T: Real> CztPlan<T> {
    pub fn new(n: usize, tau: f64) -> Self {
        assert!(n.is_power_of_two());
        let npad = 2 * n;
        let kmax = n / 2;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft(npad, FftDirection::Forward);
        let inv = planner.plan_fft(npad, FftDirection::Inverse);

        // W = exp(-2 pi i tau / n); phases evaluated in f64.
        let w_angle = -2.0 * std::f64::consts::PI * tau / n as f64;
        let chirp = |e: f64| -> Complex<T> {
            let (s, c) = (w_angle * e).sin_cos();
            Complex::new(T::of(c), T::of(s))
        };

        let pre: Vec<Complex<T>> = (0..n).map(|m| chirp((m * m) as f64 / 2.0)).collect();

        // b[p] = W^{-p^2/2} for p = k - m in [-(3n/2)+1, n/2], wrapped mod npad
        // (k up to +n/2 with m = 0); the 2n values are distinct mod 2n.
        let mut b = vec![Complex::new(T::zero(), T::zero()); npad];
        let lo = -(3 * n as i64) / 2 + 1;
        let hi = n as i64 / 2;
        for p in lo..=hi {
            let j = p.rem_euclid(npad as i64) as usize;
            b[j] = chirp(-((p * p) as f64) / 2.0);
        }
        let mut chirp_hat = b;
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); fwd.get_inplace_scratch_len()];
        fwd.process_with_scratch(&mut chirp_hat, &mut scratch);
        let scale = T::one() / T::of(npad as f64);
        for z in &mut chirp_hat {
            *z = *z * scale;
        }

        // post[k] includes the -L grid offset phase and the 1/n normalization.
        let inv_n = 1.0 / n as f64;
        let post: Vec<Complex<T>> = (-(kmax as i64)..=kmax as i64)
            .map(|k| {
                let ang =
                    std::f64::consts::PI * tau * k as f64 + w_angle * (k * k) as f64 / 2.0;
                let (s, c) = ang.sin_cos();
                Complex::new(T::of(c * inv_n), T::of(s * inv_n))
            })
            .collect();

        Self {
            n,
            npad,
            kmax,
            fwd,
            inv,
            pre,
            chirp_hat,
            post,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scratch(&self) -> CztScratch<T> {
        let len = self
            .fwd
            .get_inplace_scratch_len()
            .max(self.inv.get_inplace_scratch_len());
        CztScratch {
            padded: vec![Complex::new(T::zero(), T::zero()); self.npad],
            fft_scratch: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    fn post_at(&self, k: i64) -> Complex<T> {
        self.post[(k + self.kmax as i64) as usize]
    }

    /// Core Bluestein convolution; afterwards `scratch.padded[k mod npad]`
    /// holds the un-postprocessed output for every k.
    fn convolve(&self, scratch: &mut CztScratch<T>) {
        self.fwd
            .process_with_scratch(&mut scratch.padded, &mut scratch.fft_scratch);
        for (z, c) in scratch.padded.iter_mut().zip(&self.chirp_hat) {
            *z = *z * *c;
        }
        self.inv
            .process_with_scratch(&mut scratch.padded, &mut scratch.fft_scratch);
    }

    /// Complex-lane transform: writes out[k + K] for k in [-K, K], K = `kcut`.
    pub fn lane(
        &self,
        input: &[Complex<T>],
        out: &mut [Complex<T>],
        kcut: usize,
        scratch: &mut CztScratch<T>,
    ) {
        debug_assert_eq!(input.len(), self.n);
        debug_assert_eq!(out.len(), 2 * kcut + 1);
        debug_assert!(kcut <= self.kmax);
        for (j, z) in scratch.padded.iter_mut().enumerate() {
            *z = if j < self.n {
                input[j] * self.pre[j]
            } else {
                Complex::new(T::zero(), T::zero())
            };
        }
        self.convolve(scratch);
        for k in -(kcut as i64)..=kcut as i64 {
            let j = k.rem_euclid(self.npad as i64) as usize;
            out[(k + kcut as i64) as usize] = scratch.padded[j] * self.post_at(k);
        }
    }

    /// Two real lanes packed as re + i im; writes the nonnegative half
    /// k in [0, K] of each (real input makes the lane transform Hermitian).
    pub fn lane_pair_real(
        &self,
        in_a: &[T],
        in_b: &[T],
        out_a: &mut [Complex<T>],
        out_b: &mut [Complex<T>],
        kcut: usize,
        scratch: &mut CztScratch<T>,
    ) {
        debug_assert_eq!(in_a.len(), self.n);
        debug_assert_eq!(out_a.len(), kcut + 1);
        for (j, z) in scratch.padded.iter_mut().enumerate() {
            *z = if j < self.n {
                Complex::new(in_a[j], in_b[j]) * self.pre[j]
            } else {
                Complex::new(T::zero(), T::zero())
            };
        }
        self.convolve(scratch);
        let half = T::of(0.5);
        for k in 0..=kcut as i64 {
            let zp = scratch.padded[k.rem_euclid(self.npad as i64) as usize] * self.post_at(k);
            let zm = scratch.padded[(-k).rem_euclid(self.npad as i64) as usize] * self.post_at(-k);
            let zmc = zm.conj();
            let a = (zp + zmc) * half;
            // b = (zp - conj(zm)) / (2i) = -i (zp - conj(zm)) / 2
            let d = (zp - zmc) * half;
            let b = Complex::new(d.im, -d.re);
            out_a[k as usize] = a;
            out_b[k as usize] = b;
        }
    }
}

/// Half-spectrum block of scaled-frequency coefficients:
/// `c[(k1, k2, k3)] = n^-3 sum_m f_m exp(-i tau xi_k . x_m)` for
/// k1 in [0, K], k2, k3 in [-K, K]. Negative k1 follows from
/// `c(-k1, k2, k3) = conj(c(k1, -k2, -k3))` since f is real.
pub struct ScaledHalfSpectrum<T> {
    pub kcut: usize,
    pub ncomp: usize,
    /// Layout: `[comp][k1][k2 + K][k3 + K]`, k3 fastest.
    pub data: Vec<Complex<T>>,
}

impl<T: Real> ScaledHalfSpectrum<T> {
    pub fn block_len(kcut: usize) -> usize {
        (kcut + 1) * (2 * kcut + 1) * (2 * kcut + 1)
    }

    #[inline]
    pub fn index(&self, c: usize, k1: usize, k2: i64, k3: i64) -> usize {
        let m = 2 * self.kcut + 1;
        ((c * (self.kcut + 1) + k1) * m + (k2 + self.kcut as i64) as usize) * m
            + (k3 + self.kcut as i64) as usize
    }
}

/// Evaluate the scaled half-spectrum of a real field with per-axis cutoff
/// `kcut` (modes with any |k_d| > kcut are not produced).
pub fn scaled_half_spectrum<T: Real>(
    f: &RealField<T>,
    plan: &CztPlan<T>,
    kcut: usize,
) -> ScaledHalfSpectrum<T> {
    let n = plan.n;
    debug_assert_eq!(f.spec.n(), n);
    let kk = 2 * kcut + 1;
    let mut scratch = plan.scratch();

    let mut out = ScaledHalfSpectrum {
        kcut,
        ncomp: f.ncomp,
        data: vec![
            Complex::new(T::zero(), T::zero());
            f.ncomp * ScaledHalfSpectrum::<T>::block_len(kcut)
        ],
    };

    // tmp1[k1][z][y] after pass 1 (x -> k1, k1 >= 0), y fastest.
    let mut tmp1 = vec![Complex::new(T::zero(), T::zero()); (kcut + 1) * n * n];
    // tmp2[k1][k2][z] after pass 2 (y -> k2), z fastest.
    let mut tmp2 = vec![Complex::new(T::zero(), T::zero()); (kcut + 1) * kk * n];
    let mut lane_in = vec![Complex::new(T::zero(), T::zero()); n];
    let mut lane_out = vec![Complex::new(T::zero(), T::zero()); kk];
    let mut half_a = vec![Complex::new(T::zero(), T::zero()); kcut + 1];
    let mut half_b = vec![Complex::new(T::zero(), T::zero()); kcut + 1];

    for c in 0..f.ncomp {
        let cube = f.comp(c);

        // Pass 1 along x: real lanes two at a time.
        for z in 0..n {
            let mut y = 0;
            while y < n {
                let la = &cube[(z * n + y) * n..(z * n + y + 1) * n];
                let lb = &cube[(z * n + y + 1) * n..(z * n + y + 2) * n];
                plan.lane_pair_real(la, lb, &mut half_a, &mut half_b, kcut, &mut scratch);
                for k1 in 0..=kcut {
                    tmp1[(k1 * n + z) * n + y] = half_a[k1];
                    tmp1[(k1 * n + z) * n + y + 1] = half_b[k1];
                }
                y += 2;
            }
        }

        // Pass 2 along y.
        for k1 in 0..=kcut {
            for z in 0..n {
                let lane = &tmp1[(k1 * n + z) * n..(k1 * n + z + 1) * n];
                plan.lane(lane, &mut lane_out, kcut, &mut scratch);
                for (i2, v) in lane_out.iter().enumerate() {
                    tmp2[(k1 * kk + i2) * n + z] = *v;
                }
            }
        }

        // Pass 3 along z.
        for k1 in 0..=kcut {
            for i2 in 0..kk {
                lane_in.copy_from_slice(&tmp2[(k1 * kk + i2) * n..(k1 * kk + i2 + 1) * n]);
                plan.lane(&lane_in, &mut lane_out, kcut, &mut scratch);
                let base = ((c * (kcut + 1) + k1) * kk + i2) * kk;
                out.data[base..base + kk].copy_from_slice(&lane_out);
            }
        }
    }
    out
}

/// Full-cube scaled spectrum (testing convenience): the same coefficients
/// assembled into a `SpectralField` in FFT bin order.
pub fn scaled_spectrum_full<T: Real>(f: &RealField<T>, tau: f64) -> SpectralField<T> {
    let spec: GridSpec<T> = f.spec;
    let n = spec.n();
    let plan = CztPlan::<T>::new(n, tau);
    let half = scaled_half_spectrum(f, &plan, n / 2);
    let mut out = SpectralField::zeros(spec, f.ncomp);
    let npts = spec.points_per_comp();
    for c in 0..f.ncomp {
        for bz in 0..n {
            let k3 = spec.signed_k(bz);
            for by in 0..n {
                let k2 = spec.signed_k(by);
                for bx in 0..n {
                    let k1 = spec.signed_k(bx);
                    let v = if k1 >= 0 {
                        half.data[half.index(c, k1 as usize, k2, k3)]
                    } else {
                        half.data[half.index(c, (-k1) as usize, -k2, -k3)].conj()
                    };
                    out.data[c * npts + (bz * n + by) * n + bx] = v;
                }
            }
        }
    }
    out
}
