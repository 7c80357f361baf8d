//! Periodic cubic grid: fields, Fourier transforms, differential operators,
//! Helmholtz-Leray projection, dealiasing and pressure recovery.

mod fft;

use num_complex::Complex;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::quad::pairwise_sum_by;
use crate::real::Real;

/// Cubic periodic grid on `[-L, L)^3` with `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    n: usize,
    l: T,
}

pub const ALLOWED_N: [usize; 4] = [32, 64, 128, 256];

impl<T: Real> GridSpec<T> {
    pub fn new(n: usize, l: T) -> Result<Self> {
        if !ALLOWED_N.contains(&n) {
            return Err(Error::Parameter(format!(
                "grid size {n} not in {ALLOWED_N:?}"
            )));
        }
        if !(l > T::zero()) {
            return Err(Error::Parameter("box half-width must be positive".into()));
        }
        Ok(Self { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> T {
        self.l
    }

    /// Grid spacing h = 2L/n.
    pub fn h(&self) -> T {
        T::of(2.0) * self.l / T::of(self.n as f64)
    }

    pub fn points_per_comp(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Physical coordinate of index i along one axis: x_i = -L + i h.
    pub fn coord(&self, i: usize) -> T {
        -self.l + T::of(i as f64) * self.h()
    }

    /// Signed integer wavevector component for FFT bin i.
    pub fn signed_k(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Physical wavenumber xi = pi k / L for FFT bin i.
    pub fn xi(&self, i: usize) -> T {
        T::PI() * T::of(self.signed_k(i) as f64) / self.l
    }

    /// Largest resolved wavenumber magnitude per axis, pi (n/2) / L.
    pub fn xi_max(&self) -> T {
        T::PI() * T::of((self.n / 2) as f64) / self.l
    }

    pub fn point(&self, ix: usize, iy: usize, iz: usize) -> [T; 3] {
        [self.coord(ix), self.coord(iy), self.coord(iz)]
    }

    /// Visit every FFT bin: `f(linear_index_within_comp, [xi1, xi2, xi3])`.
    pub fn for_each_mode(&self, mut f: impl FnMut(usize, [T; 3])) {
        let n = self.n;
        let mut idx = 0;
        for kz in 0..n {
            let xz = self.xi(kz);
            for ky in 0..n {
                let xy = self.xi(ky);
                for kx in 0..n {
                    f(idx, [self.xi(kx), xy, xz]);
                    idx += 1;
                }
            }
        }
    }

    /// Linear indices (within one component cube) of points with |x| <= radius.
    pub fn ball_indices(&self, radius: T) -> Vec<usize> {
        let n = self.n;
        let r2 = radius * radius;
        let mut out = Vec::new();
        for iz in 0..n {
            let z = self.coord(iz);
            for iy in 0..n {
                let y = self.coord(iy);
                let zy = z * z + y * y;
                if zy > r2 {
                    continue;
                }
                for ix in 0..n {
                    let x = self.coord(ix);
                    if zy + x * x <= r2 {
                        out.push((iz * n + iy) * n + ix);
                    }
                }
            }
        }
        out
    }

    /// The inner region |x| <= L/2 on which drift terms and residuals are
    /// evaluated; outside it the periodic coordinate loses meaning.
    pub fn inner_indices(&self) -> Vec<usize> {
        self.ball_indices(self.l * T::of(0.5))
    }
}

/// Sampled field on the grid: `ncomp` x n^3 values, `[comp][z][y][x]`.
#[derive(Debug, Clone)]
pub struct RealField<T> {
    pub spec: GridSpec<T>,
    pub ncomp: usize,
    pub data: Vec<T>,
}

impl<T: Real> RealField<T> {
    pub fn zeros(spec: GridSpec<T>, ncomp: usize) -> Self {
        Self {
            spec,
            ncomp,
            data: vec![T::zero(); ncomp * spec.points_per_comp()],
        }
    }

    pub fn scalar_from_fn(spec: GridSpec<T>, f: impl Fn([T; 3]) -> T) -> Self {
        let mut out = Self::zeros(spec, 1);
        let n = spec.n();
        let mut idx = 0;
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    out.data[idx] = f(spec.point(ix, iy, iz));
                    idx += 1;
                }
            }
        }
        out
    }

    pub fn vector_from_fn(spec: GridSpec<T>, f: impl Fn([T; 3]) -> [T; 3]) -> Self {
        let mut out = Self::zeros(spec, 3);
        let n = spec.n();
        let npts = spec.points_per_comp();
        let mut idx = 0;
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    let v = f(spec.point(ix, iy, iz));
                    out.data[idx] = v[0];
                    out.data[npts + idx] = v[1];
                    out.data[2 * npts + idx] = v[2];
                    idx += 1;
                }
            }
        }
        out
    }

    pub fn comp(&self, c: usize) -> &[T] {
        let npts = self.spec.points_per_comp();
        &self.data[c * npts..(c + 1) * npts]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [T] {
        let npts = self.spec.points_per_comp();
        &mut self.data[c * npts..(c + 1) * npts]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Componentwise a*x + y.
    pub fn axpy(&mut self, a: T, other: &Self) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += a * *o;
        }
    }

    pub fn scale(&mut self, a: T) {
        for v in &mut self.data {
            *v *= a;
        }
    }

    /// Pointwise Euclidean magnitude over components at linear index i.
    pub fn magnitude_at(&self, i: usize) -> T {
        let npts = self.spec.points_per_comp();
        let mut s = T::zero();
        for c in 0..self.ncomp {
            let v = self.data[c * npts + i];
            s += v * v;
        }
        s.sqrt()
    }

    /// L2 norm (with volume element h^3) restricted to the given point indices.
    pub fn l2_over(&self, indices: &[usize]) -> T {
        let npts = self.spec.points_per_comp();
        let sum = pairwise_sum_by(indices.len(), &|j| {
            let i = indices[j];
            let mut s = T::zero();
            for c in 0..self.ncomp {
                let v = self.data[c * npts + i];
                s += v * v;
            }
            s
        });
        let h = self.spec.h();
        (sum * h * h * h).sqrt()
    }

    /// Cyclic shift by whole cells (used by translation-equivariance tests).
    pub fn circular_shift(&self, shift: [usize; 3]) -> Self {
        let n = self.spec.n();
        let npts = self.spec.points_per_comp();
        let mut out = Self::zeros(self.spec, self.ncomp);
        for c in 0..self.ncomp {
            for iz in 0..n {
                for iy in 0..n {
                    for ix in 0..n {
                        let jz = (iz + shift[2]) % n;
                        let jy = (iy + shift[1]) % n;
                        let jx = (ix + shift[0]) % n;
                        out.data[c * npts + (jz * n + jy) * n + jx] =
                            self.data[c * npts + (iz * n + iy) * n + ix];
                    }
                }
            }
        }
        out
    }
}

/// Fourier-side field: coefficients c_k of f(x) = sum_k c_k exp(i xi_k . x),
/// stored in FFT bin order, `[comp][kz][ky][kx]`.
#[derive(Debug, Clone)]
pub struct SpectralField<T> {
    pub spec: GridSpec<T>,
    pub ncomp: usize,
    pub data: Vec<Complex<T>>,
    pub dealiased: bool,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(spec: GridSpec<T>, ncomp: usize) -> Self {
        Self {
            spec,
            ncomp,
            data: vec![Complex::new(T::zero(), T::zero()); ncomp * spec.points_per_comp()],
            dealiased: false,
        }
    }

    pub fn comp(&self, c: usize) -> &[Complex<T>] {
        let npts = self.spec.points_per_comp();
        &self.data[c * npts..(c + 1) * npts]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex<T>] {
        let npts = self.spec.points_per_comp();
        &mut self.data[c * npts..(c + 1) * npts]
    }

    /// Visit every mode: `f(linear_index_within_comp, [xi1, xi2, xi3])`.
    pub fn for_each_mode(&self, f: impl FnMut(usize, [T; 3])) {
        self.spec.for_each_mode(f)
    }

    /// Largest |c(k) - conj(c(-k))| over all modes and components.
    pub fn hermitian_defect(&self) -> T {
        let n = self.spec.n();
        let npts = self.spec.points_per_comp();
        let mut worst = T::zero();
        for c in 0..self.ncomp {
            for kz in 0..n {
                for ky in 0..n {
                    for kx in 0..n {
                        let i = c * npts + (kz * n + ky) * n + kx;
                        let j = c * npts
                            + (((n - kz) % n) * n + (n - ky) % n) * n
                            + (n - kx) % n;
                        let d = self.data[i] - self.data[j].conj();
                        worst = worst.max(d.norm());
                    }
                }
            }
        }
        worst
    }

    /// Sum of |c_k|^2 over all modes and components.
    pub fn energy(&self) -> T {
        pairwise_sum_by(self.data.len(), &|i| self.data[i].norm_sqr())
    }
}

fn checker_sign<T: Real>(k_sum: usize) -> T {
    if k_sum % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Forward transform to Fourier coefficients (exact for grid-sampled data).
pub fn transform<T: Real>(f: &RealField<T>) -> SpectralField<T> {
    let spec = f.spec;
    let n = spec.n();
    let mut data: Vec<Complex<T>> = f
        .data
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .collect();
    fft::fft3d(&mut data, n, f.ncomp, FftDirection::Forward);
    // The grid starts at -L, so bin k carries an extra (-1)^(kx+ky+kz);
    // normalize by n^3 to get series coefficients.
    let scale = T::one() / T::of((n * n * n) as f64);
    let npts = spec.points_per_comp();
    for c in 0..f.ncomp {
        let cube = &mut data[c * npts..(c + 1) * npts];
        let mut idx = 0;
        for kz in 0..n {
            for ky in 0..n {
                for kx in 0..n {
                    let s = checker_sign::<T>(kx + ky + kz) * scale;
                    cube[idx] = cube[idx] * s;
                    idx += 1;
                }
            }
        }
    }
    SpectralField {
        spec,
        ncomp: f.ncomp,
        data,
        dealiased: false,
    }
}

/// Inverse transform back to grid samples (real part; imaginary parts are
/// on the rounding floor for Hermitian inputs).
pub fn inverse<T: Real>(s: &SpectralField<T>) -> RealField<T> {
    let spec = s.spec;
    let n = spec.n();
    let npts = spec.points_per_comp();
    let mut data = s.data.clone();
    for c in 0..s.ncomp {
        let cube = &mut data[c * npts..(c + 1) * npts];
        let mut idx = 0;
        for kz in 0..n {
            for ky in 0..n {
                for kx in 0..n {
                    cube[idx] = cube[idx] * checker_sign::<T>(kx + ky + kz);
                    idx += 1;
                }
            }
        }
    }
    fft::fft3d(&mut data, n, s.ncomp, FftDirection::Inverse);
    RealField {
        spec,
        ncomp: s.ncomp,
        data: data.into_iter().map(|z| z.re).collect(),
    }
}

/// Inverse transform that consumes its input, avoiding the work copy.
pub fn inverse_owned<T: Real>(mut s: SpectralField<T>) -> RealField<T> {
    let spec = s.spec;
    let n = spec.n();
    let npts = spec.points_per_comp();
    for c in 0..s.ncomp {
        let cube = &mut s.data[c * npts..(c + 1) * npts];
        let mut idx = 0;
        for kz in 0..n {
            for ky in 0..n {
                for kx in 0..n {
                    cube[idx] = cube[idx] * checker_sign::<T>(kx + ky + kz);
                    idx += 1;
                }
            }
        }
    }
    fft::fft3d(&mut s.data, n, s.ncomp, FftDirection::Inverse);
    RealField {
        spec,
        ncomp: s.ncomp,
        data: s.data.into_iter().map(|z| z.re).collect(),
    }
}

/// In-place heat multiplier (memory-lean variant of [`heat_multiplier`]).
pub fn heat_multiplier_in_place<T: Real>(s: &mut SpectralField<T>, t: T) {
    let npts = s.spec.points_per_comp();
    let ncomp = s.ncomp;
    let spec = s.spec;
    spec.for_each_mode(|i, xi| {
        let m = (-(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) * t).exp();
        for c in 0..ncomp {
            s.data[c * npts + i] = s.data[c * npts + i] * m;
        }
    });
}

/// In-place Helmholtz-Leray projection.
pub fn helmholtz_project_in_place<T: Real>(u: &mut SpectralField<T>) -> Result<()> {
    if u.ncomp != 3 {
        return Err(Error::SizeMismatch(format!(
            "projection needs a 3-component field, got {}",
            u.ncomp
        )));
    }
    let npts = u.spec.points_per_comp();
    let spec = u.spec;
    spec.for_each_mode(|i, xi| {
        let q2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if q2 == T::zero() {
            return;
        }
        let dot = u.data[i] * xi[0] + u.data[npts + i] * xi[1] + u.data[2 * npts + i] * xi[2];
        let f = dot / q2;
        for d in 0..3 {
            let v = u.data[d * npts + i] - f * xi[d];
            u.data[d * npts + i] = v;
        }
    });
    Ok(())
}

/// Zero every mode with any |k_i| > n/3 (2/3-rule for quadratic products).
pub fn dealias<T: Real>(s: &SpectralField<T>) -> SpectralField<T> {
    let mut out = s.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place<T: Real>(s: &mut SpectralField<T>) {
    let n = s.spec.n();
    let cut = (n / 3) as i64;
    let npts = s.spec.points_per_comp();
    let zero = Complex::new(T::zero(), T::zero());
    for c in 0..s.ncomp {
        let spec = s.spec;
        let cube = &mut s.data[c * npts..(c + 1) * npts];
        let mut idx = 0;
        for kz in 0..n {
            let bz = spec.signed_k(kz).abs() > cut;
            for ky in 0..n {
                let by = bz || spec.signed_k(ky).abs() > cut;
                for kx in 0..n {
                    if by || spec.signed_k(kx).abs() > cut {
                        cube[idx] = zero;
                    }
                    idx += 1;
                }
            }
        }
    }
    s.dealiased = true;
}

/// Helmholtz-Leray projection: multiplier I - xi xi^T / |xi|^2 per mode,
/// zero mode passed through unchanged.
pub fn helmholtz_project<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    if u.ncomp != 3 {
        return Err(Error::SizeMismatch(format!(
            "projection needs a 3-component field, got {}",
            u.ncomp
        )));
    }
    let mut out = u.clone();
    let npts = u.spec.points_per_comp();
    u.for_each_mode(|i, xi| {
        let q2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if q2 == T::zero() {
            return;
        }
        let dot = out.data[i] * xi[0] + out.data[npts + i] * xi[1] + out.data[2 * npts + i] * xi[2];
        let f = dot / q2;
        for d in 0..3 {
            let v = out.data[d * npts + i] - f * xi[d];
            out.data[d * npts + i] = v;
        }
    });
    Ok(out)
}

/// Spectral divergence i xi . u_hat as a scalar spectral field.
pub fn divergence<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    if u.ncomp != 3 {
        return Err(Error::SizeMismatch("divergence needs 3 components".into()));
    }
    let mut out = SpectralField::zeros(u.spec, 1);
    let npts = u.spec.points_per_comp();
    u.for_each_mode(|i, xi| {
        let dot = u.data[i] * xi[0] + u.data[npts + i] * xi[1] + u.data[2 * npts + i] * xi[2];
        out.data[i] = Complex::new(T::zero(), T::one()) * dot;
    });
    out.dealiased = u.dealiased;
    Ok(out)
}

/// max_k |xi . u_hat(k)| and max_k |u_hat(k)|, for relative divergence checks.
pub fn divergence_linf<T: Real>(u: &SpectralField<T>) -> Result<(T, T)> {
    let div = divergence(u)?;
    let npts = u.spec.points_per_comp();
    let mut dmax = T::zero();
    let mut umax = T::zero();
    for i in 0..npts {
        dmax = dmax.max(div.data[i].norm());
        let mut m = T::zero();
        for c in 0..3 {
            m += u.data[c * npts + i].norm_sqr();
        }
        umax = umax.max(m.sqrt());
    }
    Ok((dmax, umax))
}

/// Partial derivative along `axis`: multiplier i xi_axis.
pub fn derivative<T: Real>(s: &SpectralField<T>, axis: usize) -> SpectralField<T> {
    let mut out = s.clone();
    let npts = s.spec.points_per_comp();
    s.for_each_mode(|i, xi| {
        let m = Complex::new(T::zero(), xi[axis]);
        for c in 0..s.ncomp {
            out.data[c * npts + i] = s.data[c * npts + i] * m;
        }
    });
    out
}

/// Laplacian: multiplier -|xi|^2.
pub fn laplacian<T: Real>(s: &SpectralField<T>) -> SpectralField<T> {
    let mut out = s.clone();
    let npts = s.spec.points_per_comp();
    s.for_each_mode(|i, xi| {
        let m = -(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
        for c in 0..s.ncomp {
            out.data[c * npts + i] = out.data[c * npts + i] * m;
        }
    });
    out
}

/// Heat semigroup: multiplier exp(-|xi|^2 t).
pub fn heat_multiplier<T: Real>(s: &SpectralField<T>, t: T) -> SpectralField<T> {
    let mut out = s.clone();
    let npts = s.spec.points_per_comp();
    s.for_each_mode(|i, xi| {
        let m = (-(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) * t).exp();
        for c in 0..s.ncomp {
            out.data[c * npts + i] = out.data[c * npts + i] * m;
        }
    });
    out
}

/// Drift term x . grad(u), evaluated in physical space after spectral
/// differentiation. Meaningful on the inner box |x| <= L/2 only; values
/// outside it use the periodic coordinate and are reported as-is.
pub fn scale_drift<T: Real>(s: &SpectralField<T>) -> RealField<T> {
    let spec = s.spec;
    let n = spec.n();
    let npts = spec.points_per_comp();
    let mut out = RealField::zeros(spec, s.ncomp);
    for axis in 0..3 {
        let d = inverse_owned(derivative(s, axis));
        for c in 0..s.ncomp {
            let dst = out.comp_mut(c);
            let src = d.comp(c);
            let mut idx = 0;
            for iz in 0..n {
                for iy in 0..n {
                    for ix in 0..n {
                        let coord = match axis {
                            0 => spec.coord(ix),
                            1 => spec.coord(iy),
                            _ => spec.coord(iz),
                        };
                        dst[idx] += coord * src[idx];
                        idx += 1;
                    }
                }
            }
            let _ = npts;
        }
    }
    out
}

/// Pressure of the quadratic interaction: solves
/// Delta p + div div (U (x) B) = 0 with zero-mean p, pseudospectrally.
pub fn pressure_from_velocity<T: Real>(
    u: &SpectralField<T>,
    b: &SpectralField<T>,
) -> Result<SpectralField<T>> {
    if u.ncomp != 3 || b.ncomp != 3 {
        return Err(Error::SizeMismatch("pressure needs 3-component fields".into()));
    }
    if u.spec != b.spec {
        return Err(Error::SizeMismatch("pressure: mismatched grids".into()));
    }
    let spec = u.spec;
    let npts = spec.points_per_comp();
    let up = inverse(&dealias(u));
    let bp = inverse(&dealias(b));
    let mut p = SpectralField::zeros(spec, 1);
    for i_comp in 0..3 {
        for j_comp in 0..3 {
            let mut prod = RealField::zeros(spec, 1);
            {
                let ui = up.comp(i_comp);
                let bj = bp.comp(j_comp);
                for (dst, (a, b)) in prod.data.iter_mut().zip(ui.iter().zip(bj)) {
                    *dst = *a * *b;
                }
            }
            let prod_hat = transform(&prod);
            spec.for_each_mode(|i, xi| {
                let q2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                if q2 == T::zero() {
                    return;
                }
                let m = -(xi[i_comp] * xi[j_comp]) / q2;
                p.data[i] = p.data[i] + prod_hat.data[i] * m;
            });
            let _ = npts;
        }
    }
    dealias_in_place(&mut p);
    // zero mode already untouched (mean left at 0 by the multiplier skip);
    // force it exactly.
    p.data[0] = Complex::new(T::zero(), T::zero());
    Ok(p)
}

/// Smooth box window: 1 to within rounding on the plateau (|x_d| <= plateau
/// per axis), negligible near the faces. The profile is an erfc step, whose
/// Gaussian spectrum is fully resolved for n >= 64, so spectral derivatives
/// of windowed decaying fields carry no wrap pollution and no window
/// truncation noise.
#[derive(Debug, Clone)]
pub struct Window<T> {
    pub spec: GridSpec<T>,
    pub plateau: T,
    pub values: Vec<T>,
}

impl<T: Real> Window<T> {
    /// Plateau at 0.55 L (covers the inner ball |x| <= L/2), gone by 0.95 L.
    pub fn new(spec: GridSpec<T>) -> Self {
        Self::with_bounds(spec, 0.55, 0.95)
    }

    pub fn with_bounds(spec: GridSpec<T>, plateau_frac: f64, zero_frac: f64) -> Self {
        let n = spec.n();
        let l = spec.half_width().as_f64();
        let a = plateau_frac * l;
        let mid = 0.5 * (plateau_frac + zero_frac) * l;
        let width = (zero_frac - plateau_frac) * l / 5.5;
        let axis: Vec<f64> = (0..n)
            .map(|i| {
                let x = spec.coord(i).as_f64().abs();
                0.5 * libm::erfc((x - mid) / width)
            })
            .collect();
        let mut values = vec![T::zero(); spec.points_per_comp()];
        let mut idx = 0;
        for iz in 0..n {
            for iy in 0..n {
                for ix in 0..n {
                    values[idx] = T::of(axis[ix] * axis[iy] * axis[iz]);
                    idx += 1;
                }
            }
        }
        Self {
            spec,
            plateau: T::of(a),
            values,
        }
    }

    pub fn apply(&self, f: &RealField<T>) -> RealField<T> {
        let mut out = f.clone();
        let npts = self.spec.points_per_comp();
        for c in 0..f.ncomp {
            for (v, w) in out.data[c * npts..(c + 1) * npts].iter_mut().zip(&self.values) {
                *v *= *w;
            }
        }
        out
    }
}

/// Transform of the windowed field; the standard entry point for derivative
/// evaluation of decaying (non-periodic) data.
pub fn windowed_spectrum<T: Real>(f: &RealField<T>, w: &Window<T>) -> SpectralField<T> {
    transform(&w.apply(f))
}

/// Pointwise |grad f| (Frobenius over components) from a spectral field.
pub fn gradient_magnitude<T: Real>(s: &SpectralField<T>) -> RealField<T> {
    let spec = s.spec;
    let npts = spec.points_per_comp();
    let mut acc = vec![T::zero(); npts];
    for axis in 0..3 {
        let d = inverse(&derivative(s, axis));
        for c in 0..s.ncomp {
            let src = d.comp(c);
            for (a, v) in acc.iter_mut().zip(src) {
                *a += *v * *v;
            }
        }
    }
    RealField {
        spec,
        ncomp: 1,
        data: acc.into_iter().map(|v| v.sqrt()).collect(),
    }
}

/// Parseval check helper: physical sum |f|^2 h^3 and spectral (2L)^3 sum |c|^2.
pub fn parseval_pair<T: Real>(f: &RealField<T>, s: &SpectralField<T>) -> (T, T) {
    let h = f.spec.h();
    let phys = pairwise_sum_by(f.data.len(), &|i| f.data[i] * f.data[i]) * h * h * h;
    let vol = {
        let tl = f.spec.half_width() * T::of(2.0);
        tl * tl * tl
    };
    let spect = s.energy() * vol;
    (phys, spect)
}
