//! Solution operator of the singularly forced Stokes system: the Duhamel
//! integral V = int_0^1 e^{Delta(1-s)} P s^{-3/2} F(./sqrt(s)) ds evaluated
//! spectrally, its elliptic-form residual, and far-field decay fits.

use num_complex::Complex;

use crate::czt::{scaled_half_spectrum, CztPlan};
use crate::error::{Error, Result};
use crate::grid::{self, GridSpec, RealField, SpectralField, Window};
use crate::interp;
use crate::quad::gauss_legendre;
use crate::real::Real;

/// Gauss-Legendre rule for the Duhamel integral after the substitution
/// s = tau^2 (which removes the apparent s^{-3/2} singularity: the spectral
/// integrand is entire in tau). Weights carry the Jacobian 2 tau and sum to 1.
#[derive(Debug, Clone)]
pub struct DuhamelQuadrature<T> {
    s_nodes: Vec<T>,
    weights: Vec<T>,
    taus: Vec<f64>,
}

impl<T: Real> DuhamelQuadrature<T> {
    pub fn new(n_s: usize) -> Result<Self> {
        if n_s < 32 {
            return Err(Error::Parameter(format!(
                "duhamel quadrature needs at least 32 nodes, got {n_s}"
            )));
        }
        let (x, w) = gauss_legendre(n_s);
        let mut s_nodes = Vec::with_capacity(n_s);
        let mut weights = Vec::with_capacity(n_s);
        let mut taus = Vec::with_capacity(n_s);
        for (&xi, &wi) in x.iter().zip(&w) {
            let tau = 0.5 * (xi + 1.0);
            let wt = 0.5 * wi;
            taus.push(tau);
            s_nodes.push(T::of(tau * tau));
            weights.push(T::of(wt * 2.0 * tau));
        }
        Ok(Self {
            s_nodes,
            weights,
            taus,
        })
    }

    pub fn len(&self) -> usize {
        self.s_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_nodes.is_empty()
    }

    pub fn s_nodes(&self) -> &[T] {
        &self.s_nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

impl<T: Real> Default for DuhamelQuadrature<T> {
    fn default() -> Self {
        Self::new(64).expect("64 >= 32")
    }
}

/// Reusable per-(grid, quadrature) state: one chirp-z plan per s-node and
/// the per-node wavenumber cutoff beyond which exp(-|xi|^2 (1-s)) is below
/// 1e-18 and the node cannot contribute.
pub struct DuhamelWorkspace<T: Real> {
    grid: GridSpec<T>,
    quad: DuhamelQuadrature<T>,
    plans: Vec<CztPlan<T>>,
    kcuts: Vec<usize>,
}

impl<T: Real> DuhamelWorkspace<T> {
    pub fn new(grid: GridSpec<T>, quad: DuhamelQuadrature<T>) -> Self {
        let n = grid.n();
        let l = grid.half_width().as_f64();
        let ln_eps = 41.4; // -ln(1e-18)
        let plans = quad
            .taus
            .iter()
            .map(|&tau| CztPlan::new(n, tau))
            .collect();
        let kcuts = quad
            .s_nodes
            .iter()
            .map(|&s| {
                let one_minus = (1.0 - s.as_f64()).max(1e-300);
                let xi_max = (ln_eps / one_minus).sqrt();
                let k = (xi_max * l / std::f64::consts::PI).ceil() as usize;
                k.min(n / 2)
            })
            .collect();
        Self {
            grid,
            quad,
            plans,
            kcuts,
        }
    }

    pub fn grid(&self) -> GridSpec<T> {
        self.grid
    }

    pub fn quad(&self) -> &DuhamelQuadrature<T> {
        &self.quad
    }

    /// V = G(F): the forced-Stokes profile at time 1. Returns the field and
    /// its (divergence-free) spectrum.
    pub fn apply(&self, f: &RealField<T>) -> Result<(RealField<T>, SpectralField<T>)> {
        if f.ncomp != 3 {
            return Err(Error::SizeMismatch("duhamel forcing must have 3 components".into()));
        }
        if f.spec != self.grid {
            return Err(Error::SizeMismatch("duhamel forcing on a different grid".into()));
        }
        let spec = self.grid;
        let n = spec.n();
        let half_k = n / 2;

        // accumulator over k1 in [0, n/2], k2/k3 in fft-bin order
        let plane = n * n;
        let mut acc =
            vec![Complex::new(T::zero(), T::zero()); 3 * (half_k + 1) * plane];

        let mut ex = vec![T::zero(); half_k + 1];
        for (node, ((&s, &w), (plan, &kcut))) in self
            .quad
            .s_nodes
            .iter()
            .zip(&self.quad.weights)
            .zip(self.plans.iter().zip(&self.kcuts))
            .enumerate()
        {
            let _ = node;
            let block = scaled_half_spectrum(f, plan, kcut);
            let one_minus = T::one() - s;
            for (k, e) in ex.iter_mut().enumerate() {
                let xi = T::PI() * T::of(k as f64) / spec.half_width();
                *e = (-xi * xi * one_minus).exp();
            }
            let kk = 2 * kcut + 1;
            let blk = kcut as i64;
            for k1 in 0..=kcut {
                let e1 = w * ex[k1];
                for k2 in -blk..=blk {
                    let e12 = e1 * ex[k2.unsigned_abs() as usize];
                    let b2 = k2.rem_euclid(n as i64) as usize;
                    let row_out = (k1 * n + b2) * n;
                    let row_in = (k1 * kk + (k2 + blk) as usize) * kk;
                    for k3 in -blk..=blk {
                        let wgt = e12 * ex[k3.unsigned_abs() as usize];
                        let b3 = k3.rem_euclid(n as i64) as usize;
                        let iin = row_in + (k3 + blk) as usize;
                        let iout = row_out + b3;
                        for c in 0..3 {
                            let v = block.data
                                [c * ScaledHalfLen::of(kcut) + iin]
                                * wgt;
                            acc[c * (half_k + 1) * plane + iout] += v;
                        }
                    }
                }
            }
        }

        // assemble the full Hermitian cube, project, invert
        let npts = spec.points_per_comp();
        let mut v_hat = SpectralField::zeros(spec, 3);
        for c in 0..3 {
            for b1 in 0..n {
                let k1 = spec.signed_k(b1);
                for b2 in 0..n {
                    for b3 in 0..n {
                        let v = if k1 >= 0 {
                            acc[c * (half_k + 1) * plane + ((k1 as usize) * n + b2) * n + b3]
                        } else {
                            let r2 = (n - b2) % n;
                            let r3 = (n - b3) % n;
                            acc[c * (half_k + 1) * plane
                                + ((-k1) as usize * n + r2) * n
                                + r3]
                                .conj()
                        };
                        // storage order of the cube is [kz][ky][kx]
                        v_hat.data[c * npts + (b3 * n + b2) * n + b1] = v;
                    }
                }
            }
        }
        let v_hat = grid::helmholtz_project(&v_hat)?;
        let v = grid::inverse(&v_hat);
        Ok((v, v_hat))
    }
}

// small helper so the inner accumulation loop reads cleanly
struct ScaledHalfLen;
impl ScaledHalfLen {
    #[inline]
    fn of(kcut: usize) -> usize {
        (kcut + 1) * (2 * kcut + 1) * (2 * kcut + 1)
    }
}

/// One-shot convenience wrapper around [`DuhamelWorkspace::apply`].
pub fn duhamel_apply<T: Real>(
    f: &RealField<T>,
    grid: GridSpec<T>,
    quad: DuhamelQuadrature<T>,
) -> Result<RealField<T>> {
    Ok(DuhamelWorkspace::new(grid, quad).apply(f)?.0)
}

/// Applies the operator at the given and at halved node count and errs if
/// the two disagree beyond `rel_tol` (quadrature ratio test).
pub fn duhamel_apply_checked<T: Real>(
    f: &RealField<T>,
    grid: GridSpec<T>,
    n_s: usize,
    rel_tol: T,
) -> Result<RealField<T>> {
    let fine = duhamel_apply(f, grid, DuhamelQuadrature::new(n_s)?)?;
    let coarse = duhamel_apply(f, grid, DuhamelQuadrature::new((n_s / 2).max(32))?)?;
    let indices: Vec<usize> = (0..grid.points_per_comp()).collect();
    let mut diff = fine.clone();
    diff.axpy(-T::one(), &coarse);
    let gap = diff.l2_over(&indices);
    let scale = fine.l2_over(&indices);
    if gap > rel_tol * scale.max(T::of(1e-300)) {
        return Err(Error::Accuracy(format!(
            "duhamel quadrature ratio test failed: gap {gap} at scale {scale}"
        )));
    }
    Ok(fine)
}

/// Pressure of the forced Stokes profile equation: Delta P = div F.
pub fn pressure_from_forcing<T: Real>(f: &RealField<T>) -> Result<RealField<T>> {
    if f.ncomp != 3 {
        return Err(Error::SizeMismatch("forcing must have 3 components".into()));
    }
    let hat = grid::transform(f);
    let spec = f.spec;
    let mut p = SpectralField::zeros(spec, 1);
    let npts = spec.points_per_comp();
    spec.for_each_mode(|i, xi| {
        let q2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if q2 == T::zero() {
            return;
        }
        // P_hat = -i xi . F_hat / |xi|^2
        let dot = hat.data[i] * xi[0] + hat.data[npts + i] * xi[1] + hat.data[2 * npts + i] * xi[2];
        p.data[i] = Complex::new(T::zero(), -T::one()) * dot / q2;
    });
    Ok(grid::inverse(&p))
}

/// Relative L2 residual of the elliptic form
/// -Delta V - x.grad(V)/2 - V/2 + grad(P) - F over the inner ball.
pub fn stokes_elliptic_residual<T: Real>(
    v: &RealField<T>,
    p: &RealField<T>,
    f: &RealField<T>,
) -> Result<T> {
    if v.spec != p.spec || v.spec != f.spec {
        return Err(Error::SizeMismatch("residual fields on different grids".into()));
    }
    let spec = v.spec;
    let w = Window::new(spec);
    let v_hat = grid::windowed_spectrum(v, &w);
    let p_hat = grid::windowed_spectrum(p, &w);
    let lap = grid::inverse(&grid::laplacian(&v_hat));
    let drift = grid::scale_drift(&v_hat);
    let grad_p: Vec<RealField<T>> = (0..3)
        .map(|d| grid::inverse(&grid::derivative(&p_hat, d)))
        .collect();
    let half = T::of(0.5);
    let inner = spec.inner_indices();
    let mut resid = RealField::zeros(spec, 3);
    for c in 0..3 {
        let dst = resid.comp_mut(c);
        let l = lap.comp(c);
        let vv = v.comp(c);
        let dr = drift.comp(c);
        let gp = grad_p[c].comp(0);
        let ff = f.comp(c);
        for i in 0..dst.len() {
            dst[i] = -l[i] - half * dr[i] - half * vv[i] + gp[i] - ff[i];
        }
    }
    let num = resid.l2_over(&inner);
    let mut den = lap.l2_over(&inner) + half * drift.l2_over(&inner) + half * v.l2_over(&inner)
        + f.l2_over(&inner);
    for g in &grad_p {
        den += g.l2_over(&inner) / T::of(3.0);
    }
    if den == T::zero() {
        return Ok(T::zero());
    }
    Ok(num / den)
}

/// Least-squares power-law fit of shell maxima.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit<T> {
    /// Positive decay exponent p in |V| ~ r^{-p}.
    pub exponent: T,
    pub prefactor: T,
    /// Coefficient of determination of the log-log fit.
    pub r_squared: T,
    pub shell_range: (T, T),
    /// Set when the data vanished on (almost) every shell; exponent is +inf.
    pub degenerate: bool,
}

/// Directions used for shell sampling (midpoint lat-long set).
fn shell_directions<T: Real>(n_theta: usize, n_phi: usize) -> Vec<[T; 3]> {
    let mut dirs = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = (i as f64 + 0.5) * std::f64::consts::PI / n_theta as f64;
        let (st, ct) = theta.sin_cos();
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let (sp, cp) = phi.sin_cos();
            dirs.push([T::of(st * cp), T::of(st * sp), T::of(ct)]);
        }
    }
    dirs
}

/// Max of |field| over the sphere of radius r (tricubic sampling).
pub fn shell_max<T: Real>(f: &RealField<T>, r: T, dirs: &[[T; 3]]) -> T {
    let mut m = T::zero();
    for d in dirs {
        let p = [r * d[0], r * d[1], r * d[2]];
        let mut s = T::zero();
        for c in 0..f.ncomp {
            let v = interp::tricubic(f, c, p);
            s += v * v;
        }
        m = m.max(s.sqrt());
    }
    m
}

/// Log-log least squares on precomputed shell maxima (shells with zero
/// maximum are dropped; a fit with fewer than two live shells is flagged
/// degenerate with exponent +inf).
pub fn fit_shell_maxima<T: Real>(radii: &[T], maxima: &[T]) -> DecayFit<T> {
    fit_loglog(radii, maxima)
}

fn fit_loglog<T: Real>(radii: &[T], maxima: &[T]) -> DecayFit<T> {
    let pts: Vec<(T, T)> = radii
        .iter()
        .zip(maxima)
        .filter(|(_, &m)| m > T::zero())
        .map(|(&r, &m)| (r.ln(), m.ln()))
        .collect();
    let range = (radii[0], radii[radii.len() - 1]);
    if pts.len() < 2 {
        return DecayFit {
            exponent: T::infinity(),
            prefactor: T::zero(),
            r_squared: T::one(),
            shell_range: range,
            degenerate: true,
        };
    }
    let nf = T::of(pts.len() as f64);
    let sx: T = pts.iter().map(|p| p.0).sum();
    let sy: T = pts.iter().map(|p| p.1).sum();
    let sxx: T = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: T = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
    let intercept = (sy - slope * sx) / nf;
    let mean_y = sy / nf;
    let mut ss_res = T::zero();
    let mut ss_tot = T::zero();
    for &(x, y) in &pts {
        let fit = slope * x + intercept;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot > T::zero() {
        (T::one() - ss_res / ss_tot).max(T::zero())
    } else {
        T::one()
    };
    DecayFit {
        exponent: -slope,
        prefactor: intercept.exp(),
        r_squared: r2,
        shell_range: range,
        degenerate: false,
    }
}

/// Fit the decay exponent of max-over-shell |V| on the given radii.
pub fn decay_fit<T: Real>(v: &RealField<T>, shells: &[T]) -> Result<DecayFit<T>> {
    if shells.is_empty() {
        return Err(Error::Domain("decay fit needs shells".into()));
    }
    if shells.len() < 4 {
        return Err(Error::Parameter("decay fit needs at least 4 shells".into()));
    }
    let half = v.spec.half_width() * T::of(0.5);
    for &r in shells {
        if !(r > T::zero()) || r > half {
            return Err(Error::Parameter(format!(
                "shell radius {r} outside (0, L/2]"
            )));
        }
    }
    let dirs = shell_directions::<T>(24, 48);
    let maxima: Vec<T> = shells.iter().map(|&r| shell_max(v, r, &dirs)).collect();
    Ok(fit_loglog(shells, &maxima))
}

/// Decay fits for |V| and |grad V| (windowed spectral gradient).
pub fn decay_fit_with_gradient<T: Real>(
    v: &RealField<T>,
    shells: &[T],
) -> Result<(DecayFit<T>, DecayFit<T>)> {
    let fit_v = decay_fit(v, shells)?;
    let w = Window::new(v.spec);
    let gm = grid::gradient_magnitude(&grid::windowed_spectrum(v, &w));
    let fit_g = decay_fit(&gm, shells)?;
    Ok((fit_v, fit_g))
}

/// Divergence-free Gaussian-envelope forcing with a closed-form transform:
/// F(x) = (c x x) e^{-|x|^2 / (2 sigma^2)}, F_hat(eta) = -i (2 pi)^{3/2}
/// sigma^5 (c x eta) e^{-sigma^2 |eta|^2 / 2}. Used by the time-stepping
/// oracle so that no forcing sampling enters that route at small s.
#[derive(Debug, Clone, Copy)]
pub struct GaussianCurlForcing<T> {
    pub c: [T; 3],
    pub sigma: T,
}

impl<T: Real> GaussianCurlForcing<T> {
    pub fn eval(&self, x: [T; 3]) -> [T; 3] {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let g = (-r2 / (T::of(2.0) * self.sigma * self.sigma)).exp();
        [
            (self.c[1] * x[2] - self.c[2] * x[1]) * g,
            (self.c[2] * x[0] - self.c[0] * x[2]) * g,
            (self.c[0] * x[1] - self.c[1] * x[0]) * g,
        ]
    }

    pub fn sample(&self, grid: GridSpec<T>) -> RealField<T> {
        RealField::vector_from_fn(grid, |p| self.eval(p))
    }

    /// Continuum Fourier transform (convention F_hat = int F e^{-i eta x}).
    pub fn transform_eval(&self, eta: [T; 3]) -> [Complex<T>; 3] {
        let s2 = self.sigma * self.sigma;
        let e2 = eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2];
        let amp = T::of((2.0 * std::f64::consts::PI).powf(1.5))
            * s2 * s2 * self.sigma
            * (-s2 * e2 * T::of(0.5)).exp();
        let cross = [
            self.c[1] * eta[2] - self.c[2] * eta[1],
            self.c[2] * eta[0] - self.c[0] * eta[2],
            self.c[0] * eta[1] - self.c[1] * eta[0],
        ];
        cross.map(|v| Complex::new(T::zero(), -amp * v))
    }
}

/// Independent time-stepping oracle for the Duhamel operator: integrates
/// v_hat' = -|xi|^2 v_hat + P F_hat(sqrt(s) xi) from s = delta (v = 0) to
/// s = 1 with geometrically graded steps and Simpson (classical RK4 for a
/// state-independent right-hand side), entirely from the closed-form
/// transform of the forcing.
pub fn stokes_time_stepping_oracle<T: Real>(
    forcing: &GaussianCurlForcing<T>,
    grid: GridSpec<T>,
    delta: f64,
    step_ratio: f64,
) -> RealField<T> {
    let spec = grid;
    let npts = spec.points_per_comp();
    let mut v_hat = SpectralField::zeros(spec, 3);
    let vol = {
        let tl = spec.half_width() * T::of(2.0);
        tl * tl * tl
    };

    // forcing spectrum at scaled frequency, as series coefficients
    let eval_rhs = |s: f64, out: &mut Vec<[Complex<T>; 3]>| {
        let tau = T::of(s.sqrt());
        spec.for_each_mode(|i, xi| {
            let eta = [xi[0] * tau, xi[1] * tau, xi[2] * tau];
            let f = forcing.transform_eval(eta);
            out[i] = [f[0] / vol, f[1] / vol, f[2] / vol];
        });
    };

    let mut rhs_lo = vec![[Complex::new(T::zero(), T::zero()); 3]; npts];
    let mut rhs_mid = vec![[Complex::new(T::zero(), T::zero()); 3]; npts];
    let mut rhs_hi = vec![[Complex::new(T::zero(), T::zero()); 3]; npts];

    let mut s = delta;
    eval_rhs(s, &mut rhs_lo);
    while s < 1.0 {
        let h = (step_ratio * s).min(1.0 - s).max(1e-12);
        eval_rhs(s + 0.5 * h, &mut rhs_mid);
        eval_rhs(s + h, &mut rhs_hi);
        let hh = T::of(h);
        let sixth = hh / T::of(6.0);
        spec.for_each_mode(|i, xi| {
            let q2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            let e_full = (-q2 * hh).exp();
            let e_half = (-q2 * hh * T::of(0.5)).exp();
            for c in 0..3 {
                let cur = v_hat.data[c * npts + i];
                let quad = rhs_lo[i][c] * e_full
                    + rhs_mid[i][c] * (e_half * T::of(4.0))
                    + rhs_hi[i][c];
                v_hat.data[c * npts + i] = cur * e_full + quad * sixth;
            }
        });
        std::mem::swap(&mut rhs_lo, &mut rhs_hi);
        s += h;
    }
    grid::inverse(&v_hat)
}
