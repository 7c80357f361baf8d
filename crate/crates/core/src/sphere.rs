//! (-1)-homogeneous divergence-free initial data represented by its trace on
//! the unit sphere: evaluation, mollification, and divergence-free projection
//! that preserve the homogeneity.

use std::io::{BufRead, BufReader, Read as IoRead, Write as IoWrite};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{self, GridSpec, RealField};
use crate::interp;
use crate::real::Real;

/// Equiangular latitude-longitude sphere grid with exact-cell weights in
/// colatitude (each weight integrates sin(theta) over its cell, so the
/// weights sum to 4 pi up to rounding).
#[derive(Debug, Clone)]
pub struct SphereGrid<T> {
    n_theta: usize,
    n_phi: usize,
    thetas: Vec<T>,
    phis: Vec<T>,
    nodes: Vec<[T; 3]>,
    weights: Vec<T>,
}

impl<T: Real> SphereGrid<T> {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 8 || n_phi < 16 {
            return Err(Error::Parameter(format!(
                "sphere grid {n_theta}x{n_phi} below minimum 8x16"
            )));
        }
        let pi = std::f64::consts::PI;
        let dt = pi / n_theta as f64;
        let dp = 2.0 * pi / n_phi as f64;
        let thetas: Vec<T> = (0..n_theta)
            .map(|i| T::of((i as f64 + 0.5) * dt))
            .collect();
        let phis: Vec<T> = (0..n_phi).map(|j| T::of(j as f64 * dp)).collect();
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let t0 = i as f64 * dt;
            let t1 = (i + 1) as f64 * dt;
            let w = (t0.cos() - t1.cos()) * dp;
            let theta = (i as f64 + 0.5) * dt;
            let (st, ct) = theta.sin_cos();
            for j in 0..n_phi {
                let phi = j as f64 * dp;
                let (sp, cp) = phi.sin_cos();
                nodes.push([T::of(st * cp), T::of(st * sp), T::of(ct)]);
                weights.push(T::of(w));
            }
        }
        Ok(Self {
            n_theta,
            n_phi,
            thetas,
            phis,
            nodes,
            weights,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[T; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn phis(&self) -> &[T] {
        &self.phis
    }

    pub fn node_index(&self, i_theta: usize, j_phi: usize) -> usize {
        i_theta * self.n_phi + j_phi
    }
}

/// Vector values attached to the nodes of a [`SphereGrid`].
#[derive(Debug, Clone)]
pub struct SphereField<T> {
    pub grid: Arc<SphereGrid<T>>,
    pub values: Vec<[T; 3]>,
}

impl<T: Real> SphereField<T> {
    pub fn from_fn(grid: Arc<SphereGrid<T>>, f: impl Fn([T; 3]) -> [T; 3]) -> Self {
        let values = grid.nodes().iter().map(|&s| f(s)).collect();
        Self { grid, values }
    }

    pub fn constant(grid: Arc<SphereGrid<T>>, v: [T; 3]) -> Self {
        let values = vec![v; grid.len()];
        Self { grid, values }
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }

    pub fn sup_norm(&self) -> T {
        let mut m = T::zero();
        for v in &self.values {
            let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            m = m.max(s);
        }
        m
    }

    /// Bilinear interpolation in (theta, phi) at a unit direction, with
    /// across-pole continuation above the first and below the last ring.
    pub fn eval(&self, dir: [T; 3]) -> [T; 3] {
        let g = &*self.grid;
        let pi = T::PI();
        let two_pi = pi + pi;
        let ct = dir[2].max(-T::one()).min(T::one());
        let theta = ct.acos();
        let mut phi = dir[1].atan2(dir[0]);
        if phi < T::zero() {
            phi += two_pi;
        }
        let dt = pi / T::of(g.n_theta as f64);
        let u = theta / dt - T::of(0.5);
        let i0f = u.floor();
        let t = u - i0f;
        let i0 = i0f.as_f64() as i64;
        let last = g.n_theta as i64 - 1;
        if i0 < 0 {
            // north polar cap: blend ring 0 at phi with ring 0 at phi + pi
            let s = (theta / g.thetas[0] + T::one()) * T::of(0.5);
            let a = self.ring_eval(0, phi + pi);
            let b = self.ring_eval(0, phi);
            return lerp3(a, b, s);
        }
        if i0 >= last {
            let sth = g.thetas[g.n_theta - 1];
            let s = ((pi - theta) / (pi - sth) + T::one()) * T::of(0.5);
            let a = self.ring_eval(g.n_theta - 1, phi + pi);
            let b = self.ring_eval(g.n_theta - 1, phi);
            return lerp3(a, b, s);
        }
        let a = self.ring_eval(i0 as usize, phi);
        let b = self.ring_eval(i0 as usize + 1, phi);
        lerp3(a, b, t)
    }

    /// Bicubic (Catmull-Rom) interpolation in (theta, phi): one degree
    /// smoother than [`Self::eval`]; quadratures over the trace use this so
    /// node-based rules see a C^1 integrand. Rows beyond the poles reflect
    /// through them (theta -> -theta is the point (|theta|, phi + pi)).
    pub fn eval_smooth(&self, dir: [T; 3]) -> [T; 3] {
        let g = &*self.grid;
        let pi = T::PI();
        let two_pi = pi + pi;
        let ct = dir[2].max(-T::one()).min(T::one());
        let theta = ct.acos();
        let mut phi = dir[1].atan2(dir[0]);
        if phi < T::zero() {
            phi += two_pi;
        }
        let dt = pi / T::of(g.n_theta as f64);
        let u = theta / dt - T::of(0.5);
        let i0 = u.floor();
        let t = u - i0;
        let i0 = i0.as_f64() as i64;
        let w = crate::interp::cr_weights(t);
        let nt = g.n_theta as i64;
        let mut acc = [T::zero(); 3];
        for (kk, wk) in w.iter().enumerate() {
            let raw = i0 - 1 + kk as i64;
            let (row, flip) = if raw < 0 {
                ((-1 - raw) as usize, true)
            } else if raw >= nt {
                ((2 * nt - 1 - raw) as usize, true)
            } else {
                (raw as usize, false)
            };
            let p = if flip { phi + pi } else { phi };
            let v = self.ring_eval_cubic(row, p);
            for d in 0..3 {
                acc[d] += *wk * v[d];
            }
        }
        acc
    }

    fn ring_eval_cubic(&self, i_theta: usize, phi: T) -> [T; 3] {
        let g = &*self.grid;
        let two_pi = T::PI() + T::PI();
        let mut p = phi;
        while p < T::zero() {
            p += two_pi;
        }
        while p >= two_pi {
            p -= two_pi;
        }
        let dp = two_pi / T::of(g.n_phi as f64);
        let v = p / dp;
        let j0f = v.floor();
        let s = v - j0f;
        let j0 = (j0f.as_f64() as i64).rem_euclid(g.n_phi as i64) as usize;
        let w = crate::interp::cr_weights(s);
        let mut acc = [T::zero(); 3];
        for (kk, wk) in w.iter().enumerate() {
            let j = (j0 + g.n_phi + kk - 1) % g.n_phi;
            let val = self.values[g.node_index(i_theta, j)];
            for d in 0..3 {
                acc[d] += *wk * val[d];
            }
        }
        acc
    }

    fn ring_eval(&self, i_theta: usize, phi: T) -> [T; 3] {
        let g = &*self.grid;
        let two_pi = T::PI() + T::PI();
        let mut p = phi;
        while p < T::zero() {
            p += two_pi;
        }
        while p >= two_pi {
            p -= two_pi;
        }
        let dp = two_pi / T::of(g.n_phi as f64);
        let v = p / dp;
        let j0f = v.floor();
        let s = v - j0f;
        let j0 = (j0f.as_f64() as usize) % g.n_phi;
        let j1 = (j0 + 1) % g.n_phi;
        lerp3(
            self.values[g.node_index(i_theta, j0)],
            self.values[g.node_index(i_theta, j1)],
            s,
        )
    }
}

fn lerp3<T: Real>(a: [T; 3], b: [T; 3], t: T) -> [T; 3] {
    let u = T::one() - t;
    [
        u * a[0] + t * b[0],
        u * a[1] + t * b[1],
        u * a[2] + t * b[2],
    ]
}

/// (-1)-homogeneous field u0(x) = trace(x/|x|)/|x|, with a cutoff radius
/// below which grid sampling clamps to the value on the cutoff sphere
/// along the same ray.
#[derive(Debug, Clone)]
pub struct HomogeneousField<T> {
    pub trace: SphereField<T>,
    pub singularity_cutoff: T,
}

impl<T: Real> HomogeneousField<T> {
    pub fn new(trace: SphereField<T>, singularity_cutoff: T) -> Result<Self> {
        if !(singularity_cutoff > T::zero()) {
            return Err(Error::Parameter("singularity cutoff must be positive".into()));
        }
        if !trace.is_finite() {
            return Err(Error::Parameter("trace has non-finite values".into()));
        }
        Ok(Self {
            trace,
            singularity_cutoff,
        })
    }

    /// Cutoff tied to a target grid: r_min = 2h.
    pub fn with_cutoff_for(trace: SphereField<T>, grid: &GridSpec<T>) -> Result<Self> {
        Self::new(trace, T::of(2.0) * grid.h())
    }

    /// Exact evaluation away from the origin.
    pub fn eval(&self, x: [T; 3]) -> Result<[T; 3]> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if !(r > T::zero()) {
            return Err(Error::Domain(
                "homogeneous data is singular at the origin".into(),
            ));
        }
        let dir = [x[0] / r, x[1] / r, x[2] / r];
        let v = self.trace.eval(dir);
        Ok([v[0] / r, v[1] / r, v[2] / r])
    }

    /// Evaluation with the singularity clamp: inside the cutoff sphere the
    /// value on the cutoff sphere along the same ray is used.
    pub fn eval_clamped(&self, x: [T; 3]) -> [T; 3] {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == T::zero() {
            // direction undefined; the cell carries no reliable direction
            return [T::zero(), T::zero(), T::zero()];
        }
        let dir = [x[0] / r, x[1] / r, x[2] / r];
        let v = self.trace.eval(dir);
        let rr = r.max(self.singularity_cutoff);
        [v[0] / rr, v[1] / rr, v[2] / rr]
    }

    /// Clamped samples on a grid.
    pub fn sample(&self, grid: GridSpec<T>) -> RealField<T> {
        RealField::vector_from_fn(grid, |p| self.eval_clamped(p))
    }
}

/// Convolution with a normalized Gaussian bump of angular width `eps` on the
/// sphere, discretized on the field's own grid. The per-target normalization
/// makes constants exact fixed points and keeps the output a convex
/// combination of input values (sup-norm never grows).
pub fn mollify_sphere<T: Real>(f: &SphereField<T>, eps: T) -> Result<SphereField<T>> {
    if !(eps > T::zero()) || !(eps < T::of(std::f64::consts::FRAC_PI_4)) {
        return Err(Error::Parameter(format!(
            "mollifier width {eps} outside (0, pi/4)"
        )));
    }
    let g = &*f.grid;
    let support = (T::of(4.0) * eps).min(T::of(std::f64::consts::PI));
    let cos_support = support.cos();
    let inv_eps2 = T::one() / (eps * eps);
    let mut values = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let ni = g.nodes()[i];
        let mut acc = [T::zero(); 3];
        let mut norm = T::zero();
        for j in 0..g.len() {
            let nj = g.nodes()[j];
            let dot = ni[0] * nj[0] + ni[1] * nj[1] + ni[2] * nj[2];
            if dot < cos_support {
                continue;
            }
            let gamma = dot.max(-T::one()).min(T::one()).acos();
            let k = (-gamma * gamma * inv_eps2).exp() * g.weights()[j];
            norm += k;
            let v = f.values[j];
            acc[0] += k * v[0];
            acc[1] += k * v[1];
            acc[2] += k * v[2];
        }
        values.push([acc[0] / norm, acc[1] / norm, acc[2] / norm]);
    }
    Ok(SphereField {
        grid: f.grid.clone(),
        values,
    })
}

/// Helmholtz-Leray projection of homogeneous data realized through the grid:
/// clamped sampling, spectral projection, trace re-extraction by tricubic
/// interpolation on a sphere the grid resolves, exact homogeneous rescaling
/// back to radius 1.
pub fn project_divfree<T: Real>(
    f: &HomogeneousField<T>,
    grid: GridSpec<T>,
) -> Result<HomogeneousField<T>> {
    let g = &*f.trace.grid;
    let h = grid.h();
    // the sphere of radius r_e must carry the trace's angular resolution
    let r_extract = (T::of(1.5) * h * T::of(g.n_theta() as f64) / T::PI()).max(T::of(2.0));
    if r_extract > grid.half_width() * T::of(0.5) {
        return Err(Error::Resolution(format!(
            "grid h = {h} too coarse for a {}x{} sphere grid",
            g.n_theta(),
            g.n_phi()
        )));
    }
    let sampled = f.sample(grid);
    let projected = grid::inverse(&grid::helmholtz_project(&grid::transform(&sampled))?);
    let values: Vec<[T; 3]> = g
        .nodes()
        .iter()
        .map(|&s| {
            let p = [s[0] * r_extract, s[1] * r_extract, s[2] * r_extract];
            let v = interp::tricubic3(&projected, p);
            [v[0] * r_extract, v[1] * r_extract, v[2] * r_extract]
        })
        .collect();
    let trace = SphereField {
        grid: f.trace.grid.clone(),
        values,
    };
    HomogeneousField::new(trace, f.singularity_cutoff)
}

/// The swirl trace sigma -> (-sigma_2, sigma_1, 0): smooth, odd, exactly
/// divergence-free as a homogeneous field.
pub fn rotational_trace<T: Real>(grid: Arc<SphereGrid<T>>) -> SphereField<T> {
    SphereField::from_fn(grid, |s| [-s[1], s[0], T::zero()])
}

/// Swirl modulated by a zonal amplitude; any amplitude profile keeps the
/// homogeneous field exactly divergence-free (the swirl is tangent to the
/// level sets of both |x| and x_3/|x|).
pub fn zonal_swirl_trace<T: Real>(
    grid: Arc<SphereGrid<T>>,
    amplitude: impl Fn(T) -> T,
) -> SphereField<T> {
    SphereField::from_fn(grid, |s| {
        let a = amplitude(s[2]);
        [-a * s[1], a * s[0], T::zero()]
    })
}

/// C^{1/2} corner trace: swirl with amplitude 1/2 + |sigma_3|^{1/2}.
pub fn corner_swirl_trace<T: Real>(grid: Arc<SphereGrid<T>>) -> SphereField<T> {
    zonal_swirl_trace(grid, |c| T::of(0.5) + c.abs().sqrt())
}

/// Write a trace as a plain-text table: one line per node,
/// `theta phi v1 v2 v3`, '#' comments allowed.
pub fn write_trace<T: Real, W: IoWrite>(f: &SphereField<T>, mut w: W) -> Result<()> {
    let g = &*f.grid;
    writeln!(w, "# sphere trace: {} x {} (theta phi v1 v2 v3)", g.n_theta(), g.n_phi())?;
    for i in 0..g.n_theta() {
        for j in 0..g.n_phi() {
            let v = f.values[g.node_index(i, j)];
            writeln!(
                w,
                "{:.17e} {:.17e} {:.17e} {:.17e} {:.17e}",
                g.thetas()[i].as_f64(),
                g.phis()[j].as_f64(),
                v[0].as_f64(),
                v[1].as_f64(),
                v[2].as_f64()
            )?;
        }
    }
    Ok(())
}

/// Read a trace table. The node set must form the complete equiangular grid
/// this crate uses (midpoint colatitudes, uniform longitudes).
pub fn read_trace<T: Real, R: IoRead>(r: R) -> Result<SphereField<T>> {
    let reader = BufReader::new(r);
    let mut rows: Vec<(f64, f64, [f64; 3])> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let parts: Vec<&str> = body.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(Error::Format(format!(
                "trace line {}: expected 5 fields, got {}",
                lineno + 1,
                parts.len()
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse::<f64>().map_err(|_| {
                    Error::Format(format!("trace line {}: bad number '{p}'", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        rows.push((nums[0], nums[1], [nums[2], nums[3], nums[4]]));
    }
    if rows.is_empty() {
        return Err(Error::Format("trace file has no data rows".into()));
    }
    let mut thetas: Vec<f64> = rows.iter().map(|r| r.0).collect();
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thetas.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut phis: Vec<f64> = rows.iter().map(|r| r.1).collect();
    phis.sort_by(|a, b| a.partial_cmp(b).unwrap());
    phis.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let (nt, np) = (thetas.len(), phis.len());
    if nt * np != rows.len() {
        return Err(Error::Format(format!(
            "trace nodes do not form a {nt} x {np} tensor grid"
        )));
    }
    let grid = Arc::new(SphereGrid::<T>::new(nt, np)?);
    let pi = std::f64::consts::PI;
    for (i, &t) in thetas.iter().enumerate() {
        let want = (i as f64 + 0.5) * pi / nt as f64;
        if (t - want).abs() > 1e-6 {
            return Err(Error::Format(format!(
                "colatitude {t} is not the midpoint node {want}"
            )));
        }
    }
    for (j, &p) in phis.iter().enumerate() {
        let want = 2.0 * pi * j as f64 / np as f64;
        if (p - want).abs() > 1e-6 {
            return Err(Error::Format(format!(
                "longitude {p} is not the uniform node {want}"
            )));
        }
    }
    let mut values = vec![[T::zero(); 3]; nt * np];
    let mut seen = vec![false; nt * np];
    for (t, p, v) in rows {
        let i = thetas
            .iter()
            .position(|&x| (x - t).abs() < 1e-9)
            .expect("theta present");
        let j = phis
            .iter()
            .position(|&x| (x - p).abs() < 1e-9)
            .expect("phi present");
        let idx = grid.node_index(i, j);
        if seen[idx] {
            return Err(Error::Format(format!("duplicate node at theta={t} phi={p}")));
        }
        seen[idx] = true;
        values[idx] = [T::of(v[0]), T::of(v[1]), T::of(v[2])];
    }
    Ok(SphereField { grid, values })
}
