//! Tricubic (Catmull-Rom) interpolation on the periodic grid.

use crate::grid::RealField;
use crate::real::Real;

pub(crate) fn cr_weights<T: Real>(t: T) -> [T; 4] {
    let half = T::of(0.5);
    let t2 = t * t;
    let t3 = t2 * t;
    [
        (-t3 + T::of(2.0) * t2 - t) * half,
        (T::of(3.0) * t3 - T::of(5.0) * t2 + T::of(2.0)) * half,
        (-T::of(3.0) * t3 + T::of(4.0) * t2 + t) * half,
        (t3 - t2) * half,
    ]
}

struct AxisStencil<T> {
    idx: [usize; 4],
    w: [T; 4],
}

fn axis_stencil<T: Real>(x: T, l: T, h: T, n: usize) -> AxisStencil<T> {
    // grid coordinate u in [0, n); periodic wrap
    let u = (x + l) / h;
    let uf = u.floor();
    let t = u - uf;
    let i0 = uf.as_f64() as i64;
    let nn = n as i64;
    let wrap = |j: i64| -> usize { (j.rem_euclid(nn)) as usize };
    AxisStencil {
        idx: [wrap(i0 - 1), wrap(i0), wrap(i0 + 1), wrap(i0 + 2)],
        w: cr_weights(t),
    }
}

/// Interpolate one component of `f` at a physical point (periodic wrap).
pub fn tricubic<T: Real>(f: &RealField<T>, comp: usize, x: [T; 3]) -> T {
    let spec = f.spec;
    let n = spec.n();
    let l = spec.half_width();
    let h = spec.h();
    let sx = axis_stencil(x[0], l, h, n);
    let sy = axis_stencil(x[1], l, h, n);
    let sz = axis_stencil(x[2], l, h, n);
    let cube = f.comp(comp);
    let mut acc = T::zero();
    for (kz, &iz) in sz.idx.iter().enumerate() {
        let mut plane = T::zero();
        for (ky, &iy) in sy.idx.iter().enumerate() {
            let row = (iz * n + iy) * n;
            let mut line = T::zero();
            for (kx, &ix) in sx.idx.iter().enumerate() {
                line += sx.w[kx] * cube[row + ix];
            }
            plane += sy.w[ky] * line;
        }
        acc += sz.w[kz] * plane;
    }
    acc
}

/// Interpolate a 3-component field at a physical point.
pub fn tricubic3<T: Real>(f: &RealField<T>, x: [T; 3]) -> [T; 3] {
    [
        tricubic(f, 0, x),
        tricubic(f, 1, x),
        tricubic(f, 2, x),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn reproduces_values_at_nodes() {
        let g = GridSpec::new(32, 4.0f64).unwrap();
        let f = RealField::scalar_from_fn(g, |p| (0.7 * p[0]).sin() * (0.4 * p[1] + p[2]).cos());
        let n = g.n();
        for &(ix, iy, iz) in &[(0usize, 0usize, 0usize), (5, 11, 7), (31, 1, 16)] {
            let p = g.point(ix, iy, iz);
            let v = tricubic(&f, 0, p);
            let want = f.data[(iz * n + iy) * n + ix];
            assert!((v - want).abs() < 1e-13);
        }
    }

    #[test]
    fn fourth_order_convergence_on_smooth_field() {
        let probe = [0.312f64, -0.777, 1.213];
        let exact =
            |p: [f64; 3]| (0.9 * p[0]).sin() * (0.6 * p[1]).cos() + (0.3 * p[2]).sin();
        let err_at = |n: usize| -> f64 {
            let g = GridSpec::new(n, 4.0f64).unwrap();
            let f = RealField::scalar_from_fn(g, exact);
            (tricubic(&f, 0, probe) - exact(probe)).abs()
        };
        let e32 = err_at(32);
        let e64 = err_at(64);
        assert!(e64 < 2e-6, "interp error at n=64: {e64}");
        assert!(e32 / e64 > 8.0, "expected high-order rate: {e32} -> {e64}");
    }

    #[test]
    fn periodic_wrap_is_seamless() {
        let g = GridSpec::new(32, 4.0f64).unwrap();
        let k = std::f64::consts::PI / 4.0;
        let f = RealField::scalar_from_fn(g, |p| (k * p[0]).sin());
        // points straddling the wrap at x = +-L
        let a = tricubic(&f, 0, [3.99, 0.0, 0.0]);
        let b = tricubic(&f, 0, [-4.01 + 8.0, 0.0, 0.0]);
        assert!((a - b).abs() < 1e-12);
        let want = (k * 3.99f64).sin();
        assert!((a - want).abs() < 1e-4);
    }
}
