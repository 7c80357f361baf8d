//! Closed-form axisymmetric (-1)-homogeneous stationary Navier-Stokes
//! solution (jet along +x3) with axis parameter b > 1, used as an exact
//! oracle for the profile equation: for (-1)-homogeneous stationary fields
//! x . grad(U) = -U, so the drift terms cancel and the profile equation
//! reduces to the stationary system the closed form satisfies.

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField};
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub struct LandauField<T> {
    b: T,
}

impl<T: Real> LandauField<T> {
    pub fn new(b: T) -> Result<Self> {
        if !(b > T::one()) {
            return Err(Error::Parameter(format!(
                "Landau parameter must exceed 1 for regularity away from 0, got {b}"
            )));
        }
        Ok(Self { b })
    }

    pub fn b(&self) -> T {
        self.b
    }

    /// Velocity at x != 0:
    /// u = u_r rhat + u_theta thetahat with c = x3/r,
    /// u_r = (2/r) [ (b^2 - 1)/(b - c)^2 - 1 ],
    /// u_theta thetahat = -2 (c rhat - e3) / (r (b - c))  (regular at the axis).
    pub fn velocity(&self, x: [T; 3]) -> [T; 3] {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let rh = [x[0] / r, x[1] / r, x[2] / r];
        let c = rh[2];
        let b = self.b;
        let two = T::of(2.0);
        let ur = two / r * ((b * b - T::one()) / ((b - c) * (b - c)) - T::one());
        let swirl = -two / (r * (b - c));
        [
            ur * rh[0] + swirl * (c * rh[0]),
            ur * rh[1] + swirl * (c * rh[1]),
            ur * rh[2] + swirl * (c * rh[2] - T::one()),
        ]
    }

    /// Pressure (zero at infinity): p = 4 (b c - 1) / (r^2 (b - c)^2).
    pub fn pressure(&self, x: [T; 3]) -> T {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let r = r2.sqrt();
        let c = x[2] / r;
        let b = self.b;
        T::of(4.0) * (b * c - T::one()) / (r2 * (b - c) * (b - c))
    }

    /// Sample velocity (clamped inside r_min along rays, like homogeneous
    /// data) and pressure (clamped likewise, scaling as r^-2) on a grid.
    pub fn sample(&self, grid: GridSpec<T>, r_min: T) -> (RealField<T>, RealField<T>) {
        let vel = RealField::vector_from_fn(grid, |p| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if r == T::zero() {
                return [T::zero(), T::zero(), T::zero()];
            }
            if r < r_min {
                let s = r_min / r;
                let v = self.velocity([p[0] * s, p[1] * s, p[2] * s]);
                return v;
            }
            self.velocity(p)
        });
        let pres = RealField::scalar_from_fn(grid, |p| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if r == T::zero() {
                return T::zero();
            }
            if r < r_min {
                let s = r_min / r;
                return self.pressure([p[0] * s, p[1] * s, p[2] * s]);
            }
            self.pressure(p)
        });
        (vel, pres)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe_points() -> Vec<[f64; 3]> {
        let mut state = 0xfeedbeefu64;
        let mut rnd = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut pts = Vec::new();
        while pts.len() < 100 {
            let p = [rnd() * 3.0, rnd() * 3.0, rnd() * 3.0];
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if (1.0..=3.0).contains(&r) {
                pts.push(p);
            }
        }
        pts
    }

    #[test]
    fn parameter_guard() {
        assert!(LandauField::new(0.5f64).is_err());
        assert!(LandauField::new(1.0f64).is_err());
        assert!(LandauField::new(1.01f64).is_ok());
    }

    #[test]
    fn homogeneity_is_exact() {
        let f = LandauField::new(2.0f64).unwrap();
        for p in probe_points() {
            let a = f.velocity([2.0 * p[0], 2.0 * p[1], 2.0 * p[2]]);
            let b = f.velocity(p);
            for d in 0..3 {
                assert!((a[d] - b[d] / 2.0).abs() < 1e-13 * b[d].abs().max(1.0));
            }
            // pressure is (-2)-homogeneous
            let pa = f.pressure([2.0 * p[0], 2.0 * p[1], 2.0 * p[2]]);
            let pb = f.pressure(p);
            assert!((pa - pb / 4.0).abs() < 1e-13 * pb.abs().max(1.0));
        }
    }

    #[test]
    fn divergence_vanishes_at_second_order() {
        let f = LandauField::new(2.0f64).unwrap();
        let div_at = |p: [f64; 3], h: f64| -> f64 {
            let mut d = 0.0;
            for ax in 0..3 {
                let mut pp = p;
                let mut pm = p;
                pp[ax] += h;
                pm[ax] -= h;
                d += (f.velocity(pp)[ax] - f.velocity(pm)[ax]) / (2.0 * h);
            }
            d
        };
        let mut worst_coarse = 0.0f64;
        let mut worst_fine = 0.0f64;
        for p in probe_points() {
            worst_coarse = worst_coarse.max(div_at(p, 1e-2).abs());
            worst_fine = worst_fine.max(div_at(p, 5e-3).abs());
        }
        assert!(worst_fine < 1e-3, "divergence {worst_fine}");
        assert!(
            worst_coarse / worst_fine > 3.0,
            "expected O(h^2): {worst_coarse} -> {worst_fine}"
        );
    }

    #[test]
    fn stationary_nse_residual_vanishes_at_second_order() {
        // -Delta u + u.grad(u) + grad(p) = 0 away from the origin
        let f = LandauField::new(2.0f64).unwrap();
        let resid_at = |p: [f64; 3], h: f64| -> f64 {
            let u0 = f.velocity(p);
            let mut worst = 0.0f64;
            for comp in 0..3 {
                let mut lap = -6.0 * u0[comp] / (h * h);
                let mut adv = 0.0;
                let mut gp = 0.0;
                for ax in 0..3 {
                    let mut pp = p;
                    let mut pm = p;
                    pp[ax] += h;
                    pm[ax] -= h;
                    let up = f.velocity(pp);
                    let um = f.velocity(pm);
                    lap += (up[comp] + um[comp]) / (h * h);
                    adv += u0[ax] * (up[comp] - um[comp]) / (2.0 * h);
                    if ax == comp {
                        gp = (f.pressure(pp) - f.pressure(pm)) / (2.0 * h);
                    }
                }
                worst = worst.max((-lap + adv + gp).abs());
            }
            worst
        };
        let mut coarse = 0.0f64;
        let mut fine = 0.0f64;
        for p in probe_points() {
            coarse = coarse.max(resid_at(p, 2e-2));
            fine = fine.max(resid_at(p, 1e-2));
        }
        assert!(fine < 2e-2, "NSE residual {fine}");
        assert!(coarse / fine > 3.5, "expected O(h^2): {coarse} -> {fine}");
    }

    #[test]
    fn near_singular_parameter_is_finite() {
        let f = LandauField::new(1.01f64).unwrap();
        let v = f.velocity([0.0, 0.0, 1.0]);
        assert!(v.iter().all(|x| x.is_finite()));
        // strong jet along the axis
        assert!(v[2].abs() > 100.0);
        let (vel, pres) = f.sample(GridSpec::new(32, 8.0).unwrap(), 0.5);
        assert!(vel.is_finite());
        assert!(pres.is_finite());
    }
}
