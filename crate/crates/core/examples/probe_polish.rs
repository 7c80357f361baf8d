use ssns_core::caloric::heat_extend;
use ssns_core::diagnostics::profile_residual;
use ssns_core::grid::{self, GridSpec, RealField, Window};
use ssns_core::solver::{ContinuationConfig, ProfileProblem};
use ssns_core::stokes::{DuhamelQuadrature, DuhamelWorkspace};
use ssns_core::sphere::{rotational_trace, HomogeneousField, SphereGrid};
use std::sync::Arc;
use std::time::Instant;

fn caloric_defect(u: &RealField<f64>) -> RealField<f64> {
    let w = Window::with_bounds(u.spec, 0.70, 0.95);
    let hat = grid::windowed_spectrum(u, &w);
    let lap = grid::inverse_owned(grid::laplacian(&hat));
    let drift = grid::scale_drift(&hat);
    let mut d = RealField::zeros(u.spec, 3);
    for c in 0..3 {
        let dst = d.comp_mut(c);
        for i in 0..dst.len() {
            dst[i] = -lap.comp(c)[i] - 0.5 * u.comp(c)[i] - 0.5 * drift.comp(c)[i];
        }
    }
    d
}

fn main() {
    let n = 64usize;
    let grid = GridSpec::new(n, 16.0f64).unwrap();
    let sg = Arc::new(SphereGrid::new(24, 48).unwrap());
    let u0 = HomogeneousField::with_cutoff_for(rotational_trace(sg), &grid).unwrap();
    let mut profile = heat_extend(&u0, grid).unwrap();
    let ws = DuhamelWorkspace::new(grid, DuhamelQuadrature::new(64).unwrap());

    for pass in 0..3 {
        let p0 = RealField::zeros(grid, 1);
        let pr = profile_residual(&profile.field, &p0).unwrap();
        // linear-part-only leray: measure via the defect field directly
        let d = caloric_defect(&profile.field);
        let wl = Window::with_bounds(grid, 0.50, 0.68);
        let loc = wl.apply(&d);
        let proj = grid::inverse_owned(grid::helmholtz_project(&grid::transform(&loc)).unwrap());
        let inner = grid.inner_indices();
        println!("pass {pass}: leray(U0 linear) = {:.3e}  (full profile leray {:.3e})",
            proj.l2_over(&inner), pr.leray_relative);
        if pass == 2 { break; }
        let (g_of_d, _) = ws.apply(&d).unwrap();
        profile.field.axpy(-1.0, &g_of_d);
    }

    // now run the continuation with the polished seed
    let cfg = ContinuationConfig::<f64>::default();
    let problem = ProfileProblem::new(profile, cfg.n_s).unwrap();
    let t0 = Instant::now();
    let res = problem.continuation(&cfg).unwrap();
    let s = res.solution.as_ref().unwrap();
    println!("continuation: {:?} fp {:.2e} leray {:.3e} x_norm {:.6e}",
        t0.elapsed(), s.fp_residual, s.profile_residual, s.x_norm);
}
