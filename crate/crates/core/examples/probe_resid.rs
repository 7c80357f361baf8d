use ssns_core::caloric::{heat_extend, caloric_identity_residual};
use ssns_core::diagnostics::profile_residual;
use ssns_core::grid::{GridSpec, RealField};
use ssns_core::sphere::{rotational_trace, HomogeneousField, SphereGrid};
use std::sync::Arc;
fn main() {
    for n in [64usize, 128] {
        let grid = GridSpec::new(n, 16.0f64).unwrap();
        let sg = Arc::new(SphereGrid::new(24, 48).unwrap());
        for rmin_factor in [2.0f64, 1.0, 0.5] {
            let trace = rotational_trace(sg.clone());
            let u0 = HomogeneousField::new(trace, rmin_factor * grid.h()).unwrap();
            let profile = heat_extend(&u0, grid).unwrap();
            let cal = caloric_identity_residual(&profile.field);
            // Leray-projected residual of the caloric part alone (U = U0, P = 0,
            // nonlinearity present but tiny relative? no - use full formula on U0)
            let p0 = RealField::zeros(grid, 1);
            let pr = profile_residual(&profile.field, &p0).unwrap();
            println!("n={n} rmin={rmin_factor}h: caloric={:.3e} leray(U0)={:.3e} full(U0)={:.3e}",
                cal.value, pr.leray_relative, pr.full_relative);
        }
    }
}
