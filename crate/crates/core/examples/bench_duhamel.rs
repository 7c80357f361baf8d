use ssns_core::grid::{GridSpec, RealField};
use ssns_core::stokes::{DuhamelQuadrature, DuhamelWorkspace, GaussianCurlForcing};
use std::time::Instant;
fn main() {
    let g = GridSpec::new(128, 16.0f64).unwrap();
    let f = GaussianCurlForcing { c: [0.0, 0.0, 1.0], sigma: 1.0 }.sample(g);
    let t0 = Instant::now();
    let ws = DuhamelWorkspace::new(g, DuhamelQuadrature::new(64).unwrap());
    println!("workspace build: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let _ = ws.apply(&f).unwrap();
    println!("duhamel apply n=128 ns=64: {:?}", t0.elapsed());
}
