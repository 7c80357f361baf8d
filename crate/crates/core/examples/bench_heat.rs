use ssns_core::caloric::{heat_extend_pointwise, AngularQuad};
use ssns_core::sphere::{rotational_trace, HomogeneousField, SphereGrid};
use std::sync::Arc;
use std::time::Instant;
fn main() {
    let g = Arc::new(SphereGrid::new(32, 64).unwrap());
    let u0 = HomogeneousField::new(rotational_trace(g), 1e-12).unwrap();
    for (na, nb) in [(24usize, 48usize), (32, 64), (32, 128), (48, 96)] {
        let q = AngularQuad { n_alpha: na, n_beta: nb };
        let q2 = AngularQuad { n_alpha: 2*na, n_beta: 2*nb };
        let mut worst: f64 = 0.0;
        for &x in &[[1.0, -2.0, 0.7], [5.0, 1.0, 3.0], [0.2, 0.1, -0.4], [7.0, -7.0, 2.0]] {
            let a = heat_extend_pointwise(&u0, x, 1.0, q);
            let b = heat_extend_pointwise(&u0, x, 1.0, q2);
            let gap = (0..3).map(|d| { let v: f64 = a[d]-b[d]; v*v }).sum::<f64>().sqrt();
            let scale = (0..3).map(|d| { let v: f64 = b[d]; v*v }).sum::<f64>().sqrt();
            worst = worst.max(gap/scale.max(1e-12));
        }
        let t0 = Instant::now();
        for _ in 0..50 { heat_extend_pointwise(&u0, [3.0, 1.0, 2.0], 1.0, q); }
        println!("({na},{nb}): worst rel gap {worst:.2e}, {:?}/point", t0.elapsed()/50);
    }
}
