use ssns_core::grid::{GridSpec, RealField, transform, inverse};
use std::time::Instant;
fn main() {
    for n in [64usize, 128] {
        let g = GridSpec::new(n, 16.0f64).unwrap();
        let f = RealField::vector_from_fn(g, |p| [p[0].sin(), p[1].cos(), (p[0]*p[2]).sin()]);
        let t0 = Instant::now();
        let s = transform(&f);
        let t1 = t0.elapsed();
        let t0 = Instant::now();
        let _b = inverse(&s);
        let t2 = t0.elapsed();
        println!("n={n}: forward(3c) {:?}, inverse(3c) {:?}", t1, t2);
    }
}
