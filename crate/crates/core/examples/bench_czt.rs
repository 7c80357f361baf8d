use ssns_core::czt::{CztPlan, scaled_half_spectrum};
use ssns_core::grid::{GridSpec, RealField};
use std::time::Instant;
fn main() {
    let n = 128usize;
    let g = GridSpec::new(n, 16.0f64).unwrap();
    let f = RealField::vector_from_fn(g, |p| [p[0].sin(), p[1].cos(), (p[0]*p[2]*0.1).sin()]);
    for (tau, kcut) in [(0.9f64, 64usize), (0.5, 36), (0.2, 15)] {
        let plan = CztPlan::<f64>::new(n, tau);
        let t0 = Instant::now();
        let h = scaled_half_spectrum(&f, &plan, kcut);
        println!("tau={tau} kcut={kcut}: {:?}  (block {} modes/comp)", t0.elapsed(), h.data.len()/3);
    }
}
