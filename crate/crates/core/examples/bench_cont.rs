use ssns_core::caloric::heat_extend;
use ssns_core::grid::GridSpec;
use ssns_core::solver::{ContinuationConfig, ProfileProblem};
use ssns_core::sphere::{rotational_trace, HomogeneousField, SphereGrid};
use std::sync::Arc;
use std::time::Instant;
fn main() {
    let grid = GridSpec::new(64, 16.0f64).unwrap();
    let sg = Arc::new(SphereGrid::new(24, 48).unwrap());
    let u0 = HomogeneousField::with_cutoff_for(rotational_trace(sg), &grid).unwrap();
    let t0 = Instant::now();
    let profile = heat_extend(&u0, grid).unwrap();
    println!("heat_extend n=64: {:?}", t0.elapsed());
    let cfg = ContinuationConfig::<f64>::default();
    let problem = ProfileProblem::new(profile, cfg.n_s).unwrap();
    let t0 = Instant::now();
    let res = problem.continuation(&cfg).unwrap();
    println!("continuation n=64: {:?} status {:?} mu {}", t0.elapsed(), res.status, res.achieved_mu);
    let mut per_mu = std::collections::BTreeMap::new();
    for r in &res.log { *per_mu.entry((r.mu * 100.0) as i64).or_insert(0) += 1; }
    println!("iterations per mu: {per_mu:?}");
    if let Some(s) = &res.solution {
        println!("x_norm {:.6e} fp_res {:.3e} profile_res {:.3e}", s.x_norm, s.fp_residual, s.profile_residual);
    }
}
