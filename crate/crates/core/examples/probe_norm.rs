use ssns_core::grid::{self, GridSpec, RealField, Window};
fn main() {
    let grid = GridSpec::new(64, 16.0f64).unwrap();
    let w = Window::new(grid);
    let v = RealField::vector_from_fn(grid, |p: [f64; 3]| {
        let r2 = p[0]*p[0]+p[1]*p[1]+p[2]*p[2];
        [0.0, 0.0, 1.0/(1.0+r2)]
    });
    let hat = grid::windowed_spectrum(&v, &w);
    let n = grid.n();
    let npts = grid.points_per_comp();
    // max |c_k| by |k|_inf shell
    for kinf in [1usize, 2, 4, 8, 12, 16, 20, 24, 28, 31, 32] {
        let mut m = 0.0f64;
        for bz in 0..n { for by in 0..n { for bx in 0..n {
            let (kx, ky, kz) = (grid.signed_k(bx).abs() as usize, grid.signed_k(by).abs() as usize, grid.signed_k(bz).abs() as usize);
            if kx.max(ky).max(kz) == kinf {
                m = m.max(hat.data[2*npts + (bz*n+by)*n+bx].norm());
            }
        }}}
        println!("|k|inf = {kinf}: max |c| = {m:.3e}");
    }
    // unwindowed gaussian sanity: derivative exactness
    let gf = RealField::scalar_from_fn(grid, |p: [f64;3]| (-(p[0]*p[0]+p[1]*p[1]+p[2]*p[2])/2.0).exp());
    let gd = grid::inverse(&grid::derivative(&grid::transform(&gf), 2));
    let idx = |ix: usize, iy: usize, iz: usize| (iz*n+iy)*n+ix;
    let p = grid.point(32, 32, 38);
    let want = -p[2]*(-(p[2]*p[2])/2.0).exp();
    println!("gaussian dz: spectral {:.8} analytic {:.8}", gd.data[idx(32,32,38)], want);
}
