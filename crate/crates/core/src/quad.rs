//! Gauss-Legendre rules and deterministic summation.

use crate::real::Real;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Nodes are computed in `f64` by Newton iteration on the Legendre recurrence
/// and cast to the working scalar; for the node counts used here (< 512) the
/// iteration converges to machine precision.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_and_derivative(n, x);
                x -= p2 / d2;
                dp = legendre_and_derivative(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`, in the working scalar.
pub fn gauss_legendre_on<T: Real>(n: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre(n);
    let half = (b - a) * T::of(0.5);
    let mid = (b + a) * T::of(0.5);
    let nodes = x.iter().map(|&xi| mid + half * T::of(xi)).collect();
    let weights = w.iter().map(|&wi| half * T::of(wi)).collect();
    (nodes, weights)
}

/// Pairwise (cascade) summation. Deterministic for a fixed input order and
/// accurate to O(eps log n); every reduction in the crate funnels through
/// this so that single- and multi-threaded runs agree bitwise.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    const BASE: usize = 64;
    if xs.len() <= BASE {
        let mut s = T::zero();
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise sum of a mapped sequence without materializing it.
pub fn pairwise_sum_by<T: Real>(n: usize, f: &dyn Fn(usize) -> T) -> T {
    fn rec<T: Real>(off: usize, n: usize, f: &dyn Fn(usize) -> T) -> T {
        const BASE: usize = 64;
        if n <= BASE {
            let mut s = T::zero();
            for i in 0..n {
                s += f(off + i);
            }
            return s;
        }
        let mid = n / 2;
        rec(off, mid, f) + rec(off + mid, n - mid, f)
    }
    rec(0, n, f)
}
