//! Gauss-Legendre quadrature on panels.
//!
//! Nodes and weights are computed once per order by Newton iteration on the
//! Legendre polynomial and cached. Orders up to 32 converge to full double
//! precision in a handful of iterations.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Legendre P_n(x) and its derivative via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard.entry(n).or_insert_with(|| compute_rule(n)).clone()
}

/// Integrate `f` over [a, b] with an n-point Gauss rule.
pub fn integrate_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = crate::sum::Accum::new();
    for (x, w) in xs.iter().zip(ws.iter()) {
        acc.add(w * f(mid + half * x));
    }
    half * acc.value()
}

/// Integrate over a list of breakpoints, n nodes per panel.
pub fn integrate_panels<F: FnMut(f64) -> f64>(f: &mut F, breaks: &[f64], n: usize) -> f64 {
    let mut acc = crate::sum::Accum::new();
    for w in breaks.windows(2) {
        acc.add(integrate_panel(f, w[0], w[1], n));
    }
    acc.value()
}

/// Gauss-Legendre panel rule for a complex-valued integrand.
pub fn integrate_panel_complex<F: FnMut(f64) -> num_complex::Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    n: usize,
) -> num_complex::Complex64 {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = num_complex::Complex64::new(0.0, 0.0);
    for (x, w) in xs.iter().zip(ws.iter()) {
        s += f(mid + half * x) * *w;
    }
    s * half
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`;
/// returns `(argmax, max)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    assert!(b > a && tol > 0.0);
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
