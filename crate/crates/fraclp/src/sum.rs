//! Compensated summation and small statistics helpers.
//!
//! All reductions in this crate that feed reported numbers go through these
//! helpers in a fixed order, so results are bit-reproducible for a given
//! input regardless of thread count.

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accum {
    sum: f64,
    comp: f64,
}

impl Accum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice in index order.
pub fn sum(xs: &[f64]) -> f64 {
    let mut acc = Accum::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Compensated sum of an iterator in iteration order.
pub fn sum_iter<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = Accum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    sum(xs) / xs.len() as f64
}

/// Unbiased sample variance (n-1 denominator).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    sum_iter(xs.iter().map(|&x| (x - m) * (x - m))) / (xs.len() - 1) as f64
}

/// Standard error of the sample mean.
pub fn standard_error(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::INFINITY;
    }
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Empirical quantile by the nearest-rank rule on a sorted copy.
/// `q` in [0,1]; q = 1 gives the maximum.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    assert!(!xs.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&q), "quantile level out of range");
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in quantile input"));
    let rank = ((q * v.len() as f64).ceil() as usize).max(1) - 1;
    v[rank.min(v.len() - 1)]
}

/// Least-squares line fit `y ≈ slope*x + intercept`; returns (slope, intercept, r²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "linear fit needs at least two points");
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx = sum_iter(x.iter().map(|&u| (u - mx) * (u - mx)));
    let sxy = sum_iter(x.iter().zip(y).map(|(&u, &v)| (u - mx) * (v - my)));
    let syy = sum_iter(y.iter().map(|&v| (v - my) * (v - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        let ss_res = sum_iter(
            x.iter()
                .zip(y)
                .map(|(&u, &v)| (v - slope * u - intercept).powi(2)),
        );
        1.0 - ss_res / syy
    };
    let _ = n;
    (slope, intercept, r2)
}
