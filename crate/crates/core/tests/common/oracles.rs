//! Independent reference computations used only by tests. Nothing here calls
//! into the estimator being checked.
#![allow(dead_code)]

/// Score of the profile likelihood, evaluated with sums normalised by the
/// largest sample so powers never overflow.
pub fn score(values: &[f64], a: f64) -> f64 {
    let n = values.len() as f64;
    let xmax = values.iter().cloned().fold(f64::MIN, f64::max);
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for &x in values {
        let w = (x / xmax).powf(a);
        s0 += w;
        s1 += w * x.ln();
    }
    let mean_log = values.iter().map(|x| x.ln()).sum::<f64>() / n;
    s1 / s0 - 1.0 / a - mean_log
}

/// Plain bisection on `score` over [lo, hi] until the interval stops shrinking.
pub fn bisect_shape(values: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    assert!(score(values, lo) < 0.0 && score(values, hi) > 0.0, "root not bracketed");
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if score(values, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Profile log-likelihood with the scale maximised out:
/// n ln a - n ln(mean x^a) + (a - 1) Σ ln x - n.
pub fn profile_loglik(values: &[f64], a: f64) -> f64 {
    let n = values.len() as f64;
    let xmax = values.iter().cloned().fold(f64::MIN, f64::max);
    let mean_pow = values.iter().map(|x| (x / xmax).powf(a)).sum::<f64>() / n;
    let log_mean_pow = mean_pow.ln() + a * xmax.ln();
    let sum_log: f64 = values.iter().map(|x| x.ln()).sum();
    n * a.ln() - n * log_mean_pow + (a - 1.0) * sum_log - n
}

/// Nested grid search for the shape maximising the profile likelihood:
/// a log-spaced grid over [lo, hi], then repeated ±2-cell linear refinements.
pub fn grid_search_shape(values: &[f64], lo: f64, hi: f64) -> f64 {
    let coarse = 4001;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut best = lo;
    let mut best_ll = f64::NEG_INFINITY;
    for i in 0..coarse {
        let a = (llo + (lhi - llo) * i as f64 / (coarse - 1) as f64).exp();
        let ll = profile_loglik(values, a);
        if ll > best_ll {
            best_ll = ll;
            best = a;
        }
    }
    let mut half_width = best * ((lhi - llo) / (coarse - 1) as f64).exp_m1() * 2.0;
    while half_width > 1e-9 * best.max(1.0) {
        let (a0, a1) = ((best - half_width).max(lo), best + half_width);
        let steps = 200;
        for i in 0..=steps {
            let a = a0 + (a1 - a0) * i as f64 / steps as f64;
            let ll = profile_loglik(values, a);
            if ll > best_ll {
                best_ll = ll;
                best = a;
            }
        }
        half_width = (a1 - a0) / steps as f64 * 2.0;
    }
    best
}

/// Composite Gauss-Legendre (5-point) quadrature of `f` on [a, b] with `panels` panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        total += NODES.iter().zip(WEIGHTS).map(|(t, w)| w * f(mid + half * t)).sum::<f64>() * half;
    }
    total
}

/// Γ(x) on (0, ∞) from Stirling's series at x + 30, recursed back down.
/// Independent of the Lanczos coefficients used by the library.
pub fn gamma_oracle(x: f64) -> f64 {
    // Γ(x) = Γ(x + k) / (x (x+1) ... (x+k-1))
    let k = 30;
    let z = x + k as f64;
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // Stirling series for ln Γ(z), Bernoulli terms up to B_14
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * (691.0 / 360360.0 - inv2 / 156.0))))));
    let ln_gamma_z = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series;
    let mut ln_prod = 0.0;
    for i in 0..k {
        ln_prod += (x + i as f64).ln();
    }
    (ln_gamma_z - ln_prod).exp()
}
