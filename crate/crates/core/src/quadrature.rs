//! Gauss–Legendre quadrature on fixed panels.

use std::sync::OnceLock;

const ORDER: usize = 20;

/// Nodes and weights on `[-1, 1]`, computed once by Newton iteration on `P_n`.
fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(ORDER))
}

pub(crate) fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// 20-point Gauss–Legendre on `[a, b]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite rule: `[a, b]` split at `breaks` and into panels no wider than `panel`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], panel: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let pieces = ((w[1] - w[0]) / panel).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / pieces as f64;
        for k in 0..pieces {
            let lo = w[0] + k as f64 * step;
            let hi = if k + 1 == pieces { w[1] } else { lo + step };
            total += gauss_legendre(&f, lo, hi);
        }
    }
    total
}
