//! Estimators and distributional tests used by the harness and the test suites.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pairwise summation over a slice in index order. The result depends only on
/// the slice contents, never on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return xs[0];
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance (two-pass, pairwise sums). Zero for fewer than two samples.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 || xs.iter().all(|&x| x == xs[0]) {
        return 0.0;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (xs.len() - 1) as f64
}

/// Standard error of the mean.
pub fn standard_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub statistic: String,
    pub length: f64,
    pub mean: f64,
    pub variance: f64,
    pub ci95_half_width: f64,
    pub trials: u64,
    pub master_seed: u64,
}

impl TrialSummary {
    pub fn from_samples(statistic: &str, length: f64, master_seed: u64, xs: &[f64]) -> Self {
        let variance = sample_variance(xs);
        let trials = xs.len() as u64;
        Self {
            statistic: statistic.to_string(),
            length,
            mean: mean(xs),
            variance,
            ci95_half_width: 1.96 * (variance / trials as f64).sqrt(),
            trials,
            master_seed,
        }
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance / self.trials as f64).sqrt()
    }

    /// z-score of `reference` against this estimate.
    pub fn z_score(&self, reference: f64) -> f64 {
        let se = self.standard_error();
        if se == 0.0 {
            if self.mean == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference) / se
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

fn chi2_sf(stat: f64, dof: f64) -> f64 {
    if dof <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}

/// Pearson goodness-of-fit of observed counts against expected counts.
pub fn chi_squared_gof(observed: &[u64], expected: &[f64]) -> TestResult {
    assert_eq!(observed.len(), expected.len());
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = (observed.len() as f64 - 1.0).max(0.0);
    TestResult {
        statistic: stat,
        dof,
        p_value: chi2_sf(stat, dof),
    }
}

/// Two-sample chi-squared homogeneity test on integer-valued samples.
/// Sparse tail categories are pooled until each pooled bin holds at least
/// `min_count` observations from both samples combined.
pub fn chi_squared_two_sample(a: &[u64], b: &[u64], min_count: u64) -> TestResult {
    use std::collections::BTreeMap;
    let mut table: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for &x in a {
        table.entry(x).or_default().0 += 1;
    }
    for &x in b {
        table.entry(x).or_default().1 += 1;
    }
    let mut bins: Vec<(u64, u64)> = Vec::new();
    let mut acc = (0u64, 0u64);
    for (_, (ca, cb)) in table {
        acc.0 += ca;
        acc.1 += cb;
        if acc.0 + acc.1 >= min_count {
            bins.push(acc);
            acc = (0, 0);
        }
    }
    if acc.0 + acc.1 > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let k1 = (nb / na).sqrt();
    let k2 = (na / nb).sqrt();
    let stat: f64 = bins
        .iter()
        .map(|&(x, y)| {
            let (x, y) = (x as f64, y as f64);
            (k1 * x - k2 * y).powi(2) / (x + y)
        })
        .sum();
    let dof = (bins.len() as f64 - 1.0).max(0.0);
    TestResult {
        statistic: stat,
        dof,
        p_value: chi2_sf(stat, dof),
    }
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction to the Kolmogorov series).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TestResult {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i].min(ys[j]);
        while i < n && xs[i] <= x {
            i += 1;
        }
        while j < m && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    TestResult {
        statistic: d,
        dof: 0.0,
        p_value: kolmogorov_q(lambda),
    }
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let term = sign * (-2.0 * (j as f64).powi(2) * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}
