//! Goodness-of-fit statistics for comparing samples with analytic laws.

use crate::numerics::reg_upper_gamma;

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Asymptotic p-value of a KS statistic `d` from `n` samples.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Upper-tail probability of a χ² statistic with `df` degrees of freedom.
pub fn chi_square_p_value(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    reg_upper_gamma(0.5 * df as f64, 0.5 * stat.max(0.0)).unwrap_or(0.0)
}

/// Pearson χ² over bins, pooling neighbours until every expected count is at
/// least 5. Returns (statistic, degrees of freedom before any fitted parameters).
pub fn chi_square(observed: &[f64], expected: &[f64]) -> (f64, usize) {
    let mut pooled = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &ex) in observed.iter().zip(expected) {
        o += ob;
        e += ex;
        if e >= 5.0 {
            pooled.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => pooled.push((o, e)),
        }
    }
    let stat = pooled
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    (stat, pooled.len().saturating_sub(1))
}

/// Total-variation distance between an empirical histogram and a pmf.
pub fn total_variation(counts: &[u64], pmf: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let len = counts.len().max(pmf.len());
    let diff: f64 = (0..len)
        .map(|k| {
            let emp = counts.get(k).copied().unwrap_or(0) as f64 / n.max(1) as f64;
            (emp - pmf.get(k).copied().unwrap_or(0.0)).abs()
        })
        .sum();
    0.5 * diff
}

/// Sample mean and its standard error.
pub fn mean_and_std_error(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
