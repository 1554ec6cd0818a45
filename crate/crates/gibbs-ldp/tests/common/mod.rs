//! Shared statistical helpers for the integration suites.

#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

/// Standard error of the mean of an autocorrelated series via batch means.
pub fn batch_means_se(values: &[f64]) -> f64 {
    let n = values.len();
    let batches = 20.min(n).max(2);
    let per = n / batches;
    let mut means = Vec::with_capacity(batches);
    for b in 0..batches {
        let s = &values[b * per..(b + 1) * per];
        means.push(s.iter().sum::<f64>() / per as f64);
    }
    let k = means.len() as f64;
    let m = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1.0);
    (var / k).sqrt()
}

/// Chi-square goodness-of-fit p-value for observed counts against expected
/// counts. Bins with expected mass below `min_expected` are pooled into
/// their neighbor; `extra_constraints` reduces the degrees of freedom (1 for
/// a fixed total, more when parameters were estimated).
pub fn chi_square_p_value(observed: &[f64], expected: &[f64], extra_constraints: usize) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let min_expected = 5.0;
    let mut obs_pooled = Vec::new();
    let mut exp_pooled = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        acc_o += o;
        acc_e += e;
        if acc_e >= min_expected {
            obs_pooled.push(acc_o);
            exp_pooled.push(acc_e);
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    if acc_e > 0.0 {
        if let (Some(o), Some(e)) = (obs_pooled.last_mut(), exp_pooled.last_mut()) {
            *o += acc_o;
            *e += acc_e;
        } else {
            obs_pooled.push(acc_o);
            exp_pooled.push(acc_e);
        }
    }
    let stat: f64 = obs_pooled
        .iter()
        .zip(&exp_pooled)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = obs_pooled.len().saturating_sub(1 + extra_constraints);
    if dof == 0 {
        return 1.0;
    }
    let chi = ChiSquared::new(dof as f64).expect("positive dof");
    1.0 - chi.cdf(stat)
}

/// Two-sample chi-square homogeneity p-value on pre-binned counts.
pub fn chi_square_two_sample_p_value(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let total_a: f64 = a.iter().sum();
    let total_b: f64 = b.iter().sum();
    // Pool sparse bins using the combined counts.
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        acc.0 += x;
        acc.1 += y;
        if acc.0 + acc.1 >= 10.0 {
            bins.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        if let Some(last) = bins.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        } else {
            bins.push(acc);
        }
    }
    let mut stat = 0.0;
    for &(x, y) in &bins {
        let pooled = (x + y) / (total_a + total_b);
        let ea = pooled * total_a;
        let eb = pooled * total_b;
        if ea > 0.0 {
            stat += (x - ea) * (x - ea) / ea;
        }
        if eb > 0.0 {
            stat += (y - eb) * (y - eb) / eb;
        }
    }
    let dof = bins.len().saturating_sub(1);
    if dof == 0 {
        return 1.0;
    }
    let chi = ChiSquared::new(dof as f64).expect("positive dof");
    1.0 - chi.cdf(stat)
}

/// log P(Poisson(mean) = k)
pub fn poisson_log_pmf(mean: f64, k: u64) -> f64 {
    let kf = k as f64;
    -mean + kf * mean.ln() - ln_gamma(kf + 1.0)
}

/// log P(Bin(n, p) = k)
pub fn binomial_log_pmf(n: u64, p: f64, k: u64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0)
        + kf * p.ln()
        + (nf - kf) * (1.0 - p).ln()
}
