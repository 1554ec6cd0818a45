//! Monte-Carlo estimation of the normalized limit objects at finite n:
//! log partition functions (naive reweighting and thermodynamic
//! integration), score-tail log-probabilities, convergence profiles along a
//! doubling ladder of window sizes, and the boundary-Hamiltonian gap check.
//!
//! Estimators run a fixed number of independent replicas, each on its own
//! RNG stream; the standard error is the between-replica one. Replica
//! results are merged in sorted order, so the merged numbers do not depend
//! on scheduling or on which stream ran on which thread.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{boundary_count, stirling_log_prob, stirling_normalized};
use crate::energy::Energy;
use crate::errors::Error;
use crate::hamiltonian::{hamiltonian, BoundaryCondition, HamiltonianSpec};
use crate::interaction::InteractionModel;
use crate::rng::RngStream;
use crate::sampling::{mcmc_canonical, sample_binomial, CanonicalChain, McmcConfig};
use crate::score::{score_average, ScoreModel};
use crate::torus::TorusWindow;
use crate::Result;

/// A point estimate with its standard error and provenance.
#[derive(Clone, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub method: String,
}

/// Log partition function estimates against the binomial reference, both raw
/// and per unit volume, plus the Poisson-reference value obtained by adding
/// the exact `log P(Poisson(n) = n)` term.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionEstimate {
    /// `log Z̃_n` (binomial reference).
    pub log_z: Estimate,
    /// `(λ/n)·log Z̃_n`.
    pub normalized: f64,
    pub normalized_se: f64,
    /// `log Z_n = log Z̃_n + log P(Poisson(n) = n)`.
    pub log_z_poisson_ref: f64,
    /// Mean Boltzmann weight and its standard error (naive method only).
    pub weight_mean: Option<f64>,
    pub weight_mean_se: Option<f64>,
}

fn merge_replica_means(mut means: Vec<f64>) -> (f64, f64) {
    means.sort_by(|a, b| a.total_cmp(b));
    let k = means.len() as f64;
    let mean = means.iter().sum::<f64>() / k;
    if means.len() < 2 {
        return (mean, 0.0);
    }
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Naive estimator of `log Z̃_n = log E[exp(-H_n(B_n))]`: the log of the
/// sample mean of the Boltzmann weight over i.i.d. binomial draws, with a
/// delta-method standard error. Fails with `AllZeroWeights` when every draw
/// is forbidden — the honest signal that the naive method is out of its
/// depth for this model and n.
pub fn estimate_log_partition_naive(
    v: &InteractionModel,
    spec: &HamiltonianSpec,
    w: &TorusWindow,
    samples: u64,
    replicas: usize,
    stream: RngStream,
) -> Result<PartitionEstimate> {
    spec.validate_model(v)?;
    if v.is_hard_core() {
        crate::sampling::check_hard_core_intensity(w, v.radius())?;
    } else if v.bounded_by().is_none() && v.cardinality_bound(1).is_none() {
        return Err(Error::PreconditionViolated(
            "naive estimator needs a bounded or hard-core interaction".into(),
        ));
    }
    let replicas = replicas.max(1);
    let per_replica = samples.div_ceil(replicas as u64).max(1);
    let means: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream.substream(k as u64).rng();
            let mut sum = 0.0f64;
            for _ in 0..per_replica {
                let cfg = sample_binomial(w, &mut rng);
                let h = hamiltonian(spec, v, &cfg).expect("sampled configuration evaluates");
                sum += h.boltzmann();
            }
            sum / per_replica as f64
        })
        .collect();
    let (mean, se) = merge_replica_means(means);
    if mean <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    // Nonnegative V means weights in [0, 1]; the normalized log must be ≤ 0.
    if v.shift() >= 0.0 {
        assert!(
            mean <= 1.0 + 1e-12,
            "Boltzmann weights exceeded 1 for a nonnegative interaction"
        );
    }
    let total = per_replica * replicas as u64;
    let log_z = Estimate {
        value: mean.ln(),
        std_error: se / mean,
        n_samples: total,
        method: "naive".into(),
    };
    let norm = w.intensity() / w.point_budget() as f64;
    Ok(PartitionEstimate {
        normalized: norm * log_z.value,
        normalized_se: norm * log_z.std_error,
        log_z_poisson_ref: log_z.value + stirling_log_prob(w.point_budget() as u64),
        weight_mean: Some(mean),
        weight_mean_se: Some(se),
        log_z,
    })
}

/// Chebyshev–Lobatto nodes mapped to [0, 1], endpoints included, ascending.
pub fn chebyshev_lobatto_grid(nodes: usize) -> Vec<f64> {
    assert!(nodes >= 2);
    let m = nodes - 1;
    (0..=m)
        .map(|j| 0.5 * (1.0 - (std::f64::consts::PI * j as f64 / m as f64).cos()))
        .collect()
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Thermodynamic integration: `log Z̃_n(1) = -∫_0^1 E_β[H_n] dβ`, with the
/// per-β means taken from canonical MCMC at inverse temperature β and the
/// integral by trapezoidal quadrature on `beta_grid` (which must contain 0
/// and 1). The quadrature error is estimated by re-integrating on every
/// other node; the Monte-Carlo error propagates through the trapezoid
/// weights from batch-means variances.
pub fn estimate_log_partition_ti(
    v: &InteractionModel,
    spec: &HamiltonianSpec,
    w: &TorusWindow,
    beta_grid: &[f64],
    mcmc: &McmcConfig,
    stream: RngStream,
) -> Result<PartitionEstimate> {
    spec.validate_model(v)?;
    if v.is_hard_core() {
        return Err(Error::NonFiniteEnergy(
            "thermodynamic integration needs a finite-valued interaction".into(),
        ));
    }
    let mut grid = beta_grid.to_vec();
    grid.sort_by(|a, b| a.total_cmp(b));
    if grid.first() != Some(&0.0) || grid.last() != Some(&1.0) || grid.len() < 2 {
        return Err(Error::ConstraintViolated(
            "beta grid must contain 0 and 1".into(),
        ));
    }
    // β = 0 is the reference: E_0[H] under the plain binomial process.
    let node_stats: Vec<(f64, f64)> = grid
        .par_iter()
        .enumerate()
        .map(|(j, &beta)| {
            let mut rng = stream.substream(j as u64).rng();
            mean_energy_at_beta(v, spec, w, beta, mcmc, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<f64> = node_stats.iter().map(|s| s.0).collect();
    let value = -trapezoid(&grid, &means);
    // Quadrature refinement estimate: drop every other interior node.
    let coarse_idx: Vec<usize> = (0..grid.len()).step_by(2).collect();
    let coarse_idx = if coarse_idx.last() == Some(&(grid.len() - 1)) {
        coarse_idx
    } else {
        let mut c = coarse_idx;
        c.push(grid.len() - 1);
        c
    };
    let coarse_x: Vec<f64> = coarse_idx.iter().map(|&i| grid[i]).collect();
    let coarse_y: Vec<f64> = coarse_idx.iter().map(|&i| means[i]).collect();
    let quad_err = (value - (-trapezoid(&coarse_x, &coarse_y))).abs();
    // Trapezoid weights for the MC variance.
    let mut weights = vec![0.0; grid.len()];
    for i in 0..grid.len() - 1 {
        let h = grid[i + 1] - grid[i];
        weights[i] += 0.5 * h;
        weights[i + 1] += 0.5 * h;
    }
    let mc_var: f64 = node_stats
        .iter()
        .zip(&weights)
        .map(|(s, w)| (w * s.1) * (w * s.1))
        .sum();
    let se = (mc_var + quad_err * quad_err).sqrt();
    let n_samples = (grid.len() * mcmc.samples) as u64;
    let log_z = Estimate {
        value,
        std_error: se,
        n_samples,
        method: "thermodynamic-integration".into(),
    };
    let norm = w.intensity() / w.point_budget() as f64;
    Ok(PartitionEstimate {
        normalized: norm * value,
        normalized_se: norm * se,
        log_z_poisson_ref: value + stirling_log_prob(w.point_budget() as u64),
        weight_mean: None,
        weight_mean_se: None,
        log_z,
    })
}

/// Mean and batch-means standard error of `H_n` under the β-tempered chain.
fn mean_energy_at_beta<R: rand::Rng + ?Sized>(
    v: &InteractionModel,
    spec: &HamiltonianSpec,
    w: &TorusWindow,
    beta: f64,
    mcmc: &McmcConfig,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if beta == 0.0 {
        // Direct i.i.d. sampling from the reference.
        let mut values = Vec::with_capacity(mcmc.samples);
        for _ in 0..mcmc.samples {
            let cfg = sample_binomial(w, rng);
            values.push(
                hamiltonian(spec, v, &cfg)?
                    .finite()
                    .ok_or(Error::NonFiniteEnergy("infinite energy at β = 0".into()))?,
            );
        }
        return Ok(mean_and_batch_se(&values));
    }
    let mut chain = CanonicalChain::new(v, spec, w, rng)?.with_beta(beta)?;
    for _ in 0..mcmc.burn_in_sweeps {
        chain.sweep(rng);
    }
    let mut values = Vec::with_capacity(mcmc.samples);
    for _ in 0..mcmc.samples {
        for _ in 0..mcmc.thinning_sweeps {
            chain.sweep(rng);
        }
        values.push(chain.current_energy());
    }
    Ok(mean_and_batch_se(&values))
}

fn mean_and_batch_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let batches = 10.min(n).max(1);
    if batches < 2 {
        return (mean, 0.0);
    }
    let per = n / batches;
    let mut batch_means = Vec::with_capacity(batches);
    for b in 0..batches {
        let slice = &values[b * per..(b + 1) * per];
        batch_means.push(slice.iter().sum::<f64>() / per as f64);
    }
    let k = batch_means.len() as f64;
    let bm = batch_means.iter().sum::<f64>() / k;
    let var = batch_means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Tail region side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TailDirection {
    /// `Ξ_j ≤ a_j` for all j.
    Le,
    /// `Ξ_j < a_j` for all j.
    Lt,
    /// `Ξ_j > a_j` for all j.
    Gt,
}

impl TailDirection {
    fn contains(&self, xi: &[f64], a: &[f64]) -> bool {
        match self {
            TailDirection::Le => xi.iter().zip(a).all(|(x, t)| x <= t),
            TailDirection::Lt => xi.iter().zip(a).all(|(x, t)| x < t),
            TailDirection::Gt => xi.iter().zip(a).all(|(x, t)| x > t),
        }
    }
}

/// How to draw from `P_n` for tail estimation.
#[derive(Clone, Debug)]
pub enum TailSampler {
    /// Direct binomial draws; exact for the trivial interaction (γ = 1).
    Direct { samples: u64 },
    /// Canonical MCMC for nontrivial interactions.
    Mcmc(McmcConfig),
}

/// `(λ/n)·log P_n(Ξ ∈ tail)` from the empirical hit frequency, with a
/// Wilson-interval standard error mapped through the logarithm. Zero hits is
/// an error (`ZeroHits`), reported rather than extrapolated.
pub fn estimate_tail_logprob(
    v: &InteractionModel,
    spec: &HamiltonianSpec,
    scores: &[ScoreModel],
    thresholds: &[f64],
    direction: TailDirection,
    w: &TorusWindow,
    sampler: &TailSampler,
    stream: RngStream,
) -> Result<Estimate> {
    if scores.len() != thresholds.len() || scores.is_empty() {
        return Err(Error::ConstraintViolated(
            "need one threshold per score".into(),
        ));
    }
    if thresholds.iter().any(|t| !t.is_finite()) {
        return Err(Error::ConstraintViolated("thresholds must be finite".into()));
    }
    let (hits, total) = match sampler {
        TailSampler::Direct { samples } => {
            let replicas = 16usize;
            let per_replica = samples.div_ceil(replicas as u64).max(1);
            let counts: Vec<u64> = (0..replicas)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream.substream(k as u64).rng();
                    let mut hits = 0u64;
                    for _ in 0..per_replica {
                        let cfg = sample_binomial(w, &mut rng);
                        let xi = score_average(scores, &cfg).expect("budget-sized sample");
                        if direction.contains(&xi, thresholds) {
                            hits += 1;
                        }
                    }
                    hits
                })
                .collect();
            (counts.iter().sum::<u64>(), per_replica * replicas as u64)
        }
        TailSampler::Mcmc(cfg) => {
            let mut rng = stream.rng();
            let samples = mcmc_canonical(v, spec, w, cfg, &mut rng)?;
            let mut hits = 0u64;
            for s in &samples {
                let xi = score_average(scores, s)?;
                if direction.contains(&xi, thresholds) {
                    hits += 1;
                }
            }
            (hits, samples.len() as u64)
        }
    };
    if hits == 0 {
        return Err(Error::ZeroHits);
    }
    let p_hat = hits as f64 / total as f64;
    let (lo, hi) = wilson_interval(hits, total, 1.0);
    let norm = w.intensity() / w.point_budget() as f64;
    Ok(Estimate {
        value: norm * p_hat.ln(),
        std_error: norm * 0.5 * (hi.ln() - lo.ln()),
        n_samples: total,
        method: match sampler {
            TailSampler::Direct { .. } => "tail-direct".into(),
            TailSampler::Mcmc(_) => "tail-mcmc".into(),
        },
    })
}

/// Wilson score interval at `z` standard normal units.
fn wilson_interval(hits: u64, total: u64, z: f64) -> (f64, f64) {
    let n = total as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(f64::MIN_POSITIVE), center + half)
}

/// What a convergence profile tracks along the ladder.
#[derive(Clone, Debug)]
pub enum ProfileTask {
    /// `(λ/n)·log Z̃_n` by the naive estimator.
    PartitionNaive { samples: u64, replicas: usize },
    /// `(λ/n)·log Z̃_n` by thermodynamic integration.
    PartitionTi { beta_nodes: usize, mcmc: McmcConfig },
    /// `(λ/n)·log P_n(Ξ ∈ tail)`.
    Tail {
        scores: Vec<ScoreModel>,
        thresholds: Vec<f64>,
        direction: TailDirection,
        sampler: TailSampler,
    },
    /// `(λ/n)·log P(Poisson(n) = n)`, exact.
    Stirling,
}

/// Estimates along a strictly increasing ladder of window sizes, with the
/// successive differences and the Cauchy-trend statistic (max |Δ| over the
/// final three rungs).
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceProfile {
    pub rungs: Vec<(usize, Estimate)>,
    pub diffs: Vec<f64>,
    pub cauchy_stat: f64,
}

pub fn convergence_profile(
    task: &ProfileTask,
    v: &InteractionModel,
    spec: &HamiltonianSpec,
    lambda: f64,
    dim: usize,
    ladder: &[usize],
    stream: RngStream,
) -> Result<ConvergenceProfile> {
    if ladder.windows(2).any(|w| w[0] >= w[1]) || ladder.is_empty() {
        return Err(Error::ConstraintViolated(
            "ladder must be strictly increasing and nonempty".into(),
        ));
    }
    let mut rungs = Vec::with_capacity(ladder.len());
    for (i, &n) in ladder.iter().enumerate() {
        let w = TorusWindow::new(dim, lambda, n)?;
        let rung_stream = stream.substream((i as u64) << 32);
        let est = match task {
            ProfileTask::PartitionNaive { samples, replicas } => {
                let p = estimate_log_partition_naive(v, spec, &w, *samples, *replicas, rung_stream)?;
                Estimate {
                    value: p.normalized,
                    std_error: p.normalized_se,
                    n_samples: p.log_z.n_samples,
                    method: p.log_z.method,
                }
            }
            ProfileTask::PartitionTi { beta_nodes, mcmc } => {
                let grid = chebyshev_lobatto_grid(*beta_nodes);
                let p = estimate_log_partition_ti(v, spec, &w, &grid, mcmc, rung_stream)?;
                Estimate {
                    value: p.normalized,
                    std_error: p.normalized_se,
                    n_samples: p.log_z.n_samples,
                    method: p.log_z.method,
                }
            }
            ProfileTask::Tail {
                scores,
                thresholds,
                direction,
                sampler,
            } => estimate_tail_logprob(
                v, spec, scores, thresholds, *direction, &w, sampler, rung_stream,
            )?,
            ProfileTask::Stirling => Estimate {
                value: stirling_normalized(n as u64, lambda),
                std_error: 0.0,
                n_samples: 0,
                method: "stirling-exact".into(),
            },
        };
        rungs.push((n, est));
    }
    let diffs: Vec<f64> = rungs
        .windows(2)
        .map(|p| p[1].1.value - p[0].1.value)
        .collect();
    let cauchy_stat = diffs
        .iter()
        .rev()
        .take(2)
        .map(|d| d.abs())
        .fold(0.0, f64::max);
    Ok(ConvergenceProfile {
        rungs,
        diffs,
        cauchy_stat,
    })
}

/// Boundary-Hamiltonian gaps over binomial samples: on samples whose
/// r-boundary holds at most `n·ε` points, `|H - Ĥ¹| ≤ 2c·nε` and
/// `|H - Ĥ²| ≤ 3c·nε`, with `c` the declared bound of the interaction.
#[derive(Clone, Debug, Serialize)]
pub struct GapSummary {
    pub samples_used: u64,
    pub samples_skipped: u64,
    pub max_gap_h1: f64,
    pub max_gap_h2: f64,
    pub cap_h1: f64,
    pub cap_h2: f64,
    pub violations_h1: u64,
    pub violations_h2: u64,
}

impl GapSummary {
    pub fn pass(&self) -> bool {
        self.violations_h1 == 0 && self.violations_h2 == 0
    }
}

pub fn hamiltonian_variant_gap(
    v: &InteractionModel,
    bc: &BoundaryCondition,
    w: &TorusWindow,
    eps: f64,
    samples: u64,
    stream: RngStream,
) -> Result<GapSummary> {
    let c = v.bounded_by().ok_or_else(|| {
        Error::PreconditionViolated(
            "the boundary gap check needs an interaction with a declared bound".into(),
        )
    })?;
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::ConstraintViolated(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let n = w.point_budget();
    let cap1 = 2.0 * c * n as f64 * eps;
    let cap2 = 3.0 * c * n as f64 * eps;
    let spec1 = HamiltonianSpec::BoundaryOne(bc.clone());
    let spec2 = HamiltonianSpec::BoundaryTwo(bc.clone());
    let mut rng = stream.rng();
    let mut summary = GapSummary {
        samples_used: 0,
        samples_skipped: 0,
        max_gap_h1: 0.0,
        max_gap_h2: 0.0,
        cap_h1: cap1,
        cap_h2: cap2,
        violations_h1: 0,
        violations_h2: 0,
    };
    for _ in 0..samples {
        let cfg = sample_binomial(w, &mut rng);
        if boundary_count(&cfg, v.radius())? as f64 > n as f64 * eps {
            summary.samples_skipped += 1;
            continue;
        }
        summary.samples_used += 1;
        let h = finite_h(hamiltonian(&HamiltonianSpec::Periodic, v, &cfg)?)?;
        let h1 = finite_h(hamiltonian(&spec1, v, &cfg)?)?;
        let h2 = finite_h(hamiltonian(&spec2, v, &cfg)?)?;
        let g1 = (h - h1).abs();
        let g2 = (h - h2).abs();
        summary.max_gap_h1 = summary.max_gap_h1.max(g1);
        summary.max_gap_h2 = summary.max_gap_h2.max(g2);
        if g1 > cap1 {
            summary.violations_h1 += 1;
        }
        if g2 > cap2 {
            summary.violations_h2 += 1;
        }
    }
    Ok(summary)
}

fn finite_h(e: Energy) -> Result<f64> {
    e.finite()
        .ok_or_else(|| Error::NonFiniteEnergy("bounded interactions expected".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::stirling_normalized;

    #[test]
    fn chebyshev_grid_contains_endpoints_and_is_sorted() {
        let g = chebyshev_lobatto_grid(21);
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 0.0);
        assert!((g[20] - 1.0).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gamma_one_partition_is_exactly_zero() {
        let v = InteractionModel::strauss(1.0, 0.5).unwrap();
        let w = TorusWindow::new(2, 1.0, 16).unwrap();
        let est = estimate_log_partition_naive(
            &v,
            &HamiltonianSpec::Periodic,
            &w,
            1000,
            4,
            RngStream::new(1, 0),
        )
        .unwrap();
        assert_eq!(est.log_z.value, 0.0);
        assert_eq!(est.weight_mean, Some(1.0));
        // TI with identically-zero energies is exactly zero too.
        let ti = estimate_log_partition_ti(
            &v,
            &HamiltonianSpec::Periodic,
            &w,
            &chebyshev_lobatto_grid(5),
            &McmcConfig::new(5, 1, 20).unwrap(),
            RngStream::new(1, 1),
        )
        .unwrap();
        assert_eq!(ti.log_z.value, 0.0);
    }

    #[test]
    fn naive_rejects_all_zero_weights() {
        // A hard-core model so tight that every 32-point draw violates.
        let v = InteractionModel::hard_core(0.55).unwrap();
        let w = TorusWindow::new(2, 1.0, 32).unwrap();
        let res = estimate_log_partition_naive(
            &v,
            &HamiltonianSpec::Periodic,
            &w,
            200,
            4,
            RngStream::new(2, 0),
        );
        assert!(matches!(res, Err(Error::AllZeroWeights)));
    }

    #[test]
    fn tail_zero_hits_is_an_error() {
        let v = InteractionModel::strauss(1.0, 0.5).unwrap();
        let w = TorusWindow::new(2, 1.0, 32).unwrap();
        let res = estimate_tail_logprob(
            &v,
            &HamiltonianSpec::Periodic,
            &[ScoreModel::neighbor_count(0.5).unwrap()],
            &[-1.0], // impossible: the score is nonnegative
            TailDirection::Lt,
            &w,
            &TailSampler::Direct { samples: 500 },
            RngStream::new(3, 0),
        );
        assert!(matches!(res, Err(Error::ZeroHits)));
    }

    #[test]
    fn tail_region_monotone_under_enlargement() {
        // On fixed samples, enlarging the region never lowers the frequency;
        // with a shared stream the threshold sweep must be monotone.
        let v = InteractionModel::strauss(1.0, 0.5).unwrap();
        let w = TorusWindow::new(2, 1.0, 64).unwrap();
        let score = ScoreModel::neighbor_count(0.5).unwrap();
        let mut last = f64::NEG_INFINITY;
        for a in [0.5, 0.8, 1.2, 2.0] {
            let est = estimate_tail_logprob(
                &v,
                &HamiltonianSpec::Periodic,
                &[score],
                &[a],
                TailDirection::Le,
                &w,
                &TailSampler::Direct { samples: 2000 },
                RngStream::new(4, 0),
            )
            .unwrap();
            assert!(est.value >= last);
            last = est.value;
        }
    }

    #[test]
    fn stirling_profile_matches_direct_formula() {
        let v = InteractionModel::strauss(1.0, 0.5).unwrap();
        let profile = convergence_profile(
            &ProfileTask::Stirling,
            &v,
            &HamiltonianSpec::Periodic,
            1.0,
            2,
            &[10, 100, 1000],
            RngStream::new(5, 0),
        )
        .unwrap();
        for (n, est) in &profile.rungs {
            assert_eq!(est.value, stirling_normalized(*n as u64, 1.0));
        }
    }

    #[test]
    fn replica_merge_is_stream_permutation_invariant() {
        let a = merge_replica_means(vec![0.3, 0.1, 0.2, 0.7]);
        let b = merge_replica_means(vec![0.7, 0.2, 0.1, 0.3]);
        assert_eq!(a, b);
    }
}
