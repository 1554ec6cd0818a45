//! Score functions ξ, their per-point averages `Ξ_n(ω) = (1/n) Σ_x ξ(ω^{(n)}-x)`,
//! the pair count `S_r^{(n)}`, and evaluation of the individual empirical
//! field `R°_{n,ω}(g) = (1/|W_n|) Σ_x g(ω^{(n)}-x)`.

use crate::errors::Error;
use crate::hamiltonian::assemble_periodic_view;
use crate::torus::{CellIndex, Configuration, LocalView};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScoreKind {
    /// ξ(η) = #{neighbors within r}; Ξ_n = 2·S_r^{(n)}/n.
    NeighborCount,
    /// ξ(η) = #{(k-1)-subsets of the neighbors forming a k-clique with the
    /// origin, all pairwise within r}.
    CliqueCount { k: usize },
    /// ξ(η) = 1[some neighbor within r]; bounded by 1.
    PairIndicator,
    /// ξ ≡ 1.
    Constant,
}

/// A score function with locality radius and the same metadata surface as
/// the interaction models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreModel {
    kind: ScoreKind,
    radius: f64,
    truncation: Option<f64>,
}

impl ScoreModel {
    pub fn neighbor_count(r: f64) -> Result<Self> {
        Self::with_kind(ScoreKind::NeighborCount, r)
    }

    pub fn clique_count(k: usize, r: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::ConstraintViolated(format!(
                "clique score needs k >= 2, got {k}"
            )));
        }
        Self::with_kind(ScoreKind::CliqueCount { k }, r)
    }

    pub fn pair_indicator(r: f64) -> Result<Self> {
        Self::with_kind(ScoreKind::PairIndicator, r)
    }

    pub fn constant(r: f64) -> Result<Self> {
        Self::with_kind(ScoreKind::Constant, r)
    }

    fn with_kind(kind: ScoreKind, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::ConstraintViolated(format!(
                "score locality radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            kind,
            radius,
            truncation: None,
        })
    }

    /// Replace ξ by `min(ξ, cap)`.
    pub fn truncated(mut self, cap: f64) -> Result<Self> {
        if !(cap >= 0.0) {
            return Err(Error::ConstraintViolated(format!(
                "truncation cap must be >= 0, got {cap}"
            )));
        }
        self.truncation = Some(cap);
        Ok(self)
    }

    pub fn kind(&self) -> &ScoreKind {
        &self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn bounded_by(&self) -> Option<f64> {
        let base: Option<f64> = match self.kind {
            ScoreKind::NeighborCount | ScoreKind::CliqueCount { .. } => None,
            ScoreKind::PairIndicator | ScoreKind::Constant => Some(1.0),
        };
        match (base, self.truncation) {
            (Some(b), Some(t)) => Some(b.min(t)),
            (Some(b), None) => Some(b),
            (None, t) => t,
        }
    }

    pub fn is_increasing(&self) -> bool {
        // Constant is weakly increasing; the others genuinely are.
        true
    }

    /// `M_b`: bound on configurations of at most `b` points (origin counted).
    pub fn cardinality_bound(&self, b: usize) -> f64 {
        let base = match self.kind {
            ScoreKind::NeighborCount => (b.saturating_sub(1)) as f64,
            ScoreKind::CliqueCount { k } => binomial(b.saturating_sub(1), k - 1),
            ScoreKind::PairIndicator | ScoreKind::Constant => 1.0,
        };
        match self.truncation {
            Some(t) => base.min(t),
            None => base,
        }
    }

    pub fn eval(&self, view: &LocalView) -> f64 {
        let raw = match self.kind {
            ScoreKind::NeighborCount => view.count_within(self.radius) as f64,
            ScoreKind::CliqueCount { k } => clique_count(view, self.radius, k),
            ScoreKind::PairIndicator => {
                if view.count_within(self.radius) >= 1 {
                    1.0
                } else {
                    0.0
                }
            }
            ScoreKind::Constant => 1.0,
        };
        match self.truncation {
            Some(t) => raw.min(t),
            None => raw,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn clique_count(view: &LocalView, r: f64, k: usize) -> f64 {
    let ids: Vec<usize> = (0..view.neighbor_count())
        .filter(|&i| view.dist_to_origin(i) <= r)
        .collect();
    let m = k - 1;
    if ids.len() < m {
        return 0.0;
    }
    let mut count = 0.0;
    let mut subset = vec![0usize; m];
    fn recurse(
        ids: &[usize],
        start: usize,
        depth: usize,
        subset: &mut Vec<usize>,
        view: &LocalView,
        r: f64,
        count: &mut f64,
    ) {
        let m = subset.len();
        if depth == m {
            let ok =
                (0..m).all(|a| ((a + 1)..m).all(|b| view.dist_between(subset[a], subset[b]) <= r));
            if ok {
                *count += 1.0;
            }
            return;
        }
        for pos in start..ids.len() {
            subset[depth] = ids[pos];
            recurse(ids, pos + 1, depth + 1, subset, view, r, count);
        }
    }
    recurse(&ids, 0, 0, &mut subset, view, r, &mut count);
    count
}

/// Number of unordered pairs of configuration points at torus distance ≤ r.
pub fn pair_count_sr(omega: &Configuration, r: f64) -> Result<u64> {
    let w = omega.window();
    if 2.0 * r >= w.side() {
        return Err(Error::RadiusTooLarge {
            radius: r,
            side: w.side(),
        });
    }
    if omega.len() < 2 {
        return Ok(0);
    }
    let index = if omega.len() >= 64 {
        Some(CellIndex::build(omega, r)?)
    } else {
        None
    };
    let mut twice = 0u64;
    for i in 0..omega.len() {
        let ids = match &index {
            Some(idx) => idx.ball_ids(omega, omega.point(i), r),
            None => omega.ball_ids_brute(omega.point(i), r),
        };
        twice += ids.iter().filter(|&&j| j != i).count() as u64;
    }
    debug_assert_eq!(twice % 2, 0);
    Ok(twice / 2)
}

/// Score averages `Ξ_{j,n}(ω) = (1/n) Σ_x ξ_j(ω^{(n)}-x)`, one entry per
/// score, evaluated in a single pass that shares the neighbor query across
/// all scores (the query radius is the maximum of the score radii).
///
/// Requires `|ω| = n`, the window's point budget.
pub fn score_average(scores: &[ScoreModel], omega: &Configuration) -> Result<Vec<f64>> {
    let w = omega.window();
    let n = w.point_budget();
    if omega.len() != n {
        return Err(Error::WrongPointCount {
            expected: n,
            got: omega.len(),
        });
    }
    if scores.is_empty() {
        return Ok(Vec::new());
    }
    let max_r = scores.iter().map(|s| s.radius()).fold(0.0, f64::max);
    if 2.0 * max_r >= w.side() {
        return Err(Error::RadiusTooLarge {
            radius: max_r,
            side: w.side(),
        });
    }
    let index = if omega.len() >= 64 {
        Some(CellIndex::build(omega, max_r)?)
    } else {
        None
    };
    let mut sums = vec![0.0; scores.len()];
    for i in 0..omega.len() {
        let ids = match &index {
            Some(idx) => idx.ball_ids(omega, omega.point(i), max_r),
            None => omega.ball_ids_brute(omega.point(i), max_r),
        };
        let view = assemble_periodic_view(omega, i, &ids);
        for (j, s) in scores.iter().enumerate() {
            sums[j] += s.eval(&view);
        }
    }
    for v in sums.iter_mut() {
        *v /= n as f64;
    }
    Ok(sums)
}

/// The individual empirical field applied to a bounded local test function:
/// `R°_{n,ω}(g) = (1/|W_n|) Σ_x g(ω^{(n)}-x)`. For `g = 1` this is
/// `λ·|ω|/n`, and for a score ξ it equals `λ·Ξ_n(ω)` when `|ω| = n`.
pub fn empirical_field_apply<F>(omega: &Configuration, radius: f64, g: F) -> Result<f64>
where
    F: Fn(&LocalView) -> f64,
{
    let w = omega.window();
    if 2.0 * radius >= w.side() {
        return Err(Error::RadiusTooLarge {
            radius,
            side: w.side(),
        });
    }
    let index = if omega.len() >= 64 {
        Some(CellIndex::build(omega, radius)?)
    } else {
        None
    };
    let mut sum = 0.0;
    for i in 0..omega.len() {
        let ids = match &index {
            Some(idx) => idx.ball_ids(omega, omega.point(i), radius),
            None => omega.ball_ids_brute(omega.point(i), radius),
        };
        let view = assemble_periodic_view(omega, i, &ids);
        sum += g(&view);
    }
    Ok(sum / w.volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::sampling::sample_binomial;
    use crate::torus::{torus_distance, TorusWindow};

    #[test]
    fn pair_count_trivial_cases() {
        let w = TorusWindow::new(2, 1.0, 100).unwrap();
        let single = Configuration::new(w, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(pair_count_sr(&single, 0.5).unwrap(), 0);
        // Equilateral triple, side 0.2.
        let h = 0.2 * 3.0f64.sqrt() / 2.0;
        let triple = Configuration::new(
            w,
            &[vec![0.0, 0.0], vec![0.2, 0.0], vec![0.1, h]],
        )
        .unwrap();
        assert_eq!(pair_count_sr(&triple, 0.25).unwrap(), 3);
    }

    #[test]
    fn pair_count_matches_brute_force() {
        let w = TorusWindow::new(2, 0.5, 50).unwrap(); // side 10
        for s in 0..25u64 {
            let mut rng = RngStream::new(3, s).rng();
            let cfg = sample_binomial(&w, &mut rng);
            let mut brute = 0u64;
            for i in 0..cfg.len() {
                for j in (i + 1)..cfg.len() {
                    if torus_distance(cfg.point(i), cfg.point(j), &w).unwrap() <= 0.5 {
                        brute += 1;
                    }
                }
            }
            assert_eq!(pair_count_sr(&cfg, 0.5).unwrap(), brute);
        }
    }

    #[test]
    fn constant_score_averages_to_one() {
        let w = TorusWindow::new(2, 1.0, 36).unwrap();
        let mut rng = RngStream::new(8, 0).rng();
        let cfg = sample_binomial(&w, &mut rng);
        let avg = score_average(&[ScoreModel::constant(0.5).unwrap()], &cfg).unwrap();
        assert_eq!(avg, vec![1.0]);
    }

    #[test]
    fn neighbor_count_average_on_isolated_pairs() {
        // n/2 isolated pairs, each within r: every point has exactly one
        // neighbor, so the average is 1.
        let n = 16;
        let w = TorusWindow::new(2, 0.25, n).unwrap(); // side 8
        let mut pts = Vec::new();
        for i in 0..(n / 2) {
            let x = -3.5 + (i % 4) as f64 * 2.0;
            let y = -3.5 + (i / 4) as f64 * 2.0;
            pts.push(vec![x, y]);
            pts.push(vec![x + 0.2, y]);
        }
        let cfg = Configuration::new(w, &pts).unwrap();
        let avg = score_average(&[ScoreModel::neighbor_count(0.5).unwrap()], &cfg).unwrap();
        assert!((avg[0] - 1.0).abs() < 1e-12);
        // And the 2 S_r / n identity.
        let s = pair_count_sr(&cfg, 0.5).unwrap() as f64;
        assert!((avg[0] - 2.0 * s / n as f64).abs() < 1e-12);
    }

    #[test]
    fn neighbor_count_average_is_two_s_over_n() {
        let w = TorusWindow::new(2, 1.0, 100).unwrap();
        for s in 0..10u64 {
            let mut rng = RngStream::new(12, s).rng();
            let cfg = sample_binomial(&w, &mut rng);
            let avg = score_average(&[ScoreModel::neighbor_count(0.7).unwrap()], &cfg).unwrap();
            let pairs = pair_count_sr(&cfg, 0.7).unwrap() as f64;
            assert!((avg[0] - 2.0 * pairs / 100.0).abs() < 1e-12);
        }
    }

    #[test]
    fn score_average_requires_the_point_budget() {
        let w = TorusWindow::new(2, 1.0, 10).unwrap();
        let cfg = Configuration::new(w, &[vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            score_average(&[ScoreModel::constant(0.5).unwrap()], &cfg),
            Err(Error::WrongPointCount { expected: 10, got: 1 })
        ));
    }

    #[test]
    fn empirical_field_of_one_is_lambda() {
        let lambda = 1.75;
        let w = TorusWindow::new(2, lambda, 49).unwrap();
        let mut rng = RngStream::new(9, 1).rng();
        let cfg = sample_binomial(&w, &mut rng);
        let val = empirical_field_apply(&cfg, 0.5, |_| 1.0).unwrap();
        assert!((val - lambda).abs() < 1e-12 * lambda.max(1.0));
    }

    #[test]
    fn empirical_field_of_score_is_lambda_times_average() {
        let lambda = 0.8;
        let w = TorusWindow::new(2, lambda, 64).unwrap();
        let mut rng = RngStream::new(10, 2).rng();
        let cfg = sample_binomial(&w, &mut rng);
        let score = ScoreModel::neighbor_count(0.6).unwrap();
        let avg = score_average(&[score], &cfg).unwrap()[0];
        let field = empirical_field_apply(&cfg, 0.6, |v| score.eval(v)).unwrap();
        assert!((field - lambda * avg).abs() < 1e-10);
    }

    #[test]
    fn pair_indicator_field_vanishes_on_isolated_points() {
        let w = TorusWindow::new(2, 1.0, 16).unwrap(); // side 4
        let pts: Vec<Vec<f64>> = (0..16)
            .map(|i| vec![-1.5 + (i % 4) as f64, -1.5 + (i / 4) as f64])
            .collect();
        let cfg = Configuration::new(w, &pts).unwrap();
        let field = empirical_field_apply(&cfg, 0.3, |v| {
            if v.count_within(0.3) >= 1 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(field, 0.0);
    }

    #[test]
    fn increasing_scores_grow_under_insertion() {
        let w = TorusWindow::new(2, 1.0, 64).unwrap();
        let scores = [
            ScoreModel::neighbor_count(0.5).unwrap(),
            ScoreModel::clique_count(3, 0.5).unwrap(),
            ScoreModel::pair_indicator(0.5).unwrap(),
        ];
        for s in 0..20u64 {
            let mut rng = RngStream::new(77, s).rng();
            let cfg = sample_binomial(&w, &mut rng);
            let mut pts: Vec<Vec<f64>> = cfg.points().map(|p| p.to_vec()).collect();
            let mut extra = vec![0.0, 0.0];
            crate::sampling::sample_uniform_point(&w, &mut rng, &mut extra);
            pts.push(extra);
            let bigger = Configuration::new(w, &pts).unwrap();
            // Per-point sums (not averages) must not decrease.
            for sc in &scores {
                let before: f64 = (0..cfg.len())
                    .map(|i| sc.eval(&crate::hamiltonian::periodic_view(&cfg, i, sc.radius()).unwrap()))
                    .sum();
                let after: f64 = (0..cfg.len())
                    .map(|i| sc.eval(&crate::hamiltonian::periodic_view(&bigger, i, sc.radius()).unwrap()))
                    .sum();
                assert!(after >= before - 1e-12);
            }
        }
    }
}
