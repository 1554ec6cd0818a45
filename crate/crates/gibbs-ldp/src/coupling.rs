//! Coupling constructions.
//!
//! * Resample coupling: from a base binomial configuration `X_1..X_n`,
//!   uniform marks `U_i` and fresh uniform replacements `X''_i` build the
//!   partner `X'_i = X_i` if `U_i ≥ ε`, else `X''_i`. Both marginals are
//!   binomial point processes.
//! * Thin-sprinkle coupling: delete points of a Poisson base whose mark is
//!   below δ and superpose an independent Poisson sprinkle of intensity δλ;
//!   the combined process is again Poisson with intensity λ.
//!
//! The couplings retain their marks and replacements so the rare events the
//! bounds are conditioned on can be decided after the fact, without
//! re-simulation.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::Distribution;

use crate::diagnostics::{count_b_dense, sparse_cubes, RConstants, SparseCubeSet};
use crate::errors::Error;
use crate::sampling::{sample_poisson, sample_uniform_count, sample_uniform_point};
use crate::torus::{Configuration, TorusWindow};
use crate::Result;

/// Base configuration with uniform marks, fresh replacements, and the
/// resampling level ε. The partner is derived, never stored.
#[derive(Clone, Debug)]
pub struct ResampleCoupling {
    base: Configuration,
    marks: Vec<f64>,
    replacements: Vec<f64>,
    epsilon: f64,
}

impl ResampleCoupling {
    pub fn base(&self) -> &Configuration {
        &self.base
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mark(&self, i: usize) -> f64 {
        self.marks[i]
    }

    /// Was point `i` resampled (`U_i < ε`)?
    pub fn replaced(&self, i: usize) -> bool {
        self.marks[i] < self.epsilon
    }

    pub fn replacement(&self, i: usize) -> &[f64] {
        let d = self.base.window().dim();
        &self.replacements[i * d..(i + 1) * d]
    }

    /// Position of point `i` in the partner configuration.
    pub fn partner_point(&self, i: usize) -> &[f64] {
        if self.replaced(i) {
            self.replacement(i)
        } else {
            self.base.point(i)
        }
    }

    /// The partner configuration `B_{n,ε}`, index-aligned with the base.
    pub fn partner(&self) -> Configuration {
        let d = self.base.window().dim();
        let mut coords = Vec::with_capacity(self.base.len() * d);
        for i in 0..self.base.len() {
            coords.extend_from_slice(self.partner_point(i));
        }
        Configuration::from_flat_unchecked(*self.base.window(), coords)
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

/// Draw marks and replacements for `base`, independent of everything else.
/// `ε = 0` makes the partner the base; `ε = 1` makes it the replacements.
pub fn build_resample_coupling<R: Rng + ?Sized>(
    base: Configuration,
    epsilon: f64,
    rng: &mut R,
) -> Result<ResampleCoupling> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::ConstraintViolated(format!(
            "resampling level must lie in [0, 1], got {epsilon}"
        )));
    }
    let n = base.len();
    let w = *base.window();
    let marks: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let replacements = sample_uniform_count(&w, n, rng);
    Ok(ResampleCoupling {
        base,
        marks,
        replacements: replacements.coords().to_vec(),
        epsilon,
    })
}

/// Diagnostics for the move event: which clause failed, and the dense ids
/// the event is about.
#[derive(Clone, Debug)]
pub struct MoveEventReport {
    /// The event holds (all three clauses).
    pub holds: bool,
    /// (i) every non-dense point kept its position (`U_i ≥ ε`).
    pub sparse_points_kept: bool,
    /// (ii) every dense point's partner position lies in a sparse-cube
    /// receptacle `Q_r(z)`, `z ∈ S_n(base)`.
    pub dense_moved_to_receptacles: bool,
    /// (iii) no receptacle holds two moved points.
    pub at_most_one_per_receptacle: bool,
    pub dense_ids: Vec<usize>,
    pub s_n: usize,
}

impl MoveEventReport {
    pub fn failure_summary(&self) -> String {
        let mut parts = Vec::new();
        if !self.sparse_points_kept {
            parts.push("a non-dense point was resampled");
        }
        if !self.dense_moved_to_receptacles {
            parts.push("a dense point's partner is outside the sparse receptacles");
        }
        if !self.at_most_one_per_receptacle {
            parts.push("two moved points share a receptacle");
        }
        if parts.is_empty() {
            "event holds".to_string()
        } else {
            parts.join("; ")
        }
    }
}

/// Decide the move event for a resample coupling: non-dense points kept,
/// `b`-dense points (radius `consts.r`) moved into distinct sparse-cube
/// receptacles. Requires `b > K_r` and `n ≥ n_r`.
pub fn detect_event_e_move(
    coupling: &ResampleCoupling,
    b: usize,
    consts: &RConstants,
) -> Result<MoveEventReport> {
    if b <= consts.k_r {
        return Err(Error::PreconditionViolated(format!(
            "dense threshold b = {b} must exceed K_r = {}",
            consts.k_r
        )));
    }
    let base = coupling.base();
    let dense = count_b_dense(base, consts.r, b)?;
    let cubes = sparse_cubes(base, consts)?;
    let mut report = MoveEventReport {
        holds: false,
        sparse_points_kept: true,
        dense_moved_to_receptacles: true,
        at_most_one_per_receptacle: true,
        dense_ids: dense.dense_ids.clone(),
        s_n: cubes.size(),
    };
    let dense_set: std::collections::HashSet<usize> = dense.dense_ids.iter().copied().collect();
    for i in 0..coupling.len() {
        if !dense_set.contains(&i) && coupling.replaced(i) {
            report.sparse_points_kept = false;
        }
    }
    let mut seen = std::collections::HashSet::new();
    for &i in &dense.dense_ids {
        match cubes.receptacle_of(coupling.partner_point(i)) {
            Some(key) => {
                if !seen.insert(key) {
                    report.at_most_one_per_receptacle = false;
                }
            }
            None => report.dense_moved_to_receptacles = false,
        }
    }
    report.holds = report.sparse_points_kept
        && report.dense_moved_to_receptacles
        && report.at_most_one_per_receptacle;
    Ok(report)
}

/// Exact draw from the conditional law of the coupling given the move event:
/// non-dense marks are uniform on `[ε, 1)`, dense marks uniform on `[0, ε)`,
/// and the dense replacements land uniformly in distinct sparse receptacles.
/// Errors with `DensityExceedsCubes` when the base has at least as many
/// dense points as sparse cubes.
pub fn resample_coupling_conditioned<R: Rng + ?Sized>(
    base: Configuration,
    epsilon: f64,
    b: usize,
    consts: &RConstants,
    rng: &mut R,
) -> Result<ResampleCoupling> {
    if !(0.0 < epsilon && epsilon < 1.0) {
        return Err(Error::ConstraintViolated(format!(
            "conditional construction needs ε in (0, 1), got {epsilon}"
        )));
    }
    if b <= consts.k_r {
        return Err(Error::PreconditionViolated(format!(
            "dense threshold b = {b} must exceed K_r = {}",
            consts.k_r
        )));
    }
    let dense = count_b_dense(&base, consts.r, b)?;
    let cubes: SparseCubeSet = sparse_cubes(&base, consts)?;
    if dense.count >= cubes.size() {
        return Err(Error::DensityExceedsCubes {
            dense: dense.count,
            cubes: cubes.size(),
        });
    }
    let w = *base.window();
    let n = base.len();
    let d = w.dim();
    let dense_set: std::collections::HashSet<usize> = dense.dense_ids.iter().copied().collect();
    let mut marks = Vec::with_capacity(n);
    for i in 0..n {
        let u = rng.random::<f64>();
        marks.push(if dense_set.contains(&i) {
            u * epsilon
        } else {
            epsilon + u * (1.0 - epsilon)
        });
    }
    // Replacements: unconditional for kept points (they are never looked at),
    // distinct uniformly-chosen receptacles for the dense ones.
    let mut replacements = sample_uniform_count(&w, n, rng).coords().to_vec();
    let mut keys = cubes.sparse_keys();
    keys.shuffle(rng);
    for (&i, key) in dense.dense_ids.iter().zip(keys.iter()) {
        let pos = cubes.sample_in_receptacle(key, rng);
        replacements[i * d..(i + 1) * d].copy_from_slice(&pos);
    }
    Ok(ResampleCoupling {
        base,
        marks,
        replacements,
        epsilon,
    })
}

/// Poisson base with marks, the deletion level δ, and an independent Poisson
/// sprinkle of intensity δλ. `combined = thin_δ(base) ∪ sprinkle` is Poisson
/// with intensity λ again.
#[derive(Clone, Debug)]
pub struct ThinSprinkleCoupling {
    base: Configuration,
    marks: Vec<f64>,
    delta: f64,
    sprinkle: Configuration,
}

impl ThinSprinkleCoupling {
    pub fn base(&self) -> &Configuration {
        &self.base
    }

    pub fn sprinkle(&self) -> &Configuration {
        &self.sprinkle
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mark(&self, i: usize) -> f64 {
        self.marks[i]
    }

    /// Was base point `i` deleted by the thinning (`U_i < δ`)?
    pub fn deleted(&self, i: usize) -> bool {
        self.marks[i] < self.delta
    }

    pub fn retained_count(&self) -> usize {
        (0..self.base.len()).filter(|&i| !self.deleted(i)).count()
    }

    /// The combined configuration: retained base points then the sprinkle.
    pub fn combined(&self) -> Configuration {
        let d = self.base.window().dim();
        let mut coords = Vec::with_capacity((self.retained_count() + self.sprinkle.len()) * d);
        for i in 0..self.base.len() {
            if !self.deleted(i) {
                coords.extend_from_slice(self.base.point(i));
            }
        }
        coords.extend_from_slice(self.sprinkle.coords());
        Configuration::from_flat_unchecked(*self.base.window(), coords)
    }
}

/// Draw the full coupling: Poisson(n) base, marks, Poisson(δn) sprinkle.
pub fn build_thin_sprinkle<R: Rng + ?Sized>(
    w: &TorusWindow,
    delta: f64,
    rng: &mut R,
) -> Result<ThinSprinkleCoupling> {
    let base = sample_poisson(w, rng);
    thin_sprinkle_with_base(base, delta, rng)
}

/// Same, with a fixed base: only marks and sprinkle are drawn. Useful for
/// conditional frequency checks on a pinned configuration.
pub fn thin_sprinkle_with_base<R: Rng + ?Sized>(
    base: Configuration,
    delta: f64,
    rng: &mut R,
) -> Result<ThinSprinkleCoupling> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::ConstraintViolated(format!(
            "thinning level must lie in [0, 1), got {delta}"
        )));
    }
    let w = *base.window();
    let marks: Vec<f64> = (0..base.len()).map(|_| rng.random::<f64>()).collect();
    let mean = delta * w.point_budget() as f64;
    let count = if mean > 0.0 {
        rand_distr::Poisson::new(mean)
            .expect("positive mean")
            .sample(rng) as usize
    } else {
        0
    };
    let mut coords = vec![0.0; count * w.dim()];
    for p in coords.chunks_exact_mut(w.dim()) {
        sample_uniform_point(&w, rng, p);
    }
    let sprinkle = Configuration::from_flat_unchecked(w, coords);
    Ok(ThinSprinkleCoupling {
        base,
        marks,
        delta,
        sprinkle,
    })
}

/// The deletion event for the hard-core coupling: every base point with at
/// least one periodic R-neighbor has mark below δ (it is deleted) and every
/// isolated point has mark at least δ (it survives). Its conditional
/// probability given the base is `δ^{N_n}·(1-δ)^{K_n-N_n}`.
pub fn detect_event_e_delete(coupling: &ThinSprinkleCoupling, hc_radius: f64) -> Result<bool> {
    let base = coupling.base();
    let report = crate::diagnostics::hc_violations(base, hc_radius)?;
    let violating: std::collections::HashSet<usize> = report.ids.iter().copied().collect();
    for i in 0..base.len() {
        let should_delete = violating.contains(&i);
        if should_delete != coupling.deleted(i) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::derive_r_constants;
    use crate::rng::RngStream;
    use crate::sampling::sample_binomial;

    fn base_config(n: usize, seed: u64) -> Configuration {
        let w = TorusWindow::new(2, 1.0, n).unwrap();
        let mut rng = RngStream::new(seed, 0).rng();
        sample_binomial(&w, &mut rng)
    }

    #[test]
    fn epsilon_zero_keeps_the_base_and_one_replaces_everything() {
        let base = base_config(32, 1);
        let mut rng = RngStream::new(2, 0).rng();
        let c0 = build_resample_coupling(base.clone(), 0.0, &mut rng).unwrap();
        assert_eq!(c0.partner().coords(), base.coords());
        let c1 = build_resample_coupling(base.clone(), 1.0, &mut rng).unwrap();
        assert_eq!(c1.partner().coords(), &c1.replacements[..]);
        assert_eq!(c1.partner().len(), base.len());
    }

    #[test]
    fn replaced_fraction_matches_epsilon() {
        let n = 200;
        let base = base_config(n, 3);
        let mut rng = RngStream::new(4, 0).rng();
        let mut replaced = 0usize;
        let reps = 500;
        for _ in 0..reps {
            let c = build_resample_coupling(base.clone(), 0.5, &mut rng).unwrap();
            replaced += (0..n).filter(|&i| c.replaced(i)).count();
        }
        let total = (n * reps) as f64;
        let freq = replaced as f64 / total;
        // Bin(n*reps, 1/2): 4σ band.
        assert!((freq - 0.5).abs() < 4.0 * 0.5 / total.sqrt());
    }

    #[test]
    fn move_event_trivial_cases() {
        // n = 64, r = 0.1: n_r = 4, K_r = 3; take b = 4.
        let consts = derive_r_constants(1.0, 2, 0.1);
        assert_eq!((consts.n_r, consts.k_r), (4, 3));
        let base = base_config(64, 5);
        // Zero dense points (b = 4 clusters are essentially impossible at
        // this seed) and all marks >= eps => event holds.
        let dense = count_b_dense(&base, 0.1, 4).unwrap();
        assert_eq!(dense.count, 0, "seed produced an unexpected cluster");
        let mut rng = RngStream::new(6, 0).rng();
        let c = resample_coupling_conditioned(base.clone(), 0.2, 4, &consts, &mut rng).unwrap();
        let report = detect_event_e_move(&c, 4, &consts).unwrap();
        assert!(report.holds, "{}", report.failure_summary());
        // Any sparse point with a low mark breaks clause (i).
        let mut broken = c.clone();
        broken.marks[0] = 0.0;
        let report = detect_event_e_move(&broken, 4, &consts).unwrap();
        assert!(!report.holds && !report.sparse_points_kept);
    }

    #[test]
    fn conditioned_coupling_always_satisfies_the_event() {
        let consts = derive_r_constants(1.0, 2, 0.1);
        let w = TorusWindow::new(2, 1.0, 64).unwrap();
        for s in 0..50u64 {
            let mut rng = RngStream::new(7, s).rng();
            // Base with a planted 4-cluster so dense points exist.
            let mut pts: Vec<Vec<f64>> = sample_binomial(&w, &mut rng)
                .points()
                .map(|p| p.to_vec())
                .collect();
            pts.truncate(60);
            for k in 0..4 {
                pts.push(vec![2.0 + 0.03 * k as f64, 2.0]);
            }
            let base = Configuration::new(w, &pts).unwrap();
            let c = resample_coupling_conditioned(base, 0.3, 4, &consts, &mut rng).unwrap();
            let report = detect_event_e_move(&c, 4, &consts).unwrap();
            assert!(report.holds, "seed {s}: {}", report.failure_summary());
            assert!(!report.dense_ids.is_empty());
            // Partner is dense-free on the event (b > K_r).
            let partner = c.partner();
            let partner_dense = count_b_dense(&partner, consts.r, 4).unwrap();
            assert_eq!(partner_dense.count, 0, "seed {s}");
        }
    }

    #[test]
    fn delete_event_matches_mark_pattern() {
        let w = TorusWindow::new(2, 1.0, 16).unwrap();
        // One R-pair plus isolated points.
        let pts = vec![
            vec![0.0, 0.0],
            vec![0.15, 0.0],
            vec![1.5, 1.5],
            vec![-1.5, 1.2],
        ];
        let base = Configuration::new(w, &pts).unwrap();
        let mut c = thin_sprinkle_with_base(base, 0.5, &mut RngStream::new(8, 0).rng()).unwrap();
        c.marks = vec![0.1, 0.2, 0.7, 0.9];
        assert!(detect_event_e_delete(&c, 0.2).unwrap());
        // A violating point that survives breaks the event.
        c.marks = vec![0.1, 0.8, 0.7, 0.9];
        assert!(!detect_event_e_delete(&c, 0.2).unwrap());
        // An isolated point that gets deleted breaks it too.
        c.marks = vec![0.1, 0.2, 0.3, 0.9];
        assert!(!detect_event_e_delete(&c, 0.2).unwrap());
    }

    #[test]
    fn thin_sprinkle_counts_are_consistent() {
        let w = TorusWindow::new(2, 1.0, 50).unwrap();
        let mut rng = RngStream::new(9, 0).rng();
        let c = build_thin_sprinkle(&w, 0.3, &mut rng).unwrap();
        assert_eq!(
            c.combined().len(),
            c.retained_count() + c.sprinkle().len()
        );
        // delta -> 0: nothing deleted, nothing sprinkled.
        let c0 = build_thin_sprinkle(&w, 0.0, &mut rng).unwrap();
        assert_eq!(c0.combined().len(), c0.base().len());
        assert_eq!(c0.retained_count(), c0.base().len());
    }
}
