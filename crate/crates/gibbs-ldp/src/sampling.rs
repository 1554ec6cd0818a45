//! Exact samplers for the binomial and Poisson point processes and a
//! canonical-ensemble Metropolis sampler for the Gibbs measure
//! `dP_n ∝ exp(-H_n) dB_n`.
//!
//! The Markov kernel is single-point uniform relocation: pick a uniform
//! index, propose a uniform new location, accept with `min(1, exp(-ΔH))`.
//! The number of points never changes, which is the whole point of the
//! canonical ensemble. One sweep is `n` proposals.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::energy::Energy;
use crate::errors::Error;
use crate::hamiltonian::{hamiltonian, HamiltonianSpec};
use crate::interaction::InteractionModel;
use crate::torus::{unit_ball_volume, CellIndex, Configuration, LocalView, TorusWindow};
use crate::Result;

/// Draw one uniform point of the window into `out`.
pub fn sample_uniform_point<R: Rng + ?Sized>(w: &TorusWindow, rng: &mut R, out: &mut [f64]) {
    for c in out.iter_mut().take(w.dim()) {
        *c = (rng.random::<f64>() - 0.5) * w.side();
    }
}

/// The binomial point process: exactly `n` i.i.d. uniform points in `W_n`.
pub fn sample_binomial<R: Rng + ?Sized>(w: &TorusWindow, rng: &mut R) -> Configuration {
    sample_uniform_count(w, w.point_budget(), rng)
}

/// `count` i.i.d. uniform points in the window.
pub fn sample_uniform_count<R: Rng + ?Sized>(
    w: &TorusWindow,
    count: usize,
    rng: &mut R,
) -> Configuration {
    let d = w.dim();
    let mut coords = vec![0.0; count * d];
    for p in coords.chunks_exact_mut(d) {
        sample_uniform_point(w, rng, p);
    }
    Configuration::from_flat_unchecked(*w, coords)
}

/// The Poisson point process with intensity λ in `W_n`: the count is
/// `Poisson(λ|W_n|) = Poisson(n)`, points uniform given the count.
pub fn sample_poisson<R: Rng + ?Sized>(w: &TorusWindow, rng: &mut R) -> Configuration {
    let mean = w.point_budget() as f64;
    let count = Poisson::new(mean)
        .expect("point budget is positive")
        .sample(rng) as usize;
    sample_uniform_count(w, count, rng)
}

/// Burn-in, thinning and retention lengths for [`mcmc_canonical`]. The
/// defaults (200 sweeps of burn-in, 10 sweeps between retained samples) are
/// heuristics tuned on the analytic two-point checks; the chain's mixing is
/// monitored, not certified.
#[derive(Clone, Copy, Debug)]
pub struct McmcConfig {
    pub burn_in_sweeps: usize,
    pub thinning_sweeps: usize,
    pub samples: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            burn_in_sweeps: 200,
            thinning_sweeps: 10,
            samples: 100,
        }
    }
}

impl McmcConfig {
    pub fn new(burn_in_sweeps: usize, thinning_sweeps: usize, samples: usize) -> Result<Self> {
        if burn_in_sweeps == 0 || thinning_sweeps == 0 {
            return Err(Error::ConstraintViolated(
                "burn-in and thinning must be at least one sweep".into(),
            ));
        }
        Ok(Self {
            burn_in_sweeps,
            thinning_sweeps,
            samples,
        })
    }
}

/// Sequential dart throwing for a hard-core-feasible start: up to `100·n`
/// uniform proposals, then a deterministic lattice fallback with spacing
/// greater than `R`.
pub fn hard_core_feasible_start<R: Rng + ?Sized>(
    w: &TorusWindow,
    hc_radius: f64,
    rng: &mut R,
) -> Result<Configuration> {
    let n = w.point_budget();
    let d = w.dim();
    let mut coords: Vec<f64> = Vec::with_capacity(n * d);
    let mut placed = 0usize;
    let mut proposal = vec![0.0; d];
    let budget = 100 * n;
    let mut used = 0usize;
    while placed < n && used < budget {
        used += 1;
        sample_uniform_point(w, rng, &mut proposal);
        let ok = coords.chunks_exact(d).all(|q| {
            let mut acc = 0.0;
            for k in 0..d {
                let delta = w.wrapped_delta(proposal[k], q[k]);
                acc += delta * delta;
            }
            acc.sqrt() > hc_radius
        });
        if ok {
            coords.extend_from_slice(&proposal);
            placed += 1;
        }
    }
    if placed == n {
        return Ok(Configuration::from_flat_unchecked(*w, coords));
    }
    // Lattice fallback: m sites per axis, spacing w/m > R.
    let m = (n as f64).powf(1.0 / d as f64).ceil() as usize;
    let spacing = w.side() / m as f64;
    if spacing <= hc_radius || m.pow(d as u32) < n {
        return Err(Error::InfeasibleStart { attempts: budget });
    }
    let mut coords = Vec::with_capacity(n * d);
    'outer: for cell in 0..m.pow(d as u32) {
        let mut c = cell;
        for _ in 0..d {
            let idx = c % m;
            c /= m;
            coords.push(-w.half_side() + (idx as f64 + 0.5) * spacing);
        }
        if coords.len() == n * d {
            break 'outer;
        }
    }
    Ok(Configuration::from_flat_unchecked(*w, coords))
}

/// A canonical-ensemble Metropolis chain. The chain owns its state; clones
/// of snapshots are immutable and safe to share.
pub struct CanonicalChain {
    v: InteractionModel,
    spec: HamiltonianSpec,
    window: TorusWindow,
    beta: f64,
    coords: Vec<f64>,
    index: Option<CellIndex>,
    /// Running base energy (shift excluded), kept in sync with accepted
    /// moves and refreshed periodically against float drift.
    energy: f64,
    sweeps_since_refresh: usize,
    proposals: u64,
    accepted: u64,
    scratch: Scratch,
}

/// Reusable buffers for the proposal hot path.
#[derive(Default)]
struct Scratch {
    ids: Vec<usize>,
    affected: Vec<usize>,
    before: Option<LocalView>,
    after: Option<LocalView>,
}

impl CanonicalChain {
    /// Start from an automatically generated feasible state: i.i.d. uniform
    /// for finite interactions, dart throwing then lattice for hard-core.
    ///
    /// Hard-core models additionally require the intensity assumption
    /// `λ·v_d·R^d < 1`.
    pub fn new<R: Rng + ?Sized>(
        v: &InteractionModel,
        spec: &HamiltonianSpec,
        w: &TorusWindow,
        rng: &mut R,
    ) -> Result<Self> {
        spec.validate_model(v)?;
        if v.is_hard_core() {
            check_hard_core_intensity(w, v.radius())?;
        }
        if 2.0 * v.radius() >= w.side() {
            return Err(Error::RadiusTooLarge {
                radius: v.radius(),
                side: w.side(),
            });
        }
        let init = if v.is_hard_core() {
            hard_core_feasible_start(w, v.radius(), rng)?
        } else {
            sample_binomial(w, rng)
        };
        Self::from_configuration(v, spec, init)
    }

    /// Start from a given configuration, which must have finite energy.
    pub fn from_configuration(
        v: &InteractionModel,
        spec: &HamiltonianSpec,
        init: Configuration,
    ) -> Result<Self> {
        spec.validate_model(v)?;
        let w = *init.window();
        let h = hamiltonian(spec, v, &init)?;
        let Some(h) = h.finite() else {
            if v.is_hard_core() {
                return Err(Error::InfeasibleStart { attempts: 0 });
            }
            return Err(Error::NonFiniteEnergy(
                "initial configuration has infinite energy".into(),
            ));
        };
        let index = if spec.is_periodic() && init.len() >= 64 {
            Some(CellIndex::build(&init, v.radius())?)
        } else {
            None
        };
        Ok(Self {
            v: *v,
            spec: spec.clone(),
            window: w,
            beta: 1.0,
            coords: init.coords().to_vec(),
            index,
            energy: h - init.len() as f64 * v.shift(),
            sweeps_since_refresh: 0,
            proposals: 0,
            accepted: 0,
            scratch: Scratch::default(),
        })
    }

    /// Scale the energy by an inverse temperature (used by thermodynamic
    /// integration). Finite interactions only.
    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if self.v.is_hard_core() && beta != 1.0 {
            return Err(Error::NonFiniteEnergy(
                "inverse-temperature scaling is undefined for hard-core energies".into(),
            ));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::ConstraintViolated(format!(
                "inverse temperature must lie in [0, 1], got {beta}"
            )));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.window.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn point(&self, i: usize) -> &[f64] {
        let d = self.window.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    /// Current state as an immutable configuration.
    pub fn snapshot(&self) -> Configuration {
        Configuration::from_flat_unchecked(self.window, self.coords.clone())
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    /// Current total energy under the spec (shift included).
    pub fn current_energy(&self) -> f64 {
        self.energy + self.len() as f64 * self.v.shift()
    }

    fn recompute_energy(&mut self) {
        let cfg = self.snapshot();
        let h = hamiltonian(&self.spec, &self.v, &cfg)
            .expect("chain state is valid")
            .finite()
            .expect("chain state has finite energy");
        self.energy = h - self.len() as f64 * self.v.shift();
    }

    /// Collect ids within the interaction radius of `center` into `out`.
    fn gather_neighbor_ids(&self, center: &[f64], out: &mut Vec<usize>) {
        out.clear();
        let r = self.v.radius();
        let d = self.window.dim();
        match &self.index {
            Some(idx) => {
                idx.for_each_in_ball(&self.coords, &self.window, center, r, |j| out.push(j))
            }
            None => {
                for (j, q) in self.coords.chunks_exact(d).enumerate() {
                    if self.window.distance(center, q) <= r {
                        out.push(j);
                    }
                }
            }
        }
    }

    /// Per-point energy of point `j` under a boundary convention, with point
    /// `moved` relocated to `new_pos` (or the current state for `None`).
    fn local_energy(&self, j: usize, moved: Option<(usize, &[f64])>) -> Energy {
        let d = self.window.dim();
        let r = self.v.radius();
        let xj: &[f64] = match moved {
            Some((m, new_pos)) if m == j => new_pos,
            _ => self.point(j),
        };
        match &self.spec {
            HamiltonianSpec::Periodic => {
                unreachable!("periodic moves go through periodic_delta")
            }
            HamiltonianSpec::BoundaryOne(bc) | HamiltonianSpec::BoundaryTwo(bc) => {
                let mut view = LocalView::new(d, true, None);
                let mut rel = vec![0.0; d];
                for (cand, q) in self.coords.chunks_exact(d).enumerate() {
                    if cand == j {
                        continue;
                    }
                    let q: &[f64] = match moved {
                        Some((m, new_pos)) if m == cand => new_pos,
                        _ => q,
                    };
                    if euclid(xj, q) <= r {
                        for k in 0..d {
                            rel[k] = q[k] - xj[k];
                        }
                        view.push(&rel);
                    }
                }
                for q in bc.points() {
                    if euclid(xj, q) <= r {
                        for k in 0..d {
                            rel[k] = q[k] - xj[k];
                        }
                        view.push(&rel);
                    }
                }
                let mut e = self.v.eval_base(&view);
                if matches!(self.spec, HamiltonianSpec::BoundaryTwo(_)) {
                    let mut cross = LocalView::new(d, false, None);
                    for q in bc.points() {
                        if euclid(xj, q) <= r {
                            for k in 0..d {
                                rel[k] = q[k] - xj[k];
                            }
                            cross.push(&rel);
                        }
                    }
                    e += self.v.eval_base(&cross);
                }
                e
            }
        }
    }

    /// Energy change of relocating `point_id` to `new_pos` under the
    /// periodic convention. One neighbor query per affected point; the
    /// before/after views are built from the same candidate list.
    fn periodic_delta(&mut self, point_id: usize, new_pos: &[f64]) -> Energy {
        let d = self.window.dim();
        let r = self.v.radius();
        let mut before = self.scratch.before.take().unwrap_or_else(|| LocalView::new(d, true, None));
        let mut after = self.scratch.after.take().unwrap_or_else(|| LocalView::new(d, true, None));
        let mut ids = std::mem::take(&mut self.scratch.ids);
        let mut affected = std::mem::take(&mut self.scratch.affected);
        let wrap = Some(self.window.side());
        let mut rel = [0.0f64; 8];
        let rel = &mut rel[..d];
        let old_pos = self.point(point_id).to_vec();

        let result = 'done: {
            // Focal point: view after the move (around new_pos, without i).
            after.reset(d, true, wrap);
            self.gather_neighbor_ids(new_pos, &mut ids);
            affected.clear();
            for &j in ids.iter() {
                if j == point_id {
                    continue;
                }
                affected.push(j);
                let q = self.point(j);
                for k in 0..d {
                    rel[k] = self.window.wrapped_delta(q[k], new_pos[k]);
                }
                after.push(rel);
            }
            let e_after_focal = self.v.eval_base(&after);
            if !e_after_focal.is_finite() {
                break 'done Energy::Infinite;
            }
            // Focal point: view before the move.
            before.reset(d, true, wrap);
            self.gather_neighbor_ids(&old_pos, &mut ids);
            for &j in ids.iter() {
                if j == point_id {
                    continue;
                }
                affected.push(j);
                let q = self.point(j);
                for k in 0..d {
                    rel[k] = self.window.wrapped_delta(q[k], old_pos[k]);
                }
                before.push(rel);
            }
            let e_before_focal = self
                .v
                .eval_base(&before)
                .finite()
                .expect("chain state has finite energy");
            let mut delta = e_after_focal.finite().unwrap() - e_before_focal;

            affected.sort_unstable();
            affected.dedup();
            for &j in affected.iter() {
                let xj = self.point(j).to_vec();
                self.gather_neighbor_ids(&xj, &mut ids);
                before.reset(d, true, wrap);
                after.reset(d, true, wrap);
                for &cand in ids.iter() {
                    if cand == j {
                        continue;
                    }
                    let q = self.point(cand);
                    for k in 0..d {
                        rel[k] = self.window.wrapped_delta(q[k], xj[k]);
                    }
                    before.push(rel);
                    if cand != point_id {
                        after.push(rel);
                    }
                }
                if self.window.distance(&xj, new_pos) <= r {
                    for k in 0..d {
                        rel[k] = self.window.wrapped_delta(new_pos[k], xj[k]);
                    }
                    after.push(rel);
                }
                let e_before = self
                    .v
                    .eval_base(&before)
                    .finite()
                    .expect("chain state has finite energy");
                match self.v.eval_base(&after) {
                    Energy::Finite(e_after) => delta += e_after - e_before,
                    Energy::Infinite => break 'done Energy::Infinite,
                }
            }
            Energy::Finite(delta)
        };
        self.scratch.ids = ids;
        self.scratch.affected = affected;
        self.scratch.before = Some(before);
        self.scratch.after = Some(after);
        result
    }

    /// Same for the boundary conventions (Euclidean neighborhoods plus the
    /// boundary configuration); plain O(n) scans, used at modest sizes.
    fn boundary_delta(&self, point_id: usize, new_pos: &[f64]) -> Energy {
        let r = self.v.radius();
        let old_pos = self.point(point_id).to_vec();
        let mut affected: Vec<usize> = (0..self.len())
            .filter(|&j| {
                j != point_id
                    && (euclid(self.point(j), &old_pos) <= r || euclid(self.point(j), new_pos) <= r)
            })
            .collect();
        affected.push(point_id);
        affected.sort_unstable();
        let mut delta = 0.0f64;
        for &j in &affected {
            let before = self
                .local_energy(j, None)
                .finite()
                .expect("chain state has finite energy");
            match self.local_energy(j, Some((point_id, new_pos))) {
                Energy::Finite(a) => delta += a - before,
                Energy::Infinite => return Energy::Infinite,
            }
        }
        Energy::Finite(delta)
    }

    /// Metropolis update with an explicit proposal: relocate `point_id` to
    /// `new_pos`, accepting with probability `min(1, exp(-β·ΔH))`. Returns
    /// whether the proposal was accepted.
    pub fn propose<R: Rng + ?Sized>(
        &mut self,
        point_id: usize,
        new_pos: &[f64],
        rng: &mut R,
    ) -> bool {
        self.proposals += 1;
        let d = self.window.dim();
        let delta = match &self.spec {
            HamiltonianSpec::Periodic => self.periodic_delta(point_id, new_pos),
            _ => self.boundary_delta(point_id, new_pos),
        };
        let accept = match delta {
            Energy::Infinite => false,
            Energy::Finite(delta) => {
                let scaled = self.beta * delta;
                scaled <= 0.0 || rng.random::<f64>() < (-scaled).exp()
            }
        };
        if accept {
            self.accepted += 1;
            let old_pos = self.point(point_id).to_vec();
            if let Some(idx) = &mut self.index {
                idx.move_point(point_id, &old_pos, new_pos);
            }
            self.coords[point_id * d..(point_id + 1) * d].copy_from_slice(&new_pos[..d]);
            self.energy += delta.finite().expect("accepted moves are finite");
        }
        accept
    }

    /// One kernel step: uniform index, uniform new location.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let i = rng.random_range(0..self.len());
        let mut pos = vec![0.0; self.window.dim()];
        sample_uniform_point(&self.window, rng, &mut pos);
        self.propose(i, &pos, rng)
    }

    /// One sweep = n proposals.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for _ in 0..self.len() {
            self.step(rng);
        }
        self.sweeps_since_refresh += 1;
        if self.sweeps_since_refresh >= 256 {
            self.recompute_energy();
            self.sweeps_since_refresh = 0;
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn check_hard_core_intensity(w: &TorusWindow, hc_radius: f64) -> Result<()> {
    let packing = w.intensity() * unit_ball_volume(w.dim()) * hc_radius.powi(w.dim() as i32);
    if packing >= 1.0 {
        return Err(Error::ConstraintViolated(format!(
            "hard-core model needs λ·v_d·R^d < 1 (the intensity assumption); got {packing:.5}"
        )));
    }
    Ok(())
}

/// Run the canonical-ensemble sampler and return the retained snapshots:
/// `cfg.samples` configurations taken every `cfg.thinning_sweeps` sweeps
/// after `cfg.burn_in_sweeps` sweeps of burn-in.
pub fn mcmc_canonical<R: Rng + ?Sized>(
    v: &InteractionModel,
    spec: &HamiltonianSpec,
    w: &TorusWindow,
    cfg: &McmcConfig,
    rng: &mut R,
) -> Result<Vec<Configuration>> {
    let mut chain = CanonicalChain::new(v, spec, w, rng)?;
    for _ in 0..cfg.burn_in_sweeps {
        chain.sweep(rng);
    }
    let mut out = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        for _ in 0..cfg.thinning_sweeps {
            chain.sweep(rng);
        }
        out.push(chain.snapshot());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn binomial_count_is_exact_and_coordinates_are_centered() {
        let w = TorusWindow::new(2, 1.0, 9).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        let mut sum = 0.0;
        let reps = 100_000usize;
        for _ in 0..reps {
            let cfg = sample_binomial(&w, &mut rng);
            assert_eq!(cfg.len(), 9);
            sum += cfg.point(0)[0];
        }
        // E[coordinate] = 0, sd = w/sqrt(12); 4σ band for the mean.
        let sd = w.side() / 12f64.sqrt();
        let bound = 4.0 * sd / (reps as f64).sqrt();
        assert!(
            (sum / reps as f64).abs() < bound,
            "mean {} exceeds {bound}",
            sum / reps as f64
        );
    }

    #[test]
    fn poisson_count_moments() {
        let n = 20.0;
        let w = TorusWindow::new(2, 1.0, 20).unwrap();
        let mut rng = RngStream::new(2, 0).rng();
        let reps = 100_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..reps {
            let k = sample_poisson(&w, &mut rng).len() as f64;
            sum += k;
            sumsq += k * k;
        }
        let mean = sum / reps as f64;
        let var = sumsq / reps as f64 - mean * mean;
        assert!((mean - n).abs() < 4.0 * (n / reps as f64).sqrt());
        // Var/n is 1 + O(1/sqrt(reps)) for Poisson; allow a generous band.
        assert!((var / n - 1.0).abs() < 0.05, "variance ratio {}", var / n);
    }

    #[test]
    fn poisson_mode_ties_at_n_minus_one_and_n() {
        // pmf(n-1) = pmf(n) for Poisson(n); the empirical argmax over many
        // draws must land on one of the two.
        let w = TorusWindow::new(2, 1.0, 10).unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        let mut hist = vec![0u64; 64];
        for _ in 0..1_000_000 {
            let k = sample_poisson(&w, &mut rng).len();
            if k < hist.len() {
                hist[k] += 1;
            }
        }
        let mode = hist
            .iter()
            .enumerate()
            .max_by_key(|(_, &c)| c)
            .map(|(k, _)| k)
            .unwrap();
        assert!(mode == 9 || mode == 10, "mode {mode}");
    }

    #[test]
    fn gamma_one_accepts_every_proposal() {
        let v = InteractionModel::strauss(1.0, 0.5).unwrap();
        let w = TorusWindow::new(2, 1.0, 32).unwrap();
        let mut rng = RngStream::new(4, 0).rng();
        let mut chain = CanonicalChain::new(&v, &HamiltonianSpec::Periodic, &w, &mut rng).unwrap();
        for _ in 0..50 {
            chain.sweep(&mut rng);
        }
        assert_eq!(chain.acceptance_rate(), 1.0);
    }

    #[test]
    fn hard_core_chain_never_violates() {
        let v = InteractionModel::hard_core(0.3).unwrap();
        let w = TorusWindow::new(2, 1.0, 64).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        let samples = mcmc_canonical(
            &v,
            &HamiltonianSpec::Periodic,
            &w,
            &McmcConfig::new(20, 2, 25).unwrap(),
            &mut rng,
        )
        .unwrap();
        for s in &samples {
            assert_eq!(crate::diagnostics::hc_violations(s, 0.3).unwrap().count, 0);
        }
    }

    #[test]
    fn hard_core_intensity_assumption_is_enforced() {
        let v = InteractionModel::hard_core(0.9).unwrap();
        let w = TorusWindow::new(2, 1.0, 2).unwrap();
        let mut rng = RngStream::new(6, 0).rng();
        assert!(matches!(
            CanonicalChain::new(&v, &HamiltonianSpec::Periodic, &w, &mut rng),
            Err(Error::ConstraintViolated(_))
        ));
    }

    #[test]
    fn dart_throwing_succeeds_at_moderate_packing() {
        // Empirical check: packing fraction ≤ 0.5 succeeds within the
        // proposal budget for n ≤ 256 over 100 trials.
        for (d, n) in [(2usize, 256usize), (2, 64), (3, 128)] {
            let lambda = 1.0;
            let r = (0.5 / (lambda * unit_ball_volume(d))).powf(1.0 / d as f64);
            let w = TorusWindow::new(d, lambda, n).unwrap();
            for t in 0..100u64 {
                let mut rng = RngStream::new(7, t).rng();
                let cfg = hard_core_feasible_start(&w, r, &mut rng).unwrap();
                assert_eq!(cfg.len(), n);
                assert_eq!(crate::diagnostics::hc_violations(&cfg, r).unwrap().count, 0);
            }
        }
    }

    /// Shifting V by a constant never changes a single accept/reject
    /// decision: the trajectories coincide bit for bit.
    #[test]
    fn constant_shift_leaves_acceptance_decisions_bit_identical() {
        let w = TorusWindow::new(2, 1.0, 32).unwrap();
        let run = |v: InteractionModel| {
            let mut rng = RngStream::new(13, 2).rng();
            let mut chain =
                CanonicalChain::new(&v, &HamiltonianSpec::Periodic, &w, &mut rng).unwrap();
            for _ in 0..40 {
                chain.sweep(&mut rng);
            }
            chain.snapshot().coords().to_vec()
        };
        let base = InteractionModel::strauss(0.5, 0.5).unwrap();
        assert_eq!(run(base), run(base.shifted(0.8125)));
        assert_eq!(run(base), run(base.shifted(-3.5)));
    }

    #[test]
    fn identical_seeds_reproduce_identical_chains() {
        let v = InteractionModel::strauss(0.5, 0.5).unwrap();
        let w = TorusWindow::new(2, 1.0, 32).unwrap();
        let run = || {
            let mut rng = RngStream::new(11, 4).rng();
            let samples = mcmc_canonical(
                &v,
                &HamiltonianSpec::Periodic,
                &w,
                &McmcConfig::new(10, 2, 5).unwrap(),
                &mut rng,
            )
            .unwrap();
            samples
                .iter()
                .flat_map(|c| c.coords().to_vec())
                .collect::<Vec<f64>>()
        };
        assert_eq!(run(), run());
    }
}
