//! Combinatorial diagnostics behind the coupling arguments: b-dense point
//! counts, hard-core violation counts, the sparse-cube set with its derived
//! constants, boundary counts, and the closed-form probability bounds they
//! feed.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::coupling::{detect_event_e_move, ResampleCoupling};
use crate::errors::Error;
use crate::interaction::InteractionModel;
use crate::score::ScoreModel;
use crate::torus::{unit_ball_volume, CellIndex, Configuration, LocalView};
use crate::Result;

/// Which points of a configuration are `b`-dense for radius ρ: a point is
/// dense iff its periodic ρ-ball contains at least `b` configuration points,
/// the point itself included.
#[derive(Clone, Debug)]
pub struct DenseReport {
    pub radius: f64,
    pub threshold: usize,
    pub dense_ids: Vec<usize>,
    pub count: usize,
}

/// Exact b-dense census via cell-list queries.
pub fn count_b_dense(omega: &Configuration, rho: f64, b: usize) -> Result<DenseReport> {
    let w = omega.window();
    if 2.0 * rho >= w.side() {
        return Err(Error::RadiusTooLarge {
            radius: rho,
            side: w.side(),
        });
    }
    if b < 2 {
        return Err(Error::PreconditionViolated(format!(
            "dense threshold must be at least 2, got {b}"
        )));
    }
    let index = if omega.len() >= 64 {
        Some(CellIndex::build(omega, rho)?)
    } else {
        None
    };
    let mut dense_ids = Vec::new();
    for i in 0..omega.len() {
        let in_ball = match &index {
            Some(idx) => idx.ball_ids(omega, omega.point(i), rho).len(),
            None => omega.ball_ids_brute(omega.point(i), rho).len(),
        };
        if in_ball >= b {
            dense_ids.push(i);
        }
    }
    Ok(DenseReport {
        radius: rho,
        threshold: b,
        count: dense_ids.len(),
        dense_ids,
    })
}

/// Points with at least one R-neighbor (periodic, closed ball). `count == 0`
/// iff the hard-core Boltzmann weight is 1.
#[derive(Clone, Debug)]
pub struct HcViolationReport {
    pub radius: f64,
    pub ids: Vec<usize>,
    pub count: usize,
}

pub fn hc_violations(omega: &Configuration, hc_radius: f64) -> Result<HcViolationReport> {
    let report = count_b_dense(omega, hc_radius, 2)?;
    Ok(HcViolationReport {
        radius: hc_radius,
        count: report.count,
        ids: report.dense_ids,
    })
}

/// The constants attached to an interaction range `r`:
/// `n_r` is the smallest integer exceeding `λ(18r)^d`, `K_r` the smallest
/// integer making the sparse-cube inequality strict, and
/// `A_r = ((1/λ^{1/d} - 12r/n_r^{1/d})/(6r))^d - 1/K_r > 0`
/// is the guaranteed per-point density of sparse cubes.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RConstants {
    pub r: f64,
    pub lambda: f64,
    pub dim: usize,
    pub n_r: usize,
    pub k_r: usize,
    pub a_r: f64,
}

/// Derive `(n_r, K_r, A_r)` from `(λ, d, r)`, choosing the minimal integers.
pub fn derive_r_constants(lambda: f64, dim: usize, r: f64) -> RConstants {
    assert!(r > 0.0 && lambda > 0.0 && dim >= 2, "parameters out of range");
    let n_r = smallest_integer_above(lambda * (18.0 * r).powi(dim as i32));
    let denom = 1.0 / lambda.powf(1.0 / dim as f64) - 12.0 * r / (n_r as f64).powf(1.0 / dim as f64);
    debug_assert!(denom > 0.0);
    let density = (denom / (6.0 * r)).powi(dim as i32);
    let mut k_r = smallest_integer_above(1.0 / density);
    // Guard the strict inequality against rounding at the integer edge; any
    // larger K_r still satisfies the definition.
    while density - 1.0 / k_r as f64 <= 0.0 {
        k_r += 1;
    }
    let a_r = density - 1.0 / k_r as f64;
    RConstants {
        r,
        lambda,
        dim,
        n_r,
        k_r,
        a_r,
    }
}

impl RConstants {
    /// Replace `K_r` by a larger admissible value (the bounds only need the
    /// inequality, and callers may prefer sparser cubes).
    pub fn with_k_r(mut self, k_r: usize) -> Result<Self> {
        if k_r < self.k_r {
            return Err(Error::ConstraintViolated(format!(
                "K_r override {k_r} is below the minimal admissible value {}",
                self.k_r
            )));
        }
        let denom = 1.0 / self.lambda.powf(1.0 / self.dim as f64)
            - 12.0 * self.r / (self.n_r as f64).powf(1.0 / self.dim as f64);
        self.k_r = k_r;
        self.a_r = (denom / (6.0 * self.r)).powi(self.dim as i32) - 1.0 / k_r as f64;
        Ok(self)
    }
}

fn smallest_integer_above(x: f64) -> usize {
    let f = x.floor();
    let candidate = if f == x { x + 1.0 } else { f + 1.0 };
    candidate as usize
}

/// The sparse-cube set `S_n(ω)`: centers `z ∈ 6rℤ^d` whose cube `Q_{6r}(z)`
/// lies inside the window (unperiodized) and holds at most `K_r - 1` points.
/// Dense points get moved into the inner receptacles `Q_r(z)`.
#[derive(Clone, Debug)]
pub struct SparseCubeSet {
    r: f64,
    k_r: usize,
    dim: usize,
    /// Interior grid extends over `{-m..m}^d`.
    half_extent: i64,
    /// Point counts of occupied interior cubes, keyed by encoded grid coords.
    occupied: std::collections::HashMap<Vec<i64>, usize>,
    s_n: usize,
    d_n: usize,
}

impl SparseCubeSet {
    /// Number of sparse cubes `s_n`.
    pub fn size(&self) -> usize {
        self.s_n
    }

    /// Number of interior cubes `d_n` (sparse or not).
    pub fn interior_cube_count(&self) -> usize {
        self.d_n
    }

    /// Sum of the point counts over interior cubes (≤ n: cubes are disjoint).
    pub fn interior_point_count(&self) -> usize {
        self.occupied.values().sum()
    }

    fn cube_of(&self, x: &[f64]) -> Option<Vec<i64>> {
        let cell = 6.0 * self.r;
        let mut key = Vec::with_capacity(self.dim);
        for &c in x {
            let k = (c / cell + 0.5).floor() as i64;
            if k.abs() > self.half_extent {
                return None;
            }
            key.push(k);
        }
        Some(key)
    }

    fn is_sparse(&self, key: &[i64]) -> bool {
        self.occupied.get(key).copied().unwrap_or(0) <= self.k_r - 1
    }

    /// If `x` lies in the receptacle `Q_r(z)` of a sparse cube, return the
    /// cube's grid key.
    pub fn receptacle_of(&self, x: &[f64]) -> Option<Vec<i64>> {
        let key = self.cube_of(x)?;
        if !self.is_sparse(&key) {
            return None;
        }
        let cell = 6.0 * self.r;
        let half = 0.5 * self.r;
        for (i, &c) in x.iter().enumerate() {
            let rel = c - key[i] as f64 * cell;
            if !(-half..half).contains(&rel) {
                return None;
            }
        }
        Some(key)
    }

    /// Centers of the sparse cubes, lexicographic in grid coordinates.
    pub fn centers(&self) -> Vec<Vec<f64>> {
        let cell = 6.0 * self.r;
        let mut out = Vec::with_capacity(self.s_n);
        let m = self.half_extent;
        let width = (2 * m + 1) as usize;
        let total = width.pow(self.dim as u32);
        let mut key = vec![0i64; self.dim];
        for code in 0..total {
            let mut c = code;
            for slot in key.iter_mut().rev() {
                *slot = (c % width) as i64 - m;
                c /= width;
            }
            if self.is_sparse(&key) {
                out.push(key.iter().map(|&k| k as f64 * cell).collect());
            }
        }
        out
    }

    /// Uniform point in the receptacle `Q_r(z)` of the sparse cube keyed by
    /// `key`.
    pub(crate) fn sample_in_receptacle<R: rand::Rng + ?Sized>(
        &self,
        key: &[i64],
        rng: &mut R,
    ) -> Vec<f64> {
        let cell = 6.0 * self.r;
        key.iter()
            .map(|&k| k as f64 * cell + (rng.random::<f64>() - 0.5) * self.r)
            .collect()
    }

    /// Keys of all sparse cubes.
    pub(crate) fn sparse_keys(&self) -> Vec<Vec<i64>> {
        let m = self.half_extent;
        let width = (2 * m + 1) as usize;
        let total = width.pow(self.dim as u32);
        let mut out = Vec::with_capacity(self.s_n);
        let mut key = vec![0i64; self.dim];
        for code in 0..total {
            let mut c = code;
            for slot in key.iter_mut().rev() {
                *slot = (c % width) as i64 - m;
                c /= width;
            }
            if self.is_sparse(&key) {
                out.push(key.clone());
            }
        }
        out
    }
}

/// Enumerate the sparse cubes of a configuration. Requires `n ≥ n_r`.
pub fn sparse_cubes(omega: &Configuration, consts: &RConstants) -> Result<SparseCubeSet> {
    let w = omega.window();
    if w.point_budget() < consts.n_r {
        return Err(Error::WindowTooSmall {
            needed: consts.n_r,
            got: w.point_budget(),
        });
    }
    let r = consts.r;
    let cell = 6.0 * r;
    // Q_{6r}(z) ⊆ W_n  ⟺  |z_i| ≤ w/2 - 3r on every axis.
    let m = ((w.half_side() - 3.0 * r) / cell).floor() as i64;
    if m < 0 {
        return Err(Error::WindowTooSmall {
            needed: consts.n_r,
            got: w.point_budget(),
        });
    }
    let d_n = ((2 * m + 1) as usize).pow(w.dim() as u32);
    let mut set = SparseCubeSet {
        r,
        k_r: consts.k_r,
        dim: w.dim(),
        half_extent: m,
        occupied: std::collections::HashMap::new(),
        s_n: 0,
        d_n,
    };
    for p in omega.points() {
        if let Some(key) = set.cube_of(p) {
            *set.occupied.entry(key).or_insert(0) += 1;
        }
    }
    let crowded = set
        .occupied
        .values()
        .filter(|&&c| c > consts.k_r - 1)
        .count();
    set.s_n = d_n - crowded;
    Ok(set)
}

/// Closed-form lower bound for the conditional probability of the move
/// event: `log[(1-ε)^n · ε^N · (λ r^d (s_n - N)/n)^N]`, evaluated in log
/// space to stay finite at large `n`. Requires `N < s_n`.
pub fn move_event_log_bound(
    n_dense: usize,
    s_n: usize,
    eps: f64,
    n: usize,
    r: f64,
    lambda: f64,
    dim: usize,
) -> Result<f64> {
    if n_dense >= s_n {
        return Err(Error::DensityExceedsCubes {
            dense: n_dense,
            cubes: s_n,
        });
    }
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::PreconditionViolated(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let nf = n as f64;
    let mut log_bound = nf * (1.0 - eps).ln();
    if n_dense > 0 {
        let per_dense =
            eps.ln() + (lambda * r.powi(dim as i32) * (s_n - n_dense) as f64 / nf).ln();
        log_bound += n_dense as f64 * per_dense;
    }
    Ok(log_bound)
}

/// Penrose-form binomial tail bound: for `k ≥ e²·n·p`,
/// `P(Bin(n, p) ≥ k) ≤ exp(-(k/2)·log(k/(n·p)))`.
pub fn binomial_tail_bound(n_trials: u64, p: f64, k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::PreconditionViolated(format!(
            "probability out of range: {p}"
        )));
    }
    let mean = n_trials as f64 * p;
    let threshold = std::f64::consts::E.powi(2) * mean;
    if k < threshold {
        return Err(Error::OutOfRegime { k, threshold });
    }
    Ok((-(k / 2.0) * (k / mean).ln()).exp())
}

/// `a_{r,ε} = (3/2)·r^d·v_d·λ·ε·(1 + ε/2)` from the hard-core concentration
/// step.
pub fn a_r_eps(r: f64, eps: f64, lambda: f64, dim: usize) -> f64 {
    1.5 * r.powi(dim as i32) * unit_ball_volume(dim) * lambda * eps * (1.0 + 0.5 * eps)
}

/// `p_ε = ε·λ·r^d·v_d`, the uniform cap on the neighbor-hit probability.
pub fn p_eps(r: f64, eps: f64, lambda: f64, dim: usize) -> f64 {
    eps * lambda * r.powi(dim as i32) * unit_ball_volume(dim)
}

/// Number of configuration points in the r-boundary
/// `∂_r W_n = W_n \ [-w/2+r, w/2-r]^d`.
pub fn boundary_count(omega: &Configuration, r: f64) -> Result<usize> {
    let w = omega.window();
    if 2.0 * r >= w.side() {
        return Err(Error::RadiusTooLarge {
            radius: r,
            side: w.side(),
        });
    }
    let inner = w.half_side() - r;
    Ok(omega
        .points()
        .filter(|p| p.iter().any(|&c| c.abs() > inner))
        .count())
}

/// `p_n = |∂_r W_n|/|W_n| = 1 - (1 - 2r(λ/n)^{1/d})^d`; the boundary count
/// of a binomial sample is `Bin(n, p_n)`.
pub fn boundary_fraction(n: usize, lambda: f64, dim: usize, r: f64) -> Result<f64> {
    let side = (n as f64 / lambda).powf(1.0 / dim as f64);
    if 2.0 * r >= side {
        return Err(Error::RadiusTooLarge { radius: r, side });
    }
    Ok(1.0 - (1.0 - 2.0 * r * (lambda / n as f64).powf(1.0 / dim as f64)).powi(dim as i32))
}

/// Exact `log P(Poisson(n) = n) = -n + n·log n - log Γ(n+1)`. The normalized
/// sequence `(λ/n)·log P` vanishes in the window limit, which is what lets
/// partition functions switch between the binomial and Poisson references.
pub fn stirling_log_prob(n: u64) -> f64 {
    let nf = n as f64;
    -nf + nf * nf.ln() - ln_gamma(nf + 1.0)
}

/// `(λ/n)·log P(Poisson(n) = n)`; the one normalization used everywhere so
/// different call paths agree bit for bit.
pub fn stirling_normalized(n: u64, lambda: f64) -> f64 {
    lambda / n as f64 * stirling_log_prob(n)
}

/// Outcome of one side of the trajectory-difference check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClauseOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// `rhs - lhs` for the bounded clause, `lhs - rhs` for the increasing
    /// clause: nonnegative slack means the inequality holds.
    pub slack: f64,
}

/// Results of [`trajectory_bound_check`]: which clauses were applicable and
/// whether each held.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrajectoryCheck {
    /// `|Σ h(base) - h(partner)| ≤ 2c(K_r+1)·N^{2r}_{n,b}` for h bounded by c.
    pub bounded_clause: Option<ClauseOutcome>,
    /// `Σ h^{M_b}(base) - h^{M_b}(partner) ≥ -M_{K_r}·K_r·N^r_{n,b}` for
    /// nonnegative increasing cardinality-bounded h.
    pub increasing_clause: Option<ClauseOutcome>,
    pub dense_r: usize,
    pub dense_2r: usize,
}

impl TrajectoryCheck {
    pub fn pass(&self) -> bool {
        self.bounded_clause.map_or(true, |c| c.pass)
            && self.increasing_clause.map_or(true, |c| c.pass)
    }
}

/// A local statistic: either an interaction function or a score function.
#[derive(Clone, Copy, Debug)]
pub enum LocalStatistic<'a> {
    Interaction(&'a InteractionModel),
    Score(&'a ScoreModel),
}

impl LocalStatistic<'_> {
    pub fn radius(&self) -> f64 {
        match self {
            LocalStatistic::Interaction(v) => v.radius(),
            LocalStatistic::Score(s) => s.radius(),
        }
    }

    pub fn bounded_by(&self) -> Option<f64> {
        match self {
            LocalStatistic::Interaction(v) => v.bounded_by(),
            LocalStatistic::Score(s) => s.bounded_by(),
        }
    }

    pub fn is_increasing(&self) -> bool {
        match self {
            LocalStatistic::Interaction(v) => v.is_increasing(),
            LocalStatistic::Score(s) => s.is_increasing(),
        }
    }

    pub fn cardinality_bound(&self, b: usize) -> Option<f64> {
        match self {
            LocalStatistic::Interaction(v) => v.cardinality_bound(b),
            LocalStatistic::Score(s) => Some(s.cardinality_bound(b)),
        }
    }

    fn eval_finite(&self, view: &LocalView) -> Result<f64> {
        match self {
            LocalStatistic::Interaction(v) => v.eval(view).finite().ok_or_else(|| {
                Error::NonFiniteEnergy("trajectory check needs a finite-valued statistic".into())
            }),
            LocalStatistic::Score(s) => Ok(s.eval(view)),
        }
    }
}

/// Evaluate both sides of the coupled-trajectory difference bounds on a
/// resample coupling whose move event holds.
///
/// Requires `b > K_r` and the event; the bounded clause runs when the
/// statistic declares a global bound, the increasing clause when it is
/// nonnegative increasing and cardinality-bounded.
pub fn trajectory_bound_check(
    coupling: &ResampleCoupling,
    h: LocalStatistic<'_>,
    consts: &RConstants,
    b: usize,
) -> Result<TrajectoryCheck> {
    if b <= consts.k_r {
        return Err(Error::PreconditionViolated(format!(
            "dense threshold b = {b} must exceed K_r = {}",
            consts.k_r
        )));
    }
    let event = detect_event_e_move(coupling, b, consts)?;
    if !event.holds {
        return Err(Error::EventNotSatisfied(format!(
            "move event fails: {}",
            event.failure_summary()
        )));
    }
    let base = coupling.base();
    let partner = coupling.partner();
    let r = h.radius();
    let w = base.window();
    if 4.0 * r >= w.side() {
        return Err(Error::RadiusTooLarge {
            radius: 2.0 * r,
            side: w.side(),
        });
    }
    let n = base.len();
    let dense_r = count_b_dense(base, r, b)?.count;
    let dense_2r = count_b_dense(base, 2.0 * r, b)?.count;

    let m_b = h.cardinality_bound(b);
    if h.bounded_by().is_none() && m_b.is_none() {
        return Err(Error::PreconditionViolated(
            "statistic is neither bounded nor cardinality-bounded; no clause applies".into(),
        ));
    }
    let mut diff_sum = 0.0f64;
    let mut capped_diff_sum = 0.0f64;
    for i in 0..n {
        let view_base = crate::hamiltonian::periodic_view(base, i, r)?;
        let view_partner = crate::hamiltonian::periodic_view(&partner, i, r)?;
        let hb = h.eval_finite(&view_base)?;
        let hp = h.eval_finite(&view_partner)?;
        diff_sum += hb - hp;
        if let Some(m) = m_b {
            capped_diff_sum += hb.min(m) - hp.min(m);
        }
    }

    let tol = 1e-9;
    let bounded_clause = h.bounded_by().map(|c| {
        let lhs = diff_sum.abs();
        let rhs = 2.0 * c * (consts.k_r as f64 + 1.0) * dense_2r as f64;
        ClauseOutcome {
            lhs,
            rhs,
            pass: lhs <= rhs + tol,
            slack: rhs - lhs,
        }
    });
    let increasing_clause = match (h.is_increasing(), m_b) {
        (true, Some(_)) => {
            let m_kr = h
                .cardinality_bound(consts.k_r)
                .expect("cardinality bound exists for K_r when it exists for b");
            let lhs = capped_diff_sum;
            let rhs = -m_kr * consts.k_r as f64 * dense_r as f64;
            Some(ClauseOutcome {
                lhs,
                rhs,
                pass: lhs >= rhs - tol,
                slack: lhs - rhs,
            })
        }
        _ => None,
    };
    Ok(TrajectoryCheck {
        bounded_clause,
        increasing_clause,
        dense_r,
        dense_2r,
    })
}


/// One row of the diagnostics report emitted by the CLI.
#[derive(Clone, Debug, Serialize)]
#[allow(non_snake_case)]
pub struct DiagnosticsRecord {
    pub n: usize,
    pub lambda: f64,
    pub d: usize,
    pub r: f64,
    pub b: usize,
    pub N_r: usize,
    pub N_2r: usize,
    pub s_n: usize,
    pub A_r: f64,
    pub K_r: usize,
    pub n_r: usize,
    pub bound_log: Option<f64>,
    pub event_E: Option<bool>,
}
