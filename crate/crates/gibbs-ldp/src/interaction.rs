//! Interaction functions `V`: Strauss, bounded k-wise, hard-core, and the
//! truncated hard-core `V^s`, plus optional truncation `min(V, cap)` and a
//! constant shift (which leaves the Gibbs measure unchanged).
//!
//! Every model is `r`-local: its value on a [`LocalView`] depends only on
//! neighbors within the locality radius. Views may or may not contain the
//! origin point; all formulas count neighbors, never the origin, so both
//! cases are handled uniformly and `V(∅) = V({0}) = 0` for every kind.

use crate::energy::Energy;
use crate::errors::Error;
use crate::hamiltonian::periodic_view;
use crate::torus::{Configuration, LocalView};
use crate::Result;

/// The k-tuple potential φ of the k-wise interaction. Both variants are
/// symmetric, nonnegative and bounded by their strength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TuplePotential {
    /// φ ≡ strength: the interaction counts (k-1)-subsets of the neighbors.
    Constant(f64),
    /// φ = strength · 1[tuple ∪ {0} pairwise within the locality radius]:
    /// the interaction counts k-cliques through the origin.
    Clique(f64),
}

impl TuplePotential {
    pub fn strength(&self) -> f64 {
        match self {
            TuplePotential::Constant(c) | TuplePotential::Clique(c) => *c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InteractionKind {
    /// `V(ω) = ½·log(1/γ)·#{neighbors within r}`, γ ∈ (0, 1].
    Strauss { gamma: f64 },
    /// `V(ω) = Σ φ(x_1..x_{k-1}, 0)` over distinct (k-1)-subsets of the
    /// neighbors within r; zero when fewer than k-1 neighbors.
    KWise { k: usize, phi: TuplePotential },
    /// `V(ω) = +∞` iff some neighbor lies within R, else 0.
    HardCore,
    /// `V^s(ω) = s·1[some neighbor within R]`.
    TruncatedHardCore { cap: f64 },
}

/// An interaction function together with its locality radius and metadata
/// (boundedness, monotonicity, cardinality bounds) used by the coupling
/// lemmas and estimators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionModel {
    kind: InteractionKind,
    radius: f64,
    truncation: Option<f64>,
    shift: f64,
}

impl InteractionModel {
    pub fn strauss(gamma: f64, r: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::ConstraintViolated(format!(
                "Strauss gamma must lie in (0, 1], got {gamma}"
            )));
        }
        Self::with_kind(InteractionKind::Strauss { gamma }, r)
    }

    pub fn k_wise(k: usize, r: f64, phi: TuplePotential) -> Result<Self> {
        if k < 2 {
            return Err(Error::ConstraintViolated(format!(
                "k-wise interaction needs k >= 2, got {k}"
            )));
        }
        if !(phi.strength() >= 0.0) {
            return Err(Error::ConstraintViolated(
                "tuple potential must be nonnegative".into(),
            ));
        }
        Self::with_kind(InteractionKind::KWise { k, phi }, r)
    }

    pub fn hard_core(radius: f64) -> Result<Self> {
        Self::with_kind(InteractionKind::HardCore, radius)
    }

    pub fn truncated_hard_core(radius: f64, cap: f64) -> Result<Self> {
        if !(cap >= 0.0) {
            return Err(Error::ConstraintViolated(format!(
                "truncated hard-core cap must be >= 0, got {cap}"
            )));
        }
        Self::with_kind(InteractionKind::TruncatedHardCore { cap }, radius)
    }

    fn with_kind(kind: InteractionKind, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::ConstraintViolated(format!(
                "locality radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            kind,
            radius,
            truncation: None,
            shift: 0.0,
        })
    }

    /// Replace `V` by `min(V, cap)`. Not meaningful for the hard-core kinds,
    /// which are already an indicator scale.
    pub fn truncated(mut self, cap: f64) -> Result<Self> {
        match self.kind {
            InteractionKind::HardCore | InteractionKind::TruncatedHardCore { .. } => {
                Err(Error::ConstraintViolated(
                    "truncation applies to the Strauss and k-wise kinds only".into(),
                ))
            }
            _ if !(cap >= 0.0) => Err(Error::ConstraintViolated(format!(
                "truncation cap must be >= 0, got {cap}"
            ))),
            _ => {
                self.truncation = Some(cap);
                Ok(self)
            }
        }
    }

    /// Replace `V` by `V + c`. The Gibbs measure is unchanged because the
    /// point number is fixed; [`hamiltonian`](crate::hamiltonian) adds the
    /// exact term `n·c` so acceptance ratios are bit-identical.
    pub fn shifted(mut self, c: f64) -> Self {
        self.shift += c;
        self
    }

    pub fn kind(&self) -> &InteractionKind {
        &self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    pub fn is_hard_core(&self) -> bool {
        matches!(self.kind, InteractionKind::HardCore)
    }

    /// A finite global bound `c` with `V ≤ c`, when one exists.
    pub fn bounded_by(&self) -> Option<f64> {
        let base = match self.kind {
            InteractionKind::Strauss { .. } | InteractionKind::KWise { .. } => self.truncation,
            InteractionKind::HardCore => None,
            InteractionKind::TruncatedHardCore { cap } => Some(cap),
        };
        base.map(|c| c + self.shift)
    }

    /// All supported kinds are increasing (adding a point never lowers V).
    pub fn is_increasing(&self) -> bool {
        true
    }

    /// `M_b`: a bound valid on every configuration of at most `b` points
    /// (origin included); nondecreasing in `b` and diverging, except for the
    /// indicator-scale kinds where it is constant.
    pub fn cardinality_bound(&self, b: usize) -> Option<f64> {
        let bf = b as f64;
        let base = match self.kind {
            InteractionKind::Strauss { gamma } => Some(0.5 * (1.0 / gamma).ln() * bf),
            InteractionKind::KWise { k, phi } => Some(phi.strength() * bf.powi(k as i32)),
            InteractionKind::HardCore => None,
            InteractionKind::TruncatedHardCore { cap } => Some(cap),
        };
        let base = match (base, self.truncation) {
            (Some(m), Some(t)) => Some(m.min(t)),
            (b, _) => b,
        };
        base.map(|m| m + self.shift)
    }

    /// Evaluate `V` on a local view (shift included, truncation applied).
    pub fn eval(&self, view: &LocalView) -> Energy {
        match self.eval_base(view) {
            Energy::Finite(v) => Energy::Finite(v + self.shift),
            Energy::Infinite => Energy::Infinite,
        }
    }

    /// Evaluate without the constant shift; this is what energy differences
    /// and Metropolis ratios are computed from, so shifting a model never
    /// changes a single acceptance decision.
    pub(crate) fn eval_base(&self, view: &LocalView) -> Energy {
        let raw = match self.kind {
            InteractionKind::Strauss { gamma } => {
                let neighbors = view.count_within(self.radius);
                Energy::Finite(0.5 * (1.0 / gamma).ln() * neighbors as f64)
            }
            InteractionKind::KWise { k, phi } => Energy::Finite(self.eval_k_wise(view, k, phi)),
            InteractionKind::HardCore => {
                if self.violates_core(view) {
                    Energy::Infinite
                } else {
                    Energy::ZERO
                }
            }
            InteractionKind::TruncatedHardCore { cap } => {
                if self.violates_core(view) {
                    Energy::Finite(cap)
                } else {
                    Energy::ZERO
                }
            }
        };
        match (raw, self.truncation) {
            (Energy::Finite(v), Some(cap)) => Energy::Finite(v.min(cap)),
            (e, _) => e,
        }
    }

    /// `ω(b(0,R)) >= 2` in the paper's counting: with the origin present one
    /// neighbor suffices; without it two points must fall in the ball.
    fn violates_core(&self, view: &LocalView) -> bool {
        let needed = if view.origin_present() { 1 } else { 2 };
        view.count_within(self.radius) >= needed
    }

    fn eval_k_wise(&self, view: &LocalView, k: usize, phi: TuplePotential) -> f64 {
        let ids: Vec<usize> = (0..view.neighbor_count())
            .filter(|&i| view.dist_to_origin(i) <= self.radius)
            .collect();
        let m = k - 1;
        if ids.len() < m {
            return 0.0;
        }
        // O(deg^{k-1}) enumeration of (k-1)-subsets of the neighbor list;
        // the CLI caps k at 4 to keep this affordable.
        let mut total = 0.0;
        let mut subset = vec![0usize; m];
        fn recurse(
            ids: &[usize],
            start: usize,
            depth: usize,
            subset: &mut Vec<usize>,
            view: &LocalView,
            r: f64,
            phi: TuplePotential,
            total: &mut f64,
        ) {
            let m = subset.len();
            if depth == m {
                match phi {
                    TuplePotential::Constant(c) => *total += c,
                    TuplePotential::Clique(c) => {
                        let ok = (0..m).all(|a| {
                            ((a + 1)..m).all(|b| view.dist_between(subset[a], subset[b]) <= r)
                        });
                        if ok {
                            *total += c;
                        }
                    }
                }
                return;
            }
            for pos in start..ids.len() {
                subset[depth] = ids[pos];
                recurse(ids, pos + 1, depth + 1, subset, view, r, phi, total);
            }
        }
        recurse(&ids, 0, 0, &mut subset, view, self.radius, phi, &mut total);
        total
    }
}

/// `V(ω^{(n)} - x)` for a configuration point: the periodic neighborhood of
/// the focal point is gathered and the model evaluated on it.
pub fn eval_interaction(
    v: &InteractionModel,
    omega: &Configuration,
    focal: usize,
) -> Result<Energy> {
    if focal >= omega.len() {
        return Err(Error::PreconditionViolated(format!(
            "focal id {focal} out of range for {} points",
            omega.len()
        )));
    }
    let view = periodic_view(omega, focal, v.radius())?;
    Ok(v.eval(&view))
}
