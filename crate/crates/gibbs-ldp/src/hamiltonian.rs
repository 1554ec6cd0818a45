//! Hamiltonians in the three boundary conventions.
//!
//! * `Periodic`:     `H_n(ω)  = Σ_x V(ω^{(n)} - x)` — wraparound neighborhoods.
//! * `BoundaryOne`:  `Ĥ¹_n(ω) = Σ_x V(((ω∩W_n) ∪ (γ∩W_nᶜ)) - x)` — plain
//!   Euclidean neighborhoods against an external boundary configuration γ.
//! * `BoundaryTwo`:  `Ĥ²_n(ω) = Ĥ¹_n(ω) + Σ_x V((γ∩W_nᶜ) - x)`.
//!
//! The boundary conventions require `V({0}) = 0` and `V(∅) = 0`; all model
//! kinds here satisfy both structurally, but a constant shift breaks them, so
//! shifted models are rejected. Hard-core interactions are rejected as well:
//! the boundary theory covers bounded interactions only.

use crate::energy::Energy;
use crate::errors::Error;
use crate::interaction::InteractionModel;
use crate::torus::{CellIndex, Configuration, LocalView, TorusWindow};
use crate::Result;

/// A boundary configuration `γ ∩ W_nᶜ`, kept only within an annulus of width
/// equal to the interaction's locality radius — points farther out can never
/// influence a point inside the window.
#[derive(Clone, Debug)]
pub struct BoundaryCondition {
    dim: usize,
    coords: Vec<f64>,
}

impl BoundaryCondition {
    /// Keep the part of `points` that lies outside the window but within
    /// distance `locality` of it; everything else is discarded.
    pub fn new(window: &TorusWindow, locality: f64, points: &[Vec<f64>]) -> Result<Self> {
        if !(locality > 0.0) {
            return Err(Error::ConstraintViolated(format!(
                "boundary annulus width must be positive, got {locality}"
            )));
        }
        let h = window.half_side();
        let mut coords = Vec::new();
        for p in points {
            if p.len() != window.dim() {
                return Err(Error::DimensionMismatch {
                    expected: window.dim(),
                    got: p.len(),
                });
            }
            let inside = p.iter().all(|&c| (-h..h).contains(&c));
            let in_annulus = p.iter().all(|&c| c.abs() <= h + locality);
            if !inside && in_annulus {
                coords.extend_from_slice(p);
            }
        }
        Ok(Self {
            dim: window.dim(),
            coords,
        })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
}

/// Which energy convention to use.
#[derive(Clone, Debug)]
pub enum HamiltonianSpec {
    Periodic,
    BoundaryOne(BoundaryCondition),
    BoundaryTwo(BoundaryCondition),
}

impl HamiltonianSpec {
    pub fn is_periodic(&self) -> bool {
        matches!(self, HamiltonianSpec::Periodic)
    }

    pub fn boundary(&self) -> Option<&BoundaryCondition> {
        match self {
            HamiltonianSpec::Periodic => None,
            HamiltonianSpec::BoundaryOne(bc) | HamiltonianSpec::BoundaryTwo(bc) => Some(bc),
        }
    }

    pub(crate) fn validate_model(&self, v: &InteractionModel) -> Result<()> {
        if self.is_periodic() {
            return Ok(());
        }
        if v.is_hard_core() {
            return Err(Error::HardCoreBoundary);
        }
        if v.shift() != 0.0 {
            return Err(Error::ConstraintViolated(
                "boundary Hamiltonians need V({0}) = 0; drop the constant shift".into(),
            ));
        }
        Ok(())
    }
}

fn euclid_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// The periodic neighborhood `(ω^{(n)} - x) ∩ b(0, radius)` of a
/// configuration point, origin included.
pub(crate) fn periodic_view(
    omega: &Configuration,
    focal: usize,
    radius: f64,
) -> Result<LocalView> {
    let w = omega.window();
    if 2.0 * radius >= w.side() {
        return Err(Error::RadiusTooLarge {
            radius,
            side: w.side(),
        });
    }
    let ids = omega.ball_ids_brute(omega.point(focal), radius);
    Ok(assemble_periodic_view(omega, focal, &ids))
}

/// Same, but with neighbor ids already found by a cell index.
pub(crate) fn assemble_periodic_view(
    omega: &Configuration,
    focal: usize,
    neighbor_ids: &[usize],
) -> LocalView {
    let w = omega.window();
    let d = w.dim();
    let mut view = LocalView::new(d, true, Some(w.side()));
    let x = omega.point(focal);
    let mut rel = vec![0.0; d];
    for &j in neighbor_ids {
        if j == focal {
            continue;
        }
        let y = omega.point(j);
        for k in 0..d {
            rel[k] = w.wrapped_delta(y[k], x[k]);
        }
        view.push(&rel);
    }
    view
}

/// Euclidean (non-periodic) neighborhood of window point `x` within the
/// union of the window configuration and the boundary configuration.
/// `skip` omits one configuration point (the focal one).
fn euclid_view(
    omega: &Configuration,
    bc: &BoundaryCondition,
    x: &[f64],
    skip: Option<usize>,
    radius: f64,
    origin_present: bool,
    include_window_points: bool,
) -> LocalView {
    let d = omega.window().dim();
    let mut view = LocalView::new(d, origin_present, None);
    let mut rel = vec![0.0; d];
    if include_window_points {
        for (j, y) in omega.points().enumerate() {
            if Some(j) == skip {
                continue;
            }
            if euclid_dist(x, y) <= radius {
                for k in 0..d {
                    rel[k] = y[k] - x[k];
                }
                view.push(&rel);
            }
        }
    }
    for y in bc.points() {
        if euclid_dist(x, y) <= radius {
            for k in 0..d {
                rel[k] = y[k] - x[k];
            }
            view.push(&rel);
        }
    }
    view
}

/// Total energy of `ω` under the chosen convention. Any `+∞` summand makes
/// the result `+∞`. A constant shift `c` on the model contributes exactly
/// `n·c` (periodic convention only).
pub fn hamiltonian(
    spec: &HamiltonianSpec,
    v: &InteractionModel,
    omega: &Configuration,
) -> Result<Energy> {
    spec.validate_model(v)?;
    let n = omega.len();
    match spec {
        HamiltonianSpec::Periodic => {
            let w = omega.window();
            if 2.0 * v.radius() >= w.side() {
                return Err(Error::RadiusTooLarge {
                    radius: v.radius(),
                    side: w.side(),
                });
            }
            let index = if n >= 64 {
                Some(CellIndex::build(omega, v.radius())?)
            } else {
                None
            };
            let mut total = Energy::ZERO;
            for i in 0..n {
                let ids = match &index {
                    Some(idx) => idx.ball_ids(omega, omega.point(i), v.radius()),
                    None => omega.ball_ids_brute(omega.point(i), v.radius()),
                };
                let view = assemble_periodic_view(omega, i, &ids);
                total += v.eval_base(&view);
                if !total.is_finite() {
                    return Ok(Energy::Infinite);
                }
            }
            Ok(match total {
                Energy::Finite(h) => Energy::Finite(h + n as f64 * v.shift()),
                Energy::Infinite => Energy::Infinite,
            })
        }
        HamiltonianSpec::BoundaryOne(bc) => {
            let mut total = Energy::ZERO;
            for i in 0..n {
                let view = euclid_view(omega, bc, omega.point(i), Some(i), v.radius(), true, true);
                total += v.eval(&view);
            }
            Ok(total)
        }
        HamiltonianSpec::BoundaryTwo(bc) => {
            let mut total = Energy::ZERO;
            for i in 0..n {
                let x = omega.point(i);
                let view = euclid_view(omega, bc, x, Some(i), v.radius(), true, true);
                total += v.eval(&view);
                // Cross term: the boundary points alone, seen from x. The
                // origin is not a point of that configuration.
                let cross = euclid_view(omega, bc, x, None, v.radius(), false, false);
                total += v.eval(&cross);
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::InteractionModel;
    use crate::rng::RngStream;
    use crate::sampling::sample_binomial;
    use crate::score::pair_count_sr;
    use crate::torus::TorusWindow;

    fn window(n: usize) -> TorusWindow {
        TorusWindow::new(2, 1.0, n).unwrap()
    }

    #[test]
    fn gamma_one_means_zero_hamiltonian() {
        let v = InteractionModel::strauss(1.0, 0.5).unwrap();
        let w = window(32);
        let mut rng = RngStream::new(5, 0).rng();
        let cfg = sample_binomial(&w, &mut rng);
        assert_eq!(
            hamiltonian(&HamiltonianSpec::Periodic, &v, &cfg).unwrap(),
            Energy::Finite(0.0)
        );
    }

    #[test]
    fn two_point_strauss_hamiltonian_matches_density() {
        let v = InteractionModel::strauss(0.5, 0.5).unwrap();
        let w = window(100);
        let cfg = Configuration::new(w, &[vec![0.0, 0.0], vec![0.3, 0.0]]).unwrap();
        let h = hamiltonian(&HamiltonianSpec::Periodic, &v, &cfg)
            .unwrap()
            .finite()
            .unwrap();
        assert!((h - 2.0f64.ln()).abs() < 1e-12);
        // exp(-H) = γ^{S_r} with S_r = 1
        let s = pair_count_sr(&cfg, 0.5).unwrap();
        assert_eq!(s, 1);
        assert!((Energy::Finite(h).boltzmann() - 0.5).abs() < 1e-12);
    }

    /// Strauss identity H = log(1/γ)·S_r on sampled configurations, to 8 ulp.
    #[test]
    fn strauss_identity_on_samples() {
        let gamma: f64 = 0.35;
        let v = InteractionModel::strauss(gamma, 0.6).unwrap();
        let w = window(128);
        for s in 0..50u64 {
            let mut rng = RngStream::new(17, s).rng();
            let cfg = sample_binomial(&w, &mut rng);
            let h = hamiltonian(&HamiltonianSpec::Periodic, &v, &cfg)
                .unwrap()
                .finite()
                .unwrap();
            let pairs = pair_count_sr(&cfg, 0.6).unwrap() as f64;
            let want = (1.0 / gamma).ln() * pairs;
            let tol = 8.0 * f64::EPSILON * want.abs().max(1.0);
            assert!(
                (h - want).abs() <= tol,
                "seed {s}: H = {h}, log(1/γ)·S_r = {want}"
            );
        }
    }

    #[test]
    fn constant_shift_moves_hamiltonian_by_exactly_n_c() {
        let v = InteractionModel::strauss(0.5, 0.5).unwrap();
        let c = 0.3125; // exactly representable
        let vs = v.shifted(c);
        let w = window(64);
        for s in 0..20u64 {
            let mut rng = RngStream::new(23, s).rng();
            let cfg = sample_binomial(&w, &mut rng);
            let h = hamiltonian(&HamiltonianSpec::Periodic, &v, &cfg)
                .unwrap()
                .finite()
                .unwrap();
            let hs = hamiltonian(&HamiltonianSpec::Periodic, &vs, &cfg)
                .unwrap()
                .finite()
                .unwrap();
            assert_eq!(hs, h + 64.0 * c, "shift must contribute exactly n*c");
        }
    }

    #[test]
    fn interior_configuration_boundary_one_equals_periodic() {
        // No point within r of the window faces: wraparound never fires and
        // the boundary condition is invisible, so Ĥ¹ = H.
        let v = InteractionModel::strauss(0.4, 0.5).unwrap();
        let w = window(100); // side 10
        let pts: Vec<Vec<f64>> = vec![
            vec![0.0, 0.0],
            vec![0.3, 0.1],
            vec![-1.0, 2.0],
            vec![3.0, -3.0],
            vec![2.5, 2.5],
        ];
        let cfg = Configuration::new(w, &pts).unwrap();
        let bc_pts: Vec<Vec<f64>> = vec![vec![5.2, 0.0], vec![-5.3, -5.3], vec![0.0, 5.4]];
        let bc = BoundaryCondition::new(&w, 0.5, &bc_pts).unwrap();
        let h = hamiltonian(&HamiltonianSpec::Periodic, &v, &cfg).unwrap();
        let h1 = hamiltonian(&HamiltonianSpec::BoundaryOne(bc.clone()), &v, &cfg).unwrap();
        let h2 = hamiltonian(&HamiltonianSpec::BoundaryTwo(bc), &v, &cfg).unwrap();
        assert_eq!(h, h1);
        assert_eq!(h, h2);
    }

    #[test]
    fn boundary_condition_keeps_only_the_annulus() {
        let w = window(100);
        let pts = vec![
            vec![0.0, 0.0],   // inside: dropped
            vec![5.1, 0.0],   // annulus: kept
            vec![7.0, 0.0],   // too far: dropped
            vec![-5.2, 5.2],  // annulus corner: kept
        ];
        let bc = BoundaryCondition::new(&w, 0.5, &pts).unwrap();
        assert_eq!(bc.len(), 2);
    }

    #[test]
    fn boundary_rejects_hard_core() {
        let v = InteractionModel::hard_core(0.3).unwrap();
        let w = window(16);
        let cfg = Configuration::new(w, &[vec![0.0, 0.0]]).unwrap();
        let bc = BoundaryCondition::empty(2);
        assert!(matches!(
            hamiltonian(&HamiltonianSpec::BoundaryOne(bc), &v, &cfg),
            Err(Error::HardCoreBoundary)
        ));
    }

    #[test]
    fn hard_core_dichotomy() {
        let v = InteractionModel::hard_core(0.4).unwrap();
        let w = window(64);
        for s in 0..30u64 {
            let mut rng = RngStream::new(31, s).rng();
            let cfg = sample_binomial(&w, &mut rng);
            let h = hamiltonian(&HamiltonianSpec::Periodic, &v, &cfg).unwrap();
            let violations = crate::diagnostics::hc_violations(&cfg, 0.4).unwrap();
            let weight = h.boltzmann();
            assert!(weight == 0.0 || weight == 1.0);
            assert_eq!(weight == 1.0, violations.count == 0);
        }
    }

    /// Adding a point never decreases the periodic Hamiltonian of an
    /// increasing nonnegative interaction.
    #[test]
    fn monotone_under_insertion() {
        let models = [
            InteractionModel::strauss(0.5, 0.6).unwrap(),
            InteractionModel::k_wise(3, 0.6, crate::interaction::TuplePotential::Clique(1.0))
                .unwrap(),
            InteractionModel::truncated_hard_core(0.3, 1.5).unwrap(),
        ];
        let w = window(64);
        for s in 0..20u64 {
            let mut rng = RngStream::new(41, s).rng();
            let cfg = sample_binomial(&w, &mut rng);
            let mut extended: Vec<Vec<f64>> = cfg.points().map(|p| p.to_vec()).collect();
            let mut extra = vec![0.0, 0.0];
            crate::sampling::sample_uniform_point(&w, &mut rng, &mut extra);
            extended.push(extra);
            let bigger = Configuration::new(w, &extended).unwrap();
            for v in &models {
                let h0 = hamiltonian(&HamiltonianSpec::Periodic, v, &cfg)
                    .unwrap()
                    .finite()
                    .unwrap();
                let h1 = hamiltonian(&HamiltonianSpec::Periodic, v, &bigger)
                    .unwrap()
                    .finite()
                    .unwrap();
                assert!(h1 >= h0 - 1e-12, "insertion lowered H: {h0} -> {h1}");
            }
        }
    }

    /// Energies inside a ball are untouched by moving a far-away point.
    #[test]
    fn locality_of_per_point_energies() {
        let v = InteractionModel::strauss(0.5, 0.5).unwrap();
        let w = window(100);
        let mut pts: Vec<Vec<f64>> = vec![
            vec![0.0, 0.0],
            vec![0.2, 0.1],
            vec![-0.2, 0.3],
            vec![4.0, 4.0], // far point
        ];
        let cfg = Configuration::new(w, &pts).unwrap();
        let before: Vec<_> = (0..3)
            .map(|i| crate::interaction::eval_interaction(&v, &cfg, i).unwrap())
            .collect();
        pts[3] = vec![-4.0, 2.0]; // still farther than 2r from the cluster
        let moved = Configuration::new(w, &pts).unwrap();
        for i in 0..3 {
            assert_eq!(
                before[i],
                crate::interaction::eval_interaction(&v, &moved, i).unwrap()
            );
        }
    }
}
