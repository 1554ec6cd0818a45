//! Periodic geometry of the sampling window: wraparound distances, periodized
//! balls and cubes, and the cell-list index behind all fixed-radius queries.
//!
//! Conventions, used everywhere downstream:
//! * the window is the half-open cube `[-w/2, w/2)^d`,
//! * balls are closed (`distance <= rho`),
//! * cubes are half-open on the upper faces (`z + [-s/2, s/2)^d`),
//! * query radii must satisfy `2*rho < w` so a periodized ball never
//!   self-overlaps; larger radii are rejected instead of multi-wrapped,
//! * point ids are array positions and every id list is sorted ascending.

use crate::errors::Error;
use crate::Result;

/// The centered cube `W_n` with side `w_n = (n/λ)^{1/d}`, so `|W_n| = n/λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusWindow {
    dim: usize,
    intensity: f64,
    point_budget: usize,
    side: f64,
}

impl TorusWindow {
    /// Window for `point_budget` points at intensity `lambda` in dimension
    /// `dim >= 2`.
    pub fn new(dim: usize, intensity: f64, point_budget: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::ConstraintViolated(format!(
                "dimension must be at least 2, got {dim}"
            )));
        }
        if !(intensity > 0.0) || !intensity.is_finite() {
            return Err(Error::ConstraintViolated(format!(
                "intensity must be positive and finite, got {intensity}"
            )));
        }
        if point_budget == 0 {
            return Err(Error::ConstraintViolated(
                "point budget must be at least 1".into(),
            ));
        }
        let volume = point_budget as f64 / intensity;
        let side = volume.powf(1.0 / dim as f64);
        Ok(Self {
            dim,
            intensity,
            point_budget,
            side,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    /// The number of points `n` the window was sized for.
    pub fn point_budget(&self) -> usize {
        self.point_budget
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn half_side(&self) -> f64 {
        0.5 * self.side
    }

    /// `|W_n| = n/λ`, computed directly from the defining ratio.
    pub fn volume(&self) -> f64 {
        self.point_budget as f64 / self.intensity
    }

    /// Does `x` lie in the half-open cube `[-w/2, w/2)^d`?
    pub fn contains(&self, x: &[f64]) -> bool {
        let h = self.half_side();
        x.len() == self.dim && x.iter().all(|&c| (-h..h).contains(&c))
    }

    /// Wrap a coordinate into `[-w/2, w/2)`.
    pub fn wrap_coord(&self, c: f64) -> f64 {
        let h = self.half_side();
        let wrapped = (c + h).rem_euclid(self.side) - h;
        // rem_euclid may return exactly `side` after rounding near 0^-.
        if wrapped >= h {
            -h
        } else {
            wrapped
        }
    }

    /// Wrap every coordinate of `x` into the window.
    pub fn wrap_point(&self, x: &mut [f64]) {
        for c in x.iter_mut() {
            *c = self.wrap_coord(*c);
        }
    }

    /// Minimal-image difference `a - b` for coordinates already inside the
    /// window; the result lies in `[-w/2, w/2]`.
    #[inline]
    pub(crate) fn wrapped_delta(&self, a: f64, b: f64) -> f64 {
        let mut d = a - b;
        let h = self.half_side();
        if d > h {
            d -= self.side;
        } else if d < -h {
            d += self.side;
        }
        d
    }

    /// Wraparound Euclidean distance; assumes both points inside the window.
    #[inline]
    pub(crate) fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let d = self.wrapped_delta(x[i], y[i]);
            acc += d * d;
        }
        acc.sqrt()
    }

    fn check_inside(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let h = self.half_side();
        for &c in x {
            if !(-h..h).contains(&c) {
                return Err(Error::PointOutsideWindow { coord: c, half: h });
            }
        }
        Ok(())
    }
}

/// Euclidean distance between two periodized points under coordinate-wise
/// wraparound. Errors if either point lies outside the window.
pub fn torus_distance(x: &[f64], y: &[f64], w: &TorusWindow) -> Result<f64> {
    w.check_inside(x)?;
    w.check_inside(y)?;
    Ok(w.distance(x, y))
}

/// Volume of the unit ball in dimension `d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let df = d as f64;
    std::f64::consts::PI.powf(df / 2.0) / statrs::function::gamma::gamma(df / 2.0 + 1.0)
}

/// A finite simple point set in a [`TorusWindow`], stored as a flat
/// coordinate array. Immutable once built; samplers mutate their own private
/// copies and export snapshots.
#[derive(Clone, Debug)]
pub struct Configuration {
    window: TorusWindow,
    coords: Vec<f64>,
}

impl Configuration {
    /// Build from per-point rows, validating that every coordinate lies in
    /// the half-open window and that the points are pairwise distinct.
    pub fn new(window: TorusWindow, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * window.dim());
        for p in points {
            if p.len() != window.dim() {
                return Err(Error::DimensionMismatch {
                    expected: window.dim(),
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(window, coords)
    }

    /// Build from a flat `n*d` coordinate array.
    pub fn from_flat(window: TorusWindow, coords: Vec<f64>) -> Result<Self> {
        let d = window.dim();
        if coords.len() % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: coords.len() % d,
            });
        }
        for p in coords.chunks_exact(d) {
            window.check_inside(p)?;
        }
        let cfg = Self { window, coords };
        cfg.check_simple()?;
        Ok(cfg)
    }

    pub(crate) fn from_flat_unchecked(window: TorusWindow, coords: Vec<f64>) -> Self {
        debug_assert_eq!(coords.len() % window.dim(), 0);
        Self { window, coords }
    }

    /// Distinctness of the support: exact coordinate duplicates are rejected
    /// (a simple counting measure has no multiple points).
    fn check_simple(&self) -> Result<()> {
        let d = self.window.dim();
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            self.point(a)
                .partial_cmp(self.point(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for pair in order.windows(2) {
            if self.point(pair[0]) == self.point(pair[1]) {
                return Err(Error::ConstraintViolated(format!(
                    "points {} and {} coincide; configurations must be simple",
                    pair[0], pair[1]
                )));
            }
        }
        let _ = d;
        Ok(())
    }

    pub fn window(&self) -> &TorusWindow {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.window.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, id: usize) -> &[f64] {
        let d = self.window.dim();
        &self.coords[id * d..(id + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.window.dim())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Ids of points within closed torus distance `rho` of `center`,
    /// ascending, by direct scan.
    pub(crate) fn ball_ids_brute(&self, center: &[f64], rho: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.window.distance(self.point(i), center) <= rho)
            .collect()
    }
}

/// Ids of all configuration points inside the periodized closed ball
/// `b^{(n)}(center, rho)`. The center is taken modulo the torus; the focal
/// point itself is included when it belongs to the configuration.
pub fn periodic_ball_points(omega: &Configuration, center: &[f64], rho: f64) -> Result<Vec<usize>> {
    let w = omega.window();
    if !(rho > 0.0) {
        return Err(Error::ConstraintViolated(format!(
            "ball radius must be positive, got {rho}"
        )));
    }
    if 2.0 * rho >= w.side() {
        return Err(Error::RadiusTooLarge {
            radius: rho,
            side: w.side(),
        });
    }
    if center.len() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: center.len(),
        });
    }
    let mut c = center.to_vec();
    w.wrap_point(&mut c);
    if omega.len() >= 64 {
        let idx = CellIndex::build(omega, rho)?;
        Ok(idx.ball_ids(omega, &c, rho))
    } else {
        Ok(omega.ball_ids_brute(&c, rho))
    }
}

/// Number of points in the periodized half-open cube `center + [-s/2, s/2)^d`.
pub fn periodic_cube_count(omega: &Configuration, center: &[f64], s: f64) -> Result<usize> {
    let w = omega.window();
    if !(s > 0.0) {
        return Err(Error::ConstraintViolated(format!(
            "cube side must be positive, got {s}"
        )));
    }
    if s > w.side() {
        return Err(Error::SideTooLarge {
            cube_side: s,
            side: w.side(),
        });
    }
    if center.len() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: center.len(),
        });
    }
    let mut c = center.to_vec();
    w.wrap_point(&mut c);
    let half = 0.5 * s;
    let count = omega
        .points()
        .filter(|p| {
            (0..w.dim()).all(|i| {
                let rel = w.wrapped_delta(p[i], c[i]);
                (-half..half).contains(&rel)
            })
        })
        .count();
    Ok(count)
}

/// Uniform-grid cell list over the torus. Each point lives in exactly one
/// cell; a ball query of radius `rho <= cell_side` inspects at most `3^d`
/// cells (fewer when the grid has fewer cells per axis).
#[derive(Clone, Debug)]
pub struct CellIndex {
    dim: usize,
    side: f64,
    cells_per_axis: usize,
    cell_side: f64,
    buckets: Vec<Vec<usize>>,
}

impl CellIndex {
    /// Build an index whose cells are at least `min_cell_side` wide.
    pub fn build(cfg: &Configuration, min_cell_side: f64) -> Result<Self> {
        let w = cfg.window();
        if !(min_cell_side > 0.0) || !min_cell_side.is_finite() {
            return Err(Error::ConstraintViolated(format!(
                "cell side must be positive and finite, got {min_cell_side}"
            )));
        }
        let cells_per_axis = ((w.side() / min_cell_side).floor() as usize).max(1);
        let cell_side = w.side() / cells_per_axis as f64;
        let n_cells = cells_per_axis.pow(w.dim() as u32);
        let mut idx = Self {
            dim: w.dim(),
            side: w.side(),
            cells_per_axis,
            cell_side,
            buckets: vec![Vec::new(); n_cells],
        };
        for i in 0..cfg.len() {
            let b = idx.bucket_of(cfg.point(i));
            idx.buckets[b].push(i);
        }
        Ok(idx)
    }

    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    #[inline]
    fn axis_cell(&self, coord: f64) -> usize {
        let h = 0.5 * self.side;
        let t = ((coord + h) / self.cell_side) as isize;
        (t.clamp(0, self.cells_per_axis as isize - 1)) as usize
    }

    #[inline]
    fn bucket_of(&self, p: &[f64]) -> usize {
        let mut b = 0usize;
        for i in 0..self.dim {
            b = b * self.cells_per_axis + self.axis_cell(p[i]);
        }
        b
    }

    /// Ids of points within closed torus distance `rho` of `center`
    /// (ascending). `center` must already lie inside the window.
    pub fn ball_ids(&self, cfg: &Configuration, center: &[f64], rho: f64) -> Vec<usize> {
        self.ball_ids_raw(cfg.coords(), cfg.window(), center, rho)
    }

    /// Same query over a raw flat coordinate buffer (the MCMC state mutates
    /// its own buffer and keeps this index in sync).
    pub(crate) fn ball_ids_raw(
        &self,
        coords: &[f64],
        w: &TorusWindow,
        center: &[f64],
        rho: f64,
    ) -> Vec<usize> {
        let reach = (rho / self.cell_side).ceil() as isize;
        let m = self.cells_per_axis as isize;
        let mut cells = Vec::new();
        let base: Vec<isize> = (0..self.dim)
            .map(|i| self.axis_cell(center[i]) as isize)
            .collect();
        // Enumerate the (2*reach+1)^d offset cube, wrapping cell coordinates.
        let width = (2 * reach + 1) as usize;
        let total = width.pow(self.dim as u32);
        for code in 0..total {
            let mut c = code;
            let mut bucket = 0usize;
            for i in 0..self.dim {
                let off = (c % width) as isize - reach;
                c /= width;
                let cell = (base[i] + off).rem_euclid(m) as usize;
                bucket = bucket * self.cells_per_axis + cell;
            }
            cells.push(bucket);
        }
        cells.sort_unstable();
        cells.dedup();
        let d = self.dim;
        let mut out = Vec::new();
        for b in cells {
            for &i in &self.buckets[b] {
                if w.distance(&coords[i * d..(i + 1) * d], center) <= rho {
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Visit the ids of all points within closed torus distance `rho` of
    /// `center` without allocating. Visit order follows the bucket layout,
    /// which is deterministic for a given insertion history.
    pub(crate) fn for_each_in_ball<F: FnMut(usize)>(
        &self,
        coords: &[f64],
        w: &TorusWindow,
        center: &[f64],
        rho: f64,
        mut visit: F,
    ) {
        let d = self.dim;
        let reach = (rho / self.cell_side).ceil() as isize;
        let width = 2 * reach + 1;
        let m = self.cells_per_axis as isize;
        if width >= m {
            // Few cells per axis: every bucket is in range anyway.
            for bucket in &self.buckets {
                for &i in bucket {
                    if w.distance(&coords[i * d..(i + 1) * d], center) <= rho {
                        visit(i);
                    }
                }
            }
            return;
        }
        // Offsets within ±reach < m hit pairwise distinct cells, so no
        // dedup pass is needed on this path.
        let total = (width as usize).pow(d as u32);
        for code in 0..total {
            let mut c = code;
            let mut bucket = 0usize;
            for k in 0..d {
                let off = (c % width as usize) as isize - reach;
                c /= width as usize;
                let base = self.axis_cell(center[k]) as isize;
                let cell = (base + off).rem_euclid(m) as usize;
                bucket = bucket * self.cells_per_axis + cell;
            }
            for &i in &self.buckets[bucket] {
                if w.distance(&coords[i * d..(i + 1) * d], center) <= rho {
                    visit(i);
                }
            }
        }
    }

    /// Relocate point `id` from `old_pos` to `new_pos` (both inside the
    /// window). Used by the single-owner MCMC state.
    pub(crate) fn move_point(&mut self, id: usize, old_pos: &[f64], new_pos: &[f64]) {
        let from = self.bucket_of(old_pos);
        let to = self.bucket_of(new_pos);
        if from == to {
            return;
        }
        let slot = self.buckets[from]
            .iter()
            .position(|&j| j == id)
            .expect("point id missing from its cell bucket");
        self.buckets[from].swap_remove(slot);
        self.buckets[to].push(id);
    }
}

/// The local neighborhood `(ω - x) ∩ b(0, radius)` seen by an interaction or
/// score evaluation: relative displacement vectors of the neighbors, plus
/// whether the origin itself carries a point of the configuration.
///
/// `wrap = Some(side)` means displacements came from the periodized
/// configuration and distances between neighbors must wrap again; `None`
/// means plain Euclidean geometry (boundary-condition Hamiltonians).
#[derive(Clone, Debug)]
pub struct LocalView {
    pub(crate) dim: usize,
    pub(crate) rel: Vec<f64>,
    pub(crate) origin_present: bool,
    pub(crate) wrap: Option<f64>,
}

impl LocalView {
    pub(crate) fn new(dim: usize, origin_present: bool, wrap: Option<f64>) -> Self {
        Self {
            dim,
            rel: Vec::new(),
            origin_present,
            wrap,
        }
    }

    /// Reset for reuse as a scratch buffer.
    pub(crate) fn reset(&mut self, dim: usize, origin_present: bool, wrap: Option<f64>) {
        self.dim = dim;
        self.origin_present = origin_present;
        self.wrap = wrap;
        self.rel.clear();
    }

    pub(crate) fn push(&mut self, rel: &[f64]) {
        self.rel.extend_from_slice(rel);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Does the view contain the origin point itself?
    pub fn origin_present(&self) -> bool {
        self.origin_present
    }

    /// Number of neighbors (origin excluded).
    pub fn neighbor_count(&self) -> usize {
        self.rel.len() / self.dim
    }

    pub fn neighbor(&self, i: usize) -> &[f64] {
        &self.rel[i * self.dim..(i + 1) * self.dim]
    }

    pub fn neighbors(&self) -> impl Iterator<Item = &[f64]> {
        self.rel.chunks_exact(self.dim)
    }

    /// Distance of neighbor `i` from the origin.
    pub fn dist_to_origin(&self, i: usize) -> f64 {
        self.neighbor(i).iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Number of neighbors within closed distance `r` of the origin.
    pub fn count_within(&self, r: f64) -> usize {
        (0..self.neighbor_count())
            .filter(|&i| self.dist_to_origin(i) <= r)
            .count()
    }

    /// Distance between neighbors `i` and `j`, wrapping when the view is
    /// periodic.
    pub fn dist_between(&self, i: usize, j: usize) -> f64 {
        let a = self.neighbor(i);
        let b = self.neighbor(j);
        let mut acc = 0.0;
        for k in 0..self.dim {
            let mut d = a[k] - b[k];
            if let Some(side) = self.wrap {
                if d > 0.5 * side {
                    d -= side;
                } else if d < -0.5 * side {
                    d += side;
                }
            }
            acc += d * d;
        }
        acc.sqrt()
    }
}
