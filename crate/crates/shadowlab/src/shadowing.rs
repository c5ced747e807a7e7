//! Searching for method trajectories that track exact orbits.
//!
//! Given an exact orbit {x_k} of a base map and a d-method {g_k}, the central
//! question is how closely some method trajectory y_{k+1} = g_k(y_k) can
//! follow it in the sup metric. Two complementary tools answer it:
//!
//! * [`best_shadow`] — multi-resolution grid search over initial points,
//!   refined around the incumbent. Returns an upper bound on the true
//!   minimal sup-distance; refinement never increases it. When the base map
//!   is a hyperbolic toral automorphism the tracer's output is included as a
//!   search candidate, so the search is never worse than the tracer.
//! * [`hyperbolic_trace`] — for hyperbolic toral automorphisms, constructs a
//!   tracking trajectory directly by solving the linearized correction
//!   equation along stable and unstable eigendirections with geometric-series
//!   sums, then polishing by fixed-point iteration. The result stays within
//!   `tracing_constant() · d_bound` of the orbit.
//!
//! On top of these sit set estimators: which sampled points can be traced by
//! every method of a pool at tolerance ε ([`estimate_phi`]), and down to which
//! method bound d a point survives the pool ([`estimate_psi`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::methods::{Method, Trajectory};
use crate::space::{norm, Point, Space};
use crate::systems::MapSystem;

/// Residual target for the tracer's fixed-point polish.
const TRACE_RESIDUAL_TOL: f64 = 1e-11;
const TRACE_MAX_PASSES: usize = 64;

/// Parameters of the multi-resolution initial-point search.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Number of forward steps compared (the window is `[0, horizon]` for
    /// forward trajectories).
    pub horizon: i64,
    /// Grid points per axis at every level.
    pub resolution: usize,
    /// Refinement levels after the global pass.
    pub levels: usize,
    /// Grid spacing shrink factor between levels.
    pub shrink: f64,
    /// Seed the candidate set with the hyperbolic tracer's trajectory when
    /// the base map supports it.
    pub use_tracer_seed: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            horizon: 200,
            resolution: 64,
            levels: 3,
            shrink: 8.0,
            use_tracer_seed: true,
        }
    }
}

impl SearchConfig {
    fn validate(&self, space: &Space) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::InvalidInput("search horizon must be ≥ 1".into()));
        }
        if self.resolution < 2 || self.shrink <= 1.0 {
            return Err(Error::InvalidInput(
                "search needs resolution ≥ 2 and shrink > 1".into(),
            ));
        }
        let total = (self.resolution as f64).powi(space.dim() as i32);
        if total > crate::space::MAX_GRID_POINTS as f64 {
            return Err(Error::ResourceLimit(format!(
                "search grid {}^{} too large",
                self.resolution,
                space.dim()
            )));
        }
        Ok(())
    }
}

/// Outcome of a shadowing search.
#[derive(Debug, Clone)]
pub struct ShadowReport {
    /// Smallest sup-distance found over the window; an upper bound on the
    /// true minimum.
    pub sup_distance: f64,
    /// Initial point of the best trajectory.
    pub best_initial: Point,
    /// Compared index window `[lo, hi]`.
    pub window: (i64, i64),
    pub refinement_levels: usize,
    pub method_descriptor: String,
    /// The best trajectory itself.
    pub trajectory: Trajectory,
    /// Largest per-step defect `dist(y_{k+1}, g_k(y_k))` of the reported
    /// trajectory (zero for trajectories generated by stepping, tiny for
    /// tracer output).
    pub residual: f64,
}

/// Evaluate a stepped candidate with early abandoning.
///
/// Returns the sup-distance over the window and the trajectory, or `None` as
/// soon as the running sup strictly exceeds `incumbent`. Chart exits before
/// the end of the window are penalized with the space diameter.
fn evaluate_candidate(
    m: &Method,
    x_traj: &Trajectory,
    window: (i64, i64),
    y0: &Point,
    incumbent: f64,
) -> Result<Option<(f64, Trajectory)>> {
    let space = m.space();
    let (lo, hi) = window;
    let mut sup = 0.0f64;

    let mut backward: Vec<Point> = Vec::new();
    let start = space.normalize(y0)?.point;
    if lo < 0 {
        let whole = m.trajectory(&start, lo, 0)?;
        for k in lo..0 {
            backward.push(whole.point_at(k).unwrap().clone());
        }
        for (k, y) in (lo..0).zip(backward.iter()) {
            sup = sup.max(space.dist(y, x_traj.point_at(k).unwrap())?);
        }
        if sup > incumbent {
            return Ok(None);
        }
    }

    let mut points = backward;
    points.push(start.clone());
    sup = sup.max(space.dist(&start, x_traj.point_at(0).unwrap())?);
    if sup > incumbent {
        return Ok(None);
    }
    let mut exit_index = None;
    let mut cursor = start;
    for k in 0..hi {
        let step = m.step(k, &cursor)?;
        cursor = step.point.clone();
        points.push(step.point);
        sup = sup.max(space.dist(&cursor, x_traj.point_at(k + 1).unwrap())?);
        if step.clamped && k + 1 < hi {
            sup = sup.max(space.diameter());
            exit_index = Some(k + 1);
        }
        if sup > incumbent || exit_index.is_some() {
            break;
        }
    }
    if sup > incumbent {
        return Ok(None);
    }
    Ok(Some((sup, Trajectory::new(lo, points, exit_index))))
}

/// Search for the method trajectory closest to `x_traj` in sup-distance.
///
/// The candidate set at the global level is the full grid plus the orbit's
/// own initial point plus (for hyperbolic base maps) the tracer's output;
/// each refinement level re-grids around the incumbent with spacing shrunk by
/// `search.shrink`. Ties are broken toward the lexicographically smallest
/// initial point. The reported sup-distance is recomputed from the stored
/// trajectory before returning.
pub fn best_shadow(
    x_traj: &Trajectory,
    m: &Method,
    search: &SearchConfig,
) -> Result<ShadowReport> {
    let space = m.space().clone();
    search.validate(&space)?;
    let lo = x_traj.n_from();
    let hi = x_traj.n_to().min(search.horizon);
    if lo > 0 || hi < 1 {
        return Err(Error::InvalidInput(format!(
            "shadow window [{lo}, {hi}] must contain [0, 1]"
        )));
    }
    if lo < 0 && !m.invertible() {
        return Err(Error::Unsupported(
            "two-sided shadow search needs an invertible constant method".into(),
        ));
    }

    let mut best: Option<(f64, Point, Trajectory)> = None;
    let consider = |sup: f64, y0: Point, traj: Trajectory, best: &mut Option<(f64, Point, Trajectory)>| {
        let replace = match best {
            None => true,
            Some((bs, by0, _)) => {
                sup < *bs || (sup == *bs && y0.lex_cmp(by0) == std::cmp::Ordering::Less)
            }
        };
        if replace {
            *best = Some((sup, y0, traj));
        }
    };

    // Seed candidates: the orbit's own start, and the tracer when available.
    let x0 = x_traj.point_at(0).unwrap().clone();
    if let Some((sup, traj)) = evaluate_candidate(m, x_traj, (lo, hi), &x0, f64::INFINITY)? {
        consider(sup, x0, traj, &mut best);
    }
    if search.use_tracer_seed && lo == 0 && m.base().hyperbolic_data().is_some() {
        if let Ok(traced) = hyperbolic_trace(m.base(), m, x_traj) {
            let sup = traced.sup_distance(x_traj, &space)?;
            let y0 = traced.point_at(0).unwrap().clone();
            consider(sup, y0, traced, &mut best);
        }
    }

    // Level 0: global grid.
    for y0 in space.grid(search.resolution)? {
        let incumbent = best.as_ref().map_or(f64::INFINITY, |(s, _, _)| *s);
        if let Some((sup, traj)) = evaluate_candidate(m, x_traj, (lo, hi), &y0, incumbent)? {
            consider(sup, y0, traj, &mut best);
        }
    }

    // Refinement levels around the incumbent.
    let extent: Vec<f64> = match &space {
        Space::Chart { bounds } => bounds.iter().map(|b| b[1] - b[0]).collect(),
        _ => vec![1.0; space.dim()],
    };
    for level in 1..=search.levels {
        let center = best.as_ref().expect("search always has candidates").1.clone();
        let spacing: Vec<f64> = extent
            .iter()
            .map(|e| e / search.resolution as f64 / search.shrink.powi(level as i32))
            .collect();
        let half = search.resolution as i64 / 2;
        let mut offsets = vec![Vec::with_capacity(search.resolution); space.dim()];
        for (ax, list) in offsets.iter_mut().enumerate() {
            for i in 0..search.resolution as i64 {
                list.push((i - half) as f64 * spacing[ax]);
            }
        }
        let mut index = vec![0usize; space.dim()];
        'grid: loop {
            let v: Vec<f64> = index
                .iter()
                .enumerate()
                .map(|(ax, &i)| offsets[ax][i])
                .collect();
            let y0 = space.normalize(&Point(
                center
                    .coords()
                    .iter()
                    .zip(v.iter())
                    .map(|(&c, &o)| c + o)
                    .collect(),
            ))?;
            let incumbent = best.as_ref().map_or(f64::INFINITY, |(s, _, _)| *s);
            if let Some((sup, traj)) =
                evaluate_candidate(m, x_traj, (lo, hi), &y0.point, incumbent)?
            {
                consider(sup, y0.point, traj, &mut best);
            }
            let mut ax = space.dim();
            loop {
                if ax == 0 {
                    break 'grid;
                }
                ax -= 1;
                index[ax] += 1;
                if index[ax] < search.resolution {
                    break;
                }
                index[ax] = 0;
            }
        }
    }

    let (_, best_initial, trajectory) = best.expect("search always has candidates");
    // Independent recomputation from the stored trajectory.
    let sup_distance = trajectory.sup_distance(x_traj, &space)?;
    let mut residual = 0.0f64;
    for k in 0.max(lo)..trajectory.n_to() {
        let stepped = m.step(k, trajectory.point_at(k).unwrap())?.point;
        residual = residual.max(space.dist(&stepped, trajectory.point_at(k + 1).unwrap())?);
    }
    Ok(ShadowReport {
        sup_distance,
        best_initial,
        window: (lo, hi),
        refinement_levels: search.levels,
        method_descriptor: m.descriptor(),
        trajectory,
        residual,
    })
}

/// Construct a tracking method trajectory for a hyperbolic toral
/// automorphism by stable/unstable geometric-series corrections.
///
/// Writes y_k = x_k + e_k and solves the linear correction recursion
/// e_{k+1} = A·e_k + w_k, where w_k is the method's defect along the current
/// guess, with the bounded-solution boundary conditions: zero stable
/// component at the start, zero unstable component at the end. Defects are
/// re-evaluated and the solve repeated until every step satisfies
/// `dist(y_{k+1}, g_k(y_k)) ≤ 1e−11`.
///
/// The construction keeps `sup_k dist(y_k, x_k)` within
/// `tracing_constant() · d_bound` for orthogonal eigenbases.
pub fn hyperbolic_trace(f: &MapSystem, m: &Method, x_traj: &Trajectory) -> Result<Trajectory> {
    let h = f
        .hyperbolic_data()
        .ok_or_else(|| Error::Unsupported(format!("{} has no hyperbolic structure", f.name())))?
        .clone();
    let a = f
        .linear_matrix()
        .ok_or_else(|| Error::Unsupported("tracer needs a linear toral map".into()))?;
    if m.base() != f {
        return Err(Error::InvalidInput(
            "method must perturb the traced map".into(),
        ));
    }
    if x_traj.n_from() != 0 || x_traj.n_to() < 1 {
        return Err(Error::InvalidInput(
            "tracer needs a forward window [0, n] with n ≥ 1".into(),
        ));
    }
    let space = f.space().clone();
    let n = x_traj.n_to() as usize;
    let xs = x_traj.points();

    // Dual basis: components of w in the (v_s, v_u) frame.
    let det = h.v_s[0] * h.v_u[1] - h.v_s[1] * h.v_u[0];
    if det.abs() < 1e-9 {
        return Err(Error::InvalidInput("degenerate eigenbasis".into()));
    }
    let comp = |w: [f64; 2]| -> (f64, f64) {
        (
            (w[0] * h.v_u[1] - w[1] * h.v_u[0]) / det,
            (h.v_s[0] * w[1] - h.v_s[1] * w[0]) / det,
        )
    };

    let mut e = vec![[0.0f64; 2]; n + 1];
    let mut last_residual = f64::INFINITY;
    for _pass in 0..TRACE_MAX_PASSES {
        // Defects of the current guess: T_k = lift(g_k(y_k) − x_{k+1}),
        // w_k = T_k − A·e_k so that the fixed point satisfies e_{k+1} = T_k.
        let mut ws = vec![0.0f64; n];
        let mut wu = vec![0.0f64; n];
        for k in 0..n {
            let y_k = space.translate(&xs[k], &e[k])?.point;
            let g_y = m.step(k as i64, &y_k)?.point;
            let t = space.displacement(&xs[k + 1], &g_y)?;
            let ae = [
                a[0][0] * e[k][0] + a[0][1] * e[k][1],
                a[1][0] * e[k][0] + a[1][1] * e[k][1],
            ];
            let w = [t[0] - ae[0], t[1] - ae[1]];
            let (s, u) = comp(w);
            ws[k] = s;
            wu[k] = u;
        }

        // Bounded solve: stable forward from 0, unstable backward from 0.
        let mut es = vec![0.0f64; n + 1];
        let mut eu = vec![0.0f64; n + 1];
        for k in 0..n {
            es[k + 1] = h.lambda_s * es[k] + ws[k];
        }
        for k in (0..n).rev() {
            eu[k] = (eu[k + 1] - wu[k]) / h.lambda_u;
        }
        for k in 0..=n {
            e[k] = [
                es[k] * h.v_s[0] + eu[k] * h.v_u[0],
                es[k] * h.v_s[1] + eu[k] * h.v_u[1],
            ];
            if norm(&e[k]) > 0.25 {
                return Err(Error::Convergence {
                    residual: norm(&e[k]),
                    context: "tracer correction left the linearization range".into(),
                });
            }
        }

        // Residual of the updated trajectory.
        let mut residual = 0.0f64;
        for k in 0..n {
            let y_k = space.translate(&xs[k], &e[k])?.point;
            let y_next = space.translate(&xs[k + 1], &e[k + 1])?.point;
            let g_y = m.step(k as i64, &y_k)?.point;
            residual = residual.max(space.dist(&y_next, &g_y)?);
        }
        if residual <= TRACE_RESIDUAL_TOL {
            let points = (0..=n)
                .map(|k| Ok(space.translate(&xs[k], &e[k])?.point))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Trajectory::new(0, points, None));
        }
        if residual >= last_residual {
            return Err(Error::Convergence {
                residual,
                context: "tracer fixed-point iteration stalled".into(),
            });
        }
        last_residual = residual;
    }
    Err(Error::Convergence {
        residual: last_residual,
        context: "tracer exceeded the pass budget".into(),
    })
}

/// First time k ≥ 1 at which the method trajectory from `y0` leaves the open
/// ε-ball around `center`, within the horizon.
pub fn first_exit_time(
    m: &Method,
    y0: &Point,
    center: &Point,
    epsilon: f64,
    horizon: i64,
) -> Result<Option<i64>> {
    if epsilon <= 0.0 || horizon < 1 {
        return Err(Error::InvalidInput(
            "exit time needs ε > 0 and horizon ≥ 1".into(),
        ));
    }
    let space = m.space();
    let mut cursor = space.normalize(y0)?.point;
    for k in 1..=horizon {
        cursor = m.step(k - 1, &cursor)?.point;
        if space.dist(&cursor, center)? > epsilon {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// A sample defeated by an adversary, with enough data to replay the defeat.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefeatWitness {
    pub method_index: usize,
    pub method: String,
    pub sup_distance: f64,
}

/// Which sampled points every adversary can trace within ε.
#[derive(Debug, Clone)]
pub struct PhiEstimate {
    pub epsilon: f64,
    pub d: f64,
    pub samples: Vec<Point>,
    pub methods: Vec<String>,
    /// Per sample: true iff every adversary found a trajectory within ε.
    pub member_flags: Vec<bool>,
    /// Per sample: the first defeating adversary, if any.
    pub witnesses: Vec<Option<DefeatWitness>>,
    /// Per sample: the worst best-shadow sup-distance seen over the
    /// adversaries that were run.
    pub worst_sup: Vec<f64>,
}

/// Estimate which samples lie in the ε-traceable set for every adversary.
///
/// Adversary bounds must not exceed `d`. Membership flags are evidence (the
/// searches are truncated and gridded); a false flag is a certificate,
/// reproducible from its witness.
pub fn estimate_phi(
    f: &MapSystem,
    epsilon: f64,
    d: f64,
    samples: &[Point],
    adversaries: &[Method],
    search: &SearchConfig,
) -> Result<PhiEstimate> {
    if epsilon <= 0.0 || d < 0.0 {
        return Err(Error::InvalidInput("need ε > 0 and d ≥ 0".into()));
    }
    if samples.is_empty() || adversaries.is_empty() {
        return Err(Error::InvalidInput(
            "need at least one sample and one adversary".into(),
        ));
    }
    for (i, m) in adversaries.iter().enumerate() {
        if m.space() != f.space() {
            return Err(Error::InvalidInput(format!(
                "adversary {i} lives on a different space"
            )));
        }
        if m.d_bound() > d * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::InvalidInput(format!(
                "adversary {i} has bound {} beyond d = {d}",
                m.d_bound()
            )));
        }
    }

    let mut member_flags = Vec::with_capacity(samples.len());
    let mut witnesses = Vec::with_capacity(samples.len());
    let mut worst_sup = Vec::with_capacity(samples.len());
    for sample in samples {
        let x_traj = f.orbit(sample, 0, search.horizon)?;
        let mut flag = true;
        let mut witness = None;
        let mut worst = 0.0f64;
        for (i, m) in adversaries.iter().enumerate() {
            let report = best_shadow(&x_traj, m, search)?;
            worst = worst.max(report.sup_distance);
            if report.sup_distance > epsilon {
                flag = false;
                witness = Some(DefeatWitness {
                    method_index: i,
                    method: report.method_descriptor.clone(),
                    sup_distance: report.sup_distance,
                });
                break;
            }
        }
        member_flags.push(flag);
        witnesses.push(witness);
        worst_sup.push(worst);
    }
    Ok(PhiEstimate {
        epsilon,
        d,
        samples: samples.to_vec(),
        methods: adversaries.iter().map(|m| m.descriptor()).collect(),
        member_flags,
        witnesses,
        worst_sup,
    })
}

/// The default adversary pool at a given bound d.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PoolSpec {
    /// Include the unperturbed base map.
    pub include_exact: bool,
    /// Include ±d drifts along every axis.
    pub include_drift: bool,
    /// Include a single-step offset of size d at step 0.
    pub include_one_shot: bool,
    /// Seeds for bounded random fields.
    pub random_seeds: Vec<u64>,
    /// Lattice resolution of the random fields.
    pub field_resolution: usize,
}

impl Default for PoolSpec {
    fn default() -> Self {
        PoolSpec {
            include_exact: true,
            include_drift: true,
            include_one_shot: true,
            random_seeds: vec![1, 2, 3],
            field_resolution: crate::methods::RANDOM_FIELD_RESOLUTION,
        }
    }
}

impl PoolSpec {
    /// Materialize the pool around `f` with bound `d`.
    pub fn materialize(&self, f: &MapSystem, d: f64) -> Result<Vec<Method>> {
        if d < 0.0 || !d.is_finite() {
            return Err(Error::InvalidInput(format!("pool bound {d} invalid")));
        }
        let mut pool = Vec::new();
        if self.include_exact {
            pool.push(Method::exact(f.clone()));
        }
        if self.include_drift && d > 0.0 {
            for axis in 0..f.space().dim() {
                pool.push(Method::drift(f.clone(), d, axis)?);
                pool.push(Method::drift(f.clone(), -d, axis)?);
            }
        }
        if self.include_one_shot && d > 0.0 {
            let mut offset = vec![0.0; f.space().dim()];
            offset[0] = d;
            pool.push(Method::one_shot(f.clone(), 0, offset)?);
        }
        for &seed in &self.random_seeds {
            if d > 0.0 {
                pool.push(Method::random_bounded_with_resolution(
                    f.clone(),
                    d,
                    seed,
                    self.field_resolution,
                )?);
            }
        }
        if pool.is_empty() {
            pool.push(Method::exact(f.clone()));
        }
        Ok(pool)
    }
}

/// Outcome for one sample at one ladder level.
#[derive(Debug, Clone)]
pub struct LevelOutcome {
    pub d: f64,
    /// The defeating adversary, if the sample was defeated at this level.
    pub defeated: Option<DefeatWitness>,
}

#[derive(Debug, Clone)]
pub struct PsiSample {
    pub point: Point,
    /// Largest ladder bound at which no adversary defeats the sample, if any.
    pub best_d: Option<f64>,
    pub levels: Vec<LevelOutcome>,
}

/// Ladder scan: down to which method bound each sample survives the pool.
#[derive(Debug, Clone)]
pub struct PsiEstimate {
    pub epsilon: f64,
    pub d_ladder: Vec<f64>,
    pub samples: Vec<PsiSample>,
}

/// For each sample, find the largest ladder bound d at which every adversary
/// of the pool can trace its orbit within ε; record a defeat witness for
/// every level where one exists.
pub fn estimate_psi(
    f: &MapSystem,
    samples: &[Point],
    epsilon: f64,
    d_ladder: &[f64],
    pool: &PoolSpec,
    search: &SearchConfig,
) -> Result<PsiEstimate> {
    if d_ladder.is_empty() || d_ladder.iter().any(|&d| d <= 0.0) {
        return Err(Error::InvalidInput(
            "d ladder must be nonempty and positive".into(),
        ));
    }
    if d_ladder.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidInput("d ladder must be strictly decreasing".into()));
    }
    let mut out = Vec::with_capacity(samples.len());
    for sample in samples {
        let mut levels = Vec::with_capacity(d_ladder.len());
        let mut best_d = None;
        for &d in d_ladder {
            let adversaries = pool.materialize(f, d)?;
            let phi = estimate_phi(f, epsilon, d, std::slice::from_ref(sample), &adversaries, search)?;
            let defeated = phi.witnesses[0].clone();
            if defeated.is_none() && best_d.is_none() {
                best_d = Some(d);
            }
            levels.push(LevelOutcome { d, defeated });
        }
        out.push(PsiSample {
            point: sample.clone(),
            best_d,
            levels,
        });
    }
    Ok(PsiEstimate {
        epsilon,
        d_ladder: d_ladder.to_vec(),
        samples: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::Method;
    use crate::systems::{degenerate_circle_line, rotation, toral_auto_default};

    fn pt(coords: &[f64]) -> Point {
        Point(coords.to_vec())
    }

    fn quick_search(horizon: i64) -> SearchConfig {
        SearchConfig {
            horizon,
            resolution: 16,
            levels: 2,
            shrink: 8.0,
            use_tracer_seed: true,
        }
    }

    #[test]
    fn exact_method_shadows_itself() {
        let f = toral_auto_default();
        let m = Method::exact(f.clone());
        let x = f.orbit(&pt(&[0.37, 0.81]), 0, 30).unwrap();
        let report = best_shadow(&x, &m, &quick_search(30)).unwrap();
        assert!(report.sup_distance < 1e-10, "sup {}", report.sup_distance);
        assert!(report.residual < 1e-12);
        assert!(f.space().dist(&report.best_initial, &pt(&[0.37, 0.81])).unwrap() < 1e-10);
    }

    #[test]
    fn refinement_never_increases_sup() {
        let f = rotation(0.3).unwrap();
        let m = Method::drift(f.clone(), 1e-3, 0).unwrap();
        let x = f.orbit(&pt(&[0.123]), 0, 40).unwrap();
        let mut sups = Vec::new();
        for levels in 0..4 {
            let cfg = SearchConfig {
                horizon: 40,
                resolution: 16,
                levels,
                shrink: 8.0,
                use_tracer_seed: false,
            };
            sups.push(best_shadow(&x, &m, &cfg).unwrap().sup_distance);
        }
        for w in sups.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "sups not monotone: {sups:?}");
        }
    }

    #[test]
    fn drift_from_fixed_circle_cannot_be_shadowed() {
        // The drifted u-coordinate sweeps an interval of length horizon·δ
        // regardless of the initial point, so the sup-distance to the fixed
        // point is at least half the sweep.
        let f = degenerate_circle_line(0.5).unwrap();
        let m = Method::drift(f.clone(), 1e-3, 0).unwrap();
        let x = f.orbit(&pt(&[0.5, 0.0]), 0, 100).unwrap();
        let report = best_shadow(&x, &m, &quick_search(100)).unwrap();
        assert!(
            report.sup_distance >= 0.05 - 1e-9,
            "sup {}",
            report.sup_distance
        );
        assert!(report.sup_distance <= 0.07, "sup {}", report.sup_distance);
    }

    #[test]
    fn tracer_reproduces_exact_orbit_for_exact_method() {
        let f = toral_auto_default();
        let m = Method::exact(f.clone());
        let x = f.orbit(&pt(&[0.21, 0.43]), 0, 50).unwrap();
        let y = hyperbolic_trace(&f, &m, &x).unwrap();
        assert!(y.sup_distance(&x, f.space()).unwrap() < 1e-12);
    }

    #[test]
    fn tracer_tracks_drift_within_constant() {
        let f = toral_auto_default();
        let d = 1e-3;
        let c = f.hyperbolic_data().unwrap().tracing_constant();
        let m = Method::drift(f.clone(), d, 0).unwrap();
        let x = f.orbit(&pt(&[0.11, 0.64]), 0, 100).unwrap();
        let y = hyperbolic_trace(&f, &m, &x).unwrap();
        let sup = y.sup_distance(&x, f.space()).unwrap();
        assert!(sup <= c * d + 1e-12, "sup {sup} > C·d {}", c * d);
        // Every step obeys the method relation.
        for k in 0..100i64 {
            let stepped = m.step(k, y.point_at(k).unwrap()).unwrap().point;
            let r = f.space().dist(&stepped, y.point_at(k + 1).unwrap()).unwrap();
            assert!(r < 1e-10, "residual {r} at step {k}");
        }
    }

    #[test]
    fn tracer_tracks_random_methods() {
        let f = toral_auto_default();
        let d = 1e-3;
        let c = f.hyperbolic_data().unwrap().tracing_constant();
        for seed in [5u64, 17, 99] {
            let m = Method::random_bounded(f.clone(), d, seed).unwrap();
            let x = f.orbit(&pt(&[0.31, 0.17]), 0, 120).unwrap();
            let y = hyperbolic_trace(&f, &m, &x).unwrap();
            let sup = y.sup_distance(&x, f.space()).unwrap();
            assert!(sup <= c * d, "seed {seed}: sup {sup}");
            let mut residual = 0.0f64;
            for k in 0..120i64 {
                let stepped = m.step(k, y.point_at(k).unwrap()).unwrap().point;
                residual = residual
                    .max(f.space().dist(&stepped, y.point_at(k + 1).unwrap()).unwrap());
            }
            assert!(residual <= 1e-10, "seed {seed}: residual {residual}");
        }
    }

    #[test]
    fn tracer_rejects_wrong_inputs() {
        let f = toral_auto_default();
        let rot = rotation(0.3).unwrap();
        let m = Method::exact(rot.clone());
        let x = rot.orbit(&pt(&[0.1]), 0, 5).unwrap();
        assert!(hyperbolic_trace(&rot, &m, &x).is_err());
        let m2 = Method::exact(f.clone());
        let x2 = f.orbit(&pt(&[0.1, 0.2]), 0, 5).unwrap();
        let wrong_base = Method::exact(toral_auto_default());
        // Same map compares equal, so this is accepted.
        assert!(hyperbolic_trace(&f, &wrong_base, &x2).is_ok());
        assert!(hyperbolic_trace(&f, &m2, &x2).is_ok());
    }

    #[test]
    fn search_uses_tracer_seed_on_hyperbolic_maps() {
        let f = toral_auto_default();
        let d = 1e-3;
        let c = f.hyperbolic_data().unwrap().tracing_constant();
        let m = Method::random_bounded(f.clone(), d, 7).unwrap();
        let x = f.orbit(&pt(&[0.39, 0.72]), 0, 100).unwrap();
        let report = best_shadow(&x, &m, &quick_search(100)).unwrap();
        assert!(
            report.sup_distance <= c * d,
            "sup {} exceeds tracer bound {}",
            report.sup_distance,
            c * d
        );
        assert!(report.residual <= 1e-10);
    }

    #[test]
    fn exit_time_law_for_drift() {
        let f = degenerate_circle_line(0.5).unwrap();
        let center = pt(&[0.3, 0.0]);
        for (eps, delta) in [(0.05, 1e-3), (0.05, 5e-4), (0.02, 1e-3), (0.1, 1e-4)] {
            let m = Method::drift(f.clone(), delta, 0).unwrap();
            let horizon = (3.0 * eps / delta) as i64 + 10;
            let k = first_exit_time(&m, &center, &center, eps, horizon)
                .unwrap()
                .expect("drift must escape");
            let expect = eps / delta;
            assert!(
                (k as f64 - expect).abs() <= 2.0,
                "eps {eps} delta {delta}: exit {k} vs {expect}"
            );
        }
    }

    #[test]
    fn phi_trivially_true_above_diameter() {
        let f = toral_auto_default();
        let eps = f.space().diameter() + 0.1;
        let pool = PoolSpec::default().materialize(&f, 1e-3).unwrap();
        let samples = f.space().grid(2).unwrap();
        let est = estimate_phi(&f, eps, 1e-3, &samples, &pool, &quick_search(20)).unwrap();
        assert!(est.member_flags.iter().all(|&b| b));
        assert!(est.witnesses.iter().all(|w| w.is_none()));
    }

    #[test]
    fn phi_flags_fixed_circle_as_defeated() {
        let f = degenerate_circle_line(0.5).unwrap();
        let adversaries = vec![Method::drift(f.clone(), 1e-3, 0).unwrap()];
        let samples = vec![pt(&[0.25, 0.0]), pt(&[0.75, 0.0])];
        let est = estimate_phi(&f, 0.02, 1e-3, &samples, &adversaries, &quick_search(100)).unwrap();
        assert!(est.member_flags.iter().all(|&b| !b));
        for w in &est.witnesses {
            let w = w.as_ref().expect("witness required for defeated sample");
            assert!(w.sup_distance > 0.02);
            // Replaying the witness reproduces the violation.
            let x = f.orbit(&samples[0], 0, 100).unwrap();
            let replay = best_shadow(&x, &adversaries[w.method_index], &quick_search(100)).unwrap();
            assert!(replay.sup_distance > 0.02);
        }
    }

    #[test]
    fn phi_accepts_hyperbolic_samples() {
        let f = toral_auto_default();
        let pool = PoolSpec::default().materialize(&f, 1e-3).unwrap();
        let samples = vec![pt(&[0.2, 0.6])];
        let est = estimate_phi(&f, 0.05, 1e-3, &samples, &pool, &quick_search(60)).unwrap();
        assert!(est.member_flags[0], "witness: {:?}", est.witnesses[0]);
    }

    #[test]
    fn phi_rejects_oversized_adversaries() {
        let f = toral_auto_default();
        let adversaries = vec![Method::drift(f.clone(), 1e-2, 0).unwrap()];
        let samples = vec![pt(&[0.2, 0.6])];
        assert!(estimate_phi(&f, 0.05, 1e-3, &samples, &adversaries, &quick_search(10)).is_err());
    }

    #[test]
    fn psi_ladder_down_degenerate_and_toral() {
        let pool = PoolSpec {
            random_seeds: vec![1],
            ..PoolSpec::default()
        };
        let ladder = [1e-2, 1e-3];

        let f = degenerate_circle_line(0.5).unwrap();
        let est = estimate_psi(
            &f,
            &[pt(&[0.5, 0.0])],
            0.05,
            &ladder,
            &pool,
            &SearchConfig {
                horizon: 200,
                resolution: 8,
                levels: 1,
                shrink: 8.0,
                use_tracer_seed: false,
            },
        )
        .unwrap();
        assert_eq!(est.samples[0].best_d, None);
        assert!(est.samples[0].levels.iter().all(|l| l.defeated.is_some()));

        let g = toral_auto_default();
        let est = estimate_psi(&g, &[pt(&[0.3, 0.3])], 0.05, &ladder, &pool, &quick_search(40))
            .unwrap();
        assert_eq!(est.samples[0].best_d, Some(1e-2), "levels: {:?}", est.samples[0].levels);
    }

    #[test]
    fn ladder_must_decrease() {
        let f = toral_auto_default();
        let pool = PoolSpec::default();
        assert!(estimate_psi(&f, &[pt(&[0.1, 0.1])], 0.05, &[1e-3, 1e-2], &pool, &quick_search(10)).is_err());
        assert!(estimate_psi(&f, &[pt(&[0.1, 0.1])], 0.05, &[], &pool, &quick_search(10)).is_err());
    }
}
