//! Perturbation methods: sequences of maps g_k staying C⁰-close to a base map.
//!
//! A method with bound d supplies one map g_k per time step with
//! `dist(g_k(p), f(p)) ≤ d` for every point p. Method trajectories follow
//! y_{k+1} = g_k(y_k); they are the adversaries that shadowing searches and
//! tracers must answer.
//!
//! The bound `d_bound` is stored as a certificate. Constructors guarantee it
//! for the built-in kinds; [`Method::verify_d_bound`] re-checks it on a dense
//! grid and reports a concrete witness on violation.

use std::fmt;

use crate::error::{Error, Result};
use crate::space::{norm, Normalized, Point, Space};
use crate::systems::MapSystem;

/// Default grid resolution per axis for the random vector field.
pub const RANDOM_FIELD_RESOLUTION: usize = 16;

/// A finite window of a trajectory, indexed by integer time.
///
/// `points[i]` is the state at time `n_from + i`. If the underlying space is
/// a chart and the trajectory left it, `exit_index` records the time of the
/// first clamped point and the trajectory is truncated there.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    n_from: i64,
    points: Vec<Point>,
    exit_index: Option<i64>,
}

impl Trajectory {
    pub fn new(n_from: i64, points: Vec<Point>, exit_index: Option<i64>) -> Self {
        assert!(!points.is_empty(), "trajectory needs at least one point");
        Trajectory {
            n_from,
            points,
            exit_index,
        }
    }

    pub fn n_from(&self) -> i64 {
        self.n_from
    }

    pub fn n_to(&self) -> i64 {
        self.n_from + self.points.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn exit_index(&self) -> Option<i64> {
        self.exit_index
    }

    /// State at absolute time `k`, if inside the window.
    pub fn point_at(&self, k: i64) -> Option<&Point> {
        if k < self.n_from || k > self.n_to() {
            return None;
        }
        self.points.get((k - self.n_from) as usize)
    }

    /// Iterator over `(time, point)` pairs.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (i64, &Point)> {
        let n_from = self.n_from;
        self.points
            .iter()
            .enumerate()
            .map(move |(i, p)| (n_from + i as i64, p))
    }

    /// Largest pointwise distance to another trajectory over the shared window.
    pub fn sup_distance(&self, other: &Trajectory, space: &Space) -> Result<f64> {
        let lo = self.n_from.max(other.n_from);
        let hi = self.n_to().min(other.n_to());
        if lo > hi {
            return Err(Error::InvalidInput(
                "trajectories share no time window".into(),
            ));
        }
        let mut sup = 0.0f64;
        for k in lo..=hi {
            let d = space.dist(self.point_at(k).unwrap(), other.point_at(k).unwrap())?;
            sup = sup.max(d);
        }
        Ok(sup)
    }
}

#[derive(Debug, Clone)]
enum MethodKind {
    /// The same map g at every step.
    Constant { g: MapSystem },
    /// base followed by a fixed displacement δ along one axis.
    Drift { delta: f64, axis: usize },
    /// base everywhere except a single step k₀, where a fixed offset is added.
    OneShot { k0: i64, offset: Vec<f64> },
    /// base plus d·η(k, p) for a seeded piecewise-multilinear unit field η.
    RandomBounded { d: f64, seed: u64, resolution: usize },
}

/// A d-method around a base map.
#[derive(Debug, Clone)]
pub struct Method {
    base: MapSystem,
    kind: MethodKind,
    d_bound: f64,
}

impl Method {
    /// The trivial method g_k = base with d_bound 0.
    pub fn exact(base: MapSystem) -> Self {
        let g = base.clone();
        Method {
            base,
            kind: MethodKind::Constant { g },
            d_bound: 0.0,
        }
    }

    /// A constant method g_k = g with a caller-supplied C⁰-distance
    /// certificate. The certificate is trusted here and re-checked by
    /// [`Method::verify_d_bound`].
    pub fn constant(base: MapSystem, g: MapSystem, d_bound: f64) -> Result<Self> {
        if base.space() != g.space() {
            return Err(Error::InvalidInput(
                "constant method must share the base map's space".into(),
            ));
        }
        check_bound(d_bound)?;
        Ok(Method {
            base,
            kind: MethodKind::Constant { g },
            d_bound,
        })
    }

    /// base followed by a displacement of `delta` along `axis`.
    pub fn drift(base: MapSystem, delta: f64, axis: usize) -> Result<Self> {
        if axis >= base.space().dim() {
            return Err(Error::InvalidInput(format!(
                "drift axis {axis} out of range for dimension {}",
                base.space().dim()
            )));
        }
        if !delta.is_finite() || (base.space().is_periodic() && delta.abs() >= 0.5) {
            return Err(Error::InvalidInput(format!(
                "drift delta {delta} invalid (periodic axes need |δ| < 1/2)"
            )));
        }
        Ok(Method {
            d_bound: delta.abs(),
            base,
            kind: MethodKind::Drift { delta, axis },
        })
    }

    /// base everywhere except step `k0`, where `offset` is added.
    pub fn one_shot(base: MapSystem, k0: i64, offset: Vec<f64>) -> Result<Self> {
        if offset.len() != base.space().dim() {
            return Err(Error::DimensionMismatch {
                expected: base.space().dim(),
                got: offset.len(),
            });
        }
        if offset.iter().any(|c| !c.is_finite())
            || (base.space().is_periodic() && offset.iter().any(|c| c.abs() >= 0.5))
        {
            return Err(Error::InvalidInput(format!(
                "one-shot offset {offset:?} invalid"
            )));
        }
        Ok(Method {
            d_bound: norm(&offset),
            base,
            kind: MethodKind::OneShot { k0, offset },
        })
    }

    /// base plus `d·η(k, p)` where η is a seeded unit vector field, constant
    /// per time step on a lattice and smoothed by multilinear interpolation.
    pub fn random_bounded(base: MapSystem, d: f64, seed: u64) -> Result<Self> {
        Self::random_bounded_with_resolution(base, d, seed, RANDOM_FIELD_RESOLUTION)
    }

    pub fn random_bounded_with_resolution(
        base: MapSystem,
        d: f64,
        seed: u64,
        resolution: usize,
    ) -> Result<Self> {
        check_bound(d)?;
        if resolution == 0 {
            return Err(Error::InvalidInput("field resolution must be positive".into()));
        }
        if base.space().is_periodic() && d >= 0.5 {
            return Err(Error::InvalidInput(format!(
                "random bound {d} too large for periodic axes"
            )));
        }
        Ok(Method {
            base,
            kind: MethodKind::RandomBounded { d, seed, resolution },
            d_bound: d,
        })
    }

    pub fn base(&self) -> &MapSystem {
        &self.base
    }

    pub fn space(&self) -> &Space {
        self.base.space()
    }

    pub fn d_bound(&self) -> f64 {
        self.d_bound
    }

    /// Whether every g_k admits an inverse (needed for backward windows).
    pub fn invertible(&self) -> bool {
        match &self.kind {
            MethodKind::Constant { g } => g.invertible(),
            _ => false,
        }
    }

    /// One step of the method: the image of `p` under g_k.
    pub fn step(&self, k: i64, p: &Point) -> Result<Normalized> {
        match &self.kind {
            MethodKind::Constant { g } => g.eval_exit(p),
            MethodKind::Drift { delta, axis } => {
                let img = self.base.eval_exit(p)?;
                let mut v = vec![0.0; self.space().dim()];
                v[*axis] = *delta;
                let moved = self.space().translate(&img.point, &v)?;
                Ok(Normalized {
                    point: moved.point,
                    clamped: img.clamped || moved.clamped,
                })
            }
            MethodKind::OneShot { k0, offset } => {
                let img = self.base.eval_exit(p)?;
                if k != *k0 {
                    return Ok(img);
                }
                let moved = self.space().translate(&img.point, offset)?;
                Ok(Normalized {
                    point: moved.point,
                    clamped: img.clamped || moved.clamped,
                })
            }
            MethodKind::RandomBounded { d, seed, resolution } => {
                let p = self.space().normalize(p)?.point;
                let eta = unit_field(self.space(), *seed, k, *resolution, &p);
                let v: Vec<f64> = eta.iter().map(|c| c * d).collect();
                let img = self.base.eval_exit(&p)?;
                let moved = self.space().translate(&img.point, &v)?;
                Ok(Normalized {
                    point: moved.point,
                    clamped: img.clamped || moved.clamped,
                })
            }
        }
    }

    /// The composition g_{k−1} ∘ … ∘ g_0 applied to `p` (identity for k = 0).
    pub fn compose(&self, k: i64, p: &Point) -> Result<Point> {
        if k < 0 {
            return Err(Error::InvalidInput("compose needs k ≥ 0".into()));
        }
        let mut cursor = self.space().normalize(p)?.point;
        for i in 0..k {
            cursor = self.step(i, &cursor)?.point;
        }
        Ok(cursor)
    }

    /// Method trajectory over `[n_from, n_to]` with y at time 0 equal to `y0`.
    ///
    /// Forward steps apply g_k; negative indices need an invertible constant
    /// method. Chart exits truncate the forward part and record the index.
    pub fn trajectory(&self, y0: &Point, n_from: i64, n_to: i64) -> Result<Trajectory> {
        if n_from > 0 || n_to < 0 || n_from > n_to {
            return Err(Error::InvalidInput(format!(
                "trajectory window [{n_from}, {n_to}] must contain 0"
            )));
        }
        if n_from < 0 && !self.invertible() {
            return Err(Error::Unsupported(
                "backward method trajectory needs an invertible constant method".into(),
            ));
        }
        let start = self.space().normalize(y0)?.point;

        let mut backward = Vec::new();
        if n_from < 0 {
            let MethodKind::Constant { g } = &self.kind else {
                unreachable!()
            };
            let mut cursor = start.clone();
            for _ in 0..(-n_from) {
                cursor = g.inverse_eval(&cursor)?;
                backward.push(cursor.clone());
            }
            backward.reverse();
        }

        let mut points = backward;
        points.push(start.clone());
        let mut exit_index = None;
        let mut cursor = start;
        for k in 0..n_to {
            let step = self.step(k, &cursor)?;
            cursor = step.point.clone();
            points.push(step.point);
            if step.clamped {
                exit_index = Some(k + 1);
                break;
            }
        }
        Ok(Trajectory::new(n_from, points, exit_index))
    }

    /// Re-check the d_bound certificate on a dense grid.
    ///
    /// Evaluates `dist(g_k(p), base(p))` for every grid point and `k` in
    /// `0..k_max`, returns the maximum, and fails with the witness if it
    /// exceeds `d_bound` by more than 1e−9.
    pub fn verify_d_bound(&self, grid_resolution: usize, k_max: i64) -> Result<f64> {
        let grid = self.space().grid(grid_resolution)?;
        let mut max = 0.0f64;
        for k in 0..k_max.max(1) {
            for p in &grid {
                let perturbed = self.step(k, p)?.point;
                let exact = self.base.eval(p)?;
                let d = self.space().dist(&perturbed, &exact)?;
                if d > max {
                    max = d;
                    if max > self.d_bound + 1e-9 {
                        return Err(Error::CertificationFailed {
                            step: k,
                            point: p.clone(),
                            distance: max,
                            bound: self.d_bound,
                        });
                    }
                }
            }
        }
        Ok(max)
    }

    /// Short human-readable descriptor used in reports and witnesses.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            MethodKind::Constant { g } => {
                if self.d_bound == 0.0 {
                    format!("exact({})", g.name())
                } else {
                    format!("constant({}, d={:e})", g.name(), self.d_bound)
                }
            }
            MethodKind::Drift { delta, axis } => format!("drift(delta={delta:e}, axis={axis})"),
            MethodKind::OneShot { k0, offset } => {
                format!("one_shot(k0={k0}, offset={offset:?})")
            }
            MethodKind::RandomBounded { d, seed, .. } => {
                format!("random_bounded(d={d:e}, seed={seed})")
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

fn check_bound(d: f64) -> Result<()> {
    if !d.is_finite() || d < 0.0 {
        return Err(Error::InvalidInput(format!("bound {d} must be finite and ≥ 0")));
    }
    Ok(())
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic node vector with Euclidean norm ≤ 1.
fn node_vector(seed: u64, k: i64, node: &[usize], dim: usize) -> Vec<f64> {
    let mut state = seed ^ 0xD1B5_4A32_D192_ED03;
    splitmix64(&mut state);
    state ^= k as u64;
    splitmix64(&mut state);
    for &idx in node {
        state ^= idx as u64;
        splitmix64(&mut state);
    }
    let mut v: Vec<f64> = (0..dim)
        .map(|_| (splitmix64(&mut state) >> 11) as f64 / (1u64 << 52) as f64 - 1.0)
        .collect();
    let n = norm(&v);
    if n > 1.0 {
        for c in &mut v {
            *c /= n;
        }
    }
    v
}

/// Piecewise-multilinear unit vector field η(k, ·) on the space.
///
/// Node vectors live on a per-axis lattice of the given resolution (wrapping
/// on periodic axes); interpolation makes the field continuous, and convexity
/// of the interpolation keeps ‖η‖ ≤ 1 everywhere.
fn unit_field(space: &Space, seed: u64, k: i64, resolution: usize, p: &Point) -> Vec<f64> {
    let dim = space.dim();
    let r = resolution;
    let periodic = space.is_periodic();

    // Per-axis cell index and interpolation fraction.
    let mut cell = vec![0usize; dim];
    let mut frac = vec![0.0f64; dim];
    match space {
        Space::Circle | Space::Torus { .. } => {
            for ax in 0..dim {
                let t = p.0[ax] * r as f64;
                let i = (t.floor() as isize).rem_euclid(r as isize) as usize;
                cell[ax] = i;
                frac[ax] = t - t.floor();
            }
        }
        Space::Chart { bounds } => {
            for ax in 0..dim {
                let b = bounds[ax];
                let t = (p.0[ax] - b[0]) / (b[1] - b[0]) * r as f64;
                let i = (t.floor() as isize).clamp(0, r as isize - 1) as usize;
                cell[ax] = i;
                frac[ax] = (t - i as f64).clamp(0.0, 1.0);
            }
        }
    }

    let mut field = vec![0.0f64; dim];
    let mut node = vec![0usize; dim];
    for corner in 0..(1usize << dim) {
        let mut weight = 1.0;
        for ax in 0..dim {
            if corner & (1 << ax) != 0 {
                weight *= frac[ax];
                node[ax] = if periodic {
                    (cell[ax] + 1) % r
                } else {
                    cell[ax] + 1
                };
            } else {
                weight *= 1.0 - frac[ax];
                node[ax] = cell[ax];
            }
        }
        if weight == 0.0 {
            continue;
        }
        let v = node_vector(seed, k, &node, dim);
        for ax in 0..dim {
            field[ax] += weight * v[ax];
        }
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{degenerate_circle_line, rotation, toral_auto_default};

    const TOL: f64 = 1e-12;

    fn pt(coords: &[f64]) -> Point {
        Point(coords.to_vec())
    }

    #[test]
    fn drift_step_on_fixed_circle() {
        let f = degenerate_circle_line(0.5).unwrap();
        let m = Method::drift(f, 0.001, 0).unwrap();
        let img = m.step(0, &pt(&[0.3, 0.0])).unwrap().point;
        assert!((img.0[0] - 0.301).abs() < TOL);
        assert!(img.0[1].abs() < TOL);
    }

    #[test]
    fn drift_compose_closed_form() {
        let f = degenerate_circle_line(0.5).unwrap();
        let m = Method::drift(f.clone(), 0.001, 0).unwrap();
        for k in [0i64, 1, 10, 250, 1000] {
            let y = m.compose(k, &pt(&[0.25, 0.0])).unwrap();
            let expect = (0.25 + k as f64 * 0.001).rem_euclid(1.0);
            assert!(
                (y.0[0] - expect).abs() < 1e-9,
                "k={k}: {} vs {expect}",
                y.0[0]
            );
            assert!(y.0[1].abs() < TOL);
        }
    }

    #[test]
    fn one_shot_differs_only_at_k0() {
        let f = toral_auto_default();
        let m = Method::one_shot(f.clone(), 3, vec![0.002, 0.0]).unwrap();
        assert!((m.d_bound() - 0.002).abs() < TOL);
        let p = pt(&[0.2, 0.7]);
        for k in 0..6 {
            let perturbed = m.step(k, &p).unwrap().point;
            let exact = f.eval(&p).unwrap();
            let d = f.space().dist(&perturbed, &exact).unwrap();
            if k == 3 {
                assert!((d - 0.002).abs() < 1e-12);
            } else {
                assert!(d < TOL);
            }
        }
    }

    #[test]
    fn exact_method_trajectory_is_base_orbit() {
        let f = toral_auto_default();
        let m = Method::exact(f.clone());
        let y0 = pt(&[0.13, 0.57]);
        let traj = m.trajectory(&y0, 0, 20).unwrap();
        let orbit = f.orbit(&y0, 0, 20).unwrap();
        assert_eq!(traj.points(), orbit.points());
    }

    #[test]
    fn trajectory_steps_satisfy_method_relation() {
        let f = toral_auto_default();
        let m = Method::random_bounded(f, 1e-3, 42).unwrap();
        let traj = m.trajectory(&pt(&[0.3, 0.4]), 0, 50).unwrap();
        for k in 0..50i64 {
            let stepped = m.step(k, traj.point_at(k).unwrap()).unwrap().point;
            let d = m.space().dist(&stepped, traj.point_at(k + 1).unwrap()).unwrap();
            assert!(d < TOL, "relation violated at step {k}: {d}");
        }
    }

    #[test]
    fn random_bounded_is_deterministic_per_seed() {
        let f = toral_auto_default();
        let m1 = Method::random_bounded(f.clone(), 1e-3, 7).unwrap();
        let m2 = Method::random_bounded(f.clone(), 1e-3, 7).unwrap();
        let m3 = Method::random_bounded(f, 1e-3, 8).unwrap();
        let y0 = pt(&[0.3, 0.4]);
        let t1 = m1.trajectory(&y0, 0, 30).unwrap();
        let t2 = m2.trajectory(&y0, 0, 30).unwrap();
        let t3 = m3.trajectory(&y0, 0, 30).unwrap();
        assert_eq!(t1.points(), t2.points());
        assert_ne!(t1.points(), t3.points());
    }

    #[test]
    fn random_field_is_continuous_across_cells() {
        let f = toral_auto_default();
        let m = Method::random_bounded(f, 1e-2, 5).unwrap();
        // Straddle a lattice line: points 1e-9 apart must give nearly equal steps.
        let a = pt(&[1.0 / 16.0 - 5e-10, 0.4]);
        let b = pt(&[1.0 / 16.0 + 5e-10, 0.4]);
        let ia = m.step(0, &a).unwrap().point;
        let ib = m.step(0, &b).unwrap().point;
        let base_gap = m.space().dist(&a, &b).unwrap() * m.base().lipschitz_bound();
        let d = m.space().dist(&ia, &ib).unwrap();
        assert!(d < base_gap + 1e-6, "field jump {d}");
    }

    #[test]
    fn verify_d_bound_certificates() {
        let f = toral_auto_default();
        let drift = Method::drift(f.clone(), 1e-3, 0).unwrap();
        let max = drift.verify_d_bound(16, 4).unwrap();
        assert!((max - 1e-3).abs() < 1e-12);

        let random = Method::random_bounded(f.clone(), 1e-3, 11).unwrap();
        let max = random.verify_d_bound(16, 4).unwrap();
        assert!(max <= 1e-3 + 1e-12);
        assert!(max > 1e-4, "field should actually move points, got {max}");

        let one_shot = Method::one_shot(f, 2, vec![0.002, 0.0]).unwrap();
        let max = one_shot.verify_d_bound(16, 4).unwrap();
        assert!((max - 0.002).abs() < 1e-12);
    }

    #[test]
    fn verify_d_bound_catches_false_certificate() {
        let base = rotation(0.25).unwrap();
        let g = rotation(0.35).unwrap();
        // True C⁰ distance is 0.1; claim 0.01.
        let m = Method::constant(base, g, 0.01).unwrap();
        match m.verify_d_bound(8, 1) {
            Err(Error::CertificationFailed { distance, bound, .. }) => {
                assert!((distance - 0.1).abs() < 1e-9);
                assert!((bound - 0.01).abs() < TOL);
            }
            other => panic!("expected certification failure, got {other:?}"),
        }
    }

    #[test]
    fn perturbation_accumulation_oracle() {
        // dist(y_k, x_k) ≤ d·Σ_{j<k} L^j for trajectories from the same seed point.
        let f = toral_auto_default();
        let l = f.lipschitz_bound();
        let d = 1e-3;
        let m = Method::random_bounded(f.clone(), d, 3).unwrap();
        let y0 = pt(&[0.21, 0.68]);
        let y = m.trajectory(&y0, 0, 10).unwrap();
        let x = f.orbit(&y0, 0, 10).unwrap();
        let mut bound = 0.0;
        for k in 1..=10i64 {
            bound = l * bound + d;
            let gap = f
                .space()
                .dist(y.point_at(k).unwrap(), x.point_at(k).unwrap())
                .unwrap();
            assert!(gap <= bound + 1e-12, "step {k}: {gap} > {bound}");
        }
    }

    #[test]
    fn shift_invariant_kinds_respect_semigroup_shift() {
        let f = toral_auto_default();
        let m = Method::drift(f, 1e-3, 1).unwrap();
        let p = pt(&[0.4, 0.9]);
        let j = 7i64;
        let k = 9i64;
        let via_mid = m.compose(k, &m.compose(j, &p).unwrap()).unwrap();
        let direct = m.compose(j + k, &p).unwrap();
        assert!(m.space().dist(&via_mid, &direct).unwrap() < 1e-12);
    }

    #[test]
    fn backward_trajectory_constant_only() {
        let base = rotation(0.25).unwrap();
        let m = Method::exact(base);
        let traj = m.trajectory(&pt(&[0.0]), -2, 1).unwrap();
        assert!((traj.point_at(-2).unwrap().0[0] - 0.5).abs() < TOL);
        assert!((traj.point_at(1).unwrap().0[0] - 0.25).abs() < TOL);

        let f = toral_auto_default();
        let drift = Method::drift(f, 1e-3, 0).unwrap();
        assert!(drift.trajectory(&pt(&[0.1, 0.1]), -1, 1).is_err());
    }

    #[test]
    fn invalid_method_parameters_rejected() {
        let f = toral_auto_default();
        assert!(Method::drift(f.clone(), 0.7, 0).is_err());
        assert!(Method::drift(f.clone(), 1e-3, 5).is_err());
        assert!(Method::one_shot(f.clone(), 0, vec![0.1]).is_err());
        assert!(Method::one_shot(f.clone(), 0, vec![0.6, 0.0]).is_err());
        assert!(Method::random_bounded(f.clone(), -0.1, 0).is_err());
        assert!(Method::random_bounded(f, f64::NAN, 0).is_err());
    }
}
