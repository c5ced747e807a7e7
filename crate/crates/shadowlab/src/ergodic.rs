//! Birkhoff averages, ergodic tracking gaps, and return-time witnesses.
//!
//! Ergodic tracking relaxes sup-distance tracking: instead of requiring
//! dist(x_k, y_k) ≤ ε at every step, it requires that time averages of
//! 1-Lipschitz observables along the two trajectories eventually agree up to
//! ε, i.e. limsup_n (1/n) Σ_{k=1}^n (φ(x_k) − φ(y_k)) ≤ ε for every such φ.
//! Over a finite horizon the limsup becomes the maximum of the running
//! averages over a tail window; [`eis_gap`] computes that maximum against a
//! finite dictionary of 1-Lipschitz test functions.
//!
//! The dictionary functions are distances to fixed landmark points. Each is
//! exactly 1-Lipschitz by the triangle inequality, and on compact spaces
//! such families separate measures well enough for the gap statistics used
//! here.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::methods::{Method, Trajectory};
use crate::shadowing::{best_shadow, SearchConfig};
use crate::space::{Point, Space};
use crate::systems::MapSystem;

/// A 1-Lipschitz observable: distance to a landmark point.
#[derive(Debug, Clone, PartialEq)]
pub struct LipFunction {
    label: String,
    landmark: Point,
}

impl LipFunction {
    pub fn new(label: impl Into<String>, space: &Space, landmark: Point) -> Result<Self> {
        space.check_point(&landmark)?;
        Ok(LipFunction {
            label: label.into(),
            landmark,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn landmark(&self) -> &Point {
        &self.landmark
    }

    /// φ(p) = dist(p, landmark).
    pub fn eval(&self, space: &Space, p: &Point) -> Result<f64> {
        space.dist(p, &self.landmark)
    }
}

/// Default dictionary: up to `count` landmark distances on a near-uniform
/// grid. Labels are `d00`, `d01`, … in grid order.
pub fn default_dictionary(space: &Space, count: usize) -> Result<Vec<LipFunction>> {
    if count == 0 {
        return Err(Error::InvalidInput("dictionary needs count ≥ 1".into()));
    }
    let res = (count as f64).powf(1.0 / space.dim() as f64).ceil() as usize;
    let grid = space.grid(res.max(1))?;
    grid.into_iter()
        .take(count)
        .enumerate()
        .map(|(i, p)| LipFunction::new(format!("d{i:02}"), space, p))
        .collect()
}

/// Mean of φ over the first `n` points of the trajectory (indices
/// `n_from .. n_from + n`).
pub fn birkhoff_avg(space: &Space, traj: &Trajectory, phi: &LipFunction, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("Birkhoff average needs n ≥ 1".into()));
    }
    let pts = traj.points();
    if pts.len() < n {
        return Err(Error::InvalidInput(format!(
            "trajectory has {} points, Birkhoff average needs {n}",
            pts.len()
        )));
    }
    let mut sum = 0.0;
    for p in &pts[..n] {
        sum += phi.eval(space, p)?;
    }
    Ok(sum / n as f64)
}

/// Running-average gap statistics between two trajectories.
#[derive(Debug, Clone)]
pub struct EisReport {
    pub horizon: usize,
    pub tail_window: usize,
    /// Per test function: max over n in the tail window of the running
    /// signed average (1/n) Σ_{k=1}^n (φ(x_k) − φ(y_k)).
    pub per_function_gap: BTreeMap<String, f64>,
    /// Largest signed gap over the dictionary.
    pub sup_gap: f64,
    /// Largest |running average| over the dictionary and the tail window.
    pub sup_abs_gap: f64,
}

/// Compute running-average gaps of `dictionary` between `x` and `y` over
/// steps k = 1..horizon, maximizing over n in the last `tail_window` values.
///
/// The signed gap is one-sided: a trajectory whose averages undershoot the
/// orbit's on every function has a negative sup_gap and still counts as
/// tracking. `sup_abs_gap` records the two-sided magnitude alongside.
pub fn eis_gap(
    space: &Space,
    x: &Trajectory,
    y: &Trajectory,
    dictionary: &[LipFunction],
    horizon: usize,
    tail_window: usize,
) -> Result<EisReport> {
    if dictionary.is_empty() {
        return Err(Error::InvalidInput("empty dictionary".into()));
    }
    if horizon == 0 || tail_window == 0 || tail_window > horizon {
        return Err(Error::InvalidInput(format!(
            "need 1 ≤ tail_window ≤ horizon, got tail {tail_window}, horizon {horizon}"
        )));
    }
    let need = |t: &Trajectory| -> Result<()> {
        if t.n_from() > 1 || t.n_to() < horizon as i64 {
            return Err(Error::InvalidInput(format!(
                "trajectory window [{}, {}] does not cover steps 1..{horizon}",
                t.n_from(),
                t.n_to()
            )));
        }
        Ok(())
    };
    need(x)?;
    need(y)?;

    let tail_start = horizon - tail_window + 1;
    let mut per_function_gap = BTreeMap::new();
    let mut sup_gap = f64::NEG_INFINITY;
    let mut sup_abs_gap = 0.0f64;
    for phi in dictionary {
        let mut sum = 0.0;
        let mut best = f64::NEG_INFINITY;
        let mut best_abs = 0.0f64;
        for n in 1..=horizon {
            let k = n as i64;
            let fx = phi.eval(space, x.point_at(k).unwrap())?;
            let fy = phi.eval(space, y.point_at(k).unwrap())?;
            sum += fx - fy;
            if n >= tail_start {
                let avg = sum / n as f64;
                best = best.max(avg);
                best_abs = best_abs.max(avg.abs());
            }
        }
        per_function_gap.insert(phi.label().to_string(), best);
        sup_gap = sup_gap.max(best);
        sup_abs_gap = sup_abs_gap.max(best_abs);
    }
    Ok(EisReport {
        horizon,
        tail_window,
        per_function_gap,
        sup_gap,
        sup_abs_gap,
    })
}

/// One sample of an ergodic-tracking check.
#[derive(Debug, Clone)]
pub struct EisSampleOutcome {
    pub sample: Point,
    /// Best (smallest) signed sup-gap over the candidate trajectories.
    pub gap: f64,
    /// Two-sided gap of the same best candidate.
    pub abs_gap: f64,
    /// Sup-distance of the best candidate to the orbit, for comparison with
    /// pointwise tracking.
    pub sup_distance: f64,
    pub pass: bool,
}

/// Per-adversary, per-sample ergodic tracking verdicts.
#[derive(Debug, Clone)]
pub struct EisCheck {
    pub epsilon: f64,
    pub method: String,
    pub outcomes: Vec<EisSampleOutcome>,
    /// True iff every sample passed.
    pub pass: bool,
}

/// Check ergodic tracking of `m` against the orbits of `samples`.
///
/// For each sample two candidate method trajectories are scored: the best
/// sup-distance shadow (found by [`best_shadow`]) and the plain trajectory
/// started at the sample itself. A sample passes if either candidate's
/// signed sup-gap is ≤ ε.
#[allow(clippy::too_many_arguments)]
pub fn eis_check(
    f: &MapSystem,
    m: &Method,
    samples: &[Point],
    epsilon: f64,
    dictionary: &[LipFunction],
    horizon: usize,
    tail_window: usize,
    search: &SearchConfig,
) -> Result<EisCheck> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if samples.is_empty() {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let space = f.space();
    let mut outcomes = Vec::with_capacity(samples.len());
    for sample in samples {
        let x = f.orbit(sample, 0, horizon as i64)?;
        let mut candidates: Vec<Trajectory> = Vec::new();
        let search_cfg = SearchConfig {
            horizon: horizon as i64,
            ..search.clone()
        };
        if let Ok(report) = best_shadow(&x, m, &search_cfg) {
            candidates.push(report.trajectory);
        }
        candidates.push(m.trajectory(sample, 0, horizon as i64)?);

        let mut best: Option<(f64, f64, f64)> = None;
        for y in &candidates {
            if y.n_to() < horizon as i64 {
                continue; // chart exit: cannot score the full window
            }
            let report = eis_gap(space, &x, y, dictionary, horizon, tail_window)?;
            let sup = y.sup_distance(&x, space)?;
            let better = match &best {
                None => true,
                Some((g, _, _)) => report.sup_gap < *g,
            };
            if better {
                best = Some((report.sup_gap, report.sup_abs_gap, sup));
            }
        }
        let (gap, abs_gap, sup_distance) = best.ok_or_else(|| {
            Error::Unsupported("no candidate trajectory covers the full window".into())
        })?;
        outcomes.push(EisSampleOutcome {
            sample: sample.clone(),
            gap,
            abs_gap,
            sup_distance,
            pass: gap <= epsilon,
        });
    }
    let pass = outcomes.iter().all(|o| o.pass);
    Ok(EisCheck {
        epsilon,
        method: m.descriptor(),
        outcomes,
        pass,
    })
}

/// A point of a region returning near itself under iteration.
#[derive(Debug, Clone)]
pub struct ReturnWitness {
    pub point: Point,
    /// First iterate n ≥ 1 with dist(fⁿ(point), point) ≤ tol.
    pub time: i64,
    pub distance: f64,
}

/// Search a grid of candidate points inside the ball around `center` for the
/// earliest near-return under `m`'s composed steps.
///
/// Returns the witness with the smallest return time; ties are broken by
/// smaller distance, then lexicographically smaller point. `None` if no
/// candidate returns within `horizon`.
pub fn poisson_return(
    m: &Method,
    center: &Point,
    radius: f64,
    horizon: i64,
    tol: f64,
    grid_resolution: usize,
) -> Result<Option<ReturnWitness>> {
    if radius <= 0.0 || tol < 0.0 || horizon < 1 {
        return Err(Error::InvalidInput(
            "poisson search needs radius > 0, tol ≥ 0, horizon ≥ 1".into(),
        ));
    }
    let space = m.space();
    space.check_point(center)?;
    let mut best: Option<ReturnWitness> = None;
    for cand in space.grid(grid_resolution)? {
        if space.dist(&cand, center)? > radius {
            continue;
        }
        let limit = best.as_ref().map_or(horizon, |w| w.time);
        let traj = m.trajectory(&cand, 0, limit)?;
        for n in 1..=traj.n_to() {
            let dist = space.dist(traj.point_at(n).unwrap(), &cand)?;
            if dist <= tol {
                let candidate = ReturnWitness {
                    point: cand.clone(),
                    time: n,
                    distance: dist,
                };
                let replace = match &best {
                    None => true,
                    Some(b) => {
                        (candidate.time, candidate.distance) < (b.time, b.distance)
                            || (candidate.time == b.time
                                && candidate.distance == b.distance
                                && candidate.point.lex_cmp(&b.point) == std::cmp::Ordering::Less)
                    }
                };
                if replace {
                    best = Some(candidate);
                }
                break;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::methods::Method;
    use crate::systems::{doubling, rotation, toral_auto_default};

    fn pt(coords: &[f64]) -> Point {
        Point(coords.to_vec())
    }

    #[test]
    fn lip_functions_are_one_lipschitz() {
        let space = Space::torus(2).unwrap();
        let dict = default_dictionary(&space, 32).unwrap();
        assert_eq!(dict.len(), 32);
        assert_eq!(dict[0].label(), "d00");
        assert_eq!(dict[31].label(), "d31");
        let probes = space.grid(5).unwrap();
        for phi in &dict {
            for a in &probes {
                for b in &probes {
                    let lhs = (phi.eval(&space, a).unwrap() - phi.eval(&space, b).unwrap()).abs();
                    let rhs = space.dist(a, b).unwrap();
                    assert!(lhs <= rhs + 1e-12);
                }
            }
        }
    }

    #[test]
    fn birkhoff_average_of_quarter_rotation() {
        // Rotation by 1/4 from 0 visits {0, 1/4, 1/2, 3/4} equally; distance
        // to the landmark 0 averages (0 + 1/4 + 1/2 + 1/4)/4 = 1/4.
        let f = rotation(0.25).unwrap();
        let x = f.orbit(&pt(&[0.0]), 0, 399).unwrap();
        let phi = LipFunction::new("origin", f.space(), pt(&[0.0])).unwrap();
        let avg = birkhoff_avg(f.space(), &x, &phi, 400).unwrap();
        assert!((avg - 0.25).abs() < 1e-12, "avg {avg}");
    }

    #[test]
    fn birkhoff_matches_brute_force_sum() {
        let f = toral_auto_default();
        let x = f.orbit(&pt(&[0.123, 0.456]), 0, 60).unwrap();
        let phi = LipFunction::new("probe", f.space(), pt(&[0.5, 0.5])).unwrap();
        let avg = birkhoff_avg(f.space(), &x, &phi, 50).unwrap();
        let mut sum = 0.0;
        for k in 0..50 {
            sum += f.space().dist(x.point_at(k).unwrap(), &pt(&[0.5, 0.5])).unwrap();
        }
        assert!((avg - sum / 50.0).abs() < 1e-14);
    }

    #[test]
    fn identical_trajectories_have_zero_gap() {
        let f = toral_auto_default();
        let x = f.orbit(&pt(&[0.3, 0.8]), 0, 100).unwrap();
        let dict = default_dictionary(f.space(), 8).unwrap();
        let report = eis_gap(f.space(), &x, &x, &dict, 100, 20).unwrap();
        assert_eq!(report.sup_gap, 0.0);
        assert_eq!(report.sup_abs_gap, 0.0);
        assert!(report.per_function_gap.values().all(|&g| g == 0.0));
    }

    #[test]
    fn gap_bounded_by_sup_distance() {
        // |φ(x_k) − φ(y_k)| ≤ dist(x_k, y_k), so every running average is
        // bounded by the sup-distance.
        let f = toral_auto_default();
        let m = Method::drift(f.clone(), 1e-3, 0).unwrap();
        let x = f.orbit(&pt(&[0.37, 0.52]), 0, 200).unwrap();
        let y = m.trajectory(&pt(&[0.37, 0.52]), 0, 200).unwrap();
        let sup = y.sup_distance(&x, f.space()).unwrap();
        let dict = default_dictionary(f.space(), 16).unwrap();
        let report = eis_gap(f.space(), &x, &y, &dict, 200, 40).unwrap();
        assert!(report.sup_abs_gap <= sup + 1e-12);
        assert!(report.sup_gap <= report.sup_abs_gap + 1e-15);
    }

    #[test]
    fn drift_on_circle_rotation_opens_a_gap() {
        // A drifted rotation equidistributes (irrational total step), while
        // the α = 0 base orbit stays at the initial point. Distance averages
        // to the far landmark differ by nearly the diameter's average.
        let f = rotation(0.0).unwrap();
        let m = Method::drift(f.clone(), 1e-3, 0).unwrap();
        let x = f.orbit(&pt(&[0.0]), 0, 1000).unwrap();
        let y = m.trajectory(&pt(&[0.0]), 0, 1000).unwrap();
        let dict = vec![LipFunction::new("far", f.space(), pt(&[0.5])).unwrap()];
        let report = eis_gap(f.space(), &x, &y, &dict, 1000, 100).unwrap();
        // φ(x_k) = 1/2 always; φ(y_k) averages ≈ 1/4 over a full sweep.
        assert!(report.sup_gap > 0.1, "gap {}", report.sup_gap);
    }

    #[test]
    fn eis_check_accepts_exact_method() {
        let f = toral_auto_default();
        let m = Method::exact(f.clone());
        let dict = default_dictionary(f.space(), 8).unwrap();
        let check = eis_check(
            &f,
            &m,
            &[pt(&[0.2, 0.7])],
            0.05,
            &dict,
            100,
            20,
            &SearchConfig {
                horizon: 100,
                resolution: 8,
                levels: 1,
                shrink: 8.0,
                use_tracer_seed: true,
            },
        )
        .unwrap();
        assert!(check.pass);
        assert!(check.outcomes[0].gap.abs() < 1e-10);
    }

    #[test]
    fn golden_rotation_returns_at_fibonacci_times() {
        // Best rational approximations of the golden rotation number have
        // Fibonacci denominators; the orbit of any point returns within
        // |q·α − p| at time q. Frozen distances (see the assertion values)
        // come from the continued-fraction convergents 5/8, 8/13, 13/21,
        // 21/34, 34/55 of α = 0.6180339887.
        let alpha = 0.6180339887f64;
        let f = rotation(alpha).unwrap();
        let m = Method::exact(f.clone());
        let space = f.space();
        let y0 = pt(&[0.15]);
        let traj = m.trajectory(&y0, 0, 60).unwrap();
        let dist_at = |n: i64| space.dist(traj.point_at(n).unwrap(), &y0).unwrap();
        for (n, expect) in [
            (8, 0.0557),
            (13, 0.0344),
            (21, 0.0213),
            (34, 0.0132),
            (55, 0.0081),
        ] {
            let d = dist_at(n);
            assert!(
                (d - expect).abs() < 5e-4,
                "return distance at {n}: {d} vs {expect}"
            );
        }
        // First return within each tolerance is the matching Fibonacci time.
        for (tol, expect_n) in [(0.05, 13), (0.03, 21), (0.02, 34), (0.01, 55)] {
            let witness = poisson_return(&m, &y0, 0.05, 100, tol, 40)
                .unwrap()
                .expect("rotation orbits recur");
            assert_eq!(witness.time, expect_n, "tol {tol}");
            assert!(witness.distance <= tol);
        }
    }

    #[test]
    fn doubling_periodic_point_returns_exactly() {
        // 1/3 has period 2 under doubling: 1/3 → 2/3 → 4/3 ≡ 1/3. In binary
        // floating point 1/3 is not exact, so the return distance at n = 2
        // is nonzero but at rounding scale: |4·fl(1/3) mod 1 − fl(1/3)|.
        // With fl(1/3) = 6004799503160661 / 2^54 the exact value is
        // 1/2^54 ≈ 5.55e−17 (4x − 1 = (4·6004799503160661 − 2^54)/2^54).
        let f = doubling();
        let m = Method::exact(f.clone());
        let third = 1.0f64 / 3.0;
        let expected = 1.0 / 2f64.powi(54);
        let orbit = m.trajectory(&pt(&[third]), 0, 2).unwrap();
        let d = f.space().dist(orbit.point_at(2).unwrap(), &pt(&[third])).unwrap();
        assert!((d - expected).abs() < 1e-18, "distance {d:e} vs {expected:e}");
        // The resolution-3 circle grid contains fl(1/3) itself, so the
        // search finds the period-2 return with exactly that distance.
        let witness = poisson_return(&m, &pt(&[third]), 1e-6, 10, 1e-15, 3)
            .unwrap()
            .expect("grid point 1/3 returns");
        assert_eq!(witness.time, 2);
        assert!((witness.distance - expected).abs() < 1e-18);
    }

    #[test]
    fn poisson_prefers_earliest_then_closest() {
        // Under the identity (α = 0 rotation) every point returns at n = 1
        // with distance 0; the lexicographically smallest grid point in the
        // ball must win.
        let f = rotation(0.0).unwrap();
        let m = Method::exact(f.clone());
        let witness = poisson_return(&m, &pt(&[0.5]), 0.2, 10, 1e-12, 10)
            .unwrap()
            .unwrap();
        assert_eq!(witness.time, 1);
        assert_eq!(witness.distance, 0.0);
        // Grid points in the ball are 0.3..0.7 in steps of 0.1; smallest is 0.3.
        assert!((witness.point.coords()[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_windows() {
        let f = rotation(0.1).unwrap();
        let x = f.orbit(&pt(&[0.0]), 0, 10).unwrap();
        let dict = default_dictionary(f.space(), 4).unwrap();
        assert!(eis_gap(f.space(), &x, &x, &dict, 20, 5).is_err());
        assert!(eis_gap(f.space(), &x, &x, &dict, 10, 11).is_err());
        assert!(eis_gap(f.space(), &x, &x, &dict, 0, 0).is_err());
        assert!(birkhoff_avg(f.space(), &x, &dict[0], 0).is_err());
        assert!(birkhoff_avg(f.space(), &x, &dict[0], 100).is_err());
    }
}
