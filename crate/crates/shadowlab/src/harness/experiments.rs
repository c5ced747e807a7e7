//! The six packaged experiments.
//!
//! Every experiment is a pure function of its [`ResolvedConfig`]: samples
//! are drawn from a splitmix64 stream seeded by the config, all collections
//! iterate in deterministic order, and no wall-clock state enters the
//! results. Gates encode the claims under test; advisories record sharper
//! bounds that are informative but not load-bearing.

use crate::ergodic::{default_dictionary, eis_gap, poisson_return};
use crate::error::{Error, Result};
use crate::methods::{Method, Trajectory};
use crate::shadowing::{best_shadow, estimate_psi, first_exit_time, hyperbolic_trace, SearchConfig};
use crate::space::{Point, Space};
use crate::systems::{rotation, MapSystem};
use crate::transport::{
    quantization_radius, set_inclusion_gap, w1, DiscreteMeasure, InclusionOptions, MeasureSet,
};

use super::config::{ExperimentKind, ResolvedConfig};
use super::report::{ExperimentReport, Table, Verdict};

/// Run one experiment to a finished report (timing is added by the caller).
pub fn run(kind: ExperimentKind, cfg: &ResolvedConfig) -> Result<ExperimentReport> {
    match kind {
        ExperimentKind::HyperbolicEis => hyperbolic_eis(cfg),
        ExperimentKind::WeakContinuity => weak_continuity(cfg),
        ExperimentKind::Usc => usc(cfg),
        ExperimentKind::Escape => escape(cfg),
        ExperimentKind::FixedSegment => fixed_segment(cfg),
        ExperimentKind::Poisson => poisson(cfg),
    }
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit(state: &mut u64) -> f64 {
    (splitmix(state) >> 11) as f64 / (1u64 << 53) as f64
}

/// Deterministic sample points in the unit cube derived from the seed.
fn seeded_points(seed: u64, salt: u64, count: usize, dim: usize) -> Vec<Point> {
    let mut state = seed ^ salt;
    (0..count)
        .map(|_| Point((0..dim).map(|_| unit(&mut state)).collect()))
        .collect()
}

fn fmt_point(p: &Point) -> String {
    p.coords()
        .iter()
        .map(|c| format!("{c}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// A reference trajectory the dynamics is compared against: either a
/// genuine computed orbit or an exactly periodic cycle written out by hand
/// (computed orbits of unstable cycles drift off them at rounding scale,
/// amplified exponentially, so cycles are laid down directly and verified).
struct Reference {
    label: String,
    defining: Trajectory,
}

fn cycle_verifies(f: &MapSystem, cycle: &[Point]) -> Result<bool> {
    let mut p = cycle[0].clone();
    for k in 1..=cycle.len() {
        p = f.eval(&p)?;
        if f.space().dist(&p, &cycle[k % cycle.len()])? > 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The reference family: one generic orbit plus every catalog cycle that
/// verifies as periodic for this map (fixed point of the linear toral maps,
/// and the short cycles of the default automorphism).
fn reference_family(f: &MapSystem, n: usize, seed: u64) -> Result<Vec<Reference>> {
    let space = f.space();
    let x0 = seeded_points(seed, 0x5EED_0000_0000_0001, 1, space.dim())
        .pop()
        .unwrap();
    let mut refs = vec![Reference {
        label: "orbit".into(),
        defining: f.orbit(&x0, 0, n as i64)?,
    }];
    let candidates: Vec<(&str, Vec<Point>)> = vec![
        ("fixed_point", vec![Point(vec![0.0; space.dim()])]),
        ("period2", vec![Point(vec![0.2, 0.4]), Point(vec![0.8, 0.6])]),
        (
            "period3",
            vec![
                Point(vec![0.25, 0.0]),
                Point(vec![0.5, 0.25]),
                Point(vec![0.25, 0.75]),
            ],
        ),
    ];
    for (label, cycle) in candidates {
        if cycle[0].dim() != space.dim() {
            continue;
        }
        if !cycle_verifies(f, &cycle)? {
            continue;
        }
        let pts: Vec<Point> = (0..=n).map(|k| cycle[k % cycle.len()].clone()).collect();
        refs.push(Reference {
            label: label.into(),
            defining: Trajectory::new(0, pts, None),
        });
    }
    Ok(refs)
}

fn quantized_empirical(
    space: &Space,
    traj: &Trajectory,
    n: usize,
    resolution: usize,
) -> Result<DiscreteMeasure> {
    DiscreteMeasure::empirical(space, traj, 0, n)?.quantize(space, resolution)
}

// ---------------------------------------------------------------------------
// hyperbolic_eis
// ---------------------------------------------------------------------------

/// Every adversary of the pool is traced around sampled orbits of the
/// hyperbolic toral automorphism; sup-distances must stay within the tracing
/// constant times d, and running-average gaps of the Lipschitz dictionary
/// must stay within ε (they are bounded by the sup-distance pointwise).
fn hyperbolic_eis(cfg: &ResolvedConfig) -> Result<ExperimentReport> {
    let f = cfg.map.build()?;
    let hyp = f.hyperbolic_data().ok_or_else(|| {
        Error::Config("hyperbolic_eis needs a hyperbolic map (use toral_auto)".into())
    })?;
    let c = hyp.tracing_constant();
    let space = f.space().clone();
    let pool = cfg.pool.materialize(&f, cfg.d)?;
    let dict = default_dictionary(&space, 32)?;
    let samples = seeded_points(cfg.seed, 0x5EED_0000_0000_0002, cfg.samples, space.dim());
    let horizon = cfg.horizon as usize;
    let tail = cfg.tail_window.min(horizon);
    let search = SearchConfig {
        horizon: cfg.horizon,
        ..cfg.search.clone()
    };

    let mut report = ExperimentReport::new(cfg.clone());
    let mut table = Table::new(&[
        "sample",
        "x0",
        "method",
        "sup_distance",
        "eis_gap",
        "eis_abs_gap",
    ]);
    let mut worst_sup = 0.0f64;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_abs_gap = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for (si, x0) in samples.iter().enumerate() {
        let orbit = f.orbit(x0, 0, cfg.horizon)?;
        for m in &pool {
            let shadow = best_shadow(&orbit, m, &search)?;
            let gaps = eis_gap(&space, &orbit, &shadow.trajectory, &dict, horizon, tail)?;
            worst_sup = worst_sup.max(shadow.sup_distance);
            worst_gap = worst_gap.max(gaps.sup_gap);
            worst_abs_gap = worst_abs_gap.max(gaps.sup_abs_gap);
            worst_excess = worst_excess.max(gaps.sup_abs_gap - shadow.sup_distance);
            table.push(vec![
                si.to_string(),
                fmt_point(x0),
                m.descriptor(),
                format!("{}", shadow.sup_distance),
                format!("{}", gaps.sup_gap),
                format!("{}", gaps.sup_abs_gap),
            ]);
        }
    }

    report.scalar("tracing_constant", c);
    report.scalar("c_times_d", c * cfg.d);
    report.scalar("worst_sup_distance", worst_sup);
    report.scalar("worst_eis_gap", worst_gap);
    report.scalar("worst_eis_abs_gap", worst_abs_gap);
    report.record(Verdict::gate(
        "pointwise_tracking",
        worst_sup <= c * cfg.d + 1e-9,
        worst_sup,
        c * cfg.d,
        format!(
            "worst best-shadow sup over {} samples × {} adversaries vs C·d",
            cfg.samples,
            pool.len()
        ),
    ));
    report.record(Verdict::gate(
        "ergodic_tracking",
        worst_gap <= cfg.epsilon,
        worst_gap,
        cfg.epsilon,
        "worst signed running-average gap over the Lipschitz dictionary".into(),
    ));
    report.record(Verdict::gate(
        "gap_bounded_by_sup",
        worst_excess <= 1e-9,
        worst_excess,
        0.0,
        "running-average gaps never exceed the sup-distance".into(),
    ));
    report.table("tracking", table);
    Ok(report)
}

// ---------------------------------------------------------------------------
// weak_continuity
// ---------------------------------------------------------------------------

/// For each reference measure (generic orbit, fixed point, short cycles)
/// and each pool adversary, the tracer produces a method trajectory along
/// the same reference; the W₁ distance between the quantized empirical
/// measures of the pair must stay below ε, and (advisory) below the sharp
/// bound C·d + 2·(quantization radius).
fn weak_continuity(cfg: &ResolvedConfig) -> Result<ExperimentReport> {
    let f = cfg.map.build()?;
    let hyp = f.hyperbolic_data().ok_or_else(|| {
        Error::Config("weak_continuity needs a hyperbolic map (use toral_auto)".into())
    })?;
    let c = hyp.tracing_constant();
    let space = f.space().clone();
    let n = cfg.measure_horizon;
    let q = cfg.quantize_resolution;
    let pool = cfg.pool.materialize(&f, cfg.d)?;
    let refs = reference_family(&f, n, cfg.seed)?;
    let radius = quantization_radius(&space, q)?;
    let bound = c * cfg.d + 2.0 * radius;

    let mut report = ExperimentReport::new(cfg.clone());
    let mut table = Table::new(&["reference", "method", "w1", "trace_sup"]);
    let mut worst_pair = 0.0f64;
    for reference in &refs {
        let ref_measure = quantized_empirical(&space, &reference.defining, n, q)?;
        for m in &pool {
            let traced = hyperbolic_trace(&f, m, &reference.defining)?;
            let sup = traced.sup_distance(&reference.defining, &space)?;
            let traced_measure = quantized_empirical(&space, &traced, n, q)?;
            let dist = w1(&space, &ref_measure, &traced_measure)?;
            worst_pair = worst_pair.max(dist);
            table.push(vec![
                reference.label.clone(),
                m.descriptor(),
                format!("{dist}"),
                format!("{sup}"),
            ]);
        }
    }

    report.scalar("tracing_constant", c);
    report.scalar("quantization_radius", radius);
    report.scalar("pair_bound", bound);
    report.scalar("worst_pair_w1", worst_pair);
    report.record(Verdict::gate(
        "weak_continuity",
        worst_pair <= cfg.epsilon,
        worst_pair,
        cfg.epsilon,
        format!(
            "worst matched-pair W1 over {} references × {} adversaries",
            refs.len(),
            pool.len()
        ),
    ));
    report.record(Verdict::advisory(
        "pair_bound",
        worst_pair <= bound + 1e-9,
        worst_pair,
        bound,
        "matched pairs obey C·d plus twice the quantization radius".into(),
    ));
    report.table("pairs", table);
    Ok(report)
}

// ---------------------------------------------------------------------------
// usc
// ---------------------------------------------------------------------------

/// Along a decreasing ladder of method bounds d, empirical measures of
/// method trajectories are compared against the convex hull of the
/// reference family. The inclusion gap must shrink (within slack) as d
/// shrinks and end below ε at the final level.
fn usc(cfg: &ResolvedConfig) -> Result<ExperimentReport> {
    if cfg.d_ladder.is_empty() {
        return Err(Error::Config("usc needs a nonempty d_ladder".into()));
    }
    let f = cfg.map.build()?;
    let space = f.space().clone();
    let n = cfg.measure_horizon;
    let q = cfg.quantize_resolution;
    let refs = reference_family(&f, n, cfg.seed)?;
    let ref_measures: Vec<DiscreteMeasure> = refs
        .iter()
        .map(|r| quantized_empirical(&space, &r.defining, n, q))
        .collect::<Result<Vec<_>>>()?;
    let ref_set = MeasureSet::new("references", ref_measures)?;
    let samples = seeded_points(cfg.seed, 0x5EED_0000_0000_0003, cfg.samples, space.dim());

    let mut report = ExperimentReport::new(cfg.clone());
    let mut table = Table::new(&["level", "d", "gap", "worst_member", "w1_solves"]);
    let mut gaps = Vec::new();
    for (li, &d) in cfg.d_ladder.iter().enumerate() {
        // Same samples and method seeds at every level, so the only change
        // from level to level is the bound d itself.
        let pool = cfg.pool.materialize(&f, d)?;
        let mut members = Vec::new();
        let mut labels = Vec::new();
        for (si, x0) in samples.iter().enumerate() {
            for m in &pool {
                let traj = m.trajectory(x0, 0, n as i64)?;
                members.push(quantized_empirical(&space, &traj, n, q)?);
                labels.push(format!("sample{si}:{}", m.descriptor()));
            }
        }
        let member_set = MeasureSet::new(format!("methods@d={d}"), members)?;
        let inclusion =
            set_inclusion_gap(&space, &member_set, &ref_set, &InclusionOptions::default())?;
        let worst = inclusion
            .per_member
            .iter()
            .max_by(|a, b| a.distance.total_cmp(&b.distance))
            .expect("nonempty member set");
        table.push(vec![
            li.to_string(),
            format!("{d}"),
            format!("{}", inclusion.gap),
            labels[worst.member_index].clone(),
            inclusion.combos_evaluated.to_string(),
        ]);
        gaps.push(inclusion.gap);
    }

    let final_gap = *gaps.last().unwrap();
    let worst_increase = gaps
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    report.scalar("final_gap", final_gap);
    for (li, g) in gaps.iter().enumerate() {
        report.scalar(&format!("gap_level_{li}"), *g);
    }
    report.record(Verdict::gate(
        "final_gap",
        final_gap <= cfg.epsilon,
        final_gap,
        cfg.epsilon,
        format!("inclusion gap at d = {}", cfg.d_ladder.last().unwrap()),
    ));
    let monotone_slack = 0.01;
    report.record(Verdict::gate(
        "monotone_decrease",
        cfg.d_ladder.len() < 2 || worst_increase <= monotone_slack,
        if worst_increase.is_finite() { worst_increase } else { 0.0 },
        monotone_slack,
        "gap may not grow by more than the slack as d decreases".into(),
    ));
    report.table("ladder", table);
    Ok(report)
}

// ---------------------------------------------------------------------------
// escape
// ---------------------------------------------------------------------------

/// A constant drift of size δ pushed along the fixed circle leaves the
/// ε-ball of a fixed point at step k ≈ ε/δ. For ladder levels with
/// ε/δ ∈ [10, 1000] the law |k − ε/δ| ≤ 2 is gated, consecutive valid
/// levels must scale by ≈ 10, and no choice of initial point shadows the
/// fixed point within ε over a 3ε/δ window.
fn escape(cfg: &ResolvedConfig) -> Result<ExperimentReport> {
    if cfg.d_ladder.is_empty() {
        return Err(Error::Config("escape needs a nonempty d_ladder".into()));
    }
    let f = cfg.map.build()?;
    let space = f.space().clone();
    if space.dim() < 1 {
        return Err(Error::Config("escape needs a positive-dimensional space".into()));
    }
    let eps = cfg.epsilon;
    let mut state = cfg.seed ^ 0x5EED_0000_0000_0004;
    let u_star = unit(&mut state);
    let mut center_coords = vec![0.0; space.dim()];
    center_coords[0] = u_star;
    let center = Point(center_coords);
    // The center must actually be fixed, or the exit law has no anchor.
    let image = f.eval(&center)?;
    if space.dist(&image, &center)? > 1e-12 {
        return Err(Error::Config(format!(
            "escape center {} is not a fixed point of {}",
            fmt_point(&center),
            f.name()
        )));
    }

    let mut report = ExperimentReport::new(cfg.clone());
    let mut table = Table::new(&[
        "delta",
        "eps_over_delta",
        "valid",
        "horizon",
        "exit_step",
        "deviation",
        "shadow_sup",
    ]);
    let mut worst_dev = 0.0f64;
    let mut min_shadow = f64::INFINITY;
    let mut exits: Vec<(f64, bool, Option<i64>)> = Vec::new();
    for &delta in &cfg.d_ladder {
        let expect = eps / delta;
        let valid = (10.0..=1000.0).contains(&expect);
        let horizon = (3.0 * eps / delta).ceil() as i64;
        let m = Method::drift(f.clone(), delta, 0)?;
        let exit = first_exit_time(&m, &center, &center, eps, horizon)?;
        let orbit = f.orbit(&center, 0, horizon)?;
        let search = SearchConfig {
            horizon,
            ..cfg.search.clone()
        };
        let shadow = best_shadow(&orbit, &m, &search)?;
        let deviation = exit.map(|k| (k as f64 - expect).abs());
        if valid {
            worst_dev = worst_dev.max(deviation.unwrap_or(f64::INFINITY));
            min_shadow = min_shadow.min(shadow.sup_distance);
        }
        table.push(vec![
            format!("{delta}"),
            format!("{expect}"),
            valid.to_string(),
            horizon.to_string(),
            exit.map_or("none".into(), |k| k.to_string()),
            deviation.map_or("".into(), |d| format!("{d}")),
            format!("{}", shadow.sup_distance),
        ]);
        exits.push((delta, valid, exit));
    }

    report.scalar("worst_exit_deviation", worst_dev);
    report.scalar("min_shadow_sup", min_shadow);
    report.record(Verdict::gate(
        "exit_law",
        worst_dev <= 2.0,
        worst_dev,
        2.0,
        "first exit step stays within 2 of ε/δ on valid levels".into(),
    ));

    let mut worst_ratio_dev: Option<f64> = None;
    for pair in exits.windows(2) {
        let (d0, v0, k0) = pair[0];
        let (d1, v1, k1) = pair[1];
        if v0 && v1 {
            if let (Some(k0), Some(k1)) = (k0, k1) {
                let ratio = k1 as f64 / k0 as f64;
                let expected = d0 / d1;
                let dev = (ratio - expected).abs();
                worst_ratio_dev = Some(worst_ratio_dev.map_or(dev, |w: f64| w.max(dev)));
                report.scalar(&format!("scaling_ratio_{d0}_{d1}"), ratio);
            }
        }
    }
    match worst_ratio_dev {
        Some(dev) => report.record(Verdict::gate(
            "exit_scaling",
            dev <= 1.0,
            dev,
            1.0,
            "exit steps of consecutive valid levels scale like their δ ratio ± 1".into(),
        )),
        None => report.record(Verdict::gate(
            "exit_scaling",
            true,
            0.0,
            1.0,
            "no consecutive ladder pair lies in the ε/δ ∈ [10, 1000] window".into(),
        )),
    }
    report.record(Verdict::gate(
        "no_initial_point_shadows",
        min_shadow > eps,
        min_shadow,
        eps,
        "every initial point is swept out of the ε-ball over the 3ε/δ window".into(),
    ));
    report.table("ladder", table);
    Ok(report)
}

// ---------------------------------------------------------------------------
// fixed_segment
// ---------------------------------------------------------------------------

/// Points on the attracting fixed circle are fixed, so their orbits are
/// constants; a drifting adversary defeats every one of them at every
/// ladder level, and the uniform measure on the segment is exactly
/// invariant (residual identically zero).
fn fixed_segment(cfg: &ResolvedConfig) -> Result<ExperimentReport> {
    if cfg.d_ladder.is_empty() {
        return Err(Error::Config("fixed_segment needs a nonempty d_ladder".into()));
    }
    let f = cfg.map.build()?;
    let space = f.space().clone();
    if space.dim() != 2 {
        return Err(Error::Config(
            "fixed_segment needs the two-dimensional degenerate map".into(),
        ));
    }
    let samples: Vec<Point> = (0..cfg.samples)
        .map(|i| Point(vec![(i as f64 + 0.5) / cfg.samples as f64, 0.0]))
        .collect();
    for p in &samples {
        let image = f.eval(p)?;
        if space.dist(&image, p)? != 0.0 {
            return Err(Error::Config(format!(
                "sample {} is not exactly fixed under {}",
                fmt_point(p),
                f.name()
            )));
        }
    }

    let search = SearchConfig {
        horizon: cfg.horizon,
        ..cfg.search.clone()
    };
    let psi = estimate_psi(&f, &samples, cfg.epsilon, &cfg.d_ladder, &cfg.pool, &search)?;

    let mut report = ExperimentReport::new(cfg.clone());
    let mut table = Table::new(&["sample", "u", "d", "defeated_by", "sup_distance"]);
    let mut total = 0usize;
    let mut defeated = 0usize;
    let mut drift_witnesses = 0usize;
    for (si, sample) in psi.samples.iter().enumerate() {
        for level in &sample.levels {
            total += 1;
            match &level.defeated {
                Some(w) => {
                    defeated += 1;
                    if w.method.starts_with("drift") {
                        drift_witnesses += 1;
                    }
                    table.push(vec![
                        si.to_string(),
                        format!("{}", sample.point.coords()[0]),
                        format!("{}", level.d),
                        w.method.clone(),
                        format!("{}", w.sup_distance),
                    ]);
                }
                None => table.push(vec![
                    si.to_string(),
                    format!("{}", sample.point.coords()[0]),
                    format!("{}", level.d),
                    "".into(),
                    "".into(),
                ]),
            }
        }
    }

    // The uniform measure on the sampled segment, pushed through the map.
    let n = samples.len();
    let segment =
        DiscreteMeasure::new(&space, samples.clone(), vec![1.0 / n as f64; n])?;
    let image = segment.pushforward(&f)?;
    let residual = w1(&space, &segment, &image)?;

    let defeated_fraction = defeated as f64 / total as f64;
    let drift_fraction = if defeated > 0 {
        drift_witnesses as f64 / defeated as f64
    } else {
        0.0
    };
    report.scalar("defeated_fraction", defeated_fraction);
    report.scalar("drift_witness_fraction", drift_fraction);
    report.scalar("segment_residual", residual);
    report.record(Verdict::gate(
        "all_defeated",
        defeated == total,
        defeated_fraction,
        1.0,
        format!("{defeated}/{total} (sample, level) pairs defeated by the pool"),
    ));
    report.record(Verdict::gate(
        "drift_witnesses",
        defeated > 0 && drift_witnesses == defeated,
        drift_fraction,
        1.0,
        "every recorded defeat comes from a drift adversary".into(),
    ));
    report.record(Verdict::gate(
        "segment_invariance",
        residual == 0.0,
        residual,
        0.0,
        "the segment measure is exactly invariant (W1 residual identically zero)".into(),
    ));
    report.table("defeats", table);
    Ok(report)
}

// ---------------------------------------------------------------------------
// poisson
// ---------------------------------------------------------------------------

/// Near-returns survive perturbation: for the rotation perturbed by d (a
/// constant method at distance exactly d), every sampled region contains a
/// grid point whose trajectory returns within the tolerance inside the
/// horizon.
fn poisson(cfg: &ResolvedConfig) -> Result<ExperimentReport> {
    let f = cfg.map.build()?;
    if f.name() != "rotation" {
        return Err(Error::Config("poisson needs the rotation map".into()));
    }
    let alpha = f.params()["alpha"];
    let perturbed = rotation(alpha + cfg.d)?;
    let m = Method::constant(f.clone(), perturbed, cfg.d)?;
    let space = f.space().clone();
    let centers = seeded_points(cfg.seed, 0x5EED_0000_0000_0005, cfg.samples, space.dim());

    let mut report = ExperimentReport::new(cfg.clone());
    // Spot-check the claimed method bound on a grid before using it.
    let observed = m.verify_d_bound(256, 4)?;
    report.record(Verdict::advisory(
        "method_certificate",
        observed <= cfg.d + 1e-9,
        observed,
        cfg.d,
        "observed C⁰ distance of the perturbed rotation matches its certificate".into(),
    ));

    let mut table = Table::new(&["sample", "center", "witness", "time", "distance"]);
    let mut found = 0usize;
    let mut max_time = 0i64;
    let mut max_distance = 0.0f64;
    for (si, center) in centers.iter().enumerate() {
        let witness = poisson_return(
            &m,
            center,
            cfg.epsilon,
            cfg.horizon,
            cfg.tolerance,
            cfg.grid_resolution,
        )?;
        match witness {
            Some(w) => {
                found += 1;
                max_time = max_time.max(w.time);
                max_distance = max_distance.max(w.distance);
                table.push(vec![
                    si.to_string(),
                    fmt_point(center),
                    fmt_point(&w.point),
                    w.time.to_string(),
                    format!("{}", w.distance),
                ]);
            }
            None => table.push(vec![
                si.to_string(),
                fmt_point(center),
                "none".into(),
                "".into(),
                "".into(),
            ]),
        }
    }

    report.scalar("alpha", alpha);
    report.scalar("perturbed_alpha", alpha + cfg.d);
    report.scalar("returns_found", found as f64);
    report.scalar("max_return_time", max_time as f64);
    report.scalar("max_return_distance", max_distance);
    report.record(Verdict::gate(
        "returns_exist",
        found == centers.len(),
        found as f64 / centers.len() as f64,
        1.0,
        format!("{found}/{} sampled regions produced a return witness", centers.len()),
    ));
    report.record(Verdict::gate(
        "return_quality",
        found == centers.len() && max_distance <= cfg.tolerance,
        max_distance,
        cfg.tolerance,
        "every witness returns within the tolerance".into(),
    ));
    report.record(Verdict::gate(
        "within_horizon",
        found == centers.len() && max_time <= cfg.horizon,
        max_time as f64,
        cfg.horizon as f64,
        "every witness returns inside the search horizon".into(),
    ));
    report.table("witnesses", table);
    Ok(report)
}
