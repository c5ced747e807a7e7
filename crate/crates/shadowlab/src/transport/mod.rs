//! Discrete probability measures and exact Wasserstein-1 distances.
//!
//! All measures here are finite convex combinations of point masses. For
//! such measures the Wasserstein-1 distance is a finite transportation
//! problem, solved exactly:
//!
//! * shared atoms cancel first — by Kantorovich duality W₁ depends only on
//!   the signed difference μ−ν, so common mass can be left in place;
//! * a single remaining source or sink is a closed form;
//! * equal-count, equal-weight residuals go to an exact assignment solver;
//! * everything else is scaled to integer masses (2⁴⁴ units of total mass)
//!   and solved by successive shortest paths.
//!
//! The only approximations are f64 rounding in distances and the 2⁻⁴⁴
//! fixed-point grid, which together perturb results by less than 10⁻⁹ of
//! the space diameter — far below every tolerance used in this crate.

mod flow;
mod hungarian;

use crate::ergodic::{default_dictionary, LipFunction};
use crate::error::{Error, Result};
use crate::methods::Trajectory;
use crate::space::{Point, Space, MAX_GRID_POINTS};
use crate::systems::MapSystem;

/// Largest allowed product of residual atom counts in a single transport
/// solve (2048²). Bigger instances must be coarsened with
/// [`DiscreteMeasure::quantize`] first.
pub const MAX_TRANSPORT_PRODUCT: usize = 4_194_304;

/// Atoms closer than this (per coordinate) are merged at construction.
const MERGE_TOL: f64 = 1e-12;
/// Tolerated deviation of total mass from 1 before renormalizing.
const MASS_TOL: f64 = 1e-9;
/// Fixed-point grid for the integer flow solver.
const SCALE: f64 = (1u64 << 44) as f64;
/// Hungarian path is used for equal-weight residuals up to this size.
const MAX_ASSIGNMENT: usize = 512;

/// Atom list with residual weights, as produced by shared-mass cancellation.
type WeightedAtoms = Vec<(Point, f64)>;

/// A finitely supported probability measure on a [`Space`].
///
/// Atoms are kept sorted lexicographically with strictly positive weights
/// summing to 1; nearly coincident atoms are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: Vec<Point>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Build a measure from atoms and weights.
    ///
    /// Weights must be nonnegative and finite; zero weights are dropped;
    /// the total must be within 10⁻⁹ of 1 and is renormalized exactly to 1.
    pub fn new(space: &Space, atoms: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "{} atoms with {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.is_empty() {
            return Err(Error::InvalidInput("measure needs at least one atom".into()));
        }
        for p in &atoms {
            space.check_point(p)?;
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!(
                "weights sum to {total}, expected 1"
            )));
        }

        let mut pairs: Vec<(Point, f64)> = atoms
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0.0)
            .map(|(p, w)| {
                // Canonicalize −0.0 so equal points stay equal under sort.
                let coords = p.coords().iter().map(|&c| if c == 0.0 { 0.0 } else { c }).collect();
                (Point(coords), w / total)
            })
            .collect();
        if pairs.is_empty() {
            return Err(Error::InvalidInput("all weights are zero".into()));
        }
        pairs.sort_by(|a, b| a.0.lex_cmp(&b.0));

        let mut merged: Vec<(Point, f64)> = Vec::with_capacity(pairs.len());
        for (p, w) in pairs {
            match merged.last_mut() {
                Some((q, qw))
                    if p.coords()
                        .iter()
                        .zip(q.coords())
                        .all(|(a, b)| (a - b).abs() <= MERGE_TOL) =>
                {
                    *qw += w;
                }
                _ => merged.push((p, w)),
            }
        }
        let (atoms, weights) = merged.into_iter().unzip();
        Ok(DiscreteMeasure {
            dim: space.dim(),
            atoms,
            weights,
        })
    }

    /// The point mass at `p`.
    pub fn dirac(space: &Space, p: Point) -> Result<Self> {
        DiscreteMeasure::new(space, vec![p], vec![1.0])
    }

    /// Equal weight 1/n on the trajectory points at indices
    /// `from ..= from + n − 1`.
    pub fn empirical(space: &Space, traj: &Trajectory, from: i64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("empirical measure needs n ≥ 1".into()));
        }
        let mut atoms = Vec::with_capacity(n);
        for k in from..from + n as i64 {
            let p = traj.point_at(k).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "trajectory window [{}, {}] has no index {k}",
                    traj.n_from(),
                    traj.n_to()
                ))
            })?;
            atoms.push(p.clone());
        }
        let w = 1.0 / n as f64;
        DiscreteMeasure::new(space, atoms, vec![w; n])
    }

    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// ∫ φ dμ.
    pub fn integrate(&self, space: &Space, phi: &LipFunction) -> Result<f64> {
        let mut sum = 0.0;
        for (p, w) in self.atoms.iter().zip(&self.weights) {
            sum += w * phi.eval(space, p)?;
        }
        Ok(sum)
    }

    /// Image measure under the map: each atom moves to its image, weights
    /// unchanged (then re-merged). Never increases the atom count.
    pub fn pushforward(&self, f: &MapSystem) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for p in &self.atoms {
            atoms.push(f.eval(p)?);
        }
        DiscreteMeasure::new(f.space(), atoms, self.weights.clone())
    }

    /// Convex combination Σ λᵢ μᵢ. The λᵢ must be nonnegative and sum to 1.
    pub fn mix(space: &Space, parts: &[(f64, &DiscreteMeasure)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("mix needs at least one part".into()));
        }
        let total: f64 = parts.iter().map(|(l, _)| *l).sum();
        if parts.iter().any(|(l, _)| *l < 0.0) || (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!(
                "mixture weights must be nonnegative and sum to 1 (got {total})"
            )));
        }
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for (lambda, mu) in parts {
            if *lambda == 0.0 {
                continue;
            }
            for (p, w) in mu.atoms.iter().zip(&mu.weights) {
                atoms.push(p.clone());
                weights.push(lambda * w);
            }
        }
        DiscreteMeasure::new(space, atoms, weights)
    }

    /// Snap every atom to the center of its cell on a `resolution`-per-axis
    /// lattice, merging atoms that land together.
    ///
    /// Moves each atom by at most [`quantization_radius`], so W₁ between a
    /// measure and its quantization is bounded by that radius.
    pub fn quantize(&self, space: &Space, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidInput("quantize needs resolution ≥ 1".into()));
        }
        if (resolution as f64).powi(self.dim as i32) > MAX_GRID_POINTS as f64 {
            return Err(Error::ResourceLimit(format!(
                "quantize lattice {resolution}^{} too large",
                self.dim
            )));
        }
        let snap_unit = |c: f64| -> f64 {
            let t = c.rem_euclid(1.0);
            let idx = ((t * resolution as f64).floor() as usize).min(resolution - 1);
            (idx as f64 + 0.5) / resolution as f64
        };
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for p in &self.atoms {
            let coords = match space {
                Space::Chart { bounds } => p
                    .coords()
                    .iter()
                    .zip(bounds)
                    .map(|(&c, b)| {
                        let width = b[1] - b[0];
                        let t = ((c - b[0]) / width).clamp(0.0, 1.0);
                        let idx = ((t * resolution as f64).floor() as usize).min(resolution - 1);
                        b[0] + (idx as f64 + 0.5) * width / resolution as f64
                    })
                    .collect(),
                _ => p.coords().iter().map(|&c| snap_unit(c)).collect(),
            };
            atoms.push(Point(coords));
        }
        DiscreteMeasure::new(space, atoms, self.weights.clone())
    }
}

/// Largest distance an atom can move under [`DiscreteMeasure::quantize`]:
/// half the cell diagonal.
pub fn quantization_radius(space: &Space, resolution: usize) -> Result<f64> {
    if resolution == 0 {
        return Err(Error::InvalidInput("quantize needs resolution ≥ 1".into()));
    }
    let r = resolution as f64;
    Ok(match space {
        Space::Chart { bounds } => {
            0.5 * bounds
                .iter()
                .map(|b| ((b[1] - b[0]) / r).powi(2))
                .sum::<f64>()
                .sqrt()
        }
        _ => 0.5 * (space.dim() as f64).sqrt() / r,
    })
}

/// Exact Wasserstein-1 distance between two discrete measures.
pub fn w1(space: &Space, a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<f64> {
    Ok(w1_opts(space, a, b, true, false, None)?.expect("uncapped solve always completes"))
}

/// Internal entry point with solver controls, used by cross-check tests and
/// the hull search: `cancel` toggles shared-atom cancellation, `force_flow`
/// bypasses the closed forms and the assignment path, and with `cap` the
/// flow solver may abandon early (returning `None`) once the distance
/// provably exceeds the cap.
pub(crate) fn w1_opts(
    space: &Space,
    a: &DiscreteMeasure,
    b: &DiscreteMeasure,
    cancel: bool,
    force_flow: bool,
    cap: Option<f64>,
) -> Result<Option<f64>> {
    if a.dim != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: a.dim,
        });
    }
    if b.dim != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: b.dim,
        });
    }

    let (ra, rb) = if cancel {
        cancel_shared(a, b)
    } else {
        (
            a.atoms.iter().cloned().zip(a.weights.iter().copied()).collect(),
            b.atoms.iter().cloned().zip(b.weights.iter().copied()).collect(),
        )
    };
    if ra.is_empty() || rb.is_empty() {
        // Cancellation consumed everything: the measures coincide.
        return Ok(Some(0.0));
    }
    let n = ra.len();
    let m = rb.len();
    if n * m > MAX_TRANSPORT_PRODUCT {
        return Err(Error::ResourceLimit(format!(
            "transport instance {n}×{m} atoms exceeds {MAX_TRANSPORT_PRODUCT}; \
             coarsen the measures with quantize first"
        )));
    }

    if !force_flow {
        if n == 1 {
            let mut cost = 0.0;
            for (q, w) in &rb {
                cost += w * space.dist(&ra[0].0, q)?;
            }
            return Ok(Some(cost));
        }
        if m == 1 {
            let mut cost = 0.0;
            for (p, w) in &ra {
                cost += w * space.dist(p, &rb[0].0)?;
            }
            return Ok(Some(cost));
        }
        let w0 = ra[0].1;
        if n == m
            && n <= MAX_ASSIGNMENT
            && ra.iter().all(|(_, w)| *w == w0)
            && rb.iter().all(|(_, w)| *w == w0)
        {
            let mut cost = vec![0.0f64; n * n];
            for (i, (p, _)) in ra.iter().enumerate() {
                for (j, (q, _)) in rb.iter().enumerate() {
                    cost[i * n + j] = space.dist(p, q)?;
                }
            }
            let assign = hungarian::min_assignment(&cost, n);
            return Ok(Some(w0 * hungarian::assignment_cost(&cost, n, &assign)));
        }
    }

    // Integer flow on the 2⁻⁴⁴ fixed-point grid.
    let mut supply: Vec<i64> = ra
        .iter()
        .map(|(_, w)| ((w * SCALE).round() as i64).max(1))
        .collect();
    let mut demand: Vec<i64> = rb
        .iter()
        .map(|(_, w)| ((w * SCALE).round() as i64).max(1))
        .collect();
    let (ta, tb) = (supply.iter().sum::<i64>(), demand.iter().sum::<i64>());
    if ta > tb {
        let heaviest = (0..m).max_by_key(|&j| demand[j]).unwrap();
        demand[heaviest] += ta - tb;
    } else if tb > ta {
        let heaviest = (0..n).max_by_key(|&i| supply[i]).unwrap();
        supply[heaviest] += tb - ta;
    }

    let mut cost = vec![0.0f64; n * m];
    for (i, (p, _)) in ra.iter().enumerate() {
        for (j, (q, _)) in rb.iter().enumerate() {
            cost[i * m + j] = space.dist(p, q)?;
        }
    }
    let arcs = match flow::solve(&cost, n, m, &supply, &demand, cap.map(|c| c * SCALE))? {
        Some(arcs) => arcs,
        None => return Ok(None),
    };
    let mut total = 0.0;
    for arc in &arcs {
        total += (arc.amount as f64 / SCALE) * cost[arc.from * m + arc.to];
    }
    Ok(Some(total))
}

/// Remove mass shared atom-by-atom: both inputs are sorted, so one merge
/// walk finds coincident atoms and cancels `min` of the two weights.
fn cancel_shared(a: &DiscreteMeasure, b: &DiscreteMeasure) -> (WeightedAtoms, WeightedAtoms) {
    let mut ra = Vec::new();
    let mut rb = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.atoms.len() && j < b.atoms.len() {
        match a.atoms[i].lex_cmp(&b.atoms[j]) {
            std::cmp::Ordering::Less => {
                ra.push((a.atoms[i].clone(), a.weights[i]));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                rb.push((b.atoms[j].clone(), b.weights[j]));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = a.weights[i].min(b.weights[j]);
                let wa = a.weights[i] - c;
                let wb = b.weights[j] - c;
                if wa > 0.0 {
                    ra.push((a.atoms[i].clone(), wa));
                }
                if wb > 0.0 {
                    rb.push((b.atoms[j].clone(), wb));
                }
                i += 1;
                j += 1;
            }
        }
    }
    while i < a.atoms.len() {
        ra.push((a.atoms[i].clone(), a.weights[i]));
        i += 1;
    }
    while j < b.atoms.len() {
        rb.push((b.atoms[j].clone(), b.weights[j]));
        j += 1;
    }
    (ra, rb)
}

/// Kantorovich dual lower bound: max over the dictionary of |∫φdμ − ∫φdν|.
///
/// Every dictionary function is 1-Lipschitz, so this never exceeds W₁; it
/// is cheap (no transport solve) and is used to prune exact computations.
pub fn w1_dual_lb(
    space: &Space,
    a: &DiscreteMeasure,
    b: &DiscreteMeasure,
    dictionary: &[LipFunction],
) -> Result<f64> {
    if dictionary.is_empty() {
        return Err(Error::InvalidInput("empty dictionary".into()));
    }
    let mut best = 0.0f64;
    for phi in dictionary {
        best = best.max((a.integrate(space, phi)? - b.integrate(space, phi)?).abs());
    }
    Ok(best)
}

/// W₁ distance between the empirical measure of the first n orbit points
/// and its image under the map.
///
/// Writing μ for the empirical measure on x₀..x_{n−1}, the image measure
/// lives on x₁..x_n, the shared atoms cancel, and the residual is the pair
/// (x₀, x_n) with mass 1/n — so the residual is at most diameter/n, which
/// quantifies how close long orbit averages are to invariance.
pub fn invariance_residual(f: &MapSystem, x0: &Point, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("invariance residual needs n ≥ 1".into()));
    }
    let traj = f.orbit(x0, 0, n as i64)?;
    if traj.n_to() < n as i64 {
        return Err(Error::Unsupported(format!(
            "orbit left the chart at step {}, before n = {n}",
            traj.n_to()
        )));
    }
    let mu = DiscreteMeasure::empirical(f.space(), &traj, 0, n)?;
    let image = mu.pushforward(f)?;
    w1(f.space(), &mu, &image)
}

/// A labelled finite family of measures, compared as a set.
#[derive(Debug, Clone)]
pub struct MeasureSet {
    pub label: String,
    pub members: Vec<DiscreteMeasure>,
}

impl MeasureSet {
    pub fn new(label: impl Into<String>, members: Vec<DiscreteMeasure>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("measure set needs members".into()));
        }
        Ok(MeasureSet {
            label: label.into(),
            members,
        })
    }
}

/// Controls for [`set_inclusion_gap`].
#[derive(Debug, Clone)]
pub struct InclusionOptions {
    /// Convex combinations of up to this many members of B (1..=3).
    pub max_combo: usize,
    /// Mixture weights move on a 1/weight_resolution grid.
    pub weight_resolution: usize,
    /// Dictionary for the pruning lower bounds; defaults to the 32-landmark
    /// dictionary of the space.
    pub dictionary: Option<Vec<LipFunction>>,
}

impl Default for InclusionOptions {
    fn default() -> Self {
        InclusionOptions {
            max_combo: 3,
            weight_resolution: 10,
            dictionary: None,
        }
    }
}

/// Closest approximation found for one member of A.
#[derive(Debug, Clone)]
pub struct MemberGap {
    pub member_index: usize,
    /// W₁ distance to the best convex combination.
    pub distance: f64,
    /// The combination: (index into B, weight) pairs.
    pub combo: Vec<(usize, f64)>,
}

/// Directed inclusion gap of A in the convex-combination hull of B.
#[derive(Debug, Clone)]
pub struct InclusionReport {
    /// max over A of the per-member distance: 0 iff every member of A is
    /// (on the weight grid) a combination of members of B.
    pub gap: f64,
    pub per_member: Vec<MemberGap>,
    /// How many exact W₁ solves were needed across all members.
    pub combos_evaluated: usize,
    /// How many candidate combinations the dual bound ruled out.
    pub combos_pruned: usize,
}

/// How far each member of A is from the convex hull of B, measured in W₁
/// against combinations of at most `max_combo` members with gridded weights.
///
/// Exact over the searched family: candidates are ordered by a dual lower
/// bound and evaluation stops only when the bound already exceeds the
/// incumbent, which cannot discard a better combination.
pub fn set_inclusion_gap(
    space: &Space,
    a: &MeasureSet,
    b: &MeasureSet,
    opts: &InclusionOptions,
) -> Result<InclusionReport> {
    if !(1..=3).contains(&opts.max_combo) {
        return Err(Error::InvalidInput(
            "inclusion gap supports combinations of 1 to 3 members".into(),
        ));
    }
    if opts.weight_resolution == 0 {
        return Err(Error::InvalidInput("weight_resolution must be ≥ 1".into()));
    }
    let dictionary = match &opts.dictionary {
        Some(d) if !d.is_empty() => d.clone(),
        Some(_) => return Err(Error::InvalidInput("empty dictionary".into())),
        None => default_dictionary(space, 32)?,
    };

    // ∫φ dν for every member of B and every dictionary function, so combo
    // lower bounds are linear forms instead of transport solves.
    let b_integrals: Vec<Vec<f64>> = b
        .members
        .iter()
        .map(|nu| {
            dictionary
                .iter()
                .map(|phi| nu.integrate(space, phi))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let combos = enumerate_combos(b.members.len(), opts.max_combo, opts.weight_resolution);

    let mut per_member = Vec::with_capacity(a.members.len());
    let mut combos_evaluated = 0usize;
    let mut combos_pruned = 0usize;
    for (ai, mu) in a.members.iter().enumerate() {
        let a_integrals = dictionary
            .iter()
            .map(|phi| mu.integrate(space, phi))
            .collect::<Result<Vec<f64>>>()?;
        let mut scored: Vec<(f64, &Vec<(usize, f64)>)> = combos
            .iter()
            .map(|combo| {
                let mut lb = 0.0f64;
                for (phi_i, target) in a_integrals.iter().enumerate() {
                    let mut val = 0.0;
                    for &(bi, lambda) in combo {
                        val += lambda * b_integrals[bi][phi_i];
                    }
                    lb = lb.max((target - val).abs());
                }
                (lb, combo)
            })
            .collect();
        scored.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut best = f64::INFINITY;
        let mut best_combo: Vec<(usize, f64)> = Vec::new();
        for (rank, (lb, combo)) in scored.iter().enumerate() {
            if *lb >= best {
                combos_pruned += scored.len() - rank;
                break;
            }
            let parts: Vec<(f64, &DiscreteMeasure)> = combo
                .iter()
                .map(|&(bi, lambda)| (lambda, &b.members[bi]))
                .collect();
            let mixed = DiscreteMeasure::mix(space, &parts)?;
            // The incumbent caps the solve: combos whose partial transport
            // cost already exceeds it are abandoned mid-solve.
            let cap = best.is_finite().then_some(best);
            combos_evaluated += 1;
            if let Some(dist) = w1_opts(space, mu, &mixed, true, false, cap)? {
                if dist < best {
                    best = dist;
                    best_combo = (*combo).clone();
                }
            }
        }
        per_member.push(MemberGap {
            member_index: ai,
            distance: best,
            combo: best_combo,
        });
    }
    let gap = per_member
        .iter()
        .map(|g| g.distance)
        .fold(0.0f64, f64::max);
    Ok(InclusionReport {
        gap,
        per_member,
        combos_evaluated,
        combos_pruned,
    })
}

/// All convex combinations of 1..=max_size distinct indices with weights on
/// the 1/resolution grid (each weight ≥ 1/resolution).
fn enumerate_combos(
    member_count: usize,
    max_size: usize,
    resolution: usize,
) -> Vec<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    let max_size = max_size.min(member_count);
    let mut indices = Vec::new();
    fn index_subsets(
        start: usize,
        count: usize,
        size: usize,
        current: &mut Vec<usize>,
        sink: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == size {
            sink.push(current.clone());
            return;
        }
        for i in start..count {
            current.push(i);
            index_subsets(i + 1, count, size, current, sink);
            current.pop();
        }
    }
    fn compositions(total: usize, parts: usize, current: &mut Vec<usize>, sink: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if total >= 1 {
                current.push(total);
                sink.push(current.clone());
                current.pop();
            }
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            current.push(first);
            compositions(total - first, parts - 1, current, sink);
            current.pop();
        }
    }
    for size in 1..=max_size {
        let mut subsets = Vec::new();
        index_subsets(0, member_count, size, &mut indices, &mut subsets);
        let mut weight_rows = Vec::new();
        compositions(resolution, size, &mut Vec::new(), &mut weight_rows);
        for subset in &subsets {
            for row in &weight_rows {
                out.push(
                    subset
                        .iter()
                        .zip(row)
                        .map(|(&bi, &units)| (bi, units as f64 / resolution as f64))
                        .collect(),
                );
            }
        }
    }
    out
}
