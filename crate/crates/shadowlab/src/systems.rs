//! Catalog of concrete dynamical systems on compact spaces.
//!
//! Every map comes with its space, named parameters, an exact Lipschitz
//! bound, whether it is invertible, and (for hyperbolic toral automorphisms)
//! the eigendata that drives the hyperbolic tracer.
//!
//! The catalog:
//!
//! * `rotation(α)` — x ↦ x + α on the circle; isometry.
//! * `doubling()` — x ↦ 2x on the circle; expanding, not invertible.
//! * `toral_auto(A)` — x ↦ Ax on T² for a hyperbolic integer matrix with
//!   |det A| = 1; the default A = [[2,1],[1,1]].
//! * `degenerate_circle_line(β)` — (u,v) ↦ (u, v − β·sin(2πv)/(2π)) on T²;
//!   every point of the circle {v = 0} is fixed, nearby v contracts to it.
//! * `chart_linear(λ, a)` — (u,v) ↦ (u, λv) on the chart [−a,a]²; the chart
//!   is not invariant, orbits record where they leave it.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::methods::Trajectory;
use crate::space::{Normalized, Point, Space};

/// Eigendata of a hyperbolic 2×2 toral automorphism.
///
/// `lambda_s` and `lambda_u` are the signed stable and unstable eigenvalues
/// (|λ_s| < 1 < |λ_u|); `v_s` and `v_u` are unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicData {
    pub lambda_s: f64,
    pub lambda_u: f64,
    pub v_s: [f64; 2],
    pub v_u: [f64; 2],
}

impl HyperbolicData {
    /// Tracing constant 1/(1−|λ_s|) + 1/(|λ_u|−1).
    ///
    /// A method trajectory constructed by geometric-series corrections along
    /// the stable and unstable directions stays within this constant times
    /// the method's C⁰ distance of the exact orbit.
    pub fn tracing_constant(&self) -> f64 {
        1.0 / (1.0 - self.lambda_s.abs()) + 1.0 / (self.lambda_u.abs() - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum MapKind {
    Rotation { alpha: f64 },
    Doubling,
    ToralAuto { a: [[i64; 2]; 2] },
    DegenerateCircleLine { beta: f64 },
    ChartLinear { lambda: f64 },
}

/// A concrete self-map of a compact space.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSystem {
    name: String,
    space: Space,
    kind: MapKind,
    params: BTreeMap<String, f64>,
    invertible: bool,
    hyperbolic: Option<HyperbolicData>,
}

/// Circle rotation x ↦ x + α.
pub fn rotation(alpha: f64) -> Result<MapSystem> {
    if !alpha.is_finite() {
        return Err(Error::InvalidInput("rotation angle must be finite".into()));
    }
    Ok(MapSystem {
        name: "rotation".into(),
        space: Space::circle(),
        kind: MapKind::Rotation { alpha },
        params: BTreeMap::from([("alpha".into(), alpha)]),
        invertible: true,
        hyperbolic: None,
    })
}

/// Circle doubling x ↦ 2x.
pub fn doubling() -> MapSystem {
    MapSystem {
        name: "doubling".into(),
        space: Space::circle(),
        kind: MapKind::Doubling,
        params: BTreeMap::new(),
        invertible: false,
        hyperbolic: None,
    }
}

/// Hyperbolic toral automorphism x ↦ Ax on T².
///
/// `A` must be an integer matrix with |det A| = 1 and no eigenvalue of
/// modulus one.
pub fn toral_auto(a: [[i64; 2]; 2]) -> Result<MapSystem> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() != 1 {
        return Err(Error::InvalidInput(format!(
            "toral automorphism needs |det A| = 1, got det = {det}"
        )));
    }
    let hyperbolic = eigendata(a).ok_or_else(|| {
        Error::InvalidInput(format!("matrix {a:?} is not hyperbolic"))
    })?;
    let params = BTreeMap::from([
        ("a00".into(), a[0][0] as f64),
        ("a01".into(), a[0][1] as f64),
        ("a10".into(), a[1][0] as f64),
        ("a11".into(), a[1][1] as f64),
    ]);
    Ok(MapSystem {
        name: "toral_auto".into(),
        space: Space::torus(2)?,
        kind: MapKind::ToralAuto { a },
        params,
        invertible: true,
        hyperbolic: Some(hyperbolic),
    })
}

/// The default hyperbolic automorphism, A = [[2,1],[1,1]].
pub fn toral_auto_default() -> MapSystem {
    toral_auto([[2, 1], [1, 1]]).expect("default matrix is hyperbolic")
}

/// Degenerate map (u,v) ↦ (u, v − β·sin(2πv)/(2π)) on T², β ∈ (0,1).
///
/// The circle {v = 0} consists of fixed points; the v-dynamics contracts a
/// neighbourhood of it with multiplier 1 − β.
pub fn degenerate_circle_line(beta: f64) -> Result<MapSystem> {
    if !(0.0..1.0).contains(&beta) || beta == 0.0 {
        return Err(Error::InvalidInput(format!(
            "degenerate_circle_line needs β in (0,1), got {beta}"
        )));
    }
    Ok(MapSystem {
        name: "degenerate_circle_line".into(),
        space: Space::torus(2)?,
        kind: MapKind::DegenerateCircleLine { beta },
        params: BTreeMap::from([("beta".into(), beta)]),
        invertible: true,
        hyperbolic: None,
    })
}

/// Linear chart map (u,v) ↦ (u, λv) on [−a,a]², clamped to the chart.
///
/// Models a one-dimensional curve of fixed points (the u-axis) with linear
/// transverse dynamics; the chart is not invariant, so orbits may exit.
pub fn chart_linear(lambda: f64, a: f64) -> Result<MapSystem> {
    if !lambda.is_finite() || !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidInput(
            "chart_linear needs finite λ and half-width a > 0".into(),
        ));
    }
    Ok(MapSystem {
        name: "chart_linear".into(),
        space: Space::square_chart(a)?,
        kind: MapKind::ChartLinear { lambda },
        params: BTreeMap::from([("lambda".into(), lambda), ("half_width".into(), a)]),
        invertible: false,
        hyperbolic: None,
    })
}

impl MapSystem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn invertible(&self) -> bool {
        self.invertible
    }

    pub fn hyperbolic_data(&self) -> Option<&HyperbolicData> {
        self.hyperbolic.as_ref()
    }

    /// The matrix of a linear toral automorphism, if this map is one.
    pub fn linear_matrix(&self) -> Option<[[f64; 2]; 2]> {
        match &self.kind {
            MapKind::ToralAuto { a } => Some([
                [a[0][0] as f64, a[0][1] as f64],
                [a[1][0] as f64, a[1][1] as f64],
            ]),
            _ => None,
        }
    }

    /// Exact Lipschitz constant of the map in the space's metric.
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.kind {
            MapKind::Rotation { .. } => 1.0,
            MapKind::Doubling => 2.0,
            MapKind::ToralAuto { a } => operator_norm(*a),
            // Derivative is diag(1, 1 − β·cos(2πv)); the sup over v is 1 + β.
            MapKind::DegenerateCircleLine { beta } => 1.0 + beta,
            MapKind::ChartLinear { lambda } => lambda.abs().max(1.0),
        }
    }

    /// Image of `p`, with chart clamping reported.
    pub fn eval_exit(&self, p: &Point) -> Result<Normalized> {
        let p = self.space.normalize(p)?.point;
        let raw = match &self.kind {
            MapKind::Rotation { alpha } => vec![p.0[0] + alpha],
            MapKind::Doubling => vec![2.0 * p.0[0]],
            MapKind::ToralAuto { a } => vec![
                a[0][0] as f64 * p.0[0] + a[0][1] as f64 * p.0[1],
                a[1][0] as f64 * p.0[0] + a[1][1] as f64 * p.0[1],
            ],
            MapKind::DegenerateCircleLine { beta } => {
                vec![p.0[0], p.0[1] - beta * (TAU * p.0[1]).sin() / TAU]
            }
            MapKind::ChartLinear { lambda } => vec![p.0[0], lambda * p.0[1]],
        };
        self.space.normalize(&Point(raw))
    }

    /// Image of `p` (clamped silently on charts).
    pub fn eval(&self, p: &Point) -> Result<Point> {
        Ok(self.eval_exit(p)?.point)
    }

    /// Preimage of `p` for invertible maps.
    pub fn inverse_eval(&self, p: &Point) -> Result<Point> {
        let p = self.space.normalize(p)?.point;
        let raw = match &self.kind {
            MapKind::Rotation { alpha } => vec![p.0[0] - alpha],
            MapKind::ToralAuto { a } => {
                let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) as f64;
                // Integer inverse: adj(A)/det with det = ±1.
                let inv = [
                    [a[1][1] as f64 / det, -a[0][1] as f64 / det],
                    [-a[1][0] as f64 / det, a[0][0] as f64 / det],
                ];
                vec![
                    inv[0][0] * p.0[0] + inv[0][1] * p.0[1],
                    inv[1][0] * p.0[0] + inv[1][1] * p.0[1],
                ]
            }
            MapKind::DegenerateCircleLine { beta } => {
                vec![p.0[0], psi_inverse(*beta, p.0[1])]
            }
            MapKind::Doubling | MapKind::ChartLinear { .. } => {
                return Err(Error::Unsupported(format!(
                    "{} is not invertible",
                    self.name
                )))
            }
        };
        Ok(self.space.normalize(&Point(raw))?.point)
    }

    /// Orbit of `p` over the index window `[n_from, n_to]` with 0 inside.
    ///
    /// The point at index 0 is `p` itself (normalized). Negative indices need
    /// an invertible map. On charts the forward orbit truncates at the first
    /// clamped point, whose index is recorded as `exit_index`.
    pub fn orbit(&self, p: &Point, n_from: i64, n_to: i64) -> Result<Trajectory> {
        if n_from > 0 || n_to < 0 || n_from > n_to {
            return Err(Error::InvalidInput(format!(
                "orbit window [{n_from}, {n_to}] must contain 0"
            )));
        }
        if n_from < 0 && !self.invertible {
            return Err(Error::Unsupported(format!(
                "backward orbit of non-invertible map {}",
                self.name
            )));
        }
        let start = self.space.normalize(p)?.point;

        let mut backward = Vec::new();
        let mut cursor = start.clone();
        for _ in 0..(-n_from) {
            cursor = self.inverse_eval(&cursor)?;
            backward.push(cursor.clone());
        }
        backward.reverse();

        let mut points = backward;
        points.push(start.clone());
        let mut exit_index = None;
        let mut cursor = start;
        for k in 0..n_to {
            let step = self.eval_exit(&cursor)?;
            cursor = step.point.clone();
            points.push(step.point);
            if step.clamped {
                exit_index = Some(k + 1);
                break;
            }
        }
        Ok(Trajectory::new(n_from, points, exit_index))
    }
}

/// Largest singular value of an integer 2×2 matrix.
fn operator_norm(a: [[i64; 2]; 2]) -> f64 {
    let (a00, a01, a10, a11) = (
        a[0][0] as f64,
        a[0][1] as f64,
        a[1][0] as f64,
        a[1][1] as f64,
    );
    // Largest eigenvalue of AᵀA via trace and determinant.
    let t = a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11;
    let d = (a00 * a11 - a01 * a10).powi(2);
    (0.5 * (t + (t * t - 4.0 * d).sqrt())).sqrt()
}

fn eigendata(a: [[i64; 2]; 2]) -> Option<HyperbolicData> {
    let tr = (a[0][0] + a[1][1]) as f64;
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) as f64;
    let disc = tr * tr - 4.0 * det;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let (l1, l2) = ((tr + sq) / 2.0, (tr - sq) / 2.0);
    let (lambda_u, lambda_s) = if l1.abs() >= l2.abs() { (l1, l2) } else { (l2, l1) };
    if lambda_u.abs() <= 1.0 + 1e-9 || lambda_s.abs() >= 1.0 - 1e-9 {
        return None;
    }
    Some(HyperbolicData {
        lambda_s,
        lambda_u,
        v_s: unit_eigenvector(a, lambda_s),
        v_u: unit_eigenvector(a, lambda_u),
    })
}

fn unit_eigenvector(a: [[i64; 2]; 2], lambda: f64) -> [f64; 2] {
    let (a00, a01, a10, a11) = (
        a[0][0] as f64,
        a[0][1] as f64,
        a[1][0] as f64,
        a[1][1] as f64,
    );
    // Null vector of (A − λI); pick the better-conditioned of the two rows.
    let c1 = [a01, lambda - a00];
    let c2 = [lambda - a11, a10];
    let n1 = (c1[0] * c1[0] + c1[1] * c1[1]).sqrt();
    let n2 = (c2[0] * c2[0] + c2[1] * c2[1]).sqrt();
    let (c, n) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
    let mut v = [c[0] / n, c[1] / n];
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        v = [-v[0], -v[1]];
    }
    v
}

/// Monotone inverse of ψ(v) = v − β·sin(2πv)/(2π) on [0,1].
fn psi_inverse(beta: f64, w: f64) -> f64 {
    let psi = |v: f64| v - beta * (TAU * v).sin() / TAU;
    let dpsi = |v: f64| 1.0 - beta * (TAU * v).cos();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut v = w;
    for _ in 0..100 {
        let f = psi(v) - w;
        if f.abs() < 1e-15 {
            break;
        }
        if f > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let next = v - f / dpsi(v);
        v = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    v
}
