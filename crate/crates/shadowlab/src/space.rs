//! Compact metric phase spaces.
//!
//! Three kinds of space are supported:
//!
//! * `Circle` — ℝ/ℤ with the quotient metric `min(|a−b|, 1−|a−b|)`,
//! * `Torus(d)` — (ℝ/ℤ)^d with the per-axis quotient metric combined in ℓ²,
//! * `Chart` — an axis-aligned box in ℝ^d with the Euclidean metric.
//!
//! Circle and torus coordinates are kept in `[0, 1)`. Charts are not
//! invariant under the maps that use them; points falling outside are clamped
//! to the boundary and the clamping is reported so orbits can record where
//! they left the box.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `resolution^dim` for [`Space::grid`].
pub const MAX_GRID_POINTS: usize = 4_194_304;

/// A point of a phase space, stored as raw coordinates.
///
/// Points carry no reference to their space; operations that combine a point
/// with a [`Space`] check the dimension and reject NaN coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Lexicographic comparison, used for deterministic tie-breaking.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            match a.partial_cmp(b) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl From<&[f64]> for Point {
    fn from(coords: &[f64]) -> Self {
        Point(coords.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(coords: [f64; N]) -> Self {
        Point(coords.to_vec())
    }
}

/// Result of [`Space::normalize`]: the canonical representative plus a flag
/// recording whether any coordinate had to be clamped to a chart boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub point: Point,
    pub clamped: bool,
}

/// A compact metric space on which maps and methods act.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    Circle,
    Torus { dim: usize },
    /// Axis-aligned box; `bounds[i] = [lo, hi]` per axis.
    Chart { bounds: Vec<[f64; 2]> },
}

impl Space {
    pub fn circle() -> Self {
        Space::Circle
    }

    pub fn torus(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("torus dimension must be positive".into()));
        }
        Ok(Space::Torus { dim })
    }

    pub fn chart(bounds: Vec<[f64; 2]>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInput("chart needs at least one axis".into()));
        }
        for (i, b) in bounds.iter().enumerate() {
            if !b[0].is_finite() || !b[1].is_finite() || b[0] >= b[1] {
                return Err(Error::InvalidInput(format!(
                    "chart axis {i} has invalid bounds [{}, {}]",
                    b[0], b[1]
                )));
            }
        }
        Ok(Space::Chart { bounds })
    }

    /// Centered square chart `[−a, a]²`.
    pub fn square_chart(a: f64) -> Result<Self> {
        Space::chart(vec![[-a, a], [-a, a]])
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Circle => 1,
            Space::Torus { dim } => *dim,
            Space::Chart { bounds } => bounds.len(),
        }
    }

    pub fn is_periodic(&self) -> bool {
        !matches!(self, Space::Chart { .. })
    }

    /// Exact diameter of the space.
    ///
    /// Circle: 1/2. Torus(d): √d/2. Chart: Euclidean diagonal of the box.
    pub fn diameter(&self) -> f64 {
        match self {
            Space::Circle => 0.5,
            Space::Torus { dim } => 0.5 * (*dim as f64).sqrt(),
            Space::Chart { bounds } => bounds
                .iter()
                .map(|b| (b[1] - b[0]).powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    pub(crate) fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        if p.0.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "point has non-finite coordinate: {:?}",
                p.0
            )));
        }
        Ok(())
    }

    /// Canonical representative of `p`: mod-1 reduction on periodic axes,
    /// clamping to the box on chart axes.
    pub fn normalize(&self, p: &Point) -> Result<Normalized> {
        self.check_point(p)?;
        match self {
            Space::Circle | Space::Torus { .. } => {
                let coords = p.0.iter().map(|&c| wrap_unit(c)).collect();
                Ok(Normalized {
                    point: Point(coords),
                    clamped: false,
                })
            }
            Space::Chart { bounds } => {
                let mut clamped = false;
                let coords = p
                    .0
                    .iter()
                    .zip(bounds.iter())
                    .map(|(&c, b)| {
                        if c < b[0] {
                            clamped = true;
                            b[0]
                        } else if c > b[1] {
                            clamped = true;
                            b[1]
                        } else {
                            c
                        }
                    })
                    .collect();
                Ok(Normalized {
                    point: Point(coords),
                    clamped,
                })
            }
        }
    }

    /// Per-axis displacement from `from` to `to`, chosen so that its
    /// Euclidean norm equals `dist(from, to)`.
    ///
    /// On periodic axes this is the representative of `to − from` in
    /// `[−1/2, 1/2)`; on chart axes it is the plain difference.
    pub fn displacement(&self, from: &Point, to: &Point) -> Result<Vec<f64>> {
        self.check_point(from)?;
        self.check_point(to)?;
        let wrap = self.is_periodic();
        Ok(from
            .0
            .iter()
            .zip(to.0.iter())
            .map(|(&a, &b)| {
                if wrap {
                    wrap_signed(b - a)
                } else {
                    b - a
                }
            })
            .collect())
    }

    /// Translate `p` by the vector `v` and normalize.
    pub fn translate(&self, p: &Point, v: &[f64]) -> Result<Normalized> {
        self.check_point(p)?;
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let moved = Point(p.0.iter().zip(v.iter()).map(|(&c, &d)| c + d).collect());
        self.normalize(&moved)
    }

    /// Distance in the space's metric.
    pub fn dist(&self, p: &Point, q: &Point) -> Result<f64> {
        let d = self.displacement(p, q)?;
        Ok(norm(&d))
    }

    /// Deterministic axis-uniform grid with the default point cap.
    ///
    /// Periodic axes take `i/resolution` for `i in 0..resolution`; chart axes
    /// take evenly spaced points including both endpoints. Points are listed
    /// in row-major order with the last axis varying fastest.
    pub fn grid(&self, resolution: usize) -> Result<Vec<Point>> {
        self.grid_with_cap(resolution, MAX_GRID_POINTS)
    }

    /// Same as [`Space::grid`] with an explicit cap on the total point count.
    pub fn grid_with_cap(&self, resolution: usize, cap: usize) -> Result<Vec<Point>> {
        if resolution == 0 {
            return Err(Error::InvalidInput("grid resolution must be positive".into()));
        }
        let dim = self.dim();
        let total = resolution
            .checked_pow(dim as u32)
            .filter(|&t| t <= cap)
            .ok_or_else(|| {
                Error::ResourceLimit(format!(
                    "grid of {resolution}^{dim} points exceeds cap {cap}"
                ))
            })?;

        let axis_values: Vec<Vec<f64>> = match self {
            Space::Circle | Space::Torus { .. } => {
                let values: Vec<f64> = (0..resolution)
                    .map(|i| i as f64 / resolution as f64)
                    .collect();
                vec![values; dim]
            }
            Space::Chart { bounds } => bounds
                .iter()
                .map(|b| {
                    if resolution == 1 {
                        vec![b[0]]
                    } else {
                        (0..resolution)
                            .map(|i| {
                                b[0] + (b[1] - b[0]) * i as f64 / (resolution - 1) as f64
                            })
                            .collect()
                    }
                })
                .collect(),
        };

        let mut points = Vec::with_capacity(total);
        let mut index = vec![0usize; dim];
        loop {
            points.push(Point(
                index.iter().enumerate().map(|(ax, &i)| axis_values[ax][i]).collect(),
            ));
            let mut ax = dim;
            loop {
                if ax == 0 {
                    return Ok(points);
                }
                ax -= 1;
                index[ax] += 1;
                if index[ax] < resolution {
                    break;
                }
                index[ax] = 0;
            }
        }
    }
}

/// Reduce a coordinate into `[0, 1)`.
pub fn wrap_unit(c: f64) -> f64 {
    let r = c.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs.
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of a periodic displacement in `[−1/2, 1/2)`.
pub fn wrap_signed(d: f64) -> f64 {
    let r = wrap_unit(d);
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Euclidean norm of a displacement vector.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn pt(coords: &[f64]) -> Point {
        Point(coords.to_vec())
    }

    #[test]
    fn circle_distance_wraps() {
        let s = Space::circle();
        assert!((s.dist(&pt(&[0.1]), &pt(&[0.9])).unwrap() - 0.2).abs() < TOL);
        assert!((s.dist(&pt(&[0.0]), &pt(&[0.5])).unwrap() - 0.5).abs() < TOL);
        assert!((s.dist(&pt(&[0.25]), &pt(&[0.3])).unwrap() - 0.05).abs() < TOL);
    }

    #[test]
    fn torus_distance_wraps_per_axis() {
        let s = Space::torus(2).unwrap();
        let d = s.dist(&pt(&[0.95, 0.5]), &pt(&[0.05, 0.5])).unwrap();
        assert!((d - 0.1).abs() < TOL);
        let d = s.dist(&pt(&[0.9, 0.9]), &pt(&[0.1, 0.1])).unwrap();
        assert!((d - (0.08f64).sqrt()).abs() < TOL);
    }

    #[test]
    fn chart_distance_is_euclidean() {
        let s = Space::square_chart(1.0).unwrap();
        let d = s.dist(&pt(&[-0.5, 0.0]), &pt(&[0.5, 0.0])).unwrap();
        assert!((d - 1.0).abs() < TOL);
    }

    #[test]
    fn diameters() {
        assert!((Space::circle().diameter() - 0.5).abs() < TOL);
        assert!((Space::torus(2).unwrap().diameter() - 0.5 * 2f64.sqrt()).abs() < TOL);
        // Chart [−1,1]²: diagonal 2√2.
        assert!((Space::square_chart(1.0).unwrap().diameter() - 2.0 * 2f64.sqrt()).abs() < TOL);
    }

    #[test]
    fn normalize_wraps_into_unit_interval() {
        let s = Space::circle();
        let n = s.normalize(&pt(&[1.3])).unwrap();
        assert!((n.point.0[0] - 0.3).abs() < TOL);
        assert!(!n.clamped);
        let n = s.normalize(&pt(&[-0.25])).unwrap();
        assert!((n.point.0[0] - 0.75).abs() < TOL);
        // Tiny negative inputs must not normalize to 1.0.
        let n = s.normalize(&pt(&[-1e-17])).unwrap();
        assert!(n.point.0[0] < 1.0);
        assert!(n.point.0[0] >= 0.0);
    }

    #[test]
    fn normalize_clamps_chart_and_raises_flag() {
        let s = Space::square_chart(1.0).unwrap();
        let n = s.normalize(&pt(&[1.5, 0.0])).unwrap();
        assert_eq!(n.point, pt(&[1.0, 0.0]));
        assert!(n.clamped);
        let n = s.normalize(&pt(&[0.5, -0.5])).unwrap();
        assert!(!n.clamped);
    }

    #[test]
    fn non_finite_coordinates_rejected() {
        let s = Space::circle();
        assert!(s.normalize(&pt(&[f64::NAN])).is_err());
        assert!(s.dist(&pt(&[f64::INFINITY]), &pt(&[0.0])).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let s = Space::torus(2).unwrap();
        assert!(matches!(
            s.dist(&pt(&[0.1]), &pt(&[0.1, 0.2])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn grid_on_torus() {
        let s = Space::torus(2).unwrap();
        let g = s.grid(2).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g[0], pt(&[0.0, 0.0]));
        assert_eq!(g[1], pt(&[0.0, 0.5]));
        assert_eq!(g[2], pt(&[0.5, 0.0]));
        assert_eq!(g[3], pt(&[0.5, 0.5]));
    }

    #[test]
    fn grid_on_chart_includes_endpoints() {
        let s = Space::chart(vec![[0.0, 1.0]]).unwrap();
        let g = s.grid(3).unwrap();
        assert_eq!(g, vec![pt(&[0.0]), pt(&[0.5]), pt(&[1.0])]);
    }

    #[test]
    fn grid_cap_enforced() {
        let s = Space::torus(2).unwrap();
        assert!(matches!(
            s.grid_with_cap(100, 512),
            Err(Error::ResourceLimit(_))
        ));
        // 3000^2 = 9e6 > default cap.
        assert!(matches!(s.grid(3000), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn displacement_norm_equals_distance() {
        let s = Space::torus(2).unwrap();
        let p = pt(&[0.9, 0.2]);
        let q = pt(&[0.1, 0.8]);
        let disp = s.displacement(&p, &q).unwrap();
        assert!((norm(&disp) - s.dist(&p, &q).unwrap()).abs() < TOL);
        // Translating by the displacement lands on the target.
        let moved = s.translate(&p, &disp).unwrap().point;
        assert!(s.dist(&moved, &q).unwrap() < TOL);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(a in -10.0..10.0f64, b in -10.0..10.0f64) {
            let s = Space::torus(2).unwrap();
            let once = s.normalize(&pt(&[a, b])).unwrap().point;
            let twice = s.normalize(&once).unwrap().point;
            prop_assert_eq!(&once, &twice);
            prop_assert!(once.0.iter().all(|&c| (0.0..1.0).contains(&c)));
        }

        #[test]
        fn metric_axioms_on_torus(
            a in 0.0..1.0f64, b in 0.0..1.0f64,
            c in 0.0..1.0f64, d in 0.0..1.0f64,
            e in 0.0..1.0f64, f in 0.0..1.0f64,
        ) {
            let s = Space::torus(2).unwrap();
            let (p, q, r) = (pt(&[a, b]), pt(&[c, d]), pt(&[e, f]));
            let pq = s.dist(&p, &q).unwrap();
            let qp = s.dist(&q, &p).unwrap();
            let qr = s.dist(&q, &r).unwrap();
            let pr = s.dist(&p, &r).unwrap();
            prop_assert!((pq - qp).abs() < TOL);
            prop_assert!(pq >= 0.0);
            prop_assert!(s.dist(&p, &p).unwrap() < TOL);
            prop_assert!(pr <= pq + qr + TOL);
            prop_assert!(pq <= s.diameter() + TOL);
        }
    }
}
