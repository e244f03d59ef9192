//! Compact phase spaces, metrics and continuous semiflows.
//!
//! Everything downstream consumes three ingredients: a [`MetricSpace`]
//! (coordinates, compact bounds, a distance oracle), a [`Semiflow`]
//! (an exact forward-time evolution map) and [`Point`]s tagged with the
//! space they belong to. Flows are supplied as closed-form evaluators
//! rather than ODE integrators, so no integration error enters the
//! entropy estimates downstream.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance for membership in a compact region and for point equality.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// How far outside a region a coordinate vector lies (zero inside).
pub type ExcessFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Distance oracle over coordinate vectors.
pub type DistanceFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Forward-evolution map of a semiflow.
pub type EvolveFn = Arc<dyn Fn(f64, &Point) -> Point + Send + Sync>;

/// Maximum coordinate dimension of a phase space.
pub const MAX_DIM: usize = 4;

/// Identifier of a phase space; points carry it so cross-space distance
/// queries can be rejected.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SpaceId(pub &'static str);

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl Serialize for SpaceId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.0)
    }
}

/// Inline coordinate vector (dimension at most [`MAX_DIM`]); keeps the hot
/// distance loops allocation-free.
#[derive(Clone, Copy, PartialEq)]
pub struct Coords {
    data: [f64; MAX_DIM],
    len: u8,
}

impl Coords {
    pub fn new(values: &[f64]) -> Self {
        assert!(values.len() <= MAX_DIM, "dimension above {MAX_DIM}");
        let mut data = [0.0; MAX_DIM];
        data[..values.len()].copy_from_slice(values);
        Coords {
            data,
            len: values.len() as u8,
        }
    }
}

impl Deref for Coords {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.data[..self.len as usize]
    }
}

impl fmt::Debug for Coords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self[..])
    }
}

impl Serialize for Coords {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self[..].serialize(s)
    }
}

/// A point of a phase space.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct Point {
    coords: Coords,
    space: SpaceId,
}

impl Point {
    pub fn new(space: SpaceId, coords: &[f64]) -> Self {
        Point {
            coords: Coords::new(coords),
            space,
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }

    /// Lexicographic comparison of coordinates (total order; coordinates
    /// are always finite here).
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        for (a, b) in self.coords.iter().zip(other.coords.iter()) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.coords.len().cmp(&other.coords.len())
    }
}

/// Compact region descriptor: a bounding box plus an `excess` function that
/// reports how far outside the region a coordinate vector lies (zero inside).
#[derive(Clone)]
pub struct Bounds {
    lo: Coords,
    hi: Coords,
    excess: ExcessFn,
}

impl Bounds {
    /// Axis-aligned box `[lo, hi]`.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Self {
        assert_eq!(lo.len(), hi.len());
        let lo_c = Coords::new(lo);
        let hi_c = Coords::new(hi);
        Bounds {
            lo: lo_c,
            hi: hi_c,
            excess: Arc::new(move |x: &[f64]| {
                let mut worst: f64 = 0.0;
                for (i, &v) in x.iter().enumerate() {
                    worst = worst.max(lo_c[i] - v).max(v - hi_c[i]);
                }
                worst
            }),
        }
    }

    /// Box plus a custom excess function for regions that are not boxes
    /// (e.g. an annulus).
    pub fn with_excess(
        lo: &[f64],
        hi: &[f64],
        excess: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Bounds {
            lo: Coords::new(lo),
            hi: Coords::new(hi),
            excess: Arc::new(excess),
        }
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    /// How far outside the region the coordinates are; `<= tol` means inside.
    pub fn excess(&self, coords: &[f64]) -> f64 {
        (self.excess)(coords)
    }

    pub fn contains(&self, coords: &[f64]) -> bool {
        self.excess(coords) <= MEMBERSHIP_TOL
    }
}

/// A compact metric space with a distance oracle.
#[derive(Clone)]
pub struct MetricSpace {
    id: SpaceId,
    dimension: usize,
    bounds: Bounds,
    metric: DistanceFn,
}

impl MetricSpace {
    pub fn new(
        id: SpaceId,
        dimension: usize,
        bounds: Bounds,
        metric: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        MetricSpace {
            id,
            dimension,
            bounds,
            metric: Arc::new(metric),
        }
    }

    /// Euclidean space restricted to the given bounds.
    pub fn euclidean(id: SpaceId, dimension: usize, bounds: Bounds) -> Self {
        MetricSpace::new(id, dimension, bounds, |a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
    }

    pub fn id(&self) -> SpaceId {
        self.id
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// Construct a member point, validating dimension and bounds.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        if coords.len() != self.dimension {
            return Err(Error::domain(format!(
                "expected {} coordinates, got {}",
                self.dimension,
                coords.len()
            )));
        }
        let excess = self.bounds.excess(coords);
        if excess > MEMBERSHIP_TOL {
            return Err(Error::domain(format!(
                "coordinates {coords:?} lie outside {} by {excess:.3e}",
                self.id
            )));
        }
        Ok(Point::new(self.id, coords))
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.space == self.id && self.bounds.contains(p.coords())
    }

    /// Metric value; symmetric and non-negative. Errors on a space mismatch.
    pub fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        if x.space != self.id {
            return Err(Error::SpaceMismatch(x.space, self.id));
        }
        if y.space != self.id {
            return Err(Error::SpaceMismatch(y.space, self.id));
        }
        Ok(self.dist_unchecked(x, y))
    }

    #[inline]
    pub fn dist_unchecked(&self, x: &Point, y: &Point) -> f64 {
        (self.metric)(x.coords(), y.coords())
    }
}

/// A continuous semiflow given by an exact evolution map.
#[derive(Clone)]
pub struct Semiflow {
    space: Arc<MetricSpace>,
    map: EvolveFn,
    description: String,
}

impl Semiflow {
    pub fn new(
        space: Arc<MetricSpace>,
        description: impl Into<String>,
        map: impl Fn(f64, &Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        Semiflow {
            space,
            map: Arc::new(map),
            description: description.into(),
        }
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Forward evolution by time `t >= 0`.
    pub fn evolve(&self, t: f64, x: &Point) -> Result<Point> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if x.space() != self.space.id() {
            return Err(Error::SpaceMismatch(x.space(), self.space.id()));
        }
        Ok(self.evolve_unchecked(t, x))
    }

    #[inline]
    pub fn evolve_unchecked(&self, t: f64, x: &Point) -> Point {
        (self.map)(t, x)
    }
}

/// Largest grid-tested `beta` such that every sampled orbit moves less than
/// `alpha` over any time interval shorter than `beta` within `[0, t_max]`.
///
/// The scan certifies candidate values on a uniform grid of step
/// `alpha / 20`; the returned value is a verified witness, not a supremum.
/// Degenerates to the grid step itself when nothing larger verifies.
pub fn uniform_time_modulus(
    flow: &Semiflow,
    alpha: f64,
    sample: &[Point],
    t_max: f64,
) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(Error::domain("alpha must be positive"));
    }
    if sample.is_empty() {
        return Err(Error::domain("sample must be nonempty"));
    }
    let step = alpha / 20.0;
    let n = (t_max / step).ceil() as usize;
    let space = flow.space();
    // Smallest observed gap |t - u| with dist >= alpha, over all samples.
    let mut min_violation = t_max + step;
    for x in sample {
        let orbit: Vec<Point> = (0..=n)
            .map(|i| flow.evolve_unchecked((i as f64 * step).min(t_max), x))
            .collect();
        for i in 0..orbit.len() {
            let mut j = i + 1;
            while j < orbit.len() {
                let gap = (j - i) as f64 * step;
                if gap >= min_violation {
                    break;
                }
                if space.dist_unchecked(&orbit[i], &orbit[j]) >= alpha {
                    min_violation = gap;
                    break;
                }
                j += 1;
            }
        }
    }
    // Largest grid multiple strictly below the first violation.
    let k = ((min_violation - step * 1e-9) / step).floor() as usize;
    Ok((k.max(1) as f64 * step).min(t_max))
}

/// Spot-check of the metric axioms on sampled triples. Returns the worst
/// violation found (identity, symmetry or triangle inequality); zero for a
/// clean pass.
pub fn metric_spot_check(space: &MetricSpace, sample: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    let n = sample.len();
    for i in 0..n {
        worst = worst.max(space.dist_unchecked(&sample[i], &sample[i]).abs());
        for j in (i + 1)..n {
            let dij = space.dist_unchecked(&sample[i], &sample[j]);
            let dji = space.dist_unchecked(&sample[j], &sample[i]);
            worst = worst.max((dij - dji).abs());
            worst = worst.max(-dij);
            for k in 0..n {
                let dik = space.dist_unchecked(&sample[i], &sample[k]);
                let dkj = space.dist_unchecked(&sample[k], &sample[j]);
                worst = worst.max(dij - dik - dkj);
            }
        }
    }
    worst
}
