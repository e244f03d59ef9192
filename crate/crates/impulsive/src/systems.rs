//! Built-in systems with analytically known behavior.
//!
//! Three references anchor the test suites:
//!
//! * [`annulus`] — rotation on the annulus `1 <= r <= 2` with an impulse on
//!   the positive x-axis ray that halves the radial excess and lands on the
//!   opposite ray. Orbits contract onto the unit circle, all entropy
//!   estimates are zero, and every derived constant has a closed form.
//! * [`rotation`] — the same annulus without any impulse: an isometry, the
//!   zero-entropy continuous reference.
//! * [`doubling_suspension`] — unit-roof suspension of angle doubling on
//!   the circle, the positive-entropy reference with growth rate `ln 2`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::impulse::{Dynamics, ImpulseMap, ImpulseSet, ImpulsiveSystem, SystemConstants};
use crate::space::{Bounds, MetricSpace, Point, Semiflow, SpaceId, MEMBERSHIP_TOL};

/// A named reference value with the tolerance at which the pipeline must
/// reproduce it.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticFact {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    /// Where the value comes from (closed form, fixed point, ...).
    pub basis: &'static str,
}

/// A built-in system together with its reference values and samplers.
#[derive(Clone)]
pub struct ExampleSpec {
    pub name: &'static str,
    pub summary: &'static str,
    pub dynamics: Dynamics,
    pub facts: Vec<AnalyticFact>,
    /// Marked cross-section whose hit times give an admissible time
    /// function for continuous flows (and an alternative one for
    /// impulsive systems).
    pub section: Option<ImpulseSet>,
    /// Gap bound of the section-hit sequence.
    pub section_gap: f64,
    grid_fn: Arc<dyn Fn(usize) -> Vec<Point> + Send + Sync>,
    seeded_fn: Arc<dyn Fn(usize, u64) -> Vec<Point> + Send + Sync>,
}

impl ExampleSpec {
    /// Deterministic grid sample of about `n` points.
    pub fn grid(&self, n: usize) -> Vec<Point> {
        (self.grid_fn)(n)
    }

    /// Seeded quasi-uniform sample of `n` points.
    pub fn seeded(&self, n: usize, seed: u64) -> Vec<Point> {
        (self.seeded_fn)(n, seed)
    }
}

pub fn names() -> &'static [&'static str] {
    &["annulus", "rotation", "doubling"]
}

pub fn by_name(name: &str) -> Result<ExampleSpec> {
    match name {
        "annulus" => Ok(annulus()),
        "rotation" => Ok(rotation()),
        "doubling" | "doubling-suspension" => Ok(doubling_suspension()),
        other => Err(Error::InvalidConfig(format!(
            "unknown example '{other}'; available: {:?}",
            names()
        ))),
    }
}

/// Angle of a planar point normalized to `[0, 2*pi)`.
pub fn angle_of(x: f64, y: f64) -> f64 {
    let th = y.atan2(x);
    if th < 0.0 {
        th + TAU
    } else {
        th
    }
}

fn annulus_space(id: SpaceId) -> Arc<MetricSpace> {
    Arc::new(MetricSpace::euclidean(
        id,
        2,
        Bounds::with_excess(&[-2.0, -2.0], &[2.0, 2.0], |c| {
            let r = c[0].hypot(c[1]);
            (1.0 - r).max(r - 2.0).max(0.0)
        }),
    ))
}

fn rotation_flow(space: Arc<MetricSpace>) -> Arc<Semiflow> {
    Arc::new(Semiflow::new(
        space,
        "unit-speed counterclockwise rotation",
        |t, x| {
            let (px, py) = (x.coord(0), x.coord(1));
            let r = px.hypot(py);
            let th = angle_of(px, py) + t;
            Point::new(x.space(), &[r * th.cos(), r * th.sin()])
        },
    ))
}

/// Positive x-axis ray `{(x, 0): 1 <= x <= 2}` as an impulse/section set.
fn axis_ray(id: SpaceId, lo: f64, hi: f64) -> ImpulseSet {
    // Crossing function: the y coordinate. It vanishes on the whole x-axis;
    // membership filters the requested ray.
    let inside = move |p: &Point| {
        let (x, y) = (p.coord(0), p.coord(1));
        y.abs() <= MEMBERSHIP_TOL && x >= lo - MEMBERSHIP_TOL && x <= hi + MEMBERSHIP_TOL
    };
    ImpulseSet::new(
        1,
        |p| p.coord(1),
        inside,
        move |s| Point::new(id, &[lo + s * (hi - lo), 0.0]),
    )
}

/// The impulsive annulus system: rotation plus the radius-halving reset.
///
/// The reset sends `(r, 0)` to the point at angle `pi` and radius
/// `(1 + r) / 2`; its Lipschitz constant is `1/2`, the gap between the
/// impulse ray and its image is `2`, impulse times are `pi` apart after the
/// first jump, and orbits converge geometrically to the unit circle.
pub fn annulus() -> ExampleSpec {
    let sys = annulus_family(0.5, 0.5, PI, 0.2).expect("reference parameters are valid");
    let space = sys.space().clone();
    let id = space.id();
    let dynamics = Dynamics::Impulsive(Arc::new(sys));
    ExampleSpec {
        name: "annulus",
        summary: "rotating annulus with a radius-halving impulse on the positive x-axis",
        dynamics,
        facts: vec![
            AnalyticFact {
                name: "impulse_lipschitz",
                value: 0.5,
                tolerance: 1e-9,
                basis: "affine radius map with slope 1/2",
            },
            AnalyticFact {
                name: "set_image_gap",
                value: 2.0,
                tolerance: 1e-6,
                basis: "distance between (1,0) and (-1,0)",
            },
            AnalyticFact {
                name: "impulse_time_gap",
                value: PI,
                tolerance: 1e-9,
                basis: "half revolution from the landing ray back to the impulse ray",
            },
            AnalyticFact {
                name: "tau_entropy",
                value: 0.0,
                tolerance: 0.05,
                basis: "orbits contract onto an isometrically rotating circle",
            },
            AnalyticFact {
                name: "attractor_radius",
                value: 1.0,
                tolerance: 1e-6,
                basis: "fixed point of r -> (1 + r)/2",
            },
        ],
        section: Some(axis_ray(id, 1.0, 2.0)),
        section_gap: TAU,
        grid_fn: Arc::new(move |n| annulus_grid(id, n, None)),
        seeded_fn: Arc::new(move |n, seed| annulus_seeded(id, n, seed, None)),
    }
}

/// The same annulus rotation with no impulse set: an isometric flow.
pub fn rotation() -> ExampleSpec {
    let space = annulus_space(SpaceId("rotation"));
    let id = space.id();
    let flow = rotation_flow(space);
    ExampleSpec {
        name: "rotation",
        summary: "isometric rotation of the annulus (no impulses)",
        dynamics: Dynamics::Flow(flow),
        facts: vec![
            AnalyticFact {
                name: "entropy",
                value: 0.0,
                tolerance: 0.02,
                basis: "isometries never separate orbits",
            },
            AnalyticFact {
                name: "period",
                value: TAU,
                tolerance: 1e-12,
                basis: "unit angular speed",
            },
        ],
        section: Some(axis_ray(id, 1.0, 2.0)),
        section_gap: TAU,
        grid_fn: Arc::new(move |n| annulus_grid(id, n, None)),
        seeded_fn: Arc::new(move |n, seed| annulus_seeded(id, n, seed, None)),
    }
}

/// Annulus systems with a configurable reset: the image of `(r, 0)` is the
/// point at angle `angle` and radius `offset + slope * r`. The reference
/// system is `annulus_family(0.5, 0.5, pi, 0.2)`. Invalid geometry (image
/// radius leaving `[1, 2]`) is rejected; hypothesis violations (image too
/// close to the impulse ray) are left for `check_conditions` to expose.
pub fn annulus_family(offset: f64, slope: f64, angle: f64, xi: f64) -> Result<ImpulsiveSystem> {
    let rho = move |r: f64| offset + slope * r;
    for r in [1.0, 2.0] {
        let im = rho(r);
        if !(1.0 - 1e-12..=2.0 + 1e-12).contains(&im) {
            return Err(Error::InvalidConfig(format!(
                "impulse image radius {im} at r = {r} leaves the annulus"
            )));
        }
    }
    if !(0.0..TAU).contains(&angle) {
        return Err(Error::InvalidConfig("angle must lie in [0, 2*pi)".into()));
    }
    let space = annulus_space(SpaceId("annulus"));
    let id = space.id();
    let flow = rotation_flow(space);

    let d_set = axis_ray(id, 1.0, 2.0);
    let i_map = ImpulseMap::new(slope.abs(), move |p: &Point| {
        let r = p.coord(0).hypot(p.coord(1));
        let im = rho(r);
        Point::new(id, &[im * angle.cos(), im * angle.sin()])
    });
    let (im_lo, im_hi) = (rho(1.0).min(rho(2.0)), rho(1.0).max(rho(2.0)));
    let landing = ImpulseSet::new(
        1,
        move |p| {
            // Signed angular offset from the landing ray, scaled by radius.
            let th = angle_of(p.coord(0), p.coord(1));
            let mut delta = th - angle;
            if delta > PI {
                delta -= TAU;
            } else if delta < -PI {
                delta += TAU;
            }
            delta * p.coord(0).hypot(p.coord(1))
        },
        move |p| {
            let r = p.coord(0).hypot(p.coord(1));
            let th = angle_of(p.coord(0), p.coord(1));
            let mut delta = th - angle;
            if delta > PI {
                delta -= TAU;
            } else if delta < -PI {
                delta += TAU;
            }
            (delta * r).abs() <= MEMBERSHIP_TOL
                && r >= im_lo - MEMBERSHIP_TOL
                && r <= im_hi + MEMBERSHIP_TOL
        },
        move |s| {
            let r = im_lo + s * (im_hi - im_lo);
            Point::new(id, &[r * angle.cos(), r * angle.sin()])
        },
    );

    // Gap between the impulse ray and its image, measured on the two affine
    // segments; a grid+refine pass covers every parameter choice.
    let a = segment_gap(&|r| (r, 0.0), &|r| {
        let im = rho(1.0 + r);
        (im * angle.cos(), im * angle.sin())
    });

    // Post-jump return time to the impulse ray; the continuous flow needs a
    // full revolution to revisit the landing ray, so eta also bounds s0.
    let eta = TAU - angle;
    let consts = SystemConstants {
        xi0: 0.5,
        eta,
        a,
        s0: eta,
        xi,
    };
    // Off-nominal parameter choices (image too close to the impulse ray)
    // violate the xi constraint; build them anyway so check_conditions can
    // report the violation with a witness.
    let sys = match ImpulsiveSystem::new(
        flow.clone(),
        d_set.clone(),
        i_map.clone(),
        landing.clone(),
        consts,
    ) {
        Ok(sys) => sys,
        Err(_) => ImpulsiveSystem::new_unchecked(flow, d_set, i_map, landing, consts),
    };
    Ok(sys.with_tube_oracle(move |p: &Point, xi: f64| {
        let r = p.coord(0).hypot(p.coord(1));
        if !(1.0 - MEMBERSHIP_TOL..=2.0 + MEMBERSHIP_TOL).contains(&r) {
            return false;
        }
        let th = angle_of(p.coord(0), p.coord(1));
        th > 0.0 && th < xi
    }))
}

/// Minimum distance between two parametrized curves over `[0, 1] x [0, 1]`,
/// coarse grid plus local refinement.
fn segment_gap(f: &dyn Fn(f64) -> (f64, f64), g: &dyn Fn(f64) -> (f64, f64)) -> f64 {
    let d = |s: f64, t: f64| {
        let (ax, ay) = f(1.0 + s); // impulse ray parametrized by radius
        let (bx, by) = g(t);
        (ax - bx).hypot(ay - by)
    };
    let n = 256;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=n {
        for j in 0..=n {
            let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
            let v = d(s, t);
            if v < best.0 {
                best = (v, s, t);
            }
        }
    }
    let (_, mut s, mut t) = best;
    let mut h = 1.0 / n as f64;
    for _ in 0..60 {
        for (cs, ct) in [(-h, 0.0), (h, 0.0), (0.0, -h), (0.0, h)] {
            let (ns, nt) = ((s + cs).clamp(0.0, 1.0), (t + ct).clamp(0.0, 1.0));
            if d(ns, nt) < d(s, t) {
                s = ns;
                t = nt;
            }
        }
        h *= 0.7;
    }
    d(s, t)
}

fn annulus_grid(id: SpaceId, n: usize, theta_range: Option<(f64, f64)>) -> Vec<Point> {
    let (th_lo, th_hi) = theta_range.unwrap_or((0.0, TAU));
    let span = th_hi - th_lo;
    // Aspect-balanced grid: the annulus is about 9x longer angularly than
    // radially.
    let nr = (((n as f64) / 9.0).sqrt().round() as usize).max(2);
    let nth = n.div_ceil(nr).max(2);
    let mut out = Vec::with_capacity(nr * nth);
    for i in 0..nr {
        let r = 1.0 + i as f64 / (nr - 1) as f64;
        for j in 0..nth {
            let th = th_lo + span * j as f64 / nth as f64;
            out.push(Point::new(id, &[r * th.cos(), r * th.sin()]));
        }
    }
    out.truncate(n.max(1));
    out
}

fn annulus_seeded(id: SpaceId, n: usize, seed: u64, theta_range: Option<(f64, f64)>) -> Vec<Point> {
    let (th_lo, th_hi) = theta_range.unwrap_or((0.0, TAU));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.random_range(1.0..=2.0);
            let th = rng.random_range(th_lo..th_hi);
            Point::new(id, &[r * th.cos(), r * th.sin()])
        })
        .collect()
}

/// Grid over the forward-invariant core of the annulus (angles clear of the
/// impulse ray and its tube).
pub fn annulus_core_grid(sys: &ImpulsiveSystem, n: usize) -> Vec<Point> {
    let xi = sys.constants().xi;
    annulus_grid(sys.space().id(), n, Some((xi + 0.05, TAU - 0.05)))
}

/// Seeded points in the forward-invariant core of the annulus.
pub fn annulus_core_seeded(sys: &ImpulsiveSystem, n: usize, seed: u64) -> Vec<Point> {
    let xi = sys.constants().xi;
    annulus_seeded(sys.space().id(), n, seed, Some((xi + 0.05, TAU - 0.05)))
}

// ---------------------------------------------------------------------------
// Doubling suspension
// ---------------------------------------------------------------------------

const SUSP_ID: SpaceId = SpaceId("doubling");

/// Coordinate scales of the suspension embedding; chosen so the metric is
/// approximately the base-circle distance at small scales.
const C_TIME: f64 = 1.0 / TAU;
const C_BASE: f64 = 1.0 / (TAU * std::f64::consts::SQRT_2);

/// Embedding of the suspension space into R^6.
///
/// A point is `(theta, h)` with the roof gluing `(theta, 1) ~ (2 theta, 0)`.
/// The embedding uses the height circle plus two weighted mixtures of the
/// base harmonics `e(theta)` and `e(2 theta)`:
///
/// ```text
/// F0 = c_t * e(h)
/// F1 = c_b * [ (1-h)   e(theta) + h       e(2 theta) ]
/// F2 = c_b * [ (1-h)^2 e(theta) + h(2-h)  e(2 theta) ]
/// ```
///
/// All three respect the gluing (`F(theta, 1) = F(2 theta, 0)`), and the two
/// mixtures have different weight profiles, so no pair of distinct points can
/// collapse in both; the map is injective and the induced Euclidean distance
/// is a genuine metric for the suspension topology. Entropy does not depend
/// on the choice of metric on a compact space, so the growth rate `ln 2` is
/// preserved.
pub fn suspension_embed(theta: f64, h: f64) -> [f64; 6] {
    let a = TAU * theta;
    let b = 2.0 * a;
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let (sh, ch) = (TAU * h).sin_cos();
    let w1 = 1.0 - h;
    let w2 = h;
    let v1 = (1.0 - h) * (1.0 - h);
    let v2 = h * (2.0 - h);
    [
        C_TIME * ch,
        C_TIME * sh,
        C_BASE * (w1 * ca + w2 * cb),
        C_BASE * (w1 * sa + w2 * sb),
        C_BASE * (v1 * ca + v2 * cb),
        C_BASE * (v1 * sa + v2 * sb),
    ]
}

fn suspension_dist(p: &[f64], q: &[f64]) -> f64 {
    let a = suspension_embed(p[0], p[1]);
    let b = suspension_embed(q[0], q[1]);
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Unit-roof suspension of angle doubling on the circle.
///
/// State `(theta, h)` flows upward at unit speed; crossing the roof applies
/// the doubling `theta -> 2 theta mod 1`. The time-one return map on the
/// base is exact, so two base points at angular distance `d` reach angular
/// distance `2^k d (mod 1)` after `k` units of time.
pub fn doubling_suspension() -> ExampleSpec {
    let space = Arc::new(MetricSpace::new(
        SUSP_ID,
        2,
        Bounds::boxed(&[0.0, 0.0], &[1.0, 1.0]),
        suspension_dist,
    ));
    let flow = Arc::new(Semiflow::new(
        space.clone(),
        "unit-roof suspension of angle doubling",
        |t, x| {
            let total = x.coord(1) + t;
            let mut k = total.floor();
            let mut h = total - k;
            if h >= 1.0 {
                h -= 1.0;
                k += 1.0;
            }
            let theta = (x.coord(0) * k.exp2()).fract();
            Point::new(x.space(), &[theta, h])
        },
    ));
    let section = ImpulseSet::new(
        1,
        |p| (TAU * p.coord(1)).sin(),
        |p| p.coord(1) <= MEMBERSHIP_TOL || p.coord(1) >= 1.0 - MEMBERSHIP_TOL,
        |s| Point::new(SUSP_ID, &[s, 0.0]),
    );
    ExampleSpec {
        name: "doubling",
        summary: "unit-roof suspension of circle doubling (entropy ln 2)",
        dynamics: Dynamics::Flow(flow),
        facts: vec![
            AnalyticFact {
                name: "entropy",
                value: std::f64::consts::LN_2,
                tolerance: 0.15,
                basis: "distinguishable orbit blocks double per unit time",
            },
            AnalyticFact {
                name: "base_period",
                value: 1.0,
                tolerance: 0.0,
                basis: "unit roof",
            },
        ],
        section: Some(section),
        section_gap: 1.0,
        grid_fn: Arc::new(|n| {
            (0..n.max(1))
                .map(|i| Point::new(SUSP_ID, &[i as f64 / n.max(1) as f64, 0.0]))
                .collect()
        }),
        seeded_fn: Arc::new(|n, seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    Point::new(
                        SUSP_ID,
                        &[rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)],
                    )
                })
                .collect()
        }),
    }
}
