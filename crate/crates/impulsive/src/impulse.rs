//! Impulsive dynamical systems: a continuous semiflow plus a reset map on
//! an impulse set.
//!
//! Between impulses the state follows the continuous flow; on hitting the
//! impulse set it is instantly reset by the impulse map and the flow
//! resumes from the image. Hits are located by bracketing sign changes of
//! a crossing function along the orbit and refining by bisection, so all
//! reported times carry a tolerance of about `1e-10`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{MetricSpace, Point, Semiflow, MEMBERSHIP_TOL};

/// Closed-form membership test for the flow tube of a given width.
pub type TubeOracle = Arc<dyn Fn(&Point, f64) -> bool + Send + Sync>;

/// Width of the bisection bracket at which hit refinement stops.
const HIT_REFINE_WIDTH: f64 = 1e-12;

/// Band around zero inside which a crossing value counts as "on surface".
const SURFACE_BAND: f64 = 1e-9;

/// A compact subset of the phase space where impulses (or visits) are
/// registered.
///
/// `crossing` is a signed scalar function that vanishes on a surface
/// containing the set and changes sign across it; `member` restricts to the
/// actual set with a tolerance band (the surface may extend beyond the set,
/// and zeros outside the set are skipped).
#[derive(Clone)]
pub struct ImpulseSet {
    crossing: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    member: Arc<dyn Fn(&Point) -> bool + Send + Sync>,
    chart: Arc<dyn Fn(f64) -> Point + Send + Sync>,
    dimension: usize,
    empty: bool,
}

impl ImpulseSet {
    pub fn new(
        dimension: usize,
        crossing: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        member: impl Fn(&Point) -> bool + Send + Sync + 'static,
        chart: impl Fn(f64) -> Point + Send + Sync + 'static,
    ) -> Self {
        ImpulseSet {
            crossing: Arc::new(crossing),
            member: Arc::new(member),
            chart: Arc::new(chart),
            dimension,
            empty: false,
        }
    }

    /// A set that is never hit; orbits of a system with an empty set are
    /// the continuous orbits.
    pub fn empty(space: &MetricSpace) -> Self {
        let anchor = Point::new(space.id(), space.bounds().lo());
        ImpulseSet {
            crossing: Arc::new(|_| 1.0),
            member: Arc::new(|_| false),
            chart: Arc::new(move |_| anchor),
            dimension: 0,
            empty: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn crossing(&self, p: &Point) -> f64 {
        (self.crossing)(p)
    }

    pub fn member(&self, p: &Point) -> bool {
        (self.member)(p)
    }

    /// Point of the set at chart parameter `s` in `[0, 1]`.
    pub fn chart(&self, s: f64) -> Point {
        (self.chart)(s)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `n` chart points, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        if self.empty || n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![self.chart(0.5)];
        }
        (0..n)
            .map(|i| self.chart(i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// The reset map applied on the impulse set.
#[derive(Clone)]
pub struct ImpulseMap {
    map: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
    lipschitz_bound: f64,
}

impl ImpulseMap {
    pub fn new(
        lipschitz_bound: f64,
        map: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        ImpulseMap {
            map: Arc::new(map),
            lipschitz_bound,
        }
    }

    /// Image of a point of the impulse set.
    pub fn apply(&self, p: &Point) -> Point {
        (self.map)(p)
    }

    /// Declared Lipschitz bound (`<= 1` for the distance-nonexpanding maps
    /// the quotient construction requires).
    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }
}

/// Derived constants of an impulsive system.
///
/// * `xi0`: tube length of the half-tube condition,
/// * `eta`: uniform gap between consecutive impulse times,
/// * `a`: distance between the impulse set and its image,
/// * `s0`: minimal return time to the landing set,
/// * `xi`: trimming width, constrained to `0 < xi < min(eta/4, xi0/2, a/2)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SystemConstants {
    pub xi0: f64,
    pub eta: f64,
    pub a: f64,
    pub s0: f64,
    pub xi: f64,
}

impl SystemConstants {
    pub fn validate(&self) -> Result<()> {
        let cap = (self.eta / 4.0).min(self.xi0 / 2.0).min(self.a / 2.0);
        if !(self.xi > 0.0 && self.xi < cap) {
            return Err(Error::InvalidConfig(format!(
                "xi = {} violates 0 < xi < min(eta/4, xi0/2, a/2) = {}",
                self.xi, cap
            )));
        }
        if self.eta <= 0.0 || self.xi0 <= 0.0 || self.s0 <= 0.0 || self.a <= 0.0 {
            return Err(Error::InvalidConfig(
                "eta, xi0, s0 and a must all be positive".into(),
            ));
        }
        Ok(())
    }
}

/// An impulsive dynamical system: space, flow, impulse set, reset map, and
/// the landing set (image of the impulse set) used for visit detection.
#[derive(Clone)]
pub struct ImpulsiveSystem {
    space: Arc<MetricSpace>,
    flow: Arc<Semiflow>,
    impulse_set: ImpulseSet,
    impulse_map: ImpulseMap,
    landing_set: ImpulseSet,
    tube: Option<TubeOracle>,
    consts: SystemConstants,
}

impl ImpulsiveSystem {
    pub fn new(
        flow: Arc<Semiflow>,
        impulse_set: ImpulseSet,
        impulse_map: ImpulseMap,
        landing_set: ImpulseSet,
        consts: SystemConstants,
    ) -> Result<Self> {
        consts.validate()?;
        Ok(Self::new_unchecked(
            flow,
            impulse_set,
            impulse_map,
            landing_set,
            consts,
        ))
    }

    /// Builds the system without validating the constants. Intended for
    /// diagnosing configurations that violate the standing hypotheses:
    /// `check_conditions` will report what is wrong instead of the
    /// constructor rejecting the system outright.
    pub fn new_unchecked(
        flow: Arc<Semiflow>,
        impulse_set: ImpulseSet,
        impulse_map: ImpulseMap,
        landing_set: ImpulseSet,
        consts: SystemConstants,
    ) -> Self {
        ImpulsiveSystem {
            space: flow.space().clone(),
            flow,
            impulse_set,
            impulse_map,
            landing_set,
            tube: None,
            consts,
        }
    }

    /// Attach a closed-form membership test for the flow tube
    /// `{ evolve(t, d) : d in impulse set, 0 < t < xi }`. Built-in systems
    /// provide one; without it a slower numerical search is used.
    pub fn with_tube_oracle(
        mut self,
        tube: impl Fn(&Point, f64) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.tube = Some(Arc::new(tube));
        self
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn flow(&self) -> &Arc<Semiflow> {
        &self.flow
    }

    pub fn impulse_set(&self) -> &ImpulseSet {
        &self.impulse_set
    }

    pub fn impulse_map(&self) -> &ImpulseMap {
        &self.impulse_map
    }

    pub fn landing_set(&self) -> &ImpulseSet {
        &self.landing_set
    }

    pub fn constants(&self) -> SystemConstants {
        self.consts
    }

    fn scan_step(&self) -> f64 {
        // Impulse times are at least eta apart, so hits cannot straddle a
        // cell of this size.
        self.consts.eta.min(1.0) / 50.0
    }

    /// Smallest `t` in `(0, horizon]` with the orbit of `x` on the impulse
    /// set, refined to about `1e-10`; `None` if there is no hit.
    pub fn first_hit_time(&self, x: &Point, horizon: f64) -> Result<Option<f64>> {
        if horizon <= 0.0 {
            return Err(Error::domain("horizon must be positive"));
        }
        Ok(self
            .first_surface_hit(&self.impulse_set, x, horizon)?
            .map(|(t, _)| t))
    }

    /// First transversal member hit of `set` along the continuous orbit of
    /// `x`, in `(0, horizon]`.
    pub(crate) fn first_surface_hit(
        &self,
        set: &ImpulseSet,
        x: &Point,
        horizon: f64,
    ) -> Result<Option<(f64, Point)>> {
        first_hit_scan(&self.flow, set, x, horizon, self.scan_step())
    }

    /// Time to the next impulse: `0` on the impulse set itself, the first
    /// hit time on the trimmed domain. Points strictly inside the tube are
    /// outside the domain of this function.
    pub fn time_to_impulse(&self, x: &Point) -> Result<f64> {
        if self.impulse_set.member(x) {
            return Ok(0.0);
        }
        if self.in_tube(x, self.consts.xi) {
            return Err(Error::domain("point lies strictly inside the escape tube"));
        }
        let cap = 1000.0 * self.consts.eta.max(1.0);
        match self.first_hit_time(x, cap)? {
            Some(t) => Ok(t),
            None => Err(Error::numerical(format!(
                "no impulse found within {cap}; time to impulse appears unbounded"
            ))),
        }
    }

    /// Membership in the flow tube of width `xi` over the impulse set.
    pub fn in_tube(&self, p: &Point, xi: f64) -> bool {
        if self.impulse_set.is_empty() {
            return false;
        }
        if let Some(tube) = &self.tube {
            return tube(p, xi);
        }
        self.numeric_tube_check(p, xi)
    }

    /// Membership in the forward-invariant core (complement of the impulse
    /// set and its `xi`-tube).
    pub fn in_core(&self, p: &Point) -> bool {
        self.space.contains(p) && !self.impulse_set.member(p) && !self.in_tube(p, self.consts.xi)
    }

    fn numeric_tube_check(&self, p: &Point, xi: f64) -> bool {
        // Coarse grid over (chart parameter, tube time), then local refinement.
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let ns = 200;
        let nt = 40;
        for i in 0..=ns {
            let s = i as f64 / ns as f64;
            let base = self.impulse_set.chart(s);
            for j in 1..nt {
                let t = xi * j as f64 / nt as f64;
                let q = self.flow.evolve_unchecked(t, &base);
                let d = self.space.dist_unchecked(&q, p);
                if d < best.0 {
                    best = (d, s, t);
                }
            }
        }
        let (_, mut s, mut t) = best;
        let mut ds = 1.0 / ns as f64;
        let mut dt = xi / nt as f64;
        let eval = |s: f64, t: f64| {
            let q = self.flow.evolve_unchecked(t, &self.impulse_set.chart(s));
            self.space.dist_unchecked(&q, p)
        };
        for _ in 0..40 {
            for (cs, ct) in [(-ds, 0.0), (ds, 0.0), (0.0, -dt), (0.0, dt)] {
                let ns_ = (s + cs).clamp(0.0, 1.0);
                let nt_ = (t + ct).clamp(xi * 1e-12, xi * (1.0 - 1e-12));
                if eval(ns_, nt_) < eval(s, t) {
                    s = ns_;
                    t = nt_;
                }
            }
            ds *= 0.6;
            dt *= 0.6;
        }
        eval(s, t) <= MEMBERSHIP_TOL
    }

    /// The impulsive trajectory of `x` up to time `horizon`.
    pub fn orbit(&self, x: &Point, horizon: f64) -> Result<ImpulsiveOrbit> {
        if horizon <= 0.0 {
            return Err(Error::domain("horizon must be positive"));
        }
        if x.space() != self.space.id() {
            return Err(Error::SpaceMismatch(x.space(), self.space.id()));
        }
        let max_impulses = (horizon / self.consts.eta).ceil() as usize + 1;
        let mut segments = Vec::new();
        let mut impulse_times = Vec::new();
        let mut cursor = *x;
        let mut t0 = 0.0;
        loop {
            let remaining = horizon - t0;
            // Below hit tolerance, nothing more can be located reliably.
            if remaining <= 1e-12 {
                segments.push(Segment {
                    start_time: t0,
                    start_point: cursor,
                    duration: remaining.max(0.0),
                    end_point: None,
                });
                break;
            }
            match self.first_surface_hit(&self.impulse_set, &cursor, remaining)? {
                None => {
                    segments.push(Segment {
                        start_time: t0,
                        start_point: cursor,
                        duration: remaining,
                        end_point: None,
                    });
                    break;
                }
                Some((h, hit)) => {
                    segments.push(Segment {
                        start_time: t0,
                        start_point: cursor,
                        duration: h,
                        end_point: Some(hit),
                    });
                    t0 += h;
                    impulse_times.push(t0);
                    if impulse_times.len() > max_impulses {
                        return Err(Error::Inconsistent(format!(
                            "more than {max_impulses} impulses before t = {horizon}; \
                             gaps fall below eta = {}",
                            self.consts.eta
                        )));
                    }
                    cursor = self.impulse_map.apply(&hit);
                }
            }
        }
        Ok(ImpulsiveOrbit {
            segments,
            impulse_times,
            horizon,
        })
    }

    /// State of the impulsive semiflow at time `t`; right-continuous at
    /// impulse times (returns the post-jump value).
    pub fn state_at(&self, t: f64, x: &Point) -> Result<Point> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(*x);
        }
        let orbit = self.orbit(x, t)?;
        Ok(orbit.point_at(t, &self.flow))
    }

    /// Impulse times in `(0, horizon]` together with their count.
    pub fn impulse_times(&self, x: &Point, horizon: f64) -> Result<Vec<f64>> {
        Ok(self.orbit(x, horizon)?.impulse_times().to_vec())
    }

    /// Sampling-based falsification of the standing hypotheses. A passing
    /// report means no counterexample was found, never a proof.
    pub fn check_conditions(&self, n_samples: usize, seed: u64) -> Result<ConditionsReport> {
        check_conditions(self, n_samples, seed)
    }
}

/// One continuous piece of an impulsive trajectory.
#[derive(Clone, Debug)]
pub struct Segment {
    pub start_time: f64,
    pub start_point: Point,
    pub duration: f64,
    /// Hit point on the impulse set when an impulse ends this segment.
    pub end_point: Option<Point>,
}

/// A piecewise-continuous impulsive trajectory with its impulse times.
#[derive(Clone, Debug)]
pub struct ImpulsiveOrbit {
    segments: Vec<Segment>,
    impulse_times: Vec<f64>,
    horizon: f64,
}

impl ImpulsiveOrbit {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn impulse_times(&self) -> &[f64] {
        &self.impulse_times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of impulse times not exceeding `t`.
    pub fn impulses_before(&self, t: f64) -> usize {
        self.impulse_times.partition_point(|&tau| tau <= t)
    }

    /// Trajectory value at `t` in `[0, horizon]`; right-continuous at
    /// impulse times. Times within the located-hit tolerance (`1e-10`) of an
    /// impulse time evaluate to the post-jump value.
    pub fn point_at(&self, t: f64, flow: &Semiflow) -> Point {
        debug_assert!(t >= 0.0 && t <= self.horizon + 1e-9);
        let idx = self
            .segments
            .partition_point(|s| s.start_time <= t + 1e-10)
            .saturating_sub(1);
        let seg = &self.segments[idx];
        flow.evolve_unchecked((t - seg.start_time).max(0.0), &seg.start_point)
    }
}

/// Either a continuous semiflow or an impulsive system; the estimation and
/// quotient routines are generic over the two.
#[derive(Clone)]
pub enum Dynamics {
    Flow(Arc<Semiflow>),
    Impulsive(Arc<ImpulsiveSystem>),
}

impl Dynamics {
    pub fn space(&self) -> &Arc<MetricSpace> {
        match self {
            Dynamics::Flow(f) => f.space(),
            Dynamics::Impulsive(s) => s.space(),
        }
    }

    pub fn state_at(&self, t: f64, x: &Point) -> Result<Point> {
        match self {
            Dynamics::Flow(f) => f.evolve(t, x),
            Dynamics::Impulsive(s) => s.state_at(t, x),
        }
    }

    /// Precompute the trajectory of `x` for repeated evaluation up to
    /// `horizon`.
    pub fn orbit(&self, x: &Point, horizon: f64) -> Result<OrbitEval> {
        match self {
            Dynamics::Flow(f) => Ok(OrbitEval::Flow {
                flow: f.clone(),
                start: *x,
            }),
            Dynamics::Impulsive(s) => Ok(OrbitEval::Impulsive {
                orbit: s.orbit(x, horizon)?,
                flow: s.flow().clone(),
            }),
        }
    }

    pub fn as_impulsive(&self) -> Option<&Arc<ImpulsiveSystem>> {
        match self {
            Dynamics::Flow(_) => None,
            Dynamics::Impulsive(s) => Some(s),
        }
    }
}

/// A trajectory prepared for repeated time queries.
#[derive(Clone)]
pub enum OrbitEval {
    Flow {
        flow: Arc<Semiflow>,
        start: Point,
    },
    Impulsive {
        orbit: ImpulsiveOrbit,
        flow: Arc<Semiflow>,
    },
}

impl OrbitEval {
    #[inline]
    pub fn point_at(&self, t: f64) -> Point {
        match self {
            OrbitEval::Flow { flow, start } => flow.evolve_unchecked(t, start),
            OrbitEval::Impulsive { orbit, flow } => orbit.point_at(t, flow),
        }
    }
}

/// Scan for the first transversal member hit of `set` along the continuous
/// orbit of `x`. Grazing contacts raise an error instead of being skipped.
pub(crate) fn first_hit_scan(
    flow: &Semiflow,
    set: &ImpulseSet,
    x: &Point,
    horizon: f64,
    step: f64,
) -> Result<Option<(f64, Point)>> {
    let hits = surface_hits(flow, set, x, horizon, step, true)?;
    Ok(hits.into_iter().next())
}

/// All transversal member hits of `set` in `(0, horizon]` along the
/// continuous orbit of `x` (or just the first when `first_only`).
pub(crate) fn surface_hits(
    flow: &Semiflow,
    set: &ImpulseSet,
    x: &Point,
    horizon: f64,
    step: f64,
    first_only: bool,
) -> Result<Vec<(f64, Point)>> {
    if set.is_empty() {
        return Ok(Vec::new());
    }
    let value_at = |t: f64| set.crossing(&flow.evolve_unchecked(t, x));
    let n = (horizon / step).ceil() as usize;
    let time = |i: usize| (i as f64 * step).min(horizon);

    let mut hits = Vec::new();
    let mut prev_t = 0.0;
    let mut prev_v = value_at(0.0);
    // A start exactly on the surface is not a hit (hits live in t > 0);
    // substitute the sign just after departure so no bracket forms at 0.
    // The probe may look past a tiny horizon: the flow is defined there and
    // only the sign matters.
    if prev_v.abs() <= SURFACE_BAND {
        let probe = value_at(step / 64.0);
        if probe.abs() <= SURFACE_BAND {
            return Err(Error::numerical(
                "orbit runs along the crossing surface; cannot locate hits",
            ));
        }
        prev_v = probe;
    }

    let mut i = 1;
    while i <= n {
        let t = time(i);
        let v = value_at(t);
        if v.abs() <= SURFACE_BAND {
            // Grid point lands on the surface: classify by the next
            // departing value.
            let mut j = i + 1;
            let mut next = None;
            while j <= n.min(i + 4) {
                let tv = value_at(time(j));
                if tv.abs() > SURFACE_BAND {
                    next = Some((j, tv));
                    break;
                }
                j += 1;
            }
            match next {
                Some((j, nv)) if nv * prev_v < 0.0 => {
                    let t_hit = bisect_zero(&value_at, prev_t, time(j));
                    push_member_hit(flow, set, x, t_hit, &mut hits);
                    if first_only && !hits.is_empty() {
                        return Ok(hits);
                    }
                    prev_t = time(j);
                    prev_v = nv;
                    i = j + 1;
                    continue;
                }
                Some((j, nv)) => {
                    // Touch without sign change.
                    let p = flow.evolve_unchecked(t, x);
                    if set.member(&p) {
                        return Err(Error::Grazing { t });
                    }
                    prev_t = time(j);
                    prev_v = nv;
                    i = j + 1;
                    continue;
                }
                None => {
                    // Zero at the very end of the scan: a boundary hit when
                    // the touching point is a member.
                    let (t_min, v_min) = minimize_abs(&value_at, prev_t, time(n));
                    if v_min.abs() <= SURFACE_BAND {
                        push_member_hit(flow, set, x, t_min, &mut hits);
                        if first_only && !hits.is_empty() {
                            return Ok(hits);
                        }
                    }
                    break;
                }
            }
        }
        if v * prev_v < 0.0 {
            let t_hit = bisect_zero(&value_at, prev_t, t);
            push_member_hit(flow, set, x, t_hit, &mut hits);
            if first_only && !hits.is_empty() {
                return Ok(hits);
            }
        } else {
            // Same-sign cell: look for an interior dip that touches zero.
            let mid = value_at((prev_t + t) / 2.0);
            if mid.abs() < prev_v.abs() && mid.abs() < v.abs() {
                let (t_min, v_min) = minimize_abs(&value_at, prev_t, t);
                if v_min.abs() <= SURFACE_BAND {
                    let p = flow.evolve_unchecked(t_min, x);
                    if set.member(&p) {
                        return Err(Error::Grazing { t: t_min });
                    }
                }
            }
        }
        prev_t = t;
        prev_v = v;
        i += 1;
    }
    Ok(hits)
}

fn push_member_hit(
    flow: &Semiflow,
    set: &ImpulseSet,
    x: &Point,
    t_hit: f64,
    hits: &mut Vec<(f64, Point)>,
) {
    let p = flow.evolve_unchecked(t_hit, x);
    if set.member(&p) {
        hits.push((t_hit, p));
    }
}

/// Bisection on a bracketing interval; the bracket is assumed to change
/// sign. Returns the midpoint of the final interval.
fn bisect_zero(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= HIT_REFINE_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ternary search for the minimum of `|f|` on `[lo, hi]`.
fn minimize_abs(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1).abs() < f(m2).abs() {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

/// Outcome of one sampled hypothesis check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub pass: bool,
    pub measured: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(measured: f64, detail: impl Into<String>) -> Self {
        CheckOutcome {
            pass: true,
            measured,
            detail: detail.into(),
        }
    }

    fn fail(measured: f64, detail: impl Into<String>) -> Self {
        CheckOutcome {
            pass: false,
            measured,
            detail: detail.into(),
        }
    }
}

/// Report of the sampled hypothesis checks. All checks are falsification
/// probes over finitely many samples; items that cannot be decided from
/// samples (openness of the tube) are listed under `assumed`.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionsReport {
    /// Measured distance between the impulse set and its image; must be
    /// positive and match the stored constant `a`.
    pub separation_gap: CheckOutcome,
    /// The trimming width against the measured gap.
    pub xi_constraint: CheckOutcome,
    /// Tube points are reachable only through the impulse set.
    pub prior_crossing: CheckOutcome,
    /// Tube fibers over distinct impulse-set points are disjoint.
    pub tube_disjoint_impulse: CheckOutcome,
    /// Tube fibers over distinct landing-set points are disjoint.
    pub tube_disjoint_landing: CheckOutcome,
    /// Orbits leave the landing set for at least `s0`.
    pub landing_return_gap: CheckOutcome,
    /// Measured Lipschitz constant of the impulse map on sampled pairs.
    pub lipschitz: CheckOutcome,
    /// Max |change of time-to-impulse| per sampled spatial scale.
    pub tau_star_modulus: Vec<(f64, f64)>,
    pub tau_star_continuity: CheckOutcome,
    pub assumed: Vec<String>,
    pub seed: u64,
    pub n_samples: usize,
}

impl ConditionsReport {
    pub fn all_pass(&self) -> bool {
        self.separation_gap.pass
            && self.xi_constraint.pass
            && self.prior_crossing.pass
            && self.tube_disjoint_impulse.pass
            && self.tube_disjoint_landing.pass
            && self.landing_return_gap.pass
            && self.lipschitz.pass
            && self.tau_star_continuity.pass
    }
}

fn check_conditions(
    sys: &ImpulsiveSystem,
    n_samples: usize,
    seed: u64,
) -> Result<ConditionsReport> {
    if n_samples < 2 {
        return Err(Error::domain("need at least 2 samples"));
    }
    let space = sys.space();
    let consts = sys.constants();
    let d_sample = sys.impulse_set.sample(n_samples);
    let i_sample = sys.landing_set.sample(n_samples);

    // (i) gap between the impulse set and its image, against the stored a.
    let mut gap = f64::INFINITY;
    let mut gap_pair = (0usize, 0usize);
    for (i, p) in d_sample.iter().enumerate() {
        let image = sys.impulse_map.apply(p);
        for (j, q) in d_sample.iter().enumerate() {
            let d = space.dist_unchecked(&image, q);
            if d < gap {
                gap = d;
                gap_pair = (i, j);
            }
        }
    }
    let separation_gap = if gap > 0.0 && (gap - consts.a).abs() <= 1e-6 {
        CheckOutcome::pass(
            gap,
            format!("measured gap {gap:.9} matches a = {}", consts.a),
        )
    } else {
        CheckOutcome::fail(
            gap,
            format!(
                "measured gap {gap:.9} vs stored a = {} (witness pair {:?} -> {:?})",
                consts.a,
                d_sample[gap_pair.0].coords(),
                d_sample[gap_pair.1].coords()
            ),
        )
    };

    // xi against the *measured* gap, not only the stored one.
    let cap = (consts.eta / 4.0).min(consts.xi0 / 2.0).min(gap / 2.0);
    let xi_constraint = if consts.xi > 0.0 && consts.xi < cap {
        CheckOutcome::pass(
            consts.xi,
            format!("xi < min(eta/4, xi0/2, gap/2) = {cap:.6}"),
        )
    } else {
        CheckOutcome::fail(
            consts.xi,
            format!(
                "xi = {} violates the bound {cap:.6} from the measured gap",
                consts.xi
            ),
        )
    };

    // (ii) entering the tube requires crossing the impulse set: scan for
    // outside-to-inside transitions and look for a crossing in the entry
    // cell. Points that start inside the tube make no claim.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free_sample = sample_points(space, n_samples, &mut rng);
    let scan = sys.scan_step();
    let mut prior_crossing =
        CheckOutcome::pass(0.0, "every sampled tube entry had a prior crossing");
    let t_max = 2.0 * consts.eta + consts.xi0;
    let mut entries_checked = 0usize;
    'outer: for x in &free_sample {
        let coarse = consts.xi0 / 10.0;
        let n = (t_max / coarse).ceil() as usize;
        let mut was_in = sys.in_tube(x, consts.xi0);
        for i in 1..=n {
            let t_e = (i as f64) * coarse;
            let p = sys.flow.evolve_unchecked(t_e, x);
            let now_in = sys.in_tube(&p, consts.xi0);
            if now_in && !was_in {
                let lo = t_e - coarse;
                let start = sys.flow.evolve_unchecked(lo, x);
                let crossed = sys.impulse_set.member(&start)
                    || !surface_hits(&sys.flow, &sys.impulse_set, &start, coarse, scan, true)?
                        .is_empty();
                if !crossed {
                    prior_crossing = CheckOutcome::fail(
                        t_e,
                        format!(
                            "orbit of {:?} enters the tube at t = {t_e:.6} without crossing",
                            x.coords()
                        ),
                    );
                    break 'outer;
                }
                entries_checked += 1;
                break; // first entry per sample
            }
            was_in = now_in;
        }
    }
    if prior_crossing.pass {
        prior_crossing.measured = entries_checked as f64;
        prior_crossing.detail =
            format!("{entries_checked} sampled tube entries, each with a prior crossing");
    }

    // (iii) tube fibers pairwise disjoint, over both sets.
    let tube_disjoint_impulse = fiber_separation(sys, &sys.impulse_set, consts.xi0);
    let tube_disjoint_landing = fiber_separation(sys, &sys.landing_set, consts.xi0);

    // (iv) return time to the landing set is at least s0. The measured value
    // is the scanned window when no return shows up (infinities do not
    // survive JSON serialization).
    let mut landing_return_gap = CheckOutcome::pass(
        consts.s0,
        format!("no return to the landing set before s0 = {}", consts.s0),
    );
    for y in &i_sample {
        let window = consts.s0 * (1.0 - 1e-9);
        if let Some((t, _)) = first_hit_scan(&sys.flow, &sys.landing_set, y, window, scan)? {
            landing_return_gap = CheckOutcome::fail(
                t,
                format!(
                    "orbit of {:?} returns to the landing set at t = {t:.6} < s0",
                    y.coords()
                ),
            );
            break;
        }
    }

    // (v) Lipschitz constant of the impulse map on sampled pairs.
    let mut lip: f64 = 0.0;
    let mut lip_pair = (0usize, 0usize);
    for i in 0..d_sample.len() {
        let ii = sys.impulse_map.apply(&d_sample[i]);
        for j in (i + 1)..d_sample.len() {
            let base = space.dist_unchecked(&d_sample[i], &d_sample[j]);
            if base <= 1e-12 {
                continue;
            }
            let ij = sys.impulse_map.apply(&d_sample[j]);
            let ratio = space.dist_unchecked(&ii, &ij) / base;
            if ratio > lip {
                lip = ratio;
                lip_pair = (i, j);
            }
        }
    }
    let lipschitz = if lip <= sys.impulse_map.lipschitz_bound + 1e-9 {
        CheckOutcome::pass(
            lip,
            format!(
                "measured {lip:.12} within bound {}",
                sys.impulse_map.lipschitz_bound
            ),
        )
    } else {
        CheckOutcome::fail(
            lip,
            format!(
                "measured {lip:.12} above bound {} (witness {:?}, {:?})",
                sys.impulse_map.lipschitz_bound,
                d_sample[lip_pair.0].coords(),
                d_sample[lip_pair.1].coords()
            ),
        )
    };

    // (vi) continuity probe for the time-to-impulse function on the
    // trimmed domain plus the impulse set.
    let scales = [1e-2, 1e-3, 1e-4];
    let mut tau_star_modulus = Vec::new();
    let mut base_points: Vec<Point> = free_sample
        .iter()
        .copied()
        .filter(|p| sys.in_core(p))
        .take(n_samples / 2)
        .collect();
    base_points.extend(d_sample.iter().copied().take(n_samples / 4));
    for &scale in &scales {
        let mut worst: f64 = 0.0;
        for p in &base_points {
            let tp = match sys.time_to_impulse(p) {
                Ok(t) => t,
                Err(_) => continue,
            };
            for _ in 0..4 {
                let mut coords: Vec<f64> = p.coords().to_vec();
                for c in coords.iter_mut() {
                    *c += rng.random_range(-scale..scale);
                }
                let q = Point::new(space.id(), &coords);
                if !space.contains(&q) || !(sys.in_core(&q) || sys.impulse_set.member(&q)) {
                    continue;
                }
                if let Ok(tq) = sys.time_to_impulse(&q) {
                    worst = worst.max((tp - tq).abs());
                }
            }
        }
        tau_star_modulus.push((scale, worst));
    }
    let finest = tau_star_modulus.last().map(|&(_, w)| w).unwrap_or(0.0);
    let shrinks = tau_star_modulus
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 * 1.1 + 1e-12);
    let tau_star_continuity = if finest <= 1e-2 && shrinks {
        CheckOutcome::pass(finest, "modulus shrinks with the sampled scale")
    } else {
        CheckOutcome::fail(finest, "time-to-impulse modulus does not shrink")
    };

    Ok(ConditionsReport {
        separation_gap,
        xi_constraint,
        prior_crossing,
        tube_disjoint_impulse,
        tube_disjoint_landing,
        landing_return_gap,
        lipschitz,
        tau_star_modulus,
        tau_star_continuity,
        assumed: vec!["openness of the tube (not decidable from finitely many samples)".into()],
        seed,
        n_samples,
    })
}

fn fiber_separation(sys: &ImpulsiveSystem, set: &ImpulseSet, xi0: f64) -> CheckOutcome {
    if set.is_empty() {
        return CheckOutcome::pass(0.0, "empty set: nothing to intersect");
    }
    let n_fiber = 48;
    let n_t = 16;
    let bases = set.sample(n_fiber);
    let space = sys.space();
    let fibers: Vec<Vec<Point>> = bases
        .iter()
        .map(|b| {
            (1..n_t)
                .map(|j| sys.flow.evolve_unchecked(xi0 * j as f64 / n_t as f64, b))
                .collect()
        })
        .collect();
    let mut min_sep = f64::INFINITY;
    for i in 0..fibers.len() {
        for j in (i + 1)..fibers.len() {
            for p in &fibers[i] {
                for q in &fibers[j] {
                    min_sep = min_sep.min(space.dist_unchecked(p, q));
                }
            }
        }
    }
    if min_sep > 0.0 {
        CheckOutcome::pass(min_sep, format!("min fiber separation {min_sep:.3e}"))
    } else {
        CheckOutcome::fail(min_sep, "tube fibers intersect")
    }
}

/// Seeded rejection sampling of points inside the space bounds.
pub fn sample_points(space: &MetricSpace, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let lo = space.bounds().lo().to_vec();
    let hi = space.bounds().hi().to_vec();
    let mut out = Vec::with_capacity(n);
    let mut guard = 0usize;
    while out.len() < n && guard < n * 1000 {
        guard += 1;
        let coords: Vec<f64> = lo
            .iter()
            .zip(hi.iter())
            .map(|(&a, &b)| rng.random_range(a..=b))
            .collect();
        if space.bounds().contains(&coords) {
            out.push(Point::new(space.id(), &coords));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{Bounds, SpaceId};

    // Unit-speed translation on [0, 10] x [0, 2]; impulse at the line
    // x = 5 (y in [0, 1]), reset back to x = 0.
    fn strip() -> ImpulsiveSystem {
        let space = Arc::new(MetricSpace::euclidean(
            SpaceId("strip"),
            2,
            Bounds::boxed(&[0.0, 0.0], &[10.0, 2.0]),
        ));
        let flow = Arc::new(Semiflow::new(space.clone(), "translation", |t, x| {
            Point::new(x.space(), &[(x.coord(0) + t).min(10.0), x.coord(1)])
        }));
        let sid = space.id();
        let d = ImpulseSet::new(
            1,
            |p| p.coord(0) - 5.0,
            |p| (p.coord(0) - 5.0).abs() <= 1e-9 && p.coord(1) <= 1.0 + 1e-9,
            move |s| Point::new(sid, &[5.0, s]),
        );
        let i_map = ImpulseMap::new(1.0, move |p| Point::new(sid, &[0.0, p.coord(1)]));
        let landing = ImpulseSet::new(
            1,
            |p| p.coord(0),
            |p| p.coord(0).abs() <= 1e-9 && p.coord(1) <= 1.0 + 1e-9,
            move |s| Point::new(sid, &[0.0, s]),
        );
        ImpulsiveSystem::new(
            flow,
            d,
            i_map,
            landing,
            SystemConstants {
                xi0: 1.0,
                eta: 5.0,
                a: 5.0,
                s0: 5.0,
                xi: 0.4,
            },
        )
        .unwrap()
        .with_tube_oracle(|p, xi| {
            p.coord(0) > 5.0 && p.coord(0) < 5.0 + xi && p.coord(1) <= 1.0 + 1e-9
        })
    }

    #[test]
    fn hits_are_located_to_tolerance() {
        let sys = strip();
        let x = sys.space().point(&[1.25, 0.5]).unwrap();
        let t = sys.first_hit_time(&x, 10.0).unwrap().unwrap();
        assert!((t - 3.75).abs() < 1e-10);
    }

    #[test]
    fn no_hit_outside_member_band() {
        // y = 1.5 misses the impulse segment even though it crosses the
        // surface x = 5.
        let sys = strip();
        let x = sys.space().point(&[1.0, 1.5]).unwrap();
        assert!(sys.first_hit_time(&x, 10.0).unwrap().is_none());
    }

    #[test]
    fn orbit_resets_and_keeps_gaps() {
        let sys = strip();
        let x = sys.space().point(&[0.0, 0.2]).unwrap();
        let orbit = sys.orbit(&x, 16.0).unwrap();
        let times = orbit.impulse_times();
        assert_eq!(times.len(), 3);
        for (k, t) in times.iter().enumerate() {
            assert!((t - 5.0 * (k + 1) as f64).abs() < 1e-9);
        }
        // Right-continuity: at an impulse time the value is the reset point.
        let at_jump = orbit.point_at(times[0], sys.flow());
        assert!((at_jump.coord(0) - 0.0).abs() < 1e-9);
        // Just before, it is at the impulse set.
        let before = orbit.point_at(times[0] - 1e-9, sys.flow());
        assert!((before.coord(0) - 5.0).abs() < 1e-6);
    }

    #[test]
    fn point_on_set_hits_on_return() {
        let sys = strip();
        let x = sys.space().point(&[5.0, 0.5]).unwrap();
        // Starting exactly on the set: the first hit requires t > 0, which
        // for this one-way strip never happens again after the reset-free
        // scan (the flow leaves through x = 10).
        assert!(sys.first_hit_time(&x, 4.0).unwrap().is_none());
        // time_to_impulse is 0 on the set itself.
        assert_eq!(sys.time_to_impulse(&x).unwrap(), 0.0);
    }

    #[test]
    fn tube_points_rejected_by_time_to_impulse() {
        let sys = strip();
        let x = sys.space().point(&[5.2, 0.5]).unwrap();
        assert!(matches!(sys.time_to_impulse(&x), Err(Error::Domain(_))));
    }

    #[test]
    fn empty_set_gives_continuous_orbit() {
        let space = Arc::new(MetricSpace::euclidean(
            SpaceId("strip2"),
            2,
            Bounds::boxed(&[0.0, 0.0], &[10.0, 2.0]),
        ));
        let flow = Arc::new(Semiflow::new(space.clone(), "translation", |t, x| {
            Point::new(x.space(), &[(x.coord(0) + t).min(10.0), x.coord(1)])
        }));
        let sys = ImpulsiveSystem::new(
            flow,
            ImpulseSet::empty(&space),
            ImpulseMap::new(1.0, |p: &Point| *p),
            ImpulseSet::empty(&space),
            SystemConstants {
                xi0: 1.0,
                eta: 5.0,
                a: 5.0,
                s0: 5.0,
                xi: 0.4,
            },
        )
        .unwrap();
        let x = space.point(&[0.0, 0.5]).unwrap();
        let orbit = sys.orbit(&x, 8.0).unwrap();
        assert!(orbit.impulse_times().is_empty());
        let p = orbit.point_at(3.0, sys.flow());
        assert!((p.coord(0) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn grazing_contact_is_an_error() {
        // A crossing function with a quadratic touch at t = 1 on a member
        // point: must raise Grazing, never skip.
        let space = Arc::new(MetricSpace::euclidean(
            SpaceId("line"),
            1,
            Bounds::boxed(&[0.0], &[10.0]),
        ));
        let flow = Arc::new(Semiflow::new(space.clone(), "translation", |t, x| {
            Point::new(x.space(), &[(x.coord(0) + t).min(10.0)])
        }));
        let sid = space.id();
        let set = ImpulseSet::new(
            0,
            |p| -((p.coord(0) - 1.0) * (p.coord(0) - 1.0)),
            |_| true,
            move |_| Point::new(sid, &[1.0]),
        );
        let x = space.point(&[0.0]).unwrap();
        let err = first_hit_scan(&flow, &set, &x, 3.0, 0.02).unwrap_err();
        assert!(matches!(err, Error::Grazing { .. }));
    }
}
