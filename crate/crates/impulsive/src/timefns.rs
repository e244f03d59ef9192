//! Admissible time sequences and the interval sets that restrict
//! observation times.
//!
//! A time sequence assigns to a start point the strictly increasing times of
//! some recurring event along its trajectory: impulse times, visits to the
//! landing set, hits of a marked cross-section, or a merge of several of
//! these. Removing a blackout window of half-width `delta` around each listed
//! time from `(0, T]` yields the [`IntervalSet`] on which windowed orbit
//! separation is measured.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::impulse::{surface_hits, Dynamics, ImpulseSet, ImpulsiveSystem};
use crate::space::{Point, Semiflow};

/// How close two times must be to count as the same event.
pub const TIME_EQ_TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum SequenceSource {
    Impulse,
    Visit,
    Section,
    Merged,
}

/// Strictly increasing positive event times with a uniform gap bound.
#[derive(Clone, Debug, Serialize)]
pub struct TimeSequence {
    times: Vec<f64>,
    min_gap: f64,
    source: SequenceSource,
}

impl TimeSequence {
    /// Validates positivity, strict monotonicity and the gap bound
    /// (`min_gap - 1e-9`, to absorb located-hit tolerance).
    pub fn new(times: Vec<f64>, min_gap: f64, source: SequenceSource) -> Result<Self> {
        if min_gap <= 0.0 {
            return Err(Error::domain("gap bound must be positive"));
        }
        for (i, &t) in times.iter().enumerate() {
            if t <= 0.0 {
                return Err(Error::domain(format!("event time {t} is not positive")));
            }
            if i > 0 {
                let gap = t - times[i - 1];
                if gap < min_gap - TIME_EQ_TOL {
                    return Err(Error::Inconsistent(format!(
                        "gap {gap:.12} between entries {} and {} falls below {min_gap}",
                        times[i - 1],
                        t
                    )));
                }
            }
        }
        Ok(TimeSequence {
            times,
            min_gap,
            source,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    pub fn source(&self) -> SequenceSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of entries not exceeding `t`.
    pub fn count_before(&self, t: f64) -> usize {
        self.times.partition_point(|&tau| tau <= t)
    }

    /// `(0, horizon]` minus the open blackout windows around each listed
    /// time up to the horizon. Requires `0 < delta < min_gap / 2`, which
    /// keeps the remaining intervals disjoint.
    pub fn observation_set(&self, horizon: f64, delta: f64) -> Result<IntervalSet> {
        if !(delta > 0.0 && delta < self.min_gap / 2.0) {
            return Err(Error::domain(format!(
                "delta = {delta} must lie in (0, {}/2)",
                self.min_gap
            )));
        }
        if horizon <= 0.0 {
            return Err(Error::domain("horizon must be positive"));
        }
        let centers: Vec<f64> = self
            .times
            .iter()
            .copied()
            .take_while(|&t| t <= horizon)
            .collect();
        Ok(IntervalSet::excluding(horizon, &centers, delta))
    }
}

/// A finite union of disjoint closed subintervals of `(0, horizon]`
/// (optionally including `t = 0`, which the classical separation distance
/// needs).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalSet {
    parts: Vec<(f64, f64)>,
    horizon: f64,
    includes_zero: bool,
}

impl IntervalSet {
    /// The full window `(0, horizon]`.
    pub fn window(horizon: f64) -> Self {
        IntervalSet {
            parts: vec![(0.0, horizon)],
            horizon,
            includes_zero: false,
        }
    }

    /// The closed window `[0, horizon]`.
    pub fn window_with_zero(horizon: f64) -> Self {
        IntervalSet {
            parts: vec![(0.0, horizon)],
            horizon,
            includes_zero: true,
        }
    }

    /// `(0, horizon]` minus open windows of half-width `delta` around the
    /// given centers. Interval endpoints at `center +- delta` stay included.
    pub fn excluding(horizon: f64, centers: &[f64], delta: f64) -> Self {
        let mut parts = Vec::with_capacity(centers.len() + 1);
        let mut lo = 0.0;
        for &c in centers {
            let cut = c - delta;
            if cut > lo {
                parts.push((lo, cut));
            }
            lo = lo.max(c + delta);
        }
        if lo < horizon {
            parts.push((lo, horizon));
        }
        IntervalSet {
            parts,
            horizon,
            includes_zero: false,
        }
    }

    pub fn parts(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn includes_zero(&self) -> bool {
        self.includes_zero
    }

    pub fn contains(&self, t: f64) -> bool {
        if t == 0.0 {
            return self.includes_zero && !self.parts.is_empty();
        }
        self.parts.iter().any(|&(lo, hi)| t >= lo && t <= hi)
    }

    /// Total length (the isolated zero point has measure zero).
    pub fn total_length(&self) -> f64 {
        self.parts.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    /// Sampling grid: every part is walked with the given step and both of
    /// its endpoints are included (the left endpoint only when it is not the
    /// excluded origin).
    pub fn sample_times(&self, step: f64) -> Vec<f64> {
        assert!(step > 0.0, "grid step must be positive");
        let mut out = Vec::new();
        for &(lo, hi) in &self.parts {
            let mut t = if lo == 0.0 && !self.includes_zero {
                step.min(hi)
            } else {
                lo
            };
            while t < hi - 1e-12 {
                out.push(t);
                t += step;
            }
            out.push(hi);
        }
        out
    }

    /// Exact containment as point sets.
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        if self.includes_zero && !other.includes_zero {
            return false;
        }
        self.parts
            .iter()
            .all(|&(lo, hi)| other.parts.iter().any(|&(olo, ohi)| olo <= lo && hi <= ohi))
    }
}

/// Impulse times of `x` up to the horizon, as a tagged sequence.
pub fn impulse_sequence(sys: &ImpulsiveSystem, x: &Point, horizon: f64) -> Result<TimeSequence> {
    let times = sys.impulse_times(x, horizon)?;
    TimeSequence::new(times, sys.constants().eta, SequenceSource::Impulse)
}

/// Visit times to the landing set in `(0, horizon]`: transversal passes of
/// the continuous pieces plus the post-jump landing at every impulse time.
pub fn visit_sequence(sys: &ImpulsiveSystem, x: &Point, horizon: f64) -> Result<TimeSequence> {
    let orbit = sys.orbit(x, horizon)?;
    let scan = sys.constants().s0.min(1.0) / 50.0;
    let mut visits = Vec::new();
    for seg in orbit.segments() {
        if seg.start_time > 0.0 && sys.landing_set().member(&seg.start_point) {
            visits.push(seg.start_time);
        }
        if seg.duration > 0.0 {
            for (t, _) in surface_hits(
                sys.flow(),
                sys.landing_set(),
                &seg.start_point,
                seg.duration,
                scan,
                false,
            )? {
                visits.push(seg.start_time + t);
            }
        }
    }
    visits.sort_by(f64::total_cmp);
    visits.dedup_by(|a, b| (*a - *b).abs() <= TIME_EQ_TOL);
    TimeSequence::new(visits, sys.constants().s0, SequenceSource::Visit)
}

/// Hit times of a marked cross-section along a continuous flow.
pub fn section_sequence(
    flow: &Semiflow,
    section: &ImpulseSet,
    min_gap: f64,
    x: &Point,
    horizon: f64,
) -> Result<TimeSequence> {
    let scan = min_gap.min(1.0) / 50.0;
    let times = surface_hits(flow, section, x, horizon, scan, false)?
        .into_iter()
        .map(|(t, _)| t)
        .collect();
    TimeSequence::new(times, min_gap, SequenceSource::Section)
}

/// Sorted merge of two event sequences from the same point and horizon.
///
/// Entries closer than `1e-9` collapse to the entry of the *first* sequence,
/// so the merge refines it with bit-identical shared times. The gap bound of
/// the result is the measured minimum gap. Errors when two distinct entries
/// come closer than the collapse tolerance allows to distinguish.
pub fn merge(a: &TimeSequence, b: &TimeSequence) -> Result<TimeSequence> {
    let (ta, tb) = (a.times(), b.times());
    let mut out = Vec::with_capacity(ta.len() + tb.len());
    let (mut i, mut j) = (0, 0);
    while i < ta.len() || j < tb.len() {
        match (ta.get(i), tb.get(j)) {
            (Some(&x), Some(&y)) if (x - y).abs() <= TIME_EQ_TOL => {
                out.push(x);
                i += 1;
                j += 1;
            }
            (Some(&x), Some(&y)) if x < y => {
                out.push(x);
                i += 1;
            }
            (Some(_), Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (Some(&x), None) => {
                out.push(x);
                i += 1;
            }
            (None, Some(&y)) => {
                out.push(y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    let mut min_gap = f64::INFINITY;
    for w in out.windows(2) {
        let gap = w[1] - w[0];
        if gap <= 2.0 * TIME_EQ_TOL {
            return Err(Error::Inconsistent(format!(
                "merged entries {} and {} are too close to remain strictly increasing",
                w[0], w[1]
            )));
        }
        min_gap = min_gap.min(gap);
    }
    if !min_gap.is_finite() {
        min_gap = a.min_gap().min(b.min_gap());
    }
    TimeSequence::new(out, min_gap, SequenceSource::Merged)
}

/// Whether `fine` refines `coarse` on the samples: every entry of the coarse
/// sequence up to the horizon appears (within `1e-9`) in the fine one.
pub fn refines(
    fine: &dyn Fn(&Point) -> Result<TimeSequence>,
    coarse: &dyn Fn(&Point) -> Result<TimeSequence>,
    samples: &[Point],
    horizon: f64,
) -> Result<bool> {
    for x in samples {
        let f = fine(x)?;
        let c = coarse(x)?;
        for &t in c.times().iter().take_while(|&&t| t <= horizon) {
            let found = f.times().iter().any(|&u| (u - t).abs() <= TIME_EQ_TOL);
            if !found {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Sampled admissibility verdict for a sequence builder.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub eta: f64,
    /// Smallest first entry over the reference set `Z`; `None` when no
    /// reference sample produced an event.
    pub first_on_z_min: Option<f64>,
    /// Smallest gap observed over all samples; `None` without consecutive
    /// events.
    pub min_gap: Option<f64>,
    /// Worst deviation of the flow-translation identity
    /// `t_n(state_at(s, x)) = t_n(x) - s` for sampled `s` below the first
    /// event time.
    pub translation_worst: f64,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

/// Checks on samples that a sequence builder is admissible with respect to
/// `z_sample`: first entries at least `eta` on `Z`, gaps at least `eta`
/// everywhere, and the flow-translation identity within `1e-9`.
pub fn admissibility_report(
    dynamics: &Dynamics,
    builder: &dyn Fn(&Point, f64) -> Result<TimeSequence>,
    z_sample: &[Point],
    samples: &[Point],
    eta: f64,
    horizon: f64,
) -> Result<AdmissibilityReport> {
    let mut witnesses = Vec::new();
    let mut first_on_z_min: Option<f64> = None;
    for z in z_sample {
        let seq = builder(z, horizon)?;
        if let Some(&first) = seq.times().first() {
            first_on_z_min = Some(first_on_z_min.map_or(first, |m: f64| m.min(first)));
            if first < eta - TIME_EQ_TOL {
                witnesses.push(format!("first event {first:.12} < eta at {:?}", z.coords()));
            }
        }
    }

    let mut min_gap: Option<f64> = None;
    for x in samples.iter().chain(z_sample.iter()) {
        let seq = builder(x, horizon)?;
        for w in seq.times().windows(2) {
            let gap = w[1] - w[0];
            min_gap = Some(min_gap.map_or(gap, |m: f64| m.min(gap)));
            if gap < eta - TIME_EQ_TOL {
                witnesses.push(format!("gap {gap:.12} < eta at {:?}", x.coords()));
            }
        }
    }

    let mut translation_worst: f64 = 0.0;
    for x in samples {
        let seq = builder(x, horizon)?;
        let Some(&first) = seq.times().first() else {
            continue;
        };
        for frac in [0.25, 0.5, 0.75] {
            let s = first * frac;
            if s <= 0.0 {
                continue;
            }
            let shifted_start = dynamics.state_at(s, x)?;
            let shifted = builder(&shifted_start, horizon - s)?;
            for (k, &t) in seq
                .times()
                .iter()
                .take_while(|&&t| t - s <= horizon - s)
                .enumerate()
            {
                match shifted.times().get(k) {
                    Some(&u) => {
                        let dev = (u - (t - s)).abs();
                        translation_worst = translation_worst.max(dev);
                        if dev > TIME_EQ_TOL {
                            witnesses.push(format!(
                                "translation identity off by {dev:.3e} at {:?}, s = {s:.6}",
                                x.coords()
                            ));
                        }
                    }
                    None => witnesses.push(format!(
                        "entry {k} missing after translation by {s:.6} at {:?}",
                        x.coords()
                    )),
                }
            }
        }
    }

    Ok(AdmissibilityReport {
        eta,
        first_on_z_min,
        min_gap,
        translation_worst,
        pass: witnesses.is_empty(),
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{annulus, doubling_suspension};
    use std::f64::consts::PI;

    fn annulus_sys() -> std::sync::Arc<ImpulsiveSystem> {
        match annulus().dynamics {
            Dynamics::Impulsive(s) => s,
            _ => unreachable!(),
        }
    }

    #[test]
    fn observation_set_matches_interval_arithmetic() {
        let seq =
            TimeSequence::new(vec![PI, 2.0 * PI, 3.0 * PI], PI, SequenceSource::Impulse).unwrap();
        let j = seq.observation_set(5.0, 0.1).unwrap();
        // 2*pi > 5, so only the window around pi is removed.
        assert_eq!(j.parts(), &[(0.0, PI - 0.1), (PI + 0.1, 5.0)]);
        assert!(!j.contains(0.0));
        assert!(j.contains(PI - 0.1));
        assert!(!j.contains(PI));
        assert!(j.contains(5.0));
        assert!((j.total_length() - (5.0 - 0.2)).abs() < 1e-12);
    }

    #[test]
    fn observation_set_empty_sequence() {
        let seq = TimeSequence::new(vec![], 1.0, SequenceSource::Impulse).unwrap();
        let j = seq.observation_set(5.0, 0.1).unwrap();
        assert_eq!(j.parts(), &[(0.0, 5.0)]);
        assert_eq!(seq.count_before(5.0), 0);
    }

    #[test]
    fn observation_set_truncates_at_horizon() {
        let seq = TimeSequence::new(vec![1.0, 2.0, 3.0], 1.0, SequenceSource::Impulse).unwrap();
        let j = seq.observation_set(2.5, 0.25).unwrap();
        assert_eq!(j.parts(), &[(0.0, 0.75), (1.25, 1.75), (2.25, 2.5)]);
        assert_eq!(seq.count_before(2.5), 2);
    }

    #[test]
    fn oversized_delta_is_rejected() {
        let seq = TimeSequence::new(vec![1.0, 2.0], 1.0, SequenceSource::Impulse).unwrap();
        assert!(seq.observation_set(5.0, 0.5).is_err());
        assert!(seq.observation_set(5.0, 0.49).is_ok());
    }

    #[test]
    fn merge_collapses_duplicates() {
        let tau = TimeSequence::new(vec![1.5 * PI], PI, SequenceSource::Impulse).unwrap();
        let theta = TimeSequence::new(vec![0.5 * PI, 1.5 * PI], PI, SequenceSource::Visit).unwrap();
        let merged = merge(&tau, &theta).unwrap();
        assert_eq!(merged.times(), &[0.5 * PI, 1.5 * PI]);
        assert!((merged.min_gap() - PI).abs() < 1e-12);

        let empty = TimeSequence::new(vec![], 1.0, SequenceSource::Impulse).unwrap();
        let one = TimeSequence::new(vec![1.0], 1.0, SequenceSource::Visit).unwrap();
        assert_eq!(merge(&empty, &one).unwrap().times(), &[1.0]);

        let same = merge(&theta, &theta).unwrap();
        assert_eq!(same.times(), theta.times());
    }

    #[test]
    fn gap_violations_are_reported() {
        assert!(TimeSequence::new(vec![1.0, 1.01], 1.0, SequenceSource::Impulse).is_err());
        assert!(TimeSequence::new(vec![-1.0], 1.0, SequenceSource::Impulse).is_err());
    }

    #[test]
    fn annulus_visit_times() {
        let sys = annulus_sys();
        let sp = sys.space();

        // Pass through the landing ray at pi/2, then the post-jump landing.
        let x = sp.point(&[0.0, 1.5]).unwrap();
        let visits = visit_sequence(&sys, &x, 6.0).unwrap();
        assert_eq!(visits.len(), 2);
        assert!((visits.times()[0] - 0.5 * PI).abs() < 1e-9);
        assert!((visits.times()[1] - 1.5 * PI).abs() < 1e-9);

        // Every post-jump state of the periodic orbit lies on the landing ray.
        let y = sp.point(&[-1.0, 0.0]).unwrap();
        let visits = visit_sequence(&sys, &y, 10.0).unwrap();
        let expect = [PI, 2.0 * PI, 3.0 * PI];
        assert_eq!(visits.len(), 3);
        for (t, e) in visits.times().iter().zip(expect) {
            assert!((t - e).abs() < 1e-9);
        }
    }

    #[test]
    fn merged_sequence_refines_both_inputs() {
        let sys = annulus_sys();
        let sp = sys.space();
        let x = sp.point(&[0.0, 1.5]).unwrap();
        let horizon = 12.0;
        let tau = impulse_sequence(&sys, &x, horizon).unwrap();
        let theta = visit_sequence(&sys, &x, horizon).unwrap();
        let merged = merge(&tau, &theta).unwrap();

        for &t in tau.times() {
            assert!(merged.times().iter().any(|&u| (u - t).abs() <= 1e-9));
        }
        for &t in theta.times() {
            assert!(merged.times().iter().any(|&u| (u - t).abs() <= 1e-9));
        }

        // Containment of observation sets: finer sequences exclude more.
        let delta = 0.2;
        let j_fine = merged.observation_set(horizon, delta).unwrap();
        let j_coarse = tau.observation_set(horizon, delta).unwrap();
        assert!(j_fine.is_subset_of(&j_coarse));
        assert!(!j_coarse.is_subset_of(&j_fine));
    }

    #[test]
    fn refinement_direction() {
        let sys = annulus_sys();
        let horizon = 12.0;
        let samples = vec![
            sys.space().point(&[0.0, 1.5]).unwrap(),
            sys.space().point(&[-1.0, 0.0]).unwrap(),
        ];
        let tau = |x: &Point| impulse_sequence(&sys, x, horizon);
        let merged = |x: &Point| {
            let t = impulse_sequence(&sys, x, horizon)?;
            let v = visit_sequence(&sys, x, horizon)?;
            merge(&t, &v)
        };
        assert!(refines(&merged, &tau, &samples, horizon).unwrap());
        // The impulse sequence misses the pass-through visit at pi/2.
        assert!(!refines(&tau, &merged, &samples[..1], horizon).unwrap());
        // Reflexivity.
        assert!(refines(&tau, &tau, &samples, horizon).unwrap());
    }

    #[test]
    fn impulse_sequence_is_admissible_on_the_annulus() {
        let sys = annulus_sys();
        let eta = sys.constants().eta;
        let dynamics = Dynamics::Impulsive(sys.clone());
        let z: Vec<Point> = sys.impulse_set().sample(12);
        let samples = crate::systems::annulus_core_grid(&sys, 16);
        let builder = |x: &Point, t: f64| impulse_sequence(&sys, x, t);
        let report = admissibility_report(&dynamics, &builder, &z, &samples, eta, 25.0).unwrap();
        assert!(report.pass, "{report:#?}");
        assert!(report.first_on_z_min.unwrap() >= eta - 1e-9);
        assert!(report.min_gap.unwrap() >= eta - 1e-9);
        assert!(report.translation_worst <= 1e-9);
    }

    #[test]
    fn merged_sequence_is_admissible_with_measured_gap() {
        let sys = annulus_sys();
        let dynamics = Dynamics::Impulsive(sys.clone());
        let samples = crate::systems::annulus_core_grid(&sys, 16);
        let builder = |x: &Point, t: f64| {
            let tau = impulse_sequence(&sys, x, t)?;
            let theta = visit_sequence(&sys, x, t)?;
            merge(&tau, &theta)
        };
        // Measure the empirical gap of the merged sequence, then check
        // admissibility against it.
        let mut eta_merged = f64::INFINITY;
        for x in &samples {
            let seq = builder(x, 25.0).unwrap();
            for w in seq.times().windows(2) {
                eta_merged = eta_merged.min(w[1] - w[0]);
            }
        }
        assert!(eta_merged > 0.0 && eta_merged.is_finite());
        // For this geometry the merged events settle into half-revolution
        // spacing.
        assert!((eta_merged - PI).abs() < 1e-6, "measured gap {eta_merged}");
        let report =
            admissibility_report(&dynamics, &builder, &[], &samples, eta_merged, 25.0).unwrap();
        assert!(report.pass, "{report:#?}");
    }

    #[test]
    fn empty_impulse_set_has_no_visits() {
        use crate::impulse::{ImpulseMap, ImpulseSet, ImpulsiveSystem, SystemConstants};
        use crate::space::{Bounds, MetricSpace, Semiflow, SpaceId};
        use std::sync::Arc;
        let space = Arc::new(MetricSpace::euclidean(
            SpaceId("free"),
            2,
            Bounds::boxed(&[-4.0, -4.0], &[4.0, 4.0]),
        ));
        let flow = Arc::new(Semiflow::new(space.clone(), "drift", |t, x| {
            Point::new(x.space(), &[x.coord(0), (x.coord(1) + t).min(4.0)])
        }));
        let sys = ImpulsiveSystem::new(
            flow,
            ImpulseSet::empty(&space),
            ImpulseMap::new(1.0, |p: &Point| *p),
            ImpulseSet::empty(&space),
            SystemConstants {
                xi0: 1.0,
                eta: 1.0,
                a: 1.0,
                s0: 1.0,
                xi: 0.2,
            },
        )
        .unwrap();
        let x = space.point(&[0.0, 0.0]).unwrap();
        assert!(visit_sequence(&sys, &x, 3.0).unwrap().is_empty());
        assert!(impulse_sequence(&sys, &x, 3.0).unwrap().is_empty());
    }

    #[test]
    fn artificial_gap_violation_is_witnessed() {
        // A builder whose sequence gaps fall below the claimed eta fails the
        // admissibility report with a witness.
        let sys = annulus_sys();
        let dynamics = Dynamics::Impulsive(sys.clone());
        let samples = vec![sys.space().point(&[0.0, 1.5]).unwrap()];
        let builder =
            |_: &Point, _: f64| TimeSequence::new(vec![1.0, 1.01], 0.005, SequenceSource::Merged);
        let report = admissibility_report(&dynamics, &builder, &[], &samples, PI, 6.0).unwrap();
        assert!(!report.pass);
        assert!(report.min_gap.unwrap() < 0.02);
        assert!(report.witnesses.iter().any(|w| w.contains("gap")));
    }

    #[test]
    fn section_sequence_on_the_suspension() {
        let ex = doubling_suspension();
        let flow = match &ex.dynamics {
            Dynamics::Flow(f) => f.clone(),
            _ => unreachable!(),
        };
        let section = ex.section.as_ref().unwrap();
        let x = flow.space().point(&[0.3, 0.25]).unwrap();
        let seq = section_sequence(&flow, section, ex.section_gap, &x, 4.0).unwrap();
        // Height 0.25 reaches the roof after 0.75, then every unit.
        let expect = [0.75, 1.75, 2.75, 3.75];
        assert_eq!(seq.len(), 4);
        for (t, e) in seq.times().iter().zip(expect) {
            assert!((t - e).abs() < 1e-9, "{t} vs {e}");
        }
    }
}
