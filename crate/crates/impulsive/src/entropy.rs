//! Topological entropy estimation by separated-set counting.
//!
//! Two orbits are `(T, eps)`-separated when they move at least `eps` apart
//! at some observation time up to `T`. The classical mode observes the whole
//! window `[0, T]`; the windowed (`tau`) mode observes only the complement
//! of blackout intervals around each point's event times, which is the
//! notion that stays meaningful for discontinuous semiflows. Counting a
//! maximal separated subset of a deterministic sample for growing `T` and
//! fitting the log-count slope gives the entropy estimate.
//!
//! The greedy counter scales to thousands of points and is a lower bound
//! for the separated-set supremum; the exact counter (branch-and-bound over
//! at most 20 points) bounds the gap on small instances.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::impulse::{Dynamics, OrbitEval};
use crate::space::{uniform_time_modulus, Point, Semiflow};
use crate::timefns::{IntervalSet, TimeSequence};

/// Which observation times enter the separation distance.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Mode {
    Classical,
    Tau,
}

/// Parameters of one separated-count cell.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparationParams {
    pub horizon: f64,
    pub epsilon: f64,
    /// Blackout half-width; zero in classical mode.
    pub delta: f64,
    pub mode: Mode,
    pub grid_step: f64,
}

impl SeparationParams {
    pub fn classical(horizon: f64, epsilon: f64, grid_step: f64) -> Result<Self> {
        if horizon <= 0.0 || epsilon <= 0.0 || grid_step <= 0.0 {
            return Err(Error::domain(
                "horizon, epsilon and grid step must be positive",
            ));
        }
        Ok(SeparationParams {
            horizon,
            epsilon,
            delta: 0.0,
            mode: Mode::Classical,
            grid_step,
        })
    }

    /// Windowed mode; the time grid step is `delta / 4`, so no blackout
    /// window can be straddled unnoticed.
    pub fn tau(horizon: f64, epsilon: f64, delta: f64) -> Result<Self> {
        if horizon <= 0.0 || epsilon <= 0.0 || delta <= 0.0 {
            return Err(Error::domain("horizon, epsilon and delta must be positive"));
        }
        Ok(SeparationParams {
            horizon,
            epsilon,
            delta,
            mode: Mode::Tau,
            grid_step: delta / 4.0,
        })
    }

    fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }
}

/// Classical-mode time step for a flow: half the uniform continuity modulus
/// at `epsilon / 2`, so grid sampling cannot miss an `epsilon`-excursion by
/// more than `epsilon / 2`.
pub fn classical_step(flow: &Semiflow, epsilon: f64, probe: &[Point]) -> Result<f64> {
    let beta = uniform_time_modulus(flow, epsilon / 2.0, probe, 5.0)?;
    Ok(beta / 2.0)
}

/// Builds the event sequence of a point up to a horizon (impulse times,
/// section hits, merged sequences, ...).
pub type SeqBuilder<'a> = &'a (dyn Fn(&Point, f64) -> Result<TimeSequence> + Sync);

struct Prepared {
    orbit: OrbitEval,
    /// Observation times; shared grid in classical mode, per-point in
    /// windowed mode.
    times: Vec<f64>,
}

fn prepare(
    dynamics: &Dynamics,
    points: &[Point],
    params: &SeparationParams,
    seq: Option<SeqBuilder>,
) -> Result<Vec<Prepared>> {
    match params.mode {
        Mode::Classical => {
            let shared =
                IntervalSet::window_with_zero(params.horizon).sample_times(params.grid_step);
            points
                .iter()
                .map(|p| {
                    Ok(Prepared {
                        orbit: dynamics.orbit(p, params.horizon)?,
                        times: shared.clone(),
                    })
                })
                .collect()
        }
        Mode::Tau => {
            let builder = seq
                .ok_or_else(|| Error::domain("windowed mode requires an event-sequence builder"))?;
            points
                .iter()
                .map(|p| {
                    let sequence = builder(p, params.horizon)?;
                    let windows = sequence.observation_set(params.horizon, params.delta)?;
                    Ok(Prepared {
                        orbit: dynamics.orbit(p, params.horizon)?,
                        times: windows.sample_times(params.grid_step),
                    })
                })
                .collect()
        }
    }
}

/// Max over the sampled interval set of the distance between the two
/// orbits. The classical separation distance is obtained by passing the
/// closed full window.
pub fn orbit_sep_dist(
    dynamics: &Dynamics,
    x: &Point,
    y: &Point,
    windows: &IntervalSet,
    grid_step: f64,
) -> Result<f64> {
    if grid_step <= 0.0 {
        return Err(Error::domain("grid step must be positive"));
    }
    let times = windows.sample_times(grid_step);
    if times.is_empty() {
        return Err(Error::domain("empty observation grid"));
    }
    let ox = dynamics.orbit(x, windows.horizon())?;
    let oy = dynamics.orbit(y, windows.horizon())?;
    let space = dynamics.space();
    let mut worst: f64 = 0.0;
    for &t in &times {
        worst = worst.max(space.dist_unchecked(&ox.point_at(t), &oy.point_at(t)));
    }
    Ok(worst)
}

/// Does the orbit of `b` escape the ball around `a` on `a`'s observation
/// times?
#[inline]
fn escapes(a: &Prepared, b: &Prepared, space: &crate::space::MetricSpace, eps: f64) -> bool {
    a.times
        .iter()
        .any(|&t| space.dist_unchecked(&a.orbit.point_at(t), &b.orbit.point_at(t)) >= eps)
}

/// Mutual separation: each point must escape the other's ball. The
/// observation windows depend on the center, so both directions are
/// checked.
#[inline]
fn pair_separated(a: &Prepared, b: &Prepared, space: &crate::space::MetricSpace, eps: f64) -> bool {
    escapes(a, b, space, eps) && escapes(b, a, space, eps)
}

/// Greedy maximal separated subset of `points`, scanned in input order.
/// Returns the count and the selected indices; a lower bound for the
/// separated-set supremum.
pub fn greedy_separated(
    dynamics: &Dynamics,
    points: &[Point],
    params: &SeparationParams,
    seq: Option<SeqBuilder>,
) -> Result<(usize, Vec<usize>)> {
    if points.is_empty() {
        return Err(Error::domain("point sample must be nonempty"));
    }
    let prepared = prepare(dynamics, points, params, seq)?;
    let space = dynamics.space().clone();
    let eps = params.epsilon;
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..prepared.len() {
        let me = &prepared[i];
        let ok = if kept.len() >= 64 {
            kept.par_iter()
                .all(|&q| pair_separated(me, &prepared[q], &space, eps))
        } else {
            kept.iter()
                .all(|&q| pair_separated(me, &prepared[q], &space, eps))
        };
        if ok {
            kept.push(i);
        }
    }
    Ok((kept.len(), kept))
}

/// Exact maximum separated subset by branch-and-bound; refuses more than 20
/// points.
pub fn exact_separated(
    dynamics: &Dynamics,
    points: &[Point],
    params: &SeparationParams,
    seq: Option<SeqBuilder>,
) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::domain("point sample must be nonempty"));
    }
    if points.len() > 20 {
        return Err(Error::domain(format!(
            "exact count limited to 20 points, got {}",
            points.len()
        )));
    }
    let prepared = prepare(dynamics, points, params, seq)?;
    let space = dynamics.space();
    let n = prepared.len();
    // Conflict graph: an edge where the pair is NOT mutually separated.
    let mut conflicts = vec![0u32; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if !pair_separated(&prepared[i], &prepared[j], space, params.epsilon) {
                conflicts[i] |= 1 << j;
                conflicts[j] |= 1 << i;
            }
        }
    }
    let mut best = 0u32;
    fn search(conflicts: &[u32], cand: u32, size: u32, best: &mut u32) {
        if size + cand.count_ones() <= *best {
            return;
        }
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        let v = cand.trailing_zeros() as usize;
        // Include v.
        search(conflicts, cand & !(1 << v) & !conflicts[v], size + 1, best);
        // Exclude v.
        search(conflicts, cand & !(1 << v), size, best);
    }
    search(&conflicts, (1u32 << n) - 1, 0, &mut best);
    Ok(best as usize)
}

/// Separated counts over a horizon grid with the fitted growth rate.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthEstimate {
    /// `(horizon, count)` per grid entry.
    pub counts: Vec<(f64, usize)>,
    /// Least-squares slope of `ln count` over the upper half of the grid:
    /// the entropy estimate, in nats per unit time.
    pub slope: f64,
    pub intercept: f64,
    /// Fit residuals over the upper half.
    pub residuals: Vec<f64>,
    /// All counts were 0 or 1; the slope is reported as zero.
    pub degenerate: bool,
}

/// Greedy counts for every horizon in `t_grid` (at least 4 increasing
/// entries), with the growth rate fitted over the upper half of the grid.
pub fn entropy_estimate(
    dynamics: &Dynamics,
    sample: &[Point],
    t_grid: &[f64],
    params: &SeparationParams,
    seq: Option<SeqBuilder>,
) -> Result<GrowthEstimate> {
    if t_grid.len() < 4 {
        return Err(Error::domain("need at least 4 horizon grid entries"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("horizon grid must be strictly increasing"));
    }
    let mut counts = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let cell = params.with_horizon(t);
        let (count, _) = greedy_separated(dynamics, sample, &cell, seq)?;
        counts.push((t, count));
    }
    Ok(fit_growth(counts))
}

/// Fits the growth rate of an externally computed count table (least
/// squares on `ln count` over the upper half of the entries).
pub fn fit_counts(counts: Vec<(f64, usize)>) -> GrowthEstimate {
    fit_growth(counts)
}

fn fit_growth(counts: Vec<(f64, usize)>) -> GrowthEstimate {
    let degenerate = counts.iter().all(|&(_, c)| c <= 1);
    if degenerate {
        return GrowthEstimate {
            counts,
            slope: 0.0,
            intercept: 0.0,
            residuals: Vec::new(),
            degenerate: true,
        };
    }
    let upper = &counts[counts.len() / 2..];
    let xs: Vec<f64> = upper.iter().map(|&(t, _)| t).collect();
    let ys: Vec<f64> = upper.iter().map(|&(_, c)| (c.max(1) as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residuals = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    GrowthEstimate {
        counts,
        slope,
        intercept,
        residuals,
        degenerate: false,
    }
}

/// One cell of an `(epsilon, delta)` sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepCell {
    pub epsilon: f64,
    pub delta: f64,
    pub estimate: GrowthEstimate,
}

/// Sweep over decreasing `epsilon` (and `delta` in windowed mode).
#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub cells: Vec<SweepCell>,
    /// Slope at the smallest `(epsilon, delta)`.
    pub reported_slope: f64,
    /// The two finest epsilon slopes agree within 10%.
    pub stable: bool,
    /// Counts reached the sample size somewhere: the sample cannot witness
    /// further growth (a finite scan can never certify an infinite
    /// supremum).
    pub saturated: bool,
    /// Slopes nondecreasing as epsilon decreases (diagnostic).
    pub eps_monotone: bool,
}

/// Runs [`entropy_estimate`] over grids of `epsilon` and `delta`, both
/// strictly decreasing. In classical mode pass an empty delta grid.
#[allow(clippy::too_many_arguments)]
pub fn entropy_sweep(
    dynamics: &Dynamics,
    sample: &[Point],
    t_grid: &[f64],
    eps_grid: &[f64],
    delta_grid: &[f64],
    mode: Mode,
    grid_step: Option<f64>,
    seq: Option<SeqBuilder>,
) -> Result<SweepTable> {
    if eps_grid.is_empty() || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("epsilon grid must be strictly decreasing"));
    }
    let deltas: Vec<f64> = match mode {
        Mode::Classical => vec![0.0],
        Mode::Tau => {
            if delta_grid.is_empty() || delta_grid.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::domain("delta grid must be strictly decreasing"));
            }
            delta_grid.to_vec()
        }
    };
    let horizon_max = *t_grid
        .last()
        .ok_or_else(|| Error::domain("empty horizon grid"))?;
    let mut cells = Vec::new();
    for &eps in eps_grid {
        for &delta in &deltas {
            let params = match mode {
                Mode::Classical => {
                    let step = match grid_step {
                        Some(s) => s,
                        None => default_classical_step(dynamics, eps, sample)?,
                    };
                    SeparationParams::classical(horizon_max, eps, step)?
                }
                Mode::Tau => SeparationParams::tau(horizon_max, eps, delta)?,
            };
            let estimate = entropy_estimate(dynamics, sample, t_grid, &params, seq)?;
            cells.push(SweepCell {
                epsilon: eps,
                delta,
                estimate,
            });
        }
    }
    let sample_size = sample.len();
    let saturated = cells
        .iter()
        .any(|c| c.estimate.counts.iter().any(|&(_, n)| n >= sample_size));
    let reported_slope = cells.last().map(|c| c.estimate.slope).unwrap_or(0.0);
    // Compare the two finest epsilon levels at the finest delta.
    let finest_delta = *deltas.last().unwrap();
    let eps_slopes: Vec<f64> = eps_grid
        .iter()
        .map(|&e| {
            cells
                .iter()
                .find(|c| c.epsilon == e && c.delta == finest_delta)
                .map(|c| c.estimate.slope)
                .unwrap_or(0.0)
        })
        .collect();
    let stable = match eps_slopes.len() {
        0 | 1 => true,
        n => {
            let (a, b) = (eps_slopes[n - 2], eps_slopes[n - 1]);
            (a - b).abs() <= 0.10 * a.abs().max(b.abs()).max(0.1)
        }
    };
    let eps_monotone = eps_slopes.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    Ok(SweepTable {
        cells,
        reported_slope,
        stable,
        saturated,
        eps_monotone,
    })
}

fn default_classical_step(dynamics: &Dynamics, eps: f64, sample: &[Point]) -> Result<f64> {
    match dynamics {
        Dynamics::Flow(flow) => {
            let probe: Vec<Point> = sample.iter().copied().take(32).collect();
            classical_step(flow, eps, &probe)
        }
        Dynamics::Impulsive(sys) => {
            // Orbit pieces follow the continuous flow; its modulus governs
            // the step between impulses.
            let probe: Vec<Point> = sample.iter().copied().take(32).collect();
            classical_step(sys.flow(), eps, &probe)
        }
    }
}
