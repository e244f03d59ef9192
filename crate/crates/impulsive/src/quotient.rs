//! The quotient space that identifies impulse points with their reset
//! images, the pseudometric it carries, and the induced semiflow.
//!
//! Points `x, y` are equivalent when `x = y`, `y = I(x)`, `x = I(y)` or
//! `I(x) = I(y)` (with `I` applied only on the impulse set). Collapsing
//! equivalence classes makes the impulsive semiflow continuous; when the
//! reset map does not expand distances, the chain infimum that defines the
//! quotient metric collapses to a minimum over representative pairs, which
//! is what makes it computable.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::impulse::ImpulsiveSystem;
use crate::space::{Point, MEMBERSHIP_TOL};

/// Cap on enumerated class members; more indicates a degenerate reset map.
const MAX_CLASS_SIZE: usize = 16;

/// Chart resolution of the reset-map inversion scan.
const INVERSION_GRID: usize = 10_000;

/// An equivalence class, enumerated as a finite set of representatives
/// sorted lexicographically.
#[derive(Clone, Debug, Serialize)]
pub struct EquivClass {
    representatives: Vec<Point>,
    /// The transitive closure added members beyond the basic
    /// `{x, I(x)} ∪ preimages` description.
    pub grew_beyond_basic: bool,
}

impl EquivClass {
    pub fn representatives(&self) -> &[Point] {
        &self.representatives
    }

    /// Lexicographically least representative; a deterministic identity for
    /// tables.
    pub fn canonical(&self) -> &Point {
        &self.representatives[0]
    }
}

/// A point of the quotient space.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientPoint {
    pub class: EquivClass,
}

impl QuotientPoint {
    pub fn canonical(&self) -> &Point {
        self.class.canonical()
    }
}

/// The quotient of an impulsive system's phase space.
pub struct Quotient {
    sys: Arc<ImpulsiveSystem>,
    /// The representative-pair formula is valid: the reset map was declared
    /// and measured nonexpanding.
    collapse_valid: bool,
    measured_lipschitz: f64,
}

impl Quotient {
    pub fn new(sys: Arc<ImpulsiveSystem>) -> Self {
        // Measure the reset map on chart pairs; the collapse formula is only
        // used when the map does not expand distances.
        let space = sys.space().clone();
        let sample = sys.impulse_set().sample(64);
        let mut measured: f64 = 0.0;
        for i in 0..sample.len() {
            let ii = sys.impulse_map().apply(&sample[i]);
            for j in (i + 1)..sample.len() {
                let base = space.dist_unchecked(&sample[i], &sample[j]);
                if base <= 1e-12 {
                    continue;
                }
                let jj = sys.impulse_map().apply(&sample[j]);
                measured = measured.max(space.dist_unchecked(&ii, &jj) / base);
            }
        }
        let collapse_valid =
            sys.impulse_map().lipschitz_bound() <= 1.0 + 1e-9 && measured <= 1.0 + 1e-9;
        Quotient {
            sys,
            collapse_valid,
            measured_lipschitz: measured,
        }
    }

    pub fn system(&self) -> &Arc<ImpulsiveSystem> {
        &self.sys
    }

    pub fn measured_lipschitz(&self) -> f64 {
        self.measured_lipschitz
    }

    fn points_eq(&self, x: &Point, y: &Point) -> bool {
        self.sys.space().dist_unchecked(x, y) <= MEMBERSHIP_TOL
    }

    /// The defining relation, evaluated with tolerance `1e-9`; the reset map
    /// is applied only to impulse-set members.
    pub fn equivalent(&self, x: &Point, y: &Point) -> bool {
        if self.points_eq(x, y) {
            return true;
        }
        let set = self.sys.impulse_set();
        let (x_in, y_in) = (set.member(x), set.member(y));
        if x_in && self.points_eq(&self.sys.impulse_map().apply(x), y) {
            return true;
        }
        if y_in && self.points_eq(&self.sys.impulse_map().apply(y), x) {
            return true;
        }
        x_in && y_in
            && self.points_eq(
                &self.sys.impulse_map().apply(x),
                &self.sys.impulse_map().apply(y),
            )
    }

    /// All reset-map preimages of `target` on the impulse set, by chart scan
    /// and local refinement. Errors if the multiplicity exceeds the class
    /// cap.
    fn preimages(&self, target: &Point) -> Result<Vec<Point>> {
        let set = self.sys.impulse_set();
        if set.is_empty() {
            return Ok(Vec::new());
        }
        let space = self.sys.space();
        let gap = |s: f64| {
            let p = set.chart(s);
            space.dist_unchecked(&self.sys.impulse_map().apply(&p), target)
        };
        let n = INVERSION_GRID;
        let values: Vec<f64> = (0..=n).map(|i| gap(i as f64 / n as f64)).collect();
        let coarse = 10.0 / n as f64; // generous basin threshold
        let mut found: Vec<Point> = Vec::new();
        for i in 0..=n {
            let is_local_min =
                (i == 0 || values[i] <= values[i - 1]) && (i == n || values[i] <= values[i + 1]);
            if !is_local_min || values[i] > coarse.max(1e-3) {
                continue;
            }
            // Golden-section refinement around the basin.
            let mut lo = if i == 0 {
                0.0
            } else {
                (i - 1) as f64 / n as f64
            };
            let mut hi = if i == n {
                1.0
            } else {
                (i + 1) as f64 / n as f64
            };
            for _ in 0..80 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if gap(m1) < gap(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            let s = 0.5 * (lo + hi);
            if gap(s) <= MEMBERSHIP_TOL {
                let p = set.chart(s);
                if !found.iter().any(|q| self.points_eq(q, &p)) {
                    found.push(p);
                    if found.len() > MAX_CLASS_SIZE {
                        return Err(Error::numerical(format!(
                            "reset map has more than {MAX_CLASS_SIZE} preimages of {:?}",
                            target.coords()
                        )));
                    }
                }
            }
        }
        Ok(found)
    }

    /// Enumerates the equivalence class of `x`, taking the transitive
    /// closure (flagged if it grows beyond the basic description).
    pub fn class_of(&self, x: &Point) -> Result<EquivClass> {
        let set = self.sys.impulse_set();
        let mut reps: Vec<Point> = vec![*x];
        if set.member(x) {
            let image = self.sys.impulse_map().apply(x);
            push_unique(&mut reps, image, self);
            for p in self.preimages(&image)? {
                push_unique(&mut reps, p, self);
            }
        } else {
            for p in self.preimages(x)? {
                push_unique(&mut reps, p, self);
            }
        }
        let basic = reps.len();

        // Transitive closure: new members of the impulse set bring their
        // images and co-preimages along.
        let mut changed = true;
        while changed && reps.len() <= MAX_CLASS_SIZE {
            changed = false;
            let snapshot = reps.clone();
            for p in snapshot {
                if set.member(&p) {
                    let image = self.sys.impulse_map().apply(&p);
                    changed |= push_unique(&mut reps, image, self);
                    for q in self.preimages(&image)? {
                        changed |= push_unique(&mut reps, q, self);
                    }
                }
            }
        }
        if reps.len() > MAX_CLASS_SIZE {
            return Err(Error::numerical(format!(
                "equivalence class of {:?} exceeds {MAX_CLASS_SIZE} members",
                x.coords()
            )));
        }
        reps.sort_by(|a, b| a.lex_cmp(b));
        Ok(EquivClass {
            grew_beyond_basic: reps.len() > basic,
            representatives: reps,
        })
    }

    /// Natural projection of a phase-space point.
    pub fn project(&self, x: &Point) -> Result<QuotientPoint> {
        Ok(QuotientPoint {
            class: self.class_of(x)?,
        })
    }

    /// Quotient distance as the minimum over representative pairs; valid --
    /// and only offered -- when the reset map is nonexpanding (otherwise use
    /// [`Quotient::chain_dist`]).
    pub fn dist(&self, a: &QuotientPoint, b: &QuotientPoint) -> Result<f64> {
        if !self.collapse_valid {
            return Err(Error::domain(format!(
                "reset map expands distances (measured Lipschitz {:.6}); \
                 the representative-pair formula is invalid, use chain_dist",
                self.measured_lipschitz
            )));
        }
        Ok(self.rep_pair_min(&a.class, &b.class))
    }

    fn rep_pair_min(&self, a: &EquivClass, b: &EquivClass) -> f64 {
        let space = self.sys.space();
        let mut best = f64::INFINITY;
        for p in a.representatives() {
            for q in b.representatives() {
                best = best.min(space.dist_unchecked(p, q));
            }
        }
        best
    }

    /// Infimum of chain sums `d(p_1,q_1) + ... + d(p_n,q_n)` over chains of
    /// at most `max_chain` metric hops routed through the candidate pool.
    /// This is the oracle the collapse formula is checked against.
    pub fn chain_dist(
        &self,
        a: &QuotientPoint,
        b: &QuotientPoint,
        max_chain: usize,
        pool: &[Point],
    ) -> Result<f64> {
        if max_chain == 0 {
            return Err(Error::domain("max_chain must be at least 1"));
        }
        let mut classes: Vec<EquivClass> = Vec::with_capacity(pool.len() + 2);
        classes.push(a.class.clone());
        classes.push(b.class.clone());
        for p in pool {
            classes.push(self.class_of(p)?);
        }
        let n = classes.len();
        let mut direct = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.rep_pair_min(&classes[i], &classes[j]);
                direct[i][j] = d;
                direct[j][i] = d;
            }
        }
        // Min-plus powers: best[i] = shortest chain from class 0 to i using
        // at most k hops.
        let mut best: Vec<f64> = direct[0].clone();
        for _ in 1..max_chain {
            let mut next = best.clone();
            for (j, slot) in next.iter_mut().enumerate() {
                for m in 0..n {
                    let via = best[m] + direct[m][j];
                    if via < *slot {
                        *slot = via;
                    }
                }
            }
            best = next;
        }
        Ok(best[1])
    }

    /// The induced semiflow: evolve the representative that lies in the
    /// forward-invariant core, then project. Classes meet the core at most
    /// once, so the choice is unambiguous.
    pub fn state_at(&self, t: f64, a: &QuotientPoint) -> Result<QuotientPoint> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let rep = a
            .class
            .representatives()
            .iter()
            .find(|p| self.sys.in_core(p))
            .ok_or_else(|| {
                Error::domain(format!(
                    "class of {:?} has no representative in the forward-invariant core",
                    a.canonical().coords()
                ))
            })?;
        let moved = self.sys.state_at(t, rep)?;
        self.project(&moved)
    }

    /// Checks that evolving in the quotient commutes with projecting, and
    /// that the projected trajectory is continuous across impulse times.
    pub fn semiconjugacy_check(
        &self,
        samples: &[Point],
        times: &[f64],
        tol: f64,
    ) -> Result<SemiconjugacyReport> {
        let mut max_deviation: f64 = 0.0;
        let mut max_jump_gap: f64 = 0.0;
        let mut worst: Option<(Point, f64)> = None;
        let horizon = times.iter().copied().fold(0.0f64, f64::max).max(1e-9);
        for x in samples {
            if !self.sys.in_core(x) {
                return Err(Error::domain(format!(
                    "sample {:?} is not in the forward-invariant core",
                    x.coords()
                )));
            }
            let projected = self.project(x)?;
            for &t in times {
                let via_quotient = self.state_at(t, &projected)?;
                let via_system = self.project(&self.sys.state_at(t, x)?)?;
                let dev = self.dist(&via_quotient, &via_system)?;
                if dev > max_deviation {
                    max_deviation = dev;
                    worst = Some((*x, t));
                }
            }
            // Continuity across jumps: the pre-jump hit point and the
            // post-jump state project to the same class.
            let orbit = self.sys.orbit(x, horizon)?;
            for (seg, &tau) in orbit.segments().iter().zip(orbit.impulse_times()) {
                if let Some(hit) = &seg.end_point {
                    let before = self.project(hit)?;
                    let after = self.project(&orbit.point_at(tau, self.sys.flow()))?;
                    max_jump_gap = max_jump_gap.max(self.dist(&before, &after)?);
                }
            }
        }
        Ok(SemiconjugacyReport {
            max_deviation,
            max_jump_gap,
            tol,
            pass: max_deviation <= tol && max_jump_gap <= 1e-9,
            worst_sample: worst.map(|(p, t)| format!("{:?} at t = {t}", p.coords())),
        })
    }

    /// Oscillation of the induced semiflow over shrinking neighborhoods of
    /// `(t, x)`: evidence (not proof) of continuity. Perturbation directions
    /// are fixed while the radius shrinks.
    pub fn continuity_probe(
        &self,
        x: &Point,
        t: f64,
        radii: &[f64],
        directions: usize,
    ) -> Result<Vec<(f64, f64)>> {
        let base = self.project(x)?;
        let value = self.state_at(t, &base)?;
        let dim = self.sys.space().dimension();
        let mut out = Vec::with_capacity(radii.len());
        for &rho in radii {
            let mut osc: f64 = 0.0;
            for k in 0..directions {
                let angle = std::f64::consts::TAU * k as f64 / directions as f64;
                let mut coords: Vec<f64> = x.coords().to_vec();
                coords[0] += rho * angle.cos();
                if dim > 1 {
                    coords[1] += rho * angle.sin();
                }
                let moved = Point::new(x.space(), &coords);
                if !self.sys.space().contains(&moved) || !self.sys.in_core(&moved) {
                    continue;
                }
                for dt in [-rho, 0.0, rho] {
                    let tt = (t + dt).max(0.0);
                    let shifted = self.state_at(tt, &self.project(&moved)?)?;
                    osc = osc.max(self.dist(&shifted, &value)?);
                }
            }
            out.push((rho, osc));
        }
        Ok(out)
    }
}

fn push_unique(reps: &mut Vec<Point>, p: Point, q: &Quotient) -> bool {
    if reps.iter().any(|r| q.points_eq(r, &p)) {
        false
    } else {
        reps.push(p);
        true
    }
}

/// Result of the semiconjugacy and jump-continuity checks.
#[derive(Clone, Debug, Serialize)]
pub struct SemiconjugacyReport {
    pub max_deviation: f64,
    pub max_jump_gap: f64,
    pub tol: f64,
    pub pass: bool,
    pub worst_sample: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impulse::Dynamics;
    use crate::systems::{annulus, annulus_core_grid};
    use std::f64::consts::PI;

    fn quotient() -> Quotient {
        let sys = match annulus().dynamics {
            Dynamics::Impulsive(s) => s,
            _ => unreachable!(),
        };
        Quotient::new(sys)
    }

    #[test]
    fn relation_matches_the_reset_map() {
        let q = quotient();
        let sp = q.system().space().clone();
        let a = sp.point(&[1.0, 0.0]).unwrap();
        let b = sp.point(&[-1.0, 0.0]).unwrap();
        let c = sp.point(&[2.0, 0.0]).unwrap();
        assert!(q.equivalent(&a, &b), "reset image identified");
        assert!(q.equivalent(&a, &a), "reflexive");
        // Images of (1,0) and (2,0) are (-1,0) and (-1.5,0): distinct, and
        // neither point is the other's image.
        assert!(!q.equivalent(&a, &c));
    }

    #[test]
    fn classes_enumerate_reset_preimages() {
        let q = quotient();
        let sp = q.system().space().clone();

        let on_set = q.class_of(&sp.point(&[1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(on_set.representatives().len(), 2);
        assert!(!on_set.grew_beyond_basic);
        // Canonical representative is lexicographically least: (-1, 0).
        assert!((on_set.canonical().coord(0) + 1.0).abs() < 1e-9);

        // Interior point away from the set and its image: a singleton.
        let generic = q.class_of(&sp.point(&[0.0, 1.3]).unwrap()).unwrap();
        assert_eq!(generic.representatives().len(), 1);

        // A landing point pulls in its unique preimage: -(1+r)/2 = -1.25
        // gives r = 1.5.
        let landed = q.class_of(&sp.point(&[-1.25, 0.0]).unwrap()).unwrap();
        assert_eq!(landed.representatives().len(), 2);
        let has_preimage = landed
            .representatives()
            .iter()
            .any(|p| (p.coord(0) - 1.5).abs() < 1e-8 && p.coord(1).abs() < 1e-9);
        assert!(has_preimage, "{landed:?}");
    }

    #[test]
    fn quotient_distance_minimizes_over_pairs() {
        let q = quotient();
        let sp = q.system().space().clone();
        let a = q.project(&sp.point(&[1.0, 0.0]).unwrap()).unwrap();
        let b = q.project(&sp.point(&[2.0, 0.0]).unwrap()).unwrap();
        // Pairs: (1,0)-(2,0): 1; (1,0)-(-1.5,0): 2.5; (-1,0)-(2,0): 3;
        // (-1,0)-(-1.5,0): 0.5.
        assert!((q.dist(&a, &b).unwrap() - 0.5).abs() < 1e-12);

        let same = q.project(&sp.point(&[-1.0, 0.0]).unwrap()).unwrap();
        assert!(q.dist(&a, &same).unwrap() <= 1e-9);
    }

    #[test]
    fn chain_oracle_agrees_with_the_collapse_formula() {
        let q = quotient();
        let sp = q.system().space().clone();
        let pool = annulus_core_grid(q.system(), 60);
        let a = q.project(&sp.point(&[1.0, 0.0]).unwrap()).unwrap();
        let b = q.project(&sp.point(&[2.0, 0.0]).unwrap()).unwrap();
        let chain = q.chain_dist(&a, &b, 3, &pool).unwrap();
        let collapse = q.dist(&a, &b).unwrap();
        assert!(
            (chain - collapse).abs() <= 1e-9,
            "chain {chain} vs collapse {collapse}"
        );
        assert!((chain - 0.5).abs() < 1e-9);
        // A single metric hop reduces to the representative-pair minimum by
        // construction.
        let one_hop = q.chain_dist(&a, &b, 1, &pool).unwrap();
        assert_eq!(one_hop, collapse);
    }

    #[test]
    fn quotient_contraction_and_pseudometric() {
        let q = quotient();
        let pts = annulus_core_grid(q.system(), 40);
        let projected: Vec<QuotientPoint> = pts.iter().map(|p| q.project(p).unwrap()).collect();
        let space = q.system().space().clone();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let dq = q.dist(&projected[i], &projected[j]).unwrap();
                let d = space.dist(&pts[i], &pts[j]).unwrap();
                assert!(dq <= d + 1e-12, "quotient distance must not exceed d");
            }
        }
    }

    #[test]
    fn induced_semiflow_fixes_the_periodic_class() {
        let q = quotient();
        let sp = q.system().space().clone();
        let a = q.project(&sp.point(&[-1.0, 0.0]).unwrap()).unwrap();
        let moved = q.state_at(PI, &a).unwrap();
        assert!(q.dist(&a, &moved).unwrap() <= 1e-9);
        let same = q.state_at(0.0, &a).unwrap();
        assert!(q.dist(&a, &same).unwrap() <= 1e-9);
        // Quarter turn from the landing ray.
        let b = q.project(&sp.point(&[0.0, 1.0]).unwrap()).unwrap();
        let quarter = q.state_at(0.5 * PI, &b).unwrap();
        assert!((quarter.canonical().coord(0) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn semiconjugacy_holds_on_core_samples() {
        let q = quotient();
        let samples = annulus_core_grid(q.system(), 12);
        let times: Vec<f64> = (1..=6).map(|k| k as f64).collect();
        let report = q.semiconjugacy_check(&samples, &times, 1e-6).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.max_deviation <= 1e-9);
        assert!(report.max_jump_gap <= 1e-9);
    }

    #[test]
    fn induced_semiflow_oscillation_shrinks() {
        // Continuity evidence for the induced semiflow, probed at a generic
        // time and right at an impulse time (where the unprojected semiflow
        // is discontinuous).
        let q = quotient();
        let sp = q.system().space().clone();
        let x = sp.point(&[-1.0, 0.0]).unwrap();
        let radii = [1e-2, 1e-3, 1e-4, 2e-5];
        for t in [1.0, PI] {
            let table = q.continuity_probe(&x, t, &radii, 8).unwrap();
            for w in table.windows(2) {
                assert!(
                    w[1].1 <= w[0].1 * 1.1 + 1e-12,
                    "oscillation not shrinking at t={t}: {table:?}"
                );
            }
            let (_, final_osc) = *table.last().unwrap();
            assert!(
                final_osc < 1e-4,
                "oscillation {final_osc} at the finest radius, t={t}"
            );
        }
    }

    #[test]
    fn wrong_reset_map_breaks_the_conjugacy() {
        // Evolve with a system whose reset lands elsewhere, project with the
        // reference quotient: the deviation must be visible.
        let q = quotient();
        let other = crate::systems::annulus_family(0.75, 0.5, PI, 0.2).unwrap();
        let sp = q.system().space().clone();
        let x = sp.point(&[-1.0, 0.0]).unwrap();
        let t = 1.5 * PI; // past the first jump of both systems
        let reference = q.project(&q.system().state_at(t, &x).unwrap()).unwrap();
        let perturbed = q.project(&other.state_at(t, &x).unwrap()).unwrap();
        let dev = q.dist(&reference, &perturbed).unwrap();
        assert!(dev > 0.05, "deviation {dev} should expose the wrong reset");
    }
}
