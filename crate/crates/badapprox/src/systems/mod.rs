//! Indexed ball systems and the semi-decisions built on them.
//!
//! A [`BallSystem`] is a deterministic, pure map from one-based indices to
//! balls, either finite (explicit families) or unbounded (the classical
//! rational-approximation family, the constant-radius lattice
//! counterexample). All membership and radius predicates are exact; the
//! classical family's irrational radius `sqrt(d)/q^{1+1/d}` is kept in
//! symbolic form and compared through root-cleared integer inequalities.
//!
//! Every quantifier over an infinite tail is truncated at an explicit index
//! bound and reported as such: a survival verdict is evidence up to its
//! bound, never a proof about the infinite system.

mod classical;
mod z2;

pub use classical::ClassicalSystem;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, Ball, BoxRegion, Point, Scalar};

/// Exact radius of a system ball: a plain rational, or the symbolic value
/// `sqrt(d) / q^{(d+1)/d}` used by the classical family in dimension >= 2.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SystemRadius {
    Rational(Scalar),
    DimRoot { dim: u32, q: u64 },
}

impl SystemRadius {
    /// `r^{2d}` is rational for both variants; this returns it together
    /// with the exponent `2d` used in root-cleared comparisons.
    fn pow_2d(&self, dim: u32) -> Scalar {
        match self {
            SystemRadius::Rational(r) => r.pow(2 * dim),
            SystemRadius::DimRoot { dim: d, q } => {
                debug_assert_eq!(*d, dim);
                Scalar::from_integer(BigInt::from(*d).pow(*d))
                    / Scalar::from_integer(BigInt::from(*q).pow(2 * (*d + 1)))
            }
        }
    }

    /// Floating read-out for reports.
    pub fn to_f64(&self) -> f64 {
        match self {
            SystemRadius::Rational(r) => r.to_f64(),
            SystemRadius::DimRoot { dim, q } => {
                let d = *dim as f64;
                d.sqrt() / (*q as f64).powf((d + 1.0) / d)
            }
        }
    }
}

/// One ball of a system: exact centre plus exact (possibly symbolic) radius.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SystemBall {
    pub center: Point,
    pub radius: SystemRadius,
}

impl SystemBall {
    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Plain-rational view, when the radius admits one.
    pub fn to_ball(&self) -> Option<Ball> {
        match &self.radius {
            SystemRadius::Rational(r) => {
                Some(Ball::new(self.center.clone(), r.clone()).expect("radius positive"))
            }
            SystemRadius::DimRoot { .. } => None,
        }
    }

    /// Exact membership of `p` in this ball scaled by `kappa > 0`.
    ///
    /// For the symbolic radius the test `dist^2 <= kappa^2 d / q^{2(d+1)/d}`
    /// is raised to the `d`-th power, clearing the root:
    /// `(dist^2)^d q^{2(d+1)} <= kappa^{2d} d^d`.
    pub fn contains_scaled(&self, p: &Point, kappa: &Scalar) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        if !kappa.is_positive() {
            return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
        }
        let dist_sq = self.center.dist_sq_unchecked(p);
        Ok(match &self.radius {
            SystemRadius::Rational(r) => dist_sq <= (kappa * r).square(),
            SystemRadius::DimRoot { dim, q } => {
                let d = *dim;
                let lhs =
                    dist_sq.pow(d) * Scalar::from_integer(BigInt::from(*q).pow(2 * (d + 1)));
                let rhs = kappa.pow(2 * d) * Scalar::from_integer(BigInt::from(d).pow(d));
                lhs <= rhs
            }
        })
    }

    /// Exact test `radius > eps` for `eps > 0`.
    pub fn radius_gt(&self, eps: &Scalar) -> bool {
        match &self.radius {
            SystemRadius::Rational(r) => r > eps,
            SystemRadius::DimRoot { dim, q } => {
                let d = *dim;
                let lhs = Scalar::from_integer(BigInt::from(d).pow(d));
                let rhs = eps.pow(2 * d) * Scalar::from_integer(BigInt::from(*q).pow(2 * (d + 1)));
                lhs > rhs
            }
        }
    }

    /// Exact closed intersection with a rational-radius probe ball.
    ///
    /// With a symbolic radius `r` and probe radius `w`, the condition
    /// `sqrt(A) <= r + w` (A the squared centre distance) is decided by
    /// expanding `(sqrt(A) - w)^{2d} = P - Q sqrt(A)` with rational `P, Q`
    /// and comparing against the rational `r^{2d}`; no floating point and
    /// no approximation are involved.
    pub fn intersects_ball(&self, probe: &Ball) -> Result<bool> {
        check_dim(self.dim(), probe.dim())?;
        let dist_sq = self.center.dist_sq_unchecked(probe.center());
        match &self.radius {
            SystemRadius::Rational(r) => {
                let sum = r + probe.radius();
                Ok(dist_sq <= sum.square())
            }
            SystemRadius::DimRoot { dim, q } => {
                let w = probe.radius();
                if dist_sq <= w.square() {
                    return Ok(true);
                }
                let d = *dim;
                let r_pow_2d = SystemRadius::DimRoot { dim: d, q: *q }.pow_2d(d);
                // (sqrt(A) - w)^{2d} = even_part - odd_part * sqrt(A)
                let (even_part, odd_part) = binomial_split(&dist_sq, w, 2 * d);
                // Condition: even_part - odd_part*sqrt(A) <= r^{2d}
                //        <=>  sqrt(A) >= (even_part - r^{2d}) / odd_part
                let threshold = (&even_part - &r_pow_2d) / &odd_part;
                if !threshold.is_positive() {
                    return Ok(true);
                }
                Ok(dist_sq >= threshold.square())
            }
        }
    }

    /// True iff the `kappa`-scaled ball comes within distance zero of the
    /// box, i.e. could contain one of its points. Used to prune grid scans.
    pub fn scaled_reaches_box(&self, region: &BoxRegion, kappa: &Scalar) -> Result<bool> {
        check_dim(self.dim(), region.dim())?;
        let dist_sq = region.dist_sq_to(&self.center)?;
        Ok(match &self.radius {
            SystemRadius::Rational(r) => dist_sq <= (kappa * r).square(),
            SystemRadius::DimRoot { dim, q } => {
                let d = *dim;
                let lhs =
                    dist_sq.pow(d) * Scalar::from_integer(BigInt::from(*q).pow(2 * (d + 1)));
                let rhs = kappa.pow(2 * d) * Scalar::from_integer(BigInt::from(d).pow(d));
                lhs <= rhs
            }
        })
    }
}

/// Splits `(sqrt(A) - w)^n` (n even) into `even - odd * sqrt(A)` with
/// rational `even, odd >= 0`. Returns `(even, odd)`.
fn binomial_split(a: &Scalar, w: &Scalar, n: u32) -> (Scalar, Scalar) {
    debug_assert!(n % 2 == 0);
    let mut even = Scalar::zero();
    let mut odd = Scalar::zero();
    let mut binom = BigInt::one();
    // Powers w^{n-j} descend; A^{j/2} (or A^{(j-1)/2}) ascend.
    for j in 0..=n {
        if j > 0 {
            // binom = C(n, j)
            binom = binom * BigInt::from(n - j + 1) / BigInt::from(j);
        }
        let coeff = Scalar::from_integer(binom.clone()) * w.pow(n - j);
        if j % 2 == 0 {
            even += &(coeff * a.pow(j / 2));
        } else {
            odd += &(coeff * a.pow((j - 1) / 2));
        }
    }
    (even, odd)
}

/// Parameters of the tail-avoidance set: points avoiding every ball
/// `B(x_i, r_i / shrink_denom)` for indices `i >= tail_start`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SurvivorParams {
    pub tail_start: u64,
    pub shrink_denom: u64,
}

impl SurvivorParams {
    pub fn new(tail_start: u64, shrink_denom: u64) -> Result<Self> {
        if tail_start == 0 || shrink_denom == 0 {
            return Err(Error::invalid("tail start and shrink denominator must be >= 1"));
        }
        Ok(SurvivorParams { tail_start, shrink_denom })
    }

    pub fn kappa(&self) -> Scalar {
        Scalar::new(1, BigInt::from(self.shrink_denom)).expect("shrink_denom >= 1")
    }
}

/// A claimed badly-approximable witness: scale factor, tail start, and the
/// index up to which avoidance has been checked.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BadWitness {
    pub kappa: Scalar,
    pub start_index: u64,
    pub verified_up_to: u64,
}

impl BadWitness {
    pub fn new(kappa: Scalar, start_index: u64, verified_up_to: u64) -> Result<Self> {
        if !kappa.is_positive() {
            return Err(Error::invalid("kappa must be positive"));
        }
        if start_index == 0 || verified_up_to < start_index {
            return Err(Error::invalid("need 1 <= start_index <= verified_up_to"));
        }
        Ok(BadWitness { kappa, start_index, verified_up_to })
    }
}

/// Exact bound certifying that every ball after `index_bound` has radius
/// at most the queried epsilon. `max_q` is populated by the classical
/// family (its radii are indexed by the denominator).
#[derive(Clone, Debug, Serialize)]
pub struct CutoffCertificate {
    pub max_q: Option<u64>,
    pub index_bound: u64,
}

/// An indexed system of balls with a fixed dimension.
#[derive(Clone, Debug)]
pub enum BallSystem {
    Classical(ClassicalSystem),
    Z2Lattice,
    Explicit { dim: usize, balls: Vec<Ball> },
}

/// The rational-approximation family restricted to a window.
pub fn classical_system(dim: u32, window: BoxRegion) -> Result<BallSystem> {
    Ok(BallSystem::Classical(ClassicalSystem::new(dim, window)?))
}

/// The radius-2 integer-lattice counterexample system.
pub fn z2_example_system() -> BallSystem {
    BallSystem::Z2Lattice
}

/// A user-supplied finite system.
pub fn explicit_system(dim: usize, balls: Vec<Ball>) -> Result<BallSystem> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be >= 1"));
    }
    for b in &balls {
        check_dim(dim, b.dim())?;
    }
    Ok(BallSystem::Explicit { dim, balls })
}

impl BallSystem {
    pub fn dimension(&self) -> usize {
        match self {
            BallSystem::Classical(c) => c.dim() as usize,
            BallSystem::Z2Lattice => 2,
            BallSystem::Explicit { dim, .. } => *dim,
        }
    }

    /// Number of balls for finite systems, `None` for unbounded ones.
    pub fn size(&self) -> Option<u64> {
        match self {
            BallSystem::Explicit { balls, .. } => Some(balls.len() as u64),
            _ => None,
        }
    }

    /// The ball at one-based index `i`. Deterministic and pure.
    pub fn ball_at(&self, i: u64) -> Result<SystemBall> {
        if i == 0 {
            return Err(Error::invalid("indices are one-based"));
        }
        match self {
            BallSystem::Explicit { balls, .. } => {
                let ball = balls.get(i as usize - 1).ok_or_else(|| {
                    Error::invalid(format!("index {i} out of range for system of {}", balls.len()))
                })?;
                Ok(SystemBall {
                    center: ball.center().clone(),
                    radius: SystemRadius::Rational(ball.radius().clone()),
                })
            }
            BallSystem::Z2Lattice => Ok(z2::ball_at(i)),
            BallSystem::Classical(c) => c
                .iter_from(i)
                .next()
                .map(|(_, b)| b)
                .ok_or_else(|| Error::internal("classical enumeration ended")),
        }
    }

    /// Streaming enumeration from one-based index `start` (inclusive).
    /// Finite systems stop at their size; unbounded systems never stop, so
    /// callers must bound the iteration.
    pub fn iter_from(&self, start: u64) -> Box<dyn Iterator<Item = (u64, SystemBall)> + '_> {
        let start = start.max(1);
        match self {
            BallSystem::Classical(c) => Box::new(c.iter_from(start)),
            BallSystem::Z2Lattice => Box::new(z2::iter_from(start)),
            BallSystem::Explicit { balls, .. } => {
                let skip = (start - 1).min(balls.len() as u64) as usize;
                Box::new(balls[skip..].iter().enumerate().map(move |(k, b)| {
                    (
                        start + k as u64,
                        SystemBall {
                            center: b.center().clone(),
                            radius: SystemRadius::Rational(b.radius().clone()),
                        },
                    )
                }))
            }
        }
    }

    /// Enumeration of indices `start..=end` (one-based, inclusive).
    pub fn iter_range(
        &self,
        start: u64,
        end: u64,
    ) -> Box<dyn Iterator<Item = (u64, SystemBall)> + '_> {
        Box::new(self.iter_from(start).take_while(move |(i, _)| *i <= end))
    }

    /// Radius-cutoff certificate against `eps > 0`: an index bound after
    /// which all radii are at most `eps`. `None` when the system offers no
    /// such certificate (the lattice counterexample).
    pub fn radius_cutoff(&self, eps: &Scalar) -> Result<Option<CutoffCertificate>> {
        if !eps.is_positive() {
            return Err(Error::invalid("epsilon must be positive"));
        }
        match self {
            BallSystem::Classical(c) => Ok(Some(c.radius_cutoff(eps)?)),
            BallSystem::Z2Lattice => Ok(None),
            BallSystem::Explicit { balls, .. } => {
                let last = balls
                    .iter()
                    .enumerate()
                    .rev()
                    .find(|(_, b)| b.radius() > eps)
                    .map(|(k, _)| k as u64 + 1)
                    .unwrap_or(0);
                Ok(Some(CutoffCertificate { max_q: None, index_bound: last }))
            }
        }
    }
}

/// Verdict of the shrinking-locally diagnostic.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShrinkingVerdict {
    /// The system certifies that only finitely many balls can ever exceed
    /// the radius threshold (exact cutoff available).
    CertifiedFinite,
    /// No certificate, but the count stopped growing in the scanned range.
    FiniteUpToBound,
    /// The count of large intersecting balls is still growing at the
    /// bound; evidence that the system is not shrinking locally.
    ViolationGrowing,
}

/// Outcome of [`shrinking_locally_report`]: how many enumerated balls both
/// intersect the probe and have radius above `epsilon`, up to the bound.
#[derive(Clone, Debug, Serialize)]
pub struct ShrinkingReport {
    pub epsilon: Scalar,
    pub index_bound: u64,
    /// Count over indices `i <= index_bound`.
    pub matching_count: u64,
    /// Count over indices `i <= index_bound / 2`; the growth between the
    /// two drives the verdict when no certificate exists.
    pub half_bound_count: u64,
    pub certificate: Option<CutoffCertificate>,
    pub verdict: ShrinkingVerdict,
}

/// Counts the balls up to `index_bound` that intersect `probe` and have
/// radius strictly above `epsilon`. For systems with a radius-cutoff
/// certificate the count is certified final once the bound passes the
/// certificate index.
pub fn shrinking_locally_report(
    system: &BallSystem,
    probe: &Ball,
    epsilon: &Scalar,
    index_bound: u64,
) -> Result<ShrinkingReport> {
    if !epsilon.is_positive() {
        return Err(Error::invalid("epsilon must be positive"));
    }
    check_dim(system.dimension(), probe.dim())?;

    let certificate = system.radius_cutoff(epsilon)?;
    // Balls beyond the certificate index cannot match; clip the scan.
    let scan_end = match &certificate {
        Some(c) => index_bound.min(c.index_bound),
        None => index_bound,
    };

    let half = index_bound / 2;
    let mut matching_count = 0u64;
    let mut half_bound_count = 0u64;
    for (i, ball) in system.iter_range(1, scan_end) {
        if ball.radius_gt(epsilon) && ball.intersects_ball(probe)? {
            matching_count += 1;
            if i <= half {
                half_bound_count += 1;
            }
        }
    }

    let verdict = if certificate.is_some() {
        ShrinkingVerdict::CertifiedFinite
    } else if matching_count > half_bound_count {
        ShrinkingVerdict::ViolationGrowing
    } else {
        ShrinkingVerdict::FiniteUpToBound
    };

    Ok(ShrinkingReport {
        epsilon: epsilon.clone(),
        index_bound,
        matching_count,
        half_bound_count,
        certificate,
        verdict,
    })
}

/// Number of indices `i <= index_bound` with `alpha` inside the
/// `kappa`-scaled ball `i`. Exact.
pub fn hit_count(
    system: &BallSystem,
    alpha: &Point,
    index_bound: u64,
    kappa: &Scalar,
) -> Result<u64> {
    check_dim(system.dimension(), alpha.dim())?;
    if !kappa.is_positive() {
        return Err(Error::invalid("kappa must be positive"));
    }
    let mut count = 0u64;
    for (_, ball) in system.iter_range(1, index_bound) {
        if ball.contains_scaled(alpha, kappa)? {
            count += 1;
        }
    }
    Ok(count)
}

/// True iff `alpha` avoids every `kappa`-scaled ball with index in
/// `[start_index, verified_up_to]`. A `true` result is evidence of
/// badly-approximable behaviour up to the bound, not a proof about the
/// infinite tail.
pub fn tail_survives(system: &BallSystem, alpha: &Point, witness: &BadWitness) -> Result<bool> {
    check_dim(system.dimension(), alpha.dim())?;
    if !witness.kappa.is_positive() {
        return Err(Error::invalid("kappa must be positive"));
    }
    for (_, ball) in system.iter_range(witness.start_index, witness.verified_up_to) {
        if ball.contains_scaled(alpha, &witness.kappa)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// On-disk system description:
/// `{"kind": "classical"|"z2"|"explicit", "dim": d, "window": [...], "balls": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemSpec {
    Classical { dim: u32, window: Vec<(Scalar, Scalar)> },
    Z2,
    Explicit { dim: usize, balls: Vec<Ball> },
}

impl SystemSpec {
    pub fn build(self) -> Result<BallSystem> {
        match self {
            SystemSpec::Classical { dim, window } => {
                classical_system(dim, BoxRegion::from_axes(window)?)
            }
            SystemSpec::Z2 => Ok(z2_example_system()),
            SystemSpec::Explicit { dim, balls } => explicit_system(dim, balls),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{int, rat};

    fn pt2(x: Scalar, y: Scalar) -> Point {
        Point::new(vec![x, y])
    }

    fn classical_unit_1d() -> BallSystem {
        classical_system(1, BoxRegion::unit(1)).unwrap()
    }

    #[test]
    fn hit_count_rational_center_point() {
        // alpha = 0 is the centre 0/q for every q, so with kappa = 1 the
        // count over q <= 10 is at least 10.
        let s = classical_unit_1d();
        let bound = match &s {
            BallSystem::Classical(c) => c.count_through_q(10),
            _ => unreachable!(),
        };
        let hits = hit_count(&s, &Point::new(vec![int(0)]), bound, &Scalar::one()).unwrap();
        assert!(hits >= 10, "got {hits}");
    }

    #[test]
    fn hit_count_monotone_in_bound_and_kappa() {
        let s = classical_unit_1d();
        let alpha = Point::new(vec![rat(2, 7)]);
        let h1 = hit_count(&s, &alpha, 50, &rat(1, 2)).unwrap();
        let h2 = hit_count(&s, &alpha, 200, &rat(1, 2)).unwrap();
        assert!(h1 <= h2);
        let h3 = hit_count(&s, &alpha, 200, &Scalar::one()).unwrap();
        assert!(h2 <= h3);
    }

    #[test]
    fn z2_hit_count_and_tail() {
        let s = z2_example_system();
        let alpha = pt2(rat(1, 2), rat(1, 2));
        // Scaled by 1/10 the radius is 1/5 < sqrt(2)/2: the centre point
        // (1/2,1/2) avoids every shrunk ball.
        let witness = BadWitness::new(rat(1, 10), 1, 10_000).unwrap();
        assert!(tail_survives(&s, &alpha, &witness).unwrap());
        // Unscaled, radius-2 balls centred near (1/2,1/2) hit constantly.
        let hits = hit_count(&s, &alpha, 10_000, &Scalar::one()).unwrap();
        assert!(hits >= 10);
        // Consistency: survival iff zero hits over the same range.
        let hits_shrunk = hit_count(&s, &alpha, 10_000, &rat(1, 10)).unwrap();
        assert_eq!(hits_shrunk, 0);
    }

    #[test]
    fn classical_tail_fails_at_rational_centers() {
        let s = classical_unit_1d();
        let alpha = Point::new(vec![int(0)]);
        let witness = BadWitness::new(Scalar::one(), 1, 50).unwrap();
        assert!(!tail_survives(&s, &alpha, &witness).unwrap());
    }

    #[test]
    fn shrinking_classical_is_certified() {
        let s = classical_unit_1d();
        let probe = Ball::new(Point::new(vec![rat(1, 2)]), rat(1, 2)).unwrap();
        let report = shrinking_locally_report(&s, &probe, &rat(1, 10), 10_000).unwrap();
        assert_eq!(report.verdict, ShrinkingVerdict::CertifiedFinite);
        let cert = report.certificate.as_ref().unwrap();
        assert_eq!(cert.max_q, Some(3));
        // Only the q <= 3 balls can contribute.
        assert!(report.matching_count <= cert.index_bound);
        assert!(report.matching_count > 0);
    }

    #[test]
    fn shrinking_z2_grows() {
        let s = z2_example_system();
        let probe = Ball::new(pt2(int(0), int(0)), int(1)).unwrap();
        let report = shrinking_locally_report(&s, &probe, &int(1), 10_000).unwrap();
        assert_eq!(report.verdict, ShrinkingVerdict::ViolationGrowing);
        assert!(report.matching_count > report.half_bound_count);
        assert!(report.certificate.is_none());
    }

    #[test]
    fn shrinking_finite_system() {
        let balls: Vec<Ball> = (0..5)
            .map(|k| Ball::new(Point::new(vec![int(k)]), int(1)).unwrap())
            .collect();
        let s = explicit_system(1, balls).unwrap();
        let probe = Ball::new(Point::new(vec![int(0)]), int(10)).unwrap();
        let report = shrinking_locally_report(&s, &probe, &rat(1, 2), 100).unwrap();
        assert_eq!(report.verdict, ShrinkingVerdict::CertifiedFinite);
        assert!(report.matching_count <= 5);
    }

    #[test]
    fn symbolic_radius_membership() {
        // d = 2, q = 1: radius sqrt(2). The origin-centred ball contains
        // (1,1) (distance sqrt(2), boundary) but not (1, 6/5).
        let ball = SystemBall {
            center: pt2(int(0), int(0)),
            radius: SystemRadius::DimRoot { dim: 2, q: 1 },
        };
        assert!(ball.contains_scaled(&pt2(int(1), int(1)), &Scalar::one()).unwrap());
        assert!(!ball.contains_scaled(&pt2(int(1), rat(6, 5)), &Scalar::one()).unwrap());
        // Scaled by 1/2 the radius is sqrt(2)/2 ~ 0.707: contains (1/2,1/2).
        assert!(ball.contains_scaled(&pt2(rat(1, 2), rat(1, 2)), &rat(1, 2)).unwrap());
        assert!(!ball.contains_scaled(&pt2(int(1), int(0)), &rat(1, 2)).unwrap());
    }

    #[test]
    fn symbolic_radius_threshold() {
        // d = 2, q = 2: radius sqrt(2)/2^{3/2} = 1/2 exactly.
        let r = SystemBall {
            center: pt2(int(0), int(0)),
            radius: SystemRadius::DimRoot { dim: 2, q: 2 },
        };
        assert!(r.radius_gt(&rat(49, 100)));
        assert!(!r.radius_gt(&rat(1, 2))); // not strictly greater
        assert!(!r.radius_gt(&rat(51, 100)));
    }

    #[test]
    fn symbolic_intersection_matches_rational_collapse() {
        // d = 2, q = 2 has radius exactly 1/2, so the symbolic predicate
        // must agree with the rational one everywhere we can test it.
        let symbolic = SystemBall {
            center: pt2(int(0), int(0)),
            radius: SystemRadius::DimRoot { dim: 2, q: 2 },
        };
        let rational = Ball::new(pt2(int(0), int(0)), rat(1, 2)).unwrap();
        for (cx, cy, w) in [
            (int(1), int(0), rat(1, 2)),   // tangent: 1 = 1/2 + 1/2
            (int(1), int(0), rat(1, 4)),   // 1 > 3/4: disjoint
            (rat(1, 2), int(0), rat(1, 8)),
            (int(0), int(0), rat(1, 16)),  // nested
            (int(2), int(2), int(1)),
            (int(1), int(1), int(1)),      // sqrt(2) < 3/2
        ] {
            let probe = Ball::new(pt2(cx, cy), w).unwrap();
            assert_eq!(
                symbolic.intersects_ball(&probe).unwrap(),
                rational.intersects(&probe).unwrap(),
                "probe {probe:?}"
            );
        }
    }

    #[test]
    fn symbolic_intersection_irrational_radius() {
        // d = 2, q = 1: radius sqrt(2). Probe at distance 3 with radius suited
        // to bracket sqrt(2) + w against 3.
        let ball = SystemBall {
            center: pt2(int(0), int(0)),
            radius: SystemRadius::DimRoot { dim: 2, q: 1 },
        };
        // sqrt(2) + 8/5 = 3.014... >= 3: intersect.
        let probe = Ball::new(pt2(int(3), int(0)), rat(8, 5)).unwrap();
        assert!(ball.intersects_ball(&probe).unwrap());
        // sqrt(2) + 3/2 = 2.914... < 3: disjoint.
        let probe2 = Ball::new(pt2(int(3), int(0)), rat(3, 2)).unwrap();
        assert!(!ball.intersects_ball(&probe2).unwrap());
    }

    #[test]
    fn explicit_system_bounds() {
        let balls = vec![Ball::new(Point::new(vec![int(0)]), int(1)).unwrap()];
        let s = explicit_system(1, balls).unwrap();
        assert_eq!(s.size(), Some(1));
        assert!(s.ball_at(1).is_ok());
        assert!(s.ball_at(2).is_err());
        assert!(s.ball_at(0).is_err());
        let collected: Vec<_> = s.iter_range(1, 100).collect();
        assert_eq!(collected.len(), 1);
    }

    #[test]
    fn system_spec_round_trip() {
        let spec = SystemSpec::from_json(
            r#"{"kind": "classical", "dim": 1, "window": [["0", "1"]]}"#,
        )
        .unwrap();
        let sys = spec.build().unwrap();
        assert_eq!(sys.dimension(), 1);

        let z2 = SystemSpec::from_json(r#"{"kind": "z2"}"#).unwrap().build().unwrap();
        assert_eq!(z2.dimension(), 2);

        let exp = SystemSpec::from_json(
            r#"{"kind": "explicit", "dim": 1, "balls": [{"center": ["1/2"], "radius": "1/4"}]}"#,
        )
        .unwrap()
        .build()
        .unwrap();
        assert_eq!(exp.size(), Some(1));

        assert!(SystemSpec::from_json(r#"{"kind": "classical", "dim": 1, "window": [["0","1"]], "bogus": 3}"#).is_err());
    }

    #[test]
    fn survivor_params_validation() {
        assert!(SurvivorParams::new(0, 3).is_err());
        assert!(SurvivorParams::new(1, 0).is_err());
        assert_eq!(SurvivorParams::new(1, 3).unwrap().kappa(), rat(1, 3));
    }

    #[test]
    fn nesting_of_survivor_scales() {
        // Survival at kappa = 1/2 implies survival at kappa = 1/3 on the
        // same range (smaller balls are easier to avoid).
        let s = classical_unit_1d();
        for num in 1..20i64 {
            let alpha = Point::new(vec![rat(num, 20)]);
            let w_half = BadWitness::new(rat(1, 2), 1, 300).unwrap();
            let w_third = BadWitness::new(rat(1, 3), 1, 300).unwrap();
            if tail_survives(&s, &alpha, &w_half).unwrap() {
                assert!(tail_survives(&s, &alpha, &w_third).unwrap());
            }
        }
    }
}
