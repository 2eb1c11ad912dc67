//! The rational-approximation ball family: centres `p/q` for integer
//! vectors `p` and denominators `q = 1, 2, 3, ...`, radius
//! `sqrt(d) / q^{1 + 1/d}`, restricted to balls that overlap a window box
//! in a set of positive measure.
//!
//! Enumeration order is ascending `q`, lexicographic `p` within each `q`.
//! Radii are exact: `1/q^2` as a rational for `d = 1`, and the symbolic
//! [`SystemRadius::DimRoot`] form for `d >= 2`, compared through
//! root-cleared integer inequalities.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, Point, Scalar};
use crate::systems::{CutoffCertificate, SystemBall, SystemRadius};

#[derive(Clone, Debug)]
pub struct ClassicalSystem {
    dim: u32,
    window: BoxRegion,
}

impl ClassicalSystem {
    pub fn new(dim: u32, window: BoxRegion) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be >= 1"));
        }
        if window.dim() != dim as usize {
            return Err(Error::DimensionMismatch { expected: dim as usize, got: window.dim() });
        }
        if !window.volume().is_positive() {
            return Err(Error::invalid("window must have positive volume"));
        }
        Ok(ClassicalSystem { dim, window })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn window(&self) -> &BoxRegion {
        &self.window
    }

    fn radius(&self, q: u64) -> SystemRadius {
        if self.dim == 1 {
            SystemRadius::Rational(
                Scalar::new(1, BigInt::from(q) * BigInt::from(q)).expect("q > 0"),
            )
        } else {
            SystemRadius::DimRoot { dim: self.dim, q }
        }
    }

    /// True iff the candidate centre's ball overlaps the window in a set
    /// of positive measure: `dist(centre, window) < r_q`, decided exactly.
    fn center_admitted(&self, center: &Point, q: u64) -> bool {
        let dist_sq = self.window.dist_sq_to(center).expect("dims agree");
        if self.dim == 1 {
            let q2 = BigInt::from(q) * BigInt::from(q);
            let r_sq = Scalar::new(1, &q2 * &q2).expect("q > 0");
            dist_sq < r_sq
        } else {
            // dist^2 < d / q^{2(d+1)/d}  <=>  (dist^2)^d q^{2(d+1)} < d^d
            let d = self.dim;
            let lhs = dist_sq.pow(d)
                * Scalar::from_integer(BigInt::from(q).pow(2 * (d + 1)));
            let rhs = Scalar::from_integer(BigInt::from(d).pow(d));
            lhs < rhs
        }
    }

    /// All admitted centres for denominator `q`, in lexicographic order of
    /// the integer vector `p`.
    pub fn centers_for_q(&self, q: u64) -> Vec<Point> {
        let mut axis_ranges = Vec::with_capacity(self.dim as usize);
        let qs = Scalar::from(q);
        for axis in 0..self.dim as usize {
            let (lo, hi) = self.window.axis(axis);
            // Loose integer range from the bound r_q <= d/q; exact filter below.
            let d = Scalar::from_integer(self.dim);
            let first = (&qs * lo - &d).ceil_int();
            let last = (&qs * hi + &d).floor_int();
            axis_ranges.push((first, last));
        }

        let mut centers = Vec::new();
        let mut p: Vec<BigInt> = axis_ranges.iter().map(|(first, _)| first.clone()).collect();
        'odometer: loop {
            let center = Point::new(
                p.iter()
                    .map(|pi| Scalar::new(pi.clone(), BigInt::from(q)).expect("q > 0"))
                    .collect(),
            );
            if self.center_admitted(&center, q) {
                centers.push(center);
            }
            // Advance the lexicographic odometer (last axis fastest).
            for axis in (0..self.dim as usize).rev() {
                if p[axis] < axis_ranges[axis].1 {
                    p[axis] += 1;
                    continue 'odometer;
                }
                p[axis] = axis_ranges[axis].0.clone();
            }
            break;
        }
        centers
    }

    /// Number of balls with denominator exactly `q`. Closed form for
    /// `d = 1`; enumeration for `d >= 2`.
    pub fn count_for_q(&self, q: u64) -> u64 {
        if self.dim == 1 {
            let (lo, hi) = self.window.axis(0);
            let qs = Scalar::from(q);
            let inv_q = Scalar::new(1, BigInt::from(q)).expect("q > 0");
            // p strictly inside (q*lo - 1/q, q*hi + 1/q)
            let first = min_int_gt(&(&qs * lo - &inv_q));
            let last = max_int_lt(&(&qs * hi + &inv_q));
            if last < first {
                0
            } else {
                (last - first + BigInt::one()).to_u64().expect("window at desk scale")
            }
        } else {
            self.centers_for_q(q).len() as u64
        }
    }

    /// Cumulative number of balls with denominator at most `q`.
    pub fn count_through_q(&self, q: u64) -> u64 {
        (1..=q).map(|qq| self.count_for_q(qq)).sum()
    }

    /// One-based index of the first ball with denominator `q`.
    pub fn first_index_of_q(&self, q: u64) -> u64 {
        self.count_through_q(q - 1) + 1
    }

    /// One-based index of the last ball with denominator `q`.
    pub fn last_index_of_q(&self, q: u64) -> u64 {
        self.count_through_q(q)
    }

    /// Largest `q` whose radius exceeds `eps`, or 0 when even `q = 1`
    /// does not. Radii are non-increasing in `q`, so together with
    /// `count_through_q` this certifies that every later ball has radius
    /// at most `eps`.
    pub fn max_q_with_radius_above(&self, eps: &Scalar) -> Result<u64> {
        if !eps.is_positive() {
            return Err(Error::invalid("epsilon must be positive"));
        }
        let d = self.dim;
        let holds = |q: u64| -> bool {
            if q == 0 {
                return true;
            }
            if d == 1 {
                // 1/q^2 > eps  <=>  q^2 * eps < 1
                let q2 = BigInt::from(q) * BigInt::from(q);
                Scalar::from_integer(q2) * eps < Scalar::one()
            } else {
                // d^d > eps^{2d} q^{2(d+1)}
                let lhs = Scalar::from_integer(BigInt::from(d).pow(d));
                let rhs = eps.pow(2 * d)
                    * Scalar::from_integer(BigInt::from(q).pow(2 * (d + 1)));
                lhs > rhs
            }
        };

        // Integer-root first guess, then exact adjustment.
        let mut q = if d == 1 {
            let bound = (eps.denom() / eps.numer()).sqrt();
            bound.to_u64().unwrap_or(u64::MAX / 2)
        } else {
            let num = BigInt::from(d).pow(d) * eps.denom().pow(2 * d);
            let den = eps.numer().pow(2 * d);
            (num / den).nth_root(2 * (d + 1)).to_u64().unwrap_or(u64::MAX / 2)
        };
        while holds(q + 1) {
            q += 1;
        }
        while q > 0 && !holds(q) {
            q -= 1;
        }
        Ok(q)
    }

    pub fn radius_cutoff(&self, eps: &Scalar) -> Result<CutoffCertificate> {
        let max_q = self.max_q_with_radius_above(eps)?;
        let index_bound = if max_q == 0 { 0 } else { self.count_through_q(max_q) };
        Ok(CutoffCertificate { max_q: Some(max_q), index_bound })
    }

    pub fn iter_from(&self, start: u64) -> ClassicalIter<'_> {
        ClassicalIter {
            system: self,
            q: 0,
            block: Vec::new(),
            pos: 0,
            next_index: 1,
            start: start.max(1),
        }
    }
}

/// Largest integer strictly less than `x`.
fn max_int_lt(x: &Scalar) -> BigInt {
    if x.denom().is_one() {
        x.numer() - BigInt::one()
    } else {
        x.floor_int()
    }
}

/// Smallest integer strictly greater than `x`.
fn min_int_gt(x: &Scalar) -> BigInt {
    if x.denom().is_one() {
        x.numer() + BigInt::one()
    } else {
        x.ceil_int()
    }
}

pub struct ClassicalIter<'a> {
    system: &'a ClassicalSystem,
    q: u64,
    block: Vec<Point>,
    pos: usize,
    next_index: u64,
    start: u64,
}

impl Iterator for ClassicalIter<'_> {
    type Item = (u64, SystemBall);

    fn next(&mut self) -> Option<(u64, SystemBall)> {
        loop {
            if self.pos < self.block.len() {
                let index = self.next_index;
                if index < self.start {
                    // Skip within the block while seeking the start index.
                    self.pos += 1;
                    self.next_index += 1;
                    continue;
                }
                let center = self.block[self.pos].clone();
                self.pos += 1;
                self.next_index += 1;
                return Some((
                    index,
                    SystemBall { center, radius: self.system.radius(self.q) },
                ));
            }
            self.q += 1;
            // Skip whole blocks below the start index using counts only.
            loop {
                let cnt = self.system.count_for_q(self.q);
                if self.next_index + cnt > self.start {
                    break;
                }
                self.next_index += cnt;
                self.q += 1;
            }
            self.block = self.system.centers_for_q(self.q);
            self.pos = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{int, rat};

    fn unit_window_1d() -> ClassicalSystem {
        ClassicalSystem::new(1, BoxRegion::unit(1)).unwrap()
    }

    #[test]
    fn q1_yields_the_two_endpoint_balls() {
        let s = unit_window_1d();
        let centers = s.centers_for_q(1);
        assert_eq!(centers.len(), 2);
        assert_eq!(centers[0].coord(0), &int(0));
        assert_eq!(centers[1].coord(0), &int(1));
        // Tangent candidates -1 and 2 are excluded: their balls meet the
        // window only in a single point.
    }

    #[test]
    fn d1_radius_is_inverse_q_squared() {
        let s = unit_window_1d();
        for (i, ball) in s.iter_from(1).take(50) {
            let q = match i {
                1..=2 => 1,
                3..=5 => 2,
                _ => continue,
            };
            match &ball.radius {
                SystemRadius::Rational(r) => assert_eq!(r, &rat(1, (q * q) as i64)),
                _ => panic!("d=1 radius must be rational"),
            }
        }
    }

    #[test]
    fn counts_match_enumeration() {
        let s = unit_window_1d();
        for q in 1..=25 {
            assert_eq!(s.count_for_q(q), s.centers_for_q(q).len() as u64, "q = {q}");
        }
        // On [0,1] each q admits exactly the centres p/q, p = 0..q.
        assert_eq!(s.count_for_q(1), 2);
        assert_eq!(s.count_for_q(2), 3);
        assert_eq!(s.count_for_q(10), 11);
        assert_eq!(s.count_through_q(3), 2 + 3 + 4);
    }

    #[test]
    fn cutoff_certificate_example() {
        // 1/q^2 > 1/10 iff q <= 3.
        let s = unit_window_1d();
        assert_eq!(s.max_q_with_radius_above(&rat(1, 10)).unwrap(), 3);
        let cert = s.radius_cutoff(&rat(1, 10)).unwrap();
        assert_eq!(cert.max_q, Some(3));
        assert_eq!(cert.index_bound, 2 + 3 + 4);
        // Epsilon at least the largest radius: nothing exceeds it.
        assert_eq!(s.max_q_with_radius_above(&int(1)).unwrap(), 0);
        assert!(s.max_q_with_radius_above(&int(0)).is_err());
    }

    #[test]
    fn enumeration_is_deterministic_and_duplicate_free() {
        let s = unit_window_1d();
        let a: Vec<_> = s.iter_from(1).take(100).collect();
        let b: Vec<_> = s.iter_from(1).take(100).collect();
        assert_eq!(a.len(), b.len());
        let mut seen = std::collections::HashSet::new();
        for ((ia, ball_a), (ib, ball_b)) in a.iter().zip(&b) {
            assert_eq!(ia, ib);
            assert_eq!(ball_a.center, ball_b.center);
            // (p, q) pairs never repeat: centre together with the radius
            // identifies the pair.
            assert!(seen.insert((ball_a.center.clone(), ball_a.radius.clone())));
        }
    }

    #[test]
    fn iter_from_matches_prefix() {
        let s = unit_window_1d();
        let all: Vec<_> = s.iter_from(1).take(30).collect();
        let tail: Vec<_> = s.iter_from(11).take(20).collect();
        assert_eq!(&all[10..], &tail[..]);
        assert_eq!(tail[0].0, 11);
    }

    #[test]
    fn every_enumerated_ball_overlaps_window() {
        let s = unit_window_1d();
        for (_, ball) in s.iter_from(1).take(200) {
            let dist_sq = s.window().dist_sq_to(&ball.center).unwrap();
            match &ball.radius {
                SystemRadius::Rational(r) => assert!(dist_sq < r.square()),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn two_dimensional_counts_and_radius_form() {
        let s = ClassicalSystem::new(2, BoxRegion::unit(2)).unwrap();
        // q = 1: radius sqrt(2)/1 admits every lattice point within
        // distance sqrt(2) of the unit square's interior measure overlap.
        let c1 = s.centers_for_q(1);
        assert!(!c1.is_empty());
        for (_, ball) in s.iter_from(1).take(20) {
            match ball.radius {
                SystemRadius::DimRoot { dim: 2, .. } => {}
                _ => panic!("d=2 radius must stay symbolic"),
            }
        }
        // Cutoff: sqrt(2)/q^{3/2} > 1/2 iff q^3 < 8*... check a couple
        // against the scalar inequality directly.
        let qmax = s.max_q_with_radius_above(&rat(1, 2)).unwrap();
        // r_q = sqrt(2)/q^{3/2}: q=2 gives 0.5 exactly (not >), q=1 gives ~1.41.
        assert_eq!(qmax, 1);
    }

    #[test]
    fn empty_window_rejected() {
        let w = BoxRegion::from_axes(vec![(int(0), int(0))]).unwrap();
        assert!(ClassicalSystem::new(1, w).is_err());
    }
}
